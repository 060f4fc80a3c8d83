use std::ops::{Add, Neg, Sub};

use nalgebra::SMatrix;

use super::RelaxationParams;
use crate::error::{Error, Result};
use crate::matrix::{
    hermiticity_defect, max_abs, slot, unvectorize, vectorize, ComplexMatrix5, Level,
    LiouvilleVector, C64, DIM, LDIM,
};

pub type SuperMatrix = SMatrix<C64, LDIM, LDIM>;

/// Linear map on column-major vectorized 5×5 matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superoperator(pub SuperMatrix);

impl Superoperator {
    pub fn zeros() -> Self {
        Self(SuperMatrix::zeros())
    }

    /// Matrix of a linear map given by its action on matrices.
    pub fn from_map(f: impl Fn(&ComplexMatrix5) -> ComplexMatrix5) -> Self {
        let mut m = SuperMatrix::zeros();
        for k in 0..LDIM {
            let mut e = LiouvilleVector::zeros();
            e[k] = C64::new(1.0, 0.0);
            m.set_column(k, &vectorize(&f(&unvectorize(&e))));
        }
        Self(m)
    }

    pub fn matrix(&self) -> &SuperMatrix {
        &self.0
    }

    pub fn apply(&self, x: &ComplexMatrix5) -> ComplexMatrix5 {
        unvectorize(&(self.0 * vectorize(x)))
    }

    /// `‖1ᵀ L‖` with `1 = vec(I)`: zero iff the map is trace-annihilating.
    pub fn trace_defect(&self) -> f64 {
        let mut row = nalgebra::SVector::<C64, LDIM>::zeros();
        for i in 0..DIM {
            row += self.0.row(slot(i, i)).transpose();
        }
        row.norm()
    }
}

impl Add for Superoperator {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for Superoperator {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Neg for Superoperator {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

const EXCITED: usize = Level::Four.index();
const GROUND: [usize; 4] = [0, 1, 2, 3];

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Radiative decay of `|4⟩` at rate `Γ`, with branching ¼ into each ground level.
pub fn spontaneous_superop(r: &RelaxationParams) -> Superoperator {
    let g = r.gamma_sp;
    Superoperator::from_map(|x| {
        let mut out = ComplexMatrix5::zeros();
        let p4 = x[(EXCITED, EXCITED)];
        out[(EXCITED, EXCITED)] = -p4 * g;
        for b in GROUND {
            out[(b, b)] = p4 * (0.25 * g);
            out[(EXCITED, b)] = -x[(EXCITED, b)] * (0.5 * g);
            out[(b, EXCITED)] = -x[(b, EXCITED)] * (0.5 * g);
        }
        out
    })
}

/// Linearized spin-exchange relaxation of the ground manifold at rate `γ`.
pub fn spin_exchange_superop(r: &RelaxationParams) -> Superoperator {
    let g = r.gamma_ex;
    let (one, onep, two, three) = (0, 1, 2, 3);
    Superoperator::from_map(|x| {
        let mut out = ComplexMatrix5::zeros();
        let p = |i: usize| x[(i, i)];
        let half = real(0.5 * g);

        out[(one, one)] = -half * (p(one) + p(onep) - p(two) - p(three));
        out[(onep, onep)] = -half * (p(one) + p(onep) - p(two) - p(three));
        out[(two, two)] = -half * (p(two) * 3.0 - p(onep) - p(one) - p(three));
        out[(three, three)] = -half * (p(three) * 3.0 - p(onep) - p(one) - p(two));

        // σ21 ↔ σ1′2 and their conjugates σ12 ↔ σ21′.
        let (s21, s1p2) = (x[(two, one)], x[(onep, two)]);
        out[(two, one)] = -(s21 - s1p2) * g;
        out[(onep, two)] = -(s1p2 - s21) * g;
        let (s12, s21p) = (x[(one, two)], x[(two, onep)]);
        out[(one, two)] = -(s12 - s21p) * g;
        out[(two, onep)] = -(s21p - s12) * g;

        out[(onep, one)] = -x[(onep, one)] * (2.0 * g);
        out[(one, onep)] = -x[(one, onep)] * (2.0 * g);

        for a in [one, onep, two] {
            out[(three, a)] = -x[(three, a)] * g;
            out[(a, three)] = -x[(a, three)] * g;
        }

        if r.optical_exchange_dephasing {
            for b in GROUND {
                out[(EXCITED, b)] = -x[(EXCITED, b)] * g;
                out[(b, EXCITED)] = -x[(b, EXCITED)] * g;
            }
        }
        out
    })
}

/// `X ↦ i[h, X]`.
pub fn coherent_superop(h: &ComplexMatrix5) -> Result<Superoperator> {
    let deviation = hermiticity_defect(h);
    if deviation > 1e-14 * max_abs(h).max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let i = C64::new(0.0, 1.0);
    Ok(Superoperator::from_map(|x| (h * x - x * h) * i))
}

/// Full generator `D_sp + D_ex − i[h, ·]`.
pub fn liouvillian(h: &ComplexMatrix5, r: &RelaxationParams) -> Result<Superoperator> {
    r.validate()?;
    Ok(spontaneous_superop(r) + spin_exchange_superop(r) - coherent_superop(h)?)
}
