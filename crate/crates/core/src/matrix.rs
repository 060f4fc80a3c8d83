//! Fixed-size complex matrices over the five-level basis and their
//! column-major vectorization.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

pub type C64 = Complex64;

/// Dimension of the atomic Hilbert space.
pub const DIM: usize = 5;
/// Dimension of Liouville space (vectorized 5×5 matrices).
pub const LDIM: usize = DIM * DIM;

/// 5×5 complex matrix in the basis order `|1⟩, |1′⟩, |2⟩, |3⟩, |4⟩`.
pub type ComplexMatrix5 = SMatrix<C64, DIM, DIM>;
pub type ComplexVector5 = SVector<C64, DIM>;
pub type LiouvilleVector = SVector<C64, LDIM>;

/// Atomic levels. The discriminant is the matrix index.
///
/// In the hydrogen realization `|1⟩ = |S,1;1⟩`, `|1′⟩ = |S,1;−1⟩`,
/// `|2⟩ = |S,1;0⟩`, `|3⟩ = |S,0;0⟩` and `|4⟩ = |P,0;0⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    One = 0,
    OnePrime = 1,
    Two = 2,
    Three = 3,
    Four = 4,
}

impl Level {
    pub const ALL: [Level; DIM] = [
        Level::One,
        Level::OnePrime,
        Level::Two,
        Level::Three,
        Level::Four,
    ];
    pub const GROUND: [Level; 4] = [Level::One, Level::OnePrime, Level::Two, Level::Three];

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn label(self) -> &'static str {
        match self {
            Level::One => "1",
            Level::OnePrime => "1'",
            Level::Two => "2",
            Level::Three => "3",
            Level::Four => "4",
        }
    }

    /// Hyperfine/Zeeman label `|L, F; m⟩` of the hydrogen realization.
    pub const fn hydrogen_label(self) -> &'static str {
        match self {
            Level::One => "|S,1;1>",
            Level::OnePrime => "|S,1;-1>",
            Level::Two => "|S,1;0>",
            Level::Three => "|S,0;0>",
            Level::Four => "|P,0;0>",
        }
    }
}

/// Slot of matrix element `(row, col)` in the column-major vectorization.
#[inline]
pub const fn slot(row: usize, col: usize) -> usize {
    row + DIM * col
}

#[inline]
pub fn vectorize(m: &ComplexMatrix5) -> LiouvilleVector {
    // nalgebra storage is column-major already.
    LiouvilleVector::from_column_slice(m.as_slice())
}

#[inline]
pub fn unvectorize(v: &LiouvilleVector) -> ComplexMatrix5 {
    ComplexMatrix5::from_column_slice(v.as_slice())
}

/// `|row⟩⟨col|`.
pub fn projector(row: Level, col: Level) -> ComplexMatrix5 {
    let mut m = ComplexMatrix5::zeros();
    m[(row.index(), col.index())] = C64::new(1.0, 0.0);
    m
}

pub fn max_abs(m: &ComplexMatrix5) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |A - A†|`.
pub fn hermiticity_defect(m: &ComplexMatrix5) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn commutator(a: &ComplexMatrix5, b: &ComplexMatrix5) -> ComplexMatrix5 {
    a * b - b * a
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix5) -> [f64; DIM] {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut out = [0.0; DIM];
    for (o, e) in out.iter_mut().zip(eig.eigenvalues.iter()) {
        *o = *e;
    }
    out.sort_by(f64::total_cmp);
    out
}
