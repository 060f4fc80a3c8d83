use nalgebra::{Const, LU};
use serde::Serialize;

use super::superop::{liouvillian, SuperMatrix, Superoperator};
use super::{LinearResponse, RelaxationParams};
use crate::error::{Error, Result};
use crate::matrix::{
    commutator, hermitian_eigenvalues, slot, unvectorize, vectorize, ComplexMatrix5, Level,
    LiouvilleVector, C64, DIM, LDIM,
};
use crate::model::{build_h0, probe_potential, DriveConfig};

/// Largest accepted residual of a response solve.
pub const RESIDUAL_LIMIT: f64 = 1e-9;
/// Singular values below this fraction of the largest are treated as zero.
const RANK_TOLERANCE: f64 = 1e-13;
/// The row overwritten by the trace condition.
const REPLACED_ROW: usize = slot(0, 0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Lu,
    MinimumNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveDiagnostics {
    pub method: SolveMethod,
    /// Ratio of extreme singular values of the bordered matrix.
    pub condition: f64,
    /// Kernel dimension of the bordered matrix; non-zero means the generator
    /// conserves more than the trace.
    pub extra_kernel_dim: usize,
}

enum Factor {
    Lu(Box<LU<C64, Const<LDIM>, Const<LDIM>>>),
    /// `x = V diag(1/s) Uᴴ b` over the non-negligible singular values.
    MinimumNorm {
        u: Box<SuperMatrix>,
        v: Box<SuperMatrix>,
        s_inv: Vec<f64>,
    },
    Failed,
}

/// Generator with one population equation replaced by the trace row.
///
/// The trace row is redundant in `L x = b` whenever `1ᵀL = 0`, so replacing it
/// by `tr x = t` selects the solution with prescribed trace. A generator with
/// additional conserved quantities leaves a kernel; the minimum-norm solution
/// is returned then.
pub struct BorderedSystem {
    factor: Factor,
    pub diagnostics: SolveDiagnostics,
}

impl BorderedSystem {
    pub fn new(l: &Superoperator) -> Self {
        let mut a: SuperMatrix = *l.matrix();
        a.row_mut(REPLACED_ROW).fill(C64::default());
        for i in 0..DIM {
            a[(REPLACED_ROW, slot(i, i))] = C64::new(1.0, 0.0);
        }

        let svd = faer::Mat::<C64>::from_fn(LDIM, LDIM, |i, j| a[(i, j)]).svd();
        let svd = match svd {
            Ok(svd) => svd,
            Err(_) => {
                let diagnostics = SolveDiagnostics {
                    method: SolveMethod::MinimumNorm,
                    condition: f64::INFINITY,
                    extra_kernel_dim: LDIM,
                };
                return Self {
                    factor: Factor::Failed,
                    diagnostics,
                };
            }
        };
        let sv: Vec<f64> = (0..LDIM).map(|k| svd.S()[k].re).collect();
        let smax = sv.iter().copied().fold(0.0, f64::max);
        let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
        let eps = RANK_TOLERANCE * smax;
        let extra_kernel_dim = sv.iter().filter(|s| **s <= eps).count();
        let condition = if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        };

        let (factor, method) = if extra_kernel_dim == 0 {
            (Factor::Lu(Box::new(a.lu())), SolveMethod::Lu)
        } else {
            let u = Box::new(SuperMatrix::from_fn(|i, j| svd.U()[(i, j)]));
            let v = Box::new(SuperMatrix::from_fn(|i, j| svd.V()[(i, j)]));
            let s_inv = (0..LDIM)
                .map(|k| if sv[k] > eps { 1.0 / sv[k] } else { 0.0 })
                .collect();
            (
                Factor::MinimumNorm { u, v, s_inv },
                SolveMethod::MinimumNorm,
            )
        };
        Self {
            factor,
            diagnostics: SolveDiagnostics {
                method,
                condition,
                extra_kernel_dim,
            },
        }
    }

    /// Solve `L x = b` with `tr x = trace`. The population entry of `b` in the
    /// replaced row is ignored.
    pub fn solve(&self, rhs: &LiouvilleVector, trace: C64) -> Result<LiouvilleVector> {
        let mut b = *rhs;
        b[REPLACED_ROW] = trace;
        let x = match &self.factor {
            Factor::Lu(lu) => lu.solve(&b),
            Factor::MinimumNorm { u, v, s_inv } => {
                let mut y = u.ad_mul(&b);
                for (yk, sk) in y.iter_mut().zip(s_inv) {
                    *yk *= *sk;
                }
                Some(v.as_ref() * y)
            }
            Factor::Failed => None,
        };
        x.filter(|x| x.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
            .ok_or_else(|| {
                Error::Singular(format!(
                    "bordered system not solvable (condition {:e}, extra kernel {})",
                    self.diagnostics.condition, self.diagnostics.extra_kernel_dim
                ))
            })
    }
}

fn hermitian_part(m: &ComplexMatrix5) -> ComplexMatrix5 {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn trace(m: &ComplexMatrix5) -> C64 {
    m.diagonal().sum()
}

/// Steady state of `H₀` (probe ignored) under the relaxation `r`, normalized
/// to unit trace.
pub fn steady_state_numeric(cfg: &DriveConfig, r: &RelaxationParams) -> Result<ComplexMatrix5> {
    let l = liouvillian(&build_h0(cfg)?, r)?;
    let system = BorderedSystem::new(&l);
    let x = system.solve(&LiouvilleVector::zeros(), C64::new(1.0, 0.0))?;

    let residual = (l.matrix() * x).norm();
    if residual > RESIDUAL_LIMIT {
        return Err(Error::IllConditioned {
            residual,
            condition: system.diagnostics.condition,
        });
    }
    let rho = hermitian_part(&unvectorize(&x));
    let lowest = hermitian_eigenvalues(&rho)[0];
    if lowest < -1e-12 {
        return Err(Error::Unphysical(format!(
            "steady-state eigenvalue {lowest:e}"
        )));
    }
    Ok(rho)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSteadyState {
    pub rho: ComplexMatrix5,
    pub warning: Option<String>,
}

/// Closed-form steady state for the default relaxation model:
///
/// ```text
/// D   = 8Γ²γ + 10Ωc²γ + 3ΓΩc²
/// ρ11 = ρ1′1′ = ρ33 = (2γ(Γ² + Ωc²) + ΓΩc²)/D
/// ρ22 = 2γ(Γ² + Ωc²)/D
/// ρ44 = 2γΩc²/D
/// ρ42 = i(Γ/Ωc)ρ44 = ρ̄24
/// ```
///
/// It depends on neither `Δ` nor the rf field.
pub fn steady_state_analytic(
    cfg: &DriveConfig,
    r: &RelaxationParams,
) -> Result<AnalyticSteadyState> {
    cfg.validate()?;
    r.validate()?;
    let (g, y, oc) = (r.gamma_sp, r.gamma_ex, cfg.omega_c);
    let oc2 = oc * oc;
    let d = 8.0 * g * g * y + 10.0 * oc2 * y + 3.0 * g * oc2;

    let mut rho = ComplexMatrix5::zeros();
    let mut set = |a: Level, b: Level, v: C64| rho[(a.index(), b.index())] = v;
    if d == 0.0 {
        for l in Level::GROUND {
            set(l, l, C64::new(0.25, 0.0));
        }
        let warning = "no coupling field and no spin exchange: steady state undetermined, using equipartition";
        return Ok(AnalyticSteadyState {
            rho,
            warning: Some(warning.to_owned()),
        });
    }

    let pumped = (2.0 * y * (g * g + oc2) + g * oc2) / d;
    let p44 = 2.0 * y * oc2 / d;
    set(Level::One, Level::One, C64::new(pumped, 0.0));
    set(Level::OnePrime, Level::OnePrime, C64::new(pumped, 0.0));
    set(Level::Three, Level::Three, C64::new(pumped, 0.0));
    set(
        Level::Two,
        Level::Two,
        C64::new(2.0 * y * (g * g + oc2) / d, 0.0),
    );
    set(Level::Four, Level::Four, C64::new(p44, 0.0));
    if oc > 0.0 {
        let c = C64::new(0.0, g / oc * p44);
        set(Level::Four, Level::Two, c);
        set(Level::Two, Level::Four, c.conj());
    }
    Ok(AnalyticSteadyState { rho, warning: None })
}

/// Solve `L σ = i[V, ρ]` with `tr σ = 0`, where `V` is built from the probe
/// amplitudes in `cfg` and `L` from `H₀`.
pub fn linear_response(
    cfg: &DriveConfig,
    r: &RelaxationParams,
    rho: &ComplexMatrix5,
) -> Result<LinearResponse> {
    let l = liouvillian(&build_h0(cfg)?, r)?;
    let system = BorderedSystem::new(&l);
    linear_response_with_system(&l, &system, cfg, rho)
}

/// [`linear_response`] reusing an already factored generator.
pub fn linear_response_with_system(
    l: &Superoperator,
    system: &BorderedSystem,
    cfg: &DriveConfig,
    rho: &ComplexMatrix5,
) -> Result<LinearResponse> {
    let v = probe_potential(cfg)?;
    let source = commutator(&v, rho) * C64::new(0.0, 1.0);
    let scale = v.norm() * rho.norm();
    let leak = trace(&source).norm();
    if leak > 1e-14 * scale.max(1e-300) {
        return Err(Error::Singular(format!(
            "probe source term has trace {leak:e}"
        )));
    }
    let rhs = vectorize(&source);
    let x = system.solve(&rhs, C64::default())?;
    let residual = (l.matrix() * x - rhs).norm();
    if residual > RESIDUAL_LIMIT {
        return Err(Error::IllConditioned {
            residual,
            condition: system.diagnostics.condition,
        });
    }
    Ok(LinearResponse {
        sigma: unvectorize(&x),
        residual,
        diagnostics: system.diagnostics,
    })
}
