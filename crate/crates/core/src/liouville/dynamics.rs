use super::superop::{liouvillian, SuperMatrix};
use super::RelaxationParams;
use crate::error::{ensure_finite, Error, Result};
use crate::matrix::{hermiticity_defect, unvectorize, vectorize, ComplexMatrix5, C64};
use crate::model::{build_h0, DriveConfig};

const TRACE_DRIFT_LIMIT: f64 = 1e-6;
const CHECK_EVERY: usize = 1024;

/// Integrate `dρ/dt = L ρ` (generator of `H₀`) from `rho0` to `t_final` with
/// classical fixed-step RK4.
///
/// The number of steps is `⌈t_final/dt⌉`; the step is shrunk so the last one
/// lands exactly on `t_final`. Because the system is linear and autonomous,
/// one RK4 step is the fixed polynomial `1 + hL + (hL)²/2 + (hL)³/6 + (hL)⁴/24`,
/// which is formed once.
pub fn time_evolve(
    cfg: &DriveConfig,
    r: &RelaxationParams,
    rho0: &ComplexMatrix5,
    t_final: f64,
    dt: f64,
) -> Result<ComplexMatrix5> {
    ensure_finite("t_final", t_final)?;
    ensure_finite("dt", dt)?;
    if t_final < 0.0 {
        return Err(Error::invalid(
            "t_final",
            format!("must be non-negative, got {t_final}"),
        ));
    }
    if dt <= 0.0 {
        return Err(Error::invalid("dt", format!("must be positive, got {dt}")));
    }
    let defect = hermiticity_defect(rho0);
    if defect > 1e-12 {
        return Err(Error::Unphysical(format!(
            "initial state not Hermitian (defect {defect:e})"
        )));
    }
    let tr0 = rho0.trace();
    if (tr0 - C64::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(Error::Unphysical(format!("initial trace {tr0}")));
    }

    let l = liouvillian(&build_h0(cfg)?, r)?;
    let steps = (t_final / dt).ceil() as usize;
    if steps == 0 {
        return Ok(*rho0);
    }
    let h = t_final / steps as f64;

    let hl = l.matrix() * C64::new(h, 0.0);
    let mut step = SuperMatrix::identity();
    let mut term = SuperMatrix::identity();
    for k in 1..=4 {
        term = term * hl * C64::new(1.0 / k as f64, 0.0);
        step += term;
    }

    let mut x = vectorize(rho0);
    for n in 1..=steps {
        x = step * x;
        if n % CHECK_EVERY == 0 || n == steps {
            let drift = (unvectorize(&x).trace() - tr0).norm();
            if drift.is_nan() || drift > TRACE_DRIFT_LIMIT {
                return Err(Error::Unstable {
                    drift,
                    time: n as f64 * h,
                });
            }
        }
    }
    Ok(unvectorize(&x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::steady_state_numeric;
    use crate::matrix::max_abs;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn ground_one() -> ComplexMatrix5 {
        let mut m = ComplexMatrix5::zeros();
        m[(0, 0)] = c(1.0);
        m
    }

    #[test]
    fn steady_state_is_fixed_point() {
        let r = RelaxationParams::with_gamma_ratio(1e-2);
        let cfg = DriveConfig::default()
            .with_coupling(4.0)
            .with_rf(c(0.7), c(0.7));
        let rho = steady_state_numeric(&cfg, &r).unwrap();
        let out = time_evolve(&cfg, &r, &rho, 200.0, 0.05).unwrap();
        assert!(max_abs(&(out - rho)) < 1e-10);
    }

    #[test]
    fn trivial_generator_is_identity() {
        let r = RelaxationParams {
            gamma_sp: 1.0,
            gamma_ex: 0.0,
            optical_exchange_dephasing: false,
        };
        // Only ground populations: untouched by D_sp without excited population.
        let out = time_evolve(&DriveConfig::default(), &r, &ground_one(), 10.0, 0.1).unwrap();
        assert_eq!(out, ground_one());
    }

    #[test]
    fn relaxes_to_steady_state() {
        let r = RelaxationParams::with_gamma_ratio(0.05);
        let cfg = DriveConfig::default()
            .with_coupling(1.0)
            .with_rf(c(0.5), c(0.5));
        let out = time_evolve(&cfg, &r, &ground_one(), 50.0 / r.gamma_ex, 0.05).unwrap();
        let rho = steady_state_numeric(&cfg, &r).unwrap();
        assert!(max_abs(&(out - rho)) < 1e-6);
    }

    #[test]
    fn detects_instability() {
        let r = RelaxationParams::default();
        let cfg = DriveConfig::default().with_coupling(40.0);
        let err = time_evolve(&cfg, &r, &ground_one(), 100.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Unstable { .. }), "{err}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let r = RelaxationParams::default();
        let cfg = DriveConfig::default();
        assert!(time_evolve(&cfg, &r, &ground_one(), 1.0, 0.0).is_err());
        assert!(time_evolve(&cfg, &r, &(ground_one() * c(2.0)), 1.0, 0.1).is_err());
    }
}
