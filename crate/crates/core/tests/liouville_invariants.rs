use eit_core::geometry::PolarizationConfig;
use eit_core::liouville::{
    linear_response, liouvillian, steady_state_analytic, steady_state_numeric, time_evolve,
    RelaxationParams,
};
use eit_core::matrix::{
    commutator, hermitian_eigenvalues, hermiticity_defect, max_abs, ComplexMatrix5, C64,
};
use eit_core::model::{build_h0, probe_potential, DriveConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn drive(omega_c: f64, omega_r: f64, delta: f64) -> DriveConfig {
    PolarizationConfig::from_rabi(0.0, 0.0, omega_r)
        .unwrap()
        .drive(delta, omega_c)
        .unwrap()
}

fn random_hermitian(rng: &mut ChaCha8Rng) -> ComplexMatrix5 {
    let m = ComplexMatrix5::from_fn(|_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    (m + m.adjoint()) * c(0.5)
}

fn arb_c64() -> impl Strategy<Value = C64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn arb_drive() -> impl Strategy<Value = DriveConfig> {
    (-3.0..3.0f64, 0.0..5.0f64, arb_c64(), arb_c64()).prop_map(|(delta, oc, r, rp)| {
        DriveConfig::default()
            .with_delta(delta)
            .with_coupling(oc)
            .with_rf(r, rp)
    })
}

fn arb_relaxation() -> impl Strategy<Value = RelaxationParams> {
    (1e-6..0.5f64, any::<bool>()).prop_map(|(y, optical)| RelaxationParams {
        optical_exchange_dephasing: optical,
        ..RelaxationParams::with_gamma_ratio(y)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generator_annihilates_trace(cfg in arb_drive(), r in arb_relaxation()) {
        let l = liouvillian(&build_h0(&cfg).unwrap(), &r).unwrap();
        prop_assert!(l.trace_defect() < 1e-12, "{}", l.trace_defect());
    }

    #[test]
    fn steady_state_is_physical(cfg in arb_drive(), r in arb_relaxation()) {
        let rho = steady_state_numeric(&cfg, &r).unwrap();
        prop_assert!((rho.trace() - c(1.0)).norm() < 1e-12);
        prop_assert!(hermiticity_defect(&rho) == 0.0);
        prop_assert!(hermitian_eigenvalues(&rho)[0] >= -1e-12);
    }

    #[test]
    fn probe_source_is_traceless(cfg in arb_drive(), p in arb_c64(), pp in arb_c64()) {
        let r = RelaxationParams::default();
        let rho = steady_state_numeric(&cfg, &r).unwrap();
        let v = probe_potential(&cfg.with_probe(p, pp)).unwrap();
        prop_assert!(commutator(&v, &rho).trace().norm() < 1e-14);
    }

    #[test]
    fn response_is_traceless_and_solved(cfg in arb_drive(), p in arb_c64(), pp in arb_c64()) {
        let r = RelaxationParams::default();
        let rho = steady_state_numeric(&cfg, &r).unwrap();
        let scale = 1e-3 / p.norm().max(pp.norm()).max(1e-12);
        let resp = linear_response(&cfg.with_probe(p * scale, pp * scale), &r, &rho).unwrap();
        prop_assert!(resp.sigma.trace().norm() < 1e-10);
        prop_assert!(resp.residual < 1e-9);
    }
}

#[test]
fn generator_preserves_hermiticity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let configs = [
        drive(4.0, 1.0, 0.3),
        drive(0.1, 0.01, -1.0),
        DriveConfig::default()
            .with_coupling(1.0)
            .with_rf(C64::new(0.3, 0.2), C64::new(-0.1, 0.5)),
    ];
    for cfg in configs {
        let l = liouvillian(&build_h0(&cfg).unwrap(), &RelaxationParams::default()).unwrap();
        for _ in 0..100 {
            let x = random_hermitian(&mut rng);
            let out = l.apply(&x);
            assert!(hermiticity_defect(&out) < 1e-12);
        }
    }
}

#[test]
fn steady_state_matches_closed_form_on_grid() {
    let r = RelaxationParams::default();
    for oc in [0.1, 1.0, 4.0] {
        for or in [0.0, 0.01, 1.0] {
            let sigma = or / std::f64::consts::SQRT_2;
            for delta in [0.0, sigma, -sigma, 2.0] {
                let cfg = drive(oc, or, delta);
                let numeric = steady_state_numeric(&cfg, &r).unwrap();
                let analytic = steady_state_analytic(&cfg, &r).unwrap();
                assert!(analytic.warning.is_none());
                let err = max_abs(&(numeric - analytic.rho));
                assert!(err <= 1e-9, "Ωc={oc} Ωr={or} Δ={delta}: {err:e}");
            }
        }
    }
}

#[test]
fn dynamics_converge_to_common_fixed_point() {
    // 50/γ with γ = 1e-2 keeps the run short; the rate structure is the same.
    let r = RelaxationParams::with_gamma_ratio(1e-2);
    let cfg = drive(4.0, 1.0, 0.0);
    let t = 50.0 / r.gamma_ex;
    let pure = |k: usize| {
        let mut m = ComplexMatrix5::zeros();
        m[(k, k)] = c(1.0);
        m
    };
    let mixed = ComplexMatrix5::from_diagonal(&[0.1, 0.2, 0.3, 0.4, 0.0].map(c).into());
    let starts = [pure(0), pure(3), mixed];
    let ends: Vec<_> = starts
        .iter()
        .map(|rho0| time_evolve(&cfg, &r, rho0, t, 0.2).unwrap())
        .collect();
    for i in 0..ends.len() {
        for j in i + 1..ends.len() {
            assert!(max_abs(&(ends[i] - ends[j])) < 1e-6);
        }
    }
    let rho = steady_state_numeric(&cfg, &r).unwrap();
    assert!(max_abs(&(ends[0] - rho)) < 1e-6);
}
