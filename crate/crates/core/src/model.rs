//! Rotating-frame Hamiltonian, the rf-dressed basis, and dark-state analysis.
//!
//! The Hamiltonian in the rotating frame is
//!
//! ```text
//! H = Δ(|2⟩⟨2| + |4⟩⟨4|)
//!   − ½(Ωr|3⟩⟨1| + Ω′r|3⟩⟨1′| + h.c.)
//!   − ½Ωc(|4⟩⟨2| + |2⟩⟨4|)
//!   − ½(Ωp|4⟩⟨1| + Ω′p|4⟩⟨1′| + h.c.)
//! ```
//!
//! The coupling and rf fields are exactly resonant, so the probe detuning `Δ`
//! is the only frequency offset.
//!
//! The rf block diagonalizes into the dressed triplet `|−⟩, |0⟩, |+⟩` with
//! energies `−Σ, 0, +Σ`. The sign convention (which of `|±⟩` sits above the
//! other) is a choice: `|−⟩` carries `+|3⟩` and has energy `−Σ`.

use nalgebra::{SymmetricEigen, Vector3};
use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};
use crate::matrix::{max_abs, ComplexMatrix5, ComplexVector5, Level, C64, DIM};

/// Default excited-state overlap below which an eigenvector counts as dark.
pub const DEFAULT_DARK_TOLERANCE: f64 = 1e-10;
/// Detuning step used to tell Raman from non-Raman dark states.
pub const CLASSIFICATION_STEP: f64 = 0.1;

const HALF: C64 = C64::new(0.5, 0.0);

/// Field amplitudes and probe detuning, all in units of `Γ`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct DriveConfig {
    /// Probe detuning `Δ`.
    pub delta: f64,
    /// Coupling Rabi frequency `Ωc` (real, non-negative).
    pub omega_c: f64,
    pub omega_r: C64,
    pub omega_r_prime: C64,
    pub omega_p: C64,
    pub omega_p_prime: C64,
}

impl DriveConfig {
    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_coupling(mut self, omega_c: f64) -> Self {
        self.omega_c = omega_c;
        self
    }

    pub fn with_rf(mut self, omega_r: C64, omega_r_prime: C64) -> Self {
        self.omega_r = omega_r;
        self.omega_r_prime = omega_r_prime;
        self
    }

    pub fn with_probe(mut self, omega_p: C64, omega_p_prime: C64) -> Self {
        self.omega_p = omega_p;
        self.omega_p_prime = omega_p_prime;
        self
    }

    /// Same drive with the probe switched off.
    pub fn without_probe(self) -> Self {
        self.with_probe(C64::default(), C64::default())
    }

    pub fn probe_is_off(&self) -> bool {
        self.omega_p == C64::default() && self.omega_p_prime == C64::default()
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("delta", self.delta)?;
        ensure_finite("omega_c", self.omega_c)?;
        if self.omega_c < 0.0 {
            return Err(Error::invalid(
                "omega_c",
                format!("must be non-negative, got {}", self.omega_c),
            ));
        }
        for (name, z) in [
            ("omega_r", self.omega_r),
            ("omega_r_prime", self.omega_r_prime),
            ("omega_p", self.omega_p),
            ("omega_p_prime", self.omega_p_prime),
        ] {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::invalid(name, format!("must be finite, got {z}")));
            }
        }
        Ok(())
    }
}

fn set_hermitian(h: &mut ComplexMatrix5, row: Level, col: Level, value: C64) {
    h[(row.index(), col.index())] = value;
    h[(col.index(), row.index())] = value.conj();
}

fn assemble(cfg: &DriveConfig, with_probe: bool) -> Result<ComplexMatrix5> {
    cfg.validate()?;
    let mut h = ComplexMatrix5::zeros();
    let delta = C64::new(cfg.delta, 0.0);
    h[(Level::Two.index(), Level::Two.index())] = delta;
    h[(Level::Four.index(), Level::Four.index())] = delta;
    set_hermitian(&mut h, Level::Three, Level::One, -HALF * cfg.omega_r);
    set_hermitian(
        &mut h,
        Level::Three,
        Level::OnePrime,
        -HALF * cfg.omega_r_prime,
    );
    set_hermitian(
        &mut h,
        Level::Four,
        Level::Two,
        C64::new(-0.5 * cfg.omega_c, 0.0),
    );
    if with_probe {
        set_hermitian(&mut h, Level::Four, Level::One, -HALF * cfg.omega_p);
        set_hermitian(
            &mut h,
            Level::Four,
            Level::OnePrime,
            -HALF * cfg.omega_p_prime,
        );
    }
    Ok(h)
}

/// Full rotating-frame Hamiltonian including the probe.
pub fn build_hamiltonian(cfg: &DriveConfig) -> Result<ComplexMatrix5> {
    assemble(cfg, true)
}

/// "Atom + coupling field + rf field" Hamiltonian `H₀` (probe terms dropped).
pub fn build_h0(cfg: &DriveConfig) -> Result<ComplexMatrix5> {
    assemble(cfg, false)
}

/// Probe potential `V = −½(Ωp|4⟩⟨1| + Ω′p|4⟩⟨1′| + h.c.)`.
pub fn probe_potential(cfg: &DriveConfig) -> Result<ComplexMatrix5> {
    Ok(build_hamiltonian(cfg)? - build_h0(cfg)?)
}

/// rf-induced light shift `Σ = ½√(|Ωr|² + |Ω′r|²)`.
pub fn light_shift(cfg: &DriveConfig) -> f64 {
    0.5 * (cfg.omega_r.norm_sqr() + cfg.omega_r_prime.norm_sqr()).sqrt()
}

/// Eigenbasis of the rf block together with the dressed probe Rabi frequencies.
///
/// Vectors are expressed over `(|1⟩, |1′⟩, |3⟩)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedBasis {
    pub sigma: f64,
    pub minus: Vector3<C64>,
    pub zero: Vector3<C64>,
    pub plus: Vector3<C64>,
    /// Probe coupling of `|4⟩` to `|0⟩`.
    pub omega0: C64,
    /// Probe coupling of `|4⟩` to `(|+⟩ + |−⟩)/√2`.
    pub omega: C64,
}

impl DressedBasis {
    /// Lift a dressed vector into the five-level space.
    pub fn embed(v: &Vector3<C64>) -> ComplexVector5 {
        let mut out = ComplexVector5::zeros();
        out[Level::One.index()] = v[0];
        out[Level::OnePrime.index()] = v[1];
        out[Level::Three.index()] = v[2];
        out
    }

    /// Columns `|−⟩, |0⟩, |+⟩`.
    pub fn as_matrix(&self) -> nalgebra::Matrix3<C64> {
        nalgebra::Matrix3::from_columns(&[self.minus, self.zero, self.plus])
    }
}

pub fn dressed_basis(cfg: &DriveConfig) -> Result<DressedBasis> {
    cfg.validate()?;
    let sigma = light_shift(cfg);
    if sigma == 0.0 {
        return Err(Error::NoRfField);
    }
    let two_sigma = C64::new(2.0 * sigma, 0.0);
    let r = cfg.omega_r / two_sigma;
    let rp = cfg.omega_r_prime / two_sigma;
    let s = std::f64::consts::FRAC_1_SQRT_2;

    // |b⟩ = (Ω̄r|1⟩ + Ω̄′r|1′⟩)/(2Σ) is the rf-bright ground combination.
    let minus = Vector3::new(r.conj() * s, rp.conj() * s, C64::new(s, 0.0));
    let plus = Vector3::new(r.conj() * s, rp.conj() * s, C64::new(-s, 0.0));
    let zero = Vector3::new(rp, -r, C64::default());

    let omega0 = cfg.omega_p * rp - cfg.omega_p_prime * r;
    let omega = cfg.omega_p * r.conj() + cfg.omega_p_prime * rp.conj();

    Ok(DressedBasis {
        sigma,
        minus,
        zero,
        plus,
        omega0,
        omega,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DarkKind {
    Raman,
    NonRaman,
    Bright,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DarkRecord {
    pub eigenvalue: f64,
    pub eigenvector: ComplexVector5,
    /// `|⟨4|v⟩|`.
    pub excited_overlap: f64,
    pub kind: DarkKind,
}

impl DarkRecord {
    pub fn is_dark(&self) -> bool {
        self.kind != DarkKind::Bright
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DarkStateReport {
    pub delta: f64,
    pub dark_tolerance: f64,
    /// Sorted by eigenvalue, ascending.
    pub records: Vec<DarkRecord>,
    pub warnings: Vec<String>,
}

impl DarkStateReport {
    pub fn dark(&self) -> impl Iterator<Item = &DarkRecord> {
        self.records.iter().filter(|r| r.is_dark())
    }

    pub fn has_kind(&self, kind: DarkKind) -> bool {
        self.records.iter().any(|r| r.kind == kind)
    }

    pub fn min_excited_overlap(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.excited_overlap)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Eigenpairs of a Hermitian matrix sorted by eigenvalue.
///
/// Inside each (numerically) degenerate eigenspace the basis is rotated so that
/// at most one vector has a nonzero `|4⟩` component; a dark direction hidden in
/// a degenerate pair then shows up as its own vector.
pub fn eigen_decompose(h: &ComplexMatrix5) -> Vec<(f64, ComplexVector5)> {
    let eig = SymmetricEigen::new(*h);
    let mut pairs: Vec<(f64, ComplexVector5)> = (0..DIM)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).into_owned()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let scale = max_abs(h).max(1.0);
    let degenerate = 1e-9 * scale;
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0 - pairs[end - 1].0 < degenerate {
            end += 1;
        }
        if end - start > 1 {
            concentrate_excited_component(&mut pairs[start..end]);
        }
        start = end;
    }
    pairs
}

fn concentrate_excited_component(group: &mut [(f64, ComplexVector5)]) {
    let k = group.len();
    let excited = Level::Four.index();
    let w: Vec<C64> = group.iter().map(|(_, v)| v[excited]).collect();
    let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }

    // Orthonormal coefficient basis whose first element is w̄/|w|; every other
    // element is orthogonal to it, so the corresponding combination has no
    // |4⟩ component.
    let mut coeffs: Vec<Vec<C64>> = vec![w.iter().map(|z| z.conj() / norm).collect()];
    for j in 0..k {
        if coeffs.len() == k {
            break;
        }
        let mut e = vec![C64::default(); k];
        e[j] = C64::new(1.0, 0.0);
        for c in &coeffs {
            let proj: C64 = c.iter().zip(&e).map(|(a, b)| a.conj() * b).sum();
            for (ei, ci) in e.iter_mut().zip(c) {
                *ei -= proj * ci;
            }
        }
        let n = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            coeffs.push(e.into_iter().map(|z| z / n).collect());
        }
    }

    let old: Vec<ComplexVector5> = group.iter().map(|(_, v)| *v).collect();
    let mean = group.iter().map(|(e, _)| *e).sum::<f64>() / k as f64;
    for (slot, c) in group.iter_mut().zip(&coeffs) {
        let v = old
            .iter()
            .zip(c)
            .fold(ComplexVector5::zeros(), |acc, (v, ci)| acc + v * *ci);
        *slot = (mean, v.normalize());
    }
}

fn dark_vectors(cfg: &DriveConfig, tol: f64) -> Result<Vec<ComplexVector5>> {
    let h = build_hamiltonian(cfg)?;
    Ok(eigen_decompose(&h)
        .into_iter()
        .filter(|(_, v)| v[Level::Four.index()].norm() < tol)
        .map(|(_, v)| v)
        .collect())
}

/// Squared norm of the projection of `v` onto the span of orthonormal `basis`.
fn captured_weight(v: &ComplexVector5, basis: &[ComplexVector5]) -> f64 {
    basis.iter().map(|b| b.dotc(v).norm_sqr()).sum()
}

/// Diagonalize `H`, flag eigenvectors with `|⟨4|v⟩| < dark_tolerance` as dark,
/// and classify each dark vector.
///
/// A dark vector that is still (to within `1e-8` in squared projection) inside
/// the dark subspace after shifting `Δ` by `±0.1Γ` is non-Raman; otherwise it
/// needs the two-photon condition and is Raman.
pub fn find_dark_states(cfg: &DriveConfig, dark_tolerance: f64) -> Result<DarkStateReport> {
    if !(dark_tolerance > 0.0 && dark_tolerance.is_finite()) {
        return Err(Error::invalid(
            "dark_tolerance",
            format!("must be positive, got {dark_tolerance}"),
        ));
    }
    let h = build_hamiltonian(cfg)?;
    let pairs = eigen_decompose(&h);

    let shifted = [
        dark_vectors(
            &cfg.with_delta(cfg.delta + CLASSIFICATION_STEP),
            dark_tolerance,
        )?,
        dark_vectors(
            &cfg.with_delta(cfg.delta - CLASSIFICATION_STEP),
            dark_tolerance,
        )?,
    ];

    let records = pairs
        .into_iter()
        .map(|(eigenvalue, eigenvector)| {
            let excited_overlap = eigenvector[Level::Four.index()].norm();
            let kind = if excited_overlap >= dark_tolerance {
                DarkKind::Bright
            } else if shifted
                .iter()
                .all(|basis| captured_weight(&eigenvector, basis) > 1.0 - 1e-8)
            {
                DarkKind::NonRaman
            } else {
                DarkKind::Raman
            };
            DarkRecord {
                eigenvalue,
                eigenvector,
                excited_overlap,
                kind,
            }
        })
        .collect();

    let mut warnings = Vec::new();
    if cfg.probe_is_off() {
        warnings.push(
            "probe fields are zero: ground states decoupled from |4> are trivially dark".to_owned(),
        );
    }
    Ok(DarkStateReport {
        delta: cfg.delta,
        dark_tolerance,
        records,
        warnings,
    })
}
