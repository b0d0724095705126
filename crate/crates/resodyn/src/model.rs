//! Model parameter types, validation, and the TOML configuration schema.
//!
//! The physical setup: an N-level system with Hamiltonian
//! `sigma*H_S + lambda*G` coupled to a thermal Bose field through the
//! operator `G = diag(g_1, ..., g_N)`. All matrices live in the eigenbasis
//! of `G`, so `hs` carries the energy-exchange structure and `g_levels` the
//! dephasing structure. The bath is parametrized by its inverse temperature
//! and a rotation-invariant form factor `|k|^p * exp(-a|k|^m)` with the
//! squared angular part integrating to `angular_sq_integral`.

use crate::bath::BathFunctions;
use crate::error::{Error, Result};
use crate::quad::QuadConfig;
use crate::C64;
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use serde::{Deserialize, Serialize};

/// Largest |entry| of a complex matrix (0 for empty).
pub(crate) fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest |m - m†| entry.
pub(crate) fn hermiticity_defect(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// The N-level system: energy-exchange Hamiltonian and dephasing levels.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    dim: usize,
    hs: Array2<C64>,
    g_levels: Array1<f64>,
}

impl SystemSpec {
    /// Validate and build. `hs` must be Hermitian (defect ≤ 1e-12 relative to
    /// its largest entry) and square with side `g_levels.len() >= 2`; all
    /// entries must be finite.
    pub fn new(hs: Array2<C64>, g_levels: Array1<f64>) -> Result<Self> {
        let dim = g_levels.len();
        if dim < 2 {
            return Err(Error::config("system.dim", "need at least two levels"));
        }
        if hs.nrows() != dim || hs.ncols() != dim {
            return Err(Error::config(
                "system.hs",
                format!("expected {dim}x{dim}, got {}x{}", hs.nrows(), hs.ncols()),
            ));
        }
        if hs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::config("system.hs", "non-finite entry"));
        }
        if g_levels.iter().any(|g| !g.is_finite()) {
            return Err(Error::config("system.g_levels", "non-finite entry"));
        }
        let scale = max_abs(&hs);
        if hermiticity_defect(&hs) > 1e-12 * scale.max(1.0) {
            return Err(Error::config("system.hs", "matrix is not Hermitian (defect > 1e-12 relative)"));
        }
        Ok(SystemSpec { dim, hs, g_levels })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hs(&self) -> &Array2<C64> {
        &self.hs
    }

    pub fn g_levels(&self) -> &Array1<f64> {
        &self.g_levels
    }

    /// `min_{a != b} (g_a - g_b)^2` — the slowest dephasing gap, which sets
    /// the decay rate in the decoherence-manifold stability bound.
    pub fn min_level_gap_sq(&self) -> f64 {
        let mut best = f64::INFINITY;
        for a in 0..self.dim {
            for b in 0..self.dim {
                if a != b {
                    let d = self.g_levels[a] - self.g_levels[b];
                    best = best.min(d * d);
                }
            }
        }
        best
    }
}

/// Bath thermal state parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    beta: f64,
}

impl BathParams {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::config("bath.beta", "inverse temperature must be finite and > 0"));
        }
        Ok(BathParams { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Rotation-invariant form factor family `|k|^p * exp(-a |k|^m)` with the
/// squared angular profile integrating to `angular_sq_integral` over the
/// sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormFactor {
    p: f64,
    decay_a: f64,
    decay_m: u32,
    angular_sq_integral: f64,
}

/// Margin in the ultraviolet-decay check `decay_a > (1/2 + margin) * beta`.
const UV_MARGIN: f64 = 0.01;

impl FormFactor {
    /// Validate against the admissibility conditions:
    /// - infrared exponent `p >= -1/2` (the `p = -1/2` boundary is the
    ///   critical case with nonzero zero-frequency spectral density);
    /// - exponential/Gaussian tail `m` in {1, 2} with `a > (1/2 + 0.01)*beta`
    ///   so that thermally weighted integrands decay (checked literally for
    ///   both m; for m = 2 it is conservative);
    /// - nonnegative squared angular integral (zero = decoupled bath).
    pub fn new(p: f64, decay_a: f64, decay_m: u32, angular_sq_integral: f64, bath: &BathParams) -> Result<Self> {
        if !(p.is_finite() && p >= -0.5) {
            return Err(Error::config("bath.form_factor.p", "infrared exponent must be finite and >= -1/2"));
        }
        if decay_m != 1 && decay_m != 2 {
            return Err(Error::config("bath.form_factor.decay_m", "tail exponent must be 1 or 2"));
        }
        if !(decay_a.is_finite() && decay_a > (0.5 + UV_MARGIN) * bath.beta()) {
            return Err(Error::config(
                "bath.form_factor.decay_a",
                format!(
                    "ultraviolet decay requires a > (1/2 + {UV_MARGIN}) * beta = {:.6e}",
                    (0.5 + UV_MARGIN) * bath.beta()
                ),
            ));
        }
        if !(angular_sq_integral.is_finite() && angular_sq_integral >= 0.0) {
            return Err(Error::config("bath.form_factor.angular_sq_integral", "must be finite and >= 0"));
        }
        Ok(FormFactor { p, decay_a, decay_m, angular_sq_integral })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn decay_a(&self) -> f64 {
        self.decay_a
    }

    pub fn decay_m(&self) -> u32 {
        self.decay_m
    }

    pub fn angular_sq_integral(&self) -> f64 {
        self.angular_sq_integral
    }

    /// Whether the infrared exponent sits on the critical boundary
    /// `p = -1/2`, where the zero-frequency spectral density is nonzero and
    /// full decoherence occurs.
    pub fn is_critical_infrared(&self) -> bool {
        (self.p + 0.5).abs() < 1e-12
    }

    /// Squared radial profile `r^{2p} * exp(-2 a r^m)`.
    pub fn radial_sq(&self, r: f64) -> f64 {
        r.powf(2.0 * self.p) * (-2.0 * self.decay_a * r.powf(self.decay_m as f64)).exp()
    }
}

/// Strengths of the two coupling channels: `sigma` (energy exchange through
/// `H_S`) and `lambda` (energy conserving through `G`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    sigma: f64,
    lambda: f64,
}

impl CouplingParams {
    pub fn new(sigma: f64, lambda: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::config("coupling.sigma", "must be finite and >= 0"));
        }
        if !(lambda.is_finite() && lambda != 0.0) {
            return Err(Error::config("coupling.lambda", "must be finite and nonzero"));
        }
        Ok(CouplingParams { sigma, lambda })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The regime ratio `gamma = sigma / lambda^2`.
    pub fn gamma(&self) -> f64 {
        self.sigma / (self.lambda * self.lambda)
    }
}

/// Validated system state: Hermitian (1e-12 relative), unit trace (1e-12),
/// positive semidefinite (eigenvalues >= -1e-10).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: Array2<C64>,
}

impl DensityMatrix {
    pub fn new(matrix: Array2<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::config("rho", "density matrix must be square and nonempty"));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::config("rho", "non-finite entry"));
        }
        let scale = max_abs(&matrix).max(1.0);
        if hermiticity_defect(&matrix) > 1e-12 * scale {
            return Err(Error::config("rho", "not Hermitian to 1e-12"));
        }
        let trace: C64 = (0..matrix.nrows()).map(|i| matrix[(i, i)]).sum();
        if (trace - C64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::config("rho", format!("trace = {trace} differs from 1 by more than 1e-12")));
        }
        // Positivity on the Hermitian part (the defect is already bounded).
        let herm = (&matrix + &matrix.t().mapv(|z| z.conj())).mapv(|z| 0.5 * z);
        let (eigs, _) = herm
            .eigh(UPLO::Lower)
            .map_err(|e| Error::compute("density matrix positivity check", e.to_string()))?;
        if let Some(min) = eigs.iter().cloned().reduce(f64::min) {
            if min < -1e-10 {
                return Err(Error::config("rho", format!("smallest eigenvalue {min:.3e} < -1e-10")));
            }
        }
        Ok(DensityMatrix { matrix })
    }

    /// Build a pure state |v><v| / <v|v>.
    pub fn pure(v: &Array1<C64>) -> Result<Self> {
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(Error::config("rho", "cannot normalize zero or non-finite vector"));
        }
        let n = v.len();
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj() / norm_sq;
            }
        }
        DensityMatrix::new(m)
    }

    /// Maximally mixed state on `dim` levels.
    pub fn maximally_mixed(dim: usize) -> Self {
        let mut m = Array2::zeros((dim, dim));
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0 / dim as f64, 0.0);
        }
        DensityMatrix { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    /// Diagonal (populations) as a real vector.
    pub fn populations(&self) -> Array1<f64> {
        Array1::from_iter((0..self.dim()).map(|i| self.matrix[(i, i)].re))
    }
}

/// Report of the resonance non-degeneracy check: all nonzero `delta_{a,b}`
/// pairwise distinct within `1e-10 * max|delta|`.
#[derive(Debug, Clone)]
pub struct A3Report {
    pub holds: bool,
    /// Pairs of 0-based labels whose delta values collide.
    pub collisions: Vec<((usize, usize), (usize, usize))>,
}

/// Check that all nonzero resonance energies `delta_{a,b}` are pairwise
/// distinct (the non-degeneracy assumption behind simple-eigenvalue
/// perturbation formulas).
pub fn check_a3(spec: &SystemSpec, bf: &BathFunctions) -> A3Report {
    let delta = bf.delta_table(spec);
    let scale = max_abs(&delta);
    let tol = 1e-10 * scale;
    let n = spec.dim();
    let mut nonzero: Vec<((usize, usize), C64)> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && delta[(a, b)].norm() > tol {
                nonzero.push(((a, b), delta[(a, b)]));
            }
        }
    }
    let mut collisions = Vec::new();
    for i in 0..nonzero.len() {
        for j in (i + 1)..nonzero.len() {
            if (nonzero[i].1 - nonzero[j].1).norm() <= tol {
                collisions.push((nonzero[i].0, nonzero[j].0));
            }
        }
    }
    A3Report { holds: collisions.is_empty(), collisions }
}

/// Report of the well-coupledness check: `Im delta_{a,b} > 0` and
/// `[H_S]_{a,b} != 0` for every off-diagonal pair.
#[derive(Debug, Clone)]
pub struct A4Report {
    pub holds: bool,
    /// Pairs failing `Im delta_{a,b} > 0`.
    pub nonpositive_im: Vec<(usize, usize)>,
    /// Pairs failing `|[H_S]_{a,b}| > 1e-12`.
    pub zero_coupling: Vec<(usize, usize)>,
}

/// Check the Fermi-Golden-Rule condition that guarantees a unique stationary
/// state: every off-diagonal resonance has a strictly positive width and the
/// exchange Hamiltonian couples every pair of levels.
pub fn check_a4(spec: &SystemSpec, bf: &BathFunctions) -> A4Report {
    let delta = bf.delta_table(spec);
    let n = spec.dim();
    let mut nonpositive_im = Vec::new();
    let mut zero_coupling = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            if delta[(a, b)].im <= 0.0 {
                nonpositive_im.push((a, b));
            }
            if spec.hs()[(a, b)].norm() <= 1e-12 {
                zero_coupling.push((a, b));
            }
        }
    }
    A4Report {
        holds: nonpositive_im.is_empty() && zero_coupling.is_empty(),
        nonpositive_im,
        zero_coupling,
    }
}

// ---------------------------------------------------------------------------
// TOML configuration schema
// ---------------------------------------------------------------------------

/// Top-level run configuration (TOML).
///
/// ```toml
/// [system]
/// dim = 2
/// hs = [[0.0, 0.0], [0.5, 0.0], [0.5, 0.0], [0.0, 0.0]]  # row-major [re, im]
/// g_levels = [0.5, -0.5]
///
/// [bath]
/// beta = 1.0
///
/// [bath.form_factor]
/// p = -0.5
/// decay_a = 1.0
/// decay_m = 1
/// angular_sq_integral = 12.566370614359172
///
/// [coupling]
/// sigma = 0.01
/// lambda = 0.1
///
/// [quadrature]
/// rel_tol = 1e-10
/// abs_tol = 1e-12
/// r_max_factor = 1.0
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Config {
    pub system: SystemSection,
    pub bath: BathSection,
    pub coupling: CouplingSection,
    #[serde(default)]
    pub quadrature: QuadConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemSection {
    /// Number of levels N.
    pub dim: usize,
    /// H_S as row-major `[re, im]` pairs, length N*N.
    pub hs: Vec<[f64; 2]>,
    /// Eigenvalues of G, length N.
    pub g_levels: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BathSection {
    pub beta: f64,
    pub form_factor: FormFactorSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormFactorSection {
    pub p: f64,
    pub decay_a: f64,
    pub decay_m: u32,
    pub angular_sq_integral: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CouplingSection {
    pub sigma: f64,
    pub lambda: f64,
}

impl Config {
    /// Parse from a TOML string with key-level diagnostics.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("<toml>", e.to_string()))
    }

    /// Load from a file path.
    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config("<config path>", format!("{}: {e}", path.display()))
        })?;
        Self::from_toml_str(&text)
    }

    /// Serialize back to TOML.
    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::compute("config serialization", e.to_string()))
    }

    /// Validate every section and produce the typed parameter structs.
    pub fn build(&self) -> Result<(SystemSpec, BathParams, FormFactor, CouplingParams, QuadConfig)> {
        let n = self.system.dim;
        if n < 2 {
            return Err(Error::config("system.dim", "need at least two levels"));
        }
        if self.system.g_levels.len() != n {
            return Err(Error::config(
                "system.g_levels",
                format!("expected {n} entries, got {}", self.system.g_levels.len()),
            ));
        }
        if self.system.hs.len() != n * n {
            return Err(Error::config(
                "system.hs",
                format!("expected {} row-major [re, im] pairs, got {}", n * n, self.system.hs.len()),
            ));
        }
        let mut hs = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let pair = self.system.hs[i * n + j];
                hs[(i, j)] = C64::new(pair[0], pair[1]);
            }
        }
        let spec = SystemSpec::new(hs, Array1::from_vec(self.system.g_levels.clone()))?;
        let bath = BathParams::new(self.bath.beta)?;
        let ff = FormFactor::new(
            self.bath.form_factor.p,
            self.bath.form_factor.decay_a,
            self.bath.form_factor.decay_m,
            self.bath.form_factor.angular_sq_integral,
            &bath,
        )?;
        let cp = CouplingParams::new(self.coupling.sigma, self.coupling.lambda)?;
        self.quadrature.validate()?;
        Ok((spec, bath, ff, cp, self.quadrature))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn pauli_x_half() -> Array2<C64> {
        array![
            [C64::new(0.0, 0.0), C64::new(0.5, 0.0)],
            [C64::new(0.5, 0.0), C64::new(0.0, 0.0)]
        ]
    }

    #[test]
    fn system_spec_accepts_hermitian() {
        let spec = SystemSpec::new(pauli_x_half(), array![0.5, -0.5]).unwrap();
        assert_eq!(spec.dim(), 2);
        assert!((spec.min_level_gap_sq() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn system_spec_rejects_non_hermitian() {
        let hs = array![
            [C64::new(0.0, 0.0), C64::new(0.5, 0.1)],
            [C64::new(0.5, 0.1), C64::new(0.0, 0.0)]
        ];
        assert!(matches!(
            SystemSpec::new(hs, array![0.5, -0.5]),
            Err(Error::ConfigError { .. })
        ));
    }

    #[test]
    fn system_spec_rejects_single_level() {
        let hs = Array2::zeros((1, 1));
        assert!(SystemSpec::new(hs, array![1.0]).is_err());
    }

    #[test]
    fn form_factor_uv_decay_enforced() {
        let bath = BathParams::new(2.0).unwrap();
        // a must exceed (0.51) * beta = 1.02.
        assert!(FormFactor::new(-0.5, 1.0, 1, 1.0, &bath).is_err());
        assert!(FormFactor::new(-0.5, 1.03, 1, 1.0, &bath).is_ok());
        // m restricted to {1, 2}.
        assert!(FormFactor::new(-0.5, 3.0, 3, 1.0, &bath).is_err());
        // p below the critical boundary is inadmissible.
        assert!(FormFactor::new(-0.6, 3.0, 1, 1.0, &bath).is_err());
    }

    #[test]
    fn critical_infrared_flag() {
        let bath = BathParams::new(1.0).unwrap();
        assert!(FormFactor::new(-0.5, 1.0, 1, 1.0, &bath).unwrap().is_critical_infrared());
        assert!(!FormFactor::new(0.5, 1.0, 1, 1.0, &bath).unwrap().is_critical_infrared());
    }

    #[test]
    fn coupling_params_reject_zero_lambda() {
        assert!(CouplingParams::new(0.1, 0.0).is_err());
        assert!(CouplingParams::new(-0.1, 0.5).is_err());
        let cp = CouplingParams::new(0.02, 0.1).unwrap();
        assert!((cp.gamma() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn density_matrix_validation() {
        // Valid thermal-ish state.
        let m = array![
            [C64::new(0.7, 0.0), C64::new(0.1, 0.2)],
            [C64::new(0.1, -0.2), C64::new(0.3, 0.0)]
        ];
        assert!(DensityMatrix::new(m).is_ok());

        // Trace off.
        let m = array![
            [C64::new(0.8, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(0.3, 0.0)]
        ];
        assert!(DensityMatrix::new(m).is_err());

        // Negative eigenvalue: trace 1 but indefinite.
        let m = array![
            [C64::new(1.2, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(-0.2, 0.0)]
        ];
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn pure_state_is_projection() {
        let v = array![C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
        let rho = DensityMatrix::pure(&v).unwrap();
        let m = rho.matrix();
        // Idempotent: rho^2 = rho.
        let sq = m.dot(m);
        for (x, y) in sq.iter().zip(m.iter()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn config_round_trip_and_build() {
        let text = r#"
            [system]
            dim = 2
            hs = [[0.0, 0.0], [0.5, 0.0], [0.5, 0.0], [0.0, 0.0]]
            g_levels = [0.5, -0.5]

            [bath]
            beta = 1.0

            [bath.form_factor]
            p = -0.5
            decay_a = 1.0
            decay_m = 1
            angular_sq_integral = 12.566370614359172

            [coupling]
            sigma = 0.01
            lambda = 0.1

            [quadrature]
            rel_tol = 1e-10
            abs_tol = 1e-12
            r_max_factor = 1.0
        "#;
        let cfg = Config::from_toml_str(text).unwrap();
        let (spec, bath, ff, cp, quad) = cfg.build().unwrap();
        assert_eq!(spec.dim(), 2);
        assert_eq!(bath.beta(), 1.0);
        assert!(ff.is_critical_infrared());
        assert_eq!(cp.sigma(), 0.01);
        assert_eq!(quad.rel_tol, 1e-10);

        // Round trip through TOML preserves the parsed content.
        let re = Config::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(re.system.hs, cfg.system.hs);
        assert_eq!(re.bath.beta, cfg.bath.beta);
    }

    #[test]
    fn config_reports_offending_key() {
        let text = r#"
            [system]
            dim = 2
            hs = [[0.0, 0.0], [0.5, 0.0], [0.5, 0.0], [0.0, 0.0]]
            g_levels = [0.5, -0.5]

            [bath]
            beta = -1.0

            [bath.form_factor]
            p = -0.5
            decay_a = 1.0
            decay_m = 1
            angular_sq_integral = 1.0

            [coupling]
            sigma = 0.0
            lambda = 0.1
        "#;
        let err = Config::from_toml_str(text).unwrap().build().unwrap_err();
        match err {
            Error::ConfigError { key, .. } => assert_eq!(key, "bath.beta"),
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn quadrature_defaults_apply_when_section_missing() {
        let text = r#"
            [system]
            dim = 2
            hs = [[0.0, 0.0], [0.5, 0.0], [0.5, 0.0], [0.0, 0.0]]
            g_levels = [0.5, -0.5]

            [bath]
            beta = 1.0

            [bath.form_factor]
            p = -0.5
            decay_a = 1.0
            decay_m = 1
            angular_sq_integral = 1.0

            [coupling]
            sigma = 0.0
            lambda = 0.1
        "#;
        let cfg = Config::from_toml_str(text).unwrap();
        let (.., quad) = cfg.build().unwrap();
        assert_eq!(quad.rel_tol, 1e-10);
        assert_eq!(quad.abs_tol, 1e-12);
    }
}
