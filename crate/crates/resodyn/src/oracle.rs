//! Independent validation routes for every derived quantity in the crate.
//!
//! Nothing here shares code with the primary implementations: the dephasing
//! integrals are re-derived from an explicit finite mode decomposition
//! ([`DiscreteBath`]), reduced dynamics from exact unitary evolution in a
//! truncated Fock space ([`TruncatedSystem`]), eigenvalues from a
//! characteristic-polynomial root solver ([`char_poly_eigenvalues`],
//! [`eigen_crosscheck`]), and semigroup propagation from a scaling-squaring
//! matrix exponential ([`expm_real`]). Tests pit these against the
//! quadrature/LAPACK routes; agreement within stated tolerances is the
//! correctness argument for both sides.

use crate::error::{Error, Result};
use crate::model::{DensityMatrix, FormFactor, SystemSpec};
use crate::C64;
use ndarray::linalg::kron;
use ndarray::{Array1, Array2};
use ndarray_linalg::{EigVals, Eigh, UPLO};
use std::f64::consts::PI;

/// One bath oscillator: frequency and coupling weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub omega: f64,
    pub coupling: f64,
}

/// A finite collection of thermal oscillators standing in for the continuum.
///
/// With squared couplings `c_j^2` assembled from the form factor on a log
/// grid, the mode sums converge to the continuum dephasing integrals as the
/// grid refines (relative error ~1/n_modes on fixed time windows).
#[derive(Debug, Clone)]
pub struct DiscreteBath {
    modes: Vec<Mode>,
    beta: f64,
}

impl DiscreteBath {
    pub fn new(modes: Vec<Mode>, beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::config("beta", "must be finite and > 0"));
        }
        if modes.is_empty() {
            return Err(Error::config("modes", "need at least one mode"));
        }
        for (j, m) in modes.iter().enumerate() {
            if !(m.omega.is_finite() && m.omega > 0.0) {
                return Err(Error::config("modes", format!("mode {j}: omega must be > 0")));
            }
            if !m.coupling.is_finite() {
                return Err(Error::config("modes", format!("mode {j}: non-finite coupling")));
            }
        }
        let mut sorted: Vec<f64> = modes.iter().map(|m| m.omega).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("modes", "mode frequencies must be distinct"));
        }
        Ok(DiscreteBath { modes, beta })
    }

    /// Midpoint-in-log discretization of the form-factor continuum on
    /// `[r_min, r_max]`: `omega_j = r_min * q^(j + 1/2)` with
    /// `c_j^2 = angular * omega^{2p} e^{-2 a omega^m} * omega^2 * width_j`.
    pub fn log_discretization(
        ff: &FormFactor,
        beta: f64,
        n_modes: usize,
        r_min: f64,
        r_max: f64,
    ) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min) {
            return Err(Error::config("modes", "need 0 < r_min < r_max"));
        }
        if n_modes == 0 {
            return Err(Error::config("modes", "need at least one mode"));
        }
        let q = (r_max / r_min).powf(1.0 / n_modes as f64);
        let mut modes = Vec::with_capacity(n_modes);
        for j in 0..n_modes {
            let omega = r_min * q.powf(j as f64 + 0.5);
            let width = r_min * (q.powi(j as i32 + 1) - q.powi(j as i32));
            let c_sq = ff.angular_sq_integral() * ff.radial_sq(omega) * omega * omega * width;
            modes.push(Mode { omega, coupling: c_sq.sqrt() });
        }
        DiscreteBath::new(modes, beta)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Mode-sum decoherence function
    /// `sum_j c_j^2 coth(beta omega_j / 2) sin^2(omega_j t / 2) / omega_j^2`.
    pub fn gamma_discrete(&self, t: f64) -> f64 {
        self.modes
            .iter()
            .map(|m| {
                let c2 = m.coupling * m.coupling;
                let s = (0.5 * m.omega * t).sin();
                c2 * crate::quad::r_coth_half_beta(m.omega, self.beta) / m.omega.powi(3) * s * s
            })
            .sum()
    }

    /// Mode-sum Lamb-shift function
    /// `(1/2) sum_j c_j^2 (omega_j t - sin(omega_j t)) / omega_j^2`.
    pub fn s_discrete(&self, t: f64) -> f64 {
        self.modes
            .iter()
            .map(|m| {
                let c2 = m.coupling * m.coupling;
                let x = m.omega * t;
                0.5 * c2 / (m.omega * m.omega) * x * x * x * crate::quad::x_minus_sin_over_x3(x)
            })
            .sum()
    }

    /// Pure-dephasing evolution with the mode-sum phase functions:
    /// `rho_t[a,b] = rho_0[a,b] * exp(i lambda^2 [(g_a^2-g_b^2) S + i (g_a-g_b)^2 Gamma])`.
    pub fn dephasing(
        &self,
        spec: &SystemSpec,
        lambda: f64,
        rho0: &DensityMatrix,
        t: f64,
    ) -> Result<DensityMatrix> {
        let n = spec.dim();
        if rho0.dim() != n {
            return Err(Error::config("rho", "dimension mismatch with system spec"));
        }
        let gamma = self.gamma_discrete(t);
        let s = self.s_discrete(t);
        let g = spec.g_levels();
        let l2 = lambda * lambda;
        let mut out = rho0.matrix().clone();
        for a in 0..n {
            for b in 0..n {
                let alpha = C64::new(
                    (g[a] * g[a] - g[b] * g[b]) * s,
                    (g[a] - g[b]) * (g[a] - g[b]) * gamma,
                );
                out[(a, b)] *= (C64::i() * l2 * alpha).exp();
            }
        }
        DensityMatrix::new(out)
    }
}

/// Dense-eigensolver cap for the truncated Fock space.
pub const TRUNCATED_DIM_CAP: usize = 4096;

/// System plus up to three explicitly truncated oscillator modes, evolved
/// exactly (dense eigendecomposition of the full Hamiltonian).
///
/// `H = sigma * H_S (x) 1 + sum_j omega_j n_j + lambda * G (x) sum_j c_j (a_j + a_j^+)/sqrt(2)`.
#[derive(Debug, Clone)]
pub struct TruncatedSystem {
    n_levels: usize,
    modes: Vec<Mode>,
    fock_cutoff: usize,
    dim: usize,
    hamiltonian: Array2<C64>,
    evals: Array1<f64>,
    evecs: Array2<C64>,
}

impl TruncatedSystem {
    pub fn new(
        spec: &SystemSpec,
        sigma: f64,
        lambda: f64,
        modes: &[Mode],
        fock_cutoff: usize,
    ) -> Result<Self> {
        if modes.is_empty() || modes.len() > 3 {
            return Err(Error::config("modes", "truncated evolution supports 1 to 3 modes"));
        }
        let n = spec.dim();
        let per_mode = fock_cutoff + 1;
        let fock_dim = per_mode.checked_pow(modes.len() as u32).unwrap_or(usize::MAX);
        let dim = n.checked_mul(fock_dim).unwrap_or(usize::MAX);
        if dim > TRUNCATED_DIM_CAP {
            return Err(Error::DimensionCapExceeded { dim, cap: TRUNCATED_DIM_CAP });
        }

        let eye = |k: usize| Array2::<C64>::eye(k);
        let number_op = |k: usize| {
            let mut m = Array2::<C64>::zeros((k, k));
            for i in 0..k {
                m[(i, i)] = C64::new(i as f64, 0.0);
            }
            m
        };
        let position_op = |k: usize| {
            // a + a^+ in the number basis.
            let mut m = Array2::<C64>::zeros((k, k));
            for i in 0..k.saturating_sub(1) {
                let v = ((i + 1) as f64).sqrt();
                m[(i, i + 1)] = C64::new(v, 0.0);
                m[(i + 1, i)] = C64::new(v, 0.0);
            }
            m
        };

        // Mode-space operators embedded into the full Fock product.
        let embed = |op: Array2<C64>, j: usize| -> Array2<C64> {
            let mut acc = if j == 0 { op.clone() } else { eye(per_mode) };
            for k in 1..modes.len() {
                let factor = if k == j { op.clone() } else { eye(per_mode) };
                acc = kron(&acc, &factor);
            }
            acc
        };

        let mut h_bath = Array2::<C64>::zeros((fock_dim, fock_dim));
        let mut coupling_field = Array2::<C64>::zeros((fock_dim, fock_dim));
        for (j, m) in modes.iter().enumerate() {
            let njop = embed(number_op(per_mode), j);
            h_bath = &h_bath + &njop.mapv(|z| z * m.omega);
            let x = embed(position_op(per_mode), j);
            coupling_field = &coupling_field + &x.mapv(|z| z * (m.coupling / 2.0_f64.sqrt()));
        }

        let g_op = {
            let mut m = Array2::<C64>::zeros((n, n));
            for a in 0..n {
                m[(a, a)] = C64::new(spec.g_levels()[a], 0.0);
            }
            m
        };
        let mut h = kron(&spec.hs().mapv(|z| z * sigma), &eye(fock_dim));
        h = &h + &kron(&eye(n), &h_bath);
        h = &h + &kron(&g_op, &coupling_field).mapv(|z| z * lambda);

        let defect = crate::model::hermiticity_defect(&h);
        let scale = crate::model::max_abs(&h).max(1.0);
        if defect > 1e-12 * scale {
            return Err(Error::compute(
                "truncated Hamiltonian",
                format!("hermiticity defect {defect:.3e} exceeds 1e-12 relative"),
            ));
        }

        let (evals, evecs) = h
            .eigh(UPLO::Lower)
            .map_err(|e| Error::compute("truncated Hamiltonian eigendecomposition", e.to_string()))?;

        Ok(TruncatedSystem {
            n_levels: n,
            modes: modes.to_vec(),
            fock_cutoff,
            dim,
            hamiltonian: h,
            evals,
            evecs,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn hamiltonian(&self) -> &Array2<C64> {
        &self.hamiltonian
    }

    /// Product state `rho_sys (x) gibbs(mode_1) (x) ... (x) gibbs(mode_M)`
    /// with each mode in its exactly normalized truncated Gibbs state.
    pub fn initial_state(&self, rho_sys: &DensityMatrix, beta: f64) -> Result<Array2<C64>> {
        if rho_sys.dim() != self.n_levels {
            return Err(Error::config("rho", "dimension mismatch with system spec"));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::config("beta", "must be finite and > 0"));
        }
        let per_mode = self.fock_cutoff + 1;
        let mut bath = Array2::<C64>::eye(1);
        for m in &self.modes {
            let mut gibbs = Array2::<C64>::zeros((per_mode, per_mode));
            let mut z = 0.0;
            for n in 0..per_mode {
                z += (-beta * m.omega * n as f64).exp();
            }
            for n in 0..per_mode {
                gibbs[(n, n)] = C64::new((-beta * m.omega * n as f64).exp() / z, 0.0);
            }
            bath = kron(&bath, &gibbs);
        }
        Ok(kron(rho_sys.matrix(), &bath))
    }

    /// Exact unitary evolution `e^{-iHt} rho e^{iHt}` through the cached
    /// eigendecomposition.
    pub fn evolve_full(&self, rho_full: &Array2<C64>, t: f64) -> Array2<C64> {
        // Work in the eigenbasis: rho~ -> e^{-i(E_i - E_j)t} rho~.
        let v = &self.evecs;
        let vh = v.t().mapv(|z| z.conj());
        let mut rho_e = vh.dot(rho_full).dot(v);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let phase = C64::new(0.0, -(self.evals[i] - self.evals[j]) * t).exp();
                rho_e[(i, j)] *= phase;
            }
        }
        v.dot(&rho_e).dot(&vh)
    }

    /// Partial trace over the mode factor.
    pub fn reduce(&self, rho_full: &Array2<C64>) -> Array2<C64> {
        let n = self.n_levels;
        let fock_dim = self.dim / n;
        let mut out = Array2::<C64>::zeros((n, n));
        for a in 0..n {
            for b in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for f in 0..fock_dim {
                    acc += rho_full[(a * fock_dim + f, b * fock_dim + f)];
                }
                out[(a, b)] = acc;
            }
        }
        out
    }

    /// Full pipeline: build the product initial state, evolve, trace out the
    /// modes, validate the result as a density matrix (trace is preserved to
    /// 1e-10 by exact unitarity).
    pub fn evolve_reduced(&self, rho_sys: &DensityMatrix, beta: f64, t: f64) -> Result<DensityMatrix> {
        let full0 = self.initial_state(rho_sys, beta)?;
        let full_t = self.evolve_full(&full0, t);
        let reduced = self.reduce(&full_t);
        // Scrub roundoff-level hermiticity defects before validation.
        let herm = (&reduced + &reduced.t().mapv(|z| z.conj())).mapv(|z| 0.5 * z);
        DensityMatrix::new(herm)
    }

    /// `Re tr(H rho)` for conservation checks.
    pub fn energy_expectation(&self, rho_full: &Array2<C64>) -> f64 {
        let prod = self.hamiltonian.dot(rho_full);
        (0..self.dim).map(|i| prod[(i, i)].re).sum()
    }
}

/// Characteristic polynomial coefficients by the Faddeev–LeVerrier
/// recurrence: `p(z) = z^n + c_1 z^{n-1} + ... + c_n`.
fn char_poly_coeffs(m: &Array2<C64>) -> Vec<C64> {
    let n = m.nrows();
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(C64::new(1.0, 0.0));
    let mut mk = m.clone();
    for k in 1..=n {
        let trace: C64 = (0..n).map(|i| mk[(i, i)]).sum();
        let ck = -trace / k as f64;
        coeffs.push(ck);
        if k < n {
            let mut shifted = mk;
            for i in 0..n {
                shifted[(i, i)] += ck;
            }
            mk = m.dot(&shifted);
        }
    }
    coeffs
}

/// Aberth–Ehrlich simultaneous root iteration for a monic polynomial, with a
/// backward-error stopping rule so clustered roots terminate at the accuracy
/// the coefficients support.
fn aberth_ehrlich(coeffs: &[C64]) -> Result<Vec<C64>> {
    let n = coeffs.len() - 1;
    let dcoeffs: Vec<C64> = (0..n).map(|j| coeffs[j] * (n - j) as f64).collect();
    let horner = |c: &[C64], z: C64| -> C64 {
        c.iter().fold(C64::new(0.0, 0.0), |acc, &ck| acc * z + ck)
    };
    // Roundoff floor of evaluating p at z: once |p(z)| sits below this, the
    // iterate is a root to working precision.
    let eval_floor = |z: C64| -> f64 {
        let az = z.norm();
        let s = coeffs.iter().fold(0.0_f64, |acc, c| acc * az + c.norm());
        (2 * n + 1) as f64 * f64::EPSILON * s
    };
    // Cauchy bound on root moduli for the starting circle.
    let radius = 1.0 + coeffs[1..].iter().fold(0.0_f64, |m, c| m.max(c.norm()));
    let mut roots: Vec<C64> = (0..n)
        .map(|k| {
            let angle = 2.0 * PI * k as f64 / n as f64 + 0.4;
            0.7 * radius * C64::new(0.0, angle).exp()
        })
        .collect();

    let mut worst = f64::INFINITY;
    for _ in 0..3000 {
        let mut max_step = 0.0_f64;
        worst = 0.0;
        for i in 0..n {
            let p = horner(coeffs, roots[i]);
            let floor = eval_floor(roots[i]);
            if p.norm() <= floor {
                continue;
            }
            worst = worst.max(p.norm() / floor.max(f64::MIN_POSITIVE));
            let pd = horner(&dcoeffs, roots[i]);
            if pd.norm() == 0.0 {
                roots[i] += C64::new(1e-6 * radius, 1e-6 * radius);
                max_step = f64::INFINITY;
                continue;
            }
            let w = p / pd;
            let mut repulsion = C64::new(0.0, 0.0);
            let mut collided = false;
            for j in 0..n {
                if j != i {
                    let diff = roots[i] - roots[j];
                    if diff.norm() == 0.0 {
                        collided = true;
                        break;
                    }
                    repulsion += 1.0 / diff;
                }
            }
            if collided {
                roots[i] += C64::new(1e-6 * radius * (i + 1) as f64 / n as f64, 1e-6 * radius);
                max_step = f64::INFINITY;
                continue;
            }
            let denom = C64::new(1.0, 0.0) - w * repulsion;
            let step = if denom.norm() == 0.0 { w } else { w / denom };
            roots[i] -= step;
            max_step = max_step.max(step.norm() / roots[i].norm().max(1.0));
        }
        if max_step == 0.0 || (max_step.is_finite() && max_step < 1e-16) {
            return Ok(roots);
        }
    }
    Err(Error::NoConvergence {
        what: "Aberth-Ehrlich root iteration".into(),
        residual: worst,
        tolerance: 1.0,
    })
}

/// Eigenvalues from the characteristic polynomial (Faddeev–LeVerrier
/// coefficients, Durand–Kerner roots). Entry-scale normalized; intended for
/// well-separated spectra of dimension <= 12, where coefficient-space root
/// recovery keeps ~1e-12 accuracy.
pub fn char_poly_eigenvalues(m: &Array2<C64>) -> Result<Vec<C64>> {
    let n = m.nrows();
    if n == 0 || n != m.ncols() {
        return Err(Error::config("matrix", "must be square and nonempty"));
    }
    if n > 12 {
        return Err(Error::config("matrix", "characteristic-polynomial route supports n <= 12"));
    }
    let scale = crate::model::max_abs(m).max(1e-300);
    let scaled = m.mapv(|z| z / scale);
    let coeffs = char_poly_coeffs(&scaled);
    let roots = aberth_ehrlich(&coeffs)?;
    Ok(roots.into_iter().map(|z| z * scale).collect())
}

/// Greedy nearest-neighbor matching of two equal-length spectra; returns the
/// maximum matched distance.
pub fn spectrum_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            pairs.push(((a[i] - b[j]).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut used_a = vec![false; n];
    let mut used_b = vec![false; n];
    let mut worst = 0.0_f64;
    let mut matched = 0;
    for (d, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            worst = worst.max(d);
            matched += 1;
            if matched == n {
                break;
            }
        }
    }
    worst
}

/// Compute the spectrum by the primary dense solver and confirm it against an
/// independent route: the characteristic-polynomial solver for `n <= 12`, a
/// unitary-similarity-scrambled rerun of the dense solver above that. Returns
/// the primary spectrum (sorted by real part, then imaginary) or a
/// no-convergence error carrying the observed cross-route deviation.
pub fn eigen_crosscheck(m: &Array2<C64>) -> Result<Vec<C64>> {
    let n = m.nrows();
    if n == 0 || n != m.ncols() || n > 256 {
        return Err(Error::config("matrix", "must be square, nonempty, and of dimension <= 256"));
    }
    let primary = m
        .eigvals()
        .map_err(|e| Error::compute("dense eigensolver", e.to_string()))?;
    let mut primary: Vec<C64> = primary.to_vec();

    let secondary: Vec<C64> = if n <= 12 {
        char_poly_eigenvalues(m)?
    } else {
        // Conjugate by a fixed dense unitary (a discrete-Fourier frame) so the
        // solver sees a different matrix with the same spectrum.
        let mut q = Array2::<C64>::zeros((n, n));
        let w = 2.0 * PI / n as f64;
        let norm = 1.0 / (n as f64).sqrt();
        for r in 0..n {
            for c in 0..n {
                q[(r, c)] = C64::new(0.0, w * r as f64 * c as f64).exp() * norm;
            }
        }
        let qh = q.t().mapv(|z| z.conj());
        let scrambled = qh.dot(m).dot(&q);
        scrambled
            .eigvals()
            .map_err(|e| Error::compute("dense eigensolver (scrambled)", e.to_string()))?
            .to_vec()
    };

    let scale = primary.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
    let dev = spectrum_distance(&primary, &secondary);
    if dev > 1e-10 * scale {
        return Err(Error::NoConvergence {
            what: "eigenvalue cross-check".into(),
            residual: dev,
            tolerance: 1e-10 * scale,
        });
    }
    primary.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(primary)
}

/// Matrix exponential of a real matrix by scaling and squaring with a Taylor
/// core. Accuracy ~1e-13 relative for the modest norms used here; serves as
/// the independent route for semigroup propagators.
pub fn expm_real(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    // 1-norm (max column sum).
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let k = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as i32 } else { 0 };
    let b = a.mapv(|x| x / 2.0_f64.powi(k));

    let mut result = Array2::<f64>::eye(n);
    let mut term = Array2::<f64>::eye(n);
    for j in 1..=40 {
        term = term.dot(&b).mapv(|x| x / j as f64);
        result = &result + &term;
        let tn = term.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        if tn < 1e-18 {
            break;
        }
    }
    for _ in 0..k {
        result = result.dot(&result);
    }
    result
}

/// Propagator `e^{-iHt}` column action for a Hermitian matrix via
/// eigendecomposition; the conjugation `U e^{-iEt} U^+ rho U e^{iEt} U^+`
/// route used by tests that cannot afford a cached [`TruncatedSystem`].
pub fn herm_conjugated_evolution(h: &Array2<C64>, rho: &Array2<C64>, t: f64) -> Result<Array2<C64>> {
    let (evals, v) = h
        .eigh(UPLO::Lower)
        .map_err(|e| Error::compute("hermitian eigendecomposition", e.to_string()))?;
    let vh = v.t().mapv(|z| z.conj());
    let mut rho_e = vh.dot(rho).dot(&v);
    let n = h.nrows();
    for i in 0..n {
        for j in 0..n {
            rho_e[(i, j)] *= C64::new(0.0, -(evals[i] - evals[j]) * t).exp();
        }
    }
    Ok(v.dot(&rho_e).dot(&vh))
}

/// One entry of the cross-validation suite.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ValidationCheck {
    pub name: String,
    /// Worst normalized error observed (relative where the tolerance is
    /// relative, absolute otherwise — the name says which).
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ValidationCheck {
    fn new(name: &str, max_error: f64, tolerance: f64) -> Self {
        ValidationCheck {
            name: name.to_string(),
            max_error,
            tolerance,
            pass: max_error.is_finite() && max_error <= tolerance,
        }
    }
}

/// Result of running the full cross-check suite.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
    pub all_pass: bool,
}

/// Run every independent cross-check in one deterministic batch.
///
/// The first two checks exercise the *configured* bath (quadrature vs a
/// 2000-mode discrete sum); the rest run on fixed canonical instances with
/// seeded randomness so that the report is reproducible bit-for-bit:
///
/// - truncated Fock-space evolution vs the discrete dephasing formula,
/// - characteristic-polynomial roots vs the dense eigensolver,
/// - two-level closed-form resonances vs the dense spectrum of `W`,
/// - the diagonal of the effective operator vs the `delta` table,
/// - population relaxation channels vs a scaling-squaring matrix exponential,
/// - the effective-operator spectrum vs `W` across the two bases.
pub fn validation_suite(
    bf: &crate::bath::BathFunctions,
    ff: &FormFactor,
    beta: f64,
) -> Result<ValidationReport> {
    let mut checks = Vec::new();

    // 1-2. Continuum quadrature vs discrete mode sums on the configured bath.
    let db = DiscreteBath::log_discretization(ff, beta, 2000, 1e-4 / beta, bf.r_max())?;
    let mut gamma_err = 0.0_f64;
    let mut s_err = 0.0_f64;
    for k in 1..=10 {
        let t = beta * k as f64;
        let gc = bf.gamma_t(t)?;
        let sc = bf.s_t(t)?;
        gamma_err = gamma_err.max((db.gamma_discrete(t) - gc).abs() / gc.abs().max(1e-300));
        s_err = s_err.max((db.s_discrete(t) - sc).abs() / sc.abs().max(1e-300));
    }
    checks.push(ValidationCheck::new("gamma_discrete_vs_continuum_relative", gamma_err, 1e-3));
    checks.push(ValidationCheck::new("s_discrete_vs_continuum_relative", s_err, 1e-3));

    // Canonical critical bath for the remaining fixed-instance checks.
    let cbp = crate::model::BathParams::new(1.0)?;
    let cff = FormFactor::new(-0.5, 1.0, 1, 4.0 * PI, &cbp)?;
    let cbf = crate::bath::BathFunctions::new(&cbp, &cff, &crate::quad::QuadConfig::default())?;
    let spin = SystemSpec::new(
        ndarray::array![
            [C64::new(0.0, 0.0), C64::new(0.5, 0.0)],
            [C64::new(0.5, 0.0), C64::new(0.0, 0.0)]
        ],
        ndarray::array![0.5, -0.5],
    )?;

    // 3. Truncated Fock-space unitary evolution vs the discrete dephasing
    //    formula on a single-mode bath.
    let mode = [Mode { omega: 1.0, coupling: 1.0 }];
    let single = DiscreteBath::new(mode.to_vec(), 1.0)?;
    let ts = TruncatedSystem::new(&spin, 0.0, 0.2, &mode, 30)?;
    let plus = DensityMatrix::pure(&ndarray::array![
        C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
    ])?;
    let mut fock_err = 0.0_f64;
    for &t in &[2.0, 5.0, 8.0] {
        let exact = single.dephasing(&spin, 0.2, &plus, t)?;
        let evolved = ts.evolve_reduced(&plus, 1.0, t)?;
        fock_err = fock_err.max(crate::dynamics::trace_distance(exact.matrix(), evolved.matrix()));
    }
    checks.push(ValidationCheck::new("truncated_fock_vs_discrete_dephasing", fock_err, 1e-6));

    // 4. Characteristic-polynomial roots vs the dense eigensolver on a seeded
    //    random 6x6 matrix.
    let m = seeded_complex_matrix(6, 2026);
    let dense = m
        .eigvals()
        .map_err(|e| Error::compute("dense eigensolver", e.to_string()))?
        .to_vec();
    let roots = char_poly_eigenvalues(&m)?;
    let scale = dense.iter().map(|z| z.norm()).fold(1e-300, f64::max);
    checks.push(ValidationCheck::new(
        "charpoly_roots_vs_dense_eigensolver",
        spectrum_distance(&dense, &roots) / scale,
        1e-10,
    ));

    // 5. Two-level closed-form resonances vs the dense spectrum of the 4x4
    //    resonance matrix.
    let xi0 = cbf.xi0();
    let gs = crate::spin_boson::gamma_star(xi0);
    let mut w_err = 0.0_f64;
    for &f in &[0.01, 0.5, 2.0, 100.0] {
        for &lambda in &[0.05, 0.2] {
            let cp = crate::model::CouplingParams::new(f * gs * lambda * lambda, lambda)?;
            let closed = crate::spin_boson::w_closed(&cp, xi0).to_vec();
            let numeric = crate::spin_boson::w_matrix(&cp, xi0)
                .eigvals()
                .map_err(|e| Error::compute("dense eigensolver", e.to_string()))?
                .to_vec();
            let scale = closed.iter().map(|z| z.norm()).fold(1e-300, f64::max);
            w_err = w_err.max(spectrum_distance(&closed, &numeric) / scale);
        }
    }
    checks.push(ValidationCheck::new("spin_boson_closed_vs_dense_spectrum", w_err, 1e-10));

    // 6. Diagonal block of the effective operator vs the delta table.
    let mut diag_err = 0.0_f64;
    for seed in 0..5 {
        let spec = seeded_spec(3, 3000 + seed);
        let cp = crate::model::CouplingParams::new(0.05, 0.3)?;
        let op = crate::resonances::effective_operator(&spec, &cbf, &cp);
        let delta = cbf.delta_table(&spec);
        let l2 = cp.lambda() * cp.lambda();
        let scale = delta.iter().map(|z| (l2 * z).norm()).fold(1e-300, f64::max);
        for a in 0..3 {
            for b in 0..3 {
                let idx = a * 3 + b;
                let got = op.lambda_quad()[(idx, idx)];
                diag_err = diag_err.max((got - l2 * delta[(a, b)]).norm() / scale);
            }
        }
    }
    checks.push(ValidationCheck::new("effective_diagonal_vs_delta_table", diag_err, 1e-14));

    // 7. Population formula vs the matrix exponential of the relaxation
    //    generator.
    let spec = seeded_spec(3, 4000);
    let cp = crate::model::CouplingParams::new(0.01, 0.25)?;
    let prop = crate::dynamics::PerturbativePropagator::new(&spec, &cbf, &cp)?;
    let rho0 = DensityMatrix::pure(&ndarray::array![
        C64::new(0.8, 0.0),
        C64::new(0.0, 0.6),
        C64::new(0.0, 0.0)
    ])?;
    let p0 = rho0.populations();
    let rate = 2.0 * cp.sigma() * cp.sigma() / (cp.lambda() * cp.lambda());
    let mut pop_err = 0.0_f64;
    for &t in &[0.0, 10.0, 200.0, 3000.0] {
        let gen = prop.relaxation().matrix().mapv(|x| -rate * t * x);
        let via_expm = expm_real(&gen).dot(&p0);
        for a in 0..3 {
            pop_err = pop_err.max((prop.reduced_diag(&rho0, t, a) - via_expm[a]).abs());
        }
    }
    checks.push(ValidationCheck::new("population_channels_vs_expm", pop_err, 1e-10));

    // 8. Effective-operator spectrum (interaction basis) vs W spectrum
    //    (energy basis) for the two-level instance.
    let cp = crate::model::CouplingParams::new(0.02, 0.1)?;
    let op = crate::resonances::effective_operator(&spin, &cbf, &cp);
    let eff = op
        .matrix()
        .eigvals()
        .map_err(|e| Error::compute("dense eigensolver", e.to_string()))?
        .to_vec();
    let w = crate::spin_boson::w_closed(&cp, xi0).to_vec();
    let scale = w.iter().map(|z| z.norm()).fold(1e-300, f64::max);
    checks.push(ValidationCheck::new(
        "effective_operator_vs_w_matrix_spectrum",
        spectrum_distance(&eff, &w) / scale,
        1e-10,
    ));

    let all_pass = checks.iter().all(|c| c.pass);
    Ok(ValidationReport { checks, all_pass })
}

fn seeded_complex_matrix(n: usize, seed: u64) -> Array2<C64> {
    // Splitmix-style generator: keeps the suite free of dev-only crates.
    let mut state = seed;
    let mut next = move || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    Array2::from_shape_fn((n, n), |_| C64::new(next(), next()))
}

fn seeded_spec(n: usize, seed: u64) -> SystemSpec {
    let m = seeded_complex_matrix(n, seed);
    let hs = (&m + &m.t().mapv(|z| z.conj())).mapv(|z| 0.5 * z);
    let g = Array1::from_shape_fn(n, |a| 0.3 + 0.45 * a as f64 + 0.01 * (a * a) as f64);
    SystemSpec::new(hs, g).expect("seeded spec is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::BathFunctions;
    use crate::model::BathParams;
    use crate::quad::QuadConfig;
    use ndarray::array;

    #[test]
    fn validation_suite_passes_on_the_canonical_bath() {
        let bp = BathParams::new(1.0).unwrap();
        let ff = FormFactor::new(-0.5, 1.0, 1, 4.0 * PI, &bp).unwrap();
        let bf = BathFunctions::new(&bp, &ff, &QuadConfig::default()).unwrap();
        let report = validation_suite(&bf, &ff, 1.0).unwrap();
        assert_eq!(report.checks.len(), 8);
        for c in &report.checks {
            assert!(c.pass, "{}: {:.3e} > {:.3e}", c.name, c.max_error, c.tolerance);
        }
        assert!(report.all_pass);
    }

    fn spin_half_spec() -> SystemSpec {
        SystemSpec::new(
            array![
                [C64::new(0.0, 0.0), C64::new(0.5, 0.0)],
                [C64::new(0.5, 0.0), C64::new(0.0, 0.0)]
            ],
            array![0.5, -0.5],
        )
        .unwrap()
    }

    #[test]
    fn discrete_sums_converge_to_continuum() {
        let bath = BathParams::new(1.0).unwrap();
        let ff = FormFactor::new(-0.5, 1.0, 1, 4.0 * PI, &bath).unwrap();
        let bf = BathFunctions::new(&bath, &ff, &QuadConfig::default()).unwrap();
        let db = DiscreteBath::log_discretization(&ff, 1.0, 2000, 1e-4, bf.r_max()).unwrap();
        for &t in &[0.5, 2.0, 7.0] {
            let gc = bf.gamma_t(t).unwrap();
            let gd = db.gamma_discrete(t);
            assert!((gc - gd).abs() < 1e-3 * gc, "Gamma t={t}: {gc} vs {gd}");
            let sc = bf.s_t(t).unwrap();
            let sd = db.s_discrete(t);
            assert!((sc - sd).abs() < 1e-3 * sc, "S t={t}: {sc} vs {sd}");
        }
    }

    #[test]
    fn single_mode_truncated_evolution_matches_discrete_dephasing() {
        // One oscillator, sigma = 0: the truncated unitary dynamics must
        // reproduce the independent-boson dephasing law built from the same
        // single mode, up to the Gibbs tail cut by the Fock truncation.
        let spec = spin_half_spec();
        let mode = Mode { omega: 1.0, coupling: 1.0 };
        let lambda = 0.2;
        let db = DiscreteBath::new(vec![mode], 1.0).unwrap();
        let ts = TruncatedSystem::new(&spec, 0.0, lambda, &[mode], 30).unwrap();
        let rho0 = DensityMatrix::new(array![
            [C64::new(0.5, 0.0), C64::new(0.5, 0.0)],
            [C64::new(0.5, 0.0), C64::new(0.5, 0.0)]
        ])
        .unwrap();
        for &t in &[0.7, 3.1, 6.9, 12.0] {
            let exact = db.dephasing(&spec, lambda, &rho0, t).unwrap();
            let fock = ts.evolve_reduced(&rho0, 1.0, t).unwrap();
            let dist = crate::dynamics::trace_distance(exact.matrix(), fock.matrix());
            assert!(dist < 1e-6, "t={t}: trace distance {dist:.3e}");
        }
    }

    #[test]
    fn truncated_evolution_conserves_trace_and_energy() {
        let spec = spin_half_spec();
        let modes = [Mode { omega: 0.9, coupling: 0.7 }, Mode { omega: 1.7, coupling: 0.4 }];
        let ts = TruncatedSystem::new(&spec, 0.3, 0.25, &modes, 5).unwrap();
        let rho0 = DensityMatrix::pure(&array![C64::new(0.8, 0.0), C64::new(0.0, 0.6)]).unwrap();
        let full0 = ts.initial_state(&rho0, 1.2).unwrap();
        let e0 = ts.energy_expectation(&full0);
        for &t in &[0.5, 2.0] {
            let full_t = ts.evolve_full(&full0, t);
            let trace: C64 = (0..ts.dim()).map(|i| full_t[(i, i)]).sum();
            assert!((trace.re - 1.0).abs() < 1e-10 && trace.im.abs() < 1e-12);
            let et = ts.energy_expectation(&full_t);
            assert!((et - e0).abs() < 1e-8, "energy drift {}", et - e0);
        }
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let spec = spin_half_spec();
        let modes = [
            Mode { omega: 1.0, coupling: 0.1 },
            Mode { omega: 1.5, coupling: 0.1 },
            Mode { omega: 2.0, coupling: 0.1 },
        ];
        // 2 * 13^3 = 4394 > 4096.
        let err = TruncatedSystem::new(&spec, 0.0, 0.1, &modes, 12).unwrap_err();
        assert!(matches!(err, Error::DimensionCapExceeded { dim: 4394, cap: 4096 }));
        // 2 * 12^3 = 3456 is allowed.
        assert!(TruncatedSystem::new(&spec, 0.0, 0.1, &modes, 11).is_ok());
    }

    #[test]
    fn char_poly_route_matches_known_spectrum() {
        // Companion-style check on a matrix with known eigenvalues 1, 2, 3.
        let m = array![
            [C64::new(2.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(0.5, 0.0), C64::new(3.0, 0.0)]
        ];
        let mut roots = char_poly_eigenvalues(&m).unwrap();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (r, want) in roots.iter().zip([1.0, 2.0, 3.0]) {
            assert!((r - C64::new(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn eigen_crosscheck_on_random_matrices() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        // Small: characteristic-polynomial route.
        let mut m6 = Array2::<C64>::zeros((6, 6));
        for z in m6.iter_mut() {
            *z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let spec6 = eigen_crosscheck(&m6).unwrap();
        assert_eq!(spec6.len(), 6);
        // Larger: similarity-scrambled route.
        let mut m20 = Array2::<C64>::zeros((20, 20));
        for z in m20.iter_mut() {
            *z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        assert_eq!(eigen_crosscheck(&m20).unwrap().len(), 20);
    }

    #[test]
    fn expm_real_matches_scalar_and_rotation() {
        // Diagonal case.
        let d = array![[(-0.3_f64), 0.0], [0.0, 1.7]];
        let e = expm_real(&d);
        assert!((e[(0, 0)] - (-0.3_f64).exp()).abs() < 1e-14);
        assert!((e[(1, 1)] - 1.7_f64.exp()).abs() < 1e-13);
        assert!(e[(0, 1)].abs() < 1e-16);
        // Rotation generator: expm([[0,-th],[th,0]]) = [[cos,-sin],[sin,cos]].
        let th = 1.3_f64;
        let r = expm_real(&array![[0.0, -th], [th, 0.0]]);
        assert!((r[(0, 0)] - th.cos()).abs() < 1e-14);
        assert!((r[(1, 0)] - th.sin()).abs() < 1e-14);
        // Semigroup property on a contraction generator.
        let gen = array![[-2.0, 2.0], [1.0, -1.0]];
        let one = expm_real(&gen);
        let half = expm_real(&gen.mapv(|x| 0.5 * x));
        let composed = half.dot(&half);
        for (a, b) in one.iter().zip(composed.iter()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn herm_conjugated_evolution_is_unitary() {
        let h = array![
            [C64::new(1.0, 0.0), C64::new(0.2, 0.1)],
            [C64::new(0.2, -0.1), C64::new(-0.5, 0.0)]
        ];
        let rho = array![
            [C64::new(0.6, 0.0), C64::new(0.1, -0.2)],
            [C64::new(0.1, 0.2), C64::new(0.4, 0.0)]
        ];
        let out = herm_conjugated_evolution(&h, &rho, 2.7).unwrap();
        let trace: C64 = out[(0, 0)] + out[(1, 1)];
        assert!((trace - C64::new(1.0, 0.0)).norm() < 1e-14);
        // Purity is preserved under unitary conjugation.
        let purity_in = rho.dot(&rho)[(0, 0)] + rho.dot(&rho)[(1, 1)];
        let purity_out = out.dot(&out)[(0, 0)] + out.dot(&out)[(1, 1)];
        assert!((purity_in - purity_out).norm() < 1e-13);
    }
}
