//! Reduced density-matrix evolution for general `N`: exact dephasing at
//! `sigma = 0`, leading-order perturbative dynamics at small `sigma`, and the
//! decoherence-manifold distance bound.

use crate::bath::BathFunctions;
use crate::error::{Error, Result};
use crate::model::{CouplingParams, DensityMatrix, SystemSpec};
use crate::resonances::{effective_operator, resonances_numeric, t_matrix, ResonanceSpectrum, TMatrix};
use crate::C64;
use ndarray::Array2;
use ndarray_linalg::SVD;

/// Trace norm (sum of singular values).
pub fn trace_norm(m: &Array2<C64>) -> f64 {
    let (_, s, _) = m.svd(false, false).expect("SVD of a finite matrix");
    s.iter().sum()
}

/// Trace distance `||a - b||_1 / 2`.
pub fn trace_distance(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    0.5 * trace_norm(&(a - b))
}

/// Exact pure-dephasing evolution at `sigma = 0`, driven by the phase
/// functions `alpha_{a,b}(t) = (g_a^2 - g_b^2) S(t) + i (g_a - g_b)^2 Gamma(t)`.
pub struct DephasingPropagator<'a> {
    spec: &'a SystemSpec,
    bf: &'a BathFunctions,
    lambda: f64,
}

impl<'a> DephasingPropagator<'a> {
    /// Errors with [`Error::SigmaNotZero`] unless the coupling is pure
    /// dephasing.
    pub fn new(spec: &'a SystemSpec, bf: &'a BathFunctions, cp: &CouplingParams) -> Result<Self> {
        if cp.sigma() != 0.0 {
            return Err(Error::SigmaNotZero { sigma: cp.sigma() });
        }
        Ok(DephasingPropagator { spec, bf, lambda: cp.lambda() })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Phase function `alpha_{a,b}(t)`; exactly zero on the diagonal, with
    /// `Im alpha >= 0` always (it is the coherence decay exponent).
    pub fn alpha(&self, a: usize, b: usize, t: f64) -> Result<C64> {
        let g = self.spec.g_levels();
        if a == b {
            return Ok(C64::new(0.0, 0.0));
        }
        let gamma = self.bf.gamma_t(t)?;
        let s = self.bf.s_t(t)?;
        Ok(C64::new(
            (g[a] * g[a] - g[b] * g[b]) * s,
            (g[a] - g[b]) * (g[a] - g[b]) * gamma,
        ))
    }

    /// `rho_t[a,b] = rho_0[a,b] e^{i lambda^2 alpha_{a,b}(t)}`: the diagonal
    /// is frozen, each coherence decays by
    /// `e^{-lambda^2 (g_a - g_b)^2 Gamma(t)}`. This dynamics is exactly
    /// completely positive, so the output validates as a density matrix.
    pub fn propagate(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        let n = self.spec.dim();
        if rho0.dim() != n {
            return Err(Error::config("rho", "dimension mismatch with system spec"));
        }
        let gamma = self.bf.gamma_t(t)?;
        let s = self.bf.s_t(t)?;
        let g = self.spec.g_levels();
        let l2 = self.lambda * self.lambda;
        let mut out = rho0.matrix().clone();
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    let alpha = C64::new(
                        (g[a] * g[a] - g[b] * g[b]) * s,
                        (g[a] - g[b]) * (g[a] - g[b]) * gamma,
                    );
                    out[(a, b)] *= (C64::i() * l2 * alpha).exp();
                }
            }
        }
        DensityMatrix::new(out)
    }
}

/// One-call form of the exact dephasing evolution.
pub fn dephasing_exact(
    spec: &SystemSpec,
    bf: &BathFunctions,
    cp: &CouplingParams,
    rho0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    DephasingPropagator::new(spec, bf, cp)?.propagate(rho0, t)
}

/// Leading-order reduced dynamics at small `sigma`: coherences rotate and
/// decay with the labeled resonances `e^{i t eps_{b,a}}`, populations relax
/// through the eigenchannels of the relaxation matrix at rates
/// `2 (sigma^2/lambda^2) xi_c`.
pub struct PerturbativePropagator {
    n: usize,
    rate_scale: f64,
    spectrum: ResonanceSpectrum,
    relaxation: TMatrix,
}

impl PerturbativePropagator {
    /// Builds and labels the resonance spectrum and the relaxation
    /// eigenchannels; propagates labeling and degeneracy errors.
    pub fn new(spec: &SystemSpec, bf: &BathFunctions, cp: &CouplingParams) -> Result<Self> {
        let op = effective_operator(spec, bf, cp);
        let spectrum = resonances_numeric(&op)?;
        let relaxation = t_matrix(spec, bf)?;
        Ok(PerturbativePropagator {
            n: spec.dim(),
            rate_scale: 2.0 * cp.sigma() * cp.sigma() / (cp.lambda() * cp.lambda()),
            spectrum,
            relaxation,
        })
    }

    pub fn spectrum(&self) -> &ResonanceSpectrum {
        &self.spectrum
    }

    pub fn relaxation(&self) -> &TMatrix {
        &self.relaxation
    }

    /// Leading term of the coherence evolution,
    /// `rho_t[a,b] = e^{i t eps_{b,a}} rho_0[a,b]` — note the transposed
    /// index order on the resonance.
    pub fn reduced_offdiag(&self, rho0: &DensityMatrix, t: f64, a: usize, b: usize) -> Result<C64> {
        if a == b || a >= self.n || b >= self.n {
            return Err(Error::config("indices", "coherence evolution needs distinct (a, b)"));
        }
        let eps = self.spectrum.eigenvalue(b, a).expect("labeled spectrum covers all pairs");
        Ok((C64::i() * t * eps).exp() * rho0.matrix()[(a, b)])
    }

    /// Population transfer kernel
    /// `D_{a,b}(t) = sum_c e^{i t eps_{c,c}} [phi_c]_b [phi_c]_a` with the
    /// leading-order diagonal resonances `eps_{c,c} = 2i (sigma^2/lambda^2) xi_c`
    /// and real orthonormal eigenvectors `phi_c` of the relaxation matrix.
    pub fn d_ab(&self, t: f64, a: usize, b: usize) -> f64 {
        let phi = self.relaxation.vectors();
        let xi = self.relaxation.xi();
        (0..self.n)
            .map(|c| (-self.rate_scale * xi[c] * t).exp() * phi[(b, c)] * phi[(a, c)])
            .sum()
    }

    /// Leading-order population
    /// `rho_t[a,a] = 1/N + sum_{c >= 2} e^{i t eps_{c,c}} [phi_c]_a <phi_c, p_0>`,
    /// where the `c = 1` channel (the zero eigenvalue with the uniform
    /// eigenvector) supplies the `1/N` equilibrium share.
    pub fn reduced_diag(&self, rho0: &DensityMatrix, t: f64, a: usize) -> f64 {
        let p0 = rho0.populations();
        let phi = self.relaxation.vectors();
        let xi = self.relaxation.xi();
        let mut value = 1.0 / self.n as f64;
        for c in 1..self.n {
            let overlap: f64 = (0..self.n).map(|b| phi[(b, c)] * p0[b]).sum();
            value += (-self.rate_scale * xi[c] * t).exp() * phi[(a, c)] * overlap;
        }
        value
    }

    /// Full leading-order matrix at time `t`: coherences from the labeled
    /// resonances, populations from the relaxation channels. Hermitian to the
    /// accuracy of the spectral symmetry `eps_{b,a} = -conj(eps_{a,b})`;
    /// positivity is not enforced (it is a leading-order approximant).
    pub fn propagate(&self, rho0: &DensityMatrix, t: f64) -> Result<Array2<C64>> {
        let mut out = Array2::<C64>::zeros((self.n, self.n));
        for a in 0..self.n {
            out[(a, a)] = C64::new(self.reduced_diag(rho0, t, a), 0.0);
            for b in 0..self.n {
                if a != b {
                    out[(a, b)] = self.reduced_offdiag(rho0, t, a, b)?;
                }
            }
        }
        Ok(out)
    }

    /// Smallest positive decay rate in the labeled spectrum (used to pick
    /// default time horizons); `None` when everything is stationary.
    pub fn min_positive_rate(&self) -> Option<f64> {
        let mut min_rate = f64::INFINITY;
        for e in self.spectrum.eigenvalues() {
            if e.im > 1e-14 {
                min_rate = min_rate.min(e.im);
            }
        }
        if min_rate.is_finite() {
            Some(min_rate)
        } else {
            None
        }
    }
}

/// Trace-norm distance from the decoherence manifold (the set of matrices
/// diagonal in the interaction eigenbasis): the trace norm of the
/// off-diagonal part.
pub fn manifold_distance(rho: &DensityMatrix) -> f64 {
    offdiagonal_trace_norm(rho.matrix())
}

/// Trace norm of `m - diag(m)` for a raw matrix.
pub fn offdiagonal_trace_norm(m: &Array2<C64>) -> f64 {
    let mut off = m.clone();
    for i in 0..off.nrows() {
        off[(i, i)] = C64::new(0.0, 0.0);
    }
    trace_norm(&off)
}

/// One time sample of the manifold stability check.
#[derive(Debug, Clone, Copy)]
pub struct ManifoldSample {
    pub t: f64,
    /// Distance of the evolved state from the manifold.
    pub distance: f64,
    /// The envelope `C e^{-lambda^2 gamma_G Gamma(t)} dist(rho_0)`.
    pub bound: f64,
}

/// Result of checking the orbital-stability envelope over a time grid.
#[derive(Debug, Clone)]
pub struct ManifoldReport {
    /// Worst (largest) gap exponent `gamma_G = min_{a != b} (g_a - g_b)^2`.
    pub gamma_g: f64,
    /// The norm-equivalence constant used in the envelope (`N^2`).
    pub c_constant: f64,
    pub initial_distance: f64,
    pub samples: Vec<ManifoldSample>,
    /// Largest ratio `distance / bound` over the grid (0 when the initial
    /// state already sits on the manifold).
    pub max_ratio: f64,
}

impl ManifoldReport {
    pub fn holds(&self) -> bool {
        self.max_ratio <= 1.0
    }
}

/// Verify the orbital-stability envelope
/// `dist(M, rho_t) <= C e^{-lambda^2 gamma_G Gamma(t)} dist(M, rho_0)`
/// pointwise on a time grid for the exact dephasing dynamics, with
/// `C = N^2` from trace-norm/max-entry equivalence.
pub fn manifold_bound_check(
    spec: &SystemSpec,
    bf: &BathFunctions,
    cp: &CouplingParams,
    rho0: &DensityMatrix,
    t_grid: &[f64],
) -> Result<ManifoldReport> {
    let prop = DephasingPropagator::new(spec, bf, cp)?;
    let gamma_g = spec.min_level_gap_sq();
    let n = spec.dim();
    let c_constant = (n * n) as f64;
    let l2 = cp.lambda() * cp.lambda();
    let initial_distance = manifold_distance(rho0);
    let mut samples = Vec::with_capacity(t_grid.len());
    let mut max_ratio = 0.0_f64;
    for &t in t_grid {
        let rho_t = prop.propagate(rho0, t)?;
        let distance = manifold_distance(&rho_t);
        let bound = c_constant * (-l2 * gamma_g * bf.gamma_t(t)?).exp() * initial_distance;
        if initial_distance > 0.0 {
            max_ratio = max_ratio.max(distance / bound);
        } else if distance > 1e-12 {
            // A state on the manifold must stay on it.
            max_ratio = f64::INFINITY;
        }
        samples.push(ManifoldSample { t, distance, bound });
    }
    Ok(ManifoldReport { gamma_g, c_constant, initial_distance, samples, max_ratio })
}

/// Geometric time grid: `t = 0`, then `points - 1` geometrically spaced
/// samples from `t_max / 1000` up to `t_max`.
pub fn geometric_time_grid(t_max: f64, points: usize) -> Vec<f64> {
    assert!(t_max > 0.0 && points >= 2, "need t_max > 0 and at least two points");
    let mut grid = Vec::with_capacity(points);
    grid.push(0.0);
    let t_min = t_max * 1e-3;
    let steps = points - 1;
    for k in 0..steps {
        let f = if steps == 1 { 1.0 } else { k as f64 / (steps - 1) as f64 };
        grid.push(t_min * (t_max / t_min).powf(f));
    }
    grid
}
