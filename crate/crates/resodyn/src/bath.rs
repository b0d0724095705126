//! Bath spectral integrals: the infrared inner product `<g, |k|^{-1} g>`, the
//! regularized zero-frequency spectral density `xi(0)`, the dephasing
//! functions `Gamma(t)` and `S(t)`, and the resonance-energy table
//! `delta_{a,b}` built from them.
//!
//! All integrals are radial (the angular profile enters only through its
//! squared integral) and truncated at an automatically chosen cutoff where
//! the form-factor envelope falls below the quadrature tolerance. Evaluating
//! [`BathFunctions::new`] runs every t-independent quadrature once; the
//! t-dependent `Gamma`/`S` integrals are evaluated on demand with an
//! oscillation-resolving panel width of `pi/t`.

use crate::error::{Error, Result};
use crate::model::{BathParams, FormFactor, SystemSpec};
use crate::quad::{self, QuadConfig};
use crate::C64;
use ndarray::Array2;
use std::f64::consts::PI;

/// Precomputed t-independent bath quantities plus evaluators for the
/// t-dependent dephasing integrals.
#[derive(Debug, Clone)]
pub struct BathFunctions {
    beta: f64,
    ff: FormFactor,
    quad: QuadConfig,
    r_max: f64,
    inner_1_over_k: f64,
    xi0: f64,
    xi0_residual: f64,
}

impl BathFunctions {
    /// Run the t-independent quadratures and cross-checks.
    ///
    /// - `<g, |k|^{-1} g>` is computed by adaptive quadrature and verified
    ///   against the closed Gamma-function form of the radial moment; a
    ///   disagreement beyond 1e-8 relative is reported as a compute error.
    /// - `xi(0)` is the `eps -> 0` limit of the Lorentzian-regularized
    ///   thermal spectral density. It is nonzero only on the critical
    ///   infrared boundary `p = -1/2`; there it is obtained by Richardson
    ///   extrapolation over `eps = 2^0, 2^-1, ..., 2^-12` and the last
    ///   extrapolation step is kept as a residual estimate.
    pub fn new(bath: &BathParams, ff: &FormFactor, quad: &QuadConfig) -> Result<Self> {
        quad.validate()?;
        let beta = bath.beta();
        let r_max = quad::tail_cutoff(ff.p(), ff.decay_a(), ff.decay_m(), quad);

        // <g, |k|^{-1} g> = angular * int_0^inf r^{2p+1} e^{-2 a r^m} dr.
        let angular = ff.angular_sq_integral();
        let p = ff.p();
        let inner_quad = quad::integrate_seeded(
            |r: f64| r.powf(2.0 * p + 1.0) * (-2.0 * ff.decay_a() * r.powf(ff.decay_m() as f64)).exp(),
            &[0.0, r_max],
            quad,
            None,
        )?;
        let inner_1_over_k = angular * inner_quad.value;

        // Closed form of the same radial moment:
        // int_0^inf r^{s-1} e^{-2 a r^m} dr = Gamma(s/m) / (m (2a)^{s/m}),  s = 2p + 2.
        let s = 2.0 * p + 2.0;
        let m = ff.decay_m() as f64;
        let closed = angular * quad::gamma_fn(s / m) / (m * (2.0 * ff.decay_a()).powf(s / m));
        let scale = closed.abs().max(1e-300);
        if angular > 0.0 && (inner_1_over_k - closed).abs() > 1e-8 * scale {
            return Err(Error::compute(
                "bath inner product",
                format!(
                    "quadrature value {inner_1_over_k:.12e} disagrees with closed form {closed:.12e}"
                ),
            ));
        }

        let (xi0, xi0_residual) = if ff.is_critical_infrared() && angular > 0.0 {
            xi_zero(beta, ff, quad, r_max)?
        } else {
            (0.0, 0.0)
        };

        Ok(BathFunctions {
            beta,
            ff: *ff,
            quad: *quad,
            r_max,
            inner_1_over_k,
            xi0,
            xi0_residual,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn form_factor(&self) -> &FormFactor {
        &self.ff
    }

    pub fn quad_config(&self) -> &QuadConfig {
        &self.quad
    }

    /// Radial truncation point used by every integral.
    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// The infrared inner product `<g, |k|^{-1} g>`.
    pub fn inner_1_over_k(&self) -> f64 {
        self.inner_1_over_k
    }

    /// Zero-frequency thermal spectral density `xi(0)`; strictly positive on
    /// the critical infrared boundary (for a coupled bath), exactly zero off
    /// it.
    pub fn xi0(&self) -> f64 {
        self.xi0
    }

    /// Residual estimate of the `xi(0)` extrapolation (0 when `xi(0)` is an
    /// exact zero).
    pub fn xi0_residual(&self) -> f64 {
        self.xi0_residual
    }

    /// Long-time linear growth rate of the decoherence function,
    /// `lim_{t->inf} Gamma(t)/t = (pi/2) xi(0)`; zero away from the critical
    /// infrared boundary where `Gamma(t)` grows sublinearly.
    pub fn gamma_infinity(&self) -> f64 {
        0.5 * std::f64::consts::PI * self.xi0
    }

    /// Decoherence function
    /// `Gamma(t) = int |g(k)|^2 coth(beta|k|/2) sin^2(|k|t/2) / |k|^2 d^3k`,
    /// nonnegative and `Gamma(0) = 0`.
    pub fn gamma_t(&self, t: f64) -> Result<f64> {
        assert!(t >= 0.0 && t.is_finite(), "time must be finite and >= 0");
        if t == 0.0 {
            return Ok(0.0);
        }
        let beta = self.beta;
        let p = self.ff.p();
        let a = self.ff.decay_a();
        let m = self.ff.decay_m() as f64;
        let angular = self.ff.angular_sq_integral();
        if angular == 0.0 {
            return Ok(0.0);
        }
        // r^{2p} coth(beta r/2) sin^2(rt/2) = r^{2p-1} [r coth(beta r/2)] sin^2(rt/2).
        let f = move |r: f64| {
            let half = (0.5 * r * t).sin();
            r.powf(2.0 * p - 1.0)
                * quad::r_coth_half_beta(r, beta)
                * (-2.0 * a * r.powf(m)).exp()
                * half
                * half
        };
        let est = quad::integrate_seeded(f, &[0.0, self.r_max], &self.quad, Some(PI / t))?;
        Ok(angular * est.value)
    }

    /// Lamb-shift function
    /// `S(t) = (1/2) int |g(k)|^2 (|k|t - sin(|k|t)) / |k|^2 d^3k`,
    /// nondecreasing with `S(0) = 0`.
    pub fn s_t(&self, t: f64) -> Result<f64> {
        assert!(t >= 0.0 && t.is_finite(), "time must be finite and >= 0");
        if t == 0.0 {
            return Ok(0.0);
        }
        let p = self.ff.p();
        let a = self.ff.decay_a();
        let m = self.ff.decay_m() as f64;
        let angular = self.ff.angular_sq_integral();
        if angular == 0.0 {
            return Ok(0.0);
        }
        // (x - sin x) evaluated as x^3 * [(x - sin x)/x^3] to keep full
        // relative accuracy for small x.
        let f = move |r: f64| {
            let x = r * t;
            r.powf(2.0 * p) * (-2.0 * a * r.powf(m)).exp() * x * x * x * quad::x_minus_sin_over_x3(x)
        };
        let est = quad::integrate_seeded(f, &[0.0, self.r_max], &self.quad, Some(PI / t))?;
        Ok(0.5 * angular * est.value)
    }

    /// Resonance-energy table
    /// `delta_{a,b} = -1/2 (g_a^2 - g_b^2) <g,|k|^{-1}g> + i (pi/2) (g_a - g_b)^2 xi(0)`,
    /// with the imaginary part present only on the critical infrared
    /// boundary. Antisymmetry `delta_{b,a} = -conj(delta_{a,b})` holds
    /// exactly by construction.
    pub fn delta_table(&self, spec: &SystemSpec) -> Array2<C64> {
        let n = spec.dim();
        let g = spec.g_levels();
        let mut table = Array2::zeros((n, n));
        for a in 0..n {
            for b in 0..n {
                let diff = g[a] - g[b];
                let re = -0.5 * (g[a] * g[a] - g[b] * g[b]) * self.inner_1_over_k;
                let im = 0.5 * PI * diff * diff * self.xi0;
                table[(a, b)] = C64::new(re, im);
            }
        }
        table
    }
}

/// Lorentzian-regularized spectral density at width `eps`:
/// `(1/pi) * angular * int_0^R r^{2p+1} [r coth(beta r/2)] e^{-2 a r^m} * eps/(r^2+eps^2) dr`.
fn xi_eps(beta: f64, ff: &FormFactor, quad: &QuadConfig, r_max: f64, eps: f64) -> Result<f64> {
    let p = ff.p();
    let a = ff.decay_a();
    let m = ff.decay_m() as f64;
    let f = move |r: f64| {
        r.powf(2.0 * p + 1.0)
            * quad::r_coth_half_beta(r, beta)
            * (-2.0 * a * r.powf(m)).exp()
            * eps
            / (r * r + eps * eps)
    };
    // Seed panels that resolve the Lorentzian core and its shoulders.
    let mut pts = vec![0.0, 0.5 * eps, eps];
    let mut edge = 2.0 * eps;
    while edge < r_max.min(1.0) {
        pts.push(edge);
        edge *= 2.0;
    }
    if *pts.last().unwrap() < r_max {
        pts.push(r_max);
    }
    let est = quad::integrate_seeded(f, &pts, quad, None)?;
    Ok(ff.angular_sq_integral() / PI * est.value)
}

/// Richardson limit of `xi_eps` as `eps -> 0` for the critical family.
/// Two-point extrapolation `2 I(eps/2) - I(eps)` cancels the leading linear
/// term; the sequence is driven down `eps = 1, 1/2, ..., 2^-12` and the last
/// two extrapolants must agree to 5e-3 relative (roundoff floor aside) or the
/// computation reports no convergence.
fn xi_zero(beta: f64, ff: &FormFactor, quad: &QuadConfig, r_max: f64) -> Result<(f64, f64)> {
    const HALVINGS: usize = 12;
    let mut i_vals = Vec::with_capacity(HALVINGS + 1);
    for k in 0..=HALVINGS {
        let eps = 0.5_f64.powi(k as i32);
        i_vals.push(xi_eps(beta, ff, quad, r_max, eps)?);
    }
    let extrap: Vec<f64> = i_vals.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();
    let last = extrap[extrap.len() - 1];
    let prev = extrap[extrap.len() - 2];
    let residual = (last - prev).abs();
    let tol = (5e-3 * last.abs()).max(10.0 * quad.abs_tol);
    if !last.is_finite() || residual > tol {
        return Err(Error::NoConvergence {
            what: "xi(0) Richardson extrapolation".into(),
            residual,
            tolerance: tol,
        });
    }
    Ok((last, residual))
}
