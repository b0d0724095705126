//! Closed-form analysis of the two-level system: the 4x4 generator on the
//! doubled space, its eigenvalues and biorthogonal eigenvectors, the
//! overlapping/isolated regime transition at `gamma* = pi xi(0) / 4`, and the
//! energy-basis reduced dynamics.
//!
//! Everything here is analytic in `(sigma, lambda, xi0)`; the numerical
//! eigensolver enters only through tests, which pit these formulas against
//! dense diagonalization of [`w_matrix`].

use crate::error::{Error, Result};
use crate::model::{CouplingParams, DensityMatrix};
use crate::C64;
use ndarray::{array, Array2};
use std::f64::consts::PI;

/// Position of the resonance-overlap parameter `gamma = sigma/lambda^2`
/// relative to the transition value `gamma* = pi xi(0) / 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `gamma < gamma*`: all four eigenvalues purely imaginary, two mixing
    /// branches with distinct decay rates.
    Overlapping,
    /// `|gamma - gamma*| <= 1e-12`: the two mixing branches coalesce
    /// (exceptional point; eigenvectors are not defined).
    Critical,
    /// `gamma > gamma*`: the mixing branches split off the imaginary axis
    /// with a common decay rate.
    Isolated,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Overlapping => "overlapping",
            Regime::Critical => "critical",
            Regime::Isolated => "isolated",
        }
    }
}

/// Transition value `gamma* = pi xi(0) / 4` separating overlapping from
/// isolated resonances.
pub fn gamma_star(xi0: f64) -> f64 {
    0.25 * PI * xi0
}

/// Classify `gamma` against `gamma*` with the fixed `1e-12` collision window.
pub fn classify(gamma: f64, gamma_star: f64) -> Regime {
    if (gamma - gamma_star).abs() <= 1e-12 {
        Regime::Critical
    } else if gamma < gamma_star {
        Regime::Overlapping
    } else {
        Regime::Isolated
    }
}

/// The 4x4 generator on the doubled two-level space, in the product basis
/// ordering `(+,+), (+,-), (-,+), (-,-)`:
/// `W = i mu 1 + sigma diag(0, 1, -1, 0) - i mu antidiag(1, 1, 1, 1)` with
/// `mu = (lambda^2/4) pi xi(0)`.
///
/// # Panics
/// When `xi0 <= 0`; the two-level analytics require a critically coupled
/// bath.
pub fn w_matrix(cp: &CouplingParams, xi0: f64) -> Array2<C64> {
    assert!(xi0 > 0.0, "the two-level closed forms require xi(0) > 0");
    let mu = 0.25 * cp.lambda() * cp.lambda() * PI * xi0;
    let imu = C64::new(0.0, mu);
    let s = C64::new(cp.sigma(), 0.0);
    let z = C64::new(0.0, 0.0);
    array![
        [imu, z, z, -imu],
        [z, s + imu, -imu, z],
        [z, -imu, imu - s, z],
        [imu * -1.0, z, z, imu]
    ]
}

/// Closed-form eigenvalues of [`w_matrix`], in the fixed order
/// `w_1 = 0`, `w_2 = i (lambda^2/2) pi xi(0)`,
/// `w_{3,4} = i mu +- i sqrt(mu^2 - sigma^2)` (principal square root, so for
/// `gamma > gamma*` the pair moves off the imaginary axis symmetrically).
pub fn w_closed(cp: &CouplingParams, xi0: f64) -> [C64; 4] {
    assert!(xi0 > 0.0, "the two-level closed forms require xi(0) > 0");
    let mu = 0.25 * cp.lambda() * cp.lambda() * PI * xi0;
    let imu = C64::new(0.0, mu);
    let root = C64::new(mu * mu - cp.sigma() * cp.sigma(), 0.0).sqrt();
    [C64::new(0.0, 0.0), 2.0 * imu, imu + C64::i() * root, imu - C64::i() * root]
}

/// Closed-form mixing ratio
/// `r = (-4 i gamma - sqrt(pi^2 xi0^2 - 16 gamma^2)) / (pi xi0)`
/// (principal square root). Well defined at every `gamma`, including the
/// exceptional point where `r = -i`; the eigenvector normalization
/// `1/(1 + r^2)` is what breaks down there.
pub fn r_closed(cp: &CouplingParams, xi0: f64) -> C64 {
    assert!(xi0 > 0.0, "the two-level closed forms require xi(0) > 0");
    let gamma = cp.gamma();
    let pix = PI * xi0;
    let root = C64::new(pix * pix - 16.0 * gamma * gamma, 0.0).sqrt();
    (C64::new(0.0, -4.0 * gamma) - root) / pix
}

/// Complete closed-form solution for the two-level system away from the
/// exceptional point: eigenvalues, mixing ratio, biorthogonal eigenvector
/// tables, and the regime classification.
#[derive(Debug, Clone)]
pub struct SpinBosonSolution {
    xi0: f64,
    sigma: f64,
    lambda: f64,
    gamma: f64,
    gamma_star: f64,
    w: [C64; 4],
    r: C64,
    chi: Array2<C64>,
    chi_star: Array2<C64>,
    regime: Regime,
}

impl SpinBosonSolution {
    pub fn xi0(&self) -> f64 {
        self.xi0
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn gamma_star(&self) -> f64 {
        self.gamma_star
    }

    /// Eigenvalues `[w_1, w_2, w_3, w_4]` in the fixed closed-form order.
    pub fn w(&self) -> &[C64; 4] {
        &self.w
    }

    pub fn r(&self) -> C64 {
        self.r
    }

    /// Right eigenvectors as columns `chi_1..chi_4`.
    pub fn chi(&self) -> &Array2<C64> {
        &self.chi
    }

    /// Adjoint eigenvectors as columns, normalized so `<chi_i, chi_j*> =
    /// delta_ij`.
    pub fn chi_star(&self) -> &Array2<C64> {
        &self.chi_star
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Long-time decay rate of the energy-basis off-diagonal: the slower
    /// mixing branch `Im w_4` while the resonances overlap, and the common
    /// plateau `Im w_3 = (pi xi(0)/4) lambda^2` once they are isolated.
    /// Total because construction rejects the critical point.
    pub fn decoherence_rate(&self) -> f64 {
        match self.regime {
            Regime::Overlapping => self.w[3].im,
            Regime::Isolated => self.w[2].im,
            Regime::Critical => unreachable!("critical solutions are not constructible"),
        }
    }

    /// Leading-order reduced evolution in the energy basis `{+, -}`:
    ///
    /// ```text
    /// rho_t[+,+] = 1/2 + (1/2) e^{i t w_2} (rho_0[+,+] - rho_0[-,-])
    /// rho_t[+,-] = (r/(r^2+1)) e^{i t w_3} (r rho_0[+,-] + rho_0[-,+])
    ///            + (1/(r^2+1)) e^{i t w_4} (rho_0[+,-] - r rho_0[-,+])
    /// ```
    ///
    /// with `rho_t[-,+]` the conjugate and `rho_t[-,-] = 1 - rho_t[+,+]`.
    /// The result is an approximant: trace and Hermiticity are exact by
    /// construction, but positivity carries the dropped-remainder error and
    /// is not enforced, so a raw matrix is returned.
    pub fn rho_t_energy_basis(&self, rho0: &DensityMatrix, t: f64) -> Array2<C64> {
        assert_eq!(rho0.dim(), 2, "energy-basis dynamics is for two-level states");
        let m0 = rho0.matrix();
        let (pp0, pm0, mp0) = (m0[(0, 0)], m0[(0, 1)], m0[(1, 0)]);
        let mm0 = m0[(1, 1)];
        let r = self.r;
        let r2p1 = r * r + 1.0;
        let e2 = (C64::i() * t * self.w[1]).exp();
        let e3 = (C64::i() * t * self.w[2]).exp();
        let e4 = (C64::i() * t * self.w[3]).exp();
        let pp = 0.5 + 0.5 * e2 * (pp0 - mm0);
        let pm = (r / r2p1) * e3 * (r * pm0 + mp0) + e4 / r2p1 * (pm0 - r * mp0);
        array![[pp, pm], [pm.conj(), 1.0 - pp]]
    }
}

/// Build the full closed-form solution; errors with
/// [`Error::ExceptionalPoint`] at `gamma = gamma*` (within `1e-12`), where
/// the two mixing eigenvectors coalesce and no diagonalizing basis exists.
pub fn w_eigenpairs(cp: &CouplingParams, xi0: f64) -> Result<SpinBosonSolution> {
    let gamma = cp.gamma();
    let gs = gamma_star(xi0);
    let regime = classify(gamma, gs);
    if regime == Regime::Critical {
        return Err(Error::ExceptionalPoint { gamma });
    }
    let w = w_closed(cp, xi0);
    let r = r_closed(cp, xi0);
    let r2p1 = r * r + 1.0;
    let isq = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    let c = 1.0 / r2p1;
    let mut chi = Array2::<C64>::zeros((4, 4));
    let mut chi_star = Array2::<C64>::zeros((4, 4));
    // chi_1, chi_2 live in the population block and are self-dual.
    for (col, sign) in [(0_usize, 1.0), (1, -1.0)] {
        chi[(0, col)] = isq;
        chi[(3, col)] = sign * isq;
        chi_star[(0, col)] = isq;
        chi_star[(3, col)] = sign * isq;
    }
    // chi_3 = (0, 1, r, 0)/(1+r^2), chi_4 = (0, -r, 1, 0)/(1+r^2); the
    // adjoint pair carries conj(r) and absorbs no normalization.
    for (col, top, bot) in [(2_usize, c, c * r), (3, -c * r, c)] {
        chi[(1, col)] = top;
        chi[(2, col)] = bot;
    }
    let rc = r.conj();
    chi_star[(1, 2)] = C64::new(1.0, 0.0);
    chi_star[(2, 2)] = rc;
    chi_star[(1, 3)] = -rc;
    chi_star[(2, 3)] = C64::new(1.0, 0.0);
    Ok(SpinBosonSolution {
        xi0,
        sigma: cp.sigma(),
        lambda: cp.lambda(),
        gamma,
        gamma_star: gs,
        w,
        r,
        chi,
        chi_star,
        regime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array1;
    use ndarray_linalg::EigVals;

    fn cp(sigma: f64, lambda: f64) -> CouplingParams {
        CouplingParams::new(sigma, lambda).unwrap()
    }

    #[test]
    fn w_matrix_structure() {
        let xi0 = 1.7;
        let c = cp(0.3, 0.2);
        let w = w_matrix(&c, xi0);
        let mu = 0.25 * 0.04 * PI * xi0;
        // Trace is 4 i mu = i lambda^2 pi xi0.
        let tr: C64 = (0..4).map(|i| w[(i, i)]).sum();
        assert!((tr - C64::new(0.0, 0.04 * PI * xi0)).norm() < 1e-15);
        // Hermitian part is the level splitting alone.
        let herm = (&w + &w.t().mapv(|z| z.conj())).mapv(|z| 0.5 * z);
        for (i, want) in [(0, 0.0), (1, 0.3), (2, -0.3), (3, 0.0)] {
            assert!((herm[(i, i)] - C64::new(want, 0.0)).norm() < 1e-15);
        }
        // Anti-diagonal carries -i mu.
        for (i, j) in [(0, 3), (1, 2), (2, 1), (3, 0)] {
            assert!((w[(i, j)] - C64::new(0.0, -mu)).norm() < 1e-15);
        }
    }

    #[test]
    fn closed_eigenvalues_match_dense_solver() {
        for &xi0 in &[1.0, 4.0 * PI, 10.0] {
            for &lambda in &[0.05, 0.1, 0.2] {
                let gs = gamma_star(xi0);
                for &f in &[0.01, 0.5, 0.99, 1.5, 100.0] {
                    let sigma = f * gs * lambda * lambda;
                    let c = cp(sigma, lambda);
                    let closed = w_closed(&c, xi0);
                    let numeric = w_matrix(&c, xi0).eigvals().unwrap();
                    let dev =
                        crate::oracle::spectrum_distance(&closed, &numeric.to_vec());
                    let scale = closed.iter().fold(1e-300_f64, |m, z| m.max(z.norm()));
                    assert!(
                        dev <= 1e-10 * scale,
                        "xi0={xi0}, lambda={lambda}, f={f}: deviation {dev:.3e}"
                    );
                }
            }
        }
    }

    #[test]
    fn sigma_zero_spectrum_degenerates_in_pairs() {
        let xi0 = 2.0;
        let c = cp(0.0, 0.1);
        let closed = w_closed(&c, xi0);
        let mu = 0.25 * 0.01 * PI * xi0;
        assert_eq!(closed[0], C64::new(0.0, 0.0));
        assert!((closed[1] - C64::new(0.0, 2.0 * mu)).norm() < 1e-16);
        assert!((closed[2] - C64::new(0.0, 2.0 * mu)).norm() < 1e-16);
        assert!(closed[3].norm() < 1e-16);
    }

    #[test]
    fn eigenpairs_satisfy_defining_relations() {
        let xi0 = 3.0;
        let gs = gamma_star(xi0);
        for &f in &[0.05, 0.7, 2.0, 30.0] {
            let lambda = 0.15;
            let c = cp(f * gs * lambda * lambda, lambda);
            let sol = w_eigenpairs(&c, xi0).unwrap();
            let w = w_matrix(&c, xi0);
            let wh = w.t().mapv(|z| z.conj());
            let scale = sol.w().iter().fold(1e-300_f64, |m, z| m.max(z.norm()));
            for j in 0..4 {
                let chi_j: Array1<C64> = sol.chi().column(j).to_owned();
                let res = &w.dot(&chi_j) - &chi_j.mapv(|z| z * sol.w()[j]);
                let rn = res.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
                assert!(rn < 1e-12 * scale.max(1.0), "right residual {rn:.3e} (f={f})");
                let chis_j: Array1<C64> = sol.chi_star().column(j).to_owned();
                let res = &wh.dot(&chis_j) - &chis_j.mapv(|z| z * sol.w()[j].conj());
                let rn = res.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
                assert!(rn < 1e-12 * scale.max(1.0), "left residual {rn:.3e} (f={f})");
            }
            // Biorthogonality <chi_i, chi_j*> = delta_ij.
            for i in 0..4 {
                for j in 0..4 {
                    let dot: C64 = (0..4)
                        .map(|k| sol.chi()[(k, i)].conj() * sol.chi_star()[(k, j)])
                        .sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (dot - C64::new(want, 0.0)).norm() < 1e-12,
                        "<chi_{i}, chi*_{j}> = {dot}"
                    );
                }
            }
        }
    }

    #[test]
    fn mixing_ratio_limits() {
        let xi0 = 4.0 * PI;
        let gs = gamma_star(xi0);
        let lambda = 0.1;
        // Deep overlap: r -> -1.
        let r = r_closed(&cp(1e-6 * gs * lambda * lambda, lambda), xi0);
        assert!((r - C64::new(-1.0, 0.0)).norm() < 1e-5);
        // Deep isolation: r -> -i * infinity direction.
        let r = r_closed(&cp(100.0 * gs * lambda * lambda, lambda), xi0);
        assert!(r.re.abs() < 1e-12);
        assert!(r.im < -100.0);
        // Exceptional point: r = -i exactly in the limit.
        let r = r_closed(&cp(gs * lambda * lambda, lambda), xi0);
        assert!((r - C64::new(0.0, -1.0)).norm() < 1e-7);
    }

    #[test]
    fn overlapping_trajectories_move_along_imaginary_axis() {
        let xi0 = 2.5;
        let gs = gamma_star(xi0);
        let lambda = 0.2;
        let mut last_w3 = f64::INFINITY;
        let mut last_w4 = -f64::INFINITY;
        for k in 1..20 {
            let f = k as f64 / 20.0;
            let w = w_closed(&cp(f * gs * lambda * lambda, lambda), xi0);
            assert!(w[2].re.abs() < 1e-15 && w[3].re.abs() < 1e-15);
            assert!(w[2].im < last_w3, "Im w_3 must decrease");
            assert!(w[3].im > last_w4, "Im w_4 must increase");
            last_w3 = w[2].im;
            last_w4 = w[3].im;
        }
        // Isolated: imaginary parts pin to the plateau, real parts split.
        let w = w_closed(&cp(3.0 * gs * lambda * lambda, lambda), xi0);
        let mu = 0.25 * lambda * lambda * PI * xi0;
        assert!((w[2].im - mu).abs() < 1e-15 && (w[3].im - mu).abs() < 1e-15);
        assert!(w[2].re < 0.0 && w[3].re > 0.0 || w[2].re > 0.0 && w[3].re < 0.0);
    }

    #[test]
    fn regime_classification_and_exceptional_point() {
        let xi0 = 1.0;
        let gs = gamma_star(xi0);
        let lambda = 0.1;
        assert_eq!(classify(0.5 * gs, gs), Regime::Overlapping);
        assert_eq!(classify(2.0 * gs, gs), Regime::Isolated);
        assert_eq!(classify(gs + 5e-13, gs), Regime::Critical);
        let c = cp(gs * lambda * lambda, lambda);
        match w_eigenpairs(&c, xi0) {
            Err(Error::ExceptionalPoint { gamma }) => {
                assert!((gamma - gs).abs() <= 1e-12);
            }
            other => panic!("expected the exceptional point, got {other:?}"),
        }
    }

    #[test]
    fn reduced_dynamics_fixed_point_and_trace() {
        let xi0 = 4.0 * PI;
        let lambda = 0.1;
        let sol = w_eigenpairs(&cp(0.02, lambda), xi0).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        for &t in &[0.0, 3.0, 50.0] {
            let rho = sol.rho_t_energy_basis(&mixed, t);
            let dev = crate::model::max_abs(&(&rho - mixed.matrix()));
            assert!(dev < 1e-15, "maximally mixed must be a fixed point");
        }
        let rho0 = DensityMatrix::new(array![
            [C64::new(0.7, 0.0), C64::new(0.2, 0.1)],
            [C64::new(0.2, -0.1), C64::new(0.3, 0.0)]
        ])
        .unwrap();
        for &t in &[0.1, 1.0, 10.0, 200.0] {
            let rho = sol.rho_t_energy_basis(&rho0, t);
            let tr = rho[(0, 0)] + rho[(1, 1)];
            assert_eq!(tr, C64::new(1.0, 0.0), "trace is preserved exactly");
            assert_eq!(rho[(1, 0)], rho[(0, 1)].conj());
        }
    }

    #[test]
    fn real_coherence_collapses_to_two_exponential_display() {
        let xi0 = 2.0;
        let lambda = 0.15;
        let sol = w_eigenpairs(&cp(0.007, lambda), xi0).unwrap();
        let rho0 = DensityMatrix::new(array![
            [C64::new(0.6, 0.0), C64::new(0.25, 0.0)],
            [C64::new(0.25, 0.0), C64::new(0.4, 0.0)]
        ])
        .unwrap();
        let r = sol.r();
        for &t in &[0.4, 2.7, 13.0] {
            let rho = sol.rho_t_energy_basis(&rho0, t);
            let e3 = (C64::i() * t * sol.w()[2]).exp();
            let e4 = (C64::i() * t * sol.w()[3]).exp();
            let display = (r / (r * r + 1.0))
                * ((1.0 + r) * e3 + (1.0 / r - 1.0) * e4)
                * C64::new(0.25, 0.0);
            assert!((rho[(0, 1)] - display).norm() < 1e-14);
        }
    }

    #[test]
    fn long_time_decay_follows_decoherence_rate() {
        let xi0 = 4.0 * PI;
        let lambda = 0.1;
        let gs = gamma_star(xi0);
        let sol = w_eigenpairs(&cp(0.05 * gs * lambda * lambda, lambda), xi0).unwrap();
        let rho0 = DensityMatrix::new(array![
            [C64::new(0.5, 0.0), C64::new(0.5, 0.0)],
            [C64::new(0.5, 0.0), C64::new(0.5, 0.0)]
        ])
        .unwrap();
        let rate = sol.decoherence_rate();
        // |rho_+-| ~ C e^{-rate t} at large t: compare log-slopes.
        let t1 = 4.0 / rate;
        let t2 = 8.0 / rate;
        let a1 = sol.rho_t_energy_basis(&rho0, t1)[(0, 1)].norm();
        let a2 = sol.rho_t_energy_basis(&rho0, t2)[(0, 1)].norm();
        let slope = (a1 / a2).ln() / (t2 - t1);
        assert!(
            (slope - rate).abs() < 0.02 * rate,
            "measured slope {slope:.6e} vs rate {rate:.6e}"
        );
    }

    #[test]
    fn decoherence_rate_asymptotics() {
        let xi0 = 4.0 * PI;
        let gs = gamma_star(xi0);
        let lambda = 0.1;
        // Deep overlap: rate ~ (2/(pi xi0)) sigma^2/lambda^2.
        let sigma = 0.01 * gs * lambda * lambda;
        let sol = w_eigenpairs(&cp(sigma, lambda), xi0).unwrap();
        let want = 2.0 / (PI * xi0) * sigma * sigma / (lambda * lambda);
        let got = sol.decoherence_rate();
        assert!((got - want).abs() < 0.01 * want, "overlap asymptote: {got} vs {want}");
        // Isolation: rate = (pi xi0 / 4) lambda^2 exactly.
        let sol = w_eigenpairs(&cp(100.0 * gs * lambda * lambda, lambda), xi0).unwrap();
        let want = 0.25 * PI * xi0 * lambda * lambda;
        assert!((sol.decoherence_rate() - want).abs() < 1e-15 * want);
    }
}
