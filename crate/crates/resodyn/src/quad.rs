//! Adaptive Gauss–Kronrod quadrature and the stable scalar kernels used by
//! the bath integrals.
//!
//! The integrator is a 7-point Gauss / 15-point Kronrod pair with the
//! classical QUADPACK error rescaling, driven by a worst-panel-first priority
//! queue. Callers with hard-to-sample integrands (Lorentzian spikes,
//! oscillations of known period) seed the initial panel list explicitly via
//! [`integrate_seeded`]; an optional maximum panel width keeps every
//! oscillation resolved instead of trusting the error estimate on aliased
//! panels.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Tolerances and tail-cutoff control for all quadratures in a run.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct QuadConfig {
    /// Relative tolerance on each integral.
    pub rel_tol: f64,
    /// Absolute tolerance floor (also sets the tail-truncation target).
    pub abs_tol: f64,
    /// Multiplier applied to the automatically determined radial cutoff.
    pub r_max_factor: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            r_max_factor: 1.0,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(Error::config("quadrature.rel_tol", "must be finite and > 0"));
        }
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(Error::config("quadrature.abs_tol", "must be finite and > 0"));
        }
        if !(self.r_max_factor.is_finite() && self.r_max_factor >= 1.0) {
            return Err(Error::config("quadrature.r_max_factor", "must be finite and >= 1"));
        }
        Ok(())
    }
}

/// Integral estimate with its error bound and the number of panels used.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

// Nodes of the 15-point Kronrod rule on [-1, 1]; odd-indexed entries (and the
// midpoint) are the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

// Weights of the 7-point Gauss rule (for XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

// Weights of the 15-point Kronrod rule.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// QUADPACK error rescaling: inflate the raw Gauss/Kronrod difference onto a
/// scale set by the integral of |f - mean| and floor it at roundoff level.
fn rescale_error(err: f64, result_abs: f64, result_asc: f64) -> f64 {
    let err = err.abs();
    let mut scaled = err;
    if result_asc != 0.0 && err != 0.0 {
        scaled = result_asc * 1.0_f64.min((200.0 * err / result_asc).powf(1.5));
    }
    if result_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * result_abs);
    }
    scaled
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // NaN errors are rejected before construction, so total order is safe.
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Apply the G7-K15 pair on [lo, hi].
fn qk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<Panel> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let f_center = f(center);
    let mut fv1 = [0.0_f64; 7];
    let mut fv2 = [0.0_f64; 7];

    // Gauss contribution: odd Kronrod nodes plus the midpoint.
    let mut res_gauss = WG[3] * f_center;
    let mut res_kronrod = WGK[7] * f_center;
    let mut res_abs = res_kronrod.abs();

    for j in 0..3 {
        let idx = 2 * j + 1;
        let dx = half * XGK[idx];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[idx] = f1;
        fv2[idx] = f2;
        res_gauss += WG[j] * (f1 + f2);
        res_kronrod += WGK[idx] * (f1 + f2);
        res_abs += WGK[idx] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let idx = 2 * j;
        let dx = half * XGK[idx];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[idx] = f1;
        fv2[idx] = f2;
        res_kronrod += WGK[idx] * (f1 + f2);
        res_abs += WGK[idx] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for idx in 0..7 {
        res_asc += WGK[idx] * ((fv1[idx] - mean).abs() + (fv2[idx] - mean).abs());
    }

    let value = res_kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let raw_err = ((res_kronrod - res_gauss) * half).abs();
    let error = rescale_error(raw_err, res_abs, res_asc);

    if !value.is_finite() || !error.is_finite() {
        return Err(Error::DivergentIntegral(format!(
            "non-finite integrand sample on [{lo:.6e}, {hi:.6e}]"
        )));
    }
    Ok(Panel { lo, hi, value, error })
}

/// Refinement budget on top of the seeded panels.
const MAX_REFINEMENTS: usize = 4000;
/// Hard cap on the seeded panel count (guards absurd width requests).
const MAX_SEED_PANELS: usize = 262_144;

/// Integrate `f` over `[a, b]` with a single initial panel.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<Estimate> {
    integrate_seeded(f, &[a, b], cfg, None)
}

/// Integrate `f` over `[breakpoints[0], breakpoints[last]]` starting from one
/// panel per consecutive breakpoint pair, each split further so that no panel
/// is wider than `max_width` (if given). Breakpoints must be finite and
/// strictly increasing.
pub fn integrate_seeded<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    cfg: &QuadConfig,
    max_width: Option<f64>,
) -> Result<Estimate> {
    assert!(breakpoints.len() >= 2, "need at least two breakpoints");
    let span = breakpoints[breakpoints.len() - 1] - breakpoints[0];
    assert!(span > 0.0 && span.is_finite(), "breakpoints must increase");

    // Build the seed panel edges.
    let mut edges: Vec<(f64, f64)> = Vec::new();
    for w in breakpoints.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        assert!(hi > lo, "breakpoints must be strictly increasing");
        let pieces = match max_width {
            Some(wmax) if wmax > 0.0 && (hi - lo) > wmax => ((hi - lo) / wmax).ceil() as usize,
            _ => 1,
        };
        if edges.len() + pieces > MAX_SEED_PANELS {
            return Err(Error::NoConvergence {
                what: "quadrature panelization".into(),
                residual: (edges.len() + pieces) as f64,
                tolerance: MAX_SEED_PANELS as f64,
            });
        }
        let step = (hi - lo) / pieces as f64;
        for k in 0..pieces {
            let p_lo = lo + step * k as f64;
            let p_hi = if k + 1 == pieces { hi } else { lo + step * (k + 1) as f64 };
            edges.push((p_lo, p_hi));
        }
    }

    let mut heap: BinaryHeap<Panel> = BinaryHeap::with_capacity(edges.len());
    let mut frozen: Vec<Panel> = Vec::new(); // too narrow to split further
    let mut total_value = 0.0;
    let mut total_error = 0.0;
    for (lo, hi) in edges {
        let p = qk15(&f, lo, hi)?;
        total_value += p.value;
        total_error += p.error;
        heap.push(p);
    }

    let min_width = 50.0 * f64::EPSILON * span;
    let mut refinements = 0;
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total_value.abs());
        if total_error <= tol {
            break;
        }
        if refinements >= MAX_REFINEMENTS {
            return Err(Error::NoConvergence {
                what: "adaptive quadrature refinement".into(),
                residual: total_error,
                tolerance: tol,
            });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => {
                // Every panel is frozen at roundoff width.
                return Err(Error::NoConvergence {
                    what: "adaptive quadrature (roundoff-limited)".into(),
                    residual: total_error,
                    tolerance: tol,
                });
            }
        };
        if worst.hi - worst.lo <= min_width {
            frozen.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = qk15(&f, worst.lo, mid)?;
        let right = qk15(&f, mid, worst.hi)?;
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        refinements += 1;
    }

    // Recompute the sums from the surviving panels to shed accumulation drift.
    let mut value = 0.0;
    let mut error = 0.0;
    let mut panels = 0;
    for p in heap.iter().chain(frozen.iter()) {
        value += p.value;
        error += p.error;
        panels += 1;
    }
    Ok(Estimate { value, error, panels })
}

/// Radial cutoff for form-factor-weighted integrals: the smallest `R` past
/// the integrand's peak with `R^(2p+2) * exp(-2aR^m) <= abs_tol * 1e-3`,
/// scaled by `r_max_factor`. The exponent `2p+2` majorizes the radial growth
/// of every integrand in this crate, so truncating at `R` keeps the dropped
/// tail below the quadrature's own tolerance.
pub fn tail_cutoff(p: f64, decay_a: f64, decay_m: u32, cfg: &QuadConfig) -> f64 {
    let target = (cfg.abs_tol * 1e-3).max(1e-300).ln();
    let s = 2.0 * p + 2.0;
    let m = decay_m as f64;
    // log of the envelope; strictly decreasing past the peak.
    let h = |r: f64| -> f64 { s * r.ln() - 2.0 * decay_a * r.powf(m) };
    let peak = if s > 0.0 { (s / (2.0 * decay_a * m)).powf(1.0 / m) } else { 0.0 };
    let mut lo = peak.max(1.0);
    let mut hi = lo;
    for _ in 0..600 {
        if h(hi) <= target {
            break;
        }
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi * cfg.r_max_factor
}

// ---------------------------------------------------------------------------
// Stable scalar kernels
// ---------------------------------------------------------------------------

/// `r * coth(beta r / 2)`, continuous at `r = 0` where it equals `2/beta`.
/// The series branch keeps full accuracy where `tanh` underflows relatively.
pub fn r_coth_half_beta(r: f64, beta: f64) -> f64 {
    if r < 1e-6 / beta {
        let x = 0.5 * beta * r;
        let x2 = x * x;
        (2.0 / beta) * (1.0 + x2 / 3.0 - x2 * x2 / 45.0)
    } else {
        r / (0.5 * beta * r).tanh()
    }
}

/// `sin(x) / x`, continuous at zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `(x - sin x) / x^3`, continuous at zero (value 1/6). The direct form loses
/// `~6*eps/x^2` relative accuracy near zero, which would dominate a 1e-10
/// relative quadrature tolerance; the series branch extends to |x| < 0.1.
pub fn x_minus_sin_over_x3(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        1.0 / 6.0 - x2 / 120.0 + x2 * x2 / 5040.0 - x2 * x2 * x2 / 362_880.0
    } else {
        (x - x.sin()) / (x * x * x)
    }
}

/// Gamma function via the Lanczos approximation (g = 7, 9 terms), with the
/// reflection formula for arguments below 1/2. Relative accuracy ~1e-15 on
/// the positive real axis, which is all this crate needs (closed forms of
/// radial moments).
pub fn gamma_fn(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_fn(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = COEF[0];
        for (i, c) in COEF.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + G + 0.5;
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}
