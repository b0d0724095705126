//! Exact dephasing at `sigma = 0`: decoherence function, phase function, and
//! the long-time linear law.
//!
//! With no energy exchange the populations freeze and each coherence obeys
//! `[rho_t]_{a,b} = [rho_0]_{a,b} e^{i lambda^2 alpha_{a,b}(t)}` with
//! `alpha_{a,b}(t) = (g_a^2 - g_b^2) S(t) + i (g_a - g_b)^2 Gamma(t)` — exact
//! to all orders in `lambda`. For the critical infrared family `Gamma(t)`
//! grows linearly, `Gamma(t)/t -> (pi/2) xi(0)`, so every coherence decays
//! exponentially at late times. Run with:
//!
//! ```text
//! cargo run --example dephasing_trace
//! ```

use ndarray::array;
use resodyn::bath::BathFunctions;
use resodyn::dynamics::{manifold_distance, DephasingPropagator};
use resodyn::model::{BathParams, CouplingParams, DensityMatrix, FormFactor, SystemSpec};
use resodyn::quad::QuadConfig;
use resodyn::C64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let hs = array![
        [C64::new(0.0, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.5, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)],
        [C64::new(0.0, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 0.0)]
    ];
    let spec = SystemSpec::new(hs, array![0.5, 1.0, 2.0])?;
    let bath = BathParams::new(1.0)?;
    let ff = FormFactor::new(-0.5, 1.0, 1, 4.0 * std::f64::consts::PI, &bath)?;
    let bf = BathFunctions::new(&bath, &ff, &QuadConfig::default())?;
    let cp = CouplingParams::new(0.0, 0.15)?;
    let prop = DephasingPropagator::new(&spec, &bf, &cp)?;

    // Start from the state of maximal coherence.
    let amp = C64::new(1.0 / 3f64.sqrt(), 0.0);
    let rho0 = DensityMatrix::pure(&array![amp, amp, amp])?;

    println!("bath functions and coherence decay (lambda = {}):\n", cp.lambda());
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>12} {:>12} {:>14}",
        "t", "Gamma(t)", "S(t)", "|rho_01|", "|rho_02|", "|rho_12|", "manifold dist"
    );
    for &t in &[0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0] {
        let rho_t = prop.propagate(&rho0, t)?;
        let m = rho_t.matrix();
        println!(
            "{:>8.1} {:>12.6} {:>12.6} {:>12.3e} {:>12.3e} {:>12.3e} {:>14.3e}",
            t,
            bf.gamma_t(t)?,
            bf.s_t(t)?,
            m[(0, 1)].norm(),
            m[(0, 2)].norm(),
            m[(1, 2)].norm(),
            manifold_distance(&rho_t)
        );
    }

    // The slope of Gamma settles on (pi/2) xi(0); with it, each coherence
    // ends up decaying at rate lambda^2 (g_a - g_b)^2 (pi/2) xi(0).
    let slope_limit = bf.gamma_infinity();
    println!("\nGamma(t)/t vs the linear-growth limit (pi/2) xi(0) = {slope_limit:.9}:");
    for &t in &[10.0, 50.0, 200.0] {
        let slope = bf.gamma_t(t)? / t;
        println!(
            "  t = {t:>5}: Gamma/t = {slope:.9}  (deficit {:.2}%)",
            100.0 * (1.0 - slope / slope_limit)
        );
    }
    let g = spec.g_levels();
    println!("\nasymptotic coherence decay rates lambda^2 (g_a-g_b)^2 (pi/2) xi(0):");
    for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let rate = cp.lambda() * cp.lambda() * (g[a] - g[b]).powi(2) * slope_limit;
        println!("  ({a},{b}): {rate:.6e}");
    }
    Ok(())
}
