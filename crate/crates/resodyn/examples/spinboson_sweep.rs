//! Two-level resonance trajectories across the regime transition.
//!
//! Sweeps the ratio `gamma = sigma/lambda^2` through the transition value
//! `gamma* = pi xi(0)/4` and tabulates the two mixing resonances `w_3`, `w_4`
//! and the eigenvector ratio `r`. Below `gamma*` the pair sits on the
//! imaginary axis (pure decay at two different rates); above it the
//! imaginary parts lock to the common plateau `(pi xi(0)/4) lambda^2` and the
//! resonances move apart horizontally (they acquire frequencies). Run with:
//!
//! ```text
//! cargo run --example spinboson_sweep
//! ```

use resodyn::model::{BathParams, CouplingParams, FormFactor};
use resodyn::quad::QuadConfig;
use resodyn::spin_boson::{classify, gamma_star, r_closed, w_closed, w_eigenpairs};
use resodyn::bath::BathFunctions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Critical infrared bath: g(k) = |k|^{-1/2} e^{-|k|}, beta = 1, isotropic.
    let bath = BathParams::new(1.0)?;
    let ff = FormFactor::new(-0.5, 1.0, 1, 4.0 * std::f64::consts::PI, &bath)?;
    let bf = BathFunctions::new(&bath, &ff, &QuadConfig::default())?;
    let xi0 = bf.xi0();
    let gs = gamma_star(xi0);
    let lambda = 0.1;

    println!("xi(0)   = {xi0:.12}");
    println!("gamma*  = pi xi(0)/4 = {gs:.12}");
    println!("lambda  = {lambda}\n");

    println!(
        "{:>12} {:>13} {:>12} {:>12} {:>12} {:>12} {:>8} {:>12}",
        "gamma/gamma*", "re_w3", "im_w3", "re_w4", "im_w4", "re_r", "im_r", "regime"
    );
    for k in 0..13 {
        // Log-spaced from 0.01 gamma* to 100 gamma*.
        let f = 0.01 * 10f64.powf(k as f64 / 3.0);
        let gamma = f * gs;
        let cp = CouplingParams::new(gamma * lambda * lambda, lambda)?;
        let w = w_closed(&cp, xi0);
        let r = r_closed(&cp, xi0);
        let regime = classify(gamma, gs);
        println!(
            "{:>12.4} {:>13.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4} {:>8.4} {:>12}",
            f,
            w[2].re,
            w[2].im,
            w[3].re,
            w[3].im,
            r.re,
            r.im,
            regime.as_str()
        );
    }

    // Away from gamma*, the full eigensystem exists; show the decay rate it
    // predicts against the two asymptotic laws.
    println!("\ndecoherence rate vs. its two asymptotes:");
    for (f, law, name) in [
        (0.01, 2.0 / (std::f64::consts::PI * xi0), "2 sigma^2 / (pi xi(0) lambda^2)"),
        (100.0, 0.25 * std::f64::consts::PI * xi0 * lambda * lambda, "(pi xi(0)/4) lambda^2"),
    ] {
        let gamma = f * gs;
        let cp = CouplingParams::new(gamma * lambda * lambda, lambda)?;
        let sol = w_eigenpairs(&cp, xi0)?;
        let rate = sol.decoherence_rate();
        let asym = if f < 1.0 {
            law * cp.sigma() * cp.sigma() / (lambda * lambda)
        } else {
            law
        };
        println!(
            "  gamma = {:>6.2} gamma*: rate = {rate:.6e}, {name} = {asym:.6e}  ({:+.3}%)",
            f,
            100.0 * (rate / asym - 1.0)
        );
    }
    Ok(())
}
