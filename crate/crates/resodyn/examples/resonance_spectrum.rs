//! Labeled resonance spectrum of the effective operator, with its
//! second-order perturbative expansion as a cross-check.
//!
//! Builds a three-level system, computes the exact eigenvalues of
//! `sigma L_S + lambda^2 diag(delta)` with continuation labels `(a, b)`, and
//! compares each off-diagonal resonance against the closed second-order
//! formula `eta_{a,b}` (the residual is O(sigma^3)). Diagonal-sector
//! resonances are compared against `2i (sigma^2/lambda^2) xi_a` built from
//! the relaxation matrix. Run with:
//!
//! ```text
//! cargo run --example resonance_spectrum
//! ```

use ndarray::array;
use resodyn::bath::BathFunctions;
use resodyn::model::{check_a3, check_a4, BathParams, CouplingParams, FormFactor, SystemSpec};
use resodyn::quad::QuadConfig;
use resodyn::resonances::{effective_operator, eps_a_approx, eta_ab, resonances_numeric};
use resodyn::C64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let hs = array![
        [C64::new(0.20, 0.0), C64::new(0.35, 0.10), C64::new(0.15, -0.05)],
        [C64::new(0.35, -0.10), C64::new(-0.40, 0.0), C64::new(0.25, 0.20)],
        [C64::new(0.15, 0.05), C64::new(0.25, -0.20), C64::new(0.55, 0.0)]
    ];
    let spec = SystemSpec::new(hs, array![0.3, 0.8, 1.6])?;
    let bath = BathParams::new(1.0)?;
    let ff = FormFactor::new(-0.5, 1.0, 1, 4.0 * std::f64::consts::PI, &bath)?;
    let bf = BathFunctions::new(&bath, &ff, &QuadConfig::default())?;
    let cp = CouplingParams::new(2e-4, 0.2)?;

    // The perturbative formulas assume pairwise-distinct resonance energies
    // (A3) and strictly decaying, coupled pairs (A4); both are checkable.
    let a3 = check_a3(&spec, &bf);
    let a4 = check_a4(&spec, &bf);
    println!("A3 (pairwise distinct delta): {}", if a3.holds { "holds" } else { "violated" });
    println!("A4 (decay on every coupled pair): {}\n", if a4.holds { "holds" } else { "violated" });

    let op = effective_operator(&spec, &bf, &cp);
    let spectrum = resonances_numeric(&op)?;
    println!(
        "labeled spectrum at sigma = {:.1e}, lambda = {} (biorthogonality residual {:.1e}):",
        cp.sigma(),
        cp.lambda(),
        spectrum.biortho_residual()
    );
    println!(
        "{:>6} {:>24} {:>24} {:>12}",
        "(a,b)", "eps_num", "second-order", "|residual|"
    );
    for (&(a, b), &eps) in spectrum.labels().iter().zip(spectrum.eigenvalues()) {
        let approx = if a == b {
            eps_a_approx(&spec, &bf, &cp, a)?
        } else {
            eta_ab(&spec, &bf, &cp, a, b)?
        };
        println!(
            "  ({a},{b}) {:>+11.4e}{:+.4e}i {:>+11.4e}{:+.4e}i {:>12.3e}",
            eps.re,
            eps.im,
            approx.re,
            approx.im,
            (eps - approx).norm()
        );
    }

    println!("\nevery decay rate is nonnegative: Im eps >= -1e-10 enforced by construction;");
    println!("halving sigma shrinks the residuals by ~8x (third-order remainder).");
    Ok(())
}
