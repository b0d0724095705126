//! Population relaxation through the eigenchannels of the T matrix.
//!
//! At small `sigma` the populations decouple from the coherences and relax as
//! `p(t) = e^{-2 t (sigma^2/lambda^2) T} p(0)`: the real symmetric PSD matrix
//! `T` has a simple zero eigenvalue with the uniform eigenvector (the
//! stationary state) and positive eigenvalues `xi_2 <= ... <= xi_N` that set
//! the relaxation rates. This example prints the channel decomposition,
//! propagates an initially inverted population, and cross-checks the channel
//! formula against a dense matrix exponential. Run with:
//!
//! ```text
//! cargo run --example population_relaxation
//! ```

use ndarray::array;
use resodyn::bath::BathFunctions;
use resodyn::dynamics::PerturbativePropagator;
use resodyn::model::{BathParams, CouplingParams, DensityMatrix, FormFactor, SystemSpec};
use resodyn::oracle::expm_real;
use resodyn::quad::QuadConfig;
use resodyn::C64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let hs = array![
        [C64::new(0.0, 0.0), C64::new(0.4, 0.1), C64::new(0.2, 0.0)],
        [C64::new(0.4, -0.1), C64::new(0.3, 0.0), C64::new(0.5, -0.2)],
        [C64::new(0.2, 0.0), C64::new(0.5, 0.2), C64::new(-0.3, 0.0)]
    ];
    let spec = SystemSpec::new(hs, array![0.4, 1.0, 1.9])?;
    let bath = BathParams::new(1.0)?;
    let ff = FormFactor::new(-0.5, 1.0, 1, 4.0 * std::f64::consts::PI, &bath)?;
    let bf = BathFunctions::new(&bath, &ff, &QuadConfig::default())?;
    let cp = CouplingParams::new(0.02, 0.2)?;
    let prop = PerturbativePropagator::new(&spec, &bf, &cp)?;

    let t_matrix = prop.relaxation();
    println!("relaxation matrix T (zero row sums, PSD):");
    for a in 0..3 {
        println!(
            "  [{:>12.6} {:>12.6} {:>12.6}]",
            t_matrix.matrix()[(a, 0)],
            t_matrix.matrix()[(a, 1)],
            t_matrix.matrix()[(a, 2)]
        );
    }
    let scale = 2.0 * cp.sigma() * cp.sigma() / (cp.lambda() * cp.lambda());
    println!("\nchannels (rate = 2 (sigma^2/lambda^2) xi):");
    for (c, &xi) in t_matrix.xi().iter().enumerate() {
        let rate = scale * xi;
        if c == 0 {
            println!("  xi_1 = {xi:+.3e}  -> stationary channel (uniform populations)");
        } else {
            println!(
                "  xi_{} = {xi:+.3e}  -> rate {rate:.3e}, half-life {:.1}",
                c + 1,
                std::f64::consts::LN_2 / rate
            );
        }
    }

    // Fully inverted start: everything in the top level.
    let rho0 = DensityMatrix::pure(&array![
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0)
    ])?;
    let p0 = rho0.populations();

    println!("\npopulation trace from p(0) = (0, 0, 1):");
    println!(
        "{:>10} {:>12} {:>12} {:>12} {:>14}",
        "t", "p_1", "p_2", "p_3", "|channel-expm|"
    );
    let horizon = std::f64::consts::LN_2 / (scale * t_matrix.xi()[1]) * 8.0;
    for k in 0..8 {
        let t = horizon * k as f64 / 7.0;
        let via_expm = expm_real(&t_matrix.matrix().mapv(|x| -scale * t * x)).dot(&p0);
        let p: Vec<f64> = (0..3).map(|a| prop.reduced_diag(&rho0, t, a)).collect();
        let defect = (0..3).map(|a| (p[a] - via_expm[a]).abs()).fold(0.0, f64::max);
        println!(
            "{:>10.1} {:>12.6} {:>12.6} {:>12.6} {:>14.3e}",
            t, p[0], p[1], p[2], defect
        );
    }
    println!("\nall rows sum to 1 and tend to the uniform stationary state 1/3.");
    Ok(())
}
