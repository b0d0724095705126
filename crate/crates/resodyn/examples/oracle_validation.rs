//! The cross-check suite: every derived quantity against an independent
//! route.
//!
//! Quadrature-based bath functions are pitted against 2000-mode discrete
//! sums; the dephasing formula against exact unitary evolution in a truncated
//! Fock space; the dense eigensolver against characteristic-polynomial roots;
//! closed-form two-level resonances against the dense spectrum of `W`; the
//! effective operator's diagonal against the `delta` table; population
//! channels against a scaling-squaring matrix exponential. The same suite
//! backs `resodyn oracle-validate`. Run with:
//!
//! ```text
//! cargo run --example oracle_validation
//! ```

use resodyn::bath::BathFunctions;
use resodyn::model::{BathParams, FormFactor};
use resodyn::oracle::validation_suite;
use resodyn::quad::QuadConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bath = BathParams::new(1.0)?;
    let ff = FormFactor::new(-0.5, 1.0, 1, 4.0 * std::f64::consts::PI, &bath)?;
    let bf = BathFunctions::new(&bath, &ff, &QuadConfig::default())?;

    let report = validation_suite(&bf, &ff, 1.0)?;
    println!(
        "{:<42} {:>12} {:>10} {:>6}",
        "check", "max error", "tolerance", "pass"
    );
    for c in &report.checks {
        println!(
            "{:<42} {:>12.3e} {:>10.0e} {:>6}",
            c.name,
            c.max_error,
            c.tolerance,
            if c.pass { "yes" } else { "NO" }
        );
    }
    println!(
        "\n{}",
        if report.all_pass {
            "all independent routes agree within tolerance."
        } else {
            "DISAGREEMENT between independent routes — do not trust results."
        }
    );
    std::process::exit(if report.all_pass { 0 } else { 1 });
}
