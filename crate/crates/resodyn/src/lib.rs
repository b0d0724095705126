//! Resonance spectra and reduced dynamics of an N-level quantum system coupled
//! to a thermal Bose field.
//!
//! The model is a finite-dimensional system with Hamiltonian
//! `sigma*H_S + lambda*G`, where `G = diag(g_1, ..., g_N)` commutes with the
//! system-bath coupling (energy-conserving channel, strength `lambda`) and
//! `H_S` exchanges energy between levels (strength `sigma`). The bath is a
//! free Bose field at inverse temperature `beta` with a rotation-invariant
//! form factor `g(k) = |k|^p * exp(-a|k|^m) * g_1(angles)`.
//!
//! The crate computes, for any ratio of the two couplings:
//!
//! - the complex **resonance energies** `eps_{a,b}(sigma, lambda)` of the
//!   doubled (Liouville) generator, by numerically continued dense
//!   eigendecomposition of the effective operator
//!   `sigma*L_S + lambda^2*diag(delta)` ([`resonances`]);
//! - their **second-order perturbative expansions** `eta_{a,b}` and the real
//!   symmetric **relaxation generator** `T` whose spectrum `xi_a` drives
//!   population dynamics ([`resonances`]);
//! - the **bath spectral integrals** behind all of the above: the infrared
//!   inner product `<g, |k|^{-1} g>`, the regularized zero-frequency spectral
//!   density `xi(0)`, and the exact dephasing functions `Gamma(t)`, `S(t)`
//!   ([`bath`]);
//! - **reduced dynamics**: exact (all orders in `lambda`) dephasing at
//!   `sigma = 0`, and the leading-order propagator for off-diagonals and
//!   populations at small `sigma`, together with trace-norm distance to the
//!   decoherence manifold ([`dynamics`]);
//! - the **spin-boson specialization** (N = 2): closed-form 4x4 resonance
//!   matrix `W`, its eigenvalues `w_1..w_4`, the overlapping/isolated regime
//!   classification in the ratio `gamma = sigma/lambda^2`, and the reduced
//!   2x2 density matrix in closed form ([`spin_boson`]);
//! - independent **oracles** used to validate every derived quantity: a
//!   discretized-bath summation route, exact evolution in a truncated Fock
//!   space, a characteristic-polynomial eigensolver, and a scaling-squaring
//!   matrix exponential ([`oracle`]).
//!
//! # Entry points
//!
//! Most workflows start from a [`model::Config`] (TOML), call
//! [`model::Config::build`] to obtain validated parameter structs, construct
//! [`bath::BathFunctions`] once (this runs all quadratures), and then call
//! into [`resonances`], [`dynamics`] or [`spin_boson`]. The `examples/`
//! directory contains one runnable example per capability; `src/bin/resodyn`
//! wraps the same library calls in a small CLI (see [`cli`]).
//!
//! ```no_run
//! use resodyn::{bath::BathFunctions, model::Config, resonances};
//!
//! let cfg: Config = toml::from_str(&std::fs::read_to_string("configs/default.toml")?)?;
//! let (spec, bath_params, form_factor, coupling, quad) = cfg.build()?;
//! let bf = BathFunctions::new(&bath_params, &form_factor, &quad)?;
//! let op = resonances::effective_operator(&spec, &bf, &coupling);
//! let spectrum = resonances::resonances_numeric(&op)?;
//! for ((a, b), eps) in spectrum.labels().iter().zip(spectrum.eigenvalues()) {
//!     println!("eps_{a}{b} = {eps}");
//! }
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bath;
pub mod cli;
pub mod dynamics;
mod error;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod resonances;
pub mod spin_boson;

pub use error::{Error, Result};

/// Shorthand for the complex scalar type used throughout.
pub type C64 = num_complex::Complex64;
