//! # spectral-kit
//!
//! Spectral and pseudo-spectral numerical methods in one dimension (plus a
//! little two-dimensional potential theory), built around reproducible
//! experiments.
//!
//! The crate is organised by numerical building block:
//!
//! - [`orthopoly`]: Chebyshev polynomials in coefficient space (evaluation,
//!   nodes, Gauss-Chebyshev quadrature, differentiation recurrences, products,
//!   compositions) and Hermite functions.
//! - [`interp`]: barycentric polynomial interpolation, Lebesgue functions and
//!   constants, Runge-phenomenon sweeps.
//! - [`fourier`]: periodic grids, FFT-backed transforms, spectral
//!   differentiation, aliasing diagnostics, the 3/2-rule dealiased product and
//!   the exact heat propagator.
//! - [`bvp`]: Tau, Galerkin and collocation solutions of a linear second-order
//!   boundary value problem in a Chebyshev trial space.
//! - [`timestep`]: explicit and implicit ODE time-marching schemes with a
//!   convergence-study harness.
//! - [`pde`]: method-of-lines drivers, the coupled heat-moisture right-hand
//!   side and an exact non-periodic heat solution.
//! - [`montecarlo`]: Brownian path batches, Euler-Maruyama and Feynman-Kac
//!   estimators with counter-based reproducible random streams.
//! - [`trefftz`]: indirect Trefftz and fundamental-solution collocation for the
//!   2D Laplace equation.
//! - [`experiments`]: the registry behind the `spectral-kit` binary; every
//!   experiment writes deterministic CSV files plus gnuplot companions.
//!
//! Runnable examples, one per capability, live in `crates/core/examples/`.
//!
//! ```
//! use spectral_kit::fourier::{spectral_derivative, PeriodicGrid, SpectralField};
//!
//! let grid = PeriodicGrid::new(32, 1.0).unwrap();
//! let field = SpectralField::from_fn(&grid, |x| (std::f64::consts::PI * x).sin());
//! let du = spectral_derivative(&field, 1).unwrap();
//! let exact: Vec<f64> = grid
//!     .nodes()
//!     .iter()
//!     .map(|x| std::f64::consts::PI * (std::f64::consts::PI * x).cos())
//!     .collect();
//! let err = du
//!     .values()
//!     .unwrap()
//!     .iter()
//!     .zip(&exact)
//!     .map(|(a, b)| (a - b).abs())
//!     .fold(0.0, f64::max);
//! assert!(err < 1e-12);
//! ```

pub mod bvp;
pub mod error;
pub mod experiments;
pub mod fourier;
pub mod interp;
pub mod linalg;
pub mod montecarlo;
pub mod orthopoly;
pub mod pde;
pub mod table;
pub mod timestep;
pub mod trefftz;

pub use error::{Error, Result};
