//! Periodic heat equation: exact Fourier propagator against RK4 method of lines.

use spectral_kit::fourier::{heat_propagate, PeriodicGrid, SpectralField};
use spectral_kit::pde::{mol_integrate, MolSystem};
use spectral_kit::timestep::SchemeSpec;

fn main() -> spectral_kit::Result<()> {
    let grid = PeriodicGrid::new(128, 1.0)?;
    let u0 = SpectralField::from_fn(&grid, |x| 1.0 / (10.0 * x).cosh().powi(2));
    let nu = 0.01;
    let exact = heat_propagate(&u0, nu, 1.0)?.values()?;
    let sys = MolSystem::linear_heat(&u0, nu)?;
    for steps in [400, 800, 1600] {
        let mol = mol_integrate(&sys, SchemeSpec::Rk4, 1.0, steps)?[0].values()?;
        let err = mol.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("RK4 with {steps:4} steps: max error {err:.3e}");
    }
    println!("mass before {:.12}, after {:.12}", u0.mean()?, heat_propagate(&u0, nu, 1.0)?.mean()?);
    Ok(())
}
