//! Coupled heat-moisture model integrated by the method of lines.

use spectral_kit::fourier::{PeriodicGrid, SpectralField};
use spectral_kit::pde::{mol_integrate, HeatMoistureParams, MolSystem};
use spectral_kit::timestep::SchemeSpec;

fn main() -> spectral_kit::Result<()> {
    let grid = PeriodicGrid::new(64, 1.0)?;
    let theta = SpectralField::from_fn(&grid, |x| 0.3 + 0.1 * (std::f64::consts::PI * x).sin());
    let temp = SpectralField::from_fn(&grid, |x| (-20.0 * x * x).exp());
    for preset in ["constant", "nonlinear"] {
        let params = HeatMoistureParams::from_preset(preset, 0.01)?;
        let sys = MolSystem::heat_moisture(&theta, &temp, params)?;
        let out = mol_integrate(&sys, SchemeSpec::Rk4, 1.0, 200)?;
        println!(
            "{preset:9}: mean moisture {:.15} -> {:.15}, max T {:.6}",
            theta.mean()?,
            out[0].mean()?,
            out[1].values()?.iter().cloned().fold(f64::MIN, f64::max)
        );
    }
    Ok(())
}
