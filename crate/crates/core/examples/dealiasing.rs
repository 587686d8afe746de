//! Aliasing on a coarse grid and the 3/2-rule product.

use std::collections::BTreeMap;

use num_complex::Complex64;
use spectral_kit::fourier::{
    aliasing_error, closed_grid_deviation, dealias_product, naive_product, PeriodicGrid,
    SpectralField,
};

fn main() -> spectral_kit::Result<()> {
    println!(
        "cos(x) vs cos(9x) on 11 closed-grid points: max diff {:.1e}",
        closed_grid_deviation(1, 9, 11)
    );

    let spectrum: BTreeMap<i64, Complex64> = (-20..=20)
        .map(|k| (k, Complex64::new(1.0 / (1.0 + (k * k) as f64), 0.0)))
        .collect();
    let r = aliasing_error(&spectrum, 16)?;
    println!(
        "N = 16: |u - I u| = {:.4e}, |u - T u| = {:.4e}, |R u| = {:.4e}",
        r.interp_error_norm, r.trunc_error_norm, r.alias_norm
    );

    // cos(5x) squared on 16 points: the naive product folds k = 10 onto k = -6
    let grid = PeriodicGrid::new(16, std::f64::consts::PI)?;
    let c = SpectralField::from_fn(&grid, |x| (5.0 * x).cos()).coeffs()?;
    let naive = naive_product(&c, &c)?;
    let clean = dealias_product(&c, &c)?;
    for j in 0..16 {
        let k = grid.mode_index(j);
        if naive[j].norm() > 1e-9 || clean[j].norm() > 1e-9 {
            println!("k = {k:3}: naive {:8.4}  dealiased {:8.4}", naive[j].norm(), clean[j].norm());
        }
    }
    Ok(())
}
