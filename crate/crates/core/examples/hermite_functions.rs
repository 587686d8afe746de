//! Normalised Hermite functions stay bounded even at large index.

use spectral_kit::orthopoly::hermite_funcs;

fn main() -> spectral_kit::Result<()> {
    let xs: Vec<f64> = (0..=8).map(|i| -4.0 + i as f64).collect();
    let h = hermite_funcs(100, &xs)?;
    for k in [0, 1, 2, 10, 100] {
        let row: Vec<String> = h[k].iter().map(|v| format!("{v:+.4}")).collect();
        println!("H_{k:<3} {}", row.join(" "));
    }
    // ∫ H_0^2 dx by a Riemann sum on [-10, 10]
    let fine: Vec<f64> = (0..=4000).map(|i| -10.0 + i as f64 * 0.005).collect();
    let h0 = &hermite_funcs(0, &fine)?[0];
    let integral: f64 = h0.iter().map(|v| v * v * 0.005).sum();
    println!("int H_0^2 = {integral:.10} (sqrt(pi) = {:.10})", std::f64::consts::PI.sqrt());
    Ok(())
}
