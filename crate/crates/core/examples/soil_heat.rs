//! Exact solution of u_t = kappa u_xx on [0, 1] driven by u(0, t) = sin t.

use spectral_kit::pde::ExactHeatSolution;

fn main() -> spectral_kit::Result<()> {
    let sol = ExactHeatSolution::default();
    println!("kappa = {:.6e}", sol.kappa);
    for t in [0.5, 2.0, 10.0] {
        println!(
            "t = {t:4}: terms {:4}, u(0) = {:+.10} (sin t = {:+.10}), u(0.75) = {:+.6}",
            sol.terms_needed(t)?,
            sol.eval(0.0, t)?,
            t.sin(),
            sol.eval(0.75, t)?
        );
    }
    // phase lag at depth over one late period
    let (t0, period) = (40.0, 2.0 * std::f64::consts::PI);
    let argmax = |x: f64| -> spectral_kit::Result<f64> {
        let mut best = (f64::MIN, t0);
        for i in 0..2000 {
            let t = t0 + period * i as f64 / 2000.0;
            let u = sol.eval(x, t)?;
            if u > best.0 {
                best = (u, t);
            }
        }
        Ok(best.1)
    };
    println!("surface peak t = {:.3}, depth 0.75 peak t = {:.3}", argmax(0.0)?, argmax(0.75)?);
    Ok(())
}
