//! Feynman-Kac estimates of the heat equation, with and without potential.

use spectral_kit::montecarlo::{feynman_kac, feynman_kac_nd, SdeProblem, SdeProblemNd};

fn main() -> spectral_kit::Result<()> {
    let seed = 11;
    let sq = SdeProblem::brownian(0.0).with_u0(|x| x * x);
    let e = feynman_kac(&sq, 1.0, 100_000, 1, seed)?;
    println!("u0 = x^2, t = 1: {:.4} +- {:.4} (exact 1)", e.estimate, e.std_error);

    // constant potential V = 0.5 damps by e^{-t/2}
    let damped = SdeProblem::brownian(0.0).with_u0(|_| 1.0).with_potential(|_| 0.5);
    let e = feynman_kac(&damped, 2.0, 1000, 10, seed)?;
    println!("V = 0.5, t = 2: {:.6} (exact {:.6})", e.estimate, (-1.0f64).exp());

    let r2 = SdeProblemNd::brownian(vec![0.0, 0.0], |x| x[0] * x[0] + x[1] * x[1]);
    let e = feynman_kac_nd(&r2, 1.0, 100_000, 1, seed)?;
    println!("2D |x|^2, t = 1: {:.4} +- {:.4} (exact 2)", e.estimate, e.std_error);
    Ok(())
}
