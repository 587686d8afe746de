//! Reproducible Brownian batches and Euler-Maruyama.

use spectral_kit::montecarlo::{brownian_batch, euler_maruyama, mean_var, SdeProblem};

fn main() -> spectral_kit::Result<()> {
    let batch = brownian_batch(20_000, 100, 1.0, 2024)?;
    let (mean, var) = mean_var(&batch.terminal());
    println!("W(1): mean {mean:+.4}, variance {var:.4}");

    // the same path from a smaller batch is bit-identical
    let small = brownian_batch(10, 100, 1.0, 2024)?;
    println!("path 7 reproducible: {}", small.increments(7) == batch.increments(7));

    let ou = SdeProblem::brownian(1.0).with_drift(|x| -x).with_volatility(|_| 0.5);
    let ends: Vec<f64> = euler_maruyama(&ou, &batch)?.iter().map(|e| e.x).collect();
    let (m, v) = mean_var(&ends);
    println!("OU at t = 1: mean {m:.4} (exact {:.4}), variance {v:.4}", (-1.0f64).exp());
    Ok(())
}
