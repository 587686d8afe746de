//! Fourier differentiation of sin(pi(x+1)) exp(sin(pi(x+1))).

use spectral_kit::fourier::derivative_benchmark;

fn main() -> spectral_kit::Result<()> {
    for n in [8, 16, 32, 64] {
        let e = derivative_benchmark(n)?;
        println!("N = {n:2}: eps1 {:.2e}  eps2 {:.2e}  eps3 {:.2e}", e[0], e[1], e[2]);
    }
    Ok(())
}
