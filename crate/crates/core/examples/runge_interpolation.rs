//! Runge phenomenon and Lebesgue constants for uniform vs Chebyshev nodes.

use spectral_kit::interp::{
    lebesgue_constant, runge_sweep, vertesi_asymptote, LEBESGUE_DENSITY,
};
use spectral_kit::orthopoly::{cheb_nodes, NodeFamily};

fn main() -> spectral_kit::Result<()> {
    for row in runge_sweep(&[4, 8, 16, 32], 2001)? {
        println!("N = {:2} {:9} sup error {:.3e}", row.n, row.family, row.sup_error);
    }
    for n in [10, 20] {
        let cheb = lebesgue_constant(&cheb_nodes(&NodeFamily::ChebyshevExtrema(n))?, LEBESGUE_DENSITY)?;
        let uni = lebesgue_constant(&cheb_nodes(&NodeFamily::Uniform(n))?, LEBESGUE_DENSITY)?;
        println!(
            "N = {n}: Chebyshev {:.5} (asymptote {:.5}), uniform {:.3e}",
            cheb.value,
            vertesi_asymptote(n),
            uni.value
        );
    }
    Ok(())
}
