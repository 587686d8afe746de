//! Tau, Galerkin and collocation on u'' + u' - 2u + 2 = 0, u(-1) = u(1) = 0.

use spectral_kit::bvp::{solve_bvp, sup_error, Method};

fn main() -> spectral_kit::Result<()> {
    for n in [4, 8, 12, 16] {
        for m in Method::ALL {
            let s = solve_bvp(m, n)?;
            println!(
                "N = {n:2} {:11}: sup error {:.2e}, cond {:.1e}",
                m.name(),
                sup_error(&s, 1001),
                s.condition
            );
        }
    }
    Ok(())
}
