//! Laplace problems by harmonic-polynomial and fundamental-solution collocation.

use spectral_kit::trefftz::{
    solve_trefftz, Basis, BoundaryProblem, Curve, TrefftzMethod, SOURCE_DILATION,
};

fn main() -> spectral_kit::Result<()> {
    let exact = |x: f64, y: f64| x * x - y * y;
    let square = Curve::square(1.0);
    let p = BoundaryProblem::dirichlet(
        square.clone(),
        move |b| exact(b.x, b.y),
        Basis::t_complete(8, &square),
        36,
    )?;
    for m in TrefftzMethod::ALL {
        let s = solve_trefftz(&p, m, false)?;
        println!(
            "square, {:17}: u(0.3, 0.4) = {:+.12} (exact {:+.12}), cond {:.1e}",
            m.name(),
            s.eval([0.3, 0.4]),
            exact(0.3, 0.4),
            s.condition
        );
    }

    let disk = Curve::unit_disk();
    for count in [8, 16, 32] {
        let basis = Basis::fundamental_dilated(&disk, count, SOURCE_DILATION)?;
        let p = BoundaryProblem::dirichlet(disk.clone(), |b| b.x, basis, 2 * count)?;
        let s = solve_trefftz(&p, TrefftzMethod::LeastSquares, false)?;
        println!("disk, {count:2} sources: boundary residual {:.2e}", s.boundary_residual);
    }
    Ok(())
}
