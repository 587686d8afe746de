//! Convergence orders of the time-stepping schemes on the logistic equation.

use spectral_kit::timestep::{
    convergence_study, logistic_exact, IvpProblem, SchemeSpec, LOGISTIC_STEPS,
};

fn main() -> spectral_kit::Result<()> {
    let problem = IvpProblem::logistic(2.0);
    let exact = [logistic_exact(2.0)];
    for name in ["fe", "be", "ab2", "ab3", "am2", "heun", "rk4"] {
        let scheme: SchemeSpec = name.parse()?;
        let study = convergence_study(scheme, &problem, &exact, &LOGISTIC_STEPS)?;
        let last = study.rows.last().unwrap();
        println!(
            "{:8} slope {:5.2} (declared {}), error at N = {}: {:.2e}",
            scheme.name(),
            study.slope.unwrap_or(f64::NAN),
            scheme.order(),
            last.n,
            last.error
        );
    }
    Ok(())
}
