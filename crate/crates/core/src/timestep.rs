//! One-step and multistep time-marching for `u' = f(t, u)` on real state
//! vectors, plus a convergence-study harness.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::linalg::loglog_slope;
use crate::table::{Cell, Table};
use crate::{Error, Result};

/// `|u|` above which integration aborts.
pub const BLOWUP_THRESHOLD: f64 = 1e12;
pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 50;
/// Relative finite-difference step for the Newton Jacobian.
pub const JACOBIAN_STEP: f64 = 1e-7;

/// Right-hand side writing `f(t, u)` into the output slice.
pub type Rhs = dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync;

#[derive(Clone)]
pub struct IvpProblem {
    rhs: Arc<Rhs>,
    pub u0: Vec<f64>,
    pub t0: f64,
    pub t_end: f64,
}

impl fmt::Debug for IvpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IvpProblem")
            .field("dim", &self.u0.len())
            .field("t0", &self.t0)
            .field("t_end", &self.t_end)
            .finish()
    }
}

impl IvpProblem {
    pub fn new<F>(rhs: F, u0: Vec<f64>, t0: f64, t_end: f64) -> Result<Self>
    where
        F: Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
    {
        if u0.is_empty() {
            return Err(Error::InvalidArgument("empty initial state".into()));
        }
        if !(t_end > t0) {
            return Err(Error::InvalidArgument(format!(
                "time window [{t0}, {t_end}] is empty"
            )));
        }
        Ok(IvpProblem {
            rhs: Arc::new(rhs),
            u0,
            t0,
            t_end,
        })
    }

    /// Scalar autonomous problem `u' = f(u)`.
    pub fn scalar<F>(f: F, u0: f64, t_end: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        IvpProblem::new(move |_, u, out| out[0] = f(u[0]), vec![u0], 0.0, t_end)
    }

    /// `u' = u (1 - u)`, `u(0) = 2` on `[0, t_end]`.
    pub fn logistic(t_end: f64) -> Self {
        IvpProblem::scalar(|u| u * (1.0 - u), 2.0, t_end).expect("valid logistic problem")
    }

    pub fn dim(&self) -> usize {
        self.u0.len()
    }

    pub fn eval(&self, t: f64, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        (self.rhs)(t, u, &mut out);
        out
    }
}

/// Exact logistic solution `2 / (2 - e^{-t})`.
pub fn logistic_exact(t: f64) -> f64 {
    2.0 / (2.0 - (-t).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchemeSpec {
    ForwardEuler,
    BackwardEuler,
    Ab2,
    Ab3,
    /// Trapezoidal rule.
    Am1,
    Am2,
    /// Two-stage Runge-Kutta family.
    Rk2 { alpha: f64 },
    Rk4,
}

impl SchemeSpec {
    pub const MIDPOINT: SchemeSpec = SchemeSpec::Rk2 { alpha: 0.5 };
    pub const HEUN: SchemeSpec = SchemeSpec::Rk2 { alpha: 1.0 };
    pub const RALSTON: SchemeSpec = SchemeSpec::Rk2 { alpha: 2.0 / 3.0 };

    pub const ALL_NAMES: [&'static str; 11] = [
        "forward_euler",
        "backward_euler",
        "ab2",
        "ab3",
        "am1_trapezoid",
        "am2",
        "rk2",
        "midpoint",
        "heun",
        "ralston",
        "rk4",
    ];

    /// Declared order of accuracy.
    pub fn order(&self) -> u32 {
        match self {
            SchemeSpec::ForwardEuler | SchemeSpec::BackwardEuler => 1,
            SchemeSpec::Ab2 | SchemeSpec::Am1 | SchemeSpec::Rk2 { .. } => 2,
            SchemeSpec::Ab3 | SchemeSpec::Am2 => 3,
            SchemeSpec::Rk4 => 4,
        }
    }

    /// Number of past states the update reads, the current one included.
    pub fn history_levels(&self) -> usize {
        match self {
            SchemeSpec::Ab2 | SchemeSpec::Am2 => 2,
            SchemeSpec::Ab3 => 3,
            _ => 1,
        }
    }

    pub fn is_implicit(&self) -> bool {
        matches!(
            self,
            SchemeSpec::BackwardEuler | SchemeSpec::Am1 | SchemeSpec::Am2
        )
    }

    pub fn name(&self) -> String {
        match self {
            SchemeSpec::ForwardEuler => "forward_euler".into(),
            SchemeSpec::BackwardEuler => "backward_euler".into(),
            SchemeSpec::Ab2 => "ab2".into(),
            SchemeSpec::Ab3 => "ab3".into(),
            SchemeSpec::Am1 => "am1_trapezoid".into(),
            SchemeSpec::Am2 => "am2".into(),
            SchemeSpec::Rk2 { alpha } => format!("rk2:{alpha}"),
            SchemeSpec::Rk4 => "rk4".into(),
        }
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for SchemeSpec {
    type Err = Error;

    /// Accepts the family names, `rk2:<alpha>` and the named RK2 variants.
    fn from_str(s: &str) -> Result<Self> {
        let spec = match s {
            "forward_euler" | "fe" => SchemeSpec::ForwardEuler,
            "backward_euler" | "be" => SchemeSpec::BackwardEuler,
            "ab2" => SchemeSpec::Ab2,
            "ab3" => SchemeSpec::Ab3,
            "am1" | "am1_trapezoid" | "trapezoid" => SchemeSpec::Am1,
            "am2" => SchemeSpec::Am2,
            "rk2" | "midpoint" => SchemeSpec::MIDPOINT,
            "heun" => SchemeSpec::HEUN,
            "ralston" => SchemeSpec::RALSTON,
            "rk4" => SchemeSpec::Rk4,
            other => match other.strip_prefix("rk2:") {
                Some(a) => {
                    let alpha: f64 = a.parse().map_err(|_| {
                        Error::InvalidArgument(format!("bad RK2 alpha `{a}`"))
                    })?;
                    if !(alpha > 0.0) {
                        return Err(Error::InvalidArgument(format!(
                            "RK2 alpha must be positive, got {alpha}"
                        )));
                    }
                    SchemeSpec::Rk2 { alpha }
                }
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown scheme `{s}`; expected one of {}",
                        SchemeSpec::ALL_NAMES.join(", ")
                    )))
                }
            },
        };
        Ok(spec)
    }
}

/// Past levels `(t, u, f(t, u))`, most recent first.
#[derive(Debug, Clone, Default)]
pub struct History {
    levels: VecDeque<(f64, Vec<f64>, Vec<f64>)>,
    capacity: usize,
}

impl History {
    pub fn new(capacity: usize) -> Self {
        History {
            levels: VecDeque::with_capacity(capacity.max(1)),
            capacity: capacity.max(1),
        }
    }

    /// Start a history at `(t, u)`.
    pub fn start(problem: &IvpProblem, capacity: usize) -> Self {
        let mut h = History::new(capacity);
        h.push(problem, problem.t0, problem.u0.clone());
        h
    }

    pub fn push(&mut self, problem: &IvpProblem, t: f64, u: Vec<f64>) {
        let f = problem.eval(t, &u);
        self.levels.push_front((t, u, f));
        self.levels.truncate(self.capacity);
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn time(&self) -> f64 {
        self.levels[0].0
    }

    pub fn state(&self) -> &[f64] {
        &self.levels[0].1
    }

    fn f(&self, lag: usize) -> &[f64] {
        &self.levels[lag].2
    }
}

fn axpy(out: &mut [f64], a: f64, x: &[f64]) {
    out.iter_mut().zip(x).for_each(|(o, xi)| *o += a * xi);
}

fn combine(u: &[f64], terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = u.to_vec();
    for (a, x) in terms {
        axpy(&mut out, *a, x);
    }
    out
}

/// Advance one step of size `dt` from the most recent level of `history`.
pub fn step(scheme: SchemeSpec, problem: &IvpProblem, history: &History, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let needed = scheme.history_levels();
    if history.len() < needed {
        return Err(Error::InsufficientHistory {
            needed,
            available: history.len(),
        });
    }
    let t = history.time();
    let u = history.state();
    let f0 = history.f(0);
    match scheme {
        SchemeSpec::ForwardEuler => Ok(combine(u, &[(dt, f0)])),
        SchemeSpec::Ab2 => Ok(combine(u, &[(1.5 * dt, f0), (-0.5 * dt, history.f(1))])),
        SchemeSpec::Ab3 => Ok(combine(
            u,
            &[
                (23.0 / 12.0 * dt, f0),
                (-4.0 / 3.0 * dt, history.f(1)),
                (5.0 / 12.0 * dt, history.f(2)),
            ],
        )),
        SchemeSpec::Rk2 { alpha } => {
            let k1 = scaled(f0, dt);
            let k2 = scaled(&problem.eval(t + alpha * dt, &combine(u, &[(alpha, &k1)])), dt);
            let w2 = 1.0 / (2.0 * alpha);
            Ok(combine(u, &[(1.0 - w2, &k1), (w2, &k2)]))
        }
        SchemeSpec::Rk4 => Ok(rk4_step(problem, t, u, f0, dt)),
        // v = known + c f(t + dt, v)
        SchemeSpec::BackwardEuler => implicit_solve(problem, t + dt, u, dt, u),
        SchemeSpec::Am1 => {
            let known = combine(u, &[(0.5 * dt, f0)]);
            implicit_solve(problem, t + dt, &known, 0.5 * dt, u)
        }
        SchemeSpec::Am2 => {
            let known = combine(u, &[(2.0 / 3.0 * dt, f0), (-dt / 12.0, history.f(1))]);
            implicit_solve(problem, t + dt, &known, 5.0 / 12.0 * dt, u)
        }
    }
}

fn scaled(x: &[f64], a: f64) -> Vec<f64> {
    x.iter().map(|v| a * v).collect()
}

fn rk4_step(problem: &IvpProblem, t: f64, u: &[f64], f0: &[f64], dt: f64) -> Vec<f64> {
    let k1 = scaled(f0, dt);
    let k2 = scaled(&problem.eval(t + 0.5 * dt, &combine(u, &[(0.5, &k1)])), dt);
    let k3 = scaled(&problem.eval(t + 0.5 * dt, &combine(u, &[(0.5, &k2)])), dt);
    let k4 = scaled(&problem.eval(t + dt, &combine(u, &[(1.0, &k3)])), dt);
    combine(
        u,
        &[(1.0 / 6.0, &k1), (2.0 / 6.0, &k2), (2.0 / 6.0, &k3), (1.0 / 6.0, &k4)],
    )
}

fn sup_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Solves `v - known - c f(t, v) = 0` by damped Newton with a finite-difference
/// Jacobian, starting from `guess`.
fn implicit_solve(problem: &IvpProblem, t: f64, known: &[f64], c: f64, guess: &[f64]) -> Result<Vec<f64>> {
    let n = known.len();
    let residual = |v: &[f64]| -> Vec<f64> {
        let f = problem.eval(t, v);
        (0..n).map(|i| v[i] - known[i] - c * f[i]).collect()
    };
    let mut v = guess.to_vec();
    let mut g = residual(&v);
    let mut gnorm = sup_norm(&g);
    // Iterate to rounding level while the residual keeps dropping; stagnation
    // is accepted once the residual is under NEWTON_TOL.
    for _ in 0..NEWTON_MAX_ITER {
        if gnorm <= 4.0 * f64::EPSILON * sup_norm(&v).max(1.0) {
            return Ok(v);
        }
        let f0 = problem.eval(t, &v);
        let mut jac = DMatrix::<f64>::identity(n, n);
        for j in 0..n {
            let h = JACOBIAN_STEP * v[j].abs().max(1.0);
            let mut vp = v.clone();
            vp[j] += h;
            let fp = problem.eval(t, &vp);
            for i in 0..n {
                jac[(i, j)] -= c * (fp[i] - f0[i]) / h;
            }
        }
        let rhs = DVector::from_iterator(n, g.iter().map(|x| -x));
        let delta = match jac.lu().solve(&rhs) {
            Some(d) => d,
            None => break,
        };
        // Halve the step until the residual decreases.
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = v.iter().zip(delta.iter()).map(|(a, d)| a + lambda * d).collect();
            let gt = residual(&trial);
            let gt_norm = sup_norm(&gt);
            if gt_norm.is_finite() && gt_norm < gnorm {
                v = trial;
                g = gt;
                gnorm = gt_norm;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if gnorm <= NEWTON_TOL * sup_norm(&v).max(1.0) {
        return Ok(v);
    }
    Err(Error::InnerSolve {
        iterations: NEWTON_MAX_ITER,
        residual: gnorm,
    })
}

/// Output of [`integrate`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Every level when recording was requested, otherwise empty.
    pub states: Vec<Vec<f64>>,
    pub final_time: f64,
    pub final_state: Vec<f64>,
}

/// March `n_steps` equal steps across the problem window. Multistep schemes
/// take their first `levels - 1` steps with RK4.
pub fn integrate(scheme: SchemeSpec, problem: &IvpProblem, n_steps: usize, record: bool) -> Result<Trajectory> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be >= 1".into()));
    }
    let dt = (problem.t_end - problem.t0) / n_steps as f64;
    let mut history = History::start(problem, scheme.history_levels());
    let mut times = Vec::new();
    let mut states = Vec::new();
    if record {
        times.push(problem.t0);
        states.push(problem.u0.clone());
    }
    for n in 0..n_steps {
        let active = if n + 1 < scheme.history_levels() {
            SchemeSpec::Rk4
        } else {
            scheme
        };
        let next = step(active, problem, &history, dt)?;
        let t = problem.t0 + (n + 1) as f64 * dt;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("{scheme} state"),
                step: n + 1,
            });
        }
        let magnitude = sup_norm(&next);
        if magnitude > BLOWUP_THRESHOLD {
            log::warn!("{scheme}: |u| = {magnitude:.3e} at t = {t}");
            return Err(Error::BlowUp {
                step: n + 1,
                time: t,
                magnitude,
            });
        }
        if record {
            times.push(t);
            states.push(next.clone());
        }
        history.push(problem, t, next);
    }
    Ok(Trajectory {
        times,
        states,
        final_time: history.time(),
        final_state: history.state().to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub dt: f64,
    pub error: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// Log-log slope of error against dt over the points above the rounding
    /// floor.
    pub slope: Option<f64>,
    /// Rows that entered the fit.
    pub fitted: usize,
}

impl ConvergenceStudy {
    /// Columns `N,dt,error`.
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["N", "dt", "error"]);
        for r in &self.rows {
            t.push(vec![Cell::from(r.n), Cell::Real(r.dt), Cell::Real(r.error)]);
        }
        t
    }
}

/// Error floor below which a point is treated as rounding-dominated.
pub fn rounding_floor(exact: &[f64]) -> f64 {
    1e3 * f64::EPSILON * sup_norm(exact).max(1.0)
}

/// Final-time sup error for each step count in `steps` (computed in parallel,
/// reported in input order) and the fitted convergence slope.
pub fn convergence_study(
    scheme: SchemeSpec,
    problem: &IvpProblem,
    exact_final: &[f64],
    steps: &[usize],
) -> Result<ConvergenceStudy> {
    if exact_final.len() != problem.dim() {
        return Err(Error::SizeMismatch {
            expected: problem.dim(),
            found: exact_final.len(),
        });
    }
    let span = problem.t_end - problem.t0;
    let rows = steps
        .par_iter()
        .map(|&n| {
            let traj = integrate(scheme, problem, n, false)?;
            let error = traj
                .final_state
                .iter()
                .zip(exact_final)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok(ConvergenceRow {
                n,
                dt: span / n as f64,
                error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let floor = rounding_floor(exact_final);
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error > floor)
        .map(|r| (r.dt, r.error))
        .collect();
    Ok(ConvergenceStudy {
        slope: loglog_slope(&pts),
        fitted: pts.len(),
        rows,
    })
}

/// Step counts of the RK4 logistic benchmark.
pub const LOGISTIC_STEPS: [usize; 20] = [
    100, 150, 200, 250, 350, 500, 750, 900, 1000, 1250, 1500, 2000, 2500, 3000, 3500, 4000,
    4500, 5000, 5500, 6000,
];

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [SchemeSpec; 10] = [
        SchemeSpec::ForwardEuler,
        SchemeSpec::BackwardEuler,
        SchemeSpec::Ab2,
        SchemeSpec::Ab3,
        SchemeSpec::Am1,
        SchemeSpec::Am2,
        SchemeSpec::MIDPOINT,
        SchemeSpec::HEUN,
        SchemeSpec::RALSTON,
        SchemeSpec::Rk4,
    ];

    #[test]
    fn forward_euler_single_step() {
        let p = IvpProblem::scalar(|u| u, 1.0, 1.0).unwrap();
        let h = History::start(&p, 1);
        let u1 = step(SchemeSpec::ForwardEuler, &p, &h, 0.1).unwrap();
        assert!((u1[0] - 1.1).abs() < 1e-15);
    }

    #[test]
    fn backward_euler_linear() {
        let p = IvpProblem::scalar(|u| -u, 1.0, 1.0).unwrap();
        let h = History::start(&p, 1);
        let u1 = step(SchemeSpec::BackwardEuler, &p, &h, 1.0).unwrap();
        assert!((u1[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rk2_variants_share_one_kernel() {
        let p = IvpProblem::scalar(|u| u * (1.0 - u), 2.0, 1.0).unwrap();
        let h = History::start(&p, 1);
        let dt = 0.1;
        let f = |u: f64| u * (1.0 - u);
        for (name, alpha) in [("midpoint", 0.5), ("heun", 1.0), ("ralston", 2.0 / 3.0)] {
            let spec: SchemeSpec = name.parse().unwrap();
            assert_eq!(spec, SchemeSpec::Rk2 { alpha });
            let k1 = dt * f(2.0);
            let k2 = dt * f(2.0 + alpha * k1);
            let want = 2.0 + (1.0 - 0.5 / alpha) * k1 + 0.5 / alpha * k2;
            assert!((step(spec, &p, &h, dt).unwrap()[0] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn rk4_logistic_n100() {
        let traj = integrate(SchemeSpec::Rk4, &IvpProblem::logistic(2.0), 100, false).unwrap();
        let exact = logistic_exact(2.0);
        assert!((exact - 1.072578).abs() < 1e-6);
        assert!((traj.final_state[0] - exact).abs() < 1e-8);
    }

    #[test]
    fn declared_orders_hold_on_logistic() {
        let p = IvpProblem::logistic(2.0);
        let exact = [logistic_exact(2.0)];
        for scheme in ALL {
            let steps: &[usize] = match scheme.order() {
                1 | 2 => &[100, 200, 400, 800, 1600],
                _ => &[50, 100, 200, 400],
            };
            let study = convergence_study(scheme, &p, &exact, steps).unwrap();
            let slope = study.slope.unwrap();
            assert!(
                (slope - scheme.order() as f64).abs() <= 0.2,
                "{scheme}: slope {slope}"
            );
        }
    }

    #[test]
    fn rk4_exact_on_cubic_forcing() {
        let p = IvpProblem::new(
            |t, _u, out| out[0] = 1.0 - 2.0 * t + 3.0 * t * t - 4.0 * t * t * t,
            vec![0.5],
            0.0,
            1.5,
        )
        .unwrap();
        let traj = integrate(SchemeSpec::Rk4, &p, 7, false).unwrap();
        let t: f64 = 1.5;
        let exact = 0.5 + t - t * t + t.powi(3) - t.powi(4);
        assert!((traj.final_state[0] - exact).abs() < 1e-13);
    }

    #[test]
    fn fixed_point_is_preserved() {
        let p = IvpProblem::new(|_, _, out| out.fill(0.0), vec![0.3, -1.7], 0.0, 1.0).unwrap();
        for scheme in ALL {
            let traj = integrate(scheme, &p, 13, false).unwrap();
            assert_eq!(traj.final_state, vec![0.3, -1.7], "{scheme}");
        }
    }

    #[test]
    fn sqrt_rhs_stays_on_trivial_branch() {
        let p = IvpProblem::scalar(|u| u.abs().sqrt(), 0.0, 2.0).unwrap();
        for scheme in ALL {
            let traj = integrate(scheme, &p, 50, false).unwrap();
            assert_eq!(traj.final_state[0], 0.0, "{scheme}");
        }
    }

    #[test]
    fn stiff_probe() {
        let p = IvpProblem::scalar(|u| -100.0 * u, 1.0, 10.0).unwrap();
        let be = integrate(SchemeSpec::BackwardEuler, &p, 10, false).unwrap();
        assert!(be.final_state[0].abs() <= 1.0);
        assert!(matches!(
            integrate(SchemeSpec::ForwardEuler, &p, 10, false),
            Err(Error::BlowUp { .. })
        ));
    }

    #[test]
    fn blow_up_is_reported() {
        let p = IvpProblem::scalar(|u| 1.0 + u * u, 0.0, 2.0).unwrap();
        let dt = 1e-3;
        match integrate(SchemeSpec::Rk4, &p, 2000, false) {
            Err(Error::BlowUp { time, magnitude, .. }) => {
                assert!(magnitude > BLOWUP_THRESHOLD);
                assert!(time < std::f64::consts::FRAC_PI_2 + 2.0 * dt, "{time}");
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn multistep_needs_history() {
        let p = IvpProblem::logistic(1.0);
        let h = History::start(&p, 3);
        assert!(matches!(
            step(SchemeSpec::Ab3, &p, &h, 0.1),
            Err(Error::InsufficientHistory { needed: 3, available: 1 })
        ));
    }

    #[test]
    fn unsolvable_implicit_step() {
        // v - v^2 = 1 has no real root
        let p = IvpProblem::scalar(|u| u * u, 1.0, 1.0).unwrap();
        let h = History::start(&p, 1);
        let r = step(SchemeSpec::BackwardEuler, &p, &h, 1.0);
        assert!(matches!(
            r,
            Err(Error::InnerSolve { .. })
        ));
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in ALL {
            assert_eq!(s.name().parse::<SchemeSpec>().unwrap(), s);
        }
        assert!("rk5".parse::<SchemeSpec>().is_err());
        assert!("rk2:-1".parse::<SchemeSpec>().is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            // every scheme is exact on u' = c (order >= 1)
            #[test]
            fn constant_rhs_is_integrated_exactly(c in -5.0f64..5.0, u0 in -5.0f64..5.0, n in 1usize..40) {
                let p = IvpProblem::scalar(move |_| c, u0, 1.5).unwrap();
                for name in SchemeSpec::ALL_NAMES {
                    let scheme: SchemeSpec = name.parse().unwrap();
                    let traj = integrate(scheme, &p, n, false).unwrap();
                    prop_assert!((traj.final_state[0] - (u0 + 1.5 * c)).abs() < 1e-10, "{}", name);
                }
            }
        }
    }
}
