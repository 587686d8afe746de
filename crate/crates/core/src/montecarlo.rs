//! Brownian path batches, Euler-Maruyama integration and Feynman-Kac
//! estimators.
//!
//! Randomness is counter-based: path `m` reads its own ChaCha8 stream
//! (selected with `set_stream(m)` on a generator seeded from the run seed), so
//! a path's draws do not depend on the batch size or on how rayon schedules
//! the work. Normals come from the Box-Muller transform using both outputs of
//! each pair. Reductions use pairwise summation in path-index order.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::table::{Cell, Table};
use crate::{Error, Result};

/// Universal gas constant, J/(mol K).
pub const GAS_CONSTANT: f64 = 8.3144598;
/// Avogadro's number, 1/mol.
pub const AVOGADRO: f64 = 6.022140857e23;
/// Default bound on `|X|` beyond which a run aborts.
pub const DEFAULT_BOX: f64 = 1e6;

/// Standard normal draws from one path's stream.
pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        NormalStream { rng, spare: None }
    }

    /// Uniform on `(0, 1]`.
    fn open_uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.open_uniform();
        let u2 = self.open_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// Pairwise (cascade) sum; the split points depend only on the length.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 32 {
        return x.iter().sum();
    }
    let mid = x.len() / 2;
    pairwise_sum(&x[..mid]) + pairwise_sum(&x[mid..])
}

/// Sample mean and unbiased variance with deterministic reduction order.
pub fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = pairwise_sum(x) / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = x.iter().map(|v| (v - mean).powi(2)).collect();
    (mean, pairwise_sum(&dev) / (n - 1.0))
}

/// M discretised Brownian paths of N steps on `[0, T]`.
#[derive(Debug)]
pub struct PathBatch {
    pub m: usize,
    pub n: usize,
    pub t: f64,
    pub seed: u64,
    /// Row-major `M x N` increments.
    dw: Vec<f64>,
    w: OnceLock<Vec<f64>>,
}

impl PathBatch {
    pub fn dt(&self) -> f64 {
        self.t / self.n as f64
    }

    /// Increments of path `i`.
    pub fn increments(&self, i: usize) -> &[f64] {
        &self.dw[i * self.n..(i + 1) * self.n]
    }

    /// `W` of path `i` at steps `1..=N` (prefix sums, computed on first use).
    pub fn path(&self, i: usize) -> &[f64] {
        let w = self.w.get_or_init(|| {
            let mut w = self.dw.clone();
            w.par_chunks_mut(self.n).for_each(|row| {
                for j in 1..row.len() {
                    row[j] += row[j - 1];
                }
            });
            w
        });
        &w[i * self.n..(i + 1) * self.n]
    }

    /// `W(T)` for every path.
    pub fn terminal(&self) -> Vec<f64> {
        (0..self.m).map(|i| pairwise_sum(self.increments(i))).collect()
    }
}

/// Brownian increments `dW ~ N(0, dt)`; path `i` uses stream `i`.
pub fn brownian_batch(m: usize, n: usize, t: f64, seed: u64) -> Result<PathBatch> {
    if m == 0 || n == 0 || !(t > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need M, N >= 1 and T > 0 (got M = {m}, N = {n}, T = {t})"
        )));
    }
    let sdt = (t / n as f64).sqrt();
    let mut dw = vec![0.0; m * n];
    dw.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let mut z = NormalStream::new(seed, i as u64);
        row.iter_mut().for_each(|v| *v = sdt * z.next_normal());
    });
    Ok(PathBatch {
        m,
        n,
        t,
        seed,
        dw,
        w: OnceLock::new(),
    })
}

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `dX = α(X) dt + σ(X) dW`, `X_0 = x0`, with potential `V` and datum `u0`.
#[derive(Clone)]
pub struct SdeProblem {
    pub alpha: ScalarFn,
    pub sigma: ScalarFn,
    pub potential: ScalarFn,
    pub u0: ScalarFn,
    pub x0: f64,
    /// Abort when `|X|` exceeds this.
    pub bound: f64,
    /// Trapezoid instead of left-endpoint rule for `∫V`.
    pub trapezoid: bool,
}

impl fmt::Debug for SdeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SdeProblem")
            .field("x0", &self.x0)
            .field("bound", &self.bound)
            .field("trapezoid", &self.trapezoid)
            .finish()
    }
}

impl SdeProblem {
    /// Standard Brownian motion from `x0`, `V = 0`, `u0 = 0`.
    pub fn brownian(x0: f64) -> Self {
        SdeProblem {
            alpha: Arc::new(|_| 0.0),
            sigma: Arc::new(|_| 1.0),
            potential: Arc::new(|_| 0.0),
            u0: Arc::new(|_| 0.0),
            x0,
            bound: DEFAULT_BOX,
            trapezoid: false,
        }
    }

    pub fn with_drift(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.alpha = Arc::new(f);
        self
    }

    pub fn with_volatility(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.sigma = Arc::new(f);
        self
    }

    pub fn with_potential(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.potential = Arc::new(f);
        self
    }

    pub fn with_u0(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.u0 = Arc::new(f);
        self
    }

    pub fn at(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }
}

/// Per-path outcome of an Euler-Maruyama run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEnd {
    pub x: f64,
    /// `∫_0^T V(X_s) ds`.
    pub v_integral: f64,
}

fn potential_at(problem: &SdeProblem, x: f64, path: usize) -> Result<f64> {
    let v = (problem.potential)(x);
    if v < 0.0 {
        return Err(Error::Hypothesis(format!(
            "negative potential V({x}) = {v} on path {path}"
        )));
    }
    Ok(v)
}

/// March one path given its increment source.
fn march(
    problem: &SdeProblem,
    path: usize,
    steps: usize,
    dt: f64,
    mut next_dw: impl FnMut() -> f64,
) -> Result<PathEnd> {
    let mut x = problem.x0;
    let mut acc = 0.0;
    let mut v_prev = potential_at(problem, x, path)?;
    for step in 0..steps {
        let dw = next_dw();
        let x_new = x + (problem.alpha)(x) * dt + (problem.sigma)(x) * dw;
        if !x_new.is_finite() {
            return Err(Error::NonFinite {
                context: format!("path {path}"),
                step: step + 1,
            });
        }
        if x_new.abs() > problem.bound {
            return Err(Error::Hypothesis(format!(
                "path {path} left |x| <= {} at step {}",
                problem.bound,
                step + 1
            )));
        }
        let v_new = potential_at(problem, x_new, path)?;
        acc += if problem.trapezoid {
            0.5 * (v_prev + v_new) * dt
        } else {
            v_prev * dt
        };
        x = x_new;
        v_prev = v_new;
    }
    Ok(PathEnd { x, v_integral: acc })
}

/// `X_{n+1} = X_n + α(X_n) dt + σ(X_n) dW_n` over every path of the batch.
pub fn euler_maruyama(problem: &SdeProblem, batch: &PathBatch) -> Result<Vec<PathEnd>> {
    let dt = batch.dt();
    (0..batch.m)
        .into_par_iter()
        .map(|i| {
            let mut it = batch.increments(i).iter();
            march(problem, i, batch.n, dt, || *it.next().unwrap())
        })
        .collect()
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// `u(x0, t) ≈ mean(exp(-∫V) u0(X_t))` over `m` paths of `n_steps` steps.
/// Paths are generated on the fly from the same streams as
/// [`brownian_batch`], so the result equals running [`euler_maruyama`] on
/// `brownian_batch(m, n_steps, t, seed)`.
pub fn feynman_kac(problem: &SdeProblem, t: f64, m: usize, n_steps: usize, seed: u64) -> Result<Estimate> {
    if m == 0 || n_steps == 0 || !(t > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need M, N >= 1 and t > 0 (got M = {m}, N = {n_steps}, t = {t})"
        )));
    }
    let dt = t / n_steps as f64;
    let sdt = dt.sqrt();
    let values = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut z = NormalStream::new(seed, i as u64);
            let end = march(problem, i, n_steps, dt, || sdt * z.next_normal())?;
            Ok((-end.v_integral).exp() * (problem.u0)(end.x))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(summarise(&values))
}

fn summarise(values: &[f64]) -> Estimate {
    let (mean, var) = mean_var(values);
    Estimate {
        estimate: mean,
        std_error: (var / values.len() as f64).sqrt(),
        samples: values.len(),
    }
}

pub type VectorFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// d-dimensional problem with isotropic volatility and independent Brownian
/// coordinates.
#[derive(Clone)]
pub struct SdeProblemNd {
    pub dim: usize,
    /// Writes the drift vector for a state.
    pub alpha: Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>,
    pub sigma: VectorFn,
    pub potential: VectorFn,
    pub u0: VectorFn,
    pub x0: Vec<f64>,
    pub bound: f64,
}

impl fmt::Debug for SdeProblemNd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SdeProblemNd")
            .field("dim", &self.dim)
            .field("x0", &self.x0)
            .finish()
    }
}

impl SdeProblemNd {
    /// Standard d-dimensional Brownian motion from `x0`, `V = 0`.
    pub fn brownian(x0: Vec<f64>, u0: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        SdeProblemNd {
            dim: x0.len(),
            alpha: Arc::new(|_, out| out.fill(0.0)),
            sigma: Arc::new(|_| 1.0),
            potential: Arc::new(|_| 0.0),
            u0: Arc::new(u0),
            x0,
            bound: DEFAULT_BOX,
        }
    }

    pub fn with_potential(mut self, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.potential = Arc::new(f);
        self
    }
}

/// d-dimensional Feynman-Kac estimate. Path `i` reads stream `i`, coordinate
/// draws interleaved step by step, so `d = 1` reproduces [`feynman_kac`].
pub fn feynman_kac_nd(problem: &SdeProblemNd, t: f64, m: usize, n_steps: usize, seed: u64) -> Result<Estimate> {
    let d = problem.dim;
    if d == 0 || problem.x0.len() != d {
        return Err(Error::InvalidArgument(format!(
            "dimension {d} with start point of length {}",
            problem.x0.len()
        )));
    }
    if m == 0 || n_steps == 0 || !(t > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need M, N >= 1 and t > 0 (got M = {m}, N = {n_steps}, t = {t})"
        )));
    }
    let dt = t / n_steps as f64;
    let sdt = dt.sqrt();
    let values = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut z = NormalStream::new(seed, i as u64);
            let mut x = problem.x0.clone();
            let mut drift = vec![0.0; d];
            let mut acc = 0.0;
            let mut v_prev = (problem.potential)(&x);
            for step in 0..n_steps {
                if v_prev < 0.0 {
                    return Err(Error::Hypothesis(format!(
                        "negative potential {v_prev} on path {i}"
                    )));
                }
                (problem.alpha)(&x, &mut drift);
                let s = (problem.sigma)(&x);
                for (xc, a) in x.iter_mut().zip(&drift) {
                    *xc = *xc + a * dt + s * (sdt * z.next_normal());
                }
                if x.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite {
                        context: format!("path {i}"),
                        step: step + 1,
                    });
                }
                if x.iter().any(|v| v.abs() > problem.bound) {
                    return Err(Error::Hypothesis(format!(
                        "path {i} left |x| <= {} at step {}",
                        problem.bound,
                        step + 1
                    )));
                }
                acc += v_prev * dt;
                v_prev = (problem.potential)(&x);
            }
            if v_prev < 0.0 {
                return Err(Error::Hypothesis(format!(
                    "negative potential {v_prev} on path {i}"
                )));
            }
            Ok((-acc).exp() * (problem.u0)(&x))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(summarise(&values))
}

/// `D = R T / (f N_a)`. `T = 0` is allowed and gives zero.
pub fn einstein_diffusivity(r: f64, t_abs: f64, f: f64, na: f64) -> Result<f64> {
    if !(r > 0.0 && f > 0.0 && na > 0.0 && t_abs >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Einstein relation needs R, f, Na > 0 and T >= 0 (got {r}, {t_abs}, {f}, {na})"
        )));
    }
    Ok(r * t_abs / (f * na))
}

/// Rows `probe_x,estimate,std_error,M`.
pub fn probe_table(rows: &[(f64, Estimate)]) -> Table {
    let mut t = Table::new(&["probe_x", "estimate", "std_error", "M"]);
    for (x, e) in rows {
        t.push(vec![
            Cell::Real(*x),
            Cell::Real(e.estimate),
            Cell::Real(e.std_error),
            Cell::from(e.samples),
        ]);
    }
    t
}

/// Wrap `x` into the periodic cell `[-l, l)`.
pub fn wrap_periodic(x: f64, l: f64) -> f64 {
    (x + l).rem_euclid(2.0 * l) - l
}
