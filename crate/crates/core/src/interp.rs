//! Barycentric polynomial interpolation, Lebesgue functions and constants,
//! and Runge-phenomenon sweeps.

use std::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::orthopoly::{cheb_nodes, NodeFamily};
use crate::table::Table;
use crate::{Error, Result};

/// Points closer than this to a node return the nodal value.
pub const NODE_SNAP: f64 = 1e-14;

/// Default multiplier `c` in the `c * N^2` Lebesgue sample count.
pub const LEBESGUE_DENSITY: usize = 50;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Interpolating polynomial in second-kind barycentric form.
#[derive(Debug, Clone)]
pub struct Interpolant {
    nodes: Vec<f64>,
    fvals: Vec<f64>,
    weights: Vec<f64>,
}

impl Interpolant {
    /// Nodes may come in any order; they are sorted together with the values.
    pub fn new(nodes: &[f64], fvals: &[f64]) -> Result<Self> {
        if nodes.len() != fvals.len() {
            return Err(Error::SizeMismatch {
                expected: nodes.len(),
                found: fvals.len(),
            });
        }
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("no interpolation nodes".into()));
        }
        if let Some(bad) = nodes.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite node {bad}")));
        }
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by(|&a, &b| nodes[a].total_cmp(&nodes[b]));
        for w in order.windows(2) {
            if nodes[w[0]] == nodes[w[1]] {
                return Err(Error::DuplicateNodes {
                    first: w[0].min(w[1]),
                    second: w[0].max(w[1]),
                });
            }
        }
        let nodes: Vec<f64> = order.iter().map(|&i| nodes[i]).collect();
        let fvals: Vec<f64> = order.iter().map(|&i| fvals[i]).collect();
        let weights = barycentric_weights(&nodes);
        Ok(Interpolant {
            nodes,
            fvals,
            weights,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.fvals
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    fn snap(&self, x: f64) -> Option<usize> {
        self.nodes.iter().position(|xi| (x - xi).abs() <= NODE_SNAP)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if let Some(i) = self.snap(x) {
            return self.fvals[i];
        }
        let (mut num, mut den) = (0.0, 0.0);
        for ((xi, fi), wi) in self.nodes.iter().zip(&self.fvals).zip(&self.weights) {
            let t = wi / (x - xi);
            num += t * fi;
            den += t;
        }
        num / den
    }

    /// `Σ_i |ℓ_i(x)|`.
    pub fn lebesgue_function(&self, x: f64) -> f64 {
        if self.snap(x).is_some() {
            return 1.0;
        }
        let (mut num, mut den) = (0.0, 0.0);
        for (xi, wi) in self.nodes.iter().zip(&self.weights) {
            let t = wi / (x - xi);
            num += t.abs();
            den += t;
        }
        num / den.abs()
    }
}

/// `interpolate(nodes, fvals)`; see [`Interpolant::new`].
pub fn interpolate(nodes: &[f64], fvals: &[f64]) -> Result<Interpolant> {
    Interpolant::new(nodes, fvals)
}

/// Barycentric weights `1 / Π_{j≠i} (x_i - x_j)`, accumulated in log space and
/// rescaled so the largest has magnitude one (the common factor cancels).
fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut logs = vec![0.0; n];
    let mut signs = vec![1.0; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d = nodes[i] - nodes[j];
                logs[i] -= d.abs().ln();
                if d < 0.0 {
                    signs[i] = -signs[i];
                }
            }
        }
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    logs.iter()
        .zip(&signs)
        .map(|(l, s)| s * (l - top).exp())
        .collect()
}

/// Result of [`lebesgue_constant`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LebesgueEstimate {
    pub value: f64,
    /// Samples used in the final (accepted) pass.
    pub samples: usize,
    /// Relative change against the previous pass.
    pub rel_change: f64,
}

const LEBESGUE_MAX_DOUBLINGS: usize = 8;

/// Max of the Lebesgue function over `[-1, 1]` (extended to the node hull if
/// nodes lie outside). Starts from `density * N^2` uniform samples plus all
/// node midpoints and doubles the density until two passes agree to 1e-3.
pub fn lebesgue_constant(nodes: &[f64], density: usize) -> Result<LebesgueEstimate> {
    if nodes.len() < 2 {
        return Err(Error::InvalidArgument(
            "Lebesgue constant needs at least two nodes".into(),
        ));
    }
    let p = Interpolant::new(nodes, &vec![0.0; nodes.len()])?;
    let xs = p.nodes();
    let lo = xs[0].min(-1.0);
    let hi = xs[xs.len() - 1].max(1.0);
    let deg = p.degree().max(1);
    let mut samples = density.max(1) * deg * deg;
    let midpoint_max = xs
        .windows(2)
        .map(|w| p.lebesgue_function(0.5 * (w[0] + w[1])))
        .fold(1.0, f64::max);
    let sweep = |m: usize| -> f64 {
        (0..=m)
            .into_par_iter()
            .map(|i| p.lebesgue_function(lo + (hi - lo) * i as f64 / m as f64))
            .reduce(|| 1.0, f64::max)
            .max(midpoint_max)
    };
    let mut prev = sweep(samples);
    for _ in 0..LEBESGUE_MAX_DOUBLINGS {
        samples *= 2;
        let cur = sweep(samples);
        let rel_change = (cur - prev).abs() / cur;
        if rel_change <= 1e-3 {
            return Ok(LebesgueEstimate {
                value: cur,
                samples,
                rel_change,
            });
        }
        prev = cur;
    }
    Err(Error::Hypothesis(format!(
        "Lebesgue estimate not stable after {LEBESGUE_MAX_DOUBLINGS} doublings"
    )))
}

/// Vértesi asymptote `(2/pi)(ln N + γ + ln(8/pi))` for Chebyshev extrema.
pub fn vertesi_asymptote(n: usize) -> f64 {
    2.0 / PI * ((n as f64).ln() + EULER_GAMMA + (8.0 / PI).ln())
}

/// `1 / (1 + 25 x^2)`.
pub fn runge(x: f64) -> f64 {
    1.0 / (1.0 + 25.0 * x * x)
}

/// Sup-norm of `f - p` on `samples` equispaced points of `[-1, 1]`.
pub fn sup_error<F: Fn(f64) -> f64 + Sync>(p: &Interpolant, f: F, samples: usize) -> f64 {
    let m = samples.max(2) - 1;
    (0..=m)
        .into_par_iter()
        .map(|i| {
            let x = -1.0 + 2.0 * i as f64 / m as f64;
            (f(x) - p.eval(x)).abs()
        })
        .reduce(|| 0.0, f64::max)
}

/// Interpolant of `f` on a node family.
pub fn interpolate_fn<F: Fn(f64) -> f64>(family: &NodeFamily, f: F) -> Result<Interpolant> {
    let nodes = cheb_nodes(family)?;
    let fvals: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
    Interpolant::new(&nodes, &fvals)
}

/// Runge sweep row: degree, family label, sup-error.
#[derive(Debug, Clone, PartialEq)]
pub struct RungeRow {
    pub n: usize,
    pub family: &'static str,
    pub sup_error: f64,
}

/// Sup-error of Runge interpolation on uniform and Chebyshev-extrema nodes for
/// each N in `ns`.
pub fn runge_sweep(ns: &[usize], samples: usize) -> Result<Vec<RungeRow>> {
    let mut rows = Vec::with_capacity(2 * ns.len());
    for &n in ns {
        for (label, family) in [
            ("uniform", NodeFamily::Uniform(n)),
            ("chebyshev", NodeFamily::ChebyshevExtrema(n)),
        ] {
            let p = interpolate_fn(&family, runge)?;
            rows.push(RungeRow {
                n,
                family: label,
                sup_error: sup_error(&p, runge, samples),
            });
        }
    }
    Ok(rows)
}

/// Upper bound on the best uniform approximation error of `f` by degree-N
/// polynomials: the smallest sup-error among `trials` interpolants on
/// randomly jittered Chebyshev-type nodes. No Remez iteration is involved.
pub fn random_fit_proxy<F: Fn(f64) -> f64 + Sync>(
    f: F,
    degree: usize,
    trials: usize,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if degree == 0 || trials == 0 {
        return Err(Error::InvalidArgument(
            "random fit proxy needs degree >= 1 and trials >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..trials {
        let mut nodes: Vec<f64> = (0..=degree)
            .map(|k| {
                let jitter = uniform01(&mut rng) - 0.5;
                let theta = PI * (k as f64 + 0.9 * jitter).clamp(0.0, degree as f64) / degree as f64;
                -theta.cos()
            })
            .collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        if nodes.len() != degree + 1 {
            continue;
        }
        let fvals: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
        let p = Interpolant::new(&nodes, &fvals)?;
        best = best.min(sup_error(&p, &f, samples));
    }
    Ok(best)
}

pub(crate) fn uniform01<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Plotting sweep with columns `x,f,p,lebesgue`.
pub fn sweep_table<F: Fn(f64) -> f64>(p: &Interpolant, f: F, samples: usize) -> Table {
    let m = samples.max(2) - 1;
    let mut t = Table::new(&["x", "f", "p", "lebesgue"]);
    for i in 0..=m {
        let x = -1.0 + 2.0 * i as f64 / m as f64;
        t.push_reals(&[x, f(x), p.eval(x), p.lebesgue_function(x)]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quadratic_is_reproduced() {
        let p = interpolate_fn(&NodeFamily::ChebyshevExtrema(2), |x| x * x).unwrap();
        for i in 0..50 {
            let x = -1.0 + i as f64 / 24.5;
            assert!((p.eval(x) - x * x).abs() < 1e-14);
        }
    }

    #[test]
    fn duplicate_nodes_rejected() {
        let err = Interpolant::new(&[0.0, 0.5, 0.0], &[1.0, 2.0, 3.0]).unwrap_err();
        assert!(matches!(err, Error::DuplicateNodes { first: 0, second: 2 }));
    }

    #[test]
    fn runge_uniform_diverges_chebyshev_converges() {
        let uni = interpolate_fn(&NodeFamily::Uniform(16), runge).unwrap();
        let cheb = interpolate_fn(&NodeFamily::ChebyshevExtrema(16), runge).unwrap();
        let eu = sup_error(&uni, runge, 4001);
        let ec = sup_error(&cheb, runge, 4001);
        assert!(eu > 1.0, "uniform error {eu}");
        assert!(ec < eu);
        let rows = runge_sweep(&[8, 16, 32], 2001).unwrap();
        let cheb_errs: Vec<f64> = rows
            .iter()
            .filter(|r| r.family == "chebyshev")
            .map(|r| r.sup_error)
            .collect();
        assert!(cheb_errs.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn two_point_lebesgue_constant() {
        let est = lebesgue_constant(&[-1.0, 1.0], LEBESGUE_DENSITY).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_lebesgue_matches_vertesi() {
        let nodes = cheb_nodes(&NodeFamily::ChebyshevExtrema(10)).unwrap();
        let est = lebesgue_constant(&nodes, LEBESGUE_DENSITY).unwrap();
        let v = vertesi_asymptote(10);
        assert!(((est.value - v) / v).abs() < 0.05, "{} vs {v}", est.value);
    }

    #[test]
    fn uniform_lebesgue_growth() {
        let l10 = lebesgue_constant(&cheb_nodes(&NodeFamily::Uniform(10)).unwrap(), 50).unwrap();
        let l20 = lebesgue_constant(&cheb_nodes(&NodeFamily::Uniform(20)).unwrap(), 50).unwrap();
        assert!(l20.value / l10.value > 100.0);
    }

    #[test]
    fn lebesgue_log_growth_band() {
        let mut n = 4;
        while n <= 32 {
            let a = lebesgue_constant(&cheb_nodes(&NodeFamily::ChebyshevExtrema(n)).unwrap(), 50)
                .unwrap()
                .value;
            let b = lebesgue_constant(
                &cheb_nodes(&NodeFamily::ChebyshevExtrema(2 * n)).unwrap(),
                50,
            )
            .unwrap()
            .value;
            assert!(b >= a && b - a <= 1.0, "N={n}: {a} -> {b}");
            n *= 2;
        }
    }

    #[test]
    fn near_best_bound_with_proxy() {
        let n = 16;
        let p = interpolate_fn(&NodeFamily::ChebyshevExtrema(n), runge).unwrap();
        let err = sup_error(&p, runge, 4001);
        let lambda = lebesgue_constant(&cheb_nodes(&NodeFamily::ChebyshevExtrema(n)).unwrap(), 50)
            .unwrap()
            .value;
        let proxy = random_fit_proxy(runge, n, 200, 2001, 7).unwrap();
        assert!(err <= (1.0 + lambda) * proxy);
    }

    #[test]
    fn sweep_columns() {
        let p = interpolate_fn(&NodeFamily::ChebyshevExtrema(4), runge).unwrap();
        let t = sweep_table(&p, runge, 11);
        assert_eq!(t.len(), 11);
        assert!(t.to_csv_string().starts_with("x,f,p,lebesgue\n"));
    }

    proptest! {
        #[test]
        fn nodal_exactness(vals in proptest::collection::vec(-100.0f64..100.0, 2..40)) {
            let n = vals.len() - 1;
            let nodes = cheb_nodes(&NodeFamily::ChebyshevExtrema(n)).unwrap();
            let p = Interpolant::new(&nodes, &vals).unwrap();
            for (x, f) in nodes.iter().zip(&vals) {
                prop_assert!((p.eval(*x) - f).abs() <= 1e-13);
            }
        }

        #[test]
        fn polynomial_reproduction(
            coeffs in proptest::collection::vec(-3.0f64..3.0, 1..12),
            x in -1.0f64..1.0,
        ) {
            let poly = |t: f64| coeffs.iter().fold(0.0, |acc, c| acc * t + c);
            let p = interpolate_fn(&NodeFamily::ChebyshevExtrema(coeffs.len()), poly).unwrap();
            prop_assert!((p.eval(x) - poly(x)).abs() <= 1e-10);
        }
    }
}
