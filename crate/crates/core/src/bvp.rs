//! Weighted-residual solutions of
//! `u'' + u' - 2u + 2 = 0` on `[-1, 1]`, `u(-1) = u(1) = 0`,
//! in a degree-N Chebyshev trial space.
//!
//! Every method assembles `N + 1` equations: two boundary rows
//! (`Σ a_k = 0`, `Σ (-1)^k a_k = 0`) and `N - 1` residual conditions.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::linalg::solve_square;
use crate::orthopoly::{cheb_diff, cheb_second_derivative, cheb_value, gauss_chebyshev, ChebSeries};
use crate::table::Table;
use crate::{Error, Result};

/// Extra Gauss-Chebyshev points beyond N used for every inner product.
pub const QUAD_EXTRA: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Tau,
    Galerkin,
    Collocation,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Tau, Method::Galerkin, Method::Collocation];

    pub fn name(self) -> &'static str {
        match self {
            Method::Tau => "tau",
            Method::Galerkin => "galerkin",
            Method::Collocation => "collocation",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown BVP method `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct BvpSolution {
    pub method: Method,
    pub coeffs: ChebSeries,
    /// Chebyshev-weighted L2 norm of the residual `u'' + u' - 2u + 2`.
    pub residual_norm: f64,
    /// `(u(-1), u(1))`.
    pub bc_residual: (f64, f64),
    pub condition: f64,
}

impl BvpSolution {
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.eval(x)
    }

    /// Residual series `u'' + u' - 2u + 2`.
    pub fn residual(&self) -> ChebSeries {
        residual_series(&self.coeffs)
    }
}

fn operator(a: &ChebSeries) -> ChebSeries {
    let d2 = cheb_second_derivative(a);
    let d1 = cheb_diff(a);
    let v: Vec<f64> = a
        .coeffs()
        .iter()
        .zip(d1.coeffs())
        .zip(d2.coeffs())
        .map(|((u, du), ddu)| ddu + du - 2.0 * u)
        .collect();
    ChebSeries::new(v)
}

fn residual_series(a: &ChebSeries) -> ChebSeries {
    let mut v = operator(a).coeffs().to_vec();
    v[0] += 2.0;
    ChebSeries::new(v)
}

/// Galerkin test function `φ_k = T_{k+2} - T_{k mod 2}`; zero at both ends.
pub fn galerkin_basis(k: usize) -> ChebSeries {
    let mut v = vec![0.0; k + 3];
    v[k + 2] = 1.0;
    v[k % 2] -= 1.0;
    ChebSeries::new(v)
}

/// Solve with trial degree `n >= 2`.
pub fn solve_bvp(method: Method, n: usize) -> Result<BvpSolution> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "trial degree must be >= 2, got {n}"
        )));
    }
    let q = n + QUAD_EXTRA;
    // L applied to each trial polynomial, kept in coefficient space.
    let columns: Vec<ChebSeries> = (0..=n).map(|k| operator(&ChebSeries::unit(k, n + 1))).collect();
    let mut a = DMatrix::<f64>::zeros(n + 1, n + 1);
    let mut b = DVector::<f64>::zeros(n + 1);

    let weighted = |lhs: &ChebSeries, test: &dyn Fn(f64) -> f64| {
        gauss_chebyshev(|x| lhs.eval(x) * test(x), q)
    };
    match method {
        Method::Tau => {
            for i in 0..=n - 2 {
                let test = move |x: f64| cheb_value(i, x);
                for (k, col) in columns.iter().enumerate() {
                    a[(i, k)] = weighted(col, &test);
                }
                b[i] = -2.0 * gauss_chebyshev(test, q);
            }
        }
        Method::Galerkin => {
            for i in 0..=n - 2 {
                let phi = galerkin_basis(i);
                let test = move |x: f64| phi.eval(x);
                for (k, col) in columns.iter().enumerate() {
                    a[(i, k)] = weighted(col, &test);
                }
                b[i] = -2.0 * gauss_chebyshev(test, q);
            }
        }
        Method::Collocation => {
            for i in 0..=n - 2 {
                let x = (std::f64::consts::PI * (i + 1) as f64 / n as f64).cos();
                for (k, col) in columns.iter().enumerate() {
                    a[(i, k)] = col.eval(x);
                }
                b[i] = -2.0;
            }
        }
    }
    for k in 0..=n {
        a[(n - 1, k)] = if k % 2 == 0 { 1.0 } else { -1.0 };
        a[(n, k)] = 1.0;
    }
    let solved = solve_square(a, b)?;
    log::debug!("bvp {method} N={n} cond={:.3e}", solved.condition);
    let coeffs = ChebSeries::new(solved.x.iter().cloned().collect());
    let res = residual_series(&coeffs);
    let residual_norm = gauss_chebyshev(|x| res.eval(x).powi(2), q).sqrt();
    Ok(BvpSolution {
        method,
        bc_residual: (coeffs.at_minus_one(), coeffs.at_one()),
        coeffs,
        residual_norm,
        condition: solved.condition,
    })
}

/// `1 - (sinh 2 / sinh 3) e^x - (sinh 1 / sinh 3) e^{-2x}`.
pub fn exact_bvp_solution(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > 1.0 + crate::orthopoly::DOMAIN_SLACK {
        return Err(Error::Domain {
            value: x,
            bound: 1.0,
        });
    }
    Ok(exact_unchecked(x))
}

fn exact_unchecked(x: f64) -> f64 {
    let s3 = 3f64.sinh();
    1.0 - 2f64.sinh() / s3 * x.exp() - 1f64.sinh() / s3 * (-2.0 * x).exp()
}

/// Max of `|u - u_exact|` on `samples` equispaced points.
pub fn sup_error(sol: &BvpSolution, samples: usize) -> f64 {
    let m = samples.max(2) - 1;
    (0..=m)
        .map(|i| {
            let x = -1.0 + 2.0 * i as f64 / m as f64;
            (sol.eval(x) - exact_unchecked(x)).abs()
        })
        .fold(0.0, f64::max)
}

/// Plot table `x,u_exact,u_tau,u_galerkin,u_collocation` on `points` nodes.
pub fn comparison_table(n: usize, points: usize) -> Result<Table> {
    let sols = Method::ALL
        .iter()
        .map(|&m| solve_bvp(m, n))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["x", "u_exact", "u_tau", "u_galerkin", "u_collocation"]);
    let m = points.max(2) - 1;
    for i in 0..=m {
        let x = -1.0 + 2.0 * i as f64 / m as f64;
        t.push_reals(&[
            x,
            exact_unchecked(x),
            sols[0].eval(x),
            sols[1].eval(x),
            sols[2].eval(x),
        ]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_solution_examples() {
        assert!(exact_bvp_solution(-1.0).unwrap().abs() < 1e-15);
        assert!(exact_bvp_solution(1.0).unwrap().abs() < 1e-15);
        let s3 = 3f64.sinh();
        let u0 = 1.0 - (2f64.sinh() + 1f64.sinh()) / s3;
        assert!((exact_bvp_solution(0.0).unwrap() - u0).abs() < 1e-15);
        assert!((u0 - 0.52065).abs() < 1e-5);
        assert!(exact_bvp_solution(1.5).is_err());
    }

    #[test]
    fn exact_solution_residual() {
        let h = 1e-5;
        let x = 0.5;
        let u = |t| exact_unchecked(t);
        let d1 = (u(x + h) - u(x - h)) / (2.0 * h);
        let d2 = (u(x + h) - 2.0 * u(x) + u(x - h)) / (h * h);
        // second difference at h = 1e-5 carries ~1e-6 rounding; use Richardson
        let h2 = 2.0 * h;
        let d2b = (u(x + h2) - 2.0 * u(x) + u(x - h2)) / (h2 * h2);
        let d2r = (4.0 * d2 - d2b) / 3.0;
        let res = d2r + d1 - 2.0 * u(x) + 2.0;
        assert!(res.abs() <= 1e-5, "{res}");
        // analytic derivatives give the sharp check
        let s3 = 3f64.sinh();
        let (a, b) = (2f64.sinh() / s3, 1f64.sinh() / s3);
        let du = -a * x.exp() + 2.0 * b * (-2.0 * x).exp();
        let ddu = -a * x.exp() - 4.0 * b * (-2.0 * x).exp();
        assert!((ddu + du - 2.0 * u(x) + 2.0).abs() <= 1e-9);
    }

    #[test]
    fn n4_boundary_rows_and_ordering() {
        let errs: Vec<f64> = Method::ALL
            .iter()
            .map(|&m| {
                let s = solve_bvp(m, 4).unwrap();
                assert!(s.bc_residual.0.abs() <= 1e-12 && s.bc_residual.1.abs() <= 1e-12);
                sup_error(&s, 1001)
            })
            .collect();
        let (tau, gal, col) = (errs[0], errs[1], errs[2]);
        assert!(gal < tau && col < tau);
        assert!(errs.iter().all(|&e| e < 0.05));
    }

    #[test]
    fn spectral_convergence() {
        for m in Method::ALL {
            let e = sup_error(&solve_bvp(m, 16).unwrap(), 1001);
            assert!(e <= 1e-10, "{m}: {e}");
        }
    }

    #[test]
    fn tau_residual_is_orthogonal() {
        let n = 10;
        let s = solve_bvp(Method::Tau, n).unwrap();
        let r = s.residual();
        for k in 0..=n - 2 {
            let ip = gauss_chebyshev(|x| r.eval(x) * cheb_value(k, x), n + QUAD_EXTRA);
            assert!(ip.abs() <= 1e-9, "k={k}: {ip}");
        }
    }

    #[test]
    fn collocation_residual_vanishes_at_nodes() {
        let n = 12;
        let s = solve_bvp(Method::Collocation, n).unwrap();
        let r = s.residual();
        for k in 1..n {
            let x = (std::f64::consts::PI * k as f64 / n as f64).cos();
            assert!(r.eval(x).abs() <= 1e-10);
        }
    }

    #[test]
    fn galerkin_basis_vanishes_at_ends() {
        for k in 0..20 {
            let phi = galerkin_basis(k);
            assert_eq!(phi.at_one(), 0.0);
            assert_eq!(phi.at_minus_one(), 0.0);
        }
    }

    #[test]
    fn degree_too_small() {
        assert!(solve_bvp(Method::Tau, 1).is_err());
        assert_eq!("galerkin".parse::<Method>().unwrap(), Method::Galerkin);
    }

    #[test]
    fn comparison_table_shape() {
        let t = comparison_table(4, 401).unwrap();
        assert_eq!(t.len(), 401);
    }
}
