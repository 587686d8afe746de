//! Chebyshev polynomials in monomial and coefficient space, node families,
//! Gauss-Chebyshev quadrature, coefficient-space calculus, and Hermite
//! functions.
//!
//! Two coefficient conventions coexist and conversions between them are
//! explicit:
//!
//! - [`DensePoly`] stores monomial coefficients highest degree first, the
//!   layout used by Horner evaluation.
//! - [`ChebSeries`] stores Chebyshev coefficients `v_0..v_N` lowest degree
//!   first, so that `v[k]` multiplies `T_k`.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Tolerance on `|x| - 1` accepted by the checked evaluators.
pub const DOMAIN_SLACK: f64 = 1e-14;

/// Largest Hermite index accepted by [`hermite_funcs`].
pub const HERMITE_MAX_INDEX: usize = 128;

/// Polynomial in monomial form, highest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct DensePoly {
    coeffs: Vec<f64>,
}

impl DensePoly {
    /// An empty coefficient list is read as the zero polynomial.
    pub fn new(coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            DensePoly { coeffs: vec![0.0] }
        } else {
            DensePoly { coeffs }
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[0]
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
    }
}

/// `T_0..=T_n` in monomial form, built with the three-term recurrence
/// `T_{k+1} = 2x T_k - T_{k-1}`.
pub fn cheb_polys(n: usize) -> Vec<DensePoly> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    out.push(vec![1.0]);
    if n >= 1 {
        out.push(vec![1.0, 0.0]);
    }
    for k in 2..=n {
        // 2x * T_{k-1}: shift left by appending a zero.
        let mut next: Vec<f64> = out[k - 1].iter().map(|c| 2.0 * c).collect();
        next.push(0.0);
        let prev = &out[k - 2];
        let offset = next.len() - prev.len();
        for (i, c) in prev.iter().enumerate() {
            next[offset + i] -= c;
        }
        out.push(next);
    }
    out.into_iter().map(DensePoly::new).collect()
}

fn check_domain(x: f64) -> Result<()> {
    if !x.is_finite() || x.abs() > 1.0 + DOMAIN_SLACK {
        return Err(Error::Domain {
            value: x,
            bound: 1.0 + DOMAIN_SLACK,
        });
    }
    Ok(())
}

/// `T_k(x)` by forward recurrence, without a domain check.
pub(crate) fn cheb_value(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..k {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `T_k(x)` for `|x| <= 1`.
///
/// Uses the three-term recurrence rather than `cos(k acos x)`: the recurrence
/// is exact at `x = ±1` and does not inherit the ill-conditioning of `acos`
/// near the endpoints.
pub fn cheb_eval(k: usize, x: f64) -> Result<f64> {
    check_domain(x)?;
    Ok(cheb_value(k, x))
}

/// Interpolation node families on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeFamily {
    /// `x_k = -cos(pi k / N)`, `k = 0..=N` (N + 1 nodes).
    ChebyshevExtrema(usize),
    /// Zeros of `T_n`, sorted ascending (n nodes).
    ChebyshevZeros(usize),
    /// Equispaced, endpoints included (N + 1 nodes).
    Uniform(usize),
    /// Caller-supplied nodes, e.g. a Legendre-type family.
    Custom(Vec<f64>),
}

impl NodeFamily {
    pub fn nodes(&self) -> Result<Vec<f64>> {
        cheb_nodes(self)
    }
}

/// Node positions for a family, strictly increasing in `[-1, 1]`.
pub fn cheb_nodes(family: &NodeFamily) -> Result<Vec<f64>> {
    match family {
        NodeFamily::ChebyshevExtrema(n) | NodeFamily::ChebyshevZeros(n) | NodeFamily::Uniform(n)
            if *n < 1 =>
        {
            Err(Error::InvalidArgument(
                "node family needs N >= 1".to_string(),
            ))
        }
        // -cos(pi k/N) written as a sine so the set is exactly symmetric.
        NodeFamily::ChebyshevExtrema(n) => {
            let nf = *n as f64;
            Ok((0..=*n)
                .map(|k| (PI * (2.0 * k as f64 - nf) / (2.0 * nf)).sin())
                .collect())
        }
        NodeFamily::ChebyshevZeros(n) => {
            let nf = *n as f64;
            Ok((0..*n)
                .map(|j| (PI * (2.0 * j as f64 + 1.0 - nf) / (2.0 * nf)).sin())
                .collect())
        }
        NodeFamily::Uniform(n) => {
            let nf = *n as f64;
            Ok((0..=*n)
                .map(|k| -1.0 + 2.0 * k as f64 / nf)
                .collect())
        }
        NodeFamily::Custom(nodes) => {
            if nodes.is_empty() {
                return Err(Error::InvalidArgument("empty custom node set".into()));
            }
            for (i, &x) in nodes.iter().enumerate() {
                check_domain(x)?;
                if i > 0 && x <= nodes[i - 1] {
                    return Err(Error::InvalidArgument(format!(
                        "custom nodes must be strictly increasing (index {i})"
                    )));
                }
            }
            Ok(nodes.clone())
        }
    }
}

/// Gauss-Chebyshev quadrature of `∫ f(x) / sqrt(1 - x^2) dx` over `[-1, 1]`
/// with `q` points; exact for polynomial `f` of degree `<= 2q - 1`.
pub fn gauss_chebyshev<F: Fn(f64) -> f64>(f: F, q: usize) -> f64 {
    assert!(q > 0, "quadrature needs at least one point");
    let qf = q as f64;
    let sum: f64 = (1..=q)
        .map(|i| f((PI * (2.0 * i as f64 - 1.0) / (2.0 * qf)).cos()))
        .sum();
    PI / qf * sum
}

/// Weighted inner product `<T_m, T_n>` by `quad_points`-point Gauss-Chebyshev
/// quadrature. Requires `quad_points >= m + n + 1`.
pub fn cheb_inner(m: usize, n: usize, quad_points: usize) -> Result<f64> {
    if quad_points < m + n + 1 {
        return Err(Error::InvalidArgument(format!(
            "{quad_points} quadrature points cannot integrate degree {} exactly",
            m + n
        )));
    }
    Ok(gauss_chebyshev(
        |x| cheb_value(m, x) * cheb_value(n, x),
        quad_points,
    ))
}

/// Truncated Chebyshev expansion `Σ v_k T_k(x)` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    v: Vec<f64>,
}

impl ChebSeries {
    pub fn new(v: Vec<f64>) -> Self {
        if v.is_empty() {
            ChebSeries { v: vec![0.0] }
        } else {
            ChebSeries { v }
        }
    }

    /// `T_k` padded with zeros to `len` coefficients.
    pub fn unit(k: usize, len: usize) -> Self {
        let mut v = vec![0.0; len.max(k + 1)];
        v[k] = 1.0;
        ChebSeries { v }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.v
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Truncation degree N (the series has N + 1 coefficients).
    pub fn degree(&self) -> usize {
        self.v.len() - 1
    }

    /// Clenshaw summation.
    pub fn eval(&self, x: f64) -> f64 {
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.v.iter().skip(1).rev() {
            let b0 = c + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.v[0] + x * b1 - b2
    }

    /// Value at `x = 1`, i.e. `Σ v_k`.
    pub fn at_one(&self) -> f64 {
        self.v.iter().sum()
    }

    /// Value at `x = -1`, i.e. `Σ (-1)^k v_k`.
    pub fn at_minus_one(&self) -> f64 {
        self.v
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 0 { *c } else { -*c })
            .sum()
    }

    pub fn derivative(&self) -> ChebSeries {
        cheb_diff(self)
    }

    /// Monomial form, highest degree first.
    pub fn to_dense(&self) -> DensePoly {
        let n = self.degree();
        let basis = cheb_polys(n);
        let mut out = vec![0.0; n + 1];
        for (k, (c, t)) in self.v.iter().zip(&basis).enumerate() {
            // T_k has k + 1 coefficients; align its constant term with ours.
            let offset = n - k;
            for (i, tc) in t.coeffs().iter().enumerate() {
                out[offset + i] += c * tc;
            }
        }
        DensePoly::new(out)
    }

    /// Chebyshev coefficients of a monomial-form polynomial, by Horner's rule
    /// carried out in the Chebyshev basis (`x T_k = (T_{k+1} + T_{|k-1|}) / 2`).
    pub fn from_dense(p: &DensePoly) -> ChebSeries {
        let n = p.degree();
        let mut s = vec![0.0; n + 1];
        for &c in p.coeffs() {
            let mut xs = vec![0.0; n + 1];
            for (k, &sk) in s.iter().enumerate() {
                if sk == 0.0 {
                    continue;
                }
                if k == 0 {
                    xs[1] += sk;
                } else {
                    if k + 1 <= n {
                        xs[k + 1] += 0.5 * sk;
                    }
                    xs[k - 1] += 0.5 * sk;
                }
            }
            xs[0] += c;
            s = xs;
        }
        ChebSeries::new(s)
    }

    /// Product of two series, expanded with `T_m T_n = (T_{n+m} + T_{n-m}) / 2`.
    pub fn product(&self, other: &ChebSeries) -> ChebSeries {
        let mut out = vec![0.0; self.degree() + other.degree() + 1];
        for (i, &a) in self.v.iter().enumerate() {
            for (j, &b) in other.v.iter().enumerate() {
                let (m, n) = if i <= j { (i, j) } else { (j, i) };
                for (idx, w) in product_terms(m, n) {
                    out[idx] += w * a * b;
                }
            }
        }
        ChebSeries::new(out)
    }
}

/// First-derivative coefficients from the explicit summation
/// `v'_k = (2 / δ_k) Σ_{j > k, j + k odd} j v_j` with `δ_0 = 2`, `δ_k = 1`.
/// The result keeps the input length; its top coefficient is zero.
pub fn cheb_diff(series: &ChebSeries) -> ChebSeries {
    let v = series.coeffs();
    let n = v.len() - 1;
    let mut out = vec![0.0; n + 1];
    for (k, slot) in out.iter_mut().enumerate().take(n) {
        let delta = if k == 0 { 2.0 } else { 1.0 };
        let sum: f64 = ((k + 1)..=n)
            .step_by(2)
            .map(|j| j as f64 * v[j])
            .sum();
        *slot = 2.0 / delta * sum;
    }
    ChebSeries::new(out)
}

/// `order`-th derivative coefficients by the backward recurrence
/// `δ_{k-1} v^{(n)}_{k-1} = v^{(n)}_{k+1} + 2k v^{(n-1)}_k`, `k >= 1`.
///
/// Tail conditions: `v^{(n)}_N = 0` and `v^{(n)}_{N+1} = 0`, which gives
/// `v^{(n)}_{N-1} = 2N v^{(n-1)}_N`; both follow from the derivative of a
/// degree-N series having degree N - 1.
pub fn cheb_diff_recurrence(series: &ChebSeries, order: usize) -> ChebSeries {
    let mut cur = series.coeffs().to_vec();
    let n = cur.len() - 1;
    for _ in 0..order {
        let mut next = vec![0.0; n + 2];
        for k in (1..=n).rev() {
            let delta = if k == 1 { 2.0 } else { 1.0 };
            next[k - 1] = (next[k + 1] + 2.0 * k as f64 * cur[k]) / delta;
        }
        next.truncate(n + 1);
        cur = next;
    }
    ChebSeries::new(cur)
}

/// Second-derivative coefficients from the explicit formula
/// `v''_k = (1 / δ_k) Σ_{j >= k+2, j + k even} j (j^2 - k^2) v_j`.
pub fn cheb_second_derivative(series: &ChebSeries) -> ChebSeries {
    let v = series.coeffs();
    let n = v.len() - 1;
    let mut out = vec![0.0; n + 1];
    for (k, slot) in out.iter_mut().enumerate() {
        let delta = if k == 0 { 2.0 } else { 1.0 };
        let kf = k as f64;
        let sum: f64 = ((k + 2)..=n)
            .step_by(2)
            .map(|j| {
                let jf = j as f64;
                jf * (jf * jf - kf * kf) * v[j]
            })
            .sum();
        *slot = sum / delta;
    }
    ChebSeries::new(out)
}

fn product_terms(m: usize, n: usize) -> [(usize, f64); 2] {
    [(n + m, 0.5), (n - m, 0.5)]
}

/// Linearisation `T_m T_n = ½ T_{n+m} + ½ T_{n-m}` for `n >= m`, returned as
/// `(index, weight)` pairs.
pub fn cheb_product(m: usize, n: usize) -> Result<[(usize, f64); 2]> {
    if m > n {
        return Err(Error::InvalidArgument(format!(
            "product identity needs n >= m (got m = {m}, n = {n})"
        )));
    }
    Ok(product_terms(m, n))
}

/// Max over `samples` equispaced points of `|T_m(T_n(x)) - T_{mn}(x)|`.
pub fn cheb_compose_check(m: usize, n: usize, samples: usize) -> f64 {
    let samples = samples.max(2);
    (0..samples)
        .map(|i| {
            let x = -1.0 + 2.0 * i as f64 / (samples - 1) as f64;
            let inner = cheb_value(n, x);
            (cheb_value(m, inner) - cheb_value(m * n, x)).abs()
        })
        .fold(0.0, f64::max)
}

/// Physicists' Hermite polynomials `H_0..=H_n` at `x`
/// (`H_{k+1} = 2x H_k - 2k H_{k-1}`).
pub fn hermite_polys(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(2.0 * x);
    }
    for k in 1..n {
        let next = 2.0 * x * out[k] - 2.0 * k as f64 * out[k - 1];
        out.push(next);
    }
    out
}

/// Hermite functions `H_k(x) e^{-x^2/2} / sqrt(2^k k!)` for `k = 0..=n`.
///
/// Row `k` of the result holds `𝓗_k` at every entry of `xs`. The raw
/// polynomial is carried with a running exponent and the normalisation uses a
/// running log-factorial, so no intermediate overflows. These functions are
/// orthogonal with `∫ 𝓗_m 𝓗_n dx = sqrt(pi) δ_mn`.
pub fn hermite_funcs(n: usize, xs: &[f64]) -> Result<Vec<Vec<f64>>> {
    if n > HERMITE_MAX_INDEX {
        return Err(Error::InvalidArgument(format!(
            "Hermite index {n} exceeds {HERMITE_MAX_INDEX}"
        )));
    }
    const RESCALE: f64 = 1e200;
    let ln_rescale = RESCALE.ln();
    let mut rows = vec![vec![0.0; xs.len()]; n + 1];
    for (col, &x) in xs.iter().enumerate() {
        let (mut prev, mut cur) = (0.0f64, 1.0f64);
        let mut log_scale = 0.0;
        let mut log_norm = 0.0; // ½ ln(2^k k!)
        let gauss = -0.5 * x * x;
        for (k, row) in rows.iter_mut().enumerate() {
            if k > 0 {
                log_norm += 0.5 * (2.0 * k as f64).ln();
                let next = 2.0 * x * cur - 2.0 * (k - 1) as f64 * prev;
                prev = cur;
                cur = next;
                if cur.abs() > RESCALE {
                    cur /= RESCALE;
                    prev /= RESCALE;
                    log_scale += ln_rescale;
                }
            }
            row[col] = if cur == 0.0 {
                0.0
            } else {
                cur.signum() * (cur.abs().ln() + log_scale + gauss - log_norm).exp()
            };
        }
    }
    Ok(rows)
}
