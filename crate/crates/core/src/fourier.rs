//! Periodic pseudo-spectral engine on `[-l, l)`.
//!
//! Conventions: the forward transform is unnormalised and the inverse carries
//! `1/N`. Coefficients are stored in FFT order, i.e. wavenumbers
//! `[0, 1, .., N/2, 1-N/2, .., -1] * pi/l`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::table::{Cell, Table};
use crate::{Error, Result};

/// Relative tolerance on the imaginary part left after an inverse transform
/// of a field that should be real.
pub const REAL_RESIDUE_TOL: f64 = 1e-10;

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Plans {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Plans {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }
}

struct GridInner {
    n: usize,
    l: f64,
    plans: Plans,
    padded: OnceLock<Plans>,
}

/// Uniform periodic grid with `N` points on `[-l, l)` and cached FFT plans.
/// Cloning is cheap; clones share the plans.
#[derive(Clone)]
pub struct PeriodicGrid {
    inner: Arc<GridInner>,
}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("n", &self.inner.n)
            .field("l", &self.inner.l)
            .finish()
    }
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n == other.inner.n && self.inner.l == other.inner.l
    }
}

impl PeriodicGrid {
    /// `n` must be even and at least 4; `l` positive.
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "periodic grid needs an even N >= 4, got {n}"
            )));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "half-length must be positive, got {l}"
            )));
        }
        if !n.is_power_of_two() {
            log::debug!("grid size {n} is not a power of two");
        }
        Ok(PeriodicGrid {
            inner: Arc::new(GridInner {
                n,
                l,
                plans: Plans::new(n),
                padded: OnceLock::new(),
            }),
        })
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn l(&self) -> f64 {
        self.inner.l
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.inner.l / self.inner.n as f64
    }

    /// `x_j = (1 - N/2 + j) dx`, `j = 0..N`.
    pub fn nodes(&self) -> Vec<f64> {
        let n = self.inner.n as i64;
        let dx = self.dx();
        (0..n).map(|j| (1 - n / 2 + j) as f64 * dx).collect()
    }

    /// Signed integer mode index of FFT slot `j`.
    pub fn mode_index(&self, j: usize) -> i64 {
        let n = self.inner.n;
        if j <= n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    pub fn mode_indices(&self) -> Vec<i64> {
        (0..self.inner.n).map(|j| self.mode_index(j)).collect()
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let dk = PI / self.inner.l;
        self.mode_indices().into_iter().map(|m| m as f64 * dk).collect()
    }

    /// Size of the zero-padded grid used by the 3/2 rule.
    pub fn padded_len(&self) -> usize {
        3 * self.inner.n / 2
    }

    fn padded_plans(&self) -> &Plans {
        self.inner
            .padded
            .get_or_init(|| Plans::new(self.padded_len()))
    }

    /// Unnormalised forward transform of complex samples.
    pub fn fft(&self, data: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(data.len())?;
        let mut buf = data.to_vec();
        self.inner.plans.forward.process(&mut buf);
        Ok(buf)
    }

    /// Inverse transform including the `1/N` factor.
    pub fn ifft(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(coeffs.len())?;
        let mut buf = coeffs.to_vec();
        self.inner.plans.inverse.process(&mut buf);
        let scale = 1.0 / self.inner.n as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        Ok(buf)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.inner.n {
            return Err(Error::SizeMismatch {
                expected: self.inner.n,
                found: len,
            });
        }
        Ok(())
    }

    /// 3/2-rule product using this grid's cached padded plans.
    pub fn dealias_product(&self, u: &[Complex64], v: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        let p = self.padded_plans();
        Ok(dealias_with(&*p.forward, &*p.inverse, u, v))
    }
}

/// Real field on a periodic grid, held in physical space, spectral space, or
/// both.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: PeriodicGrid,
    values: Option<Vec<f64>>,
    coeffs: Option<Vec<Complex64>>,
}

/// Which representation(s) a [`SpectralField`] currently holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Spectral,
    Both,
}

impl SpectralField {
    pub fn from_values(grid: &PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        grid.check_len(values.len())?;
        Ok(SpectralField {
            grid: grid.clone(),
            values: Some(values),
            coeffs: None,
        })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: &PeriodicGrid, f: F) -> Self {
        SpectralField {
            grid: grid.clone(),
            values: Some(grid.nodes().into_iter().map(f).collect()),
            coeffs: None,
        }
    }

    /// Coefficients in FFT order; they should be Hermitian for the field to
    /// be real, which is checked when values are requested.
    pub fn from_coeffs(grid: &PeriodicGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        grid.check_len(coeffs.len())?;
        Ok(SpectralField {
            grid: grid.clone(),
            values: None,
            coeffs: Some(coeffs),
        })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        match (&self.values, &self.coeffs) {
            (Some(_), Some(_)) => Representation::Both,
            (Some(_), None) => Representation::Physical,
            _ => Representation::Spectral,
        }
    }

    /// Physical samples, transforming if needed.
    pub fn values(&self) -> Result<Vec<f64>> {
        match (&self.values, &self.coeffs) {
            (Some(v), _) => Ok(v.clone()),
            (None, Some(c)) => real_part_checked(self.grid.ifft(c)?),
            (None, None) => unreachable!("field without representation"),
        }
    }

    /// Spectral coefficients, transforming if needed.
    pub fn coeffs(&self) -> Result<Vec<Complex64>> {
        match (&self.coeffs, &self.values) {
            (Some(c), _) => Ok(c.clone()),
            (None, Some(v)) => {
                let data: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                self.grid.fft(&data)
            }
            (None, None) => unreachable!("field without representation"),
        }
    }

    /// Mean over the grid, i.e. the zeroth coefficient divided by N.
    pub fn mean(&self) -> Result<f64> {
        match &self.values {
            Some(v) => Ok(v.iter().sum::<f64>() / v.len() as f64),
            None => Ok(self.coeffs()?[0].re / self.grid.n() as f64),
        }
    }

    /// Coefficient dump with columns `k_index,k_value,re,im` in FFT order.
    pub fn coeff_table(&self) -> Result<Table> {
        let coeffs = self.coeffs()?;
        let dk = PI / self.grid.l();
        let mut t = Table::new(&["k_index", "k_value", "re", "im"]);
        for (j, c) in coeffs.iter().enumerate() {
            let m = self.grid.mode_index(j);
            t.push(vec![
                Cell::Int(m),
                Cell::Real(m as f64 * dk),
                Cell::Real(c.re),
                Cell::Real(c.im),
            ]);
        }
        Ok(t)
    }
}

fn real_part_checked(data: Vec<Complex64>) -> Result<Vec<f64>> {
    let scale = data.iter().map(|c| c.re.abs()).fold(1.0, f64::max);
    let residue = data.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if !(residue <= REAL_RESIDUE_TOL * scale) {
        return Err(Error::NotReal { residue });
    }
    Ok(data.into_iter().map(|c| c.re).collect())
}

/// Field holding only coefficients.
pub fn dft_forward(field: &SpectralField) -> Result<SpectralField> {
    SpectralField::from_coeffs(&field.grid, field.coeffs()?)
}

/// Field holding only physical values.
pub fn dft_inverse(field: &SpectralField) -> Result<SpectralField> {
    SpectralField::from_values(&field.grid, field.values()?)
}

/// `order`-th derivative: coefficients times `(ik)^order`. For odd orders the
/// Nyquist coefficient is set to zero because its multiplier has no
/// consistent sign.
pub fn spectral_derivative(field: &SpectralField, order: u32) -> Result<SpectralField> {
    let grid = &field.grid;
    let mut coeffs = field.coeffs()?;
    apply_derivative(grid, &mut coeffs, order);
    let out = SpectralField::from_coeffs(grid, coeffs)?;
    // Validate realness once here so callers get the error at the source.
    let values = out.values()?;
    Ok(SpectralField {
        grid: grid.clone(),
        values: Some(values),
        coeffs: out.coeffs,
    })
}

/// In-place `(ik)^order` multiplier with the odd-order Nyquist rule.
pub(crate) fn apply_derivative(grid: &PeriodicGrid, coeffs: &mut [Complex64], order: u32) {
    if order == 0 {
        return;
    }
    let i_pow = Complex64::i().powu(order);
    let nyquist = grid.n() / 2;
    for (j, (c, k)) in coeffs.iter_mut().zip(grid.wavenumbers()).enumerate() {
        if j == nyquist && order % 2 == 1 {
            *c = Complex64::new(0.0, 0.0);
        } else {
            *c *= i_pow * k.powi(order as i32);
        }
    }
}

/// Exact heat propagator: every coefficient is damped by `exp(-nu k^2 t)`.
pub fn heat_propagate(field: &SpectralField, nu: f64, t: f64) -> Result<SpectralField> {
    if !(nu >= 0.0) || !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "heat propagator needs nu >= 0 and t >= 0 (got nu = {nu}, t = {t})"
        )));
    }
    let grid = &field.grid;
    let mut coeffs = field.coeffs()?;
    for (c, k) in coeffs.iter_mut().zip(grid.wavenumbers()) {
        *c *= (-nu * k * k * t).exp();
    }
    SpectralField::from_coeffs(grid, coeffs)
}

fn dealias_with(
    forward: &dyn Fft<f64>,
    inverse: &dyn Fft<f64>,
    u: &[Complex64],
    v: &[Complex64],
) -> Vec<Complex64> {
    let n = u.len();
    let m = 3 * n / 2;
    let pad = |c: &[Complex64]| {
        let mut out = vec![Complex64::new(0.0, 0.0); m];
        out[..n / 2].copy_from_slice(&c[..n / 2]);
        out[m - n / 2..].copy_from_slice(&c[n / 2..]);
        out
    };
    let mut up = pad(u);
    let mut vp = pad(v);
    inverse.process(&mut up);
    inverse.process(&mut vp);
    let inv_m = 1.0 / m as f64;
    let mut w: Vec<Complex64> = up
        .iter()
        .zip(&vp)
        .map(|(a, b)| a * inv_m * (b * inv_m))
        .collect();
    forward.process(&mut w);
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&w[..n / 2]);
    out.extend_from_slice(&w[m - n / 2..]);
    out.iter_mut().for_each(|c| *c *= 1.5);
    out
}

/// 3/2-rule dealiased product of two coefficient vectors of equal even
/// length. Both inputs are zero-padded to `M = 3N/2`, multiplied in physical
/// space on the padded grid, and the result is truncated back to N modes and
/// rescaled by 3/2.
pub fn dealias_product(u: &[Complex64], v: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = u.len();
    if v.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: v.len(),
        });
    }
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "3/2 padding needs an even length, got {n}"
        )));
    }
    let mut planner = FftPlanner::new();
    let m = 3 * n / 2;
    let forward = planner.plan_fft_forward(m);
    let inverse = planner.plan_fft_inverse(m);
    Ok(dealias_with(&*forward, &*inverse, u, v))
}

/// Product formed directly on the N-point grid, with whatever aliasing that
/// entails.
pub fn naive_product(u: &[Complex64], v: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = u.len();
    if v.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: v.len(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("empty coefficient vector".into()));
    }
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut a = u.to_vec();
    let mut b = v.to_vec();
    inverse.process(&mut a);
    inverse.process(&mut b);
    let inv = 1.0 / n as f64;
    let mut w: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y * inv * inv).collect();
    forward.process(&mut w);
    Ok(w)
}

/// Decomposition of a finite Fourier spectrum against an N-point grid.
#[derive(Debug, Clone)]
pub struct AliasReport {
    /// Resolved mode range `k_min..=k_max`.
    pub k_min: i64,
    pub k_max: i64,
    /// Discrete (interpolation) coefficients `v̂_k = Σ_j v_{k+jN}`.
    pub interp_coeffs: BTreeMap<i64, Complex64>,
    /// Exact coefficients restricted to the resolved range.
    pub trunc_coeffs: BTreeMap<i64, Complex64>,
    /// `‖u - T_N u‖`.
    pub trunc_error_norm: f64,
    /// `‖u - I_N u‖`.
    pub interp_error_norm: f64,
    /// `‖R_N u‖ = ‖I_N u - T_N u‖`.
    pub alias_norm: f64,
}

/// Folding of a finite spectrum `{k -> v_k}` (basis `e^{ikx}`) onto an
/// N-point grid. Norms are taken with `‖e^{ikx}‖ = 1`.
///
/// The resolved range is `[N/2 - N + 1, N/2]` (floor division), which is the
/// grid's FFT layout for even N and the symmetric `[-m, m]` for `N = 2m + 1`.
pub fn aliasing_error(spectrum: &BTreeMap<i64, Complex64>, n: usize) -> Result<AliasReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("grid size must be positive".into()));
    }
    let ni = n as i64;
    let k_max = ni / 2;
    let k_min = k_max - ni + 1;
    let zero = Complex64::new(0.0, 0.0);
    let mut interp: BTreeMap<i64, Complex64> = (k_min..=k_max).map(|k| (k, zero)).collect();
    let mut trunc = interp.clone();
    let mut outside = 0.0;
    for (&k, &c) in spectrum {
        let folded = (k - k_min).rem_euclid(ni) + k_min;
        *interp.get_mut(&folded).unwrap() += c;
        if (k_min..=k_max).contains(&k) {
            *trunc.get_mut(&k).unwrap() += c;
        } else {
            outside += c.norm_sqr();
        }
    }
    let alias_sq: f64 = interp
        .iter()
        .map(|(k, c)| (c - trunc[k]).norm_sqr())
        .sum();
    Ok(AliasReport {
        k_min,
        k_max,
        interp_coeffs: interp,
        trunc_coeffs: trunc,
        trunc_error_norm: outside.sqrt(),
        interp_error_norm: (outside + alias_sq).sqrt(),
        alias_norm: alias_sq.sqrt(),
    })
}

/// Equispaced closed grid on `[-pi, pi]` with both endpoints, `points` nodes.
pub fn closed_grid(points: usize) -> Vec<f64> {
    let denom = (points.max(2) - 1) as f64;
    (0..points)
        .map(|j| -PI + 2.0 * PI * j as f64 / denom)
        .collect()
}

/// Max over the closed grid of `|cos(k1 x) - cos(k2 x)|`.
pub fn closed_grid_deviation(k1: i64, k2: i64, points: usize) -> f64 {
    closed_grid(points)
        .into_iter()
        .map(|x| ((k1 as f64 * x).cos() - (k2 as f64 * x).cos()).abs())
        .fold(0.0, f64::max)
}

/// Benchmark function `sin(π(x+1)) e^{sin(π(x+1))}` on `[-1, 1)` and its
/// first three derivatives.
pub fn benchmark_function(x: f64) -> [f64; 4] {
    let (s, c) = (PI * (x + 1.0)).sin_cos();
    let e = s.exp();
    [
        s * e,
        PI * c * (1.0 + s) * e,
        PI * PI * e * (c * c * (2.0 + s) - s * (1.0 + s)),
        PI.powi(3) * e * c * (c * c * (3.0 + s) - 3.0 * s * s - 7.0 * s - 1.0),
    ]
}

/// Relative sup-errors of spectral derivatives of orders 1..=3 of
/// [`benchmark_function`] on an `n`-point grid.
pub fn derivative_benchmark(n: usize) -> Result<[f64; 3]> {
    let grid = PeriodicGrid::new(n, 1.0)?;
    let f = SpectralField::from_fn(&grid, |x| benchmark_function(x)[0]);
    let x = grid.nodes();
    let mut out = [0.0; 3];
    for (order, slot) in out.iter_mut().enumerate() {
        let got = spectral_derivative(&f, order as u32 + 1)?.values()?;
        let (mut err, mut sup) = (0.0f64, 0.0f64);
        for (xi, gi) in x.iter().zip(&got) {
            let ex = benchmark_function(*xi)[order + 1];
            err = err.max((gi - ex).abs());
            sup = sup.max(ex.abs());
        }
        *slot = err / sup;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_abs(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn grid_layout() {
        let g = PeriodicGrid::new(8, 1.0).unwrap();
        assert_eq!(g.mode_indices(), vec![0, 1, 2, 3, 4, -3, -2, -1]);
        let x = g.nodes();
        assert!((x[0] + 0.75).abs() < 1e-15 && (x[7] - 1.0).abs() < 1e-15);
        assert!(PeriodicGrid::new(6, 1.0).is_ok());
        assert!(PeriodicGrid::new(7, 1.0).is_err());
        assert!(PeriodicGrid::new(2, 1.0).is_err());
    }

    #[test]
    fn constant_field_has_only_mode_zero() {
        let g = PeriodicGrid::new(16, 1.0).unwrap();
        let f = SpectralField::from_fn(&g, |_| 1.0);
        let cf = f.coeffs().unwrap();
        assert!((cf[0] - c(16.0, 0.0)).norm() < 1e-13);
        assert!(cf[1..].iter().all(|z| z.norm() < 1e-13));
        let d = spectral_derivative(&f, 1).unwrap();
        assert!(d.values().unwrap().iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn single_cosine_mode() {
        let g = PeriodicGrid::new(8, 2.0).unwrap();
        let f = SpectralField::from_fn(&g, |x| (PI * x / 2.0).cos());
        let cf = f.coeffs().unwrap();
        for (j, z) in cf.iter().enumerate() {
            let m = g.mode_index(j);
            if m.abs() == 1 {
                assert!(z.norm() > 1.0);
            } else {
                assert!(z.norm() < 1e-13, "mode {m}");
            }
        }
    }

    #[test]
    fn derivative_benchmark_orders() {
        let g = PeriodicGrid::new(32, 1.0).unwrap();
        let s = |x: f64| (PI * (x + 1.0)).sin();
        let co = |x: f64| (PI * (x + 1.0)).cos();
        let f = SpectralField::from_fn(&g, |x| s(x) * s(x).exp());
        let d1 = |x: f64| PI * co(x) * (1.0 + s(x)) * s(x).exp();
        let d2 = |x: f64| {
            PI * PI * s(x).exp() * (co(x) * co(x) * (2.0 + s(x)) - s(x) * (1.0 + s(x)))
        };
        let x = g.nodes();
        for (order, exact, tol) in [(1u32, &d1 as &dyn Fn(f64) -> f64, 1e-12), (2, &d2, 1e-12)] {
            let ex: Vec<f64> = x.iter().map(|&v| exact(v)).collect();
            let got = spectral_derivative(&f, order).unwrap().values().unwrap();
            let sup = ex.iter().map(|v| v.abs()).fold(0.0, f64::max);
            assert!(max_abs(&got, &ex) / sup < tol, "order {order}");
        }
    }

    #[test]
    fn benchmark_derivatives_consistent() {
        let h = 1e-5;
        for x in [-0.7, 0.1, 0.55] {
            let f = benchmark_function(x);
            let (p, m) = (benchmark_function(x + h), benchmark_function(x - h));
            for k in 0..3 {
                let fd = (p[k] - m[k]) / (2.0 * h);
                assert!((fd - f[k + 1]).abs() < 1e-6 * (1.0 + f[k + 1].abs()), "order {k}");
            }
        }
        let eps = derivative_benchmark(32).unwrap();
        assert!(eps[0] <= 1e-12 && eps[1] <= 1e-12 && eps[2] <= 1e-11, "{eps:?}");
    }

    #[test]
    fn odd_derivative_zeroes_nyquist() {
        let g = PeriodicGrid::new(8, 1.0).unwrap();
        // cos(4 pi x) on 8 points is the Nyquist mode
        let f = SpectralField::from_fn(&g, |x| (4.0 * PI * x).cos());
        let d1 = spectral_derivative(&f, 1).unwrap().values().unwrap();
        assert!(d1.iter().all(|v| v.abs() < 1e-12));
        let d2 = spectral_derivative(&f, 2).unwrap().values().unwrap();
        let want: Vec<f64> = g
            .nodes()
            .iter()
            .map(|x| -16.0 * PI * PI * (4.0 * PI * x).cos())
            .collect();
        assert!(max_abs(&d2, &want) < 1e-10);
    }

    #[test]
    fn non_hermitian_coefficients_are_not_real() {
        let g = PeriodicGrid::new(8, 1.0).unwrap();
        let mut coeffs = vec![c(0.0, 0.0); 8];
        coeffs[1] = c(8.0, 0.0);
        let f = SpectralField::from_coeffs(&g, coeffs).unwrap();
        assert!(matches!(f.values(), Err(Error::NotReal { .. })));
    }

    #[test]
    fn size_mismatch() {
        let g = PeriodicGrid::new(8, 1.0).unwrap();
        assert!(matches!(
            SpectralField::from_values(&g, vec![0.0; 7]),
            Err(Error::SizeMismatch { expected: 8, found: 7 })
        ));
    }

    #[test]
    fn dealias_single_exponential() {
        let n = 16;
        let mut u = vec![c(0.0, 0.0); n];
        u[1] = c(n as f64, 0.0);
        let w = dealias_product(&u, &u).unwrap();
        for (j, z) in w.iter().enumerate() {
            let want = if j == 2 { 1.0 } else { 0.0 };
            assert!((z / n as f64 - want).norm() < 1e-13, "slot {j}");
        }
        let g = PeriodicGrid::new(16, PI).unwrap();
        let w2 = g.dealias_product(&u, &u).unwrap();
        for (a, b) in w.iter().zip(&w2) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn dealias_cosine_square() {
        let g = PeriodicGrid::new(16, PI).unwrap();
        let u = SpectralField::from_fn(&g, f64::cos).coeffs().unwrap();
        let w = dealias_product(&u, &u).unwrap();
        let n = 16.0;
        // the first node is x0 = -pi + dx, so mode m carries the phase e^{i m x0}
        let x0 = g.nodes()[0];
        for (j, z) in w.iter().enumerate() {
            let m = g.mode_index(j);
            let want = match m {
                0 => 0.5,
                2 | -2 => 0.25,
                _ => 0.0,
            };
            let phase = Complex64::from_polar(1.0, m as f64 * x0);
            assert!((z / n - want * phase).norm() < 1e-13, "slot {j}");
        }
    }

    #[test]
    fn naive_product_aliases_but_dealiased_does_not() {
        let g = PeriodicGrid::new(16, PI).unwrap();
        let u = SpectralField::from_fn(&g, |x| (5.0 * x).cos()).coeffs().unwrap();
        // cos^2(5x) = 1/2 + cos(10x)/2; mode 10 is beyond N/2 = 8.
        let naive = naive_product(&u, &u).unwrap();
        let dealiased = dealias_product(&u, &u).unwrap();
        let n = 16.0;
        // naive: 10 folds onto -6 and -10 onto 6
        let j6 = 6;
        assert!((naive[j6] / n).norm() > 0.2);
        assert!((dealiased[j6] / n).norm() < 1e-13);
        assert!((dealiased[0] / n - c(0.5, 0.0)).norm() < 1e-13);
        for (j, z) in dealiased.iter().enumerate().skip(1) {
            assert!((z / n).norm() < 1e-13, "slot {j}");
        }
    }

    #[test]
    fn heat_examples() {
        let g = PeriodicGrid::new(256, 1.0).unwrap();
        let f = SpectralField::from_fn(&g, |x| 1.0 / (10.0 * x).cosh().powi(2));
        let out = heat_propagate(&f, 0.01, 5.0).unwrap();
        assert!((out.mean().unwrap() - f.mean().unwrap()).abs() < 1e-12);
        let same = heat_propagate(&f, 0.01, 0.0).unwrap().values().unwrap();
        assert!(max_abs(&same, &f.values().unwrap()) < 1e-14);

        let mut coeffs = vec![c(0.0, 0.0); 256];
        coeffs[1] = c(1.0, 0.0);
        let single = SpectralField::from_coeffs(&g, coeffs).unwrap();
        let damped = heat_propagate(&single, 1.0, 1.0).unwrap().coeffs().unwrap();
        assert!((damped[1].re - (-PI * PI).exp()).abs() < 1e-15);
        assert!(heat_propagate(&single, -1.0, 1.0).is_err());
    }

    #[test]
    fn closed_grid_indistinguishability() {
        assert!(closed_grid_deviation(1, 9, 11) < 1e-12);
        assert!(closed_grid_deviation(1, 2, 11) > 0.1);
    }

    #[test]
    fn folding_single_mode() {
        let n = 8;
        let mut spec = BTreeMap::new();
        spec.insert(3 + 8, c(2.0, -1.0));
        let r = aliasing_error(&spec, n).unwrap();
        assert_eq!(r.interp_coeffs[&3], c(2.0, -1.0));
        assert_eq!(r.trunc_coeffs[&3], c(0.0, 0.0));
        assert!((r.alias_norm - 5f64.sqrt()).abs() < 1e-14);

        let mut band = BTreeMap::new();
        band.insert(-2, c(1.0, 0.0));
        band.insert(3, c(0.0, 1.0));
        assert_eq!(aliasing_error(&band, 8).unwrap().alias_norm, 0.0);
        // odd N = 2m + 1 resolves [-m, m]
        let odd = aliasing_error(&band, 7).unwrap();
        assert_eq!((odd.k_min, odd.k_max), (-3, 3));
    }

    #[test]
    fn coeff_dump_columns() {
        let g = PeriodicGrid::new(4, 1.0).unwrap();
        let t = SpectralField::from_fn(&g, |_| 1.0).coeff_table().unwrap();
        let csv = t.to_csv_string();
        assert!(csv.starts_with("k_index,k_value,re,im\n0,"));
        assert_eq!(t.len(), 4);
    }

    fn field_strategy() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-10.0f64..10.0, 32)
    }

    proptest! {
        #[test]
        fn round_trip(values in field_strategy()) {
            let g = PeriodicGrid::new(32, 1.5).unwrap();
            let f = SpectralField::from_values(&g, values.clone()).unwrap();
            let back = dft_inverse(&dft_forward(&f).unwrap()).unwrap().values().unwrap();
            prop_assert!(max_abs(&back, &values) <= 1e-12 * 10.0);
        }

        #[test]
        fn parseval(values in field_strategy()) {
            let g = PeriodicGrid::new(32, 1.0).unwrap();
            let f = SpectralField::from_values(&g, values.clone()).unwrap();
            let e_phys: f64 = values.iter().map(|v| v * v).sum();
            let e_spec: f64 = f.coeffs().unwrap().iter().map(|z| z.norm_sqr()).sum::<f64>() / 32.0;
            prop_assert!((e_phys - e_spec).abs() <= 1e-10 * e_phys.max(1e-300));
        }

        #[test]
        fn hermitian_symmetry(values in field_strategy()) {
            let g = PeriodicGrid::new(32, 1.0).unwrap();
            let cf = SpectralField::from_values(&g, values).unwrap().coeffs().unwrap();
            for j in 1..32 {
                prop_assert!((cf[j] - cf[32 - j].conj()).norm() < 1e-10);
            }
        }

        #[test]
        fn semigroup(values in field_strategy(), t1 in 0.0f64..0.5, t2 in 0.0f64..0.5) {
            let g = PeriodicGrid::new(32, 1.0).unwrap();
            let f = SpectralField::from_values(&g, values).unwrap();
            let a = heat_propagate(&heat_propagate(&f, 0.1, t1).unwrap(), 0.1, t2).unwrap();
            let b = heat_propagate(&f, 0.1, t1 + t2).unwrap();
            prop_assert!(max_abs(&a.values().unwrap(), &b.values().unwrap()) < 1e-12 * 10.0);
        }
    }
}
