//! Method-of-lines drivers on periodic grids, the coupled heat-moisture
//! right-hand side, and an exact non-periodic heat solution used as a
//! reference.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::fourier::{apply_derivative, PeriodicGrid, SpectralField, REAL_RESIDUE_TOL};
use crate::table::Table;
use crate::timestep::{integrate, IvpProblem, SchemeSpec};
use crate::{Error, Result};

/// Spectral right-hand side: reads one coefficient vector per field at time
/// `t` and writes their time derivatives.
pub type SpectralRhs =
    dyn Fn(f64, &[Vec<Complex64>], &mut [Vec<Complex64>]) -> Result<()> + Send + Sync;

/// A semi-discrete system `d(coeffs)/dt = rhs(t, coeffs)` on a periodic grid.
#[derive(Clone)]
pub struct MolSystem {
    grid: PeriodicGrid,
    initial: Vec<Vec<Complex64>>,
    rhs: Arc<SpectralRhs>,
    /// Largest |eigenvalue| of the linearised operator, if known; used only for
    /// the stability hint.
    stiffness: Option<f64>,
}

impl fmt::Debug for MolSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MolSystem")
            .field("grid", &self.grid)
            .field("fields", &self.initial.len())
            .finish()
    }
}

impl MolSystem {
    pub fn new<F>(grid: &PeriodicGrid, initial: Vec<SpectralField>, rhs: F) -> Result<Self>
    where
        F: Fn(f64, &[Vec<Complex64>], &mut [Vec<Complex64>]) -> Result<()> + Send + Sync + 'static,
    {
        if initial.is_empty() {
            return Err(Error::InvalidArgument("MOL system without fields".into()));
        }
        let initial = initial
            .iter()
            .map(|f| {
                if f.grid() != grid {
                    return Err(Error::InvalidArgument("field on a different grid".into()));
                }
                f.coeffs()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MolSystem {
            grid: grid.clone(),
            initial,
            rhs: Arc::new(rhs),
            stiffness: None,
        })
    }

    /// `u_t = nu u_xx`.
    pub fn linear_heat(u0: &SpectralField, nu: f64) -> Result<Self> {
        if !(nu >= 0.0) {
            return Err(Error::InvalidArgument(format!("nu must be >= 0, got {nu}")));
        }
        let grid = u0.grid().clone();
        let k2: Vec<f64> = grid.wavenumbers().iter().map(|k| k * k).collect();
        let kmax2 = k2.iter().cloned().fold(0.0, f64::max);
        let mut sys = MolSystem::new(&grid, vec![u0.clone()], move |_, u, du| {
            for ((d, c), k2) in du[0].iter_mut().zip(&u[0]).zip(&k2) {
                *d = -nu * k2 * c;
            }
            Ok(())
        })?;
        sys.stiffness = Some(nu * kmax2);
        Ok(sys)
    }

    pub fn with_stiffness(mut self, lambda_max: f64) -> Self {
        self.stiffness = Some(lambda_max);
        self
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn fields(&self) -> usize {
        self.initial.len()
    }

    fn to_ivp(&self, t_end: f64, fault: Arc<Mutex<Option<Error>>>) -> Result<IvpProblem> {
        let n = self.grid.n();
        let nf = self.initial.len();
        let rhs = self.rhs.clone();
        IvpProblem::new(
            move |t, y, out| {
                let state = unflatten(y, nf, n);
                let mut d = vec![vec![Complex64::new(0.0, 0.0); n]; nf];
                match rhs(t, &state, &mut d) {
                    Ok(()) => flatten_into(&d, out),
                    Err(e) => {
                        let mut slot = fault.lock().unwrap_or_else(|p| p.into_inner());
                        if slot.is_none() {
                            *slot = Some(e);
                        }
                        out.fill(f64::NAN);
                    }
                }
            },
            flatten(&self.initial),
            0.0,
            t_end,
        )
    }
}

fn flatten(fields: &[Vec<Complex64>]) -> Vec<f64> {
    let mut out = vec![0.0; fields.iter().map(|f| 2 * f.len()).sum()];
    flatten_into(fields, &mut out);
    out
}

fn flatten_into(fields: &[Vec<Complex64>], out: &mut [f64]) {
    let mut i = 0;
    for f in fields {
        for c in f {
            out[i] = c.re;
            out[i + 1] = c.im;
            i += 2;
        }
    }
}

fn unflatten(y: &[f64], nf: usize, n: usize) -> Vec<Vec<Complex64>> {
    (0..nf)
        .map(|f| {
            (0..n)
                .map(|j| Complex64::new(y[2 * (f * n + j)], y[2 * (f * n + j) + 1]))
                .collect()
        })
        .collect()
}

/// Result of [`mol_integrate`].
#[derive(Debug, Clone)]
pub struct MolRun {
    pub fields: Vec<SpectralField>,
    /// `(t, fields)` snapshots when requested.
    pub snapshots: Vec<(f64, Vec<SpectralField>)>,
}

/// Advance the system to `t_end` in `n_steps` steps of `scheme`.
pub fn mol_integrate(system: &MolSystem, scheme: SchemeSpec, t_end: f64, n_steps: usize) -> Result<Vec<SpectralField>> {
    Ok(mol_run(system, scheme, t_end, n_steps, 0)?.fields)
}

/// As [`mol_integrate`], also keeping every `every`-th level (0 keeps none)
/// plus the final one.
pub fn mol_run(system: &MolSystem, scheme: SchemeSpec, t_end: f64, n_steps: usize, every: usize) -> Result<MolRun> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be >= 1".into()));
    }
    let dt = t_end / n_steps as f64;
    if let Some(lam) = system.stiffness {
        log::info!("{scheme}: dt * |lambda|_max = {:.3}", dt * lam);
    }
    let fault = Arc::new(Mutex::new(None));
    let ivp = system.to_ivp(t_end, fault.clone())?;
    let outcome = integrate(scheme, &ivp, n_steps, every > 0);
    if let Some(e) = fault.lock().unwrap_or_else(|p| p.into_inner()).take() {
        return Err(e);
    }
    let traj = outcome?;
    let n = system.grid.n();
    let nf = system.initial.len();
    let to_fields = |y: &[f64]| -> Result<Vec<SpectralField>> {
        unflatten(y, nf, n)
            .into_iter()
            .map(|c| SpectralField::from_coeffs(&system.grid, c))
            .collect()
    };
    let mut snapshots = Vec::new();
    if every > 0 {
        for (i, (t, y)) in traj.times.iter().zip(&traj.states).enumerate() {
            if i % every == 0 || i == n_steps {
                snapshots.push((*t, to_fields(y)?));
            }
        }
    }
    Ok(MolRun {
        fields: to_fields(&traj.final_state)?,
        snapshots,
    })
}

/// Space-time dump with columns `t,x,u` for field `index` of each snapshot.
pub fn space_time_table(grid: &PeriodicGrid, snapshots: &[(f64, Vec<SpectralField>)], index: usize) -> Result<Table> {
    let x = grid.nodes();
    let mut t = Table::new(&["t", "x", "u"]);
    for (time, fields) in snapshots {
        let u = fields
            .get(index)
            .ok_or_else(|| Error::InvalidArgument(format!("no field {index}")))?
            .values()?;
        for (xi, ui) in x.iter().zip(u) {
            t.push_reals(&[*time, *xi, ui]);
        }
    }
    Ok(t)
}

/// Coefficient of the heat-moisture model as a function of `(θ, T)`.
pub type Coefficient = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct HeatMoistureParams {
    pub d_theta: Coefficient,
    pub d_t: Coefficient,
    pub lambda: Coefficient,
    pub v_theta: Coefficient,
    pub v_t: Coefficient,
    pub rho_cm: f64,
    /// Latent heat as a function of temperature.
    pub latent: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Form products on the 3/2-padded grid.
    pub dealias: bool,
    pub preset: String,
}

impl fmt::Debug for HeatMoistureParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HeatMoistureParams")
            .field("preset", &self.preset)
            .field("rho_cm", &self.rho_cm)
            .field("dealias", &self.dealias)
            .finish()
    }
}

fn constant(c: f64) -> Coefficient {
    Arc::new(move |_, _| c)
}

impl HeatMoistureParams {
    /// All coefficients constant.
    pub fn constant(d_theta: f64, d_t: f64, lambda: f64, v_theta: f64, v_t: f64, rho_cm: f64, latent: f64) -> Self {
        HeatMoistureParams {
            d_theta: constant(d_theta),
            d_t: constant(d_t),
            lambda: constant(lambda),
            v_theta: constant(v_theta),
            v_t: constant(v_t),
            rho_cm,
            latent: Arc::new(move |_| latent),
            dealias: true,
            preset: "constant".into(),
        }
    }

    /// Demo preset with `D_θ = d0 (1 + θ^2)` and small constant couplings.
    pub fn nonlinear(d0: f64) -> Self {
        HeatMoistureParams {
            d_theta: Arc::new(move |theta, _| d0 * (1.0 + theta * theta)),
            preset: "nonlinear".into(),
            ..HeatMoistureParams::constant(d0, 0.1 * d0, 2.0 * d0, 0.05 * d0, 0.02 * d0, 1.0, 0.5)
        }
    }

    pub fn from_preset(name: &str, d0: f64) -> Result<Self> {
        match name {
            "constant" => Ok(HeatMoistureParams::constant(d0, 0.0, d0, 0.0, 0.0, 1.0, 0.0)),
            "nonlinear" => Ok(HeatMoistureParams::nonlinear(d0)),
            other => Err(Error::InvalidArgument(format!(
                "unknown preset `{other}` (constant, nonlinear)"
            ))),
        }
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.rho_cm > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rho_cm must be positive, got {}",
                self.rho_cm
            )));
        }
        Ok(())
    }
}

/// Moves coefficients to physical space, either on the grid itself or on
/// the 3/2-padded grid, and back.
struct Physical<'a> {
    grid: &'a PeriodicGrid,
    padded: bool,
    forward: Arc<dyn rustfft::Fft<f64>>,
    inverse: Arc<dyn rustfft::Fft<f64>>,
}

impl<'a> Physical<'a> {
    fn new(grid: &'a PeriodicGrid, padded: bool) -> Self {
        let len = if padded { grid.padded_len() } else { grid.n() };
        let mut planner = FftPlanner::new();
        Physical {
            grid,
            padded,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    fn len(&self) -> usize {
        if self.padded {
            self.grid.padded_len()
        } else {
            self.grid.n()
        }
    }

    /// Sample values. On the padded grid the Nyquist coefficient is split
    /// evenly between modes `±N/2` so that the samples stay real.
    fn values(&self, coeffs: &[Complex64]) -> Result<Vec<f64>> {
        let n = self.grid.n();
        let m = self.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        if self.padded {
            buf[..n / 2].copy_from_slice(&coeffs[..n / 2]);
            buf[m - n / 2 + 1..].copy_from_slice(&coeffs[n / 2 + 1..]);
            buf[n / 2] = 0.5 * coeffs[n / 2];
            buf[m - n / 2] = 0.5 * coeffs[n / 2];
        } else {
            buf.copy_from_slice(coeffs);
        }
        self.inverse.process(&mut buf);
        // unnormalised inverse on M points; true samples need a factor 1/N
        let scale = 1.0 / n as f64;
        let top = buf.iter().map(|c| c.re.abs()).fold(1.0, f64::max) * scale;
        let residue = buf.iter().map(|c| c.im.abs()).fold(0.0, f64::max) * scale;
        if !(residue <= REAL_RESIDUE_TOL * top) {
            return Err(Error::NotReal { residue });
        }
        Ok(buf.iter().map(|c| c.re * scale).collect())
    }

    /// Coefficients (N-point convention) of sampled values, truncated back to
    /// N modes on the padded grid.
    fn coeffs(&self, values: &[f64]) -> Vec<Complex64> {
        let n = self.grid.n();
        let m = self.len();
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        if !self.padded {
            return buf;
        }
        let scale = n as f64 / m as f64;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        out[..n / 2].copy_from_slice(&buf[..n / 2]);
        out[n / 2 + 1..].copy_from_slice(&buf[m - n / 2 + 1..]);
        // both ±N/2 fold onto the Nyquist slot of the N-point grid
        out[n / 2] = buf[n / 2] + buf[m - n / 2];
        out.iter_mut().for_each(|c| *c *= scale);
        out
    }
}

fn derivative(grid: &PeriodicGrid, c: &[Complex64]) -> Vec<Complex64> {
    let mut d = c.to_vec();
    apply_derivative(grid, &mut d, 1);
    d
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            context: format!("coefficient {what}"),
            step: 0,
        })
    }
}

/// Time derivatives `(dθ̂/dt, dT̂/dt)` of the coupled heat-moisture model:
///
/// - `dθ̂/dt = ik F{D_θ θ_x + D_T T_x}`
/// - `ρc_m dT̂/dt = ik F{λ T_x} - F{L(T) ∂_x j_v}`, `j_v = -V_θ θ_x - V_T T_x`
///
/// Derivatives use `ik` multipliers; coefficient functions and products are
/// evaluated in physical space (on the 3/2 grid when `dealias` is set) and
/// each nonlinear group goes back with one forward transform.
pub fn heat_moisture_rhs(
    grid: &PeriodicGrid,
    theta: &[Complex64],
    temp: &[Complex64],
    params: &HeatMoistureParams,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    params.validate()?;
    let n = grid.n();
    for c in [theta, temp] {
        if c.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: c.len(),
            });
        }
    }
    let phys = Physical::new(grid, params.dealias);
    let th_x_hat = derivative(grid, theta);
    let t_x_hat = derivative(grid, temp);
    let th = phys.values(theta)?;
    let tt = phys.values(temp)?;
    let th_x = phys.values(&th_x_hat)?;
    let t_x = phys.values(&t_x_hat)?;

    let m = th.len();
    let mut moisture_flux = vec![0.0; m];
    let mut heat_flux = vec![0.0; m];
    let mut vapour = vec![0.0; m];
    for i in 0..m {
        let (a, b) = (th[i], tt[i]);
        moisture_flux[i] = (params.d_theta)(a, b) * th_x[i] + (params.d_t)(a, b) * t_x[i];
        heat_flux[i] = (params.lambda)(a, b) * t_x[i];
        vapour[i] = -(params.v_theta)(a, b) * th_x[i] - (params.v_t)(a, b) * t_x[i];
    }
    check_finite(&moisture_flux, "D_theta/D_T")?;
    check_finite(&heat_flux, "lambda")?;
    check_finite(&vapour, "V_theta/V_T")?;

    let dtheta = derivative(grid, &phys.coeffs(&moisture_flux));
    let q_div = derivative(grid, &phys.coeffs(&heat_flux));
    let jv_x = phys.values(&derivative(grid, &phys.coeffs(&vapour)))?;
    let source: Vec<f64> = tt.iter().zip(&jv_x).map(|(t, j)| (params.latent)(*t) * j).collect();
    check_finite(&source, "L")?;
    let source_hat = phys.coeffs(&source);
    let dtemp: Vec<Complex64> = q_div
        .iter()
        .zip(&source_hat)
        .map(|(a, b)| (a - b) / params.rho_cm)
        .collect();
    Ok((dtheta, dtemp))
}

impl MolSystem {
    /// Coupled heat-moisture system with fields `[θ, T]`.
    pub fn heat_moisture(theta0: &SpectralField, temp0: &SpectralField, params: HeatMoistureParams) -> Result<Self> {
        params.validate()?;
        let grid = theta0.grid().clone();
        let g = grid.clone();
        MolSystem::new(&grid, vec![theta0.clone(), temp0.clone()], move |_, u, du| {
            let (a, b) = heat_moisture_rhs(&g, &u[0], &u[1], &params)?;
            du[0] = a;
            du[1] = b;
            Ok(())
        })
    }
}

/// Exact solution of `u_t = κ u_xx` on `[0, 1]` with `u(x, 0) = 0`,
/// `u(0, t) = sin t`, `u_x(1, t) = 0`.
///
/// `u = u_s + u_Σ` where the time-periodic part is
/// `u_s = Im[cosh(λ(1 - x)) / cosh(λ) e^{it}]`, `λ = sqrt(i/κ)`, and the
/// transient is `Σ c_n e^{-κ μ_n^2 t} sin(μ_n x)` with `μ_n = (n - 1/2)π` and
/// `c_n = 2 μ_n κ / (1 + κ^2 μ_n^4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactHeatSolution {
    pub kappa: f64,
    /// Truncation tolerance on the next term's magnitude bound.
    pub tol: f64,
    pub max_terms: usize,
    lambda: Complex64,
    cosh_lambda: Complex64,
}

/// Hard cap on the number of series terms.
pub const SERIES_TERM_CAP: usize = 10_000;

impl Default for ExactHeatSolution {
    fn default() -> Self {
        ExactHeatSolution::new(1.0 / (9.0 * PI * PI), 1e-12).expect("valid default")
    }
}

impl ExactHeatSolution {
    pub fn new(kappa: f64, tol: f64) -> Result<Self> {
        if !(kappa > 0.0) || !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need kappa > 0 and tol > 0 (got {kappa}, {tol})"
            )));
        }
        let lambda = (Complex64::i() / kappa).sqrt();
        Ok(ExactHeatSolution {
            kappa,
            tol,
            max_terms: SERIES_TERM_CAP,
            lambda,
            cosh_lambda: lambda.cosh(),
        })
    }

    fn check(x: f64, t: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain { value: x, bound: 1.0 });
        }
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("t must be >= 0, got {t}")));
        }
        Ok(())
    }

    /// Time-periodic part.
    pub fn steady(&self, x: f64, t: f64) -> f64 {
        let z = (self.lambda * (1.0 - x)).cosh() / self.cosh_lambda * Complex64::from_polar(1.0, t);
        z.im
    }

    fn mu(n: usize) -> f64 {
        (n as f64 - 0.5) * PI
    }

    /// Magnitude bound of term `n` at time `t`.
    pub fn term_bound(&self, n: usize, t: f64) -> f64 {
        let mu = Self::mu(n);
        let k = self.kappa;
        2.0 * mu * k / (1.0 + k * k * mu.powi(4)) * (-k * mu * mu * t).exp()
    }

    /// Transient series with exactly `terms` terms.
    pub fn series_partial(&self, x: f64, t: f64, terms: usize) -> f64 {
        (1..=terms)
            .map(|n| self.term_bound(n, t) * (Self::mu(n) * x).sin())
            .sum()
    }

    /// Terms needed for the next bound to fall below `tol`.
    pub fn terms_needed(&self, t: f64) -> Result<usize> {
        let mut n = 1;
        while self.term_bound(n, t) >= self.tol {
            n += 1;
            if n > self.max_terms {
                return Err(Error::SeriesTruncation {
                    terms: self.max_terms,
                    bound: self.term_bound(self.max_terms, t),
                });
            }
        }
        Ok(n - 1)
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        Self::check(x, t)?;
        let terms = self.terms_needed(t)?;
        Ok(self.steady(x, t) + self.series_partial(x, t, terms))
    }

    /// Fixed series budget, no tolerance check.
    pub fn eval_partial(&self, x: f64, t: f64, terms: usize) -> Result<f64> {
        Self::check(x, t)?;
        Ok(self.steady(x, t) + self.series_partial(x, t, terms))
    }

    /// `sup_x |u_Σ(x, t)|` on `samples` points.
    pub fn transient_sup(&self, t: f64, samples: usize) -> Result<f64> {
        let terms = self.terms_needed(t)?;
        let m = samples.max(2) - 1;
        Ok((0..=m)
            .map(|i| self.series_partial(i as f64 / m as f64, t, terms).abs())
            .fold(0.0, f64::max))
    }

    /// Coefficients as printed for `κ = 2/(9π^2)`:
    /// `72/π (2n-1) / ((9 + 4(n-2)^2)(9 + 4(n+1)^2))`.
    pub fn printed_coefficient(n: usize) -> f64 {
        let nf = n as f64;
        72.0 / PI * (2.0 * nf - 1.0)
            / ((9.0 + 4.0 * (nf - 2.0).powi(2)) * (9.0 + 4.0 * (nf + 1.0).powi(2)))
    }

    /// Space-time table `t,x,u` on a uniform lattice.
    pub fn space_time_table(&self, t_end: f64, nt: usize, nx: usize) -> Result<Table> {
        let mut tab = Table::new(&["t", "x", "u"]);
        for i in 0..=nt {
            let t = t_end * i as f64 / nt.max(1) as f64;
            let terms = self.terms_needed(t).unwrap_or(self.max_terms);
            for j in 0..=nx {
                let x = j as f64 / nx.max(1) as f64;
                tab.push_reals(&[t, x, self.eval_partial(x, t, terms)?]);
            }
        }
        Ok(tab)
    }
}

/// Flat `key=value` run configuration (blank lines and `#` comments
/// ignored). Recognised keys: N, l, nu, T, steps, scheme, dealias, preset.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeConfig {
    pub n: usize,
    pub l: f64,
    pub nu: f64,
    pub t_end: f64,
    pub steps: usize,
    pub scheme: SchemeSpec,
    pub dealias: bool,
    pub preset: String,
}

impl Default for PdeConfig {
    fn default() -> Self {
        PdeConfig {
            n: 256,
            l: 1.0,
            nu: 0.01,
            t_end: 5.0,
            steps: 4000,
            scheme: SchemeSpec::Rk4,
            dealias: true,
            preset: "constant".into(),
        }
    }
}

/// Parses `key=value` lines into a map, rejecting malformed lines.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::InvalidArgument(format!("config line {}: expected key=value", no + 1))
        })?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn parse_field<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::InvalidArgument(format!("bad value `{v}` for `{key}`")))
}

impl PdeConfig {
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "N" => self.n = parse_field(key, value)?,
            "l" => self.l = parse_field(key, value)?,
            "nu" => self.nu = parse_field(key, value)?,
            "T" => self.t_end = parse_field(key, value)?,
            "steps" => self.steps = parse_field(key, value)?,
            "scheme" => self.scheme = value.parse()?,
            "dealias" => {
                self.dealias = match value {
                    "true" | "on" | "1" => true,
                    "false" | "off" | "0" => false,
                    _ => return Err(Error::InvalidArgument(format!("bad dealias `{value}`"))),
                }
            }
            "preset" => self.preset = value.to_string(),
            other => {
                return Err(Error::InvalidArgument(format!("unknown config key `{other}`")))
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = PdeConfig::default();
        for (k, v) in parse_key_values(text)? {
            cfg.apply(&k, &v)?;
        }
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        format!(
            "N={}\nl={}\nnu={}\nT={}\nsteps={}\nscheme={}\ndealias={}\npreset={}\n",
            self.n, self.l, self.nu, self.t_end, self.steps, self.scheme, self.dealias, self.preset
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::heat_propagate;

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    fn sech2(x: f64) -> f64 {
        1.0 / (10.0 * x).cosh().powi(2)
    }

    #[test]
    fn linear_heat_matches_propagator() {
        let g = PeriodicGrid::new(64, 1.0).unwrap();
        let u0 = SpectralField::from_fn(&g, sech2);
        let sys = MolSystem::linear_heat(&u0, 0.01).unwrap();
        let out = mol_integrate(&sys, SchemeSpec::Rk4, 1.0, 400).unwrap();
        let exact = heat_propagate(&u0, 0.01, 1.0).unwrap();
        assert!(max_diff(&out[0].values().unwrap(), &exact.values().unwrap()) < 1e-9);
    }

    #[test]
    fn zero_rhs_keeps_state() {
        let g = PeriodicGrid::new(16, 1.0).unwrap();
        let u0 = SpectralField::from_fn(&g, |x| x.sin());
        let sys = MolSystem::new(&g, vec![u0.clone()], |_, _, du| {
            du.iter_mut().for_each(|d| d.fill(Complex64::new(0.0, 0.0)));
            Ok(())
        })
        .unwrap();
        let out = mol_integrate(&sys, SchemeSpec::Ab3, 1.0, 10).unwrap();
        assert!(max_diff(&out[0].values().unwrap(), &u0.values().unwrap()) < 1e-15);
    }

    #[test]
    fn slope_matches_scheme_order() {
        let g = PeriodicGrid::new(32, 1.0).unwrap();
        let u0 = SpectralField::from_fn(&g, |x| (PI * x).sin() + 0.5 * (2.0 * PI * x).cos());
        let nu = 0.05;
        let sys = MolSystem::linear_heat(&u0, nu).unwrap();
        let exact = heat_propagate(&u0, nu, 0.5).unwrap().values().unwrap();
        for (scheme, steps) in [(SchemeSpec::Rk4, [100, 200, 400]), (SchemeSpec::HEUN, [200, 400, 800])] {
            let pts: Vec<(f64, f64)> = steps
                .iter()
                .map(|&s| {
                    let out = mol_integrate(&sys, scheme, 0.5, s).unwrap();
                    (0.5 / s as f64, max_diff(&out[0].values().unwrap(), &exact))
                })
                .collect();
            let slope = crate::linalg::loglog_slope(&pts).unwrap();
            assert!((slope - scheme.order() as f64).abs() < 0.3, "{scheme}: {slope}");
        }
    }

    #[test]
    fn rhs_error_surfaces() {
        let g = PeriodicGrid::new(16, 1.0).unwrap();
        let u0 = SpectralField::from_fn(&g, |x| x.cos());
        let sys = MolSystem::new(&g, vec![u0], |_, _, _| Err(Error::Hypothesis("boom".into()))).unwrap();
        assert!(matches!(
            mol_integrate(&sys, SchemeSpec::Rk4, 1.0, 3),
            Err(Error::Hypothesis(_))
        ));
    }

    fn band_limited(g: &PeriodicGrid) -> (SpectralField, SpectralField) {
        let th = SpectralField::from_fn(g, |x| {
            0.5 + 0.2 * (PI * x).sin() + 0.1 * (3.0 * PI * x).cos()
        });
        let tt = SpectralField::from_fn(g, |x| 1.0 + 0.3 * (2.0 * PI * x).cos());
        (th, tt)
    }

    #[test]
    fn constant_coefficients_are_diagonal() {
        let g = PeriodicGrid::new(32, 1.0).unwrap();
        let (th, tt) = band_limited(&g);
        let p = HeatMoistureParams::constant(0.3, 0.0, 0.7, 0.2, 0.1, 2.0, 0.0);
        let (a, b) = heat_moisture_rhs(&g, &th.coeffs().unwrap(), &tt.coeffs().unwrap(), &p).unwrap();
        let k = g.wavenumbers();
        let thc = th.coeffs().unwrap();
        let ttc = tt.coeffs().unwrap();
        let scale = thc.iter().zip(&k).map(|(c, k)| (c * k * k).norm()).fold(0.0, f64::max);
        for j in 0..32 {
            assert!((a[j] + 0.3 * k[j] * k[j] * thc[j]).norm() <= 1e-12 * scale);
            assert!((b[j] + 0.35 * k[j] * k[j] * ttc[j]).norm() <= 1e-12 * scale);
        }
        assert_eq!(a[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn dealias_toggle_is_inert_on_band_limited_state() {
        let g = PeriodicGrid::new(32, 1.0).unwrap();
        let (th, tt) = band_limited(&g);
        let mut p = HeatMoistureParams::constant(0.0, 0.05, 0.4, 0.1, 0.02, 1.0, 0.3);
        p.d_theta = Arc::new(|theta, _| theta);
        let on = heat_moisture_rhs(&g, &th.coeffs().unwrap(), &tt.coeffs().unwrap(), &p).unwrap();
        let off = heat_moisture_rhs(
            &g,
            &th.coeffs().unwrap(),
            &tt.coeffs().unwrap(),
            &p.clone().with_dealias(false),
        )
        .unwrap();
        for (x, y) in on.0.iter().zip(&off.0).chain(on.1.iter().zip(&off.1)) {
            assert!((x - y).norm() <= 1e-10);
        }
    }

    #[test]
    fn nonfinite_coefficient_is_reported() {
        let g = PeriodicGrid::new(16, 1.0).unwrap();
        let (th, tt) = band_limited(&g);
        let mut p = HeatMoistureParams::constant(0.1, 0.0, 0.1, 0.0, 0.0, 1.0, 0.0);
        p.lambda = Arc::new(|_, _| f64::NAN);
        assert!(matches!(
            heat_moisture_rhs(&g, &th.coeffs().unwrap(), &tt.coeffs().unwrap(), &p),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn exact_solution_boundary_values() {
        let s = ExactHeatSolution::default();
        for &t in &[0.1, 0.5, 1.0, 3.0, 10.0] {
            assert!((s.eval(0.0, t).unwrap() - t.sin()).abs() <= 1e-10);
        }
        assert!(s.eval(1.5, 1.0).is_err());
        assert!(s.eval(0.5, -1.0).is_err());
    }

    #[test]
    fn transient_decays_monotonically() {
        let s = ExactHeatSolution::default();
        let sups: Vec<f64> = [1.0, 5.0, 10.0, 20.0]
            .iter()
            .map(|&t| s.transient_sup(t, 201).unwrap())
            .collect();
        assert!(sups.windows(2).all(|w| w[1] < w[0]), "{sups:?}");
    }

    #[test]
    fn printed_coefficients_correspond_to_double_diffusivity() {
        let s = ExactHeatSolution::new(2.0 / (9.0 * PI * PI), 1e-12).unwrap();
        for n in 1..50 {
            let ours = s.term_bound(n, 0.0);
            let printed = ExactHeatSolution::printed_coefficient(n);
            assert!((ours - printed).abs() <= 1e-14 * printed.max(1e-300), "n={n}");
        }
        // and the steady part matches the printed closed form
        let a = 1.5 * PI;
        for &(x, t) in &[(0.3, 1.0), (0.8, 2.5)] {
            let printed = ((a * x).cos() * (a * (1.0 - x)).sinh() * f64::sin(t)
                - (a * x).sin() * (a * (1.0 - x)).cosh() * f64::cos(t))
                / a.sinh();
            assert!((s.steady(x, t) - printed).abs() < 1e-12);
        }
    }

    #[test]
    fn series_cap_is_enforced_at_t0() {
        let s = ExactHeatSolution::default();
        assert!(matches!(s.eval(0.5, 0.0), Err(Error::SeriesTruncation { .. })));
    }

    #[test]
    fn config_round_trip() {
        let mut c = PdeConfig::default();
        c.scheme = SchemeSpec::HEUN;
        c.dealias = false;
        assert_eq!(PdeConfig::parse(&c.to_text()).unwrap(), c);
        assert!(PdeConfig::parse("N=abc").is_err());
        assert!(PdeConfig::parse("nope").is_err());
        assert!(PdeConfig::parse("# c\n\nN=64\n").unwrap().n == 64);
    }
}
