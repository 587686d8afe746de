//! Experiment registry behind the `spectral-kit` binary.
//!
//! An experiment turns a flat set of `key=value` parameters (and a seed, for
//! stochastic ones) into CSV artifacts. [`Registry::run`] writes them to the
//! output directory together with gnuplot companion scripts and a
//! `manifest.json` holding SHA-256 hashes of every file. Outputs contain no
//! timestamps or host data, so identical specs give byte-identical files.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bvp::{self, Method};
use crate::fourier::{
    aliasing_error, benchmark_function, closed_grid, derivative_benchmark, heat_propagate,
    spectral_derivative, PeriodicGrid, SpectralField,
};
use crate::interp::{
    interpolate_fn, lebesgue_constant, runge, runge_sweep, sweep_table, vertesi_asymptote,
    LEBESGUE_DENSITY,
};
use crate::montecarlo::{brownian_batch, feynman_kac, mean_var, probe_table, wrap_periodic, SdeProblem};
use crate::orthopoly::{cheb_nodes, cheb_polys, hermite_funcs, NodeFamily};
use crate::pde::{
    mol_run, space_time_table, ExactHeatSolution, HeatMoistureParams, MolSystem, PdeConfig,
};
use crate::table::{Cell, Table};
use crate::timestep::{convergence_study, logistic_exact, IvpProblem, SchemeSpec, LOGISTIC_STEPS};
use crate::trefftz::{solve_trefftz, Basis, BoundaryProblem, Curve, TrefftzMethod};
use crate::{Error, Result};

/// A declared parameter with its default.
#[derive(Debug, Clone, Serialize)]
pub struct ParamSpec {
    pub key: String,
    pub default: String,
    pub help: String,
}

impl ParamSpec {
    pub fn new(key: &str, default: impl ToString, help: &str) -> Self {
        ParamSpec {
            key: key.into(),
            default: default.to_string(),
            help: help.into(),
        }
    }
}

/// Resolved parameters (defaults merged with overrides).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn str(&self, key: &str) -> Result<&str> {
        self.0
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::InvalidArgument(format!("missing parameter `{key}`")))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let v = self.str(key)?;
        v.parse()
            .map_err(|_| Error::InvalidArgument(format!("bad value `{v}` for `{key}`")))
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        match self.str(key)? {
            "true" | "on" | "1" | "yes" => Ok(true),
            "false" | "off" | "0" | "no" => Ok(false),
            v => Err(Error::InvalidArgument(format!("bad boolean `{v}` for `{key}`"))),
        }
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        self.str(key)?
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad list item `{s}` for `{key}`")))
            })
            .collect()
    }

    pub fn as_map(&self) -> &BTreeMap<String, String> {
        &self.0
    }
}

/// What an experiment sees when it runs.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub params: Params,
    pub seed: Option<u64>,
}

impl RunContext {
    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::InvalidArgument("--seed is required for this experiment".into()))
    }
}

/// Gnuplot hints for a CSV artifact; columns are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x: usize,
    pub ys: Vec<usize>,
    pub logx: bool,
    pub logy: bool,
    pub style: &'static str,
}

impl PlotSpec {
    pub fn lines(title: &str, x: usize, ys: impl IntoIterator<Item = usize>) -> Self {
        PlotSpec {
            title: title.into(),
            x,
            ys: ys.into_iter().collect(),
            logx: false,
            logy: false,
            style: "lines",
        }
    }

    pub fn logy(mut self) -> Self {
        self.logy = true;
        self
    }

    pub fn logxy(mut self) -> Self {
        self.logx = true;
        self.logy = true;
        self
    }

    pub fn points(mut self) -> Self {
        self.style = "linespoints";
        self
    }

    fn script(&self, csv: &str, header: &[String]) -> String {
        let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\n");
        s.push_str(&format!("set title '{}'\n", self.title));
        if let Some(h) = header.get(self.x - 1) {
            s.push_str(&format!("set xlabel '{h}'\n"));
        }
        if self.logx {
            s.push_str("set logscale x\n");
        }
        if self.logy {
            s.push_str("set logscale y\n");
        }
        let curves: Vec<String> = self
            .ys
            .iter()
            .enumerate()
            .map(|(i, y)| {
                let file = if i == 0 { format!("'{csv}'") } else { "''".into() };
                format!("{file} using {}:{y} with {}", self.x, self.style)
            })
            .collect();
        s.push_str(&format!("plot {}\n", curves.join(", \\\n     ")));
        s
    }
}

/// One output file.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub table: Table,
    pub plot: Option<PlotSpec>,
}

impl Artifact {
    pub fn csv(name: &str, table: Table) -> Self {
        Artifact {
            name: name.into(),
            table,
            plot: None,
        }
    }

    pub fn with_plot(mut self, plot: PlotSpec) -> Self {
        self.plot = Some(plot);
        self
    }
}

pub type RunFn = Arc<dyn Fn(&RunContext) -> Result<Vec<Artifact>> + Send + Sync>;

#[derive(Clone)]
pub struct Experiment {
    pub name: String,
    pub description: String,
    pub stochastic: bool,
    pub params: Vec<ParamSpec>,
    run: RunFn,
}

impl std::fmt::Debug for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Experiment")
            .field("name", &self.name)
            .field("stochastic", &self.stochastic)
            .finish()
    }
}

impl Experiment {
    pub fn new(
        name: &str,
        description: &str,
        params: Vec<ParamSpec>,
        run: impl Fn(&RunContext) -> Result<Vec<Artifact>> + Send + Sync + 'static,
    ) -> Self {
        Experiment {
            name: name.into(),
            description: description.into(),
            stochastic: false,
            params,
            run: Arc::new(run),
        }
    }

    /// Marks the experiment as needing `--seed`.
    pub fn stochastic(mut self) -> Self {
        self.stochastic = true;
        self
    }

    /// Defaults overlaid with `overrides`; unknown keys are rejected.
    pub fn resolve(&self, overrides: &BTreeMap<String, String>) -> Result<Params> {
        let mut map: BTreeMap<String, String> = self
            .params
            .iter()
            .map(|p| (p.key.clone(), p.default.clone()))
            .collect();
        for (k, v) in overrides {
            match map.get_mut(k) {
                Some(slot) => *slot = v.clone(),
                None => {
                    let valid: Vec<&str> = self.params.iter().map(|p| p.key.as_str()).collect();
                    return Err(Error::InvalidArgument(format!(
                        "unknown parameter `{k}` for `{}` (valid: {})",
                        self.name,
                        valid.join(", ")
                    )));
                }
            }
        }
        Ok(Params(map))
    }
}

/// A run request.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Manifest {
    pub experiment: String,
    pub seed: Option<u64>,
    pub params: BTreeMap<String, String>,
    pub files: Vec<FileEntry>,
}

#[derive(Serialize)]
struct ListEntry<'a> {
    name: &'a str,
    description: &'a str,
    stochastic: bool,
    params: &'a [ParamSpec],
}

/// Ordered set of experiments.
#[derive(Debug, Clone)]
pub struct Registry {
    experiments: Vec<Experiment>,
}

impl Default for Registry {
    fn default() -> Self {
        Registry {
            experiments: builtin(),
        }
    }
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            experiments: Vec::new(),
        }
    }

    /// Adds an experiment after the existing ones.
    pub fn register(&mut self, exp: Experiment) -> Result<()> {
        if self.experiments.iter().any(|e| e.name == exp.name) {
            return Err(Error::InvalidArgument(format!(
                "experiment `{}` already registered",
                exp.name
            )));
        }
        self.experiments.push(exp);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.experiments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.experiments.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.experiments.iter().map(|e| e.name.clone()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&Experiment> {
        self.experiments
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::UnknownExperiment {
                name: name.into(),
                valid: self.names(),
            })
    }

    /// `name  description` lines in registration order.
    pub fn list_text(&self) -> String {
        let width = self.experiments.iter().map(|e| e.name.len()).max().unwrap_or(0);
        self.experiments
            .iter()
            .map(|e| format!("{:width$}  {}\n", e.name, e.description))
            .collect()
    }

    pub fn list_json(&self) -> Result<String> {
        let entries: Vec<ListEntry> = self
            .experiments
            .iter()
            .map(|e| ListEntry {
                name: &e.name,
                description: &e.description,
                stochastic: e.stochastic,
                params: &e.params,
            })
            .collect();
        Ok(serde_json::to_string_pretty(&entries)? + "\n")
    }

    /// Runs without touching the file system.
    pub fn produce(&self, name: &str, overrides: &BTreeMap<String, String>, seed: Option<u64>) -> Result<(Params, Vec<Artifact>)> {
        let exp = self.get(name)?;
        let params = exp.resolve(overrides)?;
        if exp.stochastic && seed.is_none() {
            return Err(Error::InvalidArgument(format!(
                "experiment `{name}` is stochastic; pass --seed"
            )));
        }
        let ctx = RunContext {
            params: params.clone(),
            seed,
        };
        log::info!("running {name} with {:?}", params.as_map());
        let artifacts = (exp.run)(&ctx).map_err(|e| match e {
            Error::InvalidArgument(_) => e,
            other => Error::Experiment {
                name: name.into(),
                source: Box::new(other),
            },
        })?;
        Ok((params, artifacts))
    }

    /// Runs and writes CSVs, gnuplot companions and `manifest.json`.
    pub fn run(&self, spec: &ExperimentSpec) -> Result<Manifest> {
        let (params, artifacts) = self.produce(&spec.name, &spec.params, spec.seed)?;
        fs::create_dir_all(&spec.out_dir)?;
        let mut files = Vec::new();
        for a in &artifacts {
            let csv = a.table.to_csv_string();
            files.push(write_file(&spec.out_dir, &a.name, csv.as_bytes())?);
            if let Some(plot) = &a.plot {
                let gp = plot.script(&a.name, a.table.header());
                let gp_name = format!("{}.gp", a.name.trim_end_matches(".csv"));
                files.push(write_file(&spec.out_dir, &gp_name, gp.as_bytes())?);
            }
        }
        let manifest = Manifest {
            experiment: spec.name.clone(),
            seed: spec.seed,
            params: params.as_map().clone(),
            files,
        };
        let json = serde_json::to_string_pretty(&manifest)? + "\n";
        fs::write(spec.out_dir.join("manifest.json"), json)?;
        Ok(manifest)
    }
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<FileEntry> {
    fs::write(dir.join(name), bytes)?;
    Ok(FileEntry {
        path: name.into(),
        sha256: hex::encode(Sha256::digest(bytes)),
        bytes: bytes.len(),
    })
}

fn builtin() -> Vec<Experiment> {
    vec![
        runge_interp(),
        aliasing(),
        bvp_compare(),
        cheb_polys_exp(),
        heat_demo(),
        deriv_benchmark(),
        soil_heat(),
        brownian(),
        rk4_convergence(),
        lebesgue_table(),
        trefftz_disk(),
        feynman_kac_probe(),
    ]
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let m = n.max(2) - 1;
    (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect()
}

fn summary(pairs: &[(&str, f64)]) -> Table {
    let mut t = Table::new(&["quantity", "value"]);
    for (k, v) in pairs {
        t.push(vec![Cell::from(*k), Cell::Real(*v)]);
    }
    t
}

fn runge_interp() -> Experiment {
    Experiment::new(
        "runge-interp",
        "Runge function on uniform vs Chebyshev nodes: sup-error sweep and interpolants",
        vec![
            ParamSpec::new("N", 16, "degree of the plotted interpolants"),
            ParamSpec::new("N_list", "4,8,12,16,20,24,28,32", "degrees of the error sweep"),
            ParamSpec::new("samples", 2001, "evaluation points"),
        ],
        |ctx| {
            let p = &ctx.params;
            let n: usize = p.get("N")?;
            let samples: usize = p.get("samples")?;
            let rows = runge_sweep(&p.list::<usize>("N_list")?, samples)?;
            let mut sweep = Table::new(&["N", "family", "sup_error"]);
            for r in &rows {
                sweep.push(vec![Cell::from(r.n), Cell::from(r.family), Cell::Real(r.sup_error)]);
            }
            let uni = interpolate_fn(&NodeFamily::Uniform(n), runge)?;
            let che = interpolate_fn(&NodeFamily::ChebyshevExtrema(n), runge)?;
            Ok(vec![
                Artifact::csv("runge_errors.csv", sweep),
                Artifact::csv("runge_uniform.csv", sweep_table(&uni, runge, samples))
                    .with_plot(PlotSpec::lines("Runge: uniform nodes", 1, [2, 3])),
                Artifact::csv("runge_chebyshev.csv", sweep_table(&che, runge, samples))
                    .with_plot(PlotSpec::lines("Runge: Chebyshev nodes", 1, [2, 3])),
            ])
        },
    )
}

fn aliasing() -> Experiment {
    Experiment::new(
        "aliasing",
        "Mode folding on a closed grid and the aliasing/truncation error split",
        vec![
            ParamSpec::new("k1", 1, "resolved mode"),
            ParamSpec::new("k2", 9, "aliased mode"),
            ParamSpec::new("points", 11, "closed-grid points on [-pi, pi]"),
            ParamSpec::new("N", 16, "grid size for the error split"),
            ParamSpec::new("K", 40, "spectrum support |k| <= K, coefficients 1/(1+k^2)"),
        ],
        |ctx| {
            let p = &ctx.params;
            let (k1, k2): (f64, f64) = (p.get("k1")?, p.get("k2")?);
            let points: usize = p.get("points")?;
            let mut curves = Table::new(&["x", "cos_k1", "cos_k2"]);
            for x in linspace(-PI, PI, 801) {
                curves.push_reals(&[x, (k1 * x).cos(), (k2 * x).cos()]);
            }
            let mut nodes = Table::new(&["x", "cos_k1", "cos_k2"]);
            for x in closed_grid(points) {
                nodes.push_reals(&[x, (k1 * x).cos(), (k2 * x).cos()]);
            }
            let n: usize = p.get("N")?;
            let kk: i64 = p.get("K")?;
            let spectrum: BTreeMap<i64, Complex64> = (-kk..=kk)
                .map(|k| (k, Complex64::new(1.0 / (1.0 + (k * k) as f64), 0.0)))
                .collect();
            let rep = aliasing_error(&spectrum, n)?;
            let mut coeffs = Table::new(&["k", "exact", "interp_re", "interp_im"]);
            for (k, c) in &rep.interp_coeffs {
                coeffs.push(vec![
                    Cell::Int(*k),
                    Cell::Real(rep.trunc_coeffs[k].re),
                    Cell::Real(c.re),
                    Cell::Real(c.im),
                ]);
            }
            let split = rep.interp_error_norm.powi(2)
                - rep.trunc_error_norm.powi(2)
                - rep.alias_norm.powi(2);
            Ok(vec![
                Artifact::csv("alias_curves.csv", curves)
                    .with_plot(PlotSpec::lines("cos(k1 x) and cos(k2 x)", 1, [2, 3])),
                Artifact::csv("alias_nodes.csv", nodes),
                Artifact::csv("alias_coeffs.csv", coeffs)
                    .with_plot(PlotSpec::lines("exact vs discrete coefficients", 1, [2, 3]).points()),
                Artifact::csv(
                    "alias_split.csv",
                    summary(&[
                        ("interp_error_norm", rep.interp_error_norm),
                        ("trunc_error_norm", rep.trunc_error_norm),
                        ("alias_norm", rep.alias_norm),
                        ("pythagoras_residual", split),
                    ]),
                ),
            ])
        },
    )
}

fn bvp_compare() -> Experiment {
    Experiment::new(
        "bvp-compare",
        "Tau, Galerkin and collocation solutions of u'' + u' - 2u + 2 = 0",
        vec![
            ParamSpec::new("N", 4, "trial degree of the plotted solutions"),
            ParamSpec::new("N_max", 16, "largest degree in the error table"),
            ParamSpec::new("points", 201, "plot points"),
        ],
        |ctx| {
            let p = &ctx.params;
            let n: usize = p.get("N")?;
            let n_max: usize = p.get("N_max")?;
            let mut errs = Table::new(&["N", "method", "sup_error", "residual_norm", "condition"]);
            for k in 2..=n_max {
                for m in Method::ALL {
                    let s = bvp::solve_bvp(m, k)?;
                    errs.push(vec![
                        Cell::from(k),
                        Cell::from(m.name()),
                        Cell::Real(bvp::sup_error(&s, 1001)),
                        Cell::Real(s.residual_norm),
                        Cell::Real(s.condition),
                    ]);
                }
            }
            Ok(vec![
                Artifact::csv("bvp_solutions.csv", bvp::comparison_table(n, p.get("points")?)?)
                    .with_plot(PlotSpec::lines("BVP solutions", 1, 2..=5)),
                Artifact::csv("bvp_errors.csv", errs),
            ])
        },
    )
}

fn cheb_polys_exp() -> Experiment {
    Experiment::new(
        "cheb-polys",
        "Chebyshev polynomials T_0..T_n and Hermite functions",
        vec![
            ParamSpec::new("degree", 5, "highest Chebyshev degree"),
            ParamSpec::new("hermite", 4, "highest Hermite index"),
            ParamSpec::new("points", 401, "plot points"),
        ],
        |ctx| {
            let p = &ctx.params;
            let deg: usize = p.get("degree")?;
            let points: usize = p.get("points")?;
            let polys = cheb_polys(deg);
            let mut head = vec!["x".to_string()];
            head.extend((0..=deg).map(|k| format!("T{k}")));
            let mut cheb = Table::new(&head);
            for x in linspace(-1.0, 1.0, points) {
                let mut row = vec![x];
                row.extend(polys.iter().map(|q| q.eval(x)));
                cheb.push_reals(&row);
            }
            let hn: usize = p.get("hermite")?;
            let xs = linspace(-6.0, 6.0, points);
            let h = hermite_funcs(hn, &xs)?;
            let mut head = vec!["x".to_string()];
            head.extend((0..=hn).map(|k| format!("H{k}")));
            let mut herm = Table::new(&head);
            for (j, x) in xs.iter().enumerate() {
                let mut row = vec![*x];
                row.extend(h.iter().map(|r| r[j]));
                herm.push_reals(&row);
            }
            Ok(vec![
                Artifact::csv("chebyshev.csv", cheb)
                    .with_plot(PlotSpec::lines("Chebyshev polynomials", 1, 2..=deg + 2)),
                Artifact::csv("hermite.csv", herm)
                    .with_plot(PlotSpec::lines("Hermite functions", 1, 2..=hn + 2)),
            ])
        },
    )
}

fn pde_config(p: &Params) -> Result<PdeConfig> {
    let mut cfg = PdeConfig::default();
    for key in ["N", "l", "nu", "T", "steps", "scheme", "dealias", "preset"] {
        cfg.apply(key, p.str(key)?)?;
    }
    Ok(cfg)
}

fn sech2(x: f64) -> f64 {
    1.0 / (10.0 * x).cosh().powi(2)
}

fn heat_demo() -> Experiment {
    Experiment::new(
        "heat-demo",
        "Periodic heat equation: exact spectral propagator vs method of lines, or the coupled heat-moisture model",
        vec![
            ParamSpec::new("model", "heat", "heat | heat-moisture"),
            ParamSpec::new("N", 128, "grid points"),
            ParamSpec::new("l", 1.0, "half period"),
            ParamSpec::new("nu", 0.01, "diffusivity (D_theta scale for heat-moisture)"),
            ParamSpec::new("T", 1.0, "final time"),
            ParamSpec::new("steps", 400, "time steps"),
            ParamSpec::new("scheme", "rk4", "time-stepping scheme"),
            ParamSpec::new("dealias", true, "3/2-rule products (heat-moisture)"),
            ParamSpec::new("preset", "nonlinear", "constant | nonlinear (heat-moisture)"),
            ParamSpec::new("snapshots", 10, "space-time snapshots"),
        ],
        |ctx| {
            let p = &ctx.params;
            let cfg = pde_config(p)?;
            let grid = PeriodicGrid::new(cfg.n, cfg.l)?;
            let x = grid.nodes();
            let snaps: usize = p.get("snapshots")?;
            let every = (cfg.steps / snaps.max(1)).max(1);
            match p.str("model")? {
                "heat" => {
                    let u0 = SpectralField::from_fn(&grid, sech2);
                    let exact = heat_propagate(&u0, cfg.nu, cfg.t_end)?.values()?;
                    let run = if cfg.t_end == 0.0 {
                        // nothing to integrate; the state is the initial field
                        crate::pde::MolRun {
                            fields: vec![u0.clone()],
                            snapshots: vec![(0.0, vec![u0.clone()])],
                        }
                    } else {
                        mol_run(&MolSystem::linear_heat(&u0, cfg.nu)?, cfg.scheme, cfg.t_end, cfg.steps, every)?
                    };
                    let mol = run.fields[0].values()?;
                    let init = u0.values()?;
                    let mut t = Table::new(&["x", "u0", "u_exact", "u_mol"]);
                    for i in 0..x.len() {
                        t.push_reals(&[x[i], init[i], exact[i], mol[i]]);
                    }
                    Ok(vec![
                        Artifact::csv("heat.csv", t)
                            .with_plot(PlotSpec::lines("heat equation", 1, 2..=4)),
                        Artifact::csv("heat_space_time.csv", space_time_table(&grid, &run.snapshots, 0)?),
                    ])
                }
                "heat-moisture" => {
                    let params = HeatMoistureParams::from_preset(&cfg.preset, cfg.nu)?.with_dealias(cfg.dealias);
                    let l = cfg.l;
                    let theta0 = SpectralField::from_fn(&grid, |x| 0.3 + 0.1 * (PI * x / l).sin());
                    let temp0 = SpectralField::from_fn(&grid, |x| (-20.0 * x * x).exp());
                    let sys = MolSystem::heat_moisture(&theta0, &temp0, params)?;
                    let run = mol_run(&sys, cfg.scheme, cfg.t_end, cfg.steps, every)?;
                    let (a0, b0) = (theta0.values()?, temp0.values()?);
                    let (a1, b1) = (run.fields[0].values()?, run.fields[1].values()?);
                    let mut t = Table::new(&["x", "theta0", "temp0", "theta_T", "temp_T"]);
                    for i in 0..x.len() {
                        t.push_reals(&[x[i], a0[i], b0[i], a1[i], b1[i]]);
                    }
                    Ok(vec![
                        Artifact::csv("heat_moisture.csv", t)
                            .with_plot(PlotSpec::lines("heat-moisture", 1, 2..=5)),
                        Artifact::csv("moisture_space_time.csv", space_time_table(&grid, &run.snapshots, 0)?),
                        Artifact::csv("temperature_space_time.csv", space_time_table(&grid, &run.snapshots, 1)?),
                    ])
                }
                other => Err(Error::InvalidArgument(format!(
                    "unknown model `{other}` (heat, heat-moisture)"
                ))),
            }
        },
    )
}

fn deriv_benchmark() -> Experiment {
    Experiment::new(
        "deriv-benchmark",
        "Spectral derivatives of sin(pi(x+1)) exp(sin(pi(x+1))): relative errors of orders 1-3",
        vec![
            ParamSpec::new("N", 32, "grid points"),
            ParamSpec::new("N_list", "8,16,24,32,48,64", "grid sizes of the convergence table"),
        ],
        |ctx| {
            let p = &ctx.params;
            let n: usize = p.get("N")?;
            let eps = derivative_benchmark(n)?;
            let mut e = Table::new(&["order", "epsilon"]);
            for (k, v) in eps.iter().enumerate() {
                e.push(vec![Cell::from(k + 1), Cell::Real(*v)]);
            }
            let mut conv = Table::new(&["N", "eps1", "eps2", "eps3"]);
            for m in p.list::<usize>("N_list")? {
                let v = derivative_benchmark(m)?;
                conv.push(vec![Cell::from(m), Cell::Real(v[0]), Cell::Real(v[1]), Cell::Real(v[2])]);
            }
            let grid = PeriodicGrid::new(n, 1.0)?;
            let f = SpectralField::from_fn(&grid, |x| benchmark_function(x)[0]);
            let d: Vec<Vec<f64>> = (1..=3)
                .map(|o| spectral_derivative(&f, o)?.values())
                .collect::<Result<_>>()?;
            let mut prof = Table::new(&["x", "u", "du", "d2u", "d3u", "du_exact", "d2u_exact", "d3u_exact"]);
            for (i, x) in grid.nodes().iter().enumerate() {
                let ex = benchmark_function(*x);
                prof.push_reals(&[*x, ex[0], d[0][i], d[1][i], d[2][i], ex[1], ex[2], ex[3]]);
            }
            Ok(vec![
                Artifact::csv("deriv_errors.csv", e),
                Artifact::csv("deriv_convergence.csv", conv)
                    .with_plot(PlotSpec::lines("relative derivative error", 1, 2..=4).logy().points()),
                Artifact::csv("deriv_profile.csv", prof)
                    .with_plot(PlotSpec::lines("derivatives", 1, 2..=5).points()),
            ])
        },
    )
}

fn soil_heat() -> Experiment {
    Experiment::new(
        "soil-heat",
        "Exact solution of u_t = kappa u_xx with u(0,t) = sin t, u_x(1,t) = 0 and the depth phase lag",
        vec![
            ParamSpec::new("kappa", 1.0 / (9.0 * PI * PI), "diffusivity"),
            ParamSpec::new("T", 20.0, "final time"),
            ParamSpec::new("nt", 100, "time intervals of the space-time table"),
            ParamSpec::new("nx", 40, "space intervals"),
            ParamSpec::new("depth", 0.75, "probe depth for the phase plot"),
        ],
        |ctx| {
            let p = &ctx.params;
            let sol = ExactHeatSolution::new(p.get("kappa")?, 1e-12)?;
            let t_end: f64 = p.get("T")?;
            let nt: usize = p.get("nt")?;
            let depth: f64 = p.get("depth")?;
            let mut series = Table::new(&["t", "u_surface", "u_depth"]);
            for t in linspace(0.0, t_end, 4 * nt + 1) {
                // t = 0 has no finite term budget; the cap is used there
                let terms = sol.terms_needed(t).unwrap_or(crate::pde::SERIES_TERM_CAP);
                series.push_reals(&[t, sol.eval_partial(0.0, t, terms)?, sol.eval_partial(depth, t, terms)?]);
            }
            Ok(vec![
                Artifact::csv("soil_heat.csv", sol.space_time_table(t_end, nt, p.get("nx")?)?),
                Artifact::csv("soil_phase.csv", series)
                    .with_plot(PlotSpec::lines("surface vs depth", 1, [2, 3])),
            ])
        },
    )
}

fn brownian() -> Experiment {
    Experiment::new(
        "brownian",
        "Brownian sample paths and ensemble moments",
        vec![
            ParamSpec::new("M", 2000, "paths"),
            ParamSpec::new("N", 500, "time steps"),
            ParamSpec::new("T", 1.0, "final time"),
            ParamSpec::new("show", 10, "paths written out"),
        ],
        |ctx| {
            let p = &ctx.params;
            let (m, n): (usize, usize) = (p.get("M")?, p.get("N")?);
            let t_end: f64 = p.get("T")?;
            let batch = brownian_batch(m, n, t_end, ctx.seed()?)?;
            let show = p.get::<usize>("show")?.min(m);
            let mut head = vec!["t".to_string()];
            head.extend((0..show).map(|i| format!("w{i}")));
            let mut paths = Table::new(&head);
            let mut moments = Table::new(&["t", "mean", "variance", "t_exact"]);
            paths.push_reals(&vec![0.0; show + 1]);
            moments.push_reals(&[0.0, 0.0, 0.0, 0.0]);
            let dt = batch.dt();
            for j in 0..n {
                let t = (j + 1) as f64 * dt;
                let mut row = vec![t];
                row.extend((0..show).map(|i| batch.path(i)[j]));
                paths.push_reals(&row);
                let col: Vec<f64> = (0..m).map(|i| batch.path(i)[j]).collect();
                let (mu, var) = mean_var(&col);
                moments.push_reals(&[t, mu, var, t]);
            }
            Ok(vec![
                Artifact::csv("brownian_paths.csv", paths)
                    .with_plot(PlotSpec::lines("Brownian paths", 1, 2..=show + 1)),
                Artifact::csv("brownian_moments.csv", moments)
                    .with_plot(PlotSpec::lines("ensemble mean and variance", 1, 2..=4)),
            ])
        },
    )
    .stochastic()
}

fn rk4_convergence() -> Experiment {
    let steps: Vec<String> = LOGISTIC_STEPS.iter().map(|n| n.to_string()).collect();
    Experiment::new(
        "rk4-convergence",
        "Final-time error of a time-stepping scheme on u' = u(1-u), u(0) = 2",
        vec![
            ParamSpec::new("scheme", "rk4", "time-stepping scheme"),
            ParamSpec::new("T", 2.0, "final time"),
            ParamSpec::new("N_list", steps.join(","), "step counts"),
        ],
        |ctx| {
            let p = &ctx.params;
            let scheme: SchemeSpec = p.str("scheme")?.parse()?;
            let t_end: f64 = p.get("T")?;
            let study = convergence_study(
                scheme,
                &IvpProblem::logistic(t_end),
                &[logistic_exact(t_end)],
                &p.list::<usize>("N_list")?,
            )?;
            Ok(vec![
                Artifact::csv("convergence.csv", study.table())
                    .with_plot(PlotSpec::lines("convergence", 2, [3]).logxy().points()),
                Artifact::csv(
                    "convergence_fit.csv",
                    summary(&[
                        ("slope", study.slope.unwrap_or(f64::NAN)),
                        ("fitted_points", study.fitted as f64),
                        ("declared_order", scheme.order() as f64),
                    ]),
                ),
            ])
        },
    )
}

fn lebesgue_table() -> Experiment {
    Experiment::new(
        "lebesgue-table",
        "Lebesgue constants of Chebyshev-extrema and uniform nodes against the asymptote",
        vec![ParamSpec::new("N_list", "5,10,20,40", "degrees")],
        |ctx| {
            let mut t = Table::new(&["N", "chebyshev", "asymptote", "uniform", "ratio"]);
            for n in ctx.params.list::<usize>("N_list")? {
                let c = lebesgue_constant(&cheb_nodes(&NodeFamily::ChebyshevExtrema(n))?, LEBESGUE_DENSITY)?;
                let u = lebesgue_constant(&cheb_nodes(&NodeFamily::Uniform(n))?, LEBESGUE_DENSITY)?;
                t.push(vec![
                    Cell::from(n),
                    Cell::Real(c.value),
                    Cell::Real(vertesi_asymptote(n)),
                    Cell::Real(u.value),
                    Cell::Real(u.value / c.value),
                ]);
            }
            Ok(vec![Artifact::csv("lebesgue.csv", t)
                .with_plot(PlotSpec::lines("Lebesgue constants", 1, 2..=4).logy().points())])
        },
    )
}

fn trefftz_disk() -> Experiment {
    Experiment::new(
        "trefftz-disk",
        "Trefftz / fundamental-solution collocation for Laplace on the unit disk with data e^x cos y",
        vec![
            ParamSpec::new("basis", "t-complete", "t-complete | fundamental"),
            ParamSpec::new("n_max", 16, "harmonic polynomial degree"),
            ParamSpec::new("sources", 24, "fundamental-solution sources"),
            ParamSpec::new("dilation", crate::trefftz::SOURCE_DILATION, "source curve dilation"),
            ParamSpec::new("points", 64, "boundary points"),
            ParamSpec::new("method", "least_squares", "collocation | least_squares | galerkin_boundary"),
            ParamSpec::new("lattice", 41, "lattice points per axis"),
        ],
        |ctx| {
            let p = &ctx.params;
            let curve = Curve::unit_disk();
            let basis = match p.str("basis")? {
                "t-complete" => Basis::t_complete(p.get("n_max")?, &curve),
                "fundamental" => Basis::fundamental_dilated(&curve, p.get("sources")?, p.get("dilation")?)?,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown basis `{other}` (t-complete, fundamental)"
                    )))
                }
            };
            let exact = |x: f64, y: f64| x.exp() * y.cos();
            let problem = BoundaryProblem::dirichlet(curve.clone(), move |b| exact(b.x, b.y), basis, p.get("points")?)?;
            let method: TrefftzMethod = p.str("method")?.parse()?;
            let sol = solve_trefftz(&problem, method, false)?;
            let lat = linspace(-1.0, 1.0, p.get("lattice")?);
            let mut interior: f64 = 0.0;
            for &y in &lat {
                for &x in &lat {
                    if curve.contains([x, y]) {
                        interior = interior.max((sol.eval([x, y]) - exact(x, y)).abs());
                    }
                }
            }
            let mut coeffs = Table::new(&["k", "coefficient"]);
            for (k, c) in sol.coeffs.iter().enumerate() {
                coeffs.push(vec![Cell::from(k), Cell::Real(*c)]);
            }
            Ok(vec![
                Artifact::csv("trefftz_field.csv", sol.lattice_table(&curve, &lat, &lat)),
                Artifact::csv("trefftz_coeffs.csv", coeffs),
                Artifact::csv(
                    "trefftz_summary.csv",
                    summary(&[
                        ("boundary_residual", sol.boundary_residual),
                        ("interior_sup_error", interior),
                        ("condition", sol.condition),
                        ("rank", sol.rank as f64),
                    ]),
                ),
            ])
        },
    )
}

fn feynman_kac_probe() -> Experiment {
    Experiment::new(
        "feynman-kac-probe",
        "Feynman-Kac estimates of the periodic heat equation checked against the spectral propagator",
        vec![
            ParamSpec::new("M", 100_000, "paths per probe"),
            ParamSpec::new("steps", 1, "Euler-Maruyama steps"),
            ParamSpec::new("T", 1.0, "time"),
            ParamSpec::new("nu", 0.01, "diffusivity (sigma = sqrt(2 nu))"),
            ParamSpec::new("N", 128, "spectral grid points"),
            ParamSpec::new("probes", "-0.5,-0.25,0,0.25,0.5", "probe points (grid nodes)"),
        ],
        |ctx| {
            let p = &ctx.params;
            let (m, steps): (usize, usize) = (p.get("M")?, p.get("steps")?);
            let (t, nu): (f64, f64) = (p.get("T")?, p.get("nu")?);
            let n: usize = p.get("N")?;
            let seed = ctx.seed()?;
            let grid = PeriodicGrid::new(n, 1.0)?;
            let nodes = grid.nodes();
            let spectral = heat_propagate(&SpectralField::from_fn(&grid, sech2), nu, t)?.values()?;
            let sigma = (2.0 * nu).sqrt();
            let mut rows = Vec::new();
            let mut reference = Table::new(&["probe_x", "spectral", "z_score"]);
            for (i, x) in p.list::<f64>("probes")?.into_iter().enumerate() {
                let j = nodes
                    .iter()
                    .position(|v| (v - x).abs() <= 1e-12)
                    .ok_or_else(|| Error::InvalidArgument(format!("probe {x} is not a node of the N = {n} grid")))?;
                let problem = SdeProblem::brownian(x)
                    .with_volatility(move |_| sigma)
                    .with_u0(|y| sech2(wrap_periodic(y, 1.0)));
                // distinct stream family per probe
                let est = feynman_kac(&problem, t, m, steps, seed.wrapping_add(i as u64))?;
                reference.push_reals(&[x, spectral[j], (est.estimate - spectral[j]) / est.std_error]);
                rows.push((x, est));
            }
            Ok(vec![
                Artifact::csv("fk_probe.csv", probe_table(&rows)),
                Artifact::csv("fk_reference.csv", reference),
            ])
        },
    )
    .stochastic()
}

/// Parses `--key value` pairs (and `--key=value`) into a map; later keys win.
pub fn parse_overrides(args: &[String]) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let key = a
            .strip_prefix("--")
            .ok_or_else(|| Error::InvalidArgument(format!("expected --key, got `{a}`")))?;
        if let Some((k, v)) = key.split_once('=') {
            out.insert(k.to_string(), v.to_string());
        } else {
            let v = it
                .next()
                .ok_or_else(|| Error::InvalidArgument(format!("missing value for --{key}")))?;
            out.insert(key.to_string(), v.clone());
        }
    }
    Ok(out)
}

/// Hash map view of a manifest for quick comparisons.
pub fn manifest_hashes(m: &Manifest) -> HashMap<String, String> {
    m.files.iter().map(|f| (f.path.clone(), f.sha256.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn registry_has_twelve_in_order() {
        let r = Registry::default();
        assert_eq!(r.len(), 12);
        assert_eq!(r.names()[0], "runge-interp");
        assert_eq!(r.names()[11], "feynman-kac-probe");
        let json: serde_json::Value = serde_json::from_str(&r.list_json().unwrap()).unwrap();
        assert_eq!(json.as_array().unwrap().len(), 12);
    }

    #[test]
    fn plugin_registration() {
        let mut r = Registry::default();
        r.register(Experiment::new("plugin", "custom", vec![], |_| {
            Ok(vec![Artifact::csv("p.csv", summary(&[("one", 1.0)]))])
        }))
        .unwrap();
        assert_eq!(r.len(), 13);
        assert!(r
            .register(Experiment::new("plugin", "again", vec![], |_| Ok(vec![])))
            .is_err());
    }

    #[test]
    fn unknown_names_and_keys() {
        let r = Registry::default();
        match r.produce("nope", &BTreeMap::new(), None) {
            Err(Error::UnknownExperiment { valid, .. }) => assert_eq!(valid.len(), 12),
            other => panic!("{other:?}"),
        }
        let e = r.produce("deriv-benchmark", &params(&[("bogus", "1")]), None).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = r.produce("brownian", &BTreeMap::new(), None).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn deriv_benchmark_values() {
        let (_, arts) = Registry::default()
            .produce("deriv-benchmark", &params(&[("N", "32")]), None)
            .unwrap();
        let rows = arts[0].table.rows();
        let tol = [1e-12, 1e-12, 1e-11];
        for (row, tol) in rows.iter().zip(tol) {
            match row[1] {
                Cell::Real(v) => assert!(v <= tol),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn heat_demo_at_zero_time() {
        let (_, arts) = Registry::default()
            .produce("heat-demo", &params(&[("T", "0"), ("N", "32"), ("steps", "1")]), None)
            .unwrap();
        for row in arts[0].table.rows() {
            let v: Vec<f64> = row
                .iter()
                .map(|c| match c {
                    Cell::Real(v) => *v,
                    _ => unreachable!(),
                })
                .collect();
            assert!((v[1] - v[2]).abs() < 1e-15 && (v[1] - v[3]).abs() < 1e-15);
        }
    }

    #[test]
    fn numerical_failure_carries_context() {
        let e = Registry::default()
            .produce("rk4-convergence", &params(&[("scheme", "fe"), ("T", "2"), ("N_list", "0")]), None)
            .unwrap_err();
        assert!(e.exit_code() == 2 || e.exit_code() == 3);
        let mut r = Registry::empty();
        r.register(Experiment::new("boom", "fails", vec![], |_| {
            Err(Error::SingularSystem { condition: f64::INFINITY })
        }))
        .unwrap();
        let e = r.produce("boom", &BTreeMap::new(), None).unwrap_err();
        assert!(matches!(e, Error::Experiment { .. }));
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn run_writes_manifest_and_is_deterministic() {
        let r = Registry::default();
        let dir = tempfile::tempdir().unwrap();
        let spec = |sub: &str| ExperimentSpec {
            name: "brownian".into(),
            params: params(&[("M", "50"), ("N", "20")]),
            out_dir: dir.path().join(sub),
            seed: Some(7),
        };
        let a = r.run(&spec("a")).unwrap();
        let b = r.run(&spec("b")).unwrap();
        assert_eq!(manifest_hashes(&a), manifest_hashes(&b));
        assert!(dir.path().join("a/manifest.json").exists());
        assert!(dir.path().join("a/brownian_paths.gp").exists());
        let text = fs::read_to_string(dir.path().join("a/brownian_paths.csv")).unwrap();
        assert!(text.starts_with("t,w0,"));
    }

    #[test]
    fn override_parsing() {
        let args: Vec<String> = ["--N", "32", "--T=0.5"].iter().map(|s| s.to_string()).collect();
        let m = parse_overrides(&args).unwrap();
        assert_eq!(m["N"], "32");
        assert_eq!(m["T"], "0.5");
        assert!(parse_overrides(&["N".to_string()]).is_err());
        assert!(parse_overrides(&["--N".to_string()]).is_err());
    }
}
