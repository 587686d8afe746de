//! Indirect Trefftz solvers for the 2D Laplace equation.
//!
//! The trial space is either the harmonic polynomials
//! `{1, Re z^k, Im z^k}` about the domain centroid (the real form of
//! `r^k e^{ikθ}`) or free-space Green functions `ln|x - Q| / 2π` with sources
//! `Q` outside the domain. Boundary operators are `α u + β ∂u/∂n`, and the
//! coefficients come from collocation, least squares or a boundary Galerkin
//! projection.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::linalg::{least_squares, solve_square};
use crate::table::{Cell, Table};
use crate::{Error, Result};

/// Default dilation of the boundary about its centroid for source placement.
pub const SOURCE_DILATION: f64 = 1.8;
/// Boundary Galerkin quadrature points per collocation point.
pub const GALERKIN_DENSITY: usize = 8;
/// Condition numbers above this are logged as warnings.
pub const CONDITION_WARN: f64 = 1e12;

pub type Point = [f64; 2];

/// Closed boundary curve, counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    Circle { center: Point, radius: f64 },
    Polygon(Vec<Point>),
}

/// A boundary sample with its outward unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub x: f64,
    pub y: f64,
    pub nx: f64,
    pub ny: f64,
    /// Arc-length parameter in `[0, perimeter)`.
    pub s: f64,
    /// Polygon edge index, or arc index for circles split into segments.
    pub segment: usize,
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        / 2.0
}

fn dist(a: Point, b: Point) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

fn seg_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    ((p[0] - a[0] - t * dx).powi(2) + (p[1] - a[1] - t * dy).powi(2)).sqrt()
}

impl Curve {
    pub fn unit_disk() -> Self {
        Curve::Circle {
            center: [0.0, 0.0],
            radius: 1.0,
        }
    }

    /// Axis-aligned square `[-h, h]^2`.
    pub fn square(h: f64) -> Self {
        Curve::Polygon(vec![[-h, -h], [h, -h], [h, h], [-h, h]])
    }

    /// Polygon from vertices in either orientation (stored counter-clockwise).
    pub fn polygon(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.first() == vertices.last() {
            vertices.pop();
        }
        let area = signed_area(&vertices);
        if !(area.abs() > 0.0) || vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("degenerate polygon".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(Curve::Polygon(vertices))
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            Curve::Circle { radius, .. } => 2.0 * PI * radius,
            Curve::Polygon(v) => (0..v.len())
                .map(|i| dist(v[i], v[(i + 1) % v.len()]))
                .sum(),
        }
    }

    pub fn centroid(&self) -> Point {
        match self {
            Curve::Circle { center, .. } => *center,
            Curve::Polygon(v) => {
                let a = signed_area(v);
                let n = v.len();
                let (mut cx, mut cy) = (0.0, 0.0);
                for i in 0..n {
                    let (p, q) = (v[i], v[(i + 1) % n]);
                    let c = p[0] * q[1] - q[0] * p[1];
                    cx += (p[0] + q[0]) * c;
                    cy += (p[1] + q[1]) * c;
                }
                [cx / (6.0 * a), cy / (6.0 * a)]
            }
        }
    }

    /// Largest distance from the centroid to the boundary.
    pub fn radius(&self) -> f64 {
        let c = self.centroid();
        match self {
            Curve::Circle { radius, .. } => *radius,
            Curve::Polygon(v) => v
                .iter()
                .map(|p| ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt())
                .fold(0.0, f64::max),
        }
    }

    /// Number of boundary segments a BC list must cover (`arcs` for circles).
    pub fn segment_count(&self, arcs: usize) -> usize {
        match self {
            Curve::Circle { .. } => arcs.max(1),
            Curve::Polygon(v) => v.len(),
        }
    }

    /// Positive outside, negative inside, zero on the curve.
    pub fn exterior_distance(&self, p: Point) -> f64 {
        match self {
            Curve::Circle { center, radius } => {
                ((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2)).sqrt() - radius
            }
            Curve::Polygon(v) => {
                let n = v.len();
                let d = (0..n)
                    .map(|i| seg_distance(p, v[i], v[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min);
                if self.contains_polygon(v, p) {
                    -d
                } else {
                    d
                }
            }
        }
    }

    fn contains_polygon(&self, v: &[Point], p: Point) -> bool {
        let n = v.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (v[i], v[j]);
            if (a[1] > p[1]) != (b[1] > p[1])
                && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0]
            {
                inside = !inside;
            }
            j = i;
        }
        inside
    }

    /// Strictly interior.
    pub fn contains(&self, p: Point) -> bool {
        self.exterior_distance(p) < 0.0
    }

    /// Scale about the centroid.
    pub fn dilate(&self, factor: f64) -> Curve {
        let c = self.centroid();
        let map = |p: &Point| [c[0] + factor * (p[0] - c[0]), c[1] + factor * (p[1] - c[1])];
        match self {
            Curve::Circle { center, radius } => Curve::Circle {
                center: *center,
                radius: radius * factor,
            },
            Curve::Polygon(v) => Curve::Polygon(v.iter().map(map).collect()),
        }
    }

    /// `p` points equispaced in arc length, offset by half a spacing so that
    /// polygon corners are never sampled. Circles are split into `arcs`
    /// equal segments starting at angle 0.
    pub fn sample(&self, p: usize, arcs: usize) -> Vec<BoundaryPoint> {
        let total = self.perimeter();
        let h = total / p as f64;
        (0..p).map(|i| self.point_at((i as f64 + 0.5) * h, arcs)).collect()
    }

    /// Boundary point at arc length `s`.
    pub fn point_at(&self, s: f64, arcs: usize) -> BoundaryPoint {
        let s = s.rem_euclid(self.perimeter());
        match self {
            Curve::Circle { center, radius } => {
                let th = s / radius;
                let (sn, cs) = th.sin_cos();
                let arcs = arcs.max(1);
                BoundaryPoint {
                    x: center[0] + radius * cs,
                    y: center[1] + radius * sn,
                    nx: cs,
                    ny: sn,
                    s,
                    segment: ((th / (2.0 * PI) * arcs as f64) as usize).min(arcs - 1),
                }
            }
            Curve::Polygon(v) => {
                let n = v.len();
                let mut rest = s;
                for i in 0..n {
                    let (a, b) = (v[i], v[(i + 1) % n]);
                    let len = dist(a, b);
                    if rest <= len || i == n - 1 {
                        let t = (rest / len).min(1.0);
                        let (dx, dy) = ((b[0] - a[0]) / len, (b[1] - a[1]) / len);
                        return BoundaryPoint {
                            x: a[0] + t * (b[0] - a[0]),
                            y: a[1] + t * (b[1] - a[1]),
                            nx: dy,
                            ny: -dx,
                            s,
                            segment: i,
                        };
                    }
                    rest -= len;
                }
                unreachable!("polygon has at least three edges")
            }
        }
    }
}

/// `α u + β ∂u/∂n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    Robin { alpha: f64, beta: f64 },
}

impl BoundaryCondition {
    pub fn robin(alpha: f64, beta: f64) -> Result<Self> {
        if alpha == 0.0 && beta == 0.0 || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "Robin condition needs finite (α, β) != (0, 0), got ({alpha}, {beta})"
            )));
        }
        Ok(BoundaryCondition::Robin { alpha, beta })
    }

    pub fn weights(self) -> (f64, f64) {
        match self {
            BoundaryCondition::Dirichlet => (1.0, 0.0),
            BoundaryCondition::Neumann => (0.0, 1.0),
            BoundaryCondition::Robin { alpha, beta } => (alpha, beta),
        }
    }
}

/// Trial space.
#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    /// `1, Re z^k, Im z^k` for `k = 1..=n_max`, with `z = (x - c) / ρ`.
    TComplete { n_max: usize, center: Point, scale: f64 },
    Fundamental { sources: Vec<Point> },
}

impl Basis {
    /// Harmonic polynomials centred at the curve centroid, scaled by its radius.
    pub fn t_complete(n_max: usize, curve: &Curve) -> Self {
        Basis::TComplete {
            n_max,
            center: curve.centroid(),
            scale: curve.radius(),
        }
    }

    /// `count` sources on the boundary dilated by `factor` about its centroid.
    pub fn fundamental_dilated(curve: &Curve, count: usize, factor: f64) -> Result<Self> {
        if !(factor > 1.0) || count == 0 {
            return Err(Error::InvalidArgument(format!(
                "need count >= 1 and dilation > 1 (got {count}, {factor})"
            )));
        }
        let sources = curve
            .dilate(factor)
            .sample(count, 1)
            .iter()
            .map(|p| [p.x, p.y])
            .collect();
        Ok(Basis::Fundamental { sources })
    }

    pub fn len(&self) -> usize {
        match self {
            Basis::TComplete { n_max, .. } => 2 * n_max + 1,
            Basis::Fundamental { sources } => sources.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Values and gradients of every basis function at `p`.
    pub fn eval_with_gradient(&self, p: Point) -> (Vec<f64>, Vec<Point>) {
        match self {
            Basis::TComplete { n_max, center, scale } => {
                let z = Complex64::new((p[0] - center[0]) / scale, (p[1] - center[1]) / scale);
                let mut vals = Vec::with_capacity(2 * n_max + 1);
                let mut grads = Vec::with_capacity(2 * n_max + 1);
                vals.push(1.0);
                grads.push([0.0, 0.0]);
                // zk = z^k, dk = k z^{k-1}
                let mut prev = Complex64::new(1.0, 0.0);
                for k in 1..=*n_max {
                    let dk = prev * k as f64 / scale;
                    let zk = prev * z;
                    vals.push(zk.re);
                    grads.push([dk.re, -dk.im]);
                    vals.push(zk.im);
                    grads.push([dk.im, dk.re]);
                    prev = zk;
                }
                (vals, grads)
            }
            Basis::Fundamental { sources } => sources
                .iter()
                .map(|q| {
                    let (dx, dy) = (p[0] - q[0], p[1] - q[1]);
                    let r2 = dx * dx + dy * dy;
                    (
                        r2.ln() / (4.0 * PI),
                        [dx / (2.0 * PI * r2), dy / (2.0 * PI * r2)],
                    )
                })
                .unzip(),
        }
    }

    pub fn values(&self, p: Point) -> Vec<f64> {
        match self {
            Basis::Fundamental { sources } => sources
                .iter()
                .map(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).ln() / (4.0 * PI))
                .collect(),
            _ => self.eval_with_gradient(p).0,
        }
    }

    /// `α φ_k + β ∂φ_k/∂n` at a boundary point.
    fn boundary_row(&self, bp: &BoundaryPoint, bc: BoundaryCondition) -> Vec<f64> {
        let (a, b) = bc.weights();
        let (v, g) = self.eval_with_gradient([bp.x, bp.y]);
        v.iter()
            .zip(&g)
            .map(|(v, g)| a * v + b * (g[0] * bp.nx + g[1] * bp.ny))
            .collect()
    }
}

/// Green-function matrix `G[i][k] = ln|x_i - Q_k| / 2π`.
pub fn fundamental_basis(sources: &[Point], points: &[Point]) -> Result<DMatrix<f64>> {
    let scale = points
        .iter()
        .chain(sources)
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(1.0, f64::max);
    for q in sources {
        for p in points {
            if ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt() <= 1e-12 * scale {
                return Err(Error::InvalidArgument(format!(
                    "source ({}, {}) coincides with an evaluation point",
                    q[0], q[1]
                )));
            }
        }
    }
    let basis = Basis::Fundamental {
        sources: sources.to_vec(),
    };
    let rows: Vec<Vec<f64>> = points.par_iter().map(|p| basis.values(*p)).collect();
    Ok(DMatrix::from_fn(points.len(), sources.len(), |i, k| rows[i][k]))
}

pub type BoundaryData = Arc<dyn Fn(&BoundaryPoint) -> f64 + Send + Sync>;

/// Laplace problem with per-segment boundary conditions.
#[derive(Clone)]
pub struct BoundaryProblem {
    pub curve: Curve,
    /// One condition per segment (see [`Curve::segment_count`]).
    pub bcs: Vec<BoundaryCondition>,
    pub data: BoundaryData,
    pub basis: Basis,
    /// Number of boundary points `P`.
    pub points: usize,
}

impl fmt::Debug for BoundaryProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryProblem")
            .field("curve", &self.curve)
            .field("bcs", &self.bcs)
            .field("basis", &self.basis)
            .field("points", &self.points)
            .finish()
    }
}

impl BoundaryProblem {
    pub fn new(
        curve: Curve,
        bcs: Vec<BoundaryCondition>,
        data: impl Fn(&BoundaryPoint) -> f64 + Send + Sync + 'static,
        basis: Basis,
        points: usize,
    ) -> Result<Self> {
        if bcs.is_empty() {
            return Err(Error::InvalidArgument("no boundary conditions".into()));
        }
        if let Curve::Polygon(v) = &curve {
            if bcs.len() != v.len() {
                return Err(Error::SizeMismatch {
                    expected: v.len(),
                    found: bcs.len(),
                });
            }
        }
        for bc in &bcs {
            if let BoundaryCondition::Robin { alpha, beta } = *bc {
                BoundaryCondition::robin(alpha, beta)?;
            }
        }
        if let Basis::Fundamental { sources } = &basis {
            let tol = 1e-12 * curve.radius();
            for q in sources {
                if curve.exterior_distance(*q) <= tol {
                    return Err(Error::InvalidArgument(format!(
                        "source ({}, {}) is not strictly outside the domain",
                        q[0], q[1]
                    )));
                }
            }
        }
        if basis.is_empty() || points == 0 {
            return Err(Error::InvalidArgument("empty basis or no boundary points".into()));
        }
        Ok(BoundaryProblem {
            curve,
            bcs,
            data: Arc::new(data),
            basis,
            points,
        })
    }

    /// Dirichlet data everywhere.
    pub fn dirichlet(
        curve: Curve,
        data: impl Fn(&BoundaryPoint) -> f64 + Send + Sync + 'static,
        basis: Basis,
        points: usize,
    ) -> Result<Self> {
        let n = curve.segment_count(1);
        Self::new(curve, vec![BoundaryCondition::Dirichlet; n], data, basis, points)
    }

    fn bc_at(&self, bp: &BoundaryPoint) -> BoundaryCondition {
        self.bcs[bp.segment.min(self.bcs.len() - 1)]
    }

    fn arcs(&self) -> usize {
        self.bcs.len()
    }

    /// `𝓑u - u°` at every boundary point, for given coefficients.
    pub fn residuals(&self, coeffs: &[f64], samples: &[BoundaryPoint]) -> Vec<f64> {
        samples
            .par_iter()
            .map(|bp| {
                let row = self.basis.boundary_row(bp, self.bc_at(bp));
                row.iter().zip(coeffs).map(|(a, c)| a * c).sum::<f64>() - (self.data)(bp)
            })
            .collect()
    }

    fn assemble(&self, samples: &[BoundaryPoint], weight: f64) -> (DMatrix<f64>, DVector<f64>) {
        let rows: Vec<(Vec<f64>, f64)> = samples
            .par_iter()
            .map(|bp| (self.basis.boundary_row(bp, self.bc_at(bp)), (self.data)(bp)))
            .collect();
        let n = self.basis.len();
        let a = DMatrix::from_fn(rows.len(), n, |i, k| weight * rows[i].0[k]);
        let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| weight * r.1));
        (a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrefftzMethod {
    /// Square solve when `P` equals the basis size, least squares otherwise.
    Collocation,
    LeastSquares,
    /// Residual orthogonal to `𝓑φ_k` in `L2(∂Ω)` by trapezoid quadrature.
    GalerkinBoundary,
}

impl TrefftzMethod {
    pub const ALL: [TrefftzMethod; 3] = [
        TrefftzMethod::Collocation,
        TrefftzMethod::LeastSquares,
        TrefftzMethod::GalerkinBoundary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TrefftzMethod::Collocation => "collocation",
            TrefftzMethod::LeastSquares => "least_squares",
            TrefftzMethod::GalerkinBoundary => "galerkin_boundary",
        }
    }
}

impl fmt::Display for TrefftzMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TrefftzMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s || m.name().replace('_', "-") == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown Trefftz method `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct TrefftzSolution {
    pub method: TrefftzMethod,
    pub basis: Basis,
    pub coeffs: Vec<f64>,
    /// Sup-norm of `𝓑u - u°` over the boundary points.
    pub boundary_residual: f64,
    pub condition: f64,
    pub rank: usize,
}

impl TrefftzSolution {
    pub fn eval(&self, p: Point) -> f64 {
        self.basis.values(p).iter().zip(&self.coeffs).map(|(a, c)| a * c).sum()
    }

    pub fn gradient(&self, p: Point) -> Point {
        let (_, g) = self.basis.eval_with_gradient(p);
        g.iter().zip(&self.coeffs).fold([0.0, 0.0], |acc, (g, c)| {
            [acc[0] + c * g[0], acc[1] + c * g[1]]
        })
    }

    /// Five-point Laplacian of the solution at `p` with spacing `h`.
    pub fn laplacian_probe(&self, p: Point, h: f64) -> f64 {
        let u = |dx: f64, dy: f64| self.eval([p[0] + dx, p[1] + dy]);
        (u(h, 0.0) + u(-h, 0.0) + u(0.0, h) + u(0.0, -h) - 4.0 * u(0.0, 0.0)) / (h * h)
    }

    /// Field on a lattice: rows `x,y,inside,u`; `u` is evaluated everywhere
    /// but only meaningful where `inside = 1`.
    pub fn lattice_table(&self, curve: &Curve, xs: &[f64], ys: &[f64]) -> Table {
        let mut t = Table::new(&["x", "y", "inside", "u"]);
        for &y in ys {
            for &x in xs {
                t.push(vec![
                    Cell::Real(x),
                    Cell::Real(y),
                    Cell::Int(curve.contains([x, y]) as i64),
                    Cell::Real(self.eval([x, y])),
                ]);
            }
        }
        t
    }
}

/// Solve for the basis coefficients. `truncate` allows an SVD-truncated
/// solution of rank-deficient systems instead of an error.
pub fn solve_trefftz(problem: &BoundaryProblem, method: TrefftzMethod, truncate: bool) -> Result<TrefftzSolution> {
    let n = problem.basis.len();
    let p = problem.points;
    let colloc = problem.curve.sample(p, problem.arcs());
    let solved = match method {
        TrefftzMethod::Collocation | TrefftzMethod::LeastSquares => {
            if p < n {
                return Err(Error::InvalidArgument(format!(
                    "{p} boundary conditions for {n} coefficients"
                )));
            }
            let (a, b) = problem.assemble(&colloc, 1.0);
            if method == TrefftzMethod::Collocation && p == n {
                solve_square(a, b)?
            } else {
                least_squares(a, b, truncate)?
            }
        }
        TrefftzMethod::GalerkinBoundary => {
            // composite trapezoid on a closed curve: equal weights
            let q = GALERKIN_DENSITY * p.max(n);
            let quad = problem.curve.sample(q, problem.arcs());
            let w = (problem.curve.perimeter() / q as f64).sqrt();
            let (a, b) = problem.assemble(&quad, w);
            least_squares(a, b, truncate)?
        }
    };
    if solved.condition > CONDITION_WARN {
        log::warn!("trefftz {method}: condition number {:.3e}", solved.condition);
    } else {
        log::info!("trefftz {method}: condition number {:.3e}", solved.condition);
    }
    let coeffs: Vec<f64> = solved.x.iter().cloned().collect();
    let boundary_residual = problem
        .residuals(&coeffs, &colloc)
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(TrefftzSolution {
        method,
        basis: problem.basis.clone(),
        coeffs,
        boundary_residual,
        condition: solved.condition,
        rank: solved.rank,
    })
}

/// Polygon read from CSV with header `x,y,bc[,value][,alpha,beta]`.
/// The tag on vertex `i` applies to the edge from vertex `i` to `i + 1`;
/// `value` is constant data on that edge (default 0).
#[derive(Debug, Clone, PartialEq)]
pub struct PolylineSpec {
    pub curve: Curve,
    pub bcs: Vec<BoundaryCondition>,
    pub values: Vec<f64>,
}

impl PolylineSpec {
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty polyline file".into()))?
            .split(',')
            .map(str::trim)
            .collect();
        let col = |name: &str| header.iter().position(|h| *h == name);
        let (ix, iy, ibc) = match (col("x"), col("y"), col("bc")) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(Error::InvalidArgument("polyline header needs x,y,bc".into())),
        };
        let (ival, ia, ib) = (col("value"), col("alpha"), col("beta"));
        let mut verts = Vec::new();
        let mut bcs = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            let num = |i: Option<usize>, default: f64| -> Result<f64> {
                match i.and_then(|i| f.get(i)) {
                    None | Some(&"") => Ok(default),
                    Some(s) => s.parse::<f64>().map_err(|_| {
                        Error::InvalidArgument(format!("row {}: bad number `{s}`", lineno + 2))
                    }),
                }
            };
            verts.push([num(Some(ix), f64::NAN)?, num(Some(iy), f64::NAN)?]);
            values.push(num(ival, 0.0)?);
            let tag = f.get(ibc).copied().unwrap_or("");
            bcs.push(match tag {
                "dirichlet" | "D" => BoundaryCondition::Dirichlet,
                "neumann" | "N" => BoundaryCondition::Neumann,
                "robin" | "R" => BoundaryCondition::robin(num(ia, 0.0)?, num(ib, 0.0)?)?,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "row {}: unknown boundary tag `{other}`",
                        lineno + 2
                    )))
                }
            });
        }
        let area = signed_area(&verts);
        let curve = Curve::polygon(verts.clone())?;
        if area < 0.0 {
            // edge i -> i+1 becomes edge (n-2-i) after reversal
            bcs.reverse();
            bcs.rotate_left(1);
            values.reverse();
            values.rotate_left(1);
        }
        Ok(PolylineSpec { curve, bcs, values })
    }

    /// Problem with the per-edge constant data.
    pub fn problem(&self, basis: Basis, points: usize) -> Result<BoundaryProblem> {
        let values = self.values.clone();
        BoundaryProblem::new(
            self.curve.clone(),
            self.bcs.clone(),
            move |bp| values[bp.segment],
            basis,
            points,
        )
    }
}
