//! Dense linear solves shared by the BVP, implicit time-stepping and Trefftz
//! modules. Thin wrappers over nalgebra that always report a condition
//! estimate.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Solution of a linear system together with the 2-norm condition estimate
/// of the matrix.
#[derive(Debug, Clone)]
pub struct Solved {
    pub x: DVector<f64>,
    pub condition: f64,
    pub rank: usize,
}

/// Ratio of extreme singular values.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let sv = a.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Square solve by LU with partial pivoting.
pub fn solve_square(a: DMatrix<f64>, b: DVector<f64>) -> Result<Solved> {
    if a.nrows() != a.ncols() {
        return Err(Error::SizeMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if b.len() != a.nrows() {
        return Err(Error::SizeMismatch {
            expected: a.nrows(),
            found: b.len(),
        });
    }
    let condition = condition_number(&a);
    if !condition.is_finite() || condition > 1.0 / f64::EPSILON {
        return Err(Error::SingularSystem { condition });
    }
    let n = a.ncols();
    let x = a
        .lu()
        .solve(&b)
        .ok_or(Error::SingularSystem { condition })?;
    log::debug!("dense solve n={n} cond={condition:.3e}");
    Ok(Solved {
        x,
        condition,
        rank: n,
    })
}

/// Least-squares solve through the SVD. Rank deficiency (numerical rank below
/// the column count) is an error unless `truncate` is set, in which case the
/// pseudo-inverse drops the small singular values.
pub fn least_squares(a: DMatrix<f64>, b: DVector<f64>, truncate: bool) -> Result<Solved> {
    if b.len() != a.nrows() {
        return Err(Error::SizeMismatch {
            expected: a.nrows(),
            found: b.len(),
        });
    }
    let columns = a.ncols();
    let svd = a.svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let smin = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let cutoff = smax * f64::EPSILON * (a_dim(columns, b.len()) as f64);
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > cutoff)
        .count();
    if rank < columns && !truncate {
        return Err(Error::RankDeficient {
            rank,
            columns,
            condition,
        });
    }
    let x = svd
        .solve(&b, cutoff)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    log::debug!("least squares {}x{columns} rank={rank} cond={condition:.3e}", b.len());
    Ok(Solved { x, condition, rank })
}

fn a_dim(cols: usize, rows: usize) -> usize {
    cols.max(rows)
}

/// Least-squares slope of `ln y` against `ln x`. `None` with fewer than two
/// usable (positive, finite) points.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}
