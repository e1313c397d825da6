//! Lower convex envelopes of sampled functions on an interval or on a planar
//! point cloud.
//!
//! In two dimensions the envelope at a query point p is the optimum of
//!
//!   min Σ λ_i f_i  s.t.  Σ λ_i (x_i, y_i, 1) = (p, 1),  λ ≥ 0,
//!
//! which is solved by a revised simplex method with a 3×3 basis. Successive
//! queries reuse the previous optimal basis.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{GgmError, Result};

/// Reduced-cost threshold below which a column may enter the basis.
const PRICE_TOL: f64 = 1e-12;
/// Smallest admissible pivot element in the ratio test.
const PIVOT_TOL: f64 = 1e-10;
/// Barycentric slack when testing whether a triangle contains a point.
const INSIDE_TOL: f64 = 1e-12;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 50;
const MAX_PIVOTS: usize = 20_000;

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Indices of the lower convex hull of (t_i, v_i), left to right.
pub fn lower_hull_1d(ts: &[f64], values: &[f64]) -> Result<Vec<usize>> {
    if ts.len() != values.len() {
        return Err(GgmError::InvalidArgument {
            name: "values",
            reason: format!("{} abscissae but {} values", ts.len(), values.len()),
        });
    }
    if ts.len() < 2 {
        return Err(GgmError::InvalidArgument {
            name: "samples",
            reason: format!("need at least 2 samples, got {}", ts.len()),
        });
    }
    if ts.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(GgmError::InvalidArgument {
            name: "samples",
            reason: "abscissae must be strictly increasing".into(),
        });
    }
    let mut hull: Vec<usize> = Vec::with_capacity(ts.len());
    for i in 0..ts.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if cross([ts[a], values[a]], [ts[b], values[b]], [ts[i], values[i]]) <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    Ok(hull)
}

/// Greatest convex minorant of the piecewise-linear interpolant, at the samples.
pub fn convex_envelope_1d(ts: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    let hull = lower_hull_1d(ts, values)?;
    let mut out = vec![0.0; ts.len()];
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let slope = (values[b] - values[a]) / (ts[b] - ts[a]);
        for i in a..=b {
            out[i] = (values[a] + slope * (ts[i] - ts[a])).min(values[i]);
        }
    }
    if hull.len() == 1 {
        out[0] = values[0];
    }
    Ok(out)
}

/// A hull edge spanning more than one sample interval, with the largest gap
/// between the samples it skips and the chord.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearSegment {
    pub start: usize,
    pub end: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub max_gap: f64,
}

/// Hull edges of the 1D envelope where the raw samples rise above the chord
/// by more than `tol`.
pub fn linear_segments(ts: &[f64], values: &[f64], tol: f64) -> Result<Vec<LinearSegment>> {
    let hull = lower_hull_1d(ts, values)?;
    let mut out = Vec::new();
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a < 2 {
            continue;
        }
        let slope = (values[b] - values[a]) / (ts[b] - ts[a]);
        let max_gap = (a + 1..b)
            .map(|i| values[i] - (values[a] + slope * (ts[i] - ts[a])))
            .fold(0.0, f64::max);
        if max_gap > tol {
            out.push(LinearSegment {
                start: a,
                end: b,
                t_start: ts[a],
                t_end: ts[b],
                max_gap,
            });
        }
    }
    Ok(out)
}

/// Counter-clockwise convex hull of a planar point set (monotone chain).
fn convex_hull_2d(points: &[[f64; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a][0]
            .total_cmp(&points[b][0])
            .then(points[a][1].total_cmp(&points[b][1]))
    });
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && cross(points[lower[lower.len() - 2]], points[lower[lower.len() - 1]], points[i]) <= 0.0
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && cross(points[upper[upper.len() - 2]], points[upper[upper.len() - 1]], points[i]) <= 0.0
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Lower convex envelope over a planar point cloud.
pub struct Envelope2d<'a> {
    points: &'a [[f64; 2]],
    values: &'a [f64],
    hull: Vec<usize>,
    basis: Option<[usize; 3]>,
}

impl<'a> Envelope2d<'a> {
    pub fn new(points: &'a [[f64; 2]], values: &'a [f64]) -> Result<Self> {
        if points.len() != values.len() {
            return Err(GgmError::InvalidArgument {
                name: "values",
                reason: format!("{} points but {} values", points.len(), values.len()),
            });
        }
        if points.iter().flatten().chain(values).any(|v| !v.is_finite()) {
            return Err(GgmError::InvalidArgument {
                name: "values",
                reason: "non-finite coordinate or value".into(),
            });
        }
        let hull = convex_hull_2d(points);
        if hull.len() < 3 {
            return Err(GgmError::DegenerateGrid(format!(
                "{} points span fewer than three hull vertices",
                points.len()
            )));
        }
        Ok(Self {
            points,
            values,
            hull,
            basis: None,
        })
    }

    fn column(&self, j: usize) -> Vector3<f64> {
        let [x, y] = self.points[j];
        Vector3::new(x, y, 1.0)
    }

    fn basis_matrix(&self, basis: &[usize; 3]) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.column(basis[0]), self.column(basis[1]), self.column(basis[2])])
    }

    /// Barycentric weights of `rhs` in `basis`, if the basis is invertible.
    fn solve_basis(&self, basis: &[usize; 3], rhs: &Vector3<f64>) -> Option<(Matrix3<f64>, Vector3<f64>)> {
        let inv = self.basis_matrix(basis).try_inverse()?;
        let lambda = inv * rhs;
        Some((inv, lambda))
    }

    fn fan_triangle(&self, rhs: &Vector3<f64>) -> Option<[usize; 3]> {
        let h = &self.hull;
        (1..h.len() - 1).map(|k| [h[0], h[k], h[k + 1]]).find(|tri| {
            self.solve_basis(tri, rhs)
                .is_some_and(|(_, l)| l.iter().all(|&v| v >= -INSIDE_TOL))
        })
    }

    /// Envelope value at `p`, which must lie in the convex hull of the cloud.
    pub fn at(&mut self, p: [f64; 2]) -> Result<f64> {
        let rhs = Vector3::new(p[0], p[1], 1.0);
        let warm = self.basis.and_then(|b| {
            self.solve_basis(&b, &rhs)
                .filter(|(_, l)| l.iter().all(|&v| v >= -INSIDE_TOL))
                .map(|_| b)
        });
        let mut basis = match warm.or_else(|| self.fan_triangle(&rhs)) {
            Some(b) => b,
            None => return Err(GgmError::OutsideSimplex(p.to_vec())),
        };

        let mut degenerate = 0usize;
        for _ in 0..MAX_PIVOTS {
            let (inv, lambda) = self
                .solve_basis(&basis, &rhs)
                .ok_or_else(|| GgmError::DegenerateGrid("singular simplex basis".into()))?;
            let cb = Vector3::new(
                self.values[basis[0]],
                self.values[basis[1]],
                self.values[basis[2]],
            );
            let pi = inv.transpose() * cb;
            let bland = degenerate >= DEGENERATE_RUN;

            let mut entering: Option<(usize, f64)> = None;
            for (j, (pt, &f)) in self.points.iter().zip(self.values).enumerate() {
                let r = f - (pi[0] * pt[0] + pi[1] * pt[1] + pi[2]);
                if r < -PRICE_TOL {
                    if bland {
                        entering = Some((j, r));
                        break;
                    }
                    if entering.is_none_or(|(_, best)| r < best) {
                        entering = Some((j, r));
                    }
                }
            }
            let Some((j, _)) = entering else {
                self.basis = Some(basis);
                let lambda = lambda.map(|v| v.max(0.0));
                return Ok(cb.dot(&lambda) / lambda.sum());
            };

            let d = inv * self.column(j);
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..3 {
                if d[i] > PIVOT_TOL {
                    let ratio = lambda[i].max(0.0) / d[i];
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-15 || (ratio <= lr + 1e-15 && basis[i] < basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((i, ratio)) = leave else {
                return Err(GgmError::DegenerateGrid("unbounded envelope program".into()));
            };
            degenerate = if ratio < 1e-14 { degenerate + 1 } else { 0 };
            basis[i] = j;
        }
        Err(GgmError::NoConvergence(MAX_PIVOTS))
    }
}

/// Envelope at every point of the cloud, clamped to never exceed the raw value.
pub fn convex_envelope_2d(points: &[[f64; 2]], values: &[f64]) -> Result<Vec<f64>> {
    let mut env = Envelope2d::new(points, values)?;
    points
        .iter()
        .zip(values)
        .map(|(&p, &v)| env.at(p).map(|e| e.min(v)))
        .collect()
}
