//! Central-difference Hessians in the free simplex coordinates, used to find
//! where a sampled surface fails to be convex.

use nalgebra::DMatrix;
use serde::Serialize;

pub const HESSIAN_STEP: f64 = 1e-3;
/// Points whose smallest Hessian eigenvalue falls below this are flagged.
pub const NONCONVEX_TOL: f64 = -1e-6;

/// Smallest simplex weight of `p`, counting the eliminated last coordinate.
pub fn boundary_distance(p: &[f64]) -> f64 {
    let rest = 1.0 - p.iter().sum::<f64>();
    p.iter().copied().fold(rest, f64::min)
}

/// Smallest eigenvalue of the central-difference Hessian of `f` at `p`.
pub fn min_hessian_eig<F: FnMut(&[f64]) -> f64>(f: &mut F, p: &[f64], h: f64) -> f64 {
    let n = p.len();
    let mut q = p.to_vec();
    let f0 = f(&q);
    let mut hess = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        q[i] = p[i] + h;
        let fp = f(&q);
        q[i] = p[i] - h;
        let fm = f(&q);
        q[i] = p[i];
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let mut corner = |si: f64, sj: f64| {
                q[i] = p[i] + si * h;
                q[j] = p[j] + sj * h;
                let v = f(&q);
                q[i] = p[i];
                q[j] = p[j];
                v
            };
            let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0))
                / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess.symmetric_eigenvalues().min()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HessianReport {
    /// `None` where the point is closer than 2h to the simplex boundary.
    pub min_eig: Vec<Option<f64>>,
    pub flagged: Vec<usize>,
    pub skipped: Vec<usize>,
}

pub fn hessian_report<F: FnMut(&[f64]) -> f64>(mut f: F, points: &[Vec<f64>], h: f64) -> HessianReport {
    let mut min_eig = Vec::with_capacity(points.len());
    let mut flagged = Vec::new();
    let mut skipped = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if boundary_distance(p) < 2.0 * h {
            skipped.push(i);
            min_eig.push(None);
            continue;
        }
        let e = min_hessian_eig(&mut f, p, h);
        if e < NONCONVEX_TOL {
            flagged.push(i);
        }
        min_eig.push(Some(e));
    }
    HessianReport {
        min_eig,
        flagged,
        skipped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let pts = vec![vec![0.2, 0.3], vec![0.5, 0.1], vec![0.0005, 0.5]];
        let r = hessian_report(|p| p[0] * p[0] + p[1] * p[1], &pts, HESSIAN_STEP);
        assert!((r.min_eig[0].unwrap() - 2.0).abs() < 1e-6);
        assert!((r.min_eig[1].unwrap() - 2.0).abs() < 1e-6);
        assert_eq!(r.min_eig[2], None);
        assert_eq!(r.skipped, vec![2]);
        assert!(r.flagged.is_empty());
    }

    #[test]
    fn saddle_is_flagged() {
        let pts = vec![vec![0.3, 0.3]];
        let r = hessian_report(|p| p[0] * p[0] - 3.0 * p[0] * p[1], &pts, HESSIAN_STEP);
        // eigenvalues of [[2, −3], [−3, 0]] are 1 ± √10
        assert!((r.min_eig[0].unwrap() - (1.0 - 10f64.sqrt())).abs() < 1e-6);
        assert_eq!(r.flagged, vec![0]);
    }

    #[test]
    fn one_dimensional() {
        let pts = vec![vec![0.5]];
        let r = hessian_report(|p| -(p[0] * p[0]), &pts, HESSIAN_STEP);
        assert!((r.min_eig[0].unwrap() + 2.0).abs() < 1e-6);
    }
}
