//! Pure-state GGM: one minus the largest squared Schmidt coefficient over all
//! bipartitions.

use nalgebra::{DMatrix, Matrix3, Matrix4};
use serde::Serialize;

use crate::error::Result;
use crate::hilbert::{enumerate_bipartitions, matricize, Bipartition, PureState, SystemShape, C64};

/// Cuts within this distance of the maximum are reported as maximizing.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutValue {
    pub cut: Bipartition,
    pub lambda_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GgmReport {
    pub value: f64,
    pub lambda_sq_max: f64,
    pub maximizing_cuts: Vec<Bipartition>,
    pub per_cut: Vec<CutValue>,
}

/// Square of the largest Schmidt coefficient of `state` across `cut`.
pub fn max_schmidt_sq(state: &PureState, cut: &Bipartition) -> Result<f64> {
    let m = matricize(state, cut)?;
    let gram = if m.nrows() <= m.ncols() {
        &m * m.adjoint()
    } else {
        m.adjoint() * &m
    };
    Ok(top_eigenvalue(gram.as_slice(), gram.nrows()))
}

pub fn ggm_pure(state: &PureState) -> GgmReport {
    let mut eval = GgmEvaluator::new(state.shape());
    let values = eval.per_cut(state.amplitudes());
    let lambda_sq_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cuts = enumerate_bipartitions(state.shape());
    let maximizing_cuts = cuts
        .iter()
        .zip(&values)
        .filter(|(_, &v)| v >= lambda_sq_max - TIE_TOL)
        .map(|(c, _)| c.clone())
        .collect();
    let per_cut = cuts
        .into_iter()
        .zip(values)
        .map(|(cut, lambda_sq)| CutValue { cut, lambda_sq })
        .collect();
    GgmReport {
        value: 1.0 - lambda_sq_max,
        lambda_sq_max,
        maximizing_cuts,
        per_cut,
    }
}

struct CutPlan {
    small: usize,
    large: usize,
    // flat amplitude index -> slot in the small × large buffer
    slot: Vec<usize>,
}

/// Precomputed index maps for repeated GGM evaluation on one shape.
pub struct GgmEvaluator {
    total: usize,
    plans: Vec<CutPlan>,
    // plan indices by increasing Gram size, so cheap exact cuts come first
    order: Vec<usize>,
    buf: Vec<C64>,
    gram: Vec<C64>,
}

impl GgmEvaluator {
    pub fn new(shape: &SystemShape) -> Self {
        let plans: Vec<CutPlan> = enumerate_bipartitions(shape)
            .iter()
            .map(|cut| {
                let (rows, cols) = (cut.side_dim(), cut.rest_dim());
                let swap = rows > cols;
                let (small, large) = if swap { (cols, rows) } else { (rows, cols) };
                let slot = (0..shape.total_dim())
                    .map(|i| {
                        let (r, c) = cut.locate(i);
                        if swap {
                            c * large + r
                        } else {
                            r * large + c
                        }
                    })
                    .collect();
                CutPlan { small, large, slot }
            })
            .collect();
        let max_small = plans.iter().map(|p| p.small).max().unwrap_or(1);
        let mut order: Vec<usize> = (0..plans.len()).collect();
        order.sort_by_key(|&k| plans[k].small);
        Self {
            total: shape.total_dim(),
            plans,
            order,
            buf: vec![C64::new(0.0, 0.0); shape.total_dim()],
            gram: vec![C64::new(0.0, 0.0); max_small * max_small],
        }
    }

    pub fn cut_count(&self) -> usize {
        self.plans.len()
    }

    /// λ² per canonical cut, in [`enumerate_bipartitions`] order.
    pub fn per_cut(&mut self, amps: &[C64]) -> Vec<f64> {
        assert_eq!(amps.len(), self.total, "amplitude length does not match shape");
        (0..self.plans.len()).map(|k| self.cut_value(k, amps)).collect()
    }

    /// GGM of an amplitude vector that is assumed normalized.
    ///
    /// Cuts whose Gram matrix has an eigenvalue upper bound at or below the
    /// running maximum are skipped, so the result equals the full sweep.
    pub fn value(&mut self, amps: &[C64]) -> f64 {
        assert_eq!(amps.len(), self.total, "amplitude length does not match shape");
        let mut best: f64 = 0.0;
        for i in 0..self.order.len() {
            let k = self.order[i];
            let n = self.fill_gram(k, amps);
            let g = &self.gram[..n * n];
            if n > 2 && upper_bound(g, n) <= best {
                continue;
            }
            best = best.max(top_eigenvalue(g, n));
        }
        1.0 - best
    }

    fn cut_value(&mut self, k: usize, amps: &[C64]) -> f64 {
        let n = self.fill_gram(k, amps);
        top_eigenvalue(&self.gram[..n * n], n)
    }

    /// Writes the smaller-side Gram matrix of cut `k` and returns its size.
    fn fill_gram(&mut self, k: usize, amps: &[C64]) -> usize {
        let plan = &self.plans[k];
        for (&s, &a) in plan.slot.iter().zip(amps) {
            self.buf[s] = a;
        }
        let (n, l) = (plan.small, plan.large);
        for a in 0..n {
            let ra = &self.buf[a * l..(a + 1) * l];
            for b in a..n {
                let rb = &self.buf[b * l..(b + 1) * l];
                let g: C64 = ra.iter().zip(rb).map(|(x, y)| x * y.conj()).sum();
                // column-major storage, matching nalgebra
                self.gram[b * n + a] = g;
                self.gram[a * n + b] = g.conj();
            }
        }
        n
    }
}

/// min(Gershgorin, Frobenius) bound on the top eigenvalue of a Hermitian PSD matrix.
fn upper_bound(g: &[C64], n: usize) -> f64 {
    let mut gersh: f64 = 0.0;
    let mut frob = 0.0;
    for c in 0..n {
        let mut row = 0.0;
        for r in 0..n {
            let z = g[c * n + r];
            row += z.norm();
            frob += z.norm_sqr();
        }
        gersh = gersh.max(row);
    }
    // small slack so rounding in the bound can never skip the maximizing cut
    gersh.min(frob.sqrt()) + 1e-12
}

/// Largest eigenvalue of a Hermitian matrix stored column-major.
fn top_eigenvalue(g: &[C64], n: usize) -> f64 {
    match n {
        1 => g[0].re,
        2 => {
            let (a, d) = (g[0].re, g[3].re);
            let half = 0.5 * (a - d);
            0.5 * (a + d) + (half * half + g[1].norm_sqr()).sqrt()
        }
        3 => Matrix3::from_column_slice(g).symmetric_eigenvalues().max(),
        4 => Matrix4::from_column_slice(g).symmetric_eigenvalues().max(),
        _ => DMatrix::from_column_slice(n, n, g)
            .symmetric_eigenvalues()
            .max(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{dicke, ghz};

    #[test]
    fn bell_and_product() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = SystemShape::qubits(2).unwrap();
        let bell = PureState::new(
            s.clone(),
            vec![C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)],
        )
        .unwrap();
        let cut = &enumerate_bipartitions(&s)[0];
        assert!((max_schmidt_sq(&bell, cut).unwrap() - 0.5).abs() < 1e-12);

        let zero = PureState::basis(SystemShape::qubits(3).unwrap(), &[0, 0, 0]).unwrap();
        for cut in enumerate_bipartitions(zero.shape()) {
            assert!((max_schmidt_sq(&zero, &cut).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn w_state_cut_and_report() {
        let w = dicke(3, 1).unwrap();
        let cut = Bipartition::new(w.shape().clone(), &[0]).unwrap();
        assert!((max_schmidt_sq(&w, &cut).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        let r = ggm_pure(&w);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.value, 1.0 - r.lambda_sq_max);
        assert_eq!(r.maximizing_cuts.len(), 3);
    }

    #[test]
    fn ghz_ties_every_cut() {
        for n in 2..=6 {
            let r = ggm_pure(&ghz(n, 2, 1).unwrap());
            assert!((r.value - 0.5).abs() < 1e-12);
            assert_eq!(r.maximizing_cuts.len(), (1 << (n - 1)) - 1);
        }
    }

    #[test]
    fn evaluator_matches_svd_on_mixed_dims() {
        // oracle: nalgebra SVD on each explicit matricization
        let shape = SystemShape::new(vec![2, 3, 4, 2]).unwrap();
        let amps: Vec<C64> = (0..shape.total_dim())
            .map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let s = PureState::normalized(shape.clone(), amps).unwrap();
        let mut eval = GgmEvaluator::new(&shape);
        let fast = eval.per_cut(s.amplitudes());
        for (cut, f) in enumerate_bipartitions(&shape).iter().zip(fast) {
            let sv = matricize(&s, cut).unwrap().svd(false, false).singular_values;
            assert!((sv.max().powi(2) - f).abs() < 1e-12, "{cut}");
        }
    }

    #[test]
    fn report_serializes_cut_labels() {
        let r = ggm_pure(&ghz(3, 2, 1).unwrap());
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"{0,1}:{2}\""), "{json}");
    }
}
