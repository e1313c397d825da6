//! Mixed-state GGM for group-invariant families.
//!
//! A [`TwirledFamily`] fixes an orthonormal basis whose weighted projector
//! mixture is invariant under a finite local-unitary group, and whose phased
//! superpositions twirl onto that mixture. [`ggm_mixed`] minimizes the pure
//! GGM over those phases at each grid point, probes convexity with a
//! finite-difference Hessian, and convexifies the result over the mixing
//! simplex.

pub mod closed_form;
pub mod envelope;
pub mod families;
pub mod hessian;
pub mod hjw;
pub mod phase;

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{GgmError, Result};
use crate::hilbert::{DensityMatrix, PureState};
use crate::states::orthonormality_defect;
use crate::twirl::{
    preimage_phase_samples, verify_invariance, verify_preimage, UnitaryGroup, Verdict, GROUP_TOL,
    PREIMAGE_SEED,
};

pub use closed_form::{closed_form, ClosedForm};
pub use envelope::{convex_envelope_1d, convex_envelope_2d, linear_segments, Envelope2d, LinearSegment};
pub use hessian::{hessian_report, HessianReport, HESSIAN_STEP, NONCONVEX_TOL};
pub use hjw::hjw_upper_bound;
pub use phase::{PhaseOptimum, PhaseSearch, PHASE_SEED};

/// Slack for simplex membership of grid points.
const SIMPLEX_SLACK: f64 = 1e-12;
/// Random phase draws in the construction-time preimage check.
const PREIMAGE_DRAWS: usize = 20;

/// Group, basis and the affine map from mixing parameters to basis weights.
///
/// Parameters p (length `param_dim`) describe the simplex point
/// (p_1, …, p_k, 1 − Σp). Basis weights are `mixing · (p, 1 − Σp)`.
#[derive(Debug, Clone)]
pub struct TwirledFamily {
    name: String,
    group: UnitaryGroup,
    basis: Vec<PureState>,
    mixing: Vec<Vec<f64>>,
    param_names: Vec<String>,
}

impl TwirledFamily {
    /// Validates the basis and mixing map, then checks invariance and the
    /// preimage property at two interior parameter points.
    pub fn new(
        name: impl Into<String>,
        group: UnitaryGroup,
        basis: Vec<PureState>,
        mixing: Vec<Vec<f64>>,
        param_names: Vec<String>,
    ) -> Result<Self> {
        if basis.is_empty() {
            return Err(GgmError::InvalidArgument {
                name: "basis",
                reason: "empty basis".into(),
            });
        }
        for b in &basis {
            group.shape().ensure_same(b.shape())?;
        }
        let defect = orthonormality_defect(&basis)?;
        if defect > crate::states::BASIS_TOL {
            return Err(GgmError::NotOrthonormal(defect));
        }
        let cols = param_names.len() + 1;
        if mixing.len() != basis.len() || mixing.iter().any(|r| r.len() != cols) {
            return Err(GgmError::InvalidArgument {
                name: "mixing",
                reason: format!(
                    "expected a {}x{cols} matrix (basis size x parameters+1)",
                    basis.len()
                ),
            });
        }
        if mixing.iter().flatten().any(|&m| m < 0.0 || !m.is_finite()) {
            return Err(GgmError::InvalidArgument {
                name: "mixing",
                reason: "entries must be nonnegative".into(),
            });
        }
        for c in 0..cols {
            let s: f64 = mixing.iter().map(|r| r[c]).sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(GgmError::InvalidArgument {
                    name: "mixing",
                    reason: format!("column {c} sums to {s}, expected 1"),
                });
            }
        }
        let family = Self {
            name: name.into(),
            group,
            basis,
            mixing,
            param_names,
        };
        for p in family.check_points() {
            let inv = family.verify_invariance(&p)?;
            if !inv.passed {
                return Err(GgmError::NotInvariant(inv.max_deviation));
            }
            let pre = family.verify_preimage(&p)?;
            if !pre.passed {
                return Err(GgmError::PreimageFailed(pre.max_deviation));
            }
        }
        Ok(family)
    }

    /// Centroid and one asymmetric interior point.
    fn check_points(&self) -> Vec<Vec<f64>> {
        let k = self.param_dim();
        let centroid = vec![1.0 / (k + 1) as f64; k];
        let raw: Vec<f64> = (0..=k).map(|i| (i + 2) as f64).collect();
        let total: f64 = raw.iter().sum();
        let skew = raw[..k].iter().map(|v| v / total).collect();
        vec![centroid, skew]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> &UnitaryGroup {
        &self.group
    }

    pub fn basis(&self) -> &[PureState] {
        &self.basis
    }

    pub fn param_names(&self) -> &[String] {
        &self.param_names
    }

    pub fn param_dim(&self) -> usize {
        self.param_names.len()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        let sum: f64 = params.iter().sum();
        if params.len() != self.param_dim()
            || params.iter().any(|&p| p < -SIMPLEX_SLACK || !p.is_finite())
            || sum > 1.0 + SIMPLEX_SLACK
        {
            return Err(GgmError::OutsideSimplex(params.to_vec()));
        }
        Ok(())
    }

    /// Basis weights at `params`, with rounding noise clamped to [0, 1].
    pub fn weights(&self, params: &[f64]) -> Result<Vec<f64>> {
        self.check_params(params)?;
        Ok(self.weights_unchecked(params))
    }

    fn weights_unchecked(&self, params: &[f64]) -> Vec<f64> {
        let rest = 1.0 - params.iter().sum::<f64>();
        let w: Vec<f64> = self
            .mixing
            .iter()
            .map(|row| {
                let v = row[..params.len()]
                    .iter()
                    .zip(params)
                    .map(|(m, p)| m * p)
                    .sum::<f64>()
                    + row[params.len()] * rest;
                if v.abs() < 1e-15 {
                    0.0
                } else {
                    v.clamp(0.0, 1.0)
                }
            })
            .collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    }

    /// Σ_k w_k |b_k⟩⟨b_k|
    pub fn target(&self, params: &[f64]) -> Result<DensityMatrix> {
        DensityMatrix::mixture(&self.weights(params)?, &self.basis)
    }

    pub fn verify_invariance(&self, params: &[f64]) -> Result<Verdict> {
        verify_invariance(&self.group, &self.target(params)?, GROUP_TOL)
    }

    /// Preimage check on the fixed 8-point-per-phase grid plus 20 seeded draws.
    pub fn verify_preimage(&self, params: &[f64]) -> Result<Verdict> {
        let samples = preimage_phase_samples(self.rank(), PREIMAGE_DRAWS, PREIMAGE_SEED);
        self.verify_preimage_with(params, &samples)
    }

    pub fn verify_preimage_with(&self, params: &[f64], samples: &[Vec<f64>]) -> Result<Verdict> {
        let target = self.target(params)?;
        verify_preimage(
            &self.group,
            &self.basis,
            &self.weights(params)?,
            &target,
            samples,
            GROUP_TOL,
        )
    }

    /// Phase-minimized pure GGM at one parameter point.
    pub fn min_phase_ggm(&self, params: &[f64]) -> Result<PhaseOptimum> {
        let w = self.weights(params)?;
        Ok(PhaseSearch::new(&self.basis, PHASE_SEED).minimize(&w))
    }
}

/// Per-point results of [`ggm_mixed`], in the order of the input grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GgmSurface {
    pub param_names: Vec<String>,
    pub grid: Vec<Vec<f64>>,
    pub raw: Vec<f64>,
    pub envelope: Vec<f64>,
    pub hessian_min_eig: Vec<Option<f64>>,
    pub phase_argmin: Vec<Vec<f64>>,
}

impl GgmSurface {
    /// Indices whose Hessian check found a negative direction.
    pub fn flagged(&self) -> Vec<usize> {
        self.hessian_min_eig
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_some_and(|v| v < NONCONVEX_TOL))
            .map(|(i, _)| i)
            .collect()
    }

    /// Index of the grid point equal to `params`, if any.
    pub fn index_of(&self, params: &[f64]) -> Option<usize> {
        self.grid
            .iter()
            .position(|g| g.iter().zip(params).all(|(a, b)| (a - b).abs() < 1e-12))
    }

    /// CSV with one row per grid point, sorted lexicographically by parameters.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for name in &self.param_names {
            out.push_str(name);
            out.push(',');
        }
        out.push_str("raw,envelope,hessian_min_eig,phase_argmin\n");
        let mut order: Vec<usize> = (0..self.grid.len()).collect();
        order.sort_by(|&a, &b| lex_cmp(&self.grid[a], &self.grid[b]));
        for i in order {
            for p in &self.grid[i] {
                let _ = write!(out, "{p},");
            }
            let _ = write!(out, "{},{},", self.raw[i], self.envelope[i]);
            if let Some(e) = self.hessian_min_eig[i] {
                let _ = write!(out, "{e}");
            }
            out.push(',');
            let phases: Vec<String> = self.phase_argmin[i].iter().map(|p| p.to_string()).collect();
            out.push_str(&phases.join(";"));
            out.push('\n');
        }
        out
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedOptions {
    /// Finite-difference step for the Hessian check; `None` skips it.
    pub hessian_step: Option<f64>,
    pub seed: u64,
}

impl Default for MixedOptions {
    fn default() -> Self {
        Self {
            hessian_step: Some(HESSIAN_STEP),
            seed: PHASE_SEED,
        }
    }
}

/// Phase minimization, Hessian check and convex envelope over `grid`.
///
/// The envelope is built from the grid samples only and is supported for one
/// or two mixing parameters.
pub fn ggm_mixed(family: &TwirledFamily, grid: &[Vec<f64>], opts: MixedOptions) -> Result<GgmSurface> {
    let k = family.param_dim();
    if !(1..=2).contains(&k) {
        return Err(GgmError::InvalidArgument {
            name: "family",
            reason: format!("convex envelopes need 1 or 2 mixing parameters, family has {k}"),
        });
    }
    for p in grid {
        family.check_params(p)?;
    }

    let mut search = PhaseSearch::new(family.basis(), opts.seed);
    let mut raw = Vec::with_capacity(grid.len());
    let mut phase_argmin = Vec::with_capacity(grid.len());
    for p in grid {
        let opt = search.minimize(&family.weights_unchecked(p));
        raw.push(opt.value);
        phase_argmin.push(opt.phases);
    }

    let hessian_min_eig = match opts.hessian_step {
        None => vec![None; grid.len()],
        Some(h) => grid
            .iter()
            .zip(&phase_argmin)
            .map(|(p, start)| {
                if hessian::boundary_distance(p) < 2.0 * h {
                    return None;
                }
                let mut f = |q: &[f64]| search.refine(&family.weights_unchecked(q), start).value;
                Some(hessian::min_hessian_eig(&mut f, p, h))
            })
            .collect(),
    };

    let envelope = if k == 1 {
        let mut order: Vec<usize> = (0..grid.len()).collect();
        order.sort_by(|&a, &b| grid[a][0].total_cmp(&grid[b][0]));
        let ts: Vec<f64> = order.iter().map(|&i| grid[i][0]).collect();
        let vs: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
        let env_sorted = convex_envelope_1d(&ts, &vs)?;
        let mut env = vec![0.0; grid.len()];
        for (&i, e) in order.iter().zip(env_sorted) {
            env[i] = e;
        }
        env
    } else {
        let pts: Vec<[f64; 2]> = grid.iter().map(|p| [p[0], p[1]]).collect();
        convex_envelope_2d(&pts, &raw)?
    };

    Ok(GgmSurface {
        param_names: family.param_names().to_vec(),
        grid: grid.to_vec(),
        raw,
        envelope,
        hessian_min_eig,
        phase_argmin,
    })
}

/// Regular lattice on the closed simplex with `n` points per axis, in
/// lexicographic order.
pub fn simplex_grid(dim: usize, n: usize) -> Result<Vec<Vec<f64>>> {
    if n < 2 {
        return Err(GgmError::InvalidArgument {
            name: "n",
            reason: format!("need at least 2 points per axis, got {n}"),
        });
    }
    let s = (n - 1) as f64;
    match dim {
        1 => Ok((0..n).map(|i| vec![i as f64 / s]).collect()),
        2 => Ok((0..n)
            .flat_map(|i| (0..n - i).map(move |j| vec![i as f64 / s, j as f64 / s]))
            .collect()),
        _ => Err(GgmError::InvalidArgument {
            name: "dim",
            reason: format!("grids are provided for 1 or 2 parameters, got {dim}"),
        }),
    }
}
