//! Upper bound on the convex roof by sampling pure-state decompositions.
//!
//! Every decomposition of ρ = Σ_k λ_k |e_k⟩⟨e_k| (rank r) into m ≥ r
//! subnormalized states has the form |ψ̃_i⟩ = Σ_k V_ik √λ_k |e_k⟩ for an m×r
//! isometry V. Random isometries come from the QR factorization of complex
//! Gaussian matrices.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{GgmError, Result};
use crate::hilbert::{DensityMatrix, C64};
use crate::pure::GgmEvaluator;

/// Eigenvalues at or below this are treated as zero when computing the rank.
pub const RANK_TOL: f64 = 1e-10;

/// Minimum over `samples` random decompositions of Σ_i p_i · GGM(ψ_i).
pub fn hjw_upper_bound(rho: &DensityMatrix, m: usize, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(GgmError::InvalidArgument {
            name: "samples",
            reason: "need at least one sample".into(),
        });
    }
    let eig = rho.entries().clone().symmetric_eigen();
    let mut spectrum: Vec<(f64, usize)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > RANK_TOL)
        .map(|(i, &l)| (l, i))
        .collect();
    // deterministic column order regardless of the solver's ordering
    spectrum.sort_by(|a, b| b.0.total_cmp(&a.0));
    let rank = spectrum.len();
    if m < rank {
        return Err(GgmError::DecompositionTooSmall { m, rank });
    }
    let d = rho.shape().total_dim();
    let scaled: Vec<Vec<C64>> = spectrum
        .iter()
        .map(|&(l, i)| {
            let s = l.sqrt();
            eig.eigenvectors.column(i).iter().map(|v| v * s).collect()
        })
        .collect();

    let mut eval = GgmEvaluator::new(rho.shape());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut psi = vec![C64::new(0.0, 0.0); d];
    let mut best = f64::INFINITY;
    for _ in 0..samples {
        let g = DMatrix::<C64>::from_fn(m, rank, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        });
        let q = g.qr().q();
        let mut total = 0.0;
        for i in 0..m {
            psi.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
            for (k, e) in scaled.iter().enumerate() {
                let v = q[(i, k)];
                for (a, b) in psi.iter_mut().zip(e) {
                    *a += v * b;
                }
            }
            let p: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
            if p < 1e-15 {
                continue;
            }
            let inv = 1.0 / p.sqrt();
            psi.iter_mut().for_each(|a| *a *= inv);
            total += p * eval.value(&psi);
        }
        best = best.min(total);
    }
    Ok(best)
}
