//! Minimization of the pure-state GGM over the relative phases of a fixed
//! orthonormal basis with fixed weights.
//!
//! The first basis element with nonzero weight carries the gauge phase 0.
//! A coarse stage samples each free phase on a 32-point grid (a full product
//! grid for at most two free phases, cyclic coordinate scans from several
//! starts otherwise). The best coarse point is then polished by cyclic
//! coordinate golden-section searches until no coordinate moves by more than
//! 1e-4 rad.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::hilbert::{PureState, C64};
use crate::pure::GgmEvaluator;

pub const COARSE_POINTS: usize = 32;
/// Refinement stops once a full pass moves no phase by more than this.
pub const STEP_TOL: f64 = 1e-4;
/// Default seed for the random coarse starts.
pub const PHASE_SEED: u64 = 20_240_917;

const GOLDEN_TOL: f64 = 1e-5;
/// A candidate must beat the incumbent by this much to be accepted, so flat
/// directions do not make the search drift.
const IMPROVE: f64 = 1e-14;
const RANDOM_STARTS: usize = 4;
const MAX_SWEEPS: usize = 20;
const MAX_PASSES: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseOptimum {
    pub value: f64,
    /// One phase per basis element in (−π, π]; gauge and zero-weight entries are 0.
    pub phases: Vec<f64>,
}

/// Wraps an angle into (−π, π].
pub fn wrap_phase(phi: f64) -> f64 {
    let mut t = phi.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    t
}

/// Reusable phase minimizer over one basis.
pub struct PhaseSearch<'a> {
    basis: &'a [PureState],
    eval: GgmEvaluator,
    seed: u64,
    active: Vec<usize>,
    scaled: Vec<Vec<C64>>,
    amps: Vec<C64>,
}

impl<'a> PhaseSearch<'a> {
    /// `basis` must be nonempty, orthonormal and share one shape.
    pub fn new(basis: &'a [PureState], seed: u64) -> Self {
        let shape = basis[0].shape();
        Self {
            basis,
            eval: GgmEvaluator::new(shape),
            seed,
            active: Vec::new(),
            scaled: Vec::new(),
            amps: vec![C64::new(0.0, 0.0); shape.total_dim()],
        }
    }

    fn load(&mut self, weights: &[f64]) {
        assert_eq!(weights.len(), self.basis.len(), "one weight per basis state");
        self.active = (0..weights.len()).filter(|&k| weights[k] > 0.0).collect();
        self.scaled = self
            .active
            .iter()
            .map(|&k| {
                let s = weights[k].sqrt();
                self.basis[k].amplitudes().iter().map(|a| a * s).collect()
            })
            .collect();
    }

    /// GGM with the free phases `theta` on the active elements after the first.
    fn objective(&mut self, theta: &[f64]) -> f64 {
        self.amps.copy_from_slice(&self.scaled[0]);
        for (v, &t) in self.scaled[1..].iter().zip(theta) {
            let c = C64::from_polar(1.0, t);
            for (o, a) in self.amps.iter_mut().zip(v) {
                *o += c * a;
            }
        }
        self.eval.value(&self.amps)
    }

    fn optimum(&self, value: f64, theta: &[f64]) -> PhaseOptimum {
        let mut phases = vec![0.0; self.basis.len()];
        for (&k, &t) in self.active[1..].iter().zip(theta) {
            phases[k] = wrap_phase(t);
        }
        PhaseOptimum { value, phases }
    }

    /// GGM of Σ √w_k e^{iφ_k}|b_k⟩ for explicit phases.
    pub fn value_at(&mut self, weights: &[f64], phases: &[f64]) -> f64 {
        self.load(weights);
        if self.active.is_empty() {
            return f64::NAN;
        }
        let g = phases[self.active[0]];
        let theta: Vec<f64> = self.active[1..].iter().map(|&k| phases[k] - g).collect();
        self.objective(&theta)
    }

    /// Full search: coarse stage followed by refinement.
    pub fn minimize(&mut self, weights: &[f64]) -> PhaseOptimum {
        self.load(weights);
        let k = self.active.len().saturating_sub(1);
        if self.active.is_empty() {
            return PhaseOptimum {
                value: f64::NAN,
                phases: vec![0.0; self.basis.len()],
            };
        }
        if k == 0 {
            let v = self.objective(&[]);
            return self.optimum(v, &[]);
        }
        let (mut value, mut theta) = if k <= 2 {
            self.coarse_grid(k)
        } else {
            self.coarse_scans(k)
        };
        self.polish(&mut theta, &mut value);
        self.optimum(value, &theta)
    }

    /// Refinement only, started from `start` (e.g. the optimum at a nearby weight).
    pub fn refine(&mut self, weights: &[f64], start: &[f64]) -> PhaseOptimum {
        self.load(weights);
        if self.active.is_empty() {
            return PhaseOptimum {
                value: f64::NAN,
                phases: vec![0.0; self.basis.len()],
            };
        }
        let g = start[self.active[0]];
        let mut theta: Vec<f64> = self.active[1..].iter().map(|&k| start[k] - g).collect();
        let mut value = self.objective(&theta);
        self.polish(&mut theta, &mut value);
        self.optimum(value, &theta)
    }

    fn grid_angle(i: usize) -> f64 {
        TAU * i as f64 / COARSE_POINTS as f64
    }

    fn coarse_grid(&mut self, k: usize) -> (f64, Vec<f64>) {
        let mut best = (f64::INFINITY, vec![0.0; k]);
        let total = COARSE_POINTS.pow(k as u32);
        let mut theta = vec![0.0; k];
        for flat in 0..total {
            let mut rem = flat;
            for t in theta.iter_mut().rev() {
                *t = Self::grid_angle(rem % COARSE_POINTS);
                rem /= COARSE_POINTS;
            }
            let v = self.objective(&theta);
            if v < best.0 - IMPROVE {
                best = (v, theta.clone());
            }
        }
        best
    }

    fn coarse_scans(&mut self, k: usize) -> (f64, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut starts = vec![vec![0usize; k]];
        for _ in 0..RANDOM_STARTS {
            starts.push((0..k).map(|_| rng.random_range(0..COARSE_POINTS)).collect());
        }
        let mut best = (f64::INFINITY, vec![0.0; k]);
        for start in starts {
            let mut idx = start;
            let mut theta: Vec<f64> = idx.iter().map(|&i| Self::grid_angle(i)).collect();
            let mut value = self.objective(&theta);
            for _ in 0..MAX_SWEEPS {
                let mut changed = false;
                for m in 0..k {
                    for i in 0..COARSE_POINTS {
                        if i == idx[m] {
                            continue;
                        }
                        let old = theta[m];
                        theta[m] = Self::grid_angle(i);
                        let v = self.objective(&theta);
                        if v < value - IMPROVE {
                            value = v;
                            idx[m] = i;
                            changed = true;
                        } else {
                            theta[m] = old;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            if value < best.0 - IMPROVE {
                best = (value, theta);
            }
        }
        best
    }

    fn polish(&mut self, theta: &mut [f64], value: &mut f64) {
        let half_width = TAU / COARSE_POINTS as f64;
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..MAX_PASSES {
            let mut max_move: f64 = 0.0;
            for m in 0..theta.len() {
                let centre = theta[m];
                let (mut a, mut b) = (centre - half_width, centre + half_width);
                let mut c = b - ratio * (b - a);
                let mut d = a + ratio * (b - a);
                theta[m] = c;
                let mut fc = self.objective(theta);
                theta[m] = d;
                let mut fd = self.objective(theta);
                while b - a > GOLDEN_TOL {
                    if fc <= fd {
                        b = d;
                        d = c;
                        fd = fc;
                        c = b - ratio * (b - a);
                        theta[m] = c;
                        fc = self.objective(theta);
                    } else {
                        a = c;
                        c = d;
                        fc = fd;
                        d = a + ratio * (b - a);
                        theta[m] = d;
                        fd = self.objective(theta);
                    }
                }
                let (t, ft) = if fc <= fd { (c, fc) } else { (d, fd) };
                if ft < *value - IMPROVE {
                    theta[m] = t;
                    *value = ft;
                    max_move = max_move.max((t - centre).abs());
                } else {
                    theta[m] = centre;
                }
            }
            if max_move < STEP_TOL {
                break;
            }
        }
    }
}
