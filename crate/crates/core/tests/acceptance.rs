//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use ggm_core::roof::families::{
    ghz_mixture, qudit_sectors, rank2_parity, rank3_gghz, rank3_gghz_slice, rank3_ghz_d1_dn1,
    rank3_ghz_w, rank5_five_qubit, zeta_slice,
};
use ggm_core::roof::hessian::boundary_distance;
use ggm_core::roof::phase::wrap_phase;
use ggm_core::roof::{
    closed_form, ggm_mixed, hjw_upper_bound, linear_segments, simplex_grid, ClosedForm, GgmSurface,
    MixedOptions, TwirledFamily,
};
use ggm_core::states::{dicke, gghz, ghz, sector_state, SectorSpec};
use ggm_core::twirl::{builtin_group, preimage_phase_samples, GroupKind};
use ggm_core::{ggm_pure, SystemShape, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 7;

struct Outcome {
    passed: bool,
    detail: String,
    // every number the criterion produced, compared bitwise across runs
    fingerprint: Vec<f64>,
}

impl Outcome {
    fn new(passed: bool, detail: String, fingerprint: Vec<f64>) -> Self {
        Self {
            passed,
            detail,
            fingerprint,
        }
    }
}

fn surface_fingerprint(s: &GgmSurface) -> Vec<f64> {
    let mut v = s.raw.clone();
    v.extend(&s.envelope);
    v.extend(s.hessian_min_eig.iter().map(|e| e.unwrap_or(f64::NAN)));
    v.extend(s.phase_argmin.iter().flatten());
    v
}

/// Uniform points in the 2-simplex at least `margin` from its boundary.
fn interior_points(n: usize, margin: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let p = vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
        if boundary_distance(&p) >= margin {
            out.push(p);
        }
    }
    out
}

fn mixed(family: &TwirledFamily, grid: &[Vec<f64>]) -> GgmSurface {
    ggm_mixed(family, grid, MixedOptions::default()).expect("pipeline")
}

fn pure_correctness() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut fp = Vec::new();
    for n in 2..=8 {
        let v = ggm_pure(&ghz(n, 2, 1).unwrap()).value;
        worst = worst.max((v - 0.5).abs());
        fp.push(v);
    }
    for n in 3..=8 {
        let v = ggm_pure(&dicke(n, 1).unwrap()).value;
        worst = worst.max((v - 1.0 / n as f64).abs());
        fp.push(v);
    }
    for n in 2..=6 {
        for i in 0..=10 {
            let a = i as f64 / 10.0;
            let v = ggm_pure(&gghz(n, a).unwrap()).value;
            worst = worst.max((v - (a * a).min(1.0 - a * a)).abs());
            fp.push(v);
        }
    }
    let t = start.elapsed();
    Outcome::new(
        worst <= 1e-9 && t < Duration::from_secs(10),
        format!("max error {worst:.2e} (tol 1e-9), {:.2}s (limit 10s)", t.as_secs_f64()),
        fp,
    )
}

fn rank2_closed_form() -> Outcome {
    let start = Instant::now();
    let grid = simplex_grid(1, 201).unwrap();
    let mut worst: f64 = 0.0;
    let mut spread: f64 = 0.0;
    let mut fp = Vec::new();
    let mut reference: Option<Vec<f64>> = None;
    for n in 3..=6 {
        let s = mixed(&rank2_parity(n).unwrap(), &grid);
        for (p, e) in grid.iter().zip(&s.envelope) {
            let exact = closed_form(ClosedForm::Rank2Sym, p).unwrap();
            worst = worst.max((e - exact).abs());
        }
        match &reference {
            None => reference = Some(s.envelope.clone()),
            Some(r) => {
                for (a, b) in r.iter().zip(&s.envelope) {
                    spread = spread.max((a - b).abs());
                }
            }
        }
        fp.extend(surface_fingerprint(&s));
    }
    let t = start.elapsed();
    Outcome::new(
        worst <= 2e-4 && spread <= 1e-6 && t < Duration::from_secs(120),
        format!(
            "N=3..6, 201 points: max |envelope - closed form| {worst:.2e} (tol 2e-4), \
             spread across N {spread:.2e} (tol 1e-6), {:.1}s (limit 120s)",
            t.as_secs_f64()
        ),
        fp,
    )
}

fn ghz_w_family() -> Outcome {
    let corners = [([1.0, 0.0], 0.5), ([0.0, 1.0], 1.0 / 3.0), ([0.0, 0.0], 1.0 / 3.0)];
    let mut corner_err: f64 = 0.0;
    for (p, want) in corners {
        corner_err = corner_err.max((closed_form(ClosedForm::Rank3GhzW, &p).unwrap() - want).abs());
    }
    let extra = interior_points(50, 0.02, SEED);
    let mut grid = simplex_grid(2, 51).unwrap();
    grid.extend(extra.iter().cloned());
    let s = mixed(&rank3_ghz_w().unwrap(), &grid);
    let mut worst: f64 = 0.0;
    for p in &extra {
        let i = s.index_of(p).unwrap();
        worst = worst.max((s.envelope[i] - closed_form(ClosedForm::Rank3GhzW, p).unwrap()).abs());
    }
    let mut pipeline_corner: f64 = 0.0;
    for (p, want) in corners {
        pipeline_corner = pipeline_corner.max((s.envelope[s.index_of(&p).unwrap()] - want).abs());
    }
    let flags = s.flagged().len();
    let mut fp = surface_fingerprint(&s);
    fp.push(worst);
    Outcome::new(
        corner_err <= 1e-9 && pipeline_corner <= 1e-9 && worst <= 5e-4 && flags == 0,
        format!(
            "closed-form corner error {corner_err:.2e}, pipeline corner error {pipeline_corner:.2e} \
             (tol 1e-9); 50 interior points max error {worst:.2e} (tol 5e-4); {flags} Hessian flags"
        ),
        fp,
    )
}

fn case2_nonconvexity() -> Outcome {
    let start = Instant::now();
    let grid = simplex_grid(2, 101).unwrap();
    let s = mixed(&rank3_gghz(0.55).unwrap(), &grid);
    let region = |p: &[f64]| p[0] > 0.8 && p[1] < 0.1;
    let flagged_in_region = s.flagged().into_iter().filter(|&i| region(&grid[i])).count();
    let best_gap = grid
        .iter()
        .enumerate()
        .filter(|(_, p)| region(p))
        .map(|(i, _)| s.raw[i] - s.envelope[i])
        .fold(0.0, f64::max);
    let mut fp = surface_fingerprint(&s);

    let ts = simplex_grid(1, 201).unwrap();
    let mut slice_notes = Vec::new();
    let mut slices_ok = true;
    for r in [0.96, 0.98] {
        let sl = mixed(&rank3_gghz_slice(0.55, r).unwrap(), &ts);
        let xs: Vec<f64> = ts.iter().map(|p| p[0]).collect();
        let segs = linear_segments(&xs, &sl.raw, 1e-6).unwrap();
        let widest = segs.iter().map(|g| g.max_gap).fold(0.0, f64::max);
        slices_ok &= !segs.is_empty() && widest > 1e-4;
        slice_notes.push(format!("r={r}: {} segment(s), max gap {widest:.2e}", segs.len()));
        fp.extend(surface_fingerprint(&sl));
    }
    let t = start.elapsed();
    Outcome::new(
        flagged_in_region > 0 && best_gap > 1e-4 && slices_ok && t < Duration::from_secs(300),
        format!(
            "alpha=0.55, 101 grid: {flagged_in_region} flagged in x1>0.8,x2<0.1, max raw-envelope \
             {best_gap:.2e} (need >1e-4); {}; {:.1}s (limit 300s)",
            slice_notes.join(", "),
            t.as_secs_f64()
        ),
        fp,
    )
}

fn five_qubit_convexity() -> Outcome {
    let extra = interior_points(50, 0.02, SEED + 1);
    let mut grid = simplex_grid(2, 51).unwrap();
    grid.extend(extra.iter().cloned());
    let s = mixed(&rank5_five_qubit().unwrap(), &grid);
    let flags = s.flagged().len();
    let mut worst: f64 = 0.0;
    for p in &extra {
        let i = s.index_of(p).unwrap();
        worst = worst.max((s.envelope[i] - closed_form(ClosedForm::Rank5FiveQubit, p).unwrap()).abs());
    }
    let c = s.index_of(&[1.0, 0.0]).unwrap();
    let corner = s.envelope[c];
    let corner_cf = closed_form(ClosedForm::Rank5FiveQubit, &[1.0, 0.0]).unwrap();
    let corner_ok = (corner - 0.5).abs() <= 5e-4 && (corner_cf - 0.5).abs() <= 5e-4;
    Outcome::new(
        flags == 0 && worst <= 5e-4 && corner_ok,
        format!(
            "51 grid: {flags} Hessian flags; 50 interior points max error {worst:.2e} (tol 5e-4); \
             corner (1,0) pipeline {corner:.6}, closed form {corner_cf:.6}"
        ),
        surface_fingerprint(&s),
    )
}

fn qutrit_family() -> Outcome {
    let third = 1.0 / 3.0;
    let mut grid = simplex_grid(2, 51).unwrap();
    grid.push(vec![third, third]);
    let s = mixed(&qudit_sectors(&[3, 3, 3]).unwrap(), &grid);
    let mut worst: f64 = 0.0;
    for (p, e) in grid.iter().zip(&s.envelope) {
        worst = worst.max((e - closed_form(ClosedForm::Qutrit, p).unwrap()).abs());
    }
    let center = s.envelope[s.index_of(&[third, third]).unwrap()];
    let mut corner_err: f64 = 0.0;
    for p in [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]] {
        corner_err = corner_err.max((s.envelope[s.index_of(&p).unwrap()] - 2.0 / 3.0).abs());
    }
    Outcome::new(
        worst <= 5e-4 && center.abs() <= 1e-6 && corner_err <= 1e-6,
        format!(
            "51 grid max error {worst:.2e} (tol 5e-4); center {center:.2e} (tol 1e-6); \
             corner error {corner_err:.2e} (tol 1e-6)"
        ),
        surface_fingerprint(&s),
    )
}

fn cross_sector_leak(kind: GroupKind, states: &[ggm_core::PureState]) -> f64 {
    let group = builtin_group(kind, states[0].shape()).unwrap();
    let mut worst: f64 = 0.0;
    for (a, sa) in states.iter().enumerate() {
        for (b, sb) in states.iter().enumerate() {
            if a == b {
                continue;
            }
            let va = DMatrix::from_column_slice(sa.amplitudes().len(), 1, sa.amplitudes());
            let vb = DMatrix::from_column_slice(sb.amplitudes().len(), 1, sb.amplitudes());
            let t = group.twirl_matrix(&(va * vb.adjoint())).unwrap();
            worst = worst.max(t.iter().map(|z: &C64| z.norm()).fold(0.0, f64::max));
        }
    }
    worst
}

fn groups() -> Outcome {
    let cases = [
        ("parity", GroupKind::Parity, SystemShape::qubits(4).unwrap()),
        ("omega", GroupKind::Omega { order: None }, SystemShape::qubits(5).unwrap()),
        ("zeta", GroupKind::Zeta, SystemShape::qubits(3).unwrap()),
        ("qudit", GroupKind::Qudit, SystemShape::uniform(3, 3).unwrap()),
        ("qudit(2,3,4)", GroupKind::Qudit, SystemShape::new(vec![2, 3, 4]).unwrap()),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    let mut fp = Vec::new();
    for (name, kind, shape) in cases {
        let c = builtin_group(kind, &shape).unwrap().check();
        ok &= c.passed;
        notes.push(format!("{name}:{}", if c.passed { "ok" } else { "FAILED" }));
        fp.extend([c.identity_deviation, c.closure_deviation, c.inverse_deviation]);
    }

    let mut omega_states = vec![ghz(5, 2, 1).unwrap()];
    omega_states.extend((1..=4).map(|k| dicke(5, k).unwrap()));
    let omega_leak = cross_sector_leak(GroupKind::Omega { order: None }, &omega_states);
    let mut qudit_leak: f64 = 0.0;
    for dims in [vec![3, 3, 3], vec![2, 3, 4]] {
        let shape = SystemShape::new(dims.clone()).unwrap();
        let l = ggm_core::states::lcm_of(&dims);
        let states: Vec<_> = (0..l)
            .map(|k| sector_state(&SectorSpec::uniform(shape.clone(), k).unwrap()).unwrap())
            .collect();
        qudit_leak = qudit_leak.max(cross_sector_leak(GroupKind::Qudit, &states));
    }

    let zeta = zeta_slice().unwrap();
    let all = preimage_phase_samples(zeta.rank(), 20, SEED);
    let draws = &all[all.len() - 20..];
    let mut preimage_dev: f64 = 0.0;
    let mut preimage_ok = true;
    for p in [[0.3, 0.4], [0.1, 0.2], [0.6, 0.3]] {
        let v = zeta.verify_preimage_with(&p, draws).unwrap();
        preimage_ok &= v.passed;
        preimage_dev = preimage_dev.max(v.max_deviation);
    }
    fp.extend([omega_leak, qudit_leak, preimage_dev]);
    Outcome::new(
        ok && omega_leak < 1e-12 && qudit_leak < 1e-12 && preimage_ok,
        format!(
            "group axioms [{}]; cross-sector leak omega {omega_leak:.1e}, qudit {qudit_leak:.1e} \
             (tol 1e-12); zeta preimage at 20 draws max deviation {preimage_dev:.1e} (tol 1e-9)",
            notes.join(" ")
        ),
        fp,
    )
}

/// Distance of `got` to the target phases, modulo global gauge and φ → −φ.
fn phase_mismatch(got: &[f64], target: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for sign in [1.0, -1.0] {
        for g in 0..got.len() {
            // align element g of both vectors, then compare the rest
            let shift = target[g] - sign * got[g];
            let d = got
                .iter()
                .zip(target)
                .map(|(a, t)| wrap_phase(sign * a + shift - t).abs())
                .fold(0.0, f64::max);
            best = best.min(d);
        }
    }
    best
}

fn zeta_argmin() -> Outcome {
    let fam = zeta_slice().unwrap();
    let target = [0.0, -PI / 2.0, PI / 2.0, 0.0];
    let points = [
        [0.2, 0.2],
        [0.3, 0.3],
        [0.1, 0.6],
        [0.5, 0.2],
        [0.25, 0.5],
        [0.4, 0.4],
        [0.6, 0.1],
        [0.15, 0.35],
        [0.35, 0.15],
        [0.45, 0.3],
    ];
    let mut worst: f64 = 0.0;
    let mut fp = Vec::new();
    let mut first_bad = None;
    for p in points {
        let opt = fam.min_phase_ggm(&p).unwrap();
        let m = phase_mismatch(&opt.phases, &target);
        if m > 1e-2 && first_bad.is_none() {
            first_bad = Some(format!(
                " first miss at ({}, {}): phases {:?}, value {:.6}, value at stated phases {:.6}",
                p[0],
                p[1],
                opt.phases.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>(),
                opt.value,
                {
                    let w = fam.weights(&p).unwrap();
                    ggm_pure(&ggm_core::states::superpose(fam.basis(), &w, &target).unwrap()).value
                }
            ));
        }
        worst = worst.max(m);
        fp.push(opt.value);
        fp.extend(&opt.phases);
    }
    Outcome::new(
        worst <= 1e-2,
        format!(
            "10 points: max phase mismatch {worst:.3e} rad (tol 1e-2){}",
            first_bad.unwrap_or_default()
        ),
        fp,
    )
}

fn hjw_consistency() -> Outcome {
    let mut families: Vec<TwirledFamily> = vec![
        rank2_parity(3).unwrap(),
        rank2_parity(5).unwrap(),
        ghz_mixture(3).unwrap(),
        rank3_ghz_w().unwrap(),
        rank3_gghz(0.55).unwrap(),
        rank3_gghz_slice(0.55, 0.96).unwrap(),
        rank3_ghz_d1_dn1(5).unwrap(),
        rank5_five_qubit().unwrap(),
        zeta_slice().unwrap(),
        qudit_sectors(&[3, 3, 3]).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst_violation = f64::NEG_INFINITY;
    let mut rank2_gap: f64 = 0.0;
    let mut fp = Vec::new();
    for fam in families.drain(..) {
        let k = fam.param_dim();
        let mut pts = Vec::new();
        while pts.len() < 10 {
            let p: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
            if p.iter().sum::<f64>() <= 1.0 {
                pts.push(p);
            }
        }
        let mut grid = if k == 1 { simplex_grid(1, 201) } else { simplex_grid(2, 21) }.unwrap();
        grid.extend(pts.iter().cloned());
        let s = ggm_mixed(&fam, &grid, MixedOptions { hessian_step: None, ..Default::default() })
            .unwrap();
        for p in &pts {
            let env = s.envelope[s.index_of(p).unwrap()];
            let bound = hjw_upper_bound(&fam.target(p).unwrap(), fam.rank() + 2, 2000, SEED).unwrap();
            worst_violation = worst_violation.max(env - bound);
            if fam.name().starts_with("rank2_parity") {
                rank2_gap = rank2_gap.max(bound - env);
            }
            fp.extend([env, bound]);
        }
    }
    Outcome::new(
        worst_violation <= 1e-9 && rank2_gap < 0.05,
        format!(
            "10 families x 10 points: max (envelope - bound) {worst_violation:.2e} (need <= 1e-9); \
             rank-2 max gap {rank2_gap:.3e} (need < 0.05)"
        ),
        fp,
    )
}

fn ghz_mixture_check() -> Outcome {
    let grid = simplex_grid(1, 51).unwrap();
    let mut worst: f64 = 0.0;
    let mut fp = Vec::new();
    for n in [3, 5] {
        let s = mixed(&ghz_mixture(n).unwrap(), &grid);
        for (p, e) in grid.iter().zip(&s.envelope) {
            worst = worst.max((e - closed_form(ClosedForm::Rank2Sym, p).unwrap()).abs());
        }
        fp.extend(surface_fingerprint(&s));
    }
    Outcome::new(
        worst <= 2e-4,
        format!("N=3,5, 51 points: max error {worst:.2e} (tol 2e-4)"),
        fp,
    )
}

fn case3_window() -> Outcome {
    let grid = simplex_grid(2, 51).unwrap();
    let s = mixed(&rank3_ghz_d1_dn1(5).unwrap(), &grid);
    let flagged = s.flagged();
    let in_window = |p: &[f64]| p[0] >= 0.7 && p[1] <= 0.3;
    let window_flags = flagged.iter().filter(|&&i| in_window(&grid[i])).count();
    let outside_flags = flagged.iter().filter(|&&i| grid[i][0] <= 0.5).count();
    Outcome::new(
        window_flags == 0 && outside_flags > 0,
        format!(
            "N=5, 51 grid: {window_flags} flags with x1>=0.7,x2<=0.3 (need 0), \
             {outside_flags} flags with x1<=0.5 (need >0)"
        ),
        surface_fingerprint(&s),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 11] = [
    ("1 pure GGM correctness", pure_correctness),
    ("2 rank-2 closed form and N-independence", rank2_closed_form),
    ("3 GHZ/W rank-3 closed form", ghz_w_family),
    ("4 nonconvexity detection", case2_nonconvexity),
    ("5 five-qubit rank-5 convexity", five_qubit_convexity),
    ("6 qutrit family", qutrit_family),
    ("7 group verification", groups),
    ("8 zeta argmin phases", zeta_argmin),
    ("9 decomposition-sampling bound", hjw_consistency),
    ("10 GHZ+/GHZ- mixture", ghz_mixture_check),
    ("rank-3 GHZ/D1/D(N-1) convex window", case3_window),
];

fn run_all() -> Vec<(Outcome, Duration)> {
    std::thread::scope(|s| {
        let handles: Vec<_> = CRITERIA
            .iter()
            .map(|(_, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    let o = f();
                    (o, t.elapsed())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    })
}

fn same_bits(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

fn main() {
    let first = run_all();
    let second = run_all();
    let mut failures = 0;
    for ((name, _), (o, t)) in CRITERIA.iter().zip(&first) {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} [{name}] {} ({:.1}s)", o.detail, t.as_secs_f64());
        failures += usize::from(!o.passed);
    }
    let mismatched: Vec<&str> = CRITERIA
        .iter()
        .zip(first.iter().zip(&second))
        .filter(|(_, ((a, _), (b, _)))| !same_bits(&a.fingerprint, &b.fingerprint))
        .map(|((name, _), _)| *name)
        .collect();
    let det_ok = mismatched.is_empty();
    println!(
        "{} [11 determinism] two full runs bitwise identical: {}",
        if det_ok { "PASS" } else { "FAIL" },
        if det_ok { "all criteria".to_string() } else { format!("differ in {mismatched:?}") }
    );
    failures += usize::from(!det_ok);
    println!("acceptance: {} of {} criteria passed", CRITERIA.len() + 1 - failures, CRITERIA.len() + 1);
    if failures > 0 {
        std::process::exit(1);
    }
}
