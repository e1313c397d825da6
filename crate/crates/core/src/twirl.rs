//! Finite groups of local unitaries and the twirl channel they define.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{GgmError, Result};
use crate::hilbert::{max_abs, DensityMatrix, PureState, SystemShape, C64, STATE_TOL};
use crate::states::{lcm_of, superpose_into};

/// Tolerance for group-element equality, closure and the preimage check.
pub const GROUP_TOL: f64 = 1e-9;

/// Seed for the random part of the preimage phase sampling.
pub const PREIMAGE_SEED: u64 = 0x005e_ed0f_ca11;

/// U_1 ⊗ … ⊗ U_N.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitaryElement {
    shape: SystemShape,
    factors: Vec<DMatrix<C64>>,
}

impl LocalUnitaryElement {
    pub fn new(shape: SystemShape, factors: Vec<DMatrix<C64>>) -> Result<Self> {
        if factors.len() != shape.party_count() {
            return Err(GgmError::InvalidArgument {
                name: "factors",
                reason: format!(
                    "{} factors for {} parties",
                    factors.len(),
                    shape.party_count()
                ),
            });
        }
        for (p, (u, &d)) in factors.iter().zip(shape.dims()).enumerate() {
            if u.nrows() != d || u.ncols() != d {
                return Err(GgmError::InvalidArgument {
                    name: "factors",
                    reason: format!(
                        "factor {p} is {}x{}, party dimension is {d}",
                        u.nrows(),
                        u.ncols()
                    ),
                });
            }
            let dev = max_abs(&(u.adjoint() * u - DMatrix::<C64>::identity(d, d)));
            if dev > STATE_TOL {
                return Err(GgmError::InvalidArgument {
                    name: "factors",
                    reason: format!("factor {p} is not unitary (deviation {dev:e})"),
                });
            }
        }
        Ok(Self { shape, factors })
    }

    pub fn identity(shape: &SystemShape) -> Self {
        let factors = shape
            .dims()
            .iter()
            .map(|&d| DMatrix::<C64>::identity(d, d))
            .collect();
        Self {
            shape: shape.clone(),
            factors,
        }
    }

    /// The same single-party unitary on every party.
    pub fn uniform(shape: &SystemShape, u: &DMatrix<C64>) -> Result<Self> {
        Self::new(shape.clone(), vec![u.clone(); shape.party_count()])
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn factors(&self) -> &[DMatrix<C64>] {
        &self.factors
    }

    /// Kronecker product of the factors, party 0 outermost.
    pub fn full(&self) -> DMatrix<C64> {
        let mut acc = DMatrix::<C64>::identity(1, 1);
        for u in &self.factors {
            acc = acc.kronecker(u);
        }
        acc
    }

    /// self · other, factor by factor.
    pub fn compose(&self, other: &LocalUnitaryElement) -> Result<Self> {
        self.shape.ensure_same(&other.shape)?;
        Ok(Self {
            shape: self.shape.clone(),
            factors: self
                .factors
                .iter()
                .zip(&other.factors)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            factors: self.factors.iter().map(|u| u.adjoint()).collect(),
        }
    }

    /// Applies the element to a raw amplitude vector one party at a time.
    pub(crate) fn apply_amplitudes(&self, amps: &[C64]) -> Vec<C64> {
        let dims = self.shape.dims();
        let total = self.shape.total_dim();
        let mut cur = amps.to_vec();
        let mut stride = total;
        let mut gathered = Vec::new();
        for (u, &d) in self.factors.iter().zip(dims) {
            stride /= d;
            if *u == DMatrix::<C64>::identity(d, d) {
                continue;
            }
            gathered.resize(d, C64::new(0.0, 0.0));
            for block in (0..total).step_by(d * stride) {
                for s in 0..stride {
                    for (j, g) in gathered.iter_mut().enumerate() {
                        *g = cur[block + j * stride + s];
                    }
                    for i in 0..d {
                        let mut acc = C64::new(0.0, 0.0);
                        for (j, g) in gathered.iter().enumerate() {
                            acc += u[(i, j)] * g;
                        }
                        cur[block + i * stride + s] = acc;
                    }
                }
            }
        }
        cur
    }
}

/// U|ψ⟩
pub fn apply(u: &LocalUnitaryElement, state: &PureState) -> Result<PureState> {
    u.shape.ensure_same(state.shape())?;
    PureState::new(state.shape().clone(), u.apply_amplitudes(state.amplitudes()))
}

/// UρU†
pub fn apply_density(u: &LocalUnitaryElement, rho: &DensityMatrix) -> Result<DensityMatrix> {
    u.shape.ensure_same(rho.shape())?;
    let full = u.full();
    DensityMatrix::new(rho.shape().clone(), &full * rho.entries() * full.adjoint())
}

/// Max-norm distance between `a` and `b` after aligning their global phase.
pub fn phase_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let t: C64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    if t.norm() < 1e-12 {
        return max_abs(a) + max_abs(b);
    }
    let c = t / t.norm();
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - c * y).norm())
        .fold(0.0, f64::max)
}

/// Result of the identity, closure and inverse checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupCheck {
    pub order: usize,
    pub identity_deviation: f64,
    pub closure_deviation: f64,
    pub inverse_deviation: f64,
    pub passed: bool,
}

/// Checks identity, closure and inverses up to global phase on the full
/// tensor product.
pub fn check_group(elements: &[LocalUnitaryElement], tol: f64) -> GroupCheck {
    let full: Vec<DMatrix<C64>> = elements.iter().map(|e| e.full()).collect();
    let nearest = |m: &DMatrix<C64>| {
        full.iter()
            .map(|f| phase_distance(m, f))
            .fold(f64::INFINITY, f64::min)
    };
    let (identity_deviation, closure_deviation, inverse_deviation) = match full.first() {
        None => (f64::INFINITY, f64::INFINITY, f64::INFINITY),
        Some(f0) => {
            let id = DMatrix::<C64>::identity(f0.nrows(), f0.ncols());
            let identity = nearest(&id);
            let mut closure: f64 = 0.0;
            for a in &full {
                for b in &full {
                    closure = closure.max(nearest(&(a * b)));
                }
            }
            let inverse = full
                .iter()
                .map(|a| nearest(&a.adjoint()))
                .fold(0.0, f64::max);
            (identity, closure, inverse)
        }
    };
    let passed = identity_deviation <= tol && closure_deviation <= tol && inverse_deviation <= tol;
    GroupCheck {
        order: elements.len(),
        identity_deviation,
        closure_deviation,
        inverse_deviation,
        passed,
    }
}

/// A finite group of local unitaries that passed [`check_group`].
#[derive(Debug, Clone)]
pub struct UnitaryGroup {
    shape: SystemShape,
    elements: Vec<LocalUnitaryElement>,
    full: Vec<DMatrix<C64>>,
}

impl UnitaryGroup {
    pub fn new(shape: SystemShape, elements: Vec<LocalUnitaryElement>) -> Result<Self> {
        if elements.is_empty() {
            return Err(GgmError::InvalidGroup("no elements".into()));
        }
        for e in &elements {
            shape.ensure_same(e.shape())?;
        }
        let check = check_group(&elements, GROUP_TOL);
        if !check.passed {
            return Err(GgmError::InvalidGroup(format!(
                "identity {:e}, closure {:e}, inverse {:e}",
                check.identity_deviation, check.closure_deviation, check.inverse_deviation
            )));
        }
        let full = elements.iter().map(|e| e.full()).collect();
        Ok(Self {
            shape,
            elements,
            full,
        })
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn elements(&self) -> &[LocalUnitaryElement] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn check(&self) -> GroupCheck {
        check_group(&self.elements, GROUP_TOL)
    }

    /// {V g V† : g ∈ G} for a local unitary V.
    pub fn conjugated(&self, v: &LocalUnitaryElement) -> Result<Self> {
        let vd = v.adjoint();
        let elements = self
            .elements
            .iter()
            .map(|g| v.compose(g)?.compose(&vd))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.shape.clone(), elements)
    }

    /// (1/|G|) Σ_g g A g†
    pub fn twirl_matrix(&self, a: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let d = self.shape.total_dim();
        if a.nrows() != d || a.ncols() != d {
            return Err(GgmError::InvalidArgument {
                name: "A",
                reason: format!("expected {d}x{d}, got {}x{}", a.nrows(), a.ncols()),
            });
        }
        let mut acc = DMatrix::<C64>::zeros(d, d);
        for g in &self.full {
            acc += g * a * g.adjoint();
        }
        Ok(acc / C64::new(self.full.len() as f64, 0.0))
    }

    pub fn twirl(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.shape.ensure_same(rho.shape())?;
        DensityMatrix::new(self.shape.clone(), self.twirl_matrix(rho.entries())?)
    }

    /// Twirl of |ψ⟩⟨ψ|, computed from the orbit vectors g|ψ⟩.
    pub fn twirl_pure(&self, state: &PureState) -> Result<DensityMatrix> {
        self.shape.ensure_same(state.shape())?;
        Ok(DensityMatrix::from_parts_unchecked(
            self.shape.clone(),
            self.twirl_amplitudes(state.amplitudes()),
        ))
    }

    fn twirl_amplitudes(&self, amps: &[C64]) -> DMatrix<C64> {
        let d = self.shape.total_dim();
        let mut acc = DMatrix::<C64>::zeros(d, d);
        let inv = 1.0 / self.elements.len() as f64;
        for g in &self.elements {
            let v = g.apply_amplitudes(amps);
            for c in 0..d {
                let vc = v[c].conj() * inv;
                if vc == C64::new(0.0, 0.0) {
                    continue;
                }
                for r in 0..d {
                    acc[(r, c)] += v[r] * vc;
                }
            }
        }
        acc
    }
}

/// Outcome of a tolerance check together with the measured deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub passed: bool,
    pub max_deviation: f64,
}

impl Verdict {
    fn new(max_deviation: f64, tol: f64) -> Self {
        Self {
            passed: max_deviation <= tol,
            max_deviation,
        }
    }
}

/// ‖twirl(G, ρ) − ρ‖_max ≤ tol
pub fn verify_invariance(group: &UnitaryGroup, rho: &DensityMatrix, tol: f64) -> Result<Verdict> {
    let t = group.twirl_matrix(rho.entries())?;
    Ok(Verdict::new(max_abs(&(t - rho.entries())), tol))
}

/// Phase assignments for the preimage check: each free phase on an 8-point
/// grid with the others at zero, then `random` uniform draws from a fixed seed.
/// The first phase is the gauge and is always zero.
pub fn preimage_phase_samples(basis_len: usize, random: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; basis_len]];
    for k in 1..basis_len {
        for j in 1..8 {
            let mut phi = vec![0.0; basis_len];
            phi[k] = TAU * j as f64 / 8.0;
            out.push(phi);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        let mut phi = vec![0.0; basis_len];
        for p in phi.iter_mut().skip(1) {
            *p = rng.random_range(0.0..TAU);
        }
        out.push(phi);
    }
    out
}

/// Checks that twirling Σ √w_k e^{iφ_k}|b_k⟩ reproduces `target` for every
/// phase assignment in `samples`.
pub fn verify_preimage(
    group: &UnitaryGroup,
    basis: &[PureState],
    weights: &[f64],
    target: &DensityMatrix,
    samples: &[Vec<f64>],
    tol: f64,
) -> Result<Verdict> {
    group.shape.ensure_same(target.shape())?;
    for b in basis {
        group.shape.ensure_same(b.shape())?;
    }
    let mut amps = vec![C64::new(0.0, 0.0); group.shape.total_dim()];
    let mut worst: f64 = 0.0;
    for phases in samples {
        if phases.len() != basis.len() {
            return Err(GgmError::InvalidArgument {
                name: "samples",
                reason: format!("{} phases for {} basis states", phases.len(), basis.len()),
            });
        }
        superpose_into(basis, weights, phases, &mut amps);
        let t = group.twirl_amplitudes(&amps);
        worst = worst.max(max_abs(&(t - target.entries())));
    }
    Ok(Verdict::new(worst, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    /// {I, Z^⊗N}
    Parity,
    /// {diag(1, e^{2πij/order})^⊗N}, order defaults to N.
    Omega { order: Option<usize> },
    /// The order-4 three-qubit group fixing each ζ_i.
    Zeta,
    /// {(⊗_m Z_{d_m})^q : q < lcm(d)}
    Qudit,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn pauli_z() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

pub fn hadamard() -> DMatrix<C64> {
    let h = FRAC_1_SQRT_2;
    DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
}

/// Z_d = Σ_j e^{2πij/d}|j⟩⟨j|
pub fn clock(d: usize) -> DMatrix<C64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        (0..d).map(|j| C64::from_polar(1.0, TAU * j as f64 / d as f64)),
    ))
}

fn require_qubits(kind: &str, shape: &SystemShape) -> Result<()> {
    if !shape.is_qubits() {
        return Err(GgmError::InvalidGroup(format!(
            "{kind} group needs qubits, got dims {:?}",
            shape.dims()
        )));
    }
    Ok(())
}

pub fn builtin_elements(kind: GroupKind, shape: &SystemShape) -> Result<Vec<LocalUnitaryElement>> {
    match kind {
        GroupKind::Parity => {
            require_qubits("parity", shape)?;
            Ok(vec![
                LocalUnitaryElement::identity(shape),
                LocalUnitaryElement::uniform(shape, &pauli_z())?,
            ])
        }
        GroupKind::Omega { order } => {
            require_qubits("omega", shape)?;
            let order = order.unwrap_or(shape.party_count());
            if order == 0 {
                return Err(GgmError::InvalidGroup("omega order must be positive".into()));
            }
            (0..order)
                .map(|j| {
                    let w = C64::from_polar(1.0, TAU * j as f64 / order as f64);
                    let u = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), w]);
                    LocalUnitaryElement::uniform(shape, &u)
                })
                .collect()
        }
        GroupKind::Zeta => {
            if shape.dims() != [2, 2, 2] {
                return Err(GgmError::InvalidGroup(format!(
                    "zeta group needs three qubits, got dims {:?}",
                    shape.dims()
                )));
            }
            let h = FRAC_1_SQRT_2;
            let i2 = DMatrix::<C64>::identity(2, 2);
            // iσ_y and σ_y
            let isy = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
            let sy = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
            let hp = DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(-h, 0.0), c(h, 0.0)]);
            let hpt = hp.transpose();
            Ok(vec![
                LocalUnitaryElement::identity(shape),
                LocalUnitaryElement::new(shape.clone(), vec![isy.clone(), hp.clone(), hp])?,
                LocalUnitaryElement::new(shape.clone(), vec![i2, sy.clone(), sy])?,
                LocalUnitaryElement::new(shape.clone(), vec![-isy, hpt.clone(), hpt])?,
            ])
        }
        GroupKind::Qudit => {
            let l = lcm_of(shape.dims());
            let base: Vec<DMatrix<C64>> = shape.dims().iter().map(|&d| clock(d)).collect();
            let mut cur = LocalUnitaryElement::identity(shape);
            let step = LocalUnitaryElement::new(shape.clone(), base)?;
            let mut out = Vec::with_capacity(l);
            for _ in 0..l {
                out.push(cur.clone());
                cur = cur.compose(&step)?;
            }
            Ok(out)
        }
    }
}

pub fn builtin_group(kind: GroupKind, shape: &SystemShape) -> Result<UnitaryGroup> {
    UnitaryGroup::new(shape.clone(), builtin_elements(kind, shape)?)
}

/// A parsed group document, not yet checked for closure.
#[derive(Debug, Clone)]
pub enum GroupSpec {
    Builtin {
        kind: GroupKind,
        dims: Option<Vec<usize>>,
    },
    Explicit {
        shape: SystemShape,
        elements: Vec<LocalUnitaryElement>,
    },
}

impl GroupSpec {
    /// Shape and elements; `default_shape` fills in a built-in kind without `dims`.
    pub fn resolve(
        &self,
        default_shape: Option<&SystemShape>,
    ) -> Result<(SystemShape, Vec<LocalUnitaryElement>)> {
        match self {
            GroupSpec::Builtin { kind, dims } => {
                let shape = match (dims, default_shape) {
                    (Some(d), _) => SystemShape::new(d.clone())?,
                    (None, Some(s)) => s.clone(),
                    (None, None) => {
                        return Err(GgmError::InvalidSpec(
                            "field `dims` is required for a built-in group here".into(),
                        ))
                    }
                };
                let elements = builtin_elements(*kind, &shape)?;
                Ok((shape, elements))
            }
            GroupSpec::Explicit { shape, elements } => {
                if let Some(s) = default_shape {
                    s.ensure_same(shape)?;
                }
                Ok((shape.clone(), elements.clone()))
            }
        }
    }

    pub fn build(&self, default_shape: Option<&SystemShape>) -> Result<UnitaryGroup> {
        let (shape, elements) = self.resolve(default_shape)?;
        UnitaryGroup::new(shape, elements)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BuiltinDoc {
    kind: String,
    #[serde(default)]
    dims: Option<Vec<usize>>,
    #[serde(default)]
    order: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitDoc {
    elements: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
}

/// Parses `{"kind": …}` or `{"elements": [[matrix per party] …]}`.
pub fn parse_group_spec(text: &str) -> Result<GroupSpec> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| GgmError::InvalidSpec(e.to_string()))?;
    group_spec_from_value(doc)
}

pub fn group_spec_from_value(doc: Value) -> Result<GroupSpec> {
    let obj = doc
        .as_object()
        .ok_or_else(|| GgmError::InvalidSpec("group spec must be a JSON object".into()))?;
    if obj.contains_key("kind") {
        let b: BuiltinDoc =
            serde_json::from_value(doc).map_err(|e| GgmError::InvalidSpec(e.to_string()))?;
        let kind = match b.kind.as_str() {
            "parity" => GroupKind::Parity,
            "omega" => GroupKind::Omega { order: b.order },
            "zeta" => GroupKind::Zeta,
            "qudit" => GroupKind::Qudit,
            other => {
                return Err(GgmError::InvalidSpec(format!(
                    "field `kind`: unknown group kind `{other}` (expected parity, omega, zeta or qudit)"
                )))
            }
        };
        if b.order.is_some() && !matches!(kind, GroupKind::Omega { .. }) {
            return Err(GgmError::InvalidSpec(
                "field `order` only applies to the omega group".into(),
            ));
        }
        Ok(GroupSpec::Builtin { kind, dims: b.dims })
    } else if obj.contains_key("elements") {
        let e: ExplicitDoc =
            serde_json::from_value(doc).map_err(|e| GgmError::InvalidSpec(e.to_string()))?;
        let first = e
            .elements
            .first()
            .ok_or_else(|| GgmError::InvalidSpec("field `elements` is empty".into()))?;
        let dims: Vec<usize> = first.iter().map(|m| m.len()).collect();
        let shape = SystemShape::new(dims)?;
        let elements = e
            .elements
            .iter()
            .enumerate()
            .map(|(k, factors)| {
                let mats = factors
                    .iter()
                    .enumerate()
                    .map(|(p, rows)| parse_matrix(rows).map_err(|r| {
                        GgmError::InvalidSpec(format!("field `elements[{k}][{p}]`: {r}"))
                    }))
                    .collect::<Result<Vec<_>>>()?;
                LocalUnitaryElement::new(shape.clone(), mats).map_err(|err| {
                    GgmError::InvalidSpec(format!("field `elements[{k}]`: {err}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupSpec::Explicit { shape, elements })
    } else {
        Err(GgmError::InvalidSpec(
            "expected a `kind` or an `elements` field".into(),
        ))
    }
}

fn parse_matrix(rows: &[Vec<[f64; 2]>]) -> std::result::Result<DMatrix<C64>, String> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err("matrix must be square and nonempty".into());
    }
    Ok(DMatrix::from_fn(n, n, |r, col| {
        let [re, im] = rows[r][col];
        C64::new(re, im)
    }))
}
