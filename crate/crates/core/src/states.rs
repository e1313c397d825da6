//! Constructors for the pure-state families: GHZ, gGHZ, Dicke, residue
//! sectors, the three-qubit ζ basis, and phased superpositions.

use serde::Deserialize;
use serde_json::Value;

use crate::error::{GgmError, Result};
use crate::hilbert::{check_probability_vector, PureState, SystemShape, C64};

/// Orthonormality tolerance for superposition bases.
pub const BASIS_TOL: f64 = 1e-8;

/// (|0…0⟩ + sign·|1…1⟩)/√2 with local dimension `d`.
pub fn ghz(n: usize, d: usize, sign: i8) -> Result<PureState> {
    if sign != 1 && sign != -1 {
        return Err(GgmError::InvalidArgument {
            name: "sign",
            reason: format!("must be +1 or -1, got {sign}"),
        });
    }
    let shape = SystemShape::uniform(n, d)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![C64::new(0.0, 0.0); shape.total_dim()];
    amps[0] = C64::new(h, 0.0);
    amps[shape.index_of(&vec![1; n])] = C64::new(f64::from(sign) * h, 0.0);
    PureState::new(shape, amps)
}

/// α|0…0⟩ + √(1−α²)|1…1⟩ on qubits.
pub fn gghz(n: usize, alpha: f64) -> Result<PureState> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(GgmError::InvalidArgument {
            name: "alpha",
            reason: format!("{alpha} is outside [0, 1]"),
        });
    }
    let shape = SystemShape::qubits(n)?;
    let mut amps = vec![C64::new(0.0, 0.0); shape.total_dim()];
    amps[0] = C64::new(alpha, 0.0);
    amps[shape.total_dim() - 1] = C64::new((1.0 - alpha * alpha).sqrt(), 0.0);
    PureState::new(shape, amps)
}

/// Weight-`k` bitstrings of length `n`, ascending by integer value.
pub fn weight_k_indices(n: usize, k: usize) -> Vec<usize> {
    (0..1usize << n)
        .filter(|i| i.count_ones() as usize == k)
        .collect()
}

/// Uniform superposition of all weight-`k` bitstrings.
pub fn dicke(n: usize, k: usize) -> Result<PureState> {
    if k > n {
        return Err(GgmError::InvalidArgument {
            name: "k",
            reason: format!("excitation count {k} exceeds party count {n}"),
        });
    }
    let shape = SystemShape::qubits(n)?;
    let idx = weight_k_indices(n, k);
    let a = 1.0 / (idx.len() as f64).sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); shape.total_dim()];
    for i in idx {
        amps[i] = C64::new(a, 0.0);
    }
    PureState::new(shape, amps)
}

/// Coefficients of a generalized Dicke state, one per weight-k bitstring.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeCoefficients {
    n: usize,
    k: usize,
    b: Vec<C64>,
}

impl DickeCoefficients {
    pub fn new(n: usize, k: usize, b: Vec<C64>) -> Result<Self> {
        if k > n {
            return Err(GgmError::InvalidArgument {
                name: "k",
                reason: format!("excitation count {k} exceeds party count {n}"),
            });
        }
        let expected = binomial(n, k);
        if b.len() != expected {
            return Err(GgmError::InvalidArgument {
                name: "b",
                reason: format!("expected C({n},{k}) = {expected} coefficients, got {}", b.len()),
            });
        }
        let norm = crate::hilbert::vector_norm(&b);
        if (norm - 1.0).abs() > crate::hilbert::STATE_TOL {
            return Err(GgmError::NotNormalized(norm));
        }
        Ok(Self { n, k, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.b
    }
}

pub fn generalized_dicke(coeffs: &DickeCoefficients) -> Result<PureState> {
    let shape = SystemShape::qubits(coeffs.n)?;
    let mut amps = vec![C64::new(0.0, 0.0); shape.total_dim()];
    for (i, &b) in weight_k_indices(coeffs.n, coeffs.k).iter().zip(&coeffs.b) {
        amps[*i] = b;
    }
    PureState::new(shape, amps)
}

/// Amplitudes supported on a single charge sector of the qudit clock group.
///
/// The charge of |j_1…j_N⟩ is Σ_m j_m·(modulus/d_m) mod modulus. For equal
/// local dimensions d and modulus d this is the plain digit sum mod d.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorSpec {
    shape: SystemShape,
    modulus: usize,
    k: usize,
    q: Vec<C64>,
}

impl SectorSpec {
    /// `q` is the full amplitude vector; entries outside the sector must vanish.
    pub fn new(shape: SystemShape, modulus: usize, k: usize, q: Vec<C64>) -> Result<Self> {
        if modulus == 0 || shape.dims().iter().any(|d| !modulus.is_multiple_of(*d)) {
            return Err(GgmError::InvalidArgument {
                name: "modulus",
                reason: format!(
                    "{modulus} is not a common multiple of dims {:?}",
                    shape.dims()
                ),
            });
        }
        if k >= modulus {
            return Err(GgmError::InvalidArgument {
                name: "k",
                reason: format!("residue {k} is not below modulus {modulus}"),
            });
        }
        if q.len() != shape.total_dim() {
            return Err(GgmError::InvalidArgument {
                name: "q",
                reason: format!("expected {} amplitudes, got {}", shape.total_dim(), q.len()),
            });
        }
        Ok(Self { shape, modulus, k, q })
    }

    /// Equal-weight superposition of every basis state in sector `k`, modulus lcm(dims).
    pub fn uniform(shape: SystemShape, k: usize) -> Result<Self> {
        let modulus = lcm_of(shape.dims());
        let members: Vec<usize> = (0..shape.total_dim())
            .filter(|&i| sector_charge(&shape, modulus, i) == k)
            .collect();
        if members.is_empty() {
            return Err(GgmError::InvalidArgument {
                name: "k",
                reason: format!("sector {k} is empty for dims {:?}", shape.dims()),
            });
        }
        let a = C64::new(1.0 / (members.len() as f64).sqrt(), 0.0);
        let mut q = vec![C64::new(0.0, 0.0); shape.total_dim()];
        for i in members {
            q[i] = a;
        }
        Self::new(shape, modulus, k, q)
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Σ_m j_m·(modulus/d_m) mod modulus for the flat index `index`.
pub fn sector_charge(shape: &SystemShape, modulus: usize, index: usize) -> usize {
    shape
        .digits(index)
        .iter()
        .zip(shape.dims())
        .map(|(&j, &d)| j * (modulus / d))
        .sum::<usize>()
        % modulus
}

pub fn sector_state(spec: &SectorSpec) -> Result<PureState> {
    for (i, a) in spec.q.iter().enumerate() {
        if a.norm() > 0.0 && sector_charge(&spec.shape, spec.modulus, i) != spec.k {
            return Err(GgmError::SectorLeak(i));
        }
    }
    PureState::new(spec.shape.clone(), spec.q.clone())
}

/// The ζ_i basis of three qubits, `i` in 1..=4.
pub fn zeta(i: usize) -> Result<PureState> {
    let h = C64::new(0.5, 0.0);
    let ih = C64::new(0.0, 0.5);
    let terms: [(usize, C64); 4] = match i {
        1 => [(0b001, h), (0b010, h), (0b100, -h), (0b111, h)],
        2 => [(0b000, -ih), (0b011, -ih), (0b100, h), (0b111, h)],
        3 => [(0b000, ih), (0b011, ih), (0b100, h), (0b111, h)],
        4 => [(0b001, h), (0b010, h), (0b100, h), (0b111, -h)],
        _ => {
            return Err(GgmError::InvalidArgument {
                name: "i",
                reason: format!("zeta index must be 1..=4, got {i}"),
            })
        }
    };
    let shape = SystemShape::qubits(3)?;
    let mut amps = vec![C64::new(0.0, 0.0); 8];
    for (idx, a) in terms {
        amps[idx] = a;
    }
    PureState::new(shape, amps)
}

/// Largest deviation of the Gram matrix of `basis` from the identity.
pub fn orthonormality_defect(basis: &[PureState]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (a, x) in basis.iter().enumerate() {
        for (b, y) in basis.iter().enumerate().skip(a) {
            let g = x.inner(y)?;
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    Ok(worst)
}

/// Σ_k √w_k e^{iφ_k} |basis_k⟩.
pub fn superpose(basis: &[PureState], weights: &[f64], phases: &[f64]) -> Result<PureState> {
    let first = basis.first().ok_or(GgmError::InvalidArgument {
        name: "basis",
        reason: "empty basis".into(),
    })?;
    if weights.len() != basis.len() || phases.len() != basis.len() {
        return Err(GgmError::InvalidArgument {
            name: "weights",
            reason: format!(
                "basis has {} states but {} weights and {} phases were given",
                basis.len(),
                weights.len(),
                phases.len()
            ),
        });
    }
    let defect = orthonormality_defect(basis)?;
    if defect > BASIS_TOL {
        return Err(GgmError::NotOrthonormal(defect));
    }
    check_probability_vector(weights)?;
    let mut amps = vec![C64::new(0.0, 0.0); first.shape().total_dim()];
    superpose_into(basis, weights, phases, &mut amps);
    PureState::normalized(first.shape().clone(), amps)
}

/// Unchecked accumulation used on hot paths; `out` is overwritten.
pub(crate) fn superpose_into(basis: &[PureState], weights: &[f64], phases: &[f64], out: &mut [C64]) {
    out.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
    for ((s, &w), &phi) in basis.iter().zip(weights).zip(phases) {
        if w == 0.0 {
            continue;
        }
        let c = C64::from_polar(w.sqrt(), phi);
        for (o, a) in out.iter_mut().zip(s.amplitudes()) {
            *o += c * a;
        }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm_of(values: &[usize]) -> usize {
    values.iter().fold(1, |acc, &v| acc / gcd(acc, v) * v)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GhzArgs {
    n: usize,
    #[serde(default = "default_d")]
    d: usize,
    #[serde(default = "default_sign")]
    sign: i8,
}

fn default_d() -> usize {
    2
}

fn default_sign() -> i8 {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GghzArgs {
    n: usize,
    alpha: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DickeArgs {
    n: usize,
    k: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneralizedDickeArgs {
    n: usize,
    k: usize,
    b: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SectorArgs {
    dims: Vec<usize>,
    k: usize,
    #[serde(default)]
    modulus: Option<usize>,
    #[serde(default)]
    amplitudes: Option<Vec<[f64; 2]>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ZetaArgs {
    i: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstructorSpec {
    constructor: String,
    #[serde(default)]
    args: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    shape: Vec<usize>,
    amplitudes: Vec<[f64; 2]>,
}

pub(crate) fn complex_list(pairs: &[[f64; 2]]) -> Vec<C64> {
    pairs.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

fn args<T: serde::de::DeserializeOwned>(constructor: &str, v: Value) -> Result<T> {
    serde_json::from_value(v)
        .map_err(|e| GgmError::InvalidSpec(format!("args of `{constructor}`: {e}")))
}

/// Parses a state document: `{"constructor": name, "args": {…}}` or
/// `{"shape": [d…], "amplitudes": [[re, im], …]}`.
pub fn parse_state_spec(text: &str) -> Result<PureState> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| GgmError::InvalidSpec(e.to_string()))?;
    state_from_value(doc)
}

pub fn state_from_value(doc: Value) -> Result<PureState> {
    let obj = doc
        .as_object()
        .ok_or_else(|| GgmError::InvalidSpec("state spec must be a JSON object".into()))?;
    if obj.contains_key("constructor") {
        let spec: ConstructorSpec = serde_json::from_value(doc)
            .map_err(|e| GgmError::InvalidSpec(e.to_string()))?;
        let name = spec.constructor.as_str();
        match name {
            "ghz" => {
                let a: GhzArgs = args(name, spec.args)?;
                ghz(a.n, a.d, a.sign)
            }
            "gghz" => {
                let a: GghzArgs = args(name, spec.args)?;
                gghz(a.n, a.alpha)
            }
            "dicke" => {
                let a: DickeArgs = args(name, spec.args)?;
                dicke(a.n, a.k)
            }
            "generalized_dicke" => {
                let a: GeneralizedDickeArgs = args(name, spec.args)?;
                generalized_dicke(&DickeCoefficients::new(a.n, a.k, complex_list(&a.b))?)
            }
            "sector" => {
                let a: SectorArgs = args(name, spec.args)?;
                let shape = SystemShape::new(a.dims)?;
                let sector = match a.amplitudes {
                    Some(q) => {
                        let modulus = a.modulus.unwrap_or_else(|| lcm_of(shape.dims()));
                        SectorSpec::new(shape, modulus, a.k, complex_list(&q))?
                    }
                    None => {
                        let lcm = lcm_of(shape.dims());
                        if a.modulus.is_some_and(|m| m != lcm) {
                            return Err(GgmError::InvalidSpec(format!(
                                "args of `sector`: field `modulus` must equal lcm(dims) = {lcm} for uniform sectors"
                            )));
                        }
                        SectorSpec::uniform(shape, a.k)?
                    }
                };
                sector_state(&sector)
            }
            "zeta" => {
                let a: ZetaArgs = args(name, spec.args)?;
                zeta(a.i)
            }
            other => Err(GgmError::InvalidSpec(format!(
                "field `constructor`: unknown constructor `{other}` (expected one of ghz, gghz, dicke, generalized_dicke, sector, zeta)"
            ))),
        }
    } else if obj.contains_key("shape") {
        let raw: RawSpec =
            serde_json::from_value(doc).map_err(|e| GgmError::InvalidSpec(e.to_string()))?;
        let shape = SystemShape::new(raw.shape)?;
        PureState::new(shape, complex_list(&raw.amplitudes))
    } else {
        Err(GgmError::InvalidSpec(
            "expected a `constructor` or a `shape` field".into(),
        ))
    }
}
