//! Ready-made group-invariant mixed families and their JSON description.

use serde::Deserialize;
use serde_json::Value;

use crate::error::{GgmError, Result};
use crate::hilbert::SystemShape;
use crate::states::{dicke, gghz, ghz, lcm_of, sector_state, state_from_value, zeta, SectorSpec};
use crate::twirl::{builtin_group, group_spec_from_value, hadamard, GroupKind, LocalUnitaryElement};

use super::TwirledFamily;

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn identity_mixing(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|r| (0..n).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn parity_sectors(n: usize) -> Result<Vec<crate::hilbert::PureState>> {
    let shape = SystemShape::qubits(n)?;
    (0..2)
        .map(|k| sector_state(&SectorSpec::uniform(shape.clone(), k)?))
        .collect()
}

/// x·even-parity + (1−x)·odd-parity uniform sectors of N qubits.
pub fn rank2_parity(n: usize) -> Result<TwirledFamily> {
    let basis = parity_sectors(n)?;
    let group = builtin_group(GroupKind::Parity, basis[0].shape())?;
    TwirledFamily::new(
        format!("rank2_parity(n={n})"),
        group,
        basis,
        identity_mixing(2),
        names(&["x"]),
    )
}

/// x·GHZ⁺ + (1−x)·GHZ⁻, fixed by the parity group rotated with H^⊗N.
pub fn ghz_mixture(n: usize) -> Result<TwirledFamily> {
    let shape = SystemShape::qubits(n)?;
    let h = LocalUnitaryElement::uniform(&shape, &hadamard())?;
    let group = builtin_group(GroupKind::Parity, &shape)?.conjugated(&h)?;
    TwirledFamily::new(
        format!("ghz_mixture(n={n})"),
        group,
        vec![ghz(n, 2, 1)?, ghz(n, 2, -1)?],
        identity_mixing(2),
        names(&["x"]),
    )
}

/// x₁·gGHZ₃(α) + x₂·D¹ + x₃·D² with the order-3 phase group.
pub fn rank3_gghz(alpha: f64) -> Result<TwirledFamily> {
    let basis = vec![gghz(3, alpha)?, dicke(3, 1)?, dicke(3, 2)?];
    let group = builtin_group(GroupKind::Omega { order: Some(3) }, basis[0].shape())?;
    TwirledFamily::new(
        format!("rank3_gghz(alpha={alpha})"),
        group,
        basis,
        identity_mixing(3),
        names(&["x1", "x2"]),
    )
}

/// x₁·GHZ₃⁺ + x₂·W + x₃·W̄.
pub fn rank3_ghz_w() -> Result<TwirledFamily> {
    let basis = vec![ghz(3, 2, 1)?, dicke(3, 1)?, dicke(3, 2)?];
    let group = builtin_group(GroupKind::Omega { order: Some(3) }, basis[0].shape())?;
    TwirledFamily::new("rank3_ghz_w", group, basis, identity_mixing(3), names(&["x1", "x2"]))
}

/// The gGHZ₃(α) family restricted to x₂ = r(1 − x₁).
pub fn rank3_gghz_slice(alpha: f64, r: f64) -> Result<TwirledFamily> {
    if !(0.0..=1.0).contains(&r) {
        return Err(GgmError::InvalidArgument {
            name: "r",
            reason: format!("{r} is outside [0, 1]"),
        });
    }
    let basis = vec![gghz(3, alpha)?, dicke(3, 1)?, dicke(3, 2)?];
    let group = builtin_group(GroupKind::Omega { order: Some(3) }, basis[0].shape())?;
    TwirledFamily::new(
        format!("rank3_gghz_slice(alpha={alpha},r={r})"),
        group,
        basis,
        vec![vec![1.0, 0.0], vec![0.0, r], vec![0.0, 1.0 - r]],
        names(&["x1"]),
    )
}

/// x₁·GHZ_N⁺ + x₂·D¹ + x₃·D^{N−1} with the order-N phase group.
pub fn rank3_ghz_d1_dn1(n: usize) -> Result<TwirledFamily> {
    if n < 3 {
        return Err(GgmError::InvalidArgument {
            name: "n",
            reason: format!("need at least 3 qubits, got {n}"),
        });
    }
    let basis = vec![ghz(n, 2, 1)?, dicke(n, 1)?, dicke(n, n - 1)?];
    let group = builtin_group(GroupKind::Omega { order: None }, basis[0].shape())?;
    TwirledFamily::new(
        format!("rank3_ghz_d1_dn1(n={n})"),
        group,
        basis,
        identity_mixing(3),
        names(&["x1", "x2"]),
    )
}

/// x₁·GHZ₅⁺ + x₂/2·(D¹ + D²) + x₃/2·(D³ + D⁴).
pub fn rank5_five_qubit() -> Result<TwirledFamily> {
    let mut basis = vec![ghz(5, 2, 1)?];
    for k in 1..=4 {
        basis.push(dicke(5, k)?);
    }
    let group = builtin_group(GroupKind::Omega { order: None }, basis[0].shape())?;
    TwirledFamily::new(
        "rank5_five_qubit",
        group,
        basis,
        vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.5, 0.0],
            vec![0.0, 0.5, 0.0],
            vec![0.0, 0.0, 0.5],
            vec![0.0, 0.0, 0.5],
        ],
        names(&["x1", "x2"]),
    )
}

/// x·ζ₁ + y/2·(ζ₂ + ζ₃) + (1−x−y)·ζ₄ under the ζ group.
pub fn zeta_slice() -> Result<TwirledFamily> {
    let basis = (1..=4).map(zeta).collect::<Result<Vec<_>>>()?;
    let group = builtin_group(GroupKind::Zeta, basis[0].shape())?;
    TwirledFamily::new(
        "zeta_slice",
        group,
        basis,
        vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.5, 0.0],
            vec![0.0, 0.5, 0.0],
            vec![0.0, 0.0, 1.0],
        ],
        names(&["x", "y"]),
    )
}

/// Equal-weight charge sectors of the clock group, one basis state per sector.
pub fn qudit_sectors(dims: &[usize]) -> Result<TwirledFamily> {
    let shape = SystemShape::new(dims.to_vec())?;
    let l = lcm_of(dims);
    let basis = (0..l)
        .map(|k| sector_state(&SectorSpec::uniform(shape.clone(), k)?))
        .collect::<Result<Vec<_>>>()?;
    let group = builtin_group(GroupKind::Qudit, &shape)?;
    let params: Vec<String> = (1..l).map(|i| format!("x{i}")).collect();
    TwirledFamily::new(
        format!("qudit_sectors(dims={dims:?})"),
        group,
        basis,
        identity_mixing(l),
        params,
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NamedFamily {
    family: String,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    alpha: Option<f64>,
    #[serde(default)]
    r: Option<f64>,
    #[serde(default)]
    dims: Option<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CustomFamily {
    #[serde(default)]
    name: Option<String>,
    group: Value,
    basis: Vec<Value>,
    mixing: Vec<Vec<f64>>,
    params: Vec<String>,
}

fn required<T>(value: Option<T>, family: &str, field: &str) -> Result<T> {
    value.ok_or_else(|| {
        GgmError::InvalidSpec(format!("family `{family}` needs field `{field}`"))
    })
}

/// Parses `{"family": name, …}` or `{"group": …, "basis": […], "mixing": […], "params": […]}`.
pub fn parse_family_spec(text: &str) -> Result<TwirledFamily> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| GgmError::InvalidSpec(e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| GgmError::InvalidSpec("family spec must be a JSON object".into()))?;
    if obj.contains_key("family") {
        let f: NamedFamily =
            serde_json::from_value(doc).map_err(|e| GgmError::InvalidSpec(e.to_string()))?;
        let name = f.family.as_str();
        match name {
            "rank2_parity" => rank2_parity(required(f.n, name, "n")?),
            "ghz_mixture" => ghz_mixture(required(f.n, name, "n")?),
            "rank3_ghz_w" => rank3_ghz_w(),
            "rank3_gghz" => rank3_gghz(required(f.alpha, name, "alpha")?),
            "rank3_gghz_slice" => rank3_gghz_slice(
                required(f.alpha, name, "alpha")?,
                required(f.r, name, "r")?,
            ),
            "rank3_ghz_d1_dn1" => rank3_ghz_d1_dn1(required(f.n, name, "n")?),
            "rank5_five_qubit" => rank5_five_qubit(),
            "zeta_slice" => zeta_slice(),
            "qudit_sectors" => qudit_sectors(&required(f.dims, name, "dims")?),
            other => Err(GgmError::InvalidSpec(format!(
                "field `family`: unknown family `{other}`"
            ))),
        }
    } else if obj.contains_key("group") {
        let f: CustomFamily =
            serde_json::from_value(doc).map_err(|e| GgmError::InvalidSpec(e.to_string()))?;
        let basis = f
            .basis
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                state_from_value(v)
                    .map_err(|e| GgmError::InvalidSpec(format!("field `basis[{i}]`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let shape = basis
            .first()
            .ok_or_else(|| GgmError::InvalidSpec("field `basis` is empty".into()))?
            .shape()
            .clone();
        let group = group_spec_from_value(f.group)
            .and_then(|g| g.build(Some(&shape)))
            .map_err(|e| GgmError::InvalidSpec(format!("field `group`: {e}")))?;
        TwirledFamily::new(
            f.name.unwrap_or_else(|| "custom".into()),
            group,
            basis,
            f.mixing,
            f.params,
        )
    } else {
        Err(GgmError::InvalidSpec(
            "expected a `family` or a `group` field".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_families_construct() {
        rank2_parity(4).unwrap();
        ghz_mixture(3).unwrap();
        rank3_ghz_w().unwrap();
        rank3_gghz(0.55).unwrap();
        rank3_gghz_slice(0.55, 0.96).unwrap();
        rank3_ghz_d1_dn1(5).unwrap();
        rank5_five_qubit().unwrap();
        zeta_slice().unwrap();
        let q = qudit_sectors(&[3, 3, 3]).unwrap();
        assert_eq!(q.param_dim(), 2);
    }

    #[test]
    fn order_three_group_fails_for_five_qubit_ghz() {
        // diag(1, e^{2πi/3})^⊗5 does not fix GHZ₅⁺
        let basis = vec![ghz(5, 2, 1).unwrap(), dicke(5, 1).unwrap(), dicke(5, 4).unwrap()];
        let group = builtin_group(GroupKind::Omega { order: Some(3) }, basis[0].shape()).unwrap();
        let r = TwirledFamily::new("bad", group, basis, identity_mixing(3), names(&["x1", "x2"]));
        assert!(matches!(r, Err(GgmError::NotInvariant(_))));
    }

    #[test]
    fn broken_preimage_rejected() {
        // the mixture is invariant, but phased superpositions of ζ states do
        // not twirl back under the parity group (ζ₁ and ζ₄ share a parity sector)
        let basis: Vec<_> = (1..=4).map(|i| zeta(i).unwrap()).collect();
        let group = builtin_group(GroupKind::Parity, basis[0].shape()).unwrap();
        let r = TwirledFamily::new("bad", group, basis, identity_mixing(4), names(&["a", "b", "c"]));
        assert!(r.is_err(), "{r:?}");
    }

    #[test]
    fn json_families() {
        let f = parse_family_spec(r#"{"family": "rank2_parity", "n": 3}"#).unwrap();
        assert_eq!(f.param_dim(), 1);
        let err = parse_family_spec(r#"{"family": "rank3_gghz"}"#).unwrap_err();
        assert!(err.to_string().contains("alpha"), "{err}");
        let custom = r#"{
            "group": {"kind": "parity"},
            "basis": [
                {"constructor": "sector", "args": {"dims": [2,2,2], "k": 0}},
                {"constructor": "sector", "args": {"dims": [2,2,2], "k": 1}}
            ],
            "mixing": [[1, 0], [0, 1]],
            "params": ["x"]
        }"#;
        let f = parse_family_spec(custom).unwrap();
        assert_eq!(f.rank(), 2);
        let err = parse_family_spec(r#"{"family": "tetrahedron"}"#).unwrap_err();
        assert!(err.to_string().contains("family"), "{err}");
    }
}
