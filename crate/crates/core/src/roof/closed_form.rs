//! Printed closed-form GGM expressions for four mixed families, used as
//! cross-checks against the numerical pipeline.

use serde::Serialize;

use crate::error::{GgmError, Result};

/// Slack allowed when checking that parameters lie in the closed simplex.
const SIMPLEX_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    /// x|even⟩⟨even| + (1−x)|odd⟩⟨odd| over N qubits; one parameter.
    Rank2Sym,
    /// x₁ GHZ₃⁺ + x₂ W + x₃ W̄; two parameters.
    Rank3GhzW,
    /// x₁ GHZ₅⁺ + x₂/2 (D¹+D²) + x₃/2 (D³+D⁴); two parameters.
    Rank5FiveQubit,
    /// Three-qutrit charge sectors with weights x₁, x₂, x₃; two parameters.
    Qutrit,
}

impl ClosedForm {
    pub fn param_dim(self) -> usize {
        match self {
            ClosedForm::Rank2Sym => 1,
            _ => 2,
        }
    }
}

pub fn closed_form(id: ClosedForm, params: &[f64]) -> Result<f64> {
    if params.len() != id.param_dim() {
        return Err(GgmError::InvalidArgument {
            name: "params",
            reason: format!("{id:?} takes {} parameters, got {}", id.param_dim(), params.len()),
        });
    }
    let sum: f64 = params.iter().sum();
    if params.iter().any(|&p| p < -SIMPLEX_SLACK || !p.is_finite()) || sum > 1.0 + SIMPLEX_SLACK {
        return Err(GgmError::OutsideSimplex(params.to_vec()));
    }
    // clamp rounding noise so the square roots stay real
    let p: Vec<f64> = params.iter().map(|&v| v.clamp(0.0, 1.0)).collect();
    let rest = (1.0 - p.iter().sum::<f64>()).max(0.0);
    Ok(match id {
        ClosedForm::Rank2Sym => rank2_sym(p[0]),
        ClosedForm::Rank3GhzW => rank3_ghz_w(p[0], p[1], rest),
        ClosedForm::Rank5FiveQubit => rank5_five_qubit(p[0], p[1], rest),
        ClosedForm::Qutrit => qutrit(p[0], p[1], rest),
    })
}

fn rank2_sym(x: f64) -> f64 {
    0.5 * (1.0 - 2.0 * x.sqrt() * (1.0 - x).sqrt())
}

fn rank3_ghz_w(x1: f64, x2: f64, x3: f64) -> f64 {
    let s23 = (x2 * x3).sqrt();
    let radicand = 1.0 - 5.0 * x1 * x1 - 12.0 * x2 * (x2 - 1.0)
        + 8.0 * (6.0 * x1 * x2).sqrt() * (1.0 + s23 - x1 - x2)
        + 4.0 * x1 * (1.0 + 3.0 * s23 - 3.0 * x2);
    (3.0 - radicand.max(0.0).sqrt()) / 6.0
}

fn rank5_five_qubit(x1: f64, x2: f64, x3: f64) -> f64 {
    let a = (2.0 * x1 + 4.0 * x2 + 3.0) / 10.0 * (7.0 - 2.0 * x1 - 4.0 * x2) / 10.0;
    let r2 = std::f64::consts::SQRT_2;
    let b = (x1 * x2 / 20.0).sqrt()
        + (x1 * x3 / 20.0).sqrt()
        + 2.0 * x2 / (5.0 * r2)
        + 2.0 * x3 / (5.0 * r2)
        + 0.3 * (x2 * x3).sqrt();
    let inner = 1.0 - 4.0 * (a - b * b);
    0.5 * (1.0 - inner.max(0.0).sqrt())
}

fn qutrit(x1: f64, x2: f64, x3: f64) -> f64 {
    2.0 / 3.0 * (1.0 - (x1 * x2).sqrt() - (x1 * x3).sqrt() - (x2 * x3).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_values() {
        assert!(closed_form(ClosedForm::Rank2Sym, &[0.5]).unwrap().abs() < 1e-15);
        assert!((closed_form(ClosedForm::Rank2Sym, &[0.3]).unwrap() - 0.041_742).abs() < 1e-6);
        let g = |p: [f64; 2]| closed_form(ClosedForm::Rank3GhzW, &p).unwrap();
        assert!((g([1.0, 0.0]) - 0.5).abs() < 1e-12);
        assert!((g([0.0, 1.0]) - 1.0 / 3.0).abs() < 1e-12);
        assert!((g([0.0, 0.0]) - 1.0 / 3.0).abs() < 1e-12);
        let r5 = closed_form(ClosedForm::Rank5FiveQubit, &[1.0, 0.0]).unwrap();
        assert!((r5 - 0.5).abs() < 1e-12);
        let q = |p: [f64; 2]| closed_form(ClosedForm::Qutrit, &p).unwrap();
        assert!(q([1.0 / 3.0, 1.0 / 3.0]).abs() < 1e-12);
        assert!((q([1.0, 0.0]) - 2.0 / 3.0).abs() < 1e-12);
        assert!((q([0.0, 0.0]) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_outside_simplex() {
        assert!(closed_form(ClosedForm::Qutrit, &[0.8, 0.3]).is_err());
        assert!(closed_form(ClosedForm::Rank2Sym, &[-0.1]).is_err());
        assert!(closed_form(ClosedForm::Rank2Sym, &[0.1, 0.2]).is_err());
    }
}
