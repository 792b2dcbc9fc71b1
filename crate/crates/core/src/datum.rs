//! Closed-form families for the asymptotic datum `u₊`.

use serde::{Deserialize, Serialize};

use crate::grid::{ComplexField, SpatialGrid};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Family {
    Zero,
    /// `A e^{−(x−x₀)²/σ²}`
    Gaussian { amplitude: f64, width: f64, #[serde(default)] center: f64 },
    /// `A ∂ₓ^k e^{−x²/σ²}`
    GaussianDerivative { amplitude: f64, width: f64, order: u32 },
    /// `A p(x/σ) e^{−x²/σ²}`, `p(y) = Σ c_j y^j`
    GaussianPolynomial { amplitude: f64, width: f64, coefficients: Vec<f64> },
}

/// Physicists' Hermite polynomial `H_k(y)`.
pub fn hermite_h(k: u32, y: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * y);
    if k == 0 {
        return h0;
    }
    for n in 1..k {
        let h2 = 2.0 * y * h1 - 2.0 * n as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

impl Family {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Family::Zero => 0.0,
            Family::Gaussian { amplitude, width, center } => {
                let y = (x - center) / width;
                amplitude * (-y * y).exp()
            }
            Family::GaussianDerivative { amplitude, width, order } => {
                let y = x / width;
                let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
                amplitude * sign * hermite_h(*order, y) * (-y * y).exp() / width.powi(*order as i32)
            }
            Family::GaussianPolynomial { amplitude, width, coefficients } => {
                let y = x / width;
                let p = coefficients.iter().rev().fold(0.0, |acc, c| acc * y + c);
                amplitude * p * (-y * y).exp()
            }
        }
    }

    pub fn sample(&self, grid: SpatialGrid) -> ComplexField {
        ComplexField::from_real_fn(grid, |x| self.value(x))
    }

    /// Gaussian envelope width `σ` (0 for the zero datum).
    pub fn width(&self) -> f64 {
        match self {
            Family::Zero => 0.0,
            Family::Gaussian { width, .. }
            | Family::GaussianDerivative { width, .. }
            | Family::GaussianPolynomial { width, .. } => *width,
        }
    }

    /// Center offset of the envelope.
    pub fn center(&self) -> f64 {
        match self {
            Family::Gaussian { center, .. } => *center,
            _ => 0.0,
        }
    }

    pub fn scaled(&self, s: f64) -> Family {
        match self.clone() {
            Family::Zero => Family::Zero,
            Family::Gaussian { amplitude, width, center } => Family::Gaussian { amplitude: amplitude * s, width, center },
            Family::GaussianDerivative { amplitude, width, order } => {
                Family::GaussianDerivative { amplitude: amplitude * s, width, order }
            }
            Family::GaussianPolynomial { amplitude, width, coefficients } => {
                Family::GaussianPolynomial { amplitude: amplitude * s, width, coefficients }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::passes_zero_mode_rule;

    #[test]
    fn derivative_family_matches_closed_forms() {
        let f = Family::GaussianDerivative { amplitude: 1.0, width: 2.0, order: 2 };
        for x in [-1.3f64, 0.0, 0.7, 3.0] {
            let exact = (4.0 * x * x / 16.0 - 2.0 / 4.0) * (-x * x / 4.0).exp();
            assert!((f.value(x) - exact).abs() < 1e-15);
        }
        let f1 = Family::GaussianDerivative { amplitude: 1.0, width: 1.0, order: 1 };
        assert!((f1.value(0.5) + 2.0 * 0.5 * (-0.25f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn zero_mode_rule_by_family() {
        let g = SpatialGrid::new(40.0, 4096).unwrap();
        assert!(!passes_zero_mode_rule(&Family::Gaussian { amplitude: 1.0, width: 1.0, center: 0.0 }.sample(g)));
        assert!(passes_zero_mode_rule(&Family::GaussianDerivative { amplitude: 1.0, width: 1.0, order: 1 }.sample(g)));
        assert!(passes_zero_mode_rule(&Family::GaussianDerivative { amplitude: 1.0, width: 1.0, order: 2 }.sample(g)));
        let poly = Family::GaussianPolynomial { amplitude: 1.0, width: 1.0, coefficients: vec![-0.5, 0.0, 1.0] };
        assert!(passes_zero_mode_rule(&poly.sample(g)));
    }

    #[test]
    fn family_round_trips_through_toml_shapes() {
        let f: Family = serde_json::from_str(r#"{"family":"gaussian-derivative","amplitude":0.1,"width":2.0,"order":2}"#).unwrap();
        assert_eq!(f, Family::GaussianDerivative { amplitude: 0.1, width: 2.0, order: 2 });
        assert!(serde_json::from_str::<Family>(r#"{"family":"gaussian","amplitude":1,"width":1,"bogus":3}"#).is_err());
    }
}
