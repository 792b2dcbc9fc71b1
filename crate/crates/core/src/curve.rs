//! Sampled space curves `χ(t, ·)` with their unit tangents.

use serde::{Deserialize, Serialize};

use crate::frame::{norm, sub, Vec3};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub t: f64,
    pub x: Vec<f64>,
    pub chi: Vec<Vec3>,
    pub tangent: Vec<Vec3>,
}

impl Curve {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `sup_j |χ_j − other_j|` on a shared abscissa.
    pub fn sup_distance(&self, other: &Curve) -> f64 {
        assert_eq!(self.len(), other.len());
        self.chi.iter().zip(&other.chi).map(|(a, b)| norm(sub(*a, *b))).fold(0.0, f64::max)
    }

    /// Largest `| |χ_x| − 1 |` from centered differences.
    pub fn arclength_defect(&self) -> f64 {
        (1..self.len().saturating_sub(1))
            .map(|j| {
                let d = sub(self.chi[j + 1], self.chi[j - 1]);
                (norm(d) / (self.x[j + 1] - self.x[j - 1]) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}
