//! Fuzzy measured modal data and its α-cuts.
//!
//! Each mode carries a triangular fuzzy number for its natural frequency
//! (Hz) or eigenvalue (rad²/s²), and optionally a fuzzy mode shape. A fuzzy
//! mode shape stores the peak vector and the lower- and upper-branch
//! vectors at α = 0; intermediate levels interpolate linearly, the same way
//! a triangular number's cut bounds move with α.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{AlphaCutStack, Interval, TriangularFuzzyNumber};
use crate::linalg::{eigenvalue_to_hz, hz_to_eigenvalue};
use crate::objective::{MeasuredModalIntervals, MeasuredMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueUnit {
    /// Natural frequency `f = √λ / 2π`.
    #[default]
    Hz,
    /// Eigenvalue `λ = ω²` in rad²/s².
    Eigenvalue,
}

impl ValueUnit {
    pub fn to_eigenvalue(self, v: f64) -> f64 {
        match self {
            ValueUnit::Hz => hz_to_eigenvalue(v),
            ValueUnit::Eigenvalue => v,
        }
    }

    pub fn from_eigenvalue(self, lambda: f64) -> f64 {
        match self {
            ValueUnit::Hz => eigenvalue_to_hz(lambda),
            ValueUnit::Eigenvalue => lambda,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuzzyShape {
    pub peak: Vec<f64>,
    /// Lower-branch mode shape at α = 0; defaults to `peak`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
}

impl FuzzyShape {
    pub fn crisp(peak: Vec<f64>) -> Self {
        Self {
            peak,
            lower: None,
            upper: None,
        }
    }

    fn branch_at(&self, branch: Option<&Vec<f64>>, alpha: f64) -> Vec<f64> {
        match branch {
            None => self.peak.clone(),
            Some(b) => self
                .peak
                .iter()
                .zip(b)
                .map(|(p, e)| p + (1.0 - alpha) * (e - p))
                .collect(),
        }
    }

    pub fn cut(&self, alpha: f64) -> (Vec<f64>, Vec<f64>) {
        (
            self.branch_at(self.lower.as_ref(), alpha),
            self.branch_at(self.upper.as_ref(), alpha),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuzzyMode {
    /// Triangular number `[a, b, c]` in the data set's unit.
    pub value: TriangularFuzzyNumber,
    /// Informational: the value has no spread.
    #[serde(default)]
    pub crisp: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<FuzzyShape>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuzzyModalData {
    #[serde(default)]
    pub unit: ValueUnit,
    pub modes: Vec<FuzzyMode>,
}

impl FuzzyModalData {
    pub fn validate(&self) -> Result<()> {
        if self.modes.is_empty() {
            return Err(Error::Config("measured data contain no modes".into()));
        }
        let mut last_center = f64::NEG_INFINITY;
        for (j, m) in self.modes.iter().enumerate() {
            if !(m.value.left() > 0.0) {
                return Err(Error::Domain(format!(
                    "mode {}: measured values must be positive, got {:?}",
                    j + 1,
                    m.value
                )));
            }
            if m.value.peak() < last_center {
                return Err(Error::Config(format!("mode {}: peaks must be in ascending order", j + 1)));
            }
            last_center = m.value.peak();
            if let Some(s) = &m.shape {
                for b in [&s.lower, &s.upper].into_iter().flatten() {
                    if b.len() != s.peak.len() {
                        return Err(Error::shape("mode shape branch", s.peak.len(), b.len()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn is_crisp(&self) -> bool {
        self.modes.iter().all(|m| m.value.is_crisp())
    }

    /// Measured intervals at level `alpha`, with values in rad²/s².
    pub fn cut(&self, alpha: f64) -> Result<MeasuredModalIntervals> {
        let modes = self
            .modes
            .iter()
            .map(|m| {
                let iv = m.value.alpha_cut(alpha)?;
                let eigenvalue = Interval::new(self.unit.to_eigenvalue(iv.lo), self.unit.to_eigenvalue(iv.hi))?;
                let (shape_lower, shape_upper) = match &m.shape {
                    Some(s) => {
                        let (lo, hi) = s.cut(alpha);
                        (Some(lo), Some(hi))
                    }
                    None => (None, None),
                };
                Ok(MeasuredMode {
                    eigenvalue,
                    shape_lower,
                    shape_upper,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MeasuredModalIntervals { modes })
    }

    /// Peak eigenvalues in rad²/s².
    pub fn center_eigenvalues(&self) -> Vec<f64> {
        self.modes.iter().map(|m| self.unit.to_eigenvalue(m.value.peak())).collect()
    }

    pub fn center_frequencies_hz(&self) -> Vec<f64> {
        self.center_eigenvalues().into_iter().map(eigenvalue_to_hz).collect()
    }

    /// α-cut stack of mode `j` in Hz.
    pub fn frequency_stack(&self, mode: usize, levels: &[f64]) -> Result<AlphaCutStack> {
        let unit = self.unit;
        let native = self.modes[mode].value.to_stack(levels)?;
        Ok(native.map_monotone(|v| eigenvalue_to_hz(unit.to_eigenvalue(v)))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cut_converts_units() {
        let data = FuzzyModalData {
            unit: ValueUnit::Hz,
            modes: vec![FuzzyMode {
                value: TriangularFuzzyNumber::new(1.0, 2.0, 4.0).unwrap(),
                crisp: false,
                shape: None,
            }],
        };
        let m = data.cut(0.5).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        assert!((m.modes[0].eigenvalue.lo - (1.5 * two_pi).powi(2)).abs() < 1e-9);
        assert!((m.modes[0].eigenvalue.hi - (3.0 * two_pi).powi(2)).abs() < 1e-9);
        assert!(m.modes[0].shape_lower.is_none());
        let s = data.frequency_stack(0, &[1.0, 0.0]).unwrap();
        assert!((s.support().hi - 4.0).abs() < 1e-12);
    }

    #[test]
    fn shape_branches_interpolate() {
        let s = FuzzyShape {
            peak: vec![1.0, 0.0],
            lower: Some(vec![0.0, 1.0]),
            upper: None,
        };
        assert_eq!(s.cut(1.0), (vec![1.0, 0.0], vec![1.0, 0.0]));
        assert_eq!(s.cut(0.0).0, vec![0.0, 1.0]);
        assert_eq!(s.cut(0.5).0, vec![0.5, 0.5]);
    }

    #[test]
    fn validation() {
        let bad = FuzzyModalData {
            unit: ValueUnit::Eigenvalue,
            modes: vec![FuzzyMode {
                value: TriangularFuzzyNumber::new(0.0, 1.0, 2.0).unwrap(),
                crisp: false,
                shape: None,
            }],
        };
        assert!(bad.validate().is_err());
        let json = r#"{"unit": "eigenvalue", "modes": [{"value": [1, 2, 3]}, {"value": [4, 5, 6], "shape": {"peak": [1, 0]}}]}"#;
        let data: FuzzyModalData = serde_json::from_str(json).unwrap();
        data.validate().unwrap();
        assert_eq!(data.center_eigenvalues(), vec![2.0, 5.0]);
    }
}
