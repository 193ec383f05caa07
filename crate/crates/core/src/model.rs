//! Parametric mass-spring models.
//!
//! A model is a list of lumped masses and a list of springs. Each spring
//! either has a fixed stiffness or takes its stiffness from an entry of the
//! updating-parameter vector θ. Ground is a fixed node outside the degrees
//! of freedom.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{generalized_eig, ModalSolution, SymmetricMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Ground,
    Node(usize),
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Ground => f.write_str("ground"),
            Endpoint::Node(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StiffnessSource {
    /// Fixed stiffness in N/m.
    Fixed(f64),
    /// Index into θ.
    Parameter(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpring", into = "RawSpring")]
pub struct SpringElement {
    pub id: String,
    pub a: Endpoint,
    pub b: Endpoint,
    pub stiffness: StiffnessSource,
}

impl SpringElement {
    pub fn new(id: impl Into<String>, a: Endpoint, b: Endpoint, stiffness: StiffnessSource) -> Result<Self> {
        let id = id.into();
        match (a, b) {
            (Endpoint::Ground, Endpoint::Ground) => {
                return Err(Error::Model(format!("spring {id}: both endpoints are ground")))
            }
            (Endpoint::Node(i), Endpoint::Node(j)) if i == j => {
                return Err(Error::Model(format!("spring {id}: both endpoints are node {i}")))
            }
            _ => {}
        }
        if let StiffnessSource::Fixed(k) = stiffness {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::Model(format!("spring {id}: fixed stiffness must be positive, got {k}")));
            }
        }
        Ok(Self { id, a, b, stiffness })
    }

    pub fn fixed(id: &str, a: Endpoint, b: Endpoint, k: f64) -> Result<Self> {
        Self::new(id, a, b, StiffnessSource::Fixed(k))
    }

    pub fn parameter(id: &str, a: Endpoint, b: Endpoint, index: usize) -> Result<Self> {
        Self::new(id, a, b, StiffnessSource::Parameter(index))
    }

    fn value(&self, theta: &[f64]) -> f64 {
        match self.stiffness {
            StiffnessSource::Fixed(k) => k,
            StiffnessSource::Parameter(i) => theta[i],
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
enum EndpointRepr {
    Index(i64),
    Token(String),
}

impl TryFrom<EndpointRepr> for Endpoint {
    type Error = String;

    fn try_from(e: EndpointRepr) -> std::result::Result<Self, Self::Error> {
        match e {
            EndpointRepr::Index(-1) => Ok(Endpoint::Ground),
            EndpointRepr::Index(i) if i >= 0 => Ok(Endpoint::Node(i as usize)),
            EndpointRepr::Token(t) if t.eq_ignore_ascii_case("ground") => Ok(Endpoint::Ground),
            EndpointRepr::Index(i) => Err(format!("invalid endpoint {i}: use a node index >= 0, -1 or \"ground\"")),
            EndpointRepr::Token(t) => Err(format!("invalid endpoint {t:?}: use a node index >= 0, -1 or \"ground\"")),
        }
    }
}

impl From<Endpoint> for EndpointRepr {
    fn from(e: Endpoint) -> Self {
        match e {
            Endpoint::Ground => EndpointRepr::Token("ground".into()),
            Endpoint::Node(i) => EndpointRepr::Index(i as i64),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawSpring {
    id: String,
    a: EndpointRepr,
    b: EndpointRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stiffness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    param_index: Option<usize>,
}

impl TryFrom<RawSpring> for SpringElement {
    type Error = String;

    fn try_from(raw: RawSpring) -> std::result::Result<Self, Self::Error> {
        let a = Endpoint::try_from(raw.a).map_err(|e| format!("spring {}: {e}", raw.id))?;
        let b = Endpoint::try_from(raw.b).map_err(|e| format!("spring {}: {e}", raw.id))?;
        let source = match (raw.stiffness, raw.param_index) {
            (Some(k), None) => StiffnessSource::Fixed(k),
            (None, Some(i)) => StiffnessSource::Parameter(i),
            _ => {
                return Err(format!(
                    "spring {}: exactly one of \"stiffness\" or \"param_index\" is required",
                    raw.id
                ))
            }
        };
        SpringElement::new(raw.id, a, b, source).map_err(|e| e.to_string())
    }
}

impl From<SpringElement> for RawSpring {
    fn from(s: SpringElement) -> Self {
        let (stiffness, param_index) = match s.stiffness {
            StiffnessSource::Fixed(k) => (Some(k), None),
            StiffnessSource::Parameter(i) => (None, Some(i)),
        };
        RawSpring {
            id: s.id,
            a: s.a.into(),
            b: s.b.into(),
            stiffness,
            param_index,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    masses: Vec<f64>,
    springs: Vec<SpringElement>,
}

/// Lumped-mass spring structure with stiffness-only uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct StructuralModel {
    masses: Vec<f64>,
    springs: Vec<SpringElement>,
    parameter_count: usize,
}

impl TryFrom<RawModel> for StructuralModel {
    type Error = String;

    fn try_from(raw: RawModel) -> std::result::Result<Self, Self::Error> {
        StructuralModel::new(raw.masses, raw.springs).map_err(|e| e.to_string())
    }
}

impl From<StructuralModel> for RawModel {
    fn from(m: StructuralModel) -> Self {
        RawModel {
            masses: m.masses,
            springs: m.springs,
        }
    }
}

impl StructuralModel {
    /// Validates a model; the parameter count is one past the largest
    /// referenced parameter index, and every index below it must be used.
    pub fn new(masses: Vec<f64>, springs: Vec<SpringElement>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::Model("at least one mass is required".into()));
        }
        for (i, &m) in masses.iter().enumerate() {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::Model(format!("mass {i} must be positive, got {m}")));
            }
        }
        let n = masses.len();
        let mut parameter_count = 0;
        for s in &springs {
            for e in [s.a, s.b] {
                if let Endpoint::Node(i) = e {
                    if i >= n {
                        return Err(Error::Model(format!(
                            "spring {}: node {i} out of range (model has {n} masses)",
                            s.id
                        )));
                    }
                }
            }
            if let StiffnessSource::Parameter(p) = s.stiffness {
                parameter_count = parameter_count.max(p + 1);
            }
        }
        for p in 0..parameter_count {
            let used = springs
                .iter()
                .any(|s| s.stiffness == StiffnessSource::Parameter(p));
            if !used {
                return Err(Error::Model(format!("updating parameter {p} is not referenced by any spring")));
            }
        }
        Ok(Self {
            masses,
            springs,
            parameter_count,
        })
    }

    /// Five masses and ten springs; k1, k2, k4, k6 and k8 are the updating
    /// parameters θ1..θ5.
    pub fn default_five_dof() -> Self {
        use Endpoint::{Ground, Node};
        let springs = [
            SpringElement::parameter("k1", Ground, Node(0), 0),
            SpringElement::parameter("k2", Node(0), Node(1), 1),
            SpringElement::fixed("k3", Node(1), Node(2), 3200.0),
            SpringElement::parameter("k4", Node(2), Node(3), 2),
            SpringElement::fixed("k5", Node(3), Node(4), 1840.0),
            SpringElement::parameter("k6", Ground, Node(4), 3),
            SpringElement::fixed("k7", Node(0), Node(2), 2200.0),
            SpringElement::parameter("k8", Node(1), Node(3), 4),
            SpringElement::fixed("k9", Node(2), Node(4), 2800.0),
            SpringElement::fixed("k10", Node(0), Node(3), 2000.0),
        ]
        .into_iter()
        .collect::<Result<Vec<_>>>()
        .expect("default springs are valid");
        Self::new(vec![27.0, 27.0, 71.0, 53.0, 29.0], springs).expect("default model is valid")
    }

    pub fn dof(&self) -> usize {
        self.masses.len()
    }

    pub fn parameter_count(&self) -> usize {
        self.parameter_count
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn springs(&self) -> &[SpringElement] {
        &self.springs
    }

    /// Ids of the springs driven by each parameter, e.g. `["k1", "k2", ...]`.
    pub fn parameter_labels(&self) -> Vec<String> {
        (0..self.parameter_count)
            .map(|p| {
                self.springs
                    .iter()
                    .filter(|s| s.stiffness == StiffnessSource::Parameter(p))
                    .map(|s| s.id.as_str())
                    .collect::<Vec<_>>()
                    .join("+")
            })
            .collect()
    }

    /// Returns a model with parameter `index` replaced by a fixed stiffness;
    /// higher parameter indices shift down by one.
    pub fn freeze_parameter(&self, index: usize, value: f64) -> Result<Self> {
        if index >= self.parameter_count {
            return Err(Error::Domain(format!(
                "parameter {index} out of range (model has {})",
                self.parameter_count
            )));
        }
        let springs = self
            .springs
            .iter()
            .map(|s| {
                let stiffness = match s.stiffness {
                    StiffnessSource::Parameter(p) if p == index => StiffnessSource::Fixed(value),
                    StiffnessSource::Parameter(p) if p > index => StiffnessSource::Parameter(p - 1),
                    other => other,
                };
                SpringElement::new(s.id.clone(), s.a, s.b, stiffness)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.masses.clone(), springs)
    }

    pub fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.parameter_count {
            return Err(Error::shape("theta", self.parameter_count, theta.len()));
        }
        if let Some((i, v)) = theta.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::Domain(format!("theta[{i}] must be positive and finite, got {v}")));
        }
        Ok(())
    }

    pub fn mass_matrix(&self) -> SymmetricMatrix {
        SymmetricMatrix::from_diagonal(&self.masses).expect("model has at least one mass")
    }

    /// Stiffness matrix by spring superposition.
    pub fn stiffness_matrix(&self, theta: &[f64]) -> Result<SymmetricMatrix> {
        self.check_theta(theta)?;
        let mut k = SymmetricMatrix::zeros(self.dof())?;
        for s in &self.springs {
            let v = s.value(theta);
            match (s.a, s.b) {
                (Endpoint::Node(i), Endpoint::Node(j)) => {
                    k.add_symmetric(i, i, v);
                    k.add_symmetric(j, j, v);
                    k.add_symmetric(i, j, -v);
                }
                (Endpoint::Node(i), Endpoint::Ground) | (Endpoint::Ground, Endpoint::Node(i)) => {
                    k.add_symmetric(i, i, v);
                }
                (Endpoint::Ground, Endpoint::Ground) => unreachable!("rejected at construction"),
            }
        }
        Ok(k)
    }

    pub fn assemble(&self, theta: &[f64]) -> Result<(SymmetricMatrix, SymmetricMatrix)> {
        Ok((self.stiffness_matrix(theta)?, self.mass_matrix()))
    }

    pub fn modal(&self, theta: &[f64]) -> Result<ModalSolution> {
        let (k, m) = self.assemble(theta)?;
        Ok(generalized_eig(&k, &m)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Endpoint::{Ground, Node};

    fn single_mass() -> StructuralModel {
        StructuralModel::new(vec![1.0], vec![SpringElement::parameter("k1", Ground, Node(0), 0).unwrap()]).unwrap()
    }

    pub(crate) fn two_dof_chain() -> StructuralModel {
        StructuralModel::new(
            vec![1.0, 1.0],
            vec![
                SpringElement::parameter("k1", Ground, Node(0), 0).unwrap(),
                SpringElement::parameter("k2", Node(0), Node(1), 1).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_mass_assembly_and_modes() {
        let m = single_mass();
        let (k, mm) = m.assemble(&[5.0]).unwrap();
        assert_eq!(k.rows(), vec![vec![5.0]]);
        assert_eq!(mm.rows(), vec![vec![1.0]]);
        assert_eq!(m.modal(&[5.0]).unwrap().eigenvalues(), &[5.0]);
    }

    #[test]
    fn two_dof_chain_superposition() {
        let m = two_dof_chain();
        let (k, _) = m.assemble(&[1.0, 1.0]).unwrap();
        assert_eq!(k.rows(), vec![vec![2.0, -1.0], vec![-1.0, 1.0]]);
        let sol = m.modal(&[1.0, 1.0]).unwrap();
        let disc = 5.0f64.sqrt();
        assert!((sol.eigenvalue(0) - (3.0 - disc) / 2.0).abs() < 1e-14);
        assert!((sol.eigenvalue(1) - (3.0 + disc) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn theta_validation() {
        let m = two_dof_chain();
        assert!(matches!(m.assemble(&[1.0]), Err(Error::Shape(_))));
        assert!(matches!(m.assemble(&[1.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(m.assemble(&[1.0, -2.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn model_validation() {
        assert!(SpringElement::fixed("k", Ground, Ground, 1.0).is_err());
        assert!(SpringElement::fixed("k", Node(1), Node(1), 1.0).is_err());
        assert!(SpringElement::fixed("k", Node(0), Ground, 0.0).is_err());
        let gap = StructuralModel::new(
            vec![1.0],
            vec![SpringElement::parameter("k", Ground, Node(0), 1).unwrap()],
        );
        assert!(matches!(gap, Err(Error::Model(_))));
        let out_of_range = StructuralModel::new(
            vec![1.0],
            vec![SpringElement::fixed("k", Ground, Node(3), 1.0).unwrap()],
        );
        assert!(out_of_range.is_err());
        assert!(StructuralModel::new(vec![1.0, -1.0], vec![]).is_err());
    }

    #[test]
    fn default_model_shape() {
        let m = StructuralModel::default_five_dof();
        assert_eq!(m.dof(), 5);
        assert_eq!(m.parameter_count(), 5);
        assert_eq!(m.springs().len(), 10);
        assert_eq!(m.parameter_labels(), vec!["k1", "k2", "k4", "k6", "k8"]);
    }

    #[test]
    fn freeze_parameter_renumbers() {
        let m = StructuralModel::default_five_dof();
        let frozen = m.freeze_parameter(1, 2200.0).unwrap();
        assert_eq!(frozen.parameter_count(), 4);
        assert_eq!(frozen.parameter_labels(), vec!["k1", "k4", "k6", "k8"]);
        let full = m.stiffness_matrix(&[4000.0, 2200.0, 2120.0, 2600.0, 2400.0]).unwrap();
        let reduced = frozen.stiffness_matrix(&[4000.0, 2120.0, 2600.0, 2400.0]).unwrap();
        assert_eq!(full, reduced);
    }

    #[test]
    fn model_file_parsing() {
        let text = r#"{
            "masses": [1.0, 2.0],
            "springs": [
                {"id": "k1", "a": "ground", "b": 0, "param_index": 0},
                {"id": "k2", "a": 0, "b": 1, "stiffness": 3.0},
                {"id": "k3", "a": 1, "b": -1, "param_index": 1}
            ]
        }"#;
        let m: StructuralModel = serde_json::from_str(text).unwrap();
        assert_eq!(m.parameter_count(), 2);
        let (k, _) = m.assemble(&[1.0, 2.0]).unwrap();
        assert_eq!(k.rows(), vec![vec![4.0, -3.0], vec![-3.0, 5.0]]);

        let back: StructuralModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn model_file_errors_carry_line_numbers() {
        let text = "{\n \"masses\": [1.0],\n \"springs\": [\n  {\"id\": \"k1\", \"a\": \"ground\", \"b\": \"ground\", \"stiffness\": 1.0}\n ]\n}";
        let err = serde_json::from_str::<StructuralModel>(text).unwrap_err();
        // serde_json reports the position where the enclosing array closes.
        assert_eq!(err.line(), 5, "{err}");
        assert!(err.to_string().contains("k1"));

        let both = "{\"masses\": [1.0], \"springs\": [{\"id\": \"k1\", \"a\": -1, \"b\": 0, \"stiffness\": 1.0, \"param_index\": 0}]}";
        assert!(serde_json::from_str::<StructuralModel>(both).is_err());
        let bad_token = "{\"masses\": [1.0], \"springs\": [{\"id\": \"k1\", \"a\": \"wall\", \"b\": 0, \"stiffness\": 1.0}]}";
        assert!(serde_json::from_str::<StructuralModel>(bad_token).is_err());
    }
}
