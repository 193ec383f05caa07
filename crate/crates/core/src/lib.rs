//! Fuzzy finite element model updating for mass-spring structures.
//!
//! Uncertain stiffness parameters are identified as triangular fuzzy
//! numbers from fuzzy modal measurements. Each α-cut level becomes an
//! interval optimization problem solved with ACO_R or particle swarm
//! optimization; a Metropolis-Hastings sampler provides a probabilistic
//! baseline on the same model.
//!
//! ```
//! use ffemu_core::model::StructuralModel;
//!
//! let model = StructuralModel::default_five_dof();
//! let modes = model.modal(&[4000.0, 2200.0, 2120.0, 2600.0, 2400.0]).unwrap();
//! assert_eq!(modes.mode_count(), 5);
//! ```

pub mod bayes;
mod error;
pub mod fuzzy;
pub mod linalg;
pub mod measurement;
pub mod model;
pub mod objective;
pub mod optim;
pub mod pipeline;
pub mod scenario;

pub use error::{Error, Result};
