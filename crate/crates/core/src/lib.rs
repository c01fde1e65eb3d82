//! Squared distance matrices of trees whose edges carry positive definite
//! matrix weights.
//!
//! The crate builds the distance, squared distance, Laplacian, incidence and
//! edge orientation matrices of a [`WeightedTree`], evaluates closed forms
//! for `det Δ` and `Δ⁻¹`, and checks them and the supporting identities
//! against an LU oracle ([`verify`], [`fuzz`]).
//!
//! ```
//! let t = sqdist::golden::t1();
//! let det = sqdist::det_formula(&t).unwrap();
//! assert!((det.value - 102400.0).abs() < 1e-6);
//! ```

pub mod error;
pub mod formulas;
pub mod fuzz;
pub mod golden;
pub mod io;
pub mod linalg;
pub mod matrices;
pub mod random;
pub mod tree;
pub mod verify;

pub use error::{Error, Result};
pub use formulas::{beta, det_formula, eta, inverse_formula, DetBranch, DetResult, Factor, InverseResult};
pub use fuzz::{fuzz, replay, trial_instance, FuzzConfig, FuzzReport};
pub use io::{parse_tree_file, write_tree_file, TreeFile};
pub use linalg::{kron, lu_det, lu_inverse, schur_det, BlockIndex, DenseMatrix, LogDet};
pub use matrices::TreeMatrices;
pub use random::{random_tree, random_weights, TopologyKind, WeightMode};
pub use tree::{DegreeProfile, RawEdge, WeightedTree};
pub use verify::{run_all, Identity, ResidualReport, Tolerances, Verdict, WeightRegime};
