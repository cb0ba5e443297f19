//! Neural-network PDE solving with the Deep Fourier Residual loss.
//!
//! A network `ũ` is composed with a cutoff so that `u = φ₁ ũ + φ₂` satisfies
//! the Dirichlet data. The weak residual of `u` is tested against the
//! sine/cosine eigenbasis of the box, computed with midpoint-sampled DST/DCT,
//! and the eigenvalue-weighted sum of its squared coefficients is minimised
//! with Adam.

pub mod basis;
pub mod dual;
pub mod error;
pub mod field;
pub mod losses;
pub mod metrics;
pub mod network;
pub mod problems;
pub mod scalar;
pub mod tape;
pub mod training;
pub mod transforms;

pub use basis::{make_basis_1d, Basis1D, BasisND, DirichletMask1D};
pub use error::{DfrError, Result};
pub use field::{AnalyticField, BoxDomain, ScalarFn};
pub use losses::{collocation_loss, residual_spectrum, LossAssembler, LossKind, ResidualSpectrum};
pub use metrics::{h1_relative_error, l2_relative_error, loss_error_correlation, ErrorEvaluator, ErrorReport};
pub use network::{init_network, Architecture, Candidate, CutoffSpec, DerivativeOrder, Network, NetworkCandidate};
pub use problems::{all_problems, problem_by_name, ProblemSpec, PROBLEM_NAMES};
pub use scalar::{Real, Scalar};
pub use tape::{Tape, Tensor, Var};
pub use training::{initial_record, train, train_network, TrainConfig, TrainOutcome, Trainer, TrainingRecord};
pub use transforms::{TransformKind, TransformPlan};

pub type Network64 = Network<f64>;
pub type Problem64 = ProblemSpec<f64>;
pub type Outcome64 = TrainOutcome<f64>;

/// Sizes the global worker pool. Fails once the pool has started.
pub fn init_thread_pool(threads: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| DfrError::Configuration(e.to_string()))
}
