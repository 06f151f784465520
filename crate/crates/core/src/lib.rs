//! Optimal purification fidelities of noisy quantum states under free
//! operations of magic resource theories.
//!
//! The crate assembles the semidefinite programs that bound how well `n`
//! depolarized copies of an unknown pure state can be purified by
//!
//! * completely positive trace-non-increasing maps ([`OperationClass::Cptn`]),
//! * completely positive Wigner-preserving maps on odd prime qudits
//!   ([`OperationClass::Cpwp`]),
//! * completely stabilizer-preserving operations on qubits
//!   ([`OperationClass::Cspo`]),
//!
//! solves them with a built-in primal–dual interior-point method, and checks
//! the analytic dual certificates showing that the restricted classes cannot
//! beat the unpurified fidelity for Haar-random inputs.
//!
//! ```no_run
//! use magic_purify::{solve_fidelity, Ensemble, OperationClass, PurificationInstance};
//!
//! let inst = PurificationInstance::new(2, 2, 0.5, 1.0, Ensemble::haar(2), OperationClass::Cspo)?;
//! let (fidelity, report) = solve_fidelity(&inst)?;
//! assert!((fidelity - 0.75).abs() < 1e-6, "{report:?}");
//! # Ok::<(), magic_purify::Error>(())
//! ```

pub mod certificates;
pub mod cli;
pub mod error;
pub mod matops;
pub mod phase_space;
pub mod purification;
pub mod sdp;
pub mod stabilizer;

pub use error::{Error, Result};
pub use matops::{CMat, HermitianOperator, SitePermutation};
pub use purification::{Ensemble, OperationClass, PurificationInstance, QrPair};
pub use sdp::{solve_fidelity, SolveReport, SolveStatus};
