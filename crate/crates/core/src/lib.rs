//! Exact rotational averages of odd-rank Cartesian tensors.
//!
//! The average of a rank-`n` molecule-frame tensor over all orientations is
//! expressed in the overcomplete basis of epsilon-delta products. The
//! averaging operator is block diagonal over epsilon triples and every block
//! depends on only a handful of rational coefficients, which
//! [`coefficients::solve_coefficients`] determines exactly from diagonal
//! components. The [`oracle`] module integrates direction-cosine products
//! over Euler angles independently, so every result can be checked.

pub mod averaging;
pub mod coefficients;
pub mod combinatorics;
pub mod error;
pub mod exact;
pub mod oracle;
pub mod selfcheck;
pub mod verify;

pub use averaging::{average_entry, average_tensor, contract_iso, AnyTensor, DenseTensor, Scalar};
pub use coefficients::{
    assemble_equation, build_block_matrix, diag_average, shared_average, solve_coefficients, BlockDiagonalAverage,
    CoefficientTable, EquationRow,
};
pub use combinatorics::{
    enumerate_matchings, enumerate_odd_iso, eval_iso, odd_partitions, pair_class, Axis, IndexTuple, Matching,
    OddIsoTensor, OddPartition, PairClass,
};
pub use error::{Error, Result};
pub use exact::{solve_linear_exact, LinearSolution, Rational};
