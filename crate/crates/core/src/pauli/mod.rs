//! Pauli strings, local Hamiltonians, matrix assembly and structural checks.

pub mod checks;
pub mod hamiltonian;
pub mod matrix;
pub mod string;
pub mod text;

pub use checks::{
    is_commuting, is_off_diagonal, is_permutation, is_stoquastic, terms_commute, CommutingReport,
    PermutationReport, StoquasticReport, STRUCTURE_TOL,
};
pub use hamiltonian::{HamiltonianSum, Part, ProductOp, Term};
pub use matrix::{
    to_dense, to_matrix, PauliOperator, SparseMatrix, DENSE_CEILING, MATRIX_FREE_CEILING,
    SPARSE_CEILING,
};
pub use string::{Letter, PauliString, MAX_QUBITS};
pub use text::{format_hamiltonian, parse_hamiltonian};
