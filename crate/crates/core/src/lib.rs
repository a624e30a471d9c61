//! Exact symbolic calculus for differential n-forms on a coordinate chart:
//! Schouten–Nijenhuis calculus, graded Jacobi brackets of conformal
//! Hamiltonian forms, sharp/Reeb maps, the canonical multisymplectization and
//! dissipative Hamilton–de Donder–Weyl equations.

pub mod coeffring;
pub mod exterior;
pub mod random;
pub mod elimination;
pub mod sharp;
pub mod structures;
pub mod symplectization;
pub mod fieldtheory;
pub mod cli;
