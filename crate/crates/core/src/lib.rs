pub mod blrank;
pub mod counting;
pub mod exponents;
pub mod iteration;
pub mod lattice;
pub mod linalg;
pub mod multiplicity;
pub mod rat;
pub mod report;
pub mod suites;
