pub mod dae;
pub mod fem;
pub mod cli;
pub mod linalg;
pub mod problems;
