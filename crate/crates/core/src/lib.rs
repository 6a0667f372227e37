pub mod cartan;
pub mod linalg;
pub mod qalg;
pub mod report;
pub mod tensor_rep;
pub mod braiding;
pub mod rewrite;
pub mod nilhecke;
pub mod cli;
