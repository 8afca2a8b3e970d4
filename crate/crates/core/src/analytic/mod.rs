pub mod bigfloat;
pub mod curve;
pub mod lattice;
pub mod modular;
pub mod recognize;
