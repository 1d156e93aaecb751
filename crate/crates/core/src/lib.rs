pub mod campaign;
pub mod cli;
pub mod enumeration;
pub mod error;
pub mod gfp;
pub mod interpolation;
pub mod model;
pub mod monomials;
pub mod reduction;
