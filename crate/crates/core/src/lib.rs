pub mod error;
pub mod invariant;
pub mod lp;
pub mod polytope;
pub mod safetime;
pub mod sampling;
pub mod system;
