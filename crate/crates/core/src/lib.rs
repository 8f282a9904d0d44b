//! Exact computations with finite dendroidal sets.

pub mod cli;
pub mod dset;
pub mod expr;
pub mod intlin;
pub mod kan;
pub mod kzero;
pub mod omega;
pub mod smc;
pub mod tree;
pub mod verify;
