pub mod catalog;
pub mod cli;
pub mod congruence;
pub mod crystal;
pub mod embed;
pub mod linalg;
pub mod verify;
