pub mod arith;
pub mod quadratic;
pub mod mfield;
pub mod theorems;
pub mod verify;
pub mod cli;
mod ser;
