//! Augmentations, Morse complex sequences and constructible sheaves for
//! Legendrian knots given by plat fronts, over prime fields.
//!
//! The crate builds without `std` (it only needs `alloc`).

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod coeff;
pub mod front;
pub mod mc;
pub mod mcs;
pub mod enumerate;
pub mod sheaf;
