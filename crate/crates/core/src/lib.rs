#![no_std]
// NaN-rejecting `!(x > 0.0)` checks and index loops over small matrices are intended
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]
extern crate alloc;

pub mod channel;
pub mod error;
pub mod mueller;
pub mod numerics;
pub mod optimize;
pub mod qstate;
mod rng;
pub mod sweep;
pub mod tomography;

pub use error::{Error, Result};
