#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod base;
pub mod error;
pub mod exec;
pub mod extremizer;
pub mod flow;
pub mod infconv;
pub mod quad;
pub mod rearrange;
pub mod report;
pub mod special;
pub mod transforms;
pub mod verify;

pub use base::*;
pub use error::{Error, Result};
pub use exec::Execution;
