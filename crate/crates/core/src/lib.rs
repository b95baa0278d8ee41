#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod freeops;
pub mod golden;
pub mod io;
pub mod gram;
pub mod linalg;
pub mod monotones;
pub mod parallel;
pub mod sampling;
pub mod scan;
pub mod simplex;
pub mod states;

pub use error::{Error, Result};
