#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::should_implement_trait, clippy::needless_range_loop)]

pub mod channel;
pub mod error;
pub mod linalg;
pub mod logval;
pub mod matrix_hyp;
pub mod monte_carlo;
pub mod quadrature;
pub mod special;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use logval::LogValue;
