//! Exact arithmetic for degeneracy of integral points on blow-ups of projective space.

pub mod arith;
pub mod beta;
pub mod blowup;
pub mod error;
pub mod factor;
pub mod heights;
pub mod linalg;
mod par;
pub mod poly;
pub mod report;
pub mod search;

pub use arith::{Interval, Rat};
pub use error::{Error, Result};
pub use poly::MultiPoly;
pub use par::set_workers;
