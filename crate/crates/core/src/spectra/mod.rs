//! Exact eigenbases, Weyl counts and spectral kernels.

mod kernels;
mod modes;
mod weyl;

pub use kernels::*;
pub use modes::*;
pub use weyl::*;
