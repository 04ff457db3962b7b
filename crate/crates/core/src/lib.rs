//! Exact eigenfunctions of the Laplacian on the flat torus, the round sphere and
//! the unit disc, and numerical pipelines over them: nodal sets and domains,
//! L^p norms, restrictions to closed geodesics, and zeros of holomorphic
//! continuations along complexified geodesics.

pub mod acceptance;
pub mod cli;
pub mod cx;
pub mod error;
pub mod field;
pub mod fit;
pub mod geom;
pub mod io;
pub mod nodal;
pub mod norms;
pub mod quad;
pub mod restrict;
pub mod special;
pub mod spectra;

pub use error::{Error, Result};
