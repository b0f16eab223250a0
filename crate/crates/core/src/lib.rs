//! Quivers with potential, exchange graphs of hearts in 3-Calabi-Yau
//! categories, their Verdier quotients and silting duality.

pub mod cy3;
pub mod error;
pub mod exchange;
pub mod io;
pub mod linalg;
pub mod path_algebra;
pub mod polygon;
pub mod qp;
pub mod silting;

pub use error::{Error, Result};
pub use qp::{Arrow, Potential, Qp, Quiver, VertexSubset};
