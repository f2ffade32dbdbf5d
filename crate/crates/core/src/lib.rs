//! Exact rational machinery for exceptional generalised geometry at the
//! algebra level: exterior algebra, the exceptional Lie algebras
//! `e_{n(n)} ⊕ ℝ` for `n = 3..6`, admissible group data sets, subspace
//! classification and elgebras.

pub mod data_set;
pub mod elgebra;
pub mod error;
pub mod exc;
pub mod exterior;
pub mod lie;
pub mod linalg;
pub mod rat;
pub mod subspace;
pub mod suite;

pub use error::{Error, Result};
pub use rat::Rat;
