//! Finite-volume solver for two-dimensional shallow-water flow with suspended
//! sediment and an erodible bed.

pub mod error;
pub mod grid;
pub mod harness;
pub mod physics;
pub mod reconstruction;
pub mod scheme;
pub mod state;
pub mod timeint;

pub use error::{Result, SolverError};

// The book's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/reconstruction.md")]
    mod reconstruction {}
    #[doc = include_str!("../../../book/src/scheme.md")]
    mod scheme {}
    #[doc = include_str!("../../../book/src/time-stepping.md")]
    mod time_stepping {}
    #[doc = include_str!("../../../book/src/cases.md")]
    mod cases {}
    #[doc = include_str!("../../../book/src/acceptance.md")]
    mod acceptance {}
}
