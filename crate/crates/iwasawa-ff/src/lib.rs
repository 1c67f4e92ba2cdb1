#![doc = include_str!("../README.md")]

pub mod bipoly;
pub mod carlitz;
pub mod config;
pub mod error;
pub mod ffpoly;
pub mod geometry;
pub mod grouprings;
pub mod groups;
pub mod lfun;
pub mod numtheory;
pub mod properties;
pub mod rayclass;
pub mod snf;
pub mod tower;
mod zpoly;

pub use error::{Error, Result};

/// Chapters of the guide in `book/`, compiled as doctests.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/layers.md")]
    mod layers {}
    #[doc = include_str!("../../../book/src/theta.md")]
    mod theta {}
    #[doc = include_str!("../../../book/src/group-rings.md")]
    mod group_rings {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/tower.md")]
    mod tower {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
