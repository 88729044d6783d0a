//! Bond percolation on the permutahedron `Perm(n)`, the Cayley graph of the
//! symmetric group `S_{n+1}` generated by adjacent transpositions of values.

pub mod branching;
pub mod dsu;
pub mod error;
pub mod experiments;
pub mod face;
pub mod format;
pub mod iso;
pub mod oracle;
pub mod percolation;
pub mod perm;
pub mod pfs;
pub mod trees;
pub mod verify;

pub use error::{Error, Result};
pub use face::{project, FaceChain, FaceGraph};
pub use oracle::{EdgeOracle, QueryLog};
pub use percolation::{
    enumerate_components, enumerate_components_with, hitting_times, two_round_exposure, ComponentReport,
    EnumerationLimit, PercolationConfig,
};
pub use perm::{EdgeId, InversionSet, Permutation, VertexRank};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/permutations.md")]
    mod permutations {}
    #[doc = include_str!("../../../book/src/faces.md")]
    mod faces {}
    #[doc = include_str!("../../../book/src/percolation.md")]
    mod percolation {}
    #[doc = include_str!("../../../book/src/pfs.md")]
    mod pfs {}
    #[doc = include_str!("../../../book/src/branching.md")]
    mod branching {}
    #[doc = include_str!("../../../book/src/isoperimetry.md")]
    mod isoperimetry {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
