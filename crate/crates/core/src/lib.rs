//! Exact-arithmetic computational toolkit for Thompson's group F and
//! piecewise-linear circle maps.
//!
//! The crate is organized around the three interchangeable element
//! representations of F (words in the infinite generating set, tree pair
//! diagrams, exact PL homeomorphisms of `[0,1]`) plus strand diagrams for
//! conjugacy, the stair-algorithm decision procedures, the
//! Shpilrain-Ushakov protocol and its cryptanalysis, forest-diagram growth
//! counting, and rotation-number machinery for PL circle maps.
//!
//! Everything is exact: no floating point is used anywhere.

pub mod circle;
pub mod crypto;
pub mod dyadic;
pub mod dynamics;
pub mod error;
pub mod growth;
pub mod plmap;
pub mod strand;
pub mod tree;
pub mod word;

pub use dyadic::{Dyadic, Rational};
pub use error::Error;
pub use plmap::PLMap;
pub use tree::{BinaryTree, TreePair};
pub use word::Word;
