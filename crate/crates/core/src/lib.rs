//! Exact construction, cohomology and classification of narrow positively
//! graded (Carnot) Lie algebras.

pub mod algebra;
pub mod automorphism;
pub mod catalog;
pub mod cohomology;
pub mod enumerate;
pub mod error;
pub mod extension;
pub mod iso;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod structure;

pub use algebra::{AlgebraBuilder, BasisRef, Element, GradedLieAlgebra};
pub use error::{Error, Result};
pub use scalar::{Field, Scalar};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/arithmetic.md")]
    mod arithmetic {}
    #[doc = include_str!("../../../book/src/graded-algebras.md")]
    mod graded_algebras {}
    #[doc = include_str!("../../../book/src/catalog.md")]
    mod catalog {}
    #[doc = include_str!("../../../book/src/cohomology.md")]
    mod cohomology {}
    #[doc = include_str!("../../../book/src/extensions.md")]
    mod extensions {}
    #[doc = include_str!("../../../book/src/isomorphisms.md")]
    mod isomorphisms {}
    #[doc = include_str!("../../../book/src/forms.md")]
    mod forms {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/json.md")]
    mod json {}
}
