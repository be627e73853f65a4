//! Finite étale groupoids and their correspondences.
//!
//! Everything here is discrete and finite. A [`FiniteGroupoid`] is a table
//! of arrows; a [`Correspondence`] is a finite set with commuting actions,
//! free on the right. Correspondences compose through the diagonal
//! quotient and form a bicategory with [`TwoArrow`]s, unitors and
//! associators ([`bicategory`]).
//!
//! On the analytic side, [`AlgebraElement`]s live in the convolution
//! algebra with exact Gaussian-rational coefficients ([`Scalar`]), norms
//! come from the regular representation, and [`ModuleElement`]s carry the
//! inner product and bimodule structure of a correspondence ([`hilbert`]).
//!
//! Diagrams of correspondences indexed by small categories, discrete
//! Conduché fibrations, k-graphs and self-similar actions are in
//! [`diagram`], [`category`], [`kgraph`] and [`selfsim`]; [`presentation`]
//! emits Cuntz–Pimsner generators and relations as text.
//!
//! ```
//! use std::sync::Arc;
//! use grpd_core::{bicategory::compose, fixtures};
//!
//! let x = Arc::new(fixtures::o2x());
//! let xx = compose(&x, &x)?;
//! assert_eq!(xx.corr().len(), 4);
//! # Ok::<(), grpd_core::Error>(())
//! ```

pub mod algebra;
pub mod bicategory;
pub mod category;
pub mod correspondence;
pub mod diagram;
pub mod error;
pub mod fixtures;
pub mod groupoid;
pub mod hilbert;
pub mod io;
pub mod kgraph;
pub mod linalg;
pub mod presentation;
pub mod random;
pub mod scalar;
pub mod selfsim;

pub use algebra::AlgebraElement;
pub use bicategory::{Composite, TwoArrow};
pub use category::{FibrationFunctor, FiniteCategory};
pub use correspondence::{Correspondence, PointId};
pub use diagram::{Diagram, ProductSystem};
pub use error::{Axiom, Error, Result};
pub use groupoid::{ArrowId, FiniteGroupoid, GroupoidSubset, ObjectId};
pub use hilbert::ModuleElement;
pub use kgraph::KGraph;
pub use presentation::Presentation;
pub use scalar::Scalar;
pub use selfsim::SelfSimilarAction;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/groupoids.md")]
    pub mod groupoids {}
    #[doc = include_str!("../../../book/src/correspondences.md")]
    pub mod correspondences {}
    #[doc = include_str!("../../../book/src/composition.md")]
    pub mod composition {}
    #[doc = include_str!("../../../book/src/algebras.md")]
    pub mod algebras {}
    #[doc = include_str!("../../../book/src/modules.md")]
    pub mod modules {}
    #[doc = include_str!("../../../book/src/diagrams.md")]
    pub mod diagrams {}
    #[doc = include_str!("../../../book/src/self_similar.md")]
    pub mod self_similar {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
