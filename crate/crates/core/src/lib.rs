//! First eigenpairs of the Dirichlet p-Laplacian on weighted graphs, exact
//! Cheeger constants, and the behaviour of normalized first eigenfunctions
//! as `p → 1`.
//!
//! | module | contents |
//! |---|---|
//! | [`graph`] | weighted graphs, Dirichlet domains, volumes, boundaries, μ-weighted norms |
//! | [`cheeger`] | exact Cheeger constant and all Cheeger cuts by enumeration |
//! | [`spectral`] | `E_p`, Rayleigh quotient, `Δ_p`, eigen-residual, first-eigenpair solver |
//! | [`one_laplacian`] | co-area identity, `λ_{1,1} = h`, nested level-set decompositions |
//! | [`continuation`] | `p → 1` sweeps with warm starts |
//! | [`fig1`] | a four-vertex domain whose limit is a sum of two nested cut indicators |
//! | [`io`] | JSON graph/function files and reports |
//!
//! ```
//! use plap::{cheeger::cheeger_constant, fig1::build_fig1};
//!
//! let d = build_fig1();
//! let report = cheeger_constant(&d).unwrap();
//! assert_eq!(report.h_exact_string(), "1/2");
//! assert_eq!(report.cuts.len(), 4);
//! ```

pub mod cheeger;
pub mod continuation;
pub mod error;
pub mod fig1;
pub mod graph;
pub mod io;
pub mod one_laplacian;
pub mod random;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{DirichletFunction, Domain, VertexSet, WeightedGraph};

// Chapters of the guide in book/ are compiled as doc-tests so their
// snippets cannot drift from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/cheeger.md")]
    mod cheeger {}
    #[doc = include_str!("../../../book/src/eigenpairs.md")]
    mod eigenpairs {}
    #[doc = include_str!("../../../book/src/coarea.md")]
    mod coarea {}
    #[doc = include_str!("../../../book/src/continuation.md")]
    mod continuation {}
    #[doc = include_str!("../../../book/src/example.md")]
    mod example {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
