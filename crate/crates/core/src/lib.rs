//! Non-Euclidean multidimensional scaling.
//!
//! Classical MDS keeps the `k` largest eigenvalues of the double-centered Gram
//! matrix and silently discards negative ones. For dissimilarities that are not
//! squared Euclidean distances that choice is far from optimal: the STRESS
//! `‖D̂ − D‖²_F` splits exactly into
//!
//! ```text
//! C1 = 4 Σ_dropped λ²      C2 = 4 (Σ_dropped λ)²      C3 = 2n‖(U⊙U)Δλ‖² − C2/2 ≥ 0
//! ```
//!
//! and the eigenvalue subset minimizing `C1 + C2` mixes positive and negative
//! eigenvalues. This crate finds that subset exactly in linear time
//! ([`selection::select_neuc`]), also solves the variant that shifts the kept
//! eigenvalues by a common constant ([`selection::select_plus`]), and builds
//! real coordinates paired with a `±1` signature so that
//! `D̂_ij = Σ_ℓ s_ℓ (X_ℓi − X_ℓj)²`.
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`linalg`] | symmetric matrices, double centering, Householder + QL eigensolver |
//! | [`selection`] | greedy eigenvalue selection, cMDS baseline, brute-force oracle |
//! | [`embedding`] | end-to-end pipeline, reconstruction, dimension sweeps |
//! | [`landmark`] | landmark embedding with signed triangulation |
//! | [`metrics`] | STRESS, its decomposition, additive error, distortion |
//! | [`datasets`] | random-simplex and Euclidean-ball generators, perturbed point clouds |
//! | [`rmt`] | semicircle-law laboratory for the `C1 + C2` error of both selectors |
//!
//! ```
//! use neuc_mds::{embed, reconstruct, DissimilarityMatrix, Method};
//!
//! // squared distances of the collinear points {0, 1, 3}
//! let d = DissimilarityMatrix::from_row_major(3, vec![
//!     0.0, 1.0, 9.0,
//!     1.0, 0.0, 4.0,
//!     9.0, 4.0, 0.0,
//! ]).unwrap();
//! let emb = embed(&d, 1, Method::Neuc).unwrap();
//! let d_hat = reconstruct(&emb);
//! assert!((d_hat.get(0, 2) - 9.0).abs() < 1e-9);
//! ```
//!
//! With the default `parallel` feature, row loops, sweeps and Monte Carlo
//! trials run on rayon. Every parallel loop writes per-index results that are
//! reduced in index order, so outputs are bitwise identical to the sequential
//! build.

pub mod datasets;
pub mod embedding;
mod error;
pub mod landmark;
pub mod linalg;
pub mod metrics;
pub mod par;
pub mod rmt;
pub mod selection;

pub use embedding::{embed, reconstruct, sweep, Embedding, Method, SweepRow};
pub use error::{Error, Result};
pub use linalg::{DissimilarityMatrix, SpectralDecomposition, SymMatrix};
pub use metrics::StressReport;
pub use selection::SelectionResult;
