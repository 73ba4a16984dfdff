use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix order must be positive")]
    EmptyMatrix,

    #[error("expected {expected} entries for an {n}x{n} matrix, got {got}")]
    BadLength { n: usize, expected: usize, got: usize },

    #[error("matrix is not symmetric at ({i}, {j}): {a} != {b}")]
    NotSymmetric { i: usize, j: usize, a: f64, b: f64 },

    #[error("dissimilarity matrix is not hollow: entry ({i}, {i}) = {value}")]
    NotHollow { i: usize, value: f64 },

    #[error("non-finite value at ({i}, {j})")]
    NonFinite { i: usize, j: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("eigenvalues must be sorted in descending order (index {index})")]
    Unsorted { index: usize },

    #[error("{name} = {value} is out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: String,
        expected: String,
    },

    #[error("eigensolver did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("adjusted eigenvalue at unselected index {index} is {value}, expected 0")]
    UnselectedNonzero { index: usize, value: f64 },

    #[error("k-nearest-neighbor graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("points {i} and {j} share no surviving coordinates")]
    EmptyIntersection { i: usize, j: usize },

    #[error("landmark axis {axis} has zero eigenvalue")]
    ZeroAxis { axis: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(
    name: &'static str,
    value: impl ToString,
    expected: impl Into<String>,
) -> Error {
    Error::OutOfRange {
        name,
        value: value.to_string(),
        expected: expected.into(),
    }
}
