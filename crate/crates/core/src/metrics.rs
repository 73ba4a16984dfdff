//! STRESS, its spectral decomposition, and the secondary quality measures.

use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::linalg::{DissimilarityMatrix, SpectralDecomposition};
use crate::par::{compensated_sum, map_range, CompensatedSum, Execution};

/// Summary of one embedding against its input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StressReport {
    /// `‖D̂ − D‖²_F`.
    pub stress_sq: f64,
    pub stress: f64,
    /// Decomposition terms; absent when no spectrum of `D` is available.
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub scaled_additive: f64,
    /// `None` when no pair has both dissimilarities positive.
    pub avg_distortion: Option<f64>,
    pub neg_dissim_count: usize,
    pub neg_axes_count: usize,
}

fn check_same(d: &DissimilarityMatrix, d_hat: &DissimilarityMatrix) -> Result<()> {
    if d.n() != d_hat.n() {
        return Err(Error::DimensionMismatch {
            left: d.n(),
            right: d_hat.n(),
        });
    }
    Ok(())
}

/// Row-wise compensated sums of `f(a, b)` over all entries, reduced in row order.
fn entry_sum<F>(d: &DissimilarityMatrix, d_hat: &DissimilarityMatrix, f: F) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync + Send,
{
    let rows = map_range(Execution::default(), d.n(), |i| {
        compensated_sum(d.row(i).iter().zip(d_hat.row(i)).map(|(&a, &b)| f(a, b)))
    });
    compensated_sum(rows)
}

/// `Σ_ij (D̂_ij − D_ij)²`.
pub fn stress_sq(d: &DissimilarityMatrix, d_hat: &DissimilarityMatrix) -> Result<f64> {
    check_same(d, d_hat)?;
    Ok(entry_sum(d, d_hat, |a, b| (b - a) * (b - a)))
}

/// `(C̃₁, C̃₂, C̃₃)` for eigenvalues `lambda`, eigenvectors `vectors` (one per
/// row, each of length `n`), indicator `w` and kept values `adjusted`.
///
/// With `Δλ = λ − λ̃`:
/// `C̃₁ = 4 Σ Δλ²`, `C̃₂ = 4 (Σ Δλ)²`, `C̃₃ = 2n ‖(U⊙U) Δλ‖² − C̃₂/2`.
/// Dropped entries have `λ̃ = 0`, so their `Δλ` is `λ`.
pub fn decompose(
    lambda: &[f64],
    vectors: &[f64],
    w: &[bool],
    adjusted: &[f64],
) -> Result<(f64, f64, f64)> {
    let n = lambda.len();
    for (len, what) in [(w.len(), n), (adjusted.len(), n), (vectors.len(), n * n)] {
        if len != what {
            return Err(Error::DimensionMismatch {
                left: what,
                right: len,
            });
        }
    }
    if let Some(index) = (0..n).find(|&i| !w[i] && adjusted[i] != 0.0) {
        return Err(Error::UnselectedNonzero {
            index,
            value: adjusted[index],
        });
    }
    let delta: Vec<f64> = lambda.iter().zip(adjusted).map(|(l, a)| l - a).collect();
    let c1 = 4.0 * compensated_sum(delta.iter().map(|x| x * x));
    let sum = compensated_sum(delta.iter().copied());
    let c2 = 4.0 * sum * sum;

    let active: Vec<usize> = (0..n).filter(|&l| delta[l] != 0.0).collect();
    let diag = map_range(Execution::default(), n, |i| {
        compensated_sum(active.iter().map(|&l| {
            let u = vectors[l * n + i];
            u * u * delta[l]
        }))
    });
    let norm = compensated_sum(diag.iter().map(|x| x * x));
    let c3 = 2.0 * n as f64 * norm - c2 / 2.0;
    Ok((c1, c2, c3))
}

/// [`decompose`] against a [`SpectralDecomposition`].
pub fn decompose_spectrum(
    spec: &SpectralDecomposition,
    w: &[bool],
    adjusted: &[f64],
) -> Result<(f64, f64, f64)> {
    decompose(&spec.eigenvalues, spec.vectors_row_major(), w, adjusted)
}

/// `‖D − αD̂‖_F` with `α` the least-squares scale onto the line through `D̂`.
pub fn scaled_additive_error(d: &DissimilarityMatrix, d_hat: &DissimilarityMatrix) -> Result<f64> {
    check_same(d, d_hat)?;
    let dot = entry_sum(d, d_hat, |a, b| a * b);
    let hh = entry_sum(d, d_hat, |_, b| b * b);
    let alpha = if hh > 0.0 { dot / hh } else { 0.0 };
    Ok(entry_sum(d, d_hat, |a, b| (a - alpha * b) * (a - alpha * b)).sqrt())
}

/// Geometric mean of the per-pair distortions `√D_ij / √D̂_ij`.
///
/// Pairs where either value is not positive are skipped. Ratios are divided by
/// their median (the geometric mean of the two middle ratios for even counts)
/// and then folded onto `[1, ∞)`.
pub fn avg_geometric_distortion(
    d: &DissimilarityMatrix,
    d_hat: &DissimilarityMatrix,
) -> Result<Option<f64>> {
    check_same(d, d_hat)?;
    let n = d.n();
    let mut logs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (d.get(i, j), d_hat.get(i, j));
            if a > 0.0 && b > 0.0 {
                logs.push(0.5 * (a.ln() - b.ln()));
            }
        }
    }
    if logs.is_empty() {
        return Ok(None);
    }
    logs.sort_by(f64::total_cmp);
    let m = logs.len();
    let median = if m % 2 == 1 {
        logs[m / 2]
    } else {
        0.5 * (logs[m / 2 - 1] + logs[m / 2])
    };
    let mean = compensated_sum(logs.iter().map(|x| (x - median).abs())) / m as f64;
    Ok(Some(mean.exp()))
}

/// `(negative off-diagonal pairs of D̂, negative-signature axes)`.
pub fn negativity_stats(d_hat: &DissimilarityMatrix, signature: &[i8]) -> (usize, usize) {
    let n = d_hat.n();
    let pairs = (0..n)
        .map(|i| d_hat.row(i)[i + 1..].iter().filter(|&&x| x < 0.0).count())
        .sum();
    (pairs, signature.iter().filter(|&&s| s < 0).count())
}

/// Builds a full report. Pass `spec`, the decomposition of `D` that the
/// embedding was built from, to fill in the decomposition terms.
pub fn report(
    d: &DissimilarityMatrix,
    d_hat: &DissimilarityMatrix,
    emb: &Embedding,
    spec: Option<&SpectralDecomposition>,
) -> Result<StressReport> {
    let stress_sq = stress_sq(d, d_hat)?;
    let terms = match spec {
        Some(s) => {
            let adjusted = emb.adjusted_full(s.n());
            Some(decompose_spectrum(s, &emb.selection.w, &adjusted)?)
        }
        None => None,
    };
    let (neg_dissim_count, neg_axes_count) = negativity_stats(d_hat, &emb.signature);
    Ok(StressReport {
        stress_sq,
        stress: stress_sq.sqrt(),
        c1: terms.map(|t| t.0),
        c2: terms.map(|t| t.1),
        c3: terms.map(|t| t.2),
        scaled_additive: scaled_additive_error(d, d_hat)?,
        avg_distortion: avg_geometric_distortion(d, d_hat)?,
        neg_dissim_count,
        neg_axes_count,
    })
}

/// `‖D‖²_F`.
pub fn frobenius_sq(d: &DissimilarityMatrix) -> f64 {
    d.as_slice().iter().map(|x| x * x).collect::<CompensatedSum>().value()
}
