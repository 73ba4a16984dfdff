//! Landmark embedding: embed a subset exactly, place every other point by
//! signed triangulation against it.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{Embedding, Method};
use crate::error::{out_of_range, Error, Result};
use crate::linalg::{centered_eig, DissimilarityMatrix};
use crate::par::{compensated_sum, map_range, Execution};

/// Axes with `|λ̃| < AXIS_REL_TOL · max|λ̃|` (or a raw eigenvalue that small) are not triangulated.
pub const AXIS_REL_TOL: f64 = 1e-12;

/// How landmarks are picked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LandmarkStrategy {
    /// Uniform without replacement.
    #[default]
    Random,
    /// Farthest-point traversal from a random start.
    MaxMin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandmarkModel {
    /// Ascending indices into the full matrix.
    pub landmark_indices: Vec<usize>,
    /// Embedding of the `m × m` landmark submatrix.
    pub base: Embedding,
    /// Column means of the landmark submatrix.
    pub mean_dissim: Vec<f64>,
    /// Landmark eigenvector per axis, `k × m` row-major.
    axis_vectors: Vec<f64>,
    /// `√|λ̃_ℓ| / λ_ℓ` per axis, zero for dropped axes.
    axis_factor: Vec<f64>,
}

impl LandmarkModel {
    pub fn m(&self) -> usize {
        self.landmark_indices.len()
    }

    pub fn k(&self) -> usize {
        self.base.k()
    }

    /// Axes that take part in triangulation.
    pub fn active_axes(&self) -> usize {
        self.axis_factor.iter().filter(|&&f| f != 0.0).count()
    }

    /// Coordinates of a point with dissimilarities `delta` to the landmarks
    /// (in `landmark_indices` order).
    ///
    /// Axis `ℓ` gets `−½ v_ℓ·(δ − mean) · √|λ̃_ℓ| / λ_ℓ`. When `λ̃ = λ` this is
    /// `−v_ℓ·(δ − mean) / (2 sign(λ_ℓ) √|λ_ℓ|)`, the classical landmark rule
    /// with the signed eigenvalue in place of a positive one.
    pub fn triangulate(&self, delta: &[f64]) -> Result<Vec<f64>> {
        let m = self.m();
        if delta.len() != m {
            return Err(Error::DimensionMismatch {
                left: m,
                right: delta.len(),
            });
        }
        Ok(self.triangulate_unchecked(delta))
    }

    fn triangulate_unchecked(&self, delta: &[f64]) -> Vec<f64> {
        let m = self.m();
        self.axis_factor
            .iter()
            .enumerate()
            .map(|(l, &f)| {
                if f == 0.0 {
                    return 0.0;
                }
                let v = &self.axis_vectors[l * m..(l + 1) * m];
                let proj = compensated_sum(
                    v.iter()
                        .zip(delta.iter().zip(&self.mean_dissim))
                        .map(|(vi, (d, mu))| vi * (d - mu)),
                );
                -0.5 * proj * f
            })
            .collect()
    }
}

/// Picks landmarks and embeds their submatrix.
pub fn fit_landmarks(
    d: &DissimilarityMatrix,
    m: usize,
    k: usize,
    method: Method,
    seed: u64,
) -> Result<LandmarkModel> {
    fit_landmarks_with(d, m, k, method, seed, LandmarkStrategy::Random)
}

pub fn fit_landmarks_with(
    d: &DissimilarityMatrix,
    m: usize,
    k: usize,
    method: Method,
    seed: u64,
    strategy: LandmarkStrategy,
) -> Result<LandmarkModel> {
    let n = d.n();
    if m > n {
        return Err(out_of_range("landmarks", m, format!("at most n = {n}")));
    }
    if k == 0 || k >= m {
        return Err(out_of_range("k", k, format!("1..{m} (fewer than the landmarks)")));
    }
    let landmark_indices = choose_landmarks(d, m, seed, strategy);
    let sub = d.submatrix(&landmark_indices);
    let spec = centered_eig(&sub)?;
    let base = crate::embedding::embed_spectrum(&spec, k, method)?;

    let mean_dissim: Vec<f64> = (0..m)
        .map(|j| compensated_sum((0..m).map(|i| sub.get(i, j))) / m as f64)
        .collect();
    let lambda = &spec.eigenvalues;
    let tol_raw = AXIS_REL_TOL * lambda.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let tol_adj = AXIS_REL_TOL * base.axis_values.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut axis_vectors = Vec::with_capacity(k * m);
    let mut axis_factor = Vec::with_capacity(k);
    for (&idx, &lt) in base.axis_index.iter().zip(&base.axis_values) {
        axis_vectors.extend_from_slice(spec.vector(idx));
        let raw = lambda[idx];
        let usable = lt.abs() >= tol_adj && lt != 0.0 && raw.abs() > tol_raw;
        axis_factor.push(if usable { lt.abs().sqrt() / raw } else { 0.0 });
    }
    Ok(LandmarkModel {
        landmark_indices,
        base,
        mean_dissim,
        axis_vectors,
        axis_factor,
    })
}

fn choose_landmarks(
    d: &DissimilarityMatrix,
    m: usize,
    seed: u64,
    strategy: LandmarkStrategy,
) -> Vec<usize> {
    let n = d.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = match strategy {
        LandmarkStrategy::Random => sample(&mut rng, n, m).into_vec(),
        LandmarkStrategy::MaxMin => {
            let first = rng.random_range(0..n);
            let mut picked = vec![first];
            let mut taken = vec![false; n];
            taken[first] = true;
            let mut nearest: Vec<f64> = d.row(first).to_vec();
            while picked.len() < m {
                let next = (0..n)
                    .filter(|&i| !taken[i])
                    .fold(None, |best: Option<usize>, i| match best {
                        Some(b) if nearest[b] >= nearest[i] => Some(b),
                        _ => Some(i),
                    })
                    .expect("m <= n leaves a candidate");
                taken[next] = true;
                picked.push(next);
                for (x, &v) in nearest.iter_mut().zip(d.row(next)) {
                    *x = x.min(v);
                }
            }
            picked
        }
    };
    chosen.sort_unstable();
    chosen
}

/// Embeds all `n` points: landmarks keep their base coordinates, every other
/// point is triangulated.
pub fn embed_landmark(
    d: &DissimilarityMatrix,
    m: usize,
    k: usize,
    method: Method,
    seed: u64,
) -> Result<Embedding> {
    let model = fit_landmarks(d, m, k, method, seed)?;
    Ok(embed_with_model(Execution::default(), d, &model))
}

/// Triangulates every point of `d` against a fitted model.
pub fn embed_with_model(exec: Execution, d: &DissimilarityMatrix, model: &LandmarkModel) -> Embedding {
    let n = d.n();
    let m = model.m();
    let k = model.k();
    let mut slot = vec![usize::MAX; n];
    for (a, &i) in model.landmark_indices.iter().enumerate() {
        slot[i] = a;
    }
    let columns: Vec<Vec<f64>> = map_range(exec, n, |i| {
        if slot[i] != usize::MAX {
            (0..k).map(|l| model.base.coord(l, slot[i])).collect()
        } else {
            let row = d.row(i);
            let delta: Vec<f64> = model.landmark_indices.iter().map(|&j| row[j]).collect();
            debug_assert_eq!(delta.len(), m);
            model.triangulate_unchecked(&delta)
        }
    });
    let mut coords = vec![0.0; k * n];
    for (i, col) in columns.iter().enumerate() {
        for (l, &x) in col.iter().enumerate() {
            coords[l * n + i] = x;
        }
    }
    Embedding {
        n,
        coords,
        signature: model.base.signature.clone(),
        axis_values: model.base.axis_values.clone(),
        axis_index: model.base.axis_index.clone(),
        selection: model.base.selection.clone(),
        method: model.base.method,
    }
}
