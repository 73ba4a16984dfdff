//! Center, decompose, select, and build signed coordinates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::linalg::{centered_eig, DissimilarityMatrix, SpectralDecomposition};
use crate::metrics::{self, StressReport};
use crate::par::{map_slice, Execution};
use crate::selection::{self, zero_tolerance, SelectionResult};

/// Embedding method.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Classical MDS: `k` largest eigenvalues, non-positive ones zeroed.
    Cmds,
    /// Optimal signed subset.
    Neuc,
    /// Optimal signed subset with the common shift `(w̄ᵀλ)/(1+k)`.
    #[serde(rename = "neuc-plus")]
    Plus,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Cmds, Method::Neuc, Method::Plus];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cmds => "cmds",
            Method::Neuc => "neuc",
            Method::Plus => "neuc-plus",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cmds" => Ok(Method::Cmds),
            "neuc" => Ok(Method::Neuc),
            "neuc-plus" | "plus" => Ok(Method::Plus),
            other => Err(out_of_range("method", other, "cmds, neuc or neuc-plus")),
        }
    }
}

/// `k` real coordinate rows plus a `±1` signature.
///
/// `D̂_ij = Σ_ℓ signature_ℓ (coords[ℓ][i] − coords[ℓ][j])²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub n: usize,
    /// `k × n`, row-major: row `ℓ` is axis `ℓ`.
    pub coords: Vec<f64>,
    pub signature: Vec<i8>,
    /// `λ̃` per axis.
    pub axis_values: Vec<f64>,
    /// Eigenvalue index each axis came from.
    pub axis_index: Vec<usize>,
    pub selection: SelectionResult,
    pub method: Method,
}

impl Embedding {
    pub fn k(&self) -> usize {
        self.signature.len()
    }

    pub fn axis(&self, l: usize) -> &[f64] {
        &self.coords[l * self.n..(l + 1) * self.n]
    }

    pub fn coord(&self, l: usize, i: usize) -> f64 {
        self.coords[l * self.n + i]
    }

    /// Full-length `λ̃`: axis values at their eigenvalue index, zero elsewhere.
    pub fn adjusted_full(&self, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for (&i, &v) in self.axis_index.iter().zip(&self.axis_values) {
            out[i] = v;
        }
        out
    }
}

/// Full-length `λ̃` for a selection: zero off the chosen set.
///
/// Neuc keeps chosen values, clearing zero-class ones. Cmds additionally
/// clamps non-positive values to zero. Plus adds `(w̄ᵀλ)/(1+k)` to every
/// chosen value.
pub fn adjusted_values(lambda: &[f64], sel: &SelectionResult, method: Method) -> Vec<f64> {
    let tol = zero_tolerance(lambda);
    let mut out = vec![0.0; lambda.len()];
    match method {
        Method::Neuc | Method::Cmds => {
            for &i in &sel.chosen {
                let v = lambda[i];
                let keep = v.abs() > tol && (method == Method::Neuc || v > 0.0);
                out[i] = if keep { v } else { 0.0 };
            }
        }
        Method::Plus => {
            let shift = sel.dropped_sum(lambda) / (1 + sel.k()) as f64;
            for &i in &sel.chosen {
                out[i] = lambda[i] + shift;
            }
        }
    }
    out
}

fn select_for(lambda: &[f64], k: usize, method: Method) -> Result<SelectionResult> {
    match method {
        Method::Cmds => selection::select_cmds(lambda, k),
        Method::Neuc => selection::select_neuc(lambda, k),
        Method::Plus => selection::select_plus(lambda, k),
    }
}

/// Runs the whole pipeline on `d`.
pub fn embed(d: &DissimilarityMatrix, k: usize, method: Method) -> Result<Embedding> {
    let spec = centered_eig(d)?;
    embed_spectrum(&spec, k, method)
}

/// Selection and coordinates from an existing decomposition.
pub fn embed_spectrum(
    spec: &SpectralDecomposition,
    k: usize,
    method: Method,
) -> Result<Embedding> {
    let lambda = &spec.eigenvalues;
    let n = spec.n();
    let sel = select_for(lambda, k, method)?;
    let adjusted = adjusted_values(lambda, &sel, method);

    let mut axes = sel.chosen.clone();
    axes.sort_by(|&a, &b| {
        adjusted[b]
            .abs()
            .total_cmp(&adjusted[a].abs())
            .then(a.cmp(&b))
    });

    let mut coords = Vec::with_capacity(k * n);
    let mut signature = Vec::with_capacity(k);
    let mut axis_values = Vec::with_capacity(k);
    for &i in &axes {
        let v = adjusted[i];
        let scale = v.abs().sqrt();
        if v == 0.0 {
            coords.extend(std::iter::repeat_n(0.0, n));
        } else {
            coords.extend(spec.vector(i).iter().map(|u| scale * u));
        }
        signature.push(if v < 0.0 { -1 } else { 1 });
        axis_values.push(v);
    }
    Ok(Embedding {
        n,
        coords,
        signature,
        axis_values,
        axis_index: axes,
        selection: sel,
        method,
    })
}

/// `D̂` under the signature form.
pub fn reconstruct(e: &Embedding) -> DissimilarityMatrix {
    signed_dissim(&e.coords, &e.signature, e.n)
}

/// `Σ_ℓ s_ℓ (X_ℓi − X_ℓj)²` for row-major `k × n` coordinates.
pub fn signed_dissim(coords: &[f64], signature: &[i8], n: usize) -> DissimilarityMatrix {
    signed_dissim_with(Execution::default(), coords, signature, n)
}

pub(crate) fn signed_dissim_with(
    exec: Execution,
    coords: &[f64],
    signature: &[i8],
    n: usize,
) -> DissimilarityMatrix {
    DissimilarityMatrix::from_upper_fn_with(exec, n, |i, j| {
        signature
            .iter()
            .enumerate()
            .map(|(l, &s)| {
                let diff = coords[l * n + i] - coords[l * n + j];
                f64::from(s) * diff * diff
            })
            .sum()
    })
}

/// One `(k, method)` point of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub method: Method,
    pub report: StressReport,
}

/// Reports for every `(k, method)` pair, `k` outermost, sharing one
/// eigendecomposition.
pub fn sweep(d: &DissimilarityMatrix, k_list: &[usize], methods: &[Method]) -> Result<Vec<SweepRow>> {
    sweep_with(Execution::default(), d, k_list, methods)
}

pub fn sweep_with(
    exec: Execution,
    d: &DissimilarityMatrix,
    k_list: &[usize],
    methods: &[Method],
) -> Result<Vec<SweepRow>> {
    let n = d.n();
    if let Some(&k) = k_list.iter().find(|&&k| k == 0 || k > n) {
        return Err(out_of_range("k", k, format!("1..={n}")));
    }
    let spec = centered_eig(d)?;
    let pairs: Vec<(usize, Method)> = k_list
        .iter()
        .flat_map(|&k| methods.iter().map(move |&m| (k, m)))
        .collect();
    map_slice(exec, &pairs, |&(k, method)| {
        let emb = embed_spectrum(&spec, k, method)?;
        let d_hat = signed_dissim_with(Execution::Sequential, &emb.coords, &emb.signature, n);
        let report = metrics::report(d, &d_hat, &emb, Some(&spec))?;
        Ok(SweepRow { k, method, report })
    })
    .into_iter()
    .collect()
}
