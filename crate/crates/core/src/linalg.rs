//! Dense symmetric matrices, double centering and the symmetric eigensolver.
//!
//! The eigensolver is the classic Householder tridiagonalization followed by
//! implicit-shift QL iteration (EISPACK `tred2`/`tql2`). Working storage is
//! kept transposed so that every Householder update and every Givens rotation
//! walks a contiguous row.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{compensated_sum, for_each_row, Execution};

/// Orthonormality tolerance `‖UᵀU − I‖_max`.
pub const ORTHONORMALITY_TOL: f64 = 1e-9;
/// Relative reconstruction tolerance `‖UΛUᵀ − B‖_max / max(1, ‖B‖_max)`.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;

const MAX_QL_ITERATIONS: usize = 60;

/// Symmetric `n × n` matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// Validates exact symmetry and finiteness.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != n * n {
            return Err(Error::BadLength {
                n,
                expected: n * n,
                got: data.len(),
            });
        }
        for i in 0..n {
            for j in i..n {
                let a = data[i * n + j];
                let b = data[j * n + i];
                if !a.is_finite() {
                    return Err(Error::NonFinite { i, j });
                }
                if a != b {
                    return Err(Error::NotSymmetric { i, j, a, b });
                }
            }
        }
        Ok(Self { n, data })
    }

    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle (`j >= i`) and mirrored.
    pub fn from_upper_fn<F>(n: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync + Send,
    {
        Self::from_upper_fn_with(Execution::default(), n, f)
    }

    pub(crate) fn from_upper_fn_with<F>(exec: Execution, n: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync + Send,
    {
        let mut data = vec![0.0; n * n];
        for_each_row(exec, &mut data, n, |i, row| {
            for (j, x) in row.iter_mut().enumerate().skip(i) {
                *x = f(i, j);
            }
        });
        for i in 0..n {
            for j in (i + 1)..n {
                data[j * n + i] = data[i * n + j];
            }
        }
        Self { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn trace(&self) -> f64 {
        compensated_sum((0..self.n).map(|i| self.get(i, i)))
    }

    pub fn frobenius_sq(&self) -> f64 {
        compensated_sum(self.data.iter().map(|x| x * x))
    }
}

/// Symmetric hollow matrix of squared-style dissimilarities. Entries may be negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DissimilarityMatrix {
    inner: SymMatrix,
}

impl DissimilarityMatrix {
    pub fn new(inner: SymMatrix) -> Result<Self> {
        for i in 0..inner.n() {
            let v = inner.get(i, i);
            if v != 0.0 {
                return Err(Error::NotHollow { i, value: v });
            }
        }
        Ok(Self { inner })
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        Self::new(SymMatrix::from_row_major(n, data)?)
    }

    /// Builds from `f(i, j)` on the strict upper triangle; the diagonal is zero.
    pub fn from_upper_fn<F>(n: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync + Send,
    {
        Self::from_upper_fn_with(Execution::default(), n, f)
    }

    pub(crate) fn from_upper_fn_with<F>(exec: Execution, n: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync + Send,
    {
        let inner =
            SymMatrix::from_upper_fn_with(exec, n, |i, j| if i == j { 0.0 } else { f(i, j) });
        Self { inner }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: SymMatrix::zeros(n),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.inner.n()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.inner.row(i)
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.inner
    }

    pub fn as_slice(&self) -> &[f64] {
        self.inner.as_slice()
    }

    pub fn into_inner(self) -> SymMatrix {
        self.inner
    }

    /// Principal submatrix on `indices`, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        Self::from_upper_fn_with(Execution::Sequential, indices.len(), |a, b| {
            self.get(indices[a], indices[b])
        })
    }
}

/// Eigenvalues sorted descending with eigenvectors.
///
/// Eigenvector `i` is stored contiguously and is column `i` of `U` in
/// `B = U diag(λ) Uᵀ`. Each eigenvector's largest-magnitude entry is positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    vectors: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvector paired with `eigenvalues[i]`.
    pub fn vector(&self, i: usize) -> &[f64] {
        let n = self.n();
        &self.vectors[i * n..(i + 1) * n]
    }

    /// `U[row][col]`, i.e. entry `row` of eigenvector `col`.
    #[inline]
    pub fn u(&self, row: usize, col: usize) -> f64 {
        self.vectors[col * self.n() + row]
    }

    /// Eigenvectors stored one per row (the transpose of `U`).
    pub fn vectors_row_major(&self) -> &[f64] {
        &self.vectors
    }

    /// `U diag(λ) Uᵀ`.
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.n();
        SymMatrix::from_upper_fn(n, |i, j| {
            compensated_sum((0..n).map(|l| self.eigenvalues[l] * self.u(i, l) * self.u(j, l)))
        })
    }

    /// `‖UᵀU − I‖_max`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in a..n {
                let dot: f64 = self
                    .vector(a)
                    .iter()
                    .zip(self.vector(b))
                    .map(|(x, y)| x * y)
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// `‖UΛUᵀ − B‖_max`.
    pub fn reconstruction_error(&self, b: &SymMatrix) -> f64 {
        let r = self.reconstruct();
        r.as_slice()
            .iter()
            .zip(b.as_slice())
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }
}

/// `B = −½ C D C` with `C = I − 11ᵀ/n`.
pub fn double_center(d: &DissimilarityMatrix) -> SymMatrix {
    let n = d.n();
    let row_means: Vec<f64> = (0..n)
        .map(|i| compensated_sum(d.row(i).iter().copied()) / n as f64)
        .collect();
    let grand = compensated_sum(row_means.iter().copied()) / n as f64;
    SymMatrix::from_upper_fn(n, |i, j| {
        -0.5 * (d.get(i, j) - row_means[i] - row_means[j] + grand)
    })
}

/// `m_ij = g_ii + g_jj − 2 g_ij`.
pub fn gram_to_dissim(g: &SymMatrix) -> DissimilarityMatrix {
    DissimilarityMatrix::from_upper_fn(g.n(), |i, j| g.get(i, i) + g.get(j, j) - 2.0 * g.get(i, j))
}

/// Full symmetric eigendecomposition, eigenvalues descending.
pub fn eig_sym(b: &SymMatrix) -> Result<SpectralDecomposition> {
    let n = b.n();
    let mut w = b.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut w, &mut d, &mut e, true);
    tql(n, &mut d, &mut e, Some(&mut w))?;

    let order = descending_order(&d);
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &i in &order {
        vectors.extend_from_slice(&w[i * n..(i + 1) * n]);
    }
    for row in vectors.chunks_mut(n.max(1)) {
        normalize_sign(row);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        vectors,
    })
}

/// Eigenvalues only, descending. Skips the `O(n³)` eigenvector accumulation.
pub fn eigvals_sym(b: &SymMatrix) -> Result<Vec<f64>> {
    let n = b.n();
    let mut w = b.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut w, &mut d, &mut e, false);
    tql(n, &mut d, &mut e, None)?;
    Ok(descending_order(&d).into_iter().map(|i| d[i]).collect())
}

/// Eigendecomposition of `B = −½ C D C` with the centering direction split off.
///
/// `1ₙ` is an exact null vector of `B`. The reflector `H = I − 2vvᵀ/vᵀv`,
/// `v = 1ₙ + √n eₙ`, maps it onto `eₙ`, so `HBH` carries the whole spectrum in
/// its leading `(n−1) × (n−1)` block. That block is decomposed and `1ₙ/√n` is
/// re-attached with eigenvalue exactly `0`. All other eigenvectors are then
/// orthogonal to `1ₙ` to rounding, whatever the multiplicity of zero.
pub fn centered_eig(d: &DissimilarityMatrix) -> Result<SpectralDecomposition> {
    let b = double_center(d);
    centered_eig_of_gram(&b)
}

pub(crate) fn centered_eig_of_gram(b: &SymMatrix) -> Result<SpectralDecomposition> {
    let n = b.n();
    if n == 1 {
        return Ok(SpectralDecomposition {
            eigenvalues: vec![0.0],
            vectors: vec![1.0],
        });
    }
    let sqrt_n = (n as f64).sqrt();
    let mut v = vec![1.0; n];
    v[n - 1] += sqrt_n;
    let beta = 2.0 / compensated_sum(v.iter().map(|x| x * x));

    // HBH = B − v wᵀ − w vᵀ with y = βBv, γ = ½β vᵀy, w = y − γv.
    let y: Vec<f64> = (0..n)
        .map(|i| beta * b.row(i).iter().zip(&v).map(|(a, b)| a * b).sum::<f64>())
        .collect();
    let gamma = 0.5 * beta * v.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
    let wv: Vec<f64> = y.iter().zip(&v).map(|(yi, vi)| yi - gamma * vi).collect();

    let m = n - 1;
    let block = SymMatrix::from_upper_fn(m, |i, j| {
        b.get(i, j) - v[i] * wv[j] - wv[i] * v[j]
    });
    let inner = eig_sym(&block)?;

    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * n);
    for l in 0..m {
        // H [v'; 0] = [v'; 0] − β v (vᵀ[v'; 0]), and v_i = 1 for i < n−1.
        let vp = inner.vector(l);
        let proj = beta * compensated_sum(vp.iter().copied());
        let mut full: Vec<f64> = vp.iter().map(|x| x - proj).collect();
        full.push(-proj * v[n - 1]);
        values.push(inner.eigenvalues[l]);
        vectors.push(full);
    }
    values.push(0.0);
    vectors.push(vec![1.0 / sqrt_n; n]);

    let order = descending_order(&values);
    let mut out = Vec::with_capacity(n * n);
    let mut eigenvalues = Vec::with_capacity(n);
    for &i in &order {
        let mut vec = std::mem::take(&mut vectors[i]);
        normalize_sign(&mut vec);
        out.extend_from_slice(&vec);
        eigenvalues.push(values[i]);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        vectors: out,
    })
}

/// Indices sorting `values` descending, ties by index.
fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order
}

/// Flips `v` so its first largest-magnitude entry is positive.
fn normalize_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Householder tridiagonalization. `w` is the transposed working matrix:
/// `w[b * n + a]` plays the role of `V[a][b]` in the EISPACK formulation.
/// On exit `d` is the diagonal and `e[1..]` the subdiagonal; with
/// `accumulate`, row `i` of `w` holds the `i`-th column of the orthogonal
/// transform.
fn tred2(n: usize, w: &mut [f64], d: &mut [f64], e: &mut [f64], accumulate: bool) {
    if n == 0 {
        return;
    }
    for j in 0..n {
        d[j] = w[j * n + n - 1];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = w[j * n + i - 1];
                w[j * n + i] = 0.0;
                w[i * n + j] = 0.0;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].fill(0.0);

            for j in 0..i {
                f = d[j];
                w[i * n + j] = f;
                let row = &w[j * n..j * n + i];
                g = e[j] + row[j] * f;
                for k in (j + 1)..i {
                    g += row[k] * d[k];
                    e[k] += row[k] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let row = &mut w[j * n..j * n + i];
                for k in j..i {
                    row[k] -= f * e[k] + g * d[k];
                }
                d[j] = w[j * n + i - 1];
                w[j * n + i] = 0.0;
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for j in 0..n {
            d[j] = w[j * n + j];
        }
        e[0] = 0.0;
        return;
    }

    for i in 0..n - 1 {
        w[i * n + n - 1] = w[i * n + i];
        w[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = w[(i + 1) * n + k] / h;
            }
            for j in 0..=i {
                let (head, tail) = w.split_at_mut((i + 1) * n);
                let hv = &tail[..=i];
                let row = &mut head[j * n..j * n + i + 1];
                let g: f64 = hv.iter().zip(row.iter()).map(|(a, b)| a * b).sum();
                for (x, dk) in row.iter_mut().zip(&d[..=i]) {
                    *x -= g * dk;
                }
            }
        }
        for k in 0..=i {
            w[(i + 1) * n + k] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = w[j * n + n - 1];
        w[j * n + n - 1] = 0.0;
    }
    w[(n - 1) * n + n - 1] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL on the tridiagonal `(d, e)`. Rotations are applied to
/// the rows of `w` when given.
fn tql(n: usize, d: &mut [f64], e: &mut [f64], mut w: Option<&mut [f64]>) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    let mut total_iterations = 0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        // e[n-1] is zero, so m < n.
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                total_iterations += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NonConvergence {
                        iterations: total_iterations,
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in &mut d[l + 2..n] {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(w) = w.as_deref_mut() {
                        let (lo, hi) = w.split_at_mut((i + 1) * n);
                        let row_i = &mut lo[i * n..];
                        let row_i1 = &mut hi[..n];
                        for (a, b) in row_i.iter_mut().zip(row_i1.iter_mut()) {
                            let t = *b;
                            *b = s * *a + c * t;
                            *a = c * *a - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dissim(n: usize, v: &[f64]) -> DissimilarityMatrix {
        DissimilarityMatrix::from_row_major(n, v.to_vec()).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    fn lcg_matrix(n: usize, seed: u64) -> SymMatrix {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let x = next();
                data[i * n + j] = x;
                data[j * n + i] = x;
            }
        }
        SymMatrix::from_row_major(n, data).unwrap()
    }

    #[test]
    fn double_center_zero() {
        let b = double_center(&DissimilarityMatrix::zeros(3));
        assert!(b.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn double_center_equilateral() {
        let d = dissim(3, &[0., 2., 2., 2., 0., 2., 2., 2., 0.]);
        let b = double_center(&d);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 2.0 / 3.0 } else { -1.0 / 3.0 };
                assert_close(b.get(i, j), want, 1e-15);
            }
        }
    }

    #[test]
    fn double_center_collinear_spectrum() {
        let d = dissim(3, &[0., 1., 9., 1., 0., 4., 9., 4., 0.]);
        let b = double_center(&d);
        // centered positions (−4/3, −1/3, 5/3) give B = ppᵀ
        let p = [-4.0 / 3.0, -1.0 / 3.0, 5.0 / 3.0];
        for i in 0..3 {
            for j in 0..3 {
                assert_close(b.get(i, j), p[i] * p[j], 1e-14);
            }
        }
        let lam = eig_sym(&b).unwrap().eigenvalues;
        assert_close(lam[0], 14.0 / 3.0, 1e-13);
        assert_close(lam[1], 0.0, 1e-13);
        assert_close(lam[2], 0.0, 1e-13);
    }

    #[test]
    fn rejects_non_hollow_and_asymmetric() {
        assert!(matches!(
            DissimilarityMatrix::from_row_major(2, vec![1.0, 2.0, 2.0, 0.0]),
            Err(Error::NotHollow { i: 0, .. })
        ));
        assert!(matches!(
            DissimilarityMatrix::from_row_major(2, vec![0.0, 2.0, 3.0, 0.0]),
            Err(Error::NotSymmetric { i: 0, j: 1, .. })
        ));
        assert!(matches!(
            SymMatrix::from_row_major(0, vec![]),
            Err(Error::EmptyMatrix)
        ));
        assert!(matches!(
            SymMatrix::from_row_major(2, vec![0.0; 3]),
            Err(Error::BadLength { .. })
        ));
        assert!(matches!(
            SymMatrix::from_row_major(1, vec![f64::NAN]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn eig_diagonal() {
        let s = eig_sym(&SymMatrix::from_diag(&[1.0, 3.0, -2.0])).unwrap();
        assert_eq!(s.eigenvalues, vec![3.0, 1.0, -2.0]);
        assert_eq!(s.vector(0), &[0.0, 1.0, 0.0]);
        assert_eq!(s.vector(1), &[1.0, 0.0, 0.0]);
        assert_eq!(s.vector(2), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn eig_two_by_two() {
        let b = SymMatrix::from_row_major(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let s = eig_sym(&b).unwrap();
        assert_close(s.eigenvalues[0], 1.0, 1e-15);
        assert_close(s.eigenvalues[1], -1.0, 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_close(s.vector(0)[0].abs(), h, 1e-15);
        assert_close(s.vector(0)[0] * s.vector(0)[1], 0.5, 1e-15);
        assert_close(s.vector(1)[0] * s.vector(1)[1], -0.5, 1e-15);
    }

    #[test]
    fn eig_equilateral_gram() {
        let d = dissim(3, &[0., 2., 2., 2., 0., 2., 2., 2., 0.]);
        let s = eig_sym(&double_center(&d)).unwrap();
        assert_close(s.eigenvalues[0], 1.0, 1e-14);
        assert_close(s.eigenvalues[1], 1.0, 1e-14);
        assert_close(s.eigenvalues[2], 0.0, 1e-14);
    }

    #[test]
    fn single_point() {
        let d = DissimilarityMatrix::zeros(1);
        let b = double_center(&d);
        assert_eq!(b.as_slice(), &[0.0]);
        let s = eig_sym(&b).unwrap();
        assert_eq!(s.eigenvalues, vec![0.0]);
        let c = centered_eig(&d).unwrap();
        assert_eq!(c.eigenvalues, vec![0.0]);
    }

    #[test]
    fn gram_to_dissim_examples() {
        let m = gram_to_dissim(&SymMatrix::identity(2));
        assert_eq!(m.as_slice(), &[0.0, 2.0, 2.0, 0.0]);
        let z = gram_to_dissim(&SymMatrix::zeros(3));
        assert!(z.as_slice().iter().all(|&x| x == 0.0));
        let d = dissim(3, &[0., 2., 2., 2., 0., 2., 2., 2., 0.]);
        let back = gram_to_dissim(&double_center(&d));
        for (a, b) in back.as_slice().iter().zip(d.as_slice()) {
            assert_close(*a, *b, 1e-14);
        }
    }

    #[test]
    fn eigenvalues_only_matches_full() {
        for (n, seed) in [(1, 1), (2, 2), (7, 3), (40, 4), (90, 5)] {
            let b = lcg_matrix(n, seed);
            let full = eig_sym(&b).unwrap().eigenvalues;
            let vals = eigvals_sym(&b).unwrap();
            for (a, c) in full.iter().zip(&vals) {
                assert_close(*a, *c, 1e-12);
            }
        }
    }

    #[test]
    fn centered_eig_isolates_constant_vector() {
        let b = lcg_matrix(30, 9);
        let d = gram_to_dissim(&b);
        let s = centered_eig(&d).unwrap();
        let zero = s.eigenvalues.iter().position(|&x| x == 0.0).unwrap();
        let c = 1.0 / (30f64).sqrt();
        assert!(s.vector(zero).iter().all(|&x| (x - c).abs() < 1e-15));
        for l in (0..30).filter(|&l| l != zero) {
            let dot: f64 = s.vector(l).iter().sum();
            assert!(dot.abs() < 1e-12, "axis {l} not centered: {dot}");
        }
        assert!(s.orthonormality_error() < ORTHONORMALITY_TOL);
        let bc = double_center(&d);
        assert!(s.reconstruction_error(&bc) < RECONSTRUCTION_TOL * bc.max_abs().max(1.0));
    }

    #[test]
    fn repeated_eigenvalues_stay_orthonormal() {
        // identity plus rank one: eigenvalue 1 with multiplicity n − 1
        let n = 25;
        let b = SymMatrix::from_upper_fn(n, |i, j| if i == j { 2.0 } else { 1.0 });
        let s = eig_sym(&b).unwrap();
        assert_close(s.eigenvalues[0], n as f64 + 1.0, 1e-12);
        assert!(s.eigenvalues[1..].iter().all(|&x| (x - 1.0).abs() < 1e-12));
        assert!(s.orthonormality_error() < ORTHONORMALITY_TOL);
    }

    #[test]
    fn sign_convention() {
        let s = eig_sym(&lcg_matrix(12, 77)).unwrap();
        for i in 0..12 {
            let v = s.vector(i);
            let big = v.iter().cloned().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            assert!(big > 0.0);
        }
    }
}
