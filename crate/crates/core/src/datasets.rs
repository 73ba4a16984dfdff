//! Synthetic non-Euclidean dissimilarities and perturbed point clouds.
//!
//! Every random draw comes from a ChaCha8 generator seeded with the caller's
//! seed and switched to a per-point (or per-row) stream, so outputs do not
//! depend on thread count or evaluation order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::linalg::DissimilarityMatrix;
use crate::par::{map_range, Execution};

/// `n` points in `d` dimensions, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    n: usize,
    d: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(n: usize, d: usize, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != n * d {
            return Err(Error::BadLength {
                n,
                expected: n * d,
                got: coords.len(),
            });
        }
        if let Some(pos) = coords.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                i: pos / d.max(1),
                j: pos % d.max(1),
            });
        }
        Ok(Self { n, d, coords })
    }

    /// Uniform points in `[0, 1)^d`, one stream per point.
    pub fn uniform(n: usize, d: usize, seed: u64) -> Self {
        let rows = map_range(Execution::default(), n, |i| {
            let mut rng = stream(seed, i as u64);
            (0..d).map(|_| rng.random::<f64>()).collect::<Vec<_>>()
        });
        Self {
            n,
            d,
            coords: rows.concat(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        sq_dist(self.point(i), self.point(j)).sqrt()
    }
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(out_of_range("n", n, "at least 2"));
    }
    Ok(())
}

/// Squared Euclidean distances.
pub fn squared_distances(p: &PointCloud) -> DissimilarityMatrix {
    DissimilarityMatrix::from_upper_fn(p.n(), |i, j| sq_dist(p.point(i), p.point(j)))
}

/// `Σ_{a<plus_dims} (x_ia − x_ja)² − Σ_{a≥plus_dims} (x_ia − x_ja)²`.
pub fn signed_sq_dissim(p: &PointCloud, plus_dims: usize) -> DissimilarityMatrix {
    let split = plus_dims.min(p.dim());
    DissimilarityMatrix::from_upper_fn(p.n(), |i, j| {
        let (a, b) = (p.point(i), p.point(j));
        sq_dist(&a[..split], &b[..split]) - sq_dist(&a[split..], &b[split..])
    })
}

/// Coordinates of the random-simplex construction in `n` dimensions.
///
/// The first `⌈n/10⌉` coordinates are uniform in `[0, 0.01]`, the next
/// `n − ⌈n/10⌉ − 1` uniform in `[0, √(0.5 / (n − ⌈n/10⌉ − 1))]`, and the last
/// coordinate of point `i` (1-based) is `i · 0.3 / n`.
pub fn random_simplex_points(n: usize, seed: u64) -> Result<(PointCloud, usize)> {
    check_n(n)?;
    let p = n.div_ceil(10);
    let q = n - p - 1;
    let hi = if q > 0 { (0.5 / q as f64).sqrt() } else { 0.0 };
    let rows = map_range(Execution::default(), n, |i| {
        let mut rng = stream(seed, i as u64);
        let mut row = Vec::with_capacity(n);
        row.extend((0..p).map(|_| rng.random_range(0.0..=0.01)));
        row.extend((0..q).map(|_| rng.random_range(0.0..=hi)));
        row.push((i + 1) as f64 * 0.3 / n as f64);
        row
    });
    Ok((PointCloud::new(n, n, rows.concat())?, p))
}

/// Random-simplex dissimilarities: `D_ij` is the signed value
/// `Σ_plus (x_i − x_j)² − Σ_minus (x_i − x_j)²`.
pub fn gen_random_simplex(n: usize, seed: u64) -> Result<DissimilarityMatrix> {
    let (points, plus) = random_simplex_points(n, seed)?;
    Ok(signed_sq_dissim(&points, plus))
}

/// Parameters of the Euclidean-ball generator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallParams {
    pub dim: usize,
    /// Centers are uniform in `[0, side]^dim`.
    pub side: f64,
    /// Probability of a small radius, uniform in `[0, max_radius]`.
    pub p_small: f64,
    pub max_radius: f64,
    /// Otherwise the radius is `factor` times the gap to the closest other ball.
    pub factor: f64,
}

impl Default for BallParams {
    fn default() -> Self {
        Self {
            dim: 10,
            side: 100.0,
            p_small: 0.9,
            max_radius: 5.0,
            factor: 0.8,
        }
    }
}

/// Euclidean-ball dissimilarities with default parameters.
pub fn gen_euclidean_ball(n: usize, seed: u64) -> Result<DissimilarityMatrix> {
    gen_euclidean_ball_with(n, seed, BallParams::default())
}

/// Balls are given radii in index order. For the large-radius branch the gap
/// to an already placed ball `j` is `‖c_i − c_j‖ − r_j` (floored at 0), to a
/// later ball it is the center distance. `D_ij = d·|d|` with
/// `d = ‖c_i − c_j‖ − r_i − r_j`.
pub fn gen_euclidean_ball_with(n: usize, seed: u64, params: BallParams) -> Result<DissimilarityMatrix> {
    check_n(n)?;
    if !(0.0..=1.0).contains(&params.p_small) {
        return Err(out_of_range("p_small", params.p_small, "[0, 1]"));
    }
    let draws = map_range(Execution::default(), n, |i| {
        let mut rng = stream(seed, i as u64);
        let center: Vec<f64> = (0..params.dim)
            .map(|_| rng.random_range(0.0..=params.side))
            .collect();
        let u: f64 = rng.random();
        let small = rng.random_range(0.0..=params.max_radius);
        (center, u, small)
    });
    let centers = PointCloud::new(
        n,
        params.dim,
        draws.iter().flat_map(|(c, _, _)| c.iter().copied()).collect(),
    )?;
    let mut radius = vec![0.0; n];
    for i in 0..n {
        let (_, u, small) = &draws[i];
        radius[i] = if *u < params.p_small {
            *small
        } else {
            let gap = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let c = centers.distance(i, j);
                    if j < i {
                        (c - radius[j]).max(0.0)
                    } else {
                        c
                    }
                })
                .fold(f64::INFINITY, f64::min);
            params.factor * gap
        };
    }
    Ok(DissimilarityMatrix::from_upper_fn(n, |i, j| {
        let d = centers.distance(i, j) - radius[i] - radius[j];
        d * d.abs()
    }))
}

#[derive(Copy, Clone, PartialEq)]
struct HeapItem {
    dist: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapItem {
        dist: 0.0,
        node: source,
    });
    while let Some(HeapItem { dist: du, node: u }) = heap.pop() {
        if du > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = du + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(HeapItem { dist: nd, node: v });
            }
        }
    }
    dist
}

fn count_components(adj: &[Vec<(usize, f64)>]) -> usize {
    let mut seen = vec![false; adj.len()];
    let mut components = 0;
    for s in 0..adj.len() {
        if seen[s] {
            continue;
        }
        components += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    components
}

/// Squared shortest-path lengths on the symmetrized `k_nn`-nearest-neighbor graph.
pub fn perturb_knn(p: &PointCloud, k_nn: usize) -> Result<DissimilarityMatrix> {
    let n = p.n();
    check_n(n)?;
    if k_nn == 0 || k_nn >= n {
        return Err(out_of_range("k_nn", k_nn, format!("1..{n}")));
    }
    let neighbors = map_range(Execution::default(), n, |i| {
        let mut others: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (p.distance(i, j), j))
            .collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        others.truncate(k_nn);
        others
    });
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, list) in neighbors.iter().enumerate() {
        for &(w, j) in list {
            if !adj[i].iter().any(|&(v, _)| v == j) {
                adj[i].push((j, w));
                adj[j].push((i, w));
            }
        }
    }
    let components = count_components(&adj);
    if components > 1 {
        return Err(Error::Disconnected { components });
    }
    let paths = map_range(Execution::default(), n, |s| dijkstra(&adj, s));
    Ok(DissimilarityMatrix::from_upper_fn(n, |i, j| {
        // symmetric by construction up to rounding; use one triangle
        let l = paths[i][j];
        l * l
    }))
}

/// Noise scale used when none is given: the largest pairwise distance / 500.
pub fn auto_noise_sigma(p: &PointCloud) -> f64 {
    let n = p.n();
    let mut max: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            max = max.max(p.distance(i, j));
        }
    }
    max / 500.0
}

/// `D_ij = (‖p_i − p_j‖ + g_ij)²` with `g_ij ~ N(0, σ²)` drawn once per pair.
/// `None` selects [`auto_noise_sigma`].
pub fn perturb_noise(p: &PointCloud, sigma: Option<f64>, seed: u64) -> Result<DissimilarityMatrix> {
    let n = p.n();
    check_n(n)?;
    let sigma = match sigma {
        Some(s) if s > 0.0 && s.is_finite() => s,
        Some(s) => return Err(out_of_range("sigma", s, "positive")),
        None => auto_noise_sigma(p),
    };
    let noise = map_range(Execution::default(), n, |i| {
        let mut rng = stream(seed, i as u64);
        (i + 1..n)
            .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
            .collect::<Vec<_>>()
    });
    Ok(DissimilarityMatrix::from_upper_fn(n, |i, j| {
        let v = p.distance(i, j) + noise[i][j - i - 1];
        v * v
    }))
}

/// Each point keeps each coordinate with probability `keep_prob`; `D_ij` is
/// the squared distance over the coordinates both points kept.
pub fn perturb_missing(p: &PointCloud, keep_prob: f64, seed: u64) -> Result<DissimilarityMatrix> {
    let n = p.n();
    check_n(n)?;
    if !(keep_prob > 0.0 && keep_prob <= 1.0) {
        return Err(out_of_range("keep_prob", keep_prob, "(0, 1]"));
    }
    let masks = map_range(Execution::default(), n, |i| {
        let mut rng = stream(seed, i as u64);
        (0..p.dim())
            .map(|_| rng.random::<f64>() < keep_prob)
            .collect::<Vec<bool>>()
    });
    for i in 0..n {
        for j in (i + 1)..n {
            if !masks[i].iter().zip(&masks[j]).any(|(a, b)| *a && *b) {
                return Err(Error::EmptyIntersection { i, j });
            }
        }
    }
    Ok(DissimilarityMatrix::from_upper_fn(n, |i, j| {
        let (a, b) = (p.point(i), p.point(j));
        (0..p.dim())
            .filter(|&t| masks[i][t] && masks[j][t])
            .map(|t| (a[t] - b[t]) * (a[t] - b[t]))
            .sum()
    }))
}

/// Number of ordered triples `(i, j, l)`, `i < j`, with `D_ij > D_il + D_lj`,
/// treating the stored values themselves as the dissimilarities.
pub fn triangle_violations(d: &DissimilarityMatrix) -> usize {
    let n = d.n();
    let mut count = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = d.get(i, j);
            let slack = 1e-12 * dij.abs();
            count += (0..n)
                .filter(|&l| l != i && l != j && dij > d.get(i, l) + d.get(l, j) + slack)
                .count();
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{double_center, eigvals_sym};

    #[test]
    fn simplex_basic() {
        let a = gen_random_simplex(50, 3).unwrap();
        let b = gen_random_simplex(50, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gen_random_simplex(50, 4).unwrap());
        assert!(gen_random_simplex(1, 0).is_err());
        let (pts, plus) = random_simplex_points(20, 1).unwrap();
        assert_eq!(plus, 2);
        assert!((pts.point(19)[19] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn identical_points_have_zero_dissimilarity() {
        let p = PointCloud::new(3, 2, vec![0.1, 0.2, 0.1, 0.2, 0.5, 0.0]).unwrap();
        let d = signed_sq_dissim(&p, 1);
        assert_eq!(d.get(0, 1), 0.0);
        assert!((d.get(0, 2) - (0.16 - 0.04)).abs() < 1e-15);
    }

    #[test]
    fn zero_radius_balls_are_euclidean() {
        let params = BallParams {
            p_small: 1.0,
            max_radius: 0.0,
            ..BallParams::default()
        };
        let d = gen_euclidean_ball_with(60, 5, params).unwrap();
        let lam = eigvals_sym(&double_center(&d)).unwrap();
        let tol = 1e-9 * lam[0];
        assert!(lam.iter().all(|&l| l > -tol));
    }

    #[test]
    fn overlapping_balls_go_negative() {
        let d = gen_euclidean_ball_with(
            40,
            2,
            BallParams {
                side: 5.0,
                ..BallParams::default()
            },
        )
        .unwrap();
        assert!(d.as_slice().iter().any(|&x| x < 0.0));
        assert_eq!(d, gen_euclidean_ball_with(40, 2, BallParams { side: 5.0, ..BallParams::default() }).unwrap());
    }

    #[test]
    fn knn_on_a_line() {
        let p = PointCloud::new(4, 1, vec![0.0, 1.0, 3.0, 6.0]).unwrap();
        let d = perturb_knn(&p, 1).unwrap();
        assert_eq!(d.get(0, 3), 36.0);
        assert_eq!(d.get(1, 3), 25.0);
        let full = perturb_knn(&p, 3).unwrap();
        assert_eq!(full, squared_distances(&p));
        let far = PointCloud::new(4, 1, vec![0.0, 1.0, 100.0, 101.0]).unwrap();
        assert!(matches!(perturb_knn(&far, 1), Err(Error::Disconnected { components: 2 })));
    }

    #[test]
    fn knn_on_a_circle_violates_triangles() {
        let n = 30;
        let coords: Vec<f64> = (0..n)
            .flat_map(|i| {
                let t = i as f64 / n as f64 * std::f64::consts::TAU;
                [t.cos(), t.sin()]
            })
            .collect();
        let p = PointCloud::new(n, 2, coords).unwrap();
        let d = perturb_knn(&p, 2).unwrap();
        assert!(triangle_violations(&d) > 0);
    }

    #[test]
    fn noise_behaviour() {
        let p = PointCloud::uniform(200, 5, 1);
        let tiny = perturb_noise(&p, Some(1e-14), 3).unwrap();
        let exact = squared_distances(&p);
        for (a, b) in tiny.as_slice().iter().zip(exact.as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(perturb_noise(&p, None, 3).unwrap(), perturb_noise(&p, None, 3).unwrap());
        let noisy = perturb_noise(&p, Some(0.05), 3).unwrap();
        let lam = eigvals_sym(&double_center(&noisy)).unwrap();
        assert!(lam.iter().filter(|&&l| l < -1e-9 * lam[0]).count() > 0);
        assert!(perturb_noise(&p, Some(-1.0), 3).is_err());
    }

    #[test]
    fn missing_behaviour() {
        let p = PointCloud::uniform(100, 40, 2);
        assert_eq!(perturb_missing(&p, 1.0, 0).unwrap(), squared_distances(&p));
        let d = perturb_missing(&p, 0.5, 7).unwrap();
        assert!(triangle_violations(&d) > 0);
        let one = PointCloud::uniform(50, 1, 2);
        assert!(matches!(
            perturb_missing(&one, 0.3, 1),
            Err(Error::EmptyIntersection { .. })
        ));
        assert!(perturb_missing(&p, 0.0, 1).is_err());
    }
}
