//! Wigner matrices and the semicircle-law predictions for the dropped-eigenvalue
//! error of top-k selection and of the signed greedy selection.
//!
//! For a symmetric `n × n` matrix with i.i.d. entries of variance `σ²` the
//! spectrum of `A/√n` fills `(−2σ, 2σ)` with density `√(4σ² − x²) / (2πσ²)`.
//! Selecting everything beyond `(2 − r)σ√n` (one tail for top-k, both tails for
//! the signed rule) keeps a fraction `c` of the eigenvalues; the error is
//! `e = Σ_dropped λ² + (Σ_dropped λ)²`, without the factor 4 of the STRESS
//! decomposition.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Result};
use crate::linalg::{eigvals_sym, SymMatrix};
use crate::par::{map_range, Execution};
use crate::selection::{select_cmds, select_neuc};

const BISECTION_LO: f64 = 1e-15;
const BISECTION_HI: f64 = 2.0;
const BISECTION_ITERS: usize = 200;

/// Which selection rule is being modelled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `k` largest eigenvalues.
    Cmds,
    /// Both tails.
    Neuc,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Cmds => "cmds",
            Mode::Neuc => "neuc",
        }
    }
}

/// Entry distribution of [`sample_wigner`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    #[default]
    Gaussian,
    /// `±σ` with equal probability.
    Rademacher,
}

fn a_and_root(r: f64) -> (f64, f64) {
    (1.0 - r / 2.0, (r * (1.0 - r / 4.0)).max(0.0).sqrt())
}

/// Fraction of eigenvalues selected at threshold parameter `r ∈ [0, 2]`.
pub fn selected_fraction(r: f64, mode: Mode) -> f64 {
    let (a, s) = a_and_root(r);
    let tail = 0.5 - a.asin() / PI - a * s / PI;
    match mode {
        Mode::Cmds => tail,
        Mode::Neuc => 2.0 * tail,
    }
}

/// Threshold parameter `r` that selects a fraction `c`, by bisection.
///
/// Top-k selection cannot exceed half the spectrum; `c ≥ ½` gives `r = 2`.
pub fn solve_r(c: f64, mode: Mode) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(out_of_range("c", c, "(0, 1)"));
    }
    if mode == Mode::Cmds && c >= 0.5 {
        return Ok(BISECTION_HI);
    }
    let (mut lo, mut hi) = (BISECTION_LO, BISECTION_HI);
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if selected_fraction(mid, mode) < c {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Normalized error `e / (n²σ²) = constant + per_n · n` at selected fraction `c`.
pub fn theory_normalized(c: f64, mode: Mode) -> Result<(f64, f64)> {
    let r = solve_r(c, mode)?;
    let (a, s) = a_and_root(r);
    let poly = 1.0 - 2.0 * r + r * r / 2.0;
    Ok(match mode {
        Mode::Cmds => {
            let constant = 0.5 + a.asin() / PI + a * poly * s / PI;
            let per_n = 16.0 / (9.0 * PI * PI) * (r * (1.0 - r / 4.0)).powi(3);
            (constant, per_n)
        }
        Mode::Neuc => (2.0 * a.asin() / PI + 2.0 * a * poly * s / PI, 0.0),
    })
}

/// Predicted `e` for an `n × n` Wigner matrix with entry variance `σ²`.
pub fn theory_error(n: usize, sigma: f64, c: f64, mode: Mode) -> Result<f64> {
    let (constant, per_n) = theory_normalized(c, mode)?;
    let n = n as f64;
    Ok(n * n * sigma * sigma * (constant + per_n * n))
}

/// Both predictions at one `(n, σ, c)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RmtTheory {
    pub n: usize,
    pub sigma: f64,
    pub c: f64,
    pub r_c: f64,
    pub r_n: f64,
    pub e_c: f64,
    pub e_n: f64,
}

impl RmtTheory {
    pub fn new(n: usize, sigma: f64, c: f64) -> Result<Self> {
        if sigma.is_nan() || sigma <= 0.0 {
            return Err(out_of_range("sigma", sigma, "positive"));
        }
        Ok(Self {
            n,
            sigma,
            c,
            r_c: solve_r(c, Mode::Cmds)?,
            r_n: solve_r(c, Mode::Neuc)?,
            e_c: theory_error(n, sigma, c, Mode::Cmds)?,
            e_n: theory_error(n, sigma, c, Mode::Neuc)?,
        })
    }
}

/// Symmetric matrix with i.i.d. upper-triangle entries (diagonal included) of
/// variance `σ²`. Row `i` of the upper triangle uses its own stream.
pub fn sample_wigner(n: usize, sigma: f64, dist: Distribution, seed: u64) -> Result<SymMatrix> {
    sample_wigner_with(Execution::default(), n, sigma, dist, seed)
}

pub fn sample_wigner_with(
    exec: Execution,
    n: usize,
    sigma: f64,
    dist: Distribution,
    seed: u64,
) -> Result<SymMatrix> {
    if n < 2 {
        return Err(out_of_range("n", n, "at least 2"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(out_of_range("sigma", sigma, "positive"));
    }
    let rows = map_range(exec, n, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        (i..n)
            .map(|_| match dist {
                Distribution::Gaussian => sigma * rng.sample::<f64, _>(StandardNormal),
                Distribution::Rademacher => {
                    if rng.random::<bool>() {
                        sigma
                    } else {
                        -sigma
                    }
                }
            })
            .collect::<Vec<f64>>()
    });
    Ok(SymMatrix::from_upper_fn_with(exec, n, |i, j| rows[i][j - i]))
}

/// `e` for keeping `k` eigenvalues of the (descending) spectrum `lambda`.
pub fn error_from_spectrum(lambda: &[f64], k: usize, mode: Mode) -> Result<f64> {
    let sel = match mode {
        Mode::Cmds => select_cmds(lambda, k)?,
        Mode::Neuc => select_neuc(lambda, k)?,
    };
    Ok(sel.objective / 4.0)
}

/// `e` for `B` itself (no centering). `k = n` gives 0.
pub fn empirical_error(b: &SymMatrix, k: usize, mode: Mode) -> Result<f64> {
    error_from_spectrum(&eigvals_sym(b)?, k, mode)
}

/// Semicircle mass of `(a, b)` for the normalized spectrum `λ/√n`.
pub fn semicircle_mass(a: f64, b: f64, sigma: f64) -> f64 {
    let r = 2.0 * sigma;
    let f = |x: f64| {
        let x = x.clamp(-r, r);
        0.5 * (x * (r * r - x * x).max(0.0).sqrt() + r * r * (x / r).asin())
    };
    (f(b) - f(a)) / (2.0 * PI * sigma * sigma)
}

/// One histogram bin: `(lo, hi, empirical fraction, semicircle mass)` on the `λ/√n` scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub empirical: f64,
    pub theory: f64,
}

/// Equal-width bins over `(−2σ, 2σ)` of the spectrum scaled by `1/√n`.
pub fn semicircle_histogram(eigenvalues: &[f64], sigma: f64, bins: usize) -> Vec<HistogramBin> {
    let n = eigenvalues.len();
    let scale = (n as f64).sqrt();
    let width = 4.0 * sigma / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|b| -2.0 * sigma + b as f64 * width).collect();
    (0..bins)
        .map(|b| {
            let (lo, hi) = (edges[b], edges[b + 1]);
            let last = b + 1 == bins;
            let count = eigenvalues
                .iter()
                .map(|l| l / scale)
                .filter(|&x| x >= lo && (x < hi || (last && x <= hi)))
                .count();
            HistogramBin {
                lo,
                hi,
                empirical: count as f64 / n as f64,
                theory: semicircle_mass(lo, hi, sigma),
            }
        })
        .collect()
}

/// One `(c, mode)` row of the theory/empirics comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub c: f64,
    pub mode: Mode,
    pub r: f64,
    pub theory: f64,
    /// Mean over trials; `None` when no trials were run.
    pub empirical: Option<f64>,
    pub rel_err: Option<f64>,
}

/// Configuration of [`run_grid`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n: usize,
    pub sigma: f64,
    pub c_list: Vec<f64>,
    pub modes: Vec<Mode>,
    pub trials: usize,
    pub seed: u64,
    pub dist: Distribution,
}

/// Theory and mean empirical error per `(c, mode)`, `c` outermost. Trial `t`
/// samples with seed `seed + t`; trials run in parallel and are averaged in
/// trial order.
pub fn run_grid(cfg: &GridConfig) -> Result<Vec<GridRow>> {
    run_grid_with(Execution::default(), cfg)
}

pub fn run_grid_with(exec: Execution, cfg: &GridConfig) -> Result<Vec<GridRow>> {
    let ks: Vec<usize> = cfg
        .c_list
        .iter()
        .map(|&c| ((c * cfg.n as f64).round() as usize).clamp(1, cfg.n))
        .collect();
    let spectra: Vec<Vec<f64>> = map_range(exec, cfg.trials, |t| {
        let b = sample_wigner_with(
            Execution::Sequential,
            cfg.n,
            cfg.sigma,
            cfg.dist,
            cfg.seed.wrapping_add(t as u64),
        )?;
        eigvals_sym(&b)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (&c, &k) in cfg.c_list.iter().zip(&ks) {
        for &mode in &cfg.modes {
            let r = solve_r(c, mode)?;
            let theory = theory_error(cfg.n, cfg.sigma, c, mode)?;
            let empirical = if spectra.is_empty() {
                None
            } else {
                let mut total = 0.0;
                for lambda in &spectra {
                    total += error_from_spectrum(lambda, k, mode)?;
                }
                Some(total / spectra.len() as f64)
            };
            rows.push(GridRow {
                c,
                mode,
                r,
                theory,
                empirical,
                rel_err: empirical.map(|e| (e - theory).abs() / theory),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Midpoint-rule integral of `√(r(1−r/4))`-type closed forms, independent of the asin expressions.
    fn fraction_by_quadrature(r: f64, mode: Mode) -> f64 {
        let steps = 200_000;
        let lo = 2.0 - r;
        let h = r / steps as f64;
        let tail: f64 = (0..steps)
            .map(|s| {
                let x = lo + (s as f64 + 0.5) * h;
                (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI) * h
            })
            .sum();
        match mode {
            Mode::Cmds => tail,
            Mode::Neuc => 2.0 * tail,
        }
    }

    #[test]
    fn fraction_matches_quadrature() {
        for r in [0.1, 0.5, 1.0, 1.7, 2.0] {
            for mode in [Mode::Cmds, Mode::Neuc] {
                let a = selected_fraction(r, mode);
                let b = fraction_by_quadrature(r, mode);
                assert!((a - b).abs() < 1e-8, "{r} {mode:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn solve_r_limits_and_consistency() {
        assert!(solve_r(1e-9, Mode::Neuc).unwrap() < 1e-4);
        assert!(solve_r(1.0 - 1e-12, Mode::Neuc).unwrap() > 1.99);
        assert_eq!(solve_r(0.5, Mode::Cmds).unwrap(), 2.0);
        for c in [0.05, 0.2, 0.45] {
            for mode in [Mode::Cmds, Mode::Neuc] {
                let r = solve_r(c, mode).unwrap();
                assert!((selected_fraction(r, mode) - c).abs() < 1e-10);
            }
        }
        assert!(solve_r(0.0, Mode::Neuc).is_err());
        assert!(solve_r(1.0, Mode::Neuc).is_err());
    }

    #[test]
    fn neuc_theory_table_points() {
        let (e, _) = theory_normalized(0.5, Mode::Neuc).unwrap();
        assert!((e - 0.1063).abs() < 5e-5);
        let (e, _) = theory_normalized(0.9, Mode::Neuc).unwrap();
        assert!((e - 0.0008).abs() < 5e-5);
        let (c, p) = theory_normalized(0.05, Mode::Cmds).unwrap();
        assert!((c - 0.8432).abs() < 5e-5);
        assert!((p - 0.0078).abs() < 5e-5);
    }

    #[test]
    fn neuc_theory_decreasing() {
        let vals: Vec<f64> = (1..20)
            .map(|i| theory_normalized(i as f64 / 20.0, Mode::Neuc).unwrap().0)
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn wigner_determinism_and_moments() {
        let a = sample_wigner(100, 1.5, Distribution::Gaussian, 3).unwrap();
        assert_eq!(a, sample_wigner(100, 1.5, Distribution::Gaussian, 3).unwrap());
        assert_eq!(
            a,
            sample_wigner_with(Execution::Sequential, 100, 1.5, Distribution::Gaussian, 3).unwrap()
        );
        let mean = a.as_slice().iter().sum::<f64>() / 10_000.0;
        assert!(mean.abs() < 3.0 * 1.5 / 100.0 * 3.0);
        let r = sample_wigner(50, 2.0, Distribution::Rademacher, 1).unwrap();
        assert!(r.as_slice().iter().all(|&x| x.abs() == 2.0));
        assert!(sample_wigner(1, 1.0, Distribution::Gaussian, 0).is_err());
    }

    #[test]
    fn full_selection_has_no_error() {
        let b = sample_wigner(30, 1.0, Distribution::Gaussian, 2).unwrap();
        assert_eq!(empirical_error(&b, 30, Mode::Neuc).unwrap(), 0.0);
        assert_eq!(empirical_error(&b, 30, Mode::Cmds).unwrap(), 0.0);
    }

    #[test]
    fn semicircle_total_mass() {
        assert!((semicircle_mass(-2.0, 2.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((semicircle_mass(-6.0, 0.0, 3.0) - 0.5).abs() < 1e-15);
    }
}
