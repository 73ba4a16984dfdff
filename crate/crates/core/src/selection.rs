//! Choosing which eigenvalues to keep.
//!
//! For a kept set `S` of size `k` the dropped eigenvalues contribute
//! `4 Σ_{i∉S} λ_i²` and `4 (Σ_{i∉S} λ_i)²` to the STRESS (the latter divided by
//! `1 + k` once the kept values are shifted optimally). Both objectives are
//! minimized exactly by a greedy walk that only ever takes the largest
//! remaining positive or the most negative remaining eigenvalue.

use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::par::compensated_sum;

/// Eigenvalues with `|λ| ≤ ZERO_REL_TOL · max|λ|` are treated as zero.
pub const ZERO_REL_TOL: f64 = 1e-12;
/// `H(S)` is treated as zero when `|H(S)| ≤ H_REL_TOL · Σ|λ|`.
pub const H_REL_TOL: f64 = 1e-12;
/// Largest `n` accepted by [`select_bruteforce`].
pub const BRUTEFORCE_MAX_N: usize = 20;

/// Which lower bound is being minimized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// `Σ λ² + (Σ λ)²` over dropped values.
    Neuc,
    /// `Σ λ² + (Σ λ)² / (1 + k)` over dropped values.
    Plus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Chosen indices into the eigenvalue vector, ascending.
    pub chosen: Vec<usize>,
    /// Indicator of `chosen`, length `n`.
    pub w: Vec<bool>,
    /// Chosen indices in the order they were picked.
    pub order: Vec<usize>,
    /// Chosen values that are not negative (zeros included).
    pub r: usize,
    /// Chosen negative values.
    pub s: usize,
    /// `4 Σ_{i∉S} λ_i²`.
    pub bound_c1: f64,
    /// `4 (Σ_{i∉S} λ_i)²`, divided by `1 + k` for [`Objective::Plus`].
    pub bound_c2: f64,
    pub objective: f64,
}

impl SelectionResult {
    pub fn k(&self) -> usize {
        self.chosen.len()
    }

    /// Sum of the eigenvalues that were not chosen.
    pub fn dropped_sum(&self, lambda: &[f64]) -> f64 {
        compensated_sum(
            lambda
                .iter()
                .zip(&self.w)
                .filter(|(_, &w)| !w)
                .map(|(&l, _)| l),
        )
    }
}

/// Absolute threshold below which an eigenvalue counts as zero.
pub fn zero_tolerance(lambda: &[f64]) -> f64 {
    ZERO_REL_TOL * lambda.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Lower bound terms `(4 Σ λ², 4 (Σ λ)² [/(1+k)])` over the values with `w_i = false`.
pub fn bound_terms(lambda: &[f64], w: &[bool], mode: Objective) -> (f64, f64) {
    let (c1, c2, _) = bound_parts(lambda, w, mode);
    (c1, c2)
}

/// Objective value of the indicator `w`, the quantity the selectors minimize.
pub fn objective_value(lambda: &[f64], w: &[bool], mode: Objective) -> f64 {
    bound_parts(lambda, w, mode).2
}

/// `(C1, C2, C1 + C2)`. The sum is formed as `4((1+k)Q + H²)/(1+k)` so that
/// subsets with equal objectives in exact arithmetic compare equal whenever
/// `Q` and `H` are exact.
fn bound_parts(lambda: &[f64], w: &[bool], mode: Objective) -> (f64, f64, f64) {
    let k = w.iter().filter(|&&x| x).count();
    let dropped = || lambda.iter().zip(w).filter(|(_, &w)| !w).map(|(&l, _)| l);
    let q = compensated_sum(dropped().map(|l| l * l));
    let h = compensated_sum(dropped());
    match mode {
        Objective::Neuc => (4.0 * q, 4.0 * h * h, 4.0 * (q + h * h)),
        Objective::Plus => {
            let m = (1 + k) as f64;
            (4.0 * q, 4.0 * h * h / m, 4.0 * (m * q + h * h) / m)
        }
    }
}

fn validate(lambda: &[f64], k: usize, sorted: bool) -> Result<()> {
    let n = lambda.len();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if let Some(i) = lambda.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { i, j: 0 });
    }
    if k == 0 || k > n {
        return Err(out_of_range("k", k, format!("1..={n}")));
    }
    if sorted {
        if let Some(i) = (1..n).find(|&i| lambda[i] > lambda[i - 1]) {
            return Err(Error::Unsorted { index: i });
        }
    }
    Ok(())
}

fn finish(lambda: &[f64], order: Vec<usize>, mode: Objective) -> SelectionResult {
    let n = lambda.len();
    let mut w = vec![false; n];
    for &i in &order {
        w[i] = true;
    }
    let mut chosen = order.clone();
    chosen.sort_unstable();
    let s = chosen.iter().filter(|&&i| lambda[i] < 0.0).count();
    let (bound_c1, bound_c2, objective) = bound_parts(lambda, &w, mode);
    SelectionResult {
        r: chosen.len() - s,
        s,
        chosen,
        w,
        order,
        bound_c1,
        bound_c2,
        objective,
    }
}

/// Cursor over the sorted spectrum: positives are taken from the front,
/// negatives from the back, zero-class values only when nothing else is left.
struct Fronts<'a> {
    lambda: &'a [f64],
    pos: usize,
    pos_end: usize,
    neg: usize,
    neg_end: usize,
    zero: usize,
    taken: Vec<bool>,
}

impl<'a> Fronts<'a> {
    fn new(lambda: &'a [f64]) -> Self {
        let tol = zero_tolerance(lambda);
        let n = lambda.len();
        let pos_end = lambda.iter().take_while(|&&x| x > tol).count();
        let neg_count = lambda.iter().rev().take_while(|&&x| x < -tol).count();
        Self {
            lambda,
            pos: 0,
            pos_end,
            neg: n,
            neg_end: n - neg_count,
            zero: pos_end,
            taken: vec![false; n],
        }
    }

    fn positive(&self) -> Option<usize> {
        (self.pos < self.pos_end).then_some(self.pos)
    }

    fn negative(&self) -> Option<usize> {
        (self.neg > self.neg_end).then(|| self.neg - 1)
    }

    fn take(&mut self, i: usize) {
        if Some(i) == self.positive() {
            self.pos += 1;
        } else if Some(i) == self.negative() {
            self.neg -= 1;
        } else {
            debug_assert_eq!(i, self.zero);
            self.zero += 1;
        }
        self.taken[i] = true;
    }

    fn next_zero(&self) -> usize {
        self.zero
    }

    /// `(Σ λ², Σ λ)` over values not yet taken.
    fn remaining(&self) -> (f64, f64) {
        let rest = || {
            self.lambda
                .iter()
                .zip(&self.taken)
                .filter(|(_, &t)| !t)
                .map(|(&l, _)| l)
        };
        (compensated_sum(rest().map(|l| l * l)), compensated_sum(rest()))
    }
}

/// Greedy minimizer of `Σ_{i∉S} λ_i² + (Σ_{i∉S} λ_i)²` over `|S| = k`.
///
/// Each step looks at `H`, the sum of the values not yet chosen, and takes the
/// largest-magnitude remaining value of the same sign. When `H` is zero the
/// larger magnitude of the two fronts wins, positive on ties.
pub fn select_neuc(lambda: &[f64], k: usize) -> Result<SelectionResult> {
    validate(lambda, k, true)?;
    let h_tol = H_REL_TOL * lambda.iter().map(|x| x.abs()).sum::<f64>();
    let mut fronts = Fronts::new(lambda);
    let mut order = Vec::with_capacity(k);
    while order.len() < k {
        let (_, h) = fronts.remaining();
        let pick = match (fronts.positive(), fronts.negative()) {
            (Some(p), _) if h > h_tol => p,
            (_, Some(q)) if h < -h_tol => q,
            (Some(p), Some(q)) => {
                if lambda[p] >= -lambda[q] {
                    p
                } else {
                    q
                }
            }
            (Some(p), None) => p,
            (None, Some(q)) => q,
            (None, None) => fronts.next_zero(),
        };
        fronts.take(pick);
        order.push(pick);
    }
    Ok(finish(lambda, order, Objective::Neuc))
}

/// Scores `(A₁, A₂)` of adding the positive `lp` or the negative `ln` when
/// `size` values are already chosen and the unchosen values have square sum
/// `q` and sum `h`.
pub fn plus_scores(q: f64, h: f64, size: usize, lp: f64, ln: f64) -> (f64, f64) {
    let m = (size + 2) as f64;
    let a = |l: f64| (q - l * l) + (h - l) * (h - l) / m;
    (a(lp), a(ln))
}

/// Greedy minimizer of `Σ_{i∉W} λ_i² + (Σ_{i∉W} λ_i)² / (1 + k)` over `|W| = k`.
///
/// Each step compares adding the largest remaining positive with adding the
/// most negative remaining value, under the objective scaled for the set size
/// after the step, and keeps the smaller (the negative on a tie).
pub fn select_plus(lambda: &[f64], k: usize) -> Result<SelectionResult> {
    validate(lambda, k, true)?;
    let mut fronts = Fronts::new(lambda);
    let mut order = Vec::with_capacity(k);
    while order.len() < k {
        let pick = match (fronts.positive(), fronts.negative()) {
            (Some(p), Some(q)) => {
                let (lp, ln) = (lambda[p], lambda[q]);
                let (_, h) = fronts.remaining();
                // A₁ − A₂ = (ln − lp)·[(lp + ln) + (2H − lp − ln)/m]; ln − lp < 0.
                let m = (order.len() + 2) as f64;
                let factor = (lp + ln) + (2.0 * h - lp - ln) / m;
                if factor > 0.0 {
                    p
                } else {
                    q
                }
            }
            (Some(p), None) => p,
            (None, Some(q)) => q,
            (None, None) => fronts.next_zero(),
        };
        fronts.take(pick);
        order.push(pick);
    }
    Ok(finish(lambda, order, Objective::Plus))
}

/// The `k` algebraically largest values. The bound terms use the Neuc objective.
pub fn select_cmds(lambda: &[f64], k: usize) -> Result<SelectionResult> {
    validate(lambda, k, true)?;
    Ok(finish(lambda, (0..k).collect(), Objective::Neuc))
}

/// Exhaustive minimizer over all `k`-subsets; among equal objectives the
/// lexicographically smallest index set is returned.
pub fn select_bruteforce(lambda: &[f64], k: usize, mode: Objective) -> Result<SelectionResult> {
    validate(lambda, k, false)?;
    let n = lambda.len();
    if n > BRUTEFORCE_MAX_N {
        return Err(out_of_range(
            "n",
            n,
            format!("at most {BRUTEFORCE_MAX_N} for brute force"),
        ));
    }
    let mut combo: Vec<usize> = (0..k).collect();
    let mut w = vec![false; n];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        w.fill(false);
        for &i in &combo {
            w[i] = true;
        }
        let obj = objective_value(lambda, &w, mode);
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, combo.clone()));
        }
        // next combination in lexicographic order
        let Some(pos) = (0..k).rev().find(|&i| combo[i] < n - k + i) else {
            break;
        };
        combo[pos] += 1;
        for j in pos + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
    let (_, set) = best.expect("at least one subset");
    Ok(finish(lambda, set, mode))
}

/// Dispatch on the objective.
pub fn select(lambda: &[f64], k: usize, mode: Objective) -> Result<SelectionResult> {
    match mode {
        Objective::Neuc => select_neuc(lambda, k),
        Objective::Plus => select_plus(lambda, k),
    }
}

/// True when `chosen` is the `r` largest positives plus the `s` most negative
/// values of the sorted `lambda` (zero-class values may fill in either way
/// once all nonzero values of a sign are exhausted).
pub fn has_two_front_structure(lambda: &[f64], result: &SelectionResult) -> bool {
    let tol = zero_tolerance(lambda);
    let n = lambda.len();
    let pos: Vec<usize> = result
        .chosen
        .iter()
        .copied()
        .filter(|&i| lambda[i] > tol)
        .collect();
    let neg: Vec<usize> = result
        .chosen
        .iter()
        .copied()
        .filter(|&i| lambda[i] < -tol)
        .collect();
    let zeros = result.chosen.len() - pos.len() - neg.len();
    let pos_prefix = pos.iter().enumerate().all(|(a, &i)| a == i);
    let neg_suffix = neg.iter().rev().enumerate().all(|(a, &i)| i == n - 1 - a);
    let pos_total = lambda.iter().filter(|&&x| x > tol).count();
    let neg_total = lambda.iter().filter(|&&x| x < -tol).count();
    let zeros_forced = zeros == 0 || (pos.len() == pos_total && neg.len() == neg_total);
    pos_prefix && neg_suffix && zeros_forced
}
