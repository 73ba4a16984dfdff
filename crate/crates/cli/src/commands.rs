//! One function per subcommand. Each validates its arguments, computes
//! everything in memory, and only then writes its outputs.

use std::fmt::Write as _;
use std::path::Path;

use neuc_mds::datasets::{
    gen_euclidean_ball, gen_random_simplex, perturb_knn, perturb_missing, perturb_noise, PointCloud,
};
use neuc_mds::embedding::embed_spectrum;
use neuc_mds::landmark::{embed_with_model, fit_landmarks_with};
use neuc_mds::linalg::centered_eig;
use neuc_mds::metrics::report;
use neuc_mds::par::Execution;
use neuc_mds::rmt::{run_grid, theory_normalized, GridConfig, Mode};
use neuc_mds::selection::{select_cmds, select_neuc, select_plus};
use neuc_mds::{reconstruct, sweep as core_sweep, DissimilarityMatrix, Embedding, Method, StressReport};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::format::{
    embedding_to_text, points_to_text, read_matrix, read_points, write_atomic, write_matrix,
    EmbeddingFile,
};
use crate::{
    EmbedArgs, GenerateArgs, GenerateKind, LandmarkArgs, PerturbArgs, PerturbKind, RmtArgs,
    SelectArgs, SweepArgs,
};

/// Embedding summary written as JSON: identification fields, then the
/// report fields at top level.
#[derive(Debug, Serialize)]
pub struct EmbedSummary {
    pub method: Method,
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub s: usize,
    #[serde(flatten)]
    pub report: StressReport,
}

#[derive(Debug, Serialize)]
pub struct SelectSummary {
    pub method: Method,
    pub n: usize,
    pub k: usize,
    pub chosen: Vec<usize>,
    pub chosen_values: Vec<f64>,
    pub r: usize,
    pub s: usize,
    pub bound_c1: f64,
    pub bound_c2: f64,
    pub objective: f64,
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(CliError::usage(format!("--k must be in 1..={n}, got {k}")));
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes `text` to `path`, or hands it back for stdout.
fn emit(path: Option<&Path>, text: String) -> Result<String> {
    match path {
        Some(p) => {
            write_atomic(p, text.as_bytes())?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn summary(emb: &Embedding, report: StressReport) -> EmbedSummary {
    EmbedSummary {
        method: emb.method,
        n: emb.n,
        k: emb.k(),
        r: emb.selection.r,
        s: emb.selection.s,
        report,
    }
}

pub fn embed(a: &EmbedArgs) -> Result<String> {
    if a.k == 0 {
        return Err(CliError::usage("--k must be positive"));
    }
    let d = read_matrix(&a.input)?;
    check_k(a.k, d.n())?;
    let spec = centered_eig(&d)?;
    let emb = embed_spectrum(&spec, a.k, a.method.into())?;
    let d_hat = reconstruct(&emb);
    let rep = report(&d, &d_hat, &emb, Some(&spec))?;
    let json = to_json(&summary(&emb, rep))?;

    write_atomic(&a.output, embedding_to_text(&EmbeddingFile::from(&emb)).as_bytes())?;
    if let Some(p) = &a.dhat {
        write_matrix(p, &d_hat, a.format)?;
    }
    emit(a.report.as_deref(), json)
}

pub fn select(a: &SelectArgs) -> Result<String> {
    if a.k == 0 {
        return Err(CliError::usage("--k must be positive"));
    }
    let d = read_matrix(&a.input)?;
    check_k(a.k, d.n())?;
    let lambda = centered_eig(&d)?.eigenvalues;
    let method: Method = a.method.into();
    let sel = match method {
        Method::Cmds => select_cmds(&lambda, a.k)?,
        Method::Neuc => select_neuc(&lambda, a.k)?,
        Method::Plus => select_plus(&lambda, a.k)?,
    };
    let out = SelectSummary {
        method,
        n: d.n(),
        k: a.k,
        chosen_values: sel.chosen.iter().map(|&i| lambda[i]).collect(),
        chosen: sel.chosen,
        r: sel.r,
        s: sel.s,
        bound_c1: sel.bound_c1,
        bound_c2: sel.bound_c2,
        objective: sel.objective,
    };
    emit(a.output.as_deref(), to_json(&out)?)
}

pub fn generate(a: &GenerateArgs) -> Result<String> {
    if a.n == 0 {
        return Err(CliError::usage("--n must be positive"));
    }
    let d = match a.kind {
        GenerateKind::Simplex => gen_random_simplex(a.n, a.seed)?,
        GenerateKind::Balls => gen_euclidean_ball(a.n, a.seed)?,
    };
    write_matrix(&a.output, &d, a.format)?;
    Ok(String::new())
}

fn perturb_points(a: &PerturbArgs) -> Result<PointCloud> {
    match (&a.input, a.n) {
        (Some(path), _) => read_points(path),
        (None, Some(n)) if n > 0 && a.dim > 0 => Ok(PointCloud::uniform(n, a.dim, a.seed)),
        (None, Some(_)) => Err(CliError::usage("--n and --dim must be positive")),
        (None, None) => Err(CliError::usage("either --input or --n is required")),
    }
}

pub fn perturb(a: &PerturbArgs) -> Result<String> {
    if let Some(s) = a.sigma {
        if !(s.is_finite() && s > 0.0) {
            return Err(CliError::usage(format!("--sigma must be positive, got {s}")));
        }
    }
    let (d, points) = match a.kind {
        PerturbKind::Knn => {
            let k_nn = a
                .k_nn
                .ok_or_else(|| CliError::usage("--k-nn is required for --kind knn"))?;
            if k_nn == 0 {
                return Err(CliError::usage("--k-nn must be positive"));
            }
            let p = perturb_points(a)?;
            (perturb_knn(&p, k_nn)?, p)
        }
        PerturbKind::Noise => {
            let p = perturb_points(a)?;
            (perturb_noise(&p, a.sigma, a.seed)?, p)
        }
        PerturbKind::Missing => {
            let keep = a
                .keep_prob
                .ok_or_else(|| CliError::usage("--keep-prob is required for --kind missing"))?;
            if !(keep > 0.0 && keep <= 1.0) {
                return Err(CliError::usage(format!("--keep-prob must be in (0, 1], got {keep}")));
            }
            let p = perturb_points(a)?;
            (perturb_missing(&p, keep, a.seed)?, p)
        }
    };
    write_matrix(&a.output, &d, a.format)?;
    if let Some(path) = &a.points_output {
        write_atomic(path, points_to_text(&points).as_bytes())?;
    }
    Ok(String::new())
}

/// `a:b:step` (inclusive), `a:b` (step 1) or a single `k`.
pub fn parse_k_list(s: &str) -> Result<Vec<usize>> {
    let bad = || CliError::usage(format!("--k-list expects a:b:step, got '{s}'"));
    let parts: Vec<usize> = s
        .split(':')
        .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (a, b, step) = match parts[..] {
        [k] => (k, k, 1),
        [a, b] => (a, b, 1),
        [a, b, step] => (a, b, step),
        _ => return Err(bad()),
    };
    if a == 0 || step == 0 || b < a {
        return Err(bad());
    }
    Ok((a..=b).step_by(step).collect())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const SWEEP_HEADER: &str =
    "k,method,stress_sq,stress,c1,c2,c3,scaled_additive,avg_distortion,neg_dissim_count,neg_axes_count";

pub fn sweep(a: &SweepArgs) -> Result<String> {
    let ks = parse_k_list(&a.k_list)?;
    if a.method.is_empty() {
        return Err(CliError::usage("--method needs at least one value"));
    }
    let d: DissimilarityMatrix = read_matrix(&a.input)?;
    if let Some(&k) = ks.iter().find(|&&k| k > d.n()) {
        check_k(k, d.n())?;
    }
    let methods: Vec<Method> = a.method.iter().map(|&m| m.into()).collect();
    let rows = core_sweep(&d, &ks, &methods)?;
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let r = &row.report;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            row.k,
            row.method,
            r.stress_sq,
            r.stress,
            opt(r.c1),
            opt(r.c2),
            opt(r.c3),
            r.scaled_additive,
            opt(r.avg_distortion),
            r.neg_dissim_count,
            r.neg_axes_count
        )
        .unwrap();
    }
    emit(a.output.as_deref(), out)
}

pub const RMT_HEADER: &str = "c,mode,r,theory,norm_constant,norm_per_n,empirical,rel_err";

pub fn rmt(a: &RmtArgs) -> Result<String> {
    if a.n < 2 {
        return Err(CliError::usage("--n must be at least 2"));
    }
    if !(a.sigma.is_finite() && a.sigma > 0.0) {
        return Err(CliError::usage(format!("--sigma must be positive, got {}", a.sigma)));
    }
    if let Some(c) = a.c_list.iter().find(|c| !(**c > 0.0 && **c <= 1.0)) {
        return Err(CliError::usage(format!("--c-list values must be in (0, 1], got {c}")));
    }
    if a.c_list.is_empty() || a.mode.is_empty() {
        return Err(CliError::usage("--c-list and --mode need at least one value"));
    }
    let cfg = GridConfig {
        n: a.n,
        sigma: a.sigma,
        c_list: a.c_list.clone(),
        modes: a.mode.iter().map(|&m| m.into()).collect(),
        trials: a.trials,
        seed: a.seed,
        dist: a.dist.into(),
    };
    let rows = run_grid(&cfg)?;
    let mut out = String::from(RMT_HEADER);
    out.push('\n');
    for row in rows {
        let (constant, per_n) = theory_normalized(row.c, row.mode)?;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.c,
            Mode::name(row.mode),
            row.r,
            row.theory,
            constant,
            per_n,
            opt(row.empirical),
            opt(row.rel_err)
        )
        .unwrap();
    }
    emit(a.output.as_deref(), out)
}

pub fn landmark(a: &LandmarkArgs) -> Result<String> {
    if a.k == 0 {
        return Err(CliError::usage("--k must be positive"));
    }
    if a.landmarks <= a.k {
        return Err(CliError::usage(format!(
            "--landmarks must exceed --k ({} <= {})",
            a.landmarks, a.k
        )));
    }
    let d = read_matrix(&a.input)?;
    if a.landmarks > d.n() {
        return Err(CliError::usage(format!(
            "--landmarks must be at most n = {}, got {}",
            d.n(),
            a.landmarks
        )));
    }
    let model = fit_landmarks_with(&d, a.landmarks, a.k, a.method.into(), a.seed, a.strategy.into())?;
    let emb = embed_with_model(Execution::default(), &d, &model);
    let d_hat = reconstruct(&emb);
    let rep = report(&d, &d_hat, &emb, None)?;
    let json = to_json(&summary(&emb, rep))?;
    write_atomic(&a.output, embedding_to_text(&EmbeddingFile::from(&emb)).as_bytes())?;
    emit(a.report.as_deref(), json)
}
