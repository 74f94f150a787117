//! Bayesian reviewer-score calibration.
//!
//! Model: each observed review score decomposes as
//!
//! ```text
//! y_{i,j} = f_i + b_j + ε_{i,j}
//! ```
//!
//! with paper quality `f_i ~ N(μ, α_f)`, reviewer offset `b_j ~ N(0, α_b)`,
//! and subjective noise `ε_{i,j} ~ N(0, σ²)`, all independent. Marginally the
//! scores are jointly Gaussian with the scale-normalized covariance
//!
//! ```text
//! K̂[(i,j),(k,l)] = δ_{i,k} + δ_{j,l}·r_b + δ_{i,k}·δ_{j,l}·r_s
//! ```
//!
//! where `r_b = α_b/α_f` and `r_s = σ²/α_f`. Given the two ratios, the
//! signal variance has the closed-form profile optimum
//! `α_f* = yᵀK̂⁻¹y / |y|`, so fitting reduces to a two-dimensional grid
//! search over `(r_b, r_s)` on the profiled negative log likelihood
//!
//! ```text
//! NLL = (|y|/2)·ln α_f* + ½·ln|K̂| + |y|/2        (2π terms dropped)
//! ```
//!
//! with `μ` fixed at the raw-score mean. Everything factorizes over the
//! connected components of the paper–reviewer graph and is computed through
//! a reviewer-space Woodbury factorization (see [`solver`]), never by
//! materializing K̂ — the dense matrix is available via
//! [`CovarianceModel::dense_block`] for inspection and testing.
//!
//! Calibrated outputs are Gaussian posterior summaries: per review the
//! conditional of `f_i + ε_{i,j}` (the calibrated score), per paper the
//! conditional of `f_i` (used for ranking), and per reviewer the conditional
//! mean of the offset `b_j`.

mod graph;
pub(crate) mod solver;

pub use graph::{connected_components, AssignmentGraph, ComponentBlock, Components, GraphError};

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{PaperId, ReviewerId};
use solver::{ComponentLayout, ComponentSolver};

/// Diagonal jitter added to K̂ before factorization, as a fraction of the
/// unit signal variance. Guards near-singular blocks; at score scale the
/// induced bias is far below every reported digit.
pub const JITTER: f64 = 1e-8;

/// Default grid bounds for the reviewer-offset ratio α_b/α_f.
pub const DEFAULT_RATIO_B_BOUNDS: (f64, f64) = (1e-3, 10.0);
/// Default grid bounds for the noise ratio σ²/α_f.
pub const DEFAULT_RATIO_S_BOUNDS: (f64, f64) = (1e-2, 10.0);
/// Default nodes per grid axis.
pub const DEFAULT_GRID_STEPS: usize = 40;
/// Default refinement: one pass at 10× finer resolution around the best node.
pub const DEFAULT_REFINE_FACTOR: usize = 10;

/// Errors from calibration routines.
#[derive(Debug, Error)]
pub enum CalibError {
    #[error("score vector has {scores} entries but the graph has {edges} edges")]
    LengthMismatch { scores: usize, edges: usize },
    #[error("empty graph: calibration needs at least one review")]
    Empty,
    #[error("degenerate scores: all {n} values equal {value}; variance ratios are unidentifiable")]
    DegenerateScores { n: usize, value: f64 },
    #[error("invalid parameter {name} = {value}: {why}")]
    InvalidParam { name: &'static str, value: f64, why: &'static str },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
    #[error("all {nodes} grid nodes failed to factorize; last error: {last}")]
    GridFailed { nodes: usize, last: solver::SolverError },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Variance parameters of the calibration model.
///
/// The two ratio accessors are exact quotients of the stored variances, so
/// `ratio_b = alpha_b/alpha_f` and `ratio_s = sigma2/alpha_f` hold by
/// construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationParams {
    /// Global mean score μ.
    pub mu: f64,
    /// Objective-quality variance α_f (score² units).
    pub alpha_f: f64,
    /// Reviewer-offset variance α_b (score² units).
    pub alpha_b: f64,
    /// Subjective-noise variance σ² (score² units).
    pub sigma2: f64,
}

impl CalibrationParams {
    pub fn new(mu: f64, alpha_f: f64, alpha_b: f64, sigma2: f64) -> Result<Self, CalibError> {
        let check = |name: &'static str, value: f64| -> Result<(), CalibError> {
            if !value.is_finite() {
                return Err(CalibError::InvalidParam { name, value, why: "must be finite" });
            }
            Ok(())
        };
        check("mu", mu)?;
        check("alpha_f", alpha_f)?;
        check("alpha_b", alpha_b)?;
        check("sigma2", sigma2)?;
        if alpha_f <= 0.0 {
            return Err(CalibError::InvalidParam {
                name: "alpha_f",
                value: alpha_f,
                why: "signal variance must be > 0",
            });
        }
        if alpha_b < 0.0 {
            return Err(CalibError::InvalidParam {
                name: "alpha_b",
                value: alpha_b,
                why: "offset variance must be ≥ 0",
            });
        }
        if sigma2 <= 0.0 {
            return Err(CalibError::InvalidParam {
                name: "sigma2",
                value: sigma2,
                why: "noise variance must be > 0",
            });
        }
        Ok(CalibrationParams { mu, alpha_f, alpha_b, sigma2 })
    }

    /// Builds parameters from the dimensionless ratios used by the grid.
    pub fn from_ratios(
        mu: f64,
        alpha_f: f64,
        ratio_b: f64,
        ratio_s: f64,
    ) -> Result<Self, CalibError> {
        Self::new(mu, alpha_f, alpha_f * ratio_b, alpha_f * ratio_s)
    }

    /// Offset/signal ratio α_b/α_f.
    pub fn ratio_b(&self) -> f64 {
        self.alpha_b / self.alpha_f
    }

    /// Noise/signal ratio σ²/α_f.
    pub fn ratio_s(&self) -> f64 {
        self.sigma2 / self.alpha_f
    }

    /// Fraction of score variance that is objective:
    /// α_f / (α_f + σ²). This is also the model-implied correlation between
    /// two independent committee scores of the same paper.
    pub fn objectivity(&self) -> f64 {
        self.alpha_f / (self.alpha_f + self.sigma2)
    }
}

fn check_ratios(ratio_b: f64, ratio_s: f64) -> Result<(), CalibError> {
    if !ratio_b.is_finite() || ratio_b < 0.0 {
        return Err(CalibError::InvalidParam {
            name: "ratio_b",
            value: ratio_b,
            why: "must be finite and ≥ 0",
        });
    }
    if !ratio_s.is_finite() || ratio_s <= 0.0 {
        return Err(CalibError::InvalidParam {
            name: "ratio_s",
            value: ratio_s,
            why: "must be finite and > 0 (zero subjective noise makes repeated structure singular)",
        });
    }
    Ok(())
}

/// Compiled per-component structure of a graph, reusable across ratio nodes.
pub(crate) struct Compiled {
    layouts: Vec<ComponentLayout>,
    components: Components,
}

impl Compiled {
    fn build(graph: &AssignmentGraph) -> Self {
        let components = connected_components(graph);
        let layouts = components
            .blocks
            .iter()
            .map(|b| ComponentLayout::build(b, graph))
            .collect();
        Compiled { layouts, components }
    }
}

/// The scale-normalized covariance K̂ at fixed ratios, held in structured
/// (never dense) form, partitioned by connected component.
pub struct CovarianceModel<'g> {
    graph: &'g AssignmentGraph,
    compiled: Compiled,
    pub ratio_b: f64,
    pub ratio_s: f64,
}

/// Builds the covariance model K̂ for a graph at the given ratios.
pub fn build_covariance(
    graph: &AssignmentGraph,
    ratio_b: f64,
    ratio_s: f64,
) -> Result<CovarianceModel<'_>, CalibError> {
    check_ratios(ratio_b, ratio_s)?;
    Ok(CovarianceModel { graph, compiled: Compiled::build(graph), ratio_b, ratio_s })
}

impl<'g> CovarianceModel<'g> {
    pub fn graph(&self) -> &'g AssignmentGraph {
        self.graph
    }

    /// The edge partition by connected component.
    pub fn blocks(&self) -> &[ComponentBlock] {
        &self.compiled.components.blocks
    }

    /// Exact K̂ entry for an edge pair (no jitter):
    /// δ_paper + δ_reviewer·r_b + δ_paper·δ_reviewer·r_s.
    pub fn khat_entry(&self, e1: usize, e2: usize) -> f64 {
        let (p1, r1) = self.graph.edges()[e1];
        let (p2, r2) = self.graph.edges()[e2];
        let mut k = 0.0;
        if p1 == p2 {
            k += 1.0;
        }
        if r1 == r2 {
            k += self.ratio_b;
        }
        if p1 == p2 && r1 == r2 {
            k += self.ratio_s;
        }
        k
    }

    /// Dense K̂ block of one component (exact entries, no jitter), in the
    /// block's local edge order. Intended for small instances and tests.
    pub fn dense_block(&self, block: usize) -> Array2<f64> {
        let edges = &self.compiled.components.blocks[block].edges;
        let n = edges.len();
        Array2::from_shape_fn((n, n), |(a, b)| self.khat_entry(edges[a], edges[b]))
    }

    fn gather(&self, c: usize, y: &[f64]) -> Vec<f64> {
        self.compiled.layouts[c].edges.iter().map(|&ge| y[ge]).collect()
    }
}

/// Profiled signal variance α_f* = yᵀK̂⁻¹y / |y| over centered scores.
///
/// A zero vector yields 0.0, which downstream likelihood evaluation treats
/// as degenerate (the NLL is undefined there).
pub fn profile_alpha_f(centered_scores: &[f64], cov: &CovarianceModel) -> Result<f64, CalibError> {
    if centered_scores.len() != cov.graph.n_edges() {
        return Err(CalibError::LengthMismatch {
            scores: centered_scores.len(),
            edges: cov.graph.n_edges(),
        });
    }
    if centered_scores.is_empty() {
        return Err(CalibError::Empty);
    }
    let mut quad = 0.0;
    for (c, lay) in cov.compiled.layouts.iter().enumerate() {
        let solver = ComponentSolver::new(c, lay, cov.ratio_b, cov.ratio_s + JITTER, false)?;
        let y_local = cov.gather(c, centered_scores);
        quad += solver.quad_y(&y_local)?;
    }
    Ok(quad / centered_scores.len() as f64)
}

/// Internal single-pass evaluation of (ln|K̂|, α_f*) reusing compiled layouts.
fn eval_node(
    compiled: &Compiled,
    centered: &[f64],
    ratio_b: f64,
    ratio_s: f64,
) -> Result<(f64, f64), CalibError> {
    let mut ldet = 0.0;
    let mut quad = 0.0;
    for (c, lay) in compiled.layouts.iter().enumerate() {
        let solver = ComponentSolver::new(c, lay, ratio_b, ratio_s + JITTER, false)?;
        ldet += solver.ldet();
        let y_local: Vec<f64> = lay.edges.iter().map(|&ge| centered[ge]).collect();
        quad += solver.quad_y(&y_local)?;
    }
    let n = centered.len() as f64;
    Ok((ldet, quad / n))
}

fn nll_from(ldet: f64, alpha_star: f64, n: usize) -> Result<f64, CalibError> {
    if !(alpha_star.is_finite() && alpha_star > 0.0) {
        return Err(CalibError::DegenerateScores { n, value: alpha_star });
    }
    let nf = n as f64;
    Ok(0.5 * nf * alpha_star.ln() + 0.5 * ldet + 0.5 * nf)
}

/// Profiled negative log marginal likelihood at fixed ratios.
///
/// Scores are centered at their mean internally (μ is always the raw-score
/// mean), making the value translation invariant. Natural logarithms; the
/// constant 2π terms are omitted.
pub fn negative_log_likelihood(
    scores: &[f64],
    graph: &AssignmentGraph,
    ratio_b: f64,
    ratio_s: f64,
) -> Result<f64, CalibError> {
    check_ratios(ratio_b, ratio_s)?;
    let centered = center(scores, graph)?;
    let compiled = Compiled::build(graph);
    let (ldet, alpha_star) = eval_node(&compiled, &centered, ratio_b, ratio_s)?;
    nll_from(ldet, alpha_star, scores.len())
}

fn center(scores: &[f64], graph: &AssignmentGraph) -> Result<Vec<f64>, CalibError> {
    if scores.len() != graph.n_edges() {
        return Err(CalibError::LengthMismatch { scores: scores.len(), edges: graph.n_edges() });
    }
    if scores.is_empty() {
        return Err(CalibError::Empty);
    }
    let mu = scores.iter().sum::<f64>() / scores.len() as f64;
    Ok(scores.iter().map(|s| s - mu).collect())
}

/// Two-dimensional logarithmic search grid over (ratio_b, ratio_s).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Inclusive bounds for ratio_b (both > 0; log-spaced axis).
    pub ratio_b_bounds: (f64, f64),
    /// Inclusive bounds for ratio_s (both > 0; log-spaced axis).
    pub ratio_s_bounds: (f64, f64),
    /// Nodes on the ratio_b axis (≥ 1).
    pub ratio_b_steps: usize,
    /// Nodes on the ratio_s axis (≥ 1).
    pub ratio_s_steps: usize,
    /// Refinement resolution multiplier: after the coarse pass, a window of
    /// ±1 coarse cell around the best node is rescanned at a step of
    /// `coarse_step^(1/refine_factor)`. 0 disables refinement.
    pub refine_factor: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            ratio_b_bounds: DEFAULT_RATIO_B_BOUNDS,
            ratio_s_bounds: DEFAULT_RATIO_S_BOUNDS,
            ratio_b_steps: DEFAULT_GRID_STEPS,
            ratio_s_steps: DEFAULT_GRID_STEPS,
            refine_factor: DEFAULT_REFINE_FACTOR,
        }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<(), CalibError> {
        for (name, (lo, hi)) in
            [("ratio_b_bounds", self.ratio_b_bounds), ("ratio_s_bounds", self.ratio_s_bounds)]
        {
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo) {
                return Err(CalibError::InvalidGrid(format!(
                    "{name} must satisfy 0 < lo ≤ hi, got ({lo}, {hi})"
                )));
            }
        }
        if self.ratio_b_steps == 0 || self.ratio_s_steps == 0 {
            return Err(CalibError::InvalidGrid("grid needs at least one node per axis".into()));
        }
        Ok(())
    }

    fn axis(bounds: (f64, f64), steps: usize) -> Vec<f64> {
        if steps == 1 {
            return vec![bounds.0];
        }
        let (llo, lhi) = (bounds.0.ln(), bounds.1.ln());
        (0..steps)
            .map(|k| (llo + (lhi - llo) * k as f64 / (steps - 1) as f64).exp())
            .collect()
    }

    /// Log-spaced refinement window of ±1 coarse cell around `best`,
    /// clamped to the axis bounds, at `refine_factor`× finer resolution.
    fn refine_axis(&self, bounds: (f64, f64), steps: usize, best: f64) -> Vec<f64> {
        if steps <= 1 || self.refine_factor <= 1 {
            return vec![best];
        }
        let coarse_step = ((bounds.1 / bounds.0).ln() / (steps - 1) as f64).exp();
        let fine_step = coarse_step.powf(1.0 / self.refine_factor as f64);
        let f = self.refine_factor as i64;
        let mut nodes: Vec<f64> = (-f..=f)
            .map(|k| (best * fine_step.powi(k as i32)).clamp(bounds.0, bounds.1))
            .collect();
        nodes.dedup();
        nodes
    }
}

/// One evaluated grid node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridNode {
    pub ratio_b: f64,
    pub ratio_s: f64,
    pub nll: f64,
}

/// How the grid search went: best coarse node, best node after refinement,
/// and evaluation counts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDiagnostics {
    pub coarse_best: GridNode,
    pub refined_best: GridNode,
    pub nodes_evaluated: usize,
    pub nodes_failed: usize,
}

/// Posterior mean and variance of one Gaussian marginal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorValue {
    pub mean: f64,
    pub var: f64,
}

/// Index-aligned posterior summaries for a (scores, graph, params) triple:
/// entries follow the graph's edge / paper / reviewer index order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummaries {
    /// Calibrated score per review: posterior of f_i + ε_{i,j}.
    pub per_review: Vec<PosteriorValue>,
    /// Posterior of paper quality f_i (mean includes μ).
    pub per_paper: Vec<PosteriorValue>,
    /// Posterior mean of reviewer offset b_j.
    pub per_reviewer_mean: Vec<f64>,
}

/// Per-paper posterior row of a serialized fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaperPosterior {
    pub paper_id: PaperId,
    pub mean: f64,
    pub var: f64,
}

/// Per-reviewer posterior row of a serialized fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReviewerPosterior {
    pub reviewer_id: ReviewerId,
    pub bias_mean: f64,
}

/// Per-review posterior row of a serialized fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReviewPosterior {
    pub paper_id: PaperId,
    pub reviewer_id: ReviewerId,
    pub mean: f64,
    pub var: f64,
}

/// A fitted calibration: parameters at the grid optimum, the NLL there, the
/// full posterior tables keyed by id, and grid diagnostics. Serializes to a
/// self-contained JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFit {
    pub params: CalibrationParams,
    pub nll: f64,
    pub per_paper: Vec<PaperPosterior>,
    pub per_reviewer: Vec<ReviewerPosterior>,
    pub per_review: Vec<ReviewPosterior>,
    pub grid: GridDiagnostics,
}

impl CalibrationFit {
    /// Posterior mean paper quality keyed by paper id.
    pub fn paper_quality(&self) -> std::collections::BTreeMap<&PaperId, f64> {
        self.per_paper.iter().map(|p| (&p.paper_id, p.mean)).collect()
    }

    /// Calibrated per-review means keyed by (paper, reviewer).
    pub fn review_means(&self) -> std::collections::BTreeMap<(&PaperId, &ReviewerId), f64> {
        self.per_review.iter().map(|r| ((&r.paper_id, &r.reviewer_id), r.mean)).collect()
    }
}

/// Gaussian posterior summaries at fixed parameters.
///
/// Conditioning uses `params.mu` as the prior mean (not the sample mean of
/// `scores`), so the function is a pure map of its arguments. Papers or
/// reviewers outside every review (possible only in hand-built graphs) get
/// their prior back: mean μ / variance α_f for papers, mean 0 for reviewers.
pub fn calibrated_scores(
    scores: &[f64],
    graph: &AssignmentGraph,
    params: &CalibrationParams,
) -> Result<PosteriorSummaries, CalibError> {
    if scores.len() != graph.n_edges() {
        return Err(CalibError::LengthMismatch { scores: scores.len(), edges: graph.n_edges() });
    }
    if scores.is_empty() {
        return Err(CalibError::Empty);
    }
    let compiled = Compiled::build(graph);
    posteriors_with(&compiled, scores, graph, params)
}

fn posteriors_with(
    compiled: &Compiled,
    scores: &[f64],
    graph: &AssignmentGraph,
    params: &CalibrationParams,
) -> Result<PosteriorSummaries, CalibError> {
    let mu = params.mu;
    let centered: Vec<f64> = scores.iter().map(|s| s - mu).collect();

    // Priors for any isolated paper/reviewer; overwritten for all entities
    // that appear in a component.
    let mut per_paper =
        vec![PosteriorValue { mean: mu, var: params.alpha_f }; graph.n_papers()];
    let mut per_reviewer_mean = vec![0.0; graph.n_reviewers()];
    let mut per_review = vec![PosteriorValue { mean: 0.0, var: 0.0 }; graph.n_edges()];

    for (c, lay) in compiled.layouts.iter().enumerate() {
        let solver =
            ComponentSolver::new(c, lay, params.ratio_b(), params.ratio_s() + JITTER, true)?;
        let y_local: Vec<f64> = lay.edges.iter().map(|&ge| centered[ge]).collect();
        let post = solver.posteriors(&y_local, mu, params.alpha_f, params.ratio_s())?;
        for (lp, &gp) in lay.papers.iter().enumerate() {
            per_paper[gp] = PosteriorValue { mean: post.paper_mean[lp], var: post.paper_var[lp] };
        }
        for (lr, &gr) in lay.reviewers.iter().enumerate() {
            per_reviewer_mean[gr] = post.reviewer_mean[lr];
        }
        for (le, &ge) in lay.edges.iter().enumerate() {
            per_review[ge] =
                PosteriorValue { mean: post.review_mean[le], var: post.review_var[le] };
        }
    }

    Ok(PosteriorSummaries { per_review, per_paper, per_reviewer_mean })
}

/// Fits the model by profiled-NLL grid search.
///
/// μ is fixed at the mean of `scores`. Every coarse node is evaluated, then
/// one refinement pass rescans ±1 coarse cell around the minimizer at
/// `refine_factor`× finer (logarithmic) resolution. Ties keep the first node
/// in row-major (ratio_b outer, ratio_s inner) order. Individual nodes that
/// fail to factorize are skipped and counted; the fit fails only if every
/// node fails.
pub fn grid_fit(
    scores: &[f64],
    graph: &AssignmentGraph,
    grid: &GridSpec,
) -> Result<CalibrationFit, CalibError> {
    grid.validate()?;
    let centered = center(scores, graph)?;
    let n = scores.len();
    let mu = scores.iter().sum::<f64>() / n as f64;
    if centered.iter().all(|&c| c == 0.0) {
        return Err(CalibError::DegenerateScores { n, value: scores[0] });
    }
    let compiled = Compiled::build(graph);

    let mut evaluated = 0usize;
    let mut failed = 0usize;
    let mut last_err: Option<solver::SolverError> = None;

    let scan = |nodes_b: &[f64],
                    nodes_s: &[f64],
                    evaluated: &mut usize,
                    failed: &mut usize,
                    last_err: &mut Option<solver::SolverError>|
     -> Option<(GridNode, f64)> {
        let mut best: Option<(GridNode, f64)> = None;
        for &rb in nodes_b {
            for &rs in nodes_s {
                *evaluated += 1;
                match eval_node(&compiled, &centered, rb, rs) {
                    Ok((ldet, alpha_star)) => {
                        let Ok(nll) = nll_from(ldet, alpha_star, n) else {
                            *failed += 1;
                            continue;
                        };
                        if best.as_ref().is_none_or(|(b, _)| nll < b.nll) {
                            best = Some((GridNode { ratio_b: rb, ratio_s: rs, nll }, alpha_star));
                        }
                    }
                    Err(CalibError::Solver(e)) => {
                        *failed += 1;
                        *last_err = Some(e);
                    }
                    Err(_) => {
                        *failed += 1;
                    }
                }
            }
        }
        best
    };

    let coarse_b = GridSpec::axis(grid.ratio_b_bounds, grid.ratio_b_steps);
    let coarse_s = GridSpec::axis(grid.ratio_s_bounds, grid.ratio_s_steps);
    let coarse =
        scan(&coarse_b, &coarse_s, &mut evaluated, &mut failed, &mut last_err);
    let Some((coarse_best, mut alpha_star)) = coarse else {
        return Err(CalibError::GridFailed {
            nodes: evaluated,
            last: last_err.expect("no best node implies at least one solver failure"),
        });
    };

    let mut refined_best = coarse_best;
    if grid.refine_factor > 1 && (grid.ratio_b_steps > 1 || grid.ratio_s_steps > 1) {
        let fine_b = grid.refine_axis(grid.ratio_b_bounds, grid.ratio_b_steps, coarse_best.ratio_b);
        let fine_s = grid.refine_axis(grid.ratio_s_bounds, grid.ratio_s_steps, coarse_best.ratio_s);
        if let Some((node, a)) =
            scan(&fine_b, &fine_s, &mut evaluated, &mut failed, &mut last_err)
        {
            if node.nll < refined_best.nll {
                refined_best = node;
                alpha_star = a;
            }
        }
    }

    let params = CalibrationParams::from_ratios(
        mu,
        alpha_star,
        refined_best.ratio_b,
        refined_best.ratio_s,
    )?;
    let posts = posteriors_with(&compiled, scores, graph, &params)?;

    Ok(CalibrationFit {
        params,
        nll: refined_best.nll,
        per_paper: graph
            .paper_ids()
            .iter()
            .zip(&posts.per_paper)
            .map(|(id, p)| PaperPosterior { paper_id: id.clone(), mean: p.mean, var: p.var })
            .collect(),
        per_reviewer: graph
            .reviewer_ids()
            .iter()
            .zip(&posts.per_reviewer_mean)
            .map(|(id, &m)| ReviewerPosterior { reviewer_id: id.clone(), bias_mean: m })
            .collect(),
        per_review: graph
            .edges()
            .iter()
            .zip(&posts.per_review)
            .map(|(&(i, j), p)| ReviewPosterior {
                paper_id: graph.paper_ids()[i].clone(),
                reviewer_id: graph.reviewer_ids()[j].clone(),
                mean: p.mean,
                var: p.var,
            })
            .collect(),
        grid: GridDiagnostics {
            coarse_best,
            refined_best,
            nodes_evaluated: evaluated,
            nodes_failed: failed,
        },
    })
}
