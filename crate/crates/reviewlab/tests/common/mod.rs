//! Independent oracles shared by the integration tests.
//!
//! Everything here deliberately avoids the library's structured solver: the
//! covariance is materialized densely from the edge list and handled with
//! dense LAPACK factorizations, components come from a plain union-find, and
//! summaries are recomputed with direct formulas. Agreement between these
//! oracles and the library is the correctness argument for the fast paths.

#![allow(dead_code)]

use ndarray::{Array1, Array2};
use ndarray_linalg::cholesky::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use reviewlab::calibration::{AssignmentGraph, CalibrationParams, JITTER};

/// Plain union-find over `n` elements.
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Union-find oracle: for each edge, the id of its component root (papers
/// are elements `0..n`, reviewers `n..n+m`). Two edges belong to the same
/// component iff they map to the same root.
pub fn union_find_edge_roots(graph: &AssignmentGraph) -> Vec<usize> {
    let n = graph.n_papers();
    let mut uf = UnionFind::new(n + graph.n_reviewers());
    for &(i, j) in graph.edges() {
        uf.union(i, n + j);
    }
    graph.edges().iter().map(|&(i, _)| uf.find(i)).collect()
}

/// Dense K̂ + jitter·I over all edges, built straight from the edge list.
pub fn dense_khat(graph: &AssignmentGraph, ratio_b: f64, ratio_s: f64) -> Array2<f64> {
    let edges = graph.edges();
    let n = edges.len();
    let mut k = Array2::<f64>::zeros((n, n));
    for a in 0..n {
        for b in 0..n {
            let (pa, ra) = edges[a];
            let (pb, rb) = edges[b];
            let mut v = 0.0;
            if pa == pb {
                v += 1.0;
            }
            if ra == rb {
                v += ratio_b;
            }
            if a == b {
                v += ratio_s + JITTER;
            }
            k[(a, b)] = v;
        }
    }
    k
}

/// Dense-path profiled NLL and α_f*: whole-matrix Cholesky, no component
/// splitting, natural logs, 2π dropped. Scores are centered at their mean.
pub fn dense_nll_alpha(
    scores: &[f64],
    graph: &AssignmentGraph,
    ratio_b: f64,
    ratio_s: f64,
) -> (f64, f64) {
    let n = scores.len();
    let mu = scores.iter().sum::<f64>() / n as f64;
    let y = Array1::from_iter(scores.iter().map(|s| s - mu));
    let k = dense_khat(graph, ratio_b, ratio_s);
    let f = k.factorizec(UPLO::Lower).expect("dense oracle factorization");
    let ldet = f.ln_detc();
    let kinv_y = f.solvec(&y).expect("dense oracle solve");
    let alpha = y.dot(&kinv_y) / n as f64;
    let nf = n as f64;
    (0.5 * nf * alpha.ln() + 0.5 * ldet + 0.5 * nf, alpha)
}

/// Posterior summaries from direct joint-Gaussian conditioning.
pub struct DensePosteriors {
    pub paper_mean: Vec<f64>,
    pub paper_var: Vec<f64>,
    pub reviewer_mean: Vec<f64>,
    pub review_mean: Vec<f64>,
    pub review_var: Vec<f64>,
}

/// Dense conditioning oracle: builds Σ_yy = α_f·(K̂ + jitter·I) and the raw
/// cross-covariances of each latent target, then applies the textbook
/// Gaussian conditioning identities with dense solves.
pub fn dense_posteriors(
    scores: &[f64],
    graph: &AssignmentGraph,
    params: &CalibrationParams,
) -> DensePosteriors {
    let edges = graph.edges();
    let af = params.alpha_f;
    let ab = params.alpha_b;
    let s2 = params.sigma2;

    let mut sigma_yy = dense_khat(graph, params.ratio_b(), params.ratio_s());
    sigma_yy.mapv_inplace(|v| v * af);
    let f = sigma_yy.factorizec(UPLO::Lower).expect("oracle factorization");
    let y = Array1::from_iter(scores.iter().map(|s| s - params.mu));
    let w = f.solvec(&y).expect("oracle solve");

    let mut post = DensePosteriors {
        paper_mean: Vec::new(),
        paper_var: Vec::new(),
        reviewer_mean: Vec::new(),
        review_mean: Vec::new(),
        review_var: Vec::new(),
    };

    let condition = |c: &Array1<f64>, prior_mean: f64, prior_var: f64| -> (f64, f64) {
        let mean = prior_mean + c.dot(&w);
        let kc = f.solvec(c).expect("oracle solve");
        (mean, prior_var - c.dot(&kc))
    };

    for i in 0..graph.n_papers() {
        let c = Array1::from_iter(edges.iter().map(|&(p, _)| if p == i { af } else { 0.0 }));
        let (mean, var) = condition(&c, params.mu, af);
        post.paper_mean.push(mean);
        post.paper_var.push(var);
    }
    for j in 0..graph.n_reviewers() {
        let c = Array1::from_iter(edges.iter().map(|&(_, r)| if r == j { ab } else { 0.0 }));
        let (mean, _) = condition(&c, 0.0, ab);
        post.reviewer_mean.push(mean);
    }
    for (e, &(i, _)) in edges.iter().enumerate() {
        let c = Array1::from_iter(edges.iter().enumerate().map(|(e2, &(p, _))| {
            let mut v = if p == i { af } else { 0.0 };
            if e2 == e {
                v += s2;
            }
            v
        }));
        let (mean, var) = condition(&c, params.mu, af + s2);
        post.review_mean.push(mean);
        post.review_var.push(var);
    }
    post
}

/// Random connected-ish assignment graph with up to `max_edges` edges,
/// plus uniform random scores.
pub fn random_instance(
    rng: &mut impl Rng,
    max_papers: usize,
    max_reviewers: usize,
    max_edges: usize,
) -> (AssignmentGraph, Vec<f64>) {
    let n = rng.random_range(2..=max_papers);
    let m = rng.random_range(2..=max_reviewers);
    let cap = (n * m).min(max_edges);
    let n_edges = rng.random_range(2..=cap.max(2));
    let mut edges = std::collections::BTreeSet::new();
    while edges.len() < n_edges {
        edges.insert((rng.random_range(0..n), rng.random_range(0..m)));
    }
    let graph = AssignmentGraph::from_edges(n, m, edges.into_iter().collect()).unwrap();
    let scores: Vec<f64> = (0..graph.n_edges()).map(|_| rng.random_range(1.0..9.0)).collect();
    (graph, scores)
}

/// Assignment where every reviewer reviews `per_reviewer` distinct papers,
/// chosen uniformly at random.
pub fn random_assignment(
    n_papers: usize,
    n_reviewers: usize,
    per_reviewer: usize,
    rng: &mut impl Rng,
) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(n_reviewers * per_reviewer);
    let mut papers: Vec<usize> = (0..n_papers).collect();
    for j in 0..n_reviewers {
        papers.shuffle(rng);
        for &i in papers.iter().take(per_reviewer) {
            edges.push((i, j));
        }
    }
    edges
}

/// Draws a continuous score vector from the calibration model itself:
/// y = μ + f_paper + b_reviewer + ε.
pub fn gen_model_scores(
    graph: &AssignmentGraph,
    params: &CalibrationParams,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let nf = Normal::new(0.0, params.alpha_f.sqrt()).unwrap();
    let nb = Normal::new(0.0, params.alpha_b.sqrt()).unwrap();
    let ne = Normal::new(0.0, params.sigma2.sqrt()).unwrap();
    let f: Vec<f64> = (0..graph.n_papers()).map(|_| nf.sample(rng)).collect();
    let b: Vec<f64> = (0..graph.n_reviewers()).map(|_| nb.sample(rng)).collect();
    graph
        .edges()
        .iter()
        .map(|&(i, j)| params.mu + f[i] + b[j] + ne.sample(rng))
        .collect()
}

/// Relative difference with an absolute floor, for comparisons near zero.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(1e-6);
    (a - b).abs() / scale
}

// ===========================================================================
// Timeline brute-force oracles
// ===========================================================================
//
// Rebuilt from the documented series semantics with plain loops — no prefix
// sums, no incremental state — and compared bit-for-bit against the library.
// Exactness holds because both sides accumulate in the canonical review
// order (submitted time, then paper id, then reviewer id).

use chrono::{DateTime, Duration, TimeZone, Utc};
use reviewlab::data::{DuplicatePair, PaperId, ReviewRecord, ReviewerId};
use reviewlab::impact::{pearson, pearson_se};
use reviewlab::timeline::{
    cumulative_reviews, duplicate_correlation_series, moving_window_mean, papers_below_quorum,
    reviews_per_paper_series, sample_grid, PerPaperStats, ReviewField, TimeSeriesPoint,
};

pub fn review_record(
    paper: &str,
    reviewer: &str,
    quality: u8,
    confidence: u8,
    t: DateTime<Utc>,
    words: (u32, u32),
) -> ReviewRecord {
    ReviewRecord {
        paper_id: PaperId(paper.to_string()),
        reviewer_id: ReviewerId(reviewer.to_string()),
        quality,
        impact: 1,
        confidence,
        submitted_at: t,
        summary_words: words.0,
        body_words: words.1,
    }
}

/// A random messy corpus: hour-quantized times (so exact timestamp ties are
/// common), shuffled input order, and duplicate pairs that sometimes point at
/// papers with no reviews yet.
pub fn random_timeline_corpus(rng: &mut impl Rng) -> (Vec<ReviewRecord>, Vec<DuplicatePair>) {
    let n_reviews = rng.random_range(30..300usize);
    let n_papers = (n_reviews / 3).max(4);
    let base = Utc.with_ymd_and_hms(2014, 7, 1, 0, 0, 0).unwrap();
    let mut reviews = Vec::with_capacity(n_reviews);
    for i in 0..n_reviews {
        let t = base + Duration::hours(rng.random_range(0..24 * 30));
        reviews.push(review_record(
            &format!("P{:04}", rng.random_range(0..n_papers)),
            &format!("R{i:04}"),
            rng.random_range(1..=10),
            rng.random_range(1..=5),
            t,
            (rng.random_range(10..100), rng.random_range(50..500)),
        ));
    }
    let n_pairs = rng.random_range(4..12usize);
    let duplicates = (0..n_pairs)
        .map(|k| DuplicatePair {
            // Indices may exceed n_papers: such a side has no review history.
            committee1_paper: PaperId(format!("P{:04}", rng.random_range(0..n_papers + 2))),
            committee2_paper: PaperId(format!("P{:04}", rng.random_range(0..n_papers + 2))),
            experiment_id: format!("E{k:02}"),
        })
        .collect();
    (reviews, duplicates)
}

/// Canonical review order, written out longhand.
pub fn oracle_sort(reviews: &[ReviewRecord]) -> Vec<ReviewRecord> {
    let mut v = reviews.to_vec();
    v.sort_by(|a, b| {
        (a.submitted_at, &a.paper_id, &a.reviewer_id)
            .cmp(&(b.submitted_at, &b.paper_id, &b.reviewer_id))
    });
    v
}

pub fn oracle_cumulative(reviews: &[ReviewRecord]) -> Vec<TimeSeriesPoint> {
    oracle_sort(reviews)
        .iter()
        .enumerate()
        .map(|(i, r)| TimeSeriesPoint {
            t: r.submitted_at,
            value: (i + 1) as f64,
            se: None,
            n: (i + 1) as u64,
        })
        .collect()
}

/// Sorted review counts per paper at time `t` over the full paper universe.
pub fn oracle_counts_at(sorted: &[ReviewRecord], t: DateTime<Utc>) -> Vec<u64> {
    let mut papers: Vec<&PaperId> = sorted.iter().map(|r| &r.paper_id).collect();
    papers.sort();
    papers.dedup();
    let mut counts: Vec<u64> = papers
        .iter()
        .map(|p| sorted.iter().filter(|r| &&r.paper_id == p && r.submitted_at <= t).count() as u64)
        .collect();
    counts.sort_unstable();
    counts
}

pub fn oracle_per_paper(reviews: &[ReviewRecord], times: &[DateTime<Utc>]) -> Vec<PerPaperStats> {
    let sorted = oracle_sort(reviews);
    times
        .iter()
        .map(|&t| {
            let counts = oracle_counts_at(&sorted, t);
            let n = counts.len();
            let median = if n % 2 == 1 {
                counts[n / 2] as f64
            } else {
                (counts[n / 2 - 1] as f64 + counts[n / 2] as f64) / 2.0
            };
            PerPaperStats {
                t,
                min: counts[0] as f64,
                median,
                mean: counts.iter().map(|&c| c as f64).sum::<f64>() / n as f64,
                max: counts[n - 1] as f64,
                papers: n as u64,
            }
        })
        .collect()
}

pub fn oracle_below_quorum(
    reviews: &[ReviewRecord],
    quorum: u64,
    times: &[DateTime<Utc>],
) -> Vec<TimeSeriesPoint> {
    let sorted = oracle_sort(reviews);
    times
        .iter()
        .map(|&t| {
            let counts = oracle_counts_at(&sorted, t);
            TimeSeriesPoint {
                t,
                value: counts.iter().filter(|&&c| c < quorum).count() as f64,
                se: None,
                n: counts.len() as u64,
            }
        })
        .collect()
}

pub fn oracle_window_mean(
    reviews: &[ReviewRecord],
    field: ReviewField,
    window: Duration,
    step: Duration,
) -> Vec<TimeSeriesPoint> {
    let sorted = oracle_sort(reviews);
    let earliest = sorted.first().unwrap().submitted_at;
    let latest = sorted.last().unwrap().submitted_at;
    let mut out = Vec::new();
    let mut i: i64 = 0;
    loop {
        let t = earliest + step * i as i32;
        if t - window > latest {
            break;
        }
        let values: Vec<f64> = sorted
            .iter()
            .filter(|r| r.submitted_at >= t - window && r.submitted_at < t)
            .map(|r| field.extract(r))
            .collect();
        if values.len() >= 2 {
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
            let sem = (ss / (n - 1.0)).sqrt() / n.sqrt();
            out.push(TimeSeriesPoint { t, value: mean, se: Some(sem), n: values.len() as u64 });
        }
        i += 1;
    }
    out
}

/// Running mean of a paper's quality scores at `t`, summed left to right in
/// canonical order (`None` before the first review).
pub fn oracle_mean_at(sorted: &[ReviewRecord], paper: &PaperId, t: DateTime<Utc>) -> Option<f64> {
    let mut sum = 0.0;
    let mut k = 0u64;
    for r in sorted {
        if &r.paper_id == paper && r.submitted_at <= t {
            sum += f64::from(r.quality);
            k += 1;
        }
    }
    (k > 0).then(|| sum / k as f64)
}

pub fn oracle_duplicate_corr(
    reviews: &[ReviewRecord],
    duplicates: &[DuplicatePair],
    times: &[DateTime<Utc>],
) -> Vec<TimeSeriesPoint> {
    let sorted = oracle_sort(reviews);
    let mut out = Vec::new();
    for &t in times {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for pair in duplicates {
            let a = oracle_mean_at(&sorted, &pair.committee1_paper, t);
            let b = oracle_mean_at(&sorted, &pair.committee2_paper, t);
            if let (Some(a), Some(b)) = (a, b) {
                x.push(a);
                y.push(b);
            }
        }
        if let Ok(r) = pearson(&x, &y) {
            out.push(TimeSeriesPoint {
                t,
                value: r.rho,
                se: Some(pearson_se(r.rho, x.len() as u64)),
                n: x.len() as u64,
            });
        }
    }
    out
}

pub fn assert_points_identical(
    label: &str,
    trial: usize,
    got: &[TimeSeriesPoint],
    want: &[TimeSeriesPoint],
) {
    assert_eq!(got.len(), want.len(), "trial {trial}: {label} length");
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        assert_eq!(g.t, w.t, "trial {trial}: {label}[{i}].t");
        assert_eq!(
            g.value.to_bits(),
            w.value.to_bits(),
            "trial {trial}: {label}[{i}].value {} vs {}",
            g.value,
            w.value
        );
        assert_eq!(
            g.se.map(f64::to_bits),
            w.se.map(f64::to_bits),
            "trial {trial}: {label}[{i}].se {:?} vs {:?}",
            g.se,
            w.se
        );
        assert_eq!(g.n, w.n, "trial {trial}: {label}[{i}].n");
    }
}

pub fn assert_per_paper_identical(
    trial: usize,
    got: &[PerPaperStats],
    want: &[PerPaperStats],
) {
    assert_eq!(got.len(), want.len(), "trial {trial}: per-paper length");
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        assert_eq!(g.t, w.t, "trial {trial}: per-paper[{i}].t");
        for (name, gv, wv) in [
            ("min", g.min, w.min),
            ("median", g.median, w.median),
            ("mean", g.mean, w.mean),
            ("max", g.max, w.max),
        ] {
            assert_eq!(
                gv.to_bits(),
                wv.to_bits(),
                "trial {trial}: per-paper[{i}].{name} {gv} vs {wv}"
            );
        }
        assert_eq!(g.papers, w.papers, "trial {trial}: per-paper[{i}].papers");
    }
}

/// Runs `trials` random corpora through all five series operations and
/// panics on the first bitwise mismatch against the brute-force oracles.
pub fn assert_timeline_matches_brute_force(trials: usize, seed: u64) {
    let mut rng = reviewlab::rng::stream_rng(seed, 0);
    for trial in 0..trials {
        let (reviews, duplicates) = random_timeline_corpus(&mut rng);
        let earliest = reviews.iter().map(|r| r.submitted_at).min().unwrap();
        let latest = reviews.iter().map(|r| r.submitted_at).max().unwrap();
        let step = Duration::hours(rng.random_range(6..72));
        let grid = sample_grid(earliest, latest, step).unwrap();

        assert_points_identical(
            "cumulative",
            trial,
            &cumulative_reviews(&reviews),
            &oracle_cumulative(&reviews),
        );
        assert_per_paper_identical(
            trial,
            &reviews_per_paper_series(&reviews, &grid),
            &oracle_per_paper(&reviews, &grid),
        );
        let quorum = rng.random_range(1..6u64);
        assert_points_identical(
            "below-quorum",
            trial,
            &papers_below_quorum(&reviews, quorum, &grid),
            &oracle_below_quorum(&reviews, quorum, &grid),
        );
        let field = [
            ReviewField::Confidence,
            ReviewField::Quality,
            ReviewField::Impact,
            ReviewField::Length,
        ][trial % 4];
        let window = Duration::hours(rng.random_range(24..120));
        assert_points_identical(
            "window-mean",
            trial,
            &moving_window_mean(&reviews, field, window, step).unwrap(),
            &oracle_window_mean(&reviews, field, window, step),
        );
        assert_points_identical(
            "duplicate-correlation",
            trial,
            &duplicate_correlation_series(&reviews, &duplicates, &grid),
            &oracle_duplicate_corr(&reviews, &duplicates, &grid),
        );
    }
}
