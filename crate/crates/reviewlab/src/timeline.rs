//! Time-resolved statistics of the review process.
//!
//! The 2014 experiment's review phase had a hard reviewing deadline
//! (21 July 2014) followed by a chase period that ended when the author
//! rebuttal phase began (4 August 2014). This module reconstructs the
//! analyses that look at the process along the time axis:
//!
//! - [`cumulative_reviews`]: the arrival curve of submitted reviews;
//! - [`reviews_per_paper_series`]: min/median/mean/max reviews per paper
//!   over time;
//! - [`papers_below_quorum`]: how many papers still lack a review quorum;
//! - [`moving_window_mean`]: a moving-window mean (default four days) of a
//!   chosen review field, with its standard error of the mean;
//! - [`deadline_split_test`]: Welch's two-sample t-test comparing a review
//!   field before the deadline against the chase period after it;
//! - [`duplicate_correlation_series`]: the correlation between the two
//!   committees' mean scores on duplicated papers as reviews accumulate;
//! - [`bootstrap_correlation_band`]: a bootstrap percentile band around that
//!   correlation trajectory, optionally anchored so every resample ends at
//!   the point estimate's final value.
//!
//! Design choices the underlying study left open, resolved here:
//!
//! - The split test is Welch's unequal-variance t-test with two-sided
//!   p-values (the conservative reading of "a t-test shows the difference to
//!   be significant").
//! - Moving windows are half-open `[t − window, t)` with a default step of
//!   one day.
//! - Day boundaries are midnight UTC; the defaults are exposed as
//!   [`default_deadline`] and [`default_cutoff`] and every consumer can
//!   override them.
//! - Correlation trajectories use raw per-paper mean quality by default;
//!   [`duplicate_correlation_series_with`] accepts any per-review score
//!   (e.g. calibrated means) instead.
//! - Bootstrap anchoring is an additive shift of each resampled trajectory.
//!
//! Every series is a pure function of the multiset of reviews: inputs are
//! canonically sorted (time, then paper, then reviewer) before any
//! accumulation, so results are bit-identical under input row permutation
//! and equal to naive per-point recomputation.

use chrono::{DateTime, Duration, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use std::collections::BTreeMap;
use std::str::FromStr;

use crate::data::{DuplicatePair, PaperId, ReviewRecord};
use crate::impact::{pearson, pearson_se};
use crate::rng::stream_rng;
use rand::Rng;

/// Default reviewing deadline: 2014-07-21T00:00:00Z.
pub fn default_deadline() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2014, 7, 21, 0, 0, 0).unwrap()
}

/// Default end of the post-deadline chase period (start of the rebuttal
/// phase): 2014-08-04T00:00:00Z.
pub fn default_cutoff() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2014, 8, 4, 0, 0, 0).unwrap()
}

/// Default moving-window width: four days.
pub fn default_window() -> Duration {
    Duration::days(4)
}

/// Default sampling step for time grids: one day.
pub fn default_step() -> Duration {
    Duration::days(1)
}

/// Default review quorum: three reviews per paper.
pub const DEFAULT_QUORUM: u64 = 3;

/// Hard cap on generated grid lengths, to catch degenerate step sizes.
const MAX_GRID_POINTS: usize = 1_000_000;

/// Errors from timeline computations.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TimelineError {
    /// A parameter failed validation.
    #[error("invalid {field}: {message}")]
    InvalidInput {
        /// Which parameter.
        field: &'static str,
        /// What went wrong.
        message: String,
    },
    /// A split-test group had fewer than two observations.
    #[error("group `{group}` has {n} observation(s); at least 2 required")]
    InsufficientGroup {
        /// `"before"` or `"after"`.
        group: &'static str,
        /// Observations found.
        n: usize,
    },
}

/// One point of a time series: a value at a timestamp, with an optional
/// standard error and the number of observations supporting it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesPoint {
    /// Sample time (UTC).
    pub t: DateTime<Utc>,
    /// The statistic at `t`.
    pub value: f64,
    /// Standard error of `value`, when one is defined.
    pub se: Option<f64>,
    /// Number of observations supporting the point.
    pub n: u64,
}

/// Reviews-per-paper summary at one sample time.
///
/// Statistics are taken over every paper appearing anywhere in the review
/// set; papers whose reviews have not arrived yet count as zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerPaperStats {
    /// Sample time (UTC).
    pub t: DateTime<Utc>,
    /// Fewest reviews held by any paper.
    pub min: f64,
    /// Median review count (mean of the two middle values for even counts).
    pub median: f64,
    /// Mean review count.
    pub mean: f64,
    /// Most reviews held by any paper.
    pub max: f64,
    /// Number of papers in the universe.
    pub papers: u64,
}

/// Result of the before/after-deadline Welch t-test.
///
/// `t_stat` is signed as `mean_before − mean_after`. When both group
/// variances are zero but the means differ, `t_stat` is ±∞ and `p_value`
/// is 0; JSON serialization renders the infinite statistic as `null`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitTestResult {
    /// Mean of the field over reviews submitted before the deadline.
    pub mean_before: f64,
    /// Mean over reviews submitted at/after the deadline but before the cutoff.
    pub mean_after: f64,
    /// Standard error of `mean_before` (sample sd / √n).
    pub se_before: f64,
    /// Standard error of `mean_after`.
    pub se_after: f64,
    /// Reviews in the before group.
    pub n_before: u64,
    /// Reviews in the after group.
    pub n_after: u64,
    /// Welch t statistic.
    pub t_stat: f64,
    /// Two-sided p-value from the Student-t distribution.
    pub p_value: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub dof: f64,
}

/// One point of a bootstrap percentile band.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandPoint {
    /// Sample time (UTC).
    pub t: DateTime<Utc>,
    /// 2.5th percentile across resampled trajectories.
    pub lower: f64,
    /// 50th percentile.
    pub median: f64,
    /// 97.5th percentile.
    pub upper: f64,
    /// Resampled trajectories contributing a value at this time.
    pub n: u64,
}

/// A bootstrap band together with the point-estimate trajectory it brackets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapBand {
    /// Percentile band per sample time (times with no defined trajectory
    /// value are omitted).
    pub band: Vec<BandPoint>,
    /// The unresampled correlation trajectory.
    pub point_estimate: Vec<TimeSeriesPoint>,
    /// Number of bootstrap resamples drawn.
    pub resamples: u64,
    /// Resampled trajectories dropped because they were undefined at the
    /// anchor time (always 0 when unanchored).
    pub dropped_resamples: u64,
    /// Whether trajectories were additively shifted to share the point
    /// estimate's final value.
    pub anchored: bool,
}

/// Which review field a timeline statistic is computed over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReviewField {
    /// Reviewer self-reported confidence (1–5).
    Confidence,
    /// Overall quality score (1–10).
    Quality,
    /// Impact score (1–2).
    Impact,
    /// Total review length in words (summary + body).
    Length,
}

impl ReviewField {
    /// Canonical lower-case name.
    pub fn as_str(self) -> &'static str {
        match self {
            ReviewField::Confidence => "confidence",
            ReviewField::Quality => "quality",
            ReviewField::Impact => "impact",
            ReviewField::Length => "length",
        }
    }

    /// Extracts the field from one review.
    pub fn extract(self, review: &ReviewRecord) -> f64 {
        match self {
            ReviewField::Confidence => f64::from(review.confidence),
            ReviewField::Quality => f64::from(review.quality),
            ReviewField::Impact => f64::from(review.impact),
            ReviewField::Length => f64::from(review.summary_words + review.body_words),
        }
    }
}

impl FromStr for ReviewField {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "confidence" => Ok(ReviewField::Confidence),
            "quality" => Ok(ReviewField::Quality),
            "impact" => Ok(ReviewField::Impact),
            "length" => Ok(ReviewField::Length),
            other => Err(format!(
                "unknown review field `{other}` (expected confidence|quality|impact|length)"
            )),
        }
    }
}

/// Canonical processing order: submission time, then paper, then reviewer.
///
/// Sorting before any accumulation makes every series a pure function of the
/// review multiset, bit-identical under input row permutation.
fn sorted_reviews(reviews: &[ReviewRecord]) -> Vec<&ReviewRecord> {
    let mut v: Vec<&ReviewRecord> = reviews.iter().collect();
    v.sort_by(|a, b| {
        a.submitted_at
            .cmp(&b.submitted_at)
            .then_with(|| a.paper_id.cmp(&b.paper_id))
            .then_with(|| a.reviewer_id.cmp(&b.reviewer_id))
    });
    v
}

/// An evenly spaced time grid from `start` to `end` inclusive.
pub fn sample_grid(
    start: DateTime<Utc>,
    end: DateTime<Utc>,
    step: Duration,
) -> Result<Vec<DateTime<Utc>>, TimelineError> {
    if step <= Duration::zero() {
        return Err(TimelineError::InvalidInput {
            field: "step",
            message: "must be positive".to_string(),
        });
    }
    if start > end {
        return Err(TimelineError::InvalidInput {
            field: "start",
            message: "must not be after end".to_string(),
        });
    }
    let mut grid = Vec::new();
    let mut t = start;
    while t <= end {
        grid.push(t);
        if grid.len() > MAX_GRID_POINTS {
            return Err(TimelineError::InvalidInput {
                field: "step",
                message: format!("grid would exceed {MAX_GRID_POINTS} points"),
            });
        }
        t += step;
    }
    Ok(grid)
}

/// The arrival curve: one point per review, carrying the running count of
/// reviews submitted up to and including that arrival.
pub fn cumulative_reviews(reviews: &[ReviewRecord]) -> Vec<TimeSeriesPoint> {
    sorted_reviews(reviews)
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let count = (i + 1) as u64;
            TimeSeriesPoint { t: r.submitted_at, value: count as f64, se: None, n: count }
        })
        .collect()
}

/// Per-paper review counts at `t` (reviews with `submitted_at ≤ t`), over the
/// universe of every paper appearing in `reviews`. Returned sorted ascending.
fn counts_at(sorted: &[&ReviewRecord], universe: &BTreeMap<&PaperId, ()>, t: DateTime<Utc>) -> Vec<u64> {
    let mut counts: BTreeMap<&PaperId, u64> = universe.keys().map(|&p| (p, 0)).collect();
    for r in sorted {
        if r.submitted_at > t {
            break;
        }
        *counts.get_mut(&r.paper_id).expect("paper in universe") += 1;
    }
    let mut v: Vec<u64> = counts.into_values().collect();
    v.sort_unstable();
    v
}

/// Min / median / mean / max reviews-per-paper at each sample time.
///
/// The universe is every paper with at least one review anywhere in
/// `reviews`; before its reviews arrive a paper counts as zero. An empty
/// review set yields an empty series.
pub fn reviews_per_paper_series(
    reviews: &[ReviewRecord],
    sample_times: &[DateTime<Utc>],
) -> Vec<PerPaperStats> {
    let sorted = sorted_reviews(reviews);
    let universe: BTreeMap<&PaperId, ()> = sorted.iter().map(|r| (&r.paper_id, ())).collect();
    if universe.is_empty() {
        return Vec::new();
    }
    sample_times
        .iter()
        .map(|&t| {
            let counts = counts_at(&sorted, &universe, t);
            let n = counts.len();
            let median = if n % 2 == 1 {
                counts[n / 2] as f64
            } else {
                (counts[n / 2 - 1] as f64 + counts[n / 2] as f64) / 2.0
            };
            let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n as f64;
            PerPaperStats {
                t,
                min: counts[0] as f64,
                median,
                mean,
                max: counts[n - 1] as f64,
                papers: n as u64,
            }
        })
        .collect()
}

/// Number of papers with fewer than `quorum` reviews at each sample time.
///
/// The universe is every paper appearing in `reviews`; an empty review set
/// yields an empty series. The count is non-increasing over time because
/// reviews only accumulate.
pub fn papers_below_quorum(
    reviews: &[ReviewRecord],
    quorum: u64,
    sample_times: &[DateTime<Utc>],
) -> Vec<TimeSeriesPoint> {
    let sorted = sorted_reviews(reviews);
    let universe: BTreeMap<&PaperId, ()> = sorted.iter().map(|r| (&r.paper_id, ())).collect();
    if universe.is_empty() {
        return Vec::new();
    }
    sample_times
        .iter()
        .map(|&t| {
            let below = counts_at(&sorted, &universe, t).iter().filter(|&&c| c < quorum).count();
            TimeSeriesPoint {
                t,
                value: below as f64,
                se: None,
                n: universe.len() as u64,
            }
        })
        .collect()
}

/// Mean and standard error of the mean over a sequence of values, in the
/// order given (two-pass; SEM = sample sd / √n).
fn mean_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, (ss / (n - 1.0)).sqrt() / n.sqrt())
}

/// Moving-window mean of a review field with its standard error.
///
/// Windows are half-open `[t − window, t)`; sample times start at the
/// earliest submission and advance by `step` until the window has slid past
/// the latest one. Points supported by fewer than two reviews are omitted.
pub fn moving_window_mean(
    reviews: &[ReviewRecord],
    field: ReviewField,
    window: Duration,
    step: Duration,
) -> Result<Vec<TimeSeriesPoint>, TimelineError> {
    if window <= Duration::zero() {
        return Err(TimelineError::InvalidInput {
            field: "window",
            message: "must be positive".to_string(),
        });
    }
    if step <= Duration::zero() {
        return Err(TimelineError::InvalidInput {
            field: "step",
            message: "must be positive".to_string(),
        });
    }
    let sorted = sorted_reviews(reviews);
    let Some(first) = sorted.first() else {
        return Ok(Vec::new());
    };
    let earliest = first.submitted_at;
    let latest = sorted.last().expect("non-empty").submitted_at;

    let mut series = Vec::new();
    let mut i: i64 = 0;
    loop {
        let t = earliest + step * i as i32;
        if t - window > latest {
            break;
        }
        if i as usize > MAX_GRID_POINTS {
            return Err(TimelineError::InvalidInput {
                field: "step",
                message: format!("grid would exceed {MAX_GRID_POINTS} points"),
            });
        }
        let values: Vec<f64> = sorted
            .iter()
            .filter(|r| r.submitted_at >= t - window && r.submitted_at < t)
            .map(|r| field.extract(r))
            .collect();
        if values.len() >= 2 {
            let (mean, sem) = mean_sem(&values);
            series.push(TimeSeriesPoint { t, value: mean, se: Some(sem), n: values.len() as u64 });
        }
        i += 1;
    }
    Ok(series)
}

/// Welch's unequal-variance two-sample t-test on pre-extracted values.
///
/// Returns `(t, dof, p)` with `t` signed as `mean(a) − mean(b)`. Degenerate
/// zero-variance inputs give `t = 0, p = 1` for equal means and
/// `t = ±∞, p = 0` otherwise, with `dof` falling back to `n_a + n_b − 2`.
fn welch(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let (ma, _) = mean_sem(a);
    let (mb, _) = mean_sem(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let va = a.iter().map(|v| (v - ma) * (v - ma)).sum::<f64>() / (na - 1.0);
    let vb = b.iter().map(|v| (v - mb) * (v - mb)).sum::<f64>() / (nb - 1.0);
    let sa = va / na;
    let sb = vb / nb;
    let denom = sa + sb;
    let fallback_dof = na + nb - 2.0;
    if denom == 0.0 {
        return if ma == mb {
            (0.0, fallback_dof, 1.0)
        } else {
            (f64::INFINITY.copysign(ma - mb), fallback_dof, 0.0)
        };
    }
    let t = (ma - mb) / denom.sqrt();
    let dof = denom * denom / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, dof).expect("dof > 0 for n ≥ 2 groups");
    let p = 2.0 * dist.cdf(-t.abs());
    (t, dof, p)
}

/// Welch's t-test of a review field before vs. after the deadline.
///
/// The before group is reviews with `submitted_at < deadline`; the after
/// group is `deadline ≤ submitted_at < cutoff`. Reviews at or after `cutoff`
/// are excluded entirely. Each group needs at least two reviews.
pub fn deadline_split_test(
    reviews: &[ReviewRecord],
    field: ReviewField,
    deadline: DateTime<Utc>,
    cutoff: DateTime<Utc>,
) -> Result<SplitTestResult, TimelineError> {
    if deadline >= cutoff {
        return Err(TimelineError::InvalidInput {
            field: "deadline",
            message: "must be before cutoff".to_string(),
        });
    }
    let sorted = sorted_reviews(reviews);
    let before: Vec<f64> = sorted
        .iter()
        .filter(|r| r.submitted_at < deadline)
        .map(|r| field.extract(r))
        .collect();
    let after: Vec<f64> = sorted
        .iter()
        .filter(|r| r.submitted_at >= deadline && r.submitted_at < cutoff)
        .map(|r| field.extract(r))
        .collect();
    if before.len() < 2 {
        return Err(TimelineError::InsufficientGroup { group: "before", n: before.len() });
    }
    if after.len() < 2 {
        return Err(TimelineError::InsufficientGroup { group: "after", n: after.len() });
    }
    let (mean_before, se_before) = mean_sem(&before);
    let (mean_after, se_after) = mean_sem(&after);
    let (t_stat, dof, p_value) = welch(&before, &after);
    Ok(SplitTestResult {
        mean_before,
        mean_after,
        se_before,
        se_after,
        n_before: before.len() as u64,
        n_after: after.len() as u64,
        t_stat,
        p_value,
        dof,
    })
}

/// Per-paper score history: submission times (ascending) and the matching
/// prefix sums, so the mean over reviews up to `t` is `prefix[k]/k` with the
/// exact same left-to-right summation a naive recomputation would use.
struct PaperHistory {
    times: Vec<DateTime<Utc>>,
    prefix: Vec<f64>,
}

impl PaperHistory {
    fn mean_at(&self, t: DateTime<Utc>) -> Option<f64> {
        let k = self.times.partition_point(|&x| x <= t);
        (k > 0).then(|| self.prefix[k] / k as f64)
    }
}

/// Side means per (pair, sample time): `table[p][j]` holds the two committee
/// means for duplicate pair `p` at time `j`, when both sides have a review.
fn pair_side_means(
    reviews: &[ReviewRecord],
    duplicates: &[DuplicatePair],
    sample_times: &[DateTime<Utc>],
    score: &dyn Fn(&ReviewRecord) -> Option<f64>,
) -> Vec<Vec<Option<(f64, f64)>>> {
    let sorted = sorted_reviews(reviews);
    let mut histories: BTreeMap<&PaperId, PaperHistory> = BTreeMap::new();
    for r in &sorted {
        let Some(s) = score(r) else { continue };
        let h = histories
            .entry(&r.paper_id)
            .or_insert_with(|| PaperHistory { times: Vec::new(), prefix: vec![0.0] });
        h.times.push(r.submitted_at);
        let total = h.prefix.last().expect("prefix non-empty") + s;
        h.prefix.push(total);
    }
    duplicates
        .iter()
        .map(|pair| {
            let h1 = histories.get(&pair.committee1_paper);
            let h2 = histories.get(&pair.committee2_paper);
            sample_times
                .iter()
                .map(|&t| match (h1, h2) {
                    (Some(h1), Some(h2)) => match (h1.mean_at(t), h2.mean_at(t)) {
                        (Some(a), Some(b)) => Some((a, b)),
                        _ => None,
                    },
                    _ => None,
                })
                .collect()
        })
        .collect()
}

/// Correlation trajectory over a multiset of pair indices: at each time,
/// Pearson ρ over the selected pairs with both sides present, or `None` when
/// fewer than three qualify or the inputs are degenerate.
fn trajectory(
    table: &[Vec<Option<(f64, f64)>>],
    indices: &[usize],
    n_times: usize,
) -> Vec<Option<(f64, u64)>> {
    (0..n_times)
        .map(|j| {
            let mut x = Vec::new();
            let mut y = Vec::new();
            for &p in indices {
                if let Some((a, b)) = table[p][j] {
                    x.push(a);
                    y.push(b);
                }
            }
            pearson(&x, &y).ok().map(|r| (r.rho, x.len() as u64))
        })
        .collect()
}

/// Correlation between the two committees' mean scores on duplicated papers,
/// over time, using any per-review score.
///
/// At each sample time the correlation runs over pairs where both committees
/// have at least one scored review submitted by then; times with fewer than
/// three such pairs (or degenerate constant inputs) are omitted. `se` is the
/// large-sample Pearson standard error.
pub fn duplicate_correlation_series_with(
    reviews: &[ReviewRecord],
    duplicates: &[DuplicatePair],
    sample_times: &[DateTime<Utc>],
    score: impl Fn(&ReviewRecord) -> Option<f64>,
) -> Vec<TimeSeriesPoint> {
    let table = pair_side_means(reviews, duplicates, sample_times, &score);
    let identity: Vec<usize> = (0..duplicates.len()).collect();
    trajectory(&table, &identity, sample_times.len())
        .into_iter()
        .zip(sample_times)
        .filter_map(|(cell, &t)| {
            cell.map(|(rho, n)| TimeSeriesPoint { t, value: rho, se: Some(pearson_se(rho, n)), n })
        })
        .collect()
}

/// [`duplicate_correlation_series_with`] using raw review quality scores.
pub fn duplicate_correlation_series(
    reviews: &[ReviewRecord],
    duplicates: &[DuplicatePair],
    sample_times: &[DateTime<Utc>],
) -> Vec<TimeSeriesPoint> {
    duplicate_correlation_series_with(reviews, duplicates, sample_times, |r| {
        Some(f64::from(r.quality))
    })
}

/// Type-7 (linear interpolation) percentile of an ascending-sorted slice.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let m = sorted.len();
    if m == 1 {
        return sorted[0];
    }
    let h = (m - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < m {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[lo]
    }
}

/// Core band computation over caller-supplied resample index lists.
///
/// Separated from the RNG-driven public entry point so a single identity
/// resample provably collapses the band onto the point estimate.
fn band_from_resamples(
    reviews: &[ReviewRecord],
    duplicates: &[DuplicatePair],
    sample_times: &[DateTime<Utc>],
    resamples: &[Vec<usize>],
    anchor: bool,
) -> BootstrapBand {
    let score = |r: &ReviewRecord| Some(f64::from(r.quality));
    let table = pair_side_means(reviews, duplicates, sample_times, &score);
    let n_times = sample_times.len();

    let identity: Vec<usize> = (0..duplicates.len()).collect();
    let point = trajectory(&table, &identity, n_times);
    let point_estimate: Vec<TimeSeriesPoint> = point
        .iter()
        .zip(sample_times)
        .filter_map(|(cell, &t)| {
            cell.map(|(rho, n)| TimeSeriesPoint { t, value: rho, se: Some(pearson_se(rho, n)), n })
        })
        .collect();

    // Resampled trajectories, computed concurrently in deterministic
    // positional chunks.
    let mut trajectories: Vec<Vec<Option<(f64, u64)>>> = Vec::with_capacity(resamples.len());
    let threads = crate::concurrency::worker_count(8);
    let chunk_size = resamples.len().div_ceil(threads).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = resamples
            .chunks(chunk_size)
            .map(|chunk| {
                let table = &table;
                scope.spawn(move || {
                    chunk.iter().map(|idx| trajectory(table, idx, n_times)).collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            trajectories.extend(h.join().expect("bootstrap worker panicked"));
        }
    });

    // Anchor: additively shift each trajectory so it matches the point
    // estimate at the last time where the point estimate is defined.
    let mut dropped = 0u64;
    let mut kept: Vec<Vec<Option<f64>>> = Vec::with_capacity(trajectories.len());
    let anchor_idx = point.iter().rposition(|c| c.is_some());
    for traj in &trajectories {
        let values: Vec<Option<f64>> = traj.iter().map(|c| c.map(|(rho, _)| rho)).collect();
        if !anchor {
            kept.push(values);
            continue;
        }
        let Some(ai) = anchor_idx else {
            dropped += 1;
            continue;
        };
        let anchor_value = point[ai].expect("anchor index is defined").0;
        match values[ai] {
            Some(v) => {
                let shift = anchor_value - v;
                kept.push(values.into_iter().map(|c| c.map(|x| x + shift)).collect());
            }
            None => dropped += 1,
        }
    }

    let band = (0..n_times)
        .filter_map(|j| {
            let mut vals: Vec<f64> = kept.iter().filter_map(|traj| traj[j]).collect();
            if vals.is_empty() {
                return None;
            }
            vals.sort_by(f64::total_cmp);
            Some(BandPoint {
                t: sample_times[j],
                lower: percentile(&vals, 0.025),
                median: percentile(&vals, 0.5),
                upper: percentile(&vals, 0.975),
                n: vals.len() as u64,
            })
        })
        .collect();

    BootstrapBand {
        band,
        point_estimate,
        resamples: resamples.len() as u64,
        dropped_resamples: dropped,
        anchored: anchor,
    }
}

/// Bootstrap percentile band (2.5 / 50 / 97.5) around the duplicate-pair
/// correlation trajectory.
///
/// Draws `b ≥ 100` resamples of the duplicate pairs with replacement
/// (resample `k` uses its own RNG stream derived from `seed`), recomputes the
/// trajectory for each, and — when `anchor` is set — additively shifts every
/// resampled trajectory so its value at the last defined point-estimate time
/// equals the point estimate there, matching the published presentation where
/// all bootstrap curves converge on the right edge of the plot. Trajectories
/// undefined at the anchor time are dropped (and counted).
pub fn bootstrap_correlation_band(
    reviews: &[ReviewRecord],
    duplicates: &[DuplicatePair],
    sample_times: &[DateTime<Utc>],
    b: u64,
    seed: u64,
    anchor: bool,
) -> Result<BootstrapBand, TimelineError> {
    if b < 100 {
        return Err(TimelineError::InvalidInput {
            field: "b",
            message: format!("need at least 100 bootstrap resamples, got {b}"),
        });
    }
    if duplicates.is_empty() {
        return Err(TimelineError::InvalidInput {
            field: "duplicates",
            message: "at least one duplicate pair required".to_string(),
        });
    }
    let n_pairs = duplicates.len();
    let resamples: Vec<Vec<usize>> = (0..b)
        .map(|k| {
            let mut rng = stream_rng(seed, k);
            (0..n_pairs).map(|_| rng.random_range(0..n_pairs)).collect()
        })
        .collect();
    Ok(band_from_resamples(reviews, duplicates, sample_times, &resamples, anchor))
}
