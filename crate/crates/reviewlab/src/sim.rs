//! Monte Carlo simulation of duplicate-committee reviewing.
//!
//! The 2014 NeurIPS program chairs re-reviewed roughly a tenth of all
//! submissions with a second, independent committee and measured how often the
//! two committees agreed on acceptance.  This module simulates that experiment
//! under a simple generative story so that the observed agreement can be
//! compared against what *any* committee process with a given amount of
//! reviewer noise would produce:
//!
//! * every paper has a latent quality `f ~ N(0, 1 - s)`;
//! * each committee scores a paper as `f` plus the mean of `R` independent
//!   reviewer errors `ε ~ N(0, s)`;
//! * each committee independently accepts its top `floor(rate · n)` papers
//!   (at least one).
//!
//! The parameter `s ∈ (0, 1]` is the **subjectivity**: the fraction of the
//! variance of a single review that is reviewer noise rather than paper
//! quality.  Total single-review variance is normalized to `1`, so `s = 1`
//! means scores carry no signal at all and `s → 0` means reviews are exact.
//! [`subjectivity_from_fit`] maps a fitted score-calibration model onto this
//! scale so the simulator can be run at the operating point estimated from
//! real review data.
//!
//! The mean of `R` i.i.d. `N(0, s)` errors is itself Gaussian `N(0, s / R)`
//! and is sampled directly from that distribution; this is distributionally
//! identical to averaging `R` separate draws and keeps the cost independent
//! of `R`.
//!
//! **Reported statistic.**  For one simulated conference, *accept consistency*
//! is `|A₁ ∩ A₂| / k` where `A₁`, `A₂` are the two committees' accept sets of
//! size `k`.  A run simulates `ceil(total_paper_samples / n_papers)`
//! independent conferences and reports the mean consistency together with its
//! standard error across trials.  Replays are deterministic: trial `t` of a
//! run draws from [`stream_rng`]`(seed, t)`, and cell `c` of a
//! [`consistency_curve`] shifts its trial streams to `(c << 32) | t`, so every
//! cell and every trial is reproducible in isolation.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::calibration::CalibrationParams;
use crate::rng::stream_rng;

/// Error raised by an invalid [`SimConfig`] or curve request.
#[derive(Debug, thiserror::Error)]
pub enum SimError {
    /// A configuration field is outside its documented domain.
    #[error("invalid simulation config: {field} {message}")]
    InvalidConfig {
        /// Name of the offending field.
        field: &'static str,
        /// Human-readable constraint violation.
        message: String,
    },
}

fn invalid(field: &'static str, message: impl Into<String>) -> SimError {
    SimError::InvalidConfig {
        field,
        message: message.into(),
    }
}

/// Parameters of one committee-consistency simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Papers per simulated conference (`≥ 2`).
    pub n_papers: usize,
    /// Reviews per paper per committee (`R ≥ 1`).
    pub reviewers_per_paper: u32,
    /// Fraction of single-review variance that is reviewer noise, in `(0, 1]`.
    pub subjectivity: f64,
    /// Fraction of papers each committee accepts, in `(0, 1]`; at least one
    /// paper must make the cut (`floor(accept_rate · n_papers) ≥ 1`).
    pub accept_rate: f64,
    /// Total simulated papers across all trials (`≥ n_papers`); the number of
    /// trials is `ceil(total_paper_samples / n_papers)`.
    pub total_paper_samples: u64,
    /// Base RNG seed; every trial derives its own stream from it.
    pub seed: u64,
}

impl Default for SimConfig {
    /// Operating point of the published 2014 experiment: 500-paper
    /// conferences, 3 reviews per paper, subjectivity one half, a 23% accept
    /// rate, and 100 000 simulated papers.
    fn default() -> Self {
        SimConfig {
            n_papers: 500,
            reviewers_per_paper: 3,
            subjectivity: 0.5,
            accept_rate: 0.23,
            total_paper_samples: 100_000,
            seed: 0,
        }
    }
}

impl SimConfig {
    /// Checks every field against its documented domain.
    pub fn validate(&self) -> Result<(), SimError> {
        if self.n_papers < 2 {
            return Err(invalid(
                "n_papers",
                format!("must be at least 2, got {}", self.n_papers),
            ));
        }
        if self.reviewers_per_paper == 0 {
            return Err(invalid("reviewers_per_paper", "must be at least 1"));
        }
        if !self.subjectivity.is_finite()
            || self.subjectivity <= 0.0
            || self.subjectivity > 1.0
        {
            return Err(invalid(
                "subjectivity",
                format!("must lie in (0, 1], got {}", self.subjectivity),
            ));
        }
        if !self.accept_rate.is_finite() || self.accept_rate <= 0.0 || self.accept_rate > 1.0 {
            return Err(invalid(
                "accept_rate",
                format!("must lie in (0, 1], got {}", self.accept_rate),
            ));
        }
        if self.accepted_per_committee() == 0 {
            return Err(invalid(
                "accept_rate",
                format!(
                    "floor(accept_rate * n_papers) must be at least 1, got floor({} * {}) = 0",
                    self.accept_rate, self.n_papers
                ),
            ));
        }
        if self.total_paper_samples < self.n_papers as u64 {
            return Err(invalid(
                "total_paper_samples",
                format!(
                    "must cover at least one full conference of {} papers, got {}",
                    self.n_papers, self.total_paper_samples
                ),
            ));
        }
        Ok(())
    }

    /// Number of independent conference trials a run will simulate.
    pub fn trials(&self) -> u32 {
        let n = self.n_papers as u64;
        self.total_paper_samples.div_ceil(n).min(u64::from(u32::MAX)) as u32
    }

    /// Papers each committee accepts per trial: `floor(accept_rate · n_papers)`.
    /// [`SimConfig::validate`] rejects configurations where this is zero.
    pub fn accepted_per_committee(&self) -> usize {
        (self.accept_rate * self.n_papers as f64).floor() as usize
    }
}

/// Aggregate result of one simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimOutcome {
    /// Mean of `|A₁ ∩ A₂| / k` across trials.
    pub accept_consistency: f64,
    /// Standard error of that mean (sample s.d. across trials divided by
    /// `√trials`); `0` when there is a single trial.
    pub std_error: f64,
    /// Number of conference trials simulated.
    pub trials: u32,
}

/// One cell of a consistency curve: a full simulation at a specific accept
/// rate and committee size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    /// Accept rate used for this cell.
    pub accept_rate: f64,
    /// Reviews per paper per committee used for this cell.
    pub reviewers_per_paper: u32,
    /// Mean accept consistency of the cell's run.
    pub accept_consistency: f64,
    /// Standard error of the cell's mean.
    pub std_error: f64,
    /// Trials simulated in the cell's run.
    pub trials: u32,
}

/// Runs the configured simulation and reports mean accept consistency.
pub fn simulate_conference(config: &SimConfig) -> Result<SimOutcome, SimError> {
    run_with_stream_base(config, 0)
}

/// Maps a fitted calibration model onto the simulator's subjectivity scale:
/// the fraction `σ² / (α_f + σ²)` of single-review variance that is reviewer
/// noise.  Complements [`CalibrationParams::objectivity`].
pub fn subjectivity_from_fit(params: &CalibrationParams) -> f64 {
    params.sigma2 / (params.alpha_f + params.sigma2)
}

/// Sweeps accept rate × committee size, running one full simulation per cell.
///
/// Cells are visited row-major (`accept_rates` outer, `reviewer_counts`
/// inner).  Cell `c` offsets its RNG streams by `c << 32`, so each cell is
/// statistically independent of the others yet individually reproducible; the
/// first cell reproduces [`simulate_conference`] bit for bit.  Both axes must be
/// non-empty, and each cell's configuration is validated like a normal run.
pub fn consistency_curve(
    base: &SimConfig,
    accept_rates: &[f64],
    reviewer_counts: &[u32],
) -> Result<Vec<CurvePoint>, SimError> {
    if accept_rates.is_empty() {
        return Err(invalid("accept_rates", "must list at least one rate"));
    }
    if reviewer_counts.is_empty() {
        return Err(invalid("reviewer_counts", "must list at least one count"));
    }
    let mut points = Vec::with_capacity(accept_rates.len() * reviewer_counts.len());
    let mut cell: u64 = 0;
    for &accept_rate in accept_rates {
        for &reviewers_per_paper in reviewer_counts {
            let cfg = SimConfig {
                accept_rate,
                reviewers_per_paper,
                ..base.clone()
            };
            let out = run_with_stream_base(&cfg, cell << 32)?;
            points.push(CurvePoint {
                accept_rate,
                reviewers_per_paper,
                accept_consistency: out.accept_consistency,
                std_error: out.std_error,
                trials: out.trials,
            });
            cell += 1;
        }
    }
    Ok(points)
}

fn run_with_stream_base(config: &SimConfig, stream_base: u64) -> Result<SimOutcome, SimError> {
    config.validate()?;
    let n = config.n_papers;
    let trials = config.trials();
    let k = config.accepted_per_committee();
    // Single-review variance is normalized to 1: quality carries 1 - s of it,
    // and a committee's mean of R errors carries s / R.
    let quality_sd = (1.0 - config.subjectivity).sqrt();
    let committee_noise_sd = (config.subjectivity / f64::from(config.reviewers_per_paper)).sqrt();
    let quality = Normal::new(0.0, quality_sd).expect("finite validated sd");
    let noise = Normal::new(0.0, committee_noise_sd).expect("finite validated sd");

    let mut per_trial = Vec::with_capacity(trials as usize);
    let mut f = vec![0.0f64; n];
    let mut scores = [vec![0.0f64; n], vec![0.0f64; n]];
    let mut masks = [vec![false; n], vec![false; n]];
    for trial in 0..trials {
        let mut rng = stream_rng(config.seed, stream_base | u64::from(trial));
        for fi in f.iter_mut() {
            *fi = quality.sample(&mut rng);
        }
        for (committee_scores, mask) in scores.iter_mut().zip(masks.iter_mut()) {
            for (si, fi) in committee_scores.iter_mut().zip(f.iter()) {
                *si = fi + noise.sample(&mut rng);
            }
            top_k_mask(committee_scores, k, &mut rng, mask);
        }
        let both = masks[0]
            .iter()
            .zip(masks[1].iter())
            .filter(|(a, b)| **a && **b)
            .count();
        per_trial.push(both as f64 / k as f64);
    }

    let t = per_trial.len() as f64;
    let mean = per_trial.iter().sum::<f64>() / t;
    let std_error = if per_trial.len() > 1 {
        let var = per_trial.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (t - 1.0);
        (var / t).sqrt()
    } else {
        0.0
    };
    Ok(SimOutcome {
        accept_consistency: mean,
        std_error,
        trials,
    })
}

/// Marks the `k` highest-scoring indices in `mask`.  Indices are shuffled
/// before a stable descending sort so that exact score ties are broken
/// randomly (independently per committee) instead of by paper index.
fn top_k_mask(scores: &[f64], k: usize, rng: &mut impl Rng, mask: &mut [bool]) {
    let mut order: Vec<u32> = (0..scores.len() as u32).collect();
    order.shuffle(rng);
    order.sort_by(|&a, &b| scores[b as usize].total_cmp(&scores[a as usize]));
    mask.fill(false);
    for &i in &order[..k.min(order.len())] {
        mask[i as usize] = true;
    }
}
