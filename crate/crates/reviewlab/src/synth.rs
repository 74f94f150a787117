//! Model-faithful synthetic review corpora.
//!
//! The real 2014 review corpus is private, so every demo, test, and shipped
//! sample here runs on synthetic data drawn from the same generative models
//! the analyses assume:
//!
//! - [`generate`] builds a full four-table [`Dataset`]: paper qualities and
//!   reviewer biases from the calibration model's Gaussian priors, duplicated
//!   papers reviewed by two disjoint committees, an arrival process with a
//!   pre-deadline ramp and a late tail, top-k accept decisions, and
//!   post-conference fates with citation counts tied to latent quality (so
//!   score–impact correlations are really there to find).
//! - [`timeline_corpus`] builds a lightweight review stream with a
//!   controllable post-deadline confidence drop, for timeline power studies
//!   and null calibration checks.
//! - [`planted_correlation`] draws a bivariate normal sample with a known
//!   correlation, for estimator recovery checks.
//!
//! All generators are pure functions of their configuration and seed: every
//! stage draws from its own derived RNG stream, so regenerating with the same
//! inputs reproduces the corpus byte for byte.

use chrono::{DateTime, Duration, Utc};
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Exp, LogNormal, Normal};

use crate::data::{
    Committee, Dataset, DecisionRecord, DuplicatePair, Fate, PaperId, PaperOutcome, ReviewRecord,
    ReviewerId, Track, Verdict,
};
use crate::rng::stream_rng;
use crate::timeline::{default_cutoff, default_deadline};

/// Configuration for [`generate`].
#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    /// Distinct physical papers. The first `n_duplicates` of them are
    /// submitted to both committees under two submission ids.
    pub n_papers: usize,
    /// Reviewer pool size (split into two committee halves).
    pub n_reviewers: usize,
    /// Reviews per submission.
    pub reviews_per_paper: u32,
    /// Physical papers reviewed independently by both committees.
    pub n_duplicates: usize,
    /// Prior mean quality on the 1–10 scale.
    pub mu: f64,
    /// Prior variance of paper quality.
    pub alpha_f: f64,
    /// Prior variance of reviewer bias.
    pub alpha_b: f64,
    /// Per-review noise variance.
    pub sigma2: f64,
    /// Fraction of each committee's submissions accepted.
    pub accept_rate: f64,
    /// Drop in mean reviewer confidence for post-deadline reviews.
    pub confidence_drop: f64,
    /// Fraction of reviews arriving after the deadline (before the cutoff).
    pub late_fraction: f64,
    /// Master seed.
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_papers: 80,
            n_reviewers: 40,
            reviews_per_paper: 3,
            n_duplicates: 10,
            mu: 5.5,
            alpha_f: 1.28,
            alpha_b: 0.24,
            sigma2: 1.27,
            accept_rate: 0.23,
            confidence_drop: 0.1,
            late_fraction: 0.3,
            seed: 0,
        }
    }
}

/// Errors from corpus generation.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SynthError {
    /// A configuration field failed validation.
    #[error("invalid {field}: {message}")]
    InvalidConfig {
        /// Which field.
        field: &'static str,
        /// What went wrong.
        message: String,
    },
}

fn invalid(field: &'static str, message: impl Into<String>) -> SynthError {
    SynthError::InvalidConfig { field, message: message.into() }
}

impl SynthConfig {
    /// Checks every invariant the generator relies on.
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n_papers == 0 {
            return Err(invalid("n_papers", "must be at least 1"));
        }
        if self.n_duplicates > self.n_papers {
            return Err(invalid("n_duplicates", "cannot exceed n_papers"));
        }
        if self.n_reviewers < 2 {
            return Err(invalid("n_reviewers", "need at least 2 reviewers"));
        }
        if self.reviews_per_paper == 0 {
            return Err(invalid("reviews_per_paper", "must be at least 1"));
        }
        let half = self.n_reviewers / 2;
        if self.n_duplicates > 0 && self.reviews_per_paper as usize > half {
            return Err(invalid(
                "reviews_per_paper",
                format!("committee halves have {half} reviewers; cannot staff duplicated papers"),
            ));
        }
        if self.reviews_per_paper as usize > self.n_reviewers {
            return Err(invalid("reviews_per_paper", "cannot exceed n_reviewers"));
        }
        for (field, v) in
            [("alpha_f", self.alpha_f), ("alpha_b", self.alpha_b), ("sigma2", self.sigma2)]
        {
            if !v.is_finite() || v <= 0.0 {
                return Err(invalid(field, "must be a positive finite variance"));
            }
        }
        if !self.mu.is_finite() {
            return Err(invalid("mu", "must be finite"));
        }
        if !(self.accept_rate > 0.0 && self.accept_rate < 1.0) {
            return Err(invalid("accept_rate", "must lie in (0, 1)"));
        }
        if !self.confidence_drop.is_finite() || self.confidence_drop < 0.0 {
            return Err(invalid("confidence_drop", "must be a non-negative finite value"));
        }
        if !(0.0..1.0).contains(&self.late_fraction) {
            return Err(invalid("late_fraction", "must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// One submission id together with the latent quality of its physical paper
/// and the committee that handles it.
struct Submission {
    id: PaperId,
    latent: f64,
    committee: Committee,
}

/// Seconds in one day, for converting exponential day draws to offsets.
const DAY_SECONDS: f64 = 86_400.0;

/// Draws a submission time: a ramp towards the deadline, with a late tail
/// between deadline and cutoff for a `late_fraction` share of reviews.
fn draw_time(
    rng: &mut impl Rng,
    late_fraction: f64,
    deadline: DateTime<Utc>,
    cutoff: DateTime<Utc>,
) -> (DateTime<Utc>, bool) {
    let late = rng.random::<f64>() < late_fraction;
    if late {
        let tail = Exp::new(1.0 / 3.5).expect("positive rate");
        let span_days = (cutoff - deadline).num_seconds() as f64 / DAY_SECONDS;
        let mut days = tail.sample(rng);
        if days >= span_days {
            // Fold the rare overflow back into the window rather than
            // leaking reviews into the rebuttal period.
            days %= span_days;
        }
        (deadline + Duration::seconds((days * DAY_SECONDS) as i64), true)
    } else {
        let ramp = Exp::new(1.0 / 6.0).expect("positive rate");
        let days: f64 = ramp.sample(rng);
        let days = days.min(40.0);
        (deadline - Duration::seconds((days * DAY_SECONDS) as i64 + 1), false)
    }
}

/// Rounds a real-valued score onto an integer Likert scale.
fn likert(value: f64, max: u8) -> u8 {
    value.round().clamp(1.0, f64::from(max)) as u8
}

/// Generates a complete synthetic dataset.
///
/// See the module docs for the generative story. The output tables are in
/// [`Dataset`] canonical order and ready for any analysis in this crate.
pub fn generate(config: &SynthConfig) -> Result<Dataset, SynthError> {
    config.validate()?;
    let deadline = default_deadline();
    let cutoff = default_cutoff();

    let mut rng_latent = stream_rng(config.seed, 0);
    let mut rng_bias = stream_rng(config.seed, 1);
    let mut rng_assign = stream_rng(config.seed, 2);
    let mut rng_score = stream_rng(config.seed, 3);
    let mut rng_label = stream_rng(config.seed, 4);
    let mut rng_time = stream_rng(config.seed, 5);
    let mut rng_words = stream_rng(config.seed, 6);
    let mut rng_outcome = stream_rng(config.seed, 7);

    let quality_prior = Normal::new(config.mu, config.alpha_f.sqrt()).expect("valid prior");
    let latents: Vec<f64> = (0..config.n_papers).map(|_| quality_prior.sample(&mut rng_latent)).collect();

    let bias_prior = Normal::new(0.0, config.alpha_b.sqrt()).expect("valid prior");
    let reviewers: Vec<(ReviewerId, f64)> = (0..config.n_reviewers)
        .map(|j| (ReviewerId(format!("R{j:03}")), bias_prior.sample(&mut rng_bias)))
        .collect();
    let half = config.n_reviewers / 2;

    // Submissions: duplicated papers appear once per committee; the rest go
    // to the main pool.
    let mut submissions = Vec::new();
    let mut duplicates = Vec::new();
    for (k, &latent) in latents.iter().take(config.n_duplicates).enumerate() {
        let a = PaperId(format!("D{k:03}A"));
        let b = PaperId(format!("D{k:03}B"));
        submissions.push(Submission { id: a.clone(), latent, committee: Committee::One });
        submissions.push(Submission { id: b.clone(), latent, committee: Committee::Two });
        duplicates.push(DuplicatePair {
            committee1_paper: a,
            committee2_paper: b,
            experiment_id: format!("dup{k:03}"),
        });
    }
    for (k, &latent) in latents.iter().enumerate().skip(config.n_duplicates) {
        submissions.push(Submission {
            id: PaperId(format!("P{k:03}")),
            latent,
            committee: Committee::Main,
        });
    }

    let noise = Normal::new(0.0, config.sigma2.sqrt()).expect("valid noise");
    let confidence_prior = Normal::new(3.3, 0.9).expect("valid prior");
    let summary_words = Normal::new(60.0, 20.0).expect("valid prior");
    let body_words = Normal::new(320.0, 90.0).expect("valid prior");

    let mut reviews = Vec::new();
    for sub in &submissions {
        // Duplicated submissions draw reviewers from their committee's half
        // of the pool; main-pool papers draw from everyone.
        let (pool_start, pool_len) = match sub.committee {
            Committee::One => (0, half),
            Committee::Two => (half, config.n_reviewers - half),
            Committee::Main => (0, config.n_reviewers),
        };
        let picks = index::sample(&mut rng_assign, pool_len, config.reviews_per_paper as usize);
        for pick in picks.iter() {
            let (reviewer_id, bias) = &reviewers[pool_start + pick];
            let score = sub.latent + bias + noise.sample(&mut rng_score);
            let (submitted_at, late) =
                draw_time(&mut rng_time, config.late_fraction, deadline, cutoff);
            let confidence_base: f64 = confidence_prior.sample(&mut rng_label);
            let confidence_raw =
                confidence_base - if late { config.confidence_drop } else { 0.0 };
            let breakthrough_p =
                0.15 + 0.25 / (1.0 + (-(sub.latent - config.mu)).exp());
            let impact = if rng_label.random::<f64>() < breakthrough_p { 2 } else { 1 };
            reviews.push(ReviewRecord {
                paper_id: sub.id.clone(),
                reviewer_id: reviewer_id.clone(),
                quality: likert(score, 10),
                impact,
                confidence: likert(confidence_raw, 5),
                submitted_at,
                summary_words: {
                    let w: f64 = summary_words.sample(&mut rng_words);
                    w.round().clamp(5.0, 400.0) as u32
                },
                body_words: {
                    let w: f64 = body_words.sample(&mut rng_words);
                    w.round().clamp(30.0, 2000.0) as u32
                },
            });
        }
    }

    // Decisions: each committee accepts the top share of its submissions by
    // mean review quality (ties broken by id).
    let mut decisions = Vec::new();
    for committee in [Committee::One, Committee::Two, Committee::Main] {
        let mut ranked: Vec<(&PaperId, f64)> = submissions
            .iter()
            .filter(|s| s.committee == committee)
            .map(|s| {
                let scores: Vec<f64> = reviews
                    .iter()
                    .filter(|r| r.paper_id == s.id)
                    .map(|r| f64::from(r.quality))
                    .collect();
                (&s.id, scores.iter().sum::<f64>() / scores.len() as f64)
            })
            .collect();
        if ranked.is_empty() {
            continue;
        }
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let k = ((config.accept_rate * ranked.len() as f64).floor() as usize).max(1);
        for (rank, (paper, _)) in ranked.iter().enumerate() {
            decisions.push(DecisionRecord {
                paper_id: (*paper).clone(),
                committee,
                verdict: if rank < k { Verdict::Accept } else { Verdict::Reject },
            });
        }
    }
    let accepted: std::collections::BTreeSet<&PaperId> = decisions
        .iter()
        .filter(|d| d.verdict == Verdict::Accept)
        .map(|d| &d.paper_id)
        .collect();

    // Outcomes: accepted papers publish here; rejected ones disperse. Venue
    // spellings are deliberately inconsistent to exercise normalization.
    let venues: [(&str, u32); 14] = [
        ("AISTATS", 3),
        ("AAAI-2015", 2),
        ("aaai", 2),
        ("ICML 2015", 2),
        ("icml", 1),
        ("CVPR 2015", 2),
        ("JMLR", 2),
        ("IJCAI 2015", 1),
        ("ICLR 2015", 2),
        ("UAI", 1),
        ("NIPS 2015", 2),
        ("ECML-PKDD", 1),
        ("KDD", 1),
        ("arXiv", 1),
    ];
    let venue_weight: u32 = venues.iter().map(|(_, w)| w).sum();

    let mut outcomes = Vec::new();
    for sub in &submissions {
        let track = if accepted.contains(&sub.id) { Track::Accepted } else { Track::Rejected };
        let centered = sub.latent - config.mu;
        let (fate, venue, citations) = if track == Track::Accepted {
            let dist = LogNormal::new(15.0f64.ln() + 0.6 * centered, 0.8).expect("valid");
            (Fate::ThisConference, None, dist.sample(&mut rng_outcome) as u64)
        } else {
            let roll = rng_outcome.random::<f64>();
            if roll < 0.50 {
                let mut pick = rng_outcome.random_range(0..venue_weight);
                let mut venue = venues[0].0;
                for (name, w) in venues {
                    if pick < w {
                        venue = name;
                        break;
                    }
                    pick -= w;
                }
                let dist = LogNormal::new(6.0f64.ln() + 0.6 * centered, 0.9).expect("valid");
                (Fate::OtherVenue, Some(venue.to_string()), dist.sample(&mut rng_outcome) as u64)
            } else if roll < 0.67 {
                let dist = LogNormal::new(2.0f64.ln() + 0.6 * centered, 0.9).expect("valid");
                (Fate::PreprintOnly, Some("arXiv".to_string()), dist.sample(&mut rng_outcome) as u64)
            } else if roll < 0.75 {
                let dist = LogNormal::new(1.5f64.ln() + 0.6 * centered, 0.9).expect("valid");
                (Fate::PdfOnly, None, dist.sample(&mut rng_outcome) as u64)
            } else {
                (Fate::Untraced, None, 0)
            }
        };
        outcomes.push(PaperOutcome { paper_id: sub.id.clone(), track, fate, venue, citations });
    }

    Ok(Dataset::new(reviews, duplicates, decisions, outcomes))
}

/// A lightweight review stream for timeline analysis.
///
/// Confidence is `N(3.3, 0.9²)` rounded onto the 1–5 scale, minus
/// `confidence_drop` for reviews arriving after the deadline; roughly 30% of
/// reviews are late and none fall at or past the cutoff. Other fields are
/// stationary, so with `confidence_drop = 0` the corpus is a null corpus for
/// the split test.
pub fn timeline_corpus(n_reviews: usize, confidence_drop: f64, seed: u64) -> Vec<ReviewRecord> {
    let deadline = default_deadline();
    let cutoff = default_cutoff();
    let mut rng = stream_rng(seed, 0);
    let confidence_prior = Normal::new(3.3, 0.9).expect("valid prior");
    let n_papers = (n_reviews / 3).max(1);
    (0..n_reviews)
        .map(|i| {
            let late = rng.random::<f64>() < 0.3;
            let submitted_at = if late {
                let span = (cutoff - deadline).num_seconds();
                deadline + Duration::seconds(rng.random_range(0..span))
            } else {
                deadline - Duration::seconds(rng.random_range(1..20 * 86_400))
            };
            let confidence = confidence_prior.sample(&mut rng)
                - if late { confidence_drop } else { 0.0 };
            ReviewRecord {
                paper_id: PaperId(format!("P{:05}", i % n_papers)),
                reviewer_id: ReviewerId(format!("R{i:05}")),
                quality: rng.random_range(1..=10),
                impact: rng.random_range(1..=2),
                confidence: likert(confidence, 5),
                submitted_at,
                summary_words: rng.random_range(20..120),
                body_words: rng.random_range(100..700),
            }
        })
        .collect()
}

/// Draws `n` points from a bivariate standard normal with correlation `rho`.
pub fn planted_correlation(n: usize, rho: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    assert!(rho.abs() <= 1.0, "correlation must lie in [-1, 1]");
    let mut rng = stream_rng(seed, 0);
    let normal = Normal::new(0.0, 1.0).expect("valid");
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let residual = (1.0 - rho * rho).sqrt();
    for _ in 0..n {
        let a: f64 = normal.sample(&mut rng);
        let b: f64 = normal.sample(&mut rng);
        x.push(a);
        y.push(rho * a + residual * b);
    }
    (x, y)
}
