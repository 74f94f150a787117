//! Exact and Bayesian statistics of the two-committee experiment.
//!
//! In 2014 the NeurIPS program chairs routed ~10% of submissions through two
//! independent committees and tabulated the outcomes as a 2×2 confusion
//! matrix: both accept, committee 1 accept / committee 2 reject, the reverse,
//! and both reject.  This module computes
//!
//! * the exact summary fractions of such a matrix ([`confusion_stats`]);
//! * the matrix a pair of committees deciding *at random* at a fixed accept
//!   rate would produce in expectation ([`random_committee_expectation`]);
//! * an exact binomial sanity check that an observed accept count is
//!   consistent with a hypothesized accept rate ([`binomial_check`]);
//! * the conjugate Dirichlet posterior over the three outcome probabilities
//!   (consistent accept, inconsistent, consistent reject)
//!   ([`dirichlet_posterior`]) and Monte Carlo estimates of the ratio
//!   statistics it induces ([`posterior_ratio_mc`]).
//!
//! Two definitional wrinkles from the published write-up are carried
//! explicitly rather than silently resolved:
//!
//! * **Agreed accept rate.**  The study quotes both `22/101 = 0.218`
//!   (consistent accepts per consistent reject) and `22/123 = 0.18`
//!   (consistent accepts as a fraction of all consistent decisions).  The
//!   primary `agreed_accept_rate` is `aa/rr`; the alternate is reported
//!   alongside it as `agreed_accept_fraction`.
//! * **Dirichlet variance.**  The study's appendix prints a posterior
//!   variance formula that differs from the standard Dirichlet variance by an
//!   extra `2k_i` term in the second factor.  The standard formula
//!   `Var[p_i] = ã_i(ã₀−ã_i) / (ã₀²(ã₀+1))` is implemented; the unit tests
//!   validate it against Monte Carlo, which rules the printed variant out.

use std::collections::BTreeMap;

use rand_distr::{Distribution, Gamma};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::data::{Committee, DecisionRecord, DuplicatePair, PaperId, Verdict};
use crate::rng::stream_rng;

/// Number of uniform histogram bins over `[0, 1]` used by [`posterior_ratio_mc`].
pub const HISTOGRAM_BINS: usize = 50;

/// Mass covered by the central interval of [`binomial_check`].
pub const CENTRAL_INTERVAL_MASS: f64 = 0.95;

/// Error raised on out-of-domain inputs to the statistics in this module.
#[derive(Debug, thiserror::Error)]
pub enum ConsistencyError {
    /// An argument is outside its documented domain.
    #[error("invalid input: {field} {message}")]
    InvalidInput {
        /// Name of the offending argument.
        field: &'static str,
        /// Human-readable constraint violation.
        message: String,
    },
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConsistencyError {
    ConsistencyError::InvalidInput {
        field,
        message: message.into(),
    }
}

/// Outcome counts of the duplicate-review experiment.
///
/// Committee 1's verdict indexes the first letter, committee 2's the second:
/// `ar` counts papers committee 1 accepted and committee 2 rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    /// Both committees accepted.
    pub aa: u64,
    /// Committee 1 accepted, committee 2 rejected.
    pub ar: u64,
    /// Committee 1 rejected, committee 2 accepted.
    pub ra: u64,
    /// Both committees rejected.
    pub rr: u64,
}

impl ConfusionMatrix {
    /// Total number of tabulated duplicate papers.
    pub fn total(&self) -> u64 {
        self.aa + self.ar + self.ra + self.rr
    }

    /// Tabulates duplicate pairs against the two committees' decisions.
    ///
    /// For each pair, committee 1's verdict on the pair's first paper id and
    /// committee 2's verdict on the second are looked up in `decisions`.
    /// Pairs with a missing decision on either side, or where either verdict
    /// is `withdrawn`, are skipped — only papers both committees actually
    /// judged enter the matrix.
    pub fn from_decisions(duplicates: &[DuplicatePair], decisions: &[DecisionRecord]) -> Self {
        let lookup: BTreeMap<(&PaperId, Committee), Verdict> = decisions
            .iter()
            .map(|d| ((&d.paper_id, d.committee), d.verdict))
            .collect();
        let mut m = ConfusionMatrix { aa: 0, ar: 0, ra: 0, rr: 0 };
        for pair in duplicates {
            let v1 = lookup.get(&(&pair.committee1_paper, Committee::One));
            let v2 = lookup.get(&(&pair.committee2_paper, Committee::Two));
            match (v1, v2) {
                (Some(Verdict::Accept), Some(Verdict::Accept)) => m.aa += 1,
                (Some(Verdict::Accept), Some(Verdict::Reject)) => m.ar += 1,
                (Some(Verdict::Reject), Some(Verdict::Accept)) => m.ra += 1,
                (Some(Verdict::Reject), Some(Verdict::Reject)) => m.rr += 1,
                // Withdrawn on either side, or no decision recorded.
                _ => {}
            }
        }
        m
    }
}

/// Summary fractions of a [`ConfusionMatrix`].
///
/// Every field whose denominator is zero is reported as `None` (serialized
/// as `null`), never as a fabricated zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsistencySummary {
    /// Fraction of papers the committees disagreed on: `(ar+ra)/total`.
    pub inconsistency: Option<f64>,
    /// Of committee 1's accepts, the fraction committee 2 also accepted:
    /// `aa/(aa+ar)`.
    pub accept_precision_c1: Option<f64>,
    /// Of committee 2's accepts, the fraction committee 1 also accepted:
    /// `aa/(aa+ra)`.
    pub accept_precision_c2: Option<f64>,
    /// Mean of the two accept precisions (present only when both are).
    pub accept_precision_avg: Option<f64>,
    /// Of committee 1's rejects, the fraction committee 2 also rejected:
    /// `rr/(ra+rr)`.
    pub reject_precision_c1: Option<f64>,
    /// Of committee 2's rejects, the fraction committee 1 also rejected:
    /// `rr/(ar+rr)`.
    pub reject_precision_c2: Option<f64>,
    /// Mean of the two reject precisions (present only when both are).
    pub reject_precision_avg: Option<f64>,
    /// Consistent accepts per consistent reject: `aa/rr`.
    pub agreed_accept_rate: Option<f64>,
    /// Alternate reading quoted in the study: consistent accepts as a
    /// fraction of all consistent decisions, `aa/(aa+rr)`.
    pub agreed_accept_fraction: Option<f64>,
    /// Standard error of the committee-1 accept split:
    /// `√(p(1−p)/(aa+ar))` with `p = ar/(aa+ar)`.
    pub inconsistency_se: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn mean2(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) => Some((a + b) / 2.0),
        _ => None,
    }
}

/// Computes every summary fraction of a confusion matrix.
pub fn confusion_stats(m: &ConfusionMatrix) -> ConsistencySummary {
    let accept_precision_c1 = ratio(m.aa, m.aa + m.ar);
    let accept_precision_c2 = ratio(m.aa, m.aa + m.ra);
    let reject_precision_c1 = ratio(m.rr, m.ra + m.rr);
    let reject_precision_c2 = ratio(m.rr, m.ar + m.rr);
    let inconsistency_se = ratio(m.ar, m.aa + m.ar).map(|p| {
        (p * (1.0 - p) / (m.aa + m.ar) as f64).sqrt()
    });
    ConsistencySummary {
        inconsistency: ratio(m.ar + m.ra, m.total()),
        accept_precision_c1,
        accept_precision_c2,
        accept_precision_avg: mean2(accept_precision_c1, accept_precision_c2),
        reject_precision_c1,
        reject_precision_c2,
        reject_precision_avg: mean2(reject_precision_c1, reject_precision_c2),
        agreed_accept_rate: (m.rr > 0).then(|| m.aa as f64 / m.rr as f64),
        agreed_accept_fraction: ratio(m.aa, m.aa + m.rr),
        inconsistency_se,
    }
}

/// Expected confusion matrix of two committees deciding independently at
/// random, each accepting a fraction `accept_rate` of papers, together with
/// the summary statistics that expectation implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectedConfusion {
    /// Expected both-accept count: `total·p²`.
    pub aa: f64,
    /// Expected accept/reject count: `total·p(1−p)`.
    pub ar: f64,
    /// Expected reject/accept count: `total·p(1−p)`.
    pub ra: f64,
    /// Expected both-reject count: `total·(1−p)²`.
    pub rr: f64,
    /// Implied inconsistency `2p(1−p)`.
    pub inconsistency: f64,
    /// Implied accept precision `p` (same for both committees).
    pub accept_precision: f64,
    /// Implied reject precision `1−p`.
    pub reject_precision: f64,
    /// Implied agreed accept rate `p²/(1−p)²`.
    pub agreed_accept_rate: f64,
}

/// Baseline for judging the observed matrix: what purely random committees
/// would produce in expectation.
pub fn random_committee_expectation(
    total: u64,
    accept_rate: f64,
) -> Result<ExpectedConfusion, ConsistencyError> {
    if total == 0 {
        return Err(invalid("total", "must be positive"));
    }
    if !accept_rate.is_finite() || accept_rate <= 0.0 || accept_rate >= 1.0 {
        return Err(invalid(
            "accept_rate",
            format!("must lie in (0, 1), got {accept_rate}"),
        ));
    }
    let t = total as f64;
    let p = accept_rate;
    let q = 1.0 - p;
    Ok(ExpectedConfusion {
        aa: t * p * p,
        ar: t * p * q,
        ra: t * p * q,
        rr: t * q * q,
        inconsistency: 2.0 * p * q,
        accept_precision: p,
        reject_precision: q,
        agreed_accept_rate: (p * p) / (q * q),
    })
}

/// Exact binomial check of an observed accept count against a hypothesized
/// accept rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinomialReport {
    /// Observed accept count.
    pub k: u64,
    /// Number of decisions.
    pub n: u64,
    /// Hypothesized accept rate.
    pub p: f64,
    /// Distribution mean `n·p`.
    pub mean: f64,
    /// Exact probability mass at `k`.
    pub pmf_at_k: f64,
    /// Inclusive lower end of the central 95% interval.
    pub interval_low: u64,
    /// Inclusive upper end of the central 95% interval.
    pub interval_high: u64,
    /// Normal-approximation score `(k − np)/√(np(1−p))`.
    pub z: f64,
    /// Whether `k` lies inside `[interval_low, interval_high]`.
    pub inside_interval: bool,
}

/// Log of the binomial PMF at `x`, via log-gamma for numerical range.
fn binomial_ln_pmf(n: u64, p: f64, x: u64) -> f64 {
    let (n_f, x_f) = (n as f64, x as f64);
    ln_gamma(n_f + 1.0) - ln_gamma(x_f + 1.0) - ln_gamma(n_f - x_f + 1.0)
        + x_f * p.ln()
        + (n_f - x_f) * (1.0 - p).ln()
}

/// Tests whether `k` accepts out of `n` decisions are plausible under a
/// binomial model with accept probability `p`.
///
/// The central interval is grown outward from the mode `floor((n+1)p)`,
/// repeatedly annexing whichever neighboring count carries more mass (the
/// lower side on ties) until at least [`CENTRAL_INTERVAL_MASS`] is covered.
pub fn binomial_check(k: u64, n: u64, p: f64) -> Result<BinomialReport, ConsistencyError> {
    if n == 0 {
        return Err(invalid("n", "must be positive"));
    }
    if k > n {
        return Err(invalid("k", format!("must not exceed n={n}, got {k}")));
    }
    if !p.is_finite() || p <= 0.0 || p >= 1.0 {
        return Err(invalid("p", format!("must lie in (0, 1), got {p}")));
    }
    let mode = (((n + 1) as f64) * p).floor().min(n as f64) as u64;
    let mut lo = mode;
    let mut hi = mode;
    let mut mass = binomial_ln_pmf(n, p, mode).exp();
    while mass < CENTRAL_INTERVAL_MASS && (lo > 0 || hi < n) {
        let below = (lo > 0).then(|| binomial_ln_pmf(n, p, lo - 1).exp());
        let above = (hi < n).then(|| binomial_ln_pmf(n, p, hi + 1).exp());
        match (below, above) {
            (Some(b), Some(a)) if b >= a => {
                lo -= 1;
                mass += b;
            }
            (_, Some(a)) => {
                hi += 1;
                mass += a;
            }
            (Some(b), None) => {
                lo -= 1;
                mass += b;
            }
            (None, None) => unreachable!("loop guard ensures a side remains"),
        }
    }
    let mean = n as f64 * p;
    let sd = (mean * (1.0 - p)).sqrt();
    Ok(BinomialReport {
        k,
        n,
        p,
        mean,
        pmf_at_k: binomial_ln_pmf(n, p, k).exp(),
        interval_low: lo,
        interval_high: hi,
        z: (k as f64 - mean) / sd,
        inside_interval: lo <= k && k <= hi,
    })
}

/// Conjugate Dirichlet posterior over the three outcome probabilities
/// (consistent accept, inconsistent, consistent reject).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirichletPosterior {
    /// Prior concentrations.
    pub alpha: [f64; 3],
    /// Observed counts (consistent accept, inconsistent, consistent reject).
    pub counts: [u64; 3],
    /// Posterior concentrations `α_i + k_i`.
    pub posterior_alpha: [f64; 3],
    /// Posterior means `ã_i / ã₀`.
    pub means: [f64; 3],
    /// Posterior variances `ã_i(ã₀−ã_i)/(ã₀²(ã₀+1))` (standard Dirichlet
    /// variance; see the module docs for the formula discrepancy carried
    /// from the study's appendix).
    pub variances: [f64; 3],
}

/// Updates a Dirichlet prior with observed outcome counts.
pub fn dirichlet_posterior(
    prior_alpha: [f64; 3],
    counts: [u64; 3],
) -> Result<DirichletPosterior, ConsistencyError> {
    for (i, &a) in prior_alpha.iter().enumerate() {
        if !a.is_finite() || a <= 0.0 {
            return Err(invalid(
                "prior_alpha",
                format!("component {i} must be positive and finite, got {a}"),
            ));
        }
    }
    let mut posterior_alpha = [0.0; 3];
    for i in 0..3 {
        posterior_alpha[i] = prior_alpha[i] + counts[i] as f64;
    }
    let a0: f64 = posterior_alpha.iter().sum();
    let mut means = [0.0; 3];
    let mut variances = [0.0; 3];
    for i in 0..3 {
        let ai = posterior_alpha[i];
        means[i] = ai / a0;
        variances[i] = ai * (a0 - ai) / (a0 * a0 * (a0 + 1.0));
    }
    Ok(DirichletPosterior {
        alpha: prior_alpha,
        counts,
        posterior_alpha,
        means,
        variances,
    })
}

/// Monte Carlo summary of one ratio statistic: moments plus a fixed-bin
/// histogram of the sampled values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McStat {
    /// Sample mean.
    pub mean: f64,
    /// Sample standard deviation (denominator `n−1`).
    pub sd: f64,
    /// Twice the standard deviation — the half-width the study quotes after
    /// its `±` signs.
    pub two_sd: f64,
    /// Draw counts over [`HISTOGRAM_BINS`] uniform bins spanning `[0, 1]`
    /// (the last bin includes 1.0 exactly).
    pub histogram: Vec<u64>,
    /// Draws exceeding 1.0 (possible for `agreed_accept_rate`, which is a
    /// ratio of two probabilities rather than a probability).
    pub overflow: u64,
    /// Number of Monte Carlo samples.
    pub n_samples: u64,
}

/// Monte Carlo estimates of the conference statistics induced by a
/// [`DirichletPosterior`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioStats {
    /// `p₁/(p₁ + p₂/2)`: accept precision of a conference with outcome
    /// probabilities `p` (the inconsistent mass splits evenly between the
    /// committees, matching the empirical estimates `22/43` and `22/44`).
    pub accept_precision: McStat,
    /// `p₃/(p₃ + p₂/2)`: reject precision of such a conference.
    pub reject_precision: McStat,
    /// `p₁/p₃`: consistent accepts per consistent reject.
    pub agreed_accept_rate: McStat,
    /// `p₁/(p₁+p₃)`: the alternate agreed-accept reading (see module docs).
    pub agreed_accept_fraction: McStat,
}

/// Streaming mean/variance accumulator (Welford) with a fixed-bin histogram.
struct Accum {
    n: u64,
    mean: f64,
    m2: f64,
    histogram: Vec<u64>,
    overflow: u64,
}

impl Accum {
    fn new() -> Self {
        Accum {
            n: 0,
            mean: 0.0,
            m2: 0.0,
            histogram: vec![0; HISTOGRAM_BINS],
            overflow: 0,
        }
    }

    fn push(&mut self, v: f64) {
        self.n += 1;
        let delta = v - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (v - self.mean);
        if v > 1.0 {
            self.overflow += 1;
        } else {
            let bin = ((v * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
            self.histogram[bin] += 1;
        }
    }

    fn finish(self) -> McStat {
        let sd = if self.n > 1 {
            (self.m2 / (self.n - 1) as f64).sqrt()
        } else {
            0.0
        };
        McStat {
            mean: self.mean,
            sd,
            two_sd: 2.0 * sd,
            histogram: self.histogram,
            overflow: self.overflow,
            n_samples: self.n,
        }
    }
}

/// Draws `n_samples` outcome-probability vectors from the posterior and
/// summarizes the induced conference statistics.
///
/// Each draw `p ~ Dir(ã)` is generated by normalizing three `Gamma(ã_i, 1)`
/// variates from [`stream_rng`]`(seed, 0)`, so results are deterministic in
/// `seed`.  At least 10 000 samples are required for the moments to be
/// meaningful.
pub fn posterior_ratio_mc(
    posterior: &DirichletPosterior,
    n_samples: u64,
    seed: u64,
) -> Result<RatioStats, ConsistencyError> {
    if n_samples < 10_000 {
        return Err(invalid(
            "n_samples",
            format!("must be at least 10000, got {n_samples}"),
        ));
    }
    let gammas: Vec<Gamma<f64>> = posterior
        .posterior_alpha
        .iter()
        .map(|&a| Gamma::new(a, 1.0).expect("posterior concentrations are positive"))
        .collect();
    let mut rng = stream_rng(seed, 0);
    let mut accept = Accum::new();
    let mut reject = Accum::new();
    let mut rate = Accum::new();
    let mut fraction = Accum::new();
    for _ in 0..n_samples {
        let g1 = gammas[0].sample(&mut rng);
        let g2 = gammas[1].sample(&mut rng);
        let g3 = gammas[2].sample(&mut rng);
        let total = g1 + g2 + g3;
        let (p1, p2, p3) = (g1 / total, g2 / total, g3 / total);
        accept.push(p1 / (p1 + p2 / 2.0));
        reject.push(p3 / (p3 + p2 / 2.0));
        rate.push(p1 / p3);
        fraction.push(p1 / (p1 + p3));
    }
    Ok(RatioStats {
        accept_precision: accept.finish(),
        reject_precision: reject.finish(),
        agreed_accept_rate: rate.finish(),
        agreed_accept_fraction: fraction.finish(),
    })
}
