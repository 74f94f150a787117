//! Statistical toolkit for the 2014 two-committee peer-review experiment.
//!
//! In 2014 a large machine-learning conference ran 10% of its submissions
//! through two parallel program committees and compared the decisions. This
//! crate implements the analyses built on that experiment:
//!
//! - [`consistency`] — confusion-matrix statistics for the duplicated
//!   papers, the random-committee baseline, a binomial check on accept
//!   counts, and a Dirichlet posterior with Monte Carlo error bars.
//! - [`calibration`] — a Bayesian reviewer-calibration model
//!   (`score = paper quality + reviewer bias + noise`) fitted by profiled
//!   maximum likelihood over a variance-ratio grid, with exact Gaussian
//!   posteriors per paper, reviewer, and review.
//! - [`sim`] — a Monte Carlo committee simulation measuring how much
//!   decision disagreement a given level of score subjectivity produces.
//! - [`timeline`] — review-arrival series and the before/after-deadline
//!   Welch split test for late-review effects.
//! - [`impact`] — correlations between review scores and later citation
//!   impact (`log10(1 + citations)`), the rejected-paper fate table, and a
//!   noised scatter export.
//! - [`citations`] — a cached client for a citation-count API plus
//!   title/author matching for linking submissions to index records.
//! - [`synth`] — synthetic corpora drawn from the calibration model's own
//!   priors, for tests and demos with known ground truth.
//! - [`data`] — the CSV dataset model (reviews, duplicate pairs, decisions,
//!   outcomes) shared by everything above.
//!
//! Start with the `examples/` directory, which walks through each analysis
//! on shipped data (`cargo run --example committee_consistency`, …). The
//! same pipelines are scriptable through the `reviewlab` command-line tool
//! ([`cli`]), which writes deterministic, seed-stamped artifacts.
//!
//! Every random routine takes an explicit seed and derives independent
//! [`rng`] streams from it, so results are reproducible bit-for-bit across
//! runs and thread counts.

pub mod calibration;
pub mod cli;
pub mod consistency;
pub mod citations;
pub mod concurrency;
pub mod data;
pub mod impact;
pub mod report;
pub mod rng;
pub mod sim;
pub mod synth;
pub mod timeline;
