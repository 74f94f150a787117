//! Citation impact, correlation reports, noised scatter data, and
//! rejected-paper fates.
//!
//! After the 2014 NeurIPS experiment, the duplicated submissions were traced
//! through the literature: accepted papers to the proceedings, rejected ones
//! to later venues, preprint servers, stray PDFs, or nowhere.  This module
//! provides the statistical plumbing of that follow-up:
//!
//! * [`citation_impact`] — the variance-stabilizing `log₁₀(1 + citations)`
//!   transform that tames the heavy tail of raw citation counts;
//! * [`pearson`] — Pearson correlation with the standard error
//!   `√((1−ρ²)/(n−2))` used throughout the published figures;
//! * [`correlation_report`] — per-paper review scores joined against citation
//!   impact over a chosen submission subset;
//! * [`committee_score_correlation`] — agreement of the two committees'
//!   per-paper mean scores over the duplicated submissions;
//! * [`dp_scatter`] — Laplace-noised scatter coordinates for publishable
//!   plots (correlations are always computed from raw points: this function
//!   returns [`NoisedPoint`]s, and nothing in the crate accepts those for
//!   correlation);
//! * [`fate_table`] — the venue tabulation and Sankey flow of where rejected
//!   papers ended up.
//!
//! The noise scales default to 0.25 score-units and 0.05 impact-units.  They
//! are visual obfuscation only: no formal differential-privacy budget is
//! claimed (the study itself alternates between "differentially private
//! noise" and "Laplacian noise" without parameters).

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::calibration::CalibrationFit;
use crate::data::{Dataset, Fate, PaperId, PaperOutcome, Track};
use crate::rng::stream_rng;

/// Venues with at least this many later publications get their own row in a
/// [`FateTable`]; the rest pool into the `other` bucket.
pub const DEFAULT_VENUE_THRESHOLD: u64 = 10;

/// Default Laplace noise scale for the score axis of [`dp_scatter`].
pub const DEFAULT_SCATTER_SCALE_X: f64 = 0.25;

/// Default Laplace noise scale for the impact axis of [`dp_scatter`].
pub const DEFAULT_SCATTER_SCALE_Y: f64 = 0.05;

/// Embedded venue alias table: normalized key → canonical display name.
const VENUE_ALIASES_CSV: &str = include_str!("../assets/venue_aliases.csv");

/// Error raised by the analyses in this module.
#[derive(Debug, thiserror::Error)]
pub enum ImpactError {
    /// Correlation inputs differ in length.
    #[error("input vectors differ in length: {x} vs {y}")]
    LengthMismatch {
        /// Length of the x vector.
        x: usize,
        /// Length of the y vector.
        y: usize,
    },
    /// Fewer than three points: a correlation (and its standard error) needs
    /// `n ≥ 3`.
    #[error("need at least 3 paired points for a correlation, got {0}")]
    TooFewPoints(usize),
    /// One of the inputs never varies, leaving the correlation undefined.
    #[error("correlation undefined: the {which} input is constant")]
    ConstantInput {
        /// Which vector is constant (`"x"` or `"y"`).
        which: &'static str,
    },
    /// An argument is outside its documented domain.
    #[error("invalid input: {field} {message}")]
    InvalidInput {
        /// Name of the offending argument.
        field: &'static str,
        /// Human-readable constraint violation.
        message: String,
    },
    /// Joining scores with outcomes produced an empty subset.
    #[error("empty join: {0}")]
    EmptyJoin(String),
}

fn invalid(field: &'static str, message: impl Into<String>) -> ImpactError {
    ImpactError::InvalidInput {
        field,
        message: message.into(),
    }
}

/// Citation impact: `log₁₀(1 + citations)`.
///
/// Strictly monotone in the citation count, zero at zero, and it eliminates
/// the heavy tail of raw counts, making Pearson correlation usable.
pub fn citation_impact(citations: u64) -> f64 {
    (1.0 + citations as f64).log10()
}

/// Pearson correlation with the published standard-error formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationResult {
    /// Sample Pearson correlation.
    pub rho: f64,
    /// Standard error `√((1−ρ²)/(n−2))`.
    pub se: f64,
    /// Number of paired points.
    pub n: u64,
    /// Whether `|ρ| > 2·se`.
    pub significant: bool,
}

/// Standard error of a Pearson correlation: `√((1−ρ²)/(n−2))`.
///
/// Meaningful for `|rho| ≤ 1` and `n ≥ 3` (it returns NaN outside that
/// domain, mirroring the formula).
pub fn pearson_se(rho: f64, n: u64) -> f64 {
    ((1.0 - rho * rho) / (n as f64 - 2.0)).sqrt()
}

/// Sample Pearson correlation of two equal-length vectors.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationResult, ImpactError> {
    if x.len() != y.len() {
        return Err(ImpactError::LengthMismatch { x: x.len(), y: y.len() });
    }
    if x.len() < 3 {
        return Err(ImpactError::TooFewPoints(x.len()));
    }
    for (name, v) in [("x", x), ("y", y)] {
        if v.iter().any(|e| !e.is_finite()) {
            return Err(invalid("points", format!("{name} contains a non-finite value")));
        }
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(ImpactError::ConstantInput { which: "x" });
    }
    if syy == 0.0 {
        return Err(ImpactError::ConstantInput { which: "y" });
    }
    // Clamp away the ±1e-16 overshoot float arithmetic can produce.
    let rho = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let se = pearson_se(rho, x.len() as u64);
    Ok(CorrelationResult {
        rho,
        se,
        n: x.len() as u64,
        significant: rho.abs() > 2.0 * se,
    })
}

/// Which per-paper score feeds a correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    /// Calibrated quality from the fitted model (see [`QualitySource`]).
    QualityCalibrated,
    /// Raw per-paper mean of the 1–2 impact score.
    Impact,
    /// Raw per-paper mean of the 1–5 confidence score.
    Confidence,
}

impl ScoreKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoreKind::QualityCalibrated => "quality_calibrated",
            ScoreKind::Impact => "impact",
            ScoreKind::Confidence => "confidence",
        }
    }
}

impl std::str::FromStr for ScoreKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quality_calibrated" => Ok(ScoreKind::QualityCalibrated),
            "impact" => Ok(ScoreKind::Impact),
            "confidence" => Ok(ScoreKind::Confidence),
            other => Err(format!(
                "unknown score kind `{other}` (expected quality_calibrated, impact, or confidence)"
            )),
        }
    }
}

/// Which submissions enter a correlation report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subset {
    Accepted,
    Rejected,
    All,
}

impl Subset {
    pub fn as_str(self) -> &'static str {
        match self {
            Subset::Accepted => "accepted",
            Subset::Rejected => "rejected",
            Subset::All => "all",
        }
    }

    fn admits(self, track: Track) -> bool {
        match self {
            Subset::Accepted => track == Track::Accepted,
            Subset::Rejected => track == Track::Rejected,
            Subset::All => true,
        }
    }
}

impl std::str::FromStr for Subset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "accepted" => Ok(Subset::Accepted),
            "rejected" => Ok(Subset::Rejected),
            "all" => Ok(Subset::All),
            other => Err(format!(
                "unknown subset `{other}` (expected accepted, rejected, or all)"
            )),
        }
    }
}

/// Two readings of "calibrated per-paper quality".
///
/// The study speaks of the "average calibrated quality score"; the posterior
/// mean of the paper's latent quality equals that average up to shrinkage.
/// Both are exposed; the posterior mean is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QualitySource {
    /// Posterior mean of the latent paper quality `f_i`.
    PosteriorF,
    /// Per-paper mean of bias-corrected scores (raw quality minus the
    /// reviewer's posterior bias).
    CalibratedMean,
}

impl QualitySource {
    pub fn as_str(self) -> &'static str {
        match self {
            QualitySource::PosteriorF => "posterior_f",
            QualitySource::CalibratedMean => "calibrated_mean",
        }
    }
}

impl std::str::FromStr for QualitySource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "posterior_f" => Ok(QualitySource::PosteriorF),
            "calibrated_mean" => Ok(QualitySource::CalibratedMean),
            other => Err(format!(
                "unknown quality source `{other}` (expected posterior_f or calibrated_mean)"
            )),
        }
    }
}

/// Per-paper score of the requested kind, keyed by paper id (deterministic
/// order).  Papers without the data the kind requires are simply absent.
fn per_paper_scores<'a>(
    dataset: &'a Dataset,
    fit: &'a CalibrationFit,
    kind: ScoreKind,
    quality_source: QualitySource,
) -> BTreeMap<&'a PaperId, f64> {
    match (kind, quality_source) {
        (ScoreKind::QualityCalibrated, QualitySource::PosteriorF) => fit.paper_quality(),
        (ScoreKind::QualityCalibrated, QualitySource::CalibratedMean) => {
            let bias: BTreeMap<_, _> = fit
                .per_reviewer
                .iter()
                .map(|r| (&r.reviewer_id, r.bias_mean))
                .collect();
            let mut sums: BTreeMap<&PaperId, (f64, u64)> = BTreeMap::new();
            for review in &dataset.reviews {
                if let Some(b) = bias.get(&review.reviewer_id) {
                    let entry = sums.entry(&review.paper_id).or_insert((0.0, 0));
                    entry.0 += f64::from(review.quality) - b;
                    entry.1 += 1;
                }
            }
            sums.into_iter().map(|(p, (s, c))| (p, s / c as f64)).collect()
        }
        (ScoreKind::Impact, _) | (ScoreKind::Confidence, _) => {
            let mut sums: BTreeMap<&PaperId, (f64, u64)> = BTreeMap::new();
            for review in &dataset.reviews {
                let v = match kind {
                    ScoreKind::Impact => f64::from(review.impact),
                    _ => f64::from(review.confidence),
                };
                let entry = sums.entry(&review.paper_id).or_insert((0.0, 0));
                entry.0 += v;
                entry.1 += 1;
            }
            sums.into_iter().map(|(p, (s, c))| (p, s / c as f64)).collect()
        }
    }
}

/// Correlates per-paper review scores with citation impact over a subset of
/// submissions.
///
/// Outcomes with fate `untraced` are excluded (their citation counts are
/// unknown, no matter what the table says), and papers lacking the requested
/// score are skipped.  The join iterates outcomes in canonical paper order,
/// so the result is deterministic and independent of input row order.
pub fn correlation_report(
    dataset: &Dataset,
    fit: &CalibrationFit,
    kind: ScoreKind,
    subset: Subset,
    quality_source: QualitySource,
) -> Result<CorrelationResult, ImpactError> {
    let scores = per_paper_scores(dataset, fit, kind, quality_source);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for outcome in &dataset.outcomes {
        if outcome.fate == Fate::Untraced || !subset.admits(outcome.track) {
            continue;
        }
        if let Some(&score) = scores.get(&outcome.paper_id) {
            x.push(score);
            y.push(citation_impact(outcome.citations));
        }
    }
    if x.is_empty() {
        return Err(ImpactError::EmptyJoin(format!(
            "no {} papers with traced outcomes and {} scores",
            subset.as_str(),
            kind.as_str()
        )));
    }
    pearson(&x, &y)
}

/// Correlates the two committees' per-paper mean scores over the duplicated
/// submissions.
///
/// Pairs where either side lacks the requested score are skipped; at least
/// three complete pairs are required.
pub fn committee_score_correlation(
    dataset: &Dataset,
    fit: &CalibrationFit,
    kind: ScoreKind,
    quality_source: QualitySource,
) -> Result<CorrelationResult, ImpactError> {
    let scores = per_paper_scores(dataset, fit, kind, quality_source);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for pair in &dataset.duplicates {
        if let (Some(&s1), Some(&s2)) = (
            scores.get(&pair.committee1_paper),
            scores.get(&pair.committee2_paper),
        ) {
            x.push(s1);
            y.push(s2);
        }
    }
    if x.is_empty() {
        return Err(ImpactError::EmptyJoin(format!(
            "no duplicate pairs with {} scores on both sides",
            kind.as_str()
        )));
    }
    pearson(&x, &y)
}

/// One scatter point after Laplace noising.  It carries only the noised
/// coordinates — raw values never leave [`dp_scatter`], and no correlation
/// function in this crate accepts `NoisedPoint`s, so noised data cannot leak
/// into a reported statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoisedPoint {
    pub x_noised: f64,
    pub y_noised: f64,
}

/// Draws one Laplace(0, scale) variate by inverse CDF from `u ∈ (−½, ½)`.
fn laplace(rng: &mut impl Rng, scale: f64) -> f64 {
    let u = loop {
        // Guard the measure-zero draw that would map to −∞.
        let r: f64 = rng.random();
        if r > 0.0 {
            break r - 0.5;
        }
    };
    -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

/// Adds independent Laplace noise to each coordinate of each point, for
/// plots that must not expose raw per-paper data.
///
/// Output order matches input order, so callers can zip the noised points
/// back onto their metadata.  A scale of zero passes that axis through
/// unchanged (bit for bit); scales must be finite and non-negative.
pub fn dp_scatter(
    points: &[(f64, f64)],
    scale_x: f64,
    scale_y: f64,
    seed: u64,
) -> Result<Vec<NoisedPoint>, ImpactError> {
    for (name, s) in [("scale_x", scale_x), ("scale_y", scale_y)] {
        if !s.is_finite() || s < 0.0 {
            return Err(invalid(name, format!("must be finite and ≥ 0, got {s}")));
        }
    }
    let mut rng = stream_rng(seed, 0);
    Ok(points
        .iter()
        .map(|&(x, y)| NoisedPoint {
            x_noised: x + laplace(&mut rng, scale_x),
            y_noised: y + laplace(&mut rng, scale_y),
        })
        .collect())
}

/// Per-fate outcome counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FateCounts {
    /// Accepted and published in this conference's proceedings.
    pub this_conference: u64,
    /// Later published at another tracked venue.
    pub other_venue: u64,
    /// Only a preprint-server version was found.
    pub preprint_only: u64,
    /// Only an informal PDF was found.
    pub pdf_only: u64,
    /// No later version could be traced.
    pub untraced: u64,
}

impl FateCounts {
    /// Papers traced somewhere outside this conference's proceedings.
    pub fn traced_total(&self) -> u64 {
        self.other_venue + self.preprint_only + self.pdf_only
    }

    /// All tabulated outcomes.
    pub fn total(&self) -> u64 {
        self.this_conference + self.traced_total() + self.untraced
    }
}

/// One individually-listed venue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VenueRow {
    /// Canonical display name (alias table, else the lexicographically
    /// smallest spelling seen).
    pub venue: String,
    /// Papers later published there.
    pub count: u64,
}

/// One flow edge of the Sankey diagram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SankeyLink {
    pub source: String,
    pub target: String,
    pub count: u64,
}

/// Venue tabulation and Sankey flows of post-conference outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FateTable {
    /// Totals per fate.
    pub counts: FateCounts,
    /// Venues with at least `venue_threshold` papers, by descending count
    /// then name.
    pub venues: Vec<VenueRow>,
    /// Papers at venues below the threshold, pooled.
    pub other_venue_bucket: u64,
    /// The threshold used.
    pub venue_threshold: u64,
    /// Flow edges: submitted → track, track → fate, other_venue → venue.
    /// Zero-count links are omitted.
    pub sankey: Vec<SankeyLink>,
}

/// Normalizes a venue spelling to its grouping key: alphabetic/numeric token
/// runs, lowercased, with four-digit year tokens (19xx/20xx) dropped.
fn venue_key(raw: &str) -> String {
    fn flush(current: &mut String, tokens: &mut Vec<String>) {
        if !current.is_empty() {
            tokens.push(std::mem::take(current));
        }
    }
    let mut tokens: Vec<String> = Vec::new();
    let mut current = String::new();
    let mut current_is_digit = false;
    for c in raw.chars() {
        if c.is_alphanumeric() {
            let is_digit = c.is_ascii_digit();
            if !current.is_empty() && is_digit != current_is_digit {
                flush(&mut current, &mut tokens);
            }
            current_is_digit = is_digit;
            current.extend(c.to_lowercase());
        } else {
            flush(&mut current, &mut tokens);
        }
    }
    flush(&mut current, &mut tokens);
    tokens.retain(|t| {
        !(t.len() == 4
            && (t.starts_with("19") || t.starts_with("20"))
            && t.chars().all(|c| c.is_ascii_digit()))
    });
    tokens.join(" ")
}

/// Parses the embedded alias table: normalized key → display name.
fn venue_aliases() -> BTreeMap<String, String> {
    let mut reader = csv::Reader::from_reader(VENUE_ALIASES_CSV.as_bytes());
    reader
        .records()
        .map(|record| {
            let record = record.expect("embedded alias table is well-formed");
            (record[0].to_string(), record[1].to_string())
        })
        .collect()
}

/// Tabulates outcomes by fate and venue with the default threshold of
/// [`DEFAULT_VENUE_THRESHOLD`] papers per listed venue.
pub fn fate_table(outcomes: &[PaperOutcome]) -> FateTable {
    fate_table_with_threshold(outcomes, DEFAULT_VENUE_THRESHOLD)
}

/// Tabulates outcomes by fate and venue.
///
/// Venue spellings are grouped case-insensitively with year tokens stripped,
/// then mapped through the embedded alias table (so "NIPS 2015" and
/// "NeurIPS" aggregate under one row).  Venues with at least `threshold`
/// papers are listed individually; the remainder pools into
/// `other_venue_bucket`, so listed rows plus the bucket always sum to the
/// `other_venue` fate count.
pub fn fate_table_with_threshold(outcomes: &[PaperOutcome], threshold: u64) -> FateTable {
    let aliases = venue_aliases();
    let mut counts = FateCounts {
        this_conference: 0,
        other_venue: 0,
        preprint_only: 0,
        pdf_only: 0,
        untraced: 0,
    };
    let mut track_totals: BTreeMap<Track, u64> = BTreeMap::new();
    let mut track_fate: BTreeMap<(Track, Fate), u64> = BTreeMap::new();
    // key → (count, smallest original spelling)
    let mut by_key: BTreeMap<String, (u64, String)> = BTreeMap::new();
    for outcome in outcomes {
        match outcome.fate {
            Fate::ThisConference => counts.this_conference += 1,
            Fate::OtherVenue => counts.other_venue += 1,
            Fate::PreprintOnly => counts.preprint_only += 1,
            Fate::PdfOnly => counts.pdf_only += 1,
            Fate::Untraced => counts.untraced += 1,
        }
        *track_totals.entry(outcome.track).or_insert(0) += 1;
        *track_fate.entry((outcome.track, outcome.fate)).or_insert(0) += 1;
        if outcome.fate == Fate::OtherVenue {
            let raw = outcome.venue.as_deref().unwrap_or("(unspecified)");
            let key = venue_key(raw);
            by_key
                .entry(key)
                .and_modify(|(c, spelling)| {
                    *c += 1;
                    if raw < spelling.as_str() {
                        *spelling = raw.to_string();
                    }
                })
                .or_insert((1, raw.to_string()));
        }
    }
    // Aggregate by display name: distinct keys can share an alias target.
    let mut by_display: BTreeMap<String, u64> = BTreeMap::new();
    for (key, (count, spelling)) in by_key {
        let display = aliases.get(&key).cloned().unwrap_or(spelling);
        *by_display.entry(display).or_insert(0) += count;
    }
    let mut venues: Vec<VenueRow> = Vec::new();
    let mut other_venue_bucket = 0;
    for (venue, count) in by_display {
        if count >= threshold {
            venues.push(VenueRow { venue, count });
        } else {
            other_venue_bucket += count;
        }
    }
    venues.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.venue.cmp(&b.venue)));

    let mut sankey = Vec::new();
    for (track, total) in &track_totals {
        sankey.push(SankeyLink {
            source: "submitted".to_string(),
            target: track.as_str().to_string(),
            count: *total,
        });
    }
    for ((track, fate), count) in &track_fate {
        sankey.push(SankeyLink {
            source: track.as_str().to_string(),
            target: fate.as_str().to_string(),
            count: *count,
        });
    }
    for row in &venues {
        sankey.push(SankeyLink {
            source: Fate::OtherVenue.as_str().to_string(),
            target: row.venue.clone(),
            count: row.count,
        });
    }
    if other_venue_bucket > 0 {
        sankey.push(SankeyLink {
            source: Fate::OtherVenue.as_str().to_string(),
            target: "other".to_string(),
            count: other_venue_bucket,
        });
    }
    FateTable {
        counts,
        venues,
        other_venue_bucket,
        venue_threshold: threshold,
        sankey,
    }
}

/// Renders noised scatter points as a self-contained SVG.
///
/// Axis lines are drawn but tick labels are deliberately omitted — the plot
/// shape is publishable while absolute coordinates stay obfuscated.  The
/// output is deterministic: coordinates are formatted to three decimals.
pub fn scatter_svg(points: &[NoisedPoint], title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const MARGIN: f64 = 40.0;
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        min_x = min_x.min(p.x_noised);
        max_x = max_x.max(p.x_noised);
        min_y = min_y.min(p.y_noised);
        max_y = max_y.max(p.y_noised);
    }
    if points.is_empty() {
        min_x = 0.0;
        max_x = 1.0;
        min_y = 0.0;
        max_y = 1.0;
    }
    let pad_x = (max_x - min_x).max(1e-9) * 0.05;
    let pad_y = (max_y - min_y).max(1e-9) * 0.05;
    min_x -= pad_x;
    max_x += pad_x;
    min_y -= pad_y;
    max_y += pad_y;
    let sx = (W - 2.0 * MARGIN) / (max_x - min_x);
    let sy = (H - 2.0 * MARGIN) / (max_y - min_y);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.3}\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"14\">{}</text>\n",
        W / 2.0,
        title
    ));
    svg.push_str(&format!(
        "  <line x1=\"{m:.3}\" y1=\"{b:.3}\" x2=\"{r:.3}\" y2=\"{b:.3}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN
    ));
    svg.push_str(&format!(
        "  <line x1=\"{m:.3}\" y1=\"{t:.3}\" x2=\"{m:.3}\" y2=\"{b:.3}\" stroke=\"black\"/>\n",
        m = MARGIN,
        t = MARGIN,
        b = H - MARGIN
    ));
    for p in points {
        let cx = MARGIN + (p.x_noised - min_x) * sx;
        let cy = H - MARGIN - (p.y_noised - min_y) * sy;
        svg.push_str(&format!(
            "  <circle cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"2\" fill=\"steelblue\" \
             fill-opacity=\"0.6\"/>\n"
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DecisionRecord, DuplicatePair, ReviewRecord, ReviewerId};
    use crate::rng::stream_rng;
    use chrono::{TimeZone, Utc};

    #[test]
    fn citation_impact_hits_the_round_numbers() {
        assert_eq!(citation_impact(0), 0.0);
        assert!((citation_impact(9) - 1.0).abs() < 1e-12);
        assert!((citation_impact(999) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn citation_impact_preserves_ranking() {
        let mut prev = -1.0;
        for c in 0..2000u64 {
            let v = citation_impact(c);
            assert!(v > prev, "not strictly monotone at {c}");
            prev = v;
        }
    }

    #[test]
    fn pearson_matches_hand_computed_fixture() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [2.0, 1.0, 4.0, 3.0, 5.0];
        let r = pearson(&x, &y).unwrap();
        assert!((r.rho - 0.8).abs() < 1e-12);
        assert!((r.se - 0.346410161514).abs() < 1e-6);
        assert_eq!(r.n, 5);
        assert!(r.significant); // 0.8 exceeds 2·se = 0.693.
    }

    #[test]
    fn identical_vectors_correlate_perfectly() {
        let x = [3.0, 1.0, 4.0, 1.0, 5.0];
        let r = pearson(&x, &x).unwrap();
        assert_eq!(r.rho, 1.0);
        assert_eq!(r.se, 0.0);
        assert!(r.significant);
    }

    #[test]
    fn published_standard_error_arithmetic() {
        assert!((pearson_se(0.55, 166) - 0.0652).abs() < 1e-3);
    }

    #[test]
    fn pearson_rejects_degenerate_inputs() {
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(ImpactError::LengthMismatch { .. })
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0]),
            Err(ImpactError::TooFewPoints(2))
        ));
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(ImpactError::ConstantInput { which: "x" })
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]),
            Err(ImpactError::ConstantInput { which: "y" })
        ));
        assert!(pearson(&[1.0, f64::NAN, 3.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn pearson_is_affine_invariant() {
        let mut rng = stream_rng(31, 0);
        for trial in 0..100 {
            let n = rng.random_range(3..30);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let y: Vec<f64> = x
                .iter()
                .map(|&v| 0.5 * v + rng.random_range(-2.0..2.0))
                .collect();
            let base = match pearson(&x, &y) {
                Ok(r) => r,
                // A degenerate random draw (constant vector) is not what this
                // property is about.
                Err(_) => continue,
            };
            let a = rng.random_range(0.1..4.0);
            let b = rng.random_range(-10.0..10.0);
            let scaled: Vec<f64> = x.iter().map(|&v| a * v + b).collect();
            let same = pearson(&scaled, &y).unwrap();
            assert!((same.rho - base.rho).abs() < 1e-9, "trial {trial}");
            let flipped: Vec<f64> = x.iter().map(|&v| -a * v + b).collect();
            let neg = pearson(&flipped, &y).unwrap();
            assert!((neg.rho + base.rho).abs() < 1e-9, "trial {trial}");
        }
    }

    fn ts(day: u32) -> chrono::DateTime<Utc> {
        Utc.with_ymd_and_hms(2014, 7, day, 12, 0, 0).unwrap()
    }

    fn review(paper: &str, reviewer: &str, quality: u8, impact: u8, confidence: u8) -> ReviewRecord {
        ReviewRecord {
            paper_id: PaperId::from(paper),
            reviewer_id: ReviewerId::from(reviewer),
            quality,
            impact,
            confidence,
            submitted_at: ts(10),
            summary_words: 40,
            body_words: 300,
        }
    }

    fn outcome(paper: &str, track: Track, fate: Fate, venue: Option<&str>, citations: u64) -> PaperOutcome {
        PaperOutcome {
            paper_id: PaperId::from(paper),
            track,
            fate,
            venue: venue.map(str::to_string),
            citations,
        }
    }

    /// A small dataset where confidence means rise with citation impact.
    fn confidence_dataset() -> Dataset {
        let mut reviews = Vec::new();
        let mut outcomes = Vec::new();
        for i in 0..12u64 {
            let paper = format!("P{i}");
            let confidence = 1 + (i % 5) as u8;
            reviews.push(review(&paper, &format!("R{}", i % 7), 5, 1, confidence));
            reviews.push(review(&paper, &format!("S{}", i % 6), 6, 2, confidence));
            // log10(1 + citations) ≈ confidence, with a small per-paper tiebreak.
            let citations = 10u64.pow(u32::from(confidence)) + i;
            let track = if i % 2 == 0 { Track::Accepted } else { Track::Rejected };
            let fate = if track == Track::Accepted { Fate::ThisConference } else { Fate::OtherVenue };
            let venue = (fate == Fate::OtherVenue).then_some("AISTATS");
            outcomes.push(outcome(&paper, track, fate, venue, citations));
        }
        // An untraced paper whose absurd citation figure must be ignored.
        outcomes.push(outcome("P90", Track::Rejected, Fate::Untraced, None, 9_999_999));
        reviews.push(review("P90", "R0", 2, 1, 1));
        Dataset::new(reviews, Vec::new(), Vec::new(), outcomes)
    }

    fn empty_fit() -> CalibrationFit {
        use crate::calibration::{CalibrationParams, GridDiagnostics, GridNode};
        let node = GridNode { ratio_b: 0.1, ratio_s: 1.0, nll: 0.0 };
        CalibrationFit {
            params: CalibrationParams::new(5.0, 1.0, 0.1, 1.0).unwrap(),
            nll: 0.0,
            per_paper: Vec::new(),
            per_reviewer: Vec::new(),
            per_review: Vec::new(),
            grid: GridDiagnostics {
                coarse_best: node,
                refined_best: node,
                nodes_evaluated: 1,
                nodes_failed: 0,
            },
        }
    }

    #[test]
    fn correlation_report_joins_scores_with_impact() {
        let dataset = confidence_dataset();
        let fit = empty_fit();
        let all = correlation_report(&dataset, &fit, ScoreKind::Confidence, Subset::All, QualitySource::PosteriorF).unwrap();
        // Confidence drives citations in this construction.
        assert!(all.rho > 0.5, "rho = {}", all.rho);
        assert_eq!(all.n, 12); // the untraced paper is excluded
        // Manual replication of the join for the rejected subset.
        let mut x = Vec::new();
        let mut y = Vec::new();
        for o in &dataset.outcomes {
            if o.track == Track::Rejected && o.fate != Fate::Untraced {
                let rs: Vec<f64> = dataset
                    .reviews
                    .iter()
                    .filter(|r| r.paper_id == o.paper_id)
                    .map(|r| f64::from(r.confidence))
                    .collect();
                x.push(rs.iter().sum::<f64>() / rs.len() as f64);
                y.push(citation_impact(o.citations));
            }
        }
        let expect = pearson(&x, &y).unwrap();
        let rejected = correlation_report(&dataset, &fit, ScoreKind::Confidence, Subset::Rejected, QualitySource::PosteriorF).unwrap();
        assert_eq!(rejected, expect);
        assert_eq!(rejected.n, 6);
    }

    #[test]
    fn correlation_report_errors_on_empty_joins() {
        let dataset = confidence_dataset();
        let fit = empty_fit(); // no calibrated papers at all
        assert!(matches!(
            correlation_report(&dataset, &fit, ScoreKind::QualityCalibrated, Subset::All, QualitySource::PosteriorF),
            Err(ImpactError::EmptyJoin(_))
        ));
    }

    #[test]
    fn committee_correlation_sees_identical_committees_as_perfect() {
        let mut reviews = Vec::new();
        let mut duplicates = Vec::new();
        for i in 0..6u64 {
            let (a, b) = (format!("A{i}"), format!("B{i}"));
            let q = 3 + (i % 5) as u8;
            reviews.push(review(&a, "R1", q, 1, 3));
            reviews.push(review(&b, "R2", q, 1, 3));
            duplicates.push(DuplicatePair {
                committee1_paper: PaperId::from(a.as_str()),
                committee2_paper: PaperId::from(b.as_str()),
                experiment_id: format!("e{i}"),
            });
        }
        let dataset = Dataset::new(reviews, duplicates, Vec::<DecisionRecord>::new(), Vec::new());
        let r = committee_score_correlation(&dataset, &empty_fit(), ScoreKind::QualityCalibrated, QualitySource::CalibratedMean);
        // CalibratedMean with an empty fit has no bias entries → empty join.
        assert!(matches!(r, Err(ImpactError::EmptyJoin(_))));
        let r = committee_score_correlation(&dataset, &empty_fit(), ScoreKind::Impact, QualitySource::PosteriorF);
        // Impact is constant 1 in this fixture → constant-input error.
        assert!(matches!(r, Err(ImpactError::ConstantInput { .. })));
        let r = committee_score_correlation(&dataset, &empty_fit(), ScoreKind::Confidence, QualitySource::PosteriorF);
        assert!(matches!(r, Err(ImpactError::ConstantInput { .. })));
        // Quality varies and the committees agree exactly.
        let mut ds2 = dataset;
        ds2.reviews.iter_mut().for_each(|r| r.confidence = r.quality.min(5));
        let r = committee_score_correlation(&ds2, &empty_fit(), ScoreKind::Confidence, QualitySource::PosteriorF).unwrap();
        assert_eq!(r.rho, 1.0);
        assert_eq!(r.n, 6);
    }

    #[test]
    fn zero_scale_noise_is_the_identity() {
        let points = vec![(1.25, 0.5), (-3.0, 2.75), (0.0, 0.0)];
        let noised = dp_scatter(&points, 0.0, 0.0, 7).unwrap();
        for ((x, y), p) in points.iter().zip(&noised) {
            assert_eq!(*x, p.x_noised);
            assert_eq!(*y, p.y_noised);
        }
    }

    #[test]
    fn laplace_noise_has_the_right_moments() {
        let points = vec![(0.0, 0.0); 20_000];
        let (sx, sy) = (0.25, 0.05);
        let noised = dp_scatter(&points, sx, sy, 3).unwrap();
        let n = noised.len() as f64;
        let mean_x = noised.iter().map(|p| p.x_noised).sum::<f64>() / n;
        let var_x = noised.iter().map(|p| (p.x_noised - mean_x).powi(2)).sum::<f64>() / (n - 1.0);
        let mean_y = noised.iter().map(|p| p.y_noised).sum::<f64>() / n;
        let var_y = noised.iter().map(|p| (p.y_noised - mean_y).powi(2)).sum::<f64>() / (n - 1.0);
        // Laplace(0, b) has mean 0 and variance 2b².
        assert!(mean_x.abs() < 0.01, "mean_x = {mean_x}");
        assert!(mean_y.abs() < 0.002, "mean_y = {mean_y}");
        assert!((var_x / (2.0 * sx * sx) - 1.0).abs() < 0.1, "var_x = {var_x}");
        assert!((var_y / (2.0 * sy * sy) - 1.0).abs() < 0.1, "var_y = {var_y}");
    }

    #[test]
    fn noising_is_deterministic_in_the_seed() {
        let points = vec![(1.0, 2.0), (3.0, 4.0)];
        let a = dp_scatter(&points, 0.25, 0.05, 9).unwrap();
        let b = dp_scatter(&points, 0.25, 0.05, 9).unwrap();
        assert_eq!(a, b);
        let c = dp_scatter(&points, 0.25, 0.05, 10).unwrap();
        assert_ne!(a[0].x_noised, c[0].x_noised);
        assert!(dp_scatter(&points, -0.1, 0.05, 9).is_err());
        assert!(dp_scatter(&points, f64::NAN, 0.05, 9).is_err());
    }

    #[test]
    fn venue_keys_normalize_spellings_together() {
        assert_eq!(venue_key("NIPS 2015"), "nips");
        assert_eq!(venue_key("nips"), "nips");
        assert_eq!(venue_key("ICML2016"), "icml");
        assert_eq!(venue_key("AAAI-2015"), "aaai");
        assert_eq!(venue_key("ECML-PKDD 2015"), "ecml pkdd");
        // Two-digit or mid-word digits are preserved (no year heuristic).
        assert_eq!(venue_key("ICML'15"), "icml 15");
        assert_eq!(venue_key("  Journal of Machine Learning Research "), "journal of machine learning research");
    }

    #[test]
    fn fate_table_groups_aliases_and_buckets_small_venues() {
        let mut outcomes = Vec::new();
        let mut i = 0;
        let mut push = |fate: Fate, venue: Option<&str>, n: u64| {
            for _ in 0..n {
                outcomes.push(outcome(
                    &format!("P{i}"),
                    if fate == Fate::ThisConference { Track::Accepted } else { Track::Rejected },
                    fate,
                    venue,
                    5,
                ));
                i += 1;
            }
        };
        push(Fate::ThisConference, None, 4);
        push(Fate::OtherVenue, Some("NIPS 2015"), 6);
        push(Fate::OtherVenue, Some("NeurIPS"), 5); // merges with NIPS 2015
        push(Fate::OtherVenue, Some("AAAI 2015"), 12);
        push(Fate::OtherVenue, Some("Tiny Workshop"), 3);
        push(Fate::PreprintOnly, None, 7);
        push(Fate::PdfOnly, None, 2);
        push(Fate::Untraced, None, 9);
        let table = fate_table_with_threshold(&outcomes, 10);
        assert_eq!(table.counts.this_conference, 4);
        assert_eq!(table.counts.other_venue, 26);
        assert_eq!(table.counts.preprint_only, 7);
        assert_eq!(table.counts.pdf_only, 2);
        assert_eq!(table.counts.untraced, 9);
        assert_eq!(table.counts.traced_total(), 35);
        assert_eq!(table.counts.total(), 48);
        assert_eq!(
            table.venues,
            vec![
                VenueRow { venue: "AAAI".into(), count: 12 },
                VenueRow { venue: "NeurIPS".into(), count: 11 },
            ]
        );
        assert_eq!(table.other_venue_bucket, 3);
        // Listed venues plus the bucket conserve the other_venue total.
        let listed: u64 = table.venues.iter().map(|v| v.count).sum();
        assert_eq!(listed + table.other_venue_bucket, table.counts.other_venue);
        // Sankey: every link positive, stage sums conserve.
        assert!(table.sankey.iter().all(|l| l.count > 0));
        let from_submitted: u64 = table
            .sankey
            .iter()
            .filter(|l| l.source == "submitted")
            .map(|l| l.count)
            .sum();
        assert_eq!(from_submitted, 48);
        let venue_stage: u64 = table
            .sankey
            .iter()
            .filter(|l| l.source == "other_venue")
            .map(|l| l.count)
            .sum();
        assert_eq!(venue_stage, 26);
    }

    #[test]
    fn empty_outcomes_make_an_empty_table() {
        let table = fate_table(&[]);
        assert_eq!(table.counts.total(), 0);
        assert!(table.venues.is_empty());
        assert!(table.sankey.is_empty());
        assert_eq!(table.other_venue_bucket, 0);
    }

    #[test]
    fn scatter_svg_is_deterministic_and_unlabeled() {
        let points = dp_scatter(&[(1.0, 2.0), (3.0, 1.0), (2.0, 2.5)], 0.25, 0.05, 1).unwrap();
        let a = scatter_svg(&points, "calibrated quality vs citation impact");
        let b = scatter_svg(&points, "calibrated quality vs citation impact");
        assert_eq!(a, b);
        assert_eq!(a.matches("<circle").count(), 3);
        // One title, no axis tick labels.
        assert_eq!(a.matches("<text").count(), 1);
        assert!(scatter_svg(&[], "empty").contains("<svg"));
    }
}
