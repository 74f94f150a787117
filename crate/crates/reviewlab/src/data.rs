//! Review-corpus records and CSV input/output.
//!
//! The corpus of a two-committee review experiment is held in four tables:
//!
//! * **reviews** — one row per (paper, reviewer) review with Likert scores
//!   and a submission timestamp,
//! * **duplicates** — the pairs of paper ids that are the same submission
//!   seen independently by committee 1 and committee 2,
//! * **decisions** — accept/reject/withdrawn verdicts per (paper, committee),
//! * **outcomes** — post-conference fate and citation count per paper.
//!
//! Loaders are all-or-nothing: a file either parses completely or the load
//! fails with every offending row listed by line number. Loaded tables are
//! sorted into a canonical order, so datasets compare equal regardless of
//! input row order, and [`save_reviews`] and friends reproduce a canonical
//! file byte-for-byte.

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque paper identifier (free-form string, compared byte-wise).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PaperId(pub String);

/// Opaque reviewer identifier (free-form string, compared byte-wise).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReviewerId(pub String);

impl fmt::Display for PaperId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for ReviewerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PaperId {
    fn from(s: &str) -> Self {
        PaperId(s.to_owned())
    }
}

impl From<&str> for ReviewerId {
    fn from(s: &str) -> Self {
        ReviewerId(s.to_owned())
    }
}

/// Which committee issued a decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Committee {
    /// Committee 1 of the duplication experiment (serialized as `1`).
    #[serde(rename = "1")]
    One,
    /// Committee 2 of the duplication experiment (serialized as `2`).
    #[serde(rename = "2")]
    Two,
    /// The main committee handling non-duplicated submissions.
    #[serde(rename = "main")]
    Main,
}

impl Committee {
    pub fn as_str(self) -> &'static str {
        match self {
            Committee::One => "1",
            Committee::Two => "2",
            Committee::Main => "main",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "1" => Some(Committee::One),
            "2" => Some(Committee::Two),
            "main" => Some(Committee::Main),
            _ => None,
        }
    }
}

impl fmt::Display for Committee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A committee's verdict on a paper.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject,
    Withdrawn,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
            Verdict::Withdrawn => "withdrawn",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "accept" => Some(Verdict::Accept),
            "reject" => Some(Verdict::Reject),
            "withdrawn" => Some(Verdict::Withdrawn),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Final program track of a submission.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Track {
    Accepted,
    Rejected,
}

impl Track {
    pub fn as_str(self) -> &'static str {
        match self {
            Track::Accepted => "accepted",
            Track::Rejected => "rejected",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "accepted" => Some(Track::Accepted),
            "rejected" => Some(Track::Rejected),
            _ => None,
        }
    }
}

impl fmt::Display for Track {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a submission ended up after the conference cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fate {
    /// Published in this conference's proceedings (accepted papers).
    ThisConference,
    /// Published later at another tracked venue.
    OtherVenue,
    /// Only a preprint-server version was found.
    PreprintOnly,
    /// Only an informal PDF (homepage copy, tech report) was found.
    PdfOnly,
    /// No later version could be traced.
    Untraced,
}

impl Fate {
    pub fn as_str(self) -> &'static str {
        match self {
            Fate::ThisConference => "this_conference",
            Fate::OtherVenue => "other_venue",
            Fate::PreprintOnly => "preprint_only",
            Fate::PdfOnly => "pdf_only",
            Fate::Untraced => "untraced",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "this_conference" => Some(Fate::ThisConference),
            "other_venue" => Some(Fate::OtherVenue),
            "preprint_only" => Some(Fate::PreprintOnly),
            "pdf_only" => Some(Fate::PdfOnly),
            "untraced" => Some(Fate::Untraced),
            _ => None,
        }
    }
}

impl fmt::Display for Fate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One submitted review.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewRecord {
    pub paper_id: PaperId,
    pub reviewer_id: ReviewerId,
    /// Overall quality score on a 1–10 Likert scale.
    pub quality: u8,
    /// Impact score: 1 (incremental) or 2 (breakthrough).
    pub impact: u8,
    /// Reviewer self-reported confidence on a 1–5 scale.
    pub confidence: u8,
    /// When the review was submitted (stored in UTC).
    pub submitted_at: DateTime<Utc>,
    /// Word count of the summary field.
    pub summary_words: u32,
    /// Word count of the main review body.
    pub body_words: u32,
}

impl ReviewRecord {
    /// Total review length in words (summary plus body).
    pub fn total_words(&self) -> u32 {
        self.summary_words + self.body_words
    }
}

/// A submission that was reviewed independently by both committees, under
/// two different paper ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuplicatePair {
    pub committee1_paper: PaperId,
    pub committee2_paper: PaperId,
    pub experiment_id: String,
}

/// One committee's verdict on one paper.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub paper_id: PaperId,
    pub committee: Committee,
    pub verdict: Verdict,
}

/// Post-conference outcome of a submission.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperOutcome {
    pub paper_id: PaperId,
    pub track: Track,
    pub fate: Fate,
    /// Venue of later publication, when one was traced. Empty CSV field maps
    /// to `None`.
    pub venue: Option<String>,
    /// Citation count of the traced later version (0 when untraced).
    pub citations: u64,
}

/// The four tables of a review experiment, in canonical sorted order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub reviews: Vec<ReviewRecord>,
    pub duplicates: Vec<DuplicatePair>,
    pub decisions: Vec<DecisionRecord>,
    pub outcomes: Vec<PaperOutcome>,
}

impl Dataset {
    /// Assembles a dataset and sorts every table into canonical order, so
    /// two datasets built from row permutations of the same records compare
    /// equal.
    pub fn new(
        reviews: Vec<ReviewRecord>,
        duplicates: Vec<DuplicatePair>,
        decisions: Vec<DecisionRecord>,
        outcomes: Vec<PaperOutcome>,
    ) -> Self {
        let mut ds = Dataset { reviews, duplicates, decisions, outcomes };
        ds.sort();
        ds
    }

    fn sort(&mut self) {
        sort_reviews(&mut self.reviews);
        sort_duplicates(&mut self.duplicates);
        sort_decisions(&mut self.decisions);
        sort_outcomes(&mut self.outcomes);
    }

    /// Looks up the verdict a committee issued for a paper.
    pub fn decision(&self, paper: &PaperId, committee: Committee) -> Option<&DecisionRecord> {
        self.decisions
            .iter()
            .find(|d| d.paper_id == *paper && d.committee == committee)
    }

    /// Groups reviews by paper, in canonical order.
    pub fn reviews_by_paper(&self) -> BTreeMap<&PaperId, Vec<&ReviewRecord>> {
        let mut map: BTreeMap<&PaperId, Vec<&ReviewRecord>> = BTreeMap::new();
        for r in &self.reviews {
            map.entry(&r.paper_id).or_default().push(r);
        }
        map
    }
}

fn sort_reviews(rows: &mut [ReviewRecord]) {
    rows.sort_by(|a, b| {
        (&a.paper_id, &a.reviewer_id).cmp(&(&b.paper_id, &b.reviewer_id))
    });
}

fn sort_duplicates(rows: &mut [DuplicatePair]) {
    rows.sort_by(|a, b| a.committee1_paper.cmp(&b.committee1_paper));
}

fn sort_decisions(rows: &mut [DecisionRecord]) {
    rows.sort_by(|a, b| (&a.paper_id, a.committee).cmp(&(&b.paper_id, b.committee)));
}

fn sort_outcomes(rows: &mut [PaperOutcome]) {
    rows.sort_by(|a, b| a.paper_id.cmp(&b.paper_id));
}

/// Expected header of `reviews.csv`.
pub const REVIEWS_HEADER: &[&str] = &[
    "paper_id",
    "reviewer_id",
    "quality",
    "impact",
    "confidence",
    "submitted_at",
    "summary_words",
    "body_words",
];

/// Expected header of `duplicates.csv`.
pub const DUPLICATES_HEADER: &[&str] = &["committee1_paper", "committee2_paper", "experiment_id"];

/// Expected header of `decisions.csv`.
pub const DECISIONS_HEADER: &[&str] = &["paper_id", "committee", "verdict"];

/// Expected header of `outcomes.csv`.
pub const OUTCOMES_HEADER: &[&str] = &["paper_id", "track", "fate", "venue", "citations"];

/// One rejected row of a table load, with its 1-based line number in the
/// source file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Why a table failed to load. Loads are all-or-nothing: `Rows` carries every
/// offending row of the file, not just the first.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: bad header: expected `{expected}`, found `{found}`")]
    Header {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("{path}: {} invalid row(s):\n{}", errors.len(),
            errors.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    Rows { path: PathBuf, errors: Vec<RowError> },
}

impl LoadError {
    /// True when the failure was an I/O problem (missing or unreadable file)
    /// rather than malformed content.
    pub fn is_io(&self) -> bool {
        matches!(self, LoadError::Io { .. })
    }
}

/// Collects per-row failures during a table load.
struct RowErrors(Vec<RowError>);

impl RowErrors {
    fn push(&mut self, line: u64, message: impl Into<String>) {
        self.0.push(RowError { line, message: message.into() });
    }
}

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>, LoadError> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => LoadError::Io { path: path.to_owned(), source },
            other => LoadError::Io {
                path: path.to_owned(),
                source: io::Error::other(format!("{other:?}")),
            },
        })
}

fn check_header(
    rdr: &mut csv::Reader<std::fs::File>,
    expected: &[&str],
    path: &Path,
) -> Result<(), LoadError> {
    let found = rdr
        .headers()
        .map_err(|e| LoadError::Io { path: path.to_owned(), source: io::Error::other(e) })?;
    let found_vec: Vec<&str> = found.iter().collect();
    if found_vec != expected {
        return Err(LoadError::Header {
            path: path.to_owned(),
            expected: expected.join(","),
            found: found_vec.join(","),
        });
    }
    Ok(())
}

/// Line number of a CSV record (1-based, counting the header line).
fn record_line(rec: &csv::StringRecord) -> u64 {
    rec.position().map(|p| p.line()).unwrap_or(0)
}

fn parse_scale(
    field: &str,
    name: &str,
    lo: u8,
    hi: u8,
    line: u64,
    errors: &mut RowErrors,
) -> Option<u8> {
    match field.parse::<u8>() {
        Ok(v) if (lo..=hi).contains(&v) => Some(v),
        Ok(v) => {
            errors.push(line, format!("{name} out of range [{lo},{hi}]: {v}"));
            None
        }
        Err(_) => {
            errors.push(line, format!("{name} is not an integer: `{field}`"));
            None
        }
    }
}

fn parse_count<T: std::str::FromStr>(
    field: &str,
    name: &str,
    line: u64,
    errors: &mut RowErrors,
) -> Option<T> {
    match field.parse::<T>() {
        Ok(v) => Some(v),
        Err(_) => {
            errors.push(line, format!("{name} is not a non-negative integer: `{field}`"));
            None
        }
    }
}

/// Parses an RFC 3339 timestamp. The offset is mandatory (naive local times
/// are rejected); the instant is normalized to UTC.
fn parse_timestamp(field: &str, line: u64, errors: &mut RowErrors) -> Option<DateTime<Utc>> {
    match DateTime::parse_from_rfc3339(field) {
        Ok(t) => Some(t.with_timezone(&Utc)),
        Err(e) => {
            errors.push(
                line,
                format!("submitted_at is not an RFC 3339 timestamp with offset: `{field}` ({e})"),
            );
            None
        }
    }
}

fn nonempty_id(field: &str, name: &str, line: u64, errors: &mut RowErrors) -> Option<String> {
    if field.is_empty() {
        errors.push(line, format!("{name} is empty"));
        None
    } else {
        Some(field.to_owned())
    }
}

/// Canonical on-disk form of a timestamp: RFC 3339 UTC with a `Z` suffix and
/// whole-second precision, e.g. `2014-07-21T00:00:00Z`.
pub fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Loads `reviews.csv`. Rows are returned sorted by (paper, reviewer).
pub fn load_reviews(path: impl AsRef<Path>) -> Result<Vec<ReviewRecord>, LoadError> {
    let path = path.as_ref();
    let mut rdr = open_reader(path)?;
    check_header(&mut rdr, REVIEWS_HEADER, path)?;

    let mut errors = RowErrors(Vec::new());
    let mut rows = Vec::new();
    // (paper, reviewer) -> line of first occurrence, for duplicate detection.
    let mut seen: BTreeMap<(String, String), u64> = BTreeMap::new();

    for rec in rdr.records() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                errors.push(line, format!("malformed row: {e}"));
                continue;
            }
        };
        let line = record_line(&rec);
        let paper = nonempty_id(&rec[0], "paper_id", line, &mut errors);
        let reviewer = nonempty_id(&rec[1], "reviewer_id", line, &mut errors);
        let quality = parse_scale(&rec[2], "quality", 1, 10, line, &mut errors);
        let impact = parse_scale(&rec[3], "impact", 1, 2, line, &mut errors);
        let confidence = parse_scale(&rec[4], "confidence", 1, 5, line, &mut errors);
        let submitted_at = parse_timestamp(&rec[5], line, &mut errors);
        let summary_words = parse_count::<u32>(&rec[6], "summary_words", line, &mut errors);
        let body_words = parse_count::<u32>(&rec[7], "body_words", line, &mut errors);

        if let (Some(p), Some(r)) = (&paper, &reviewer) {
            if let Some(_first) = seen.insert((p.clone(), r.clone()), line) {
                errors.push(line, format!("duplicate review key ({p},{r})"));
                continue;
            }
        }
        if let (Some(p), Some(r), Some(q), Some(i), Some(c), Some(t), Some(sw), Some(bw)) = (
            paper,
            reviewer,
            quality,
            impact,
            confidence,
            submitted_at,
            summary_words,
            body_words,
        ) {
            rows.push(ReviewRecord {
                paper_id: PaperId(p),
                reviewer_id: ReviewerId(r),
                quality: q,
                impact: i,
                confidence: c,
                submitted_at: t,
                summary_words: sw,
                body_words: bw,
            });
        }
    }

    if !errors.0.is_empty() {
        return Err(LoadError::Rows { path: path.to_owned(), errors: errors.0 });
    }
    sort_reviews(&mut rows);
    Ok(rows)
}

/// Loads `duplicates.csv`. Rows are returned sorted by committee-1 paper id.
pub fn load_duplicates(path: impl AsRef<Path>) -> Result<Vec<DuplicatePair>, LoadError> {
    let path = path.as_ref();
    let mut rdr = open_reader(path)?;
    check_header(&mut rdr, DUPLICATES_HEADER, path)?;

    let mut errors = RowErrors(Vec::new());
    let mut rows: Vec<DuplicatePair> = Vec::new();
    // paper id -> line where it first appeared in any pair.
    let mut seen: BTreeMap<String, u64> = BTreeMap::new();

    for rec in rdr.records() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                errors.push(line, format!("malformed row: {e}"));
                continue;
            }
        };
        let line = record_line(&rec);
        let p1 = nonempty_id(&rec[0], "committee1_paper", line, &mut errors);
        let p2 = nonempty_id(&rec[1], "committee2_paper", line, &mut errors);
        let eid = nonempty_id(&rec[2], "experiment_id", line, &mut errors);

        let (Some(p1), Some(p2), Some(eid)) = (p1, p2, eid) else { continue };
        if p1 == p2 {
            errors.push(line, format!("self-pair: `{p1}` appears on both sides"));
            continue;
        }
        let mut clash = false;
        for p in [&p1, &p2] {
            if seen.contains_key(p.as_str()) {
                errors.push(line, format!("paper `{p}` appears in multiple pairs"));
                clash = true;
            }
        }
        seen.entry(p1.clone()).or_insert(line);
        seen.entry(p2.clone()).or_insert(line);
        if clash {
            continue;
        }
        rows.push(DuplicatePair {
            committee1_paper: PaperId(p1),
            committee2_paper: PaperId(p2),
            experiment_id: eid,
        });
    }

    if !errors.0.is_empty() {
        return Err(LoadError::Rows { path: path.to_owned(), errors: errors.0 });
    }
    sort_duplicates(&mut rows);
    Ok(rows)
}

/// Loads `decisions.csv`. Rows are returned sorted by (paper, committee).
pub fn load_decisions(path: impl AsRef<Path>) -> Result<Vec<DecisionRecord>, LoadError> {
    let path = path.as_ref();
    let mut rdr = open_reader(path)?;
    check_header(&mut rdr, DECISIONS_HEADER, path)?;

    let mut errors = RowErrors(Vec::new());
    let mut rows = Vec::new();
    let mut seen: BTreeMap<(String, Committee), u64> = BTreeMap::new();

    for rec in rdr.records() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                errors.push(line, format!("malformed row: {e}"));
                continue;
            }
        };
        let line = record_line(&rec);
        let paper = nonempty_id(&rec[0], "paper_id", line, &mut errors);
        let committee = match Committee::parse(&rec[1]) {
            Some(c) => Some(c),
            None => {
                errors.push(line, format!("unknown committee `{}` (expected 1, 2, or main)", &rec[1]));
                None
            }
        };
        let verdict = match Verdict::parse(&rec[2]) {
            Some(v) => Some(v),
            None => {
                errors.push(
                    line,
                    format!("unknown verdict `{}` (expected accept, reject, or withdrawn)", &rec[2]),
                );
                None
            }
        };

        let (Some(p), Some(c), Some(v)) = (paper, committee, verdict) else { continue };
        if seen.insert((p.clone(), c), line).is_some() {
            errors.push(line, format!("duplicate decision key ({p},{c})"));
            continue;
        }
        rows.push(DecisionRecord { paper_id: PaperId(p), committee: c, verdict: v });
    }

    if !errors.0.is_empty() {
        return Err(LoadError::Rows { path: path.to_owned(), errors: errors.0 });
    }
    sort_decisions(&mut rows);
    Ok(rows)
}

/// Loads `outcomes.csv`. Rows are returned sorted by paper id.
pub fn load_outcomes(path: impl AsRef<Path>) -> Result<Vec<PaperOutcome>, LoadError> {
    let path = path.as_ref();
    let mut rdr = open_reader(path)?;
    check_header(&mut rdr, OUTCOMES_HEADER, path)?;

    let mut errors = RowErrors(Vec::new());
    let mut rows = Vec::new();
    let mut seen: BTreeMap<String, u64> = BTreeMap::new();

    for rec in rdr.records() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                errors.push(line, format!("malformed row: {e}"));
                continue;
            }
        };
        let line = record_line(&rec);
        let paper = nonempty_id(&rec[0], "paper_id", line, &mut errors);
        let track = match Track::parse(&rec[1]) {
            Some(t) => Some(t),
            None => {
                errors.push(line, format!("unknown track `{}` (expected accepted or rejected)", &rec[1]));
                None
            }
        };
        let fate = match Fate::parse(&rec[2]) {
            Some(f) => Some(f),
            None => {
                errors.push(line, format!("unknown fate `{}`", &rec[2]));
                None
            }
        };
        let venue = if rec[3].is_empty() { None } else { Some(rec[3].to_owned()) };
        let citations = parse_count::<u64>(&rec[4], "citations", line, &mut errors);

        let (Some(p), Some(t), Some(f), Some(c)) = (paper, track, fate, citations) else {
            continue;
        };
        if f == Fate::ThisConference && t != Track::Accepted {
            errors.push(line, "fate `this_conference` requires track `accepted`".to_string());
            continue;
        }
        if seen.insert(p.clone(), line).is_some() {
            errors.push(line, format!("duplicate outcome for paper `{p}`"));
            continue;
        }
        rows.push(PaperOutcome { paper_id: PaperId(p), track: t, fate: f, venue, citations: c });
    }

    if !errors.0.is_empty() {
        return Err(LoadError::Rows { path: path.to_owned(), errors: errors.0 });
    }
    sort_outcomes(&mut rows);
    Ok(rows)
}

fn save_error(path: &Path, e: csv::Error) -> LoadError {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => LoadError::Io { path: path.to_owned(), source },
        other => LoadError::Io { path: path.to_owned(), source: io::Error::other(format!("{other:?}")) },
    }
}

/// Writes reviews in canonical order and formatting. Loading the result gives
/// back the same records; saving a loaded file reproduces it byte-for-byte.
pub fn save_reviews(path: impl AsRef<Path>, rows: &[ReviewRecord]) -> Result<(), LoadError> {
    let path = path.as_ref();
    let mut rows = rows.to_vec();
    sort_reviews(&mut rows);
    let mut w = csv::Writer::from_path(path).map_err(|e| save_error(path, e))?;
    w.write_record(REVIEWS_HEADER).map_err(|e| save_error(path, e))?;
    for r in &rows {
        w.write_record([
            r.paper_id.0.as_str(),
            r.reviewer_id.0.as_str(),
            &r.quality.to_string(),
            &r.impact.to_string(),
            &r.confidence.to_string(),
            &format_timestamp(&r.submitted_at),
            &r.summary_words.to_string(),
            &r.body_words.to_string(),
        ])
        .map_err(|e| save_error(path, e))?;
    }
    w.flush().map_err(|e| LoadError::Io { path: path.to_owned(), source: e })?;
    Ok(())
}

/// Writes duplicate pairs in canonical order and formatting.
pub fn save_duplicates(path: impl AsRef<Path>, rows: &[DuplicatePair]) -> Result<(), LoadError> {
    let path = path.as_ref();
    let mut rows = rows.to_vec();
    sort_duplicates(&mut rows);
    let mut w = csv::Writer::from_path(path).map_err(|e| save_error(path, e))?;
    w.write_record(DUPLICATES_HEADER).map_err(|e| save_error(path, e))?;
    for r in &rows {
        w.write_record([
            r.committee1_paper.0.as_str(),
            r.committee2_paper.0.as_str(),
            r.experiment_id.as_str(),
        ])
        .map_err(|e| save_error(path, e))?;
    }
    w.flush().map_err(|e| LoadError::Io { path: path.to_owned(), source: e })?;
    Ok(())
}

/// Writes decisions in canonical order and formatting.
pub fn save_decisions(path: impl AsRef<Path>, rows: &[DecisionRecord]) -> Result<(), LoadError> {
    let path = path.as_ref();
    let mut rows = rows.to_vec();
    sort_decisions(&mut rows);
    let mut w = csv::Writer::from_path(path).map_err(|e| save_error(path, e))?;
    w.write_record(DECISIONS_HEADER).map_err(|e| save_error(path, e))?;
    for r in &rows {
        w.write_record([r.paper_id.0.as_str(), r.committee.as_str(), r.verdict.as_str()])
            .map_err(|e| save_error(path, e))?;
    }
    w.flush().map_err(|e| LoadError::Io { path: path.to_owned(), source: e })?;
    Ok(())
}

/// Writes outcomes in canonical order and formatting.
pub fn save_outcomes(path: impl AsRef<Path>, rows: &[PaperOutcome]) -> Result<(), LoadError> {
    let path = path.as_ref();
    let mut rows = rows.to_vec();
    sort_outcomes(&mut rows);
    let mut w = csv::Writer::from_path(path).map_err(|e| save_error(path, e))?;
    w.write_record(OUTCOMES_HEADER).map_err(|e| save_error(path, e))?;
    for r in &rows {
        w.write_record([
            r.paper_id.0.as_str(),
            r.track.as_str(),
            r.fate.as_str(),
            r.venue.as_deref().unwrap_or(""),
            &r.citations.to_string(),
        ])
        .map_err(|e| save_error(path, e))?;
    }
    w.flush().map_err(|e| LoadError::Io { path: path.to_owned(), source: e })?;
    Ok(())
}

/// The table a dangling paper reference was found in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefTable {
    Duplicates,
    Decisions,
    Outcomes,
}

impl fmt::Display for RefTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RefTable::Duplicates => "duplicates",
            RefTable::Decisions => "decisions",
            RefTable::Outcomes => "outcomes",
        })
    }
}

/// A paper id referenced by a table but absent from the reviews table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DanglingRef {
    pub table: RefTable,
    pub paper: PaperId,
}

/// Cross-table consistency findings for a [`Dataset`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// One entry per referencing row whose paper id has no reviews.
    pub dangling: Vec<DanglingRef>,
    /// Distinct papers that are referenced somewhere but were never reviewed.
    pub papers_without_reviews: Vec<PaperId>,
    /// Reviewers that appear in no review. The reviews table is the only
    /// source of reviewer ids, so this list is structurally empty; it is kept
    /// so a future reviewer roster can fill it without an interface change.
    pub reviewers_without_reviews: Vec<ReviewerId>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.dangling.is_empty()
            && self.papers_without_reviews.is_empty()
            && self.reviewers_without_reviews.is_empty()
    }
}

/// Checks referential integrity between the four tables: every paper id used
/// by duplicates, decisions, or outcomes should have at least one review.
pub fn validate(ds: &Dataset) -> ValidationReport {
    let reviewed: std::collections::BTreeSet<&PaperId> =
        ds.reviews.iter().map(|r| &r.paper_id).collect();

    let mut dangling = Vec::new();
    let mut missing: std::collections::BTreeSet<&PaperId> = std::collections::BTreeSet::new();
    let refs = ds
        .duplicates
        .iter()
        .flat_map(|d| {
            [
                (RefTable::Duplicates, &d.committee1_paper),
                (RefTable::Duplicates, &d.committee2_paper),
            ]
        })
        .chain(ds.decisions.iter().map(|d| (RefTable::Decisions, &d.paper_id)))
        .chain(ds.outcomes.iter().map(|o| (RefTable::Outcomes, &o.paper_id)));
    for (table, paper) in refs {
        if !reviewed.contains(paper) {
            dangling.push(DanglingRef { table, paper: paper.clone() });
            missing.insert(paper);
        }
    }

    ValidationReport {
        dangling,
        papers_without_reviews: missing.into_iter().cloned().collect(),
        reviewers_without_reviews: Vec::new(),
    }
}
