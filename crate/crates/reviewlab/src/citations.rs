//! Citation-count retrieval and submission-to-publication matching.
//!
//! The study traced what happened to rejected submissions and pulled citation
//! counts for the traced versions from a scholarly-index HTTP API. This
//! module reconstructs that plumbing:
//!
//! - [`fetch_citations`] resolves external paper ids to citation counts,
//!   serving hits from a local JSON-lines cache and fetching misses over
//!   HTTPS (`GET {base}/paper/{id}`, expecting a JSON body with a
//!   `citationCount` field). Rate-limit (429) and server/transport failures
//!   retry with exponential backoff — base 1 s, factor 2, at most 5 retries.
//!   Offline mode never touches the network and errors on the first miss,
//!   naming the id.
//! - [`match_candidates`] reconstructs the tracing heuristic: candidates are
//!   scored by token-set Jaccard similarity of case-folded,
//!   punctuation-stripped, plural-normalized titles, and candidates whose
//!   author list does not contain the submission's contact author (surname
//!   match by default) are excluded. The 0.5 score threshold and the
//!   surname-only rule are reconstructions — the study did not publish its
//!   procedure — so both are configurable.
//!
//! Up to [`ClientConfig::max_in_flight`] requests (default 4) run
//! concurrently; cache writes are serialized through a single writer. The
//! cache is append-only JSON lines keyed by external id, last entry wins.
//!
//! The API key, when needed, comes from the `REVIEWLAB_API_KEY` environment
//! variable and is sent as an `x-api-key` header.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::time::Duration;

/// Environment variable holding the API key, if the index requires one.
pub const API_KEY_ENV: &str = "REVIEWLAB_API_KEY";

/// Default scholarly-index API base URL.
pub const DEFAULT_API_BASE: &str = "https://api.semanticscholar.org/graph/v1";

/// Default Jaccard score threshold for [`match_candidates`].
pub const DEFAULT_MATCH_THRESHOLD: f64 = 0.5;

/// One cached id → citation-count resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CitationCacheEntry {
    /// External paper id (index-specific).
    pub external_id: String,
    /// Citation count at fetch time.
    pub citations: u64,
    /// When the entry was fetched.
    pub fetched_at: DateTime<Utc>,
    /// Title reported by the index (may be empty).
    pub title: String,
    /// Author names reported by the index.
    pub authors: Vec<String>,
}

/// Errors from cache handling, fetching, and matching.
#[derive(Debug, thiserror::Error)]
pub enum CitationError {
    /// Filesystem failure on the cache file.
    #[error("cache i/o on {path}: {source}")]
    Io {
        /// Cache path involved.
        path: String,
        /// Underlying error.
        #[source]
        source: std::io::Error,
    },
    /// A cache line failed to parse.
    #[error("malformed cache line {line} in {path}: {message}")]
    MalformedCache {
        /// Cache path involved.
        path: String,
        /// 1-based line number.
        line: usize,
        /// Parser message.
        message: String,
    },
    /// Offline mode hit an id that is not in the cache.
    #[error("id `{id}` is not cached and offline mode forbids fetching it")]
    OfflineMiss {
        /// The missing id.
        id: String,
    },
    /// The API kept rate-limiting past the retry budget.
    #[error("rate-limited fetching `{id}` after {attempts} attempts")]
    RateLimited {
        /// The id being fetched.
        id: String,
        /// Attempts made.
        attempts: u32,
    },
    /// Transport-level failure after retries, or a failing status code.
    #[error("http failure fetching `{id}`: {message}")]
    Http {
        /// The id being fetched.
        id: String,
        /// What went wrong.
        message: String,
    },
    /// A 200 response that did not contain a usable `citationCount`.
    #[error("malformed response for `{id}`: {message}")]
    MalformedResponse {
        /// The id being fetched.
        id: String,
        /// What was wrong with the body.
        message: String,
    },
    /// Invalid argument.
    #[error("invalid {field}: {message}")]
    InvalidInput {
        /// Which argument.
        field: &'static str,
        /// What went wrong.
        message: String,
    },
}

fn io_err(path: &Path, source: std::io::Error) -> CitationError {
    CitationError::Io { path: path.display().to_string(), source }
}

/// HTTP client settings.
#[derive(Clone, Debug)]
pub struct ClientConfig {
    /// Base URL; ids resolve at `{api_base}/paper/{id}`.
    pub api_base: String,
    /// Optional API key sent as `x-api-key`.
    pub api_key: Option<String>,
    /// Maximum concurrent in-flight requests.
    pub max_in_flight: usize,
    /// Maximum retries after the initial attempt.
    pub max_retries: u32,
    /// First backoff delay.
    pub backoff_base: Duration,
    /// Multiplier applied to the delay after each retry.
    pub backoff_factor: u32,
    /// Per-request timeout.
    pub timeout: Duration,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            api_base: DEFAULT_API_BASE.to_string(),
            api_key: std::env::var(API_KEY_ENV).ok(),
            max_in_flight: 4,
            max_retries: 5,
            backoff_base: Duration::from_secs(1),
            backoff_factor: 2,
            timeout: Duration::from_secs(30),
        }
    }
}

/// Loads a JSON-lines cache file. Later entries for the same id win; blank
/// lines are ignored; any unparsable line is an error naming path and line.
pub fn load_cache(path: impl AsRef<Path>) -> Result<BTreeMap<String, CitationCacheEntry>, CitationError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let reader = std::io::BufReader::new(file);
    let mut cache = BTreeMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: CitationCacheEntry =
            serde_json::from_str(&line).map_err(|e| CitationError::MalformedCache {
                path: path.display().to_string(),
                line: idx + 1,
                message: e.to_string(),
            })?;
        cache.insert(entry.external_id.clone(), entry);
    }
    Ok(cache)
}

/// Appends entries to a JSON-lines cache file, creating it if needed.
pub fn append_cache(
    path: impl AsRef<Path>,
    entries: &[CitationCacheEntry],
) -> Result<(), CitationError> {
    let path = path.as_ref();
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| io_err(path, e))?;
    let mut writer = BufWriter::new(file);
    for entry in entries {
        let line = serde_json::to_string(entry).expect("cache entries serialize");
        writeln!(writer, "{line}").map_err(|e| io_err(path, e))?;
    }
    writer.flush().map_err(|e| io_err(path, e))
}

/// Reads an id list: one id per line, trimmed, skipping blanks and `#` comments.
pub fn load_ids(path: impl AsRef<Path>) -> Result<Vec<String>, CitationError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}

/// Ids may contain alphanumerics and `: . / _ -` (covering DOIs and
/// prefixed index ids); anything else would corrupt the request path.
fn validate_id(id: &str) -> Result<(), CitationError> {
    if id.is_empty()
        || !id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, ':' | '.' | '/' | '_' | '-'))
    {
        return Err(CitationError::InvalidInput {
            field: "id",
            message: format!("`{id}` is not a safe external id"),
        });
    }
    Ok(())
}

/// One GET with retry/backoff. Retries 429 and 5xx statuses and transport
/// errors; other failing statuses abort immediately.
fn fetch_one(
    client: &reqwest::blocking::Client,
    config: &ClientConfig,
    id: &str,
) -> Result<CitationCacheEntry, CitationError> {
    validate_id(id)?;
    let url = format!(
        "{}/paper/{}?fields=citationCount,title,authors",
        config.api_base.trim_end_matches('/'),
        id
    );
    let mut delay = config.backoff_base;
    let attempts = config.max_retries + 1;
    for attempt in 1..=attempts {
        let mut request = client.get(&url);
        if let Some(key) = &config.api_key {
            request = request.header("x-api-key", key);
        }
        let outcome = request.send();
        let retryable = match outcome {
            Ok(response) => {
                let status = response.status();
                if status.is_success() {
                    return parse_response(id, &response.text().map_err(|e| CitationError::Http {
                        id: id.to_string(),
                        message: e.to_string(),
                    })?);
                }
                if status.as_u16() == 429 || status.is_server_error() {
                    Ok(status)
                } else {
                    return Err(CitationError::Http {
                        id: id.to_string(),
                        message: format!("unexpected status {status}"),
                    });
                }
            }
            Err(e) => Err(e.to_string()),
        };
        if attempt == attempts {
            return match retryable {
                Ok(status) if status.as_u16() == 429 => {
                    Err(CitationError::RateLimited { id: id.to_string(), attempts })
                }
                Ok(status) => Err(CitationError::Http {
                    id: id.to_string(),
                    message: format!("status {status} after {attempts} attempts"),
                }),
                Err(message) => Err(CitationError::Http {
                    id: id.to_string(),
                    message: format!("{message} (after {attempts} attempts)"),
                }),
            };
        }
        std::thread::sleep(delay);
        delay *= config.backoff_factor;
    }
    unreachable!("loop returns on the final attempt")
}

/// Parses a success body: `citationCount` is required; `title` and `authors`
/// (objects with a `name`, or plain strings) are optional.
fn parse_response(id: &str, body: &str) -> Result<CitationCacheEntry, CitationError> {
    let value: serde_json::Value =
        serde_json::from_str(body).map_err(|e| CitationError::MalformedResponse {
            id: id.to_string(),
            message: format!("not JSON: {e}"),
        })?;
    let citations =
        value.get("citationCount").and_then(serde_json::Value::as_u64).ok_or_else(|| {
            CitationError::MalformedResponse {
                id: id.to_string(),
                message: "missing or non-integer citationCount".to_string(),
            }
        })?;
    let title = value.get("title").and_then(|t| t.as_str()).unwrap_or("").to_string();
    let authors = value
        .get("authors")
        .and_then(|a| a.as_array())
        .map(|items| {
            items
                .iter()
                .filter_map(|item| {
                    item.get("name")
                        .and_then(|n| n.as_str())
                        .or_else(|| item.as_str())
                        .map(str::to_string)
                })
                .collect()
        })
        .unwrap_or_default();
    Ok(CitationCacheEntry {
        external_id: id.to_string(),
        citations,
        fetched_at: Utc::now(),
        title,
        authors,
    })
}

/// Resolves ids to citation counts.
///
/// Cached ids never touch the network; misses are fetched concurrently (at
/// most [`ClientConfig::max_in_flight`] in flight) and appended to the cache
/// through a single serialized writer. In offline mode a miss is an error
/// naming the first missing id in input order. Duplicate input ids are
/// fetched once.
pub fn fetch_citations(
    ids: &[String],
    cache_path: impl AsRef<Path>,
    offline: bool,
    config: &ClientConfig,
) -> Result<BTreeMap<String, u64>, CitationError> {
    let cache_path = cache_path.as_ref();
    let cache = if cache_path.exists() { load_cache(cache_path)? } else { BTreeMap::new() };

    let mut result = BTreeMap::new();
    let mut missing = Vec::new();
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id.as_str()) {
            continue;
        }
        match cache.get(id) {
            Some(entry) => {
                result.insert(id.clone(), entry.citations);
            }
            None => missing.push(id.clone()),
        }
    }
    if missing.is_empty() {
        return Ok(result);
    }
    if offline {
        return Err(CitationError::OfflineMiss { id: missing.remove(0) });
    }

    let client = reqwest::blocking::Client::builder()
        .timeout(config.timeout)
        .build()
        .map_err(|e| CitationError::Http { id: missing[0].clone(), message: e.to_string() })?;

    let queue: Mutex<VecDeque<String>> = Mutex::new(missing.into());
    let fetched: Mutex<Vec<CitationCacheEntry>> = Mutex::new(Vec::new());
    let first_error: Mutex<Option<CitationError>> = Mutex::new(None);
    let stop = AtomicBool::new(false);
    let workers = crate::concurrency::io_worker_count(config.max_in_flight)
        .min(queue.lock().expect("queue").len());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let Some(id) = queue.lock().expect("queue").pop_front() else { break };
                match fetch_one(&client, config, &id) {
                    Ok(entry) => fetched.lock().expect("results").push(entry),
                    Err(e) => {
                        stop.store(true, Ordering::Relaxed);
                        let mut slot = first_error.lock().expect("error slot");
                        if slot.is_none() {
                            *slot = Some(e);
                        }
                        break;
                    }
                }
            });
        }
    });

    // Single-writer append, after workers are done (order: sorted by id so
    // the cache file grows deterministically for a given miss set).
    let mut new_entries = fetched.into_inner().expect("results");
    new_entries.sort_by(|a, b| a.external_id.cmp(&b.external_id));
    if !new_entries.is_empty() {
        append_cache(cache_path, &new_entries)?;
    }
    if let Some(err) = first_error.into_inner().expect("error slot") {
        return Err(err);
    }
    for entry in new_entries {
        result.insert(entry.external_id.clone(), entry.citations);
    }
    Ok(result)
}

/// A publication record to score against a submission.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchCandidate {
    /// Candidate title.
    pub title: String,
    /// Candidate author names.
    pub authors: Vec<String>,
}

/// One retained match, best first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedMatch {
    /// Index into the candidate list.
    pub index: usize,
    /// Candidate title (echoed for convenience).
    pub title: String,
    /// Token-set Jaccard similarity in `[0, 1]`.
    pub score: f64,
}

/// Matching knobs. The defaults reconstruct the study's (unpublished)
/// procedure; both are surfaced because they are judgment calls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchConfig {
    /// Minimum Jaccard score to retain a candidate.
    pub threshold: f64,
    /// Match the contact author by surname only (case-folded); when false,
    /// the full case-folded, whitespace-normalized name must appear.
    pub surname_only: bool,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig { threshold: DEFAULT_MATCH_THRESHOLD, surname_only: true }
    }
}

/// Light plural normalization so singular/plural title variants share tokens
/// ("processes" → "process", "models" → "model", "studies" → "studi").
fn singularize(token: &str) -> String {
    if let Some(stem) = token.strip_suffix("sses") {
        return format!("{stem}ss");
    }
    if let Some(stem) = token.strip_suffix("ies") {
        return format!("{stem}i");
    }
    if token.ends_with("ss") {
        return token.to_string();
    }
    if token.len() > 1 {
        if let Some(stem) = token.strip_suffix('s') {
            return stem.to_string();
        }
    }
    token.to_string()
}

/// Case-folded, punctuation-stripped, plural-normalized title token set.
fn title_tokens(title: &str) -> BTreeSet<String> {
    title
        .to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(singularize)
        .collect()
}

/// Token-set Jaccard similarity; empty-union pairs score 0.
fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let intersection = a.intersection(b).count();
    let union = a.len() + b.len() - intersection;
    if union == 0 {
        0.0
    } else {
        intersection as f64 / union as f64
    }
}

/// Does the candidate's author list contain the contact author?
fn author_present(contact: &str, authors: &[String], surname_only: bool) -> bool {
    let fold = |s: &str| s.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ");
    if surname_only {
        let Some(surname) = fold(contact).split(' ').next_back().map(str::to_string) else {
            return false;
        };
        authors.iter().any(|a| fold(a).split(' ').any(|token| token == surname))
    } else {
        let target = fold(contact);
        authors.iter().any(|a| fold(a) == target)
    }
}

/// Scores candidates against a submission and returns the retained matches,
/// best first (ties keep candidate order).
///
/// Candidates whose author list lacks the contact author are excluded before
/// scoring; survivors below [`MatchConfig::threshold`] are dropped.
pub fn match_candidates(
    submission_title: &str,
    contact_author: &str,
    candidates: &[MatchCandidate],
    config: &MatchConfig,
) -> Result<Vec<RankedMatch>, CitationError> {
    let target = title_tokens(submission_title);
    if target.is_empty() {
        return Err(CitationError::InvalidInput {
            field: "submission_title",
            message: "title has no usable tokens".to_string(),
        });
    }
    if !(0.0..=1.0).contains(&config.threshold) {
        return Err(CitationError::InvalidInput {
            field: "threshold",
            message: "must lie in [0, 1]".to_string(),
        });
    }
    let mut matches: Vec<RankedMatch> = candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| author_present(contact_author, &c.authors, config.surname_only))
        .map(|(index, c)| RankedMatch {
            index,
            title: c.title.clone(),
            score: jaccard(&target, &title_tokens(&c.title)),
        })
        .filter(|m| m.score >= config.threshold)
        .collect();
    matches.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.index.cmp(&b.index)));
    Ok(matches)
}
