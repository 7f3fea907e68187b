//! Corpus records and the on-disk formats: JSONL corpora, `id<TAB>sentence`
//! hypothesis tables, and two-column CoNLL-style tagged text.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::text::{join, tokenize};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("duplicate record id `{0}`")]
    DuplicateId(String),
    #[error("record `{0}` has an empty reference")]
    EmptyReference(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusRecord {
    pub id: String,
    pub reference: Vec<String>,
    pub hyp: Option<Vec<String>>,
    pub phonemes: Option<Vec<String>>,
}

impl CorpusRecord {
    pub fn new(id: impl Into<String>, reference: &str) -> Self {
        Self {
            id: id.into(),
            reference: tokenize(reference),
            hyp: None,
            phonemes: None,
        }
    }

    pub fn with_hyp(mut self, hyp: &str) -> Self {
        self.hyp = Some(tokenize(hyp));
        self
    }
}

#[derive(Serialize, Deserialize)]
struct WireRecord {
    id: String,
    #[serde(rename = "ref")]
    reference: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hyp: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phonemes: Option<String>,
}

impl From<&CorpusRecord> for WireRecord {
    fn from(r: &CorpusRecord) -> Self {
        WireRecord {
            id: r.id.clone(),
            reference: join(&r.reference),
            hyp: r.hyp.as_deref().map(join),
            // Phoneme symbols are case-sensitive, so no normalization.
            phonemes: r.phonemes.as_ref().map(|p| p.join(" ")),
        }
    }
}

pub fn record_to_json(record: &CorpusRecord) -> String {
    serde_json::to_string(&WireRecord::from(record)).expect("corpus record serializes")
}

/// Parses a JSONL corpus. Ids must be unique and references nonempty.
pub fn parse_corpus_jsonl(text: &str) -> Result<Vec<CorpusRecord>, CorpusError> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let wire: WireRecord = serde_json::from_str(line).map_err(|e| CorpusError::Format {
            line: idx + 1,
            message: e.to_string(),
        })?;
        if !seen.insert(wire.id.clone()) {
            return Err(CorpusError::DuplicateId(wire.id));
        }
        let reference = tokenize(&wire.reference);
        if reference.is_empty() {
            return Err(CorpusError::EmptyReference(wire.id));
        }
        out.push(CorpusRecord {
            id: wire.id,
            reference,
            hyp: wire.hyp.as_deref().map(tokenize),
            phonemes: wire
                .phonemes
                .map(|p| p.split_whitespace().map(str::to_string).collect()),
        });
    }
    Ok(out)
}

pub fn corpus_to_jsonl(records: &[CorpusRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&record_to_json(r));
        out.push('\n');
    }
    out
}

/// Builds a corpus from plain text, one reference per line, ids `s1`, `s2`, ...
/// Blank lines are skipped but still advance the counter.
pub fn corpus_from_lines(text: &str) -> Vec<CorpusRecord> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| CorpusRecord::new(format!("s{}", i + 1), l))
        .collect()
}

/// One row of a hypothesis table.
#[derive(Debug, Clone, PartialEq)]
pub struct HypEntry {
    pub id: String,
    pub sentence: String,
    pub confidences: Option<Vec<f64>>,
}

/// Reads `id<TAB>sentence[<TAB>conf conf ...]`. Blank lines and `#`
/// comments are skipped. Duplicates are left for callers to judge.
pub fn parse_hyp_table(text: &str) -> Result<Vec<HypEntry>, CorpusError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split('\t');
        let id = cols.next().unwrap_or_default().trim();
        let sentence = cols.next().ok_or_else(|| CorpusError::Format {
            line: idx + 1,
            message: "expected `id<TAB>sentence`".into(),
        })?;
        if id.is_empty() {
            return Err(CorpusError::Format {
                line: idx + 1,
                message: "empty id".into(),
            });
        }
        let confidences = match cols.next() {
            Some(c) if !c.trim().is_empty() => Some(
                c.split(|ch: char| ch.is_whitespace() || ch == ',')
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<f64>().map_err(|e| CorpusError::Format {
                            line: idx + 1,
                            message: format!("bad confidence `{s}`: {e}"),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            _ => None,
        };
        if cols.next().is_some() {
            return Err(CorpusError::Format {
                line: idx + 1,
                message: "too many columns".into(),
            });
        }
        out.push(HypEntry {
            id: id.to_string(),
            sentence: sentence.to_string(),
            confidences,
        });
    }
    Ok(out)
}

pub fn hyp_table_to_tsv<'a, I>(rows: I) -> String
where
    I: IntoIterator<Item = (&'a str, &'a [String])>,
{
    let mut out = String::new();
    for (id, tokens) in rows {
        let _ = writeln!(out, "{id}\t{}", join(tokens));
    }
    out
}

/// Reads `token<TAB>tag` lines; blank lines separate sentences.
pub fn parse_tagged(text: &str) -> Result<Vec<Vec<(String, String)>>, CorpusError> {
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        let mut cols = line.split('\t');
        match (cols.next(), cols.next(), cols.next()) {
            (Some(tok), Some(tag), None) if !tok.is_empty() && !tag.is_empty() => {
                current.push((tok.to_string(), tag.trim().to_string()));
            }
            _ => {
                return Err(CorpusError::Format {
                    line: idx + 1,
                    message: "expected `token<TAB>tag`".into(),
                })
            }
        }
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}
