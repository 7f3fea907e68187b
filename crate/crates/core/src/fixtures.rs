//! Bundled test data: a pronouncing-dictionary excerpt, reference/ASR
//! sentence pairs, a clean LM training corpus, an inflection table and a
//! small POS-tagged corpus.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use crate::corpus::{parse_tagged, CorpusRecord};
use crate::lexicon::{Lexicon, LexiconError, LexiconOptions};
use crate::synthesis::{InflectionTable, SynthesisError};
use crate::text::tokenize;

pub const LEXICON_FILE: &str = "cmudict_excerpt.dict";
pub const PAIRS_FILE: &str = "asr_pairs.tsv";
pub const LM_CORPUS_FILE: &str = "lm_corpus.txt";
pub const INFLECTION_FILE: &str = "inflection_table.tsv";
pub const TAGGED_FILE: &str = "gec_tagged.conll";

/// Minimum number of reference/ASR pairs a fixture set must carry.
pub const MIN_PAIRS: usize = 6;

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon: {0}")]
    Lexicon(#[from] LexiconError),
    #[error("inflection table: {0}")]
    Inflection(#[from] SynthesisError),
    #[error("{file} line {line}: {message}")]
    Format {
        file: &'static str,
        line: usize,
        message: String,
    },
    #[error("fixture check failed: {0}")]
    Invalid(String),
}

/// A reference sentence with its recognizer output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsrPair {
    pub id: String,
    pub reference: Vec<String>,
    pub hypothesis: Vec<String>,
}

impl AsrPair {
    pub fn to_record(&self) -> CorpusRecord {
        CorpusRecord {
            id: self.id.clone(),
            reference: self.reference.clone(),
            hyp: Some(self.hypothesis.clone()),
            phonemes: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FixtureSet {
    pub lexicon: Lexicon,
    pub pairs: Vec<AsrPair>,
    pub lm_corpus: Vec<String>,
    pub inflection_table: InflectionTable,
    pub tagged: Vec<Vec<(String, String)>>,
}

impl FixtureSet {
    pub fn pair(&self, id: &str) -> Option<&AsrPair> {
        self.pairs.iter().find(|p| p.id == id)
    }
}

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn load_fixtures() -> Result<FixtureSet, FixtureError> {
    load_fixtures_from(fixture_dir())
}

fn read(dir: &Path, name: &str) -> Result<String, FixtureError> {
    let path = dir.join(name);
    std::fs::read_to_string(&path).map_err(|source| FixtureError::Io { path, source })
}

/// Reads `id<TAB>reference<TAB>hypothesis` rows, skipping `#` comments.
pub fn parse_pairs(text: &str) -> Result<Vec<AsrPair>, FixtureError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(FixtureError::Format {
                file: PAIRS_FILE,
                line: idx + 1,
                message: format!("expected 3 tab-separated columns, found {}", cols.len()),
            });
        }
        out.push(AsrPair {
            id: cols[0].trim().to_string(),
            reference: tokenize(cols[1]),
            hypothesis: tokenize(cols[2]),
        });
    }
    Ok(out)
}

pub fn load_fixtures_from(dir: impl AsRef<Path>) -> Result<FixtureSet, FixtureError> {
    let dir = dir.as_ref();
    let lexicon = Lexicon::parse(&read(dir, LEXICON_FILE)?, LexiconOptions::default())?;
    let pairs = parse_pairs(&read(dir, PAIRS_FILE)?)?;
    let lm_corpus = read(dir, LM_CORPUS_FILE)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect();
    let inflection_table = InflectionTable::parse(&read(dir, INFLECTION_FILE)?)?;
    let tagged = parse_tagged(&read(dir, TAGGED_FILE)?).map_err(|e| FixtureError::Format {
        file: TAGGED_FILE,
        line: 0,
        message: e.to_string(),
    })?;
    let set = FixtureSet {
        lexicon,
        pairs,
        lm_corpus,
        inflection_table,
        tagged,
    };
    validate(&set)?;
    Ok(set)
}

/// Unique ids, enough pairs, every reference word in the lexicon and every
/// hypothesis word pronounceable (directly or by the spelling fallback).
pub fn validate(set: &FixtureSet) -> Result<(), FixtureError> {
    if set.pairs.len() < MIN_PAIRS {
        return Err(FixtureError::Invalid(format!(
            "{} pairs, need at least {MIN_PAIRS}",
            set.pairs.len()
        )));
    }
    let mut seen = BTreeSet::new();
    for p in &set.pairs {
        if !seen.insert(p.id.as_str()) {
            return Err(FixtureError::Invalid(format!(
                "duplicate pair id `{}`",
                p.id
            )));
        }
        if p.reference.is_empty() {
            return Err(FixtureError::Invalid(format!(
                "pair `{}` has an empty reference",
                p.id
            )));
        }
        if let Some(w) = p.reference.iter().find(|w| !set.lexicon.contains(w)) {
            return Err(FixtureError::Invalid(format!(
                "pair `{}`: reference word `{w}` missing from lexicon",
                p.id
            )));
        }
        if let Some(w) = p
            .hypothesis
            .iter()
            .find(|w| set.lexicon.g2p_word(w).is_err())
        {
            return Err(FixtureError::Invalid(format!(
                "pair `{}`: hypothesis word `{w}` has no pronunciation",
                p.id
            )));
        }
    }
    for line in &set.lm_corpus {
        if let Some(w) = tokenize(line).iter().find(|w| !set.lexicon.contains(w)) {
            return Err(FixtureError::Invalid(format!(
                "LM corpus word `{w}` missing from lexicon"
            )));
        }
    }
    Ok(())
}
