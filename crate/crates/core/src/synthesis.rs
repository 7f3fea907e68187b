//! Corruption channels that turn clean references into ASR-like or
//! GEC-like hypotheses, plus ingestion of externally decoded hypotheses.
//!
//! The phonetic channels substitute whole words: Synthetic1 picks any
//! homophone, Synthetic2 keeps only homophones within a small spelling
//! distance. The inflection channel swaps a word's ending for another from
//! the same part-of-speech table. Every channel reports its edits so the
//! corruption can be replayed and audited.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::char_distance;
use crate::corpus::{CorpusRecord, HypEntry};
use crate::lexicon::Lexicon;
use crate::seed::{derive_seed, rng_from_seed};
use crate::text::tokenize;

#[derive(Debug, thiserror::Error)]
pub enum SynthesisError {
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("max_edit must be at least 1")]
    InvalidMaxEdit,
    #[error("hypothesis table lists id `{0}` more than once")]
    DuplicateHypId(String),
    #[error("hypothesis ids not present in the reference corpus: {}", .0.join(", "))]
    UnknownIds(Vec<String>),
    #[error("inflection table line {line}: {message}")]
    Table { line: usize, message: String },
    #[error("inflection table has no endings for {0}")]
    MissingTag(PosTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChannelKind {
    Synthetic1,
    Synthetic2,
    Inflection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edit {
    pub position: usize,
    pub original: String,
    pub replacement: String,
    pub channel: ChannelKind,
}

/// Provenance for one corrupted record.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CorruptionRecord {
    pub record_id: String,
    pub edits: Vec<Edit>,
}

impl CorruptionRecord {
    /// Replays the edits against `reference`.
    pub fn apply(&self, reference: &[String]) -> Vec<String> {
        let mut out = reference.to_vec();
        for e in &self.edits {
            out[e.position] = e.replacement.clone();
        }
        out
    }
}

/// Where replacement candidates come from before any spelling filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CandidateSource {
    /// Words with an identical (stress-stripped) pronunciation.
    #[default]
    Homophones,
    /// Words within one phoneme edit of the original.
    NearPronunciation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhoneticChannel {
    pub kind: ChannelKind,
    pub p_replace: f64,
    /// Spelling-distance bound; only consulted for Synthetic2.
    pub max_edit: usize,
    pub source: CandidateSource,
}

impl PhoneticChannel {
    pub fn synthetic1(p_replace: f64) -> Self {
        Self {
            kind: ChannelKind::Synthetic1,
            p_replace,
            max_edit: usize::MAX,
            source: CandidateSource::Homophones,
        }
    }

    pub fn synthetic2(p_replace: f64, max_edit: usize) -> Self {
        Self {
            kind: ChannelKind::Synthetic2,
            p_replace,
            max_edit,
            source: CandidateSource::Homophones,
        }
    }

    pub fn with_source(mut self, source: CandidateSource) -> Self {
        self.source = source;
        self
    }

    pub fn validate(&self) -> Result<(), SynthesisError> {
        check_probability(self.p_replace)?;
        if self.kind == ChannelKind::Synthetic2 && self.max_edit == 0 {
            return Err(SynthesisError::InvalidMaxEdit);
        }
        Ok(())
    }

    /// Sorted replacement candidates for one normalized token.
    pub fn candidates(&self, lex: &Lexicon, token: &str) -> Vec<String> {
        let Some(prons) = lex.pronunciations(token) else {
            return Vec::new();
        };
        let base = match self.source {
            CandidateSource::Homophones => lex.same_sounding(token, prons),
            CandidateSource::NearPronunciation => lex.near_sounding(token, prons, 1),
        };
        base.into_iter()
            .filter(|c| {
                self.kind != ChannelKind::Synthetic2 || char_distance(token, c) <= self.max_edit
            })
            .collect()
    }
}

fn check_probability(p: f64) -> Result<(), SynthesisError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(SynthesisError::InvalidProbability(p))
    }
}

/// Corrupts one record word-for-word. The returned record carries the
/// corrupted sentence in `hyp`; `reference` is untouched.
pub fn corrupt_phonetic(
    lex: &Lexicon,
    record: &CorpusRecord,
    channel: &PhoneticChannel,
    rng_seed: u64,
) -> Result<(CorpusRecord, CorruptionRecord), SynthesisError> {
    channel.validate()?;
    let mut rng = rng_from_seed(rng_seed);
    let mut hyp = Vec::with_capacity(record.reference.len());
    let mut edits = Vec::new();
    for (position, token) in record.reference.iter().enumerate() {
        let cands = channel.candidates(lex, token);
        if !cands.is_empty() && rng.gen_bool(channel.p_replace) {
            let pick = cands[rng.gen_range(0..cands.len())].clone();
            edits.push(Edit {
                position,
                original: token.clone(),
                replacement: pick.clone(),
                channel: channel.kind,
            });
            hyp.push(pick);
        } else {
            hyp.push(token.clone());
        }
    }
    let mut out = record.clone();
    out.hyp = Some(hyp);
    Ok((
        out,
        CorruptionRecord {
            record_id: record.id.clone(),
            edits,
        },
    ))
}

pub fn corrupt_synthetic1(
    lex: &Lexicon,
    record: &CorpusRecord,
    p_replace: f64,
    rng_seed: u64,
) -> Result<(CorpusRecord, CorruptionRecord), SynthesisError> {
    corrupt_phonetic(
        lex,
        record,
        &PhoneticChannel::synthetic1(p_replace),
        rng_seed,
    )
}

pub fn corrupt_synthetic2(
    lex: &Lexicon,
    record: &CorpusRecord,
    p_replace: f64,
    rng_seed: u64,
    max_edit: usize,
) -> Result<(CorpusRecord, CorruptionRecord), SynthesisError> {
    corrupt_phonetic(
        lex,
        record,
        &PhoneticChannel::synthetic2(p_replace, max_edit),
        rng_seed,
    )
}

/// Corrupts a whole corpus in parallel. Each record draws from its own
/// stream seeded by `(seed, record id)`; output order equals input order.
pub fn corrupt_corpus(
    lex: &Lexicon,
    records: &[CorpusRecord],
    channel: &PhoneticChannel,
    seed: u64,
) -> Result<Vec<(CorpusRecord, CorruptionRecord)>, SynthesisError> {
    channel.validate()?;
    records
        .par_iter()
        .map(|r| corrupt_phonetic(lex, r, channel, derive_seed(seed, "synth", &r.id)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub matched: usize,
    pub unmatched: Vec<String>,
}

/// Attaches externally decoded hypotheses to reference records by id.
pub fn ingest_external_hypotheses(
    mut refs: Vec<CorpusRecord>,
    hyps: &[HypEntry],
) -> Result<(Vec<CorpusRecord>, IngestReport), SynthesisError> {
    let mut table: HashMap<&str, &HypEntry> = HashMap::with_capacity(hyps.len());
    for h in hyps {
        if table.insert(h.id.as_str(), h).is_some() {
            return Err(SynthesisError::DuplicateHypId(h.id.clone()));
        }
    }
    let known: HashSet<&str> = refs.iter().map(|r| r.id.as_str()).collect();
    let unknown: Vec<String> = hyps
        .iter()
        .filter(|h| !known.contains(h.id.as_str()))
        .map(|h| h.id.clone())
        .collect();
    if !unknown.is_empty() {
        return Err(SynthesisError::UnknownIds(unknown));
    }
    let mut matched = 0;
    let mut unmatched = Vec::new();
    for r in &mut refs {
        match table.get(r.id.as_str()) {
            Some(h) => {
                r.hyp = Some(tokenize(&h.sentence));
                matched += 1;
            }
            None => unmatched.push(r.id.clone()),
        }
    }
    Ok((refs, IngestReport { matched, unmatched }))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PosTag {
    Verb,
    Adp,
    Adv,
    Pron,
    Other(String),
}

impl PosTag {
    pub const TARGETS: [PosTag; 4] = [PosTag::Verb, PosTag::Adp, PosTag::Adv, PosTag::Pron];
}

impl FromStr for PosTag {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "VERB" => PosTag::Verb,
            "ADP" => PosTag::Adp,
            "ADV" => PosTag::Adv,
            "PRON" => PosTag::Pron,
            _ => PosTag::Other(s.to_string()),
        })
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PosTag::Verb => f.write_str("VERB"),
            PosTag::Adp => f.write_str("ADP"),
            PosTag::Adv => f.write_str("ADV"),
            PosTag::Pron => f.write_str("PRON"),
            PosTag::Other(t) => f.write_str(t),
        }
    }
}

/// Ending sets per target part of speech.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InflectionTable {
    endings: BTreeMap<PosTag, BTreeSet<String>>,
}

impl InflectionTable {
    pub fn new(endings: BTreeMap<PosTag, BTreeSet<String>>) -> Result<Self, SynthesisError> {
        for tag in PosTag::TARGETS {
            match endings.get(&tag) {
                Some(set) if !set.is_empty() && set.iter().all(|e| !e.is_empty()) => {}
                _ => return Err(SynthesisError::MissingTag(tag)),
            }
        }
        Ok(Self { endings })
    }

    /// Parses `TAG<TAB>ending ending ...` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, SynthesisError> {
        let mut endings: BTreeMap<PosTag, BTreeSet<String>> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (tag, rest) = line.split_once('\t').ok_or_else(|| SynthesisError::Table {
                line: idx + 1,
                message: "expected `TAG<TAB>endings`".into(),
            })?;
            let tag: PosTag = tag.trim().parse().unwrap_or_else(|e| match e {});
            if let PosTag::Other(t) = &tag {
                return Err(SynthesisError::Table {
                    line: idx + 1,
                    message: format!("unsupported tag `{t}`"),
                });
            }
            endings
                .entry(tag)
                .or_default()
                .extend(rest.split_whitespace().map(str::to_string));
        }
        Self::new(endings)
    }

    pub fn endings(&self, tag: &PosTag) -> Option<&BTreeSet<String>> {
        self.endings.get(tag)
    }

    /// Longest ending of `tag` that `token` ends with.
    pub fn matching_ending<'a>(&'a self, tag: &PosTag, token: &str) -> Option<&'a str> {
        self.endings
            .get(tag)?
            .iter()
            .filter(|e| token.ends_with(e.as_str()))
            .max_by(|a, b| a.len().cmp(&b.len()).then_with(|| b.cmp(a)))
            .map(String::as_str)
    }
}

/// Replaces inflectional endings on VERB/ADP/ADV/PRON tokens with a
/// different ending from the same table row. Tokens keep their case.
pub fn perturb_inflections(
    record_id: &str,
    tagged: &[(String, PosTag)],
    table: &InflectionTable,
    p_replace: f64,
    rng_seed: u64,
) -> Result<(Vec<String>, CorruptionRecord), SynthesisError> {
    check_probability(p_replace)?;
    let mut rng = rng_from_seed(rng_seed);
    let mut out = Vec::with_capacity(tagged.len());
    let mut edits = Vec::new();
    for (position, (token, tag)) in tagged.iter().enumerate() {
        let Some(ending) = table.matching_ending(tag, token) else {
            out.push(token.clone());
            continue;
        };
        let alternatives: Vec<&String> =
            table.endings[tag].iter().filter(|e| *e != ending).collect();
        if alternatives.is_empty() || !rng.gen_bool(p_replace) {
            out.push(token.clone());
            continue;
        }
        let new_ending = alternatives[rng.gen_range(0..alternatives.len())];
        let replaced = format!("{}{}", &token[..token.len() - ending.len()], new_ending);
        edits.push(Edit {
            position,
            original: token.clone(),
            replacement: replaced.clone(),
            channel: ChannelKind::Inflection,
        });
        out.push(replaced);
    }
    Ok((
        out,
        CorruptionRecord {
            record_id: record_id.to_string(),
            edits,
        },
    ))
}
