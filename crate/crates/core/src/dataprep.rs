//! Fine-tuning records for an external seq2seq trainer: hypothesis tokens,
//! optionally followed by a separator and the hypothesis phonemes, paired
//! with the reference. Records can be masked at random or where the
//! hypothesis disagrees with the reference.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::{align_words, EditKind};
use crate::corpus::CorpusRecord;
use crate::lexicon::{Lexicon, LexiconError};
use crate::seed::{derive_seed, rng_from_seed};

pub const SEP_TOKEN: &str = "[SEP]";
pub const DEFAULT_MASK_TOKEN: &str = "<mask>";
pub const DEFAULT_MAX_LEN: usize = 35;
pub const DEFAULT_MAX_LEN_WITH_PHONEMES: usize = 70;
pub const DEFAULT_TOKEN_RATE: f64 = 0.15;

pub fn default_max_len(with_phonemes: bool) -> usize {
    if with_phonemes {
        DEFAULT_MAX_LEN_WITH_PHONEMES
    } else {
        DEFAULT_MAX_LEN
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DataprepError {
    #[error("record `{0}` has no hypothesis")]
    MissingHyp(String),
    #[error("max_len must be at least 1")]
    ZeroMaxLen,
    #[error("rate {0} is outside [0, 1]")]
    InvalidRate(f64),
    #[error("masking fractions {0} + {1} must each lie in [0, 1] and sum to at most 1")]
    InvalidFractions(f64, f64),
    #[error("record `{0}` needs phonemes but no lexicon was given")]
    MissingLexicon(String),
    #[error("record `{id}`: {source}")]
    Lexicon {
        id: String,
        #[source]
        source: LexiconError,
    },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingRecord {
    pub id: String,
    pub input: Vec<String>,
    pub target: Vec<String>,
    pub mask_positions: BTreeSet<usize>,
}

impl TrainingRecord {
    pub fn sep_index(&self) -> Option<usize> {
        self.input.iter().position(|t| t == SEP_TOKEN)
    }

    /// Length of the hypothesis part (everything before the separator).
    pub fn hyp_len(&self) -> usize {
        self.sep_index().unwrap_or(self.input.len())
    }

    /// Input with masked positions replaced by `mask_token`.
    pub fn masked_input(&self, mask_token: &str) -> Vec<String> {
        self.input
            .iter()
            .enumerate()
            .map(|(i, t)| {
                if self.mask_positions.contains(&i) {
                    mask_token.to_string()
                } else {
                    t.clone()
                }
            })
            .collect()
    }
}

/// Builds `hyp [SEP] phonemes` (or just `hyp`), truncated from the right
/// to `max_len`. A separator left with no phonemes after it is dropped.
pub fn build_training_record(
    record: &CorpusRecord,
    lex: Option<&Lexicon>,
    with_phonemes: bool,
    max_len: usize,
) -> Result<TrainingRecord, DataprepError> {
    if max_len == 0 {
        return Err(DataprepError::ZeroMaxLen);
    }
    let hyp = record
        .hyp
        .as_ref()
        .ok_or_else(|| DataprepError::MissingHyp(record.id.clone()))?;
    let mut input = hyp.clone();
    if with_phonemes && !hyp.is_empty() {
        let phonemes = match &record.phonemes {
            Some(p) => p.clone(),
            None => lex
                .ok_or_else(|| DataprepError::MissingLexicon(record.id.clone()))?
                .g2p_sequence(hyp)
                .map_err(|source| DataprepError::Lexicon {
                    id: record.id.clone(),
                    source,
                })?
                .iter()
                .map(ToString::to_string)
                .collect(),
        };
        if !phonemes.is_empty() {
            input.push(SEP_TOKEN.to_string());
            input.extend(phonemes);
        }
    }
    input.truncate(max_len);
    if input.last().map(String::as_str) == Some(SEP_TOKEN) {
        input.pop();
    }
    Ok(TrainingRecord {
        id: record.id.clone(),
        input,
        target: record.reference.clone(),
        mask_positions: BTreeSet::new(),
    })
}

/// Which input positions random masking may pick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MaskScope {
    /// Every position except the separator.
    #[default]
    AllTokens,
    /// Hypothesis tokens only.
    HypothesisOnly,
}

/// Number of positions masked at `rate` out of `n`.
pub fn mask_count(rate: f64, n: usize) -> usize {
    // The epsilon absorbs products like 0.15 * 20 landing just under 3.
    ((rate * n as f64) + 1e-9).floor() as usize
}

/// Masks exactly `floor(rate * n)` distinct maskable positions, chosen
/// uniformly. Replaces any earlier mask set.
pub fn mask_random(
    rec: &TrainingRecord,
    token_rate: f64,
    scope: MaskScope,
    rng_seed: u64,
) -> Result<TrainingRecord, DataprepError> {
    if !(0.0..=1.0).contains(&token_rate) {
        return Err(DataprepError::InvalidRate(token_rate));
    }
    let maskable: Vec<usize> = match scope {
        MaskScope::AllTokens => (0..rec.input.len())
            .filter(|&i| rec.input[i] != SEP_TOKEN)
            .collect(),
        MaskScope::HypothesisOnly => (0..rec.hyp_len()).collect(),
    };
    let k = mask_count(token_rate, maskable.len()).min(maskable.len());
    let mut rng = rng_from_seed(rng_seed);
    let picks = sample(&mut rng, maskable.len(), k);
    let mut out = rec.clone();
    out.mask_positions = picks.into_iter().map(|i| maskable[i]).collect();
    Ok(out)
}

/// Masks hypothesis positions that the minimal word alignment against the
/// target does not pair with an identical token. Phonemes are never masked.
pub fn mask_error_focused(rec: &TrainingRecord) -> TrainingRecord {
    let hyp = &rec.input[..rec.hyp_len()];
    let alignment = align_words(&rec.target, hyp);
    let mut out = rec.clone();
    out.mask_positions = alignment
        .ops
        .iter()
        .filter(|op| matches!(op.kind, EditKind::Sub | EditKind::Ins))
        .filter_map(|op| op.hyp_index)
        .collect();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaskStrategy {
    Random,
    ErrorFocused,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepConfig {
    pub with_phonemes: bool,
    pub max_len: usize,
    pub token_rate: f64,
    /// Share of sentences that get random token masking.
    pub random_fraction: f64,
    /// Share of sentences that get error-focused masking.
    pub error_focused_fraction: f64,
    pub scope: MaskScope,
    pub seed: u64,
}

impl Default for PrepConfig {
    fn default() -> Self {
        Self {
            with_phonemes: false,
            max_len: DEFAULT_MAX_LEN,
            token_rate: DEFAULT_TOKEN_RATE,
            random_fraction: 0.4,
            error_focused_fraction: 0.6,
            scope: MaskScope::AllTokens,
            seed: 0,
        }
    }
}

impl PrepConfig {
    pub fn validate(&self) -> Result<(), DataprepError> {
        if self.max_len == 0 {
            return Err(DataprepError::ZeroMaxLen);
        }
        if !(0.0..=1.0).contains(&self.token_rate) {
            return Err(DataprepError::InvalidRate(self.token_rate));
        }
        let (r, e) = (self.random_fraction, self.error_focused_fraction);
        let unit = 0.0..=1.0;
        if !unit.contains(&r) || !unit.contains(&e) || r + e > 1.0 + 1e-12 {
            return Err(DataprepError::InvalidFractions(r, e));
        }
        Ok(())
    }

    /// Deterministic per-record choice of masking strategy.
    pub fn strategy_for(&self, id: &str) -> MaskStrategy {
        let u: f64 = rng_from_seed(derive_seed(self.seed, "prep-assign", id)).gen();
        if u < self.random_fraction {
            MaskStrategy::Random
        } else if u < self.random_fraction + self.error_focused_fraction {
            MaskStrategy::ErrorFocused
        } else {
            MaskStrategy::None
        }
    }
}

/// Builds and masks a training record for every corpus record, in input
/// order, using a parallel map. The lexicon is only consulted for records
/// that need phonemes and carry none.
pub fn prepare_corpus(
    corpus: &[CorpusRecord],
    lex: Option<&Lexicon>,
    config: &PrepConfig,
) -> Result<Vec<TrainingRecord>, DataprepError> {
    config.validate()?;
    corpus
        .par_iter()
        .map(|r| {
            let rec = build_training_record(r, lex, config.with_phonemes, config.max_len)?;
            match config.strategy_for(&r.id) {
                MaskStrategy::Random => mask_random(
                    &rec,
                    config.token_rate,
                    config.scope,
                    derive_seed(config.seed, "prep-mask", &r.id),
                ),
                MaskStrategy::ErrorFocused => Ok(mask_error_focused(&rec)),
                MaskStrategy::None => Ok(rec),
            }
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct WireTraining {
    id: String,
    /// Masked input, as a trainer consumes it.
    input: String,
    /// Input before masking.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    target: String,
    mask_positions: Vec<usize>,
}

/// One JSON object; masked input positions are written as `mask_token`.
pub fn record_to_json(rec: &TrainingRecord, mask_token: &str) -> String {
    let wire = WireTraining {
        id: rec.id.clone(),
        input: rec.masked_input(mask_token).join(" "),
        source: (!rec.mask_positions.is_empty()).then(|| rec.input.join(" ")),
        target: rec.target.join(" "),
        mask_positions: rec.mask_positions.iter().copied().collect(),
    };
    serde_json::to_string(&wire).expect("training record serializes")
}

/// `masked input<TAB>target`.
pub fn record_to_tsv(rec: &TrainingRecord, mask_token: &str) -> String {
    format!(
        "{}\t{}",
        rec.masked_input(mask_token).join(" "),
        rec.target.join(" ")
    )
}

pub fn records_to_jsonl(recs: &[TrainingRecord], mask_token: &str) -> String {
    let mut out = String::new();
    for r in recs {
        let _ = writeln!(out, "{}", record_to_json(r, mask_token));
    }
    out
}

pub fn records_to_tsv(recs: &[TrainingRecord], mask_token: &str) -> String {
    let mut out = String::new();
    for r in recs {
        let _ = writeln!(out, "{}", record_to_tsv(r, mask_token));
    }
    out
}

/// Reads records written by [`records_to_jsonl`]. Without a `source`
/// field the masked positions come back holding the mask token.
pub fn parse_records_jsonl(text: &str) -> Result<Vec<TrainingRecord>, DataprepError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(idx, l)| {
            let w: WireTraining = serde_json::from_str(l).map_err(|e| DataprepError::Format {
                line: idx + 1,
                message: e.to_string(),
            })?;
            let input: Vec<String> = w
                .source
                .as_deref()
                .unwrap_or(&w.input)
                .split_whitespace()
                .map(str::to_string)
                .collect();
            if let Some(&bad) = w.mask_positions.iter().find(|&&p| p >= input.len()) {
                return Err(DataprepError::Format {
                    line: idx + 1,
                    message: format!(
                        "mask position {bad} outside input of length {}",
                        input.len()
                    ),
                });
            }
            Ok(TrainingRecord {
                id: w.id,
                input,
                target: w.target.split_whitespace().map(str::to_string).collect(),
                mask_positions: w.mask_positions.into_iter().collect(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::LexiconOptions;

    fn lex() -> Lexicon {
        Lexicon::parse(
            "A  AH0\nA(1)  EY1\nCROSS  K R AO1 S\nTHE  DH AH0\nSTREET  S T R IY1 T\n",
            LexiconOptions::default(),
        )
        .unwrap()
    }

    fn rec(input: &[&str], target: &[&str]) -> TrainingRecord {
        TrainingRecord {
            id: "r".into(),
            input: input.iter().map(|s| s.to_string()).collect(),
            target: target.iter().map(|s| s.to_string()).collect(),
            mask_positions: BTreeSet::new(),
        }
    }

    #[test]
    fn builds_hyp_sep_phonemes() {
        let r = CorpusRecord::new("u", "across the street").with_hyp("a cross the");
        let t = build_training_record(&r, Some(&lex()), true, 70).unwrap();
        // 3 hyp tokens + SEP + AH0 K R AO1 S DH AH0 = 3 + 1 + 7
        assert_eq!(t.input.len(), 11);
        assert_eq!(t.sep_index(), Some(3));
        assert_eq!(t.target, vec!["across", "the", "street"]);

        let mut r10 = r.clone();
        r10.phonemes = Some((0..10).map(|i| format!("P{i}")).collect());
        assert_eq!(
            build_training_record(&r10, Some(&lex()), true, 70)
                .unwrap()
                .input
                .len(),
            14
        );
    }

    #[test]
    fn truncates_from_the_right() {
        let hyp: Vec<String> = (0..40).map(|i| format!("w{i}")).collect();
        let r = CorpusRecord::new("u", "x").with_hyp(&hyp.join(" "));
        let t = build_training_record(&r, Some(&lex()), false, 35).unwrap();
        assert_eq!(t.input, hyp[..35].to_vec());
        assert!(t.sep_index().is_none());
    }

    #[test]
    fn dangling_separator_dropped() {
        let r = CorpusRecord::new("u", "x").with_hyp("a cross the");
        let t = build_training_record(&r, Some(&lex()), true, 4).unwrap();
        assert_eq!(t.input, vec!["a", "cross", "the"]);
        let t = build_training_record(&r, Some(&lex()), true, 5).unwrap();
        assert_eq!(t.input, vec!["a", "cross", "the", SEP_TOKEN, "AH0"]);
    }

    #[test]
    fn build_errors() {
        let r = CorpusRecord::new("u", "x");
        assert!(matches!(
            build_training_record(&r, Some(&lex()), false, 35),
            Err(DataprepError::MissingHyp(_))
        ));
        let strict = lex().with_options(LexiconOptions {
            fallback: false,
            ..Default::default()
        });
        let r = CorpusRecord::new("u", "x").with_hyp("zqx");
        assert!(matches!(
            build_training_record(&r, Some(&strict), true, 70),
            Err(DataprepError::Lexicon { .. })
        ));
        assert!(build_training_record(&r, Some(&strict), false, 70).is_ok());
        assert!(matches!(
            build_training_record(&r, None, true, 70),
            Err(DataprepError::MissingLexicon(_))
        ));
        assert!(build_training_record(&r, None, false, 70).is_ok());
    }

    #[test]
    fn random_mask_count_is_floor() {
        let toks: Vec<String> = (0..20).map(|i| i.to_string()).collect();
        let t = rec(&toks.iter().map(String::as_str).collect::<Vec<_>>(), &["x"]);
        let m = mask_random(&t, 0.15, MaskScope::AllTokens, 9).unwrap();
        assert_eq!(m.mask_positions.len(), 3);
        assert_eq!(m, mask_random(&t, 0.15, MaskScope::AllTokens, 9).unwrap());
        assert!(mask_random(&t, 0.0, MaskScope::AllTokens, 9)
            .unwrap()
            .mask_positions
            .is_empty());
        assert!(mask_random(&t, 1.2, MaskScope::AllTokens, 9).is_err());
    }

    #[test]
    fn hypothesis_only_scope() {
        let t = rec(&["a", "b", SEP_TOKEN, "P", "Q", "R", "S"], &["a"]);
        let m = mask_random(&t, 1.0, MaskScope::HypothesisOnly, 1).unwrap();
        assert_eq!(m.mask_positions, BTreeSet::from([0, 1]));
        let m = mask_random(&t, 1.0, MaskScope::AllTokens, 1).unwrap();
        assert_eq!(m.mask_positions, BTreeSet::from([0, 1, 3, 4, 5, 6]));
    }

    #[test]
    fn error_focused_examples() {
        assert!(mask_error_focused(&rec(&["a", "b"], &["a", "b"]))
            .mask_positions
            .is_empty());
        let m = mask_error_focused(&rec(&["a", "b", "c"], &["a", "x", "c"]));
        assert_eq!(m.mask_positions, BTreeSet::from([1]));
        let m = mask_error_focused(&rec(&["a", "c"], &["a", "b", "c"]));
        assert!(m.mask_positions.is_empty());
        let m = mask_error_focused(&rec(
            &["a", "x", "c", SEP_TOKEN, "AH0", "X"],
            &["a", "b", "c"],
        ));
        assert_eq!(m.mask_positions, BTreeSet::from([1]));
    }

    #[test]
    fn json_export_masks_and_reimports() {
        let mut t = rec(&["a", "b", SEP_TOKEN, "AH0"], &["a", "c"]);
        t.mask_positions = BTreeSet::from([1, 3]);
        let line = record_to_json(&t, DEFAULT_MASK_TOKEN);
        assert_eq!(
            line,
            r#"{"id":"r","input":"a <mask> [SEP] <mask>","source":"a b [SEP] AH0","target":"a c","mask_positions":[1,3]}"#
        );
        let back = parse_records_jsonl(&line).unwrap();
        assert_eq!(back[0], t);
        let bare = r#"{"id":"r","input":"a <mask>","target":"a c","mask_positions":[1]}"#;
        assert_eq!(parse_records_jsonl(bare).unwrap()[0].input, ["a", "<mask>"]);
        assert_eq!(record_to_tsv(&t, "<m>"), "a <m> [SEP] <m>\ta c");
        assert!(
            parse_records_jsonl(r#"{"id":"r","input":"a","target":"a","mask_positions":[4]}"#)
                .is_err()
        );
    }

    #[test]
    fn fraction_validation() {
        let mut c = PrepConfig::default();
        assert!(c.validate().is_ok());
        c.random_fraction = 0.5;
        assert!(matches!(
            c.validate(),
            Err(DataprepError::InvalidFractions(..))
        ));
    }

    #[test]
    fn prepare_assigns_strategies() {
        let corpus: Vec<CorpusRecord> = (0..50)
            .map(|i| CorpusRecord::new(format!("u{i}"), "a b c d e f g").with_hyp("a b x d e f g"))
            .collect();
        let all_random = PrepConfig {
            random_fraction: 1.0,
            error_focused_fraction: 0.0,
            token_rate: 0.3,
            ..Default::default()
        };
        let out = prepare_corpus(&corpus, Some(&lex()), &all_random).unwrap();
        assert!(out.iter().all(|r| r.mask_positions.len() == 2));

        let none = PrepConfig {
            random_fraction: 0.0,
            error_focused_fraction: 0.0,
            ..Default::default()
        };
        let out = prepare_corpus(&corpus, Some(&lex()), &none).unwrap();
        assert!(out.iter().all(|r| r.mask_positions.is_empty()));
        assert!(out
            .iter()
            .zip(&corpus)
            .all(|(t, c)| t.target == c.reference && t.id == c.id));
    }
}
