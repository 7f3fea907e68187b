//! Pronouncing-dictionary lexicon with grapheme-to-phoneme lookup and a
//! homophone index.
//!
//! Input is the CMU dictionary text layout: one `WORD  PH PH ...` entry per
//! line, alternate pronunciations as `WORD(1)`, `WORD(2)`, and `;;;` comment
//! lines. Words are case-folded on load, so every query is case-insensitive.

mod fallback;
mod phoneme;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

pub use fallback::letter_to_sound;
pub use phoneme::{is_vowel, phoneme_key, Phoneme, PhonemeError, Pronunciation, VOWELS};

use crate::alignment::levenshtein;
use crate::text::normalize_token;

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("lexicon has no entries")]
    Empty,
    #[error("token `{0}` is empty after normalization")]
    EmptyWord(String),
    #[error("out-of-vocabulary word `{0}`")]
    Oov(String),
    #[error("cannot build a phoneme sequence from an empty token list")]
    EmptyInput,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LexiconOptions {
    /// Key the homophone index on stressed phonemes instead of bare symbols.
    pub strict_stress: bool,
    /// Use letter-to-sound rules for words missing from the dictionary.
    pub fallback: bool,
}

impl Default for LexiconOptions {
    fn default() -> Self {
        Self {
            strict_stress: false,
            fallback: true,
        }
    }
}

/// Immutable after construction; all lookups take `&self`.
#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<Pronunciation>>,
    homophone_index: BTreeMap<String, BTreeSet<String>>,
    options: LexiconOptions,
}

impl Lexicon {
    pub fn parse(source: &str, options: LexiconOptions) -> Result<Self, LexiconError> {
        let mut entries: BTreeMap<String, Vec<Pronunciation>> = BTreeMap::new();
        for (idx, raw) in source.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            // Newer dictionary releases append `# comment` to some entries.
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() || line.starts_with(";;;") {
                continue;
            }
            let mut fields = line.split_whitespace();
            let head = fields.next().unwrap_or_default();
            let word = base_word(head).map_err(|message| LexiconError::Parse {
                line: line_no,
                message,
            })?;
            let phones = fields
                .map(str::parse::<Phoneme>)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| LexiconError::Parse {
                    line: line_no,
                    message: e.to_string(),
                })?;
            let pron = Pronunciation::new(phones).ok_or_else(|| LexiconError::Parse {
                line: line_no,
                message: format!("entry `{head}` has no phonemes"),
            })?;
            entries.entry(word).or_default().push(pron);
        }
        if entries.is_empty() {
            return Err(LexiconError::Empty);
        }
        Ok(Self::from_entries(entries, options))
    }

    pub fn from_reader<R: Read>(
        mut reader: R,
        options: LexiconOptions,
    ) -> Result<Self, LexiconError> {
        let mut buf = String::new();
        reader.read_to_string(&mut buf)?;
        Self::parse(&buf, options)
    }

    pub fn load(path: impl AsRef<Path>, options: LexiconOptions) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, options)
    }

    fn from_entries(
        entries: BTreeMap<String, Vec<Pronunciation>>,
        options: LexiconOptions,
    ) -> Self {
        let mut homophone_index: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (word, prons) in &entries {
            for p in prons {
                homophone_index
                    .entry(p.key(options.strict_stress))
                    .or_default()
                    .insert(word.clone());
            }
        }
        Self {
            entries,
            homophone_index,
            options,
        }
    }

    pub fn options(&self) -> LexiconOptions {
        self.options
    }

    /// Same entries, different lookup options. The index is rebuilt when
    /// the stress mode changes.
    pub fn with_options(&self, options: LexiconOptions) -> Self {
        if options.strict_stress == self.options.strict_stress {
            Self {
                options,
                ..self.clone()
            }
        } else {
            Self::from_entries(self.entries.clone(), options)
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(&normalize_token(word))
    }

    /// Stored variants for an in-vocabulary word, in file order.
    pub fn pronunciations(&self, word: &str) -> Option<&[Pronunciation]> {
        self.entries.get(&normalize_token(word)).map(Vec::as_slice)
    }

    pub fn key(&self, pron: &Pronunciation) -> String {
        pron.key(self.options.strict_stress)
    }

    /// Words whose index key equals `key`.
    pub fn words_with_key(&self, key: &str) -> Option<&BTreeSet<String>> {
        self.homophone_index.get(key)
    }

    pub fn homophone_index(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.homophone_index
    }

    /// All variants for in-vocabulary words; a single rule-based
    /// pronunciation otherwise (unless fallback is disabled).
    pub fn g2p_word(&self, word: &str) -> Result<Vec<Pronunciation>, LexiconError> {
        let norm = normalize_token(word);
        if norm.is_empty() {
            return Err(LexiconError::EmptyWord(word.to_string()));
        }
        if let Some(prons) = self.entries.get(&norm) {
            return Ok(prons.clone());
        }
        if !self.options.fallback {
            return Err(LexiconError::Oov(norm));
        }
        letter_to_sound(&norm)
            .map(|p| vec![p])
            .ok_or(LexiconError::Oov(norm))
    }

    /// First-variant pronunciation of a single token.
    pub fn g2p_first(&self, word: &str) -> Result<Pronunciation, LexiconError> {
        Ok(self.g2p_word(word)?.swap_remove(0))
    }

    /// Concatenated first-variant phonemes; no word-boundary markers.
    pub fn g2p_sequence<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Vec<Phoneme>, LexiconError> {
        if tokens.is_empty() {
            return Err(LexiconError::EmptyInput);
        }
        let mut out = Vec::new();
        for t in tokens {
            let p = self.g2p_first(t.as_ref())?;
            out.extend(p.phonemes().iter().cloned());
        }
        Ok(out)
    }

    /// Other in-vocabulary words sharing at least one pronunciation key
    /// with `word`, sorted.
    pub fn homophones(&self, word: &str) -> Result<Vec<String>, LexiconError> {
        let norm = normalize_token(word);
        let prons = self
            .entries
            .get(&norm)
            .ok_or_else(|| LexiconError::Oov(norm.clone()))?;
        Ok(self.same_sounding(&norm, prons).into_iter().collect())
    }

    /// Words sharing a key with any of `prons`, excluding `word` itself.
    /// Works for OOV tokens given their fallback pronunciation.
    pub fn same_sounding(&self, word: &str, prons: &[Pronunciation]) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for p in prons {
            if let Some(ws) = self.homophone_index.get(&self.key(p)) {
                out.extend(ws.iter().filter(|w| w.as_str() != word).cloned());
            }
        }
        out
    }

    /// Words whose pronunciation is within `max_phone_edits` phoneme edits
    /// of any of `prons` (stress-insensitive), excluding `word`.
    /// Linear in the number of distinct pronunciations.
    pub fn near_sounding(
        &self,
        word: &str,
        prons: &[Pronunciation],
        max_phone_edits: usize,
    ) -> BTreeSet<String> {
        let targets: Vec<Vec<&str>> = prons
            .iter()
            .map(|p| p.phonemes().iter().map(Phoneme::symbol).collect())
            .collect();
        let mut out = BTreeSet::new();
        for (key, ws) in &self.homophone_index {
            let phones: Vec<&str> = key
                .split(' ')
                .map(|s| s.trim_end_matches(|c: char| c.is_ascii_digit()))
                .collect();
            let close = targets.iter().any(|t| {
                t.len().abs_diff(phones.len()) <= max_phone_edits
                    && levenshtein(t, &phones) <= max_phone_edits
            });
            if close {
                out.extend(ws.iter().filter(|w| w.as_str() != word).cloned());
            }
        }
        out
    }

    /// Deterministic dump in dictionary layout, used to compare lexicons.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        for (word, prons) in &self.entries {
            for (i, p) in prons.iter().enumerate() {
                let head = word.to_uppercase();
                if i == 0 {
                    let _ = writeln!(out, "{head}  {p}");
                } else {
                    let _ = writeln!(out, "{head}({i})  {p}");
                }
            }
        }
        out
    }
}

/// Strips a `(n)` variant marker and case-folds.
fn base_word(head: &str) -> Result<String, String> {
    let word = match head.find('(') {
        Some(open) if open > 0 && head.ends_with(')') => {
            let digits = &head[open + 1..head.len() - 1];
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(format!("unparsable variant marker in `{head}`"));
            }
            &head[..open]
        }
        Some(open) if open > 0 => {
            return Err(format!("unterminated variant marker in `{head}`"));
        }
        _ if head.ends_with(')') && !head.starts_with('(') => {
            return Err(format!("unparsable variant marker in `{head}`"));
        }
        _ => head,
    };
    Ok(word.to_lowercase())
}
