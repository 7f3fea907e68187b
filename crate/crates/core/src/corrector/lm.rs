//! Add-k smoothed n-gram language model over a closed vocabulary.
//!
//! Outcomes for every context are the training vocabulary plus `<unk>` and
//! `</s>`; contexts are padded with `<s>`. Only the highest-order counts are
//! stored, so the persisted form is a sorted `ngram<TAB>count` list.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::text::tokenize;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";
pub const DEFAULT_ORDER: usize = 2;
pub const DEFAULT_K: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LmError {
    #[error("language model corpus is empty")]
    EmptyCorpus,
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("smoothing constant must be positive, got {0}")]
    BadSmoothing(f64),
    #[error("model file line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageModel {
    order: usize,
    k: f64,
    vocab: BTreeSet<String>,
    ngrams: BTreeMap<Vec<String>, u64>,
    contexts: BTreeMap<Vec<String>, u64>,
}

impl LanguageModel {
    /// Counts n-grams over normalized, whitespace-tokenized sentences.
    pub fn train<S: AsRef<str>>(sentences: &[S], order: usize, k: f64) -> Result<Self, LmError> {
        let tokenized: Vec<Vec<String>> = sentences
            .iter()
            .map(|s| tokenize(s.as_ref()))
            .filter(|t| !t.is_empty())
            .collect();
        Self::train_tokens(&tokenized, order, k)
    }

    pub fn train_tokens(sentences: &[Vec<String>], order: usize, k: f64) -> Result<Self, LmError> {
        check_params(order, k)?;
        if sentences.iter().all(Vec::is_empty) {
            return Err(LmError::EmptyCorpus);
        }
        let mut ngrams: BTreeMap<Vec<String>, u64> = BTreeMap::new();
        for sent in sentences.iter().filter(|s| !s.is_empty()) {
            let mut padded: Vec<String> = vec![BOS.to_string(); order - 1];
            padded.extend(sent.iter().cloned());
            padded.push(EOS.to_string());
            for gram in padded.windows(order) {
                *ngrams.entry(gram.to_vec()).or_default() += 1;
            }
        }
        Ok(Self::from_counts(order, k, ngrams))
    }

    fn from_counts(order: usize, k: f64, ngrams: BTreeMap<Vec<String>, u64>) -> Self {
        let mut vocab = BTreeSet::new();
        let mut contexts: BTreeMap<Vec<String>, u64> = BTreeMap::new();
        for (gram, &c) in &ngrams {
            for w in gram {
                if w != BOS && w != EOS {
                    vocab.insert(w.clone());
                }
            }
            *contexts.entry(gram[..order - 1].to_vec()).or_default() += c;
        }
        Self {
            order,
            k,
            vocab,
            ngrams,
            contexts,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn vocab(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    /// Size of the outcome set: vocabulary plus `<unk>` and `</s>`.
    pub fn outcome_count(&self) -> usize {
        self.vocab.len() + 2
    }

    /// Maps out-of-vocabulary words to `<unk>`.
    pub fn map_word<'a>(&self, w: &'a str) -> &'a str {
        if w == EOS || w == BOS || self.vocab.contains(w) {
            w
        } else {
            UNK
        }
    }

    /// P(word | context). Only the last `order - 1` context words matter;
    /// shorter contexts are left-padded with `<s>`.
    pub fn prob(&self, context: &[&str], word: &str) -> f64 {
        let ctx = self.context_key(context);
        let c_ctx = self.contexts.get(&ctx).copied().unwrap_or(0) as f64;
        let mut gram = ctx;
        gram.push(self.map_word(word).to_string());
        let c = self.ngrams.get(&gram).copied().unwrap_or(0) as f64;
        (c + self.k) / (c_ctx + self.k * self.outcome_count() as f64)
    }

    pub fn log_prob(&self, context: &[&str], word: &str) -> f64 {
        self.prob(context, word).ln()
    }

    fn context_key(&self, context: &[&str]) -> Vec<String> {
        let need = self.order - 1;
        let mut key: Vec<String> = Vec::with_capacity(need);
        let tail = &context[context.len().saturating_sub(need)..];
        for _ in tail.len()..need {
            key.push(BOS.to_string());
        }
        key.extend(tail.iter().map(|w| self.map_word(w).to_string()));
        key
    }

    /// Natural-log probability of a whole sentence including `</s>`.
    pub fn sentence_log_prob<S: AsRef<str>>(&self, tokens: &[S]) -> f64 {
        let words: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
        let mut total = 0.0;
        for i in 0..words.len() {
            total += self.log_prob(&words[..i], words[i]);
        }
        total + self.log_prob(&words, EOS)
    }

    /// Contexts seen in training.
    pub fn observed_contexts(&self) -> impl Iterator<Item = &[String]> {
        self.contexts.keys().map(Vec::as_slice)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# order\t{}", self.order);
        let _ = writeln!(out, "# k\t{}", self.k);
        for (gram, c) in &self.ngrams {
            let _ = writeln!(out, "{}\t{}", gram.join(" "), c);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, LmError> {
        let mut order = None;
        let mut k = None;
        let mut ngrams = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let fmt_err = |message: String| LmError::Format {
                line: idx + 1,
                message,
            };
            if line.trim().is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# ") {
                let (key, value) = rest
                    .split_once('\t')
                    .ok_or_else(|| fmt_err("bad header".into()))?;
                match key {
                    "order" => {
                        order = Some(value.parse::<usize>().map_err(|e| fmt_err(e.to_string()))?)
                    }
                    "k" => k = Some(value.parse::<f64>().map_err(|e| fmt_err(e.to_string()))?),
                    other => return Err(fmt_err(format!("unknown header `{other}`"))),
                }
                continue;
            }
            let n = order.ok_or_else(|| fmt_err("n-gram before `# order` header".into()))?;
            let (gram, count) = line
                .split_once('\t')
                .ok_or_else(|| fmt_err("expected `ngram<TAB>count`".into()))?;
            let gram: Vec<String> = gram.split(' ').map(str::to_string).collect();
            if gram.len() != n {
                return Err(fmt_err(format!("expected {n} words, found {}", gram.len())));
            }
            let count: u64 = count
                .parse()
                .map_err(|e: std::num::ParseIntError| fmt_err(e.to_string()))?;
            ngrams.insert(gram, count);
        }
        let order = order.ok_or(LmError::Format {
            line: 0,
            message: "missing `# order` header".into(),
        })?;
        let k = k.ok_or(LmError::Format {
            line: 0,
            message: "missing `# k` header".into(),
        })?;
        check_params(order, k)?;
        if ngrams.is_empty() {
            return Err(LmError::EmptyCorpus);
        }
        Ok(Self::from_counts(order, k, ngrams))
    }
}

fn check_params(order: usize, k: f64) -> Result<(), LmError> {
    if order == 0 {
        return Err(LmError::ZeroOrder);
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(LmError::BadSmoothing(k));
    }
    Ok(())
}
