//! Minimal edit alignment with backtrace, and WER/CER reporting.

use serde::{Deserialize, Serialize};

use crate::text::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EditKind {
    Match,
    Sub,
    Del,
    Ins,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignOp {
    pub kind: EditKind,
    pub ref_index: Option<usize>,
    pub hyp_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Alignment {
    pub ops: Vec<AlignOp>,
}

impl Alignment {
    pub fn count(&self, kind: EditKind) -> usize {
        self.ops.iter().filter(|op| op.kind == kind).count()
    }

    /// Substitutions + deletions + insertions.
    pub fn cost(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| op.kind != EditKind::Match)
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlignmentError {
    #[error("error rate is undefined for an empty reference")]
    EmptyReference,
    #[error("corpus has no sentence pairs")]
    EmptyCorpus,
}

/// Plain Levenshtein distance with unit costs, O(min(m, n)) memory.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut prev: Vec<usize> = (0..=short.len()).collect();
    let mut cur = vec![0; short.len() + 1];
    for (i, x) in long.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in short.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

/// Character-level Levenshtein distance between two strings.
pub fn char_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein(&a, &b)
}

/// Minimal-cost alignment of `hyp` against `reference`.
///
/// The backtrace walks from the end and prefers Match, then Sub, then Del,
/// then Ins whenever several moves reach the optimum, so the result is
/// canonical.
pub fn align<T: PartialEq>(reference: &[T], hyp: &[T]) -> Alignment {
    let (m, n) = (reference.len(), hyp.len());
    let width = n + 1;
    let mut d = vec![0usize; (m + 1) * width];
    for i in 0..=m {
        d[i * width] = i;
    }
    for (j, cell) in d.iter_mut().enumerate().take(n + 1) {
        *cell = j;
    }
    for i in 1..=m {
        for j in 1..=n {
            let diag = d[(i - 1) * width + j - 1] + usize::from(reference[i - 1] != hyp[j - 1]);
            let up = d[(i - 1) * width + j] + 1;
            let left = d[i * width + j - 1] + 1;
            d[i * width + j] = diag.min(up).min(left);
        }
    }

    let mut ops = Vec::with_capacity(m.max(n));
    let (mut i, mut j) = (m, n);
    while i > 0 || j > 0 {
        let here = d[i * width + j];
        if i > 0 && j > 0 {
            let diag = d[(i - 1) * width + j - 1];
            if reference[i - 1] == hyp[j - 1] && diag == here {
                ops.push(op(EditKind::Match, Some(i - 1), Some(j - 1)));
                i -= 1;
                j -= 1;
                continue;
            }
            if reference[i - 1] != hyp[j - 1] && diag + 1 == here {
                ops.push(op(EditKind::Sub, Some(i - 1), Some(j - 1)));
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && d[(i - 1) * width + j] + 1 == here {
            ops.push(op(EditKind::Del, Some(i - 1), None));
            i -= 1;
        } else {
            ops.push(op(EditKind::Ins, None, Some(j - 1)));
            j -= 1;
        }
    }
    ops.reverse();
    Alignment { ops }
}

fn op(kind: EditKind, ref_index: Option<usize>, hyp_index: Option<usize>) -> AlignOp {
    AlignOp {
        kind,
        ref_index,
        hyp_index,
    }
}

/// Word-level alignment of token sequences.
pub fn align_words<S: AsRef<str>>(reference: &[S], hyp: &[S]) -> Alignment {
    let r: Vec<&str> = reference.iter().map(AsRef::as_ref).collect();
    let h: Vec<&str> = hyp.iter().map(AsRef::as_ref).collect();
    align(&r, &h)
}

/// Error counts over a reference of `n_ref` units (words or characters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WerReport {
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub n_ref: usize,
    pub wer: f64,
}

impl WerReport {
    pub fn from_alignment(alignment: &Alignment, n_ref: usize) -> Result<Self, AlignmentError> {
        Self::from_counts(
            alignment.count(EditKind::Sub),
            alignment.count(EditKind::Del),
            alignment.count(EditKind::Ins),
            n_ref,
        )
    }

    pub fn from_counts(s: usize, d: usize, i: usize, n_ref: usize) -> Result<Self, AlignmentError> {
        if n_ref == 0 {
            return Err(AlignmentError::EmptyReference);
        }
        Ok(Self {
            substitutions: s,
            deletions: d,
            insertions: i,
            n_ref,
            wer: (s + d + i) as f64 / n_ref as f64,
        })
    }

    pub fn errors(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }

    /// Micro-averaged combination of two reports.
    pub fn merge(&self, other: &WerReport) -> WerReport {
        let s = self.substitutions + other.substitutions;
        let d = self.deletions + other.deletions;
        let i = self.insertions + other.insertions;
        let n = self.n_ref + other.n_ref;
        WerReport {
            substitutions: s,
            deletions: d,
            insertions: i,
            n_ref: n,
            wer: (s + d + i) as f64 / n as f64,
        }
    }
}

pub fn wer<S: AsRef<str>>(reference: &[S], hyp: &[S]) -> Result<WerReport, AlignmentError> {
    if reference.is_empty() {
        return Err(AlignmentError::EmptyReference);
    }
    WerReport::from_alignment(&align_words(reference, hyp), reference.len())
}

/// Character error rate over the normalized, single-space-joined sentences.
pub fn cer(reference: &str, hyp: &str) -> Result<WerReport, AlignmentError> {
    let r: Vec<char> = tokenize(reference).join(" ").chars().collect();
    let h: Vec<char> = tokenize(hyp).join(" ").chars().collect();
    if r.is_empty() {
        return Err(AlignmentError::EmptyReference);
    }
    WerReport::from_alignment(&align(&r, &h), r.len())
}

/// Sums S, D, I and N over all pairs before dividing.
pub fn corpus_wer<I, S>(pairs: I) -> Result<WerReport, AlignmentError>
where
    I: IntoIterator<Item = (Vec<S>, Vec<S>)>,
    S: AsRef<str>,
{
    let mut total: Option<WerReport> = None;
    for (r, h) in pairs {
        let rep = wer(&r, &h)?;
        total = Some(match total {
            Some(t) => t.merge(&rep),
            None => rep,
        });
    }
    total.ok_or(AlignmentError::EmptyCorpus)
}

/// Corpus CER, micro-averaged like [`corpus_wer`].
pub fn corpus_cer<'a, I>(pairs: I) -> Result<WerReport, AlignmentError>
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    let mut total: Option<WerReport> = None;
    for (r, h) in pairs {
        let rep = cer(r, h)?;
        total = Some(match total {
            Some(t) => t.merge(&rep),
            None => rep,
        });
    }
    total.ok_or(AlignmentError::EmptyCorpus)
}
