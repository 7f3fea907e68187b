//! Corpus-level GLEU for grammatical error correction, single reference.
//!
//! Per order n, a hypothesis n-gram earns credit for matching the reference
//! and loses credit for matching an n-gram that appears in the source but
//! not in the reference. Each sentence's net count is floored at zero
//! before summing; precision divides by the total hypothesis n-grams.
//! Orders with no hypothesis n-grams anywhere in the corpus are left out
//! of the geometric mean.

use std::collections::HashMap;

use serde::Serialize;

pub const DEFAULT_N_MAX: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GleuError {
    #[error(
        "source, reference and hypothesis counts differ ({sources}, {references}, {hypotheses})"
    )]
    LengthMismatch {
        sources: usize,
        references: usize,
        hypotheses: usize,
    },
    #[error("hypothesis corpus is empty")]
    Empty,
    #[error("n_max must be at least 1")]
    ZeroOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GleuReport {
    pub score: f64,
    /// Precision per order, index 0 is unigrams. `None` where the corpus
    /// has no hypothesis n-grams of that order.
    pub precisions: Vec<Option<f64>>,
    pub brevity_penalty: f64,
    pub n_max: usize,
    pub hyp_len: usize,
    pub ref_len: usize,
}

fn ngram_counts<'t, 'a>(tokens: &'t [&'a str], n: usize) -> HashMap<&'t [&'a str], usize> {
    let mut m = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *m.entry(w).or_insert(0) += 1;
        }
    }
    m
}

/// Net credited matches and total n-grams for one sentence at order `n`.
fn sentence_stats(src: &[&str], reference: &[&str], hyp: &[&str], n: usize) -> (usize, usize) {
    let h = ngram_counts(hyp, n);
    let r = ngram_counts(reference, n);
    let s = ngram_counts(src, n);
    let mut credit = 0usize;
    let mut penalty = 0usize;
    for (g, &hc) in &h {
        if let Some(&rc) = r.get(g) {
            credit += hc.min(rc);
        } else if let Some(&sc) = s.get(g) {
            penalty += hc.min(sc);
        }
    }
    let total = if hyp.len() >= n { hyp.len() - n + 1 } else { 0 };
    (credit.saturating_sub(penalty), total)
}

pub fn gleu<S: AsRef<str>>(
    sources: &[S],
    references: &[S],
    hypotheses: &[S],
    n_max: usize,
) -> Result<GleuReport, GleuError> {
    if n_max == 0 {
        return Err(GleuError::ZeroOrder);
    }
    if sources.len() != references.len() || references.len() != hypotheses.len() {
        return Err(GleuError::LengthMismatch {
            sources: sources.len(),
            references: references.len(),
            hypotheses: hypotheses.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(GleuError::Empty);
    }

    let mut num = vec![0usize; n_max];
    let mut den = vec![0usize; n_max];
    let (mut hyp_len, mut ref_len) = (0usize, 0usize);
    for ((s, r), h) in sources.iter().zip(references).zip(hypotheses) {
        let s: Vec<&str> = s.as_ref().split_whitespace().collect();
        let r: Vec<&str> = r.as_ref().split_whitespace().collect();
        let h: Vec<&str> = h.as_ref().split_whitespace().collect();
        hyp_len += h.len();
        ref_len += r.len();
        for n in 1..=n_max {
            let (c, t) = sentence_stats(&s, &r, &h, n);
            num[n - 1] += c;
            den[n - 1] += t;
        }
    }

    let precisions: Vec<Option<f64>> = num
        .iter()
        .zip(&den)
        .map(|(&c, &t)| (t > 0).then(|| c as f64 / t as f64))
        .collect();
    let brevity_penalty = if hyp_len == 0 {
        0.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp().min(1.0)
    };
    let defined: Vec<f64> = precisions.iter().flatten().copied().collect();
    let score = if defined.is_empty() || defined.contains(&0.0) {
        0.0
    } else {
        let mean_log = defined.iter().map(|p| p.ln()).sum::<f64>() / defined.len() as f64;
        (brevity_penalty * mean_log.exp()).clamp(0.0, 1.0)
    };
    Ok(GleuReport {
        score,
        precisions,
        brevity_penalty,
        n_max,
        hyp_len,
        ref_len,
    })
}
