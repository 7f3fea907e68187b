//! Left-to-right beam search over a candidate lattice, scoring paths by
//! language-model log probability plus a log-space penalty per edge.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::lattice::{CandidateLattice, EdgeChannel};
use super::lm::{LanguageModel, EOS};

pub const DEFAULT_BEAM: usize = 10;

/// Log-space scores added once per edge taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelPenalties {
    pub keep: f64,
    pub homophone: f64,
    pub merge: f64,
    pub split: f64,
}

impl Default for ChannelPenalties {
    fn default() -> Self {
        Self {
            keep: 0.0,
            homophone: -1.0,
            merge: -1.5,
            split: -1.5,
        }
    }
}

impl ChannelPenalties {
    pub fn of(&self, channel: EdgeChannel) -> f64 {
        match channel {
            EdgeChannel::Keep => self.keep,
            EdgeChannel::Homophone => self.homophone,
            EdgeChannel::Merge => self.merge,
            EdgeChannel::Split => self.split,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correction {
    pub tokens: Vec<String>,
    /// LM log probability plus channel penalties of the chosen path.
    pub score: f64,
    /// Score of the unchanged hypothesis.
    pub identity_score: f64,
    /// Non-Keep edges on the chosen path.
    pub edits: usize,
}

#[derive(Debug, Clone)]
struct Partial {
    tokens: Vec<String>,
    score: f64,
    edits: usize,
    identity: bool,
}

fn rank(a: &Partial, b: &Partial) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.edits.cmp(&b.edits))
        .then_with(|| a.tokens.cmp(&b.tokens))
}

fn lm_state(p: &Partial, order: usize) -> &[String] {
    let need = order.saturating_sub(1);
    &p.tokens[p.tokens.len().saturating_sub(need)..]
}

/// Keeps the best partial per LM state, then the top `beam`, plus the
/// identity partial wherever it ranks.
fn prune(partials: Vec<Partial>, beam: usize, order: usize) -> Vec<Partial> {
    let mut identity = None;
    let mut best: HashMap<(usize, Vec<String>), Partial> = HashMap::new();
    for p in partials {
        if p.identity {
            identity = Some(p.clone());
        }
        let key = (p.tokens.len().min(order), lm_state(&p, order).to_vec());
        match best.get(&key) {
            Some(q) if rank(q, &p) != Ordering::Greater => {}
            _ => {
                best.insert(key, p);
            }
        }
    }
    let mut kept: Vec<Partial> = best.into_values().collect();
    kept.sort_by(rank);
    kept.truncate(beam.max(1));
    if let Some(id) = identity {
        if !kept.iter().any(|p| p.identity) {
            kept.push(id);
        }
    }
    kept
}

fn extend(lm: &LanguageModel, p: &Partial, words: &[String]) -> (Vec<String>, f64) {
    let mut tokens = p.tokens.clone();
    let mut delta = 0.0;
    for w in words {
        let ctx: Vec<&str> = tokens.iter().map(String::as_str).collect();
        delta += lm.log_prob(&ctx, w);
        tokens.push(w.clone());
    }
    (tokens, delta)
}

/// Best full path through `lattice`. The identity path is never pruned,
/// so the result scores at least as well as leaving the hypothesis alone.
pub fn correct(
    lm: &LanguageModel,
    lattice: &CandidateLattice,
    beam: usize,
    penalties: &ChannelPenalties,
) -> Correction {
    let n = lattice.len();
    let mut beams: Vec<Vec<Partial>> = vec![Vec::new(); n + 1];
    beams[0].push(Partial {
        tokens: Vec::new(),
        score: 0.0,
        edits: 0,
        identity: true,
    });
    for pos in 0..n {
        let current = prune(std::mem::take(&mut beams[pos]), beam, lm.order());
        for p in &current {
            for e in lattice.edges_from(pos) {
                let (tokens, delta) = extend(lm, p, &e.replacement);
                let is_keep = e.channel == EdgeChannel::Keep;
                beams[e.end()].push(Partial {
                    tokens,
                    score: p.score + delta + penalties.of(e.channel),
                    edits: p.edits + usize::from(!is_keep),
                    identity: p.identity && is_keep,
                });
            }
        }
    }

    let mut finals: Vec<Partial> = std::mem::take(&mut beams[n])
        .into_iter()
        .map(|mut p| {
            let ctx: Vec<&str> = p.tokens.iter().map(String::as_str).collect();
            p.score += lm.log_prob(&ctx, EOS);
            p
        })
        .collect();
    finals.sort_by(rank);
    let identity_score = finals
        .iter()
        .find(|p| p.identity)
        .map(|p| p.score)
        .unwrap_or_else(|| lm.sentence_log_prob(&lattice.hyp));
    let best = finals
        .into_iter()
        .next()
        .expect("identity path always reaches the end");
    Correction {
        tokens: best.tokens,
        score: best.score,
        identity_score,
        edits: best.edits,
    }
}
