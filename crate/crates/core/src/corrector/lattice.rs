//! Candidate generation over a hypothesis: keep each token, swap it for a
//! same-sounding word, merge two tokens into one word, or split one token
//! into two words.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::alignment::char_distance;
use crate::lexicon::{Lexicon, Pronunciation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeChannel {
    Keep,
    Homophone,
    Merge,
    Split,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub start: usize,
    /// Number of hypothesis tokens consumed.
    pub len: usize,
    pub replacement: Vec<String>,
    pub channel: EdgeChannel,
}

impl Edge {
    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

/// Edges grouped by start position. Position `i` always has a Keep edge,
/// so the identity path exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateLattice {
    pub hyp: Vec<String>,
    pub edges: Vec<Vec<Edge>>,
}

impl CandidateLattice {
    /// Lattice with only Keep edges.
    pub fn identity(hyp: &[String]) -> Self {
        let edges = hyp
            .iter()
            .enumerate()
            .map(|(i, t)| vec![keep(i, t)])
            .collect();
        Self {
            hyp: hyp.to_vec(),
            edges,
        }
    }

    pub fn len(&self) -> usize {
        self.hyp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyp.is_empty()
    }

    pub fn edges_from(&self, pos: usize) -> &[Edge] {
        &self.edges[pos]
    }

    pub fn all_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().flatten()
    }
}

fn keep(i: usize, t: &str) -> Edge {
    Edge {
        start: i,
        len: 1,
        replacement: vec![t.to_string()],
        channel: EdgeChannel::Keep,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateOptions {
    /// Also propose words one phoneme away whose spelling is within
    /// `max_edit` characters.
    pub sound_alikes: bool,
    pub max_edit: usize,
    pub merges: bool,
    pub splits: bool,
}

impl Default for CandidateOptions {
    fn default() -> Self {
        Self {
            sound_alikes: false,
            max_edit: 2,
            merges: true,
            splits: true,
        }
    }
}

pub fn generate_candidates(
    lex: &Lexicon,
    hyp: &[String],
    opts: &CandidateOptions,
) -> CandidateLattice {
    let mut lattice = CandidateLattice::identity(hyp);
    let prons: Vec<Option<Vec<Pronunciation>>> = hyp.iter().map(|t| lex.g2p_word(t).ok()).collect();

    for (i, token) in hyp.iter().enumerate() {
        let Some(ps) = &prons[i] else { continue };
        let mut subs = lex.same_sounding(token, ps);
        if opts.sound_alikes {
            subs.extend(
                lex.near_sounding(token, ps, 1)
                    .into_iter()
                    .filter(|w| char_distance(token, w) <= opts.max_edit),
            );
        }
        for w in subs {
            lattice.edges[i].push(Edge {
                start: i,
                len: 1,
                replacement: vec![w],
                channel: EdgeChannel::Homophone,
            });
        }

        if opts.merges && i + 1 < hyp.len() {
            if let (Some(a), Some(b)) = (&prons[i], &prons[i + 1]) {
                let joined = a[0].concat(&b[0]);
                if let Some(ws) = lex.words_with_key(&lex.key(&joined)) {
                    for w in ws {
                        lattice.edges[i].push(Edge {
                            start: i,
                            len: 2,
                            replacement: vec![w.clone()],
                            channel: EdgeChannel::Merge,
                        });
                    }
                }
            }
        }

        if opts.splits {
            for (left, right) in split_candidates(lex, ps) {
                lattice.edges[i].push(Edge {
                    start: i,
                    len: 1,
                    replacement: vec![left, right],
                    channel: EdgeChannel::Split,
                });
            }
        }
    }
    lattice
}

/// Pairs of in-vocabulary words whose keys concatenate to one of `prons`.
/// Binary splits only; each split point is two index lookups.
fn split_candidates(lex: &Lexicon, prons: &[Pronunciation]) -> BTreeSet<(String, String)> {
    let mut out = BTreeSet::new();
    for p in prons {
        let phones = p.phonemes();
        for cut in 1..phones.len() {
            let left = lex.key(&Pronunciation::new(phones[..cut].to_vec()).expect("nonempty"));
            let Some(lw) = lex.words_with_key(&left) else {
                continue;
            };
            let right = lex.key(&Pronunciation::new(phones[cut..].to_vec()).expect("nonempty"));
            let Some(rw) = lex.words_with_key(&right) else {
                continue;
            };
            for l in lw {
                for r in rw {
                    out.insert((l.clone(), r.clone()));
                }
            }
        }
    }
    out
}
