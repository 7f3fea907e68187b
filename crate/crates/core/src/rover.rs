//! ROVER-style system combination: merge 1-best hypotheses into a word
//! confusion network, then vote slot by slot.
//!
//! Hypotheses are merged greedily in argument order. Each new hypothesis is
//! aligned against the network's representative token sequence (per slot,
//! the earliest-contributed real word). Substitutions and matches add a
//! candidate to the slot, deletions add epsilon, and insertions open a new
//! slot in which every previously merged system is credited with epsilon.

use serde::{Deserialize, Serialize};

use crate::alignment::{align_words, EditKind};

pub const DEFAULT_EPSILON_CONF: f64 = 0.7;
pub const DEFAULT_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RoverError {
    #[error("{tokens} tokens but {confidences} confidences")]
    LengthMismatch { tokens: usize, confidences: usize },
    #[error("confidence {0} is outside [0, 1]")]
    BadConfidence(f64),
    #[error("alpha {0} is outside [0, 1]")]
    BadAlpha(f64),
    #[error("the base hypothesis is empty")]
    EmptyBase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredHypothesis {
    tokens: Vec<String>,
    confidences: Vec<f64>,
}

impl ScoredHypothesis {
    pub fn new(tokens: Vec<String>, confidences: Vec<f64>) -> Result<Self, RoverError> {
        if tokens.len() != confidences.len() {
            return Err(RoverError::LengthMismatch {
                tokens: tokens.len(),
                confidences: confidences.len(),
            });
        }
        if let Some(&c) = confidences.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(RoverError::BadConfidence(c));
        }
        Ok(Self {
            tokens,
            confidences,
        })
    }

    /// Every token gets the same confidence.
    pub fn uniform(tokens: Vec<String>, confidence: f64) -> Result<Self, RoverError> {
        let n = tokens.len();
        Self::new(tokens, vec![confidence; n])
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn confidences(&self) -> &[f64] {
        &self.confidences
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    /// `None` is epsilon, the empty word.
    pub word: Option<String>,
    pub conf_sum: f64,
    pub count: usize,
}

impl Candidate {
    pub fn is_epsilon(&self) -> bool {
        self.word.is_none()
    }

    pub fn mean_conf(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.conf_sum / self.count as f64
        }
    }
}

/// Candidates appear in the order they were first contributed.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Slot {
    pub candidates: Vec<Candidate>,
}

impl Slot {
    fn add(&mut self, word: Option<&str>, conf: f64) -> usize {
        if let Some(i) = self
            .candidates
            .iter()
            .position(|c| c.word.as_deref() == word)
        {
            self.candidates[i].count += 1;
            self.candidates[i].conf_sum += conf;
            return i;
        }
        self.candidates.push(Candidate {
            word: word.map(str::to_string),
            conf_sum: conf,
            count: 1,
        });
        self.candidates.len() - 1
    }

    fn add_epsilon_credits(&mut self, systems: usize) -> usize {
        self.candidates.push(Candidate {
            word: None,
            conf_sum: 0.0,
            count: systems,
        });
        self.candidates.len() - 1
    }

    pub fn total_count(&self) -> usize {
        self.candidates.iter().map(|c| c.count).sum()
    }

    /// Earliest real word in the slot.
    pub fn representative(&self) -> Option<&str> {
        self.candidates.iter().find_map(|c| c.word.as_deref())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionNetwork {
    pub slots: Vec<Slot>,
    pub num_systems: usize,
    /// For each merged system, its candidate index in every slot.
    paths: Vec<Vec<usize>>,
}

impl ConfusionNetwork {
    fn from_base(base: &ScoredHypothesis) -> Result<Self, RoverError> {
        if base.tokens.is_empty() {
            return Err(RoverError::EmptyBase);
        }
        let slots = base
            .tokens
            .iter()
            .zip(&base.confidences)
            .map(|(t, &c)| Slot {
                candidates: vec![Candidate {
                    word: Some(t.clone()),
                    conf_sum: c,
                    count: 1,
                }],
            })
            .collect::<Vec<_>>();
        let n = slots.len();
        Ok(Self {
            slots,
            num_systems: 1,
            paths: vec![vec![0; n]],
        })
    }

    /// Representative token per slot, used as the alignment target.
    pub fn representative_tokens(&self) -> Vec<&str> {
        self.slots
            .iter()
            .map(|s| s.representative().unwrap_or(""))
            .collect()
    }

    fn merge(&mut self, hyp: &ScoredHypothesis) {
        let reps: Vec<String> = self
            .representative_tokens()
            .into_iter()
            .map(str::to_string)
            .collect();
        let alignment = align_words(&reps, &hyp.tokens);
        let prior_systems = self.num_systems;
        let mut new_path = Vec::with_capacity(self.slots.len());
        let mut inserted = 0usize;
        for op in &alignment.ops {
            match op.kind {
                EditKind::Match | EditKind::Sub => {
                    let slot = op.ref_index.expect("match/sub has ref index") + inserted;
                    let h = op.hyp_index.expect("match/sub has hyp index");
                    let idx = self.slots[slot].add(Some(&hyp.tokens[h]), hyp.confidences[h]);
                    new_path.push(idx);
                }
                EditKind::Del => {
                    let slot = op.ref_index.expect("del has ref index") + inserted;
                    let idx = self.slots[slot].add(None, 0.0);
                    new_path.push(idx);
                }
                EditKind::Ins => {
                    let h = op.hyp_index.expect("ins has hyp index");
                    let at = new_path.len();
                    let mut slot = Slot::default();
                    let eps = slot.add_epsilon_credits(prior_systems);
                    let idx = slot.add(Some(&hyp.tokens[h]), hyp.confidences[h]);
                    self.slots.insert(at, slot);
                    for p in &mut self.paths {
                        p.insert(at, eps);
                    }
                    new_path.push(idx);
                    inserted += 1;
                }
            }
        }
        self.paths.push(new_path);
        self.num_systems += 1;
    }

    /// Tokens of merged system `system` read back off the network.
    pub fn path_tokens(&self, system: usize) -> Option<Vec<String>> {
        let path = self.paths.get(system)?;
        Some(
            path.iter()
                .zip(&self.slots)
                .filter_map(|(&i, s)| s.candidates[i].word.clone())
                .collect(),
        )
    }
}

/// Network from `base` followed by each of `others` in order.
pub fn build_confusion_network(
    base: &ScoredHypothesis,
    others: &[ScoredHypothesis],
) -> Result<ConfusionNetwork, RoverError> {
    let mut cn = ConfusionNetwork::from_base(base)?;
    for h in others {
        cn.merge(h);
    }
    Ok(cn)
}

/// Per slot, scores each candidate as
/// `alpha * count / num_systems + (1 - alpha) * conf`, where `conf` is the
/// mean confidence of a word or `epsilon_conf` for the empty word, and
/// emits the argmax. Ties go to the earliest-contributed candidate.
pub fn vote(
    cn: &ConfusionNetwork,
    alpha: f64,
    epsilon_conf: f64,
) -> Result<Vec<String>, RoverError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(RoverError::BadAlpha(alpha));
    }
    if !(0.0..=1.0).contains(&epsilon_conf) {
        return Err(RoverError::BadConfidence(epsilon_conf));
    }
    let n = cn.num_systems as f64;
    let mut out = Vec::new();
    for slot in &cn.slots {
        let mut best: Option<(&Candidate, f64)> = None;
        for c in &slot.candidates {
            let conf = if c.is_epsilon() {
                epsilon_conf
            } else {
                c.mean_conf()
            };
            let score = alpha * (c.count as f64 / n) + (1.0 - alpha) * conf;
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((c, score));
            }
        }
        if let Some((Candidate { word: Some(w), .. }, _)) = best {
            out.push(w.clone());
        }
    }
    Ok(out)
}

/// Votes over any number of systems; the first one is the base.
pub fn combine_all(
    systems: &[ScoredHypothesis],
    alpha: f64,
    epsilon_conf: f64,
) -> Result<Vec<String>, RoverError> {
    let (base, others) = systems.split_first().ok_or(RoverError::EmptyBase)?;
    vote(&build_confusion_network(base, others)?, alpha, epsilon_conf)
}

/// Combines an ASR hypothesis with a corrected one; ASR is the base system.
pub fn combine(
    asr: &ScoredHypothesis,
    corrected: &ScoredHypothesis,
    alpha: f64,
    epsilon_conf: f64,
) -> Result<Vec<String>, RoverError> {
    let cn = build_confusion_network(asr, std::slice::from_ref(corrected))?;
    vote(&cn, alpha, epsilon_conf)
}
