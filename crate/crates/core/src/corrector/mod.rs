//! Hypothesis correction: a noisy-channel corrector (candidate lattice +
//! n-gram LM + beam search) and a client for external corrector processes.

pub mod decode;
pub mod external;
pub mod lattice;
pub mod lm;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use decode::{correct, ChannelPenalties, Correction, DEFAULT_BEAM};
pub use external::{external_correct, ExternalCorrector, ExternalError, DEFAULT_LINE_TIMEOUT};
pub use lattice::{generate_candidates, CandidateLattice, CandidateOptions, Edge, EdgeChannel};
pub use lm::{LanguageModel, LmError};

use crate::lexicon::Lexicon;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectorConfig {
    pub beam: usize,
    pub penalties: ChannelPenalties,
    pub candidates: CandidateOptions,
}

impl Default for CorrectorConfig {
    fn default() -> Self {
        Self {
            beam: DEFAULT_BEAM,
            penalties: ChannelPenalties::default(),
            candidates: CandidateOptions::default(),
        }
    }
}

/// Lexicon-driven candidates rescored by a language model.
pub struct NoisyChannelCorrector<'a> {
    pub lexicon: &'a Lexicon,
    pub lm: &'a LanguageModel,
    pub config: CorrectorConfig,
}

impl<'a> NoisyChannelCorrector<'a> {
    pub fn new(lexicon: &'a Lexicon, lm: &'a LanguageModel, config: CorrectorConfig) -> Self {
        Self {
            lexicon,
            lm,
            config,
        }
    }

    pub fn correct(&self, hyp: &[String]) -> Correction {
        let lattice = generate_candidates(self.lexicon, hyp, &self.config.candidates);
        correct(
            self.lm,
            &lattice,
            self.config.beam.max(1),
            &self.config.penalties,
        )
    }

    /// Corrects every hypothesis in parallel; output order matches input.
    pub fn correct_all(&self, hyps: &[Vec<String>]) -> Vec<Correction> {
        hyps.par_iter().map(|h| self.correct(h)).collect()
    }
}
