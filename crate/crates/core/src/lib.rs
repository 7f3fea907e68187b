//! Post-editing toolkit for speech recognizer output: pronunciation
//! lexicon, synthetic error generation, training-data preparation,
//! alignment and error rates, system combination, hypothesis correction
//! and GLEU scoring.

pub mod alignment;
pub mod corpus;
pub mod corrector;
pub mod dataprep;
pub mod fixtures;
pub mod gleu;
pub mod lexicon;
pub mod rover;
pub mod seed;
pub mod synthesis;
pub mod text;
