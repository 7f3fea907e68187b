//! Pipeline configuration: a TOML file whose values command-line flags
//! override. Every field has a default, so an empty file is valid.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use postedit_core::corrector::lm::{DEFAULT_K, DEFAULT_ORDER};
use postedit_core::corrector::{ChannelPenalties, DEFAULT_BEAM};
use postedit_core::dataprep::{DEFAULT_MASK_TOKEN, DEFAULT_TOKEN_RATE};
use postedit_core::gleu::DEFAULT_N_MAX;
use postedit_core::rover::{DEFAULT_ALPHA, DEFAULT_EPSILON_CONF};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub lexicon: Option<PathBuf>,
    pub seed: u64,
    pub g2p: G2pConfig,
    pub synth: SynthConfig,
    pub gec: GecConfig,
    pub prep: PrepSection,
    pub corrector: CorrectorSection,
    pub rover: RoverSection,
    pub gleu: GleuSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct G2pConfig {
    pub strict_stress: bool,
    pub fallback: bool,
}

impl Default for G2pConfig {
    fn default() -> Self {
        Self {
            strict_stress: false,
            fallback: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub p_replace: f64,
    pub max_edit: usize,
    pub near_pronunciation: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            p_replace: 0.5,
            max_edit: 2,
            near_pronunciation: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GecConfig {
    pub p_replace: f64,
}

impl Default for GecConfig {
    fn default() -> Self {
        Self { p_replace: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrepSection {
    pub with_phonemes: bool,
    /// Defaults to 35 tokens, or 70 with phonemes.
    pub max_len: Option<usize>,
    pub token_rate: f64,
    pub random_fraction: f64,
    pub error_focused_fraction: f64,
    pub mask_token: String,
    pub hypothesis_only: bool,
}

impl Default for PrepSection {
    fn default() -> Self {
        Self {
            with_phonemes: false,
            max_len: None,
            token_rate: DEFAULT_TOKEN_RATE,
            random_fraction: 0.4,
            error_focused_fraction: 0.6,
            mask_token: DEFAULT_MASK_TOKEN.to_string(),
            hypothesis_only: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrectorSection {
    pub beam: usize,
    pub order: usize,
    pub k: f64,
    pub penalties: ChannelPenalties,
    pub sound_alikes: bool,
    pub max_edit: usize,
    pub merges: bool,
    pub splits: bool,
    pub timeout_secs: f64,
}

impl Default for CorrectorSection {
    fn default() -> Self {
        Self {
            beam: DEFAULT_BEAM,
            order: DEFAULT_ORDER,
            k: DEFAULT_K,
            penalties: ChannelPenalties::default(),
            sound_alikes: false,
            max_edit: 2,
            merges: true,
            splits: true,
            timeout_secs: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoverSection {
    pub alpha: f64,
    pub epsilon_conf: f64,
    /// Confidence for every token of a system whose file has none, one
    /// value per system in argument order. Missing entries mean 1.0.
    pub system_conf: Vec<f64>,
}

impl Default for RoverSection {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            epsilon_conf: DEFAULT_EPSILON_CONF,
            system_conf: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GleuSection {
    pub n_max: usize,
}

impl Default for GleuSection {
    fn default() -> Self {
        Self {
            n_max: DEFAULT_N_MAX,
        }
    }
}

fn unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(CliError::validation(format!(
            "{name} = {v} is outside [0, 1]"
        )))
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
            .map_err(|e| CliError::validation(format!("{}: {}", path.display(), e.message)))
    }

    pub fn validate(&self) -> Result<()> {
        unit("synth.p_replace", self.synth.p_replace)?;
        unit("gec.p_replace", self.gec.p_replace)?;
        unit("prep.token_rate", self.prep.token_rate)?;
        unit("prep.random_fraction", self.prep.random_fraction)?;
        unit(
            "prep.error_focused_fraction",
            self.prep.error_focused_fraction,
        )?;
        if self.prep.random_fraction + self.prep.error_focused_fraction > 1.0 + 1e-12 {
            return Err(CliError::validation("prep fractions sum to more than 1"));
        }
        unit("rover.alpha", self.rover.alpha)?;
        unit("rover.epsilon_conf", self.rover.epsilon_conf)?;
        for (i, &c) in self.rover.system_conf.iter().enumerate() {
            unit(&format!("rover.system_conf[{i}]"), c)?;
        }
        if self.synth.max_edit == 0 {
            return Err(CliError::validation("synth.max_edit must be at least 1"));
        }
        if self.prep.max_len == Some(0) {
            return Err(CliError::validation("prep.max_len must be at least 1"));
        }
        if self.prep.mask_token.split_whitespace().count() != 1 {
            return Err(CliError::validation(
                "prep.mask_token must be a single token",
            ));
        }
        if self.corrector.beam == 0 {
            return Err(CliError::validation("corrector.beam must be at least 1"));
        }
        if self.corrector.order == 0 {
            return Err(CliError::validation("corrector.order must be at least 1"));
        }
        if self.corrector.k.is_nan() || self.corrector.k <= 0.0 {
            return Err(CliError::validation("corrector.k must be positive"));
        }
        let p = &self.corrector.penalties;
        if [p.keep, p.homophone, p.merge, p.split]
            .iter()
            .any(|v| !v.is_finite())
        {
            return Err(CliError::validation("corrector penalties must be finite"));
        }
        if !(self.corrector.timeout_secs > 0.0 && self.corrector.timeout_secs.is_finite()) {
            return Err(CliError::validation(
                "corrector.timeout_secs must be positive",
            ));
        }
        if self.gleu.n_max == 0 {
            return Err(CliError::validation("gleu.n_max must be at least 1"));
        }
        if let Some(l) = &self.lexicon {
            if !l.exists() {
                return Err(CliError::io(format!(
                    "lexicon {} does not exist",
                    l.display()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default_and_valid() {
        let c = PipelineConfig::from_toml("").unwrap();
        assert_eq!(c, PipelineConfig::default());
        c.validate().unwrap();
    }

    #[test]
    fn sections_parse() {
        let c = PipelineConfig::from_toml(
            "seed = 7\n[synth]\np_replace = 0.25\n[rover]\nsystem_conf = [0.6, 1.0]\n\
             [corrector.penalties]\nkeep = 0.0\nhomophone = -2.0\nmerge = -1.5\nsplit = -1.5\n",
        )
        .unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.synth.p_replace, 0.25);
        assert_eq!(c.rover.system_conf, vec![0.6, 1.0]);
        assert_eq!(c.corrector.penalties.homophone, -2.0);
    }

    #[test]
    fn rejects_bad_values_and_unknown_keys() {
        assert!(PipelineConfig::from_toml("[synth]\nbogus = 1\n").is_err());
        let mut c = PipelineConfig::default();
        c.synth.p_replace = 1.5;
        assert!(c.validate().is_err());
        let mut c = PipelineConfig::default();
        c.prep.random_fraction = 0.7;
        assert!(c.validate().is_err());
        let c = PipelineConfig {
            lexicon: Some("/no/such/lexicon".into()),
            ..PipelineConfig::default()
        };
        assert_eq!(c.validate().unwrap_err().kind, crate::error::Kind::Io);
    }
}
