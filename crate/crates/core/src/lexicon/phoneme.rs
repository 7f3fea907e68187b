use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// ARPAbet vowels. Only these may carry a stress digit.
pub const VOWELS: &[&str] = &[
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER", "EY", "IH", "IY", "OW", "OY", "UH", "UW",
];

pub fn is_vowel(symbol: &str) -> bool {
    VOWELS.contains(&symbol)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Phoneme {
    symbol: String,
    stress: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PhonemeError {
    #[error("empty phoneme symbol")]
    Empty,
    #[error("phoneme `{0}` is not upper-case ARPAbet")]
    NotUppercase(String),
    #[error("stress digit {stress} out of range in `{raw}`")]
    BadStress { raw: String, stress: u8 },
    #[error("stress marked on consonant `{0}`")]
    StressOnConsonant(String),
}

impl Phoneme {
    pub fn new(symbol: &str, stress: Option<u8>) -> Result<Self, PhonemeError> {
        if symbol.is_empty() {
            return Err(PhonemeError::Empty);
        }
        if !symbol.bytes().all(|b| b.is_ascii_uppercase()) {
            return Err(PhonemeError::NotUppercase(symbol.to_string()));
        }
        if let Some(s) = stress {
            if s > 2 {
                return Err(PhonemeError::BadStress {
                    raw: format!("{symbol}{s}"),
                    stress: s,
                });
            }
            if !is_vowel(symbol) {
                return Err(PhonemeError::StressOnConsonant(format!("{symbol}{s}")));
            }
        }
        Ok(Self {
            symbol: symbol.to_string(),
            stress,
        })
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn stress(&self) -> Option<u8> {
        self.stress
    }

    pub fn is_vowel(&self) -> bool {
        is_vowel(&self.symbol)
    }

    pub fn without_stress(&self) -> Phoneme {
        Phoneme {
            symbol: self.symbol.clone(),
            stress: None,
        }
    }
}

impl FromStr for Phoneme {
    type Err = PhonemeError;

    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        match raw.as_bytes().last() {
            Some(b) if b.is_ascii_digit() => {
                let stress = b - b'0';
                Phoneme::new(&raw[..raw.len() - 1], Some(stress))
            }
            Some(_) => Phoneme::new(raw, None),
            None => Err(PhonemeError::Empty),
        }
    }
}

impl fmt::Display for Phoneme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.stress {
            Some(s) => write!(f, "{}{}", self.symbol, s),
            None => f.write_str(&self.symbol),
        }
    }
}

/// A nonempty phoneme sequence for one word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pronunciation(Vec<Phoneme>);

impl Pronunciation {
    /// Returns `None` for an empty sequence.
    pub fn new(phonemes: Vec<Phoneme>) -> Option<Self> {
        if phonemes.is_empty() {
            None
        } else {
            Some(Self(phonemes))
        }
    }

    pub fn phonemes(&self) -> &[Phoneme] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index key: space-joined symbols, stress digits removed unless `strict`.
    pub fn key(&self, strict: bool) -> String {
        phoneme_key(&self.0, strict)
    }

    pub fn concat(&self, other: &Pronunciation) -> Pronunciation {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Pronunciation(v)
    }
}

pub fn phoneme_key(phonemes: &[Phoneme], strict: bool) -> String {
    let mut out = String::new();
    for (i, p) in phonemes.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&p.symbol);
        if strict {
            if let Some(s) = p.stress {
                out.push((b'0' + s) as char);
            }
        }
    }
    out
}

impl fmt::Display for Pronunciation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for Pronunciation {
    type Err = PhonemeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let phones = s
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<Phoneme>, _>>()?;
        Pronunciation::new(phones).ok_or(PhonemeError::Empty)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_stress_and_rejects_consonant_stress() {
        let p: Phoneme = "AO1".parse().unwrap();
        assert_eq!(p.symbol(), "AO");
        assert_eq!(p.stress(), Some(1));
        assert_eq!("K".parse::<Phoneme>().unwrap().stress(), None);
        assert!(matches!(
            "K1".parse::<Phoneme>(),
            Err(PhonemeError::StressOnConsonant(_))
        ));
        assert!(matches!(
            "ah0".parse::<Phoneme>(),
            Err(PhonemeError::NotUppercase(_))
        ));
        assert!(matches!(
            "AH7".parse::<Phoneme>(),
            Err(PhonemeError::BadStress { .. })
        ));
    }

    #[test]
    fn key_strips_stress() {
        let p: Pronunciation = "AH0 K R AO1 S".parse().unwrap();
        assert_eq!(p.key(false), "AH K R AO S");
        assert_eq!(p.key(true), "AH0 K R AO1 S");
        assert_eq!(p.to_string(), "AH0 K R AO1 S");
    }

    #[test]
    fn empty_pronunciation_rejected() {
        assert!(Pronunciation::new(vec![]).is_none());
        assert!("".parse::<Pronunciation>().is_err());
    }
}
