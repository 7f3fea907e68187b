//! Rule-based letter-to-sound for out-of-vocabulary words.
//!
//! Greedy longest-match over a fixed grapheme table. The first vowel gets
//! primary stress and later vowels are unstressed. Output is deterministic
//! and only loosely English-like; it exists so every token has *some*
//! pronunciation.

use super::phoneme::{is_vowel, Phoneme, Pronunciation};

// Ordered longest first within each length class; lookup tries 4, 3, 2, 1.
const RULES: &[(&str, &[&str])] = &[
    ("tion", &["SH", "AH", "N"]),
    ("sion", &["ZH", "AH", "N"]),
    ("igh", &["AY"]),
    ("tch", &["CH"]),
    ("sch", &["S", "K"]),
    ("ch", &["CH"]),
    ("sh", &["SH"]),
    ("th", &["TH"]),
    ("ph", &["F"]),
    ("wh", &["W"]),
    ("ck", &["K"]),
    ("ng", &["NG"]),
    ("qu", &["K", "W"]),
    ("gh", &[]),
    ("kn", &["N"]),
    ("wr", &["R"]),
    ("ee", &["IY"]),
    ("ea", &["IY"]),
    ("oo", &["UW"]),
    ("ai", &["EY"]),
    ("ay", &["EY"]),
    ("oa", &["OW"]),
    ("ou", &["AW"]),
    ("ow", &["OW"]),
    ("oi", &["OY"]),
    ("oy", &["OY"]),
    ("au", &["AO"]),
    ("aw", &["AO"]),
    ("ie", &["IY"]),
    ("ei", &["EY"]),
    ("ew", &["UW"]),
    ("ue", &["UW"]),
    ("er", &["ER"]),
    ("ir", &["ER"]),
    ("ur", &["ER"]),
    ("ar", &["AA", "R"]),
    ("or", &["AO", "R"]),
    ("a", &["AE"]),
    ("b", &["B"]),
    ("c", &["K"]),
    ("d", &["D"]),
    ("e", &["EH"]),
    ("f", &["F"]),
    ("g", &["G"]),
    ("h", &["HH"]),
    ("i", &["IH"]),
    ("j", &["JH"]),
    ("k", &["K"]),
    ("l", &["L"]),
    ("m", &["M"]),
    ("n", &["N"]),
    ("o", &["AA"]),
    ("p", &["P"]),
    ("q", &["K"]),
    ("r", &["R"]),
    ("s", &["S"]),
    ("t", &["T"]),
    ("u", &["AH"]),
    ("v", &["V"]),
    ("w", &["W"]),
    ("x", &["K", "S"]),
    ("z", &["Z"]),
];

fn lookup(chunk: &str) -> Option<&'static [&'static str]> {
    RULES.iter().find(|(g, _)| *g == chunk).map(|(_, p)| *p)
}

fn is_consonant_letter(c: u8) -> bool {
    c.is_ascii_lowercase() && !b"aeiouy".contains(&c)
}

/// Letters-only view of a normalized word: lowercase ASCII, doubled
/// consonants collapsed, a silent final `e` removed.
fn prepare(word: &str) -> Vec<u8> {
    let mut letters: Vec<u8> = Vec::with_capacity(word.len());
    for b in word.bytes().filter(u8::is_ascii_alphabetic) {
        let b = b.to_ascii_lowercase();
        if letters.last() == Some(&b) && is_consonant_letter(b) {
            continue;
        }
        letters.push(b);
    }
    let n = letters.len();
    if n > 2 && letters[n - 1] == b'e' && is_consonant_letter(letters[n - 2]) {
        letters.pop();
    }
    letters
}

/// Spells out a pronunciation for `word`. `None` when the word holds no
/// ASCII letters.
pub fn letter_to_sound(word: &str) -> Option<Pronunciation> {
    let letters = prepare(word);
    let mut symbols: Vec<&str> = Vec::new();
    let mut i = 0;
    while i < letters.len() {
        if letters[i] == b'y' {
            symbols.push(if i == 0 { "Y" } else { "IY" });
            i += 1;
            continue;
        }
        let mut matched = false;
        for width in (1..=4).rev() {
            if i + width > letters.len() {
                continue;
            }
            let chunk = std::str::from_utf8(&letters[i..i + width]).ok()?;
            if let Some(phones) = lookup(chunk) {
                symbols.extend_from_slice(phones);
                i += width;
                matched = true;
                break;
            }
        }
        if !matched {
            i += 1;
        }
    }

    let mut seen_vowel = false;
    let phonemes = symbols
        .into_iter()
        .map(|s| {
            let stress = if is_vowel(s) {
                let st = if seen_vowel { 0 } else { 1 };
                seen_vowel = true;
                Some(st)
            } else {
                None
            };
            Phoneme::new(s, stress).expect("rule table holds valid ARPAbet")
        })
        .collect();
    Pronunciation::new(phonemes)
}
