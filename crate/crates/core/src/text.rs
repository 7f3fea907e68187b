//! Token normalization shared by every module that reads sentences.

/// Characters stripped from either end of a token.
pub const EDGE_PUNCTUATION: &[char] = &['.', ',', '!', '?', ';', ':', '"', '\''];

/// Lowercases `token` and trims edge punctuation. Internal apostrophes
/// survive, so "They're," becomes "they're".
pub fn normalize_token(token: &str) -> String {
    token
        .trim_matches(|c: char| EDGE_PUNCTUATION.contains(&c) || c.is_whitespace())
        .to_lowercase()
}

/// Splits on whitespace and normalizes each piece, dropping tokens that
/// were pure punctuation.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence
        .split_whitespace()
        .map(normalize_token)
        .filter(|t| !t.is_empty())
        .collect()
}

pub fn join(tokens: &[String]) -> String {
    tokens.join(" ")
}
