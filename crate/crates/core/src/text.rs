//! Shared string normalization for labels, person names, and scan text.

use unicode_normalization::UnicodeNormalization;

/// Lowercase, NFC, with internal whitespace runs collapsed to one space and
/// the ends trimmed.
pub fn normalize_label(raw: &str) -> String {
    let folded: String = raw.to_lowercase().nfc().collect();
    folded.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Person names use the same folding as labels.
pub fn normalize_person(raw: &str) -> String {
    normalize_label(raw)
}

/// Split normalized text into tokens on any non-alphanumeric character.
pub fn tokenize(raw: &str) -> Vec<String> {
    let folded: String = raw.to_lowercase().nfc().collect();
    folded
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}
