//! Trend keywords and locale-aware case folding.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Case-folding rules. Turkish distinguishes dotted and dotless i.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Locale {
    #[default]
    Tr,
    /// Plain Unicode lowercasing.
    Root,
}

impl Locale {
    pub fn fold(self, text: &str) -> String {
        let mut out = String::with_capacity(text.len());
        for c in text.chars() {
            self.fold_char_into(c, &mut out);
        }
        out
    }

    pub fn fold_char_into(self, c: char, out: &mut String) {
        match (self, c) {
            (Locale::Tr, 'I') => out.push('ı'),
            (Locale::Tr, 'İ') => out.push('i'),
            _ if c.is_ascii() => out.push(c.to_ascii_lowercase()),
            _ => out.extend(c.to_lowercase()),
        }
    }

    pub fn is_upper(self, c: char) -> bool {
        c.is_uppercase()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown locale `{0}` (expected `tr` or `root`)")]
pub struct LocaleParseError(String);

impl FromStr for Locale {
    type Err = LocaleParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tr" | "tr-tr" | "tr_tr" | "turkish" => Ok(Locale::Tr),
            "root" | "und" | "en" | "unicode" => Ok(Locale::Root),
            _ => Err(LocaleParseError(s.to_string())),
        }
    }
}

impl fmt::Display for Locale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Locale::Tr => "tr",
            Locale::Root => "root",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeywordKind {
    Hashtag,
    Ngram,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KeywordError {
    #[error("keyword is empty after trimming")]
    EmptyKeyword,
}

/// A target keyword: either a hashtag or a whitespace-separated n-gram.
///
/// Equality, ordering and hashing look only at `(kind, normalized)`, so
/// `#TAG` and `#tag` are the same keyword.
#[derive(Debug, Clone)]
pub struct Keyword {
    raw: String,
    normalized: String,
    kind: KeywordKind,
}

impl Keyword {
    pub fn raw(&self) -> &str {
        &self.raw
    }

    /// Folded form without the leading `#`.
    pub fn normalized(&self) -> &str {
        &self.normalized
    }

    pub fn kind(&self) -> KeywordKind {
        self.kind
    }

    pub fn is_hashtag(&self) -> bool {
        self.kind == KeywordKind::Hashtag
    }

    /// `#tag` for hashtags, the folded n-gram otherwise.
    pub fn canonical(&self) -> String {
        match self.kind {
            KeywordKind::Hashtag => format!("#{}", self.normalized),
            KeywordKind::Ngram => self.normalized.clone(),
        }
    }

    /// Folded n-gram tokens (a single token for hashtags).
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.normalized.split(' ')
    }
}

impl PartialEq for Keyword {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.normalized == other.normalized
    }
}

impl Eq for Keyword {}

impl Hash for Keyword {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state);
        self.normalized.hash(state);
    }
}

impl PartialOrd for Keyword {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Keyword {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.kind, &self.normalized).cmp(&(other.kind, &other.normalized))
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl Serialize for Keyword {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.canonical())
    }
}

/// Folds `raw` into a [`Keyword`]. A leading `#` marks a hashtag and is
/// stripped from the normalized form; inner whitespace collapses to one space.
pub fn normalize_keyword(raw: &str, locale: Locale) -> Result<Keyword, KeywordError> {
    let trimmed = raw.trim();
    let (kind, body) = match trimmed.strip_prefix('#') {
        Some(_) => (KeywordKind::Hashtag, trimmed.trim_start_matches('#')),
        None => (KeywordKind::Ngram, trimmed),
    };
    let folded = locale.fold(body);
    let normalized = folded.split_whitespace().collect::<Vec<_>>().join(" ");
    if normalized.is_empty() {
        return Err(KeywordError::EmptyKeyword);
    }
    Ok(Keyword {
        raw: trimmed.to_string(),
        normalized,
        kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ascii_hashtag() {
        let k = normalize_keyword("#TAG", Locale::Tr).unwrap();
        assert_eq!(k.normalized(), "tag");
        assert_eq!(k.kind(), KeywordKind::Hashtag);
        assert_eq!(k.raw(), "#TAG");
        assert_eq!(k.canonical(), "#tag");
    }

    #[test]
    fn turkish_dotted_capital() {
        let k = normalize_keyword("#İstanbul", Locale::Tr).unwrap();
        assert_eq!(k.normalized(), "istanbul");
        // Plain Unicode lowercasing keeps the combining dot.
        let root = normalize_keyword("#İstanbul", Locale::Root).unwrap();
        assert_eq!(root.normalized(), "i\u{307}stanbul");
    }

    #[test]
    fn turkish_dotless_capital() {
        let k = normalize_keyword("IRMAK", Locale::Tr).unwrap();
        assert_eq!(k.normalized(), "ırmak");
        let root = normalize_keyword("IRMAK", Locale::Root).unwrap();
        assert_eq!(root.normalized(), "irmak");
    }

    #[test]
    fn ngram_with_apostrophe() {
        let k = normalize_keyword("YSK'dan CHP", Locale::Tr).unwrap();
        assert_eq!(k.normalized(), "ysk'dan chp");
        assert_eq!(k.kind(), KeywordKind::Ngram);
        assert_eq!(k.tokens().collect::<Vec<_>>(), ["ysk'dan", "chp"]);
    }

    #[test]
    fn empty_inputs_rejected() {
        assert_eq!(
            normalize_keyword("   \t", Locale::Tr).unwrap_err(),
            KeywordError::EmptyKeyword
        );
        assert!(normalize_keyword(" # ", Locale::Tr).is_err());
    }

    #[test]
    fn equality_ignores_raw_form() {
        let a = normalize_keyword("#Tag", Locale::Tr).unwrap();
        let b = normalize_keyword(" #tag ", Locale::Tr).unwrap();
        let c = normalize_keyword("tag", Locale::Tr).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent(raw in "#?[a-zA-ZçğıİöşüÇĞÖŞÜ' ]{1,20}", tr in any::<bool>()) {
            let locale = if tr { Locale::Tr } else { Locale::Root };
            if let Ok(k) = normalize_keyword(&raw, locale) {
                let again = normalize_keyword(&k.canonical(), locale).unwrap();
                prop_assert_eq!(again.normalized(), k.normalized());
                prop_assert_eq!(again.kind(), k.kind());
                let bare = normalize_keyword(k.normalized(), locale).unwrap();
                prop_assert_eq!(bare.normalized(), k.normalized());
            }
        }
    }
}
