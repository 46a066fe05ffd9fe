//! Keyword matching at token boundaries.

use crate::model::{Keyword, KeywordKind, Locale};

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Folded bodies of every hashtag token in `text`, in order of appearance.
///
/// A hashtag starts at `#` (or the full-width `＃`) not preceded by a word
/// character and runs over the following word characters.
pub fn extract_hashtags(text: &str, locale: Locale) -> Vec<String> {
    let mut tags = Vec::new();
    let mut prev: Option<char> = None;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if (c == '#' || c == '＃') && !prev.is_some_and(is_word_char) {
            let start = i + c.len_utf8();
            let mut end = start;
            while let Some(&(j, d)) = chars.peek() {
                if !is_word_char(d) {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            if end > start {
                tags.push(locale.fold(&text[start..end]));
                prev = text[..end].chars().next_back();
                continue;
            }
        }
        prev = Some(c);
    }
    tags
}

/// Folds `text` and collapses whitespace runs into single spaces.
pub fn fold_collapsed(text: &str, locale: Locale) -> String {
    let folded = locale.fold(text);
    let mut out = String::with_capacity(folded.len());
    for tok in folded.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(tok);
    }
    out
}

/// True when `needle` occurs in `haystack` with non-word characters (or the
/// string ends) on both sides. Both arguments must already be folded.
pub fn contains_at_boundary(haystack: &str, needle: &str) -> bool {
    if needle.is_empty() {
        return false;
    }
    let mut from = 0;
    while let Some(pos) = haystack[from..].find(needle) {
        let start = from + pos;
        let end = start + needle.len();
        let before_ok = !haystack[..start].chars().next_back().is_some_and(is_word_char);
        let after_ok = !haystack[end..].chars().next().is_some_and(is_word_char);
        if before_ok && after_ok {
            return true;
        }
        from = start + haystack[start..].chars().next().map_or(1, char::len_utf8);
    }
    false
}

/// Whether `text` mentions `keyword`: hashtags must occur as an exact hashtag
/// token, n-grams at token boundaries. Comparison is case-folded.
pub fn match_keyword(text: &str, keyword: &Keyword, locale: Locale) -> bool {
    match keyword.kind() {
        KeywordKind::Hashtag => extract_hashtags(text, locale)
            .iter()
            .any(|t| t == keyword.normalized()),
        KeywordKind::Ngram => contains_at_boundary(&fold_collapsed(text, locale), keyword.normalized()),
    }
}
