//! Per-tweet content rules: lexicon-generated text and single engagement.
//!
//! A lexicon tweet is the target keyword plus a handful of dictionary words
//! with no punctuation and no sentence structure. After removing the keyword
//! token(s) and emoji, the text must
//!
//! 1. contain only letters of the configured alphabet, spaces and parentheses,
//! 2. not start with an uppercase letter,
//! 3. have between 2 and 9 whitespace-separated tokens.
//!
//! Parentheses stay attached to their token, so `apple (fruit) to cycle`
//! counts four tokens.

use std::collections::HashSet;
use std::io::Write;

use serde::Serialize;

use crate::ingest::{Tweet, TrendInstance};
use crate::model::{Keyword, KeywordKind, Locale};

pub const MIN_LEXICON_TOKENS: usize = 2;
pub const MAX_LEXICON_TOKENS: usize = 9;

/// Whether `c` is an emoji code point or an emoji sequence component
/// (variation selectors, zero-width joiner, keycap, tags, skin tones).
pub fn is_emoji(c: char) -> bool {
    matches!(c as u32,
        0x1F000..=0x1FAFF
        | 0x2600..=0x27BF
        | 0x231A..=0x231B | 0x2328 | 0x23CF | 0x23E9..=0x23F3 | 0x23F8..=0x23FA
        | 0x2B05..=0x2B07 | 0x2B1B..=0x2B1C | 0x2B50 | 0x2B55
        | 0x2194..=0x2199 | 0x21A9..=0x21AA
        | 0x25AA..=0x25AB | 0x25B6 | 0x25C0 | 0x25FB..=0x25FE
        | 0x2934..=0x2935 | 0x3030 | 0x303D | 0x3297 | 0x3299
        | 0x00A9 | 0x00AE | 0x203C | 0x2049 | 0x2122 | 0x2139 | 0x24C2
        | 0xFE0E..=0xFE0F | 0x200D | 0x20E3 | 0xE0020..=0xE007F
    )
}

/// Letters accepted by the lexicon rule.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum Alphabet {
    /// ASCII letters plus the Turkish letters (and circumflexed vowels).
    #[default]
    TurkishAscii,
    /// Any Unicode alphabetic character.
    AnyLetter,
    /// Exactly these characters.
    Custom(HashSet<char>),
}

impl Alphabet {
    pub fn contains(&self, c: char) -> bool {
        match self {
            Alphabet::TurkishAscii => {
                c.is_ascii_alphabetic() || "çğıöşüÇĞİÖŞÜâîûÂÎÛ".contains(c)
            }
            Alphabet::AnyLetter => c.is_alphabetic(),
            Alphabet::Custom(set) => set.contains(&c),
        }
    }
}

/// Flags computed for one tweet against one target keyword.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TweetFlags {
    pub is_lexicon: bool,
    pub is_single_engagement: bool,
    pub token_count: usize,
}

fn strip_tokens(text: &str, keyword: Option<&Keyword>, locale: Locale) -> Vec<String> {
    let mut tokens: Vec<String> = text
        .split_whitespace()
        .map(|tok| tok.chars().filter(|&c| !is_emoji(c)).collect::<String>())
        .filter(|tok| !tok.is_empty())
        .collect();
    let Some(keyword) = keyword else {
        return tokens;
    };
    match keyword.kind() {
        KeywordKind::Hashtag => {
            let target = keyword.canonical();
            tokens.retain(|tok| locale.fold(tok) != target);
        }
        KeywordKind::Ngram => {
            let needle: Vec<&str> = keyword.tokens().collect();
            let folded: Vec<String> = tokens.iter().map(|t| locale.fold(t)).collect();
            let mut keep = vec![true; tokens.len()];
            let mut i = 0;
            while i + needle.len() <= folded.len() {
                if folded[i..i + needle.len()].iter().zip(&needle).all(|(a, b)| a == b) {
                    keep[i..i + needle.len()].iter_mut().for_each(|k| *k = false);
                    i += needle.len();
                } else {
                    i += 1;
                }
            }
            let mut it = keep.into_iter();
            tokens.retain(|_| it.next().unwrap_or(true));
        }
    }
    tokens
}

/// Removes every whitespace-delimited occurrence of the keyword and every
/// emoji, collapsing the remaining whitespace.
pub fn strip_keyword_and_emoji(text: &str, keyword: &Keyword, locale: Locale) -> String {
    strip_tokens(text, Some(keyword), locale).join(" ")
}

/// Removes emoji only.
pub fn strip_emoji(text: &str) -> String {
    strip_tokens(text, None, Locale::Root).join(" ")
}

/// Applies the lexicon and single-engagement rules.
#[derive(Debug, Clone, Default)]
pub struct ContentClassifier {
    pub locale: Locale,
    pub alphabet: Alphabet,
}

impl ContentClassifier {
    pub fn new(locale: Locale) -> Self {
        Self {
            locale,
            alphabet: Alphabet::default(),
        }
    }

    pub fn with_alphabet(mut self, alphabet: Alphabet) -> Self {
        self.alphabet = alphabet;
        self
    }

    fn lexicon_tokens(&self, tokens: &[String]) -> bool {
        let n = tokens.len();
        if !(MIN_LEXICON_TOKENS..=MAX_LEXICON_TOKENS).contains(&n) {
            return false;
        }
        let first_upper = tokens[0].chars().next().is_some_and(|c| self.locale.is_upper(c));
        !first_upper
            && tokens
                .iter()
                .flat_map(|t| t.chars())
                .all(|c| c == '(' || c == ')' || self.alphabet.contains(c))
    }

    /// Lexicon rule on `text` with the keyword excluded. `None` skips keyword
    /// removal (for tweets not tied to a trend).
    pub fn is_lexicon_text(&self, text: &str, keyword: Option<&Keyword>) -> bool {
        self.lexicon_tokens(&strip_tokens(text, keyword, self.locale))
    }

    pub fn is_lexicon_tweet(&self, text: &str, keyword: &Keyword) -> bool {
        self.is_lexicon_text(text, Some(keyword))
    }

    /// No retweet, reply, mention or url, and no hashtag other than the
    /// keyword itself.
    pub fn is_single_engagement(&self, tweet: &Tweet, keyword: &Keyword) -> bool {
        if tweet.is_retweet || tweet.is_reply || !tweet.mentions.is_empty() || tweet.urls > 0 {
            return false;
        }
        tweet.hashtags.iter().all(|h| {
            keyword.is_hashtag()
                && self.locale.fold(h.trim_start_matches(['#', '＃'])) == keyword.normalized()
        })
    }

    pub fn flags(&self, tweet: &Tweet, keyword: &Keyword) -> TweetFlags {
        let tokens = strip_tokens(&tweet.text, Some(keyword), self.locale);
        TweetFlags {
            is_lexicon: self.lexicon_tokens(&tokens),
            is_single_engagement: self.is_single_engagement(tweet, keyword),
            token_count: tokens.len(),
        }
    }

    /// Flags for every tweet of an instance, aligned with `instance.tweets`.
    pub fn instance_flags(&self, instance: &TrendInstance) -> Vec<TweetFlags> {
        instance
            .tweets
            .iter()
            .map(|t| self.flags(t, &instance.trend.keyword))
            .collect()
    }
}

/// Convenience wrapper using the default alphabet.
pub fn is_lexicon_tweet(text: &str, keyword: &Keyword, locale: Locale) -> bool {
    ContentClassifier::new(locale).is_lexicon_tweet(text, keyword)
}

/// Convenience wrapper using the default alphabet.
pub fn is_single_engagement(tweet: &Tweet, keyword: &Keyword, locale: Locale) -> bool {
    ContentClassifier::new(locale).is_single_engagement(tweet, keyword)
}

// ---------------------------------------------------------------------------
// Corpus-level lexicon statistics

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LexiconColumn {
    pub all: u64,
    pub deleted: u64,
    pub deleted_lexicon: u64,
    pub all_lexicon: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl LexiconColumn {
    pub fn add(&mut self, deleted: bool, lexicon: bool) {
        self.all += 1;
        self.deleted += u64::from(deleted);
        self.all_lexicon += u64::from(lexicon);
        self.deleted_lexicon += u64::from(deleted && lexicon);
    }

    /// Deleted lexicon tweets over all lexicon tweets.
    pub fn lexicon_deletion_ratio(&self) -> f64 {
        ratio(self.deleted_lexicon, self.all_lexicon)
    }

    /// Deleted lexicon tweets over all deleted tweets.
    pub fn lexicon_share_of_deletions(&self) -> f64 {
        ratio(self.deleted_lexicon, self.deleted)
    }
}

/// Trend-associated versus other tweets.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StatsTable {
    pub trends: LexiconColumn,
    pub other: LexiconColumn,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("no tweets to summarize")]
    EmptyCorpus,
}

impl StatsTable {
    pub const ROW_LABELS: [&'static str; 6] = [
        "All Tweets",
        "Deleted Tweets",
        "Deleted Lexicon Tweets",
        "All Lexicon Tweets",
        "Deleted Lex. Tw. / All Lex. Tw.",
        "Deleted Lex. Tw. / All Deleted Tw.",
    ];

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["dataset", "tweets_with_trends", "other_tweets"])?;
        let cols = [&self.trends, &self.other];
        let counts: [fn(&LexiconColumn) -> u64; 4] = [
            |c| c.all,
            |c| c.deleted,
            |c| c.deleted_lexicon,
            |c| c.all_lexicon,
        ];
        for (label, f) in Self::ROW_LABELS.iter().zip(counts) {
            w.write_record([label.to_string(), f(cols[0]).to_string(), f(cols[1]).to_string()])?;
        }
        let ratios: [fn(&LexiconColumn) -> f64; 2] = [
            LexiconColumn::lexicon_deletion_ratio,
            LexiconColumn::lexicon_share_of_deletions,
        ];
        for (label, f) in Self::ROW_LABELS[4..].iter().zip(ratios) {
            w.write_record([
                label.to_string(),
                format!("{:.6}", f(cols[0])),
                format!("{:.6}", f(cols[1])),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Tabulates deletion and lexicon counts for tweets associated with trends
/// (deduplicated by tweet id across instances) against background tweets.
pub fn lexicon_stats(
    classifier: &ContentClassifier,
    instances: &[TrendInstance],
    background: &[(Tweet, bool)],
) -> Result<StatsTable, StatsError> {
    let mut table = StatsTable::default();
    let mut seen = HashSet::new();
    for inst in instances {
        for t in &inst.tweets {
            if seen.insert(t.id) {
                let lex = classifier.is_lexicon_tweet(&t.text, &inst.trend.keyword);
                table.trends.add(inst.is_deleted(t.id), lex);
            }
        }
    }
    for (t, deleted) in background {
        table.other.add(*deleted, classifier.is_lexicon_text(&t.text, None));
    }
    if table.trends.all == 0 && table.other.all == 0 {
        return Err(StatsError::EmptyCorpus);
    }
    Ok(table)
}
