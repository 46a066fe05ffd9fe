//! Tweet text generation.

use rand::seq::SliceRandom;
use rand::Rng;

use super::SimError;

const BUNDLED: &str = include_str!("wordlist.txt");

/// Lowercase alphabetic words for generated content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wordlist {
    words: Vec<String>,
}

pub const MIN_WORDLIST: usize = 10;

impl Wordlist {
    pub fn new(words: impl IntoIterator<Item = impl Into<String>>) -> Result<Self, SimError> {
        let words: Vec<String> = words.into_iter().map(Into::into).collect();
        if let Some(bad) = words
            .iter()
            .find(|w| w.is_empty() || !w.chars().all(|c| c.is_alphabetic() && !c.is_uppercase()))
        {
            return Err(SimError::BadWord(bad.clone()));
        }
        if words.len() < MIN_WORDLIST {
            return Err(SimError::WordlistTooSmall(words.len()));
        }
        Ok(Self { words })
    }

    /// One word per non-empty line.
    pub fn parse(text: &str) -> Result<Self, SimError> {
        Self::new(text.lines().map(str::trim).filter(|l| !l.is_empty()))
    }

    /// The 500-word list shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled wordlist is valid")
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn pick<R: Rng>(&self, rng: &mut R) -> &str {
        self.words.choose(rng).expect("non-empty")
    }
}

impl Default for Wordlist {
    fn default() -> Self {
        Self::bundled()
    }
}

/// 2 to 9 uniformly chosen words joined by single spaces.
pub fn gen_lexicon_text<R: Rng>(words: &Wordlist, rng: &mut R) -> String {
    let n = rng.gen_range(2..=9);
    (0..n).map(|_| words.pick(rng)).collect::<Vec<_>>().join(" ")
}

/// Uppercases the first letter with Turkish dotted/dotless rules.
pub fn tr_capitalize(word: &str) -> String {
    let mut chars = word.chars();
    let Some(first) = chars.next() else {
        return String::new();
    };
    let mut out = match first {
        'i' => "İ".to_string(),
        'ı' => "I".to_string(),
        c => c.to_uppercase().collect(),
    };
    out.extend(chars);
    out
}

/// A camel-case hashtag body such as `KalemDeniz17`.
pub fn gen_keyword_body<R: Rng>(words: &Wordlist, rng: &mut R) -> String {
    format!(
        "{}{}{}",
        tr_capitalize(words.pick(rng)),
        tr_capitalize(words.pick(rng)),
        rng.gen_range(10..100)
    )
}

/// A sentence: capitalized, several words, closing punctuation.
pub fn gen_sentence<R: Rng>(words: &Wordlist, rng: &mut R) -> String {
    let n = rng.gen_range(3..=12);
    let mut parts: Vec<String> = (0..n).map(|_| words.pick(rng).to_string()).collect();
    parts[0] = tr_capitalize(&parts[0]);
    if n > 5 && rng.gen_bool(0.4) {
        let k = rng.gen_range(1..n - 1);
        parts[k].push(',');
    }
    let end = *[".", "!", "?", "...", "!!"].choose(rng).expect("non-empty");
    parts.last_mut().expect("n >= 3").push_str(end);
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::ContentClassifier;
    use crate::model::{normalize_keyword, Locale};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bundled_list() {
        let w = Wordlist::bundled();
        assert_eq!(w.len(), 500);
    }

    #[test]
    fn wordlist_validation() {
        assert_eq!(Wordlist::new(["a", "b"]), Err(SimError::WordlistTooSmall(2)));
        assert_eq!(
            Wordlist::new(["Ab"; 20]),
            Err(SimError::BadWord("Ab".into()))
        );
        assert!(Wordlist::new(["ab1"; 20]).is_err());
    }

    #[test]
    fn lexicon_text_round_trip() {
        let words = Wordlist::bundled();
        let clf = ContentClassifier::new(Locale::Tr);
        let kw = normalize_keyword("#x", Locale::Tr).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let first = gen_lexicon_text(&words, &mut rng);
        let mut again = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(first, gen_lexicon_text(&words, &mut again));
        for _ in 0..2000 {
            let t = gen_lexicon_text(&words, &mut rng);
            let n = t.split(' ').count();
            assert!((2..=9).contains(&n));
            assert!(clf.is_lexicon_tweet(&t, &kw), "{t}");
        }
    }

    #[test]
    fn sentences_are_not_lexicon() {
        let words = Wordlist::bundled();
        let clf = ContentClassifier::new(Locale::Tr);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..2000 {
            let s = gen_sentence(&words, &mut rng);
            assert!(!clf.is_lexicon_text(&s, None), "{s}");
        }
    }

    #[test]
    fn capitalize() {
        assert_eq!(tr_capitalize("istanbul"), "İstanbul");
        assert_eq!(tr_capitalize("ılık"), "Ilık");
        assert_eq!(tr_capitalize("çay"), "Çay");
    }
}
