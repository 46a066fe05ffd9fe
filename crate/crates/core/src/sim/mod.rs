//! Labeled synthetic archives for testing the detector, and a toy trending
//! algorithm to measure what attacks achieve with and without a deletion
//! penalty.

mod eval;
mod oracle;
mod scenario;
mod text;

pub use eval::{evaluate, load_truth_csv, write_bots, write_truth_csv, EvalReport, TruthError};
pub use oracle::{best_ranks, trend_oracle, ActivityTweet, KeywordActivity, OracleParams, ORACLE_LOCATION};
pub use scenario::{
    gen_attack, gen_organic_trend, gen_organic_tweet, generate, sample_stream, IdSource, LabeledStream, OrganicMix,
    ScenarioConfig, TruthRow,
};
pub use text::{gen_keyword_body, gen_lexicon_text, gen_sentence, tr_capitalize, Wordlist, MIN_WORDLIST};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("wordlist has {0} words, need at least {MIN_WORDLIST}")]
    WordlistTooSmall(usize),
    #[error("wordlist entry {0:?} is not a lowercase alphabetic word")]
    BadWord(String),
    #[error("attack parameters leave no room for a cluster: need alpha_p >= 1s and min(alpha_d, theta - alpha_p) >= 1s")]
    InfeasibleParams,
    #[error("an attack needs at least one bot")]
    NoBots,
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),
}
