//! Parsing archived event streams and trend files, and joining them into
//! per-trend tweet collections.

mod instance;
mod matching;
mod stream;
mod trends;

pub use instance::{
    association_window, build_trend_instance, Corpus, TrendInstance, UnmatchedDeletion,
};
pub use matching::{contains_at_boundary, extract_hashtags, fold_collapsed, match_keyword};
pub use stream::{
    decompress, event_to_line, open_archive, parse_stream_bytes, parse_stream_line, read_stream, write_events,
    Compression, EventReader, ParseError, ParseStats, Parsed, Tweet, TweetEvent,
};
pub use trends::{
    load_trend_days, load_trend_epochs, write_trend_days, write_trend_epochs, TrendDay,
    TrendEntry, TrendEpoch, TrendFileError, MAX_TREND_LIST,
};
