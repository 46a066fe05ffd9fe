//! Primitive types shared by every stage of the pipeline.

mod geo;
mod keyword;
mod time;

pub use geo::{haversine_km, GeoError, GeoPoint, EARTH_RADIUS_KM};
pub use keyword::{normalize_keyword, Keyword, KeywordError, KeywordKind, Locale, LocaleParseError};
pub use time::{Duration, Timestamp, TzOffset, TzParseError};
