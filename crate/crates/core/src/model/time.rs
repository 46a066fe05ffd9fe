//! Second-resolution timestamps, signed durations and fixed reporting offsets.

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use chrono::{DateTime, FixedOffset, NaiveDate, TimeZone, Utc};
use serde::{Deserialize, Serialize};

/// A UTC instant. Millisecond precision is kept when the source provides it,
/// but all arithmetic works on whole seconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Timestamp {
    secs: i64,
    millis: u16,
}

impl Timestamp {
    pub const fn from_secs(secs: i64) -> Self {
        Self { secs, millis: 0 }
    }

    pub fn from_millis(ms: i64) -> Self {
        Self {
            secs: ms.div_euclid(1000),
            millis: ms.rem_euclid(1000) as u16,
        }
    }

    pub fn secs(self) -> i64 {
        self.secs
    }

    pub fn subsec_millis(self) -> u16 {
        self.millis
    }

    pub fn as_millis(self) -> i64 {
        self.secs * 1000 + i64::from(self.millis)
    }

    /// Parses an RFC 3339 / ISO-8601 timestamp such as `2019-07-01T21:05:00Z`.
    pub fn parse_iso(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
            return Some(Self::from_millis(dt.timestamp_millis()));
        }
        // Tolerate a missing offset and treat it as UTC.
        chrono::NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S")
            .or_else(|_| chrono::NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S"))
            .ok()
            .map(|naive| Self::from_millis(naive.and_utc().timestamp_millis()))
    }

    pub fn to_datetime(self) -> DateTime<Utc> {
        Utc.timestamp_millis_opt(self.as_millis())
            .single()
            .unwrap_or(DateTime::<Utc>::MIN_UTC)
    }

    /// ISO-8601 in UTC with a trailing `Z`, seconds precision.
    pub fn to_iso(self) -> String {
        self.to_datetime().format("%Y-%m-%dT%H:%M:%SZ").to_string()
    }

    /// Calendar date of this instant in the given reporting offset.
    pub fn local_date(self, tz: TzOffset) -> NaiveDate {
        self.to_datetime().with_timezone(&tz.fixed()).date_naive()
    }

    /// Hour of day (0..24) in the given reporting offset.
    pub fn local_hour(self, tz: TzOffset) -> u32 {
        let local = self.secs + i64::from(tz.seconds());
        (local.rem_euclid(86_400) / 3600) as u32
    }

    /// Index of the absolute epoch minute containing this instant.
    pub fn minute_bin(self) -> i64 {
        self.secs.div_euclid(60)
    }
}

impl Sub for Timestamp {
    type Output = Duration;

    fn sub(self, rhs: Self) -> Duration {
        Duration::seconds(self.secs - rhs.secs)
    }
}

impl Add<Duration> for Timestamp {
    type Output = Timestamp;

    fn add(self, rhs: Duration) -> Timestamp {
        Timestamp {
            secs: self.secs + rhs.0,
            millis: self.millis,
        }
    }
}

impl Sub<Duration> for Timestamp {
    type Output = Timestamp;

    fn sub(self, rhs: Duration) -> Timestamp {
        Timestamp {
            secs: self.secs - rhs.0,
            millis: self.millis,
        }
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_iso())
    }
}

/// Signed span in whole seconds.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Duration(i64);

impl Duration {
    pub const ZERO: Duration = Duration(0);

    pub const fn seconds(secs: i64) -> Self {
        Self(secs)
    }

    pub const fn minutes(m: i64) -> Self {
        Self(m * 60)
    }

    pub const fn hours(h: i64) -> Self {
        Self(h * 3600)
    }

    pub const fn days(d: i64) -> Self {
        Self(d * 86_400)
    }

    pub const fn as_secs(self) -> i64 {
        self.0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn abs(self) -> Self {
        Self(self.0.abs())
    }
}

impl Add for Duration {
    type Output = Duration;

    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for Duration {
    type Output = Duration;

    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}s", self.0)
    }
}

/// Fixed UTC offset used for day boundaries and hour-of-day reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TzOffset(i32);

impl TzOffset {
    pub const UTC: TzOffset = TzOffset(0);
    /// Turkey time.
    pub const TURKEY: TzOffset = TzOffset(3 * 3600);

    pub fn from_seconds(secs: i32) -> Option<Self> {
        (secs.abs() < 86_400).then_some(Self(secs))
    }

    pub fn from_hours(h: i32) -> Option<Self> {
        Self::from_seconds(h * 3600)
    }

    pub fn seconds(self) -> i32 {
        self.0
    }

    pub fn fixed(self) -> FixedOffset {
        FixedOffset::east_opt(self.0).expect("offset bounded at construction")
    }

    /// UTC instant of local midnight starting `date`.
    pub fn midnight(self, date: NaiveDate) -> Timestamp {
        let utc = date
            .and_hms_opt(0, 0, 0)
            .expect("midnight exists")
            .and_utc()
            .timestamp();
        Timestamp::from_secs(utc - i64::from(self.0))
    }
}

impl Default for TzOffset {
    fn default() -> Self {
        Self::TURKEY
    }
}

impl fmt::Display for TzOffset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { '-' } else { '+' };
        let abs = self.0.abs();
        write!(f, "{}{:02}:{:02}", sign, abs / 3600, (abs % 3600) / 60)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid timezone offset `{0}` (expected e.g. +03:00, -5, UTC+3)")]
pub struct TzParseError(String);

impl FromStr for TzOffset {
    type Err = TzParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || TzParseError(s.to_string());
        let body = s.trim();
        let body = body
            .strip_prefix("UTC")
            .or_else(|| body.strip_prefix("utc"))
            .unwrap_or(body);
        if body.is_empty() || body == "Z" {
            return Ok(Self::UTC);
        }
        let (sign, rest) = match body.as_bytes()[0] {
            b'+' => (1, &body[1..]),
            b'-' => (-1, &body[1..]),
            _ => (1, body),
        };
        let (h, m) = match rest.split_once(':') {
            Some((h, m)) => (h, m),
            None => (rest, "0"),
        };
        let h: i32 = h.parse().map_err(|_| err())?;
        let m: i32 = m.parse().map_err(|_| err())?;
        if !(0..24).contains(&h) || !(0..60).contains(&m) {
            return Err(err());
        }
        Self::from_seconds(sign * (h * 3600 + m * 60)).ok_or_else(err)
    }
}
