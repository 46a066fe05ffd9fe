//! Line-delimited JSON archives of status objects and delete notices.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::de::IgnoredAny;
use serde::{Deserialize, Serialize};

use crate::model::{GeoPoint, Timestamp};

/// One status as seen in the archive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tweet {
    pub id: u64,
    pub user_id: u64,
    pub text: String,
    pub created_at: Timestamp,
    /// Hashtag entity texts, without the `#`.
    pub hashtags: Vec<String>,
    pub mentions: Vec<u64>,
    pub urls: u32,
    pub is_retweet: bool,
    pub is_reply: bool,
    pub geo: Option<GeoPoint>,
    pub lang: Option<String>,
    pub source_app: Option<String>,
}

impl Tweet {
    /// A plain tweet with no entities.
    pub fn new(id: u64, user_id: u64, created_at: Timestamp, text: impl Into<String>) -> Self {
        Self {
            id,
            user_id,
            text: text.into(),
            created_at,
            hashtags: Vec::new(),
            mentions: Vec::new(),
            urls: 0,
            is_retweet: false,
            is_reply: false,
            geo: None,
            lang: None,
            source_app: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TweetEvent {
    Creation(Tweet),
    Deletion {
        tweet_id: u64,
        user_id: u64,
        time: Timestamp,
    },
}

impl TweetEvent {
    /// Creation time or deletion time.
    pub fn time(&self) -> Timestamp {
        match self {
            TweetEvent::Creation(t) => t.created_at,
            TweetEvent::Deletion { time, .. } => *time,
        }
    }

    pub fn tweet_id(&self) -> u64 {
        match self {
            TweetEvent::Creation(t) => t.id,
            TweetEvent::Deletion { tweet_id, .. } => *tweet_id,
        }
    }

    /// Sort key giving a stable archive order: time, creations before
    /// deletions, then tweet id.
    pub fn order_key(&self) -> (Timestamp, u8, u64) {
        match self {
            TweetEvent::Creation(t) => (t.created_at, 0, t.id),
            TweetEvent::Deletion { tweet_id, time, .. } => (*time, 1, *tweet_id),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Event(TweetEvent),
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("malformed record: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseStats {
    pub lines_read: u64,
    pub creations: u64,
    pub deletions: u64,
    pub malformed_skipped: u64,
    pub other_skipped: u64,
}

impl ParseStats {
    pub fn reconciles(&self) -> bool {
        self.lines_read
            == self.creations + self.deletions + self.malformed_skipped + self.other_skipped
    }

    /// Counts one parsed line.
    pub fn record(&mut self, parsed: &Result<Parsed, ParseError>) {
        self.lines_read += 1;
        match parsed {
            Ok(Parsed::Event(TweetEvent::Creation(_))) => self.creations += 1,
            Ok(Parsed::Event(TweetEvent::Deletion { .. })) => self.deletions += 1,
            Ok(Parsed::Skip) => self.other_skipped += 1,
            Err(ParseError::Malformed(_)) => self.malformed_skipped += 1,
        }
    }

    pub fn merge(&mut self, other: &ParseStats) {
        self.lines_read += other.lines_read;
        self.creations += other.creations;
        self.deletions += other.deletions;
        self.malformed_skipped += other.malformed_skipped;
        self.other_skipped += other.other_skipped;
    }
}

// ---------------------------------------------------------------------------
// Raw archive layout

#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrStr {
    Num(u64),
    Str(String),
}

impl NumOrStr {
    fn as_u64(&self) -> Option<u64> {
        match self {
            NumOrStr::Num(n) => Some(*n),
            NumOrStr::Str(s) => s.trim().parse().ok(),
        }
    }
}

#[derive(Deserialize)]
struct RawDeleteStatus {
    id: Option<u64>,
    id_str: Option<String>,
    user_id: Option<u64>,
    user_id_str: Option<String>,
}

#[derive(Deserialize)]
struct RawDelete {
    status: Option<RawDeleteStatus>,
    timestamp_ms: Option<NumOrStr>,
}

#[derive(Deserialize)]
struct RawUser {
    id: Option<u64>,
    id_str: Option<String>,
}

#[derive(Deserialize)]
struct RawHashtag {
    text: String,
}

#[derive(Deserialize)]
struct RawMention {
    id: Option<u64>,
    id_str: Option<String>,
}

#[derive(Deserialize, Default)]
struct RawEntities {
    #[serde(default)]
    hashtags: Vec<RawHashtag>,
    #[serde(default)]
    user_mentions: Vec<RawMention>,
    #[serde(default)]
    urls: Vec<IgnoredAny>,
    #[serde(default)]
    media: Vec<IgnoredAny>,
}

#[derive(Deserialize)]
struct RawExtended {
    full_text: Option<String>,
    entities: Option<RawEntities>,
}

#[derive(Deserialize)]
struct RawCoordinates {
    coordinates: Option<[f64; 2]>,
}

#[derive(Deserialize)]
struct RawRecord {
    delete: Option<RawDelete>,
    id: Option<u64>,
    id_str: Option<String>,
    created_at: Option<String>,
    timestamp_ms: Option<NumOrStr>,
    text: Option<String>,
    full_text: Option<String>,
    extended_tweet: Option<RawExtended>,
    user: Option<RawUser>,
    entities: Option<RawEntities>,
    retweeted_status: Option<IgnoredAny>,
    in_reply_to_status_id: Option<u64>,
    in_reply_to_user_id: Option<u64>,
    coordinates: Option<RawCoordinates>,
    lang: Option<String>,
    source: Option<String>,
}

fn malformed(msg: impl Into<String>) -> ParseError {
    ParseError::Malformed(msg.into())
}

fn pick_id(num: Option<u64>, s: Option<&str>) -> Option<u64> {
    num.or_else(|| s.and_then(|s| s.trim().parse().ok()))
}

fn parse_created_at(s: &str) -> Option<Timestamp> {
    chrono::DateTime::parse_from_str(s, "%a %b %d %H:%M:%S %z %Y")
        .ok()
        .map(|dt| Timestamp::from_millis(dt.timestamp_millis()))
}

/// `<a href="...">Twitter for Android</a>` → `Twitter for Android`.
fn strip_anchor(source: &str) -> String {
    match (source.find('>'), source.rfind("</")) {
        (Some(a), Some(b)) if a < b => source[a + 1..b].to_string(),
        _ => source.to_string(),
    }
}

/// Parses one archive line. Blank lines and record types other than
/// statuses and delete notices yield [`Parsed::Skip`].
pub fn parse_stream_line(line: &str) -> Result<Parsed, ParseError> {
    let line = line.trim();
    if line.is_empty() {
        return Ok(Parsed::Skip);
    }
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;

    if let Some(del) = raw.delete {
        let status = del.status.ok_or_else(|| malformed("delete without status"))?;
        let tweet_id = pick_id(status.id, status.id_str.as_deref())
            .ok_or_else(|| malformed("delete without status id"))?;
        let user_id = pick_id(status.user_id, status.user_id_str.as_deref())
            .ok_or_else(|| malformed("delete without user id"))?;
        let ms = del
            .timestamp_ms
            .and_then(|t| t.as_u64())
            .ok_or_else(|| malformed("delete without timestamp_ms"))?;
        return Ok(Parsed::Event(TweetEvent::Deletion {
            tweet_id,
            user_id,
            time: Timestamp::from_millis(ms as i64),
        }));
    }

    let Some(id) = pick_id(raw.id, raw.id_str.as_deref()) else {
        return Ok(Parsed::Skip);
    };
    let Some(user) = raw.user else {
        // Not a status (e.g. a limit notice that happens to carry an id).
        return if raw.text.is_some() || raw.created_at.is_some() {
            Err(malformed("status without user"))
        } else {
            Ok(Parsed::Skip)
        };
    };
    let user_id = pick_id(user.id, user.id_str.as_deref())
        .ok_or_else(|| malformed("status user without id"))?;
    let created_at = raw
        .timestamp_ms
        .and_then(|t| t.as_u64())
        .map(|ms| Timestamp::from_millis(ms as i64))
        .or_else(|| raw.created_at.as_deref().and_then(parse_created_at))
        .ok_or_else(|| malformed("status without a usable creation time"))?;

    let (ext_text, ext_entities) = match raw.extended_tweet {
        Some(ext) => (ext.full_text, ext.entities),
        None => (None, None),
    };
    let text = ext_text.or(raw.full_text).or(raw.text).unwrap_or_default();
    let entities = ext_entities.or(raw.entities).unwrap_or_default();

    let geo = raw
        .coordinates
        .and_then(|c| c.coordinates)
        .and_then(|[lon, lat]| GeoPoint::new(lat, lon).ok());

    Ok(Parsed::Event(TweetEvent::Creation(Tweet {
        id,
        user_id,
        text,
        created_at,
        hashtags: entities.hashtags.into_iter().map(|h| h.text).collect(),
        mentions: entities
            .user_mentions
            .into_iter()
            .filter_map(|m| pick_id(m.id, m.id_str.as_deref()))
            .collect(),
        urls: (entities.urls.len() + entities.media.len()) as u32,
        is_retweet: raw.retweeted_status.is_some(),
        is_reply: raw.in_reply_to_status_id.is_some() || raw.in_reply_to_user_id.is_some(),
        geo,
        lang: raw.lang.filter(|l| !l.is_empty()),
        source_app: raw.source.as_deref().map(strip_anchor),
    })))
}

/// [`parse_stream_line`] on raw bytes; invalid UTF-8 is malformed.
pub fn parse_stream_bytes(line: &[u8]) -> Result<Parsed, ParseError> {
    std::str::from_utf8(line)
        .map_err(|e| malformed(e.to_string()))
        .and_then(parse_stream_line)
}

// ---------------------------------------------------------------------------
// Reading

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compression {
    None,
    Gzip,
    Bzip2,
}

impl Compression {
    pub fn sniff(head: &[u8]) -> Self {
        if head.starts_with(&[0x1f, 0x8b]) {
            Compression::Gzip
        } else if head.starts_with(b"BZh") {
            Compression::Bzip2
        } else {
            Compression::None
        }
    }
}

/// Wraps `source` in the matching decompressor.
pub fn decompress<'a, R: Read + 'a>(source: R, compression: Compression) -> Box<dyn BufRead + 'a> {
    const BUF: usize = 1 << 16;
    match compression {
        Compression::None => Box::new(BufReader::with_capacity(BUF, source)),
        Compression::Gzip => Box::new(BufReader::with_capacity(
            BUF,
            flate2::read::MultiGzDecoder::new(source),
        )),
        Compression::Bzip2 => Box::new(BufReader::with_capacity(
            BUF,
            bzip2::read::MultiBzDecoder::new(source),
        )),
    }
}

/// Opens an archive file, detecting gzip/bzip2 from its magic bytes.
pub fn open_archive(path: &Path) -> io::Result<EventReader<Box<dyn BufRead>>> {
    let mut file = BufReader::new(File::open(path)?);
    let compression = Compression::sniff(file.fill_buf()?);
    Ok(EventReader::new(decompress(file, compression)))
}

/// Streaming iterator over the events of an archive. Malformed and
/// unrecognized lines are counted in [`EventReader::stats`] and skipped;
/// only I/O errors surface as `Err`.
pub struct EventReader<R> {
    source: R,
    buf: Vec<u8>,
    stats: ParseStats,
    done: bool,
}

impl<R: BufRead> EventReader<R> {
    pub fn new(source: R) -> Self {
        Self {
            source,
            buf: Vec::with_capacity(1024),
            stats: ParseStats::default(),
            done: false,
        }
    }

    pub fn stats(&self) -> ParseStats {
        self.stats
    }
}

impl<R: BufRead> Iterator for EventReader<R> {
    type Item = io::Result<TweetEvent>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            self.buf.clear();
            match self.source.read_until(b'\n', &mut self.buf) {
                Ok(0) => self.done = true,
                Ok(_) => {
                    let parsed = parse_stream_bytes(&self.buf);
                    self.stats.record(&parsed);
                    if let Ok(Parsed::Event(ev)) = parsed {
                        return Some(Ok(ev));
                    }
                }
                Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            }
        }
        None
    }
}

/// Reads a whole archive into memory.
pub fn read_stream<R: Read>(
    source: R,
    compression: Compression,
) -> io::Result<(Vec<TweetEvent>, ParseStats)> {
    let mut reader = EventReader::new(decompress(source, compression));
    let events = reader.by_ref().collect::<io::Result<Vec<_>>>()?;
    Ok((events, reader.stats()))
}

// ---------------------------------------------------------------------------
// Writing

#[derive(Serialize)]
struct OutHashtag<'a> {
    text: &'a str,
}

#[derive(Serialize)]
struct OutMention {
    id: u64,
    id_str: String,
}

#[derive(Serialize)]
struct OutUrl {
    url: &'static str,
}

#[derive(Serialize)]
struct OutEntities<'a> {
    hashtags: Vec<OutHashtag<'a>>,
    user_mentions: Vec<OutMention>,
    urls: Vec<OutUrl>,
}

#[derive(Serialize)]
struct OutUser {
    id: u64,
    id_str: String,
}

#[derive(Serialize)]
struct OutPoint {
    #[serde(rename = "type")]
    kind: &'static str,
    coordinates: [f64; 2],
}

#[derive(Serialize)]
struct OutRetweeted {
    id: u64,
}

#[derive(Serialize)]
struct OutStatus<'a> {
    created_at: String,
    id: u64,
    id_str: String,
    text: &'a str,
    source: Option<String>,
    in_reply_to_status_id: Option<u64>,
    user: OutUser,
    coordinates: Option<OutPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    retweeted_status: Option<OutRetweeted>,
    entities: OutEntities<'a>,
    lang: Option<&'a str>,
    timestamp_ms: String,
}

#[derive(Serialize)]
struct OutDeleteStatus {
    id: u64,
    id_str: String,
    user_id: u64,
    user_id_str: String,
}

#[derive(Serialize)]
struct OutDeleteBody {
    status: OutDeleteStatus,
    timestamp_ms: String,
}

#[derive(Serialize)]
struct OutDelete {
    delete: OutDeleteBody,
}

/// Serializes one event as an archive line (without the trailing newline).
pub fn event_to_line(event: &TweetEvent) -> String {
    match event {
        TweetEvent::Creation(t) => {
            let status = OutStatus {
                created_at: t
                    .created_at
                    .to_datetime()
                    .format("%a %b %d %H:%M:%S +0000 %Y")
                    .to_string(),
                id: t.id,
                id_str: t.id.to_string(),
                text: &t.text,
                source: t
                    .source_app
                    .as_ref()
                    .map(|s| format!("<a href=\"https://example.invalid\" rel=\"nofollow\">{s}</a>")),
                // Placeholder parent; the archive only tells us a reply happened.
                in_reply_to_status_id: t.is_reply.then_some(1),
                user: OutUser {
                    id: t.user_id,
                    id_str: t.user_id.to_string(),
                },
                coordinates: t.geo.map(|g| OutPoint {
                    kind: "Point",
                    coordinates: [g.lon(), g.lat()],
                }),
                retweeted_status: t.is_retweet.then_some(OutRetweeted { id: 1 }),
                entities: OutEntities {
                    hashtags: t.hashtags.iter().map(|h| OutHashtag { text: h }).collect(),
                    user_mentions: t
                        .mentions
                        .iter()
                        .map(|&id| OutMention {
                            id,
                            id_str: id.to_string(),
                        })
                        .collect(),
                    urls: (0..t.urls)
                        .map(|_| OutUrl {
                            url: "https://t.co/x",
                        })
                        .collect(),
                },
                lang: t.lang.as_deref(),
                timestamp_ms: t.created_at.as_millis().to_string(),
            };
            serde_json::to_string(&status).expect("status serializes")
        }
        TweetEvent::Deletion {
            tweet_id,
            user_id,
            time,
        } => serde_json::to_string(&OutDelete {
            delete: OutDeleteBody {
                status: OutDeleteStatus {
                    id: *tweet_id,
                    id_str: tweet_id.to_string(),
                    user_id: *user_id,
                    user_id_str: user_id.to_string(),
                },
                timestamp_ms: time.as_millis().to_string(),
            },
        })
        .expect("delete serializes"),
    }
}

pub fn write_events<'a, W: Write>(
    mut out: W,
    events: impl IntoIterator<Item = &'a TweetEvent>,
) -> io::Result<()> {
    for ev in events {
        out.write_all(event_to_line(ev).as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const STATUS: &str = r#"{"created_at":"Mon Jul 01 18:00:00 +0000 2019","id":7,"id_str":"7","text":"a b","user":{"id":3,"id_str":"3"},"entities":{"hashtags":[],"user_mentions":[],"urls":[]}}"#;

    #[test]
    fn status_maps_to_creation() {
        let Parsed::Event(TweetEvent::Creation(t)) = parse_stream_line(STATUS).unwrap() else {
            panic!("expected creation");
        };
        assert_eq!(t.id, 7);
        assert_eq!(t.user_id, 3);
        assert_eq!(t.text, "a b");
        assert_eq!(t.created_at.to_iso(), "2019-07-01T18:00:00Z");
        assert!(!t.is_retweet && !t.is_reply);
    }

    #[test]
    fn delete_notice_maps_to_deletion() {
        let line = r#"{"delete":{"status":{"id":7,"user_id":3},"timestamp_ms":"1000"}}"#;
        assert_eq!(
            parse_stream_line(line).unwrap(),
            Parsed::Event(TweetEvent::Deletion {
                tweet_id: 7,
                user_id: 3,
                time: Timestamp::from_secs(1),
            })
        );
    }

    #[test]
    fn delete_notice_with_string_ids() {
        let line = r#"{"delete":{"status":{"id_str":"18446744073709551615","user_id_str":"9"},"timestamp_ms":1500}}"#;
        let Parsed::Event(TweetEvent::Deletion { tweet_id, time, .. }) =
            parse_stream_line(line).unwrap()
        else {
            panic!()
        };
        assert_eq!(tweet_id, u64::MAX);
        assert_eq!(time.as_millis(), 1500);
    }

    #[test]
    fn skips_and_malformed() {
        assert_eq!(parse_stream_line("").unwrap(), Parsed::Skip);
        assert_eq!(parse_stream_line("   ").unwrap(), Parsed::Skip);
        assert_eq!(
            parse_stream_line(r#"{"limit":{"track":12,"timestamp_ms":"1"}}"#).unwrap(),
            Parsed::Skip
        );
        assert!(parse_stream_line("{not json").is_err());
        assert!(parse_stream_line(r#"{"delete":{"status":{"id":1,"user_id":2}}}"#).is_err());
        assert!(parse_stream_line(r#"{"id":1,"text":"x"}"#).is_err());
    }

    #[test]
    fn extended_entities_and_metadata() {
        let line = r#"{"created_at":"Mon Jul 01 18:00:00 +0000 2019","timestamp_ms":"1562004000123","id":9,"text":"trunc","truncated":true,
            "extended_tweet":{"full_text":"full #Tag @x","entities":{"hashtags":[{"text":"Tag"}],"user_mentions":[{"id":44}],"urls":[{"url":"u"}],"media":[{}]}},
            "user":{"id_str":"5"},"retweeted_status":{"id":1},"in_reply_to_status_id":null,
            "coordinates":{"type":"Point","coordinates":[28.98,41.01]},"lang":"tr",
            "source":"<a href=\"http://twitter.com/download/android\" rel=\"nofollow\">Twitter for Android</a>"}"#;
        let Parsed::Event(TweetEvent::Creation(t)) = parse_stream_line(line).unwrap() else {
            panic!()
        };
        assert_eq!(t.text, "full #Tag @x");
        assert_eq!(t.hashtags, ["Tag"]);
        assert_eq!(t.mentions, [44]);
        assert_eq!(t.urls, 2);
        assert!(t.is_retweet);
        assert!(!t.is_reply);
        assert_eq!(t.created_at.as_millis(), 1_562_004_000_123);
        let g = t.geo.unwrap();
        assert_eq!((g.lat(), g.lon()), (41.01, 28.98));
        assert_eq!(t.source_app.as_deref(), Some("Twitter for Android"));
        assert_eq!(t.lang.as_deref(), Some("tr"));
    }

    #[test]
    fn reader_counts_lines() {
        let input = format!(
            "{STATUS}\n{}\n{}\n",
            r#"{"delete":{"status":{"id":7,"user_id":3},"timestamp_ms":"1000"}}"#,
            STATUS.replace(r#""id":7"#, r#""id":8"#)
        );
        let (events, stats) = read_stream(input.as_bytes(), Compression::None).unwrap();
        assert_eq!(events.len(), 3);
        assert_eq!(stats.malformed_skipped, 0);

        let input = format!("{STATUS}\ngarbage\n{STATUS}");
        let (events, stats) = read_stream(input.as_bytes(), Compression::None).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(stats.malformed_skipped, 1);
        assert_eq!(stats.lines_read, 3);
        assert!(stats.reconciles());
    }

    #[test]
    fn gzip_round_trip() {
        use flate2::write::GzEncoder;
        let mut enc = GzEncoder::new(Vec::new(), flate2::Compression::fast());
        writeln!(enc, "{STATUS}").unwrap();
        let bytes = enc.finish().unwrap();
        assert_eq!(Compression::sniff(&bytes), Compression::Gzip);
        let (events, stats) = read_stream(&bytes[..], Compression::Gzip).unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(stats.creations, 1);
    }

    #[test]
    fn bzip2_round_trip() {
        use bzip2::write::BzEncoder;
        let mut enc = BzEncoder::new(Vec::new(), bzip2::Compression::fast());
        writeln!(enc, "{STATUS}").unwrap();
        let bytes = enc.finish().unwrap();
        assert_eq!(Compression::sniff(&bytes), Compression::Bzip2);
        let (events, _) = read_stream(&bytes[..], Compression::Bzip2).unwrap();
        assert_eq!(events.len(), 1);
    }

    #[test]
    fn writer_output_parses_back() {
        let mut t = Tweet::new(11, 22, Timestamp::from_millis(1_562_004_000_500), "x #Y @z");
        t.hashtags = vec!["Y".into()];
        t.mentions = vec![33];
        t.urls = 1;
        t.is_reply = true;
        t.geo = Some(GeoPoint::new(39.93, 32.86).unwrap());
        t.lang = Some("tr".into());
        t.source_app = Some("Twitter for iPhone".into());
        let ev = TweetEvent::Creation(t);
        let Parsed::Event(back) = parse_stream_line(&event_to_line(&ev)).unwrap() else {
            panic!()
        };
        assert_eq!(back, ev);

        let del = TweetEvent::Deletion {
            tweet_id: 11,
            user_id: 22,
            time: Timestamp::from_millis(1_562_004_060_001),
        };
        assert_eq!(
            parse_stream_line(&event_to_line(&del)).unwrap(),
            Parsed::Event(del)
        );
    }

    proptest! {
        #[test]
        fn arbitrary_bytes_reconcile(lines in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 0..40), 0..20)) {
            let mut input = Vec::new();
            for l in &lines {
                input.extend(l.iter().copied().filter(|&b| b != b'\n'));
                input.push(b'\n');
            }
            let (events, stats) = read_stream(&input[..], Compression::None).unwrap();
            prop_assert!(stats.reconciles());
            prop_assert_eq!(stats.lines_read, lines.len() as u64);
            prop_assert_eq!(events.len() as u64, stats.creations + stats.deletions);
        }
    }
}
