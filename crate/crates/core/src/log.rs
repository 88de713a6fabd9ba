//! Learner event logs: parsing, filtering of non-learning actions, and
//! assembly of per-learner learning activity sequences.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::km::{normalize_phrase, KnowledgeMap, UnitId};

pub const CSV_HEADER: [&str; 8] = [
    "id",
    "user_id",
    "user_name",
    "question_id",
    "action_type",
    "object_id",
    "action_object",
    "timestamp",
];

/// Action types that never count as learning activity.
pub const EXCLUDED_ACTIONS: [&str; 5] = ["login", "log in", "exit", "submit", "post"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearningEvent {
    pub id: String,
    pub user_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user_name: Option<String>,
    pub question_id: String,
    pub action_type: String,
    #[serde(default)]
    pub object_id: String,
    #[serde(default)]
    pub action_object: String,
    /// Milliseconds since the Unix epoch.
    pub timestamp: i64,
}

impl LearningEvent {
    fn check(&self) -> Result<(), String> {
        if self.user_id.trim().is_empty() {
            return Err("empty user_id".into());
        }
        if self.question_id.trim().is_empty() {
            return Err("empty question_id".into());
        }
        if self.timestamp < 0 {
            return Err(format!("negative timestamp {}", self.timestamp));
        }
        Ok(())
    }

    pub fn is_excluded(&self) -> bool {
        let action = normalize_phrase(&self.action_type);
        EXCLUDED_ACTIONS.contains(&action.as_str())
    }
}

/// Orders event ids numerically when both are integers, lexically otherwise.
pub fn compare_event_ids(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        _ => a.cmp(b),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogFormat {
    Csv,
    Jsonl,
}

impl FromStr for LogFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(LogFormat::Csv),
            "jsonl" | "ndjson" => Ok(LogFormat::Jsonl),
            other => Err(format!("unknown log format `{other}` (expected csv or jsonl)")),
        }
    }
}

impl fmt::Display for LogFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogFormat::Csv => "csv",
            LogFormat::Jsonl => "jsonl",
        })
    }
}

/// A record that could not be turned into an event.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct RecordError {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum LogError {
    #[error("invalid log header: {0}")]
    Header(String),
    #[error("log is not valid UTF-8 or could not be read: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedLog {
    pub events: Vec<LearningEvent>,
    pub errors: Vec<RecordError>,
}

pub fn parse_log(reader: impl Read, format: LogFormat) -> Result<ParsedLog, LogError> {
    match format {
        LogFormat::Csv => parse_csv(reader),
        LogFormat::Jsonl => parse_jsonl(reader),
    }
}

fn parse_csv(reader: impl Read) -> Result<ParsedLog, LogError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().map(str::trim).ne(CSV_HEADER.iter().copied()) {
        return Err(LogError::Header(format!(
            "expected `{}`, found `{}`",
            CSV_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut parsed = ParsedLog::default();
    for record in rdr.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                if matches!(e.kind(), csv::ErrorKind::Io(_) | csv::ErrorKind::Utf8 { .. }) && line == 0 {
                    return Err(e.into());
                }
                parsed.errors.push(RecordError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != CSV_HEADER.len() {
            parsed.errors.push(RecordError {
                line,
                message: format!("expected {} fields, found {}", CSV_HEADER.len(), record.len()),
            });
            continue;
        }
        let field = |i: usize| record.get(i).unwrap_or_default().to_string();
        let timestamp = match field(7).trim().parse::<i64>() {
            Ok(t) => t,
            Err(_) => {
                parsed.errors.push(RecordError {
                    line,
                    message: format!("timestamp `{}` is not an integer", field(7)),
                });
                continue;
            }
        };
        let user_name = field(2);
        let event = LearningEvent {
            id: field(0),
            user_id: field(1),
            user_name: (!user_name.is_empty()).then_some(user_name),
            question_id: field(3),
            action_type: field(4),
            object_id: field(5),
            action_object: field(6),
            timestamp,
        };
        match event.check() {
            Ok(()) => parsed.events.push(event),
            Err(message) => parsed.errors.push(RecordError { line, message }),
        }
    }
    Ok(parsed)
}

fn parse_jsonl(reader: impl Read) -> Result<ParsedLog, LogError> {
    let mut parsed = ParsedLog::default();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = idx as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<LearningEvent>(&line) {
            Ok(event) => match event.check() {
                Ok(()) => parsed.events.push(event),
                Err(message) => parsed.errors.push(RecordError { line: lineno, message }),
            },
            Err(e) => parsed.errors.push(RecordError {
                line: lineno,
                message: e.to_string(),
            }),
        }
    }
    Ok(parsed)
}

pub fn write_log(mut writer: impl Write, events: &[LearningEvent], format: LogFormat) -> Result<(), LogError> {
    match format {
        LogFormat::Csv => {
            let mut wtr = csv::Writer::from_writer(writer);
            wtr.write_record(CSV_HEADER)?;
            for e in events {
                let ts = e.timestamp.to_string();
                wtr.write_record([
                    e.id.as_str(),
                    &e.user_id,
                    e.user_name.as_deref().unwrap_or(""),
                    &e.question_id,
                    &e.action_type,
                    &e.object_id,
                    &e.action_object,
                    &ts,
                ])?;
            }
            wtr.flush()?;
        }
        LogFormat::Jsonl => {
            for e in events {
                serde_json::to_writer(&mut writer, e).map_err(std::io::Error::from)?;
                writer.write_all(b"\n")?;
            }
            writer.flush()?;
        }
    }
    Ok(())
}

/// Drops login/exit/submit/post actions, keeping order. Returns the kept
/// events and how many were removed.
pub fn filter_events(events: Vec<LearningEvent>) -> (Vec<LearningEvent>, usize) {
    let before = events.len();
    let kept: Vec<LearningEvent> = events.into_iter().filter(|e| !e.is_excluded()).collect();
    let removed = before - kept.len();
    (kept, removed)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearningActivitySequence {
    pub user_id: String,
    pub question_id: String,
    pub visits: Vec<UnitId>,
}

/// An event whose object could not be resolved to a unit of the map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnresolvedVisit {
    pub event_id: String,
    pub user_id: String,
    pub object_id: String,
}

impl fmt::Display for UnresolvedVisit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "event {} (user {}): object `{}` is not a unit of the map",
            self.event_id, self.user_id, self.object_id
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LasBuild {
    /// One sequence per learner, ordered by user id.
    pub sequences: Vec<LearningActivitySequence>,
    pub unresolved: Vec<UnresolvedVisit>,
}

/// Groups a question's events by learner into time-ordered unit visits.
/// Consecutive repeat visits to the same unit collapse into one.
pub fn build_las(events: &[LearningEvent], km: &KnowledgeMap, question_id: &str) -> LasBuild {
    let mut by_user: BTreeMap<&str, Vec<&LearningEvent>> = BTreeMap::new();
    for e in events.iter().filter(|e| e.question_id == question_id) {
        by_user.entry(e.user_id.as_str()).or_default().push(e);
    }
    let mut out = LasBuild::default();
    for (user, mut evs) in by_user {
        evs.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| compare_event_ids(&a.id, &b.id)));
        let mut visits: Vec<UnitId> = Vec::new();
        for e in evs {
            let id = UnitId::new(e.object_id.trim());
            if !km.contains(&id) {
                out.unresolved.push(UnresolvedVisit {
                    event_id: e.id.clone(),
                    user_id: e.user_id.clone(),
                    object_id: e.object_id.clone(),
                });
                continue;
            }
            if visits.last() != Some(&id) {
                visits.push(id);
            }
        }
        if !visits.is_empty() {
            out.sequences.push(LearningActivitySequence {
                user_id: user.to_string(),
                question_id: question_id.to_string(),
                visits,
            });
        }
    }
    out
}

/// Distinct question ids in first-seen order.
pub fn question_ids(events: &[LearningEvent]) -> Vec<String> {
    let mut seen = Vec::new();
    for e in events {
        if !seen.contains(&e.question_id) {
            seen.push(e.question_id.clone());
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ev(id: &str, user: &str, action: &str, object: &str, ts: i64) -> LearningEvent {
        LearningEvent {
            id: id.into(),
            user_id: user.into(),
            user_name: None,
            question_id: "q".into(),
            action_type: action.into(),
            object_id: object.into(),
            action_object: String::new(),
            timestamp: ts,
        }
    }

    const HEADER: &str = "id,user_id,user_name,question_id,action_type,object_id,action_object,timestamp\n";

    #[test]
    fn parses_csv_in_file_order() {
        let text = format!(
            "{HEADER}1,u1,Ann,q,visit,array,Array,100\n2,u1,Ann,q,visit,array-type,Array Type,200\n3,u2,,q,login,,,50\n"
        );
        let parsed = parse_log(text.as_bytes(), LogFormat::Csv).unwrap();
        assert!(parsed.errors.is_empty());
        assert_eq!(parsed.events.len(), 3);
        assert_eq!(parsed.events[0].id, "1");
        assert_eq!(parsed.events[2].user_name, None);
        assert_eq!(parsed.events[1].user_name.as_deref(), Some("Ann"));
    }

    #[test]
    fn bad_timestamp_is_a_record_error() {
        let text = format!("{HEADER}1,u1,,q,visit,a,,100\n2,u1,,q,visit,b,,soon\n3,u1,,q,visit,c,,300\n");
        let parsed = parse_log(text.as_bytes(), LogFormat::Csv).unwrap();
        assert_eq!(parsed.events.len(), 2);
        assert_eq!(parsed.errors.len(), 1);
        assert_eq!(parsed.errors[0].line, 3);
    }

    #[test]
    fn short_row_and_negative_timestamp_are_reported() {
        let text = format!("{HEADER}1,u1,,q,visit\n2,u1,,q,visit,b,,-5\n");
        let parsed = parse_log(text.as_bytes(), LogFormat::Csv).unwrap();
        assert!(parsed.events.is_empty());
        assert_eq!(parsed.errors.len(), 2);
    }

    #[test]
    fn header_only_is_empty() {
        let parsed = parse_log(HEADER.as_bytes(), LogFormat::Csv).unwrap();
        assert!(parsed.events.is_empty() && parsed.errors.is_empty());
    }

    #[test]
    fn wrong_header_is_fatal() {
        let err = parse_log("id,user,ts\n1,u,5\n".as_bytes(), LogFormat::Csv).unwrap_err();
        assert!(matches!(err, LogError::Header(_)));
    }

    #[test]
    fn jsonl_records() {
        let text = r#"{"id":"1","user_id":"u","question_id":"q","action_type":"visit","object_id":"a","action_object":"A","timestamp":5}

{"id":"2","user_id":"u","question_id":"q","action_type":"visit","object_id":"b","timestamp":"x"}
{"id":"3","user_id":"","question_id":"q","action_type":"visit","object_id":"b","timestamp":7}
"#;
        let parsed = parse_log(text.as_bytes(), LogFormat::Jsonl).unwrap();
        assert_eq!(parsed.events.len(), 1);
        assert_eq!(parsed.errors.iter().map(|e| e.line).collect::<Vec<_>>(), vec![3, 4]);
    }

    #[test]
    fn csv_and_jsonl_round_trip() {
        let mut events = vec![ev("1", "u1", "visit", "a", 1), ev("2", "u,2", "visit", "b \"x\"", 2)];
        events[0].user_name = Some("Ann".into());
        for format in [LogFormat::Csv, LogFormat::Jsonl] {
            let mut buf = Vec::new();
            write_log(&mut buf, &events, format).unwrap();
            let parsed = parse_log(buf.as_slice(), format).unwrap();
            assert!(parsed.errors.is_empty());
            assert_eq!(parsed.events, events);
        }
    }

    #[test]
    fn filtering_removes_only_listed_actions() {
        let events = vec![
            ev("1", "u", "visit", "a", 1),
            ev("2", "u", "Login", "", 2),
            ev("3", "u", "visit", "b", 3),
            ev("4", "u", "post", "", 4),
            ev("5", "u", "Log  In", "", 5),
            ev("6", "u", "bookmark", "c", 6),
        ];
        let (kept, removed) = filter_events(events);
        assert_eq!(removed, 3);
        assert_eq!(kept.iter().map(|e| e.id.as_str()).collect::<Vec<_>>(), vec!["1", "3", "6"]);
        let (again, removed_again) = filter_events(kept.clone());
        assert_eq!(again, kept);
        assert_eq!(removed_again, 0);
    }

    #[test]
    fn filtering_everything_leaves_nothing() {
        let (kept, removed) = filter_events(vec![ev("1", "u", "exit", "", 1), ev("2", "u", "SUBMIT", "", 2)]);
        assert!(kept.is_empty());
        assert_eq!(removed, 2);
    }

    #[test]
    fn builds_sequences_per_user_in_time_order() {
        let km = fixtures::c_course_map();
        let events = vec![
            ev("1", "u2", "visit", "pointer-type", 30),
            ev("2", "u1", "visit", "array-type", 20),
            ev("3", "u1", "visit", "array-index", 10),
            ev("4", "u2", "visit", "null-pointer", 5),
        ];
        let built = build_las(&events, &km, "q");
        assert_eq!(built.sequences.len(), 2);
        assert_eq!(built.sequences[0].user_id, "u1");
        assert_eq!(built.sequences[0].visits, vec![UnitId::new("array-index"), UnitId::new("array-type")]);
        assert_eq!(built.sequences[1].visits, vec![UnitId::new("null-pointer"), UnitId::new("pointer-type")]);
    }

    #[test]
    fn collapses_consecutive_repeats_only() {
        let km = fixtures::c_course_map();
        let events = vec![
            ev("1", "u", "visit", "array", 1),
            ev("2", "u", "visit", "array", 2),
            ev("3", "u", "visit", "pointer", 3),
            ev("4", "u", "visit", "array", 4),
        ];
        let built = build_las(&events, &km, "q");
        let visits: Vec<&str> = built.sequences[0].visits.iter().map(UnitId::as_str).collect();
        assert_eq!(visits, vec!["array", "pointer", "array"]);
    }

    #[test]
    fn equal_timestamps_break_ties_by_numeric_id() {
        let km = fixtures::c_course_map();
        let events = vec![ev("10", "u", "visit", "pointer", 1), ev("9", "u", "visit", "array", 1)];
        let built = build_las(&events, &km, "q");
        assert_eq!(built.sequences[0].visits[0].as_str(), "array");
    }

    #[test]
    fn unresolved_objects_are_reported_and_skipped() {
        let km = fixtures::c_course_map();
        let events = vec![ev("1", "u", "visit", "array", 1), ev("2", "u", "visit", "vector", 2)];
        let built = build_las(&events, &km, "q");
        assert_eq!(built.sequences[0].visits.len(), 1);
        assert_eq!(built.unresolved.len(), 1);
        assert_eq!(built.unresolved[0].object_id, "vector");
    }

    #[test]
    fn learner_with_only_filtered_actions_gets_no_sequence() {
        let km = fixtures::c_course_map();
        let (kept, _) = filter_events(vec![ev("1", "u", "login", "", 1), ev("2", "v", "visit", "array", 2)]);
        let built = build_las(&kept, &km, "q");
        assert_eq!(built.sequences.len(), 1);
        assert_eq!(built.sequences[0].user_id, "v");
    }
}
