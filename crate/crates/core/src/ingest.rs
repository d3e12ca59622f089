//! Event-log parsing, validation, and the external per-player metrics join.
//!
//! Two encodings share one field vocabulary: a fixed-header CSV pair (face-off
//! rows plus a companion sequence file keyed by faceoff_id) and JSON lines
//! with the same field names and an inline `sequence` array. Row-level
//! problems become diagnostics with line numbers; only unreadable input or a
//! header mismatch is fatal.

use crate::rink::{DotId, Handedness, RinkSpec};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("unreadable input: {0}")]
    UnreadableInput(String),
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error("duplicate metrics row for player {0}")]
    DuplicateMetricsRow(String),
}

/// Game-relative team identifier. The face-off schema resolves everything
/// against `home_attack_sign`, so teams are named by home/away role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Team {
    Home,
    Away,
}

impl Team {
    pub fn parse(s: &str) -> Option<Team> {
        match s.to_ascii_lowercase().as_str() {
            "home" => Some(Team::Home),
            "away" => Some(Team::Away),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Team::Home => "home",
            Team::Away => "away",
        }
    }

    pub fn other(&self) -> Team {
        match self {
            Team::Home => Team::Away,
            Team::Away => Team::Home,
        }
    }

    /// Attacking direction along x for this team.
    pub fn attack_sign(&self, home_attack_sign: i8) -> i8 {
        match self {
            Team::Home => home_attack_sign,
            Team::Away => -home_attack_sign,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TouchKind {
    /// Controlled pass receipt.
    Reception,
    /// Loose-puck pickup.
    Recovery,
}

impl TouchKind {
    pub fn parse(s: &str) -> Option<TouchKind> {
        match s {
            "Reception" => Some(TouchKind::Reception),
            "Recovery" => Some(TouchKind::Recovery),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TouchKind::Reception => "Reception",
            TouchKind::Recovery => "Recovery",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SequenceKind {
    ShotOnNet,
    ShotAttempt,
    ZoneExit,
    ZoneEntry,
    PossessionChange,
    Stoppage,
}

impl SequenceKind {
    pub fn parse(s: &str) -> Option<SequenceKind> {
        match s {
            "ShotOnNet" => Some(SequenceKind::ShotOnNet),
            "ShotAttempt" => Some(SequenceKind::ShotAttempt),
            "ZoneExit" => Some(SequenceKind::ZoneExit),
            "ZoneEntry" => Some(SequenceKind::ZoneEntry),
            "PossessionChange" => Some(SequenceKind::PossessionChange),
            "Stoppage" => Some(SequenceKind::Stoppage),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SequenceKind::ShotOnNet => "ShotOnNet",
            SequenceKind::ShotAttempt => "ShotAttempt",
            SequenceKind::ZoneExit => "ZoneExit",
            SequenceKind::ZoneEntry => "ZoneEntry",
            SequenceKind::PossessionChange => "PossessionChange",
            SequenceKind::Stoppage => "Stoppage",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstTouch {
    pub kind: TouchKind,
    pub time: f64,
    pub location: (f64, f64),
    pub player: String,
    pub player_team: Team,
    pub player_predrop_location: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceEvent {
    pub kind: SequenceKind,
    pub time: f64,
    pub location: Option<(f64, f64)>,
    pub team: Team,
}

/// One face-off with both centers, the first puck touch, and the subsequent
/// play sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceoffRecord {
    pub game_id: String,
    pub faceoff_id: String,
    pub period: u32,
    pub drop_time: f64,
    pub dot_id: DotId,
    pub home_attack_sign: i8,
    pub winner_team: Team,
    pub winner_player: String,
    pub loser_player: String,
    pub winner_hand: Option<Handedness>,
    pub loser_hand: Option<Handedness>,
    pub first_touch: FirstTouch,
    pub sequence: Vec<SequenceEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogFormat {
    Csv,
    Json,
}

pub const FACEOFF_HEADER: [&str; 19] = [
    "game_id",
    "faceoff_id",
    "period",
    "drop_time_s",
    "dot_id",
    "home_attack_sign",
    "winner_team",
    "winner_player",
    "loser_player",
    "winner_hand",
    "loser_hand",
    "touch_kind",
    "touch_time_s",
    "touch_x",
    "touch_y",
    "touch_player",
    "touch_team",
    "touch_predrop_x",
    "touch_predrop_y",
];

pub const SEQUENCE_HEADER: [&str; 6] = ["faceoff_id", "kind", "time_s", "x", "y", "team"];

fn parse_f64(field: &str, name: &str) -> Result<f64, String> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| format!("bad {name}: {field:?}"))
}

fn parse_opt_f64(field: &str, name: &str) -> Result<Option<f64>, String> {
    let t = field.trim();
    if t.is_empty() {
        Ok(None)
    } else {
        Ok(Some(parse_f64(t, name)?))
    }
}

fn parse_attack_sign(field: &str) -> Result<i8, String> {
    match field.trim() {
        "1" | "+1" => Ok(1),
        "-1" => Ok(-1),
        other => Err(format!("bad home_attack_sign: {other:?}")),
    }
}

fn parse_team(field: &str, name: &str) -> Result<Team, String> {
    Team::parse(field.trim()).ok_or_else(|| format!("bad {name} (expected home/away): {field:?}"))
}

fn parse_hand(field: &str, name: &str) -> Result<Option<Handedness>, String> {
    let t = field.trim();
    if t.is_empty() {
        return Ok(None);
    }
    Handedness::parse(t)
        .map(Some)
        .ok_or_else(|| format!("bad {name} (expected L/R): {t:?}"))
}

fn record_from_fields(
    row: &csv::StringRecord,
    sequence: Vec<SequenceEvent>,
) -> Result<FaceoffRecord, String> {
    if row.len() != FACEOFF_HEADER.len() {
        return Err(format!(
            "expected {} fields, found {}",
            FACEOFF_HEADER.len(),
            row.len()
        ));
    }
    let get = |i: usize| row.get(i).unwrap_or("");
    let predrop_x = parse_opt_f64(get(17), "touch_predrop_x")?;
    let predrop_y = parse_opt_f64(get(18), "touch_predrop_y")?;
    let predrop = match (predrop_x, predrop_y) {
        (Some(x), Some(y)) => Some((x, y)),
        (None, None) => None,
        _ => return Err("touch_predrop_x/y must both be present or both empty".to_string()),
    };
    let record = FaceoffRecord {
        game_id: get(0).trim().to_string(),
        faceoff_id: get(1).trim().to_string(),
        period: get(2)
            .trim()
            .parse::<u32>()
            .map_err(|_| format!("bad period: {:?}", get(2)))?,
        drop_time: parse_f64(get(3), "drop_time_s")?,
        dot_id: DotId::parse(get(4).trim()).map_err(|e| e.to_string())?,
        home_attack_sign: parse_attack_sign(get(5))?,
        winner_team: parse_team(get(6), "winner_team")?,
        winner_player: get(7).trim().to_string(),
        loser_player: get(8).trim().to_string(),
        winner_hand: parse_hand(get(9), "winner_hand")?,
        loser_hand: parse_hand(get(10), "loser_hand")?,
        first_touch: FirstTouch {
            kind: TouchKind::parse(get(11).trim())
                .ok_or_else(|| format!("bad touch_kind: {:?}", get(11)))?,
            time: parse_f64(get(12), "touch_time_s")?,
            location: (parse_f64(get(13), "touch_x")?, parse_f64(get(14), "touch_y")?),
            player: get(15).trim().to_string(),
            player_team: parse_team(get(16), "touch_team")?,
            player_predrop_location: predrop,
        },
        sequence,
    };
    check_record(&record)?;
    Ok(record)
}

/// Row-level invariants enforced at parse time. Bounds checks are left to
/// `validate_records`, which reports rather than rejects.
fn check_record(r: &FaceoffRecord) -> Result<(), String> {
    if r.first_touch.time < r.drop_time {
        return Err("non-monotonic time: first touch before puck drop".to_string());
    }
    let mut prev = r.first_touch.time;
    for ev in &r.sequence {
        if ev.time < prev {
            return Err("non-monotonic time in sequence".to_string());
        }
        prev = ev.time;
    }
    if r.winner_player == r.loser_player {
        return Err("winner_player equals loser_player".to_string());
    }
    Ok(())
}

/// Parse the companion sequence CSV into per-faceoff event lists.
pub fn parse_sequences_csv<R: Read>(
    reader: R,
) -> Result<(BTreeMap<String, Vec<SequenceEvent>>, Vec<Diagnostic>), IngestError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| IngestError::UnreadableInput(e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != SEQUENCE_HEADER {
        return Err(IngestError::SchemaViolation(format!(
            "sequence header mismatch: {:?}",
            header
        )));
    }
    let mut out: BTreeMap<String, Vec<SequenceEvent>> = BTreeMap::new();
    let mut diagnostics = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                diagnostics.push(Diagnostic {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let parsed = (|| -> Result<(String, SequenceEvent), String> {
            let get = |i: usize| row.get(i).unwrap_or("");
            let kind = SequenceKind::parse(get(1).trim())
                .ok_or_else(|| format!("unknown sequence kind: {:?}", get(1)))?;
            let x = parse_opt_f64(get(3), "x")?;
            let y = parse_opt_f64(get(4), "y")?;
            let location = match (x, y) {
                (Some(x), Some(y)) => Some((x, y)),
                (None, None) => None,
                _ => return Err("x/y must both be present or both empty".to_string()),
            };
            if location.is_none() && kind != SequenceKind::Stoppage {
                return Err(format!("missing location for {}", kind.as_str()));
            }
            Ok((
                get(0).trim().to_string(),
                SequenceEvent {
                    kind,
                    time: parse_f64(get(2), "time_s")?,
                    location,
                    team: parse_team(get(5), "team")?,
                },
            ))
        })();
        match parsed {
            Ok((id, ev)) => out.entry(id).or_default().push(ev),
            Err(message) => diagnostics.push(Diagnostic { line, message }),
        }
    }
    Ok((out, diagnostics))
}

/// Parse the face-off CSV, attaching pre-parsed sequences by faceoff_id.
pub fn parse_faceoffs_csv<R: Read>(
    reader: R,
    sequences: &BTreeMap<String, Vec<SequenceEvent>>,
) -> Result<(Vec<FaceoffRecord>, Vec<Diagnostic>), IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| IngestError::UnreadableInput(e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != FACEOFF_HEADER {
        return Err(IngestError::SchemaViolation(format!(
            "face-off header mismatch: {:?}",
            header
        )));
    }
    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                diagnostics.push(Diagnostic {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let seq = row
            .get(1)
            .and_then(|id| sequences.get(id.trim()))
            .cloned()
            .unwrap_or_default();
        match record_from_fields(&row, seq) {
            Ok(rec) => records.push(rec),
            Err(message) => diagnostics.push(Diagnostic { line, message }),
        }
    }
    Ok((records, diagnostics))
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonSequenceEvent {
    kind: String,
    time_s: f64,
    #[serde(default)]
    x: Option<f64>,
    #[serde(default)]
    y: Option<f64>,
    team: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonRow {
    game_id: String,
    faceoff_id: String,
    period: u32,
    drop_time_s: f64,
    dot_id: String,
    home_attack_sign: i8,
    winner_team: String,
    winner_player: String,
    loser_player: String,
    #[serde(default)]
    winner_hand: Option<String>,
    #[serde(default)]
    loser_hand: Option<String>,
    touch_kind: String,
    touch_time_s: f64,
    touch_x: f64,
    touch_y: f64,
    touch_player: String,
    touch_team: String,
    #[serde(default)]
    touch_predrop_x: Option<f64>,
    #[serde(default)]
    touch_predrop_y: Option<f64>,
    #[serde(default)]
    sequence: Vec<JsonSequenceEvent>,
}

fn record_from_json(row: JsonRow) -> Result<FaceoffRecord, String> {
    let predrop = match (row.touch_predrop_x, row.touch_predrop_y) {
        (Some(x), Some(y)) => Some((x, y)),
        (None, None) => None,
        _ => return Err("touch_predrop_x/y must both be present or both absent".to_string()),
    };
    let mut sequence = Vec::with_capacity(row.sequence.len());
    for ev in row.sequence {
        let kind = SequenceKind::parse(&ev.kind)
            .ok_or_else(|| format!("unknown sequence kind: {:?}", ev.kind))?;
        let location = match (ev.x, ev.y) {
            (Some(x), Some(y)) => Some((x, y)),
            (None, None) => None,
            _ => return Err("sequence x/y must both be present or both absent".to_string()),
        };
        if location.is_none() && kind != SequenceKind::Stoppage {
            return Err(format!("missing location for {}", kind.as_str()));
        }
        sequence.push(SequenceEvent {
            kind,
            time: ev.time_s,
            location,
            team: parse_team(&ev.team, "team")?,
        });
    }
    let hand = |h: &Option<String>, name: &str| -> Result<Option<Handedness>, String> {
        match h {
            None => Ok(None),
            Some(s) => parse_hand(s, name),
        }
    };
    let record = FaceoffRecord {
        winner_hand: hand(&row.winner_hand, "winner_hand")?,
        loser_hand: hand(&row.loser_hand, "loser_hand")?,
        game_id: row.game_id,
        faceoff_id: row.faceoff_id,
        period: row.period,
        drop_time: row.drop_time_s,
        dot_id: DotId::parse(&row.dot_id).map_err(|e| e.to_string())?,
        home_attack_sign: if row.home_attack_sign == 1 || row.home_attack_sign == -1 {
            row.home_attack_sign
        } else {
            return Err(format!("bad home_attack_sign: {}", row.home_attack_sign));
        },
        winner_team: parse_team(&row.winner_team, "winner_team")?,
        winner_player: row.winner_player,
        loser_player: row.loser_player,
        first_touch: FirstTouch {
            kind: TouchKind::parse(&row.touch_kind)
                .ok_or_else(|| format!("bad touch_kind: {:?}", row.touch_kind))?,
            time: row.touch_time_s,
            location: (row.touch_x, row.touch_y),
            player: row.touch_player,
            player_team: parse_team(&row.touch_team, "touch_team")?,
            player_predrop_location: predrop,
        },
        sequence,
    };
    check_record(&record)?;
    Ok(record)
}

/// Parse JSON lines; each line carries the CSV field names plus an inline
/// `sequence` array.
pub fn parse_jsonl<R: BufRead>(
    reader: R,
) -> Result<(Vec<FaceoffRecord>, Vec<Diagnostic>), IngestError> {
    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| IngestError::UnreadableInput(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Result<FaceoffRecord, String> = serde_json::from_str::<JsonRow>(&line)
            .map_err(|e| e.to_string())
            .and_then(record_from_json);
        match parsed {
            Ok(rec) => records.push(rec),
            Err(message) => diagnostics.push(Diagnostic {
                line: line_no,
                message,
            }),
        }
    }
    Ok((records, diagnostics))
}

/// Serialize records to the face-off CSV schema, in input order.
pub fn write_faceoffs_csv<W: Write>(records: &[FaceoffRecord], writer: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(FACEOFF_HEADER)
        .map_err(|e| IngestError::UnreadableInput(e.to_string()))?;
    for r in records {
        let t = &r.first_touch;
        let (px, py) = match t.player_predrop_location {
            Some((x, y)) => (fmt_f64(x), fmt_f64(y)),
            None => (String::new(), String::new()),
        };
        w.write_record([
            r.game_id.as_str(),
            r.faceoff_id.as_str(),
            &r.period.to_string(),
            &fmt_f64(r.drop_time),
            r.dot_id.as_str(),
            &r.home_attack_sign.to_string(),
            r.winner_team.as_str(),
            r.winner_player.as_str(),
            r.loser_player.as_str(),
            r.winner_hand.map(|h| h.as_str()).unwrap_or(""),
            r.loser_hand.map(|h| h.as_str()).unwrap_or(""),
            t.kind.as_str(),
            &fmt_f64(t.time),
            &fmt_f64(t.location.0),
            &fmt_f64(t.location.1),
            t.player.as_str(),
            t.player_team.as_str(),
            &px,
            &py,
        ])
        .map_err(|e| IngestError::UnreadableInput(e.to_string()))?;
    }
    w.flush().map_err(|e| IngestError::UnreadableInput(e.to_string()))
}

/// Serialize sequence events to the companion CSV schema.
pub fn write_sequences_csv<W: Write>(
    records: &[FaceoffRecord],
    writer: W,
) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SEQUENCE_HEADER)
        .map_err(|e| IngestError::UnreadableInput(e.to_string()))?;
    for r in records {
        for ev in &r.sequence {
            let (x, y) = match ev.location {
                Some((x, y)) => (fmt_f64(x), fmt_f64(y)),
                None => (String::new(), String::new()),
            };
            w.write_record([
                r.faceoff_id.as_str(),
                ev.kind.as_str(),
                &fmt_f64(ev.time),
                &x,
                &y,
                ev.team.as_str(),
            ])
            .map_err(|e| IngestError::UnreadableInput(e.to_string()))?;
        }
    }
    w.flush().map_err(|e| IngestError::UnreadableInput(e.to_string()))
}

fn fmt_f64(v: f64) -> String {
    // Shortest round-trippable form keeps CSV round-trips lossless.
    let mut buf = ryu_fmt(v);
    if buf.ends_with(".0") {
        buf.truncate(buf.len() - 2);
    }
    buf
}

fn ryu_fmt(v: f64) -> String {
    format!("{v}")
}

/// Reporting-only record checks.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub total_records: usize,
    pub out_of_bounds: usize,
    pub missing_handedness: usize,
    pub center_dot: usize,
    pub center_dot_share: f64,
    pub duplicate_faceoff_ids: usize,
}

impl ValidationReport {
    /// True when no findings were recorded (the center-dot share is
    /// informational, not a finding).
    pub fn is_clean(&self) -> bool {
        self.out_of_bounds == 0 && self.missing_handedness == 0 && self.duplicate_faceoff_ids == 0
    }
}

pub fn validate_records(records: &[FaceoffRecord], rink: &RinkSpec) -> ValidationReport {
    let mut report = ValidationReport {
        total_records: records.len(),
        ..Default::default()
    };
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    for r in records {
        let mut oob = !rink.in_bounds(r.first_touch.location.0, r.first_touch.location.1);
        if let Some((x, y)) = r.first_touch.player_predrop_location {
            oob = oob || !rink.in_bounds(x, y);
        }
        for ev in &r.sequence {
            if let Some((x, y)) = ev.location {
                oob = oob || !rink.in_bounds(x, y);
            }
        }
        if oob {
            report.out_of_bounds += 1;
        }
        if r.winner_hand.is_none() || r.loser_hand.is_none() {
            report.missing_handedness += 1;
        }
        if r.dot_id.is_center() {
            report.center_dot += 1;
        }
        if !seen.insert(r.faceoff_id.as_str()) {
            report.duplicate_faceoff_ids += 1;
        }
    }
    if !records.is_empty() {
        report.center_dot_share = report.center_dot as f64 / records.len() as f64;
    }
    report
}

/// External per-player inputs consumed by correlations and report tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalPlayerMetrics {
    pub player_id: String,
    pub cf_pct: f64,
    pub xgd: f64,
    pub faceoffs_taken: u64,
}

pub const EXTERNAL_METRICS_HEADER: [&str; 4] = ["player_id", "cf_pct", "xgd", "faceoffs_taken"];

pub fn parse_external_metrics_csv<R: Read>(
    reader: R,
) -> Result<Vec<ExternalPlayerMetrics>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| IngestError::UnreadableInput(e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != EXTERNAL_METRICS_HEADER {
        return Err(IngestError::SchemaViolation(format!(
            "external metrics header mismatch: {:?}",
            header
        )));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| IngestError::UnreadableInput(e.to_string()))?;
        let get = |i: usize| row.get(i).unwrap_or("").trim();
        out.push(ExternalPlayerMetrics {
            player_id: get(0).to_string(),
            cf_pct: get(1)
                .parse()
                .map_err(|_| IngestError::SchemaViolation(format!("bad cf_pct: {:?}", get(1))))?,
            xgd: get(2)
                .parse()
                .map_err(|_| IngestError::SchemaViolation(format!("bad xgd: {:?}", get(2))))?,
            faceoffs_taken: get(3)
                .parse()
                .map_err(|_| {
                    IngestError::SchemaViolation(format!("bad faceoffs_taken: {:?}", get(3)))
                })?,
        });
    }
    Ok(out)
}

/// Left join of players onto metrics rows. Players with no row are flagged,
/// not dropped.
pub fn join_external_metrics(
    players: &[String],
    metrics: &[ExternalPlayerMetrics],
) -> Result<(BTreeMap<String, ExternalPlayerMetrics>, Vec<String>), IngestError> {
    let mut by_id: BTreeMap<&str, &ExternalPlayerMetrics> = BTreeMap::new();
    for m in metrics {
        if by_id.insert(m.player_id.as_str(), m).is_some() {
            return Err(IngestError::DuplicateMetricsRow(m.player_id.clone()));
        }
    }
    let mut joined = BTreeMap::new();
    let mut missing = Vec::new();
    for p in players {
        match by_id.get(p.as_str()) {
            Some(m) => {
                joined.insert(p.clone(), (*m).clone());
            }
            None => missing.push(p.clone()),
        }
    }
    Ok((joined, missing))
}
