//! Deterministic report builders: leaderboard tables, figure-ready data
//! files, the rose-chart exports, metric correlations, and the player
//! metrics CSV. Every builder is a pure function of its inputs, so repeated
//! runs are byte-identical.

use crate::aggregate::{BucketStats, LeagueBaselines, Tally};
use crate::classify::ClassifiedFaceoff;
use crate::metrics::{pearson, PlayerMetrics, QualificationRule};
use crate::rink::{Deployment, DirectionSector, Side, ZoneSection};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("unknown report id: {0}")]
    UnknownReport(String),
    #[error("limit must be positive")]
    BadLimit,
    #[error("report {0} requires {1}")]
    MissingInput(&'static str, &'static str),
    #[error("failed to read player metrics: {0}")]
    UnreadableMetrics(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportId {
    Table1,
    Table2,
    Table3,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Appx31,
    Appx33,
    Appx332,
    Appx4,
}

impl ReportId {
    pub const ALL: [ReportId; 12] = [
        ReportId::Table1,
        ReportId::Table2,
        ReportId::Table3,
        ReportId::Fig2,
        ReportId::Fig3,
        ReportId::Fig4,
        ReportId::Fig5,
        ReportId::Fig6,
        ReportId::Appx31,
        ReportId::Appx33,
        ReportId::Appx332,
        ReportId::Appx4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ReportId::Table1 => "table1",
            ReportId::Table2 => "table2",
            ReportId::Table3 => "table3",
            ReportId::Fig2 => "fig2",
            ReportId::Fig3 => "fig3",
            ReportId::Fig4 => "fig4",
            ReportId::Fig5 => "fig5",
            ReportId::Fig6 => "fig6",
            ReportId::Appx31 => "appx31",
            ReportId::Appx33 => "appx33",
            ReportId::Appx332 => "appx332",
            ReportId::Appx4 => "appx4",
        }
    }

    pub fn parse(s: &str) -> Result<ReportId, ReportError> {
        ReportId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| ReportError::UnknownReport(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SortDirection {
    #[default]
    Top,
    Bottom,
}

impl SortDirection {
    pub fn parse(s: &str) -> Result<SortDirection, ReportError> {
        match s {
            "top" => Ok(SortDirection::Top),
            "bottom" => Ok(SortDirection::Bottom),
            other => Err(ReportError::UnknownReport(format!("direction: {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportSpec {
    pub id: ReportId,
    pub direction: SortDirection,
    pub limit: usize,
}

impl ReportSpec {
    pub fn new(id: ReportId, direction: SortDirection, limit: usize) -> Result<ReportSpec, ReportError> {
        if limit == 0 {
            return Err(ReportError::BadLimit);
        }
        Ok(ReportSpec { id, direction, limit })
    }
}

fn zone_code(z: ZoneSection) -> &'static str {
    match z {
        ZoneSection::OffensiveZone => "OZ",
        ZoneSection::DefensiveZone => "DZ",
        ZoneSection::NeutralNorth => "NN",
        ZoneSection::NeutralSouth => "NS",
    }
}

fn side_code(s: Side) -> &'static str {
    match s {
        Side::Left => "L",
        Side::Right => "R",
    }
}

fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    match v {
        Some(x) => format!("{x:.decimals$}"),
        None => String::new(),
    }
}

fn qualification_comment(q: &QualificationRule) -> String {
    format!("# qualification: minimum {} face-offs taken\n", q.min_faceoffs)
}

// ---------------------------------------------------------------------------
// Rose charts

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RosePetal {
    pub share: f64,
    pub mean_distance_ft: f64,
    pub count: u64,
}

/// Per-dot direction petals plus an "ALL" pseudo-dot aggregating every
/// labeled win. Shares within each dot sum to 1 over directions with
/// count > 0.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RoseChartData {
    pub dots: BTreeMap<String, BTreeMap<String, RosePetal>>,
}

fn rose_from_accum(accum: BTreeMap<String, BTreeMap<DirectionSector, (u64, f64)>>) -> RoseChartData {
    let mut dots = BTreeMap::new();
    for (dot, dirs) in accum {
        let total: u64 = dirs.values().map(|&(n, _)| n).sum();
        if total == 0 {
            continue;
        }
        let petals = dirs
            .into_iter()
            .filter(|&(_, (n, _))| n > 0)
            .map(|(dir, (n, dist))| {
                (
                    dir.to_string(),
                    RosePetal {
                        share: n as f64 / total as f64,
                        mean_distance_ft: dist / n as f64,
                        count: n,
                    },
                )
            })
            .collect();
        dots.insert(dot, petals);
    }
    RoseChartData { dots }
}

pub fn rose_chart(rows: &[ClassifiedFaceoff]) -> RoseChartData {
    let mut accum: BTreeMap<String, BTreeMap<DirectionSector, (u64, f64)>> = BTreeMap::new();
    for row in rows {
        if !row.is_winner {
            continue;
        }
        let (zone, side, dir) = match (row.zone, row.side, row.direction) {
            (Some(z), Some(s), Some(d)) => (z, s, d),
            _ => continue,
        };
        let label = format!("{}{}", zone_code(zone), side_code(side));
        for key in [label, "ALL".to_string()] {
            let cell = accum.entry(key).or_default().entry(dir).or_default();
            cell.0 += 1;
            cell.1 += row.distance_ft;
        }
    }
    rose_from_accum(accum)
}

fn rose_chart_from_tally(t: &Tally) -> RoseChartData {
    let mut accum: BTreeMap<String, BTreeMap<DirectionSector, (u64, f64)>> = BTreeMap::new();
    for (k, s) in &t.buckets {
        if !k.is_winner {
            continue;
        }
        let (zone, side, dir) = match (k.zone, k.side, k.direction) {
            (Some(z), Some(sd), Some(d)) => (z, sd, d),
            _ => continue,
        };
        let label = format!("{}{}", zone_code(zone), side_code(side));
        for key in [label, "ALL".to_string()] {
            let cell = accum.entry(key).or_default().entry(dir).or_default();
            cell.0 += s.faceoffs;
            cell.1 += s.sum_distance_ft;
        }
    }
    rose_from_accum(accum)
}

// ---------------------------------------------------------------------------
// Winner-bucket helpers

fn winner_stats<F: Fn(&crate::aggregate::BucketKey) -> bool>(t: &Tally, pred: F) -> BucketStats {
    let mut out = BucketStats::default();
    for (k, s) in &t.buckets {
        if k.is_winner && pred(k) {
            out.faceoffs += s.faceoffs;
            out.events += s.events;
            out.sum_elapsed_s += s.sum_elapsed_s;
            out.sum_distance_ft += s.sum_distance_ft;
        }
    }
    out
}

fn pct(num: u64, den: u64) -> Option<f64> {
    if den == 0 {
        None
    } else {
        Some(100.0 * num as f64 / den as f64)
    }
}

// ---------------------------------------------------------------------------
// Leaderboard tables

fn leaderboard<K: Fn(&PlayerMetrics) -> Option<f64>>(
    metrics: &[PlayerMetrics],
    q: &QualificationRule,
    key: K,
    direction: SortDirection,
    limit: usize,
) -> Vec<(PlayerMetrics, f64)> {
    let mut rows: Vec<(PlayerMetrics, f64)> = metrics
        .iter()
        .filter(|m| m.faceoffs >= q.min_faceoffs)
        .filter_map(|m| key(m).map(|v| (m.clone(), v)))
        .collect();
    // Player id breaks ties so output order is total.
    rows.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.0.player_id.cmp(&b.0.player_id))
    });
    if direction == SortDirection::Bottom {
        rows.reverse();
    }
    rows.truncate(limit);
    rows
}

fn table1(metrics: &[PlayerMetrics], q: &QualificationRule, direction: SortDirection, limit: usize) -> String {
    let mut out = qualification_comment(q);
    out.push_str("player_id,faceoffs,clean_pct_among_wins,win_pct_among_clean,overall_win_pct\n");
    for (m, _) in leaderboard(metrics, q, |m| m.clean_pct_among_wins, direction, limit) {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            m.player_id,
            m.faceoffs,
            fmt_opt(m.clean_pct_among_wins, 1),
            fmt_opt(m.win_pct_among_clean, 1),
            fmt_opt(m.overall_win_pct, 1),
        );
    }
    out
}

/// For each qualified player, the direction with the largest contribution to
/// expected events (league rate x directional win share), plus the EE total.
fn table2(
    t: &Tally,
    baselines: &LeagueBaselines,
    metrics: &[PlayerMetrics],
    q: &QualificationRule,
    direction: SortDirection,
    limit: usize,
) -> String {
    let mut out = qualification_comment(q);
    out.push_str("player_id,faceoffs,best_direction,best_direction_event_pct,ee_pct\n");
    for (m, _) in leaderboard(metrics, q, |m| m.ee, direction, limit) {
        let buckets = match t.players.get(&m.player_id) {
            Some(b) => b,
            None => continue,
        };
        let denom: u64 = buckets
            .iter()
            .filter(|(k, _)| k.zone.is_some())
            .map(|(_, s)| s.faceoffs)
            .sum();
        let mut best: Option<(DirectionSector, f64)> = None;
        if denom > 0 {
            for dir in DirectionSector::ALL {
                let rate = match baselines.dir_event_rate.get(&dir).copied().flatten() {
                    Some(r) => r,
                    None => continue,
                };
                let wins: u64 = buckets
                    .iter()
                    .filter(|(k, _)| k.is_winner && k.direction == Some(dir))
                    .map(|(_, s)| s.faceoffs)
                    .sum();
                let contrib = rate * wins as f64 / denom as f64;
                if best.map_or(true, |(_, b)| contrib > b) {
                    best = Some((dir, contrib));
                }
            }
        }
        let (best_dir, best_contrib) = match best {
            Some((d, c)) => (d.to_string(), Some(100.0 * c)),
            None => (String::new(), None),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            m.player_id,
            m.faceoffs,
            best_dir,
            fmt_opt(best_contrib, 2),
            fmt_opt(m.ee.map(|e| 100.0 * e), 2),
        );
    }
    out
}

fn table3(metrics: &[PlayerMetrics], q: &QualificationRule, direction: SortDirection, limit: usize) -> String {
    let mut out = qualification_comment(q);
    out.push_str("player_id,faceoffs,wdbe,wdbe_pctile,overall_win_pct\n");
    for (m, _) in leaderboard(metrics, q, |m| m.wdbe_pctile, direction, limit) {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            m.player_id,
            m.faceoffs,
            fmt_opt(m.wdbe, 4),
            fmt_opt(m.wdbe_pctile, 1),
            fmt_opt(m.overall_win_pct, 1),
        );
    }
    out
}

// ---------------------------------------------------------------------------
// Figure data

/// Post-win event percentage by zone and clean flag.
fn fig2(t: &Tally) -> String {
    let mut out = String::from("zone,clean,wins,events,event_pct\n");
    for zone in ZoneSection::ALL {
        for clean in [false, true] {
            let s = winner_stats(t, |k| k.zone == Some(zone) && k.clean == clean);
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                zone_code(zone),
                clean,
                s.faceoffs,
                s.events,
                fmt_opt(pct(s.events, s.faceoffs), 1),
            );
        }
    }
    out
}

/// Share of wins that were clean, by zone.
fn fig3(t: &Tally) -> String {
    let mut out = String::from("zone,wins,clean_wins,clean_pct\n");
    for zone in ZoneSection::ALL {
        let all = winner_stats(t, |k| k.zone == Some(zone));
        let clean = winner_stats(t, |k| k.zone == Some(zone) && k.clean);
        let _ = writeln!(
            out,
            "{},{},{},{}",
            zone_code(zone),
            all.faceoffs,
            clean.faceoffs,
            fmt_opt(pct(clean.faceoffs, all.faceoffs), 1),
        );
    }
    out
}

/// Direction shares and within-direction event rates per (zone, side) panel,
/// plus the combined ALL panel.
fn fig4(t: &Tally) -> String {
    let mut out = String::from("panel,direction,wins,share,event_pct\n");
    let mut panels: Vec<(String, Box<dyn Fn(&crate::aggregate::BucketKey) -> bool>)> = Vec::new();
    for zone in ZoneSection::ALL {
        for side in [Side::Left, Side::Right] {
            let label = format!("{}{}", zone_code(zone), side_code(side));
            panels.push((
                label,
                Box::new(move |k: &crate::aggregate::BucketKey| {
                    k.zone == Some(zone) && k.side == Some(side)
                }),
            ));
        }
    }
    panels.push(("ALL".to_string(), Box::new(|k: &crate::aggregate::BucketKey| k.zone.is_some())));
    for (label, pred) in panels {
        let total = winner_stats(t, |k| pred(k) && k.direction.is_some()).faceoffs;
        if total == 0 {
            continue;
        }
        for dir in DirectionSector::ALL {
            let s = winner_stats(t, |k| pred(k) && k.direction == Some(dir));
            if s.faceoffs == 0 {
                continue;
            }
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                label,
                dir,
                s.faceoffs,
                s.faceoffs as f64 / total as f64,
                fmt_opt(pct(s.events, s.faceoffs), 1),
            );
        }
    }
    out
}

/// Direction shares by deployment.
fn fig6(t: &Tally) -> String {
    let mut out = String::from("deployment,direction,wins,share\n");
    for dep in [Deployment::Strong, Deployment::Weak] {
        let total = winner_stats(t, |k| k.deployment == Some(dep) && k.direction.is_some()).faceoffs;
        if total == 0 {
            continue;
        }
        for dir in DirectionSector::ALL {
            let s = winner_stats(t, |k| k.deployment == Some(dep) && k.direction == Some(dir));
            let _ = writeln!(
                out,
                "{},{},{},{}",
                dep,
                dir,
                s.faceoffs,
                s.faceoffs as f64 / total as f64,
            );
        }
    }
    out
}

/// Direction shares by deployment within each zone.
fn appx33(t: &Tally) -> String {
    let mut out = String::from("zone,deployment,direction,wins,share\n");
    for zone in ZoneSection::ALL {
        for dep in [Deployment::Strong, Deployment::Weak] {
            let total = winner_stats(t, |k| {
                k.zone == Some(zone) && k.deployment == Some(dep) && k.direction.is_some()
            })
            .faceoffs;
            if total == 0 {
                continue;
            }
            for dir in DirectionSector::ALL {
                let s = winner_stats(t, |k| {
                    k.zone == Some(zone) && k.deployment == Some(dep) && k.direction == Some(dir)
                });
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    zone_code(zone),
                    dep,
                    dir,
                    s.faceoffs,
                    s.faceoffs as f64 / total as f64,
                );
            }
        }
    }
    out
}

/// Event percentage by direction, deployment, and zone.
fn appx332(t: &Tally) -> String {
    let mut out = String::from("zone,deployment,direction,wins,events,event_pct\n");
    for zone in ZoneSection::ALL {
        for dep in [Deployment::Strong, Deployment::Weak] {
            for dir in DirectionSector::ALL {
                let s = winner_stats(t, |k| {
                    k.zone == Some(zone) && k.deployment == Some(dep) && k.direction == Some(dir)
                });
                if s.faceoffs == 0 {
                    continue;
                }
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    zone_code(zone),
                    dep,
                    dir,
                    s.faceoffs,
                    s.events,
                    fmt_opt(pct(s.events, s.faceoffs), 1),
                );
            }
        }
    }
    out
}

/// Build a report as a string (CSV, or pretty JSON for the rose chart).
pub fn build_report(
    spec: &ReportSpec,
    tally: &Tally,
    baselines: Option<&LeagueBaselines>,
    metrics: Option<&[PlayerMetrics]>,
    qualification: &QualificationRule,
) -> Result<String, ReportError> {
    if spec.limit == 0 {
        return Err(ReportError::BadLimit);
    }
    let need_metrics = || {
        metrics.ok_or(ReportError::MissingInput(
            "leaderboard",
            "a player metrics table (--metrics-file)",
        ))
    };
    Ok(match spec.id {
        ReportId::Table1 => table1(need_metrics()?, qualification, spec.direction, spec.limit),
        ReportId::Appx31 => {
            // Bottom of the same ranking as table1.
            let dir = match spec.direction {
                SortDirection::Top => SortDirection::Bottom,
                SortDirection::Bottom => SortDirection::Top,
            };
            table1(need_metrics()?, qualification, dir, spec.limit)
        }
        ReportId::Table2 => {
            let b = baselines.ok_or(ReportError::MissingInput(
                "table2",
                "league baselines (--baselines)",
            ))?;
            table2(tally, b, need_metrics()?, qualification, spec.direction, spec.limit)
        }
        ReportId::Table3 => table3(need_metrics()?, qualification, spec.direction, spec.limit),
        ReportId::Appx4 => {
            let dir = match spec.direction {
                SortDirection::Top => SortDirection::Bottom,
                SortDirection::Bottom => SortDirection::Top,
            };
            table3(need_metrics()?, qualification, dir, spec.limit)
        }
        ReportId::Fig2 => fig2(tally),
        ReportId::Fig3 => fig3(tally),
        ReportId::Fig4 => fig4(tally),
        ReportId::Fig5 => {
            let rose = rose_chart_from_tally(tally);
            serde_json::to_string_pretty(&rose).expect("rose chart serialize") + "\n"
        }
        ReportId::Fig6 => fig6(tally),
        ReportId::Appx33 => appx33(tally),
        ReportId::Appx332 => appx332(tally),
    })
}

// ---------------------------------------------------------------------------
// Correlation matrix

const CORR_COLUMNS: [&str; 10] = [
    "overall_win_pct",
    "clean_pct_among_wins",
    "ee",
    "wdbe",
    "wdbe_oz",
    "wdbe_dz",
    "wdbe_nz_north",
    "wdbe_nz_south",
    "cf_pct",
    "xgd",
];

fn corr_column(m: &PlayerMetrics, name: &str) -> Option<f64> {
    match name {
        "overall_win_pct" => m.overall_win_pct,
        "clean_pct_among_wins" => m.clean_pct_among_wins,
        "ee" => m.ee,
        "wdbe" => m.wdbe,
        "wdbe_oz" => m.wdbe_per_zone.get(&ZoneSection::OffensiveZone).copied(),
        "wdbe_dz" => m.wdbe_per_zone.get(&ZoneSection::DefensiveZone).copied(),
        "wdbe_nz_north" => m.wdbe_per_zone.get(&ZoneSection::NeutralNorth).copied(),
        "wdbe_nz_south" => m.wdbe_per_zone.get(&ZoneSection::NeutralSouth).copied(),
        "cf_pct" => m.cf_pct,
        "xgd" => m.xgd,
        _ => None,
    }
}

/// Pairwise-complete Pearson correlations between all metric and external
/// columns over qualified players. Degenerate pairs (zero variance, < 2
/// complete observations) are left empty.
pub fn correlate_metrics(metrics: &[PlayerMetrics], q: &QualificationRule) -> String {
    let qualified: Vec<&PlayerMetrics> =
        metrics.iter().filter(|m| m.faceoffs >= q.min_faceoffs).collect();
    let mut out = qualification_comment(q);
    out.push_str("metric");
    for col in CORR_COLUMNS {
        out.push(',');
        out.push_str(col);
    }
    out.push('\n');
    for row_col in CORR_COLUMNS {
        out.push_str(row_col);
        for col in CORR_COLUMNS {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for m in &qualified {
                if let (Some(x), Some(y)) = (corr_column(m, row_col), corr_column(m, col)) {
                    xs.push(x);
                    ys.push(y);
                }
            }
            out.push(',');
            if let Ok(r) = pearson(&xs, &ys) {
                let _ = write!(out, "{r:.4}");
            }
        }
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Player metrics CSV

pub const PLAYER_METRICS_HEADER: [&str; 15] = [
    "player_id",
    "faceoffs",
    "overall_win_pct",
    "clean_pct_among_wins",
    "win_pct_among_clean",
    "strong_side_pct",
    "ee",
    "wdbe",
    "wdbe_pctile",
    "wdbe_oz",
    "wdbe_dz",
    "wdbe_nz_north",
    "wdbe_nz_south",
    "cf_pct",
    "xgd",
];

fn fmt_full(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

pub fn write_player_metrics_csv<W: std::io::Write>(
    metrics: &[PlayerMetrics],
    writer: W,
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(PLAYER_METRICS_HEADER)?;
    for m in metrics {
        w.write_record([
            m.player_id.clone(),
            m.faceoffs.to_string(),
            fmt_full(m.overall_win_pct),
            fmt_full(m.clean_pct_among_wins),
            fmt_full(m.win_pct_among_clean),
            fmt_full(m.strong_side_pct),
            fmt_full(m.ee),
            fmt_full(m.wdbe),
            fmt_full(m.wdbe_pctile),
            fmt_full(m.wdbe_per_zone.get(&ZoneSection::OffensiveZone).copied()),
            fmt_full(m.wdbe_per_zone.get(&ZoneSection::DefensiveZone).copied()),
            fmt_full(m.wdbe_per_zone.get(&ZoneSection::NeutralNorth).copied()),
            fmt_full(m.wdbe_per_zone.get(&ZoneSection::NeutralSouth).copied()),
            fmt_full(m.cf_pct),
            fmt_full(m.xgd),
        ])?;
    }
    w.flush()
}

pub fn read_player_metrics_csv<R: std::io::Read>(reader: R) -> Result<Vec<PlayerMetrics>, ReportError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| ReportError::UnreadableMetrics(e.to_string()))?
        .clone();
    if header.iter().collect::<Vec<_>>() != PLAYER_METRICS_HEADER {
        return Err(ReportError::UnreadableMetrics(format!(
            "unexpected header: {header:?}"
        )));
    }
    let parse_opt = |s: &str, line: u64| -> Result<Option<f64>, ReportError> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse::<f64>()
                .map(Some)
                .map_err(|_| ReportError::UnreadableMetrics(format!("line {line}: bad number {s:?}")))
        }
    };
    let mut out = Vec::new();
    for result in rdr.records() {
        let record = result.map_err(|e| ReportError::UnreadableMetrics(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != PLAYER_METRICS_HEADER.len() {
            return Err(ReportError::UnreadableMetrics(format!(
                "line {line}: expected {} fields, found {}",
                PLAYER_METRICS_HEADER.len(),
                record.len()
            )));
        }
        let mut wdbe_per_zone = BTreeMap::new();
        for (idx, zone) in [
            (9, ZoneSection::OffensiveZone),
            (10, ZoneSection::DefensiveZone),
            (11, ZoneSection::NeutralNorth),
            (12, ZoneSection::NeutralSouth),
        ] {
            if let Some(v) = parse_opt(&record[idx], line)? {
                wdbe_per_zone.insert(zone, v);
            }
        }
        out.push(PlayerMetrics {
            player_id: record[0].to_string(),
            faceoffs: record[1]
                .parse()
                .map_err(|_| ReportError::UnreadableMetrics(format!("line {line}: bad faceoffs")))?,
            overall_win_pct: parse_opt(&record[2], line)?,
            clean_pct_among_wins: parse_opt(&record[3], line)?,
            win_pct_among_clean: parse_opt(&record[4], line)?,
            strong_side_pct: parse_opt(&record[5], line)?,
            ee: parse_opt(&record[6], line)?,
            wdbe: parse_opt(&record[7], line)?,
            wdbe_pctile: parse_opt(&record[8], line)?,
            wdbe_per_zone,
            cf_pct: parse_opt(&record[13], line)?,
            xgd: parse_opt(&record[14], line)?,
        });
    }
    Ok(out)
}
