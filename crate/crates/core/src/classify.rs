//! Turns each face-off record into labeled winner- and loser-perspective
//! observations: zone section, side, direction sector, deployment, clean
//! flag, elapsed time, travel distance, and attributed post-face-off events.

use crate::ingest::{FaceoffRecord, SequenceKind, TouchKind};
use crate::rink::{
    build_taker_frame, deployment, direction_sector, reverse_perspective, zone_section, Deployment,
    DirectionSector, ModelError, RinkSpec, Side, ZoneSection,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error("slot polygon needs at least 3 vertices, found {0}")]
    DegeneratePolygon(usize),
}

/// Knobs for clean detection, event attribution, and slot geometry.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    pub clean_displacement_max_ft: f64,
    pub sequence_cap_s: Option<f64>,
    pub slot_polygon: Vec<[f64; 2]>,
    pub use_touch_kind_for_clean: bool,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            clean_displacement_max_ft: 5.0,
            sequence_cap_s: None,
            // Home-plate shape in the attacking (+x) half, mirrored by
            // attack sign when tested.
            slot_polygon: vec![
                [89.0, -11.0],
                [89.0, 11.0],
                [69.0, 22.0],
                [54.0, 11.0],
                [54.0, -11.0],
                [69.0, -22.0],
            ],
            use_touch_kind_for_clean: true,
        }
    }
}

impl ClassifyConfig {
    pub fn from_json(json: &str) -> Result<ClassifyConfig, serde_json::Error> {
        serde_json::from_str(json)
    }
}

/// One perspective (winner or loser) of a classified face-off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedFaceoff {
    pub faceoff_id: String,
    pub player: String,
    pub is_winner: bool,
    pub zone: Option<ZoneSection>,
    pub side: Option<Side>,
    pub direction: Option<DirectionSector>,
    pub deployment: Option<Deployment>,
    pub clean: bool,
    pub elapsed_s: f64,
    pub distance_ft: f64,
    pub shot_event: bool,
    pub zone_change: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedPair {
    pub winner: ClassifiedFaceoff,
    pub loser: ClassifiedFaceoff,
    pub diagnostics: Vec<String>,
}

/// Even-odd point-in-polygon with boundary points counting as inside.
pub fn in_slot(point: (f64, f64), polygon: &[[f64; 2]]) -> Result<bool, ClassifyError> {
    if polygon.len() < 3 {
        return Err(ClassifyError::DegeneratePolygon(polygon.len()));
    }
    let (px, py) = point;
    let mut inside = false;
    for i in 0..polygon.len() {
        let [x1, y1] = polygon[i];
        let [x2, y2] = polygon[(i + 1) % polygon.len()];
        if on_segment((px, py), (x1, y1), (x2, y2)) {
            return Ok(true);
        }
        if (y1 > py) != (y2 > py) {
            let x_cross = x1 + (py - y1) / (y2 - y1) * (x2 - x1);
            if px < x_cross {
                inside = !inside;
            }
        }
    }
    Ok(inside)
}

fn on_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> bool {
    let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
    if cross.abs() > 1e-9 {
        return false;
    }
    let dot = (p.0 - a.0) * (b.0 - a.0) + (p.1 - a.1) * (b.1 - a.1);
    let len2 = (b.0 - a.0).powi(2) + (b.1 - a.1).powi(2);
    dot >= 0.0 && dot <= len2
}

/// Clean iff the first touch is a reception by the winner's teammate and the
/// receiver had not skated far from his pre-drop spot.
pub fn detect_clean(record: &FaceoffRecord, cfg: &ClassifyConfig) -> bool {
    let touch = &record.first_touch;
    if cfg.use_touch_kind_for_clean && touch.kind != TouchKind::Reception {
        return false;
    }
    if touch.player_team != record.winner_team {
        return false;
    }
    match touch.player_predrop_location {
        None => true,
        Some((x, y)) => {
            let d = (touch.location.0 - x).hypot(touch.location.1 - y);
            d <= cfg.clean_displacement_max_ft
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EventFlags {
    pub shot_event: bool,
    pub zone_change: bool,
}

fn zone_change_kind(zone: Option<ZoneSection>) -> Option<SequenceKind> {
    match zone? {
        ZoneSection::DefensiveZone | ZoneSection::NeutralSouth => Some(SequenceKind::ZoneExit),
        ZoneSection::OffensiveZone | ZoneSection::NeutralNorth => Some(SequenceKind::ZoneEntry),
    }
}

/// Scan the post-touch sequence and attribute shot / zone-change events to
/// each team. A team's window runs while it possesses the puck and closes
/// permanently at the first possession change away from it; a stoppage or
/// the optional cap ends everything.
pub fn attribute_events(
    record: &FaceoffRecord,
    winner_zone: Option<ZoneSection>,
    cfg: &ClassifyConfig,
) -> Result<(EventFlags, EventFlags), ClassifyError> {
    let winner = record.winner_team;
    let loser = winner.other();
    let loser_zone = winner_zone.map(|z| z.reversed());

    let mut flags = [(winner, EventFlags::default()), (loser, EventFlags::default())];
    let mut closed = [false, false];
    let mut possessing = winner;
    let start = record.first_touch.time;

    for ev in &record.sequence {
        if let Some(cap) = cfg.sequence_cap_s {
            if ev.time - start > cap {
                break;
            }
        }
        match ev.kind {
            SequenceKind::Stoppage => break,
            SequenceKind::PossessionChange => {
                if ev.team != possessing {
                    let idx = if possessing == winner { 0 } else { 1 };
                    closed[idx] = true;
                    possessing = ev.team;
                }
            }
            kind => {
                if ev.team != possessing {
                    continue;
                }
                let idx = if ev.team == winner { 0 } else { 1 };
                if closed[idx] {
                    continue;
                }
                let zone = if idx == 0 { winner_zone } else { loser_zone };
                match kind {
                    SequenceKind::ShotOnNet => flags[idx].1.shot_event = true,
                    SequenceKind::ShotAttempt => {
                        if let Some((x, y)) = ev.location {
                            let sign = f64::from(ev.team.attack_sign(record.home_attack_sign));
                            if in_slot((x * sign, y * sign), &cfg.slot_polygon)? {
                                flags[idx].1.shot_event = true;
                            }
                        }
                    }
                    SequenceKind::ZoneExit | SequenceKind::ZoneEntry => {
                        if zone_change_kind(zone) == Some(kind) {
                            flags[idx].1.zone_change = true;
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    Ok((flags[0].1, flags[1].1))
}

/// Classify one record into its winner- and loser-perspective rows.
pub fn classify_faceoff(
    record: &FaceoffRecord,
    rink: &RinkSpec,
    cfg: &ClassifyConfig,
) -> Result<ClassifiedPair, ClassifyError> {
    let mut diagnostics = Vec::new();
    let home_sign = record.home_attack_sign;
    let winner_sign = record.winner_team.attack_sign(home_sign);

    let clean = detect_clean(record, cfg);
    let elapsed_s = record.first_touch.time - record.drop_time;
    let dot_pos = match rink.resolve(record.dot_id, home_sign) {
        Ok(p) => p,
        Err(e) => {
            // Unknown dot in a custom rink spec; surface as a diagnostic and
            // treat as center-like (no frame).
            diagnostics.push(e.to_string());
            (0.0, 0.0)
        }
    };
    let touch = record.first_touch.location;
    let distance_ft = (touch.0 - dot_pos.0).hypot(touch.1 - dot_pos.1);

    let (winner_zone, winner_side, winner_dir, winner_dep, loser_zone, loser_side, loser_dir, loser_dep);
    match build_taker_frame(dot_pos, winner_sign) {
        Err(_) => {
            // Center ice: no frame, labels stay unset.
            winner_zone = None;
            winner_side = None;
            winner_dir = None;
            winner_dep = None;
            loser_zone = None;
            loser_side = None;
            loser_dir = None;
            loser_dep = None;
        }
        Ok(frame) => {
            let zone = zone_section(record.dot_id, winner_sign, home_sign)
                .expect("non-center dot has a zone section");
            let side = frame.boards_side;
            let (u, v) = frame.project(touch.0 - dot_pos.0, touch.1 - dot_pos.1);
            let dir = match direction_sector(u, v) {
                Ok(d) => Some(d),
                Err(ModelError::ZeroDisplacement) => {
                    diagnostics.push(format!(
                        "faceoff {}: zero displacement, no direction sector",
                        record.faceoff_id
                    ));
                    None
                }
                Err(e) => {
                    diagnostics.push(e.to_string());
                    None
                }
            };
            let (rz, rs) = (zone.reversed(), side.flipped());
            let rd = dir.map(|d| {
                let (_, _, flipped) = reverse_perspective(zone, side, d);
                flipped
            });
            winner_zone = Some(zone);
            winner_side = Some(side);
            winner_dir = dir;
            winner_dep = record.winner_hand.map(|h| deployment(h, side));
            loser_zone = Some(rz);
            loser_side = Some(rs);
            loser_dir = rd;
            loser_dep = record.loser_hand.map(|h| deployment(h, rs));
        }
    }

    let (winner_flags, loser_flags) = attribute_events(record, winner_zone, cfg)?;

    let winner = ClassifiedFaceoff {
        faceoff_id: record.faceoff_id.clone(),
        player: record.winner_player.clone(),
        is_winner: true,
        zone: winner_zone,
        side: winner_side,
        direction: winner_dir,
        deployment: winner_dep,
        clean,
        elapsed_s,
        distance_ft,
        shot_event: winner_flags.shot_event,
        zone_change: winner_flags.zone_change,
    };
    let loser = ClassifiedFaceoff {
        faceoff_id: record.faceoff_id.clone(),
        player: record.loser_player.clone(),
        is_winner: false,
        zone: loser_zone,
        side: loser_side,
        direction: loser_dir,
        deployment: loser_dep,
        clean,
        elapsed_s,
        distance_ft,
        shot_event: loser_flags.shot_event,
        zone_change: loser_flags.zone_change,
    };
    Ok(ClassifiedPair {
        winner,
        loser,
        diagnostics,
    })
}

/// Classify a batch in parallel. Output order follows input order, winner
/// row before loser row. FACEOFF_FORGE_THREADS caps the worker count.
pub fn classify_all(
    records: &[FaceoffRecord],
    rink: &RinkSpec,
    cfg: &ClassifyConfig,
) -> Result<(Vec<ClassifiedFaceoff>, Vec<String>), ClassifyError> {
    let run = || -> Result<Vec<ClassifiedPair>, ClassifyError> {
        records
            .par_iter()
            .map(|r| classify_faceoff(r, rink, cfg))
            .collect()
    };
    let pairs = match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    }?;
    let mut rows = Vec::with_capacity(pairs.len() * 2);
    let mut diagnostics = Vec::new();
    for p in pairs {
        rows.push(p.winner);
        rows.push(p.loser);
        diagnostics.extend(p.diagnostics);
    }
    Ok((rows, diagnostics))
}

fn thread_cap() -> Option<usize> {
    std::env::var("FACEOFF_FORGE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
}
