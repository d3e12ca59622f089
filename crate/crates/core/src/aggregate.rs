//! Mergeable count tables over classified face-offs and the league baseline
//! rate tables derived from them.
//!
//! `Tally` with `merge` and the empty tally forms a commutative monoid, so
//! partitions of a season can be counted in parallel and combined in any
//! order. All accumulation is integer counting plus two float sums used only
//! for timing and distance means.

use crate::classify::ClassifiedFaceoff;
use crate::rink::{Deployment, DirectionSector, Side, ZoneSection};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

/// Bucket key: (zone, side, direction, deployment, clean, is_winner), each
/// label optional for center-ice rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BucketKey {
    pub zone: Option<ZoneSection>,
    pub side: Option<Side>,
    pub direction: Option<DirectionSector>,
    pub deployment: Option<Deployment>,
    pub clean: bool,
    pub is_winner: bool,
}

impl BucketKey {
    pub fn of(row: &ClassifiedFaceoff) -> BucketKey {
        BucketKey {
            zone: row.zone,
            side: row.side,
            direction: row.direction,
            deployment: row.deployment,
            clean: row.clean,
            is_winner: row.is_winner,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BucketStats {
    pub faceoffs: u64,
    /// Rows where shot_event or zone_change was true.
    pub events: u64,
    pub sum_elapsed_s: f64,
    pub sum_distance_ft: f64,
}

impl BucketStats {
    fn add_row(&mut self, row: &ClassifiedFaceoff) {
        self.faceoffs += 1;
        if row.shot_event || row.zone_change {
            self.events += 1;
        }
        self.sum_elapsed_s += row.elapsed_s;
        self.sum_distance_ft += row.distance_ft;
    }

    fn merge(&mut self, other: &BucketStats) {
        self.faceoffs += other.faceoffs;
        self.events += other.events;
        self.sum_elapsed_s += other.sum_elapsed_s;
        self.sum_distance_ft += other.sum_distance_ft;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub buckets: BTreeMap<BucketKey, BucketStats>,
    pub players: BTreeMap<String, BTreeMap<BucketKey, BucketStats>>,
}

impl Tally {
    pub fn new() -> Tally {
        Tally::default()
    }

    pub fn add(&mut self, row: &ClassifiedFaceoff) {
        let key = BucketKey::of(row);
        self.buckets.entry(key).or_default().add_row(row);
        self.players
            .entry(row.player.clone())
            .or_default()
            .entry(key)
            .or_default()
            .add_row(row);
    }

    pub fn from_rows<'a, I: IntoIterator<Item = &'a ClassifiedFaceoff>>(rows: I) -> Tally {
        let mut t = Tally::new();
        for row in rows {
            t.add(row);
        }
        t
    }

    pub fn merge(&mut self, other: &Tally) {
        for (k, v) in &other.buckets {
            self.buckets.entry(*k).or_default().merge(v);
        }
        for (player, buckets) in &other.players {
            let mine = self.players.entry(player.clone()).or_default();
            for (k, v) in buckets {
                mine.entry(*k).or_default().merge(v);
            }
        }
    }

    pub fn merged(mut a: Tally, b: &Tally) -> Tally {
        a.merge(b);
        a
    }

    pub fn total_rows(&self) -> u64 {
        self.buckets.values().map(|b| b.faceoffs).sum()
    }

    /// Counts match when the integer parts of every bucket agree.
    pub fn counts_eq(&self, other: &Tally) -> bool {
        let eq_maps = |a: &BTreeMap<BucketKey, BucketStats>, b: &BTreeMap<BucketKey, BucketStats>| {
            let keys: BTreeSet<_> = a.keys().chain(b.keys()).collect();
            keys.into_iter().all(|k| {
                let x = a.get(k).copied().unwrap_or_default();
                let y = b.get(k).copied().unwrap_or_default();
                x.faceoffs == y.faceoffs && x.events == y.events
            })
        };
        eq_maps(&self.buckets, &other.buckets)
            && self.players.keys().chain(other.players.keys()).all(|p| {
                static EMPTY: BTreeMap<BucketKey, BucketStats> = BTreeMap::new();
                let a = self.players.get(p).unwrap_or(&EMPTY);
                let b = other.players.get(p).unwrap_or(&EMPTY);
                eq_maps(a, b)
            })
    }
}

/// Reading of the Eq. 1 denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Eq1Denominator {
    /// Wins directed to the sector (the prose reading; default).
    #[default]
    Wins,
    /// All face-offs whose perspective direction is the sector.
    AllFaceoffs,
}

impl FromStr for Eq1Denominator {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "wins" => Ok(Eq1Denominator::Wins),
            "all" => Ok(Eq1Denominator::AllFaceoffs),
            other => Err(format!("unknown eq1 denominator: {other}")),
        }
    }
}

pub type ExpectedKey = (ZoneSection, DirectionSector, Deployment, bool);
pub type CategoryKey = (ZoneSection, Deployment, bool);

/// League-wide rate tables: per-direction event rates (the EE weights) and
/// per-(zone, direction, deployment, clean) doubled win-vs-loss deltas (the
/// WDBE weights).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LeagueBaselines {
    pub dir_event_rate: BTreeMap<DirectionSector, Option<f64>>,
    pub expected_event_delta: BTreeMap<ExpectedKey, Option<f64>>,
    pub category_event_rate: BTreeMap<CategoryKey, Option<f64>>,
    /// Composite keys of expected-table buckets with fewer than 25 wins.
    pub low_sample: BTreeSet<String>,
}

pub const LOW_SAMPLE_WINS: u64 = 25;

fn ratio(num: u64, den: u64) -> Option<f64> {
    if den == 0 {
        None
    } else {
        Some(num as f64 / den as f64)
    }
}

/// Eq. 1 weights: events after wins to each direction over the chosen
/// denominator, all zones pooled, winner rows only in the numerator.
pub fn league_direction_rates(
    t: &Tally,
    denominator: Eq1Denominator,
) -> BTreeMap<DirectionSector, Option<f64>> {
    let mut out = BTreeMap::new();
    for dir in DirectionSector::ALL {
        let mut events = 0u64;
        let mut wins = 0u64;
        let mut all = 0u64;
        for (k, s) in &t.buckets {
            if k.direction != Some(dir) {
                continue;
            }
            all += s.faceoffs;
            if k.is_winner {
                wins += s.faceoffs;
                events += s.events;
            }
        }
        let rate = match denominator {
            Eq1Denominator::Wins => ratio(events, wins),
            Eq1Denominator::AllFaceoffs => ratio(events, all),
        };
        out.insert(dir, rate);
    }
    out
}

/// Events per face-off (win or loss) in each (zone, deployment, clean)
/// category.
pub fn category_event_rates(t: &Tally) -> BTreeMap<CategoryKey, Option<f64>> {
    let mut acc: BTreeMap<CategoryKey, (u64, u64)> = BTreeMap::new();
    for (k, s) in &t.buckets {
        if let (Some(zone), Some(dep)) = (k.zone, k.deployment) {
            let e = acc.entry((zone, dep, k.clean)).or_default();
            e.0 += s.events;
            e.1 += s.faceoffs;
        }
    }
    let mut out = BTreeMap::new();
    for zone in ZoneSection::ALL {
        for dep in [Deployment::Strong, Deployment::Weak] {
            for clean in [false, true] {
                let (e, f) = acc.get(&(zone, dep, clean)).copied().unwrap_or((0, 0));
                out.insert((zone, dep, clean), ratio(e, f));
            }
        }
    }
    out
}

/// Eq. 2 weights: doubled difference between events-per-win in a
/// (zone, direction, deployment, clean) bucket and the events-per-face-off of
/// its (zone, deployment, clean) category. Buckets with zero wins are none.
pub fn wdbe_expected_table(t: &Tally) -> BTreeMap<ExpectedKey, Option<f64>> {
    let category = category_event_rates(t);
    let mut acc: BTreeMap<ExpectedKey, (u64, u64)> = BTreeMap::new();
    for (k, s) in &t.buckets {
        if !k.is_winner {
            continue;
        }
        if let (Some(zone), Some(dir), Some(dep)) = (k.zone, k.direction, k.deployment) {
            let e = acc.entry((zone, dir, dep, k.clean)).or_default();
            e.0 += s.events;
            e.1 += s.faceoffs;
        }
    }
    let mut out = BTreeMap::new();
    for zone in ZoneSection::ALL {
        for dir in DirectionSector::ALL {
            for dep in [Deployment::Strong, Deployment::Weak] {
                for clean in [false, true] {
                    let key = (zone, dir, dep, clean);
                    let (e, w) = acc.get(&key).copied().unwrap_or((0, 0));
                    let delta = match (ratio(e, w), category[&(zone, dep, clean)]) {
                        (Some(win_rate), Some(cat_rate)) => Some(2.0 * (win_rate - cat_rate)),
                        _ => None,
                    };
                    out.insert(key, delta);
                }
            }
        }
    }
    out
}

pub fn compute_baselines(t: &Tally, denominator: Eq1Denominator) -> LeagueBaselines {
    let expected = wdbe_expected_table(t);
    let mut low_sample = BTreeSet::new();
    for ((zone, dir, dep, clean), _) in expected.iter() {
        let wins = t
            .buckets
            .get(&BucketKey {
                zone: Some(*zone),
                side: Some(Side::Left),
                direction: Some(*dir),
                deployment: Some(*dep),
                clean: *clean,
                is_winner: true,
            })
            .map(|s| s.faceoffs)
            .unwrap_or(0)
            + t.buckets
                .get(&BucketKey {
                    zone: Some(*zone),
                    side: Some(Side::Right),
                    direction: Some(*dir),
                    deployment: Some(*dep),
                    clean: *clean,
                    is_winner: true,
                })
                .map(|s| s.faceoffs)
                .unwrap_or(0);
        if wins < LOW_SAMPLE_WINS {
            low_sample.insert(expected_key_str(*zone, *dir, *dep, *clean));
        }
    }
    LeagueBaselines {
        dir_event_rate: league_direction_rates(t, denominator),
        expected_event_delta: expected,
        category_event_rate: category_event_rates(t),
        low_sample,
    }
}

fn expected_key_str(zone: ZoneSection, dir: DirectionSector, dep: Deployment, clean: bool) -> String {
    format!("{zone}|{dir}|{dep}|{clean}")
}

fn category_key_str(zone: ZoneSection, dep: Deployment, clean: bool) -> String {
    format!("{zone}|{dep}|{clean}")
}

fn parse_zone(s: &str) -> Result<ZoneSection, String> {
    ZoneSection::ALL
        .into_iter()
        .find(|z| z.to_string() == s)
        .ok_or_else(|| format!("unknown zone: {s}"))
}

fn parse_dir(s: &str) -> Result<DirectionSector, String> {
    DirectionSector::ALL
        .into_iter()
        .find(|d| d.to_string() == s)
        .ok_or_else(|| format!("unknown direction: {s}"))
}

fn parse_dep(s: &str) -> Result<Deployment, String> {
    match s {
        "Strong" => Ok(Deployment::Strong),
        "Weak" => Ok(Deployment::Weak),
        other => Err(format!("unknown deployment: {other}")),
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    s.parse::<bool>().map_err(|_| format!("bad clean flag: {s}"))
}

#[derive(Serialize, Deserialize)]
struct BaselinesDoc {
    dir_event_rate: BTreeMap<String, Option<f64>>,
    expected_event_delta: BTreeMap<String, Option<f64>>,
    category_event_rate: BTreeMap<String, Option<f64>>,
    #[serde(default)]
    low_sample: BTreeSet<String>,
}

impl LeagueBaselines {
    pub fn to_json(&self) -> String {
        let doc = BaselinesDoc {
            dir_event_rate: self
                .dir_event_rate
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            expected_event_delta: self
                .expected_event_delta
                .iter()
                .map(|((z, d, s, c), v)| (expected_key_str(*z, *d, *s, *c), *v))
                .collect(),
            category_event_rate: self
                .category_event_rate
                .iter()
                .map(|((z, s, c), v)| (category_key_str(*z, *s, *c), *v))
                .collect(),
            low_sample: self.low_sample.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("baselines serialize")
    }

    pub fn from_json(json: &str) -> Result<LeagueBaselines, String> {
        let doc: BaselinesDoc = serde_json::from_str(json).map_err(|e| e.to_string())?;
        let mut out = LeagueBaselines {
            low_sample: doc.low_sample,
            ..Default::default()
        };
        for (k, v) in doc.dir_event_rate {
            out.dir_event_rate.insert(parse_dir(&k)?, v);
        }
        for (k, v) in doc.expected_event_delta {
            let parts: Vec<&str> = k.split('|').collect();
            if parts.len() != 4 {
                return Err(format!("bad expected_event_delta key: {k}"));
            }
            out.expected_event_delta.insert(
                (
                    parse_zone(parts[0])?,
                    parse_dir(parts[1])?,
                    parse_dep(parts[2])?,
                    parse_bool(parts[3])?,
                ),
                v,
            );
        }
        for (k, v) in doc.category_event_rate {
            let parts: Vec<&str> = k.split('|').collect();
            if parts.len() != 3 {
                return Err(format!("bad category_event_rate key: {k}"));
            }
            out.category_event_rate.insert(
                (parse_zone(parts[0])?, parse_dep(parts[1])?, parse_bool(parts[2])?),
                v,
            );
        }
        Ok(out)
    }
}
