//! Per-player value metrics: expected events from directional win shares,
//! win- and direction-based events over expectation, descriptive summaries,
//! timing comparisons, and Pearson correlation against external inputs.

use crate::aggregate::{BucketKey, BucketStats, ExpectedKey, LeagueBaselines, Tally};
use crate::ingest::ExternalPlayerMetrics;
use crate::rink::{Deployment, DirectionSector, ZoneSection};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("player has no eligible face-offs")]
    NoEligibleFaceoffs,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

/// Minimum face-offs taken for ranked report tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualificationRule {
    pub min_faceoffs: u64,
}

impl Default for QualificationRule {
    fn default() -> Self {
        QualificationRule { min_faceoffs: 200 }
    }
}

/// Denominator for a player's per-bucket win probability in the WDBE sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WdbeNormalization {
    /// Face-offs taken in the (zone, deployment) cell (default).
    #[default]
    PerZoneDeployment,
    /// Face-offs taken in the zone alone.
    PerZone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerMetrics {
    pub player_id: String,
    pub faceoffs: u64,
    pub overall_win_pct: Option<f64>,
    pub clean_pct_among_wins: Option<f64>,
    pub win_pct_among_clean: Option<f64>,
    pub strong_side_pct: Option<f64>,
    pub ee: Option<f64>,
    pub wdbe: Option<f64>,
    pub wdbe_pctile: Option<f64>,
    pub wdbe_per_zone: BTreeMap<ZoneSection, f64>,
    pub cf_pct: Option<f64>,
    pub xgd: Option<f64>,
}

type PlayerBuckets = BTreeMap<BucketKey, BucketStats>;

fn count_rows<F: Fn(&BucketKey) -> bool>(buckets: &PlayerBuckets, pred: F) -> u64 {
    buckets
        .iter()
        .filter(|(k, _)| pred(k))
        .map(|(_, s)| s.faceoffs)
        .sum()
}

/// Eq. 1: sum over directions of the league event rate times the player's
/// share of face-offs won to that direction. Directions with no league rate
/// are skipped; center-ice rows are excluded from the denominator unless
/// `include_center`.
pub fn expected_events(
    player: &PlayerBuckets,
    league_rates: &BTreeMap<DirectionSector, Option<f64>>,
    include_center: bool,
) -> Result<f64, MetricsError> {
    let denom = if include_center {
        count_rows(player, |_| true)
    } else {
        count_rows(player, |k| k.zone.is_some())
    };
    if denom == 0 {
        return Err(MetricsError::NoEligibleFaceoffs);
    }
    let mut total = 0.0;
    for dir in DirectionSector::ALL {
        let rate = match league_rates.get(&dir).copied().flatten() {
            Some(r) => r,
            None => continue,
        };
        let wins = count_rows(player, |k| k.is_winner && k.direction == Some(dir));
        total += rate * wins as f64 / denom as f64;
    }
    Ok(total)
}

/// Eq. 2: sum over (zone, direction, deployment, clean) buckets of the
/// player's win probability in the bucket times the league's doubled
/// win-vs-loss event delta. Per-zone partial sums are exposed for zone-level
/// correlations.
pub fn wdbe(
    player: &PlayerBuckets,
    expected: &BTreeMap<ExpectedKey, Option<f64>>,
    normalization: WdbeNormalization,
) -> Result<(f64, BTreeMap<ZoneSection, f64>), MetricsError> {
    let cell_faceoffs = |zone: ZoneSection, dep: Deployment| -> u64 {
        match normalization {
            WdbeNormalization::PerZoneDeployment => {
                count_rows(player, |k| k.zone == Some(zone) && k.deployment == Some(dep))
            }
            WdbeNormalization::PerZone => count_rows(player, |k| k.zone == Some(zone)),
        }
    };
    let eligible = count_rows(player, |k| k.zone.is_some() && k.deployment.is_some());
    if eligible == 0 {
        return Err(MetricsError::NoEligibleFaceoffs);
    }
    let mut total = 0.0;
    let mut per_zone: BTreeMap<ZoneSection, f64> = BTreeMap::new();
    for (k, s) in player {
        if !k.is_winner {
            continue;
        }
        let (zone, dir, dep) = match (k.zone, k.direction, k.deployment) {
            (Some(z), Some(d), Some(dep)) => (z, d, dep),
            _ => continue,
        };
        let delta = match expected.get(&(zone, dir, dep, k.clean)).copied().flatten() {
            Some(e) => e,
            None => continue,
        };
        let cell = cell_faceoffs(zone, dep);
        if cell == 0 {
            continue;
        }
        let p = s.faceoffs as f64 / cell as f64;
        total += p * delta;
        *per_zone.entry(zone).or_default() += p * delta;
    }
    Ok((total, per_zone))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlayerSummary {
    pub faceoffs: u64,
    pub wins: u64,
    pub clean_wins: u64,
    pub clean_losses: u64,
    pub overall_win_pct: Option<f64>,
    pub clean_pct_among_wins: Option<f64>,
    pub win_pct_among_clean: Option<f64>,
    pub strong_side_pct: Option<f64>,
}

fn pct(num: u64, den: u64) -> Option<f64> {
    if den == 0 {
        None
    } else {
        Some(100.0 * num as f64 / den as f64)
    }
}

pub fn player_summary(player: &PlayerBuckets) -> PlayerSummary {
    let faceoffs = count_rows(player, |_| true);
    let wins = count_rows(player, |k| k.is_winner);
    let clean_wins = count_rows(player, |k| k.is_winner && k.clean);
    let clean_losses = count_rows(player, |k| !k.is_winner && k.clean);
    let strong = count_rows(player, |k| k.deployment == Some(Deployment::Strong));
    let non_center = count_rows(player, |k| k.zone.is_some());
    PlayerSummary {
        faceoffs,
        wins,
        clean_wins,
        clean_losses,
        overall_win_pct: pct(wins, faceoffs),
        clean_pct_among_wins: pct(clean_wins, wins),
        win_pct_among_clean: pct(clean_wins, clean_wins + clean_losses),
        strong_side_pct: pct(strong, non_center),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TimingReport {
    /// Mean elapsed seconds from drop to first touch, winner rows, by clean.
    pub mean_elapsed_by_clean: BTreeMap<bool, f64>,
    pub mean_elapsed_by_direction: BTreeMap<DirectionSector, f64>,
    pub mean_elapsed_by_direction_and_clean: BTreeMap<(DirectionSector, bool), f64>,
    /// Fractional speedup of clean over non-clean wins (0.25 = 25% faster).
    pub clean_speedup: Option<f64>,
    /// Fractional speedup of backward-outside over backward-inside wins.
    pub backward_outside_speedup: Option<f64>,
}

pub fn timing_stats(t: &Tally) -> TimingReport {
    let mut by_clean: BTreeMap<bool, (f64, u64)> = BTreeMap::new();
    let mut by_dir: BTreeMap<DirectionSector, (f64, u64)> = BTreeMap::new();
    let mut by_both: BTreeMap<(DirectionSector, bool), (f64, u64)> = BTreeMap::new();
    for (k, s) in &t.buckets {
        if !k.is_winner {
            continue;
        }
        let e = by_clean.entry(k.clean).or_default();
        e.0 += s.sum_elapsed_s;
        e.1 += s.faceoffs;
        if let Some(dir) = k.direction {
            let e = by_dir.entry(dir).or_default();
            e.0 += s.sum_elapsed_s;
            e.1 += s.faceoffs;
            let e = by_both.entry((dir, k.clean)).or_default();
            e.0 += s.sum_elapsed_s;
            e.1 += s.faceoffs;
        }
    }
    let mean = |(sum, n): (f64, u64)| if n == 0 { None } else { Some(sum / n as f64) };
    let mut report = TimingReport::default();
    for (k, v) in by_clean {
        if let Some(m) = mean(v) {
            report.mean_elapsed_by_clean.insert(k, m);
        }
    }
    for (k, v) in by_dir {
        if let Some(m) = mean(v) {
            report.mean_elapsed_by_direction.insert(k, m);
        }
    }
    for (k, v) in by_both {
        if let Some(m) = mean(v) {
            report.mean_elapsed_by_direction_and_clean.insert(k, m);
        }
    }
    report.clean_speedup = match (
        report.mean_elapsed_by_clean.get(&true),
        report.mean_elapsed_by_clean.get(&false),
    ) {
        (Some(c), Some(n)) if *n > 0.0 => Some((n - c) / n),
        _ => None,
    };
    report.backward_outside_speedup = match (
        report
            .mean_elapsed_by_direction
            .get(&DirectionSector::BackwardOutside),
        report
            .mean_elapsed_by_direction
            .get(&DirectionSector::BackwardInside),
    ) {
        (Some(bwo), Some(bwi)) if *bwi > 0.0 => Some((bwi - bwo) / bwi),
        _ => None,
    };
    report
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, MetricsError> {
    if xs.len() != ys.len() {
        return Err(MetricsError::DegenerateInput("length mismatch".into()));
    }
    if xs.len() < 2 {
        return Err(MetricsError::DegenerateInput("need at least 2 points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetricsError::DegenerateInput("zero variance".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Rank-based percentile in [0, 100] with mean-rank ties. A singleton (or
/// all-equal) input sits at 50.
pub fn percentile_rank(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![50.0];
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut out = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // 1-based mean rank of the tie group, scaled to [0, 100].
        let mean_rank = (i + j) as f64 / 2.0 + 1.0;
        let p = (mean_rank - 1.0) / (n as f64 - 1.0) * 100.0;
        for &idx in &order[i..=j] {
            out[idx] = p;
        }
        i = j + 1;
    }
    out
}

pub struct MetricsOptions {
    pub qualification: QualificationRule,
    pub include_center_in_ee: bool,
    pub wdbe_normalization: WdbeNormalization,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        MetricsOptions {
            qualification: QualificationRule::default(),
            include_center_in_ee: false,
            wdbe_normalization: WdbeNormalization::default(),
        }
    }
}

/// Assemble the full per-player metrics table. The qualification threshold
/// gates only the percentile ranking, never the metric values themselves.
pub fn compute_player_metrics(
    t: &Tally,
    baselines: &LeagueBaselines,
    external: &BTreeMap<String, ExternalPlayerMetrics>,
    options: &MetricsOptions,
) -> Vec<PlayerMetrics> {
    let mut out = Vec::with_capacity(t.players.len());
    for (player_id, buckets) in &t.players {
        let summary = player_summary(buckets);
        let ee = expected_events(buckets, &baselines.dir_event_rate, options.include_center_in_ee)
            .ok();
        let (wdbe_total, per_zone) = match wdbe(
            buckets,
            &baselines.expected_event_delta,
            options.wdbe_normalization,
        ) {
            Ok((total, per_zone)) => (Some(total), per_zone),
            Err(_) => (None, BTreeMap::new()),
        };
        let ext = external.get(player_id);
        out.push(PlayerMetrics {
            player_id: player_id.clone(),
            faceoffs: summary.faceoffs,
            overall_win_pct: summary.overall_win_pct,
            clean_pct_among_wins: summary.clean_pct_among_wins,
            win_pct_among_clean: summary.win_pct_among_clean,
            strong_side_pct: summary.strong_side_pct,
            ee,
            wdbe: wdbe_total,
            wdbe_pctile: None,
            wdbe_per_zone: per_zone,
            cf_pct: ext.map(|e| e.cf_pct),
            xgd: ext.map(|e| e.xgd),
        });
    }
    // Percentile rank among qualified players with a WDBE value.
    let qualified: Vec<usize> = out
        .iter()
        .enumerate()
        .filter(|(_, m)| m.faceoffs >= options.qualification.min_faceoffs && m.wdbe.is_some())
        .map(|(i, _)| i)
        .collect();
    let values: Vec<f64> = qualified.iter().map(|&i| out[i].wdbe.unwrap()).collect();
    let pctiles = percentile_rank(&values);
    for (slot, &i) in qualified.iter().enumerate() {
        out[i].wdbe_pctile = Some(pctiles[slot]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rink::Side;

    fn key(
        is_winner: bool,
        zone: Option<ZoneSection>,
        dir: Option<DirectionSector>,
        dep: Option<Deployment>,
        clean: bool,
    ) -> BucketKey {
        BucketKey {
            zone,
            side: zone.map(|_| Side::Left),
            direction: dir,
            deployment: dep,
            clean,
            is_winner,
        }
    }

    fn stats(faceoffs: u64) -> BucketStats {
        BucketStats {
            faceoffs,
            events: 0,
            sum_elapsed_s: 0.0,
            sum_distance_ft: 0.0,
        }
    }

    #[test]
    fn ee_hand_fixture() {
        // Rates {Backward: 0.4, Outside: 0.2}; 10 face-offs, 5 backward wins,
        // 2 outside wins -> 0.24.
        let mut rates: BTreeMap<DirectionSector, Option<f64>> = BTreeMap::new();
        rates.insert(DirectionSector::Backward, Some(0.4));
        rates.insert(DirectionSector::Outside, Some(0.2));
        let mut player = PlayerBuckets::new();
        let zone = Some(ZoneSection::OffensiveZone);
        let dep = Some(Deployment::Strong);
        player.insert(
            key(true, zone, Some(DirectionSector::Backward), dep, true),
            stats(5),
        );
        player.insert(
            key(true, zone, Some(DirectionSector::Outside), dep, true),
            stats(2),
        );
        player.insert(
            key(false, zone, Some(DirectionSector::Forward), dep, false),
            stats(3),
        );
        let ee = expected_events(&player, &rates, false).unwrap();
        assert!((ee - 0.24).abs() < 1e-12);
    }

    #[test]
    fn ee_zero_wins_and_errors() {
        let mut rates: BTreeMap<DirectionSector, Option<f64>> = BTreeMap::new();
        rates.insert(DirectionSector::Backward, Some(0.4));
        let mut player = PlayerBuckets::new();
        player.insert(
            key(
                false,
                Some(ZoneSection::OffensiveZone),
                Some(DirectionSector::Forward),
                Some(Deployment::Strong),
                false,
            ),
            stats(4),
        );
        assert_eq!(expected_events(&player, &rates, false).unwrap(), 0.0);
        let empty = PlayerBuckets::new();
        assert_eq!(
            expected_events(&empty, &rates, false).unwrap_err(),
            MetricsError::NoEligibleFaceoffs
        );
    }

    #[test]
    fn wdbe_hand_fixture() {
        // E = 0.30 in one bucket; player won 5 of 10 (OZ, Strong) draws
        // backward-clean -> contribution 0.15.
        let mut expected: BTreeMap<ExpectedKey, Option<f64>> = BTreeMap::new();
        expected.insert(
            (
                ZoneSection::OffensiveZone,
                DirectionSector::Backward,
                Deployment::Strong,
                true,
            ),
            Some(0.30),
        );
        let mut player = PlayerBuckets::new();
        player.insert(
            key(
                true,
                Some(ZoneSection::OffensiveZone),
                Some(DirectionSector::Backward),
                Some(Deployment::Strong),
                true,
            ),
            stats(5),
        );
        player.insert(
            key(
                false,
                Some(ZoneSection::OffensiveZone),
                Some(DirectionSector::Forward),
                Some(Deployment::Strong),
                false,
            ),
            stats(5),
        );
        let (total, per_zone) =
            wdbe(&player, &expected, WdbeNormalization::PerZoneDeployment).unwrap();
        assert!((total - 0.15).abs() < 1e-12);
        assert!((per_zone[&ZoneSection::OffensiveZone] - 0.15).abs() < 1e-12);
    }

    #[test]
    fn wdbe_negative_delta_propagates_sign() {
        let mut expected: BTreeMap<ExpectedKey, Option<f64>> = BTreeMap::new();
        expected.insert(
            (
                ZoneSection::DefensiveZone,
                DirectionSector::Forward,
                Deployment::Weak,
                false,
            ),
            Some(-0.5),
        );
        let mut player = PlayerBuckets::new();
        player.insert(
            key(
                true,
                Some(ZoneSection::DefensiveZone),
                Some(DirectionSector::Forward),
                Some(Deployment::Weak),
                false,
            ),
            stats(2),
        );
        player.insert(
            key(
                false,
                Some(ZoneSection::DefensiveZone),
                Some(DirectionSector::Backward),
                Some(Deployment::Weak),
                false,
            ),
            stats(2),
        );
        let (total, _) = wdbe(&player, &expected, WdbeNormalization::PerZoneDeployment).unwrap();
        assert!((total - (-0.25)).abs() < 1e-12);
    }

    #[test]
    fn summary_table1_fixture() {
        // 515 wins of 1000, 295 clean wins, 286 clean losses.
        let mut player = PlayerBuckets::new();
        let zone = Some(ZoneSection::OffensiveZone);
        let dep = Some(Deployment::Strong);
        let dir = Some(DirectionSector::Backward);
        player.insert(key(true, zone, dir, dep, true), stats(295));
        player.insert(key(true, zone, dir, dep, false), stats(220));
        player.insert(key(false, zone, dir, dep, true), stats(286));
        player.insert(key(false, zone, dir, dep, false), stats(199));
        let s = player_summary(&player);
        assert_eq!(s.faceoffs, 1000);
        assert!((s.overall_win_pct.unwrap() - 51.5).abs() < 0.05);
        assert!((s.clean_pct_among_wins.unwrap() - 57.3).abs() < 0.05);
        assert!((s.win_pct_among_clean.unwrap() - 50.8).abs() < 0.05);
        assert_eq!(s.strong_side_pct, Some(100.0));
    }

    #[test]
    fn summary_zero_denominators() {
        let mut player = PlayerBuckets::new();
        player.insert(
            key(
                false,
                Some(ZoneSection::OffensiveZone),
                Some(DirectionSector::Backward),
                Some(Deployment::Weak),
                false,
            ),
            stats(3),
        );
        let s = player_summary(&player);
        assert_eq!(s.clean_pct_among_wins, None);
        assert_eq!(s.win_pct_among_clean, None);
        assert_eq!(s.overall_win_pct, Some(0.0));
    }

    #[test]
    fn pearson_fixtures() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-9);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-9);
        assert!((pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap() - 0.8).abs() < 1e-9);
        assert!(matches!(
            pearson(&[1.0, 1.0], &[1.0, 2.0]),
            Err(MetricsError::DegenerateInput(_))
        ));
        assert!(matches!(
            pearson(&[1.0], &[1.0]),
            Err(MetricsError::DegenerateInput(_))
        ));
    }

    #[test]
    fn percentile_fixtures() {
        assert_eq!(percentile_rank(&[10.0, 20.0, 30.0]), vec![0.0, 50.0, 100.0]);
        assert_eq!(percentile_rank(&[5.0, 5.0, 5.0]), vec![50.0, 50.0, 50.0]);
        assert_eq!(percentile_rank(&[7.0]), vec![50.0]);
        assert_eq!(percentile_rank(&[]), Vec::<f64>::new());
        // Unsorted input keeps positional alignment.
        assert_eq!(percentile_rank(&[30.0, 10.0, 20.0]), vec![100.0, 0.0, 50.0]);
    }

    #[test]
    fn timing_ratio_fixture() {
        use crate::classify::ClassifiedFaceoff;
        let mk = |clean: bool, elapsed: f64| ClassifiedFaceoff {
            faceoff_id: "f".into(),
            player: "p".into(),
            is_winner: true,
            zone: Some(ZoneSection::OffensiveZone),
            side: Some(Side::Left),
            direction: Some(DirectionSector::Backward),
            deployment: Some(Deployment::Strong),
            clean,
            elapsed_s: elapsed,
            distance_ft: 10.0,
            shot_event: false,
            zone_change: false,
        };
        let rows = vec![mk(true, 1.5), mk(true, 1.5), mk(false, 2.0), mk(false, 2.0)];
        let t = Tally::from_rows(&rows);
        let report = timing_stats(&t);
        assert!((report.clean_speedup.unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(report.backward_outside_speedup, None);
    }

    #[test]
    fn ee_scale_invariance() {
        let mut rates: BTreeMap<DirectionSector, Option<f64>> = BTreeMap::new();
        rates.insert(DirectionSector::Backward, Some(0.4));
        rates.insert(DirectionSector::Inside, Some(0.1));
        let zone = Some(ZoneSection::NeutralNorth);
        let dep = Some(Deployment::Weak);
        let mut player = PlayerBuckets::new();
        player.insert(
            key(true, zone, Some(DirectionSector::Backward), dep, true),
            stats(3),
        );
        player.insert(
            key(false, zone, Some(DirectionSector::Inside), dep, false),
            stats(7),
        );
        let ee1 = expected_events(&player, &rates, false).unwrap();
        let mut doubled = player.clone();
        for s in doubled.values_mut() {
            s.faceoffs *= 2;
        }
        let ee2 = expected_events(&doubled, &rates, false).unwrap();
        assert!((ee1 - ee2).abs() < 1e-12);
    }
}
