//! Acceptance suite. Each test covers one release criterion and prints a
//! single PASS line (visible with `--nocapture`); a failing criterion fails
//! its test.

use faceoff_forge::aggregate::{compute_baselines, BucketKey, BucketStats, Eq1Denominator, Tally};
use faceoff_forge::classify::{classify_all, ClassifyConfig};
use faceoff_forge::ingest::ExternalPlayerMetrics;
use faceoff_forge::metrics::{
    compute_player_metrics, expected_events, pearson, player_summary, wdbe, MetricsError,
    MetricsOptions, QualificationRule, WdbeNormalization,
};
use faceoff_forge::rink::{
    reverse_perspective, sector_from_degrees, Deployment, DirectionSector, RinkSpec, Side,
    ZoneSection,
};
use faceoff_forge::synth::{analytic_baselines, analytic_ee, generate_season, SynthParams};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

fn pass(criterion: u32, detail: &str, started: Instant) {
    println!(
        "ACCEPTANCE {criterion} PASS: {detail} ({:.2}s)",
        started.elapsed().as_secs_f64()
    );
}

/// 1. Perspective reversal is an involution on all 64 triples, and the
/// worked example (defensive-zone left-side backward win, seen by the loser
/// as offensive-zone right-side forward) holds exactly.
#[test]
fn criterion_1_reversal_involution() {
    let t0 = Instant::now();
    let mut checked = 0;
    for zone in ZoneSection::ALL {
        for side in [Side::Left, Side::Right] {
            for dir in DirectionSector::ALL {
                let once = reverse_perspective(zone, side, dir);
                let twice = reverse_perspective(once.0, once.1, once.2);
                assert_eq!(twice, (zone, side, dir));
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 64);
    assert_eq!(
        reverse_perspective(
            ZoneSection::DefensiveZone,
            Side::Left,
            DirectionSector::Backward
        ),
        (
            ZoneSection::OffensiveZone,
            Side::Right,
            DirectionSector::Forward
        )
    );
    assert!(t0.elapsed().as_secs() < 1);
    pass(1, "involution holds on all 64 triples + worked example", t0);
}

/// Independent direction oracle: explicit interval table over normalized
/// degrees, written without the production index arithmetic.
fn oracle_sector(mut deg: f64) -> DirectionSector {
    while deg < -180.0 {
        deg += 360.0;
    }
    while deg >= 180.0 {
        deg -= 360.0;
    }
    if (-22.5..22.5).contains(&deg) {
        DirectionSector::Forward
    } else if (22.5..67.5).contains(&deg) {
        DirectionSector::ForwardInside
    } else if (67.5..112.5).contains(&deg) {
        DirectionSector::Inside
    } else if (112.5..157.5).contains(&deg) {
        DirectionSector::BackwardInside
    } else if !(-157.5..157.5).contains(&deg) {
        DirectionSector::Backward
    } else if (-157.5..-112.5).contains(&deg) {
        DirectionSector::BackwardOutside
    } else if (-112.5..-67.5).contains(&deg) {
        DirectionSector::Outside
    } else {
        DirectionSector::ForwardOutside
    }
}

/// 2. 360 sampled angles match the oracle; both 22.5-family boundaries obey
/// the half-open (lower-edge inclusive) rule.
#[test]
fn criterion_2_direction_binning() {
    let t0 = Instant::now();
    for deg in -180..180 {
        let deg = deg as f64;
        assert_eq!(sector_from_degrees(deg), oracle_sector(deg), "at {deg}");
    }
    assert_eq!(sector_from_degrees(22.5), DirectionSector::ForwardInside);
    assert_eq!(sector_from_degrees(-22.5), DirectionSector::Forward);
    assert_eq!(sector_from_degrees(157.5), DirectionSector::Backward);
    assert_eq!(sector_from_degrees(-157.5), DirectionSector::BackwardOutside);
    assert!(t0.elapsed().as_secs() < 1);
    pass(2, "360 angles match independent oracle; boundaries half-open", t0);
}

/// 3. 100 random partitions of a 10k-row season tally to the same counts as
/// the whole, exactly.
#[test]
fn criterion_3_monoid_partitions() {
    let t0 = Instant::now();
    let params = SynthParams::example(10, 303);
    let records = generate_season(&params, 5000, 303).unwrap();
    let (rows, _) =
        classify_all(&records, &RinkSpec::default(), &ClassifyConfig::default()).unwrap();
    assert_eq!(rows.len(), 10_000);
    let whole = Tally::from_rows(rows.iter());
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let cut = rng.gen::<f64>();
        let (a, b): (Vec<_>, Vec<_>) = rows.iter().partition(|_| rng.gen::<f64>() < cut);
        let merged = Tally::merged(Tally::from_rows(a), &Tally::from_rows(b));
        assert!(merged.counts_eq(&whole));
    }
    assert!(t0.elapsed().as_secs() < 10);
    pass(3, "100 random partitions merge to the whole, integer-exact", t0);
}

/// 4. On a 500k-draw season, estimated league direction rates are within
/// ±0.01 of the analytic baselines and per-player EE is within ±0.01 of the
/// analytic value for at least 95% of players.
#[test]
fn criterion_4_ee_oracle_equivalence() {
    let t0 = Instant::now();
    let params = SynthParams::example(12, 2024);
    let records = generate_season(&params, 500_000, 2024).unwrap();
    let (rows, _) =
        classify_all(&records, &RinkSpec::default(), &ClassifyConfig::default()).unwrap();
    let tally = Tally::from_rows(rows.iter());
    let estimated = compute_baselines(&tally, Eq1Denominator::Wins);
    let truth = analytic_baselines(&params).unwrap();
    for (dir, rate) in &truth.dir_event_rate {
        if let (Some(t), Some(e)) = (rate, estimated.dir_event_rate[dir]) {
            assert!((t - e).abs() < 0.01, "{dir}: analytic {t} vs estimated {e}");
        }
    }
    let ee_truth = analytic_ee(&params).unwrap();
    let mut within = 0;
    let mut total = 0;
    for (player, buckets) in &tally.players {
        let est = expected_events(buckets, &estimated.dir_event_rate, false).unwrap();
        total += 1;
        if (est - ee_truth[player]).abs() < 0.01 {
            within += 1;
        }
    }
    assert!(
        within as f64 >= 0.95 * total as f64,
        "only {within}/{total} players within tolerance"
    );
    assert!(t0.elapsed().as_secs() < 60);
    pass(4, "500k-draw estimates match analytic oracles", t0);
}

fn key(
    zone: Option<ZoneSection>,
    direction: Option<DirectionSector>,
    deployment: Option<Deployment>,
    clean: bool,
    is_winner: bool,
) -> BucketKey {
    BucketKey {
        zone,
        side: zone.map(|_| Side::Left),
        direction,
        deployment,
        clean,
        is_winner,
    }
}

fn stats(faceoffs: u64) -> BucketStats {
    BucketStats {
        faceoffs,
        ..Default::default()
    }
}

/// 5. Hand fixtures: Eq. 1 (rates {0.4, 0.2}, shares {0.5, 0.2} -> 0.24)
/// and Eq. 2 (E = 2 x (0.40 - 0.25) = 0.30, P = 0.5 -> 0.15) to 1e-12.
#[test]
fn criterion_5_equation_fixtures() {
    let t0 = Instant::now();
    // Eq. 1: 10 non-center face-offs, 5 won backward, 2 won forward.
    let z = Some(ZoneSection::OffensiveZone);
    let dep = Some(Deployment::Strong);
    let mut player = BTreeMap::new();
    player.insert(key(z, Some(DirectionSector::Backward), dep, false, true), stats(5));
    player.insert(key(z, Some(DirectionSector::Forward), dep, false, true), stats(2));
    player.insert(key(z, Some(DirectionSector::Inside), dep, false, false), stats(3));
    let mut rates: BTreeMap<DirectionSector, Option<f64>> = BTreeMap::new();
    rates.insert(DirectionSector::Backward, Some(0.4));
    rates.insert(DirectionSector::Forward, Some(0.2));
    let ee = expected_events(&player, &rates, false).unwrap();
    assert!((ee - 0.24).abs() < 1e-12, "EE fixture: {ee}");

    // Eq. 2: one win in a bucket with delta 0.30, one loss in the same
    // (zone, deployment) cell -> P = 0.5, contribution 0.15.
    let mut expected = BTreeMap::new();
    expected.insert(
        (
            ZoneSection::OffensiveZone,
            DirectionSector::Backward,
            Deployment::Strong,
            true,
        ),
        Some(2.0 * (0.40 - 0.25)),
    );
    let mut player = BTreeMap::new();
    player.insert(key(z, Some(DirectionSector::Backward), dep, true, true), stats(1));
    player.insert(key(z, Some(DirectionSector::Forward), dep, false, false), stats(1));
    let (total, _) = wdbe(&player, &expected, WdbeNormalization::PerZoneDeployment).unwrap();
    assert!((total - 0.15).abs() < 1e-12, "WDBE fixture: {total}");
    pass(5, "Eq. 1 fixture 0.24 and Eq. 2 fixture 0.15 to 1e-12", t0);
}

/// 6. Leaderboard fixture: 1000 face-offs, 515 wins, 295 clean wins, 286
/// clean losses -> 51.5 / 57.3 / 50.8 to one decimal.
#[test]
fn criterion_6_leaderboard_fixture() {
    let t0 = Instant::now();
    let z = Some(ZoneSection::OffensiveZone);
    let dep = Some(Deployment::Strong);
    let d = Some(DirectionSector::Backward);
    let mut player = BTreeMap::new();
    player.insert(key(z, d, dep, true, true), stats(295));
    player.insert(key(z, d, dep, false, true), stats(220));
    player.insert(key(z, d, dep, true, false), stats(286));
    player.insert(key(z, d, dep, false, false), stats(199));
    let s = player_summary(&player);
    assert_eq!(s.faceoffs, 1000);
    assert_eq!(s.wins, 515);
    let round1 = |v: Option<f64>| (v.unwrap() * 10.0).round() / 10.0;
    assert_eq!(round1(s.overall_win_pct), 51.5);
    assert_eq!(round1(s.clean_pct_among_wins), 57.3);
    assert_eq!(round1(s.win_pct_among_clean), 50.8);
    pass(6, "1000/515/295/286 fixture reports 51.5 / 57.3 / 50.8", t0);
}

/// 7. Pearson: corr(x, x) = 1 and corr(x, -x) = -1 within 1e-9; the
/// [1,3,2,4] fixture returns 0.8; zero variance raises DegenerateInput.
#[test]
fn criterion_7_pearson() {
    let t0 = Instant::now();
    let x = [1.0, 3.0, 2.0, 4.0];
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-9);
    assert!((pearson(&x, &neg).unwrap() + 1.0).abs() < 1e-9);
    let y = [1.0, 2.0, 3.0, 4.0];
    assert!((pearson(&x, &y).unwrap() - 0.8).abs() < 1e-9);
    assert!(matches!(
        pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
        Err(MetricsError::DegenerateInput(_))
    ));
    pass(7, "pearson fixtures and DegenerateInput", t0);
}

fn run(bin: &str, dir: &Path, args: &[&str]) {
    let status = Command::new(bin)
        .args(args)
        .current_dir(dir)
        .status()
        .expect("spawn CLI");
    assert!(status.success(), "{args:?} failed");
}

fn pipeline(bin: &str, dir: &Path) {
    run(bin, dir, &["synth", "--n", "71147", "--seed", "17", "--out", "season.csv"]);
    run(bin, dir, &[
        "ingest", "--input", "season.csv", "--sequences", "season.sequences.csv", "--out",
        "classified.jsonl",
    ]);
    run(bin, dir, &["baselines", "--input", "classified.jsonl", "--out", "baselines.json"]);
    run(bin, dir, &[
        "metrics", "--input", "classified.jsonl", "--baselines", "baselines.json", "--out",
        "players.csv",
    ]);
    run(bin, dir, &[
        "report", "--id", "fig5", "--input", "classified.jsonl", "--out", "fig5.json",
    ]);
    run(bin, dir, &[
        "report", "--id", "table1", "--input", "classified.jsonl", "--metrics-file", "players.csv",
        "--out", "table1.csv",
    ]);
}

/// 8. A 71,147-face-off season runs end to end through the CLI in under 30 s
/// and repeated runs produce byte-identical outputs.
#[test]
fn criterion_8_determinism_and_throughput() {
    let t0 = Instant::now();
    let bin = env!("CARGO_BIN_EXE_faceoff-forge");
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    pipeline(bin, a.path());
    let elapsed = t0.elapsed();
    pipeline(bin, b.path());
    for file in [
        "season.csv",
        "season.sequences.csv",
        "classified.jsonl",
        "baselines.json",
        "players.csv",
        "fig5.json",
        "table1.csv",
    ] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert!(!x.is_empty(), "{file} is empty");
        assert_eq!(x, y, "{file} differs between runs");
    }
    assert!(
        elapsed.as_secs() < 30,
        "single pipeline run took {elapsed:?}"
    );
    pass(8, "71,147-face-off pipeline in bounds and byte-identical", t0);
}

/// 9. With equal win probabilities but direction skill that linearly drives
/// the external xgd column, WDBE correlates with xgd more strongly than
/// overall win percentage does.
#[test]
fn criterion_9_constructed_ordering() {
    let t0 = Instant::now();
    let mut params = SynthParams::example(10, 909);
    let n = params.players.len();
    let mut skill = Vec::new();
    for (i, p) in params.players.iter_mut().enumerate() {
        for v in p.win_prob.values_mut() {
            *v = 0.5;
        }
        // Backward share rises with player index; the remainder goes
        // forward, where events are rare.
        let backward = 0.1 + 0.8 * i as f64 / (n - 1) as f64;
        let mut dist = [0.0; 8];
        dist[DirectionSector::Backward.index()] = backward;
        dist[DirectionSector::Forward.index()] = 1.0 - backward;
        p.dir_dist.insert(Deployment::Strong, dist);
        p.dir_dist.insert(Deployment::Weak, dist);
        skill.push((p.player_id.clone(), backward));
    }
    let records = generate_season(&params, 60_000, 909).unwrap();
    let (rows, _) =
        classify_all(&records, &RinkSpec::default(), &ClassifyConfig::default()).unwrap();
    let tally = Tally::from_rows(rows.iter());
    let baselines = compute_baselines(&tally, Eq1Denominator::Wins);
    let external: BTreeMap<String, ExternalPlayerMetrics> = skill
        .iter()
        .map(|(id, s)| {
            (
                id.clone(),
                ExternalPlayerMetrics {
                    player_id: id.clone(),
                    cf_pct: 50.0,
                    xgd: -2.0 + 10.0 * s,
                    faceoffs_taken: 0,
                },
            )
        })
        .collect();
    let options = MetricsOptions {
        qualification: QualificationRule { min_faceoffs: 200 },
        ..Default::default()
    };
    let metrics = compute_player_metrics(&tally, &baselines, &external, &options);
    let mut wdbe_col = Vec::new();
    let mut win_col = Vec::new();
    let mut xgd_col = Vec::new();
    for m in &metrics {
        if let (Some(w), Some(wp), Some(x)) = (m.wdbe, m.overall_win_pct, m.xgd) {
            wdbe_col.push(w);
            win_col.push(wp);
            xgd_col.push(x);
        }
    }
    assert!(wdbe_col.len() >= 8);
    let r_wdbe = pearson(&wdbe_col, &xgd_col).unwrap();
    let r_win = pearson(&win_col, &xgd_col).unwrap();
    assert!(
        r_wdbe > r_win,
        "corr(WDBE, xgd) = {r_wdbe} not above corr(win%, xgd) = {r_win}"
    );
    pass(9, "WDBE tracks constructed event skill better than win%", t0);
}
