//! Command-line pipeline: synthesize or ingest seasons, classify face-offs,
//! aggregate league baselines, compute player metrics, and emit table/figure
//! data files.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use faceoff_forge::aggregate::{compute_baselines, Eq1Denominator, LeagueBaselines, Tally};
use faceoff_forge::classify::{classify_all, ClassifiedFaceoff, ClassifyConfig};
use faceoff_forge::ingest::{
    join_external_metrics, parse_external_metrics_csv, parse_faceoffs_csv, parse_jsonl,
    parse_sequences_csv, validate_records, Diagnostic, FaceoffRecord,
};
use faceoff_forge::metrics::{
    compute_player_metrics, MetricsOptions, PlayerMetrics, QualificationRule, WdbeNormalization,
};
use faceoff_forge::report::{
    build_report, correlate_metrics, read_player_metrics_csv, write_player_metrics_csv, ReportId,
    ReportSpec, SortDirection,
};
use faceoff_forge::rink::RinkSpec;
use faceoff_forge::synth::{generate_season, SynthParams};
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "faceoff-forge", version, about = "Face-off classification and player-impact metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a season, classify every face-off, and write classified rows.
    Ingest(IngestArgs),
    /// Parse a season and report schema/bounds findings without classifying.
    Validate(ValidateArgs),
    /// Aggregate classified rows into league baseline rates.
    Baselines(BaselinesArgs),
    /// Compute the per-player metrics table from classified rows.
    Metrics(MetricsArgs),
    /// Emit a table or figure data file.
    Report(ReportArgs),
    /// Generate a seeded synthetic season.
    Synth(SynthArgs),
    /// Correlate player metrics against external CF%/XGD columns.
    Correlate(CorrelateArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Season file: face-off CSV or JSONL with inline sequences.
    #[arg(long)]
    input: PathBuf,
    /// Sequence event CSV (required for CSV input).
    #[arg(long)]
    sequences: Option<PathBuf>,
    /// Classification config JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output JSONL of classified rows.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    sequences: Option<PathBuf>,
}

#[derive(Args)]
struct BaselinesArgs {
    /// Classified rows JSONL from `ingest`.
    #[arg(long)]
    input: PathBuf,
    /// Eq. 1 denominator: league rates over wins or all direction rows.
    #[arg(long, default_value = "wins")]
    eq1_denominator: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MetricsArgs {
    /// Classified rows JSONL from `ingest`.
    #[arg(long)]
    input: PathBuf,
    /// Baselines JSON; computed from the input when omitted.
    #[arg(long)]
    baselines: Option<PathBuf>,
    /// External player metrics CSV (cf_pct, xgd).
    #[arg(long)]
    metrics_file: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    min_faceoffs: u64,
    /// Count center-ice face-offs in the EE denominator.
    #[arg(long)]
    include_center: bool,
    /// Normalize WDBE win probabilities per zone instead of per
    /// (zone, deployment) cell.
    #[arg(long)]
    wdbe_per_zone: bool,
    #[arg(long, default_value = "wins")]
    eq1_denominator: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Report id: table1|table2|table3|fig2|fig3|fig4|fig5|fig6|appx31|appx33|appx332|appx4.
    #[arg(long)]
    id: String,
    /// Classified rows JSONL from `ingest`.
    #[arg(long)]
    input: PathBuf,
    /// Baselines JSON (table2); computed from the input when omitted.
    #[arg(long)]
    baselines: Option<PathBuf>,
    /// Player metrics CSV from `metrics`; computed from the input when omitted.
    #[arg(long)]
    metrics_file: Option<PathBuf>,
    #[arg(long, default_value = "top")]
    direction: String,
    #[arg(long, default_value_t = 20)]
    limit: usize,
    #[arg(long, default_value_t = 200)]
    min_faceoffs: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Generator parameters JSON; a built-in example league when omitted.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output face-off CSV.
    #[arg(long)]
    out: PathBuf,
    /// Output sequence CSV; defaults to `<out stem>.sequences.csv`.
    #[arg(long)]
    sequences: Option<PathBuf>,
}

#[derive(Args)]
struct CorrelateArgs {
    /// Player metrics CSV from `metrics`.
    #[arg(long)]
    metrics_file: PathBuf,
    #[arg(long, default_value_t = 200)]
    min_faceoffs: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
    ))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn print_diagnostics(path: &Path, diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        eprintln!("{}:{}: {}", path.display(), d.line, d.message);
    }
}

fn load_season(input: &Path, sequences: Option<&Path>) -> Result<Vec<FaceoffRecord>> {
    let (records, diagnostics) = if input.extension().is_some_and(|e| e == "jsonl") {
        parse_jsonl(open(input)?).with_context(|| format!("reading {}", input.display()))?
    } else {
        let seq = match sequences {
            Some(path) => {
                let (seq, diags) = parse_sequences_csv(open(path)?)
                    .with_context(|| format!("reading {}", path.display()))?;
                print_diagnostics(path, &diags);
                seq
            }
            None => BTreeMap::new(),
        };
        parse_faceoffs_csv(open(input)?, &seq)
            .with_context(|| format!("reading {}", input.display()))?
    };
    print_diagnostics(input, &diagnostics);
    Ok(records)
}

fn load_config(path: Option<&Path>) -> Result<ClassifyConfig> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot open {}", p.display()))?;
            ClassifyConfig::from_json(&text).with_context(|| format!("parsing {}", p.display()))
        }
        None => Ok(ClassifyConfig::default()),
    }
}

fn load_classified(path: &Path) -> Result<Vec<ClassifiedFaceoff>> {
    let mut rows = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: ClassifiedFaceoff = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: bad classified row", path.display(), i + 1))?;
        rows.push(row);
    }
    Ok(rows)
}

fn load_baselines(path: Option<&Path>, tally: &Tally, denominator: Eq1Denominator) -> Result<LeagueBaselines> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot open {}", p.display()))?;
            LeagueBaselines::from_json(&text)
                .map_err(|e| anyhow::anyhow!("parsing {}: {e}", p.display()))
        }
        None => Ok(compute_baselines(tally, denominator)),
    }
}

fn metrics_options(min_faceoffs: u64, include_center: bool, wdbe_per_zone: bool) -> MetricsOptions {
    MetricsOptions {
        qualification: QualificationRule { min_faceoffs },
        include_center_in_ee: include_center,
        wdbe_normalization: if wdbe_per_zone {
            WdbeNormalization::PerZone
        } else {
            WdbeNormalization::PerZoneDeployment
        },
    }
}

fn cmd_ingest(args: &IngestArgs) -> Result<()> {
    let records = load_season(&args.input, args.sequences.as_deref())?;
    let cfg = load_config(args.config.as_deref())?;
    let rink = RinkSpec::default();
    let (rows, diagnostics) = classify_all(&records, &rink, &cfg)?;
    for d in &diagnostics {
        eprintln!("{}", d);
    }
    let mut w = create(&args.out)?;
    for row in &rows {
        serde_json::to_writer(&mut w, row)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    eprintln!("classified {} face-offs -> {} rows", records.len(), rows.len());
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<()> {
    let records = load_season(&args.input, args.sequences.as_deref())?;
    let report = validate_records(&records, &RinkSpec::default());
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn cmd_baselines(args: &BaselinesArgs) -> Result<()> {
    let rows = load_classified(&args.input)?;
    let denominator: Eq1Denominator = args
        .eq1_denominator
        .parse()
        .map_err(|e: String| anyhow::anyhow!(e))?;
    let tally = Tally::from_rows(rows.iter());
    let baselines = compute_baselines(&tally, denominator);
    let mut w = create(&args.out)?;
    w.write_all(baselines.to_json().as_bytes())?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn load_external(
    path: Option<&Path>,
    tally: &Tally,
) -> Result<BTreeMap<String, faceoff_forge::ingest::ExternalPlayerMetrics>> {
    let path = match path {
        Some(p) => p,
        None => return Ok(BTreeMap::new()),
    };
    let external = parse_external_metrics_csv(open(path)?)
        .with_context(|| format!("reading {}", path.display()))?;
    let players: Vec<String> = tally.players.keys().cloned().collect();
    let (joined, missing) = join_external_metrics(&players, &external)?;
    if !missing.is_empty() {
        eprintln!("{} players missing from {}", missing.len(), path.display());
    }
    Ok(joined)
}

fn cmd_metrics(args: &MetricsArgs) -> Result<()> {
    let rows = load_classified(&args.input)?;
    let tally = Tally::from_rows(rows.iter());
    let denominator: Eq1Denominator = args
        .eq1_denominator
        .parse()
        .map_err(|e: String| anyhow::anyhow!(e))?;
    let baselines = load_baselines(args.baselines.as_deref(), &tally, denominator)?;
    let external = load_external(args.metrics_file.as_deref(), &tally)?;
    let options = metrics_options(args.min_faceoffs, args.include_center, args.wdbe_per_zone);
    let metrics = compute_player_metrics(&tally, &baselines, &external, &options);
    write_player_metrics_csv(&metrics, create(&args.out)?)?;
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> Result<()> {
    let id = ReportId::parse(&args.id)?;
    let direction = SortDirection::parse(&args.direction)?;
    let spec = ReportSpec::new(id, direction, args.limit)?;
    let rows = load_classified(&args.input)?;
    let tally = Tally::from_rows(rows.iter());
    let baselines = load_baselines(args.baselines.as_deref(), &tally, Eq1Denominator::Wins)?;
    let qualification = QualificationRule {
        min_faceoffs: args.min_faceoffs,
    };
    let metrics: Vec<PlayerMetrics> = match &args.metrics_file {
        Some(p) => read_player_metrics_csv(open(p)?)?,
        None => {
            let options = metrics_options(args.min_faceoffs, false, false);
            compute_player_metrics(&tally, &baselines, &BTreeMap::new(), &options)
        }
    };
    let text = build_report(&spec, &tally, Some(&baselines), Some(&metrics), &qualification)?;
    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let params = match &args.params {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot open {}", p.display()))?;
            SynthParams::from_json(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => SynthParams::example(30, args.seed),
    };
    let records = generate_season(&params, args.n, args.seed)?;
    faceoff_forge::ingest::write_faceoffs_csv(&records, create(&args.out)?)?;
    let seq_path = args.sequences.clone().unwrap_or_else(|| {
        let stem = args.out.file_stem().map_or_else(
            || "season".to_string(),
            |s| s.to_string_lossy().into_owned(),
        );
        args.out.with_file_name(format!("{stem}.sequences.csv"))
    });
    faceoff_forge::ingest::write_sequences_csv(&records, create(&seq_path)?)?;
    eprintln!("wrote {} face-offs to {}", records.len(), args.out.display());
    Ok(())
}

fn cmd_correlate(args: &CorrelateArgs) -> Result<()> {
    let metrics = read_player_metrics_csv(open(&args.metrics_file)?)?;
    if metrics.len() < 2 {
        bail!("need at least 2 players in {}", args.metrics_file.display());
    }
    let q = QualificationRule {
        min_faceoffs: args.min_faceoffs,
    };
    let text = correlate_metrics(&metrics, &q);
    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Baselines(args) => cmd_baselines(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Report(args) => cmd_report(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Correlate(args) => cmd_correlate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
