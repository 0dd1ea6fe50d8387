use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use triality::atlas::{fetch_generators, Cache, DataManifest};
use triality::golden::Case;
use triality::pipeline::{
    run_case, CaseConfig, DataConfig, ExpectedRow, PipelineError, PipelineReport, Stage, Verdict,
};
use triality::report::{render_checks, render_report, render_table, Format};
use triality_core::{FingerprintCatalog, MemoryMode};

/// Exact verification of the triality computations for O8+(2) and O8+(3).
#[derive(Parser)]
#[command(name = "triality", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification pipeline and print the staged report.
    Verify(VerifyArgs),
    /// Render the subgroup table from JSON artifacts written by `verify`.
    Report(ReportArgs),
    /// Download the q = 3 generator file into the cache.
    FetchData(DataArgs),
    /// Run the small-group oracle suite.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Q2,
    Q3,
    All,
}

impl CaseArg {
    fn cases(self) -> Vec<Case> {
        match self {
            CaseArg::Q2 => vec![Case::Q2],
            CaseArg::Q3 => vec![Case::Q3],
            CaseArg::All => vec![Case::Q2, Case::Q3],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MemoryArg {
    Frontier,
    Reconstruct,
}

#[derive(Args)]
struct DataArgs {
    /// Directory holding manifest.json and vendored generator files.
    #[arg(long, env = "TRIALITY_DATA_DIR")]
    data_dir: Option<PathBuf>,
    /// Download cache, files named by their SHA-256 [default: <data-dir>/cache]
    #[arg(long, env = "TRIALITY_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
}

impl DataArgs {
    fn config(&self, offline: bool) -> DataConfig {
        let data_dir = self
            .data_dir
            .clone()
            .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("..").join("..").join("data"));
        let cache_dir = self.cache_dir.clone().unwrap_or_else(|| data_dir.join("cache"));
        DataConfig { data_dir, cache_dir, offline }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    case: CaseArg,
    /// Stage to run, with its prerequisites; repeatable [default: all stages]
    #[arg(long, value_enum)]
    stage: Vec<Stage>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Random elements drawn by the Monte Carlo centralizer search.
    #[arg(long, default_value_t = 1_000_000)]
    mc_budget: u64,
    /// Consecutive collisions without growth that end the Monte Carlo search.
    #[arg(long, default_value_t = 8)]
    mc_plateau: u32,
    #[arg(long, value_enum, default_value = "frontier")]
    memory_mode: MemoryArg,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here and the JSON artifact to <stem>.<case>.json beside it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Never touch the network.
    #[arg(long)]
    offline: bool,
    /// No heartbeats on stderr.
    #[arg(long)]
    quiet: bool,
    /// Expected subgroup table (`structure | order | sizes` per line).
    #[arg(long, hide = true)]
    table: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON artifacts, one per case.
    #[arg(required = true)]
    json: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "markdown")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Additional fingerprint catalog to merge before the separation check.
    #[arg(long)]
    catalog: Option<PathBuf>,
}

const FAIL: u8 = 1;
const CONFIG: u8 = 2;

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(CONFIG)
}

fn artifact_path(out: &Path, case: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    out.with_file_name(format!("{stem}.{case}.json"))
}

fn verify(args: VerifyArgs) -> ExitCode {
    let rows = match &args.table {
        Some(path) => {
            match std::fs::read_to_string(path).map_err(|e| e.to_string()).and_then(|t| ExpectedRow::parse_table(&t)) {
                Ok(r) => Some(r),
                Err(e) => return config_error(format!("{}: {e}", path.display())),
            }
        }
        None => None,
    };
    let data = args.data.config(args.offline);
    let stages: BTreeSet<Stage> =
        if args.stage.is_empty() { Stage::ALL.into_iter().collect() } else { args.stage.iter().copied().collect() };
    let mut reports: Vec<PipelineReport> = Vec::new();
    for case in args.case.cases() {
        let mut cfg = CaseConfig::new(case, data.clone());
        cfg.seed = args.seed;
        cfg.stages = stages.clone();
        cfg.memory_mode = match args.memory_mode {
            MemoryArg::Frontier => MemoryMode::Frontier,
            MemoryArg::Reconstruct => MemoryMode::Reconstruct,
        };
        cfg.mc_budget = args.mc_budget;
        cfg.mc_plateau = args.mc_plateau;
        cfg.table = rows.clone();
        cfg.verbose = !args.quiet;
        match run_case(&cfg) {
            Ok(r) => reports.push(r),
            Err(PipelineError::Data(e)) => return config_error(format!("case {}: {e}", case.name())),
            Err(e) => return config_error(format!("case {}: {e}", case.name())),
        }
    }

    let rendered = match args.format {
        Format::Json => {
            let values: Vec<_> = reports.iter().map(|r| serde_json::to_value(r).expect("serializable")).collect();
            let v = if values.len() == 1 { values[0].clone() } else { serde_json::Value::Array(values) };
            serde_json::to_string_pretty(&v).expect("serializable") + "\n"
        }
        f => reports.iter().map(|r| render_report(r, f)).collect::<Vec<_>>().join("\n"),
    };
    match &args.out {
        Some(out) => {
            if let Err(e) = std::fs::write(out, &rendered) {
                return config_error(format!("{}: {e}", out.display()));
            }
            for r in &reports {
                let path = artifact_path(out, &r.case);
                let json = serde_json::to_string_pretty(r).expect("serializable") + "\n";
                if let Err(e) = std::fs::write(&path, json) {
                    return config_error(format!("{}: {e}", path.display()));
                }
            }
        }
        None => print!("{rendered}"),
    }
    if reports.iter().all(|r| r.verdict == Verdict::Pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAIL)
    }
}

fn report(args: ReportArgs) -> ExitCode {
    let mut reports = Vec::new();
    for path in &args.json {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return config_error(format!("MissingArtifact: {}: {e}", path.display())),
        };
        match serde_json::from_str::<PipelineReport>(&text) {
            Ok(r) => reports.push(r),
            Err(e) => return config_error(format!("{}: {e}", path.display())),
        }
    }
    let table = render_table(&reports, args.format);
    match &args.out {
        Some(out) => {
            if let Err(e) = std::fs::write(out, &table) {
                return config_error(format!("{}: {e}", out.display()));
            }
        }
        None => print!("{table}"),
    }
    ExitCode::SUCCESS
}

fn fetch(args: DataArgs) -> ExitCode {
    let data = args.config(false);
    let manifest = match DataManifest::load(&data.data_dir.join("manifest.json")) {
        Ok(m) => m,
        Err(e) => return config_error(e),
    };
    let Some(transport) = triality::atlas::default_transport() else {
        return config_error("built without network support");
    };
    let cache = Cache::new(&data.cache_dir);
    match fetch_generators(&manifest, triality::q3::DATA_NAME, &cache, transport.as_ref()) {
        Ok(file) => {
            println!(
                "{} ({} points, sha256 {}) in {}",
                triality::q3::DATA_NAME,
                file.degree,
                file.digest,
                cache.dir().display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => config_error(e),
    }
}

fn selftest(args: SelftestArgs) -> ExitCode {
    let extra = match &args.catalog {
        Some(path) => {
            match std::fs::read_to_string(path)
                .map_err(|e| e.to_string())
                .and_then(|t| FingerprintCatalog::from_text(&t).map_err(|e| e.to_string()))
            {
                Ok(c) => Some(c),
                Err(e) => return config_error(format!("{}: {e}", path.display())),
            }
        }
        None => None,
    };
    let checks = triality::selftest::run(extra.as_ref());
    print!("{}", render_checks(&checks, false));
    let ok = checks.iter().all(|c| c.passed());
    println!("selftest: {}", if ok { "pass" } else { "fail" });
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAIL)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify(a) => verify(a),
        Command::Report(a) => report(a),
        Command::FetchData(a) => fetch(a),
        Command::Selftest(a) => selftest(a),
    }
}
