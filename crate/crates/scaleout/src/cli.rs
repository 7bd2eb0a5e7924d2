//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage, 3 invalid input or configuration,
//! 4 file-system failure.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use scaleout_core::{
    bundled_profile, bundled_trace, fuse, min_ratio_for_target, simulate, synth_profile,
    AddCostModel, ClusterConfig, CompressionModel, FusionConfig, ModelName, ModelTrace,
    RatioSearch, SimConfig, SweepSpec, DEFAULT_RATIO_GRID, GBPS,
};

use crate::report::{self, Metadata, ReportBundle};
use crate::specfile::SweepFile;
use crate::svg::{self, Axis};
use crate::{addcsv, reference, run_sweep_parallel, tracefile};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<scaleout_core::Error> for CliError {
    fn from(e: scaleout_core::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Parser)]
#[command(
    name = "scaleout",
    version,
    about = "What-if simulator for data-parallel training"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the synthetic trace of a bundled model.
    Synth(SynthArgs),
    /// Simulate one iteration on one cluster configuration.
    Simulate(SimulateArgs),
    /// Simulate a grid of configurations and plot it.
    Sweep(SweepArgs),
    /// Smallest compression ratio that reaches a target scaling factor.
    CompressRatio(CompressArgs),
    /// Dump the bundled measured scaling factors.
    Reference(ReferenceArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub model: ModelName,
    /// Iteration time in seconds [default: bundled profile]
    #[arg(long)]
    pub t_batch: Option<f64>,
    /// Backward-pass time in seconds [default: bundled profile]
    #[arg(long)]
    pub t_back: Option<f64>,
    /// Output file [default: stdout]
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Trace document
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Bundled model
    #[arg(long)]
    pub model: Option<ModelName>,
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    #[arg(long, default_value_t = FusionConfig::DEFAULT_TIMEOUT * 1e3)]
    pub timeout_ms: f64,
    #[arg(long, default_value_t = FusionConfig::DEFAULT_BUFFER_CAP)]
    pub buffer_bytes: u64,
    /// Effective memory bandwidth of the linear add model, bytes/s
    #[arg(long, conflicts_with = "add_model")]
    pub add_mem_bw: Option<f64>,
    /// Calibrated add table (`size_bytes,seconds`)
    #[arg(long)]
    pub add_model: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 16)]
    pub workers: u32,
    #[arg(long, default_value_t = 100.0)]
    pub bandwidth_gbps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub ratio: f64,
    #[command(flatten)]
    pub policy: PolicyArgs,
    /// Write the per-batch all-reduce log as CSV
    #[arg(long)]
    pub flush_log: Option<PathBuf>,
    /// Write the fusion batches as CSV
    #[arg(long)]
    pub batches: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum XAxis {
    Auto,
    Bandwidth,
    Workers,
    Ratio,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON sweep configuration; overrides the grid flags
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Comma-separated model names [default: every bundled model and every --trace]
    #[arg(long)]
    pub models: Option<String>,
    /// Trace document, may repeat
    #[arg(long)]
    pub trace: Vec<PathBuf>,
    #[arg(long, default_value = "1,10,25,40,100")]
    pub bandwidths_gbps: String,
    #[arg(long, default_value = "16")]
    pub workers: String,
    #[arg(long, default_value = "1")]
    pub ratios: String,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[arg(long, value_enum, default_value_t = XAxis::Auto)]
    pub x_axis: XAxis,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Base name of the CSV and SVG files
    #[arg(long, default_value = "sweep")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 16)]
    pub workers: u32,
    #[arg(long, default_value_t = 10.0)]
    pub bandwidth_gbps: f64,
    /// Target scaling factor, in (0, 1)
    #[arg(long, default_value_t = 0.99)]
    pub target: f64,
    /// Comma-separated ascending ratios [default: 1,2,3,4,5,10,20,50,100]
    #[arg(long)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Args)]
pub struct ReferenceArgs {
    /// Output file [default: stdout]
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli, &mut io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Synth(a) => synth(a, stdout),
        Command::Simulate(a) => simulate_cmd(a, stdout),
        Command::Sweep(a) => sweep(a, stdout),
        Command::CompressRatio(a) => compress(a, stdout),
        Command::Reference(a) => {
            let mut buf = Vec::new();
            reference::write_reference(&reference::load_reference_data(), &mut buf)
                .expect("Vec write");
            emit(a.output.as_deref(), &buf, stdout)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn emit(path: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_file(p, bytes),
        None => stdout.write_all(bytes).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn load_trace(path: &Path) -> Result<ModelTrace> {
    let text = read(path)?;
    tracefile::parse_trace_str(&text)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn source_trace(s: &Source) -> Result<ModelTrace> {
    match (&s.trace, s.model) {
        (Some(p), _) => load_trace(p),
        (None, Some(m)) => Ok(bundled_trace(m)),
        (None, None) => unreachable!("clap requires one source"),
    }
}

impl PolicyArgs {
    fn fusion(&self) -> Result<FusionConfig> {
        Ok(FusionConfig::new(self.timeout_ms / 1e3, self.buffer_bytes)?)
    }

    fn add_model(&self) -> Result<AddCostModel> {
        match (&self.add_model, self.add_mem_bw) {
            (Some(p), _) => addcsv::read_add_model(read(p)?.as_bytes())
                .map_err(|e| CliError::Invalid(format!("{}: {e}", p.display()))),
            (None, Some(bw)) => Ok(AddCostModel::linear(bw)?),
            (None, None) => Ok(AddCostModel::default()),
        }
    }

    fn describe(&self) -> String {
        format!("{self:?}")
    }
}

fn synth(a: SynthArgs, stdout: &mut dyn Write) -> Result<()> {
    let p = bundled_profile(a.model);
    let t = synth_profile(
        a.model,
        a.t_batch.unwrap_or(p.t_batch),
        a.t_back.unwrap_or(p.t_back),
    )?;
    emit(
        a.output.as_deref(),
        tracefile::trace_to_string(&t).as_bytes(),
        stdout,
    )
}

/// The configuration `simulate` runs for the given arguments.
pub fn sim_config(
    workers: u32,
    bandwidth_gbps: f64,
    ratio: f64,
    policy: &PolicyArgs,
) -> Result<SimConfig> {
    Ok(SimConfig {
        cluster: ClusterConfig::new(workers, bandwidth_gbps * GBPS)?,
        fusion: policy.fusion()?,
        compression: CompressionModel::new(ratio)?,
        add_model: policy.add_model()?,
    })
}

fn simulate_cmd(a: SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let trace = source_trace(&a.source)?;
    let config = sim_config(a.workers, a.bandwidth_gbps, a.ratio, &a.policy)?;
    let result = simulate(&trace, &config);
    if let Some(p) = &a.flush_log {
        let mut buf = Vec::new();
        report::write_flush_log(&result, &mut buf).expect("Vec write");
        write_file(p, &buf)?;
    }
    if let Some(p) = &a.batches {
        let mut buf = Vec::new();
        report::write_batches(&fuse(&trace, &config.fusion), &mut buf).expect("Vec write");
        write_file(p, &buf)?;
    }
    let mut buf = Vec::new();
    match a.format {
        Format::Text => report::write_text_report(trace.name(), &config, &result, &mut buf),
        Format::Csv => report::write_summary_csv(trace.name(), &config, &result, &mut buf),
    }
    .expect("Vec write");
    emit(None, &buf, stdout)
}

fn parse_list<T: std::str::FromStr>(field: &str, text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| CliError::Invalid(format!("{field}: cannot parse `{s}`")))
        })
        .collect()
}

fn sweep(a: SweepArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut traces: Vec<ModelTrace> = Vec::new();
    for p in &a.trace {
        traces.push(load_trace(p)?);
    }
    let (spec, spec_text) = match &a.spec {
        Some(path) => {
            let text = read(path)?;
            let file = SweepFile::parse(&text)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
            let base = path.parent().unwrap_or(Path::new("."));
            let (spec, paths) = file
                .into_spec(base)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
            for (name, p) in paths {
                traces.push(load_trace(&p)?.with_name(name));
            }
            (spec, text)
        }
        None => {
            let models = match &a.models {
                Some(m) => parse_list::<String>("models", m)?,
                None if !traces.is_empty() => traces.iter().map(|t| t.name().to_owned()).collect(),
                None => ModelName::ALL
                    .iter()
                    .map(|m| m.as_str().to_owned())
                    .collect(),
            };
            let bws: Vec<f64> = parse_list("bandwidths_gbps", &a.bandwidths_gbps)?;
            let spec = SweepSpec {
                models,
                bandwidths_bps: bws.iter().map(|g| g * GBPS).collect(),
                worker_counts: parse_list("workers", &a.workers)?,
                compression_ratios: parse_list("ratios", &a.ratios)?,
                fusion: a.policy.fusion()?,
                add_model: a.policy.add_model()?,
            };
            let text = format!("{spec:?} {}", a.policy.describe());
            (spec, text)
        }
    };
    spec.validate()?;
    for m in &spec.models {
        if !traces.iter().any(|t| t.name() == m) {
            if let Ok(b) = m.parse::<ModelName>() {
                traces.push(bundled_trace(b));
            }
        }
    }

    let rows = run_sweep_parallel(&spec, &traces, &reference::load_reference_data())?;

    let mut parts: Vec<Vec<u8>> = vec![spec_text.into_bytes()];
    for m in &spec.models {
        if let Some(t) = traces.iter().find(|t| t.name() == m) {
            parts.push(tracefile::trace_to_string(t).into_bytes());
        }
    }
    let refs: Vec<&[u8]> = parts.iter().map(Vec::as_slice).collect();
    let bundle = ReportBundle {
        rows,
        metadata: Metadata::now(report::digest(&refs)),
    };

    fs::create_dir_all(&a.out_dir).map_err(|source| CliError::Io {
        path: a.out_dir.clone(),
        source,
    })?;
    let csv_path = a.out_dir.join(format!("{}.csv", a.name));
    let mut buf = Vec::new();
    bundle.write_csv(&mut buf).expect("Vec write");
    write_file(&csv_path, &buf)?;

    let axis = match a.x_axis {
        XAxis::Auto => Axis::infer(&bundle.rows),
        XAxis::Bandwidth => Axis::Bandwidth,
        XAxis::Workers => Axis::Workers,
        XAxis::Ratio => Axis::Ratio,
    };
    let title = format!(
        "Simulated scaling factor: {}",
        svg::models(&bundle.rows).join(", ")
    );
    let mut summary = String::new();
    let _ = writeln!(summary, "{}", csv_path.display());
    for chart in svg::charts(&bundle.rows, axis, &title) {
        let p = a.out_dir.join(format!("{}{}.svg", a.name, chart.suffix));
        write_file(&p, chart.svg.as_bytes())?;
        let _ = writeln!(summary, "{}", p.display());
    }
    emit(None, summary.as_bytes(), stdout)
}

fn compress(a: CompressArgs, stdout: &mut dyn Write) -> Result<()> {
    let trace = source_trace(&a.source)?;
    let grid = match &a.grid {
        Some(g) => parse_list::<f64>("grid", g)?,
        None => DEFAULT_RATIO_GRID.to_vec(),
    };
    let cluster = ClusterConfig::new(a.workers, a.bandwidth_gbps * GBPS)?;
    let found = min_ratio_for_target(
        &trace,
        &cluster,
        &a.policy.fusion()?,
        &a.policy.add_model()?,
        a.target,
        &grid,
    )?;
    let line = match found {
        RatioSearch::Found(r) => format!("min_ratio = {r}\n"),
        RatioSearch::Unreachable => format!(
            "min_ratio = unreachable (grid max {})\n",
            grid[grid.len() - 1]
        ),
    };
    emit(None, line.as_bytes(), stdout)
}
