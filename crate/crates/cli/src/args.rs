use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "laptempo", version, about = "Bar-level tempo from cumulative lap timestamps")]
pub struct Cli {
    /// Project config (JSON)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory, overriding the config's output_dir
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Continue past validation failures, leaving out misaligned recordings
    #[arg(long, global = true)]
    pub force: bool,

    /// Random seed for simulation
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check lap counts, duration sums and tempo spikes per recording
    Validate,
    /// Write the workbook CSV and a summary JSON
    Compute(ComputeArgs),
    /// Render SVG charts
    Plot(PlotArgs),
    /// Monte Carlo check of the lap-press error model
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Rebuild the corpus from a workbook instead of the lap files
    #[arg(long, value_name = "PATH")]
    pub from_workbook: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum PlotKind {
    TempographFocused,
    TempographGrid,
    HistogramPdf,
    Ridgeline,
    StackedSections,
    Combination,
    /// Focused tempograph, histogram, ridgeline, stacked sections and combination
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PaletteArg {
    Coolwarm,
    Categorical,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long, value_enum)]
    pub kind: PlotKind,

    #[arg(long, value_name = "PATH")]
    pub from_workbook: Option<PathBuf>,

    /// Histogram bin width in BPM
    #[arg(long, value_name = "BPM")]
    pub bin_width: Option<f64>,

    /// Comma-separated recording labels
    #[arg(long, value_delimiter = ',')]
    pub labels: Vec<String>,

    /// Bar range for the focused tempograph, e.g. 350:400
    #[arg(long, value_name = "FROM:TO", value_parser = parse_span)]
    pub span: Option<(usize, usize)>,

    /// Comma-separated bars to mark on the focused tempograph
    #[arg(long, value_delimiter = ',', value_name = "BARS")]
    pub annotate: Vec<usize>,

    #[arg(long, value_enum)]
    pub palette: Option<PaletteArg>,

    #[arg(long)]
    pub width: Option<u32>,

    #[arg(long)]
    pub height: Option<u32>,

    /// Scale each grid panel to its own tempo range
    #[arg(long)]
    pub independent_y: bool,

    /// Fixed ridgeline KDE bandwidth in BPM
    #[arg(long, value_name = "BPM")]
    pub bandwidth: Option<f64>,
}

fn parse_span(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected FROM:TO, got {s:?}"))?;
    let a = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistributionArg {
    Uniform,
    Gaussian,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Constant ground-truth tempo
    #[arg(long, conflicts_with = "curve")]
    pub bpm: Option<f64>,

    /// JSON array of per-bar ground-truth tempi
    #[arg(long, value_name = "PATH")]
    pub curve: Option<PathBuf>,

    /// Bars for a constant tempo
    #[arg(long, default_value_t = 100)]
    pub bars: usize,

    /// Beats per bar, e.g. 4 or 3/2
    #[arg(long, default_value = "4")]
    pub beats: String,

    /// Half-width (uniform) or sigma (gaussian) in seconds
    #[arg(long, default_value_t = 0.1)]
    pub jitter: f64,

    #[arg(long, value_enum, default_value = "uniform")]
    pub distribution: DistributionArg,

    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
}
