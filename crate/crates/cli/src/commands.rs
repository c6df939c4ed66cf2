use std::io::Write;
use std::path::Path;

use laptempo::analysis::{
    align_corpus, detect_anomalies, recording_summary, section_proportions, AnomalyReport, DEFAULT_ANOMALY_RATIO,
    DEFAULT_ANOMALY_WINDOW,
};
use laptempo::ingest::{export_workbook, import_workbook};
use laptempo::render::{render, ChartKind, ChartSpec, Palette};
use laptempo::tempo::{
    consistency_check, force_tempo_series, ConsistencyReport, MovementCorpus, SumCheck, DEFAULT_CONSISTENCY_TOLERANCE,
};
use serde::Serialize;

use crate::args::{Cli, Command, ComputeArgs, PaletteArg, PlotArgs, PlotKind};
use crate::config::{read, LoadedRecording, Project};
use crate::output::write_atomic;
use crate::{simulate, CliError, EXIT_OK};

pub(crate) fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    if let Command::Simulate(args) = &cli.command {
        return simulate::cmd_simulate(args, cli.seed, out);
    }
    let config = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Usage("--config is required for this command".into()))?;
    let project = Project::open(config)?;
    match &cli.command {
        Command::Validate => cmd_validate(&project, out),
        Command::Compute(args) => cmd_compute(&project, args, cli, out),
        Command::Plot(args) => cmd_plot(&project, args, cli, out),
        Command::Simulate(_) => unreachable!(),
    }
}

fn io(out: &mut dyn Write, text: std::fmt::Arguments) -> Result<(), CliError> {
    out.write_fmt(text).map_err(|source| CliError::Io {
        path: "<stdout>".into(),
        source,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RecordingCheck {
    pub label: String,
    /// Set when the lap file violates the lap invariants.
    pub lap_error: Option<String>,
    pub consistency: Option<ConsistencyReport>,
    pub anomalies: Option<AnomalyReport>,
    /// Flagged bars not listed in `explained_anomalies`.
    pub unexplained_anomalies: Vec<usize>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub movement_id: String,
    pub bars: usize,
    pub recordings: Vec<RecordingCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.recordings.iter().all(|r| r.passed)
    }

    fn failed_labels(&self) -> Vec<&str> {
        self.recordings
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.label.as_str())
            .collect()
    }
}

fn check_recording(rec: &LoadedRecording, project: &Project) -> RecordingCheck {
    let label = rec.config.label.clone();
    let laps = match &rec.laps {
        Ok(l) => l,
        Err(e) => {
            return RecordingCheck {
                label,
                lap_error: Some(e.to_string()),
                consistency: None,
                anomalies: None,
                unexplained_anomalies: Vec::new(),
                passed: false,
            }
        }
    };
    let consistency = consistency_check(laps, &project.meter, DEFAULT_CONSISTENCY_TOLERANCE);
    // misaligned recordings are still scanned so the merged bar shows up
    let anomalies = force_tempo_series(laps, &project.meter)
        .and_then(|s| detect_anomalies(&s, DEFAULT_ANOMALY_WINDOW, DEFAULT_ANOMALY_RATIO));
    let (anomalies, lap_error) = match anomalies {
        Ok(a) => (Some(a), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let unexplained: Vec<usize> = anomalies
        .iter()
        .flat_map(|a| a.bars())
        .filter(|b| !rec.config.explained_anomalies.contains(b))
        .collect();
    let passed = lap_error.is_none() && consistency.passed() && unexplained.is_empty();
    RecordingCheck {
        label,
        lap_error,
        consistency: Some(consistency),
        anomalies,
        unexplained_anomalies: unexplained,
        passed,
    }
}

/// Consistency and anomaly checks for every recording of a project.
pub fn validate_project(project: &Project) -> ValidationReport {
    ValidationReport {
        movement_id: project.config.movement_id.clone(),
        bars: project.meter.bar_count(),
        recordings: project.recordings.iter().map(|r| check_recording(r, project)).collect(),
    }
}

fn write_report(report: &ValidationReport, out: &mut dyn Write) -> Result<(), CliError> {
    io(
        out,
        format_args!(
            "movement {}: {} recording(s), {} bars\n",
            report.movement_id,
            report.recordings.len(),
            report.bars
        ),
    )?;
    for r in &report.recordings {
        let status = if r.passed { "ok" } else { "FAIL" };
        io(out, format_args!("[{status}] {}\n", r.label))?;
        if let Some(e) = &r.lap_error {
            io(out, format_args!("  laps: {e}\n"))?;
        }
        if let Some(c) = &r.consistency {
            io(
                out,
                format_args!(
                    "  bar count: expected {}, found {} ({:+} bars)\n",
                    c.expected_bars, c.actual_bars, c.count_delta
                ),
            )?;
            io(
                out,
                format_args!(
                    "  duration sum: {:.6} s, telescoping residual {:.3e} s\n",
                    c.duration_sum, c.telescoping_residual
                ),
            )?;
            match c.sum_check {
                SumCheck::Skipped => io(out, format_args!("  reported total: not given\n"))?,
                SumCheck::Checked {
                    reported_total,
                    residual,
                    ok,
                } => io(
                    out,
                    format_args!(
                        "  reported total: {reported_total:.3} s, residual {residual:+.3} s ({})\n",
                        if ok { "within tolerance" } else { "exceeds tolerance" }
                    ),
                )?,
            }
        }
        if let Some(a) = &r.anomalies {
            for f in &a.flagged {
                let note = if r.unexplained_anomalies.contains(&f.bar) {
                    ""
                } else {
                    ", explained"
                };
                io(
                    out,
                    format_args!(
                        "  anomaly at bar {}: {:.2} BPM against local median {:.2} ({}{note})\n",
                        f.bar, f.bpm, f.reference_bpm, f.reason
                    ),
                )?;
            }
        }
    }
    Ok(())
}

pub fn cmd_validate(project: &Project, out: &mut dyn Write) -> Result<i32, CliError> {
    let report = validate_project(project);
    write_report(&report, out)?;
    if report.passed() {
        Ok(EXIT_OK)
    } else {
        Err(CliError::Failed(format!(
            "validation failed for: {}",
            report.failed_labels().join(", ")
        )))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Excluded {
    pub label: String,
    pub reason: String,
}

/// Corpus of the recordings that pass alignment. Without `force` any
/// validation failure aborts.
pub fn build_corpus(
    project: &Project,
    force: bool,
    out: &mut dyn Write,
) -> Result<(MovementCorpus, Vec<Excluded>), CliError> {
    let report = validate_project(project);
    if !report.passed() && !force {
        write_report(&report, out)?;
        return Err(CliError::Failed(format!(
            "validation failed for: {}; rerun with --force to continue without them",
            report.failed_labels().join(", ")
        )));
    }
    let mut excluded = Vec::new();
    let mut admitted = Vec::new();
    for rec in &project.recordings {
        match &rec.laps {
            Ok(l) => admitted.push((rec.meta(), l.clone())),
            Err(e) => excluded.push(Excluded {
                label: rec.config.label.clone(),
                reason: e.to_string(),
            }),
        }
    }
    if admitted.is_empty() {
        return Err(CliError::Failed("no recording has usable laps".into()));
    }
    let (corpus, alignment) = align_corpus(&project.config.movement_id, admitted, &project.meter)?;
    excluded.extend(alignment.rejected.iter().map(|i| Excluded {
        label: i.label.clone(),
        reason: format!("bar count {}", i.describe()),
    }));
    Ok((corpus, excluded))
}

fn corpus_from_workbook(project: &Project, path: &Path) -> Result<MovementCorpus, CliError> {
    let corpus = import_workbook(&read(path)?).map_err(|e| match CliError::from(e) {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })?;
    if corpus.movement_id() != project.config.movement_id {
        return Err(CliError::Input(format!(
            "{}: workbook is for movement {:?}, config names {:?}",
            path.display(),
            corpus.movement_id(),
            project.config.movement_id
        )));
    }
    if corpus.meter().beats_per_bar() != project.meter.beats_per_bar() {
        return Err(CliError::Failed(format!(
            "{}: workbook beats per bar disagree with the meter map",
            path.display()
        )));
    }
    Ok(corpus)
}

#[derive(Debug, Clone, Serialize)]
pub struct SectionShare {
    pub name: String,
    pub proportion: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecordingRow {
    pub label: String,
    pub performer: String,
    pub year: i32,
    pub bars: usize,
    pub total_duration: f64,
    pub mean_bpm: f64,
    pub std_bpm: f64,
    pub min_bpm: f64,
    pub max_bpm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub section_proportions: Option<Vec<SectionShare>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub movement_id: String,
    pub bars: usize,
    pub recordings: Vec<RecordingRow>,
    pub excluded: Vec<Excluded>,
}

pub fn summarize(project: &Project, corpus: &MovementCorpus, excluded: Vec<Excluded>) -> Result<Summary, CliError> {
    let mut recordings = Vec::with_capacity(corpus.len());
    for e in corpus.entries() {
        let s = recording_summary(&e.series)?;
        let section_proportions = match &project.sections {
            Some(map) => Some(
                section_proportions(&e.laps, map)?
                    .into_iter()
                    .zip(map.sections())
                    .map(|(p, s)| SectionShare {
                        name: s.name.clone(),
                        proportion: p,
                    })
                    .collect(),
            ),
            None => None,
        };
        recordings.push(RecordingRow {
            label: e.meta.label.clone(),
            performer: e.meta.performer.clone(),
            year: e.meta.year,
            bars: e.laps.len(),
            total_duration: e.laps.total(),
            mean_bpm: s.mean_bpm,
            std_bpm: s.std_bpm,
            min_bpm: s.min_bpm,
            max_bpm: s.max_bpm,
            section_proportions,
        });
    }
    Ok(Summary {
        movement_id: corpus.movement_id().to_owned(),
        bars: corpus.meter().bar_count(),
        recordings,
        excluded,
    })
}

pub fn cmd_compute(project: &Project, args: &ComputeArgs, cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let (corpus, excluded) = match &args.from_workbook {
        Some(path) => (corpus_from_workbook(project, path)?, Vec::new()),
        None => build_corpus(project, cli.force, out)?,
    };
    let summary = summarize(project, &corpus, excluded)?;
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    let workbook = export_workbook(&corpus)?;
    let dir = project.output_dir(cli.out.as_deref());
    let id = &project.config.movement_id;
    for (name, bytes) in [
        (format!("{id}_workbook.csv"), workbook),
        (format!("{id}_summary.json"), json.into_bytes()),
    ] {
        let path = write_atomic(&dir, &name, &bytes)?;
        io(out, format_args!("wrote {}\n", path.display()))?;
    }
    Ok(EXIT_OK)
}

/// The five chart types written by `--kind all`.
pub const ALL_KINDS: [ChartKind; 5] = [
    ChartKind::TempographFocused,
    ChartKind::HistogramPdf,
    ChartKind::Ridgeline,
    ChartKind::StackedSections,
    ChartKind::Combination,
];

fn chart_kind(kind: PlotKind) -> Option<ChartKind> {
    Some(match kind {
        PlotKind::TempographFocused => ChartKind::TempographFocused,
        PlotKind::TempographGrid => ChartKind::TempographGrid,
        PlotKind::HistogramPdf => ChartKind::HistogramPdf,
        PlotKind::Ridgeline => ChartKind::Ridgeline,
        PlotKind::StackedSections => ChartKind::StackedSections,
        PlotKind::Combination => ChartKind::Combination,
        PlotKind::All => return None,
    })
}

/// Chart settings from the config's `plot` block, overridden by flags.
/// The bar span and annotations apply to the focused tempograph only.
pub fn chart_spec(kind: ChartKind, project: &Project, args: &PlotArgs) -> ChartSpec {
    let plot = &project.config.plot;
    let mut spec = ChartSpec::new(kind);
    spec.recording_labels = if args.labels.is_empty() {
        plot.labels.clone()
    } else {
        args.labels.clone()
    };
    if kind == ChartKind::TempographFocused {
        spec.bar_span = args.span.or(plot.bar_span);
        spec.annotations = if args.annotate.is_empty() {
            plot.annotations.clone()
        } else {
            args.annotate.clone()
        };
    }
    spec.bin_width = args.bin_width.or(plot.bin_width);
    spec.reference_lines = project.config.reference_lines.clone();
    if let Some(p) = args
        .palette
        .map(|p| match p {
            PaletteArg::Coolwarm => Palette::Coolwarm,
            PaletteArg::Categorical => Palette::Categorical,
        })
        .or(plot.palette)
    {
        spec.palette = p;
    }
    if let Some(w) = args.width.or(plot.width) {
        spec.width = w;
    }
    if let Some(h) = args.height.or(plot.height) {
        spec.height = h;
    }
    spec.shared_y = !args.independent_y && plot.shared_y.unwrap_or(true);
    spec.bandwidth = args.bandwidth.or(plot.bandwidth);
    spec
}

pub fn cmd_plot(project: &Project, args: &PlotArgs, cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let corpus = match &args.from_workbook {
        Some(path) => corpus_from_workbook(project, path)?,
        None => build_corpus(project, cli.force, out)?.0,
    };
    let kinds: Vec<ChartKind> = match chart_kind(args.kind) {
        Some(k) => vec![k],
        None => ALL_KINDS.to_vec(),
    };
    let mut docs = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let spec = chart_spec(kind, project, args);
        let doc = render(&corpus, project.sections.as_ref(), &spec)
            .map_err(|e| CliError::Failed(format!("{kind}: {}", CliError::from(e))))?;
        docs.push((kind, doc));
    }
    let dir = project.output_dir(cli.out.as_deref());
    for (kind, doc) in docs {
        let path = write_atomic(
            &dir,
            &format!("{}_{kind}.svg", project.config.movement_id),
            doc.as_bytes(),
        )?;
        io(out, format_args!("wrote {}\n", path.display()))?;
    }
    Ok(EXIT_OK)
}
