//! Project configuration: one JSON document per movement.
//!
//! ```json
//! {
//!   "movement_id": "op5no1_i",
//!   "meter_map": "meter.json",
//!   "sections": "sections.json",
//!   "recordings": [
//!     {"label": "r1930", "path": "laps/r1930.csv", "performer": "A", "year": 1930,
//!      "format": {"time_unit": "seconds", "has_header": true, "delimiter": "comma"},
//!      "reported_total": 412.5, "anacrusis_duration": 0.4, "explained_anomalies": [88]}
//!   ],
//!   "reference_lines": [{"label": "Czerny", "bpm": 160}],
//!   "output_dir": "out",
//!   "plot": {"bar_span": [1, 100], "annotations": [20, 40]}
//! }
//! ```
//!
//! Relative paths are resolved against the directory holding the config.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use laptempo::analysis::SectionMap;
use laptempo::ingest::{parse_lap_csv, parse_meter_map, parse_section_map, LapFileFormat};
use laptempo::render::{Palette, ReferenceLine};
use laptempo::tempo::{LapSequence, MeterMap, RecordingMeta};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    pub movement_id: String,
    pub meter_map: PathBuf,
    pub recordings: Vec<RecordingConfig>,
    #[serde(default)]
    pub sections: Option<PathBuf>,
    #[serde(default)]
    pub reference_lines: Vec<ReferenceLine>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub plot: PlotConfig,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordingConfig {
    pub label: String,
    pub path: PathBuf,
    #[serde(default)]
    pub format: LapFileFormat,
    pub performer: String,
    pub year: i32,
    #[serde(default)]
    pub reported_total: Option<f64>,
    #[serde(default)]
    pub anacrusis_duration: Option<f64>,
    /// Bars whose anomaly flag has been checked against the recording.
    #[serde(default)]
    pub explained_anomalies: Vec<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotConfig {
    #[serde(default)]
    pub labels: Vec<String>,
    #[serde(default)]
    pub bar_span: Option<(usize, usize)>,
    #[serde(default)]
    pub annotations: Vec<usize>,
    #[serde(default)]
    pub bin_width: Option<f64>,
    #[serde(default)]
    pub palette: Option<Palette>,
    #[serde(default)]
    pub width: Option<u32>,
    #[serde(default)]
    pub height: Option<u32>,
    #[serde(default)]
    pub shared_y: Option<bool>,
    #[serde(default)]
    pub bandwidth: Option<f64>,
}

/// A recording's laps, or the reason they could not be accepted.
#[derive(Debug)]
pub struct LoadedRecording {
    pub config: RecordingConfig,
    pub laps: Result<LapSequence, laptempo::Error>,
}

impl LoadedRecording {
    pub fn meta(&self) -> RecordingMeta {
        RecordingMeta {
            performer: self.config.performer.clone(),
            year: self.config.year,
            label: self.config.label.clone(),
        }
    }
}

#[derive(Debug)]
pub struct Project {
    pub config: ProjectConfig,
    pub base_dir: PathBuf,
    pub meter: MeterMap,
    pub sections: Option<SectionMap>,
    pub recordings: Vec<LoadedRecording>,
}

pub(crate) fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn input_error(path: &Path, err: laptempo::Error) -> CliError {
    CliError::Input(format!("{}: {err}", path.display()))
}

impl ProjectConfig {
    pub fn load(path: &Path) -> Result<(ProjectConfig, PathBuf), CliError> {
        let bytes = read(path)?;
        let config: ProjectConfig =
            serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let mut seen = HashSet::new();
        for r in &config.recordings {
            if r.label.is_empty() || !seen.insert(r.label.as_str()) {
                return Err(CliError::Input(format!(
                    "{}: recording label {:?} is empty or repeated",
                    path.display(),
                    r.label
                )));
            }
        }
        if config.recordings.is_empty() {
            return Err(CliError::Input(format!("{}: no recordings listed", path.display())));
        }
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((config, base))
    }
}

impl Project {
    /// Reads the meter, sections and every lap file. Lap files that parse
    /// but violate the lap invariants are kept as per-recording failures.
    pub fn open(config_path: &Path) -> Result<Project, CliError> {
        let (config, base_dir) = ProjectConfig::load(config_path)?;
        let meter_path = base_dir.join(&config.meter_map);
        let doc = parse_meter_map(&read(&meter_path)?).map_err(|e| input_error(&meter_path, e))?;
        if doc.movement != config.movement_id {
            return Err(CliError::Input(format!(
                "{}: meter map is for movement {:?}, config names {:?}",
                meter_path.display(),
                doc.movement,
                config.movement_id
            )));
        }
        let sections = match &config.sections {
            Some(p) => {
                let path = base_dir.join(p);
                Some(parse_section_map(&read(&path)?).map_err(|e| input_error(&path, e))?)
            }
            None => None,
        };
        let mut recordings = Vec::with_capacity(config.recordings.len());
        for rc in &config.recordings {
            let path = base_dir.join(&rc.path);
            let bytes = read(&path)?;
            let laps = match parse_lap_csv(&bytes, &rc.format) {
                Ok(l) => l
                    .with_anacrusis(rc.anacrusis_duration)
                    .and_then(|l| l.with_reported_total(rc.reported_total)),
                Err(e @ laptempo::Error::InvalidLap { .. }) => Err(e),
                Err(e) => return Err(input_error(&path, e)),
            };
            recordings.push(LoadedRecording {
                config: rc.clone(),
                laps,
            });
        }
        Ok(Project {
            config,
            base_dir,
            meter: doc.meter,
            sections,
            recordings,
        })
    }

    pub fn output_dir(&self, flag: Option<&Path>) -> PathBuf {
        match flag {
            Some(p) => p.to_owned(),
            None => self.base_dir.join(&self.config.output_dir),
        }
    }
}
