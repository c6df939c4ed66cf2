//! Quality control and corpus-level aggregation.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tempo::{
    compute_tempo_series, CorpusEntry, LapSequence, MeterMap, MovementCorpus, RecordingMeta, TempoSeries,
};

pub const DEFAULT_FERMATA_DIVERGENCE_LIMIT: f64 = 0.2;
pub const DEFAULT_ANOMALY_WINDOW: usize = 5;
pub const DEFAULT_ANOMALY_RATIO: f64 = 1.8;

/// Slack for comparing a candidate spread against the divergence limit, so
/// that e.g. 10.0 and 10.2 count as "not more than 0.2 apart".
const LIMIT_EPS: f64 = 1e-9;

/// Independent timings of the barline following a fermata.
#[derive(Debug, Clone, PartialEq)]
pub struct FermataMeasurement {
    candidates: Vec<f64>,
}

impl FermataMeasurement {
    pub fn new(candidates: Vec<f64>) -> Result<Self> {
        if !(2..=3).contains(&candidates.len()) {
            return Err(Error::domain(format!(
                "fermata resolution needs 2 or 3 timings, got {}",
                candidates.len()
            )));
        }
        if let Some(c) = candidates.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(Error::domain(format!("fermata timing {c} must be positive and finite")));
        }
        Ok(FermataMeasurement { candidates })
    }

    pub fn candidates(&self) -> &[f64] {
        &self.candidates
    }
}

/// Combines repeated fermata timings.
///
/// Two timings within `divergence_limit` of each other are averaged; two
/// further apart need a third, after which the closest pair is averaged. If
/// both adjacent pairs of three sorted timings are equally close, the
/// result is the median (the mean of both pair means).
pub fn resolve_fermata(meas: &FermataMeasurement, divergence_limit: f64) -> Result<f64> {
    let mut c = meas.candidates.clone();
    c.sort_by(f64::total_cmp);
    match *c.as_slice() {
        [a, b] => {
            let spread = b - a;
            if spread > divergence_limit + LIMIT_EPS {
                Err(Error::ThirdMeasurementRequired {
                    spread,
                    limit: divergence_limit,
                })
            } else {
                Ok((a + b) / 2.0)
            }
        }
        [a, b, c] => {
            let low = b - a;
            let high = c - b;
            Ok(if low < high {
                (a + b) / 2.0
            } else if high < low {
                (b + c) / 2.0
            } else {
                b
            })
        }
        _ => unreachable!("length checked at construction"),
    }
}

/// Contiguous formal sections covering bars `1..=M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Section {
    pub name: String,
    pub from_bar: usize,
    /// Inclusive.
    pub to_bar: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionMap {
    sections: Vec<Section>,
}

impl SectionMap {
    pub fn new(sections: Vec<Section>) -> Result<Self> {
        if sections.is_empty() {
            return Err(Error::schema("sections", "at least one section is required"));
        }
        let mut next = 1;
        for (i, s) in sections.iter().enumerate() {
            if s.from_bar != next {
                return Err(Error::schema(
                    format!("sections[{i}].from_bar"),
                    format!(
                        "expected bar {next}, got {} (sections must be contiguous from bar 1)",
                        s.from_bar
                    ),
                ));
            }
            if s.to_bar < s.from_bar {
                return Err(Error::schema(
                    format!("sections[{i}].to_bar"),
                    format!("ends at bar {} before it starts at bar {}", s.to_bar, s.from_bar),
                ));
            }
            next = s.to_bar + 1;
        }
        Ok(SectionMap { sections })
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    /// Last bar covered.
    pub fn bar_count(&self) -> usize {
        self.sections.last().map_or(0, |s| s.to_bar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AnomalyReason {
    /// Tempo far above its neighbourhood: double-press signature.
    SpikeHigh,
    /// Tempo far below its neighbourhood: missed-press signature.
    SpikeLow,
}

impl std::fmt::Display for AnomalyReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AnomalyReason::SpikeHigh => "tempo spike (possible double press)",
            AnomalyReason::SpikeLow => "tempo drop (possible missed press)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Anomaly {
    pub bar: usize,
    pub bpm: f64,
    pub reference_bpm: f64,
    pub reason: AnomalyReason,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnomalyReport {
    pub method: &'static str,
    pub window: usize,
    pub ratio_limit: f64,
    /// Sorted by bar.
    pub flagged: Vec<Anomaly>,
}

impl AnomalyReport {
    pub fn bars(&self) -> Vec<usize> {
        self.flagged.iter().map(|a| a.bar).collect()
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Flags bars whose tempo departs from the median of a centred window by
/// more than `ratio_limit` in either direction. Windows are truncated at
/// the ends of the series; series shorter than 3 bars yield no flags.
pub fn detect_anomalies(series: &TempoSeries, window: usize, ratio_limit: f64) -> Result<AnomalyReport> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(Error::domain(format!("window must be odd and >= 3, got {window}")));
    }
    if !(ratio_limit > 1.0) {
        return Err(Error::domain(format!("ratio limit must exceed 1, got {ratio_limit}")));
    }
    let bpm = series.bpm();
    let mut flagged = Vec::new();
    if bpm.len() >= 3 {
        let half = window / 2;
        let mut buf = Vec::with_capacity(window);
        for (i, &v) in bpm.iter().enumerate() {
            buf.clear();
            buf.extend_from_slice(&bpm[i.saturating_sub(half)..(i + half + 1).min(bpm.len())]);
            let reference = median(&mut buf);
            let reason = if v > ratio_limit * reference {
                Some(AnomalyReason::SpikeHigh)
            } else if v < reference / ratio_limit {
                Some(AnomalyReason::SpikeLow)
            } else {
                None
            };
            if let Some(reason) = reason {
                flagged.push(Anomaly {
                    bar: i + 1,
                    bpm: v,
                    reference_bpm: reference,
                    reason,
                });
            }
        }
    }
    Ok(AnomalyReport {
        method: "window-median ratio test",
        window,
        ratio_limit,
        flagged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignmentIssue {
    pub label: String,
    pub expected_bars: usize,
    pub actual_bars: usize,
    /// `actual - expected`
    pub delta: i64,
}

impl AlignmentIssue {
    /// E.g. `"+8 bars"`.
    pub fn describe(&self) -> String {
        format!("{:+} bars", self.delta)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct AlignmentReport {
    pub rejected: Vec<AlignmentIssue>,
}

impl AlignmentReport {
    pub fn is_clean(&self) -> bool {
        self.rejected.is_empty()
    }
}

/// Admits recordings whose lap count matches the meter and reports the
/// rest. Nothing is repaired.
pub fn align_corpus(
    movement_id: &str,
    entries: Vec<(RecordingMeta, LapSequence)>,
    meter: &MeterMap,
) -> Result<(MovementCorpus, AlignmentReport)> {
    if entries.is_empty() {
        return Err(Error::domain("alignment needs at least one recording"));
    }
    let results: Vec<std::result::Result<CorpusEntry, AlignmentIssue>> = entries
        .into_par_iter()
        .map(|(meta, laps)| {
            if laps.len() == meter.bar_count() {
                let series = compute_tempo_series(&laps, meter).expect("lap count matches meter");
                Ok(CorpusEntry { meta, laps, series })
            } else {
                Err(AlignmentIssue {
                    label: meta.label,
                    expected_bars: meter.bar_count(),
                    actual_bars: laps.len(),
                    delta: laps.len() as i64 - meter.bar_count() as i64,
                })
            }
        })
        .collect();
    let mut admitted = Vec::new();
    let mut report = AlignmentReport::default();
    for r in results {
        match r {
            Ok(e) => admitted.push(e),
            Err(issue) => report.rejected.push(issue),
        }
    }
    Ok((MovementCorpus::new(movement_id, meter.clone(), admitted)?, report))
}

/// Tempo over bars `from..=to` from the two boundary timestamps alone:
/// `sum(n_i) * 60 / (T_to - T_{from-1})`.
pub fn section_tempo(laps: &LapSequence, meter: &MeterMap, from_bar: usize, to_bar: usize) -> Result<f64> {
    let last = laps.len().min(meter.bar_count());
    if from_bar < 1 || to_bar < from_bar || to_bar > last {
        return Err(Error::domain(format!(
            "invalid section {from_bar}..={to_bar} for {last} bars"
        )));
    }
    let beats: f64 = (from_bar..=to_bar).map(|b| meter.beats_at(b).as_f64()).sum();
    let duration = laps.boundary(to_bar) - laps.boundary(from_bar - 1);
    Ok(beats * 60.0 / duration)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecordingSummary {
    pub mean_bpm: f64,
    /// Population standard deviation.
    pub std_bpm: f64,
    pub min_bpm: f64,
    pub max_bpm: f64,
}

pub fn recording_summary(series: &TempoSeries) -> Result<RecordingSummary> {
    if series.is_empty() {
        return Err(Error::domain("cannot summarise an empty series"));
    }
    // Welford
    let (mut n, mut mean, mut m2) = (0.0_f64, 0.0_f64, 0.0_f64);
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in series.bpm() {
        n += 1.0;
        let d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
        min = min.min(x);
        max = max.max(x);
    }
    Ok(RecordingSummary {
        mean_bpm: mean,
        std_bpm: (m2 / n).max(0.0).sqrt(),
        min_bpm: min,
        max_bpm: max,
    })
}

/// Each section's share of the movement duration.
pub fn section_proportions(laps: &LapSequence, sections: &SectionMap) -> Result<Vec<f64>> {
    if sections.bar_count() != laps.len() {
        return Err(Error::domain(format!(
            "sections cover bars 1..={} but the recording has {} bars",
            sections.bar_count(),
            laps.len()
        )));
    }
    let total = laps.total();
    Ok(sections
        .sections()
        .iter()
        .map(|s| (laps.boundary(s.to_bar) - laps.boundary(s.from_bar - 1)) / total)
        .collect())
}
