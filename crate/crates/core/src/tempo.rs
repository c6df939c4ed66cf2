//! Domain types and the bar-level tempo arithmetic.
//!
//! A recording of one movement is captured as cumulative lap timestamps
//! `T_1..T_M`, measured from the movement's downbeat (`T_0 = 0`, implicit).
//! Bar durations are first differences of that sequence and the tempo of
//! bar `i` is `n_i * 60 / dt_i`, where `n_i` comes from the [`MeterMap`].
//!
//! All times are seconds held as `f64`. Decimal days only appear at the
//! ingestion and export edges (see [`bpm_from_days`]).

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub const SECONDS_PER_DAY: f64 = 86_400.0;

/// Two reaction-time half-widths (±0.1 s per press).
pub const DEFAULT_CONSISTENCY_TOLERANCE: f64 = 0.2;

/// Beats in one bar. Rational so that irregular meters survive exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Beats(Ratio<i64>);

impl Beats {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::domain("beats denominator must be nonzero"));
        }
        Ok(Beats(Ratio::new(numer, denom)))
    }

    pub fn whole(n: i64) -> Self {
        Beats(Ratio::from_integer(n))
    }

    /// Closest small rational to `value` (e.g. `2.5` becomes `5/2`).
    pub fn from_f64(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::domain(format!("beats must be finite, got {value}")));
        }
        Ratio::approximate_float(value)
            .map(Beats)
            .ok_or_else(|| Error::domain(format!("cannot represent {value} beats as a ratio")))
    }

    pub fn ratio(self) -> Ratio<i64> {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_positive(self) -> bool {
        self.0 > Ratio::zero()
    }
}

impl fmt::Display for Beats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Beats {
    type Err = Error;

    /// Accepts `"4"`, `"7/2"` or a decimal such as `"2.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n
                .trim()
                .parse()
                .map_err(|_| Error::domain(format!("invalid beats numerator in {s:?}")))?;
            let d: i64 = d
                .trim()
                .parse()
                .map_err(|_| Error::domain(format!("invalid beats denominator in {s:?}")))?;
            return Beats::new(n, d);
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(Beats::whole(n));
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::domain(format!("invalid beats value {s:?}")))?;
        Beats::from_f64(v)
    }
}

impl Serialize for Beats {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            s.serialize_i64(self.0.to_integer())
        } else {
            s.serialize_str(&self.0.to_string())
        }
    }
}

/// Cumulative lap timestamps for one movement of one recording.
#[derive(Debug, Clone, PartialEq)]
pub struct LapSequence {
    timestamps: Vec<f64>,
    anacrusis_duration: Option<f64>,
    reported_total: Option<f64>,
}

impl LapSequence {
    /// Validates that timestamps are finite, positive and strictly increasing.
    pub fn new(timestamps: Vec<f64>) -> Result<Self> {
        if timestamps.is_empty() {
            return Err(Error::domain("lap sequence is empty"));
        }
        let mut prev = 0.0_f64;
        for (i, &t) in timestamps.iter().enumerate() {
            let bar = i + 1;
            if !t.is_finite() {
                return Err(Error::InvalidLap {
                    bar,
                    message: format!("timestamp {t} is not finite"),
                });
            }
            if t <= 0.0 {
                return Err(Error::InvalidLap {
                    bar,
                    message: format!("timestamp {t} s is not positive"),
                });
            }
            if i > 0 && t <= prev {
                return Err(Error::InvalidLap {
                    bar,
                    message: format!("timestamp {t} s is not after bar {} ({prev} s)", bar - 1),
                });
            }
            prev = t;
        }
        Ok(LapSequence {
            timestamps,
            anacrusis_duration: None,
            reported_total: None,
        })
    }

    pub fn with_anacrusis(mut self, seconds: Option<f64>) -> Result<Self> {
        if let Some(s) = seconds {
            if !s.is_finite() || s < 0.0 {
                return Err(Error::domain(format!("anacrusis duration {s} must be finite and >= 0")));
            }
        }
        self.anacrusis_duration = seconds;
        Ok(self)
    }

    pub fn with_reported_total(mut self, seconds: Option<f64>) -> Result<Self> {
        if let Some(s) = seconds {
            if !s.is_finite() || s <= 0.0 {
                return Err(Error::domain(format!("reported total {s} must be finite and > 0")));
            }
        }
        self.reported_total = seconds;
        Ok(self)
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    /// `T_i` for `i` in `0..=len`, with `T_0 = 0`.
    pub fn boundary(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.timestamps[i - 1]
        }
    }

    /// `T_M`, the movement duration.
    pub fn total(&self) -> f64 {
        *self.timestamps.last().expect("lap sequence is never empty")
    }

    pub fn anacrusis_duration(&self) -> Option<f64> {
        self.anacrusis_duration
    }

    pub fn reported_total(&self) -> Option<f64> {
        self.reported_total
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeterSegment {
    /// 1-based first bar of the segment.
    pub from_bar: usize,
    pub beats_per_bar: Beats,
}

/// Beats per bar for every bar of a movement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeterMap {
    bar_count: usize,
    segments: Vec<MeterSegment>,
    anacrusis_beats: Option<Beats>,
}

impl MeterMap {
    /// Adjacent segments with the same beat count are merged, so two maps
    /// describing the same bars compare equal.
    pub fn new(bar_count: usize, segments: Vec<MeterSegment>, anacrusis_beats: Option<Beats>) -> Result<Self> {
        if bar_count == 0 {
            return Err(Error::schema("bars", "bar count must be positive"));
        }
        if segments.is_empty() {
            return Err(Error::schema("segments", "bar 1 uncovered: no segments given"));
        }
        for (i, seg) in segments.iter().enumerate() {
            if i == 0 && seg.from_bar != 1 {
                let msg = if seg.from_bar > 1 {
                    format!("bar 1 uncovered: first segment starts at bar {}", seg.from_bar)
                } else {
                    "bars are numbered from 1".to_string()
                };
                return Err(Error::schema("segments[0].from_bar", msg));
            }
            if i > 0 && seg.from_bar <= segments[i - 1].from_bar {
                return Err(Error::schema(
                    format!("segments[{i}].from_bar"),
                    format!(
                        "segment starting at bar {} overlaps segment starting at bar {}",
                        seg.from_bar,
                        segments[i - 1].from_bar
                    ),
                ));
            }
            if seg.from_bar > bar_count {
                return Err(Error::schema(
                    format!("segments[{i}].from_bar"),
                    format!("segment starts at bar {} beyond bar count {bar_count}", seg.from_bar),
                ));
            }
            if !seg.beats_per_bar.is_positive() {
                return Err(Error::schema(
                    format!("segments[{i}].beats"),
                    format!("beats per bar must be positive, got {}", seg.beats_per_bar),
                ));
            }
        }
        if let Some(a) = anacrusis_beats {
            if a.ratio() < Ratio::zero() {
                return Err(Error::schema("anacrusis_beats", "must be nonnegative"));
            }
        }
        let mut merged: Vec<MeterSegment> = Vec::with_capacity(segments.len());
        for seg in segments {
            match merged.last() {
                Some(last) if last.beats_per_bar == seg.beats_per_bar => {}
                _ => merged.push(seg),
            }
        }
        Ok(MeterMap {
            bar_count,
            segments: merged,
            anacrusis_beats,
        })
    }

    /// A single meter over the whole movement.
    pub fn uniform(bar_count: usize, beats: Beats) -> Result<Self> {
        Self::new(
            bar_count,
            vec![MeterSegment {
                from_bar: 1,
                beats_per_bar: beats,
            }],
            None,
        )
    }

    pub fn bar_count(&self) -> usize {
        self.bar_count
    }

    pub fn segments(&self) -> &[MeterSegment] {
        &self.segments
    }

    pub fn anacrusis_beats(&self) -> Option<Beats> {
        self.anacrusis_beats
    }

    /// `n_i` for a 1-based bar. Bars past the end take the last segment's meter.
    pub fn beats_at(&self, bar: usize) -> Beats {
        let idx = self.segments.partition_point(|s| s.from_bar <= bar);
        self.segments[idx.saturating_sub(1)].beats_per_bar
    }

    pub fn beats_per_bar(&self) -> Vec<Beats> {
        (1..=self.bar_count).map(|b| self.beats_at(b)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BarFlag {
    Measured,
    FermataResolved,
    Corrected,
    Anomalous,
}

/// Per-bar durations and tempi.
#[derive(Debug, Clone, PartialEq)]
pub struct TempoSeries {
    bar_durations: Vec<f64>,
    bpm: Vec<f64>,
    flags: Vec<BarFlag>,
}

impl TempoSeries {
    pub fn bar_durations(&self) -> &[f64] {
        &self.bar_durations
    }

    pub fn bpm(&self) -> &[f64] {
        &self.bpm
    }

    pub fn flags(&self) -> &[BarFlag] {
        &self.flags
    }

    pub fn len(&self) -> usize {
        self.bpm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bpm.is_empty()
    }

    /// Sets the flag of a 1-based bar.
    pub fn set_flag(&mut self, bar: usize, flag: BarFlag) -> Result<()> {
        match self.flags.get_mut(bar.wrapping_sub(1)) {
            Some(f) => {
                *f = flag;
                Ok(())
            }
            None => Err(Error::domain(format!("bar {bar} out of range 1..={}", self.len()))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RecordingMeta {
    pub performer: String,
    pub year: i32,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub meta: RecordingMeta,
    pub laps: LapSequence,
    pub series: TempoSeries,
}

/// Recordings of one movement, aligned on the bar index.
#[derive(Debug, Clone, PartialEq)]
pub struct MovementCorpus {
    movement_id: String,
    meter: MeterMap,
    entries: Vec<CorpusEntry>,
}

impl MovementCorpus {
    pub fn new(movement_id: impl Into<String>, meter: MeterMap, entries: Vec<CorpusEntry>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &entries {
            if e.meta.label.is_empty() {
                return Err(Error::domain("recording label must be nonempty"));
            }
            if !seen.insert(e.meta.label.as_str()) {
                return Err(Error::domain(format!("duplicate recording label {:?}", e.meta.label)));
            }
            if e.series.len() != meter.bar_count() || e.laps.len() != meter.bar_count() {
                return Err(Error::domain(format!(
                    "recording {:?} has {} bars, meter has {}",
                    e.meta.label,
                    e.laps.len(),
                    meter.bar_count()
                )));
            }
        }
        Ok(MovementCorpus {
            movement_id: movement_id.into(),
            meter,
            entries,
        })
    }

    /// Builds entries by computing each recording's tempo series.
    pub fn from_laps(
        movement_id: impl Into<String>,
        meter: MeterMap,
        recordings: Vec<(RecordingMeta, LapSequence)>,
    ) -> Result<Self> {
        let entries = recordings
            .into_iter()
            .map(|(meta, laps)| {
                let series = compute_tempo_series(&laps, &meter)?;
                Ok(CorpusEntry { meta, laps, series })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(movement_id, meter, entries)
    }

    pub fn movement_id(&self) -> &str {
        &self.movement_id
    }

    pub fn meter(&self) -> &MeterMap {
        &self.meter
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, label: &str) -> Option<&CorpusEntry> {
        self.entries.iter().find(|e| e.meta.label == label)
    }
}

/// `dt_i = T_i - T_{i-1}` with `T_0 = 0`.
pub fn bar_durations(laps: &LapSequence) -> Vec<f64> {
    let mut prev = 0.0;
    laps.timestamps()
        .iter()
        .map(|&t| {
            let d = t - prev;
            prev = t;
            d
        })
        .collect()
}

/// Tempo of a bar of `beats` beats lasting `delta_t` seconds.
pub fn bpm_from_duration(delta_t: f64, beats: Beats) -> Result<f64> {
    if !(delta_t > 0.0) || !delta_t.is_finite() {
        return Err(Error::domain(format!(
            "bar duration must be positive and finite, got {delta_t}"
        )));
    }
    if !beats.is_positive() {
        return Err(Error::domain(format!("beats must be positive, got {beats}")));
    }
    Ok(beats.as_f64() * 60.0 / delta_t)
}

/// Same as [`bpm_from_duration`] for a duration held in spreadsheet decimal days.
pub fn bpm_from_days(delta_t_days: f64, beats: Beats) -> Result<f64> {
    bpm_from_duration(delta_t_days * SECONDS_PER_DAY, beats)
}

/// First-order magnitude of the tempo error caused by shifting one
/// timestamp by `jitter` seconds: `|dBPM/ddt| * jitter = n*60/dt^2 * jitter`.
pub fn bpm_error_bound(delta_t: f64, beats: Beats, jitter: f64) -> Result<f64> {
    if !(delta_t > 0.0) || !delta_t.is_finite() {
        return Err(Error::domain(format!(
            "bar duration must be positive and finite, got {delta_t}"
        )));
    }
    if !(jitter >= 0.0) || !jitter.is_finite() {
        return Err(Error::domain(format!(
            "jitter must be nonnegative and finite, got {jitter}"
        )));
    }
    Ok(beats.as_f64() * 60.0 / (delta_t * delta_t) * jitter)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SumCheck {
    /// No independently measured total was available.
    Skipped,
    Checked {
        reported_total: f64,
        /// `|sum(dt) - reported_total|`
        residual: f64,
        ok: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub expected_bars: usize,
    pub actual_bars: usize,
    pub count_ok: bool,
    /// `actual_bars - expected_bars`
    pub count_delta: i64,
    pub duration_sum: f64,
    /// `|sum(dt) - T_M|`; zero up to rounding.
    pub telescoping_residual: f64,
    pub tolerance: f64,
    pub sum_check: SumCheck,
}

impl ConsistencyReport {
    pub fn sum_ok(&self) -> bool {
        match self.sum_check {
            SumCheck::Skipped => true,
            SumCheck::Checked { ok, .. } => ok,
        }
    }

    pub fn passed(&self) -> bool {
        self.count_ok && self.sum_ok()
    }
}

/// Lap count against the meter and the duration sum against the reported
/// total. Failures are report fields, never errors.
pub fn consistency_check(laps: &LapSequence, meter: &MeterMap, tolerance: f64) -> ConsistencyReport {
    let duration_sum: f64 = bar_durations(laps).iter().sum();
    let sum_check = match laps.reported_total() {
        None => SumCheck::Skipped,
        Some(total) => {
            let residual = (duration_sum - total).abs();
            SumCheck::Checked {
                reported_total: total,
                residual,
                ok: residual <= tolerance,
            }
        }
    };
    ConsistencyReport {
        expected_bars: meter.bar_count(),
        actual_bars: laps.len(),
        count_ok: laps.len() == meter.bar_count(),
        count_delta: laps.len() as i64 - meter.bar_count() as i64,
        duration_sum,
        telescoping_residual: (duration_sum - laps.total()).abs(),
        tolerance,
        sum_check,
    }
}

/// Durations and tempi for every bar, all flagged as measured.
pub fn compute_tempo_series(laps: &LapSequence, meter: &MeterMap) -> Result<TempoSeries> {
    let report = consistency_check(laps, meter, DEFAULT_CONSISTENCY_TOLERANCE);
    if !report.count_ok {
        return Err(Error::BarCountMismatch(Box::new(report)));
    }
    force_tempo_series(laps, meter)
}

/// Like [`compute_tempo_series`] but ignores a bar-count mismatch: bar `i`
/// of the laps is paired with `n_i` of the meter, and surplus bars take the
/// meter of the last segment. Used to inspect misaligned recordings.
pub fn force_tempo_series(laps: &LapSequence, meter: &MeterMap) -> Result<TempoSeries> {
    let bar_durations = bar_durations(laps);
    let bpm = bar_durations
        .iter()
        .enumerate()
        .map(|(i, &dt)| bpm_from_duration(dt, meter.beats_at(i + 1)))
        .collect::<Result<Vec<_>>>()?;
    let flags = vec![BarFlag::Measured; bpm.len()];
    Ok(TempoSeries {
        bar_durations,
        bpm,
        flags,
    })
}
