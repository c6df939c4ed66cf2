//! Readers and writers for lap exports, meter maps, section maps and the
//! multi-recording workbook.
//!
//! # Workbook layout
//!
//! One block of five columns per recording, blocks side by side with no
//! separator column, in corpus order:
//!
//! | column | header row 1     | header row 2        | data rows         |
//! |--------|------------------|---------------------|-------------------|
//! | A      | performer        | year                | bar index `i`     |
//! | B      | label            | reported total (s)  | `T_i` (s)         |
//! | C      | movement id      | anacrusis (s)       | `dt_i` (s)        |
//! | D      | anacrusis beats  |                     | `n_i`             |
//! | E      |                  |                     | `BPM_i`           |
//!
//! Optional cells are left empty. Times are written with the shortest
//! representation that parses back to the same `f64`; rounding for display
//! is left to the charts. Lines end in LF.

use serde::Deserialize;

use crate::analysis::{Section, SectionMap};
use crate::error::{Error, Result};
use crate::tempo::{
    bpm_from_duration, compute_tempo_series, BarFlag, Beats, CorpusEntry, LapSequence, MeterMap, MeterSegment,
    MovementCorpus, RecordingMeta, SECONDS_PER_DAY,
};

const BLOCK_WIDTH: usize = 5;
const HEADER_ROWS: usize = 2;

/// Cells disagreeing with recomputation by more than this are flagged.
pub const BPM_CORRECTION_TOLERANCE: f64 = 0.05;
const DURATION_CORRECTION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    #[default]
    Seconds,
    DecimalDays,
    /// `[H:]MM:SS[.mmm]`
    Hms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Delimiter {
    #[default]
    Comma,
    Semicolon,
    Tab,
}

impl Delimiter {
    pub fn byte(self) -> u8 {
        match self {
            Delimiter::Comma => b',',
            Delimiter::Semicolon => b';',
            Delimiter::Tab => b'\t',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LapFileFormat {
    pub time_unit: TimeUnit,
    pub has_header: bool,
    pub delimiter: Delimiter,
}

impl Default for LapFileFormat {
    fn default() -> Self {
        LapFileFormat {
            time_unit: TimeUnit::Seconds,
            has_header: true,
            delimiter: Delimiter::Comma,
        }
    }
}

impl LapFileFormat {
    pub fn seconds_without_header() -> Self {
        LapFileFormat {
            has_header: false,
            ..Self::default()
        }
    }
}

fn decode_utf8(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| Error::domain(format!("input is not valid UTF-8: {e}")))
}

fn parse_hms(text: &str) -> Option<f64> {
    let parts: Vec<&str> = text.split(':').collect();
    let (hours, minutes, seconds) = match parts.as_slice() {
        [m, s] => ("0", *m, *s),
        [h, m, s] => (*h, *m, *s),
        _ => return None,
    };
    let hours: u64 = hours.parse().ok()?;
    let minutes: u64 = minutes.parse().ok()?;
    let seconds: f64 = seconds.parse().ok()?;
    if parts.len() == 3 && minutes >= 60 {
        return None;
    }
    if !(0.0..60.0).contains(&seconds) {
        return None;
    }
    Some(hours as f64 * 3600.0 + minutes as f64 * 60.0 + seconds)
}

fn parse_time(text: &str, unit: TimeUnit) -> Option<f64> {
    let v = match unit {
        TimeUnit::Seconds => text.parse::<f64>().ok()?,
        TimeUnit::DecimalDays => text.parse::<f64>().ok()? * SECONDS_PER_DAY,
        TimeUnit::Hms => parse_hms(text)?,
    };
    v.is_finite().then_some(v)
}

fn record_text(rec: &csv::StringRecord, delim: u8) -> String {
    rec.iter().collect::<Vec<_>>().join(&(delim as char).to_string())
}

/// Reads one cumulative timestamp per data row.
///
/// A row holds either the time alone or `bar,time`; when the bar column is
/// present it must count up from 1. Nothing is skipped or repaired.
pub fn parse_lap_csv(bytes: &[u8], fmt: &LapFileFormat) -> Result<LapSequence> {
    let text = decode_utf8(bytes)?;
    let delim = fmt.delimiter.byte();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delim)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut timestamps = Vec::new();
    let mut header_pending = fmt.has_header;
    for rec in reader.records() {
        let rec = rec?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        if header_pending {
            header_pending = false;
            let all_numeric = rec.iter().all(|f| parse_time(f, fmt.time_unit).is_some());
            if all_numeric {
                return Err(Error::Parse {
                    row,
                    text: record_text(&rec, delim),
                    message: "expected a header row".into(),
                });
            }
            continue;
        }
        let fields: Vec<&str> = rec.iter().collect();
        let malformed = |message: String| Error::Parse {
            row,
            text: record_text(&rec, delim),
            message,
        };
        let time_field = match fields.as_slice() {
            [t] => *t,
            [bar, t] => {
                let expected = timestamps.len() + 1;
                match bar.parse::<usize>() {
                    Ok(b) if b == expected => *t,
                    _ => return Err(malformed(format!("expected bar index {expected}"))),
                }
            }
            _ => return Err(malformed(format!("expected 1 or 2 fields, found {}", fields.len()))),
        };
        let t = parse_time(time_field, fmt.time_unit)
            .ok_or_else(|| malformed(format!("not a valid {:?} time", fmt.time_unit)))?;
        timestamps.push(t);
    }
    if timestamps.is_empty() {
        return Err(Error::domain("lap file contains no data rows"));
    }
    LapSequence::new(timestamps)
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum BeatsValue {
    Number(f64),
    Text(String),
}

impl BeatsValue {
    fn to_beats(&self, path: &str) -> Result<Beats> {
        match self {
            BeatsValue::Number(v) => Beats::from_f64(*v),
            BeatsValue::Text(s) => s.parse(),
        }
        .map_err(|e| Error::schema(path, e.to_string()))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSegment {
    from_bar: i64,
    beats: BeatsValue,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeter {
    movement: String,
    bars: i64,
    #[serde(default)]
    anacrusis_beats: Option<BeatsValue>,
    segments: Vec<RawSegment>,
}

/// A parsed meter map document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeterDocument {
    pub movement: String,
    pub meter: MeterMap,
}

/// Parses `{movement, bars, anacrusis_beats?, segments: [{from_bar, beats}]}`.
/// `beats` may be a number or a `"p/q"` string.
pub fn parse_meter_map(bytes: &[u8]) -> Result<MeterDocument> {
    let raw: RawMeter = serde_json::from_slice(bytes)?;
    if raw.bars <= 0 {
        return Err(Error::schema("bars", format!("must be positive, got {}", raw.bars)));
    }
    let mut segments = Vec::with_capacity(raw.segments.len());
    for (i, s) in raw.segments.iter().enumerate() {
        if s.from_bar <= 0 {
            return Err(Error::schema(
                format!("segments[{i}].from_bar"),
                format!("must be positive, got {}", s.from_bar),
            ));
        }
        segments.push(MeterSegment {
            from_bar: s.from_bar as usize,
            beats_per_bar: s.beats.to_beats(&format!("segments[{i}].beats"))?,
        });
    }
    let anacrusis = raw
        .anacrusis_beats
        .as_ref()
        .map(|b| b.to_beats("anacrusis_beats"))
        .transpose()?;
    let meter = MeterMap::new(raw.bars as usize, segments, anacrusis)?;
    Ok(MeterDocument {
        movement: raw.movement,
        meter,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSection {
    name: String,
    from_bar: usize,
    to_bar: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSections {
    sections: Vec<RawSection>,
}

/// Parses `{sections: [{name, from_bar, to_bar}]}`.
pub fn parse_section_map(bytes: &[u8]) -> Result<SectionMap> {
    let raw: RawSections = serde_json::from_slice(bytes)?;
    SectionMap::new(
        raw.sections
            .into_iter()
            .map(|s| Section {
                name: s.name,
                from_bar: s.from_bar,
                to_bar: s.to_bar,
            })
            .collect(),
    )
}

fn fmt_seconds(v: f64) -> String {
    format!("{v:?}")
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(fmt_seconds).unwrap_or_default()
}

/// Serializes a corpus into the wide workbook layout described in the
/// module docs. Identical corpora give identical bytes.
pub fn export_workbook(corpus: &MovementCorpus) -> Result<Vec<u8>> {
    if corpus.is_empty() {
        return Err(Error::domain("cannot export an empty corpus"));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .flexible(false)
        .from_writer(Vec::new());

    let anacrusis_beats = corpus
        .meter()
        .anacrusis_beats()
        .map(|b| b.to_string())
        .unwrap_or_default();
    let mut row1 = Vec::new();
    let mut row2 = Vec::new();
    for e in corpus.entries() {
        row1.extend([
            e.meta.performer.clone(),
            e.meta.label.clone(),
            corpus.movement_id().to_string(),
            anacrusis_beats.clone(),
            String::new(),
        ]);
        row2.extend([
            e.meta.year.to_string(),
            opt_cell(e.laps.reported_total()),
            opt_cell(e.laps.anacrusis_duration()),
            String::new(),
            String::new(),
        ]);
    }
    w.write_record(&row1)?;
    w.write_record(&row2)?;

    let beats = corpus.meter().beats_per_bar();
    for bar in 1..=corpus.meter().bar_count() {
        let mut row = Vec::with_capacity(BLOCK_WIDTH * corpus.len());
        for e in corpus.entries() {
            row.extend([
                bar.to_string(),
                fmt_seconds(e.laps.boundary(bar)),
                fmt_seconds(e.series.bar_durations()[bar - 1]),
                beats[bar - 1].to_string(),
                e.series.bpm()[bar - 1].to_string(),
            ]);
        }
        w.write_record(&row)?;
    }
    w.into_inner()
        .map_err(|e| Error::domain(format!("workbook buffer: {e}")))
}

struct Block<'a> {
    label: &'a str,
    performer: &'a str,
    movement: &'a str,
    anacrusis_beats: &'a str,
    year: &'a str,
    reported_total: &'a str,
    anacrusis_duration: &'a str,
}

fn parse_opt_f64(cell: &str, label: &str, row: usize, what: &str) -> Result<Option<f64>> {
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse::<f64>().map(Some).map_err(|_| Error::Alignment {
        label: label.to_string(),
        row,
        message: format!("invalid {what} {cell:?}"),
    })
}

/// Reads a workbook back into a corpus.
///
/// Durations and tempi are recomputed from the cumulative column; a bar
/// whose stored duration or BPM disagrees with the recomputation is
/// flagged [`BarFlag::Corrected`].
pub fn import_workbook(bytes: &[u8]) -> Result<MovementCorpus> {
    let text = decode_utf8(bytes)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let rows: Vec<Vec<String>> = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(|s| s.trim().to_string()).collect()))
        .collect::<std::result::Result<_, _>>()?;
    if rows.len() < HEADER_ROWS {
        return Err(Error::domain("workbook needs two header rows"));
    }
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    if width == 0 || width % BLOCK_WIDTH != 0 {
        return Err(Error::Parse {
            row: 1,
            text: rows[0].join(","),
            message: format!("row width {width} is not a positive multiple of {BLOCK_WIDTH}"),
        });
    }
    let cell = |r: usize, c: usize| -> &str { rows[r].get(c).map_or("", String::as_str) };
    let n_blocks = width / BLOCK_WIDTH;

    let blocks: Vec<Block> = (0..n_blocks)
        .map(|b| {
            let c = b * BLOCK_WIDTH;
            Block {
                performer: cell(0, c),
                label: cell(0, c + 1),
                movement: cell(0, c + 2),
                anacrusis_beats: cell(0, c + 3),
                year: cell(1, c),
                reported_total: cell(1, c + 1),
                anacrusis_duration: cell(1, c + 2),
            }
        })
        .collect();

    // Each block's data length: rows with a nonempty bar cell, contiguous from the top.
    let mut lengths = Vec::with_capacity(n_blocks);
    for (b, block) in blocks.iter().enumerate() {
        let c = b * BLOCK_WIDTH;
        let mut len = 0;
        for r in HEADER_ROWS..rows.len() {
            let filled = (c..c + BLOCK_WIDTH).any(|k| !cell(r, k).is_empty());
            if filled {
                if len != r - HEADER_ROWS {
                    return Err(Error::Alignment {
                        label: block.label.to_string(),
                        row: r + 1,
                        message: "data resumes after an empty row".into(),
                    });
                }
                len += 1;
            }
        }
        lengths.push(len);
    }
    let bar_count = lengths[0];
    for (b, &len) in lengths.iter().enumerate() {
        if len != bar_count {
            let row = HEADER_ROWS + len.min(bar_count) + 1;
            let delta = len as i64 - bar_count as i64;
            return Err(Error::Alignment {
                label: blocks[b].label.to_string(),
                row,
                message: format!("block has {len} bars, first block has {bar_count} ({delta:+} bars)"),
            });
        }
    }
    if bar_count == 0 {
        return Err(Error::domain("workbook has no data rows"));
    }

    let first = &blocks[0];
    let mut beats_column: Option<Vec<Beats>> = None;
    let mut entries = Vec::with_capacity(n_blocks);
    for (b, block) in blocks.iter().enumerate() {
        let c = b * BLOCK_WIDTH;
        let label = block.label;
        let align = |row: usize, message: String| Error::Alignment {
            label: label.to_string(),
            row,
            message,
        };
        if label.is_empty() {
            return Err(align(1, "missing recording label".into()));
        }
        if block.movement != first.movement || block.anacrusis_beats != first.anacrusis_beats {
            return Err(align(1, "movement metadata differs from the first block".into()));
        }
        let year: i32 = block
            .year
            .parse()
            .map_err(|_| align(2, format!("invalid year {:?}", block.year)))?;

        let mut stamps = Vec::with_capacity(bar_count);
        let mut durations = Vec::with_capacity(bar_count);
        let mut bpms = Vec::with_capacity(bar_count);
        let mut beats = Vec::with_capacity(bar_count);
        for i in 0..bar_count {
            let r = HEADER_ROWS + i;
            let row = r + 1;
            let bar = i + 1;
            if cell(r, c).parse::<usize>().ok() != Some(bar) {
                return Err(align(row, format!("bar cell {:?}, expected {bar}", cell(r, c))));
            }
            let num = |k: usize, what: &str| -> Result<f64> {
                cell(r, c + k)
                    .parse::<f64>()
                    .map_err(|_| align(row, format!("invalid {what} {:?}", cell(r, c + k))))
            };
            stamps.push(num(1, "cumulative time")?);
            durations.push(num(2, "duration")?);
            beats.push(cell(r, c + 3).parse::<Beats>().map_err(|e| align(row, e.to_string()))?);
            bpms.push(num(4, "bpm")?);
        }
        match &beats_column {
            None => beats_column = Some(beats),
            Some(reference) => {
                if let Some(i) = reference.iter().zip(&beats).position(|(a, b)| a != b) {
                    return Err(align(
                        HEADER_ROWS + i + 1,
                        "beats per bar differ from the first block".into(),
                    ));
                }
            }
        }

        let laps = LapSequence::new(stamps)
            .and_then(|l| l.with_reported_total(parse_opt_f64(block.reported_total, label, 2, "reported total")?))
            .and_then(|l| l.with_anacrusis(parse_opt_f64(block.anacrusis_duration, label, 2, "anacrusis")?))
            .map_err(|e| match e {
                Error::InvalidLap { bar, message } => align(HEADER_ROWS + bar, message),
                other => other,
            })?;
        entries.push((
            RecordingMeta {
                performer: block.performer.to_string(),
                year,
                label: label.to_string(),
            },
            laps,
            durations,
            bpms,
        ));
    }

    let beats = beats_column.expect("at least one block");
    let mut segments: Vec<MeterSegment> = Vec::new();
    for (i, &n) in beats.iter().enumerate() {
        if segments.last().map(|s| s.beats_per_bar) != Some(n) {
            segments.push(MeterSegment {
                from_bar: i + 1,
                beats_per_bar: n,
            });
        }
    }
    let anacrusis = if first.anacrusis_beats.is_empty() {
        None
    } else {
        Some(
            first
                .anacrusis_beats
                .parse::<Beats>()
                .map_err(|e| Error::schema("anacrusis_beats", e.to_string()))?,
        )
    };
    let meter = MeterMap::new(bar_count, segments, anacrusis)?;

    let mut corpus_entries = Vec::with_capacity(entries.len());
    for (meta, laps, durations, bpms) in entries {
        let mut series = compute_tempo_series(&laps, &meter)?;
        for bar in 1..=bar_count {
            let dt = series.bar_durations()[bar - 1];
            let bpm = bpm_from_duration(dt, meter.beats_at(bar))?;
            let off_bpm = !((bpms[bar - 1] - bpm).abs() <= BPM_CORRECTION_TOLERANCE);
            let off_dt = !((durations[bar - 1] - dt).abs() <= DURATION_CORRECTION_TOLERANCE);
            if off_bpm || off_dt {
                series.set_flag(bar, BarFlag::Corrected)?;
            }
        }
        corpus_entries.push(CorpusEntry { meta, laps, series });
    }
    MovementCorpus::new(first.movement, meter, corpus_entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn secs() -> LapFileFormat {
        LapFileFormat::seconds_without_header()
    }

    #[test]
    fn parses_seconds() {
        let l = parse_lap_csv(b"1.0\n2.0\n3.0\n", &secs()).unwrap();
        assert_eq!(l.timestamps(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn parses_decimal_days() {
        let fmt = LapFileFormat {
            time_unit: TimeUnit::DecimalDays,
            ..secs()
        };
        let l = parse_lap_csv(b"1.708e-5", &fmt).unwrap();
        assert!((l.timestamps()[0] - 1.4757).abs() < 1e-4);
    }

    #[test]
    fn parses_hms() {
        let fmt = LapFileFormat {
            time_unit: TimeUnit::Hms,
            ..secs()
        };
        let l = parse_lap_csv(b"0:01:01.500\n01:02.25\n1:00:00", &fmt).unwrap();
        assert_eq!(l.timestamps(), &[61.5, 62.25, 3600.0]);
        assert!(parse_lap_csv(b"0:61:00", &fmt).is_err());
        assert!(parse_lap_csv(b"61.5", &fmt).is_err());
    }

    #[test]
    fn parses_header_and_bar_column() {
        let l = parse_lap_csv(b"bar,cumulative\n1,1.5\n2,3.0\n", &LapFileFormat::default()).unwrap();
        assert_eq!(l.timestamps(), &[1.5, 3.0]);
        let fmt = LapFileFormat {
            delimiter: Delimiter::Semicolon,
            ..LapFileFormat::default()
        };
        let l = parse_lap_csv(b"bar;cumulative\n1;1.5\n2;3.0\n", &fmt).unwrap();
        assert_eq!(l.len(), 2);
    }

    #[test]
    fn malformed_row_reports_row_and_text() {
        let err = parse_lap_csv(b"bar,cumulative\n1,1.5\n2,abc\n", &LapFileFormat::default()).unwrap_err();
        match err {
            Error::Parse { row, text, .. } => {
                assert_eq!(row, 3);
                assert_eq!(text, "2,abc");
            }
            other => panic!("unexpected {other:?}"),
        }
        // skipped bar index
        assert!(matches!(
            parse_lap_csv(b"1,1.5\n3,3.0\n", &secs()),
            Err(Error::Parse { row: 2, .. })
        ));
        // numeric first row where a header is expected is not silently dropped
        assert!(matches!(
            parse_lap_csv(b"1.0\n2.0\n", &LapFileFormat::default()),
            Err(Error::Parse { row: 1, .. })
        ));
        assert!(parse_lap_csv(b"1,2,3\n", &secs()).is_err());
    }

    #[test]
    fn non_increasing_names_bar() {
        assert!(matches!(
            parse_lap_csv(b"1.0\n2.0\n1.5\n", &secs()),
            Err(Error::InvalidLap { bar: 3, .. })
        ));
    }

    #[test]
    fn empty_file_is_an_error() {
        assert!(parse_lap_csv(b"", &secs()).is_err());
        assert!(parse_lap_csv(b"bar,cumulative\n", &LapFileFormat::default()).is_err());
        assert!(parse_lap_csv(&[0xff, 0xfe], &secs()).is_err());
    }

    #[test]
    fn meter_map_documents() {
        let d = parse_meter_map(br#"{"movement":"m","bars":4,"segments":[{"from_bar":1,"beats":4}]}"#).unwrap();
        assert_eq!(d.movement, "m");
        assert!(d.meter.beats_per_bar().iter().all(|b| *b == Beats::whole(4)));

        let d = parse_meter_map(
            br#"{"movement":"m","bars":4,"anacrusis_beats":1,"segments":[{"from_bar":1,"beats":4},{"from_bar":3,"beats":"3"}]}"#,
        )
        .unwrap();
        let n: Vec<Beats> = d.meter.beats_per_bar();
        assert_eq!(n, [4, 4, 3, 3].map(Beats::whole).to_vec());
        assert_eq!(d.meter.anacrusis_beats(), Some(Beats::whole(1)));

        let d = parse_meter_map(br#"{"movement":"m","bars":2,"segments":[{"from_bar":1,"beats":"7/2"}]}"#).unwrap();
        assert_eq!(d.meter.beats_at(2), Beats::new(7, 2).unwrap());

        let err = parse_meter_map(br#"{"movement":"m","bars":4,"segments":[{"from_bar":2,"beats":4}]}"#).unwrap_err();
        assert!(err.to_string().contains("bar 1 uncovered"), "{err}");
        let err = parse_meter_map(br#"{"movement":"m","bars":4,"segments":[{"from_bar":1,"beats":-4}]}"#).unwrap_err();
        assert!(
            matches!(err, Error::Schema { ref path, .. } if path == "segments[0].beats"),
            "{err}"
        );
        let err = parse_meter_map(
            br#"{"movement":"m","bars":4,"segments":[{"from_bar":1,"beats":4},{"from_bar":1,"beats":3}]}"#,
        )
        .unwrap_err();
        assert!(
            matches!(err, Error::Schema { ref path, .. } if path == "segments[1].from_bar"),
            "{err}"
        );
        assert!(parse_meter_map(br#"{"bars":4}"#).is_err());
    }

    #[test]
    fn section_map_documents() {
        let s = parse_section_map(
            br#"{"sections":[{"name":"A","from_bar":1,"to_bar":2},{"name":"B","from_bar":3,"to_bar":4}]}"#,
        )
        .unwrap();
        assert_eq!(s.sections().len(), 2);
        assert!(parse_section_map(br#"{"sections":[{"name":"A","from_bar":2,"to_bar":4}]}"#).is_err());
    }

    fn corpus(n_recordings: usize, bars: usize) -> MovementCorpus {
        let meter = MeterMap::uniform(bars, Beats::whole(4)).unwrap();
        let recs = (0..n_recordings)
            .map(|k| {
                let ts: Vec<f64> = (1..=bars).map(|i| i as f64 * (1.0 + 0.1 * k as f64)).collect();
                (
                    RecordingMeta {
                        performer: format!("Performer {k}"),
                        year: 1930 + k as i32,
                        label: format!("r{k}"),
                    },
                    LapSequence::new(ts).unwrap(),
                )
            })
            .collect();
        MovementCorpus::from_laps("op5-1-i", meter, recs).unwrap()
    }

    #[test]
    fn export_single_recording_rows() {
        let out = String::from_utf8(export_workbook(&corpus(1, 2)).unwrap()).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "Performer 0,r0,op5-1-i,,");
        assert_eq!(lines[1], "1930,,,,");
        assert_eq!(lines[2], "1,1.0,1.0,4,240");
        assert_eq!(lines[3], "2,2.0,1.0,4,240");
        assert!(!out.contains('\r'));
    }

    #[test]
    fn export_two_recordings_has_ten_columns() {
        let out = String::from_utf8(export_workbook(&corpus(2, 3)).unwrap()).unwrap();
        for line in out.lines().skip(2) {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells.len(), 10);
            assert_eq!(cells[0], cells[5]);
        }
    }

    #[test]
    fn export_empty_corpus_fails() {
        let meter = MeterMap::uniform(2, Beats::whole(4)).unwrap();
        let c = MovementCorpus::new("m", meter, vec![]).unwrap();
        assert!(export_workbook(&c).is_err());
    }

    #[test]
    fn round_trip_is_identity() {
        let c = corpus(3, 7);
        let back = import_workbook(&export_workbook(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn extra_row_is_alignment_error() {
        let out = String::from_utf8(export_workbook(&corpus(2, 3)).unwrap()).unwrap();
        let injected = format!("{out},,,,,4,3.4,0.1,4,2400\n");
        match import_workbook(injected.as_bytes()) {
            Err(Error::Alignment { label, row, .. }) => {
                assert_eq!(label, "r1");
                assert_eq!(row, 6);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bar_index_mismatch_is_alignment_error() {
        let out = String::from_utf8(export_workbook(&corpus(2, 3)).unwrap()).unwrap();
        let mut lines: Vec<String> = out.lines().map(String::from).collect();
        lines[3] = lines[3].replacen(",2,", ",3,", 1);
        let text = lines.join("\n");
        match import_workbook(text.as_bytes()) {
            Err(Error::Alignment { label, row, .. }) => {
                assert_eq!(label, "r1");
                assert_eq!(row, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn edited_bpm_cell_is_flagged_corrected() {
        let out = String::from_utf8(export_workbook(&corpus(1, 3)).unwrap()).unwrap();
        let edited = out.replace("2,2.0,1.0,4,240", "2,2.0,1.0,4,250");
        let c = import_workbook(edited.as_bytes()).unwrap();
        let flags = c.entries()[0].series.flags();
        assert_eq!(flags, &[BarFlag::Measured, BarFlag::Corrected, BarFlag::Measured]);
        assert_eq!(c.entries()[0].series.bpm()[1], 240.0);
    }

    #[test]
    fn metadata_survives_round_trip() {
        let meter = MeterMap::new(
            3,
            vec![
                MeterSegment {
                    from_bar: 1,
                    beats_per_bar: Beats::new(3, 2).unwrap(),
                },
                MeterSegment {
                    from_bar: 2,
                    beats_per_bar: Beats::whole(2),
                },
            ],
            Some(Beats::whole(1)),
        )
        .unwrap();
        let laps = LapSequence::new(vec![0.75, 1.75, 2.9])
            .unwrap()
            .with_reported_total(Some(2.95))
            .unwrap()
            .with_anacrusis(Some(0.4))
            .unwrap();
        let meta = RecordingMeta {
            performer: "Casals, Pablo".into(),
            year: 1930,
            label: "casals \"1930\"".into(),
        };
        let c = MovementCorpus::from_laps("op5-1-i", meter, vec![(meta, laps)]).unwrap();
        let back = import_workbook(&export_workbook(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
