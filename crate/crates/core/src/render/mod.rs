//! Deterministic SVG charts for tempo corpora.
//!
//! Every renderer is a pure function of its inputs. Documents are SVG 1.1,
//! UTF-8 with LF line endings, declare explicit `width` and `height`, name
//! only the generic `sans-serif` font family and print every coordinate
//! with three decimals.
//!
//! Attributes are emitted in the order each renderer lists them, which is
//! always: geometry (`x`, `y`, `width`, `height`, `x1`..`y2`, `cx`, `cy`,
//! `r`, `points`, `d`), then text placement (`text-anchor`, `transform`,
//! `font-size`), then paint (`fill`, `fill-opacity`, `stroke`,
//! `stroke-width`, `stroke-dasharray`), then `data-*` attributes.
//!
//! SVG y grows downward, so a higher tempo is always drawn higher up.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::SectionMap;
use crate::error::{Error, Result};
use crate::tempo::{CorpusEntry, MovementCorpus};

mod combination;
mod coolwarm;
mod histogram;
mod ridgeline;
mod sections;
mod svg;
mod tempograph;

pub use combination::render_combination;
pub use histogram::render_histogram_pdf;
pub use ridgeline::render_ridgeline;
pub use sections::render_stacked_sections;
pub use tempograph::render_tempograph;

use svg::{num, SvgWriter};

pub const MAX_FOCUSED_RECORDINGS: usize = 5;
pub const MAX_FOCUSED_SPAN: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    TempographFocused,
    TempographGrid,
    HistogramPdf,
    Ridgeline,
    StackedSections,
    Combination,
}

impl ChartKind {
    pub const ALL: [ChartKind; 6] = [
        ChartKind::TempographFocused,
        ChartKind::TempographGrid,
        ChartKind::HistogramPdf,
        ChartKind::Ridgeline,
        ChartKind::StackedSections,
        ChartKind::Combination,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChartKind::TempographFocused => "tempograph_focused",
            ChartKind::TempographGrid => "tempograph_grid",
            ChartKind::HistogramPdf => "histogram_pdf",
            ChartKind::Ridgeline => "ridgeline",
            ChartKind::StackedSections => "stacked_sections",
            ChartKind::Combination => "combination",
        }
    }
}

impl fmt::Display for ChartKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChartKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChartKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown chart kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Palette {
    Coolwarm,
    Categorical,
}

impl FromStr for Palette {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coolwarm" => Ok(Palette::Coolwarm),
            "categorical" => Ok(Palette::Categorical),
            _ => Err(Error::domain(format!("unknown palette {s:?}"))),
        }
    }
}

/// A labelled horizontal rule, e.g. a historical metronome marking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceLine {
    pub label: String,
    pub bpm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub kind: ChartKind,
    /// Recordings to draw, in drawing order. Empty means the whole corpus.
    pub recording_labels: Vec<String>,
    /// Inclusive bar range; defaults to the whole movement.
    pub bar_span: Option<(usize, usize)>,
    /// Histogram bin width in BPM; defaults to 2.
    pub bin_width: Option<f64>,
    pub reference_lines: Vec<ReferenceLine>,
    /// Bars marked with a vertical rule on focused tempographs.
    pub annotations: Vec<usize>,
    pub palette: Palette,
    pub width: u32,
    pub height: u32,
    /// Grid panels share one tempo axis.
    pub shared_y: bool,
    /// Fixed KDE bandwidth for ridgelines; Silverman's rule otherwise.
    pub bandwidth: Option<f64>,
}

impl ChartSpec {
    pub fn new(kind: ChartKind) -> Self {
        ChartSpec {
            kind,
            recording_labels: Vec::new(),
            bar_span: None,
            bin_width: None,
            reference_lines: Vec::new(),
            annotations: Vec::new(),
            palette: if kind == ChartKind::Ridgeline {
                Palette::Coolwarm
            } else {
                Palette::Categorical
            },
            width: 800,
            height: 480,
            shared_y: true,
            bandwidth: None,
        }
    }
}

/// A finished SVG document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvgDocument(String);

impl SvgDocument {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0.into_bytes()
    }
}

/// Renders any chart kind from a corpus. The histogram uses the first
/// selected recording; stacked sections need `sections`.
pub fn render(corpus: &MovementCorpus, sections: Option<&SectionMap>, spec: &ChartSpec) -> Result<SvgDocument> {
    match spec.kind {
        ChartKind::TempographFocused | ChartKind::TempographGrid => render_tempograph(corpus, spec),
        ChartKind::HistogramPdf => {
            let entry = select(corpus, &spec.recording_labels)?[0];
            let mut spec = spec.clone();
            spec.recording_labels = vec![entry.meta.label.clone()];
            render_histogram_pdf(&entry.series, &spec)
        }
        ChartKind::Ridgeline => render_ridgeline(corpus, spec),
        ChartKind::StackedSections => {
            let sections = sections.ok_or_else(|| Error::domain("stacked sections chart needs a section map"))?;
            render_stacked_sections(corpus, sections, spec)
        }
        ChartKind::Combination => render_combination(corpus, spec),
    }
}

fn select<'a>(corpus: &'a MovementCorpus, labels: &[String]) -> Result<Vec<&'a CorpusEntry>> {
    if corpus.is_empty() {
        return Err(Error::domain("corpus has no recordings"));
    }
    if labels.is_empty() {
        return Ok(corpus.entries().iter().collect());
    }
    let mut out: Vec<&CorpusEntry> = Vec::with_capacity(labels.len());
    for label in labels {
        let entry = corpus
            .entry(label)
            .ok_or_else(|| Error::domain(format!("unknown recording label {label:?}")))?;
        if out.iter().any(|e| e.meta.label == *label) {
            return Err(Error::domain(format!("recording {label:?} selected twice")));
        }
        out.push(entry);
    }
    Ok(out)
}

fn check_spec(spec: &ChartSpec, expected: &[ChartKind], op: &str) -> Result<()> {
    if !expected.contains(&spec.kind) {
        return Err(Error::domain(format!("{op} cannot draw a {} chart", spec.kind)));
    }
    if !(200..=20_000).contains(&spec.width) || !(150..=20_000).contains(&spec.height) {
        return Err(Error::domain(format!(
            "chart size {}x{} outside 200x150 to 20000x20000",
            spec.width, spec.height
        )));
    }
    Ok(())
}

/// Plot area in pixels.
#[derive(Debug, Clone, Copy)]
struct Frame {
    left: f64,
    top: f64,
    right: f64,
    bottom: f64,
}

impl Frame {
    fn inset(spec: &ChartSpec, left: f64, top: f64, right: f64, bottom: f64) -> Self {
        Frame {
            left,
            top,
            right: spec.width as f64 - right,
            bottom: spec.height as f64 - bottom,
        }
    }

    fn width(&self) -> f64 {
        self.right - self.left
    }

    fn height(&self) -> f64 {
        self.bottom - self.top
    }
}

/// Affine map from a data interval onto a pixel interval.
#[derive(Debug, Clone, Copy)]
struct Scale {
    d0: f64,
    d1: f64,
    r0: f64,
    r1: f64,
}

impl Scale {
    fn new((d0, d1): (f64, f64), (r0, r1): (f64, f64)) -> Self {
        debug_assert!(d1 > d0);
        Scale { d0, d1, r0, r1 }
    }

    fn map(&self, v: f64) -> f64 {
        self.r0 + (v - self.d0) * (self.r1 - self.r0) / (self.d1 - self.d0)
    }
}

/// Axis domain `[lo, hi]` with ticks every `step` starting at `first`.
#[derive(Debug, Clone, Copy)]
struct Ticks {
    lo: f64,
    hi: f64,
    first: f64,
    step: f64,
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let n = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    n * mag
}

impl Ticks {
    /// Domain widened outward to whole ticks.
    fn nice(min: f64, max: f64) -> Self {
        let (min, max) = if max - min < 1e-9 {
            (min - 1.0, max + 1.0)
        } else {
            (min, max)
        };
        let step = nice_step((max - min) / 5.0);
        let lo = (min / step).floor() * step;
        let hi = (max / step).ceil() * step;
        Ticks {
            lo,
            hi,
            first: lo,
            step,
        }
    }

    fn nice_pair((min, max): (f64, f64)) -> Self {
        Ticks::nice(min, max)
    }

    /// Fixed domain with ticks placed inside it.
    fn within(lo: f64, hi: f64) -> Self {
        let step = nice_step((hi - lo) / 5.0);
        Ticks {
            lo,
            hi,
            first: (lo / step - 1e-9).ceil() * step,
            step,
        }
    }

    fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut k = 0;
        loop {
            let v = self.first + k as f64 * self.step;
            if v > self.hi + self.step * 1e-9 {
                break;
            }
            out.push(v);
            k += 1;
        }
        out
    }

    fn label(&self, v: f64) -> String {
        let decimals = (0..6)
            .find(|&d| {
                let scaled = self.step * 10f64.powi(d as i32);
                (scaled - scaled.round()).abs() < 1e-6
            })
            .unwrap_or(6);
        let s = format!("{v:.decimals$}");
        if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
            s[1..].to_owned()
        } else {
            s
        }
    }
}

const CATEGORICAL: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

fn categorical(i: usize) -> String {
    CATEGORICAL[i % CATEGORICAL.len()].to_owned()
}

/// Coolwarm colour at `t` in `[0, 1]`, interpolated between table entries.
fn coolwarm(t: f64) -> String {
    let pos = t.clamp(0.0, 1.0) * 255.0;
    let i = (pos.floor() as usize).min(254);
    let frac = pos - i as f64;
    let (a, b) = (coolwarm::COOLWARM[i], coolwarm::COOLWARM[i + 1]);
    let ch = |k: usize| (a[k] as f64 + (b[k] as f64 - a[k] as f64) * frac).round() as u8;
    format!("#{:02x}{:02x}{:02x}", ch(0), ch(1), ch(2))
}

/// Positions of `values` within their own range; all 0.5 when they coincide.
fn normalize(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .map(|&v| if hi > lo { (v - lo) / (hi - lo) } else { 0.5 })
        .collect()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn title(w: &mut SvgWriter, spec: &ChartSpec, text: &str) {
    w.text(
        &[
            ("x", num(spec.width as f64 / 2.0)),
            ("y", num(22.0)),
            ("text-anchor", "middle".into()),
            ("font-size", "15".into()),
        ],
        text,
    );
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Left,
    Right,
}

fn y_axis(w: &mut SvgWriter, frame: &Frame, scale: &Scale, ticks: &Ticks, side: Side, caption: &str, grid: bool) {
    let x = if side == Side::Left { frame.left } else { frame.right };
    let dir = if side == Side::Left { -1.0 } else { 1.0 };
    let anchor = if side == Side::Left { "end" } else { "start" };
    w.open("g", &[("stroke", "#000000".into()), ("stroke-width", "1".into())]);
    w.leaf(
        "line",
        &[
            ("x1", num(x)),
            ("y1", num(frame.top)),
            ("x2", num(x)),
            ("y2", num(frame.bottom)),
        ],
    );
    for v in ticks.values() {
        let y = scale.map(v);
        w.leaf(
            "line",
            &[
                ("x1", num(x)),
                ("y1", num(y)),
                ("x2", num(x + 5.0 * dir)),
                ("y2", num(y)),
            ],
        );
    }
    w.close("g");
    if grid {
        w.open("g", &[("stroke", "#e6e6e6".into()), ("stroke-width", "1".into())]);
        for v in ticks.values() {
            let y = scale.map(v);
            w.leaf(
                "line",
                &[
                    ("x1", num(frame.left)),
                    ("y1", num(y)),
                    ("x2", num(frame.right)),
                    ("y2", num(y)),
                ],
            );
        }
        w.close("g");
    }
    w.open("g", &[("text-anchor", anchor.into()), ("font-size", "11".into())]);
    for v in ticks.values() {
        w.text(
            &[("x", num(x + 8.0 * dir)), ("y", num(scale.map(v) + 4.0))],
            &ticks.label(v),
        );
    }
    w.close("g");
    let cx = x + 46.0 * dir;
    let cy = (frame.top + frame.bottom) / 2.0;
    w.text(
        &[
            ("x", num(cx)),
            ("y", num(cy)),
            ("text-anchor", "middle".into()),
            ("transform", format!("rotate(-90 {} {})", num(cx), num(cy))),
        ],
        caption,
    );
}

fn x_axis(w: &mut SvgWriter, frame: &Frame, scale: &Scale, ticks: &Ticks, caption: &str) {
    w.open("g", &[("stroke", "#000000".into()), ("stroke-width", "1".into())]);
    w.leaf(
        "line",
        &[
            ("x1", num(frame.left)),
            ("y1", num(frame.bottom)),
            ("x2", num(frame.right)),
            ("y2", num(frame.bottom)),
        ],
    );
    for v in ticks.values() {
        let x = scale.map(v);
        w.leaf(
            "line",
            &[
                ("x1", num(x)),
                ("y1", num(frame.bottom)),
                ("x2", num(x)),
                ("y2", num(frame.bottom + 5.0)),
            ],
        );
    }
    w.close("g");
    w.open("g", &[("text-anchor", "middle".into()), ("font-size", "11".into())]);
    for v in ticks.values() {
        w.text(
            &[("x", num(scale.map(v))), ("y", num(frame.bottom + 18.0))],
            &ticks.label(v),
        );
    }
    w.close("g");
    w.text(
        &[
            ("x", num((frame.left + frame.right) / 2.0)),
            ("y", num(frame.bottom + 38.0)),
            ("text-anchor", "middle".into()),
        ],
        caption,
    );
}

fn polyline_points(points: impl Iterator<Item = (f64, f64)>) -> String {
    points
        .map(|(x, y)| format!("{},{}", num(x), num(y)))
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
pub(crate) fn test_corpus(curves: &[Vec<f64>]) -> MovementCorpus {
    use crate::tempo::{Beats, MeterMap, RecordingMeta};
    let meter = MeterMap::uniform(curves[0].len(), Beats::whole(4)).unwrap();
    let recordings = curves
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let meta = RecordingMeta {
                performer: format!("P{i}"),
                year: 1950 + i as i32,
                label: format!("r{i}"),
            };
            (meta, crate::jitter::synth_laps(c, &meter).unwrap())
        })
        .collect();
    MovementCorpus::from_laps("m", meter, recordings).unwrap()
}
