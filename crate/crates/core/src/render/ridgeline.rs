use super::svg::{num, SvgWriter};
use super::{
    categorical, check_spec, coolwarm, mean, normalize, select, title, x_axis, ChartKind, ChartSpec, Frame, Palette,
    Scale, SvgDocument, Ticks,
};
use crate::distributions::{kde, Bandwidth, KernelDensity};
use crate::error::{Error, Result};
use crate::tempo::MovementCorpus;

const RIDGE_SAMPLES: usize = 241;
/// Ridge peak height in row spacings.
const OVERLAP: f64 = 1.5;
/// Bandwidth used when Silverman's rule degenerates (constant tempo).
const FALLBACK_BANDWIDTH: f64 = 1.0;
const SUPPORT_PAD: f64 = 3.0;

/// One kernel density ridge per recording, stacked top to bottom in corpus
/// order over a shared tempo axis. Fill colour follows each recording's
/// mean tempo: cool for the slowest, warm for the fastest.
pub fn render_ridgeline(corpus: &MovementCorpus, spec: &ChartSpec) -> Result<SvgDocument> {
    check_spec(spec, &[ChartKind::Ridgeline], "render_ridgeline")?;
    let entries = select(corpus, &spec.recording_labels)?;
    if entries.len() < 2 {
        return Err(Error::domain(format!(
            "a ridgeline needs at least 2 recordings, got {}",
            entries.len()
        )));
    }
    let densities: Vec<KernelDensity> = entries
        .iter()
        .map(|e| match spec.bandwidth {
            Some(h) => kde(e.series.bpm(), Bandwidth::Fixed(h)),
            None => kde(e.series.bpm(), Bandwidth::Auto)
                .or_else(|_| kde(e.series.bpm(), Bandwidth::Fixed(FALLBACK_BANDWIDTH))),
        })
        .collect::<Result<_>>()?;
    let (lo, hi) = densities
        .iter()
        .map(|d| d.support(SUPPORT_PAD))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (c, d)| {
            (a.min(c), b.max(d))
        });
    let xt = Ticks::nice(lo, hi);
    let (x0, x1) = xt.domain();
    let curves: Vec<Vec<(f64, f64)>> = densities
        .iter()
        .map(|d| {
            (0..RIDGE_SAMPLES)
                .map(|j| {
                    let x = x0 + (x1 - x0) * j as f64 / (RIDGE_SAMPLES - 1) as f64;
                    (x, d.evaluate(x))
                })
                .collect()
        })
        .collect();
    let peak = curves.iter().flatten().map(|p| p.1).fold(0.0, f64::max);

    let means: Vec<f64> = entries.iter().map(|e| mean(e.series.bpm())).collect();
    let color_t = normalize(&means);

    let frame = Frame::inset(spec, 190.0, 40.0, 24.0, 56.0);
    let xs = Scale::new((x0, x1), (frame.left, frame.right));
    let n = entries.len() as f64;
    let step = frame.height() / (n - 1.0 + OVERLAP);
    let amplitude = OVERLAP * step;

    let mut w = SvgWriter::new(spec.width, spec.height);
    title(&mut w, spec, &format!("{}: tempo distributions", corpus.movement_id()));
    for (i, e) in entries.iter().enumerate() {
        let base = frame.top + (i as f64 + OVERLAP) * step;
        let fill = match spec.palette {
            Palette::Coolwarm => coolwarm(color_t[i]),
            Palette::Categorical => categorical(i),
        };
        let mut d = format!("M{},{}", num(xs.map(x0)), num(base));
        for &(x, y) in &curves[i] {
            d.push_str(&format!(" L{},{}", num(xs.map(x)), num(base - amplitude * y / peak)));
        }
        d.push_str(&format!(" L{},{} Z", num(xs.map(x1)), num(base)));
        w.leaf(
            "path",
            &[
                ("d", d),
                ("fill", fill),
                ("fill-opacity", "0.85".into()),
                ("stroke", "#303030".into()),
                ("stroke-width", "0.8".into()),
                ("data-label", e.meta.label.clone()),
                ("data-mean-bpm", num(means[i])),
                ("data-color-t", num(color_t[i])),
            ],
        );
        w.text_with_note(
            &[
                ("x", num(frame.left - 8.0)),
                ("y", num(base - 3.0)),
                ("text-anchor", "end".into()),
                ("font-size", "11".into()),
            ],
            &format!("{} ({})", e.meta.performer, e.meta.year),
            &format!(" {}", e.meta.label),
            "#707070",
        );
    }
    x_axis(&mut w, &frame, &xs, &xt, "tempo (BPM)");
    Ok(w.finish())
}
