use super::svg::{num, SvgWriter};
use super::{
    categorical, check_spec, coolwarm, mean, normalize, polyline_points, select, title, x_axis, y_axis, ChartKind,
    ChartSpec, Frame, Palette, Scale, Side, SvgDocument, Ticks, MAX_FOCUSED_RECORDINGS, MAX_FOCUSED_SPAN,
};
use crate::error::{Error, Result};
use crate::tempo::{CorpusEntry, MovementCorpus};

/// BPM against bar index. Focused mode overlays at most five recordings over
/// at most one hundred bars; grid mode draws one small panel per recording.
pub fn render_tempograph(corpus: &MovementCorpus, spec: &ChartSpec) -> Result<SvgDocument> {
    check_spec(
        spec,
        &[ChartKind::TempographFocused, ChartKind::TempographGrid],
        "render_tempograph",
    )?;
    let entries = select(corpus, &spec.recording_labels)?;
    let (from, to) = span(corpus, spec)?;
    if spec.kind == ChartKind::TempographFocused {
        focused(corpus, &entries, from, to, spec)
    } else {
        Ok(grid(corpus, &entries, from, to, spec))
    }
}

fn span(corpus: &MovementCorpus, spec: &ChartSpec) -> Result<(usize, usize)> {
    let m = corpus.meter().bar_count();
    let (from, to) = spec.bar_span.unwrap_or((1, m));
    if from < 1 || from > to || to > m {
        return Err(Error::domain(format!(
            "invalid bar span {from}..{to} for a {m}-bar movement"
        )));
    }
    Ok((from, to))
}

fn bar_domain(from: usize, to: usize) -> (f64, f64) {
    if from == to {
        (from as f64 - 0.5, to as f64 + 0.5)
    } else {
        (from as f64, to as f64)
    }
}

fn line_colors(entries: &[&CorpusEntry], from: usize, to: usize, palette: Palette) -> Vec<String> {
    match palette {
        Palette::Categorical => (0..entries.len()).map(categorical).collect(),
        Palette::Coolwarm => {
            let means: Vec<f64> = entries.iter().map(|e| mean(&e.series.bpm()[from - 1..to])).collect();
            normalize(&means).into_iter().map(coolwarm).collect()
        }
    }
}

fn tempo_range<'a>(entries: impl IntoIterator<Item = &'a &'a CorpusEntry>, from: usize, to: usize) -> (f64, f64) {
    entries
        .into_iter()
        .flat_map(|e| e.series.bpm()[from - 1..to].iter().copied())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn focused(
    corpus: &MovementCorpus,
    entries: &[&CorpusEntry],
    from: usize,
    to: usize,
    spec: &ChartSpec,
) -> Result<SvgDocument> {
    if entries.len() > MAX_FOCUSED_RECORDINGS {
        return Err(Error::domain(format!(
            "a focused tempograph shows at most {MAX_FOCUSED_RECORDINGS} recordings, got {}",
            entries.len()
        )));
    }
    let len = to - from + 1;
    if len > MAX_FOCUSED_SPAN {
        return Err(Error::domain(format!(
            "a focused tempograph spans at most {MAX_FOCUSED_SPAN} bars, got {len} (bars {from} to {to})"
        )));
    }
    if let Some(bar) = spec.annotations.iter().find(|&&b| b < from || b > to) {
        return Err(Error::domain(format!(
            "annotation at bar {bar} lies outside bars {from} to {to}"
        )));
    }

    let frame = Frame::inset(spec, 72.0, 40.0, 170.0, 56.0);
    let (lo, hi) = tempo_range(entries, from, to);
    let yt = Ticks::nice(lo, hi);
    let ys = Scale::new(yt.domain(), (frame.bottom, frame.top));
    let xd = bar_domain(from, to);
    let xt = Ticks::within(xd.0, xd.1);
    let xs = Scale::new(xd, (frame.left, frame.right));
    let colors = line_colors(entries, from, to, spec.palette);

    let mut w = SvgWriter::new(spec.width, spec.height);
    title(
        &mut w,
        spec,
        &format!("{}: tempo, bars {from} to {to}", corpus.movement_id()),
    );
    y_axis(&mut w, &frame, &ys, &yt, Side::Left, "tempo (BPM)", true);
    x_axis(&mut w, &frame, &xs, &xt, "bar");

    if !spec.annotations.is_empty() {
        w.open(
            "g",
            &[
                ("font-size", "10".into()),
                ("stroke", "#808080".into()),
                ("stroke-width", "1".into()),
                ("stroke-dasharray", "4 3".into()),
            ],
        );
        for &bar in &spec.annotations {
            let x = xs.map(bar as f64);
            w.leaf(
                "line",
                &[
                    ("x1", num(x)),
                    ("y1", num(frame.top)),
                    ("x2", num(x)),
                    ("y2", num(frame.bottom)),
                ],
            );
            w.text(
                &[
                    ("x", num(x + 3.0)),
                    ("y", num(frame.top + 10.0)),
                    ("fill", "#505050".into()),
                    ("stroke", "none".into()),
                ],
                &format!("m. {bar}"),
            );
        }
        w.close("g");
    }

    for (e, color) in entries.iter().zip(&colors) {
        let bpm = &e.series.bpm()[from - 1..to];
        let pts = polyline_points(
            bpm.iter()
                .enumerate()
                .map(|(i, &v)| (xs.map((from + i) as f64), ys.map(v))),
        );
        w.leaf(
            "polyline",
            &[
                ("points", pts),
                ("fill", "none".into()),
                ("stroke", color.clone()),
                ("stroke-width", "1.5".into()),
                ("data-label", e.meta.label.clone()),
            ],
        );
    }

    let lx = frame.right + 16.0;
    w.open("g", &[("font-size", "11".into())]);
    for (i, (e, color)) in entries.iter().zip(&colors).enumerate() {
        let y = frame.top + 8.0 + 18.0 * i as f64;
        w.leaf(
            "line",
            &[
                ("x1", num(lx)),
                ("y1", num(y)),
                ("x2", num(lx + 20.0)),
                ("y2", num(y)),
                ("stroke", color.clone()),
                ("stroke-width", "2".into()),
            ],
        );
        w.text(&[("x", num(lx + 26.0)), ("y", num(y + 4.0))], &e.meta.label);
    }
    w.close("g");
    Ok(w.finish())
}

fn grid(corpus: &MovementCorpus, entries: &[&CorpusEntry], from: usize, to: usize, spec: &ChartSpec) -> SvgDocument {
    let n = entries.len();
    let cols = (n as f64).sqrt().ceil() as usize;
    let rows = n.div_ceil(cols);
    let pad = 12.0;
    let top = 36.0;
    let cell_w = (spec.width as f64 - 2.0 * pad) / cols as f64;
    let cell_h = (spec.height as f64 - top - pad) / rows as f64;
    let shared = Ticks::nice_pair(tempo_range(entries, from, to));
    let xd = bar_domain(from, to);
    let colors = line_colors(entries, from, to, spec.palette);

    let mut w = SvgWriter::new(spec.width, spec.height);
    title(
        &mut w,
        spec,
        &format!("{}: tempo by recording, bars {from} to {to}", corpus.movement_id()),
    );
    for (i, (e, color)) in entries.iter().zip(&colors).enumerate() {
        let (r, c) = (i / cols, i % cols);
        let x0 = pad + c as f64 * cell_w;
        let y0 = top + r as f64 * cell_h;
        let frame = Frame {
            left: x0 + 40.0,
            top: y0 + 18.0,
            right: x0 + cell_w - 8.0,
            bottom: y0 + cell_h - 18.0,
        };
        let yt = if spec.shared_y {
            shared
        } else {
            Ticks::nice_pair(tempo_range(std::iter::once(e), from, to))
        };
        let ys = Scale::new(yt.domain(), (frame.bottom, frame.top));
        let xs = Scale::new(xd, (frame.left, frame.right));
        w.open("g", &[("data-label", e.meta.label.clone())]);
        w.leaf(
            "rect",
            &[
                ("x", num(frame.left)),
                ("y", num(frame.top)),
                ("width", num(frame.width())),
                ("height", num(frame.height())),
                ("fill", "none".into()),
                ("stroke", "#000000".into()),
                ("stroke-width", "0.5".into()),
            ],
        );
        w.text(
            &[
                ("x", num(frame.left)),
                ("y", num(frame.top - 5.0)),
                ("font-size", "11".into()),
            ],
            &e.meta.label,
        );
        w.open("g", &[("font-size", "9".into())]);
        for (v, anchor_y) in [(yt.lo, 0.0), (yt.hi, 7.0)] {
            w.text(
                &[
                    ("x", num(frame.left - 3.0)),
                    ("y", num(ys.map(v) + anchor_y)),
                    ("text-anchor", "end".into()),
                ],
                &yt.label(v),
            );
        }
        for (bar, anchor) in [(from, "start"), (to, "end")] {
            w.text(
                &[
                    ("x", num(if anchor == "start" { frame.left } else { frame.right })),
                    ("y", num(frame.bottom + 11.0)),
                    ("text-anchor", anchor.into()),
                ],
                &bar.to_string(),
            );
        }
        w.close("g");
        let bpm = &e.series.bpm()[from - 1..to];
        w.leaf(
            "polyline",
            &[
                (
                    "points",
                    polyline_points(
                        bpm.iter()
                            .enumerate()
                            .map(|(k, &v)| (xs.map((from + k) as f64), ys.map(v))),
                    ),
                ),
                ("fill", "none".into()),
                ("stroke", color.clone()),
                ("stroke-width", "1".into()),
            ],
        );
        w.close("g");
    }
    w.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::test_corpus as corpus;

    fn points(svg: &str, label: &str) -> Vec<(f64, f64)> {
        let doc = roxmltree::Document::parse(svg).unwrap();
        let node = doc
            .descendants()
            .find(|n| n.has_tag_name("polyline") && n.attribute("data-label") == Some(label))
            .unwrap();
        node.attribute("points")
            .unwrap()
            .split(' ')
            .map(|p| {
                let (x, y) = p.split_once(',').unwrap();
                (x.parse().unwrap(), y.parse().unwrap())
            })
            .collect()
    }

    #[test]
    fn constant_tempo_is_horizontal() {
        let c = corpus(&[vec![160.0; 12]]);
        let svg = render_tempograph(&c, &ChartSpec::new(ChartKind::TempographFocused)).unwrap();
        let pts = points(svg.as_str(), "r0");
        assert_eq!(pts.len(), 12);
        assert!(pts.iter().all(|p| p.1 == pts[0].1));
    }

    #[test]
    fn faster_bars_are_drawn_higher() {
        let c = corpus(&[vec![100.0, 150.0, 120.0, 180.0]]);
        let svg = render_tempograph(&c, &ChartSpec::new(ChartKind::TempographFocused)).unwrap();
        let pts = points(svg.as_str(), "r0");
        assert!(pts[1].1 < pts[2].1 && pts[2].1 < pts[0].1 && pts[3].1 < pts[1].1);
    }

    #[test]
    fn focused_limits() {
        let six = corpus(&vec![vec![160.0; 10]; 6]);
        let err = render_tempograph(&six, &ChartSpec::new(ChartKind::TempographFocused)).unwrap_err();
        assert!(err.to_string().contains("at most 5 recordings"));
        let mut spec = ChartSpec::new(ChartKind::TempographFocused);
        spec.recording_labels = vec!["r0".into(), "r5".into()];
        assert!(render_tempograph(&six, &spec).is_ok());
        assert!(render_tempograph(&six, &ChartSpec::new(ChartKind::TempographGrid)).is_ok());

        let long = corpus(&[vec![160.0; 101]]);
        let err = render_tempograph(&long, &ChartSpec::new(ChartKind::TempographFocused)).unwrap_err();
        assert!(err.to_string().contains("at most 100 bars"));
        let mut spec = ChartSpec::new(ChartKind::TempographFocused);
        spec.bar_span = Some((2, 101));
        assert!(render_tempograph(&long, &spec).is_ok());
        spec.bar_span = Some((0, 10));
        assert!(render_tempograph(&long, &spec).is_err());
        spec.bar_span = Some((1, 10));
        spec.annotations = vec![11];
        assert!(render_tempograph(&long, &spec).is_err());
    }

    #[test]
    fn unknown_label_and_wrong_kind() {
        let c = corpus(&[vec![160.0; 10]]);
        let mut spec = ChartSpec::new(ChartKind::TempographGrid);
        spec.recording_labels = vec!["nope".into()];
        assert!(render_tempograph(&c, &spec).is_err());
        assert!(render_tempograph(&c, &ChartSpec::new(ChartKind::Ridgeline)).is_err());
    }

    #[test]
    fn grid_has_one_panel_per_recording() {
        let c = corpus(&vec![vec![160.0; 10]; 7]);
        let svg = render_tempograph(&c, &ChartSpec::new(ChartKind::TempographGrid)).unwrap();
        let doc = roxmltree::Document::parse(svg.as_str()).unwrap();
        assert_eq!(doc.descendants().filter(|n| n.has_tag_name("polyline")).count(), 7);
        for i in 0..7 {
            assert!(doc.descendants().any(|n| n.text() == Some(&format!("r{i}"))));
        }
    }
}
