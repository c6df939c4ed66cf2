use super::svg::{num, SvgWriter};
use super::{
    categorical, check_spec, coolwarm, normalize, polyline_points, select, title, y_axis, ChartKind, ChartSpec, Frame,
    Palette, Scale, Side, SvgDocument, Ticks,
};
use crate::analysis::{recording_summary, RecordingSummary};
use crate::error::{Error, Result};
use crate::tempo::MovementCorpus;

/// Mean tempo per recording as bars on the left axis, the standard deviation
/// of bar tempi as a line on the right axis, and labelled reference tempi as
/// horizontal rules against the left axis.
pub fn render_combination(corpus: &MovementCorpus, spec: &ChartSpec) -> Result<SvgDocument> {
    check_spec(spec, &[ChartKind::Combination], "render_combination")?;
    let entries = select(corpus, &spec.recording_labels)?;
    if let Some(r) = spec
        .reference_lines
        .iter()
        .find(|r| !(r.bpm > 0.0 && r.bpm.is_finite()))
    {
        return Err(Error::domain(format!(
            "reference line {:?} has invalid tempo {}",
            r.label, r.bpm
        )));
    }
    let stats: Vec<RecordingSummary> = entries
        .iter()
        .map(|e| recording_summary(&e.series))
        .collect::<Result<_>>()?;
    let means: Vec<f64> = stats.iter().map(|s| s.mean_bpm).collect();
    let top_bpm = means
        .iter()
        .copied()
        .chain(spec.reference_lines.iter().map(|r| r.bpm))
        .fold(0.0, f64::max);
    let top_std = stats.iter().map(|s| s.std_bpm).fold(0.0, f64::max);
    let yt = Ticks::nice(0.0, top_bpm);
    let st = if top_std > 0.0 {
        Ticks::nice(0.0, top_std)
    } else {
        Ticks {
            lo: 0.0,
            hi: 1.0,
            first: 0.0,
            step: 0.2,
        }
    };

    let frame = Frame::inset(spec, 72.0, 56.0, 72.0, 56.0);
    let ys = Scale::new(yt.domain(), (frame.bottom, frame.top));
    let ss = Scale::new(st.domain(), (frame.bottom, frame.top));
    let slot = frame.width() / entries.len() as f64;
    let bar_w = slot * 0.6;
    let center = |i: usize| frame.left + slot * (i as f64 + 0.5);
    let colors: Vec<String> = match spec.palette {
        Palette::Categorical => (0..entries.len()).map(categorical).collect(),
        Palette::Coolwarm => normalize(&means).into_iter().map(coolwarm).collect(),
    };

    let mut w = SvgWriter::new(spec.width, spec.height);
    title(
        &mut w,
        spec,
        &format!("{}: mean tempo and variability", corpus.movement_id()),
    );
    y_axis(&mut w, &frame, &ys, &yt, Side::Left, "mean tempo (BPM)", true);
    y_axis(&mut w, &frame, &ss, &st, Side::Right, "standard deviation (BPM)", false);

    for (i, e) in entries.iter().enumerate() {
        let top = ys.map(means[i]);
        w.open("g", &[("data-label", e.meta.label.clone())]);
        w.leaf(
            "rect",
            &[
                ("x", num(center(i) - bar_w / 2.0)),
                ("y", num(top)),
                ("width", num(bar_w)),
                ("height", num(frame.bottom - top)),
                ("fill", colors[i].clone()),
                ("data-mean-bpm", num(means[i])),
            ],
        );
        w.text(
            &[
                ("x", num(center(i))),
                ("y", num(frame.bottom + 16.0)),
                ("text-anchor", "middle".into()),
                ("font-size", "11".into()),
            ],
            &e.meta.label,
        );
        w.close("g");
    }

    w.leaf(
        "polyline",
        &[
            (
                "points",
                polyline_points(stats.iter().enumerate().map(|(i, s)| (center(i), ss.map(s.std_bpm)))),
            ),
            ("fill", "none".into()),
            ("stroke", "#202020".into()),
            ("stroke-width", "2".into()),
            ("data-series", "std_bpm".into()),
        ],
    );
    w.open("g", &[("fill", "#202020".into())]);
    for (i, s) in stats.iter().enumerate() {
        w.leaf(
            "circle",
            &[
                ("cx", num(center(i))),
                ("cy", num(ss.map(s.std_bpm))),
                ("r", "3".into()),
                ("data-std-bpm", num(s.std_bpm)),
            ],
        );
    }
    w.close("g");

    for r in &spec.reference_lines {
        let y = ys.map(r.bpm);
        w.open("g", &[("data-reference", r.label.clone())]);
        w.leaf(
            "line",
            &[
                ("x1", num(frame.left)),
                ("y1", num(y)),
                ("x2", num(frame.right)),
                ("y2", num(y)),
                ("stroke", "#c00000".into()),
                ("stroke-width", "1".into()),
                ("stroke-dasharray", "6 3".into()),
            ],
        );
        w.text(
            &[
                ("x", num(frame.right - 4.0)),
                ("y", num(y - 4.0)),
                ("text-anchor", "end".into()),
                ("font-size", "11".into()),
                ("fill", "#c00000".into()),
            ],
            &format!("{} ({} BPM)", r.label, r.bpm),
        );
        w.close("g");
    }

    let ly = frame.top - 20.0;
    w.open("g", &[("font-size", "11".into())]);
    w.leaf(
        "rect",
        &[
            ("x", num(frame.left)),
            ("y", num(ly - 9.0)),
            ("width", "12".into()),
            ("height", "10".into()),
            ("fill", "#808080".into()),
        ],
    );
    w.text(&[("x", num(frame.left + 18.0)), ("y", num(ly))], "mean BPM");
    w.leaf(
        "line",
        &[
            ("x1", num(frame.left + 100.0)),
            ("y1", num(ly - 4.0)),
            ("x2", num(frame.left + 120.0)),
            ("y2", num(ly - 4.0)),
            ("stroke", "#202020".into()),
            ("stroke-width", "2".into()),
        ],
    );
    w.text(&[("x", num(frame.left + 126.0)), ("y", num(ly))], "std of bar BPM");
    w.close("g");
    Ok(w.finish())
}
