use super::svg::{num, round3, SvgWriter};
use super::{
    categorical, check_spec, coolwarm, select, title, y_axis, ChartKind, ChartSpec, Frame, Palette, Scale, Side,
    SvgDocument, Ticks,
};
use crate::analysis::{section_proportions, SectionMap};
use crate::error::{Error, Result};
use crate::tempo::MovementCorpus;

/// One full-height bar per recording split into formal sections by their
/// share of the total duration.
///
/// Segment edges are rounded before heights are taken, so the printed
/// heights of a bar add up to its full height.
pub fn render_stacked_sections(
    corpus: &MovementCorpus,
    sections: &SectionMap,
    spec: &ChartSpec,
) -> Result<SvgDocument> {
    check_spec(spec, &[ChartKind::StackedSections], "render_stacked_sections")?;
    let entries = select(corpus, &spec.recording_labels)?;
    let bars = corpus.meter().bar_count();
    if sections.bar_count() != bars {
        return Err(Error::domain(format!(
            "section map covers {} bars but the meter has {bars}",
            sections.bar_count()
        )));
    }
    let names: Vec<&str> = sections.sections().iter().map(|s| s.name.as_str()).collect();
    let colors: Vec<String> = (0..names.len())
        .map(|k| match spec.palette {
            Palette::Categorical => categorical(k),
            Palette::Coolwarm if names.len() == 1 => coolwarm(0.5),
            Palette::Coolwarm => coolwarm(k as f64 / (names.len() - 1) as f64),
        })
        .collect();

    let frame = Frame::inset(spec, 72.0, 40.0, 170.0, 56.0);
    let yt = Ticks {
        lo: 0.0,
        hi: 1.0,
        first: 0.0,
        step: 0.25,
    };
    let ys = Scale::new((0.0, 1.0), (frame.bottom, frame.top));
    let slot = frame.width() / entries.len() as f64;
    let bar_w = slot * 0.6;

    let mut w = SvgWriter::new(spec.width, spec.height);
    title(
        &mut w,
        spec,
        &format!("{}: share of duration by section", corpus.movement_id()),
    );
    y_axis(
        &mut w,
        &frame,
        &ys,
        &yt,
        Side::Left,
        "proportion of total duration",
        false,
    );

    for (i, e) in entries.iter().enumerate() {
        let props = section_proportions(&e.laps, sections)?;
        let x = frame.left + slot * i as f64 + (slot - bar_w) / 2.0;
        let mut edges = Vec::with_capacity(props.len() + 1);
        let mut cum = 0.0;
        edges.push(round3(frame.bottom));
        for (k, p) in props.iter().enumerate() {
            cum += p;
            let y = if k + 1 == props.len() { frame.top } else { ys.map(cum) };
            edges.push(round3(y));
        }
        w.open("g", &[("data-label", e.meta.label.clone())]);
        for (k, p) in props.iter().enumerate() {
            w.leaf(
                "rect",
                &[
                    ("x", num(x)),
                    ("y", num(edges[k + 1])),
                    ("width", num(bar_w)),
                    ("height", num(edges[k] - edges[k + 1])),
                    ("fill", colors[k].clone()),
                    ("stroke", "#ffffff".into()),
                    ("stroke-width", "0.5".into()),
                    ("data-section", names[k].to_owned()),
                    ("data-proportion", format!("{p:.6}")),
                ],
            );
        }
        w.text(
            &[
                ("x", num(x + bar_w / 2.0)),
                ("y", num(frame.bottom + 16.0)),
                ("text-anchor", "middle".into()),
                ("font-size", "11".into()),
            ],
            &e.meta.label,
        );
        w.close("g");
    }

    let lx = frame.right + 16.0;
    w.open("g", &[("font-size", "11".into())]);
    for (k, name) in names.iter().enumerate() {
        let y = frame.top + 18.0 * k as f64;
        w.leaf(
            "rect",
            &[
                ("x", num(lx)),
                ("y", num(y)),
                ("width", "12".into()),
                ("height", "12".into()),
                ("fill", colors[k].clone()),
            ],
        );
        w.text(&[("x", num(lx + 18.0)), ("y", num(y + 10.0))], name);
    }
    w.close("g");
    Ok(w.finish())
}
