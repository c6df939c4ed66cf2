use super::svg::{num, SvgWriter};
use super::{
    check_spec, mean, polyline_points, title, x_axis, y_axis, ChartKind, ChartSpec, Frame, Scale, Side, SvgDocument,
    Ticks,
};
use crate::distributions::{build_histogram, empirical_cdf, spline_pdf, DEFAULT_BIN_ORIGIN, DEFAULT_BIN_WIDTH};
use crate::error::{Error, Result};
use crate::tempo::TempoSeries;

const CURVE_SAMPLES: usize = 401;

/// Relative-frequency histogram with the spline density drawn in red on
/// top, scaled by the bin width so both enclose the same area.
///
/// With a single occupied bin there is no curve to fit and a spike marker
/// is drawn at the mean instead.
pub fn render_histogram_pdf(series: &TempoSeries, spec: &ChartSpec) -> Result<SvgDocument> {
    check_spec(spec, &[ChartKind::HistogramPdf], "render_histogram_pdf")?;
    let bpm = series.bpm();
    if bpm.is_empty() {
        return Err(Error::domain("histogram of an empty tempo series"));
    }
    let width = spec.bin_width.unwrap_or(DEFAULT_BIN_WIDTH);
    let hist = build_histogram(bpm, width, DEFAULT_BIN_ORIGIN)?;
    let edges = hist.bin_edges();
    let (x0, x1) = (edges[0], edges[edges.len() - 1]);

    let curve: Option<Vec<(f64, f64)>> = if hist.bin_count() >= 2 {
        let pdf = spline_pdf(&empirical_cdf(&hist)?)?;
        Some(
            (0..CURVE_SAMPLES)
                .map(|j| {
                    let x = x0 + (x1 - x0) * j as f64 / (CURVE_SAMPLES - 1) as f64;
                    (x, pdf.density(x) * width)
                })
                .collect(),
        )
    } else {
        None
    };

    let peak = curve
        .iter()
        .flatten()
        .map(|p| p.1)
        .chain(hist.relative().iter().copied())
        .fold(0.0, f64::max);
    let yt = Ticks::nice(0.0, peak);
    let frame = Frame::inset(spec, 72.0, 40.0, 24.0, 56.0);
    let ys = Scale::new(yt.domain(), (frame.bottom, frame.top));
    let xt = Ticks::within(x0, x1);
    let xs = Scale::new((x0, x1), (frame.left, frame.right));
    let label = spec.recording_labels.first().map(String::as_str).unwrap_or("tempo");

    let mut w = SvgWriter::new(spec.width, spec.height);
    title(
        &mut w,
        spec,
        &format!("{label}: tempo distribution, {} BPM bins", width),
    );
    y_axis(&mut w, &frame, &ys, &yt, Side::Left, "relative frequency", true);
    x_axis(&mut w, &frame, &xs, &xt, "tempo (BPM)");

    w.open(
        "g",
        &[
            ("fill", "#9ecae1".into()),
            ("stroke", "#3182bd".into()),
            ("stroke-width", "0.5".into()),
            ("data-label", label.to_owned()),
        ],
    );
    for (k, (&rel, &count)) in hist.relative().iter().zip(hist.counts()).enumerate() {
        if count == 0 {
            continue;
        }
        let left = xs.map(edges[k]);
        let top = ys.map(rel);
        w.leaf(
            "rect",
            &[
                ("x", num(left)),
                ("y", num(top)),
                ("width", num(xs.map(edges[k + 1]) - left)),
                ("height", num(ys.map(0.0) - top)),
                ("data-count", count.to_string()),
            ],
        );
    }
    w.close("g");

    match &curve {
        Some(points) => w.leaf(
            "polyline",
            &[
                (
                    "points",
                    polyline_points(points.iter().map(|&(x, y)| (xs.map(x), ys.map(y)))),
                ),
                ("fill", "none".into()),
                ("stroke", "red".into()),
                ("stroke-width", "2".into()),
            ],
        ),
        None => {
            let x = xs.map(mean(bpm));
            w.leaf(
                "line",
                &[
                    ("x1", num(x)),
                    ("y1", num(ys.map(0.0))),
                    ("x2", num(x)),
                    ("y2", num(ys.map(1.0))),
                    ("stroke", "red".into()),
                    ("stroke-width", "2".into()),
                    ("data-spike", "true".into()),
                ],
            );
            w.leaf(
                "circle",
                &[
                    ("cx", num(x)),
                    ("cy", num(ys.map(1.0))),
                    ("r", "3".into()),
                    ("fill", "red".into()),
                ],
            );
        }
    }

    let lx = frame.right - 150.0;
    w.open("g", &[("font-size", "11".into())]);
    w.leaf(
        "rect",
        &[
            ("x", num(lx)),
            ("y", num(frame.top + 4.0)),
            ("width", "14".into()),
            ("height", "10".into()),
            ("fill", "#9ecae1".into()),
            ("stroke", "#3182bd".into()),
        ],
    );
    w.text(&[("x", num(lx + 20.0)), ("y", num(frame.top + 13.0))], label);
    w.leaf(
        "line",
        &[
            ("x1", num(lx)),
            ("y1", num(frame.top + 27.0)),
            ("x2", num(lx + 14.0)),
            ("y2", num(frame.top + 27.0)),
            ("stroke", "red".into()),
            ("stroke-width", "2".into()),
        ],
    );
    w.text(
        &[("x", num(lx + 20.0)), ("y", num(frame.top + 31.0))],
        if curve.is_some() { "spline PDF" } else { "single value" },
    );
    w.close("g");
    Ok(w.finish())
}
