#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn laptempo(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = laptempo_cli::run(
        std::iter::once("laptempo").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

pub fn demo_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("demo")
}

/// Cumulative seconds for a constant tempo in 4/4.
pub fn steady_stamps(bars: usize, bpm: f64) -> Vec<f64> {
    (1..=bars).map(|i| i as f64 * 240.0 / bpm).collect()
}

pub fn write_laps(path: &Path, stamps: &[f64]) {
    let mut text = String::from("bar,time\n");
    for (i, t) in stamps.iter().enumerate() {
        text.push_str(&format!("{},{t:?}\n", i + 1));
    }
    fs::write(path, text).unwrap();
}

/// A 4/4 project in `dir` with one lap file per entry of `recordings`.
/// Returns the config path.
pub fn write_project(dir: &Path, bars: usize, recordings: &[(&str, Vec<f64>)]) -> PathBuf {
    fs::write(
        dir.join("meter.json"),
        format!(r#"{{"movement": "mv", "bars": {bars}, "segments": [{{"from_bar": 1, "beats": 4}}]}}"#),
    )
    .unwrap();
    let half = bars / 2;
    fs::write(
        dir.join("sections.json"),
        format!(
            r#"{{"sections": [{{"name": "A", "from_bar": 1, "to_bar": {half}}}, {{"name": "B", "from_bar": {}, "to_bar": {bars}}}]}}"#,
            half + 1
        ),
    )
    .unwrap();
    let mut recs = Vec::new();
    for (i, (label, stamps)) in recordings.iter().enumerate() {
        write_laps(&dir.join(format!("{label}.csv")), stamps);
        recs.push(format!(
            r#"{{"label": "{label}", "path": "{label}.csv", "performer": "Player {i}", "year": {}}}"#,
            1960 + i
        ));
    }
    let config = dir.join("project.json");
    fs::write(
        &config,
        format!(
            r#"{{"movement_id": "mv", "meter_map": "meter.json", "sections": "sections.json", "recordings": [{}]}}"#,
            recs.join(", ")
        ),
    )
    .unwrap();
    config
}

pub const CHARTS: [&str; 6] = [
    "tempograph_focused",
    "tempograph_grid",
    "histogram_pdf",
    "ridgeline",
    "stacked_sections",
    "combination",
];

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Writes every demo chart into `out`.
pub fn render_demo(out: &Path) {
    let cfg = demo_dir().join("project.json");
    for kind in ["all", "tempograph_grid"] {
        let o = laptempo(&[
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "plot",
            "--kind",
            kind,
        ]);
        assert_eq!(o.code, 0, "{}", o.stderr);
    }
}
