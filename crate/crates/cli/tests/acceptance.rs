//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Run alone with `cargo test -p laptempo-cli --test acceptance`.

mod common;

use std::fs;
use std::time::{Duration, Instant};

use laptempo::analysis::{detect_anomalies, resolve_fermata, FermataMeasurement};
use laptempo::distributions::{build_histogram, empirical_cdf, kde, spline_pdf, Bandwidth};
use laptempo::error::Error;
use laptempo::ingest::{export_workbook, import_workbook};
use laptempo::jitter::{run_simulation, JitterDistribution, JitterModel};
use laptempo::render::{render, ChartKind, ChartSpec};
use laptempo::tempo::{
    bar_durations, bpm_error_bound, bpm_from_days, force_tempo_series, Beats, LapSequence, MeterMap, MeterSegment,
    MovementCorpus, RecordingMeta,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Check,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cumulative(durations: &[f64]) -> Vec<f64> {
    let mut t = 0.0;
    durations
        .iter()
        .map(|d| {
            t += d;
            t
        })
        .collect()
}

fn worked_example() -> Check {
    let bpm = bpm_from_days(1.708e-5, Beats::whole(4)).map_err(|e| e.to_string())?;
    ensure((bpm - 162.63).abs() <= 0.01, || {
        format!("{bpm:.4} BPM, expected 162.63 +- 0.01")
    })?;
    ensure((bpm - 162.7).abs() <= 0.15, || {
        format!("{bpm:.4} BPM is more than 0.15 from 162.7")
    })?;
    Ok(format!("{bpm:.4} BPM"))
}

fn error_bound() -> Check {
    let b = bpm_error_bound(1.5, Beats::whole(4), 0.1).map_err(|e| e.to_string())?;
    ensure((b - 10.67).abs() <= 0.01, || {
        format!("{b:.4} BPM, expected 10.67 +- 0.01")
    })?;
    Ok(format!("{b:.4} BPM"))
}

fn consistency_identity() -> Check {
    let mut r = rng(3);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let m = r.random_range(1..=2000);
        let d: Vec<f64> = (0..m).map(|_| r.random_range(0.05..12.0)).collect();
        // as exported: millisecond stopwatch readings or decimal days
        let stamps: Vec<f64> = if r.random_bool(0.5) {
            cumulative(&d).iter().map(|t| (t * 1000.0).round() / 1000.0).collect()
        } else {
            cumulative(&d).iter().map(|t| (t / 86_400.0) * 86_400.0).collect()
        };
        let laps = LapSequence::new(stamps).map_err(|e| e.to_string())?;
        let sum: f64 = bar_durations(&laps).iter().sum();
        worst = worst.max((sum - laps.total()).abs());
    }
    ensure(worst <= 1e-6, || format!("worst residual {worst:e} s"))?;
    Ok(format!("worst residual {worst:.3e} s"))
}

fn error_model() -> Check {
    let bars = 100;
    let meter = MeterMap::uniform(bars, Beats::whole(4)).map_err(|e| e.to_string())?;
    let model = JitterModel::new(JitterDistribution::Uniform, 0.1, 1).map_err(|e| e.to_string())?;
    // constant dt = 1.5 s in 4/4
    let report = run_simulation(&vec![160.0; bars], &meter, &model, 10_000).map_err(|e| e.to_string())?;

    // first-order: 4*60/dt^2 * sigma(dT_i - dT_{i-1}); bar 1 has only its closing press
    let sigma = 0.1 / 3f64.sqrt();
    let gain = 240.0 / (1.5 * 1.5);
    let predicted = gain * sigma * ((1.0 + 2.0 * (bars as f64 - 1.0)) / bars as f64).sqrt();
    let std = report.per_bar_bpm_error_std;
    let a = (std / predicted - 1.0).abs() <= 0.10;
    let bound = 3.0 * std / (10_000f64).sqrt();
    let b = report.mean_bias.abs() < bound;
    let c = report.section_error_interior_independence;
    let worst_lag = report
        .lag_autocorrelation
        .iter()
        .filter(|l| l.lag >= 2)
        .map(|l| l.r.abs())
        .fold(0.0, f64::max);
    let d = !report.lag_autocorrelation.is_empty() && worst_lag < 0.03;
    let detail = format!(
        "(a) std {std:.3} vs first-order {predicted:.3} [{}]; (b) |bias| {:.3} vs bound {bound:.3} [{}]; \
         (c) interior invariance [{}]; (d) max |r| lag>=2 {worst_lag:.4} [{}]",
        ok(a),
        report.mean_bias.abs(),
        ok(b),
        ok(c),
        ok(d),
    );
    if a && b && c && d {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

fn missed_lap() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let full = common::steady_stamps(100, 120.0);
    let meter = MeterMap::uniform(100, Beats::whole(4)).map_err(|e| e.to_string())?;
    for k in 2..=99 {
        let mut stamps = full.clone();
        stamps.remove(k - 1);
        let sub = dir.path().join(format!("del{k}"));
        fs::create_dir(&sub).map_err(|e| e.to_string())?;
        let cfg = common::write_project(&sub, 100, &[("r", stamps.clone())]);
        let o = common::laptempo(&["--config", cfg.to_str().unwrap(), "validate"]);
        ensure(o.code == 1, || format!("deleting T_{k}: exit {}", o.code))?;
        ensure(o.stdout.contains("expected 100, found 99 (-1 bars)"), || {
            format!("deleting T_{k}: count delta not reported:\n{}", o.stdout)
        })?;
        let laps = LapSequence::new(stamps).map_err(|e| e.to_string())?;
        let series = force_tempo_series(&laps, &meter).map_err(|e| e.to_string())?;
        let flagged = detect_anomalies(&series, 5, 1.8).map_err(|e| e.to_string())?.bars();
        ensure(flagged == vec![k], || {
            format!("deleting T_{k}: flagged bars {flagged:?}, expected [{k}]")
        })?;
    }
    Ok("98 deletion positions".into())
}

/// Closest pair by exhaustive pairwise distance; a tie between pairs
/// resolves to the median.
fn fermata_oracle(c: &[f64], limit: f64) -> Option<f64> {
    if c.len() == 2 {
        return ((c[0] - c[1]).abs() <= limit).then(|| (c[0] + c[1]) / 2.0);
    }
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let dist = |&(i, j): &(usize, usize)| (c[i] - c[j]).abs();
    let best = pairs.iter().map(dist).fold(f64::INFINITY, f64::min);
    let closest: Vec<_> = pairs.iter().filter(|p| dist(p) == best).collect();
    if closest.len() == 1 {
        let (i, j) = *closest[0];
        Some((c[i] + c[j]) / 2.0)
    } else {
        let mut s = c.to_vec();
        s.sort_by(f64::total_cmp);
        Some(s[1])
    }
}

fn fermata() -> Check {
    let mut r = rng(6);
    let mut counts = [0usize; 3];
    for i in 0..1000 {
        let limit = r.random_range(0.05..1.0);
        let base = r.random_range(20.0..60.0);
        let case = i % 3;
        let c: Vec<f64> = match case {
            0 => vec![base, base + r.random_range(-0.98..0.98) * limit],
            1 => {
                let sign = if r.random_bool(0.5) { 1.0 } else { -1.0 };
                vec![base, base + sign * limit * r.random_range(1.02..10.0)]
            }
            _ => (0..3).map(|_| base + r.random_range(-3.0..3.0)).collect(),
        };
        let got = resolve_fermata(&FermataMeasurement::new(c.clone()).map_err(|e| e.to_string())?, limit);
        match (fermata_oracle(&c, limit), got) {
            (Some(want), Ok(v)) => {
                ensure(case != 1, || format!("{c:?}: divergent pair was averaged"))?;
                ensure((v - want).abs() <= 1e-12 * want, || {
                    format!("{c:?}: got {v}, oracle {want}")
                })?;
            }
            (None, Err(Error::ThirdMeasurementRequired { .. })) => {
                ensure(case == 1, || format!("{c:?}: third measurement requested"))?;
            }
            (want, got) => return Err(format!("{c:?} limit {limit}: got {got:?}, oracle {want:?}")),
        }
        counts[case] += 1;
    }
    Ok(format!(
        "{} within-limit pairs, {} divergent pairs, {} triples",
        counts[0], counts[1], counts[2]
    ))
}

fn spline() -> Check {
    let mut r = rng(7);
    let mut done = 0;
    let mut worst_integral = 0.0_f64;
    while done < 200 {
        let n = r.random_range(5..600);
        let centres: Vec<f64> = (0..r.random_range(1..4)).map(|_| r.random_range(60.0..200.0)).collect();
        let spread = r.random_range(1.0..20.0);
        let values: Vec<f64> = (0..n)
            .map(|_| {
                let c = centres[r.random_range(0..centres.len())];
                // sum of uniforms: roughly normal
                c + spread * ((0..4).map(|_| r.random_range(-1.0..1.0)).sum::<f64>() / 2.0)
            })
            .collect();
        let width = r.random_range(0.5..6.0);
        let h = build_histogram(&values, width, 0.0).map_err(|e| e.to_string())?;
        if h.bin_count() < 2 {
            continue;
        }
        let cdf = empirical_cdf(&h).map_err(|e| e.to_string())?;
        let pdf = spline_pdf(&cdf).map_err(|e| e.to_string())?;
        for &(x, f) in &cdf {
            ensure(pdf.cdf(x) == f, || format!("CDF at knot {x} is {} not {f}", pdf.cdf(x)))?;
        }
        let (a, b) = (pdf.min(), pdf.max());
        for i in 0..=10_000 {
            let x = a + (b - a) * i as f64 / 10_000.0;
            let y = pdf.density(x);
            ensure(y >= 0.0, || format!("density {y} at {x}"))?;
        }
        // Simpson per knot interval; each piece is a quadratic
        let integral: f64 = pdf
            .knots()
            .windows(2)
            .map(|w| {
                (w[1] - w[0]) / 6.0 * (pdf.density(w[0]) + 4.0 * pdf.density((w[0] + w[1]) / 2.0) + pdf.density(w[1]))
            })
            .sum();
        worst_integral = worst_integral.max((integral - 1.0).abs());
        done += 1;
    }
    ensure(worst_integral <= 1e-6, || format!("integral off by {worst_integral:e}"))?;
    Ok(format!("200 histograms, worst |integral - 1| {worst_integral:.2e}"))
}

fn kde_oracle() -> Check {
    let mut r = rng(8);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let n = r.random_range(2..300);
        let sample: Vec<f64> = (0..n).map(|_| r.random_range(50.0..220.0)).collect();
        let est = if r.random_bool(0.5) {
            kde(&sample, Bandwidth::Auto)
        } else {
            kde(&sample, Bandwidth::Fixed(r.random_range(0.2..15.0)))
        }
        .map_err(|e| e.to_string())?;
        let h = est.bandwidth();
        for _ in 0..100 {
            let x = r.random_range(40.0..230.0);
            let direct: f64 = sample
                .iter()
                .map(|v| (-((x - v) / h).powi(2) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt())
                .sum::<f64>()
                / (n as f64 * h);
            let got = est.evaluate(x);
            let rel = if direct == 0.0 {
                got.abs()
            } else {
                ((got - direct) / direct).abs()
            };
            worst = worst.max(rel);
        }
    }
    ensure(worst <= 1e-12, || format!("worst relative error {worst:e}"))?;
    Ok(format!("worst relative error {worst:.2e}"))
}

fn random_corpus(r: &mut ChaCha8Rng, id: usize) -> Result<MovementCorpus, String> {
    let bars = r.random_range(1..400);
    let mut segments = vec![MeterSegment {
        from_bar: 1,
        beats_per_bar: Beats::whole(r.random_range(1..8)),
    }];
    for from in 2..=bars {
        if r.random_bool(0.02) {
            let beats = if r.random_bool(0.5) {
                Beats::whole(r.random_range(1..8))
            } else {
                Beats::new(r.random_range(1..16), 8).map_err(|e| e.to_string())?
            };
            segments.push(MeterSegment {
                from_bar: from,
                beats_per_bar: beats,
            });
        }
    }
    let anacrusis = r.random_bool(0.3).then(|| Beats::whole(1));
    let meter = MeterMap::new(bars, segments, anacrusis).map_err(|e| e.to_string())?;
    let recs = (0..r.random_range(1..8))
        .map(|i| {
            let d: Vec<f64> = (0..bars).map(|_| r.random_range(0.2..8.0)).collect();
            let stamps = cumulative(&d);
            let total = stamps[bars - 1];
            let laps = LapSequence::new(stamps)
                .and_then(|l| l.with_anacrusis(r.random_bool(0.5).then(|| r.random_range(0.1..2.0))))
                .and_then(|l| l.with_reported_total(r.random_bool(0.5).then(|| total + r.random_range(-0.1..0.1))))
                .map_err(|e| e.to_string())?;
            let meta = RecordingMeta {
                performer: format!("Performer {i}, \"the elder\""),
                year: r.random_range(1900..2030),
                label: format!("c{id}r{i}"),
            };
            Ok((meta, laps))
        })
        .collect::<Result<Vec<_>, String>>()?;
    MovementCorpus::from_laps(format!("movement {id}"), meter, recs).map_err(|e| e.to_string())
}

fn same_corpus(a: &MovementCorpus, b: &MovementCorpus) -> Result<(), String> {
    ensure(a.movement_id() == b.movement_id(), || "movement id changed".into())?;
    ensure(a.meter() == b.meter(), || "meter changed".into())?;
    ensure(a.len() == b.len(), || "recording count changed".into())?;
    let close = |x: Option<f64>, y: Option<f64>| match (x, y) {
        (Some(x), Some(y)) => (x - y).abs() <= 1e-6,
        (None, None) => true,
        _ => false,
    };
    for (x, y) in a.entries().iter().zip(b.entries()) {
        let label = &x.meta.label;
        ensure(x.meta == y.meta, || format!("{label}: metadata changed"))?;
        ensure(x.laps.len() == y.laps.len(), || format!("{label}: bar count changed"))?;
        for (i, (s, t)) in x.laps.timestamps().iter().zip(y.laps.timestamps()).enumerate() {
            ensure((s - t).abs() <= 1e-6, || format!("{label}: T_{} {s} -> {t}", i + 1))?;
        }
        ensure(close(x.laps.anacrusis_duration(), y.laps.anacrusis_duration()), || {
            format!("{label}: anacrusis changed")
        })?;
        ensure(close(x.laps.reported_total(), y.laps.reported_total()), || {
            format!("{label}: reported total changed")
        })?;
        ensure(x.series.flags() == y.series.flags(), || {
            format!("{label}: flags changed")
        })?;
        for (s, t) in x.series.bpm().iter().zip(y.series.bpm()) {
            ensure((s - t).abs() <= 1e-6 * s, || format!("{label}: BPM {s} -> {t}"))?;
        }
    }
    Ok(())
}

fn workbook_round_trip() -> Check {
    let mut r = rng(9);
    let mut recordings = 0;
    for id in 0..100 {
        let corpus = random_corpus(&mut r, id)?;
        let bytes = export_workbook(&corpus).map_err(|e| e.to_string())?;
        let back = import_workbook(&bytes).map_err(|e| format!("corpus {id}: {e}"))?;
        same_corpus(&corpus, &back).map_err(|e| format!("corpus {id}: {e}"))?;
        recordings += corpus.len();
    }
    Ok(format!("100 corpora, {recordings} recordings"))
}

fn rendering() -> Check {
    const KINDS: [&str; 5] = [
        "tempograph_focused",
        "histogram_pdf",
        "ridgeline",
        "stacked_sections",
        "combination",
    ];
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    common::render_demo(a.path());
    common::render_demo(b.path());
    for kind in KINDS {
        let name = format!("demo_allegro_{kind}.svg");
        let first = fs::read(a.path().join(&name)).map_err(|e| e.to_string())?;
        let second = fs::read(b.path().join(&name)).map_err(|e| e.to_string())?;
        ensure(first == second, || format!("{name} differs between runs"))?;
        let golden = fs::read(common::golden_dir().join(&name)).map_err(|e| format!("{name}: {e}"))?;
        ensure(first == golden, || format!("{name} differs from golden file"))?;
    }

    let curves: Vec<Vec<f64>> = (0..6).map(|i| vec![100.0 + 5.0 * i as f64; 150]).collect();
    let six = common_corpus(&curves)?;
    let mut spec = ChartSpec::new(ChartKind::TempographFocused);
    spec.bar_span = Some((1, 50));
    ensure(render(&six, None, &spec).is_err(), || "6 recordings accepted".into())?;
    let five = common_corpus(&curves[..5])?;
    ensure(render(&five, None, &spec).is_ok(), || "5 recordings rejected".into())?;
    spec.bar_span = Some((1, 101));
    ensure(render(&five, None, &spec).is_err(), || "101-bar span accepted".into())?;
    spec.bar_span = Some((51, 150));
    ensure(render(&five, None, &spec).is_ok(), || "100-bar span rejected".into())?;
    Ok("5 kinds byte-identical and golden; limits enforced".into())
}

fn common_corpus(curves: &[Vec<f64>]) -> Result<MovementCorpus, String> {
    let bars = curves[0].len();
    let meter = MeterMap::uniform(bars, Beats::whole(4)).map_err(|e| e.to_string())?;
    let recs = curves
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let d: Vec<f64> = c.iter().map(|bpm| 240.0 / bpm).collect();
            let meta = RecordingMeta {
                performer: format!("P{i}"),
                year: 1950 + i as i32,
                label: format!("r{i}"),
            };
            LapSequence::new(cumulative(&d)).map(|l| (meta, l))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    MovementCorpus::from_laps("m", meter, recs).map_err(|e| e.to_string())
}

fn main() {
    let criteria = [
        Criterion {
            name: "worked example",
            budget: Duration::from_secs(1),
            run: worked_example,
        },
        Criterion {
            name: "error bound",
            budget: Duration::from_secs(1),
            run: error_bound,
        },
        Criterion {
            name: "consistency identity",
            budget: Duration::from_secs(5),
            run: consistency_identity,
        },
        Criterion {
            name: "error model simulation",
            budget: Duration::from_secs(30),
            run: error_model,
        },
        Criterion {
            name: "missed-lap detection",
            budget: Duration::from_secs(5),
            run: missed_lap,
        },
        Criterion {
            name: "fermata rule",
            budget: Duration::from_secs(1),
            run: fermata,
        },
        Criterion {
            name: "spline PDF",
            budget: Duration::from_secs(10),
            run: spline,
        },
        Criterion {
            name: "KDE oracle",
            budget: Duration::from_secs(5),
            run: kde_oracle,
        },
        Criterion {
            name: "workbook round trip",
            budget: Duration::from_secs(10),
            run: workbook_round_trip,
        },
        Criterion {
            name: "rendering determinism",
            budget: Duration::from_secs(10),
            run: rendering,
        },
    ];
    let mut failures = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; took longer than {:?}", c.budget)),
            Err(d) => (false, d),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "{} {:>2} {}: {detail} ({:.2}s)",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            c.name,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
