//! Monte Carlo check of how lap-press reaction time propagates into bar
//! tempi.
//!
//! Each trial perturbs every timestamp of a synthetic ground-truth lap
//! sequence independently and compares the recomputed tempi with the truth.
//! Trial `t` draws from the ChaCha8 stream `t` of the model seed, so serial
//! and parallel runs produce identical reports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::section_tempo;
use crate::error::{Error, Result};
use crate::tempo::{bar_durations, LapSequence, MeterMap};

const MAX_REDRAWS: u32 = 10_000;
const STD_TOLERANCE: f64 = 0.10;
const MAX_CHECKED_LAG: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum JitterDistribution {
    /// Uniform on `[-scale, +scale]`.
    #[default]
    Uniform,
    /// Normal with standard deviation `scale`.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JitterModel {
    pub distribution: JitterDistribution,
    /// Half-width (uniform) or sigma (gaussian), seconds.
    pub scale: f64,
    pub seed: u64,
}

impl JitterModel {
    /// A zero scale is accepted and leaves timestamps untouched.
    pub fn new(distribution: JitterDistribution, scale: f64, seed: u64) -> Result<Self> {
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(Error::domain(format!(
                "jitter scale must be finite and >= 0, got {scale}"
            )));
        }
        Ok(JitterModel {
            distribution,
            scale,
            seed,
        })
    }

    /// Standard deviation of a single press error.
    pub fn press_sigma(&self) -> f64 {
        match self.distribution {
            JitterDistribution::Uniform => self.scale / 3f64.sqrt(),
            JitterDistribution::Gaussian => self.scale,
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

enum Sampler {
    Zero,
    Uniform(Uniform<f64>),
    Normal(Normal<f64>),
}

impl Sampler {
    fn new(model: &JitterModel) -> Result<Self> {
        if model.scale == 0.0 {
            return Ok(Sampler::Zero);
        }
        Ok(match model.distribution {
            JitterDistribution::Uniform => Sampler::Uniform(
                Uniform::new_inclusive(-model.scale, model.scale).map_err(|e| Error::domain(e.to_string()))?,
            ),
            JitterDistribution::Gaussian => {
                Sampler::Normal(Normal::new(0.0, model.scale).map_err(|e| Error::domain(e.to_string()))?)
            }
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Zero => 0.0,
            Sampler::Uniform(d) => d.sample(rng),
            Sampler::Normal(d) => d.sample(rng),
        }
    }
}

/// Ground-truth laps for a per-bar tempo curve: `dt_i = n_i * 60 / BPM_i`.
pub fn synth_laps(curve: &[f64], meter: &MeterMap) -> Result<LapSequence> {
    if curve.len() != meter.bar_count() {
        return Err(Error::domain(format!(
            "tempo curve has {} bars, meter has {}",
            curve.len(),
            meter.bar_count()
        )));
    }
    let mut t = 0.0;
    let mut stamps = Vec::with_capacity(curve.len());
    for (i, &bpm) in curve.iter().enumerate() {
        if !(bpm > 0.0 && bpm.is_finite()) {
            return Err(Error::domain(format!(
                "bar {}: tempo must be positive, got {bpm}",
                i + 1
            )));
        }
        t += meter.beats_at(i + 1).as_f64() * 60.0 / bpm;
        stamps.push(t);
    }
    LapSequence::new(stamps)
}

/// Perturbs `stamps[range]` in place, redrawing any value that would not
/// lie strictly between its (already perturbed) predecessor and `ceiling`.
fn perturb<R: Rng>(
    stamps: &mut [f64],
    range: std::ops::Range<usize>,
    ceiling: f64,
    sampler: &Sampler,
    rng: &mut R,
) -> Result<u64> {
    let mut rejections = 0;
    for i in range {
        let floor = if i == 0 { 0.0 } else { stamps[i - 1] };
        let truth = stamps[i];
        let mut redraws = 0;
        loop {
            let v = truth + sampler.draw(rng);
            if v > floor && v < ceiling {
                stamps[i] = v;
                break;
            }
            rejections += 1;
            redraws += 1;
            if redraws >= MAX_REDRAWS {
                return Err(Error::domain(format!(
                    "bar {}: jitter too large to keep timestamps increasing",
                    i + 1
                )));
            }
        }
    }
    Ok(rejections)
}

#[derive(Debug, Clone, PartialEq)]
pub struct JitteredLaps {
    pub laps: LapSequence,
    /// Draws discarded to keep the sequence strictly increasing.
    pub rejections: u64,
}

fn jitter_stamps(laps: &LapSequence, sampler: &Sampler, rng: &mut ChaCha8Rng) -> Result<(Vec<f64>, u64)> {
    let mut stamps = laps.timestamps().to_vec();
    let n = stamps.len();
    let rejections = perturb(&mut stamps, 0..n, f64::INFINITY, sampler, rng)?;
    Ok((stamps, rejections))
}

/// Independently perturbs every timestamp. Deterministic for a fixed seed.
pub fn apply_jitter(laps: &LapSequence, model: &JitterModel) -> Result<JitteredLaps> {
    let sampler = Sampler::new(model)?;
    let mut rng = model.rng(0);
    let (stamps, rejections) = jitter_stamps(laps, &sampler, &mut rng)?;
    Ok(JitteredLaps {
        laps: LapSequence::new(stamps)?,
        rejections,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagCorrelation {
    pub lag: usize,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregationRow {
    /// Section length in bars.
    pub bars: usize,
    pub duration_error_std: f64,
    pub analytic_duration_error_std: f64,
    pub bpm_error_std: f64,
    pub analytic_bpm_error_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub trials: usize,
    pub bars: usize,
    pub distribution: JitterDistribution,
    pub scale: f64,
    pub seed: u64,
    pub press_sigma: f64,

    /// Pooled over bars: `sqrt(mean_i var_i)` of `BPM'_i - BPM_i`.
    pub per_bar_bpm_error_std: f64,
    /// First-order `n_i*60/dt_i^2 * sigma_dt`, pooled the same way.
    pub analytic_prediction: f64,
    pub std_ratio: f64,
    pub std_within_tolerance: bool,

    /// Mean of `BPM'_i - BPM_i` over all bars and trials.
    pub mean_bias: f64,
    /// `3 * per_bar_bpm_error_std / sqrt(trials)`
    pub bias_bound: f64,
    pub bias_within_bound: bool,
    /// Mean of the first-order error `-(n_i*60/dt_i^2) * (dT_i - dT_{i-1})`.
    pub linearized_mean_bias: f64,
    /// Second-order term `n_i*60*sigma_dt^2/dt_i^3`, averaged over bars.
    pub second_order_bias_prediction: f64,

    pub lag_autocorrelation: Vec<LagCorrelation>,
    /// `3 / sqrt(trials)`
    pub autocorrelation_bound: f64,
    pub lag1_negative: bool,
    pub non_accumulation_ok: bool,

    pub section_from_bar: usize,
    pub section_to_bar: usize,
    /// Section tempo with only interior timestamps jittered equals the
    /// unjittered value bit for bit in every trial.
    pub section_error_interior_independence: bool,

    pub aggregation: Vec<AggregationRow>,
    /// Section duration error is the same for every section length.
    pub aggregation_ok: bool,

    pub rejections: u64,
    pub passed: bool,
}

struct Trial {
    bpm_errors: Vec<f64>,
    linear_errors_sum: f64,
    interior_exact: bool,
    section_duration_errors: Vec<f64>,
    section_bpm_errors: Vec<f64>,
    rejections: u64,
}

fn within(ratio_num: f64, ratio_den: f64) -> bool {
    if ratio_den == 0.0 {
        ratio_num == 0.0
    } else {
        (ratio_num / ratio_den - 1.0).abs() <= STD_TOLERANCE
    }
}

/// Runs `trials` independent jitter trials against a ground-truth curve.
pub fn run_simulation(curve: &[f64], meter: &MeterMap, model: &JitterModel, trials: usize) -> Result<SimReport> {
    if trials < 1 {
        return Err(Error::domain("at least one trial is required"));
    }
    let truth = synth_laps(curve, meter)?;
    let m = truth.len();
    let true_dt = bar_durations(&truth);
    let beats: Vec<f64> = (1..=m).map(|b| meter.beats_at(b).as_f64()).collect();
    let true_bpm: Vec<f64> = (0..m).map(|i| beats[i] * 60.0 / true_dt[i]).collect();
    let sampler = Sampler::new(model)?;

    let quarter = m / 4;
    let (sec_from, sec_to) = (quarter + 1, m - quarter);
    let true_section = section_tempo(&truth, meter, sec_from, sec_to)?;

    // Sections of 1, 2, 4, ... bars starting at bar 2, so both ends are jittered.
    let agg_lengths: Vec<usize> = std::iter::successors(Some(1usize), |k| Some(k * 2))
        .take_while(|&k| k < m)
        .collect();
    let true_agg: Vec<(f64, f64)> = agg_lengths
        .iter()
        .map(|&k| {
            let d = truth.boundary(1 + k) - truth.boundary(1);
            let n: f64 = beats[1..=k].iter().sum();
            (d, n)
        })
        .collect();

    let run_trial = |t: usize| -> Result<Trial> {
        let mut rng = model.rng(t as u64);
        let (stamps, mut rejections) = jitter_stamps(&truth, &sampler, &mut rng)?;
        let mut prev_true = 0.0;
        let mut prev_jit = 0.0;
        let mut bpm_errors = Vec::with_capacity(m);
        let mut linear_errors_sum = 0.0;
        for i in 0..m {
            let dt = stamps[i] - prev_jit;
            bpm_errors.push(beats[i] * 60.0 / dt - true_bpm[i]);
            let shift = (stamps[i] - truth.timestamps()[i]) - (prev_jit - prev_true);
            linear_errors_sum += -beats[i] * 60.0 / (true_dt[i] * true_dt[i]) * shift;
            prev_jit = stamps[i];
            prev_true = truth.timestamps()[i];
        }

        let mut section_duration_errors = Vec::with_capacity(agg_lengths.len());
        let mut section_bpm_errors = Vec::with_capacity(agg_lengths.len());
        for (&k, &(d_true, n)) in agg_lengths.iter().zip(&true_agg) {
            let d = stamps[k] - stamps[0];
            section_duration_errors.push(d - d_true);
            section_bpm_errors.push(n * 60.0 / d - n * 60.0 / d_true);
        }

        // interior-only jitter: timestamps T_from..T_{to-1} move, T_{from-1} and T_to stay
        let mut interior = truth.timestamps().to_vec();
        let ceiling = interior[sec_to - 1];
        rejections += perturb(&mut interior, (sec_from - 1)..(sec_to - 1), ceiling, &sampler, &mut rng)?;
        let interior = LapSequence::new(interior)?;
        let interior_exact = section_tempo(&interior, meter, sec_from, sec_to)?.to_bits() == true_section.to_bits();

        Ok(Trial {
            bpm_errors,
            linear_errors_sum,
            interior_exact,
            section_duration_errors,
            section_bpm_errors,
            rejections,
        })
    };
    let results: Vec<Trial> = (0..trials).into_par_iter().map(run_trial).collect::<Result<_>>()?;

    let nt = trials as f64;
    let mut bar_mean = vec![0.0; m];
    for r in &results {
        for (acc, e) in bar_mean.iter_mut().zip(&r.bpm_errors) {
            *acc += e;
        }
    }
    bar_mean.iter_mut().for_each(|v| *v /= nt);
    let mut bar_var = vec![0.0; m];
    for r in &results {
        for i in 0..m {
            bar_var[i] += (r.bpm_errors[i] - bar_mean[i]).powi(2);
        }
    }
    bar_var.iter_mut().for_each(|v| *v /= nt);
    let per_bar_bpm_error_std = (bar_var.iter().sum::<f64>() / m as f64).sqrt();

    let sigma = model.press_sigma();
    let boundary_sigma = |i: usize| if i == 0 { sigma } else { sigma * 2f64.sqrt() };
    let analytic_sq: f64 = (0..m)
        .map(|i| (beats[i] * 60.0 / true_dt[i].powi(2) * boundary_sigma(i)).powi(2))
        .sum::<f64>()
        / m as f64;
    let analytic_prediction = analytic_sq.sqrt();
    let std_ratio = if analytic_prediction > 0.0 {
        per_bar_bpm_error_std / analytic_prediction
    } else {
        0.0
    };

    let mean_bias = bar_mean.iter().sum::<f64>() / m as f64;
    let bias_bound = 3.0 * per_bar_bpm_error_std / nt.sqrt();
    let bias_within_bound = mean_bias.abs() < bias_bound || (bias_bound == 0.0 && mean_bias == 0.0);
    let linearized_mean_bias = results.iter().map(|r| r.linear_errors_sum).sum::<f64>() / (nt * m as f64);
    let second_order_bias_prediction = (0..m)
        .map(|i| beats[i] * 60.0 * boundary_sigma(i).powi(2) / true_dt[i].powi(3))
        .sum::<f64>()
        / m as f64;

    let bar_sd: Vec<f64> = bar_var.iter().map(|v| v.sqrt()).collect();
    let lag_autocorrelation: Vec<LagCorrelation> = (1..=MAX_CHECKED_LAG.min(m.saturating_sub(1)))
        .map(|lag| {
            let mut acc = 0.0;
            let mut count = 0usize;
            for r in &results {
                for i in 0..m - lag {
                    let s = bar_sd[i] * bar_sd[i + lag];
                    if s > 0.0 {
                        acc += (r.bpm_errors[i] - bar_mean[i]) * (r.bpm_errors[i + lag] - bar_mean[i + lag]) / s;
                        count += 1;
                    }
                }
            }
            let r = if count > 0 { acc / count as f64 } else { 0.0 };
            LagCorrelation { lag, r }
        })
        .collect();
    let autocorrelation_bound = 3.0 / nt.sqrt();
    let jittered = sigma > 0.0;
    let lag1_negative = !jittered || lag_autocorrelation.first().is_none_or(|l| l.r < 0.0);
    let non_accumulation_ok = lag1_negative
        && lag_autocorrelation
            .iter()
            .filter(|l| l.lag >= 2)
            .all(|l| l.r.abs() < autocorrelation_bound);

    let section_error_interior_independence = results.iter().all(|r| r.interior_exact);

    let analytic_duration = sigma * 2f64.sqrt();
    let aggregation: Vec<AggregationRow> = agg_lengths
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let std_of = |f: &dyn Fn(&Trial) -> f64| {
                let mean = results.iter().map(f).sum::<f64>() / nt;
                (results.iter().map(|r| (f(r) - mean).powi(2)).sum::<f64>() / nt).sqrt()
            };
            let (d_true, n) = true_agg[j];
            AggregationRow {
                bars: k,
                duration_error_std: std_of(&|r: &Trial| r.section_duration_errors[j]),
                analytic_duration_error_std: analytic_duration,
                bpm_error_std: std_of(&|r: &Trial| r.section_bpm_errors[j]),
                analytic_bpm_error_std: n * 60.0 / (d_true * d_true) * analytic_duration,
            }
        })
        .collect();
    let aggregation_ok = aggregation
        .iter()
        .all(|a| within(a.duration_error_std, a.analytic_duration_error_std));

    let std_within_tolerance = within(per_bar_bpm_error_std, analytic_prediction);
    let passed = std_within_tolerance
        && bias_within_bound
        && non_accumulation_ok
        && section_error_interior_independence
        && aggregation_ok;

    Ok(SimReport {
        trials,
        bars: m,
        distribution: model.distribution,
        scale: model.scale,
        seed: model.seed,
        press_sigma: sigma,
        per_bar_bpm_error_std,
        analytic_prediction,
        std_ratio,
        std_within_tolerance,
        mean_bias,
        bias_bound,
        bias_within_bound,
        linearized_mean_bias,
        second_order_bias_prediction,
        lag_autocorrelation,
        autocorrelation_bound,
        lag1_negative,
        non_accumulation_ok,
        section_from_bar: sec_from,
        section_to_bar: sec_to,
        section_error_interior_independence,
        aggregation,
        aggregation_ok,
        rejections: results.iter().map(|r| r.rejections).sum(),
        passed,
    })
}
