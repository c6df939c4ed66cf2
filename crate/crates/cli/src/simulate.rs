use std::io::Write;

use laptempo::jitter::{run_simulation, JitterDistribution, JitterModel};
use laptempo::tempo::{Beats, MeterMap};

use crate::args::{DistributionArg, SimulateArgs};
use crate::config::read;
use crate::{CliError, EXIT_FAILED, EXIT_OK};

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Prints the simulation report as JSON. Exits 0 only when every error
/// property check in the report passes.
pub fn cmd_simulate(args: &SimulateArgs, seed: Option<u64>, out: &mut dyn Write) -> Result<i32, CliError> {
    let curve: Vec<f64> = match (&args.curve, args.bpm) {
        (Some(path), _) => serde_json::from_slice(&read(path)?)
            .map_err(|e| CliError::Input(format!("{}: expected a JSON array of tempi: {e}", path.display())))?,
        (None, Some(bpm)) => {
            if args.bars == 0 {
                return Err(usage("--bars must be at least 1"));
            }
            vec![bpm; args.bars]
        }
        (None, None) => return Err(usage("give --bpm or --curve")),
    };
    if curve.is_empty() {
        return Err(usage("tempo curve is empty"));
    }
    let beats: Beats = args.beats.parse().map_err(usage)?;
    let meter = MeterMap::uniform(curve.len(), beats).map_err(usage)?;
    let distribution = match args.distribution {
        DistributionArg::Uniform => JitterDistribution::Uniform,
        DistributionArg::Gaussian => JitterDistribution::Gaussian,
    };
    let model = JitterModel::new(distribution, args.jitter, seed.unwrap_or(0)).map_err(usage)?;
    let report = run_simulation(&curve, &meter, &model, args.trials).map_err(usage)?;
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    out.write_all(json.as_bytes()).map_err(|source| CliError::Io {
        path: "<stdout>".into(),
        source,
    })?;
    Ok(if report.passed { EXIT_OK } else { EXIT_FAILED })
}
