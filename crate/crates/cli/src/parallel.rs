//! Rayon drivers over the core's block and start layout.
//!
//! Blocks (and optimizer starts) are computed in parallel but merged in
//! index order, so results match the sequential core functions bit for bit.

use dirq_core::estimation::{fidelity_block, report_from_tally, FidelityReport, Scenario};
use dirq_core::flip::{uqsf_block, AxisMode, FlipSummary};
use dirq_core::measurement::ProjectiveMeasurement;
use dirq_core::optimizer::{collect, run_start, OptimizationResult, OptimizerConfig};
use dirq_core::stats::{block_count, Tally};
use dirq_core::{Error, Result};
use rayon::prelude::*;

fn merge_blocks(trials: u64, block: impl Fn(u64) -> Tally + Sync + Send) -> Tally {
    let tallies: Vec<Tally> = (0..block_count(trials))
        .into_par_iter()
        .map(block)
        .collect();
    tallies.into_iter().fold(Tally::default(), Tally::merge)
}

pub fn fidelity_monte_carlo(
    m: &ProjectiveMeasurement,
    scenario: &Scenario,
    trials: u64,
    seed: u64,
) -> Result<FidelityReport> {
    if trials == 0 {
        return Err(Error::TooFew {
            what: "trials",
            min: 1,
        });
    }
    let tally = merge_blocks(trials, |b| fidelity_block(m, scenario, trials, seed, b));
    Ok(report_from_tally(&tally))
}

pub fn uqsf_average_fidelity(trials: u64, seed: u64, axis: AxisMode) -> Result<FlipSummary> {
    if trials == 0 {
        return Err(Error::TooFew {
            what: "trials",
            min: 1,
        });
    }
    Ok(merge_blocks(trials, |b| uqsf_block(axis, trials, seed, b)).into())
}

pub fn optimize(scenario: &Scenario, cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    if cfg.starts == 0 {
        return Err(Error::TooFew {
            what: "starts",
            min: 1,
        });
    }
    let starts = (0..cfg.starts)
        .into_par_iter()
        .map(|i| run_start(scenario, cfg, i))
        .collect();
    collect(scenario, cfg, starts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dirq_core::estimation::{self, Pairing, Prior};
    use dirq_core::flip;
    use dirq_core::measurement::build_parallel_optimal;
    use dirq_core::optimizer::{self, Constraint};

    #[test]
    fn parallel_drivers_match_sequential() {
        let m = build_parallel_optimal().unwrap();
        let s = Scenario::new(Pairing::Parallel, Prior::Tetrahedron);
        // Several blocks with a ragged tail.
        let trials = 3 * 4096 + 17;
        assert_eq!(
            fidelity_monte_carlo(&m, &s, trials, 4).unwrap(),
            estimation::fidelity_monte_carlo(&m, &s, trials, 4).unwrap()
        );
        assert_eq!(
            uqsf_average_fidelity(trials, 4, AxisMode::Random).unwrap(),
            flip::uqsf_average_fidelity(trials, 4, AxisMode::Random).unwrap()
        );
        let cfg = OptimizerConfig::new(Constraint::Product, 3, 4);
        assert_eq!(
            optimize(&s, &cfg).unwrap(),
            optimizer::optimize(&s, &cfg).unwrap()
        );
    }
}
