//! Load sweeps, Monte Carlo CDFs and oracle comparisons.
//!
//! Work fans out over loads or trials with rayon; results are gathered in
//! index order, so output depends only on the seed and the flags.

use bsopt_core::solver::SolverConfig;
use bsopt_core::{ConsumptionParams, ScenarioConfig, Strategy};
use rayon::prelude::*;

use crate::error::{HarnessError, Result};

/// Low, medium and high load of the CDF experiments.
pub const DEFAULT_CDF_LOADS: [f64; 3] = [0.01, 0.06, 0.18];

/// Benchmarks evaluated when no strategy is requested.
pub const DEFAULT_STRATEGIES: [Strategy; 4] = [
    Strategy::Optimized,
    Strategy::RushToSleep,
    Strategy::RushToMute,
    Strategy::AwakeButWhisper,
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub load: f64,
    pub strategy: Strategy,
    pub n_a: usize,
    pub m_a: usize,
    pub p_a: f64,
    pub p_cons: f64,
    pub feasible: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Rows of one strategy, in load order.
    pub fn series(&self, strategy: Strategy) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.strategy == strategy)
    }
}

/// One sorted sample of an empirical CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfRow {
    pub preset: String,
    pub td_savings: String,
    pub load: f64,
    pub trials: usize,
    pub seed: u64,
    pub strategy: Strategy,
    /// 1-based position in ascending `p_cons` order.
    pub rank: usize,
    /// Scenario index the sample came from.
    pub trial: u64,
    pub n_a: usize,
    pub m_a: usize,
    pub p_cons: f64,
    /// `rank / trials`.
    pub cdf: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CdfResult {
    pub rows: Vec<CdfRow>,
}

impl CdfResult {
    /// Sorted samples of one strategy at one load.
    pub fn samples(&self, strategy: Strategy, load: f64) -> Vec<&CdfRow> {
        self.rows
            .iter()
            .filter(|r| r.strategy == strategy && r.load == load)
            .collect()
    }

    pub fn extend(&mut self, other: CdfResult) {
        self.rows.extend(other.rows);
    }
}

/// Labels written next to every CDF sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdfLabels {
    pub preset: String,
    pub td_savings: String,
}

/// `points` evenly spaced loads in `(0, 1]`.
pub fn even_loads(points: usize) -> Vec<f64> {
    (1..=points).map(|i| i as f64 / points as f64).collect()
}

/// Requested strategies with the rounded optimizer added, deduplicated,
/// in canonical order.
fn with_optimized(strategies: &[Strategy]) -> Vec<Strategy> {
    let mut out: Vec<Strategy> = strategies.iter().copied().chain([Strategy::Optimized]).collect();
    out.sort();
    out.dedup();
    out
}

fn check_load(load: f64) -> Result<()> {
    if (0.0..=1.0).contains(&load) {
        Ok(())
    } else {
        Err(HarnessError::Usage(format!("load {load} is outside [0, 1]")))
    }
}

/// Every strategy at every load, on the single radio draw `index`.
pub fn sweep_load(
    cfg: &ScenarioConfig,
    cp: &ConsumptionParams,
    solver: &SolverConfig,
    loads: &[f64],
    strategies: &[Strategy],
    index: u64,
) -> Result<SweepResult> {
    let mut loads = loads.to_vec();
    for &l in &loads {
        check_load(l)?;
    }
    loads.sort_by(f64::total_cmp);
    let strategies = with_optimized(strategies);
    let draw = cfg.draw(index)?;
    let per_load: Vec<Vec<SweepRow>> = loads
        .par_iter()
        .map(|&load| {
            let s = draw.at_load(load)?;
            strategies
                .iter()
                .map(|&strategy| {
                    let e = strategy.evaluate(&s, cp, solver)?;
                    Ok(SweepRow {
                        load,
                        strategy,
                        n_a: e.allocation.n_a,
                        m_a: e.allocation.m_a,
                        p_a: e.allocation.p_a,
                        p_cons: e.allocation.p_cons,
                        feasible: e.allocation.feasible,
                        iterations: e.iterations,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        rows: per_load.into_iter().flatten().collect(),
    })
}

/// Empirical CDF of the consumption of each strategy over `trials`
/// independent radio draws at one load.
pub fn monte_carlo_cdf(
    cfg: &ScenarioConfig,
    cp: &ConsumptionParams,
    solver: &SolverConfig,
    labels: &CdfLabels,
    load: f64,
    trials: usize,
    strategies: &[Strategy],
) -> Result<CdfResult> {
    check_load(load)?;
    if trials == 0 {
        return Err(HarnessError::Usage("trials must be at least 1".into()));
    }
    let strategies = with_optimized(strategies);
    let per_trial: Vec<Vec<bsopt_core::Allocation>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let s = cfg.draw(i)?.at_load(load)?;
            strategies
                .iter()
                .map(|st| Ok(st.evaluate(&s, cp, solver)?.allocation))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(trials * strategies.len());
    for (j, &strategy) in strategies.iter().enumerate() {
        let mut samples: Vec<(u64, bsopt_core::Allocation)> = per_trial
            .iter()
            .enumerate()
            .map(|(i, allocs)| (i as u64, allocs[j]))
            .collect();
        samples.sort_by(|a, b| a.1.p_cons.total_cmp(&b.1.p_cons).then(a.0.cmp(&b.0)));
        for (rank, (trial, a)) in samples.into_iter().enumerate() {
            rows.push(CdfRow {
                preset: labels.preset.clone(),
                td_savings: labels.td_savings.clone(),
                load,
                trials,
                seed: cfg.seed,
                strategy,
                rank: rank + 1,
                trial,
                n_a: a.n_a,
                m_a: a.m_a,
                p_cons: a.p_cons,
                cdf: (rank + 1) as f64 / trials as f64,
            });
        }
    }
    Ok(CdfResult { rows })
}

/// Relative excess of the solver over the brute-force optimum at one load.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleGaps {
    pub load: f64,
    pub trials: usize,
    /// Per-trial gaps with rounding, in trial order.
    pub round: Vec<f64>,
    /// Per-trial gaps with the ceil-floor operator, in trial order.
    pub ceil_floor: Vec<f64>,
}

impl OracleGaps {
    pub fn max_round(&self) -> f64 {
        self.round.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_ceil_floor(&self) -> f64 {
        self.ceil_floor.iter().copied().fold(0.0, f64::max)
    }

    pub fn median_round(&self) -> f64 {
        median(&self.round)
    }

    pub fn median_ceil_floor(&self) -> f64 {
        median(&self.ceil_floor)
    }
}

/// Median of a non-empty sample (mean of the two middle values when even).
pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

pub fn oracle_check(
    cfg: &ScenarioConfig,
    cp: &ConsumptionParams,
    solver: &SolverConfig,
    load: f64,
    trials: usize,
) -> Result<OracleGaps> {
    check_load(load)?;
    let gaps: Vec<(f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let s = cfg.draw(i)?.at_load(load)?;
            let best = Strategy::Oracle.evaluate(&s, cp, solver)?.allocation.p_cons;
            let round = Strategy::Optimized.evaluate(&s, cp, solver)?.allocation.p_cons;
            let cf = Strategy::OptimizedCeilFloor.evaluate(&s, cp, solver)?.allocation.p_cons;
            Ok(((round - best) / best, (cf - best) / best))
        })
        .collect::<Result<_>>()?;
    Ok(OracleGaps {
        load,
        trials,
        round: gaps.iter().map(|g| g.0).collect(),
        ceil_floor: gaps.iter().map(|g| g.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_loads_end_at_one() {
        let l = even_loads(4);
        assert_eq!(l, vec![0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn optimized_is_always_included() {
        assert_eq!(
            with_optimized(&[Strategy::RushToMute]),
            vec![Strategy::Optimized, Strategy::RushToMute]
        );
        assert_eq!(
            with_optimized(&[Strategy::Optimized, Strategy::Optimized]),
            vec![Strategy::Optimized]
        );
    }

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }
}
