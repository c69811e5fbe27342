//! Single-domain benchmark allocations and a tag for every way of
//! producing an allocation.

use core::fmt;
use core::str::FromStr;

use crate::feasibility::{min_active_antennas, min_active_slots};
use crate::link_model::{self, Allocation, Scenario};
use crate::oracle::brute_force;
use crate::power_model::ConsumptionParams;
use crate::solver::{allocation_at, solve, FinalizeMode, SolverConfig};
use crate::{Error, Result};

fn check(s: &Scenario, cp: &ConsumptionParams) -> Result<Option<Allocation>> {
    s.validate()?;
    cp.validate()?;
    if s.is_idle() {
        return Ok(Some(Allocation::shutdown(cp.p_sleep)));
    }
    if !link_model::is_feasible(s) {
        return Err(Error::Infeasible {
            p_a_min: link_model::min_per_antenna_power(s),
            p_max: s.p_max,
        });
    }
    Ok(None)
}

/// Every antenna on, fewest slots.
pub fn rush_to_sleep(s: &Scenario, cp: &ConsumptionParams) -> Result<Allocation> {
    if let Some(a) = check(s, cp)? {
        return Ok(a);
    }
    allocation_at(s, cp, min_active_slots(s)?, s.m)
}

/// Every slot on, fewest antennas.
pub fn rush_to_mute(s: &Scenario, cp: &ConsumptionParams) -> Result<Allocation> {
    if let Some(a) = check(s, cp)? {
        return Ok(a);
    }
    allocation_at(s, cp, s.n, min_active_antennas(s)?)
}

/// Every slot and antenna on, lowest transmit power.
pub fn awake_but_whisper(s: &Scenario, cp: &ConsumptionParams) -> Result<Allocation> {
    if let Some(a) = check(s, cp)? {
        return Ok(a);
    }
    allocation_at(s, cp, s.n, s.m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Strategy {
    /// Newton solve with rounding.
    Optimized,
    /// Newton solve with the ceil-floor operator.
    OptimizedCeilFloor,
    RushToSleep,
    RushToMute,
    AwakeButWhisper,
    /// Exhaustive discrete search.
    Oracle,
}

/// An allocation and the Newton iterations spent on it (0 when none ran).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub allocation: Allocation,
    pub iterations: usize,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Optimized,
        Strategy::OptimizedCeilFloor,
        Strategy::RushToSleep,
        Strategy::RushToMute,
        Strategy::AwakeButWhisper,
        Strategy::Oracle,
    ];

    /// The three single-domain benchmarks.
    pub const BENCHMARKS: [Strategy; 3] = [Strategy::RushToSleep, Strategy::RushToMute, Strategy::AwakeButWhisper];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Optimized => "optimized",
            Strategy::OptimizedCeilFloor => "optimized-ceil-floor",
            Strategy::RushToSleep => "rush-to-sleep",
            Strategy::RushToMute => "rush-to-mute",
            Strategy::AwakeButWhisper => "awake-but-whisper",
            Strategy::Oracle => "oracle",
        }
    }

    /// Runs the strategy. `cfg` only matters for the optimized variants;
    /// their finalization is fixed by the variant, not by `cfg`.
    pub fn evaluate(self, s: &Scenario, cp: &ConsumptionParams, cfg: &SolverConfig) -> Result<Evaluation> {
        let plain = |allocation| Evaluation {
            allocation,
            iterations: 0,
        };
        match self {
            Strategy::Optimized | Strategy::OptimizedCeilFloor => {
                let mode = if self == Strategy::Optimized {
                    FinalizeMode::Round
                } else {
                    FinalizeMode::CeilFloor
                };
                let r = solve(s, cp, &cfg.with_finalize(mode))?;
                Ok(Evaluation {
                    allocation: r.allocation,
                    iterations: r.iterations_2d + r.iterations_1d,
                })
            }
            Strategy::RushToSleep => rush_to_sleep(s, cp).map(plain),
            Strategy::RushToMute => rush_to_mute(s, cp).map(plain),
            Strategy::AwakeButWhisper => awake_but_whisper(s, cp).map(plain),
            Strategy::Oracle => brute_force(s, cp).map(plain),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or(Error::invalid("strategy", "unknown strategy tag"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::max_rate_scaling;
    use crate::power_model::{Configuration, TdSavings};
    use alloc::vec;
    use approx::assert_relative_eq;

    fn fig2(rate: f64) -> Scenario {
        Scenario::new(32, 100, 1.0, vec![1.0; 4], vec![0.1; 4], vec![rate; 4]).unwrap()
    }

    #[test]
    fn vertices_of_the_reference_setup() {
        let cp = Configuration::Aau64T64R.consumption_params(TdSavings::On);
        let s = fig2(4.0);
        let a = rush_to_sleep(&s, &cp).unwrap();
        assert_eq!((a.n_a, a.m_a), (36, 32));
        let b = rush_to_mute(&s, &cp).unwrap();
        assert_eq!((b.n_a, b.m_a), (100, 6));
        let c = awake_but_whisper(&s, &cp).unwrap();
        assert_eq!((c.n_a, c.m_a), (100, 32));
        assert_relative_eq!(c.p_a, 6.0 / 896.0, max_relative = 1e-14);
        assert!(a.feasible && b.feasible && c.feasible);
    }

    #[test]
    fn whisper_example() {
        let cp = Configuration::Rru4T4R.consumption_params(TdSavings::Off);
        let s = Scenario::new(4, 10, 40.0, vec![1.0; 2], vec![0.1; 2], vec![1.0; 2]).unwrap();
        assert_relative_eq!(awake_but_whisper(&s, &cp).unwrap().p_a, 0.025, max_relative = 1e-14);
    }

    #[test]
    fn idle_gives_sleep_everywhere() {
        let cp = Configuration::Rru8T8R.consumption_params(TdSavings::On);
        let s = fig2(0.0);
        for st in Strategy::ALL {
            let e = st.evaluate(&s, &cp, &SolverConfig::default()).unwrap();
            assert_eq!(e.allocation, Allocation::shutdown(cp.p_sleep), "{st}");
        }
    }

    #[test]
    fn full_load_all_agree() {
        let cp = Configuration::Aau64T64R.consumption_params(TdSavings::On);
        let base = fig2(1.0);
        let kappa = max_rate_scaling(&base, &[0.25; 4]).unwrap();
        let s = base.with_rates(vec![kappa * 0.25; 4]).unwrap();
        let reference = awake_but_whisper(&s, &cp).unwrap().p_cons;
        for st in Strategy::ALL {
            let p = st
                .evaluate(&s, &cp, &SolverConfig::default())
                .unwrap()
                .allocation
                .p_cons;
            assert_relative_eq!(p, reference, max_relative = 1e-9);
        }
    }

    #[test]
    fn tags_round_trip() {
        for st in Strategy::ALL {
            assert_eq!(st.as_str().parse::<Strategy>().unwrap(), st);
        }
        assert!("fastest".parse::<Strategy>().is_err());
    }
}
