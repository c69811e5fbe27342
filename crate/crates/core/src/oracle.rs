//! Exhaustive search over every integer `(n_a, m_a)`.
//!
//! Deliberately shares no evaluation code with the solver: per-antenna
//! power and consumption are recomputed inline here.

use alloc::vec::Vec;

use crate::link_model::{Allocation, Scenario};
use crate::power_model::ConsumptionParams;
use crate::{Error, Result, FEASIBILITY_RTOL};

/// Grid points searched by [`brute_force`] before it refuses.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// `2^t - 1`.
fn pow2_minus_one(t: f64) -> f64 {
    if t > 0.25 {
        libm::pow(2.0, t) - 1.0
    } else {
        libm::expm1(t * core::f64::consts::LN_2)
    }
}

/// Exact discrete minimizer with the default budget.
pub fn brute_force(s: &Scenario, cp: &ConsumptionParams) -> Result<Allocation> {
    brute_force_with_budget(s, cp, DEFAULT_BUDGET)
}

/// Exact discrete minimizer of the consumption over `[1, n] × [k+1, m]`.
///
/// Ties go to fewer antennas, then fewer slots. Idle scenarios return the
/// shutdown point.
pub fn brute_force_with_budget(s: &Scenario, cp: &ConsumptionParams, budget: u64) -> Result<Allocation> {
    s.validate()?;
    cp.validate()?;
    if s.rates.iter().all(|&r| r == 0.0) {
        return Ok(Allocation::shutdown(cp.p_sleep));
    }
    let points = s.n as u64 * s.m.saturating_sub(s.k) as u64;
    if points > budget {
        return Err(Error::BudgetExceeded { points, budget });
    }
    let (n, m, k) = (s.n as f64, s.m as f64, s.k as f64);

    // φ at every slot count.
    let phi: Vec<f64> = (1..=s.n)
        .map(|n_a| {
            let x = n / n_a as f64;
            (0..s.k)
                .filter(|&i| s.rates[i] > 0.0)
                .map(|i| s.noise_powers[i] / s.betas[i] * pow2_minus_one(s.rates[i] * x))
                .sum()
        })
        .collect();

    let cap = s.p_max * (1.0 + FEASIBILITY_RTOL);
    let mut best: Option<Allocation> = None;
    for m_a in s.k + 1..=s.m {
        let ma = m_a as f64;
        let gain = ma * (ma - k);
        for n_a in 1..=s.n {
            let p_a = phi[n_a - 1] / gain;
            if !(p_a <= cap) {
                continue;
            }
            let p_cons = (n_a as f64 / n) * ma * (cp.p0 / m + cp.gamma * libm::pow(p_a, cp.alpha))
                + (ma / m) * cp.p1
                + cp.p_sleep;
            // Strict improvement keeps the first point visited: fewest antennas, then fewest slots.
            if best.is_none_or(|b| p_cons < b.p_cons) {
                best = Some(Allocation {
                    n_a,
                    m_a,
                    p_a,
                    p_cons,
                    feasible: true,
                });
            }
        }
    }
    best.ok_or(Error::Infeasible {
        p_a_min: phi[s.n - 1] / (m * (m - k)),
        p_max: s.p_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::max_rate_scaling;
    use crate::power_model::{consumed_power, Configuration, TdSavings};
    use alloc::vec;
    use approx::assert_relative_eq;

    fn fig2(rate: f64) -> Scenario {
        Scenario::new(32, 100, 1.0, vec![1.0; 4], vec![0.1; 4], vec![rate; 4]).unwrap()
    }

    #[test]
    fn idle_is_shutdown() {
        let cp = Configuration::Aau64T64R.consumption_params(TdSavings::On);
        assert_eq!(brute_force(&fig2(0.0), &cp).unwrap(), Allocation::shutdown(cp.p_sleep));
    }

    #[test]
    fn full_load_has_one_feasible_point() {
        let cp = Configuration::Aau64T64R.consumption_params(TdSavings::Off);
        let base = fig2(1.0);
        let kappa = max_rate_scaling(&base, &[0.25; 4]).unwrap();
        let a = brute_force(&base.with_rates(vec![kappa * 0.25; 4]).unwrap(), &cp).unwrap();
        assert_eq!((a.n_a, a.m_a), (100, 32));
        assert_relative_eq!(a.p_a, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn result_agrees_with_consumption_model() {
        let cp = Configuration::Aau64T64R.consumption_params(TdSavings::On);
        let s = fig2(2.0);
        let a = brute_force(&s, &cp).unwrap();
        let p = consumed_power(&cp, a.n_a, s.n, a.m_a, s.m, a.p_a).unwrap();
        assert_relative_eq!(a.p_cons, p, max_relative = 1e-13);
    }

    #[test]
    fn budget_is_enforced() {
        let cp = Configuration::Aau64T64R.consumption_params(TdSavings::On);
        let err = brute_force_with_budget(&fig2(1.0), &cp, 100).unwrap_err();
        assert_eq!(
            err,
            Error::BudgetExceeded {
                points: 2800,
                budget: 100
            }
        );
    }

    #[test]
    fn infeasible_is_reported() {
        let cp = Configuration::Aau64T64R.consumption_params(TdSavings::On);
        assert!(matches!(brute_force(&fig2(20.0), &cp), Err(Error::Infeasible { .. })));
    }
}
