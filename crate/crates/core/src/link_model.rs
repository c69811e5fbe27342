//! Zero-forcing downlink under i.i.d. Rayleigh fading.
//!
//! Rates are normalized: bits per OFDM symbol and per subcarrier, averaged
//! over the frame. With `x = N / N_a` the per-user power needed to deliver
//! `R_k` is `σ_k² (2^{R_k x} - 1)`, and the mean of the inverse Wishart
//! matrix spreads the total over `M_a (M_a - K)` antenna-power units.

use alloc::vec::Vec;

use crate::math::{exp2_m1, ln_1p, LN_2};
use crate::{Error, Result, FEASIBILITY_RTOL};

/// Per-user radio state and system dimensions.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scenario {
    /// Number of base-station antennas `M`.
    pub m: usize,
    /// Time slots per frame `N`.
    pub n: usize,
    /// Number of users `K`.
    pub k: usize,
    /// Per-antenna transmit power cap (W).
    pub p_max: f64,
    /// Large-scale fading coefficient of each user.
    pub betas: Vec<f64>,
    /// Noise power at each user (W).
    pub noise_powers: Vec<f64>,
    /// Target normalized rate of each user.
    pub rates: Vec<f64>,
}

impl Scenario {
    pub fn new(
        m: usize,
        n: usize,
        p_max: f64,
        betas: Vec<f64>,
        noise_powers: Vec<f64>,
        rates: Vec<f64>,
    ) -> Result<Self> {
        let s = Scenario {
            m,
            n,
            k: betas.len(),
            p_max,
            betas,
            noise_powers,
            rates,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("k", "at least one user is required"));
        }
        if self.m < self.k {
            return Err(Error::invalid("m", "needs at least as many antennas as users"));
        }
        if self.n == 0 {
            return Err(Error::invalid("n", "needs at least one time slot"));
        }
        if !(self.p_max > 0.0 && self.p_max.is_finite()) {
            return Err(Error::invalid("p_max", "must be positive and finite"));
        }
        if self.betas.len() != self.k || self.noise_powers.len() != self.k || self.rates.len() != self.k {
            return Err(Error::invalid(
                "betas, noise_powers, rates",
                "must each hold exactly k entries",
            ));
        }
        if !self.betas.iter().all(|&b| b > 0.0 && b.is_finite()) {
            return Err(Error::invalid("betas", "must be positive and finite"));
        }
        if !self.noise_powers.iter().all(|&s| s > 0.0 && s.is_finite()) {
            return Err(Error::invalid("noise_powers", "must be positive and finite"));
        }
        if !self.rates.iter().all(|&r| r >= 0.0 && r.is_finite()) {
            return Err(Error::invalid("rates", "must be finite and non-negative"));
        }
        Ok(())
    }

    /// True when no user asks for any rate.
    pub fn is_idle(&self) -> bool {
        self.rates.iter().all(|&r| r == 0.0)
    }

    /// `ρ_k = P_max β_k / σ_k²`, the single-antenna full-power SNR of user k.
    pub fn snr_at_full_power(&self) -> impl Iterator<Item = f64> + '_ {
        self.betas
            .iter()
            .zip(&self.noise_powers)
            .map(move |(b, s)| self.p_max * b / s)
    }

    /// Returns a copy with every rate replaced.
    pub fn with_rates(&self, rates: Vec<f64>) -> Result<Self> {
        let mut s = self.clone();
        s.rates = rates;
        s.validate()?;
        Ok(s)
    }
}

/// A candidate operating point and what it costs.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Allocation {
    pub n_a: usize,
    pub m_a: usize,
    /// Per-antenna transmit power (W).
    pub p_a: f64,
    /// Consumed power (W).
    pub p_cons: f64,
    pub feasible: bool,
}

impl Allocation {
    /// Every resource off: only the sleep consumption remains.
    pub fn shutdown(p_sleep: f64) -> Self {
        Allocation {
            n_a: 0,
            m_a: 0,
            p_a: 0.0,
            p_cons: p_sleep,
            feasible: true,
        }
    }
}

/// Power user `k` needs on an active slot to reach `rate` when only a
/// fraction `slot_ratio` of the slots is active.
pub fn per_user_power(rate: f64, slot_ratio: f64, noise: f64) -> Result<f64> {
    if rate == 0.0 {
        return Ok(0.0);
    }
    if !(0.0..=1.0).contains(&slot_ratio) {
        return Err(Error::domain("slot_ratio", slot_ratio, "must lie in (0, 1]"));
    }
    if slot_ratio == 0.0 {
        return Err(Error::domain(
            "slot_ratio",
            0.0,
            "a positive rate over zero active slots needs infinite power",
        ));
    }
    Ok(noise * exp2_m1(rate / slot_ratio))
}

/// Inverse of [`per_user_power`]: frame-averaged rate delivered by `p_k`.
pub fn delivered_rate(p_k: f64, noise: f64, n_a: usize, n: usize) -> Result<f64> {
    if n_a > n || n == 0 {
        return Err(Error::domain("n_a", n_a as f64, "must not exceed n"));
    }
    Ok((n_a as f64 / n as f64) * ln_1p(p_k / noise) / LN_2)
}

/// `φ(x) = Σ_k (σ_k²/β_k)(2^{R_k x} - 1)`: the sum of inverse-gain-weighted
/// user powers at slot compression `x = N / N_a`.
pub(crate) fn weighted_power_sum(s: &Scenario, x: f64) -> f64 {
    s.rates
        .iter()
        .zip(&s.betas)
        .zip(&s.noise_powers)
        .filter(|((r, _), _)| **r > 0.0)
        .map(|((r, b), sigma2)| sigma2 / b * exp2_m1(r * x))
        .sum()
}

/// Per-antenna power at continuous `(x, y) = (N/N_a, M_a)`; needs `y > k`.
pub(crate) fn per_antenna_power_continuous(s: &Scenario, x: f64, y: f64) -> f64 {
    weighted_power_sum(s, x) / (y * (y - s.k as f64))
}

/// Per-antenna transmit power with `n_a` active slots and `m_a` active antennas.
pub fn per_antenna_power(s: &Scenario, n_a: usize, m_a: usize) -> Result<f64> {
    if n_a == 0 || n_a > s.n {
        return Err(Error::domain("n_a", n_a as f64, "must lie in [1, n]"));
    }
    if m_a <= s.k {
        return Err(Error::domain(
            "m_a",
            m_a as f64,
            "needs more active antennas than users (array-gain pole)",
        ));
    }
    if m_a > s.m {
        return Err(Error::domain("m_a", m_a as f64, "exceeds the number of antennas"));
    }
    Ok(per_antenna_power_continuous(s, s.n as f64 / n_a as f64, m_a as f64))
}

/// Total radiated power `M_a P_a = Σ p_k/β_k / (M_a - K)`.
pub fn total_transmit_power(s: &Scenario, n_a: usize, m_a: usize) -> Result<f64> {
    Ok(m_a as f64 * per_antenna_power(s, n_a, m_a)?)
}

/// Per-antenna power with every slot and antenna active, `P_a,min`.
///
/// The scenario is feasible iff this does not exceed `p_max`.
pub fn min_per_antenna_power(s: &Scenario) -> f64 {
    if s.m <= s.k {
        return if s.is_idle() { 0.0 } else { f64::INFINITY };
    }
    per_antenna_power_continuous(s, 1.0, s.m as f64)
}

/// True if `P_a,min <= p_max` (within [`FEASIBILITY_RTOL`]).
pub fn is_feasible(s: &Scenario) -> bool {
    power_within_cap(min_per_antenna_power(s), s.p_max)
}

pub(crate) fn power_within_cap(p_a: f64, p_max: f64) -> bool {
    p_a <= p_max * (1.0 + FEASIBILITY_RTOL)
}

/// Discrete feasibility of `(n_a, m_a)` under the per-antenna power cap.
pub fn point_is_feasible(s: &Scenario, n_a: usize, m_a: usize) -> bool {
    match per_antenna_power(s, n_a, m_a) {
        Ok(p) => power_within_cap(p, s.p_max),
        Err(_) => false,
    }
}
