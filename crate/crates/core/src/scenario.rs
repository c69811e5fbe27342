//! Seeded scenario generation.
//!
//! Every scenario index owns its own ChaCha20 stream (`seed` picks the key,
//! the index picks the stream), so draw `i` does not depend on how many
//! other draws were made or in which order.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::feasibility::max_rate_scaling;
use crate::link_model::Scenario;
use crate::math::powf;
use crate::power_model::Configuration;
use crate::{Error, Result};

/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Thermal noise power `T k_B B F` with `F` given in dB.
pub fn noise_power(bandwidth_hz: f64, temperature_k: f64, noise_figure_db: f64) -> Result<f64> {
    if !(bandwidth_hz > 0.0) {
        return Err(Error::domain("bandwidth", bandwidth_hz, "must be positive"));
    }
    if !(temperature_k > 0.0) {
        return Err(Error::domain("temperature", temperature_k, "must be positive"));
    }
    if !noise_figure_db.is_finite() {
        return Err(Error::domain("noise_figure", noise_figure_db, "must be finite"));
    }
    Ok(temperature_k * BOLTZMANN * bandwidth_hz * db_to_linear(noise_figure_db))
}

/// Large-scale fading that yields `snr` when `p_t_ref` is spread over `m`
/// antennas serving a single user.
pub fn beta_from_snr(snr: f64, noise: f64, p_t_ref: f64, m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::domain("m", m as f64, "needs at least two antennas"));
    }
    if !(snr >= 0.0) || !(noise > 0.0) || !(p_t_ref > 0.0) {
        return Err(Error::invalid(
            "snr, noise, p_t_ref",
            "need snr >= 0 and positive noise and power",
        ));
    }
    Ok(noise * snr / (p_t_ref * (m - 1) as f64))
}

pub fn db_to_linear(db: f64) -> f64 {
    powf(10.0, db / 10.0)
}

/// Distribution of the per-user SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "kebab-case"))]
pub enum SnrDistribution {
    /// Uniform in dB over `[lo_db, hi_db]`.
    UniformDb { lo_db: f64, hi_db: f64 },
    /// Every user at the same SNR.
    Constant { db: f64 },
}

impl Default for SnrDistribution {
    fn default() -> Self {
        SnrDistribution::UniformDb {
            lo_db: 0.0,
            hi_db: 30.0,
        }
    }
}

impl SnrDistribution {
    fn validate(&self) -> Result<()> {
        match *self {
            SnrDistribution::UniformDb { lo_db, hi_db } if lo_db.is_finite() && hi_db.is_finite() && lo_db <= hi_db => {
                Ok(())
            }
            SnrDistribution::Constant { db } if db.is_finite() => Ok(()),
            _ => Err(Error::invalid(
                "snr_distribution",
                "bounds must be finite with lo <= hi",
            )),
        }
    }

    fn sample_db(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            SnrDistribution::UniformDb { lo_db, hi_db } => lo_db + (hi_db - lo_db) * rng.random::<f64>(),
            SnrDistribution::Constant { db } => db,
        }
    }
}

/// Everything needed to draw scenarios.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScenarioConfig {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub p_max: f64,
    pub bandwidth_hz: f64,
    #[cfg_attr(feature = "serde", serde(default = "default_temperature"))]
    pub noise_temperature_k: f64,
    #[cfg_attr(feature = "serde", serde(default = "default_noise_figure"))]
    pub noise_figure_db: f64,
    /// Total transmit power used to map SNR to large-scale fading.
    pub total_tx_power_ref: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub snr: SnrDistribution,
    /// `κ / κ_max`.
    #[cfg_attr(feature = "serde", serde(default))]
    pub load: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub seed: u64,
}

#[cfg(feature = "serde")]
fn default_temperature() -> f64 {
    290.0
}

#[cfg(feature = "serde")]
fn default_noise_figure() -> f64 {
    9.0
}

impl ScenarioConfig {
    /// Dimensions and powers of a preset with `n` slots per frame, default
    /// noise (290 K, 9 dB), uniform 0 to 30 dB SNR, zero load and seed 0.
    pub fn from_preset(preset: Configuration, n: usize) -> Self {
        let v = preset.values();
        ScenarioConfig {
            m: v.m,
            n,
            k: v.k,
            p_max: v.p_max,
            bandwidth_hz: v.bandwidth_hz,
            noise_temperature_k: 290.0,
            noise_figure_db: 9.0,
            total_tx_power_ref: v.total_tx_power_ref,
            snr: SnrDistribution::default(),
            load: 0.0,
            seed: 0,
        }
    }

    pub fn with_load(mut self, load: f64) -> Self {
        self.load = load;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.m <= self.k {
            return Err(Error::invalid(
                "m, k",
                "need at least one user and more antennas than users",
            ));
        }
        if self.n == 0 {
            return Err(Error::invalid("n", "needs at least one time slot"));
        }
        if !(self.p_max > 0.0) || !(self.total_tx_power_ref > 0.0) {
            return Err(Error::invalid("p_max, total_tx_power_ref", "must be positive"));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::invalid("bandwidth_hz", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.load) {
            return Err(Error::invalid("load", "must lie in [0, 1]"));
        }
        self.snr.validate()
    }

    pub fn noise_power(&self) -> Result<f64> {
        noise_power(self.bandwidth_hz, self.noise_temperature_k, self.noise_figure_db)
    }

    /// Radio state of scenario `index`: fading and base rates, no load yet.
    pub fn draw(&self, index: u64) -> Result<RadioDraw> {
        self.validate()?;
        let noise = self.noise_power()?;
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let betas = (0..self.k)
            .map(|_| {
                beta_from_snr(
                    db_to_linear(self.snr.sample_db(&mut rng)),
                    noise,
                    self.total_tx_power_ref,
                    self.m,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let base_rates = loop {
            let u: Vec<f64> = (0..self.k).map(|_| rng.random::<f64>()).collect();
            let total: f64 = u.iter().sum();
            if total > 0.0 {
                break u.into_iter().map(|v| v / total).collect::<Vec<_>>();
            }
        };
        Ok(RadioDraw {
            m: self.m,
            n: self.n,
            p_max: self.p_max,
            betas,
            noise_powers: alloc::vec![noise; self.k],
            base_rates,
        })
    }

    /// Scenario `index` at the configured load.
    pub fn sample(&self, index: u64) -> Result<Scenario> {
        self.draw(index)?.at_load(self.load)
    }
}

/// Per-user fading and base rates (summing to 1) before load scaling.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RadioDraw {
    pub m: usize,
    pub n: usize,
    pub p_max: f64,
    pub betas: Vec<f64>,
    pub noise_powers: Vec<f64>,
    pub base_rates: Vec<f64>,
}

impl RadioDraw {
    /// The scenario with zero traffic.
    pub fn idle(&self) -> Result<Scenario> {
        Scenario::new(
            self.m,
            self.n,
            self.p_max,
            self.betas.clone(),
            self.noise_powers.clone(),
            alloc::vec![0.0; self.betas.len()],
        )
    }

    pub fn max_rate_scaling(&self) -> Result<f64> {
        max_rate_scaling(&self.idle()?, &self.base_rates)
    }

    /// Rates `load · κ_max · R_0`.
    pub fn at_load(&self, load: f64) -> Result<Scenario> {
        if !(0.0..=1.0).contains(&load) {
            return Err(Error::invalid("load", "must lie in [0, 1]"));
        }
        let idle = self.idle()?;
        if load == 0.0 {
            return Ok(idle);
        }
        let kappa = max_rate_scaling(&idle, &self.base_rates)?;
        idle.with_rates(self.base_rates.iter().map(|r| load * kappa * r).collect())
    }
}

/// Scenario `index` drawn from `cfg`.
pub fn sample_scenario(cfg: &ScenarioConfig, index: u64) -> Result<Scenario> {
    cfg.sample(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::{min_active_antennas, min_active_slots};
    use approx::assert_relative_eq;

    #[test]
    fn noise_examples() {
        assert_relative_eq!(
            noise_power(20e6, 290.0, 9.0).unwrap(),
            6.360793201074298e-13,
            max_relative = 1e-12
        );
        assert_eq!(noise_power(20e6, 290.0, 0.0).unwrap(), 290.0 * BOLTZMANN * 20e6);
        assert_relative_eq!(
            noise_power(40e6, 290.0, 9.0).unwrap(),
            2.0 * noise_power(20e6, 290.0, 9.0).unwrap(),
            max_relative = 1e-15
        );
        assert!(noise_power(0.0, 290.0, 9.0).is_err());
    }

    #[test]
    fn beta_examples() {
        assert_relative_eq!(
            beta_from_snr(1e3, 6.36e-13, 160.0, 4).unwrap(),
            1.325e-12,
            max_relative = 1e-12
        );
        assert_eq!(beta_from_snr(0.0, 6.36e-13, 160.0, 4).unwrap(), 0.0);
        assert!(beta_from_snr(10.0, 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn draws_are_reproducible_and_independent_of_order() {
        let cfg = ScenarioConfig::from_preset(Configuration::Rru8T8R, 100)
            .with_seed(11)
            .with_load(0.3);
        let a = cfg.sample(5).unwrap();
        let _ = cfg.sample(4).unwrap();
        assert_eq!(a, cfg.sample(5).unwrap());
        assert_ne!(a, cfg.sample(6).unwrap());
        assert_ne!(a, cfg.clone().with_seed(12).sample(5).unwrap());
    }

    #[test]
    fn base_rates_sum_to_one() {
        let cfg = ScenarioConfig::from_preset(Configuration::Aau64T64R, 100).with_seed(3);
        for i in 0..50 {
            let d = cfg.draw(i).unwrap();
            let sum: f64 = d.base_rates.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn load_extremes() {
        let cfg = ScenarioConfig::from_preset(Configuration::Rru4T4R, 100).with_seed(1);
        assert!(cfg.clone().with_load(0.0).sample(0).unwrap().is_idle());
        let full = cfg.with_load(1.0).sample(0).unwrap();
        assert_eq!(min_active_slots(&full).unwrap(), 100);
        assert_eq!(min_active_antennas(&full).unwrap(), 4);
    }

    #[test]
    fn invalid_load_rejected() {
        let cfg = ScenarioConfig::from_preset(Configuration::Rru4T4R, 100).with_load(1.5);
        assert!(cfg.sample(0).is_err());
    }
}
