//! Parametric base-station power consumption.
//!
//! The frame-averaged consumption is written in the compact form
//!
//! ```text
//! P_cons = (N_a/N) M_a (P0/M + γ P_a^α) + (M_a/M) P1 + P_sleep
//! ```
//!
//! where the four coefficients fold together the power amplifiers (PA), the
//! analog front-end (AFE), the digital baseband (DBB) and the supply/cooling
//! overheads. [`derive_consumption_params`] performs that folding from
//! hardware-level inputs; [`Configuration`] carries published coefficient
//! sets for three radio units.

use core::fmt;
use core::str::FromStr;

use crate::math::powf;
use crate::{Error, Result};

/// Power amplifier model: a static part plus a dynamic part growing as `p^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PaParams {
    /// Maximum PA output power (W).
    pub p_max: f64,
    /// Exponent of the dynamic term, in `[0.5, 1]`.
    pub alpha: f64,
    /// Weight of the static consumption, in `[0, 1]`.
    pub xi: f64,
    /// Maximum PA efficiency, in `(0, 1]`.
    pub eta_pa_max: f64,
}

impl PaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_max > 0.0 && self.p_max.is_finite()) {
            return Err(Error::invalid("pa.p_max", "must be positive and finite"));
        }
        if !(0.5..=1.0).contains(&self.alpha) {
            return Err(Error::invalid("pa.alpha", "must lie in [0.5, 1]"));
        }
        if !(0.0..=1.0).contains(&self.xi) {
            return Err(Error::invalid("pa.xi", "must lie in [0, 1]"));
        }
        if !(self.eta_pa_max > 0.0 && self.eta_pa_max <= 1.0) {
            return Err(Error::invalid("pa.eta_pa_max", "must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Consumption at zero output power (the static term).
    fn idle_consumption(&self) -> f64 {
        self.xi * powf(self.p_max, self.alpha) / self.eta_pa_max
    }
}

/// Instantaneous PA consumption at output power `p`.
pub fn pa_consumption(p: f64, pa: &PaParams) -> Result<f64> {
    pa.validate()?;
    if !(0.0..=pa.p_max).contains(&p) {
        return Err(Error::domain("p", p, "PA output power must lie in [0, P_max]"));
    }
    let dynamic = (1.0 - pa.xi) * powf(pa.p_max, 1.0 - pa.alpha) * powf(p, pa.alpha) / pa.eta_pa_max;
    Ok(pa.idle_consumption() + dynamic)
}

/// Hardware sub-component inputs from which [`ConsumptionParams`] is derived.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComponentParams {
    pub pa: PaParams,
    /// Downlink share of the frame, in `(0, 1]`.
    pub tau_dl: f64,
    /// Uplink share of the frame; `tau_dl + tau_ul <= 1`.
    pub tau_ul: f64,
    /// Reference-signal share of the downlink time, in `(0, 1)`.
    pub tau_sig: f64,
    /// Reference-signal output power relative to `P_max`, in `(0, 1)`.
    pub zeta_sig: f64,
    /// PA reduction factor during micro-DTX.
    pub delta_pa_dtx: f64,
    pub delta_pa_idle: f64,
    pub delta_pa_sleep: f64,
    pub delta_trx_idle: f64,
    pub delta_trx_sleep: f64,
    pub delta_phy_idle: f64,
    /// Per-chain TX/RX consumption (W).
    pub p_trx: f64,
    /// Always-on AFE consumption (W).
    pub p_misc: f64,
    /// Data-link-layer baseband consumption (W).
    pub p_link_ref: f64,
    /// Physical-layer baseband consumption at reference load (W).
    pub p_phy_ref: f64,
    pub eta_sc_pa: f64,
    pub eta_sc_afe: f64,
    pub eta_sc_dbb: f64,
    /// Total number of antennas / TX-RX chains.
    pub m_total: usize,
}

impl ComponentParams {
    pub fn validate(&self) -> Result<()> {
        self.pa.validate()?;
        let unit = |name, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::invalid(name, "must lie in [0, 1]"))
            }
        };
        let efficiency = |name, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(Error::invalid(name, "must lie in (0, 1]"))
            }
        };
        let watts = |name, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, "must be a finite non-negative power"))
            }
        };
        efficiency("tau_dl", self.tau_dl)?;
        unit("tau_ul", self.tau_ul)?;
        if self.tau_dl + self.tau_ul > 1.0 {
            return Err(Error::invalid("tau_ul", "tau_dl + tau_ul must not exceed 1"));
        }
        if !(self.tau_sig > 0.0 && self.tau_sig < 1.0) {
            return Err(Error::invalid("tau_sig", "must lie in (0, 1)"));
        }
        if !(self.zeta_sig > 0.0 && self.zeta_sig < 1.0) {
            return Err(Error::invalid("zeta_sig", "must lie in (0, 1)"));
        }
        unit("delta_pa_dtx", self.delta_pa_dtx)?;
        unit("delta_pa_idle", self.delta_pa_idle)?;
        unit("delta_pa_sleep", self.delta_pa_sleep)?;
        unit("delta_trx_idle", self.delta_trx_idle)?;
        unit("delta_trx_sleep", self.delta_trx_sleep)?;
        unit("delta_phy_idle", self.delta_phy_idle)?;
        watts("p_trx", self.p_trx)?;
        watts("p_misc", self.p_misc)?;
        watts("p_link_ref", self.p_link_ref)?;
        watts("p_phy_ref", self.p_phy_ref)?;
        efficiency("eta_sc_pa", self.eta_sc_pa)?;
        efficiency("eta_sc_afe", self.eta_sc_afe)?;
        efficiency("eta_sc_dbb", self.eta_sc_dbb)?;
        if self.m_total == 0 {
            return Err(Error::invalid("m_total", "must be at least 1"));
        }
        Ok(())
    }
}

/// The compact four-coefficient consumption model plus the PA exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConsumptionParams {
    /// PA dynamic coefficient (W per W^α).
    pub gamma: f64,
    /// Load-dependent static consumption of all PAs (W).
    pub p0: f64,
    /// Per-frame consumption of all powered chains (W).
    pub p1: f64,
    /// Consumption with every antenna asleep (W).
    pub p_sleep: f64,
    pub alpha: f64,
}

impl ConsumptionParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma", self.gamma),
            ("p0", self.p0),
            ("p1", self.p1),
            ("p_sleep", self.p_sleep),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, "must be finite and non-negative"));
            }
        }
        if !(0.5..=1.0).contains(&self.alpha) {
            return Err(Error::invalid("alpha", "must lie in [0.5, 1]"));
        }
        Ok(())
    }
}

/// Folds PA, AFE, DBB and supply/cooling sub-models into [`ConsumptionParams`].
pub fn derive_consumption_params(c: &ComponentParams) -> Result<ConsumptionParams> {
    c.validate()?;
    let pa = &c.pa;
    let m = c.m_total as f64;
    let data_share = c.tau_dl * (1.0 - c.tau_sig);
    let pa_idle = pa.idle_consumption();
    let pa_signal = pa_consumption(c.zeta_sig * pa.p_max, pa)?;

    let gamma = data_share * (1.0 - pa.xi) * powf(pa.p_max, 1.0 - pa.alpha) / (c.eta_sc_pa * pa.eta_pa_max);
    let p0 = m * data_share * pa_idle * (1.0 - c.delta_pa_dtx) / c.eta_sc_pa;

    // Per-active-antenna PA and AFE consumption that does not scale with N_a.
    let pa_per_antenna = c.tau_dl * c.tau_sig * pa_signal
        + data_share * pa_idle * c.delta_pa_dtx
        + (1.0 - c.tau_dl) * pa_idle * c.delta_pa_idle
        - pa_idle * c.delta_pa_sleep;
    let duplex = c.tau_dl + c.tau_ul;
    let afe_per_antenna = c.p_trx * (duplex + (2.0 - duplex) * c.delta_trx_idle - 2.0 * c.delta_trx_sleep);
    let p1 = m * (pa_per_antenna / c.eta_sc_pa + afe_per_antenna / c.eta_sc_afe);

    let afe_sleep = c.p_misc + 2.0 * m * c.p_trx * c.delta_trx_sleep;
    let dbb = c.p_link_ref + c.p_phy_ref * (duplex + (2.0 - duplex) * c.delta_phy_idle);
    let p_sleep = m * c.delta_pa_sleep * pa_idle / c.eta_sc_pa + afe_sleep / c.eta_sc_afe + dbb / c.eta_sc_dbb;

    let cp = ConsumptionParams {
        gamma,
        p0,
        p1,
        p_sleep,
        alpha: pa.alpha,
    };
    cp.validate()?;
    Ok(cp)
}

/// Frame-averaged consumption for `n_a` of `n` slots and `m_a` of `m`
/// antennas transmitting at `p_a` watts each.
///
/// `m_a = 0` is accepted only together with `n_a = 0` (full shutdown).
pub fn consumed_power(cp: &ConsumptionParams, n_a: usize, n: usize, m_a: usize, m: usize, p_a: f64) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::invalid("n, m", "frame and array sizes must be positive"));
    }
    if n_a > n {
        return Err(Error::domain("n_a", n_a as f64, "exceeds the number of slots"));
    }
    if m_a > m {
        return Err(Error::domain("m_a", m_a as f64, "exceeds the number of antennas"));
    }
    if m_a == 0 && n_a > 0 {
        return Err(Error::domain("m_a", 0.0, "no active antenna while slots are active"));
    }
    if !(p_a >= 0.0) {
        return Err(Error::domain("p_a", p_a, "transmit power must be non-negative"));
    }
    let slot_ratio = n_a as f64 / n as f64;
    let m_a = m_a as f64;
    let m = m as f64;
    Ok(slot_ratio * m_a * (cp.p0 / m + cp.gamma * powf(p_a, cp.alpha)) + (m_a / m) * cp.p1 + cp.p_sleep)
}

/// Whether the radio unit uses PA micro-DTX and AFE idle modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum TdSavings {
    /// `δ_PA^dtx = 1`, `δ_TRX^idle = 1`.
    Off,
    /// `δ_PA^dtx = 0.25`, `δ_TRX^idle = 0.5`.
    On,
}

impl TdSavings {
    pub fn as_str(self) -> &'static str {
        match self {
            TdSavings::Off => "off",
            TdSavings::On => "on",
        }
    }
}

impl fmt::Display for TdSavings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TdSavings {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "off" => Ok(TdSavings::Off),
            "on" => Ok(TdSavings::On),
            _ => Err(Error::invalid("td-savings", "expected `off` or `on`")),
        }
    }
}

/// Published radio-unit configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Configuration {
    /// 4G LTE FDD remote radio unit, 4 antennas.
    #[cfg_attr(feature = "serde", serde(rename = "4t4r"))]
    Rru4T4R,
    /// 5G NR TDD remote radio unit, 8 antennas.
    #[cfg_attr(feature = "serde", serde(rename = "8t8r"))]
    Rru8T8R,
    /// 5G NR TDD active antenna unit, 64 antennas.
    #[cfg_attr(feature = "serde", serde(rename = "64t64r"))]
    Aau64T64R,
}

/// Everything a [`Configuration`] pins down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetValues {
    pub m: usize,
    pub k: usize,
    pub carrier_ghz: f64,
    pub bandwidth_hz: f64,
    pub p_max: f64,
    /// Total transmit power used to map SNR samples to large-scale fading.
    pub total_tx_power_ref: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// `P0` for savings off / on.
    pub p0: [f64; 2],
    /// `P1` for savings off / on.
    pub p1: [f64; 2],
    pub p_sleep: f64,
}

impl Configuration {
    pub const ALL: [Configuration; 3] = [Configuration::Rru4T4R, Configuration::Rru8T8R, Configuration::Aau64T64R];

    pub fn values(self) -> PresetValues {
        match self {
            Configuration::Rru4T4R => PresetValues {
                m: 4,
                k: 2,
                carrier_ghz: 1.8,
                bandwidth_hz: 20e6,
                p_max: 40.0,
                total_tx_power_ref: 160.0,
                alpha: 0.75,
                gamma: 5.33,
                p0: [0.0, 34.69],
                p1: [149.40, 114.71],
                p_sleep: 233.55,
            },
            Configuration::Rru8T8R => PresetValues {
                m: 8,
                k: 4,
                carrier_ghz: 3.5,
                bandwidth_hz: 100e6,
                p_max: 40.0,
                total_tx_power_ref: 32.0,
                alpha: 0.75,
                gamma: 5.38,
                p0: [0.0, 69.98],
                p1: [229.47, 103.26],
                p_sleep: 363.78,
            },
            Configuration::Aau64T64R => PresetValues {
                m: 64,
                k: 8,
                carrier_ghz: 3.5,
                bandwidth_hz: 100e6,
                p_max: 3.125,
                total_tx_power_ref: 20.0,
                alpha: 0.75,
                gamma: 3.50,
                p0: [0.0, 53.92],
                p1: [341.57, 161.95],
                p_sleep: 550.23,
            },
        }
    }

    pub fn consumption_params(self, savings: TdSavings) -> ConsumptionParams {
        let v = self.values();
        let i = match savings {
            TdSavings::Off => 0,
            TdSavings::On => 1,
        };
        ConsumptionParams {
            gamma: v.gamma,
            p0: v.p0[i],
            p1: v.p1[i],
            p_sleep: v.p_sleep,
            alpha: v.alpha,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Configuration::Rru4T4R => "4t4r",
            Configuration::Rru8T8R => "8t8r",
            Configuration::Aau64T64R => "64t64r",
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "4t4r" => Ok(Configuration::Rru4T4R),
            "8t8r" => Ok(Configuration::Rru8T8R),
            "64t64r" => Ok(Configuration::Aau64T64R),
            _ => Err(Error::invalid("preset", "expected one of 4t4r, 8t8r, 64t64r")),
        }
    }
}
