//! The feasible domain in the `(x, y) = (N/N_a, M_a)` plane.
//!
//! The per-antenna power cap is quadratic in `y`; its larger root
//!
//! ```text
//! y_min(x) = K/2 + sqrt(K² + 4 Σ_k ρ_k⁻¹ (2^{R_k x} - 1)) / 2,   ρ_k = P_max β_k / σ_k²
//! ```
//!
//! is the curved lower edge of `D = {1 <= x, y <= M, y >= y_min(x)}`.

use crate::link_model::{self, point_is_feasible, Scenario};
use crate::math::{ceil, exp, ln, sqrt, LN_2};
use crate::{Error, Result};

/// Above this many bits per active slot (`R_k x`) sums of `2^{R_k x}` are
/// accumulated in log space.
pub(crate) const LOG_DOMAIN_BITS: f64 = 500.0;

/// Bisection stops once the bracket is narrower than this (absolute).
pub const BISECTION_TOLERANCE: f64 = 1e-10;

/// A point of the continuous relaxation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DomainPoint {
    /// Slot compression `N / N_a`.
    pub x: f64,
    /// Continuous number of active antennas.
    pub y: f64,
}

impl DomainPoint {
    pub fn new(x: f64, y: f64) -> Self {
        DomainPoint { x, y }
    }
}

/// Which constraints of `D` a point violates.
///
/// Constraint 1 is `x >= 1`, constraint 2 is `y <= M`, constraint 3 is the
/// power cap `y >= y_min(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Region {
    /// Feasible.
    D,
    /// Only `x >= 1` violated.
    R1,
    /// `x >= 1` and `y <= M` violated.
    R2,
    /// `x >= 1` and the power cap violated.
    R3,
    /// Only `y <= M` violated.
    R4,
    /// Only the power cap violated.
    R5,
    /// `y <= M` and the power cap violated.
    R6,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::D => "D",
            Region::R1 => "R1",
            Region::R2 => "R2",
            Region::R3 => "R3",
            Region::R4 => "R4",
            Region::R5 => "R5",
            Region::R6 => "R6",
        }
    }
}

impl core::fmt::Display for Region {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `ln Σ_k c_k (2^{R_k x} - 1)` over users with `R_k > 0`, or `-inf` when
/// nobody has traffic. Stays finite well past the `f64` overflow of `2^{R x}`.
pub(crate) fn ln_weighted_sum(s: &Scenario, x: f64, weight: impl Fn(usize) -> f64) -> f64 {
    let mut top = f64::NEG_INFINITY;
    for &r in s.rates.iter().filter(|&&r| r > 0.0) {
        top = top.max(r * x);
    }
    if top == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if top <= LOG_DOMAIN_BITS {
        let sum: f64 = (0..s.k)
            .filter(|&i| s.rates[i] > 0.0)
            .map(|i| weight(i) * crate::math::exp2_m1(s.rates[i] * x))
            .sum();
        return ln(sum);
    }
    let shift = top * LN_2;
    let sum: f64 = (0..s.k)
        .filter(|&i| s.rates[i] > 0.0)
        .map(|i| weight(i) * (exp(s.rates[i] * x * LN_2 - shift) - exp(-shift)))
        .sum();
    shift + ln(sum)
}

/// Smallest continuous antenna count meeting the power cap at compression `x`.
pub fn y_min(x: f64, s: &Scenario) -> f64 {
    let k = s.k as f64;
    let ln_psi = ln_weighted_sum(s, x, |i| s.noise_powers[i] / (s.p_max * s.betas[i]));
    if ln_psi == f64::NEG_INFINITY {
        return k;
    }
    if ln_psi < 600.0 {
        let psi = exp(ln_psi);
        return k / 2.0 + sqrt(k * k + 4.0 * psi) / 2.0;
    }
    // sqrt(K² + 4ψ) = 2 sqrt(ψ) sqrt(1 + K²/(4ψ)) and K²/(4ψ) is below f64 resolution.
    k / 2.0 + exp(ln_psi / 2.0)
}

/// `M_a,min`: fewest antennas meeting the power cap with every slot active.
///
/// Returns `k` for an idle scenario and at least `k + 1` otherwise.
pub fn min_active_antennas(s: &Scenario) -> Result<usize> {
    if s.is_idle() {
        return Ok(s.k);
    }
    if !link_model::is_feasible(s) {
        return Err(infeasible(s));
    }
    let continuous = y_min(1.0, s);
    let mut m_a = (ceil(continuous) as usize).clamp(s.k + 1, s.m);
    // The closed form can land a hair above an integer that satisfies the cap
    // within tolerance; settle on the discrete predicate.
    while m_a > s.k + 1 && point_is_feasible(s, s.n, m_a - 1) {
        m_a -= 1;
    }
    while !point_is_feasible(s, s.n, m_a) {
        if m_a == s.m {
            return Err(infeasible(s));
        }
        m_a += 1;
    }
    Ok(m_a)
}

/// `x_max`: the largest slot compression at which all `M` antennas still
/// meet the power cap, i.e. the root of `y_min(x) = M`.
///
/// Found by bisection; the returned end of the bracket is on the feasible
/// side. Idle scenarios give `+inf`.
pub fn max_slot_compression(s: &Scenario) -> Result<f64> {
    if s.is_idle() {
        return Ok(f64::INFINITY);
    }
    if !link_model::is_feasible(s) {
        return Err(infeasible(s));
    }
    let m = s.m as f64;
    let below = |x: f64| y_min(x, s) <= m;
    if !below(1.0) {
        // Feasible only through the tolerance: the boundary sits at x = 1.
        return Ok(1.0);
    }
    let (lo, hi) = bracket_upward(1.0, below);
    Ok(bisect(lo, hi, below))
}

/// `N_a,min`: fewest active slots meeting the power cap with all antennas on.
///
/// Idle scenarios need no slot and return 0.
pub fn min_active_slots(s: &Scenario) -> Result<usize> {
    if s.is_idle() {
        return Ok(0);
    }
    let x_max = max_slot_compression(s)?;
    let mut n_a = (ceil(s.n as f64 / x_max) as usize).clamp(1, s.n);
    while n_a > 1 && point_is_feasible(s, n_a - 1, s.m) {
        n_a -= 1;
    }
    while !point_is_feasible(s, n_a, s.m) {
        if n_a == s.n {
            return Err(infeasible(s));
        }
        n_a += 1;
    }
    Ok(n_a)
}

/// `κ_max`: the rate scaling at which `rates = κ · base_rates` needs every
/// slot and antenna at exactly `P_max`.
///
/// Only `betas`, `noise_powers`, `m`, `k` and `p_max` of `s` are used; its
/// own rates are ignored. Returns 0 when `M = K` (no array gain left).
pub fn max_rate_scaling(s: &Scenario, base_rates: &[f64]) -> Result<f64> {
    if base_rates.len() != s.k {
        return Err(Error::invalid("base_rates", "must hold exactly k entries"));
    }
    if !base_rates.iter().all(|&r| r >= 0.0 && r.is_finite()) || base_rates.iter().all(|&r| r == 0.0) {
        return Err(Error::invalid("base_rates", "must be non-negative with a positive sum"));
    }
    if s.m <= s.k {
        return Ok(0.0);
    }
    let m = s.m as f64;
    let mut probe = s.clone();
    let mut fits = |kappa: f64| {
        for (r, base) in probe.rates.iter_mut().zip(base_rates) {
            *r = kappa * base;
        }
        y_min(1.0, &probe) <= m
    };
    let (lo, hi) = bracket_upward(0.0, &mut fits);
    Ok(bisect(lo, hi, fits))
}

/// Sufficient condition for a convex `D`: `ρ_k >= 2/K` for every user.
pub fn snr_condition_holds(s: &Scenario) -> bool {
    let threshold = 2.0 / s.k as f64;
    s.snr_at_full_power().all(|rho| rho >= threshold)
}

/// Tags a point of the extended plane (`y > k`) with its region.
///
/// The combination `x < 1, y > M, y < y_min(x)` cannot occur for feasible
/// scenarios (`y_min` is increasing and `y_min(1) <= M`); if it shows up it
/// is reported as [`Region::R2`].
pub fn classify_region(p: DomainPoint, s: &Scenario) -> Region {
    let m = s.m as f64;
    let left = p.x < 1.0;
    let above = p.y > m;
    let under = p.y < y_min(p.x, s);
    match (left, above, under) {
        (false, false, false) => Region::D,
        (true, false, false) => Region::R1,
        (true, true, false) => Region::R2,
        (true, false, true) => Region::R3,
        (false, true, false) => Region::R4,
        (false, false, true) => Region::R5,
        (false, true, true) => Region::R6,
        (true, true, true) => Region::R2,
    }
}

fn infeasible(s: &Scenario) -> Error {
    Error::Infeasible {
        p_a_min: link_model::min_per_antenna_power(s),
        p_max: s.p_max,
    }
}

/// Expands `[lo, hi]` until `ok(hi)` fails, starting from `ok(start)`.
fn bracket_upward(start: f64, mut ok: impl FnMut(f64) -> bool) -> (f64, f64) {
    let mut lo = start;
    let mut step = 1.0;
    let mut hi = start + step;
    while ok(hi) {
        lo = hi;
        step *= 2.0;
        hi = start + step;
        if !hi.is_finite() {
            break;
        }
    }
    (lo, hi)
}

/// Shrinks `[lo, hi]` with `ok(lo)` and `!ok(hi)`; returns the `ok` end.
fn bisect(mut lo: f64, mut hi: f64, mut ok: impl FnMut(f64) -> bool) -> f64 {
    while hi - lo > BISECTION_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
