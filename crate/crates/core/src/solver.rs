//! Unconstrained Newton solve, region dispatch onto the edges of the
//! feasible domain, and integer finalization.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::cost::{Objective, Restriction};
use crate::feasibility::{self, classify_region, snr_condition_holds, DomainPoint, Region};
use crate::link_model::{self, per_antenna_power, point_is_feasible, Allocation, Scenario};
use crate::math::{ceil, floor, round};
use crate::newton::{newton_1d, newton_2d, LineSearch, Stopping};
use crate::power_model::{consumed_power, ConsumptionParams};
use crate::{Error, Result};

/// How the continuous optimum becomes an integer allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FinalizeMode {
    /// Round both coordinates, then repair feasibility if needed.
    #[default]
    Round,
    /// Best feasible point among the (up to) four integer neighbours.
    CeilFloor,
}

impl FinalizeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FinalizeMode::Round => "round",
            FinalizeMode::CeilFloor => "ceil-floor",
        }
    }
}

impl fmt::Display for FinalizeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FinalizeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "round" => Ok(FinalizeMode::Round),
            "ceil-floor" | "ceil_floor" => Ok(FinalizeMode::CeilFloor),
            _ => Err(Error::invalid("finalize_mode", "expected `round` or `ceil-floor`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SolverConfig {
    /// Stop once the gradient (or derivative) magnitude is at most this.
    pub newton_tolerance: f64,
    pub max_iterations: usize,
    pub finalize_mode: FinalizeMode,
    pub line_search: LineSearch,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            newton_tolerance: 1e-8,
            max_iterations: 200,
            finalize_mode: FinalizeMode::Round,
            line_search: LineSearch::default(),
        }
    }
}

impl SolverConfig {
    pub fn with_finalize(mut self, mode: FinalizeMode) -> Self {
        self.finalize_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.newton_tolerance > 0.0) {
            return Err(Error::invalid("newton_tolerance", "must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations", "must be at least 1"));
        }
        self.line_search.validate()
    }

    /// Stopping rule handed to both Newton iterations.
    pub fn stopping(&self) -> Stopping {
        Stopping {
            tolerance: self.newton_tolerance,
            max_iterations: self.max_iterations,
            line_search: self.line_search,
        }
    }
}

/// Everything [`solve`] found on the way to its allocation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverReport {
    /// Continuous optimum `(x̄, ȳ)`; `None` for the idle shutdown.
    pub continuous: Option<DomainPoint>,
    /// Region of the unconstrained minimizer, followed by `D` when the
    /// optimum was moved onto an edge.
    pub region_path: Vec<Region>,
    /// Number of edge restrictions minimized and compared.
    pub candidates: usize,
    pub iterations_2d: usize,
    pub iterations_1d: usize,
    /// False when the unconstrained solve hit its iteration cap and every
    /// edge of the domain was searched instead.
    pub converged_2d: bool,
    /// `f(x̄, ȳ) + P_sleep`.
    pub cost_continuous: f64,
    pub finalize_mode: FinalizeMode,
    pub allocation: Allocation,
    /// Whether the SNR condition guaranteeing a convex domain holds.
    pub domain_convex: bool,
}

impl SolverReport {
    pub fn x_bar(&self) -> Option<f64> {
        self.continuous.map(|p| p.x)
    }

    pub fn y_bar(&self) -> Option<f64> {
        self.continuous.map(|p| p.y)
    }
}

/// Integer point `(n_a, m_a)` with its per-antenna power and consumption.
///
/// `n_a = m_a = 0` gives the shutdown allocation.
pub fn allocation_at(s: &Scenario, cp: &ConsumptionParams, n_a: usize, m_a: usize) -> Result<Allocation> {
    if n_a == 0 && m_a == 0 {
        return Ok(Allocation::shutdown(cp.p_sleep));
    }
    let p_a = per_antenna_power(s, n_a, m_a)?;
    Ok(Allocation {
        n_a,
        m_a,
        p_a,
        p_cons: consumed_power(cp, n_a, s.n, m_a, s.m, p_a)?,
        feasible: link_model::power_within_cap(p_a, s.p_max),
    })
}

/// Minimizes the consumption over the continuous relaxation of the
/// feasible domain, then turns the optimum into an integer allocation.
pub fn solve(s: &Scenario, cp: &ConsumptionParams, cfg: &SolverConfig) -> Result<SolverReport> {
    s.validate()?;
    cp.validate()?;
    cfg.validate()?;
    let domain_convex = snr_condition_holds(s);
    if s.is_idle() {
        return Ok(SolverReport {
            continuous: None,
            region_path: Vec::new(),
            candidates: 0,
            iterations_2d: 0,
            iterations_1d: 0,
            converged_2d: true,
            cost_continuous: cp.p_sleep,
            finalize_mode: cfg.finalize_mode,
            allocation: Allocation::shutdown(cp.p_sleep),
            domain_convex,
        });
    }
    if !link_model::is_feasible(s) {
        return Err(Error::Infeasible {
            p_a_min: link_model::min_per_antenna_power(s),
            p_max: s.p_max,
        });
    }

    let obj = Objective::new(s, cp);
    let stop = cfg.stopping();
    let (k, m) = (s.k as f64, s.m as f64);
    let x_max = feasibility::max_slot_compression(s)?;
    let n_a_min = feasibility::min_active_slots(s)?;
    let start = DomainPoint::new((s.n as f64 / n_a_min as f64).max(1.0), 0.5 * (k + m));

    let (unconstrained, iterations_2d, converged_2d) = match newton_2d(&obj, start, &stop) {
        Ok(out) => (out.point, out.iterations, true),
        Err(Error::NoConvergence { iterations, x, y, .. }) => (DomainPoint::new(x, y), iterations, false),
        Err(e) => return Err(e),
    };
    let region = classify_region(unconstrained, s);

    let edges: &[Restriction] = if !converged_2d {
        &[Restriction::FixX1, Restriction::FixYM, Restriction::OnCurve]
    } else {
        match region {
            Region::D => &[],
            Region::R1 => &[Restriction::FixX1],
            Region::R2 => &[Restriction::FixX1, Restriction::FixYM],
            Region::R3 => &[Restriction::FixX1, Restriction::OnCurve],
            Region::R4 => &[Restriction::FixYM],
            Region::R5 => &[Restriction::OnCurve],
            Region::R6 => &[Restriction::FixYM, Restriction::OnCurve],
        }
    };

    let (point, value, iterations_1d, region_path) = if edges.is_empty() {
        (
            unconstrained,
            obj.value(unconstrained.x, unconstrained.y),
            0,
            vec![region],
        )
    } else {
        let mut best: Option<(DomainPoint, f64)> = None;
        let mut iterations = 0;
        for &edge in edges {
            let (p, v, it) = minimize_edge(&obj, s, edge, unconstrained, x_max, &stop)?;
            iterations += it;
            if best.is_none_or(|(_, bv)| v < bv) {
                best = Some((p, v));
            }
        }
        let (p, v) = best.expect("at least one edge");
        (p, v, iterations, vec![region, Region::D])
    };

    let allocation = finalize_discrete(point.x, point.y, s, cp, cfg.finalize_mode)?;
    Ok(SolverReport {
        continuous: Some(point),
        region_path,
        candidates: edges.len(),
        iterations_2d,
        iterations_1d,
        converged_2d,
        cost_continuous: value + cp.p_sleep,
        finalize_mode: cfg.finalize_mode,
        allocation,
        domain_convex,
    })
}

/// Bounded minimum of `f` along one edge of the feasible domain, started
/// from the projection of `from`.
fn minimize_edge(
    obj: &Objective,
    s: &Scenario,
    edge: Restriction,
    from: DomainPoint,
    x_max: f64,
    stop: &Stopping,
) -> Result<(DomainPoint, f64, usize)> {
    let m = s.m as f64;
    match edge {
        Restriction::FixX1 => {
            let lo = feasibility::y_min(1.0, s).min(m);
            let out = newton_1d(obj, edge, lo, m, from.y, stop)?;
            Ok((DomainPoint::new(1.0, out.t), out.value, out.iterations))
        }
        Restriction::FixYM => {
            let out = newton_1d(obj, edge, 1.0, x_max, from.x, stop)?;
            Ok((DomainPoint::new(out.t, m), out.value, out.iterations))
        }
        Restriction::OnCurve => {
            let out = newton_1d(obj, edge, 1.0, x_max, from.x, stop)?;
            let y = feasibility::y_min(out.t, s).min(m);
            Ok((DomainPoint::new(out.t, y), out.value, out.iterations))
        }
    }
}

/// Integer allocation near the continuous point `(x̄, ȳ)`.
///
/// Falls back to every resource active when no candidate is feasible.
pub fn finalize_discrete(
    x_bar: f64,
    y_bar: f64,
    s: &Scenario,
    cp: &ConsumptionParams,
    mode: FinalizeMode,
) -> Result<Allocation> {
    if s.is_idle() {
        return Ok(Allocation::shutdown(cp.p_sleep));
    }
    if !(x_bar > 0.0) || !(y_bar.is_finite()) {
        return Err(Error::domain(
            "x_bar",
            x_bar,
            "continuous optimum must have x > 0 and finite y",
        ));
    }
    if s.m <= s.k {
        return Err(Error::invalid("m", "needs more antennas than users"));
    }
    let n_cont = s.n as f64 / x_bar;
    let n_of = |v: f64| (v as usize).clamp(1, s.n);
    let m_of = |v: f64| (v as usize).clamp(s.k + 1, s.m);

    let chosen = match mode {
        FinalizeMode::Round => {
            let (nr, mr) = (n_of(round(n_cont)), m_of(round(y_bar)));
            let (nc, mc) = (n_of(ceil(n_cont)), m_of(ceil(y_bar)));
            [(nr, mr), (nc, mr), (nr, mc), (nc, mc)]
                .into_iter()
                .find(|&(n_a, m_a)| point_is_feasible(s, n_a, m_a))
        }
        FinalizeMode::CeilFloor => {
            let ns = [n_of(floor(n_cont)), n_of(ceil(n_cont))];
            let ms = [m_of(floor(y_bar)), m_of(ceil(y_bar))];
            let mut best: Option<Allocation> = None;
            for &m_a in &ms {
                for &n_a in &ns {
                    if !point_is_feasible(s, n_a, m_a) {
                        continue;
                    }
                    let a = allocation_at(s, cp, n_a, m_a)?;
                    if best.is_none_or(|b| a.p_cons < b.p_cons) {
                        best = Some(a);
                    }
                }
            }
            best.map(|a| (a.n_a, a.m_a))
        }
    };
    let (n_a, m_a) = chosen.unwrap_or((s.n, s.m));
    allocation_at(s, cp, n_a, m_a)
}
