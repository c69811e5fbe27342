//! Damped Newton iterations on the objective: unconstrained in the plane
//! and bounded along one of the three edges of the feasible domain.

use crate::cost::{Objective, Restriction};
use crate::feasibility::DomainPoint;
use crate::math::{abs, sqrt};
use crate::{Error, Result};

/// Backtracking (Armijo) line-search parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LineSearch {
    /// Step multiplier after a rejected trial, in (0, 1).
    pub shrink: f64,
    /// Sufficient-decrease constant, in (0, 1).
    pub armijo: f64,
}

impl Default for LineSearch {
    fn default() -> Self {
        LineSearch {
            shrink: 0.5,
            armijo: 1e-4,
        }
    }
}

impl LineSearch {
    pub fn validate(&self) -> Result<()> {
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::invalid("line_search.shrink", "must lie in (0, 1)"));
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) {
            return Err(Error::invalid("line_search.armijo", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Stopping rule shared by both iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stopping {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub line_search: LineSearch,
}

/// Result of a 2-D run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome2d {
    pub point: DomainPoint,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

/// Result of a bounded 1-D run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome1d {
    pub t: f64,
    pub value: f64,
    /// `|F'|`, or 0 when stopped by projected stationarity at a bound.
    pub residual: f64,
    pub iterations: usize,
}

const MAX_BACKTRACKS: usize = 80;

/// Relative slack under which a failed Armijo test is blamed on rounding.
const NOISE_RTOL: f64 = 1e-12;

/// Eigenvalues of a symmetric 2×2 matrix, ascending.
pub fn sym2_eigenvalues(h: [[f64; 2]; 2]) -> (f64, f64) {
    let mean = 0.5 * (h[0][0] + h[1][1]);
    let half = 0.5 * (h[0][0] - h[1][1]);
    let r = sqrt(half * half + h[0][1] * h[0][1]);
    (mean - r, mean + r)
}

fn norm(g: [f64; 2]) -> f64 {
    sqrt(g[0] * g[0] + g[1] * g[1])
}

/// Newton direction, with the Hessian shifted to be positive definite
/// when needed, and whether it is the unshifted Newton step. Falls back to
/// steepest descent if the shifted system is still not a descent direction.
fn direction(g: [f64; 2], h: [[f64; 2]; 2]) -> ([f64; 2], bool) {
    let (lo, hi) = sym2_eigenvalues(h);
    let floor = 1e-10 * abs(hi).max(1e-300);
    let mu = if lo > floor { 0.0 } else { floor - lo };
    let (a, b, c) = (h[0][0] + mu, h[0][1], h[1][1] + mu);
    let det = a * c - b * b;
    let p = [-(c * g[0] - b * g[1]) / det, -(a * g[1] - b * g[0]) / det];
    if p[0].is_finite() && p[1].is_finite() && p[0] * g[0] + p[1] * g[1] < 0.0 {
        (p, mu == 0.0)
    } else {
        ([-g[0], -g[1]], false)
    }
}

/// The predicted decrease `-slope / 2` of a pure Newton step is lost in the
/// rounding of `value`: the line search can no longer tell good from bad.
fn below_resolution(slope: f64, value: f64) -> bool {
    -slope <= NOISE_RTOL * abs(value).max(1.0)
}

/// Damped Newton for the unconstrained minimizer of `f` over `x > 0, y > K`.
pub fn newton_2d(obj: &Objective, start: DomainPoint, stop: &Stopping) -> Result<Outcome2d> {
    let (mut x, mut y) = (start.x, start.y);
    let mut d = obj.derivatives(x, y);
    if !d.value.is_finite() {
        return Err(Error::domain("start", x, "objective is not finite at the start point"));
    }
    for it in 0..=stop.max_iterations {
        let gn = norm(d.gradient);
        if gn <= stop.tolerance {
            return Ok(Outcome2d {
                point: DomainPoint::new(x, y),
                value: d.value,
                grad_norm: gn,
                iterations: it,
            });
        }
        if it == stop.max_iterations {
            break;
        }
        let (p, pure) = direction(d.gradient, d.hessian);
        let slope = p[0] * d.gradient[0] + p[1] * d.gradient[1];
        let mut accepted = (pure && below_resolution(slope, d.value)).then(|| (x + p[0], y + p[1]));
        let mut t = 1.0;
        for _ in 0..MAX_BACKTRACKS {
            if accepted.is_some() {
                break;
            }
            let (xn, yn) = (x + t * p[0], y + t * p[1]);
            if obj.value(xn, yn) <= d.value + stop.line_search.armijo * t * slope {
                accepted = Some((xn, yn));
            }
            t *= stop.line_search.shrink;
        }
        let (xn, yn) = match accepted {
            Some(pt) => pt,
            None => {
                // Close to the minimizer the decrease drowns in rounding:
                // accept the full step if it is no worse and flattens the gradient.
                let (xn, yn) = (x + p[0], y + p[1]);
                let dn = obj.derivatives(xn, yn);
                let flat = norm(dn.gradient) < gn;
                if flat && dn.value <= d.value + NOISE_RTOL * abs(d.value) {
                    (xn, yn)
                } else {
                    return Err(Error::NoConvergence {
                        iterations: it,
                        x,
                        y,
                        grad_norm: gn,
                    });
                }
            }
        };
        x = xn;
        y = yn;
        d = obj.derivatives(x, y);
    }
    Err(Error::NoConvergence {
        iterations: stop.max_iterations,
        x,
        y,
        grad_norm: norm(d.gradient),
    })
}

/// Bounded damped Newton for one restriction of `f` over `[lo, hi]`.
///
/// Where the restriction is locally concave the step is a fixed fraction
/// of the interval in the descent direction.
pub fn newton_1d(
    obj: &Objective,
    which: Restriction,
    lo: f64,
    hi: f64,
    start: f64,
    stop: &Stopping,
) -> Result<Outcome1d> {
    if !(lo <= hi) {
        return Err(Error::invalid("interval", "lower bound exceeds upper bound"));
    }
    let mut t = start.clamp(lo, hi);
    let (mut v, mut d1, mut d2) = obj.restricted(which, t);
    if !v.is_finite() {
        return Err(Error::domain("start", t, "objective is not finite at the start point"));
    }
    let span = hi - lo;
    for it in 0..=stop.max_iterations {
        let pinned = (t <= lo && d1 >= 0.0) || (t >= hi && d1 <= 0.0);
        if pinned || span == 0.0 {
            return Ok(Outcome1d {
                t,
                value: v,
                residual: 0.0,
                iterations: it,
            });
        }
        if abs(d1) <= stop.tolerance {
            return Ok(Outcome1d {
                t,
                value: v,
                residual: abs(d1),
                iterations: it,
            });
        }
        if it == stop.max_iterations {
            break;
        }
        let p = if d2 > 0.0 { -d1 / d2 } else { -d1.signum() * span / 4.0 };
        let mut accepted = (d2 > 0.0 && below_resolution(d1 * p, v)).then(|| (t + p).clamp(lo, hi));
        let mut step = 1.0;
        for _ in 0..MAX_BACKTRACKS {
            if accepted.is_some() {
                break;
            }
            let tn = (t + step * p).clamp(lo, hi);
            if obj.restricted(which, tn).0 <= v + stop.line_search.armijo * d1 * (tn - t) {
                accepted = Some(tn);
            }
            step *= stop.line_search.shrink;
        }
        let tn = match accepted {
            Some(tn) => tn,
            None => {
                let tn = (t + p).clamp(lo, hi);
                let (vn, dn, _) = obj.restricted(which, tn);
                if abs(dn) < abs(d1) && vn <= v + NOISE_RTOL * abs(v) {
                    tn
                } else if stalled(t, p) {
                    return Ok(Outcome1d {
                        t,
                        value: v,
                        residual: abs(d1),
                        iterations: it,
                    });
                } else {
                    return Err(no_convergence(which, it, t, d1));
                }
            }
        };
        if tn == t {
            return Ok(Outcome1d {
                t,
                value: v,
                residual: abs(d1),
                iterations: it + 1,
            });
        }
        t = tn;
        (v, d1, d2) = obj.restricted(which, t);
    }
    Err(no_convergence(which, stop.max_iterations, t, d1))
}

/// The step is below the resolution of `t`.
fn stalled(t: f64, p: f64) -> bool {
    abs(p) <= 4.0 * f64::EPSILON * abs(t).max(1.0)
}

fn no_convergence(which: Restriction, iterations: usize, t: f64, d1: f64) -> Error {
    let (x, y) = match which {
        Restriction::FixX1 => (1.0, t),
        Restriction::FixYM | Restriction::OnCurve => (t, f64::NAN),
    };
    Error::NoConvergence {
        iterations,
        x,
        y,
        grad_norm: abs(d1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link_model::Scenario;
    use crate::power_model::{Configuration, TdSavings};
    use alloc::vec;
    use approx::assert_relative_eq;

    fn stop() -> Stopping {
        Stopping {
            tolerance: 1e-8,
            max_iterations: 200,
            line_search: LineSearch::default(),
        }
    }

    fn scenario(rate: f64) -> Scenario {
        Scenario::new(32, 100, 1.0, vec![1.0; 4], vec![0.1; 4], vec![rate; 4]).unwrap()
    }

    #[test]
    fn eigenvalues_of_diagonal_and_coupled() {
        assert_eq!(sym2_eigenvalues([[3.0, 0.0], [0.0, -1.0]]), (-1.0, 3.0));
        let (a, b) = sym2_eigenvalues([[2.0, 1.0], [1.0, 2.0]]);
        assert_relative_eq!(a, 1.0, epsilon = 1e-15);
        assert_relative_eq!(b, 3.0, epsilon = 1e-15);
    }

    #[test]
    fn direction_is_descent_for_indefinite_hessian() {
        let g = [1.0, -2.0];
        let (p, pure) = direction(g, [[1.0, 3.0], [3.0, 1.0]]);
        assert!(!pure);
        assert!(p[0] * g[0] + p[1] * g[1] < 0.0);
    }

    #[test]
    fn two_dimensional_run_is_stationary() {
        let s = scenario(0.5);
        let obj = Objective::new(&s, &Configuration::Aau64T64R.consumption_params(TdSavings::Off));
        let out = newton_2d(&obj, DomainPoint::new(2.0, 18.0), &stop()).unwrap();
        assert!(out.grad_norm <= 1e-8);
        assert!(out.iterations <= 50);
        let d = obj.derivatives(out.point.x, out.point.y);
        assert!(d.hessian[0][0] > 0.0 && d.hessian[1][1] > 0.0);
    }

    #[test]
    fn bounded_run_stops_at_the_binding_end() {
        let s = scenario(0.5);
        let obj = Objective::new(&s, &Configuration::Aau64T64R.consumption_params(TdSavings::Off));
        // f(1, y) with P1 > 0 grows in y at large y; the left end binds on a short interval.
        let out = newton_1d(&obj, Restriction::FixX1, 30.0, 32.0, 31.0, &stop()).unwrap();
        assert_eq!(out.t, 30.0);
        assert_eq!(out.residual, 0.0);
    }

    #[test]
    fn degenerate_interval_returns_its_point() {
        let s = scenario(0.5);
        let obj = Objective::new(&s, &Configuration::Aau64T64R.consumption_params(TdSavings::On));
        let out = newton_1d(&obj, Restriction::FixYM, 1.0, 1.0, 7.0, &stop()).unwrap();
        assert_eq!(out.t, 1.0);
        assert!(newton_1d(&obj, Restriction::FixYM, 2.0, 1.0, 1.5, &stop()).is_err());
    }
}
