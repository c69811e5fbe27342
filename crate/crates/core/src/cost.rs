//! Continuous relaxation of the consumption in `(x, y) = (N/N_a, M_a)`:
//!
//! ```text
//! f(x, y) = (y/x) P0/M + γ (y/x) (φ(x) / (y (y - K)))^α + (y/M) P1
//! φ(x)    = Σ_k (σ_k²/β_k) (2^{R_k x} - 1)
//! ```
//!
//! so that `P_cons = f + P_sleep`. The PA term factors as `γ h(x) g(y)` with
//! `h = φ^α / x` and `g = y^{1-α} (y - K)^{-α}`; both factors are handled
//! through their logarithms, which keeps the derivatives finite long after
//! `2^{R_k x}` itself overflows.

use alloc::vec::Vec;

use crate::feasibility::{DomainPoint, LOG_DOMAIN_BITS};
use crate::link_model::Scenario;
use crate::math::{exp, expm1, ln, sqrt, LN_2};
use crate::power_model::ConsumptionParams;
use crate::{Error, Result};

/// Smallest slot compression at which `f` is evaluated.
pub const MIN_X: f64 = 1e-9;

/// Value, gradient and Hessian of `f` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CostDerivatives {
    pub value: f64,
    /// `[∂f/∂x, ∂f/∂y]`.
    pub gradient: [f64; 2],
    /// `[[f_xx, f_xy], [f_xy, f_yy]]`.
    pub hessian: [[f64; 2]; 2],
}

/// `φ` and its first two derivatives, expressed as `ln φ`, `φ'/φ`, `φ''/φ`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PhiTerms {
    pub ln_phi: f64,
    pub d1: f64,
    pub d2: f64,
}

/// `y_min(x)` together with its first two derivatives.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CurveTerms {
    pub y: f64,
    pub dy: f64,
    pub d2y: f64,
}

/// `f` specialised to one scenario and parameter set.
#[derive(Debug, Clone)]
pub struct Objective {
    /// `(σ_k²/β_k, R_k)` of users with traffic.
    users: Vec<(f64, f64)>,
    k: f64,
    m: f64,
    p_max: f64,
    /// `P0 / M`.
    slot_coeff: f64,
    /// `P1 / M`.
    antenna_coeff: f64,
    gamma: f64,
    alpha: f64,
}

impl Objective {
    pub fn new(s: &Scenario, cp: &ConsumptionParams) -> Self {
        let users = s
            .rates
            .iter()
            .zip(&s.betas)
            .zip(&s.noise_powers)
            .filter(|((r, _), _)| **r > 0.0)
            .map(|((r, b), sigma2)| (sigma2 / b, *r))
            .collect();
        Objective {
            users,
            k: s.k as f64,
            m: s.m as f64,
            p_max: s.p_max,
            slot_coeff: cp.p0 / s.m as f64,
            antenna_coeff: cp.p1 / s.m as f64,
            gamma: cp.gamma,
            alpha: cp.alpha,
        }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub(crate) fn phi_terms(&self, x: f64) -> Option<PhiTerms> {
        if self.users.is_empty() {
            return None;
        }
        let top = self.users.iter().map(|&(_, r)| r * x).fold(f64::NEG_INFINITY, f64::max);
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        let ln_phi = if top <= LOG_DOMAIN_BITS {
            for &(w, r) in &self.users {
                let t = r * x * LN_2;
                let e = exp(t);
                s0 += w * expm1(t);
                s1 += w * r * e;
                s2 += w * r * r * e;
            }
            ln(s0)
        } else {
            let shift = top * LN_2;
            for &(w, r) in &self.users {
                let e = exp(r * x * LN_2 - shift);
                s0 += w * (e - exp(-shift));
                s1 += w * r * e;
                s2 += w * r * r * e;
            }
            shift + ln(s0)
        };
        Some(PhiTerms {
            ln_phi,
            d1: LN_2 * s1 / s0,
            d2: LN_2 * LN_2 * s2 / s0,
        })
    }

    fn in_domain(&self, x: f64, y: f64) -> bool {
        x >= MIN_X && y > self.k && x.is_finite() && y.is_finite()
    }

    /// `f(x, y)`, or `+inf` outside `x >= MIN_X, y > K` or on overflow.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        if !self.in_domain(x, y) {
            return f64::INFINITY;
        }
        let mut v = self.slot_coeff * y / x + self.antenna_coeff * y;
        if let Some(phi) = self.phi_terms(x) {
            v += self.gamma * exp(self.ln_pa_factor(phi.ln_phi, x, y));
        }
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    /// `ln(h(x) g(y))`.
    fn ln_pa_factor(&self, ln_phi: f64, x: f64, y: f64) -> f64 {
        let a = self.alpha;
        a * ln_phi - ln(x) + (1.0 - a) * ln(y) - a * ln(y - self.k)
    }

    /// Value, gradient and Hessian. Outside the domain the value is `+inf`
    /// and the derivatives are NaN.
    pub fn derivatives(&self, x: f64, y: f64) -> CostDerivatives {
        if !self.in_domain(x, y) {
            return CostDerivatives {
                value: f64::INFINITY,
                gradient: [f64::NAN; 2],
                hessian: [[f64::NAN; 2]; 2],
            };
        }
        let (a0, c) = (self.slot_coeff, self.antenna_coeff);
        let mut value = a0 * y / x + c * y;
        let mut fx = -a0 * y / (x * x);
        let mut fy = a0 / x + c;
        let mut fxx = 2.0 * a0 * y / (x * x * x);
        let mut fxy = -a0 / (x * x);
        let mut fyy = 0.0;

        if let Some(phi) = self.phi_terms(x) {
            let a = self.alpha;
            let pa = self.gamma * exp(self.ln_pa_factor(phi.ln_phi, x, y));
            // Log-derivatives of h(x) = φ^α / x.
            let hx = a * phi.d1 - 1.0 / x;
            let hxx = a * (a - 1.0) * phi.d1 * phi.d1 + a * phi.d2 - 2.0 * a * phi.d1 / x + 2.0 / (x * x);
            // Log-derivatives of g(y) = y^{1-α} (y - K)^{-α}.
            let gap = y - self.k;
            let gy = (1.0 - a) / y - a / gap;
            let gyy = gy * gy - (1.0 - a) / (y * y) + a / (gap * gap);
            value += pa;
            fx += pa * hx;
            fy += pa * gy;
            fxx += pa * hxx;
            fxy += pa * hx * gy;
            fyy += pa * gyy;
        }

        CostDerivatives {
            value,
            gradient: [fx, fy],
            hessian: [[fxx, fxy], [fxy, fyy]],
        }
    }

    /// `y_min(x)` and its derivatives, reusing the φ terms.
    pub(crate) fn curve(&self, x: f64) -> CurveTerms {
        let k = self.k;
        let Some(phi) = self.phi_terms(x) else {
            return CurveTerms {
                y: k,
                dy: 0.0,
                d2y: 0.0,
            };
        };
        // ψ = φ / P_max; S = sqrt(K² + 4ψ); y = K/2 + S/2.
        let psi = exp(phi.ln_phi - ln(self.p_max));
        let s = sqrt(k * k + 4.0 * psi);
        let dpsi = phi.d1 * psi;
        let d2psi = phi.d2 * psi;
        CurveTerms {
            y: k / 2.0 + s / 2.0,
            dy: dpsi / s,
            d2y: d2psi / s - 2.0 * dpsi * dpsi / (s * s * s),
        }
    }

    /// The three one-dimensional restrictions used by the region dispatch,
    /// returned as `(F, F', F'')`.
    pub(crate) fn restricted(&self, which: Restriction, t: f64) -> (f64, f64, f64) {
        match which {
            Restriction::FixX1 => {
                let d = self.derivatives(1.0, t);
                (d.value, d.gradient[1], d.hessian[1][1])
            }
            Restriction::FixYM => {
                let d = self.derivatives(t, self.m);
                (d.value, d.gradient[0], d.hessian[0][0])
            }
            Restriction::OnCurve => {
                if t < MIN_X {
                    return (f64::INFINITY, f64::NAN, f64::NAN);
                }
                let c = self.curve(t);
                let d = self.derivatives(t, c.y);
                let [fx, fy] = d.gradient;
                let [[fxx, fxy], [_, fyy]] = d.hessian;
                let first = fx + fy * c.dy;
                let second = fxx + 2.0 * fxy * c.dy + fyy * c.dy * c.dy + fy * c.d2y;
                (d.value, first, second)
            }
        }
    }
}

/// A one-dimensional slice of `f` along an edge of the feasible domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Restriction {
    /// `y ↦ f(1, y)`: every slot active.
    FixX1,
    /// `x ↦ f(x, M)`: every antenna active.
    FixYM,
    /// `x ↦ f(x, y_min(x))`: transmitting at exactly `P_max`.
    OnCurve,
}

fn check_point(p: DomainPoint, s: &Scenario) -> Result<()> {
    if !(p.y > s.k as f64) {
        return Err(Error::domain("y", p.y, "must exceed k (array-gain pole)"));
    }
    if !(p.x >= MIN_X) || !p.x.is_finite() {
        return Err(Error::domain("x", p.x, "slot compression must be positive"));
    }
    Ok(())
}

/// `f(x, y)`; `P_cons = f + P_sleep` under `x = N/N_a`, `y = M_a`.
pub fn cost(p: DomainPoint, s: &Scenario, cp: &ConsumptionParams) -> Result<f64> {
    check_point(p, s)?;
    Ok(Objective::new(s, cp).value(p.x, p.y))
}

/// Closed-form value, gradient and Hessian of `f`.
pub fn cost_derivatives(p: DomainPoint, s: &Scenario, cp: &ConsumptionParams) -> Result<CostDerivatives> {
    check_point(p, s)?;
    Ok(Objective::new(s, cp).derivatives(p.x, p.y))
}
