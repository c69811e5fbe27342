use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the formula it feeds.
    #[error("{name} = {value} is out of domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A model or scenario parameter violates its invariant.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },

    /// Serving the target rates needs more than every resource at full power.
    #[error("infeasible scenario: minimum per-antenna power {p_a_min:e} W exceeds P_max = {p_max} W")]
    Infeasible { p_a_min: f64, p_max: f64 },

    /// Newton's method hit its iteration cap.
    #[error(
        "Newton did not converge in {iterations} iterations (last iterate x = {x}, y = {y}, |grad| = {grad_norm:e})"
    )]
    NoConvergence {
        iterations: usize,
        x: f64,
        y: f64,
        grad_norm: f64,
    },

    #[error("brute-force grid has {points} points, above the budget of {budget}; subsample the scenario")]
    BudgetExceeded { points: u64, budget: u64 },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain { name, value, reason }
    }

    pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }
}
