//! Risk-neutral valuation of bets and their sensitivities.
//!
//! A bet's value is the expectation of its payoff when the remaining goals of
//! each team are independent Poisson counts with means `λᵢ·(1 − τ)`. European
//! bets are valued by the truncated double sum over final scores
//! ([`price_european`]) or by closed forms ([`price_closed_form`]); Next Goal
//! and Half Time / Full Time bets have dedicated pricers. [`price`] dispatches
//! on the bet type.

mod closed_form;
mod european;
mod greeks;
mod path_dependent;

use serde::Serialize;

pub use closed_form::price_closed_form;
pub use european::{
    arrow_debreu_prices, payoff_table, price_european, price_payoff, static_replication,
    truncation_cap, ScoreDistribution, CAP_FLOOR, TAIL_TOLERANCE,
};
pub use greeks::{greeks, intensity_sensitivity, kolmogorov_residual, post_goal_value, theta};
pub use path_dependent::{price_ht_ft, price_next_goal};

use crate::contracts::{BetSpec, Intensities, Score, ScoreState, Side};
use crate::error::{Error, Result};

/// A price together with an upper bound on the probability mass left out by
/// truncating infinite sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriceResult {
    pub value: f64,
    pub truncation_bound: f64,
}

impl PriceResult {
    pub(crate) fn exact(value: f64) -> Self {
        PriceResult {
            value,
            truncation_bound: 0.0,
        }
    }
}

/// Goal and time sensitivities of a bet.
///
/// `delta_home` and `delta_away` are the immediate value changes if the home or
/// away team scores now; `theta` is the rate of change per unit of match clock
/// while no goal is scored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Greeks {
    pub delta_home: f64,
    pub delta_away: f64,
    pub theta: f64,
}

impl Greeks {
    pub fn delta(&self, side: Side) -> f64 {
        match side {
            Side::Home => self.delta_home,
            Side::Away => self.delta_away,
        }
    }
}

/// Information beyond the current state needed by path-dependent bets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchContext {
    /// Clock value at which the first half ends.
    pub half_clock: f64,
    /// Score at half time, once known.
    pub half_time_score: Option<Score>,
}

impl Default for MatchContext {
    fn default() -> Self {
        MatchContext {
            half_clock: 0.5,
            half_time_score: None,
        }
    }
}

impl MatchContext {
    pub fn new(half_clock: f64, half_time_score: Option<Score>) -> Result<Self> {
        if !(half_clock > 0.0 && half_clock < 1.0) {
            return Err(Error::domain(format!(
                "half clock must lie in (0, 1), got {half_clock}"
            )));
        }
        Ok(MatchContext {
            half_clock,
            half_time_score,
        })
    }
}

/// Values any supported bet.
pub fn price(
    bet: &BetSpec,
    state: &ScoreState,
    intensities: &Intensities,
    ctx: &MatchContext,
) -> Result<PriceResult> {
    match *bet {
        BetSpec::NextGoalHome => Ok(price_next_goal(Side::Home, state, intensities)),
        BetSpec::NextGoalAway => Ok(price_next_goal(Side::Away, state, intensities)),
        BetSpec::HalfTimeFullTime {
            half_time,
            full_time,
        } => price_ht_ft(half_time, full_time, state, intensities, ctx),
        _ => price_european(bet, state, intensities),
    }
}
