//! Pricing, calibration and hedging of in-play football bets.
//!
//! Home and away scores are modelled as independent Poisson processes with
//! constant risk-neutral intensities. Every bet is valued as the expectation of
//! its payoff under that measure, market quotes are inverted into implied
//! intensities, and any bet can be replicated dynamically with two linearly
//! independent instruments (canonically the Next Goal home and away bets).
//!
//! The match clock is normalised: `0.0` is kick-off and `1.0` the end of
//! regulation time, so intensities are quoted in goals per match.
//!
//! ```
//! use inplay::{BetSpec, Intensities, ScoreState};
//! use inplay::pricing::price_european;
//!
//! let state = ScoreState::new(0, 0, 0.0).unwrap();
//! let lambda = Intensities::new(1.2, 0.8).unwrap();
//! let home = price_european(&BetSpec::MatchOddsHome, &state, &lambda).unwrap();
//! assert!(home.value > 0.4 && home.value < 0.6);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod cli;
pub mod contracts;
mod error;
pub mod hedging;
pub mod io;
pub mod oracle;
pub mod poisson;
pub mod pricing;
pub mod synthetic;

pub use contracts::{
    BetSpec, GoalEvent, GoalLine, Intensities, Outcome, Quote, Score, ScoreState, Side,
};
pub use error::{Error, Result};
