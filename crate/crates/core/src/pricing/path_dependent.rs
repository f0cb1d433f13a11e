use crate::contracts::{payoff, Intensities, Outcome, Score, ScoreState, Side};
use crate::error::{Error, Result};

use super::european::{price_european, ScoreDistribution};
use super::{MatchContext, PriceResult};

/// Value of the Next Goal bet on `side`: the probability that the next goal is
/// scored before the final whistle and by that side.
///
/// The bet re-opens after every goal, so the value only depends on the time
/// left, not on the score.
pub fn price_next_goal(side: Side, state: &ScoreState, intensities: &Intensities) -> PriceResult {
    let total = intensities.total();
    if total == 0.0 {
        return PriceResult::exact(0.0);
    }
    let any_goal = -(-total * state.remaining()).exp_m1();
    PriceResult::exact((intensities.of(side) / total * any_goal).clamp(0.0, 1.0))
}

/// Value of a Half Time / Full Time bet.
///
/// Before half time this is the two-stage sum over half-time scores `k` with
/// the predicted half-time outcome, each weighted by the value at half time of
/// the full-time Match Odds bet. From half time on the bet is either worthless
/// or equal to that Match Odds bet.
pub fn price_ht_ft(
    half_time: Outcome,
    full_time: Outcome,
    state: &ScoreState,
    intensities: &Intensities,
    ctx: &MatchContext,
) -> Result<PriceResult> {
    let half = ctx.half_clock;
    if !(half > 0.0 && half < 1.0) {
        return Err(Error::domain(format!(
            "half clock must lie in (0, 1), got {half}"
        )));
    }
    let full_time_bet = full_time.match_odds();
    if state.clock >= half {
        let ht = ctx.half_time_score.ok_or(Error::MissingHalfTimeScore)?;
        if ht.home > state.home_goals || ht.away > state.away_goals {
            return Err(Error::domain(format!(
                "half-time score {ht} exceeds current score {}",
                state.score()
            )));
        }
        if Outcome::of(ht.home, ht.away) != half_time {
            return Ok(PriceResult::exact(0.0));
        }
        return price_european(&full_time_bet, state, intensities);
    }

    let first = ScoreDistribution::over_horizon(state.score(), intensities, half - state.clock)?;
    let second = ScoreDistribution::over_horizon(Score::default(), intensities, 1.0 - half)?;
    let mut value = 0.0;
    for ((k1, k2), p) in first.iter() {
        if Outcome::of(k1, k2) != half_time {
            continue;
        }
        let ft = second.expectation(|i, j| payoff(&full_time_bet, k1 + i, k2 + j).unwrap_or(0.0));
        value += p * ft;
    }
    Ok(PriceResult {
        value: value.clamp(0.0, 1.0),
        truncation_bound: first.truncation_bound() + second.truncation_bound(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contracts::BetSpec;

    fn lam(h: f64, a: f64) -> Intensities {
        Intensities::new(h, a).unwrap()
    }

    #[test]
    fn next_goal_examples() {
        let end = ScoreState::new(0, 0, 1.0).unwrap();
        assert_eq!(price_next_goal(Side::Home, &end, &lam(1.0, 3.0)).value, 0.0);
        let ko = ScoreState::new(0, 0, 0.0).unwrap();
        let v = price_next_goal(Side::Home, &ko, &lam(1.0, 1.0)).value;
        assert!((v - 0.432_332_358_381_693_65).abs() < 1e-15);
        let v = price_next_goal(Side::Home, &ko, &lam(1.0, 0.0)).value;
        assert!((v - 0.632_120_558_828_557_7).abs() < 1e-15);
        assert_eq!(price_next_goal(Side::Away, &ko, &lam(0.0, 0.0)).value, 0.0);
    }

    #[test]
    fn second_half_reduces_to_match_odds() {
        let ctx = MatchContext {
            half_clock: 0.5,
            half_time_score: Some(Score::new(0, 1)),
        };
        let s = ScoreState::new(1, 1, 0.6).unwrap();
        let l = lam(1.2, 0.8);
        let v = price_ht_ft(Outcome::Home, Outcome::Draw, &s, &l, &ctx).unwrap();
        assert_eq!(v.value, 0.0);

        let ctx = MatchContext {
            half_time_score: Some(Score::new(1, 0)),
            ..ctx
        };
        let v = price_ht_ft(Outcome::Home, Outcome::Draw, &s, &l, &ctx)
            .unwrap()
            .value;
        let draw = price_european(&BetSpec::MatchOddsDraw, &s, &l)
            .unwrap()
            .value;
        assert_eq!(v, draw);
    }

    #[test]
    fn half_time_score_required_after_break() {
        let s = ScoreState::new(0, 0, 0.5).unwrap();
        let err = price_ht_ft(
            Outcome::Draw,
            Outcome::Draw,
            &s,
            &lam(1.0, 1.0),
            &MatchContext::default(),
        );
        assert!(matches!(err, Err(Error::MissingHalfTimeScore)));
    }

    #[test]
    fn nine_outcomes_sum_to_one() {
        let s = ScoreState::new(1, 0, 0.2).unwrap();
        let l = lam(1.4, 1.1);
        let ctx = MatchContext::default();
        let total: f64 = Outcome::ALL
            .iter()
            .flat_map(|&h| Outcome::ALL.iter().map(move |&f| (h, f)))
            .map(|(h, f)| price_ht_ft(h, f, &s, &l, &ctx).unwrap().value)
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
