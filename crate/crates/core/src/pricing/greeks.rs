use crate::contracts::{BetSpec, Intensities, ScoreState, Side};
use crate::error::{Error, Result};

use super::{price, Greeks, MatchContext};

/// Clock step of the finite-difference theta.
const THETA_STEP: f64 = 1e-6;

/// Value held immediately after `side` scores, before any re-opening.
///
/// For Next Goal bets this is the settlement value (one for the scoring side,
/// zero for the other); for every other bet it is the price at the new score.
pub fn post_goal_value(
    bet: &BetSpec,
    state: &ScoreState,
    intensities: &Intensities,
    ctx: &MatchContext,
    side: Side,
) -> Result<f64> {
    match (bet, side) {
        (BetSpec::NextGoalHome, Side::Home) | (BetSpec::NextGoalAway, Side::Away) => Ok(1.0),
        (BetSpec::NextGoalHome, Side::Away) | (BetSpec::NextGoalAway, Side::Home) => Ok(0.0),
        _ => Ok(price(bet, &state.with_goal(side), intensities, ctx)?.value),
    }
}

/// Rate of change of the value per unit of clock while no goal is scored.
///
/// Central difference in the interior, second-order one-sided difference at
/// the ends of the match and next to half time for Half Time / Full Time bets.
pub fn theta(
    bet: &BetSpec,
    state: &ScoreState,
    intensities: &Intensities,
    ctx: &MatchContext,
) -> Result<f64> {
    let h = THETA_STEP;
    let c = state.clock;
    let at = |clock: f64| price(bet, &state.with_clock(clock), intensities, ctx).map(|r| r.value);

    let mut can_back = c - h >= 0.0;
    let mut can_fwd = c + h <= 1.0;
    if let BetSpec::HalfTimeFullTime { .. } = bet {
        let half = ctx.half_clock;
        if c < half {
            can_fwd &= c + 2.0 * h < half;
        } else {
            can_back &= c - 2.0 * h >= half;
        }
    }
    if can_back && can_fwd {
        Ok((at(c + h)? - at(c - h)?) / (2.0 * h))
    } else if can_fwd {
        Ok((-3.0 * at(c)? + 4.0 * at(c + h)? - at(c + 2.0 * h)?) / (2.0 * h))
    } else if can_back {
        Ok((3.0 * at(c)? - 4.0 * at(c - h)? + at(c - 2.0 * h)?) / (2.0 * h))
    } else {
        Err(Error::domain("no room for a finite-difference theta"))
    }
}

/// Goal deltas (forward differences in each score) and theta.
pub fn greeks(
    bet: &BetSpec,
    state: &ScoreState,
    intensities: &Intensities,
    ctx: &MatchContext,
) -> Result<Greeks> {
    let value = price(bet, state, intensities, ctx)?.value;
    Ok(Greeks {
        delta_home: post_goal_value(bet, state, intensities, ctx, Side::Home)? - value,
        delta_away: post_goal_value(bet, state, intensities, ctx, Side::Away)? - value,
        theta: theta(bet, state, intensities, ctx)?,
    })
}

/// `θ + λ₁δ₁X + λ₂δ₂X`, which vanishes for every bet up to finite-difference
/// error.
pub fn kolmogorov_residual(
    bet: &BetSpec,
    state: &ScoreState,
    intensities: &Intensities,
) -> Result<f64> {
    let g = greeks(bet, state, intensities, &MatchContext::default())?;
    Ok(g.theta + intensities.home * g.delta_home + intensities.away * g.delta_away)
}

/// `(∂X/∂λ₁, ∂X/∂λ₂) = (1 − τ)·(δ₁X, δ₂X)` for a European bet.
pub fn intensity_sensitivity(
    bet: &BetSpec,
    state: &ScoreState,
    intensities: &Intensities,
) -> Result<(f64, f64)> {
    if !bet.is_european() {
        return Err(Error::NotEuropean(bet.to_string()));
    }
    let ctx = MatchContext::default();
    let value = price(bet, state, intensities, &ctx)?.value;
    let remaining = state.remaining();
    let up = |side| {
        post_goal_value(bet, state, intensities, &ctx, side).map(|v| remaining * (v - value))
    };
    Ok((up(Side::Home)?, up(Side::Away)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contracts::GoalLine;
    use crate::pricing::price_european;

    fn lam(h: f64, a: f64) -> Intensities {
        Intensities::new(h, a).unwrap()
    }

    #[test]
    fn under_half_goal_deltas() {
        let s = ScoreState::new(0, 0, 0.0).unwrap();
        let l = lam(1.0, 1.0);
        let g = greeks(
            &BetSpec::UnderLine(GoalLine(0)),
            &s,
            &l,
            &MatchContext::default(),
        )
        .unwrap();
        let x = (-2.0f64).exp();
        assert!((g.delta_home + x).abs() < 1e-15);
        assert!((g.delta_away + x).abs() < 1e-15);
        let (d1, d2) = intensity_sensitivity(&BetSpec::UnderLine(GoalLine(0)), &s, &l).unwrap();
        assert!((d1 + x).abs() < 1e-15 && (d2 + x).abs() < 1e-15);
    }

    #[test]
    fn correct_score_nil_nil_delta() {
        let s = ScoreState::new(0, 0, 0.4).unwrap();
        let l = lam(1.7, 0.6);
        let bet = BetSpec::CorrectScore { home: 0, away: 0 };
        let g = greeks(&bet, &s, &l, &MatchContext::default()).unwrap();
        let v = price_european(&bet, &s, &l).unwrap().value;
        assert_eq!(g.delta_home, -v);
        assert_eq!(g.delta_away, -v);
    }

    #[test]
    fn frozen_game_has_no_theta() {
        let s = ScoreState::new(1, 0, 0.3).unwrap();
        let r = kolmogorov_residual(&BetSpec::MatchOddsHome, &s, &lam(0.0, 0.0)).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn no_time_value_at_whistle() {
        let s = ScoreState::new(1, 1, 1.0).unwrap();
        let (a, b) = intensity_sensitivity(&BetSpec::MatchOddsDraw, &s, &lam(1.0, 2.0)).unwrap();
        assert_eq!((a, b), (0.0, 0.0));
    }

    #[test]
    fn next_goal_satisfies_forward_equation() {
        let l = lam(1.3, 0.9);
        for c in [0.0, 0.3, 0.77, 1.0] {
            let s = ScoreState::new(2, 0, c).unwrap();
            for bet in [BetSpec::NextGoalHome, BetSpec::NextGoalAway] {
                assert!(kolmogorov_residual(&bet, &s, &l).unwrap().abs() < 1e-8);
            }
        }
    }

    #[test]
    fn one_sided_theta_at_kickoff_and_whistle() {
        let l = lam(5.0, 5.0);
        for c in [0.0, 1.0] {
            let s = ScoreState::new(0, 0, c).unwrap();
            let r = kolmogorov_residual(&BetSpec::MatchOddsDraw, &s, &l).unwrap();
            assert!(r.abs() < 1e-6, "clock {c}: {r}");
        }
    }
}
