use crate::contracts::{BetSpec, GoalLine, Intensities, ScoreState};
use crate::error::{Error, Result};
use crate::poisson::{poisson_cdf, poisson_pmf, poisson_tail, skellam_pmf, PoissonMean};

use super::european::truncation_cap;
use super::PriceResult;

/// Value of a European bet from its closed-form expression.
///
/// Totals-based bets use the Poisson law of the total remaining goals, margin
/// based bets the Skellam law of the remaining goal difference. Odd/Even is
/// priced from the parity of the remaining goals relative to the current total:
/// `P(remaining even) = e^{-Λ} cosh Λ`.
pub fn price_closed_form(
    bet: &BetSpec,
    state: &ScoreState,
    intensities: &Intensities,
) -> Result<PriceResult> {
    let horizon = state.remaining();
    let m1 = PoissonMean::new(intensities.home * horizon)?;
    let m2 = PoissonMean::new(intensities.away * horizon)?;
    let total = PoissonMean::new(m1.value() + m2.value())?;
    let (n1, n2) = (state.home_goals as i64, state.away_goals as i64);
    let goals = n1 + n2;
    let lead = n1 - n2;

    let result = match *bet {
        BetSpec::CorrectScore { home, away } => PriceResult::exact(
            poisson_pmf(home as i64 - n1, m1) * poisson_pmf(away as i64 - n2, m2),
        ),
        BetSpec::OverLine(GoalLine(x)) => PriceResult::exact(poisson_tail(x as i64 - goals, total)),
        BetSpec::UnderLine(GoalLine(x)) => PriceResult::exact(poisson_cdf(x as i64 - goals, total)),
        BetSpec::OddTotal | BetSpec::EvenTotal => {
            let lam = total.value();
            let remaining_even = 0.5 * (1.0 + (-2.0 * lam).exp());
            let remaining_odd = -0.5 * (-2.0 * lam).exp_m1();
            let want_even = matches!(bet, BetSpec::EvenTotal) == (goals % 2 == 0);
            PriceResult::exact(if want_even {
                remaining_even
            } else {
                remaining_odd
            })
        }
        BetSpec::WinningMargin(k) => PriceResult::exact(skellam_pmf(k as i64 - lead, m1, m2)),
        BetSpec::MatchOddsDraw => PriceResult::exact(skellam_pmf(-lead, m1, m2)),
        BetSpec::MatchOddsHome | BetSpec::MatchOddsAway => {
            // Remaining margin d ranges over [-cap2, cap1].
            let (cap1, tail1) = truncation_cap(m1);
            let (cap2, tail2) = truncation_cap(m2);
            let (lo, hi) = if matches!(bet, BetSpec::MatchOddsHome) {
                ((1 - lead).max(-(cap2 as i64)), cap1 as i64)
            } else {
                (-(cap2 as i64), (-lead - 1).min(cap1 as i64))
            };
            let value: f64 = (lo..=hi).map(|d| skellam_pmf(d, m1, m2)).sum();
            PriceResult {
                value,
                truncation_bound: tail1 + tail2,
            }
        }
        BetSpec::NextGoalHome | BetSpec::NextGoalAway | BetSpec::HalfTimeFullTime { .. } => {
            return Err(Error::NotEuropean(bet.to_string()))
        }
    };
    Ok(PriceResult {
        value: result.value.clamp(0.0, 1.0),
        ..result
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::price_european;

    #[test]
    fn terminal_correct_score() {
        let s = ScoreState::new(2, 1, 1.0).unwrap();
        let l = Intensities::new(1.0, 1.0).unwrap();
        let r = price_closed_form(&BetSpec::CorrectScore { home: 2, away: 1 }, &s, &l).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn even_total_at_kickoff() {
        let s = ScoreState::new(0, 0, 0.0).unwrap();
        let l = Intensities::new(0.5, 0.5).unwrap();
        let even = price_closed_form(&BetSpec::EvenTotal, &s, &l)
            .unwrap()
            .value;
        // Σ_k P(2k; 1) = e^{-1} cosh 1
        let oracle: f64 = (0..60)
            .map(|k| poisson_pmf(2 * k, PoissonMean::new(1.0).unwrap()))
            .sum();
        assert!((even - 0.567_667_641_618_306_3).abs() < 1e-15);
        assert!((even - oracle).abs() < 1e-15);
    }

    #[test]
    fn parity_flips_with_current_total() {
        let l = Intensities::new(0.0, 0.0).unwrap();
        let even_now = ScoreState::new(1, 1, 0.7).unwrap();
        let odd_now = ScoreState::new(2, 1, 0.7).unwrap();
        assert_eq!(
            price_closed_form(&BetSpec::EvenTotal, &even_now, &l)
                .unwrap()
                .value,
            1.0
        );
        assert_eq!(
            price_closed_form(&BetSpec::OddTotal, &even_now, &l)
                .unwrap()
                .value,
            0.0
        );
        assert_eq!(
            price_closed_form(&BetSpec::OddTotal, &odd_now, &l)
                .unwrap()
                .value,
            1.0
        );
    }

    #[test]
    fn winning_margin_zero_is_skellam() {
        let s = ScoreState::new(0, 0, 0.0).unwrap();
        let l = Intensities::new(1.0, 1.0).unwrap();
        let r = price_closed_form(&BetSpec::WinningMargin(0), &s, &l).unwrap();
        assert!((r.value - 0.308_508_322_553_671_04).abs() < 1e-15);
    }

    #[test]
    fn agrees_with_double_sum() {
        let bets = [
            BetSpec::MatchOddsHome,
            BetSpec::MatchOddsAway,
            BetSpec::MatchOddsDraw,
            BetSpec::CorrectScore { home: 3, away: 1 },
            BetSpec::OverLine(GoalLine(3)),
            BetSpec::UnderLine(GoalLine(1)),
            BetSpec::OddTotal,
            BetSpec::EvenTotal,
            BetSpec::WinningMargin(-2),
        ];
        let s = ScoreState::new(1, 2, 0.35).unwrap();
        let l = Intensities::new(2.2, 0.9).unwrap();
        for bet in bets {
            let a = price_closed_form(&bet, &s, &l).unwrap().value;
            let b = price_european(&bet, &s, &l).unwrap().value;
            assert!((a - b).abs() < 1e-12, "{bet}: {a} vs {b}");
        }
    }
}
