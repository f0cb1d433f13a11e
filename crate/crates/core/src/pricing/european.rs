use std::collections::BTreeMap;

use crate::contracts::{payoff, BetSpec, Intensities, Score, ScoreState};
use crate::error::{Error, Result};
use crate::poisson::{poisson_pmf, poisson_tail, PoissonMean};

use super::PriceResult;

/// Omitted tail mass per team at which the score sum is cut off.
pub const TAIL_TOLERANCE: f64 = 1e-13;
/// Minimum number of additional goals per team kept in the sum.
pub const CAP_FLOOR: u32 = 25;

/// Smallest number of additional goals `n ≥ CAP_FLOOR` with `P[N > n] < TAIL_TOLERANCE`,
/// together with that tail mass.
pub fn truncation_cap(mean: PoissonMean) -> (u32, f64) {
    let mut n = CAP_FLOOR;
    loop {
        let tail = poisson_tail(n as i64, mean);
        if tail < TAIL_TOLERANCE {
            return (n, tail);
        }
        n += 1;
    }
}

/// Truncated joint distribution of the final score, given a starting score and
/// the expected number of further goals of each team.
#[derive(Debug, Clone)]
pub struct ScoreDistribution {
    origin: Score,
    home: Vec<f64>,
    away: Vec<f64>,
    truncation_bound: f64,
}

impl ScoreDistribution {
    /// Distribution of the final score from `state` to the end of the match.
    pub fn new(state: &ScoreState, intensities: &Intensities) -> Result<Self> {
        Self::over_horizon(state.score(), intensities, state.remaining())
    }

    /// Distribution of the score after `horizon` units of match clock.
    pub fn over_horizon(origin: Score, intensities: &Intensities, horizon: f64) -> Result<Self> {
        if !(horizon >= 0.0) {
            return Err(Error::domain(format!(
                "horizon must be nonnegative, got {horizon}"
            )));
        }
        let m1 = PoissonMean::new(intensities.home * horizon)?;
        let m2 = PoissonMean::new(intensities.away * horizon)?;
        let (cap1, tail1) = truncation_cap(m1);
        let (cap2, tail2) = truncation_cap(m2);
        let weights = |cap: u32, m| {
            (0..=cap as i64)
                .map(|n| poisson_pmf(n, m))
                .collect::<Vec<_>>()
        };
        Ok(ScoreDistribution {
            origin,
            home: weights(cap1, m1),
            away: weights(cap2, m2),
            truncation_bound: tail1 + tail2,
        })
    }

    pub fn origin(&self) -> Score {
        self.origin
    }

    /// Mass outside the retained grid.
    pub fn truncation_bound(&self) -> f64 {
        self.truncation_bound
    }

    /// Largest number of additional (home, away) goals retained.
    pub fn caps(&self) -> (u32, u32) {
        ((self.home.len() - 1) as u32, (self.away.len() - 1) as u32)
    }

    /// `E[f(N_T¹, N_T²)]` over the retained grid.
    pub fn expectation(&self, f: impl Fn(u32, u32) -> f64) -> f64 {
        let Score { home: h0, away: a0 } = self.origin;
        let mut total = 0.0;
        for (i, &p) in self.home.iter().enumerate() {
            let h = h0 + i as u32;
            let inner: f64 = self
                .away
                .iter()
                .enumerate()
                .map(|(j, &q)| q * f(h, a0 + j as u32))
                .sum();
            total += p * inner;
        }
        total
    }

    /// Probability of reaching the final score `(home, away)`.
    pub fn probability(&self, home: u32, away: u32) -> f64 {
        let (Some(i), Some(j)) = (
            home.checked_sub(self.origin.home),
            away.checked_sub(self.origin.away),
        ) else {
            return 0.0;
        };
        match (self.home.get(i as usize), self.away.get(j as usize)) {
            (Some(p), Some(q)) => p * q,
            _ => 0.0,
        }
    }

    /// Final scores on the retained grid with their probabilities.
    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        let Score { home: h0, away: a0 } = self.origin;
        self.home.iter().enumerate().flat_map(move |(i, &p)| {
            self.away
                .iter()
                .enumerate()
                .map(move |(j, &q)| ((h0 + i as u32, a0 + j as u32), p * q))
        })
    }
}

/// Value of an arbitrary payoff on the final score. The truncation bound is the
/// omitted probability mass; multiply by `max |payoff|` for a value bound.
pub fn price_payoff(
    payoff: impl Fn(u32, u32) -> f64,
    state: &ScoreState,
    intensities: &Intensities,
) -> Result<PriceResult> {
    let dist = ScoreDistribution::new(state, intensities)?;
    Ok(PriceResult {
        value: dist.expectation(payoff),
        truncation_bound: dist.truncation_bound(),
    })
}

/// Value of a European bet by summing its payoff over all final scores
/// reachable from the current state.
pub fn price_european(
    bet: &BetSpec,
    state: &ScoreState,
    intensities: &Intensities,
) -> Result<PriceResult> {
    if !bet.is_european() {
        return Err(Error::NotEuropean(bet.to_string()));
    }
    let dist = ScoreDistribution::new(state, intensities)?;
    let (mut win, mut lose) = (0.0, 0.0);
    for ((h, a), p) in dist.iter() {
        if payoff(bet, h, a)? > 0.5 {
            win += p;
        } else {
            lose += p;
        }
    }
    // Summing the smaller side keeps settled bets exactly at 0 or 1.
    let value = if win > lose { 1.0 - lose } else { win };
    Ok(PriceResult {
        value: value.clamp(0.0, 1.0),
        truncation_bound: dist.truncation_bound(),
    })
}

/// Model values of every Arrow-Debreu (Correct Score) bet reachable from the
/// current state within the truncation caps.
pub fn arrow_debreu_prices(
    state: &ScoreState,
    intensities: &Intensities,
) -> Result<BTreeMap<(u32, u32), f64>> {
    Ok(ScoreDistribution::new(state, intensities)?.iter().collect())
}

/// Payoff of `bet` on each of the given final scores.
pub fn payoff_table<'a>(
    bet: &BetSpec,
    scores: impl IntoIterator<Item = &'a (u32, u32)>,
) -> Result<BTreeMap<(u32, u32), f64>> {
    scores
        .into_iter()
        .map(|&(h, a)| Ok(((h, a), payoff(bet, h, a)?)))
        .collect()
}

/// Values a payoff from Arrow-Debreu prices, `Σ Π(k₁, k₂)·AD(k₁, k₂)`.
pub fn static_replication(
    payoff_table: &BTreeMap<(u32, u32), f64>,
    ad_prices: &BTreeMap<(u32, u32), f64>,
) -> Result<f64> {
    payoff_table.iter().try_fold(0.0, |acc, (&(h, a), &pay)| {
        let ad = ad_prices
            .get(&(h, a))
            .ok_or(Error::MissingArrowDebreu(h, a))?;
        Ok(acc + pay * ad)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contracts::GoalLine;

    fn st(h: u32, a: u32, c: f64) -> ScoreState {
        ScoreState::new(h, a, c).unwrap()
    }

    fn lam(h: f64, a: f64) -> Intensities {
        Intensities::new(h, a).unwrap()
    }

    #[test]
    fn frozen_game_is_settled() {
        let r = price_european(&BetSpec::MatchOddsDraw, &st(1, 1, 0.5), &lam(0.0, 0.0)).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn locked_payoff() {
        for l in [lam(0.3, 2.0), lam(5.0, 5.0)] {
            for c in [0.0, 0.4, 0.99] {
                let r = price_european(&BetSpec::OverLine(GoalLine(2)), &st(2, 1, c), &l).unwrap();
                assert_eq!(r.value, 1.0);
            }
        }
    }

    #[test]
    fn rejects_path_dependent_bets() {
        assert!(matches!(
            price_european(&BetSpec::NextGoalHome, &st(0, 0, 0.0), &lam(1.0, 1.0)),
            Err(Error::NotEuropean(_))
        ));
    }

    #[test]
    fn truncation_bound_is_small() {
        for l in [0.0, 0.5, 2.0, 5.0, 10.0] {
            let r = price_european(&BetSpec::MatchOddsHome, &st(0, 0, 0.0), &lam(l, l)).unwrap();
            assert!(r.truncation_bound <= 1e-10);
        }
        let (cap, tail) = truncation_cap(PoissonMean::new(10.0).unwrap());
        assert!(cap > CAP_FLOOR && tail < TAIL_TOLERANCE);
        assert!(poisson_tail(cap as i64 - 1, PoissonMean::new(10.0).unwrap()) >= TAIL_TOLERANCE);
    }

    #[test]
    fn static_replication_examples() {
        let s = st(0, 0, 0.3);
        let l = lam(1.2, 0.8);
        let ad = arrow_debreu_prices(&s, &l).unwrap();
        let bound = ScoreDistribution::new(&s, &l).unwrap().truncation_bound();
        let ones: BTreeMap<_, _> = ad.keys().map(|&k| (k, 1.0)).collect();
        let total = static_replication(&ones, &ad).unwrap();
        assert!((total - 1.0).abs() <= bound + 1e-15);

        let home = payoff_table(&BetSpec::MatchOddsHome, ad.keys()).unwrap();
        let v = static_replication(&home, &ad).unwrap();
        let direct = price_european(&BetSpec::MatchOddsHome, &s, &l)
            .unwrap()
            .value;
        assert!((v - direct).abs() < 1e-10);

        let cs = payoff_table(&BetSpec::CorrectScore { home: 1, away: 0 }, ad.keys()).unwrap();
        assert_eq!(static_replication(&cs, &ad).unwrap(), ad[&(1, 0)]);

        let mut partial = ad.clone();
        partial.remove(&(2, 2));
        assert!(matches!(
            static_replication(&home, &partial),
            Err(Error::MissingArrowDebreu(2, 2))
        ));
    }
}
