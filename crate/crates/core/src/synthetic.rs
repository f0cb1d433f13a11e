//! Model-consistent market data for tests, examples and demonstrations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::calibration::{
    CalibrationResult, IntensitySeries, QuoteSnapshot, SeriesEntry, SeriesPoint,
};
use crate::contracts::{BetSpec, GoalEvent, GoalLine, Intensities, Quote, Score, ScoreState};
use crate::error::Result;
use crate::pricing::{price, MatchContext};

/// The 31 bets of the standard calibration set: the three Match Odds
/// selections, Over and Under 0.5 to 5.5, and Correct Score up to 3-3.
pub fn calibration_bets() -> Vec<BetSpec> {
    bet_set(5)
}

/// Like [`calibration_bets`] with Over/Under lines up to 7.5 (35 bets).
pub fn extended_calibration_bets() -> Vec<BetSpec> {
    bet_set(7)
}

fn bet_set(max_line: u32) -> Vec<BetSpec> {
    let mut bets = vec![
        BetSpec::MatchOddsHome,
        BetSpec::MatchOddsAway,
        BetSpec::MatchOddsDraw,
    ];
    for x in 0..=max_line {
        bets.push(BetSpec::OverLine(GoalLine(x)));
        bets.push(BetSpec::UnderLine(GoalLine(x)));
    }
    for home in 0..=3 {
        for away in 0..=3 {
            bets.push(BetSpec::CorrectScore { home, away });
        }
    }
    bets
}

/// Half-width of a synthetic quote around a model value. The requested spread
/// is narrowed near 0 and 1 so that both sides stay valid odds.
fn half_width(value: f64, spread: f64) -> f64 {
    (0.5 * spread).min(0.5 * value).min(0.5 * (1.0 - value))
}

fn quote_around(bet: BetSpec, mid: f64, half: f64) -> Quote {
    let side = |v: f64| (v > 0.0 && v <= 1.0).then(|| 1.0 / v);
    Quote {
        bet,
        back_decimal: side(mid + half),
        lay_decimal: side(mid - half),
    }
}

/// A snapshot whose mids are the model values at `intensities`.
pub fn model_snapshot(
    timestamp_s: f64,
    state: ScoreState,
    context: MatchContext,
    bets: &[BetSpec],
    intensities: &Intensities,
    spread: f64,
) -> Result<QuoteSnapshot> {
    let quotes = bets
        .iter()
        .map(|bet| {
            let v = price(bet, &state, intensities, &context)?.value;
            Ok(quote_around(*bet, v, half_width(v, spread)))
        })
        .collect::<Result<_>>()?;
    Ok(QuoteSnapshot {
        timestamp_s,
        state,
        context,
        quotes,
    })
}

/// Like [`model_snapshot`], with every mid shifted by an independent uniform
/// draw of up to a quarter of the quote's spread in either direction.
pub fn noisy_snapshot(
    timestamp_s: f64,
    state: ScoreState,
    context: MatchContext,
    bets: &[BetSpec],
    intensities: &Intensities,
    spread: f64,
    rng: &mut impl Rng,
) -> Result<QuoteSnapshot> {
    let quotes = bets
        .iter()
        .map(|bet| {
            let v = price(bet, &state, intensities, &context)?.value;
            let half = half_width(v, spread);
            let shift = rng.random_range(-0.5..=0.5) * half;
            Ok(quote_around(*bet, v + shift, half))
        })
        .collect::<Result<_>>()?;
    Ok(QuoteSnapshot {
        timestamp_s,
        state,
        context,
        quotes,
    })
}

/// Model-consistent quotes every `step_s` seconds from kick-off to the final
/// whistle, following the score implied by `goals`.
#[allow(clippy::too_many_arguments)]
pub fn model_timeline(
    intensities: &Intensities,
    start: Score,
    goals: &[GoalEvent],
    bets: &[BetSpec],
    step_s: f64,
    match_length_s: f64,
    half_clock: f64,
    spread: f64,
) -> Result<Vec<QuoteSnapshot>> {
    let score_at = |t: f64| {
        goals
            .iter()
            .filter(|g| g.timestamp_s <= t)
            .fold(start, |s, g| s.with_goal(g.team))
    };
    let score_before = |t: f64| {
        goals
            .iter()
            .filter(|g| g.timestamp_s < t)
            .fold(start, |s, g| s.with_goal(g.team))
    };
    let half_s = half_clock * match_length_s;
    let steps = (match_length_s / step_s).floor() as usize;
    (0..=steps)
        .map(|k| {
            let t = k as f64 * step_s;
            let clock = (t / match_length_s).min(1.0);
            let state = ScoreState::from_score(score_at(t), clock)?;
            let ht = (clock >= half_clock).then(|| score_before(half_s));
            let context = MatchContext::new(half_clock, ht)?;
            model_snapshot(t, state, context, bets, intensities, spread)
        })
        .collect()
}

fn fit_point(timestamp_s: f64, intensities: Intensities) -> SeriesPoint {
    SeriesPoint {
        timestamp_s,
        entry: SeriesEntry::Fit(CalibrationResult {
            intensities,
            residual: 0.0,
            stderr_home: 0.0,
            stderr_away: 0.0,
            iterations: 0,
            converged: true,
        }),
    }
}

/// Series whose total intensity is `total(τ)`, split between the teams in the
/// fixed proportion `home_share`, sampled every `step_s` seconds.
pub fn deterministic_series(
    total: impl Fn(f64) -> f64,
    home_share: f64,
    steps: usize,
    step_s: f64,
    match_length_s: f64,
) -> IntensitySeries {
    let points = (0..=steps)
        .map(|k| {
            let t = k as f64 * step_s;
            let l = total(t / match_length_s);
            fit_point(
                t,
                Intensities {
                    home: home_share * l,
                    away: (1.0 - home_share) * l,
                },
            )
        })
        .collect();
    IntensitySeries {
        match_length_s,
        points,
    }
}

/// Series whose log total intensity is a Brownian motion with drift `mu` and
/// volatility `sigma` per unit of match clock, started at `total0`.
pub fn geometric_series(
    total0: f64,
    mu: f64,
    sigma: f64,
    steps: usize,
    step_s: f64,
    match_length_s: f64,
    seed: u64,
) -> IntensitySeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dt = step_s / match_length_s;
    let mut log_total = total0.ln();
    let mut points = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        if k > 0 {
            let z: f64 = rng.sample(StandardNormal);
            log_total += mu * dt + sigma * dt.sqrt() * z;
        }
        let l = log_total.exp();
        points.push(fit_point(
            k as f64 * step_s,
            Intensities {
                home: 0.55 * l,
                away: 0.45 * l,
            },
        ));
    }
    IntensitySeries {
        match_length_s,
        points,
    }
}
