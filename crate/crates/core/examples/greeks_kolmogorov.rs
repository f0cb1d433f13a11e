//! Goal deltas and theta of a few bets through a goalless match, with the
//! residual of `θ + λ₁δ₁X + λ₂δ₂X`, which vanishes between goals.
//!
//! ```text
//! cargo run --example greeks_kolmogorov
//! ```

use inplay::pricing::{greeks, intensity_sensitivity, kolmogorov_residual, price, MatchContext};
use inplay::{BetSpec, GoalLine, Intensities, ScoreState};

fn main() -> inplay::Result<()> {
    let lambda = Intensities::new(1.2, 0.8)?;
    let ctx = MatchContext::default();
    let bets = [
        BetSpec::MatchOddsHome,
        BetSpec::MatchOddsDraw,
        BetSpec::OverLine(GoalLine(2)),
        BetSpec::CorrectScore { home: 0, away: 0 },
    ];
    for bet in bets {
        println!("{bet}");
        println!(
            "  {:>6} {:>10} {:>10} {:>10} {:>10} {:>11} {:>10}",
            "clock", "value", "delta_h", "delta_a", "theta", "residual", "dX/dl_h"
        );
        for clock in [0.0, 0.25, 0.5, 0.75, 0.95] {
            let s = ScoreState::new(0, 0, clock)?;
            let v = price(&bet, &s, &lambda, &ctx)?.value;
            let g = greeks(&bet, &s, &lambda, &ctx)?;
            let r = kolmogorov_residual(&bet, &s, &lambda)?;
            let (dh, _) = intensity_sensitivity(&bet, &s, &lambda)?;
            println!(
                "  {clock:>6.2} {v:>10.6} {:>10.6} {:>10.6} {:>10.6} {r:>11.2e} {dh:>10.6}",
                g.delta_home, g.delta_away, g.theta
            );
        }
    }
    Ok(())
}
