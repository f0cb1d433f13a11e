//! Checks model prices of path-dependent bets against simulation, and of
//! European bets against exact enumeration in double-double arithmetic.
//!
//! ```text
//! cargo run --release --example monte_carlo -- [paths] [seed]
//! ```

use inplay::contracts::payoff;
use inplay::oracle::{enumerate_price, mc_price};
use inplay::pricing::{price, price_european, MatchContext};
use inplay::{BetSpec, GoalLine, Intensities, Outcome, ScoreState};

fn main() -> inplay::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args
        .next()
        .map_or(1_000_000, |s| s.parse().expect("path count"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));
    let lambda = Intensities::new(1.2, 0.8)?;
    let kickoff = ScoreState::new(0, 0, 0.0)?;
    let ctx = MatchContext::default();

    println!(
        "{:<20} {:>10} {:>10} {:>9} {:>6}",
        "bet", "model", "simulated", "stderr", "z"
    );
    let bets = [
        BetSpec::NextGoalHome,
        BetSpec::NextGoalAway,
        BetSpec::HalfTimeFullTime {
            half_time: Outcome::Draw,
            full_time: Outcome::Home,
        },
        BetSpec::HalfTimeFullTime {
            half_time: Outcome::Away,
            full_time: Outcome::Home,
        },
        BetSpec::MatchOddsDraw,
    ];
    for bet in bets {
        let model = price(&bet, &kickoff, &lambda, &ctx)?.value;
        let mc = mc_price(&bet, &kickoff, &lambda, &ctx, n, seed)?;
        let z = (mc.estimate - model) / mc.stderr;
        println!(
            "{:<20} {model:>10.6} {:>10.6} {:>9.2e} {z:>6.2}",
            bet.to_string(),
            mc.estimate,
            mc.stderr
        );
    }

    println!();
    let state = ScoreState::new(2, 1, 0.5)?;
    for bet in [
        BetSpec::MatchOddsAway,
        BetSpec::OverLine(GoalLine(4)),
        BetSpec::CorrectScore { home: 3, away: 1 },
    ] {
        let exact = enumerate_price(|h, a| payoff(&bet, h, a).unwrap(), &state, &lambda, 60)?;
        let summed = price_european(&bet, &state, &lambda)?.value;
        println!(
            "{:<20} enumerated {:.16} (remainder {:.0e})  summed {summed:.16}",
            bet.to_string(),
            exact.value,
            exact.remainder
        );
    }
    Ok(())
}
