//! Values European bets from Correct Score (Arrow-Debreu) prices and compares
//! the result with direct pricing.
//!
//! ```text
//! cargo run --example static_replication
//! ```

use inplay::pricing::{arrow_debreu_prices, payoff_table, price_european, static_replication};
use inplay::{BetSpec, GoalLine, Intensities, ScoreState};

fn main() -> inplay::Result<()> {
    let state = ScoreState::new(1, 0, 0.4)?;
    let lambda = Intensities::new(1.5, 1.2)?;
    let ad = arrow_debreu_prices(&state, &lambda)?;
    println!(
        "{} reachable final scores, total mass {:.15}",
        ad.len(),
        ad.values().sum::<f64>()
    );
    println!(
        "most likely: {:?}",
        ad.iter().max_by(|a, b| a.1.total_cmp(b.1)).unwrap()
    );

    for bet in [
        BetSpec::MatchOddsAway,
        BetSpec::UnderLine(GoalLine(2)),
        BetSpec::EvenTotal,
        BetSpec::WinningMargin(2),
    ] {
        let replicated = static_replication(&payoff_table(&bet, ad.keys())?, &ad)?;
        let direct = price_european(&bet, &state, &lambda)?.value;
        println!(
            "{:<18} replicated {replicated:.12}  direct {direct:.12}  diff {:.1e}",
            bet.to_string(),
            replicated - direct
        );
    }
    Ok(())
}
