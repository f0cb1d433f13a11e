//! Prices the whole bet catalogue at one match state and prints model odds
//! next to the implied probabilities.
//!
//! ```text
//! cargo run --example price_catalogue -- [home:away] [minute] [lambda_home] [lambda_away]
//! ```

use inplay::pricing::{price, MatchContext};
use inplay::{BetSpec, GoalLine, Outcome, Score, ScoreState};

fn catalogue() -> Vec<BetSpec> {
    let mut bets = vec![
        BetSpec::MatchOddsHome,
        BetSpec::MatchOddsDraw,
        BetSpec::MatchOddsAway,
    ];
    bets.extend((0..=4).flat_map(|x| {
        [
            BetSpec::OverLine(GoalLine(x)),
            BetSpec::UnderLine(GoalLine(x)),
        ]
    }));
    bets.extend([BetSpec::OddTotal, BetSpec::EvenTotal]);
    bets.extend((-2..=2).map(BetSpec::WinningMargin));
    bets.extend(
        (0..=2).flat_map(|h| (0..=2).map(move |a| BetSpec::CorrectScore { home: h, away: a })),
    );
    bets.extend([BetSpec::NextGoalHome, BetSpec::NextGoalAway]);
    bets.extend(Outcome::ALL.iter().flat_map(|&h| {
        Outcome::ALL
            .iter()
            .map(move |&f| BetSpec::HalfTimeFullTime {
                half_time: h,
                full_time: f,
            })
    }));
    bets
}

fn main() -> inplay::Result<()> {
    let mut args = std::env::args().skip(1);
    let score: Score = args.next().as_deref().unwrap_or("0:0").parse()?;
    let minute: f64 = args.next().map_or(0.0, |s| s.parse().expect("minute"));
    let home: f64 = args
        .next()
        .map_or(1.4, |s| s.parse().expect("home intensity"));
    let away: f64 = args
        .next()
        .map_or(1.1, |s| s.parse().expect("away intensity"));

    let state = ScoreState::at_minute(score, minute, 90.0)?;
    let lambda = inplay::Intensities::new(home, away)?;
    // After the break the half-time score is assumed to be the current one.
    let ctx = MatchContext::new(0.5, (state.clock >= 0.5).then_some(score))?;

    println!("score {score} at minute {minute}, intensities ({home}, {away}) per match\n");
    println!("{:<22} {:>10} {:>10}", "bet", "value", "odds");
    for bet in catalogue() {
        let p = price(&bet, &state, &lambda, &ctx)?;
        let odds = if p.value > 0.0 {
            format!("{:.2}", 1.0 / p.value)
        } else {
            "-".into()
        };
        println!("{:<22} {:>10.6} {:>10}", bet.to_string(), p.value, odds);
    }
    Ok(())
}
