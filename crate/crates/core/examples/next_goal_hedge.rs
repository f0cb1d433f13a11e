//! Replicates a Match Odds bet with the Next Goal pair along a simulated match
//! and reports how closely the portfolio tracks the target.
//!
//! ```text
//! cargo run --release --example next_goal_hedge -- [step_s] [seed]
//! ```

use inplay::hedging::{replay_hedge, HedgeTimeline, IntensitySource, ReplayConfig};
use inplay::oracle::simulate_paths;
use inplay::{BetSpec, GoalEvent, Intensities, Score, ScoreState};

fn main() -> inplay::Result<()> {
    let mut args = std::env::args().skip(1);
    let step_s: f64 = args
        .next()
        .map_or(1.0, |s| s.parse().expect("step in seconds"));
    let seed: u64 = args.next().map_or(7, |s| s.parse().expect("integer seed"));

    let lambda = Intensities::new(1.4, 1.1)?;
    let length_s = 90.0 * 60.0;
    let path = simulate_paths(&lambda, &ScoreState::new(0, 0, 0.0)?, 1, seed).remove(0);
    let goals: Vec<GoalEvent> = path
        .events
        .iter()
        .map(|e| GoalEvent {
            timestamp_s: e.clock * length_s,
            team: e.team,
        })
        .collect();

    println!(
        "goals: {:?}",
        goals
            .iter()
            .map(|g| (g.timestamp_s.round(), g.team))
            .collect::<Vec<_>>()
    );
    for target in [
        BetSpec::MatchOddsHome,
        BetSpec::MatchOddsDraw,
        "OVER_2_5".parse()?,
        "HT_FT_DRAW_HOME".parse()?,
    ] {
        let timeline =
            HedgeTimeline::model_grid(length_s, 0.5, Score::default(), goals.clone(), 0.0, step_s);
        let config = ReplayConfig {
            target,
            instruments: [BetSpec::NextGoalHome, BetSpec::NextGoalAway],
            intensities: IntensitySource::Fixed(lambda),
            market_values: false,
        };
        let report = replay_hedge(&timeline, &config)?;
        let s = &report.summary;
        println!(
            "{target:<18} terminal {:.3e}  max tracking {:.3e}  max jump mismatch {:.1e}  ledger {:.1e}",
            s.terminal_error, s.max_tracking_error, s.max_jump_mismatch, s.max_ledger_error
        );
    }
    Ok(())
}
