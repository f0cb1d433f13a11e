//! Writes a model-consistent match to CSV: quotes every minute for the
//! calibration set plus the Next Goal pair, and the goal log.
//!
//! ```text
//! cargo run --example write_fixture -- <out_dir> [lambda_home] [lambda_away]
//! ```
//!
//! The files feed the command line tool directly, for example
//! `inplay calibrate --quotes <out_dir>/quotes.csv --events <out_dir>/events.csv --out series.csv`.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use inplay::io::{self as files, EventLog, QuoteBatch};
use inplay::synthetic::{calibration_bets, model_timeline};
use inplay::{BetSpec, GoalEvent, Intensities, Score, Side};

fn main() -> inplay::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "fixture".into()));
    let home: f64 = args
        .next()
        .map_or(1.3, |s| s.parse().expect("home intensity"));
    let away: f64 = args
        .next()
        .map_or(1.1, |s| s.parse().expect("away intensity"));
    let lambda = Intensities::new(home, away)?;

    let goals = vec![
        GoalEvent {
            timestamp_s: 1234.0,
            team: Side::Home,
        },
        GoalEvent {
            timestamp_s: 3100.0,
            team: Side::Away,
        },
        GoalEvent {
            timestamp_s: 4444.0,
            team: Side::Home,
        },
    ];
    let mut bets = calibration_bets();
    bets.extend([BetSpec::NextGoalHome, BetSpec::NextGoalAway]);
    let snapshots = model_timeline(
        &lambda,
        Score::default(),
        &goals,
        &bets,
        60.0,
        5400.0,
        0.5,
        0.02,
    )?;
    let batches: Vec<QuoteBatch> = snapshots
        .iter()
        .map(|s| QuoteBatch::from_snapshot("fixture", s))
        .collect();

    std::fs::create_dir_all(&dir)?;
    files::write_quotes(
        BufWriter::new(File::create(dir.join("quotes.csv"))?),
        &batches,
    )?;
    let log = EventLog {
        match_id: "fixture".into(),
        goals,
    };
    files::write_events(BufWriter::new(File::create(dir.join("events.csv"))?), &log)?;
    println!(
        "wrote {} snapshots of {} quotes and {} goals (final score {}) to {}",
        batches.len(),
        bets.len(),
        log.goals.len(),
        log.final_score(),
        dir.display()
    );
    Ok(())
}
