//! Command line front end.
//!
//! Exit codes: `0` success, `1` usage error, `2` data error, `3` numerical
//! failure (non-convergence or a singular hedge).

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::calibration::{calibrate_series, estimate_drift_vol, CalibrationConfig, SeriesEntry};
use crate::contracts::{BetSpec, Intensities, Score, ScoreState};
use crate::error::{Error, Result};
use crate::hedging::{replay_hedge, HedgeTimeline, IntensitySource, ReplayConfig, ReplayStep};
use crate::io::{self as files, MatchTimeline};
use crate::oracle::simulate_paths;
use crate::pricing::{greeks, price, MatchContext};

#[derive(Debug, Parser)]
#[command(
    name = "inplay",
    version,
    about = "Price, calibrate and hedge in-play football bets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Value, goal deltas and theta of one bet, as JSON.
    #[command(allow_negative_numbers = true)]
    Price {
        #[arg(long)]
        bet: BetSpec,
        /// Current score, `H:A`.
        #[arg(long, default_value = "0:0")]
        score: Score,
        /// Minutes of playing time elapsed.
        #[arg(long, default_value_t = 0.0)]
        minute: f64,
        #[arg(long)]
        lambda_home: f64,
        #[arg(long)]
        lambda_away: f64,
        #[arg(long, default_value_t = 90.0)]
        match_length: f64,
        #[arg(long, default_value_t = 45.0)]
        half_length: f64,
        /// Score at half time, required for Half Time / Full Time bets after the break.
        #[arg(long)]
        half_time_score: Option<Score>,
    },
    /// Implied intensity series from a quotes file.
    Calibrate {
        #[arg(long)]
        quotes: PathBuf,
        #[arg(long)]
        events: PathBuf,
        #[arg(long, default_value_t = 60.0)]
        step_s: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 90.0)]
        match_length: f64,
        #[arg(long, default_value_t = 45.0)]
        half_length: f64,
        #[arg(long, default_value_t = CalibrationConfig::default().max_iterations)]
        max_iterations: usize,
    },
    /// Replays a dynamic hedge of a target bet along the quoted match.
    #[command(allow_negative_numbers = true)]
    HedgeReplay {
        #[arg(long)]
        quotes: PathBuf,
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        target: BetSpec,
        /// Two hedging instruments, comma separated.
        #[arg(long, default_value = "NEXT_GOAL_HOME,NEXT_GOAL_AWAY")]
        instruments: InstrumentPair,
        #[arg(long)]
        out_dir: PathBuf,
        /// Calibration grid used when no fixed intensities are given.
        #[arg(long, default_value_t = 60.0)]
        step_s: f64,
        /// Hedge with fixed intensities instead of calibrating them.
        #[arg(long, requires = "lambda_away")]
        lambda_home: Option<f64>,
        #[arg(long, requires = "lambda_home")]
        lambda_away: Option<f64>,
        /// Mark positions at model values rather than market mids.
        #[arg(long)]
        model_values: bool,
        #[arg(long, default_value_t = 90.0)]
        match_length: f64,
        #[arg(long, default_value_t = 45.0)]
        half_length: f64,
    },
    /// Terminal scores of simulated matches, as CSV.
    #[command(allow_negative_numbers = true)]
    Simulate {
        #[arg(long)]
        lambda_home: f64,
        #[arg(long)]
        lambda_away: f64,
        #[arg(long)]
        paths: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "0:0")]
        score: Score,
        #[arg(long, default_value_t = 0.0)]
        minute: f64,
        #[arg(long, default_value_t = 90.0)]
        match_length: f64,
    },
    /// Drift and volatility of the log total intensity of a series, as JSON.
    Report {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 90.0)]
        match_length: f64,
    },
}

#[derive(Debug, Clone, Copy)]
struct InstrumentPair([BetSpec; 2]);

impl FromStr for InstrumentPair {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bets = s
            .split(',')
            .map(|t| t.trim().parse::<BetSpec>().map_err(|e| e.to_string()))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        match bets[..] {
            [a, b] => Ok(InstrumentPair([a, b])),
            _ => Err(format!(
                "expected two comma-separated bets, got {}",
                bets.len()
            )),
        }
    }
}

#[derive(Serialize)]
struct PriceOutput {
    bet: BetSpec,
    score: String,
    clock: f64,
    value: f64,
    truncation_bound: f64,
    delta_home: f64,
    delta_away: f64,
    theta: f64,
}

/// Parses `args` (including the program name) and runs the command, printing
/// diagnostics to stderr. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            if code == 0 {
                let _ = write!(stdout, "{e}");
            } else {
                eprint!("{e}");
            }
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

fn load_timeline(
    quotes: &Path,
    events: &Path,
    match_length: f64,
    half_length: f64,
) -> Result<MatchTimeline> {
    let batches = files::read_quotes(open(quotes)?)?;
    let log = files::read_events(open(events)?)?;
    MatchTimeline::assemble(&batches, log, match_length, half_length)
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Price {
            bet,
            score,
            minute,
            lambda_home,
            lambda_away,
            match_length,
            half_length,
            half_time_score,
        } => {
            let state = ScoreState::at_minute(score, minute, match_length)?;
            let lambda = Intensities::new(lambda_home, lambda_away)?;
            let ctx = MatchContext::new(half_length / match_length, half_time_score)?;
            let p = price(&bet, &state, &lambda, &ctx)?;
            let g = greeks(&bet, &state, &lambda, &ctx)?;
            let out = PriceOutput {
                bet,
                score: score.to_string(),
                clock: state.clock,
                value: p.value,
                truncation_bound: p.truncation_bound,
                delta_home: g.delta_home,
                delta_away: g.delta_away,
                theta: g.theta,
            };
            serde_json::to_writer_pretty(&mut *stdout, &out)?;
            writeln!(stdout)?;
        }
        Command::Calibrate {
            quotes,
            events,
            step_s,
            out,
            match_length,
            half_length,
            max_iterations,
        } => {
            let timeline = load_timeline(&quotes, &events, match_length, half_length)?;
            let config = CalibrationConfig {
                max_iterations,
                ..CalibrationConfig::default()
            };
            let series = calibrate_series(
                &timeline.snapshots,
                step_s,
                timeline.match_length_s(),
                &config,
            )?;
            let mut w = create(&out)?;
            files::write_series(&mut w, &series)?;
            w.flush()?;
            let failed = series
                .points
                .iter()
                .filter(|p| matches!(p.entry, SeriesEntry::Fit(f) if !f.converged))
                .count();
            if failed > 0 {
                return Err(Error::NonConvergence(failed));
            }
        }
        Command::HedgeReplay {
            quotes,
            events,
            target,
            instruments,
            out_dir,
            step_s,
            lambda_home,
            lambda_away,
            model_values,
            match_length,
            half_length,
        } => {
            let timeline = load_timeline(&quotes, &events, match_length, half_length)?;
            let intensities = match (lambda_home, lambda_away) {
                (Some(h), Some(a)) => IntensitySource::Fixed(Intensities::new(h, a)?),
                _ => IntensitySource::Series(calibrate_series(
                    &timeline.snapshots,
                    step_s,
                    timeline.match_length_s(),
                    &CalibrationConfig::default(),
                )?),
            };
            let first = &timeline.snapshots[0];
            let hedge = HedgeTimeline {
                match_length_s: timeline.match_length_s(),
                half_clock: timeline.half_clock(),
                start: first.state.score(),
                half_time_score: first.context.half_time_score,
                steps: timeline
                    .snapshots
                    .iter()
                    .map(|s| ReplayStep {
                        timestamp_s: s.timestamp_s,
                        quotes: s.quotes.clone(),
                    })
                    .collect(),
                goals: timeline.events.goals.clone(),
            };
            let config = ReplayConfig {
                target,
                instruments: instruments.0,
                intensities,
                market_values: !model_values,
            };
            let report = replay_hedge(&hedge, &config)?;
            fs::create_dir_all(&out_dir)?;
            let mut w = create(&out_dir.join("steps.csv"))?;
            files::write_hedge_steps(&mut w, &report)?;
            w.flush()?;
            let mut w = create(&out_dir.join("goals.csv"))?;
            files::write_hedge_goals(&mut w, &report)?;
            w.flush()?;
            let mut w = create(&out_dir.join("summary.json"))?;
            serde_json::to_writer_pretty(&mut w, &report.summary)?;
            writeln!(w)?;
            w.flush()?;
        }
        Command::Simulate {
            lambda_home,
            lambda_away,
            paths,
            seed,
            out,
            score,
            minute,
            match_length,
        } => {
            if paths == 0 {
                return Err(Error::domain("at least one path is required"));
            }
            let lambda = Intensities::new(lambda_home, lambda_away)?;
            let start = ScoreState::at_minute(score, minute, match_length)?;
            let sims = simulate_paths(&lambda, &start, paths, seed);
            let mut w = create(&out)?;
            files::write_paths(&mut w, &sims)?;
            w.flush()?;
        }
        Command::Report {
            series,
            out,
            match_length,
        } => {
            let series = files::read_series(open(&series)?, match_length * 60.0)?;
            let stats = estimate_drift_vol(&series)?;
            let mut w = create(&out)?;
            serde_json::to_writer_pretty(&mut w, &stats)?;
            writeln!(w)?;
            w.flush()?;
        }
    }
    Ok(())
}
