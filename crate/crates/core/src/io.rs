//! File formats.
//!
//! All files are UTF-8 CSV with a header row and LF line endings. Timestamps
//! are seconds of playing time since kick-off (the half-time break is not
//! counted). Floats are written with at most nine significant digits and no
//! trailing zeros; see [`format_float`].
//!
//! | file | columns |
//! |------|---------|
//! | quotes | `match_id,timestamp_s,market,selection,back_decimal,lay_decimal` |
//! | events | `match_id,timestamp_s,team,event` |
//! | intensity series | `timestamp_s,lambda_home,lambda_away,residual,stderr_home,stderr_away,converged` |
//! | paths | `path,home_goals,away_goals` |
//!
//! In the quotes file an empty odds cell means that side of the market is
//! absent. A selection is either relative to its market (`MATCH_ODDS`,`HOME`)
//! or a full bet token (`OVER_UNDER`,`OVER_2_5`); tokens are case-insensitive.
//! Events are `GOAL` rows with team `HOME` or `AWAY`.

use std::io::{Read, Write};

use csv::{ReaderBuilder, StringRecord, WriterBuilder};

use crate::calibration::{
    CalibrationResult, IntensitySeries, QuoteSnapshot, SeriesEntry, SeriesPoint,
};
use crate::contracts::{BetSpec, GoalEvent, Intensities, Quote, Score, ScoreState, Side};
use crate::error::{Error, Result};
use crate::hedging::HedgeReport;
use crate::oracle::SimulatedPath;
use crate::pricing::MatchContext;

pub const QUOTE_COLUMNS: [&str; 6] = [
    "match_id",
    "timestamp_s",
    "market",
    "selection",
    "back_decimal",
    "lay_decimal",
];
pub const EVENT_COLUMNS: [&str; 4] = ["match_id", "timestamp_s", "team", "event"];
pub const SERIES_COLUMNS: [&str; 7] = [
    "timestamp_s",
    "lambda_home",
    "lambda_away",
    "residual",
    "stderr_home",
    "stderr_away",
    "converged",
];

/// Formats a float with nine significant digits, dropping trailing zeros
/// (`600`, `0.4`, `0.393700787`). Very large or small magnitudes use
/// exponent notation, which parses back to the same value.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-7..=15).contains(&exp) {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{m}e{exp}");
    }
    let decimals = (8 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn check_header(found: &StringRecord, expected: &[&str]) -> Result<()> {
    let found: Vec<&str> = found.iter().collect();
    if found != expected {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected columns {}, found {}",
                expected.join(","),
                found.join(",")
            ),
        });
    }
    Ok(())
}

fn line_of(record: &StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn parse_field<T: std::str::FromStr>(record: &StringRecord, index: usize, name: &str) -> Result<T> {
    let raw = record.get(index).unwrap_or("");
    raw.parse().map_err(|_| Error::Parse {
        line: line_of(record),
        message: format!("invalid {name} `{raw}`"),
    })
}

fn parse_optional_f64(record: &StringRecord, index: usize, name: &str) -> Result<Option<f64>> {
    if record.get(index).unwrap_or("").is_empty() {
        Ok(None)
    } else {
        parse_field(record, index, name).map(Some)
    }
}

/// Quotes sharing one timestamp, before the match state is attached.
#[derive(Debug, Clone, PartialEq)]
pub struct QuoteBatch {
    pub match_id: String,
    pub timestamp_s: f64,
    pub quotes: Vec<Quote>,
}

/// Reads a quotes file and groups its rows by timestamp.
///
/// Rows naming an unknown bet fail with their line number. Rows with odds
/// below 1 are dropped with a warning.
pub fn read_quotes<R: Read>(input: R) -> Result<Vec<QuoteBatch>> {
    let mut rdr = reader(input);
    check_header(rdr.headers()?, &QUOTE_COLUMNS)?;
    let mut batches: Vec<QuoteBatch> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = line_of(&record);
        let match_id = record.get(0).unwrap_or("").to_string();
        let timestamp_s: f64 = parse_field(&record, 1, "timestamp")?;
        let bet = BetSpec::from_market_selection(
            record.get(2).unwrap_or(""),
            record.get(3).unwrap_or(""),
        )
        .map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let back = parse_optional_f64(&record, 4, "back odds")?;
        let lay = parse_optional_f64(&record, 5, "lay odds")?;
        let quote = match Quote::new(bet, back, lay) {
            Ok(q) => q,
            Err(e) => {
                log::warn!("line {line}: row rejected: {e}");
                continue;
            }
        };
        match batches.last_mut() {
            Some(b) if b.timestamp_s == timestamp_s && b.match_id == match_id => {
                b.quotes.push(quote)
            }
            _ => batches.push(QuoteBatch {
                match_id,
                timestamp_s,
                quotes: vec![quote],
            }),
        }
    }
    batches.sort_by(|a, b| a.timestamp_s.total_cmp(&b.timestamp_s));
    let mut merged: Vec<QuoteBatch> = Vec::with_capacity(batches.len());
    for b in batches {
        match merged.last_mut() {
            Some(m) if m.timestamp_s == b.timestamp_s && m.match_id == b.match_id => {
                m.quotes.extend(b.quotes)
            }
            _ => merged.push(b),
        }
    }
    if merged.is_empty() {
        return Err(Error::NoSnapshots);
    }
    Ok(merged)
}

pub fn write_quotes<W: Write>(output: W, batches: &[QuoteBatch]) -> Result<()> {
    let mut w = WriterBuilder::new().from_writer(output);
    w.write_record(QUOTE_COLUMNS)?;
    for b in batches {
        for q in &b.quotes {
            w.write_record([
                b.match_id.clone(),
                format_float(b.timestamp_s),
                q.bet.market().to_string(),
                q.bet.selection(),
                format_opt(q.back_decimal),
                format_opt(q.lay_decimal),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

impl QuoteBatch {
    pub fn from_snapshot(match_id: &str, snapshot: &QuoteSnapshot) -> Self {
        QuoteBatch {
            match_id: match_id.into(),
            timestamp_s: snapshot.timestamp_s,
            quotes: snapshot.quotes.clone(),
        }
    }
}

/// Goals of one match in time order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventLog {
    pub match_id: String,
    pub goals: Vec<GoalEvent>,
}

impl EventLog {
    /// Score after every goal at or before `timestamp_s`.
    pub fn score_at(&self, timestamp_s: f64) -> Score {
        self.goals
            .iter()
            .take_while(|g| g.timestamp_s <= timestamp_s)
            .fold(Score::default(), |s, g| s.with_goal(g.team))
    }

    /// Score after every goal strictly before `timestamp_s`. At the break this
    /// is the half-time score: a goal timed exactly at half time belongs to the
    /// second half.
    pub fn score_before(&self, timestamp_s: f64) -> Score {
        self.goals
            .iter()
            .take_while(|g| g.timestamp_s < timestamp_s)
            .fold(Score::default(), |s, g| s.with_goal(g.team))
    }

    pub fn final_score(&self) -> Score {
        self.score_at(f64::INFINITY)
    }
}

/// Reads a goal events file. Timestamps must not decrease.
pub fn read_events<R: Read>(input: R) -> Result<EventLog> {
    let mut rdr = reader(input);
    check_header(rdr.headers()?, &EVENT_COLUMNS)?;
    let mut log = EventLog::default();
    for record in rdr.records() {
        let record = record?;
        let line = line_of(&record);
        let timestamp_s: f64 = parse_field(&record, 1, "timestamp")?;
        if !(timestamp_s >= 0.0) {
            return Err(Error::Parse {
                line,
                message: format!("negative timestamp {timestamp_s}"),
            });
        }
        let team: Side = record
            .get(2)
            .unwrap_or("")
            .parse()
            .map_err(|e: Error| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        let event = record.get(3).unwrap_or("");
        if !event.eq_ignore_ascii_case("GOAL") {
            return Err(Error::Parse {
                line,
                message: format!("unknown event `{event}`"),
            });
        }
        if let Some(prev) = log.goals.last() {
            if timestamp_s < prev.timestamp_s {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "timestamp {timestamp_s} is earlier than the previous event at {}",
                        prev.timestamp_s
                    ),
                });
            }
        }
        if log.goals.is_empty() {
            log.match_id = record.get(0).unwrap_or("").to_string();
        }
        log.goals.push(GoalEvent { timestamp_s, team });
    }
    Ok(log)
}

pub fn write_events<W: Write>(output: W, log: &EventLog) -> Result<()> {
    let mut w = WriterBuilder::new().from_writer(output);
    w.write_record(EVENT_COLUMNS)?;
    for g in &log.goals {
        w.write_record([
            log.match_id.as_str(),
            &format_float(g.timestamp_s),
            g.team.token(),
            "GOAL",
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Quotes and goals of one match with the clock conventions needed to turn
/// them into model states.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchTimeline {
    pub match_id: String,
    pub match_length_min: f64,
    pub half_length_min: f64,
    pub events: EventLog,
    pub snapshots: Vec<QuoteSnapshot>,
}

impl MatchTimeline {
    /// Attaches the score implied by the goals (a goal at the same second as a
    /// snapshot counts as already scored) and the clock to every batch.
    pub fn assemble(
        batches: &[QuoteBatch],
        events: EventLog,
        match_length_min: f64,
        half_length_min: f64,
    ) -> Result<Self> {
        if !(match_length_min > 0.0)
            || !(half_length_min > 0.0 && half_length_min < match_length_min)
        {
            return Err(Error::domain(
                "half length must lie strictly between 0 and the match length",
            ));
        }
        let length_s = match_length_min * 60.0;
        let half_s = half_length_min * 60.0;
        let half_clock = half_length_min / match_length_min;
        if let Some(g) = events.goals.iter().find(|g| g.timestamp_s > length_s) {
            return Err(Error::domain(format!(
                "goal at {} s is after the final whistle",
                g.timestamp_s
            )));
        }
        let mut snapshots = Vec::with_capacity(batches.len());
        for b in batches {
            if !(0.0..=length_s).contains(&b.timestamp_s) {
                return Err(Error::domain(format!(
                    "quote timestamp {} s is outside the match",
                    b.timestamp_s
                )));
            }
            let clock = b.timestamp_s / length_s;
            let state = ScoreState::from_score(events.score_at(b.timestamp_s), clock)?;
            let ht = (b.timestamp_s >= half_s).then(|| events.score_before(half_s));
            snapshots.push(QuoteSnapshot {
                timestamp_s: b.timestamp_s,
                state,
                context: MatchContext::new(half_clock, ht)?,
                quotes: b.quotes.clone(),
            });
        }
        let match_id = batches
            .first()
            .map(|b| b.match_id.clone())
            .unwrap_or_else(|| events.match_id.clone());
        Ok(MatchTimeline {
            match_id,
            match_length_min,
            half_length_min,
            events,
            snapshots,
        })
    }

    pub fn match_length_s(&self) -> f64 {
        self.match_length_min * 60.0
    }

    pub fn half_clock(&self) -> f64 {
        self.half_length_min / self.match_length_min
    }
}

pub fn write_series<W: Write>(output: W, series: &IntensitySeries) -> Result<()> {
    let mut w = WriterBuilder::new().from_writer(output);
    w.write_record(SERIES_COLUMNS)?;
    for p in &series.points {
        let ts = format_float(p.timestamp_s);
        match &p.entry {
            SeriesEntry::Fit(f) => w.write_record([
                ts,
                format_float(f.intensities.home),
                format_float(f.intensities.away),
                format_float(f.residual),
                format_float(f.stderr_home),
                format_float(f.stderr_away),
                f.converged.to_string(),
            ])?,
            SeriesEntry::Gap => w.write_record([ts.as_str(), "", "", "", "", "", ""])?,
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads an intensity series. Rows with empty intensity cells are gaps.
pub fn read_series<R: Read>(input: R, match_length_s: f64) -> Result<IntensitySeries> {
    let mut rdr = reader(input);
    check_header(rdr.headers()?, &SERIES_COLUMNS)?;
    let mut points = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let timestamp_s: f64 = parse_field(&record, 0, "timestamp")?;
        let entry = if record.get(1).unwrap_or("").is_empty() {
            SeriesEntry::Gap
        } else {
            let home: f64 = parse_field(&record, 1, "lambda_home")?;
            let away: f64 = parse_field(&record, 2, "lambda_away")?;
            let intensities = Intensities::new(home, away).map_err(|e| Error::Parse {
                line: line_of(&record),
                message: e.to_string(),
            })?;
            SeriesEntry::Fit(CalibrationResult {
                intensities,
                residual: parse_field(&record, 3, "residual")?,
                stderr_home: parse_field(&record, 4, "stderr_home")?,
                stderr_away: parse_field(&record, 5, "stderr_away")?,
                iterations: 0,
                converged: parse_field(&record, 6, "converged")?,
            })
        };
        if let Some(prev) = points.last().map(|p: &SeriesPoint| p.timestamp_s) {
            if timestamp_s <= prev {
                return Err(Error::Parse {
                    line: line_of(&record),
                    message: "timestamps must increase".into(),
                });
            }
        }
        points.push(SeriesPoint { timestamp_s, entry });
    }
    if points.is_empty() {
        return Err(Error::InsufficientData("intensity series is empty".into()));
    }
    Ok(IntensitySeries {
        match_length_s,
        points,
    })
}

pub fn write_paths<W: Write>(output: W, paths: &[SimulatedPath]) -> Result<()> {
    let mut w = WriterBuilder::new().from_writer(output);
    w.write_record(["path", "home_goals", "away_goals"])?;
    for (i, p) in paths.iter().enumerate() {
        w.write_record([
            i.to_string(),
            p.terminal.home.to_string(),
            p.terminal.away.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-step ledger of a hedge replay.
pub fn write_hedge_steps<W: Write>(output: W, report: &HedgeReport) -> Result<()> {
    let mut w = WriterBuilder::new().from_writer(output);
    w.write_record([
        "timestamp_s",
        "clock",
        "home_goals",
        "away_goals",
        "target_value",
        "portfolio_value",
        "psi1",
        "psi2",
        "cash",
        "tracking_error",
        "ledger_error",
        "flagged",
    ])?;
    for s in &report.steps {
        w.write_record([
            format_float(s.timestamp_s),
            format_float(s.clock),
            s.home_goals.to_string(),
            s.away_goals.to_string(),
            format_float(s.target_value),
            format_float(s.portfolio_value),
            format_float(s.psi1),
            format_float(s.psi2),
            format_float(s.cash),
            format_float(s.tracking_error),
            format_float(s.ledger_error),
            s.flagged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Target and portfolio jumps at each goal of a hedge replay.
pub fn write_hedge_goals<W: Write>(output: W, report: &HedgeReport) -> Result<()> {
    let mut w = WriterBuilder::new().from_writer(output);
    w.write_record([
        "timestamp_s",
        "team",
        "target_pre",
        "target_post",
        "portfolio_pre",
        "portfolio_post",
        "target_jump",
        "portfolio_jump",
        "mismatch",
    ])?;
    for g in &report.goals {
        w.write_record([
            format_float(g.timestamp_s),
            g.team.token().to_string(),
            format_float(g.target_pre),
            format_float(g.target_post),
            format_float(g.portfolio_pre),
            format_float(g.portfolio_post),
            format_float(g.target_jump()),
            format_float(g.portfolio_jump()),
            format_float(g.mismatch()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(format_float(600.0), "600");
        assert_eq!(format_float(0.4), "0.4");
        assert_eq!(format_float(1.0 / 2.54), "0.393700787");
        assert_eq!(format_float(-2.5), "-2.5");
        assert_eq!(format_float(1.3), "1.3");
        assert_eq!(format_float(123456789.0), "123456789");
        assert_eq!(format_float(1e-12), "1e-12");
        assert_eq!(format_float(0.0001234), "0.0001234");
        for x in [1e-12, 3.25e20, 0.1 + 0.2, 5400.0, 7.0e-8] {
            let y: f64 = format_float(x).parse().unwrap();
            assert!((y - x).abs() <= 1e-8 * x.abs());
        }
    }

    #[test]
    fn quote_row() {
        let csv = "match_id,timestamp_s,market,selection,back_decimal,lay_decimal\ng1,600,MATCH_ODDS,HOME,2.50,2.54\n";
        let b = read_quotes(csv.as_bytes()).unwrap();
        let q = b[0].quotes[0];
        assert_eq!(q.bet, BetSpec::MatchOddsHome);
        assert_eq!(q.value_buy(), Some(0.4));
        assert!((q.value_sell().unwrap() - 0.393_700_787_401_574_8).abs() < 1e-15);
        assert!((q.spread().unwrap() - (0.4 - 1.0 / 2.54)).abs() < 1e-15);
    }

    #[test]
    fn quote_errors() {
        let header = "match_id,timestamp_s,market,selection,back_decimal,lay_decimal\n";
        assert!(matches!(
            read_quotes(header.as_bytes()),
            Err(Error::NoSnapshots)
        ));
        assert!(matches!(
            read_quotes("".as_bytes()),
            Err(Error::NoSnapshots) | Err(Error::Parse { .. })
        ));
        let bad = format!("{header}g1,0,MATCH_ODDS,HOME,2,2.1\ng1,0,MATCH_ODDS,WHO,2,2.1\n");
        assert!(matches!(
            read_quotes(bad.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
        let low = format!("{header}g1,0,MATCH_ODDS,HOME,0.9,2.1\ng1,0,MATCH_ODDS,AWAY,3,3.2\n");
        let b = read_quotes(low.as_bytes()).unwrap();
        assert_eq!(b[0].quotes.len(), 1);
        let one = format!("{header}g1,0,NEXT_GOAL,HOME,1.9,\n");
        let q = read_quotes(one.as_bytes()).unwrap()[0].quotes[0];
        assert!(!q.is_two_sided() && q.lay_decimal.is_none());
    }

    #[test]
    fn events() {
        let csv = "match_id,timestamp_s,team,event\ng1,600,home,GOAL\ng1,1200,AWAY,goal\ng1,3000,HOME,GOAL\n";
        let log = read_events(csv.as_bytes()).unwrap();
        assert_eq!(log.goals.len(), 3);
        assert_eq!(log.final_score(), Score::new(2, 1));
        let back = "match_id,timestamp_s,team,event\ng1,600,HOME,GOAL\ng1,500,AWAY,GOAL\n";
        assert!(matches!(
            read_events(back.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
        let card = "match_id,timestamp_s,team,event\ng1,600,HOME,CARD\n";
        assert!(read_events(card.as_bytes()).is_err());
    }

    #[test]
    fn timeline_states() {
        let events = EventLog {
            match_id: "g1".into(),
            goals: vec![
                GoalEvent {
                    timestamp_s: 600.0,
                    team: Side::Home,
                },
                GoalEvent {
                    timestamp_s: 3000.0,
                    team: Side::Away,
                },
            ],
        };
        let q = Quote::new(BetSpec::MatchOddsHome, Some(2.0), Some(2.1)).unwrap();
        let batches: Vec<QuoteBatch> = [0.0, 600.0, 2700.0, 3600.0]
            .iter()
            .map(|&t| QuoteBatch {
                match_id: "g1".into(),
                timestamp_s: t,
                quotes: vec![q],
            })
            .collect();
        let tl = MatchTimeline::assemble(&batches, events, 90.0, 45.0).unwrap();
        let scores: Vec<Score> = tl.snapshots.iter().map(|s| s.state.score()).collect();
        assert_eq!(
            scores,
            vec![
                Score::new(0, 0),
                Score::new(1, 0),
                Score::new(1, 0),
                Score::new(1, 1)
            ]
        );
        assert_eq!(tl.snapshots[1].context.half_time_score, None);
        assert_eq!(
            tl.snapshots[2].context.half_time_score,
            Some(Score::new(1, 0))
        );
        assert_eq!(tl.snapshots[3].state.clock, 3600.0 / 5400.0);
    }
}
