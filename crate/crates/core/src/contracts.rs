//! Bet catalogue, payoffs, match state and odds conventions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Home,
    Away,
}

impl Side {
    pub fn token(self) -> &'static str {
        match self {
            Side::Home => "HOME",
            Side::Away => "AWAY",
        }
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "HOME" => Ok(Side::Home),
            "AWAY" => Ok(Side::Away),
            _ => Err(Error::domain(format!("unknown team `{s}`"))),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Result of a match (or of a half).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Home,
    Away,
    Draw,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::Home, Outcome::Away, Outcome::Draw];

    pub fn of(home: u32, away: u32) -> Outcome {
        match home.cmp(&away) {
            std::cmp::Ordering::Greater => Outcome::Home,
            std::cmp::Ordering::Less => Outcome::Away,
            std::cmp::Ordering::Equal => Outcome::Draw,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Outcome::Home => "HOME",
            Outcome::Away => "AWAY",
            Outcome::Draw => "DRAW",
        }
    }

    fn parse(s: &str) -> Option<Outcome> {
        match s {
            "HOME" => Some(Outcome::Home),
            "AWAY" => Some(Outcome::Away),
            "DRAW" => Some(Outcome::Draw),
            _ => None,
        }
    }

    /// The Match Odds bet paying on this full-time outcome.
    pub fn match_odds(self) -> BetSpec {
        match self {
            Outcome::Home => BetSpec::MatchOddsHome,
            Outcome::Away => BetSpec::MatchOddsAway,
            Outcome::Draw => BetSpec::MatchOddsDraw,
        }
    }
}

/// A score pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Score {
    pub home: u32,
    pub away: u32,
}

impl Score {
    pub fn new(home: u32, away: u32) -> Self {
        Score { home, away }
    }

    pub fn with_goal(self, side: Side) -> Self {
        match side {
            Side::Home => Score::new(self.home + 1, self.away),
            Side::Away => Score::new(self.home, self.away + 1),
        }
    }

    pub fn total(self) -> u32 {
        self.home + self.away
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.home, self.away)
    }
}

impl FromStr for Score {
    type Err = Error;

    /// Accepts `H:A` or `H-A`.
    fn from_str(s: &str) -> Result<Self> {
        let (h, a) = s
            .split_once(':')
            .or_else(|| s.split_once('-'))
            .ok_or_else(|| Error::domain(format!("score `{s}` is not of the form H:A")))?;
        let parse = |x: &str| {
            x.trim()
                .parse::<u32>()
                .map_err(|_| Error::domain(format!("score `{s}` is not of the form H:A")))
        };
        Ok(Score::new(parse(h)?, parse(a)?))
    }
}

/// Current score and the match clock as a fraction of regulation time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreState {
    pub home_goals: u32,
    pub away_goals: u32,
    pub clock: f64,
}

impl ScoreState {
    pub fn new(home_goals: u32, away_goals: u32, clock: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&clock) {
            return Err(Error::domain(format!(
                "clock must lie in [0, 1], got {clock}"
            )));
        }
        Ok(ScoreState {
            home_goals,
            away_goals,
            clock,
        })
    }

    pub fn from_score(score: Score, clock: f64) -> Result<Self> {
        ScoreState::new(score.home, score.away, clock)
    }

    /// State at minute `minute` of a match lasting `match_length` minutes.
    pub fn at_minute(score: Score, minute: f64, match_length: f64) -> Result<Self> {
        if !(match_length > 0.0) {
            return Err(Error::domain("match length must be positive"));
        }
        ScoreState::from_score(score, minute / match_length)
    }

    pub fn score(&self) -> Score {
        Score::new(self.home_goals, self.away_goals)
    }

    /// Fraction of the match still to play.
    pub fn remaining(&self) -> f64 {
        1.0 - self.clock
    }

    pub fn with_goal(&self, side: Side) -> Self {
        let s = self.score().with_goal(side);
        ScoreState {
            home_goals: s.home,
            away_goals: s.away,
            clock: self.clock,
        }
    }

    pub fn with_clock(&self, clock: f64) -> Self {
        ScoreState { clock, ..*self }
    }
}

/// A goal scored `timestamp_s` seconds of playing time after kick-off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoalEvent {
    pub timestamp_s: f64,
    pub team: Side,
}

/// Risk-neutral goal intensities in goals per match.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intensities {
    pub home: f64,
    pub away: f64,
}

impl Intensities {
    pub fn new(home: f64, away: f64) -> Result<Self> {
        for (name, v) in [("home", home), ("away", away)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::domain(format!(
                    "{name} intensity must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(Intensities { home, away })
    }

    pub fn total(&self) -> f64 {
        self.home + self.away
    }

    pub fn of(&self, side: Side) -> f64 {
        match side {
            Side::Home => self.home,
            Side::Away => self.away,
        }
    }
}

/// An Over/Under line `X.5`, stored as its integer part `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GoalLine(pub u32);

impl GoalLine {
    pub fn from_value(line: f64) -> Result<Self> {
        let x = line - 0.5;
        if !(x >= 0.0) || x.fract() != 0.0 || x > u32::MAX as f64 {
            return Err(Error::domain(format!(
                "goal line must be of the form X.5, got {line}"
            )));
        }
        Ok(GoalLine(x as u32))
    }

    pub fn value(self) -> f64 {
        self.0 as f64 + 0.5
    }
}

/// The bets this crate knows how to price.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BetSpec {
    MatchOddsHome,
    MatchOddsAway,
    MatchOddsDraw,
    /// Arrow-Debreu bet on the exact final score.
    CorrectScore {
        home: u32,
        away: u32,
    },
    /// Pays if the total number of goals exceeds the line.
    OverLine(GoalLine),
    /// Pays if the total number of goals is at most the integer part of the line.
    UnderLine(GoalLine),
    OddTotal,
    EvenTotal,
    /// Pays if home minus away goals equals the margin.
    WinningMargin(i32),
    NextGoalHome,
    NextGoalAway,
    HalfTimeFullTime {
        half_time: Outcome,
        full_time: Outcome,
    },
}

impl BetSpec {
    /// Whether the payoff depends on the final score only.
    pub fn is_european(&self) -> bool {
        !matches!(
            self,
            BetSpec::NextGoalHome | BetSpec::NextGoalAway | BetSpec::HalfTimeFullTime { .. }
        )
    }

    /// Name of the market this selection trades in.
    pub fn market(&self) -> &'static str {
        match self {
            BetSpec::MatchOddsHome | BetSpec::MatchOddsAway | BetSpec::MatchOddsDraw => {
                "MATCH_ODDS"
            }
            BetSpec::CorrectScore { .. } => "CORRECT_SCORE",
            BetSpec::OverLine(_) | BetSpec::UnderLine(_) => "OVER_UNDER",
            BetSpec::OddTotal | BetSpec::EvenTotal => "ODD_EVEN",
            BetSpec::WinningMargin(_) => "WINNING_MARGIN",
            BetSpec::NextGoalHome | BetSpec::NextGoalAway => "NEXT_GOAL",
            BetSpec::HalfTimeFullTime { .. } => "HT_FT",
        }
    }

    /// The selection within [`market`](Self::market), as written in quote files.
    pub fn selection(&self) -> String {
        let token = self.to_string();
        match self {
            BetSpec::OverLine(_)
            | BetSpec::UnderLine(_)
            | BetSpec::OddTotal
            | BetSpec::EvenTotal => token,
            _ => token[self.market().len() + 1..].to_string(),
        }
    }

    /// Parses a `(market, selection)` pair from a quote file. The selection may
    /// be given either relative to the market (`MATCH_ODDS`, `HOME`) or as a
    /// full token (`OVER_UNDER`, `OVER_2_5`).
    pub fn from_market_selection(market: &str, selection: &str) -> Result<Self> {
        let market = market.trim().to_ascii_uppercase();
        let selection = selection.trim();
        let joined = format!("{market}_{selection}");
        let bet = joined
            .parse::<BetSpec>()
            .or_else(|_| selection.parse::<BetSpec>())
            .map_err(|_| Error::UnknownBet(format!("{market}/{selection}")))?;
        if bet.market() != market {
            return Err(Error::UnknownBet(format!("{market}/{selection}")));
        }
        Ok(bet)
    }
}

impl fmt::Display for BetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetSpec::MatchOddsHome => f.write_str("MATCH_ODDS_HOME"),
            BetSpec::MatchOddsAway => f.write_str("MATCH_ODDS_AWAY"),
            BetSpec::MatchOddsDraw => f.write_str("MATCH_ODDS_DRAW"),
            BetSpec::CorrectScore { home, away } => write!(f, "CORRECT_SCORE_{home}_{away}"),
            BetSpec::OverLine(l) => write!(f, "OVER_{}_5", l.0),
            BetSpec::UnderLine(l) => write!(f, "UNDER_{}_5", l.0),
            BetSpec::OddTotal => f.write_str("ODD"),
            BetSpec::EvenTotal => f.write_str("EVEN"),
            BetSpec::WinningMargin(k) => write!(f, "WINNING_MARGIN_{k}"),
            BetSpec::NextGoalHome => f.write_str("NEXT_GOAL_HOME"),
            BetSpec::NextGoalAway => f.write_str("NEXT_GOAL_AWAY"),
            BetSpec::HalfTimeFullTime {
                half_time,
                full_time,
            } => {
                write!(f, "HT_FT_{}_{}", half_time.token(), full_time.token())
            }
        }
    }
}

impl FromStr for BetSpec {
    type Err = Error;

    /// Case-insensitive, underscore separated tokens:
    ///
    /// ```text
    /// MATCH_ODDS_{HOME|AWAY|DRAW}     CORRECT_SCORE_<h>_<a>
    /// OVER_<x>_5  UNDER_<x>_5         ODD  EVEN
    /// WINNING_MARGIN_<k>              NEXT_GOAL_{HOME|AWAY}
    /// HT_FT_<outcome>_<outcome>
    /// ```
    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        let unknown = || Error::UnknownBet(s.to_string());
        let bet = match upper.as_str() {
            "MATCH_ODDS_HOME" => BetSpec::MatchOddsHome,
            "MATCH_ODDS_AWAY" => BetSpec::MatchOddsAway,
            "MATCH_ODDS_DRAW" => BetSpec::MatchOddsDraw,
            "ODD" => BetSpec::OddTotal,
            "EVEN" => BetSpec::EvenTotal,
            "NEXT_GOAL_HOME" => BetSpec::NextGoalHome,
            "NEXT_GOAL_AWAY" => BetSpec::NextGoalAway,
            other => {
                if let Some(rest) = other.strip_prefix("CORRECT_SCORE_") {
                    let (h, a) = rest.split_once('_').ok_or_else(unknown)?;
                    BetSpec::CorrectScore {
                        home: h.parse().map_err(|_| unknown())?,
                        away: a.parse().map_err(|_| unknown())?,
                    }
                } else if let Some(rest) = other.strip_prefix("OVER_") {
                    BetSpec::OverLine(parse_line(rest).ok_or_else(unknown)?)
                } else if let Some(rest) = other.strip_prefix("UNDER_") {
                    BetSpec::UnderLine(parse_line(rest).ok_or_else(unknown)?)
                } else if let Some(rest) = other.strip_prefix("WINNING_MARGIN_") {
                    BetSpec::WinningMargin(rest.parse().map_err(|_| unknown())?)
                } else if let Some(rest) = other.strip_prefix("HT_FT_") {
                    let (ht, ft) = rest.split_once('_').ok_or_else(unknown)?;
                    BetSpec::HalfTimeFullTime {
                        half_time: Outcome::parse(ht).ok_or_else(unknown)?,
                        full_time: Outcome::parse(ft).ok_or_else(unknown)?,
                    }
                } else {
                    return Err(unknown());
                }
            }
        };
        Ok(bet)
    }
}

fn parse_line(rest: &str) -> Option<GoalLine> {
    let (whole, half) = rest.split_once('_')?;
    if half != "5" {
        return None;
    }
    whole.parse().ok().map(GoalLine)
}

impl Serialize for BetSpec {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BetSpec {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Value of a bet paying one unit, from decimal odds.
pub fn value_from_decimal(decimal: f64) -> Result<f64> {
    if !(decimal >= 1.0) || !decimal.is_finite() {
        return Err(Error::domain(format!(
            "decimal odds must be at least 1, got {decimal}"
        )));
    }
    Ok(1.0 / decimal)
}

/// Value of a bet paying one unit, from fractional odds.
pub fn value_from_fractional(fractional: f64) -> Result<f64> {
    if !(fractional >= 0.0) || !fractional.is_finite() {
        return Err(Error::domain(format!(
            "fractional odds must be nonnegative, got {fractional}"
        )));
    }
    Ok(1.0 / (fractional + 1.0))
}

/// Settlement value of a European bet at final score `home`-`away`.
pub fn payoff(bet: &BetSpec, home: u32, away: u32) -> Result<f64> {
    let hit = match *bet {
        BetSpec::MatchOddsHome => home > away,
        BetSpec::MatchOddsAway => home < away,
        BetSpec::MatchOddsDraw => home == away,
        BetSpec::CorrectScore { home: h, away: a } => home == h && away == a,
        BetSpec::OverLine(GoalLine(x)) => home + away > x,
        BetSpec::UnderLine(GoalLine(x)) => home + away <= x,
        BetSpec::OddTotal => (home + away) % 2 == 1,
        BetSpec::EvenTotal => (home + away).is_multiple_of(2),
        BetSpec::WinningMargin(k) => home as i64 - away as i64 == k as i64,
        BetSpec::NextGoalHome | BetSpec::NextGoalAway | BetSpec::HalfTimeFullTime { .. } => {
            return Err(Error::NotEuropean(bet.to_string()))
        }
    };
    Ok(if hit { 1.0 } else { 0.0 })
}

/// Best back and lay prices for one bet, in decimal odds.
///
/// Backing buys the unit payout at `1/back`; laying sells it at `1/lay`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quote {
    pub bet: BetSpec,
    pub back_decimal: Option<f64>,
    pub lay_decimal: Option<f64>,
}

impl Quote {
    pub fn new(bet: BetSpec, back_decimal: Option<f64>, lay_decimal: Option<f64>) -> Result<Self> {
        for d in back_decimal.iter().chain(lay_decimal.iter()) {
            value_from_decimal(*d)?;
        }
        Ok(Quote {
            bet,
            back_decimal,
            lay_decimal,
        })
    }

    /// Two-sided quote from buy and sell values rather than odds.
    pub fn from_values(bet: BetSpec, value_buy: f64, value_sell: f64) -> Result<Self> {
        for v in [value_buy, value_sell] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::domain(format!(
                    "quote value must lie in (0, 1], got {v}"
                )));
            }
        }
        Ok(Quote {
            bet,
            back_decimal: Some(1.0 / value_buy),
            lay_decimal: Some(1.0 / value_sell),
        })
    }

    pub fn value_buy(&self) -> Option<f64> {
        self.back_decimal.map(|d| 1.0 / d)
    }

    pub fn value_sell(&self) -> Option<f64> {
        self.lay_decimal.map(|d| 1.0 / d)
    }

    pub fn is_two_sided(&self) -> bool {
        self.back_decimal.is_some() && self.lay_decimal.is_some()
    }

    pub fn value_mid(&self) -> Option<f64> {
        Some(0.5 * (self.value_buy()? + self.value_sell()?))
    }

    /// Width of the market in value terms, `|buy − sell|`.
    pub fn spread(&self) -> Option<f64> {
        Some((self.value_buy()? - self.value_sell()?).abs())
    }
}
