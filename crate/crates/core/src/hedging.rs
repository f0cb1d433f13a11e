//! Dynamic replication of bets with two hedging instruments.
//!
//! A position `ψ = (ψ¹, ψ²)` in two instruments replicates a target `X` when
//! it reproduces both goal jumps of the target:
//!
//! ```text
//! ⎡δ₁Z¹  δ₁Z²⎤ ⎡ψ¹⎤   ⎡δ₁X⎤
//! ⎣δ₂Z¹  δ₂Z²⎦ ⎣ψ²⎦ = ⎣δ₂X⎦
//! ```
//!
//! with the rest of the target value held in cash. Between goals the
//! replicating portfolio then has the target's theta, by the forward equation,
//! so rebalancing on a grid leaves only a discretisation error.
//!
//! Next Goal instruments settle at every goal (the scorer's bet pays one, the
//! other nothing) and immediately re-open at the price for the new state. The
//! replay books the payout into cash and buys the re-opened bets back out of
//! it, so the position count does not change at a goal.

use serde::Serialize;

use crate::calibration::IntensitySeries;
use crate::contracts::{BetSpec, GoalEvent, Intensities, Quote, Score, ScoreState, Side};
use crate::error::{Error, Result};
use crate::pricing::{greeks, post_goal_value, price, Greeks, MatchContext};

/// Determinants at or below this magnitude are treated as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

/// Goal jumps of two instruments. Row `i` is the goal of side `i` (home,
/// away), column `j` is instrument `j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaMatrix {
    pub entries: [[f64; 2]; 2],
    pub instruments: [String; 2],
}

impl DeltaMatrix {
    pub fn new(entries: [[f64; 2]; 2]) -> Self {
        DeltaMatrix {
            entries,
            instruments: ["instrument 1".into(), "instrument 2".into()],
        }
    }

    pub fn det(&self) -> f64 {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Solves `M ψ = rhs`.
    pub fn solve(&self, rhs: [f64; 2]) -> Result<[f64; 2]> {
        let det = self.det();
        if !(det.abs() > SINGULAR_TOLERANCE) {
            return Err(Error::LinearlyDependent {
                first: self.instruments[0].clone(),
                second: self.instruments[1].clone(),
                det: det.abs(),
            });
        }
        let m = &self.entries;
        Ok([
            (rhs[0] * m[1][1] - rhs[1] * m[0][1]) / det,
            (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det,
        ])
    }
}

/// Delta matrix of the Next Goal pair with values `z1` (home) and `z2` (away).
pub fn next_goal_delta_matrix(z1: f64, z2: f64) -> Result<DeltaMatrix> {
    if !(0.0..1.0).contains(&z1) || !(0.0..1.0).contains(&z2) || z1 + z2 >= 1.0 {
        return Err(Error::LinearlyDependent {
            first: BetSpec::NextGoalHome.to_string(),
            second: BetSpec::NextGoalAway.to_string(),
            det: (1.0 - z1 - z2).abs(),
        });
    }
    Ok(DeltaMatrix {
        entries: [[1.0 - z1, -z2], [-z1, 1.0 - z2]],
        instruments: [
            BetSpec::NextGoalHome.to_string(),
            BetSpec::NextGoalAway.to_string(),
        ],
    })
}

/// Delta matrix of any two instruments at the given state.
pub fn instrument_delta_matrix(
    instruments: [&BetSpec; 2],
    state: &ScoreState,
    intensities: &Intensities,
    ctx: &MatchContext,
) -> Result<DeltaMatrix> {
    let mut entries = [[0.0; 2]; 2];
    for (j, bet) in instruments.iter().enumerate() {
        let z = price(bet, state, intensities, ctx)?.value;
        for (i, side) in [Side::Home, Side::Away].into_iter().enumerate() {
            entries[i][j] = post_goal_value(bet, state, intensities, ctx, side)? - z;
        }
    }
    Ok(DeltaMatrix {
        entries,
        instruments: instruments.map(|b| b.to_string()),
    })
}

/// Holdings that replicate a target at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicationWeights {
    pub psi1: f64,
    pub psi2: f64,
    pub cash: f64,
}

/// Solves for the holdings matching both goal jumps of the target, with cash
/// making the portfolio worth `target_value`.
pub fn solve_replication_weights(
    target_value: f64,
    target: &Greeks,
    deltas: &DeltaMatrix,
    instrument_values: [f64; 2],
) -> Result<ReplicationWeights> {
    let [psi1, psi2] = deltas.solve([target.delta_home, target.delta_away])?;
    Ok(ReplicationWeights {
        psi1,
        psi2,
        cash: target_value - psi1 * instrument_values[0] - psi2 * instrument_values[1],
    })
}

/// Where the replay takes intensities from.
#[derive(Debug, Clone, PartialEq)]
pub enum IntensitySource {
    Fixed(Intensities),
    /// Latest fit at or before each instant.
    Series(IntensitySeries),
}

impl IntensitySource {
    fn at(&self, timestamp_s: f64) -> Result<Intensities> {
        match self {
            IntensitySource::Fixed(l) => Ok(*l),
            IntensitySource::Series(s) => s
                .intensities_at(timestamp_s)
                .ok_or_else(|| Error::InsufficientData("intensity series has no fits".into())),
        }
    }
}

/// Observation times of a replay, with any market quotes seen at them.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayStep {
    pub timestamp_s: f64,
    pub quotes: Vec<Quote>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HedgeTimeline {
    pub match_length_s: f64,
    pub half_clock: f64,
    /// Score at the first step.
    pub start: Score,
    /// Needed only when the first step is at or after half time.
    pub half_time_score: Option<Score>,
    pub steps: Vec<ReplayStep>,
    pub goals: Vec<GoalEvent>,
}

impl HedgeTimeline {
    /// Regular rebalancing grid from `from_s` to the final whistle, without quotes.
    pub fn model_grid(
        match_length_s: f64,
        half_clock: f64,
        start: Score,
        goals: Vec<GoalEvent>,
        from_s: f64,
        step_s: f64,
    ) -> Self {
        let n = ((match_length_s - from_s) / step_s).round() as usize;
        let steps = (0..=n)
            .map(|k| ReplayStep {
                timestamp_s: (from_s + k as f64 * step_s).min(match_length_s),
                quotes: Vec::new(),
            })
            .collect();
        HedgeTimeline {
            match_length_s,
            half_clock,
            start,
            half_time_score: None,
            steps,
            goals,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayConfig {
    pub target: BetSpec,
    pub instruments: [BetSpec; 2],
    pub intensities: IntensitySource,
    /// Mark to two-sided market mids where available instead of model values.
    pub market_values: bool,
}

/// Ledger line at one rebalancing time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub timestamp_s: f64,
    pub clock: f64,
    pub home_goals: u32,
    pub away_goals: u32,
    /// Target value including payouts of any settled Next Goal target.
    pub target_value: f64,
    pub portfolio_value: f64,
    pub psi1: f64,
    pub psi2: f64,
    pub cash: f64,
    pub tracking_error: f64,
    /// Portfolio value recomputed from holdings minus the value accumulated
    /// from instrument price changes alone.
    pub ledger_error: f64,
    /// The hedge could not be solved here and the previous position was kept.
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoalRecord {
    pub timestamp_s: f64,
    pub team: Side,
    pub target_pre: f64,
    pub target_post: f64,
    pub portfolio_pre: f64,
    pub portfolio_post: f64,
}

impl GoalRecord {
    pub fn target_jump(&self) -> f64 {
        self.target_post - self.target_pre
    }

    pub fn portfolio_jump(&self) -> f64 {
        self.portfolio_post - self.portfolio_pre
    }

    pub fn mismatch(&self) -> f64 {
        self.portfolio_jump() - self.target_jump()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HedgeSummary {
    pub target: BetSpec,
    pub instruments: [BetSpec; 2],
    pub steps: usize,
    pub goals: usize,
    pub flagged_steps: usize,
    pub terminal_error: f64,
    pub max_tracking_error: f64,
    pub max_jump_mismatch: f64,
    pub max_ledger_error: f64,
    /// Correlation of target and portfolio goal jumps, when defined.
    pub jump_correlation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HedgeReport {
    pub steps: Vec<StepRecord>,
    pub goals: Vec<GoalRecord>,
    pub summary: HedgeSummary,
}

fn is_next_goal(bet: &BetSpec) -> bool {
    matches!(bet, BetSpec::NextGoalHome | BetSpec::NextGoalAway)
}

struct Replay<'a> {
    cfg: &'a ReplayConfig,
    timeline: &'a HedgeTimeline,
    half_time_score: Score,
    score: Score,
    weights: ReplicationWeights,
    /// Price at which each instrument was last marked.
    marks: [f64; 2],
    /// Portfolio value accumulated from the initial value and price changes.
    accumulated: f64,
    /// Payouts of a settled Next Goal target net of its re-opening cost.
    target_account: f64,
}

struct Valuation {
    state: ScoreState,
    ctx: MatchContext,
    intensities: Intensities,
    target: f64,
    instruments: [f64; 2],
}

impl<'a> Replay<'a> {
    fn valuation(&self, timestamp_s: f64, score: Score, quotes: &[Quote]) -> Result<Valuation> {
        let clock = (timestamp_s / self.timeline.match_length_s).clamp(0.0, 1.0);
        let state = ScoreState::from_score(score, clock)?;
        let half = self.timeline.half_clock;
        let ctx = MatchContext::new(half, (clock >= half).then_some(self.half_time_score))?;
        let intensities = self.cfg.intensities.at(timestamp_s)?;
        let value = |bet: &BetSpec| -> Result<f64> {
            if self.cfg.market_values {
                if let Some(mid) = quotes
                    .iter()
                    .find(|q| q.bet == *bet)
                    .and_then(Quote::value_mid)
                {
                    return Ok(mid);
                }
            }
            Ok(price(bet, &state, &intensities, &ctx)?.value)
        };
        Ok(Valuation {
            target: value(&self.cfg.target)?,
            instruments: [
                value(&self.cfg.instruments[0])?,
                value(&self.cfg.instruments[1])?,
            ],
            state,
            ctx,
            intensities,
        })
    }

    fn holdings_value(&self, instruments: [f64; 2]) -> f64 {
        self.weights.psi1 * instruments[0] + self.weights.psi2 * instruments[1] + self.weights.cash
    }

    /// Moves the marks to new prices, accumulating the self-financing gain.
    fn mark(&mut self, instruments: [f64; 2]) {
        self.accumulated += self.weights.psi1 * (instruments[0] - self.marks[0])
            + self.weights.psi2 * (instruments[1] - self.marks[1]);
        self.marks = instruments;
    }

    /// Resets the hedge at the current valuation; returns whether it was singular.
    fn rebalance(&mut self, v: &Valuation) -> Result<bool> {
        let portfolio = self.holdings_value(v.instruments);
        let target = greeks(&self.cfg.target, &v.state, &v.intensities, &v.ctx)?;
        let instruments = [&self.cfg.instruments[0], &self.cfg.instruments[1]];
        let deltas = instrument_delta_matrix(instruments, &v.state, &v.intensities, &v.ctx)?;
        match solve_replication_weights(portfolio, &target, &deltas, v.instruments) {
            Ok(w) => {
                self.weights = w;
                Ok(false)
            }
            Err(Error::LinearlyDependent { .. }) => Ok(true),
            Err(e) => Err(e),
        }
    }

    fn record(&self, timestamp_s: f64, v: &Valuation, flagged: bool) -> StepRecord {
        let portfolio = self.holdings_value(v.instruments);
        let target = v.target + self.target_account;
        StepRecord {
            timestamp_s,
            clock: v.state.clock,
            home_goals: self.score.home,
            away_goals: self.score.away,
            target_value: target,
            portfolio_value: portfolio,
            psi1: self.weights.psi1,
            psi2: self.weights.psi2,
            cash: self.weights.cash,
            tracking_error: portfolio - target,
            ledger_error: portfolio - self.accumulated,
            flagged,
        }
    }

    /// Settles the goal at `goal` and re-opens Next Goal positions.
    /// Returns `(target before, target after, portfolio before, portfolio after)`.
    fn apply_goal(&mut self, goal: &GoalEvent) -> Result<(f64, f64, f64, f64)> {
        let model_pre = self.valuation(goal.timestamp_s, self.score, &[])?;
        if !self.cfg.market_values {
            self.mark(model_pre.instruments);
            self.rebalance(&model_pre)?;
        }
        let target_pre = model_pre.target + self.target_account;
        let portfolio_pre = self.holdings_value(self.marks);

        let (st, ctx, lam) = (&model_pre.state, &model_pre.ctx, &model_pre.intensities);
        let settle = |bet: &BetSpec| post_goal_value(bet, st, lam, ctx, goal.team);
        let jumped = [
            settle(&self.cfg.instruments[0])?,
            settle(&self.cfg.instruments[1])?,
        ];
        let target_settled = settle(&self.cfg.target)?;
        self.mark(jumped);

        self.score = self.score.with_goal(goal.team);
        let post = self.valuation(goal.timestamp_s, self.score, &[])?;
        let mut reopened = self.marks;
        for (j, bet) in self.cfg.instruments.iter().enumerate() {
            if is_next_goal(bet) {
                let psi = if j == 0 {
                    self.weights.psi1
                } else {
                    self.weights.psi2
                };
                self.weights.cash += psi * (jumped[j] - post.instruments[j]);
                reopened[j] = post.instruments[j];
            }
        }
        self.marks = reopened;
        if is_next_goal(&self.cfg.target) {
            self.target_account += target_settled - post.target;
        }
        let target_post = post.target + self.target_account;
        let portfolio_post = self.holdings_value(self.marks);
        if !self.cfg.market_values {
            self.rebalance(&post)?;
        }
        Ok((target_pre, target_post, portfolio_pre, portfolio_post))
    }
}

/// Replays a hedge of `config.target` along a timeline.
///
/// At every step the position is marked, the ledger checked and the hedge
/// re-solved. In model mode goals are handled at the goal instant: the
/// position is marked and rebalanced just before the goal, the jump settles,
/// and the hedge is re-solved for the new score, so jumps are matched up to
/// rounding. In market mode the position is carried through the goal and the
/// jumps are measured between the last step before and the first step after.
pub fn replay_hedge(timeline: &HedgeTimeline, config: &ReplayConfig) -> Result<HedgeReport> {
    let steps = &timeline.steps;
    if steps.is_empty() {
        return Err(Error::NoSnapshots);
    }
    if steps
        .windows(2)
        .any(|w| w[1].timestamp_s <= w[0].timestamp_s)
        || timeline
            .goals
            .windows(2)
            .any(|w| w[1].timestamp_s < w[0].timestamp_s)
    {
        return Err(Error::domain("replay timeline must be ordered in time"));
    }
    let half_s = timeline.half_clock * timeline.match_length_s;
    let half_time_score = timeline.half_time_score.unwrap_or_else(|| {
        timeline
            .goals
            .iter()
            .filter(|g| g.timestamp_s > steps[0].timestamp_s && g.timestamp_s < half_s)
            .fold(timeline.start, |s, g| s.with_goal(g.team))
    });
    let mut replay = Replay {
        cfg: config,
        timeline,
        half_time_score,
        score: timeline.start,
        weights: ReplicationWeights {
            psi1: 0.0,
            psi2: 0.0,
            cash: 0.0,
        },
        marks: [0.0; 2],
        accumulated: 0.0,
        target_account: 0.0,
    };

    let first = &steps[0];
    let v0 = replay.valuation(first.timestamp_s, replay.score, &first.quotes)?;
    replay.weights.cash = v0.target;
    replay.marks = v0.instruments;
    replay.accumulated = v0.target;
    let flagged = replay.rebalance(&v0)?;
    let mut records = vec![replay.record(first.timestamp_s, &v0, flagged)];
    let mut goal_records = Vec::new();
    let mut pending: Vec<(GoalEvent, (f64, f64, f64, f64))> = Vec::new();
    let mut goals = timeline
        .goals
        .iter()
        .filter(|g| g.timestamp_s > first.timestamp_s)
        .peekable();

    for step in &steps[1..] {
        let last = *records.last().unwrap();
        while let Some(goal) = goals.next_if(|g| g.timestamp_s <= step.timestamp_s) {
            let jump = replay.apply_goal(goal)?;
            if config.market_values {
                pending.push((*goal, jump));
            } else {
                goal_records.push(GoalRecord {
                    timestamp_s: goal.timestamp_s,
                    team: goal.team,
                    target_pre: jump.0,
                    target_post: jump.1,
                    portfolio_pre: jump.2,
                    portfolio_post: jump.3,
                });
            }
        }
        let v = replay.valuation(step.timestamp_s, replay.score, &step.quotes)?;
        replay.mark(v.instruments);
        let marked = replay.record(step.timestamp_s, &v, false);
        for (goal, _) in pending.drain(..) {
            goal_records.push(GoalRecord {
                timestamp_s: goal.timestamp_s,
                team: goal.team,
                target_pre: last.target_value,
                target_post: marked.target_value,
                portfolio_pre: last.portfolio_value,
                portfolio_post: marked.portfolio_value,
            });
        }
        let flagged = replay.rebalance(&v)?;
        let mut rec = replay.record(step.timestamp_s, &v, flagged);
        rec.ledger_error = marked.ledger_error;
        records.push(rec);
    }
    for goal in goals {
        log::warn!(
            "goal at {} s is after the last replay step and was ignored",
            goal.timestamp_s
        );
    }

    let summary = summarize(config, &records, &goal_records);
    Ok(HedgeReport {
        steps: records,
        goals: goal_records,
        summary,
    })
}

fn summarize(config: &ReplayConfig, steps: &[StepRecord], goals: &[GoalRecord]) -> HedgeSummary {
    let max_abs = |it: &mut dyn Iterator<Item = f64>| it.map(f64::abs).fold(0.0, f64::max);
    let pairs: Vec<(f64, f64)> = goals
        .iter()
        .map(|g| (g.target_jump(), g.portfolio_jump()))
        .collect();
    HedgeSummary {
        target: config.target,
        instruments: config.instruments,
        steps: steps.len(),
        goals: goals.len(),
        flagged_steps: steps.iter().filter(|s| s.flagged).count(),
        terminal_error: steps.last().map_or(0.0, |s| s.tracking_error.abs()),
        max_tracking_error: max_abs(&mut steps.iter().map(|s| s.tracking_error)),
        max_jump_mismatch: max_abs(&mut goals.iter().map(GoalRecord::mismatch)),
        max_ledger_error: max_abs(&mut steps.iter().map(|s| s.ledger_error)),
        jump_correlation: jump_correlation(&pairs).ok(),
    }
}

/// Pearson correlation of `(target jump, portfolio jump)` pairs.
pub fn jump_correlation(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} goal jump(s), at least two are needed",
            pairs.len()
        )));
    }
    let n = pairs.len() as f64;
    let (mx, my) = pairs
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::InsufficientData(
            "goal jumps have no variation".into(),
        ));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Jump pairs pooled over several replays and their correlation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpScatter {
    pub correlation: f64,
    pub pairs: Vec<(f64, f64)>,
}

pub fn jump_scatter_stats(reports: &[HedgeReport]) -> Result<JumpScatter> {
    let pairs: Vec<(f64, f64)> = reports
        .iter()
        .flat_map(|r| {
            r.goals
                .iter()
                .map(|g| (g.target_jump(), g.portfolio_jump()))
        })
        .collect();
    Ok(JumpScatter {
        correlation: jump_correlation(&pairs)?,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::price_next_goal;

    fn lam(h: f64, a: f64) -> Intensities {
        Intensities::new(h, a).unwrap()
    }

    const NG: [BetSpec; 2] = [BetSpec::NextGoalHome, BetSpec::NextGoalAway];

    #[test]
    fn next_goal_matrix_examples() {
        let m = next_goal_delta_matrix(0.0, 0.0).unwrap();
        assert_eq!(m.entries, [[1.0, 0.0], [0.0, 1.0]]);
        assert!((next_goal_delta_matrix(0.4, 0.3).unwrap().det() - 0.3).abs() < 1e-15);
        let s = ScoreState::new(0, 0, 0.0).unwrap();
        let l = lam(1.0, 1.0);
        let z1 = price_next_goal(Side::Home, &s, &l).value;
        let z2 = price_next_goal(Side::Away, &s, &l).value;
        let det = next_goal_delta_matrix(z1, z2).unwrap().det();
        assert!((det - (-2.0f64).exp()).abs() < 1e-12);
        assert!(next_goal_delta_matrix(0.6, 0.4).is_err());
    }

    #[test]
    fn instrument_matrix_agrees_with_closed_form() {
        let s = ScoreState::new(1, 2, 0.4).unwrap();
        let l = lam(1.4, 0.9);
        let m =
            instrument_delta_matrix([&NG[0], &NG[1]], &s, &l, &MatchContext::default()).unwrap();
        let z1 = price_next_goal(Side::Home, &s, &l).value;
        let z2 = price_next_goal(Side::Away, &s, &l).value;
        let closed = next_goal_delta_matrix(z1, z2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((m.entries[i][j] - closed.entries[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn trivial_weights() {
        let m = next_goal_delta_matrix(0.3, 0.2).unwrap();
        let flat = Greeks {
            delta_home: 0.0,
            delta_away: 0.0,
            theta: 0.0,
        };
        let w = solve_replication_weights(0.42, &flat, &m, [0.3, 0.2]).unwrap();
        assert_eq!((w.psi1, w.psi2, w.cash), (0.0, 0.0, 0.42));

        let own = Greeks {
            delta_home: 0.7,
            delta_away: -0.3,
            theta: 0.0,
        };
        let w = solve_replication_weights(0.3, &own, &m, [0.3, 0.2]).unwrap();
        assert!((w.psi1 - 1.0).abs() < 1e-15 && w.psi2.abs() < 1e-15 && w.cash.abs() < 1e-15);
    }

    #[test]
    fn singular_matrix_names_instruments() {
        let m = DeltaMatrix::new([[1.0, 2.0], [0.5, 1.0]]);
        match m.solve([1.0, 1.0]) {
            Err(Error::LinearlyDependent { first, second, .. }) => {
                assert_eq!(
                    (first.as_str(), second.as_str()),
                    ("instrument 1", "instrument 2")
                )
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn correlation_examples() {
        let aligned = [(0.1, 0.1), (-0.2, -0.2), (0.3, 0.3)];
        assert!((jump_correlation(&aligned).unwrap() - 1.0).abs() < 1e-15);
        let anti = [(0.1, -0.1), (-0.2, 0.2), (0.3, -0.3)];
        assert!((jump_correlation(&anti).unwrap() + 1.0).abs() < 1e-15);
        assert!(jump_correlation(&aligned[..1]).is_err());
    }

    #[test]
    fn self_replication_is_exact() {
        let goals = vec![
            GoalEvent {
                timestamp_s: 1000.5,
                team: Side::Home,
            },
            GoalEvent {
                timestamp_s: 4000.0,
                team: Side::Away,
            },
        ];
        let tl = HedgeTimeline::model_grid(5400.0, 0.5, Score::default(), goals, 0.0, 60.0);
        let cfg = ReplayConfig {
            target: BetSpec::NextGoalHome,
            instruments: NG,
            intensities: IntensitySource::Fixed(lam(1.2, 0.9)),
            market_values: false,
        };
        let r = replay_hedge(&tl, &cfg).unwrap();
        assert!(r.summary.max_tracking_error < 1e-14, "{:?}", r.summary);
        assert!(r.summary.max_ledger_error < 1e-14);
        assert_eq!(r.goals.len(), 2);
    }

    #[test]
    fn match_odds_replay_matches_jumps() {
        let goals = vec![
            GoalEvent {
                timestamp_s: 600.0,
                team: Side::Home,
            },
            GoalEvent {
                timestamp_s: 2500.0,
                team: Side::Away,
            },
            GoalEvent {
                timestamp_s: 3900.0,
                team: Side::Home,
            },
        ];
        let tl = HedgeTimeline::model_grid(5400.0, 0.5, Score::default(), goals, 0.0, 10.0);
        let cfg = ReplayConfig {
            target: BetSpec::MatchOddsHome,
            instruments: NG,
            intensities: IntensitySource::Fixed(lam(1.2, 0.8)),
            market_values: false,
        };
        let r = replay_hedge(&tl, &cfg).unwrap();
        assert_eq!(r.goals.len(), 3);
        assert!(r.summary.max_jump_mismatch < 1e-10, "{:?}", r.summary);
        assert!(r.summary.max_ledger_error < 1e-12);
        assert!(r.summary.terminal_error < 1e-2);
        assert_eq!(r.steps.last().unwrap().target_value, 1.0);
    }
}
