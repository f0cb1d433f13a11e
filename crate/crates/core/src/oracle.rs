//! Independent verification engines.
//!
//! Nothing in the pricing path depends on this module. It provides a seeded
//! simulator of the two goal processes, a Monte Carlo pricer built on it, and a
//! double-double enumeration of the European pricing sum.
//!
//! # Random numbers
//!
//! Paths are generated in batches of [`BATCH_SIZE`]. Batch `b` of a run with
//! seed `s` draws from ChaCha8 seeded with `ChaCha8Rng::seed_from_u64(s)` on
//! stream `b`. Each draw takes one `u64` `x` and maps it to
//! `u = ((x >> 11) + 1)·2⁻⁵³ ∈ (0, 1]`; an exponential inter-arrival with rate
//! `λ` is `−ln(u)/λ` in units of match clock. For every path the home goals
//! are drawn first, then the away goals, each until the next arrival falls
//! after the final whistle. Results therefore do not depend on the number of
//! worker threads.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::contracts::{payoff, BetSpec, Intensities, Outcome, Score, ScoreState, Side};
use crate::error::{Error, Result};
use crate::pricing::MatchContext;

pub const BATCH_SIZE: usize = 1 << 14;

/// One goal on a simulated path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoalTime {
    pub clock: f64,
    pub team: Side,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulatedPath {
    /// Goals after the start state, in increasing clock order.
    pub events: Vec<GoalTime>,
    pub terminal: Score,
}

impl SimulatedPath {
    /// Score at `clock`, counting goals scored at or before it.
    pub fn score_at(&self, start: Score, clock: f64) -> Score {
        self.events
            .iter()
            .take_while(|e| e.clock <= clock)
            .fold(start, |s, e| s.with_goal(e.team))
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn arrivals(rng: &mut ChaCha8Rng, rate: f64, start: f64, team: Side, out: &mut Vec<GoalTime>) {
    if rate <= 0.0 {
        return;
    }
    let mut t = start;
    loop {
        t += -uniform(rng).ln() / rate;
        if t > 1.0 {
            break;
        }
        out.push(GoalTime { clock: t, team });
    }
}

fn fill_path(
    rng: &mut ChaCha8Rng,
    intensities: &Intensities,
    start: f64,
    events: &mut Vec<GoalTime>,
) {
    events.clear();
    arrivals(rng, intensities.home, start, Side::Home, events);
    arrivals(rng, intensities.away, start, Side::Away, events);
    events.sort_by(|a, b| a.clock.total_cmp(&b.clock));
}

fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    rng
}

/// Runs `n` paths in parallel batches, folding each batch with `visit`.
fn fold_paths<A, V>(intensities: &Intensities, start: f64, n: usize, seed: u64, visit: V) -> Vec<A>
where
    A: Default + Send,
    V: Fn(&mut A, &[GoalTime]) + Sync,
{
    let batches = n.div_ceil(BATCH_SIZE);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(seed, b);
            let mut acc = A::default();
            let mut events = Vec::new();
            let len = BATCH_SIZE.min(n - b * BATCH_SIZE);
            for _ in 0..len {
                fill_path(&mut rng, intensities, start, &mut events);
                visit(&mut acc, &events);
            }
            acc
        })
        .collect()
}

/// Simulates `n` paths of both goal processes from `start` to the final whistle.
pub fn simulate_paths(
    intensities: &Intensities,
    start: &ScoreState,
    n: usize,
    seed: u64,
) -> Vec<SimulatedPath> {
    let origin = start.score();
    let batches: Vec<Vec<SimulatedPath>> =
        fold_paths(intensities, start.clock, n, seed, |acc: &mut Vec<_>, ev| {
            let terminal = ev.iter().fold(origin, |s, e| s.with_goal(e.team));
            acc.push(SimulatedPath {
                events: ev.to_vec(),
                terminal,
            });
        });
    batches.into_iter().flatten().collect()
}

/// Payoff of any bet along one path of goals starting from `state`.
pub fn path_payoff(
    bet: &BetSpec,
    state: &ScoreState,
    ctx: &MatchContext,
    events: &[GoalTime],
) -> Result<f64> {
    let origin = state.score();
    match *bet {
        BetSpec::NextGoalHome => Ok(f64::from(
            events.first().is_some_and(|e| e.team == Side::Home),
        )),
        BetSpec::NextGoalAway => Ok(f64::from(
            events.first().is_some_and(|e| e.team == Side::Away),
        )),
        BetSpec::HalfTimeFullTime {
            half_time,
            full_time,
        } => {
            let ht = if state.clock >= ctx.half_clock {
                ctx.half_time_score.ok_or(Error::MissingHalfTimeScore)?
            } else {
                events
                    .iter()
                    .take_while(|e| e.clock < ctx.half_clock)
                    .fold(origin, |s, e| s.with_goal(e.team))
            };
            let ft = events.iter().fold(origin, |s, e| s.with_goal(e.team));
            Ok(f64::from(
                Outcome::of(ht.home, ht.away) == half_time
                    && Outcome::of(ft.home, ft.away) == full_time,
            ))
        }
        _ => {
            let ft = events.iter().fold(origin, |s, e| s.with_goal(e.team));
            payoff(bet, ft.home, ft.away)
        }
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

#[derive(Default)]
struct Moments {
    sum: f64,
    sum_sq: f64,
    failed: bool,
}

/// Sample mean of the payoff over `n` simulated paths.
pub fn mc_price(
    bet: &BetSpec,
    state: &ScoreState,
    intensities: &Intensities,
    ctx: &MatchContext,
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n < 2 {
        return Err(Error::domain("Monte Carlo needs at least two paths"));
    }
    // Fail fast on configurations the payoff cannot evaluate.
    path_payoff(bet, state, ctx, &[])?;
    let parts: Vec<Moments> = fold_paths(
        intensities,
        state.clock,
        n,
        seed,
        |acc: &mut Moments, ev| match path_payoff(bet, state, ctx, ev) {
            Ok(x) => {
                acc.sum += x;
                acc.sum_sq += x * x;
            }
            Err(_) => acc.failed = true,
        },
    );
    if parts.iter().any(|m| m.failed) {
        return Err(Error::domain(format!(
            "payoff of {bet} could not be evaluated on a path"
        )));
    }
    let nf = n as f64;
    let sum: f64 = parts.iter().map(|m| m.sum).sum();
    let sum_sq: f64 = parts.iter().map(|m| m.sum_sq).sum();
    let mean = sum / nf;
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    Ok(McEstimate {
        estimate: mean,
        stderr: (var / nf).sqrt(),
    })
}

/// Double-double number `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: err }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let lo = s.lo + self.lo + o.lo;
        let r = s.hi + lo;
        Dd {
            hi: r,
            lo: lo - (r - s.hi),
        }
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let err = self.hi.mul_add(o.hi, -p);
        let lo = err + self.hi * o.lo + self.lo * o.hi;
        let r = p + lo;
        Dd {
            hi: r,
            lo: lo - (r - p),
        }
    }

    fn mul_f64(self, x: f64) -> Dd {
        self.mul(Dd::from(x))
    }

    fn div_f64(self, x: f64) -> Dd {
        let q = self.hi / x;
        // Residual self − q·x, then one correction step.
        let r = self.add(Dd::from(q).mul_f64(-x));
        let q2 = r.hi / x;
        Dd::two_sum(q, q2)
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// `e^{-x}` for `x ≥ 0` in double-double: a Taylor series at `x/2⁶`
/// followed by repeated squaring.
fn dd_exp_neg(x: f64) -> Dd {
    const HALVINGS: u32 = 6;
    let y = -x / f64::from(1u32 << HALVINGS);
    let mut term = Dd::from(1.0);
    let mut sum = Dd::from(1.0);
    for k in 1..80 {
        term = term.mul_f64(y).div_f64(k as f64);
        sum = sum.add(term);
        if term.hi.abs() < 1e-34 {
            break;
        }
    }
    for _ in 0..HALVINGS {
        sum = sum.mul(sum);
    }
    sum
}

/// Poisson weights for 0..=cap extra goals, in double-double.
fn dd_weights(mean: f64, cap: u32) -> Vec<Dd> {
    let mut w = Vec::with_capacity(cap as usize + 1);
    let mut p = dd_exp_neg(mean);
    w.push(p);
    for k in 1..=cap {
        p = p.mul_f64(mean).div_f64(k as f64);
        w.push(p);
    }
    w
}

/// Upper bound on `P[N > cap]` for `N ~ Poisson(mean)`, via the geometric
/// majorant of the tail terms. Requires `cap + 2 > mean`.
fn tail_bound(mean: f64, last: f64, cap: u32) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let next = last * mean / (cap + 1) as f64;
    let ratio = mean / (cap + 2) as f64;
    if ratio >= 1.0 {
        return 1.0;
    }
    next / (1.0 - ratio)
}

/// High-precision value of a payoff with an explicit bound on what was left out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnumeratedPrice {
    pub value: f64,
    /// Omitted probability mass times `max |payoff|` over the grid.
    pub remainder: f64,
}

/// Enumerates `Σ Π(n₁, n₂)·P(n₁ − N¹; Λ₁)·P(n₂ − N²; Λ₂)` over a fixed cap of
/// extra goals per team, accumulating in double-double.
pub fn enumerate_price(
    payoff: impl Fn(u32, u32) -> f64,
    state: &ScoreState,
    intensities: &Intensities,
    cap: u32,
) -> Result<EnumeratedPrice> {
    if cap < 25 {
        return Err(Error::domain("enumeration cap must be at least 25"));
    }
    let horizon = state.remaining();
    let (m1, m2) = (intensities.home * horizon, intensities.away * horizon);
    let w1 = dd_weights(m1, cap);
    let w2 = dd_weights(m2, cap);
    let mut total = Dd::default();
    let mut max_abs: f64 = 0.0;
    for (i, p) in w1.iter().enumerate() {
        let mut inner = Dd::default();
        for (j, q) in w2.iter().enumerate() {
            let x = payoff(state.home_goals + i as u32, state.away_goals + j as u32);
            max_abs = max_abs.max(x.abs());
            if x != 0.0 {
                inner = inner.add(q.mul_f64(x));
            }
        }
        total = total.add(p.mul(inner));
    }
    let b1 = tail_bound(m1, w1[cap as usize].value(), cap);
    let b2 = tail_bound(m2, w2[cap as usize].value(), cap);
    Ok(EnumeratedPrice {
        value: total.value(),
        remainder: max_abs.max(1.0) * (b1 + b2),
    })
}
