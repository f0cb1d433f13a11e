//! Implied intensities from market quotes.
//!
//! For a snapshot of two-sided quotes the calibration minimises
//!
//! ```text
//! R(λ) = sqrt( (1/n) Σᵢ [ (midᵢ − modelᵢ(λ)) / (½·spreadᵢ) ]² )
//! ```
//!
//! so `R` is measured in half-spreads. The search runs Nelder–Mead on
//! `(ln λ₁, ln λ₂)` and polishes the result with Gauss–Newton steps whose
//! Jacobian comes from the goal deltas, `∂X/∂λᵢ = (1 − τ)·δᵢX` for European
//! bets. Standard errors are the square roots of the diagonal of the inverse
//! Gauss–Newton normal matrix at the optimum.

use serde::Serialize;

use crate::contracts::{payoff, BetSpec, Intensities, Quote, ScoreState, Side};
use crate::error::{Error, Result};
use crate::pricing::{price, MatchContext, ScoreDistribution};

/// Quotes whose mid lies outside this open interval are treated as settled.
pub const MID_BOUNDS: (f64, f64) = (0.001, 0.999);
/// Gradient norm of `R²` below which a fit counts as converged.
pub const GRADIENT_TOLERANCE: f64 = 1e-8;
/// Simplex diameter in log-intensity space below which a fit counts as converged.
pub const SIMPLEX_TOLERANCE: f64 = 1e-10;
const GAUSS_NEWTON_STEPS: usize = 10;
const INDEPENDENCE_TOLERANCE: f64 = 1e-8;

/// All quotes observed at one instant, with the match state they refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct QuoteSnapshot {
    pub timestamp_s: f64,
    pub state: ScoreState,
    pub context: MatchContext,
    pub quotes: Vec<Quote>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationConfig {
    /// Budget shared by the simplex search and the Gauss–Newton polish.
    pub max_iterations: usize,
    pub cold_start: Intensities,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            max_iterations: 1000,
            cold_start: Intensities {
                home: 1.3,
                away: 1.1,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub intensities: Intensities,
    /// `R` at the optimum, in half-spreads.
    pub residual: f64,
    pub stderr_home: f64,
    pub stderr_away: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// A quote that takes part in the fit.
#[derive(Debug, Clone, Copy)]
struct Target {
    bet: BetSpec,
    mid: f64,
    half_spread: f64,
}

struct Problem<'a> {
    snapshot: &'a QuoteSnapshot,
    targets: Vec<Target>,
}

impl<'a> Problem<'a> {
    fn new(snapshot: &'a QuoteSnapshot) -> Result<Self> {
        let mut targets = Vec::new();
        for q in &snapshot.quotes {
            let (Some(mid), Some(spread)) = (q.value_mid(), q.spread()) else {
                continue;
            };
            if !(mid > MID_BOUNDS.0 && mid < MID_BOUNDS.1) {
                continue;
            }
            if !(spread > 0.0) {
                return Err(Error::domain(format!(
                    "zero spread on {} at t = {} s",
                    q.bet, snapshot.timestamp_s
                )));
            }
            targets.push(Target {
                bet: q.bet,
                mid,
                half_spread: 0.5 * spread,
            });
        }
        if targets.is_empty() {
            return Err(Error::InsufficientData(format!(
                "no usable two-sided quotes at t = {} s",
                snapshot.timestamp_s
            )));
        }
        Ok(Problem { snapshot, targets })
    }

    fn state(&self) -> &ScoreState {
        &self.snapshot.state
    }

    /// Model values of every target bet.
    fn values(&self, lambda: &Intensities) -> Result<Vec<f64>> {
        let dist = self.distribution(lambda)?;
        self.targets
            .iter()
            .map(|t| match &dist {
                Some(d) if t.bet.is_european() => Ok(european_value(d, &t.bet, 0, 0)),
                _ => Ok(price(&t.bet, self.state(), lambda, &self.snapshot.context)?.value),
            })
            .collect()
    }

    fn distribution(&self, lambda: &Intensities) -> Result<Option<ScoreDistribution>> {
        if self.targets.iter().any(|t| t.bet.is_european()) {
            Ok(Some(ScoreDistribution::new(self.state(), lambda)?))
        } else {
            Ok(None)
        }
    }

    /// Model values and their derivatives with respect to `(λ₁, λ₂)`.
    fn jacobian(&self, lambda: &Intensities) -> Result<(Vec<f64>, Vec<[f64; 2]>)> {
        let dist = self.distribution(lambda)?;
        let remaining = self.state().remaining();
        let mut values = Vec::with_capacity(self.targets.len());
        let mut rows = Vec::with_capacity(self.targets.len());
        for t in &self.targets {
            match &dist {
                Some(d) if t.bet.is_european() => {
                    let x = european_value(d, &t.bet, 0, 0);
                    let up_home = european_value(d, &t.bet, 1, 0);
                    let up_away = european_value(d, &t.bet, 0, 1);
                    values.push(x);
                    rows.push([remaining * (up_home - x), remaining * (up_away - x)]);
                }
                _ => {
                    let at = |l: Intensities| {
                        price(&t.bet, self.state(), &l, &self.snapshot.context).map(|r| r.value)
                    };
                    values.push(at(*lambda)?);
                    let mut row = [0.0; 2];
                    for (i, side) in [Side::Home, Side::Away].into_iter().enumerate() {
                        let base = lambda.of(side);
                        let h = 1e-6 * base.max(1e-2);
                        let bump = |d: f64| match side {
                            Side::Home => Intensities {
                                home: base + d,
                                ..*lambda
                            },
                            Side::Away => Intensities {
                                away: base + d,
                                ..*lambda
                            },
                        };
                        row[i] = if base - h >= 0.0 {
                            (at(bump(h))? - at(bump(-h))?) / (2.0 * h)
                        } else {
                            (at(bump(h))? - at(bump(0.0))?) / h
                        };
                    }
                    rows.push(row);
                }
            }
        }
        Ok((values, rows))
    }

    fn weighted_residuals(&self, values: &[f64]) -> Vec<f64> {
        self.targets
            .iter()
            .zip(values)
            .map(|(t, v)| (t.mid - v) / t.half_spread)
            .collect()
    }

    /// `R²` at `lambda`.
    fn mean_square(&self, lambda: &Intensities) -> Result<f64> {
        let values = self.values(lambda)?;
        let r = self.weighted_residuals(&values);
        Ok(r.iter().map(|x| x * x).sum::<f64>() / r.len() as f64)
    }

    /// Weighted Jacobian `Jᵢⱼ = ∂modelᵢ/∂λⱼ / (½ spreadᵢ)` and weighted residuals.
    fn normal_system(&self, lambda: &Intensities) -> Result<(Vec<[f64; 2]>, Vec<f64>)> {
        let (values, rows) = self.jacobian(lambda)?;
        let r = self.weighted_residuals(&values);
        let j = rows
            .iter()
            .zip(&self.targets)
            .map(|(row, t)| [row[0] / t.half_spread, row[1] / t.half_spread])
            .collect();
        Ok((j, r))
    }

    fn check_identifiable(&self, lambda: &Intensities) -> Result<()> {
        let mut variants: Vec<BetSpec> = self.targets.iter().map(|t| t.bet).collect();
        variants.sort_by_key(|b| b.to_string());
        variants.dedup();
        if variants.len() < 2 {
            return Err(Error::Unidentifiable(format!(
                "{} usable quote(s) on {} distinct bet(s); at least two distinct bets are needed",
                self.targets.len(),
                variants.len()
            )));
        }
        let (_, rows) = self.jacobian(lambda)?;
        let independent = rows.iter().enumerate().any(|(i, a)| {
            rows[i + 1..].iter().any(|b| {
                let norm = a[0].hypot(a[1]) * b[0].hypot(b[1]);
                norm > 0.0 && (a[0] * b[1] - a[1] * b[0]).abs() > INDEPENDENCE_TOLERANCE * norm
            })
        });
        if !independent {
            return Err(Error::Unidentifiable(
                "the quoted bets have linearly dependent deltas".into(),
            ));
        }
        Ok(())
    }
}

fn european_value(
    dist: &ScoreDistribution,
    bet: &BetSpec,
    extra_home: u32,
    extra_away: u32,
) -> f64 {
    dist.expectation(|h, a| payoff(bet, h + extra_home, a + extra_away).unwrap_or(0.0))
        .clamp(0.0, 1.0)
}

fn solve2(a: [[f64; 2]; 2], b: [f64; 2]) -> Option<[f64; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let scale = a[0][0].abs().max(a[1][1].abs()).max(f64::MIN_POSITIVE);
    if !(det.abs() > 1e-14 * scale * scale) {
        return None;
    }
    Some([
        (b[0] * a[1][1] - b[1] * a[0][1]) / det,
        (a[0][0] * b[1] - a[1][0] * b[0]) / det,
    ])
}

fn normal_matrix(j: &[[f64; 2]]) -> [[f64; 2]; 2] {
    let mut m = [[0.0; 2]; 2];
    for row in j {
        for a in 0..2 {
            for b in 0..2 {
                m[a][b] += row[a] * row[b];
            }
        }
    }
    m
}

struct Simplex {
    best: [f64; 2],
    value: f64,
    iterations: usize,
    converged: bool,
}

fn nelder_mead(
    f: impl Fn([f64; 2]) -> f64,
    start: [f64; 2],
    step: f64,
    max_iterations: usize,
) -> Simplex {
    let mut pts = [
        start,
        [start[0] + step, start[1]],
        [start[0], start[1] + step],
    ];
    let mut vals = pts.map(&f);
    let diameter = |pts: &[[f64; 2]; 3]| {
        pts[1..]
            .iter()
            .map(|p| (p[0] - pts[0][0]).abs().max((p[1] - pts[0][1]).abs()))
            .fold(0.0, f64::max)
    };
    let mut iterations = 0;
    loop {
        let mut order = [0, 1, 2];
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.map(|i| pts[i]);
        vals = order.map(|i| vals[i]);
        if diameter(&pts) < SIMPLEX_TOLERANCE {
            return Simplex {
                best: pts[0],
                value: vals[0],
                iterations,
                converged: true,
            };
        }
        if iterations >= max_iterations {
            return Simplex {
                best: pts[0],
                value: vals[0],
                iterations,
                converged: false,
            };
        }
        iterations += 1;

        let c = [(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
        let along = |t: f64| [c[0] + t * (pts[2][0] - c[0]), c[1] + t * (pts[2][1] - c[1])];
        let xr = along(-1.0);
        let fr = f(xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(xe);
            (pts[2], vals[2]) = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < vals[1] {
            (pts[2], vals[2]) = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < vals[2] {
            let x = along(-0.5);
            (x, f(x))
        } else {
            let x = along(0.5);
            (x, f(x))
        };
        if fc < vals[2].min(fr) {
            (pts[2], vals[2]) = (xc, fc);
            continue;
        }
        for i in 1..3 {
            pts[i] = [(pts[0][0] + pts[i][0]) / 2.0, (pts[0][1] + pts[i][1]) / 2.0];
            vals[i] = f(pts[i]);
        }
    }
}

fn from_log(x: [f64; 2]) -> Intensities {
    Intensities {
        home: x[0].exp(),
        away: x[1].exp(),
    }
}

/// Spread-weighted pricing error `R` of the intensities against a snapshot.
pub fn objective(intensities: &Intensities, snapshot: &QuoteSnapshot) -> Result<f64> {
    Problem::new(snapshot)?
        .mean_square(intensities)
        .map(f64::sqrt)
}

/// Implied intensities for one snapshot.
///
/// Fails if fewer than two distinct bets with linearly independent deltas are
/// usable. Running out of iterations is not an error: the best point found is
/// returned with `converged == false`.
pub fn calibrate_snapshot(
    snapshot: &QuoteSnapshot,
    init: Option<Intensities>,
    config: &CalibrationConfig,
) -> Result<CalibrationResult> {
    let problem = Problem::new(snapshot)?;
    let init = init.unwrap_or(config.cold_start);
    let init = Intensities::new(init.home.max(1e-6), init.away.max(1e-6))?;
    problem.check_identifiable(&init)?;

    let f = |x: [f64; 2]| problem.mean_square(&from_log(x)).unwrap_or(f64::INFINITY);
    let simplex = nelder_mead(
        f,
        [init.home.ln(), init.away.ln()],
        0.2,
        config.max_iterations,
    );
    let mut lambda = from_log(simplex.best);
    let mut value = simplex.value;
    let mut iterations = simplex.iterations;

    let polish_budget = config
        .max_iterations
        .saturating_sub(iterations)
        .min(GAUSS_NEWTON_STEPS);
    for _ in 0..polish_budget {
        let (j, r) = problem.normal_system(&lambda)?;
        let m = normal_matrix(&j);
        let g = j.iter().zip(&r).fold([0.0; 2], |acc, (row, ri)| {
            [acc[0] + row[0] * ri, acc[1] + row[1] * ri]
        });
        let Some(step) = solve2(m, g) else { break };
        iterations += 1;
        let mut accepted = false;
        let mut t = 1.0;
        for _ in 0..30 {
            let cand = Intensities {
                home: lambda.home + t * step[0],
                away: lambda.away + t * step[1],
            };
            if cand.home > 0.0 && cand.away > 0.0 {
                let v = problem.mean_square(&cand)?;
                if v < value {
                    (lambda, value, accepted) = (cand, v, true);
                    break;
                }
            }
            t *= 0.5;
        }
        let size = (t * step[0]).abs().max((t * step[1]).abs());
        if !accepted || size <= 1e-15 * lambda.home.max(lambda.away) {
            break;
        }
    }

    let (j, r) = problem.normal_system(&lambda)?;
    let n = r.len() as f64;
    let grad = j.iter().zip(&r).fold([0.0; 2], |acc, (row, ri)| {
        [
            acc[0] - 2.0 * row[0] * ri / n,
            acc[1] - 2.0 * row[1] * ri / n,
        ]
    });
    let m = normal_matrix(&j);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let (stderr_home, stderr_away) = if det > 0.0 {
        ((m[1][1] / det).sqrt(), (m[0][0] / det).sqrt())
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    let converged = simplex.converged || grad[0].hypot(grad[1]) < GRADIENT_TOLERANCE;
    Ok(CalibrationResult {
        intensities: lambda,
        residual: value.max(0.0).sqrt(),
        stderr_home,
        stderr_away,
        iterations,
        converged,
    })
}

/// One grid point of an intensity series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesEntry {
    Fit(CalibrationResult),
    /// No snapshot in the grid cell, or its calibration failed.
    Gap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub timestamp_s: f64,
    pub entry: SeriesEntry,
}

impl SeriesPoint {
    pub fn fit(&self) -> Option<&CalibrationResult> {
        match &self.entry {
            SeriesEntry::Fit(r) => Some(r),
            SeriesEntry::Gap => None,
        }
    }
}

/// Implied intensities through a match, in increasing time order.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensitySeries {
    /// Length of regulation time, converting timestamps to match clock.
    pub match_length_s: f64,
    pub points: Vec<SeriesPoint>,
}

impl IntensitySeries {
    pub fn clock(&self, point: &SeriesPoint) -> f64 {
        point.timestamp_s / self.match_length_s
    }

    /// Intensities of the latest fit at or before `timestamp_s`, falling back to
    /// the first fit of the series.
    pub fn intensities_at(&self, timestamp_s: f64) -> Option<Intensities> {
        let mut fits = self
            .points
            .iter()
            .filter_map(|p| p.fit().map(|f| (p.timestamp_s, f.intensities)));
        let first = fits.next()?;
        let mut best = first.1;
        if first.0 > timestamp_s {
            return Some(best);
        }
        for (t, l) in fits {
            if t > timestamp_s {
                break;
            }
            best = l;
        }
        Some(best)
    }
}

/// Calibrates a timeline of snapshots on a regular grid of `step_s` seconds
/// starting at the first snapshot and ending once the last one is covered.
///
/// Each grid time `t` uses the latest snapshot in `(t − step_s, t]`, warm
/// started from the previous fit. Cells without a snapshot, or where the
/// calibration fails, become [`SeriesEntry::Gap`].
pub fn calibrate_series(
    snapshots: &[QuoteSnapshot],
    step_s: f64,
    match_length_s: f64,
    config: &CalibrationConfig,
) -> Result<IntensitySeries> {
    if snapshots.is_empty() {
        return Err(Error::NoSnapshots);
    }
    if !(step_s > 0.0) || !(match_length_s > 0.0) {
        return Err(Error::domain("step and match length must be positive"));
    }
    if snapshots
        .windows(2)
        .any(|w| w[1].timestamp_s <= w[0].timestamp_s)
    {
        return Err(Error::domain(
            "snapshots must have strictly increasing timestamps",
        ));
    }
    let t0 = snapshots[0].timestamp_s;
    let last = snapshots[snapshots.len() - 1].timestamp_s;
    let mut points = Vec::new();
    let mut warm: Option<Intensities> = None;
    let mut next = 0;
    for k in 0.. {
        let t = t0 + k as f64 * step_s;
        if t - step_s >= last - 1e-9 * step_s {
            break;
        }
        let mut chosen = None;
        while next < snapshots.len() && snapshots[next].timestamp_s <= t + 1e-9 * step_s {
            if snapshots[next].timestamp_s > t - step_s {
                chosen = Some(&snapshots[next]);
            }
            next += 1;
        }
        let point = match chosen {
            None => SeriesPoint {
                timestamp_s: t,
                entry: SeriesEntry::Gap,
            },
            Some(snap) => match calibrate_snapshot(snap, warm, config) {
                Ok(fit) => {
                    warm = fit.converged.then_some(fit.intensities);
                    SeriesPoint {
                        timestamp_s: snap.timestamp_s,
                        entry: SeriesEntry::Fit(fit),
                    }
                }
                Err(e) => {
                    log::warn!("calibration failed at t = {} s: {e}", snap.timestamp_s);
                    SeriesPoint {
                        timestamp_s: snap.timestamp_s,
                        entry: SeriesEntry::Gap,
                    }
                }
            },
        };
        points.push(point);
    }
    Ok(IntensitySeries {
        match_length_s,
        points,
    })
}

/// Drift and volatility of `ln(λ₁ + λ₂)` along an intensity series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftVol {
    pub mu_per_match: f64,
    pub sigma_per_sqrt_match: f64,
    /// Converged fits used.
    pub points: usize,
    /// Adjacent pairs of converged fits used for the increments.
    pub pairs: usize,
}

/// Minimum number of converged fits for [`estimate_drift_vol`].
pub const MIN_DRIFT_VOL_POINTS: usize = 10;

/// Estimates `μ` and `σ` in `d ln(λ₁ + λ₂) = μ dτ + σ dW` from increments
/// between adjacent converged points: `μ̂` is the mean of `Δ ln L / Δτ` and
/// `σ̂` the sample standard deviation of `Δ ln L / √Δτ`.
pub fn estimate_drift_vol(series: &IntensitySeries) -> Result<DriftVol> {
    let valid: Vec<Option<(f64, f64)>> = series
        .points
        .iter()
        .map(|p| match p.fit() {
            Some(f) if f.converged && f.intensities.total() > 0.0 => {
                Some((series.clock(p), f.intensities.total().ln()))
            }
            _ => None,
        })
        .collect();
    let count = valid.iter().flatten().count();
    if count < MIN_DRIFT_VOL_POINTS {
        return Err(Error::InsufficientData(format!(
            "{count} converged point(s), at least {MIN_DRIFT_VOL_POINTS} are needed"
        )));
    }
    let mut drifts = Vec::new();
    let mut shocks = Vec::new();
    for w in valid.windows(2) {
        if let [Some((t0, l0)), Some((t1, l1))] = w {
            let dt = t1 - t0;
            drifts.push((l1 - l0) / dt);
            shocks.push((l1 - l0) / dt.sqrt());
        }
    }
    if shocks.len() < 2 {
        return Err(Error::InsufficientData(
            "fewer than two adjacent pairs of converged points".into(),
        ));
    }
    let n = shocks.len() as f64;
    let mu = drifts.iter().sum::<f64>() / n;
    let mean_shock = shocks.iter().sum::<f64>() / n;
    let var = shocks.iter().map(|s| (s - mean_shock).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(DriftVol {
        mu_per_match: mu,
        sigma_per_sqrt_match: var.sqrt(),
        points: count,
        pairs: shocks.len(),
    })
}
