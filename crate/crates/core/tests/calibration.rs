use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use inplay::calibration::{
    calibrate_series, calibrate_snapshot, estimate_drift_vol, objective, CalibrationConfig,
    QuoteSnapshot, SeriesEntry,
};
use inplay::pricing::{price, MatchContext};
use inplay::synthetic::{
    calibration_bets, geometric_series, model_snapshot, model_timeline, noisy_snapshot,
};
use inplay::{BetSpec, Error, GoalEvent, Intensities, Quote, Score, ScoreState, Side};

fn snapshot(l: &Intensities, s: ScoreState) -> QuoteSnapshot {
    model_snapshot(
        0.0,
        s,
        MatchContext::default(),
        &calibration_bets(),
        l,
        0.02,
    )
    .unwrap()
}

#[test]
fn round_trip_on_the_standard_grid() {
    let grid = [0.2, 0.5, 1.0, 2.0, 4.0];
    let mut cases = Vec::new();
    for &h in &grid {
        for &a in &grid {
            for home in 0..=3 {
                for away in 0..=3 {
                    for &c in &[0.1, 0.5, 0.8] {
                        cases.push((
                            Intensities::new(h, a).unwrap(),
                            ScoreState::new(home, away, c).unwrap(),
                        ));
                    }
                }
            }
        }
    }
    let cfg = CalibrationConfig::default();
    let failures: Vec<String> = cases
        .par_iter()
        .filter_map(|(l, s)| {
            let fit = calibrate_snapshot(&snapshot(l, *s), None, &cfg).unwrap();
            let err = (fit.intensities.home - l.home)
                .abs()
                .max((fit.intensities.away - l.away).abs());
            (err > 1e-6 || fit.residual >= 1e-8 || !fit.converged)
                .then(|| format!("{l:?} {s:?}: {fit:?}"))
        })
        .collect();
    assert!(
        failures.is_empty(),
        "{} failures, e.g. {}",
        failures.len(),
        failures[0]
    );
}

#[test]
fn fitted_residual_never_exceeds_the_true_one() {
    let truth = Intensities::new(2.1, 0.6).unwrap();
    let s = ScoreState::new(1, 1, 0.35).unwrap();
    let cfg = CalibrationConfig::default();
    for seed in 0..40 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let snap = noisy_snapshot(
            0.0,
            s,
            MatchContext::default(),
            &calibration_bets(),
            &truth,
            0.03,
            &mut rng,
        )
        .unwrap();
        let fit = calibrate_snapshot(&snap, None, &cfg).unwrap();
        assert!(fit.converged);
        assert!(
            fit.residual <= objective(&truth, &snap).unwrap() + 1e-8,
            "seed {seed}"
        );
    }
}

#[test]
fn stderr_scales_with_uniform_spread_scaling() {
    let l = Intensities::new(1.3, 0.7).unwrap();
    let s = ScoreState::new(0, 0, 0.2).unwrap();
    let ctx = MatchContext::default();
    let build = |half: f64| QuoteSnapshot {
        timestamp_s: 0.0,
        state: s,
        context: ctx,
        quotes: calibration_bets()
            .into_iter()
            .filter_map(|bet| {
                let v = price(&bet, &s, &l, &ctx).unwrap().value;
                (v > 0.05 && v < 0.95).then(|| Quote::from_values(bet, v + half, v - half).unwrap())
            })
            .collect(),
    };
    let cfg = CalibrationConfig::default();
    let wide = calibrate_snapshot(&build(0.02), None, &cfg).unwrap();
    for c in [0.5, 0.25, 0.1] {
        let narrow = calibrate_snapshot(&build(0.02 * c), None, &cfg).unwrap();
        assert!((narrow.stderr_home / wide.stderr_home - c).abs() < 1e-6);
        assert!((narrow.stderr_away / wide.stderr_away - c).abs() < 1e-6);
    }
}

#[test]
fn settled_and_one_sided_quotes_do_not_count() {
    let l = Intensities::new(1.0, 1.0).unwrap();
    let s = ScoreState::new(0, 0, 0.5).unwrap();
    let mut snap = snapshot(&l, s);
    let base = calibrate_snapshot(&snap, None, &CalibrationConfig::default()).unwrap();
    snap.quotes.push(Quote {
        bet: BetSpec::NextGoalHome,
        back_decimal: Some(3.0),
        lay_decimal: None,
    });
    snap.quotes.push(
        Quote::from_values(BetSpec::CorrectScore { home: 6, away: 6 }, 0.0005, 0.0001).unwrap(),
    );
    let again = calibrate_snapshot(&snap, None, &CalibrationConfig::default()).unwrap();
    assert_eq!(base.intensities, again.intensities);
}

#[test]
fn draw_quote_alone_is_unidentifiable() {
    let l = Intensities::new(1.0, 1.0).unwrap();
    let mut snap = snapshot(&l, ScoreState::new(0, 0, 0.0).unwrap());
    snap.quotes.retain(|q| q.bet == BetSpec::MatchOddsDraw);
    assert!(matches!(
        calibrate_snapshot(&snap, None, &CalibrationConfig::default()),
        Err(Error::Unidentifiable(_))
    ));
    snap.quotes.clear();
    assert!(matches!(
        calibrate_snapshot(&snap, None, &CalibrationConfig::default()),
        Err(Error::InsufficientData(_))
    ));
}

#[test]
fn constant_market_gives_a_flat_series() {
    let l = Intensities::new(1.45, 1.05).unwrap();
    let goals = [
        GoalEvent {
            timestamp_s: 2000.0,
            team: Side::Away,
        },
        GoalEvent {
            timestamp_s: 4100.0,
            team: Side::Away,
        },
    ];
    let snaps = model_timeline(
        &l,
        Score::default(),
        &goals,
        &calibration_bets(),
        60.0,
        5400.0,
        0.5,
        0.02,
    )
    .unwrap();
    let series = calibrate_series(&snaps, 60.0, 5400.0, &CalibrationConfig::default()).unwrap();
    assert_eq!(series.points.len(), 91);
    let fits: Vec<_> = series.points.iter().filter_map(|p| p.fit()).collect();
    assert_eq!(fits.len(), 90);
    assert!(matches!(series.points[90].entry, SeriesEntry::Gap));
    for f in fits {
        assert!(
            (f.intensities.home - l.home).abs() <= 1e-6
                && (f.intensities.away - l.away).abs() <= 1e-6,
            "{f:?}"
        );
    }
    let dv = estimate_drift_vol(&series).unwrap();
    assert!(dv.mu_per_match.abs() < 1e-6 && dv.sigma_per_sqrt_match < 1e-6);
}

#[test]
fn sparse_snapshots_leave_gaps_on_the_grid() {
    let l = Intensities::new(1.2, 1.2).unwrap();
    let snaps: Vec<QuoteSnapshot> = [0.0, 60.0, 250.0, 270.0, 400.0]
        .iter()
        .map(|&t| {
            model_snapshot(
                t,
                ScoreState::new(0, 0, t / 5400.0).unwrap(),
                MatchContext::default(),
                &calibration_bets(),
                &l,
                0.02,
            )
            .unwrap()
        })
        .collect();
    let series = calibrate_series(&snaps, 60.0, 5400.0, &CalibrationConfig::default()).unwrap();
    let kinds: Vec<bool> = series.points.iter().map(|p| p.fit().is_some()).collect();
    assert_eq!(kinds, [true, true, false, false, false, true, false, true]);
    assert_eq!(series.points[5].timestamp_s, 270.0);
    assert_eq!(series.points[7].timestamp_s, 400.0);
    assert_eq!(
        series.intensities_at(200.0),
        series.points[1].fit().map(|f| f.intensities)
    );
    assert!(calibrate_series(&[], 60.0, 5400.0, &CalibrationConfig::default()).is_err());
}

#[test]
fn drift_and_vol_of_a_random_walk() {
    let mut errors: Vec<f64> = (0..50)
        .map(|seed| {
            estimate_drift_vol(&geometric_series(2.5, 0.55, 0.51, 90, 60.0, 5400.0, seed))
                .unwrap()
                .sigma_per_sqrt_match
                - 0.51
        })
        .collect();
    errors.sort_by(f64::total_cmp);
    assert!(errors[25].abs() < 0.05, "median error {}", errors[25]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn objective_ignores_quote_order(
        order in Just((0..31usize).collect::<Vec<_>>()).prop_shuffle(),
        home in 0.2..3.0f64, away in 0.2..3.0f64,
    ) {
        let truth = Intensities::new(1.3, 0.9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let snap = noisy_snapshot(0.0, ScoreState::new(1, 0, 0.4).unwrap(), MatchContext::default(), &calibration_bets(), &truth, 0.02, &mut rng).unwrap();
        let mut shuffled = snap.clone();
        shuffled.quotes = order.iter().map(|&i| snap.quotes[i]).collect();
        let l = Intensities::new(home, away).unwrap();
        let (a, b) = (objective(&l, &snap).unwrap(), objective(&l, &shuffled).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }
}
