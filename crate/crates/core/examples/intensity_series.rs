//! Calibrates a full quoted match into an intensity series and estimates the
//! drift and volatility of the total intensity, first on a market whose
//! intensities decay exponentially and then on random-walk fixtures.
//!
//! ```text
//! cargo run --release --example intensity_series
//! ```

use inplay::calibration::{calibrate_series, estimate_drift_vol, CalibrationConfig, QuoteSnapshot};
use inplay::pricing::MatchContext;
use inplay::synthetic::{calibration_bets, geometric_series, model_snapshot};
use inplay::{Intensities, ScoreState};

fn main() -> inplay::Result<()> {
    let bets = calibration_bets();
    let snapshots = (0..90)
        .map(|k| {
            let t = 60.0 * k as f64;
            let clock = t / 5400.0;
            let total = 2.6 * (0.55 * clock).exp();
            let l = Intensities::new(0.55 * total, 0.45 * total)?;
            model_snapshot(
                t,
                ScoreState::new(0, 0, clock)?,
                MatchContext::default(),
                &bets,
                &l,
                0.02,
            )
        })
        .collect::<inplay::Result<Vec<QuoteSnapshot>>>()?;
    let series = calibrate_series(&snapshots, 60.0, 5400.0, &CalibrationConfig::default())?;
    for p in series.points.iter().step_by(15) {
        let f = p.fit().expect("fit");
        println!(
            "t = {:>4} s  lambda = ({:.6}, {:.6})  residual {:.1e}",
            p.timestamp_s, f.intensities.home, f.intensities.away, f.residual
        );
    }
    let dv = estimate_drift_vol(&series)?;
    println!(
        "calibrated market: mu = {:.9} per match, sigma = {:.2e}",
        dv.mu_per_match, dv.sigma_per_sqrt_match
    );

    let sigmas: Vec<f64> = (0..200)
        .map(|seed| {
            estimate_drift_vol(&geometric_series(2.6, 0.55, 0.51, 90, 60.0, 5400.0, seed))
                .map(|d| d.sigma_per_sqrt_match)
        })
        .collect::<inplay::Result<_>>()?;
    let within = sigmas.iter().filter(|s| (**s - 0.51).abs() <= 0.12).count();
    let mean = sigmas.iter().sum::<f64>() / sigmas.len() as f64;
    println!("random walks with sigma 0.51: mean estimate {mean:.3}, {within}/200 within 0.12");
    Ok(())
}
