//! Implied intensities from one quote snapshot: an exact round trip, then a
//! study of how often the fitted intensities fall within three standard
//! errors of the truth when the mids are perturbed.
//!
//! ```text
//! cargo run --release --example calibrate_snapshot -- [trials]
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use inplay::calibration::{calibrate_snapshot, CalibrationConfig};
use inplay::pricing::MatchContext;
use inplay::synthetic::{calibration_bets, model_snapshot, noisy_snapshot};
use inplay::{Intensities, ScoreState};

fn main() -> inplay::Result<()> {
    let trials: u64 = std::env::args()
        .nth(1)
        .map_or(200, |s| s.parse().expect("trial count"));
    let truth = Intensities::new(1.3, 0.7)?;
    let state = ScoreState::new(0, 0, 0.2)?;
    let ctx = MatchContext::default();
    let cfg = CalibrationConfig::default();
    let bets = calibration_bets();

    let exact = calibrate_snapshot(
        &model_snapshot(0.0, state, ctx, &bets, &truth, 0.02)?,
        None,
        &cfg,
    )?;
    println!(
        "exact quotes: lambda = ({:.10}, {:.10}), residual {:.2e}, {} iterations",
        exact.intensities.home, exact.intensities.away, exact.residual, exact.iterations
    );

    let mut covered = 0;
    let mut residuals = Vec::new();
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let snap = noisy_snapshot(0.0, state, ctx, &bets, &truth, 0.02, &mut rng)?;
        let fit = calibrate_snapshot(&snap, None, &cfg)?;
        residuals.push(fit.residual);
        if (fit.intensities.home - truth.home).abs() <= 3.0 * fit.stderr_home
            && (fit.intensities.away - truth.away).abs() <= 3.0 * fit.stderr_away
        {
            covered += 1;
        }
    }
    let mean = residuals.iter().sum::<f64>() / residuals.len() as f64;
    println!("noisy quotes: {covered}/{trials} fits within 3 standard errors, mean residual {mean:.3} half-spreads");
    println!(
        "stderr at the truth: ({:.4}, {:.4})",
        exact.stderr_home, exact.stderr_away
    );
    Ok(())
}
