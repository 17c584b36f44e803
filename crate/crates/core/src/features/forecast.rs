//! One-step-ahead trend estimates over a yearly history (oldest first).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linearly decaying weighted mean of `lags` (most recent first).
///
/// Weights are `window, window - 1, ..., 1`, normalized to sum to one.
pub fn weighted_moving_average(lags: &[f64], window: usize) -> Result<f64> {
    if window == 0 {
        return Err(Error::InvalidParameter("moving-average window must be positive".into()));
    }
    if lags.len() != window {
        return Err(Error::LengthMismatch {
            expected: window,
            actual: lags.len(),
        });
    }
    let norm = (window * (window + 1) / 2) as f64;
    Ok(lags
        .iter()
        .enumerate()
        .map(|(i, v)| (window - i) as f64 * v)
        .sum::<f64>()
        / norm)
}

/// Last value plus the mean historical step. A single value forecasts
/// itself; an empty history forecasts zero.
pub fn drift_forecast(history: &[f64]) -> f64 {
    match history {
        [] => 0.0,
        [only] => *only,
        [first, .., last] => last + (last - first) / (history.len() - 1) as f64,
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("smoothing parameter {alpha} outside (0, 1]")))
    }
}

/// Final state of simple exponential smoothing started at the first value.
pub fn ses_forecast(history: &[f64], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let (first, rest) = history
        .split_first()
        .ok_or(Error::EmptyInput("exponential smoothing needs a history"))?;
    Ok(rest.iter().fold(*first, |s, y| alpha * y + (1.0 - alpha) * s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SesFit {
    pub alpha: f64,
    pub forecast: f64,
    /// Sum of squared one-step-ahead errors at `alpha`.
    pub sse: f64,
}

/// Number of grid points of [`ses_fit_alpha`]: α = 0.01, 0.02, ..., 1.00.
pub const SES_GRID_STEPS: u32 = 100;

/// Picks α on the 0.01 grid minimizing the in-sample one-step-ahead squared
/// error. Exact ties go to the smaller α.
pub fn ses_fit_alpha(history: &[f64]) -> Result<SesFit> {
    if history.len() < 3 {
        return Err(Error::InsufficientHistory(format!(
            "fitting a smoothing parameter needs 3 points, got {}",
            history.len()
        )));
    }
    let mut best: Option<SesFit> = None;
    for step in 1..=SES_GRID_STEPS {
        let alpha = f64::from(step) / f64::from(SES_GRID_STEPS);
        let mut level = history[0];
        let mut sse = 0.0;
        for &y in &history[1..] {
            let err = y - level;
            sse += err * err;
            level = alpha * y + (1.0 - alpha) * level;
        }
        if best.is_none_or(|b| sse < b.sse) {
            best = Some(SesFit {
                alpha,
                forecast: level,
                sse,
            });
        }
    }
    Ok(best.expect("grid is nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wma_hand_weighting() {
        assert!((weighted_moving_average(&[3.0, 2.0, 1.0], 3).unwrap() - 14.0 / 6.0).abs() < 1e-15);
        assert_eq!(weighted_moving_average(&[4.0, 1.0], 2).unwrap(), 3.0);
        assert!((weighted_moving_average(&[0.7, 0.7], 2).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn wma_length_mismatch() {
        assert!(matches!(
            weighted_moving_average(&[1.0, 2.0], 3),
            Err(Error::LengthMismatch { expected: 3, actual: 2 })
        ));
    }

    #[test]
    fn drift_examples() {
        assert_eq!(drift_forecast(&[1.0, 2.0, 3.0]), 4.0);
        assert_eq!(drift_forecast(&[2.0, 2.0, 2.0]), 2.0);
        assert_eq!(drift_forecast(&[1.0, 3.0, 2.0]), 2.5);
        assert_eq!(drift_forecast(&[7.0]), 7.0);
    }

    #[test]
    fn ses_examples() {
        assert_eq!(ses_forecast(&[3.0, 9.0, 4.0], 1.0).unwrap(), 4.0);
        assert_eq!(ses_forecast(&[0.0, 1.0], 0.5).unwrap(), 0.5);
        for a in [0.1, 0.5, 0.9] {
            assert_eq!(ses_forecast(&[1.5; 6], a).unwrap(), 1.5);
        }
    }

    #[test]
    fn ses_rejects_bad_alpha_and_empty() {
        assert!(ses_forecast(&[1.0], 0.0).is_err());
        assert!(ses_forecast(&[1.0], 1.5).is_err());
        assert!(ses_forecast(&[1.0], f64::NAN).is_err());
        assert!(ses_forecast(&[], 0.5).is_err());
    }

    #[test]
    fn fitted_alpha_on_ramp() {
        let fit = ses_fit_alpha(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(fit.alpha, 1.0);
        assert_eq!(fit.forecast, 4.0);
    }

    #[test]
    fn fitted_alpha_tie_breaks_low() {
        let fit = ses_fit_alpha(&[2.0; 5]).unwrap();
        assert_eq!(fit.alpha, 0.01);
        assert_eq!(fit.forecast, 2.0);
    }

    #[test]
    fn fitted_alpha_needs_three_points() {
        assert!(ses_fit_alpha(&[1.0, 2.0]).is_err());
    }
}
