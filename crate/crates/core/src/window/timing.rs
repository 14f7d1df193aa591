//! Backlog and reaction-time calculators for sliding-window decoding.

use serde::{Deserialize, Serialize};

use super::WindowConfig;
use crate::error::{Error, Result};

/// Times in arbitrary but consistent units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingModel {
    /// Syndrome generation time per round.
    pub tau_sg: f64,
    /// IO latency before a measurement outcome reaches the decoder.
    pub tau_l: f64,
    /// Decode time per window.
    pub t_w: f64,
}

impl TimingModel {
    pub fn new(tau_sg: f64, tau_l: f64, t_w: f64) -> Result<Self> {
        for (name, v) in [("tau_sg", tau_sg), ("tau_l", tau_l), ("t_w", t_w)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::param(format!("{name} = {v} must be finite and non-negative")));
            }
        }
        Ok(TimingModel { tau_sg, tau_l, t_w })
    }

    /// Requires `0 < t_w < d tau_sg`.
    fn check_window_domain(&self, d: usize) -> Result<f64> {
        let span = d as f64 * self.tau_sg;
        if d == 0 || !(self.t_w > 0.0 && self.t_w < span) {
            return Err(Error::param(format!(
                "t_w = {} lies outside (0, d tau_sg) = (0, {span})",
                self.t_w
            )));
        }
        Ok(span)
    }
}

/// A window must be decoded before the next commit region has been generated:
/// `t_w < tau_sg n_com`, strictly.
pub fn throughput_ok(tm: &TimingModel, cfg: &WindowConfig) -> bool {
    tm.t_w < tm.tau_sg * cfg.n_com as f64
}

/// `eta = 2 d tau_sg + d tau_sg ceil((tau_l + t_w) / (d tau_sg) - 1)` on `0 < t_w < d tau_sg`.
pub fn reaction_time(tm: &TimingModel, d: usize) -> Result<f64> {
    let span = tm.check_window_domain(d)?;
    Ok(2.0 * span + span * ((tm.tau_l + tm.t_w) / span - 1.0).ceil())
}

/// The same quantity by cases, split at
/// `delta = d tau_sg (1 + ceil(tau_l / (d tau_sg) - 1)) - tau_l`.
pub fn reaction_time_cases(tm: &TimingModel, d: usize) -> Result<f64> {
    let span = tm.check_window_domain(d)?;
    let lag = (tm.tau_l / span - 1.0).ceil();
    let delta = span * (1.0 + lag) - tm.tau_l;
    Ok(if tm.t_w <= delta {
        2.0 * span + span * lag
    } else {
        2.0 * span + span * (tm.tau_l / span).ceil()
    })
}

/// Reaction time of two-layer parallel windows, where a window costs `2 t_w`.
pub fn reaction_time_parallel(tm: &TimingModel, d: usize) -> Result<f64> {
    if d == 0 || tm.tau_sg <= 0.0 {
        return Err(Error::param("d and tau_sg must be positive"));
    }
    let span = d as f64 * tm.tau_sg;
    Ok(2.0 * span + span * ((tm.tau_l + 2.0 * tm.t_w) / span - 1.0).ceil())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tm(tau_sg: f64, tau_l: f64, t_w: f64) -> TimingModel {
        TimingModel::new(tau_sg, tau_l, t_w).unwrap()
    }

    #[test]
    fn throughput_is_strict() {
        let cfg = WindowConfig::new(3);
        assert!(throughput_ok(&tm(1.0, 0.0, 1.0), &cfg));
        assert!(!throughput_ok(&tm(1.0, 0.0, 3.0), &cfg));
        assert!(throughput_ok(&tm(1.0, 0.0, 2.999), &cfg));
    }

    #[test]
    fn reaction_examples() {
        assert_eq!(reaction_time(&tm(1.0, 0.0, 0.5), 3).unwrap(), 6.0);
        assert_eq!(reaction_time(&tm(1.0, 2.9, 0.2), 3).unwrap(), 9.0);
        assert_eq!(reaction_time_cases(&tm(1.0, 2.9, 0.2), 3).unwrap(), 9.0);
        // Latency short of one window, decode finishing late: one extra window.
        assert_eq!(reaction_time(&tm(1.0, 1.0, 2.5), 3).unwrap(), 9.0);
        assert_eq!(reaction_time_parallel(&tm(1.0, 0.0, 1.0), 3).unwrap(), 6.0);
        assert_eq!(reaction_time_parallel(&tm(1.0, 0.0, 2.0), 3).unwrap(), 9.0);
    }

    #[test]
    fn domain_is_enforced() {
        assert!(reaction_time(&tm(1.0, 0.0, 0.0), 3).is_err());
        assert!(reaction_time(&tm(1.0, 0.0, 3.0), 3).is_err());
        assert!(reaction_time_cases(&tm(1.0, 0.0, 3.5), 3).is_err());
        assert!(TimingModel::new(-1.0, 0.0, 1.0).is_err());
        assert!(TimingModel::new(1.0, f64::NAN, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn forms_agree(tau_sg in 0.01f64..10.0, tau_l in 0.0f64..50.0, frac in 0.0001f64..0.9999, d in 1usize..15) {
            let m = tm(tau_sg, tau_l, frac * d as f64 * tau_sg);
            prop_assert_eq!(reaction_time(&m, d).unwrap(), reaction_time_cases(&m, d).unwrap());
        }

        #[test]
        fn monotone(tau_sg in 0.1f64..5.0, tau_l in 0.0f64..20.0, dl in 0.0f64..5.0, frac in 0.01f64..0.98, d in 1usize..12) {
            let span = d as f64 * tau_sg;
            let base = reaction_time(&tm(tau_sg, tau_l, frac * span), d).unwrap();
            prop_assert!(reaction_time(&tm(tau_sg, tau_l + dl, frac * span), d).unwrap() >= base);
            prop_assert!(reaction_time(&tm(tau_sg, tau_l, (frac + 0.01) * span), d).unwrap() >= base);
        }
    }
}
