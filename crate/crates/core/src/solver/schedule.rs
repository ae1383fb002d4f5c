//! Temperature schedule and Metropolis acceptance, shared by the object
//! solver and the floorplan solver.

use crate::rng::Stream;
use rand::Rng;

/// Exponential cooling from `tau0` to `tau_end` over `steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureSchedule {
    pub tau0: f64,
    pub tau_end: f64,
    pub steps: u64,
}

impl TemperatureSchedule {
    /// The solver default: tau cools exponentially from 0.25 to 0.001.
    pub fn standard(steps: u64) -> TemperatureSchedule {
        TemperatureSchedule {
            tau0: 0.25,
            tau_end: 0.001,
            steps: steps.max(1),
        }
    }

    /// Temperature at step `t` (0-based; t = steps yields `tau_end`).
    pub fn tau(&self, t: u64) -> f64 {
        let frac = (t as f64 / self.steps as f64).clamp(0.0, 1.0);
        self.tau0 * (self.tau_end / self.tau0).powf(frac)
    }

    /// Progress fraction in [0, 1].
    pub fn progress(&self, t: u64) -> f64 {
        (t as f64 / self.steps as f64).clamp(0.0, 1.0)
    }
}

/// Metropolis-Hastings acceptance probability for moving from loss `l_old`
/// to `l_new` at temperature `tau`: min(exp((l_old - l_new)/tau), 1).
pub fn metropolis_probability(l_old: f64, l_new: f64, tau: f64) -> f64 {
    if l_new <= l_old {
        return 1.0;
    }
    ((l_old - l_new) / tau).exp().min(1.0)
}

/// Draw an acceptance decision.
pub fn metropolis_accept(l_old: f64, l_new: f64, tau: f64, rng: &mut Stream) -> bool {
    let p = metropolis_probability(l_old, l_new, tau);
    // Improvements skip the draw entirely so acceptance is exact there.
    if p >= 1.0 {
        return true;
    }
    rng.gen::<f64>() < p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_endpoints() {
        let s = TemperatureSchedule::standard(1000);
        assert!((s.tau(0) - 0.25).abs() < 1e-12);
        assert!((s.tau(1000) - 0.001).abs() < 1e-12);
    }

    #[test]
    fn schedule_strictly_decreasing() {
        let s = TemperatureSchedule::standard(500);
        let mut prev = f64::INFINITY;
        for t in 0..=500 {
            let tau = s.tau(t);
            assert!(tau < prev);
            prev = tau;
        }
    }

    #[test]
    fn improvement_always_accepted() {
        assert_eq!(metropolis_probability(2.0, 1.0, 0.25), 1.0);
        assert_eq!(metropolis_probability(1.0, 1.0, 0.25), 1.0);
    }

    #[test]
    fn worsening_probability_value() {
        // l_old 1.0, l_new 1.25, tau 0.25: exp(-1).
        let p = metropolis_probability(1.0, 1.25, 0.25);
        assert!((p - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn empirical_acceptance_tracks_probability() {
        let mut rng = crate::rng::stream(1, "metropolis-test");
        let (l0, l1, tau) = (1.0, 1.2, 0.25);
        let p = metropolis_probability(l0, l1, tau);
        let n = 20_000;
        let mut acc = 0;
        for _ in 0..n {
            if metropolis_accept(l0, l1, tau, &mut rng) {
                acc += 1;
            }
        }
        let freq = acc as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((freq - p).abs() < 4.0 * sigma, "freq {freq} vs p {p}");
    }

    #[test]
    fn zero_temperature_limit_rejects_worsening() {
        // tau -> 0+: p -> 0 for any strict worsening.
        let p = metropolis_probability(1.0, 1.0 + 1e-9, 1e-300);
        assert_eq!(p, 0.0);
        assert_eq!(metropolis_probability(1.0, 0.99, 1e-300), 1.0);
    }
}
