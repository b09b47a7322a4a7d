//! Problem parameters for the doubly damped σ-evolution equation
//!
//! ```text
//! u_tt + (-Δ)^σ u + (-Δ)^σ1 u_t + (-Δ)^σ2 u_t = 0,   0 <= σ1 < σ/2 < σ2 <= σ
//! ```
//!
//! together with the derived constants every other module needs: the
//! expansion step `delta`, the theoretical error exponents and the radial
//! band where the characteristic roots are complex.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of log-spaced samples used to bracket the oscillation band.
pub const BAND_GRID_POINTS: usize = 400;
pub const BAND_GRID_MIN: f64 = 1e-6;
pub const BAND_GRID_MAX: f64 = 1e6;
/// Absolute bisection tolerance on r.
pub const BAND_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub n: u32,
    pub sigma: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    #[serde(default)]
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RateCase {
    PositiveSigma1,
    ZeroSigma1,
}

impl RateCase {
    /// The case implied by the sign of σ1.
    pub fn for_params(p: &ModelParams) -> Self {
        if p.sigma1 == 0.0 {
            RateCase::ZeroSigma1
        } else {
            RateCase::PositiveSigma1
        }
    }
}

/// Radial interval where the discriminant is negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillationBand {
    pub r_low: f64,
    pub r_high: f64,
}

impl ModelParams {
    pub fn new(n: u32, sigma: f64, sigma1: f64, sigma2: f64, s: f64) -> Self {
        Self {
            n,
            sigma,
            sigma1,
            sigma2,
            s,
        }
    }

    pub fn with_s(self, s: f64) -> Self {
        Self { s, ..self }
    }

    /// Checks the standing assumptions together with the hypotheses of the
    /// requested rate case.
    pub fn validate(&self, case: RateCase) -> Result<()> {
        let ModelParams {
            n,
            sigma,
            sigma1,
            sigma2,
            s,
        } = *self;
        if ![sigma, sigma1, sigma2, s].iter().all(|v| v.is_finite()) {
            return Err(Error::OrderingViolation("non-finite parameter".into()));
        }
        if n < 1 {
            return Err(Error::OrderingViolation("n must be at least 1".into()));
        }
        if sigma < 1.0 {
            return Err(Error::OrderingViolation(format!("sigma = {sigma} < 1")));
        }
        if !(0.0..sigma / 2.0).contains(&sigma1) {
            return Err(Error::OrderingViolation(format!(
                "sigma1 = {sigma1} outside [0, sigma/2)"
            )));
        }
        if !(sigma2 > sigma / 2.0 && sigma2 <= sigma) {
            return Err(Error::OrderingViolation(format!(
                "sigma2 = {sigma2} outside (sigma/2, sigma]"
            )));
        }
        if s < 0.0 {
            return Err(Error::OrderingViolation(format!("s = {s} < 0")));
        }
        match case {
            RateCase::PositiveSigma1 => {
                if sigma1 == 0.0 {
                    return Err(Error::CaseMismatch(
                        "sigma1 = 0 requires case ZeroSigma1".into(),
                    ));
                }
                if f64::from(n) <= 4.0 * sigma1 {
                    return Err(Error::DimensionTooSmall {
                        n,
                        bound: 4.0 * sigma1,
                    });
                }
            }
            RateCase::ZeroSigma1 => {
                if sigma1 != 0.0 {
                    return Err(Error::CaseMismatch(
                        "sigma1 > 0 requires case PositiveSigma1".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `min(σ2 − σ1, σ − 2σ1)`.
    pub fn delta(&self) -> f64 {
        (self.sigma2 - self.sigma1).min(self.sigma - 2.0 * self.sigma1)
    }

    /// Exponent `γ` in `‖error_k(t)‖ ~ (1+t)^γ`.
    pub fn error_exponent(&self, k: usize, case: RateCase) -> Result<f64> {
        if case != RateCase::for_params(self) {
            return Err(Error::CaseMismatch(format!(
                "sigma1 = {} with case {case:?}",
                self.sigma1
            )));
        }
        let n = f64::from(self.n);
        let k = k as f64;
        Ok(match case {
            RateCase::PositiveSigma1 => {
                let d = self.sigma - self.sigma1;
                -n / (4.0 * d) - self.s / (2.0 * d) + self.sigma1 / d - k * self.delta() / d
            }
            RateCase::ZeroSigma1 => {
                -n / (4.0 * self.sigma) - self.s / (2.0 * self.sigma) - k * self.sigma2 / self.sigma
            }
        })
    }

    /// Gain in the exponent per additional expansion order (negative).
    pub fn order_step(&self, case: RateCase) -> f64 {
        match case {
            RateCase::PositiveSigma1 => -self.delta() / (self.sigma - self.sigma1),
            RateCase::ZeroSigma1 => -self.sigma2 / self.sigma,
        }
    }

    /// `(r^{2σ1} + a r^{2σ2})² − 4 b r^{2σ}`.
    ///
    /// For `b >= 0` the difference of squares is factored so the sign is
    /// reliable near the roots.
    pub fn discriminant(&self, r: f64, a: f64, b: f64) -> f64 {
        let damp = r.powf(2.0 * self.sigma1) + a * r.powf(2.0 * self.sigma2);
        if b >= 0.0 {
            let w = 2.0 * b.sqrt() * r.powf(self.sigma);
            (damp - w) * (damp + w)
        } else {
            damp * damp - 4.0 * b * r.powf(2.0 * self.sigma)
        }
    }

    /// Sign-determining part of the discriminant at a = b = 1:
    /// `r^{2σ1} + r^{2σ2} − 2 r^σ`, evaluated in the scaled form
    /// `r^{2σ1−σ} + r^{2σ2−σ} − 2` to avoid under/overflow at the grid ends.
    fn band_indicator(&self, r: f64) -> f64 {
        r.powf(2.0 * self.sigma1 - self.sigma) + r.powf(2.0 * self.sigma2 - self.sigma) - 2.0
    }

    /// Infimum and supremum of `{r > 0 : discriminant(r, 1, 1) < 0}`, or
    /// `None` when the roots are real for every frequency.
    pub fn oscillation_band(&self) -> Result<Option<OscillationBand>> {
        let grid = log_grid(BAND_GRID_MIN, BAND_GRID_MAX, BAND_GRID_POINTS);
        let vals: Vec<f64> = grid.iter().map(|&r| self.band_indicator(r)).collect();
        let first = vals.iter().position(|&v| v < 0.0);
        let last = vals.iter().rposition(|&v| v < 0.0);
        let (first, last) = match (first, last) {
            (Some(f), Some(l)) => (f, l),
            _ => return Ok(None),
        };
        if first == 0 || last == grid.len() - 1 {
            return Err(Error::BisectionFailure(
                "negative discriminant at the edge of the search grid".into(),
            ));
        }
        let r_low = self.bisect(grid[first - 1], grid[first])?;
        let r_high = self.bisect(grid[last], grid[last + 1])?;
        Ok(Some(OscillationBand { r_low, r_high }))
    }

    fn bisect(&self, mut lo: f64, mut hi: f64) -> Result<f64> {
        let f_lo = self.band_indicator(lo);
        let f_hi = self.band_indicator(hi);
        if f_lo.signum() == f_hi.signum() {
            return Err(Error::BisectionFailure(format!(
                "no sign change on [{lo}, {hi}]"
            )));
        }
        for _ in 0..200 {
            if hi - lo <= BAND_TOL {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let f_mid = self.band_indicator(mid);
            if f_mid == 0.0 {
                return Ok(mid);
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Low/high frequency cutoff radius: half the lower band edge when the
    /// band exists, else 1/2.
    pub fn eps_star(&self) -> Result<f64> {
        Ok(match self.oscillation_band()? {
            Some(band) => band.r_low / 2.0,
            None => 0.5,
        })
    }
}

/// `count` logarithmically spaced points on `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32, sigma: f64, sigma1: f64, sigma2: f64) -> ModelParams {
        ModelParams::new(n, sigma, sigma1, sigma2, 0.0)
    }

    #[test]
    fn validation_examples() {
        assert!(p(3, 1.0, 0.25, 0.75).validate(RateCase::PositiveSigma1).is_ok());
        assert!(matches!(
            p(1, 1.0, 0.25, 0.75).validate(RateCase::PositiveSigma1),
            Err(Error::DimensionTooSmall { .. })
        ));
        assert!(p(1, 1.0, 0.0, 0.8).validate(RateCase::ZeroSigma1).is_ok());
        assert!(matches!(
            p(1, 1.0, 0.0, 0.8).validate(RateCase::PositiveSigma1),
            Err(Error::CaseMismatch(_))
        ));
        assert!(matches!(
            p(3, 1.0, 0.5, 0.75).validate(RateCase::PositiveSigma1),
            Err(Error::OrderingViolation(_))
        ));
        assert!(matches!(
            p(3, 1.0, 0.25, 1.1).validate(RateCase::PositiveSigma1),
            Err(Error::OrderingViolation(_))
        ));
        assert!(matches!(
            p(3, 0.9, 0.25, 0.75).validate(RateCase::PositiveSigma1),
            Err(Error::OrderingViolation(_))
        ));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(p(3, 1.0, 0.25, 0.75).delta(), 0.5);
        assert!((p(3, 2.0, 0.5, 1.2).delta() - 0.7).abs() < 1e-15);
        assert_eq!(p(1, 1.0, 0.0, 0.8).delta(), 0.8);
    }

    #[test]
    fn exponent_examples() {
        let q = p(3, 1.0, 0.25, 0.75);
        let c = RateCase::PositiveSigma1;
        assert!((q.error_exponent(1, c).unwrap() + 4.0 / 3.0).abs() < 1e-14);
        assert!((q.error_exponent(0, c).unwrap() + 2.0 / 3.0).abs() < 1e-14);
        let z = p(1, 1.0, 0.0, 0.8);
        assert!((z.error_exponent(1, RateCase::ZeroSigma1).unwrap() + 1.05).abs() < 1e-14);
        assert!(z.error_exponent(1, RateCase::PositiveSigma1).is_err());
    }

    #[test]
    fn discriminant_examples() {
        let q = p(1, 1.0, 0.0, 1.0);
        assert!((q.discriminant(0.5, 1.0, 1.0) - 0.5625).abs() < 1e-15);
        assert_eq!(q.discriminant(1.0, 1.0, 1.0), 0.0);
        assert_eq!(p(3, 1.0, 0.25, 0.75).discriminant(1.0, 1.0, 0.0), 4.0);
        // negative b takes the unfactored path
        let d = q.discriminant(0.5, 1.0, -1.0);
        assert!((d - (1.25f64.powi(2) + 4.0 * 0.25)).abs() < 1e-14);
    }

    #[test]
    fn band_empty_for_perfect_square() {
        assert_eq!(p(1, 1.0, 0.0, 1.0).oscillation_band().unwrap(), None);
        assert_eq!(p(1, 1.0, 0.0, 1.0).eps_star().unwrap(), 0.5);
    }

    #[test]
    fn band_empty_when_sigma1_plus_sigma2_equals_sigma() {
        // r^{1/2} + r^{3/2} - 2r = r^{1/2}(1 - r^{1/2})^2 >= 0
        assert_eq!(p(3, 1.0, 0.25, 0.75).oscillation_band().unwrap(), None);
    }

    #[test]
    fn band_touches_one_from_above_when_sum_below_sigma() {
        let q = p(1, 1.0, 0.0, 0.8);
        let band = q.oscillation_band().unwrap().unwrap();
        assert!((band.r_low - 1.0).abs() < 1e-9, "{band:?}");
        assert!(band.r_high > 1.0);
        let mid = 0.5 * (band.r_low + band.r_high);
        assert!(q.discriminant(mid, 1.0, 1.0) < 0.0);
        assert_eq!(q.eps_star().unwrap(), band.r_low / 2.0);
    }

    #[test]
    fn band_touches_one_from_below_when_sum_above_sigma() {
        let q = p(3, 1.0, 0.4, 0.9);
        let band = q.oscillation_band().unwrap().unwrap();
        assert!(band.r_low < 1.0);
        assert!((band.r_high - 1.0).abs() < 1e-9, "{band:?}");
        assert!(q.discriminant(0.5 * (band.r_low + band.r_high), 1.0, 1.0) < 0.0);
    }

    #[test]
    fn band_edges_are_roots() {
        for q in [p(1, 1.0, 0.0, 0.8), p(3, 1.0, 0.4, 0.9), p(2, 2.0, 0.3, 1.5)] {
            let band = q.oscillation_band().unwrap().unwrap();
            for r in [band.r_low, band.r_high] {
                let scale = (r.powf(2.0 * q.sigma1) + r.powf(2.0 * q.sigma2)).powi(2);
                assert!(q.discriminant(r, 1.0, 1.0).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-3, 1e3, 7);
        assert_eq!(g.len(), 7);
        assert!((g[0] - 1e-3).abs() < 1e-18);
        assert!((g[3] - 1.0).abs() < 1e-14);
        assert!((g[6] - 1e3).abs() < 1e-10);
    }
}
