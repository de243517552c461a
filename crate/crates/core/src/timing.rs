//! Inter-recruitment waiting-time families.
//!
//! Every recruiter/potential-recruitee pair draws an i.i.d. waiting time `W`
//! from one of these families. The likelihood consumes the conditional
//! survival `Pr[W > t | W > s]` (in log space) and the hazard `ρ(t)/S(t)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum TimingError {
    #[error("parameter `{name}` must be finite and positive, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("conditioning time s={s} must satisfy 0 <= s <= t={t}")]
    InvalidInterval { s: f64, t: f64 },
    #[error("support exhausted: survival underflows to zero at t={t}")]
    SupportExhausted { t: f64 },
}

/// Parametric family `D(t; θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimingModel {
    /// `S(t) = e^{-λt}`; constant hazard `λ`.
    Exponential { rate: f64 },
    /// `S(t) = e^{-(t/σ)^k}`; hazard `(k/σ)(t/σ)^{k-1}`.
    Weibull { shape: f64, scale: f64 },
}

/// Which family, without parameter values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimingFamily {
    Exponential,
    Weibull,
}

impl TimingFamily {
    pub fn name(self) -> &'static str {
        match self {
            TimingFamily::Exponential => "exponential",
            TimingFamily::Weibull => "weibull",
        }
    }

    pub fn parameter_count(self) -> usize {
        match self {
            TimingFamily::Exponential => 1,
            TimingFamily::Weibull => 2,
        }
    }

    /// Builds a model from the parameter vector in [`TimingModel::params`] order.
    pub fn with_params(self, params: &[f64]) -> Result<TimingModel, TimingError> {
        match (self, params) {
            (TimingFamily::Exponential, [rate]) => TimingModel::exponential(*rate),
            (TimingFamily::Weibull, [shape, scale]) => TimingModel::weibull(*shape, *scale),
            _ => Err(TimingError::InvalidParameter { name: "arity", value: params.len() as f64 }),
        }
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64, TimingError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(TimingError::InvalidParameter { name, value })
    }
}

impl TimingModel {
    pub fn exponential(rate: f64) -> Result<Self, TimingError> {
        Ok(TimingModel::Exponential { rate: positive("rate", rate)? })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self, TimingError> {
        Ok(TimingModel::Weibull { shape: positive("shape", shape)?, scale: positive("scale", scale)? })
    }

    pub fn family(&self) -> TimingFamily {
        match self {
            TimingModel::Exponential { .. } => TimingFamily::Exponential,
            TimingModel::Weibull { .. } => TimingFamily::Weibull,
        }
    }

    /// θ as a vector: `[rate]` or `[shape, scale]`.
    pub fn params(&self) -> Vec<f64> {
        match *self {
            TimingModel::Exponential { rate } => vec![rate],
            TimingModel::Weibull { shape, scale } => vec![shape, scale],
        }
    }

    /// `log S(t)` for `t ≥ 0`.
    pub fn log_survival(&self, t: f64) -> f64 {
        match *self {
            TimingModel::Exponential { rate } => -rate * t,
            TimingModel::Weibull { shape, scale } => -math::powf(t / scale, shape),
        }
    }

    pub fn survival(&self, t: f64) -> f64 {
        math::exp(self.log_survival(t))
    }

    /// Unconditional hazard `ρ(t)/S(t)`, in closed form.
    pub fn hazard(&self, t: f64) -> f64 {
        match *self {
            TimingModel::Exponential { rate } => rate,
            TimingModel::Weibull { shape, scale } => (shape / scale) * math::powf(t / scale, shape - 1.0),
        }
    }

    pub fn density(&self, t: f64) -> f64 {
        self.hazard(t) * self.survival(t)
    }

    fn check_interval(s: f64, t: f64) -> Result<(), TimingError> {
        if s.is_finite() && t.is_finite() && s >= 0.0 && s <= t {
            Ok(())
        } else {
            Err(TimingError::InvalidInterval { s, t })
        }
    }

    /// `log Pr[W > t | W > s] = log S(t) − log S(s)`.
    pub fn log_conditional_survival(&self, s: f64, t: f64) -> Result<f64, TimingError> {
        Self::check_interval(s, t)?;
        if s == t {
            return Ok(0.0);
        }
        match *self {
            // exact form; the generic difference would cancel catastrophically
            TimingModel::Exponential { rate } => Ok(-rate * (t - s)),
            _ => Ok(self.log_survival(t) - self.log_survival(s)),
        }
    }

    /// `Pr[W > t | W > s]`.
    pub fn conditional_survival(&self, s: f64, t: f64) -> Result<f64, TimingError> {
        self.log_conditional_survival(s, t).map(math::exp)
    }

    /// `ρ_s(t) / S_s(t)`. Conditioning on `W > s` scales density and
    /// survival by the same `1/S(s)`, so this is the unconditional hazard at
    /// `t`.
    pub fn conditional_hazard(&self, s: f64, t: f64) -> Result<f64, TimingError> {
        Self::check_interval(s, t)?;
        if self.log_survival(t) == f64::NEG_INFINITY {
            return Err(TimingError::SupportExhausted { t });
        }
        let h = self.hazard(t);
        if h.is_finite() {
            Ok(h)
        } else {
            Err(TimingError::SupportExhausted { t })
        }
    }

    /// Quantile function `D^{-1}(u)` for `u ∈ [0, 1)`.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        let e = -math::ln_1p(-u);
        match *self {
            TimingModel::Exponential { rate } => e / rate,
            TimingModel::Weibull { shape, scale } => scale * math::powf(e, 1.0 / shape),
        }
    }

    /// One draw by inverse-cdf transform; strictly positive.
    pub fn sample_waiting_time<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let u: f64 = rng.gen();
            if u > 0.0 {
                return self.inverse_cdf(u);
            }
        }
    }
}

impl fmt::Display for TimingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TimingModel::Exponential { rate } => write!(f, "exponential {rate}"),
            TimingModel::Weibull { shape, scale } => write!(f, "weibull {shape} {scale}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Composite Simpson quadrature, test-only.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let n = if n % 2 == 1 { n + 1 } else { n };
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for k in 1..n {
            let x = a + k as f64 * h;
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    #[test]
    fn exponential_conditional_survival_memoryless() {
        let m = TimingModel::exponential(1.0).unwrap();
        assert!(close(m.conditional_survival(0.5, 1.5).unwrap(), (-1.0f64).exp(), 1e-15));
        assert_eq!(m.log_conditional_survival(0.5, 1.5).unwrap(), -1.0);
    }

    #[test]
    fn conditioning_identity() {
        for m in [TimingModel::exponential(3.0).unwrap(), TimingModel::weibull(0.7, 2.0).unwrap()] {
            assert_eq!(m.conditional_survival(2.0, 2.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn weibull_conditional_survival_against_density_integral() {
        let m = TimingModel::weibull(2.0, 1.0).unwrap();
        let got = m.conditional_survival(1.0, 2.0).unwrap();
        assert!(close(got, (-3.0f64).exp(), 1e-15));
        // oracle: S(t)/S(s) with S(x) = ∫_x^∞ ρ, truncated where ρ is negligible
        let tail = |x: f64| simpson(|y| m.density(y), x, 12.0, 20_000);
        assert!(close(tail(2.0) / tail(1.0), (-3.0f64).exp(), 1e-9));
    }

    #[test]
    fn interval_errors() {
        let m = TimingModel::exponential(1.0).unwrap();
        assert!(matches!(m.conditional_survival(2.0, 1.0), Err(TimingError::InvalidInterval { .. })));
        assert!(matches!(m.conditional_hazard(-1.0, 1.0), Err(TimingError::InvalidInterval { .. })));
        assert!(TimingModel::exponential(0.0).is_err());
        assert!(TimingModel::weibull(1.0, f64::NAN).is_err());
    }

    #[test]
    fn exponential_hazard_is_constant() {
        let m = TimingModel::exponential(2.5).unwrap();
        for &(s, t) in &[(0.0, 0.1), (1.0, 4.0), (7.0, 7.0)] {
            assert_eq!(m.conditional_hazard(s, t).unwrap(), 2.5);
        }
    }

    #[test]
    fn weibull_hazard_matches_finite_difference() {
        let m = TimingModel::weibull(2.0, 1.0).unwrap();
        assert!(close(m.conditional_hazard(0.5, 3.0).unwrap(), 6.0, 1e-12));
        // oracle: −d log S / dt by central differences
        let h = 1e-5;
        let fd = -(m.log_survival(3.0 + h) - m.log_survival(3.0 - h)) / (2.0 * h);
        assert!(close(fd, 6.0, 1e-6));
    }

    #[test]
    fn conditional_hazard_cancels_conditioning() {
        let m = TimingModel::weibull(1.7, 0.8).unwrap();
        let (s, t) = (0.4, 1.3);
        let cond_density = m.density(t) / m.survival(s);
        let cond_surv = m.survival(t) / m.survival(s);
        assert!(close(m.conditional_hazard(s, t).unwrap(), cond_density / cond_surv, 1e-12));
        assert_eq!(m.conditional_hazard(s, t).unwrap(), m.conditional_hazard(0.0, t).unwrap());
    }

    #[test]
    fn weibull_shape_one_is_exponential() {
        let lambda = 1.7;
        let w = TimingModel::weibull(1.0, 1.0 / lambda).unwrap();
        let e = TimingModel::exponential(lambda).unwrap();
        for k in 0..50 {
            let t = 0.1 * k as f64;
            assert!(close(w.conditional_hazard(0.0, t).unwrap(), e.conditional_hazard(0.0, t).unwrap(), 1e-12));
        }
    }

    #[test]
    fn support_exhausted() {
        let m = TimingModel::weibull(2.0, 1e-200).unwrap();
        assert!(matches!(m.conditional_hazard(0.0, 1.0), Err(TimingError::SupportExhausted { .. })));
    }

    #[test]
    fn survival_hazard_duality() {
        for m in [TimingModel::exponential(0.8).unwrap(), TimingModel::weibull(1.6, 1.3).unwrap()] {
            for &(s, t) in &[(0.2, 0.9), (0.0, 2.5), (1.0, 1.0), (0.5, 3.0)] {
                let integral = simpson(|x| m.hazard(x), s, t, 2000);
                let lhs = m.conditional_survival(s, t).unwrap();
                assert!(close(lhs, (-integral).exp(), 1e-6), "{m} {s} {t}");
            }
        }
    }

    #[test]
    fn inverse_cdf_forms() {
        let e = TimingModel::exponential(2.0).unwrap();
        let w = TimingModel::weibull(1.5, 3.0).unwrap();
        for &u in &[0.0, 0.1, 0.5, 0.99] {
            assert!(close(e.inverse_cdf(u), -(1.0f64 - u).ln() / 2.0, 1e-14));
            assert!(close(w.inverse_cdf(u), 3.0 * (-(1.0f64 - u).ln()).powf(1.0 / 1.5), 1e-13));
        }
    }

    #[test]
    fn exponential_sample_mean() {
        let m = TimingModel::exponential(2.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let mean = (0..n).map(|_| m.sample_waiting_time(&mut rng)).sum::<f64>() / n as f64;
        assert!(close(mean, 0.5, 0.01), "mean {mean}");
    }

    #[test]
    fn family_roundtrip() {
        let m = TimingModel::weibull(1.2, 0.4).unwrap();
        assert_eq!(m.family().with_params(&m.params()).unwrap(), m);
        assert!(TimingFamily::Exponential.with_params(&[1.0, 2.0]).is_err());
    }
}
