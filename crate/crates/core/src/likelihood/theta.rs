use alloc::format;
use alloc::vec::Vec;

use super::LikelihoodError;
use crate::graph::AdjacencyMatrix;
use crate::math;
use crate::sim::ObservedData;
use crate::timing::{TimingFamily, TimingModel};

/// Result of maximizing the recruitment-time likelihood over `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaFit {
    pub model: TimingModel,
    pub log_likelihood: f64,
    /// The coarse scan found more than one local maximum; the best one is
    /// returned.
    pub non_unimodal: bool,
    pub evaluations: usize,
}

/// Susceptible-pair counts `C_ui (Σ_{k≥i} A_uk + u_u)` for fixed `(A, u)`.
struct Exposure<'a> {
    times: &'a [f64],
    events: Vec<(usize, Vec<(usize, f64)>)>,
    non_seed: Vec<bool>,
}

impl<'a> Exposure<'a> {
    fn new(obs: &'a ObservedData, a: &AdjacencyMatrix, u: &[u64]) -> Result<Self, LikelihoodError> {
        let n = obs.n();
        if a.dim() != n || u.len() != n {
            return Err(LikelihoodError::Dimension(format!("A is {}, u has {}, sample is {n}", a.dim(), u.len())));
        }
        let mut events = Vec::new();
        for i in 1..n {
            let mut pairs = Vec::new();
            for r in 0..i {
                if obs.coupons.get(r, i) {
                    let c = (i..n).filter(|&k| a.get(r, k)).count() as f64 + u[r] as f64;
                    if c > 0.0 {
                        pairs.push((r, c));
                    }
                }
            }
            if pairs.is_empty() && !obs.is_seed(i) {
                return Err(LikelihoodError::InfeasibleBase { subject: i });
            }
            events.push((i, pairs));
        }
        Ok(Exposure { times: &obs.times, events, non_seed: (0..n).map(|i| !obs.is_seed(i)).collect() })
    }

    fn log_likelihood(&self, tm: &TimingModel) -> f64 {
        let t = self.times;
        let mut total = 0.0;
        for (i, pairs) in &self.events {
            let mut intensity = 0.0;
            for &(r, c) in pairs {
                let (since, elapsed) = (t[i - 1] - t[r], t[*i] - t[r]);
                let (Ok(h), Ok(ls)) = (tm.conditional_hazard(since, elapsed), tm.log_conditional_survival(since, elapsed))
                else {
                    return f64::NEG_INFINITY;
                };
                intensity += c * h;
                total += c * ls;
            }
            if self.non_seed[*i] {
                total += math::ln(intensity);
            }
        }
        if total.is_nan() {
            f64::NEG_INFINITY
        } else {
            total
        }
    }
}

impl Exposure<'_> {
    /// `argmax_ρ` of the Weibull likelihood at shape `k`:
    /// `#non-seeds / Σ c ((t_i − t_r)^k − (t_{i−1} − t_r)^k)`.
    fn weibull_rate(&self, k: f64) -> Option<f64> {
        let t = self.times;
        let mut exposure = 0.0;
        let mut events = 0usize;
        for (i, pairs) in &self.events {
            for &(r, c) in pairs {
                exposure += c * (math::powf(t[*i] - t[r], k) - math::powf(t[i - 1] - t[r], k));
            }
            events += self.non_seed[*i] as usize;
        }
        let rho = events as f64 / exposure;
        (rho.is_finite() && rho > 0.0).then_some(rho)
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

struct LineSearch {
    x: f64,
    value: f64,
    peaks: usize,
    evaluations: usize,
}

/// Coarse grid over `[center − half, center + half]`, then golden-section
/// refinement inside the bracket around the best grid point.
fn line_search(f: &mut impl FnMut(f64) -> f64, center: f64, half: f64, points: usize) -> LineSearch {
    let step = 2.0 * half / (points - 1) as f64;
    let xs: Vec<f64> = (0..points).map(|k| center - half + step * k as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut evaluations = points;
    let best = (0..points).fold(0, |b, k| if ys[k] > ys[b] { k } else { b });
    let peaks = (0..points)
        .filter(|&k| {
            ys[k].is_finite() && (k == 0 || ys[k] > ys[k - 1]) && (k + 1 == points || ys[k] > ys[k + 1])
        })
        .count();
    let (mut lo, mut hi) = (xs[best.saturating_sub(1)], xs[(best + 1).min(points - 1)]);
    let mut c = hi - GOLDEN * (hi - lo);
    let mut d = lo + GOLDEN * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    evaluations += 2;
    while hi - lo > 1e-11 * (1.0 + lo.abs().max(hi.abs())) {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - GOLDEN * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + GOLDEN * (hi - lo);
            fd = f(d);
        }
        evaluations += 1;
    }
    let (mut x, mut value) = if fc >= fd { (c, fc) } else { (d, fd) };
    if ys[best] > value {
        x = xs[best];
        value = ys[best];
    }
    LineSearch { x, value, peaks, evaluations }
}

/// Maximizes `l(t | A, θ)` over `θ` within `family`, searching on
/// log-parameters. Weibull parameters are fitted by coordinate ascent.
pub fn theta_step(
    obs: &ObservedData,
    a: &AdjacencyMatrix,
    u: &[u64],
    family: TimingFamily,
) -> Result<ThetaFit, LikelihoodError> {
    let n = obs.n();
    if n < 2 || obs.seeds.len() == n {
        return Err(LikelihoodError::InsufficientData);
    }
    let exposure = Exposure::new(obs, a, u)?;
    let span = obs.times[n - 1] - obs.times[0];
    if !(span > 0.0) {
        return Err(LikelihoodError::InsufficientData);
    }
    let ln_gap = math::ln(span / (n - 1) as f64);
    match family {
        TimingFamily::Exponential => {
            let mut f = |x: f64| match TimingModel::exponential(math::exp(x)) {
                Ok(tm) => exposure.log_likelihood(&tm),
                Err(_) => f64::NEG_INFINITY,
            };
            let ls = line_search(&mut f, -ln_gap, 12.0, 97);
            Ok(ThetaFit {
                model: TimingModel::exponential(math::exp(ls.x))?,
                log_likelihood: ls.value,
                non_unimodal: ls.peaks > 1,
                evaluations: ls.evaluations,
            })
        }
        TimingFamily::Weibull => {
            // for fixed shape k the rate ρ = scale^{−k} maximizes in closed form
            let profile = |x: f64| -> Option<TimingModel> {
                let k = math::exp(x);
                let rho = exposure.weibull_rate(k)?;
                TimingModel::weibull(k, math::powf(rho, -1.0 / k)).ok()
            };
            let mut f = |x: f64| profile(x).map_or(f64::NEG_INFINITY, |tm| exposure.log_likelihood(&tm));
            let ls = line_search(&mut f, 0.0, 4.0, 81);
            let model = profile(ls.x).ok_or(LikelihoodError::InsufficientData)?;
            Ok(ThetaFit { model, log_likelihood: ls.value, non_unimodal: ls.peaks > 1, evaluations: ls.evaluations })
        }
    }
}
