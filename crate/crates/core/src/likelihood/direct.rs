use alloc::format;
use alloc::vec::Vec;

use super::LikelihoodError;
use crate::graph::AdjacencyMatrix;
use crate::math;
use crate::sim::ObservedData;
use crate::timing::TimingModel;

/// Log-likelihood of the entry times evaluated event by event, without the
/// matrix form: before each event `i`, list every recruiter `u` (a subject
/// holding a coupon) together with its susceptible partners, namely the
/// neighbours in `A` that enter at or after `i` plus the `u_u` pendant
/// partners outside the sample. Event `i` contributes the log of the total
/// hazard towards it (non-seeds only) and the log survival of every
/// susceptible pair over the interval since the previous event.
pub fn log_likelihood_direct(
    obs: &ObservedData,
    a: &AdjacencyMatrix,
    u: &[u64],
    tm: &TimingModel,
) -> Result<f64, LikelihoodError> {
    let n = obs.n();
    if a.dim() != n || u.len() != n {
        return Err(LikelihoodError::Dimension(format!("A is {}, u has {}, sample is {n}", a.dim(), u.len())));
    }
    let t = &obs.times;
    let mut total = 0.0;
    for i in 1..n {
        let mut intensity = 0.0;
        let mut survival = 0.0;
        for r in 0..i {
            if !obs.coupons.get(r, i) {
                continue;
            }
            let partners: Vec<usize> = (i..n).filter(|&k| a.get(r, k)).collect();
            let susceptible = partners.len() as f64 + u[r] as f64;
            if susceptible == 0.0 {
                continue;
            }
            let since = t[i - 1] - t[r];
            let elapsed = t[i] - t[r];
            intensity += susceptible * tm.conditional_hazard(since, elapsed)?;
            survival += susceptible * tm.log_conditional_survival(since, elapsed)?;
        }
        total += survival;
        if !obs.is_seed(i) {
            if intensity <= 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            total += math::ln(intensity);
        }
    }
    Ok(total)
}
