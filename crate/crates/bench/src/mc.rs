//! Monte Carlo estimate of the `L^2_mu` distance between two functions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// A generator positioned on substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `batches` batches of `samples` standard normal vectors of length `dims`.
/// Batch `k` is drawn from substream `k`.
pub fn gaussian_batches(dims: usize, batches: usize, samples: usize, seed: u64) -> Vec<Vec<Vec<f64>>> {
    (0..batches)
        .map(|k| {
            let mut rng = substream(seed, k as u64);
            (0..samples)
                .map(|_| (0..dims).map(|_| StandardNormal.sample(&mut rng)).collect())
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct McError {
    /// `Err_k`, the mean squared difference on batch `k`.
    pub batch_mean_squares: Vec<f64>,
    pub median_mean_square: f64,
    /// `sqrt(median_k Err_k)`.
    pub error: f64,
}

impl McError {
    fn from_batches(batch_mean_squares: Vec<f64>) -> Self {
        let median_mean_square = median(&batch_mean_squares);
        Self {
            error: median_mean_square.sqrt(),
            median_mean_square,
            batch_mean_squares,
        }
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Squared differences are computed in parallel and summed in order, so
/// the result does not depend on the thread count.
pub fn mc_l2_error_on<F, G>(batches: &[Vec<Vec<f64>>], interpolant: F, reference: G) -> McError
where
    F: Fn(&[f64]) -> f64 + Sync,
    G: Fn(&[f64]) -> f64 + Sync,
{
    let per_batch = batches
        .iter()
        .map(|batch| {
            let sq: Vec<f64> = batch
                .par_iter()
                .map(|xi| {
                    let d = reference(xi) - interpolant(xi);
                    d * d
                })
                .collect();
            sq.iter().sum::<f64>() / sq.len().max(1) as f64
        })
        .collect();
    McError::from_batches(per_batch)
}

pub fn mc_l2_error<F, G>(
    dims: usize,
    interpolant: F,
    reference: G,
    batches: usize,
    samples: usize,
    seed: u64,
) -> McError
where
    F: Fn(&[f64]) -> f64 + Sync,
    G: Fn(&[f64]) -> f64 + Sync,
{
    mc_l2_error_on(&gaussian_batches(dims, batches, samples, seed), interpolant, reference)
}
