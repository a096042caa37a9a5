use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{InstanceMeta, Matrix, StationNetwork};
use crate::error::{Error, Result};

/// Parameters of the random Euclidean instance generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    /// Side length of the square in which stations are placed.
    pub env_size: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Constant taxi-willingness fraction `f_ij`.
    pub f: f64,
    /// Service rate multiplier: `mu_i = mu_factor * lambda_i`.
    pub mu_factor: f64,
    /// Service rate used for stations whose sampled arrival rate is zero.
    pub mu_floor: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            env_size: 100.0,
            lambda_min: 0.0,
            lambda_max: 0.05,
            f: 1.0,
            mu_factor: 2.0,
            mu_floor: 1e-9,
        }
    }
}

impl GeneratorConfig {
    fn check(&self) -> Result<()> {
        let ok = self.env_size.is_finite()
            && self.env_size > 0.0
            && self.lambda_min >= 0.0
            && self.lambda_max.is_finite()
            && self.lambda_max >= self.lambda_min
            && self.f.is_finite()
            && self.f >= 0.0
            && self.mu_factor > 1.0
            && self.mu_floor > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "invalid generator config {self:?}"
            )))
        }
    }
}

/// Places `n` stations uniformly in a square, with Euclidean travel times,
/// uniform arrival rates and uniformly sampled, row-normalised destination
/// probabilities.
///
/// Sampling order from a `ChaCha8Rng` seeded with `seed`: all station
/// coordinates `(x, y)`, then all arrival rates, then the `n - 1`
/// off-diagonal weights of each row of `p` in row order.
pub fn generate_instance(n: usize, seed: u64, config: &GeneratorConfig) -> Result<StationNetwork> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "instance generation needs at least 2 stations, got {n}"
        )));
    }
    config.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let coords: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let x = rng.random::<f64>() * config.env_size;
            let y = rng.random::<f64>() * config.env_size;
            (x, y)
        })
        .collect();
    let span = config.lambda_max - config.lambda_min;
    let lambda: Vec<f64> = (0..n)
        .map(|_| config.lambda_min + rng.random::<f64>() * span)
        .collect();
    let mu = lambda
        .iter()
        .map(|&l| if l > 0.0 { config.mu_factor * l } else { config.mu_floor })
        .collect();

    let mut p = Matrix::zeros(n);
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            p[(i, j)] = rng.random::<f64>();
        }
        let total: f64 = p.row(i).iter().sum();
        if total > 0.0 {
            for j in 0..n {
                p[(i, j)] /= total;
            }
        } else {
            let uniform = 1.0 / (n - 1) as f64;
            for j in (0..n).filter(|&j| j != i) {
                p[(i, j)] = uniform;
            }
        }
    }

    let travel_time = Matrix::from_fn(n, |i, j| {
        if i == j {
            0.0
        } else {
            let (dx, dy) = (coords[i].0 - coords[j].0, coords[i].1 - coords[j].1);
            dx.hypot(dy)
        }
    });
    let net = StationNetwork::new(lambda, mu, p, travel_time, Matrix::filled(n, config.f))?;
    Ok(net.with_meta(InstanceMeta {
        seed: Some(seed),
        generator_config: Some(config.clone()),
    }))
}
