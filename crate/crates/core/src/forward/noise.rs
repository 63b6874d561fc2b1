//! Multiplicative uniform noise `u_σ = (1 + σ r) u`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{RecordKind, WaveRecord};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sigma >= 0.0 && self.sigma.is_finite() {
            Ok(())
        } else {
            Err(Error::field("noise.sigma", "must be a nonnegative number"))
        }
    }
}

/// Draws `r` uniformly on `[-1, 1]` from ChaCha8 seeded with `seed`, receiver
/// by receiver and time by time.
pub fn add_noise(record: &WaveRecord, noise: &NoiseSpec) -> Result<WaveRecord> {
    noise.validate()?;
    if record.kind != RecordKind::Scattered {
        return Err(Error::Config(format!("noise applies to scattered records, got {}", record.kind)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let mut out = record.clone();
    out.kind = RecordKind::NoisyScattered;
    out.noise_level = noise.sigma;
    out.seed = noise.seed;
    for v in out.values.iter_mut() {
        let r: f64 = rng.random_range(-1.0..=1.0);
        *v *= 1.0 + noise.sigma * r;
    }
    Ok(out)
}
