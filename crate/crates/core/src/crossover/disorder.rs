//! Disorder sampling.
//!
//! Every standard-normal draw is addressed by `(master_seed, realization,
//! site)`, so a realization looks the same whatever the grid point, model or
//! worker schedule. Comparisons between models therefore use common random
//! numbers.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::qubit_models::QubitSpec;
use crate::rng::{standard_normal, substream_rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Disorder {
    /// Gaussian Josephson energies with each qubit spec's own mean and spread.
    JosephsonEnergy,
    /// Gaussian site-frequency offsets with standard deviation `sigma`.
    SiteFrequency { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    pub disorder: Disorder,
    pub master_seed: u64,
    /// Negate every standard-normal draw.
    #[serde(default)]
    pub mirror: bool,
}

impl DisorderSpec {
    pub fn site_frequency(sigma: f64, master_seed: u64) -> Self {
        Self {
            disorder: Disorder::SiteFrequency { sigma },
            master_seed,
            mirror: false,
        }
    }

    pub fn josephson(master_seed: u64) -> Self {
        Self {
            disorder: Disorder::JosephsonEnergy,
            master_seed,
            mirror: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Disorder::SiteFrequency { sigma } = self.disorder {
            if !(sigma >= 0.0) {
                return Err(domain(format!("disorder strength must be non-negative, got {sigma}")));
            }
        }
        Ok(())
    }

    fn sign(&self) -> f64 {
        if self.mirror {
            -1.0
        } else {
            1.0
        }
    }

    /// Site-frequency offsets of one realization.
    pub fn frequency_offsets(&self, sigma: f64, realization: u64, n_sites: usize) -> Vec<f64> {
        (0..n_sites)
            .map(|site| {
                let mut rng = substream_rng(self.master_seed, realization, site as u64);
                self.sign() * sigma * standard_normal(&mut rng)
            })
            .collect()
    }

    /// Josephson energies of one realization. Non-positive draws are
    /// discarded and redrawn from the same site stream.
    pub fn josephson_energies(&self, sites: &[QubitSpec], realization: u64) -> Vec<f64> {
        sites
            .iter()
            .enumerate()
            .map(|(site, spec)| {
                let mut rng = substream_rng(self.master_seed, realization, site as u64);
                let (mean, sigma) = (spec.josephson_mean(), spec.josephson_sigma());
                loop {
                    let e = mean + self.sign() * sigma * standard_normal(&mut rng);
                    if e > 0.0 {
                        break e;
                    }
                }
            })
            .collect()
    }
}
