//! Level-spacing-ratio statistics: ratio samples, the Poisson and GOE
//! reference densities, histograms, KL divergences and `(beta, gamma)` fits.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::quadrature::{integrate, integrate_default};

/// Mean ratio of uncorrelated (Poisson) levels, `2 ln 2 - 1`.
pub const R_BAR_POISSON: f64 = 0.386_294_361_119_890_6;
/// Mean ratio of large GOE matrices.
pub const R_BAR_GOE: f64 = 0.5308;
/// Midpoint between the two, used to locate the crossover.
pub const R_BAR_THRESHOLD: f64 = 0.5 * (R_BAR_POISSON + R_BAR_GOE);
/// Shape parameter that makes the interpolating density fit large GOE
/// matrices at `beta = 1`.
pub const GAMMA_GOE: f64 = 0.875;
/// Normalization of the 3x3 GOE surmise.
pub const Z1: f64 = 8.0 / 27.0;
pub const N_BINS: usize = 50;

/// Relative spacing (to the spectral span) below which levels count as
/// degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RatioSample {
    pub values: Vec<f64>,
    /// Ratios skipped because one of their spacings was degenerate.
    pub dropped_count: usize,
}

impl RatioSample {
    pub fn extend(&mut self, other: &RatioSample) {
        self.values.extend_from_slice(&other.values);
        self.dropped_count += other.dropped_count;
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `r_n = min(s_{n+1} / s_n, s_n / s_{n+1})` over consecutive spacings of an
/// ascending spectrum.
pub fn spacing_ratios(eigenvalues: &[f64]) -> Result<RatioSample> {
    if eigenvalues.len() < 3 {
        return Err(Error::Input(format!(
            "need at least 3 levels for a spacing ratio, got {}",
            eigenvalues.len()
        )));
    }
    if let Some(k) = eigenvalues.windows(2).position(|w| !(w[1] >= w[0])) {
        return Err(Error::Input(format!(
            "levels not sorted ascending at position {k}: {} then {}",
            eigenvalues[k],
            eigenvalues[k + 1]
        )));
    }
    let span = eigenvalues[eigenvalues.len() - 1] - eigenvalues[0];
    let tol = DEGENERACY_TOL * span;
    let spacings: Vec<f64> = eigenvalues.windows(2).map(|w| w[1] - w[0]).collect();
    let mut sample = RatioSample::default();
    for w in spacings.windows(2) {
        if w[0] <= tol || w[1] <= tol {
            sample.dropped_count += 1;
            continue;
        }
        sample.values.push((w[1] / w[0]).min(w[0] / w[1]));
    }
    Ok(sample)
}

pub fn mean_ratio(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Input("mean of an empty ratio sample".into()));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

fn check_r(r: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&r) {
        return Err(domain(format!("ratio {r} outside [0, 1]")));
    }
    Ok(())
}

/// Poisson density `2 / (1 + r)^2`.
pub fn p0(r: f64) -> f64 {
    2.0 / ((1.0 + r) * (1.0 + r))
}

/// GOE density `P_1(r; 0.875)`.
pub fn p1(r: f64) -> f64 {
    goe_params().density(r)
}

/// Normalization constant of [`p1`], about 3.662.
pub fn c1() -> f64 {
    goe_params().normalization
}

fn goe_params() -> &'static DistributionParams {
    static GOE: OnceLock<DistributionParams> = OnceLock::new();
    GOE.get_or_init(|| DistributionParams::new(1.0, GAMMA_GOE).expect("GOE parameters are in range"))
}

/// `P_beta(r; gamma) = 2 C (r + r^2)^beta / [(1 + r)^2 - gamma r]^(1 + 3 beta / 2)`
/// with `C` fixed by unit normalization on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionParams {
    pub beta: f64,
    pub gamma: f64,
    pub normalization: f64,
}

fn unnormalized(r: f64, beta: f64, gamma: f64) -> f64 {
    let base = (1.0 + r) * (1.0 + r) - gamma * r;
    2.0 * (r + r * r).powf(beta) / base.powf(1.0 + 1.5 * beta)
}

impl DistributionParams {
    /// Accepts `beta` in `[0, 1.2]` (fits may overshoot 1 slightly) and
    /// `gamma` in `[0, 1]`.
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=1.2).contains(&beta) || !(0.0..=1.0).contains(&gamma) {
            return Err(domain(format!(
                "(beta, gamma) = ({beta}, {gamma}) outside [0, 1.2] x [0, 1]"
            )));
        }
        let integral = integrate_default(|r| unnormalized(r, beta, gamma), 0.0, 1.0);
        Ok(Self {
            beta,
            gamma,
            normalization: 1.0 / integral,
        })
    }

    pub fn density(&self, r: f64) -> f64 {
        self.normalization * unnormalized(r, self.beta, self.gamma)
    }
}

pub fn p_beta_gamma(r: f64, beta: f64, gamma: f64) -> Result<f64> {
    check_r(r)?;
    Ok(DistributionParams::new(beta, gamma)?.density(r))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioHistogram {
    pub counts: Vec<u64>,
    pub total: u64,
}

impl RatioHistogram {
    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        1.0 / self.counts.len() as f64
    }

    pub fn midpoint(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.bin_width()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.total as f64).collect()
    }
}

/// Equal-width histogram on `[0, 1]`; the last bin is closed on the right.
pub fn histogram(values: &[f64]) -> Result<RatioHistogram> {
    histogram_with_bins(values, N_BINS)
}

pub fn histogram_with_bins(values: &[f64], n_bins: usize) -> Result<RatioHistogram> {
    if values.is_empty() || n_bins == 0 {
        return Err(Error::Input("histogram needs samples and at least one bin".into()));
    }
    let mut counts = vec![0u64; n_bins];
    for &r in values {
        check_r(r)?;
        let k = ((r * n_bins as f64) as usize).min(n_bins - 1);
        counts[k] += 1;
    }
    Ok(RatioHistogram {
        counts,
        total: values.len() as u64,
    })
}

/// How the reference distribution is discretized on the histogram bins.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KlConvention {
    /// `q_k = P(midpoint) * width`, renormalized to unit sum.
    #[default]
    RenormalizedMass,
    /// `q_k = P(midpoint)`, a density compared directly with frequencies.
    RawMidpoint,
}

#[derive(Debug, Clone, Copy)]
pub enum Reference {
    Poisson,
    Goe,
    BetaGamma(DistributionParams),
}

impl Reference {
    pub fn density(&self, r: f64) -> f64 {
        match self {
            Reference::Poisson => p0(r),
            Reference::Goe => p1(r),
            Reference::BetaGamma(p) => p.density(r),
        }
    }
}

/// `sum_k p_k ln(p_k / q_k)`, with empty bins contributing zero.
pub fn kl_divergence(hist: &RatioHistogram, reference: Reference, convention: KlConvention) -> Result<f64> {
    let p = hist.frequencies();
    let width = hist.bin_width();
    let mut q: Vec<f64> = (0..hist.n_bins())
        .map(|k| reference.density(hist.midpoint(k)))
        .collect();
    if convention == KlConvention::RenormalizedMass {
        let total: f64 = q.iter().map(|x| x * width).sum();
        q.iter_mut().for_each(|x| *x = *x * width / total);
    }
    let mut d = 0.0;
    for (pk, qk) in p.iter().zip(&q) {
        if *pk == 0.0 {
            continue;
        }
        if !(*qk > 0.0) {
            return Err(Error::Numerical(format!("reference mass {qk} in an occupied bin")));
        }
        d += pk * (pk / qk).ln();
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KlPair {
    pub d_poisson: f64,
    pub d_goe: f64,
}

impl KlPair {
    pub fn compute(hist: &RatioHistogram, convention: KlConvention) -> Result<Self> {
        Ok(Self {
            d_poisson: kl_divergence(hist, Reference::Poisson, convention)?,
            d_goe: kl_divergence(hist, Reference::Goe, convention)?,
        })
    }

    /// Negative on the localized side, positive on the chaotic side.
    pub fn difference(&self) -> f64 {
        self.d_poisson - self.d_goe
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaGammaFit {
    pub params: DistributionParams,
    /// Least-squares objective at the optimum.
    pub residual: f64,
    /// Best objective reached from each start.
    pub start_residuals: Vec<f64>,
}

pub const MIN_FIT_SAMPLES: u64 = 1000;

/// Model bin mass compared with the observed frequency in the fit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitObjective {
    /// `P_beta(midpoint; gamma) * width`.
    #[default]
    MidpointDensity,
    /// Exact integral of `P_beta(r; gamma)` over the bin. Free of the
    /// midpoint rule's curvature bias, which shifts `gamma` by a few percent.
    BinMass,
}

/// Least-squares fit `min sum_k [p_k - m_k(beta, gamma)]^2` over
/// `beta in [0, 1.2]`, `gamma in [0, 1]`, by Nelder-Mead from four fixed
/// starts, with the midpoint-density model mass.
pub fn fit_beta_gamma(hist: &RatioHistogram) -> Result<BetaGammaFit> {
    fit_beta_gamma_with(hist, FitObjective::MidpointDensity)
}

pub fn fit_beta_gamma_with(hist: &RatioHistogram, objective_kind: FitObjective) -> Result<BetaGammaFit> {
    if hist.total < MIN_FIT_SAMPLES {
        return Err(Error::Input(format!(
            "beta/gamma fit needs at least {MIN_FIT_SAMPLES} samples, histogram has {}",
            hist.total
        )));
    }
    let p = hist.frequencies();
    let width = hist.bin_width();
    let mids: Vec<f64> = (0..hist.n_bins()).map(|k| hist.midpoint(k)).collect();
    let objective = |x: &[f64]| -> f64 {
        let (beta, gamma) = (x[0], x[1]);
        let norm = 1.0 / integrate_default(|r| unnormalized(r, beta, gamma), 0.0, 1.0);
        p.iter()
            .zip(&mids)
            .map(|(pk, &r)| {
                let mass = match objective_kind {
                    FitObjective::MidpointDensity => unnormalized(r, beta, gamma) * width,
                    FitObjective::BinMass => {
                        let (lo, hi) = (r - 0.5 * width, r + 0.5 * width);
                        integrate(|x| unnormalized(x, beta, gamma), lo, hi, 1e-14, 1e-12, 64).value
                    }
                };
                (pk - norm * mass).powi(2)
            })
            .sum()
    };
    let bounds = [(0.0, 1.2), (0.0, 1.0)];
    let opts = NelderMeadOptions {
        x_tol: 1e-7,
        f_tol: 1e-20,
        ..Default::default()
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut start_residuals = Vec::with_capacity(4);
    for b0 in [0.1, 0.9] {
        for g0 in [0.2, 0.8] {
            let m = nelder_mead(objective, &[b0, g0], &bounds, &opts);
            start_residuals.push(m.value);
            if !m.converged {
                continue;
            }
            if best.as_ref().is_none_or(|(_, v)| m.value < *v) {
                best = Some((m.x, m.value));
            }
        }
    }
    let (x, residual) = best.ok_or_else(|| Error::Convergence {
        iterations: opts.max_iterations,
        residuals: start_residuals.clone(),
    })?;
    Ok(BetaGammaFit {
        params: DistributionParams::new(x[0], x[1])?,
        residual,
        start_residuals,
    })
}
