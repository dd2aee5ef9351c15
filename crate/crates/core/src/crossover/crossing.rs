//! Crossing points of a sweep curve.
//!
//! The first sign change of `observable - threshold` along the grid is
//! interpolated linearly in `(ln J, observable)`.

use serde::{Deserialize, Serialize};

use super::sweep::SweepCurve;
use crate::error::{Error, Result};
use crate::levelstats::R_BAR_THRESHOLD;

/// Fitted `beta` at the crossing.
pub const BETA_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossingMethod {
    MeanRatio,
    KullbackLeibler,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub method: CrossingMethod,
    pub j_c: f64,
    /// Grid indices `(i, i + 1)` bracketing `j_c`.
    pub bracket: (usize, usize),
    pub threshold: f64,
    /// Interpolated observable minus threshold at `j_c`.
    pub residual: f64,
}

/// All three crossings of one curve; a method whose observable never crosses
/// is `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingResult {
    pub rbar: Option<Crossing>,
    pub kl: Option<Crossing>,
    pub beta: Option<Crossing>,
}

impl CrossingResult {
    pub fn from_curve(curve: &SweepCurve) -> Self {
        Self {
            rbar: crossing_rbar(curve).ok(),
            kl: crossing_kl(curve).ok(),
            beta: crossing_beta(curve).ok(),
        }
    }

    pub fn get(&self, method: CrossingMethod) -> Option<&Crossing> {
        match method {
            CrossingMethod::MeanRatio => self.rbar.as_ref(),
            CrossingMethod::KullbackLeibler => self.kl.as_ref(),
            CrossingMethod::Beta => self.beta.as_ref(),
        }
    }
}

/// Returns `(j_c, i, residual)` for the first bracket `[i, i + 1]` where `y`
/// reaches `threshold`.
pub fn first_crossing(j: &[f64], y: &[f64], threshold: f64) -> Result<(f64, usize, f64)> {
    if j.len() != y.len() || j.len() < 2 {
        return Err(Error::Input(format!(
            "crossing needs at least two paired points, got {} / {}",
            j.len(),
            y.len()
        )));
    }
    if j.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Input("crossing interpolation is in ln J and needs J > 0".into()));
    }
    for i in 0..j.len() - 1 {
        let (a, b) = (y[i] - threshold, y[i + 1] - threshold);
        if a.is_nan() || b.is_nan() {
            continue;
        }
        if a == 0.0 {
            return Ok((j[i], i, 0.0));
        }
        if a * b <= 0.0 {
            let t = a / (a - b);
            let (la, lb) = (j[i].ln(), j[i + 1].ln());
            let j_c = (la + t * (lb - la)).exp();
            let residual = a + t * (b - a);
            return Ok((j_c, i, residual));
        }
    }
    let finite = y.iter().filter(|v| v.is_finite());
    Err(Error::NoCrossing {
        threshold,
        min: finite.clone().fold(f64::INFINITY, |m, &v| m.min(v)),
        max: finite.fold(f64::NEG_INFINITY, |m, &v| m.max(v)),
        j_min: j[0],
        j_max: j[j.len() - 1],
    })
}

fn crossing_of(curve: &SweepCurve, method: CrossingMethod, threshold: f64, y: Vec<f64>) -> Result<Crossing> {
    let (j_c, i, residual) = first_crossing(&curve.j(), &y, threshold)?;
    Ok(Crossing {
        method,
        j_c,
        bracket: (i, i + 1),
        threshold,
        residual,
    })
}

/// `rbar` through the Poisson/GOE midpoint.
pub fn crossing_rbar(curve: &SweepCurve) -> Result<Crossing> {
    crossing_of(curve, CrossingMethod::MeanRatio, R_BAR_THRESHOLD, curve.rbar())
}

/// Equal divergence from both references (`d_poisson - d_goe` through 0).
pub fn crossing_kl(curve: &SweepCurve) -> Result<Crossing> {
    let y = curve.points.iter().map(|p| p.kl.difference()).collect();
    crossing_of(curve, CrossingMethod::KullbackLeibler, 0.0, y)
}

pub fn crossing_beta(curve: &SweepCurve) -> Result<Crossing> {
    let y = curve.points.iter().map(|p| p.beta).collect();
    crossing_of(curve, CrossingMethod::Beta, BETA_THRESHOLD, y)
}

pub fn crossing(curve: &SweepCurve, method: CrossingMethod) -> Result<Crossing> {
    match method {
        CrossingMethod::MeanRatio => crossing_rbar(curve),
        CrossingMethod::KullbackLeibler => crossing_kl(curve),
        CrossingMethod::Beta => crossing_beta(curve),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossover::log_grid;
    use crate::crossover::sweep::SweepPoint;
    use crate::levelstats::{KlPair, RatioHistogram, R_BAR_POISSON};

    fn curve(j: &[f64], f: impl Fn(f64) -> (f64, f64, f64)) -> SweepCurve {
        SweepCurve {
            points: j
                .iter()
                .map(|&x| {
                    let (rbar, dkl, beta) = f(x);
                    SweepPoint {
                        control: x,
                        j: x,
                        rbar,
                        rbar_se: 0.0,
                        kl: KlPair {
                            d_poisson: 0.1 + dkl,
                            d_goe: 0.1,
                        },
                        beta,
                        gamma: 0.5,
                        realizations: 1,
                        n_ratios: 1,
                        dropped: 0,
                        histogram: RatioHistogram {
                            counts: vec![1],
                            total: 1,
                        },
                    }
                })
                .collect(),
        }
    }

    #[test]
    fn threshold_value() {
        assert!((R_BAR_THRESHOLD - 0.45855).abs() < 1e-5);
    }

    #[test]
    fn synthetic_sigmoid_recovered() {
        let j0 = 0.137;
        let grid = log_grid(0.01, 1.0, 16);
        let c = curve(&grid, |x| {
            let s = 1.0 / (1.0 + (j0 / x).powi(2));
            (R_BAR_POISSON + 0.1445 * s, s - 0.5, s)
        });
        // rbar crosses its threshold where s = (0.45855 - 0.38629) / 0.1445.
        let s = (R_BAR_THRESHOLD - R_BAR_POISSON) / 0.1445;
        let exact = j0 * (s / (1.0 - s)).sqrt();
        let cell = 10f64.powf(1.0 / 16.0);
        let r = crossing_rbar(&c).unwrap();
        assert!(r.j_c / exact < cell && exact / r.j_c < cell);
        assert!(grid[r.bracket.0] <= r.j_c && r.j_c <= grid[r.bracket.1]);
        let k = crossing_kl(&c).unwrap();
        assert!(k.j_c / j0 < cell && j0 / k.j_c < cell);
        assert!(k.residual.abs() < 1e-10);
        let b = crossing_beta(&c).unwrap();
        assert!((b.j_c - k.j_c).abs() < 1e-12);
    }

    #[test]
    fn linear_in_log_is_exact() {
        let grid = log_grid(0.01, 1.0, 4);
        let c = curve(&grid, |x| (0.0, 0.0, 0.5 + 0.1 * (x / 0.05).ln()));
        let b = crossing_beta(&c).unwrap();
        assert!((b.j_c - 0.05).abs() < 1e-12);
    }

    #[test]
    fn below_threshold_is_error() {
        let grid = log_grid(0.01, 1.0, 4);
        let c = curve(&grid, |x| (0.39 + 0.01 * x, -1.0, 0.1));
        match crossing_rbar(&c) {
            Err(Error::NoCrossing { min, max, .. }) => assert!(min < max && max < R_BAR_THRESHOLD),
            other => panic!("{other:?}"),
        }
        assert!(crossing_kl(&c).is_err());
        let all = CrossingResult::from_curve(&c);
        assert!(all.rbar.is_none() && all.beta.is_none());
    }

    #[test]
    fn first_sign_change_wins() {
        let j = [1.0, 2.0, 3.0, 4.0];
        let (jc, i, _) = first_crossing(&j, &[-1.0, 1.0, -1.0, 1.0], 0.0).unwrap();
        assert_eq!(i, 0);
        assert!(jc > 1.0 && jc < 2.0);
    }
}
