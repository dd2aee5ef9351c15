//! Analyses built from several sweeps: crossing points versus disorder
//! strength and versus the interaction ratio, and the counter-rotating check.

use serde::{Deserialize, Serialize};

use super::crossing::{crossing, Crossing, CrossingMethod};
use super::disorder::Disorder;
use super::sweep::{run_sweep, BoseHubbardModel, ModelSpec, SweepConfig, SweepCurve};
use crate::error::{Error, Result};
use crate::optimize::polyfit;

/// One disorder strength and the J grid used for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaPoint {
    pub sigma: f64,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderRow {
    pub sigma: f64,
    pub uniform: Crossing,
    pub alternating: Crossing,
    /// `(J_C^A - J_C^F) / J_C^F` from the two crossings directly.
    pub relative_increase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderScan {
    pub rows: Vec<DisorderRow>,
    /// Quadratic coefficients (ascending) of `J_C(sigma)`; needs three or
    /// more disorder strengths.
    pub uniform_fit: Option<Vec<f64>>,
    pub alternating_fit: Option<Vec<f64>>,
    /// Relative increase evaluated on the quadratic fits at each sigma.
    pub fitted_relative_increase: Option<Vec<f64>>,
    /// `(uniform, alternating)` sweeps behind each row.
    #[serde(skip)]
    pub curves: Vec<(SweepCurve, SweepCurve)>,
}

fn with_sigma(base: &SweepConfig, model: BoseHubbardModel, point: &SigmaPoint) -> SweepConfig {
    let mut cfg = base.clone();
    cfg.model = ModelSpec::BoseHubbard(model);
    cfg.disorder.disorder = Disorder::SiteFrequency { sigma: point.sigma };
    cfg.grid = point.grid.clone();
    cfg
}

/// Crossing points of a uniform and an alternating Bose-Hubbard array at
/// each disorder strength.
pub fn disorder_scan(
    base: &SweepConfig,
    uniform: BoseHubbardModel,
    alternating: BoseHubbardModel,
    points: &[SigmaPoint],
    method: CrossingMethod,
) -> Result<DisorderScan> {
    let mut rows = Vec::with_capacity(points.len());
    let mut curves = Vec::with_capacity(points.len());
    for p in points {
        let su = run_sweep(&with_sigma(base, uniform, p))?;
        let sa = run_sweep(&with_sigma(base, alternating, p))?;
        let cu = crossing(&su, method)?;
        let ca = crossing(&sa, method)?;
        curves.push((su, sa));
        log::info!(
            "sigma {}: J_C uniform {:.5}, alternating {:.5}",
            p.sigma,
            cu.j_c,
            ca.j_c
        );
        rows.push(DisorderRow {
            sigma: p.sigma,
            uniform: cu,
            alternating: ca,
            relative_increase: (ca.j_c - cu.j_c) / cu.j_c,
        });
    }
    let (mut uniform_fit, mut alternating_fit, mut fitted_relative_increase) = (None, None, None);
    if rows.len() >= 3 {
        let s: Vec<f64> = rows.iter().map(|r| r.sigma).collect();
        let fu = polyfit(&s, &rows.iter().map(|r| r.uniform.j_c).collect::<Vec<_>>(), 2)?;
        let fa = polyfit(&s, &rows.iter().map(|r| r.alternating.j_c).collect::<Vec<_>>(), 2)?;
        fitted_relative_increase = Some(s.iter().map(|&x| (fa.eval(x) - fu.eval(x)) / fu.eval(x)).collect());
        uniform_fit = Some(fu.coefficients);
        alternating_fit = Some(fa.coefficients);
    }
    Ok(DisorderScan {
        rows,
        uniform_fit,
        alternating_fit,
        fitted_relative_increase,
        curves,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaPoint {
    pub eta: f64,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaScan {
    pub rows: Vec<(f64, Crossing)>,
    pub intercept: f64,
    pub slope: f64,
    pub slope_se: f64,
    #[serde(skip)]
    pub curves: Vec<SweepCurve>,
}

/// Alternating-array crossing versus `eta`, with `U^B = -eta U^A` and `U^A`
/// fixed at `u_a`.
pub fn eta_scan(base: &SweepConfig, u_a: f64, points: &[EtaPoint], method: CrossingMethod) -> Result<EtaScan> {
    if points.len() < 3 {
        return Err(Error::Input(
            "eta scan needs at least three eta values for a slope error".into(),
        ));
    }
    let omega_mean = match &base.model {
        ModelSpec::BoseHubbard(m) => m.omega_mean,
        ModelSpec::QubitArray(_) => return Err(Error::Input("eta scan runs on Bose-Hubbard models".into())),
    };
    let mut rows = Vec::with_capacity(points.len());
    let mut curves = Vec::with_capacity(points.len());
    for p in points {
        let mut cfg = base.clone();
        cfg.model = ModelSpec::BoseHubbard(BoseHubbardModel {
            omega_mean,
            ..BoseHubbardModel::alternating(u_a, p.eta)
        });
        cfg.grid = p.grid.clone();
        let curve = run_sweep(&cfg)?;
        let c = crossing(&curve, method)?;
        log::info!("eta {}: J_C {:.5}", p.eta, c.j_c);
        rows.push((p.eta, c));
        curves.push(curve);
    }
    let x: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.1.j_c).collect();
    let fit = polyfit(&x, &y, 1)?;
    Ok(EtaScan {
        rows,
        intercept: fit.coefficients[0],
        slope: fit.coefficients[1],
        slope_se: fit.standard_errors[1],
        curves,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrComparison {
    pub rwa: SweepCurve,
    pub cr: SweepCurve,
    pub max_abs_rbar_difference: f64,
}

/// The same Bose-Hubbard sweep with and without counter-rotating terms,
/// sharing disorder draws. `omega_mean` is the absolute mean frequency the
/// counter-rotating terms see.
pub fn cr_comparison(base: &SweepConfig, omega_mean: f64) -> Result<CrComparison> {
    let ModelSpec::BoseHubbard(model) = base.model else {
        return Err(Error::Input(
            "counter-rotating comparison runs on Bose-Hubbard models".into(),
        ));
    };
    let mut rwa_cfg = base.clone();
    rwa_cfg.model = ModelSpec::BoseHubbard(BoseHubbardModel {
        omega_mean,
        counter_rotating: false,
        ..model
    });
    let mut cr_cfg = base.clone();
    cr_cfg.model = ModelSpec::BoseHubbard(BoseHubbardModel {
        omega_mean,
        counter_rotating: true,
        ..model
    });
    let rwa = run_sweep(&rwa_cfg)?;
    let cr = run_sweep(&cr_cfg)?;
    let max_abs_rbar_difference = rwa
        .points
        .iter()
        .zip(&cr.points)
        .map(|(a, b)| (a.rbar - b.rbar).abs())
        .fold(0.0, f64::max);
    Ok(CrComparison {
        rwa,
        cr,
        max_abs_rbar_difference,
    })
}
