//! Named experiment presets.
//!
//! Qubit energies are in GHz (E/h). Bose-Hubbard-only presets use units of
//! the interaction magnitude `|U|`.

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};

use qchaos_core::crossover::{ArrayHamiltonian, CrossingMethod};
use qchaos_core::qubit_models::{transmon_targets, CsfqSpec, TransmonSpec, DEFAULT_N_CUT};

use crate::spec::{
    AnalysisSpec, Experiment, GraphKind, GraphSpec, GridSpec, GridVariable, ModelEntry, ModelKind, OutputSpec, RunSpec,
    ScanSpec, ThreeSiteSpec,
};

pub const PRESETS: [&str; 9] = [
    "fig2-reduced",
    "fig3-reduced",
    "fig4a-reduced",
    "fig4b-reduced",
    "fig5-surface7",
    "fig5-grid33",
    "figA1-reduced",
    "figA4-reduced",
    "appendixD-table",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    Reduced,
    Full,
}

pub fn transmon() -> TransmonSpec {
    TransmonSpec {
        e_c: 0.25,
        e_j_mean: 44.0,
        e_j_sigma: 1.17,
    }
}

/// CSFQ matched to [`transmon`].
pub fn csfq() -> CsfqSpec {
    CsfqSpec {
        e_cf: 0.054,
        e_jf_mean: 301.0,
        e_jf_sigma: 8.51,
        alpha: 0.35,
        allow_nonpositive_u: false,
    }
}

fn array(label: &str, kind: ModelKind) -> ModelEntry {
    ModelEntry {
        label: label.into(),
        kind,
        transmon: matches!(kind, ModelKind::TransmonArray | ModelKind::AlternatingArray).then(transmon),
        csfq: matches!(kind, ModelKind::CsfqArray | ModelKind::AlternatingArray).then(csfq),
        n_cut: DEFAULT_N_CUT,
        hamiltonian: ArrayHamiltonian::Exact,
        u: -1.0,
        eta: None,
        omega_mean: 0.0,
    }
}

fn bose_hubbard(label: &str, u: f64, eta: Option<f64>) -> ModelEntry {
    ModelEntry {
        label: label.into(),
        kind: ModelKind::BoseHubbard,
        transmon: None,
        csfq: None,
        n_cut: DEFAULT_N_CUT,
        hamiltonian: ArrayHamiltonian::Exact,
        u,
        eta,
        omega_mean: 0.0,
    }
}

fn base(experiment: Experiment, name: &str, seed: u64, realizations: usize, n_exc: usize, graph: GraphSpec) -> RunSpec {
    RunSpec {
        experiment,
        preset: Some(name.into()),
        seed,
        realizations,
        n_exc: Some(n_exc),
        graph: Some(graph),
        models: Vec::new(),
        grid: None,
        disorder: None,
        analysis: AnalysisSpec::default(),
        scan: None,
        three_site: None,
        output: OutputSpec::default(),
    }
}

/// Log grid for the disorder scan: the crossing grows with the disorder
/// strength, so the window follows it.
fn sigma_grid(sigma: f64) -> GridSpec {
    let f = (sigma / 0.47).max(1.0);
    GridSpec::log(0.1 * f.sqrt(), 1.5 * f, 16)
}

/// Transmon-equivalent Bose-Hubbard interaction and frequency spread.
fn matched_bose_hubbard() -> Result<(f64, f64, f64)> {
    let t = transmon_targets(&transmon(), DEFAULT_N_CUT)?;
    Ok((-t.abs_anharm, t.domega01, t.omega01))
}

pub fn preset(name: &str, scale: Scale, seed: u64) -> Result<RunSpec> {
    let full = scale == Scale::Full;
    let (m, n) = if full { (10, 5) } else { (8, 4) };
    let spec = match name {
        "fig2-reduced" => {
            let mut s = base(
                Experiment::SingleSweep,
                name,
                seed,
                if full { 1000 } else { 200 },
                n,
                GraphSpec::chain(m),
            );
            s.models = vec![array("csfq", ModelKind::CsfqArray)];
            s.grid = Some(GridSpec::values(vec![0.001, 0.005, 0.03], GridVariable::K));
            s.output.histograms = true;
            s
        }
        "fig3-reduced" => {
            let (u, sigma, _) = matched_bose_hubbard()?;
            let mut s = base(
                Experiment::SingleSweep,
                name,
                seed,
                if full { 5000 } else { 200 },
                n,
                GraphSpec::chain(m),
            );
            s.models = vec![
                array("transmon", ModelKind::TransmonArray),
                array("csfq", ModelKind::CsfqArray),
                array("alternating", ModelKind::AlternatingArray),
                bose_hubbard("bh-uniform", u, None),
                bose_hubbard("bh-alternating", u, Some(1.0)),
            ];
            s.disorder = Some(sigma);
            s.grid = Some(GridSpec::log(0.01 * u.abs(), u.abs(), 16));
            s
        }
        "fig4a-reduced" => {
            let sigmas = vec![0.25, 0.47, 0.75, 1.0, 1.5, 2.0, 2.5];
            let mut s = base(
                Experiment::DisorderScan,
                name,
                seed,
                if full { 1000 } else { 200 },
                n,
                GraphSpec::chain(m),
            );
            s.models = vec![
                bose_hubbard("uniform", -1.0, None),
                bose_hubbard("alternating", -1.0, Some(1.0)),
            ];
            s.disorder = Some(0.47);
            s.analysis.fit = false;
            s.scan = Some(ScanSpec {
                grids: Some(sigmas.iter().map(|&x| sigma_grid(x)).collect()),
                sigmas,
                etas: Vec::new(),
                method: CrossingMethod::KullbackLeibler,
            });
            s
        }
        "fig4b-reduced" => {
            let mut s = base(
                Experiment::EtaScan,
                name,
                seed,
                if full { 1000 } else { 200 },
                n,
                GraphSpec::chain(m),
            );
            s.models = vec![bose_hubbard("alternating", -1.0, None)];
            s.disorder = Some(0.47);
            s.analysis.fit = false;
            s.grid = Some(GridSpec::log(0.1, 1.5, 16));
            s.scan = Some(ScanSpec {
                sigmas: Vec::new(),
                etas: vec![0.5, 1.0, 1.5, 2.0],
                method: CrossingMethod::KullbackLeibler,
                grids: None,
            });
            s
        }
        "fig5-surface7" | "fig5-grid33" => {
            let (graph, n_exc) = if name == "fig5-surface7" {
                (
                    GraphSpec {
                        kind: GraphKind::Surface7,
                        sites: None,
                        rows: None,
                        cols: None,
                        edges: None,
                        alternation: None,
                    },
                    4,
                )
            } else {
                (
                    GraphSpec {
                        kind: GraphKind::Grid,
                        sites: None,
                        rows: Some(3),
                        cols: Some(3),
                        edges: None,
                        alternation: None,
                    },
                    5,
                )
            };
            let mut s = base(
                Experiment::DisorderScan,
                name,
                seed,
                if full { 1000 } else { 300 },
                n_exc,
                graph,
            );
            s.models = vec![
                bose_hubbard("uniform", -1.0, None),
                bose_hubbard("alternating", -1.0, Some(1.0)),
            ];
            s.disorder = Some(0.47);
            s.analysis.fit = false;
            s.grid = Some(GridSpec::log(0.05, 0.5, 16));
            s.scan = Some(ScanSpec {
                sigmas: vec![0.47],
                etas: Vec::new(),
                method: CrossingMethod::MeanRatio,
                grids: None,
            });
            s
        }
        "figA1-reduced" => {
            let mut s = base(
                Experiment::SingleSweep,
                name,
                seed,
                if full { 1000 } else { 200 },
                n,
                GraphSpec::chain(m),
            );
            s.models = vec![bose_hubbard("uniform", -1.0, None)];
            s.disorder = Some(0.47);
            s.grid = Some(GridSpec::log(0.01, 1.0, 16));
            s
        }
        "figA4-reduced" => {
            let (u, sigma, omega) = matched_bose_hubbard()?;
            let (m, n, r) = if full { (10, 4, 500) } else { (6, 3, 300) };
            let mut s = base(Experiment::CrComparison, name, seed, r, n, GraphSpec::chain(m));
            // Units of |U|.
            let mut bh = bose_hubbard("uniform", -1.0, None);
            bh.omega_mean = omega / u.abs();
            s.models = vec![bh];
            s.disorder = Some(sigma / u.abs());
            s.analysis.fit = false;
            s.grid = Some(GridSpec::log(0.01, 1.0, 8));
            s
        }
        "appendixD-table" => RunSpec {
            experiment: Experiment::ThreeSite,
            preset: Some(name.into()),
            seed,
            realizations: 1,
            n_exc: None,
            graph: None,
            models: Vec::new(),
            grid: None,
            disorder: None,
            analysis: AnalysisSpec::default(),
            scan: None,
            three_site: Some(ThreeSiteSpec {
                u: 1.0,
                delta_omega: 0.1,
                j: 0.01,
                etas: vec![-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0],
            }),
            output: OutputSpec::default(),
        },
        other => bail!("unknown preset {other:?}; available: {}", PRESETS.join(", ")),
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for name in PRESETS {
            for scale in [Scale::Reduced, Scale::Full] {
                let s = preset(name, scale, 1).unwrap();
                s.validate().unwrap_or_else(|e| panic!("{name}: {e:#}"));
                assert_eq!(s.preset.as_deref(), Some(name));
            }
        }
        assert!(preset("fig9", Scale::Reduced, 1).is_err());
    }

    #[test]
    fn fig3_matches_transmon() {
        let s = preset("fig3-reduced", Scale::Reduced, 7).unwrap();
        assert_eq!((s.graph.as_ref().unwrap().sites, s.n_exc), (Some(8), Some(4)));
        assert_eq!(s.seed, 7);
        let u = s.models[3].u;
        assert!((u + 0.267).abs() < 0.002, "{u}");
        let sigma = s.disorder.unwrap();
        assert!(sigma > 0.1 && sigma < 0.15, "{sigma}");
    }
}
