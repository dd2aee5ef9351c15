//! Disorder-averaged sweeps over a hopping (or coupling) grid.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::disorder::{Disorder, DisorderSpec};
use crate::eigensolve::{eig_symmetric, number_expectations};
use crate::error::{domain, Error, Result};
use crate::fock_basis::{ExtendedBasis, FockBasis, DEFAULT_DIMENSION_CAP};
use crate::hamiltonian::{
    bose_hubbard_map, build_bh_with_cr, build_bose_hubbard, build_coupled_array, subtract_mean_frequency, ArrayPattern,
    BoseHubbardParams,
};
use crate::lattice::ConnectivityGraph;
use crate::levelstats::{
    fit_beta_gamma_with, histogram_with_bins, spacing_ratios, FitObjective, KlConvention, KlPair, RatioHistogram,
    RatioSample, N_BINS,
};
use crate::qubit_models::{CsfqSpec, QubitKind, QubitSpec, TransmonSpec, DEFAULT_N_CUT};
use crate::rng::{substream_rng, BOOTSTRAP_STREAM_BASE};
use crate::SymmetricMatrix;

/// Bose-Hubbard chain or lattice with site-frequency disorder; the grid is J.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoseHubbardModel {
    /// Mean site frequency. Only matters with counter-rotating terms.
    pub omega_mean: f64,
    /// Interaction on type-A sites (every site unless `u_b` is set).
    pub u_a: f64,
    /// Interaction on the graph's type-B sites.
    #[serde(default)]
    pub u_b: Option<f64>,
    #[serde(default)]
    pub counter_rotating: bool,
}

impl BoseHubbardModel {
    pub fn uniform(u: f64) -> Self {
        Self {
            omega_mean: 0.0,
            u_a: u,
            u_b: None,
            counter_rotating: false,
        }
    }

    /// Type-B sites carry `-eta * u_a`.
    pub fn alternating(u_a: f64, eta: f64) -> Self {
        Self {
            u_b: Some(-eta * u_a),
            ..Self::uniform(u_a)
        }
    }

    fn site_u(&self, graph: &ConnectivityGraph) -> Vec<f64> {
        graph
            .alternation()
            .iter()
            .map(|&b| if b { self.u_b.unwrap_or(self.u_a) } else { self.u_a })
            .collect()
    }
}

/// How a qubit array is turned into a matrix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArrayHamiltonian {
    /// Product basis of exact single-qubit eigenstates with charge coupling.
    #[default]
    Exact,
    /// Leading-order Bose-Hubbard map of each realization.
    Mapped,
}

/// Array of transmons and/or CSFQs with Josephson-energy disorder; the grid
/// is the coupling K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitArrayModel {
    #[serde(default)]
    pub transmon: Option<TransmonSpec>,
    #[serde(default)]
    pub csfq: Option<CsfqSpec>,
    pub pattern: ArrayPattern,
    #[serde(default = "default_n_cut")]
    pub n_cut: usize,
    #[serde(default)]
    pub hamiltonian: ArrayHamiltonian,
}

fn default_n_cut() -> usize {
    DEFAULT_N_CUT
}

impl QubitArrayModel {
    pub fn site_specs(&self, graph: &ConnectivityGraph) -> Result<Vec<QubitSpec>> {
        self.pattern
            .kinds(graph)?
            .into_iter()
            .map(|k| match k {
                QubitKind::Transmon => self
                    .transmon
                    .map(QubitSpec::Transmon)
                    .ok_or_else(|| Error::Input("pattern needs a transmon spec".into())),
                QubitKind::Csfq => self
                    .csfq
                    .map(QubitSpec::Csfq)
                    .ok_or_else(|| Error::Input("pattern needs a CSFQ spec".into())),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ModelSpec {
    BoseHubbard(BoseHubbardModel),
    QubitArray(QubitArrayModel),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub kl_convention: KlConvention,
    pub fit_objective: FitObjective,
    /// Skip the `(beta, gamma)` fit (reported as NaN).
    pub fit: bool,
    pub n_bins: usize,
    pub bootstrap_resamples: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            kl_convention: KlConvention::default(),
            fit_objective: FitObjective::default(),
            fit: true,
            n_bins: N_BINS,
            bootstrap_resamples: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub model: ModelSpec,
    pub graph: ConnectivityGraph,
    pub n_exc: usize,
    /// J for Bose-Hubbard models, K for qubit arrays; strictly increasing.
    pub grid: Vec<f64>,
    pub realizations: usize,
    pub disorder: DisorderSpec,
    pub options: AnalysisOptions,
    pub dimension_cap: u64,
}

impl SweepConfig {
    pub fn new(
        model: ModelSpec,
        graph: ConnectivityGraph,
        n_exc: usize,
        grid: Vec<f64>,
        realizations: usize,
        disorder: DisorderSpec,
    ) -> Self {
        Self {
            model,
            graph,
            n_exc,
            grid,
            realizations,
            disorder,
            options: AnalysisOptions::default(),
            dimension_cap: DEFAULT_DIMENSION_CAP,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.grid.is_empty() || self.grid.windows(2).any(|w| !(w[1] > w[0])) || !(self.grid[0] >= 0.0) {
            return Err(Error::Input(
                "sweep grid must be non-empty, non-negative and strictly increasing".into(),
            ));
        }
        if self.realizations < 1 {
            return Err(Error::Input("sweep needs at least one realization".into()));
        }
        self.disorder.validate()?;
        match (&self.model, self.disorder.disorder) {
            (ModelSpec::BoseHubbard(_), Disorder::SiteFrequency { .. }) => Ok(()),
            (ModelSpec::QubitArray(_), Disorder::JosephsonEnergy) => Ok(()),
            (ModelSpec::BoseHubbard(_), _) => Err(domain("Bose-Hubbard sweeps take site-frequency disorder")),
            (ModelSpec::QubitArray(_), _) => Err(domain("qubit-array sweeps take Josephson-energy disorder")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Raw grid value (J or K).
    pub control: f64,
    /// Average hopping.
    pub j: f64,
    pub rbar: f64,
    /// Realization-level bootstrap standard error of `rbar`.
    pub rbar_se: f64,
    pub kl: KlPair,
    pub beta: f64,
    pub gamma: f64,
    pub realizations: usize,
    pub n_ratios: usize,
    pub dropped: usize,
    pub histogram: RatioHistogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub points: Vec<SweepPoint>,
}

impl SweepCurve {
    pub fn j(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.j).collect()
    }

    pub fn rbar(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.rbar).collect()
    }
}

/// Prebuilt bases shared by every realization.
#[allow(clippy::large_enum_variant)]
enum Bases {
    Core(FockBasis),
    Extended {
        ext: ExtendedBasis,
        labels: Vec<usize>,
        n_exc: usize,
        core_len: usize,
    },
}

struct RealizationOutput {
    samples: Vec<RatioSample>,
    /// Average hopping at each grid point.
    j: Vec<f64>,
}

/// Keeps the eigenvalues whose total occupation rounds to `n_exc`; there must
/// be exactly `expected` of them.
pub fn select_sector(eigenvalues: &[f64], occupations: &[f64], n_exc: usize, expected: usize) -> Result<Vec<f64>> {
    let kept: Vec<f64> = eigenvalues
        .iter()
        .zip(occupations)
        .filter(|(_, &n)| n.round() == n_exc as f64)
        .map(|(&e, _)| e)
        .collect();
    if kept.len() != expected {
        return Err(Error::Selection {
            kept: kept.len(),
            expected,
        });
    }
    Ok(kept)
}

fn sector_ratios(h: &SymmetricMatrix, bases: &Bases) -> Result<RatioSample> {
    match bases {
        Bases::Core(_) => spacing_ratios(&eig_symmetric(h, false)?.eigenvalues),
        Bases::Extended {
            labels,
            n_exc,
            core_len,
            ..
        } => {
            let res = eig_symmetric(h, true)?;
            let occ = number_expectations(&res, labels)?;
            spacing_ratios(&select_sector(&res.eigenvalues, &occ, *n_exc, *core_len)?)
        }
    }
}

fn run_bose_hubbard(
    cfg: &SweepConfig,
    model: &BoseHubbardModel,
    sigma: f64,
    bases: &Bases,
    r: usize,
) -> Result<RealizationOutput> {
    let g = &cfg.graph;
    let offsets = cfg.disorder.frequency_offsets(sigma, r as u64, g.n_sites());
    let base = BoseHubbardParams {
        omega01: offsets.iter().map(|d| model.omega_mean + d).collect(),
        u: model.site_u(g),
        j_edges: vec![0.0; g.edges().len()],
    };
    let mut samples = Vec::with_capacity(cfg.grid.len());
    for &j in &cfg.grid {
        let mut p = base.clone();
        p.j_edges.iter_mut().for_each(|x| *x = j);
        let h = match bases {
            Bases::Core(b) => build_bose_hubbard(&subtract_mean_frequency(&p), g, b)?,
            Bases::Extended { ext, .. } => build_bh_with_cr(&p, g, ext)?,
        };
        samples.push(sector_ratios(&h, bases)?);
    }
    Ok(RealizationOutput {
        samples,
        j: cfg.grid.clone(),
    })
}

fn run_qubit_array(
    cfg: &SweepConfig,
    model: &QubitArrayModel,
    sites: &[QubitSpec],
    basis: &FockBasis,
    r: usize,
) -> Result<RealizationOutput> {
    let g = &cfg.graph;
    let e_j = cfg.disorder.josephson_energies(sites, r as u64);
    let n_levels = (cfg.n_exc + 1).max(3);
    let spectra = match model.hamiltonian {
        ArrayHamiltonian::Exact => Some(
            sites
                .iter()
                .zip(&e_j)
                .map(|(s, &e)| s.spectrum(e, n_levels, model.n_cut))
                .collect::<Result<Vec<_>>>()?,
        ),
        ArrayHamiltonian::Mapped => None,
    };
    let mut samples = Vec::with_capacity(cfg.grid.len());
    let mut j = Vec::with_capacity(cfg.grid.len());
    for &k in &cfg.grid {
        let mapped = bose_hubbard_map(sites, &e_j, k, g)?;
        j.push(mapped.j_edges.iter().sum::<f64>() / mapped.j_edges.len() as f64);
        let h = match &spectra {
            Some(s) => build_coupled_array(s, k, g, basis)?,
            None => build_bose_hubbard(&subtract_mean_frequency(&mapped), g, basis)?,
        };
        samples.push(spacing_ratios(&eig_symmetric(&h, false)?.eigenvalues)?);
    }
    Ok(RealizationOutput { samples, j })
}

/// Runs every realization (in parallel on the current rayon pool) and
/// aggregates per grid point. Results do not depend on the pool size.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepCurve> {
    cfg.validate()?;
    let core = FockBasis::enumerate_with_cap(cfg.graph.n_sites(), cfg.n_exc, cfg.dimension_cap)?;
    if core.len() < 3 {
        return Err(Error::Input(format!(
            "sector dimension {} has no spacing ratios",
            core.len()
        )));
    }
    let outputs: Vec<Result<RealizationOutput>> = match &cfg.model {
        ModelSpec::BoseHubbard(model) => {
            let Disorder::SiteFrequency { sigma } = cfg.disorder.disorder else {
                unreachable!("checked in validate")
            };
            let bases = if model.counter_rotating {
                let core_len = core.len();
                let ext = ExtendedBasis::enumerate_with_cap(core, &cfg.graph, cfg.dimension_cap)?;
                let labels = ext.occupation_labels();
                Bases::Extended {
                    ext,
                    labels,
                    n_exc: cfg.n_exc,
                    core_len,
                }
            } else {
                Bases::Core(core)
            };
            (0..cfg.realizations)
                .into_par_iter()
                .map(|r| run_bose_hubbard(cfg, model, sigma, &bases, r))
                .collect()
        }
        ModelSpec::QubitArray(model) => {
            let sites = model.site_specs(&cfg.graph)?;
            for s in &sites {
                s.validate()?;
            }
            (0..cfg.realizations)
                .into_par_iter()
                .map(|r| run_qubit_array(cfg, model, &sites, &core, r))
                .collect()
        }
    };
    let outputs = outputs
        .into_iter()
        .enumerate()
        .map(|(index, o)| {
            o.map_err(|e| Error::Realization {
                index,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    log::info!(
        "sweep finished: {} realizations x {} grid points",
        cfg.realizations,
        cfg.grid.len()
    );
    (0..cfg.grid.len())
        .map(|g| aggregate(cfg, g, &outputs))
        .collect::<Result<Vec<_>>>()
        .map(|points| SweepCurve { points })
}

fn aggregate(cfg: &SweepConfig, g: usize, outputs: &[RealizationOutput]) -> Result<SweepPoint> {
    let mut pooled = RatioSample::default();
    for o in outputs {
        pooled.extend(&o.samples[g]);
    }
    if pooled.is_empty() {
        return Err(Error::Numerical(format!("no usable spacing ratios at grid point {g}")));
    }
    let sums: Vec<f64> = outputs.iter().map(|o| o.samples[g].values.iter().sum()).collect();
    let counts: Vec<f64> = outputs.iter().map(|o| o.samples[g].len() as f64).collect();
    let rbar = sums.iter().sum::<f64>() / counts.iter().sum::<f64>();
    let rbar_se = bootstrap_se(
        &sums,
        &counts,
        cfg.options.bootstrap_resamples,
        cfg.disorder.master_seed,
        g as u64,
    );
    let histogram = histogram_with_bins(&pooled.values, cfg.options.n_bins)?;
    let kl = KlPair::compute(&histogram, cfg.options.kl_convention)?;
    let (beta, gamma) = if cfg.options.fit {
        let fit = fit_beta_gamma_with(&histogram, cfg.options.fit_objective)?;
        (fit.params.beta, fit.params.gamma)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(SweepPoint {
        control: cfg.grid[g],
        j: outputs.iter().map(|o| o.j[g]).sum::<f64>() / outputs.len() as f64,
        rbar,
        rbar_se,
        kl,
        beta,
        gamma,
        realizations: outputs.len(),
        n_ratios: pooled.len(),
        dropped: pooled.dropped_count,
        histogram,
    })
}

/// Standard deviation of the pooled mean over realization-level resamples.
fn bootstrap_se(sums: &[f64], counts: &[f64], resamples: usize, seed: u64, grid_index: u64) -> f64 {
    let n = sums.len();
    if n < 2 || resamples < 2 {
        return f64::NAN;
    }
    let mut rng = substream_rng(seed, BOOTSTRAP_STREAM_BASE + grid_index, 0);
    let means: Vec<f64> = (0..resamples)
        .map(|_| {
            let (mut s, mut c) = (0.0, 0.0);
            for _ in 0..n {
                let k = rng.random_range(0..n);
                s += sums[k];
                c += counts[k];
            }
            s / c
        })
        .collect();
    let m = means.iter().sum::<f64>() / resamples as f64;
    (means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (resamples - 1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::ArrayPattern;
    use crate::levelstats::{R_BAR_GOE, R_BAR_POISSON};

    fn bh_config(grid: Vec<f64>, r: usize) -> SweepConfig {
        let mut cfg = SweepConfig::new(
            ModelSpec::BoseHubbard(BoseHubbardModel::uniform(-1.0)),
            ConnectivityGraph::linear_chain(6).unwrap(),
            3,
            grid,
            r,
            DisorderSpec::site_frequency(0.47, 11),
        );
        cfg.options.fit = false;
        cfg
    }

    #[test]
    fn limits_of_small_chain() {
        let curve = run_sweep(&bh_config(vec![0.004, 0.6], 60)).unwrap();
        let lo = &curve.points[0];
        let hi = &curve.points[1];
        assert!((lo.rbar - R_BAR_POISSON).abs() < 0.03, "{}", lo.rbar);
        assert!(hi.rbar > 0.48, "{}", hi.rbar);
        assert!(lo.kl.difference() < 0.0 && hi.kl.difference() > 0.0);
        assert!(lo.rbar_se > 0.0 && lo.rbar_se < 0.02);
        assert_eq!(lo.realizations, 60);
        assert_eq!(lo.n_ratios + lo.dropped, 60 * (56 - 2));
        assert!(hi.rbar < R_BAR_GOE + 0.03);
    }

    #[test]
    fn independent_of_pool_size() {
        let cfg = bh_config(vec![0.05, 0.2], 12);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| run_sweep(&cfg)).unwrap();
        let b = three.install(|| run_sweep(&cfg)).unwrap();
        // Debug output compares the skipped fit's NaNs too.
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn mirrored_interaction_and_disorder_give_same_statistics() {
        let cfg = bh_config(vec![0.03, 0.1, 0.3], 20);
        let mut flipped = cfg.clone();
        flipped.model = ModelSpec::BoseHubbard(BoseHubbardModel::uniform(1.0));
        flipped.disorder.mirror = true;
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&flipped).unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            assert!((p.rbar - q.rbar).abs() < 1e-9, "{} vs {}", p.rbar, q.rbar);
        }
    }

    #[test]
    fn counter_rotating_at_zero_hopping_matches() {
        let mut cfg = bh_config(vec![0.0, 0.02], 4);
        cfg.graph = ConnectivityGraph::linear_chain(4).unwrap();
        cfg.n_exc = 2;
        let mut cr = cfg.clone();
        cr.model = ModelSpec::BoseHubbard(BoseHubbardModel {
            omega_mean: 34.0,
            counter_rotating: true,
            ..BoseHubbardModel::uniform(-1.0)
        });
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cr).unwrap();
        assert!((a.points[0].rbar - b.points[0].rbar).abs() < 1e-9);
        assert!((a.points[1].rbar - b.points[1].rbar).abs() < 0.02);
    }

    #[test]
    fn selection_count_enforced() {
        let ev = [0.0, 1.0, 2.0];
        assert!(select_sector(&ev, &[2.0, 2.1, 0.2], 2, 2).is_ok());
        assert!(matches!(
            select_sector(&ev, &[2.0, 3.9, 0.2], 2, 2),
            Err(Error::Selection { kept: 1, expected: 2 })
        ));
    }

    #[test]
    fn qubit_array_reports_average_hopping() {
        let t = TransmonSpec::new(0.25, 44.0, 1.17).unwrap();
        let cfg = SweepConfig {
            options: AnalysisOptions {
                fit: false,
                ..Default::default()
            },
            ..SweepConfig::new(
                ModelSpec::QubitArray(QubitArrayModel {
                    transmon: Some(t),
                    csfq: None,
                    pattern: ArrayPattern::UniformTransmon,
                    n_cut: 20,
                    hamiltonian: ArrayHamiltonian::Exact,
                }),
                ConnectivityGraph::linear_chain(4).unwrap(),
                2,
                vec![0.002, 0.004],
                3,
                DisorderSpec::josephson(5),
            )
        };
        let c = run_sweep(&cfg).unwrap();
        let a: f64 = 44.0 / (8.0 * 0.25);
        let expect = 0.5 * 0.002 * a.sqrt();
        assert!((c.points[0].j - expect).abs() / expect < 0.05);
        assert!((c.points[1].j / c.points[0].j - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(run_sweep(&bh_config(vec![0.2, 0.1], 2)).is_err());
        assert!(run_sweep(&bh_config(vec![0.1], 0)).is_err());
        let mut cfg = bh_config(vec![0.1], 2);
        cfg.disorder = DisorderSpec::josephson(0);
        assert!(run_sweep(&cfg).is_err());
    }
}
