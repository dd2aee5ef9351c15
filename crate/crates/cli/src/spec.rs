//! Declarative run specs (TOML).

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qchaos_core::crossover::{log_grid, ArrayHamiltonian, CrossingMethod};
use qchaos_core::lattice::ConnectivityGraph;
use qchaos_core::levelstats::{FitObjective, KlConvention, N_BINS};
use qchaos_core::qubit_models::{CsfqSpec, TransmonSpec, DEFAULT_N_CUT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SingleSweep,
    DisorderScan,
    EtaScan,
    CrComparison,
    ThreeSite,
    FigurePreset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    TransmonArray,
    CsfqArray,
    AlternatingArray,
    BoseHubbard,
    BoseHubbardCr,
}

impl ModelKind {
    pub fn is_array(self) -> bool {
        matches!(self, Self::TransmonArray | Self::CsfqArray | Self::AlternatingArray)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEntry {
    pub label: String,
    pub kind: ModelKind,
    #[serde(default)]
    pub transmon: Option<TransmonSpec>,
    #[serde(default)]
    pub csfq: Option<CsfqSpec>,
    #[serde(default = "default_n_cut")]
    pub n_cut: usize,
    #[serde(default)]
    pub hamiltonian: ArrayHamiltonian,
    /// Bose-Hubbard interaction on type-A sites.
    #[serde(default = "default_u")]
    pub u: f64,
    /// Alternating Bose-Hubbard array with `U_B = -eta U_A`.
    #[serde(default)]
    pub eta: Option<f64>,
    /// Absolute mean frequency, used by counter-rotating terms.
    #[serde(default)]
    pub omega_mean: f64,
}

fn default_n_cut() -> usize {
    DEFAULT_N_CUT
}

fn default_u() -> f64 {
    -1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    Chain,
    Grid,
    Surface7,
    Edges,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub kind: GraphKind,
    #[serde(default)]
    pub sites: Option<usize>,
    #[serde(default)]
    pub rows: Option<usize>,
    #[serde(default)]
    pub cols: Option<usize>,
    #[serde(default)]
    pub edges: Option<Vec<(usize, usize)>>,
    /// Type-B site labels; defaults to the graph's own alternation.
    #[serde(default)]
    pub alternation: Option<Vec<bool>>,
}

impl GraphSpec {
    pub fn chain(m: usize) -> Self {
        Self {
            kind: GraphKind::Chain,
            sites: Some(m),
            rows: None,
            cols: None,
            edges: None,
            alternation: None,
        }
    }

    pub fn build(&self) -> Result<ConnectivityGraph> {
        let g = match self.kind {
            GraphKind::Chain => ConnectivityGraph::linear_chain(self.sites.context("chain graph needs `sites`")?)?,
            GraphKind::Grid => ConnectivityGraph::grid(
                self.rows.context("grid graph needs `rows`")?,
                self.cols.context("grid graph needs `cols`")?,
            )?,
            GraphKind::Surface7 => ConnectivityGraph::surface7(),
            GraphKind::Edges => ConnectivityGraph::from_edge_list(
                self.sites.context("edge-list graph needs `sites`")?,
                self.edges.as_deref().context("edge-list graph needs `edges`")?,
            )?,
        };
        Ok(match &self.alternation {
            Some(a) => g.with_alternation(a.clone())?,
            None => g,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridVariable {
    /// Average hopping; qubit-array couplings are converted at the mean
    /// Josephson energies.
    #[default]
    J,
    /// Raw coupling of qubit arrays.
    K,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub variable: GridVariable,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub start: Option<f64>,
    #[serde(default)]
    pub stop: Option<f64>,
    #[serde(default)]
    pub per_decade: Option<usize>,
}

impl GridSpec {
    pub fn log(start: f64, stop: f64, per_decade: usize) -> Self {
        Self {
            variable: GridVariable::J,
            values: None,
            start: Some(start),
            stop: Some(stop),
            per_decade: Some(per_decade),
        }
    }

    pub fn values(values: Vec<f64>, variable: GridVariable) -> Self {
        Self {
            variable,
            values: Some(values),
            start: None,
            stop: None,
            per_decade: None,
        }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        let pts = match (&self.values, self.start, self.stop, self.per_decade) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(a), Some(b), Some(n)) => {
                ensure!(
                    a > 0.0 && b > a && n > 0,
                    "log grid needs 0 < start < stop and per_decade > 0"
                );
                log_grid(a, b, n)
            }
            _ => bail!("grid needs either `values` or all of `start`, `stop`, `per_decade`"),
        };
        ensure!(
            !pts.is_empty() && pts.windows(2).all(|w| w[1] > w[0]) && pts[0] >= 0.0,
            "grid must be non-empty, non-negative and strictly increasing"
        );
        Ok(pts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    #[serde(default)]
    pub kl_convention: KlConvention,
    #[serde(default)]
    pub fit_objective: FitObjective,
    #[serde(default = "yes")]
    pub fit: bool,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        Self {
            kl_convention: KlConvention::default(),
            fit_objective: FitObjective::default(),
            fit: true,
            bins: N_BINS,
            bootstrap: default_bootstrap(),
        }
    }
}

fn yes() -> bool {
    true
}

fn default_bins() -> usize {
    N_BINS
}

fn default_bootstrap() -> usize {
    200
}

fn default_realizations() -> usize {
    200
}

fn default_seed() -> u64 {
    2024
}

fn default_method() -> CrossingMethod {
    CrossingMethod::KullbackLeibler
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    /// Disorder strengths of a disorder scan.
    #[serde(default)]
    pub sigmas: Vec<f64>,
    /// Interaction ratios of an eta scan.
    #[serde(default)]
    pub etas: Vec<f64>,
    #[serde(default = "default_method")]
    pub method: CrossingMethod,
    /// One grid per scan value; the top-level grid is used otherwise.
    #[serde(default)]
    pub grids: Option<Vec<GridSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeSiteSpec {
    pub u: f64,
    pub delta_omega: f64,
    pub j: f64,
    pub etas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<String>,
    /// Write a histogram CSV per grid point and model.
    #[serde(default)]
    pub histograms: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub experiment: Experiment,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub n_exc: Option<usize>,
    #[serde(default)]
    pub graph: Option<GraphSpec>,
    #[serde(default)]
    pub models: Vec<ModelEntry>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    /// Site-frequency standard deviation for Bose-Hubbard models.
    #[serde(default)]
    pub disorder: Option<f64>,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(default)]
    pub scan: Option<ScanSpec>,
    #[serde(default)]
    pub three_site: Option<ThreeSiteSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl RunSpec {
    /// Structural checks that do not need a run.
    pub fn validate(&self) -> Result<()> {
        ensure!(self.realizations > 0, "realizations must be positive");
        match self.experiment {
            Experiment::FigurePreset => {
                ensure!(self.preset.is_some(), "figure-preset needs `preset`");
                return Ok(());
            }
            Experiment::ThreeSite => {
                ensure!(
                    self.three_site.is_some(),
                    "three-site experiment needs a [three_site] table"
                );
                return Ok(());
            }
            _ => {}
        }
        ensure!(self.n_exc.is_some(), "`n_exc` is required");
        self.graph.as_ref().context("a [graph] table is required")?.build()?;
        ensure!(!self.models.is_empty(), "at least one [[models]] entry is required");
        let mut labels: Vec<&str> = self.models.iter().map(|m| m.label.as_str()).collect();
        labels.sort_unstable();
        ensure!(labels.windows(2).all(|w| w[0] != w[1]), "model labels must be unique");
        for m in &self.models {
            ensure!(
                !m.label.is_empty()
                    && m.label
                        .chars()
                        .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_'),
                "model label {:?} must be non-empty and use [A-Za-z0-9_-]",
                m.label
            );
            if m.kind.is_array() {
                ensure!(
                    m.kind != ModelKind::CsfqArray || m.csfq.is_some(),
                    "model {} needs a csfq table",
                    m.label
                );
                ensure!(
                    m.kind != ModelKind::TransmonArray || m.transmon.is_some(),
                    "model {} needs a transmon table",
                    m.label
                );
                ensure!(
                    m.kind != ModelKind::AlternatingArray || (m.csfq.is_some() && m.transmon.is_some()),
                    "model {} needs transmon and csfq tables",
                    m.label
                );
            } else {
                ensure!(self.disorder.is_some(), "Bose-Hubbard models need `disorder`");
            }
        }
        match self.experiment {
            Experiment::SingleSweep | Experiment::CrComparison => {
                self.grid.as_ref().context("a [grid] table is required")?.points()?;
            }
            Experiment::DisorderScan | Experiment::EtaScan => {
                let scan = self.scan.as_ref().context("a [scan] table is required")?;
                let n = if self.experiment == Experiment::DisorderScan {
                    ensure!(!scan.sigmas.is_empty(), "disorder scan needs `scan.sigmas`");
                    ensure!(
                        self.models.len() == 2,
                        "disorder scan takes a uniform and an alternating model"
                    );
                    scan.sigmas.len()
                } else {
                    ensure!(scan.etas.len() >= 3, "eta scan needs at least three `scan.etas`");
                    ensure!(self.models.len() == 1, "eta scan takes one Bose-Hubbard model");
                    scan.etas.len()
                };
                ensure!(
                    self.models.iter().all(|m| m.kind == ModelKind::BoseHubbard),
                    "scans run on bose-hubbard models"
                );
                match &scan.grids {
                    Some(g) => {
                        ensure!(g.len() == n, "scan has {n} values but {} grids", g.len());
                        for gs in g {
                            gs.points()?;
                        }
                    }
                    None => {
                        self.grid
                            .as_ref()
                            .context("scan needs a [grid] or `scan.grids`")?
                            .points()?;
                    }
                }
            }
            _ => {}
        }
        if self.experiment == Experiment::CrComparison {
            ensure!(
                self.models.len() == 1
                    && matches!(self.models[0].kind, ModelKind::BoseHubbard | ModelKind::BoseHubbardCr),
                "cr-comparison takes one Bose-Hubbard model"
            );
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn config_hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("run spec serializes")
    }
}

/// Parses and validates a TOML run spec. Figure presets are expanded.
pub fn parse_run_spec(text: &str) -> Result<RunSpec> {
    let spec: RunSpec = toml::from_str(text).context("invalid run spec")?;
    let spec = if spec.experiment == Experiment::FigurePreset {
        let name = spec.preset.as_deref().context("figure-preset needs `preset`")?;
        let mut expanded = crate::presets::preset(name, crate::presets::Scale::Reduced, spec.seed)?;
        expanded.output = spec.output.clone();
        expanded
    } else {
        spec
    };
    spec.validate()?;
    Ok(spec)
}
