//! Dense Hamiltonian assembly for Bose-Hubbard models and coupled qubit
//! arrays.
//!
//! Hopping along an edge `(i, j)` is `J_ij (b_i^dag b_j + b_j^dag b_i)`; the
//! counter-rotating extension adds `J_ij (b_i^dag b_j^dag + b_i b_j)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock_basis::{ExtendedBasis, FockBasis};
use crate::lattice::ConnectivityGraph;
use crate::matrix::SymmetricMatrix;
use crate::qubit_models::{QubitKind, QubitSpec, QubitSpectrum};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoseHubbardParams {
    pub omega01: Vec<f64>,
    pub u: Vec<f64>,
    /// One hopping per graph edge, in the graph's edge order.
    pub j_edges: Vec<f64>,
}

impl BoseHubbardParams {
    pub fn uniform(graph: &ConnectivityGraph, omega01: f64, u: f64, j: f64) -> Self {
        Self {
            omega01: vec![omega01; graph.n_sites()],
            u: vec![u; graph.n_sites()],
            j_edges: vec![j; graph.edges().len()],
        }
    }

    pub fn check(&self, graph: &ConnectivityGraph) -> Result<()> {
        if self.omega01.len() != graph.n_sites() || self.u.len() != graph.n_sites() {
            return Err(Error::Input(format!(
                "{} frequencies and {} interactions for {} sites",
                self.omega01.len(),
                self.u.len(),
                graph.n_sites()
            )));
        }
        if self.j_edges.len() != graph.edges().len() {
            return Err(Error::Input(format!(
                "{} hoppings for {} edges",
                self.j_edges.len(),
                graph.edges().len()
            )));
        }
        let all = self.omega01.iter().chain(&self.u).chain(&self.j_edges);
        if all.clone().any(|x| !x.is_finite()) {
            return Err(Error::Input("non-finite Bose-Hubbard parameter".into()));
        }
        Ok(())
    }

    pub fn mean_frequency(&self) -> f64 {
        self.omega01.iter().sum::<f64>() / self.omega01.len() as f64
    }

    /// Flips the sign of every interaction and frequency (hoppings kept).
    /// After mean subtraction this is the partner Hamiltonian whose spectrum
    /// is the exact negative of the original on bipartite graphs.
    pub fn mirrored(&self) -> Self {
        Self {
            omega01: self.omega01.iter().map(|w| -w).collect(),
            u: self.u.iter().map(|u| -u).collect(),
            j_edges: self.j_edges.clone(),
        }
    }
}

/// Shifts frequencies by their mean. Within a fixed-excitation sector this
/// only moves every level by the same constant.
pub fn subtract_mean_frequency(params: &BoseHubbardParams) -> BoseHubbardParams {
    let mean = params.mean_frequency();
    BoseHubbardParams {
        omega01: params.omega01.iter().map(|w| w - mean).collect(),
        ..params.clone()
    }
}

/// Per-site qubit types of an array.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArrayPattern {
    UniformTransmon,
    UniformCsfq,
    /// Transmons on the graph's type-A sites, CSFQs on type-B sites.
    Alternating,
    Custom(Vec<QubitKind>),
}

impl ArrayPattern {
    pub fn kinds(&self, graph: &ConnectivityGraph) -> Result<Vec<QubitKind>> {
        let m = graph.n_sites();
        Ok(match self {
            ArrayPattern::UniformTransmon => vec![QubitKind::Transmon; m],
            ArrayPattern::UniformCsfq => vec![QubitKind::Csfq; m],
            ArrayPattern::Alternating => graph
                .alternation()
                .iter()
                .map(|&b| if b { QubitKind::Csfq } else { QubitKind::Transmon })
                .collect(),
            ArrayPattern::Custom(k) => {
                if k.len() != m {
                    return Err(Error::Input(format!("{} qubit kinds for {m} sites", k.len())));
                }
                k.clone()
            }
        })
    }
}

/// A qubit array instance: per-site models with sampled Josephson energies.
#[derive(Debug, Clone)]
pub struct ArrayConfig {
    pub sites: Vec<QubitSpec>,
    pub josephson: Vec<f64>,
    pub k: f64,
    pub n_exc: usize,
}

/// Leading-order Bose-Hubbard parameters of a qubit array.
pub fn bose_hubbard_map(
    sites: &[QubitSpec],
    josephson: &[f64],
    k: f64,
    graph: &ConnectivityGraph,
) -> Result<BoseHubbardParams> {
    if sites.len() != graph.n_sites() || josephson.len() != graph.n_sites() {
        return Err(Error::Input(format!(
            "{} site specs and {} Josephson energies for {} sites",
            sites.len(),
            josephson.len(),
            graph.n_sites()
        )));
    }
    for s in sites {
        s.validate()?;
    }
    let maps: Vec<_> = sites.iter().zip(josephson).map(|(s, &e)| s.site_mapping(e)).collect();
    Ok(BoseHubbardParams {
        omega01: maps.iter().map(|m| m.omega01).collect(),
        u: maps.iter().map(|m| m.u).collect(),
        j_edges: graph
            .edges()
            .iter()
            .map(|&(i, j)| 0.5 * k * (maps[i].a * maps[j].a).powf(0.25))
            .collect(),
    })
}

fn check_basis(graph: &ConnectivityGraph, m: usize) -> Result<()> {
    if graph.n_sites() != m {
        return Err(Error::Input(format!(
            "graph has {} sites, basis has {m}",
            graph.n_sites()
        )));
    }
    Ok(())
}

fn bh_diagonal(params: &BoseHubbardParams, s: &[u8]) -> f64 {
    s.iter()
        .enumerate()
        .map(|(i, &n)| {
            let n = f64::from(n);
            params.omega01[i] * n + 0.5 * params.u[i] * n * (n - 1.0)
        })
        .sum()
}

/// Number-conserving hops out of state `s`, as `(target, amplitude)`.
fn for_each_hop(
    s: &[u8],
    graph: &ConnectivityGraph,
    j_edges: &[f64],
    buf: &mut [u8],
    mut emit: impl FnMut(&[u8], f64),
) {
    for (e, &(a, b)) in graph.edges().iter().enumerate() {
        for (to, from) in [(a, b), (b, a)] {
            if s[from] == 0 {
                continue;
            }
            buf.copy_from_slice(s);
            buf[from] -= 1;
            buf[to] += 1;
            emit(buf, j_edges[e] * (f64::from(s[to] + 1) * f64::from(s[from])).sqrt());
        }
    }
}

pub fn build_bose_hubbard(
    params: &BoseHubbardParams,
    graph: &ConnectivityGraph,
    basis: &FockBasis,
) -> Result<SymmetricMatrix> {
    check_basis(graph, basis.n_sites())?;
    params.check(graph)?;
    let mut h = SymmetricMatrix::zeros(basis.len());
    let mut buf = vec![0u8; basis.n_sites()];
    for (k, s) in basis.iter().enumerate() {
        h.set(k, k, bh_diagonal(params, s));
        for_each_hop(s, graph, &params.j_edges, &mut buf, |t, amp| {
            let target = basis.index_of(t).expect("hop stays in sector");
            h.set(target, k, amp);
        });
    }
    Ok(h)
}

/// Bose-Hubbard Hamiltonian with counter-rotating pair terms, projected onto
/// the extended basis. Frequencies should be absolute: the pair terms couple
/// sectors whose separation is `2 omega`.
pub fn build_bh_with_cr(
    params: &BoseHubbardParams,
    graph: &ConnectivityGraph,
    ext: &ExtendedBasis,
) -> Result<SymmetricMatrix> {
    check_basis(graph, ext.core().n_sites())?;
    params.check(graph)?;
    let mut h = SymmetricMatrix::zeros(ext.len());
    let mut buf = vec![0u8; graph.n_sites()];
    for k in 0..ext.len() {
        let s = ext.state(k).to_vec();
        h.set(k, k, bh_diagonal(params, &s));
        for_each_hop(&s, graph, &params.j_edges, &mut buf, |t, amp| {
            if let Some(target) = ext.index_of(t) {
                h.set(target, k, amp);
            }
        });
        for (e, &(a, b)) in graph.edges().iter().enumerate() {
            let j = params.j_edges[e];
            buf.copy_from_slice(&s);
            buf[a] += 1;
            buf[b] += 1;
            if let Some(target) = ext.index_of(&buf) {
                h.set(target, k, j * (f64::from(s[a] + 1) * f64::from(s[b] + 1)).sqrt());
            }
            if s[a] > 0 && s[b] > 0 {
                buf.copy_from_slice(&s);
                buf[a] -= 1;
                buf[b] -= 1;
                if let Some(target) = ext.index_of(&buf) {
                    h.set(target, k, j * (f64::from(s[a]) * f64::from(s[b])).sqrt());
                }
            }
        }
    }
    Ok(h)
}

/// Coupled qubit array in the product basis of single-qubit eigenstates,
/// keeping number-conserving hops: `|u_i, v_j> -> |u_i + 1, v_j - 1>` with
/// amplitude `K <u+1|N_i|u> <v-1|N_j|v>` along every edge, in both
/// directions. Site energies are measured from each qubit's ground state.
pub fn build_coupled_array(
    spectra: &[QubitSpectrum],
    k: f64,
    graph: &ConnectivityGraph,
    basis: &FockBasis,
) -> Result<SymmetricMatrix> {
    check_basis(graph, basis.n_sites())?;
    if spectra.len() != basis.n_sites() {
        return Err(Error::Input(format!(
            "{} qubit spectra for {} sites",
            spectra.len(),
            basis.n_sites()
        )));
    }
    let need = basis.n_exc() + 1;
    if let Some((i, s)) = spectra.iter().enumerate().find(|(_, s)| s.n_levels() < need) {
        return Err(Error::Input(format!(
            "site {i} provides {} levels, sector needs {need}",
            s.n_levels()
        )));
    }
    let mut h = SymmetricMatrix::zeros(basis.len());
    let mut buf = vec![0u8; basis.n_sites()];
    for (idx, s) in basis.iter().enumerate() {
        let diag: f64 = s
            .iter()
            .enumerate()
            .map(|(i, &u)| spectra[i].levels[u as usize] - spectra[i].levels[0])
            .sum();
        h.set(idx, idx, diag);
        for &(a, b) in graph.edges() {
            for (to, from) in [(a, b), (b, a)] {
                if s[from] == 0 {
                    continue;
                }
                let (u, v) = (s[to] as usize, s[from] as usize);
                let g = spectra[to].charge(u + 1, u) * spectra[from].charge(v - 1, v);
                buf.copy_from_slice(s);
                buf[from] -= 1;
                buf[to] += 1;
                let target = basis.index_of(&buf).expect("hop stays in sector");
                h.set(target, idx, k * g);
            }
        }
    }
    Ok(h)
}

/// Per-state signs `(-1)^(sum of occupations on one side of a bipartition)`.
/// Conjugating a Bose-Hubbard matrix by these signs flips every hopping,
/// which is how the `U -> -U` spectral identity is checked exactly.
pub fn bipartite_signs(states: impl Iterator<Item = impl AsRef<[u8]>>, side: &[bool]) -> Vec<f64> {
    states
        .map(|s| {
            let odd: u32 = s
                .as_ref()
                .iter()
                .zip(side)
                .filter(|(_, &b)| b)
                .map(|(&n, _)| u32::from(n))
                .sum();
            if odd.is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        })
        .collect()
}
