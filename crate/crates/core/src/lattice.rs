//! Array connectivity graphs.
//!
//! Sites are 0-indexed. Each graph also carries a two-type labeling used to
//! build alternating arrays: by index parity for chains and surface-7, and by
//! `(row + col)` parity (checkerboard) for rectangular grids.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityGraph {
    n_sites: usize,
    /// Edges as `(i, j)` with `i < j`, in construction order.
    edges: Vec<(usize, usize)>,
    /// `false` = type A, `true` = type B.
    alternation: Vec<bool>,
}

impl ConnectivityGraph {
    pub fn linear_chain(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(domain(format!("a chain needs at least 2 sites, got {m}")));
        }
        Self::from_edge_list(m, &(0..m - 1).map(|i| (i, i + 1)).collect::<Vec<_>>())
    }

    /// Seven-site chain with the middle site also coupled to both ends.
    pub fn surface7() -> Self {
        let mut edges: Vec<(usize, usize)> = (0..6).map(|i| (i, i + 1)).collect();
        edges.extend([(3, 0), (3, 6)]);
        Self::from_edge_list(7, &edges).expect("surface-7 layout is valid")
    }

    /// Row-major `rows x cols` lattice with nearest-neighbor edges.
    pub fn grid(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols < 2 {
            return Err(domain(format!("degenerate grid {rows}x{cols}")));
        }
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let i = r * cols + c;
                if c + 1 < cols {
                    edges.push((i, i + 1));
                }
                if r + 1 < rows {
                    edges.push((i, i + cols));
                }
            }
        }
        let mut g = Self::from_edge_list(rows * cols, &edges)?;
        g.alternation = (0..rows * cols).map(|i| (i / cols + i % cols) % 2 == 1).collect();
        Ok(g)
    }

    /// Validated custom graph: no self-loops, no duplicates, connected.
    pub fn from_edge_list(m: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let g = Self::from_edges_allow_disconnected(m, edges)?;
        if !g.is_connected() {
            return Err(Error::Input(format!(
                "graph on {m} sites with edges {edges:?} is disconnected"
            )));
        }
        Ok(g)
    }

    /// Like [`Self::from_edge_list`] but without the connectivity check, for
    /// reachability studies on partial graphs.
    pub fn from_edges_allow_disconnected(m: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if m == 0 {
            return Err(domain("graph needs at least one site"));
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= m || b >= m {
                return Err(Error::Input(format!("edge ({a}, {b}) out of range for {m} sites")));
            }
            if a == b {
                return Err(Error::Input(format!("self-loop at site {a}")));
            }
            let e = (a.min(b), a.max(b));
            if normalized.contains(&e) {
                return Err(Error::Input(format!("duplicate edge ({a}, {b})")));
            }
            normalized.push(e);
        }
        Ok(Self {
            n_sites: m,
            edges: normalized,
            alternation: (0..m).map(|i| i % 2 == 1).collect(),
        })
    }

    /// Replaces the two-type labeling used for alternating arrays.
    pub fn with_alternation(mut self, labels: Vec<bool>) -> Result<Self> {
        if labels.len() != self.n_sites {
            return Err(Error::Input(format!(
                "{} alternation labels for {} sites",
                labels.len(),
                self.n_sites
            )));
        }
        self.alternation = labels;
        Ok(self)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn alternation(&self) -> &[bool] {
        &self.alternation
    }

    pub fn degree(&self, site: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == site || b == site).count()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n_sites];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(s) = stack.pop() {
            for &(a, b) in &self.edges {
                let other = if a == s {
                    b
                } else if b == s {
                    a
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    /// Two-coloring with site 0 on side `false`, or `None` if the graph has
    /// an odd cycle.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut color: Vec<Option<bool>> = vec![None; self.n_sites];
        for start in 0..self.n_sites {
            if color[start].is_some() {
                continue;
            }
            color[start] = Some(false);
            let mut stack = vec![start];
            while let Some(s) = stack.pop() {
                let cs = color[s].unwrap();
                for &(a, b) in &self.edges {
                    let other = if a == s {
                        b
                    } else if b == s {
                        a
                    } else {
                        continue;
                    };
                    match color[other] {
                        None => {
                            color[other] = Some(!cs);
                            stack.push(other);
                        }
                        Some(c) if c == cs => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(color.into_iter().map(Option::unwrap).collect())
    }

    pub fn without_edge(&self, a: usize, b: usize) -> Self {
        let e = (a.min(b), a.max(b));
        Self {
            n_sites: self.n_sites,
            edges: self.edges.iter().copied().filter(|&x| x != e).collect(),
            alternation: self.alternation.clone(),
        }
    }
}
