//! Occupation-number bases for fixed-excitation sectors.
//!
//! States are occupation vectors `(n_0, .., n_{M-1})` with a fixed total,
//! ordered lexicographically descending, so for three sites and two
//! excitations the order is `200, 110, 101, 020, 011, 002`. Lookup ranks a
//! vector combinatorially instead of hashing it.

use crate::error::{domain, Error, Result};
use crate::lattice::ConnectivityGraph;

pub const DEFAULT_DIMENSION_CAP: u64 = 50_000;

/// `binomial(n + m - 1, n)`: number of ways to place `n` bosons on `m` sites.
pub fn sector_dimension(m: usize, n_exc: usize) -> Option<u64> {
    if m == 0 {
        return Some(u64::from(n_exc == 0));
    }
    binomial((n_exc + m - 1) as u64, n_exc as u64)
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    Some(acc as u64)
}

/// Number of (state, edge, pair-term) transitions out of the `n_exc` sector of
/// an `m`-site chain under `b_i^dag b_j^dag + b_i b_j`: every state can
/// be raised on every edge, and lowered wherever both ends are occupied.
pub fn extended_dimension_closed_form(m: usize, n_exc: usize) -> Result<u64> {
    if m < 2 || n_exc < 2 {
        return Err(domain(format!(
            "closed form needs M >= 2 and N >= 2, got M = {m}, N = {n_exc}"
        )));
    }
    if m == 2 {
        return Ok(2 * n_exc as u64);
    }
    let overflow = || Error::Size {
        what: "extended-basis closed form".into(),
        dim: u64::MAX,
        cap: u64::MAX,
    };
    let d = u128::from(sector_dimension(m, n_exc).ok_or_else(overflow)?);
    let d2 = u128::from(sector_dimension(m - 2, n_exc - 2).ok_or_else(overflow)?);
    let (mm, nn) = (m as u128, n_exc as u128);
    let lowered = (nn + mm - 4) * (nn + mm - 3) * d2;
    // Exact: (M - 2) always divides the product above.
    debug_assert_eq!(lowered % (mm - 2), 0);
    let total = (mm - 1) * d + lowered / (mm - 2);
    u64::try_from(total).map_err(|_| overflow())
}

#[derive(Debug, Clone)]
pub struct FockBasis {
    m: usize,
    n_exc: usize,
    /// Flattened row-major `len x m` occupations.
    states: Vec<u8>,
    /// `skip[i][r][n]`: number of states placed before a vector whose site
    /// `i` holds `n` of the `r` excitations remaining at that site.
    skip: Vec<Vec<Vec<u64>>>,
}

impl FockBasis {
    pub fn enumerate(m: usize, n_exc: usize) -> Result<Self> {
        Self::enumerate_with_cap(m, n_exc, DEFAULT_DIMENSION_CAP)
    }

    pub fn enumerate_with_cap(m: usize, n_exc: usize, cap: u64) -> Result<Self> {
        if m == 0 {
            return Err(domain("a basis needs at least one site"));
        }
        if n_exc > u8::MAX as usize {
            return Err(domain(format!(
                "at most {} excitations supported, got {n_exc}",
                u8::MAX
            )));
        }
        let dim = sector_dimension(m, n_exc).unwrap_or(u64::MAX);
        if dim > cap {
            return Err(Error::Size {
                what: format!("sector M = {m}, N = {n_exc}"),
                dim,
                cap,
            });
        }
        let mut states = Vec::with_capacity(dim as usize * m);
        let mut current = vec![0u8; m];
        fill(&mut states, &mut current, 0, n_exc);
        debug_assert_eq!(states.len() as u64, dim * m as u64);

        let skip = (0..m)
            .map(|i| {
                let rest = m - i - 1;
                (0..=n_exc)
                    .map(|r| {
                        (0..=r)
                            .map(|n| (n + 1..=r).map(|k| sector_dimension(rest, r - k).unwrap()).sum())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(Self { m, n_exc, states, skip })
    }

    pub fn n_sites(&self) -> usize {
        self.m
    }

    pub fn n_exc(&self) -> usize {
        self.n_exc
    }

    pub fn len(&self) -> usize {
        self.states.len() / self.m
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    #[inline]
    pub fn state(&self, k: usize) -> &[u8] {
        &self.states[k * self.m..(k + 1) * self.m]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> {
        self.states.chunks_exact(self.m)
    }

    /// Position of an occupation vector, or `None` if it is not in the sector.
    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        if occ.len() != self.m || occ.iter().map(|&n| n as usize).sum::<usize>() != self.n_exc {
            return None;
        }
        let mut rank = 0u64;
        let mut remaining = self.n_exc;
        for (i, &n) in occ.iter().enumerate() {
            rank += self.skip[i][remaining][n as usize];
            remaining -= n as usize;
        }
        Some(rank as usize)
    }
}

fn fill(out: &mut Vec<u8>, current: &mut [u8], site: usize, remaining: usize) {
    if site + 1 == current.len() {
        current[site] = remaining as u8;
        out.extend_from_slice(current);
        return;
    }
    for n in (0..=remaining).rev() {
        current[site] = n as u8;
        fill(out, current, site + 1, remaining - n);
    }
    current[site] = 0;
}

/// Core sector plus the states of sectors `N +- 2` reachable from it by one
/// pair-creation `b_i^dag b_j^dag` or pair-annihilation `b_i b_j` along a
/// graph edge. Positions run over the core first, then the reachable raised
/// states, then the reachable lowered states, each in canonical order.
#[derive(Debug, Clone)]
pub struct ExtendedBasis {
    core: FockBasis,
    raised: FockBasis,
    lowered: Option<FockBasis>,
    raised_kept: Vec<usize>,
    lowered_kept: Vec<usize>,
    raised_pos: Vec<Option<u32>>,
    lowered_pos: Vec<Option<u32>>,
    transitions: u64,
}

impl ExtendedBasis {
    pub fn enumerate(core: FockBasis, graph: &ConnectivityGraph) -> Result<Self> {
        Self::enumerate_with_cap(core, graph, DEFAULT_DIMENSION_CAP)
    }

    pub fn enumerate_with_cap(core: FockBasis, graph: &ConnectivityGraph, cap: u64) -> Result<Self> {
        let m = core.n_sites();
        if graph.n_sites() != m {
            return Err(Error::Input(format!(
                "graph has {} sites, basis has {m}",
                graph.n_sites()
            )));
        }
        let n = core.n_exc();
        let raised = FockBasis::enumerate_with_cap(m, n + 2, cap.saturating_mul(16))?;
        let lowered = if n >= 2 {
            Some(FockBasis::enumerate_with_cap(m, n - 2, cap)?)
        } else {
            None
        };
        let mut raised_hit = vec![false; raised.len()];
        let mut lowered_hit = vec![false; lowered.as_ref().map_or(0, FockBasis::len)];
        let mut transitions = 0u64;
        let mut buf = vec![0u8; m];
        for s in core.iter() {
            for &(i, j) in graph.edges() {
                buf.copy_from_slice(s);
                buf[i] += 1;
                buf[j] += 1;
                raised_hit[raised.index_of(&buf).expect("raised state in sector")] = true;
                transitions += 1;
                if let Some(low) = &lowered {
                    if s[i] > 0 && s[j] > 0 {
                        buf.copy_from_slice(s);
                        buf[i] -= 1;
                        buf[j] -= 1;
                        lowered_hit[low.index_of(&buf).expect("lowered state in sector")] = true;
                        transitions += 1;
                    }
                }
            }
        }
        let raised_kept: Vec<usize> = (0..raised.len()).filter(|&k| raised_hit[k]).collect();
        let lowered_kept: Vec<usize> = (0..lowered_hit.len()).filter(|&k| lowered_hit[k]).collect();
        let total = (core.len() + raised_kept.len() + lowered_kept.len()) as u64;
        if total > cap {
            return Err(Error::Size {
                what: format!("extended basis M = {m}, N = {n}"),
                dim: total,
                cap,
            });
        }
        let mut raised_pos = vec![None; raised.len()];
        let base = core.len();
        for (p, &k) in raised_kept.iter().enumerate() {
            raised_pos[k] = Some((base + p) as u32);
        }
        let mut lowered_pos = vec![None; lowered_hit.len()];
        let base = core.len() + raised_kept.len();
        for (p, &k) in lowered_kept.iter().enumerate() {
            lowered_pos[k] = Some((base + p) as u32);
        }
        Ok(Self {
            core,
            raised,
            lowered,
            raised_kept,
            lowered_kept,
            raised_pos,
            lowered_pos,
            transitions,
        })
    }

    pub fn core(&self) -> &FockBasis {
        &self.core
    }

    pub fn len(&self) -> usize {
        self.core.len() + self.extra_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of distinct states outside the core sector.
    pub fn extra_len(&self) -> usize {
        self.raised_kept.len() + self.lowered_kept.len()
    }

    pub fn raised_len(&self) -> usize {
        self.raised_kept.len()
    }

    pub fn lowered_len(&self) -> usize {
        self.lowered_kept.len()
    }

    /// Nonzero pair-term transitions out of the core, counted with
    /// multiplicity (one per state, edge and direction).
    pub fn transition_count(&self) -> u64 {
        self.transitions
    }

    pub fn state(&self, k: usize) -> &[u8] {
        let c = self.core.len();
        let r = self.raised_kept.len();
        if k < c {
            self.core.state(k)
        } else if k < c + r {
            self.raised.state(self.raised_kept[k - c])
        } else {
            self.lowered
                .as_ref()
                .expect("lowered sector present")
                .state(self.lowered_kept[k - c - r])
        }
    }

    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        let total: usize = occ.iter().map(|&n| n as usize).sum();
        let n = self.core.n_exc();
        if total == n {
            self.core.index_of(occ)
        } else if total == n + 2 {
            self.raised
                .index_of(occ)
                .and_then(|k| self.raised_pos[k])
                .map(|p| p as usize)
        } else if n >= 2 && total == n - 2 {
            let low = self.lowered.as_ref()?;
            low.index_of(occ).and_then(|k| self.lowered_pos[k]).map(|p| p as usize)
        } else {
            None
        }
    }

    /// Total occupation of every basis state, in basis order.
    pub fn occupation_labels(&self) -> Vec<usize> {
        let n = self.core.n_exc();
        let mut labels = vec![n; self.core.len()];
        labels.extend(std::iter::repeat_n(n + 2, self.raised_kept.len()));
        labels.extend(std::iter::repeat_n(n.saturating_sub(2), self.lowered_kept.len()));
        labels
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn chain(m: usize) -> ConnectivityGraph {
        ConnectivityGraph::linear_chain(m).unwrap()
    }

    #[test]
    fn three_site_order() {
        let b = FockBasis::enumerate(3, 2).unwrap();
        let got: Vec<Vec<u8>> = b.iter().map(<[u8]>::to_vec).collect();
        let want = vec![
            vec![2, 0, 0],
            vec![1, 1, 0],
            vec![1, 0, 1],
            vec![0, 2, 0],
            vec![0, 1, 1],
            vec![0, 0, 2],
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn sector_sizes() {
        assert_eq!(FockBasis::enumerate(10, 4).unwrap().len(), 715);
        assert_eq!(FockBasis::enumerate(10, 5).unwrap().len(), 2002);
        assert_eq!(FockBasis::enumerate(4, 0).unwrap().len(), 1);
        assert_eq!(FockBasis::enumerate(1, 3).unwrap().len(), 1);
    }

    #[test]
    fn size_cap() {
        assert!(matches!(FockBasis::enumerate(30, 10), Err(Error::Size { .. })));
        assert!(FockBasis::enumerate_with_cap(10, 4, 700).is_err());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(extended_dimension_closed_form(10, 4).unwrap(), 6930);
        assert_eq!(extended_dimension_closed_form(2, 3).unwrap(), 6);
        assert!(extended_dimension_closed_form(5, 1).is_err());
    }

    /// Every state reached by one pair term on some edge, by brute force over
    /// all occupation vectors of the neighboring sectors.
    fn brute_force_reachable(m: usize, n: usize, edges: &[(usize, usize)]) -> (BTreeSet<Vec<u8>>, u64) {
        let core = FockBasis::enumerate(m, n).unwrap();
        let mut reached = BTreeSet::new();
        let mut transitions = 0;
        for s in core.iter() {
            for &(i, j) in edges {
                let mut up = s.to_vec();
                up[i] += 1;
                up[j] += 1;
                reached.insert(up);
                transitions += 1;
                if s[i] > 0 && s[j] > 0 {
                    let mut down = s.to_vec();
                    down[i] -= 1;
                    down[j] -= 1;
                    reached.insert(down);
                    transitions += 1;
                }
            }
        }
        (reached, transitions)
    }

    #[test]
    fn extended_chain_ten_four() {
        let ext = ExtendedBasis::enumerate(FockBasis::enumerate(10, 4).unwrap(), &chain(10)).unwrap();
        assert_eq!(ext.transition_count(), 6930);
        assert_eq!(ext.raised_len(), 3875);
        assert_eq!(ext.lowered_len(), 55);
        assert_eq!(ext.len(), 715 + 3930);
    }

    #[test]
    fn extended_matches_brute_force() {
        for (m, n) in [(4, 2), (5, 2), (3, 3), (6, 4)] {
            let g = chain(m);
            let ext = ExtendedBasis::enumerate(FockBasis::enumerate(m, n).unwrap(), &g).unwrap();
            let (reached, transitions) = brute_force_reachable(m, n, g.edges());
            assert_eq!(ext.extra_len(), reached.len());
            assert_eq!(ext.transition_count(), transitions);
            assert_eq!(ext.transition_count(), extended_dimension_closed_form(m, n).unwrap());
            let got: BTreeSet<Vec<u8>> = (ext.core().len()..ext.len()).map(|k| ext.state(k).to_vec()).collect();
            assert_eq!(got, reached);
        }
    }

    #[test]
    fn partial_graph_reachability() {
        let g = ConnectivityGraph::from_edges_allow_disconnected(3, &[(0, 1)]).unwrap();
        let ext = ExtendedBasis::enumerate(FockBasis::enumerate(3, 2).unwrap(), &g).unwrap();
        let (reached, _) = brute_force_reachable(3, 2, g.edges());
        assert_eq!(ext.extra_len(), reached.len());
        // Raised states keep site 2's core occupation: 4 excitations with
        // n_2 = 2 would need a pair term touching site 2.
        for k in ext.core().len()..ext.core().len() + ext.raised_len() {
            let s = ext.state(k);
            assert!(s[0] >= 1 && s[1] >= 1, "{s:?}");
        }
        assert!(ext.index_of(&[0, 0, 4]).is_none());
        assert!(ext.index_of(&[0, 2, 2]).is_none());
        assert!(ext.index_of(&[1, 1, 2]).is_some());
    }

    #[test]
    fn extended_labels_and_lookup() {
        let g = chain(4);
        let ext = ExtendedBasis::enumerate(FockBasis::enumerate(4, 2).unwrap(), &g).unwrap();
        let labels = ext.occupation_labels();
        assert_eq!(labels.len(), ext.len());
        for (k, &label) in labels.iter().enumerate() {
            let s = ext.state(k);
            assert_eq!(ext.index_of(s), Some(k));
            assert_eq!(label, s.iter().map(|&x| x as usize).sum::<usize>());
        }
        let zero_exc = [0u8; 4];
        assert_eq!(labels[ext.index_of(&zero_exc).unwrap()], 0);
    }

    #[test]
    fn single_excitation_has_no_lowered_branch() {
        let ext = ExtendedBasis::enumerate(FockBasis::enumerate(3, 1).unwrap(), &chain(3)).unwrap();
        assert_eq!(ext.lowered_len(), 0);
    }

    #[test]
    fn closed_form_counts_transitions_on_chains() {
        for m in 2..=8 {
            for n in 2..=5 {
                let ext = ExtendedBasis::enumerate(FockBasis::enumerate(m, n).unwrap(), &chain(m)).unwrap();
                assert_eq!(
                    ext.transition_count(),
                    extended_dimension_closed_form(m, n).unwrap(),
                    "M = {m}, N = {n}"
                );
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn dimension_is_binomial(m in 1usize..12, n in 0usize..9) {
            prop_assume!(sector_dimension(m, n).unwrap() <= DEFAULT_DIMENSION_CAP);
            let b = FockBasis::enumerate(m, n).unwrap();
            prop_assert_eq!(b.len() as u64, sector_dimension(m, n).unwrap());
            let distinct: BTreeSet<&[u8]> = b.iter().collect();
            prop_assert_eq!(distinct.len(), b.len());
        }

        #[test]
        fn index_round_trip(m in 1usize..8, n in 0usize..6) {
            let b = FockBasis::enumerate(m, n).unwrap();
            for k in 0..b.len() {
                prop_assert_eq!(b.index_of(b.state(k)), Some(k));
                prop_assert_eq!(b.state(k).iter().map(|&x| x as usize).sum::<usize>(), n);
            }
            for w in b.states.chunks_exact(m).collect::<Vec<_>>().windows(2) {
                prop_assert!(w[0] > w[1]);
            }
        }
    }
}
