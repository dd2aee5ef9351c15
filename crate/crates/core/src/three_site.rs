//! Three sites, two excitations: level repulsion between `|200>` and `|002>`.
//!
//! The lateral sites are identical (frequency `omega`, interaction `-U`); the
//! central site is detuned by `delta_omega` and has interaction `U_C`. With
//! `2 omega` subtracted, the Hamiltonian in the basis
//! `{200, 110, 101, 020, 011, 002}` is a 6x6 matrix whose two lateral
//! doubly-occupied states are degenerate at `-U` and split only at fourth
//! order in `J`.

use serde::{Deserialize, Serialize};

use crate::eigensolve::eig_symmetric;
use crate::error::{domain, Error, Result};
use crate::matrix::SymmetricMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeSiteParams {
    /// Magnitude of the lateral interaction (lateral anharmonicity `-U`).
    pub u: f64,
    pub u_c: f64,
    pub delta_omega: f64,
    pub j: f64,
}

impl ThreeSiteParams {
    pub fn new(u: f64, u_c: f64, delta_omega: f64, j: f64) -> Result<Self> {
        if !(u > 0.0) || !(j >= 0.0) || !u_c.is_finite() || !delta_omega.is_finite() {
            return Err(domain(format!(
                "three-site parameters need U > 0, J >= 0 and finite values: U = {u}, U_C = {u_c}, dw = {delta_omega}, J = {j}"
            )));
        }
        Ok(Self { u, u_c, delta_omega, j })
    }

    /// `U_C / U`: `-1` for a uniform transmon chain, `+1` for the
    /// sign-alternating chain with matched magnitudes.
    pub fn eta(&self) -> f64 {
        self.u_c / self.u
    }

    pub fn with_eta(self, eta: f64) -> Self {
        Self {
            u_c: eta * self.u,
            ..self
        }
    }

    pub fn with_j(self, j: f64) -> Self {
        Self { j, ..self }
    }
}

pub fn build_three_site_matrix(p: &ThreeSiteParams) -> SymmetricMatrix {
    let s = 2f64.sqrt() * p.j;
    let (u, dw, j) = (p.u, p.delta_omega, p.j);
    let mut h = SymmetricMatrix::from_diagonal(&[-u, dw, 0.0, p.u_c + 2.0 * dw, dw, -u]);
    h.set(1, 0, s);
    h.set(2, 1, j);
    h.set(3, 1, s);
    h.set(4, 2, j);
    h.set(4, 3, s);
    h.set(5, 4, s);
    h
}

/// Leading-order splitting of the `|200>`, `|002>` pair:
/// `4 J^4 / (U^3 (1 + dw/U)^2) * |1 + 2 / (1 + eta + 2 dw/U)|`.
pub fn analytic_splitting(p: &ThreeSiteParams) -> Result<f64> {
    let x = p.delta_omega / p.u;
    let central = 1.0 + p.eta() + 2.0 * x;
    if central.abs() < 1e-6 {
        return Err(Error::Singular(format!("1 + eta + 2 dw/U = {central:e}")));
    }
    if (1.0 + x).abs() < 1e-6 {
        return Err(Error::Singular(format!("1 + dw/U = {:e}", 1.0 + x)));
    }
    let smallest_gap = p.u.min((p.u + p.delta_omega).abs()).min((p.u * central).abs());
    if p.j / smallest_gap > 0.05 {
        log::warn!(
            "J / (smallest intermediate detuning) = {:.3}; the fourth-order splitting is unreliable",
            p.j / smallest_gap
        );
    }
    Ok(4.0 * p.j.powi(4) / (p.u.powi(3) * (1.0 + x).powi(2)) * (1.0 + 2.0 / central).abs())
}

/// Low-disorder ratio of the alternating to the uniform splitting,
/// `|dw| / U * (3 + eta) / (1 + eta)`.
pub fn suppression_ratio(delta_omega_over_u: f64, eta: f64) -> f64 {
    delta_omega_over_u.abs() * (3.0 + eta) / (1.0 + eta)
}

/// Splitting ratio for a uniform chain whose central anharmonicity deviates
/// by `dU` (`eta = -1 + dU / U`): `|1 + dU / (2 dw)|^-1`.
pub fn anharmonicity_deviation_ratio(delta_u: f64, delta_omega: f64) -> f64 {
    1.0 / (1.0 + delta_u / (2.0 * delta_omega)).abs()
}

/// Gap between the two eigenvalues of the exact 6x6 spectrum closest to `-U`.
pub fn numeric_splitting(p: &ThreeSiteParams) -> Result<f64> {
    let ev = eig_symmetric(&build_three_site_matrix(p), false)?.eigenvalues;
    let mut by_distance: Vec<(f64, f64)> = ev.iter().map(|&e| ((e + p.u).abs(), e)).collect();
    by_distance.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (d2, d3) = (by_distance[1].0, by_distance[2].0);
    if d3 - d2 <= 0.1 * d2 {
        return Err(Error::Identification(format!(
            "third level at distance {d3:e} from -U is within 10% of the pair's {d2:e}"
        )));
    }
    Ok((by_distance[0].1 - by_distance[1].1).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_basis::FockBasis;
    use crate::hamiltonian::{build_bose_hubbard, BoseHubbardParams};
    use crate::lattice::ConnectivityGraph;
    use crate::optimize::polyfit;
    use crate::rng::substream_rng;
    use rand::Rng;

    fn det4(m: &[[f64; 4]; 4]) -> f64 {
        let minor = |skip: usize| -> f64 {
            let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
            let a = |r: usize, c: usize| m[r][cols[c]];
            a(1, 0) * (a(2, 1) * a(3, 2) - a(2, 2) * a(3, 1)) - a(1, 1) * (a(2, 0) * a(3, 2) - a(2, 2) * a(3, 0))
                + a(1, 2) * (a(2, 0) * a(3, 1) - a(2, 1) * a(3, 0))
        };
        (0..4)
            .map(|c| if c % 2 == 0 { 1.0 } else { -1.0 } * m[0][c] * minor(c))
            .sum()
    }

    /// Roots of the reflection-symmetric quartic factor by bracketing and
    /// bisection, and of the antisymmetric quadratic factor in closed form.
    fn polynomial_roots(p: &ThreeSiteParams) -> Vec<f64> {
        let (u, dw, j) = (p.u, p.delta_omega, p.j);
        let s = 2f64.sqrt() * j;
        let block = [
            [-u, s, 0.0, 0.0],
            [s, dw, s, 2.0 * j],
            [0.0, s, 0.0, 0.0],
            [0.0, 2.0 * j, 0.0, p.u_c + 2.0 * dw],
        ];
        let char_poly = |lambda: f64| {
            let mut m = block;
            (0..4).for_each(|i| m[i][i] -= lambda);
            det4(&m)
        };
        let bound = 2.0 * (u.abs() + dw.abs() + p.u_c.abs() + 4.0 * j) + 1.0;
        let n = 200_000;
        let mut roots = Vec::new();
        let mut lo = -bound;
        let mut flo = char_poly(lo);
        for k in 1..=n {
            let hi = -bound + 2.0 * bound * k as f64 / n as f64;
            let fhi = char_poly(hi);
            if flo == 0.0 {
                roots.push(lo);
            } else if flo * fhi < 0.0 {
                let (mut a, mut b, mut fa) = (lo, hi, flo);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    let fm = char_poly(mid);
                    if fm * fa <= 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                        fa = fm;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            lo = hi;
            flo = fhi;
        }
        // Antisymmetric block [[-U, sqrt2 J], [sqrt2 J, dw]].
        let (mean, half) = (0.5 * (dw - u), 0.5 * (dw + u));
        let r = (half * half + 2.0 * j * j).sqrt();
        roots.extend([mean - r, mean + r]);
        roots.sort_by(f64::total_cmp);
        roots
    }

    #[test]
    fn matrix_entries() {
        let p = ThreeSiteParams::new(1.0, 0.8, 0.1, 0.0).unwrap();
        let h = build_three_site_matrix(&p);
        assert_eq!(h, SymmetricMatrix::from_diagonal(&[-1.0, 0.1, 0.0, 1.0, 0.1, -1.0]));
        let h = build_three_site_matrix(&p.with_j(0.03));
        assert_eq!(h.get(0, 1), 2f64.sqrt() * 0.03);
        assert_eq!(h.get(1, 2), 0.03);
        assert_eq!(h.get(3, 4), 2f64.sqrt() * 0.03);
        assert_eq!(h.get(2, 3), 0.0);
        assert_eq!(h.get(0, 5), 0.0);
    }

    #[test]
    fn matches_bose_hubbard_builder() {
        let p = ThreeSiteParams::new(1.0, -0.6, 0.07, 0.02).unwrap();
        let g = ConnectivityGraph::linear_chain(3).unwrap();
        let bh = BoseHubbardParams {
            omega01: vec![0.0, p.delta_omega, 0.0],
            u: vec![-p.u, p.u_c, -p.u],
            j_edges: vec![p.j; 2],
        };
        let want = build_bose_hubbard(&bh, &g, &FockBasis::enumerate(3, 2).unwrap()).unwrap();
        assert_eq!(build_three_site_matrix(&p), want);
    }

    #[test]
    fn eigenvalues_match_factorized_polynomial() {
        let p = ThreeSiteParams::new(1.0, 1.0, 0.1, 0.01).unwrap();
        let ev = eig_symmetric(&build_three_site_matrix(&p), false).unwrap().eigenvalues;
        let roots = polynomial_roots(&p);
        assert_eq!(roots.len(), 6);
        for (a, b) in ev.iter().zip(&roots) {
            assert!((a - b).abs() < 1e-10, "{ev:?} vs {roots:?}");
        }
    }

    #[test]
    fn analytic_example() {
        let p = ThreeSiteParams::new(1.0, 1.0, 0.1, 0.01).unwrap();
        let a = analytic_splitting(&p).unwrap();
        let want = 4e-8 / 1.21 * (1.0 + 2.0 / 2.2);
        assert!((a - want).abs() < 1e-20);
        assert!((a - 6.31e-8).abs() / 6.31e-8 < 1e-3, "{a}");
        let n = numeric_splitting(&p).unwrap();
        assert!((n - a).abs() / a < 0.1, "{n} vs {a}");
    }

    #[test]
    fn uniform_chain_diverges_at_zero_detuning() {
        let base = ThreeSiteParams::new(1.0, -1.0, 0.0, 0.001).unwrap();
        let small = analytic_splitting(&ThreeSiteParams {
            delta_omega: 1e-3,
            ..base
        })
        .unwrap();
        let smaller = analytic_splitting(&ThreeSiteParams {
            delta_omega: 1e-4,
            ..base
        })
        .unwrap();
        assert!((smaller / small - 10.0).abs() < 0.1, "{}", smaller / small);
        assert!(matches!(analytic_splitting(&base), Err(Error::Singular(_))));
    }

    #[test]
    fn suppression_example() {
        assert!((suppression_ratio(0.1, 1.0) - 0.2).abs() < 1e-15);
        for x in [0.01, 0.02, 0.05] {
            for eta in [0.5, 1.0, 1.5, 2.0] {
                let p = ThreeSiteParams::new(1.0, 0.0, x, 1e-3).unwrap();
                let ratio =
                    analytic_splitting(&p.with_eta(eta)).unwrap() / analytic_splitting(&p.with_eta(-1.0)).unwrap();
                let d3 = suppression_ratio(x, eta);
                assert!((ratio - d3).abs() / d3 <= 2.0 * x, "x {x} eta {eta}: {ratio} vs {d3}");
            }
        }
        // Monotone decrease with eta.
        let r: Vec<f64> = [0.5, 1.0, 1.5, 2.0]
            .iter()
            .map(|&e| suppression_ratio(0.05, e))
            .collect();
        assert!(r.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn j_to_the_fourth() {
        let p = ThreeSiteParams::new(1.0, 1.0, 0.1, 0.0).unwrap();
        let js: Vec<f64> = (0..9).map(|k| 1e-3 * 10f64.powf(k as f64 / 8.0)).collect();
        let x: Vec<f64> = js.iter().map(|j| j.ln()).collect();
        let y: Vec<f64> = js
            .iter()
            .map(|&j| numeric_splitting(&p.with_j(j)).unwrap().ln())
            .collect();
        let slope = polyfit(&x, &y, 1).unwrap().coefficients[1];
        assert!((slope - 4.0).abs() < 0.05, "{slope}");
    }

    #[test]
    fn agreement_improves_as_j_decreases() {
        let p = ThreeSiteParams::new(1.0, 0.5, -0.2, 0.0).unwrap();
        let err = |j: f64| {
            let q = p.with_j(j);
            ((numeric_splitting(&q).unwrap() - analytic_splitting(&q).unwrap()) / analytic_splitting(&q).unwrap()).abs()
        };
        let errs: Vec<f64> = [1e-2, 5e-3, 2e-3].iter().map(|&j| err(j)).collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    }

    #[test]
    fn random_non_resonant_sample() {
        let mut rng = substream_rng(2024, 0, 0);
        let mut checked = 0;
        while checked < 100 {
            let dw: f64 = rng.random_range(-0.5..0.5);
            let eta: f64 = rng.random_range(-1.0..2.0);
            let j = 10f64.powf(rng.random_range(-3.0..-2.0));
            if (1.0 + dw).abs() < 0.2 || (1.0 + eta + 2.0 * dw).abs() < 0.2 {
                continue;
            }
            let p = ThreeSiteParams::new(1.0, eta, dw, j).unwrap();
            let (a, n) = (analytic_splitting(&p).unwrap(), numeric_splitting(&p).unwrap());
            assert!((n - a).abs() / a < 0.1, "{p:?}: {n} vs {a}");
            checked += 1;
        }
    }

    #[test]
    fn anharmonicity_deviation() {
        let (dw, du, j) = (0.0025, 0.05, 2.5e-4);
        let base = ThreeSiteParams::new(1.0, -1.0, dw, j).unwrap();
        let uniform = numeric_splitting(&base).unwrap();
        let perturbed = numeric_splitting(&base.with_eta(-1.0 + du)).unwrap();
        let want = anharmonicity_deviation_ratio(du, dw);
        assert!(
            (perturbed / uniform - want).abs() / want < 0.1,
            "{} vs {want}",
            perturbed / uniform
        );
    }

    #[test]
    fn ambiguous_identification() {
        // The central doubly occupied level, tuned to cross one member of
        // the pair, sits as far from -U as the pair itself.
        let p = ThreeSiteParams::new(1.0, -1.1994545, 0.1, 0.01).unwrap();
        assert!(matches!(numeric_splitting(&p), Err(Error::Identification(_))));
    }

    #[test]
    fn invalid_params() {
        assert!(ThreeSiteParams::new(0.0, 1.0, 0.1, 0.01).is_err());
        assert!(ThreeSiteParams::new(1.0, 1.0, 0.1, -0.01).is_err());
    }
}
