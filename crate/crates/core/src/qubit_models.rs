//! Single-qubit charge-basis models: transmons and capacitively shunted flux
//! qubits (CSFQs) at the half-flux sweet spot.
//!
//! Both Hamiltonians are written in the charge basis `|n>`, `n = -n_cut..=n_cut`,
//! where `cos(phi)` couples `n` and `n +- 1` and `cos(2 phi)` couples `n` and
//! `n +- 2`. All energies are frequencies `E/h` in GHz.

use serde::{Deserialize, Serialize};

use crate::eigensolve::eig_symmetric;
use crate::error::{domain, Error, Result};
use crate::matrix::SymmetricMatrix;

pub const DEFAULT_N_CUT: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmonSpec {
    pub e_c: f64,
    pub e_j_mean: f64,
    /// Gaussian standard deviation of `E_J` across disorder realizations.
    pub e_j_sigma: f64,
}

impl TransmonSpec {
    pub fn new(e_c: f64, e_j_mean: f64, e_j_sigma: f64) -> Result<Self> {
        let spec = Self {
            e_c,
            e_j_mean,
            e_j_sigma,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_c > 0.0) {
            return Err(domain(format!("transmon E_C must be positive, got {}", self.e_c)));
        }
        if !(self.e_j_mean > 0.0) {
            return Err(domain(format!("transmon E_J must be positive, got {}", self.e_j_mean)));
        }
        if !(self.e_j_sigma >= 0.0) {
            return Err(domain(format!(
                "transmon E_J spread must be non-negative, got {}",
                self.e_j_sigma
            )));
        }
        if self.e_j_mean / self.e_c <= 10.0 {
            log::warn!(
                "E_J/E_C = {:.2} is outside the transmon regime; weak-anharmonicity formulas will be poor",
                self.e_j_mean / self.e_c
            );
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsfqSpec {
    pub e_cf: f64,
    pub e_jf_mean: f64,
    pub e_jf_sigma: f64,
    /// Small-junction to large-junction Josephson energy ratio.
    pub alpha: f64,
    /// Permit `alpha <= 1/8` (non-positive anharmonicity), including the
    /// transmon-like limit `alpha = 0`.
    #[serde(default)]
    pub allow_nonpositive_u: bool,
}

impl CsfqSpec {
    pub fn new(e_cf: f64, e_jf_mean: f64, e_jf_sigma: f64, alpha: f64) -> Result<Self> {
        let spec = Self {
            e_cf,
            e_jf_mean,
            e_jf_sigma,
            alpha,
            allow_nonpositive_u: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_cf > 0.0) {
            return Err(domain(format!("CSFQ E_CF must be positive, got {}", self.e_cf)));
        }
        if !(self.e_jf_mean > 0.0) {
            return Err(domain(format!("CSFQ E_JF must be positive, got {}", self.e_jf_mean)));
        }
        if !(self.e_jf_sigma >= 0.0) {
            return Err(domain(format!(
                "CSFQ E_JF spread must be non-negative, got {}",
                self.e_jf_sigma
            )));
        }
        check_alpha(self.alpha, self.allow_nonpositive_u)
    }
}

fn check_alpha(alpha: f64, allow_nonpositive_u: bool) -> Result<()> {
    if !(0.0..0.5).contains(&alpha) || (alpha == 0.0 && !allow_nonpositive_u) {
        return Err(domain(format!("CSFQ alpha must lie in (0, 1/2), got {alpha}")));
    }
    if alpha <= 0.125 && !allow_nonpositive_u {
        return Err(domain(format!(
            "CSFQ alpha = {alpha} <= 1/8 gives non-positive anharmonicity; set the override to allow it"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitKind {
    Transmon,
    Csfq,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum QubitSpec {
    Transmon(TransmonSpec),
    Csfq(CsfqSpec),
}

/// Bose-Hubbard parameters of one site at leading order in `1/sqrt(A)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteMapping {
    pub a: f64,
    pub omega01: f64,
    pub u: f64,
}

impl QubitSpec {
    pub fn kind(&self) -> QubitKind {
        match self {
            QubitSpec::Transmon(_) => QubitKind::Transmon,
            QubitSpec::Csfq(_) => QubitKind::Csfq,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            QubitSpec::Transmon(t) => t.validate(),
            QubitSpec::Csfq(f) => f.validate(),
        }
    }

    pub fn josephson_mean(&self) -> f64 {
        match self {
            QubitSpec::Transmon(t) => t.e_j_mean,
            QubitSpec::Csfq(f) => f.e_jf_mean,
        }
    }

    pub fn josephson_sigma(&self) -> f64 {
        match self {
            QubitSpec::Transmon(t) => t.e_j_sigma,
            QubitSpec::Csfq(f) => f.e_jf_sigma,
        }
    }

    pub fn charge_hamiltonian(&self, e_j: f64, n_cut: usize) -> Result<SymmetricMatrix> {
        match self {
            QubitSpec::Transmon(t) => build_transmon_charge_hamiltonian(t, e_j, n_cut),
            QubitSpec::Csfq(f) => build_csfq_charge_hamiltonian(f, e_j, n_cut),
        }
    }

    /// Exact lowest `n_levels` levels and charge matrix elements at the
    /// given Josephson energy.
    pub fn spectrum(&self, e_j: f64, n_levels: usize, n_cut: usize) -> Result<QubitSpectrum> {
        qubit_spectrum(&self.charge_hamiltonian(e_j, n_cut)?, n_levels)
    }

    /// `(omega01, anharmonicity)` from exact diagonalization, eigenvalues only.
    pub fn exact_omega01_anharm(&self, e_j: f64, n_cut: usize) -> Result<(f64, f64)> {
        let ev = eig_symmetric(&self.charge_hamiltonian(e_j, n_cut)?, false)?.eigenvalues;
        Ok((ev[1] - ev[0], (ev[2] - ev[1]) - (ev[1] - ev[0])))
    }

    /// Leading-order Bose-Hubbard mapping (the transmon and CSFQ rows of the
    /// qubit-to-Bose-Hubbard parameter table).
    pub fn site_mapping(&self, e_j: f64) -> SiteMapping {
        match self {
            QubitSpec::Transmon(t) => SiteMapping {
                a: e_j / (8.0 * t.e_c),
                omega01: (8.0 * e_j * t.e_c).sqrt() - t.e_c,
                u: -t.e_c,
            },
            QubitSpec::Csfq(f) => {
                let s = 1.0 - 2.0 * f.alpha;
                SiteMapping {
                    a: s * e_j / (4.0 * f.e_cf),
                    omega01: (16.0 * s * e_j * f.e_cf).sqrt() - f.e_cf * (1.0 - 8.0 * f.alpha) / s,
                    u: f.e_cf * (8.0 * f.alpha - 1.0) / s,
                }
            }
        }
    }
}

fn check_cut(n_cut: usize) -> Result<()> {
    if n_cut == 0 {
        return Err(domain("charge cutoff must be at least 1"));
    }
    Ok(())
}

/// `4 E_C n^2 - (E_J / 2)(|n><n+1| + h.c.)`
pub fn build_transmon_charge_hamiltonian(spec: &TransmonSpec, e_j: f64, n_cut: usize) -> Result<SymmetricMatrix> {
    check_cut(n_cut)?;
    if !(spec.e_c > 0.0) {
        return Err(domain(format!("E_C must be positive, got {}", spec.e_c)));
    }
    if !(e_j >= 0.0) {
        return Err(domain(format!("E_J must be non-negative, got {e_j}")));
    }
    let dim = 2 * n_cut + 1;
    let mut h = SymmetricMatrix::zeros(dim);
    for k in 0..dim {
        let n = k as f64 - n_cut as f64;
        h.set(k, k, 4.0 * spec.e_c * n * n);
        if k + 1 < dim {
            h.set(k + 1, k, -0.5 * e_j);
        }
    }
    Ok(h)
}

/// `4 E_CF n^2 + E_JF(-2 cos phi + alpha cos 2phi)` in the charge basis.
pub fn build_csfq_charge_hamiltonian(spec: &CsfqSpec, e_jf: f64, n_cut: usize) -> Result<SymmetricMatrix> {
    check_cut(n_cut)?;
    check_alpha(spec.alpha, spec.allow_nonpositive_u)?;
    if !(spec.e_cf > 0.0) {
        return Err(domain(format!("E_CF must be positive, got {}", spec.e_cf)));
    }
    if !(e_jf >= 0.0) {
        return Err(domain(format!("E_JF must be non-negative, got {e_jf}")));
    }
    let dim = 2 * n_cut + 1;
    let mut h = SymmetricMatrix::zeros(dim);
    for k in 0..dim {
        let n = k as f64 - n_cut as f64;
        h.set(k, k, 4.0 * spec.e_cf * n * n);
        if k + 1 < dim {
            h.set(k + 1, k, -e_jf);
        }
        if k + 2 < dim {
            h.set(k + 2, k, 0.5 * spec.alpha * e_jf);
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitSpectrum {
    /// Lowest levels `E_0 < E_1 < ...`.
    pub levels: Vec<f64>,
    /// Row-major `<u|N|v>` over the retained levels.
    pub charge_elems: Vec<f64>,
    pub omega01: f64,
    pub anharm: f64,
}

impl QubitSpectrum {
    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    #[inline]
    pub fn charge(&self, u: usize, v: usize) -> f64 {
        self.charge_elems[u * self.levels.len() + v]
    }
}

/// Lowest `n_levels` eigenpairs of a charge-basis Hamiltonian of odd
/// dimension `2 n_cut + 1`, with charge matrix elements in that eigenbasis.
///
/// Eigenvector signs are fixed so that the largest-magnitude component is
/// positive (first such component on ties).
pub fn qubit_spectrum(h: &SymmetricMatrix, n_levels: usize) -> Result<QubitSpectrum> {
    let dim = h.dim();
    if dim.is_multiple_of(2) {
        return Err(Error::Input(format!(
            "charge-basis matrix must have odd dimension, got {dim}"
        )));
    }
    if n_levels < 3 || n_levels > dim {
        return Err(Error::Input(format!(
            "need 3 <= n_levels <= {dim} to define omega01 and the anharmonicity, got {n_levels}"
        )));
    }
    let n_cut = (dim - 1) / 2;
    let res = eig_symmetric(h, true)?;
    let mut vecs: Vec<Vec<f64>> = (0..n_levels)
        .map(|k| res.eigenvector(k).expect("vectors requested").to_vec())
        .collect();
    for v in &mut vecs {
        let mut best = 0;
        for (i, c) in v.iter().enumerate() {
            if c.abs() > v[best].abs() {
                best = i;
            }
        }
        if v[best] < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
    }
    let charges: Vec<f64> = (0..dim).map(|k| k as f64 - n_cut as f64).collect();
    let mut charge_elems = vec![0.0; n_levels * n_levels];
    for u in 0..n_levels {
        for w in 0..=u {
            let elem: f64 = (0..dim).map(|i| vecs[u][i] * charges[i] * vecs[w][i]).sum();
            charge_elems[u * n_levels + w] = elem;
            charge_elems[w * n_levels + u] = elem;
        }
    }
    let levels = res.eigenvalues[..n_levels].to_vec();
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Numerical(format!(
            "qubit levels not strictly ascending: {levels:?}"
        )));
    }
    let omega01 = levels[1] - levels[0];
    let anharm = (levels[2] - levels[1]) - omega01;
    Ok(QubitSpectrum {
        levels,
        charge_elems,
        omega01,
        anharm,
    })
}

/// Next-to-leading-order `(omega01, anharmonicity)` of a CSFQ, valid for
/// `E_JF (1 - 2 alpha) >> E_CF`.
pub fn csfq_nlo_omega01_anharm(e_cf: f64, e_jf: f64, alpha: f64) -> (f64, f64) {
    let s = 1.0 - 2.0 * alpha;
    let r = (1.0 - 8.0 * alpha) / s;
    let q = (1.0 - 32.0 * alpha) / s;
    let small = e_cf * (4.0 * e_cf / (e_jf * s)).sqrt();
    let omega = (16.0 * e_jf * s * e_cf).sqrt() - e_cf * r + small * (q / 8.0 - r * r / 4.0);
    let anharm = -e_cf * r + small * (q / 4.0 - 17.0 / 32.0 * r * r);
    (omega, anharm)
}

/// Closed-form weak-anharmonicity `(omega01, anharm)` at the qubit's mean
/// Josephson energy. Transmons use `alpha -> 0, E_CF -> E_C, E_JF -> E_J / 2`.
pub fn approx_omega01_anharm(spec: &QubitSpec) -> (f64, f64) {
    approx_omega01_anharm_at(spec, spec.josephson_mean())
}

pub fn approx_omega01_anharm_at(spec: &QubitSpec, e_j: f64) -> (f64, f64) {
    match spec {
        QubitSpec::Transmon(t) => csfq_nlo_omega01_anharm(t.e_c, 0.5 * e_j, 0.0),
        QubitSpec::Csfq(f) => csfq_nlo_omega01_anharm(f.e_cf, e_j, f.alpha),
    }
}

/// True when the lowest `n_levels` eigenvalues move by less than `1e-10`
/// (relative to the largest of them in magnitude) when the cutoff grows by 10.
pub fn spectrum_converged(spec: &QubitSpec, e_j: f64, n_levels: usize, n_cut: usize) -> Result<bool> {
    let a = eig_symmetric(&spec.charge_hamiltonian(e_j, n_cut)?, false)?.eigenvalues;
    let b = eig_symmetric(&spec.charge_hamiltonian(e_j, n_cut + 10)?, false)?.eigenvalues;
    let scale = a[..n_levels].iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
    Ok(a[..n_levels]
        .iter()
        .zip(&b[..n_levels])
        .all(|(x, y)| (x - y).abs() <= 1e-10 * scale))
}

/// What a CSFQ has to reproduce: mean frequency, its spread and `|A|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchTargets {
    pub omega01: f64,
    pub domega01: f64,
    pub abs_anharm: f64,
}

fn central_difference(f: impl Fn(f64) -> Result<f64>, x: f64, rel_step: f64) -> Result<f64> {
    let h = rel_step * x.abs().max(1e-12);
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

/// Targets from a transmon: exact `omega01` and `|A|` at the mean `E_J`, and
/// the frequency spread induced by `e_j_sigma` through `d omega01 / d E_J`.
pub fn transmon_targets(spec: &TransmonSpec, n_cut: usize) -> Result<MatchTargets> {
    let q = QubitSpec::Transmon(*spec);
    let (omega01, anharm) = q.exact_omega01_anharm(spec.e_j_mean, n_cut)?;
    let slope = central_difference(|e| Ok(q.exact_omega01_anharm(e, n_cut)?.0), spec.e_j_mean, 1e-6)?;
    Ok(MatchTargets {
        omega01,
        domega01: slope * spec.e_j_sigma,
        abs_anharm: anharm.abs(),
    })
}

#[derive(Debug, Clone)]
pub struct MatchOptions {
    pub rel_tol: f64,
    pub max_iterations: usize,
    pub fd_rel_step: f64,
    pub n_cut: usize,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-4,
            max_iterations: 60,
            fd_rel_step: 1e-6,
            n_cut: DEFAULT_N_CUT,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CsfqMatch {
    pub spec: CsfqSpec,
    pub iterations: usize,
    /// Relative residuals of `(omega01, |A|)` at the solution.
    pub residuals: [f64; 2],
    /// Analytic starting point `(E_JF, E_CF, delta E_JF)`.
    pub seed: (f64, f64, f64),
    /// Relative mismatch between the spread of `omega01` at `E_JF +- sigma`
    /// and the target spread.
    pub spread_mismatch: f64,
}

/// Finds `(E_JF, E_CF, delta E_JF)` of a CSFQ with the given `alpha` whose
/// exact `omega01`, `|A|` and frequency spread match the targets.
///
/// Damped Newton iteration in `(E_JF, E_CF)` with a central-difference
/// Jacobian, started from the leading-order inversion of the weak
/// anharmonicity formulas. The spread is mapped through the local slope
/// `d omega01 / d E_JF` at the solution.
pub fn match_csfq_parameters(targets: &MatchTargets, alpha: f64, opts: &MatchOptions) -> Result<CsfqMatch> {
    check_alpha(alpha, false)?;
    if !(targets.omega01 > 0.0 && targets.domega01 > 0.0 && targets.abs_anharm > 0.0) {
        return Err(domain(format!("matching targets must be positive: {targets:?}")));
    }
    let s = 1.0 - 2.0 * alpha;
    let p = 8.0 * alpha - 1.0;
    let e_c = targets.abs_anharm;
    let ecf0 = e_c * s / p;
    let ejf0 = p / s * (targets.omega01 - e_c).powi(2) / (16.0 * e_c * s);
    let sigma0 = ejf0 * 2.0 * targets.domega01 / (targets.omega01 - e_c);

    let model = |ejf: f64, ecf: f64| -> Result<(f64, f64)> {
        let q = QubitSpec::Csfq(CsfqSpec {
            e_cf: ecf,
            e_jf_mean: ejf,
            e_jf_sigma: 0.0,
            alpha,
            allow_nonpositive_u: false,
        });
        q.exact_omega01_anharm(ejf, opts.n_cut)
    };
    let residual = |x: [f64; 2]| -> Result<[f64; 2]> {
        let (w, a) = model(x[0], x[1])?;
        Ok([
            (w - targets.omega01) / targets.omega01,
            (a - targets.abs_anharm) / targets.abs_anharm,
        ])
    };
    // Refine the seed on the closed-form expansion first; it is cheap and
    // lands inside the exact problem's basin even where the seed does not.
    let nlo_residual = |x: [f64; 2]| -> Result<[f64; 2]> {
        let (w, a) = csfq_nlo_omega01_anharm(x[1], x[0], alpha);
        Ok([
            (w - targets.omega01) / targets.omega01,
            (a - targets.abs_anharm) / targets.abs_anharm,
        ])
    };
    let start = match damped_newton(nlo_residual, [ejf0, ecf0], opts) {
        Ok((x, _, _)) => x,
        Err(_) => [ejf0, ecf0],
    };
    let (x, r, iterations) = damped_newton(residual, start, opts)?;

    let omega_of = |ejf: f64| Ok(model(ejf, x[1])?.0);
    let slope = central_difference(omega_of, x[0], opts.fd_rel_step)?;
    let sigma = targets.domega01 / slope;
    let spread = 0.5 * (omega_of(x[0] + sigma)? - omega_of(x[0] - sigma)?);
    Ok(CsfqMatch {
        spec: CsfqSpec {
            e_cf: x[1],
            e_jf_mean: x[0],
            e_jf_sigma: sigma,
            alpha,
            allow_nonpositive_u: false,
        },
        iterations,
        residuals: r,
        seed: (ejf0, ecf0, sigma0),
        spread_mismatch: (spread - targets.domega01) / targets.domega01,
    })
}

/// Damped Newton iteration on a 2x2 system with a central-difference
/// Jacobian; stops when every residual is below `opts.rel_tol`.
fn damped_newton(
    residual: impl Fn([f64; 2]) -> Result<[f64; 2]>,
    x0: [f64; 2],
    opts: &MatchOptions,
) -> Result<([f64; 2], [f64; 2], usize)> {
    let max_abs = |r: [f64; 2]| r[0].abs().max(r[1].abs());
    let l2 = |r: [f64; 2]| r[0].hypot(r[1]);
    let mut x = x0;
    let mut r = residual(x)?;
    let mut iterations = 0;
    while max_abs(r) > opts.rel_tol {
        if iterations >= opts.max_iterations {
            return Err(Error::Convergence {
                iterations,
                residuals: r.to_vec(),
            });
        }
        iterations += 1;
        let mut jac = [[0.0; 2]; 2];
        for col in 0..2 {
            let h = opts.fd_rel_step * x[col];
            let mut xp = x;
            let mut xm = x;
            xp[col] += h;
            xm[col] -= h;
            let (rp, rm) = (residual(xp)?, residual(xm)?);
            for row in 0..2 {
                jac[row][col] = (rp[row] - rm[row]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if !det.is_finite() || det.abs() < 1e-300 {
            return Err(Error::Numerical(format!("singular matching Jacobian at {x:?}")));
        }
        let dx = [
            -(jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
        ];
        let mut lambda = 1.0;
        loop {
            let trial = [x[0] + lambda * dx[0], x[1] + lambda * dx[1]];
            if trial[0] > 0.0 && trial[1] > 0.0 {
                let rt = residual(trial)?;
                if l2(rt) < l2(r) {
                    x = trial;
                    r = rt;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-6 {
                return Err(Error::Convergence {
                    iterations,
                    residuals: r.to_vec(),
                });
            }
        }
    }
    Ok((x, r, iterations))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_transmon() -> TransmonSpec {
        TransmonSpec::new(0.25, 44.0, 1.17).unwrap()
    }

    fn reference_csfq() -> CsfqSpec {
        CsfqSpec::new(0.054, 301.0, 8.51, 0.35).unwrap()
    }

    #[test]
    fn free_charging_limit() {
        let spec = TransmonSpec {
            e_c: 1.0,
            e_j_mean: 1.0,
            e_j_sigma: 0.0,
        };
        let h = build_transmon_charge_hamiltonian(&spec, 0.0, 1).unwrap();
        assert_eq!(h.to_dense(), vec![4.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 4.0]);
    }

    #[test]
    fn transmon_structure() {
        let h = build_transmon_charge_hamiltonian(&reference_transmon(), 44.0, 50).unwrap();
        assert_eq!(h.dim(), 101);
        assert_eq!(h.get(0, 0), 4.0 * 0.25 * 2500.0);
        assert_eq!(h.get(50, 50), 0.0);
        assert_eq!(h.get(50, 51), -22.0);
        assert_eq!(h.get(50, 52), 0.0);
        let d = h.to_dense();
        for i in 0..101 {
            for j in 0..101 {
                assert_eq!(d[i * 101 + j].to_bits(), d[j * 101 + i].to_bits());
            }
        }
    }

    #[test]
    fn bad_parameters_rejected() {
        let t = TransmonSpec {
            e_c: -1.0,
            e_j_mean: 1.0,
            e_j_sigma: 0.0,
        };
        assert!(matches!(
            build_transmon_charge_hamiltonian(&t, 1.0, 5),
            Err(Error::Domain(_))
        ));
        assert!(build_transmon_charge_hamiltonian(&reference_transmon(), 1.0, 0).is_err());
        assert!(CsfqSpec::new(0.05, 300.0, 0.0, 0.5).is_err());
        assert!(CsfqSpec::new(0.05, 300.0, 0.0, 0.1).is_err());
        assert!(CsfqSpec::new(0.05, 300.0, 0.0, -0.1).is_err());
        let ok_with_override = CsfqSpec {
            e_cf: 0.05,
            e_jf_mean: 300.0,
            e_jf_sigma: 0.0,
            alpha: 0.1,
            allow_nonpositive_u: true,
        };
        assert!(ok_with_override.validate().is_ok());
    }

    #[test]
    fn csfq_structure() {
        let f = reference_csfq();
        let h = build_csfq_charge_hamiltonian(&f, 301.0, 50).unwrap();
        assert_eq!(h.get(10, 10), 4.0 * 0.054 * 1600.0);
        assert_eq!(h.get(10, 11), -301.0);
        assert_eq!(h.get(10, 12), 0.35 * 301.0 / 2.0);
        assert_eq!(h.get(10, 13), 0.0);
    }

    #[test]
    fn csfq_alpha_zero_is_a_transmon() {
        let f = CsfqSpec {
            e_cf: 0.25,
            e_jf_mean: 22.0,
            e_jf_sigma: 0.0,
            alpha: 0.0,
            allow_nonpositive_u: true,
        };
        let a = eig_symmetric(&build_csfq_charge_hamiltonian(&f, 22.0, 50).unwrap(), false).unwrap();
        let b = eig_symmetric(
            &build_transmon_charge_hamiltonian(&reference_transmon(), 44.0, 50).unwrap(),
            false,
        )
        .unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn transmon_frequency_matches_table_formula() {
        let q = QubitSpec::Transmon(reference_transmon());
        let s = q.spectrum(44.0, 5, 50).unwrap();
        let formula = (8.0f64 * 44.0 * 0.25).sqrt() - 0.25;
        assert!(
            (s.omega01 - formula).abs() / formula < 5e-3,
            "{} vs {formula}",
            s.omega01
        );
        assert!(s.levels.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn transmon_anharmonicity() {
        let q = QubitSpec::Transmon(reference_transmon());
        let s = q.spectrum(44.0, 3, 50).unwrap();
        // The exact value sits 7% below -E_C; the NLO formula tracks it closely.
        assert!(s.anharm < 0.0);
        assert!((s.anharm + 0.25).abs() / 0.25 < 0.07, "{}", s.anharm);
        let (_, nlo) = approx_omega01_anharm(&q);
        assert!((s.anharm - nlo).abs() / s.anharm.abs() < 0.01, "{} vs {nlo}", s.anharm);
    }

    #[test]
    fn charge_elements_harmonic_scaling() {
        let q = QubitSpec::Transmon(reference_transmon());
        let s = q.spectrum(44.0, 5, 50).unwrap();
        let a = 44.0 / (8.0 * 0.25);
        let harmonic = (a / 4.0f64).powf(0.25);
        assert!((s.charge(1, 0).abs() - harmonic).abs() / harmonic < 0.05);
        for u in 0..5 {
            assert!(s.charge(u, u).abs() < 1e-8);
            for v in 0..5 {
                assert_eq!(s.charge(u, v).abs(), s.charge(v, u).abs());
            }
        }
    }

    #[test]
    fn csfq_harmonic_limit() {
        let f = CsfqSpec {
            e_cf: 0.01,
            e_jf_mean: 500.0,
            e_jf_sigma: 0.0,
            alpha: 0.0,
            allow_nonpositive_u: true,
        };
        let s = QubitSpec::Csfq(f).spectrum(500.0, 3, 50).unwrap();
        assert!(s.anharm.abs() < 0.01 * s.omega01);
    }

    #[test]
    fn approx_formulas() {
        let q = QubitSpec::Transmon(reference_transmon());
        let s = q.spectrum(44.0, 3, 50).unwrap();
        let (w, _) = approx_omega01_anharm(&q);
        assert!((w - s.omega01).abs() / s.omega01 < 1e-3);

        let f = QubitSpec::Csfq(reference_csfq());
        let sf = f.spectrum(301.0, 3, 50).unwrap();
        let (_, af) = approx_omega01_anharm(&f);
        // The CSFQ expansion converges slowly: about 6% off at these parameters.
        assert!((af - sf.anharm).abs() / sf.anharm < 0.1, "{af} vs {}", sf.anharm);

        // alpha = 1/8 removes the leading anharmonicity term.
        let (_, a8) = csfq_nlo_omega01_anharm(0.05, 300.0, 0.125);
        let small = 0.05 * (4.0f64 * 0.05 / (300.0 * 0.75)).sqrt();
        assert!((a8 - small * (1.0 - 4.0) / 0.75 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn approx_error_decreases_with_ratio() {
        let mut last = f64::INFINITY;
        for ratio in [50.0, 100.0, 200.0, 400.0] {
            let t = TransmonSpec {
                e_c: 0.25,
                e_j_mean: 0.25 * ratio,
                e_j_sigma: 0.0,
            };
            let q = QubitSpec::Transmon(t);
            let (exact, _) = q.exact_omega01_anharm(t.e_j_mean, 50).unwrap();
            let (w, _) = approx_omega01_anharm(&q);
            let err = ((w - exact) / exact).abs();
            assert!(err < last, "ratio {ratio}: {err} !< {last}");
            last = err;
        }
    }

    #[test]
    fn cutoff_convergence() {
        let t = QubitSpec::Transmon(reference_transmon());
        assert!(spectrum_converged(&t, 44.0, 6, 50).unwrap());
        let f = QubitSpec::Csfq(reference_csfq());
        assert!(spectrum_converged(&f, 301.0, 6, 50).unwrap());
    }

    #[test]
    fn anharmonicity_signs() {
        for alpha in [0.2, 0.3, 0.35, 0.45] {
            let f = CsfqSpec::new(0.054, 301.0, 0.0, alpha).unwrap();
            let (_, a) = QubitSpec::Csfq(f).exact_omega01_anharm(301.0, 50).unwrap();
            assert!(a > 0.0, "alpha {alpha}: {a}");
        }
        let (_, a) = QubitSpec::Transmon(reference_transmon())
            .exact_omega01_anharm(44.0, 50)
            .unwrap();
        assert!(a < 0.0);
    }

    #[test]
    fn matches_reference_csfq() {
        let targets = transmon_targets(&reference_transmon(), 50).unwrap();
        let m = match_csfq_parameters(&targets, 0.35, &MatchOptions::default()).unwrap();
        assert!((m.spec.e_jf_mean - 301.0).abs() / 301.0 < 0.03, "{m:?}");
        assert!((m.spec.e_cf - 0.054).abs() / 0.054 < 0.03, "{m:?}");
        assert!((m.spec.e_jf_sigma - 8.51).abs() / 8.51 < 0.03, "{m:?}");
        assert!(m.residuals.iter().all(|r| r.abs() <= 1e-4));
        assert!(m.spread_mismatch.abs() < 0.01);
        // Matched CSFQ has the transmon's |A| with the opposite sign.
        let (_, a) = QubitSpec::Csfq(m.spec)
            .exact_omega01_anharm(m.spec.e_jf_mean, 50)
            .unwrap();
        assert!((a - targets.abs_anharm).abs() / targets.abs_anharm < 1e-4);
    }

    #[test]
    fn matching_a_csfq_to_itself() {
        let f = reference_csfq();
        let q = QubitSpec::Csfq(f);
        let (w, a) = q.exact_omega01_anharm(f.e_jf_mean, 50).unwrap();
        let slope = central_difference(|e| Ok(q.exact_omega01_anharm(e, 50)?.0), f.e_jf_mean, 1e-6).unwrap();
        let targets = MatchTargets {
            omega01: w,
            domega01: slope * f.e_jf_sigma,
            abs_anharm: a,
        };
        let opts = MatchOptions {
            rel_tol: 1e-9,
            ..Default::default()
        };
        let m = match_csfq_parameters(&targets, f.alpha, &opts).unwrap();
        assert!((m.spec.e_jf_mean - f.e_jf_mean).abs() / f.e_jf_mean < 1e-6, "{m:?}");
        assert!((m.spec.e_cf - f.e_cf).abs() / f.e_cf < 1e-6, "{m:?}");
        assert!((m.spec.e_jf_sigma - f.e_jf_sigma).abs() / f.e_jf_sigma < 1e-4, "{m:?}");
    }

    #[test]
    fn matched_charging_energy_follows_seed_trend() {
        let targets = transmon_targets(&reference_transmon(), 50).unwrap();
        let mut last_ecf = f64::INFINITY;
        for alpha in [0.25, 0.3, 0.35, 0.4, 0.45] {
            let m = match_csfq_parameters(&targets, alpha, &MatchOptions::default()).unwrap();
            let seed = 0.25 * (1.0 - 2.0 * alpha) / (8.0 * alpha - 1.0);
            let ratio = m.spec.e_cf / seed;
            // The subleading anharmonicity correction lifts E_CF above the seed.
            assert!((1.0..1.8).contains(&ratio), "alpha {alpha}: ratio {ratio}");
            assert!(m.spec.e_cf < last_ecf);
            last_ecf = m.spec.e_cf;
        }
    }

    #[test]
    fn weak_quartic_cannot_reach_target_anharmonicity() {
        // At alpha = 0.2 the exact |A| saturates near half the transmon's
        // value for this frequency, so the solver must report failure.
        let targets = transmon_targets(&reference_transmon(), 50).unwrap();
        assert!(matches!(
            match_csfq_parameters(&targets, 0.2, &MatchOptions::default()),
            Err(Error::Convergence { .. })
        ));
    }

    #[test]
    fn matching_rejects_bad_alpha() {
        let targets = transmon_targets(&reference_transmon(), 50).unwrap();
        assert!(match_csfq_parameters(&targets, 0.1, &MatchOptions::default()).is_err());
    }

    #[test]
    fn non_convergence_reports_residuals() {
        let targets = transmon_targets(&reference_transmon(), 50).unwrap();
        let opts = MatchOptions {
            rel_tol: 1e-15,
            max_iterations: 1,
            ..Default::default()
        };
        match match_csfq_parameters(&targets, 0.35, &opts) {
            Err(Error::Convergence { residuals, .. }) => assert_eq!(residuals.len(), 2),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }
}
