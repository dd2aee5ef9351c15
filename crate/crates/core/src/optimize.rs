//! Small numerical helpers: box-constrained Nelder-Mead and polynomial
//! least squares.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Stop when the simplex diameter (infinity norm) falls below this.
    pub x_tol: f64,
    /// Stop when the spread of objective values falls below this.
    pub f_tol: f64,
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            x_tol: 1e-9,
            f_tol: 1e-18,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn project(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (xi, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *xi = xi.clamp(lo, hi);
    }
}

/// Nelder-Mead on a box: every trial point is projected back onto the
/// bounds before it is evaluated.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    start: &[f64],
    bounds: &[(f64, f64)],
    opts: &NelderMeadOptions,
) -> Minimum {
    let n = start.len();
    assert_eq!(bounds.len(), n);
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut x0 = start.to_vec();
    project(&mut x0, bounds);
    simplex.push(x0.clone());
    for i in 0..n {
        let mut x = x0.clone();
        let (lo, hi) = bounds[i];
        let step = opts.initial_step * (hi - lo).max(1e-12);
        x[i] = if x[i] + step <= hi { x[i] + step } else { x[i] - step };
        project(&mut x, bounds);
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        iterations += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..]
            .iter()
            .flat_map(|x| x.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0_f64, f64::max);
        if diameter < opts.x_tol || (values[n] - values[0]).abs() < opts.f_tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|x| x[d]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            let mut x: Vec<f64> = centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (w - c)).collect();
            project(&mut x, bounds);
            x
        };

        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let (xc, fc) = if fr < values[n] {
                let xc = along(-0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    let mut x: Vec<f64> = simplex[i].iter().zip(&best).map(|(a, b)| b + 0.5 * (a - b)).collect();
                    project(&mut x, bounds);
                    values[i] = f(&x);
                    simplex[i] = x;
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    Minimum {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}

#[derive(Debug, Clone)]
pub struct PolyFit {
    /// Coefficients in ascending power order.
    pub coefficients: Vec<f64>,
    /// Standard errors of the coefficients from the residual variance.
    pub standard_errors: Vec<f64>,
    pub residual_sum_squares: f64,
}

impl PolyFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Ordinary least-squares polynomial fit of the given degree.
pub fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Result<PolyFit> {
    let p = degree + 1;
    if x.len() != y.len() || x.len() < p {
        return Err(Error::Input(format!(
            "polynomial fit of degree {degree} needs at least {p} paired points, got {} / {}",
            x.len(),
            y.len()
        )));
    }
    // Normal equations, solved by Gaussian elimination with partial pivoting.
    let mut ata = vec![0.0; p * p];
    let mut aty = vec![0.0; p];
    for (&xi, &yi) in x.iter().zip(y) {
        let pows: Vec<f64> = (0..p).map(|k| xi.powi(k as i32)).collect();
        for r in 0..p {
            aty[r] += pows[r] * yi;
            for c in 0..p {
                ata[r * p + c] += pows[r] * pows[c];
            }
        }
    }
    let inv = invert(&ata, p).ok_or_else(|| Error::Numerical("singular normal equations in polynomial fit".into()))?;
    let coefficients: Vec<f64> = (0..p).map(|r| (0..p).map(|c| inv[r * p + c] * aty[c]).sum()).collect();
    let fit = PolyFit {
        coefficients,
        standard_errors: Vec::new(),
        residual_sum_squares: 0.0,
    };
    let rss: f64 = x.iter().zip(y).map(|(&xi, &yi)| (yi - fit.eval(xi)).powi(2)).sum();
    let dof = x.len() as f64 - p as f64;
    let sigma2 = if dof > 0.0 { rss / dof } else { f64::NAN };
    let standard_errors = (0..p).map(|k| (sigma2 * inv[k * p + k]).sqrt()).collect();
    Ok(PolyFit {
        standard_errors,
        residual_sum_squares: rss,
        ..fit
    })
}

fn invert(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv: Vec<f64> = (0..n * n).map(|i| if i / n == i % n { 1.0 } else { 0.0 }).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&r1, &r2| m[r1 * n + col].abs().total_cmp(&m[r2 * n + col].abs()))?;
        if m[piv * n + col].abs() < 1e-300 {
            return None;
        }
        for k in 0..n {
            m.swap(col * n + k, piv * n + k);
            inv.swap(col * n + k, piv * n + k);
        }
        let d = m[col * n + col];
        for k in 0..n {
            m[col * n + k] /= d;
            inv[col * n + k] /= d;
        }
        for r in 0..n {
            if r != col {
                let factor = m[r * n + col];
                for k in 0..n {
                    m[r * n + k] -= factor * m[col * n + k];
                    inv[r * n + k] -= factor * inv[col * n + k];
                }
            }
        }
    }
    Some(inv)
}
