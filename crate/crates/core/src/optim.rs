//! Bounded Nelder-Mead simplex minimizer with adaptive coefficients and
//! restarts from the incumbent.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexConfig {
    /// Iteration budget of each descent; a restart gets a fresh budget.
    pub max_iter: usize,
    /// Spread of function values, relative to 1 + |f_best|.
    pub f_tol: f64,
    /// Largest vertex distance from the best vertex (sup norm).
    pub x_tol: f64,
    pub initial_step: f64,
    /// Restarts from the incumbent after convergence, until one gains nothing.
    pub max_restarts: usize,
}

impl Default for SimplexConfig {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            f_tol: 1e-9,
            x_tol: 1e-8,
            initial_step: 0.5,
            max_restarts: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best value after every iteration; never increases.
    pub trace: Vec<f64>,
}

struct Bounded<'a, F> {
    f: F,
    lo: &'a [f64],
    hi: &'a [f64],
    evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Bounded<'_, F> {
    fn clamp(&self, x: &mut [f64]) {
        for ((xi, &l), &h) in x.iter_mut().zip(self.lo).zip(self.hi) {
            *xi = xi.clamp(l, h);
        }
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        // NaN and -inf count as failures so they never become the incumbent
        if v.is_nan() || v == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            v
        }
    }
}

/// Minimizes `f` over the box [lo, hi]; points leaving the box are
/// projected back onto it.
pub fn minimize<F>(f: F, x0: &[f64], lo: &[f64], hi: &[f64], cfg: &SimplexConfig) -> Result<SimplexResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    if dim == 0 || lo.len() != dim || hi.len() != dim {
        return Err(Error::InvalidParameter(format!(
            "simplex dimensions disagree: x0 {}, lo {}, hi {}",
            dim,
            lo.len(),
            hi.len()
        )));
    }
    if lo.iter().zip(hi).any(|(l, h)| !(l < h)) {
        return Err(Error::InvalidParameter("empty simplex box".into()));
    }
    let mut obj = Bounded { f, lo, hi, evals: 0 };
    let mut x = x0.to_vec();
    obj.clamp(&mut x);
    let mut fx = obj.eval(&x);
    let mut trace = vec![fx];
    let mut iterations = 0;
    let mut converged = false;
    let mut step = cfg.initial_step;
    for _ in 0..=cfg.max_restarts {
        let run = descend(&mut obj, &x, step, cfg, cfg.max_iter);
        iterations += run.iterations;
        for v in run.trace {
            trace.push(v.min(*trace.last().unwrap()));
        }
        let gain = fx - run.f;
        if run.f < fx {
            fx = run.f;
            x = run.x;
        }
        converged = run.converged;
        if !converged {
            break;
        }
        if !(gain > cfg.f_tol * (1.0 + fx.abs())) && step < cfg.initial_step {
            break;
        }
        step = (step * 0.5).max(16.0 * cfg.x_tol);
    }
    Ok(SimplexResult {
        x,
        f: fx,
        iterations,
        evaluations: obj.evals,
        converged: converged && fx.is_finite(),
        trace,
    })
}

fn descend<F: FnMut(&[f64]) -> f64>(
    obj: &mut Bounded<'_, F>,
    x0: &[f64],
    step: f64,
    cfg: &SimplexConfig,
    budget: usize,
) -> SimplexResult {
    let dim = x0.len();
    let nf = dim as f64;
    // Gao-Han dimension-adapted coefficients
    let (rho, chi, gamma, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    let mut verts: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    verts.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += step;
        if v[i] > obj.hi[i] {
            v[i] = x0[i] - step;
        }
        obj.clamp(&mut v);
        verts.push(v);
    }
    let mut vals: Vec<f64> = verts.iter().map(|v| obj.eval(v)).collect();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut it = 0;
    while it < budget {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        verts = order.iter().map(|&i| verts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let f_spread = vals[dim] - vals[0];
        let x_spread = verts[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&verts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if vals[0].is_finite() && f_spread <= cfg.f_tol * (1.0 + vals[0].abs()) && x_spread <= cfg.x_tol {
            converged = true;
            break;
        }
        it += 1;

        let mut centroid = vec![0.0; dim];
        for v in &verts[..dim] {
            for (c, vi) in centroid.iter_mut().zip(v) {
                *c += vi / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&verts[dim]).map(|(c, w)| c + t * (c - w)).collect()
        };

        let mut xr = along(rho);
        obj.clamp(&mut xr);
        let fr = obj.eval(&xr);
        if fr < vals[0] {
            let mut xe = along(rho * chi);
            obj.clamp(&mut xe);
            let fe = obj.eval(&xe);
            if fe < fr {
                verts[dim] = xe;
                vals[dim] = fe;
            } else {
                verts[dim] = xr;
                vals[dim] = fr;
            }
        } else if fr < vals[dim - 1] {
            verts[dim] = xr;
            vals[dim] = fr;
        } else {
            let outside = fr < vals[dim];
            let mut xc = if outside { along(rho * gamma) } else { along(-gamma) };
            obj.clamp(&mut xc);
            let fc = obj.eval(&xc);
            if (outside && fc <= fr) || (!outside && fc < vals[dim]) {
                verts[dim] = xc;
                vals[dim] = fc;
            } else {
                let best = verts[0].clone();
                for i in 1..=dim {
                    for (vj, bj) in verts[i].iter_mut().zip(&best) {
                        *vj = bj + sigma * (*vj - bj);
                    }
                    vals[i] = obj.eval(&verts[i]);
                }
            }
        }
        trace.push(vals.iter().copied().fold(f64::INFINITY, f64::min));
    }
    let best = (0..=dim).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    SimplexResult {
        x: verts[best].clone(),
        f: vals[best],
        iterations: it,
        evaluations: 0,
        converged,
        trace,
    }
}

/// Radical-inverse Halton point `index` (1-based) in [0, 1)^dim.
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    (0..dim)
        .map(|d| {
            let base = PRIMES[d % PRIMES.len()];
            let mut f = 1.0;
            let mut r = 0.0;
            let mut i = index;
            while i > 0 {
                f /= base as f64;
                r += f * (i % base) as f64;
                i /= base;
            }
            r
        })
        .collect()
}
