//! Maximum-likelihood fitting: log-likelihood, score, multi-start simplex
//! search in log space, observed information, Wald intervals and
//! information criteria.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::baseline::Family;
use crate::bgmo::BgmoDistribution;
use crate::error::{Error, Result};
use crate::optim::{halton, minimize, SimplexConfig};
use crate::specfun::{digamma_unchecked, normal_quantile};

/// Sum of log-densities. `value` is −∞ when some observation has zero
/// density; `first_zero` then names the first such observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLikelihood {
    pub value: f64,
    pub first_zero: Option<(usize, f64)>,
}

impl LogLikelihood {
    pub fn is_finite(&self) -> bool {
        self.first_zero.is_none() && self.value.is_finite()
    }
}

pub fn log_likelihood(d: &BgmoDistribution, data: &[f64]) -> LogLikelihood {
    let mut total = 0.0;
    for (i, &t) in data.iter().enumerate() {
        let l = d.ln_pdf(t);
        if l == f64::NEG_INFINITY || l.is_nan() {
            return LogLikelihood {
                value: f64::NEG_INFINITY,
                first_zero: Some((i, t)),
            };
        }
        total += l;
    }
    LogLikelihood { value: total, first_zero: None }
}

/// Errors with the offending index if any observation is outside the support.
pub fn check_support(d: &BgmoDistribution, data: &[f64]) -> Result<()> {
    let low = d.support_low();
    match data.iter().position(|&t| !(t >= low) || !t.is_finite()) {
        Some(index) => Err(Error::OutsideSupport { index, value: data[index] }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreMode {
    Analytic,
    FiniteDifference,
}

/// A gradient together with the mode that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Score {
    pub gradient: Vec<f64>,
    pub mode: ScoreMode,
    /// Set when Analytic was requested but the baseline has no coded partials.
    pub notice: Option<String>,
}

/// Gradient of the log-likelihood with respect to the full parameter
/// vector (m, n, θ, α, baseline parameters).
pub fn score(d: &BgmoDistribution, data: &[f64], mode: ScoreMode) -> Result<Score> {
    check_support(d, data)?;
    if mode == ScoreMode::Analytic {
        if d.baseline().has_partials() {
            return Ok(Score {
                gradient: analytic_score(d, data),
                mode,
                notice: None,
            });
        }
        let notice = format!(
            "no analytic partials for the {} baseline; using finite differences",
            d.baseline().tag()
        );
        let mut s = score(d, data, ScoreMode::FiniteDifference)?;
        s.notice = Some(notice);
        return Ok(s);
    }
    let x = d.param_vector();
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let h = 1e-4 * x[i].abs().max(1e-2);
        let at = |k: f64| -> Result<f64> {
            let mut y = x.clone();
            y[i] += k * h;
            Ok(log_likelihood(&d.with_param_vector(&y)?, data).value)
        };
        let v = (at(-2.0)? - 8.0 * at(-1.0)? + 8.0 * at(1.0)? - at(2.0)?) / (12.0 * h);
        g.push(v);
    }
    Ok(Score {
        gradient: g,
        mode,
        notice: None,
    })
}

fn analytic_score(d: &BgmoDistribution, data: &[f64]) -> Vec<f64> {
    let p = *d.params();
    let (m, n, theta, alpha) = (p.m, p.n, p.theta, p.alpha);
    let k = d.param_vector().len();
    let mut g = vec![0.0; k];
    let psi_mn = digamma_unchecked(m + n);
    let cm = psi_mn - digamma_unchecked(m);
    let cn = psi_mn - digamma_unchecked(n);
    for &t in data {
        let pt = d.terms(t);
        let ln_s = pt.mo.ln_s;
        let big_d = pt.mo.ln_d.exp();
        let (gc, gs) = (pt.base.cdf, pt.base.sf);
        // (m − 1) θ S^θ / (1 − S^θ)
        let w = if m == 1.0 {
            0.0
        } else {
            (m - 1.0) * theta * (theta * ln_s - pt.ln_w).exp()
        };
        let common = theta * n - 1.0 - w;
        g[0] += cm + pt.ln_w;
        g[1] += cn + theta * ln_s;
        g[2] += 1.0 / theta + n * ln_s - w * ln_s / theta;
        g[3] += 1.0 / alpha - 2.0 * gs / big_d + common * gc / (alpha * big_d);
        if let Some(parts) = d.baseline().partials(t) {
            for (j, (dlng, dlnsf)) in parts.into_iter().enumerate() {
                g[4 + j] += dlng + 2.0 * (1.0 - alpha) * gs * dlnsf / big_d + common * dlnsf / big_d;
            }
        }
    }
    g
}

/// A model to fit: a starting distribution and the parameters held fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelTemplate {
    pub name: String,
    pub start: BgmoDistribution,
    pub fixed: Vec<bool>,
}

impl ModelTemplate {
    /// All parameters free.
    pub fn new(name: impl Into<String>, start: BgmoDistribution) -> Self {
        let k = start.param_vector().len();
        Self {
            name: name.into(),
            start,
            fixed: vec![false; k],
        }
    }

    /// Holds the named parameter at `value`.
    pub fn fix(mut self, param: &str, value: f64) -> Result<Self> {
        let names = self.start.param_names();
        let i = names
            .iter()
            .position(|&n| n == param)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown parameter '{param}' (have {names:?})")))?;
        let mut v = self.start.param_vector();
        v[i] = value;
        self.start = self.start.with_param_vector(&v)?;
        self.fixed[i] = true;
        Ok(self)
    }

    pub fn free_count(&self) -> usize {
        self.fixed.iter().filter(|f| !**f).count()
    }

    fn free_indices(&self) -> Vec<usize> {
        (0..self.fixed.len()).filter(|&i| !self.fixed[i]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub starts: usize,
    pub max_iter: usize,
    pub f_tol: f64,
    pub x_tol: f64,
    pub seed: u64,
    /// Natural-scale sampling range per free parameter; one entry is
    /// broadcast to all.
    pub start_box: Vec<(f64, f64)>,
    /// Natural-scale search bounds shared by every parameter.
    pub bounds: (f64, f64),
    /// Level for the Wald intervals is 1 − gamma.
    pub gamma: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            starts: 24,
            max_iter: 2000,
            f_tol: 1e-9,
            x_tol: 1e-8,
            seed: 0,
            start_box: vec![(0.05, 20.0)],
            bounds: (1e-4, 1e4),
            gamma: 0.05,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bounds;
        if self.starts == 0
            || self.max_iter == 0
            || !(self.f_tol > 0.0)
            || !(self.x_tol > 0.0)
            || self.start_box.is_empty()
            || self.start_box.iter().any(|&(a, b)| !(a > 0.0 && b > a))
            || !(lo > 0.0 && hi > lo)
            || !(self.gamma > 0.0 && self.gamma < 1.0)
        {
            return Err(Error::InvalidParameter(format!("invalid fit configuration {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoCriteria {
    pub aic: f64,
    pub bic: f64,
    /// None when n ≤ k + 1.
    pub caic: Option<f64>,
    pub hqic: f64,
}

pub fn info_criteria(log_l: f64, k: usize, n: usize) -> InfoCriteria {
    let (kf, nf) = (k as f64, n as f64);
    let aic = 2.0 * kf - 2.0 * log_l;
    let caic = (n > k + 1).then(|| aic + 2.0 * kf * (kf + 1.0) / (nf - kf - 1.0));
    InfoCriteria {
        aic,
        bic: kf * nf.ln() - 2.0 * log_l,
        caic,
        hqic: 2.0 * kf * nf.ln().ln() - 2.0 * log_l,
    }
}

/// estimate ± z_{γ/2}·se.
pub fn wald_interval(estimate: f64, std_error: f64, gamma: f64) -> Result<(f64, f64)> {
    if !(std_error >= 0.0) || !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!(
            "Wald interval needs se >= 0 and gamma in (0,1), got {std_error}, {gamma}"
        )));
    }
    let z = normal_quantile(1.0 - gamma / 2.0)?;
    Ok((estimate - z * std_error, estimate + z * std_error))
}

/// Negative central-difference Hessian of the log-likelihood over the
/// parameters at `free` (all parameters when `free` is None).
pub fn observed_information(d: &BgmoDistribution, data: &[f64], free: Option<&[usize]>) -> Result<DMatrix<f64>> {
    let x = d.param_vector();
    let all: Vec<usize> = (0..x.len()).collect();
    let idx = free.unwrap_or(&all);
    let k = idx.len();
    let names = d.param_names();
    let h: Vec<f64> = idx.iter().map(|&i| (1e-4 * x[i].abs()).max(1e-6)).collect();
    let ll = |shift: &[(usize, f64)]| -> Result<f64> {
        let mut y = x.clone();
        for &(i, s) in shift {
            y[i] += s;
        }
        Ok(log_likelihood(&d.with_param_vector(&y)?, data).value)
    };
    let f0 = ll(&[])?;
    let mut hess = DMatrix::zeros(k, k);
    for a in 0..k {
        let (ia, ha) = (idx[a], h[a]);
        let v = (ll(&[(ia, ha)])? - 2.0 * f0 + ll(&[(ia, -ha)])?) / (ha * ha);
        hess[(a, a)] = v;
        for b in (a + 1)..k {
            let (ib, hb) = (idx[b], h[b]);
            let v = (ll(&[(ia, ha), (ib, hb)])? - ll(&[(ia, ha), (ib, -hb)])? - ll(&[(ia, -ha), (ib, hb)])?
                + ll(&[(ia, -ha), (ib, -hb)])?)
                / (4.0 * ha * hb);
            hess[(a, b)] = v;
            hess[(b, a)] = v;
        }
    }
    for a in 0..k {
        for b in 0..k {
            if !hess[(a, b)].is_finite() {
                return Err(Error::Numerical(format!(
                    "observed information entry ({}, {}) is not finite",
                    names[idx[a]], names[idx[b]]
                )));
            }
        }
    }
    let sym = (&hess + hess.transpose()) * 0.5;
    Ok(-sym)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: String,
    pub param_names: Vec<String>,
    pub estimates: Vec<f64>,
    pub fixed: Vec<bool>,
    pub log_likelihood: f64,
    /// Over the free parameters, in order; None when the information is
    /// not positive definite.
    pub covariance: Option<DMatrix<f64>>,
    /// Indexed like `estimates`; None for fixed parameters or when the
    /// covariance is unavailable.
    pub std_errors: Vec<Option<f64>>,
    pub confidence_intervals: Vec<Option<(f64, f64)>>,
    pub information_positive_definite: bool,
    pub criteria: InfoCriteria,
    pub converged: bool,
    /// Free parameters that ended on the search bounds.
    pub at_bounds: Vec<String>,
    pub n_obs: usize,
    pub k_params: usize,
    /// Best negative log-likelihood after each simplex iteration of the
    /// winning start.
    pub trace: Vec<f64>,
}

impl FitResult {
    pub fn distribution(&self, template: &ModelTemplate) -> Result<BgmoDistribution> {
        template.start.with_param_vector(&self.estimates)
    }

    pub fn to_json(&self) -> Value {
        let mut est = Map::new();
        let mut se = Map::new();
        let mut ci = Map::new();
        for (i, name) in self.param_names.iter().enumerate() {
            est.insert(name.clone(), json!(self.estimates[i]));
            se.insert(name.clone(), json!(self.std_errors[i]));
            ci.insert(name.clone(), json!(self.confidence_intervals[i].map(|(a, b)| [a, b])));
        }
        json!({
            "model": self.model,
            "estimates": est,
            "se": se,
            "ci": ci,
            "logLik": self.log_likelihood,
            "aic": self.criteria.aic,
            "bic": self.criteria.bic,
            "caic": self.criteria.caic,
            "hqic": self.criteria.hqic,
            "converged": self.converged,
            "n": self.n_obs,
            "k": self.k_params,
        })
    }
}

struct StartOutcome {
    x: Vec<f64>,
    neg_ll: f64,
    converged: bool,
    trace: Vec<f64>,
}

/// Rough scale for baselines whose cdf is 1 − exp(−λ t^β): λ ≈ 1/mean(t^β).
fn scale_hint(family: &Family, full: &[f64], data: &[f64]) -> Option<(usize, f64)> {
    let mean_pow = |b: f64| data.iter().map(|t| t.powf(b)).sum::<f64>() / data.len() as f64;
    match family {
        Family::Exponential { .. } => Some((4, 1.0 / mean_pow(1.0))),
        Family::Weibull { .. } => Some((4, 1.0 / mean_pow(full[5]))),
        _ => None,
    }
}

/// Multi-start simplex search in log space. Deterministic for a given
/// `config.seed`; starts run in parallel and merge by highest likelihood,
/// ties going to the lexicographically smaller parameter vector.
pub fn fit_mle(template: &ModelTemplate, data: &[f64], config: &FitConfig) -> Result<FitResult> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::Fit("empty data".into()));
    }
    check_support(&template.start, data)?;
    let free = template.free_indices();
    let base = template.start.param_vector();
    let k = free.len();
    let names = template.start.param_names();
    let (lo_b, hi_b) = (config.bounds.0.ln(), config.bounds.1.ln());

    let to_full = |z: &[f64]| -> Vec<f64> {
        let mut v = base.clone();
        for (&i, zi) in free.iter().zip(z) {
            v[i] = zi.exp();
        }
        v
    };
    let neg_ll = |z: &[f64]| -> f64 {
        match template.start.with_param_vector(&to_full(z)) {
            Ok(d) => -log_likelihood(&d, data).value,
            Err(_) => f64::INFINITY,
        }
    };

    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(config.starts);
    if k > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let shift: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
        let hint_at = |full: &[f64]| scale_hint(template.start.baseline().family(), full, data);
        // the template's own values, with the scale hint applied
        let mut first = base.clone();
        if let Some((i, v)) = hint_at(&first) {
            if !template.fixed[i] {
                first[i] = v;
            }
        }
        starts.push(free.iter().map(|&i| first[i].ln()).collect());
        for s in 1..config.starts as u64 {
            let u = halton(s, k);
            let mut full = base.clone();
            for (j, &i) in free.iter().enumerate() {
                let (a, b) = config.start_box[j.min(config.start_box.len() - 1)];
                let uj = (u[j] + shift[j]).fract();
                full[i] = (a.ln() + uj * (b.ln() - a.ln())).exp();
            }
            if let Some((i, v)) = hint_at(&full) {
                if let Some(j) = free.iter().position(|&f| f == i) {
                    // box value read as a multiplier around the hint, centred at 1
                    let (a, b) = config.start_box[j.min(config.start_box.len() - 1)];
                    full[i] = v * full[i] / (a * b).sqrt();
                }
            }
            starts.push(free.iter().map(|&i| full[i].ln().clamp(lo_b, hi_b)).collect());
        }
    }

    let simplex = SimplexConfig {
        max_iter: config.max_iter,
        f_tol: config.f_tol,
        x_tol: config.x_tol,
        ..SimplexConfig::default()
    };
    let lo = vec![lo_b; k];
    let hi = vec![hi_b; k];

    let outcomes: Vec<StartOutcome> = if k == 0 {
        vec![StartOutcome {
            x: Vec::new(),
            neg_ll: neg_ll(&[]),
            converged: true,
            trace: Vec::new(),
        }]
    } else {
        starts
            .par_iter()
            .filter_map(|z0| {
                let r = minimize(neg_ll, z0, &lo, &hi, &simplex).ok()?;
                r.f.is_finite().then_some(StartOutcome {
                    x: r.x,
                    neg_ll: r.f,
                    converged: r.converged,
                    trace: r.trace,
                })
            })
            .collect()
    };
    let best = outcomes
        .into_iter()
        .min_by(|a, b| {
            a.neg_ll
                .total_cmp(&b.neg_ll)
                .then_with(|| a.x.iter().zip(&b.x).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal))
        })
        .ok_or_else(|| {
            Error::Fit(format!(
                "none of {} starts reached a finite log-likelihood for {}",
                config.starts, template.name
            ))
        })?;

    let estimates = to_full(&best.x);
    let dist = template.start.with_param_vector(&estimates)?;
    let log_l = log_likelihood(&dist, data).value;
    let at_bounds: Vec<String> = free
        .iter()
        .zip(&best.x)
        .filter(|(_, &z)| z <= lo_b + 1e-6 || z >= hi_b - 1e-6)
        .map(|(&i, _)| names[i].to_string())
        .collect();

    let (covariance, pd) = match observed_information(&dist, data, Some(&free)) {
        Ok(info) if k > 0 => match info.clone().cholesky() {
            Some(ch) => (Some(ch.inverse()), true),
            None => (None, false),
        },
        _ => (None, k == 0),
    };
    let mut std_errors = vec![None; estimates.len()];
    let mut intervals = vec![None; estimates.len()];
    if let Some(cov) = &covariance {
        for (j, &i) in free.iter().enumerate() {
            let var = cov[(j, j)];
            if var >= 0.0 {
                let se = var.sqrt();
                std_errors[i] = Some(se);
                intervals[i] = Some(wald_interval(estimates[i], se, config.gamma)?);
            }
        }
    }

    Ok(FitResult {
        model: template.name.clone(),
        param_names: names.iter().map(|s| s.to_string()).collect(),
        estimates,
        fixed: template.fixed.clone(),
        log_likelihood: log_l,
        covariance,
        std_errors,
        confidence_intervals: intervals,
        information_positive_definite: pd,
        criteria: info_criteria(log_l, k, data.len()),
        converged: best.converged,
        at_bounds,
        n_obs: data.len(),
        k_params: k,
        trace: best.trace,
    })
}
