//! Series representations of the BGMO-G density and distribution function,
//! order statistics, moments through Marshall-Olkin probability weighted
//! moments, the mgf, Rényi entropy and tail asymptotes.
//!
//! Notation: x = F^MO(t) = G/(1 − ᾱḠ) and S = 1 − x, the Marshall-Olkin
//! distribution and survival functions, f^MO = αg/(1 − ᾱḠ)².
//!
//! Sums with upper limit m − 1 are finite only for integer
//! m; for other values the generalized binomial series is truncated by a
//! [`TruncationPolicy`].

use crate::baseline::BaselineSpec;
use crate::bgmo::BgmoDistribution;
use crate::error::{Error, Result};
use crate::gmo::{gmo_pdf, gmo_quantile, invert_mo, GmoParams, MoTerms};
use crate::quad::{integrate_over_support, QuadConfig};
use crate::specfun::{gen_binomial, ln_gamma};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub max_terms: usize,
    pub tail_tol: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            max_terms: 60,
            tail_tol: 1e-10,
        }
    }
}

impl TruncationPolicy {
    pub fn new(max_terms: usize, tail_tol: f64) -> Result<Self> {
        if max_terms == 0 || !(tail_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "truncation needs max_terms >= 1 and tail_tol > 0 (got {max_terms}, {tail_tol})"
            )));
        }
        Ok(Self { max_terms, tail_tol })
    }
}

/// A series value with its truncation status. `converged` is false when
/// the term budget ran out before the tail fell below tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub terms: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdfForm {
    /// Σ_j δ_j S^{θ(j+n)−1}
    SurvivalPowers,
    /// Σ_l φ_l x^l
    CdfPowers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdfForm {
    /// Σ_k χ_k x^k
    ChiSeries,
    /// Σ_p Σ_q Σ_r ψ_{p,q,r} x^r
    PsiSeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderMethod {
    Direct,
    Series,
}

pub(crate) fn integer_value(x: f64) -> Option<usize> {
    let r = x.round();
    if x >= 0.0 && (x - r).abs() <= 1e-12 * r.max(1.0) && r < 1e7 {
        Some(r as usize)
    } else {
        None
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0))
        .exp()
        .round()
}

fn sign(j: usize) -> f64 {
    if j % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Truncated product of two power series.
fn poly_mul(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len.min(a.len() + b.len() - 1)];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 || i >= out.len() {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if i + j >= out.len() {
                break;
            }
            out[i + j] += ai * bj;
        }
    }
    out
}

fn poly_pow(a: &[f64], p: usize, len: usize) -> Vec<f64> {
    let mut acc = vec![1.0];
    for _ in 0..p {
        acc = poly_mul(&acc, a, len);
    }
    acc
}

fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Mixture coefficients of the density in powers of the MO survival.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaCoeffs {
    /// δ_j = (−1)^j θ C(m−1, j) / B(m, n)
    pub delta: Vec<f64>,
    /// δ′_j = (−1)^{j+1} C(m−1, j) / (B(m, n)(j + n)), so that δ_j = −δ′_j θ(j+n)
    pub delta_prime: Vec<f64>,
    /// true when the sum is finite (integer m)
    pub exact: bool,
}

pub fn delta_coeffs(m: f64, n: f64, theta: f64, policy: &TruncationPolicy) -> Result<DeltaCoeffs> {
    if !(m > 0.0 && n > 0.0 && theta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "shapes must be positive, got m={m}, n={n}, theta={theta}"
        )));
    }
    let exact = integer_value(m).is_some();
    let count = integer_value(m).unwrap_or(policy.max_terms);
    let b_inv = (-crate::specfun::ln_beta_unchecked(m, n)).exp();
    let mut delta = Vec::with_capacity(count);
    let mut delta_prime = Vec::with_capacity(count);
    for j in 0..count {
        let c = gen_binomial(m - 1.0, j) * b_inv;
        delta.push(sign(j) * theta * c);
        delta_prime.push(-sign(j) * c / (j as f64 + n));
    }
    Ok(DeltaCoeffs {
        delta,
        delta_prime,
        exact,
    })
}

/// Coefficient tables of the expansions. `chi` is empty unless m is an
/// integer and `psi` is empty unless both m and n are.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoeffs {
    pub delta: Vec<f64>,
    pub delta_prime: Vec<f64>,
    pub phi: Vec<f64>,
    pub chi: Vec<f64>,
    /// psi[p − m][q][r]
    pub psi: Vec<Vec<Vec<f64>>>,
}

impl ExpansionCoeffs {
    pub fn compute(d: &BgmoDistribution, policy: &TruncationPolicy) -> Result<Self> {
        let p = d.params();
        let dc = delta_coeffs(p.m, p.n, p.theta, policy)?;
        let (phi, _) = phi_coeffs(&dc.delta, p.n, p.theta, policy);
        let chi = if integer_value(p.m).is_some() {
            chi_coeffs(d, policy)?.0
        } else {
            Vec::new()
        };
        let psi = if integer_value(p.m).is_some() && integer_value(p.n).is_some() {
            psi_coeffs(p.m, p.n, p.theta, policy)?.0
        } else {
            Vec::new()
        };
        Ok(Self {
            delta: dc.delta,
            delta_prime: dc.delta_prime,
            phi,
            chi,
            psi,
        })
    }
}

/// φ_l = Σ_j δ_j (−1)^l C(θ(j+n)−1, l), from the first `delta.len()`
/// δ's. Returns (φ, exact).
fn phi_coeffs(delta: &[f64], n: f64, theta: f64, policy: &TruncationPolicy) -> (Vec<f64>, bool) {
    let exps: Vec<f64> = (0..delta.len()).map(|j| theta * (j as f64 + n) - 1.0).collect();
    let all_int = exps.iter().all(|&a| integer_value(a).is_some());
    let len = if all_int {
        exps.iter().map(|&a| integer_value(a).unwrap() + 1).max().unwrap_or(1)
    } else {
        policy.max_terms
    };
    let mut phi = vec![0.0; len];
    for (dj, &a) in delta.iter().zip(&exps) {
        let mut c = 1.0;
        for (l, slot) in phi.iter_mut().enumerate() {
            if l > 0 {
                c *= (a - (l - 1) as f64) / l as f64;
            }
            if c == 0.0 {
                break;
            }
            *slot += dj * sign(l) * c;
        }
    }
    (phi, all_int)
}

/// χ_k through truncated products: F = Σ_i c_i W^{m+i}, with
/// c_i = (−1)^i C(n−1, i)/(B(m,n)(m+i)) and W = 1 − (1 − x)^θ as a power
/// series in x. Needs integer m. Returns (χ, exact).
pub fn chi_coeffs(d: &BgmoDistribution, policy: &TruncationPolicy) -> Result<(Vec<f64>, bool)> {
    let p = d.params();
    let mi = integer_value(p.m).ok_or_else(|| {
        Error::Precondition(format!(
            "the cdf power series in F^MO needs integer m (got {}): W^m has no power series otherwise",
            p.m
        ))
    })?;
    let theta_int = integer_value(p.theta);
    let n_int = integer_value(p.n);
    let exact = theta_int.is_some() && n_int.is_some();
    let len = match (theta_int, n_int) {
        (Some(th), Some(ni)) => th * (mi + ni - 1) + 1,
        _ => policy.max_terms.max(mi + 1),
    };
    // W = −Σ_{k≥1} C(θ, k)(−x)^k
    let mut w = vec![0.0; len.min(theta_int.map_or(len, |th| th + 1))];
    for (k, slot) in w.iter_mut().enumerate().skip(1) {
        *slot = -gen_binomial(p.theta, k) * sign(k);
    }
    let b_inv = (-d.ln_beta()).exp();
    let mut chi = vec![0.0; len];
    let mut power = poly_pow(&w, mi, len);
    let i_max = n_int.map_or(len, |ni| ni.saturating_sub(1));
    for i in 0..=i_max {
        if i > 0 {
            power = poly_mul(&power, &w, len);
        }
        if power.iter().all(|&c| c == 0.0) {
            break;
        }
        let c = sign(i) * gen_binomial(p.n - 1.0, i) * b_inv / (p.m + i as f64);
        if c == 0.0 {
            continue;
        }
        for (slot, &pk) in chi.iter_mut().zip(&power) {
            *slot += c * pk;
        }
    }
    Ok((chi, exact))
}

/// χ_k by the explicit triple sum over (i, j) with the j range covering
/// every non-vanishing C(m+i, j) C(θj, k). Needs integer m; the i sum is
/// cut at the policy's term count when n is not an integer.
pub fn chi_coeffs_triple(d: &BgmoDistribution, policy: &TruncationPolicy, len: usize) -> Result<Vec<f64>> {
    let p = d.params();
    let mi = integer_value(p.m)
        .ok_or_else(|| Error::Precondition(format!("triple-sum χ needs integer m, got {}", p.m)))?;
    let b_inv = (-d.ln_beta()).exp();
    let i_max = integer_value(p.n).map_or(policy.max_terms, |ni| ni.saturating_sub(1));
    let mut chi = vec![0.0; len];
    for i in 0..=i_max {
        let ci = sign(i) * gen_binomial(p.n - 1.0, i) * b_inv / (p.m + i as f64);
        if ci == 0.0 {
            continue;
        }
        for j in 0..=(mi + i) {
            let cj = binomial(mi + i, j) * sign(j);
            for (k, slot) in chi.iter_mut().enumerate() {
                let ck = gen_binomial(p.theta * j as f64, k) * sign(k);
                *slot += ci * cj * ck;
            }
        }
    }
    Ok(chi)
}

/// ψ_{p,q,r} = (−1)^{q+r} C(p, q) C(m+n−1, p) C(θ(m+n−1−p+q), r) for
/// integer m, n. Returns (table indexed [p−m][q][r], exact).
pub fn psi_coeffs(m: f64, n: f64, theta: f64, policy: &TruncationPolicy) -> Result<(Vec<Vec<Vec<f64>>>, bool)> {
    let (mi, ni) = match (integer_value(m), integer_value(n)) {
        (Some(a), Some(b)) if a >= 1 && b >= 1 => (a, b),
        _ => {
            return Err(Error::Precondition(format!(
                "the ψ expansion needs integer m and n, got ({m}, {n})"
            )))
        }
    };
    let big = mi + ni - 1;
    let mut exact = true;
    let mut table = Vec::with_capacity(ni);
    for pp in mi..=big {
        let cp = binomial(big, pp);
        let mut rows = Vec::with_capacity(pp + 1);
        for q in 0..=pp {
            let e = theta * (big - pp + q) as f64;
            let len = match integer_value(e) {
                Some(ei) => ei + 1,
                None => {
                    exact = false;
                    policy.max_terms
                }
            };
            let base = sign(q) * binomial(pp, q) * cp;
            rows.push((0..len).map(|r| base * sign(r) * gen_binomial(e, r)).collect());
        }
        table.push(rows);
    }
    Ok((table, exact))
}

/// Marshall-Olkin pieces at t: (ln f^MO, x = F^MO, ln S).
fn mo_point(b: &BaselineSpec, alpha: f64, t: f64) -> Option<(f64, f64, f64)> {
    let e = b.eval(t);
    if e.ln_pdf == f64::NEG_INFINITY {
        return None;
    }
    let mo = MoTerms::new(&e, alpha);
    let ln_fmo = alpha.ln() + e.ln_pdf - 2.0 * mo.ln_d;
    Some((ln_fmo, mo.ln_one_minus_s.exp(), mo.ln_s))
}

/// The density through one of its series forms.
pub fn pdf_via_expansion(
    d: &BgmoDistribution,
    t: f64,
    form: PdfForm,
    policy: &TruncationPolicy,
) -> Result<SeriesValue> {
    let p = d.params();
    let Some((ln_fmo, x, ln_s)) = mo_point(d.baseline(), p.alpha, t) else {
        return Ok(SeriesValue { value: 0.0, terms: 0, converged: true });
    };
    let dc = delta_coeffs(p.m, p.n, p.theta, policy)?;
    // number of δ terms that matter at this t
    let mut sum = 0.0;
    let mut used = dc.delta.len();
    let mut converged = dc.exact;
    for (j, &dj) in dc.delta.iter().enumerate() {
        let term = dj * ((p.theta * (j as f64 + p.n) - 1.0) * ln_s + ln_fmo).exp();
        sum += term;
        if !dc.exact && j > 0 && term.abs() < policy.tail_tol * sum.abs() {
            used = j + 1;
            converged = true;
            break;
        }
    }
    match form {
        PdfForm::SurvivalPowers => Ok(SeriesValue { value: sum, terms: used, converged }),
        PdfForm::CdfPowers => {
            let (phi, exact_phi) = phi_coeffs(&dc.delta[..used], p.n, p.theta, policy);
            let mut acc = 0.0;
            let mut xl = 1.0;
            let mut conv = converged && exact_phi;
            for (l, &c) in phi.iter().enumerate() {
                let term = c * xl;
                acc += term;
                if !exact_phi && l > 0 && term.abs() < policy.tail_tol * acc.abs() {
                    conv = converged;
                    break;
                }
                xl *= x;
            }
            Ok(SeriesValue {
                value: acc * ln_fmo.exp(),
                terms: phi.len(),
                converged: conv,
            })
        }
    }
}

/// The distribution function through the χ or ψ series.
pub fn cdf_via_expansion(
    d: &BgmoDistribution,
    t: f64,
    form: CdfForm,
    policy: &TruncationPolicy,
) -> Result<SeriesValue> {
    let p = d.params();
    let x = match mo_point(d.baseline(), p.alpha, t) {
        Some((_, x, _)) => x,
        None if t <= d.support_low() => 0.0,
        None => 1.0,
    };
    match form {
        CdfForm::ChiSeries => {
            let (chi, exact) = chi_coeffs(d, policy)?;
            let value = poly_eval(&chi, x);
            let tail = chi.last().map_or(0.0, |c| (c * x.powi(chi.len() as i32 - 1)).abs());
            Ok(SeriesValue {
                value,
                terms: chi.len(),
                converged: exact || tail <= policy.tail_tol.max(1e-300) * value.abs().max(1e-300),
            })
        }
        CdfForm::PsiSeries => {
            let (table, exact) = psi_coeffs(p.m, p.n, p.theta, policy)?;
            let mut value = 0.0;
            let mut terms = 0;
            for rows in &table {
                for row in rows {
                    value += poly_eval(row, x);
                    terms += row.len();
                }
            }
            Ok(SeriesValue { value, terms, converged: exact })
        }
    }
}

/// Coefficients for the order-statistic density in powers of x.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderStatCoeffs {
    /// d_table[p][k]: coefficient of x^k in (Σ χ_k x^k)^p, p = 0..sample_n−1
    pub d_table: Vec<Vec<f64>>,
    /// xi[l][k]
    pub xi: Vec<Vec<f64>>,
    pub exact: bool,
}

fn check_order(r: usize, sample_n: usize) -> Result<()> {
    if r == 0 || r > sample_n {
        return Err(Error::Domain(format!(
            "order statistic index r = {r} outside 1..={sample_n}"
        )));
    }
    Ok(())
}

fn ln_order_const(r: usize, sample_n: usize) -> f64 {
    ln_gamma(sample_n as f64 + 1.0) - ln_gamma(r as f64) - ln_gamma((sample_n - r) as f64 + 1.0)
}

/// ξ_{l,k} = N!/((r−1)!(N−r)!) Σ_j (−1)^j C(N−r, j) φ_l d_{j+r−1,k}. Powers
/// of the χ series come from repeated truncated products: the textbook
/// power recursion divides by χ_0, which is zero here.
pub fn order_stat_coeffs(
    d: &BgmoDistribution,
    r: usize,
    sample_n: usize,
    policy: &TruncationPolicy,
) -> Result<OrderStatCoeffs> {
    check_order(r, sample_n)?;
    let p = d.params();
    let (chi, chi_exact) = chi_coeffs(d, policy)?;
    let dc = delta_coeffs(p.m, p.n, p.theta, policy)?;
    let (phi, phi_exact) = phi_coeffs(&dc.delta, p.n, p.theta, policy);
    let exact = chi_exact && phi_exact && dc.exact;
    let deg_chi = chi.len() - 1;
    let k_len = if exact {
        deg_chi * (sample_n - 1) + 1
    } else {
        policy.max_terms
    };
    let mut d_table = vec![vec![1.0]];
    for _ in 1..sample_n {
        let next = poly_mul(d_table.last().unwrap(), &chi, k_len);
        d_table.push(next);
    }
    let c = ln_order_const(r, sample_n).exp();
    let mut combo = vec![0.0; k_len];
    for j in 0..=(sample_n - r) {
        let w = c * sign(j) * binomial(sample_n - r, j);
        for (slot, &v) in combo.iter_mut().zip(&d_table[j + r - 1]) {
            *slot += w * v;
        }
    }
    let xi = phi
        .iter()
        .map(|&ph| combo.iter().map(|&v| ph * v).collect())
        .collect();
    Ok(OrderStatCoeffs { d_table, xi, exact })
}

/// Density of the r-th order statistic out of `sample_n`.
pub fn order_stat_pdf(
    d: &BgmoDistribution,
    r: usize,
    sample_n: usize,
    t: f64,
    method: OrderMethod,
    policy: &TruncationPolicy,
) -> Result<f64> {
    check_order(r, sample_n)?;
    match method {
        OrderMethod::Direct => {
            let f = d.pdf(t);
            if f == 0.0 {
                return Ok(0.0);
            }
            let (c, s) = d.cdf_sf(t);
            let a = (r - 1) as f64;
            let b = (sample_n - r) as f64;
            let lc = if a == 0.0 { 0.0 } else { a * c.ln() };
            let ls = if b == 0.0 { 0.0 } else { b * s.ln() };
            Ok((ln_order_const(r, sample_n) + f.ln() + lc + ls).exp())
        }
        OrderMethod::Series => {
            let coeffs = order_stat_coeffs(d, r, sample_n, policy)?;
            let Some((ln_fmo, x, _)) = mo_point(d.baseline(), d.params().alpha, t) else {
                return Ok(0.0);
            };
            let mut acc = 0.0;
            for (l, row) in coeffs.xi.iter().enumerate() {
                acc += x.powi(l as i32) * poly_eval(row, x);
            }
            Ok(acc * ln_fmo.exp())
        }
    }
}

/// Γ_{p,q,r} = ∫ t^p x^q S^r f^MO dt for the Marshall-Olkin(α) law of
/// `baseline`. q, r > −1.
pub fn pwm_mo(alpha: f64, baseline: &BaselineSpec, p: u32, q: f64, r: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(q > -1.0) || !(r > -1.0) {
        return Err(Error::Domain(format!(
            "PWM needs alpha > 0 and q, r > -1 (got {alpha}, {q}, {r})"
        )));
    }
    let cfg = QuadConfig::default();
    let mo = GmoParams { alpha, theta: 1.0 };
    let res = integrate_over_support(
        |t| {
            let Some((ln_fmo, x, ln_s)) = mo_point(baseline, alpha, t) else {
                return 0.0;
            };
            let mut l = ln_fmo;
            if p > 0 {
                l += p as f64 * t.ln();
            }
            if q != 0.0 {
                l += q * x.ln();
            }
            if r != 0.0 {
                l += r * ln_s;
            }
            let v = l.exp();
            if v.is_nan() {
                0.0
            } else {
                v
            }
        },
        baseline.support_low(),
        |u| gmo_quantile(&mo, baseline, u),
        &cfg,
    )?;
    Ok(res.value)
}

/// E[T^s] = Σ_j δ_j Γ_{s,0,θ(j+n)−1}.
pub fn moment_series(d: &BgmoDistribution, s: u32, policy: &TruncationPolicy) -> Result<SeriesValue> {
    let p = d.params();
    let dc = delta_coeffs(p.m, p.n, p.theta, policy)?;
    let mut sum = 0.0;
    for (j, &dj) in dc.delta.iter().enumerate() {
        let term = dj * pwm_mo(p.alpha, d.baseline(), s, 0.0, p.theta * (j as f64 + p.n) - 1.0)?;
        sum += term;
        if !dc.exact && j > 0 && term.abs() < policy.tail_tol * sum.abs() {
            return Ok(SeriesValue { value: sum, terms: j + 1, converged: true });
        }
    }
    Ok(SeriesValue {
        value: sum,
        terms: dc.delta.len(),
        converged: dc.exact,
    })
}

/// E[T^s] by direct quadrature of t^s f.
pub fn moment_direct(d: &BgmoDistribution, s: u32) -> Result<f64> {
    Ok(d.expect(|t| t.powi(s as i32), &QuadConfig::default())?.value)
}

/// E[T_{r:N}^s] = Σ_{l,k} ξ_{l,k} Γ_{s,k+l,0}.
pub fn order_stat_moment(
    d: &BgmoDistribution,
    r: usize,
    sample_n: usize,
    s: u32,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let coeffs = order_stat_coeffs(d, r, sample_n, policy)?;
    let mut by_power: Vec<f64> = Vec::new();
    for (l, row) in coeffs.xi.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            if by_power.len() <= l + k {
                by_power.resize(l + k + 1, 0.0);
            }
            by_power[l + k] += v;
        }
    }
    let alpha = d.params().alpha;
    let mut total = 0.0;
    for (power, &c) in by_power.iter().enumerate() {
        if c != 0.0 {
            total += c * pwm_mo(alpha, d.baseline(), s, power as f64, 0.0)?;
        }
    }
    Ok(total)
}

/// E[T_{r:N}^s] by quadrature of the direct order-statistic density.
pub fn order_stat_moment_direct(d: &BgmoDistribution, r: usize, sample_n: usize, s: u32) -> Result<f64> {
    check_order(r, sample_n)?;
    let policy = TruncationPolicy::default();
    let res = integrate_over_support(
        |t| {
            let f = order_stat_pdf(d, r, sample_n, t, OrderMethod::Direct, &policy).unwrap_or(0.0);
            if f == 0.0 {
                0.0
            } else {
                t.powi(s as i32) * f
            }
        },
        d.support_low(),
        |u| d.quantile(u),
        &QuadConfig::default(),
    )?;
    Ok(res.value)
}

/// M_T(s) = E[e^{sT}] by quadrature.
pub fn mgf(d: &BgmoDistribution, s: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(1.0);
    }
    // log space so that e^{st} is not masked by an underflowing density
    let r = integrate_over_support(
        |t| {
            let l = d.ln_pdf(t);
            if l == f64::NEG_INFINITY {
                0.0
            } else {
                (s * t + l).exp()
            }
        },
        d.support_low(),
        |u| d.quantile(u),
        &QuadConfig::default(),
    )
    .map_err(|e| match e {
            Error::Divergence(msg) => Error::Divergence(format!("mgf at s = {s}: upper tail, {msg}")),
            other => other,
        })?;
    Ok(r.value)
}

/// M_T(s) as the mixture Σ_j (−δ′_j) M_{X_j}(s), X_j having survival
/// S^{θ(j+n)} (a GMO law with exponent θ(j+n)). The weights −δ′_j sum to 1.
pub fn mgf_mixture(d: &BgmoDistribution, s: f64, policy: &TruncationPolicy) -> Result<f64> {
    let p = d.params();
    let dc = delta_coeffs(p.m, p.n, p.theta, policy)?;
    let b = d.baseline();
    let mut total = 0.0;
    for (j, &dp) in dc.delta_prime.iter().enumerate() {
        let g = GmoParams {
            alpha: p.alpha,
            theta: p.theta * (j as f64 + p.n),
        };
        let m = integrate_over_support(
            |t| {
                let f = gmo_pdf(&g, b, t);
                if f == 0.0 {
                    0.0
                } else {
                    (s * t).exp() * f
                }
            },
            b.support_low(),
            |u| gmo_quantile(&g, b, u),
            &QuadConfig::default(),
        )?;
        total -= dp * m.value;
    }
    Ok(total)
}

fn check_renyi(delta: f64) -> Result<()> {
    if !(delta > 0.0) || delta == 1.0 || !delta.is_finite() {
        return Err(Error::Domain(format!("Rényi order must be positive and not 1, got {delta}")));
    }
    Ok(())
}

/// (1 − δ)^{-1} ln ∫ f^δ by direct quadrature.
pub fn renyi_entropy_direct(d: &BgmoDistribution, delta: f64) -> Result<f64> {
    check_renyi(delta)?;
    let r = integrate_over_support(
        |t| {
            let l = d.ln_pdf(t);
            if l == f64::NEG_INFINITY {
                0.0
            } else {
                (delta * l).exp()
            }
        },
        d.support_low(),
        |u| d.quantile(u),
        &QuadConfig::default(),
    )?;
    Ok(r.value.ln() / (1.0 - delta))
}

/// (1 − δ)^{-1} ln Σ_j Z_j ∫ (f^MO)^δ S^{θj + δ(θn−1)} dt with
/// Z_j = θ^δ B(m,n)^{−δ} C(δ(m−1), j)(−1)^j.
pub fn renyi_entropy(d: &BgmoDistribution, delta: f64, policy: &TruncationPolicy) -> Result<SeriesValue> {
    check_renyi(delta)?;
    let p = d.params();
    let a = delta * (p.m - 1.0);
    let exact = integer_value(a).is_some();
    let count = integer_value(a).map_or(policy.max_terms, |ai| ai + 1);
    let ln_z0 = delta * (p.theta.ln() - d.ln_beta());
    let b = d.baseline();
    let mo = GmoParams { alpha: p.alpha, theta: 1.0 };
    let mut sum = 0.0;
    let mut used = count;
    let mut converged = exact;
    for j in 0..count {
        let zj = ln_z0.exp() * gen_binomial(a, j) * sign(j);
        if zj == 0.0 {
            continue;
        }
        let power = p.theta * j as f64 + delta * (p.theta * p.n - 1.0);
        let integral = integrate_over_support(
            |t| match mo_point(b, p.alpha, t) {
                Some((ln_fmo, _, ln_s)) => {
                    let v = (delta * ln_fmo + if power == 0.0 { 0.0 } else { power * ln_s }).exp();
                    if v.is_nan() {
                        0.0
                    } else {
                        v
                    }
                }
                None => 0.0,
            },
            b.support_low(),
            |u| gmo_quantile(&mo, b, u),
            &QuadConfig::default(),
        )?
        .value;
        let term = zj * integral;
        sum += term;
        if !exact && j > 0 && term.abs() < policy.tail_tol * sum.abs() {
            used = j + 1;
            converged = true;
            break;
        }
    }
    if !(sum > 0.0) {
        return Err(Error::Numerical(format!("Rényi series sum is not positive ({sum})")));
    }
    Ok(SeriesValue {
        value: sum.ln() / (1.0 - delta),
        terms: used,
        converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailEnd {
    Lower,
    Upper,
}

/// Leading-order tail forms.
///
/// Upper (t → ∞): f ≈ θ α^{θn} g Ḡ^{θn−1}/B, 1 − F ≈ (αḠ)^{θn}/(nB),
/// h ≈ θ n g/Ḡ.
///
/// Lower (G → 0): f ≈ θ^m g G^{m−1}/(B α^m), F ≈ (θG/α)^m/(mB), h ≈ f.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptote {
    dist: BgmoDistribution,
    end: TailEnd,
}

pub fn asymptote(d: &BgmoDistribution, end: TailEnd) -> Asymptote {
    Asymptote { dist: *d, end }
}

impl Asymptote {
    pub fn end(&self) -> TailEnd {
        self.end
    }

    pub fn pdf(&self, t: f64) -> f64 {
        let p = self.dist.params();
        let e = self.dist.baseline().eval(t);
        let lb = self.dist.ln_beta();
        match self.end {
            TailEnd::Upper => (p.theta.ln() + p.theta * p.n * p.alpha.ln() + e.ln_pdf
                + (p.theta * p.n - 1.0) * e.ln_sf
                - lb)
                .exp(),
            TailEnd::Lower => (p.m * p.theta.ln() + e.ln_pdf + (p.m - 1.0) * e.ln_cdf
                - lb
                - p.m * p.alpha.ln())
            .exp(),
        }
    }

    /// F for the lower end, 1 − F for the upper end.
    pub fn tail(&self, t: f64) -> f64 {
        let p = self.dist.params();
        let e = self.dist.baseline().eval(t);
        let lb = self.dist.ln_beta();
        match self.end {
            TailEnd::Upper => (p.theta * p.n * (p.alpha.ln() + e.ln_sf) - p.n.ln() - lb).exp(),
            TailEnd::Lower => {
                (p.m * (p.theta.ln() + e.ln_cdf - p.alpha.ln()) - p.m.ln() - lb).exp()
            }
        }
    }

    pub fn hrf(&self, t: f64) -> f64 {
        let p = self.dist.params();
        match self.end {
            TailEnd::Upper => {
                let e = self.dist.baseline().eval(t);
                p.theta * p.n * (e.ln_pdf - e.ln_sf).exp()
            }
            TailEnd::Lower => self.pdf(t),
        }
    }

    /// Exact/approximant ratios (f, tail, h) at t.
    pub fn ratios(&self, t: f64) -> (f64, f64, f64) {
        let (c, s) = self.dist.cdf_sf(t);
        let exact_tail = match self.end {
            TailEnd::Upper => s,
            TailEnd::Lower => c,
        };
        (
            self.dist.pdf(t) / self.pdf(t),
            exact_tail / self.tail(t),
            self.dist.hrf(t) / self.hrf(t),
        )
    }
}

/// Map a GMO variate with survival exponent `theta` to the baseline axis;
/// used by simulation code that draws GMO order statistics.
pub fn gmo_variate(b: &BaselineSpec, alpha: f64, theta: f64, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("uniform draw {u} outside (0, 1)")));
    }
    invert_mo(b, alpha, (-u).ln_1p() / theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::Family;
    use crate::bgmo::BgmoParams;
    use approx::assert_relative_eq;

    fn dist(m: f64, n: f64, theta: f64, alpha: f64, b: BaselineSpec) -> BgmoDistribution {
        BgmoDistribution::new(BgmoParams::new(m, n, theta, alpha).unwrap(), b)
    }

    fn exp1() -> BaselineSpec {
        BaselineSpec::exponential(1.0).unwrap()
    }

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn delta_examples() {
        let d = delta_coeffs(1.0, 2.5, 0.7, &pol()).unwrap();
        assert_eq!(d.delta.len(), 1);
        assert_relative_eq!(d.delta[0], 0.7 * 2.5, max_relative = 1e-13);
        let d = delta_coeffs(3.0, 1.0, 1.0, &pol()).unwrap();
        for (a, b) in d.delta.iter().zip([3.0, -6.0, 3.0]) {
            assert_relative_eq!(*a, b, max_relative = 1e-13);
        }
        for (m, n, th) in [(3.0, 2.0, 0.6), (4.0, 0.5, 2.0), (1.0, 1.0, 1.0)] {
            let d = delta_coeffs(m, n, th, &pol()).unwrap();
            let s: f64 = d.delta.iter().enumerate().map(|(j, dj)| dj / (th * (j as f64 + n))).sum();
            assert_relative_eq!(s, 1.0, max_relative = 1e-12);
            for (j, (dj, dpj)) in d.delta.iter().zip(&d.delta_prime).enumerate() {
                assert_relative_eq!(*dj, -dpj * th * (j as f64 + n), max_relative = 1e-13);
            }
            let w: f64 = d.delta_prime.iter().map(|v| -v).sum();
            assert_relative_eq!(w, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn termwise_integration_with_quadrature() {
        // each δ_j term integrates to δ_j/(θ(j+n)) over the support
        let b = BaselineSpec::weibull(1.0, 1.5).unwrap();
        let (m, n, th, alpha) = (3.0, 1.5, 0.8, 2.0);
        let dc = delta_coeffs(m, n, th, &pol()).unwrap();
        let mut total = 0.0;
        for (j, &dj) in dc.delta.iter().enumerate() {
            let g = pwm_mo(alpha, &b, 0, 0.0, th * (j as f64 + n) - 1.0).unwrap();
            assert_relative_eq!(g, 1.0 / (th * (j as f64 + n)), max_relative = 1e-8);
            total += dj * g;
        }
        assert_relative_eq!(total, 1.0, max_relative = 1e-8);
    }

    #[test]
    fn pdf_expansions_integer() {
        let d = dist(2.0, 1.0, 1.0, 1.0, exp1());
        let v = pdf_via_expansion(&d, 1.0, PdfForm::SurvivalPowers, &pol()).unwrap();
        assert!((v.value - d.pdf(1.0)).abs() <= 1e-12 && v.converged);
        let d = dist(3.0, 2.0, 2.0, 1.7, BaselineSpec::weibull(0.8, 1.3).unwrap());
        for i in 1..20 {
            let t = d.quantile(i as f64 / 20.0).unwrap();
            let a = pdf_via_expansion(&d, t, PdfForm::SurvivalPowers, &pol()).unwrap();
            let b = pdf_via_expansion(&d, t, PdfForm::CdfPowers, &pol()).unwrap();
            assert!((a.value - d.pdf(t)).abs() <= 1e-10, "t={t}");
            assert!((b.value - d.pdf(t)).abs() <= 1e-10, "t={t}");
            assert!((a.value - b.value).abs() <= 1e-8);
        }
    }

    #[test]
    fn pdf_expansion_fractional_m() {
        let d = dist(2.5, 1.3, 0.7, 1.5, BaselineSpec::weibull(1.0, 2.0).unwrap());
        let t = d.quantile(0.5).unwrap();
        let v = pdf_via_expansion(&d, t, PdfForm::SurvivalPowers, &pol()).unwrap();
        assert!((v.value - d.pdf(t)).abs() <= 1e-6);
        // error shrinks (weakly) with the budget
        let mut last = f64::INFINITY;
        for k in [5, 10, 20, 40, 60] {
            let p = TruncationPolicy::new(k, 1e-300).unwrap();
            let e = (pdf_via_expansion(&d, t, PdfForm::SurvivalPowers, &p).unwrap().value - d.pdf(t)).abs();
            assert!(e <= last * (1.0 + 1e-9) + 1e-16, "k={k}: {e} > {last}");
            last = e;
        }
    }

    #[test]
    fn chi_series() {
        let d = dist(1.0, 1.0, 0.6, 2.0, exp1());
        for &t in &[0.1, 0.4, 0.9] {
            let v = cdf_via_expansion(&d, t, CdfForm::ChiSeries, &pol()).unwrap();
            assert!((v.value - d.cdf(t)).abs() <= 1e-8, "t={t}");
        }
        let d = dist(2.0, 3.0, 2.0, 0.7, exp1());
        let (chi, exact) = chi_coeffs(&d, &pol()).unwrap();
        assert!(exact);
        let triple = chi_coeffs_triple(&d, &pol(), chi.len()).unwrap();
        for (a, b) in chi.iter().zip(&triple) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
        // the triple sum cancels binomials of size C(m+i, j); keep i small
        let short = TruncationPolicy::new(12, 1e-10).unwrap();
        let d = dist(3.0, 1.5, 0.7, 1.3, exp1());
        let (chi, _) = chi_coeffs(&d, &short).unwrap();
        let triple = chi_coeffs_triple(&d, &short, chi.len()).unwrap();
        for (k, (a, b)) in chi.iter().zip(&triple).take(12).enumerate() {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "k={k}: {a} vs {b}");
        }
        assert!(matches!(
            chi_coeffs(&dist(2.5, 1.0, 1.0, 1.0, exp1()), &pol()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn psi_series() {
        let d = dist(2.0, 2.0, 1.0, 1.0, exp1());
        for &t in &[0.0, 0.3, 1.0, 2.5] {
            let v = cdf_via_expansion(&d, t, CdfForm::PsiSeries, &pol()).unwrap();
            assert!((v.value - d.cdf(t)).abs() <= 1e-10, "t={t}");
        }
        let v = cdf_via_expansion(&d, 0.0, CdfForm::ChiSeries, &pol()).unwrap();
        assert_eq!(v.value, 0.0);
        assert!(matches!(
            cdf_via_expansion(&dist(2.0, 1.5, 1.0, 1.0, exp1()), 1.0, CdfForm::PsiSeries, &pol()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn order_statistics() {
        let d = dist(2.0, 2.0, 1.0, 1.5, exp1());
        let t = 0.7;
        let single = order_stat_pdf(&d, 1, 1, t, OrderMethod::Direct, &pol()).unwrap();
        assert_relative_eq!(single, d.pdf(t), max_relative = 1e-13);
        let min2 = order_stat_pdf(&d, 1, 2, t, OrderMethod::Direct, &pol()).unwrap();
        assert_relative_eq!(min2, 2.0 * d.pdf(t) * d.sf(t), max_relative = 1e-13);
        for i in 1..=5 {
            let t = d.quantile(i as f64 / 6.0).unwrap();
            let a = order_stat_pdf(&d, 2, 3, t, OrderMethod::Direct, &pol()).unwrap();
            let b = order_stat_pdf(&d, 2, 3, t, OrderMethod::Series, &pol()).unwrap();
            assert!((a - b).abs() <= 1e-6, "t={t}: {a} vs {b}");
            let mix: f64 = (1..=3)
                .map(|r| order_stat_pdf(&d, r, 3, t, OrderMethod::Direct, &pol()).unwrap())
                .sum::<f64>()
                / 3.0;
            assert!((mix - d.pdf(t)).abs() <= 1e-10);
        }
        assert!(matches!(order_stat_pdf(&d, 0, 3, t, OrderMethod::Direct, &pol()), Err(Error::Domain(_))));
        assert!(matches!(order_stat_pdf(&d, 4, 3, t, OrderMethod::Direct, &pol()), Err(Error::Domain(_))));
    }

    #[test]
    fn pwm_examples() {
        let e = exp1();
        assert_relative_eq!(pwm_mo(1.7, &e, 0, 0.0, 0.0).unwrap(), 1.0, max_relative = 1e-9);
        assert_relative_eq!(pwm_mo(1.0, &e, 1, 0.0, 0.0).unwrap(), 1.0, max_relative = 1e-9);
        assert_relative_eq!(pwm_mo(2.0, &e, 0, 0.0, 1.0).unwrap(), 0.5, max_relative = 1e-9);
        let fr = BaselineSpec::new(Family::Frechet { lambda: 1.5, delta: 1.0 }).unwrap();
        assert!(matches!(pwm_mo(1.0, &fr, 2, 0.0, 0.0), Err(Error::Divergence(_))));
    }

    #[test]
    fn moments() {
        let d = dist(1.0, 1.0, 1.0, 1.0, exp1());
        assert_relative_eq!(moment_series(&d, 1, &pol()).unwrap().value, 1.0, max_relative = 1e-9);
        assert_relative_eq!(moment_series(&d, 2, &pol()).unwrap().value, 2.0, max_relative = 1e-9);
        let d2 = dist(2.0, 1.0, 1.0, 1.0, exp1());
        assert_relative_eq!(moment_series(&d2, 1, &pol()).unwrap().value, 1.5, max_relative = 1e-9);
        assert_relative_eq!(moment_direct(&d2, 1).unwrap(), 1.5, max_relative = 1e-9);
        let d3 = dist(3.0, 1.5, 0.8, 2.0, BaselineSpec::weibull(1.0, 2.0).unwrap());
        for s in 1..=3 {
            let a = moment_series(&d3, s, &pol()).unwrap().value;
            let b = moment_direct(&d3, s).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-5);
        }
    }

    #[test]
    fn order_stat_moments() {
        let d = dist(1.0, 1.0, 1.0, 1.0, exp1());
        assert_relative_eq!(order_stat_moment(&d, 1, 1, 1, &pol()).unwrap(), 1.0, max_relative = 1e-9);
        assert_relative_eq!(order_stat_moment(&d, 1, 2, 1, &pol()).unwrap(), 0.5, max_relative = 1e-9);
        assert_relative_eq!(order_stat_moment(&d, 2, 2, 1, &pol()).unwrap(), 1.5, max_relative = 1e-9);
        assert_relative_eq!(order_stat_moment_direct(&d, 2, 2, 1).unwrap(), 1.5, max_relative = 1e-9);
        let d = dist(2.0, 2.0, 1.0, 1.5, exp1());
        let a = order_stat_moment(&d, 2, 3, 1, &pol()).unwrap();
        let b = order_stat_moment_direct(&d, 2, 3, 1).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-7);
    }

    #[test]
    fn mgf_checks() {
        let d = dist(1.0, 1.0, 1.0, 1.0, exp1());
        assert_eq!(mgf(&d, 0.0).unwrap(), 1.0);
        assert_relative_eq!(mgf(&d, 0.5).unwrap(), 2.0, max_relative = 1e-9);
        assert!(matches!(mgf(&d, 1.5), Err(Error::Divergence(_))));
        let d = dist(3.0, 1.5, 0.8, 2.0, exp1());
        let h = 1e-4;
        let slope = (mgf(&d, h).unwrap() - mgf(&d, -h).unwrap()) / (2.0 * h);
        assert!((slope - moment_series(&d, 1, &pol()).unwrap().value).abs() <= 1e-4);
        assert_relative_eq!(mgf_mixture(&d, 0.3, &pol()).unwrap(), mgf(&d, 0.3).unwrap(), max_relative = 1e-8);
    }

    #[test]
    fn renyi() {
        let d = dist(1.0, 1.0, 1.0, 1.0, exp1());
        for &delta in &[0.5, 2.0] {
            let want = (delta as f64).ln() / (delta - 1.0);
            assert!((renyi_entropy(&d, delta, &pol()).unwrap().value - want).abs() <= 1e-8);
            assert!((renyi_entropy_direct(&d, delta).unwrap() - want).abs() <= 1e-8);
        }
        let d = dist(2.0, 1.5, 0.8, 2.0, BaselineSpec::weibull(1.0, 2.0).unwrap());
        let a = renyi_entropy(&d, 2.0, &pol()).unwrap();
        assert!(a.converged);
        assert!((a.value - renyi_entropy_direct(&d, 2.0).unwrap()).abs() <= 1e-6);
        assert!(renyi_entropy(&d, 1.0, &pol()).is_err());
    }

    #[test]
    fn upper_asymptote_ratios() {
        let d = dist(2.0, 1.5, 0.8, 2.0, exp1());
        let up = asymptote(&d, TailEnd::Upper);
        let (rf, rs, rh) = up.ratios(d.quantile(0.999).unwrap());
        for r in [rf, rs, rh] {
            assert!((r - 1.0).abs() <= 0.02, "{rf} {rs} {rh}");
        }
        let far = up.ratios(d.quantile(1.0 - 1e-9).unwrap());
        assert!((far.0 - 1.0).abs() < (rf - 1.0).abs());
    }

    #[test]
    fn lower_asymptote_converges() {
        let d = dist(2.0, 1.5, 0.8, 2.0, exp1());
        let lo = asymptote(&d, TailEnd::Lower);
        let mut last = f64::INFINITY;
        for &u in &[1e-3, 1e-4, 1e-5, 1e-6, 1e-8] {
            let (rf, rc, rh) = lo.ratios(d.quantile(u).unwrap());
            let worst = [rf, rc, rh].iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
            assert!(worst <= last, "u={u}");
            last = worst;
        }
        assert!(last < 1e-3);
    }
}
