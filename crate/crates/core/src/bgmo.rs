//! The beta generalized Marshall-Olkin-G family.
//!
//! With S = αḠ/(1 − ᾱḠ) the Marshall-Olkin survival, the distribution
//! function is F = I_{1−S^θ}(m, n) and the density is
//!
//! f = θ α^θ g Ḡ^{θ−1} / (1 − ᾱḠ)^{θ+1} · (1 − S^θ)^{m−1} S^{θ(n−1)} / B(m, n).
//!
//! All evaluation goes through the logarithm of these expressions.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baseline::{BaselineEval, BaselineSpec};
use crate::error::{Error, Result};
use crate::gmo::{invert_mo, GmoParams, MoTerms};
use crate::quad::{integrate_over_support, QuadConfig, QuadResult};
use crate::specfun::{self, ln_beta_unchecked, ln_one_minus_exp, ToleranceConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BgmoParams {
    pub m: f64,
    pub n: f64,
    pub theta: f64,
    pub alpha: f64,
}

impl BgmoParams {
    pub fn new(m: f64, n: f64, theta: f64, alpha: f64) -> Result<Self> {
        for (name, v) in [("m", m), ("n", n), ("theta", theta), ("alpha", alpha)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { m, n, theta, alpha })
    }

    pub fn gmo(&self) -> GmoParams {
        GmoParams {
            alpha: self.alpha,
            theta: self.theta,
        }
    }
}

/// Sub-families obtained by fixing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    /// θ = 1
    Bmo,
    /// m = n = 1
    Gmo,
    /// m = n = θ = 1
    Mo,
    /// α = θ = 1
    BetaG,
}

/// A value that may come from a division by a vanishing quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flagged {
    pub value: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BgmoDistribution {
    params: BgmoParams,
    baseline: BaselineSpec,
    ln_b: f64,
}

/// Pieces shared by the density, its score and the series code.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PointTerms {
    pub base: BaselineEval,
    pub mo: MoTerms,
    /// ln(1 − S^θ)
    pub ln_w: f64,
}

impl BgmoDistribution {
    pub fn new(params: BgmoParams, baseline: BaselineSpec) -> Self {
        let ln_b = ln_beta_unchecked(params.m, params.n);
        Self {
            params,
            baseline,
            ln_b,
        }
    }

    pub fn params(&self) -> &BgmoParams {
        &self.params
    }

    pub fn baseline(&self) -> &BaselineSpec {
        &self.baseline
    }

    pub fn ln_beta(&self) -> f64 {
        self.ln_b
    }

    pub fn support_low(&self) -> f64 {
        self.baseline.support_low()
    }

    /// Names of the full parameter vector: m, n, θ, α, then the baseline's.
    pub fn param_names(&self) -> Vec<&'static str> {
        let mut v = vec!["m", "n", "theta", "alpha"];
        v.extend(self.baseline.param_names());
        v
    }

    pub fn param_vector(&self) -> Vec<f64> {
        let p = &self.params;
        let mut v = vec![p.m, p.n, p.theta, p.alpha];
        v.extend(self.baseline.params());
        v
    }

    pub fn with_param_vector(&self, v: &[f64]) -> Result<Self> {
        if v.len() < 4 {
            return Err(Error::InvalidParameter(format!(
                "parameter vector too short ({} entries)",
                v.len()
            )));
        }
        let params = BgmoParams::new(v[0], v[1], v[2], v[3])?;
        let baseline = self.baseline.with_params(&v[4..])?;
        Ok(Self::new(params, baseline))
    }

    pub(crate) fn terms(&self, t: f64) -> PointTerms {
        let base = self.baseline.eval(t);
        let mo = MoTerms::new(&base, self.params.alpha);
        let x = mo.ln_one_minus_s.exp();
        let theta = self.params.theta;
        // 1 − (1 − x)^θ = θx(1 − (θ − 1)x/2 + O(x²)); keeps ln w finite when S rounds to 1
        let ln_w = if x < 1e-8 {
            theta.ln() + mo.ln_one_minus_s + (-(theta - 1.0) * x / 2.0).ln_1p()
        } else {
            ln_one_minus_exp(theta * mo.ln_s)
        };
        PointTerms { base, mo, ln_w }
    }

    pub fn ln_pdf(&self, t: f64) -> f64 {
        let PointTerms { base, mo, ln_w } = self.terms(t);
        if base.ln_pdf == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let p = &self.params;
        let w_term = if p.m == 1.0 { 0.0 } else { (p.m - 1.0) * ln_w };
        let s_term = if p.theta * p.n == 1.0 {
            0.0
        } else {
            (p.theta * p.n - 1.0) * mo.ln_s
        };
        -self.ln_b + p.theta.ln() + p.alpha.ln() + base.ln_pdf - 2.0 * mo.ln_d + s_term + w_term
    }

    pub fn pdf(&self, t: f64) -> f64 {
        self.ln_pdf(t).exp()
    }

    /// (F(t), 1 − F(t)), each to full relative precision.
    pub fn cdf_sf(&self, t: f64) -> (f64, f64) {
        let pt = self.terms(t);
        let tol = ToleranceConfig::default();
        let (w, sw) = (pt.ln_w.exp(), (self.params.theta * pt.mo.ln_s).exp());
        match specfun::inc_beta_complementary(w, sw, self.params.m, self.params.n, &tol) {
            Ok(v) => v,
            Err(Error::NonConvergence { best, .. }) => (best, 1.0 - best),
            Err(_) => (f64::NAN, f64::NAN),
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        self.cdf_sf(t).0
    }

    pub fn sf(&self, t: f64) -> f64 {
        self.cdf_sf(t).1
    }

    pub fn hrf_flagged(&self, t: f64) -> Flagged {
        let f = self.pdf(t);
        let s = self.sf(t);
        if s > 0.0 {
            Flagged { value: f / s, degenerate: false }
        } else {
            Flagged { value: f64::INFINITY, degenerate: true }
        }
    }

    pub fn rhrf_flagged(&self, t: f64) -> Flagged {
        let f = self.pdf(t);
        let c = self.cdf(t);
        if c > 0.0 {
            Flagged { value: f / c, degenerate: false }
        } else {
            Flagged { value: f64::INFINITY, degenerate: true }
        }
    }

    /// Hazard f/(1 − F); +∞ where the survival underflows.
    pub fn hrf(&self, t: f64) -> f64 {
        self.hrf_flagged(t).value
    }

    /// Reversed hazard f/F; +∞ where F vanishes.
    pub fn rhrf(&self, t: f64) -> f64 {
        self.rhrf_flagged(t).value
    }

    pub fn chrf(&self, t: f64) -> f64 {
        -self.sf(t).ln()
    }

    /// Inverse of the distribution function on (0, 1).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile: u = {u} outside (0, 1)")));
        }
        let p = &self.params;
        let ln_s = if u <= 0.5 {
            let z = specfun::beta_quantile(u, p.m, p.n)?;
            (-z).ln_1p() / p.theta
        } else {
            let y = specfun::beta_quantile(1.0 - u, p.n, p.m)?;
            y.ln() / p.theta
        };
        invert_mo(&self.baseline, p.alpha, ln_s)
    }

    /// `count` inverse-transform draws from a ChaCha8 stream seeded by `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(Error::Precondition("sample count must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let u: f64 = rng.sample(Open01);
                self.quantile(u)
            })
            .collect()
    }

    /// Bowley skewness from the quartiles.
    pub fn bowley_skewness(&self) -> Result<f64> {
        let q = |u| self.quantile(u);
        let (q1, q2, q3) = (q(0.25)?, q(0.5)?, q(0.75)?);
        let den = q3 - q1;
        if den == 0.0 {
            return Err(Error::Degenerate("interquartile range is zero".into()));
        }
        Ok((q3 + q1 - 2.0 * q2) / den)
    }

    /// Moors kurtosis from the octiles:
    /// [Q(3/8) − Q(1/8) + Q(7/8) − Q(5/8)] / [Q(6/8) − Q(2/8)].
    pub fn moors_kurtosis(&self) -> Result<f64> {
        let o: Vec<f64> = (1..8)
            .map(|i| self.quantile(i as f64 / 8.0))
            .collect::<Result<_>>()?;
        let den = o[5] - o[1];
        if den == 0.0 {
            return Err(Error::Degenerate("octile spread Q(6/8) − Q(2/8) is zero".into()));
        }
        Ok((o[2] - o[0] + o[6] - o[4]) / den)
    }

    /// ∫ h(t) f(t) dt over the support.
    pub fn expect<H: FnMut(f64) -> f64>(&self, mut h: H, cfg: &QuadConfig) -> Result<QuadResult> {
        integrate_over_support(
            |t| {
                let f = self.pdf(t);
                if f == 0.0 {
                    0.0
                } else {
                    h(t) * f
                }
            },
            self.support_low(),
            |u| self.quantile(u),
            cfg,
        )
    }

    /// Maximum absolute difference between this density and an
    /// independently coded density of the reduced family, over 200 points
    /// spread by quantile.
    pub fn reduction_check(&self, target: Reduction) -> Result<f64> {
        let p = self.params;
        let ok = match target {
            Reduction::Bmo => p.theta == 1.0,
            Reduction::Gmo => p.m == 1.0 && p.n == 1.0,
            Reduction::Mo => p.m == 1.0 && p.n == 1.0 && p.theta == 1.0,
            Reduction::BetaG => p.alpha == 1.0 && p.theta == 1.0,
        };
        if !ok {
            return Err(Error::Precondition(format!(
                "parameters {p:?} do not satisfy the constraint of {target:?}"
            )));
        }
        let b_inv = (-self.ln_b).exp();
        let alpha_bar = 1.0 - p.alpha;
        let mut worst: f64 = 0.0;
        for i in 0..200 {
            let t = self.quantile((i as f64 + 0.5) / 200.0)?;
            let g = self.baseline.pdf(t);
            let big_g = self.baseline.cdf(t);
            let gbar = self.baseline.sf(t);
            let d = 1.0 - alpha_bar * gbar;
            let s = p.alpha * gbar / d;
            let reference = match target {
                Reduction::Bmo => {
                    b_inv * p.alpha * g / (d * d) * (1.0 - s).powf(p.m - 1.0) * s.powf(p.n - 1.0)
                }
                Reduction::Gmo => {
                    p.theta * p.alpha.powf(p.theta) * g * gbar.powf(p.theta - 1.0)
                        / d.powf(p.theta + 1.0)
                }
                Reduction::Mo => p.alpha * g / (d * d),
                Reduction::BetaG => b_inv * g * big_g.powf(p.m - 1.0) * gbar.powf(p.n - 1.0),
            };
            worst = worst.max((self.pdf(t) - reference).abs());
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::Family;
    use approx::assert_relative_eq;

    fn dist(m: f64, n: f64, theta: f64, alpha: f64, b: BaselineSpec) -> BgmoDistribution {
        BgmoDistribution::new(BgmoParams::new(m, n, theta, alpha).unwrap(), b)
    }

    fn exp1() -> BaselineSpec {
        BaselineSpec::exponential(1.0).unwrap()
    }

    #[test]
    fn unit_parameters_give_baseline() {
        let w = BaselineSpec::weibull(1.3, 0.7).unwrap();
        let d = dist(1.0, 1.0, 1.0, 1.0, w);
        for &t in &[0.1, 0.5, 2.0, 5.0] {
            assert_relative_eq!(d.pdf(t), w.pdf(t), max_relative = 1e-14);
            assert_relative_eq!(d.cdf(t), w.cdf(t), max_relative = 1e-14);
        }
        assert_relative_eq!(dist(1.0, 1.0, 1.0, 1.0, exp1()).quantile(0.5).unwrap(), std::f64::consts::LN_2, max_relative = 1e-14);
    }

    #[test]
    fn beta_two_one_exponential() {
        let d = dist(2.0, 1.0, 1.0, 1.0, exp1());
        let e1 = (-1.0f64).exp();
        assert_relative_eq!(d.pdf(1.0), 2.0 * e1 * (1.0 - e1), max_relative = 1e-14);
        assert_relative_eq!(d.pdf(1.0), 0.465_08, epsilon = 1e-5);
    }

    #[test]
    fn density_matches_difference_of_cdf() {
        let d = dist(2.5, 1.3, 0.7, 1.5, BaselineSpec::weibull(1.0, 2.0).unwrap());
        let h = 1e-5;
        let fd = (d.cdf(0.8 + h) - d.cdf(0.8 - h)) / (2.0 * h);
        assert_relative_eq!(fd, d.pdf(0.8), max_relative = 1e-6);
    }

    #[test]
    fn cdf_examples() {
        let d = dist(2.0, 3.0, 0.5, 2.0, exp1());
        assert_eq!(d.cdf(0.0), 0.0);
        assert_eq!(d.cdf(-1.0), 0.0);
        assert!(d.cdf(1e3) == 1.0);
        let g = dist(1.0, 1.0, 1.0, 2.0, exp1());
        assert_relative_eq!(g.cdf(std::f64::consts::LN_2), 1.0 / 3.0, max_relative = 1e-14);
        let gp = GmoParams::new(0.6, 2.2).unwrap();
        let g = dist(1.0, 1.0, 2.2, 0.6, exp1());
        for &t in &[0.2, 1.0, 3.0] {
            assert_relative_eq!(g.cdf(t), crate::gmo::gmo_cdf(&gp, &exp1(), t), max_relative = 1e-13);
            assert_relative_eq!(g.hrf(t), crate::gmo::gmo_hrf(&gp, &exp1(), t), max_relative = 1e-12);
        }
    }

    #[test]
    fn reliability_identities() {
        let d = dist(2.0, 1.5, 0.8, 2.0, BaselineSpec::weibull(1.0, 2.0).unwrap());
        let mut last = -1.0;
        for i in 1..60 {
            let t = 0.05 * i as f64;
            let (f, (c, s)) = (d.pdf(t), d.cdf_sf(t));
            assert!((d.hrf(t) * s - f).abs() <= 1e-12 * f.max(1.0));
            assert!((d.rhrf(t) * c - f).abs() <= 1e-12 * f.max(1.0));
            let h = d.chrf(t);
            assert!(h >= last);
            last = h;
        }
        assert!(d.hrf_flagged(1e6).degenerate);
        assert!(d.rhrf_flagged(0.0).degenerate);
        assert!(!d.hrf_flagged(1.0).degenerate);
    }

    #[test]
    fn outside_support_density_zero() {
        let d = dist(2.0, 1.5, 0.8, 2.0, exp1());
        assert_eq!(d.pdf(-1.0), 0.0);
        let p = dist(1.5, 2.0, 1.2, 0.5, BaselineSpec::new(Family::ExponentiatedPareto { scale: 2.0, k: 1.5, gamma: 1.3 }).unwrap());
        assert_eq!(p.pdf(1.9), 0.0);
        assert!(p.pdf(2.5) > 0.0);
    }

    #[test]
    fn deep_tail_log_density_finite() {
        let d = dist(2.0, 1.5, 0.8, 2.0, exp1());
        for &t in &[50.0, 200.0, 600.0] {
            let lf = d.ln_pdf(t);
            assert!(lf.is_finite());
            if lf > -700.0 {
                assert!(d.pdf(t) > 0.0);
            }
        }
        assert!(d.ln_pdf(1e-200).is_finite());
    }

    #[test]
    fn quantile_round_trip_reduced() {
        let d = dist(1.0, 1.0, 0.6, 2.5, exp1());
        for i in 1..20 {
            let u = i as f64 / 20.0;
            let t = d.quantile(u).unwrap();
            let s = (1.0 - u).powf(1.0 / 0.6);
            let direct = exp1().quantile(2.5 * (1.0 - s) / (1.0 - (1.0 - 2.5) * (1.0 - s))).unwrap();
            assert_relative_eq!(t, direct, max_relative = 1e-12);
            assert!((d.cdf(t) - u).abs() <= 1e-12);
        }
        assert!(d.quantile(0.0).is_err());
        assert!(d.quantile(1.0).is_err());
    }

    #[test]
    fn tiny_theta_upper_quantile() {
        // S = (1 − u)^{1/θ} underflows for θ this small
        let d = dist(1.2, 2.0, 0.017, 0.05, BaselineSpec::weibull(0.009, 4.2).unwrap());
        for &u in &[0.01, 0.5, 0.9, 0.999] {
            let t = d.quantile(u).unwrap();
            assert!(t.is_finite());
            assert!((d.cdf(t) - u).abs() <= 1e-8, "u={u} F={}", d.cdf(t));
        }
    }

    #[test]
    fn sampling_is_seeded() {
        let d = dist(2.0, 1.5, 0.8, 2.0, exp1());
        assert_eq!(d.sample(50, 9).unwrap(), d.sample(50, 9).unwrap());
        assert_ne!(d.sample(50, 9).unwrap(), d.sample(50, 10).unwrap());
        assert!(d.sample(0, 1).is_err());
    }

    #[test]
    fn exponential_sample_matches() {
        let d = dist(1.0, 1.0, 1.0, 1.0, exp1());
        let n = 20_000;
        let mut xs = d.sample(n, 2024).unwrap();
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() <= 3.0 / (n as f64).sqrt());
        xs.sort_by(f64::total_cmp);
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let c = 1.0 - (-x).exp();
                (c - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - c).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 1.63 / (n as f64).sqrt(), "ks={ks}");
    }

    #[test]
    fn shape_measures() {
        let d = dist(1.0, 1.0, 1.0, 1.0, exp1());
        let q = |p: f64| -(-p).ln_1p();
        let bowley = (q(0.75) + q(0.25) - 2.0 * q(0.5)) / (q(0.75) - q(0.25));
        assert_relative_eq!(d.bowley_skewness().unwrap(), bowley, max_relative = 1e-12);
        assert_relative_eq!(bowley, 0.2619, epsilon = 1e-4);
        let moors = (q(3.0 / 8.0) - q(1.0 / 8.0) + q(7.0 / 8.0) - q(5.0 / 8.0)) / (q(0.75) - q(0.25));
        assert_relative_eq!(d.moors_kurtosis().unwrap(), moors, max_relative = 1e-12);
        assert_relative_eq!(moors, 1.3063, epsilon = 1e-4);
        let b = dist(2.0, 1.5, 0.8, 2.0, exp1()).bowley_skewness().unwrap();
        assert!((-1.0..=1.0).contains(&b));
    }

    #[test]
    fn reductions() {
        assert!(dist(1.0, 1.0, 1.0, 1.0, exp1()).reduction_check(Reduction::Mo).unwrap() <= 1e-14);
        assert!(dist(2.0, 3.0, 1.0, 2.0, exp1()).reduction_check(Reduction::Bmo).unwrap() <= 1e-12);
        assert!(dist(1.0, 1.0, 2.0, 3.0, exp1()).reduction_check(Reduction::Gmo).unwrap() <= 1e-12);
        let w = BaselineSpec::weibull(0.5, 1.7).unwrap();
        assert!(dist(2.5, 0.7, 1.0, 1.0, w).reduction_check(Reduction::BetaG).unwrap() <= 1e-12);
        assert!(matches!(
            dist(2.0, 3.0, 1.5, 2.0, exp1()).reduction_check(Reduction::Bmo),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn normalizes() {
        let cfg = QuadConfig::default();
        for b in [exp1(), BaselineSpec::new(Family::Frechet { lambda: 3.0, delta: 1.0 }).unwrap()] {
            let d = dist(2.0, 1.5, 0.8, 2.0, b);
            let r = d.expect(|_| 1.0, &cfg).unwrap();
            assert!((r.value - 1.0).abs() < 1e-8, "{}", r.value);
        }
    }

    #[test]
    fn parameter_vector_round_trip() {
        let d = dist(2.0, 1.5, 0.8, 2.0, BaselineSpec::weibull(1.0, 2.0).unwrap());
        assert_eq!(d.param_names(), vec!["m", "n", "theta", "alpha", "lambda", "beta"]);
        let again = d.with_param_vector(&d.param_vector()).unwrap();
        assert_eq!(again, d);
        assert!(d.with_param_vector(&[1.0, 1.0]).is_err());
        assert!(d.with_param_vector(&[1.0, 1.0, 1.0, -1.0, 1.0, 1.0]).is_err());
    }
}
