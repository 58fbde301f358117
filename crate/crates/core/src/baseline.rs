//! Baseline distributions G plugged into the Marshall-Olkin and beta
//! generators.
//!
//! Every family is evaluated through [`BaselineEval`], which carries the
//! log-density together with G and Ḡ computed separately, so that both
//! tails keep relative precision.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::specfun::ln_one_minus_exp;

/// Shape of the cumulative function Z in the extended Weibull family
/// G = 1 − exp(−δ Z(t)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZFunction {
    /// Z = t
    Linear,
    /// Z = t²
    Square,
    /// Z = ln(t / k), support t ≥ k
    LogRatio { k: f64 },
    /// Z = (e^{βt} − 1) / β
    GompertzLink { beta: f64 },
}

impl ZFunction {
    fn value(&self, t: f64) -> f64 {
        match *self {
            ZFunction::Linear => t,
            ZFunction::Square => t * t,
            ZFunction::LogRatio { k } => (t / k).ln(),
            ZFunction::GompertzLink { beta } => (beta * t).exp_m1() / beta,
        }
    }

    fn ln_derivative(&self, t: f64) -> f64 {
        match *self {
            ZFunction::Linear => 0.0,
            ZFunction::Square => (2.0 * t).ln(),
            ZFunction::LogRatio { .. } => -t.ln(),
            ZFunction::GompertzLink { beta } => beta * t,
        }
    }

    fn inverse(&self, z: f64) -> f64 {
        match *self {
            ZFunction::Linear => z,
            ZFunction::Square => z.sqrt(),
            ZFunction::LogRatio { k } => k * z.exp(),
            ZFunction::GompertzLink { beta } => (beta * z).ln_1p() / beta,
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            ZFunction::Linear => "linear",
            ZFunction::Square => "square",
            ZFunction::LogRatio { .. } => "log-ratio",
            ZFunction::GompertzLink { .. } => "gompertz",
        }
    }
}

/// The eight supported baseline families with their parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Exponential { lambda: f64 },
    Weibull { lambda: f64, beta: f64 },
    Lomax { beta: f64, delta: f64 },
    Frechet { lambda: f64, delta: f64 },
    Gompertz { beta: f64, lambda: f64 },
    ExtendedWeibull { delta: f64, z: ZFunction },
    ModifiedWeibull { sigma: f64, beta: f64, gamma: f64 },
    /// G = [1 − (scale/t)^k]^γ on t > scale.
    ExponentiatedPareto { scale: f64, k: f64, gamma: f64 },
}

/// Values of the baseline at one point. `cdf` and `sf` are computed
/// independently (not as 1 − the other).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineEval {
    pub ln_pdf: f64,
    pub cdf: f64,
    pub sf: f64,
    pub ln_cdf: f64,
    pub ln_sf: f64,
}

impl BaselineEval {
    const BELOW: BaselineEval = BaselineEval {
        ln_pdf: f64::NEG_INFINITY,
        cdf: 0.0,
        sf: 1.0,
        ln_cdf: f64::NEG_INFINITY,
        ln_sf: 0.0,
    };

    pub fn pdf(&self) -> f64 {
        self.ln_pdf.exp()
    }

    fn from_cum_hazard(ln_hazard: f64, h: f64) -> Self {
        let ln_sf = -h;
        BaselineEval {
            ln_pdf: ln_hazard - h,
            cdf: -(-h).exp_m1(),
            sf: (-h).exp(),
            ln_cdf: ln_one_minus_exp(-h),
            ln_sf,
        }
    }

    fn from_ln_cdf(ln_pdf: f64, ln_cdf: f64) -> Self {
        BaselineEval {
            ln_pdf,
            cdf: ln_cdf.exp(),
            sf: -ln_cdf.exp_m1(),
            ln_cdf,
            ln_sf: ln_one_minus_exp(ln_cdf),
        }
    }
}

/// A validated baseline distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineSpec {
    family: Family,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

impl BaselineSpec {
    pub fn new(family: Family) -> Result<Self> {
        match family {
            Family::Exponential { lambda } => positive("lambda", lambda)?,
            Family::Weibull { lambda, beta } => {
                positive("lambda", lambda)?;
                positive("beta", beta)?;
            }
            Family::Lomax { beta, delta } => {
                positive("beta", beta)?;
                positive("delta", delta)?;
            }
            Family::Frechet { lambda, delta } => {
                positive("lambda", lambda)?;
                positive("delta", delta)?;
            }
            Family::Gompertz { beta, lambda } => {
                positive("beta", beta)?;
                positive("lambda", lambda)?;
            }
            Family::ExtendedWeibull { delta, z } => {
                positive("delta", delta)?;
                match z {
                    ZFunction::LogRatio { k } => positive("k", k)?,
                    ZFunction::GompertzLink { beta } => positive("beta", beta)?,
                    _ => {}
                }
            }
            Family::ModifiedWeibull { sigma, beta, gamma } => {
                positive("gamma", gamma)?;
                if !(sigma >= 0.0 && beta >= 0.0 && sigma + beta > 0.0)
                    || !sigma.is_finite()
                    || !beta.is_finite()
                {
                    return Err(Error::InvalidParameter(format!(
                        "modified Weibull needs sigma, beta >= 0 with sigma + beta > 0, got ({sigma}, {beta})"
                    )));
                }
            }
            Family::ExponentiatedPareto { scale, k, gamma } => {
                positive("scale", scale)?;
                positive("k", k)?;
                positive("gamma", gamma)?;
            }
        }
        Ok(Self { family })
    }

    pub fn exponential(lambda: f64) -> Result<Self> {
        Self::new(Family::Exponential { lambda })
    }

    pub fn weibull(lambda: f64, beta: f64) -> Result<Self> {
        Self::new(Family::Weibull { lambda, beta })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Lowercase tag used on the command line.
    pub fn tag(&self) -> &'static str {
        match self.family {
            Family::Exponential { .. } => "exponential",
            Family::Weibull { .. } => "weibull",
            Family::Lomax { .. } => "lomax",
            Family::Frechet { .. } => "frechet",
            Family::Gompertz { .. } => "gompertz",
            Family::ExtendedWeibull { .. } => "extended-weibull",
            Family::ModifiedWeibull { .. } => "modified-weibull",
            Family::ExponentiatedPareto { .. } => "exp-pareto",
        }
    }

    pub fn support_low(&self) -> f64 {
        match self.family {
            Family::ExtendedWeibull {
                z: ZFunction::LogRatio { k },
                ..
            } => k,
            Family::ExponentiatedPareto { scale, .. } => scale,
            _ => 0.0,
        }
    }

    pub fn param_names(&self) -> Vec<&'static str> {
        match self.family {
            Family::Exponential { .. } => vec!["lambda"],
            Family::Weibull { .. } => vec!["lambda", "beta"],
            Family::Lomax { .. } => vec!["beta", "delta"],
            Family::Frechet { .. } => vec!["lambda", "delta"],
            Family::Gompertz { .. } => vec!["beta", "lambda"],
            Family::ExtendedWeibull { z, .. } => match z {
                ZFunction::LogRatio { .. } => vec!["delta", "k"],
                ZFunction::GompertzLink { .. } => vec!["delta", "beta"],
                _ => vec!["delta"],
            },
            Family::ModifiedWeibull { .. } => vec!["sigma", "beta", "gamma"],
            Family::ExponentiatedPareto { .. } => vec!["scale", "k", "gamma"],
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self.family {
            Family::Exponential { lambda } => vec![lambda],
            Family::Weibull { lambda, beta } => vec![lambda, beta],
            Family::Lomax { beta, delta } => vec![beta, delta],
            Family::Frechet { lambda, delta } => vec![lambda, delta],
            Family::Gompertz { beta, lambda } => vec![beta, lambda],
            Family::ExtendedWeibull { delta, z } => match z {
                ZFunction::LogRatio { k } => vec![delta, k],
                ZFunction::GompertzLink { beta } => vec![delta, beta],
                _ => vec![delta],
            },
            Family::ModifiedWeibull { sigma, beta, gamma } => vec![sigma, beta, gamma],
            Family::ExponentiatedPareto { scale, k, gamma } => vec![scale, k, gamma],
        }
    }

    /// Same family with a replacement parameter vector (ordered as
    /// [`param_names`](Self::param_names)).
    pub fn with_params(&self, p: &[f64]) -> Result<Self> {
        let want = self.param_names().len();
        if p.len() != want {
            return Err(Error::InvalidParameter(format!(
                "{} takes {want} parameters, got {}",
                self.tag(),
                p.len()
            )));
        }
        let family = match self.family {
            Family::Exponential { .. } => Family::Exponential { lambda: p[0] },
            Family::Weibull { .. } => Family::Weibull { lambda: p[0], beta: p[1] },
            Family::Lomax { .. } => Family::Lomax { beta: p[0], delta: p[1] },
            Family::Frechet { .. } => Family::Frechet { lambda: p[0], delta: p[1] },
            Family::Gompertz { .. } => Family::Gompertz { beta: p[0], lambda: p[1] },
            Family::ExtendedWeibull { z, .. } => Family::ExtendedWeibull {
                delta: p[0],
                z: match z {
                    ZFunction::LogRatio { .. } => ZFunction::LogRatio { k: p[1] },
                    ZFunction::GompertzLink { .. } => ZFunction::GompertzLink { beta: p[1] },
                    other => other,
                },
            },
            Family::ModifiedWeibull { .. } => Family::ModifiedWeibull {
                sigma: p[0],
                beta: p[1],
                gamma: p[2],
            },
            Family::ExponentiatedPareto { .. } => Family::ExponentiatedPareto {
                scale: p[0],
                k: p[1],
                gamma: p[2],
            },
        };
        Self::new(family)
    }

    /// Evaluates density and both tails at `t`. Below the support the
    /// density is 0 and G = 0.
    pub fn eval(&self, t: f64) -> BaselineEval {
        if t.is_nan() {
            return BaselineEval {
                ln_pdf: f64::NAN,
                cdf: f64::NAN,
                sf: f64::NAN,
                ln_cdf: f64::NAN,
                ln_sf: f64::NAN,
            };
        }
        let low = self.support_low();
        if t < low {
            return BaselineEval::BELOW;
        }
        if t == f64::INFINITY {
            return BaselineEval {
                ln_pdf: f64::NEG_INFINITY,
                cdf: 1.0,
                sf: 0.0,
                ln_cdf: 0.0,
                ln_sf: f64::NEG_INFINITY,
            };
        }
        match self.family {
            Family::Exponential { lambda } => BaselineEval::from_cum_hazard(lambda.ln(), lambda * t),
            Family::Weibull { lambda, beta } => {
                let ln_h = if t == 0.0 {
                    if beta == 1.0 {
                        lambda.ln()
                    } else if beta > 1.0 {
                        f64::NEG_INFINITY
                    } else {
                        f64::INFINITY
                    }
                } else {
                    lambda.ln() + beta.ln() + (beta - 1.0) * t.ln()
                };
                BaselineEval::from_cum_hazard(ln_h, lambda * t.powf(beta))
            }
            Family::Lomax { beta, delta } => BaselineEval::from_cum_hazard(
                beta.ln() - (delta + t).ln(),
                beta * (t / delta).ln_1p(),
            ),
            Family::Frechet { lambda, delta } => {
                if t == 0.0 {
                    return BaselineEval::BELOW;
                }
                let r = (delta / t).powf(lambda);
                let ln_pdf = lambda.ln() + lambda * delta.ln() - (lambda + 1.0) * t.ln() - r;
                BaselineEval::from_ln_cdf(ln_pdf, -r)
            }
            Family::Gompertz { beta, lambda } => BaselineEval::from_cum_hazard(
                beta.ln() + lambda * t,
                beta / lambda * (lambda * t).exp_m1(),
            ),
            Family::ExtendedWeibull { delta, z } => {
                let ln_h = delta.ln() + z.ln_derivative(t);
                BaselineEval::from_cum_hazard(ln_h, delta * z.value(t))
            }
            Family::ModifiedWeibull { sigma, beta, gamma } => {
                let h = if t == 0.0 {
                    if gamma == 1.0 {
                        sigma + beta
                    } else if gamma > 1.0 {
                        sigma
                    } else if beta > 0.0 {
                        f64::INFINITY
                    } else {
                        sigma
                    }
                } else {
                    sigma + beta * gamma * t.powf(gamma - 1.0)
                };
                BaselineEval::from_cum_hazard(h.ln(), sigma * t + beta * t.powf(gamma))
            }
            Family::ExponentiatedPareto { scale, k, gamma } => {
                if t == scale {
                    let ln_pdf = if gamma == 1.0 {
                        k.ln() - scale.ln()
                    } else if gamma > 1.0 {
                        f64::NEG_INFINITY
                    } else {
                        f64::INFINITY
                    };
                    return BaselineEval {
                        ln_pdf,
                        ..BaselineEval::BELOW
                    };
                }
                let r = (scale / t).powf(k);
                let l1 = (-r).ln_1p();
                let ln_pdf = gamma.ln() + k.ln() + k * scale.ln() - (k + 1.0) * t.ln()
                    + (gamma - 1.0) * l1;
                BaselineEval::from_ln_cdf(ln_pdf, gamma * l1)
            }
        }
    }

    pub fn pdf(&self, t: f64) -> f64 {
        self.eval(t).pdf()
    }

    pub fn cdf(&self, t: f64) -> f64 {
        self.eval(t).cdf
    }

    pub fn sf(&self, t: f64) -> f64 {
        self.eval(t).sf
    }

    /// Baseline hazard g/Ḡ.
    pub fn hrf(&self, t: f64) -> f64 {
        let e = self.eval(t);
        (e.ln_pdf - e.ln_sf).exp()
    }

    /// Q_G(u) for u in (0, 1).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("baseline quantile: u = {u} outside (0, 1)")));
        }
        Ok(self.invert(-(-u).ln_1p(), u.ln()))
    }

    /// Solves Ḡ(t) = q for q in (0, 1); accurate when q is tiny.
    pub fn inverse_sf(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("baseline inverse_sf: q = {q} outside (0, 1)")));
        }
        Ok(self.invert(-q.ln(), (-q).ln_1p()))
    }

    /// Solves ln Ḡ(t) = `ln_q` for `ln_q` < 0; usable when Ḡ underflows.
    pub fn inverse_ln_sf(&self, ln_q: f64) -> Result<f64> {
        if !(ln_q < 0.0) {
            return Err(Error::Domain(format!("baseline inverse_ln_sf: ln q = {ln_q} must be negative")));
        }
        if ln_q == f64::NEG_INFINITY {
            return Ok(f64::INFINITY);
        }
        Ok(self.invert(-ln_q, ln_one_minus_exp(ln_q)))
    }

    /// Point with cumulative hazard `h` = −ln Ḡ, equivalently ln G = `ln_u`.
    /// Each family uses whichever of the two is its natural coordinate.
    fn invert(&self, h: f64, ln_u: f64) -> f64 {
        match self.family {
            Family::Exponential { lambda } => h / lambda,
            Family::Weibull { lambda, beta } => (h / lambda).powf(1.0 / beta),
            Family::Lomax { beta, delta } => delta * (h / beta).exp_m1(),
            Family::Frechet { lambda, delta } => delta * (-ln_u).powf(-1.0 / lambda),
            Family::Gompertz { beta, lambda } => (lambda / beta * h).ln_1p() / lambda,
            Family::ExtendedWeibull { delta, z } => z.inverse(h / delta),
            Family::ModifiedWeibull { sigma, beta, gamma } => {
                let cum = |t: f64| sigma * t + beta * t.powf(gamma);
                let mut hi = 1.0;
                while cum(hi) < h {
                    hi *= 2.0;
                }
                let mut lo = 0.0;
                for _ in 0..2000 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if cum(mid) < h {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
            Family::ExponentiatedPareto { scale, k, gamma } => {
                let r = -(ln_u / gamma).exp_m1();
                scale * r.powf(-1.0 / k)
            }
        }
    }

    /// Whether [`partials`](Self::partials) has closed forms for this family.
    pub fn has_partials(&self) -> bool {
        matches!(self.family, Family::Exponential { .. } | Family::Weibull { .. })
    }

    /// Per-parameter (∂ ln g/∂p, ∂ ln Ḡ/∂p) at `t`, for the families with
    /// coded derivatives.
    pub fn partials(&self, t: f64) -> Option<Vec<(f64, f64)>> {
        match self.family {
            Family::Exponential { lambda } => Some(vec![(1.0 / lambda - t, -t)]),
            Family::Weibull { lambda, beta } => {
                let tb = t.powf(beta);
                let lt = t.ln();
                Some(vec![
                    (1.0 / lambda - tb, -tb),
                    (1.0 / beta + lt - lambda * tb * lt, -lambda * tb * lt),
                ])
            }
            _ => None,
        }
    }
}

impl fmt::Display for BaselineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())?;
        if let Family::ExtendedWeibull { z, .. } = self.family {
            write!(f, " z={}", z.tag())?;
        }
        for (name, v) in self.param_names().iter().zip(self.params()) {
            write!(f, " {name}={v}")?;
        }
        Ok(())
    }
}

impl FromStr for BaselineSpec {
    type Err = Error;

    /// Parses `"<family> name=value ..."`, e.g. `"weibull lambda=1 beta=2"`
    /// or `"extended-weibull z=log-ratio delta=2 k=1"`. Omitted parameters
    /// default to 1.
    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.split_whitespace();
        let tag = tokens
            .next()
            .ok_or_else(|| Error::InvalidParameter("empty baseline specification".into()))?
            .to_ascii_lowercase();
        let mut pairs: Vec<(String, String)> = Vec::new();
        for tok in tokens {
            let (k, v) = tok.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("expected name=value, got `{tok}`"))
            })?;
            pairs.push((k.to_ascii_lowercase(), v.to_string()));
        }
        let z_tag = pairs
            .iter()
            .find(|(k, _)| k == "z")
            .map(|(_, v)| v.to_ascii_lowercase());
        let template = match tag.as_str() {
            "exponential" | "exp" => Family::Exponential { lambda: 1.0 },
            "weibull" => Family::Weibull { lambda: 1.0, beta: 1.0 },
            "lomax" => Family::Lomax { beta: 1.0, delta: 1.0 },
            "frechet" => Family::Frechet { lambda: 1.0, delta: 1.0 },
            "gompertz" => Family::Gompertz { beta: 1.0, lambda: 1.0 },
            "extended-weibull" | "ew" => {
                let z = match z_tag.as_deref() {
                    None | Some("linear") => ZFunction::Linear,
                    Some("square") => ZFunction::Square,
                    Some("log-ratio") => ZFunction::LogRatio { k: 1.0 },
                    Some("gompertz") => ZFunction::GompertzLink { beta: 1.0 },
                    Some(other) => {
                        return Err(Error::InvalidParameter(format!("unknown Z function `{other}`")))
                    }
                };
                Family::ExtendedWeibull { delta: 1.0, z }
            }
            "modified-weibull" | "mw" => Family::ModifiedWeibull {
                sigma: 1.0,
                beta: 1.0,
                gamma: 1.0,
            },
            "exp-pareto" | "exponentiated-pareto" => Family::ExponentiatedPareto {
                scale: 1.0,
                k: 1.0,
                gamma: 1.0,
            },
            other => return Err(Error::InvalidParameter(format!("unknown baseline `{other}`"))),
        };
        let base = BaselineSpec { family: template };
        let names = base.param_names();
        let mut values = base.params();
        for (k, v) in &pairs {
            if k == "z" {
                continue;
            }
            let idx = names.iter().position(|n| n == k).ok_or_else(|| {
                Error::InvalidParameter(format!("{} has no parameter `{k}`", base.tag()))
            })?;
            values[idx] = v
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad value for {k}: `{v}`")))?;
        }
        base.with_params(&values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gallery() -> Vec<BaselineSpec> {
        [
            Family::Exponential { lambda: 1.3 },
            Family::Weibull { lambda: 0.7, beta: 2.2 },
            Family::Weibull { lambda: 1.5, beta: 0.6 },
            Family::Lomax { beta: 2.5, delta: 1.5 },
            Family::Frechet { lambda: 2.0, delta: 1.2 },
            Family::Gompertz { beta: 0.4, lambda: 0.8 },
            Family::ExtendedWeibull { delta: 0.9, z: ZFunction::Linear },
            Family::ExtendedWeibull { delta: 0.9, z: ZFunction::Square },
            Family::ExtendedWeibull { delta: 1.7, z: ZFunction::LogRatio { k: 0.5 } },
            Family::ExtendedWeibull { delta: 0.6, z: ZFunction::GompertzLink { beta: 0.3 } },
            Family::ModifiedWeibull { sigma: 0.5, beta: 1.0, gamma: 2.5 },
            Family::ModifiedWeibull { sigma: 0.0, beta: 2.0, gamma: 0.7 },
            Family::ExponentiatedPareto { scale: 1.0, k: 2.0, gamma: 1.5 },
        ]
        .into_iter()
        .map(|f| BaselineSpec::new(f).unwrap())
        .collect()
    }

    #[test]
    fn spot_values() {
        let e = BaselineSpec::exponential(1.0).unwrap();
        assert_eq!(e.pdf(0.0), 1.0);
        assert_relative_eq!(e.cdf(std::f64::consts::LN_2), 0.5, epsilon = 1e-15);
        let w = BaselineSpec::weibull(1.0, 2.0).unwrap();
        assert_relative_eq!(w.pdf(1.0), 2.0 * (-1.0f64).exp(), epsilon = 1e-15);
        let l = BaselineSpec::new(Family::Lomax { beta: 1.0, delta: 1.0 }).unwrap();
        assert_relative_eq!(l.cdf(1.0), 0.5, epsilon = 1e-15);
        let fr = BaselineSpec::new(Family::Frechet { lambda: 1.0, delta: 1.0 }).unwrap();
        assert!(fr.cdf(1e-3) < 1e-300);
        assert_eq!(fr.cdf(0.0), 0.0);
    }

    #[test]
    fn outside_support_is_zero() {
        let e = BaselineSpec::exponential(1.0).unwrap();
        assert_eq!(e.pdf(-1.0), 0.0);
        assert_eq!(e.cdf(-1.0), 0.0);
        assert_eq!(e.sf(-1.0), 1.0);
        let p = BaselineSpec::new(Family::ExponentiatedPareto { scale: 2.0, k: 1.0, gamma: 1.0 }).unwrap();
        assert_eq!(p.support_low(), 2.0);
        assert_eq!(p.pdf(1.5), 0.0);
    }

    #[test]
    fn quantile_examples() {
        let e = BaselineSpec::exponential(2.0).unwrap();
        assert_relative_eq!(e.quantile(0.5).unwrap(), std::f64::consts::LN_2 / 2.0, epsilon = 1e-15);
        let w = BaselineSpec::weibull(1.0, 2.0).unwrap();
        assert_relative_eq!(w.quantile(1.0 - (-1.0f64).exp()).unwrap(), 1.0, epsilon = 1e-14);
        assert!(e.quantile(0.0).is_err());
        assert!(e.quantile(1.0).is_err());

        // bisection oracle on σt + βt^γ = ln 2
        let mw = BaselineSpec::new(Family::ModifiedWeibull { sigma: 1.0, beta: 1.0, gamma: 2.0 }).unwrap();
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid + mid * mid < std::f64::consts::LN_2 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_relative_eq!(mw.quantile(0.5).unwrap(), lo, epsilon = 1e-14);
    }

    #[test]
    fn cdf_plus_sf_is_one() {
        for b in gallery() {
            let lo = b.support_low();
            for i in 0..50 {
                let t = lo + 0.05 + 0.1 * i as f64;
                let e = b.eval(t);
                assert!((e.cdf + e.sf - 1.0).abs() <= 2e-16, "{b} t={t}");
            }
        }
    }

    #[test]
    fn density_is_derivative_of_cdf() {
        for b in gallery() {
            for &u in &[0.05, 0.2, 0.5, 0.8, 0.95] {
                let t = b.quantile(u).unwrap();
                let h = 1e-5 * t.abs().max(1e-3);
                // differentiate whichever tail is smaller to limit cancellation
                let d = if u < 0.5 {
                    (b.cdf(t + h) - b.cdf(t - h)) / (2.0 * h)
                } else {
                    (b.sf(t - h) - b.sf(t + h)) / (2.0 * h)
                };
                let g = b.pdf(t);
                assert!(((d - g) / g).abs() <= 1e-6, "{b} u={u} fd={d} pdf={g}");
            }
        }
    }

    #[test]
    fn quantile_is_right_inverse() {
        for b in gallery() {
            for i in 1..=99 {
                let u = i as f64 / 100.0;
                let t = b.quantile(u).unwrap();
                assert!((b.cdf(t) - u).abs() <= 1e-10, "{b} u={u}");
                let s = b.inverse_sf(1.0 - u).unwrap();
                assert!((b.sf(s) - (1.0 - u)).abs() <= 1e-10, "{b} q={}", 1.0 - u);
            }
            let tiny = b.inverse_sf(1e-200).unwrap();
            assert!((b.eval(tiny).ln_sf / (1e-200f64).ln() - 1.0).abs() < 1e-10, "{b}");
            let deep = b.inverse_ln_sf(-500.0).unwrap();
            assert!((b.eval(deep).ln_sf / -500.0 - 1.0).abs() < 1e-10, "{b}");
        }
    }

    #[test]
    fn extended_weibull_reductions() {
        let grid: Vec<f64> = (1..200).map(|i| 0.03 * i as f64).collect();
        let check = |a: BaselineSpec, b: BaselineSpec| {
            for &t in &grid {
                let t = t + a.support_low();
                assert!((a.cdf(t) - b.cdf(t)).abs() <= 1e-12, "{a} vs {b} at {t}");
            }
        };
        let ew = |delta, z| BaselineSpec::new(Family::ExtendedWeibull { delta, z }).unwrap();
        check(ew(1.4, ZFunction::Linear), BaselineSpec::exponential(1.4).unwrap());
        check(ew(0.8, ZFunction::Square), BaselineSpec::weibull(0.8, 2.0).unwrap());
        check(
            ew(1.7, ZFunction::LogRatio { k: 0.5 }),
            BaselineSpec::new(Family::ExponentiatedPareto { scale: 0.5, k: 1.7, gamma: 1.0 }).unwrap(),
        );
        check(
            ew(0.6, ZFunction::GompertzLink { beta: 0.3 }),
            BaselineSpec::new(Family::Gompertz { beta: 0.6, lambda: 0.3 }).unwrap(),
        );
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(BaselineSpec::exponential(0.0).is_err());
        assert!(BaselineSpec::weibull(1.0, -1.0).is_err());
        assert!(BaselineSpec::new(Family::ModifiedWeibull { sigma: 0.0, beta: 0.0, gamma: 1.0 }).is_err());
        assert!(BaselineSpec::new(Family::ModifiedWeibull { sigma: 0.0, beta: 1.0, gamma: 1.0 }).is_ok());
    }

    #[test]
    fn parse_and_display_round_trip() {
        let b: BaselineSpec = "weibull lambda=1.0 beta=2.0".parse().unwrap();
        assert_eq!(b, BaselineSpec::weibull(1.0, 2.0).unwrap());
        for b in gallery() {
            let again: BaselineSpec = b.to_string().parse().unwrap();
            assert_eq!(again, b);
        }
        assert!("weibull gamma=2".parse::<BaselineSpec>().is_err());
        assert!("cauchy".parse::<BaselineSpec>().is_err());
        assert!("weibull lambda".parse::<BaselineSpec>().is_err());
    }

    #[test]
    fn analytic_partials_match_differences() {
        for b in [BaselineSpec::exponential(1.3).unwrap(), BaselineSpec::weibull(0.7, 1.8).unwrap()] {
            let p = b.params();
            for &t in &[0.3, 1.0, 2.4] {
                let an = b.partials(t).unwrap();
                for i in 0..p.len() {
                    let h = 1e-6 * p[i];
                    let mut up = p.clone();
                    let mut dn = p.clone();
                    up[i] += h;
                    dn[i] -= h;
                    let (eu, ed) = (b.with_params(&up).unwrap().eval(t), b.with_params(&dn).unwrap().eval(t));
                    let dg = (eu.ln_pdf - ed.ln_pdf) / (2.0 * h);
                    let ds = (eu.ln_sf - ed.ln_sf) / (2.0 * h);
                    assert_relative_eq!(an[i].0, dg, epsilon = 1e-7, max_relative = 1e-6);
                    assert_relative_eq!(an[i].1, ds, epsilon = 1e-7, max_relative = 1e-6);
                }
            }
        }
    }
}
