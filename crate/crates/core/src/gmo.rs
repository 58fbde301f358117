//! Marshall-Olkin tilt and its Lehmann-II power: the generalized
//! Marshall-Olkin (GMO) layer, with sf [αḠ / (1 − ᾱḠ)]^θ.

use crate::baseline::{BaselineEval, BaselineSpec};
use crate::error::{Error, Result};
use crate::specfun::ln_one_minus_exp;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmoParams {
    pub alpha: f64,
    pub theta: f64,
}

impl GmoParams {
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) || !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "GMO parameters must be positive and finite, got alpha={alpha}, theta={theta}"
            )));
        }
        Ok(Self { alpha, theta })
    }

    /// ᾱ = 1 − α (negative when α > 1).
    pub fn alpha_bar(&self) -> f64 {
        1.0 - self.alpha
    }
}

/// The Marshall-Olkin survival S = αḠ/D with D = 1 − ᾱḠ = G + αḠ, in logs.
/// 1 − S = G/D is kept separately for the lower tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct MoTerms {
    pub ln_s: f64,
    pub ln_one_minus_s: f64,
    pub ln_d: f64,
}

impl MoTerms {
    pub(crate) fn new(e: &BaselineEval, alpha: f64) -> Self {
        let d = e.cdf + alpha * e.sf;
        let ln_d = if e.sf == 0.0 {
            (e.cdf).ln()
        } else {
            d.ln()
        };
        let ln_one_minus_s = e.ln_cdf - ln_d;
        let ratio = e.cdf / d;
        let ln_s = if ratio < 0.5 {
            (-ratio).ln_1p()
        } else {
            alpha.ln() + e.ln_sf - ln_d
        };
        Self {
            ln_s,
            ln_one_minus_s,
            ln_d,
        }
    }
}

/// Maps a Marshall-Olkin survival value (given as ln S) back to the
/// baseline time axis.
pub(crate) fn invert_mo(b: &BaselineSpec, alpha: f64, ln_s: f64) -> Result<f64> {
    if ln_s >= 0.0 {
        return Ok(b.support_low());
    }
    if ln_s == f64::NEG_INFINITY {
        return Ok(f64::INFINITY);
    }
    let s = ln_s.exp();
    let p = -ln_s.exp_m1();
    let denom = alpha * p + s;
    let g = alpha * p / denom;
    if g <= 0.5 {
        if g <= 0.0 {
            return Ok(b.support_low());
        }
        b.quantile(g)
    } else {
        let ln_gbar = if s > 0.0 {
            ln_s - denom.ln()
        } else {
            ln_s - (alpha * p).ln()
        };
        b.inverse_ln_sf(ln_gbar)
    }
}

pub fn gmo_ln_sf(p: &GmoParams, b: &BaselineSpec, t: f64) -> f64 {
    p.theta * MoTerms::new(&b.eval(t), p.alpha).ln_s
}

pub fn gmo_sf(p: &GmoParams, b: &BaselineSpec, t: f64) -> f64 {
    gmo_ln_sf(p, b, t).exp()
}

pub fn gmo_cdf(p: &GmoParams, b: &BaselineSpec, t: f64) -> f64 {
    -gmo_ln_sf(p, b, t).exp_m1()
}

pub fn gmo_ln_pdf(p: &GmoParams, b: &BaselineSpec, t: f64) -> f64 {
    let e = b.eval(t);
    if e.ln_pdf == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mo = MoTerms::new(&e, p.alpha);
    // θ α g / D² · S^{θ−1}
    p.theta.ln() + p.alpha.ln() + e.ln_pdf - 2.0 * mo.ln_d + (p.theta - 1.0) * mo.ln_s
}

pub fn gmo_pdf(p: &GmoParams, b: &BaselineSpec, t: f64) -> f64 {
    gmo_ln_pdf(p, b, t).exp()
}

/// θ h(t) / (1 − ᾱḠ(t)); +∞ where the survival vanishes.
pub fn gmo_hrf(p: &GmoParams, b: &BaselineSpec, t: f64) -> f64 {
    let e = b.eval(t);
    if e.ln_pdf == f64::NEG_INFINITY {
        return 0.0;
    }
    if e.ln_sf == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let mo = MoTerms::new(&e, p.alpha);
    (p.theta.ln() + e.ln_pdf - e.ln_sf - mo.ln_d).exp()
}

pub fn gmo_rhrf(p: &GmoParams, b: &BaselineSpec, t: f64) -> f64 {
    let ln_f = gmo_ln_pdf(p, b, t);
    let ln_cdf = ln_one_minus_exp(gmo_ln_sf(p, b, t));
    if ln_cdf == f64::NEG_INFINITY {
        return if ln_f == f64::NEG_INFINITY { 0.0 } else { f64::INFINITY };
    }
    (ln_f - ln_cdf).exp()
}

pub fn gmo_chrf(p: &GmoParams, b: &BaselineSpec, t: f64) -> f64 {
    -gmo_ln_sf(p, b, t)
}

/// GMO quantile: S^θ = 1 − u, then back through the Marshall-Olkin map.
pub fn gmo_quantile(p: &GmoParams, b: &BaselineSpec, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("GMO quantile: u = {u} outside (0, 1)")));
    }
    invert_mo(b, p.alpha, (-u).ln_1p() / p.theta)
}
