//! Globally adaptive 21-point Gauss–Kronrod quadrature, with a mapping for
//! the half-line [a, ∞).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
    pub converged: bool,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_578_326,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: FnMut(f64) -> f64>(g: &mut F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // a node that rounds onto an endpoint may hit an integrable singularity
    let mut f = |x: f64| {
        let v = g(x);
        if !v.is_finite() && !v.is_nan() && (x <= a || x >= b) {
            0.0
        } else {
            v
        }
    };
    let fc = f(center);
    check(fc, center)?;
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        check(f1, center - dx)?;
        check(f2, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

fn check(v: f64, at: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Numerical(format!("integrand is {v} at {at}")))
    }
}

/// ∫_a^b f over a finite interval.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    integrate_pieces(f, &[a, b], cfg)
}

/// ∫ f over the consecutive intervals defined by `points` (strictly
/// increasing, finite), refining all pieces against one global budget.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if points.len() < 2 {
        return Err(Error::Precondition("need at least two integration points".into()));
    }
    if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition(format!(
            "integration points must be finite and increasing: {points:?}"
        )));
    }
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        heap.push(gk21(&mut f, w[0], w[1])?);
    }
    loop {
        let (total, err): (f64, f64) = heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        let target = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if err <= target || heap.len() >= cfg.max_intervals {
            return Ok(QuadResult {
                value: total,
                abs_error: err,
                intervals: heap.len(),
                converged: err <= target,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval cannot be split further in floating point
            heap.push(Segment { error: 0.0, ..worst });
            continue;
        }
        heap.push(gk21(&mut f, worst.a, mid)?);
        heap.push(gk21(&mut f, mid, worst.b)?);
    }
}

/// ∫_a^∞ f. The finite part [a, tail_start] is split at `breaks`; the tail
/// is mapped through t = tail_start / s, s ∈ (0, 1].
///
/// Before integrating, t·f(t) is probed at 10², 10⁴ and 10⁶ times the tail
/// start; if it fails to decay the integral is reported as divergent.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    breaks: &[f64],
    tail_start: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if !(tail_start > a) || !(tail_start > 0.0) {
        return Err(Error::Precondition(format!(
            "tail start {tail_start} must exceed the lower limit {a} and 0"
        )));
    }
    let probes: Vec<f64> = [1e2, 1e4, 1e6]
        .iter()
        .map(|k| {
            let t = tail_start * k;
            (t * f(t)).abs()
        })
        .collect();
    let decays = probes[2] == 0.0 || (probes[1] < probes[0] && probes[2] < probes[1]);
    if !decays {
        return Err(Error::Divergence(format!(
            "t·f(t) does not decay in the upper tail (values {probes:?})"
        )));
    }
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&b| b > a && b < tail_start));
    pts.push(tail_start);
    pts.dedup();
    // both pieces share one adaptive pass: s ∈ (1, 2] is the tail in disguise
    let n = pts.len();
    let top = pts[n - 1];
    pts.push(top + 1.0);
    let mapped = |x: f64| -> f64 {
        if x <= top {
            f(x)
        } else {
            let s = top + 1.0 - x;
            let t = tail_start / s;
            let v = f(t);
            if v == 0.0 {
                0.0
            } else {
                v * tail_start / (s * s)
            }
        }
    };
    integrate_pieces(mapped, &pts, cfg)
}

/// ∫ f over [low, ∞) for a distribution with quantile function `q`:
/// breakpoints sit at a ladder of quantiles and the mapped tail starts at
/// the 0.999 quantile.
pub fn integrate_over_support<F, Q>(f: F, low: f64, q: Q, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
    Q: Fn(f64) -> Result<f64>,
{
    const LADDER: [f64; 9] = [1e-6, 1e-3, 0.02, 0.1, 0.25, 0.5, 0.75, 0.9, 0.98];
    let mut breaks = Vec::with_capacity(LADDER.len());
    for &u in &LADDER {
        let b = q(u)?;
        if b.is_finite() && b > low && breaks.last().map_or(true, |&l| b > l) {
            breaks.push(b);
        }
    }
    let mut tail = q(0.999)?;
    let floor = breaks.last().copied().unwrap_or(low);
    if !(tail > floor) || !tail.is_finite() {
        tail = if floor > 0.0 { 2.0 * floor } else { floor + 1.0 };
    }
    if !(tail > 0.0) {
        tail = 1.0;
        breaks.retain(|&b| b < tail);
    }
    integrate_to_infinity(f, low, &breaks, tail, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rule_weights_sum_to_two() {
        let k: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert_abs_diff_eq!(k, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn polynomials_exact() {
        let cfg = QuadConfig::default();
        for p in 0..=30 {
            let r = integrate(|x| x.powi(p), 0.0, 1.0, &cfg).unwrap();
            assert_abs_diff_eq!(r.value, 1.0 / (p as f64 + 1.0), epsilon = 1e-14);
        }
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x| x.powf(-0.5), 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn half_line() {
        let cfg = QuadConfig::default();
        let r = integrate_to_infinity(|x| (-x).exp(), 0.0, &[0.5], 3.0, &cfg).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
        let r = integrate_to_infinity(|x| 1.0 / (1.0 + x).powi(3), 0.0, &[], 2.0, &cfg).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn divergence_detected() {
        let cfg = QuadConfig::default();
        let r = integrate_to_infinity(|x| 1.0 / (1.0 + x), 0.0, &[], 2.0, &cfg);
        assert!(matches!(r, Err(Error::Divergence(_))));
    }

    #[test]
    fn bad_points_rejected() {
        let cfg = QuadConfig::default();
        assert!(integrate_pieces(|x| x, &[1.0, 0.0], &cfg).is_err());
        assert!(integrate(|_| f64::NAN, 0.0, 1.0, &cfg).is_err());
    }
}
