//! Likelihood and fitting behaviour on the bundled datasets.

use bgmo::baseline::BaselineSpec;
use bgmo::bgmo::{BgmoDistribution, BgmoParams};
use bgmo::cli::compare;
use bgmo::data::{builtin_dataset, Builtin};
use bgmo::estimate::{fit_mle, log_likelihood, score, FitConfig, ModelTemplate, ScoreMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dist(m: f64, n: f64, theta: f64, alpha: f64, b: BaselineSpec) -> BgmoDistribution {
    BgmoDistribution::new(BgmoParams::new(m, n, theta, alpha).unwrap(), b)
}

fn bgmo_w() -> ModelTemplate {
    ModelTemplate::new("BGMO-W", dist(1.0, 1.0, 1.0, 1.0, BaselineSpec::weibull(1.0, 1.0).unwrap()))
}

#[test]
fn turbocharger_loglik_at_published_estimates() {
    let d = dist(1.187, 2.057, 0.017, 0.047, BaselineSpec::weibull(0.009, 4.194).unwrap());
    let data = builtin_dataset(Builtin::Turbocharger);
    let l = log_likelihood(&d, &data.values);
    assert!(l.is_finite());
    assert!((l.value - (-80.38)).abs() < 0.5, "{}", l.value);
}

#[test]
fn multi_start_is_seed_stable() {
    for which in Builtin::ALL {
        let data = builtin_dataset(which).values;
        let a = fit_mle(&bgmo_w(), &data, &FitConfig::default()).unwrap();
        let b = fit_mle(&bgmo_w(), &data, &FitConfig { seed: 99, ..FitConfig::default() }).unwrap();
        let tol = 1e-9 * (1.0 + a.log_likelihood.abs());
        // allow for the simplex stopping anywhere in its final f-spread
        assert!((a.log_likelihood - b.log_likelihood).abs() <= 10.0 * tol + 1e-6, "{which}: {} vs {}", a.log_likelihood, b.log_likelihood);
        assert!(a.trace.windows(2).all(|w| w[1] <= w[0]), "{which}: trace not monotone");
        assert!((a.trace.last().unwrap() + a.log_likelihood).abs() < 1e-9);
    }
}

#[test]
fn same_seed_same_result() {
    let data = builtin_dataset(Builtin::Turbocharger).values;
    let cfg = FitConfig { seed: 7, ..FitConfig::default() };
    let a = fit_mle(&bgmo_w(), &data, &cfg).unwrap();
    let b = fit_mle(&bgmo_w(), &data, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn nested_models_never_beat_the_full_model() {
    let data = builtin_dataset(Builtin::Turbocharger).values;
    let rows = compare(
        &data,
        &["mo/weibull".into(), "gmo/weibull".into(), "bgmo/weibull".into(), "beta-g/weibull".into()],
        &FitConfig::default(),
    );
    let ll = |label: &str| rows.iter().find(|r| r.0 == label).unwrap().1.as_ref().unwrap().log_likelihood;
    for sub in ["mo/weibull", "gmo/weibull", "beta-g/weibull"] {
        assert!(ll("bgmo/weibull") >= ll(sub) - 1e-3, "{sub}");
    }
    let aic: Vec<f64> = rows.iter().map(|r| r.1.as_ref().unwrap().criteria.aic).collect();
    assert!(aic.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn analytic_score_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let data = builtin_dataset(Builtin::Turbocharger).values;
    for i in 0..20 {
        let mut u = |a: f64, b: f64| a + (b - a) * rng.gen::<f64>();
        let (m, n, th, al) = (u(0.5, 3.0), u(0.5, 3.0), u(0.3, 3.0), u(0.2, 5.0));
        let b = if i % 2 == 0 {
            BaselineSpec::exponential(u(0.05, 1.0)).unwrap()
        } else {
            BaselineSpec::weibull(u(0.01, 0.5), u(0.5, 3.0)).unwrap()
        };
        let d = dist(m, n, th, al, b);
        let an = score(&d, &data, ScoreMode::Analytic).unwrap();
        assert!(an.notice.is_none());
        let fd = score(&d, &data, ScoreMode::FiniteDifference).unwrap();
        let scale = fd.gradient.iter().fold(1.0f64, |a, g| a.max(g.abs()));
        for (k, (a, f)) in an.gradient.iter().zip(&fd.gradient).enumerate() {
            assert!((a - f).abs() <= 1e-5 * scale, "point {i} param {k}: {a} vs {f}");
        }
    }
}

#[test]
fn interior_fit_has_positive_definite_information() {
    let data = builtin_dataset(Builtin::Nicotine).values;
    let r = fit_mle(&bgmo_w(), &data, &FitConfig::default()).unwrap();
    assert!(r.converged);
    assert!(r.at_bounds.is_empty(), "{:?}", r.at_bounds);
    assert!(r.information_positive_definite);
    assert!(r.std_errors.iter().all(|s| s.is_some_and(|v| v > 0.0)));
}
