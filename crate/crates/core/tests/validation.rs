use powerburr::distributions::Distribution;
use powerburr::fitting::FitOptions;
use powerburr::sampling::Sampler;
use powerburr::validation::{
    backtest_counts, binomial_backtest, bootstrap_ci, bootstrap_replicates, percentile, Statistic,
};
use powerburr::{ClaimSample, FamilyKind, FamilySpec, RngStream};

fn lognormal() -> FamilySpec {
    FamilySpec::study_default(FamilyKind::LogNormal)
}

#[test]
fn bootstrap_is_deterministic_and_nested() {
    let stat = Statistic::Quantile { epsilon: 0.05 };
    let spec = FamilySpec::study_default(FamilyKind::Gamma);
    let s = RngStream::new(21, 0);
    let a = bootstrap_replicates(&spec, 1000, stat, 200, &s, FitOptions::default()).unwrap();
    let b = bootstrap_replicates(&spec, 1000, stat, 200, &s, FitOptions::default()).unwrap();
    assert_eq!(a, b);
    let i95 = a.interval(0.95).unwrap();
    let i99 = a.interval(0.99).unwrap();
    assert!(i99.lower <= i95.lower && i95.upper <= i99.upper);
    assert!(i95.lower < i95.point && i95.point < i95.upper);
    assert_eq!(i95.point, Distribution::new(&spec).unwrap().quantile(0.95).unwrap());
    assert_eq!(a.failed_refits, 0);
}

#[test]
fn lognormal_interval_width() {
    let ci = bootstrap_ci(
        &lognormal(),
        6446,
        Statistic::Quantile { epsilon: 0.05 },
        0.95,
        1000,
        &RngStream::new(22, 0),
    )
    .unwrap();
    let rel = 0.5 * (ci.upper - ci.lower) / ci.point;
    assert!((rel - 0.035).abs() <= 0.015, "relative half-width {rel}");
}

#[test]
fn percentile_interval_coverage() {
    // Outer loop: draw a sample, fit, bootstrap from the fit, check whether
    // the interval covers the true quantile.
    let truth = lognormal();
    let q = Distribution::new(&truth).unwrap().quantile(0.95).unwrap();
    let sampler = Sampler::from_spec(&truth).unwrap();
    let outer = 200;
    let covered = (0..outer)
        .filter(|&k| {
            let mut rng = RngStream::new(23, k);
            let values = sampler.draw_n(&mut rng, 500);
            let fitted = powerburr::fitting::fit_with(
                &ClaimSample::synthetic(values).unwrap(),
                FamilyKind::LogNormal,
                None,
                FitOptions::default(),
            )
            .unwrap()
            .spec;
            let ci = bootstrap_ci(&fitted, 500, Statistic::Quantile { epsilon: 0.05 }, 0.95, 100, &rng.derive(1))
                .unwrap();
            ci.lower <= q && q <= ci.upper
        })
        .count();
    let rate = covered as f64 / outer as f64;
    assert!((rate - 0.95).abs() <= 0.05, "coverage {rate}");
}

#[test]
fn reserve_statistic_bootstraps() {
    let stat = Statistic::Reserve { lambda: 10.0, epsilon: 0.05, m: 1000 };
    let spec = FamilySpec::study_default(FamilyKind::Weibull);
    let ci = bootstrap_ci(&spec, 500, stat, 0.9, 100, &RngStream::new(24, 0)).unwrap();
    assert!(ci.lower < ci.upper);
    assert!(ci.point > 0.0);
}

#[test]
fn too_few_replicates_rejected() {
    let stat = Statistic::Quantile { epsilon: 0.05 };
    assert!(bootstrap_ci(&lognormal(), 100, stat, 0.95, 99, &RngStream::new(1, 0)).is_err());
    assert!(bootstrap_ci(&lognormal(), 0, stat, 0.95, 100, &RngStream::new(1, 0)).is_err());
}

#[test]
fn type_seven_percentiles() {
    let x = [1.0, 2.0, 3.0, 4.0, 5.0];
    assert_eq!(percentile(&x, 0.0), 1.0);
    assert_eq!(percentile(&x, 1.0), 5.0);
    assert_eq!(percentile(&x, 0.5), 3.0);
    assert!((percentile(&x, 0.1) - 1.4).abs() < 1e-12);
}

#[test]
fn backtest_on_a_sample() {
    let values: Vec<f64> = (1..=1000).map(f64::from).collect();
    let r = binomial_backtest(&ClaimSample::synthetic(values).unwrap(), 950.0, 0.05).unwrap();
    assert_eq!(r.exceedances, 50);
    assert_eq!(r.threshold, Some(950.0));
    assert!((r.p_value - 1.0).abs() < 1e-12);
    // Too many exceedances is rejected at conventional levels.
    assert!(backtest_counts(1000, 0.01, 25).unwrap().p_value < 1e-4);
    assert!(backtest_counts(10, 0.05, 11).is_err());
}
