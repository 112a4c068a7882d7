use powerburr::distributions::Distribution;
use powerburr::fitting::{FitOptions, Fitter};
use powerburr::sampling::Sampler;
use powerburr::study::{emit_table, run_study, StudyConfig, Target, MISSING};
use powerburr::{FamilyKind, FamilySpec, RngStream};

fn small(truth: FamilyKind, families: Vec<FamilyKind>, replications: usize) -> StudyConfig {
    let mut c = StudyConfig::desk(FamilySpec::study_default(truth));
    c.n = 400;
    c.replications = replications;
    c.lambdas = vec![10.0];
    c.m = 2000;
    c.truth_m = 20_000;
    c.master_seed = 77;
    c.families = families;
    c
}

#[test]
fn single_replication_matches_hand_computation() {
    let cfg = small(FamilyKind::Gamma, vec![FamilyKind::Gamma, FamilyKind::LogNormal], 1);
    let res = run_study(&cfg).unwrap();
    let truth = Distribution::new(&cfg.true_spec).unwrap();
    let values = Sampler::from_spec(&cfg.true_spec)
        .unwrap()
        .draw_n(&mut RngStream::new(77, 0), cfg.n);
    let mut fitter = Fitter::from_values(&values, FitOptions::default());
    for kind in [FamilyKind::Gamma, FamilyKind::LogNormal] {
        let spec = fitter.fit(kind).unwrap().spec;
        let target = Target { lambda: None, epsilon: 0.01 };
        let cell = res.cell(kind, &target).unwrap();
        let err = Distribution::new(&spec).unwrap().quantile(0.99).unwrap() - truth.quantile(0.99).unwrap();
        assert!((cell.bias.unwrap() - err).abs() < 1e-12, "{kind}");
        assert_eq!(cell.rmse.unwrap(), err.abs());
        assert_eq!(cell.successes, 1);
    }
}

#[test]
fn rmse_dominates_bias_and_runs_reproduce() {
    let fams = vec![FamilyKind::Gamma, FamilyKind::Pareto, FamilyKind::ExtendedPareto];
    let cfg = small(FamilyKind::Weibull, fams, 6);
    let a = run_study(&cfg).unwrap();
    let b = run_study(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.targets.len(), 4);
    for f in &a.families {
        assert_eq!(f.cells.len(), 4);
        for c in &f.cells {
            if let (Some(bias), Some(rmse)) = (c.bias, c.rmse) {
                assert!(rmse >= bias.abs());
            }
        }
    }
    // The reserve truth exceeds the claim quantile at the same level.
    assert!(a.truths[3] > a.truths[1]);
}

#[test]
fn thread_count_does_not_change_results() {
    let cfg = small(FamilyKind::Pareto, vec![FamilyKind::Pareto, FamilyKind::Weibull], 4);
    let run = |t| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .unwrap()
            .install(|| run_study(&cfg).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn tables_order_rows_and_mark_missing_cells() {
    let a = run_study(&small(FamilyKind::Pareto, vec![FamilyKind::Pareto, FamilyKind::Gamma], 2)).unwrap();
    let b = run_study(&small(FamilyKind::Gamma, vec![FamilyKind::Gamma], 2)).unwrap();
    let target = Target { lambda: Some(10.0), epsilon: 0.05 };
    let t = emit_table(&[a.clone(), b.clone()], &target);
    assert_eq!(t.columns, vec![FamilyKind::Pareto, FamilyKind::Gamma]);
    assert_eq!(t.rows, vec![FamilyKind::Pareto, FamilyKind::Gamma]);
    assert!(t.bias[0][1].is_none() && t.rmse[0][1].is_none());
    assert_eq!(t.bias[1][1], b.cell(FamilyKind::Gamma, &target).unwrap().bias);

    let csv = t.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("block,A\\T,"));
    assert!(lines[1].starts_with("bias,") && lines[3].starts_with("rmse,"));
    assert!(lines[1].ends_with(&format!(",{MISSING}")));

    // Text cells are the CSV cells rounded to three decimals.
    let text = t.to_text(3);
    let text_rows: Vec<Vec<&str>> = text
        .lines()
        .skip(2)
        .filter(|l| !matches!(l.trim(), "bias" | "rmse"))
        .map(|l| l.split_whitespace().collect())
        .collect();
    let csv_rows: Vec<Vec<&str>> = lines[1..].iter().map(|l| l.split(',').collect()).collect();
    assert_eq!(text_rows.len(), csv_rows.len());
    for (tr, cr) in text_rows.iter().zip(&csv_rows) {
        for (tv, cv) in tr[1..].iter().zip(&cr[2..]) {
            if *cv == MISSING {
                assert_eq!(*tv, MISSING);
            } else {
                assert_eq!(*tv, format!("{:.3}", cv.parse::<f64>().unwrap()));
            }
        }
    }
}

#[test]
fn invalid_configs_rejected() {
    let mut c = small(FamilyKind::Gamma, vec![FamilyKind::Gamma], 1);
    c.epsilons.clear();
    assert!(run_study(&c).is_err());
    let mut c = small(FamilyKind::Gamma, vec![], 1);
    c.replications = 1;
    assert!(run_study(&c).is_err());
    let mut c = small(FamilyKind::Gamma, vec![FamilyKind::Gamma], 0);
    assert!(run_study(&c).is_err());
    c.replications = 1;
    c.lambdas = vec![-1.0];
    assert!(run_study(&c).is_err());
}
