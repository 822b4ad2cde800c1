use std::time::Instant;

use paving::moments::suite::{run_suite, suite_instances, SizeClass, SuiteName};
use paving::{verify_inequality, InequalityCase, Method, Seed};

#[test]
fn every_case_holds_on_tiny_instances() {
    for case in InequalityCase::ALL {
        let start = Instant::now();
        let recs = run_suite(SuiteName::Case(case), SizeClass::Tiny, Seed(42), 25).unwrap();
        let worst = recs
            .iter()
            .filter_map(|r| r.report.as_ref())
            .map(|r| r.ratio)
            .fold(0.0, f64::max);
        eprintln!("{case}: {} instances, worst ratio {worst:.4}, {:?}", recs.len(), start.elapsed());
        for r in &recs {
            assert!(r.holds, "{r}");
        }
    }
}

#[test]
fn small_instances_hold() {
    for case in [InequalityCase::Step3, InequalityCase::Colnorm, InequalityCase::ModelEquiv] {
        let recs = run_suite(SuiteName::Case(case), SizeClass::Small, Seed(7), 4).unwrap();
        assert!(recs.iter().all(|r| r.holds), "{case}");
    }
}

#[test]
fn monte_carlo_matches_exact_verdicts() {
    for case in [InequalityCase::Decoupling, InequalityCase::Extrap, InequalityCase::Rudelson] {
        for si in suite_instances(case, SizeClass::Tiny, Seed(3), 4) {
            let exact = verify_inequality(case, &si.instance, Method::Exact).unwrap();
            let mc = verify_inequality(case, &si.instance, Method::MonteCarlo { trials: 4000, seed: si.seed }).unwrap();
            assert!(exact.holds && mc.holds);
            assert!((mc.lhs - exact.lhs).abs() <= 4.0 * mc.lhs_stderr + 1e-12, "{case}");
        }
    }
}

#[test]
fn markov_and_sandwich_suites() {
    let markov = run_suite(SuiteName::Markov, SizeClass::Tiny, Seed(0), 0).unwrap();
    assert_eq!(markov.len(), 11);
    assert!(markov.iter().all(|r| r.holds));
    assert!(markov[3].line.contains("lead=4 lead_bound=4.5"), "{}", markov[3].line);
    let sandwich = run_suite(SuiteName::Sandwich, SizeClass::Tiny, Seed(1), 10).unwrap();
    assert!(sandwich.iter().all(|r| r.holds));
}
