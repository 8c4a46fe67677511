//! Acceptance suite: one test per shipping criterion, exact comparisons
//! throughout (tolerance zero unless a criterion states otherwise). Run
//! with `cargo test -p lagro-core --test acceptance -- --nocapture` to see
//! the per-criterion pass lines.

use lagro_core::engine::{
    inner_ccg, multiplier_from_indicator_certificate, solve_exact_worst_case_indicator,
    solve_with_restarts, Caps, InnerOutcome, Method, SolveOptions,
};
use lagro_core::instances::{
    gen_counterexample, gen_interdiction, gen_network_design_small, gen_random_general,
    gen_random_indicator, RandomSpec,
};
use lagro_core::linalg::ivec;
use lagro_core::model::{eval_l, eval_q, Instance};
use lagro_core::multiplier::{
    check_conditions_general, closed_form_multiplier, compute_u_l, polynomial_lambda_bound,
    UpperBoundMode,
};
use lagro_core::oracle::{
    min_optimal_multiplier, solve_two_stage_bruteforce, solve_two_stage_bruteforce_indicator,
    worst_case_l, worst_case_li, worst_case_q, worst_case_qi,
};
use lagro_core::scalar::{frac, rat, ExtValue, Scalar};
use num_traits::Zero;
use rand::{Rng, SeedableRng};

fn pass(n: usize, what: &str) {
    println!("criterion {n:02}: PASS - {what}");
}

/// Exact closed form of the worst-case Lagrangian of the refutation
/// instance: max(-1, min(0, lambda/2 - 1)).
fn curve(lambda: &Scalar) -> Scalar {
    let inner = (lambda / rat(2) - rat(1)).min(rat(0));
    inner.max(rat(-1))
}

#[test]
fn a01_worst_case_lagrangian_curve_exact() {
    let inst = gen_counterexample(rat(1));
    let x = ivec(&[0]);
    for lambda in [
        rat(0),
        frac(1, 2),
        rat(1),
        frac(3, 2),
        rat(2),
        rat(3),
        rat(4),
    ] {
        let (v, _) = worst_case_l(&inst, &x, &lambda).unwrap();
        assert_eq!(
            v,
            ExtValue::finite(curve(&lambda)),
            "curve mismatch at lambda = {lambda}"
        );
    }
    pass(1, "worst-case Lagrangian equals max(-1, min(0, lambda/2 - 1)) on the grid");
}

#[test]
fn a02_closed_form_multiplier_refuted() {
    let inst = gen_counterexample(rat(1));
    let x = ivec(&[0]);
    let (u, l) = compute_u_l(&inst, &x).unwrap();
    let lam = closed_form_multiplier(&u, &l).unwrap();
    assert_eq!(lam, rat(1), "u - l must equal 1");
    let (lv, _) = worst_case_l(&inst, &x, &lam).unwrap();
    let (qv, _) = worst_case_q(&inst, &x).unwrap();
    assert_eq!(lv, ExtValue::finite(frac(-1, 2)));
    assert_eq!(qv, ExtValue::finite(rat(0)));
    assert_ne!(lv, qv, "the gap at u - l is the point of the refutation");
    pass(2, "u - l = 1 yields -1/2 < 0: the closed form is not optimal here");
}

#[test]
fn a03_scaled_gap() {
    for gamma in [rat(1), rat(10), rat(100)] {
        let inst = gen_counterexample(gamma.clone());
        let x = ivec(&[0]);
        let (u, l) = compute_u_l(&inst, &x).unwrap();
        let lam = closed_form_multiplier(&u, &l).unwrap();
        assert_eq!(lam, gamma, "scaling multiplies the closed form by gamma");
        let (qv, _) = worst_case_q(&inst, &x).unwrap();
        let (lv, _) = worst_case_l(&inst, &x, &lam).unwrap();
        let gap = qv.expect_finite("q").unwrap() - lv.expect_finite("l").unwrap();
        assert_eq!(gap, gamma / rat(2), "gap must be exactly gamma/2");
    }
    pass(3, "additive gap gamma/2 for gamma in {1, 10, 100}");
}

#[test]
fn a04_inner_loop_trace() {
    let inst = gen_counterexample(rat(1));
    let mut trace = Vec::new();
    let out = inner_ccg(
        &inst,
        &ivec(&[0]),
        &rat(1),
        &Scalar::zero(),
        Vec::new(),
        &Caps::default(),
        &mut trace,
    )
    .unwrap();
    match out {
        InnerOutcome::Converged {
            lambda,
            lower,
            upper,
            ..
        } => {
            assert_eq!(lower, rat(0));
            assert_eq!(upper, rat(0));
            assert!(
                lambda == rat(2) || lambda == rat(4),
                "final multiplier {lambda} outside the enumerated outcome branches"
            );
        }
        other => panic!("expected convergence, got {other:?}"),
    }
    pass(4, "inner loop stops with LB = UB = 0 and multiplier in {2, 4}");
}

#[test]
fn a05_sufficient_conditions_suite() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(501);
    for k in 0..20u64 {
        let n = 2 + (k as usize) % 3; // n in {2, 3, 4}
        let inst = gen_interdiction(n, k);
        let report = check_conditions_general(&inst);
        assert!(report.overall, "instance {k} must satisfy the conditions");
        for x in &inst.x_set {
            let (qv, _) = worst_case_q(&inst, x).unwrap();
            let ExtValue::Finite(_) = qv else { continue };
            let (u, l) = compute_u_l(&inst, x).unwrap();
            let lam = closed_form_multiplier(&u, &l).unwrap();
            let (lv, _) = worst_case_l(&inst, x, &lam).unwrap();
            assert_eq!(lv, qv, "closed form must be optimal on instance {k}");
        }
        let _ = rng.gen::<u64>();
    }
    let ce = check_conditions_general(&gen_counterexample(rat(1)));
    assert!(!ce.overall, "the refutation instance must fail the check");
    pass(5, "20 interdiction instances pass and close the gap; the refutation instance fails");
}

#[test]
fn a06_polynomial_bound_suite() {
    let mut collected = 0;
    let mut seed = 0u64;
    while collected < 20 {
        seed += 1;
        assert!(seed < 400, "generator failed to produce 20 qualifying instances");
        let mut spec = RandomSpec::default();
        spec.homogeneous = true;
        spec.np = 2;
        spec.nc2 = (seed % 2) as usize;
        spec.nd2 = 1;
        spec.m = 2;
        let inst = match gen_random_general(&spec, seed) {
            Ok(i) => i,
            Err(_) => continue,
        };
        let bound = match polynomial_lambda_bound(&inst, UpperBoundMode::BruteForce) {
            Ok(b) => b,
            Err(_) => continue,
        };
        // Bound dominates the bisected minimal optimal multiplier at every
        // feasible first stage.
        for x in &inst.x_set {
            if !worst_case_q(&inst, x).unwrap().0.is_finite() {
                continue;
            }
            let (_, hi) = min_optimal_multiplier(&inst, x, &bound.lambda_bar).unwrap();
            assert!(hi <= bound.lambda_bar, "seed {seed}");
        }
        // Two-stage equality at the bound, by enumeration.
        let (q_opt, _) = solve_two_stage_bruteforce(&inst).unwrap();
        let l_opt = inst
            .x_set
            .iter()
            .map(|x| worst_case_l(&inst, x, &bound.lambda_bar).unwrap().0)
            .min()
            .unwrap();
        assert_eq!(l_opt, q_opt, "seed {seed}");
        collected += 1;
    }
    pass(6, "20 homogeneous instances: bound dominates the bisection and closes the two-stage gap");
}

#[test]
fn a07_expost_multiplier_suite() {
    // Indicator side.
    let mut checked_i = 0;
    let mut seed = 0u64;
    while checked_i < 20 {
        seed += 1;
        assert!(seed < 300, "indicator generator exhausted");
        let inst = match gen_random_indicator(&RandomSpec::default(), seed) {
            Ok(i) => i,
            Err(_) => continue,
        };
        let Some(x) = inst
            .x_set
            .iter()
            .find(|x| matches!(worst_case_qi(&inst, x), Ok((v, _)) if v.is_finite()))
        else {
            continue;
        };
        let wc = solve_exact_worst_case_indicator(&inst, x).unwrap();
        let cert = wc.certificate.expect("feasible x has a certificate");
        let lam = multiplier_from_indicator_certificate(&cert.rho, &cert.nu);
        let (lv, _) = worst_case_li(&inst, x, &lam).unwrap();
        let (qv, _) = worst_case_qi(&inst, x).unwrap();
        assert_eq!(lv, qv, "seed {seed}: extracted multiplier must close the gap");
        assert_eq!(wc.value, qv, "seed {seed}: verification value is the worst case");
        checked_i += 1;
    }
    // General side: the full discrete pool collapses the restricted worst
    // case to the true one, so the extracted multiplier must close the
    // plain worst-case gap.
    let mut checked_g = 0;
    seed = 1000;
    while checked_g < 20 {
        seed += 1;
        assert!(seed < 1300, "general generator exhausted");
        let inst = match gen_random_general(&RandomSpec::default(), seed) {
            Ok(i) => i,
            Err(_) => continue,
        };
        let Some(x) = inst
            .x_set
            .iter()
            .find(|x| matches!(worst_case_q(&inst, x), Ok((v, _)) if v.is_finite()))
        else {
            continue;
        };
        let pool = inst.yd_points().unwrap();
        let (z, _, cert) =
            lagro_core::engine::solve_exact_worst_case_restricted(&inst, x, &pool).unwrap();
        let cert = cert.expect("finite verification carries a certificate");
        let lam = lagro_core::engine::multiplier_from_restricted_certificate(
            &cert.blocks,
            &lagro_core::engine::augmented_h(&inst),
        );
        let (qv, _) = worst_case_q(&inst, x).unwrap();
        assert_eq!(z, qv, "seed {seed}: full pool makes the verification exact");
        let (lv, _) = worst_case_l(&inst, x, &lam).unwrap();
        assert_eq!(lv, qv, "seed {seed}: extracted multiplier must close the gap");
        checked_g += 1;
    }
    pass(7, "ex-post multipliers close the worst-case gap on 20 + 20 instances");
}

#[test]
fn a08_end_to_end_exactness() {
    let mut solved = 0;
    let mut seed = 0u64;
    while solved < 25 {
        seed += 1;
        assert!(seed < 400, "general generator exhausted");
        let mut spec = RandomSpec::default();
        spec.x_count = 2 + (seed as usize) % 3; // |X| <= 4
        spec.np = 2 + (seed as usize) % 2; // np <= 3
        spec.nd2 = 1 + (seed as usize) % 2; // |Y_d| <= 4 <= 8
        let inst = match gen_random_general(&spec, seed) {
            Ok(i) => i,
            Err(_) => continue,
        };
        let (bv, _) = solve_two_stage_bruteforce(&inst).unwrap();
        let report =
            solve_with_restarts(&Instance::General(inst), &SolveOptions::default()).unwrap();
        assert_eq!(report.value, bv, "seed {seed}");
        assert!(report.verified_optimal, "seed {seed}");
        solved += 1;
    }
    let mut seed = 5000u64;
    while solved < 50 {
        seed += 1;
        assert!(seed < 5400, "indicator generator exhausted");
        let mut spec = RandomSpec::default();
        spec.x_count = 2 + (seed as usize) % 3;
        spec.np = 2 + (seed as usize) % 2;
        let inst = match gen_random_indicator(&spec, seed) {
            Ok(i) => i,
            Err(_) => continue,
        };
        let (bv, _) = solve_two_stage_bruteforce_indicator(&inst).unwrap();
        let method = if solved % 2 == 0 { Method::Ccg } else { Method::Benders };
        let mut opts = SolveOptions::default();
        opts.method = method;
        let report = solve_with_restarts(&Instance::Indicator(inst), &opts).unwrap();
        assert_eq!(report.value, bv, "seed {seed} {method:?}");
        assert!(report.verified_optimal, "seed {seed}");
        solved += 1;
    }
    pass(8, "50 mixed instances solved to the brute-force optimum");
}

#[test]
fn a09_engineered_restart() {
    let inst = gen_network_design_small(2, 1);
    let (bv, _) = solve_two_stage_bruteforce_indicator(&inst).unwrap();
    let mut opts = SolveOptions::default();
    opts.lambda0 = Some(frac(1, 100));
    let report = solve_with_restarts(&Instance::Indicator(inst), &opts).unwrap();
    assert_eq!(report.restarts, 1, "the deliberately tiny multiplier must force one restart");
    assert_eq!(report.value, bv, "the restart must recover the exact optimum");
    assert!(report.verified_optimal);
    pass(9, "tiny initial multiplier forces exactly one restart and still lands on the optimum");
}

#[test]
fn a10_weak_duality_property() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    let mut tuples = 0;
    let mut seed = 0u64;
    while tuples < 200 {
        seed += 1;
        let inst = match gen_random_general(&RandomSpec::default(), seed) {
            Ok(i) => i,
            Err(_) => continue,
        };
        for _ in 0..4 {
            let x = &inst.x_set[rng.gen_range(0..inst.x_set.len())];
            let xi = &inst.xi_set.points()[rng.gen_range(0..inst.xi_set.len())];
            let q = eval_q(&inst, x, xi).unwrap();
            let base = frac(rng.gen_range(0..=6), 1 + rng.gen_range(0..=3));
            let ladder = [
                base.clone(),
                &base + rat(1),
                &base + rat(3),
                &base + rat(9),
            ];
            let mut prev: Option<ExtValue> = None;
            for lam in &ladder {
                let l = eval_l(&inst, x, xi, lam).unwrap();
                assert!(l <= q, "weak duality violated at seed {seed}");
                if let Some(p) = prev {
                    assert!(p <= l, "monotonicity violated at seed {seed}");
                }
                prev = Some(l);
            }
            tuples += 1;
        }
    }
    pass(10, "200 tuples: L <= Q and L nondecreasing along the ladder");
}
