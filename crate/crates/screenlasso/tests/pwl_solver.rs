#![allow(clippy::needless_range_loop)]

//! Solver-level properties of the inner weighted-lasso machinery, checked
//! against independent references on randomized instances.

mod common;

use common::{random_center, random_problem, random_weights, rng, weighted_lasso_reference};
use screenlasso::pwl::{
    self, dual_objective, dual_violation, primal_objective, solve_pwl, PwlConfig, PwlSpec,
    ScreenRadius, ScreenSet,
};

const ALPHA: f64 = 1e9;

fn tight_cfg(tol: f64, screening: bool) -> PwlConfig {
    PwlConfig {
        tol,
        screening,
        ..PwlConfig::default()
    }
}

#[test]
fn screening_is_safe_on_random_instances() {
    let mut rng = rng(11_235);
    for trial in 0..30 {
        let prob = random_problem(&mut rng, 30, 60, 0.6);
        let weights = random_weights(&mut rng, &prob, 0.1);
        let center = random_center(&mut rng, 60, 0.1);
        let spec = PwlSpec::new(weights, center, ALPHA).unwrap();

        let screened = solve_pwl(
            &prob,
            &spec,
            &vec![0.0; 60],
            &ScreenSet::none(60),
            &tight_cfg(1e-10, true),
            None,
        )
        .unwrap();
        let reference = solve_pwl(
            &prob,
            &spec,
            &vec![0.0; 60],
            &ScreenSet::none(60),
            &tight_cfg(1e-12, false),
            None,
        )
        .unwrap();

        for j in 0..60 {
            if screened.screen.is_screened(j) {
                assert!(
                    reference.w[j].abs() <= 1e-10,
                    "trial {trial}: screened coordinate {j} is {} in the reference",
                    reference.w[j]
                );
            }
        }
        assert!(screened.screen.count() > 0, "trial {trial} screened nothing");
    }
}

#[test]
fn screening_never_costs_updates() {
    let mut rng = rng(0xC0FFEE);
    for _ in 0..10 {
        let prob = random_problem(&mut rng, 30, 60, 0.8);
        let weights = random_weights(&mut rng, &prob, 0.05);
        let spec = PwlSpec::new(weights, vec![0.0; 60], ALPHA).unwrap();
        let with = solve_pwl(
            &prob,
            &spec,
            &vec![0.0; 60],
            &ScreenSet::none(60),
            &tight_cfg(1e-8, true),
            None,
        )
        .unwrap();
        let without = solve_pwl(
            &prob,
            &spec,
            &vec![0.0; 60],
            &ScreenSet::none(60),
            &tight_cfg(1e-8, false),
            None,
        )
        .unwrap();
        assert!(
            with.updates <= without.updates,
            "screening used more updates ({} > {})",
            with.updates,
            without.updates
        );
        // both certify the same tolerance
        assert!(with.certificate.gap <= 1e-8);
        assert!(without.certificate.gap <= 1e-8);
    }
}

#[test]
fn matches_plain_weighted_lasso_for_large_alpha() {
    let mut rng = rng(31_337);
    for _ in 0..8 {
        let prob = random_problem(&mut rng, 20, 35, 0.5);
        let weights = random_weights(&mut rng, &prob, 0.0);
        let spec = PwlSpec::new(weights.clone(), vec![0.0; 35], 1e12).unwrap();
        let sol = solve_pwl(
            &prob,
            &spec,
            &vec![0.0; 35],
            &ScreenSet::none(35),
            &tight_cfg(1e-13, true),
            None,
        )
        .unwrap();
        let reference = weighted_lasso_reference(&prob, &weights, 200_000);
        for j in 0..35 {
            assert!(
                (sol.w[j] - reference[j]).abs() <= 1e-6,
                "coordinate {j}: {} vs reference {}",
                sol.w[j],
                reference[j]
            );
        }
    }
}

#[test]
fn certificates_stay_feasible_with_nonnegative_gaps() {
    let mut rng = rng(777);
    for _ in 0..10 {
        let prob = random_problem(&mut rng, 25, 50, 1.0);
        let weights = random_weights(&mut rng, &prob, 0.15);
        let center = random_center(&mut rng, 50, 0.2);
        let spec = PwlSpec::new(weights, center, ALPHA).unwrap();

        let mut worst_gap = f64::INFINITY;
        let mut checks = 0;
        let mut on_check = |c: &pwl::GapCheck| {
            worst_gap = worst_gap.min(c.gap);
            checks += 1;
        };
        let sol = solve_pwl(
            &prob,
            &spec,
            &vec![0.0; 50],
            &ScreenSet::none(50),
            &tight_cfg(1e-9, true),
            Some(&mut on_check),
        )
        .unwrap();
        assert!(checks > 0);
        assert!(worst_gap >= -1e-10, "negative gap {worst_gap} observed");
        assert!(dual_violation(&prob, &spec, &sol.certificate.dual) <= 1e-10);
        // weak duality at the final iterate
        let p_val = primal_objective(&prob, &spec, &sol.w).unwrap();
        let d_val = dual_objective(&prob, &spec, &sol.certificate.dual).unwrap();
        assert!(d_val <= p_val + 1e-10);
    }
}

#[test]
fn dual_point_recovers_optimal_pair_at_convergence() {
    let mut rng = rng(4242);
    let prob = random_problem(&mut rng, 25, 40, 0.4);
    let weights = random_weights(&mut rng, &prob, 0.0);
    let center = random_center(&mut rng, 40, 0.05);
    let spec = PwlSpec::new(weights, center.clone(), ALPHA).unwrap();
    let sol = solve_pwl(
        &prob,
        &spec,
        &vec![0.0; 40],
        &ScreenSet::none(40),
        &tight_cfg(1e-12, false),
        None,
    )
    .unwrap();
    let cert = &sol.certificate;
    assert!(cert.gap <= 1e-12);
    // at the optimum the dual pair is the residual and the scaled offset
    assert!((cert.rho_max - 1.0).abs() <= 1e-6);
    for i in 0..25 {
        assert!((cert.dual.s[i] - sol.residual[i]).abs() <= 1e-6 * (1.0 + sol.residual[i].abs()));
    }
    for j in 0..40 {
        let expect = (sol.w[j] - center[j]) / ALPHA;
        assert!((cert.dual.v[j] - expect).abs() <= 1e-6 * (1.0 + expect.abs()));
    }
    // strong duality: dual objective meets the primal optimum
    let p_val = primal_objective(&prob, &spec, &sol.w).unwrap();
    let d_val = dual_objective(&prob, &spec, &sol.certificate.dual).unwrap();
    assert!((p_val - d_val).abs() <= 1e-8 * (1.0 + p_val.abs()));
}

#[test]
fn equicorrelation_complement_is_screened_at_tight_gaps() {
    let mut rng = rng(90_210);
    for trial in 0..6 {
        let prob = random_problem(&mut rng, 30, 60, 0.5);
        let weights = random_weights(&mut rng, &prob, 0.08);
        let center = random_center(&mut rng, 60, 0.1);
        let spec = PwlSpec::new(weights.clone(), center.clone(), ALPHA).unwrap();

        let screened = solve_pwl(
            &prob,
            &spec,
            &vec![0.0; 60],
            &ScreenSet::none(60),
            &tight_cfg(1e-13, true),
            None,
        )
        .unwrap();
        let reference = solve_pwl(
            &prob,
            &spec,
            &vec![0.0; 60],
            &ScreenSet::none(60),
            &tight_cfg(1e-13, false),
            None,
        )
        .unwrap();

        // active-constraint margins at the reference optimum
        let boundary = 1e-8;
        for j in 0..60 {
            if weights[j] == 0.0 {
                assert!(!screened.screen.is_screened(j));
                continue;
            }
            let margin = weights[j] - reference.certificate.correlations[j];
            if margin > boundary {
                assert!(
                    screened.screen.is_screened(j),
                    "trial {trial}: coordinate {j} with margin {margin:.3e} was not screened"
                );
            }
            if screened.screen.is_screened(j) {
                assert!(
                    margin > -boundary,
                    "trial {trial}: screened coordinate {j} sits on the active boundary"
                );
                assert!(reference.w[j].abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn primal_descends_at_every_update() {
    let mut rng = rng(5150);
    let prob = random_problem(&mut rng, 15, 25, 0.7);
    let weights = random_weights(&mut rng, &prob, 0.1);
    let center = random_center(&mut rng, 25, 0.2);
    let spec = PwlSpec::new(weights, center, ALPHA).unwrap();

    let mut w = vec![0.0; 25];
    let mut residual = prob.residual(&w);
    let mut last = primal_objective(&prob, &spec, &w).unwrap();
    for _ in 0..20 {
        for j in 0..25 {
            pwl::cd_update(&prob, &spec, &mut w, &mut residual, j);
            let now = primal_objective(&prob, &spec, &w).unwrap();
            assert!(
                now <= last + 1e-12 * (1.0 + now.abs()),
                "update on {j} increased the objective: {last} -> {now}"
            );
            last = now;
        }
    }
    // the incrementally maintained residual stayed consistent
    let fresh = prob.residual(&w);
    let y_scale = prob.y().iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    for (a, b) in residual.iter().zip(&fresh) {
        assert!((a - b).abs() <= 1e-8 * (1.0 + y_scale));
    }
}

#[test]
fn warm_start_with_screen_set_is_respected() {
    let mut rng = rng(606);
    let prob = random_problem(&mut rng, 20, 30, 0.5);
    let weights = random_weights(&mut rng, &prob, 0.0);
    let spec = PwlSpec::new(weights, vec![0.0; 30], ALPHA).unwrap();
    // first solve to learn a screen set
    let first = solve_pwl(
        &prob,
        &spec,
        &vec![0.0; 30],
        &ScreenSet::none(30),
        &tight_cfg(1e-10, true),
        None,
    )
    .unwrap();
    assert!(first.screen.count() > 0);
    // re-solve warm-started with that set; screened coordinates stay zero
    let second = solve_pwl(
        &prob,
        &spec,
        &first.w,
        &first.screen,
        &tight_cfg(1e-10, true),
        None,
    )
    .unwrap();
    for j in 0..30 {
        if first.screen.is_screened(j) {
            assert_eq!(second.w[j], 0.0);
        }
    }
    assert!(second.updates <= first.updates);
    // solutions agree: screening removed nothing that mattered
    for j in 0..30 {
        assert!((first.w[j] - second.w[j]).abs() <= 1e-7);
    }
}

#[test]
fn sparse_and_dense_representations_solve_identically() {
    use screenlasso::problem::CscMatrix;

    let mut rng = rng(2_048);
    let (n, d) = (25, 40);
    // random sparse matrix (~25% fill) built in both storages
    let mut rows: Vec<Vec<f64>> = vec![vec![0.0; d]; n];
    let mut col_ptr = vec![0usize];
    let mut row_idx = Vec::new();
    let mut values = Vec::new();
    for j in 0..d {
        for (i, row) in rows.iter_mut().enumerate() {
            if common::normal(&mut rng) > 0.7 {
                let v = common::normal(&mut rng);
                row[j] = v;
                row_idx.push(i);
                values.push(v);
            }
        }
        col_ptr.push(values.len());
    }
    let y: Vec<f64> = (0..n).map(|_| common::normal(&mut rng)).collect();
    let dense = screenlasso::Problem::from_rows(&rows, y.clone()).unwrap();
    let sparse = screenlasso::Problem::sparse(
        CscMatrix::new(n, d, col_ptr, row_idx, values).unwrap(),
        y,
    )
    .unwrap();

    let weights = random_weights(&mut rng, &dense, 0.1);
    let spec = PwlSpec::new(weights, vec![0.0; d], ALPHA).unwrap();
    let a = solve_pwl(
        &dense,
        &spec,
        &vec![0.0; d],
        &ScreenSet::none(d),
        &tight_cfg(1e-11, true),
        None,
    )
    .unwrap();
    let b = solve_pwl(
        &sparse,
        &spec,
        &vec![0.0; d],
        &ScreenSet::none(d),
        &tight_cfg(1e-11, true),
        None,
    )
    .unwrap();
    for j in 0..d {
        assert!(
            (a.w[j] - b.w[j]).abs() <= 1e-9,
            "coordinate {j} differs between representations"
        );
    }
    assert_eq!(a.updates, b.updates);
}

#[test]
fn compact_radius_also_solves() {
    let mut rng = rng(8_800);
    let prob = random_problem(&mut rng, 20, 30, 0.5);
    let weights = random_weights(&mut rng, &prob, 0.1);
    let spec = PwlSpec::new(weights, vec![0.0; 30], ALPHA).unwrap();
    let cfg = PwlConfig {
        tol: 1e-10,
        radius: ScreenRadius::Compact,
        ..PwlConfig::default()
    };
    let sol = solve_pwl(&prob, &spec, &vec![0.0; 30], &ScreenSet::none(30), &cfg, None).unwrap();
    let reference = solve_pwl(
        &prob,
        &spec,
        &vec![0.0; 30],
        &ScreenSet::none(30),
        &tight_cfg(1e-12, false),
        None,
    )
    .unwrap();
    for j in 0..30 {
        assert!((sol.w[j] - reference.w[j]).abs() <= 1e-6);
    }
}
