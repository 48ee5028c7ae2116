//! Property tests for the algebraic invariants of penalties, proximal maps
//! and the coordinate update.

use proptest::prelude::*;
use screenlasso::baselines::prox_penalty;
use screenlasso::penalty::{Penalty, PenaltyFamily};
use screenlasso::problem::Problem;
use screenlasso::pwl::{cd_update, primal_objective, PwlSpec};

fn arb_penalty() -> impl Strategy<Value = Penalty> {
    (0..3, 0.05f64..5.0, 0.05f64..5.0).prop_map(|(fam, lam, shape)| match fam {
        0 => Penalty::log_sum(lam, shape).unwrap(),
        1 => Penalty::mcp(lam, 1.0 + shape).unwrap(),
        _ => Penalty::scad(lam, 2.0 + shape).unwrap(),
    })
}

proptest! {
    #[test]
    fn value_is_zero_at_zero_and_nonnegative(p in arb_penalty(), w in -20.0f64..20.0) {
        prop_assert_eq!(p.value(0.0), 0.0);
        prop_assert!(p.value(w) >= 0.0);
        prop_assert_eq!(p.value(w), p.value(-w));
    }

    #[test]
    fn derivative_is_nonnegative_and_nonincreasing(
        p in arb_penalty(),
        t1 in 0.0f64..20.0,
        t2 in 0.0f64..20.0,
    ) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let (dlo, dhi) = (p.derivative(lo), p.derivative(hi));
        prop_assert!(dhi >= 0.0);
        prop_assert!(dlo >= dhi, "slope increased: r'({lo}) = {dlo} < r'({hi}) = {dhi}");
    }

    #[test]
    fn derivative_matches_central_differences(p in arb_penalty(), t in 0.01f64..10.0) {
        let lam = p.lambda();
        let th = p.theta();
        let near_break = [lam, lam * th]
            .iter()
            .any(|&b| (t - b).abs() < 1e-4 * (1.0 + b));
        prop_assume!(!near_break || p.family() == PenaltyFamily::LogSum);
        let h = 1e-6 * t.max(1.0);
        prop_assume!(t - h > 0.0);
        let fd = (p.value(t + h) - p.value(t - h)) / (2.0 * h);
        let an = p.derivative(t);
        prop_assert!(
            (fd - an).abs() <= 1e-6 * (1.0 + an.abs()),
            "finite difference {fd} vs analytic {an} at t = {t}"
        );
    }

    #[test]
    fn prox_is_odd_and_shrinks(p in arb_penalty(), z in -10.0f64..10.0, step in 0.01f64..5.0) {
        let w = prox_penalty(&p, z, step);
        prop_assert_eq!(prox_penalty(&p, -z, step), -w);
        prop_assert!(w.abs() <= z.abs() + 1e-15);
        prop_assert!(w * z >= 0.0, "prox flipped the sign: z = {z}, w = {w}");
    }

    #[test]
    fn prox_never_loses_to_zero_or_identity(
        p in arb_penalty(),
        z in -10.0f64..10.0,
        step in 0.01f64..5.0,
    ) {
        let w = prox_penalty(&p, z, step);
        let obj = |x: f64| 0.5 * (x - z) * (x - z) + step * p.value(x);
        prop_assert!(obj(w) <= obj(0.0) + 1e-12);
        prop_assert!(obj(w) <= obj(z) + 1e-12);
    }

    #[test]
    fn cd_update_thresholds_and_descends(
        x1 in 0.2f64..2.0,
        x2 in -2.0f64..2.0,
        y1 in -3.0f64..3.0,
        y2 in -3.0f64..3.0,
        lam in 0.0f64..2.0,
        c in -1.0f64..1.0,
        w0 in -2.0f64..2.0,
    ) {
        let prob = Problem::from_rows(&[vec![x1], vec![x2]], vec![y1, y2]).unwrap();
        let spec = PwlSpec::new(vec![lam], vec![c], 1e6).unwrap();
        let mut w = vec![w0];
        let mut r = prob.residual(&w);
        let before = primal_objective(&prob, &spec, &w).unwrap();
        cd_update(&prob, &spec, &mut w, &mut r, 0);
        let after = primal_objective(&prob, &spec, &w).unwrap();
        prop_assert!(after <= before + 1e-12 * (1.0 + before.abs()));

        // the kill condition: |t| <= lam zeroes the coordinate
        let t = prob.col_dot(0, &prob.residual(&[0.0]))
            + c / 1e6;
        if t.abs() <= lam {
            let mut w = vec![0.0];
            let mut r = prob.residual(&w);
            cd_update(&prob, &spec, &mut w, &mut r, 0);
            prop_assert_eq!(w[0], 0.0);
        }
    }
}
