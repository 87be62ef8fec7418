mod common;

use common::{away_from_knots, cox_de_boor};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use splinekit::{BasisFunction, KnotVector};

/// Non-decreasing knots drawn from a coarse grid so that repeats occur.
fn knot_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u32..8, 2..=12).prop_map(|mut v| {
        v.sort_unstable();
        v.into_iter().map(|k| k as f64 / 4.0).collect()
    })
}

fn case_strategy() -> impl Strategy<Value = (Vec<f64>, usize, usize, f64)> {
    knot_strategy()
        .prop_filter("room for a degree-0 function", |k| k.len() >= 2)
        .prop_flat_map(|knots| {
            let m = knots.len() - 1;
            let max_p = (m - 1).min(4);
            (Just(knots), 0..=max_p)
        })
        .prop_flat_map(|(knots, p)| {
            let m = knots.len() - 1;
            let i = 0..(m - p);
            let u = -0.5f64..2.25;
            (Just(knots), Just(p), i, u)
        })
}

proptest! {
    #[test]
    fn tree_matches_plain_recursion((knots, p, i, u) in case_strategy()) {
        let kv = KnotVector::new(knots.clone()).unwrap();
        let bf = BasisFunction::create(&kv, i, p).unwrap();
        prop_assert!((bf.eval(u) - cox_de_boor(&knots, i, p, u)).abs() <= 1e-12);
        for &k in &knots {
            prop_assert!((bf.eval(k) - cox_de_boor(&knots, i, p, k)).abs() <= 1e-12);
        }
    }

    #[test]
    fn local_support_and_sign((knots, p, i, u) in case_strategy()) {
        let kv = KnotVector::new(knots.clone()).unwrap();
        let bf = BasisFunction::create(&kv, i, p).unwrap();
        prop_assert!(bf.eval(u) >= 0.0);
        if u < knots[i] || u > knots[i + p + 1] {
            prop_assert_eq!(bf.eval(u), 0.0);
            prop_assert_eq!(bf.eval_derivative(u, 1), 0.0);
            prop_assert_eq!(bf.eval_derivative(u, 2), 0.0);
        }
    }
}

#[test]
fn tree_shape() {
    let kv = KnotVector::new(vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
    for p in 0..=2 {
        let bf = BasisFunction::create(&kv, 0, p).unwrap();
        assert_eq!(bf.node_count(), (1 << (p + 1)) - 1);
    }
    assert!(BasisFunction::create(&kv, 3, 2).is_err());
    let single = BasisFunction::create(&KnotVector::new(vec![0.0, 1.0]).unwrap(), 0, 0).unwrap();
    assert_eq!(
        (single.eval(0.0), single.eval(1.0), single.eval(1.5)),
        (1.0, 1.0, 0.0)
    );
}

#[test]
fn derivatives_match_differences() {
    let mut rng = StdRng::seed_from_u64(11);
    let h = 1e-6;
    let mut checked = 0;
    while checked < 500 {
        let p = rng.gen_range(1..=4);
        let knots = common::clamped_knots(&mut rng, p, 4);
        let kv = KnotVector::new(knots.clone()).unwrap();
        let i = rng.gen_range(0..kv.len() - p - 1);
        let u: f64 = rng.gen_range(0.0..1.0);
        if !away_from_knots(&knots, u, 1e-3) {
            continue;
        }
        let bf = BasisFunction::create(&kv, i, p).unwrap();
        for order in 1..=2 {
            let exact = bf.eval_derivative(u, order);
            let fd = (bf.eval_derivative(u + h, order - 1) - bf.eval_derivative(u - h, order - 1))
                / (2.0 * h);
            let scale = exact.abs().max(1.0);
            assert!(
                (fd - exact).abs() <= 1e-5 * scale,
                "p={p} i={i} u={u} order={order}: {fd} vs {exact}"
            );
        }
        let all = bf.eval_derivatives(u, 3);
        for (k, v) in all.iter().enumerate() {
            assert_eq!(*v, bf.eval_derivative(u, k));
        }
        checked += 1;
    }
}

#[test]
fn degree_zero_derivatives_vanish() {
    let kv = KnotVector::new(vec![0.0, 0.5, 1.0]).unwrap();
    let bf = BasisFunction::create(&kv, 0, 0).unwrap();
    assert_eq!(bf.eval(0.25), 1.0);
    assert_eq!(bf.eval_derivative(0.25, 1), 0.0);
    assert_eq!(bf.eval_derivative(0.25, 0), bf.eval(0.25));
}
