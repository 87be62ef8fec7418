mod common;

use std::f64::consts::FRAC_1_SQRT_2;

use common::square_series;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use splinekit::iga::{apply_homogeneous_dirichlet, assemble, cholesky, solve_poisson, unit_box};
use splinekit::manipulation::{insert_knot, InsertionRequest};
use splinekit::{KnotVector, Nurbs, Spline};

/// Quarter of the annulus `1 <= r <= 2`, quadratic in the angle and linear
/// in the radius, refined once in each direction.
fn quarter_annulus() -> Spline {
    let mut points = Vec::new();
    for r in [1.0, 2.0] {
        points.extend([vec![r, 0.0], vec![r, r], vec![0.0, r]]);
    }
    let w = [1.0, FRAC_1_SQRT_2, 1.0];
    let s: Spline = Nurbs::new(
        vec![
            KnotVector::new(vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap(),
            KnotVector::new(vec![0.0, 0.0, 1.0, 1.0]).unwrap(),
        ],
        vec![2, 1],
        points,
        w.iter().chain(&w).copied().collect(),
    )
    .unwrap()
    .into();
    let mut s = s;
    for (direction, knot) in [(0, 0.5), (1, 0.5), (0, 0.25), (1, 0.25)] {
        s = insert_knot(
            &s,
            InsertionRequest {
                direction,
                knot,
                multiplicity: 1,
            },
        )
        .unwrap();
    }
    s
}

/// Unit square with interior control points jiggled by at most `amount`.
fn perturbed_square(seed: u64, amount: f64) -> Spline {
    let mut rng = StdRng::seed_from_u64(seed);
    let base = unit_box(2, 3, 2).unwrap();
    base.map_control_points(|p| {
        let interior = p.iter().all(|&c| c > 1e-12 && c < 1.0 - 1e-12);
        if interior {
            p.iter()
                .map(|c| c + rng.gen_range(-amount..amount))
                .collect()
        } else {
            p.to_vec()
        }
    })
    .unwrap()
}

#[test]
fn symmetric_and_positive_definite() {
    let geometries = [
        quarter_annulus(),
        perturbed_square(1, 0.05),
        perturbed_square(2, 0.05),
        unit_box(3, 2, 2).unwrap(),
    ];
    for g in &geometries {
        let full = assemble(g, 1.0, None).unwrap();
        let scale = full.stiffness.norm_inf();
        assert!(full.stiffness.asymmetry() <= 1e-12 * scale);
        let ones = vec![1.0; full.load.len()];
        assert!(full
            .stiffness
            .mul_vec(&ones)
            .iter()
            .all(|v| v.abs() <= 1e-10 * scale.max(1.0)));
        let reduced = apply_homogeneous_dirichlet(full).unwrap();
        assert!(cholesky(&reduced.stiffness).is_ok());
    }
}

#[test]
fn annulus_area_from_load() {
    // with f = 1 the load vector sums to the domain measure
    let sys = assemble(&quarter_annulus(), 1.0, Some(6)).unwrap();
    let area: f64 = sys.load.iter().sum();
    assert!((area - 3.0 * std::f64::consts::PI / 4.0).abs() < 1e-10);
}

#[test]
fn square_center_converges() {
    let oracle = square_series(0.5, 0.5, 41);
    let errors: Vec<f64> = [2, 4, 8]
        .iter()
        .map(|&n| {
            let g = unit_box(2, n, 2).unwrap();
            let u = solve_poisson(&g, 1.0, None).unwrap();
            (u.evaluate(&g, &[0.5, 0.5]).unwrap() - oracle).abs()
        })
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(errors[2] <= 1e-3);
}

#[test]
fn maximum_principle() {
    for g in [
        unit_box(2, 4, 2).unwrap(),
        quarter_annulus(),
        unit_box(3, 2, 3).unwrap(),
    ] {
        let u = solve_poisson(&g, 1.0, None).unwrap();
        let n: usize = 11;
        for k in 0..n.pow(g.dim() as u32) {
            let pc: Vec<f64> = (0..g.dim())
                .map(|d| ((k / n.pow(d as u32)) % n) as f64 / (n - 1) as f64)
                .collect();
            assert!(u.evaluate(&g, &pc).unwrap() >= -1e-10);
        }
    }
}

#[test]
fn exact_solution_for_any_mesh() {
    for elements in 1..=8 {
        for degree in 2..=3 {
            let g = unit_box(1, elements, degree).unwrap();
            let u = solve_poisson(&g, 1.0, None).unwrap();
            for k in 0..=100 {
                let x = k as f64 / 100.0;
                assert!((u.evaluate(&g, &[x]).unwrap() - x * (1.0 - x) / 2.0).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn scales_with_source() {
    let g = unit_box(2, 3, 2).unwrap();
    let one = solve_poisson(&g, 1.0, None).unwrap();
    let three = solve_poisson(&g, 3.0, None).unwrap();
    for (a, b) in one.coefficients.iter().zip(&three.coefficients) {
        assert!((3.0 * a - b).abs() < 1e-12);
    }
}
