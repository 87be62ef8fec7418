//! Shared oracles and generators for the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::Rng;
use splinekit::{BSpline, KnotVector, Nurbs, Spline};

/// Textbook Cox-de Boor recursion, recomputing every quotient. The step
/// functions are half-open except that the last knot closes any span that
/// ends there.
pub fn cox_de_boor(knots: &[f64], i: usize, p: usize, u: f64) -> f64 {
    let last = *knots.last().unwrap();
    if p == 0 {
        let (a, b) = (knots[i], knots[i + 1]);
        return if (a <= u && u < b) || (b == last && a <= u && u == last) {
            1.0
        } else {
            0.0
        };
    }
    let ratio = |num: f64, den: f64| if den == 0.0 { 0.0 } else { num / den };
    ratio(u - knots[i], knots[i + p] - knots[i]) * cox_de_boor(knots, i, p - 1, u)
        + ratio(knots[i + p + 1] - u, knots[i + p + 1] - knots[i + 1])
            * cox_de_boor(knots, i + 1, p - 1, u)
}

/// Clamped knot vector on `[0, 1]` with up to `max_interior` interior knots,
/// each of multiplicity at most `p`.
pub fn clamped_knots(rng: &mut StdRng, p: usize, max_interior: usize) -> Vec<f64> {
    let mut interior: Vec<f64> = Vec::new();
    let count = rng.gen_range(0..=max_interior);
    while interior.len() < count {
        let k = (rng.gen_range(1..20) as f64) / 20.0;
        let mult = rng.gen_range(1..=p.max(1));
        for _ in 0..mult {
            if interior.len() < count && interior.iter().filter(|&&x| x == k).count() < p {
                interior.push(k);
            }
        }
    }
    interior.sort_by(f64::total_cmp);
    let mut knots = vec![0.0; p + 1];
    knots.extend(interior);
    knots.extend(vec![1.0; p + 1]);
    knots
}

pub fn random_point(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Random clamped spline of parametric dimension `dim` in `space_dim`
/// space, degrees `1..=max_degree`.
pub fn random_spline(
    rng: &mut StdRng,
    dim: usize,
    space_dim: usize,
    max_degree: usize,
    rational: bool,
) -> Spline {
    let degrees: Vec<usize> = (0..dim).map(|_| rng.gen_range(1..=max_degree)).collect();
    let kvs: Vec<KnotVector> = degrees
        .iter()
        .map(|&p| KnotVector::new(clamped_knots(rng, p, 3)).unwrap())
        .collect();
    let count: usize = kvs
        .iter()
        .zip(&degrees)
        .map(|(kv, p)| kv.len() - p - 1)
        .product();
    let points: Vec<Vec<f64>> = (0..count).map(|_| random_point(rng, space_dim)).collect();
    if rational {
        let weights = (0..count).map(|_| rng.gen_range(0.5..2.0)).collect();
        Nurbs::new(kvs, degrees, points, weights).unwrap().into()
    } else {
        BSpline::new(kvs, degrees, points).unwrap().into()
    }
}

/// Random parametric point inside the spline's domain.
pub fn random_param(rng: &mut StdRng, s: &Spline) -> Vec<f64> {
    (0..s.dim())
        .map(|d| {
            let (lo, hi) = s.parameter_space().bounds(d);
            rng.gen_range(lo..=hi)
        })
        .collect()
}

pub fn quarter_circle() -> Spline {
    Nurbs::new(
        vec![KnotVector::new(vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap()],
        vec![2],
        vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]],
        vec![1.0, std::f64::consts::FRAC_1_SQRT_2, 1.0],
    )
    .unwrap()
    .into()
}

/// Odd integers up to `max`.
fn odd(max: usize) -> impl Iterator<Item = f64> + Clone {
    (1..=max).step_by(2).map(|i| i as f64)
}

/// `-Δu = 1` on the unit square with zero boundary values, as a double sine
/// series over odd `i, j <= max`.
pub fn square_series(x: f64, y: f64, max: usize) -> f64 {
    let mut sum = 0.0;
    for i in odd(max) {
        for j in odd(max) {
            sum += 16.0 / (PI.powi(4) * i * j * (i * i + j * j))
                * (i * PI * x).sin()
                * (j * PI * y).sin();
        }
    }
    sum
}

/// `-Δu = 1` on the unit cube with zero boundary values, as a triple sine
/// series over odd `i, j, k <= max`.
pub fn cube_series(x: f64, y: f64, z: f64, max: usize) -> f64 {
    let mut sum = 0.0;
    for i in odd(max) {
        for j in odd(max) {
            for k in odd(max) {
                sum += 64.0 / (PI.powi(5) * i * j * k * (i * i + j * j + k * k))
                    * (i * PI * x).sin()
                    * (j * PI * y).sin()
                    * (k * PI * z).sin();
            }
        }
    }
    sum
}

/// Whether `u` is at least `gap` away from every knot of `knots`.
pub fn away_from_knots(knots: &[f64], u: f64, gap: f64) -> bool {
    knots.iter().all(|k| (k - u).abs() >= gap)
}
