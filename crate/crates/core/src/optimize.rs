//! One-parameter shape fit: a quadratic Bézier curve with end points
//! `(-1, 0)` and `(1, 0)` and a free middle height `y` is pulled onto the
//! parabola `1 - x²` by minimizing the area between the two curves.

use std::path::{Path, PathBuf};

use crate::io::{self, SampleResolution, SplineFile};
use crate::{BSpline, KnotVector, Result, Spline};

/// Bounds used by default. Wide enough to contain the exact fit `y = 2`.
pub const DEFAULT_BOUNDS: (f64, f64) = (-1.0, 3.0);
/// The tighter bounds `[-1, 1]`, which exclude the exact fit.
pub const NARROW_BOUNDS: (f64, f64) = (-1.0, 1.0);
pub const DEFAULT_TOLERANCE: f64 = 1e-7;
pub const MAX_EVALUATIONS: usize = 100;
pub const SAMPLES: usize = 101;

const AREA_TOLERANCE: f64 = 1e-8;

pub fn target(x: f64) -> f64 {
    1.0 - x * x
}

/// The design curve for middle control point `(0, y)`.
pub fn design_curve(y: f64) -> Spline {
    let kv = KnotVector::new(vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).expect("valid knot vector");
    BSpline::new(
        vec![kv],
        vec![2],
        vec![vec![-1.0, 0.0], vec![0.0, y], vec![1.0, 0.0]],
    )
    .expect("valid curve")
    .into()
}

/// Signed height difference between curve and parabola at parameter `u`.
fn gap(curve: &Spline, u: f64) -> f64 {
    let p = curve.point(&[u]).expect("u inside [0, 1]");
    p[1] - target(p[0])
}

const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

fn gauss5(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    GAUSS5.iter().map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
}

fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: usize) -> f64 {
    let m = 0.5 * (a + b);
    let (left, right) = (gauss5(f, a, m), gauss5(f, m, b));
    if depth == 0 || (left + right - whole).abs() <= tol {
        return left + right;
    }
    adaptive(f, a, m, left, 0.5 * tol, depth - 1) + adaptive(f, m, b, right, 0.5 * tol, depth - 1)
}

/// Root of `g` in `[a, b]` given a sign change, by bisection.
fn bisect(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ga = g(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (g(m) > 0.0) == (ga > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `∫₀¹ |g(u)| du`, split where `g` changes sign so that the integrand is
/// smooth on every piece.
fn abs_integral(g: impl Fn(f64) -> f64) -> f64 {
    const PROBES: usize = 64;
    let mut breaks = vec![0.0];
    let mut prev = g(0.0);
    for k in 1..=PROBES {
        let u = k as f64 / PROBES as f64;
        let cur = g(u);
        if prev != 0.0 && cur != 0.0 && (prev > 0.0) != (cur > 0.0) {
            breaks.push(bisect(&g, (k - 1) as f64 / PROBES as f64, u));
        }
        prev = cur;
    }
    breaks.push(1.0);
    let abs_g = |u: f64| g(u).abs();
    let tol = AREA_TOLERANCE / (breaks.len() - 1) as f64;
    breaks
        .windows(2)
        .map(|w| adaptive(&abs_g, w[0], w[1], gauss5(&abs_g, w[0], w[1]), tol, 30))
        .sum()
}

/// Area between the design curve and the parabola over `x ∈ [-1, 1]`.
///
/// `x(u) = 2u - 1` is affine for this control polygon, so the integral is
/// taken in `u` with `dx = 2 du`.
pub fn objective_area(y: f64) -> f64 {
    let curve = design_curve(y);
    2.0 * abs_integral(|u| gap(&curve, u))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
    /// Every evaluation in order, as `(x, f(x))`.
    pub trace: Vec<(f64, f64)>,
    /// False when `max_evals` ran out before the bracket shrank to `tol`.
    pub converged: bool,
}

/// Golden-section search on `[lo, hi]` for a unimodal `f`.
///
/// Both bounds are evaluated first, so a minimum on the boundary is
/// returned exactly. Stops once the bracket is no wider than `tol`.
pub fn minimize_bounded(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    max_evals: usize,
) -> Result<Minimum> {
    if !(lo < hi) || !(tol > 0.0) || max_evals < 4 {
        return Err(crate::Error::Numerical(format!(
            "golden-section search needs lo < hi, tol > 0 and at least 4 evaluations \
             (got lo={lo}, hi={hi}, tol={tol}, max_evals={max_evals})"
        )));
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut trace = Vec::new();
    let mut eval = |x: f64, trace: &mut Vec<(f64, f64)>| {
        let v = f(x);
        trace.push((x, v));
        v
    };
    eval(lo, &mut trace);
    eval(hi, &mut trace);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c, &mut trace);
    let mut fd = eval(d, &mut trace);
    while b - a > tol && trace.len() < max_evals {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c, &mut trace);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d, &mut trace);
        }
    }
    let converged = b - a <= tol;
    let (x, value) = trace
        .iter()
        .copied()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .expect("at least four evaluations");
    Ok(Minimum {
        x,
        value,
        evaluations: trace.len(),
        trace,
        converged,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub y: f64,
    pub objective: f64,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTrace {
    pub records: Vec<TraceRecord>,
    pub best_y: f64,
    pub best_objective: f64,
    pub converged: bool,
}

/// Runs the fit and writes `step_NNN.vtk` into `output_dir` after every
/// objective evaluation.
pub fn run_parabola_demo(
    output_dir: &Path,
    bounds: (f64, f64),
    tol: f64,
) -> Result<OptimizationTrace> {
    std::fs::create_dir_all(output_dir)?;
    let resolution = SampleResolution::new(vec![SAMPLES])?;
    let mut records = Vec::new();
    let mut failure = None;
    let minimum = minimize_bounded(
        |y| {
            let objective = objective_area(y);
            let path = output_dir.join(format!("step_{:03}.vtk", records.len()));
            if failure.is_none() {
                let file = SplineFile::new([design_curve(y)]);
                if let Err(e) = io::write_vtk(&file, std::slice::from_ref(&resolution), &path) {
                    failure = Some(e);
                }
            }
            records.push(TraceRecord {
                iteration: records.len(),
                y,
                objective,
                path,
            });
            objective
        },
        bounds.0,
        bounds.1,
        tol,
        MAX_EVALUATIONS,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(OptimizationTrace {
        records,
        best_y: minimum.x,
        best_objective: minimum.value,
        converged: minimum.converged,
    })
}
