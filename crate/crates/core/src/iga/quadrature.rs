use crate::{Error, Result};

/// Gauss-Legendre points and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

pub const MAX_GAUSS_POINTS: usize = 10;

/// Legendre polynomial `P_n(x)` and `P_{n-1}(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let next = ((2 * k - 1) as f64 * x * cur - (k - 1) as f64 * prev) / k as f64;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

pub fn gauss_legendre(count: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_GAUSS_POINTS).contains(&count) {
        return Err(Error::Unsupported(format!(
            "Gauss-Legendre rules exist for 1..={MAX_GAUSS_POINTS} points, requested {count}"
        )));
    }
    let n = count;
    let mut points = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut derivative = 1.0;
        for _ in 0..100 {
            let (p, q) = legendre(n, x);
            derivative = n as f64 * (x * p - q) / (x * x - 1.0);
            let dx = p / derivative;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (p, q) = legendre(n, x);
        derivative = if p.is_finite() {
            n as f64 * (x * p - q) / (x * x - 1.0)
        } else {
            derivative
        };
        points.push(x);
        weights.push(2.0 / ((1.0 - x * x) * derivative * derivative));
    }
    Ok(QuadratureRule { points, weights })
}
