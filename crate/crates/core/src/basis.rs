//! B-spline basis functions as recursive evaluation trees.
//!
//! `N_{i,p}` is stored as a node holding its support and, for `p > 0`, the
//! two lower-degree functions `N_{i,p-1}` and `N_{i+1,p-1}` together with the
//! reciprocals of the two knot differences of the Cox-de Boor recursion.
//! The reciprocals are computed once at construction; a zero difference is
//! stored as a zero reciprocal so that the `0/0 := 0` convention falls out of
//! plain multiplication.

use crate::{Error, KnotVector, Result};

#[derive(Debug, Clone)]
pub struct BasisFunction {
    degree: usize,
    start_knot: f64,
    end_knot: f64,
    end_knot_is_last_knot: bool,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    ZeroDegree,
    Recursive(Box<LowerDegree>),
}

#[derive(Debug, Clone)]
struct LowerDegree {
    left_denom_inv: f64,
    right_denom_inv: f64,
    left: BasisFunction,
    right: BasisFunction,
}

/// `1/denom` for positive `denom`, zero otherwise.
pub fn inv_with_pos_zero_denom(denom: f64) -> f64 {
    if denom > 0.0 {
        1.0 / denom
    } else {
        0.0
    }
}

impl BasisFunction {
    /// Builds `N_{start_support, degree}` over `kv`.
    pub fn create(kv: &KnotVector, start_support: usize, degree: usize) -> Result<Self> {
        if start_support + degree + 1 > kv.last_index() {
            return Err(Error::InvalidSpline(format!(
                "basis function N_{{{start_support},{degree}}} needs knot {} but the knot vector ends at index {}",
                start_support + degree + 1,
                kv.last_index()
            )));
        }
        Ok(Self::build(kv, start_support, degree))
    }

    fn build(kv: &KnotVector, i: usize, p: usize) -> Self {
        let start_knot = kv[i];
        let end_knot = kv[i + p + 1];
        let end_knot_is_last_knot = end_knot == kv.last();
        let kind = if p == 0 {
            Kind::ZeroDegree
        } else {
            Kind::Recursive(Box::new(LowerDegree {
                left_denom_inv: inv_with_pos_zero_denom(kv[i + p] - kv[i]),
                right_denom_inv: inv_with_pos_zero_denom(kv[i + p + 1] - kv[i + 1]),
                left: Self::build(kv, i, p - 1),
                right: Self::build(kv, i + 1, p - 1),
            }))
        };
        Self {
            degree: p,
            start_knot,
            end_knot,
            end_knot_is_last_knot,
            kind,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn start_knot(&self) -> f64 {
        self.start_knot
    }

    pub fn end_knot(&self) -> f64 {
        self.end_knot
    }

    pub fn end_knot_is_last_knot(&self) -> bool {
        self.end_knot_is_last_knot
    }

    /// `N_{i,p-1}` and `N_{i+1,p-1}`, or `None` for a step function.
    pub fn lower_degree(&self) -> Option<(&BasisFunction, &BasisFunction)> {
        match &self.kind {
            Kind::ZeroDegree => None,
            Kind::Recursive(lower) => Some((&lower.left, &lower.right)),
        }
    }

    pub fn is_coord_in_support(&self, pc: f64) -> bool {
        if self.end_knot_is_last_knot {
            self.start_knot <= pc && pc <= self.end_knot
        } else {
            self.start_knot <= pc && pc < self.end_knot
        }
    }

    pub fn eval(&self, pc: f64) -> f64 {
        if self.is_coord_in_support(pc) {
            self.eval_on_support(pc)
        } else {
            0.0
        }
    }

    fn eval_on_support(&self, pc: f64) -> f64 {
        match &self.kind {
            Kind::ZeroDegree => 1.0,
            Kind::Recursive(lower) => {
                self.left_quotient(lower, pc) * lower.left.eval(pc)
                    + self.right_quotient(lower, pc) * lower.right.eval(pc)
            }
        }
    }

    fn left_quotient(&self, lower: &LowerDegree, pc: f64) -> f64 {
        (pc - self.start_knot) * lower.left_denom_inv
    }

    fn right_quotient(&self, lower: &LowerDegree, pc: f64) -> f64 {
        (self.end_knot - pc) * lower.right_denom_inv
    }

    /// `order`-th derivative at `pc`.
    pub fn eval_derivative(&self, pc: f64, order: usize) -> f64 {
        if order == 0 {
            return self.eval(pc);
        }
        self.eval_derivatives(pc, order)[order]
    }

    /// Value and derivatives of orders `0..=max_order` at `pc`.
    pub fn eval_derivatives(&self, pc: f64, max_order: usize) -> Vec<f64> {
        let mut out = vec![0.0; max_order + 1];
        if self.is_coord_in_support(pc) {
            self.derivs_on_support(pc, &mut out);
        }
        out
    }

    // Leibniz rule on `a(u) L(u) + b(u) R(u)` with affine `a`, `b`:
    // D^k(a L) = a D^k L + k a' D^{k-1} L.
    fn derivs_on_support(&self, pc: f64, out: &mut [f64]) {
        match &self.kind {
            Kind::ZeroDegree => {
                out[0] = 1.0;
                out[1..].fill(0.0);
            }
            Kind::Recursive(lower) => {
                let left = lower.left.eval_derivatives(pc, out.len() - 1);
                let right = lower.right.eval_derivatives(pc, out.len() - 1);
                let a = self.left_quotient(lower, pc);
                let b = self.right_quotient(lower, pc);
                for (k, slot) in out.iter_mut().enumerate() {
                    let mut v = a * left[k] + b * right[k];
                    if k > 0 {
                        let kf = k as f64;
                        v += kf * lower.left_denom_inv * left[k - 1]
                            - kf * lower.right_denom_inv * right[k - 1];
                    }
                    *slot = v;
                }
            }
        }
    }

    /// Number of nodes in the evaluation tree.
    pub fn node_count(&self) -> usize {
        match self.lower_degree() {
            None => 1,
            Some((l, r)) => 1 + l.node_count() + r.node_count(),
        }
    }
}
