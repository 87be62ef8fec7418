//! B-spline and NURBS kernel.
//!
//! Splines of any parametric dimension are built from knot vectors, degrees
//! and a tensor-product grid of control points. Basis functions are stored
//! as recursive evaluation trees with their knot-difference reciprocals
//! computed once at construction. On top of evaluation the crate provides
//! knot insertion/removal and subdivision, readers and writers for XML, ITD
//! and IGES plus a legacy VTK exporter, a Galerkin isogeometric Poisson
//! solver and a small derivative-free shape optimisation demo.
//!
//! ```
//! use splinekit::{BSpline, KnotVector};
//!
//! let kv = KnotVector::new(vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
//! let curve = BSpline::new(
//!     vec![kv],
//!     vec![2],
//!     vec![vec![-1.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0]],
//! )
//! .unwrap();
//! assert_eq!(curve.evaluate(&[0.5], &[1]).unwrap(), vec![0.0]);
//! ```

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
mod error;
pub mod grid;
pub mod iga;
pub mod io;
pub mod knots;
pub mod manipulation;
pub mod optimize;
pub mod spline;

pub use basis::BasisFunction;
pub use error::{Error, Result};
pub use grid::TensorGrid;
pub use knots::KnotVector;
pub use spline::{BSpline, Nurbs, ParameterSpace, PhysicalSpace, Spline};
