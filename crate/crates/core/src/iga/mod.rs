//! Isogeometric Galerkin solver for `-Δu = f` with homogeneous Dirichlet
//! conditions.
//!
//! The solution is expanded in the same basis as the geometry
//! (isoparametric). Integrals are evaluated element by element, an element
//! being a tensor product of non-zero knot spans, with Gauss-Legendre
//! quadrature mapped onto each span.

use std::path::Path;

use crate::io::{self, DataField, DataLocation, SampleResolution, SplineEntry, SplineFile};
use crate::manipulation::{insert_knot, InsertionRequest};
use crate::spline::ParameterSpace;
use crate::{BSpline, Error, KnotVector, Result, Spline, TensorGrid};

mod linalg;
mod quadrature;

pub use linalg::{cholesky, solve_spd, DenseMatrix};
pub use quadrature::{gauss_legendre, QuadratureRule, MAX_GAUSS_POINTS};

/// Smallest admissible `|det J|` at a quadrature point.
pub const MIN_ABS_DET: f64 = 1e-14;

/// Tensor product of non-zero knot spans.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    /// Knot span index per direction.
    pub spans: Vec<usize>,
    /// Parametric interval per direction.
    pub bounds: Vec<(f64, f64)>,
}

/// All elements, first direction fastest.
pub fn elements(ps: &ParameterSpace) -> Vec<Element> {
    let per_dir: Vec<Vec<usize>> = ps
        .knot_vectors()
        .iter()
        .map(KnotVector::nonzero_spans)
        .collect();
    let counts: Vec<usize> = per_dir.iter().map(Vec::len).collect();
    let Ok(grid) = TensorGrid::new(counts) else {
        return Vec::new();
    };
    grid.indices()
        .map(|idx| {
            let spans: Vec<usize> = idx
                .iter()
                .enumerate()
                .map(|(d, &i)| per_dir[d][i])
                .collect();
            let bounds = spans
                .iter()
                .enumerate()
                .map(|(d, &s)| (ps.knot_vector(d)[s], ps.knot_vector(d)[s + 1]))
                .collect();
            Element { spans, bounds }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSystem {
    pub stiffness: DenseMatrix,
    pub load: Vec<f64>,
    /// Control-point index of each row.
    pub dofs: Vec<usize>,
    /// Per control point: whether it sits on the boundary of the control grid.
    pub boundary: Vec<bool>,
    /// Smallest `|det J|` met during assembly.
    pub min_abs_det: f64,
}

/// Determinant and inverse of a small square matrix by Gauss-Jordan
/// elimination with partial pivoting.
fn det_and_inverse(m: &[Vec<f64>]) -> (f64, Vec<Vec<f64>>) {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    let mut det = 1.0;
    for c in 0..n {
        let pivot = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .expect("non-empty");
        if a[pivot][c] == 0.0 {
            return (0.0, inv);
        }
        if pivot != c {
            a.swap(pivot, c);
            inv.swap(pivot, c);
            det = -det;
        }
        let d = a[c][c];
        det *= d;
        for j in 0..n {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                for j in 0..n {
                    a[r][j] -= f * a[c][j];
                    inv[r][j] -= f * inv[c][j];
                }
            }
        }
    }
    (det, inv)
}

fn boundary_flags(grid: &TensorGrid) -> Vec<bool> {
    grid.indices()
        .map(|idx| {
            idx.iter()
                .zip(grid.sizes())
                .any(|(&i, &n)| i == 0 || i + 1 == n)
        })
        .collect()
}

/// Stiffness matrix and load vector over all control points, before any
/// boundary condition. `quad_per_direction` of `None` uses `p + 1` points.
pub fn assemble(
    geometry: &Spline,
    source: f64,
    quad_per_direction: Option<usize>,
) -> Result<PoissonSystem> {
    let dim = geometry.dim();
    if !(1..=3).contains(&dim) {
        return Err(Error::Unsupported(format!(
            "Poisson assembly needs parametric dimension 1, 2 or 3, got {dim}"
        )));
    }
    if geometry.space_dim() != dim {
        return Err(Error::Unsupported(format!(
            "geometry maps {dim}-D parameters into {}-D space; assembly needs equal dimensions",
            geometry.space_dim()
        )));
    }
    let ps = geometry.parameter_space();
    if ps.degrees().contains(&0) {
        return Err(Error::Unsupported(
            "piecewise constant bases have no gradient".into(),
        ));
    }
    let rules = ps
        .degrees()
        .iter()
        .map(|&p| gauss_legendre(quad_per_direction.unwrap_or(p + 1)))
        .collect::<Result<Vec<_>>>()?;
    let counts: Vec<usize> = rules.iter().map(|r| r.points.len()).collect();
    let qgrid = TensorGrid::new(counts)?;

    let n = geometry.num_control_points();
    let phys = geometry.physical_space();
    let mut stiffness = DenseMatrix::zeros(n);
    let mut load = vec![0.0; n];
    let mut min_abs_det = f64::INFINITY;

    for element in elements(ps) {
        for q in qgrid.indices() {
            let mut pc = Vec::with_capacity(dim);
            let mut weight = 1.0;
            for d in 0..dim {
                let (a, b) = element.bounds[d];
                let half = 0.5 * (b - a);
                pc.push(0.5 * (a + b) + half * rules[d].points[q[d]]);
                weight *= half * rules[d].weights[q[d]];
            }
            let basis = geometry.point_basis(&pc)?;

            let mut jac = vec![vec![0.0; dim]; dim];
            for (k, &i) in basis.indices.iter().enumerate() {
                let x = phys.point(i);
                for r in 0..dim {
                    for c in 0..dim {
                        jac[r][c] += x[r] * basis.gradients[k][c];
                    }
                }
            }
            let (det, inv) = det_and_inverse(&jac);
            if !(det.abs() >= MIN_ABS_DET) {
                return Err(Error::Numerical(format!(
                    "geometry Jacobian determinant {det:e} at parameter {pc:?}"
                )));
            }
            min_abs_det = min_abs_det.min(det.abs());
            let dv = weight * det.abs();

            // grad_x R = J^{-T} grad_u R
            let grads: Vec<Vec<f64>> = basis
                .gradients
                .iter()
                .map(|g| {
                    (0..dim)
                        .map(|r| (0..dim).map(|c| inv[c][r] * g[c]).sum())
                        .collect()
                })
                .collect();
            for (a, &i) in basis.indices.iter().enumerate() {
                load[i] += basis.values[a] * source * dv;
                for (b, &j) in basis.indices.iter().enumerate() {
                    let dot: f64 = grads[a].iter().zip(&grads[b]).map(|(x, y)| x * y).sum();
                    stiffness[(i, j)] += dot * dv;
                }
            }
        }
    }

    Ok(PoissonSystem {
        stiffness,
        load,
        dofs: (0..n).collect(),
        boundary: boundary_flags(phys.grid()),
        min_abs_det,
    })
}

/// Drops boundary rows and columns. Valid for homogeneous conditions on
/// clamped splines, whose boundary is governed by the boundary control
/// points alone.
pub fn apply_homogeneous_dirichlet(system: PoissonSystem) -> Result<PoissonSystem> {
    let keep: Vec<usize> = (0..system.dofs.len())
        .filter(|&r| !system.boundary[system.dofs[r]])
        .collect();
    if keep.is_empty() {
        return Err(Error::Numerical(
            "every control point lies on the boundary; no free degrees of freedom".into(),
        ));
    }
    Ok(PoissonSystem {
        stiffness: system.stiffness.restrict(&keep),
        load: keep.iter().map(|&r| system.load[r]).collect(),
        dofs: keep.iter().map(|&r| system.dofs[r]).collect(),
        boundary: system.boundary,
        min_abs_det: system.min_abs_det,
    })
}

/// One coefficient per control point of the geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub coefficients: Vec<f64>,
}

impl SolutionField {
    /// `u(pc) = Σ R_i(pc) c_i`.
    pub fn evaluate(&self, geometry: &Spline, pc: &[f64]) -> Result<f64> {
        let basis = geometry.point_basis(pc)?;
        Ok(basis
            .indices
            .iter()
            .zip(&basis.values)
            .map(|(&i, r)| r * self.coefficients[i])
            .sum())
    }
}

pub fn solve_poisson(
    geometry: &Spline,
    source: f64,
    quad_per_direction: Option<usize>,
) -> Result<SolutionField> {
    let system = apply_homogeneous_dirichlet(assemble(geometry, source, quad_per_direction)?)?;
    let x = solve_spd(&system.stiffness, &system.load)?;
    let mut coefficients = vec![0.0; system.boundary.len()];
    for (&i, v) in system.dofs.iter().zip(x) {
        coefficients[i] = v;
    }
    Ok(SolutionField { coefficients })
}

/// Unit interval, square or cube as a B-spline of the given degree with
/// `elements` equal elements per direction, parameterized by the identity.
///
/// Starts from a single Bézier element with control points at `i/p` and
/// inserts the interior knots `k/elements`.
pub fn unit_box(dim: usize, elements: usize, degree: usize) -> Result<Spline> {
    if elements == 0 || degree == 0 {
        return Err(Error::Unsupported(
            "unit box needs at least one element and degree >= 1".into(),
        ));
    }
    let mut knots = vec![0.0; degree + 1];
    knots.extend(vec![1.0; degree + 1]);
    let kvs = vec![KnotVector::new(knots)?; dim];
    let grid = TensorGrid::new(vec![degree + 1; dim])?;
    let points: Vec<Vec<f64>> = grid
        .indices()
        .map(|idx| idx.iter().map(|&i| i as f64 / degree as f64).collect())
        .collect();
    let mut spline: Spline = BSpline::new(kvs, vec![degree; dim], points)?.into();
    for direction in 0..dim {
        for k in 1..elements {
            let request = InsertionRequest {
                direction,
                knot: k as f64 / elements as f64,
                multiplicity: 1,
            };
            spline = insert_knot(&spline, request)?;
        }
    }
    Ok(spline)
}

/// Fixes parametric coordinate `direction` at `value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slice {
    pub direction: usize,
    pub value: f64,
}

/// The geometry and solution restricted to a slice, as a spline of one
/// dimension less with its own solution coefficients.
///
/// Every control-point line along the sliced direction is contracted with
/// the basis functions at the slice value. For NURBS this happens in
/// homogeneous coordinates, with the solution carried as `w c`.
pub fn slice_field(
    geometry: &Spline,
    field: &SolutionField,
    slice: Slice,
) -> Result<(Spline, SolutionField)> {
    let dim = geometry.dim();
    if dim < 2 || slice.direction >= dim {
        return Err(Error::Unsupported(format!(
            "cannot slice direction {} of a {dim}-D spline",
            slice.direction
        )));
    }
    let ps = geometry.parameter_space();
    let mut pc: Vec<f64> = (0..dim).map(|d| ps.bounds(d).0).collect();
    pc[slice.direction] = slice.value;
    ps.check_coords(&pc)?;

    let (hdim, coords) = geometry.homogeneous_coords();
    let rational = geometry.is_rational();
    let width = hdim + 1;
    let carried: Vec<f64> = coords
        .chunks_exact(hdim)
        .zip(&field.coefficients)
        .flat_map(|(h, &c)| {
            let w = if rational { h[hdim - 1] } else { 1.0 };
            h.iter().copied().chain(std::iter::once(w * c))
        })
        .collect();

    let grid = geometry.physical_space().grid();
    let basis = ps.direction_basis(slice.direction, slice.value, 0)?;
    let mut sizes = grid.sizes().to_vec();
    sizes.remove(slice.direction);
    let target = TensorGrid::new(sizes)?;
    let mut out = vec![0.0; target.len() * width];
    for (linear, mut idx) in grid.indices().enumerate() {
        let j = idx.remove(slice.direction);
        let Some(k) = j
            .checked_sub(basis.first)
            .filter(|&k| k < basis.values.len())
        else {
            continue;
        };
        let n = basis.values[k][0];
        let t = target.linearize(&idx)?;
        for c in 0..width {
            out[t * width + c] += n * carried[linear * width + c];
        }
    }

    let mut kvs = ps.knot_vectors().to_vec();
    kvs.remove(slice.direction);
    let mut degrees = ps.degrees().to_vec();
    degrees.remove(slice.direction);
    let sliced_ps = ParameterSpace::new(kvs, degrees)?;

    let mut hcoords = Vec::with_capacity(target.len() * hdim);
    let mut coefficients = Vec::with_capacity(target.len());
    for chunk in out.chunks_exact(width) {
        hcoords.extend_from_slice(&chunk[..hdim]);
        let w = if rational { chunk[hdim - 1] } else { 1.0 };
        coefficients.push(chunk[hdim] / w);
    }
    let spline = Spline::from_homogeneous(sliced_ps, rational, hcoords, hdim)?;
    Ok((spline, SolutionField { coefficients }))
}

/// Writes the solution as legacy VTK with a `solution` point field.
/// With a slice, the exported spline is the restricted one and
/// `resolution` counts one direction less.
pub fn export_solution(
    geometry: &Spline,
    field: &SolutionField,
    resolution: &SampleResolution,
    path: &Path,
    slice: Option<Slice>,
) -> Result<()> {
    if !(1..=3).contains(&geometry.dim()) {
        return Err(Error::Unsupported(format!(
            "export needs parametric dimension 1, 2 or 3, got {}",
            geometry.dim()
        )));
    }
    let (spline, field) = match slice {
        Some(s) => slice_field(geometry, field, s)?,
        None => (geometry.clone(), field.clone()),
    };
    let entry = SplineEntry::new(spline).with_field(DataField {
        name: "solution".into(),
        location: DataLocation::ControlPoint,
        values: field.coefficients,
    })?;
    let file = SplineFile {
        entries: vec![entry],
    };
    io::write_vtk(&file, std::slice::from_ref(resolution), path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(elements: usize, degree: usize) -> Spline {
        unit_box(1, elements, degree).unwrap()
    }

    #[test]
    fn single_linear_element() {
        let sys = assemble(&interval(1, 1), 1.0, None).unwrap();
        let expected = DenseMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((sys.stiffness[(i, j)] - expected[(i, j)]).abs() < 1e-14);
            }
            assert!((sys.load[i] - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn symmetric_with_constant_kernel() {
        for geometry in [
            interval(3, 2),
            unit_box(2, 2, 2).unwrap(),
            unit_box(3, 2, 1).unwrap(),
        ] {
            let sys = assemble(&geometry, 1.0, None).unwrap();
            assert!(sys.stiffness.asymmetry() <= 1e-12 * sys.stiffness.norm_inf());
            let ones = vec![1.0; sys.load.len()];
            assert!(sys.stiffness.mul_vec(&ones).iter().all(|v| v.abs() < 1e-10));
        }
    }

    #[test]
    fn dirichlet_counts() {
        let sys =
            apply_homogeneous_dirichlet(assemble(&interval(1, 2), 1.0, None).unwrap()).unwrap();
        assert_eq!(sys.dofs, vec![1]);
        // 5 control points per direction: degree 2 with 3 elements
        let cube = unit_box(3, 3, 2).unwrap();
        assert_eq!(cube.physical_space().grid().sizes(), &[5, 5, 5]);
        let sys = apply_homogeneous_dirichlet(assemble(&cube, 1.0, None).unwrap()).unwrap();
        assert_eq!(sys.dofs.len(), 27);
        assert!(
            apply_homogeneous_dirichlet(assemble(&interval(1, 1), 1.0, None).unwrap()).is_err()
        );
    }

    #[test]
    fn linear_two_elements() {
        let g = interval(2, 1);
        let u = solve_poisson(&g, 1.0, None).unwrap();
        assert!((u.evaluate(&g, &[0.5]).unwrap() - 0.125).abs() < 1e-14);
        assert_eq!(u.coefficients[0], 0.0);
        assert_eq!(u.coefficients[2], 0.0);
    }

    #[test]
    fn quadratic_is_exact() {
        for elements in [1, 2, 5] {
            let g = interval(elements, 2);
            let u = solve_poisson(&g, 1.0, None).unwrap();
            for k in 0..=100 {
                let x = k as f64 / 100.0;
                assert!((u.evaluate(&g, &[x]).unwrap() - x * (1.0 - x) / 2.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn unit_box_is_identity_map() {
        let g = unit_box(2, 3, 2).unwrap();
        for pc in [[0.1, 0.7], [0.5, 0.5], [1.0, 0.0]] {
            let x = g.point(&pc).unwrap();
            assert!((x[0] - pc[0]).abs() < 1e-14 && (x[1] - pc[1]).abs() < 1e-14);
        }
        assert_eq!(elements(g.parameter_space()).len(), 9);
    }

    #[test]
    fn degenerate_jacobian() {
        let g = unit_box(2, 1, 1)
            .unwrap()
            .map_control_points(|p| vec![p[0], 0.0])
            .unwrap();
        assert!(matches!(assemble(&g, 1.0, None), Err(Error::Numerical(_))));
    }

    #[test]
    fn slice_matches_volume() {
        let g = unit_box(3, 2, 2).unwrap();
        let u = solve_poisson(&g, 1.0, None).unwrap();
        for direction in 0..3 {
            let (s, v) = slice_field(
                &g,
                &u,
                Slice {
                    direction,
                    value: 0.3,
                },
            )
            .unwrap();
            assert_eq!(s.dim(), 2);
            for (a, b) in [(0.2, 0.4), (0.5, 0.5), (0.9, 0.1)] {
                let mut pc = vec![a, b];
                pc.insert(direction, 0.3);
                let x = s.point(&[a, b]).unwrap();
                let y = g.point(&pc).unwrap();
                assert!(x.iter().zip(&y).all(|(p, q)| (p - q).abs() < 1e-14));
                let diff = v.evaluate(&s, &[a, b]).unwrap() - u.evaluate(&g, &pc).unwrap();
                assert!(diff.abs() < 1e-14);
            }
        }
        assert!(slice_field(
            &interval(2, 2),
            &u,
            Slice {
                direction: 0,
                value: 0.5
            }
        )
        .is_err());
    }

    #[test]
    fn one_dimensional_export_peaks_in_the_middle() {
        let g = interval(4, 2);
        let u = solve_poisson(&g, 1.0, None).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.vtk");
        export_solution(
            &g,
            &u,
            &SampleResolution::new(vec![101]).unwrap(),
            &path,
            None,
        )
        .unwrap();
        let summary = io::check_vtk_structure(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!((summary.points, summary.cells), (101, 100));
        assert_eq!(summary.point_fields, vec!["solution".to_string()]);
        let values = &summary.point_values[0];
        let argmax = (0..values.len())
            .max_by(|&a, &b| values[a].total_cmp(&values[b]))
            .unwrap();
        assert_eq!(argmax, 50);
        assert!((values[50] - 0.125).abs() < 1e-12);
    }
}
