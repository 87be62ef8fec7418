//! Tensor-product B-splines and NURBS behind one interface.

use crate::{BasisFunction, Error, KnotVector, Result, TensorGrid};

/// Largest supported parametric dimension.
pub const MAX_PARAMETRIC_DIM: usize = 4;

/// Knot vectors, degrees and basis-function trees for every parametric
/// direction.
#[derive(Debug, Clone)]
pub struct ParameterSpace {
    knot_vectors: Vec<KnotVector>,
    degrees: Vec<usize>,
    basis: Vec<Vec<BasisFunction>>,
}

impl PartialEq for ParameterSpace {
    fn eq(&self, other: &Self) -> bool {
        self.knot_vectors == other.knot_vectors && self.degrees == other.degrees
    }
}

/// Non-zero basis functions of one direction at one coordinate:
/// functions `first ..= first + p`, each with derivatives `0..=max_order`.
#[derive(Debug, Clone)]
pub struct DirectionBasis {
    pub first: usize,
    pub values: Vec<Vec<f64>>,
}

impl ParameterSpace {
    pub fn new(knot_vectors: Vec<KnotVector>, degrees: Vec<usize>) -> Result<Self> {
        let dim = knot_vectors.len();
        if dim == 0 || dim > MAX_PARAMETRIC_DIM {
            return Err(Error::InvalidSpline(format!(
                "parametric dimension must be in 1..={MAX_PARAMETRIC_DIM}, got {dim}"
            )));
        }
        if degrees.len() != dim {
            return Err(Error::InvalidSpline(format!(
                "{} degrees given for {dim} knot vectors",
                degrees.len()
            )));
        }
        let mut basis = Vec::with_capacity(dim);
        for (d, (kv, &p)) in knot_vectors.iter().zip(&degrees).enumerate() {
            if !kv.is_clamped(p) {
                return Err(Error::InvalidSpline(format!(
                    "knot vector of direction {d} is not clamped for degree {p}"
                )));
            }
            let count = kv.len() - p - 1;
            basis.push(
                (0..count)
                    .map(|i| BasisFunction::create(kv, i, p))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        Ok(Self {
            knot_vectors,
            degrees,
            basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn knot_vector(&self, dir: usize) -> &KnotVector {
        &self.knot_vectors[dir]
    }

    pub fn knot_vectors(&self) -> &[KnotVector] {
        &self.knot_vectors
    }

    pub fn degree(&self, dir: usize) -> usize {
        self.degrees[dir]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn basis_functions(&self, dir: usize) -> &[BasisFunction] {
        &self.basis[dir]
    }

    /// Number of basis functions along `dir` (`n_d + 1 = m_d - p_d`).
    pub fn num_basis(&self, dir: usize) -> usize {
        self.basis[dir].len()
    }

    pub fn grid(&self) -> TensorGrid {
        TensorGrid::new((0..self.dim()).map(|d| self.num_basis(d)).collect())
            .expect("clamped directions have at least one basis function")
    }

    /// Parametric bounds `(u_0, u_m)` of `dir`.
    pub fn bounds(&self, dir: usize) -> (f64, f64) {
        let kv = &self.knot_vectors[dir];
        (kv.first(), kv.last())
    }

    pub fn check_coords(&self, pc: &[f64]) -> Result<()> {
        if pc.len() != self.dim() {
            return Err(Error::InvalidSpline(format!(
                "expected {} parametric coordinates, got {}",
                self.dim(),
                pc.len()
            )));
        }
        for (kv, &u) in self.knot_vectors.iter().zip(pc) {
            if !u.is_finite() || !kv.contains(u) {
                return Err(Error::OutOfRange {
                    value: u,
                    lo: kv.first(),
                    hi: kv.last(),
                });
            }
        }
        Ok(())
    }

    /// Basis functions along `dir` whose support contains `u`.
    pub fn direction_basis(&self, dir: usize, u: f64, max_order: usize) -> Result<DirectionBasis> {
        let p = self.degrees[dir];
        let span = self.knot_vectors[dir].find_span(u)?;
        let first = span - p;
        let values = self.basis[dir][first..=span]
            .iter()
            .map(|bf| bf.eval_derivatives(u, max_order))
            .collect();
        Ok(DirectionBasis { first, values })
    }

    fn local_basis(&self, pc: &[f64], max_order: usize) -> Result<Vec<DirectionBasis>> {
        self.check_coords(pc)?;
        (0..self.dim())
            .map(|d| self.direction_basis(d, pc[d], max_order))
            .collect()
    }
}

/// Control-point grid, stored flat with `space_dim` coordinates per point.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalSpace {
    grid: TensorGrid,
    space_dim: usize,
    coords: Vec<f64>,
}

impl PhysicalSpace {
    pub fn new(grid: TensorGrid, control_points: &[Vec<f64>]) -> Result<Self> {
        if control_points.len() != grid.len() {
            return Err(Error::InvalidSpline(format!(
                "expected {} control points, got {}",
                grid.len(),
                control_points.len()
            )));
        }
        let space_dim = control_points[0].len();
        if space_dim == 0 {
            return Err(Error::InvalidSpline(
                "control points have no coordinates".into(),
            ));
        }
        let mut coords = Vec::with_capacity(space_dim * grid.len());
        for (i, p) in control_points.iter().enumerate() {
            if p.len() != space_dim {
                return Err(Error::InvalidSpline(format!(
                    "control point {i} has {} coordinates, expected {space_dim}",
                    p.len()
                )));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidSpline(format!(
                    "control point {i} has a non-finite coordinate"
                )));
            }
            coords.extend_from_slice(p);
        }
        Ok(Self {
            grid,
            space_dim,
            coords,
        })
    }

    pub(crate) fn from_flat(grid: TensorGrid, space_dim: usize, coords: Vec<f64>) -> Self {
        debug_assert_eq!(coords.len(), grid.len() * space_dim);
        Self {
            grid,
            space_dim,
            coords,
        }
    }

    pub fn grid(&self) -> &TensorGrid {
        &self.grid
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, linear: usize) -> &[f64] {
        &self.coords[linear * self.space_dim..(linear + 1) * self.space_dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.space_dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BSpline {
    parameter_space: ParameterSpace,
    physical_space: PhysicalSpace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nurbs {
    parameter_space: ParameterSpace,
    physical_space: PhysicalSpace,
    weights: Vec<f64>,
}

/// Common interface over B-splines and NURBS.
#[derive(Debug, Clone, PartialEq)]
pub enum Spline {
    BSpline(BSpline),
    Nurbs(Nurbs),
}

fn check_grid(ps: &ParameterSpace, phys: &PhysicalSpace) -> Result<()> {
    if ps.grid() != *phys.grid() {
        return Err(Error::InvalidSpline(format!(
            "control grid {:?} does not match the {:?} basis functions of the knot vectors",
            phys.grid().sizes(),
            ps.grid().sizes()
        )));
    }
    Ok(())
}

fn check_output_dims(output_dims: &[usize], space_dim: usize) -> Result<()> {
    match output_dims.iter().find(|&&d| d >= space_dim) {
        Some(&d) => Err(Error::IndexOutOfRange {
            index: d,
            size: space_dim,
        }),
        None => Ok(()),
    }
}

/// Visits every non-zero tensor-product basis function at a point, passing
/// its linear control-point index and its local multi-index.
fn for_each_local(grid: &TensorGrid, local: &[DirectionBasis], mut f: impl FnMut(usize, &[usize])) {
    let dim = local.len();
    let counts: Vec<usize> = local.iter().map(|b| b.values.len()).collect();
    let strides: Vec<usize> = (0..dim).map(|d| grid.stride(d)).collect();
    let mut idx = vec![0usize; dim];
    loop {
        let linear = (0..dim)
            .map(|d| (local[d].first + idx[d]) * strides[d])
            .sum();
        f(linear, &idx);
        let mut d = 0;
        loop {
            if d == dim {
                return;
            }
            idx[d] += 1;
            if idx[d] < counts[d] {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn product(local: &[DirectionBasis], idx: &[usize], orders: &[usize]) -> f64 {
    local
        .iter()
        .zip(idx)
        .zip(orders)
        .map(|((b, &i), &k)| b.values[i][k])
        .product()
}

impl BSpline {
    /// Control points are listed with the first parametric direction running
    /// fastest.
    pub fn new(
        knot_vectors: Vec<KnotVector>,
        degrees: Vec<usize>,
        control_points: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let parameter_space = ParameterSpace::new(knot_vectors, degrees)?;
        let physical_space = PhysicalSpace::new(parameter_space.grid(), &control_points)?;
        Self::from_parts(parameter_space, physical_space)
    }

    pub fn from_parts(
        parameter_space: ParameterSpace,
        physical_space: PhysicalSpace,
    ) -> Result<Self> {
        check_grid(&parameter_space, &physical_space)?;
        Ok(Self {
            parameter_space,
            physical_space,
        })
    }

    pub fn parameter_space(&self) -> &ParameterSpace {
        &self.parameter_space
    }

    pub fn physical_space(&self) -> &PhysicalSpace {
        &self.physical_space
    }

    pub fn evaluate(&self, pc: &[f64], output_dims: &[usize]) -> Result<Vec<f64>> {
        self.evaluate_derivative(pc, &vec![0; pc.len()], output_dims)
    }

    /// Mixed partial derivative with `orders[d]` derivatives along `d`.
    pub fn evaluate_derivative(
        &self,
        pc: &[f64],
        orders: &[usize],
        output_dims: &[usize],
    ) -> Result<Vec<f64>> {
        check_output_dims(output_dims, self.physical_space.space_dim)?;
        check_orders(orders, self.parameter_space.dim())?;
        let max_order = orders.iter().copied().max().unwrap_or(0);
        let local = self.parameter_space.local_basis(pc, max_order)?;
        let mut out = vec![0.0; output_dims.len()];
        for_each_local(self.physical_space.grid(), &local, |linear, idx| {
            let n = product(&local, idx, orders);
            let p = self.physical_space.point(linear);
            for (o, &d) in out.iter_mut().zip(output_dims) {
                *o += n * p[d];
            }
        });
        Ok(out)
    }
}

fn check_orders(orders: &[usize], dim: usize) -> Result<()> {
    if orders.len() != dim {
        return Err(Error::InvalidSpline(format!(
            "expected {dim} derivative orders, got {}",
            orders.len()
        )));
    }
    Ok(())
}

impl Nurbs {
    pub fn new(
        knot_vectors: Vec<KnotVector>,
        degrees: Vec<usize>,
        control_points: Vec<Vec<f64>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let parameter_space = ParameterSpace::new(knot_vectors, degrees)?;
        let physical_space = PhysicalSpace::new(parameter_space.grid(), &control_points)?;
        Self::from_parts(parameter_space, physical_space, weights)
    }

    pub fn from_parts(
        parameter_space: ParameterSpace,
        physical_space: PhysicalSpace,
        weights: Vec<f64>,
    ) -> Result<Self> {
        check_grid(&parameter_space, &physical_space)?;
        if weights.len() != physical_space.len() {
            return Err(Error::InvalidSpline(format!(
                "expected {} weights, got {}",
                physical_space.len(),
                weights.len()
            )));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::InvalidSpline(format!(
                "weight {i} is {w}; weights must be positive"
            )));
        }
        Ok(Self {
            parameter_space,
            physical_space,
            weights,
        })
    }

    pub fn parameter_space(&self) -> &ParameterSpace {
        &self.parameter_space
    }

    pub fn physical_space(&self) -> &PhysicalSpace {
        &self.physical_space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn evaluate(&self, pc: &[f64], output_dims: &[usize]) -> Result<Vec<f64>> {
        check_output_dims(output_dims, self.physical_space.space_dim)?;
        let local = self.parameter_space.local_basis(pc, 0)?;
        let zeros = vec![0; pc.len()];
        let mut num = vec![0.0; output_dims.len()];
        let mut den = 0.0;
        for_each_local(self.physical_space.grid(), &local, |linear, idx| {
            let nw = product(&local, idx, &zeros) * self.weights[linear];
            let p = self.physical_space.point(linear);
            for (o, &d) in num.iter_mut().zip(output_dims) {
                *o += nw * p[d];
            }
            den += nw;
        });
        Ok(num.into_iter().map(|a| a / den).collect())
    }

    /// Derivatives of total order at most one (quotient rule).
    pub fn evaluate_derivative(
        &self,
        pc: &[f64],
        orders: &[usize],
        output_dims: &[usize],
    ) -> Result<Vec<f64>> {
        check_orders(orders, self.parameter_space.dim())?;
        let total: usize = orders.iter().sum();
        if total == 0 {
            return self.evaluate(pc, output_dims);
        }
        if total > 1 {
            return Err(Error::Unsupported(format!(
                "NURBS derivatives of total order {total}; only order 1 is implemented"
            )));
        }
        check_output_dims(output_dims, self.physical_space.space_dim)?;
        let local = self.parameter_space.local_basis(pc, 1)?;
        let zeros = vec![0; pc.len()];
        let (mut a, mut da) = (vec![0.0; output_dims.len()], vec![0.0; output_dims.len()]);
        let (mut w, mut dw) = (0.0, 0.0);
        for_each_local(self.physical_space.grid(), &local, |linear, idx| {
            let wi = self.weights[linear];
            let n = product(&local, idx, &zeros) * wi;
            let dn = product(&local, idx, orders) * wi;
            let p = self.physical_space.point(linear);
            for (k, &d) in output_dims.iter().enumerate() {
                a[k] += n * p[d];
                da[k] += dn * p[d];
            }
            w += n;
            dw += dn;
        });
        Ok(a.iter()
            .zip(&da)
            .map(|(&a, &da)| (da - a / w * dw) / w)
            .collect())
    }
}

/// Non-zero basis functions of a spline at one parametric point, with their
/// first parametric derivatives. Rational for NURBS.
#[derive(Debug, Clone)]
pub struct PointBasis {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    /// `gradients[k][d]` is the derivative of basis `k` along direction `d`.
    pub gradients: Vec<Vec<f64>>,
}

impl Spline {
    pub fn parameter_space(&self) -> &ParameterSpace {
        match self {
            Spline::BSpline(s) => &s.parameter_space,
            Spline::Nurbs(s) => &s.parameter_space,
        }
    }

    pub fn physical_space(&self) -> &PhysicalSpace {
        match self {
            Spline::BSpline(s) => &s.physical_space,
            Spline::Nurbs(s) => &s.physical_space,
        }
    }

    pub fn weights(&self) -> Option<&[f64]> {
        match self {
            Spline::BSpline(_) => None,
            Spline::Nurbs(s) => Some(&s.weights),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Spline::Nurbs(_))
    }

    pub fn dim(&self) -> usize {
        self.parameter_space().dim()
    }

    pub fn space_dim(&self) -> usize {
        self.physical_space().space_dim()
    }

    pub fn num_control_points(&self) -> usize {
        self.physical_space().len()
    }

    pub fn evaluate(&self, pc: &[f64], output_dims: &[usize]) -> Result<Vec<f64>> {
        match self {
            Spline::BSpline(s) => s.evaluate(pc, output_dims),
            Spline::Nurbs(s) => s.evaluate(pc, output_dims),
        }
    }

    /// All physical coordinates at `pc`.
    pub fn point(&self, pc: &[f64]) -> Result<Vec<f64>> {
        let dims: Vec<usize> = (0..self.space_dim()).collect();
        self.evaluate(pc, &dims)
    }

    pub fn evaluate_derivative(
        &self,
        pc: &[f64],
        orders: &[usize],
        output_dims: &[usize],
    ) -> Result<Vec<f64>> {
        match self {
            Spline::BSpline(s) => s.evaluate_derivative(pc, orders, output_dims),
            Spline::Nurbs(s) => s.evaluate_derivative(pc, orders, output_dims),
        }
    }

    /// Non-zero basis functions at `pc` with their parametric gradients.
    pub fn point_basis(&self, pc: &[f64]) -> Result<PointBasis> {
        let ps = self.parameter_space();
        let dim = ps.dim();
        let local = ps.local_basis(pc, 1)?;
        let mut out = PointBasis {
            indices: Vec::new(),
            values: Vec::new(),
            gradients: Vec::new(),
        };
        let zeros = vec![0; dim];
        let unit: Vec<Vec<usize>> = (0..dim)
            .map(|d| (0..dim).map(|e| usize::from(e == d)).collect())
            .collect();
        for_each_local(self.physical_space().grid(), &local, |linear, idx| {
            out.indices.push(linear);
            out.values.push(product(&local, idx, &zeros));
            out.gradients
                .push(unit.iter().map(|o| product(&local, idx, o)).collect());
        });
        if let Some(weights) = self.weights() {
            let mut w = 0.0;
            let mut dw = vec![0.0; dim];
            for (k, &i) in out.indices.iter().enumerate() {
                w += out.values[k] * weights[i];
                for d in 0..dim {
                    dw[d] += out.gradients[k][d] * weights[i];
                }
            }
            for (k, &i) in out.indices.iter().enumerate() {
                let n = out.values[k];
                for d in 0..dim {
                    out.gradients[k][d] =
                        weights[i] * (out.gradients[k][d] * w - n * dw[d]) / (w * w);
                }
                out.values[k] = n * weights[i] / w;
            }
        }
        Ok(out)
    }

    /// Control points in homogeneous form: `(w P, w)` for NURBS, `P` otherwise.
    pub(crate) fn homogeneous_coords(&self) -> (usize, Vec<f64>) {
        let phys = self.physical_space();
        match self.weights() {
            None => (phys.space_dim(), phys.coords().to_vec()),
            Some(weights) => {
                let n = phys.space_dim();
                let mut out = Vec::with_capacity((n + 1) * phys.len());
                for (p, &w) in phys.points().zip(weights) {
                    out.extend(p.iter().map(|c| c * w));
                    out.push(w);
                }
                (n + 1, out)
            }
        }
    }

    /// Inverse of [`Spline::homogeneous_coords`].
    pub(crate) fn from_homogeneous(
        parameter_space: ParameterSpace,
        rational: bool,
        coords: Vec<f64>,
        hdim: usize,
    ) -> Result<Self> {
        let grid = parameter_space.grid();
        if !rational {
            let phys = PhysicalSpace::from_flat(grid, hdim, coords);
            return BSpline::from_parts(parameter_space, phys).map(Spline::BSpline);
        }
        let n = hdim - 1;
        let mut points = Vec::with_capacity(n * grid.len());
        let mut weights = Vec::with_capacity(grid.len());
        for chunk in coords.chunks_exact(hdim) {
            let w = chunk[n];
            points.extend(chunk[..n].iter().map(|c| c / w));
            weights.push(w);
        }
        let phys = PhysicalSpace::from_flat(grid, n, points);
        Nurbs::from_parts(parameter_space, phys, weights).map(Spline::Nurbs)
    }

    /// Same spline with every control point replaced by `f(point)`.
    pub fn map_control_points(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<Self> {
        let points: Vec<Vec<f64>> = self.physical_space().points().map(&mut f).collect();
        let ps = self.parameter_space().clone();
        let phys = PhysicalSpace::new(ps.grid(), &points)?;
        match self {
            Spline::BSpline(_) => BSpline::from_parts(ps, phys).map(Spline::BSpline),
            Spline::Nurbs(s) => Nurbs::from_parts(ps, phys, s.weights.clone()).map(Spline::Nurbs),
        }
    }

    /// Largest absolute difference of knots, control points and weights, or
    /// `None` when the two splines differ in structure.
    pub fn max_difference(&self, other: &Spline) -> Option<f64> {
        let (a, b) = (self.parameter_space(), other.parameter_space());
        if a.degrees() != b.degrees() || self.is_rational() != other.is_rational() {
            return None;
        }
        let mut diff: f64 = 0.0;
        for (ka, kb) in a.knot_vectors().iter().zip(b.knot_vectors()) {
            if ka.len() != kb.len() {
                return None;
            }
            for (x, y) in ka.as_slice().iter().zip(kb.as_slice()) {
                diff = diff.max((x - y).abs());
            }
        }
        let (pa, pb) = (self.physical_space(), other.physical_space());
        if pa.grid() != pb.grid() || pa.space_dim() != pb.space_dim() {
            return None;
        }
        for (x, y) in pa.coords().iter().zip(pb.coords()) {
            diff = diff.max((x - y).abs());
        }
        if let (Some(wa), Some(wb)) = (self.weights(), other.weights()) {
            for (x, y) in wa.iter().zip(wb) {
                diff = diff.max((x - y).abs());
            }
        }
        Some(diff)
    }
}

impl From<BSpline> for Spline {
    fn from(s: BSpline) -> Self {
        Spline::BSpline(s)
    }
}

impl From<Nurbs> for Spline {
    fn from(s: Nurbs) -> Self {
        Spline::Nurbs(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kv(v: &[f64]) -> KnotVector {
        KnotVector::new(v.to_vec()).unwrap()
    }

    fn bezier2() -> KnotVector {
        kv(&[0.0, 0.0, 0.0, 1.0, 1.0, 1.0])
    }

    fn initial_curve() -> BSpline {
        BSpline::new(
            vec![bezier2()],
            vec![2],
            vec![vec![-1.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0]],
        )
        .unwrap()
    }

    fn quarter_circle() -> Nurbs {
        Nurbs::new(
            vec![bezier2()],
            vec![2],
            vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]],
            vec![1.0, std::f64::consts::FRAC_1_SQRT_2, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn construction_errors() {
        let four = vec![vec![0.0, 0.0]; 4];
        assert!(BSpline::new(vec![bezier2()], vec![2], four).is_err());
        let unclamped = kv(&[0.0, 0.0, 0.5, 1.0, 1.0, 1.0]);
        assert!(BSpline::new(vec![unclamped], vec![2], vec![vec![0.0]; 3]).is_err());
        let mixed = vec![vec![0.0, 0.0], vec![0.0], vec![1.0, 0.0]];
        assert!(BSpline::new(vec![bezier2()], vec![2], mixed).is_err());
        let pts = vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        assert!(Nurbs::new(vec![bezier2()], vec![2], pts.clone(), vec![1.0, 0.0, 1.0]).is_err());
        assert!(Nurbs::new(vec![bezier2()], vec![2], pts.clone(), vec![1.0, -1.0, 1.0]).is_err());
        assert!(Nurbs::new(vec![bezier2()], vec![2], pts, vec![1.0, 1.0]).is_err());
        let line = kv(&[0.0, 0.0, 1.0, 1.0]);
        let five = vec![line.clone(), line.clone(), line.clone(), line.clone(), line];
        assert!(ParameterSpace::new(five, vec![1; 5]).is_err());
    }

    #[test]
    fn initial_curve_evaluation() {
        let c = initial_curve();
        assert_eq!(c.evaluate(&[0.5], &[1]).unwrap(), vec![0.0]);
        assert_eq!(c.evaluate(&[0.0], &[0, 1]).unwrap(), vec![-1.0, 0.0]);
        let d = c.evaluate_derivative(&[0.5], &[1], &[0]).unwrap();
        assert!((d[0] - 2.0).abs() < 1e-14);
        assert_eq!(
            c.evaluate_derivative(&[0.3], &[0], &[0, 1]).unwrap(),
            c.evaluate(&[0.3], &[0, 1]).unwrap()
        );
        assert!(c.evaluate(&[1.5], &[0]).is_err());
        assert!(c.evaluate(&[0.5], &[2]).is_err());
        assert!(c.evaluate(&[0.5, 0.5], &[0]).is_err());
    }

    #[test]
    fn bilinear_surface() {
        let line = kv(&[0.0, 0.0, 1.0, 1.0]);
        let s = BSpline::new(
            vec![line.clone(), line],
            vec![1, 1],
            vec![
                vec![0.0, 0.0],
                vec![2.0, 0.0],
                vec![0.0, 3.0],
                vec![2.0, 3.0],
            ],
        )
        .unwrap();
        assert_eq!(s.evaluate(&[0.5, 0.5], &[0, 1]).unwrap(), vec![1.0, 1.5]);
        assert_eq!(s.evaluate(&[1.0, 0.0], &[0, 1]).unwrap(), vec![2.0, 0.0]);
    }

    #[test]
    fn quarter_circle_evaluation() {
        let q = quarter_circle();
        let p = q.evaluate(&[0.5], &[0, 1]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((p[0] - h).abs() < 1e-15 && (p[1] - h).abs() < 1e-15);
        let t = q.evaluate_derivative(&[0.0], &[1], &[0, 1]).unwrap();
        assert!(t[0].abs() < 1e-15 && t[1] > 0.0);
        assert!(q.evaluate_derivative(&[0.0], &[2], &[0]).is_err());
    }

    #[test]
    fn unit_weights_reduce_to_bspline() {
        let b = initial_curve();
        let pts: Vec<Vec<f64>> = b.physical_space().points().map(<[f64]>::to_vec).collect();
        let n = Nurbs::new(vec![bezier2()], vec![2], pts, vec![1.0; 3]).unwrap();
        for u in [0.0, 0.1, 0.5, 0.77, 1.0] {
            assert_eq!(
                b.evaluate(&[u], &[0, 1]).unwrap(),
                n.evaluate(&[u], &[0, 1]).unwrap()
            );
        }
    }

    #[test]
    fn rational_point_basis_sums_to_one() {
        let s = Spline::from(quarter_circle());
        let b = s.point_basis(&[0.3]).unwrap();
        let sum: f64 = b.values.iter().sum();
        let dsum: f64 = b.gradients.iter().map(|g| g[0]).sum();
        assert!((sum - 1.0).abs() < 1e-15);
        assert!(dsum.abs() < 1e-14);
    }
}
