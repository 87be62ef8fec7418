//! Knot insertion, knot removal and subdivision along any parametric
//! direction.
//!
//! All three operate row by row on the control grid: every line of control
//! points running along the chosen direction is treated as the control
//! polygon of a curve. NURBS are handled in homogeneous coordinates
//! `(w P, w)`, so the same arithmetic applies to both spline kinds.

use std::ops::Range;

use crate::spline::ParameterSpace;
use crate::{Error, KnotVector, Result, Spline, TensorGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsertionRequest {
    pub direction: usize,
    pub knot: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemovalRequest {
    pub direction: usize,
    pub knot: f64,
    pub times: usize,
    /// Bound on the Euclidean distance between the original and the
    /// reduced spline.
    pub tolerance: f64,
}

/// Homogeneous control net of a spline, flat with `hdim` values per point.
struct Net {
    grid: TensorGrid,
    hdim: usize,
    coords: Vec<f64>,
}

impl Net {
    fn of(spline: &Spline) -> Self {
        let (hdim, coords) = spline.homogeneous_coords();
        Net {
            grid: spline.physical_space().grid().clone(),
            hdim,
            coords,
        }
    }

    /// Linear indices of the first point of every line along `dir`.
    fn line_starts(&self, dir: usize) -> Vec<usize> {
        let across = self.grid.with_size(dir, 1);
        across
            .indices()
            .map(|idx| self.grid.linearize(&idx).expect("index within grid"))
            .collect()
    }

    fn line(&self, dir: usize, start: usize) -> Vec<f64> {
        let stride = self.grid.stride(dir);
        let mut out = Vec::with_capacity(self.grid.sizes()[dir] * self.hdim);
        for j in 0..self.grid.sizes()[dir] {
            let at = (start + j * stride) * self.hdim;
            out.extend_from_slice(&self.coords[at..at + self.hdim]);
        }
        out
    }

    /// Rebuilds the net after replacing every line along `dir`; `f` maps the
    /// old line to the new one and must return lines of equal length.
    fn map_lines(&self, dir: usize, mut f: impl FnMut(&[f64]) -> Result<Vec<f64>>) -> Result<Net> {
        let starts = self.line_starts(dir);
        let mut lines = Vec::with_capacity(starts.len());
        for &s in &starts {
            lines.push(f(&self.line(dir, s))?);
        }
        let new_len = lines[0].len() / self.hdim;
        let grid = self.grid.with_size(dir, new_len);
        let mut coords = vec![0.0; grid.len() * self.hdim];
        let across = grid.with_size(dir, 1);
        let stride = grid.stride(dir);
        for (idx, line) in across.indices().zip(&lines) {
            let start = grid.linearize(&idx).expect("index within grid");
            for j in 0..new_len {
                let at = (start + j * stride) * self.hdim;
                coords[at..at + self.hdim]
                    .copy_from_slice(&line[j * self.hdim..(j + 1) * self.hdim]);
            }
        }
        Ok(Net {
            grid,
            hdim: self.hdim,
            coords,
        })
    }

    fn into_spline(
        self,
        rational: bool,
        knot_vectors: Vec<KnotVector>,
        degrees: Vec<usize>,
    ) -> Result<Spline> {
        let ps = ParameterSpace::new(knot_vectors, degrees)?;
        Spline::from_homogeneous(ps, rational, self.coords, self.hdim)
    }
}

fn check_direction(spline: &Spline, dir: usize) -> Result<()> {
    if dir >= spline.dim() {
        return Err(Error::InvalidManipulation(format!(
            "direction {dir} does not exist in a {}-parametric spline",
            spline.dim()
        )));
    }
    Ok(())
}

fn check_interior(kv: &KnotVector, u: f64) -> Result<()> {
    if !(u.is_finite() && kv.first() < u && u < kv.last()) {
        return Err(Error::InvalidManipulation(format!(
            "knot {u} is not strictly inside ({}, {})",
            kv.first(),
            kv.last()
        )));
    }
    Ok(())
}

/// Boehm insertion of `u` once into the control polygon `points`.
fn insert_once(
    knots: &[f64],
    p: usize,
    span: usize,
    u: f64,
    points: &[f64],
    hdim: usize,
) -> Vec<f64> {
    let n = points.len() / hdim;
    let mut out = Vec::with_capacity((n + 1) * hdim);
    let at = |i: usize| &points[i * hdim..(i + 1) * hdim];
    for i in 0..=n {
        if i + p <= span {
            out.extend_from_slice(at(i));
        } else if i > span {
            out.extend_from_slice(at(i - 1));
        } else {
            let alpha = (u - knots[i]) / (knots[i + p] - knots[i]);
            let (cur, prev) = (at(i), at(i - 1));
            out.extend(
                cur.iter()
                    .zip(prev)
                    .map(|(c, q)| alpha * c + (1.0 - alpha) * q),
            );
        }
    }
    out
}

fn with_knot_inserted(kv: &KnotVector, u: f64, times: usize) -> KnotVector {
    let mut knots = kv.as_slice().to_vec();
    let at = knots.partition_point(|&k| k <= u);
    knots.splice(at..at, std::iter::repeat_n(u, times));
    KnotVector::from_unchecked(knots)
}

/// Inserts `request.knot` `request.multiplicity` times without changing the
/// geometry.
pub fn insert_knot(spline: &Spline, request: InsertionRequest) -> Result<Spline> {
    let dir = request.direction;
    check_direction(spline, dir)?;
    let ps = spline.parameter_space();
    let kv = ps.knot_vector(dir);
    let p = ps.degree(dir);
    let u = request.knot;
    check_interior(kv, u)?;
    if request.multiplicity == 0 {
        return Err(Error::InvalidManipulation(
            "multiplicity must be positive".into(),
        ));
    }
    let existing = kv.multiplicity(u);
    if existing + request.multiplicity > p + 1 {
        return Err(Error::InvalidManipulation(format!(
            "knot {u} already has multiplicity {existing}; inserting {} more exceeds degree + 1 = {}",
            request.multiplicity,
            p + 1
        )));
    }

    let mut net = Net::of(spline);
    let mut kv = kv.clone();
    for _ in 0..request.multiplicity {
        let span = kv.find_span(u)?;
        let knots = kv.as_slice();
        let hdim = net.hdim;
        net = net.map_lines(dir, |line| Ok(insert_once(knots, p, span, u, line, hdim)))?;
        kv = with_knot_inserted(&kv, u, 1);
    }
    let mut kvs = ps.knot_vectors().to_vec();
    kvs[dir] = kv;
    net.into_spline(spline.is_rational(), kvs, ps.degrees().to_vec())
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// One removal of the knot `knots[r]` (multiplicity `s`) from a control
/// polygon. Returns the reduced polygon when the reconstruction from both
/// ends meets within `tol`.
fn remove_once(
    knots: &[f64],
    p: usize,
    r: usize,
    s: usize,
    points: &[f64],
    hdim: usize,
    tol: f64,
) -> Option<Vec<f64>> {
    let u = knots[r];
    let pt = |i: usize| &points[i * hdim..(i + 1) * hdim];
    let first = r - p;
    let last = r - s;
    let off = first - 1;
    let mut temp = vec![vec![0.0; hdim]; last + 2 - off];
    temp[0] = pt(off).to_vec();
    temp[last + 1 - off] = pt(last + 1).to_vec();
    let (mut i, mut j) = (first, last);
    let (mut ii, mut jj) = (1, last - off);
    while j > i {
        let alfi = (u - knots[i]) / (knots[i + p + 1] - knots[i]);
        let alfj = (u - knots[j]) / (knots[j + p + 1] - knots[j]);
        temp[ii] = (0..hdim)
            .map(|c| (pt(i)[c] - (1.0 - alfi) * temp[ii - 1][c]) / alfi)
            .collect();
        temp[jj] = (0..hdim)
            .map(|c| (pt(j)[c] - alfj * temp[jj + 1][c]) / (1.0 - alfj))
            .collect();
        i += 1;
        ii += 1;
        j -= 1;
        jj -= 1;
    }
    let ok = if j < i {
        distance(&temp[ii - 1], &temp[jj + 1]) <= tol
    } else {
        let alfi = (u - knots[i]) / (knots[i + p + 1] - knots[i]);
        let blend: Vec<f64> = (0..hdim)
            .map(|c| alfi * temp[ii + 1][c] + (1.0 - alfi) * temp[ii - 1][c])
            .collect();
        distance(pt(i), &blend) <= tol
    };
    if !ok {
        return None;
    }
    let mut new_points: Vec<Vec<f64>> = (0..points.len() / hdim).map(|k| pt(k).to_vec()).collect();
    let (mut i, mut j) = (first, last);
    while j > i {
        new_points[i] = temp[i - off].clone();
        new_points[j] = temp[j - off].clone();
        i += 1;
        j -= 1;
    }
    let fout = (2 * r - s - p) / 2;
    new_points.remove(fout);
    Some(new_points.concat())
}

/// Removes `request.knot` up to `request.times` times. A removal is kept
/// only while the reduced spline stays within `request.tolerance` of the
/// input; returns the reduced spline and the number of removals performed.
pub fn remove_knot(spline: &Spline, request: RemovalRequest) -> Result<(Spline, usize)> {
    let dir = request.direction;
    check_direction(spline, dir)?;
    let ps = spline.parameter_space();
    let u = request.knot;
    let p = ps.degree(dir);
    let original_kv = ps.knot_vector(dir);
    check_interior(original_kv, u)?;
    if original_kv.multiplicity(u) == 0 {
        return Err(Error::InvalidManipulation(format!(
            "knot {u} is not in the knot vector of direction {dir}"
        )));
    }
    if !(request.tolerance >= 0.0) {
        return Err(Error::InvalidManipulation(
            "tolerance must be non-negative".into(),
        ));
    }

    let original = Net::of(spline);
    // Control-point distance in homogeneous space bounds the rational curve
    // deviation only after scaling by min(w) / (1 + max|P|).
    let max_norm = spline
        .physical_space()
        .points()
        .map(|p| p.iter().map(|c| c * c).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let homogeneous_tol = |weights: Option<&[f64]>| match weights {
        None => request.tolerance,
        Some(w) => {
            let w_min = w.iter().copied().fold(f64::INFINITY, f64::min);
            request.tolerance * w_min / (1.0 + max_norm)
        }
    };
    let local_tol = homogeneous_tol(spline.weights());

    let mut current = spline.clone();
    let mut removed = 0;
    while removed < request.times {
        let cps = current.parameter_space();
        let kv = cps.knot_vector(dir);
        let s = kv.multiplicity(u);
        if s == 0 {
            break;
        }
        let r = kv.partition_point_last(u);
        let net = Net::of(&current);
        let hdim = net.hdim;
        let knots = kv.as_slice();
        let reduced = net.map_lines(dir, |line| {
            remove_once(knots, p, r, s, line, hdim, local_tol).ok_or(Error::InvalidManipulation(
                "removal exceeds tolerance".into(),
            ))
        });
        let Ok(reduced) = reduced else { break };
        let mut kvs = cps.knot_vectors().to_vec();
        let mut reduced_knots = knots.to_vec();
        reduced_knots.remove(r);
        kvs[dir] = KnotVector::from_unchecked(reduced_knots);
        let candidate = reduced.into_spline(current.is_rational(), kvs, cps.degrees().to_vec())?;

        // Refine the candidate back onto the input knot vector and compare
        // control points there.
        let refined = insert_knot(
            &candidate,
            InsertionRequest {
                direction: dir,
                knot: u,
                multiplicity: removed + 1,
            },
        )?;
        let refined_net = Net::of(&refined);
        let deviation = refined_net
            .coords
            .chunks_exact(hdim)
            .zip(original.coords.chunks_exact(hdim))
            .map(|(a, b)| distance(a, b))
            .fold(0.0, f64::max);
        if deviation > homogeneous_tol(refined.weights()) {
            break;
        }
        current = candidate;
        removed += 1;
    }
    Ok((current, removed))
}

fn slice_net(net: &Net, dir: usize, range: Range<usize>) -> Net {
    let grid = net.grid.with_size(dir, range.len());
    let mut coords = Vec::with_capacity(grid.len() * net.hdim);
    for idx in grid.indices() {
        let mut src = idx.clone();
        src[dir] += range.start;
        let at = net.grid.linearize(&src).expect("index within grid") * net.hdim;
        coords.extend_from_slice(&net.coords[at..at + net.hdim]);
    }
    Net {
        grid,
        hdim: net.hdim,
        coords,
    }
}

/// Splits `spline` at `at` along `direction` into the parts covering
/// `[u_0, at]` and `[at, u_m]`. Knot values are kept as they are.
pub fn subdivide(spline: &Spline, direction: usize, at: f64) -> Result<(Spline, Spline)> {
    check_direction(spline, direction)?;
    let ps = spline.parameter_space();
    check_interior(ps.knot_vector(direction), at)?;
    let p = ps.degree(direction);
    let missing = p + 1 - ps.knot_vector(direction).multiplicity(at);
    let full = if missing > 0 {
        insert_knot(
            spline,
            InsertionRequest {
                direction,
                knot: at,
                multiplicity: missing,
            },
        )?
    } else {
        spline.clone()
    };
    let fps = full.parameter_space();
    let knots = fps.knot_vector(direction).as_slice();
    let last = knots.partition_point(|&k| k <= at) - 1;
    let first = last - p;
    let net = Net::of(&full);
    let count = net.grid.sizes()[direction];

    let part = |knot_range: Range<usize>, point_range: Range<usize>| -> Result<Spline> {
        let mut kvs = fps.knot_vectors().to_vec();
        kvs[direction] = KnotVector::from_unchecked(knots[knot_range].to_vec());
        slice_net(&net, direction, point_range).into_spline(
            full.is_rational(),
            kvs,
            fps.degrees().to_vec(),
        )
    };
    Ok((
        part(0..last + 1, 0..first)?,
        part(first..knots.len(), first..count)?,
    ))
}

impl KnotVector {
    /// Index of the last knot `<= u`.
    fn partition_point_last(&self, u: f64) -> usize {
        self.as_slice().partition_point(|&k| k <= u) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{BSpline, Nurbs};

    fn kv(v: &[f64]) -> KnotVector {
        KnotVector::new(v.to_vec()).unwrap()
    }

    fn arch() -> Spline {
        BSpline::new(
            vec![kv(&[0.0, 0.0, 0.0, 1.0, 1.0, 1.0])],
            vec![2],
            vec![vec![-1.0, 0.0], vec![0.0, 2.0], vec![1.0, 0.0]],
        )
        .unwrap()
        .into()
    }

    fn points(s: &Spline) -> Vec<Vec<f64>> {
        s.physical_space().points().map(<[f64]>::to_vec).collect()
    }

    fn insert(s: &Spline, direction: usize, knot: f64, multiplicity: usize) -> Result<Spline> {
        insert_knot(
            s,
            InsertionRequest {
                direction,
                knot,
                multiplicity,
            },
        )
    }

    #[test]
    fn boehm_by_hand() {
        let refined = insert(&arch(), 0, 0.5, 1).unwrap();
        assert_eq!(
            points(&refined),
            vec![
                vec![-1.0, 0.0],
                vec![-0.5, 1.0],
                vec![0.5, 1.0],
                vec![1.0, 0.0]
            ]
        );
        assert_eq!(
            refined.parameter_space().knot_vector(0).as_slice(),
            &[0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0]
        );
    }

    #[test]
    fn insertion_limits() {
        let s = arch();
        let full = insert(&s, 0, 0.5, 3).unwrap();
        assert_eq!(full.parameter_space().knot_vector(0).multiplicity(0.5), 3);
        assert!(insert(&full, 0, 0.5, 1).is_err());
        assert!(insert(&s, 0, 0.0, 1).is_err());
        assert!(insert(&s, 0, 1.0, 1).is_err());
        assert!(insert(&s, 1, 0.5, 1).is_err());
        assert!(insert(&s, 0, 0.5, 0).is_err());
        for u in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let a = s.point(&[u]).unwrap();
            let b = full.point(&[u]).unwrap();
            assert!(distance(&a, &b) < 1e-15);
        }
    }

    #[test]
    fn surface_insertion() {
        let line = kv(&[0.0, 0.0, 1.0, 1.0]);
        let s: Spline = BSpline::new(
            vec![line.clone(), line],
            vec![1, 1],
            vec![
                vec![0.0, 0.0, 0.0],
                vec![1.0, 0.0, 1.0],
                vec![0.0, 1.0, 2.0],
                vec![1.0, 1.0, 0.5],
            ],
        )
        .unwrap()
        .into();
        let r = insert(&s, 1, 0.5, 1).unwrap();
        assert_eq!(r.physical_space().grid().sizes(), &[2, 3]);
        for u in [0.0, 0.3, 1.0] {
            for v in [0.0, 0.5, 0.8, 1.0] {
                assert!(distance(&s.point(&[u, v]).unwrap(), &r.point(&[u, v]).unwrap()) < 1e-15);
            }
        }
    }

    fn remove(s: &Spline, knot: f64, times: usize, tolerance: f64) -> Result<(Spline, usize)> {
        remove_knot(
            s,
            RemovalRequest {
                direction: 0,
                knot,
                times,
                tolerance,
            },
        )
    }

    #[test]
    fn removal_inverts_insertion() {
        let s = arch();
        let refined = insert(&s, 0, 0.5, 1).unwrap();
        let (back, count) = remove(&refined, 0.5, 1, 1e-10).unwrap();
        assert_eq!(count, 1);
        assert!(back.max_difference(&s).unwrap() < 1e-12);

        let twice = insert(&s, 0, 0.3, 2).unwrap();
        let (back, count) = remove(&twice, 0.3, 5, 1e-10).unwrap();
        assert_eq!(count, 2);
        assert!(back.max_difference(&s).unwrap() < 1e-12);
    }

    #[test]
    fn removal_respects_tolerance() {
        let s: Spline = BSpline::new(
            vec![kv(&[0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0])],
            vec![2],
            vec![
                vec![0.0, 0.0],
                vec![1.0, 1.0],
                vec![2.0, -1.0],
                vec![3.0, 0.0],
            ],
        )
        .unwrap()
        .into();
        let (same, count) = remove(&s, 0.5, 1, 1e-6).unwrap();
        assert_eq!(count, 0);
        assert_eq!(same, s);
        assert!(remove(&s, 0.25, 1, 1.0).is_err());
        assert!(remove(&s, 0.0, 1, 1.0).is_err());
    }

    #[test]
    fn nurbs_roundtrip_in_homogeneous_space() {
        let q: Spline = Nurbs::new(
            vec![kv(&[0.0, 0.0, 0.0, 1.0, 1.0, 1.0])],
            vec![2],
            vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]],
            vec![1.0, std::f64::consts::FRAC_1_SQRT_2, 1.0],
        )
        .unwrap()
        .into();
        let r = insert(&q, 0, 0.3, 2).unwrap();
        for k in 0..=20 {
            let u = k as f64 / 20.0;
            let p = r.point(&[u]).unwrap();
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-14);
        }
        let (back, count) = remove(&r, 0.3, 2, 1e-10).unwrap();
        assert_eq!(count, 2);
        assert!(back.max_difference(&q).unwrap() < 1e-12);
    }

    #[test]
    fn subdivision() {
        let s = arch();
        let (a, b) = subdivide(&s, 0, 0.5).unwrap();
        assert_eq!(
            a.parameter_space().knot_vector(0).as_slice(),
            &[0.0, 0.0, 0.0, 0.5, 0.5, 0.5]
        );
        assert_eq!(
            b.parameter_space().knot_vector(0).as_slice(),
            &[0.5, 0.5, 0.5, 1.0, 1.0, 1.0]
        );
        assert_eq!(a.point(&[0.5]).unwrap(), b.point(&[0.5]).unwrap());
        for k in 0..=10 {
            let u = 0.05 * k as f64;
            assert!(distance(&a.point(&[u]).unwrap(), &s.point(&[u]).unwrap()) < 1e-14);
            let v = 0.5 + u;
            assert!(distance(&b.point(&[v]).unwrap(), &s.point(&[v]).unwrap()) < 1e-14);
        }
        assert!(subdivide(&s, 0, 0.0).is_err());
        assert!(subdivide(&s, 0, 1.0).is_err());
    }

    #[test]
    fn surface_subdivision_keeps_other_direction() {
        let quad = kv(&[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let line = kv(&[0.0, 0.0, 1.0, 1.0]);
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let s: Spline = BSpline::new(vec![quad, line.clone()], vec![2, 1], pts)
            .unwrap()
            .into();
        let (a, b) = subdivide(&s, 0, 0.25).unwrap();
        for half in [&a, &b] {
            assert_eq!(half.parameter_space().knot_vector(1), &line);
            assert_eq!(half.parameter_space().degree(1), 1);
        }
        assert!(
            distance(
                &a.point(&[0.1, 0.7]).unwrap(),
                &s.point(&[0.1, 0.7]).unwrap()
            ) < 1e-14
        );
        assert!(
            distance(
                &b.point(&[0.6, 0.2]).unwrap(),
                &s.point(&[0.6, 0.2]).unwrap()
            ) < 1e-14
        );
    }
}
