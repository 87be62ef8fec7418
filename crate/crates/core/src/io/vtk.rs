//! Legacy ASCII VTK (version 3.0) unstructured-grid export.
//!
//! Each spline is sampled on a uniform parametric grid. Curves become line
//! cells, surfaces quads and volumes hexahedra. Control-point fields are
//! interpolated with the spline's own basis; element fields are written as
//! cell data taken from the element containing each cell's centre.

use super::{DataLocation, SplineFile};
use crate::{Error, Result, Spline, TensorGrid};

const HEADER: &str = "# vtk DataFile Version 3.0";
const VTK_LINE: u8 = 3;
const VTK_QUAD: u8 = 9;
const VTK_HEXAHEDRON: u8 = 12;

/// Number of samples per parametric direction (each at least 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleResolution(Vec<usize>);

impl SampleResolution {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Format(
                "resolution needs at least one direction".into(),
            ));
        }
        if let Some(&c) = counts.iter().find(|&&c| c < 2) {
            return Err(Error::Format(format!(
                "resolution {c} is below the minimum of 2"
            )));
        }
        Ok(Self(counts))
    }

    /// Checks that the resolution matches the parametric dimension of `spline`.
    pub fn for_spline(counts: Vec<usize>, spline: &Spline) -> Result<Self> {
        if counts.len() != spline.dim() {
            return Err(Error::Format(format!(
                "resolution has {} values but the spline has parametric dimension {}",
                counts.len(),
                spline.dim()
            )));
        }
        Self::new(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }
}

fn cell_type(dim: usize) -> u8 {
    match dim {
        1 => VTK_LINE,
        2 => VTK_QUAD,
        _ => VTK_HEXAHEDRON,
    }
}

fn vertices_of(cell: u8) -> Option<usize> {
    match cell {
        VTK_LINE => Some(2),
        VTK_QUAD => Some(4),
        VTK_HEXAHEDRON => Some(8),
        _ => None,
    }
}

struct Sampled {
    points: Vec<[f64; 3]>,
    cells: Vec<Vec<usize>>,
    dim: usize,
    /// Parametric centre of every cell.
    centres: Vec<Vec<f64>>,
    /// Parametric coordinates of every point.
    params: Vec<Vec<f64>>,
}

fn sample(spline: &Spline, res: &SampleResolution, offset: usize) -> Result<Sampled> {
    let dim = spline.dim();
    if !(1..=3).contains(&dim) {
        return Err(Error::Unsupported(format!(
            "VTK export handles parametric dimension 1 to 3, got {dim}"
        )));
    }
    if spline.space_dim() > 3 {
        return Err(Error::Unsupported(format!(
            "VTK points have 3 coordinates, spline has space dimension {}",
            spline.space_dim()
        )));
    }
    if res.counts().len() != dim {
        return Err(Error::Format(format!(
            "resolution has {} values but the spline has parametric dimension {dim}",
            res.counts().len()
        )));
    }
    let ps = spline.parameter_space();
    let coord = |d: usize, k: usize| {
        let (lo, hi) = ps.bounds(d);
        if k + 1 == res.counts()[d] {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (res.counts()[d] - 1) as f64
        }
    };
    let grid = TensorGrid::new(res.counts().to_vec())?;
    let mut points = Vec::with_capacity(grid.len());
    let mut params = Vec::with_capacity(grid.len());
    for idx in grid.indices() {
        let pc: Vec<f64> = idx.iter().enumerate().map(|(d, &k)| coord(d, k)).collect();
        let x = spline.point(&pc)?;
        let mut p = [0.0; 3];
        p[..x.len()].copy_from_slice(&x);
        points.push(p);
        params.push(pc);
    }

    let cell_grid = TensorGrid::new(res.counts().iter().map(|c| c - 1).collect())?;
    let corners: &[&[usize]] = match dim {
        1 => &[&[0], &[1]],
        2 => &[&[0, 0], &[1, 0], &[1, 1], &[0, 1]],
        _ => &[
            &[0, 0, 0],
            &[1, 0, 0],
            &[1, 1, 0],
            &[0, 1, 0],
            &[0, 0, 1],
            &[1, 0, 1],
            &[1, 1, 1],
            &[0, 1, 1],
        ],
    };
    let mut cells = Vec::with_capacity(cell_grid.len());
    let mut centres = Vec::with_capacity(cell_grid.len());
    for idx in cell_grid.indices() {
        let conn = corners
            .iter()
            .map(|c| {
                let v: Vec<usize> = idx.iter().zip(*c).map(|(i, o)| i + o).collect();
                offset + grid.linearize(&v).expect("corner inside grid")
            })
            .collect();
        cells.push(conn);
        centres.push(
            idx.iter()
                .enumerate()
                .map(|(d, &k)| 0.5 * (coord(d, k) + coord(d, k + 1)))
                .collect(),
        );
    }
    Ok(Sampled {
        points,
        cells,
        dim,
        centres,
        params,
    })
}

fn element_index(spline: &Spline, pc: &[f64]) -> Result<usize> {
    let ps = spline.parameter_space();
    let mut linear = 0;
    let mut stride = 1;
    for (d, &u) in pc.iter().enumerate() {
        let kv = ps.knot_vector(d);
        let spans = kv.nonzero_spans();
        let span = kv.find_span(u)?;
        let ordinal = spans
            .iter()
            .position(|&s| s == span)
            .expect("span is non-zero");
        linear += ordinal * stride;
        stride *= spans.len();
    }
    Ok(linear)
}

/// Field names of one location in order of first appearance.
fn field_names(file: &SplineFile, location: DataLocation) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for e in &file.entries {
        for f in e.data.iter().filter(|f| f.location == location) {
            if !names.contains(&f.name) {
                names.push(f.name.clone());
            }
        }
    }
    names
}

/// Renders the file as legacy VTK. Splines lacking a field that another
/// spline carries contribute zeros for it.
pub fn to_string(file: &SplineFile, resolutions: &[SampleResolution]) -> Result<String> {
    if resolutions.len() != file.len() {
        return Err(Error::Format(format!(
            "{} resolutions given for {} splines",
            resolutions.len(),
            file.len()
        )));
    }
    let mut sampled = Vec::with_capacity(file.len());
    let mut offset = 0;
    for (entry, res) in file.entries.iter().zip(resolutions) {
        let s = sample(&entry.spline, res, offset)?;
        offset += s.points.len();
        sampled.push(s);
    }

    let point_fields = field_names(file, DataLocation::ControlPoint);
    let cell_fields = field_names(file, DataLocation::Element);
    let n_points: usize = sampled.iter().map(|s| s.points.len()).sum();
    let n_cells: usize = sampled.iter().map(|s| s.cells.len()).sum();
    let size: usize = sampled
        .iter()
        .flat_map(|s| s.cells.iter())
        .map(|c| c.len() + 1)
        .sum();

    let mut out = String::new();
    out.push_str(HEADER);
    out.push_str("\nsplinekit export\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    out.push_str(&format!("POINTS {n_points} double\n"));
    for p in sampled.iter().flat_map(|s| &s.points) {
        out.push_str(&format!("{} {} {}\n", p[0], p[1], p[2]));
    }
    out.push_str(&format!("CELLS {n_cells} {size}\n"));
    for c in sampled.iter().flat_map(|s| &s.cells) {
        let ids: Vec<String> = c.iter().map(usize::to_string).collect();
        out.push_str(&format!("{} {}\n", c.len(), ids.join(" ")));
    }
    out.push_str(&format!("CELL_TYPES {n_cells}\n"));
    for s in &sampled {
        for _ in &s.cells {
            out.push_str(&format!("{}\n", cell_type(s.dim)));
        }
    }

    if !point_fields.is_empty() {
        out.push_str(&format!("POINT_DATA {n_points}\n"));
        for name in &point_fields {
            out.push_str(&format!("SCALARS {name} double 1\nLOOKUP_TABLE default\n"));
            for (entry, s) in file.entries.iter().zip(&sampled) {
                let field = entry
                    .data
                    .iter()
                    .find(|f| f.location == DataLocation::ControlPoint && &f.name == name);
                for pc in &s.params {
                    let value = match field {
                        None => 0.0,
                        Some(f) => {
                            let basis = entry.spline.point_basis(pc)?;
                            basis
                                .indices
                                .iter()
                                .zip(&basis.values)
                                .map(|(&i, &r)| r * f.values[i])
                                .sum()
                        }
                    };
                    out.push_str(&format!("{value}\n"));
                }
            }
        }
    }
    if !cell_fields.is_empty() {
        out.push_str(&format!("CELL_DATA {n_cells}\n"));
        for name in &cell_fields {
            out.push_str(&format!("SCALARS {name} double 1\nLOOKUP_TABLE default\n"));
            for (entry, s) in file.entries.iter().zip(&sampled) {
                let field = entry
                    .data
                    .iter()
                    .find(|f| f.location == DataLocation::Element && &f.name == name);
                for centre in &s.centres {
                    let value = match field {
                        None => 0.0,
                        Some(f) => f.values[element_index(&entry.spline, centre)?],
                    };
                    out.push_str(&format!("{value}\n"));
                }
            }
        }
    }
    Ok(out)
}

/// Counts found by [`check_vtk_structure`].
#[derive(Debug, Clone, PartialEq)]
pub struct VtkSummary {
    pub points: usize,
    pub cells: usize,
    pub cell_types: Vec<u8>,
    pub point_fields: Vec<String>,
    pub cell_fields: Vec<String>,
    /// All point coordinates, three per point.
    pub coordinates: Vec<f64>,
    /// Values of every point field, in `point_fields` order.
    pub point_values: Vec<Vec<f64>>,
}

/// Structural check of a legacy unstructured-grid file as written by this
/// module: declared counts match the emitted ones, connectivity indices are
/// in range and cell types agree with their vertex counts.
pub fn check_vtk_structure(text: &str) -> Result<VtkSummary> {
    let bad = |msg: String| Error::Format(format!("VTK structure: {msg}"));
    let mut lines = text.lines();
    if lines.next() != Some(HEADER) {
        return Err(bad("missing version header".into()));
    }
    lines.next().ok_or_else(|| bad("missing title".into()))?;
    if lines.next().map(str::trim) != Some("ASCII") {
        return Err(bad("not ASCII".into()));
    }
    if lines.next().map(str::trim) != Some("DATASET UNSTRUCTURED_GRID") {
        return Err(bad("not an unstructured grid".into()));
    }
    let rest: Vec<&str> = lines.flat_map(str::split_whitespace).collect();
    let mut it = rest.into_iter();
    let expect = |word: &str, it: &mut std::vec::IntoIter<&str>| -> Result<()> {
        match it.next() {
            Some(w) if w == word => Ok(()),
            other => Err(bad(format!("expected {word}, found {other:?}"))),
        }
    };
    let number = |it: &mut std::vec::IntoIter<&str>| -> Result<f64> {
        let w = it.next().ok_or_else(|| bad("file ends early".into()))?;
        w.parse::<f64>()
            .map_err(|_| bad(format!("'{w}' is not a number")))
    };
    let count = |it: &mut std::vec::IntoIter<&str>| -> Result<usize> {
        let w = it.next().ok_or_else(|| bad("file ends early".into()))?;
        w.parse::<usize>()
            .map_err(|_| bad(format!("'{w}' is not a count")))
    };

    expect("POINTS", &mut it)?;
    let points = count(&mut it)?;
    it.next();
    let coordinates = (0..3 * points)
        .map(|_| number(&mut it))
        .collect::<Result<Vec<_>>>()?;

    expect("CELLS", &mut it)?;
    let cells = count(&mut it)?;
    let size = count(&mut it)?;
    let mut seen = 0;
    let mut vertex_counts = Vec::with_capacity(cells);
    for _ in 0..cells {
        let k = count(&mut it)?;
        seen += k + 1;
        vertex_counts.push(k);
        for _ in 0..k {
            let id = count(&mut it)?;
            if id >= points {
                return Err(bad(format!("connectivity index {id} >= {points} points")));
            }
        }
    }
    if seen != size {
        return Err(bad(format!("CELLS declares size {size}, found {seen}")));
    }
    expect("CELL_TYPES", &mut it)?;
    if count(&mut it)? != cells {
        return Err(bad("CELL_TYPES count differs from CELLS".into()));
    }
    let mut cell_types = Vec::with_capacity(cells);
    for k in vertex_counts {
        let t = count(&mut it)? as u8;
        if vertices_of(t) != Some(k) {
            return Err(bad(format!("cell type {t} with {k} vertices")));
        }
        cell_types.push(t);
    }

    let mut point_fields = Vec::new();
    let mut point_values = Vec::new();
    let mut cell_fields = Vec::new();
    let mut current = 0;
    let mut current_is_point = true;
    while let Some(word) = it.next() {
        match word {
            "POINT_DATA" | "CELL_DATA" => {
                current_is_point = word == "POINT_DATA";
                current = count(&mut it)?;
                let wanted = if current_is_point { points } else { cells };
                if current != wanted {
                    return Err(bad(format!("{word} {current} but {wanted} expected")));
                }
            }
            "SCALARS" => {
                let name = it
                    .next()
                    .ok_or_else(|| bad("SCALARS without name".into()))?
                    .to_string();
                it.next();
                it.next();
                expect("LOOKUP_TABLE", &mut it)?;
                it.next();
                let values = (0..current)
                    .map(|_| number(&mut it))
                    .collect::<Result<Vec<_>>>()?;
                if current_is_point {
                    point_fields.push(name);
                    point_values.push(values);
                } else {
                    cell_fields.push(name);
                }
            }
            other => return Err(bad(format!("unexpected '{other}'"))),
        }
    }
    Ok(VtkSummary {
        points,
        cells,
        cell_types,
        point_fields,
        cell_fields,
        coordinates,
        point_values,
    })
}
