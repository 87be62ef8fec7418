//! XML spline lists.
//!
//! Grammar (all numbers are whitespace-separated decimal text):
//!
//! ```text
//! <SplineList count="N">                        N = number of SplineEntry children
//!   <SplineEntry parametricDimension="D"        1 <= D <= 4
//!                spaceDimension="S"
//!                numberOfControlPoints="C">
//!     <degrees> p_0 .. p_{D-1} </degrees>
//!     <knotVectors>
//!       <knotVector> u_0 .. u_m </knotVector>   exactly D of them
//!     </knotVectors>
//!     <controlPoints> C*S reals </controlPoints> first direction fastest
//!     <weights> C reals </weights>              optional; present => NURBS
//!     <data name="id" location="controlPoint|element"> values </data>   0..n
//!   </SplineEntry>
//! </SplineList>
//! ```

use roxmltree::{Document, Node};

use super::{fmt_real, DataField, DataLocation, SplineEntry, SplineFile};
use crate::spline::MAX_PARAMETRIC_DIM;
use crate::{BSpline, Error, KnotVector, Nurbs, Result, Spline};

const FORMAT: &str = "XML";

pub fn to_string(file: &SplineFile) -> Result<String> {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!("<SplineList count=\"{}\">\n", file.len()));
    for entry in &file.entries {
        write_entry(&mut out, entry);
    }
    out.push_str("</SplineList>\n");
    Ok(out)
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values
        .into_iter()
        .map(fmt_real)
        .collect::<Vec<_>>()
        .join(" ")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn write_entry(out: &mut String, entry: &SplineEntry) {
    let s = &entry.spline;
    let ps = s.parameter_space();
    out.push_str(&format!(
        "  <SplineEntry parametricDimension=\"{}\" spaceDimension=\"{}\" numberOfControlPoints=\"{}\">\n",
        s.dim(),
        s.space_dim(),
        s.num_control_points()
    ));
    let degrees: Vec<String> = ps.degrees().iter().map(usize::to_string).collect();
    out.push_str(&format!("    <degrees>{}</degrees>\n", degrees.join(" ")));
    out.push_str("    <knotVectors>\n");
    for kv in ps.knot_vectors() {
        out.push_str(&format!(
            "      <knotVector>{}</knotVector>\n",
            join(kv.as_slice().iter().copied())
        ));
    }
    out.push_str("    </knotVectors>\n    <controlPoints>\n");
    for p in s.physical_space().points() {
        out.push_str(&format!("      {}\n", join(p.iter().copied())));
    }
    out.push_str("    </controlPoints>\n");
    if let Some(w) = s.weights() {
        out.push_str(&format!(
            "    <weights>{}</weights>\n",
            join(w.iter().copied())
        ));
    }
    for field in &entry.data {
        let location = match field.location {
            DataLocation::ControlPoint => "controlPoint",
            DataLocation::Element => "element",
        };
        out.push_str(&format!(
            "    <data name=\"{}\" location=\"{location}\">{}</data>\n",
            escape(&field.name),
            join(field.values.iter().copied())
        ));
    }
    out.push_str("  </SplineEntry>\n");
}

struct Ctx<'a> {
    doc: &'a Document<'a>,
}

impl Ctx<'_> {
    fn line(&self, node: Node) -> usize {
        self.doc.text_pos_at(node.range().start).row as usize
    }

    fn err(&self, node: Node, message: impl Into<String>) -> Error {
        Error::parse(FORMAT, self.line(node), message)
    }

    fn attr_usize(&self, node: Node, name: &str) -> Result<usize> {
        let raw = node
            .attribute(name)
            .ok_or_else(|| self.err(node, format!("missing attribute '{name}'")))?;
        raw.trim()
            .parse()
            .map_err(|_| self.err(node, format!("attribute '{name}' is not a count: '{raw}'")))
    }

    fn numbers(&self, node: Node) -> Result<Vec<f64>> {
        let text: String = node
            .children()
            .filter(|c| c.is_text())
            .filter_map(|c| c.text())
            .collect();
        text.split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| self.err(node, format!("'{t}' is not a number")))
            })
            .collect()
    }

    fn child<'b>(&self, node: Node<'b, 'b>, tag: &str) -> Result<Node<'b, 'b>> {
        self.optional_child(node, tag)
            .ok_or_else(|| self.err(node, format!("missing <{tag}>")))
    }

    fn optional_child<'b>(&self, node: Node<'b, 'b>, tag: &str) -> Option<Node<'b, 'b>> {
        node.children().find(|c| c.has_tag_name(tag))
    }
}

pub fn from_str(text: &str) -> Result<SplineFile> {
    let doc = Document::parse(text)
        .map_err(|e| Error::parse(FORMAT, e.pos().row as usize, e.to_string()))?;
    let ctx = Ctx { doc: &doc };
    let root = doc.root_element();
    if !root.has_tag_name("SplineList") {
        return Err(ctx.err(
            root,
            format!(
                "root element is <{}>, expected <SplineList>",
                root.tag_name().name()
            ),
        ));
    }
    let count = ctx.attr_usize(root, "count")?;
    let entries = root
        .children()
        .filter(|c| c.is_element())
        .map(|c| {
            if c.has_tag_name("SplineEntry") {
                read_entry(&ctx, c)
            } else {
                Err(ctx.err(c, format!("unexpected <{}>", c.tag_name().name())))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    if entries.len() != count {
        return Err(ctx.err(
            root,
            format!("count is {count} but {} entries found", entries.len()),
        ));
    }
    Ok(SplineFile { entries })
}

fn read_entry(ctx: &Ctx, node: Node) -> Result<SplineEntry> {
    let dim = ctx.attr_usize(node, "parametricDimension")?;
    let space_dim = ctx.attr_usize(node, "spaceDimension")?;
    let count = ctx.attr_usize(node, "numberOfControlPoints")?;
    if dim == 0 || dim > MAX_PARAMETRIC_DIM {
        return Err(ctx.err(
            node,
            format!("parametric dimension {dim} outside 1..={MAX_PARAMETRIC_DIM}"),
        ));
    }
    if space_dim == 0 {
        return Err(ctx.err(node, "space dimension must be positive"));
    }

    let degrees_node = ctx.child(node, "degrees")?;
    let degrees = ctx
        .numbers(degrees_node)?
        .into_iter()
        .map(|d| {
            if d >= 0.0 && d.fract() == 0.0 {
                Ok(d as usize)
            } else {
                Err(ctx.err(
                    degrees_node,
                    format!("degree {d} is not a non-negative integer"),
                ))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    if degrees.len() != dim {
        return Err(ctx.err(
            degrees_node,
            format!("{} degrees for dimension {dim}", degrees.len()),
        ));
    }

    let kvs_node = ctx.child(node, "knotVectors")?;
    let knot_vectors = kvs_node
        .children()
        .filter(|c| c.has_tag_name("knotVector"))
        .map(|c| KnotVector::new(ctx.numbers(c)?).map_err(|e| ctx.err(c, e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    if knot_vectors.len() != dim {
        return Err(ctx.err(
            kvs_node,
            format!("{} knot vectors for dimension {dim}", knot_vectors.len()),
        ));
    }

    let cp_node = ctx.child(node, "controlPoints")?;
    let flat = ctx.numbers(cp_node)?;
    if flat.len() != count * space_dim {
        return Err(ctx.err(
            cp_node,
            format!(
                "{} coordinates, expected {count} points of dimension {space_dim}",
                flat.len()
            ),
        ));
    }
    let points: Vec<Vec<f64>> = flat.chunks_exact(space_dim).map(<[f64]>::to_vec).collect();

    let spline: Spline = match ctx.optional_child(node, "weights") {
        Some(w_node) => {
            let weights = ctx.numbers(w_node)?;
            Nurbs::new(knot_vectors, degrees, points, weights)
                .map_err(|e| ctx.err(w_node, e.to_string()))?
                .into()
        }
        None => BSpline::new(knot_vectors, degrees, points)
            .map_err(|e| ctx.err(cp_node, e.to_string()))?
            .into(),
    };

    let mut entry = SplineEntry::new(spline);
    for data in node.children().filter(|c| c.has_tag_name("data")) {
        let name = data
            .attribute("name")
            .ok_or_else(|| ctx.err(data, "data block without name"))?;
        let location = match data.attribute("location") {
            Some("controlPoint") => DataLocation::ControlPoint,
            Some("element") => DataLocation::Element,
            other => {
                return Err(ctx.err(
                    data,
                    format!("data location {other:?} is not controlPoint or element"),
                ))
            }
        };
        let field = DataField {
            name: name.to_string(),
            location,
            values: ctx.numbers(data)?,
        };
        entry = entry
            .with_field(field)
            .map_err(|e| ctx.err(data, e.to_string()))?;
    }
    Ok(entry)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve() -> Spline {
        BSpline::new(
            vec![KnotVector::new(vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap()],
            vec![2],
            vec![vec![-1.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0]],
        )
        .unwrap()
        .into()
    }

    #[test]
    fn roundtrip_with_data() {
        let entry = SplineEntry::new(curve())
            .with_field(DataField {
                name: "temperature".into(),
                location: DataLocation::ControlPoint,
                values: vec![0.1, 1.0 / 3.0, -2.5e-300],
            })
            .unwrap()
            .with_field(DataField {
                name: "pressure".into(),
                location: DataLocation::Element,
                values: vec![7.0],
            })
            .unwrap();
        let file = SplineFile {
            entries: vec![entry],
        };
        let text = to_string(&file).unwrap();
        assert_eq!(from_str(&text).unwrap(), file);
    }

    #[test]
    fn weights_select_nurbs() {
        let text = to_string(&SplineFile::new([curve()])).unwrap();
        assert!(!from_str(&text).unwrap().entries[0].spline.is_rational());
        let with_weights = text.replace(
            "</controlPoints>",
            "</controlPoints>\n<weights>1 2 1</weights>",
        );
        assert!(from_str(&with_weights).unwrap().entries[0]
            .spline
            .is_rational());
    }

    #[test]
    fn rejects_bad_documents() {
        let good = to_string(&SplineFile::new([curve()])).unwrap();
        for bad in [
            good.replace("count=\"1\"", "count=\"2\""),
            good.replace("<degrees>2</degrees>", "<degrees>2 1</degrees>"),
            good.replace("parametricDimension=\"1\"", "parametricDimension=\"5\""),
            good.replace("-1 0", "-1 x"),
            good.replace("numberOfControlPoints=\"3\"", "numberOfControlPoints=\"4\""),
            good.replace("</SplineList>", ""),
            good.replace("SplineList", "Splines"),
        ] {
            assert!(from_str(&bad).is_err(), "accepted:\n{bad}");
        }
    }
}
