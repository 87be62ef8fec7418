//! IRIT text data (`.itd`): `CURVE`, `SURFACE` and `TRIVAR` B-spline objects.
//!
//! ```text
//! [OBJECT name
//!     [SURFACE BSPLINE <len_u> <len_v> <order_u> <order_v> <E3|P3>
//!         [KV u_0 .. u_m]
//!         [KV v_0 .. v_m]
//!         [x y z]            E-points; P-points are [w wx wy wz]
//!         ...
//!     ]
//! ]
//! ```
//!
//! Orders are degree + 1. Rational points store the weight first followed
//! by the weight-multiplied coordinates.

use super::{fmt_real, SplineEntry, SplineFile};
use crate::{BSpline, Error, KnotVector, Nurbs, Result, Spline};

const FORMAT: &str = "ITD";

pub fn to_string(file: &SplineFile) -> Result<String> {
    let mut out = String::new();
    for (i, spline) in file.splines().enumerate() {
        write_spline(&mut out, spline, &format!("SPLINE{i}"))?;
    }
    Ok(out)
}

fn write_spline(out: &mut String, s: &Spline, name: &str) -> Result<()> {
    let kind = match s.dim() {
        1 => "CURVE",
        2 => "SURFACE",
        3 => "TRIVAR",
        d => {
            return Err(Error::Unsupported(format!(
                "ITD stores at most trivariates; spline has parametric dimension {d}"
            )))
        }
    };
    let n = s.space_dim();
    if n > 9 {
        return Err(Error::Unsupported(format!(
            "ITD point types stop at 9 coordinates, got {n}"
        )));
    }
    let ps = s.parameter_space();
    let lengths: Vec<String> = (0..s.dim()).map(|d| ps.num_basis(d).to_string()).collect();
    let orders: Vec<String> = ps.degrees().iter().map(|p| (p + 1).to_string()).collect();
    let point_type = if s.is_rational() { 'P' } else { 'E' };
    out.push_str(&format!("[OBJECT {name}\n"));
    out.push_str(&format!(
        "    [{kind} BSPLINE {} {} {point_type}{n}\n",
        lengths.join(" "),
        orders.join(" ")
    ));
    for kv in ps.knot_vectors() {
        let knots: Vec<String> = kv.as_slice().iter().map(|&k| fmt_real(k)).collect();
        out.push_str(&format!("        [KV {}]\n", knots.join(" ")));
    }
    for (i, p) in s.physical_space().points().enumerate() {
        let values: Vec<String> = match s.weights() {
            None => p.iter().map(|&c| fmt_real(c)).collect(),
            Some(w) => std::iter::once(w[i])
                .chain(p.iter().map(|&c| c * w[i]))
                .map(fmt_real)
                .collect(),
        };
        out.push_str(&format!("        [{}]\n", values.join(" ")));
    }
    out.push_str("    ]\n]\n");
    Ok(())
}

#[derive(Debug)]
struct Node {
    line: usize,
    tokens: Vec<String>,
    children: Vec<Node>,
}

fn parse_tree(text: &str) -> Result<Vec<Node>> {
    let mut stack: Vec<Node> = vec![Node {
        line: 1,
        tokens: Vec::new(),
        children: Vec::new(),
    }];
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw.find('#') {
            Some(i) if !raw[..i].contains('"') => &raw[..i],
            _ => raw,
        };
        let mut chars = content.chars().peekable();
        let mut word = String::new();
        let flush = |word: &mut String, stack: &mut Vec<Node>| {
            if !word.is_empty() {
                stack
                    .last_mut()
                    .expect("root")
                    .tokens
                    .push(std::mem::take(word));
            }
        };
        while let Some(c) = chars.next() {
            match c {
                '[' => {
                    flush(&mut word, &mut stack);
                    stack.push(Node {
                        line,
                        tokens: Vec::new(),
                        children: Vec::new(),
                    });
                }
                ']' => {
                    flush(&mut word, &mut stack);
                    if stack.len() == 1 {
                        return Err(Error::parse(FORMAT, line, "unmatched ']'"));
                    }
                    let node = stack.pop().expect("checked");
                    stack.last_mut().expect("root").children.push(node);
                }
                '"' => {
                    flush(&mut word, &mut stack);
                    let mut s = String::from('"');
                    for c in chars.by_ref() {
                        s.push(c);
                        if c == '"' {
                            break;
                        }
                    }
                    stack.last_mut().expect("root").tokens.push(s);
                }
                c if c.is_whitespace() => flush(&mut word, &mut stack),
                c => word.push(c),
            }
        }
        flush(&mut word, &mut stack);
    }
    if stack.len() > 1 {
        let open = stack.last().expect("non-empty").line;
        return Err(Error::parse(FORMAT, open, "'[' is never closed"));
    }
    Ok(stack.pop().expect("root").children)
}

/// Parses ITD text. Objects other than B-spline curves, surfaces and
/// trivariates are skipped and reported in the returned warnings.
pub fn from_str(text: &str) -> Result<(SplineFile, Vec<String>)> {
    let mut file = SplineFile::default();
    let mut warnings = Vec::new();
    for node in parse_tree(text)? {
        collect(&node, &mut file, &mut warnings)?;
    }
    Ok((file, warnings))
}

fn keyword(node: &Node) -> String {
    node.tokens
        .first()
        .map(|t| t.to_ascii_uppercase())
        .unwrap_or_default()
}

fn collect(node: &Node, file: &mut SplineFile, warnings: &mut Vec<String>) -> Result<()> {
    match keyword(node).as_str() {
        "OBJECT" => {
            for child in &node.children {
                collect(child, file, warnings)?;
            }
        }
        kind @ ("CURVE" | "SURFACE" | "TRIVAR") => {
            let second = node.tokens.get(1).map(|t| t.to_ascii_uppercase());
            if second.as_deref() == Some("BSPLINE") {
                file.entries
                    .push(SplineEntry::new(read_bspline(node, kind)?));
            } else {
                warnings.push(format!(
                    "line {}: skipped {kind} {} object",
                    node.line,
                    second.unwrap_or_default()
                ));
            }
        }
        // Attributes carry no geometry.
        "ATTR" | "RGB" | "COLOR" | "WIDTH" => {}
        other => warnings.push(format!(
            "line {}: skipped unsupported object '{other}'",
            node.line
        )),
    }
    Ok(())
}

fn read_bspline(node: &Node, kind: &str) -> Result<Spline> {
    let err = |msg: String| Error::parse(FORMAT, node.line, msg);
    let dim = match kind {
        "CURVE" => 1,
        "SURFACE" => 2,
        _ => 3,
    };
    if node.tokens.len() != 2 + 2 * dim + 1 {
        return Err(err(format!(
            "{kind} BSPLINE header needs {dim} lengths, {dim} orders and a point type"
        )));
    }
    let ints = node.tokens[2..2 + 2 * dim]
        .iter()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| err(format!("'{t}' is not a count")))
        })
        .collect::<Result<Vec<_>>>()?;
    let (lengths, orders) = ints.split_at(dim);
    if orders.contains(&0) {
        return Err(err("order must be at least 1".into()));
    }
    let point_type = node.tokens[2 + 2 * dim].to_ascii_uppercase();
    let (rational, n) = match (point_type.chars().next(), point_type[1..].parse::<usize>()) {
        (Some('E'), Ok(n)) if n > 0 => (false, n),
        (Some('P'), Ok(n)) if n > 0 => (true, n),
        _ => return Err(err(format!("unknown point type '{point_type}'"))),
    };

    let mut knot_vectors = Vec::new();
    let mut values = Vec::new();
    for child in &node.children {
        let head = keyword(child);
        match head.as_str() {
            "KV" => {
                let knots = numbers(child, &child.tokens[1..])?;
                knot_vectors.push(
                    KnotVector::new(knots)
                        .map_err(|e| Error::parse(FORMAT, child.line, e.to_string()))?,
                );
            }
            "KVP" => {
                return Err(Error::parse(
                    FORMAT,
                    child.line,
                    "periodic knot vectors are not supported",
                ))
            }
            _ if child
                .tokens
                .first()
                .is_some_and(|t| t.parse::<f64>().is_ok()) =>
            {
                let p = numbers(child, &child.tokens)?;
                let expected = n + usize::from(rational);
                if p.len() != expected {
                    return Err(Error::parse(
                        FORMAT,
                        child.line,
                        format!("point has {} values, expected {expected}", p.len()),
                    ));
                }
                values.push(p);
            }
            _ => {}
        }
    }
    if knot_vectors.len() != dim {
        return Err(err(format!(
            "{} knot vectors for a {kind}",
            knot_vectors.len()
        )));
    }
    let count: usize = lengths.iter().product();
    if values.len() != count {
        return Err(err(format!(
            "{} control points, header declares {count}",
            values.len()
        )));
    }
    for (d, (kv, (&len, &order))) in knot_vectors
        .iter()
        .zip(lengths.iter().zip(orders))
        .enumerate()
    {
        if kv.len() != len + order {
            return Err(err(format!(
                "knot vector {d} has {} knots, expected length + order = {}",
                kv.len(),
                len + order
            )));
        }
    }
    let degrees: Vec<usize> = orders.iter().map(|o| o - 1).collect();
    let build = |r: Result<Spline>| r.map_err(|e| err(e.to_string()));
    if rational {
        let weights: Vec<f64> = values.iter().map(|v| v[0]).collect();
        let points = values
            .iter()
            .map(|v| v[1..].iter().map(|c| c / v[0]).collect())
            .collect();
        build(Nurbs::new(knot_vectors, degrees, points, weights).map(Spline::from))
    } else {
        build(BSpline::new(knot_vectors, degrees, values).map(Spline::from))
    }
}

fn numbers(node: &Node, tokens: &[String]) -> Result<Vec<f64>> {
    tokens
        .iter()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::parse(FORMAT, node.line, format!("'{t}' is not a number")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const CURVE: &str = "\
# a planar quadratic
[OBJECT ARCH
    [CURVE BSPLINE 3 3 E2
        [KV 0 0 0 1 1 1]
        [-1 0]
        [0 2]
        [1 0]
    ]
]
";

    #[test]
    fn order_maps_to_degree() {
        let (file, warnings) = from_str(CURVE).unwrap();
        assert!(warnings.is_empty());
        let s = &file.entries[0].spline;
        assert_eq!(s.parameter_space().degrees(), &[2]);
        assert_eq!(s.space_dim(), 2);
        assert!(!s.is_rational());
        assert_eq!(s.point(&[0.5]).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn rational_points_are_weight_first() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let text = format!(
            "[OBJECT Q [CURVE BSPLINE 3 3 P2 [KV 0 0 0 1 1 1] [1 1 0] [{h} {h} {h}] [1 0 1]]]"
        );
        let (file, _) = from_str(&text).unwrap();
        let s = &file.entries[0].spline;
        assert_eq!(s.weights().unwrap(), &[1.0, h, 1.0]);
        for k in 0..=10 {
            let p = s.point(&[k as f64 / 10.0]).unwrap();
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn trivariate_and_skipped_objects() {
        let mut text = String::from("[OBJECT CUBE [TRIVAR BSPLINE 2 2 2 2 2 2 E3\n");
        for _ in 0..3 {
            text.push_str("[KV 0 0 1 1]\n");
        }
        for k in 0..2 {
            for j in 0..2 {
                for i in 0..2 {
                    text.push_str(&format!("[{i} {j} {k}]\n"));
                }
            }
        }
        text.push_str("]]\n[OBJECT P [POLYGON 3 [0 0 0] [1 0 0] [0 1 0]]]\n");
        let (file, warnings) = from_str(&text).unwrap();
        assert_eq!(file.len(), 1);
        assert_eq!(file.entries[0].spline.dim(), 3);
        assert_eq!(warnings.len(), 1);
        assert_eq!(
            file.entries[0].spline.point(&[1.0, 0.0, 1.0]).unwrap(),
            vec![1.0, 0.0, 1.0]
        );
    }

    #[test]
    fn malformed_input() {
        assert!(
            from_str("[OBJECT A [CURVE BSPLINE 3 3 E2 [KV 0 0 0 1 1 1] [0 0] [1 1] [2 0]]")
                .is_err()
        );
        assert!(from_str("]").is_err());
        assert!(from_str(&CURVE.replace("[1 0]", "[1 0 4]")).is_err());
        assert!(from_str(&CURVE.replace("3 3 E2", "4 3 E2")).is_err());
        assert!(from_str(&CURVE.replace("E2", "Q2")).is_err());
    }

    #[test]
    fn roundtrip() {
        let (file, _) = from_str(CURVE).unwrap();
        let (again, _) = from_str(&to_string(&file).unwrap()).unwrap();
        assert_eq!(again, file);
    }
}
