//! IGES reader/writer for rational B-spline curves (entity 126) and
//! surfaces (entity 128). Every other entity is skipped.
//!
//! Records are 80 columns: data in 1-72, section letter in 73, sequence
//! number in 74-80. Parameter records keep their data in 1-64 and the
//! back-pointer to the directory entry in 66-72. IGES points always carry
//! three coordinates, so splines read from IGES have space dimension 3.

use std::collections::BTreeMap;

use super::{SplineEntry, SplineFile};
use crate::{BSpline, Error, KnotVector, Nurbs, Result, Spline};

const FORMAT: &str = "IGES";
const TIMESTAMP: &str = "15H20200101.000000";

/// Reals are written in E-notation with 17 significant digits.
fn real(x: f64) -> String {
    format!("{x:.16E}")
}

fn hollerith(s: &str) -> String {
    format!("{}H{}", s.len(), s)
}

struct Section {
    letter: char,
    lines: Vec<String>,
}

impl Section {
    fn new(letter: char) -> Self {
        Self {
            letter,
            lines: Vec::new(),
        }
    }

    fn push(&mut self, data: &str) {
        debug_assert!(data.len() <= 72);
        let seq = self.lines.len() + 1;
        self.lines
            .push(format!("{data:<72}{}{seq:07}", self.letter));
    }

    /// Packs delimited tokens into 72-column records without splitting a
    /// token across records.
    fn push_tokens(&mut self, tokens: &[String], width: usize, suffix: &str) {
        let mut line = String::new();
        for tok in tokens {
            if !line.is_empty() && line.len() + tok.len() > width {
                self.push(&format!("{line:<width$}{suffix}"));
                line.clear();
            }
            line.push_str(tok);
        }
        if !line.is_empty() {
            self.push(&format!("{line:<width$}{suffix}"));
        }
    }
}

fn delimited(params: &[String]) -> Vec<String> {
    let last = params.len() - 1;
    params
        .iter()
        .enumerate()
        .map(|(i, p)| format!("{p}{}", if i == last { ';' } else { ',' }))
        .collect()
}

fn entity_params(s: &Spline) -> Result<(u32, Vec<String>)> {
    let n = s.space_dim();
    if n > 3 {
        return Err(Error::Unsupported(format!(
            "IGES points have 3 coordinates; spline has space dimension {n}"
        )));
    }
    let ps = s.parameter_space();
    let polynomial = if s.is_rational() { "0" } else { "1" };
    let ones = vec![1.0; s.num_control_points()];
    let weights = s.weights().unwrap_or(&ones);
    let coords = |params: &mut Vec<String>| {
        for p in s.physical_space().points() {
            for d in 0..3 {
                params.push(real(p.get(d).copied().unwrap_or(0.0)));
            }
        }
    };
    let mut params = Vec::new();
    let entity = match s.dim() {
        1 => {
            let planar = s
                .physical_space()
                .points()
                .all(|p| p.get(2).copied().unwrap_or(0.0) == 0.0);
            params.push("126".into());
            params.push((ps.num_basis(0) - 1).to_string());
            params.push(ps.degree(0).to_string());
            params.push(if planar { "1" } else { "0" }.into());
            params.extend(["0".into(), polynomial.into(), "0".into()]);
            params.extend(ps.knot_vector(0).as_slice().iter().map(|&k| real(k)));
            params.extend(weights.iter().map(|&w| real(w)));
            coords(&mut params);
            let (lo, hi) = ps.bounds(0);
            params.extend([real(lo), real(hi)]);
            let normal = if planar { [0.0, 0.0, 1.0] } else { [0.0; 3] };
            params.extend(normal.iter().map(|&c| real(c)));
            126
        }
        2 => {
            params.push("128".into());
            params.push((ps.num_basis(0) - 1).to_string());
            params.push((ps.num_basis(1) - 1).to_string());
            params.push(ps.degree(0).to_string());
            params.push(ps.degree(1).to_string());
            params.extend([
                "0".into(),
                "0".into(),
                polynomial.into(),
                "0".into(),
                "0".into(),
            ]);
            for d in 0..2 {
                params.extend(ps.knot_vector(d).as_slice().iter().map(|&k| real(k)));
            }
            params.extend(weights.iter().map(|&w| real(w)));
            coords(&mut params);
            for d in 0..2 {
                let (lo, hi) = ps.bounds(d);
                params.extend([real(lo), real(hi)]);
            }
            128
        }
        d => {
            return Err(Error::Unsupported(format!(
                "IGES stores only B-spline curves and surfaces; spline has parametric dimension {d}"
            )))
        }
    };
    Ok((entity, params))
}

/// Encodes all splines as entities 126/128. `file_name` goes into the
/// global section.
pub fn to_string(file: &SplineFile, file_name: &str) -> Result<String> {
    let entities = file
        .splines()
        .map(entity_params)
        .collect::<Result<Vec<_>>>()?;

    let mut start = Section::new('S');
    start.push("splinekit IGES export: rational B-spline curves and surfaces");

    let mut global = Section::new('G');
    let gparams: Vec<String> = vec![
        "1H,".into(),
        "1H;".into(),
        hollerith("splinekit"),
        hollerith(file_name),
        hollerith("splinekit"),
        hollerith(env!("CARGO_PKG_VERSION")),
        "32".into(),
        "38".into(),
        "6".into(),
        "308".into(),
        "15".into(),
        hollerith("splinekit"),
        "1.0".into(),
        "2".into(),
        "2HMM".into(),
        "1".into(),
        "1.0".into(),
        TIMESTAMP.into(),
        "1.0E-10".into(),
        "0.0".into(),
        String::new(),
        String::new(),
        "11".into(),
        "0".into(),
        TIMESTAMP.into(),
    ];
    global.push_tokens(&delimited(&gparams), 72, "");

    let mut directory = Section::new('D');
    let mut parameters = Section::new('P');
    for (i, (entity, params)) in entities.iter().enumerate() {
        let de_seq = 2 * i + 1;
        let first_p = parameters.lines.len() + 1;
        parameters.push_tokens(&delimited(params), 64, &format!(" {de_seq:>7}"));
        let count = parameters.lines.len() + 1 - first_p;
        directory.push(&format!(
            "{entity:>8}{first_p:>8}{:>8}{:>8}{:>8}{:>8}{:>8}{:>8}{:>8}",
            0, 0, 0, 0, 0, 0, "00000000"
        ));
        directory.push(&format!(
            "{entity:>8}{:>8}{:>8}{count:>8}{:>8}{:>8}{:>8}{:>8}{:>8}",
            0,
            0,
            0,
            "",
            "",
            "SPLINE",
            i + 1
        ));
    }

    let mut out = String::new();
    for section in [&start, &global, &directory, &parameters] {
        for line in &section.lines {
            out.push_str(line);
            out.push('\n');
        }
    }
    let counts = format!(
        "S{:07}G{:07}D{:07}P{:07}",
        start.lines.len(),
        global.lines.len(),
        directory.lines.len(),
        parameters.lines.len()
    );
    out.push_str(&format!("{counts:<72}T{:07}\n", 1));
    Ok(out)
}

struct Record<'a> {
    line: usize,
    data: &'a str,
    seq: usize,
}

/// Splits a parameter string at `delim` up to the record terminator,
/// honouring Hollerith strings.
fn split_params(text: &str, delim: char, end: char) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut field = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == delim || c == end {
            out.push(field.trim().to_string());
            field.clear();
            if c == end {
                return out;
            }
            i += 1;
            continue;
        }
        if c == 'H' && !field.trim().is_empty() && field.trim().chars().all(|d| d.is_ascii_digit())
        {
            let n: usize = field.trim().parse().unwrap_or(0);
            let body: String = chars[i + 1..(i + 1 + n).min(chars.len())].iter().collect();
            field = format!("{}H{}", n, body);
            i += 1 + n;
            continue;
        }
        field.push(c);
        i += 1;
    }
    if !field.trim().is_empty() {
        out.push(field.trim().to_string());
    }
    out
}

fn hollerith_char(field: &str) -> Option<char> {
    field.strip_prefix("1H").and_then(|s| s.chars().next())
}

/// Parses IGES text. Returns the 126/128 splines in directory order and a
/// warning per skipped entity type.
pub fn from_str(text: &str) -> Result<(SplineFile, Vec<String>)> {
    let mut sections: BTreeMap<char, Vec<Record>> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        if raw.len() < 73 || !raw.is_char_boundary(72) || !raw.is_char_boundary(73) {
            return Err(Error::parse(
                FORMAT,
                line,
                format!("truncated record of {} columns", raw.len()),
            ));
        }
        let letter = raw[72..73].chars().next().expect("one column");
        if letter == 'C' || letter == 'B' {
            return Err(Error::parse(
                FORMAT,
                line,
                "compressed and binary IGES are not supported",
            ));
        }
        let seq = raw.get(73..80).map(str::trim).unwrap_or("");
        let seq = seq.parse::<usize>().unwrap_or(0);
        sections.entry(letter).or_default().push(Record {
            line,
            data: &raw[..72],
            seq,
        });
    }
    for letter in ['S', 'G', 'D', 'P', 'T'] {
        if !sections.contains_key(&letter) {
            return Err(Error::Format(format!(
                "IGES file has no '{letter}' section"
            )));
        }
    }

    let global: String = sections[&'G'].iter().map(|r| r.data).collect();
    let (delim, end) = global_delimiters(&global);

    let params_by_seq: BTreeMap<usize, &Record> =
        sections[&'P'].iter().map(|r| (r.seq, r)).collect();
    let directory = &sections[&'D'];
    if !directory.len().is_multiple_of(2) {
        let last = directory.last().expect("non-empty").line;
        return Err(Error::parse(
            FORMAT,
            last,
            "directory entry is missing its second record",
        ));
    }

    let mut file = SplineFile::default();
    let mut skipped: BTreeMap<i64, usize> = BTreeMap::new();
    let mut warnings = Vec::new();
    for pair in directory.chunks_exact(2) {
        let field = |r: &Record, k: usize| r.data[8 * k..8 * k + 8].trim().to_string();
        let entity: i64 = field(&pair[0], 0)
            .parse()
            .map_err(|_| Error::parse(FORMAT, pair[0].line, "entity type is not an integer"))?;
        if entity != 126 && entity != 128 {
            *skipped.entry(entity).or_default() += 1;
            continue;
        }
        let pointer: usize = field(&pair[0], 1)
            .parse()
            .map_err(|_| Error::parse(FORMAT, pair[0].line, "bad parameter data pointer"))?;
        let count: usize = field(&pair[1], 3)
            .parse()
            .map_err(|_| Error::parse(FORMAT, pair[1].line, "bad parameter line count"))?;
        let mut data = String::new();
        for seq in pointer..pointer + count {
            let record = params_by_seq.get(&seq).ok_or_else(|| {
                Error::parse(
                    FORMAT,
                    pair[0].line,
                    format!("parameter record {seq} is missing"),
                )
            })?;
            data.push_str(&record.data[..64]);
        }
        let params = split_params(&data, delim, end);
        let spline = if entity == 126 {
            read_curve(&params)
        } else {
            read_surface(&params)
        }
        .map_err(|msg| Error::parse(FORMAT, pair[0].line, format!("entity {entity}: {msg}")))?;
        file.entries.push(SplineEntry::new(spline));
    }
    for (entity, n) in skipped {
        warnings.push(format!(
            "ignored {n} entit{} of type {entity}",
            if n == 1 { "y" } else { "ies" }
        ));
    }
    Ok((file, warnings))
}

fn global_delimiters(global: &str) -> (char, char) {
    let mut delim = ',';
    let mut end = ';';
    let t = global.trim_start();
    if let Some(c) = hollerith_char(t) {
        delim = c;
        let rest = &t[3..];
        let rest = rest.strip_prefix(delim).unwrap_or(rest);
        if let Some(e) = hollerith_char(rest) {
            end = e;
        }
    } else if let Some(rest) = t.strip_prefix(',') {
        if let Some(e) = hollerith_char(rest) {
            end = e;
        }
    }
    (delim, end)
}

struct Params<'a> {
    values: &'a [String],
    at: usize,
}

impl Params<'_> {
    fn real(&mut self) -> std::result::Result<f64, String> {
        let raw = self
            .values
            .get(self.at)
            .ok_or_else(|| format!("parameter list ends after {} values", self.values.len()))?;
        self.at += 1;
        if raw.is_empty() {
            return Ok(0.0);
        }
        raw.replace(['D', 'd'], "E")
            .parse::<f64>()
            .map_err(|_| format!("parameter {} ('{raw}') is not a number", self.at))
    }

    fn int(&mut self) -> std::result::Result<usize, String> {
        let v = self.real()?;
        if v >= 0.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(format!(
                "parameter {} ({v}) is not a non-negative integer",
                self.at
            ))
        }
    }

    fn reals(&mut self, n: usize) -> std::result::Result<Vec<f64>, String> {
        (0..n).map(|_| self.real()).collect()
    }
}

fn assemble(
    knot_vectors: Vec<Vec<f64>>,
    degrees: Vec<usize>,
    weights: Vec<f64>,
    coords: Vec<f64>,
    polynomial: bool,
) -> std::result::Result<Spline, String> {
    let kvs = knot_vectors
        .into_iter()
        .map(KnotVector::new)
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let points: Vec<Vec<f64>> = coords.chunks_exact(3).map(<[f64]>::to_vec).collect();
    let spline = if polynomial {
        BSpline::new(kvs, degrees, points).map(Spline::from)
    } else {
        Nurbs::new(kvs, degrees, points, weights).map(Spline::from)
    };
    spline.map_err(|e| e.to_string())
}

fn read_curve(values: &[String]) -> std::result::Result<Spline, String> {
    let mut p = Params { values, at: 1 };
    let k = p.int()?;
    let m = p.int()?;
    let props: Vec<usize> = (0..4)
        .map(|_| p.int())
        .collect::<std::result::Result<_, _>>()?;
    let needed = 7 + (k + m + 2) + (k + 1) + 3 * (k + 1) + 2;
    if values.len() < needed {
        return Err(format!(
            "{} parameters, K={k} and M={m} need at least {needed}",
            values.len()
        ));
    }
    let knots = p.reals(k + m + 2)?;
    let weights = p.reals(k + 1)?;
    let coords = p.reals(3 * (k + 1))?;
    assemble(vec![knots], vec![m], weights, coords, props[2] == 1)
}

fn read_surface(values: &[String]) -> std::result::Result<Spline, String> {
    let mut p = Params { values, at: 1 };
    let k1 = p.int()?;
    let k2 = p.int()?;
    let m1 = p.int()?;
    let m2 = p.int()?;
    let props: Vec<usize> = (0..5)
        .map(|_| p.int())
        .collect::<std::result::Result<_, _>>()?;
    let count = (k1 + 1) * (k2 + 1);
    let needed = 10 + (k1 + m1 + 2) + (k2 + m2 + 2) + 4 * count + 4;
    if values.len() < needed {
        return Err(format!(
            "{} parameters, K1={k1} K2={k2} M1={m1} M2={m2} need at least {needed}",
            values.len()
        ));
    }
    let s = p.reals(k1 + m1 + 2)?;
    let t = p.reals(k2 + m2 + 2)?;
    let weights = p.reals(count)?;
    let coords = p.reals(3 * count)?;
    assemble(vec![s, t], vec![m1, m2], weights, coords, props[2] == 1)
}
