//! File interchange: XML, ITD and IGES readers/writers, a legacy VTK
//! exporter, and conversion between them.
//!
//! Every codec goes through [`SplineFile`], a format-neutral list of splines
//! with optional attached scalar fields.

use std::fs;
use std::path::{Path, PathBuf};

use crate::{Error, Result, Spline};

pub mod iges;
pub mod itd;
pub mod vtk;
pub mod xml;

pub use vtk::{check_vtk_structure, SampleResolution, VtkSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataLocation {
    /// One value per control point.
    ControlPoint,
    /// One value per element, i.e. per tensor product of non-zero knot spans.
    Element,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataField {
    pub name: String,
    pub location: DataLocation,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplineEntry {
    pub spline: Spline,
    pub data: Vec<DataField>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SplineFile {
    pub entries: Vec<SplineEntry>,
}

/// Number of elements (tensor products of non-zero knot spans).
pub fn element_count(spline: &Spline) -> usize {
    spline
        .parameter_space()
        .knot_vectors()
        .iter()
        .map(|kv| kv.nonzero_spans().len())
        .product()
}

impl SplineEntry {
    pub fn new(spline: Spline) -> Self {
        Self {
            spline,
            data: Vec::new(),
        }
    }

    pub fn with_field(mut self, field: DataField) -> Result<Self> {
        let expected = match field.location {
            DataLocation::ControlPoint => self.spline.num_control_points(),
            DataLocation::Element => element_count(&self.spline),
        };
        if field.values.len() != expected {
            return Err(Error::Format(format!(
                "field '{}' has {} values, expected {expected}",
                field.name,
                field.values.len()
            )));
        }
        if field.name.is_empty() || field.name.chars().any(char::is_whitespace) {
            return Err(Error::Format(format!(
                "field name '{}' must be non-empty without whitespace",
                field.name
            )));
        }
        self.data.push(field);
        Ok(self)
    }
}

impl SplineFile {
    pub fn new(splines: impl IntoIterator<Item = Spline>) -> Self {
        Self {
            entries: splines.into_iter().map(SplineEntry::new).collect(),
        }
    }

    pub fn splines(&self) -> impl Iterator<Item = &Spline> {
        self.entries.iter().map(|e| &e.spline)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Xml,
    Itd,
    Iges,
    Vtk,
}

impl Format {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .unwrap_or_default();
        match ext.as_str() {
            "xml" => Ok(Format::Xml),
            "itd" => Ok(Format::Itd),
            "igs" | "iges" => Ok(Format::Iges),
            "vtk" => Ok(Format::Vtk),
            _ => Err(Error::Unsupported(format!(
                "unrecognised file extension of {}",
                path.display()
            ))),
        }
    }
}

/// Reads any supported spline format, chosen by extension. Returns the
/// file and a list of warnings about skipped content.
pub fn read(path: &Path) -> Result<(SplineFile, Vec<String>)> {
    let text = fs::read_to_string(path)?;
    match Format::from_path(path)? {
        Format::Xml => Ok((xml::from_str(&text)?, Vec::new())),
        Format::Itd => itd::from_str(&text),
        Format::Iges => iges::from_str(&text),
        Format::Vtk => Err(Error::Unsupported(
            "VTK files are write-only; meshes cannot be turned back into splines".into(),
        )),
    }
}

#[derive(Debug, Clone, Default)]
pub struct ConvertOptions {
    /// Sample counts per parametric direction, required for VTK output.
    pub resolution: Option<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct ConvertSummary {
    pub input: PathBuf,
    pub output: PathBuf,
    pub splines: usize,
    pub warnings: Vec<String>,
}

/// Reads `input` and writes its splines to `output`; the formats follow the
/// extensions. Nothing is written when reading or encoding fails.
pub fn convert(input: &Path, output: &Path, options: &ConvertOptions) -> Result<ConvertSummary> {
    let out_format = Format::from_path(output)?;
    let (file, mut warnings) = read(input)?;
    let text = match out_format {
        Format::Xml => xml::to_string(&file)?,
        Format::Itd => {
            note_dropped_data(&file, "ITD", &mut warnings);
            itd::to_string(&file)?
        }
        Format::Iges => {
            note_dropped_data(&file, "IGES", &mut warnings);
            let name = output
                .file_name()
                .and_then(|n| n.to_str())
                .unwrap_or("out.igs");
            iges::to_string(&file, name)?
        }
        Format::Vtk => {
            let resolution = options
                .resolution
                .as_ref()
                .ok_or_else(|| Error::Format("VTK output needs a sampling resolution".into()))?;
            let resolutions = file
                .splines()
                .map(|s| SampleResolution::for_spline(resolution.clone(), s))
                .collect::<Result<Vec<_>>>()?;
            vtk::to_string(&file, &resolutions)?
        }
    };
    fs::write(output, text)?;
    Ok(ConvertSummary {
        input: input.to_path_buf(),
        output: output.to_path_buf(),
        splines: file.len(),
        warnings,
    })
}

fn note_dropped_data(file: &SplineFile, format: &str, warnings: &mut Vec<String>) {
    for (i, e) in file.entries.iter().enumerate() {
        if !e.data.is_empty() {
            warnings.push(format!(
                "spline {i}: {} attached field(s) dropped, {format} cannot store them",
                e.data.len()
            ));
        }
    }
}

pub fn write_xml(file: &SplineFile, path: &Path) -> Result<()> {
    Ok(fs::write(path, xml::to_string(file)?)?)
}

pub fn read_xml(path: &Path) -> Result<SplineFile> {
    xml::from_str(&fs::read_to_string(path)?)
}

pub fn write_itd(file: &SplineFile, path: &Path) -> Result<()> {
    Ok(fs::write(path, itd::to_string(file)?)?)
}

pub fn read_itd(path: &Path) -> Result<(SplineFile, Vec<String>)> {
    itd::from_str(&fs::read_to_string(path)?)
}

pub fn write_iges(file: &SplineFile, path: &Path) -> Result<()> {
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("out.igs");
    Ok(fs::write(path, iges::to_string(file, name)?)?)
}

pub fn read_iges(path: &Path) -> Result<(SplineFile, Vec<String>)> {
    iges::from_str(&fs::read_to_string(path)?)
}

pub fn write_vtk(file: &SplineFile, resolutions: &[SampleResolution], path: &Path) -> Result<()> {
    Ok(fs::write(path, vtk::to_string(file, resolutions)?)?)
}

/// Shortest decimal text that parses back to the same `f64`.
pub(crate) fn fmt_real(x: f64) -> String {
    format!("{x}")
}
