//! `splinekit` command line: format conversion, sampling, and the two
//! numerical demos.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or format error, 3 numerical
//! failure. Results go to stdout as `key=value` lines, diagnostics to stderr.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use splinekit::iga::{self, Slice};
use splinekit::io::{self, ConvertOptions, Format, SampleResolution};
use splinekit::optimize;
use splinekit::Error;

#[derive(Parser)]
#[command(name = "splinekit", version, about = "B-spline and NURBS toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert between XML, ITD, IGES and VTK (write only); formats follow
    /// the file extensions.
    Convert {
        input: PathBuf,
        output: PathBuf,
        /// Samples per parametric direction for VTK output, e.g. `50,50`.
        #[arg(long, value_delimiter = ',')]
        resolution: Option<Vec<usize>>,
    },
    /// Sample splines into a VTK mesh.
    Sample {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        resolution: Vec<usize>,
    },
    /// Solve -Δu = 1 on the unit cube with zero boundary values.
    IgaCube {
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=64))]
        elements: u32,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=3))]
        degree: u32,
        #[arg(long, default_value = "iga-cube-out")]
        out: PathBuf,
        /// Samples per direction in the exported files.
        #[arg(long, default_value_t = 21, value_parser = clap::value_parser!(u32).range(2..))]
        samples: u32,
    },
    /// Fit a quadratic Bézier curve to the parabola 1 - x².
    OptimizeParabola {
        #[arg(long, default_value = "optimize-out")]
        out: PathBuf,
        /// Restrict the design variable to [-1, 1] instead of [-1, 3].
        #[arg(long = "paper-bounds")]
        narrow: bool,
        #[arg(long, default_value_t = optimize::DEFAULT_TOLERANCE)]
        tol: f64,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn check_resolution(resolution: &[usize], input: &Path) -> Result<(), Failure> {
    if let Some(&r) = resolution.iter().find(|&&r| r < 2) {
        return Err(Failure::Usage(format!(
            "resolution {r} is below the minimum of 2"
        )));
    }
    let (file, _) = io::read(input)?;
    for (i, s) in file.splines().enumerate() {
        if s.dim() != resolution.len() {
            return Err(Failure::Usage(format!(
                "--resolution has {} values but spline {i} has parametric dimension {}",
                resolution.len(),
                s.dim()
            )));
        }
    }
    Ok(())
}

fn convert(input: &Path, output: &Path, resolution: Option<Vec<usize>>) -> Result<(), Failure> {
    if Format::from_path(output)? == Format::Vtk {
        match &resolution {
            None => return Err(Failure::Usage("VTK output needs --resolution".into())),
            Some(r) => check_resolution(r, input)?,
        }
    }
    let summary = io::convert(input, output, &ConvertOptions { resolution })?;
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    println!("input={}", summary.input.display());
    println!("output={}", summary.output.display());
    println!("splines={}", summary.splines);
    Ok(())
}

fn iga_cube(elements: usize, degree: usize, out: &Path, samples: usize) -> Result<(), Failure> {
    let geometry = iga::unit_box(3, elements, degree)?;
    let field = iga::solve_poisson(&geometry, 1.0, None)?;
    let center = field.evaluate(&geometry, &[0.5, 0.5, 0.5])?;
    std::fs::create_dir_all(out).map_err(Error::from)?;
    let full = SampleResolution::new(vec![samples; 3])?;
    let plane = SampleResolution::new(vec![samples; 2])?;
    iga::export_solution(&geometry, &field, &full, &out.join("cube.vtk"), None)?;
    for (direction, name) in ["x", "y", "z"].iter().enumerate() {
        let slice = Slice {
            direction,
            value: 0.5,
        };
        let path = out.join(format!("slice_{name}.vtk"));
        iga::export_solution(&geometry, &field, &plane, &path, Some(slice))?;
    }
    println!("elements={elements}");
    println!("degree={degree}");
    println!("control_points={}", geometry.num_control_points());
    println!("center_value={center:.12e}");
    println!("output={}", out.display());
    Ok(())
}

fn optimize_parabola(out: &Path, narrow: bool, tol: f64) -> Result<(), Failure> {
    if !(tol > 0.0) {
        return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
    }
    let bounds = if narrow {
        optimize::NARROW_BOUNDS
    } else {
        optimize::DEFAULT_BOUNDS
    };
    let trace = optimize::run_parabola_demo(out, bounds, tol)?;
    if !trace.converged {
        eprintln!("warning: evaluation budget exhausted before reaching tolerance {tol}");
    }
    println!("y={}", trace.best_y);
    println!("objective={:e}", trace.best_objective);
    println!("evaluations={}", trace.records.len());
    println!("lower_bound={}", bounds.0);
    println!("upper_bound={}", bounds.1);
    println!("output={}", out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Convert {
            input,
            output,
            resolution,
        } => convert(&input, &output, resolution),
        Command::Sample {
            input,
            output,
            resolution,
        } => {
            if Format::from_path(&output).ok() != Some(Format::Vtk) {
                return Err(Failure::Usage(format!(
                    "sample writes VTK; {} does not end in .vtk",
                    output.display()
                )));
            }
            convert(&input, &output, Some(resolution))
        }
        Command::IgaCube {
            elements,
            degree,
            out,
            samples,
        } => iga_cube(elements as usize, degree as usize, &out, samples as usize),
        Command::OptimizeParabola { out, narrow, tol } => optimize_parabola(&out, narrow, tol),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Numerical(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
