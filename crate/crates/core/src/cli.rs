//! Command-line interface.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::mesh::{self, Mesh};
use crate::verification::{
    inf_sup_for, run_convergence, solve_on_mesh, write_csv, CaseName, CurvedBoundary, GeometryMode,
    ManufacturedCase,
};
use crate::vem::Discretization;

/// Exit code for malformed command lines and input files.
pub const EXIT_USAGE: i32 = 1;
/// Exit code for geometric or numerical failures.
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Parser)]
#[command(name = "curvem", version, about = "Mixed virtual elements for Darcy flow on curved polygonal meshes")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Build the mesh of a case and write it to a file.
    Mesh(MeshArgs),
    /// Check a mesh file and print its quality report.
    Validate(ValidateArgs),
    /// Solve one case on one mesh and print the errors.
    Solve(SolveArgs),
    /// Run a case on a sequence of meshes and write the errors as CSV.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    CurvedBoundary,
    CircleInclusion,
    DoubleInterface,
    /// The smooth curved-boundary solution on a mesh read with `--mesh`.
    FromFile,
}

impl CaseArg {
    fn builtin(self) -> Option<CaseName> {
        match self {
            Self::CurvedBoundary => Some(CaseName::CurvedBoundary),
            Self::CircleInclusion => Some(CaseName::CircleInclusion),
            Self::DoubleInterface => Some(CaseName::DoubleInterface),
            Self::FromFile => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    #[value(name = "withgeo")]
    WithGeo,
    #[value(name = "nogeo")]
    NoGeo,
}

impl From<ModeArg> for GeometryMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::WithGeo => GeometryMode::WithGeo,
            ModeArg::NoGeo => GeometryMode::NoGeo,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct MeshArgs {
    #[arg(long, value_enum)]
    pub case: CaseArg,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "withgeo")]
    pub mode: ModeArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub mesh: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub case: CaseArg,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "withgeo")]
    pub mode: ModeArg,
    /// Mesh file, required by `--case from-file`.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Also estimate the discrete inf-sup constant.
    #[arg(long)]
    pub inf_sup: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Args)]
pub struct ConvergenceArgs {
    #[arg(long, value_enum)]
    pub case: CaseArg,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "withgeo")]
    pub mode: ModeArg,
    #[arg(long, value_delimiter = ',', default_values_t = [8, 16, 32, 64])]
    pub sizes: Vec<usize>,
    /// CSV output; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

fn mode_name(m: ModeArg) -> &'static str {
    GeometryMode::from(m).as_str()
}

fn case_name(c: CaseArg) -> String {
    c.to_possible_value().expect("no skipped variants").get_name().to_string()
}

impl RunConfig {
    /// Arguments that parse back to this configuration, all flags explicit.
    pub fn canonical_args(&self) -> Vec<String> {
        let mut a = vec!["curvem".to_string()];
        let path = |p: &PathBuf| p.to_string_lossy().into_owned();
        match &self.command {
            Command::Mesh(m) => {
                a.extend(["mesh".into(), "--case".into(), case_name(m.case)]);
                a.extend(["--n".into(), m.n.to_string(), "--mode".into(), mode_name(m.mode).into()]);
                a.extend(["--out".into(), path(&m.out)]);
            }
            Command::Validate(v) => a.extend(["validate".into(), "--mesh".into(), path(&v.mesh)]),
            Command::Solve(s) => {
                a.extend(["solve".into(), "--case".into(), case_name(s.case)]);
                a.extend(["--k".into(), s.k.to_string(), "--n".into(), s.n.to_string()]);
                a.extend(["--mode".into(), mode_name(s.mode).into()]);
                if let Some(m) = &s.mesh {
                    a.extend(["--mesh".into(), path(m)]);
                }
                if s.inf_sup {
                    a.push("--inf-sup".into());
                }
            }
            Command::Convergence(c) => {
                a.extend(["convergence".into(), "--case".into(), case_name(c.case)]);
                a.extend(["--k".into(), c.k.to_string(), "--mode".into(), mode_name(c.mode).into()]);
                let sizes: Vec<String> = c.sizes.iter().map(ToString::to_string).collect();
                a.extend(["--sizes".into(), sizes.join(",")]);
                if let Some(o) = &c.out {
                    a.extend(["--out".into(), path(o)]);
                }
                a.extend(["--jobs".into(), c.jobs.to_string()]);
            }
        }
        a
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let stdout = io::stdout();
    match execute(&config, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                EXIT_USAGE
            } else {
                EXIT_NUMERICAL
            }
        }
    }
}

fn case_and_mesh(case: CaseArg, n: usize, mode: ModeArg, file: Option<&PathBuf>) -> Result<(Box<dyn ManufacturedCase>, Mesh)> {
    let (problem, mesh): (Box<dyn ManufacturedCase>, Mesh) = match (case.builtin(), file) {
        (Some(name), None) => {
            let problem = name.build();
            let mesh = problem.build_mesh(n)?;
            (problem, mesh)
        }
        (Some(_), Some(_)) => {
            return Err(Error::InvalidInput("--mesh is only accepted with --case from-file".into()))
        }
        (None, Some(path)) => (Box::new(CurvedBoundary::unprojected()), mesh::load(path)?),
        (None, None) => return Err(Error::InvalidInput("--case from-file requires --mesh".into())),
    };
    Ok((problem, GeometryMode::from(mode).apply(mesh)?))
}

/// Runs a parsed command, writing reports to `out`.
pub fn execute(config: &RunConfig, out: &mut impl Write) -> Result<()> {
    match &config.command {
        Command::Mesh(a) => {
            if a.case == CaseArg::FromFile {
                return Err(Error::InvalidInput("mesh needs a built-in case".into()));
            }
            let (_, m) = case_and_mesh(a.case, a.n, a.mode, None)?;
            mesh::save(&m, &a.out)?;
            writeln!(out, "cells = {}", m.num_cells())?;
            writeln!(out, "edges = {}", m.num_edges())?;
            writeln!(out, "curved_edges = {}", m.edges().iter().filter(|e| e.geom.is_curved()).count())?;
        }
        Command::Validate(a) => {
            let m = mesh::load(&a.mesh)?;
            let r = mesh::validate(&m)?;
            writeln!(out, "cells = {}", r.cell_count)?;
            writeln!(out, "edges = {}", r.edge_count)?;
            writeln!(out, "curved_edges = {}", r.curved_edge_count)?;
            writeln!(out, "h = {:.16e}", r.h)?;
            writeln!(out, "min_edge_ratio = {:.16e}", r.min_edge_ratio)?;
            writeln!(out, "total_area = {:.16e}", r.total_area)?;
            let bad: Vec<String> = (0..r.cell_count).filter(|&c| !r.star_ok[c]).map(|c| c.to_string()).collect();
            writeln!(out, "centroid_not_star = [{}]", bad.join(","))?;
        }
        Command::Solve(a) => {
            let (problem, m) = case_and_mesh(a.case, a.n, a.mode, a.mesh.as_ref())?;
            let disc = Discretization::new(a.k)?;
            let run = solve_on_mesh(problem.as_ref(), &m, &disc, a.n)?;
            writeln!(out, "h = {:.16e}", run.h)?;
            writeln!(out, "e_q = {:.16e}", run.errors.e_q)?;
            writeln!(out, "e_p = {:.16e}", run.errors.e_p)?;
            writeln!(out, "ndof = {}", run.ndof())?;
            writeln!(out, "residual = {:.3e}", run.residual)?;
            writeln!(out, "conservation = {:.3e}", run.conservation)?;
            if a.inf_sup {
                if a.mesh.is_some() || a.mode == ModeArg::NoGeo {
                    return Err(Error::InvalidInput("--inf-sup needs a built-in case in withgeo mode".into()));
                }
                let est = inf_sup_for(problem.as_ref(), a.n, a.k, 300)?;
                writeln!(out, "inf_sup = {:.16e}", est.beta)?;
            }
        }
        Command::Convergence(a) => {
            let name = a
                .case
                .builtin()
                .ok_or_else(|| Error::InvalidInput("convergence needs a built-in case".into()))?;
            if a.sizes.is_empty() || a.sizes.contains(&0) {
                return Err(Error::InvalidInput("--sizes must list positive integers".into()));
            }
            let problem = name.build();
            let report = run_convergence(problem.as_ref(), &a.sizes, a.k, a.mode.into(), a.jobs);
            match &a.out {
                Some(path) => {
                    let mut w = BufWriter::new(File::create(path)?);
                    write_csv(std::slice::from_ref(&report), &mut w)?;
                    w.flush()?;
                }
                None => write_csv(std::slice::from_ref(&report), out)?,
            }
            if let Some((q, p)) = report.last_rates() {
                eprintln!("last rates: q {q:.3}, p {p:.3}");
            }
            if let Some((n, msg)) = report.failure {
                return Err(Error::SingularSystem {
                    residual: f64::NAN,
                    detail: format!("run with n = {n} failed: {msg}"),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(args).unwrap()
    }

    #[test]
    fn canonical_form_round_trips() {
        for args in [
            vec!["curvem", "solve", "--case", "circle-inclusion", "--k", "0", "--n", "8"],
            vec!["curvem", "convergence", "--case", "curved-boundary", "--k", "2", "--mode", "nogeo", "--out", "r.csv"],
            vec!["curvem", "solve", "--case", "from-file", "--mesh", "m.txt", "--inf-sup"],
            vec!["curvem", "mesh", "--case", "double-interface", "--out", "d.mesh"],
            vec!["curvem", "validate", "--mesh", "d.mesh"],
        ] {
            let c = parse(&args);
            assert_eq!(parse(&c.canonical_args().iter().map(String::as_str).collect::<Vec<_>>()), c);
        }
    }

    #[test]
    fn defaults() {
        let c = parse(&["curvem", "convergence", "--case", "curved-boundary"]);
        let Command::Convergence(a) = c.command else { panic!() };
        assert_eq!(a.sizes, vec![8, 16, 32, 64]);
        assert_eq!((a.k, a.mode, a.jobs), (1, ModeArg::WithGeo, 1));
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["curvem", "solve", "--case", "circle-inclusion", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["curvem", "solve", "--case", "from-file"]), EXIT_USAGE);
    }
}
