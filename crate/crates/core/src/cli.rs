//! Command-line front end. Exit codes: 0 success, 1 I/O failure, 2 usage or config error,
//! 3 mesh failure, 4 solver failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{MeshConfig, OutputConfig, RunConfig, SolverConfig, SweConfig};
use crate::diagnostics::{compare_tables, DiagnosticsSeries, Table};
use crate::error::{Error, Result};
use crate::frames::FrameAlignment;
use crate::mesh::{generate_cubed_sphere, geometric_approximation_error, insert_high_order_nodes, mesh_error, NodeStrategy};
use crate::operators::{decay_rate, run_operator_study, OperatorId};
use crate::solvers::{advection, diffusion, maxwell, swe, Discretization};

// Progress lines go to stdout; a closed pipe must not abort a run whose files are still wanted.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MESH: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "mmf-sphere", version, about = "Curvilinear cubed-sphere meshes, moving-frame operators and DG solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate meshes and report mesh error and geometric approximation error.
    Mesh(MeshArgs),
    /// Convergence study of a moving-frame operator on the Rossby-Haurwitz field.
    Operators(OperatorArgs),
    /// Cosine bell advection.
    Advect(RunArgs),
    /// Coupled reaction-diffusion.
    Diffuse(RunArgs),
    /// Transverse-magnetic Maxwell pulse.
    Maxwell(RunArgs),
    /// Shallow water test cases.
    Swe(SweArgs),
    /// Ratio of the final rows of two CSV tables.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub p_geom: usize,
    #[arg(long, default_value = "optimized")]
    pub strategy: NodeStrategy,
    /// Inclusive order range such as 2..6; overrides --p-geom.
    #[arg(long, value_parser = parse_range)]
    pub sweep_p: Option<(usize, usize)>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OperatorArgs {
    #[arg(long)]
    pub op: OperatorId,
    #[arg(long, default_value = "optimized")]
    pub strategy: NodeStrategy,
    #[arg(long, default_value = "local")]
    pub alignment: FrameAlignment,
    /// Inclusive order range such as 2..8.
    #[arg(long, value_parser = parse_range, default_value = "2..8")]
    pub p: (usize, usize),
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Flags shared by the solver subcommands; each overrides the config file.
#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long)]
    pub alignment: Option<String>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub cadence: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub stem: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweArgs {
    /// Test case; overrides the config file.
    #[arg(long)]
    pub case: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub series_a: PathBuf,
    pub series_b: PathBuf,
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got '{s}'"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: usize = a.trim().parse().map_err(|_| format!("bad range start in '{s}'"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad range end in '{s}'"))?;
    if a == 0 || a > b {
        return Err(format!("empty or zero-based range '{s}'"));
    }
    Ok((a, b))
}

/// MMF_THREADS caps element-loop parallelism. The loops are serial, so only validation happens.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var("MMF_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("MMF_THREADS must be a positive integer, got '{v}'"))),
        },
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidInput(_) | Error::SchemaMismatch(_) | Error::OrderOutOfRange(_) => EXIT_USAGE,
        Error::SpringNonConvergence { .. }
        | Error::DegenerateElement { .. }
        | Error::NonConformingEdge { .. }
        | Error::InvalidMesh(_)
        | Error::PoleProximity { .. } => EXIT_MESH,
        Error::NonFiniteState { .. } | Error::PositivityLoss { .. } => EXIT_SOLVER,
        Error::Io(_) | Error::Json(_) => EXIT_IO,
    }
}

/// Parse `args` (including the program name) and run; returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match thread_cap().and_then(|_| execute(&cli.command)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Mesh(a) => cmd_mesh(a),
        Command::Operators(a) => cmd_operators(a),
        Command::Advect(a) => run_config(&resolve(a, "advect", None)?),
        Command::Diffuse(a) => run_config(&resolve(a, "diffuse", None)?),
        Command::Maxwell(a) => run_config(&resolve(a, "maxwell", None)?),
        Command::Swe(a) => run_config(&resolve(&a.run, "swe", Some(a))?),
        Command::Compare(a) => cmd_compare(&a.series_a, &a.series_b),
    }
}

fn cmd_mesh(a: &MeshArgs) -> Result<()> {
    let (lo, hi) = a.sweep_p.unwrap_or((a.p_geom, a.p_geom));
    let lin = generate_cubed_sphere(a.n)?;
    std::fs::create_dir_all(&a.out)?;
    let mut table = Table::new("radius errors relative to the unit sphere", &["p_geom", "dof", "mesh_error", "gae"]);
    for p in lo..=hi {
        let mesh = insert_high_order_nodes(&lin, p, a.strategy)?;
        let me = mesh_error(&mesh);
        let gae = geometric_approximation_error(&mesh, crate::mesh::metrics::default_sampling_order(p));
        let dof = lin.num_elements() * (p + 1) * (p + 1);
        say!("p_geom={p} dof={dof} mesh_error={me:e} gae={gae:e}");
        table.push(vec![p as f64, dof as f64, me, gae]);
        crate::mesh::io::write_mesh(&mesh, &a.out.join(format!("mesh_n{}_p{p}_{}.json", a.n, a.strategy)))?;
    }
    table.write(&a.out.join(format!("mesh_n{}_{}.csv", a.n, a.strategy)))
}

fn cmd_operators(a: &OperatorArgs) -> Result<()> {
    let ps: Vec<usize> = (a.p.0..=a.p.1).collect();
    let rows = run_operator_study(a.op, a.strategy, a.alignment, &ps, a.n)?;
    let mut table = Table::new("errors normalised by the RMS input magnitude", &["p", "dof", "l2", "linf"]);
    for r in &rows {
        say!("p={} dof={} l2={:e} linf={:e}", r.p, r.dof, r.l2, r.linf);
        table.push(vec![r.p as f64, r.dof as f64, r.l2, r.linf]);
    }
    say!("decay rate: {:.3} decades per order", decay_rate(&rows));
    std::fs::create_dir_all(&a.out)?;
    table.write(&a.out.join(format!("{}_{}_{}.csv", a.op.name(), a.strategy, a.alignment)))
}

fn cmd_compare(a: &Path, b: &Path) -> Result<()> {
    let rows = compare_tables(&Table::read(a)?, &Table::read(b)?)?;
    say!("column,final_a,final_b,ratio,saturated_a,saturated_b");
    for r in rows {
        say!("{},{:e},{:e},{:e},{},{}", r.column, r.final_a, r.final_b, r.ratio, r.saturated_a, r.saturated_b);
    }
    Ok(())
}

/// Merge an optional config file with command-line overrides.
pub fn resolve(a: &RunArgs, kind: &str, swe_args: Option<&SweArgs>) -> Result<RunConfig> {
    let mut cfg = match &a.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig {
            mesh: MeshConfig::default(),
            solver: match kind {
                "advect" => SolverConfig::Advect(Default::default()),
                "diffuse" => SolverConfig::Diffuse(Default::default()),
                "maxwell" => SolverConfig::Maxwell(Default::default()),
                _ => SolverConfig::Swe(Default::default()),
            },
            output: OutputConfig::default(),
        },
    };
    if cfg.solver.kind() != kind {
        return Err(Error::Config(format!("config is for '{}', not '{kind}'", cfg.solver.kind())));
    }
    if let Some(n) = a.n {
        cfg.mesh.n_per_face = n;
    }
    if let Some(p) = a.p {
        cfg.mesh.p = p;
    }
    if let Some(s) = &a.strategy {
        cfg.mesh.strategy = s.clone();
    }
    if let Some(s) = &a.alignment {
        cfg.mesh.alignment = s.clone();
    }
    if let Some(o) = &a.out {
        cfg.output.directory = o.clone();
    }
    if let Some(s) = &a.stem {
        cfg.output.stem = Some(s.clone());
    }
    macro_rules! set_time {
        ($c:expr) => {{
            if let Some(v) = a.dt {
                $c.dt = v;
            }
            if let Some(v) = a.t_final {
                $c.t_final = v;
            }
            if let Some(v) = a.cadence {
                $c.cadence = v;
            }
        }};
    }
    match &mut cfg.solver {
        SolverConfig::Advect(c) => set_time!(c),
        SolverConfig::Diffuse(c) => set_time!(c),
        SolverConfig::Maxwell(c) => set_time!(c),
        SolverConfig::Swe(c) => {
            apply_swe(c, a, swe_args);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn apply_swe(c: &mut SweConfig, a: &RunArgs, swe_args: Option<&SweArgs>) {
    if let Some(s) = swe_args {
        if let Some(case) = &s.case {
            c.case = case.clone();
        }
        if s.alpha.is_some() {
            c.alpha = s.alpha;
        }
    }
    if a.dt.is_some() {
        c.dt = a.dt;
    }
    if let Some(v) = a.t_final {
        c.t_final = v;
    }
    if let Some(v) = a.cadence {
        c.cadence = v;
    }
}

/// Run a validated configuration and write `<stem>.csv` and `<stem>.json`.
pub fn run_config(cfg: &RunConfig) -> Result<()> {
    let series = solve(cfg)?;
    let stem = cfg.stem();
    series.write(&cfg.output.directory, &stem)?;
    if let Some(r) = series.last() {
        let show = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_else(|| "-".into());
        say!(
            "{} t={} l2={} linf={} mass={} energy={}",
            series.metadata.case,
            r.time,
            show(r.l2),
            show(r.linf),
            show(r.mass_rel_err),
            show(r.energy_rel_err)
        );
    }
    say!("wrote {}", cfg.output.directory.join(format!("{stem}.csv")).display());
    Ok(())
}

pub fn solve(cfg: &RunConfig) -> Result<DiagnosticsSeries> {
    cfg.validate()?;
    let disc = Discretization::new(cfg.mesh.n_per_face, cfg.mesh.p, cfg.mesh.strategy()?, cfg.mesh.alignment()?)?;
    match &cfg.solver {
        SolverConfig::Advect(c) => advection::advect_solve(&disc, c),
        SolverConfig::Diffuse(c) => diffusion::reaction_diffusion_solve(&disc, c),
        SolverConfig::Maxwell(c) => maxwell::maxwell_tm_solve(&disc, c),
        SolverConfig::Swe(c) => swe::swe_run_case(&disc, &c.run()?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..6"), Ok((2, 6)));
        assert_eq!(parse_range("3..=3"), Ok((3, 3)));
        assert!(parse_range("6..2").is_err());
        assert!(parse_range("0..2").is_err());
        assert!(parse_range("4").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_from_args(["mmf-sphere", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run_from_args(["mmf-sphere", "mesh", "--strategy", "best"]), EXIT_USAGE);
        assert_eq!(run_from_args(["mmf-sphere", "operators", "--op", "laplace"]), EXIT_USAGE);
    }

    #[test]
    fn error_classes_map_to_contract() {
        assert_eq!(exit_code(&Error::PositivityLoss { time: 1.0 }), EXIT_SOLVER);
        assert_eq!(exit_code(&Error::NonFiniteState { time: 1.0 }), EXIT_SOLVER);
        assert_eq!(exit_code(&Error::SpringNonConvergence { element: 0, residual: 1.0, iterations: 1 }), EXIT_MESH);
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_USAGE);
    }

    #[test]
    fn flags_override_defaults() {
        let cli = Cli::try_parse_from(["mmf-sphere", "swe", "--case", "rossby-haurwitz", "--p", "3", "--t-final", "0.5"]).unwrap();
        let Command::Swe(a) = &cli.command else { panic!() };
        let cfg = resolve(&a.run, "swe", Some(a)).unwrap();
        assert_eq!(cfg.mesh.p, 3);
        let SolverConfig::Swe(s) = &cfg.solver else { panic!() };
        assert_eq!((s.case.as_str(), s.t_final), ("rossby-haurwitz", 0.5));
        assert_eq!(s.run().unwrap().dt, 1e-4);
    }
}
