mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use output::Format;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(version, about = "Effective-charge hydrogen-like model of atoms: energies, densities, form factors")]
struct Cli {
    /// Worker threads for per-element fan-out (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Configuration, effective charge and energies of one atom or ion
    Solve(SolveArgs),
    /// Effective charges and energies over a range of neutral atoms
    Table2(Table2Args),
    /// Second-order energies of H-, He, Li and the He 2S excited states
    Table1(Table1Args),
    /// Radial density curves 4 pi r^2 rho(r)
    Density(DensityArgs),
    /// Form-factor curve against s = sin(theta)/lambda
    Formfactor(FormFactorArgs),
    /// Compare computed values from a CSV file with a reference dataset
    Compare(CompareArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Out {
    /// Output file (default: stdout)
    #[arg(long, short)]
    output: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct Target {
    /// Nuclear charge
    #[arg(long = "Z", visible_alias = "z")]
    z: u32,

    /// Electron count (default: Z)
    #[arg(long = "N", visible_alias = "n")]
    n: Option<usize>,

    /// Occupancy override, e.g. "[Ar] 3d1"
    #[arg(long)]
    config: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum State {
    Ground,
    #[value(name = "2-3S")]
    Triplet2S,
    #[value(name = "2-1S")]
    Singlet2S,
}

#[derive(Args, Debug)]
pub struct Space {
    /// Highest principal number of bound intermediate states in the pair sum
    #[arg(long, default_value_t = 20)]
    n_max: u32,

    /// Highest partial wave of the pair sum
    #[arg(long, default_value_t = 8)]
    l_max: u32,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    target: Target,

    #[arg(long, value_parser = ["0", "2"], default_value = "0")]
    order: String,

    /// Include the two-electron correlation term (order 2 only)
    #[arg(long)]
    pairs: bool,

    #[arg(long, value_enum, default_value = "ground")]
    state: State,

    /// Fail on degenerate unoccupied levels instead of excluding them
    #[arg(long)]
    strict: bool,

    #[command(flatten)]
    space: Space,

    #[command(flatten)]
    out: Out,
}

#[derive(Args, Debug)]
pub struct Table2Args {
    /// Inclusive Z range such as 1..20, or a single Z
    #[arg(long, default_value = "1..100")]
    range: String,

    #[arg(long, value_parser = ["0", "2"], default_value = "0")]
    order: String,

    /// Compare with the reference table; exit status 1 if any row fails
    #[arg(long)]
    compare: bool,

    /// Absolute tolerance on Z*
    #[arg(long, default_value_t = 5e-4)]
    zstar_tol: f64,

    /// Relative tolerance on E0
    #[arg(long, default_value_t = 2e-4)]
    e0_tol: f64,

    /// Relative tolerance on E2_single
    #[arg(long, default_value_t = 5e-3)]
    e2_tol: f64,

    #[command(flatten)]
    out: Out,
}

#[derive(Args, Debug)]
pub struct Table1Args {
    /// Compare with the reference table; exit status 1 if any row fails
    #[arg(long)]
    compare: bool,

    /// Relative tolerance for ground states
    #[arg(long, default_value_t = 0.015)]
    ground_tol: f64,

    /// Relative tolerance for the excited states
    #[arg(long, default_value_t = 0.01)]
    excited_tol: f64,

    #[command(flatten)]
    space: Space,

    #[command(flatten)]
    out: Out,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[command(flatten)]
    target: Target,

    #[arg(long, default_value_t = 5.0)]
    r_max: f64,

    #[arg(long, default_value_t = 0.01)]
    step: f64,

    /// Skip the first-order correction
    #[arg(long)]
    zeroth_only: bool,

    #[command(flatten)]
    out: Out,
}

#[derive(Args, Debug)]
pub struct FormFactorArgs {
    #[command(flatten)]
    target: Target,

    /// Largest s = sin(theta)/lambda in 1/angstrom
    #[arg(long, default_value_t = 2.0)]
    s_max: f64,

    #[arg(long, default_value_t = 0.01)]
    step: f64,

    #[command(flatten)]
    out: Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableId {
    Table1,
    Table2,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long, value_enum)]
    dataset: TableId,

    /// CSV with columns Z,N,state,quantity,value and optionally reference
    #[arg(long)]
    input: PathBuf,

    #[arg(long)]
    rel_tol: Option<f64>,

    #[arg(long)]
    abs_tol: Option<f64>,

    #[command(flatten)]
    out: Out,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            return commands::fail(&effcharge::Error::domain(format!("thread pool: {e}")));
        }
    }
    let result = match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Table2(a) => commands::table2(a),
        Command::Table1(a) => commands::table1(a),
        Command::Density(a) => commands::density(a),
        Command::Formfactor(a) => commands::formfactor(a),
        Command::Compare(a) => commands::compare(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => commands::fail(&e),
    }
}
