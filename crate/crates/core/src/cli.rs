//! Command-line front end: `solve`, `profile`, `motion`, `sweep` and
//! `equilibrium`.
//!
//! Exit codes: 0 on success, 2 for bad input (config, target, arguments,
//! unwritable output), 3 for numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::addressing::{conditioning_sweep, solve_addressing, solve_pair, Sweep, VoltageSolution};
use crate::equilibrium::{equilibrium_positions, spacing_of};
use crate::fields::perpendicular_field_profile;
use crate::micromotion::motion_report;
use crate::model::{load_scenario, ModulationTarget, Scenario};
use crate::report;
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ionaddr", version, about = "Micromotion addressing of trapped ions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Scenario configuration file
    #[arg(long, value_name = "PATH")]
    scenario: PathBuf,
    /// Target override: `2`, `1,3` or `1:1,2:0.5` (1-based ion indices)
    #[arg(long, value_name = "SPEC")]
    target: Option<String>,
    /// Output CSV path; defaults to stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for compensation voltages (CSV plus a JSON report next to it)
    Solve(Common),
    /// Sample the perpendicular field along the trap axis
    Profile {
        #[command(flatten)]
        common: Common,
        /// Width of the sampled window in µm, centred on the string
        #[arg(long, value_name = "UM")]
        span: Option<f64>,
        #[arg(long, value_name = "N", default_value_t = 2000)]
        samples: usize,
    },
    /// Per-ion field, displacement, micromotion, kappa and Rabi ratio
    Motion(Common),
    /// Peak voltages and conditioning over `ratio=...` or `n=...`
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "SPEC")]
        sweep: String,
    },
    /// Exact equilibrium positions of an n-ion string
    Equilibrium {
        #[arg(long)]
        n: usize,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                EXIT_INPUT
            } else {
                let _ = write!(stdout, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_INPUT
            }
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match command {
        Command::Solve(common) => cmd_solve(&common, stdout, stderr),
        Command::Profile {
            common,
            span,
            samples,
        } => cmd_profile(&common, span, samples, stdout, stderr),
        Command::Motion(common) => cmd_motion(&common, stdout, stderr),
        Command::Sweep { common, sweep } => cmd_sweep(&common, &sweep, stdout, stderr),
        Command::Equilibrium { n, out } => cmd_equilibrium(n, out.as_deref(), stdout, stderr),
    }
}

fn load(common: &Common) -> Result<Scenario> {
    let text = std::fs::read_to_string(&common.scenario).map_err(|e| {
        Error::Io(format!("cannot read {}: {e}", common.scenario.display()))
    })?;
    let scenario = load_scenario(&text)?;
    match &common.target {
        Some(spec) => {
            let target =
                ModulationTarget::parse(spec, scenario.geometry.n_ions, scenario.target.kappa)?;
            scenario.with_target(target)
        }
        None => Ok(scenario),
    }
}

/// Two plain indices go through the pair solver, anything else through the
/// general weighted solve; both give the same result.
fn solve(scenario: &Scenario) -> Result<VoltageSolution> {
    let ions: Vec<usize> = scenario
        .target
        .weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w != 0.0)
        .map(|(i, _)| i + 1)
        .collect();
    let unit = scenario.target.weights.iter().all(|&w| w == 0.0 || w == 1.0);
    if unit && ions.len() == 2 {
        solve_pair(scenario, ions[0], ions[1])
    } else {
        solve_addressing(scenario)
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(Error::from),
    }
}

/// Summary lines go to stdout when the data went to a file, else to stderr.
fn summary<'a>(
    out: Option<&Path>,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
) -> &'a mut dyn Write {
    if out.is_some() {
        stdout
    } else {
        stderr
    }
}

fn cmd_solve(common: &Common, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let scenario = load(common)?;
    let solution = solve(&scenario)?;
    let out = common.out.as_deref();
    emit(out, &report::voltage_csv(&solution), stdout)?;
    if let Some(path) = out {
        emit(
            Some(&path.with_extension("json")),
            &report::voltage_json(&scenario, &solution, "solve"),
            stdout,
        )?;
    }
    let w = summary(out, stdout, stderr);
    writeln!(w, "peak voltage: {} V", solution.peak_abs_voltage)?;
    writeln!(
        w,
        "condition estimate: {}",
        solution.diagnostics.condition_estimate
    )?;
    Ok(())
}

fn cmd_profile(
    common: &Common,
    span_um: Option<f64>,
    samples: usize,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    let scenario = load(common)?;
    let g = scenario.geometry;
    let (z_min, z_max) = match span_um {
        Some(span) => {
            let half = 0.5 * span * 1e-6;
            (g.string_center() - half, g.string_center() + half)
        }
        None => (0.5 * g.d, (g.n_sections as f64 + 0.5) * g.d),
    };
    let solution = solve(&scenario)?;
    let profile = perpendicular_field_profile(&g, &solution.voltages, z_min, z_max, samples)?;
    let out = common.out.as_deref();
    emit(out, &report::profile_csv(&profile), stdout)?;
    let w = summary(out, stdout, stderr);
    writeln!(w, "max |E_perp|: {} V/m", profile.max_abs())?;
    writeln!(w, "zero crossings: {}", profile.zero_crossings().len())?;
    Ok(())
}

fn cmd_motion(common: &Common, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let scenario = load(common)?;
    let solution = solve(&scenario)?;
    let motion = motion_report(&scenario, &solution)?;
    let out = common.out.as_deref();
    emit(out, &report::motion_csv(&motion), stdout)?;
    if let Some(path) = out {
        emit(
            Some(&path.with_extension("json")),
            &report::motion_json(&scenario, &motion, "motion"),
            stdout,
        )?;
    }
    let w = summary(out, stdout, stderr);
    writeln!(w, "q = {}", motion.q)?;
    Ok(())
}

fn cmd_sweep(
    common: &Common,
    spec: &str,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    let scenario = load(common)?;
    let sweep = Sweep::parse(spec)?;
    let rows = conditioning_sweep(&scenario, &sweep);
    for row in &rows {
        if let Err(e) = &row.outcome {
            writeln!(stderr, "row {}: {e}", row.param)?;
        }
    }
    emit(common.out.as_deref(), &report::sweep_csv(&rows), stdout)
}

fn cmd_equilibrium(
    n: usize,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    let string = equilibrium_positions(n)?;
    emit(out, &report::equilibrium_csv(&string), stdout)?;
    if n >= 3 {
        let spacing = spacing_of(&string);
        if let Some(path) = out {
            emit(
                Some(&path.with_extension("spacing.csv")),
                &report::spacing_csv(&spacing),
                stdout,
            )?;
        }
        let w = summary(out, stdout, stderr);
        writeln!(w, "max spacing deviation: {}", spacing.max_deviation)?;
    }
    Ok(())
}
