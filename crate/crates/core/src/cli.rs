//! The `pm` command line. Every analysis subcommand builds a
//! [`ScenarioConfig`] and hands it to [`run_scenario`].
//!
//! Exit codes: 0 on success, 1 when the spec is invalid, an analysis fails
//! or a check does not hold, 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::experiment::{run_scenario, Grid, ScenarioConfig, Task};
use crate::model::ModelSpec;

#[derive(Debug, Parser)]
#[command(name = "pm", version, about = "Partial-migration population models")]
pub struct Cli {
    /// Worker threads (overrides PM_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Model spec (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    /// Allocation override: `X` for a single egg pool, `X,Y` for two.
    #[arg(long, value_delimiter = ',')]
    pub phi: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SweepMode {
    Phi,
    Phi2,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a spec against every admissibility rule.
    Validate {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Reproduction number and growth regime.
    R0 {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dominant eigenvalue, reproduction number and, for density-dependent
    /// specs, the long-run outcome.
    Classify {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterate the model from a starting state.
    Simulate {
        #[command(flatten)]
        spec: SpecArgs,
        /// Starting state, comma separated (default all ones).
        #[arg(long, value_delimiter = ',')]
        x0: Option<Vec<f64>>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        /// Keep every k-th state in the output (default 1 with --out).
        #[arg(long)]
        record_every: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduction number over an allocation grid.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum)]
        mode: SweepMode,
        /// Points per axis over [0, 1].
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-difference derivatives of the reproduction number.
    Sensitivity {
        #[command(flatten)]
        spec: SpecArgs,
        /// Parameter names such as `t1`, `f3`, `resident.t2` (default all).
        #[arg(long = "param")]
        params: Vec<String>,
        /// Relative step.
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification suite over the bundled specs.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Samples per property check.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn with_spec(task: Task, args: SpecArgs) -> ScenarioConfig {
    ScenarioConfig {
        spec_path: Some(args.spec),
        phi: args.phi,
        ..ScenarioConfig::new(task)
    }
}

fn to_config(command: Command) -> Result<Option<ScenarioConfig>> {
    let config = match command {
        Command::Validate { .. } => return Ok(None),
        Command::R0 { spec, out } => ScenarioConfig {
            output: out,
            ..with_spec(Task::R0, spec)
        },
        Command::Classify {
            spec,
            seed,
            steps,
            tol,
            out,
        } => ScenarioConfig {
            seed: Some(seed),
            steps,
            tol,
            output: out,
            ..with_spec(Task::Classify, spec)
        },
        Command::Simulate {
            spec,
            x0,
            steps,
            tol,
            record_every,
            out,
        } => ScenarioConfig {
            initial: x0.map(|x| vec![x]),
            steps,
            tol,
            record_every,
            output: out,
            ..with_spec(Task::Simulate, spec)
        },
        Command::Sweep {
            spec,
            mode,
            grid,
            out,
        } => ScenarioConfig {
            spec_path: Some(spec),
            grid: grid.map(Grid::Points),
            output: out,
            ..ScenarioConfig::new(match mode {
                SweepMode::Phi => Task::SweepPhi,
                SweepMode::Phi2 => Task::SweepPhi2,
            })
        },
        Command::Sensitivity { spec, params, h, out } => ScenarioConfig {
            params: (!params.is_empty()).then_some(params),
            h,
            output: out,
            ..with_spec(Task::Sensitivity, spec)
        },
        Command::Verify { seed, samples, out } => ScenarioConfig {
            seed: Some(seed),
            samples,
            output: out,
            ..ScenarioConfig::new(Task::Verify)
        },
        Command::Run { config } => ScenarioConfig::from_path(config)?,
    };
    Ok(Some(config))
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<bool> {
    let io = |e| Error::io("<stdout>", e);
    if let Command::Validate { spec } = &cli.command {
        let report = ModelSpec::from_path(spec)?.validate();
        writeln!(out, "{report}").map_err(io)?;
        return Ok(report.is_valid());
    }
    let mut config = to_config(cli.command)?.expect("validate handled above");
    if cli.threads.is_some() {
        config.threads = cli.threads;
    }
    let summary = run_scenario(&config)?;
    for line in &summary.lines {
        writeln!(out, "{line}").map_err(io)?;
    }
    for path in &summary.outputs {
        writeln!(out, "wrote {}", path.display()).map_err(io)?;
    }
    Ok(summary.passed)
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(cli, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            std::iter::once("pm").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    fn spec(name: &str) -> String {
        format!("{}/specs/{name}.json", env!("CARGO_MANIFEST_DIR"))
    }

    #[test]
    fn r0_command() {
        let (code, out, _) = call(&["r0", "--spec", &spec("migrant")]);
        assert_eq!(code, 0);
        assert!(out.starts_with("R0 = 4.000000000000\nregime: Growth\n"), "{out}");
    }

    #[test]
    fn phi_override() {
        let (code, out, _) = call(&["r0", "--spec", &spec("two_egg"), "--phi", "0,0"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("R0 = 1.581138830084"), "{out}");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["r0"]).0, 2);
        assert_eq!(call(&["r0", "--spec", "x", "--bogus"]).0, 2);
    }

    #[test]
    fn invalid_spec_exits_1() {
        let (code, out, _) = call(&["validate", "--spec", &spec("bad_t1_zero")]);
        assert_eq!(code, 1);
        assert!(out.contains("t_1"), "{out}");
        let (code, _, err) = call(&["r0", "--spec", "/nonexistent.json"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn help_exits_0() {
        assert_eq!(call(&["--help"]).0, 0);
        for sub in [
            "validate",
            "r0",
            "classify",
            "simulate",
            "sweep",
            "sensitivity",
            "verify",
            "run",
        ] {
            let (code, out, _) = call(&[sub, "--help"]);
            assert_eq!(code, 0, "{sub}");
            assert!(out.contains("Usage"));
        }
    }
}
