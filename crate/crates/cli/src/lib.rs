//! Command surface of the `dihedral` binary. Every command is a function
//! from parsed arguments to an [`Outcome`] so tests can drive it in-process.

pub mod bench;
pub mod render;
pub mod simulate;

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use dihedral::reduction::{run_dynamic_reduction_jobs, run_static_reduction_jobs, SetsFile};
use dihedral::{dihedral_feasible_opts, dyn_rotate_opts, Chain, ChainFile, DihedralQuery, SweepOptions};
use serde::Serialize;
use serde_json::json;

pub const OUTPUT_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;

pub const SEED_ENV: &str = "DIHEDRAL_SEED";

#[derive(Debug, Parser)]
#[command(name = "dihedral", version, about = "Dihedral rotations of polygonal chains")]
pub struct Cli {
    /// Worker threads for pair tests; never changes results.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Contact tolerance override for feasibility checks.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// RNG seed; falls back to $DIHEDRAL_SEED, then 0.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReduceMode {
    Static,
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    Tree,
    Brute,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a chain file is simple.
    Validate { chain: PathBuf },
    /// Decide one dihedral rotation.
    Query {
        chain: PathBuf,
        #[arg(long)]
        edge: usize,
        #[arg(long, allow_hyphen_values = true)]
        angle: f64,
        /// Apply the rotation when feasible and write the chain back.
        #[arg(long)]
        dynamic: bool,
        /// Where to write the rotated chain (default: in place).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random walk of checked rotations.
    Simulate {
        chain: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = PI)]
        max_angle: f64,
        /// Also write the final chain here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a 3SUM reduction on a sets file.
    Reduce {
        sets: PathBuf,
        #[arg(long, value_enum, default_value = "static")]
        mode: ReduceMode,
        /// Padded set size for the dynamic construction.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Operation counters for the motion tree or the brute-force check.
    Bench {
        #[arg(long, value_enum)]
        structure: Structure,
        #[arg(long, value_delimiter = ',', default_values_t = vec![16, 64, 256, 1024])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        k: usize,
    },
    /// Top and side views of a chain as SVG.
    Render {
        chain: PathBuf,
        #[arg(long)]
        svg: PathBuf,
    },
}

/// Resolved run settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub jobs: usize,
    pub tolerance: Option<f64>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, Failure> {
        let seed = match cli.seed {
            Some(s) => s,
            None => match std::env::var(SEED_ENV) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| Failure::input(format!("{SEED_ENV} is not an unsigned integer: {v:?}")))?,
                Err(_) => 0,
            },
        };
        Ok(RunConfig {
            seed,
            jobs: cli.jobs.max(1),
            tolerance: cli.tolerance,
        })
    }

    pub fn sweep(&self) -> SweepOptions {
        SweepOptions {
            jobs: self.jobs,
            tolerance: self.tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<dihedral::Error> for Failure {
    fn from(e: dihedral::Error) -> Self {
        use dihedral::Error as E;
        let code = match e {
            E::FoldCollision { .. } | E::Certificate(_) | E::UnmappedWitness(..) | E::RigidityViolated(_) => {
                EXIT_INTERNAL
            }
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

pub fn read_chain(path: &Path) -> Result<Chain, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let file: ChainFile =
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(Chain::from_file(file)?)
}

pub fn write_chain(path: &Path, chain: &Chain) -> Result<(), Failure> {
    write_text(path, &(to_json(&chain.to_file()) + "\n"))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    })
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output serializes")
}

fn ok(code: i32, stdout: String) -> Result<(i32, String), Failure> {
    Ok((code, stdout + "\n"))
}

fn validate(path: &Path) -> Result<(i32, String), Failure> {
    let chain = read_chain(path)?;
    let violation = chain.first_violation();
    let body = json!({
        "version": OUTPUT_VERSION,
        "simple": violation.is_none(),
        "violation": violation.map(|(i, j)| [i, j]),
        "vertices": chain.vertex_count(),
        "segments": chain.segment_count(),
    });
    let code = if violation.is_none() { EXIT_OK } else { EXIT_NEGATIVE };
    ok(code, to_json(&body))
}

fn query(
    cfg: &RunConfig,
    path: &Path,
    edge: usize,
    angle: f64,
    dynamic: bool,
    out: Option<&Path>,
) -> Result<(i32, String), Failure> {
    let chain = read_chain(path)?;
    let q = DihedralQuery::new(edge, angle);
    let (f, applied) = if dynamic {
        let o = dyn_rotate_opts(&chain, &q, &cfg.sweep())?;
        if o.applied {
            write_chain(out.unwrap_or(path), &o.chain)?;
        }
        (o.feasibility, Some(o.applied))
    } else {
        (dihedral_feasible_opts(&chain, &q, &cfg.sweep())?, None)
    };
    let mut body = json!({
        "version": OUTPUT_VERSION,
        "edge": edge,
        "angle": angle,
        "feasible": f.is_feasible(),
        "pairTests": f.pair_tests,
        "witness": f.event,
    });
    if let Some(a) = applied {
        body["applied"] = json!(a);
    }
    let code = if f.is_feasible() { EXIT_OK } else { EXIT_NEGATIVE };
    ok(code, to_json(&body))
}

fn reduce(
    cfg: &RunConfig,
    path: &Path,
    mode: ReduceMode,
    n: Option<usize>,
    out: Option<&Path>,
) -> Result<(i32, String), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let sets: SetsFile = serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let inst = sets.into_instance()?;
    let t = match mode {
        ReduceMode::Static => run_static_reduction_jobs(&inst, cfg.jobs)?,
        ReduceMode::Dynamic => run_dynamic_reduction_jobs(&inst, n, cfg.jobs)?,
    };
    let text = to_json(&t);
    if let Some(o) = out {
        write_text(o, &(text.clone() + "\n"))?;
    }
    ok(EXIT_OK, text)
}

pub fn execute(cli: &Cli) -> Outcome {
    let result = RunConfig::from_cli(cli).and_then(|cfg| match &cli.command {
        Command::Validate { chain } => validate(chain),
        Command::Query {
            chain,
            edge,
            angle,
            dynamic,
            out,
        } => query(&cfg, chain, *edge, *angle, *dynamic, out.as_deref()),
        Command::Simulate {
            chain,
            steps,
            max_angle,
            out,
        } => {
            let c = read_chain(chain)?;
            let report = simulate::simulate(&c, *steps, *max_angle, &cfg)?;
            if let Some(o) = out {
                write_chain(o, &report.final_chain)?;
            }
            ok(EXIT_OK, to_json(&report))
        }
        Command::Reduce { sets, mode, n, out } => reduce(&cfg, sets, *mode, *n, out.as_deref()),
        Command::Bench { structure, n, k } => {
            let report = bench::bench(*structure, n, *k, &cfg)?;
            ok(EXIT_OK, to_json(&report))
        }
        Command::Render { chain, svg } => {
            let c = read_chain(chain)?;
            write_text(svg, &render::render_svg(&c))?;
            ok(EXIT_OK, to_json(&json!({"version": OUTPUT_VERSION, "svg": svg})))
        }
    });
    match result {
        Ok((code, stdout)) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(f) => Outcome {
            code: f.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message),
        },
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            }
        }
    }
}
