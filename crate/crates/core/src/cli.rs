//! The `evenfactor` command line.
//!
//! Exit codes: 0 success, 1 verification failure or solver disagreement,
//! 2 unreadable or malformed input, 3 instance rejected by the symmetry check.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::digraph::{validate_odd_cycle_symmetric, Digraph, Symmetry};
use crate::evenfactor::verify;
use crate::io::{parse_certificate, parse_instance, write_certificate, write_instance, Certificate};
use crate::solver::{solve, Algorithm, Assertion, SolveError, SolveOptions};
use crate::testkit::{gen, FamilyTag, InstanceFamily};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ASYMMETRIC: i32 = 3;

/// Environment variable that replaces the default seed of `gen` and `bench`.
pub const SEED_ENV: &str = "EVENFACTOR_SEED";

/// Multiplier in the per-call scan envelope `SCAN_FACTOR * (m + n^2)`.
pub const SCAN_FACTOR: u64 = 10;

#[derive(Parser, Debug)]
#[command(name = "evenfactor", version, about = "Maximum even factors in odd-cycle symmetric digraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgoArg {
    Fast,
    Pap,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Fast => Algorithm::Fast,
            AlgoArg::Pap => Algorithm::Pap,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BenchAlgo {
    Fast,
    Pap,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a maximum even factor.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "fast")]
        algo: AlgoArg,
        /// Where to write the certificate.
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Print solver events to stderr, one per line.
        #[arg(long)]
        trace: bool,
        /// Write the instance in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Check a certificate against an instance.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
    },
    /// Generate instances.
    Gen {
        #[arg(long)]
        family: FamilyTag,
        #[arg(long)]
        n: usize,
        /// Arc or edge probability; a family default when omitted.
        #[arg(long)]
        density: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of consecutive seeds.
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Write `<corpus>/<family>/<seed>.dg` instead of printing.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Time both solvers and print CSV.
    Bench {
        #[arg(long)]
        family: FamilyTag,
        /// Comma-separated node counts.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Instances per size.
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long, value_enum, default_value = "both")]
        algo: BenchAlgo,
        #[arg(long)]
        density: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for counterexample dumps.
        #[arg(long, default_value = ".")]
        dump_dir: PathBuf,
    },
    /// Run the odd-cycle symmetry check.
    Check {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Output of one command: exit code plus what went to each stream.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn fail(code: i32, msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        stderr.push('\n');
        Outcome {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

fn default_seed() -> Result<u64, Outcome> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Outcome::fail(EXIT_INPUT, format!("error: {SEED_ENV}=`{s}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn read(path: &Path) -> Result<String, Outcome> {
    fs::read_to_string(path).map_err(|e| Outcome::fail(EXIT_INPUT, format!("error: {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Outcome> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Outcome::fail(EXIT_INPUT, format!("error: {}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Outcome::fail(EXIT_INPUT, format!("error: {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Digraph, Outcome> {
    let text = read(path)?;
    parse_instance(&text).map_err(|e| Outcome::fail(EXIT_INPUT, format!("error: {}: {e}", path.display())))
}

/// Two odd cycles after one augmentation step can only come from input that
/// breaks the symmetry assumption, so that case is reported as bad input.
fn solver_failure(e: SolveError) -> Outcome {
    match e.assertion_kind() {
        Some(Assertion::UniqueOddCycle) => Outcome::fail(EXIT_INPUT, format!("error: input: {e}")),
        _ => Outcome::fail(EXIT_FAIL, format!("error: solver: {e}")),
    }
}

fn require_symmetric(g: &Digraph) -> Result<(), Outcome> {
    match validate_odd_cycle_symmetric(g) {
        Symmetry::Valid => Ok(()),
        Symmetry::PossiblyInvalid(a) => {
            let (u, v) = g.endpoints(a);
            Err(Outcome::fail(
                EXIT_ASYMMETRIC,
                format!("not odd-cycle symmetric: arc {u} -> {v} lies on an odd closed walk and has no reverse"),
            ))
        }
    }
}

fn family(tag: FamilyTag, n: usize, density: Option<f64>, seed: u64) -> InstanceFamily {
    match density {
        Some(p) => InstanceFamily::new(tag, n, p, seed),
        None => InstanceFamily::with_default_density(tag, n, seed),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome::fail(code, text.trim_end())
            } else {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(o) | Err(o) => o,
    }
}

fn execute(cmd: Command) -> Result<Outcome, Outcome> {
    let mut out = Outcome::default();
    match cmd {
        Command::Solve {
            input,
            algo,
            certificate,
            trace,
            dot,
        } => {
            let g = load(&input)?;
            if let Some(p) = dot {
                write(&p, &g.to_dot())?;
            }
            require_symmetric(&g)?;
            let opts = SolveOptions {
                trace,
                ..Default::default()
            };
            let s = solve(&g, algo.into(), opts).map_err(solver_failure)?;
            for ev in &s.trace {
                writeln!(out.stderr, "{ev}").unwrap();
            }
            writeln!(out.stdout, "size {} deficiency {}", s.factor.len(), s.factor.deficiency(&g)).unwrap();
            if let Some(p) = certificate {
                write(&p, &write_certificate(&Certificate::from_arcs(&g, &s.factor.arcs())))?;
            }
        }
        Command::Verify { input, certificate } => {
            let g = load(&input)?;
            let text = read(&certificate)?;
            let cert = parse_certificate(&text)
                .map_err(|e| Outcome::fail(EXIT_INPUT, format!("error: {}: {e}", certificate.display())))?;
            let arcs = cert
                .resolve(&g)
                .map_err(|e| Outcome::fail(EXIT_FAIL, format!("invalid: {e}")))?;
            let f = verify(&g, arcs).map_err(|v| Outcome::fail(EXIT_FAIL, format!("invalid: {v}")))?;
            if f.len() != cert.size {
                return Err(Outcome::fail(
                    EXIT_FAIL,
                    format!("invalid: certificate claims size {} but lists {} arcs", cert.size, f.len()),
                ));
            }
            writeln!(out.stdout, "valid size {} deficiency {}", f.len(), f.deficiency(&g)).unwrap();
        }
        Command::Gen {
            family: tag,
            n,
            density,
            seed,
            count,
            corpus,
        } => {
            let base = match seed {
                Some(s) => s,
                None => default_seed()?,
            };
            match corpus {
                None => {
                    if count != 1 {
                        return Err(Outcome::fail(EXIT_INPUT, "error: --count above 1 needs --corpus"));
                    }
                    out.stdout = write_instance(&gen(&family(tag, n, density, base)));
                }
                Some(dir) => {
                    for s in base..base + count {
                        let path = dir.join(tag.name()).join(format!("{s}.dg"));
                        write(&path, &write_instance(&gen(&family(tag, n, density, s))))?;
                        writeln!(out.stdout, "{}", path.display()).unwrap();
                    }
                }
            }
        }
        Command::Bench {
            family: tag,
            sizes,
            seeds,
            algo,
            density,
            seed,
            dump_dir,
        } => {
            let base = match seed {
                Some(s) => s,
                None => default_seed()?,
            };
            let algos: &[Algorithm] = match algo {
                BenchAlgo::Fast => &[Algorithm::Fast],
                BenchAlgo::Pap => &[Algorithm::Pap],
                BenchAlgo::Both => &[Algorithm::Fast, Algorithm::Pap],
            };
            out.stdout.push_str("n,m,seed,algo,wall_ms,arc_scans,max_call_scans,contractions,recoveries,size\n");
            for &n in &sizes {
                for s in base..base + seeds {
                    let g = gen(&family(tag, n, density, s));
                    let mut sizes_seen = Vec::new();
                    for &a in algos {
                        let sol = solve(&g, a, SolveOptions::default())
                            .map_err(|e| Outcome::fail(EXIT_FAIL, format!("error: {a} on n={n} seed={s}: {e}")))?;
                        let max_call = sol.stats.calls.iter().map(|c| c.arc_scans).max().unwrap_or(0);
                        writeln!(
                            out.stdout,
                            "{},{},{},{},{:.3},{},{},{},{},{}",
                            g.node_count(),
                            g.arc_count(),
                            s,
                            a,
                            sol.elapsed.as_secs_f64() * 1e3,
                            sol.stats.arc_scans,
                            max_call,
                            sol.stats.contractions,
                            sol.stats.recoveries,
                            sol.factor.len()
                        )
                        .unwrap();
                        let envelope = SCAN_FACTOR * (g.arc_count() + g.node_count() * g.node_count()) as u64;
                        if a == Algorithm::Fast && max_call > envelope {
                            writeln!(out.stderr, "scan bound exceeded: {max_call} > {envelope} (n={n} seed={s})").unwrap();
                            out.code = EXIT_FAIL;
                        }
                        sizes_seen.push(sol.factor.len());
                    }
                    if sizes_seen.windows(2).any(|w| w[0] != w[1]) {
                        let path = dump_dir.join(format!("counterexample-{}-{n}-{s}.dg", tag.name()));
                        write(&path, &write_instance(&g))?;
                        writeln!(out.stderr, "solvers disagree on n={n} seed={s}; instance written to {}", path.display())
                            .unwrap();
                        out.code = EXIT_FAIL;
                        return Err(out);
                    }
                }
            }
        }
        Command::Check { input } => {
            let g = load(&input)?;
            require_symmetric(&g)?;
            out.stdout.push_str("valid\n");
        }
    }
    Ok(out)
}

/// Entry point for the binary: runs and prints, returning the exit code.
pub fn main_with_args(args: impl IntoIterator<Item = OsString>) -> i32 {
    let o = run(args);
    let _ = std::io::stdout().write_all(o.stdout.as_bytes());
    let _ = std::io::stderr().write_all(o.stderr.as_bytes());
    o.code
}
