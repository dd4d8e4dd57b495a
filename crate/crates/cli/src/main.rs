//! `ellpf verify` runs named check suites; `ellpf eval` evaluates a single quantity.
//! Exit codes: 0 pass, 1 check failure, 2 usage error, 3 numerical degeneracy.

use std::fs;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ellpf_core::eightvertex::{q_sigma, transfer_matrix, EvParams};
use ellpf_core::ellpf::{glaisher_t, hankel_h, p_sigma, SigmaLabel};
use ellpf_core::numkernel::theta;
use ellpf_core::report::CheckReport;
use ellpf_core::soslattice::{partition_z, three_colour_z, SosParams, ThreeColourWeights};
use ellpf_core::suites::{run_suite, Suite};
use ellpf_core::{Error, Nome, TruncationPolicy, C64};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
/// Largest chain for which `eval --target T-matrix` prints the matrix.
const MAX_DUMP_CHAIN: usize = 3;

#[derive(Parser)]
#[command(name = "ellpf", version, about = "Verify and evaluate elliptic pfaffian identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a check suite and print its JSON report.
    Verify(VerifyArgs),
    /// Evaluate one quantity and print it as JSON.
    Eval(EvalArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// theta, pfaffian, sympoly, ellpf, modular, dwt, threecolour, tq or all.
    #[arg(long, value_parser = parse_suite)]
    suite: Suite,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Multiplies every tolerance of the suite.
    #[arg(long, default_value_t = 1.0)]
    tol: f64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Record wall time; reports are then no longer byte-reproducible.
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    #[value(name = "theta")]
    Theta,
    #[value(name = "P")]
    P,
    #[value(name = "Z")]
    Z,
    #[value(name = "Z3C")]
    Z3c,
    #[value(name = "Q")]
    Q,
    #[value(name = "T-matrix")]
    TMatrix,
    #[value(name = "hankel")]
    Hankel,
    #[value(name = "glaisherT")]
    GlaisherT,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_enum)]
    target: Target,
    /// Modular parameter, "re,im".
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    tau: Option<C64>,
    /// Nome for `theta`, "re,im"; alternative to --tau.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    p: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    x: Option<C64>,
    /// Label such as "3" or "3h".
    #[arg(long, value_parser = parse_sigma)]
    sigma: Option<SigmaLabel>,
    /// Points of `P` (repeat the flag, 2n values).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    z: Vec<C64>,
    /// Row parameters of `Z`, or inhomogeneities of the chain for `Q` and `T-matrix`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    u: Vec<C64>,
    /// Column parameters of `Z`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    v: Vec<C64>,
    /// Spectral parameter of `Q` and `T-matrix`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    spectral: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    lambda: Option<C64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    Suite::from_str(s).map_err(|e| e.to_string())
}

fn parse_sigma(s: &str) -> Result<SigmaLabel, String> {
    SigmaLabel::from_str(s).map_err(|e| e.to_string())
}

/// `"re,im"` or a bare real number.
fn parse_complex(s: &str) -> Result<C64, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    let c = match s.split_once(',') {
        Some((re, im)) => C64::new(num(re)?, num(im)?),
        None => C64::new(num(s)?, 0.0),
    };
    if c.re.is_finite() && c.im.is_finite() {
        Ok(c)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

/// Failure of a command, carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_degeneracy() { EXIT_DEGENERATE } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = configure_threads() {
        eprintln!("error: {}", f.message);
        return ExitCode::from(f.code);
    }
    let result = match cli.command {
        Command::Verify(a) => verify(&a),
        Command::Eval(a) => eval(&a).map(|v| {
            println!("{}", serde_json::to_string(&v).expect("value serialises"));
            0
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// `ELLPF_THREADS` caps the worker pool.
fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("ELLPF_THREADS") else { return Ok(()) };
    let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| usage(format!("ELLPF_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| usage(e.to_string()))
}

fn verify(a: &VerifyArgs) -> Result<u8, Failure> {
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return Err(usage("--tol must be a positive multiplier"));
    }
    let report = run_suite(a.suite, a.seed, a.tol, a.timing);
    let json = report.to_json();
    match &a.out {
        Some(path) => fs::write(path, &json).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{json}"),
    }
    Ok(exit_code(&report))
}

/// 0 if every case passes, 3 if every failure is a degeneracy, 1 otherwise.
fn exit_code(report: &CheckReport) -> u8 {
    let mut failures = report.failures().peekable();
    if failures.peek().is_none() {
        0
    } else if failures.all(|c| c.degenerate) {
        EXIT_DEGENERATE
    } else {
        EXIT_FAIL
    }
}

fn complex(z: C64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| usage(format!("missing --{flag}")))
}

fn nome(a: &EvalArgs) -> Result<Nome, Failure> {
    Ok(Nome::new(need(a.tau, "tau")?)?)
}

fn check_n(a: &EvalArgs, n: usize) -> Result<(), Failure> {
    match a.n {
        Some(m) if m != n => Err(usage(format!("--n {m} does not match the {n} supplied parameters"))),
        _ => Ok(()),
    }
}

fn eval(a: &EvalArgs) -> Result<Value, Failure> {
    let value = match a.target {
        Target::Theta => {
            let p = match (a.p, a.tau) {
                (Some(p), _) => p,
                (None, Some(_)) => nome(a)?.p(),
                (None, None) => return Err(usage("missing --p or --tau")),
            };
            complex(theta(need(a.x, "x")?, p, &TruncationPolicy::default())?)
        }
        Target::P => {
            if a.z.is_empty() || !a.z.len().is_multiple_of(2) {
                return Err(usage("P needs an even, positive number of --z values"));
            }
            check_n(a, a.z.len() / 2)?;
            complex(p_sigma(need(a.sigma, "sigma")?, &a.z, &nome(a)?)?)
        }
        Target::Z => {
            check_n(a, a.u.len())?;
            let params = SosParams::at_omega(a.u.clone(), a.v.clone(), need(a.lambda, "lambda")?, nome(a)?)?;
            complex(partition_z(&params)?)
        }
        Target::Z3c => {
            let n = need(a.n, "n")?;
            let w = ThreeColourWeights::from_lambda(need(a.lambda, "lambda")?, &nome(a)?)?;
            complex(three_colour_z(n, &w)?)
        }
        Target::Q => {
            check_n(a, a.u.len())?;
            let params = EvParams::new(nome(a)?, a.u.clone())?;
            complex(q_sigma(need(a.sigma, "sigma")?, need(a.spectral, "spectral")?, &params)?)
        }
        Target::TMatrix => {
            check_n(a, a.u.len())?;
            if a.u.len() > MAX_DUMP_CHAIN {
                return Err(usage(format!("T-matrix output is limited to N <= {MAX_DUMP_CHAIN}")));
            }
            let params = EvParams::new(nome(a)?, a.u.clone())?;
            let t = transfer_matrix(need(a.spectral, "spectral")?, &params)?;
            let rows: Vec<Value> = t.matrix.row_iter().map(|r| Value::Array(r.iter().map(|&z| complex(z)).collect())).collect();
            Value::Array(rows)
        }
        Target::Hankel => complex(hankel_h(need(a.sigma, "sigma")?, need(a.n, "n")?, &nome(a)?)?),
        Target::GlaisherT => {
            // Exact integer; a decimal string once it no longer fits in u64.
            let t = glaisher_t(need(a.j, "j")?)?.to_string();
            t.parse::<u64>().map(Value::from).unwrap_or(Value::String(t))
        }
    };
    Ok(value)
}
