use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lfd_core::duals::{dual_membership, CheckOptions, DualKind, DualTestInput};
use lfd_core::verify::{self, Suite, VerifyOptions};
use lfd_core::{
    apply, build_c, classify, coefficient_stream, compose, forward_transform, norm, reconstruct,
    Error, Mode, OperatorSpec, Rational, Scalar, ScalarRef, SpaceTag, Tolerances,
};
use serde_json::json;

mod problem;

use problem::{read_sequence_arg, Inputs, ProblemFile};

const SCHEMA: u32 = lfd_core::verdict::SCHEMA_VERSION;

#[derive(Debug)]
pub enum CliError {
    /// Malformed or missing input. Exit 1.
    Usage(String),
    /// Library error: invariant violations exit 2, float overflow exits 3.
    Core(Error),
    /// A verify suite failed. Exit 4.
    VerifyFailed,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(Error::Overflow { .. }) => 3,
            CliError::Core(e) if e.is_invariant_violation() => 2,
            CliError::Core(_) => 1,
            CliError::VerifyFailed => 4,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "lfd",
    version,
    about = "l-fractional difference operators and their sequence spaces"
)]
struct Cli {
    /// Arithmetic: exact rationals or f64.
    #[arg(long, global = true)]
    mode: Option<Mode>,
    /// Tail tolerance for verdicts (default 0 in exact mode, 1e-10 in float mode).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Divergence threshold for verdicts.
    #[arg(long, global = true)]
    divergence: Option<f64>,
    /// Seed for verify suites and the A1 search past the exact limit.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct InputArgs {
    /// JSON problem file; inline flags override its fields.
    #[arg(short = 'p', long)]
    problem: Option<PathBuf>,
    /// Order a.
    #[arg(short = 'a', allow_hyphen_values = true)]
    a: Option<String>,
    /// Step l.
    #[arg(short = 'l', allow_hyphen_values = true)]
    l: Option<String>,
    /// Second order b, for compose.
    #[arg(short = 'b', allow_hyphen_values = true)]
    b: Option<String>,
    /// Weights, `1,2,1/2` or `@file` (default all ones).
    #[arg(long, allow_hyphen_values = true)]
    v: Option<String>,
    /// Sequence x, `1,2,1/2` or `@file`.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Transformed sequence y, `1,2,1/2` or `@file`.
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    /// Dual candidate z, `1,2,1/2` or `@file`.
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Truncation (default: length of the main input sequence).
    #[arg(short = 'N')]
    n: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coefficients (-a)_{i,l}/i! for i = 0..=n.
    Coeffs {
        #[arg(short = 'a', allow_hyphen_values = true)]
        a: String,
        #[arg(short = 'l', allow_hyphen_values = true)]
        l: String,
        #[arg(short = 'n')]
        n: usize,
    },
    /// Apply the operator (a, l) to x.
    Apply(InputArgs),
    /// Apply (b, l) then (a, l) to x.
    Compose(InputArgs),
    /// Recover x from y.
    Reconstruct(InputArgs),
    /// Weighted cumulative transform y of x, or the matrix C with --matrix.
    Transform {
        #[command(flatten)]
        input: InputArgs,
        /// Print the nonzero entries of C as `n,m,value`.
        #[arg(long)]
        matrix: bool,
    },
    /// Truncated norm max_n |y_n|.
    Norm(InputArgs),
    /// Membership diagnostics for l_inf, c or c0.
    Classify {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        space: Option<SpaceTag>,
    },
    /// Dual membership checks for z.
    Dual {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        space: Option<SpaceTag>,
        /// alpha, beta or gamma (default: all three).
        #[arg(long)]
        dual: Option<DualKind>,
        /// Largest truncation evaluated exactly for A1.
        #[arg(long, default_value_t = 20)]
        exact_limit: usize,
    },
    /// Run the seeded identity suites.
    Verify {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 32)]
        m_max: usize,
        #[arg(long, default_value_t = 32)]
        length: usize,
        /// Restrict to the named suites (repeatable).
        #[arg(long)]
        suite: Vec<Suite>,
    },
}

struct Global {
    mode: Option<Mode>,
    tol: Option<f64>,
    divergence: Option<f64>,
    seed: u64,
    json: bool,
}

impl Global {
    fn tolerances(&self, mode: Mode) -> Tolerances {
        let mut t = Tolerances::for_mode(mode);
        if let Some(tail) = self.tol {
            t.tail = tail;
        }
        if let Some(d) = self.divergence {
            t.divergence = d;
        }
        t
    }
}

fn gather(args: &InputArgs) -> Result<Inputs, CliError> {
    let mut inputs = match &args.problem {
        Some(path) => Inputs::from_file(ProblemFile::load(path)?)?,
        None => Inputs::default(),
    };
    if args.a.is_some() {
        inputs.a = args.a.clone();
    }
    if args.l.is_some() {
        inputs.l = args.l.clone();
    }
    if args.b.is_some() {
        inputs.b = args.b.clone();
    }
    for (field, arg, slot) in [
        ("v", &args.v, &mut inputs.v),
        ("x", &args.x, &mut inputs.x),
        ("y", &args.y, &mut inputs.y),
        ("z", &args.z, &mut inputs.z),
    ] {
        if let Some(arg) = arg {
            *slot = Some(read_sequence_arg(field, arg)?);
        }
    }
    if args.n.is_some() {
        inputs.n = args.n;
    }
    Ok(inputs)
}

fn sequence_out<S: Scalar>(seq: &[S], json: bool) -> String
where
    for<'a> &'a S: ScalarRef<S>,
{
    if json {
        let values: Vec<_> = seq.iter().map(Scalar::to_json).collect();
        return json!({ "schema": SCHEMA, "mode": S::MODE, "sequence": values }).to_string() + "\n";
    }
    let mut out = String::new();
    for (k, v) in seq.iter().enumerate() {
        writeln!(out, "{k},{}", v.to_canonical()).unwrap();
    }
    out
}

fn pretty(value: impl serde::Serialize) -> String {
    serde_json::to_string_pretty(&value).expect("reports serialize") + "\n"
}

fn spec_of<S: Scalar>(inputs: &Inputs) -> Result<OperatorSpec<S>, CliError>
where
    for<'a> &'a S: ScalarRef<S>,
{
    Ok(OperatorSpec::new(inputs.scalar("a")?, inputs.scalar("l")?))
}

enum Job {
    Apply,
    Compose,
    Reconstruct,
    Transform {
        matrix: bool,
    },
    Norm,
    Classify {
        space: SpaceTag,
    },
    Dual {
        space: SpaceTag,
        dual: Option<DualKind>,
        exact_limit: usize,
    },
}

fn run_job<S: Scalar>(job: &Job, inputs: &Inputs, global: &Global) -> Result<String, CliError>
where
    for<'a> &'a S: ScalarRef<S>,
{
    let spec = spec_of::<S>(inputs)?;
    let json = global.json;
    match job {
        Job::Apply => {
            let n = inputs.truncation("x")?;
            Ok(sequence_out(
                &apply(&spec, &inputs.sequence::<S>("x", n)?)?,
                json,
            ))
        }
        Job::Compose => {
            let n = inputs.truncation("x")?;
            let second = OperatorSpec::new(inputs.scalar("b")?, spec.step.clone());
            Ok(sequence_out(
                &compose(&spec, &second, &inputs.sequence::<S>("x", n)?)?,
                json,
            ))
        }
        Job::Reconstruct => {
            let n = inputs.truncation("y")?;
            let v = inputs.weights::<S>(n)?;
            Ok(sequence_out(
                &reconstruct(&spec, &v, &inputs.sequence::<S>("y", n)?)?,
                json,
            ))
        }
        Job::Transform { matrix: true } => {
            let n = match inputs.n {
                Some(n) => n,
                None => inputs.truncation("v")?,
            };
            let c = build_c(&spec, &inputs.weights::<S>(n)?, n)?;
            if json {
                let rows: Vec<Vec<_>> = c
                    .rows()
                    .iter()
                    .map(|r| r.iter().map(Scalar::to_json).collect())
                    .collect();
                return Ok(pretty(
                    json!({ "schema": SCHEMA, "mode": S::MODE, "rows": rows }),
                ));
            }
            Ok(c.to_csv())
        }
        Job::Transform { matrix: false } => {
            let n = inputs.truncation("x")?;
            let v = inputs.weights::<S>(n)?;
            Ok(sequence_out(
                &forward_transform(&spec, &v, &inputs.sequence::<S>("x", n)?)?,
                json,
            ))
        }
        Job::Norm => {
            let n = inputs.truncation("x")?;
            let value = norm(
                &spec,
                &inputs.weights::<S>(n)?,
                &inputs.sequence::<S>("x", n)?,
            )?;
            if json {
                return Ok(
                    json!({ "schema": SCHEMA, "mode": S::MODE, "norm": value.to_json() })
                        .to_string()
                        + "\n",
                );
            }
            Ok(format!("{}\n", value.to_canonical()))
        }
        Job::Classify { space } => {
            let n = inputs.truncation("x")?;
            let report = classify(
                &spec,
                &inputs.weights::<S>(n)?,
                &inputs.sequence::<S>("x", n)?,
                *space,
                &global.tolerances(S::MODE),
            )?;
            Ok(pretty(report.to_report()))
        }
        Job::Dual {
            space,
            dual,
            exact_limit,
        } => {
            let n = inputs.truncation("z")?;
            let input = DualTestInput::new(
                spec,
                inputs.weights::<S>(n)?,
                inputs.sequence::<S>("z", n)?,
                n,
            )?;
            let opts = CheckOptions {
                tolerances: global.tolerances(S::MODE),
                exact_subset_limit: *exact_limit,
                search_starts: 32,
                seed: global.seed,
            };
            let kinds = match dual {
                Some(d) => vec![*d],
                None => vec![DualKind::Alpha, DualKind::Beta, DualKind::Gamma],
            };
            let mut reports = Vec::new();
            for kind in kinds {
                reports.push(dual_membership(&input, *space, kind, &opts)?.to_report());
            }
            if reports.len() == 1 {
                Ok(pretty(&reports[0]))
            } else {
                Ok(pretty(reports))
            }
        }
    }
}

fn dispatch(
    args: &InputArgs,
    global: &Global,
    job: impl FnOnce(&Inputs) -> Result<Job, CliError>,
) -> Result<String, CliError> {
    let inputs = gather(args)?;
    let job = job(&inputs)?;
    match global.mode.or(inputs.mode).unwrap_or(Mode::Exact) {
        Mode::Exact => run_job::<Rational>(&job, &inputs, global),
        Mode::Float => run_job::<f64>(&job, &inputs, global),
    }
}

fn coeffs(a: &str, l: &str, n: usize, global: &Global) -> Result<String, CliError> {
    let parse = |field: &str, text: &str| {
        lfd_core::parse_rational(text).map_err(|e| CliError::Usage(format!("field `{field}`: {e}")))
    };
    let spec = OperatorSpec::new(parse("a", a)?, parse("l", l)?);
    let exact = coefficient_stream(&spec, n)?.coeffs;
    // float column: computed in f64 in float mode, rounded from exact otherwise
    let float: Vec<f64> = match global.mode.unwrap_or(Mode::Exact) {
        Mode::Exact => exact.iter().map(Scalar::to_f64).collect(),
        Mode::Float => {
            let spec = OperatorSpec::new(spec.order.to_f64(), spec.step.to_f64());
            coefficient_stream(&spec, n)?.coeffs
        }
    };
    if global.json {
        let rows: Vec<_> = exact
            .iter()
            .zip(&float)
            .enumerate()
            .map(|(i, (e, f))| json!({ "i": i, "exact": e.to_canonical(), "float": f }))
            .collect();
        return Ok(pretty(
            json!({ "schema": SCHEMA, "a": spec.order.to_canonical(), "l": spec.step.to_canonical(), "coefficients": rows }),
        ));
    }
    let mut out = String::new();
    for (i, (e, f)) in exact.iter().zip(&float).enumerate() {
        writeln!(out, "{i},{},{f:?}", e.to_canonical()).unwrap();
    }
    Ok(out)
}

fn run_verify(opts: VerifyOptions, json: bool) -> Result<String, CliError> {
    let outcomes = verify::run(&opts);
    let mut out = String::new();
    if json {
        let rows: Vec<_> = outcomes
            .iter()
            .map(|o| {
                json!({
                    "suite": o.suite.as_str(),
                    "passed": o.passed,
                    "failed": o.failed,
                    "first_failure": o.first_failure,
                })
            })
            .collect();
        out = pretty(
            json!({ "schema": SCHEMA, "seed": opts.seed, "trials": opts.trials, "suites": rows }),
        );
    } else {
        for o in &outcomes {
            let total = o.passed + o.failed;
            writeln!(
                out,
                "{}: {} ({}/{total})",
                o.suite,
                if o.ok() { "PASS" } else { "FAIL" },
                o.passed
            )
            .unwrap();
            if let Some(f) = &o.first_failure {
                writeln!(out, "  first failure: {f}").unwrap();
            }
        }
    }
    print!("{out}");
    if outcomes.iter().all(|o| o.ok()) {
        Ok(String::new())
    } else {
        Err(CliError::VerifyFailed)
    }
}

fn resolve_space(flag: Option<SpaceTag>, inputs: &Inputs) -> Result<SpaceTag, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    inputs
        .space
        .as_deref()
        .ok_or_else(|| CliError::Usage("missing field `space`".into()))?
        .parse()
        .map_err(|e: Error| CliError::Usage(format!("field `space`: {e}")))
}

fn resolve_dual(flag: Option<DualKind>, inputs: &Inputs) -> Result<Option<DualKind>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    inputs
        .dual
        .as_deref()
        .map(|d| {
            d.parse()
                .map_err(|e: Error| CliError::Usage(format!("field `dual`: {e}")))
        })
        .transpose()
}

fn run(cli: Cli) -> Result<String, CliError> {
    let global = Global {
        mode: cli.mode,
        tol: cli.tol,
        divergence: cli.divergence,
        seed: cli.seed,
        json: cli.json,
    };
    match cli.command {
        Command::Coeffs { a, l, n } => coeffs(&a, &l, n, &global),
        Command::Apply(args) => dispatch(&args, &global, |_| Ok(Job::Apply)),
        Command::Compose(args) => dispatch(&args, &global, |_| Ok(Job::Compose)),
        Command::Reconstruct(args) => dispatch(&args, &global, |_| Ok(Job::Reconstruct)),
        Command::Transform { input, matrix } => {
            dispatch(&input, &global, |_| Ok(Job::Transform { matrix }))
        }
        Command::Norm(args) => dispatch(&args, &global, |_| Ok(Job::Norm)),
        Command::Classify { input, space } => dispatch(&input, &global, |inputs| {
            Ok(Job::Classify {
                space: resolve_space(space, inputs)?,
            })
        }),
        Command::Dual {
            input,
            space,
            dual,
            exact_limit,
        } => dispatch(&input, &global, |inputs| {
            Ok(Job::Dual {
                space: resolve_space(space, inputs)?,
                dual: resolve_dual(dual, inputs)?,
                exact_limit,
            })
        }),
        Command::Verify {
            trials,
            m_max,
            length,
            suite,
        } => {
            let opts = VerifyOptions {
                seed: global.seed,
                trials,
                m_max,
                length,
                suites: if suite.is_empty() {
                    Suite::ALL.to_vec()
                } else {
                    suite
                },
            };
            run_verify(opts, global.json)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            match &err {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Core(e) => eprintln!("error: {e}"),
                CliError::VerifyFailed => eprintln!("error: verification failed"),
            }
            ExitCode::from(err.exit_code())
        }
    }
}
