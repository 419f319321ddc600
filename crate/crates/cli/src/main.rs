//! `sheppard`: grouped-moment corrections from the command line.
//!
//! Exit codes: 0 success, 1 invalid input or usage, 2 a verification check
//! failed.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use sheppard_core::grouping::{discrete_oracle, grouped_moments_from_histogram, joint_discrete_oracle, randomized_lattice_mean};
use sheppard_core::io::{
    is_tensor_json, lattice_from_json, moments_from_json, moments_to_json, parse_histogram_csv, parse_joint_table,
    parse_samples, tensor_from_json, tensor_to_json, JsonScalar,
};
use sheppard_core::multivariate::{correct_mv, uncorrect_mv};
use sheppard_core::scalar::{format_rational, parse_rational};
use sheppard_core::umbral::{bernoulli_numbers, sheppard_coeffs};
use sheppard_core::univariate::{correct, formula_id, uncorrect};
use sheppard_core::verify::{run_suite, Suite, VerifyConfig};
use sheppard_core::{AxisSpecs, Direction, Exec, GroupingMode, GroupingSpec, MomentTensor, Rational, Scalar};

#[derive(Parser)]
#[command(name = "sheppard", version, about = "Convert between grouped and raw moments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print B_0..B_N and the coefficients (2^(1-j) - 1)·B_j.
    Bernoulli {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        json: bool,
    },
    /// Grouped moments to raw moments.
    Correct(TransformArgs),
    /// Raw moments to grouped moments.
    Uncorrect(TransformArgs),
    /// Sample moments and Monte Carlo lattice-averaged grouped moments.
    Moments(MomentsArgs),
    /// Raw and grouped moments of a finite lattice distribution by enumeration.
    Oracle(OracleArgs),
    /// Run an invariant suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Args)]
struct TransformArgs {
    /// Moment sequence or tensor JSON (`-` for stdin).
    #[arg(long, conflicts_with = "histogram", required_unless_present = "histogram")]
    input: Option<PathBuf>,
    /// Histogram CSV `midpoint,frequency`.
    #[arg(long)]
    histogram: Option<PathBuf>,
    /// Class width; once for all axes or once per axis.
    #[arg(long = "h")]
    h: Vec<String>,
    /// Lattice divisor: a positive integer, or `c` for a continuous axis.
    #[arg(long = "m")]
    m: Vec<String>,
    /// Highest order kept (per axis for tensors).
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MomentsArgs {
    /// One value per line.
    #[arg(long)]
    samples: PathBuf,
    #[arg(long, default_value_t = 4)]
    order: usize,
    /// Class width for the lattice-averaged grouped moments.
    #[arg(long = "h")]
    h: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Lattice distribution JSON.
    #[arg(long, conflicts_with = "joint", required_unless_present = "joint")]
    lattice: Option<PathBuf>,
    /// Joint table CSV `s1,...,sj,prob`; axes come from --h/--m.
    #[arg(long)]
    joint: Option<PathBuf>,
    #[arg(long = "h")]
    h: Vec<String>,
    #[arg(long = "m")]
    m: Vec<u32>,
    #[arg(long, default_value_t = 8)]
    order: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// bernoulli, identities, roundtrip, sheppard, oracle-discrete,
    /// oracle-continuous, limit, multivariate or all.
    suite: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Tolerance for numeric checks.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    json: bool,
    /// Run checks on one thread.
    #[arg(long)]
    sequential: bool,
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn render(value: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn parse_axes(h: &[String], m: &[String], dims: usize) -> Result<AxisSpecs> {
    let pick = |values: &[String], what: &str, k: usize| -> Result<Option<String>> {
        match values.len() {
            0 => Ok(None),
            1 => Ok(Some(values[0].clone())),
            n if n == dims => Ok(Some(values[k].clone())),
            n => bail!("--{what} given {n} times for {dims} axes"),
        }
    };
    let mut specs = Vec::with_capacity(dims);
    for k in 0..dims {
        let h = pick(h, "h", k)?.ok_or_else(|| anyhow!("missing --h"))?;
        let h = parse_rational(&h).with_context(|| format!("bad --h {h:?}"))?;
        let mode = match pick(m, "m", k)?.as_deref() {
            None | Some("c") | Some("continuous") => GroupingMode::Continuous,
            Some(text) => {
                let m: u32 = text.parse().map_err(|_| anyhow!("bad --m {text:?}: expected a positive integer or c"))?;
                GroupingMode::Discrete { m }
            }
        };
        specs.push(GroupingSpec::new(h, mode)?);
    }
    Ok(AxisSpecs::new(specs)?)
}

fn axes_json<T: JsonScalar>(specs: &AxisSpecs) -> Result<Value> {
    specs
        .specs()
        .iter()
        .map(|s| {
            let h = T::from_rational(s.h()).to_json()?;
            Ok(match s.mode() {
                GroupingMode::Continuous => json!({ "h": h, "mode": "continuous" }),
                GroupingMode::Discrete { m } => json!({ "h": h, "mode": "discrete", "m": m }),
            })
        })
        .collect()
}

fn truncate_tensor<T: Scalar>(t: &MomentTensor<T>, order: usize) -> Result<MomentTensor<T>> {
    if let Some(&available) = t.max_orders().iter().find(|&&o| o < order) {
        bail!(sheppard_core::Error::OrderTooHigh { requested: order, available });
    }
    Ok(MomentTensor::from_fn(vec![order; t.dims()], |idx| t.get(idx).expect("in range").clone())?)
}

fn transform<T: JsonScalar>(args: &TransformArgs, direction: Direction) -> Result<Value> {
    let mut out = Map::new();
    if let Some(path) = &args.histogram {
        if direction == Direction::ToGrouped {
            bail!("histogram input already holds grouped data; use `correct`");
        }
        let text = read_input(path)?;
        // the exact parse pins the class width even in float mode
        let exact = parse_histogram_csv::<Rational>(&text)?;
        let hist = parse_histogram_csv::<T>(&text)?;
        if exact.normalized_from_counts {
            eprintln!("warning: frequencies in {} do not sum to 1; normalized as counts", path.display());
        }
        eprintln!(
            "warning: histogram input uses frequency-based grouped moments (fixed class midpoints) \
             in place of lattice-averaged grouped moments"
        );
        let width = exact.histogram.width().clone();
        let specs = if args.h.is_empty() {
            parse_axes(&[format_rational(&width)], &args.m, 1)?
        } else {
            let specs = parse_axes(&args.h, &args.m, 1)?;
            if specs.specs()[0].h() != &width {
                bail!(
                    "--h {} does not match the histogram class width {}",
                    format_rational(specs.specs()[0].h()),
                    format_rational(&width)
                );
            }
            specs
        };
        let (grouped, _) = grouped_moments_from_histogram(&hist.histogram, args.order.unwrap_or(4));
        let spec = &specs.specs()[0];
        let raw = correct(&grouped, spec);
        out.insert("kind".into(), json!("moments"));
        out.insert("direction".into(), json!(direction.as_str()));
        out.insert("formula".into(), json!(formula_id(spec.mode(), direction)));
        out.insert("mode".into(), json!(if T::is_exact() { "exact" } else { "float" }));
        out.insert("axes".into(), axes_json::<T>(&specs)?);
        out.insert(
            "source".into(),
            json!({ "kind": "histogram", "path": path.display().to_string(), "classes": hist.histogram.midpoints().len() }),
        );
        out.insert("grouped".into(), moments_to_json(&grouped)?);
        out.insert("moments".into(), moments_to_json(&raw)?);
        return Ok(Value::Object(out));
    }

    let path = args.input.as_ref().expect("clap requires --input or --histogram");
    let doc: Value = serde_json::from_str(&read_input(path)?).with_context(|| format!("{} is not JSON", path.display()))?;
    if is_tensor_json(&doc) {
        let mut tensor = tensor_from_json::<T>(&doc)?;
        if let Some(order) = args.order {
            tensor = truncate_tensor(&tensor, order)?;
        }
        let specs = parse_axes(&args.h, &args.m, tensor.dims())?;
        let result = match direction {
            Direction::ToRaw => correct_mv(&tensor, &specs)?,
            Direction::ToGrouped => uncorrect_mv(&tensor, &specs)?,
        };
        out.insert("kind".into(), json!("tensor"));
        out.insert("direction".into(), json!(direction.as_str()));
        out.insert("formula".into(), json!(specs.formula_id(direction)));
        out.insert("mode".into(), json!(if T::is_exact() { "exact" } else { "float" }));
        out.insert("axes".into(), axes_json::<T>(&specs)?);
        out.insert("tensor".into(), tensor_to_json(&result)?);
    } else {
        let mut seq = moments_from_json::<T>(&doc)?;
        if let Some(order) = args.order {
            seq = seq.truncated(order)?;
        }
        let specs = parse_axes(&args.h, &args.m, 1)?;
        let spec = &specs.specs()[0];
        let result = match direction {
            Direction::ToRaw => correct(&seq, spec),
            Direction::ToGrouped => uncorrect(&seq, spec),
        };
        out.insert("kind".into(), json!("moments"));
        out.insert("direction".into(), json!(direction.as_str()));
        out.insert("formula".into(), json!(formula_id(spec.mode(), direction)));
        out.insert("mode".into(), json!(if T::is_exact() { "exact" } else { "float" }));
        out.insert("axes".into(), axes_json::<T>(&specs)?);
        out.insert("moments".into(), moments_to_json(&result)?);
    }
    Ok(Value::Object(out))
}

fn cmd_transform(args: &TransformArgs, direction: Direction) -> Result<()> {
    let value = match args.mode {
        Mode::Exact => transform::<Rational>(args, direction)?,
        Mode::Float => transform::<f64>(args, direction)?,
    };
    write_output(args.output.as_deref(), &render(&value)?)
}

fn cmd_bernoulli(order: usize, as_json: bool) -> Result<()> {
    let b = bernoulli_numbers(order);
    let c = sheppard_coeffs(order);
    if as_json {
        let value = json!({
            "kind": "bernoulli",
            "order": order,
            "bernoulli": moments_to_json(&b)?,
            "sheppard": moments_to_json(&c)?,
        });
        return write_output(None, &render(&value)?);
    }
    let mut text = String::from("j\tB_j\t(2^(1-j)-1)B_j\n");
    for j in 0..=order {
        text.push_str(&format!("{j}\t{}\t{}\n", format_rational(&b[j]), format_rational(&c[j])));
    }
    write_output(None, &text)
}

fn cmd_moments(args: &MomentsArgs) -> Result<()> {
    let samples = parse_samples::<f64>(&read_input(&args.samples)?)?;
    let raw = sheppard_core::grouping::raw_moments_from_samples(&samples, args.order)?;
    let mut out = json!({
        "kind": "samples",
        "mode": "float",
        "count": samples.len(),
        "moments": moments_to_json(&raw)?,
    });
    if let Some(h) = args.h {
        let mc = randomized_lattice_mean(&samples, h, args.order, args.trials, args.seed)?;
        out["grouped"] = json!({
            "h": h,
            "trials": mc.trials,
            "seed": args.seed,
            "moments": moments_to_json(&mc.moments)?,
            "std_error": mc.std_error,
        });
    }
    write_output(args.output.as_deref(), &render(&out)?)
}

fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let out = if let Some(path) = &args.lattice {
        let doc: Value = serde_json::from_str(&read_input(path)?).with_context(|| format!("{} is not JSON", path.display()))?;
        let dist = lattice_from_json(&doc)?;
        let (raw, grouped) = discrete_oracle(&dist, args.order);
        json!({
            "kind": "moments",
            "mode": "exact",
            "axes": axes_json::<Rational>(&AxisSpecs::new(vec![dist.spec()])?)?,
            "raw": moments_to_json(&raw)?,
            "grouped": moments_to_json(&grouped)?,
        })
    } else {
        let path = args.joint.as_ref().expect("clap requires --lattice or --joint");
        let text = read_input(path)?;
        let dims = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty())
            .map(|l| l.split(',').count().saturating_sub(1))
            .ok_or_else(|| anyhow!("{} is empty", path.display()))?;
        let m: Vec<String> = args.m.iter().map(u32::to_string).collect();
        let specs = parse_axes(&args.h, &m, dims)?;
        let axes = specs
            .specs()
            .iter()
            .map(|s| (s.h().clone(), s.divisor().unwrap_or(1)))
            .collect();
        let dist = parse_joint_table(&text, axes)?;
        let (raw, grouped) = joint_discrete_oracle(&dist, &vec![args.order; dims])?;
        json!({
            "kind": "tensor",
            "mode": "exact",
            "axes": axes_json::<Rational>(&dist.axis_specs())?,
            "raw": tensor_to_json(&raw)?,
            "grouped": tensor_to_json(&grouped)?,
        })
    };
    write_output(args.output.as_deref(), &render(&out)?)
}

/// Returns whether every check passed.
fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let suite: Suite = args.suite.parse()?;
    if !(args.tol > 0.0) {
        bail!("--tol must be positive");
    }
    let exec = if args.sequential { Exec::Sequential } else { Exec::default() };
    let report = run_suite(suite, &VerifyConfig { seed: args.seed, tol: args.tol, exec });
    let text = if args.json { render(&report.to_json())? } else { report.to_text() };
    write_output(None, &text)?;
    Ok(report.passed())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Bernoulli { order, json } => cmd_bernoulli(*order, *json)?,
        Command::Correct(args) => cmd_transform(args, Direction::ToRaw)?,
        Command::Uncorrect(args) => cmd_transform(args, Direction::ToGrouped)?,
        Command::Moments(args) => cmd_moments(args)?,
        Command::Oracle(args) => cmd_oracle(args)?,
        Command::Verify(args) => {
            if !cmd_verify(args)? {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
