//! Command-line front end. [`run`] returns the exit code and the text that
//! would be printed, so the binary stays a thin wrapper.
//!
//! Exit codes: 0 for accept/true, 1 for reject/false, 2 for errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::blp::{build_blp, Bound, extract_assignment, solve_blp_with, solve_decide, SolveOptions};
use crate::document::{parse_problem, Problem};
use crate::error::{Error, Result};
use crate::fpol::{
    fractional_homomorphism, increasing_witness, multiset_structure, structure_violation, submodularity_witness, Builtin,
    FractionalOperation,
};
use crate::lp::Pricing;
use crate::oracle::{q_decide, q_infimum, Infimum, DEFAULT_MAX_SELECTIONS};
use crate::plh::{Instance, ValuedStructure};
use crate::qnum::Rational;
use crate::sampling::{build_sample, build_sample_for, Sample, SampleOptions};

#[derive(Parser, Debug)]
#[command(name = "plhvcsp", version, about = "Exact valued CSP solver for piecewise linear homogeneous cost functions")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SampleArgs {
    /// Variable bound of the sample (default: number of instance variables).
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 4096)]
    max_domain: usize,
    /// Largest number of entries in one cost table.
    #[arg(long, default_value_t = 4_000_000)]
    max_tuples: usize,
    /// Also respect the graph atoms of the piece values.
    #[arg(long)]
    value_atoms: bool,
}

impl SampleArgs {
    fn options(&self) -> SampleOptions {
        SampleOptions { d: self.d, value_atoms: self.value_atoms, max_domain: self.max_domain, max_tuples: self.max_tuples }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PricingArg {
    Bland,
    Dantzig,
}

impl From<PricingArg> for Pricing {
    fn from(p: PricingArg) -> Pricing {
        match p {
            PricingArg::Bland => Pricing::Bland,
            PricingArg::Dantzig => Pricing::Dantzig,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether some rational assignment costs at most the threshold.
    Solve {
        file: String,
        #[arg(long, allow_hyphen_values = true)]
        threshold: Option<String>,
        #[command(flatten)]
        sample: SampleArgs,
        /// Print the relaxation LP before the verdict.
        #[arg(long)]
        dump_lp: bool,
        /// Print an assignment of cost at most the threshold on acceptance.
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value = "bland")]
        pricing: PricingArg,
    },
    /// Decide whether some rational assignment has finite cost.
    Feas {
        file: String,
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value = "bland")]
        pricing: PricingArg,
    },
    /// Print the finite sample of the structure as JSON.
    Sample {
        file: String,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Print the optimum of the relaxation over the sample.
    Blp {
        file: String,
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        dump_lp: bool,
        #[arg(long, value_enum, default_value = "bland")]
        pricing: PricingArg,
    },
    /// Decide over Q with one LP per choice of pieces.
    Oracle {
        file: String,
        #[arg(long, allow_hyphen_values = true)]
        threshold: Option<String>,
        /// Also classify the infimum of the cost.
        #[arg(long)]
        infimum: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_SELECTIONS as u64)]
        max_selections: u64,
    },
    /// Properties of the sampled structure.
    Check {
        #[command(subcommand)]
        what: Check,
    },
}

#[derive(Subcommand, Debug)]
enum Check {
    /// Every cost table is submodular.
    Submodular {
        file: String,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Every cost table is increasing in each argument.
    Increasing {
        file: String,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// A fractional operation improves every cost table.
    Improves {
        file: String,
        /// sub, min, max, median, avg, or kth:I
        #[arg(long)]
        op: String,
        #[arg(long)]
        arity: usize,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// The multiset structure of order M maps fractionally to the sample.
    FracHom {
        file: String,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_maps: u64,
        #[command(flatten)]
        sample: SampleArgs,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                CliOutput { code, stdout: text, stderr: String::new() }
            } else {
                CliOutput { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let mut out = String::new();
    match execute(cli.command, &mut out) {
        Ok(code) => CliOutput { code, stdout: out, stderr: String::new() },
        Err(e) => CliOutput { code: 2, stdout: out, stderr: format!("error: {e}\n") },
    }
}

fn load(file: &str) -> Result<Problem> {
    let text = std::fs::read_to_string(file).map_err(|e| Error::Invalid(format!("cannot read {file}: {e}")))?;
    parse_problem(&text)
}

fn threshold(flag: &Option<String>, inst: &Instance) -> Result<Rational> {
    match flag {
        Some(s) => s.parse(),
        None => inst.threshold.clone().ok_or_else(|| Error::Invalid("no threshold in the file and no --threshold".into())),
    }
}

fn verdict(b: bool, yes: &str, no: &str) -> (i32, String) {
    if b {
        (0, yes.to_string())
    } else {
        (1, no.to_string())
    }
}

fn format_assignment(inst: &Instance, values: &[Rational]) -> String {
    inst.variables.iter().zip(values).map(|(x, v)| format!("{x}={v}")).collect::<Vec<_>>().join(" ")
}

fn decide(
    gamma: &ValuedStructure,
    inst: &Instance,
    sample: &SampleArgs,
    pricing: Pricing,
    dump_lp: bool,
    witness: bool,
    out: &mut String,
) -> Result<i32> {
    let u = inst.threshold.clone().expect("threshold set by the caller");
    let opts = SolveOptions { sample: sample.options(), pricing };
    let d = solve_decide(gamma, inst, &opts)?;
    if dump_lp {
        out.push_str(&build_blp(inst, &d.sample.structure)?.lp.dump());
    }
    let (code, word) = verdict(d.accept, "accept", "reject");
    let _ = writeln!(out, "{word}");
    let _ = writeln!(out, "threshold: {u}");
    let rel = match d.blp_bound {
        Bound::Exact => String::new(),
        b => format!("{} ", b.symbol()),
    };
    let _ = writeln!(out, "blp: {rel}{}", d.blp_value);
    let _ = writeln!(out, "sample: {} values, eps = {}", d.sample.structure.size(), d.sample.domain.eps);
    if witness && d.accept {
        let a = extract_assignment(inst, &d.sample.structure, &u, pricing)?;
        let values: Vec<Rational> = a.iter().map(|&i| d.sample.structure.domain[i].clone()).collect();
        let _ = writeln!(out, "witness: {}", format_assignment(inst, &values));
    }
    Ok(code)
}

fn structure_sample(p: &Problem, args: &SampleArgs) -> Result<Sample> {
    let opts = args.options();
    match &p.instance {
        Some(inst) => build_sample_for(&p.structure, inst, None, &opts),
        None => build_sample(&p.structure, args.d.unwrap_or(1), &opts),
    }
}

fn tuple_json(sample: &Sample, t: &[usize]) -> serde_json::Value {
    json!(t.iter().map(|&i| sample.structure.domain[i].to_string()).collect::<Vec<_>>())
}

fn parse_op(op: &str, k: usize, domain: &[Rational]) -> Result<FractionalOperation> {
    let kind = match op {
        "sub" => return FractionalOperation::sub(k, domain),
        "min" => Builtin::Min,
        "max" => Builtin::Max,
        "median" => Builtin::Median,
        "avg" => Builtin::Avg,
        s => match s.strip_prefix("kth:").and_then(|i| i.parse().ok()) {
            Some(i) => Builtin::KthSmallest(i),
            None => return Err(Error::Invalid(format!("unknown operation {op:?}"))),
        },
    };
    FractionalOperation::single(kind, k, domain)
}

fn execute(cmd: Command, out: &mut String) -> Result<i32> {
    match cmd {
        Command::Solve { file, threshold: t, sample, dump_lp, witness, pricing } => {
            let p = load(&file)?;
            let inst = p.instance()?;
            let inst = inst.with_threshold(Some(threshold(&t, inst)?));
            decide(&p.structure, &inst, &sample, pricing.into(), dump_lp, witness, out)
        }
        Command::Feas { file, sample, witness, pricing } => {
            let p = load(&file)?;
            let inst = p.instance()?.with_threshold(Some(Rational::zero()));
            decide(&p.structure.feasibility(), &inst, &sample, pricing.into(), false, witness, out)
        }
        Command::Sample { file, sample } => {
            let p = load(&file)?;
            let s = structure_sample(&p, &sample)?;
            let tables: BTreeMap<&String, serde_json::Value> = s
                .structure
                .tables
                .iter()
                .map(|(k, t)| (k, json!({"arity": t.arity(), "values": t.values().iter().map(|v| v.to_string()).collect::<Vec<_>>()})))
                .collect();
            let doc = json!({
                "eps": s.domain.eps.to_string(),
                "domain": s.structure.domain.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "tables": tables,
            });
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"));
            Ok(0)
        }
        Command::Blp { file, sample, dump_lp, pricing } => {
            let p = load(&file)?;
            let inst = p.instance()?;
            let s = build_sample_for(&p.structure, inst, None, &sample.options())?;
            if dump_lp {
                out.push_str(&build_blp(inst, &s.structure)?.lp.dump());
            }
            let b = solve_blp_with(inst, &s.structure, pricing.into())?;
            let _ = writeln!(out, "blp: {}", b.value);
            Ok(0)
        }
        Command::Oracle { file, threshold: t, infimum, max_selections } => {
            let p = load(&file)?;
            let inst = p.instance()?;
            let cap = max_selections as u128;
            let mut code = 0;
            if t.is_some() || inst.threshold.is_some() {
                let u = threshold(&t, inst)?;
                let d = q_decide(&p.structure, inst, &u, cap)?;
                let (c, word) = verdict(d.accept, "accept", "reject");
                code = c;
                let _ = writeln!(out, "{word}");
                if let Some(w) = d.witness {
                    let _ = writeln!(out, "witness: {}", format_assignment(inst, &w));
                }
            } else if !infimum {
                return Err(Error::Invalid("no threshold in the file and no --threshold".into()));
            }
            if infimum {
                let line = match q_infimum(&p.structure, inst, cap)? {
                    Infimum::Infeasible => "infimum: +inf (no finite assignment)".to_string(),
                    Infimum::MinusInfinity => "infimum: -inf".to_string(),
                    Infimum::Attained(v) => format!("infimum: {v} (attained)"),
                    Infimum::NotAttained(v) => format!("infimum: {v} (not attained)"),
                };
                let _ = writeln!(out, "{line}");
            }
            Ok(code)
        }
        Command::Check { what } => check(what, out),
    }
}

fn check(what: Check, out: &mut String) -> Result<i32> {
    match what {
        Check::Submodular { file, sample } => {
            let p = load(&file)?;
            let s = structure_sample(&p, &sample)?;
            for (name, t) in &s.structure.tables {
                if let Some((a, b)) = submodularity_witness(t) {
                    let _ = writeln!(out, "false");
                    let w = json!({"function": name, "a": tuple_json(&s, &a), "b": tuple_json(&s, &b)});
                    let _ = writeln!(out, "{w}");
                    return Ok(1);
                }
            }
            let _ = writeln!(out, "true");
            Ok(0)
        }
        Check::Increasing { file, sample } => {
            let p = load(&file)?;
            let s = structure_sample(&p, &sample)?;
            for (name, t) in &s.structure.tables {
                if let Some((a, b)) = increasing_witness(t) {
                    let _ = writeln!(out, "false");
                    let w = json!({"function": name, "lower": tuple_json(&s, &a), "higher": tuple_json(&s, &b)});
                    let _ = writeln!(out, "{w}");
                    return Ok(1);
                }
            }
            let _ = writeln!(out, "true");
            Ok(0)
        }
        Check::Improves { file, op, arity, sample } => {
            let p = load(&file)?;
            let s = structure_sample(&p, &sample)?;
            let omega = parse_op(&op, arity, &s.structure.domain)?;
            match structure_violation(&s.structure, &omega)? {
                None => {
                    let _ = writeln!(out, "true");
                    Ok(0)
                }
                Some((name, v)) => {
                    let _ = writeln!(out, "false");
                    let tuples: Vec<serde_json::Value> = v.tuples.iter().map(|t| tuple_json(&s, t)).collect();
                    let w = json!({"function": name, "tuples": tuples, "lhs": v.lhs.to_string(), "rhs": v.rhs.to_string()});
                    let _ = writeln!(out, "{w}");
                    Ok(1)
                }
            }
        }
        Check::FracHom { file, m, max_maps, sample } => {
            let p = load(&file)?;
            let s = structure_sample(&p, &sample)?;
            let (pm, dom) = multiset_structure(&s.structure, m, sample.max_tuples as u128)?;
            match fractional_homomorphism(&pm, &s.structure, max_maps as u128)? {
                None => {
                    let _ = writeln!(out, "false");
                    Ok(1)
                }
                Some(w) => {
                    let _ = writeln!(out, "true");
                    for (g, weight) in w {
                        let pairs: Vec<serde_json::Value> =
                            dom.iter().zip(&g).map(|(ms, &img)| json!([tuple_json(&s, ms), s.structure.domain[img].to_string()])).collect();
                        let _ = writeln!(out, "{}", json!({"weight": weight.to_string(), "map": pairs}));
                    }
                    Ok(0)
                }
            }
        }
    }
}
