//! Command-line front end: generate, reduce, solve, verify and bench over JSON files.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::arith::{format_rational, parse_rational};
use crate::bits::Bits;
use crate::error::PotlineError;
use crate::generators::{
    gen_affine, gen_lcp, gen_line_table, gen_opdc_table, gen_uso_table, GenKind, GenSpec,
};
use crate::problems::opdc::parse_point;
use crate::problems::{
    explain_contraction, explain_lcp, explain_line, explain_opdc, explain_uso, Certificate, ContractionFile, Family,
    Flavor, LcpInstance, LineFile, OpdcFile, UsoFile, Verdict,
};
use crate::reductions::chain::{parse_chain, Chain, Instance, Node};
use crate::reductions::opdc::instance_kappa;
use crate::solvers::brute::{brute_line, brute_lcp, brute_opdc, brute_uso, budget_from_env};
use crate::solvers::fixpoint::{approx_find_fp, find_fp, residual_power, EpsSchedule};
use crate::solvers::lemke::lemke;
use crate::solvers::walk::{aldous, default_max_steps, follow_line};

#[derive(Debug, Parser)]
#[command(name = "potline", version, about = "Exact solvers and reductions for P-LCP, USO, contraction and potential-line problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded instance as JSON.
    Generate(GenerateArgs),
    /// Compose reductions and query the resulting instance.
    Reduce(ReduceArgs),
    /// Solve an instance and print a verified run record.
    Solve(SolveArgs),
    /// Check a certificate against an instance.
    Verify(VerifyArgs),
    /// Generate and solve many seeded instances in parallel.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    /// Dimension, or number of vertices for line kinds.
    #[arg(long)]
    pub size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub flavor: Option<String>,
    /// Comma-separated potential gaps of an explicit line.
    #[arg(long, value_delimiter = ',')]
    pub gaps: Option<Vec<u64>>,
    #[arg(long)]
    pub lines: Option<usize>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub factor: Option<String>,
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub planted: Option<i64>,
    #[arg(long)]
    pub broken: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    pub file: PathBuf,
    /// Colon-separated problems, e.g. `plcp:uso:opdc`.
    #[arg(long)]
    pub chain: String,
    /// `S <bits>`, `P <bits>`, `V <bits>`, `O <bits>` or `D <i> <point>`.
    #[arg(long, num_args = 2..=3, value_names = ["OP", "ARG"])]
    pub query: Option<Vec<String>>,
}

#[derive(Debug, Args, Clone)]
pub struct SolveArgs {
    pub file: PathBuf,
    /// plcp, uso, contraction, opdc, line, or a line flavor.
    #[arg(long)]
    pub problem: String,
    /// lemke, brute, follow, aldous, find_fp or approx.
    #[arg(long)]
    pub algo: Option<String>,
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long, default_value_t = 64)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// Omit the elapsed time so that records are reproducible byte for byte.
    #[arg(long)]
    pub no_timing: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub instance: PathBuf,
    /// A certificate, or a run record containing one.
    pub cert: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long)]
    pub size: usize,
    #[arg(long, default_value_t = 10)]
    pub count: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub algo: Option<String>,
    #[arg(long)]
    pub broken: bool,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Counters {
    pub steps: u64,
    pub pivots: u64,
    pub oracle_calls: u64,
}

/// Output of `solve`: the certificate has passed the matching verifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunRecord {
    pub command: Vec<String>,
    pub instance_digest: String,
    pub problem: String,
    pub algorithm: String,
    pub certificate: Certificate,
    pub counters: Counters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, String>,
}

/// Exit status of a command: 0 on success, 1 when `verify` rejects.
pub type Status = i32;

pub fn run(cli: Cli, argv: &[String]) -> Result<Status, PotlineError> {
    match cli.command {
        Command::Generate(a) => cmd_generate(&a).map(|_| 0),
        Command::Reduce(a) => {
            let out = cmd_reduce(&a)?;
            println!("{out}");
            Ok(0)
        }
        Command::Solve(a) => {
            let rec = cmd_solve(&a, argv)?;
            emit(&serde_json::to_string_pretty(&rec)?, a.output.as_deref())?;
            Ok(0)
        }
        Command::Verify(a) => {
            let v = cmd_verify(&a.instance, &a.cert)?;
            match v {
                Verdict::Accept => {
                    println!("accept");
                    Ok(0)
                }
                Verdict::Reject(why) => {
                    println!("reject: {why}");
                    Ok(1)
                }
            }
        }
        Command::Bench(a) => {
            let out = cmd_bench(&a)?;
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(0)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), PotlineError> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n"))?,
        None => {
            let mut so = std::io::stdout().lock();
            writeln!(so, "{text}")?;
        }
    }
    Ok(())
}

pub fn parse_flavor(s: &str) -> Result<Flavor, PotlineError> {
    serde_json::from_value(Value::String(s.to_ascii_lowercase()))
        .map_err(|_| PotlineError::Parse(format!("unknown line flavor {s:?}")))
}

fn spec_of(a: &GenerateArgs) -> Result<GenSpec, PotlineError> {
    Ok(GenSpec {
        kind: a.kind,
        size: a.size,
        seed: a.seed,
        flavor: a.flavor.as_deref().map(parse_flavor).transpose()?,
        gaps: a.gaps.clone(),
        lines: a.lines,
        width: a.width,
        factor: a.factor.clone(),
        p: a.p,
        planted: a.planted,
        broken: a.broken,
    })
}

/// Generated instance as file JSON, together with its problem name.
pub fn generate_json(spec: &GenSpec) -> Result<(String, Value), PotlineError> {
    Ok(match spec.kind {
        GenKind::PMatrixLcp | GenKind::NonPMatrixLcp => ("plcp".into(), serde_json::to_value(gen_lcp(spec)?)?),
        GenKind::Uso | GenKind::BrokenUso => {
            ("uso".into(), serde_json::to_value(UsoFile::from_table(&gen_uso_table(spec)?))?)
        }
        GenKind::ContractionCircuit => {
            let inst = gen_affine(spec)?.instance()?;
            let file = ContractionFile::from_instance(&inst).expect("circuit instance");
            ("contraction".into(), serde_json::to_value(file)?)
        }
        GenKind::ExplicitLine | GenKind::MultiLine => {
            let (flavor, t) = gen_line_table(spec)?;
            (flavor.to_string(), serde_json::to_value(LineFile::from_table(flavor, &t))?)
        }
        GenKind::OpdcGrid => {
            let inst = gen_opdc_table(spec)?.into_instance();
            ("opdc".into(), serde_json::to_value(OpdcFile::from_instance(&inst))?)
        }
    })
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<(), PotlineError> {
    let (_, v) = generate_json(&spec_of(a)?)?;
    emit(&serde_json::to_string_pretty(&v)?, a.output.as_deref())
}

fn parse_lcp(v: Value) -> Result<LcpInstance, PotlineError> {
    let l: LcpInstance = serde_json::from_value(v)?;
    LcpInstance::new(l.m, l.q)
}

/// Parses file JSON as the named problem: a chain node name, or `line` for any flavor.
pub fn parse_instance(problem: &str, v: Value) -> Result<Instance, PotlineError> {
    if problem.eq_ignore_ascii_case("line") {
        let f: LineFile = serde_json::from_value(v)?;
        return Ok(Instance::Line(f.to_instance()?));
    }
    let node: Node = problem.parse().map_err(|_| PotlineError::Parse(format!("unknown problem {problem:?}")))?;
    Ok(match node {
        Node::Plcp => Instance::Lcp(parse_lcp(v)?),
        Node::Uso => Instance::Uso(serde_json::from_value::<UsoFile>(v)?.to_table()?.into_instance()),
        Node::Contraction => Instance::Contraction(serde_json::from_value::<ContractionFile>(v)?.to_instance()?),
        Node::Opdc => Instance::Opdc(serde_json::from_value::<OpdcFile>(v)?.to_table()?.into_instance()),
        line => {
            let f: LineFile = serde_json::from_value(v)?;
            let want = line.flavor().expect("line node");
            if f.flavor != want {
                return Err(PotlineError::Parse(format!("file holds a {} line, expected {want}", f.flavor)));
            }
            Instance::Line(f.to_instance()?)
        }
    })
}

fn read_json(path: &Path) -> Result<(Vec<u8>, Value), PotlineError> {
    let bytes = std::fs::read(path).map_err(|e| PotlineError::Io(format!("{}: {e}", path.display())))?;
    let v = serde_json::from_slice(&bytes)?;
    Ok((bytes, v))
}

pub fn digest(bytes: &[u8]) -> String {
    let h = Sha256::digest(bytes);
    h.iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_bits(s: &str) -> Result<Bits, PotlineError> {
    s.parse::<Bits>().map_err(|e| PotlineError::Parse(e.to_string()))
}

pub fn cmd_reduce(a: &ReduceArgs) -> Result<String, PotlineError> {
    let nodes = parse_chain(&a.chain)?;
    let (_, v) = read_json(&a.file)?;
    let src = parse_instance(&nodes[0].to_string(), v)?;
    let chain = match Chain::build(&nodes, src) {
        Ok(c) => c,
        Err(PotlineError::TrivialInstance(c)) => {
            return Ok(serde_json::to_string_pretty(&serde_json::json!({ "trivial": c }))?);
        }
        Err(e) => return Err(e),
    };
    match &a.query {
        Some(q) => query(chain.target(), q),
        None => Ok(serde_json::to_string_pretty(&describe(&a.chain, chain.target()))?),
    }
}

fn describe(chain: &str, inst: &Instance) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("chain".into(), Value::from(chain));
    m.insert("target".into(), Value::from(inst.node().map_or("line".to_string(), |n| n.to_string())));
    match inst {
        Instance::Lcp(l) => {
            m.insert("d".into(), Value::from(l.d()));
        }
        Instance::Uso(u) => {
            m.insert("n".into(), Value::from(u.n()));
        }
        Instance::Contraction(c) => {
            m.insert("d".into(), Value::from(c.d()));
        }
        Instance::Opdc(o) => {
            m.insert("d".into(), Value::from(o.d()));
            m.insert("widths".into(), Value::from(o.widths().iter().map(|w| w.to_string()).collect::<Vec<_>>()));
        }
        Instance::Line(l) => {
            m.insert("flavor".into(), Value::from(l.flavor.to_string()));
            m.insert("n".into(), Value::from(l.n()));
            m.insert("m".into(), Value::from(l.m()));
        }
    }
    Value::Object(m)
}

/// Evaluates one oracle call on `inst`.
pub fn query(inst: &Instance, q: &[String]) -> Result<String, PotlineError> {
    let op = q[0].to_ascii_uppercase();
    let bad = || PotlineError::Parse(format!("query {} does not apply to this instance", q.join(" ")));
    let width = |x: &Bits, n: usize| {
        if x.len() == n {
            Ok(())
        } else {
            Err(PotlineError::Dimension(format!("{x} has width {} not {n}", x.len())))
        }
    };
    match (op.as_str(), inst) {
        ("S" | "P" | "V", Instance::Line(l)) if q.len() == 2 => {
            let x = parse_bits(&q[1])?;
            width(&x, l.n())?;
            Ok(match op.as_str() {
                "S" => l.s(&x).to_string(),
                "P" => l.try_p(&x).ok_or_else(bad)?.to_string(),
                _ => l.v(&x).to_string(),
            })
        }
        ("O", Instance::Uso(u)) if q.len() == 2 => {
            let x = parse_bits(&q[1])?;
            width(&x, u.n())?;
            Ok(u.orient(&x).map_or("-".to_string(), |o| o.to_string()))
        }
        ("D", Instance::Opdc(o)) if q.len() == 3 => {
            let i: usize = q[1].parse().map_err(|_| PotlineError::Parse(format!("bad dimension {}", q[1])))?;
            if i == 0 || i > o.d() {
                return Err(PotlineError::Dimension(format!("dimension {i} outside 1..={}", o.d())));
            }
            let p = parse_point(&q[2])?;
            o.check_grid(&p)?;
            Ok(o.dir(i, &p).to_string())
        }
        _ => Err(bad()),
    }
}

pub fn default_algo(inst: &Instance) -> &'static str {
    match inst {
        Instance::Lcp(_) => "lemke",
        Instance::Uso(_) | Instance::Opdc(_) => "brute",
        Instance::Contraction(_) => "find_fp",
        Instance::Line(_) => "follow",
    }
}

fn pick(certs: Vec<Certificate>) -> Result<Certificate, PotlineError> {
    let first_solution = certs.iter().position(Certificate::is_solution);
    let i = first_solution.unwrap_or(0);
    certs.into_iter().nth(i).ok_or_else(|| PotlineError::UnmappableCert("no certificate found".into()))
}

/// Solver output before verification.
pub struct Solved {
    pub cert: Certificate,
    pub counters: Counters,
    pub details: BTreeMap<String, String>,
}

fn follow_through(inst: &Instance, chain: &str, max_steps: Option<u64>) -> Result<Solved, PotlineError> {
    let nodes = parse_chain(chain)?;
    let c = match Chain::build(&nodes, inst.clone()) {
        Ok(c) => c,
        Err(PotlineError::TrivialInstance(cert)) => {
            return Ok(Solved { cert: *cert, counters: Counters::default(), details: BTreeMap::new() })
        }
        Err(e) => return Err(e),
    };
    let Instance::Line(l) = c.target() else { unreachable!("chain ends in a line") };
    let w = follow_line(l, &l.zero(), max_steps.unwrap_or_else(|| default_max_steps(l)))?;
    let cert = c.map_back(&w.cert)?;
    let counters = Counters { steps: w.steps, pivots: 0, oracle_calls: l.oracle_calls() };
    Ok(Solved { cert, counters, details: BTreeMap::new() })
}

/// Runs `algo` on `inst`.
pub fn solve_instance(inst: &mut Instance, algo: &str, opts: &SolveArgs) -> Result<Solved, PotlineError> {
    let mut details = BTreeMap::new();
    let budget = budget_from_env();
    let plain = |cert, steps| Solved { cert, counters: Counters { steps, ..Counters::default() }, details: BTreeMap::new() };
    let solved = match (algo, &mut *inst) {
        ("lemke", Instance::Lcp(l)) => {
            let run = lemke(l);
            Solved { cert: run.cert, counters: Counters { steps: run.pivots, pivots: run.pivots, oracle_calls: 0 }, details }
        }
        ("brute", Instance::Lcp(l)) => plain(pick(brute_lcp(l, budget)?)?, 0),
        ("brute", Instance::Uso(u)) => plain(pick(brute_uso(u, budget)?)?, 0),
        ("brute", Instance::Opdc(o)) => plain(pick(brute_opdc(o, budget)?)?, 0),
        ("brute", Instance::Line(l)) => plain(pick(brute_line(l, budget)?)?, 0),
        ("follow", Instance::Uso(_)) => follow_through(inst, "uso:opdc:ufeopl", opts.max_steps)?,
        ("follow", Instance::Opdc(_)) => follow_through(inst, "opdc:ufeopl", opts.max_steps)?,
        ("follow", Instance::Line(l)) => {
            let w = follow_line(l, &l.zero(), opts.max_steps.unwrap_or_else(|| default_max_steps(l)))?;
            plain(w.cert, w.steps)
        }
        ("aldous", Instance::Line(l)) => {
            let w = aldous(l, opts.samples, opts.seed, opts.max_steps.unwrap_or_else(|| default_max_steps(l)))?;
            plain(w.cert, w.steps)
        }
        ("find_fp", Instance::Contraction(c)) => {
            if let Some(p) = opts.p {
                c.p = p;
            }
            let kappa = instance_kappa(c)?;
            let (cert, stats) = find_fp(c, &kappa)?;
            details.insert("kappa".into(), format!("{kappa:?}"));
            Solved { cert, counters: Counters { steps: stats.slices, pivots: 0, oracle_calls: stats.evaluations }, details }
        }
        ("approx", Instance::Contraction(c)) => {
            if let Some(p) = opts.p {
                c.p = p;
            }
            let eps = match (&opts.eps, &c.eps) {
                (Some(e), _) => parse_rational(e)?,
                (None, Some(e)) => e.clone(),
                (None, None) => return Err(PotlineError::Parse("approx needs --eps".into())),
            };
            c.eps = Some(eps.clone());
            let sched = EpsSchedule::new(eps.clone(), c.p, c.d());
            let (cert, stats) = approx_find_fp(c, &sched)?;
            if let Certificate::ApproxFix { x } = &cert {
                details.insert("residualPower".into(), format_rational(&residual_power(c, x)));
                details.insert("epsPower".into(), format_rational(&num::pow(eps, c.p as usize)));
            }
            Solved { cert, counters: Counters { steps: stats.slices, pivots: 0, oracle_calls: stats.evaluations }, details }
        }
        (a, i) => {
            return Err(PotlineError::Parse(format!(
                "algorithm {a:?} does not apply to {}",
                i.node().map_or("this instance".to_string(), |n| n.to_string())
            )))
        }
    };
    Ok(solved)
}

pub fn cmd_solve(a: &SolveArgs, argv: &[String]) -> Result<RunRecord, PotlineError> {
    let (bytes, v) = read_json(&a.file)?;
    let mut inst = parse_instance(&a.problem, v)?;
    let algo = a.algo.clone().unwrap_or_else(|| default_algo(&inst).to_string());
    let start = Instant::now();
    let mut solved = solve_instance(&mut inst, &algo, a)?;
    let elapsed = start.elapsed();
    check(&inst, &solved.cert)?;
    if solved.counters.oracle_calls == 0 {
        solved.counters.oracle_calls = inst.oracle_calls();
    }
    Ok(RunRecord {
        command: argv.to_vec(),
        instance_digest: digest(&bytes),
        problem: a.problem.clone(),
        algorithm: algo,
        certificate: solved.cert,
        counters: solved.counters,
        elapsed_ms: (!a.no_timing).then(|| elapsed.as_secs_f64() * 1000.0),
        seed: a.seed,
        details: solved.details,
    })
}

fn check(inst: &Instance, cert: &Certificate) -> Result<(), PotlineError> {
    match explain(inst, cert)? {
        Verdict::Accept => Ok(()),
        Verdict::Reject(why) => Err(PotlineError::UnmappableCert(format!("solver output {} rejected: {why}", cert.kind()))),
    }
}

pub fn explain(inst: &Instance, cert: &Certificate) -> Result<Verdict, PotlineError> {
    match inst {
        Instance::Lcp(i) => explain_lcp(i, cert),
        Instance::Uso(i) => explain_uso(i, cert),
        Instance::Contraction(i) => explain_contraction(i, cert),
        Instance::Opdc(i) => explain_opdc(i, cert),
        Instance::Line(i) => explain_line(i, cert),
    }
}

pub fn cmd_verify(instance: &Path, cert: &Path) -> Result<Verdict, PotlineError> {
    let (_, cv) = read_json(cert)?;
    let cv = match cv {
        Value::Object(mut m) if m.contains_key("certificate") => m.remove("certificate").expect("present"),
        other => other,
    };
    let cert: Certificate = serde_json::from_value(cv)?;
    let (_, iv) = read_json(instance)?;
    let problem = match cert.family() {
        Family::Line => "line",
        Family::Opdc => "opdc",
        Family::Uso => "uso",
        Family::Lcp => "plcp",
        Family::Contraction => "contraction",
    };
    let inst = parse_instance(problem, iv)?;
    explain(&inst, &cert)
}

/// One row of a benchmark.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchRow {
    pub seed: u64,
    pub instance_digest: String,
    pub kind: String,
    pub counters: Counters,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchReport {
    pub kind: GenKind,
    pub size: usize,
    pub algorithm: String,
    pub rows: Vec<BenchRow>,
    pub total_ms: f64,
}

pub fn cmd_bench(a: &BenchArgs) -> Result<BenchReport, PotlineError> {
    let run = || -> Result<Vec<BenchRow>, PotlineError> {
        (0..a.count)
            .into_par_iter()
            .map(|i| {
                let mut spec = GenSpec::new(a.kind, a.size, a.seed.wrapping_add(i));
                spec.broken = a.broken;
                let (problem, v) = generate_json(&spec)?;
                let bytes = serde_json::to_vec(&v)?;
                let mut inst = parse_instance(if problem.parse::<Node>().is_ok() { &problem } else { "line" }, v)?;
                let algo = a.algo.clone().unwrap_or_else(|| default_algo(&inst).to_string());
                let opts = SolveArgs {
                    file: PathBuf::new(),
                    problem,
                    algo: Some(algo.clone()),
                    p: None,
                    eps: None,
                    samples: 64,
                    seed: spec.seed,
                    max_steps: None,
                    no_timing: false,
                    output: None,
                };
                let t = Instant::now();
                let solved = solve_instance(&mut inst, &algo, &opts)?;
                let elapsed_ms = t.elapsed().as_secs_f64() * 1000.0;
                check(&inst, &solved.cert)?;
                Ok(BenchRow {
                    seed: spec.seed,
                    instance_digest: digest(&bytes),
                    kind: solved.cert.kind().to_string(),
                    counters: solved.counters,
                    elapsed_ms,
                })
            })
            .collect()
    };
    let t = Instant::now();
    let rows = match a.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| PotlineError::Io(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    let algorithm = a.algo.clone().unwrap_or_else(|| "default".into());
    Ok(BenchReport { kind: a.kind, size: a.size, algorithm, rows, total_ms: t.elapsed().as_secs_f64() * 1000.0 })
}

/// Process entry point: parses `argv`, runs the command and maps errors to exit status 2.
pub fn main_with(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut echo = argv.clone();
    if let Some(first) = echo.first_mut() {
        *first = "potline".into();
    }
    match run(cli, &echo) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
