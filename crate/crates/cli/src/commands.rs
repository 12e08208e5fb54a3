use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use wnn_core::compression::{encode, load_code, reconstruct, save_code};
use wnn_core::data::io::{load_table, write_condensed_csv, write_csv, Table};
use wnn_core::data::{evaluate, run_method, split, write_reports_csv, GeneratorSpec, Method, MethodConfig, SplitSpec};
use wnn_core::exact::build_nn_ip;
use wnn_core::navnet::brute_force_wnn;
use wnn_core::{
    consistency_check, exact_nn_condense, exact_wnn_condense, generalization_bound, CondensedSet, Dataset, Error,
    NavigatingNet, SolveStatus,
};

use crate::{BoundArgs, Command, CompressArgs, CondenseArgs, EvalArgs, ExactArgs, GenArgs, InputArgs, ReconstructArgs, Rule, SearchArgs};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;
pub const EXIT_ASSERTION: u8 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure::new(EXIT_USAGE, message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) => EXIT_IO,
            Error::InvalidParameter(_) => EXIT_USAGE,
            Error::VerificationFailed { .. } => EXIT_ASSERTION,
            _ => EXIT_DATA,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::new(EXIT_IO, e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

pub fn run(command: Command) -> CmdResult {
    match command {
        Command::Gen(a) => gen(a),
        Command::Condense(a) => condense(a),
        Command::Exact(a) => exact(a),
        Command::Eval(a) => eval(a),
        Command::Searchbench(a) => searchbench(a),
        Command::Compress(a) => compress(a),
        Command::Reconstruct(a) => reconstruct_cmd(a),
        Command::Bound(a) => bound(a),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn load(args: &InputArgs) -> Result<Table, Failure> {
    load_table(&args.input, &args.label_column, args.metric).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", args.input.display(), f.message);
        f
    })
}

fn print_json<T: Serialize>(value: &T) -> CmdResult {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn status_name(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::BudgetExhausted => "budget_exhausted",
    }
}

/// Budget exhaustion and failed consistency are reported after all output
/// has been written.
fn finish(status: SolveStatus, consistent: bool) -> CmdResult {
    if !consistent {
        return Err(Failure::new(EXIT_ASSERTION, "condensed set is not consistent with the sample"));
    }
    if status == SolveStatus::BudgetExhausted {
        return Err(Failure::new(EXIT_BUDGET, "node budget exhausted; wrote best solution found"));
    }
    Ok(())
}

fn gen(a: GenArgs) -> CmdResult {
    let spec = GeneratorSpec {
        family: a.family,
        n: a.n,
        gamma: a.gamma,
        seed: a.seed,
        classes: a.classes,
        spread: a.spread,
        noise: a.noise,
    };
    let ds = spec.generate()?;
    match &a.output {
        Some(path) => {
            write_csv(&ds, create(path)?)?;
            print_json(&json!({
                "family": spec.family,
                "points": ds.len(),
                "dim": ds.dim(),
                "classes": ds.classes().len(),
                "output": path,
            }))
        }
        None => Ok(write_csv(&ds, io::stdout().lock())?),
    }
}

fn condense(a: CondenseArgs) -> CmdResult {
    let ds = load(&a.input)?.dataset;
    let cfg = MethodConfig {
        seed: a.seed,
        node_budget: a.node_budget,
    };
    let out = run_method(&ds, a.method, cfg)?;
    write_condensed_csv(&ds, &out.set, create(&a.output)?)?;
    let consistent = consistency_check(&ds, &out.set).consistent;
    print_json(&json!({
        "method": a.method,
        "points": ds.len(),
        "condensed_size": out.set.len(),
        "compression_ratio": out.set.len() as f64 / ds.len() as f64,
        "consistent": consistent,
        "status": status_name(out.status),
        "output": a.output,
    }))?;
    finish(out.status, consistent)
}

fn exact(a: ExactArgs) -> CmdResult {
    if a.lp.is_some() && a.rule != Rule::Nn {
        return Err(Failure::usage("--lp is only available with --rule nn"));
    }
    let ds = load(&a.input)?.dataset;
    if let Some(path) = &a.lp {
        let mut w = create(path)?;
        w.write_all(build_nn_ip(&ds).to_lp().as_bytes())?;
        w.flush()?;
    }
    let sol = match a.rule {
        Rule::Nn => exact_nn_condense(&ds, a.node_budget)?,
        Rule::Wnn => exact_wnn_condense(&ds, a.node_budget)?,
    };
    write_condensed_csv(&ds, &sol.set, create(&a.output)?)?;
    let consistent = consistency_check(&ds, &sol.set).consistent;
    print_json(&json!({
        "rule": match a.rule { Rule::Nn => "nn", Rule::Wnn => "wnn" },
        "points": ds.len(),
        "condensed_size": sol.set.len(),
        "status": status_name(sol.status),
        "nodes": sol.nodes,
        "consistent": consistent,
        "output": a.output,
    }))?;
    finish(sol.status, consistent)
}

fn eval(a: EvalArgs) -> CmdResult {
    if a.reps == 0 {
        return Err(Failure::usage("--reps must be at least 1"));
    }
    if !(a.train_fraction > 0.0 && a.train_fraction < 1.0) {
        return Err(Failure::usage(format!(
            "--train-fraction must be in (0,1), got {}",
            a.train_fraction
        )));
    }
    let mut methods = a.methods.clone();
    methods.sort_by_key(|m| m.name());
    methods.dedup();
    let ds = load(&a.input)?.dataset;

    let jobs: Vec<(u64, Method)> = (0..a.reps)
        .flat_map(|r| methods.iter().map(move |&m| (a.seed + r, m)))
        .collect();
    let mut reports = jobs
        .par_iter()
        .map(|&(seed, method)| {
            let (train, test) = split(
                &ds,
                SplitSpec {
                    train_fraction: a.train_fraction,
                    seed,
                },
            )?;
            let cfg = MethodConfig {
                seed,
                node_budget: a.node_budget,
            };
            evaluate(&train, &test, method, cfg)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    reports.sort_by(|x, y| (x.seed, x.method.name()).cmp(&(y.seed, y.method.name())));

    match &a.output {
        Some(path) => {
            let mut w = create(path)?;
            write_reports_csv(&reports, a.timing, &mut w)?;
            w.flush()?;
        }
        None if !a.json => write_reports_csv(&reports, a.timing, io::stdout().lock())?,
        None => {}
    }
    if a.json {
        print_json(&reports)?;
    }
    if reports.iter().any(|r| !r.consistent) {
        return Err(Failure::new(EXIT_ASSERTION, "a condensed set was inconsistent with its training sample"));
    }
    if reports.iter().any(|r| r.status == SolveStatus::BudgetExhausted) {
        return Err(Failure::new(EXIT_BUDGET, "node budget exhausted in at least one run"));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SearchReport {
    points: usize,
    dim: usize,
    levels: usize,
    eps: f64,
    queries: usize,
    seed: u64,
    max_ratio: f64,
    mean_ratio: f64,
    bound: f64,
    violations: usize,
    mean_nodes_visited: f64,
    max_nodes_visited: usize,
    max_list_len: usize,
}

fn searchbench(a: SearchArgs) -> CmdResult {
    if !(a.eps > 0.0 && a.eps < 1.0) {
        return Err(Failure::usage(format!("--eps must be in (0,1), got {}", a.eps)));
    }
    if a.queries == 0 {
        return Err(Failure::usage("--queries must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let (points, weights, metric) = match (&a.input, a.uniform) {
        (Some(path), _) => {
            let input = InputArgs {
                input: path.clone(),
                label_column: a.label_column.clone(),
                metric: a.metric,
            };
            let table = load(&input)?;
            let n = table.dataset.len();
            let weights = table
                .weights
                .unwrap_or_else(|| (0..n).map(|_| rng.gen_range(0.5..=2.0)).collect());
            let points = table.dataset.into_points().into_iter().map(|p| p.coords().to_vec()).collect();
            (points, weights, a.metric)
        }
        (None, Some(n)) => {
            if n == 0 || a.dim == 0 {
                return Err(Failure::usage("--uniform and --dim must be positive"));
            }
            let points: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..a.dim).map(|_| rng.gen_range(0.0..1.0)).collect())
                .collect();
            let weights = (0..n).map(|_| rng.gen_range(0.5..=2.0)).collect();
            (points, weights, a.metric)
        }
        (None, None) => return Err(Failure::usage("one of --input or --uniform is required")),
    };

    // Queries are drawn from the bounding box grown by 10% on every side.
    let dim = points[0].len();
    let (lo, hi): (Vec<f64>, Vec<f64>) = (0..dim)
        .map(|k| {
            let min = points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
            let max = points.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
            let pad = if max > min { 0.1 * (max - min) } else { 1.0 };
            (min - pad, max + pad)
        })
        .unzip();
    let queries: Vec<Vec<f64>> = (0..a.queries)
        .map(|_| (0..dim).map(|k| rng.gen_range(lo[k]..hi[k])).collect())
        .collect();

    let net = NavigatingNet::build(points.clone(), weights.clone(), metric)?;
    let results = queries
        .par_iter()
        .map(|q| {
            let got = net.query(q, a.eps)?;
            let exact = brute_force_wnn(&points, &weights, q, metric);
            let ratio = if exact.wdist > 0.0 {
                got.wdist / exact.wdist
            } else if got.wdist == 0.0 {
                1.0
            } else {
                f64::INFINITY
            };
            Ok((ratio, got))
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let bound = 1.0 + 8.0 * a.eps;
    let report = SearchReport {
        points: points.len(),
        dim,
        levels: net.top() + 1,
        eps: a.eps,
        queries: a.queries,
        seed: a.seed,
        max_ratio: results.iter().map(|r| r.0).fold(0.0, f64::max),
        mean_ratio: results.iter().map(|r| r.0).sum::<f64>() / results.len() as f64,
        bound,
        violations: results.iter().filter(|r| r.0 > bound).count(),
        mean_nodes_visited: results.iter().map(|r| r.1.nodes_visited as f64).sum::<f64>() / results.len() as f64,
        max_nodes_visited: results.iter().map(|r| r.1.nodes_visited).max().unwrap_or(0),
        max_list_len: results.iter().map(|r| r.1.max_list_len).max().unwrap_or(0),
    };
    print_json(&report)?;
    if report.violations > 0 {
        return Err(Failure::new(
            EXIT_ASSERTION,
            format!("{} queries exceeded the 1+8*eps approximation bound", report.violations),
        ));
    }
    Ok(())
}

fn compress(a: CompressArgs) -> CmdResult {
    if !matches!(a.method, Method::GreedyWnn | Method::ExactWnn) {
        return Err(Failure::usage("compress needs a nearest-enemy weighted method: greedy-wnn or exact-wnn"));
    }
    let ds = load(&a.input)?.dataset;
    let out = run_method(
        &ds,
        a.method,
        MethodConfig {
            seed: 0,
            node_budget: a.node_budget,
        },
    )?;
    let code = encode(&ds, &out.set)?;
    save_code(&code, &a.output)?;
    let bound = generalization_bound(ds.len(), code.size(), 0.05, true).ok();
    print_json(&json!({
        "method": a.method,
        "points": ds.len(),
        "prototypes": code.prototypes.len(),
        "witnesses": code.witnesses.len(),
        "code_size": code.size(),
        "bound_delta_0.05": bound,
        "status": status_name(out.status),
        "output": a.output,
    }))?;
    finish(out.status, true)
}

fn reconstruct_cmd(a: ReconstructArgs) -> CmdResult {
    let code = load_code(&a.code, a.metric)?;
    let clf = reconstruct(&code)?;
    let protos = Dataset::new(clf.prototypes().to_vec(), a.metric)?;
    let set = CondensedSet::new(&protos, (0..protos.len()).collect(), clf.weights().to_vec())?;
    write_condensed_csv(&protos, &set, create(&a.output)?)?;
    let sample_error = match &a.check {
        Some(path) => {
            let input = InputArgs {
                input: path.clone(),
                label_column: a.label_column.clone(),
                metric: a.metric,
            };
            Some(clf.error_rate(&load(&input)?.dataset))
        }
        None => None,
    };
    print_json(&json!({
        "prototypes": code.prototypes.len(),
        "witnesses": code.witnesses.len(),
        "sample_error": sample_error,
        "output": a.output,
    }))
}

fn bound(a: BoundArgs) -> CmdResult {
    let value = generalization_bound(a.n, a.m, a.delta, a.permutation_invariant)?;
    print_json(&json!({
        "n": a.n,
        "m": a.m,
        "delta": a.delta,
        "permutation_invariant": a.permutation_invariant,
        "bound": value,
    }))
}
