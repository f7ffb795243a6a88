//! The `fmp` command line.
//!
//! Exit codes: `fmp fmp` returns 0 for YES and 1 for NO; `fmp solve`
//! returns 10 for SAT and 20 for UNSAT; every other success is 0 and
//! every error is 2. Results go to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use fmp_core::encode::Method;
use fmp_core::explain::{
    enumerate_axps_bruteforce, enumerate_cxps_bruteforce, find_axp, find_cxp, SddClassifier, SddExplainer,
};
use fmp_core::fmp::{decide_membership_timed, FmpAnswer, FmpError, FmpOutcome, FmpQuery, InternalBackend, Route};
use fmp_core::gen::{self, generate_random_classifier, ClassifierKind, RandomClassifier};
use fmp_core::sat::{solve_interruptible, SatResult, SolveError};
use fmp_core::xpg::{GraphClassifier, XpGraph};
use fmp_core::FeatureSet;

use crate::batch::{self, BatchConfig, BatchItem, BenchClassifier, BenchSpec};
use crate::external::ExternalSolver;
use crate::format;

#[derive(Debug, Parser)]
#[command(name = "fmp", version, about = "Feature membership in abductive explanations of decision-diagram classifiers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Default, Args)]
struct Inputs {
    /// SDD classifier (needs --vtree and --instance).
    #[arg(long)]
    sdd: Option<PathBuf>,
    #[arg(long)]
    vtree: Option<PathBuf>,
    /// OBDD classifier (needs --instance).
    #[arg(long)]
    obdd: Option<PathBuf>,
    /// Decision tree classifier (needs --instance).
    #[arg(long)]
    dt: Option<PathBuf>,
    /// Explanation graph, already specialized to an instance.
    #[arg(long)]
    xpg: Option<PathBuf>,
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Feature names, one per line, for display on stderr.
    #[arg(long)]
    names: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Obdd,
    Sdd,
}

impl From<KindArg> for ClassifierKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Obdd => ClassifierKind::Obdd,
            KindArg::Sdd => ClassifierKind::ShannonSdd,
        }
    }
}

#[derive(Debug, Clone)]
enum BackendArg {
    Internal,
    External(String),
}

fn parse_backend(s: &str) -> Result<BackendArg, String> {
    match s.split_once(':') {
        None if s == "internal" => Ok(BackendArg::Internal),
        Some(("external", cmd)) if !cmd.trim().is_empty() => Ok(BackendArg::External(cmd.to_owned())),
        _ => Err(format!("expected `internal` or `external:<command>`, got `{s}`")),
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: fmp_core::encode::UnknownMethod| e.to_string())
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Decide whether the target feature occurs in some AXp.
    Fmp {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        target: usize,
        #[arg(long, default_value = "two-step", value_parser = parse_method)]
        method: Method,
        #[arg(long, default_value = "internal", value_parser = parse_backend)]
        backend: BackendArg,
        #[arg(long)]
        time_limit_s: Option<f64>,
    },
    /// Print one AXp, by deletion from all features.
    Axp {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Print one CXp, by deletion from all features.
    Cxp {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Write the membership encoding as DIMACS.
    Encode {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        target: usize,
        #[arg(long, default_value = "two-step", value_parser = parse_method)]
        method: Method,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List all AXps and CXps by brute force (at most 16 features).
    Enum {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Run query batches and write a CSV report.
    Bench {
        /// Benchmark this classifier instead of generated ones.
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum, default_value = "obdd")]
        kind: KindArg,
        #[arg(long, default_value_t = 10)]
        m: usize,
        /// Node budget of each generated diagram.
        #[arg(long, default_value_t = 40)]
        nodes: usize,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long, default_value_t = 100)]
        queries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        time_limit_s: Option<f64>,
        /// Only this method; both by default.
        #[arg(long, value_parser = parse_method)]
        method: Option<Method>,
        #[arg(long, default_value = "internal", value_parser = parse_backend)]
        backend: BackendArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print `-` in the time columns.
        #[arg(long)]
        omit_times: bool,
    },
    /// Write a random classifier and a random instance for it.
    Generate {
        #[arg(long, value_enum, default_value = "obdd")]
        kind: KindArg,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Path prefix; extensions are appended.
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a DIMACS file, printing competition-format output.
    Solve {
        file: PathBuf,
        #[arg(long, default_value = "internal", value_parser = parse_backend)]
        backend: BackendArg,
    },
}

/// A usage problem: reported with the usage line, exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn in_file<T>(path: &Path, r: Result<T, format::FormatError>) -> Result<T> {
    r.with_context(|| format!("in {}", path.display()))
}

/// A classifier bound to its instance.
enum Loaded {
    Sdd(SddClassifier, fmp_core::Instance),
    Xpg(XpGraph),
}

impl Loaded {
    fn with_route<T>(&self, f: impl FnOnce(Route<'_>, bool) -> Result<T>) -> Result<T> {
        match self {
            Loaded::Sdd(clf, inst) => {
                let e: SddExplainer<'_> = clf.explainer(inst)?;
                f(Route::Sdd(&e), e.uses_negation())
            }
            Loaded::Xpg(x) => f(Route::Xpg(x), false),
        }
    }
}

impl Inputs {
    fn group_count(&self) -> usize {
        [&self.sdd, &self.obdd, &self.dt, &self.xpg].iter().filter(|p| p.is_some()).count()
    }

    fn check(&self) -> Result<()> {
        if self.group_count() != 1 {
            return Err(usage("give exactly one of --sdd, --obdd, --dt, --xpg"));
        }
        if self.sdd.is_some() != self.vtree.is_some() {
            return Err(usage("--sdd and --vtree go together"));
        }
        if self.xpg.is_none() && self.instance.is_none() {
            return Err(usage("--instance is required unless --xpg is given"));
        }
        Ok(())
    }

    fn classifier(&self) -> Result<BenchClassifier> {
        if let (Some(sdd), Some(vtree)) = (&self.sdd, &self.vtree) {
            let v = in_file(vtree, format::parse_vtree(&read(vtree)?))?;
            let s = in_file(sdd, format::parse_sdd(&read(sdd)?, &v))?;
            return Ok(BenchClassifier::Sdd(SddClassifier::new(s)));
        }
        if let Some(p) = &self.obdd {
            return Ok(BenchClassifier::Graph(GraphClassifier::Obdd(in_file(p, format::parse_obdd(&read(p)?))?)));
        }
        if let Some(p) = &self.dt {
            return Ok(BenchClassifier::Graph(GraphClassifier::DecisionTree(in_file(
                p,
                format::parse_dt(&read(p)?),
            )?)));
        }
        let p = self.xpg.as_ref().expect("checked: one group is present");
        let x = in_file(p, format::parse_xpg(&read(p)?))?;
        if !x.has_zero_terminal() {
            bail!("classifier is constant: the graph has no terminal labeled 0");
        }
        Ok(BenchClassifier::Xpg(x))
    }

    fn load(&self) -> Result<Loaded> {
        self.check()?;
        let clf = self.classifier()?;
        let instance = match &self.instance {
            Some(p) => Some(in_file(p, format::parse_instance(&read(p)?))?),
            None => None,
        };
        Ok(match (clf, instance) {
            (BenchClassifier::Sdd(c), Some(i)) => {
                c.explainer(&i)?;
                Loaded::Sdd(c, i)
            }
            (BenchClassifier::Graph(g), Some(i)) => Loaded::Xpg(g.build_xpg(&i)?),
            (BenchClassifier::Xpg(x), _) => Loaded::Xpg(x),
            _ => unreachable!("instance presence checked"),
        })
    }

    fn names(&self) -> Result<Option<Vec<String>>> {
        self.names
            .as_ref()
            .map(|p| Ok(read(p)?.lines().map(|l| l.trim().to_owned()).collect()))
            .transpose()
    }
}

fn named(set: &FeatureSet, names: &[String]) -> String {
    set.iter()
        .map(|i| names.get(i - 1).cloned().unwrap_or_else(|| i.to_string()))
        .collect::<Vec<_>>()
        .join(",")
}

fn seconds(s: Option<f64>) -> Result<Option<Duration>> {
    s.map(|s| Duration::try_from_secs_f64(s).map_err(|_| usage(format!("bad time limit {s}"))))
        .transpose()
}

fn write_out(path: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn backend(arg: &BackendArg) -> Result<batch::Backend> {
    Ok(match arg {
        BackendArg::Internal => batch::Backend::Internal,
        BackendArg::External(cmd) => batch::Backend::External(ExternalSolver::new(cmd)?),
    })
}

fn cmd_fmp(
    inputs: &Inputs,
    target: usize,
    method: Method,
    backend_arg: &BackendArg,
    limit: Option<Duration>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let loaded = inputs.load()?;
    let names = inputs.names()?;
    let start = Instant::now();
    let clock = move || start.elapsed();
    let query = FmpQuery { target, method };
    let (outcome, negated): (FmpOutcome, bool) = loaded.with_route(|route, negated| {
        let outcome = match backend(backend_arg)? {
            batch::Backend::Internal => {
                let deadline = limit.map(|d| start + d);
                let mut b = InternalBackend::with_stop(move || deadline.is_some_and(|d| Instant::now() >= d));
                match decide_membership_timed(route, query, &mut b, &clock) {
                    Err(FmpError::Backend(SolveError::Interrupted)) => bail!("time limit exceeded"),
                    r => r?,
                }
            }
            batch::Backend::External(mut s) => {
                decide_membership_timed(route, query, &mut s, &clock).map_err(|e| anyhow!("{e}"))?
            }
        };
        Ok((outcome, negated))
    })?;
    let code = match &outcome.answer {
        FmpAnswer::Yes { witness } => {
            writeln!(out, "YES witness={witness}")?;
            if let Some(n) = &names {
                writeln!(err, "witness names: {}", named(witness, n))?;
            }
            0
        }
        FmpAnswer::No => {
            writeln!(out, "NO")?;
            1
        }
    };
    let s = &outcome.stats;
    writeln!(
        err,
        "method={method} vars={} clauses={} encode_s={:.6} solve_s={:.6} total_s={:.6}",
        s.vars,
        s.clauses,
        s.encode_time.as_secs_f64(),
        s.solve_time.as_secs_f64(),
        s.total_time.as_secs_f64()
    )?;
    if let Some(seed) = &s.seed {
        writeln!(err, "seed={seed}")?;
    }
    if negated {
        writeln!(err, "note: instance predicted 1, encoded on the negated diagram")?;
    }
    Ok(code)
}

fn cmd_explain(inputs: &Inputs, axp: bool, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let loaded = inputs.load()?;
    let names = inputs.names()?;
    let set = loaded.with_route(|route, _| {
        let all = FeatureSet::full(route.num_features());
        Ok(if axp { find_axp(&route, &all)? } else { find_cxp(&route, &all)? })
    })?;
    writeln!(out, "{} {set}", if axp { "AXP" } else { "CXP" })?;
    if let Some(n) = &names {
        writeln!(err, "names: {}", named(&set, n))?;
    }
    Ok(0)
}

fn cmd_enum(inputs: &Inputs, out: &mut dyn Write) -> Result<i32> {
    let loaded = inputs.load()?;
    let (axps, cxps) = loaded.with_route(|route, _| {
        Ok((enumerate_axps_bruteforce(&route)?, enumerate_cxps_bruteforce(&route)?))
    })?;
    let show = |sets: &[FeatureSet]| sets.iter().map(|s| format!(" {{{s}}}")).collect::<String>();
    writeln!(out, "AXPS:{}", show(&axps))?;
    writeln!(out, "CXPS:{}", show(&cxps))?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    inputs: &Inputs,
    spec: BenchSpec,
    workers: usize,
    limit: Option<Duration>,
    method: Option<Method>,
    backend_arg: &BackendArg,
    out_path: &Option<PathBuf>,
    omit_times: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let items = if inputs.group_count() == 0 {
        if inputs.vtree.is_some() || inputs.instance.is_some() {
            return Err(usage("--vtree and --instance need a classifier input"));
        }
        batch::generate_items(&spec)?
    } else {
        if inputs.sdd.is_some() != inputs.vtree.is_some() || inputs.group_count() != 1 {
            return Err(usage("give exactly one classifier input; --sdd needs --vtree"));
        }
        let classifier = inputs.classifier()?;
        if let BenchClassifier::Sdd(c) = &classifier {
            if c.is_constant() {
                bail!("classifier is constant");
            }
        }
        if let BenchClassifier::Graph(g) = &classifier {
            if matches!(g, GraphClassifier::Obdd(o) if o.is_constant())
                || matches!(g, GraphClassifier::DecisionTree(t) if t.is_constant())
            {
                bail!("classifier is constant");
            }
        }
        let path = [&inputs.sdd, &inputs.obdd, &inputs.dt, &inputs.xpg]
            .into_iter()
            .flatten()
            .next()
            .expect("one input");
        let name = path.file_stem().map_or("input".into(), |s| s.to_string_lossy().into_owned());
        let queries = batch::random_queries(&classifier, spec.queries, spec.seed);
        vec![BatchItem {
            name,
            classifier,
            queries,
        }]
    };
    let config = BatchConfig {
        methods: method.map_or(vec![Method::OneStep, Method::TwoStep], |m| vec![m]),
        time_limit: limit,
        workers,
        backend: backend(backend_arg)?,
    };
    let rows = batch::run_batch(&items, &config)?;
    for r in rows.iter().filter(|r| r.negated > 0) {
        writeln!(err, "{} {}: {} of {} instances predicted 1, run on the negated diagram", r.name, r.method, r.negated, r.queries)?;
    }
    let mut csv = Vec::new();
    batch::write_csv(&rows, &mut csv, omit_times)?;
    write_out(out_path, &String::from_utf8(csv).expect("CSV is ASCII"), out)?;
    Ok(0)
}

fn cmd_generate(kind: KindArg, m: usize, nodes: usize, seed: u64, prefix: &Path, err: &mut dyn Write) -> Result<i32> {
    let with_ext = |ext: &str| {
        let mut p = prefix.as_os_str().to_owned();
        p.push(".");
        p.push(ext);
        PathBuf::from(p)
    };
    let mut files = Vec::new();
    let mut rng = gen::rng(seed ^ 0x5bd1_e995);
    let instance = match generate_random_classifier(kind.into(), m, nodes, seed)? {
        RandomClassifier::Obdd(o) => {
            files.push((with_ext("obdd"), format::write_obdd(&o)));
            gen::random_instance(&o, &mut rng)
        }
        RandomClassifier::Sdd(s) => {
            files.push((with_ext("vtree"), format::write_vtree(s.vtree())));
            files.push((with_ext("sdd"), format::write_sdd(&s)));
            gen::random_instance(&s, &mut rng)
        }
    };
    files.push((with_ext("inst"), format::write_instance(&instance)));
    for (path, text) in files {
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        writeln!(err, "wrote {}", path.display())?;
    }
    Ok(0)
}

fn cmd_solve(file: &Path, backend_arg: &BackendArg, out: &mut dyn Write) -> Result<i32> {
    let cnf = in_file(file, format::parse_dimacs(&read(file)?))?;
    let result = match backend(backend_arg)? {
        batch::Backend::Internal => solve_interruptible(&cnf, &[], &mut || false)?,
        batch::Backend::External(s) => s.solve(&cnf)?,
    };
    match result {
        SatResult::Sat(model) => {
            writeln!(out, "s SATISFIABLE")?;
            let lits: Vec<String> = (1..=cnf.num_vars())
                .map(|v| if model.value(v) { v.to_string() } else { format!("-{v}") })
                .collect();
            writeln!(out, "v {} 0", lits.join(" "))?;
            Ok(10)
        }
        SatResult::Unsat => {
            writeln!(out, "s UNSATISFIABLE")?;
            Ok(20)
        }
    }
}

fn dispatch(cmd: Cmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Cmd::Fmp {
            inputs,
            target,
            method,
            backend,
            time_limit_s,
        } => cmd_fmp(&inputs, target, method, &backend, seconds(time_limit_s)?, out, err),
        Cmd::Axp { inputs } => cmd_explain(&inputs, true, out, err),
        Cmd::Cxp { inputs } => cmd_explain(&inputs, false, out, err),
        Cmd::Encode {
            inputs,
            target,
            method,
            out: path,
        } => {
            let loaded = inputs.load()?;
            let text = loaded.with_route(|route, _| Ok(route.encode(target, method)?.dimacs()))?;
            write_out(&path, &text, out)?;
            Ok(0)
        }
        Cmd::Enum { inputs } => cmd_enum(&inputs, out),
        Cmd::Bench {
            inputs,
            kind,
            m,
            nodes,
            count,
            queries,
            seed,
            workers,
            time_limit_s,
            method,
            backend,
            out: path,
            omit_times,
        } => {
            let spec = BenchSpec {
                kind: kind.into(),
                m,
                budget: nodes,
                count,
                queries,
                seed,
            };
            cmd_bench(&inputs, spec, workers, seconds(time_limit_s)?, method, &backend, &path, omit_times, out, err)
        }
        Cmd::Generate {
            kind,
            m,
            nodes,
            seed,
            out: prefix,
        } => cmd_generate(kind, m, nodes, seed, &prefix, err),
        Cmd::Solve { file, backend } => cmd_solve(&file, &backend, out),
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                2
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            };
        }
    };
    match dispatch(cli.cmd, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            if e.is::<Usage>() {
                let _ = writeln!(err, "\n{}\nFor more information, try '--help'.", Cli::command().render_usage());
            }
            2
        }
    }
}
