//! Batches of membership queries with a per-query time limit, run on a
//! worker pool and summarized as one CSV row per classifier and method.

use std::io::{self, Write};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use fmp_core::encode::Method;
use fmp_core::explain::{SddClassifier, SddExplainer};
use fmp_core::fmp::{decide_membership_timed, FmpError, FmpOutcome, FmpQuery, InternalBackend, Route};
use fmp_core::gen::{self, generate_random_classifier, ClassifierKind, GenError, RandomClassifier};
use fmp_core::sat::SolveError;
use fmp_core::xpg::{GraphClassifier, XpGraph};
use fmp_core::{Classifier, Instance};
use rand::Rng;
use thiserror::Error;

use crate::external::ExternalSolver;

pub const CSV_HEADER: &str = "name,m,nodes,method,yes_pct,avg_vars,avg_cls,max_s,avg_s,timeouts";

/// A classifier that can be queried at any of its instances.
#[derive(Debug, Clone)]
pub enum BenchClassifier {
    Sdd(SddClassifier),
    Graph(GraphClassifier),
    /// A graph already specialized to one instance; queries must use it.
    Xpg(XpGraph),
}

impl BenchClassifier {
    pub fn num_features(&self) -> usize {
        match self {
            BenchClassifier::Sdd(c) => c.num_features(),
            BenchClassifier::Graph(g) => g.num_features(),
            BenchClassifier::Xpg(x) => x.num_features(),
        }
    }

    pub fn nodes(&self) -> usize {
        match self {
            BenchClassifier::Sdd(c) => c.sdd().reachable_count(),
            BenchClassifier::Graph(g) => g.size(),
            BenchClassifier::Xpg(x) => x.len(),
        }
    }
}

impl From<RandomClassifier> for BenchClassifier {
    fn from(c: RandomClassifier) -> Self {
        match c {
            RandomClassifier::Obdd(o) => BenchClassifier::Graph(GraphClassifier::Obdd(o)),
            RandomClassifier::Sdd(s) => BenchClassifier::Sdd(SddClassifier::new(s)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    /// Ignored for [`BenchClassifier::Xpg`].
    pub instance: Instance,
    pub target: usize,
}

#[derive(Debug, Clone)]
pub struct BatchItem {
    pub name: String,
    pub classifier: BenchClassifier,
    pub queries: Vec<Query>,
}

#[derive(Debug, Clone)]
pub enum Backend {
    Internal,
    External(ExternalSolver),
}

#[derive(Debug, Clone)]
pub struct BatchConfig {
    pub methods: Vec<Method>,
    /// Enforced by the internal solver only.
    pub time_limit: Option<Duration>,
    pub workers: usize,
    pub backend: Backend,
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            methods: vec![Method::OneStep, Method::TwoStep],
            time_limit: None,
            workers: 1,
            backend: Backend::Internal,
        }
    }
}

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("no queries to run")]
    Empty,
    #[error("{name}, target {target}, {method}: {message}")]
    Query {
        name: String,
        target: usize,
        method: Method,
        message: String,
    },
    #[error(transparent)]
    Gen(#[from] GenError),
}

/// Aggregate over the queries of one classifier under one method.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchRow {
    pub name: String,
    pub m: usize,
    pub nodes: usize,
    pub method: Method,
    pub queries: usize,
    pub yes: usize,
    pub timeouts: usize,
    /// SDD queries whose instance was predicted ⊤ and ran on the negation.
    pub negated: usize,
    pub total_vars: u64,
    pub total_clauses: u64,
    pub max_time: Duration,
    pub total_time: Duration,
}

impl BatchRow {
    fn completed(&self) -> usize {
        self.queries - self.timeouts
    }

    fn mean(&self, total: f64) -> f64 {
        match self.completed() {
            0 => 0.0,
            n => total / n as f64,
        }
    }

    pub fn yes_pct(&self) -> f64 {
        self.mean(100.0 * self.yes as f64)
    }

    pub fn avg_vars(&self) -> f64 {
        self.mean(self.total_vars as f64)
    }

    pub fn avg_clauses(&self) -> f64 {
        self.mean(self.total_clauses as f64)
    }

    pub fn avg_time(&self) -> Duration {
        match self.completed() {
            0 => Duration::ZERO,
            n => self.total_time / n as u32,
        }
    }

    /// The CSV line, without a newline. With `omit_times` the two time
    /// columns are `-`, so reports are byte-stable across runs.
    pub fn csv(&self, omit_times: bool) -> String {
        let (max_s, avg_s) = if omit_times {
            ("-".to_owned(), "-".to_owned())
        } else {
            (
                format!("{:.6}", self.max_time.as_secs_f64()),
                format!("{:.6}", self.avg_time().as_secs_f64()),
            )
        };
        format!(
            "{},{},{},{},{:.1},{:.1},{:.1},{},{},{}",
            self.name,
            self.m,
            self.nodes,
            self.method,
            self.yes_pct(),
            self.avg_vars(),
            self.avg_clauses(),
            max_s,
            avg_s,
            self.timeouts
        )
    }
}

pub fn write_csv<W: Write>(rows: &[BatchRow], mut sink: W, omit_times: bool) -> io::Result<()> {
    writeln!(sink, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(sink, "{}", r.csv(omit_times))?;
    }
    sink.flush()
}

enum QueryRecord {
    Done { outcome: FmpOutcome, negated: bool },
    Timeout,
}

/// One query end to end: bind, encode, solve, extract.
fn run_query(
    classifier: &BenchClassifier,
    query: &Query,
    method: Method,
    config: &BatchConfig,
) -> Result<QueryRecord, String> {
    let start = Instant::now();
    let clock = move || start.elapsed();
    let fq = FmpQuery {
        target: query.target,
        method,
    };
    let sdd_explainer: Option<SddExplainer<'_>>;
    let graph: Option<XpGraph>;
    let (route, negated) = match classifier {
        BenchClassifier::Sdd(c) => {
            sdd_explainer = Some(c.explainer(&query.instance).map_err(|e| e.to_string())?);
            let e = sdd_explainer.as_ref().expect("just set");
            (Route::Sdd(e), e.uses_negation())
        }
        BenchClassifier::Graph(g) => {
            graph = Some(g.build_xpg(&query.instance).map_err(|e| e.to_string())?);
            (Route::Xpg(graph.as_ref().expect("just set")), false)
        }
        BenchClassifier::Xpg(x) => (Route::Xpg(x), false),
    };
    let done = |outcome| QueryRecord::Done { outcome, negated };
    match &config.backend {
        Backend::Internal => {
            let deadline = config.time_limit.map(|d| start + d);
            let mut backend = InternalBackend::with_stop(move || deadline.is_some_and(|d| Instant::now() >= d));
            match decide_membership_timed(route, fq, &mut backend, &clock) {
                Ok(o) => Ok(done(o)),
                Err(FmpError::Backend(SolveError::Interrupted)) => Ok(QueryRecord::Timeout),
                Err(e) => Err(e.to_string()),
            }
        }
        Backend::External(solver) => decide_membership_timed(route, fq, &mut solver.clone(), &clock)
            .map(done)
            .map_err(|e| e.to_string()),
    }
}

/// Runs every query of every item under every configured method. Rows come
/// back in input order: items outer, methods inner.
pub fn run_batch(items: &[BatchItem], config: &BatchConfig) -> Result<Vec<BatchRow>, BatchError> {
    let jobs: Vec<(usize, usize, usize)> = items
        .iter()
        .enumerate()
        .flat_map(|(i, item)| {
            (0..config.methods.len()).flat_map(move |k| (0..item.queries.len()).map(move |q| (i, k, q)))
        })
        .collect();
    if jobs.is_empty() {
        return Err(BatchError::Empty);
    }
    let results: Vec<Mutex<Option<Result<QueryRecord, String>>>> = jobs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = config.workers.clamp(1, jobs.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let j = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, k, q)) = jobs.get(j) else { break };
                let item = &items[i];
                let r = run_query(&item.classifier, &item.queries[q], config.methods[k], config);
                *results[j].lock().expect("no worker panicked") = Some(r);
            });
        }
    });

    let mut rows: Vec<BatchRow> = Vec::new();
    for (&(i, k, q), slot) in jobs.iter().zip(results) {
        let item = &items[i];
        let method = config.methods[k];
        if rows.last().is_none_or(|r| r.name != item.name || r.method != method || q == 0) {
            rows.push(BatchRow {
                name: item.name.clone(),
                m: item.classifier.num_features(),
                nodes: item.classifier.nodes(),
                method,
                queries: 0,
                yes: 0,
                timeouts: 0,
                negated: 0,
                total_vars: 0,
                total_clauses: 0,
                max_time: Duration::ZERO,
                total_time: Duration::ZERO,
            });
        }
        let row = rows.last_mut().expect("pushed above");
        row.queries += 1;
        let record = slot.into_inner().expect("no worker panicked").expect("every job ran");
        match record.map_err(|message| BatchError::Query {
            name: item.name.clone(),
            target: item.queries[q].target,
            method,
            message,
        })? {
            QueryRecord::Timeout => row.timeouts += 1,
            QueryRecord::Done { outcome, negated } => {
                row.yes += usize::from(outcome.is_yes());
                row.negated += usize::from(negated);
                row.total_vars += u64::from(outcome.stats.vars);
                row.total_clauses += outcome.stats.clauses as u64;
                row.max_time = row.max_time.max(outcome.stats.total_time);
                row.total_time += outcome.stats.total_time;
            }
        }
    }
    Ok(rows)
}

/// Uniformly random instances and targets for a classifier.
pub fn random_queries(classifier: &BenchClassifier, count: usize, seed: u64) -> Vec<Query> {
    let mut rng = gen::rng(seed);
    let m = classifier.num_features();
    (0..count)
        .map(|_| {
            let instance = match classifier {
                BenchClassifier::Sdd(c) => gen::random_instance(c, &mut rng),
                BenchClassifier::Graph(g) => gen::random_instance(g, &mut rng),
                BenchClassifier::Xpg(_) => Instance::new(Vec::new(), 0),
            };
            Query {
                instance,
                target: rng.random_range(1..=m),
            }
        })
        .collect()
}

/// Parameters of a generated benchmark.
#[derive(Debug, Clone, Copy)]
pub struct BenchSpec {
    pub kind: ClassifierKind,
    pub m: usize,
    pub budget: usize,
    pub count: usize,
    pub queries: usize,
    pub seed: u64,
}

/// `count` generated classifiers with `queries` random queries each. The
/// `c`-th classifier uses seed `seed + c`.
pub fn generate_items(spec: &BenchSpec) -> Result<Vec<BatchItem>, BatchError> {
    (0..spec.count)
        .map(|c| {
            let seed = spec.seed.wrapping_add(c as u64);
            let classifier: BenchClassifier = generate_random_classifier(spec.kind, spec.m, spec.budget, seed)?.into();
            let queries = random_queries(&classifier, spec.queries, seed ^ 0x9e37_79b9_7f4a_7c15);
            Ok(BatchItem {
                name: format!("{}-m{}-s{}", spec.kind.as_str(), spec.m, seed),
                classifier,
                queries,
            })
        })
        .collect()
}
