//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Oracles are brute force over the feature space.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::{axps, bool_points, cxps, in_some, random_tree, subsets, weak_axp, weak_cxp};
use fmp::format::{parse_dt, parse_instance, parse_obdd, parse_sdd, parse_vtree, parse_xpg};
use fmp_core::encode::{encode_xpg, Method};
use fmp_core::explain::{
    enumerate_axps_bruteforce, enumerate_cxps_bruteforce, is_weak_axp, is_weak_cxp, minimal_hitting_sets,
    SddClassifier,
};
use fmp_core::fmp::{decide_membership, FmpQuery, FmpStats, InternalBackend, Route};
use fmp_core::gen::{
    generate_random_classifier, random_instance, random_obdd, random_sdd, rng, shannon_sdd_from_obdd, ClassifierKind,
    RandomClassifier,
};
use fmp_core::sdd::{Sdd, Term};
use fmp_core::xpg::{build_xpg_from_dt, build_xpg_from_obdd};
use fmp_core::{Classifier, FeatureSet, Instance};
use rand::Rng;

type Outcome = Result<String, String>;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixtures().join(name)).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

const METHODS: [Method; 2] = [Method::OneStep, Method::TwoStep];

fn query(route: Route<'_>, t: usize, method: Method) -> Result<fmp_core::fmp::FmpOutcome, String> {
    decide_membership(route, FmpQuery { target: t, method }, &mut InternalBackend::new()).map_err(|e| e.to_string())
}

fn running_example() -> Outcome {
    let start = Instant::now();
    let vtree = parse_vtree(&fixture("ella.vtree")).unwrap();
    let sdd = SddClassifier::new(parse_sdd(&fixture("ella.sdd"), &vtree).unwrap());
    let inst = parse_instance(&fixture("ella.inst")).unwrap();
    let e = sdd.explainer(&inst).unwrap();
    let graphs = [
        parse_xpg(&fixture("ella.xpg")).unwrap(),
        build_xpg_from_obdd(&parse_obdd(&fixture("ella.obdd")).unwrap(), &inst).unwrap(),
        build_xpg_from_dt(&parse_dt(&fixture("ella.dt")).unwrap(), &inst).unwrap(),
    ];
    let mut routes = vec![("sdd", Route::Sdd(&e))];
    routes.extend(graphs.iter().map(|g| ("xpg", Route::Xpg(g))));
    let pm = FeatureSet::from([1, 3]);
    for (name, route) in routes {
        for method in METHODS {
            for (t, yes) in [(1, true), (2, false), (3, true), (4, false)] {
                let out = query(route, t, method)?;
                let want = yes.then_some(&pm);
                ensure(out.witness() == want, || format!("{name} {method} t={t}: {:?}", out.answer))?;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("P,M yes with witness {{1,3}}; Y,W no; 4 routes x 2 methods in {elapsed:.2?}"))
}

#[derive(Default)]
struct Suite {
    queries: usize,
    mismatches: Vec<String>,
    witnesses: usize,
    witness_violations: Vec<String>,
    seeds: usize,
    seed_violations: Vec<String>,
    elapsed: Duration,
}

fn check_answer<C: Classifier + ?Sized>(
    s: &mut Suite,
    clf: &C,
    inst: &Instance,
    route: Route<'_>,
    tag: &str,
) {
    let all = axps(clf, inst);
    for t in 1..=clf.num_features() {
        for method in METHODS {
            s.queries += 1;
            let out = match query(route, t, method) {
                Ok(o) => o,
                Err(e) => {
                    s.mismatches.push(format!("{tag} t={t} {method}: {e}"));
                    continue;
                }
            };
            if out.is_yes() != in_some(&all, t) {
                s.mismatches.push(format!("{tag} t={t} {method}"));
            }
            if let Some(w) = out.witness() {
                s.witnesses += 1;
                let minimal = w.iter().all(|i| !is_weak_axp(&route, &w.without(i)).unwrap());
                let ok = w.contains(t) && is_weak_axp(&route, w).unwrap() && minimal && all.contains(w);
                if !ok {
                    s.witness_violations.push(format!("{tag} t={t} {method}: {w}"));
                }
            }
            if method == Method::TwoStep && out.is_yes() {
                let FmpStats { seed, .. } = &out.stats;
                s.seeds += 1;
                let ok = seed
                    .as_ref()
                    .is_some_and(|x| weak_axp(clf, inst, x) && !weak_axp(clf, inst, &x.without(t)));
                if !ok {
                    s.seed_violations.push(format!("{tag} t={t}: {seed:?}"));
                }
            }
        }
    }
}

fn oracle_suite() -> Suite {
    let start = Instant::now();
    let mut s = Suite::default();
    let mut r = rng(0xacce);
    for c in 0..200u64 {
        let kind = if c % 2 == 0 { ClassifierKind::Obdd } else { ClassifierKind::ShannonSdd };
        let m = 3 + (c as usize / 2) % 6;
        let budget = r.random_range(m..=4 * m);
        let tag = |i: usize| format!("#{c} {} m={m} n={budget} inst={i}", kind.as_str());
        match generate_random_classifier(kind, m, budget, c).unwrap() {
            RandomClassifier::Obdd(o) => {
                for i in 0..5 {
                    let inst = random_instance(&o, &mut r);
                    let xpg = build_xpg_from_obdd(&o, &inst).unwrap();
                    check_answer(&mut s, &o, &inst, Route::Xpg(&xpg), &tag(i));
                }
            }
            RandomClassifier::Sdd(d) => {
                let clf = SddClassifier::new(d);
                for i in 0..5 {
                    let inst = random_instance(&clf, &mut r);
                    let e = clf.explainer(&inst).unwrap();
                    check_answer(&mut s, &clf, &inst, Route::Sdd(&e), &tag(i));
                }
            }
        }
    }
    s.elapsed = start.elapsed();
    s
}

fn first(v: &[String]) -> String {
    format!("{} violations, first: {}", v.len(), v.first().map_or("-", String::as_str))
}

fn oracle_equivalence(s: &Suite) -> Outcome {
    ensure(s.mismatches.is_empty(), || first(&s.mismatches))?;
    ensure(s.elapsed < Duration::from_secs(300), || format!("took {:?}", s.elapsed))?;
    Ok(format!("{} queries over 200 classifiers x 5 instances, 0 mismatches in {:.2?}", s.queries, s.elapsed))
}

fn witness_contract(s: &Suite) -> Outcome {
    ensure(s.witness_violations.is_empty(), || first(&s.witness_violations))?;
    Ok(format!("{} witnesses are AXps containing the target", s.witnesses))
}

fn two_step_precondition(s: &Suite) -> Outcome {
    ensure(s.seed_violations.is_empty(), || first(&s.seed_violations))?;
    Ok(format!("{} two-step seeds satisfy the precondition", s.seeds))
}

fn duality_for<C: Classifier + ?Sized>(clf: &C, inst: &Instance, route: Route<'_>) -> Result<(), String> {
    let m = clf.num_features();
    for y in subsets(m) {
        let lib = is_weak_cxp(&route, &y).unwrap();
        let oracle = weak_cxp(clf, inst, &y);
        ensure(lib == oracle && oracle == !weak_axp(clf, inst, &y.complement(m)), || {
            format!("complementation fails at Y={y}")
        })?;
    }
    let a = enumerate_axps_bruteforce(&route).unwrap();
    let c = enumerate_cxps_bruteforce(&route).unwrap();
    ensure(a == axps(clf, inst) && c == cxps(clf, inst), || "enumeration differs from oracle".into())?;
    ensure(minimal_hitting_sets(&a, m).unwrap() == c, || "MHS(AXps) != CXps".into())?;
    ensure(minimal_hitting_sets(&c, m).unwrap() == a, || "MHS(CXps) != AXps".into())?;
    for t in 1..=m {
        let fmp = query(route, t, Method::TwoStep)?.is_yes();
        ensure(in_some(&a, t) == in_some(&c, t) && fmp == in_some(&a, t), || format!("membership asymmetry at {t}"))?;
    }
    Ok(())
}

fn duality() -> Outcome {
    let mut r = rng(0xd0a1);
    let mut instances = 0;
    for c in 0..50u64 {
        let m = 3 + c as usize % 6;
        let res = match c % 3 {
            0 => {
                let o = random_obdd(m, r.random_range(m..=4 * m), c).unwrap();
                (0..2).try_for_each(|_| {
                    let inst = random_instance(&o, &mut r);
                    let xpg = build_xpg_from_obdd(&o, &inst).unwrap();
                    instances += 1;
                    duality_for(&o, &inst, Route::Xpg(&xpg))
                })
            }
            1 => {
                let clf = SddClassifier::new(random_sdd(m, c).unwrap());
                (0..2).try_for_each(|_| {
                    let inst = random_instance(&clf, &mut r);
                    let e = clf.explainer(&inst).unwrap();
                    instances += 1;
                    duality_for(&clf, &inst, Route::Sdd(&e))
                })
            }
            _ => {
                let dt = random_tree(m, c);
                (0..2).try_for_each(|_| {
                    let inst = random_instance(&dt, &mut r);
                    let xpg = build_xpg_from_dt(&dt, &inst).unwrap();
                    instances += 1;
                    duality_for(&dt, &inst, Route::Xpg(&xpg))
                })
            }
        };
        res.map_err(|e| format!("classifier #{c} (m={m}): {e}"))?;
    }
    Ok(format!("50 classifiers (OBDD, SDD, multi-valued DT), {instances} instances, exhaustive"))
}

fn encoding_size() -> Outcome {
    let m = 40;
    let mut r = rng(0x5123);
    let mut ratios = Vec::new();
    for c in 0..20u64 {
        let o = random_obdd(m, r.random_range(300..=420), 1000 + c).unwrap();
        let size = o.reachable_count();
        ensure(size >= 300, || format!("sample {c} has only {size} nodes"))?;
        let inst = random_instance(&o, &mut r);
        let xpg = build_xpg_from_obdd(&o, &inst).unwrap();
        let t = r.random_range(1..=m);
        let one = encode_xpg(&xpg, t, Method::OneStep).unwrap().cnf.num_clauses();
        let two = encode_xpg(&xpg, t, Method::TwoStep).unwrap().cnf.num_clauses();
        let ratio = one as f64 / two as f64;
        ensure(ratio >= 5.0, || format!("sample {c}: ratio {ratio:.2}"))?;
        ratios.push(ratio);
    }
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    Ok(format!("20 XpGs, m=40, >=300 nodes: one/two-step clause ratio min {min:.2}, mean {mean:.2}"))
}

fn check_sdd_algebra(s: &Sdd, r: &mut fmp_core::gen::GenRng, terms: usize) -> Result<(), String> {
    let m = s.num_vars();
    let points = bool_points(m);
    let values: Vec<bool> = points.iter().map(|p| s.evaluate(p).unwrap()).collect();
    let neg = s.negate();
    for (p, &v) in points.iter().zip(&values) {
        ensure(neg.evaluate(p).unwrap() == !v, || format!("negation wrong at {p:?}"))?;
    }
    ensure(s.is_consistent() == values.iter().any(|&v| v), || "consistency wrong".into())?;
    for k in 0..terms {
        let (mut fixed, mut ones) = (0usize, 0usize);
        if k > 0 {
            for i in 0..m {
                if r.random_bool(0.4) {
                    fixed |= 1 << i;
                    ones |= usize::from(r.random_bool(0.5)) << i;
                }
            }
        }
        let term: Term = (0..m).filter(|i| fixed >> i & 1 == 1).map(|i| (i + 1, ones >> i & 1 == 1)).collect();
        let cond = s.condition(&term).unwrap();
        for (q, p) in points.iter().enumerate() {
            let v = values[(q & !fixed) | ones];
            ensure(cond.evaluate(p).unwrap() == v, || format!("conditioning on {term:?} wrong at {p:?}"))?;
        }
        let exists = (0..points.len()).any(|q| q & fixed == ones && values[q]);
        ensure(s.consistency_under(&term).unwrap() == exists, || "consistency under term wrong".into())?;
        ensure(cond.is_consistent() == exists, || "conditioned consistency wrong".into())?;
    }
    Ok(())
}

fn sdd_algebra() -> Outcome {
    let start = Instant::now();
    let mut r = rng(0x5dd);
    let vtree = parse_vtree(&fixture("ella.vtree")).unwrap();
    for name in ["ella.sdd", "top.sdd"] {
        let s = parse_sdd(&fixture(name), &vtree).unwrap();
        check_sdd_algebra(&s, &mut r, 16).map_err(|e| format!("{name}: {e}"))?;
    }
    for c in 0..100u64 {
        let m = 2 + c as usize % 11;
        let s = if c % 2 == 0 {
            random_sdd(m, c).unwrap()
        } else {
            shannon_sdd_from_obdd(&random_obdd(m, 3 * m, c).unwrap()).unwrap()
        };
        check_sdd_algebra(&s, &mut r, 8).map_err(|e| format!("diagram #{c} (m={m}): {e}"))?;
    }
    Ok(format!("2 fixtures and 100 random diagrams (m<=12), exhaustive, in {:.2?}", start.elapsed()))
}

fn fmp_bin(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_fmp"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let fx = fixtures();
    let fx = fx.to_str().unwrap();
    let mut files = 0;
    for run in ["a", "b"] {
        for kind in ["obdd", "sdd"] {
            fmp_bin(d, &["generate", "--kind", kind, "--m", "12", "--nodes", "60", "--seed", "42", "--out", &format!("{run}-{kind}")])?;
        }
        for method in ["one-step", "two-step"] {
            fmp_bin(d, &["encode", "--obdd", &format!("{run}-obdd.obdd"), "--instance", &format!("{run}-obdd.inst"), "--target", "5", "--method", method, "--out", &format!("{run}-obdd-{method}.cnf")])?;
            fmp_bin(d, &["encode", "--sdd", &format!("{run}-sdd.sdd"), "--vtree", &format!("{run}-sdd.vtree"), "--instance", &format!("{run}-sdd.inst"), "--target", "5", "--method", method, "--out", &format!("{run}-sdd-{method}.cnf")])?;
            fmp_bin(d, &["encode", "--xpg", &format!("{fx}/ella.xpg"), "--target", "3", "--method", method, "--out", &format!("{run}-ella-{method}.cnf")])?;
        }
        for kind in ["obdd", "sdd"] {
            fmp_bin(d, &["bench", "--kind", kind, "--m", "8", "--nodes", "24", "--count", "4", "--queries", "10", "--seed", "7", "--workers", "4", "--omit-times", "--out", &format!("{run}-{kind}.csv")])?;
        }
    }
    let mut names: Vec<String> = std::fs::read_dir(d)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("a-"))
        .collect();
    names.sort();
    for name in &names {
        let a = std::fs::read(d.join(name)).unwrap();
        let b = std::fs::read(d.join(format!("b-{}", &name[2..]))).unwrap();
        ensure(!a.is_empty() && a == b, || format!("{name} differs between runs"))?;
        files += 1;
    }
    ensure(files == 13, || format!("expected 13 artifacts, found {files}"))?;
    Ok(format!("{files} artifacts (DIMACS, CSV, generated models) byte-identical across two runs"))
}

fn performance() -> Outcome {
    let mut r = rng(0x9e7f);
    let mut worst = Duration::ZERO;
    let mut count = 0;
    let mut largest = 0;
    for (c, m) in [50usize, 100].into_iter().enumerate() {
        for kind in [ClassifierKind::Obdd, ClassifierKind::ShannonSdd] {
            let seed = 77 + c as u64;
            // The budget is approximate; leave room for terminals and overshoot.
            let size = random_obdd(m, 1950, seed).unwrap().reachable_count();
            ensure(size <= 2000, || format!("m={m}: {size} nodes"))?;
            largest = largest.max(size);
            let generated = generate_random_classifier(kind, m, 1950, seed).unwrap();
            for _ in 0..2 {
                let targets: Vec<usize> = (0..25).map(|_| r.random_range(1..=m)).collect();
                let mut run = |route: Route<'_>| -> Result<(), String> {
                    for &t in &targets {
                        let start = Instant::now();
                        query(route, t, Method::TwoStep)?;
                        let took = start.elapsed();
                        ensure(took < Duration::from_secs(10), || format!("m={m} t={t}: {took:?}"))?;
                        worst = worst.max(took);
                        count += 1;
                    }
                    Ok(())
                };
                match &generated {
                    RandomClassifier::Obdd(o) => {
                        let inst = random_instance(o, &mut r);
                        run(Route::Xpg(&build_xpg_from_obdd(o, &inst).unwrap()))?;
                    }
                    RandomClassifier::Sdd(s) => {
                        let clf = SddClassifier::new(s.clone());
                        let inst = random_instance(&clf, &mut r);
                        run(Route::Sdd(&clf.explainer(&inst).unwrap()))?;
                    }
                }
            }
        }
    }
    Ok(format!("{count} two-step queries, m in {{50,100}}, up to {largest} nodes, slowest {worst:.2?}"))
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, f: &dyn Fn() -> Outcome| {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("PASS {n} {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {n} {name}: {detail}");
            }
        }
    };
    report(1, "running example", &running_example);
    let suite = oracle_suite();
    report(2, "oracle equivalence", &|| oracle_equivalence(&suite));
    report(3, "witness contract", &|| witness_contract(&suite));
    report(4, "two-step precondition", &|| two_step_precondition(&suite));
    report(5, "duality", &duality);
    report(6, "encoding size", &encoding_size);
    report(7, "sdd algebra", &sdd_algebra);
    report(8, "determinism", &determinism);
    report(9, "performance", &performance);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
