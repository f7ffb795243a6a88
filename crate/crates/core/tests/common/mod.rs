//! Brute-force oracles and generators shared by the integration tests.
//! Everything here works from `predict` alone.
#![allow(dead_code)]

use fmp_core::xpg::{DecisionTree, DtSpecNode};
use fmp_core::{Class, Classifier, FeatureSet, Instance, Value};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every point of the feature space.
pub fn all_points<C: Classifier + ?Sized>(clf: &C) -> Vec<Vec<Value>> {
    let mut out = vec![Vec::new()];
    for i in 1..=clf.num_features() {
        out = out
            .into_iter()
            .flat_map(|p| {
                clf.domain(i).iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

pub fn bool_points(m: usize) -> Vec<Vec<bool>> {
    (0..1u32 << m).map(|mask| (0..m).map(|i| mask >> i & 1 == 1).collect()).collect()
}

pub fn subsets(m: usize) -> Vec<FeatureSet> {
    (0..1u64 << m).map(|mask| FeatureSet::from_mask(mask, m)).collect()
}

fn agrees(p: &[Value], v: &[Value], x: &FeatureSet) -> bool {
    x.iter().all(|i| p[i - 1] == v[i - 1])
}

/// Every point agreeing with the instance on `x` gets its class.
pub fn weak_axp<C: Classifier + ?Sized>(clf: &C, inst: &Instance, x: &FeatureSet) -> bool {
    all_points(clf)
        .iter()
        .filter(|p| agrees(p, &inst.point, x))
        .all(|p| clf.predict(p).unwrap() == inst.class)
}

/// Some point agreeing with the instance outside `y` gets another class.
pub fn weak_cxp<C: Classifier + ?Sized>(clf: &C, inst: &Instance, y: &FeatureSet) -> bool {
    let fixed = y.complement(clf.num_features());
    all_points(clf)
        .iter()
        .filter(|p| agrees(p, &inst.point, &fixed))
        .any(|p| clf.predict(p).unwrap() != inst.class)
}

/// Sets satisfying `weak` with no weak proper subset one element smaller.
fn minimal(m: usize, weak: impl Fn(&FeatureSet) -> bool) -> Vec<FeatureSet> {
    let mut out: Vec<FeatureSet> = subsets(m)
        .into_iter()
        .filter(|x| weak(x) && x.iter().all(|i| !weak(&x.without(i))))
        .collect();
    out.sort();
    out
}

pub fn axps<C: Classifier + ?Sized>(clf: &C, inst: &Instance) -> Vec<FeatureSet> {
    minimal(clf.num_features(), |x| weak_axp(clf, inst, x))
}

pub fn cxps<C: Classifier + ?Sized>(clf: &C, inst: &Instance) -> Vec<FeatureSet> {
    minimal(clf.num_features(), |y| weak_cxp(clf, inst, y))
}

pub fn in_some(sets: &[FeatureSet], t: usize) -> bool {
    sets.iter().any(|s| s.contains(t))
}

pub fn to_values(p: &[bool]) -> Vec<Value> {
    p.iter().map(|&b| Value::from(b)).collect()
}

pub fn predict_at<C: Classifier + ?Sized>(clf: &C, point: Vec<Value>) -> Instance {
    let class: Class = clf.predict(&point).unwrap();
    Instance::new(point, class)
}

/// A random non-constant tree with domains of size 2 or 3 and classes
/// 0..=2.
pub fn random_tree(m: usize, seed: u64) -> DecisionTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let domains: Vec<Vec<Value>> = (0..m).map(|_| (0..rng.random_range(2..=3)).collect()).collect();
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        grow(&mut rng, &domains, &mut Vec::new(), 0, &mut nodes, &mut edges);
        let dt = DecisionTree::new(domains, nodes, edges).unwrap();
        if !dt.is_constant() {
            return dt;
        }
    }
}

fn grow(
    rng: &mut ChaCha8Rng,
    domains: &[Vec<Value>],
    used: &mut Vec<usize>,
    depth: usize,
    nodes: &mut Vec<(u32, DtSpecNode)>,
    edges: &mut Vec<(u32, u32, Vec<Value>)>,
) -> u32 {
    let id = nodes.len() as u32 + 1;
    let free: Vec<usize> = (1..=domains.len()).filter(|f| !used.contains(f)).collect();
    if free.is_empty() || (depth > 0 && rng.random_bool(0.25)) {
        nodes.push((id, DtSpecNode::Leaf { class: rng.random_range(0..3) }));
        return id;
    }
    let feature = free[rng.random_range(0..free.len())];
    nodes.push((id, DtSpecNode::NonTerminal { feature }));
    let mut values = domains[feature - 1].clone();
    values.shuffle(rng);
    let parts = rng.random_range(2..=values.len());
    let mut groups: Vec<Vec<Value>> = vec![Vec::new(); parts];
    for (k, v) in values.into_iter().enumerate() {
        let g = if k < parts { k } else { rng.random_range(0..parts) };
        groups[g].push(v);
    }
    used.push(feature);
    for g in groups {
        let child = grow(rng, domains, used, depth + 1, nodes, edges);
        edges.push((id, child, g));
    }
    used.pop();
    id
}
