//! Seeded generators for test corpora and benchmarks.
//!
//! All generators draw from a ChaCha8 stream seeded with a `u64`, so the
//! same seed gives the same diagram on every platform.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::classifier::{Class, Classifier, Value};
use crate::feature::Instance;
use crate::sdd::{Element, NodeId, Sdd, SddNode, Vtree, VtreeId, VtreeNode};
use crate::xpg::{DecisionTree, DtSpecNode, Obdd, ObddNode};

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest variable count accepted by the truth-table compiler.
pub const MAX_TABLE_VARS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("need at least 2 features, got {0}")]
    TooFewFeatures(usize),
    #[error("node budget {0} cannot produce a non-constant diagram")]
    BudgetTooSmall(usize),
    #[error("truth table over {m} variables exceeds the limit of {max}")]
    TooManyVars { m: usize, max: usize },
    #[error("truth table has {got} entries, expected {expected}")]
    TableLength { expected: usize, got: usize },
    #[error("terminal class {0} is not boolean")]
    NonBooleanClass(Class),
}

/// Which generator a benchmark or test uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassifierKind {
    Obdd,
    ShannonSdd,
}

impl ClassifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::Obdd => "obdd",
            ClassifierKind::ShannonSdd => "sdd",
        }
    }
}

/// Output of [`generate_random_classifier`].
#[derive(Debug, Clone)]
pub enum RandomClassifier {
    Obdd(Obdd),
    Sdd(Sdd),
}

/// A random non-constant classifier: an OBDD from [`random_obdd`], or its
/// Shannon SDD twin from [`shannon_sdd_from_obdd`]. Equal seeds give the
/// same OBDD for both kinds.
pub fn generate_random_classifier(
    kind: ClassifierKind,
    m: usize,
    budget: usize,
    seed: u64,
) -> Result<RandomClassifier, GenError> {
    let obdd = random_obdd(m, budget, seed)?;
    Ok(match kind {
        ClassifierKind::Obdd => RandomClassifier::Obdd(obdd),
        ClassifierKind::ShannonSdd => RandomClassifier::Sdd(shannon_sdd_from_obdd(&obdd)?),
    })
}

/// A random reduced OBDD over `m` features with about `budget` decision
/// nodes, on a random variable order. Levels widen from the root, plateau,
/// and narrow towards the terminals; every node is reachable and both
/// terminals occur, so the diagram is never constant.
pub fn random_obdd(m: usize, budget: usize, seed: u64) -> Result<Obdd, GenError> {
    if m < 2 {
        return Err(GenError::TooFewFeatures(m));
    }
    if budget == 0 {
        return Err(GenError::BudgetTooSmall(budget));
    }
    let mut rng = rng(seed);
    let mut order: Vec<usize> = (1..=m).collect();
    order.shuffle(&mut rng);
    let widths = level_widths(m, budget, &mut rng);

    // Arena: terminals first, then levels bottom-up; the root comes last.
    let mut nodes = vec![ObddNode::Terminal { class: 0 }, ObddNode::Terminal { class: 1 }];
    let mut orphans: Vec<usize> = vec![0, 1];
    for level in (0..m).rev() {
        let feature = order[level];
        let pool = nodes.len();
        let want = if level == 0 { 1 } else { widths[level].max(orphans.len().div_ceil(2)) };
        let mut seen: BTreeMap<(usize, usize), ()> = BTreeMap::new();
        for _ in 0..want {
            let Some((lo, hi)) = draw_children(&mut rng, &mut orphans, pool, &seen) else {
                continue;
            };
            seen.insert((lo, hi), ());
            nodes.push(ObddNode::NonTerminal { feature, lo, hi });
        }
        let used = children(&nodes);
        orphans = (0..nodes.len()).filter(|&o| !used[o]).collect();
    }
    // Any orphan left is unreachable; trim them by rebuilding.
    let root = nodes.len() - 1;
    let (ids, arena) = reachable_arena(&nodes, root);
    Ok(Obdd::from_arena(m, ids, arena).expect("generated diagram is ordered"))
}

/// Picks a distinct `(lo, hi)` pair not yet used on this level, preferring
/// nodes nobody points to yet.
fn draw_children(
    rng: &mut GenRng,
    orphans: &mut Vec<usize>,
    pool: usize,
    seen: &BTreeMap<(usize, usize), ()>,
) -> Option<(usize, usize)> {
    let take = |rng: &mut GenRng, orphans: &mut Vec<usize>, avoid: Option<usize>| {
        let candidates: Vec<usize> = (0..orphans.len()).filter(|&k| Some(orphans[k]) != avoid).collect();
        if candidates.is_empty() {
            rng.random_range(0..pool)
        } else {
            orphans.swap_remove(candidates[rng.random_range(0..candidates.len())])
        }
    };
    let a = take(rng, orphans, None);
    let mut b = take(rng, orphans, Some(a));
    for _ in 0..64 {
        let (lo, hi) = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
        if lo != hi && !seen.contains_key(&(lo, hi)) {
            return Some((lo, hi));
        }
        b = rng.random_range(0..pool);
    }
    orphans.push(a);
    None
}

fn children(nodes: &[ObddNode]) -> Vec<bool> {
    let mut used = vec![false; nodes.len()];
    for n in nodes {
        if let ObddNode::NonTerminal { lo, hi, .. } = *n {
            used[lo] = true;
            used[hi] = true;
        }
    }
    used
}

fn reachable_arena(nodes: &[ObddNode], root: usize) -> (Vec<u32>, Vec<ObddNode>) {
    let mut reach = vec![false; nodes.len()];
    reach[root] = true;
    for i in (0..nodes.len()).rev() {
        if let (true, ObddNode::NonTerminal { lo, hi, .. }) = (reach[i], nodes[i]) {
            reach[lo] = true;
            reach[hi] = true;
        }
    }
    let mut remap = vec![usize::MAX; nodes.len()];
    let mut arena = Vec::new();
    for (i, n) in nodes.iter().enumerate().filter(|(i, _)| reach[*i]) {
        remap[i] = arena.len();
        arena.push(match *n {
            ObddNode::NonTerminal { feature, lo, hi } => ObddNode::NonTerminal {
                feature,
                lo: remap[lo],
                hi: remap[hi],
            },
            t => t,
        });
    }
    let ids = (0..arena.len() as u32).collect();
    (ids, arena)
}

/// Width of each level, top (index 0) to bottom, summing to roughly
/// `budget`. Small budgets give a chain through a random subset of levels.
fn level_widths(m: usize, budget: usize, rng: &mut GenRng) -> Vec<usize> {
    if budget < m {
        let mut levels: Vec<usize> = (1..m).collect();
        levels.shuffle(rng);
        let mut w = vec![0; m];
        w[0] = 1;
        for &l in levels.iter().take(budget.saturating_sub(1)) {
            w[l] = 1;
        }
        return w;
    }
    // Cap from the bottom: a level can hold at most as many distinct
    // (lo, hi) pairs as the nodes below it allow.
    let mut cap = vec![0usize; m];
    let mut below = 2usize;
    for level in (0..m).rev() {
        cap[level] = below.saturating_mul(below - 1);
        below = below.saturating_add(cap[level].min(budget));
    }
    let shape = |plateau: usize| -> Vec<usize> {
        (0..m)
            .map(|d| {
                let grow = if d >= usize::BITS as usize - 1 { usize::MAX } else { 1usize << d };
                grow.min(plateau).min(cap[d]).max(1)
            })
            .collect()
    };
    let mut plateau = 1;
    while plateau < budget && shape(plateau).iter().sum::<usize>() < budget {
        plateau += 1;
    }
    shape(plateau)
}

/// Right-linear vtree over the OBDD's variable order and the SDD whose
/// decision nodes split on one variable: `(x, hi) ∨ (¬x, lo)`. Nodes on
/// the last variable of the order become literals.
pub fn shannon_sdd_from_obdd(obdd: &Obdd) -> Result<Sdd, GenError> {
    let order = obdd.order().to_vec();
    let m = order.len();
    let vtree = Arc::new(Vtree::right_linear(&order).expect("order covers 1..=m"));
    let position: BTreeMap<usize, usize> = order.iter().enumerate().map(|(p, &v)| (v, p)).collect();
    // Internal vtree node whose left leaf is order[p], p < m - 1.
    let internal = |p: usize| VtreeId(m + (m - 2 - p));

    let mut b = Builder::default();
    let f = b.node(SddNode::False);
    let t = b.node(SddNode::True);
    let mut map = vec![NodeId(0); obdd.len()];
    for (i, node) in obdd.nodes().iter().enumerate() {
        map[i] = match *node {
            ObddNode::Terminal { class: 0 } => f,
            ObddNode::Terminal { class: 1 } => t,
            ObddNode::Terminal { class } => return Err(GenError::NonBooleanClass(class)),
            ObddNode::NonTerminal { feature, lo, hi } => {
                let (lo, hi) = (map[lo], map[hi]);
                let p = position[&feature];
                if p == m - 1 {
                    // Both children are terminals and differ.
                    b.node(SddNode::Literal {
                        var: feature,
                        positive: hi == t,
                    })
                } else {
                    let pos = b.node(SddNode::Literal { var: feature, positive: true });
                    let neg = b.node(SddNode::Literal { var: feature, positive: false });
                    b.node(SddNode::Decision {
                        vtree: internal(p),
                        elements: vec![Element { prime: pos, sub: hi }, Element { prime: neg, sub: lo }],
                    })
                }
            }
        };
    }
    let root = map[obdd.root()];
    let sdd = Sdd::new(vtree, b.nodes, root).expect("construction is normalized");
    Ok(sdd.compact())
}

type NodeKey = (u8, usize, usize, Vec<(usize, usize)>);

/// Hash-consing arena for SDD construction.
#[derive(Debug, Default)]
struct Builder {
    nodes: Vec<SddNode>,
    unique: BTreeMap<NodeKey, NodeId>,
}

impl Builder {
    fn node(&mut self, node: SddNode) -> NodeId {
        let key = match &node {
            SddNode::False => (0, 0, 0, Vec::new()),
            SddNode::True => (1, 0, 0, Vec::new()),
            SddNode::Literal { var, positive } => (2, *var, usize::from(*positive), Vec::new()),
            SddNode::Decision { vtree, elements } => {
                let mut es: Vec<(usize, usize)> = elements.iter().map(|e| (e.prime.0, e.sub.0)).collect();
                es.sort_unstable();
                (3, vtree.0, 0, es)
            }
        };
        if let Some(&id) = self.unique.get(&key) {
            return id;
        }
        let id = NodeId(self.nodes.len());
        self.nodes.push(node);
        self.unique.insert(key, id);
        id
    }
}

/// Compiles a truth table into a compressed, trimmed SDD over `vtree`.
/// `table[mask]` is the value at the point where variable `i` is
/// `mask >> (i - 1) & 1`.
pub fn compile_truth_table(vtree: Arc<Vtree>, table: &[bool]) -> Result<Sdd, GenError> {
    let m = vtree.num_vars();
    if m > MAX_TABLE_VARS {
        return Err(GenError::TooManyVars { m, max: MAX_TABLE_VARS });
    }
    if table.len() != 1 << m {
        return Err(GenError::TableLength {
            expected: 1 << m,
            got: table.len(),
        });
    }
    let vars: Vec<Vec<usize>> = (0..vtree.len()).map(|i| vtree.vars_below(VtreeId(i))).collect();
    let mut c = Compiler {
        vtree: &vtree,
        vars,
        b: Builder::default(),
        memo: BTreeMap::new(),
    };
    let f = c.b.node(SddNode::False);
    let t = c.b.node(SddNode::True);
    // Re-index the table over the root's variable order.
    let root = vtree.root();
    let root_vars = c.vars[root.0].clone();
    let local: Vec<bool> = (0..1usize << m)
        .map(|idx| {
            let mask = root_vars
                .iter()
                .enumerate()
                .fold(0usize, |acc, (bit, &var)| acc | ((idx >> bit) & 1) << (var - 1));
            table[mask]
        })
        .collect();
    let root_id = c.compile(root, &local, f, t);
    let nodes = c.b.nodes;
    Ok(Sdd::new(vtree.clone(), nodes, root_id)
        .expect("compiled diagram is normalized")
        .compact())
}

struct Compiler<'a> {
    vtree: &'a Vtree,
    vars: Vec<Vec<usize>>,
    b: Builder,
    memo: BTreeMap<(usize, Vec<bool>), NodeId>,
}

impl Compiler<'_> {
    /// `table` is indexed by assignments to `vars[v]`, bit `k` for the
    /// `k`-th variable.
    fn compile(&mut self, v: VtreeId, table: &[bool], f: NodeId, t: NodeId) -> NodeId {
        if table.iter().all(|&x| !x) {
            return f;
        }
        if table.iter().all(|&x| x) {
            return t;
        }
        if let Some(&id) = self.memo.get(&(v.0, table.to_vec())) {
            return id;
        }
        let id = match self.vtree.node(v) {
            VtreeNode::Leaf { var } => self.b.node(SddNode::Literal {
                var,
                positive: table[1],
            }),
            VtreeNode::Internal { left, right } => {
                let (nl, nr) = (self.vars[left.0].len(), self.vars[right.0].len());
                // vars[v] lists left variables first, then right ones.
                let mut groups: Vec<(Vec<bool>, Vec<bool>)> = Vec::new();
                for alpha in 0..1usize << nl {
                    let sub: Vec<bool> = (0..1usize << nr).map(|beta| table[alpha | beta << nl]).collect();
                    match groups.iter_mut().find(|(s, _)| *s == sub) {
                        Some((_, prime)) => prime[alpha] = true,
                        None => {
                            let mut prime = vec![false; 1 << nl];
                            prime[alpha] = true;
                            groups.push((sub, prime));
                        }
                    }
                }
                if groups.len() == 1 {
                    let sub = groups.pop().expect("one group").0;
                    self.compile(right, &sub, f, t)
                } else if groups.len() == 2
                    && groups.iter().any(|(s, _)| s.iter().all(|&x| x))
                    && groups.iter().any(|(s, _)| s.iter().all(|&x| !x))
                {
                    let prime = &groups.iter().find(|(s, _)| s[0]).expect("true group").1;
                    self.compile(left, prime, f, t)
                } else {
                    let mut elements = Vec::with_capacity(groups.len());
                    for (sub, prime) in &groups {
                        let p = self.compile(left, prime, f, t);
                        let s = self.compile(right, sub, f, t);
                        elements.push(Element { prime: p, sub: s });
                    }
                    self.b.node(SddNode::Decision { vtree: v, elements })
                }
            }
        };
        self.memo.insert((v.0, table.to_vec()), id);
        id
    }
}

/// A random full binary vtree over `1..=m` with shuffled leaves.
pub fn random_vtree(m: usize, rng: &mut GenRng) -> Vtree {
    let mut vars: Vec<usize> = (1..=m).collect();
    vars.shuffle(rng);
    let mut nodes = Vec::with_capacity(2 * m - 1);
    build_vtree(&vars, rng, &mut nodes);
    Vtree::new(nodes).expect("random vtree is well formed")
}

fn build_vtree(vars: &[usize], rng: &mut GenRng, nodes: &mut Vec<VtreeNode>) -> VtreeId {
    if vars.len() == 1 {
        nodes.push(VtreeNode::Leaf { var: vars[0] });
        return VtreeId(nodes.len() - 1);
    }
    let split = rng.random_range(1..vars.len());
    let left = build_vtree(&vars[..split], rng, nodes);
    let right = build_vtree(&vars[split..], rng, nodes);
    nodes.push(VtreeNode::Internal { left, right });
    VtreeId(nodes.len() - 1)
}

/// A random non-constant truth table over `m` variables; `density` is the
/// probability of a 1.
pub fn random_table(m: usize, density: f64, rng: &mut GenRng) -> Vec<bool> {
    loop {
        let table: Vec<bool> = (0..1usize << m).map(|_| rng.random_bool(density)).collect();
        if table.iter().any(|&x| x) && table.iter().any(|&x| !x) {
            return table;
        }
    }
}

/// A random non-constant SDD over a random vtree, compiled from a random
/// truth table.
pub fn random_sdd(m: usize, seed: u64) -> Result<Sdd, GenError> {
    if m < 2 {
        return Err(GenError::TooFewFeatures(m));
    }
    if m > MAX_TABLE_VARS {
        return Err(GenError::TooManyVars { m, max: MAX_TABLE_VARS });
    }
    let mut rng = rng(seed);
    let vtree = Arc::new(random_vtree(m, &mut rng));
    let density = rng.random_range(0.2..0.8);
    let table = random_table(m, density, &mut rng);
    compile_truth_table(vtree, &table)
}

/// Unfolds an OBDD into an equivalent decision tree over boolean domains.
pub fn decision_tree_from_obdd(obdd: &Obdd) -> DecisionTree {
    let m = obdd.num_features();
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut stack = vec![(obdd.root(), None::<(u32, Value)>)];
    while let Some((i, parent)) = stack.pop() {
        let id = nodes.len() as u32 + 1;
        if let Some((p, value)) = parent {
            edges.push((p, id, vec![value]));
        }
        match obdd.nodes()[i] {
            ObddNode::Terminal { class } => nodes.push((id, DtSpecNode::Leaf { class })),
            ObddNode::NonTerminal { feature, lo, hi } => {
                nodes.push((id, DtSpecNode::NonTerminal { feature }));
                stack.push((hi, Some((id, 1))));
                stack.push((lo, Some((id, 0))));
            }
        }
    }
    DecisionTree::new(vec![vec![0, 1]; m], nodes, edges).expect("unfolding is a tree")
}

/// A uniformly random point of `clf`'s feature space with its prediction.
pub fn random_instance<C: Classifier + ?Sized>(clf: &C, rng: &mut GenRng) -> Instance {
    let point: Vec<Value> = (1..=clf.num_features())
        .map(|i| {
            let d = clf.domain(i);
            d[rng.random_range(0..d.len())]
        })
        .collect();
    let class = clf.predict(&point).expect("point drawn from the domains");
    Instance::new(point, class)
}
