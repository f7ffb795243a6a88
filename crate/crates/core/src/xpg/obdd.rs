use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::classifier::{Class, Classifier, PointError, Value, BOOLEAN_DOMAIN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObddNode {
    Terminal { class: Class },
    /// `lo` and `hi` are arena indices of the 0- and 1-successor.
    NonTerminal { feature: usize, lo: usize, hi: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObddError {
    #[error("diagram has no nodes")]
    Empty,
    #[error("node id {0} declared twice")]
    DuplicateId(u32),
    #[error("node {node} references node {child}, which is not declared before it")]
    ForwardReference { node: u32, child: u32 },
    #[error("node {id} tests feature {feature}, diagram has {m} features")]
    FeatureOutOfRange { id: u32, feature: usize, m: usize },
    #[error("no variable order is consistent with every path (feature {0} repeats or order conflicts)")]
    Unordered(usize),
}

/// An ordered binary decision diagram with arbitrary class labels on its
/// terminals. The root is the last node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obdd {
    m: usize,
    ids: Vec<u32>,
    nodes: Vec<ObddNode>,
    order: Vec<usize>,
}

impl Obdd {
    /// `nodes` are `(id, node)` pairs in declaration order, children first;
    /// successor fields hold external ids. The last node is the root.
    pub fn new(m: usize, nodes: Vec<(u32, ObddNode)>) -> Result<Self, ObddError> {
        if nodes.is_empty() {
            return Err(ObddError::Empty);
        }
        let mut index = BTreeMap::new();
        let mut ids = Vec::with_capacity(nodes.len());
        let mut arena = Vec::with_capacity(nodes.len());
        for (id, node) in nodes {
            let node = match node {
                ObddNode::NonTerminal { feature, lo, hi } => {
                    if feature == 0 || feature > m {
                        return Err(ObddError::FeatureOutOfRange { id, feature, m });
                    }
                    let resolve = |child: usize| {
                        index.get(&(child as u32)).copied().ok_or(ObddError::ForwardReference {
                            node: id,
                            child: child as u32,
                        })
                    };
                    ObddNode::NonTerminal {
                        feature,
                        lo: resolve(lo)?,
                        hi: resolve(hi)?,
                    }
                }
                terminal => terminal,
            };
            if index.insert(id, arena.len()).is_some() {
                return Err(ObddError::DuplicateId(id));
            }
            ids.push(id);
            arena.push(node);
        }
        Self::from_arena(m, ids, arena)
    }

    /// Like [`Obdd::new`] but with successors already given as arena
    /// indices (`lo`, `hi` < own index).
    pub fn from_arena(m: usize, ids: Vec<u32>, nodes: Vec<ObddNode>) -> Result<Self, ObddError> {
        if nodes.is_empty() {
            return Err(ObddError::Empty);
        }
        for (i, node) in nodes.iter().enumerate() {
            if let ObddNode::NonTerminal { feature, lo, hi } = *node {
                if feature == 0 || feature > m {
                    return Err(ObddError::FeatureOutOfRange { id: ids[i], feature, m });
                }
                for child in [lo, hi] {
                    if child >= i {
                        return Err(ObddError::ForwardReference {
                            node: ids[i],
                            child: ids.get(child).copied().unwrap_or(child as u32),
                        });
                    }
                }
            }
        }
        let order = variable_order(m, &nodes)?;
        Ok(Self { m, ids, nodes, order })
    }

    pub fn num_features(&self) -> usize {
        self.m
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[ObddNode] {
        &self.nodes
    }

    pub fn id(&self, node: usize) -> u32 {
        self.ids[node]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// A variable order compatible with every path, covering all `m`
    /// features (untested features last, ascending).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        seen[self.root()] = true;
        for i in (0..self.nodes.len()).rev() {
            if let (true, ObddNode::NonTerminal { lo, hi, .. }) = (seen[i], self.nodes[i]) {
                seen[lo] = true;
                seen[hi] = true;
            }
        }
        seen
    }

    pub fn reachable_count(&self) -> usize {
        self.reachable().iter().filter(|&&r| r).count()
    }

    /// Whether all reachable terminals carry the same class.
    pub fn is_constant(&self) -> bool {
        let reach = self.reachable();
        let mut classes = self
            .nodes
            .iter()
            .zip(&reach)
            .filter(|(_, &r)| r)
            .filter_map(|(n, _)| match n {
                ObddNode::Terminal { class } => Some(*class),
                ObddNode::NonTerminal { .. } => None,
            });
        let first = classes.next();
        classes.all(|c| Some(c) == first)
    }

    /// Path from the root to the terminal reached by `point`; boolean
    /// values, anything non-zero counts as 1.
    pub fn classify(&self, point: &[Value]) -> Class {
        let mut at = self.root();
        loop {
            match self.nodes[at] {
                ObddNode::Terminal { class } => return class,
                ObddNode::NonTerminal { feature, lo, hi } => {
                    at = if point[feature - 1] == 0 { lo } else { hi };
                }
            }
        }
    }
}

impl Classifier for Obdd {
    fn num_features(&self) -> usize {
        self.m
    }

    fn domain(&self, _feature: usize) -> &[Value] {
        &BOOLEAN_DOMAIN
    }

    fn predict(&self, point: &[Value]) -> Result<Class, PointError> {
        self.check_point(point)?;
        Ok(self.classify(point))
    }
}

/// Topologically sorts the "tested above" relation between features over
/// reachable edges; fails when a feature repeats on a path or two paths
/// disagree on the order.
fn variable_order(m: usize, nodes: &[ObddNode]) -> Result<Vec<usize>, ObddError> {
    let mut before = vec![Vec::new(); m + 1];
    let mut indegree = vec![0usize; m + 1];
    let mut used = vec![false; m + 1];
    let mut seen = BTreeMap::new();
    for node in nodes {
        if let ObddNode::NonTerminal { feature, lo, hi } = *node {
            used[feature] = true;
            for child in [lo, hi] {
                if let ObddNode::NonTerminal { feature: below, .. } = nodes[child] {
                    if below == feature {
                        return Err(ObddError::Unordered(feature));
                    }
                    if seen.insert((feature, below), ()).is_none() {
                        before[feature].push(below);
                        indegree[below] += 1;
                    }
                }
            }
        }
    }
    let mut ready: Vec<usize> = (1..=m).rev().filter(|&f| used[f] && indegree[f] == 0).collect();
    let mut order = Vec::with_capacity(m);
    while let Some(f) = ready.pop() {
        order.push(f);
        for &g in before[f].iter().rev() {
            indegree[g] -= 1;
            if indegree[g] == 0 {
                ready.push(g);
            }
        }
    }
    if let Some(stuck) = (1..=m).find(|&f| used[f] && indegree[f] > 0) {
        return Err(ObddError::Unordered(stuck));
    }
    order.extend((1..=m).filter(|&f| !used[f]));
    Ok(order)
}
