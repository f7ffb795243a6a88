//! Structured sentential decision diagrams.
//!
//! An [`Sdd`] is an arena of nodes in topological order (children before
//! parents). Decision nodes hold `(prime, sub)` elements normalized for an
//! internal vtree node: primes live in its left subtree, subs in its right.
//! Only the queries and transformations the explainers need are provided:
//! evaluation, conditioning, negation and consistency. None of them
//! re-canonicalizes; conditioning is structural replacement plus local
//! simplification.

mod vtree;

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::classifier::{Class, Classifier, PointError, Value, BOOLEAN_DOMAIN};

pub use vtree::{Vtree, VtreeError, VtreeId, VtreeNode};

/// Index of a node in an [`Sdd`] arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    pub prime: NodeId,
    pub sub: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SddNode {
    False,
    True,
    Literal { var: usize, positive: bool },
    Decision { vtree: VtreeId, elements: Vec<Element> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SddError {
    #[error("diagram has no nodes")]
    Empty,
    #[error("root {0} is not a node of the diagram")]
    RootOutOfRange(usize),
    #[error("node {node} references node {child}, which is not declared before it")]
    ForwardReference { node: usize, child: usize },
    #[error("node {node} uses vtree node {vtree}, which does not exist")]
    UnknownVtree { node: usize, vtree: usize },
    #[error("decision node {node} is normalized for vtree leaf {vtree}")]
    DecisionOnLeaf { node: usize, vtree: usize },
    #[error("literal node {node} mentions variable {var}, vtree has {m} variables")]
    LiteralOutOfRange { node: usize, var: usize, m: usize },
    #[error("decision node {0} has no elements")]
    EmptyElements(usize),
    #[error("element {prime}/{sub} of node {node} is not normalized for its vtree node")]
    NotNormalized { node: usize, prime: usize, sub: usize },
    #[error("point has {got} values, diagram has {expected} variables")]
    PointLength { expected: usize, got: usize },
    #[error("term assigns variable {var}, diagram has {m} variables")]
    TermOutOfRange { var: usize, m: usize },
}

/// A consistent term: a partial assignment of variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Term(BTreeMap<usize, bool>);

impl Term {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assigns `var`; a variable appears at most once, later calls overwrite.
    pub fn set(&mut self, var: usize, value: bool) -> &mut Self {
        self.0.insert(var, value);
        self
    }

    pub fn get(&self, var: usize) -> Option<bool> {
        self.0.get(&var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.0.iter().map(|(&v, &b)| (v, b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn to_slots(&self, m: usize) -> Result<Vec<Option<bool>>, SddError> {
        let mut slots = vec![None; m];
        for (var, value) in self.iter() {
            if var == 0 || var > m {
                return Err(SddError::TermOutOfRange { var, m });
            }
            slots[var - 1] = Some(value);
        }
        Ok(slots)
    }
}

impl FromIterator<(usize, bool)> for Term {
    fn from_iter<I: IntoIterator<Item = (usize, bool)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// An SDD over the variables of its vtree. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sdd {
    vtree: Arc<Vtree>,
    nodes: Vec<SddNode>,
    root: NodeId,
}

impl Sdd {
    /// Checks the structural invariants: topological order, element
    /// normalization against the vtree, literal ranges.
    pub fn new(vtree: Arc<Vtree>, nodes: Vec<SddNode>, root: NodeId) -> Result<Self, SddError> {
        if nodes.is_empty() {
            return Err(SddError::Empty);
        }
        if root.0 >= nodes.len() {
            return Err(SddError::RootOutOfRange(root.0));
        }
        let m = vtree.num_vars();
        let scope = |nodes: &[SddNode], id: NodeId| -> Option<VtreeId> {
            match nodes[id.0] {
                SddNode::Literal { var, .. } => Some(vtree.leaf(var)),
                SddNode::Decision { vtree, .. } => Some(vtree),
                SddNode::True | SddNode::False => None,
            }
        };
        for (id, node) in nodes.iter().enumerate() {
            match node {
                SddNode::False | SddNode::True => {}
                SddNode::Literal { var, .. } => {
                    if *var == 0 || *var > m {
                        return Err(SddError::LiteralOutOfRange { node: id, var: *var, m });
                    }
                }
                SddNode::Decision { vtree: v, elements } => {
                    if v.0 >= vtree.len() {
                        return Err(SddError::UnknownVtree { node: id, vtree: v.0 });
                    }
                    let VtreeNode::Internal { left, right } = vtree.node(*v) else {
                        return Err(SddError::DecisionOnLeaf { node: id, vtree: v.0 });
                    };
                    if elements.is_empty() {
                        return Err(SddError::EmptyElements(id));
                    }
                    for e in elements {
                        for child in [e.prime, e.sub] {
                            if child.0 >= id {
                                return Err(SddError::ForwardReference { node: id, child: child.0 });
                            }
                        }
                        let prime_ok = scope(&nodes, e.prime).is_none_or(|s| vtree.contains(left, s));
                        let sub_ok = scope(&nodes, e.sub).is_none_or(|s| vtree.contains(right, s));
                        if !prime_ok || !sub_ok {
                            return Err(SddError::NotNormalized {
                                node: id,
                                prime: e.prime.0,
                                sub: e.sub.0,
                            });
                        }
                    }
                }
            }
        }
        Ok(Self { vtree, nodes, root })
    }

    /// The constant diagram over `vtree`.
    pub fn constant(vtree: Arc<Vtree>, value: bool) -> Self {
        let node = if value { SddNode::True } else { SddNode::False };
        Self {
            vtree,
            nodes: vec![node],
            root: NodeId(0),
        }
    }

    pub fn vtree(&self) -> &Arc<Vtree> {
        &self.vtree
    }

    pub fn num_vars(&self) -> usize {
        self.vtree.num_vars()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &SddNode {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> &[SddNode] {
        &self.nodes
    }

    /// Arena size, including nodes unreachable from the root.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Marks nodes reachable from the root.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        seen[self.root.0] = true;
        for id in (0..self.nodes.len()).rev() {
            if !seen[id] {
                continue;
            }
            if let SddNode::Decision { elements, .. } = &self.nodes[id] {
                for e in elements {
                    seen[e.prime.0] = true;
                    seen[e.sub.0] = true;
                }
            }
        }
        seen
    }

    pub fn reachable_count(&self) -> usize {
        self.reachable().iter().filter(|&&r| r).count()
    }

    /// Variables with a literal reachable from the root, ascending.
    pub fn mentioned_vars(&self) -> Vec<usize> {
        let reach = self.reachable();
        let mut vars: Vec<usize> = self
            .nodes
            .iter()
            .zip(&reach)
            .filter(|(_, &r)| r)
            .filter_map(|(n, _)| match n {
                SddNode::Literal { var, .. } => Some(*var),
                _ => None,
            })
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Drops nodes unreachable from the root, keeping topological order.
    pub fn compact(&self) -> Sdd {
        let reach = self.reachable();
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (id, node) in self.nodes.iter().enumerate() {
            if !reach[id] {
                continue;
            }
            remap[id] = nodes.len();
            nodes.push(match node {
                SddNode::Decision { vtree, elements } => SddNode::Decision {
                    vtree: *vtree,
                    elements: elements
                        .iter()
                        .map(|e| Element {
                            prime: NodeId(remap[e.prime.0]),
                            sub: NodeId(remap[e.sub.0]),
                        })
                        .collect(),
                },
                other => other.clone(),
            });
        }
        Sdd {
            vtree: self.vtree.clone(),
            nodes,
            root: NodeId(remap[self.root.0]),
        }
    }

    /// Value of the diagram at a full assignment; `point[i]` is variable
    /// `i + 1`. Every node is visited once.
    pub fn evaluate(&self, point: &[bool]) -> Result<bool, SddError> {
        let m = self.num_vars();
        if point.len() != m {
            return Err(SddError::PointLength {
                expected: m,
                got: point.len(),
            });
        }
        let mut value = vec![false; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            value[id] = match node {
                SddNode::False => false,
                SddNode::True => true,
                SddNode::Literal { var, positive } => point[var - 1] == *positive,
                SddNode::Decision { elements, .. } => elements
                    .iter()
                    .any(|e| value[e.prime.0] && value[e.sub.0]),
            };
        }
        Ok(value[self.root.0])
    }

    /// `self|term`: literals on assigned variables become constants, then
    /// elements with a ⊥ prime are dropped and decision nodes left with no
    /// elements, or with only ⊥ subs, become ⊥. Node ids are preserved.
    pub fn condition(&self, term: &Term) -> Result<Sdd, SddError> {
        let fixed = term.to_slots(self.num_vars())?;
        let mut nodes: Vec<SddNode> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let new = match node {
                SddNode::Literal { var, positive } => match fixed[var - 1] {
                    Some(value) if value == *positive => SddNode::True,
                    Some(_) => SddNode::False,
                    None => node.clone(),
                },
                SddNode::Decision { vtree, elements } => {
                    let kept: Vec<Element> = elements
                        .iter()
                        .filter(|e| nodes[e.prime.0] != SddNode::False)
                        .copied()
                        .collect();
                    if kept.iter().all(|e| nodes[e.sub.0] == SddNode::False) {
                        SddNode::False
                    } else {
                        SddNode::Decision {
                            vtree: *vtree,
                            elements: kept,
                        }
                    }
                }
                terminal => terminal.clone(),
            };
            nodes.push(new);
        }
        Ok(Sdd {
            vtree: self.vtree.clone(),
            nodes,
            root: self.root,
        })
    }

    /// `¬self`. Terminals and literals flip; decision nodes keep their
    /// primes and negate their subs. Negations are shared through a memo
    /// table, so the result is at most twice the size of `self`.
    pub fn negate(&self) -> Sdd {
        let n = self.nodes.len();
        let mut needed = vec![false; n];
        needed[self.root.0] = true;
        for id in (0..n).rev() {
            if let (true, SddNode::Decision { elements, .. }) = (needed[id], &self.nodes[id]) {
                for e in elements {
                    needed[e.sub.0] = true;
                }
            }
        }
        let mut nodes = self.nodes.clone();
        let mut negation = vec![usize::MAX; n];
        for id in 0..n {
            if !needed[id] {
                continue;
            }
            let neg = match &self.nodes[id] {
                SddNode::False => SddNode::True,
                SddNode::True => SddNode::False,
                SddNode::Literal { var, positive } => SddNode::Literal {
                    var: *var,
                    positive: !*positive,
                },
                SddNode::Decision { vtree, elements } => SddNode::Decision {
                    vtree: *vtree,
                    elements: elements
                        .iter()
                        .map(|e| Element {
                            prime: e.prime,
                            sub: NodeId(negation[e.sub.0]),
                        })
                        .collect(),
                },
            };
            negation[id] = nodes.len();
            nodes.push(neg);
        }
        Sdd {
            vtree: self.vtree.clone(),
            nodes,
            root: NodeId(negation[self.root.0]),
        }
        .compact()
    }

    /// `true` iff some full assignment satisfies the diagram. One bottom-up
    /// pass; sound because primes and subs mention disjoint variables.
    pub fn is_consistent(&self) -> bool {
        self.consistent_with(&vec![None; self.num_vars()])
    }

    /// `is_consistent(condition(term))` without materializing the
    /// conditioned diagram.
    pub fn consistency_under(&self, fixed: &Term) -> Result<bool, SddError> {
        Ok(self.consistent_with(&fixed.to_slots(self.num_vars())?))
    }

    /// Consistency with `fixed[var - 1]` pinning variables.
    pub(crate) fn consistent_with(&self, fixed: &[Option<bool>]) -> bool {
        let mut consistent = vec![false; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            consistent[id] = match node {
                SddNode::False => false,
                SddNode::True => true,
                SddNode::Literal { var, positive } => {
                    fixed[var - 1].is_none_or(|value| value == *positive)
                }
                SddNode::Decision { elements, .. } => elements
                    .iter()
                    .any(|e| consistent[e.prime.0] && consistent[e.sub.0]),
            };
        }
        consistent[self.root.0]
    }
}

impl Classifier for Sdd {
    fn num_features(&self) -> usize {
        self.num_vars()
    }

    fn domain(&self, _feature: usize) -> &[Value] {
        &BOOLEAN_DOMAIN
    }

    fn predict(&self, point: &[Value]) -> Result<Class, PointError> {
        self.check_point(point)?;
        let bits: Vec<bool> = point.iter().map(|&v| v == 1).collect();
        let value = self.evaluate(&bits).expect("length checked");
        Ok(Class::from(value))
    }
}
