use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::classifier::{Class, Classifier, PointError, Value};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DtEdge {
    /// Arena index of the child.
    pub child: usize,
    /// Values of the parent's feature admitted by this edge.
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DtNode {
    Leaf { class: Class },
    NonTerminal { feature: usize, edges: Vec<DtEdge> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DtError {
    #[error("tree has no nodes")]
    Empty,
    #[error("feature {feature} has no domain, tree has {m} features")]
    MissingDomain { feature: usize, m: usize },
    #[error("domain of feature {0} is empty or repeats a value")]
    BadDomain(usize),
    #[error("node id {0} declared twice")]
    DuplicateId(u32),
    #[error("edge references undeclared node {0}")]
    UnknownNode(u32),
    #[error("node {id} tests feature {feature}, tree has {m} features")]
    FeatureOutOfRange { id: u32, feature: usize, m: usize },
    #[error("node {0} has more than one parent")]
    NotATree(u32),
    #[error("tree has {0} parentless nodes, expected exactly one root")]
    Roots(usize),
    #[error("tree contains a cycle")]
    Cycle,
    #[error("leaf {0} has outgoing edges")]
    LeafWithEdges(u32),
    #[error("edges of node {0} do not partition the domain of its feature")]
    NotAPartition(u32),
    #[error("feature {feature} is tested twice on a path through node {id}")]
    RepeatedFeature { id: u32, feature: usize },
}

/// A decision tree over finite (possibly multi-valued) domains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTree {
    domains: Vec<Vec<Value>>,
    ids: Vec<u32>,
    nodes: Vec<DtNode>,
    root: usize,
}

/// Description of a node before id resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DtSpecNode {
    Leaf { class: Class },
    NonTerminal { feature: usize },
}

impl DecisionTree {
    /// `domains[i - 1]` is the domain of feature `i`; edges are
    /// `(from-id, to-id, values)`. Each feature may be tested at most once
    /// per root-to-leaf path.
    pub fn new(
        domains: Vec<Vec<Value>>,
        nodes: Vec<(u32, DtSpecNode)>,
        edges: Vec<(u32, u32, Vec<Value>)>,
    ) -> Result<Self, DtError> {
        let m = domains.len();
        for (i, d) in domains.iter().enumerate() {
            let mut sorted = d.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if d.is_empty() || sorted.len() != d.len() {
                return Err(DtError::BadDomain(i + 1));
            }
        }
        if nodes.is_empty() {
            return Err(DtError::Empty);
        }
        let mut index = BTreeMap::new();
        for (i, (id, spec)) in nodes.iter().enumerate() {
            if index.insert(*id, i).is_some() {
                return Err(DtError::DuplicateId(*id));
            }
            if let DtSpecNode::NonTerminal { feature } = spec {
                if *feature == 0 || *feature > m {
                    return Err(DtError::FeatureOutOfRange { id: *id, feature: *feature, m });
                }
            }
        }
        let mut arena: Vec<DtNode> = nodes
            .iter()
            .map(|(_, spec)| match spec {
                DtSpecNode::Leaf { class } => DtNode::Leaf { class: *class },
                DtSpecNode::NonTerminal { feature } => DtNode::NonTerminal {
                    feature: *feature,
                    edges: Vec::new(),
                },
            })
            .collect();
        let ids: Vec<u32> = nodes.iter().map(|(id, _)| *id).collect();
        let mut parents = vec![0usize; arena.len()];
        for (from, to, values) in edges {
            let f = *index.get(&from).ok_or(DtError::UnknownNode(from))?;
            let t = *index.get(&to).ok_or(DtError::UnknownNode(to))?;
            parents[t] += 1;
            if parents[t] > 1 {
                return Err(DtError::NotATree(to));
            }
            match &mut arena[f] {
                DtNode::Leaf { .. } => return Err(DtError::LeafWithEdges(from)),
                DtNode::NonTerminal { edges, .. } => edges.push(DtEdge { child: t, values }),
            }
        }
        let roots: Vec<usize> = (0..arena.len()).filter(|&i| parents[i] == 0).collect();
        let root = match roots.as_slice() {
            [r] => *r,
            [] => return Err(DtError::Cycle),
            many => return Err(DtError::Roots(many.len())),
        };
        for (i, node) in arena.iter().enumerate() {
            if let DtNode::NonTerminal { feature, edges } = node {
                let mut covered: Vec<Value> = edges.iter().flat_map(|e| e.values.iter().copied()).collect();
                covered.sort_unstable();
                let mut domain = domains[feature - 1].clone();
                domain.sort_unstable();
                if covered != domain {
                    return Err(DtError::NotAPartition(ids[i]));
                }
            }
        }

        // Walk from the root tracking features on the current path.
        let mut visited = 0;
        let mut stack = vec![(root, Vec::<usize>::new())];
        while let Some((i, mut path)) = stack.pop() {
            visited += 1;
            if let DtNode::NonTerminal { feature, edges } = &arena[i] {
                if path.contains(feature) {
                    return Err(DtError::RepeatedFeature { id: ids[i], feature: *feature });
                }
                path.push(*feature);
                for e in edges {
                    stack.push((e.child, path.clone()));
                }
            }
        }
        if visited != arena.len() {
            return Err(DtError::Cycle);
        }
        Ok(Self {
            domains,
            ids,
            nodes: arena,
            root,
        })
    }

    pub fn num_features(&self) -> usize {
        self.domains.len()
    }

    pub fn domains(&self) -> &[Vec<Value>] {
        &self.domains
    }

    pub fn nodes(&self) -> &[DtNode] {
        &self.nodes
    }

    pub fn id(&self, node: usize) -> u32 {
        self.ids[node]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        let mut classes = self.nodes.iter().filter_map(|n| match n {
            DtNode::Leaf { class } => Some(*class),
            DtNode::NonTerminal { .. } => None,
        });
        let first = classes.next();
        classes.all(|c| Some(c) == first)
    }
}

impl Classifier for DecisionTree {
    fn num_features(&self) -> usize {
        self.domains.len()
    }

    fn domain(&self, feature: usize) -> &[Value] {
        &self.domains[feature - 1]
    }

    fn predict(&self, point: &[Value]) -> Result<Class, PointError> {
        self.check_point(point)?;
        let mut at = self.root;
        loop {
            match &self.nodes[at] {
                DtNode::Leaf { class } => return Ok(*class),
                DtNode::NonTerminal { feature, edges } => {
                    let value = point[feature - 1];
                    at = edges
                        .iter()
                        .find(|e| e.values.contains(&value))
                        .map(|e| e.child)
                        .expect("edges partition the domain");
                }
            }
        }
    }
}
