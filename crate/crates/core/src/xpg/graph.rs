use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::feature::FeatureSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum XpgNodeKind {
    /// Non-terminal tested on 1-based `feature`, i.e. selector `s_feature`.
    NonTerminal { feature: usize },
    /// Terminal with label `true` (1) or `false` (0).
    Terminal { label: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct XpgEdge {
    /// Arena index of the source node.
    pub from: usize,
    /// Arena index of the target node.
    pub to: usize,
    pub label: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XpgError {
    #[error("graph has no nodes")]
    Empty,
    #[error("node id {0} declared twice")]
    DuplicateId(u32),
    #[error("edge references undeclared node {0}")]
    UnknownNode(u32),
    #[error("node {id} tests feature {feature}, graph has {m} features")]
    FeatureOutOfRange { id: u32, feature: usize, m: usize },
    #[error("graph has no root (no node with indegree 0)")]
    NoRoot,
    #[error("multiple roots: nodes {0:?} have indegree 0")]
    MultipleRoots(Vec<u32>),
    #[error("graph contains a cycle")]
    Cycle,
    #[error("terminal {0} has outgoing edges")]
    TerminalWithEdges(u32),
    #[error("non-terminal {0} has no outgoing edge")]
    NonTerminalWithoutEdges(u32),
    #[error("non-terminal {0} has more than one outgoing edge labeled 1")]
    MultipleOneEdges(u32),
    #[error("no terminal labeled 1 is reachable from the root through edges labeled 1")]
    NoReachableOneTerminal,
}

/// An explanation graph: an instance-specialized DAG with 0/1-labeled edges
/// and 0/1-labeled terminals over selectors `s_1..s_m`.
///
/// Node and edge order are kept as given so that serialization is stable.
/// Nodes keep their external ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XpGraph {
    m: usize,
    ids: Vec<u32>,
    kinds: Vec<XpgNodeKind>,
    edges: Vec<XpgEdge>,
    root: usize,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

impl XpGraph {
    /// Builds and validates a graph from `(id, kind)` nodes and
    /// `(from-id, to-id, label)` edges.
    pub fn new(
        m: usize,
        nodes: Vec<(u32, XpgNodeKind)>,
        edges: Vec<(u32, u32, bool)>,
    ) -> Result<Self, XpgError> {
        if nodes.is_empty() {
            return Err(XpgError::Empty);
        }
        let mut index = BTreeMap::new();
        for (i, (id, kind)) in nodes.iter().enumerate() {
            if index.insert(*id, i).is_some() {
                return Err(XpgError::DuplicateId(*id));
            }
            if let XpgNodeKind::NonTerminal { feature } = *kind {
                if feature == 0 || feature > m {
                    return Err(XpgError::FeatureOutOfRange { id: *id, feature, m });
                }
            }
        }
        let lookup = |id: u32| index.get(&id).copied().ok_or(XpgError::UnknownNode(id));
        let edges = edges
            .into_iter()
            .map(|(from, to, label)| {
                Ok(XpgEdge {
                    from: lookup(from)?,
                    to: lookup(to)?,
                    label,
                })
            })
            .collect::<Result<Vec<_>, XpgError>>()?;
        let (ids, kinds): (Vec<u32>, Vec<XpgNodeKind>) = nodes.into_iter().unzip();
        let n = ids.len();
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for (e, edge) in edges.iter().enumerate() {
            out_edges[edge.from].push(e);
            in_edges[edge.to].push(e);
        }
        for i in 0..n {
            match kinds[i] {
                XpgNodeKind::Terminal { .. } if !out_edges[i].is_empty() => {
                    return Err(XpgError::TerminalWithEdges(ids[i]))
                }
                XpgNodeKind::NonTerminal { .. } => {
                    if out_edges[i].is_empty() {
                        return Err(XpgError::NonTerminalWithoutEdges(ids[i]));
                    }
                    if out_edges[i].iter().filter(|&&e| edges[e].label).count() > 1 {
                        return Err(XpgError::MultipleOneEdges(ids[i]));
                    }
                }
                _ => {}
            }
        }
        let roots: Vec<usize> = (0..n).filter(|&i| in_edges[i].is_empty()).collect();
        let root = match roots.as_slice() {
            [] => return Err(XpgError::NoRoot),
            [root] => *root,
            many => return Err(XpgError::MultipleRoots(many.iter().map(|&i| ids[i]).collect())),
        };

        // Kahn's algorithm; with a single source every node is reachable iff
        // the graph is acyclic.
        let mut indegree: Vec<usize> = in_edges.iter().map(Vec::len).collect();
        let mut topo = Vec::with_capacity(n);
        let mut ready = vec![root];
        while let Some(i) = ready.pop() {
            topo.push(i);
            for &e in out_edges[i].iter().rev() {
                let j = edges[e].to;
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.push(j);
                }
            }
        }
        if topo.len() != n {
            return Err(XpgError::Cycle);
        }

        let graph = Self {
            m,
            ids,
            kinds,
            edges,
            root,
            out_edges,
            in_edges,
            topo,
        };
        match graph.kinds[graph.follow_one_edges()] {
            XpgNodeKind::Terminal { label: true } => Ok(graph),
            _ => Err(XpgError::NoReachableOneTerminal),
        }
    }

    /// End of the unique path of 1-labeled edges from the root.
    fn follow_one_edges(&self) -> usize {
        let mut at = self.root;
        while let Some(&e) = self.out_edges[at].iter().find(|&&e| self.edges[e].label) {
            at = self.edges[e].to;
        }
        at
    }

    pub fn num_features(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn id(&self, node: usize) -> u32 {
        self.ids[node]
    }

    pub fn kind(&self, node: usize) -> XpgNodeKind {
        self.kinds[node]
    }

    pub fn edges(&self) -> &[XpgEdge] {
        &self.edges
    }

    pub fn out_edges(&self, node: usize) -> impl Iterator<Item = &XpgEdge> {
        self.out_edges[node].iter().map(move |&e| &self.edges[e])
    }

    pub fn in_edges(&self, node: usize) -> impl Iterator<Item = &XpgEdge> {
        self.in_edges[node].iter().map(move |&e| &self.edges[e])
    }

    /// Nodes in a topological order starting at the root.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// Arena index of the node with external id `id`.
    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    /// Features tested by some non-terminal, ascending.
    pub fn mentioned_features(&self) -> Vec<usize> {
        let mut f: Vec<usize> = self
            .kinds
            .iter()
            .filter_map(|k| match k {
                XpgNodeKind::NonTerminal { feature } => Some(*feature),
                XpgNodeKind::Terminal { .. } => None,
            })
            .collect();
        f.sort_unstable();
        f.dedup();
        f
    }

    pub fn has_zero_terminal(&self) -> bool {
        self.kinds.contains(&XpgNodeKind::Terminal { label: false })
    }

    /// Activation of every node under selector vector `s` (`s[i - 1]` is
    /// `s_i`): the root is active; a node is active when some active parent
    /// reaches it through an edge labeled 1 or through any edge when the
    /// parent's selector is 0.
    pub fn activation(&self, s: &[bool]) -> Vec<bool> {
        let mut active = vec![false; self.kinds.len()];
        active[self.root] = true;
        for &p in &self.topo {
            if !active[p] {
                continue;
            }
            let XpgNodeKind::NonTerminal { feature } = self.kinds[p] else {
                continue;
            };
            let free = !s[feature - 1];
            for &e in &self.out_edges[p] {
                let edge = &self.edges[e];
                if edge.label || free {
                    active[edge.to] = true;
                }
            }
        }
        active
    }

    /// `σ(s)`: `true` iff no terminal labeled 0 is active.
    pub fn evaluate_sigma(&self, s: &[bool]) -> Result<bool, SigmaLengthError> {
        if s.len() != self.m {
            return Err(SigmaLengthError {
                expected: self.m,
                got: s.len(),
            });
        }
        let active = self.activation(s);
        Ok(!self
            .kinds
            .iter()
            .zip(&active)
            .any(|(k, &a)| a && *k == XpgNodeKind::Terminal { label: false }))
    }

    /// `σ` at the selector vector with `s_i = [i ∈ fixed]`.
    pub fn sigma_of(&self, fixed: &FeatureSet) -> bool {
        let s: Vec<bool> = (1..=self.m).map(|i| fixed.contains(i)).collect();
        self.evaluate_sigma(&s).expect("length matches")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("selector vector has {got} entries, graph has {expected} features")]
pub struct SigmaLengthError {
    pub expected: usize,
    pub got: usize,
}
