use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

/// Index of a node in a [`Vtree`] arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VtreeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VtreeNode {
    /// Leaf carrying a 1-based variable (feature) index.
    Leaf { var: usize },
    Internal { left: VtreeId, right: VtreeId },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VtreeError {
    #[error("vtree has no nodes")]
    Empty,
    #[error("node {node} references missing node {child}")]
    Dangling { node: usize, child: usize },
    #[error("node {child} has more than one parent")]
    SharedChild { child: usize },
    #[error("internal node {0} has the same node as both children")]
    DegenerateInternal(usize),
    #[error("variable {0} labels more than one leaf")]
    DuplicateVar(usize),
    #[error("leaf variables must be exactly 1..={m}, variable {var} is out of range")]
    VarOutOfRange { var: usize, m: usize },
    #[error("vtree has {0} parentless nodes, expected exactly one root")]
    Roots(usize),
    #[error("vtree contains a cycle")]
    Cycle,
}

/// A full binary tree whose leaves are the classifier's variables.
///
/// The leaf set is exactly `{1..m}`. Nodes carry pre/post-order stamps so
/// that subtree containment is a constant-time interval test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vtree {
    nodes: Vec<VtreeNode>,
    root: VtreeId,
    /// `leaf_of[var - 1]`.
    leaf_of: Vec<VtreeId>,
    enter: Vec<usize>,
    exit: Vec<usize>,
}

impl Vtree {
    /// Validates `nodes` as a full binary tree and locates its root.
    pub fn new(nodes: Vec<VtreeNode>) -> Result<Self, VtreeError> {
        if nodes.is_empty() {
            return Err(VtreeError::Empty);
        }
        let n = nodes.len();
        let mut parent_count = vec![0usize; n];
        let mut leaves = 0;
        for (id, node) in nodes.iter().enumerate() {
            match *node {
                VtreeNode::Leaf { .. } => leaves += 1,
                VtreeNode::Internal { left, right } => {
                    for child in [left, right] {
                        if child.0 >= n {
                            return Err(VtreeError::Dangling {
                                node: id,
                                child: child.0,
                            });
                        }
                        parent_count[child.0] += 1;
                    }
                    if left == right {
                        return Err(VtreeError::DegenerateInternal(id));
                    }
                }
            }
        }
        if let Some(child) = parent_count.iter().position(|&c| c > 1) {
            return Err(VtreeError::SharedChild { child });
        }
        let roots: Vec<usize> = (0..n).filter(|&i| parent_count[i] == 0).collect();
        if roots.len() != 1 {
            // A cycle among the non-root nodes leaves every node with a
            // parent.
            return Err(if roots.is_empty() {
                VtreeError::Cycle
            } else {
                VtreeError::Roots(roots.len())
            });
        }
        let root = VtreeId(roots[0]);

        let mut seen = vec![false; leaves];
        for node in &nodes {
            if let VtreeNode::Leaf { var } = *node {
                if var == 0 || var > leaves {
                    return Err(VtreeError::VarOutOfRange { var, m: leaves });
                }
                if seen[var - 1] {
                    return Err(VtreeError::DuplicateVar(var));
                }
                seen[var - 1] = true;
            }
        }

        let mut enter = vec![usize::MAX; n];
        let mut exit = vec![0; n];
        let mut leaf_of = vec![VtreeId(0); leaves];
        let mut clock = 0;
        let mut stack = vec![(root, false)];
        let mut visited = 0;
        while let Some((id, done)) = stack.pop() {
            if done {
                exit[id.0] = clock;
                clock += 1;
                continue;
            }
            visited += 1;
            enter[id.0] = clock;
            clock += 1;
            stack.push((id, true));
            match nodes[id.0] {
                VtreeNode::Leaf { var } => leaf_of[var - 1] = id,
                VtreeNode::Internal { left, right } => {
                    stack.push((right, false));
                    stack.push((left, false));
                }
            }
        }
        if visited != n {
            // Unreachable nodes with a parent form a cycle.
            return Err(VtreeError::Cycle);
        }
        Ok(Self {
            nodes,
            root,
            leaf_of,
            enter,
            exit,
        })
    }

    /// Right-linear vtree over `order`: the left child of every internal
    /// node is a leaf.
    pub fn right_linear(order: &[usize]) -> Result<Self, VtreeError> {
        if order.is_empty() {
            return Err(VtreeError::Empty);
        }
        let mut nodes: Vec<VtreeNode> = order.iter().map(|&var| VtreeNode::Leaf { var }).collect();
        let mut right = VtreeId(order.len() - 1);
        for left in (0..order.len() - 1).rev() {
            nodes.push(VtreeNode::Internal {
                left: VtreeId(left),
                right,
            });
            right = VtreeId(nodes.len() - 1);
        }
        Self::new(nodes)
    }

    pub fn num_vars(&self) -> usize {
        self.leaf_of.len()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> VtreeId {
        self.root
    }

    pub fn node(&self, id: VtreeId) -> VtreeNode {
        self.nodes[id.0]
    }

    pub fn nodes(&self) -> &[VtreeNode] {
        &self.nodes
    }

    pub fn leaf(&self, var: usize) -> VtreeId {
        self.leaf_of[var - 1]
    }

    /// `true` when `inner` lies in the subtree rooted at `outer`.
    pub fn contains(&self, outer: VtreeId, inner: VtreeId) -> bool {
        self.enter[outer.0] <= self.enter[inner.0] && self.exit[inner.0] <= self.exit[outer.0]
    }

    /// Variables below `id`, in left-to-right order.
    pub fn vars_below(&self, id: VtreeId) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(id) = stack.pop() {
            match self.nodes[id.0] {
                VtreeNode::Leaf { var } => out.push(var),
                VtreeNode::Internal { left, right } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        out
    }
}
