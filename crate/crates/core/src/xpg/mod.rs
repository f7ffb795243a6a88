//! Explanation graphs and the classifiers that map onto them.
//!
//! An OBDD or decision tree together with an instance `(v, c)` yields an
//! [`XpGraph`] on the same DAG: terminals of class `c` are labeled 1, the
//! others 0, and an edge is labeled 1 iff its literal is consistent with `v`.

mod dt;
mod graph;
mod obdd;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::classifier::{Class, Classifier, PointError};
use crate::feature::Instance;

pub use dt::{DecisionTree, DtEdge, DtError, DtNode, DtSpecNode};
pub use graph::{SigmaLengthError, XpGraph, XpgEdge, XpgError, XpgNodeKind};
pub use obdd::{Obdd, ObddError, ObddNode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("classifier is constant")]
    Constant,
    #[error(transparent)]
    Point(#[from] PointError),
    #[error("classifier predicts {predicted} at the instance, instance claims {claimed}")]
    Mismatch { predicted: Class, claimed: Class },
    #[error(transparent)]
    Graph(#[from] XpgError),
}

fn check_instance<C: Classifier>(clf: &C, instance: &Instance) -> Result<(), BuildError> {
    let predicted = clf.predict(&instance.point)?;
    if predicted != instance.class {
        return Err(BuildError::Mismatch {
            predicted,
            claimed: instance.class,
        });
    }
    Ok(())
}

/// Maps `obdd` and `instance` to their explanation graph. Nodes unreachable
/// from the root are left out; parents are listed before children.
pub fn build_xpg_from_obdd(obdd: &Obdd, instance: &Instance) -> Result<XpGraph, BuildError> {
    if obdd.is_constant() {
        return Err(BuildError::Constant);
    }
    check_instance(obdd, instance)?;
    let reach = obdd.reachable();
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for i in (0..obdd.len()).rev().filter(|&i| reach[i]) {
        let id = obdd.id(i);
        match obdd.nodes()[i] {
            ObddNode::Terminal { class } => nodes.push((
                id,
                XpgNodeKind::Terminal {
                    label: class == instance.class,
                },
            )),
            ObddNode::NonTerminal { feature, lo, hi } => {
                nodes.push((id, XpgNodeKind::NonTerminal { feature }));
                let v = instance.value(feature);
                edges.push((id, obdd.id(lo), v == 0));
                edges.push((id, obdd.id(hi), v != 0));
            }
        }
    }
    Ok(XpGraph::new(obdd.num_features(), nodes, edges)?)
}

/// Maps a decision tree and an instance to a tree explanation graph. An
/// edge is labeled 1 iff the instance value lies in its value set.
pub fn build_xpg_from_dt(dt: &DecisionTree, instance: &Instance) -> Result<XpGraph, BuildError> {
    if dt.is_constant() {
        return Err(BuildError::Constant);
    }
    check_instance(dt, instance)?;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    // Preorder keeps parents first and follows edge order.
    let mut stack = vec![dt.root()];
    while let Some(i) = stack.pop() {
        let id = dt.id(i);
        match &dt.nodes()[i] {
            DtNode::Leaf { class } => nodes.push((
                id,
                XpgNodeKind::Terminal {
                    label: *class == instance.class,
                },
            )),
            DtNode::NonTerminal { feature, edges: out } => {
                nodes.push((id, XpgNodeKind::NonTerminal { feature: *feature }));
                let v = instance.value(*feature);
                for e in out {
                    edges.push((id, dt.id(e.child), e.values.contains(&v)));
                }
                stack.extend(out.iter().rev().map(|e| e.child));
            }
        }
    }
    Ok(XpGraph::new(dt.num_features(), nodes, edges)?)
}

/// Classifiers that reduce to explanation graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphClassifier {
    Obdd(Obdd),
    DecisionTree(DecisionTree),
}

impl GraphClassifier {
    pub fn build_xpg(&self, instance: &Instance) -> Result<XpGraph, BuildError> {
        match self {
            GraphClassifier::Obdd(o) => build_xpg_from_obdd(o, instance),
            GraphClassifier::DecisionTree(t) => build_xpg_from_dt(t, instance),
        }
    }

    /// Number of nodes reachable from the root.
    pub fn size(&self) -> usize {
        match self {
            GraphClassifier::Obdd(o) => o.reachable_count(),
            GraphClassifier::DecisionTree(t) => t.len(),
        }
    }
}

impl Classifier for GraphClassifier {
    fn num_features(&self) -> usize {
        match self {
            GraphClassifier::Obdd(o) => Classifier::num_features(o),
            GraphClassifier::DecisionTree(t) => Classifier::num_features(t),
        }
    }

    fn domain(&self, feature: usize) -> &[crate::Value] {
        match self {
            GraphClassifier::Obdd(o) => o.domain(feature),
            GraphClassifier::DecisionTree(t) => t.domain(feature),
        }
    }

    fn predict(&self, point: &[crate::Value]) -> Result<Class, PointError> {
        match self {
            GraphClassifier::Obdd(o) => o.predict(point),
            GraphClassifier::DecisionTree(t) => t.predict(point),
        }
    }
}

/// Node-by-node structural summary keyed by external id, used to compare
/// graphs regardless of arena order.
pub fn structure_by_id(xpg: &XpGraph) -> BTreeMap<u32, (XpgNodeKind, Vec<(u32, bool)>)> {
    (0..xpg.len())
        .map(|i| {
            let mut out: Vec<(u32, bool)> = xpg.out_edges(i).map(|e| (xpg.id(e.to), e.label)).collect();
            out.sort_unstable();
            (xpg.id(i), (xpg.kind(i), out))
        })
        .collect()
}
