//! CNF encodings of the feature membership problem.
//!
//! Both encodings share one layout. Selectors `s_1..s_m` come first, then
//! one block of node indicators `n^k_j` per replica `k` in ascending order
//! (followed by `σ^k` for explanation graphs), then auxiliary variables.
//! Replica 0 asserts that the selected features form a weak AXp; replica
//! `k > 0` checks that freeing feature `k` breaks it. The one-step method
//! builds replicas `0..=m` and every model is an AXp; the two-step method
//! builds replicas `0` and `t` only and every model is a weak AXp that
//! loses the property without `t`.

mod sdd;
mod xpg;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;
use core::ops::Range;
use core::str::FromStr;

use thiserror::Error;

use crate::classifier::{Class, PointError};
use crate::cnf::{CnfError, CnfFormula};
use crate::feature::FeatureSet;

pub use sdd::{encode_sdd, encode_sdd_onestep, encode_sdd_twostep, encode_sdd_weak_axp, SddCircuit, SddCircuitNode, SddBox};
pub use xpg::{encode_xpg, encode_xpg_onestep, encode_xpg_twostep, encode_xpg_weak_axp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Method {
    OneStep,
    #[default]
    TwoStep,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::OneStep => "one-step",
            Method::TwoStep => "two-step",
        }
    }
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown method {0:?}, expected one-step or two-step")]
pub struct UnknownMethod(pub String);

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "one-step" | "onestep" | "one" => Ok(Method::OneStep),
            "two-step" | "twostep" | "two" => Ok(Method::TwoStep),
            other => Err(UnknownMethod(other.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("target feature {t} is out of range 1..={m}")]
    TargetOutOfRange { t: usize, m: usize },
    #[error("instance is predicted ⊤; encode the negated diagram with the class flipped")]
    TopInstance,
    #[error("classifier is constant")]
    Constant,
    #[error(transparent)]
    Point(#[from] PointError),
    #[error("classifier predicts {predicted} at the instance, instance claims {claimed}")]
    Mismatch { predicted: Class, claimed: Class },
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

/// What a CNF variable stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarRole {
    /// Selector `s_i`.
    Selector(usize),
    /// Indicator `n^k_j`; `j` is the node label (circuit number for SDDs,
    /// node id for explanation graphs).
    Node { replica: usize, node: u32 },
    /// `σ^k`.
    Sigma(usize),
    /// Auxiliary variable introduced for node `node` of replica `replica`.
    Aux { replica: usize, node: u32 },
}

/// Mapping between CNF variables and the symbols of an encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarMap {
    m: usize,
    replicas: Vec<usize>,
    labels: Vec<u32>,
    sigma: bool,
    aux: Vec<(usize, u32)>,
}

impl VarMap {
    pub(crate) fn new(m: usize, replicas: Vec<usize>, labels: Vec<u32>, sigma: bool) -> Self {
        Self {
            m,
            replicas,
            labels,
            sigma,
            aux: Vec::new(),
        }
    }

    fn block(&self) -> usize {
        self.labels.len() + usize::from(self.sigma)
    }

    fn base(&self, replica: usize) -> Option<usize> {
        let pos = self.replicas.iter().position(|&k| k == replica)?;
        Some(self.m + pos * self.block())
    }

    pub fn num_features(&self) -> usize {
        self.m
    }

    /// Replicas present in the encoding, ascending.
    pub fn replicas(&self) -> &[usize] {
        &self.replicas
    }

    /// Labels of the encoded nodes, in block order.
    pub fn node_labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn num_vars(&self) -> u32 {
        (self.m + self.replicas.len() * self.block() + self.aux.len()) as u32
    }

    pub fn num_aux(&self) -> usize {
        self.aux.len()
    }

    /// Variable of `s_i`.
    pub fn sel(&self, i: usize) -> u32 {
        debug_assert!(i >= 1 && i <= self.m);
        i as u32
    }

    /// Variable of `n^k_j` where `j` is the position of the node in
    /// [`VarMap::node_labels`].
    pub fn node(&self, replica: usize, j: usize) -> Option<u32> {
        (j < self.labels.len()).then_some(())?;
        Some((self.base(replica)? + j + 1) as u32)
    }

    /// Variable of `n^k_j` looked up by node label.
    pub fn node_by_label(&self, replica: usize, label: u32) -> Option<u32> {
        let j = self.labels.iter().position(|&l| l == label)?;
        self.node(replica, j)
    }

    pub fn sigma(&self, replica: usize) -> Option<u32> {
        self.sigma.then_some(())?;
        Some((self.base(replica)? + self.labels.len() + 1) as u32)
    }

    pub(crate) fn new_aux(&mut self, replica: usize, node: u32) -> u32 {
        self.aux.push((replica, node));
        self.num_vars()
    }

    pub fn role(&self, var: u32) -> Option<VarRole> {
        let v = var as usize;
        if v == 0 {
            return None;
        }
        if v <= self.m {
            return Some(VarRole::Selector(v));
        }
        let offset = v - self.m - 1;
        let block = self.block();
        let pos = offset / block.max(1);
        if block > 0 && pos < self.replicas.len() {
            let replica = self.replicas[pos];
            let within = offset % block;
            return Some(if within < self.labels.len() {
                VarRole::Node {
                    replica,
                    node: self.labels[within],
                }
            } else {
                VarRole::Sigma(replica)
            });
        }
        let a = offset - self.replicas.len() * block;
        self.aux
            .get(a)
            .map(|&(replica, node)| VarRole::Aux { replica, node })
    }

    /// Display name of `var`: `s_i`, `n^k_j`, `sigma^k` or `a^k_j`.
    pub fn name(&self, var: u32) -> Option<String> {
        Some(match self.role(var)? {
            VarRole::Selector(i) => format!("s_{i}"),
            VarRole::Node { replica, node } => format!("n^{replica}_{node}"),
            VarRole::Sigma(replica) => format!("sigma^{replica}"),
            VarRole::Aux { replica, node } => format!("a^{replica}_{node}"),
        })
    }

    /// Selected features of a model given as `values[var - 1]`.
    pub fn decode_selectors(&self, values: &[bool]) -> FeatureSet {
        (1..=self.m).filter(|&i| values[i - 1]).collect()
    }
}

/// An encoded query: the formula, its variable map, and the clause range
/// contributed by each replica. The unit on `s_t` belongs to replica 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    pub cnf: CnfFormula,
    pub map: VarMap,
    pub groups: Vec<(usize, Range<usize>)>,
}

impl Encoding {
    /// Clauses contributed by `replica`, as DIMACS integers.
    pub fn group(&self, replica: usize) -> Vec<Vec<i32>> {
        self.groups
            .iter()
            .filter(|(k, _)| *k == replica)
            .flat_map(|(_, r)| self.cnf.clauses()[r.clone()].iter())
            .map(|c| c.iter().map(|l| l.to_dimacs()).collect())
            .collect()
    }

    pub fn dimacs(&self) -> String {
        write_dimacs(&self.cnf, Some(&self.map))
    }
}

/// DIMACS text of `cnf`, preceded by `c map <var> <name>` lines when a map
/// is given.
pub fn write_dimacs(cnf: &CnfFormula, map: Option<&VarMap>) -> String {
    let mut out = String::new();
    if let Some(map) = map {
        for var in 1..=cnf.num_vars() {
            if let Some(name) = map.name(var) {
                let _ = writeln!(out, "c map {var} {name}");
            }
        }
    }
    let _ = writeln!(out, "p cnf {} {}", cnf.num_vars(), cnf.num_clauses());
    for clause in cnf.clauses() {
        for lit in clause {
            let _ = write!(out, "{} ", lit.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

pub(crate) fn check_target(t: usize, m: usize) -> Result<(), EncodeError> {
    if t == 0 || t > m {
        return Err(EncodeError::TargetOutOfRange { t, m });
    }
    Ok(())
}

/// Replica list for a method.
pub(crate) fn replicas_for(method: Method, m: usize, t: usize) -> Vec<usize> {
    match method {
        Method::OneStep => (0..=m).collect(),
        Method::TwoStep => alloc::vec![0, t],
    }
}
