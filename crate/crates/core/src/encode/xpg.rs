use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_target, replicas_for, EncodeError, Encoding, Method, VarMap};
use crate::cnf::{CnfFormula, Lit, Operand};
use crate::xpg::{XpGraph, XpgNodeKind};

struct Emitter<'a> {
    xpg: &'a XpGraph,
    cnf: CnfFormula,
    map: VarMap,
}

impl Emitter<'_> {
    fn node(&self, k: usize, j: usize) -> Lit {
        Lit::pos(self.map.node(k, j).expect("replica allocated"))
    }

    fn sigma(&self, k: usize) -> Lit {
        Lit::pos(self.map.sigma(k).expect("replica allocated"))
    }

    /// Activation of every node and `σ^k`. In replica `k > 0` the edges
    /// leaving nodes on feature `k` are always passable.
    fn replica(&mut self, k: usize) -> Result<(), EncodeError> {
        let xpg = self.xpg;
        // `n^k_p ∧ ¬s_i`, one auxiliary variable per parent.
        let mut blocked: BTreeMap<usize, Lit> = BTreeMap::new();
        self.cnf.add_unit(self.node(k, xpg.root()))?;
        for j in 0..xpg.len() {
            if j == xpg.root() || xpg.kind(j) == (XpgNodeKind::Terminal { label: true }) {
                continue;
            }
            let mut ops = Vec::new();
            for edge in xpg.in_edges(j) {
                let p = edge.from;
                let XpgNodeKind::NonTerminal { feature } = xpg.kind(p) else {
                    unreachable!("terminals have no outgoing edges");
                };
                let parent = self.node(k, p);
                if edge.label || feature == k {
                    ops.push(Operand::Lit(parent));
                    continue;
                }
                let aux = match blocked.get(&p) {
                    Some(&a) => a,
                    None => {
                        let a = Lit::pos(self.map.new_aux(k, xpg.id(p)));
                        while self.cnf.num_vars() < a.var() {
                            self.cnf.new_var();
                        }
                        self.cnf
                            .add_eq_and(a, &[parent.into(), Lit::neg(self.map.sel(feature)).into()])?;
                        blocked.insert(p, a);
                        a
                    }
                };
                ops.push(Operand::Lit(aux));
            }
            self.cnf.add_eq_or(self.node(k, j), &ops)?;
        }
        let zeros: Vec<Operand> = (0..xpg.len())
            .filter(|&j| xpg.kind(j) == XpgNodeKind::Terminal { label: false })
            .map(|j| Operand::Lit(!self.node(k, j)))
            .collect();
        if zeros.is_empty() {
            self.cnf.add_unit(self.sigma(k))?;
        } else {
            self.cnf.add_eq_and(self.sigma(k), &zeros)?;
        }
        Ok(())
    }
}

fn emitter(xpg: &XpGraph, replicas: Vec<usize>) -> Emitter<'_> {
    let labels = (0..xpg.len()).map(|j| xpg.id(j)).collect();
    let map = VarMap::new(xpg.num_features(), replicas, labels, true);
    Emitter {
        xpg,
        cnf: CnfFormula::new(map.num_vars()),
        map,
    }
}

/// FMP encoding of an explanation graph with the given method.
pub fn encode_xpg(xpg: &XpGraph, t: usize, method: Method) -> Result<Encoding, EncodeError> {
    let m = xpg.num_features();
    check_target(t, m)?;
    let replicas = replicas_for(method, m, t);
    let mut e = emitter(xpg, replicas.clone());
    let mut groups = Vec::with_capacity(replicas.len());
    for &k in &replicas {
        let start = e.cnf.num_clauses();
        e.replica(k)?;
        let sigma = e.sigma(k);
        if k == 0 {
            e.cnf.add_unit(sigma)?;
            e.cnf.add_unit(Lit::pos(e.map.sel(t)))?;
        } else {
            e.cnf.add_eq_and(Lit::pos(e.map.sel(k)), &[Operand::Lit(!sigma)])?;
        }
        groups.push((k, start..e.cnf.num_clauses()));
    }
    Ok(Encoding {
        cnf: e.cnf,
        map: e.map,
        groups,
    })
}

/// Replicas `0..=m`; every model's selectors form an AXp containing `t`.
pub fn encode_xpg_onestep(xpg: &XpGraph, t: usize) -> Result<Encoding, EncodeError> {
    encode_xpg(xpg, t, Method::OneStep)
}

/// Replicas `0` and `t`; every model's selectors form a weak AXp that is no
/// longer weak without `t`.
pub fn encode_xpg_twostep(xpg: &XpGraph, t: usize) -> Result<Encoding, EncodeError> {
    encode_xpg(xpg, t, Method::TwoStep)
}

/// Replica 0 with `σ^0` asserted: satisfiable under selector assumptions
/// `X` iff `X` is a weak AXp.
pub fn encode_xpg_weak_axp(xpg: &XpGraph) -> Result<Encoding, EncodeError> {
    let mut e = emitter(xpg, vec![0]);
    e.replica(0)?;
    let sigma = e.sigma(0);
    e.cnf.add_unit(sigma)?;
    let end = e.cnf.num_clauses();
    Ok(Encoding {
        cnf: e.cnf,
        map: e.map,
        groups: vec![(0, 0..end)],
    })
}
