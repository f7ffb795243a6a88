use alloc::collections::BTreeMap;
use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_target, replicas_for, EncodeError, Encoding, Method, VarMap};
use crate::classifier::Classifier;
use crate::cnf::{CnfFormula, Lit, Operand};
use crate::feature::Instance;
use crate::sdd::{NodeId, Sdd, SddNode};

/// A child slot of a circuit node. Terminals and literals are inlined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SddBox {
    Node(usize),
    Const(bool),
    Literal { var: usize, positive: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SddCircuitNode {
    /// Indices of the element nodes.
    Decision { elements: Vec<usize> },
    Element { prime: SddBox, sub: SddBox },
    /// A diagram whose root is a literal.
    Root(SddBox),
}

/// The SDD seen as a circuit of decision and element nodes. Nodes are
/// numbered breadth-first from the root (index 0 is node 1); elements
/// with the same prime and sub are shared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SddCircuit {
    nodes: Vec<SddCircuitNode>,
    order: Vec<usize>,
}

impl SddCircuit {
    /// `None` for constant diagrams.
    pub fn new(sdd: &Sdd) -> Option<Self> {
        let root = sdd.root();
        match sdd.node(root) {
            SddNode::False | SddNode::True => None,
            SddNode::Literal { var, positive } => Some(Self {
                nodes: vec![SddCircuitNode::Root(SddBox::Literal {
                    var: *var,
                    positive: *positive,
                })],
                order: vec![0],
            }),
            SddNode::Decision { .. } => Some(Self::from_decision(sdd, root)),
        }
    }

    fn from_decision(sdd: &Sdd, root: NodeId) -> Self {
        // Placeholder kinds are filled in when a node is dequeued.
        let mut nodes: Vec<SddCircuitNode> = Vec::new();
        let mut keys: Vec<(usize, u8)> = Vec::new();
        let mut decisions: BTreeMap<NodeId, usize> = BTreeMap::new();
        let mut elements: BTreeMap<(NodeId, NodeId), usize> = BTreeMap::new();
        let mut queue: VecDeque<(usize, Work)> = VecDeque::new();

        decisions.insert(root, 0);
        nodes.push(SddCircuitNode::Decision { elements: Vec::new() });
        keys.push((root.0, 0));
        queue.push_back((0, Work::Decision(root)));

        while let Some((index, work)) = queue.pop_front() {
            match work {
                Work::Decision(id) => {
                    let SddNode::Decision { elements: elems, .. } = sdd.node(id) else {
                        unreachable!("queued decision is a decision node");
                    };
                    let mut children = Vec::with_capacity(elems.len());
                    for e in elems {
                        let key = (e.prime, e.sub);
                        let child = *elements.entry(key).or_insert_with(|| {
                            let c = nodes.len();
                            nodes.push(SddCircuitNode::Element {
                                prime: SddBox::Const(false),
                                sub: SddBox::Const(false),
                            });
                            keys.push((e.prime.0.max(e.sub.0), 1));
                            queue.push_back((c, Work::Element(e.prime, e.sub)));
                            c
                        });
                        children.push(child);
                    }
                    nodes[index] = SddCircuitNode::Decision { elements: children };
                }
                Work::Element(prime, sub) => {
                    let mut slot = |id: NodeId| match sdd.node(id) {
                        SddNode::False => SddBox::Const(false),
                        SddNode::True => SddBox::Const(true),
                        SddNode::Literal { var, positive } => SddBox::Literal {
                            var: *var,
                            positive: *positive,
                        },
                        SddNode::Decision { .. } => SddBox::Node(*decisions.entry(id).or_insert_with(|| {
                            let c = nodes.len();
                            nodes.push(SddCircuitNode::Decision { elements: Vec::new() });
                            keys.push((id.0, 0));
                            queue.push_back((c, Work::Decision(id)));
                            c
                        })),
                    };
                    let prime = slot(prime);
                    let sub = slot(sub);
                    nodes[index] = SddCircuitNode::Element { prime, sub };
                }
            }
        }

        // Diagram ids are topological, so this key puts children first.
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by_key(|&i| keys[i]);
        Self { nodes, order }
    }

    pub fn nodes(&self) -> &[SddCircuitNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Consistency of every node with the features of `fixed` pinned to the
    /// instance values `point`; a direct reading of the indicator semantics.
    pub fn consistency(&self, point: &[bool], fixed: &[bool]) -> Vec<bool> {
        let mut value = vec![false; self.nodes.len()];
        let slot = |b: SddBox, value: &[bool]| match b {
            SddBox::Node(c) => value[c],
            SddBox::Const(c) => c,
            SddBox::Literal { var, positive } => !fixed[var - 1] || point[var - 1] == positive,
        };
        for &i in &self.order {
            value[i] = match &self.nodes[i] {
                SddCircuitNode::Decision { elements } => elements.iter().any(|&e| value[e]),
                SddCircuitNode::Element { prime, sub } => slot(*prime, &value) && slot(*sub, &value),
                SddCircuitNode::Root(b) => slot(*b, &value),
            };
        }
        value
    }
}

#[derive(Debug, Clone, Copy)]
enum Work {
    Decision(NodeId),
    Element(NodeId, NodeId),
}

fn check_instance(sdd: &Sdd, instance: &Instance) -> Result<SddCircuit, EncodeError> {
    let predicted = sdd.predict(&instance.point)?;
    if instance.class != 0 {
        return Err(EncodeError::TopInstance);
    }
    if predicted != instance.class {
        return Err(EncodeError::Mismatch {
            predicted,
            claimed: instance.class,
        });
    }
    if !sdd.is_consistent() {
        return Err(EncodeError::Constant);
    }
    SddCircuit::new(sdd).ok_or(EncodeError::Constant)
}

struct Emitter<'a> {
    circuit: &'a SddCircuit,
    point: Vec<bool>,
    cnf: CnfFormula,
    map: VarMap,
}

impl Emitter<'_> {
    /// Emits the indicator definitions of one replica. Replica 0 frees
    /// nothing; replica `k > 0` treats feature `k` as free.
    fn replica(&mut self, k: usize) -> Result<(), EncodeError> {
        let n = self.circuit.len();
        let mut vals = vec![Operand::Const(false); n];
        let mut defs: Vec<(Vec<Operand>, bool)> = vec![(Vec::new(), false); n];
        let point = &self.point;
        let map = &self.map;
        let slot = |b: SddBox, vals: &[Operand]| match b {
            SddBox::Node(c) => vals[c],
            SddBox::Const(c) => Operand::Const(c),
            SddBox::Literal { var, positive } => {
                if point[var - 1] == positive || var == k {
                    Operand::Const(true)
                } else {
                    Operand::Lit(Lit::neg(map.sel(var)))
                }
            }
        };
        for &i in &self.circuit.order {
            let (ops, is_or) = match &self.circuit.nodes[i] {
                SddCircuitNode::Decision { elements } => {
                    (elements.iter().map(|&e| vals[e]).collect::<Vec<_>>(), true)
                }
                SddCircuitNode::Element { prime, sub } => (vec![slot(*prime, &vals), slot(*sub, &vals)], false),
                SddCircuitNode::Root(b) => (vec![slot(*b, &vals)], false),
            };
            let var = self.map.node(k, i).expect("replica allocated");
            vals[i] = fold(&ops, is_or).map_or(Operand::Lit(Lit::pos(var)), Operand::Const);
            defs[i] = (ops, is_or);
        }
        for (i, (ops, is_or)) in defs.into_iter().enumerate() {
            let v = Lit::pos(self.map.node(k, i).expect("replica allocated"));
            if is_or {
                self.cnf.add_eq_or(v, &ops)?;
            } else {
                self.cnf.add_eq_and(v, &ops)?;
            }
        }
        Ok(())
    }
}

/// Constant value of `∨ ops` / `∧ ops` when the constants decide it.
fn fold(ops: &[Operand], is_or: bool) -> Option<bool> {
    let absorbing = Operand::Const(is_or);
    if ops.contains(&absorbing) {
        return Some(is_or);
    }
    ops.iter()
        .all(|o| matches!(o, Operand::Const(_)))
        .then_some(!is_or)
}

/// FMP encoding of a ⊥-instance of an SDD with the given method.
pub fn encode_sdd(sdd: &Sdd, instance: &Instance, t: usize, method: Method) -> Result<Encoding, EncodeError> {
    let m = sdd.num_vars();
    check_target(t, m)?;
    let circuit = check_instance(sdd, instance)?;
    let replicas = replicas_for(method, m, t);
    let labels = (1..=circuit.len() as u32).collect();
    let map = VarMap::new(m, replicas.clone(), labels, false);
    let mut e = Emitter {
        circuit: &circuit,
        point: instance.point.iter().map(|&x| x == 1).collect(),
        cnf: CnfFormula::new(map.num_vars()),
        map,
    };
    let mut groups = Vec::with_capacity(replicas.len());
    for &k in &replicas {
        let start = e.cnf.num_clauses();
        e.replica(k)?;
        let root = Lit::pos(e.map.node(k, 0).expect("replica allocated"));
        if k == 0 {
            e.cnf.add_unit(!root)?;
            e.cnf.add_unit(Lit::pos(e.map.sel(t)))?;
        } else {
            e.cnf.add_eq_and(Lit::pos(e.map.sel(k)), &[root.into()])?;
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
pub fn encode_sdd_onestep(sdd: &Sdd, instance: &Instance, t: usize) -> Result<Encoding, EncodeError> {
    encode_sdd(sdd, instance, t, Method::OneStep)
}

/// Replicas `0` and `t`; every model's selectors form a weak AXp that is no
/// longer weak without `t`.
pub fn encode_sdd_twostep(sdd: &Sdd, instance: &Instance, t: usize) -> Result<Encoding, EncodeError> {
    encode_sdd(sdd, instance, t, Method::TwoStep)
}

/// Replica 0 with the root indicator forced false: satisfiable under
/// selector assumptions `X` iff `X` is a weak AXp.
pub fn encode_sdd_weak_axp(sdd: &Sdd, instance: &Instance) -> Result<Encoding, EncodeError> {
    let m = sdd.num_vars();
    let circuit = check_instance(sdd, instance)?;
    let labels = (1..=circuit.len() as u32).collect();
    let map = VarMap::new(m, vec![0], labels, false);
    let mut e = Emitter {
        circuit: &circuit,
        point: instance.point.iter().map(|&x| x == 1).collect(),
        cnf: CnfFormula::new(map.num_vars()),
        map,
    };
    e.replica(0)?;
    let root = Lit::pos(e.map.node(0, 0).expect("replica allocated"));
    e.cnf.add_unit(!root)?;
    let end = e.cnf.num_clauses();
    Ok(Encoding {
        cnf: e.cnf,
        map: e.map,
        groups: vec![(0, 0..end)],
    })
}
