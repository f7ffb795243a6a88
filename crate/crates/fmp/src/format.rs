//! Text formats for vtrees, SDDs, OBDDs, decision trees, explanation
//! graphs, instances and DIMACS CNF.
//!
//! Every format is line based. Blank lines and lines whose first token is
//! `c` are skipped. Parse errors carry the 1-based line number of the
//! offending line; errors about the file as a whole use line 0.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;

use fmp_core::cnf::{CnfFormula, Lit};
use fmp_core::sdd::{Element, NodeId, Sdd, SddError, SddNode, Vtree, VtreeError, VtreeId, VtreeNode};
use fmp_core::xpg::{DecisionTree, DtError, DtNode, DtSpecNode, Obdd, ObddError, ObddNode, XpGraph, XpgError, XpgNodeKind};
use fmp_core::{Instance, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct FormatError {
    pub line: usize,
    pub kind: FormatErrorKind,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.kind)
        } else {
            write!(f, "line {}: {}", self.line, self.kind)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatErrorKind {
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error("header declares {declared} nodes, file has {found}")]
    CountMismatch { declared: usize, found: usize },
    #[error("node id {0} declared twice")]
    DuplicateId(u64),
    #[error("reference to undeclared node {0}")]
    Dangling(u64),
    #[error("variable {0} labels more than one leaf")]
    DuplicateVar(usize),
    #[error("node {0} is referenced before it is declared")]
    ForwardReference(u64),
    #[error("unknown vtree node {0}")]
    UnknownVtree(u64),
    #[error("literal on variable {0}, which is not a vtree leaf")]
    LiteralOutOfRange(usize),
    #[error("literal on variable {var} placed at vtree node {vtree}, which is not its leaf")]
    LiteralVtree { var: usize, vtree: u64 },
    #[error("decision node has no elements")]
    EmptyElements,
    #[error("feature {0} declared twice")]
    DuplicateFeature(usize),
    #[error(transparent)]
    Vtree(#[from] VtreeError),
    #[error(transparent)]
    Sdd(#[from] SddError),
    #[error(transparent)]
    Obdd(#[from] ObddError),
    #[error(transparent)]
    Dt(#[from] DtError),
    #[error(transparent)]
    Xpg(#[from] XpgError),
}

fn err(line: usize, kind: FormatErrorKind) -> FormatError {
    FormatError { line, kind }
}

fn malformed(line: usize, what: impl Into<String>) -> FormatError {
    err(line, FormatErrorKind::Malformed(what.into()))
}

/// Non-comment lines as `(line number, tokens)`.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.first() {
            None | Some(&"c") => None,
            Some(_) => Some((i + 1, toks)),
        }
    })
}

fn num<T: FromStr>(line: usize, tok: Option<&&str>, what: &str) -> Result<T, FormatError> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| malformed(line, format!("expected {what}")))
}

fn arity(line: usize, toks: &[&str], n: usize) -> Result<(), FormatError> {
    if toks.len() == n {
        Ok(())
    } else {
        Err(malformed(line, format!("`{}` takes {} fields, got {}", toks[0], n - 1, toks.len() - 1)))
    }
}

/// Reads the header line `<tag> <fields...>`, which must come first.
fn header<'a, I: Iterator<Item = (usize, Vec<&'a str>)>>(
    recs: &mut I,
    tag: &'static str,
    fields: usize,
) -> Result<(usize, Vec<usize>), FormatError> {
    let (line, toks) = recs.next().ok_or(err(0, FormatErrorKind::MissingHeader(tag)))?;
    if toks[0] != tag {
        return Err(err(line, FormatErrorKind::MissingHeader(tag)));
    }
    arity(line, &toks, fields + 1)?;
    let values = toks[1..]
        .iter()
        .map(|t| t.parse().map_err(|_| malformed(line, format!("bad `{tag}` header"))))
        .collect::<Result<_, _>>()?;
    Ok((line, values))
}

fn check_count(declared: usize, found: usize) -> Result<(), FormatError> {
    if declared == found {
        Ok(())
    } else {
        Err(err(0, FormatErrorKind::CountMismatch { declared, found }))
    }
}

/// A parsed vtree with the file's node ids.
#[derive(Debug, Clone)]
pub struct VtreeFile {
    pub vtree: Arc<Vtree>,
    pub ids: BTreeMap<u64, VtreeId>,
}

pub fn parse_vtree(text: &str) -> Result<VtreeFile, FormatError> {
    enum Raw {
        Leaf(usize),
        Internal(u64, u64),
    }
    let mut recs = records(text);
    let (_, h) = header(&mut recs, "vtree", 1)?;
    let mut ids = BTreeMap::new();
    let mut raw = Vec::new();
    let mut vars = BTreeMap::new();
    for (line, toks) in recs {
        let id: u64 = num(line, toks.get(1), "node id")?;
        let node = match toks[0] {
            "L" => {
                arity(line, &toks, 3)?;
                let var: usize = num(line, toks.get(2), "variable")?;
                if var == 0 {
                    return Err(malformed(line, "variables are 1-based"));
                }
                if vars.insert(var, id).is_some() {
                    return Err(err(line, FormatErrorKind::DuplicateVar(var)));
                }
                Raw::Leaf(var)
            }
            "I" => {
                arity(line, &toks, 4)?;
                Raw::Internal(num(line, toks.get(2), "left id")?, num(line, toks.get(3), "right id")?)
            }
            other => return Err(malformed(line, format!("unknown record `{other}`"))),
        };
        if ids.insert(id, VtreeId(raw.len())).is_some() {
            return Err(err(line, FormatErrorKind::DuplicateId(id)));
        }
        raw.push((line, node));
    }
    check_count(h[0], raw.len())?;
    let mut nodes = Vec::with_capacity(raw.len());
    for (line, node) in raw {
        nodes.push(match node {
            Raw::Leaf(var) => VtreeNode::Leaf { var },
            Raw::Internal(l, r) => {
                let get = |c: u64| ids.get(&c).copied().ok_or(err(line, FormatErrorKind::Dangling(c)));
                VtreeNode::Internal {
                    left: get(l)?,
                    right: get(r)?,
                }
            }
        });
    }
    let vtree = Vtree::new(nodes).map_err(|e| err(0, e.into()))?;
    Ok(VtreeFile {
        vtree: Arc::new(vtree),
        ids,
    })
}

/// Writes a vtree with arena indices as node ids.
pub fn write_vtree(vtree: &Vtree) -> String {
    let mut out = format!("vtree {}\n", vtree.len());
    for (i, node) in vtree.nodes().iter().enumerate() {
        match node {
            VtreeNode::Leaf { var } => writeln!(out, "L {i} {var}"),
            VtreeNode::Internal { left, right } => writeln!(out, "I {i} {} {}", left.0, right.0),
        }
        .expect("writing to a string");
    }
    out
}

/// Parses an SDD over a parsed vtree. Nodes must be declared children
/// first; the last declared node is the root.
pub fn parse_sdd(text: &str, vtree: &VtreeFile) -> Result<Sdd, FormatError> {
    let mut recs = records(text);
    let (_, h) = header(&mut recs, "sdd", 1)?;
    let m = vtree.vtree.num_vars();
    let mut index: BTreeMap<u64, NodeId> = BTreeMap::new();
    let mut lines = Vec::new();
    let mut nodes = Vec::new();
    for (line, toks) in recs {
        let id: u64 = num(line, toks.get(1), "node id")?;
        let vnode = |tok: Option<&&str>| -> Result<VtreeId, FormatError> {
            let v: u64 = num(line, tok, "vtree id")?;
            vtree.ids.get(&v).copied().ok_or(err(line, FormatErrorKind::UnknownVtree(v)))
        };
        let child = |tok: Option<&&str>| -> Result<NodeId, FormatError> {
            let c: u64 = num(line, tok, "node id")?;
            index.get(&c).copied().ok_or(err(line, FormatErrorKind::ForwardReference(c)))
        };
        let node = match toks[0] {
            "F" | "T" => {
                arity(line, &toks, 2)?;
                if toks[0] == "F" {
                    SddNode::False
                } else {
                    SddNode::True
                }
            }
            "L" => {
                arity(line, &toks, 4)?;
                let at = vnode(toks.get(2))?;
                let lit: i64 = num(line, toks.get(3), "literal")?;
                let var = lit.unsigned_abs() as usize;
                if lit == 0 || var > m {
                    return Err(err(line, FormatErrorKind::LiteralOutOfRange(var)));
                }
                if vtree.vtree.node(at) != (VtreeNode::Leaf { var }) {
                    return Err(err(
                        line,
                        FormatErrorKind::LiteralVtree {
                            var,
                            vtree: num(line, toks.get(2), "vtree id")?,
                        },
                    ));
                }
                SddNode::Literal { var, positive: lit > 0 }
            }
            "D" => {
                let at = vnode(toks.get(2))?;
                let k: usize = num(line, toks.get(3), "element count")?;
                if k == 0 {
                    return Err(err(line, FormatErrorKind::EmptyElements));
                }
                arity(line, &toks, 4 + 2 * k)?;
                let elements = (0..k)
                    .map(|e| {
                        Ok(Element {
                            prime: child(toks.get(4 + 2 * e))?,
                            sub: child(toks.get(5 + 2 * e))?,
                        })
                    })
                    .collect::<Result<Vec<_>, FormatError>>()?;
                SddNode::Decision { vtree: at, elements }
            }
            other => return Err(malformed(line, format!("unknown record `{other}`"))),
        };
        if index.insert(id, NodeId(nodes.len())).is_some() {
            return Err(err(line, FormatErrorKind::DuplicateId(id)));
        }
        nodes.push(node);
        lines.push(line);
    }
    check_count(h[0], nodes.len())?;
    if nodes.is_empty() {
        return Err(err(0, SddError::Empty.into()));
    }
    let root = NodeId(nodes.len() - 1);
    Sdd::new(vtree.vtree.clone(), nodes, root).map_err(|e| {
        let line = match e {
            SddError::ForwardReference { node, .. }
            | SddError::UnknownVtree { node, .. }
            | SddError::DecisionOnLeaf { node, .. }
            | SddError::LiteralOutOfRange { node, .. }
            | SddError::NotNormalized { node, .. } => lines.get(node).copied().unwrap_or(0),
            SddError::EmptyElements(node) => lines.get(node).copied().unwrap_or(0),
            _ => 0,
        };
        err(line, e.into())
    })
}

/// Writes an SDD with arena indices as node ids; vtree ids are arena
/// indices of the diagram's vtree, as written by [`write_vtree`].
pub fn write_sdd(sdd: &Sdd) -> String {
    let mut out = format!("sdd {}\n", sdd.len());
    for (i, node) in sdd.nodes().iter().enumerate() {
        match node {
            SddNode::False => writeln!(out, "F {i}"),
            SddNode::True => writeln!(out, "T {i}"),
            SddNode::Literal { var, positive } => {
                let lit = if *positive { *var as i64 } else { -(*var as i64) };
                writeln!(out, "L {i} {} {lit}", sdd.vtree().leaf(*var).0)
            }
            SddNode::Decision { vtree, elements } => {
                write!(out, "D {i} {} {}", vtree.0, elements.len()).expect("writing to a string");
                for e in elements {
                    write!(out, " {} {}", e.prime.0, e.sub.0).expect("writing to a string");
                }
                writeln!(out)
            }
        }
        .expect("writing to a string");
    }
    out
}

pub fn parse_obdd(text: &str) -> Result<Obdd, FormatError> {
    let mut recs = records(text);
    let (_, h) = header(&mut recs, "obdd", 2)?;
    let (m, count) = (h[0], h[1]);
    let mut nodes = Vec::new();
    let mut lines = BTreeMap::new();
    for (line, toks) in recs {
        let id: u32 = num(line, toks.get(1), "node id")?;
        let node = match toks[0] {
            "T" => {
                arity(line, &toks, 3)?;
                ObddNode::Terminal {
                    class: num(line, toks.get(2), "class")?,
                }
            }
            "N" => {
                arity(line, &toks, 5)?;
                ObddNode::NonTerminal {
                    feature: num(line, toks.get(2), "feature")?,
                    lo: num(line, toks.get(3), "lo id")?,
                    hi: num(line, toks.get(4), "hi id")?,
                }
            }
            other => return Err(malformed(line, format!("unknown record `{other}`"))),
        };
        if lines.insert(id, line).is_some() {
            return Err(err(line, FormatErrorKind::DuplicateId(id.into())));
        }
        nodes.push((id, node));
    }
    check_count(count, nodes.len())?;
    Obdd::new(m, nodes).map_err(|e| {
        let line = match e {
            ObddError::ForwardReference { node, .. } | ObddError::FeatureOutOfRange { id: node, .. } => {
                lines.get(&node).copied().unwrap_or(0)
            }
            _ => 0,
        };
        err(line, e.into())
    })
}

pub fn write_obdd(obdd: &Obdd) -> String {
    let mut out = format!("obdd {} {}\n", obdd.num_features(), obdd.len());
    for (i, node) in obdd.nodes().iter().enumerate() {
        match *node {
            ObddNode::Terminal { class } => writeln!(out, "T {} {class}", obdd.id(i)),
            ObddNode::NonTerminal { feature, lo, hi } => {
                writeln!(out, "N {} {feature} {} {}", obdd.id(i), obdd.id(lo), obdd.id(hi))
            }
        }
        .expect("writing to a string");
    }
    out
}

fn values(line: usize, toks: &[&str]) -> Result<Vec<Value>, FormatError> {
    toks.iter()
        .map(|t| t.parse().map_err(|_| malformed(line, format!("bad value `{t}`"))))
        .collect()
}

pub fn parse_dt(text: &str) -> Result<DecisionTree, FormatError> {
    let mut recs = records(text);
    let (_, h) = header(&mut recs, "dt", 1)?;
    let m = h[0];
    let mut domains: Vec<Option<Vec<Value>>> = vec![None; m];
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut ids = BTreeMap::new();
    for (line, toks) in recs {
        match toks[0] {
            "DOM" => {
                let f: usize = num(line, toks.get(1), "feature")?;
                let k: usize = num(line, toks.get(2), "domain size")?;
                arity(line, &toks, 3 + k)?;
                if f == 0 || f > m {
                    return Err(malformed(line, format!("feature {f} outside 1..={m}")));
                }
                if domains[f - 1].is_some() {
                    return Err(err(line, FormatErrorKind::DuplicateFeature(f)));
                }
                domains[f - 1] = Some(values(line, &toks[3..])?);
            }
            "N" | "T" => {
                arity(line, &toks, 3)?;
                let id: u32 = num(line, toks.get(1), "node id")?;
                if ids.insert(id, line).is_some() {
                    return Err(err(line, FormatErrorKind::DuplicateId(id.into())));
                }
                let node = if toks[0] == "N" {
                    DtSpecNode::NonTerminal {
                        feature: num(line, toks.get(2), "feature")?,
                    }
                } else {
                    DtSpecNode::Leaf {
                        class: num(line, toks.get(2), "class")?,
                    }
                };
                nodes.push((id, node));
            }
            "E" => {
                if toks.len() < 4 {
                    return Err(malformed(line, "an edge needs a source, a target and values"));
                }
                edges.push((
                    num(line, toks.get(1), "source id")?,
                    num(line, toks.get(2), "target id")?,
                    values(line, &toks[3..])?,
                ));
            }
            other => return Err(malformed(line, format!("unknown record `{other}`"))),
        }
    }
    let domains = domains
        .into_iter()
        .enumerate()
        .map(|(i, d)| d.ok_or(err(0, DtError::MissingDomain { feature: i + 1, m }.into())))
        .collect::<Result<Vec<_>, _>>()?;
    DecisionTree::new(domains, nodes, edges).map_err(|e| {
        let line = match e {
            DtError::DuplicateId(id)
            | DtError::FeatureOutOfRange { id, .. }
            | DtError::LeafWithEdges(id)
            | DtError::NotAPartition(id)
            | DtError::NotATree(id)
            | DtError::RepeatedFeature { id, .. } => ids.get(&id).copied().unwrap_or(0),
            _ => 0,
        };
        err(line, e.into())
    })
}

pub fn write_dt(dt: &DecisionTree) -> String {
    let mut out = format!("dt {}\n", dt.num_features());
    let join = |vs: &[Value]| vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    for (i, d) in dt.domains().iter().enumerate() {
        writeln!(out, "DOM {} {} {}", i + 1, d.len(), join(d)).expect("writing to a string");
    }
    for (i, node) in dt.nodes().iter().enumerate() {
        match node {
            DtNode::Leaf { class } => writeln!(out, "T {} {class}", dt.id(i)),
            DtNode::NonTerminal { feature, .. } => writeln!(out, "N {} {feature}", dt.id(i)),
        }
        .expect("writing to a string");
    }
    for (i, node) in dt.nodes().iter().enumerate() {
        if let DtNode::NonTerminal { edges, .. } = node {
            for e in edges {
                writeln!(out, "E {} {} {}", dt.id(i), dt.id(e.child), join(&e.values)).expect("writing to a string");
            }
        }
    }
    out
}

pub fn parse_xpg(text: &str) -> Result<XpGraph, FormatError> {
    let mut recs = records(text);
    let (_, h) = header(&mut recs, "xpg", 2)?;
    let (m, count) = (h[0], h[1]);
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for (line, toks) in recs {
        arity(line, &toks, if toks[0] == "E" { 4 } else { 3 })?;
        match toks[0] {
            "N" => nodes.push((
                num(line, toks.get(1), "node id")?,
                XpgNodeKind::NonTerminal {
                    feature: num(line, toks.get(2), "feature")?,
                },
            )),
            "T" => nodes.push((
                num(line, toks.get(1), "node id")?,
                XpgNodeKind::Terminal {
                    label: bit(line, toks[2])?,
                },
            )),
            "E" => edges.push((
                num(line, toks.get(1), "source id")?,
                num(line, toks.get(2), "target id")?,
                bit(line, toks[3])?,
            )),
            other => return Err(malformed(line, format!("unknown record `{other}`"))),
        }
    }
    check_count(count, nodes.len())?;
    XpGraph::new(m, nodes, edges).map_err(|e| err(0, e.into()))
}

fn bit(line: usize, tok: &str) -> Result<bool, FormatError> {
    match tok {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(malformed(line, format!("expected 0 or 1, got `{tok}`"))),
    }
}

pub fn write_xpg(xpg: &XpGraph) -> String {
    let mut out = format!("xpg {} {}\n", xpg.num_features(), xpg.len());
    for i in 0..xpg.len() {
        match xpg.kind(i) {
            XpgNodeKind::NonTerminal { feature } => writeln!(out, "N {} {feature}", xpg.id(i)),
            XpgNodeKind::Terminal { label } => writeln!(out, "T {} {}", xpg.id(i), u8::from(label)),
        }
        .expect("writing to a string");
    }
    for e in xpg.edges() {
        writeln!(out, "E {} {} {}", xpg.id(e.from), xpg.id(e.to), u8::from(e.label)).expect("writing to a string");
    }
    out
}

/// Parses `v: x1,...,xm` and `c: class`.
pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let mut point = None;
    let mut class = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l == "c" || l.starts_with("c ") {
            continue;
        }
        if let Some(rest) = l.strip_prefix("v:") {
            let vs = rest
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| malformed(line, format!("bad value `{}`", t.trim()))))
                .collect::<Result<Vec<Value>, _>>()?;
            if point.replace(vs).is_some() {
                return Err(malformed(line, "second `v:` line"));
            }
        } else if let Some(rest) = l.strip_prefix("c:") {
            let c = rest.trim().parse().map_err(|_| malformed(line, "bad class"))?;
            if class.replace(c).is_some() {
                return Err(malformed(line, "second `c:` line"));
            }
        } else {
            return Err(malformed(line, "expected `v:` or `c:`"));
        }
    }
    match (point, class) {
        (Some(p), Some(c)) => Ok(Instance::new(p, c)),
        (None, _) => Err(err(0, FormatErrorKind::MissingHeader("v:"))),
        (_, None) => Err(err(0, FormatErrorKind::MissingHeader("c:"))),
    }
}

pub fn write_instance(instance: &Instance) -> String {
    let vs: Vec<String> = instance.point.iter().map(|v| v.to_string()).collect();
    format!("v: {}\nc: {}\n", vs.join(","), instance.class)
}

/// Parses DIMACS CNF. Clauses may span lines; a `%` line ends the input.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, FormatError> {
    let mut cnf: Option<(CnfFormula, usize)> = None;
    let mut clause = Vec::new();
    for (line, toks) in records(text) {
        if toks[0] == "%" {
            break;
        }
        if toks[0] == "p" {
            if cnf.is_some() || toks.len() != 4 || toks[1] != "cnf" {
                return Err(malformed(line, "expected a single `p cnf <vars> <clauses>`"));
            }
            cnf = Some((CnfFormula::new(num(line, toks.get(2), "variable count")?), num(line, toks.get(3), "clause count")?));
            continue;
        }
        let (f, _) = cnf.as_mut().ok_or(err(line, FormatErrorKind::MissingHeader("p cnf")))?;
        for t in &toks {
            let v: i32 = t.parse().map_err(|_| malformed(line, format!("bad literal `{t}`")))?;
            match Lit::from_dimacs(v) {
                None => {
                    let c = std::mem::take(&mut clause);
                    if c.is_empty() {
                        f.mark_unsat();
                    } else {
                        f.add_clause(c).map_err(|e| malformed(line, e.to_string()))?;
                    }
                }
                Some(l) => clause.push(l),
            }
        }
    }
    let (mut f, declared) = cnf.ok_or(err(0, FormatErrorKind::MissingHeader("p cnf")))?;
    if !clause.is_empty() {
        f.add_clause(clause).map_err(|e| malformed(0, e.to_string()))?;
    }
    if f.num_clauses() != declared {
        return Err(malformed(0, format!("header declares {declared} clauses, file has {}", f.num_clauses())));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    const VTREE: &str = "c balanced\nvtree 3\nL 0 1\nL 2 2\nI 1 0 2\n";

    #[test]
    fn vtree_parses_with_comments() {
        let v = parse_vtree(VTREE).unwrap();
        assert_eq!(v.vtree.num_vars(), 2);
        assert_eq!(v.ids[&1], VtreeId(2));
        let again = parse_vtree(&write_vtree(&v.vtree)).unwrap();
        assert_eq!(again.vtree, v.vtree);
    }

    #[test]
    fn vtree_errors_are_distinct() {
        let e = parse_vtree("vtree 3\nL 0 1\nL 2 2\nI 1 0 5\n").unwrap_err();
        assert_eq!(e, err(4, FormatErrorKind::Dangling(5)));
        let e = parse_vtree("vtree 3\nL 0 1\nL 0 2\nI 1 0 2\n").unwrap_err();
        assert_eq!(e, err(3, FormatErrorKind::DuplicateId(0)));
        let e = parse_vtree("vtree 3\nL 0 1\nL 2 1\nI 1 0 2\n").unwrap_err();
        assert_eq!(e, err(3, FormatErrorKind::DuplicateVar(1)));
        let e = parse_vtree("vtree 1\nL 0\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(matches!(e.kind, FormatErrorKind::Malformed(_)));
        assert_eq!(parse_vtree("vtree 1\nL 0 1\n").unwrap().vtree.num_vars(), 1);
    }

    #[test]
    fn sdd_errors_are_distinct() {
        let v = parse_vtree(VTREE).unwrap();
        let e = parse_sdd("sdd 2\nL 0 0 1\nD 1 1 1 0 7\n", &v).unwrap_err();
        assert_eq!(e, err(3, FormatErrorKind::ForwardReference(7)));
        let e = parse_sdd("sdd 1\nL 0 9 1\n", &v).unwrap_err();
        assert_eq!(e, err(2, FormatErrorKind::UnknownVtree(9)));
        let e = parse_sdd("sdd 1\nL 0 0 3\n", &v).unwrap_err();
        assert_eq!(e, err(2, FormatErrorKind::LiteralOutOfRange(3)));
        let e = parse_sdd("sdd 1\nD 0 1 0\n", &v).unwrap_err();
        assert_eq!(e, err(2, FormatErrorKind::EmptyElements));
        let e = parse_sdd("sdd 1\nL 0 2 1\n", &v).unwrap_err();
        assert_eq!(e, err(2, FormatErrorKind::LiteralVtree { var: 1, vtree: 2 }));
    }

    #[test]
    fn sdd_round_trip_and_root() {
        let v = parse_vtree(VTREE).unwrap();
        // x1 ∧ x2 as a decision at vtree node 1.
        let text = "sdd 5\nF 0\nL 1 0 1\nL 2 0 -1\nL 3 2 2\nD 4 1 2 1 3 2 0\n";
        let s = parse_sdd(text, &v).unwrap();
        assert!(s.evaluate(&[true, true]).unwrap());
        assert!(!s.evaluate(&[true, false]).unwrap());
        let again = parse_sdd(&write_sdd(&s), &parse_vtree(&write_vtree(s.vtree())).unwrap()).unwrap();
        assert_eq!(again.nodes(), s.nodes());
        let top = parse_sdd("sdd 1\nT 0\n", &v).unwrap();
        assert!(top.is_consistent());
    }

    #[test]
    fn obdd_and_dt_round_trip() {
        let o = parse_obdd("obdd 2 4\nT 7 0\nT 8 1\nN 5 2 7 8\nN 6 1 7 5\n").unwrap();
        assert_eq!(parse_obdd(&write_obdd(&o)).unwrap(), o);
        let e = parse_obdd("obdd 2 2\nT 7 0\nN 6 1 7 5\n").unwrap_err();
        assert_eq!(e.line, 3);
        let dt = parse_dt("dt 1\nDOM 1 3 0 1 2\nN 1 1\nT 2 0\nT 3 1\nE 1 2 0 2\nE 1 3 1\n").unwrap();
        assert_eq!(parse_dt(&write_dt(&dt)).unwrap(), dt);
        let e = parse_dt("dt 1\nDOM 1 2 0 1\nN 1 1\nT 2 0\nT 3 1\nE 1 2 0\nE 1 3 0\n").unwrap_err();
        assert_eq!(e, err(3, DtError::NotAPartition(1).into()));
    }

    #[test]
    fn xpg_structural_errors() {
        let e = parse_xpg("xpg 1 4\nN 1 1\nN 2 1\nT 3 1\nT 4 0\nE 1 3 1\nE 2 4 1\n").unwrap_err();
        assert!(e.to_string().contains("multiple roots"), "{e}");
        let e = parse_xpg("xpg 1 3\nN 1 1\nT 2 1\nT 3 0\nE 1 2 1\nE 1 3 1\n").unwrap_err();
        assert_eq!(e.kind, FormatErrorKind::Xpg(XpgError::MultipleOneEdges(1)));
        let e = parse_xpg("xpg 1 3\nN 1 1\nT 2 1\nT 3 0\nE 1 2 0\nE 1 3 0\n").unwrap_err();
        assert_eq!(e.kind, FormatErrorKind::Xpg(XpgError::NoReachableOneTerminal));
    }

    #[test]
    fn instances() {
        let i = parse_instance("v: 0, 1,0,1\nc: 0\n").unwrap();
        assert_eq!(i, Instance::new(vec![0, 1, 0, 1], 0));
        assert_eq!(parse_instance(&write_instance(&i)).unwrap(), i);
        assert_eq!(parse_instance("v: 1\n").unwrap_err().kind, FormatErrorKind::MissingHeader("c:"));
        assert_eq!(parse_instance("v: 1\nx\nc: 0").unwrap_err().line, 2);
    }

    #[test]
    fn dimacs() {
        let f = parse_dimacs("c hi\np cnf 2 2\n1 -2\n 0 2 0\n").unwrap();
        assert_eq!(f.num_vars(), 2);
        assert_eq!(f.clauses()[0], vec![Lit::pos(1), Lit::neg(2)]);
        assert!(parse_dimacs("1 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 2\n1 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 1\n3 0\n").is_err());
    }
}
