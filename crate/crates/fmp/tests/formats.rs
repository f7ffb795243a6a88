//! Fixture-level checks of the running example: a loan classifier over
//! P(1), Y(2), M(3), W(4) computing (Y ∧ P) ∨ (P ∧ W) ∨ (W ∧ M), and the
//! applicant v = (0, 1, 0, 1) predicted 0.

use std::fs;

use fmp::format::*;
use fmp_core::explain::{enumerate_axps_bruteforce, find_axp, find_cxp, is_weak_axp, is_weak_cxp, SddClassifier};
use fmp_core::sdd::{Sdd, SddNode, Term};
use fmp_core::xpg::{build_xpg_from_dt, build_xpg_from_obdd, structure_by_id, XpgNodeKind};
use fmp_core::{Classifier, FeatureSet, Instance};

fn fixture(name: &str) -> String {
    fs::read_to_string(format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn kappa(p: &[bool]) -> bool {
    let [pp, y, m, w] = [p[0], p[1], p[2], p[3]];
    (y && pp) || (pp && w) || (w && m)
}

fn points(m: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u32 << m).map(move |mask| (0..m).map(|i| mask >> i & 1 == 1).collect())
}

fn ella_sdd() -> Sdd {
    let v = parse_vtree(&fixture("ella.vtree")).unwrap();
    parse_sdd(&fixture("ella.sdd"), &v).unwrap()
}

fn ella() -> Instance {
    parse_instance(&fixture("ella.inst")).unwrap()
}

#[test]
fn vtree_fixture_is_balanced() {
    let v = parse_vtree(&fixture("ella.vtree")).unwrap();
    let root = v.vtree.root();
    assert_eq!(v.vtree.vars_below(root), vec![1, 2, 3, 4]);
    let fmp_core::sdd::VtreeNode::Internal { left, right } = v.vtree.node(root) else {
        panic!("root is internal");
    };
    assert_eq!(v.vtree.vars_below(left), vec![1, 2]);
    assert_eq!(v.vtree.vars_below(right), vec![3, 4]);
}

#[test]
fn sdd_fixture_computes_kappa() {
    let s = ella_sdd();
    for p in points(4) {
        assert_eq!(s.evaluate(&p).unwrap(), kappa(&p), "{p:?}");
    }
    assert!(s.evaluate(&[true, true, false, false]).unwrap());
    assert!(!s.evaluate(&[false, true, false, true]).unwrap());
    assert!(s.negate().evaluate(&[false, true, false, true]).unwrap());
    assert!(s.evaluate(&[true]).is_err());
}

#[test]
fn sdd_fixture_primes_partition() {
    let s = ella_sdd();
    let vt = s.vtree().clone();
    for node in s.nodes() {
        let SddNode::Decision { vtree, elements } = node else { continue };
        let fmp_core::sdd::VtreeNode::Internal { left, .. } = vt.node(*vtree) else { unreachable!() };
        let left_vars = vt.vars_below(left);
        for p in points(4) {
            // Only the left variables matter to primes.
            if p.iter().enumerate().any(|(i, &b)| b && !left_vars.contains(&(i + 1))) {
                continue;
            }
            let hits = elements
                .iter()
                .filter(|e| Sdd::new(vt.clone(), s.nodes().to_vec(), e.prime).unwrap().evaluate(&p).unwrap())
                .count();
            assert_eq!(hits, 1);
        }
    }
}

#[test]
fn conditioning_examples() {
    let s = ella_sdd();
    let empty = s.condition(&Term::new()).unwrap();
    for p in points(4) {
        assert_eq!(empty.evaluate(&p).unwrap(), s.evaluate(&p).unwrap());
    }
    let pm: Term = [(1, false), (3, false)].into_iter().collect();
    assert!(!s.condition(&pm).unwrap().is_consistent());
    assert!(!s.consistency_under(&pm).unwrap());
    let pw: Term = [(1, true), (4, true)].into_iter().collect();
    let c = s.condition(&pw).unwrap();
    assert!(points(4).all(|p| c.evaluate(&p).unwrap()));
    let full: Term = [(1, false), (2, true), (3, false), (4, true)].into_iter().collect();
    assert!(!s.consistency_under(&full).unwrap());
    assert!(s.is_consistent());
    assert_eq!(s.consistency_under(&Term::new()).unwrap(), s.is_consistent());
}

#[test]
fn constant_sdd_file() {
    let v = parse_vtree(&fixture("ella.vtree")).unwrap();
    let top = parse_sdd(&fixture("top.sdd"), &v).unwrap();
    assert!(top.evaluate(&[false; 4]).unwrap());
    assert!(!top.negate().is_consistent());
    let clf = SddClassifier::new(top);
    assert!(clf.explainer(&Instance::new(vec![0; 4], 1)).is_err());
}

#[test]
fn sdd_explanations() {
    let clf = SddClassifier::new(ella_sdd());
    let inst = ella();
    let e = clf.explainer(&inst).unwrap();
    assert!(is_weak_axp(&e, &[1, 3].into()).unwrap());
    assert!(is_weak_axp(&e, &FeatureSet::full(4)).unwrap());
    assert!(!is_weak_axp(&e, &FeatureSet::new()).unwrap());
    assert!(is_weak_cxp(&e, &[1].into()).unwrap());
    assert!(!is_weak_cxp(&e, &FeatureSet::new()).unwrap());
    assert!(is_weak_cxp(&e, &FeatureSet::full(4)).unwrap());
    assert_eq!(find_axp(&e, &FeatureSet::full(4)).unwrap(), [1, 3].into());
    assert_eq!(find_axp(&e, &[1, 3].into()).unwrap(), [1, 3].into());
    assert_eq!(find_cxp(&e, &FeatureSet::full(4)).unwrap(), [1].into());
    assert_eq!(find_cxp(&e, &[3].into()).unwrap(), [3].into());
    assert!(find_cxp(&e, &FeatureSet::new()).is_err());
    assert_eq!(enumerate_axps_bruteforce(&e).unwrap(), vec![FeatureSet::from([1, 3])]);
}

#[test]
fn obdd_maps_to_the_xpg_fixture() {
    let obdd = parse_obdd(&fixture("ella.obdd")).unwrap();
    let built = build_xpg_from_obdd(&obdd, &ella()).unwrap();
    let parsed = parse_xpg(&fixture("ella.xpg")).unwrap();
    assert_eq!(structure_by_id(&built), structure_by_id(&parsed));
    // The root tests P; its 1-edge reaches M, its 0-edge Y.
    let root = built.root();
    assert_eq!(built.kind(root), XpgNodeKind::NonTerminal { feature: 1 });
    let out: Vec<_> = built.out_edges(root).map(|e| (built.kind(e.to), e.label)).collect();
    assert!(out.contains(&(XpgNodeKind::NonTerminal { feature: 3 }, true)));
    assert!(out.contains(&(XpgNodeKind::NonTerminal { feature: 2 }, false)));
    // Class 0 terminal becomes the 1-terminal.
    let id5 = built.index_of(5).unwrap();
    assert_eq!(built.kind(id5), XpgNodeKind::Terminal { label: true });
}

#[test]
fn one_terminal_reachable_through_one_edges() {
    let x = parse_xpg(&fixture("ella.xpg")).unwrap();
    let mut at = x.root();
    let mut steps = 0;
    while let XpgNodeKind::NonTerminal { .. } = x.kind(at) {
        at = x.out_edges(at).find(|e| e.label).unwrap().to;
        steps += 1;
    }
    assert_eq!(x.kind(at), XpgNodeKind::Terminal { label: true });
    assert_eq!(steps, 2);
}

#[test]
fn sigma_on_the_fixture() {
    let x = parse_xpg(&fixture("ella.xpg")).unwrap();
    assert!(x.evaluate_sigma(&[true; 4]).unwrap());
    assert!(!x.evaluate_sigma(&[false; 4]).unwrap());
    assert!(x.evaluate_sigma(&[true, false, true, false]).unwrap());
    assert!(x.evaluate_sigma(&[true; 3]).is_err());
    assert_eq!(find_axp(&x, &[1, 2, 3].into()).unwrap(), [1, 3].into());
}

#[test]
fn tree_and_diagram_graphs_agree() {
    let dt = parse_dt(&fixture("ella.dt")).unwrap();
    let obdd = parse_obdd(&fixture("ella.obdd")).unwrap();
    for p in points(4) {
        let v: Vec<u32> = p.iter().map(|&b| u32::from(b)).collect();
        assert_eq!(dt.predict(&v).unwrap(), u32::from(kappa(&p)));
        assert_eq!(obdd.predict(&v).unwrap(), u32::from(kappa(&p)));
    }
    let a = build_xpg_from_dt(&dt, &ella()).unwrap();
    let b = build_xpg_from_obdd(&obdd, &ella()).unwrap();
    for s in points(4) {
        assert_eq!(a.evaluate_sigma(&s).unwrap(), b.evaluate_sigma(&s).unwrap());
    }
}

#[test]
fn xpg_round_trip_is_identity() {
    let text = fixture("ella.xpg");
    assert_eq!(write_xpg(&parse_xpg(&text).unwrap()), text);
}

#[test]
fn constant_obdd_is_rejected() {
    let o = parse_obdd(&fixture("const.obdd")).unwrap();
    assert!(build_xpg_from_obdd(&o, &Instance::new(vec![0, 0], 1)).is_err());
}

#[test]
fn mismatched_instance_is_rejected() {
    let obdd = parse_obdd(&fixture("ella.obdd")).unwrap();
    assert!(build_xpg_from_obdd(&obdd, &Instance::new(vec![0, 1, 0, 1], 1)).is_err());
    let clf = SddClassifier::new(ella_sdd());
    assert!(clf.explainer(&Instance::new(vec![0, 1, 0, 1], 1)).is_err());
}
