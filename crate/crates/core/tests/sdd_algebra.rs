mod common;

use std::sync::Arc;

use common::bool_points;
use fmp_core::gen::{compile_truth_table, random_obdd, random_sdd, shannon_sdd_from_obdd};
use fmp_core::sdd::{Sdd, SddNode, Term, Vtree, VtreeNode};
use fmp_core::Classifier;
use proptest::prelude::*;

fn term_from(m: usize, mask: u32, values: u32) -> Term {
    (1..=m)
        .filter(|i| mask >> (i - 1) & 1 == 1)
        .map(|i| (i, values >> (i - 1) & 1 == 1))
        .collect()
}

fn overridden(p: &[bool], term: &Term) -> Vec<bool> {
    let mut q = p.to_vec();
    for (v, b) in term.iter() {
        q[v - 1] = b;
    }
    q
}

fn agrees(p: &[bool], term: &Term) -> bool {
    term.iter().all(|(v, b)| p[v - 1] == b)
}

fn sub_diagram(s: &Sdd, root: fmp_core::sdd::NodeId) -> Sdd {
    Sdd::new(s.vtree().clone(), s.nodes().to_vec(), root).unwrap()
}

fn check_partition(s: &Sdd) {
    let m = s.num_vars();
    for node in s.nodes() {
        let SddNode::Decision { elements, .. } = node else { continue };
        for p in bool_points(m) {
            let hits = elements.iter().filter(|e| sub_diagram(s, e.prime).evaluate(&p).unwrap()).count();
            assert_eq!(hits, 1, "primes must partition at {p:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn condition_matches_override(m in 2usize..=7, seed in any::<u64>(), mask in any::<u32>(), values in any::<u32>()) {
        let s = random_sdd(m, seed).unwrap();
        let term = term_from(m, mask, values);
        let c = s.condition(&term).unwrap();
        for p in bool_points(m) {
            prop_assert_eq!(c.evaluate(&p).unwrap(), s.evaluate(&overridden(&p, &term)).unwrap());
        }
    }

    #[test]
    fn negation_flips_every_point(m in 2usize..=7, seed in any::<u64>()) {
        let s = random_sdd(m, seed).unwrap();
        let n = s.negate();
        for p in bool_points(m) {
            prop_assert_eq!(n.evaluate(&p).unwrap(), !s.evaluate(&p).unwrap());
        }
    }

    #[test]
    fn consistency_is_existential(m in 2usize..=7, seed in any::<u64>(), mask in any::<u32>(), values in any::<u32>()) {
        let s = random_sdd(m, seed).unwrap();
        let term = term_from(m, mask, values);
        let exists = bool_points(m).iter().any(|p| agrees(p, &term) && s.evaluate(p).unwrap());
        prop_assert_eq!(s.consistency_under(&term).unwrap(), exists);
        prop_assert_eq!(s.condition(&term).unwrap().is_consistent(), exists);
        prop_assert!(s.is_consistent());
    }

    #[test]
    fn generated_primes_partition(m in 2usize..=6, seed in any::<u64>()) {
        check_partition(&random_sdd(m, seed).unwrap());
        let obdd = random_obdd(m, 2 * m, seed).unwrap();
        let twin = shannon_sdd_from_obdd(&obdd).unwrap();
        check_partition(&twin);
        for p in bool_points(m) {
            let v: Vec<u32> = p.iter().map(|&b| u32::from(b)).collect();
            prop_assert_eq!(twin.predict(&v).unwrap(), obdd.predict(&v).unwrap());
        }
    }

    #[test]
    fn compiled_tables_are_faithful(table in proptest::collection::vec(any::<bool>(), 16)) {
        let vtree = Arc::new(Vtree::new(vec![
            VtreeNode::Leaf { var: 3 },
            VtreeNode::Leaf { var: 1 },
            VtreeNode::Internal { left: fmp_core::sdd::VtreeId(0), right: fmp_core::sdd::VtreeId(1) },
            VtreeNode::Leaf { var: 4 },
            VtreeNode::Leaf { var: 2 },
            VtreeNode::Internal { left: fmp_core::sdd::VtreeId(3), right: fmp_core::sdd::VtreeId(4) },
            VtreeNode::Internal { left: fmp_core::sdd::VtreeId(2), right: fmp_core::sdd::VtreeId(5) },
        ]).unwrap());
        let s = compile_truth_table(vtree, &table).unwrap();
        for (mask, p) in bool_points(4).iter().enumerate() {
            prop_assert_eq!(s.evaluate(p).unwrap(), table[mask]);
        }
    }
}
