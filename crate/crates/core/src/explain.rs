//! Weak AXp/CXp predicates, deletion-based extraction and brute-force
//! enumeration.
//!
//! Everything here works against [`Explainer`], a classifier already bound
//! to one instance `(v, c)`. Three explainers are provided: SDDs (through
//! consistency of a possibly negated diagram), explanation graphs (through
//! `σ`) and [`PointwiseExplainer`], which checks the definition by walking
//! the feature space and serves as the test oracle.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::classifier::{for_each_point, Class, Classifier, PointError, Value};
use crate::feature::{FeatureSet, Instance};
use crate::sdd::Sdd;
use crate::xpg::XpGraph;

/// Largest feature count accepted by the brute-force enumerators.
pub const MAX_ENUM_FEATURES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplainError {
    #[error("feature {feature} is out of range 1..={m}")]
    FeatureOutOfRange { feature: usize, m: usize },
    #[error("seed {0} is not a weak AXp")]
    NotWeakAxp(FeatureSet),
    #[error("seed {0} is not a weak CXp")]
    NotWeakCxp(FeatureSet),
    #[error("{m} features exceed the brute-force limit of {max}")]
    TooManyFeatures { m: usize, max: usize },
    #[error("classifier is constant")]
    Constant,
    #[error(transparent)]
    Point(#[from] PointError),
    #[error("classifier predicts {predicted} at the instance, instance claims {claimed}")]
    Mismatch { predicted: Class, claimed: Class },
    #[error("instance has {got} features, classifier has {expected}")]
    InstanceLength { expected: usize, got: usize },
}

/// A classifier bound to an instance, answering the weak-AXp predicate.
pub trait Explainer {
    fn num_features(&self) -> usize;

    /// Whether fixing the features of `x` to their instance values forces
    /// the predicted class. `x` must lie within `1..=m`.
    fn weak_axp(&self, x: &FeatureSet) -> bool;
}

impl<E: Explainer + ?Sized> Explainer for &E {
    fn num_features(&self) -> usize {
        (**self).num_features()
    }

    fn weak_axp(&self, x: &FeatureSet) -> bool {
        (**self).weak_axp(x)
    }
}

fn check_range<E: Explainer + ?Sized>(e: &E, x: &FeatureSet) -> Result<(), ExplainError> {
    let m = e.num_features();
    match x.iter().find(|&i| i == 0 || i > m) {
        Some(feature) => Err(ExplainError::FeatureOutOfRange { feature, m }),
        None => Ok(()),
    }
}

pub fn is_weak_axp<E: Explainer + ?Sized>(e: &E, x: &FeatureSet) -> Result<bool, ExplainError> {
    check_range(e, x)?;
    Ok(e.weak_axp(x))
}

/// `¬WeakAXp(F \ y)`.
pub fn is_weak_cxp<E: Explainer + ?Sized>(e: &E, y: &FeatureSet) -> Result<bool, ExplainError> {
    check_range(e, y)?;
    Ok(!e.weak_axp(&y.complement(e.num_features())))
}

/// Shrinks a weak AXp to a subset-minimal one, trying features in
/// ascending order.
pub fn find_axp<E: Explainer + ?Sized>(e: &E, seed: &FeatureSet) -> Result<FeatureSet, ExplainError> {
    if !is_weak_axp(e, seed)? {
        return Err(ExplainError::NotWeakAxp(seed.clone()));
    }
    let mut x = seed.clone();
    for i in seed.iter() {
        let smaller = x.without(i);
        if e.weak_axp(&smaller) {
            x = smaller;
        }
    }
    Ok(x)
}

/// Shrinks a weak CXp to a subset-minimal one, trying features in
/// descending order, so the result keeps the lowest indices it can.
pub fn find_cxp<E: Explainer + ?Sized>(e: &E, seed: &FeatureSet) -> Result<FeatureSet, ExplainError> {
    if !is_weak_cxp(e, seed)? {
        return Err(ExplainError::NotWeakCxp(seed.clone()));
    }
    let m = e.num_features();
    let mut y = seed.clone();
    for i in seed.to_vec().into_iter().rev() {
        let smaller = y.without(i);
        if !e.weak_axp(&smaller.complement(m)) {
            y = smaller;
        }
    }
    Ok(y)
}

/// Masks over `m` bits in order of increasing popcount, ties ascending.
fn masks_by_size(m: usize) -> Vec<u64> {
    let mut masks: Vec<u64> = (0..1u64 << m).collect();
    masks.sort_by_key(|&s| (s.count_ones(), s));
    masks
}

/// Minimal sets satisfying a monotone predicate, by increasing cardinality
/// with supersets of earlier finds skipped.
fn minimal_sets(m: usize, mut holds: impl FnMut(&FeatureSet) -> bool) -> Vec<FeatureSet> {
    let mut found: Vec<u64> = Vec::new();
    for mask in masks_by_size(m) {
        if found.iter().any(|&f| f & !mask == 0) {
            continue;
        }
        if holds(&FeatureSet::from_mask(mask, m)) {
            found.push(mask);
        }
    }
    let mut sets: Vec<FeatureSet> = found.into_iter().map(|f| FeatureSet::from_mask(f, m)).collect();
    sets.sort();
    sets
}

fn enum_guard(m: usize) -> Result<(), ExplainError> {
    if m > MAX_ENUM_FEATURES {
        return Err(ExplainError::TooManyFeatures {
            m,
            max: MAX_ENUM_FEATURES,
        });
    }
    Ok(())
}

/// Every AXp, sorted.
pub fn enumerate_axps_bruteforce<E: Explainer + ?Sized>(e: &E) -> Result<Vec<FeatureSet>, ExplainError> {
    let m = e.num_features();
    enum_guard(m)?;
    Ok(minimal_sets(m, |x| e.weak_axp(x)))
}

/// Every CXp, sorted.
pub fn enumerate_cxps_bruteforce<E: Explainer + ?Sized>(e: &E) -> Result<Vec<FeatureSet>, ExplainError> {
    let m = e.num_features();
    enum_guard(m)?;
    Ok(minimal_sets(m, |y| !e.weak_axp(&y.complement(m))))
}

/// Minimal hitting sets of `sets` over features `1..=m`, sorted.
pub fn minimal_hitting_sets(sets: &[FeatureSet], m: usize) -> Result<Vec<FeatureSet>, ExplainError> {
    enum_guard(m)?;
    Ok(minimal_sets(m, |h| sets.iter().all(|s| s.intersects(h))))
}

/// SDD classifier with its negation computed once, so that instances of
/// either class reduce to an inconsistency check.
#[derive(Debug, Clone)]
pub struct SddClassifier {
    sdd: Sdd,
    negated: Sdd,
}

impl SddClassifier {
    pub fn new(sdd: Sdd) -> Self {
        let negated = sdd.negate();
        Self { sdd, negated }
    }

    pub fn sdd(&self) -> &Sdd {
        &self.sdd
    }

    pub fn negated(&self) -> &Sdd {
        &self.negated
    }

    pub fn is_constant(&self) -> bool {
        !self.sdd.is_consistent() || !self.negated.is_consistent()
    }

    /// Binds the classifier to `instance`, checking the prediction.
    pub fn explainer(&self, instance: &Instance) -> Result<SddExplainer<'_>, ExplainError> {
        if self.is_constant() {
            return Err(ExplainError::Constant);
        }
        let predicted = self.sdd.predict(&instance.point)?;
        if predicted != instance.class {
            return Err(ExplainError::Mismatch {
                predicted,
                claimed: instance.class,
            });
        }
        let diagram = if predicted == 0 { &self.sdd } else { &self.negated };
        Ok(SddExplainer {
            diagram,
            point: instance.point.iter().map(|&v| v == 1).collect(),
            class: predicted,
        })
    }
}

impl Classifier for SddClassifier {
    fn num_features(&self) -> usize {
        self.sdd.num_vars()
    }

    fn domain(&self, feature: usize) -> &[Value] {
        self.sdd.domain(feature)
    }

    fn predict(&self, point: &[Value]) -> Result<Class, PointError> {
        self.sdd.predict(point)
    }
}

/// An SDD bound to an instance. `WeakAXp(X)` holds iff the diagram that is
/// false at the instance stays inconsistent with `X` fixed.
#[derive(Debug, Clone)]
pub struct SddExplainer<'a> {
    diagram: &'a Sdd,
    point: Vec<bool>,
    class: Class,
}

impl SddExplainer<'_> {
    /// The diagram that evaluates to ⊥ at the instance: the classifier
    /// itself for ⊥-instances, its negation for ⊤-instances.
    pub fn diagram(&self) -> &Sdd {
        self.diagram
    }

    /// The instance as seen by [`SddExplainer::diagram`], i.e. class ⊥.
    pub fn bottom_instance(&self) -> Instance {
        Instance::new(self.point.iter().map(|&b| Value::from(b)).collect(), 0)
    }

    /// Whether the bound instance was predicted ⊤ and the negation is used.
    pub fn uses_negation(&self) -> bool {
        self.class != 0
    }
}

impl Explainer for SddExplainer<'_> {
    fn num_features(&self) -> usize {
        self.point.len()
    }

    fn weak_axp(&self, x: &FeatureSet) -> bool {
        let fixed: Vec<Option<bool>> = (1..=self.point.len())
            .map(|i| x.contains(i).then(|| self.point[i - 1]))
            .collect();
        !self.diagram.consistent_with(&fixed)
    }
}

impl Explainer for XpGraph {
    fn num_features(&self) -> usize {
        XpGraph::num_features(self)
    }

    fn weak_axp(&self, x: &FeatureSet) -> bool {
        self.sigma_of(x)
    }
}

/// Checks the definition directly by enumerating every point that agrees
/// with the instance on `X`. Exponential; meant as an oracle.
#[derive(Debug, Clone, Copy)]
pub struct PointwiseExplainer<'a, C: ?Sized> {
    clf: &'a C,
    instance: &'a Instance,
}

impl<'a, C: Classifier + ?Sized> PointwiseExplainer<'a, C> {
    pub fn new(clf: &'a C, instance: &'a Instance) -> Result<Self, ExplainError> {
        let m = clf.num_features();
        if instance.num_features() != m {
            return Err(ExplainError::InstanceLength {
                expected: m,
                got: instance.num_features(),
            });
        }
        let predicted = clf.predict(&instance.point)?;
        if predicted != instance.class {
            return Err(ExplainError::Mismatch {
                predicted,
                claimed: instance.class,
            });
        }
        Ok(Self { clf, instance })
    }
}

impl<C: Classifier + ?Sized> Explainer for PointwiseExplainer<'_, C> {
    fn num_features(&self) -> usize {
        self.clf.num_features()
    }

    fn weak_axp(&self, x: &FeatureSet) -> bool {
        let m = self.clf.num_features();
        let domains: Vec<&[Value]> = (1..=m).map(|i| self.clf.domain(i)).collect();
        let fixed: Vec<Option<Value>> = (1..=m)
            .map(|i| x.contains(i).then(|| self.instance.value(i)))
            .collect();
        for_each_point(&domains, &fixed, |p| {
            self.clf.predict(p).is_ok_and(|c| c == self.instance.class)
        })
    }
}

/// Features occurring in at least one of `sets`, as a membership vector
/// indexed by feature (`result[0]` unused).
pub fn membership(sets: &[FeatureSet], m: usize) -> Vec<bool> {
    let mut member = vec![false; m + 1];
    for s in sets {
        for i in s.iter().filter(|&i| i <= m) {
            member[i] = true;
        }
    }
    member
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `κ(x1) = x1`.
    struct Identity;

    impl Classifier for Identity {
        fn num_features(&self) -> usize {
            1
        }
        fn domain(&self, _: usize) -> &[Value] {
            &[0, 1]
        }
        fn predict(&self, p: &[Value]) -> Result<Class, PointError> {
            self.check_point(p)?;
            Ok(p[0])
        }
    }

    /// The running example, `(x2 ∧ x1) ∨ (x1 ∧ x4) ∨ (x4 ∧ x3)`.
    struct Kappa;

    impl Classifier for Kappa {
        fn num_features(&self) -> usize {
            4
        }
        fn domain(&self, _: usize) -> &[Value] {
            &[0, 1]
        }
        fn predict(&self, p: &[Value]) -> Result<Class, PointError> {
            self.check_point(p)?;
            let [pp, y, m, w] = [p[0] == 1, p[1] == 1, p[2] == 1, p[3] == 1];
            Ok(Class::from((y && pp) || (pp && w) || (w && m)))
        }
    }

    fn ella() -> Instance {
        Instance::new(vec![0, 1, 0, 1], 0)
    }

    #[test]
    fn identity_has_single_explanations() {
        let inst = Instance::new(vec![1], 1);
        let e = PointwiseExplainer::new(&Identity, &inst).unwrap();
        assert_eq!(enumerate_axps_bruteforce(&e).unwrap(), vec![FeatureSet::from([1])]);
        assert_eq!(enumerate_cxps_bruteforce(&e).unwrap(), vec![FeatureSet::from([1])]);
    }

    #[test]
    fn running_example_oracle() {
        let inst = ella();
        let e = PointwiseExplainer::new(&Kappa, &inst).unwrap();
        assert!(is_weak_axp(&e, &[1, 3].into()).unwrap());
        assert!(!is_weak_axp(&e, &FeatureSet::new()).unwrap());
        assert!(is_weak_axp(&e, &FeatureSet::full(4)).unwrap());
        assert!(is_weak_cxp(&e, &[1].into()).unwrap());
        assert!(!is_weak_cxp(&e, &FeatureSet::new()).unwrap());
        assert_eq!(find_axp(&e, &FeatureSet::full(4)).unwrap(), [1, 3].into());
        assert_eq!(find_cxp(&e, &FeatureSet::full(4)).unwrap(), [1].into());
        assert_eq!(find_cxp(&e, &[2, 3].into()).unwrap(), [3].into());
        assert_eq!(find_cxp(&e, &[3].into()).unwrap(), [3].into());
        let axps = enumerate_axps_bruteforce(&e).unwrap();
        let cxps = enumerate_cxps_bruteforce(&e).unwrap();
        assert_eq!(axps, vec![FeatureSet::from([1, 3])]);
        assert_eq!(cxps, vec![FeatureSet::from([1]), FeatureSet::from([3])]);
        assert_eq!(minimal_hitting_sets(&cxps, 4).unwrap(), axps);
        assert_eq!(minimal_hitting_sets(&axps, 4).unwrap(), cxps);
    }

    #[test]
    fn preconditions_are_reported() {
        let inst = ella();
        let e = PointwiseExplainer::new(&Kappa, &inst).unwrap();
        assert_eq!(
            find_cxp(&e, &FeatureSet::new()),
            Err(ExplainError::NotWeakCxp(FeatureSet::new()))
        );
        assert_eq!(
            find_axp(&e, &[2].into()),
            Err(ExplainError::NotWeakAxp([2].into()))
        );
        assert_eq!(
            is_weak_axp(&e, &[5].into()),
            Err(ExplainError::FeatureOutOfRange { feature: 5, m: 4 })
        );
        let wrong = Instance::new(vec![1, 1, 0, 0], 0);
        assert!(matches!(
            PointwiseExplainer::new(&Kappa, &wrong),
            Err(ExplainError::Mismatch { predicted: 1, claimed: 0 })
        ));
    }

    #[test]
    fn axp_fixed_point() {
        let inst = ella();
        let e = PointwiseExplainer::new(&Kappa, &inst).unwrap();
        assert_eq!(find_axp(&e, &[1, 3].into()).unwrap(), [1, 3].into());
    }

    #[test]
    fn membership_vector() {
        let member = membership(&[[1, 3].into()], 4);
        assert_eq!(member, vec![false, true, false, true, false]);
    }
}
