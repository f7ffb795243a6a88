use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::classifier::{Class, Value};

/// A set of 1-based feature indices.
///
/// Ordered so that sets of feature sets (explanation listings) have a
/// deterministic iteration order.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureSet(BTreeSet<usize>);

impl FeatureSet {
    pub fn new() -> Self {
        Self(BTreeSet::new())
    }

    /// `{1, ..., m}`.
    pub fn full(m: usize) -> Self {
        (1..=m).collect()
    }

    /// Features `i` with `mask` bit `i - 1` set.
    pub fn from_mask(mask: u64, m: usize) -> Self {
        (1..=m).filter(|i| mask >> (i - 1) & 1 == 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, feature: usize) -> bool {
        self.0.contains(&feature)
    }

    pub fn insert(&mut self, feature: usize) -> bool {
        self.0.insert(feature)
    }

    pub fn remove(&mut self, feature: usize) -> bool {
        self.0.remove(&feature)
    }

    /// Copy of `self` without `feature`.
    pub fn without(&self, feature: usize) -> Self {
        let mut out = self.clone();
        out.remove(feature);
        out
    }

    /// `{1..m} \ self`.
    pub fn complement(&self, m: usize) -> Self {
        (1..=m).filter(|i| !self.contains(*i)).collect()
    }

    pub fn is_subset(&self, other: &FeatureSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersects(&self, other: &FeatureSet) -> bool {
        self.0.intersection(&other.0).next().is_some()
    }

    /// Ascending iteration.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// `true` when every index lies in `1..=m`.
    pub fn within(&self, m: usize) -> bool {
        self.0.first().is_none_or(|&lo| lo >= 1) && self.max().is_none_or(|hi| hi <= m)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for FeatureSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl<const N: usize> From<[usize; N]> for FeatureSet {
    fn from(features: [usize; N]) -> Self {
        features.into_iter().collect()
    }
}

impl fmt::Debug for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

/// Comma-separated ascending list, e.g. `1,3`; empty set prints nothing.
impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// A point `v` of feature space together with its predicted class `c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    /// `point[i - 1]` is the value of feature `i`.
    pub point: Vec<Value>,
    pub class: Class,
}

impl Instance {
    pub fn new(point: Vec<Value>, class: Class) -> Self {
        Self { point, class }
    }

    pub fn num_features(&self) -> usize {
        self.point.len()
    }

    /// Value of 1-based feature `i`.
    pub fn value(&self, feature: usize) -> Value {
        self.point[feature - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn display_is_sorted_and_comma_separated() {
        let set: FeatureSet = [3, 1].into();
        assert_eq!(set.to_string(), "1,3");
        assert_eq!(FeatureSet::new().to_string(), "");
    }

    #[test]
    fn complement_and_mask() {
        let set = FeatureSet::from_mask(0b0101, 4);
        assert_eq!(set, [1, 3].into());
        assert_eq!(set.complement(4), [2, 4].into());
        assert!(set.within(4));
        assert!(!FeatureSet::from([0]).within(4));
        assert!(!FeatureSet::from([5]).within(4));
    }
}
