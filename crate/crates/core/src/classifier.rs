use alloc::vec::Vec;

use thiserror::Error;

/// A feature value. Boolean features use `0` and `1`.
pub type Value = u32;

/// A class label. Propositional classifiers use `0` for ⊥ and `1` for ⊤.
pub type Class = u32;

pub(crate) const BOOLEAN_DOMAIN: [Value; 2] = [0, 1];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointError {
    #[error("point has {got} values, classifier has {expected} features")]
    Length { expected: usize, got: usize },
    #[error("value {value} is outside the domain of feature {feature}")]
    Value { feature: usize, value: Value },
}

/// A total classification function over a finite feature space.
pub trait Classifier {
    /// Number of features `m`; features are `1..=m`.
    fn num_features(&self) -> usize;

    /// Finite domain of 1-based `feature`.
    fn domain(&self, feature: usize) -> &[Value];

    fn predict(&self, point: &[Value]) -> Result<Class, PointError>;

    /// Checks length and domain membership of every coordinate.
    fn check_point(&self, point: &[Value]) -> Result<(), PointError> {
        let m = self.num_features();
        if point.len() != m {
            return Err(PointError::Length {
                expected: m,
                got: point.len(),
            });
        }
        for (i, &value) in point.iter().enumerate() {
            if !self.domain(i + 1).contains(&value) {
                return Err(PointError::Value {
                    feature: i + 1,
                    value,
                });
            }
        }
        Ok(())
    }
}

/// Enumerates every point of the product space spanned by `domains`,
/// starting with the first value of each domain; feature 1 varies fastest.
/// `fixed[i]`, when set, pins coordinate `i`.
pub(crate) fn for_each_point(
    domains: &[&[Value]],
    fixed: &[Option<Value>],
    mut visit: impl FnMut(&[Value]) -> bool,
) -> bool {
    let m = domains.len();
    let mut cursor = alloc::vec![0usize; m];
    let mut point: Vec<Value> = (0..m)
        .map(|i| fixed[i].unwrap_or(domains[i][0]))
        .collect();
    loop {
        if !visit(&point) {
            return false;
        }
        let mut i = 0;
        loop {
            if i == m {
                return true;
            }
            if fixed[i].is_some() {
                i += 1;
                continue;
            }
            cursor[i] += 1;
            if cursor[i] < domains[i].len() {
                point[i] = domains[i][cursor[i]];
                break;
            }
            cursor[i] = 0;
            point[i] = domains[i][0];
            i += 1;
        }
    }
}
