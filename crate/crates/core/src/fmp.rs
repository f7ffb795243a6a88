//! Feature membership decisions.
//!
//! [`decide_membership`] encodes the query, hands the CNF to a
//! [`SatBackend`] and turns the model into a witness AXp. With the one-step
//! method the model's selectors are the witness; with the two-step method
//! they form a seed `X′` that is shrunk with [`find_axp`], which keeps `t`
//! because `X′ \ {t}` is not a weak AXp. Every witness is re-checked
//! against the explainer before it is returned.

use core::fmt;
use core::time::Duration;

use thiserror::Error;

use crate::cnf::CnfFormula;
use crate::encode::{encode_sdd, encode_xpg, EncodeError, Encoding, Method};
use crate::explain::{find_axp, ExplainError, Explainer, SddExplainer};
use crate::feature::FeatureSet;
use crate::sat::{solve_interruptible, SatResult, SolveError};
use crate::xpg::XpGraph;

/// Something that decides CNF satisfiability.
pub trait SatBackend {
    type Error: fmt::Debug + fmt::Display;

    fn solve(&mut self, cnf: &CnfFormula) -> Result<SatResult, Self::Error>;
}

fn never() -> bool {
    false
}

/// The built-in CDCL solver, optionally polling a stop flag.
#[derive(Clone)]
pub struct InternalBackend<S = fn() -> bool> {
    stop: S,
}

impl InternalBackend {
    pub fn new() -> Self {
        Self { stop: never }
    }
}

impl Default for InternalBackend {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: FnMut() -> bool> InternalBackend<S> {
    /// Aborts a solve with [`SolveError::Interrupted`] once `stop` returns
    /// `true`.
    pub fn with_stop(stop: S) -> Self {
        Self { stop }
    }
}

impl<S> fmt::Debug for InternalBackend<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("InternalBackend")
    }
}

impl<S: FnMut() -> bool> SatBackend for InternalBackend<S> {
    type Error = SolveError;

    fn solve(&mut self, cnf: &CnfFormula) -> Result<SatResult, SolveError> {
        solve_interruptible(cnf, &[], &mut self.stop)
    }
}

/// A classifier bound to an instance, in one of the two encodable forms.
#[derive(Debug, Clone, Copy)]
pub enum Route<'a> {
    Sdd(&'a SddExplainer<'a>),
    Xpg(&'a XpGraph),
}

impl Route<'_> {
    pub fn num_features(&self) -> usize {
        match self {
            Route::Sdd(e) => e.num_features(),
            Route::Xpg(x) => x.num_features(),
        }
    }

    pub fn encode(&self, t: usize, method: Method) -> Result<Encoding, EncodeError> {
        match self {
            Route::Sdd(e) => encode_sdd(e.diagram(), &e.bottom_instance(), t, method),
            Route::Xpg(x) => encode_xpg(x, t, method),
        }
    }
}

impl Explainer for Route<'_> {
    fn num_features(&self) -> usize {
        Route::num_features(self)
    }

    fn weak_axp(&self, x: &FeatureSet) -> bool {
        match self {
            Route::Sdd(e) => e.weak_axp(x),
            Route::Xpg(g) => g.weak_axp(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FmpQuery {
    pub target: usize,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FmpAnswer {
    /// `t` belongs to the witness AXp.
    Yes { witness: FeatureSet },
    No,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FmpStats {
    pub vars: u32,
    pub clauses: usize,
    /// Two-step only: the decoded weak AXp before shrinking.
    pub seed: Option<FeatureSet>,
    pub encode_time: Duration,
    pub solve_time: Duration,
    pub total_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FmpOutcome {
    pub answer: FmpAnswer,
    pub stats: FmpStats,
}

impl FmpOutcome {
    pub fn is_yes(&self) -> bool {
        matches!(self.answer, FmpAnswer::Yes { .. })
    }

    pub fn witness(&self) -> Option<&FeatureSet> {
        match &self.answer {
            FmpAnswer::Yes { witness } => Some(witness),
            FmpAnswer::No => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FmpError<E: fmt::Debug + fmt::Display> {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error("solver: {0}")]
    Backend(E),
    #[error(transparent)]
    Explain(#[from] ExplainError),
    #[error("decoded seed {seed} does not satisfy the two-step precondition for target {target}")]
    Precondition { seed: FeatureSet, target: usize },
    #[error("witness {witness} is not an AXp containing target {target}")]
    InvalidWitness { witness: FeatureSet, target: usize },
}

/// Whether `seed` is a weak AXp that stops being one without `t`.
pub fn two_step_precondition<E: Explainer + ?Sized>(e: &E, seed: &FeatureSet, t: usize) -> bool {
    e.weak_axp(seed) && !e.weak_axp(&seed.without(t))
}

/// Whether `x` is an AXp (weak and subset-minimal) containing `t`.
pub fn is_axp_with<E: Explainer + ?Sized>(e: &E, x: &FeatureSet, t: usize) -> bool {
    x.contains(t) && e.weak_axp(x) && x.iter().all(|i| !e.weak_axp(&x.without(i)))
}

/// Decides whether `query.target` occurs in some AXp.
pub fn decide_membership<B: SatBackend>(
    route: Route<'_>,
    query: FmpQuery,
    backend: &mut B,
) -> Result<FmpOutcome, FmpError<B::Error>> {
    decide_membership_timed(route, query, backend, &|| Duration::ZERO)
}

/// Like [`decide_membership`], recording phase durations read from
/// `clock`, a monotonic time since an arbitrary origin.
pub fn decide_membership_timed<B: SatBackend>(
    route: Route<'_>,
    query: FmpQuery,
    backend: &mut B,
    clock: &dyn Fn() -> Duration,
) -> Result<FmpOutcome, FmpError<B::Error>> {
    let start = clock();
    let t = query.target;
    let enc = route.encode(t, query.method)?;
    let encoded = clock();
    let result = backend.solve(&enc.cnf).map_err(FmpError::Backend)?;
    let solved = clock();
    let mut stats = FmpStats {
        vars: enc.cnf.num_vars(),
        clauses: enc.cnf.num_clauses(),
        seed: None,
        encode_time: encoded.saturating_sub(start),
        solve_time: solved.saturating_sub(encoded),
        total_time: Duration::ZERO,
    };
    let answer = match result {
        SatResult::Unsat => FmpAnswer::No,
        SatResult::Sat(model) => {
            let selected = enc.map.decode_selectors(model.values());
            let witness = match query.method {
                Method::OneStep => selected,
                Method::TwoStep => {
                    if !two_step_precondition(&route, &selected, t) {
                        return Err(FmpError::Precondition { seed: selected, target: t });
                    }
                    let w = find_axp(&route, &selected)?;
                    stats.seed = Some(selected);
                    w
                }
            };
            if !is_axp_with(&route, &witness, t) {
                return Err(FmpError::InvalidWitness { witness, target: t });
            }
            FmpAnswer::Yes { witness }
        }
    };
    stats.total_time = clock().saturating_sub(start);
    Ok(FmpOutcome { answer, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::Instance;
    use crate::xpg::{build_xpg_from_dt, DecisionTree, DtSpecNode};
    use alloc::vec;

    /// `x1 ∨ x2` as a tree, instance (0, 0) predicted 0: the only AXp is
    /// {1, 2}.
    fn disjunction() -> XpGraph {
        let dt = DecisionTree::new(
            vec![vec![0, 1], vec![0, 1], vec![0, 1]],
            vec![
                (1, DtSpecNode::NonTerminal { feature: 1 }),
                (2, DtSpecNode::NonTerminal { feature: 2 }),
                (3, DtSpecNode::Leaf { class: 1 }),
                (4, DtSpecNode::Leaf { class: 0 }),
                (5, DtSpecNode::Leaf { class: 1 }),
            ],
            vec![(1, 2, vec![0]), (1, 3, vec![1]), (2, 4, vec![0]), (2, 5, vec![1])],
        )
        .unwrap();
        build_xpg_from_dt(&dt, &Instance::new(vec![0, 0, 0], 0)).unwrap()
    }

    #[test]
    fn both_methods_on_a_disjunction() {
        let xpg = disjunction();
        for method in [Method::OneStep, Method::TwoStep] {
            for (t, yes) in [(1, true), (2, true), (3, false)] {
                let out = decide_membership(
                    Route::Xpg(&xpg),
                    FmpQuery { target: t, method },
                    &mut InternalBackend::new(),
                )
                .unwrap();
                assert_eq!(out.is_yes(), yes, "t={t} {method}");
                if yes {
                    assert_eq!(out.witness().unwrap(), &FeatureSet::from([1, 2]));
                }
            }
        }
    }

    #[test]
    fn bad_target_propagates() {
        let xpg = disjunction();
        let err = decide_membership(
            Route::Xpg(&xpg),
            FmpQuery {
                target: 9,
                method: Method::TwoStep,
            },
            &mut InternalBackend::new(),
        )
        .unwrap_err();
        assert_eq!(err, FmpError::Encode(EncodeError::TargetOutOfRange { t: 9, m: 3 }));
    }

    #[test]
    fn stop_flag_reaches_the_solver() {
        let xpg = disjunction();
        let mut backend = InternalBackend::with_stop(|| true);
        // Tiny formulas finish before the first poll.
        let out = decide_membership(
            Route::Xpg(&xpg),
            FmpQuery {
                target: 1,
                method: Method::OneStep,
            },
            &mut backend,
        );
        assert!(out.is_ok());
    }
}
