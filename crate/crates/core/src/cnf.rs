//! CNF formulas over integer variables and biconditional clausification.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Not;

use thiserror::Error;

/// A literal in DIMACS convention: `+v` or `-v` for variable `v ≥ 1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(i32);

impl Lit {
    pub fn pos(var: u32) -> Self {
        debug_assert!(var >= 1 && var <= i32::MAX as u32);
        Lit(var as i32)
    }

    pub fn neg(var: u32) -> Self {
        debug_assert!(var >= 1 && var <= i32::MAX as u32);
        Lit(-(var as i32))
    }

    /// `Lit::pos(var)` when `positive`, otherwise `Lit::neg(var)`.
    pub fn new(var: u32, positive: bool) -> Self {
        if positive {
            Lit::pos(var)
        } else {
            Lit::neg(var)
        }
    }

    pub fn from_dimacs(value: i32) -> Option<Self> {
        (value != 0 && value != i32::MIN).then_some(Lit(value))
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Truth value under `values[var - 1]`.
    pub fn eval(self, values: &[bool]) -> bool {
        values[self.var() as usize - 1] == self.is_positive()
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("literal {lit} refers to a variable outside 1..={num_vars}")]
    VarOutOfRange { lit: i32, num_vars: u32 },
    #[error("empty clause (use mark_unsat for an explicit contradiction)")]
    EmptyClause,
    #[error("biconditional with no operands")]
    NoOperands,
}

/// One side of a biconditional: a literal or a constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operand {
    Const(bool),
    Lit(Lit),
}

impl From<Lit> for Operand {
    fn from(lit: Lit) -> Self {
        Operand::Lit(lit)
    }
}

impl From<bool> for Operand {
    fn from(value: bool) -> Self {
        Operand::Const(value)
    }
}

/// A clause set over variables `1..=num_vars`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Vec<Lit>>,
}

impl CnfFormula {
    pub fn new(num_vars: u32) -> Self {
        Self {
            num_vars,
            clauses: Vec::new(),
        }
    }

    /// Allocates a fresh variable.
    pub fn new_var(&mut self) -> u32 {
        self.num_vars += 1;
        self.num_vars
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn check_lit(&self, lit: Lit) -> Result<(), CnfError> {
        if lit.var() == 0 || lit.var() > self.num_vars {
            return Err(CnfError::VarOutOfRange {
                lit: lit.to_dimacs(),
                num_vars: self.num_vars,
            });
        }
        Ok(())
    }

    pub fn add_clause<I: IntoIterator<Item = Lit>>(&mut self, lits: I) -> Result<(), CnfError> {
        let clause: Vec<Lit> = lits.into_iter().collect();
        if clause.is_empty() {
            return Err(CnfError::EmptyClause);
        }
        for &lit in &clause {
            self.check_lit(lit)?;
        }
        self.clauses.push(clause);
        Ok(())
    }

    pub fn add_unit(&mut self, lit: Lit) -> Result<(), CnfError> {
        self.add_clause([lit])
    }

    /// Appends the empty clause, making the formula unsatisfiable.
    pub fn mark_unsat(&mut self) {
        self.clauses.push(Vec::new());
    }

    /// `v ⟺ ∨ ops`.
    pub fn add_eq_or(&mut self, v: Lit, ops: &[Operand]) -> Result<(), CnfError> {
        for clause in clausify_eq_or(v, ops)? {
            self.add_clause(clause)?;
        }
        Ok(())
    }

    /// `v ⟺ ∧ ops`.
    pub fn add_eq_and(&mut self, v: Lit, ops: &[Operand]) -> Result<(), CnfError> {
        for clause in clausify_eq_and(v, ops)? {
            self.add_clause(clause)?;
        }
        Ok(())
    }

    /// Whether every clause holds under `values[var - 1]`.
    pub fn is_satisfied_by(&self, values: &[bool]) -> bool {
        values.len() >= self.num_vars as usize
            && self.clauses.iter().all(|c| c.iter().any(|l| l.eval(values)))
    }
}

/// Clauses of `v ⟺ (o_1 ∨ … ∨ o_n)`; constant operands are folded first.
pub fn clausify_eq_or(v: Lit, ops: &[Operand]) -> Result<Vec<Vec<Lit>>, CnfError> {
    if ops.is_empty() {
        return Err(CnfError::NoOperands);
    }
    if ops.contains(&Operand::Const(true)) {
        return Ok(vec![vec![v]]);
    }
    let lits = literals(ops);
    if lits.is_empty() {
        return Ok(vec![vec![!v]]);
    }
    let mut clauses = Vec::with_capacity(lits.len() + 1);
    clauses.push(core::iter::once(!v).chain(lits.iter().copied()).collect());
    clauses.extend(lits.iter().map(|&a| vec![v, !a]));
    Ok(clauses)
}

/// Clauses of `v ⟺ (o_1 ∧ … ∧ o_n)`; constant operands are folded first.
pub fn clausify_eq_and(v: Lit, ops: &[Operand]) -> Result<Vec<Vec<Lit>>, CnfError> {
    if ops.is_empty() {
        return Err(CnfError::NoOperands);
    }
    if ops.contains(&Operand::Const(false)) {
        return Ok(vec![vec![!v]]);
    }
    let lits = literals(ops);
    if lits.is_empty() {
        return Ok(vec![vec![v]]);
    }
    let mut clauses: Vec<Vec<Lit>> = lits.iter().map(|&a| vec![!v, a]).collect();
    clauses.push(core::iter::once(v).chain(lits.iter().map(|&a| !a)).collect());
    Ok(clauses)
}

fn literals(ops: &[Operand]) -> Vec<Lit> {
    ops.iter()
        .filter_map(|o| match o {
            Operand::Lit(l) => Some(*l),
            Operand::Const(_) => None,
        })
        .collect()
}
