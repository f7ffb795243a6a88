//! A conflict-driven clause-learning SAT solver.
//!
//! Two watched literals with blockers, VSIDS variable activity on a binary
//! heap, phase saving, first-UIP learning with local minimization, Luby
//! restarts and activity-based deletion of learnt clauses. There is no
//! randomness: ties in the heap go to the lower variable, so runs are
//! reproducible. Assumptions are decided first, one per level.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::cnf::{CnfFormula, Lit};

/// A total assignment; `values[var - 1]` is the value of `var`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn new(values: Vec<bool>) -> Self {
        Self { values }
    }

    pub fn value(&self, var: u32) -> bool {
        self.values[var as usize - 1]
    }

    pub fn lit(&self, lit: Lit) -> bool {
        self.value(lit.var()) == lit.is_positive()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat(Model),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            SatResult::Sat(m) => Some(m),
            SatResult::Unsat => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("assumption {lit} refers to a variable outside 1..={num_vars}")]
    AssumptionOutOfRange { lit: i32, num_vars: u32 },
    #[error("search interrupted")]
    Interrupted,
    #[error("model violates clause {0}")]
    InvalidModel(usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub restarts: u64,
    pub learnts: u64,
    pub deleted: u64,
}

/// Decides `cnf` under `assumptions`.
pub fn solve(cnf: &CnfFormula, assumptions: &[Lit]) -> Result<SatResult, SolveError> {
    Solver::new(cnf).solve(assumptions, &mut || false)
}

/// Like [`solve`], polling `stop` during search; a `true` answer aborts
/// with [`SolveError::Interrupted`].
pub fn solve_interruptible(
    cnf: &CnfFormula,
    assumptions: &[Lit],
    stop: &mut dyn FnMut() -> bool,
) -> Result<SatResult, SolveError> {
    Solver::new(cnf).solve(assumptions, stop)
}

const UNDEF: u8 = 2;
const NO_REASON: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Watcher {
    clause: u32,
    blocker: u32,
}

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<u32>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

/// Internal literal code: `2 * var + sign` with 0-based `var`.
fn code(lit: Lit) -> u32 {
    2 * (lit.var() - 1) + u32::from(!lit.is_positive())
}

fn var_of(l: u32) -> usize {
    (l >> 1) as usize
}

#[derive(Debug, Clone)]
pub struct Solver {
    num_vars: usize,
    original: CnfFormula,
    clauses: Vec<Clause>,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watcher>>,
    /// Per variable: 0 false, 1 true, `UNDEF`.
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<u32>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    clause_inc: f64,
    heap: Heap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    max_learnts: f64,
    stats: SolverStats,
}

impl Solver {
    pub fn new(cnf: &CnfFormula) -> Self {
        let n = cnf.num_vars() as usize;
        let mut s = Self {
            num_vars: n,
            original: cnf.clone(),
            clauses: Vec::new(),
            learnts: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            assigns: vec![UNDEF; n],
            level: vec![0; n],
            reason: vec![NO_REASON; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n],
            var_inc: 1.0,
            clause_inc: 1.0,
            heap: Heap::new(n),
            phase: vec![false; n],
            seen: vec![false; n],
            ok: true,
            max_learnts: 0.0,
            stats: SolverStats::default(),
        };
        for v in 0..n {
            s.heap.insert(v, &s.activity);
        }
        for clause in cnf.clauses() {
            if !s.add_clause(clause) {
                s.ok = false;
                break;
            }
        }
        s.max_learnts = (s.clauses.len() as f64 / 3.0).max(1000.0);
        s
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    fn value(&self, l: u32) -> u8 {
        match self.assigns[var_of(l)] {
            UNDEF => UNDEF,
            a => a ^ (l & 1) as u8,
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds an input clause at level 0; `false` when the formula became
    /// trivially unsatisfiable.
    fn add_clause(&mut self, clause: &[Lit]) -> bool {
        let mut lits: Vec<u32> = clause.iter().map(|&l| code(l)).collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] ^ 1 == w[1]) {
            return true;
        }
        if lits.iter().any(|&l| self.value(l) == 1) {
            return true;
        }
        lits.retain(|&l| self.value(l) == UNDEF);
        match lits.len() {
            0 => false,
            1 => {
                self.enqueue(lits[0], NO_REASON);
                true
            }
            _ => {
                self.attach(lits, false);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<u32>, learnt: bool) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[lits[0] as usize].push(Watcher {
            clause: cref,
            blocker: lits[1],
        });
        self.watches[lits[1] as usize].push(Watcher {
            clause: cref,
            blocker: lits[0],
        });
        self.clauses.push(Clause {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
        });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    fn enqueue(&mut self, l: u32, reason: u32) {
        let v = var_of(l);
        self.assigns[v] = u8::from(l & 1 == 0);
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns a conflicting clause.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p ^ 1;
            let mut ws = core::mem::take(&mut self.watches[false_lit as usize]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.clause as usize;
                let lits = &mut self.clauses[cref].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let first_value = match self.assigns[var_of(first)] {
                    UNDEF => UNDEF,
                    a => a ^ (first & 1) as u8,
                };
                if first != w.blocker && first_value == 1 {
                    ws[j] = Watcher {
                        clause: w.clause,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    let l = lits[k];
                    let val = match self.assigns[var_of(l)] {
                        UNDEF => UNDEF,
                        a => a ^ (l & 1) as u8,
                    };
                    if val != 0 {
                        lits.swap(1, k);
                        self.watches[lits[1] as usize].push(Watcher {
                            clause: w.clause,
                            blocker: first,
                        });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher {
                    clause: w.clause,
                    blocker: first,
                };
                j += 1;
                if first_value == 0 {
                    conflict = Some(w.clause);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                    self.qhead = self.trail.len();
                } else {
                    self.enqueue(first, w.clause);
                }
            }
            ws.truncate(j);
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        let c = &mut self.clauses[cref];
        c.activity += self.clause_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.clause_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<u32>, u32) {
        let mut learnt = vec![0u32];
        let mut path = 0usize;
        let mut p: Option<u32> = None;
        let mut index = self.trail.len();
        let current = self.decision_level();
        loop {
            let cref = confl as usize;
            if self.clauses[cref].learnt {
                self.bump_clause(cref);
            }
            let skip = usize::from(p.is_some());
            for k in skip..self.clauses[cref].lits.len() {
                let q = self.clauses[cref].lits[k];
                let v = var_of(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[var_of(self.trail[index])] {
                    break;
                }
            }
            let lit = self.trail[index];
            let v = var_of(lit);
            self.seen[v] = false;
            path -= 1;
            p = Some(lit);
            if path == 0 {
                break;
            }
            confl = self.reason[v];
        }
        learnt[0] = p.expect("conflict at level > 0") ^ 1;

        // Drop literals implied by other literals of the clause.
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(k, &q)| {
                if k == 0 {
                    return true;
                }
                let r = self.reason[var_of(q)];
                if r == NO_REASON {
                    return true;
                }
                !self.clauses[r as usize].lits[1..].iter().all(|&x| {
                    let v = var_of(x);
                    self.seen[v] || self.level[v] == 0
                })
            })
            .collect();
        for &q in &learnt[1..] {
            self.seen[var_of(q)] = false;
        }
        let mut out: Vec<u32> = learnt
            .into_iter()
            .zip(keep)
            .filter_map(|(q, k)| k.then_some(q))
            .collect();

        let mut bt = 0;
        if out.len() > 1 {
            let mut max_k = 1;
            for k in 2..out.len() {
                if self.level[var_of(out[k])] > self.level[var_of(out[max_k])] {
                    max_k = k;
                }
            }
            out.swap(1, max_k);
            bt = self.level[var_of(out[1])];
        }
        (out, bt)
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level as usize];
        for k in (start..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = var_of(l);
            self.assigns[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.phase[v] = l & 1 == 0;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level as usize);
        self.qhead = start;
    }

    fn pick_branch(&mut self) -> Option<u32> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v] == UNDEF {
                return Some(2 * v as u32 + u32::from(!self.phase[v]));
            }
        }
        None
    }

    fn locked(&self, cref: u32) -> bool {
        let c = &self.clauses[cref as usize];
        let l = c.lits[0];
        self.value(l) == 1 && self.reason[var_of(l)] == cref
    }

    /// Deletes the less active half of the learnt clauses, keeping binary
    /// clauses and reasons.
    fn reduce_db(&mut self) {
        let mut order = self.learnts.clone();
        order.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            ca.activity
                .partial_cmp(&cb.activity)
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let half = order.len() / 2;
        for &cref in &order[..half] {
            if self.clauses[cref as usize].lits.len() > 2 && !self.locked(cref) {
                let c = &mut self.clauses[cref as usize];
                c.deleted = true;
                c.lits = Vec::new();
                self.stats.deleted += 1;
            }
        }
        let clauses = &self.clauses;
        self.learnts.retain(|&c| !clauses[c as usize].deleted);
        for ws in &mut self.watches {
            ws.retain(|w| !clauses[w.clause as usize].deleted);
        }
    }

    /// Searches for up to `budget` conflicts. `None` means restart.
    fn search(
        &mut self,
        budget: u64,
        assumptions: &[u32],
        stop: &mut dyn FnMut() -> bool,
    ) -> Result<Option<bool>, SolveError> {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Ok(Some(false));
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let first = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.bump_clause(cref as usize);
                    self.enqueue(first, cref);
                }
                self.stats.learnts += 1;
                self.var_inc /= 0.95;
                self.clause_inc /= 0.999;
                if conflicts.is_multiple_of(64) && stop() {
                    return Err(SolveError::Interrupted);
                }
                continue;
            }
            if conflicts >= budget {
                self.cancel_until(0);
                return Ok(None);
            }
            if self.learnts.len() as f64 >= self.max_learnts + self.trail.len() as f64 {
                self.reduce_db();
                self.max_learnts *= 1.1;
            }
            let mut next = None;
            while (self.decision_level() as usize) < assumptions.len() {
                let p = assumptions[self.decision_level() as usize];
                match self.value(p) {
                    1 => self.trail_lim.push(self.trail.len()),
                    0 => return Ok(Some(false)),
                    _ => {
                        next = Some(p);
                        break;
                    }
                }
            }
            let decision = match next {
                Some(p) => p,
                None => match self.pick_branch() {
                    Some(p) => p,
                    None => return Ok(Some(true)),
                },
            };
            self.stats.decisions += 1;
            if self.stats.decisions.is_multiple_of(1024) && stop() {
                return Err(SolveError::Interrupted);
            }
            self.trail_lim.push(self.trail.len());
            self.enqueue(decision, NO_REASON);
        }
    }

    /// Decides the formula under `assumptions`. The solver can be reused
    /// with different assumptions; learnt clauses are kept.
    pub fn solve(
        &mut self,
        assumptions: &[Lit],
        stop: &mut dyn FnMut() -> bool,
    ) -> Result<SatResult, SolveError> {
        let n = self.num_vars as u32;
        for &a in assumptions {
            if a.var() == 0 || a.var() > n {
                return Err(SolveError::AssumptionOutOfRange {
                    lit: a.to_dimacs(),
                    num_vars: n,
                });
            }
        }
        if !self.ok {
            return Ok(SatResult::Unsat);
        }
        let assumptions: Vec<u32> = assumptions.iter().map(|&a| code(a)).collect();
        let mut restart = 0u32;
        let outcome = loop {
            let budget = 100 * luby(restart);
            let result = self.search(budget, &assumptions, stop);
            match result {
                Ok(Some(answer)) => break answer,
                Ok(None) => {
                    restart += 1;
                    self.stats.restarts += 1;
                    if stop() {
                        self.cancel_until(0);
                        return Err(SolveError::Interrupted);
                    }
                }
                Err(e) => {
                    self.cancel_until(0);
                    return Err(e);
                }
            }
        };
        if !outcome {
            self.cancel_until(0);
            return Ok(SatResult::Unsat);
        }
        let values: Vec<bool> = self.assigns.iter().map(|&a| a == 1).collect();
        self.cancel_until(0);
        let model = Model::new(values);
        for (k, clause) in self.original.clauses().iter().enumerate() {
            if !clause.iter().any(|&l| model.lit(l)) {
                return Err(SolveError::InvalidModel(k));
            }
        }
        Ok(SatResult::Sat(model))
    }
}

/// The Luby sequence 1, 1, 2, 1, 1, 2, 4, ...
fn luby(x: u32) -> u64 {
    let mut x = u64::from(x);
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

/// Max-heap of variables keyed by activity; ties go to the lower index.
#[derive(Debug, Clone)]
struct Heap {
    items: Vec<usize>,
    pos: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl Heap {
    fn new(n: usize) -> Self {
        Self {
            items: Vec::with_capacity(n),
            pos: vec![ABSENT; n],
        }
    }

    fn better(a: usize, b: usize, act: &[f64]) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.pos[v] != ABSENT {
            return;
        }
        self.pos[v] = self.items.len();
        self.items.push(v);
        self.up(self.items.len() - 1, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if self.pos[v] != ABSENT {
            self.up(self.pos[v], act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.items.first()?;
        let last = self.items.pop().expect("non-empty");
        self.pos[top] = ABSENT;
        if !self.items.is_empty() {
            self.items[0] = last;
            self.pos[last] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.items[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.items[parent];
            if !Self::better(v, p, act) {
                break;
            }
            self.items[i] = p;
            self.pos[p] = i;
            i = parent;
        }
        self.items[i] = v;
        self.pos[v] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.items[i];
        let n = self.items.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && Self::better(self.items[r], self.items[l], act) { r } else { l };
            if !Self::better(self.items[c], v, act) {
                break;
            }
            self.items[i] = self.items[c];
            self.pos[self.items[i]] = i;
            i = c;
        }
        self.items[i] = v;
        self.pos[v] = i;
    }
}
