//! Memoized bottom-up evaluation of nested recurrence definitions.
//!
//! A [`SeqTable`] computes values in increasing index order. An index is
//! *calculable* when every self-application performed during its evaluation
//! has an argument in `[start, n-1]`; the first violation stops the table
//! with a [`NoncalcWitness`] recording the offending argument and the
//! sub-expression that produced it. Witnesses are an ordinary outcome;
//! arithmetic overflow is a separate hard error, never a wrapped value.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::recdsl::{print_expr, Expression, RecurrenceDef};

/// A sequence value. Values may be negative; indices may not.
pub type SeqValue = i64;

/// A contiguous index range carrying a default value, used for initial
/// condition tables that are exponentially long but polynomially sparse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefaultSpan {
    pub lo: u64,
    pub hi: u64,
    pub value: SeqValue,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InitError {
    #[error("initial condition index {index} lies outside the default range {lo}..{hi}")]
    OutOfSpan { index: u64, lo: u64, hi: u64 },
    #[error("default range {lo}..{hi} is reversed")]
    ReversedSpan { lo: u64, hi: u64 },
}

/// Initial conditions: an optional default span plus exceptional entries.
/// When a span is present, every exception must lie inside it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InitialConditions {
    span: Option<DefaultSpan>,
    exceptions: BTreeMap<u64, SeqValue>,
}

impl InitialConditions {
    pub fn new() -> InitialConditions {
        InitialConditions::default()
    }

    pub fn with_span(lo: u64, hi: u64, value: SeqValue) -> Result<InitialConditions, InitError> {
        if lo > hi {
            return Err(InitError::ReversedSpan { lo, hi });
        }
        Ok(InitialConditions { span: Some(DefaultSpan { lo, hi, value }), exceptions: BTreeMap::new() })
    }

    pub fn from_entries(
        entries: impl IntoIterator<Item = (u64, SeqValue)>,
    ) -> Result<InitialConditions, InitError> {
        let mut ic = InitialConditions::new();
        for (index, value) in entries {
            ic.set(index, value)?;
        }
        Ok(ic)
    }

    /// Sets an entry, returning the previous value at that index if any.
    pub fn set(&mut self, index: u64, value: SeqValue) -> Result<Option<SeqValue>, InitError> {
        if let Some(span) = &self.span {
            if index < span.lo || index > span.hi {
                return Err(InitError::OutOfSpan { index, lo: span.lo, hi: span.hi });
            }
        }
        Ok(self.exceptions.insert(index, value))
    }

    /// The value at `index`, if covered by an exception or the span.
    pub fn get(&self, index: u64) -> Option<SeqValue> {
        if let Some(&v) = self.exceptions.get(&index) {
            return Some(v);
        }
        match &self.span {
            Some(span) if index >= span.lo && index <= span.hi => Some(span.value),
            _ => None,
        }
    }

    /// Largest covered index, if any entry exists.
    pub fn covered_max(&self) -> Option<u64> {
        let span_max = self.span.as_ref().map(|s| s.hi);
        let exc_max = self.exceptions.keys().next_back().copied();
        span_max.max(exc_max)
    }

    pub fn span(&self) -> Option<&DefaultSpan> {
        self.span.as_ref()
    }

    pub fn exceptions(&self) -> impl Iterator<Item = (u64, SeqValue)> + '_ {
        self.exceptions.iter().map(|(&i, &v)| (i, v))
    }

    pub fn is_empty(&self) -> bool {
        self.span.is_none() && self.exceptions.is_empty()
    }
}

/// Evidence that an index is not calculable: the self-application argument
/// that fell outside `[start, at-1]`, and the sub-expression that produced
/// it. Re-evaluating the definition's case at `at` reproduces the witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoncalcWitness {
    pub at: u64,
    pub offending_arg: SeqValue,
    pub path: String,
}

/// How far a table got.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CalcOutcome {
    Computed { through: u64 },
    Noncalculable(NoncalcWitness),
}

impl CalcOutcome {
    pub fn is_computed(&self) -> bool {
        matches!(self, CalcOutcome::Computed { .. })
    }

    pub fn witness(&self) -> Option<&NoncalcWitness> {
        match self {
            CalcOutcome::Computed { .. } => None,
            CalcOutcome::Noncalculable(w) => Some(w),
        }
    }
}

/// Hard evaluation errors, distinct from non-calculability.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("arithmetic overflow while evaluating index {at}")]
    Overflow { at: u64 },
    #[error("table would exceed its cell budget of {limit} cells at index {at}")]
    CellBudget { at: u64, limit: usize },
}

/// Why an expression evaluation stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalStop {
    Witness(NoncalcWitness),
    Overflow,
}

/// A memoized sequence table: sparse initial conditions plus a dense array
/// of computed values starting at [`RecurrenceDef::compute_start`].
///
/// Once `extend` returns, a table is immutable for readers and may be shared
/// across threads; evaluation itself is inherently sequential.
#[derive(Clone, Debug)]
pub struct SeqTable {
    def: RecurrenceDef,
    compute_start: u64,
    computed: Vec<SeqValue>,
    witness: Option<NoncalcWitness>,
    cell_limit: usize,
}

impl SeqTable {
    pub fn new(def: RecurrenceDef) -> SeqTable {
        SeqTable::with_cell_limit(def, usize::MAX)
    }

    /// A table that refuses to grow its dense region beyond `cell_limit`
    /// values.
    pub fn with_cell_limit(def: RecurrenceDef, cell_limit: usize) -> SeqTable {
        let compute_start = def.compute_start();
        SeqTable { def, compute_start, computed: Vec::new(), witness: None, cell_limit }
    }

    pub fn def(&self) -> &RecurrenceDef {
        &self.def
    }

    pub fn compute_start(&self) -> u64 {
        self.compute_start
    }

    /// First index that has not been computed yet.
    pub fn frontier(&self) -> u64 {
        self.compute_start + self.computed.len() as u64
    }

    pub fn witness(&self) -> Option<&NoncalcWitness> {
        self.witness.as_ref()
    }

    /// Current status: the recorded witness, or the last computed index.
    pub fn outcome(&self) -> CalcOutcome {
        match &self.witness {
            Some(w) => CalcOutcome::Noncalculable(w.clone()),
            None => CalcOutcome::Computed { through: self.frontier().saturating_sub(1) },
        }
    }

    /// The value at `n`: an initial condition if covered, else a computed
    /// value if below the frontier, else absent.
    pub fn lookup(&self, n: u64) -> Option<SeqValue> {
        if n >= self.compute_start {
            let idx = (n - self.compute_start) as usize;
            self.computed.get(idx).copied()
        } else {
            self.def.initial.get(n)
        }
    }

    /// Computes indices `frontier..=target` in increasing order, stopping at
    /// the first non-calculability witness. Already-computed values are
    /// never modified; a witness is sticky across calls.
    pub fn extend(&mut self, target: u64) -> Result<CalcOutcome, EngineError> {
        if let Some(w) = &self.witness {
            return Ok(CalcOutcome::Noncalculable(w.clone()));
        }
        while self.frontier() <= target {
            let n = self.frontier();
            let cells = (n - self.compute_start) as usize;
            if cells >= self.cell_limit {
                return Err(EngineError::CellBudget { at: n, limit: self.cell_limit });
            }
            let step = eval_expr(&self.def.case_for(n).body, n, self);
            match step {
                Ok(v) => self.computed.push(v),
                Err(EvalStop::Witness(w)) => {
                    self.witness = Some(w.clone());
                    return Ok(CalcOutcome::Noncalculable(w));
                }
                Err(EvalStop::Overflow) => {
                    return Err(EngineError::Overflow { at: n });
                }
            }
        }
        Ok(CalcOutcome::Computed { through: target })
    }

    /// The computed (dense) region as `(index, value)` pairs.
    pub fn computed(&self) -> impl Iterator<Item = (u64, SeqValue)> + '_ {
        self.computed.iter().enumerate().map(move |(i, &v)| (self.compute_start + i as u64, v))
    }
}

/// Evaluates `expr` at index `n` against a table, innermost-first. Every
/// self-application argument must land in `[start, n-1]` and be present in
/// the table; the first violation yields a witness.
pub fn eval_expr(expr: &Expression, n: u64, table: &SeqTable) -> Result<SeqValue, EvalStop> {
    match expr {
        Expression::Const(c) => Ok(*c),
        Expression::N => i64::try_from(n).map_err(|_| EvalStop::Overflow),
        Expression::Add(l, r) => {
            let a = eval_expr(l, n, table)?;
            let b = eval_expr(r, n, table)?;
            a.checked_add(b).ok_or(EvalStop::Overflow)
        }
        Expression::Sub(l, r) => {
            let a = eval_expr(l, n, table)?;
            let b = eval_expr(r, n, table)?;
            a.checked_sub(b).ok_or(EvalStop::Overflow)
        }
        Expression::Scale(k, inner) => {
            let v = eval_expr(inner, n, table)?;
            k.checked_mul(v).ok_or(EvalStop::Overflow)
        }
        Expression::SelfApp(arg) => {
            let a = eval_expr(arg, n, table)?;
            let start = table.def().start as i64;
            if a < start || a as u64 >= n {
                return Err(EvalStop::Witness(NoncalcWitness {
                    at: n,
                    offending_arg: a,
                    path: print_expr(expr),
                }));
            }
            match table.lookup(a as u64) {
                Some(v) => Ok(v),
                // Reachable only when called above the frontier; an extend
                // never sees this because initial conditions are gap-free.
                None => Err(EvalStop::Witness(NoncalcWitness {
                    at: n,
                    offending_arg: a,
                    path: print_expr(expr),
                })),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recdsl::{builtin, parse_recurrence};

    fn table(name: &str) -> SeqTable {
        SeqTable::new(builtin(name).unwrap())
    }

    #[test]
    fn lookup_serves_initial_conditions() {
        let q = table("Q");
        assert_eq!(q.lookup(1), Some(1));
        assert_eq!(q.lookup(2), Some(1));
        assert_eq!(q.lookup(3), None);
        assert_eq!(q.lookup(0), None);
    }

    #[test]
    fn q_prefix_matches_hand_evaluation() {
        let mut q = table("Q");
        let outcome = q.extend(10).unwrap();
        assert_eq!(outcome, CalcOutcome::Computed { through: 10 });
        let values: Vec<i64> = (1..=10).map(|n| q.lookup(n).unwrap()).collect();
        assert_eq!(values, [1, 1, 2, 3, 3, 4, 5, 5, 6, 6]);
    }

    #[test]
    fn eval_expr_computes_q_at_three() {
        let q = table("Q");
        let body = &q.def().case_for(3).body.clone();
        assert_eq!(eval_expr(body, 3, &q), Ok(2));
    }

    #[test]
    fn g_prefix_matches_hand_evaluation() {
        let mut g = table("G");
        g.extend(4).unwrap();
        let values: Vec<i64> = (0..=4).map(|n| g.lookup(n).unwrap()).collect();
        assert_eq!(values, [0, 1, 1, 2, 3]);
    }

    #[test]
    fn c_prefix_matches_hand_evaluation() {
        let mut c = table("C");
        c.extend(4).unwrap();
        assert_eq!(c.lookup(3), Some(2));
        assert_eq!(c.lookup(4), Some(2));
    }

    #[test]
    fn first_index_without_coverage_is_a_witness() {
        // A(n) = A(n - 1) with no initial conditions: at n = start the
        // argument start - 1 falls below start.
        let def = parse_recurrence("def A(n) = A(n - 1); start 5").unwrap();
        let mut t = SeqTable::new(def);
        match t.extend(10).unwrap() {
            CalcOutcome::Noncalculable(w) => {
                assert_eq!(w.at, 5);
                assert_eq!(w.offending_arg, 4);
                assert_eq!(w.path, "A(n - 1)");
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn witness_is_sticky_and_replayable() {
        let def = parse_recurrence("def A(n) = A(n + 1); start 0").unwrap();
        let mut t = SeqTable::new(def);
        let w = match t.extend(3).unwrap() {
            CalcOutcome::Noncalculable(w) => w,
            other => panic!("expected witness, got {other:?}"),
        };
        assert_eq!(w.at, 0);
        assert_eq!(w.offending_arg, 1);
        // Replay reproduces the same witness.
        let replay = eval_expr(&t.def().case_for(w.at).body.clone(), w.at, &t);
        assert_eq!(replay, Err(EvalStop::Witness(w.clone())));
        // And the table keeps reporting it.
        assert_eq!(t.extend(100).unwrap(), CalcOutcome::Noncalculable(w));
    }

    #[test]
    fn prefix_stability() {
        let mut one = table("Q");
        one.extend(50).unwrap();
        one.extend(200).unwrap();
        let mut two = table("Q");
        two.extend(200).unwrap();
        for n in 1..=200 {
            assert_eq!(one.lookup(n), two.lookup(n));
        }
    }

    #[test]
    fn overflow_is_an_error_not_a_witness() {
        let def = parse_recurrence(&format!(
            "def A(n) = A(n - 1) + {}; start 0; init 0={}",
            i64::MAX,
            i64::MAX - 1,
        ))
        .unwrap();
        let mut t = SeqTable::new(def);
        assert_eq!(t.extend(1), Err(EngineError::Overflow { at: 1 }));
        assert!(t.witness().is_none());
    }

    #[test]
    fn cell_budget_is_enforced() {
        let mut t = SeqTable::with_cell_limit(builtin("Q").unwrap(), 10);
        assert_eq!(t.extend(12).unwrap(), CalcOutcome::Computed { through: 12 });
        assert!(matches!(t.extend(13), Err(EngineError::CellBudget { at: 13, limit: 10 })));
    }

    #[test]
    fn span_lookup_and_exceptions() {
        let mut ic = InitialConditions::with_span(0, 100, 0).unwrap();
        ic.set(18, 1).unwrap();
        assert_eq!(ic.get(18), Some(1));
        assert_eq!(ic.get(17), Some(0));
        assert_eq!(ic.get(101), None);
        assert_eq!(ic.covered_max(), Some(100));
        assert!(ic.set(101, 5).is_err());
        assert!(InitialConditions::with_span(5, 4, 0).is_err());
    }

    #[test]
    fn tables_are_shareable_once_extended() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<SeqTable>();
        let mut q = table("Q");
        q.extend(100).unwrap();
        let q = std::sync::Arc::new(q);
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let q = q.clone();
                std::thread::spawn(move || (1..=100).map(|n| q.lookup(n).unwrap()).sum::<i64>())
            })
            .collect();
        let sums: Vec<i64> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert!(sums.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn extend_below_frontier_is_a_no_op() {
        let mut q = table("Q");
        q.extend(20).unwrap();
        let before: Vec<_> = q.computed().collect();
        assert_eq!(q.extend(5).unwrap(), CalcOutcome::Computed { through: 5 });
        let after: Vec<_> = q.computed().collect();
        assert_eq!(before, after);
    }
}
