//! Shared helpers for the integration suites: a deliberately naive
//! top-down memoized evaluator (an oracle independent of the bottom-up
//! engine) and exact integer closed forms.

use std::collections::HashMap;

use nestrec::recdsl::{Expression, RecurrenceDef};
use nestrec::seq::SeqValue;

/// How a naive evaluation ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NaiveOutcome {
    Computed,
    Witness { at: u64, offending_arg: i64 },
    Overflow { at: u64 },
}

/// Top-down memoized evaluation of `def` for every index in
/// `start..=target`. Returns the values (indexed from `start`) and the
/// outcome. Recursion depth is proportional to `target`; call from a
/// generously sized stack.
pub fn naive_run(def: &RecurrenceDef, target: u64) -> (Vec<(u64, SeqValue)>, NaiveOutcome) {
    let mut naive = Naive { def, memo: HashMap::new() };
    let mut values = Vec::new();
    for n in def.start..=target {
        match naive.value(n) {
            Ok(v) => values.push((n, v)),
            Err(Stop::Witness { offending_arg }) => {
                return (values, NaiveOutcome::Witness { at: n, offending_arg });
            }
            Err(Stop::Overflow) => return (values, NaiveOutcome::Overflow { at: n }),
        }
    }
    (values, NaiveOutcome::Computed)
}

enum Stop {
    Witness { offending_arg: i64 },
    Overflow,
}

struct Naive<'a> {
    def: &'a RecurrenceDef,
    memo: HashMap<u64, SeqValue>,
}

impl Naive<'_> {
    fn value(&mut self, n: u64) -> Result<SeqValue, Stop> {
        if let Some(v) = self.def.initial.get(n) {
            return Ok(v);
        }
        if let Some(&v) = self.memo.get(&n) {
            return Ok(v);
        }
        let body = &self.def.case_for(n).body;
        let v = self.eval(body, n)?;
        self.memo.insert(n, v);
        Ok(v)
    }

    fn eval(&mut self, e: &Expression, n: u64) -> Result<SeqValue, Stop> {
        match e {
            Expression::Const(c) => Ok(*c),
            Expression::N => i64::try_from(n).map_err(|_| Stop::Overflow),
            Expression::Add(l, r) => {
                let a = self.eval(l, n)?;
                let b = self.eval(r, n)?;
                a.checked_add(b).ok_or(Stop::Overflow)
            }
            Expression::Sub(l, r) => {
                let a = self.eval(l, n)?;
                let b = self.eval(r, n)?;
                a.checked_sub(b).ok_or(Stop::Overflow)
            }
            Expression::Scale(k, inner) => {
                let v = self.eval(inner, n)?;
                k.checked_mul(v).ok_or(Stop::Overflow)
            }
            Expression::SelfApp(arg) => {
                let a = self.eval(arg, n)?;
                if a < self.def.start as i64 || a as u64 >= n {
                    return Err(Stop::Witness { offending_arg: a });
                }
                self.value(a as u64)
            }
        }
    }
}

/// Exact integer square root.
pub fn isqrt(x: u128) -> u128 {
    if x < 2 {
        return x;
    }
    let mut r = (x as f64).sqrt() as u128;
    while r.saturating_mul(r) > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// Closed form for the nested floor recurrence with G(0) = 0:
/// floor((n+1)/phi), computed exactly as (isqrt(5 (n+1)^2) - (n+1)) / 2.
pub fn g_closed(n: u64) -> SeqValue {
    let m = (n + 1) as u128;
    ((isqrt(5 * m * m) - m) / 2) as SeqValue
}

/// Closed form for the "each value v appears v times" sequence:
/// floor((1 + sqrt(8 n)) / 2), computed exactly.
pub fn golomb_closed(n: u64) -> SeqValue {
    ((1 + isqrt(8 * n as u128)) / 2) as SeqValue
}

/// Spawns `f` on a thread with a large stack; the naive oracle recurses
/// once per index.
pub fn with_big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(f)
        .expect("spawn oracle thread")
        .join()
        .expect("oracle thread must not panic")
}
