//! Instance-level checks of the simulation chain, using the machine
//! simulators and the recurrence tables as mutual oracles.
//!
//! The `B` table of a compiled reverse tag system should replay the
//! machine's run: step `i`'s word is decodable around index `base + 2 i`,
//! and a halting run plants the `-2` signal followed by a self-referential
//! non-calculability witness at the next odd index. The `A` table should
//! reproduce `B` on a stride-4 lattice and share its calculability verdict.
//! These checks verify bounded prefixes and report the verified horizon;
//! any divergence is reported with the first failing step.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::encode::{
    alpha, alpha_decode, compile_a, compile_b, AVariant, AlphaMeaning, EncodeError,
};
use crate::revtag::ReverseTagSystem;
use crate::seq::{CalcOutcome, EngineError, NoncalcWitness, SeqTable, SeqValue};
use crate::tag::{RunOptions, RunStatus, Symbol, TagSystem};
use crate::xlate::{to_reverse_tag, XlateError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("index {index} is not computed")]
    NotComputed { index: u64 },
    #[error("index {index}: value {found} is not a word-length code")]
    BadLength { index: u64, found: SeqValue },
    #[error("index {index}: value {found} does not encode a symbol")]
    NotASymbol { index: u64, found: SeqValue },
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Xlate(#[from] XlateError),
}

/// What a length-lattice slot says: a word, or the halting signal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecodedStep {
    Word(Vec<Symbol>),
    /// `-2` exactly in the paper regime; anything below is flagged by the
    /// callers as outside the d in {0, 2} regime.
    Halt { value: SeqValue },
}

/// Reads the machine word recorded around even index `n` of a `B` table:
/// `B(n) = 2k - 2` gives the length, the `k` odd slots below `n` hold the
/// symbol codes. `B(n) <= -2` is the halting signal.
pub fn decode_b_step(table: &SeqTable, n: u64, t: u32) -> Result<DecodedStep, VerifyError> {
    let v = table.lookup(n).ok_or(VerifyError::NotComputed { index: n })?;
    if v <= -2 {
        return Ok(DecodedStep::Halt { value: v });
    }
    if v < 0 || v % 2 != 0 {
        return Err(VerifyError::BadLength { index: n, found: v });
    }
    let k = (v as u64 + 2) / 2;
    if 2 * k > n {
        return Err(VerifyError::BadLength { index: n, found: v });
    }
    let mut word = Vec::with_capacity(k as usize);
    for u in 0..k {
        let idx = n - 2 * k + 1 + 2 * u;
        let code = table.lookup(idx).ok_or(VerifyError::NotComputed { index: idx })?;
        match alpha_decode(code, t) {
            Some(AlphaMeaning::Sym(i)) => word.push(Symbol::from_index(i)),
            _ => return Err(VerifyError::NotASymbol { index: idx, found: code }),
        }
    }
    Ok(DecodedStep::Word(word))
}

/// One checked simulation step.
#[derive(Clone, Debug)]
pub struct StepRecord {
    pub step: usize,
    pub index: u64,
    pub decoded: String,
    pub oracle: String,
    pub matched: bool,
}

/// Checks around a halting signal.
#[derive(Clone, Debug)]
pub struct HaltCheck {
    pub signal_index: u64,
    pub signal_value: SeqValue,
    /// Signal below -2: only reachable outside the d in {0, 2} regime.
    pub outside_regime: bool,
    /// The odd slot just below the signal holds the final appended symbol.
    pub final_symbol_ok: bool,
    /// The table stops with a witness at the next odd index whose offending
    /// argument is that same self-referential index.
    pub witness_ok: bool,
    pub witness: Option<NoncalcWitness>,
}

/// Alignment of a `B` table against its machine: step `i` of the run is
/// checked at `base + stride * i`.
#[derive(Clone, Debug)]
pub struct SimAlignment {
    pub stride: u64,
    pub base: u64,
    pub records: Vec<StepRecord>,
    pub halt: Option<HaltCheck>,
    pub oracle_status: RunStatus,
    pub failures: Vec<String>,
}

impl SimAlignment {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn checked_steps(&self) -> usize {
        self.records.len()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "simulation lattice: step i at {} + {}*i", self.base, self.stride);
        for r in &self.records {
            let _ = writeln!(
                out,
                "{} step {:>5} | n={} | {} ~ {}",
                if r.matched { "ok  " } else { "FAIL" },
                r.step,
                r.index,
                r.decoded,
                r.oracle
            );
        }
        let _ = writeln!(out, "machine status: {}", self.oracle_status);
        if let Some(h) = &self.halt {
            let _ = writeln!(
                out,
                "halt signal at {}: value {}{}",
                h.signal_index,
                h.signal_value,
                if h.outside_regime { " (outside the d in {0,2} regime)" } else { "" }
            );
            let _ = writeln!(out, "final appended symbol recorded: {}", h.final_symbol_ok);
            match &h.witness {
                Some(w) => {
                    let _ = writeln!(
                        out,
                        "witness at {} with argument {} ({}): {}",
                        w.at,
                        w.offending_arg,
                        w.path,
                        if h.witness_ok { "self-referential as required" } else { "WRONG SHAPE" }
                    );
                }
                None => {
                    let _ = writeln!(out, "witness: missing");
                }
            }
        }
        for f in &self.failures {
            let _ = writeln!(out, "failure: {f}");
        }
        let _ = writeln!(out, "result: {}", if self.passed() { "pass" } else { "fail" });
        out
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("step\tindex\tdecoded\toracle\tmatch\n");
        for r in &self.records {
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", r.step, r.index, r.decoded, r.oracle, r.matched);
        }
        out
    }
}

/// Runs the machine alongside its compiled `B` table and checks that the
/// table replays every step, including the halting signal and witness when
/// the run halts within `steps`.
pub fn check_theorem2(r: &ReverseTagSystem, steps: usize) -> Result<SimAlignment, VerifyError> {
    let cb = compile_b(r)?;
    let oracle = r
        .run_from(&r.initial, steps, RunOptions { detect_cycles: false, ..RunOptions::default() })
        .expect("the system's own initial word is well formed");
    let avail = oracle.len() - 1;
    let halted_at = match oracle.status() {
        RunStatus::HaltedAt(h) => Some(*h),
        _ => None,
    };

    let base = cb.sim_base();
    let target = base + 2 * avail as u64 + if halted_at.is_some() { 3 } else { 0 };
    let mut table = SeqTable::new(cb.def.clone());
    let outcome = table.extend(target)?;

    let mut failures = Vec::new();
    if let RunStatus::UnspecifiedAt(i) = oracle.status() {
        failures.push(format!("machine needed an unspecified production at step {i}"));
    }
    if halted_at.is_none() {
        if let CalcOutcome::Noncalculable(w) = &outcome {
            failures.push(format!(
                "table stopped being calculable at {} (argument {}) although the machine did not halt",
                w.at, w.offending_arg
            ));
        }
    }

    let mut records = Vec::new();
    for i in 0..=avail {
        let index = base + 2 * i as u64;
        let oracle_word = r.alphabet.render(oracle.word(i));
        match decode_b_step(&table, index, cb.t) {
            Ok(DecodedStep::Word(w)) => {
                let decoded = r.alphabet.render(&w);
                let matched = w == oracle.word(i);
                if !matched {
                    failures.push(format!(
                        "first divergent step {i}: decoded `{decoded}`, machine `{oracle_word}`"
                    ));
                }
                records.push(StepRecord { step: i, index, decoded, oracle: oracle_word, matched });
                if !records.last().expect("just pushed").matched {
                    break;
                }
            }
            Ok(DecodedStep::Halt { value }) => {
                failures.push(format!("unexpected halt signal {value} at step {i}"));
                records.push(StepRecord {
                    step: i,
                    index,
                    decoded: format!("halt({value})"),
                    oracle: oracle_word,
                    matched: false,
                });
                break;
            }
            Err(e) => {
                failures.push(format!("step {i}: {e}"));
                break;
            }
        }
    }

    let halt = match halted_at {
        Some(h) => {
            let signal_index = base + 2 * (h as u64 + 1);
            match table.lookup(signal_index) {
                Some(v) if v <= -2 => {
                    let last_word = oracle.word(h);
                    let y = r
                        .production(last_word[0], *last_word.last().expect("nonempty"))
                        .expect("a halt means the production existed");
                    let expected = alpha(y.index())?.value;
                    let final_symbol_ok = table.lookup(signal_index - 1) == Some(expected);
                    let witness = table.witness().cloned();
                    let witness_ok = witness.as_ref().is_some_and(|w| {
                        w.at == signal_index + 1 && w.offending_arg == (signal_index + 1) as i64
                    });
                    if !final_symbol_ok {
                        failures.push(format!(
                            "odd slot {} does not record the final appended symbol",
                            signal_index - 1
                        ));
                    }
                    if !witness_ok {
                        failures
                            .push("halting signal is not followed by the self-referential witness".into());
                    }
                    Some(HaltCheck {
                        signal_index,
                        signal_value: v,
                        outside_regime: v < -2,
                        final_symbol_ok,
                        witness_ok,
                        witness,
                    })
                }
                Some(v) => {
                    failures.push(format!("expected a halt signal at {signal_index}, found {v}"));
                    None
                }
                None => {
                    failures.push(format!(
                        "expected a halt signal at {signal_index}, but it was never computed"
                    ));
                    None
                }
            }
        }
        None => None,
    };

    Ok(SimAlignment {
        stride: 2,
        base,
        records,
        halt,
        oracle_status: oracle.status().clone(),
        failures,
    })
}

/// One checked stride-4 block: `A(c0+4n+j)` against the `B` lattice.
#[derive(Clone, Debug)]
pub struct IdentityRow {
    pub n: u64,
    pub a: [SeqValue; 4],
    pub b_odd: SeqValue,
    pub b_even: SeqValue,
    pub ok: bool,
}

/// Report for the `A`-reproduces-`B` check.
#[derive(Clone, Debug)]
pub struct Theorem3Report {
    pub rows: Vec<IdentityRow>,
    /// Number of fully checked lattice blocks.
    pub identities_checked: u64,
    /// Computed multiples of 4 verified to be zero.
    pub zeros_checked: u64,
    pub a_outcome: CalcOutcome,
    pub b_outcome: CalcOutcome,
    pub failures: Vec<String>,
}

impl Theorem3Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "stride-4 identity blocks checked: {}", self.identities_checked);
        let _ = writeln!(out, "computed multiples of 4 verified zero: {}", self.zeros_checked);
        let describe = |o: &CalcOutcome| match o {
            CalcOutcome::Computed { through } => format!("computed through {through}"),
            CalcOutcome::Noncalculable(w) => {
                format!("noncalculable at {} (argument {})", w.at, w.offending_arg)
            }
        };
        let _ = writeln!(out, "A: {}", describe(&self.a_outcome));
        let _ = writeln!(out, "B: {}", describe(&self.b_outcome));
        for f in &self.failures {
            let _ = writeln!(out, "failure: {f}");
        }
        let _ = writeln!(out, "result: {}", if self.passed() { "pass" } else { "fail" });
        out
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("n\ta0\ta1\ta2\ta3\tb_odd\tb_even\tmatch\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.n, r.a[0], r.a[1], r.a[2], r.a[3], r.b_odd, r.b_even, r.ok
            );
        }
        out
    }
}

/// Extends both compiled tables and checks that `A` reproduces `B` on the
/// stride-4 lattice (`A(c0+4n) = A(c0+4n+2) = 0`, `A(c0+4n+1) = B(c0+2n+1)`,
/// `A(c0+4n+3) = 2 B(c0+2n+2)`), that every computed `A(4k)` is zero, and
/// that the two tables agree on calculability.
pub fn check_theorem3(
    r: &ReverseTagSystem,
    steps: usize,
    variant: AVariant,
) -> Result<Theorem3Report, VerifyError> {
    let cb = compile_b(r)?;
    let ca = compile_a(r, variant)?;
    let steps = steps as u64;
    let (c0, m) = (ca.c0, ca.m);

    let mut bt = SeqTable::new(cb.def.clone());
    bt.extend(c0 + 2 * (m + steps) + 1)?;
    let mut at = SeqTable::new(ca.def.clone());
    at.extend(c0 + 4 * (m + steps) - 1)?;

    let mut failures = Vec::new();
    let mut rows = Vec::new();
    let mut identities_checked = 0;
    for n in 0..=(m + steps).saturating_sub(1) {
        let slots = [
            at.lookup(c0 + 4 * n),
            at.lookup(c0 + 4 * n + 1),
            at.lookup(c0 + 4 * n + 2),
            at.lookup(c0 + 4 * n + 3),
            bt.lookup(c0 + 2 * n + 1),
            bt.lookup(c0 + 2 * n + 2),
        ];
        let [Some(a0), Some(a1), Some(a2), Some(a3), Some(b_odd), Some(b_even)] = slots else {
            break;
        };
        let ok = a0 == 0 && a2 == 0 && a1 == b_odd && a3 == 2 * b_even;
        if !ok {
            failures.push(format!(
                "identity block n={n} fails: A=({a0},{a1},{a2},{a3}), B odd={b_odd}, B even={b_even}"
            ));
        }
        rows.push(IdentityRow { n, a: [a0, a1, a2, a3], b_odd, b_even, ok });
        identities_checked += 1;
    }

    let mut zeros_checked = 0;
    for (idx, v) in at.computed() {
        if idx % 4 == 0 {
            if v != 0 {
                failures.push(format!("computed A({idx}) = {v}, expected 0"));
            }
            zeros_checked += 1;
        }
    }

    let a_outcome = at.outcome();
    let b_outcome = bt.outcome();
    if a_outcome.is_computed() != b_outcome.is_computed() {
        failures.push(format!(
            "calculability verdicts disagree: A {}, B {}",
            if a_outcome.is_computed() { "computed" } else { "noncalculable" },
            if b_outcome.is_computed() { "computed" } else { "noncalculable" },
        ));
    }

    Ok(Theorem3Report { rows, identities_checked, zeros_checked, a_outcome, b_outcome, failures })
}

/// What the translated system did after the source system halted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AfterHalt {
    /// It kept rolling for `extra_steps` target steps and then halted
    /// itself, driving the recurrence into noncalculability.
    ReverseHalted { extra_steps: usize, witness_ok: bool },
    /// It settled into a cycle; the recurrence stays calculable.
    ReverseCycles { entry_step: usize, repeat_step: usize },
    /// Undecided within the step budget.
    Budget,
}

/// Report for the end-to-end pipeline: tag system -> reverse tag system ->
/// `A` initial conditions, with tag words decoded back out of the `A` table.
#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub rows: Vec<StepRecord>,
    pub tag_status: RunStatus,
    pub after_halt: Option<AfterHalt>,
    pub failures: Vec<String>,
}

impl PipelineReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{} tag step {:>4} | lattice n={} | {} ~ {}",
                if r.matched { "ok  " } else { "FAIL" },
                r.step,
                r.index,
                r.decoded,
                r.oracle
            );
        }
        let _ = writeln!(out, "tag status: {}", self.tag_status);
        match &self.after_halt {
            Some(AfterHalt::ReverseHalted { extra_steps, witness_ok }) => {
                let _ = writeln!(
                    out,
                    "after the halt the reverse system rolled {extra_steps} more steps, then halted; \
                     recurrence noncalculable with the expected witness: {witness_ok}"
                );
            }
            Some(AfterHalt::ReverseCycles { entry_step, repeat_step }) => {
                let _ = writeln!(
                    out,
                    "after the halt the reverse system keeps rolling: step {repeat_step} repeats step {entry_step}"
                );
            }
            Some(AfterHalt::Budget) => {
                let _ = writeln!(out, "after the halt the reverse system was still undecided within budget");
            }
            None => {}
        }
        for f in &self.failures {
            let _ = writeln!(out, "failure: {f}");
        }
        let _ = writeln!(out, "result: {}", if self.passed() { "pass" } else { "fail" });
        out
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("tag_step\tlattice_n\tdecoded\toracle\tmatch\n");
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", r.step, r.index, r.decoded, r.oracle, r.matched);
        }
        out
    }
}

/// Reads the reverse-tag word for target step `i` out of an `A` table,
/// using the stride-4 identities: lengths at `A(c0 + 4(m+i) - 1)` (doubled),
/// symbols on the `A(c0 + 4u + 1)` lattice.
fn decode_a_step(
    table: &SeqTable,
    c0: u64,
    m: u64,
    i: u64,
    t: u32,
) -> Result<DecodedStep, VerifyError> {
    let len_idx = c0 + 4 * (m + i) - 1;
    let raw = table.lookup(len_idx).ok_or(VerifyError::NotComputed { index: len_idx })?;
    if raw <= -4 {
        return Ok(DecodedStep::Halt { value: raw / 2 });
    }
    if raw < 0 || raw % 4 != 0 {
        return Err(VerifyError::BadLength { index: len_idx, found: raw });
    }
    let k = raw as u64 / 4 + 1;
    if k > m + i {
        return Err(VerifyError::BadLength { index: len_idx, found: raw });
    }
    let mut word = Vec::with_capacity(k as usize);
    for u in (m + i - k)..(m + i) {
        let idx = c0 + 4 * u + 1;
        let code = table.lookup(idx).ok_or(VerifyError::NotComputed { index: idx })?;
        match alpha_decode(code, t) {
            Some(AlphaMeaning::Sym(s)) => word.push(Symbol::from_index(s)),
            _ => return Err(VerifyError::NotASymbol { index: idx, found: code }),
        }
    }
    Ok(DecodedStep::Word(word))
}

/// Drives the whole pipeline: translates the tag system, compiles the
/// translation into `A` initial conditions, decodes the target run back out
/// of the `A` table, and aligns its marked rows with the source run. When
/// the source halts, reports what the translated system (which may outlive
/// it) went on to do.
pub fn simulate_via_a(sys: &TagSystem, steps: usize) -> Result<PipelineReport, VerifyError> {
    let trans = to_reverse_tag(sys)?;
    let r = &trans.reverse;
    let ca = compile_a(r, AVariant::Canonical)?;
    let (c0, m, t) = (ca.c0, ca.m, ca.t);

    let tag_trace = sys.run(steps).expect("system is internally consistent");
    let tag_halted = matches!(tag_trace.status(), RunStatus::HaltedAt(_));
    let aligned_r_steps: u64 = (0..tag_trace.len().saturating_sub(1))
        .map(|i| sys.production(tag_trace.word(i)[0]).expect("alphabet symbol").len() as u64)
        .sum();
    let extra_budget = steps as u64;
    let max_i = aligned_r_steps + if tag_halted { extra_budget } else { 0 };

    let mut table = SeqTable::new(ca.def.clone());
    table.extend(c0 + 4 * (m + max_i) + 3)?;

    let mut failures = Vec::new();
    let mut rows = Vec::new();
    let mut marked_seen = 0usize;
    let mut seen_words: HashMap<Vec<Symbol>, usize> = HashMap::new();
    let mut after_halt = if tag_halted { Some(AfterHalt::Budget) } else { None };

    'steps: for i in 0..=max_i {
        match decode_a_step(&table, c0, m, i, t) {
            Ok(DecodedStep::Word(word)) => {
                if let Some(&entry) = seen_words.get(&word) {
                    if marked_seen >= tag_trace.len() {
                        after_halt = Some(AfterHalt::ReverseCycles {
                            entry_step: entry,
                            repeat_step: i as usize,
                        });
                        break 'steps;
                    }
                } else {
                    seen_words.insert(word.clone(), i as usize);
                }
                if trans.is_marked(&word)? && marked_seen < tag_trace.len() {
                    let k = marked_seen;
                    let projected = trans.project(&word)?;
                    let oracle_word = tag_trace.word(k);
                    let matched = projected == oracle_word;
                    if !matched {
                        failures.push(format!("first mismatch at tag step {k} (target step {i})"));
                    }
                    rows.push(StepRecord {
                        step: k,
                        index: m + i,
                        decoded: sys.alphabet.render(&projected),
                        oracle: sys.alphabet.render(oracle_word),
                        matched,
                    });
                    marked_seen += 1;
                    if !matched {
                        break 'steps;
                    }
                }
            }
            Ok(DecodedStep::Halt { .. }) => {
                if marked_seen < tag_trace.len() {
                    failures.push(format!(
                        "recurrence reports a halt at target step {i} before the source run finished"
                    ));
                } else {
                    let witness_ok = table
                        .witness()
                        .is_some_and(|w| w.at == c0 + 4 * (m + i) + 1 && w.offending_arg == -4);
                    after_halt = Some(AfterHalt::ReverseHalted {
                        extra_steps: (i.saturating_sub(1)).saturating_sub(aligned_r_steps) as usize,
                        witness_ok,
                    });
                    if !witness_ok {
                        failures.push("halting pipeline did not leave the expected witness".into());
                    }
                }
                break 'steps;
            }
            Err(e) => {
                if marked_seen < tag_trace.len() {
                    failures.push(format!("target step {i}: {e}"));
                }
                break 'steps;
            }
        }
    }

    if marked_seen < tag_trace.len() {
        failures.push(format!(
            "only {} of {} source words were recovered from the table",
            marked_seen,
            tag_trace.len()
        ));
    }

    Ok(PipelineReport { rows, tag_status: tag_trace.status().clone(), after_halt, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn decode_recovers_initial_word() {
        let cb = compile_b(&fixtures::example2()).unwrap();
        let table = SeqTable::new(cb.def.clone());
        match decode_b_step(&table, 210, cb.t).unwrap() {
            DecodedStep::Word(w) => {
                assert_eq!(cb.system.alphabet.render(&w).replace(' ', ""), "baaab");
            }
            other => panic!("expected a word, got {other:?}"),
        }
    }

    #[test]
    fn decode_reads_one_step_past_the_initial_word() {
        let cb = compile_b(&fixtures::example2()).unwrap();
        let mut table = SeqTable::new(cb.def.clone());
        table.extend(212).unwrap();
        match decode_b_step(&table, 212, cb.t).unwrap() {
            DecodedStep::Word(w) => {
                assert_eq!(cb.system.alphabet.render(&w).replace(' ', ""), "baaaba");
            }
            other => panic!("expected a word, got {other:?}"),
        }
    }

    #[test]
    fn theorem2_holds_on_the_periodic_example() {
        let report = check_theorem2(&fixtures::example2(), 100).unwrap();
        assert!(report.passed(), "{}", report.to_text());
        assert_eq!(report.checked_steps(), 101);
        assert!(report.halt.is_none());
    }

    #[test]
    fn theorem2_holds_on_translated_systems() {
        for sys in [fixtures::example1_left(), fixtures::example1_right()] {
            let trans = to_reverse_tag(&sys).unwrap();
            let report = check_theorem2(&trans.reverse, 100).unwrap();
            assert!(report.passed(), "{}", report.to_text());
        }
    }

    #[test]
    fn halting_run_produces_signal_and_witness() {
        let trans = to_reverse_tag(&fixtures::halting_tag()).unwrap();
        let report = check_theorem2(&trans.reverse, 100).unwrap();
        assert!(report.passed(), "{}", report.to_text());
        let halt = report.halt.expect("this run halts");
        assert_eq!(halt.signal_value, -2);
        assert!(!halt.outside_regime);
        assert!(halt.witness_ok);
        let w = halt.witness.unwrap();
        assert_eq!(w.at, halt.signal_index + 1);
        assert_eq!(w.offending_arg as u64, w.at);
    }

    #[test]
    fn tampering_with_the_oracle_surfaces_as_divergence() {
        // Compile against the real system, then let the machine diverge by
        // flipping one production: the first step that uses it must show up
        // as a mismatch against the decoded table.
        let cb = compile_b(&fixtures::example2()).unwrap();
        let mut table = SeqTable::new(cb.def.clone());
        table.extend(cb.sim_base() + 60).unwrap();

        let mut tampered = fixtures::example2();
        let b = tampered.alphabet.get("b").unwrap();
        tampered.specify(b, b, b); // was (b, b) -> a
        let oracle = tampered
            .run_from(&tampered.initial, 30, RunOptions { detect_cycles: false, ..RunOptions::default() })
            .unwrap();

        let mut first_divergence = None;
        for i in 0..oracle.len() {
            match decode_b_step(&table, cb.sim_base() + 2 * i as u64, cb.t).unwrap() {
                DecodedStep::Word(w) => {
                    if w != oracle.word(i) {
                        first_divergence = Some(i);
                        break;
                    }
                }
                DecodedStep::Halt { .. } => break,
            }
        }
        assert!(first_divergence.is_some(), "tampering must surface as a first divergent step");
        assert!(first_divergence.unwrap() > 0, "the initial word still agrees");
    }

    #[test]
    fn word_length_track_follows_the_stride_law() {
        // B(c0 + 2n + 2) = B(c0 + 2n) + 2 (1 - d(y)) for the symbol y
        // appended at that step.
        let r = fixtures::example2();
        let cb = compile_b(&r).unwrap();
        let mut table = SeqTable::new(cb.def.clone());
        table.extend(cb.sim_base() + 80).unwrap();
        let oracle = r
            .run_from(&r.initial, 40, RunOptions { detect_cycles: false, ..RunOptions::default() })
            .unwrap();
        for i in 0..39usize {
            let w = oracle.word(i);
            let y = r.production(w[0], *w.last().unwrap()).unwrap();
            let here = table.lookup(cb.sim_base() + 2 * i as u64).unwrap();
            let next = table.lookup(cb.sim_base() + 2 * i as u64 + 2).unwrap();
            assert_eq!(next, here + 2 * (1 - r.deletion_number(y) as i64));
        }
    }

    #[test]
    fn theorem3_holds_on_the_periodic_example() {
        let report = check_theorem3(&fixtures::example2(), 100, AVariant::Canonical).unwrap();
        assert!(report.passed(), "{}", report.to_text());
        assert!(report.identities_checked >= 100);
        assert!(report.a_outcome.is_computed() && report.b_outcome.is_computed());
        assert!(report.zeros_checked > 0);
    }

    #[test]
    fn theorem3_verdicts_agree_on_the_halting_pipeline() {
        let trans = to_reverse_tag(&fixtures::halting_tag()).unwrap();
        let report = check_theorem3(&trans.reverse, 50, AVariant::Canonical).unwrap();
        assert!(report.passed(), "{}", report.to_text());
        assert!(!report.a_outcome.is_computed());
        assert!(!report.b_outcome.is_computed());
        let w = report.a_outcome.witness().unwrap().clone();
        assert_eq!(w.offending_arg, -4);
    }

    #[test]
    fn pipeline_agrees_on_periodic_example() {
        let report = simulate_via_a(&fixtures::example1_left(), 40).unwrap();
        assert!(report.passed(), "{}", report.to_text());
        assert_eq!(report.rows.len(), 7); // cycle detection bounds the tag trace
        assert!(report.after_halt.is_none());
    }

    #[test]
    fn pipeline_reports_reverse_behaviour_after_source_halt() {
        let report = simulate_via_a(&fixtures::example1_right(), 60).unwrap();
        assert!(report.passed(), "{}", report.to_text());
        assert_eq!(report.tag_status, RunStatus::HaltedAt(11));
        assert_eq!(report.rows.len(), 12);
        match report.after_halt {
            Some(AfterHalt::ReverseHalted { witness_ok, .. }) => assert!(witness_ok),
            other => panic!("translated right example halts after rolling on, got {other:?}"),
        }
    }

    #[test]
    fn pipeline_on_single_rule_systems() {
        // a -> a shrinks the word by one per step and halts; the halt then
        // propagates through the whole chain.
        let sys = TagSystem::parse("tagsystem\nrule a -> a\ninitial a a\n").unwrap();
        let report = simulate_via_a(&sys, 20).unwrap();
        assert!(report.passed(), "{}", report.to_text());
        assert_eq!(report.tag_status, RunStatus::HaltedAt(1));
        assert!(matches!(report.after_halt, Some(AfterHalt::ReverseHalted { witness_ok: true, .. })));

        // a -> a a reproduces the same word forever.
        let sys = TagSystem::parse("tagsystem\nrule a -> a a\ninitial a a\n").unwrap();
        let report = simulate_via_a(&sys, 20).unwrap();
        assert!(report.passed(), "{}", report.to_text());
        assert_eq!(report.tag_status, RunStatus::CycleAt { entry: 0, period: 1 });
    }
}
