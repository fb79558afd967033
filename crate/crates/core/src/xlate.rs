//! Compiles a 2-tag system into a reverse tag system that simulates it.
//!
//! Each source production `p = z_l ... z_2 z_1` (written back to front)
//! contributes subscripted symbols `[z_j]_j` to the target alphabet. The
//! target appends a production one symbol at a time, high subscript first;
//! when the subscript-1 symbol lands, two symbols fall off the front and one
//! source step is complete. Configurations whose last symbol has subscript 1
//! ("marked rows") therefore project, subscript-erased, onto the source
//! system's words.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::revtag::ReverseTagSystem;
use crate::tag::{Alphabet, RunOptions, RunStatus, Symbol, TagSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum XlateError {
    #[error("symbol `{0}` has an empty production; the translation needs nonempty productions")]
    EmptyProduction(String),
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("initial word is empty")]
    EmptyInitialWord,
    #[error("conflicting productions generated for pair ({first}, {last})")]
    ConflictingRule { first: String, last: String },
    #[error("symbol id {0} does not belong to the translated system")]
    ForeignSymbol(u32),
}

/// A target-alphabet symbol: a source symbol plus the subscript that tracks
/// its position (from the right, 1-based) in the production that spawned it.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexedSymbol {
    pub base: Symbol,
    pub subscript: u32,
}

/// A reverse tag system produced by translation, together with the
/// subscript structure needed to project its words back onto the source.
#[derive(Clone, Debug)]
pub struct TranslatedSystem {
    pub reverse: ReverseTagSystem,
    indexed: Vec<IndexedSymbol>,
}

impl TranslatedSystem {
    /// The subscripted reading of a target symbol.
    pub fn indexed(&self, s: Symbol) -> Result<IndexedSymbol, XlateError> {
        self.indexed
            .get((s.index() - 1) as usize)
            .copied()
            .ok_or(XlateError::ForeignSymbol(s.index()))
    }

    pub fn subscript(&self, s: Symbol) -> Result<u32, XlateError> {
        Ok(self.indexed(s)?.subscript)
    }

    /// Erases subscripts, mapping a target word onto a source word.
    pub fn project(&self, word: &[Symbol]) -> Result<Vec<Symbol>, XlateError> {
        word.iter().map(|&s| Ok(self.indexed(s)?.base)).collect()
    }

    /// A configuration is marked when its last symbol has subscript 1; the
    /// initial word is marked by construction.
    pub fn is_marked(&self, word: &[Symbol]) -> Result<bool, XlateError> {
        match word.last() {
            Some(&s) => Ok(self.subscript(s)? == 1),
            None => Ok(false),
        }
    }
}

/// Translates a 2-tag system (with nonempty productions) into a reverse tag
/// system that simulates it.
pub fn to_reverse_tag(sys: &TagSystem) -> Result<TranslatedSystem, XlateError> {
    if sys.alphabet.is_empty() {
        return Err(XlateError::EmptyAlphabet);
    }
    if sys.initial.is_empty() {
        return Err(XlateError::EmptyInitialWord);
    }
    let mut productions: Vec<&[Symbol]> = Vec::with_capacity(sys.alphabet.len());
    for s in sys.alphabet.symbols() {
        let p = sys.production(s).expect("alphabet symbol");
        if p.is_empty() {
            return Err(XlateError::EmptyProduction(sys.alphabet.name(s).to_string()));
        }
        productions.push(p);
    }

    // Collect the needed indexed symbols: [z_j]_j for every production
    // position, plus [q]_1 for every initial-word symbol.
    let mut needed: Vec<IndexedSymbol> = Vec::new();
    let push_unique = |sym: IndexedSymbol, needed: &mut Vec<IndexedSymbol>| {
        if !needed.contains(&sym) {
            needed.push(sym);
        }
    };
    for p in &productions {
        let l = p.len();
        for j in 1..=l {
            push_unique(IndexedSymbol { base: p[l - j], subscript: j as u32 }, &mut needed);
        }
    }
    for &q in &sys.initial {
        push_unique(IndexedSymbol { base: q, subscript: 1 }, &mut needed);
    }
    needed.sort_by_key(|s| (s.subscript, s.base));

    let mut alphabet = Alphabet::new();
    let mut ids: HashMap<IndexedSymbol, Symbol> = HashMap::new();
    for &sym in &needed {
        let name = format!("{}_{}", sys.alphabet.name(sym.base), sym.subscript);
        ids.insert(sym, alphabet.intern(&name));
    }

    let deletion: Vec<u32> =
        needed.iter().map(|s| if s.subscript == 1 { 2 } else { 0 }).collect();
    let initial: Vec<Symbol> = sys
        .initial
        .iter()
        .map(|&q| ids[&IndexedSymbol { base: q, subscript: 1 }])
        .collect();
    let mut reverse = ReverseTagSystem::new(alphabet, deletion, initial)
        .expect("initial symbols were interned above");

    // delta([s_i]_*, [*]_1)       = [z_l]_l   (start appending Delta(s_i))
    // delta([s_i]_*, [s_{i,j}]_j) = [z_{j-1}]_{j-1}   for 2 <= j <= l
    let mut specify = |first: Symbol, last: Symbol, out: Symbol| {
        match reverse.specify(first, last, out) {
            Some(prev) if prev != out => Err(XlateError::ConflictingRule {
                first: reverse.alphabet.name(first).to_string(),
                last: reverse.alphabet.name(last).to_string(),
            }),
            _ => Ok(()),
        }
    };
    for (i, p) in productions.iter().enumerate() {
        let base = Symbol::from_index(i as u32 + 1);
        let l = p.len();
        let firsts: Vec<Symbol> =
            needed.iter().filter(|s| s.base == base).map(|s| ids[s]).collect();
        let opener = ids[&IndexedSymbol { base: p[0], subscript: l as u32 }];
        for &f in &firsts {
            for last in needed.iter().filter(|s| s.subscript == 1) {
                specify(f, ids[last], opener)?;
            }
            for j in 2..=l {
                let last = ids[&IndexedSymbol { base: p[l - j], subscript: j as u32 }];
                let out = ids[&IndexedSymbol { base: p[l - (j - 1)], subscript: j as u32 - 1 }];
                specify(f, last, out)?;
            }
        }
    }

    let bound: usize = productions.iter().map(|p| p.len()).sum::<usize>() + sys.initial.len();
    debug_assert!(needed.len() <= bound, "alphabet bound from the construction");

    Ok(TranslatedSystem { reverse, indexed: needed })
}

/// One aligned pair in a simulation check: the k-th marked row of the
/// translated run against the k-th word of the source run.
#[derive(Clone, Debug)]
pub struct AlignedRow {
    pub tag_step: usize,
    pub rev_step: usize,
    pub tag_word: String,
    pub projected: String,
    pub matched: bool,
}

/// Instance-level evidence that a translation simulates its source: runs
/// both machines side by side and aligns marked rows with source words.
#[derive(Clone, Debug)]
pub struct Theorem1Report {
    pub rows: Vec<AlignedRow>,
    pub tag_status: RunStatus,
    pub rev_status: RunStatus,
    pub alphabet_bound_ok: bool,
    pub failures: Vec<String>,
}

impl Theorem1Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{} step {:>4} | rev step {:>5} | {} ~ {}",
                if row.matched { "ok  " } else { "FAIL" },
                row.tag_step,
                row.rev_step,
                row.tag_word,
                row.projected,
            );
        }
        let _ = writeln!(out, "tag status: {}", self.tag_status);
        let _ = writeln!(out, "reverse status: {}", self.rev_status);
        for f in &self.failures {
            let _ = writeln!(out, "failure: {f}");
        }
        let _ = writeln!(out, "result: {}", if self.passed() { "pass" } else { "fail" });
        out
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("tag_step\trev_step\ttag_word\tprojected\tmatch\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                row.tag_step, row.rev_step, row.tag_word, row.projected, row.matched
            );
        }
        out
    }
}

/// Runs a tag system and its translation side by side for up to `steps`
/// source steps and checks that every marked row projects onto the
/// corresponding source word, with exactly one target step per appended
/// production symbol.
pub fn check_theorem1(sys: &TagSystem, steps: usize) -> Result<Theorem1Report, XlateError> {
    let trans = to_reverse_tag(sys)?;
    let bound: usize = sys
        .alphabet
        .symbols()
        .map(|s| sys.production(s).expect("alphabet symbol").len())
        .sum::<usize>()
        + sys.initial.len();
    let alphabet_bound_ok = trans.reverse.alphabet.len() <= bound;

    let mut failures = Vec::new();
    if !alphabet_bound_ok {
        failures.push(format!(
            "translated alphabet has {} symbols, above the bound {}",
            trans.reverse.alphabet.len(),
            bound
        ));
    }

    let tag_trace = sys.run(steps).expect("system symbols are internally consistent");
    // One target step per appended symbol: budget exactly the production
    // lengths of the source words that were stepped from.
    let rev_budget: usize = (0..tag_trace.len().saturating_sub(1))
        .map(|i| sys.production(tag_trace.word(i)[0]).expect("alphabet symbol").len())
        .sum();
    let rev_trace = trans
        .reverse
        .run_from(
            &trans.reverse.initial,
            rev_budget,
            RunOptions { detect_cycles: false, ..RunOptions::default() },
        )
        .expect("translated initial word is well formed");

    if matches!(rev_trace.status(), RunStatus::UnspecifiedAt(_)) {
        failures.push(format!("translated run hit an unspecified production: {}", rev_trace.status()));
    }
    if matches!(rev_trace.status(), RunStatus::HaltedAt(_)) && rev_trace.len() <= rev_budget {
        failures.push(format!(
            "translated run stopped early at {} with budget {}",
            rev_trace.status(),
            rev_budget
        ));
    }

    let mut rows = Vec::new();
    let mut marked_steps = Vec::new();
    for i in 0..rev_trace.len() {
        if trans.is_marked(rev_trace.word(i))? {
            marked_steps.push(i);
        }
    }
    if marked_steps.len() != tag_trace.len() {
        failures.push(format!(
            "expected {} marked rows, found {}",
            tag_trace.len(),
            marked_steps.len()
        ));
    }
    for (k, &rev_step) in marked_steps.iter().enumerate().take(tag_trace.len()) {
        let projected = trans.project(rev_trace.word(rev_step))?;
        let tag_word = tag_trace.word(k);
        let matched = projected == tag_word;
        if !matched && failures.is_empty() {
            failures.push(format!("first mismatch at source step {k} (target step {rev_step})"));
        } else if !matched {
            failures.push(format!("mismatch at source step {k}"));
        }
        rows.push(AlignedRow {
            tag_step: k,
            rev_step,
            tag_word: sys.alphabet.render(tag_word),
            projected: sys.alphabet.render(&projected),
            matched,
        });
        if k > 0 {
            let expected_gap =
                sys.production(tag_trace.word(k - 1)[0]).expect("alphabet symbol").len();
            let gap = rev_step - marked_steps[k - 1];
            if gap != expected_gap {
                failures.push(format!(
                    "marked rows {} and {} are {} target steps apart, expected {}",
                    k - 1,
                    k,
                    gap,
                    expected_gap
                ));
            }
        }
    }

    Ok(Theorem1Report {
        rows,
        tag_status: tag_trace.status().clone(),
        rev_status: rev_trace.status().clone(),
        alphabet_bound_ok,
        failures,
    })
}
