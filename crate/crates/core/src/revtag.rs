//! Reverse tag systems: append one symbol chosen by the (first, last) pair,
//! then delete that symbol's deletion number of symbols from the front.
//!
//! Where an ordinary tag system deletes a fixed number of symbols and appends
//! a variable number, a reverse tag system appends exactly one symbol
//! `y = delta(first, last)` and deletes `d(y)` symbols. It halts when `d(y)`
//! exceeds the current word length.

use std::collections::HashMap;

use thiserror::Error;

use crate::tag::{strip_comment, Alphabet, ParseError, RunOptions, RunStatus, Symbol, Trace, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RevTagError {
    #[error("symbol id {0} is not in the alphabet")]
    UnknownSymbol(u32),
    #[error("no production is specified for the pair ({first}, {last})")]
    UnspecifiedProduction { first: String, last: String },
}

/// Result of one reverse tag step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RevStepResult {
    Next(Word),
    /// The produced symbol's deletion number exceeds the word length.
    Halted,
}

/// A reverse tag system: per-symbol deletion numbers, a (possibly partial)
/// pair-production map, and an initial word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReverseTagSystem {
    pub alphabet: Alphabet,
    deletion: Vec<u32>,
    delta: Vec<Option<Symbol>>,
    pub initial: Vec<Symbol>,
}

impl ReverseTagSystem {
    /// Builds a system with all productions unspecified; fill them in with
    /// [`ReverseTagSystem::specify`].
    pub fn new(
        alphabet: Alphabet,
        deletion: Vec<u32>,
        initial: Vec<Symbol>,
    ) -> Result<ReverseTagSystem, RevTagError> {
        assert_eq!(alphabet.len(), deletion.len(), "one deletion number per symbol");
        for &s in &initial {
            if !alphabet.contains(s) {
                return Err(RevTagError::UnknownSymbol(s.index()));
            }
        }
        let t = alphabet.len();
        Ok(ReverseTagSystem { alphabet, deletion, delta: vec![None; t * t], initial })
    }

    pub fn deletion_number(&self, s: Symbol) -> u32 {
        self.deletion[(s.index() - 1) as usize]
    }

    fn pair_slot(&self, first: Symbol, last: Symbol) -> usize {
        (first.index() - 1) as usize * self.alphabet.len() + (last.index() - 1) as usize
    }

    /// The production for the pair, if specified.
    pub fn production(&self, first: Symbol, last: Symbol) -> Option<Symbol> {
        self.delta[self.pair_slot(first, last)]
    }

    /// Specifies `delta(first, last) = out`, returning the previous entry.
    pub fn specify(&mut self, first: Symbol, last: Symbol, out: Symbol) -> Option<Symbol> {
        let slot = self.pair_slot(first, last);
        self.delta[slot].replace(out)
    }

    /// All specified productions in (first, last) id order.
    pub fn specified_pairs(&self) -> impl Iterator<Item = (Symbol, Symbol, Symbol)> + '_ {
        let t = self.alphabet.len() as u32;
        self.delta.iter().enumerate().filter_map(move |(slot, out)| {
            out.map(|y| {
                let first = Symbol::from_index(slot as u32 / t + 1);
                let last = Symbol::from_index(slot as u32 % t + 1);
                (first, last, y)
            })
        })
    }

    /// Fills every unspecified pair with `filler`, making `delta` total.
    pub fn completed_with(mut self, filler: Symbol) -> ReverseTagSystem {
        for slot in self.delta.iter_mut() {
            slot.get_or_insert(filler);
        }
        self
    }

    /// One step on a nonempty word: `y = delta(first, last)`; halt if
    /// `d(y)` exceeds the length, otherwise delete `d(y)` from the front and
    /// append `y`.
    pub fn step(&self, w: &Word) -> Result<RevStepResult, RevTagError> {
        let first = w.first().expect("step requires a nonempty word");
        let last = w.last().expect("step requires a nonempty word");
        for s in [first, last] {
            if !self.alphabet.contains(s) {
                return Err(RevTagError::UnknownSymbol(s.index()));
            }
        }
        let y = self.production(first, last).ok_or_else(|| RevTagError::UnspecifiedProduction {
            first: self.alphabet.name(first).to_string(),
            last: self.alphabet.name(last).to_string(),
        })?;
        let d = self.deletion_number(y) as usize;
        if d > w.len() {
            return Ok(RevStepResult::Halted);
        }
        let mut next = w.clone();
        next.push(y);
        next.drop_front(d);
        Ok(RevStepResult::Next(next))
    }

    /// Runs from the initial word with default options.
    pub fn run(&self, max_steps: usize) -> Result<Trace, RevTagError> {
        self.run_from(&self.initial, max_steps, RunOptions::default())
    }

    /// Runs from an arbitrary nonempty word. An unspecified production ends
    /// the run with [`RunStatus::UnspecifiedAt`] rather than an error.
    pub fn run_from(
        &self,
        initial: &[Symbol],
        max_steps: usize,
        opts: RunOptions,
    ) -> Result<Trace, RevTagError> {
        for &s in initial {
            if !self.alphabet.contains(s) {
                return Err(RevTagError::UnknownSymbol(s.index()));
            }
        }
        assert!(!initial.is_empty(), "reverse tag runs start from a nonempty word");
        let mut tb = Trace::builder(initial, opts);
        let status = loop {
            let i = tb.current_index();
            if i == max_steps {
                break RunStatus::BudgetExhausted;
            }
            let (first, last) = (tb.first(), tb.last());
            let Some(y) = self.production(first, last) else {
                break RunStatus::UnspecifiedAt(i);
            };
            let d = self.deletion_number(y) as usize;
            if d > tb.current_len() {
                break RunStatus::HaltedAt(i);
            }
            if let Some(entry) = tb.step(d, &[y]) {
                break RunStatus::CycleAt { entry, period: tb.current_index() - entry };
            }
        };
        Ok(tb.finish(status, 0))
    }

    /// Parses the line-oriented reverse tag format:
    ///
    /// ```text
    /// revtagsystem
    /// d <symbol> <nonneg-int>
    /// delta <symbol> <symbol> -> <symbol>
    /// initial <symbol> [<symbol> ...]
    /// ```
    ///
    /// `d` lines define the alphabet, in order of first appearance.
    pub fn parse(text: &str) -> Result<ReverseTagSystem, ParseError> {
        let mut header_seen = false;
        let mut d_lines: Vec<(usize, String, u32)> = Vec::new();
        let mut delta_lines: Vec<(usize, String, String, String)> = Vec::new();
        let mut initial_line: Option<(usize, Vec<String>)> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let head = tokens.next().expect("nonempty line");
            if !header_seen {
                if head != "revtagsystem" {
                    return Err(ParseError::new(line_no, "expected `revtagsystem` header"));
                }
                if tokens.next().is_some() {
                    return Err(ParseError::new(line_no, "unexpected tokens after `revtagsystem`"));
                }
                header_seen = true;
                continue;
            }
            match head {
                "d" => {
                    let sym = tokens
                        .next()
                        .ok_or_else(|| ParseError::new(line_no, "`d` line is missing its symbol"))?;
                    let num = tokens
                        .next()
                        .and_then(|t| t.parse::<u32>().ok())
                        .ok_or_else(|| ParseError::new(line_no, "`d` line needs a nonnegative integer"))?;
                    if tokens.next().is_some() {
                        return Err(ParseError::new(line_no, "unexpected tokens after deletion number"));
                    }
                    if d_lines.iter().any(|(_, s, _)| s == sym) {
                        return Err(ParseError::new(line_no, format!("duplicate `d` line for symbol `{sym}`")));
                    }
                    d_lines.push((line_no, sym.to_string(), num));
                }
                "delta" => {
                    let first = tokens
                        .next()
                        .ok_or_else(|| ParseError::new(line_no, "`delta` line is missing symbols"))?;
                    let last = tokens
                        .next()
                        .ok_or_else(|| ParseError::new(line_no, "`delta` line is missing its second symbol"))?;
                    match tokens.next() {
                        Some("->") => {}
                        _ => return Err(ParseError::new(line_no, "expected `->` in `delta` line")),
                    }
                    let out = tokens
                        .next()
                        .ok_or_else(|| ParseError::new(line_no, "`delta` line is missing its production"))?;
                    if tokens.next().is_some() {
                        return Err(ParseError::new(line_no, "unexpected tokens after production"));
                    }
                    delta_lines.push((line_no, first.to_string(), last.to_string(), out.to_string()));
                }
                "initial" => {
                    if initial_line.is_some() {
                        return Err(ParseError::new(line_no, "duplicate `initial` line"));
                    }
                    let word: Vec<String> = tokens.map(str::to_string).collect();
                    if word.is_empty() {
                        return Err(ParseError::new(line_no, "initial word must not be empty"));
                    }
                    initial_line = Some((line_no, word));
                }
                other => {
                    return Err(ParseError::new(line_no, format!("unknown directive `{other}`")));
                }
            }
        }

        if !header_seen {
            return Err(ParseError::new(1, "expected `revtagsystem` header"));
        }
        if d_lines.is_empty() {
            return Err(ParseError::new(1, "a reverse tag system needs at least one `d` line"));
        }
        let (initial_no, initial_tokens) =
            initial_line.ok_or_else(|| ParseError::new(1, "missing `initial` line"))?;

        let mut alphabet = Alphabet::new();
        let mut deletion = Vec::with_capacity(d_lines.len());
        for (_, sym, num) in &d_lines {
            alphabet.intern(sym);
            deletion.push(*num);
        }
        let resolve = |line: usize, tok: &str| {
            alphabet
                .get(tok)
                .ok_or_else(|| ParseError::new(line, format!("symbol `{tok}` has no `d` line")))
        };
        let initial = initial_tokens
            .iter()
            .map(|t| resolve(initial_no, t))
            .collect::<Result<Vec<_>, _>>()?;
        let mut resolved_deltas = Vec::with_capacity(delta_lines.len());
        for (line_no, first, last, out) in &delta_lines {
            resolved_deltas.push((
                *line_no,
                resolve(*line_no, first)?,
                resolve(*line_no, last)?,
                resolve(*line_no, out)?,
            ));
        }
        let mut sys = ReverseTagSystem::new(alphabet, deletion, initial)
            .expect("symbols were interned above");
        for (line_no, f, l, o) in resolved_deltas {
            if sys.specify(f, l, o).is_some() {
                return Err(ParseError::new(
                    line_no,
                    format!(
                        "duplicate `delta` line for pair ({}, {})",
                        sys.alphabet.name(f),
                        sys.alphabet.name(l)
                    ),
                ));
            }
        }
        Ok(sys)
    }

    /// Canonical text form; parses back to an equal system.
    pub fn to_text(&self) -> String {
        let mut out = String::from("revtagsystem\n");
        for s in self.alphabet.symbols() {
            out.push_str(&format!("d {} {}\n", self.alphabet.name(s), self.deletion_number(s)));
        }
        for (first, last, y) in self.specified_pairs() {
            out.push_str(&format!(
                "delta {} {} -> {}\n",
                self.alphabet.name(first),
                self.alphabet.name(last),
                self.alphabet.name(y)
            ));
        }
        out.push_str(&format!("initial {}\n", self.alphabet.render(&self.initial)));
        out
    }
}

/// Convenience for tests and examples: counts how often each word length
/// change occurs along a trace; with deletion numbers in {0, 2} the length
/// changes by exactly +1 or -1 per step.
pub fn length_deltas(trace: &Trace) -> HashMap<isize, usize> {
    let mut deltas = HashMap::new();
    for i in 1..trace.len() {
        let change = trace.word(i).len() as isize - trace.word(i - 1).len() as isize;
        *deltas.entry(change).or_insert(0) += 1;
    }
    deltas
}
