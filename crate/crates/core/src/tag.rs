//! Post 2-tag systems: stepping, bounded runs, halting, cycle detection.
//!
//! Also home to the symbol/word vocabulary shared with [`crate::revtag`].
//! A running word only ever loses symbols at the front and gains them at the
//! back, so a [`Word`] keeps the whole append history in one buffer and a
//! [`Trace`] stores every configuration as a window into a single shared
//! buffer.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// An interned alphabet symbol. Ids are dense and 1-based within one system,
/// matching the 1-based symbol indexing that the integer encoding in
/// [`crate::encode`] expects.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Symbol(u32);

impl Symbol {
    /// 1-based index of this symbol within its alphabet.
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn from_index(index: u32) -> Symbol {
        assert!(index >= 1, "symbol ids are 1-based");
        Symbol(index)
    }
}

/// A dense, ordered set of named symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    ids: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new() -> Alphabet {
        Alphabet::default()
    }

    /// Interns `token`, returning the existing symbol if already present.
    pub fn intern(&mut self, token: &str) -> Symbol {
        if let Some(&s) = self.ids.get(token) {
            return s;
        }
        let s = Symbol(self.names.len() as u32 + 1);
        self.names.push(token.to_string());
        self.ids.insert(token.to_string(), s);
        s
    }

    pub fn get(&self, token: &str) -> Option<Symbol> {
        self.ids.get(token).copied()
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[(s.0 - 1) as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, s: Symbol) -> bool {
        s.0 >= 1 && (s.0 as usize) <= self.names.len()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (1..=self.names.len() as u32).map(Symbol)
    }

    /// Parses a whitespace-separated word over this alphabet.
    pub fn word(&self, text: &str) -> Result<Vec<Symbol>, TagError> {
        text.split_whitespace()
            .map(|tok| self.get(tok).ok_or_else(|| TagError::UnknownToken(tok.to_string())))
            .collect()
    }

    /// Renders a word as space-separated tokens.
    pub fn render(&self, word: &[Symbol]) -> String {
        word.iter().map(|&s| self.name(s)).collect::<Vec<_>>().join(" ")
    }
}

/// The running word of a tag or reverse tag machine.
///
/// Appends go into `buf`; deletions advance `head`. The prefix of `buf`
/// below `head` is the word's consumed history, which makes the run's
/// computation string available for free.
#[derive(Clone, Debug)]
pub struct Word {
    buf: Vec<Symbol>,
    head: usize,
}

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Word {
        Word { buf: symbols, head: 0 }
    }

    pub fn len(&self) -> usize {
        self.buf.len() - self.head
    }

    pub fn is_empty(&self) -> bool {
        self.head == self.buf.len()
    }

    /// The live symbols of the word.
    pub fn symbols(&self) -> &[Symbol] {
        &self.buf[self.head..]
    }

    pub fn first(&self) -> Option<Symbol> {
        self.symbols().first().copied()
    }

    pub fn last(&self) -> Option<Symbol> {
        self.symbols().last().copied()
    }

    pub fn push(&mut self, s: Symbol) {
        self.buf.push(s);
    }

    /// Deletes `k` symbols from the front.
    pub fn drop_front(&mut self, k: usize) {
        assert!(k <= self.len(), "cannot delete {k} symbols from a word of length {}", self.len());
        self.head += k;
    }

    /// Every symbol the word has ever held: the initial symbols followed by
    /// each append, regardless of later deletions.
    pub fn history(&self) -> &[Symbol] {
        &self.buf
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(symbols: Vec<Symbol>) -> Word {
        Word::new(symbols)
    }
}

impl PartialEq for Word {
    fn eq(&self, other: &Word) -> bool {
        self.symbols() == other.symbols()
    }
}

impl Eq for Word {}

/// How a bounded run ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunStatus {
    /// The configuration at this index cannot be stepped from.
    HaltedAt(usize),
    /// The configuration at `entry` reappeared `period` steps later.
    CycleAt { entry: usize, period: usize },
    /// The step budget (or the cycle detector's memory budget) ran out.
    BudgetExhausted,
    /// A reverse tag step from this configuration needed an unspecified
    /// production. Never produced by tag runs.
    UnspecifiedAt(usize),
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunStatus::HaltedAt(i) => write!(f, "halted@{i}"),
            RunStatus::CycleAt { entry, period } => write!(f, "cycle@{entry} period {period}"),
            RunStatus::BudgetExhausted => write!(f, "budget"),
            RunStatus::UnspecifiedAt(i) => write!(f, "unspecified@{i}"),
        }
    }
}

/// Options for bounded runs.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Report a cycle as soon as an exact configuration repeats.
    pub detect_cycles: bool,
    /// Total symbols the cycle detector may store before it stops recording
    /// new configurations (detection degrades, the run itself continues).
    pub seen_symbol_budget: usize,
}

impl Default for RunOptions {
    fn default() -> RunOptions {
        RunOptions { detect_cycles: true, seen_symbol_budget: 1 << 22 }
    }
}

/// A recorded run. Every configuration is a window into one shared buffer
/// holding the initial word followed by each appended symbol.
#[derive(Clone, Debug)]
pub struct Trace {
    history: Vec<Symbol>,
    bounds: Vec<(usize, usize)>,
    status: RunStatus,
    comp_skip: usize,
}

impl Trace {
    /// Number of recorded configurations (the initial word counts).
    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a trace always records at least the initial word
    }

    pub fn word(&self, i: usize) -> &[Symbol] {
        let (h, e) = self.bounds[i];
        &self.history[h..e]
    }

    /// How many symbols configuration `i` sits past the start of the shared
    /// buffer; the cumulative deletions, which is also the indentation the
    /// conventional staircase rendering of a run uses.
    pub fn word_offset(&self, i: usize) -> usize {
        self.bounds[i].0
    }

    pub fn words(&self) -> impl Iterator<Item = &[Symbol]> {
        self.bounds.iter().map(move |&(h, e)| &self.history[h..e])
    }

    pub fn last_word(&self) -> &[Symbol] {
        self.word(self.bounds.len() - 1)
    }

    pub fn status(&self) -> &RunStatus {
        &self.status
    }

    /// The raw shared buffer: initial word plus every appended symbol.
    pub fn history(&self) -> &[Symbol] {
        &self.history
    }

    /// The single string the run spells out. For a 2-tag run this follows
    /// the conventional rendering in which the pair consumed by the first
    /// step is omitted; for reverse tag runs it is the full history.
    pub fn computation_string(&self) -> &[Symbol] {
        &self.history[self.comp_skip.min(self.history.len())..]
    }

    pub(crate) fn builder(initial: &[Symbol], opts: RunOptions) -> TraceBuilder {
        let mut seen = HashMap::new();
        if opts.detect_cycles {
            seen.insert(initial.to_vec().into_boxed_slice(), 0usize);
        }
        TraceBuilder {
            history: initial.to_vec(),
            bounds: vec![(0, initial.len())],
            head: 0,
            seen,
            seen_symbols: initial.len(),
            opts,
        }
    }
}

/// Incremental trace construction shared by the tag and reverse tag runners.
pub(crate) struct TraceBuilder {
    history: Vec<Symbol>,
    bounds: Vec<(usize, usize)>,
    head: usize,
    seen: HashMap<Box<[Symbol]>, usize>,
    seen_symbols: usize,
    opts: RunOptions,
}

impl TraceBuilder {
    pub(crate) fn current_index(&self) -> usize {
        self.bounds.len() - 1
    }

    pub(crate) fn first(&self) -> Symbol {
        self.history[self.head]
    }

    pub(crate) fn last(&self) -> Symbol {
        *self.history.last().expect("word is nonempty")
    }

    pub(crate) fn current_len(&self) -> usize {
        self.history.len() - self.head
    }

    /// Appends `production` and deletes `delete` symbols from the front,
    /// recording the new configuration. Returns the index of a previous
    /// identical configuration if cycle detection spots one.
    pub(crate) fn step(&mut self, delete: usize, production: &[Symbol]) -> Option<usize> {
        self.head += delete;
        self.history.extend_from_slice(production);
        self.bounds.push((self.head, self.history.len()));
        if self.opts.detect_cycles {
            let word = &self.history[self.head..];
            if let Some(&entry) = self.seen.get(word) {
                return Some(entry);
            }
            if self.seen_symbols + word.len() <= self.opts.seen_symbol_budget {
                self.seen_symbols += word.len();
                self.seen.insert(word.to_vec().into_boxed_slice(), self.bounds.len() - 1);
            }
        }
        None
    }

    pub(crate) fn finish(self, status: RunStatus, comp_skip: usize) -> Trace {
        Trace { history: self.history, bounds: self.bounds, status, comp_skip }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TagError {
    #[error("symbol id {0} is not in the alphabet")]
    UnknownSymbol(u32),
    #[error("unknown symbol token `{0}`")]
    UnknownToken(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, msg: impl Into<String>) -> ParseError {
        ParseError { line, msg: msg.into() }
    }
}

/// Result of one tag step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepResult {
    Next(Word),
    /// The word is too short to delete from; the system has halted.
    Halted,
}

/// A Post 2-tag system: an alphabet, a total production map, and an initial
/// word. The deletion number is fixed at 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TagSystem {
    pub alphabet: Alphabet,
    rules: Vec<Vec<Symbol>>,
    pub initial: Vec<Symbol>,
}

/// Deletion number of every 2-tag step.
pub const TAG_DELETION: usize = 2;

impl TagSystem {
    /// Builds a system from an alphabet, one production per symbol (in id
    /// order), and an initial word.
    pub fn new(
        alphabet: Alphabet,
        rules: Vec<Vec<Symbol>>,
        initial: Vec<Symbol>,
    ) -> Result<TagSystem, TagError> {
        assert_eq!(alphabet.len(), rules.len(), "one production per alphabet symbol");
        for s in rules.iter().flatten().chain(initial.iter()) {
            if !alphabet.contains(*s) {
                return Err(TagError::UnknownSymbol(s.index()));
            }
        }
        Ok(TagSystem { alphabet, rules, initial })
    }

    /// The production for `s`.
    pub fn production(&self, s: Symbol) -> Result<&[Symbol], TagError> {
        self.rules
            .get((s.index() - 1) as usize)
            .map(|p| p.as_slice())
            .ok_or(TagError::UnknownSymbol(s.index()))
    }

    /// One step: delete two symbols from the front, append the production of
    /// the first deleted symbol. Words of length 0 or 1 cannot step.
    pub fn step(&self, w: &Word) -> Result<StepResult, TagError> {
        if w.len() < TAG_DELETION {
            return Ok(StepResult::Halted);
        }
        let first = w.first().expect("word is nonempty");
        let production = self.production(first)?;
        let mut next = w.clone();
        next.drop_front(TAG_DELETION);
        for &s in production {
            next.push(s);
        }
        Ok(StepResult::Next(next))
    }

    /// Runs from the initial word with default options.
    pub fn run(&self, max_steps: usize) -> Result<Trace, TagError> {
        self.run_from(&self.initial, max_steps, RunOptions::default())
    }

    /// Runs from an arbitrary word.
    pub fn run_from(
        &self,
        initial: &[Symbol],
        max_steps: usize,
        opts: RunOptions,
    ) -> Result<Trace, TagError> {
        for &s in initial {
            if !self.alphabet.contains(s) {
                return Err(TagError::UnknownSymbol(s.index()));
            }
        }
        let mut tb = Trace::builder(initial, opts);
        let status = loop {
            let i = tb.current_index();
            if tb.current_len() < TAG_DELETION {
                break RunStatus::HaltedAt(i);
            }
            if i == max_steps {
                break RunStatus::BudgetExhausted;
            }
            let production = self.production(tb.first())?.to_vec();
            if let Some(entry) = tb.step(TAG_DELETION, &production) {
                break RunStatus::CycleAt { entry, period: tb.current_index() - entry };
            }
        };
        // The conventional computation string starts after the first deletion.
        let comp_skip = if tb.current_index() > 0 { TAG_DELETION } else { 0 };
        Ok(tb.finish(status, comp_skip))
    }

    /// Parses the line-oriented tag system format:
    ///
    /// ```text
    /// tagsystem
    /// rule <symbol> -> [<symbol> ...]
    /// initial <symbol> [<symbol> ...]
    /// ```
    ///
    /// `#` starts a comment. Rule heads define the alphabet, in order of
    /// first appearance.
    pub fn parse(text: &str) -> Result<TagSystem, ParseError> {
        let mut header_seen = false;
        let mut rule_lines: Vec<(usize, String, Vec<String>)> = Vec::new();
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
                if head != "tagsystem" {
                    return Err(ParseError::new(line_no, "expected `tagsystem` header"));
                }
                if tokens.next().is_some() {
                    return Err(ParseError::new(line_no, "unexpected tokens after `tagsystem`"));
                }
                header_seen = true;
                continue;
            }
            match head {
                "rule" => {
                    let lhs = tokens
                        .next()
                        .ok_or_else(|| ParseError::new(line_no, "rule is missing its symbol"))?;
                    if lhs == "->" {
                        return Err(ParseError::new(line_no, "rule is missing its symbol"));
                    }
                    match tokens.next() {
                        Some("->") => {}
                        _ => return Err(ParseError::new(line_no, "expected `->` after the rule symbol")),
                    }
                    if rule_lines.iter().any(|(_, h, _)| h == lhs) {
                        return Err(ParseError::new(line_no, format!("duplicate rule for symbol `{lhs}`")));
                    }
                    rule_lines.push((line_no, lhs.to_string(), tokens.map(str::to_string).collect()));
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
            return Err(ParseError::new(1, "expected `tagsystem` header"));
        }
        if rule_lines.is_empty() {
            return Err(ParseError::new(1, "a tag system needs at least one rule"));
        }
        let (initial_no, initial_tokens) =
            initial_line.ok_or_else(|| ParseError::new(1, "missing `initial` line"))?;

        let mut alphabet = Alphabet::new();
        for (_, head, _) in &rule_lines {
            alphabet.intern(head);
        }
        let resolve = |line: usize, tok: &str| {
            alphabet
                .get(tok)
                .ok_or_else(|| ParseError::new(line, format!("symbol `{tok}` has no rule")))
        };
        let mut rules = Vec::with_capacity(rule_lines.len());
        for (line_no, _, prod) in &rule_lines {
            rules.push(
                prod.iter().map(|t| resolve(*line_no, t)).collect::<Result<Vec<_>, _>>()?,
            );
        }
        let initial = initial_tokens
            .iter()
            .map(|t| resolve(initial_no, t))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TagSystem { alphabet, rules, initial })
    }

    /// Canonical text form; parses back to an equal system.
    pub fn to_text(&self) -> String {
        let mut out = String::from("tagsystem\n");
        for s in self.alphabet.symbols() {
            let prod = self.rules[(s.index() - 1) as usize]
                .iter()
                .map(|&p| self.alphabet.name(p))
                .collect::<Vec<_>>()
                .join(" ");
            if prod.is_empty() {
                out.push_str(&format!("rule {} ->\n", self.alphabet.name(s)));
            } else {
                out.push_str(&format!("rule {} -> {}\n", self.alphabet.name(s), prod));
            }
        }
        out.push_str(&format!("initial {}\n", self.alphabet.render(&self.initial)));
        out
    }
}

/// Drops a trailing `#` comment; shared by all the line-oriented formats.
pub fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE_RULES: &str = "tagsystem\nrule a -> a b b\nrule b -> c\nrule c -> a\n";

    fn left_system() -> TagSystem {
        TagSystem::parse(&format!("{EXAMPLE_RULES}initial a b c b\n")).unwrap()
    }

    fn right_system() -> TagSystem {
        TagSystem::parse(&format!("{EXAMPLE_RULES}initial a b a b\n")).unwrap()
    }

    fn spaced(compact: &str) -> String {
        compact.chars().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
    }

    fn rendered(sys: &TagSystem, trace: &Trace) -> Vec<String> {
        trace.words().map(|w| sys.alphabet.render(w).replace(' ', "")).collect()
    }

    #[test]
    fn step_matches_first_trace_line() {
        let sys = left_system();
        let w = Word::new(sys.alphabet.word(&spaced("abcb")).unwrap());
        match sys.step(&w).unwrap() {
            StepResult::Next(next) => {
                assert_eq!(sys.alphabet.render(next.symbols()).replace(' ', ""), "cbabb");
            }
            StepResult::Halted => panic!("should step"),
        }
    }

    #[test]
    fn single_symbol_word_halts() {
        let sys = left_system();
        let w = Word::new(sys.alphabet.word("a").unwrap());
        assert_eq!(sys.step(&w).unwrap(), StepResult::Halted);
    }

    #[test]
    fn final_step_of_halting_run() {
        let sys = right_system();
        let w = Word::new(sys.alphabet.word(&spaced("ca")).unwrap());
        match sys.step(&w).unwrap() {
            StepResult::Next(next) => assert_eq!(next.symbols(), &sys.alphabet.word("a").unwrap()[..]),
            StepResult::Halted => panic!("ca still steps"),
        }
    }

    #[test]
    fn left_run_is_periodic() {
        let sys = left_system();
        let trace = sys.run(100).unwrap();
        let words = rendered(&sys, &trace);
        assert_eq!(words, ["abcb", "cbabb", "abba", "baabb", "abbc", "bcabb", "abbc"]);
        assert_eq!(*trace.status(), RunStatus::CycleAt { entry: 4, period: 2 });
        assert_eq!(trace.word(4), trace.word(6));
    }

    #[test]
    fn right_run_halts_after_eleven_steps() {
        let sys = right_system();
        let trace = sys.run(100).unwrap();
        let words = rendered(&sys, &trace);
        assert_eq!(words.len(), 12);
        assert_eq!(words[0], "abab");
        assert_eq!(words[11], "a");
        assert_eq!(*trace.status(), RunStatus::HaltedAt(11));
    }

    #[test]
    fn right_run_computation_string() {
        let sys = right_system();
        let trace = sys.run(100).unwrap();
        let s = sys.alphabet.render(trace.computation_string()).replace(' ', "");
        assert_eq!(s, "ababbabbabbccabbcacaa");
        // The raw history carries the initial word in full.
        let h = sys.alphabet.render(trace.history()).replace(' ', "");
        assert_eq!(h, format!("ab{s}"));
    }

    #[test]
    fn zero_budget_keeps_only_initial_word() {
        let sys = left_system();
        let trace = sys.run(0).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(*trace.status(), RunStatus::BudgetExhausted);
        assert_eq!(
            sys.alphabet.render(trace.computation_string()),
            sys.alphabet.render(&sys.initial)
        );
    }

    #[test]
    fn length_law_holds_along_a_run() {
        let sys = right_system();
        let trace = sys.run(100).unwrap();
        for i in 1..trace.len() {
            let prev = trace.word(i - 1);
            let prod = sys.production(prev[0]).unwrap();
            assert_eq!(trace.word(i).len(), prev.len() - 2 + prod.len());
        }
    }

    #[test]
    fn empty_production_can_empty_the_word() {
        let text = "tagsystem\nrule a ->\ninitial a a\n";
        let sys = TagSystem::parse(text).unwrap();
        let trace = sys.run(10).unwrap();
        assert_eq!(trace.len(), 2);
        assert_eq!(trace.word(1).len(), 0);
        assert_eq!(*trace.status(), RunStatus::HaltedAt(1));
    }

    #[test]
    fn parse_rejects_unknown_symbols_and_duplicates() {
        assert!(TagSystem::parse("tagsystem\nrule a -> b\ninitial a\n").is_err());
        assert!(TagSystem::parse("tagsystem\nrule a -> a\nrule a -> a\ninitial a\n").is_err());
        assert!(TagSystem::parse("rule a -> a\ninitial a\n").is_err());
        assert!(TagSystem::parse("tagsystem\nrule a -> a\n").is_err());
    }

    #[test]
    fn text_round_trip() {
        let sys = left_system();
        let again = TagSystem::parse(&sys.to_text()).unwrap();
        assert_eq!(sys, again);
    }

    #[test]
    fn cycle_detector_budget_degrades_to_budget_status() {
        let sys = left_system();
        let opts = RunOptions { detect_cycles: true, seen_symbol_budget: 4 };
        let trace = sys.run_from(&sys.initial, 20, opts).unwrap();
        // Only the initial word fits in the seen set; the repeat at step 6 is
        // missed and the run uses its full step budget.
        assert_eq!(*trace.status(), RunStatus::BudgetExhausted);
        assert_eq!(trace.len(), 21);
    }
}
