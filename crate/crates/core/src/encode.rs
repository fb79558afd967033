//! Integer encoding of reverse tag systems as recurrence initial conditions.
//!
//! Symbols and symbol pairs map injectively into the integers: symbol `s_i`
//! to `4^(i+1) + 2` and pair `(s_i, s_j)` to twice the first code plus the
//! second. A reverse tag system's deletion numbers live at the symbol codes
//! (`B(alpha(s)) = 1 - d(s)`), its production table at the pair codes
//! (`B(alpha(s_i, s_j)) = alpha(delta(s_i, s_j))`), and its initial word on
//! the first odd slots after `c0 = alpha(s_t, s_t) + 2`, capped by the
//! initial word length marker `2m - 2`. From there the fixed two-case `B`
//! recurrence reproduces the machine's run: appended symbols on odd indices,
//! word lengths on even ones. The single-case `A` recurrence reproduces `B`
//! on a stride-4 lattice from shared initial conditions.

use thiserror::Error;

use crate::recdsl::{parse_recurrence, RecurrenceDef};
use crate::revtag::ReverseTagSystem;
use crate::seq::{InitialConditions, SeqValue};
use crate::tag::ParseError;

/// Largest supported alphabet: keeps `3 * 4^(t+1) + 8` (and everything the
/// recurrences index below it) comfortably inside signed 64-bit range.
pub const MAX_ALPHABET: u32 = 14;

/// What an encoded integer stands for. Indices are 1-based.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum AlphaMeaning {
    Sym(u32),
    Pair(u32, u32),
}

/// An encoded symbol or pair.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct AlphaCode {
    pub value: SeqValue,
    pub meaning: AlphaMeaning,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("alphabet has {t} symbols; the encoding supports at most {MAX_ALPHABET}")]
    AlphabetTooLarge { t: usize },
    #[error("symbol index {i} is outside 1..={MAX_ALPHABET}")]
    SymbolIndexOutOfRange { i: u32 },
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("initial word is empty")]
    EmptyInitialWord,
    #[error("symbol `{symbol}` has deletion number {d}; this encoding requires 0 or 2")]
    DeletionNumberOutOfRange { symbol: String, d: u32 },
}

/// `alpha(s_i) = 4^(i+1) + 2`.
pub fn alpha(i: u32) -> Result<AlphaCode, EncodeError> {
    if i < 1 || i > MAX_ALPHABET {
        return Err(EncodeError::SymbolIndexOutOfRange { i });
    }
    let value = (1i64 << (2 * i + 2)) + 2;
    Ok(AlphaCode { value, meaning: AlphaMeaning::Sym(i) })
}

/// `alpha(s_i, s_j) = 2 alpha(s_i) + alpha(s_j) = 2^(2i+3) + 2^(2j+2) + 6`.
pub fn alpha_pair(i: u32, j: u32) -> Result<AlphaCode, EncodeError> {
    let a = alpha(i)?.value;
    let b = alpha(j)?.value;
    let value = a.checked_mul(2).and_then(|v| v.checked_add(b)).expect("within i64 for t <= 14");
    Ok(AlphaCode { value, meaning: AlphaMeaning::Pair(i, j) })
}

/// Exact inverse of [`alpha`]/[`alpha_pair`] over an alphabet of `t`
/// symbols; `None` for anything outside their ranges.
pub fn alpha_decode(value: SeqValue, t: u32) -> Option<AlphaMeaning> {
    let t = t.min(MAX_ALPHABET);
    if value % 4 != 2 {
        // Every code is congruent to 2 mod 4.
        return None;
    }
    for i in 1..=t {
        let sym = alpha(i).expect("i <= 14");
        if sym.value == value {
            return Some(sym.meaning);
        }
        for j in 1..=t {
            let pair_value = 2 * sym.value + alpha(j).expect("j <= 14").value;
            if pair_value == value {
                return Some(AlphaMeaning::Pair(i, j));
            }
        }
    }
    None
}

const B_SRC: &str = "name B\nstart 0\n\
    case n % 2 == 0 : A(n) = A(n - 2) + 2*A(A(n - 1))\n\
    case n % 2 == 1 : A(n) = A(2*A(n - 2 - A(n - 1)) + A(n - 2))\n";

const A_CANONICAL_SRC: &str = "name A\nstart 0\n\
    def A(n) = A(n - 4 - A(A(n - 4))) + 4*A(A(n - 2)) + A(2*A(n - 4 - A(n - 2)) + A(n - 4))\n";

const A_SWAPPED_SRC: &str = "name A\nstart 0\n\
    def A(n) = A(n - 4 - A(A(n - 4))) + 4*A(A(n - 4)) + A(2*A(n - 4 - A(n - 2)) + A(n - 2))\n";

/// The two published shapes of the `A` body. `Canonical` is the form whose
/// simulation argument is worked through term by term; `Swapped` exchanges
/// which of the two trailing lookups feeds the doubled middle term and the
/// final term. Only the canonical form is asserted correct here.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum AVariant {
    #[default]
    Canonical,
    Swapped,
}

/// The bare `B` recurrence, without initial conditions.
pub fn b_recurrence() -> RecurrenceDef {
    parse_recurrence(B_SRC).expect("B source is valid")
}

/// The bare `A` recurrence, without initial conditions.
pub fn a_recurrence(variant: AVariant) -> RecurrenceDef {
    let src = match variant {
        AVariant::Canonical => A_CANONICAL_SRC,
        AVariant::Swapped => A_SWAPPED_SRC,
    };
    parse_recurrence(src).expect("A source is valid")
}

/// A reverse tag system compiled into `B` initial conditions.
#[derive(Clone, Debug)]
pub struct CompiledB {
    pub system: ReverseTagSystem,
    /// Alphabet size.
    pub t: u32,
    /// Initial word length.
    pub m: u64,
    /// `alpha(s_t, s_t) + 2`: the boundary between the encoded rule table
    /// and the simulation region.
    pub c0: u64,
    pub def: RecurrenceDef,
}

impl CompiledB {
    pub fn initial(&self) -> &InitialConditions {
        &self.def.initial
    }

    /// `B` computes the machine's step `i` at `sim_base() + 2 i`.
    pub fn sim_base(&self) -> u64 {
        self.c0 + 2 * self.m
    }
}

fn common_sizes(r: &ReverseTagSystem) -> Result<(u32, u64, u64), EncodeError> {
    let t = r.alphabet.len();
    if t == 0 {
        return Err(EncodeError::EmptyAlphabet);
    }
    if t > MAX_ALPHABET as usize {
        return Err(EncodeError::AlphabetTooLarge { t });
    }
    let t = t as u32;
    let m = r.initial.len() as u64;
    if m == 0 {
        return Err(EncodeError::EmptyInitialWord);
    }
    let c0 = (alpha_pair(t, t)?.value + 2) as u64;
    debug_assert_eq!(c0 as i64, 3 * (1i64 << (2 * t + 2)) + 8);
    debug_assert_eq!(c0 % 4, 0);
    Ok((t, m, c0))
}

/// Only nonzero values become explicit entries; the sparse span's default
/// already says zero everywhere else.
fn set_nonzero(ic: &mut InitialConditions, index: u64, value: SeqValue) {
    if value != 0 {
        let prev = ic.set(index, value).expect("index lies inside the span");
        debug_assert!(prev.is_none(), "encoding never writes one index twice");
    }
}

/// Encodes the deletion numbers and production table of `r`, shared by both
/// compilers, into `ic`.
fn encode_rule_table(r: &ReverseTagSystem, ic: &mut InitialConditions) {
    for s in r.alphabet.symbols() {
        let code = alpha(s.index()).expect("t was checked");
        set_nonzero(ic, code.value as u64, 1 - r.deletion_number(s) as i64);
    }
    for (first, last, out) in r.specified_pairs() {
        let pair = alpha_pair(first.index(), last.index()).expect("t was checked");
        let out_code = alpha(out.index()).expect("t was checked");
        set_nonzero(ic, pair.value as u64, out_code.value);
    }
}

/// Compiles a reverse tag system into the `B` recurrence with its sparse
/// initial-condition table.
pub fn compile_b(r: &ReverseTagSystem) -> Result<CompiledB, EncodeError> {
    let (t, m, c0) = common_sizes(r)?;
    let mut ic = InitialConditions::with_span(0, c0 + 2 * m, 0).expect("lo <= hi");
    encode_rule_table(r, &mut ic);
    for (u, &q) in r.initial.iter().enumerate() {
        let code = alpha(q.index()).expect("t was checked");
        set_nonzero(&mut ic, c0 + 2 * (u as u64 + 1) - 1, code.value);
    }
    set_nonzero(&mut ic, c0 + 2 * m, 2 * m as i64 - 2);

    let def = b_recurrence().replace_initial(ic).expect("span is gap-free");
    Ok(CompiledB { system: r.clone(), t, m, c0, def })
}

/// A reverse tag system compiled into `A` initial conditions.
#[derive(Clone, Debug)]
pub struct CompiledA {
    pub system: ReverseTagSystem,
    pub t: u32,
    pub m: u64,
    pub c0: u64,
    pub variant: AVariant,
    pub def: RecurrenceDef,
}

impl CompiledA {
    pub fn initial(&self) -> &InitialConditions {
        &self.def.initial
    }
}

/// Compiles a reverse tag system (deletion numbers restricted to {0, 2})
/// into the `A` recurrence. `A` shares `B`'s initial conditions up to `c0`;
/// after that, the block `A(c0 + 4n + j)` for `0 <= n < m` holds `0` at
/// `j = 0, 2`, the `B` odd lattice at `j = 1`, and twice the `B` even
/// lattice at `j = 3`.
pub fn compile_a(r: &ReverseTagSystem, variant: AVariant) -> Result<CompiledA, EncodeError> {
    for s in r.alphabet.symbols() {
        let d = r.deletion_number(s);
        if d != 0 && d != 2 {
            return Err(EncodeError::DeletionNumberOutOfRange {
                symbol: r.alphabet.name(s).to_string(),
                d,
            });
        }
    }
    let (t, m, c0) = common_sizes(r)?;
    let mut ic = InitialConditions::with_span(0, c0 + 4 * m - 1, 0).expect("lo <= hi");
    encode_rule_table(r, &mut ic);
    for (u, &q) in r.initial.iter().enumerate() {
        let u = u as u64;
        let code = alpha(q.index()).expect("t was checked");
        // j = 1 mirrors B(c0 + 2n + 1) = alpha(q_{n+1}); j = 3 mirrors
        // 2 B(c0 + 2n + 2), zero except for the word-length marker.
        set_nonzero(&mut ic, c0 + 4 * u + 1, code.value);
        let b_even = if u == m - 1 { 2 * m as i64 - 2 } else { 0 };
        set_nonzero(&mut ic, c0 + 4 * u + 3, 2 * b_even);
    }
    let def = a_recurrence(variant).replace_initial(ic).expect("span is gap-free");
    Ok(CompiledA { system: r.clone(), t, m, c0, variant, def })
}

/// Serializes initial conditions as TSV: a `default <v> range <lo>..<hi>`
/// header when a span is present, then one `index<TAB>value` row per
/// explicit entry.
pub fn initial_conditions_tsv(ic: &InitialConditions) -> String {
    let mut out = String::new();
    if let Some(span) = ic.span() {
        out.push_str(&format!("default {} range {}..{}\n", span.value, span.lo, span.hi));
    }
    for (index, value) in ic.exceptions() {
        out.push_str(&format!("{index}\t{value}\n"));
    }
    out
}

/// Parses the TSV form back.
pub fn parse_initial_conditions_tsv(text: &str) -> Result<InitialConditions, ParseError> {
    let mut ic: Option<InitialConditions> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("default ") {
            if ic.is_some() {
                return Err(ParseError::new(line_no, "duplicate header line"));
            }
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let bad = || ParseError::new(line_no, "expected `default <v> range <lo>..<hi>`");
            if parts.len() != 3 || parts[1] != "range" {
                return Err(bad());
            }
            let value: SeqValue = parts[0].parse().map_err(|_| bad())?;
            let (lo, hi) = parts[2].split_once("..").ok_or_else(bad)?;
            let lo: u64 = lo.parse().map_err(|_| bad())?;
            let hi: u64 = hi.parse().map_err(|_| bad())?;
            ic = Some(
                InitialConditions::with_span(lo, hi, value)
                    .map_err(|e| ParseError::new(line_no, e.to_string()))?,
            );
            continue;
        }
        let (index, value) = line
            .split_once('\t')
            .or_else(|| line.split_once(' '))
            .ok_or_else(|| ParseError::new(line_no, "expected `index<TAB>value`"))?;
        let index: u64 = index
            .trim()
            .parse()
            .map_err(|_| ParseError::new(line_no, "bad index"))?;
        let value: SeqValue = value
            .trim()
            .parse()
            .map_err(|_| ParseError::new(line_no, "bad value"))?;
        ic.get_or_insert_with(InitialConditions::new)
            .set(index, value)
            .map_err(|e| ParseError::new(line_no, e.to_string()))?;
    }
    Ok(ic.unwrap_or_default())
}
