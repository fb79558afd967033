//! Seeded random instances for verification batches and fuzz-style tests.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::recdsl::{CaseDef, Expression, RecurrenceDef};
use crate::revtag::ReverseTagSystem;
use crate::seq::InitialConditions;
use crate::tag::{Alphabet, Symbol, TagSystem};

/// A deterministic RNG for a batch seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const TOKENS: &[&str] = &["a", "b", "c", "d", "e", "f", "g", "h"];

fn alphabet(size: usize) -> Alphabet {
    let mut al = Alphabet::new();
    for tok in TOKENS.iter().take(size) {
        al.intern(tok);
    }
    al
}

/// A random tag system with nonempty productions, suitable for translation.
pub fn random_tag_system(
    rng: &mut impl Rng,
    max_symbols: usize,
    max_production: usize,
    max_initial: usize,
) -> TagSystem {
    let t = rng.gen_range(1..=max_symbols.min(TOKENS.len()));
    let al = alphabet(t);
    let mut rules: Vec<Vec<Symbol>> = Vec::with_capacity(t);
    for _ in 0..t {
        let len = rng.gen_range(1..=max_production);
        rules.push((0..len).map(|_| Symbol::from_index(rng.gen_range(1..=t as u32))).collect());
    }
    let len = rng.gen_range(1..=max_initial.max(1));
    let initial: Vec<Symbol> =
        (0..len).map(|_| Symbol::from_index(rng.gen_range(1..=t as u32))).collect();
    TagSystem::new(al, rules, initial).expect("generated symbols are in range")
}

/// A random reverse tag system. Deletion numbers are drawn from {0, 2} when
/// `restricted_d` is set (the regime the deeper encoding requires), else
/// from 0..=3. Each production pair is specified with roughly 7/8
/// probability.
pub fn random_reverse_tag_system(
    rng: &mut impl Rng,
    max_symbols: usize,
    max_initial: usize,
    restricted_d: bool,
) -> ReverseTagSystem {
    let t = rng.gen_range(1..=max_symbols.min(TOKENS.len()));
    let al = alphabet(t);
    let deletion: Vec<u32> = (0..t)
        .map(|_| if restricted_d { 2 * rng.gen_range(0..=1) } else { rng.gen_range(0..=3) })
        .collect();
    let len = rng.gen_range(1..=max_initial.max(1));
    let initial: Vec<Symbol> =
        (0..len).map(|_| Symbol::from_index(rng.gen_range(1..=t as u32))).collect();
    let mut sys = ReverseTagSystem::new(al, deletion, initial).expect("symbols in range");
    for first in 1..=t as u32 {
        for last in 1..=t as u32 {
            if rng.gen_range(0..8) < 7 {
                let out = Symbol::from_index(rng.gen_range(1..=t as u32));
                sys.specify(Symbol::from_index(first), Symbol::from_index(last), out);
            }
        }
    }
    sys
}

fn random_expr(rng: &mut impl Rng, depth: usize) -> Expression {
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => Expression::N,
            1 => Expression::Const(rng.gen_range(0..8)),
            _ => Expression::SelfApp(Box::new(Expression::Sub(
                Box::new(Expression::N),
                Box::new(Expression::Const(rng.gen_range(1..4))),
            ))),
        };
    }
    match rng.gen_range(0..6) {
        0 => Expression::Add(
            Box::new(random_expr(rng, depth - 1)),
            Box::new(random_expr(rng, depth - 1)),
        ),
        1 => Expression::Sub(
            Box::new(random_expr(rng, depth - 1)),
            Box::new(random_expr(rng, depth - 1)),
        ),
        2 => Expression::Scale(rng.gen_range(0..5), Box::new(random_expr(rng, depth - 1))),
        3 | 4 => Expression::SelfApp(Box::new(random_expr(rng, depth - 1))),
        _ => random_expr(rng, 0),
    }
}

/// A random valid recurrence definition with contiguous initial conditions.
/// The bodies are arbitrary, so most of these stop with a witness quickly;
/// that is what witness-validity tests want.
pub fn random_recurrence(rng: &mut impl Rng, max_cases: usize) -> RecurrenceDef {
    let start = rng.gen_range(0..3u64);
    let init_len = rng.gen_range(0..5u64);
    let mut initial = InitialConditions::new();
    for k in 0..init_len {
        initial.set(start + k, rng.gen_range(-4..8)).expect("no span");
    }
    let cases = match rng.gen_range(1..=max_cases.max(1)) {
        1 => vec![CaseDef { modulus: 1, residue: 0, body: random_expr(rng, 3) }],
        k => {
            let modulus = k as u64;
            (0..modulus)
                .map(|residue| CaseDef { modulus, residue, body: random_expr(rng, 3) })
                .collect()
        }
    };
    RecurrenceDef::with_cases("R", start, initial, cases)
        .expect("cases partition residues and inits are contiguous")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic_per_seed() {
        let a = random_tag_system(&mut rng(7), 4, 3, 6);
        let b = random_tag_system(&mut rng(7), 4, 3, 6);
        assert_eq!(a, b);
        let c = random_tag_system(&mut rng(8), 4, 3, 6);
        // Overwhelmingly likely to differ; this guards against a stuck RNG.
        assert!(a != c || random_tag_system(&mut rng(9), 4, 3, 6) != a);
    }

    #[test]
    fn random_recurrences_validate() {
        let mut r = rng(42);
        for _ in 0..50 {
            let def = random_recurrence(&mut r, 3);
            assert!(!def.cases.is_empty());
        }
    }

    #[test]
    fn restricted_deletion_numbers_stay_in_range() {
        let mut r = rng(5);
        for _ in 0..20 {
            let sys = random_reverse_tag_system(&mut r, 4, 5, true);
            for s in sys.alphabet.symbols() {
                assert!(matches!(sys.deletion_number(s), 0 | 2));
            }
        }
    }
}
