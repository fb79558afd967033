//! Property tests: parser fuzz safety, serialization round trips,
//! evaluator determinism, and the simulators as mutual oracles.

use proptest::prelude::*;

use nestrec::encode::parse_initial_conditions_tsv;
use nestrec::gen;
use nestrec::recdsl::{parse_recurrence, print_recurrence};
use nestrec::revtag::ReverseTagSystem;
use nestrec::seq::SeqTable;
use nestrec::tag::{RunStatus, StepResult, TagSystem, Word};
use nestrec::xlate::check_theorem1;

proptest! {
    // Random byte soup must produce errors or values, never panics.
    #[test]
    fn recurrence_parser_is_total(s in ".*") {
        let _ = parse_recurrence(&s);
    }

    #[test]
    fn tag_parser_is_total(s in ".*") {
        let _ = TagSystem::parse(&s);
    }

    #[test]
    fn revtag_parser_is_total(s in ".*") {
        let _ = ReverseTagSystem::parse(&s);
    }

    #[test]
    fn tsv_parser_is_total(s in ".*") {
        let _ = parse_initial_conditions_tsv(&s);
    }

    // Directive soup exercises the grammar deeper than raw bytes.
    #[test]
    fn recurrence_parser_survives_directive_soup(
        parts in proptest::collection::vec("(name|start|init|initrange|def|case|A\\(n\\)|=|[0-9]{1,3}|[+*%();:,-]|n| )", 0..40)
    ) {
        let _ = parse_recurrence(&parts.concat());
    }
}

#[test]
fn serialization_round_trips_on_random_instances() {
    let mut rng = gen::rng(2024);
    for _ in 0..200 {
        let sys = gen::random_tag_system(&mut rng, 4, 3, 6);
        assert_eq!(TagSystem::parse(&sys.to_text()).unwrap(), sys);

        let rev = gen::random_reverse_tag_system(&mut rng, 4, 5, false);
        assert_eq!(ReverseTagSystem::parse(&rev.to_text()).unwrap(), rev);

        let def = gen::random_recurrence(&mut rng, 3);
        let printed = print_recurrence(&def);
        let reparsed = parse_recurrence(&printed).unwrap();
        assert_eq!(reparsed, def, "printed:\n{printed}");
        assert_eq!(print_recurrence(&reparsed), printed);
    }
}

#[test]
fn extension_is_deterministic_and_prefix_stable() {
    let mut rng = gen::rng(99);
    for _ in 0..120 {
        let def = gen::random_recurrence(&mut rng, 3);
        let mut stepped = SeqTable::new(def.clone());
        let _ = stepped.extend(40).and_then(|_| stepped.extend(160));
        let mut direct = SeqTable::new(def);
        let _ = direct.extend(160);
        assert_eq!(stepped.frontier(), direct.frontier());
        assert_eq!(stepped.witness(), direct.witness());
        for n in 0..=160 {
            assert_eq!(stepped.lookup(n), direct.lookup(n));
        }
    }
}

#[test]
fn cycle_reports_are_sound() {
    let mut rng = gen::rng(7);
    let mut cycles_seen = 0;
    for _ in 0..300 {
        let sys = gen::random_tag_system(&mut rng, 4, 3, 6);
        let trace = sys.run(300).unwrap();
        if let RunStatus::CycleAt { entry, period } = *trace.status() {
            cycles_seen += 1;
            assert!(period > 0);
            assert_eq!(trace.word(entry), trace.word(entry + period));
            // Re-running the period from the entry word reproduces it.
            let mut w = Word::new(trace.word(entry).to_vec());
            for _ in 0..period {
                match sys.step(&w).unwrap() {
                    StepResult::Next(next) => w = next,
                    StepResult::Halted => panic!("a cycle cannot contain a halt"),
                }
            }
            assert_eq!(w.symbols(), trace.word(entry));
        }
    }
    assert!(cycles_seen > 50, "only {cycles_seen} cyclic runs; generator too tame");
}

#[test]
fn translation_simulates_on_random_instances() {
    let mut rng = gen::rng(12345);
    for i in 0..100 {
        let sys = gen::random_tag_system(&mut rng, 4, 3, 6);
        let report = check_theorem1(&sys, 50).unwrap();
        assert!(report.passed(), "instance {i}:\n{}\n{}", sys.to_text(), report.to_text());
        assert!(report.alphabet_bound_ok);
    }
}

#[test]
fn witnesses_satisfy_the_trichotomy() {
    let mut rng = gen::rng(31);
    let mut witnessed = 0;
    for _ in 0..400 {
        let def = gen::random_recurrence(&mut rng, 3);
        let start = def.start as i64;
        let mut table = SeqTable::new(def);
        if let Ok(outcome) = table.extend(200) {
            if let Some(w) = outcome.witness() {
                witnessed += 1;
                assert!(
                    w.offending_arg < start || w.offending_arg >= w.at as i64,
                    "witness at {} with argument {} violates the trichotomy (start {start})",
                    w.at,
                    w.offending_arg
                );
            }
        }
    }
    assert!(witnessed > 100, "only {witnessed} witnesses; generator too tame");
}
