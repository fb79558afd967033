//! Browser bindings: three JSON-returning entry points behind a static
//! page. Each function takes plain text (a builtin name, a recurrence
//! definition, or a machine file) and returns a JSON string; errors come
//! back as `{"error": "..."}` so the page never deals with exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use nestrec::recdsl::{builtin, parse_recurrence, print_recurrence, RecurrenceDef, BUILTINS};
use nestrec::revtag::ReverseTagSystem;
use nestrec::seq::{CalcOutcome, SeqTable};
use nestrec::tag::{strip_comment, TagSystem, Trace};
use nestrec::verify::{check_theorem2, check_theorem3, simulate_via_a};
use nestrec::xlate::{check_theorem1, to_reverse_tag};

const MAX_CELLS: usize = 1 << 24; // keep runaway tables out of the browser tab

fn err(msg: impl ToString) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

fn load_def(source: &str) -> Result<RecurrenceDef, String> {
    let trimmed = source.trim();
    if BUILTINS.contains(&trimmed) {
        return builtin(trimmed).map_err(|e| e.to_string());
    }
    parse_recurrence(source).map_err(|e| e.to_string())
}

/// Evaluates a builtin name or a recurrence definition up to `to`.
/// `transform` is `"raw"` or `"minus-half-n"`. Returns
/// `{name, start, points: [[n, v], ...], status, witness?}`.
#[wasm_bindgen]
pub fn eval_series(source: &str, to: u32, transform: &str) -> String {
    let def = match load_def(source) {
        Ok(d) => d,
        Err(e) => return err(e),
    };
    let half = match transform {
        "raw" => false,
        "minus-half-n" => true,
        other => return err(format!("unknown transform `{other}`")),
    };
    let name = def.name.clone();
    let start = def.start;
    let mut table = SeqTable::with_cell_limit(def, MAX_CELLS);
    let outcome = match table.extend(to as u64) {
        Ok(o) => o,
        Err(e) => return err(e),
    };
    let mut points: Vec<Value> = Vec::new();
    for n in start..=to as u64 {
        if let Some(v) = table.lookup(n) {
            if half {
                points.push(json!([n, v as f64 - n as f64 / 2.0]));
            } else {
                points.push(json!([n, v]));
            }
        }
    }
    let mut out = json!({
        "name": name,
        "start": start,
        "points": points,
        "status": if outcome.is_computed() { "computed" } else { "noncalculable" },
    });
    if let CalcOutcome::Noncalculable(w) = &outcome {
        out["witness"] = json!({ "at": w.at, "arg": w.offending_arg, "path": w.path });
    }
    out.to_string()
}

fn trace_json(kind: &str, trace: &Trace, render: impl Fn(usize) -> String) -> String {
    let rows: Vec<Value> = (0..trace.len())
        .map(|i| json!({ "step": i, "offset": trace.word_offset(i), "word": render(i) }))
        .collect();
    json!({
        "kind": kind,
        "rows": rows,
        "status": trace.status().to_string(),
    })
    .to_string()
}

/// Runs a machine file (`tagsystem` or `revtagsystem` header) and returns
/// `{kind, rows: [{step, offset, word}], status}`; `offset` is the
/// cumulative number of deleted symbols, i.e. the staircase indentation.
#[wasm_bindgen]
pub fn run_machine(source: &str, max_steps: u32) -> String {
    let first = source
        .lines()
        .map(|l| strip_comment(l).trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    match first {
        "tagsystem" => {
            let sys = match TagSystem::parse(source) {
                Ok(s) => s,
                Err(e) => return err(e),
            };
            match sys.run(max_steps as usize) {
                Ok(trace) => trace_json("tag", &trace, |i| sys.alphabet.render(trace.word(i))),
                Err(e) => err(e),
            }
        }
        "revtagsystem" => {
            let sys = match ReverseTagSystem::parse(source) {
                Ok(s) => s,
                Err(e) => return err(e),
            };
            match sys.run(max_steps as usize) {
                Ok(trace) => trace_json("revtag", &trace, |i| sys.alphabet.render(trace.word(i))),
                Err(e) => err(e),
            }
        }
        _ => err("expected a `tagsystem` or `revtagsystem` header"),
    }
}

/// Runs the whole chain on a tag system: translation, both compilations,
/// and all the instance checks. Returns a JSON object with one entry per
/// stage plus the translated system's text form.
#[wasm_bindgen]
pub fn pipeline_check(tag_source: &str, steps: u32) -> String {
    let sys = match TagSystem::parse(tag_source) {
        Ok(s) => s,
        Err(e) => return err(e),
    };
    let steps = steps as usize;
    let trans = match to_reverse_tag(&sys) {
        Ok(t) => t,
        Err(e) => return err(e),
    };
    let t1 = match check_theorem1(&sys, steps) {
        Ok(r) => r,
        Err(e) => return err(e),
    };
    let t2 = match check_theorem2(&trans.reverse, steps) {
        Ok(r) => r,
        Err(e) => return err(e),
    };
    let t3 = match check_theorem3(&trans.reverse, steps, Default::default()) {
        Ok(r) => r,
        Err(e) => return err(e),
    };
    let pipe = match simulate_via_a(&sys, steps) {
        Ok(r) => r,
        Err(e) => return err(e),
    };
    json!({
        "translated": trans.reverse.to_text(),
        "translation": {
            "passed": t1.passed(),
            "report": t1.to_text(),
        },
        "b_simulation": {
            "passed": t2.passed(),
            "checked_steps": t2.checked_steps(),
            "halted": t2.halt.is_some(),
            "report": t2.to_text(),
        },
        "a_reduction": {
            "passed": t3.passed(),
            "identity_blocks": t3.identities_checked,
            "calculable": t3.a_outcome.is_computed(),
            "report": t3.to_text(),
        },
        "pipeline": {
            "passed": pipe.passed(),
            "tag_status": pipe.tag_status.to_string(),
            "report": pipe.to_text(),
        },
    })
    .to_string()
}

/// The builtin sequence names plus their definitions, for populating the
/// page's controls.
#[wasm_bindgen]
pub fn builtins() -> String {
    let entries: Vec<Value> = BUILTINS
        .iter()
        .map(|name| {
            let def = builtin(name).expect("names come from the list");
            json!({ "name": name, "source": print_recurrence(&def) })
        })
        .collect();
    json!(entries).to_string()
}
