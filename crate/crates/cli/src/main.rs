//! Command-line front end: run the machines, translate and compile them,
//! evaluate recurrences, and check the simulation theorems on instances.
//!
//! Machine-readable output goes to stdout as TSV; diagnostics go to stderr.
//! Computational outcomes (halt, cycle, non-calculability) are status lines
//! with exit code 0; only usage/parse/IO errors (1) and failed `verify`
//! checks (2) are nonzero.

use std::error::Error;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nestrec::encode::{compile_a, compile_b, initial_conditions_tsv, AVariant};
use nestrec::gen;
use nestrec::recdsl::{builtin, parse_recurrence, print_recurrence, RecurrenceDef};
use nestrec::revtag::ReverseTagSystem;
use nestrec::seq::{CalcOutcome, SeqTable};
use nestrec::tag::{TagSystem, Trace};
use nestrec::verify::{check_theorem2, check_theorem3, simulate_via_a};
use nestrec::xlate::{check_theorem1, to_reverse_tag};

#[derive(Parser)]
#[command(
    name = "nestrec",
    version,
    about = "Tag machines, reverse tag machines, and the nested recurrences that run them"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, ValueEnum)]
enum MachineKind {
    Tag,
    Revtag,
}

#[derive(Copy, Clone, ValueEnum)]
enum Level {
    B,
    A,
}

#[derive(Copy, Clone, ValueEnum, Default)]
enum VariantOpt {
    /// The body form whose simulation argument is fully worked out.
    #[default]
    Canonical,
    /// The alternative display with the two trailing lookups exchanged.
    Swapped,
}

impl From<VariantOpt> for AVariant {
    fn from(v: VariantOpt) -> AVariant {
        match v {
            VariantOpt::Canonical => AVariant::Canonical,
            VariantOpt::Swapped => AVariant::Swapped,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum TheoremSel {
    #[value(name = "1")]
    T1,
    #[value(name = "2")]
    T2,
    #[value(name = "3")]
    T3,
    Pipeline,
}

#[derive(Copy, Clone, ValueEnum, Default, PartialEq)]
enum Format {
    #[default]
    Text,
    Tsv,
}

#[derive(Copy, Clone, ValueEnum, Default)]
enum Transform {
    #[default]
    Raw,
    /// Emit value - n/2, for plotting the fluctuation around the half line.
    MinusHalfN,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a tag or reverse tag system, printing its trace as TSV.
    Run {
        kind: MachineKind,
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// Translate a 2-tag system into a reverse tag system that simulates it.
    Translate { file: PathBuf },
    /// Compile a reverse tag system into recurrence initial conditions
    /// (TSV table, blank line, then the recurrence in DSL form).
    Compile {
        file: PathBuf,
        #[arg(long)]
        level: Level,
        #[arg(long, value_enum, default_value_t)]
        variant: VariantOpt,
    },
    /// Evaluate a recurrence (from a file or --builtin) up to an index,
    /// printing n<TAB>value rows.
    Eval {
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        builtin: Option<String>,
        #[arg(long)]
        to: u64,
    },
    /// Check a simulation theorem on an instance file or a seeded random
    /// batch; exits 0 iff every check passes.
    Verify {
        file: Option<PathBuf>,
        #[arg(long)]
        theorem: TheoremSel,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, conflicts_with = "file")]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long, value_enum, default_value_t)]
        variant: VariantOpt,
    },
    /// Emit plot-ready TSV for a builtin sequence.
    Plotdata {
        builtin: String,
        #[arg(long)]
        to: u64,
        #[arg(long, value_enum, default_value_t)]
        transform: Transform,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

type CmdResult = Result<ExitCode, Box<dyn Error>>;

fn dispatch(cmd: Cmd) -> CmdResult {
    match cmd {
        Cmd::Run { kind, file, steps } => cmd_run(kind, &file, steps),
        Cmd::Translate { file } => cmd_translate(&file),
        Cmd::Compile { file, level, variant } => cmd_compile(&file, level, variant.into()),
        Cmd::Eval { file, builtin, to } => cmd_eval(file.as_deref(), builtin.as_deref(), to),
        Cmd::Verify { file, theorem, steps, random, seed, format, variant } => {
            cmd_verify(file.as_deref(), theorem, steps, random, seed, format, variant.into())
        }
        Cmd::Plotdata { builtin, to, transform } => cmd_plotdata(&builtin, to, transform),
    }
}

/// Table cells allowed by NESTREC_MAX_MEMORY_MB (8 bytes per cell);
/// effectively unbounded when the variable is unset.
fn cell_budget() -> usize {
    match std::env::var("NESTREC_MAX_MEMORY_MB") {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(mb) => usize::try_from(mb.saturating_mul(1024 * 1024 / 8)).unwrap_or(usize::MAX),
            Err(_) => {
                eprintln!("warning: ignoring unparsable NESTREC_MAX_MEMORY_MB={v}");
                usize::MAX
            }
        },
        Err(_) => usize::MAX,
    }
}

fn read(path: &Path) -> Result<String, Box<dyn Error>> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn print_trace(
    out: &mut impl Write,
    trace: &Trace,
    render: impl Fn(usize) -> String,
) -> std::io::Result<()> {
    for i in 0..trace.len() {
        writeln!(out, "{i}\t{}", render(i))?;
    }
    writeln!(out, "status: {}", trace.status())
}

fn cmd_run(kind: MachineKind, file: &Path, steps: usize) -> CmdResult {
    let text = read(file)?;
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match kind {
        MachineKind::Tag => {
            let sys = TagSystem::parse(&text)?;
            let trace = sys.run(steps)?;
            print_trace(&mut out, &trace, |i| sys.alphabet.render(trace.word(i)))?;
        }
        MachineKind::Revtag => {
            let sys = ReverseTagSystem::parse(&text)?;
            let trace = sys.run(steps)?;
            print_trace(&mut out, &trace, |i| sys.alphabet.render(trace.word(i)))?;
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_translate(file: &Path) -> CmdResult {
    let text = read(file)?;
    let sys = TagSystem::parse(&text)?;
    let trans = to_reverse_tag(&sys)?;
    print!("{}", trans.reverse.to_text());
    Ok(ExitCode::SUCCESS)
}

fn cmd_compile(file: &Path, level: Level, variant: AVariant) -> CmdResult {
    let text = read(file)?;
    let sys = ReverseTagSystem::parse(&text)?;
    let def: RecurrenceDef = match level {
        Level::B => compile_b(&sys)?.def,
        Level::A => compile_a(&sys, variant)?.def,
    };
    print!("{}", initial_conditions_tsv(&def.initial));
    println!();
    print!("{}", print_recurrence(&def));
    Ok(ExitCode::SUCCESS)
}

fn load_recurrence(
    file: Option<&Path>,
    name: Option<&str>,
) -> Result<RecurrenceDef, Box<dyn Error>> {
    match (file, name) {
        (Some(path), None) => Ok(parse_recurrence(&read(path)?)?),
        (None, Some(name)) => Ok(builtin(name)?),
        _ => Err("pass exactly one of a recurrence file or --builtin <name>".into()),
    }
}

fn cmd_eval(file: Option<&Path>, name: Option<&str>, to: u64) -> CmdResult {
    let def = load_recurrence(file, name)?;
    let start = def.start;
    let mut table = SeqTable::with_cell_limit(def, cell_budget());
    let outcome = table.extend(to)?;
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    for n in start..=to {
        if let Some(v) = table.lookup(n) {
            writeln!(out, "{n}\t{v}")?;
        }
    }
    if let CalcOutcome::Noncalculable(w) = &outcome {
        writeln!(out, "noncalculable@{} arg={}", w.at, w.offending_arg)?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_plotdata(name: &str, to: u64, transform: Transform) -> CmdResult {
    let def = builtin(name)?;
    let start = def.start;
    let mut table = SeqTable::with_cell_limit(def, cell_budget());
    let outcome = table.extend(to)?;
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    for n in start..=to {
        let Some(v) = table.lookup(n) else { continue };
        match transform {
            Transform::Raw => writeln!(out, "{n}\t{v}")?,
            Transform::MinusHalfN => writeln!(out, "{n}\t{}", v as f64 - n as f64 / 2.0)?,
        }
    }
    if let CalcOutcome::Noncalculable(w) = &outcome {
        writeln!(out, "noncalculable@{} arg={}", w.at, w.offending_arg)?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

/// A machine file, loaded by its header line.
enum AnySystem {
    Tag(TagSystem),
    Rev(ReverseTagSystem),
}

fn load_system(path: &Path) -> Result<AnySystem, Box<dyn Error>> {
    let text = read(path)?;
    let first = text
        .lines()
        .map(|l| nestrec::tag::strip_comment(l).trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    match first {
        "tagsystem" => Ok(AnySystem::Tag(TagSystem::parse(&text)?)),
        "revtagsystem" => Ok(AnySystem::Rev(ReverseTagSystem::parse(&text)?)),
        _ => {
            Err(format!("{}: expected a `tagsystem` or `revtagsystem` header", path.display())
                .into())
        }
    }
}

fn reverse_of(sys: AnySystem) -> Result<ReverseTagSystem, Box<dyn Error>> {
    match sys {
        AnySystem::Rev(r) => Ok(r),
        AnySystem::Tag(t) => Ok(to_reverse_tag(&t)?.reverse),
    }
}

fn cmd_verify(
    file: Option<&Path>,
    theorem: TheoremSel,
    steps: usize,
    random: Option<usize>,
    seed: u64,
    format: Format,
    variant: AVariant,
) -> CmdResult {
    if let Some(count) = random {
        return verify_random_batch(count, seed, theorem, steps, format, variant);
    }
    let path = file.ok_or("pass an instance file or --random <count>")?;
    let (passed, body) = verify_one(load_system(path)?, theorem, steps, format, variant)?;
    print!("{body}");
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn verify_one(
    sys: AnySystem,
    theorem: TheoremSel,
    steps: usize,
    format: Format,
    variant: AVariant,
) -> Result<(bool, String), Box<dyn Error>> {
    let pick = |text: String, tsv: String| if format == Format::Tsv { tsv } else { text };
    match theorem {
        TheoremSel::T1 => {
            let AnySystem::Tag(t) = sys else {
                return Err("this check takes a tag system".into());
            };
            let report = check_theorem1(&t, steps)?;
            Ok((report.passed(), pick(report.to_text(), report.to_tsv())))
        }
        TheoremSel::T2 => {
            let r = reverse_of(sys)?;
            let report = check_theorem2(&r, steps)?;
            Ok((report.passed(), pick(report.to_text(), report.to_tsv())))
        }
        TheoremSel::T3 => {
            let r = reverse_of(sys)?;
            let report = check_theorem3(&r, steps, variant)?;
            Ok((report.passed(), pick(report.to_text(), report.to_tsv())))
        }
        TheoremSel::Pipeline => {
            let AnySystem::Tag(t) = sys else {
                return Err("the pipeline check takes a tag system".into());
            };
            let report = simulate_via_a(&t, steps)?;
            Ok((report.passed(), pick(report.to_text(), report.to_tsv())))
        }
    }
}

fn verify_random_batch(
    count: usize,
    seed: u64,
    theorem: TheoremSel,
    steps: usize,
    format: Format,
    variant: AVariant,
) -> CmdResult {
    let mut rng = gen::rng(seed);
    let mut all_passed = true;
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    if format == Format::Tsv {
        writeln!(out, "instance\tresult")?;
    }
    for i in 0..count {
        let sys = gen::random_tag_system(&mut rng, 4, 3, 6);
        let (passed, body) = verify_one(AnySystem::Tag(sys), theorem, steps, format, variant)?;
        all_passed &= passed;
        match format {
            Format::Tsv => writeln!(out, "{i}\t{}", if passed { "pass" } else { "fail" })?,
            Format::Text => {
                writeln!(out, "instance {i}: {}", if passed { "pass" } else { "fail" })?;
                if !passed {
                    write!(out, "{body}")?;
                }
            }
        }
    }
    writeln!(out, "result: {}", if all_passed { "pass" } else { "fail" })?;
    out.flush()?;
    Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::from(2) })
}
