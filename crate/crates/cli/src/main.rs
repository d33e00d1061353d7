use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use dictelab::coherence::{check_all, CoherenceOptions, CoherenceReport, Outcome, SkipReason};
use dictelab::entailment::Bounds;
use dictelab::surface::{parse_program_with_spans, parse_sysf, pretty_sysf_file, Program, SourceMap, SysfFile, SysfItem};
use dictelab::syntax::TargetTerm;
use dictelab::systemf::{check_sysf_file, erase, inline_defs, normalize, DEFAULT_FUEL};
use dictelab::typecheck::{
    check_program, is_unambiguous, to_sysf, CheckOptions, CheckedProgram, ItemError, Verdict,
};

const OK: u8 = 0;
const TYPE_ERROR: u8 = 1;
const USAGE: u8 = 2;
const BOUND: u8 = 3;

#[derive(Parser)]
#[command(name = "dictelab", version, about = "Type classes with explicit dictionary application, elaborated to System F")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Typecheck a .dict program and print the scheme of every item.
    Check {
        path: PathBuf,
        #[command(flatten)]
        guard: GuardArgs,
        /// Print the result as JSON.
        #[arg(long)]
        json: bool,
        /// Show safety verdicts and instance resolution steps.
        #[arg(long)]
        explain: bool,
    },
    /// Elaborate a .dict program to a .sysf file.
    Elaborate {
        path: PathBuf,
        #[command(flatten)]
        guard: GuardArgs,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether two .sysf files denote the same terms.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
    },
    /// Compare alternative elaborations of every `check` item.
    Coherence {
        path: PathBuf,
        #[command(flatten)]
        guard: GuardArgs,
        /// Maximum number of derivations per item.
        #[arg(long, default_value_t = dictelab::coherence::DEFAULT_LIMIT)]
        limit: usize,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print one JSON record per item.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct GuardArgs {
    /// Disable the safety check on dictionary applications.
    #[arg(long = "unsafe")]
    no_guard: bool,
    /// Rounds of forward derivation explored by the safety check.
    #[arg(long, default_value_t = dictelab::entailment::DEFAULT_CLOSURE_DEPTH)]
    closure_depth: usize,
}

impl GuardArgs {
    fn options(&self) -> CheckOptions {
        CheckOptions {
            bounds: Bounds {
                closure_depth: self.closure_depth,
                ..Bounds::default()
            },
            guard: !self.no_guard,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    let code = match cli.command {
        Command::Check {
            path,
            guard,
            json,
            explain,
        } => cmd_check(&path, &guard.options(), json, explain),
        Command::Elaborate { path, guard, out } => cmd_elaborate(&path, &guard.options(), out.as_deref()),
        Command::Equiv { a, b, fuel } => cmd_equiv(&a, &b, fuel),
        Command::Coherence {
            path,
            guard,
            limit,
            fuel,
            seed,
            json,
        } => {
            if limit == 0 {
                eprintln!("error: --limit must be at least 1");
                USAGE
            } else {
                let opts = CoherenceOptions {
                    check: guard.options(),
                    limit,
                    seed,
                    fuel,
                };
                cmd_coherence(&path, &opts, json)
            }
        }
    };
    ExitCode::from(code)
}

fn read(path: &Path) -> Result<String, u8> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        USAGE
    })
}

fn load(path: &Path) -> Result<(Program, SourceMap), u8> {
    let text = read(path)?;
    parse_program_with_spans(&text).map_err(|e| {
        eprintln!("{}:{e}", path.display());
        USAGE
    })
}

/// `path:line:col: in `item`: message`, and the matching exit code.
fn report_item_error(path: &Path, spans: &SourceMap, e: &ItemError) -> u8 {
    let span = if e.is_check {
        spans.check(&e.item)
    } else {
        spans.def(&e.item)
    };
    eprintln!("{}:{}:{}: {e}", path.display(), span.line, span.col);
    if e.error.is_bound_exceeded() {
        BOUND
    } else {
        TYPE_ERROR
    }
}

fn item_error_json(spans: &SourceMap, e: &ItemError) -> Value {
    let span = if e.is_check {
        spans.check(&e.item)
    } else {
        spans.def(&e.item)
    };
    json!({
        "item": e.item,
        "line": span.line,
        "col": span.col,
        "message": e.error.to_string(),
        "bound_exceeded": e.error.is_bound_exceeded(),
    })
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Safe => "safe",
        Verdict::Unsafe => "unsafe",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn cmd_check(path: &Path, opts: &CheckOptions, json: bool, explain: bool) -> u8 {
    let (program, spans) = match load(path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let result = check_program(&program, opts);
    let checked = match &result {
        Ok(c) => c.clone(),
        Err(e) => {
            let code = report_item_error(path, &spans, e);
            if json {
                let out = json!({
                    "file": path.display().to_string(),
                    "ok": false,
                    "items": [],
                    "error": item_error_json(&spans, e),
                });
                println!("{out}");
            }
            return code;
        }
    };
    for item in checked.items.iter().filter(|i| !is_unambiguous(&i.elab.scheme)) {
        eprintln!(
            "{}: warning: `{}` has the ambiguous type {}",
            path.display(),
            item.name,
            item.elab.scheme
        );
    }
    if json {
        let items: Vec<Value> = checked
            .items
            .iter()
            .map(|i| {
                json!({
                    "name": i.name,
                    "kind": if i.is_check { "check" } else { "def" },
                    "scheme": i.elab.scheme.to_string(),
                    "ambiguous": !is_unambiguous(&i.elab.scheme),
                    "safety": i.elab.safety.iter().map(|r| json!({
                        "constraint": r.at.to_string(),
                        "verdict": verdict_name(r.verdict),
                        "closure_truncated": r.closure_truncated,
                    })).collect::<Vec<_>>(),
                    "steps": i.elab.steps.iter().map(|(c, steps)| json!({
                        "constraint": c.to_string(),
                        "steps": steps.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        let out = json!({
            "file": path.display().to_string(),
            "ok": true,
            "items": items,
            "error": Value::Null,
        });
        println!("{out}");
        return OK;
    }
    for i in &checked.items {
        println!("{} : {}", i.name, i.elab.scheme);
        if explain {
            for r in &i.elab.safety {
                println!("  {r}");
            }
            for (c, steps) in &i.elab.steps {
                let steps: Vec<String> = steps.iter().map(|s| s.to_string()).collect();
                println!("  solved {c}: {}", steps.join("; "));
            }
        }
    }
    OK
}

fn cmd_elaborate(path: &Path, opts: &CheckOptions, out: Option<&Path>) -> u8 {
    let (program, spans) = match load(path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let checked: CheckedProgram = match check_program(&program, opts) {
        Ok(c) => c,
        Err(e) => return report_item_error(path, &spans, &e),
    };
    let text = pretty_sysf_file(&to_sysf(&program, &checked));
    match out {
        Some(target) => match fs::write(target, &text) {
            Ok(()) => OK,
            Err(e) => {
                eprintln!("{}: {e}", target.display());
                USAGE
            }
        },
        None => {
            print!("{text}");
            OK
        }
    }
}

fn load_sysf(path: &Path) -> Result<SysfFile, u8> {
    let text = read(path)?;
    let file = parse_sysf(&text).map_err(|e| {
        eprintln!("{}:{e}", path.display());
        USAGE
    })?;
    if let Err((item, e)) = check_sysf_file(&file) {
        // Equivalence is decided on erased terms; report but carry on.
        eprintln!("{}: warning: in `{item}`: {e}", path.display());
    }
    Ok(file)
}

/// The terms a file is compared by: its main term, or else every def.
fn comparands(file: &SysfFile) -> Vec<(String, TargetTerm)> {
    match &file.main {
        Some(main) => vec![("main".to_string(), inline_defs(file, main))],
        None => file
            .items
            .iter()
            .filter_map(|i| match i {
                SysfItem::Def(name, _, body) => Some((name.clone(), inline_defs(file, body))),
                SysfItem::Val(..) => None,
            })
            .collect(),
    }
}

fn cmd_equiv(a: &Path, b: &Path, fuel: usize) -> u8 {
    let (fa, fb) = match (load_sysf(a), load_sysf(b)) {
        (Ok(fa), Ok(fb)) => (fa, fb),
        (Err(code), _) | (_, Err(code)) => return code,
    };
    let (ca, cb) = (comparands(&fa), comparands(&fb));
    let names = |c: &[(String, TargetTerm)]| c.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>();
    if names(&ca) != names(&cb) {
        println!("different definitions: {:?} vs {:?}", names(&ca), names(&cb));
        return TYPE_ERROR;
    }
    let mut code = OK;
    for ((name, ta), (_, tb)) in ca.iter().zip(&cb) {
        let (na, nb) = match (normalize(&erase(ta), fuel), normalize(&erase(tb), fuel)) {
            (Ok(na), Ok(nb)) => (na, nb),
            (Err(e), _) | (_, Err(e)) => {
                eprintln!("{name}: {e}");
                return BOUND;
            }
        };
        if na != nb {
            println!("{name} differs:\n  {}: {na}\n  {}: {nb}", a.display(), b.display());
            code = TYPE_ERROR;
        }
    }
    if code == OK {
        println!("equivalent");
    }
    code
}

fn report_json(r: &CoherenceReport) -> Value {
    let (verdict, detail) = match &r.outcome {
        Outcome::Coherent => ("coherent", Value::Null),
        Outcome::Incoherent {
            first,
            second,
            first_nf,
            second_nf,
        } => (
            "incoherent",
            json!({
                "first": first.to_string(),
                "second": second.to_string(),
                "first_nf": first_nf.to_string(),
                "second_nf": second_nf.to_string(),
            }),
        ),
        Outcome::Inconclusive(why) => ("inconclusive", json!({ "reason": why })),
        Outcome::Skipped(why) => (
            "skipped",
            json!({
                "reason": why.to_string(),
                "kind": match why {
                    SkipReason::Ambiguous(_) => "ambiguous",
                    SkipReason::Rejected(e) if matches!(e.error, dictelab::typecheck::TypeError::Unsafe(_)) => "safety",
                    SkipReason::Rejected(_) => "rejected",
                },
            }),
        ),
    };
    json!({
        "item": r.item,
        "verdict": verdict,
        "derivations": r.compared,
        "truncated": r.truncated,
        "detail": detail,
    })
}

fn report_text(r: &CoherenceReport) -> String {
    let trunc = if r.truncated { ", limit reached" } else { "" };
    match &r.outcome {
        Outcome::Coherent => format!("{}: coherent ({} derivations{trunc})", r.item, r.compared),
        Outcome::Incoherent {
            first,
            second,
            first_nf,
            second_nf,
        } => format!(
            "{}: incoherent ({} derivations{trunc})\n  {first}: {first_nf}\n  {second}: {second_nf}",
            r.item, r.compared
        ),
        Outcome::Inconclusive(why) => format!("{}: inconclusive: {why}", r.item),
        Outcome::Skipped(why) => format!("{}: skipped: {why}", r.item),
    }
}

fn cmd_coherence(path: &Path, opts: &CoherenceOptions, json: bool) -> u8 {
    let (program, _) = match load(path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let reports = check_all(&program, opts);
    for r in &reports {
        if json {
            println!("{}", report_json(r));
        } else {
            println!("{}", report_text(r));
        }
    }
    if reports.iter().any(|r| matches!(r.outcome, Outcome::Incoherent { .. })) {
        TYPE_ERROR
    } else if reports.iter().any(|r| matches!(r.outcome, Outcome::Inconclusive(_))) {
        BOUND
    } else {
        OK
    }
}
