use std::fs;
use std::path::PathBuf;

use dictelab::coherence::{check_all, CoherenceOptions, Outcome};
use dictelab::surface::{parse_program, parse_program_with_spans, parse_sysf, pretty_sysf_file};
use dictelab::systemf::check_sysf_file;
use dictelab::typecheck::{check_program, to_sysf, CheckOptions, TypeError};

/// Files that must be rejected, with the kind of failure.
const REJECTED: &[(&str, &str)] = &[
    ("dictapp_var_dup", "no-such-constraint"),
    ("five", "unsafe"),
    ("foo", "unsafe"),
    ("four", "parse"),
    ("rigid_sig", "unsolvable"),
    ("show_maybe_missing", "unsolvable"),
    ("three", "unsafe"),
    ("two", "unsafe"),
    ("unbound", "unbound"),
];

fn files() -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut out: Vec<(String, String)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "dict"))
        .map(|p| (p.file_stem().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

fn kind(e: &TypeError) -> &'static str {
    match e {
        TypeError::Unsafe(_) => "unsafe",
        TypeError::Unsolvable(_) => "unsolvable",
        TypeError::NoSuchConstraint { .. } => "no-such-constraint",
        TypeError::UnboundVar(_) => "unbound",
        _ => "other",
    }
}

#[test]
fn every_file_has_the_expected_outcome() {
    let files = files();
    assert!(files.len() >= 30);
    for (name, text) in &files {
        let expected = REJECTED.iter().find(|(n, _)| n == name).map(|(_, k)| *k);
        let got = match parse_program(text) {
            Err(_) => Some("parse"),
            Ok(p) => check_program(&p, &CheckOptions::default()).err().map(|e| kind(&e.error)),
        };
        assert_eq!(got, expected, "{name}");
    }
}

#[test]
fn accepted_files_elaborate_to_well_typed_sysf() {
    for (name, text) in files() {
        let Ok(p) = parse_program(&text) else { continue };
        let Ok(c) = check_program(&p, &CheckOptions::default()) else { continue };
        let file = to_sysf(&p, &c);
        check_sysf_file(&file).unwrap_or_else(|(i, e)| panic!("{name}: {i}: {e}"));
        // The printed file reads back as the same file.
        let printed = pretty_sysf_file(&file);
        assert_eq!(parse_sysf(&printed).unwrap(), file, "{name}");
    }
}

#[test]
fn guarded_corpus_is_coherent_and_deterministic() {
    let opts = CoherenceOptions::default();
    for (name, text) in files() {
        let Ok(p) = parse_program(&text) else { continue };
        if check_program(&p, &CheckOptions::default()).is_err() {
            continue;
        }
        let reports = check_all(&p, &opts);
        for r in &reports {
            assert!(
                matches!(r.outcome, Outcome::Coherent | Outcome::Skipped(_)),
                "{name}/{}: {:?}",
                r.item,
                r.outcome
            );
        }
        assert_eq!(reports, check_all(&p, &opts), "{name}");
    }
}

#[test]
fn rejections_point_at_the_offending_item() {
    let (p, spans) = parse_program_with_spans(&files().into_iter().find(|(n, _)| n == "two").unwrap().1).unwrap();
    let e = check_program(&p, &CheckOptions::default()).unwrap_err();
    assert_eq!(e.item, "use");
    assert!(e.is_check);
    let span = spans.check("use");
    assert_eq!((span.line, span.col), (31, 1));
}
