use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use rowpoly::oracle::RowUnifier;
use rowpoly::{unify_rows, Subst};
use rowpoly_cli::{check_source, cmd_oracle, repl_line, run, ExitStatus, OracleArgs};

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

fn rowpoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rowpoly"))
        .args(args)
        .current_dir(corpus_dir())
        .output()
        .unwrap()
}

fn text(bytes: &[u8]) -> &str {
    std::str::from_utf8(bytes).unwrap()
}

#[test]
fn corpus_matches_goldens() {
    let mut checked = 0;
    for sub in ["", "kind"] {
        for entry in fs::read_dir(corpus_dir().join(sub)).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_none_or(|e| e != "rp") {
                continue;
            }
            let shown = Path::new(sub).join(path.file_name().unwrap());
            let report = check_source(&shown, &fs::read_to_string(&path).unwrap());
            let expected = fs::read_to_string(path.with_extension("expected")).unwrap();
            assert_eq!(
                report.stdout + &report.stderr,
                expected,
                "{}",
                shown.display()
            );
            checked += 1;
        }
    }
    assert!(checked >= 40);
}

#[test]
fn check_prints_schemes_and_exits_zero() {
    let out = rowpoly(&["check", "identity.rp", "record_literal.rp"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        text(&out.stdout),
        "identity.rp: ∀a:*. a -> a\nrecord_literal.rp: Rec {age:Int, name:String}\n"
    );
    assert!(out.stderr.is_empty());
}

#[test]
fn type_errors_exit_one_with_location() {
    let out = rowpoly(&["check", "missing_label.rp"]);
    assert_eq!(out.status.code(), Some(1));
    let err = text(&out.stderr);
    assert!(err.starts_with("missing_label.rp:1:1: error: "), "{err}");
    assert!(err.contains("missing label `name`"), "{err}");
}

#[test]
fn every_file_is_processed_in_argument_order() {
    let out = rowpoly(&[
        "check",
        "occurs.rp",
        "identity.rp",
        "kind/rec_of_star.rp",
        "compose.rp",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(
        text(&out.stdout),
        "identity.rp: ∀a:*. a -> a\ncompose.rp: ∀a:*. ∀b:*. ∀c:*. (a -> b) -> (c -> a) -> c -> b\n"
    );
    let errors: Vec<&str> = text(&out.stderr).lines().collect();
    assert_eq!(errors.len(), 2);
    assert!(errors[0].starts_with("occurs.rp:1:5: error: infinite type"));
    assert!(errors[1].starts_with("kind/rec_of_star.rp:1:1: error: ill-kinded annotation"));
}

#[test]
fn unreadable_files_are_usage_errors() {
    let out = rowpoly(&["check", "identity.rp", "no/such/file.rp", "occurs.rp"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(text(&out.stdout), "identity.rp: ∀a:*. a -> a\n");
    assert!(text(&out.stderr).contains("no/such/file.rp: error: cannot read file"));
    assert!(text(&out.stderr).contains("occurs.rp:1:5"));
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(rowpoly(&[]).status.code(), Some(2));
    assert_eq!(rowpoly(&["check"]).status.code(), Some(2));
    assert_eq!(rowpoly(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(rowpoly(&["oracle", "--labels", "0"]).status.code(), Some(2));
    assert_eq!(
        rowpoly(&["oracle", "--samples", "many"]).status.code(),
        Some(2)
    );
    let help = rowpoly(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(text(&help.stdout).contains("check"));
}

#[test]
fn run_reports_status_without_a_process() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let dir = corpus_dir();
    let file = dir.join("let_poly.rp");
    let status = run(
        ["rowpoly".as_ref(), "check".as_ref(), file.as_os_str()],
        &mut &b""[..],
        &mut out,
        &mut err,
    );
    assert_eq!(status, ExitStatus::Success);
    assert!(text(&out).ends_with("let_poly.rp: Rec {fst:Int, snd:String}\n"));
    assert_eq!(ExitStatus::Usage.code(), 2);
    assert_eq!(ExitStatus::Failure.code(), 1);
}

fn repl_session(input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_rowpoly"))
        .arg("repl")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn repl_answers_each_line() {
    let out = repl_session(concat!(
        "\\x. x\n",
        "let f = \\r. r.name in f {name = \"a\", age = 1}\n",
        "\n",
        ":type \\x. x x\n",
        ":quit\n",
        "1\n",
    ));
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<&str> = text(&out.stdout).lines().collect();
    assert_eq!(lines.len(), 3, "{lines:?}");
    assert_eq!(lines[0], "∀a:*. a -> a");
    assert_eq!(lines[1], "String");
    assert!(
        lines[2].starts_with("1:11: error: infinite type"),
        "{}",
        lines[2]
    );
}

#[test]
fn repl_ends_at_end_of_input() {
    let out = repl_session("{a = 1}");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(text(&out.stdout), "Rec {a:Int}\n");
}

#[test]
fn type_prefix_is_optional() {
    for src in [
        "\\r. r - x",
        "{a = 1 | {b = 2}}",
        "(\\x. x : ∀a:*. a -> a)",
        "1 2",
    ] {
        assert_eq!(
            repl_line(src),
            repl_line(&format!(":type {src}")).map(|s| s.replace("1:7", "1:1"))
        );
    }
    assert_eq!(repl_line(":quit"), None);
    assert!(repl_line(":what").unwrap().contains("unknown command"));
    assert!(repl_line("\\x.").unwrap().contains("error"));
}

#[test]
fn oracle_passes_by_default() {
    let out = rowpoly(&["oracle"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(
        text(&out.stdout).contains("193750 problems, 0 failures"),
        "{}",
        text(&out.stdout)
    );
}

#[test]
fn oracle_with_empty_rows_only() {
    let out = rowpoly(&["oracle", "--max-size", "0", "--samples", "50"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(
        text(&out.stdout).contains("56 problems, 0 failures"),
        "{}",
        text(&out.stdout)
    );
}

#[test]
fn oracle_catches_a_broken_unifier() {
    // Treats every row as closed, so open rows lose their solutions.
    let broken: &RowUnifier = &|l, r, supply| {
        let closed = |row: &rowpoly::RowType| rowpoly::RowType {
            tail: None,
            ..row.clone()
        };
        unify_rows(&closed(l), &closed(r), supply).map(|_: Subst| Subst::empty())
    };
    let args = OracleArgs {
        labels: 3,
        types: 2,
        max_size: 2,
        samples: 100,
        seed: 1,
    };
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let status = cmd_oracle(&args, broken, &mut out, &mut err).unwrap();
    assert_eq!(status, ExitStatus::Failure);
    let out = text(&out);
    assert!(out.contains("first counterexample: "), "{out}");
    assert!(!out.contains(" 0 failures"), "{out}");

    let (mut out, mut err) = (Vec::new(), Vec::new());
    let status = cmd_oracle(&args, &unify_rows, &mut out, &mut err).unwrap();
    assert_eq!(status, ExitStatus::Success);
}
