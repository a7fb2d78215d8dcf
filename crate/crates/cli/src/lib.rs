//! The `rowpoly` command: typecheck files, run an interactive prompt, or
//! check the row unifier against brute-force enumeration.
//!
//! Everything writes to caller-supplied streams so tests can drive the
//! commands without spawning a process.

use std::ffi::OsString;
use std::io::{self, BufRead, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use clap::{Args, Parser, Subcommand};

use rowpoly::oracle::{run_campaign, GroundSpace, RowUnifier};
use rowpoly::{infer_program, unify_rows, InferOptions};

/// Process exit status. The numeric codes are part of the interface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitStatus {
    Success,
    /// A parse, kind or type error in some input.
    Failure,
    /// Bad arguments or unreadable input.
    Usage,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Failure => 1,
            ExitStatus::Usage => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "rowpoly",
    version,
    about = "Typechecker for a small language with extensible records"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Typecheck each file and print its principal type.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Read terms from standard input, one per line, and print their types.
    Repl,
    /// Compare the row unifier against brute-force enumeration.
    Oracle(OracleArgs),
}

#[derive(Clone, Debug, Args)]
pub struct OracleArgs {
    /// Size of the label alphabet.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(1..=16))]
    pub labels: u8,
    /// Number of base types.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=15))]
    pub types: u8,
    /// Largest number of fields in a ground row.
    #[arg(long, default_value_t = 3)]
    pub max_size: usize,
    /// Random problems to run after the exhaustive set.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Seed for the random problems.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl Default for OracleArgs {
    fn default() -> Self {
        OracleArgs {
            labels: 4,
            types: 3,
            max_size: 3,
            samples: 10_000,
            seed: 0,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(
    args: I,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() {
                ExitStatus::Usage
            } else {
                ExitStatus::Success
            };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return status;
        }
    };
    let result = match cli.command {
        Command::Check { files } => cmd_check(&files, out, err),
        Command::Repl => cmd_repl(input, out, io::stdin().is_terminal()),
        Command::Oracle(args) => cmd_oracle(&args, &unify_rows, out, err),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "rowpoly: {e}");
        ExitStatus::Usage
    })
}

/// What checking one file printed, and how it went.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileReport {
    pub stdout: String,
    pub stderr: String,
    pub status: ExitStatus,
}

/// Typechecks the source text of one file. Paths appear in the output as given.
pub fn check_source(path: &Path, src: &str) -> FileReport {
    let shown = path.display();
    match infer_program(src, &InferOptions::default()) {
        Ok(scheme) => FileReport {
            stdout: format!("{shown}: {scheme}\n"),
            stderr: String::new(),
            status: ExitStatus::Success,
        },
        Err(e) => {
            let span = e.span();
            FileReport {
                stdout: String::new(),
                stderr: format!("{shown}:{}:{}: error: {e}\n", span.line, span.column),
                status: ExitStatus::Failure,
            }
        }
    }
}

pub fn check_file(path: &Path) -> FileReport {
    match std::fs::read_to_string(path) {
        Ok(src) => check_source(path, &src),
        Err(e) => FileReport {
            stdout: String::new(),
            stderr: format!("{}: error: cannot read file: {e}\n", path.display()),
            status: ExitStatus::Usage,
        },
    }
}

/// Checks every file, in parallel, and prints the reports in argument order.
/// The status is the worst of the per-file statuses.
pub fn cmd_check(
    paths: &[PathBuf],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<ExitStatus> {
    let reports = check_all(paths);
    let mut status = ExitStatus::Success;
    for report in reports {
        out.write_all(report.stdout.as_bytes())?;
        err.write_all(report.stderr.as_bytes())?;
        status = status.max(report.status);
    }
    out.flush()?;
    Ok(status)
}

fn check_all(paths: &[PathBuf]) -> Vec<FileReport> {
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(paths.len());
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<FileReport>>> = Mutex::new(vec![None; paths.len()]);
    thread::scope(|scope| {
        for _ in 0..workers {
            // Deeply nested programs recurse deeply in the parser and checker.
            thread::Builder::new()
                .stack_size(64 << 20)
                .spawn_scoped(scope, || loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(path) = paths.get(i) else { break };
                    let report = check_file(path);
                    slots.lock().unwrap()[i] = Some(report);
                })
                .expect("spawn checker thread");
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every file checked"))
        .collect()
}

/// Answers one line of REPL input, or `None` if the session should end.
pub fn repl_line(line: &str) -> Option<String> {
    let line = line.trim();
    if line == ":quit" || line == ":q" {
        return None;
    }
    let (src, offset) = match line.strip_prefix(":type") {
        Some(rest) if rest.is_empty() || rest.starts_with(char::is_whitespace) => {
            let trimmed = rest.trim_start();
            (trimmed, line.len() - trimmed.len())
        }
        _ if line.starts_with(':') => {
            let cmd = line.split_whitespace().next().unwrap_or(line);
            return Some(format!(
                "error: unknown command `{cmd}`; try :type or :quit"
            ));
        }
        _ => (line, 0),
    };
    Some(match infer_program(src, &InferOptions::default()) {
        Ok(scheme) => scheme.to_string(),
        Err(e) => {
            let span = e.span();
            let column = span.column as usize + if span.line == 1 { offset } else { 0 };
            format!("{}:{column}: error: {e}", span.line)
        }
    })
}

/// Reads terms one per line until `:quit` or end of input. A prompt is shown
/// only when `prompt` is set.
pub fn cmd_repl(
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    prompt: bool,
) -> io::Result<ExitStatus> {
    let mut line = String::new();
    loop {
        if prompt {
            write!(out, "> ")?;
            out.flush()?;
        }
        line.clear();
        if input.read_line(&mut line)? == 0 {
            break;
        }
        if line.trim().is_empty() {
            continue;
        }
        match repl_line(&line) {
            Some(answer) => writeln!(out, "{answer}")?,
            None => break,
        }
    }
    out.flush()?;
    Ok(ExitStatus::Success)
}

/// Runs the oracle campaign against `unifier`. Succeeds iff there are no
/// disagreements.
pub fn cmd_oracle(
    args: &OracleArgs,
    unifier: &RowUnifier<'_>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<ExitStatus> {
    let space = match GroundSpace::sized(args.labels.into(), args.types.into(), args.max_size) {
        Ok(space) => space,
        Err(e) => {
            writeln!(err, "rowpoly: {e}")?;
            return Ok(ExitStatus::Usage);
        }
    };
    let report = run_campaign(&space, args.samples, args.seed, unifier);
    writeln!(
        out,
        "{} exhaustive and {} sampled (seed {}) over {} labels, {} base types, rows of at most {} fields",
        report.exhaustive, report.sampled, args.seed, args.labels, args.types, args.max_size
    )?;
    writeln!(
        out,
        "{} problems, {} failures",
        report.problems(),
        report.failures
    )?;
    if let Some((problem, verdict)) = &report.first_counterexample {
        writeln!(out, "first counterexample: {problem}")?;
        writeln!(out, "  {verdict}")?;
    }
    out.flush()?;
    Ok(if report.failures == 0 {
        ExitStatus::Success
    } else {
        ExitStatus::Failure
    })
}
