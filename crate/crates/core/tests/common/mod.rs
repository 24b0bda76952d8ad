//! Corpus cases shared by the golden and acceptance targets.

use std::fs;
use std::path::{Path, PathBuf};

use wtakit::cli::run;
use wtakit::text::{parse_wta, print_wta};

pub fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub struct Case {
    pub args: Vec<String>,
    pub exit: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn read_case(path: &Path) -> Case {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let args = lines.next().and_then(|l| l.strip_prefix("args: ")).expect("args line");
    let exit = lines
        .next()
        .and_then(|l| l.strip_prefix("exit: "))
        .and_then(|c| c.parse().ok())
        .expect("exit line");
    assert_eq!(lines.next(), Some("--- stdout"));
    let (mut stdout, mut stderr) = (String::new(), String::new());
    let mut in_err = false;
    for l in lines {
        if l == "--- stderr" {
            in_err = true;
            continue;
        }
        let buf = if in_err { &mut stderr } else { &mut stdout };
        buf.push_str(l);
        buf.push('\n');
    }
    let dir = corpus();
    let args = args
        .split_whitespace()
        .map(|a| {
            if a.ends_with(".wta") || a.ends_with(".mat") {
                dir.join(a).display().to_string()
            } else {
                a.to_string()
            }
        })
        .collect();
    Case { args, exit, stdout, stderr }
}

pub fn case_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(corpus().join("cases"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "case"))
        .collect();
    files.sort();
    files
}

/// Runs every case; returns the number of cases and one message per mismatch.
pub fn check_cases() -> (usize, Vec<String>) {
    let prefix = format!("{}/", corpus().display());
    let mut failures = Vec::new();
    let files = case_files();
    for path in &files {
        let case = read_case(path);
        let argv = std::iter::once("wtakit".to_string()).chain(case.args.iter().cloned());
        let out = run(argv.clone());
        let stderr = out.stderr.replace(&prefix, "");
        if out.code != case.exit || out.stdout != case.stdout || stderr != case.stderr {
            failures.push(format!(
                "{}: exit {} stdout:\n{}stderr:\n{}",
                path.display(),
                out.code,
                out.stdout,
                stderr
            ));
        }
        if run(argv) != out {
            failures.push(format!("{} is not byte-stable", path.display()));
        }
    }
    (files.len(), failures)
}

/// Parses, prints and reparses every corpus automaton; returns the number of
/// files and one message per failure.
pub fn check_round_trips() -> (usize, Vec<String>) {
    let mut failures = Vec::new();
    let mut count = 0;
    let mut paths: Vec<PathBuf> = fs::read_dir(corpus()).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    for path in paths {
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        if !name.ends_with(".wta") {
            continue;
        }
        count += 1;
        let text = fs::read_to_string(&path).unwrap();
        if name.starts_with("bad_") {
            if parse_wta(&text).is_ok() {
                failures.push(format!("{name} should be rejected"));
            }
            continue;
        }
        let m = match parse_wta(&text) {
            Ok(m) => m,
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        let printed = print_wta(&m);
        if parse_wta(&printed).as_ref() != Ok(&m) {
            failures.push(format!("{name} does not round-trip"));
        }
        // corpus files are canonical apart from comment lines
        let stripped: String = text
            .lines()
            .filter(|l| !l.trim_start().starts_with('#'))
            .map(|l| format!("{l}\n"))
            .collect();
        if printed != stripped {
            failures.push(format!("{name} is not canonical"));
        }
    }
    (count, failures)
}
