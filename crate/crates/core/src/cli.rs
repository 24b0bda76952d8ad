//! The `wtakit` command line.
//!
//! [`run`] takes the argument vector and returns the exit code together with
//! everything destined for stdout and stderr, so the driver is testable
//! without spawning processes. Exit codes: `0` success or the property holds,
//! `1` the property fails (not equivalent, not a simulation, nothing found),
//! `2` usage or input error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::constructions::{hadamard_wta, sigma_product_wta, sigma_star_wta, sum_wta};
use crate::error::{Error, Result};
use crate::jointred::{decide_equiv, joint_reduce, Verdict};
use crate::semiring::Semiring;
use crate::simulation::{check_simulation, decompose_simulation, find_backward, find_forward, function_matrix};
use crate::text::{parse_matrix, parse_wta, print_matrix, print_wta};
use crate::wta::{SeriesTable, Tree, Wta};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "wtakit", version, about = "Weighted tree automata over exact semirings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weight of a tree.
    Eval {
        #[arg(short = 'a')]
        a: PathBuf,
        #[arg(short = 't', long = "tree")]
        tree: String,
    },
    /// Weights of all trees up to a size.
    Enumerate {
        #[arg(short = 'a')]
        a: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        /// Only list trees with nonzero weight.
        #[arg(long)]
        nonzero: bool,
    },
    /// The Boolean support automaton.
    Support {
        #[arg(short = 'a')]
        a: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Remove states that are not accessible and co-accessible.
    Trim {
        #[arg(short = 'a')]
        a: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Check that a transfer matrix is a simulation from A to B.
    CheckSim {
        #[arg(short = 'a')]
        a: PathBuf,
        #[arg(short = 'b')]
        b: PathBuf,
        #[arg(short = 'x')]
        x: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Search a forward simulation from A to B.
    FindFsim {
        #[arg(short = 'a')]
        a: PathBuf,
        #[arg(short = 'b')]
        b: PathBuf,
    },
    /// Search a backward simulation from A to B.
    FindBsim {
        #[arg(short = 'a')]
        a: PathBuf,
        #[arg(short = 'b')]
        b: PathBuf,
    },
    /// Split a simulation into forward, diagonal and backward steps.
    DecomposeSim {
        #[arg(short = 'a')]
        a: PathBuf,
        #[arg(short = 'b')]
        b: PathBuf,
        #[arg(short = 'x')]
        x: PathBuf,
        /// Write c.mat, e.mat, d.mat, m_prime.wta and n_prime.wta here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Sum of two automata.
    Sum {
        #[arg(short = 'a')]
        a: PathBuf,
        #[arg(short = 'b')]
        b: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Hadamard product of two automata.
    Hadamard {
        #[arg(short = 'a')]
        a: PathBuf,
        #[arg(short = 'b')]
        b: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Substitution product at a nullary symbol.
    S0Product {
        #[arg(short = 'a')]
        a: PathBuf,
        #[arg(short = 'b')]
        b: PathBuf,
        #[arg(long)]
        symbol: String,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Iteration at a nullary symbol.
    S0Star {
        #[arg(short = 'a')]
        a: PathBuf,
        #[arg(long)]
        symbol: String,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Decide whether two automata compute the same series.
    Equiv {
        #[arg(short = 'a')]
        a: PathBuf,
        #[arg(short = 'b')]
        b: PathBuf,
        #[arg(long)]
        emit_joiner: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Read Boolean inputs as 0/1 automata over the naturals.
        #[arg(long)]
        via_nat: bool,
    },
    /// Generators of the joint reduction and the joining automaton.
    JointReduce {
        #[arg(short = 'a')]
        a: PathBuf,
        #[arg(short = 'b')]
        b: PathBuf,
        #[arg(long)]
        via_nat: bool,
    },
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(message: String) -> Self {
        Outcome {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr: message,
        }
    }
}

/// Runs one command. `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome::ok(EXIT_OK, text),
                _ => Outcome::error(text),
            };
        }
    };
    match dispatch(cli.command) {
        Ok(o) => o,
        Err(e) => Outcome::error(format!("error: {e}\n")),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Wta> {
    parse_wta(&read_text(path)?).map_err(|e| match e {
        Error::Parse { line, column, message } => Error::Input(format!("{}:{line}:{column}: {message}", path.display())),
        other => other,
    })
}

fn load_matrix(path: &Path, a: &Wta, b: &Wta) -> Result<crate::Matrix> {
    parse_matrix(&read_text(path)?, a.states(), b.states(), a.semiring()).map_err(|e| match e {
        Error::Parse { line, column, message } => Error::Input(format!("{}:{line}:{column}: {message}", path.display())),
        other => other,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// Prints an automaton to stdout or writes it to `out`.
fn emit(text: String, out: Option<PathBuf>) -> Result<Outcome> {
    match out {
        Some(p) => {
            write_file(&p, &text)?;
            Ok(Outcome::ok(EXIT_OK, String::new()))
        }
        None => Ok(Outcome::ok(EXIT_OK, text)),
    }
}

fn via_nat(m: Wta, enabled: bool) -> Result<Wta> {
    if enabled && m.semiring() == Semiring::Bool {
        m.embed(Semiring::Nat)
    } else {
        Ok(m)
    }
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Eval { a, tree } => {
            let m = load(&a)?;
            let t: Tree = tree.parse()?;
            Ok(Outcome::ok(EXIT_OK, format!("{}\n", m.eval(&t)?)))
        }
        Command::Enumerate { a, max_size, nonzero } => {
            let m = load(&a)?;
            let mut out = String::new();
            for (t, w) in SeriesTable::new(&m, max_size).entries() {
                if !nonzero || !w.is_zero() {
                    let _ = writeln!(out, "{t} : {w}");
                }
            }
            Ok(Outcome::ok(EXIT_OK, out))
        }
        Command::Support { a, out } => emit(print_wta(&load(&a)?.support()), out),
        Command::Trim { a, out } => {
            let (t, removed) = load(&a)?.trim();
            let mut text = String::new();
            if !removed.is_empty() {
                let _ = writeln!(text, "# removed: {}", removed.join(" "));
            }
            text.push_str(&print_wta(&t));
            emit(text, out)
        }
        Command::CheckSim { a, b, x, json } => {
            let (m, n) = (load(&a)?, load(&b)?);
            let x = load_matrix(&x, &m, &n)?;
            let report = check_simulation(&m, &n, &x)?;
            let code = if report.holds() { EXIT_OK } else { EXIT_FAILS };
            let text = if json {
                let v = json!({
                    "holds": report.holds(),
                    "violation": report.violation.as_ref().map(|v| v.to_string()),
                });
                format!("{v}\n")
            } else {
                match &report.violation {
                    None => "simulation holds\n".to_string(),
                    Some(v) => format!("not a simulation: {v}\n"),
                }
            };
            Ok(Outcome::ok(code, text))
        }
        Command::FindFsim { a, b } => {
            let (m, n) = (load(&a)?, load(&b)?);
            match find_forward(&m, &n)? {
                Some(rho) => Ok(Outcome::ok(EXIT_OK, print_map(&m, &n, &rho, function_matrix(&m, &n, &rho)?))),
                None => Ok(Outcome::ok(EXIT_FAILS, "no forward simulation\n".into())),
            }
        }
        Command::FindBsim { a, b } => {
            let (m, n) = (load(&a)?, load(&b)?);
            // ρ maps the states of B onto those of A; A simulates into B by X_ρᵀ.
            match find_backward(&n, &m)? {
                Some(rho) => {
                    let x = function_matrix(&n, &m, &rho)?.transpose();
                    Ok(Outcome::ok(EXIT_OK, print_map(&n, &m, &rho, x)))
                }
                None => Ok(Outcome::ok(EXIT_FAILS, "no backward simulation\n".into())),
            }
        }
        Command::DecomposeSim { a, b, x, out_dir } => {
            let (m, n) = (load(&a)?, load(&b)?);
            let x = load_matrix(&x, &m, &n)?;
            let d = decompose_simulation(&m, &n, &x)?;
            let files = [
                ("c.mat", print_matrix(&d.c)),
                ("e.mat", print_matrix(&d.e)),
                ("d.mat", print_matrix(&d.d)),
                ("m_prime.wta", print_wta(&d.m_prime)),
                ("n_prime.wta", print_wta(&d.n_prime)),
            ];
            let mut out = String::new();
            match out_dir {
                Some(dir) => {
                    fs::create_dir_all(&dir).map_err(|e| Error::Input(format!("{}: {e}", dir.display())))?;
                    for (name, text) in &files {
                        let path = dir.join(name);
                        write_file(&path, text)?;
                        let _ = writeln!(out, "wrote {}", path.display());
                    }
                }
                None => {
                    for (name, text) in &files {
                        let _ = writeln!(out, "# {name}");
                        out.push_str(text);
                    }
                }
            }
            Ok(Outcome::ok(EXIT_OK, out))
        }
        Command::Sum { a, b, out } => emit(print_wta(&sum_wta(&load(&a)?, &load(&b)?)?), out),
        Command::Hadamard { a, b, out } => emit(print_wta(&hadamard_wta(&load(&a)?, &load(&b)?)?), out),
        Command::S0Product { a, b, symbol, out } => {
            emit(print_wta(&sigma_product_wta(&load(&a)?, &load(&b)?, &symbol)?), out)
        }
        Command::S0Star { a, symbol, out } => emit(print_wta(&sigma_star_wta(&load(&a)?, &symbol)?), out),
        Command::Equiv {
            a,
            b,
            emit_joiner,
            json,
            via_nat: nat,
        } => {
            let m = via_nat(load(&a)?, nat)?;
            let n = via_nat(load(&b)?, nat)?;
            equiv(&m, &n, emit_joiner, json)
        }
        Command::JointReduce { a, b, via_nat: nat } => {
            let m = via_nat(load(&a)?, nat)?;
            let n = via_nat(load(&b)?, nat)?;
            let (v, joiner) = joint_reduce(&m, &n)?;
            let mut out = String::new();
            let _ = writeln!(out, "generators: {}", v.len());
            let _ = writeln!(out, "iterations: {}", v.iterations);
            for (i, g) in v.vectors.iter().enumerate() {
                let entries: Vec<String> = g.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(out, "v{i} : {}", entries.join(" "));
            }
            match joiner {
                Some(j) => {
                    out.push_str("# joiner\n");
                    out.push_str(&print_wta(&j.wta));
                    out.push_str("# x1\n");
                    out.push_str(&print_matrix(&j.x1));
                    out.push_str("# x2\n");
                    out.push_str(&print_matrix(&j.x2));
                    Ok(Outcome::ok(EXIT_OK, out))
                }
                None => {
                    out.push_str("no joiner: a generator violates v1·F = v2·G\n");
                    Ok(Outcome::ok(EXIT_FAILS, out))
                }
            }
        }
    }
}

fn print_map(m: &Wta, n: &Wta, rho: &[usize], x: crate::Matrix) -> String {
    let mut out = String::new();
    let (qs, ps) = (m.state_names(), n.state_names());
    for (q, &p) in qs.iter().zip(rho) {
        let _ = writeln!(out, "# {q} -> {}", ps[p]);
    }
    out.push_str(&print_matrix(&x));
    out
}

fn equiv(m: &Wta, n: &Wta, emit_joiner: Option<PathBuf>, json: bool) -> Result<Outcome> {
    let r = decide_equiv(m, n)?;
    if let (Some(path), Some(j)) = (&emit_joiner, &r.joiner) {
        write_file(path, &print_wta(&j.wta))?;
    }
    let equivalent = r.verdict == Verdict::Equivalent;
    let witness = match &r.verdict {
        Verdict::NotEquivalent { witness } => witness.clone(),
        Verdict::Equivalent => None,
    };
    let code = if equivalent { EXIT_OK } else { EXIT_FAILS };
    let joiner_states = r.joiner.as_ref().map(|j| j.wta.num_states());
    if json {
        let mut v = json!({ "verdict": if equivalent { "equivalent" } else { "not_equivalent" } });
        if let Some(t) = &witness {
            v["witness"] = json!(t.to_string());
            v["weight_a"] = json!(m.eval(t)?.to_string());
            v["weight_b"] = json!(n.eval(t)?.to_string());
        }
        if let Some(note) = &r.note {
            v["note"] = json!(note);
        }
        if let Some(s) = r.stats {
            v["stats"] = json!({
                "generators": s.generators,
                "iterations": s.closure_iterations,
                "joiner_states": joiner_states,
            });
        }
        return Ok(Outcome::ok(code, format!("{v}\n")));
    }
    let mut out = String::new();
    if equivalent {
        out.push_str("equivalent\n");
        if let Some(s) = r.stats {
            let _ = writeln!(out, "generators: {}", s.generators);
            let _ = writeln!(out, "iterations: {}", s.closure_iterations);
        }
        if let Some(k) = joiner_states {
            let _ = writeln!(out, "joiner states: {k}");
        }
    } else {
        out.push_str("not equivalent\n");
        if let Some(t) = &witness {
            let _ = writeln!(out, "witness: {t}");
            let _ = writeln!(out, "weight a: {}", m.eval(t)?);
            let _ = writeln!(out, "weight b: {}", n.eval(t)?);
        }
        if let Some(note) = &r.note {
            let _ = writeln!(out, "note: {note}");
        }
    }
    Ok(Outcome::ok(code, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    const M_ONE: &str = "wta {\n semiring nat\n symbol alpha 0\n symbol sigma 2\n state q\n final q : 1\n trans alpha -> q : 1\n trans sigma (q, q) -> q : 1\n}\n";
    const M_TWO: &str = "wta {\n semiring nat\n symbol alpha 0\n symbol sigma 2\n state q\n final q : 1\n trans alpha -> q : 1\n trans sigma (q, q) -> q : 2\n}\n";

    fn files(dir: &Path) -> (String, String) {
        let one = dir.join("m_one.wta");
        let two = dir.join("m_two.wta");
        fs::write(&one, M_ONE).unwrap();
        fs::write(&two, M_TWO).unwrap();
        (one.display().to_string(), two.display().to_string())
    }

    #[test]
    fn eval_and_equiv() {
        let dir = tempfile::tempdir().unwrap();
        let (one, two) = files(dir.path());
        let o = run(["wtakit", "eval", "-a", &two, "-t", "sigma(alpha,alpha)"]);
        assert_eq!((o.code, o.stdout.as_str()), (0, "2\n"));
        let o = run(["wtakit", "equiv", "-a", &two, "-b", &one]);
        assert_eq!(o.code, 1);
        assert!(o.stdout.contains("witness: sigma(alpha,alpha)"), "{}", o.stdout);
        let o = run(["wtakit", "equiv", "-a", &two, "-b", &two, "--json"]);
        assert_eq!(o.code, 0);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["verdict"], "equivalent");
        assert_eq!(v["stats"]["joiner_states"], 1);
    }

    #[test]
    fn check_sim_identity() {
        let dir = tempfile::tempdir().unwrap();
        let (_, two) = files(dir.path());
        let x = dir.path().join("x.mat");
        fs::write(&x, "matrix { row q : 1 }").unwrap();
        let o = run(["wtakit", "check-sim", "-a", &two, "-b", &two, "-x", &x.display().to_string()]);
        assert_eq!(o.code, 0, "{o:?}");
        fs::write(&x, "matrix { row q : 2 }").unwrap();
        assert_eq!(run(["wtakit", "check-sim", "-a", &two, "-b", &two, "-x", &x.display().to_string()]).code, 1);
    }

    #[test]
    fn errors_exit_two() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.wta");
        fs::write(&bad, "wta {\n semiring nat\n state q\n final q : -1\n}").unwrap();
        let o = run(["wtakit", "eval", "-a", &bad.display().to_string(), "-t", "alpha"]);
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains(":4:"), "{}", o.stderr);
        assert_eq!(run(["wtakit", "frobnicate"]).code, 2);
        assert_eq!(run(["wtakit", "eval", "-a", "/nonexistent/x.wta", "-t", "alpha"]).code, 2);
        assert_eq!(run(["wtakit", "--help"]).code, 0);
    }
}
