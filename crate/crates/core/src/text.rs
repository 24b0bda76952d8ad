//! The automaton and matrix file formats.
//!
//! ```text
//! wta {
//!   semiring int
//!   symbol alpha 0
//!   symbol sigma 2
//!   state q0
//!   final q0 : 1
//!   trans alpha () -> q0 : 1
//!   trans sigma (q0, q0) -> q0 : 2
//! }
//! ```
//!
//! Identifiers are runs of characters other than whitespace and `(),:#{}`;
//! `#` starts a comment. Omitted final weights and transitions are zero.
//! A transfer matrix is written `matrix { row <label> : v1 v2 ... }`, with
//! columns in the order of the target automaton's states; omitted rows are zero.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::{IndexSet, Matrix, Vector};
use crate::semiring::{Semiring, Value};
use crate::wta::{RankedAlphabet, Wta};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Punct(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let mut chars = line.char_indices().peekable();
        let mut col = 0;
        while let Some(&(_, c)) = chars.peek() {
            col += 1;
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                chars.next();
                continue;
            }
            if "(),:{}".contains(c) {
                chars.next();
                out.push(Token {
                    tok: Tok::Punct(c),
                    line: ln + 1,
                    column: col,
                });
                continue;
            }
            let start_col = col;
            let mut word = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_whitespace() || "(),:#{}".contains(c) {
                    break;
                }
                word.push(c);
                chars.next();
                col += 1;
            }
            col -= 1;
            out.push(Token {
                tok: Tok::Word(word),
                line: ln + 1,
                column: start_col,
            });
        }
    }
    out
}

/// A word with its line and column.
type Located = (String, (usize, usize));

struct Cursor {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Cursor {
    fn new(text: &str) -> Self {
        let lines = text.lines().count().max(1);
        let last = text.lines().last().map_or(0, |l| l.chars().count());
        Cursor {
            toks: lex(text),
            pos: 0,
            end: (lines, last + 1),
        }
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.line, t.column))
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let (l, c) = self.here();
        Error::parse(l, c, message)
    }

    fn at(&self, pos: (usize, usize), message: impl Into<String>) -> Error {
        Error::parse(pos.0, pos.1, message)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn word(&mut self, what: &str) -> Result<(String, (usize, usize))> {
        let here = self.here();
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok((w, here))
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn punct(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Word(w)) if w == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected `{kw}`"))),
        }
    }

    fn is_punct(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Punct(c))
    }

    fn finish(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            return Err(self.error("unexpected text after the closing `}`"));
        }
        Ok(())
    }
}

fn value(s: Semiring, text: &str, pos: (usize, usize)) -> Result<Value> {
    s.parse_value(text).map_err(|e| match e {
        Error::Input(m) => Error::parse(pos.0, pos.1, m),
        other => other,
    })
}

struct Trans {
    symbol: (String, (usize, usize)),
    children: Vec<(String, (usize, usize))>,
    target: (String, (usize, usize)),
    weight: (String, (usize, usize)),
}

/// Parses an automaton file.
pub fn parse_wta(text: &str) -> Result<Wta> {
    let mut cur = Cursor::new(text);
    cur.keyword("wta")?;
    cur.punct('{')?;
    let mut semiring: Option<Semiring> = None;
    let mut symbols: Vec<(String, usize)> = Vec::new();
    let mut states: Vec<String> = Vec::new();
    let mut finals: Vec<(Located, Located)> = Vec::new();
    let mut trans: Vec<Trans> = Vec::new();
    while !cur.is_punct('}') {
        let (kw, at) = cur.word("a declaration or `}`")?;
        match kw.as_str() {
            "semiring" => {
                let (name, pos) = cur.word("a semiring name")?;
                if semiring.is_some() {
                    return Err(cur.at(at, "duplicate semiring declaration"));
                }
                semiring = Some(name.parse().map_err(|e: Error| cur.at(pos, e.to_string()))?);
            }
            "symbol" => {
                let (name, _) = cur.word("a symbol name")?;
                let (rank, pos) = cur.word("a rank")?;
                let rank: usize = rank.parse().map_err(|_| cur.at(pos, format!("`{rank}` is not a rank")))?;
                if symbols.iter().any(|(n, _)| *n == name) {
                    return Err(cur.at(at, format!("duplicate symbol `{name}`")));
                }
                symbols.push((name, rank));
            }
            "state" => {
                let (name, _) = cur.word("a state name")?;
                if states.contains(&name) {
                    return Err(cur.at(at, format!("duplicate state `{name}`")));
                }
                states.push(name);
            }
            "final" => {
                let q = cur.word("a state name")?;
                cur.punct(':')?;
                let w = cur.word("a weight")?;
                finals.push((q, w));
            }
            "trans" => {
                let symbol = cur.word("a symbol name")?;
                let mut children = Vec::new();
                if cur.is_punct('(') {
                    cur.punct('(')?;
                    if !cur.is_punct(')') {
                        loop {
                            children.push(cur.word("a state name")?);
                            if cur.is_punct(',') {
                                cur.punct(',')?;
                            } else {
                                break;
                            }
                        }
                    }
                    cur.punct(')')?;
                }
                cur.keyword("->")?;
                let target = cur.word("a state name")?;
                cur.punct(':')?;
                let weight = cur.word("a weight")?;
                trans.push(Trans {
                    symbol,
                    children,
                    target,
                    weight,
                });
            }
            other => return Err(cur.at(at, format!("unknown declaration `{other}`"))),
        }
    }
    cur.punct('}')?;
    cur.finish()?;

    let s = semiring.ok_or_else(|| Error::parse(1, 1, "missing `semiring` declaration"))?;
    let alphabet = RankedAlphabet::new(symbols.iter().map(|(n, r)| (n.as_str(), *r)))?;
    let mut b = Wta::builder(s, alphabet.clone(), states.iter().cloned())?;
    let state_known = |(name, pos): &(String, (usize, usize))| {
        if states.contains(name) {
            Ok(())
        } else {
            Err(Error::parse(pos.0, pos.1, format!("unknown state `{name}`")))
        }
    };
    let mut seen_finals = HashSet::new();
    for (q, w) in &finals {
        state_known(q)?;
        if !seen_finals.insert(q.0.clone()) {
            return Err(Error::parse(q.1 .0, q.1 .1, format!("duplicate final weight for `{}`", q.0)));
        }
        b.final_weight(&q.0, value(s, &w.0, w.1)?)?;
    }
    let mut seen = HashSet::new();
    for t in &trans {
        let (sym, pos) = &t.symbol;
        let rank = alphabet
            .rank(sym)
            .ok_or_else(|| Error::parse(pos.0, pos.1, format!("unknown symbol `{sym}`")))?;
        if rank != t.children.len() {
            return Err(Error::parse(
                pos.0,
                pos.1,
                format!("`{sym}` has rank {rank} but the transition lists {} children", t.children.len()),
            ));
        }
        for c in &t.children {
            state_known(c)?;
        }
        state_known(&t.target)?;
        let children: Vec<&str> = t.children.iter().map(|c| c.0.as_str()).collect();
        let key = (sym.clone(), children.iter().map(|c| c.to_string()).collect::<Vec<_>>(), t.target.0.clone());
        if !seen.insert(key) {
            return Err(Error::parse(pos.0, pos.1, "duplicate transition"));
        }
        b.transition(sym, &children, &t.target.0, value(s, &t.weight.0, t.weight.1)?)?;
    }
    Ok(b.build())
}

/// Canonical text of an automaton: declarations in order, nonzero weights only.
pub fn print_wta(m: &Wta) -> String {
    let mut out = String::from("wta {\n");
    let _ = writeln!(out, "  semiring {}", m.semiring());
    for (name, rank) in m.alphabet().symbols() {
        let _ = writeln!(out, "  symbol {name} {rank}");
    }
    let names = m.state_names();
    for q in &names {
        let _ = writeln!(out, "  state {q}");
    }
    for (q, f) in names.iter().zip(m.final_weights().entries()) {
        if !f.is_zero() {
            let _ = writeln!(out, "  final {q} : {f}");
        }
    }
    for sym in 0..m.alphabet().len() {
        let mu = m.transition_at(sym);
        for row in 0..mu.nrows() {
            let label = mu.rows().label(row);
            let children = if label.is_empty() {
                String::new()
            } else {
                format!(" ({})", label.join(", "))
            };
            for (q, w) in names.iter().zip(mu.row(row)) {
                if !w.is_zero() {
                    let _ = writeln!(out, "  trans {}{children} -> {q} : {w}", m.alphabet().name(sym));
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Parses a matrix block with the given row and column index sets.
pub fn parse_matrix(text: &str, rows: &IndexSet, cols: &IndexSet, s: Semiring) -> Result<Matrix> {
    let mut cur = Cursor::new(text);
    cur.keyword("matrix")?;
    cur.punct('{')?;
    let mut m = Matrix::zeros(rows.clone(), cols.clone(), s);
    let mut seen = HashSet::new();
    while !cur.is_punct('}') {
        cur.keyword("row")?;
        let (label, pos) = cur.word("a row label")?;
        let i = rows
            .position_of(&label)
            .ok_or_else(|| cur.at(pos, format!("unknown row `{label}`")))?;
        if !seen.insert(i) {
            return Err(cur.at(pos, format!("duplicate row `{label}`")));
        }
        cur.punct(':')?;
        let mut j = 0;
        while let Some(Tok::Word(w)) = cur.peek() {
            if w == "row" {
                break;
            }
            let (w, pos) = cur.word("a value")?;
            if j == cols.len() {
                return Err(cur.at(pos, format!("row `{label}` has more than {} entries", cols.len())));
            }
            m.set(i, j, value(s, &w, pos)?);
            j += 1;
        }
        if j != cols.len() {
            return Err(cur.error(format!("row `{label}` has {j} entries, expected {}", cols.len())));
        }
    }
    cur.punct('}')?;
    cur.finish()?;
    Ok(m)
}

/// A matrix block listing every row.
pub fn print_matrix(m: &Matrix) -> String {
    let mut out = String::from("matrix {\n");
    for i in 0..m.nrows() {
        let entries: Vec<String> = m.row(i).iter().map(Value::to_string).collect();
        let _ = writeln!(out, "  row {} : {}", m.rows().label(i).join(","), entries.join(" "));
    }
    out.push_str("}\n");
    out
}

/// A vector printed as `q : v` lines, one per state.
pub fn print_vector(v: &Vector) -> String {
    let mut out = String::new();
    for (label, x) in v.index().labels().iter().zip(v.entries()) {
        let _ = writeln!(out, "{} : {x}", label.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{mixed_alphabet, random_wta};
    use crate::wta::Tree;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    const M_TWO: &str = "
wta {
  semiring nat   # naturals
  symbol alpha 0
  symbol sigma 2
  state q
  final q : 1
  trans alpha -> q : 1
  trans sigma (q, q) -> q : 2
}
";

    #[test]
    fn parses_and_evaluates() {
        let m = parse_wta(M_TWO).unwrap();
        let t: Tree = "sigma(alpha, sigma(alpha, alpha))".parse().unwrap();
        assert_eq!(m.eval(&t).unwrap(), Semiring::Nat.from_i64(4).unwrap());
        assert_eq!(parse_wta(&print_wta(&m)).unwrap(), m);
        assert!(print_wta(&m).contains("trans alpha -> q : 1\n"));
    }

    fn err_at(text: &str) -> (usize, String) {
        match parse_wta(text) {
            Err(Error::Parse { line, message, .. }) => (line, message),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn reports_errors_with_positions() {
        let arity = "wta {\n semiring int\n symbol sigma 2\n state q0\n state q1\n trans sigma (q1) -> q0 : 1\n}";
        let (line, msg) = err_at(arity);
        assert_eq!(line, 6);
        assert!(msg.contains("rank 2"), "{msg}");
        let carrier = "wta {\n semiring nat\n symbol a 0\n state q0\n final q0 : -1\n}";
        assert_eq!(err_at(carrier).0, 5);
        let dup = "wta {\n semiring nat\n state q\n state q\n}";
        assert_eq!(err_at(dup).0, 4);
        let unknown = "wta {\n semiring nat\n symbol a 0\n state q\n trans b -> q : 1\n}";
        assert!(err_at(unknown).1.contains("unknown symbol"));
        assert!(err_at("wta {\n state q\n}").1.contains("semiring"));
        assert!(matches!(parse_wta("wta { semiring int"), Err(Error::Parse { .. })));
        let twice = "wta {\n semiring int\n symbol a 0\n state q\n trans a -> q : 1\n trans a () -> q : 2\n}";
        assert!(err_at(twice).1.contains("duplicate"));
    }

    #[test]
    fn random_round_trips() {
        let mut rng = StdRng::seed_from_u64(3);
        for s in Semiring::ALL {
            for _ in 0..5 {
                let m = random_wta(&mut rng, s, &mixed_alphabet(), 3, 0.5);
                let text = print_wta(&m);
                let back = parse_wta(&text).unwrap();
                assert_eq!(back, m);
                assert_eq!(print_wta(&back), text);
            }
        }
    }

    #[test]
    fn matrices() {
        let rows = IndexSet::from_names(["q0", "q1"]).unwrap();
        let cols = IndexSet::from_names(["p"]).unwrap();
        let m = parse_matrix("matrix {\n row q1 : 1/2\n}", &rows, &cols, Semiring::Rat).unwrap();
        assert!(m.get(0, 0).is_zero());
        assert_eq!(m.get(1, 0).to_string(), "1/2");
        assert_eq!(parse_matrix(&print_matrix(&m), &rows, &cols, Semiring::Rat).unwrap(), m);
        assert!(parse_matrix("matrix { row q2 : 1 }", &rows, &cols, Semiring::Rat).is_err());
        assert!(parse_matrix("matrix { row q0 : 1 2 }", &rows, &cols, Semiring::Rat).is_err());
        assert!(parse_matrix("matrix { row q0 : }", &rows, &cols, Semiring::Rat).is_err());
    }
}
