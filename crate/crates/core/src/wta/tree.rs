use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite set of symbols, each with a rank. Declaration order is kept.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RankedAlphabet {
    symbols: Vec<(String, usize)>,
}

impl RankedAlphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut alphabet = RankedAlphabet::default();
        for (name, rank) in symbols {
            alphabet.push(name.into(), rank)?;
        }
        Ok(alphabet)
    }

    pub fn push(&mut self, name: String, rank: usize) -> Result<usize> {
        if self.index_of(&name).is_some() {
            return Err(Error::Input(format!("symbol `{name}` declared twice")));
        }
        self.symbols.push((name, rank));
        Ok(self.symbols.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&str, usize)> {
        self.symbols.iter().map(|(n, r)| (n.as_str(), *r))
    }

    pub fn name(&self, index: usize) -> &str {
        &self.symbols[index].0
    }

    pub fn rank_at(&self, index: usize) -> usize {
        self.symbols[index].1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|(n, _)| n == name)
    }

    pub fn rank(&self, name: &str) -> Option<usize> {
        self.index_of(name).map(|i| self.symbols[i].1)
    }

    pub fn max_rank(&self) -> usize {
        self.symbols.iter().map(|(_, r)| *r).max().unwrap_or(0)
    }

    /// Without a nullary symbol there are no finite trees at all.
    pub fn has_leaves(&self) -> bool {
        self.symbols.iter().any(|(_, r)| *r == 0)
    }

    /// Symbol indices sorted by name; the enumeration order of trees.
    pub(crate) fn by_name(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.symbols[a].0.cmp(&self.symbols[b].0));
        idx
    }
}

/// A ranked tree `σ(t1, ..., tk)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    symbol: String,
    children: Vec<Tree>,
}

impl Tree {
    pub fn new(symbol: impl Into<String>, children: Vec<Tree>) -> Self {
        Tree {
            symbol: symbol.into(),
            children,
        }
    }

    pub fn leaf(symbol: impl Into<String>) -> Self {
        Tree::new(symbol, Vec::new())
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.children.iter().map(Tree::height).max().unwrap_or(0)
    }

    /// Checks every node against the alphabet.
    pub fn validate(&self, alphabet: &RankedAlphabet) -> Result<()> {
        match alphabet.rank(&self.symbol) {
            None => Err(Error::Tree(format!("unknown symbol `{}`", self.symbol))),
            Some(k) if k != self.children.len() => Err(Error::Tree(format!(
                "`{}` has rank {k} but {} children",
                self.symbol,
                self.children.len()
            ))),
            Some(_) => self.children.iter().try_for_each(|c| c.validate(alphabet)),
        }
    }
}

/// Size first, then root symbol name, then children left to right.
impl Ord for Tree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.symbol.cmp(&other.symbol))
            .then_with(|| self.children.cmp(&other.children))
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl FromStr for Tree {
    type Err = Error;

    /// `sigma(alpha, sigma(alpha, alpha))`; nullary symbols as `alpha` or `alpha()`.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = TreeParser { src: s, pos: 0 };
        let t = p.tree()?;
        p.skip_ws();
        if p.pos < s.len() {
            return Err(p.error("trailing input after tree"));
        }
        Ok(t)
    }
}

struct TreeParser<'a> {
    src: &'a str,
    pos: usize,
}

impl TreeParser<'_> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn error(&self, message: &str) -> Error {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::parse(line, column, message)
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn tree(&mut self) -> Result<Tree> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || matches!(c, '(' | ')' | ',') {
                break;
            }
            self.pos += c.len_utf8();
        }
        if start == self.pos {
            return Err(self.error("expected a symbol"));
        }
        let symbol = self.src[start..self.pos].to_string();
        self.skip_ws();
        let mut children = Vec::new();
        if self.peek() == Some('(') {
            self.pos += 1;
            self.skip_ws();
            if self.peek() == Some(')') {
                self.pos += 1;
                return Ok(Tree::new(symbol, children));
            }
            loop {
                children.push(self.tree()?);
                self.skip_ws();
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("expected `,` or `)`")),
                }
            }
        }
        Ok(Tree::new(symbol, children))
    }
}
