//! Line-oriented tokenizer shared by the monoid, normal-form, template, instance and
//! minor-condition formats. `#` starts a comment; blank lines are ignored.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::algebra::{builtins, FiniteMonoid};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Line {
    pub number: usize,
    pub tokens: Vec<String>,
}

impl Line {
    pub fn keyword(&self) -> &str {
        &self.tokens[0]
    }

    pub fn args(&self) -> &[String] {
        &self.tokens[1..]
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        Error::parse(self.number, message)
    }

    pub fn expect_args(&self, n: usize) -> Result<&[String]> {
        if self.args().len() == n {
            Ok(self.args())
        } else {
            Err(self.error(format!(
                "`{}` expects {n} argument(s), found {}",
                self.keyword(),
                self.args().len()
            )))
        }
    }

    pub fn parse_arg<T: FromStr>(&self, i: usize) -> Result<T> {
        let tok = self
            .args()
            .get(i)
            .ok_or_else(|| self.error(format!("missing argument {} to `{}`", i + 1, self.keyword())))?;
        tok.parse()
            .map_err(|_| self.error(format!("cannot parse `{tok}`")))
    }

    pub fn parse_all<T: FromStr>(&self, tokens: &[String]) -> Result<Vec<T>> {
        tokens
            .iter()
            .map(|t| t.parse().map_err(|_| self.error(format!("cannot parse `{t}`"))))
            .collect()
    }

    pub fn usizes(&self) -> Result<Vec<usize>> {
        self.parse_all(self.args())
    }

    pub fn bigints(&self) -> Result<Vec<BigInt>> {
        self.parse_all(self.args())
    }
}

/// Tokenized lines with a cursor.
#[derive(Debug, Clone)]
pub struct Lines {
    lines: Vec<Line>,
    pos: usize,
    last_line: usize,
}

impl Lines {
    pub fn new(text: &str) -> Self {
        let mut last_line = 0;
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, raw)| {
                last_line = i + 1;
                let body = raw.split('#').next().unwrap_or("");
                let tokens: Vec<String> = body.split_whitespace().map(str::to_owned).collect();
                (!tokens.is_empty()).then(|| Line {
                    number: i + 1,
                    tokens,
                })
            })
            .collect();
        Lines {
            lines,
            pos: 0,
            last_line,
        }
    }

    pub fn peek(&self) -> Option<&Line> {
        self.lines.get(self.pos)
    }

    pub fn peek_keyword(&self) -> Option<&str> {
        self.peek().map(Line::keyword)
    }

    pub fn next_line(&mut self) -> Result<Line> {
        let line = self
            .lines
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::parse(self.last_line + 1, "unexpected end of input"))?;
        self.pos += 1;
        Ok(line)
    }

    pub fn expect(&mut self, keyword: &str) -> Result<Line> {
        let line = self.next_line()?;
        if line.keyword() == keyword {
            Ok(line)
        } else {
            Err(line.error(format!("expected `{keyword}`, found `{}`", line.keyword())))
        }
    }

    pub fn is_done(&self) -> bool {
        self.pos >= self.lines.len()
    }

    pub fn finish(&self) -> Result<()> {
        match self.peek() {
            Some(line) => Err(line.error(format!("unexpected `{}`", line.keyword()))),
            None => Ok(()),
        }
    }
}

/// Reads `monoid <size> <identity>` followed by the table rows, or a single keyword line
/// such as `cyclic:3`.
pub fn read_monoid(lines: &mut Lines) -> Result<FiniteMonoid> {
    let header = lines.next_line()?;
    if header.keyword() != "monoid" {
        if !header.args().is_empty() {
            return Err(header.error("monoid keyword takes no arguments"));
        }
        return builtins::by_name(header.keyword()).map_err(|e| header.error(e.to_string()));
    }
    read_table_body(lines, &header)
}

/// Reads the rows that follow a `<kw> <size> <identity>` header.
pub fn read_table_body(lines: &mut Lines, header: &Line) -> Result<FiniteMonoid> {
    header.expect_args(2)?;
    let size: usize = header.parse_arg(0)?;
    let identity: usize = header.parse_arg(1)?;
    let mut rows = Vec::with_capacity(size);
    for _ in 0..size {
        let line = lines.next_line()?;
        rows.push(line.parse_all::<usize>(&line.tokens)?);
    }
    FiniteMonoid::new(rows, identity).map_err(|e| header.error(e.to_string()))
}

pub fn write_table(out: &mut String, keyword: &str, m: &FiniteMonoid) {
    let _ = writeln!(out, "{keyword} {} {}", m.size(), m.identity());
    for row in m.rows() {
        let _ = writeln!(out, "{}", join(&row));
    }
}

pub fn write_monoid(out: &mut String, m: &FiniteMonoid) {
    write_table(out, "monoid", m);
}

pub fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub fn parse_monoid(text: &str) -> Result<FiniteMonoid> {
    let mut lines = Lines::new(text);
    let m = read_monoid(&mut lines)?;
    lines.finish()?;
    Ok(m)
}

pub fn monoid_to_string(m: &FiniteMonoid) -> String {
    let mut out = String::new();
    write_monoid(&mut out, m);
    out
}
