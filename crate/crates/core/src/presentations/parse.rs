//! Text grammar for presentations.
//!
//! ```text
//! presentation := '<' namelist '|' relatorlist '>'
//! namelist     := name (',' name)*
//! relatorlist  := word (',' word)* | ε
//! word         := atom+
//! atom         := base ('^' integer)?
//! base         := name | '(' word ')' | '[' word ',' word ']'
//! ```
//!
//! `#` starts a comment running to the end of the line. A token that is not a
//! declared name but spells a sequence of one-character generator names is
//! read as that sequence: with generators `a, b` the token `abab` reads as
//! `a b a b`.

use crate::error::{Error, Result};
use crate::words::{free_reduce, Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Name(String),
    Int(i64),
    Sym(char),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
        } else if c.is_whitespace() {
            col += 1;
            i += 1;
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Name(chars[start..i].iter().collect()),
                line: tl,
                column: tc,
            });
        } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let s: String = chars[start..i].iter().collect();
            let v = s.parse::<i64>().map_err(|_| Error::Syntax {
                line: tl,
                column: tc,
                message: format!("integer {s} out of range"),
            })?;
            out.push(Token {
                tok: Tok::Int(v),
                line: tl,
                column: tc,
            });
        } else if "<>|,()[]^".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                line: tl,
                column: tc,
            });
            col += 1;
            i += 1;
        } else {
            return Err(Error::Syntax {
                line: tl,
                column: tc,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    names: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = self.peek();
        Err(Error::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek().tok == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{c}`, found {}", describe(&self.peek().tok)))
        }
    }

    fn at_atom_start(&self) -> bool {
        matches!(self.peek().tok, Tok::Name(_) | Tok::Sym('(') | Tok::Sym('['))
    }

    fn word(&mut self) -> Result<Vec<Letter>> {
        if !self.at_atom_start() {
            return self.err(format!("expected a word, found {}", describe(&self.peek().tok)));
        }
        let mut letters = Vec::new();
        while self.at_atom_start() {
            letters.extend(self.atom()?);
        }
        Ok(letters)
    }

    fn atom(&mut self) -> Result<Vec<Letter>> {
        let base = self.base()?;
        if self.peek().tok != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let t = self.bump();
        let e = match t.tok {
            Tok::Int(0) => {
                return Err(Error::Syntax {
                    line: t.line,
                    column: t.column,
                    message: "exponent 0 is not allowed".into(),
                })
            }
            Tok::Int(e) => e,
            other => {
                return Err(Error::Syntax {
                    line: t.line,
                    column: t.column,
                    message: format!("expected an integer exponent, found {}", describe(&other)),
                })
            }
        };
        let unit: Vec<Letter> = if e > 0 {
            base
        } else {
            base.iter().rev().map(|l| l.inverse()).collect()
        };
        let n = e.unsigned_abs() as usize;
        if unit.len().saturating_mul(n) > 10_000_000 {
            return Err(Error::Syntax {
                line: t.line,
                column: t.column,
                message: "expanded word is too long".into(),
            });
        }
        Ok(unit.repeat(n))
    }

    fn base(&mut self) -> Result<Vec<Letter>> {
        let t = self.bump();
        match t.tok {
            Tok::Name(name) => self.resolve(&name, t.line, t.column),
            Tok::Sym('(') => {
                let w = self.word()?;
                self.expect(')')?;
                Ok(w)
            }
            Tok::Sym('[') => {
                let x = self.word()?;
                self.expect(',')?;
                let y = self.word()?;
                self.expect(']')?;
                let inv = |w: &[Letter]| w.iter().rev().map(|l| l.inverse()).collect::<Vec<_>>();
                let mut out = x.clone();
                out.extend_from_slice(&y);
                out.extend(inv(&x));
                out.extend(inv(&y));
                Ok(out)
            }
            other => Err(Error::Syntax {
                line: t.line,
                column: t.column,
                message: format!("unexpected {}", describe(&other)),
            }),
        }
    }

    fn resolve(&self, name: &str, line: usize, column: usize) -> Result<Vec<Letter>> {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return Ok(vec![Letter::pos(i)]);
        }
        let split: Option<Vec<Letter>> = name
            .chars()
            .map(|c| {
                self.names
                    .iter()
                    .position(|n| n.len() == 1 && n.starts_with(c))
                    .map(Letter::pos)
            })
            .collect();
        split.ok_or_else(|| Error::UnknownGenerator {
            name: name.to_string(),
            line,
            column,
        })
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Name(n) => format!("name `{n}`"),
        Tok::Int(i) => format!("integer {i}"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses the presentation grammar into generator names and raw relator
/// words (not yet normalized into power form).
pub(crate) fn parse_raw(text: &str) -> Result<(Vec<String>, Vec<Word>)> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        names: &[],
    };
    p.expect('<')?;
    let mut names: Vec<String> = Vec::new();
    loop {
        let t = p.bump();
        match t.tok {
            Tok::Name(n) => {
                if names.contains(&n) {
                    return Err(Error::Syntax {
                        line: t.line,
                        column: t.column,
                        message: format!("duplicate generator name `{n}`"),
                    });
                }
                names.push(n);
            }
            other => {
                return Err(Error::Syntax {
                    line: t.line,
                    column: t.column,
                    message: format!("expected a generator name, found {}", describe(&other)),
                })
            }
        }
        if p.peek().tok == Tok::Sym(',') {
            p.bump();
        } else {
            break;
        }
    }
    p.expect('|')?;
    let rank = names.len();
    let mut p = Parser {
        toks: p.toks,
        pos: p.pos,
        names: &names,
    };
    let mut relators = Vec::new();
    if p.peek().tok != Tok::Sym('>') {
        loop {
            let letters = p.word()?;
            relators.push(free_reduce(letters, rank)?);
            if p.peek().tok == Tok::Sym(',') {
                p.bump();
            } else {
                break;
            }
        }
    }
    p.expect('>')?;
    if p.peek().tok != Tok::Eof {
        return p.err(format!("trailing input: {}", describe(&p.peek().tok)));
    }
    Ok((names, relators))
}

/// Parses a single word over the given generator names.
pub fn parse_word(text: &str, names: &[String]) -> Result<Word> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, names };
    if p.peek().tok == Tok::Eof {
        return Ok(Word::identity(names.len()));
    }
    let letters = p.word()?;
    if p.peek().tok != Tok::Eof {
        return p.err(format!("trailing input: {}", describe(&p.peek().tok)));
    }
    free_reduce(letters, names.len())
}
