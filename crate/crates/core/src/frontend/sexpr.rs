//! Tokens and s-expression trees with source positions.

use crate::error::{ParseError, ParseErrorKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    pub fn error(self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            kind,
        }
    }

    pub fn syntax(self, msg: impl Into<String>) -> ParseError {
        self.error(ParseErrorKind::Syntax(msg.into()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
    /// `[lo hi]`
    Bracket(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) | Sexp::Bracket(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn atom(&self, what: &str) -> Result<&str, ParseError> {
        self.as_atom()
            .ok_or_else(|| self.pos().syntax(format!("expected {what}")))
    }

    pub fn list(&self, what: &str) -> Result<&[Sexp], ParseError> {
        match self {
            Sexp::List(items, _) => Ok(items),
            _ => Err(self.pos().syntax(format!("expected {what}"))),
        }
    }

    /// `(head ...)` with the head symbol split off.
    pub fn form(&self) -> Option<(&str, &[Sexp])> {
        match self {
            Sexp::List(items, _) => match items.split_first() {
                Some((Sexp::Atom(h, _), rest)) => Some((h, rest)),
                _ => None,
            },
            _ => None,
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Reader<'_> {
    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_blank(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while self.chars.peek().is_some_and(|&c| c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexp>, ParseError> {
        self.skip_blank();
        let pos = self.pos();
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        match c {
            '(' | '[' => {
                self.bump();
                let close = if c == '(' { ')' } else { ']' };
                let mut items = Vec::new();
                loop {
                    self.skip_blank();
                    match self.chars.peek() {
                        None => return Err(pos.syntax(format!("unclosed `{c}`"))),
                        Some(&d) if d == close => {
                            self.bump();
                            break;
                        }
                        Some(&d) if d == ')' || d == ']' => {
                            return Err(self.pos().syntax(format!("mismatched `{d}`")));
                        }
                        Some(_) => items.extend(self.read()?),
                    }
                }
                Ok(Some(if c == '(' {
                    Sexp::List(items, pos)
                } else {
                    Sexp::Bracket(items, pos)
                }))
            }
            ')' | ']' => Err(pos.syntax(format!("unexpected `{c}`"))),
            _ => {
                let mut s = String::new();
                while let Some(&d) = self.chars.peek() {
                    if d.is_whitespace() || "()[];".contains(d) {
                        break;
                    }
                    s.push(d);
                    self.bump();
                }
                Ok(Some(Sexp::Atom(s, pos)))
            }
        }
    }
}

/// Reads every top-level expression of `text`.
pub fn read_all(text: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut r = Reader {
        chars: text.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    while let Some(s) = r.read()? {
        out.push(s);
    }
    Ok(out)
}
