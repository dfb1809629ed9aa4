//! Recursive-descent parser for the coefficient expression language.
//!
//! Grammar (LL(1)):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | base ('^' factor)?
//! base   := NUMBER | 'x' | IDENT '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative. There is no
//! implicit multiplication: `3x` is a parse error, not `3*x`.

use std::fmt;

use super::{Expr, Func};

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "at byte {}: expected {}, found {}",
            self.offset, self.expected, self.found
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, bytes: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        if start >= self.bytes.len() {
            return Ok((Tok::Eof, start));
        }
        let c = self.bytes[start];
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => return self.lex_number(start),
            c if c.is_ascii_alphabetic() => {
                let mut end = start;
                while end < self.bytes.len() && self.bytes[end].is_ascii_alphanumeric() {
                    end += 1;
                }
                self.pos = end;
                return Ok((Tok::Ident(self.src[start..end].to_string()), start));
            }
            other => {
                return Err(ParseError {
                    offset: start,
                    expected: "a token".into(),
                    found: format!("unexpected character `{}`", other as char),
                })
            }
        };
        self.pos = start + 1;
        Ok((tok, start))
    }

    fn lex_number(&mut self, start: usize) -> Result<(Tok, usize), ParseError> {
        let mut end = start;
        while end < self.bytes.len() && self.bytes[end].is_ascii_digit() {
            end += 1;
        }
        if end < self.bytes.len() && self.bytes[end] == b'.' {
            end += 1;
            while end < self.bytes.len() && self.bytes[end].is_ascii_digit() {
                end += 1;
            }
        }
        if end < self.bytes.len() && (self.bytes[end] == b'e' || self.bytes[end] == b'E') {
            let mut exp_end = end + 1;
            if exp_end < self.bytes.len() && (self.bytes[exp_end] == b'+' || self.bytes[exp_end] == b'-')
            {
                exp_end += 1;
            }
            if exp_end < self.bytes.len() && self.bytes[exp_end].is_ascii_digit() {
                end = exp_end;
                while end < self.bytes.len() && self.bytes[end].is_ascii_digit() {
                    end += 1;
                }
            }
        }
        let text = &self.src[start..end];
        let value: f64 = text.parse().map_err(|_| ParseError {
            offset: start,
            expected: "a numeric literal".into(),
            found: format!("`{text}`"),
        })?;
        self.pos = end;
        Ok((Tok::Num(value), start))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
}

impl Parser {
    fn peek(&self) -> &(Tok, usize) {
        &self.toks[self.idx]
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.idx].clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn err(&self, expected: &str) -> ParseError {
        let (tok, offset) = self.peek();
        ParseError { offset: *offset, expected: expected.into(), found: tok.describe() }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().0 {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek().0 {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.peek().0 == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.peek().0 == Tok::Caret {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek().0.clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::Constant(n))
            }
            Tok::Ident(name) => {
                let (_, offset) = self.bump();
                if name == "x" {
                    return Ok(Expr::Variable);
                }
                let func = Func::from_name(&name).ok_or_else(|| ParseError {
                    offset,
                    expected: "`x` or a known function name".into(),
                    found: format!("unknown identifier `{name}`"),
                })?;
                if self.peek().0 != Tok::LParen {
                    return Err(self.err("`(` after function name"));
                }
                self.bump();
                let arg = self.expr()?;
                if self.peek().0 != Tok::RParen {
                    return Err(self.err("`)`"));
                }
                self.bump();
                Ok(Expr::Apply(func, Box::new(arg)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if self.peek().0 != Tok::RParen {
                    return Err(self.err("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.err("a number, `x`, a function call, or `(`")),
        }
    }
}

/// Parse `text` into an expression tree.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut toks = Vec::new();
    loop {
        let (tok, offset) = lexer.next()?;
        let done = tok == Tok::Eof;
        toks.push((tok, offset));
        if done {
            break;
        }
    }
    let mut parser = Parser { toks, idx: 0 };
    let expr = parser.expr()?;
    if parser.peek().0 != Tok::Eof {
        return Err(parser.err("an operator or end of input"));
    }
    Ok(expr)
}
