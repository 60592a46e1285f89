//! Parser for polynomial and rational function expressions.
//!
//! Accepted syntax: integer literals, the variable `t`, `+ - * / ^`,
//! parentheses, and implicit multiplication before `t` or `(`, e.g.
//! `3/2*t^4 - t + 5`, `(t^2-1)/(t-1)`, `2t(t+1)`.  Expressions are
//! evaluated directly in the field Q(t), so `1/(t-1) + 1` is valid input
//! for anything expecting a rational function, and anything expecting a
//! polynomial rejects inputs with a nontrivial denominator.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rat::Rat;
use crate::ratfun::RationalFunction;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(BigInt),
    Var,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Token,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn tokenize(mut self) -> Result<Vec<Spanned>> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let (line, col) = (self.line, self.col);
            let c = self.src[self.pos];
            let tok = match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.bump();
                    continue;
                }
                b'0'..=b'9' => {
                    let start = self.pos;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.bump();
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).expect("digits");
                    Token::Number(text.parse().expect("digits parse"))
                }
                b't' => {
                    self.bump();
                    Token::Var
                }
                b'+' => {
                    self.bump();
                    Token::Plus
                }
                b'-' => {
                    self.bump();
                    Token::Minus
                }
                b'*' => {
                    self.bump();
                    Token::Star
                }
                b'/' => {
                    self.bump();
                    Token::Slash
                }
                b'^' => {
                    self.bump();
                    Token::Caret
                }
                b'(' => {
                    self.bump();
                    Token::LParen
                }
                b')' => {
                    self.bump();
                    Token::RParen
                }
                other => {
                    return Err(self.error(format!(
                        "unexpected character '{}'",
                        char::from(other)
                    )))
                }
            };
            out.push(Spanned { tok, line, col });
        }
        Ok(out)
    }
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|s| &s.tok)
    }

    fn error_here(&self, msg: impl Into<String>) -> Error {
        let (line, col) = match self.tokens.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => (self.end_line, self.end_col),
        };
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Token, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error_here(format!("expected {what}")))
        }
    }

    // expr := ('+'|'-')? term (('+'|'-') term)*
    fn expr(&mut self) -> Result<RationalFunction> {
        let mut negate = false;
        match self.peek() {
            Some(Token::Plus) => {
                self.pos += 1;
            }
            Some(Token::Minus) => {
                self.pos += 1;
                negate = true;
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = &acc + &rhs;
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = &acc - &rhs;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    // term := factor (('*'|'/') factor | factor)*  with implicit
    // multiplication allowed before 't' and '('
    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = &acc * &rhs;
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    if rhs.is_zero() {
                        return Err(self.error_here("division by zero"));
                    }
                    acc = &acc / &rhs;
                }
                Some(Token::Var) | Some(Token::LParen) => {
                    let rhs = self.factor()?;
                    acc = &acc * &rhs;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    // factor := atom ('^' number)?
    fn factor(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            match self.advance() {
                Some(Token::Number(n)) => {
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| self.error_here("exponent out of range"))?;
                    if base.is_zero() && e == 0 {
                        return Ok(RationalFunction::one());
                    }
                    return base
                        .pow_i(e as i64)
                        .map_err(|_| self.error_here("invalid power"));
                }
                _ => {
                    self.pos = self.pos.saturating_sub(1);
                    return Err(self.error_here("expected a nonnegative integer exponent"));
                }
            }
        }
        Ok(base)
    }

    // atom := number | 't' | '(' expr ')'
    fn atom(&mut self) -> Result<RationalFunction> {
        match self.peek().cloned() {
            Some(Token::Number(n)) => {
                self.pos += 1;
                Ok(RationalFunction::constant(Rat::from_integer(n)))
            }
            Some(Token::Var) => {
                self.pos += 1;
                Ok(RationalFunction::t())
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(self.error_here("expected a number, 't', or '('")),
        }
    }
}

/// Parses a rational function expression.
pub fn parse_ratfun(src: &str) -> Result<RationalFunction> {
    let lexer = Lexer::new(src);
    let (end_line, end_col) = {
        let mut probe = Lexer::new(src);
        while probe.pos < probe.src.len() {
            probe.bump();
        }
        (probe.line, probe.col)
    };
    let tokens = lexer.tokenize()?;
    if tokens.is_empty() {
        return Err(Error::Parse {
            line: 1,
            col: 1,
            msg: "empty expression".into(),
        });
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end_line,
        end_col,
    };
    let value = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error_here("unexpected trailing input"));
    }
    Ok(value)
}

/// Parses a polynomial; rejects expressions with a nontrivial denominator.
pub fn parse_poly(src: &str) -> Result<Polynomial> {
    let f = parse_ratfun(src)?;
    if !f.is_polynomial() {
        return Err(Error::Parse {
            line: 1,
            col: 1,
            msg: "expected a polynomial, found a nontrivial denominator".into(),
        });
    }
    Ok(f.num().clone())
}
