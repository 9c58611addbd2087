//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'i' | 'z' | param | func '(' args ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-z^2`
//! is `-(z^2)` and `2^-1` is `2^(-1)`.

use std::collections::BTreeMap;

use super::{MeroExpr, C64};

/// Named constants bound at parse time.
pub type Params = BTreeMap<String, C64>;

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier '{name}' at byte {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("expression nested deeper than {limit} levels at byte {pos}")]
    TooDeep { pos: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

fn syntax(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                // only an exponent if digits follow (optionally signed)
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text
                .parse()
                .map_err(|_| syntax(start, format!("malformed number '{}'", text)))?;
            if !v.is_finite() {
                return Err(syntax(start, format!("number '{}' is not finite", text)));
            }
            out.push((Tok::Num(v), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
            continue;
        }
        let tok = match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character '{}'", ch)));
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
    params: &'a Params,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn at(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.at(), format!("expected {}", what)))
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(ParseError::TooDeep { pos: self.at(), limit: MAX_DEPTH })
        } else {
            Ok(())
        }
    }

    fn expr(&mut self) -> Result<MeroExpr, ParseError> {
        self.enter()?;
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = &acc + &rhs;
                }
                Tok::Op('-') => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = &acc - &rhs;
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<MeroExpr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = &acc * &rhs;
                }
                Tok::Op('/') => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = &acc / &rhs;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MeroExpr, ParseError> {
        self.enter()?;
        let out = match self.peek() {
            Tok::Op('-') => {
                self.bump();
                let e = self.unary()?;
                MeroExpr::neg(&e)
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()?
            }
            _ => self.power()?,
        };
        self.depth -= 1;
        Ok(out)
    }

    fn power(&mut self) -> Result<MeroExpr, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let exponent = self.unary()?;
            Ok(power_of(&base, &exponent))
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<MeroExpr, ParseError> {
        let pos = self.at();
        match self.bump() {
            Tok::Num(v) => Ok(MeroExpr::real(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(name, pos),
            Tok::End => Err(syntax(pos, "unexpected end of input")),
            t => Err(syntax(pos, format!("unexpected token {:?}", t))),
        }
    }

    fn ident(&mut self, name: String, pos: usize) -> Result<MeroExpr, ParseError> {
        match name.as_str() {
            "z" => return Ok(MeroExpr::var()),
            "i" => return Ok(MeroExpr::i()),
            "exp" | "log" | "sqrt" | "pow" => {
                self.expect(Tok::LParen, &format!("'(' after {}", name))?;
                let a = self.expr()?;
                let out = if name == "pow" {
                    self.expect(Tok::Comma, "',' in pow(base, exponent)")?;
                    let b = self.expr()?;
                    power_of(&a, &b)
                } else if name == "exp" {
                    MeroExpr::exp(&a)
                } else if name == "log" {
                    MeroExpr::log(&a)
                } else {
                    MeroExpr::sqrt(&a)
                };
                self.expect(Tok::RParen, "')'")?;
                return Ok(out);
            }
            _ => {}
        }
        match self.params.get(&name) {
            Some(v) => Ok(MeroExpr::constant(*v)),
            None => Err(ParseError::UnknownIdentifier { name, pos }),
        }
    }
}

/// `base^exponent`: a constant exponent gives a power node, anything else
/// becomes `exp(exponent * log(base))`.
fn power_of(base: &MeroExpr, exponent: &MeroExpr) -> MeroExpr {
    match exponent.as_const() {
        Some(c) => MeroExpr::powc(base, c),
        None => MeroExpr::exp(&(exponent * &MeroExpr::log(base))),
    }
}

/// Parse an expression with no named parameters.
pub fn parse_expr(src: &str) -> Result<MeroExpr, ParseError> {
    parse_expr_with(src, &Params::new())
}

/// Parse an expression, substituting named parameters.
pub fn parse_expr_with(src: &str, params: &Params) -> Result<MeroExpr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
        params,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.at(), "unexpected trailing input"));
    }
    Ok(e)
}
