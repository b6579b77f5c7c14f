//! Recursive descent parser for operator expressions.
//!
//! ```text
//! expr    := term (("+"|"-") term)* ;
//! term    := scalar? factor+ ;
//! factor  := atom ("^" uint)? ;
//! atom    := "e" | "e+" | "1" | "(" expr ")" | "[" expr "," expr "]" | "{" expr "," expr "}" ;
//! scalar  := int | int "/" uint ;
//! ```
//!
//! Beyond the core grammar a term may carry a leading sign (`-e+`,
//! `+ -3/2 e^2`), a lone scalar stands for a multiple of the identity, and `*`
//! may separate factors. `e+` is a single token, so `e+e` reads as `e+ e`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::expr::{Generator, OpExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    E,
    EPlus,
    Int(BigInt),
    Plus,
    Minus,
    Slash,
    Caret,
    Star,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::E => "`e`".into(),
            Tok::EPlus => "`e+`".into(),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Star => "`*`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut toks = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((pos, ch)) = chars.next() {
        let tok = match ch {
            c if c.is_whitespace() => continue,
            'e' => match chars.peek() {
                Some(&(_, '+')) | Some(&(_, '†')) => {
                    chars.next();
                    Tok::EPlus
                }
                _ => Tok::E,
            },
            '0'..='9' => {
                let mut end = pos + ch.len_utf8();
                while let Some(&(p, c)) = chars.peek() {
                    if !c.is_ascii_digit() {
                        break;
                    }
                    end = p + c.len_utf8();
                    chars.next();
                }
                Tok::Int(text[pos..end].parse().expect("ascii digits"))
            }
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '*' => Tok::Star,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            other => {
                return Err(ParseError {
                    offset: pos,
                    expected: "an operator expression token".into(),
                    found: format!("character `{other}`"),
                })
            }
        };
        toks.push((pos, tok));
    }
    toks.push((text.len(), Tok::End));
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.toks.len() - 1);
        &self.toks[i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let (offset, tok) = &self.toks[self.pos];
        ParseError {
            offset: *offset,
            expected: expected.into(),
            found: tok.describe(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expr(&mut self) -> Result<OpExpr, ParseError> {
        let mut terms = vec![self.term(false)?];
        loop {
            let negate = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.bump();
            terms.push(self.term(negate)?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().expect("one term")
        } else {
            OpExpr::Sum(terms)
        })
    }

    fn starts_factor(&self) -> bool {
        match self.peek() {
            Tok::E | Tok::EPlus | Tok::LParen | Tok::LBracket | Tok::LBrace => true,
            Tok::Int(v) => v.is_one() && *self.peek_at(1) != Tok::Slash,
            _ => false,
        }
    }

    fn term(&mut self, mut negate: bool) -> Result<OpExpr, ParseError> {
        while matches!(self.peek(), Tok::Plus | Tok::Minus) {
            if self.bump() == Tok::Minus {
                negate = !negate;
            }
        }

        let mut scalar = None;
        if let Tok::Int(v) = self.peek().clone() {
            let one_atom = v.is_one() && matches!(self.peek_at(1), Tok::Caret);
            if !one_atom {
                self.bump();
                let value = if *self.peek() == Tok::Slash {
                    self.bump();
                    match self.peek().clone() {
                        Tok::Int(d) if !d.is_zero() => {
                            self.bump();
                            BigRational::new(v, d)
                        }
                        _ => return Err(self.error("a nonzero unsigned denominator")),
                    }
                } else {
                    BigRational::from_integer(v)
                };
                scalar = Some(value);
                if *self.peek() == Tok::Star {
                    self.bump();
                }
            }
        }

        let mut factors = Vec::new();
        while self.starts_factor() {
            factors.push(self.factor()?);
            if *self.peek() == Tok::Star {
                self.bump();
                if !self.starts_factor() {
                    return Err(self.error("a factor after `*`"));
                }
            }
        }

        let body = match (factors.len(), &scalar) {
            (0, None) => return Err(self.error("a scalar or factor")),
            (0, Some(_)) => OpExpr::One,
            (1, _) => factors.pop().expect("one factor"),
            _ => OpExpr::Product(factors),
        };

        let mut coeff = scalar.unwrap_or_else(BigRational::one);
        if negate {
            coeff = -coeff;
        }
        Ok(if coeff.is_one() {
            body
        } else {
            OpExpr::ScalarMul(coeff, Box::new(body))
        })
    }

    fn factor(&mut self) -> Result<OpExpr, ParseError> {
        let atom = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(atom);
        }
        self.bump();
        match self.peek().clone() {
            Tok::Int(k) => match u32::try_from(&k) {
                Ok(k) => {
                    self.bump();
                    Ok(OpExpr::Power(Box::new(atom), k))
                }
                Err(_) => Err(self.error("an exponent below 2^32")),
            },
            _ => Err(self.error("an unsigned integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<OpExpr, ParseError> {
        match self.peek().clone() {
            Tok::E => {
                self.bump();
                Ok(OpExpr::Generator(Generator::Annihilate))
            }
            Tok::EPlus => {
                self.bump();
                Ok(OpExpr::Generator(Generator::Create))
            }
            Tok::Int(v) if v.is_one() => {
                self.bump();
                Ok(OpExpr::One)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::LBracket => {
                self.bump();
                let a = self.expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.expr()?;
                self.expect(Tok::RBracket, "`]`")?;
                Ok(OpExpr::Commutator(Box::new(a), Box::new(b)))
            }
            Tok::LBrace => {
                self.bump();
                let a = self.expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.expr()?;
                self.expect(Tok::RBrace, "`}`")?;
                Ok(OpExpr::AntiCommutator(Box::new(a), Box::new(b)))
            }
            _ => Err(self.error("`e`, `e+`, `1`, `(`, `[` or `{`")),
        }
    }
}

pub fn parse(text: &str) -> Result<OpExpr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let expr = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("`+`, `-` or end of input"));
    }
    Ok(expr)
}
