//! Parser for polynomial input.
//!
//! Grammar: integer coefficients, variables `X`, `Y` (or `X1`, `X2`, ... for
//! more than two variables), `+ - * ^` and parentheses. Multiplication is
//! always explicit (`3*X^2*Y`, not `3X^2Y`).

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::series::TruncSeries;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Int(BigInt),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s
                    .parse::<BigInt>()
                    .map_err(|_| Error::Domain(format!("bad integer literal: {s}")))?;
                out.push(Token::Int(n));
            }
            'X' | 'x' => {
                i += 1;
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i == start {
                    out.push(Token::Var(0));
                } else {
                    let s: String = chars[start..i].iter().collect();
                    let idx: usize = s
                        .parse()
                        .map_err(|_| Error::Domain(format!("bad variable index: X{s}")))?;
                    if idx == 0 {
                        return Err(Error::Domain("variable indices start at 1".to_string()));
                    }
                    out.push(Token::Var(idx - 1));
                }
            }
            'Y' | 'y' => {
                out.push(Token::Var(1));
                i += 1;
            }
            _ => return Err(Error::Domain(format!("unexpected character '{c}'"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    ctx: FieldCtx,
    nvars: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<TruncSeries> {
        let mut acc = match self.peek() {
            Some(Token::Minus) => {
                self.next();
                self.term()?.neg()
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Some(Token::Minus) => {
                    self.next();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<TruncSeries> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Token::Star)) {
            self.next();
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<TruncSeries> {
        let base = self.base()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.next();
            match self.next() {
                Some(Token::Int(n)) => {
                    let e: u32 = n
                        .to_string()
                        .parse()
                        .map_err(|_| Error::Domain(format!("bad exponent {n}")))?;
                    Ok(base.pow(e))
                }
                _ => Err(Error::Domain("expected integer exponent after '^'".to_string())),
            }
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<TruncSeries> {
        match self.next() {
            Some(Token::Int(n)) => Ok(TruncSeries::constant(
                &self.ctx,
                self.nvars,
                FieldElem::from_bigint(&self.ctx, &n),
            )),
            Some(Token::Var(i)) => {
                if i >= self.nvars {
                    return Err(Error::Domain(format!(
                        "variable index {} out of range for {} variables",
                        i + 1,
                        self.nvars
                    )));
                }
                Ok(TruncSeries::var(&self.ctx, self.nvars, i))
            }
            Some(Token::Minus) => Ok(self.factor()?.neg()),
            Some(Token::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(e),
                    _ => Err(Error::Domain("missing ')'".to_string())),
                }
            }
            t => Err(Error::Domain(format!("unexpected token {t:?}"))),
        }
    }
}

/// Parse a polynomial with a fixed number of variables.
pub fn parse_poly(src: &str, ctx: &FieldCtx, nvars: usize) -> Result<TruncSeries> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        ctx: ctx.clone(),
        nvars,
    };
    let e = p.expr()?;
    if p.pos != tokens.len() {
        return Err(Error::Domain("trailing input after expression".to_string()));
    }
    Ok(e)
}

/// Parse, inferring the number of variables from the highest index used
/// (at least two, so `X`/`Y` always work).
pub fn parse_poly_auto(src: &str, ctx: &FieldCtx) -> Result<TruncSeries> {
    let tokens = tokenize(src)?;
    let nvars = tokens
        .iter()
        .filter_map(|t| match t {
            Token::Var(i) => Some(i + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0)
        .max(2);
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        ctx: ctx.clone(),
        nvars,
    };
    let e = p.expr()?;
    if p.pos != tokens.len() {
        return Err(Error::Domain("trailing input after expression".to_string()));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Monomial;

    #[test]
    fn parse_basic() {
        let q = FieldCtx::Q;
        let f = parse_poly("Y^2 - X^3 - 4*X*Y", &q, 2).unwrap();
        assert_eq!(f.num_terms(), 3);
        assert_eq!(
            f.coeff(&Monomial(alloc::vec![1, 1])),
            FieldElem::from_int(&q, -4)
        );
        assert_eq!(
            f.coeff(&Monomial(alloc::vec![0, 2])),
            FieldElem::from_int(&q, 1)
        );
    }

    #[test]
    fn parse_char_p_collapse() {
        // coefficients reduce mod p
        let f3 = FieldCtx::Fp(3);
        let f = parse_poly("3*X + Y", &f3, 2).unwrap();
        assert_eq!(f.num_terms(), 1);
    }

    #[test]
    fn parse_parens_and_unary_minus() {
        let q = FieldCtx::Q;
        let f = parse_poly("-(X + Y)*(X - Y)", &q, 2).unwrap();
        let g = parse_poly("Y^2 - X^2", &q, 2).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn parse_indexed_vars() {
        let q = FieldCtx::Q;
        let f = parse_poly_auto("X1*X2 + X3^2", &q).unwrap();
        assert_eq!(f.nvars(), 3);
    }

    #[test]
    fn parse_rejects_garbage() {
        let q = FieldCtx::Q;
        assert!(parse_poly("X +* Y", &q, 2).is_err());
        assert!(parse_poly("Z", &q, 2).is_err());
        assert!(parse_poly("(X", &q, 2).is_err());
    }
}
