//! Parser for the canonical polynomial grammar.
//!
//! ```text
//! poly     := ['-'] term (('+' | '-') term)*
//! term     := (rational | factor) ('*' (rational | factor))*
//! factor   := ('l' | 'a' | 'b' | 't') ['^' exponent]
//! rational := digits ['/' digits]
//! ```
//!
//! Only `l` admits a negative exponent. Exponent 1 may be omitted. The
//! printer always emits a parseable canonical form, and parse/print
//! round-trips are exact.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::coef::{CoefPoly, Exps};
use crate::error::Error;
use crate::rat::Rat;
use crate::tpoly::TPoly;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(char),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
}

fn lex(s: &str) -> Result<Vec<Tok>, Error> {
    let mut toks = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&ch) = chars.peek() {
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(Tok::Num(digits.parse().expect("digits")));
            }
            'l' | 'a' | 'b' | 't' => {
                toks.push(Tok::Var(ch));
                chars.next();
            }
            '+' => {
                toks.push(Tok::Plus);
                chars.next();
            }
            '-' => {
                toks.push(Tok::Minus);
                chars.next();
            }
            '*' => {
                toks.push(Tok::Star);
                chars.next();
            }
            '^' => {
                toks.push(Tok::Caret);
                chars.next();
            }
            '/' => {
                toks.push(Tok::Slash);
                chars.next();
            }
            other => return Err(Error::Parse(format!("unexpected character `{other}`"))),
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_int(&mut self) -> Result<BigInt, Error> {
        let neg = matches!(self.peek(), Some(Tok::Minus));
        if neg {
            self.next();
        }
        match self.next() {
            Some(Tok::Num(n)) => Ok(if neg { -n } else { n }),
            other => Err(Error::Parse(format!("expected integer, found {other:?}"))),
        }
    }

    /// One `rational | factor` atom, multiplied into the accumulators.
    fn atom(
        &mut self,
        coeff: &mut Rat,
        la: &mut i64,
        al: &mut u32,
        be: &mut u32,
        et: &mut u32,
    ) -> Result<(), Error> {
        match self.next() {
            Some(Tok::Num(n)) => {
                let mut r = Rat::from_integer(n);
                if matches!(self.peek(), Some(Tok::Slash)) {
                    self.next();
                    let d = match self.next() {
                        Some(Tok::Num(d)) => d,
                        other => {
                            return Err(Error::Parse(format!(
                                "expected denominator, found {other:?}"
                            )))
                        }
                    };
                    if d.is_zero() {
                        return Err(Error::Parse("zero denominator".into()));
                    }
                    r /= Rat::from_integer(d);
                }
                *coeff *= r;
            }
            Some(Tok::Var(v)) => {
                let exp: BigInt = if matches!(self.peek(), Some(Tok::Caret)) {
                    self.next();
                    self.expect_int()?
                } else {
                    BigInt::from(1)
                };
                let as_i64 = |e: &BigInt| -> Result<i64, Error> {
                    i64::try_from(e.clone())
                        .map_err(|_| Error::Parse("exponent out of range".into()))
                };
                let e = as_i64(&exp)?;
                match v {
                    'l' => *la += e,
                    'a' | 'b' | 't' => {
                        if e < 0 {
                            return Err(Error::Parse(format!("negative exponent on `{v}`")));
                        }
                        let slot = match v {
                            'a' => al,
                            'b' => be,
                            _ => et,
                        };
                        *slot = slot
                            .checked_add(e as u32)
                            .ok_or_else(|| Error::Parse("exponent out of range".into()))?;
                    }
                    _ => unreachable!(),
                }
            }
            other => return Err(Error::Parse(format!("expected term, found {other:?}"))),
        }
        Ok(())
    }

    fn term(&mut self, negated: bool) -> Result<(u32, Exps, Rat), Error> {
        let mut coeff = if negated {
            -Rat::from_integer(BigInt::from(1))
        } else {
            Rat::from_integer(BigInt::from(1))
        };
        let (mut la, mut al, mut be, mut et) = (0i64, 0u32, 0u32, 0u32);
        self.atom(&mut coeff, &mut la, &mut al, &mut be, &mut et)?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.next();
            self.atom(&mut coeff, &mut la, &mut al, &mut be, &mut et)?;
        }
        Ok((et, Exps { la, al, be }, coeff))
    }
}

/// Parses a polynomial in the canonical grammar into a `TPoly`.
pub fn parse_tpoly(s: &str) -> Result<TPoly, Error> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty input".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let mut out = TPoly::zero();
    let mut negated = false;
    if matches!(p.peek(), Some(Tok::Minus)) {
        p.next();
        negated = true;
    }
    loop {
        let (et, exps, coeff) = p.term(negated)?;
        out = &out + &TPoly::term(et, CoefPoly::monomial(exps, coeff));
        match p.next() {
            None => break,
            Some(Tok::Plus) => {
                // `+ -3*t` renders negative coefficients after the separator.
                negated = if matches!(p.peek(), Some(Tok::Minus)) {
                    p.next();
                    true
                } else {
                    false
                };
            }
            Some(Tok::Minus) => negated = true,
            other => return Err(Error::Parse(format!("expected `+`, found {other:?}"))),
        }
    }
    Ok(out)
}
