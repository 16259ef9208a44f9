//! Parser for the text grammar used by every rendered value:
//! integers, named variables, `^` (integer exponent, possibly negative),
//! `*`, `/`, `+`, `-` and parentheses.

use num_bigint::BigInt;

use super::poly::Laurent;
use super::series::QSeries;
use crate::scalar::Ring;
use crate::weyl::Degree;
use crate::{Error, RationalFunction};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, Error> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse().unwrap()));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    resolve: &'a dyn Fn(&str) -> Option<usize>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RationalFunction, Error> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add_ref(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub_ref(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction, Error> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul_ref(&self.unary()?);
            } else if self.eat('/') {
                acc = acc.div(&self.unary()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction, Error> {
        if self.eat('-') {
            return Ok(self.unary()?.neg_ref());
        }
        self.power()
    }

    fn power(&mut self) -> Result<RationalFunction, Error> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let e = match self.toks.get(self.pos) {
                Some(Tok::Num(n)) => {
                    let v: i32 = n.try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
                    self.pos += 1;
                    v
                }
                _ => return Err(Error::Parse("expected integer exponent".into())),
            };
            return base.pow(if neg { -e } else { e });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalFunction, Error> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(RationalFunction::from_poly(Laurent::constant(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let i = (self.resolve)(&name).ok_or_else(|| Error::Parse(format!("unknown variable {name}")))?;
                Ok(RationalFunction::var(i))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parse an expression; `resolve` maps a variable name to its slot.
pub fn parse_with(s: &str, resolve: &dyn Fn(&str) -> Option<usize>) -> Result<RationalFunction, Error> {
    let toks = lex(s)?;
    let mut p = Parser { toks, pos: 0, resolve };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input in {s:?}")));
    }
    Ok(v)
}

/// Resolve `T1, T2, ...` to slots `0, 1, ...`.
pub fn t_slot(name: &str) -> Option<usize> {
    let i: usize = name.strip_prefix('T')?.parse().ok()?;
    i.checked_sub(1)
}

pub fn parse_rational_function(s: &str) -> Result<RationalFunction, Error> {
    parse_with(s, &t_slot)
}

/// Slot offset used for `q_j` while parsing a series.
const Q_BASE: usize = 64;

/// Parse a rendered q-series with `k` Novikov variables.
pub fn parse_qseries(s: &str, k: usize, bound: u32) -> Result<QSeries<RationalFunction>, Error> {
    let resolve = |name: &str| -> Option<usize> {
        if let Some(j) = name.strip_prefix('q') {
            let j: usize = j.parse().ok()?;
            return (1..=k).contains(&j).then_some(Q_BASE + j - 1);
        }
        t_slot(name).filter(|&i| i < Q_BASE)
    };
    let f = parse_with(s, &resolve)?;
    if f.den().nvars() > Q_BASE {
        return Err(Error::Parse("q variable in a denominator".into()));
    }
    let mut out = QSeries::zero(k, bound);
    for (m, c) in f.num().terms() {
        let mut qd = vec![0u32; k];
        let mut tm = Vec::new();
        for (i, &e) in m.exps().iter().enumerate() {
            if i >= Q_BASE {
                if e < 0 {
                    return Err(Error::Parse("negative power of q".into()));
                }
                qd[i - Q_BASE] = e as u32;
            } else {
                tm.push(e);
            }
        }
        let t = Laurent::term(super::poly::Mono::new(&tm), c.clone());
        let coeff = RationalFunction::new(t, f.den().clone())?;
        let mut one = QSeries::zero(k, bound);
        one.add_term(Degree::new(qd), &coeff);
        out = out.add(&one)?;
    }
    Ok(out)
}
