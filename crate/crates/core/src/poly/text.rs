//! Canonical printing and a small recursive-descent parser for forms.

use super::{var_name, Monomial, SparseForm};
use crate::arith::PrimeField;
use crate::error::{Error, Result};

pub(super) fn print(f: &SparseForm) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, &(m, c)) in f.terms().iter().enumerate() {
        if k > 0 {
            out.push('+');
        }
        let mut factors = Vec::new();
        if c != 1 || m.degree() == 0 {
            factors.push(c.to_string());
        }
        for i in 0..f.nvars() {
            match m.exp(i) {
                0 => {}
                1 => factors.push(var_name(i)),
                e => factors.push(format!("{}^{}", var_name(i), e)),
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: PrimeField,
    nvars: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: 0, col: self.pos + 1, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse().map_err(|_| self.err("number too large"))
    }

    fn expr(&mut self) -> Result<SparseForm> {
        let mut acc = SparseForm::zero(self.field, self.nvars);
        let mut sign_next = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        loop {
            let t = self.term()?;
            acc = if sign_next { acc.sub(&t) } else { acc.add(&t) };
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign_next = false;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign_next = true;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SparseForm> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() => {
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<SparseForm> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.number()?;
            let e = u32::try_from(e).map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<SparseForm> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.number()?;
                Ok(SparseForm::constant(self.field, self.nvars, (n % self.field.p() as u64) as i64))
            }
            Some(b'x') | Some(b'y') | Some(b'z') => {
                let idx = (self.src[self.pos] - b'x') as usize;
                self.pos += 1;
                self.variable(idx)
            }
            Some(b'w') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.err("expected an index after 'w'"));
                }
                let k: usize =
                    std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse().map_err(|_| self.err("bad variable index"))?;
                self.variable(k + 3)
            }
            Some(_) => Err(self.err(format!("unexpected character '{}'", self.src[self.pos] as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn variable(&self, idx: usize) -> Result<SparseForm> {
        if idx >= self.nvars {
            return Err(self.err(format!("variable {} not available with {} variables", var_name(idx), self.nvars)));
        }
        Ok(SparseForm::term(self.field, self.nvars, Monomial::var(idx), 1))
    }
}

pub(super) fn parse(field: PrimeField, nvars: usize, s: &str) -> Result<SparseForm> {
    let mut p = Parser { src: s.as_bytes(), pos: 0, field, nvars };
    let f = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}
