//! Sparse multivariate polynomials over F_p.
//!
//! Terms are kept sorted in descending graded reverse lexicographic order with
//! no zero coefficients, so equality is structural and printing is canonical.

mod gcd;
mod point;
mod text;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

pub use gcd::{is_squarefree, multivariate_gcd, resultant};
pub use point::ProjPoint;

use crate::arith::{ExtField, FieldElement, PrimeField};
use crate::error::{Error, Result};

/// Maximum number of variables a form may use (ambient coordinates plus auxiliaries).
pub const MAX_VARS: usize = 8;

/// An exponent vector with cached total degree.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: [u16; MAX_VARS],
    deg: u32,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_VARS, "too many variables");
        let mut m = Monomial::default();
        for (i, &e) in exps.iter().enumerate() {
            m.exps[i] = u16::try_from(e).expect("exponent overflow");
            m.deg += e;
        }
        m
    }

    pub fn var(i: usize) -> Self {
        let mut m = Monomial::default();
        m.exps[i] = 1;
        m.deg = 1;
        m
    }

    #[inline]
    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i] as u32
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        self.exps[..nvars].iter().map(|&e| e as u32).collect()
    }

    #[inline]
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i].checked_add(other.exps[i]).expect("exponent overflow");
        }
        out.deg = self.deg + other.deg;
        out
    }

    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        self.deg <= other.deg && (0..MAX_VARS).all(|i| self.exps[i] <= other.exps[i])
    }

    /// `other / self`, assuming divisibility.
    #[inline]
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let mut out = Monomial::default();
        for i in 0..MAX_VARS {
            out.exps[i] = other.exps[i] - self.exps[i];
        }
        out.deg = other.deg - self.deg;
        out
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut out = Monomial::default();
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i].max(other.exps[i]);
            out.deg += out.exps[i] as u32;
        }
        out
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Monomial::default();
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i].min(other.exps[i]);
            out.deg += out.exps[i] as u32;
        }
        out
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        (0..MAX_VARS).all(|i| self.exps[i] == 0 || other.exps[i] == 0)
    }

    fn with_exp(&self, i: usize, e: u32) -> Monomial {
        let mut out = *self;
        out.deg = out.deg - out.exps[i] as u32 + e;
        out.exps[i] = e as u16;
        out
    }

    /// Highest variable index with a nonzero exponent.
    pub fn last_var(&self) -> Option<usize> {
        (0..MAX_VARS).rev().find(|&i| self.exps[i] != 0)
    }
}

impl Ord for Monomial {
    /// Graded reverse lexicographic order.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.deg.cmp(&other.deg) {
            Ordering::Equal => {}
            o => return o,
        }
        for i in (0..MAX_VARS).rev() {
            match self.exps[i].cmp(&other.exps[i]) {
                Ordering::Equal => continue,
                o => return o.reverse(),
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.exps[..self.last_var().map_or(0, |v| v + 1)])
    }
}

/// A sparse polynomial over F_p in `nvars` variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparseForm {
    field: PrimeField,
    nvars: usize,
    terms: Vec<(Monomial, u32)>,
}

impl SparseForm {
    pub fn zero(field: PrimeField, nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables are supported");
        SparseForm { field, nvars, terms: Vec::new() }
    }

    pub fn constant(field: PrimeField, nvars: usize, c: i64) -> Self {
        Self::term(field, nvars, Monomial::one(), field.reduce(c))
    }

    pub fn one(field: PrimeField, nvars: usize) -> Self {
        Self::constant(field, nvars, 1)
    }

    pub fn var(field: PrimeField, nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        Self::term(field, nvars, Monomial::var(i), 1)
    }

    pub fn term(field: PrimeField, nvars: usize, mono: Monomial, c: u32) -> Self {
        let mut f = Self::zero(field, nvars);
        if !c.is_multiple_of(field.p()) {
            f.terms.push((mono, c % field.p()));
        }
        f
    }

    /// Builds a form from unsorted terms, combining duplicates.
    pub fn from_terms(field: PrimeField, nvars: usize, terms: impl IntoIterator<Item = (Monomial, u32)>) -> Self {
        let mut acc: HashMap<Monomial, u32> = HashMap::new();
        for (m, c) in terms {
            let e = acc.entry(m).or_insert(0);
            *e = field.add(*e, c % field.p());
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|&(_, c)| c != 0).collect();
        terms.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
        SparseForm { field, nvars, terms }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Terms in descending graded reverse lexicographic order.
    pub fn terms(&self) -> &[(Monomial, u32)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.deg == 0)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.deg == 0 && self.terms[0].1 == 1
    }

    pub fn leading_term(&self) -> Option<(Monomial, u32)> {
        self.terms.first().copied()
    }

    pub fn leading_monomial(&self) -> Option<Monomial> {
        self.terms.first().map(|t| t.0)
    }

    pub fn leading_coeff(&self) -> u32 {
        self.terms.first().map_or(0, |t| t.1)
    }

    pub fn coeff(&self, m: &Monomial) -> u32 {
        self.terms.binary_search_by(|(t, _)| m.cmp(t)).map(|i| self.terms[i].1).unwrap_or(0)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.0.deg).max()
    }

    /// The common degree of all terms, if the form is nonzero and homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.terms.first()?.0.deg;
        self.terms.iter().all(|t| t.0.deg == d).then_some(d)
    }

    /// Zero counts as homogeneous of every degree.
    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|t| t.0.exp(var)).max().unwrap_or(0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.iter().any(|t| t.0.exp(var) > 0)
    }

    fn same_ring(&self, other: &SparseForm) {
        assert_eq!(self.field, other.field, "mixing characteristics");
        assert_eq!(self.nvars, other.nvars, "mixing variable counts");
    }

    pub fn add(&self, other: &SparseForm) -> SparseForm {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &SparseForm) -> SparseForm {
        self.combine(other, self.field.p() - 1)
    }

    /// self + c * other, merging the sorted term lists.
    fn combine(&self, other: &SparseForm, c: u32) -> SparseForm {
        self.same_ring(other);
        let fp = self.field;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Greater,
                _ => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    out.push(self.terms[i]);
                    i += 1;
                }
                Ordering::Less => {
                    let (m, b) = other.terms[j];
                    out.push((m, fp.mul(b, c)));
                    j += 1;
                }
                Ordering::Equal => {
                    let v = fp.add(self.terms[i].1, fp.mul(other.terms[j].1, c));
                    if v != 0 {
                        out.push((self.terms[i].0, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        SparseForm { field: fp, nvars: self.nvars, terms: out }
    }

    /// self - c * mono * other, the reduction step.
    pub fn sub_scaled_shift(&self, c: u32, mono: &Monomial, other: &SparseForm) -> SparseForm {
        let shifted = other.mul_term(mono, c);
        self.sub(&shifted)
    }

    pub fn neg(&self) -> SparseForm {
        self.scale(self.field.p() - 1)
    }

    pub fn scale(&self, c: u32) -> SparseForm {
        let c = c % self.field.p();
        if c == 0 {
            return Self::zero(self.field, self.nvars);
        }
        let fp = self.field;
        SparseForm { field: fp, nvars: self.nvars, terms: self.terms.iter().map(|&(m, a)| (m, fp.mul(a, c))).collect() }
    }

    /// Multiplication by c * mono; preserves the order since grevlex is a monomial order.
    pub fn mul_term(&self, mono: &Monomial, c: u32) -> SparseForm {
        let c = c % self.field.p();
        if c == 0 {
            return Self::zero(self.field, self.nvars);
        }
        let fp = self.field;
        SparseForm { field: fp, nvars: self.nvars, terms: self.terms.iter().map(|&(m, a)| (m.mul(mono), fp.mul(a, c))).collect() }
    }

    pub fn mul(&self, other: &SparseForm) -> SparseForm {
        self.same_ring(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.field, self.nvars);
        }
        if other.terms.len() == 1 {
            return self.mul_term(&other.terms[0].0, other.terms[0].1);
        }
        if self.terms.len() == 1 {
            return other.mul_term(&self.terms[0].0, self.terms[0].1);
        }
        let p = self.field.p() as u64;
        let mut acc: HashMap<Monomial, u64> = HashMap::with_capacity(self.terms.len() * other.terms.len() / 2);
        for &(ma, ca) in &self.terms {
            for &(mb, cb) in &other.terms {
                let e = acc.entry(ma.mul(&mb)).or_insert(0);
                *e = (*e + ca as u64 * cb as u64) % p;
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|&(_, c)| c != 0).map(|(m, c)| (m, c as u32)).collect();
        terms.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
        SparseForm { field: self.field, nvars: self.nvars, terms }
    }

    pub fn pow(&self, mut e: u32) -> SparseForm {
        let mut result = Self::one(self.field, self.nvars);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> SparseForm {
        match self.terms.first() {
            None => self.clone(),
            Some(&(_, c)) => self.scale(self.field.inv(c)),
        }
    }

    /// Exact formal partial derivative with respect to `var`.
    pub fn partial_derivative(&self, var: usize) -> SparseForm {
        assert!(var < self.nvars, "variable index out of range");
        let fp = self.field;
        let terms = self.terms.iter().filter_map(|&(m, c)| {
            let e = m.exp(var);
            if e == 0 {
                return None;
            }
            let coeff = fp.mul(c, e % fp.p());
            (coeff != 0).then(|| (m.with_exp(var, e - 1), coeff))
        });
        Self::from_terms(fp, self.nvars, terms)
    }

    pub fn gradient(&self) -> Vec<SparseForm> {
        (0..self.nvars).map(|i| self.partial_derivative(i)).collect()
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a remainder.
    pub fn div_exact(&self, divisor: &SparseForm) -> Option<SparseForm> {
        self.same_ring(divisor);
        let (lm, lc) = divisor.leading_term()?;
        let inv = self.field.inv(lc);
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((m, c)) = rem.leading_term() {
            if !lm.divides(&m) {
                return None;
            }
            let q = lm.quotient_of(&m);
            let qc = self.field.mul(c, inv);
            rem = rem.sub_scaled_shift(qc, &q, divisor);
            quot.push((q, qc));
        }
        Some(Self::from_terms(self.field, self.nvars, quot))
    }

    /// Sets variable `var` to the constant 1 (the variable stays in the ring, unused).
    pub fn dehomogenize(&self, var: usize) -> SparseForm {
        Self::from_terms(self.field, self.nvars, self.terms.iter().map(|&(m, c)| (m.with_exp(var, 0), c)))
    }

    /// Multiplies each term by the power of `var` bringing it to total degree `degree`.
    pub fn homogenize(&self, var: usize, degree: u32) -> Result<SparseForm> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(m, c) in &self.terms {
            if m.deg > degree {
                return Err(Error::DegenerateInput(format!("term of degree {} exceeds {}", m.deg, degree)));
            }
            terms.push((m.with_exp(var, m.exp(var) + degree - m.deg), c));
        }
        Ok(Self::from_terms(self.field, self.nvars, terms))
    }

    /// Re-embeds into a ring with `nvars` variables (must not drop a used variable).
    pub fn with_nvars(&self, nvars: usize) -> SparseForm {
        assert!(nvars <= MAX_VARS);
        for &(m, _) in &self.terms {
            assert!(m.last_var().is_none_or(|v| v < nvars), "dropping a used variable");
        }
        SparseForm { field: self.field, nvars, terms: self.terms.clone() }
    }

    /// Substitutes `x_i -> images[i]` for every variable.
    pub fn compose(&self, images: &[SparseForm]) -> SparseForm {
        assert_eq!(images.len(), self.nvars);
        let target_vars = images[0].nvars;
        let mut out = Self::zero(self.field, target_vars);
        let mut powers: Vec<Vec<SparseForm>> = images.iter().map(|g| vec![Self::one(self.field, target_vars), g.clone()]).collect();
        for &(m, c) in &self.terms {
            let mut t = Self::constant(self.field, target_vars, c as i64);
            for (i, pw) in powers.iter_mut().enumerate() {
                let e = m.exp(i) as usize;
                while pw.len() <= e {
                    let next = pw.last().unwrap().mul(&images[i]);
                    pw.push(next);
                }
                if e > 0 {
                    t = t.mul(&pw[e]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Coefficients as a univariate polynomial in `var` (index = power of `var`).
    pub fn to_univariate(&self, var: usize) -> Vec<SparseForm> {
        let deg = self.degree_in(var) as usize;
        let mut buckets: Vec<Vec<(Monomial, u32)>> = vec![Vec::new(); deg + 1];
        for &(m, c) in &self.terms {
            buckets[m.exp(var) as usize].push((m.with_exp(var, 0), c));
        }
        buckets.into_iter().map(|t| Self::from_terms(self.field, self.nvars, t)).collect()
    }

    pub fn from_univariate(coeffs: &[SparseForm], var: usize, field: PrimeField, nvars: usize) -> SparseForm {
        let mut out = Self::zero(field, nvars);
        for (i, c) in coeffs.iter().enumerate() {
            out = out.add(&c.mul_term(&Monomial::var(var).pow_exp(var, i as u32), 1));
        }
        out
    }

    /// Evaluates at an arbitrary (affine) point with extension-field coordinates.
    pub fn eval(&self, point: &[FieldElement]) -> FieldElement {
        assert_eq!(point.len(), self.nvars, "point has wrong number of coordinates");
        let field: &Arc<ExtField> = point[0].field();
        let mut powers: Vec<Vec<FieldElement>> = point.iter().map(|x| vec![FieldElement::one(field), x.clone()]).collect();
        let mut acc = FieldElement::zero(field);
        for &(m, c) in &self.terms {
            let mut t = FieldElement::from_int(field, c as i64);
            for (i, pw) in powers.iter_mut().enumerate() {
                let e = m.exp(i) as usize;
                if e == 0 {
                    continue;
                }
                while pw.len() <= e {
                    let next = pw.last().unwrap() * &point[i];
                    pw.push(next);
                }
                t = &t * &pw[e];
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Value at the normalized representative of a projective point.
    pub fn evaluate(&self, point: &ProjPoint) -> Result<FieldElement> {
        if !self.is_homogeneous() {
            return Err(Error::NotHomogeneous);
        }
        Ok(self.eval(point.coords()))
    }

    pub fn vanishes_at(&self, point: &ProjPoint) -> Result<bool> {
        Ok(self.evaluate(point)?.is_zero())
    }

    /// Raises every coefficient-free monomial to the p-th power: f(x)^p for f over F_p.
    pub fn frobenius_power(&self) -> SparseForm {
        let p = self.field.p();
        Self::from_terms(
            self.field,
            self.nvars,
            self.terms.iter().map(|&(m, c)| {
                let mut e = Vec::with_capacity(self.nvars);
                for i in 0..self.nvars {
                    e.push(m.exp(i) * p);
                }
                (Monomial::from_exponents(&e), c)
            }),
        )
    }

    /// All monomials of the given degree in `nvars` variables, in descending order.
    pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; nvars];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i + 1 == cur.len() {
                cur[i] = left;
                out.push(Monomial::from_exponents(cur));
                return;
            }
            for e in 0..=left {
                cur[i] = e;
                rec(i + 1, left - e, cur, out);
            }
        }
        if nvars == 0 {
            return out;
        }
        rec(0, degree, &mut cur, &mut out);
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }
}

impl Monomial {
    fn pow_exp(&self, var: usize, e: u32) -> Monomial {
        self.with_exp(var, e)
    }
}

impl fmt::Display for SparseForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", text::print(self))
    }
}

impl fmt::Debug for SparseForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", text::print(self))
    }
}

impl SparseForm {
    /// Parses the canonical text grammar: variables `x`, `y`, `z`, `w0`, `w1`, …
    /// by position, `^` powers, optional `*`, integer coefficients reduced mod p.
    pub fn parse(field: PrimeField, nvars: usize, s: &str) -> Result<SparseForm> {
        text::parse(field, nvars, s)
    }
}

/// Name of variable `i` in the text grammar.
pub fn var_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        i => format!("w{}", i - 3),
    }
}

/// Determinant of a square matrix of forms by cofactor expansion (small sizes only).
pub fn determinant(rows: &[Vec<SparseForm>]) -> SparseForm {
    let n = rows.len();
    assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
    let cols: Vec<usize> = (0..n).collect();
    det_rec(rows, 0, &cols)
}

fn det_rec(rows: &[Vec<SparseForm>], r: usize, cols: &[usize]) -> SparseForm {
    let proto = &rows[0][0];
    if cols.len() == 1 {
        return rows[r][cols[0]].clone();
    }
    let mut acc = SparseForm::zero(proto.field(), proto.nvars());
    for (k, &c) in cols.iter().enumerate() {
        if rows[r][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let sub = rows[r][c].mul(&det_rec(rows, r + 1, &rest));
        acc = if k % 2 == 0 { acc.add(&sub) } else { acc.sub(&sub) };
    }
    acc
}

/// All maximal minors of a k × n matrix (k ≤ n), columns chosen in lexicographic order.
pub fn maximal_minors(rows: &[Vec<SparseForm>]) -> Vec<SparseForm> {
    let k = rows.len();
    let n = rows[0].len();
    let mut out = Vec::new();
    let mut choice: Vec<usize> = (0..k).collect();
    loop {
        let sub: Vec<Vec<SparseForm>> = rows.iter().map(|r| choice.iter().map(|&c| r[c].clone()).collect()).collect();
        out.push(determinant(&sub));
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if choice[i] < n - k + i {
                choice[i] += 1;
                for j in i + 1..k {
                    choice[j] = choice[j - 1] + 1;
                }
                break;
            }
        }
    }
}
