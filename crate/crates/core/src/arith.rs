//! Exact arithmetic in prime fields F_p and their extensions F_{p^k}.
//!
//! Extension fields are built as F_p[w]/(modulus) where the modulus is the first
//! monic irreducible polynomial of degree k, scanning coefficient tuples
//! `(c_0, …, c_{k-1})` lexicographically with the constant term most significant.
//! Fields are interned, so two calls to [`make_extension`] with the same
//! arguments return the same `Arc`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Largest supported characteristic.
pub const MAX_PRIME: u64 = 1 << 31;

/// Deterministic primality test for the supported range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    // Miller-Rabin with these bases is deterministic below 3.3e24.
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The prime field F_p, as a thin wrapper around the characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p > MAX_PRIME || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p: p as u32 })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (if s >= self.p as u64 { s - self.p as u64 } else { s }) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.p as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut b: u32, mut e: u64) -> u32 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }
}

// Dense univariate polynomials over F_p, ascending coefficients, used for moduli.

fn fp_trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_rem(fp: PrimeField, a: &[u32], m: &[u32]) -> Vec<u32> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let dm = m.len() - 1;
    let inv = fp.inv(m[dm]);
    while r.len() > dm {
        let lead = fp.mul(*r.last().unwrap(), inv);
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            r[shift + i] = fp.sub(r[shift + i], fp.mul(lead, c));
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_mulmod(fp: PrimeField, a: &[u32], b: &[u32], m: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = fp.add(out[i + j], fp.mul(x, y));
        }
    }
    fp_rem(fp, &out, m)
}

fn fp_gcd(fp: PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    fp_trim(&mut a);
    fp_trim(&mut b);
    while !b.is_empty() {
        let r = fp_rem(fp, &a, &b);
        a = b;
        b = r;
    }
    a
}

/// x^(p^i) mod m for i = 1..=k, computed by repeated p-th powering.
fn frobenius_powers_of_x(fp: PrimeField, m: &[u32], k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::with_capacity(k);
    let mut cur = fp_rem(fp, &[0, 1], m);
    for _ in 0..k {
        // cur <- cur^p
        let mut acc = vec![1u32];
        let mut base = cur.clone();
        let mut e = fp.p() as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = fp_mulmod(fp, &acc, &base, m);
            }
            base = fp_mulmod(fp, &base, &base, m);
            e >>= 1;
        }
        cur = acc;
        out.push(cur.clone());
    }
    out
}

/// Irreducibility by gcd(x^{p^i} - x, m) = 1 for i < k and x^{p^k} = x mod m.
pub fn is_irreducible_mod_p(fp: PrimeField, m: &[u32]) -> bool {
    let k = m.len() - 1;
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    let powers = frobenius_powers_of_x(fp, m, k);
    let x = fp_rem(fp, &[0, 1], m);
    for pw in &powers[..k - 1] {
        let mut diff = pw.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = fp.sub(diff[1], 1);
        fp_trim(&mut diff);
        let g = fp_gcd(fp, &diff, m);
        if g.len() != 1 {
            return false;
        }
    }
    powers[k - 1] == x
}

/// The finite field F_{p^k} = F_p[w]/(modulus).
#[derive(Debug, PartialEq, Eq)]
pub struct ExtField {
    base: PrimeField,
    k: usize,
    /// Monic modulus, ascending coefficients, length k + 1.
    modulus: Vec<u32>,
}

impl ExtField {
    pub fn base(&self) -> PrimeField {
        self.base
    }

    pub fn p(&self) -> u32 {
        self.base.p()
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Number of elements, if it fits in a u64.
    pub fn order(&self) -> Option<u64> {
        (self.p() as u64).checked_pow(self.k as u32)
    }
}

type FieldCache = Mutex<BTreeMap<(u32, usize), Arc<ExtField>>>;

fn field_cache() -> &'static FieldCache {
    static CACHE: OnceLock<FieldCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(BTreeMap::new()))
}

/// Returns the deterministic extension F_{p^k}.
pub fn make_extension(p: u64, k: usize) -> Result<Arc<ExtField>> {
    let base = PrimeField::new(p)?;
    if k == 0 {
        return Err(Error::DegenerateInput("extension degree must be at least 1".into()));
    }
    let key = (base.p(), k);
    if let Some(f) = field_cache().lock().unwrap().get(&key) {
        return Ok(f.clone());
    }
    let modulus = if k == 1 { vec![0, 1] } else { first_irreducible(base, k) };
    let field = Arc::new(ExtField { base, k, modulus });
    Ok(field_cache().lock().unwrap().entry(key).or_insert(field).clone())
}

fn first_irreducible(fp: PrimeField, k: usize) -> Vec<u32> {
    // Tuples (c_0, ..., c_{k-1}) in lexicographic order with c_0 most significant.
    let mut tuple = vec![0u32; k];
    loop {
        let mut m = tuple.clone();
        m.push(1);
        if is_irreducible_mod_p(fp, &m) {
            return m;
        }
        let mut i = k;
        loop {
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < fp.p() {
                break;
            }
            tuple[i] = 0;
            assert!(i > 0, "no irreducible polynomial of degree {k}");
        }
    }
}

/// An element of F_{p^k}: coefficients in the power basis 1, w, …, w^{k-1}.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Arc<ExtField>,
    coeffs: Vec<u32>,
}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.field.p().hash(state);
        self.coeffs.hash(state);
    }
}

impl FieldElement {
    pub fn zero(field: &Arc<ExtField>) -> Self {
        FieldElement { field: field.clone(), coeffs: vec![0; field.k] }
    }

    pub fn one(field: &Arc<ExtField>) -> Self {
        Self::from_int(field, 1)
    }

    pub fn from_int(field: &Arc<ExtField>, c: i64) -> Self {
        let mut e = Self::zero(field);
        e.coeffs[0] = field.base.reduce(c);
        e
    }

    /// The generator w of the power basis.
    pub fn generator(field: &Arc<ExtField>) -> Self {
        Self::from_coeffs(field, &[0, 1])
    }

    pub fn from_coeffs(field: &Arc<ExtField>, coeffs: &[u32]) -> Self {
        let reduced = fp_rem(field.base, coeffs, &field.modulus);
        let mut c = vec![0; field.k];
        for (i, v) in reduced.into_iter().enumerate() {
            c[i] = v % field.p();
        }
        FieldElement { field: field.clone(), coeffs: c }
    }

    /// Element with the given enumeration index (base-p digits, constant term least significant).
    pub fn from_index(field: &Arc<ExtField>, mut idx: u64) -> Self {
        let p = field.p() as u64;
        let mut c = vec![0u32; field.k];
        for slot in c.iter_mut() {
            *slot = (idx % p) as u32;
            idx /= p;
        }
        FieldElement { field: field.clone(), coeffs: c }
    }

    pub fn index(&self) -> u64 {
        let p = self.field.p() as u64;
        self.coeffs.iter().rev().fold(0u64, |acc, &c| acc * p + c as u64)
    }

    pub fn field(&self) -> &Arc<ExtField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// The element as a prime-field value, when it lies in F_p.
    pub fn as_prime(&self) -> Option<u32> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    pub fn scale(&self, c: u32) -> Self {
        let fp = self.field.base;
        FieldElement { field: self.field.clone(), coeffs: self.coeffs.iter().map(|&a| fp.mul(a, c)).collect() }
    }

    pub fn add_prime(&self, c: u32) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = self.field.base.add(out.coeffs[0], c);
        out
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut r = Self::one(&self.field);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = &r * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse by the extended Euclidean algorithm over F_p.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let fp = self.field.base;
        let (mut r0, mut r1) = (self.field.modulus.clone(), self.coeffs.clone());
        fp_trim(&mut r1);
        let (mut s0, mut s1): (Vec<u32>, Vec<u32>) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            // q = r0 / r1
            let mut q = vec![0u32; r0.len().saturating_sub(r1.len()) + 1];
            let mut rem = r0.clone();
            let inv = fp.inv(*r1.last().unwrap());
            while rem.len() >= r1.len() && !rem.is_empty() {
                let shift = rem.len() - r1.len();
                let lead = fp.mul(*rem.last().unwrap(), inv);
                q[shift] = lead;
                for (i, &c) in r1.iter().enumerate() {
                    rem[shift + i] = fp.sub(rem[shift + i], fp.mul(lead, c));
                }
                fp_trim(&mut rem);
            }
            let mut qs = vec![0u32; q.len() + s1.len()];
            for (i, &a) in q.iter().enumerate() {
                for (j, &b) in s1.iter().enumerate() {
                    qs[i + j] = fp.add(qs[i + j], fp.mul(a, b));
                }
            }
            let mut s2 = s0.clone();
            s2.resize(s2.len().max(qs.len()), 0);
            for (i, &c) in qs.iter().enumerate() {
                s2[i] = fp.sub(s2[i], c);
            }
            fp_trim(&mut s2);
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant
        let c = fp.inv(r0[0]);
        let scaled: Vec<u32> = s0.iter().map(|&a| fp.mul(a, c)).collect();
        Some(Self::from_coeffs(&self.field, &scaled))
    }

    /// Parses the `w`-generator grammar, e.g. `2+w`, `1+2*w^2`, `-w`.
    pub fn parse(field: &Arc<ExtField>, text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::parse("empty field element"));
        }
        let mut acc = Self::zero(field);
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = 1i64;
            while i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                if bytes[i] == b'-' {
                    sign = -sign;
                }
                i += 1;
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let coeff: i64 = if i > start {
                s[start..i]
                    .parse::<i64>()
                    .map(|c| c.rem_euclid(field.p() as i64))
                    .map_err(|_| Error::parse(format!("bad coefficient in '{text}'")))?
            } else {
                1
            };
            if i < bytes.len() && bytes[i] == b'*' {
                i += 1;
            }
            let mut power = 0u64;
            if i < bytes.len() && bytes[i] == b'w' {
                i += 1;
                power = 1;
                if i < bytes.len() && bytes[i] == b'^' {
                    i += 1;
                    let ps = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    power = s[ps..i].parse().map_err(|_| Error::parse(format!("bad exponent in '{text}'")))?;
                }
            } else if i == start {
                return Err(Error::parse(format!("unexpected character in '{text}'")));
            }
            if i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
                return Err(Error::parse(format!("unexpected character in '{text}'")));
            }
            let term = Self::generator_power(field, power).scale(field.base.reduce(sign * coeff));
            acc = &acc + &term;
        }
        Ok(acc)
    }

    fn generator_power(field: &Arc<ExtField>, power: u64) -> Self {
        if field.k == 1 {
            // w is the root of the trivial modulus x, i.e. zero
            return if power == 0 { Self::one(field) } else { Self::zero(field) };
        }
        Self::generator(field).pow(power)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            parts.push(match (i, c) {
                (0, c) => format!("{c}"),
                (1, 1) => "w".to_string(),
                (1, c) => format!("{c}*w"),
                (i, 1) => format!("w^{i}"),
                (i, c) => format!("{c}*w^{i}"),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in F_{}^{}", self, self.field.p(), self.field.k)
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        debug_assert!(Arc::ptr_eq(&self.field, &rhs.field) || self.field == rhs.field);
        let fp = self.field.base;
        FieldElement { field: self.field.clone(), coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| fp.add(a, b)).collect() }
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        let fp = self.field.base;
        FieldElement { field: self.field.clone(), coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| fp.sub(a, b)).collect() }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let fp = self.field.base;
        FieldElement { field: self.field.clone(), coeffs: self.coeffs.iter().map(|&a| fp.neg(a)).collect() }
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        let field = &self.field;
        let fp = field.base;
        let k = field.k;
        if k == 1 {
            return FieldElement { field: field.clone(), coeffs: vec![fp.mul(self.coeffs[0], rhs.coeffs[0])] };
        }
        let mut prod = vec![0u64; 2 * k - 1];
        let p = fp.p() as u64;
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a as u64 * b as u64) % p;
            }
        }
        // reduce by the monic modulus from the top
        for top in (k..2 * k - 1).rev() {
            let lead = prod[top];
            if lead == 0 {
                continue;
            }
            prod[top] = 0;
            for (i, &m) in field.modulus[..k].iter().enumerate() {
                let idx = top - k + i;
                prod[idx] = (prod[idx] + (p - lead) * m as u64) % p;
            }
        }
        FieldElement { field: field.clone(), coeffs: prod[..k].iter().map(|&c| c as u32).collect() }
    }
}

/// The Frobenius endomorphism a ↦ a^p.
pub fn frobenius(a: &FieldElement) -> FieldElement {
    a.pow(a.field.p() as u64)
}

/// Iterates every element of the field in enumeration-index order.
pub fn elements(field: &Arc<ExtField>) -> impl Iterator<Item = FieldElement> + '_ {
    let q = field.order().expect("field too large to enumerate");
    (0..q).map(move |i| FieldElement::from_index(field, i))
}

type RootCache = Mutex<BTreeMap<(u32, usize, usize), FieldElement>>;

fn root_cache() -> &'static RootCache {
    static CACHE: OnceLock<RootCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(BTreeMap::new()))
}

/// Image of the source generator in `target`: the first root of the source
/// modulus in enumeration-index order.
fn embedding_root(source: &Arc<ExtField>, target: &Arc<ExtField>) -> FieldElement {
    let key = (source.p(), source.k, target.k);
    if let Some(r) = root_cache().lock().unwrap().get(&key) {
        return r.clone();
    }
    let root = elements(target)
        .find(|cand| {
            let mut acc = FieldElement::zero(target);
            for &c in source.modulus.iter().rev() {
                acc = (&acc * cand).add_prime(c);
            }
            acc.is_zero()
        })
        .expect("irreducible modulus must split in the larger field");
    root_cache().lock().unwrap().insert(key, root.clone());
    root
}

/// Embeds `a` into `target` along the fixed embedding determined by the
/// first root of the source modulus.
pub fn embed(a: &FieldElement, target: &Arc<ExtField>) -> Result<FieldElement> {
    let source = &a.field;
    if source.p() != target.p() {
        return Err(Error::FieldMismatch(format!("characteristic {} vs {}", source.p(), target.p())));
    }
    if !target.k.is_multiple_of(source.k) {
        return Err(Error::NoEmbedding { from: source.k, to: target.k });
    }
    if source.k == target.k {
        return Ok(FieldElement { field: target.clone(), coeffs: a.coeffs.clone() });
    }
    if source.k == 1 {
        return Ok(FieldElement::from_int(target, a.coeffs[0] as i64));
    }
    let root = embedding_root(source, target);
    let mut acc = FieldElement::zero(target);
    for &c in a.coeffs.iter().rev() {
        acc = (&acc * &root).add_prime(c);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64, k: usize) -> Arc<ExtField> {
        make_extension(p, k).unwrap()
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(2_147_483_649));
        assert!(matches!(make_extension(4, 1), Err(Error::NotPrime(4))));
    }

    #[test]
    fn moduli_are_deterministic() {
        assert_eq!(f(3, 1).modulus(), &[0, 1]);
        // x^2 + 1 is the first irreducible monic quadratic over F_3
        assert_eq!(f(3, 2).modulus(), &[1, 0, 1]);
        assert!(Arc::ptr_eq(&f(3, 2), &f(3, 2)));
        for (p, k) in [(2, 2), (2, 3), (3, 3), (5, 2), (7, 2), (2, 4)] {
            let m = f(p, k).modulus().to_vec();
            assert_eq!(m.len(), k + 1);
            assert!(is_irreducible_mod_p(PrimeField::new(p).unwrap(), &m));
        }
    }

    #[test]
    fn first_quadratic_over_f3_by_root_scan() {
        // independent oracle: a monic quadratic is irreducible iff it has no root in F_3
        let mut first = None;
        'outer: for c0 in 0..3u32 {
            for c1 in 0..3u32 {
                if (0..3u32).all(|x| (x * x + c1 * x + c0) % 3 != 0) {
                    first = Some((c0, c1));
                    break 'outer;
                }
            }
        }
        assert_eq!(first, Some((1, 0)));
    }

    #[test]
    fn frobenius_examples() {
        let f3 = f(3, 1);
        let two = FieldElement::from_int(&f3, 2);
        assert_eq!(frobenius(&two), two);
        let f9 = f(3, 2);
        let w = FieldElement::generator(&f9);
        assert_eq!(frobenius(&w), w.scale(2));
        assert!(frobenius(&FieldElement::zero(&f9)).is_zero());
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, k) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 2), (3, 3)] {
            let fld = f(p, k);
            let els: Vec<_> = elements(&fld).collect();
            let q = els.len() as u64;
            let one = FieldElement::one(&fld);
            for a in &els {
                assert_eq!(a.pow(q), *a);
                if !a.is_zero() {
                    assert_eq!(&a.inv().unwrap() * a, one);
                }
                for b in &els {
                    assert_eq!(frobenius(&(a + b)), &frobenius(a) + &frobenius(b));
                    assert_eq!(frobenius(&(a * b)), &frobenius(a) * &frobenius(b));
                    assert_eq!(a * b, b * a);
                    assert_eq!(&(a - b) + b, *a);
                }
            }
            if q <= 27 {
                for a in &els {
                    for b in &els {
                        for c in &els {
                            assert_eq!(&(a * b) * c, a * &(b * c));
                            assert_eq!(a * &(b + c), &(a * b) + &(a * c));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn embedding() {
        let f3 = f(3, 1);
        let f9 = f(3, 2);
        let f27 = f(3, 3);
        let f81 = f(3, 4);
        let two = FieldElement::from_int(&f3, 2);
        assert_eq!(embed(&two, &f9).unwrap(), FieldElement::from_int(&f9, 2));
        let w = FieldElement::generator(&f9);
        let img = embed(&w, &f81).unwrap();
        // the image is a root of x^2 + 1, and the first one in index order
        assert!((&img * &img).add_prime(1).is_zero());
        let first = elements(&f81).find(|e| (e * e).add_prime(1).is_zero()).unwrap();
        assert_eq!(img, first);
        assert!(matches!(embed(&w, &f27), Err(Error::NoEmbedding { from: 2, to: 3 })));
        // injective, a homomorphism, and commutes with Frobenius
        let els: Vec<_> = elements(&f9).collect();
        let imgs: Vec<_> = els.iter().map(|a| embed(a, &f81).unwrap()).collect();
        for (i, a) in els.iter().enumerate() {
            assert_eq!(embed(&frobenius(a), &f81).unwrap(), frobenius(&imgs[i]));
            for (j, b) in els.iter().enumerate() {
                if i != j {
                    assert_ne!(imgs[i], imgs[j]);
                }
                assert_eq!(embed(&(a * b), &f81).unwrap(), &imgs[i] * &imgs[j]);
            }
        }
    }

    #[test]
    fn print_and_parse() {
        let f9 = f(3, 2);
        let e = FieldElement::from_coeffs(&f9, &[2, 1]);
        assert_eq!(e.to_string(), "2+w");
        assert_eq!(FieldElement::parse(&f9, "2+w").unwrap(), e);
        assert_eq!(FieldElement::parse(&f9, "w^2").unwrap(), FieldElement::from_int(&f9, 2));
        assert_eq!(FieldElement::parse(&f9, "-w").unwrap().to_string(), "2*w");
        for a in elements(&f9) {
            assert_eq!(FieldElement::parse(&f9, &a.to_string()).unwrap(), a);
        }
        assert!(FieldElement::parse(&f9, "2+v").is_err());
    }
}
