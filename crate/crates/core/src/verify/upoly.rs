//! Dense univariate polynomials over F_{p^k}, for fiber polynomials.

use std::sync::Arc;

use crate::arith::{ExtField, FieldElement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UPoly {
    field: Arc<ExtField>,
    /// Coefficients from the constant term up; no trailing zeros.
    coeffs: Vec<FieldElement>,
}

impl UPoly {
    pub fn new(field: &Arc<ExtField>, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { field: field.clone(), coeffs }
    }

    pub fn zero(field: &Arc<ExtField>) -> Self {
        UPoly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn x(field: &Arc<ExtField>) -> Self {
        UPoly::new(field, vec![FieldElement::zero(field), FieldElement::one(field)])
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let mut acc = FieldElement::zero(&self.field);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = FieldElement::zero(&self.field);
        let coeffs = (0..n).map(|i| self.coeffs.get(i).unwrap_or(&zero) - other.coeffs.get(i).unwrap_or(&zero)).collect();
        UPoly::new(&self.field, coeffs)
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero(&self.field);
        }
        let mut out = vec![FieldElement::zero(&self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UPoly::new(&self.field, out)
    }

    /// Remainder of division by a nonzero divisor.
    pub fn rem(&self, divisor: &UPoly) -> UPoly {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead_inv = divisor.coeffs[dd].inv().expect("leading coefficient is nonzero");
        let mut r = self.coeffs.clone();
        while r.len() > dd {
            let top = r.len() - 1;
            let c = &r[top] * &lead_inv;
            if !c.is_zero() {
                for (i, d) in divisor.coeffs.iter().enumerate() {
                    let idx = top - dd + i;
                    r[idx] = &r[idx] - &(&c * d);
                }
            }
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        UPoly::new(&self.field, r)
    }

    pub fn monic(&self) -> UPoly {
        match self.coeffs.last() {
            None => self.clone(),
            Some(lead) => {
                let inv = lead.inv().expect("nonzero");
                UPoly::new(&self.field, self.coeffs.iter().map(|c| c * &inv).collect())
            }
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> UPoly {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.scale((i as u64 % self.field.p() as u64) as u32)).collect();
        UPoly::new(&self.field, coeffs)
    }

    /// Squarefree over the algebraic closure. Constants count as squarefree, zero does not.
    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    /// self^e modulo `modulus`.
    pub fn pow_mod(&self, mut e: u64, modulus: &UPoly) -> UPoly {
        let mut base = self.rem(modulus);
        let mut acc = UPoly::new(&self.field, vec![FieldElement::one(&self.field)]).rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(modulus);
            }
            base = base.mul(&base).rem(modulus);
            e >>= 1;
        }
        acc
    }

    /// Number of distinct roots in the subfield with q elements: deg gcd(f, x^q − x).
    pub fn distinct_roots_in(&self, q: u64) -> usize {
        match self.degree() {
            None => panic!("zero polynomial has every element as a root"),
            Some(0) => 0,
            Some(_) => {
                let x = UPoly::x(&self.field);
                let xq = x.pow_mod(q, self).sub(&x);
                self.gcd(&xq).degree().unwrap_or(0)
            }
        }
    }
}
