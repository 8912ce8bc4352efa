//! Homogeneous ideals over F_p: Gröbner bases, membership with cofactors and
//! emptiness certificates.

mod cert;
mod groebner;

use std::fmt;
use std::sync::OnceLock;

pub use cert::{
    chart_unramified_empty, find_affine_zero, find_projective_zero, projective_empty, rabinowitsch_system, ChartEmptiness, Emptiness,
    NullstellensatzCert,
};
pub use groebner::{linear_combination, Budget, Groebner};

use crate::arith::PrimeField;
use crate::error::{Error, Result};
use crate::poly::SparseForm;

/// An ideal generated by homogeneous forms, with a lazily computed Gröbner basis.
#[derive(Clone)]
pub struct HomIdeal {
    field: PrimeField,
    nvars: usize,
    generators: Vec<SparseForm>,
    cached: OnceLock<Groebner>,
}

impl HomIdeal {
    pub fn new(field: PrimeField, nvars: usize, generators: Vec<SparseForm>) -> Result<Self> {
        for g in &generators {
            if g.field() != field || g.nvars() != nvars {
                return Err(Error::FieldMismatch("generator lives in a different ring".into()));
            }
            if !g.is_homogeneous() {
                return Err(Error::NotHomogeneous);
            }
        }
        let generators = generators.into_iter().filter(|g| !g.is_zero()).collect();
        Ok(HomIdeal { field, nvars, generators, cached: OnceLock::new() })
    }

    /// The whole ring, i.e. the ideal of the empty subscheme.
    pub fn unit(field: PrimeField, nvars: usize) -> Self {
        HomIdeal { field, nvars, generators: vec![SparseForm::one(field, nvars)], cached: OnceLock::new() }
    }

    pub fn zero(field: PrimeField, nvars: usize) -> Self {
        HomIdeal { field, nvars, generators: Vec::new(), cached: OnceLock::new() }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[SparseForm] {
        &self.generators
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.generators.is_empty()
    }

    /// True if some generator is a nonzero constant.
    pub fn has_unit_generator(&self) -> bool {
        self.generators.iter().any(|g| g.is_constant() && !g.is_zero())
    }

    pub fn sum(&self, other: &HomIdeal) -> HomIdeal {
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        HomIdeal { field: self.field, nvars: self.nvars, generators: gens, cached: OnceLock::new() }
    }

    pub fn with_generators(&self, extra: &[SparseForm]) -> Result<HomIdeal> {
        let mut gens = self.generators.clone();
        gens.extend(extra.iter().cloned());
        HomIdeal::new(self.field, self.nvars, gens)
    }

    /// Reduced Gröbner basis, computed once.
    pub fn groebner(&self, budget: &Budget) -> Result<&Groebner> {
        if let Some(g) = self.cached.get() {
            return Ok(g);
        }
        let gens = if self.generators.is_empty() { vec![SparseForm::zero(self.field, self.nvars)] } else { self.generators.clone() };
        let gb = Groebner::compute(&gens, false, budget)?;
        Ok(self.cached.get_or_init(|| gb))
    }

    pub fn groebner_basis(&self, budget: &Budget) -> Result<Vec<SparseForm>> {
        Ok(self.groebner(budget)?.basis().to_vec())
    }

    pub fn contains(&self, f: &SparseForm, budget: &Budget) -> Result<bool> {
        if self.generators.is_empty() {
            return Ok(f.is_zero());
        }
        Ok(self.groebner(budget)?.contains(f))
    }

    pub fn normal_form(&self, f: &SparseForm, budget: &Budget) -> Result<SparseForm> {
        if self.generators.is_empty() {
            return Ok(f.clone());
        }
        Ok(self.groebner(budget)?.normal_form(f))
    }

    /// Emptiness of the projective zero set, read off the leading monomials:
    /// it is empty iff every variable has a pure power among them.
    pub fn is_projectively_empty(&self, budget: &Budget) -> Result<bool> {
        if self.generators.is_empty() {
            return Ok(false);
        }
        let gb = self.groebner(budget)?;
        if gb.is_unit() {
            return Ok(true);
        }
        Ok((0..self.nvars).all(|v| {
            gb.basis().iter().any(|g| {
                let m = g.leading_monomial().unwrap();
                m.exp(v) == m.degree()
            })
        }))
    }

    pub fn membership_with_cofactors(&self, f: &SparseForm, budget: &Budget) -> Result<Option<Vec<SparseForm>>> {
        membership_with_cofactors(f, &self.generators, budget)
    }
}

impl fmt::Debug for HomIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        write!(f, "({})", gens.join(", "))
    }
}

/// Cofactors c_j with Σ c_j · generators[j] = f, verified by multiplication, or
/// `None` when f is not in the ideal. Works for affine generators too.
pub fn membership_with_cofactors(f: &SparseForm, generators: &[SparseForm], budget: &Budget) -> Result<Option<Vec<SparseForm>>> {
    if generators.is_empty() || generators.iter().all(|g| g.is_zero()) {
        return Ok(if f.is_zero() { Some(vec![SparseForm::zero(f.field(), f.nvars()); generators.len()]) } else { None });
    }
    let gb = Groebner::compute(generators, true, budget)?;
    let Some(cofs) = gb.express(f) else {
        return Ok(None);
    };
    if linear_combination(generators, &cofs) != *f {
        return Err(Error::DegenerateInput("cofactor identity failed to verify".into()));
    }
    Ok(Some(cofs))
}

#[cfg(test)]
mod tests;
