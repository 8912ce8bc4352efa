//! Buchberger's algorithm with optional cofactor tracking.

use std::collections::HashSet;

use crate::arith::PrimeField;
use crate::error::{Error, Result};
use crate::poly::{Monomial, SparseForm};

/// Limits on Gröbner computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_spairs: usize,
    pub max_monomials: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_spairs: 200_000, max_monomials: 10_000_000 }
    }
}

/// A reduced Gröbner basis. When tracked, `cofactors[i]` expresses `basis[i]`
/// as a combination of the input generators.
#[derive(Debug, Clone)]
pub struct Groebner {
    field: PrimeField,
    nvars: usize,
    basis: Vec<SparseForm>,
    cofactors: Option<Vec<Vec<SparseForm>>>,
    generators: Vec<SparseForm>,
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

struct Run<'a> {
    budget: &'a Budget,
    spairs: usize,
    monomials: usize,
}

impl Run<'_> {
    fn charge(&mut self, terms: usize) -> Result<()> {
        self.monomials += terms;
        if self.monomials > self.budget.max_monomials {
            return Err(Error::ResourceBudgetExceeded(format!("more than {} monomials generated", self.budget.max_monomials)));
        }
        Ok(())
    }
}

/// Full reduction of `f` by `basis`; returns the remainder and, per basis
/// element, the accumulated quotient terms.
fn reduce_with_quotients(f: &SparseForm, basis: &[SparseForm], track: bool) -> (SparseForm, Vec<Vec<(Monomial, u32)>>) {
    let field = f.field();
    let mut quotients = vec![Vec::new(); if track { basis.len() } else { 0 }];
    let mut p = f.clone();
    let mut rem: Vec<(Monomial, u32)> = Vec::new();
    let lms: Vec<(Monomial, u32)> = basis.iter().map(|g| g.leading_term().expect("nonzero basis element")).collect();
    while let Some((m, c)) = p.leading_term() {
        match lms.iter().position(|(lm, _)| lm.divides(&m)) {
            Some(i) => {
                let q = lms[i].0.quotient_of(&m);
                let qc = field.mul(c, field.inv(lms[i].1));
                p = p.sub_scaled_shift(qc, &q, &basis[i]);
                if track {
                    quotients[i].push((q, qc));
                }
            }
            None => {
                rem.push((m, c));
                p = p.sub(&SparseForm::term(field, f.nvars(), m, c));
            }
        }
    }
    (SparseForm::from_terms(field, f.nvars(), rem), quotients)
}

fn combine_cofactors(
    start: &[SparseForm],
    quotients: &[Vec<(Monomial, u32)>],
    cofs: &[Vec<SparseForm>],
    field: PrimeField,
    nvars: usize,
) -> Vec<SparseForm> {
    let mut out = start.to_vec();
    for (i, q) in quotients.iter().enumerate() {
        if q.is_empty() {
            continue;
        }
        let qf = SparseForm::from_terms(field, nvars, q.iter().copied());
        for (o, c) in out.iter_mut().zip(&cofs[i]) {
            if !c.is_zero() {
                *o = o.sub(&qf.mul(c));
            }
        }
    }
    out
}

fn s_polynomial(f: &SparseForm, g: &SparseForm, lcm: &Monomial) -> (SparseForm, (Monomial, u32), (Monomial, u32)) {
    let field = f.field();
    let (lf, cf) = f.leading_term().unwrap();
    let (lg, cg) = g.leading_term().unwrap();
    let a = (lf.quotient_of(lcm), field.inv(cf));
    let b = (lg.quotient_of(lcm), field.inv(cg));
    let s = f.mul_term(&a.0, a.1).sub(&g.mul_term(&b.0, b.1));
    (s, a, b)
}

impl Groebner {
    /// Computes the reduced Gröbner basis of `generators` in grevlex order.
    pub fn compute(generators: &[SparseForm], track: bool, budget: &Budget) -> Result<Groebner> {
        let first = generators.first().ok_or(Error::ZeroInput)?;
        let field = first.field();
        let nvars = first.nvars();
        let ngens = generators.len();
        let zero = SparseForm::zero(field, nvars);
        let mut run = Run { budget, spairs: 0, monomials: 0 };

        let mut basis: Vec<SparseForm> = Vec::new();
        let mut cofs: Vec<Vec<SparseForm>> = Vec::new();
        let mut pending: Vec<Pair> = Vec::new();
        let mut pending_set: HashSet<(usize, usize)> = HashSet::new();

        let unit_vec = |j: usize| -> Vec<SparseForm> {
            let mut v = vec![zero.clone(); ngens];
            v[j] = SparseForm::one(field, nvars);
            v
        };

        let mut queue: Vec<(SparseForm, Vec<SparseForm>)> = Vec::new();
        for (j, g) in generators.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            queue.push((g.clone(), if track { unit_vec(j) } else { Vec::new() }));
        }
        // Process inputs lowest degree first for a deterministic, cheap start.
        queue.sort_by_key(|a| a.0.leading_monomial());

        let add = |h: SparseForm,
                   hc: Vec<SparseForm>,
                   basis: &mut Vec<SparseForm>,
                   cofs: &mut Vec<Vec<SparseForm>>,
                   pending: &mut Vec<Pair>,
                   pending_set: &mut HashSet<(usize, usize)>,
                   run: &mut Run|
         -> Result<bool> {
            let (rem, quots) = reduce_with_quotients(&h, basis, track);
            if rem.is_zero() {
                return Ok(false);
            }
            let rc = if track { combine_cofactors(&hc, &quots, cofs, field, nvars) } else { Vec::new() };
            run.charge(rem.num_terms() + rc.iter().map(|c| c.num_terms()).sum::<usize>())?;
            let inv = field.inv(rem.leading_coeff());
            let rem = rem.scale(inv);
            let rc: Vec<SparseForm> = rc.iter().map(|c| c.scale(inv)).collect();
            let is_unit = rem.is_constant();
            let idx = basis.len();
            let lm = rem.leading_monomial().unwrap();
            for (k, g) in basis.iter().enumerate() {
                let lcm = g.leading_monomial().unwrap().lcm(&lm);
                pending.push(Pair { i: k, j: idx, lcm });
                pending_set.insert((k, idx));
            }
            basis.push(rem);
            cofs.push(rc);
            Ok(is_unit)
        };

        let mut found_unit = false;
        for (h, hc) in queue {
            if add(h, hc, &mut basis, &mut cofs, &mut pending, &mut pending_set, &mut run)? {
                found_unit = true;
                break;
            }
        }

        while !found_unit && !pending.is_empty() {
            let best = (0..pending.len())
                .min_by(|&a, &b| {
                    let (pa, pb) = (&pending[a], &pending[b]);
                    pa.lcm.cmp(&pb.lcm).then(pa.j.cmp(&pb.j)).then(pa.i.cmp(&pb.i))
                })
                .unwrap();
            let pair = pending.swap_remove(best);
            pending_set.remove(&(pair.i, pair.j));

            let lmi = basis[pair.i].leading_monomial().unwrap();
            let lmj = basis[pair.j].leading_monomial().unwrap();
            if lmi.is_coprime(&lmj) {
                continue;
            }
            let chain = (0..basis.len()).any(|k| {
                k != pair.i
                    && k != pair.j
                    && basis[k].leading_monomial().unwrap().divides(&pair.lcm)
                    && !pending_set.contains(&(pair.i.min(k), pair.i.max(k)))
                    && !pending_set.contains(&(pair.j.min(k), pair.j.max(k)))
            });
            if chain {
                continue;
            }
            run.spairs += 1;
            if run.spairs > budget.max_spairs {
                return Err(Error::ResourceBudgetExceeded(format!("more than {} S-pairs", budget.max_spairs)));
            }
            let (s, a, b) = s_polynomial(&basis[pair.i], &basis[pair.j], &pair.lcm);
            let sc = if track {
                cofs[pair.i].iter().zip(&cofs[pair.j]).map(|(ci, cj)| ci.mul_term(&a.0, a.1).sub(&cj.mul_term(&b.0, b.1))).collect()
            } else {
                Vec::new()
            };
            if add(s, sc, &mut basis, &mut cofs, &mut pending, &mut pending_set, &mut run)? {
                found_unit = true;
            }
        }

        if found_unit {
            let one_idx = basis.iter().position(|g| g.is_constant()).unwrap();
            let cof = if track { Some(vec![cofs[one_idx].clone()]) } else { None };
            return Ok(Groebner {
                field,
                nvars,
                basis: vec![SparseForm::one(field, nvars)],
                cofactors: cof,
                generators: generators.to_vec(),
            });
        }

        // Minimalize: drop elements whose leading monomial is divisible by another's.
        let mut keep: Vec<usize> = Vec::new();
        for i in 0..basis.len() {
            let lmi = basis[i].leading_monomial().unwrap();
            let redundant = (0..basis.len()).any(|k| {
                let lmk = basis[k].leading_monomial().unwrap();
                k != i && lmk.divides(&lmi) && (lmk != lmi || k < i)
            });
            if !redundant {
                keep.push(i);
            }
        }
        keep.sort_by(|&a, &b| basis[a].leading_monomial().cmp(&basis[b].leading_monomial()));
        let mut min_basis: Vec<SparseForm> = keep.iter().map(|&i| basis[i].clone()).collect();
        let mut min_cofs: Vec<Vec<SparseForm>> = if track { keep.iter().map(|&i| cofs[i].clone()).collect() } else { Vec::new() };

        // Interreduce tails.
        for i in 0..min_basis.len() {
            let others: Vec<SparseForm> = min_basis.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, g)| g.clone()).collect();
            let lt = min_basis[i].leading_term().unwrap();
            let lead = SparseForm::term(field, nvars, lt.0, lt.1);
            let tail = min_basis[i].sub(&lead);
            let (rem, quots) = reduce_with_quotients(&tail, &others, track);
            if track {
                let other_cofs: Vec<Vec<SparseForm>> =
                    min_cofs.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, c)| c.clone()).collect();
                min_cofs[i] = combine_cofactors(&min_cofs[i], &quots, &other_cofs, field, nvars);
            }
            min_basis[i] = lead.add(&rem);
        }

        Ok(Groebner {
            field,
            nvars,
            basis: min_basis,
            cofactors: if track { Some(min_cofs) } else { None },
            generators: generators.to_vec(),
        })
    }

    pub fn basis(&self) -> &[SparseForm] {
        &self.basis
    }

    pub fn generators(&self) -> &[SparseForm] {
        &self.generators
    }

    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant()
    }

    pub fn normal_form(&self, f: &SparseForm) -> SparseForm {
        reduce_with_quotients(f, &self.basis, false).0
    }

    pub fn contains(&self, f: &SparseForm) -> bool {
        self.normal_form(f).is_zero()
    }

    /// Cofactors over the original generators expressing `f`, when `f` lies
    /// in the ideal; requires a tracked computation.
    pub fn express(&self, f: &SparseForm) -> Option<Vec<SparseForm>> {
        let cofs = self.cofactors.as_ref().expect("cofactor tracking was not enabled");
        let (rem, quots) = reduce_with_quotients(f, &self.basis, true);
        if !rem.is_zero() {
            return None;
        }
        let zero = vec![SparseForm::zero(self.field, self.nvars); self.generators.len()];
        let negated = combine_cofactors(&zero, &quots, cofs, self.field, self.nvars);
        Some(negated.iter().map(|c| c.neg()).collect())
    }

    /// Every S-polynomial reduces to zero (used by tests as an independent check).
    pub fn satisfies_buchberger_criterion(&self) -> bool {
        for i in 0..self.basis.len() {
            for j in i + 1..self.basis.len() {
                let lcm = self.basis[i].leading_monomial().unwrap().lcm(&self.basis[j].leading_monomial().unwrap());
                let (s, _, _) = s_polynomial(&self.basis[i], &self.basis[j], &lcm);
                if !self.normal_form(&s).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// Σ cofactors[j] · generators[j].
pub fn linear_combination(generators: &[SparseForm], cofactors: &[SparseForm]) -> SparseForm {
    assert_eq!(generators.len(), cofactors.len());
    let mut acc = SparseForm::zero(generators[0].field(), generators[0].nvars());
    for (g, c) in generators.iter().zip(cofactors) {
        if !c.is_zero() {
            acc = acc.add(&g.mul(c));
        }
    }
    acc
}
