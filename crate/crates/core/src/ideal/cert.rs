//! Emptiness tests with re-checkable Nullstellensatz certificates.

use std::fmt::Write as _;

use super::groebner::{linear_combination, Budget};
use super::{membership_with_cofactors, HomIdeal};
use crate::arith::{make_extension, FieldElement, PrimeField};
use crate::error::{Error, Result};
use crate::poly::{var_name, ProjPoint, SparseForm, MAX_VARS};

/// Points examined per extension degree before the witness search gives up.
const WITNESS_POINT_LIMIT: u64 = 2_000_000;

/// An identity 1 = Σ cofactors[j] · generators[j] on an affine chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullstellensatzCert {
    /// Variable set to 1, if the generators come from a projective ideal.
    pub chart: Option<usize>,
    /// Index of the auxiliary variable introduced for a Rabinowitsch condition.
    pub aux: Option<usize>,
    pub generators: Vec<SparseForm>,
    pub cofactors: Vec<SparseForm>,
}

impl NullstellensatzCert {
    /// Re-checks the identity by multiplication alone.
    pub fn verify(&self) -> bool {
        !self.generators.is_empty()
            && self.generators.len() == self.cofactors.len()
            && linear_combination(&self.generators, &self.cofactors).is_one()
    }

    pub fn nvars(&self) -> usize {
        self.generators[0].nvars()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let name = |v: Option<usize>| v.map_or("none".to_string(), var_name);
        let _ = writeln!(
            out,
            "nullstellensatz p={} vars={} chart={} aux={}",
            self.generators[0].p(),
            self.nvars(),
            name(self.chart),
            name(self.aux)
        );
        for (g, c) in self.generators.iter().zip(&self.cofactors) {
            let _ = writeln!(out, "gen {g}");
            let _ = writeln!(out, "cof {c}");
        }
        out.push_str("end\n");
        out
    }

    /// Parses one block produced by [`to_text`](Self::to_text); returns the
    /// certificate and the number of lines consumed.
    pub fn from_lines(lines: &[&str]) -> Result<(NullstellensatzCert, usize)> {
        let header = lines.first().ok_or_else(|| Error::parse("missing certificate header"))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("nullstellensatz") {
            return Err(Error::parse("expected 'nullstellensatz' header"));
        }
        let (mut p, mut nvars, mut chart, mut aux) = (None, None, None, None);
        for kv in fields {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::parse(format!("bad header field '{kv}'")))?;
            match k {
                "p" => p = Some(v.parse::<u64>().map_err(|_| Error::parse("bad prime"))?),
                "vars" => nvars = Some(v.parse::<usize>().map_err(|_| Error::parse("bad variable count"))?),
                "chart" => chart = Some(parse_var(v)?),
                "aux" => aux = Some(parse_var(v)?),
                _ => return Err(Error::parse(format!("unknown header field '{k}'"))),
            }
        }
        let fp = PrimeField::new(p.ok_or_else(|| Error::parse("missing p"))?)?;
        let nvars = nvars.ok_or_else(|| Error::parse("missing vars"))?;
        if nvars == 0 || nvars > MAX_VARS {
            return Err(Error::parse("variable count out of range"));
        }
        let mut generators = Vec::new();
        let mut cofactors = Vec::new();
        let mut i = 1;
        loop {
            let line = lines.get(i).ok_or_else(|| Error::parse("unterminated certificate"))?.trim();
            i += 1;
            if line == "end" {
                break;
            }
            if let Some(g) = line.strip_prefix("gen ") {
                generators.push(SparseForm::parse(fp, nvars, g).map_err(|e| e.at_line(i, 4))?);
            } else if let Some(c) = line.strip_prefix("cof ") {
                cofactors.push(SparseForm::parse(fp, nvars, c).map_err(|e| e.at_line(i, 4))?);
            } else {
                return Err(Error::parse(format!("unexpected line '{line}'")));
            }
        }
        if generators.is_empty() || generators.len() != cofactors.len() {
            return Err(Error::parse("generator and cofactor counts differ"));
        }
        Ok((NullstellensatzCert { chart: chart.flatten(), aux: aux.flatten(), generators, cofactors }, i))
    }
}

fn parse_var(v: &str) -> Result<Option<usize>> {
    Ok(match v {
        "none" => None,
        "x" => Some(0),
        "y" => Some(1),
        "z" => Some(2),
        w => Some(
            w.strip_prefix('w')
                .and_then(|d| d.parse::<usize>().ok())
                .map(|d| d + 3)
                .ok_or_else(|| Error::parse(format!("bad variable name '{w}'")))?,
        ),
    })
}

/// Outcome of a projective emptiness test.
#[derive(Debug, Clone)]
pub enum Emptiness {
    /// One certificate per chart x_i = 1.
    Empty(Vec<NullstellensatzCert>),
    /// A common zero found over a small extension.
    NonEmpty(ProjPoint),
    /// The Gröbner basis on this chart is not {1}, but no low-degree witness was found.
    Inconclusive { chart: usize },
}

/// Outcome of an affine emptiness test with a Rabinowitsch condition.
#[derive(Debug, Clone)]
pub enum ChartEmptiness {
    Empty(NullstellensatzCert),
    NonEmpty(Vec<FieldElement>),
    Inconclusive,
}

/// Tests whether the projective zero set of `ideal` is empty over the
/// algebraic closure, producing a certificate on each standard chart.
pub fn projective_empty(ideal: &HomIdeal, budget: &Budget, depth: usize) -> Result<Emptiness> {
    let n = ideal.nvars();
    if ideal.is_zero_ideal() {
        return Ok(match find_projective_zero(ideal.generators(), ideal.field(), n, depth)? {
            Some(pt) => Emptiness::NonEmpty(pt),
            None => Emptiness::Inconclusive { chart: 0 },
        });
    }
    let mut certs = Vec::with_capacity(n);
    for chart in 0..n {
        let gens: Vec<SparseForm> = ideal.generators().iter().map(|g| g.dehomogenize(chart)).collect();
        let one = SparseForm::one(ideal.field(), n);
        match membership_with_cofactors(&one, &gens, budget)? {
            Some(cofactors) => certs.push(NullstellensatzCert { chart: Some(chart), aux: None, generators: gens, cofactors }),
            None => {
                return Ok(match find_projective_zero(ideal.generators(), ideal.field(), n, depth)? {
                    Some(pt) => Emptiness::NonEmpty(pt),
                    None => Emptiness::Inconclusive { chart },
                })
            }
        }
    }
    Ok(Emptiness::Empty(certs))
}

/// Extends `gens` by one auxiliary variable `y` and appends 1 − y·avoid.
pub fn rabinowitsch_system(gens: &[SparseForm], avoid: &SparseForm) -> Result<(Vec<SparseForm>, usize)> {
    let n = avoid.nvars();
    if n + 1 > MAX_VARS {
        return Err(Error::DegenerateInput("no room for an auxiliary variable".into()));
    }
    let aux = n;
    let mut out: Vec<SparseForm> = gens.iter().map(|g| g.with_nvars(n + 1)).collect();
    let y = SparseForm::var(avoid.field(), n + 1, aux);
    out.push(SparseForm::one(avoid.field(), n + 1).sub(&y.mul(&avoid.with_nvars(n + 1))));
    Ok((out, aux))
}

/// Tests emptiness of {F_aff = 0, ram = 0, avoid ≠ 0} on an affine chart.
pub fn chart_unramified_empty(
    f_aff: &[SparseForm],
    ram: &[SparseForm],
    avoid: &SparseForm,
    budget: &Budget,
    depth: usize,
) -> Result<ChartEmptiness> {
    let mut gens: Vec<SparseForm> = f_aff.to_vec();
    gens.extend(ram.iter().cloned());
    let (system, aux) = rabinowitsch_system(&gens, avoid)?;
    let one = SparseForm::one(avoid.field(), avoid.nvars() + 1);
    if let Some(cofactors) = membership_with_cofactors(&one, &system, budget)? {
        return Ok(ChartEmptiness::Empty(NullstellensatzCert { chart: None, aux: Some(aux), generators: system, cofactors }));
    }
    Ok(match find_affine_zero(&gens, Some(avoid), depth)? {
        Some(pt) => ChartEmptiness::NonEmpty(pt),
        None => ChartEmptiness::Inconclusive,
    })
}

/// Searches P^{n-1}(F_{p^k}) for k ≤ depth for a common zero of `gens`.
pub fn find_projective_zero(gens: &[SparseForm], field: PrimeField, n: usize, depth: usize) -> Result<Option<ProjPoint>> {
    for k in 1..=depth {
        let ext = make_extension(field.p() as u64, k)?;
        let Some(q) = ext.order() else { break };
        if ProjPoint::count(q, n) > WITNESS_POINT_LIMIT {
            break;
        }
        for pt in ProjPoint::enumerate(&ext, n) {
            if gens.iter().all(|g| g.eval(pt.coords()).is_zero()) {
                return Ok(Some(pt));
            }
        }
    }
    Ok(None)
}

/// Searches affine points over F_{p^k}, k ≤ depth, for a common zero of
/// `gens` at which `avoid` is nonzero. Variables used by no input are set to 1.
pub fn find_affine_zero(gens: &[SparseForm], avoid: Option<&SparseForm>, depth: usize) -> Result<Option<Vec<FieldElement>>> {
    let proto = gens.first().or(avoid).ok_or(Error::ZeroInput)?;
    let n = proto.nvars();
    let used: Vec<usize> = (0..n).filter(|&v| gens.iter().chain(avoid).any(|g| g.uses_var(v))).collect();
    for k in 1..=depth {
        let ext = make_extension(proto.p() as u64, k)?;
        let Some(q) = ext.order() else { break };
        let Some(total) = q.checked_pow(used.len() as u32).filter(|&t| t <= WITNESS_POINT_LIMIT) else { break };
        for mut idx in 0..total {
            let mut pt = vec![FieldElement::one(&ext); n];
            for &v in used.iter().rev() {
                pt[v] = FieldElement::from_index(&ext, idx % q);
                idx /= q;
            }
            if gens.iter().all(|g| g.eval(&pt).is_zero()) && avoid.is_none_or(|a| !a.eval(&pt).is_zero()) {
                return Ok(Some(pt));
            }
        }
    }
    Ok(None)
}
