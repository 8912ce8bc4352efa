//! Forms with prescribed vanishing: graded pieces of ideals, separating
//! sections, covering sections and the unramified intermediate map.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::FieldElement;
use crate::error::{Error, Result};
use crate::geometry::{check_transversality, close_under_frobenius, on_ideal, power_ratio_rows, Mode, VarietyInstance};
use crate::ideal::{projective_empty, Budget, Emptiness, HomIdeal, NullstellensatzCert};
use crate::linalg::{nullspace, rank_ext, rref, solve};
use crate::poly::{Monomial, ProjPoint, SparseForm};

/// Highest multiple j of deg α tried for the cotangent-spanning numerators.
const MAX_NUMERATOR_MULTIPLE: u32 = 3;

/// Tunables of the degree scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectionSearchConfig {
    pub base_degree_step: u32,
    pub max_degree: u32,
    pub seed: u64,
    pub max_retries: usize,
    pub budget: Budget,
    /// Extension depth for witness searches.
    pub depth: usize,
}

impl Default for SectionSearchConfig {
    fn default() -> Self {
        SectionSearchConfig { base_degree_step: 1, max_degree: 24, seed: 0, max_retries: 64, budget: Budget::default(), depth: 3 }
    }
}

impl SectionSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.base_degree_step == 0 {
            return Err(Error::Validation("base degree step must be positive".into()));
        }
        if self.max_degree < self.base_degree_step {
            return Err(Error::Validation("max degree is below the base degree step".into()));
        }
        Ok(())
    }

    /// Multiples of the base step up to the cap.
    pub fn degrees(&self) -> Vec<u32> {
        (1..).map(|k| k * self.base_degree_step).take_while(|&d| d <= self.max_degree).collect()
    }

    /// Deterministic generator for one search, keyed by purpose and degree.
    fn rng(&self, tag: u64, degree: u32) -> ChaCha8Rng {
        let mixed = self.seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (degree as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
        ChaCha8Rng::seed_from_u64(mixed)
    }
}

/// A basis of the degree-l forms in an ideal that vanish at given points, in
/// reduced echelon form with respect to descending monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPiece {
    pub degree: u32,
    pub basis: Vec<SparseForm>,
}

impl GradedPiece {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn combination(&self, coeffs: &[u32]) -> SparseForm {
        let proto = &self.basis[0];
        let mut acc = SparseForm::zero(proto.field(), proto.nvars());
        for (b, &c) in self.basis.iter().zip(coeffs) {
            if c != 0 {
                acc = acc.add(&b.scale(c));
            }
        }
        acc
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> SparseForm {
        let p = self.basis[0].p();
        loop {
            let coeffs: Vec<u32> = (0..self.basis.len()).map(|_| rng.gen_range(0..p)).collect();
            let f = self.combination(&coeffs);
            if !f.is_zero() {
                return f;
            }
        }
    }
}

fn echelon_forms(forms: Vec<SparseForm>, monos: &[Monomial]) -> Vec<SparseForm> {
    let Some(proto) = forms.first() else {
        return Vec::new();
    };
    let (field, n) = (proto.field(), proto.nvars());
    let mut rows: Vec<Vec<u32>> = forms.iter().map(|f| monos.iter().map(|m| f.coeff(m)).collect()).collect();
    rref(field, &mut rows);
    rows.iter().map(|r| SparseForm::from_terms(field, n, monos.iter().copied().zip(r.iter().copied()))).collect()
}

/// Least conjugate of each Frobenius orbit among `points`.
pub fn orbit_representatives(points: &[ProjPoint]) -> Vec<ProjPoint> {
    let mut reps: Vec<ProjPoint> = close_under_frobenius(points).iter().map(|p| p.orbit_representative()).collect();
    reps.sort();
    reps.dedup();
    reps
}

/// F_p-linear rows expressing the coordinates of f(P) for f ranging over `span`.
fn evaluation_rows(span: &[SparseForm], pt: &ProjPoint) -> Vec<Vec<u32>> {
    let values: Vec<FieldElement> = span.iter().map(|f| f.eval(pt.coords())).collect();
    let k = pt.field().degree();
    (0..k).map(|c| values.iter().map(|v| v.coeffs()[c]).collect()).collect()
}

pub fn graded_piece(degree: u32, vanish_ideal: &HomIdeal, vanish_points: &[ProjPoint], budget: &Budget) -> Result<GradedPiece> {
    let (field, n) = (vanish_ideal.field(), vanish_ideal.nvars());
    let monos = SparseForm::monomials_of_degree(n, degree);
    let mut span: Vec<SparseForm> = if vanish_ideal.has_unit_generator() {
        monos.iter().map(|&m| SparseForm::term(field, n, m, 1)).collect()
    } else if vanish_ideal.is_zero_ideal() {
        Vec::new()
    } else {
        let gb = vanish_ideal.groebner(budget)?;
        let lms: Vec<Monomial> = gb.basis().iter().map(|g| g.leading_monomial().unwrap()).collect();
        monos
            .iter()
            .filter(|m| lms.iter().any(|lm| lm.divides(m)))
            .map(|&m| {
                let t = SparseForm::term(field, n, m, 1);
                t.sub(&gb.normal_form(&t))
            })
            .collect()
    };
    let reps = orbit_representatives(vanish_points);
    if !span.is_empty() && !reps.is_empty() {
        let rows: Vec<Vec<u32>> = reps.iter().flat_map(|p| evaluation_rows(&span, p)).collect();
        let kernel = nullspace(field, &rows, span.len());
        span = kernel
            .iter()
            .map(|v| {
                let piece = GradedPiece { degree, basis: span.clone() };
                piece.combination(v)
            })
            .collect();
    }
    Ok(GradedPiece { degree, basis: echelon_forms(span, &monos) })
}

/// A form in `vanish_ideal` of the first workable degree among `degrees`
/// that vanishes at no point of `avoid`.
pub fn separating_section_in_degrees(
    vanish_ideal: &HomIdeal,
    avoid: &[ProjPoint],
    degrees: &[u32],
    cfg: &SectionSearchConfig,
    what: &str,
) -> Result<(u32, SparseForm)> {
    if let Some(pt) = avoid.iter().find(|p| on_ideal(vanish_ideal, p)) {
        return Err(Error::PointOnDivisor(pt.to_string()));
    }
    let field = vanish_ideal.field();
    let reps = orbit_representatives(avoid);
    let nonvanishing = |f: &SparseForm| reps.iter().all(|p| !f.eval(p.coords()).is_zero());
    for &l in degrees {
        let piece = graded_piece(l, vanish_ideal, &[], &cfg.budget)?;
        if piece.basis.is_empty() {
            continue;
        }
        if reps.is_empty() {
            return Ok((l, piece.basis[0].clone()));
        }
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for p in &reps {
            for (c, row) in evaluation_rows(&piece.basis, p).into_iter().enumerate() {
                rows.push(row);
                rhs.push(u32::from(c == 0));
            }
        }
        if let Some(x) = solve(field, &rows, &rhs) {
            return Ok((l, piece.combination(&x)));
        }
        let mut rng = cfg.rng(0x5e9a, l);
        for _ in 0..cfg.max_retries {
            let f = piece.random_element(&mut rng);
            if nonvanishing(&f) {
                return Ok((l, f));
            }
        }
    }
    Err(Error::DegreeCapExceeded { what: what.to_string(), cap: cfg.max_degree })
}

/// Smallest multiple l of the base step with a form in `vanish_ideal` of
/// degree l nonvanishing on `avoid`.
pub fn find_separating_section(vanish_ideal: &HomIdeal, avoid: &[ProjPoint], cfg: &SectionSearchConfig) -> Result<(u32, SparseForm)> {
    cfg.validate()?;
    separating_section_in_degrees(vanish_ideal, avoid, &cfg.degrees(), cfg, "a separating section")
}

/// Forms with no common zero on a locus, with their emptiness certificates.
#[derive(Debug, Clone)]
pub struct CoveringSections {
    pub degree: u32,
    pub forms: Vec<SparseForm>,
    /// Certificates for V(locus, forms) = ∅, one per chart.
    pub certificates: Vec<NullstellensatzCert>,
}

/// n forms of one degree among `degrees`, each vanishing on `vanish_points`,
/// the i-th in `constrained[i]` when present, with no common zero on `locus`.
pub fn covering_sections_in_degrees(
    count: usize,
    locus: &HomIdeal,
    vanish_points: &[ProjPoint],
    constrained: &[Option<&HomIdeal>],
    degrees: &[u32],
    cfg: &SectionSearchConfig,
    what: &str,
) -> Result<CoveringSections> {
    let (field, n) = (locus.field(), locus.nvars());
    let unit = HomIdeal::unit(field, n);
    for &l in degrees {
        let mut pieces = Vec::with_capacity(count);
        for i in 0..count {
            let ideal = constrained.get(i).copied().flatten().unwrap_or(&unit);
            pieces.push(graded_piece(l, ideal, vanish_points, &cfg.budget)?);
        }
        if pieces.iter().any(|p| p.basis.is_empty()) {
            continue;
        }
        let try_forms = |forms: &[SparseForm]| -> Result<Option<Vec<NullstellensatzCert>>> {
            let ideal = locus.with_generators(forms)?;
            if !ideal.is_projectively_empty(&cfg.budget)? {
                return Ok(None);
            }
            match projective_empty(&ideal, &cfg.budget, 0)? {
                Emptiness::Empty(certs) => Ok(Some(certs)),
                _ => Ok(None),
            }
        };
        let widest = pieces.iter().map(|p| p.dim()).max().unwrap();
        for shift in 0..widest {
            let forms: Vec<SparseForm> = pieces.iter().enumerate().map(|(i, p)| p.basis[(i + shift) % p.dim()].clone()).collect();
            if let Some(certificates) = try_forms(&forms)? {
                return Ok(CoveringSections { degree: l, forms, certificates });
            }
        }
        let mut rng = cfg.rng(0xc0e5, l);
        for _ in 0..cfg.max_retries {
            let forms: Vec<SparseForm> = pieces.iter().map(|p| p.random_element(&mut rng)).collect();
            if let Some(certificates) = try_forms(&forms)? {
                return Ok(CoveringSections { degree: l, forms, certificates });
            }
        }
    }
    Err(Error::DegreeCapExceeded { what: what.to_string(), cap: cfg.max_degree })
}

/// Covering sections for X: n = dim X forms with no common zero on `locus` ∩ X.
pub fn find_covering_sections(
    v: &VarietyInstance,
    locus: &HomIdeal,
    vanish_points: &[ProjPoint],
    constrained: &[Option<&HomIdeal>],
    cfg: &SectionSearchConfig,
) -> Result<CoveringSections> {
    cfg.validate()?;
    let locus = locus.with_generators(std::slice::from_ref(&v.form))?;
    covering_sections_in_degrees(v.dim(), &locus, vanish_points, constrained, &cfg.degrees(), cfg, "covering sections")
}

/// The map (α^m, δ_1, …, δ_n) unramified at the marked points, with
/// δ_i = β_i α^{m − j_i} + γ_i².
#[derive(Debug, Clone)]
pub struct UnramifiedMap {
    pub alpha: SparseForm,
    pub m: u32,
    pub numerators: Vec<SparseForm>,
    pub numerator_multiples: Vec<u32>,
    pub squares: Vec<SparseForm>,
    pub forms: Vec<SparseForm>,
    /// Certificates that the γ_i have no common zero on V(α) ∩ X.
    pub certificates: Vec<NullstellensatzCert>,
}

/// δ = β α^{m − j} + γ².
pub fn assemble_delta(beta: &SparseForm, alpha: &SparseForm, m: u32, j: u32, gamma: &SparseForm) -> Result<SparseForm> {
    if j >= m {
        return Err(Error::DegreeMismatch(format!("numerator multiple {j} must be below m = {m}")));
    }
    let delta = beta.mul(&alpha.pow(m - j)).add(&gamma.mul(gamma));
    if !delta.is_homogeneous() {
        return Err(Error::DegreeMismatch("δ is not homogeneous".into()));
    }
    Ok(delta)
}

/// Rank at `pt` of the matrix with rows ∇F and `rows`.
fn rank_at(v: &VarietyInstance, rows: &[Vec<SparseForm>], pt: &ProjPoint) -> usize {
    let mut mat = vec![v.gradient().iter().map(|g| g.eval(pt.coords())).collect::<Vec<_>>()];
    mat.extend(rows.iter().map(|r| r.iter().map(|e| e.eval(pt.coords())).collect()));
    rank_ext(&mat)
}

/// The ideal of the i-th constrained divisor plus (F), when local mode applies to index i.
fn constraint_ideal(v: &VarietyInstance, i: usize) -> Result<Option<HomIdeal>> {
    if v.mode != Mode::Local {
        return Ok(None);
    }
    v.extra_divisors.get(i).map(|d| d.with_generators(std::slice::from_ref(&v.form))).transpose()
}

pub fn build_unramified_map(v: &VarietyInstance, alpha: &SparseForm, cfg: &SectionSearchConfig) -> Result<UnramifiedMap> {
    cfg.validate()?;
    let n = v.dim();
    let e = alpha.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
    let reps = orbit_representatives(&v.points);
    if let Some(pt) = reps.iter().find(|p| alpha.eval(p.coords()).is_zero()) {
        return Err(Error::PointOnDivisor(format!("{pt} (the form α vanishes there)")));
    }
    if v.mode == Mode::Local {
        for pt in &reps {
            check_transversality(v, pt)?;
        }
    }
    let constraints: Vec<Option<HomIdeal>> = (0..n).map(|i| constraint_ideal(v, i)).collect::<Result<_>>()?;
    let unit = HomIdeal::unit(v.field, v.nvars());

    // Numerators β_i whose quotients β_i / α^{j_i} span the cotangent space at S.
    let mut numerators = Vec::with_capacity(n);
    let mut multiples = Vec::with_capacity(n);
    let mut rows: Vec<Vec<SparseForm>> = Vec::new();
    for (i, cons) in constraints.iter().enumerate() {
        let ideal = cons.as_ref().unwrap_or(&unit);
        let mut chosen = None;
        'degrees: for j in 1..=MAX_NUMERATOR_MULTIPLE {
            if j * e > cfg.max_degree {
                break;
            }
            let piece = graded_piece(j * e, ideal, &[], &cfg.budget)?;
            if piece.basis.is_empty() {
                continue;
            }
            let accepts = |beta: &SparseForm| {
                let mut trial = rows.clone();
                trial.extend(power_ratio_rows(alpha, std::slice::from_ref(beta), j));
                reps.iter().all(|p| rank_at(v, &trial, p) == i + 2)
            };
            for beta in &piece.basis {
                if accepts(beta) {
                    chosen = Some((beta.clone(), j));
                    break 'degrees;
                }
            }
            let mut rng = cfg.rng(0xbe7a + i as u64, j * e);
            for _ in 0..cfg.max_retries {
                let beta = piece.random_element(&mut rng);
                if accepts(&beta) {
                    chosen = Some((beta, j));
                    break 'degrees;
                }
            }
        }
        let (beta, j) = chosen.ok_or_else(|| Error::DegreeCapExceeded {
            what: format!("a numerator spanning the cotangent space at the marked points (coordinate {})", i + 1),
            cap: cfg.max_degree,
        })?;
        rows.extend(power_ratio_rows(alpha, std::slice::from_ref(&beta), j));
        numerators.push(beta);
        multiples.push(j);
    }

    // Squares γ_i of degree c with m e = 2c and m above every j_i.
    let max_j = multiples.iter().copied().max().unwrap_or(0);
    let square_degrees: Vec<u32> = cfg.degrees().into_iter().filter(|&c| (2 * c) % e == 0 && 2 * c / e > max_j).collect();
    let locus = HomIdeal::new(v.field, v.nvars(), vec![v.form.clone(), alpha.clone()])?;
    let cons_refs: Vec<Option<&HomIdeal>> = constraints.iter().map(|c| c.as_ref()).collect();
    let covering = covering_sections_in_degrees(
        n,
        &locus,
        &v.points,
        &cons_refs,
        &square_degrees,
        cfg,
        "square terms without common zero on the divisor of α",
    )?;
    let m = 2 * covering.degree / e;
    let forms = numerators
        .iter()
        .zip(&multiples)
        .zip(&covering.forms)
        .map(|((beta, &j), gamma)| assemble_delta(beta, alpha, m, j, gamma))
        .collect::<Result<Vec<_>>>()?;

    let final_rows = power_ratio_rows(alpha, &forms, m);
    if let Some(pt) = reps.iter().find(|p| rank_at(v, &final_rows, p) != n + 1) {
        return Err(Error::DegenerateInput(format!("assembled map is ramified at the marked point {pt}")));
    }
    Ok(UnramifiedMap {
        alpha: alpha.clone(),
        m,
        numerators,
        numerator_multiples: multiples,
        squares: covering.forms,
        forms,
        certificates: covering.certificates,
    })
}

#[cfg(test)]
mod tests;
