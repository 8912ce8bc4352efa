//! The finite étale cover X ∖ {u_0 = 0} → A^n and its certificate.

use std::fmt::Write as _;

use crate::arith::make_extension;
use crate::error::{Error, Result};
use crate::geometry::{
    check_transversality, close_under_frobenius, jacobian_minors, on_ideal, power_ratio_rows, validate_instance, Mode, VarietyInstance,
};
use crate::ideal::{linear_combination, membership_with_cofactors, HomIdeal, NullstellensatzCert};
use crate::poly::{multivariate_gcd, ProjPoint, SparseForm, MAX_VARS};
use crate::sections::{
    build_unramified_map, covering_sections_in_degrees, find_separating_section, orbit_representatives, separating_section_in_degrees,
    SectionSearchConfig,
};
use crate::verify::{Certificate, Membership, PointRecord};

/// Restarts allowed after enlarging S with a point on an uncovered component.
const MAX_AUGMENTATIONS: usize = 8;

/// Points scanned per extension degree when looking for a new marked point.
const AUGMENTATION_POINT_LIMIT: u64 = 2_000_000;

pub const FLATNESS_NOTE: &str = "X is a hypersurface, hence Cohen-Macaulay, and A^n is regular; \
a quasi-finite map between them with unramified fibers is flat by miracle flatness, so unramified off H means etale off H";

/// The integers behind the degree of the cover: d = p·l·r·m·e.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ledger {
    pub p: u32,
    /// Degree of s.
    pub e: u32,
    pub m: u32,
    pub r: u32,
    pub l: u32,
}

impl Ledger {
    pub fn common_degree(&self) -> u64 {
        [self.p, self.l, self.r, self.m, self.e].iter().map(|&x| x as u64).product()
    }

    /// Exponent of s in u_i: m(pr − 1).
    pub fn s_exponent(&self) -> u32 {
        self.m * (self.p * self.r - 1)
    }

    /// Exponent of t in the first summand of u_i: p(l − 1).
    pub fn t_exponent(&self) -> u32 {
        self.p * (self.l - 1)
    }

    /// Exponent of t in u_0: pl.
    pub fn u0_exponent(&self) -> u32 {
        self.p * self.l
    }

    /// deg s_i + deg s^{m(pr−1)} + deg t^{p(l−1)}, computed term by term.
    pub fn summed_degree(&self) -> u64 {
        let (p, e, m, r, l) = (self.p as u64, self.e as u64, self.m as u64, self.r as u64, self.l as u64);
        m * e + m * e * (p * r - 1) + p * (l - 1) * r * m * e
    }

    pub fn check(&self) -> Result<()> {
        if self.l < 2 {
            return Err(Error::DegreeMismatch(format!("l = {} but l must be at least 2", self.l)));
        }
        for (name, v) in [("p", self.p), ("e", self.e), ("m", self.m), ("r", self.r)] {
            if v == 0 {
                return Err(Error::DegreeMismatch(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    pub fn to_line(&self) -> String {
        format!("ledger p={} e={} m={} r={} l={}", self.p, self.e, self.m, self.r, self.l)
    }

    pub fn parse_line(line: &str) -> Result<Ledger> {
        let mut fields = line.split_whitespace();
        if fields.next() != Some("ledger") {
            return Err(Error::parse("expected 'ledger' line"));
        }
        let mut vals = [None; 5];
        for kv in fields {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::parse(format!("bad ledger field '{kv}'")))?;
            let idx = ["p", "e", "m", "r", "l"]
                .iter()
                .position(|&n| n == k)
                .ok_or_else(|| Error::parse(format!("unknown ledger field '{k}'")))?;
            vals[idx] = Some(v.parse::<u32>().map_err(|_| Error::parse(format!("bad ledger value '{v}'")))?);
        }
        let get = |i: usize| vals[i].ok_or_else(|| Error::parse("incomplete ledger"));
        Ok(Ledger { p: get(0)?, e: get(1)?, m: get(2)?, r: get(3)?, l: get(4)? })
    }
}

/// The forms u_0, …, u_n with the intermediate forms they were built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverMorphism {
    pub ledger: Ledger,
    pub forms: Vec<SparseForm>,
    pub s: SparseForm,
    pub s_list: Vec<SparseForm>,
    pub t: SparseForm,
    pub t_list: Vec<SparseForm>,
}

impl CoverMorphism {
    pub fn u0(&self) -> &SparseForm {
        &self.forms[0]
    }

    pub fn dim(&self) -> usize {
        self.forms.len() - 1
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "morphism p={} vars={} n={}", self.s.p(), self.s.nvars(), self.dim());
        let _ = writeln!(out, "{}", self.ledger.to_line());
        for (i, u) in self.forms.iter().enumerate() {
            let _ = writeln!(out, "u{i} {u}");
        }
        let _ = writeln!(out, "s {}", self.s);
        for (i, f) in self.s_list.iter().enumerate() {
            let _ = writeln!(out, "s{} {f}", i + 1);
        }
        let _ = writeln!(out, "t {}", self.t);
        for (i, f) in self.t_list.iter().enumerate() {
            let _ = writeln!(out, "t{} {f}", i + 1);
        }
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<CoverMorphism> {
        let lines: Vec<&str> = text.lines().collect();
        let header = lines.first().ok_or_else(|| Error::parse("empty morphism file").at_line(1, 0))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("morphism") {
            return Err(Error::parse("expected 'morphism' header").at_line(1, 0));
        }
        let (mut p, mut nvars, mut n) = (None, None, None);
        for kv in fields {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::parse(format!("bad header field '{kv}'")).at_line(1, 0))?;
            let v: u64 = v.parse().map_err(|_| Error::parse(format!("bad value '{v}'")).at_line(1, 0))?;
            match k {
                "p" => p = Some(v),
                "vars" => nvars = Some(v as usize),
                "n" => n = Some(v as usize),
                _ => return Err(Error::parse(format!("unknown header field '{k}'")).at_line(1, 0)),
            }
        }
        let field = crate::arith::PrimeField::new(p.ok_or_else(|| Error::parse("missing p").at_line(1, 0))?)?;
        let nvars = nvars.ok_or_else(|| Error::parse("missing vars").at_line(1, 0))?;
        let n = n.ok_or_else(|| Error::parse("missing n").at_line(1, 0))?;
        if !(3..=MAX_VARS).contains(&nvars) || n + 2 != nvars {
            return Err(Error::parse("inconsistent variable counts").at_line(1, 0));
        }
        let ledger = Ledger::parse_line(lines.get(1).copied().unwrap_or("")).map_err(|e| e.at_line(2, 0))?;
        let mut idx = 2;
        let mut next_form = |name: &str| -> Result<SparseForm> {
            let line_no = idx + 1;
            let line = lines.get(idx).ok_or_else(|| Error::parse(format!("missing '{name}'")).at_line(line_no, 0))?;
            idx += 1;
            let body = line
                .strip_prefix(name)
                .and_then(|rest| rest.strip_prefix(' '))
                .ok_or_else(|| Error::parse(format!("expected '{name}'")).at_line(line_no, 0))?;
            SparseForm::parse(field, nvars, body).map_err(|e| e.at_line(line_no, name.len() + 1))
        };
        let forms = (0..=n).map(|i| next_form(&format!("u{i}"))).collect::<Result<Vec<_>>>()?;
        let s = next_form("s")?;
        let s_list = (1..=n).map(|i| next_form(&format!("s{i}"))).collect::<Result<Vec<_>>>()?;
        let t = next_form("t")?;
        let t_list = (1..=n).map(|i| next_form(&format!("t{i}"))).collect::<Result<Vec<_>>>()?;
        if lines.get(idx).map(|l| l.trim()) != Some("end") {
            return Err(Error::parse("expected 'end'").at_line(idx + 1, 0));
        }
        Ok(CoverMorphism { ledger, forms, s, s_list, t, t_list })
    }
}

/// A cover built with constrained divisors: D_i lands in the hyperplane of the i-th coordinate.
#[derive(Debug, Clone)]
pub struct LocalCover {
    pub morphism: CoverMorphism,
    /// Each constrained divisor with the index of the affine coordinate vanishing on its image.
    pub divisors: Vec<(HomIdeal, usize)>,
}

impl LocalCover {
    /// The open set U is the complement of the zero set of this form in X.
    pub fn boundary(&self) -> &SparseForm {
        self.morphism.u0()
    }
}

fn degree_of(f: &SparseForm, what: &str) -> Result<u32> {
    f.homogeneous_degree().ok_or_else(|| Error::DegreeMismatch(format!("{what} is zero or not homogeneous")))
}

/// u_0 = t^{pl}, u_i = s_i s^{m(pr−1)} t^{p(l−1)} + t_i^p.
#[allow(clippy::too_many_arguments)]
pub fn assemble_u_tuple(
    s: &SparseForm,
    s_list: &[SparseForm],
    t: &SparseForm,
    t_list: &[SparseForm],
    p: u32,
    l: u32,
    r: u32,
    m: u32,
) -> Result<CoverMorphism> {
    if p != s.p() {
        return Err(Error::FieldMismatch(format!("ledger p = {p} but forms live over F_{}", s.p())));
    }
    if s_list.len() != t_list.len() {
        return Err(Error::DegreeMismatch(format!("{} forms s_i against {} forms t_i", s_list.len(), t_list.len())));
    }
    let e = degree_of(s, "s")?;
    let ledger = Ledger { p, e, m, r, l };
    ledger.check()?;
    for (i, si) in s_list.iter().enumerate() {
        if degree_of(si, "s_i")? != m * e {
            return Err(Error::DegreeMismatch(format!("deg s_{} must be m·e = {}", i + 1, m * e)));
        }
    }
    if degree_of(t, "t")? != r * m * e {
        return Err(Error::DegreeMismatch(format!("deg t must be r·m·e = {}", r * m * e)));
    }
    for (i, ti) in t_list.iter().enumerate() {
        if degree_of(ti, "t_i")? != l * r * m * e {
            return Err(Error::DegreeMismatch(format!("deg t_{} must be l·r·m·e = {}", i + 1, l * r * m * e)));
        }
    }
    let mut forms = vec![t.pow(ledger.u0_exponent())];
    let common = s.pow(ledger.s_exponent()).mul(&t.pow(ledger.t_exponent()));
    for (si, ti) in s_list.iter().zip(t_list) {
        forms.push(si.mul(&common).add(&ti.pow(p)));
    }
    Ok(CoverMorphism { ledger, forms, s: s.clone(), s_list: s_list.to_vec(), t: t.clone(), t_list: t_list.to_vec() })
}

enum Attempt {
    Done(Box<(CoverMorphism, Certificate)>),
    /// The forms s·μ_j share this factor with F, so a component of X is ramified throughout.
    Uncovered(SparseForm),
}

/// Finite map X ∖ {u_0 = 0} → A^n, étale there, sending D into H and S off H.
pub fn build_etale_cover(v: &VarietyInstance, cfg: &SectionSearchConfig) -> Result<(CoverMorphism, Certificate)> {
    validate_instance(v).into_result()?;
    cfg.validate()?;
    let mut inst = v.clone();
    if inst.points.is_empty() {
        let pt = find_component_point(&inst, &inst.form, cfg.depth)?
            .ok_or_else(|| Error::ComponentCoverageFailed("no smooth point of X off D found to mark".into()))?;
        inst.points = close_under_frobenius(&[pt]);
    }
    for _ in 0..=MAX_AUGMENTATIONS {
        match attempt(&inst, cfg)? {
            Attempt::Done(out) => return Ok(*out),
            Attempt::Uncovered(phi) => {
                let pt = find_component_point(&inst, &phi, cfg.depth)?
                    .ok_or_else(|| Error::ComponentCoverageFailed(format!("no smooth point of X off D found on the component {phi}")))?;
                let mut pts = inst.points.clone();
                pts.push(pt);
                inst.points = close_under_frobenius(&pts);
            }
        }
    }
    Err(Error::ComponentCoverageFailed(format!("still uncovered after {MAX_AUGMENTATIONS} augmentations")))
}

/// Local variant of [`build_etale_cover`]: s_i and t_i are taken in I(D_i), so D_i lands in the i-th coordinate hyperplane.
pub fn build_local_cover(v: &VarietyInstance, cfg: &SectionSearchConfig) -> Result<(LocalCover, Certificate)> {
    let mut inst = v.clone();
    inst.mode = Mode::Local;
    validate_instance(&inst).into_result()?;
    let reps = inst.orbit_representatives();
    for pt in &reps {
        check_transversality(&inst, pt)?;
    }
    let m = inst.extra_divisors.len();
    if m >= 2 {
        check_no_blowup_needed(&inst, &reps, cfg)?;
    }
    let (morphism, cert) = build_etale_cover(&inst, cfg)?;
    let divisors = inst.extra_divisors.iter().cloned().enumerate().map(|(i, d)| (d, i + 1)).collect();
    Ok((LocalCover { morphism, divisors }, cert))
}

/// Accepts m ≥ 2 divisors only when every intersection of two or more of
/// them meets X in at most the marked rational point.
fn check_no_blowup_needed(v: &VarietyInstance, reps: &[ProjPoint], cfg: &SectionSearchConfig) -> Result<()> {
    let m = v.extra_divisors.len();
    let x = match reps {
        [x] if x.field_of_definition() == 1 => x,
        _ => return Err(Error::UnsupportedRequiresBlowup("several constrained divisors need a single rational marked point".into())),
    };
    for mask in 1u32..(1 << m) {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut gens = vec![v.form.clone()];
        for (i, d) in v.extra_divisors.iter().enumerate() {
            if mask & (1 << i) != 0 {
                gens.extend(d.generators().iter().cloned());
            }
        }
        if !crate::geometry::support_within_point(&gens, x, &cfg.budget)? {
            let names: Vec<String> = (0..m).filter(|i| mask & (1 << i) != 0).map(|i| format!("D{}", i + 1)).collect();
            return Err(Error::UnsupportedRequiresBlowup(format!(
                "the intersection of {} on X is not supported at the single point {x}",
                names.join(", ")
            )));
        }
    }
    Ok(())
}

/// First smooth point of X on V(φ), in enumeration order over F_{p^k}, k ≤ depth,
/// that is new to S and lies on no divisor.
fn find_component_point(v: &VarietyInstance, phi: &SparseForm, depth: usize) -> Result<Option<ProjPoint>> {
    let n = v.nvars();
    for k in 1..=depth.max(1) {
        let ext = make_extension(v.field.p() as u64, k)?;
        let Some(q) = ext.order() else { break };
        if ProjPoint::count(q, n) > AUGMENTATION_POINT_LIMIT {
            break;
        }
        for pt in ProjPoint::enumerate(&ext, n) {
            if pt.field_of_definition() != k || !phi.eval(pt.coords()).is_zero() {
                continue;
            }
            if !v.contains_point(&pt) || !v.is_smooth_point(&pt) || v.points.contains(&pt) {
                continue;
            }
            if v.on_divisor(&pt) || v.extra_divisors.iter().any(|d| on_ideal(d, &pt)) {
                continue;
            }
            return Ok(Some(pt));
        }
    }
    Ok(None)
}

fn attempt(v: &VarietyInstance, cfg: &SectionSearchConfig) -> Result<Attempt> {
    let (field, nvars, n) = (v.field, v.nvars(), v.dim());
    let (_, s) = find_separating_section(&v.divisor, &v.points, cfg)?;
    // s vanishing on a whole component means S misses that component.
    let shared = multivariate_gcd(&v.form, &s);
    if !shared.is_constant() {
        return Ok(Attempt::Uncovered(shared));
    }
    let g = build_unramified_map(v, &s, cfg)?;

    // E: where g fails to be unramified, together with V(s).
    let rows = power_ratio_rows(&s, &g.forms, g.m);
    let minors: Vec<SparseForm> = jacobian_minors(&v.form, &rows).into_iter().filter(|mu| !mu.is_zero()).collect();
    let mut e_gens = vec![v.form.clone()];
    e_gens.extend(minors.iter().map(|mu| s.mul(mu)));
    let mut phi = v.form.clone();
    for gen in &e_gens[1..] {
        if phi.is_constant() {
            break;
        }
        phi = multivariate_gcd(&phi, gen);
    }
    if !phi.is_constant() {
        return Ok(Attempt::Uncovered(phi));
    }
    let e_ideal = HomIdeal::new(field, nvars, e_gens.clone())?;

    let e = s.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
    let base = g.m * e;
    let t_degrees: Vec<u32> = (1..).map(|r| r * base).take_while(|&d| d <= cfg.max_degree).collect();
    let (t_deg, t) = separating_section_in_degrees(&e_ideal, &v.points, &t_degrees, cfg, "a form vanishing on the ramification locus")?;
    let r = t_deg / base;

    let ti_degrees: Vec<u32> = (2..).map(|l| l * t_deg).take_while(|&d| d <= cfg.max_degree).collect();
    let locus = HomIdeal::new(field, nvars, vec![v.form.clone(), t.clone()])?;
    let constraints: Vec<Option<HomIdeal>> = (0..n)
        .map(|i| match (v.mode, v.extra_divisors.get(i)) {
            (Mode::Local, Some(d)) => d.with_generators(std::slice::from_ref(&v.form)).map(Some),
            _ => Ok(None),
        })
        .collect::<Result<_>>()?;
    let cons_refs: Vec<Option<&HomIdeal>> = constraints.iter().map(|c| c.as_ref()).collect();
    let cov = covering_sections_in_degrees(n, &locus, &[], &cons_refs, &ti_degrees, cfg, "forms without common zero on the zero set of t")?;
    let l = cov.degree / t_deg;
    let morphism = assemble_u_tuple(&s, &g.forms, &t, &cov.forms, field.p(), l, r, g.m)?;

    let certificate = certify(v, &morphism, &minors, &e_gens, &constraints, cov.certificates, cfg)?;
    Ok(Attempt::Done(Box::new((morphism, certificate))))
}

fn lift(f: &SparseForm, chart: usize) -> SparseForm {
    f.dehomogenize(chart).with_nvars(f.nvars() + 1)
}

fn certify(
    v: &VarietyInstance,
    morphism: &CoverMorphism,
    minors: &[SparseForm],
    e_gens: &[SparseForm],
    constraints: &[Option<HomIdeal>],
    finiteness: Vec<NullstellensatzCert>,
    cfg: &SectionSearchConfig,
) -> Result<Certificate> {
    let (field, nvars) = (v.field, v.nvars());
    let (s, t) = (&morphism.s, &morphism.t);
    let fail = |what: &str| Error::DegenerateInput(format!("could not certify {what}"));

    // t = a·F + Σ c_j·s·μ_j, so off V(t) both s and some μ_j are nonzero.
    let cofs = membership_with_cofactors(t, e_gens, &cfg.budget)?.ok_or_else(|| fail("t in the ramification ideal"))?;
    let a = &cofs[0];
    let h = linear_combination(minors, &cofs[1..]);

    let aux = nvars;
    let w = SparseForm::var(field, nvars + 1, aux);
    let one = SparseForm::one(field, nvars + 1);
    let mut etale_charts = Vec::with_capacity(nvars);
    let mut unit_charts = Vec::with_capacity(nvars);
    for chart in 0..nvars {
        let rab = one.sub(&w.mul(&lift(t, chart)));
        let wa = w.mul(&lift(a, chart));
        let ws = w.mul(&lift(s, chart));
        let mut generators = vec![lift(&v.form, chart)];
        generators.extend(minors.iter().map(|mu| lift(mu, chart)));
        generators.push(rab.clone());
        let mut cofactors = vec![wa.clone()];
        cofactors.extend(cofs[1..].iter().map(|c| ws.mul(&lift(c, chart))));
        cofactors.push(one.clone());
        etale_charts.push(NullstellensatzCert { chart: Some(chart), aux: Some(aux), generators, cofactors });
        unit_charts.push(NullstellensatzCert {
            chart: Some(chart),
            aux: Some(aux),
            generators: vec![lift(&v.form, chart), lift(s, chart), rab],
            cofactors: vec![wa, w.mul(&lift(&h, chart)), one.clone()],
        });
    }

    // t ∈ I(D) + (F) through the cofactors of s in I(D).
    let d_gens = v.divisor.generators();
    let s_cofs = membership_with_cofactors(s, d_gens, &cfg.budget)?.ok_or_else(|| fail("s in the ideal of D"))?;
    let mut generators = vec![v.form.clone()];
    generators.extend(d_gens.iter().cloned());
    let mut cofactors = vec![a.clone()];
    cofactors.extend(s_cofs.iter().map(|b| h.mul(b)));
    let d_to_h = Membership { generators, cofactors };

    let s_off_h = orbit_representatives(&v.points)
        .into_iter()
        .map(|pt| {
            let value = morphism.u0().eval(pt.coords());
            PointRecord { point: pt, value }
        })
        .collect();

    // u_i = s_i·(s^M t^{p(l−1)}) + t_i^{p−1}·t_i with s_i, t_i ∈ I(D_i) + (F).
    let mut local = Vec::new();
    if v.mode == Mode::Local {
        let ledger = &morphism.ledger;
        let common = s.pow(ledger.s_exponent()).mul(&t.pow(ledger.t_exponent()));
        for (i, cons) in constraints.iter().enumerate() {
            let Some(ideal) = cons else { continue };
            let gens = ideal.generators();
            let cs = membership_with_cofactors(&morphism.s_list[i], gens, &cfg.budget)?.ok_or_else(|| fail("s_i in I(D_i) + (F)"))?;
            let ct = membership_with_cofactors(&morphism.t_list[i], gens, &cfg.budget)?.ok_or_else(|| fail("t_i in I(D_i) + (F)"))?;
            let tp = morphism.t_list[i].pow(ledger.p - 1);
            let cofactors = cs.iter().zip(&ct).map(|(a, b)| common.mul(a).add(&tp.mul(b))).collect();
            local.push(Membership { generators: gens.to_vec(), cofactors });
        }
    }

    let cert = Certificate {
        ledger: morphism.ledger,
        finiteness,
        etale_charts,
        unit_charts,
        d_to_h,
        s_off_h,
        local,
        flatness_note: FLATNESS_NOTE.to_string(),
    };
    debug_assert!(cert.d_to_h.combination() == *t);
    Ok(cert)
}

#[cfg(test)]
mod tests;
