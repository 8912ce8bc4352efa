//! Independent checks of a constructed cover: certificate re-multiplication
//! and a brute-force point oracle over small extension fields.

mod upoly;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::arith::{make_extension, ExtField, FieldElement, PrimeField};
use crate::cover::{CoverMorphism, Ledger};
use crate::error::{Error, Result};
use crate::geometry::{jacobian_minors, on_ideal, power_ratio_rows, ratio_rows, Mode, VarietyInstance};
use crate::ideal::{linear_combination, NullstellensatzCert};
use crate::linalg::rank_ext;
use crate::poly::{determinant, multivariate_gcd, ProjPoint, SparseForm, MAX_VARS};
use crate::sections::orbit_representatives;

pub use upoly::UPoly;

/// Default cap on the number of ambient points enumerated per extension degree.
pub const DEFAULT_POINT_LIMIT: u64 = 2_000_000;

/// Rational projection centres tried per fiber before declaring it non-reduced.
const MAX_CENTERS: usize = 8;

/// f = Σ cofactors[j] · generators[j] for a target f known from context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub generators: Vec<SparseForm>,
    pub cofactors: Vec<SparseForm>,
}

impl Membership {
    pub fn combination(&self) -> SparseForm {
        linear_combination(&self.generators, &self.cofactors)
    }

    fn to_text(&self, out: &mut String) {
        let _ = writeln!(out, "membership count={}", self.generators.len());
        for (g, c) in self.generators.iter().zip(&self.cofactors) {
            let _ = writeln!(out, "gen {g}");
            let _ = writeln!(out, "cof {c}");
        }
        out.push_str("end\n");
    }
}

/// The recorded value of u_0 at a marked point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointRecord {
    pub point: ProjPoint,
    pub value: FieldElement,
}

/// Everything needed to re-check the cover by multiplication and evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub ledger: Ledger,
    /// V(F, t, t_1, …, t_n) = ∅, one identity per chart.
    pub finiteness: Vec<NullstellensatzCert>,
    /// No point of X with t ≠ 0 where all maximal minors of [∇F; rows of g] vanish.
    pub etale_charts: Vec<NullstellensatzCert>,
    /// No point of X with t ≠ 0 and s = 0.
    pub unit_charts: Vec<NullstellensatzCert>,
    /// t as a combination of F and the generators of I(D).
    pub d_to_h: Membership,
    pub s_off_h: Vec<PointRecord>,
    /// u_i as a combination of the generators of I(D_i) and F, local mode only.
    pub local: Vec<Membership>,
    pub flatness_note: String,
}

/// Outcome of [`check_certificate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail { identity: String, reason: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<&'a str> {
        let line = self.lines.get(self.pos).ok_or_else(|| Error::parse(format!("missing {what}")).at_line(self.pos + 1, 0))?;
        self.pos += 1;
        Ok(line.trim_end())
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(msg).at_line(self.pos, 0)
    }

    /// `<keyword> <count>` followed by that many certificate blocks.
    fn cert_list(&mut self, keyword: &str) -> Result<Vec<NullstellensatzCert>> {
        let count = self.counted(keyword)?;
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let start = self.pos;
            let (cert, used) = NullstellensatzCert::from_lines(&self.lines[start..]).map_err(|e| shift(e, start))?;
            self.pos += used;
            out.push(cert);
        }
        Ok(out)
    }

    fn counted(&mut self, keyword: &str) -> Result<usize> {
        let line = self.next(keyword)?;
        line.strip_prefix(keyword)
            .and_then(|rest| rest.trim().parse::<usize>().ok())
            .ok_or_else(|| self.err(format!("expected '{keyword} <count>'")))
    }

    fn membership(&mut self, field: PrimeField, nvars: usize) -> Result<Membership> {
        let header = self.next("membership")?;
        let count = header
            .strip_prefix("membership count=")
            .and_then(|c| c.parse::<usize>().ok())
            .ok_or_else(|| self.err("expected 'membership count=<k>'"))?;
        let mut generators = Vec::with_capacity(count);
        let mut cofactors = Vec::with_capacity(count);
        for _ in 0..count {
            for (prefix, dest) in [("gen ", &mut generators), ("cof ", &mut cofactors)] {
                let line = self.next(prefix)?;
                let body = line.strip_prefix(prefix).ok_or_else(|| self.err(format!("expected '{prefix}'")))?;
                dest.push(SparseForm::parse(field, nvars, body).map_err(|e| e.at_line(self.pos, prefix.len()))?);
            }
        }
        if self.next("end")? != "end" {
            return Err(self.err("expected 'end'"));
        }
        Ok(Membership { generators, cofactors })
    }
}

fn shift(e: Error, offset: usize) -> Error {
    match e {
        Error::Parse { line, col, msg } => Error::Parse { line: line.max(1) + offset, col, msg },
        other => other,
    }
}

impl Certificate {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let (nvars, p) = match self.finiteness.first() {
            Some(c) => (c.nvars(), c.generators[0].p()),
            None => (0, self.ledger.p),
        };
        let _ = writeln!(out, "certificate p={p} vars={nvars}");
        let _ = writeln!(out, "{}", self.ledger.to_line());
        let _ = writeln!(out, "flatness {}", self.flatness_note);
        for (name, list) in [("finiteness", &self.finiteness), ("etale", &self.etale_charts), ("unit", &self.unit_charts)] {
            let _ = writeln!(out, "{name} {}", list.len());
            for c in list {
                out.push_str(&c.to_text());
            }
        }
        out.push_str("d_to_h\n");
        self.d_to_h.to_text(&mut out);
        let _ = writeln!(out, "s_off_h {}", self.s_off_h.len());
        for r in &self.s_off_h {
            let _ = writeln!(out, "point {} value {}", r.point, r.value);
        }
        let _ = writeln!(out, "local {}", self.local.len());
        for m in &self.local {
            m.to_text(&mut out);
        }
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Certificate> {
        let mut ls = Lines { lines: text.lines().collect(), pos: 0 };
        let header = ls.next("certificate header")?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("certificate") {
            return Err(ls.err("expected 'certificate' header"));
        }
        let (mut p, mut nvars) = (None, None);
        for kv in fields {
            match kv.split_once('=') {
                Some(("p", v)) => p = v.parse::<u64>().ok(),
                Some(("vars", v)) => nvars = v.parse::<usize>().ok(),
                _ => return Err(ls.err(format!("bad header field '{kv}'"))),
            }
        }
        let field = PrimeField::new(p.ok_or_else(|| ls.err("missing p"))?)?;
        let nvars = nvars.filter(|&n| (1..=MAX_VARS).contains(&n)).ok_or_else(|| ls.err("missing or bad vars"))?;
        let ledger = Ledger::parse_line(ls.next("ledger")?).map_err(|e| e.at_line(ls.pos, 0))?;
        let flatness_note = ls.next("flatness")?.strip_prefix("flatness ").ok_or_else(|| ls.err("expected 'flatness <note>'"))?.to_string();
        let finiteness = ls.cert_list("finiteness")?;
        let etale_charts = ls.cert_list("etale")?;
        let unit_charts = ls.cert_list("unit")?;
        if ls.next("d_to_h")? != "d_to_h" {
            return Err(ls.err("expected 'd_to_h'"));
        }
        let d_to_h = ls.membership(field, nvars)?;
        let count = ls.counted("s_off_h")?;
        let mut s_off_h = Vec::with_capacity(count);
        for _ in 0..count {
            let line = ls.next("point record")?;
            let (pt, value) = line
                .strip_prefix("point ")
                .and_then(|rest| rest.split_once(" value "))
                .ok_or_else(|| ls.err("expected 'point <P> value <v>'"))?;
            let point = ProjPoint::parse(field.p() as u64, pt).map_err(|e| e.at_line(ls.pos, 6))?;
            let value = FieldElement::parse(point.field(), value).map_err(|e| e.at_line(ls.pos, 0))?;
            s_off_h.push(PointRecord { point, value });
        }
        let count = ls.counted("local")?;
        let local = (0..count).map(|_| ls.membership(field, nvars)).collect::<Result<Vec<_>>>()?;
        if ls.next("end")? != "end" {
            return Err(ls.err("expected 'end'"));
        }
        Ok(Certificate { ledger, finiteness, etale_charts, unit_charts, d_to_h, s_off_h, local, flatness_note })
    }
}

fn lift(f: &SparseForm, chart: usize) -> SparseForm {
    f.dehomogenize(chart).with_nvars(f.nvars() + 1)
}

/// Checks a chart-indexed list of identities against the generators they must use.
fn check_charts(
    list: &[NullstellensatzCert],
    name: &str,
    nvars: usize,
    aux: Option<usize>,
    expected: impl Fn(usize) -> Vec<SparseForm>,
) -> std::result::Result<(), (String, String)> {
    if list.len() != nvars {
        return Err((name.to_string(), format!("expected {nvars} charts, found {}", list.len())));
    }
    for (j, c) in list.iter().enumerate() {
        let id = format!("{name}.chart[{j}]");
        if c.chart != Some(j) || c.aux != aux {
            return Err((id, "chart or auxiliary variable does not match its position".into()));
        }
        if c.generators != expected(j) {
            return Err((id, "generators differ from those recomputed from the morphism".into()));
        }
        if !c.verify() {
            return Err((id, "cofactor identity does not sum to 1".into()));
        }
    }
    Ok(())
}

/// Re-checks every identity of the certificate by multiplication and
/// evaluation alone, reporting the first one that fails.
pub fn check_certificate(cert: &Certificate, morph: &CoverMorphism, v: &VarietyInstance) -> Verdict {
    match check_inner(cert, morph, v) {
        Ok(()) => Verdict::Pass,
        Err((identity, reason)) => Verdict::Fail { identity, reason },
    }
}

fn check_inner(cert: &Certificate, morph: &CoverMorphism, v: &VarietyInstance) -> std::result::Result<(), (String, String)> {
    let fail = |id: &str, why: &str| Err((id.to_string(), why.to_string()));
    let (n, nvars) = (v.dim(), v.nvars());
    let lg = cert.ledger;

    // Degree ledger.
    if lg != morph.ledger {
        return fail("ledger", "certificate and morphism carry different ledgers");
    }
    if lg.l < 2 || [lg.p, lg.e, lg.m, lg.r].contains(&0) {
        return fail("ledger", "l must be at least 2 and p, e, m, r positive");
    }
    if lg.p != v.field.p() {
        return fail("ledger", "p differs from the characteristic of the instance");
    }
    if morph.forms.len() != n + 1 || morph.s_list.len() != n || morph.t_list.len() != n {
        return fail("ledger", "number of forms does not match the dimension of X");
    }
    let all = morph.forms.iter().chain(&morph.s_list).chain(&morph.t_list).chain([&morph.s, &morph.t]);
    if all.clone().any(|f| f.field() != v.field || f.nvars() != nvars) {
        return fail("ledger", "forms live in a different ring");
    }
    let (e, m, r, l) = (lg.e, lg.m, lg.r, lg.l);
    let deg = |f: &SparseForm| f.homogeneous_degree();
    if deg(&morph.s) != Some(e)
        || morph.s_list.iter().any(|f| deg(f) != Some(m * e))
        || deg(&morph.t) != Some(r * m * e)
        || morph.t_list.iter().any(|f| deg(f) != Some(l * r * m * e))
    {
        return fail("ledger", "an intermediate form has the wrong degree");
    }
    let d = lg.common_degree();
    if lg.summed_degree() != d || morph.forms.iter().any(|u| deg(u).map(u64::from) != Some(d)) {
        return fail("ledger", "the u_i do not all have degree p·l·r·m·e");
    }

    // The u-tuple is the assembly of its provenance.
    if morph.forms[0] != morph.t.pow(lg.u0_exponent()) {
        return fail("morphism.u[0]", "u_0 differs from t^(pl)");
    }
    let common = morph.s.pow(lg.s_exponent()).mul(&morph.t.pow(lg.t_exponent()));
    for i in 0..n {
        if morph.forms[i + 1] != morph.s_list[i].mul(&common).add(&morph.t_list[i].pow(lg.p)) {
            return fail(&format!("morphism.u[{}]", i + 1), "u_i differs from s_i s^(m(pr-1)) t^(p(l-1)) + t_i^p");
        }
    }

    // Finiteness: V(F, t, t_1, …, t_n) = ∅.
    let mut fin = vec![v.form.clone(), morph.t.clone()];
    fin.extend(morph.t_list.iter().cloned());
    check_charts(&cert.finiteness, "finiteness", nvars, None, |j| fin.iter().map(|f| f.dehomogenize(j)).collect())?;

    // Étaleness off H.
    let rows = power_ratio_rows(&morph.s, &morph.s_list, m);
    let minors: Vec<SparseForm> = jacobian_minors(&v.form, &rows).into_iter().filter(|mu| !mu.is_zero()).collect();
    let w = SparseForm::var(v.field, nvars + 1, nvars);
    let one = SparseForm::one(v.field, nvars + 1);
    let rab = |j: usize| one.sub(&w.mul(&lift(&morph.t, j)));
    check_charts(&cert.etale_charts, "etale", nvars, Some(nvars), |j| {
        let mut g = vec![lift(&v.form, j)];
        g.extend(minors.iter().map(|mu| lift(mu, j)));
        g.push(rab(j));
        g
    })?;
    check_charts(&cert.unit_charts, "etale.unit", nvars, Some(nvars), |j| vec![lift(&v.form, j), lift(&morph.s, j), rab(j)])?;
    // Rows of the u-map are q times the rows of g, q = u_0 t^(p(l-1)) s^(M-1).
    let q = morph.forms[0].mul(&morph.t.pow(lg.t_exponent())).mul(&morph.s.pow(lg.s_exponent() - 1));
    for (i, (big, small)) in ratio_rows(&morph.forms).iter().zip(&rows).enumerate() {
        if big.iter().zip(small).any(|(a, b)| *a != q.mul(b)) {
            return fail(&format!("etale.rows[{i}]"), "row of the u-map is not q times the row of g");
        }
    }

    // D goes into H: t ∈ I(D) + (F), and u_0 is a power of t.
    let mut dg = vec![v.form.clone()];
    dg.extend(v.divisor.generators().iter().cloned());
    if cert.d_to_h.generators != dg {
        return fail("d_to_h", "generators are not F and the generators of I(D)");
    }
    if cert.d_to_h.cofactors.len() != dg.len() || cert.d_to_h.combination() != morph.t {
        return fail("d_to_h", "cofactors do not combine to t");
    }

    // S stays off H.
    for (k, rec) in cert.s_off_h.iter().enumerate() {
        let id = format!("s_off_h[{k}]");
        if rec.point.len() != nvars || rec.point.field().p() != v.field.p() {
            return fail(&id, "point lives in a different space");
        }
        let value = morph.forms[0].eval(rec.point.coords());
        if value != rec.value {
            return fail(&id, "recorded value differs from u_0 at the point");
        }
        if value.is_zero() {
            return fail(&id, "u_0 vanishes at the marked point");
        }
    }
    for pt in orbit_representatives(&v.points) {
        if !cert.s_off_h.iter().any(|rec| rec.point == pt) {
            return fail("s_off_h", &format!("no record for the marked point {pt}"));
        }
    }

    // Constrained divisors go to coordinate hyperplanes.
    if v.mode == Mode::Local {
        let count = v.extra_divisors.len().min(n);
        if cert.local.len() != count {
            return fail("local", &format!("expected {count} membership records, found {}", cert.local.len()));
        }
        for (i, rec) in cert.local.iter().enumerate() {
            let id = format!("local[{i}]");
            let mut gens = v.extra_divisors[i].generators().to_vec();
            gens.push(v.form.clone());
            if rec.generators != gens {
                return fail(&id, "generators are not those of I(D_i) and F");
            }
            if rec.cofactors.len() != gens.len() || rec.combination() != morph.forms[i + 1] {
                return fail(&id, "cofactors do not combine to u_i");
            }
        }
    } else if !cert.local.is_empty() {
        return fail("local", "membership records present for a global instance");
    }
    Ok(())
}

/// All points of X(F_{p^k}) in enumeration order.
pub fn enumerate_points(v: &VarietyInstance, k: usize, limit: u64) -> Result<Vec<ProjPoint>> {
    let ext = make_extension(v.field.p() as u64, k)?;
    let q = ext.order().ok_or_else(|| Error::BudgetExceeded(format!("F_{}^{k} is too large to enumerate", v.field.p())))?;
    let total = ProjPoint::count(q, v.nvars());
    if total > limit {
        return Err(Error::BudgetExceeded(format!("{total} ambient points over F_{q} exceed the limit {limit}")));
    }
    Ok(ProjPoint::enumerate(&ext, v.nvars()).filter(|pt| v.contains_point(pt)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub depth: usize,
    pub point_limit: u64,
    /// Compute fiber polynomials (curves only).
    pub fiber_polynomials: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { depth: 3, point_limit: DEFAULT_POINT_LIMIT, fiber_polynomials: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Clause {
    /// Jacobian rank below n + 1 at a point with u_0 ≠ 0.
    Ramified,
    /// All map forms vanish.
    Undefined,
    /// A point of D with u_0 ≠ 0.
    DivisorOffH,
    /// A marked point with u_0 = 0.
    MarkedOnH,
    /// A point of D_i off H whose i-th coordinate is nonzero.
    LocalDivisor(usize),
    /// A squarefree fiber polynomial whose rational roots disagree with the fiber size.
    FiberCount,
}

impl std::fmt::Display for Clause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Clause::Ramified => write!(f, "ramified"),
            Clause::Undefined => write!(f, "undefined"),
            Clause::DivisorOffH => write!(f, "divisor-off-H"),
            Clause::MarkedOnH => write!(f, "marked-point-on-H"),
            Clause::LocalDivisor(i) => write!(f, "divisor-D{i}-off-hyperplane"),
            Clause::FiberCount => write!(f, "fiber-count"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub clause: Clause,
    pub point: ProjPoint,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointEntry {
    pub point: ProjPoint,
    pub off_h: bool,
    /// Rank of [∇F; rows of the map] where u_0 ≠ 0.
    pub rank: Option<usize>,
    /// None where every map form vanishes.
    pub image: Option<ProjPoint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberPolynomial {
    pub center: ProjPoint,
    pub degree: usize,
    pub squarefree: bool,
    /// Distinct roots in P^1(F_{p^k}).
    pub rational_roots: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberEntry {
    pub image: ProjPoint,
    pub size: usize,
    pub on_h: bool,
    pub polynomial: Option<FiberPolynomial>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelReport {
    pub k: usize,
    pub points: Vec<PointEntry>,
    pub fibers: Vec<FiberEntry>,
    /// Points where the map is undefined.
    pub undefined: usize,
}

impl LevelReport {
    pub fn fiber_total(&self) -> usize {
        self.fibers.iter().map(|f| f.size).sum::<usize>() + self.undefined
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub p: u32,
    pub n: usize,
    pub levels: Vec<LevelReport>,
    pub violations: Vec<Violation>,
    /// Degree of the fiber polynomials, when they were computed.
    pub fiber_degree: Option<usize>,
}

impl OracleReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "oracle p={} n={} depth={}", self.p, self.n, self.levels.len());
        if let Some(d) = self.fiber_degree {
            let _ = writeln!(out, "fiber-degree {d}");
        }
        for lv in &self.levels {
            let _ = writeln!(out, "level k={} points={} fibers={} undefined={}", lv.k, lv.points.len(), lv.fibers.len(), lv.undefined);
            for pe in &lv.points {
                let rank = pe.rank.map_or("-".to_string(), |r| r.to_string());
                let image = pe.image.as_ref().map_or("-".to_string(), |i| i.to_string());
                let _ = writeln!(out, "  point {:<24} offH={} rank={rank} image={image}", pe.point.to_string(), yn(pe.off_h));
            }
            for fe in &lv.fibers {
                let _ = write!(out, "  fiber {:<24} size={} onH={}", fe.image.to_string(), fe.size, yn(fe.on_h));
                if let Some(fp) = &fe.polynomial {
                    let _ = write!(
                        out,
                        " degree={} squarefree={} roots={} center={}",
                        fp.degree,
                        yn(fp.squarefree),
                        fp.rational_roots,
                        fp.center
                    );
                }
                out.push('\n');
            }
        }
        let _ = writeln!(out, "violations {}", self.violations.len());
        for vi in &self.violations {
            let _ = writeln!(out, "  {} at {}: {}", vi.clause, vi.point, vi.detail);
        }
        out
    }
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Projection of a plane curve from a rational centre O ∉ X: the norm
/// R(a; x, z) of u_1 − a·u_0 from F_p[x, z][y]/(F), with content in a removed.
struct Projection {
    center: ProjPoint,
    /// coefficient of a^k as (x-exponent, coefficient) pairs of a binary form of degree `degree`.
    by_power: Vec<Vec<(usize, u32)>>,
    degree: usize,
}

impl Projection {
    fn new(form: &SparseForm, u0: &SparseForm, u1: &SparseForm, center: &ProjPoint) -> Option<Projection> {
        let field = form.field();
        let o: Vec<u32> = center.coords().iter().map(|c| c.as_prime()).collect::<Option<_>>()?;
        let j = o.iter().position(|&c| c != 0)?;
        // x_i ↦ O_i·y + (x or z for the two indices other than j)
        let others: Vec<usize> = (0..3).filter(|&i| i != j).collect();
        let images: Vec<SparseForm> = (0..3)
            .map(|i| {
                let mut f = SparseForm::var(field, 3, 1).scale(o[i]);
                if i == others[0] {
                    f = f.add(&SparseForm::var(field, 3, 0));
                } else if i == others[1] {
                    f = f.add(&SparseForm::var(field, 3, 2));
                }
                f
            })
            .collect();
        let f = form.compose(&images).to_univariate(1);
        let delta = f.len() - 1;
        let lead = f[delta].terms().first()?.1;
        if !f[delta].is_constant() || delta == 0 {
            return None;
        }
        let inv = field.inv(lead);
        let f: Vec<SparseForm> = f.iter().map(|c| c.scale(inv)).collect();
        let reduce = |g: Vec<SparseForm>, shift: usize| -> Vec<SparseForm> {
            let mut g: Vec<SparseForm> = std::iter::repeat_n(SparseForm::zero(field, 3), shift).chain(g).collect();
            for top in (delta..g.len()).rev() {
                let c = g[top].clone();
                if c.is_zero() {
                    continue;
                }
                for i in 0..delta {
                    g[top - delta + i] = g[top - delta + i].sub(&c.mul(&f[i]));
                }
                g[top] = SparseForm::zero(field, 3);
            }
            g.resize(delta, SparseForm::zero(field, 3));
            g
        };
        let g0 = u0.compose(&images).to_univariate(1);
        let g1 = u1.compose(&images).to_univariate(1);
        let a = SparseForm::var(field, 4, 3);
        let matrix: Vec<Vec<SparseForm>> = (0..delta)
            .map(|i| {
                let r0 = reduce(g0.clone(), i);
                let r1 = reduce(g1.clone(), i);
                r1.iter().zip(&r0).map(|(c1, c0)| c1.with_nvars(4).sub(&a.mul(&c0.with_nvars(4)))).collect()
            })
            .collect();
        let norm = determinant(&matrix);
        if norm.is_zero() {
            return None;
        }
        let coeffs = norm.to_univariate(3);
        let mut content = SparseForm::zero(field, 4);
        for c in coeffs.iter().filter(|c| !c.is_zero()) {
            content = if content.is_zero() { c.clone() } else { multivariate_gcd(&content, c) };
        }
        let by_form: Vec<SparseForm> =
            coeffs.iter().map(|c| if c.is_zero() { c.clone() } else { c.div_exact(&content).expect("content divides") }).collect();
        let degree = by_form.iter().find_map(|c| c.homogeneous_degree())? as usize;
        let by_power = by_form.iter().map(|c| c.terms().iter().map(|&(mono, coeff)| (mono.exp(0) as usize, coeff)).collect()).collect();
        Some(Projection { center: center.clone(), by_power, degree })
    }

    /// The fiber polynomial over `a`, dehomogenized at z = 1, and its degree as a binary form.
    fn specialize(&self, field: &Arc<ExtField>, a: &FieldElement) -> UPoly {
        let mut coeffs = vec![FieldElement::zero(field); self.degree + 1];
        let mut apow = FieldElement::one(field);
        for terms in &self.by_power {
            for &(i, c) in terms {
                coeffs[i] = &coeffs[i] + &apow.scale(c);
            }
            apow = &apow * a;
        }
        UPoly::new(field, coeffs)
    }

    fn analyse(&self, field: &Arc<ExtField>, a: &FieldElement) -> FiberPolynomial {
        let q = field.order().expect("enumerable field");
        let u = self.specialize(field, a);
        let (squarefree, rational_roots) = match u.degree() {
            None => (false, 0),
            Some(du) => {
                let at_infinity = self.degree - du;
                (u.is_squarefree() && at_infinity <= 1, u.distinct_roots_in(q) + usize::from(at_infinity > 0))
            }
        };
        FiberPolynomial { center: self.center.clone(), degree: self.degree, squarefree, rational_roots }
    }
}

fn projections(v: &VarietyInstance, forms: &[SparseForm]) -> Result<Vec<Projection>> {
    let f1 = make_extension(v.field.p() as u64, 1)?;
    Ok(ProjPoint::enumerate(&f1, 3)
        .filter(|o| !v.contains_point(o))
        .filter_map(|o| Projection::new(&v.form, &forms[0], &forms[1], &o))
        .take(MAX_CENTERS)
        .collect())
}

/// Brute-force check of the map given by `forms` on X(F_{p^k}), k ≤ depth.
pub fn oracle_check(v: &VarietyInstance, forms: &[SparseForm], cfg: &OracleConfig) -> Result<OracleReport> {
    let n = v.dim();
    if forms.len() != n + 1 {
        return Err(Error::DegreeMismatch(format!("expected {} map forms, got {}", n + 1, forms.len())));
    }
    let grad_f = v.gradient();
    let grads: Vec<Vec<SparseForm>> = forms.iter().map(|u| u.gradient()).collect();
    let proj = if n == 1 && cfg.fiber_polynomials { projections(v, forms)? } else { Vec::new() };
    let mut violations = Vec::new();
    let mut levels = Vec::new();

    for k in 1..=cfg.depth {
        let ext = make_extension(v.field.p() as u64, k)?;
        let points = enumerate_points(v, k, cfg.point_limit)?;
        let mut entries = Vec::with_capacity(points.len());
        let mut fibers: BTreeMap<ProjPoint, usize> = BTreeMap::new();
        let mut undefined = 0;
        for pt in points {
            let c = pt.coords();
            let vals: Vec<FieldElement> = forms.iter().map(|u| u.eval(c)).collect();
            let off_h = !vals[0].is_zero();
            let image = ProjPoint::new(vals.clone()).ok();
            let mut rank = None;
            if image.is_none() {
                undefined += 1;
                violations.push(Violation { clause: Clause::Undefined, point: pt.clone(), detail: "every map form vanishes".into() });
            }
            if off_h {
                let gu: Vec<Vec<FieldElement>> = grads.iter().map(|g| g.iter().map(|d| d.eval(c)).collect()).collect();
                let mut mat = vec![grad_f.iter().map(|g| g.eval(c)).collect::<Vec<_>>()];
                for i in 1..=n {
                    mat.push((0..v.nvars()).map(|j| &(&vals[0] * &gu[i][j]) - &(&vals[i] * &gu[0][j])).collect());
                }
                let r = rank_ext(&mat);
                rank = Some(r);
                if r < n + 1 {
                    violations.push(Violation {
                        clause: Clause::Ramified,
                        point: pt.clone(),
                        detail: format!("Jacobian rank {r} < {}", n + 1),
                    });
                }
                if v.on_divisor(&pt) {
                    violations.push(Violation { clause: Clause::DivisorOffH, point: pt.clone(), detail: "u_0 is nonzero on D".into() });
                }
                if v.mode == Mode::Local {
                    for (i, d) in v.extra_divisors.iter().enumerate().take(n) {
                        if on_ideal(d, &pt) && !vals[i + 1].is_zero() {
                            violations.push(Violation {
                                clause: Clause::LocalDivisor(i + 1),
                                point: pt.clone(),
                                detail: format!("u_{} is nonzero on D{}", i + 1, i + 1),
                            });
                        }
                    }
                }
            }
            if let Some(img) = &image {
                *fibers.entry(img.clone()).or_insert(0) += 1;
            }
            entries.push(PointEntry { point: pt, off_h, rank, image });
        }
        let fibers: Vec<FiberEntry> = fibers
            .into_iter()
            .map(|(image, size)| {
                let on_h = image.coords()[0].is_zero();
                let polynomial = if on_h || proj.is_empty() {
                    None
                } else {
                    let a = &image.coords()[1] * &image.coords()[0].inv().expect("off H");
                    let mut first = None;
                    let mut chosen = None;
                    for pr in &proj {
                        let fp = pr.analyse(&ext, &a);
                        if fp.squarefree {
                            chosen = Some(fp);
                            break;
                        }
                        first.get_or_insert(fp);
                    }
                    chosen.or(first)
                };
                if let Some(fp) = &polynomial {
                    if fp.squarefree && fp.rational_roots != size {
                        violations.push(Violation {
                            clause: Clause::FiberCount,
                            point: image.clone(),
                            detail: format!("{} rational roots but {size} points in the fiber", fp.rational_roots),
                        });
                    }
                }
                FiberEntry { image, size, on_h, polynomial }
            })
            .collect();
        levels.push(LevelReport { k, points: entries, fibers, undefined });
    }

    for pt in orbit_representatives(&v.points) {
        if forms[0].eval(pt.coords()).is_zero() {
            violations.push(Violation { clause: Clause::MarkedOnH, point: pt, detail: "u_0 vanishes at a marked point".into() });
        }
    }
    Ok(OracleReport { p: v.field.p(), n, levels, violations, fiber_degree: proj.first().map(|p| p.degree) })
}

#[cfg(test)]
mod tests;
