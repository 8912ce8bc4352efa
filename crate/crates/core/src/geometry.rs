//! The hypersurface instance, its singular locus, charts and ramification data.

use std::collections::BTreeSet;

use crate::arith::PrimeField;
use crate::error::{Error, Result};
use crate::ideal::{membership_with_cofactors, rabinowitsch_system, Budget, HomIdeal};
use crate::linalg::rank_ext;
use crate::poly::{is_squarefree, maximal_minors, multivariate_gcd, ProjPoint, SparseForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Global,
    Local,
}

/// X = V(F) in P^{n+1} over F_p together with the construction data.
#[derive(Debug, Clone)]
pub struct VarietyInstance {
    pub field: PrimeField,
    /// The defining form, in n + 2 variables.
    pub form: SparseForm,
    /// Subscheme to be sent into the hyperplane at infinity.
    pub divisor: HomIdeal,
    /// Divisors to be sent to coordinate hyperplanes (local mode).
    pub extra_divisors: Vec<HomIdeal>,
    /// Marked points, closed under Frobenius.
    pub points: Vec<ProjPoint>,
    pub mode: Mode,
}

impl VarietyInstance {
    /// Builds an instance; `points` are closed under Frobenius and sorted.
    pub fn new(form: SparseForm, divisor: HomIdeal, extra_divisors: Vec<HomIdeal>, points: Vec<ProjPoint>, mode: Mode) -> Result<Self> {
        let field = form.field();
        let nvars = form.nvars();
        if nvars < 3 {
            return Err(Error::Validation("ambient projective space must have dimension at least 2".into()));
        }
        if divisor.nvars() != nvars || extra_divisors.iter().any(|d| d.nvars() != nvars) {
            return Err(Error::Validation("divisor lives in a different ring".into()));
        }
        for pt in &points {
            if pt.len() != nvars {
                return Err(Error::Validation(format!("point {pt} has {} coordinates, expected {nvars}", pt.len())));
            }
            if pt.field().p() != field.p() {
                return Err(Error::Validation(format!("point {pt} lies over another characteristic")));
            }
        }
        Ok(VarietyInstance { field, form, divisor, extra_divisors, points: close_under_frobenius(&points), mode })
    }

    pub fn nvars(&self) -> usize {
        self.form.nvars()
    }

    /// Dimension n of X.
    pub fn dim(&self) -> usize {
        self.nvars() - 2
    }

    pub fn degree(&self) -> u32 {
        self.form.homogeneous_degree().unwrap_or(0)
    }

    pub fn gradient(&self) -> Vec<SparseForm> {
        self.form.gradient()
    }

    pub fn is_smooth_point(&self, pt: &ProjPoint) -> bool {
        self.gradient().iter().any(|g| !g.eval(pt.coords()).is_zero())
    }

    pub fn contains_point(&self, pt: &ProjPoint) -> bool {
        self.form.eval(pt.coords()).is_zero()
    }

    /// Whether every generator of the divisor ideal vanishes at `pt`.
    pub fn on_divisor(&self, pt: &ProjPoint) -> bool {
        on_ideal(&self.divisor, pt)
    }

    /// One representative (the least conjugate) per Frobenius orbit of S.
    pub fn orbit_representatives(&self) -> Vec<ProjPoint> {
        let reps: BTreeSet<ProjPoint> = self.points.iter().map(|p| p.orbit_representative()).collect();
        reps.into_iter().collect()
    }
}

/// All Frobenius conjugates of the given points, deduplicated and sorted.
pub fn close_under_frobenius(points: &[ProjPoint]) -> Vec<ProjPoint> {
    let set: BTreeSet<ProjPoint> = points.iter().flat_map(|p| p.orbit()).collect();
    set.into_iter().collect()
}

/// Whether every generator of `ideal` vanishes at `pt` (the unit ideal vanishes nowhere).
pub fn on_ideal(ideal: &HomIdeal, pt: &ProjPoint) -> bool {
    ideal.generators().iter().all(|g| g.eval(pt.coords()).is_zero())
}

/// An affine chart x_var = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chart {
    pub var: usize,
}

impl Chart {
    pub fn dehomogenize(&self, f: &SparseForm) -> SparseForm {
        f.dehomogenize(self.var)
    }

    pub fn homogenize(&self, f: &SparseForm, degree: u32) -> Result<SparseForm> {
        f.homogenize(self.var, degree)
    }

    /// A chart containing the point: the position of its last nonzero coordinate.
    pub fn containing(pt: &ProjPoint) -> Chart {
        Chart { var: pt.coords().iter().rposition(|c| !c.is_zero()).expect("nonzero point") }
    }
}

/// Hypotheses of the construction that an instance violates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub issues: Vec<String>,
}

impl Diagnostics {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(self.issues.join("; ")))
        }
    }
}

pub fn validate_instance(v: &VarietyInstance) -> Diagnostics {
    let mut issues = Vec::new();
    match v.form.homogeneous_degree() {
        None if v.form.is_zero() => issues.push("F is zero".to_string()),
        None => issues.push("F is not homogeneous".to_string()),
        Some(0) => issues.push("F is constant".to_string()),
        Some(_) => {
            if !is_squarefree(&v.form).unwrap_or(false) {
                issues.push("F is not squarefree".to_string());
            }
        }
    }
    if v.extra_divisors.len() > v.dim() {
        issues.push(format!("{} constrained divisors exceed the dimension {}", v.extra_divisors.len(), v.dim()));
    }
    if v.mode == Mode::Local && v.points.is_empty() {
        issues.push("local mode needs a marked point".to_string());
    }
    for pt in &v.points {
        if !v.contains_point(pt) {
            issues.push(format!("point {pt} does not lie on X"));
        } else if !v.is_smooth_point(pt) {
            issues.push(format!("point {pt} is a singular point of X"));
        }
        if v.on_divisor(pt) {
            issues.push(format!("point {pt} lies on D"));
        }
    }
    let closed = close_under_frobenius(&v.points);
    if closed.len() != v.points.len() {
        issues.push("marked points are not closed under Frobenius".to_string());
    }
    Diagnostics { issues }
}

/// The ideal (F, ∂F/∂x_0, …, ∂F/∂x_{n+1}).
pub fn singular_locus(v: &VarietyInstance) -> HomIdeal {
    let mut gens = vec![v.form.clone()];
    gens.extend(v.gradient());
    HomIdeal::new(v.field, v.nvars(), gens).expect("partials of a form are homogeneous")
}

/// Rows a_0 ∇a_i − a_i ∇a_0 of the cleared Jacobian of (a_i / a_0).
pub fn ratio_rows(map_forms: &[SparseForm]) -> Vec<Vec<SparseForm>> {
    let a0 = &map_forms[0];
    let g0 = a0.gradient();
    map_forms[1..]
        .iter()
        .map(|ai| {
            let gi = ai.gradient();
            gi.iter().zip(&g0).map(|(di, d0)| a0.mul(di).sub(&ai.mul(d0))).collect()
        })
        .collect()
}

/// Rows s ∇f_i − m f_i ∇s: the rows for (s^m, f_1, …) with the common factor s^{m−1} removed.
pub fn power_ratio_rows(s: &SparseForm, forms: &[SparseForm], m: u32) -> Vec<Vec<SparseForm>> {
    let gs = s.gradient();
    let mm = m % s.p();
    forms
        .iter()
        .map(|f| {
            let gf = f.gradient();
            let fm = f.scale(mm);
            gf.iter().zip(&gs).map(|(df, ds)| s.mul(df).sub(&fm.mul(ds))).collect()
        })
        .collect()
}

/// Maximal minors of the matrix with rows ∇F and `rows`.
pub fn jacobian_minors(form: &SparseForm, rows: &[Vec<SparseForm>]) -> Vec<SparseForm> {
    let mut mat = vec![form.gradient()];
    mat.extend(rows.iter().cloned());
    maximal_minors(&mat)
}

/// Where the map given by `map_forms` fails to be unramified, inside X ∖ {a_0 = 0}.
#[derive(Debug, Clone)]
pub struct RamificationData {
    pub map_forms: Vec<SparseForm>,
    pub rows: Vec<Vec<SparseForm>>,
    pub minors: Vec<SparseForm>,
    /// (F) + (minors); its zero set off {a_0 = 0} is the ramification locus.
    pub ideal: HomIdeal,
}

pub fn ramification_locus(v: &VarietyInstance, map_forms: &[SparseForm]) -> Result<RamificationData> {
    if map_forms.len() != v.dim() + 1 {
        return Err(Error::DegreeMismatch(format!("expected {} map forms, got {}", v.dim() + 1, map_forms.len())));
    }
    let d = map_forms[0].homogeneous_degree().ok_or(Error::NotHomogeneous)?;
    if map_forms.iter().any(|a| a.homogeneous_degree() != Some(d)) {
        return Err(Error::DegreeMismatch("map forms have different degrees".into()));
    }
    let common = multivariate_gcd(&v.form, &map_forms[0]);
    if !common.is_constant() {
        return Err(Error::ComponentCollapse(common.to_string()));
    }
    let rows = ratio_rows(map_forms);
    let minors = jacobian_minors(&v.form, &rows);
    let mut gens = vec![v.form.clone()];
    gens.extend(minors.iter().filter(|m| !m.is_zero()).cloned());
    let ideal = HomIdeal::new(v.field, v.nvars(), gens)?;
    Ok(RamificationData { map_forms: map_forms.to_vec(), rows, minors, ideal })
}

/// Generators of the ramification ideal of polynomial chart functions h_1…h_n
/// on the affine hypersurface F_aff = 0: F_aff together with the maximal
/// minors of the Jacobian of (F_aff, h_1, …, h_n).
pub fn affine_ramification_ideal(f_aff: &SparseForm, functions: &[SparseForm]) -> Vec<SparseForm> {
    let rows: Vec<Vec<SparseForm>> = functions.iter().map(|h| h.gradient()).collect();
    let mut gens = vec![f_aff.clone()];
    gens.extend(jacobian_minors(f_aff, &rows).into_iter().filter(|m| !m.is_zero()));
    gens
}

/// Rank at `pt` of the matrix with rows ∇F and ∇g for every generator of each ideal.
pub fn conormal_rank(form: &SparseForm, ideals: &[&HomIdeal], pt: &ProjPoint) -> usize {
    let mut rows = vec![form.gradient().iter().map(|g| g.eval(pt.coords())).collect::<Vec<_>>()];
    for ideal in ideals {
        for g in ideal.generators() {
            rows.push(g.gradient().iter().map(|d| d.eval(pt.coords())).collect());
        }
    }
    rank_ext(&rows)
}

/// Checks that each constrained divisor is a smooth divisor of X at `pt` and
/// that together they meet transversely there.
pub fn check_transversality(v: &VarietyInstance, pt: &ProjPoint) -> Result<()> {
    for (i, d) in v.extra_divisors.iter().enumerate() {
        if !on_ideal(d, pt) {
            continue;
        }
        let r = conormal_rank(&v.form, &[d], pt);
        if r != 2 {
            return Err(Error::NotTransverse(format!("{pt}: divisor D{} is not a smooth divisor of X there (conormal rank {r})", i + 1)));
        }
    }
    let through: Vec<&HomIdeal> = v.extra_divisors.iter().filter(|d| on_ideal(d, pt)).collect();
    let r = conormal_rank(&v.form, &through, pt);
    if r != 1 + through.len() {
        return Err(Error::NotTransverse(format!("{pt}: {} divisors through the point span conormal rank {r}", through.len())));
    }
    Ok(())
}

/// Whether the zero set of `gens` is contained in {pt} for a rational point `pt`:
/// every linear form vanishing at `pt` is certified nonvanishing nowhere on it.
pub fn support_within_point(gens: &[SparseForm], pt: &ProjPoint, budget: &Budget) -> Result<bool> {
    let Some(coords) = pt.coords().iter().map(|c| c.as_prime()).collect::<Option<Vec<u32>>>() else {
        return Ok(false);
    };
    let field = gens[0].field();
    let n = gens[0].nvars();
    let last = coords.iter().rposition(|&c| c != 0).expect("nonzero point");
    // x_j − c_j x_last for j ≠ last cut out the point.
    for j in (0..n).filter(|&j| j != last) {
        let lin = SparseForm::var(field, n, j).sub(&SparseForm::var(field, n, last).scale(coords[j]));
        for chart in 0..n {
            let aff: Vec<SparseForm> = gens.iter().map(|g| g.dehomogenize(chart)).collect();
            let (system, _) = rabinowitsch_system(&aff, &lin.dehomogenize(chart))?;
            let one = SparseForm::one(field, n + 1);
            if membership_with_cofactors(&one, &system, budget)?.is_none() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::make_extension;
    use crate::ideal::{Groebner, HomIdeal};
    use crate::poly::ProjPoint;

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn form(p: u64, s: &str) -> SparseForm {
        SparseForm::parse(fp(p), 3, s).unwrap()
    }

    fn ideal(p: u64, gens: &[&str]) -> HomIdeal {
        HomIdeal::new(fp(p), 3, gens.iter().map(|g| form(p, g)).collect()).unwrap()
    }

    fn inst(p: u64, f: &str, d: &[&str], pts: &[&[i64]]) -> VarietyInstance {
        let divisor = if d.is_empty() { HomIdeal::unit(fp(p), 3) } else { ideal(p, d) };
        let points = pts.iter().map(|c| ProjPoint::rational(p as u32, c).unwrap()).collect();
        VarietyInstance::new(form(p, f), divisor, vec![], points, Mode::Global).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(validate_instance(&inst(3, "x*z - y^2", &["y", "z"], &[&[0, 0, 1]])).is_valid());
        let d = validate_instance(&inst(3, "x^2*y", &[], &[]));
        assert!(d.issues.iter().any(|i| i.contains("squarefree")));
        let d = validate_instance(&inst(3, "x*y", &[], &[&[0, 0, 1]]));
        assert!(d.issues.iter().any(|i| i.contains("singular")));
        let d = validate_instance(&inst(3, "x*z - y^2", &["y", "x"], &[&[0, 0, 1]]));
        assert!(d.issues.iter().any(|i| i.contains("lies on D")));
    }

    #[test]
    fn frobenius_closure_of_points() {
        let pt = ProjPoint::parse(3, "(w^2:w:1)@2").unwrap();
        let v = VarietyInstance::new(form(3, "x*z - y^2"), HomIdeal::unit(fp(3), 3), vec![], vec![pt], Mode::Global).unwrap();
        assert_eq!(v.points.len(), 2);
        assert_eq!(v.orbit_representatives().len(), 1);
        assert!(validate_instance(&v).is_valid());
    }

    #[test]
    fn singular_locus_examples() {
        let b = Budget::default();
        let conic = singular_locus(&inst(3, "x*z - y^2", &[], &[]));
        assert!(matches!(crate::ideal::projective_empty(&conic, &b, 2).unwrap(), crate::ideal::Emptiness::Empty(_)));
        let lines = singular_locus(&inst(3, "x*y", &[], &[]));
        match crate::ideal::projective_empty(&lines, &b, 2).unwrap() {
            crate::ideal::Emptiness::NonEmpty(pt) => assert_eq!(pt, ProjPoint::rational(3, &[0, 0, 1]).unwrap()),
            other => panic!("{other:?}"),
        }
        let cubic = singular_locus(&inst(5, "x^3 + y^3 + z^3", &[], &[]));
        assert!(matches!(crate::ideal::projective_empty(&cubic, &b, 2).unwrap(), crate::ideal::Emptiness::Empty(_)));
    }

    #[test]
    fn conic_projection_ramifies_at_one_point_of_the_chart() {
        // h = x/z on the conic, chart z = 1: curve x = y^2, ramification 2y.
        let f_aff = SparseForm::parse(fp(3), 2, "x - y^2").unwrap();
        let h = SparseForm::parse(fp(3), 2, "x").unwrap();
        let gens = affine_ramification_ideal(&f_aff, &[h]);
        let gb = Groebner::compute(&gens, false, &Budget::default()).unwrap();
        let mut basis: Vec<String> = gb.basis().iter().map(|g| g.to_string()).collect();
        basis.sort();
        assert_eq!(basis, vec!["x", "y"]);
        // projective version with the map (z^2, xz): rows vanish exactly where y = 0 off z = 0
        let v = inst(3, "x*z - y^2", &[], &[]);
        let data = ramification_locus(&v, &[form(3, "z^2"), form(3, "x*z")]).unwrap();
        let on_ram = |c: &[i64]| on_ideal(&data.ideal, &ProjPoint::rational(3, c).unwrap());
        assert!(on_ram(&[0, 0, 1]));
        assert!(!on_ram(&[1, 1, 1]));
        assert!(!on_ram(&[1, 2, 1]));
    }

    #[test]
    fn ramification_ignores_pth_powers_and_affine_changes() {
        let v = inst(3, "x*z - y^2", &[], &[]);
        let a0 = form(3, "z^3");
        let a1 = form(3, "x*z^2 + y^2*z");
        let g = form(3, "x + y");
        let base = ramification_locus(&v, &[a0.clone(), a1.clone()]).unwrap();
        let shifted = ramification_locus(&v, &[a0.clone(), a1.add(&g.pow(3))]).unwrap();
        assert_eq!(base.rows, shifted.rows);
        let moved = ramification_locus(&v, &[a0.clone(), a1.add(&a0.scale(2))]).unwrap();
        assert_eq!(base.rows, moved.rows);
    }

    #[test]
    fn component_collapse_detected() {
        let v = inst(3, "x*y", &[], &[]);
        assert!(matches!(ramification_locus(&v, &[form(3, "x"), form(3, "z")]), Err(Error::ComponentCollapse(_))));
    }

    #[test]
    fn singular_points_lie_in_every_ramification_ideal() {
        let v = inst(3, "x*y", &[], &[]);
        let data = ramification_locus(&v, &[form(3, "x + y + z"), form(3, "x + 2*z")]).unwrap();
        assert!(on_ideal(&data.ideal, &ProjPoint::rational(3, &[0, 0, 1]).unwrap()));
    }

    #[test]
    fn transversality_and_point_support() {
        let b = Budget::default();
        let f = form(5, "x^3 + y^3 + z^3");
        let d1 = ideal(5, &["x", "y + z"]);
        let pt = ProjPoint::rational(5, &[0, 4, 1]).unwrap();
        let v = VarietyInstance::new(f.clone(), HomIdeal::unit(fp(5), 3), vec![d1.clone()], vec![pt.clone()], Mode::Local).unwrap();
        check_transversality(&v, &pt).unwrap();
        let mut gens = vec![f.clone()];
        gens.extend(d1.generators().iter().cloned());
        assert!(support_within_point(&gens, &pt, &b).unwrap());
        assert!(!support_within_point(&[f.clone(), form(5, "x")], &pt, &b).unwrap());
        // a line tangent to the conic at [0:0:1] is not a transverse divisor pair with the point itself
        let conic = form(3, "x*z - y^2");
        let pt = ProjPoint::rational(3, &[0, 0, 1]).unwrap();
        let tangent = ideal(3, &["x"]);
        let v = VarietyInstance::new(conic, HomIdeal::unit(fp(3), 3), vec![tangent], vec![pt.clone()], Mode::Local).unwrap();
        assert!(matches!(check_transversality(&v, &pt), Err(Error::NotTransverse(_))));
    }

    #[test]
    fn rank_deficient_points_satisfy_the_ideal() {
        // brute-force Jacobian rank scan against the ideal generators
        let v = inst(5, "x^3 + y^3 + z^3", &[], &[]);
        let maps = [form(5, "x*z + y^2"), form(5, "x^2 + 3*y*z")];
        let data = ramification_locus(&v, &maps).unwrap();
        let field = make_extension(5, 2).unwrap();
        for pt in ProjPoint::enumerate(&field, 3).filter(|p| v.contains_point(p)) {
            if maps[0].eval(pt.coords()).is_zero() {
                continue;
            }
            let mut rows = vec![v.gradient().iter().map(|g| g.eval(pt.coords())).collect::<Vec<_>>()];
            rows.extend(data.rows.iter().map(|r| r.iter().map(|e| e.eval(pt.coords())).collect()));
            let deficient = rank_ext(&rows) < 2;
            assert_eq!(deficient, on_ideal(&data.ideal, &pt), "at {pt}");
        }
    }
}
