use super::*;
use crate::arith::PrimeField;
use crate::geometry::Mode;
use crate::ideal::linear_combination;

fn fp(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn form(p: u64, s: &str) -> SparseForm {
    SparseForm::parse(fp(p), 3, s).unwrap()
}

fn ideal(p: u64, gens: &[&str]) -> HomIdeal {
    HomIdeal::new(fp(p), 3, gens.iter().map(|g| form(p, g)).collect()).unwrap()
}

fn pt(p: u32, c: &[i64]) -> ProjPoint {
    ProjPoint::rational(p, c).unwrap()
}

fn cfg() -> SectionSearchConfig {
    SectionSearchConfig::default()
}

#[test]
fn graded_piece_examples() {
    let b = Budget::default();
    let unit = HomIdeal::unit(fp(3), 3);
    let g = graded_piece(1, &unit, &[pt(3, &[0, 0, 1])], &b).unwrap();
    assert_eq!(g.basis, vec![form(3, "x"), form(3, "y")]);
    let g = graded_piece(1, &ideal(3, &["y", "z"]), &[], &b).unwrap();
    assert_eq!(g.basis, vec![form(3, "y"), form(3, "z")]);
    let g = graded_piece(2, &ideal(3, &["y", "z"]), &[pt(3, &[1, 1, 1])], &b).unwrap();
    assert_eq!(g.dim(), 4);
    for f in &g.basis {
        assert!(f.eval(pt(3, &[1, 1, 1]).coords()).is_zero());
        assert!(ideal(3, &["y", "z"]).contains(f, &b).unwrap());
    }
}

#[test]
fn graded_piece_imposes_conjugate_conditions() {
    let b = Budget::default();
    let q = ProjPoint::parse(3, "(w^2:w:1)@2").unwrap();
    let g = graded_piece(1, &HomIdeal::unit(fp(3), 3), std::slice::from_ref(&q), &b).unwrap();
    // a non-rational point imposes two F_p conditions on linear forms
    assert_eq!(g.dim(), 1);
    for c in q.orbit() {
        assert!(g.basis[0].eval(c.coords()).is_zero());
    }
}

#[test]
fn separating_section_examples() {
    let unit = HomIdeal::unit(fp(3), 3);
    assert_eq!(find_separating_section(&unit, &[pt(3, &[0, 0, 1])], &cfg()).unwrap(), (1, form(3, "z")));
    let d = ideal(3, &["y", "z"]);
    let (l, s) = find_separating_section(&d, &[pt(3, &[0, 0, 1])], &cfg()).unwrap();
    assert_eq!((l, s.clone()), (1, form(3, "z")));
    // exhaustive oracle over the 26 nonzero linear forms: the solutions in (y, z)
    // with value 1 at [0:0:1] are b*y + z, and z has minimal support
    let mut sols = Vec::new();
    for a in 0..3 {
        for bb in 0..3 {
            for c in 0..3 {
                if a == 0 && bb == 0 && c == 0 {
                    continue;
                }
                let f = form(3, &format!("{a}*x + {bb}*y + {c}*z"));
                if a == 0 && f.eval(pt(3, &[0, 0, 1]).coords()).is_one() {
                    sols.push(f);
                }
            }
        }
    }
    assert!(sols.contains(&s));
    assert!(sols.iter().all(|f| f.num_terms() >= s.num_terms()));
    assert!(matches!(find_separating_section(&d, &[pt(3, &[1, 0, 0])], &cfg()), Err(Error::PointOnDivisor(_))));
}

#[test]
fn separating_section_over_extension_points() {
    let q = ProjPoint::parse(3, "(w^2:w:1)@2").unwrap();
    let d = ideal(3, &["y", "z"]);
    let (_, s) = find_separating_section(&d, std::slice::from_ref(&q), &cfg()).unwrap();
    for c in q.orbit() {
        assert!(!s.eval(c.coords()).is_zero());
    }
    assert!(d.membership_with_cofactors(&s, &Budget::default()).unwrap().is_some());
}

#[test]
fn separating_degree_is_minimal() {
    // S = four points of the conic over F_3; the linear forms cannot avoid all of them
    // with value one everywhere, so the scan's answer must fail at every lower degree
    let pts: Vec<ProjPoint> = [[1, 0, 0], [0, 0, 1], [1, 1, 1], [1, 2, 1]].iter().map(|c| pt(3, c)).collect();
    let unit = HomIdeal::unit(fp(3), 3);
    let (l, s) = find_separating_section(&unit, &pts, &cfg()).unwrap();
    assert!(pts.iter().all(|p| !s.eval(p.coords()).is_zero()));
    for lower in 1..l {
        let c = SectionSearchConfig { max_degree: lower, ..cfg() };
        assert!(find_separating_section(&unit, &pts, &c).is_err());
    }
}

#[test]
fn degree_cap_is_reported() {
    // every line of P^2(F_2) contains rational points, so no linear form avoids all seven
    let field = crate::arith::make_extension(2, 1).unwrap();
    let pts: Vec<ProjPoint> = ProjPoint::enumerate(&field, 3).collect();
    let unit = HomIdeal::unit(fp(2), 3);
    let c = SectionSearchConfig { max_degree: 1, ..cfg() };
    assert!(matches!(find_separating_section(&unit, &pts, &c), Err(Error::DegreeCapExceeded { .. })));
}

fn conic(d: &[&str], pts: &[&[i64]], mode: Mode, extra: Vec<HomIdeal>) -> VarietyInstance {
    let divisor = if d.is_empty() { HomIdeal::unit(fp(3), 3) } else { ideal(3, d) };
    VarietyInstance::new(form(3, "x*z - y^2"), divisor, extra, pts.iter().map(|c| pt(3, c)).collect(), mode).unwrap()
}

#[test]
fn covering_section_examples() {
    let v = conic(&[], &[&[0, 0, 1]], Mode::Global, vec![]);
    let locus = ideal(3, &["x*z - y^2", "z"]);
    let cov = find_covering_sections(&v, &locus, &v.points, &[], &cfg()).unwrap();
    assert_eq!(cov.degree, 1);
    assert_eq!(cov.forms, vec![form(3, "x")]);
    assert!(cov.certificates.iter().all(|c| c.verify()));

    let cov = find_covering_sections(&v, &HomIdeal::unit(fp(3), 3), &v.points, &[], &cfg()).unwrap();
    assert_eq!(cov.forms, vec![form(3, "x")]);

    let cons = ideal(3, &["y", "z"]);
    let locus = ideal(3, &["x*z - y^2", "x"]);
    let cov = find_covering_sections(&v, &locus, &[], &[Some(&cons)], &cfg()).unwrap();
    assert!(cons.contains(&cov.forms[0], &Budget::default()).unwrap());
    assert!(cov.certificates.iter().all(|c| c.verify()));
}

#[test]
fn delta_assembly_degrees() {
    let alpha = form(3, "z");
    let beta = form(3, "y");
    let gamma = form(3, "x*y + z^2");
    let d = assemble_delta(&beta, &alpha, 4, 1, &gamma).unwrap();
    assert_eq!(d, beta.mul(&alpha.pow(3)).add(&gamma.pow(2)));
    assert_eq!(d.homogeneous_degree(), Some(4));
    assert!(matches!(assemble_delta(&beta, &alpha, 1, 1, &gamma), Err(Error::DegreeMismatch(_))));
}

#[test]
fn unramified_map_on_the_conic() {
    let v = conic(&["y", "z"], &[&[0, 0, 1]], Mode::Global, vec![]);
    let (_, s) = find_separating_section(&v.divisor, &v.points, &cfg()).unwrap();
    let g = build_unramified_map(&v, &s, &cfg()).unwrap();
    assert_eq!(g.m, 2);
    assert_eq!(g.forms.len(), 1);
    let mut map = vec![s.pow(g.m)];
    map.extend(g.forms.iter().cloned());
    let data = crate::geometry::ramification_locus(&v, &map).unwrap();
    for p in &v.points {
        assert!(!on_ideal(&data.ideal, p));
    }
    // on V(s) ∩ X the map forms have no common zero
    assert!(g.certificates.iter().all(|c| c.verify()));
    for d in &g.forms {
        assert_eq!(d.homogeneous_degree(), Some(g.m * s.homogeneous_degree().unwrap()));
    }
}

#[test]
fn unramified_map_in_local_mode_respects_divisors() {
    let f = SparseForm::parse(fp(5), 3, "x^3 + y^3 + z^3").unwrap();
    let d1 =
        HomIdeal::new(fp(5), 3, vec![SparseForm::parse(fp(5), 3, "x").unwrap(), SparseForm::parse(fp(5), 3, "y + z").unwrap()]).unwrap();
    let x = pt(5, &[0, 4, 1]);
    let v = VarietyInstance::new(f, HomIdeal::unit(fp(5), 3), vec![d1.clone()], vec![x], Mode::Local).unwrap();
    let (_, s) = find_separating_section(&v.divisor, &v.points, &cfg()).unwrap();
    let g = build_unramified_map(&v, &s, &cfg()).unwrap();
    let with_f = d1.with_generators(std::slice::from_ref(&v.form)).unwrap();
    let cofs = with_f.membership_with_cofactors(&g.forms[0], &Budget::default()).unwrap().unwrap();
    assert_eq!(linear_combination(with_f.generators(), &cofs), g.forms[0]);
}

#[test]
fn searches_are_deterministic() {
    let v = conic(&["y", "z"], &[&[0, 0, 1]], Mode::Global, vec![]);
    let run = || {
        let (_, s) = find_separating_section(&v.divisor, &v.points, &cfg()).unwrap();
        let g = build_unramified_map(&v, &s, &cfg()).unwrap();
        g.forms.iter().map(|f| f.to_string()).collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}
