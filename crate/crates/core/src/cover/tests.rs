use super::*;
use crate::arith::PrimeField;
use crate::verify::{check_certificate, oracle_check, OracleConfig};

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

fn instance(p: u64, f: &str, d: &[&str], pts: &[&[i64]]) -> VarietyInstance {
    let divisor = if d.is_empty() { HomIdeal::unit(fp(p), 3) } else { ideal(p, d) };
    let pts = pts.iter().map(|c| pt(p as u32, c)).collect();
    VarietyInstance::new(form(p, f), divisor, vec![], pts, Mode::Global).unwrap()
}

#[test]
fn assemble_small_ledgers() {
    let (s, s1, t, t1) = (form(3, "x"), form(3, "y"), form(3, "z"), form(3, "x*y"));
    let c = assemble_u_tuple(&s, std::slice::from_ref(&s1), &t, std::slice::from_ref(&t1), 3, 2, 1, 1).unwrap();
    // exponents m(pr − 1) = 2, p(l − 1) = 3, pl = 6
    assert_eq!(c.forms[0], form(3, "z^6"));
    assert_eq!(c.forms[1], form(3, "y*x^2*z^3 + x^3*y^3"));
    assert_eq!(c.ledger.common_degree(), 6);

    let f2 = |s: &str| form(2, s);
    let c = assemble_u_tuple(&f2("x"), &[f2("y")], &f2("z"), &[f2("x*y")], 2, 2, 1, 1).unwrap();
    assert_eq!(c.forms[0], f2("z^4"));
    assert_eq!(c.forms[1], f2("y*x*z^2 + x^2*y^2"));
}

#[test]
fn assemble_rejects_bad_ledgers() {
    let (s, s1, t, t1) = (form(3, "x"), form(3, "y"), form(3, "z"), form(3, "x*y"));
    assert!(matches!(
        assemble_u_tuple(&s, std::slice::from_ref(&s1), &t, std::slice::from_ref(&t1), 3, 1, 1, 1),
        Err(Error::DegreeMismatch(_))
    ));
    // t of degree 1 is not r·m·e for r = 2
    assert!(matches!(
        assemble_u_tuple(&s, std::slice::from_ref(&s1), &t, std::slice::from_ref(&t1), 3, 2, 2, 1),
        Err(Error::DegreeMismatch(_))
    ));
    assert!(matches!(assemble_u_tuple(&s, &[s1], &t, &[form(3, "x")], 3, 2, 1, 1), Err(Error::DegreeMismatch(_))));
    assert!(matches!(assemble_u_tuple(&s, &[], &t, &[t1], 3, 2, 1, 1), Err(Error::DegreeMismatch(_))));
}

#[test]
fn ledger_degree_identity_over_ranges() {
    for p in [2, 3, 5, 7] {
        for e in 1..=4 {
            for m in 1..=4 {
                for r in 1..=4 {
                    for l in 2..=5 {
                        let lg = Ledger { p, e, m, r, l };
                        assert_eq!(lg.summed_degree(), lg.common_degree());
                        assert_eq!(Ledger::parse_line(&lg.to_line()).unwrap(), lg);
                    }
                }
            }
        }
    }
}

#[test]
fn conic_cover_is_certified() {
    let v = instance(3, "x*z - y^2", &["y", "z"], &[&[0, 0, 1]]);
    let (morph, cert) = build_etale_cover(&v, &SectionSearchConfig::default()).unwrap();
    assert!(morph.ledger.l >= 2);
    assert_eq!(check_certificate(&cert, &morph, &v), crate::verify::Verdict::Pass);
    let cfg = OracleConfig { depth: 2, ..OracleConfig::default() };
    let report = oracle_check(&v, &morph.forms, &cfg).unwrap();
    assert!(report.is_clean(), "{:?}", report.violations);
    assert_eq!(CoverMorphism::from_text(&morph.to_text()).unwrap(), morph);
}

#[test]
fn two_lines_send_the_node_to_h() {
    let v = instance(3, "x*y", &[], &[&[1, 0, 1], &[0, 1, 1]]);
    let (morph, cert) = build_etale_cover(&v, &SectionSearchConfig::default()).unwrap();
    assert!(check_certificate(&cert, &morph, &v).is_pass());
    assert!(morph.u0().eval(pt(3, &[0, 0, 1]).coords()).is_zero());
}

#[test]
fn missing_component_is_augmented() {
    // S only meets the line y = 0; the other line must be picked up by augmentation
    let v = instance(3, "x*y", &[], &[&[1, 0, 1]]);
    let (morph, cert) = build_etale_cover(&v, &SectionSearchConfig::default()).unwrap();
    assert!(check_certificate(&cert, &morph, &v).is_pass());
    // some marked point now lies on x = 0 away from the node
    assert!(cert.s_off_h.iter().any(|r| r.point.coords()[0].is_zero() && !r.point.coords()[1].is_zero()));
}

#[test]
fn degree_cap_surfaces() {
    let v = instance(3, "x*z - y^2", &["y", "z"], &[&[0, 0, 1]]);
    let cfg = SectionSearchConfig { max_degree: 1, ..SectionSearchConfig::default() };
    assert!(matches!(build_etale_cover(&v, &cfg), Err(Error::DegreeCapExceeded { .. })));
}

#[test]
fn crossing_divisors_need_a_blowup() {
    let field = fp(3);
    let f = |s: &str| SparseForm::parse(field, 4, s).unwrap();
    let d1 = HomIdeal::new(field, 4, vec![f("x")]).unwrap();
    let d2 = HomIdeal::new(field, 4, vec![f("y^2 - z^2")]).unwrap();
    let x = ProjPoint::rational(3, &[0, 1, 1, 0]).unwrap();
    let v = VarietyInstance::new(f("w0"), HomIdeal::unit(field, 4), vec![d1, d2], vec![x], Mode::Local).unwrap();
    assert!(matches!(build_local_cover(&v, &SectionSearchConfig::default()), Err(Error::UnsupportedRequiresBlowup(_))));
}
