use super::*;
use crate::cover::build_etale_cover;
use crate::ideal::HomIdeal;
use crate::sections::SectionSearchConfig;

fn fp(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn form(p: u64, s: &str) -> SparseForm {
    SparseForm::parse(fp(p), 3, s).unwrap()
}

fn plane(p: u64, f: &str, d: &[&str], pts: &[&[i64]]) -> VarietyInstance {
    let divisor =
        if d.is_empty() { HomIdeal::unit(fp(p), 3) } else { HomIdeal::new(fp(p), 3, d.iter().map(|g| form(p, g)).collect()).unwrap() };
    let pts = pts.iter().map(|c| ProjPoint::rational(p as u32, c).unwrap()).collect();
    VarietyInstance::new(form(p, f), divisor, vec![], pts, Mode::Global).unwrap()
}

fn conic() -> VarietyInstance {
    plane(3, "x*z - y^2", &["y", "z"], &[&[0, 0, 1]])
}

#[test]
fn enumeration_examples() {
    let v = conic();
    let pts = enumerate_points(&v, 1, DEFAULT_POINT_LIMIT).unwrap();
    let mut expected: Vec<ProjPoint> =
        [[1, 0, 0], [0, 0, 1], [1, 1, 1], [1, 2, 1]].iter().map(|c| ProjPoint::rational(3, c).unwrap()).collect();
    expected.sort();
    let mut got = pts.clone();
    got.sort();
    assert_eq!(got, expected);
    assert_eq!(enumerate_points(&v, 2, DEFAULT_POINT_LIMIT).unwrap().len(), 10);
    let lines = plane(3, "x*y", &[], &[]);
    assert_eq!(enumerate_points(&lines, 1, DEFAULT_POINT_LIMIT).unwrap().len(), 7);
    assert!(matches!(enumerate_points(&v, 3, 100), Err(Error::BudgetExceeded(_))));
}

#[test]
fn enumeration_is_conjugate_closed() {
    let v = plane(5, "x^3 + y^3 + z^3", &[], &[]);
    let pts = enumerate_points(&v, 2, DEFAULT_POINT_LIMIT).unwrap();
    for p in &pts {
        assert!(pts.contains(&p.frobenius()));
    }
}

#[test]
fn frobenius_map_is_rejected_everywhere_off_h() {
    let v = plane(3, "x*z - y^2", &[], &[]);
    let report = oracle_check(&v, &[form(3, "z^3"), form(3, "y^3")], &OracleConfig::default()).unwrap();
    for lv in &report.levels {
        for pe in lv.points.iter().filter(|pe| pe.off_h) {
            assert!(report.violations.iter().any(|vi| vi.clause == Clause::Ramified && vi.point == pe.point));
        }
        assert!(lv.fibers.iter().filter_map(|f| f.polynomial.as_ref()).all(|fp| !fp.squarefree));
    }
}

#[test]
fn artin_schreier_map_is_accepted() {
    let v = plane(3, "x*z - y^2", &[], &[]);
    let report = oracle_check(&v, &[form(3, "z^3"), form(3, "y^3 - y*z^2")], &OracleConfig::default()).unwrap();
    let off_h: Vec<&Violation> = report.violations.iter().filter(|vi| vi.clause != Clause::Undefined).collect();
    assert!(off_h.is_empty(), "{off_h:?}");
    assert_eq!(report.fiber_degree, Some(3));
    let top = report.levels.last().unwrap();
    assert_eq!(top.k, 3);
    for fe in top.fibers.iter().filter(|f| !f.on_h) {
        let fp = fe.polynomial.as_ref().unwrap();
        assert!(fp.squarefree);
        assert_eq!(fp.rational_roots, fe.size);
    }
}

#[test]
fn fibers_partition_the_points() {
    let v = conic();
    let (morph, _) = build_etale_cover(&v, &SectionSearchConfig::default()).unwrap();
    let report = oracle_check(&v, &morph.forms, &OracleConfig::default()).unwrap();
    assert!(report.is_clean());
    for lv in &report.levels {
        let count = enumerate_points(&v, lv.k, DEFAULT_POINT_LIMIT).unwrap().len();
        assert_eq!(lv.fiber_total(), count);
        assert_eq!(lv.undefined, 0);
    }
    // conjugate points have conjugate images
    for lv in &report.levels {
        for pe in &lv.points {
            let img = pe.image.as_ref().unwrap();
            let conj = lv.points.iter().find(|q| q.point == pe.point.frobenius()).unwrap();
            assert_eq!(conj.image.as_ref().unwrap(), &img.frobenius());
        }
    }
}

#[test]
fn certificate_round_trips_through_text() {
    let v = conic();
    let (morph, cert) = build_etale_cover(&v, &SectionSearchConfig::default()).unwrap();
    let back = Certificate::from_text(&cert.to_text()).unwrap();
    assert_eq!(back, cert);
    assert!(check_certificate(&back, &morph, &v).is_pass());
}

fn perturb(f: &SparseForm) -> SparseForm {
    let (mono, c) = f.terms()[0];
    let p = f.p();
    let mut terms: Vec<_> = f.terms().to_vec();
    terms[0] = (mono, (c + 1) % p);
    SparseForm::from_terms(f.field(), f.nvars(), terms)
}

#[test]
fn perturbed_cofactors_are_named() {
    let v = conic();
    let (morph, cert) = build_etale_cover(&v, &SectionSearchConfig::default()).unwrap();
    let named = |c: &Certificate| match check_certificate(c, &morph, &v) {
        Verdict::Fail { identity, .. } => identity,
        Verdict::Pass => "pass".into(),
    };
    let mut bad = cert.clone();
    let k = bad.finiteness[1].cofactors.iter().position(|c| !c.is_zero()).unwrap();
    bad.finiteness[1].cofactors[k] = perturb(&bad.finiteness[1].cofactors[k]);
    assert_eq!(named(&bad), "finiteness.chart[1]");

    let mut bad = cert.clone();
    bad.unit_charts[2].cofactors[0] = perturb(&bad.unit_charts[2].cofactors[0]);
    assert_eq!(named(&bad), "etale.unit.chart[2]");

    let mut bad = cert.clone();
    let k = bad.d_to_h.cofactors.iter().position(|c| !c.is_zero()).unwrap();
    bad.d_to_h.cofactors[k] = perturb(&bad.d_to_h.cofactors[k]);
    assert_eq!(named(&bad), "d_to_h");

    let mut bad = cert.clone();
    bad.s_off_h[0].value = bad.s_off_h[0].value.add_prime(1);
    assert_eq!(named(&bad), "s_off_h[0]");
}

#[test]
fn ledger_with_l_one_fails() {
    let v = conic();
    let (mut morph, mut cert) = build_etale_cover(&v, &SectionSearchConfig::default()).unwrap();
    morph.ledger.l = 1;
    cert.ledger.l = 1;
    assert!(matches!(check_certificate(&cert, &morph, &v), Verdict::Fail { identity, .. } if identity == "ledger"));
}

#[test]
fn tampered_morphism_is_caught() {
    let v = conic();
    let (mut morph, cert) = build_etale_cover(&v, &SectionSearchConfig::default()).unwrap();
    morph.forms[1] = morph.forms[1].add(&morph.forms[0]);
    assert!(matches!(check_certificate(&cert, &morph, &v), Verdict::Fail { identity, .. } if identity == "morphism.u[1]"));
}
