use super::*;
use crate::poly::{Monomial, ProjPoint};
use proptest::prelude::*;

fn fp(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn forms(p: u64, n: usize, src: &[&str]) -> Vec<SparseForm> {
    src.iter().map(|s| SparseForm::parse(fp(p), n, s).unwrap()).collect()
}

fn ideal(p: u64, n: usize, src: &[&str]) -> HomIdeal {
    HomIdeal::new(fp(p), n, forms(p, n, src)).unwrap()
}

#[test]
fn groebner_examples() {
    let b = Budget::default();
    assert_eq!(ideal(3, 3, &["x"]).groebner_basis(&b).unwrap(), forms(3, 3, &["x"]));
    let mut g = ideal(3, 3, &["x*z - y^2", "z"]).groebner_basis(&b).unwrap();
    g.sort_by_key(|f| f.to_string());
    assert_eq!(g, forms(3, 3, &["y^2", "z"]));
    let g = ideal(3, 3, &["x + y", "x - y"]).groebner_basis(&b).unwrap();
    assert_eq!(g.len(), 2);
    assert!(g.contains(&forms(3, 3, &["x"])[0]) && g.contains(&forms(3, 3, &["y"])[0]));
}

#[test]
fn tracked_basis_elements_are_combinations_of_generators() {
    let gens = forms(5, 3, &["x^2 - y*z", "y^2 - x*z", "x*y + z^2"]);
    let gb = Groebner::compute(&gens, true, &Budget::default()).unwrap();
    assert!(gb.satisfies_buchberger_criterion());
    for g in gb.basis() {
        let cofs = gb.express(g).unwrap();
        assert_eq!(linear_combination(&gens, &cofs), *g);
    }
    for g in &gens {
        assert!(gb.contains(g));
    }
}

#[test]
fn membership_examples() {
    let b = Budget::default();
    let i = ideal(3, 3, &["y", "z"]);
    let z = forms(3, 3, &["z"])[0].clone();
    let cofs = i.membership_with_cofactors(&z, &b).unwrap().unwrap();
    assert_eq!(cofs, forms(3, 3, &["0", "1"]));

    let i = ideal(3, 3, &["x*z - y^2", "z"]);
    let y2 = forms(3, 3, &["y^2"])[0].clone();
    let cofs = i.membership_with_cofactors(&y2, &b).unwrap().unwrap();
    assert_eq!(linear_combination(i.generators(), &cofs), y2);
    assert_eq!(cofs, forms(3, 3, &["-1", "x"]));

    let i = ideal(3, 3, &["y", "z"]);
    assert!(i.membership_with_cofactors(&forms(3, 3, &["x"])[0], &b).unwrap().is_none());
}

#[test]
fn projective_emptiness_examples() {
    let b = Budget::default();
    match projective_empty(&ideal(3, 3, &["x", "y", "z"]), &b, 3).unwrap() {
        Emptiness::Empty(certs) => {
            assert_eq!(certs.len(), 3);
            assert!(certs.iter().all(|c| c.verify()));
        }
        other => panic!("{other:?}"),
    }
    match projective_empty(&ideal(3, 3, &["x*z - y^2", "z", "y"]), &b, 3).unwrap() {
        Emptiness::NonEmpty(pt) => assert_eq!(pt, ProjPoint::rational(3, &[1, 0, 0]).unwrap()),
        other => panic!("{other:?}"),
    }
    match projective_empty(&ideal(3, 3, &["x*z - y^2", "z", "x"]), &b, 3).unwrap() {
        Emptiness::Empty(certs) => {
            assert!(certs.iter().all(|c| c.verify()));
            let chart_y = &certs[1];
            assert_eq!(chart_y.generators, forms(3, 3, &["x*z - 1", "z", "x"]));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn rabinowitsch_examples() {
    let b = Budget::default();
    let f = forms(3, 2, &["x - y^2"]);
    let one = forms(3, 2, &["1"]);
    let y = forms(3, 2, &["y"]);
    match chart_unramified_empty(&f, &one, &y[0], &b, 2).unwrap() {
        ChartEmptiness::Empty(c) => assert!(c.verify()),
        other => panic!("{other:?}"),
    }
    match chart_unramified_empty(&f, &y, &y[0], &b, 2).unwrap() {
        ChartEmptiness::Empty(c) => {
            assert!(c.verify());
            assert_eq!(c.aux, Some(2));
        }
        other => panic!("{other:?}"),
    }
    let avoid = forms(3, 2, &["x - 1"]);
    match chart_unramified_empty(&f, &y, &avoid[0], &b, 2).unwrap() {
        ChartEmptiness::NonEmpty(pt) => assert!(pt.iter().all(|c| c.is_zero())),
        other => panic!("{other:?}"),
    }
}

#[test]
fn certificate_text_round_trip() {
    let b = Budget::default();
    let Emptiness::Empty(certs) = projective_empty(&ideal(5, 3, &["x^2 + y^2 + z^2", "x", "y + z"]), &b, 2).unwrap() else {
        panic!("expected empty");
    };
    for c in certs {
        let text = c.to_text();
        let lines: Vec<&str> = text.lines().collect();
        let (back, used) = NullstellensatzCert::from_lines(&lines).unwrap();
        assert_eq!(used, lines.len());
        assert_eq!(back, c);
        assert!(back.verify());
        assert_eq!(back.to_text(), text);
    }
}

#[test]
fn budget_exhaustion_is_reported() {
    let tiny = Budget { max_spairs: 1, max_monomials: 10_000 };
    let gens = forms(5, 3, &["x^2 - y*z", "y^2 - x*z", "x*y + z^2"]);
    assert!(matches!(Groebner::compute(&gens, false, &tiny), Err(Error::ResourceBudgetExceeded(_))));
}

fn arb_small_form(nvars: usize) -> impl Strategy<Value = SparseForm> {
    let monos = SparseForm::monomials_of_degree(nvars, 2);
    let monos1 = SparseForm::monomials_of_degree(nvars, 1);
    (prop::bool::ANY, prop::collection::vec(0u32..3, monos.len()), prop::collection::vec(0u32..3, monos1.len())).prop_map(
        move |(quad, c2, c1)| {
            let (m, c): (&Vec<Monomial>, Vec<u32>) = if quad { (&monos, c2) } else { (&monos1, c1) };
            SparseForm::from_terms(fp(3), nvars, m.iter().copied().zip(c))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn bases_satisfy_buchberger(gens in prop::collection::vec(arb_small_form(3), 1..4)) {
        prop_assume!(gens.iter().any(|g| !g.is_zero()));
        let gb = Groebner::compute(&gens, true, &Budget::default()).unwrap();
        prop_assert!(gb.satisfies_buchberger_criterion());
        for g in &gens {
            prop_assert!(gb.contains(g));
        }
        for g in gb.basis() {
            let cofs = gb.express(g).unwrap();
            prop_assert_eq!(&linear_combination(&gens, &cofs), g);
        }
    }

    #[test]
    fn emptiness_agrees_with_point_search(gens in prop::collection::vec(arb_small_form(3), 2..4)) {
        let i = HomIdeal::new(fp(3), 3, gens.clone()).unwrap();
        prop_assume!(!i.is_zero_ideal());
        let search = find_projective_zero(&gens, fp(3), 3, 2).unwrap();
        match projective_empty(&i, &Budget::default(), 2).unwrap() {
            Emptiness::Empty(certs) => {
                prop_assert!(search.is_none());
                prop_assert!(certs.iter().all(|c| c.verify()));
            }
            Emptiness::NonEmpty(pt) => prop_assert!(gens.iter().all(|g| g.eval(pt.coords()).is_zero())),
            Emptiness::Inconclusive { .. } => prop_assert!(search.is_none()),
        }
    }
}
