#![allow(dead_code)]

use std::path::PathBuf;

use etale_cover::cli::{parse_instance, InstanceFile, SearchFlags};
use etale_cover::cover::{build_etale_cover, build_local_cover, CoverMorphism};
use etale_cover::geometry::{Mode, VarietyInstance};
use etale_cover::poly::SparseForm;
use etale_cover::verify::Certificate;

/// Instances that admit a certified cover.
pub const CATALOG: &[&str] = &["conic", "conic_bare", "lines", "cubic", "cubic_local"];

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(format!("{name}.inst"))
}

pub fn load(name: &str) -> (InstanceFile, VarietyInstance) {
    let text = std::fs::read_to_string(data_path(name)).unwrap();
    let file = parse_instance(&text).unwrap();
    let v = file.to_variety().unwrap();
    (file, v)
}

pub fn build(name: &str) -> (VarietyInstance, CoverMorphism, Certificate) {
    let (file, v) = load(name);
    let cfg = SearchFlags::default().resolve(&file.overrides);
    let (morph, cert) = match v.mode {
        Mode::Local => build_local_cover(&v, &cfg).map(|(lc, c)| (lc.morphism, c)).unwrap(),
        Mode::Global => build_etale_cover(&v, &cfg).unwrap(),
    };
    (v, morph, cert)
}

/// Checks, for each i, the cleared form of d(u_i/u_0) = (s^{rm}/t)^p · d(s_i/s^m):
/// (u_0 ∇u_i − u_i ∇u_0) · t^p · s^{2m} = s^{prm} · (s^m ∇s_i − s_i ∇(s^m)) · u_0².
/// Returns the index of the first failing component.
pub fn cancellation_failure(m: &CoverMorphism) -> Option<usize> {
    let lg = m.ledger;
    let u0 = &m.forms[0];
    let sm = m.s.pow(lg.m);
    let t_p = m.t.pow(lg.p);
    let s_2m = m.s.pow(2 * lg.m);
    let s_prm = m.s.pow(lg.p * lg.r * lg.m);
    let u0_sq = u0.mul(u0);
    let grad = |f: &SparseForm| f.gradient();
    let cleared = |num: &SparseForm, den: &SparseForm| -> Vec<SparseForm> {
        grad(num).iter().zip(grad(den)).map(|(dn, dd)| den.mul(dn).sub(&num.mul(&dd))).collect()
    };
    for i in 0..m.s_list.len() {
        let lhs = cleared(&m.forms[i + 1], u0);
        let rhs = cleared(&m.s_list[i], &sm);
        for (a, b) in lhs.iter().zip(&rhs) {
            if a.mul(&t_p).mul(&s_2m) != s_prm.mul(b).mul(&u0_sq) {
                return Some(i);
            }
        }
    }
    None
}
