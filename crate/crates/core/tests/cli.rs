mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::{data_path, CATALOG};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_etale-cover"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn construct(name: &str, dir: &Path, extra: &[&str]) -> Output {
    let inst = data_path(name);
    let mut args = vec!["construct", inst.to_str().unwrap(), "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

const ARTIFACTS: [&str; 3] = ["morphism.txt", "certificate.txt", "report.txt"];

fn golden_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Set ETALE_BLESS=1 to rewrite the golden files from the current build.
#[test]
fn catalog_matches_golden_files() {
    let bless = std::env::var_os("ETALE_BLESS").is_some();
    for name in CATALOG {
        let dir = tempfile::tempdir().unwrap();
        let out = construct(name, dir.path(), &[]);
        assert_eq!(code(&out), 0, "{name}: {}", stderr(&out));
        let golden = golden_dir(name);
        for file in ARTIFACTS {
            let got = fs::read_to_string(dir.path().join(file)).unwrap();
            if bless {
                fs::create_dir_all(&golden).unwrap();
                fs::write(golden.join(file), &got).unwrap();
            } else {
                let want = fs::read_to_string(golden.join(file)).unwrap_or_else(|_| panic!("missing golden {name}/{file}"));
                assert_eq!(got, want, "{name}/{file} differs from golden");
            }
        }
    }
}

#[test]
fn construct_is_byte_deterministic_per_seed() {
    for seed in ["0", "1"] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        assert_eq!(code(&construct("conic", a.path(), &["--seed", seed])), 0);
        assert_eq!(code(&construct("conic", b.path(), &["--seed", seed])), 0);
        for file in ARTIFACTS {
            assert_eq!(fs::read(a.path().join(file)).unwrap(), fs::read(b.path().join(file)).unwrap(), "seed {seed}: {file}");
        }
    }
}

#[test]
fn check_and_oracle_accept_fresh_output() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&construct("conic", dir.path(), &[])), 0);
    let inst = data_path("conic");
    let (m, c) = (dir.path().join("morphism.txt"), dir.path().join("certificate.txt"));
    let out = run(&["check-cert", inst.to_str().unwrap(), m.to_str().unwrap(), c.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = dir.path().join("oracle.txt");
    let out = run(&["oracle", inst.to_str().unwrap(), m.to_str().unwrap(), "--depth", "2", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(report).unwrap();
    assert!(text.starts_with("oracle p=3 n=1 depth=2\n"));
    assert!(text.ends_with("violations 0\n"));
}

fn write_instance(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("case.inst");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out_dir = d.join("out");
    let out_s = out_dir.to_str().unwrap();

    let missing = run(&["validate", d.join("nope.inst").to_str().unwrap()]);
    assert_eq!(code(&missing), 1);

    let valid = run(&["validate", data_path("cubic").to_str().unwrap()]);
    assert_eq!(code(&valid), 0);

    let not_prime = write_instance(d, "p=4\nambient=2\nF=x*z - y^2\n");
    let out = run(&["construct", not_prime.to_str().unwrap(), "--out", out_s]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));

    let not_reduced = write_instance(d, "p=3\nambient=2\nF=x^2*y\n");
    let out = run(&["validate", not_reduced.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("squarefree"), "{}", stderr(&out));

    let out = construct("conic", &out_dir, &["--max-degree", "1"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(!out_dir.join("morphism.txt").exists());

    let out = construct("conic", &out_dir, &["--budget-spairs", "1"]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));

    let out = construct("crossing", &out_dir, &[]);
    assert_eq!(code(&out), 5, "{}", stderr(&out));

    assert_eq!(code(&construct("conic", &out_dir, &[])), 0);
    let inst = data_path("conic");
    let morph = out_dir.join("morphism.txt");
    let cert = fs::read_to_string(out_dir.join("certificate.txt")).unwrap();
    let bad_cert = d.join("bad_cert.txt");
    fs::write(&bad_cert, cert.replace("point (0:0:1) value 1", "point (0:0:1) value 2")).unwrap();
    let out = run(&["check-cert", inst.to_str().unwrap(), morph.to_str().unwrap(), bad_cert.to_str().unwrap()]);
    assert_eq!(code(&out), 6);
    assert!(stderr(&out).contains("s_off_h[0]"), "{}", stderr(&out));

    // a p-th power has vanishing differential, so the map ramifies everywhere off H
    let text = fs::read_to_string(&morph).unwrap();
    let u1 = text.lines().find(|l| l.starts_with("u1 ")).unwrap();
    let bad_morph = d.join("bad_morph.txt");
    fs::write(&bad_morph, text.replace(u1, "u1 x^24")).unwrap();
    let out = run(&["oracle", inst.to_str().unwrap(), bad_morph.to_str().unwrap(), "--depth", "1"]);
    assert_eq!(code(&out), 7);
    assert!(stderr(&out).contains("ramified"), "{}", stderr(&out));

    let out = run(&["oracle", inst.to_str().unwrap(), morph.to_str().unwrap(), "--depth", "12"]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn flags_override_instance_settings() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = fs::read_to_string(data_path("conic")).unwrap();
    text.push_str("max-degree=1\n");
    let inst = write_instance(dir.path(), &text);
    let out_dir = dir.path().join("out");
    let out = run(&["construct", inst.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let out = run(&["construct", inst.to_str().unwrap(), "--out", out_dir.to_str().unwrap(), "--max-degree", "24"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert!(report.contains("max-degree=24"));
}
