//! Command-line front end: instance files, subcommands and exit codes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::arith::PrimeField;
use crate::cover::{build_etale_cover, build_local_cover, CoverMorphism};
use crate::error::{Error, Result};
use crate::geometry::{validate_instance, Mode, VarietyInstance};
use crate::ideal::HomIdeal;
use crate::poly::{ProjPoint, SparseForm, MAX_VARS};
use crate::sections::{orbit_representatives, SectionSearchConfig};
use crate::verify::{check_certificate, oracle_check, Certificate, OracleConfig, Verdict};

/// Process exit statuses. Every failure maps to exactly one of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok = 0,
    Usage = 1,
    Invalid = 2,
    DegreeCap = 3,
    Budget = 4,
    RequiresBlowup = 5,
    CertificateFailed = 6,
    OracleViolation = 7,
    ConstructionFailed = 8,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn of(err: &Error) -> ExitStatus {
        match err {
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::NotPrime(_)
            | Error::NotTransverse(_)
            | Error::NotHomogeneous
            | Error::FieldMismatch(_)
            | Error::ZeroInput
            | Error::PointOnDivisor(_) => ExitStatus::Invalid,
            Error::DegreeCapExceeded { .. } => ExitStatus::DegreeCap,
            Error::ResourceBudgetExceeded(_) | Error::BudgetExceeded(_) => ExitStatus::Budget,
            Error::UnsupportedRequiresBlowup(_) => ExitStatus::RequiresBlowup,
            Error::NoEmbedding { .. }
            | Error::DegenerateInput(_)
            | Error::ComponentCollapse(_)
            | Error::ComponentCoverageFailed(_)
            | Error::DegreeMismatch(_) => ExitStatus::ConstructionFailed,
        }
    }
}

/// Search knobs an instance file may set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub max_degree: Option<u32>,
    pub base_step: Option<u32>,
    pub depth: Option<usize>,
    pub budget_spairs: Option<usize>,
}

/// A parsed instance file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub p: u64,
    /// n + 1, the dimension of the ambient projective space.
    pub ambient: usize,
    pub form: SparseForm,
    pub divisor: Vec<SparseForm>,
    pub extra_divisors: Vec<Vec<SparseForm>>,
    pub points: Vec<ProjPoint>,
    pub mode: Mode,
    pub overrides: Overrides,
}

const KEYS: &[&str] = &["p", "ambient", "F", "D", "S", "mode", "seed", "max-degree", "base-step", "depth", "budget-spairs"];

struct Entry<'a> {
    line: usize,
    /// Column where the value starts, 0-based.
    offset: usize,
    value: &'a str,
}

fn split_top_level(value: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in value.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push((start, &value[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &value[start..]));
    out.into_iter()
        .map(|(s, piece)| (s + piece.len() - piece.trim_start().len(), piece.trim()))
        .filter(|(_, piece)| !piece.is_empty())
        .collect()
}

fn parse_number<T: std::str::FromStr>(e: &Entry, what: &str) -> Result<T> {
    e.value
        .parse::<T>()
        .map_err(|_| Error::parse(format!("{what} must be a non-negative integer, got '{}'", e.value)).at_line(e.line, e.offset + 1))
}

fn parse_forms(field: PrimeField, nvars: usize, e: &Entry) -> Result<Vec<SparseForm>> {
    split_top_level(e.value)
        .into_iter()
        .map(|(off, piece)| SparseForm::parse(field, nvars, piece).map_err(|err| err.at_line(e.line, e.offset + off)))
        .collect()
}

/// Parses an instance file without checking the geometric hypotheses.
pub fn parse_instance_unchecked(text: &str) -> Result<InstanceFile> {
    let mut single: std::collections::BTreeMap<String, Entry> = std::collections::BTreeMap::new();
    let mut points: Vec<Entry> = Vec::new();
    let mut extra: std::collections::BTreeMap<usize, Entry> = std::collections::BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::parse("expected 'key=value'").at_line(line, 1 + content.len() - content.trim_start().len()))?;
        let key_trim = key.trim();
        let offset = key.len() + 1 + value.len() - value.trim_start().len();
        let entry = Entry { line, offset, value: value.trim() };
        if key_trim == "S" {
            points.push(entry);
        } else if let Some(i) = key_trim.strip_prefix('D').filter(|s| !s.is_empty()).and_then(|s| s.parse::<usize>().ok()) {
            if i == 0 || extra.insert(i, entry).is_some() {
                return Err(Error::parse(format!("bad or repeated key '{key_trim}'")).at_line(line, 1));
            }
        } else if KEYS.contains(&key_trim) {
            if single.insert(key_trim.to_string(), entry).is_some() {
                return Err(Error::parse(format!("repeated key '{key_trim}'")).at_line(line, 1));
            }
        } else {
            return Err(Error::parse(format!("unknown key '{key_trim}'")).at_line(line, 1));
        }
    }
    let require = |k: &str| single.get(k).ok_or_else(|| Error::parse(format!("missing key '{k}'")).at_line(0, 0));
    let pe = require("p")?;
    let p: u64 = parse_number(pe, "p")?;
    let field = PrimeField::new(p).map_err(|_| Error::parse(format!("{p} is not prime")).at_line(pe.line, pe.offset + 1))?;
    let ae = require("ambient")?;
    let ambient: usize = parse_number(ae, "ambient")?;
    if !(2..MAX_VARS).contains(&ambient) {
        return Err(Error::parse(format!("ambient must lie in 2..={}", MAX_VARS - 1)).at_line(ae.line, ae.offset + 1));
    }
    let nvars = ambient + 1;
    let fe = require("F")?;
    let form = SparseForm::parse(field, nvars, fe.value).map_err(|e| e.at_line(fe.line, fe.offset))?;
    let divisor = match single.get("D") {
        Some(e) => parse_forms(field, nvars, e)?,
        None => Vec::new(),
    };
    let count = extra.len();
    if let Some((&k, e)) = extra.iter().find(|(&k, _)| k > count) {
        return Err(Error::parse(format!("D{k} given without D1..D{count} all present")).at_line(e.line, 1));
    }
    let extra_divisors = extra.values().map(|e| parse_forms(field, nvars, e)).collect::<Result<Vec<_>>>()?;
    let mut pts = Vec::new();
    for e in &points {
        for (off, piece) in split_top_level(e.value) {
            let pt = ProjPoint::parse(p, piece).map_err(|err| err.at_line(e.line, e.offset + off))?;
            if pt.len() != nvars {
                return Err(Error::parse(format!("point {piece} needs {nvars} coordinates")).at_line(e.line, e.offset + off + 1));
            }
            pts.push(pt);
        }
    }
    let mode = match single.get("mode") {
        None => Mode::Global,
        Some(e) => match e.value {
            "global" => Mode::Global,
            "local" => Mode::Local,
            other => return Err(Error::parse(format!("mode must be global or local, got '{other}'")).at_line(e.line, e.offset + 1)),
        },
    };
    let opt = |k: &str| single.get(k);
    let overrides = Overrides {
        seed: opt("seed").map(|e| parse_number(e, "seed")).transpose()?,
        max_degree: opt("max-degree").map(|e| parse_number(e, "max-degree")).transpose()?,
        base_step: opt("base-step").map(|e| parse_number(e, "base-step")).transpose()?,
        depth: opt("depth").map(|e| parse_number(e, "depth")).transpose()?,
        budget_spairs: opt("budget-spairs").map(|e| parse_number(e, "budget-spairs")).transpose()?,
    };
    Ok(InstanceFile { p, ambient, form, divisor, extra_divisors, points: pts, mode, overrides })
}

/// Parses an instance file and checks it describes a valid construction input.
pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    let inst = parse_instance_unchecked(text)?;
    validate_instance(&inst.to_variety()?).into_result()?;
    Ok(inst)
}

impl InstanceFile {
    pub fn field(&self) -> PrimeField {
        self.form.field()
    }

    pub fn nvars(&self) -> usize {
        self.ambient + 1
    }

    pub fn to_variety(&self) -> Result<VarietyInstance> {
        let ideal = |gens: &[SparseForm]| {
            if gens.is_empty() {
                Ok(HomIdeal::unit(self.field(), self.nvars()))
            } else {
                HomIdeal::new(self.field(), self.nvars(), gens.to_vec())
            }
        };
        let divisor = ideal(&self.divisor)?;
        let extra = self.extra_divisors.iter().map(|g| ideal(g)).collect::<Result<Vec<_>>>()?;
        VarietyInstance::new(self.form.clone(), divisor, extra, self.points.clone(), self.mode)
    }

    /// Canonical text; parsing it gives back an equal instance.
    pub fn to_text(&self) -> String {
        let join = |gens: &[SparseForm]| gens.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        let _ = writeln!(out, "p={}", self.p);
        let _ = writeln!(out, "ambient={}", self.ambient);
        let _ = writeln!(out, "F={}", self.form);
        if !self.divisor.is_empty() {
            let _ = writeln!(out, "D={}", join(&self.divisor));
        }
        for (i, d) in self.extra_divisors.iter().enumerate() {
            let _ = writeln!(out, "D{}={}", i + 1, join(d));
        }
        for pt in &self.points {
            let _ = writeln!(out, "S={pt}");
        }
        let _ = writeln!(out, "mode={}", if self.mode == Mode::Local { "local" } else { "global" });
        let o = &self.overrides;
        let fields: [(&str, Option<u64>); 5] = [
            ("seed", o.seed),
            ("max-degree", o.max_degree.map(u64::from)),
            ("base-step", o.base_step.map(u64::from)),
            ("depth", o.depth.map(|d| d as u64)),
            ("budget-spairs", o.budget_spairs.map(|d| d as u64)),
        ];
        for (k, v) in fields {
            if let Some(v) = v {
                let _ = writeln!(out, "{k}={v}");
            }
        }
        out
    }
}

#[derive(Debug, Parser)]
#[command(name = "etale-cover", version, about = "Certified finite étale covers of hypersurfaces over F_p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the cover and write morphism.txt, certificate.txt and report.txt.
    Construct {
        instance: PathBuf,
        /// Directory for the three output files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        search: SearchFlags,
    },
    /// Re-check a certificate by polynomial arithmetic.
    CheckCert { instance: PathBuf, morphism: PathBuf, certificate: PathBuf },
    /// Enumerate points over small extensions and test the cover pointwise.
    Oracle {
        instance: PathBuf,
        morphism: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check an instance file against the hypotheses of the construction.
    Validate { instance: PathBuf },
}

#[derive(Debug, Clone, Copy, Default, Args)]
pub struct SearchFlags {
    /// Seed for randomized searches [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest degree tried for any intermediate form [default: 24]
    #[arg(long)]
    pub max_degree: Option<u32>,
    /// Degree scans step through multiples of this [default: 1]
    #[arg(long)]
    pub base_step: Option<u32>,
    /// Extension degree bound for witness and augmentation searches [default: 3]
    #[arg(long)]
    pub depth: Option<usize>,
    /// S-pair budget per Gröbner computation [default: 200000]
    #[arg(long)]
    pub budget_spairs: Option<usize>,
}

impl SearchFlags {
    /// Flags win over instance-file overrides, which win over defaults.
    pub fn resolve(&self, file: &Overrides) -> SectionSearchConfig {
        let mut cfg = SectionSearchConfig::default();
        if let Some(v) = self.seed.or(file.seed) {
            cfg.seed = v;
        }
        if let Some(v) = self.max_degree.or(file.max_degree) {
            cfg.max_degree = v;
        }
        if let Some(v) = self.base_step.or(file.base_step) {
            cfg.base_degree_step = v;
        }
        if let Some(v) = self.depth.or(file.depth) {
            cfg.depth = v;
        }
        if let Some(v) = self.budget_spairs.or(file.budget_spairs) {
            cfg.budget.max_spairs = v;
        }
        cfg
    }
}

/// What a subcommand produced; `main` prints the streams and exits with `status`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: ExitStatus,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { status: ExitStatus::Ok, stdout, stderr: String::new() }
    }

    fn fail(status: ExitStatus, stderr: String) -> Self {
        Outcome { status, stdout: String::new(), stderr }
    }

    fn from_error(context: &str, err: &Error) -> Self {
        Outcome::fail(ExitStatus::of(err), format!("error: {context}: {err}\n"))
    }
}

fn read(path: &Path) -> std::result::Result<String, Outcome> {
    fs::read_to_string(path).map_err(|e| Outcome::fail(ExitStatus::Usage, format!("error: cannot read {}: {e}\n", path.display())))
}

fn load_instance(path: &Path) -> std::result::Result<(InstanceFile, VarietyInstance), Outcome> {
    let text = read(path)?;
    let describe = |e: Error| Outcome::from_error(&path.display().to_string(), &e);
    let file = parse_instance(&text).map_err(describe)?;
    let v = file.to_variety().map_err(describe)?;
    Ok((file, v))
}

/// Writes every file to a temporary sibling first, then renames them into place.
fn write_all(files: &[(PathBuf, String)]) -> std::io::Result<()> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, contents) in files {
        let tmp = path.with_extension("txt.partial");
        fs::write(&tmp, contents)?;
        staged.push((tmp, path));
    }
    for (tmp, path) in staged {
        fs::rename(tmp, path)?;
    }
    Ok(())
}

fn summary(file: &InstanceFile, v: &VarietyInstance, cfg: &SectionSearchConfig, morph: &CoverMorphism, cert: &Certificate) -> String {
    let mut out = String::new();
    let mode = if v.mode == Mode::Local { "local" } else { "global" };
    let _ = writeln!(out, "instance p={} ambient={} mode={mode}", file.p, file.ambient);
    let _ = writeln!(out, "F = {}", v.form);
    let _ = writeln!(
        out,
        "search seed={} max-degree={} base-step={} depth={} budget-spairs={}",
        cfg.seed, cfg.max_degree, cfg.base_degree_step, cfg.depth, cfg.budget.max_spairs
    );
    let lg = morph.ledger;
    let _ = writeln!(out, "{}", lg.to_line());
    let _ = writeln!(out, "degree {} = p*l*r*m*e", lg.common_degree());
    let _ =
        writeln!(out, "intermediate degrees: s {}, s_i {}, t {}, t_i {}", lg.e, lg.m * lg.e, lg.r * lg.m * lg.e, lg.l * lg.r * lg.m * lg.e);
    let given = orbit_representatives(&v.points);
    let _ = writeln!(out, "marked points {}", cert.s_off_h.len());
    for rec in &cert.s_off_h {
        let tag = if given.contains(&rec.point) { "" } else { " (added to cover a component)" };
        let _ = writeln!(out, "  {} u0={}{tag}", rec.point, rec.value);
    }
    let _ = writeln!(
        out,
        "certificate: {} finiteness charts, {} etale charts, {} unit charts, {} divisor memberships",
        cert.finiteness.len(),
        cert.etale_charts.len(),
        cert.unit_charts.len(),
        cert.local.len()
    );
    let _ = writeln!(out, "note: {}", cert.flatness_note);
    out
}

pub fn run_construct(instance: &Path, out: &Path, flags: &SearchFlags) -> Outcome {
    let (file, v) = match load_instance(instance) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let cfg = flags.resolve(&file.overrides);
    let built =
        if v.mode == Mode::Local { build_local_cover(&v, &cfg).map(|(lc, c)| (lc.morphism, c)) } else { build_etale_cover(&v, &cfg) };
    let (morph, cert) = match built {
        Ok(x) => x,
        Err(e) => return Outcome::from_error("construction failed", &e),
    };
    if let Verdict::Fail { identity, reason } = check_certificate(&cert, &morph, &v) {
        return Outcome::fail(ExitStatus::CertificateFailed, format!("error: fresh certificate fails at {identity}: {reason}\n"));
    }
    let mut report = summary(&file, &v, &cfg, &morph, &cert);
    report.push_str("check-cert: pass\n");
    let files = [
        (out.join("morphism.txt"), morph.to_text()),
        (out.join("certificate.txt"), cert.to_text()),
        (out.join("report.txt"), report.clone()),
    ];
    if let Err(e) = fs::create_dir_all(out).and_then(|_| write_all(&files)) {
        return Outcome::fail(ExitStatus::Usage, format!("error: cannot write outputs to {}: {e}\n", out.display()));
    }
    Outcome::ok(report)
}

pub fn run_check(instance: &Path, morphism: &Path, certificate: &Path) -> Outcome {
    let (_, v) = match load_instance(instance) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let parsed = read(morphism).and_then(|m| {
        let morph = CoverMorphism::from_text(&m).map_err(|e| Outcome::from_error(&morphism.display().to_string(), &e))?;
        let c = read(certificate)?;
        let cert = Certificate::from_text(&c).map_err(|e| Outcome::from_error(&certificate.display().to_string(), &e))?;
        Ok((morph, cert))
    });
    let (morph, cert) = match parsed {
        Ok(x) => x,
        Err(o) => return o,
    };
    match check_certificate(&cert, &morph, &v) {
        Verdict::Pass => Outcome::ok("certificate: pass\n".into()),
        Verdict::Fail { identity, reason } => {
            Outcome::fail(ExitStatus::CertificateFailed, format!("certificate: FAIL at {identity}: {reason}\n"))
        }
    }
}

pub fn run_oracle(instance: &Path, morphism: &Path, depth: Option<usize>, report: Option<&Path>) -> Outcome {
    let (file, v) = match load_instance(instance) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let morph = match read(morphism)
        .and_then(|m| CoverMorphism::from_text(&m).map_err(|e| Outcome::from_error(&morphism.display().to_string(), &e)))
    {
        Ok(m) => m,
        Err(o) => return o,
    };
    if morph.forms.len() != v.dim() + 1 || morph.forms.iter().any(|u| u.field() != v.field || u.nvars() != v.nvars()) {
        return Outcome::fail(ExitStatus::Invalid, "error: morphism does not match the instance\n".into());
    }
    let cfg = OracleConfig { depth: depth.or(file.overrides.depth).unwrap_or(3), ..OracleConfig::default() };
    let rep = match oracle_check(&v, &morph.forms, &cfg) {
        Ok(r) => r,
        Err(e) => return Outcome::from_error("oracle", &e),
    };
    let text = rep.to_text();
    let mut stdout = text.clone();
    if let Some(path) = report {
        if let Err(e) = write_all(&[(path.to_path_buf(), text)]) {
            return Outcome::fail(ExitStatus::Usage, format!("error: cannot write {}: {e}\n", path.display()));
        }
        stdout = format!("violations {}\n", rep.violations.len());
    }
    if rep.is_clean() {
        Outcome::ok(stdout)
    } else {
        let first = &rep.violations[0];
        Outcome {
            status: ExitStatus::OracleViolation,
            stdout,
            stderr: format!("oracle: {} violations, first {} at {}: {}\n", rep.violations.len(), first.clause, first.point, first.detail),
        }
    }
}

pub fn run_validate(instance: &Path) -> Outcome {
    let text = match read(instance) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let file = match parse_instance_unchecked(&text) {
        Ok(f) => f,
        Err(e) => return Outcome::from_error(&instance.display().to_string(), &e),
    };
    let v = match file.to_variety() {
        Ok(v) => v,
        Err(e) => return Outcome::from_error(&instance.display().to_string(), &e),
    };
    let diag = validate_instance(&v);
    if diag.is_valid() {
        Outcome::ok(format!(
            "valid: dimension {} in P^{}, {} marked point(s) after closing under Frobenius\n",
            v.dim(),
            file.ambient,
            v.points.len()
        ))
    } else {
        let mut err = String::new();
        for issue in &diag.issues {
            let _ = writeln!(err, "invalid: {issue}");
        }
        Outcome::fail(ExitStatus::Invalid, err)
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Construct { instance, out, search } => run_construct(instance, out, search),
        Command::CheckCert { instance, morphism, certificate } => run_check(instance, morphism, certificate),
        Command::Oracle { instance, morphism, depth, report } => run_oracle(instance, morphism, *depth, report.as_deref()),
        Command::Validate { instance } => run_validate(instance),
    }
}
