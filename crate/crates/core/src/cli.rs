//! The `torsionworks` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::algebra::orthonormal_sln_basis;
use crate::complex::{homology, twist, ComplexError};
use crate::glue::{disk_sum, free_product_rep, verify_mv, verify_theorem1, GlueError, VERIFY_TOL};
use crate::io::{parse_scene, print_scene, Scene, SceneError};
use crate::linalg::{CMatrix, LinalgError, DEFAULT_TOL};
use crate::torsion::{torsion_with_bases, TorsionError};

/// Environment variable overriding the default tolerance.
pub const TOL_ENV: &str = "TORSIONWORKS_TOL";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_RANK_AMBIGUITY: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "torsionworks",
    version,
    about = "Adjoint Reidemeister torsion of twisted CW complexes"
)]
pub struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Relative rank tolerance; overrides the environment and the scene.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisSource {
    Canonical,
    File,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Torsion of one scene.
    Torsion {
        scene: PathBuf,
        #[arg(long, value_enum, default_value = "canonical")]
        h_basis_mode: BasisSource,
    },
    /// Check the Mayer-Vietoris identity with random homology bases.
    VerifyMv {
        scene1: PathBuf,
        scene2: PathBuf,
        #[arg(long, default_value_t = 10)]
        random_bases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the torsion of a disk sum with the product of its factors.
    VerifyTheorem1 {
        #[arg(required = true, num_args = 2..)]
        scenes: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "canonical")]
        h_from: BasisSource,
        /// Scene of the glued space whose `h_bases` are used with `--h-from file`.
        #[arg(long)]
        h_file: Option<PathBuf>,
    },
    /// Print the disk sum of two scenes as a scene.
    DiskSum { scene1: PathBuf, scene2: PathBuf },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Scene { path: String, source: SceneError },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Glue(#[from] GlueError),
}

impl From<ComplexError> for CliError {
    fn from(e: ComplexError) -> Self {
        CliError::Glue(e.into())
    }
}

impl From<TorsionError> for CliError {
    fn from(e: TorsionError) -> Self {
        CliError::Glue(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Glue(e) if glue_rank_ambiguity(e) => EXIT_RANK_AMBIGUITY,
            _ => EXIT_FAILURE,
        }
    }
}

fn glue_rank_ambiguity(e: &GlueError) -> bool {
    match e {
        GlueError::Step { source, .. } => glue_rank_ambiguity(source),
        GlueError::Complex(c) => complex_rank_ambiguity(c),
        GlueError::Torsion(TorsionError::Complex(c)) => complex_rank_ambiguity(c),
        GlueError::Torsion(TorsionError::Linalg(l)) | GlueError::Linalg(l) => {
            matches!(l, LinalgError::RankAmbiguity { .. })
        }
        _ => false,
    }
}

fn complex_rank_ambiguity(e: &ComplexError) -> bool {
    matches!(e, ComplexError::Linalg(LinalgError::RankAmbiguity { .. }))
}

/// A report value. Groups nest; text output flattens them with dots.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Str(String),
    Int(u64),
    Float(f64),
    Bool(bool),
    Ints(Vec<usize>),
    Floats(Vec<f64>),
    Group(Vec<(String, Value)>),
    List(Vec<Value>),
}

impl Value {
    pub fn complex(z: Complex64) -> Value {
        Value::Group(vec![
            ("value".into(), Value::Floats(vec![z.re, z.im])),
            ("modulus".into(), Value::Float(z.norm())),
        ])
    }

    pub fn verdict(pass: bool, residual: f64, tol: f64) -> Value {
        Value::Group(vec![
            (
                "verdict".into(),
                Value::Str(if pass { "pass" } else { "fail" }.into()),
            ),
            ("residual".into(), Value::Float(residual)),
            ("tol".into(), Value::Float(tol)),
        ])
    }

    fn is_fail(&self) -> bool {
        match self {
            Value::Group(entries) => entries
                .iter()
                .any(|(k, v)| (k == "verdict" && *v == Value::Str("fail".into())) || v.is_fail()),
            Value::List(items) => items.iter().any(Value::is_fail),
            _ => false,
        }
    }

    fn render(&self, key: &str, out: &mut String) {
        match self {
            Value::Group(entries) => {
                for (k, v) in entries {
                    v.render(&format!("{key}.{k}"), out);
                }
            }
            Value::List(items) => {
                for (i, v) in items.iter().enumerate() {
                    v.render(&format!("{key}.{i}"), out);
                }
            }
            scalar => {
                let _ = writeln!(out, "{key} = {}", scalar.scalar_text());
            }
        }
    }

    fn scalar_text(&self) -> String {
        let list = |items: Vec<String>| format!("[{}]", items.join(", "));
        match self {
            Value::Str(s) => s.clone(),
            Value::Int(i) => i.to_string(),
            Value::Float(x) => format!("{x:?}"),
            Value::Bool(b) => b.to_string(),
            Value::Ints(v) => list(v.iter().map(usize::to_string).collect()),
            Value::Floats(v) => list(v.iter().map(|x| format!("{x:?}")).collect()),
            Value::Group(_) | Value::List(_) => unreachable!("not a scalar"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Str(v) => s.serialize_str(v),
            Value::Int(v) => s.serialize_u64(*v),
            Value::Float(v) => s.serialize_f64(*v),
            Value::Bool(v) => s.serialize_bool(*v),
            Value::Ints(v) => v.serialize(s),
            Value::Floats(v) => v.serialize(s),
            Value::List(v) => v.serialize(s),
            Value::Group(entries) => {
                let mut map = s.serialize_map(Some(entries.len()))?;
                for (k, v) in entries {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
        }
    }
}

/// Ordered key/value report with the command echo and a digest of the inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub entries: Vec<(String, Value)>,
}

impl Report {
    fn new(command: String, inputs: &[Vec<u8>]) -> Self {
        let mut hasher = Sha256::new();
        for bytes in inputs {
            hasher.update((bytes.len() as u64).to_le_bytes());
            hasher.update(bytes);
        }
        let digest: String = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        Report {
            entries: vec![
                ("command".into(), Value::Str(command)),
                ("inputs_sha256".into(), Value::Str(digest)),
            ],
        }
    }

    fn push(&mut self, key: &str, value: Value) {
        self.entries.push((key.to_string(), value));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// True when any verdict in the report is "fail".
    pub fn failed(&self) -> bool {
        self.entries.iter().any(|(_, v)| v.is_fail())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            v.render(k, &mut out);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&Value::Group(self.entries.clone()))
            .expect("report serializes");
        out.push('\n');
        out
    }
}

/// What a run printed and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env_tol = std::env::var(TOL_ENV).ok();
    run_with_env(args, env_tol.as_deref())
}

/// `run` with the value of the tolerance variable passed explicitly.
pub fn run_with_env<I, T>(args: I, env_tol: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_FAILURE,
            };
            let text = e.to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let start = Instant::now();
    let result = execute(&cli, env_tol);
    let elapsed = format!("elapsed: {:.3} ms\n", start.elapsed().as_secs_f64() * 1e3);
    match result {
        Ok(Output::Report(report)) => {
            let stdout = if cli.json {
                report.to_json()
            } else {
                report.to_text()
            };
            let code = if report.failed() {
                EXIT_FAILURE
            } else {
                EXIT_OK
            };
            Outcome {
                code,
                stdout,
                stderr: elapsed,
            }
        }
        Ok(Output::Text(stdout)) => Outcome {
            code: EXIT_OK,
            stdout,
            stderr: elapsed,
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

pub enum Output {
    Report(Report),
    Text(String),
}

struct Input {
    bytes: Vec<u8>,
    scene: Scene,
}

fn load(path: &Path) -> Result<Input, CliError> {
    let display = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|source| CliError::Read {
        path: display.clone(),
        source,
    })?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::Input(format!("{display}: not UTF-8: {e}")))?;
    let scene = parse_scene(text).map_err(|source| CliError::Scene {
        path: display,
        source,
    })?;
    Ok(Input { bytes, scene })
}

/// Flag, then environment, then the scene files, then the default.
pub fn resolve_tol(
    flag: Option<f64>,
    env: Option<&str>,
    scenes: &[&Scene],
) -> Result<f64, CliError> {
    let tol = match (flag, env) {
        (Some(t), _) => t,
        (None, Some(text)) => text
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{TOL_ENV}={text:?} is not a number")))?,
        (None, None) => scenes.iter().find_map(|s| s.tol).unwrap_or(DEFAULT_TOL),
    };
    if !(tol.is_finite() && tol > 0.0 && tol < 1.0) {
        return Err(CliError::Input(format!(
            "tolerance {tol} must lie in (0, 1)"
        )));
    }
    Ok(tol)
}

fn echo(cli: &Cli) -> String {
    let path = |p: &PathBuf| p.display().to_string();
    let mut parts = vec!["torsionworks".to_string()];
    match &cli.command {
        Command::Torsion {
            scene,
            h_basis_mode,
        } => {
            parts.extend(["torsion".into(), path(scene)]);
            parts.push(format!("--h-basis-mode {}", mode_name(*h_basis_mode)));
        }
        Command::VerifyMv {
            scene1,
            scene2,
            random_bases,
            seed,
        } => {
            parts.extend(["verify-mv".into(), path(scene1), path(scene2)]);
            parts.push(format!("--random-bases {random_bases} --seed {seed}"));
        }
        Command::VerifyTheorem1 {
            scenes,
            h_from,
            h_file,
        } => {
            parts.push("verify-theorem1".into());
            parts.extend(scenes.iter().map(path));
            parts.push(format!("--h-from {}", mode_name(*h_from)));
            if let Some(f) = h_file {
                parts.push(format!("--h-file {}", path(f)));
            }
        }
        Command::DiskSum { scene1, scene2 } => {
            parts.extend(["disk-sum".into(), path(scene1), path(scene2)]);
        }
    }
    if let Some(t) = cli.tol {
        parts.push(format!("--tol {t:e}"));
    }
    parts.join(" ")
}

fn mode_name(m: BasisSource) -> &'static str {
    match m {
        BasisSource::Canonical => "canonical",
        BasisSource::File => "file",
    }
}

fn execute(cli: &Cli, env_tol: Option<&str>) -> Result<Output, CliError> {
    match &cli.command {
        Command::Torsion {
            scene,
            h_basis_mode,
        } => {
            let input = load(scene)?;
            let tol = resolve_tol(cli.tol, env_tol, &[&input.scene])?;
            let mut report = Report::new(echo(cli), &[input.bytes]);
            cmd_torsion(&input.scene, *h_basis_mode, tol, &mut report)?;
            Ok(Output::Report(report))
        }
        Command::VerifyMv {
            scene1,
            scene2,
            random_bases,
            seed,
        } => {
            let a = load(scene1)?;
            let b = load(scene2)?;
            let tol = resolve_tol(cli.tol, env_tol, &[&a.scene, &b.scene])?;
            let mut report = Report::new(echo(cli), &[a.bytes, b.bytes]);
            cmd_verify_mv(&a.scene, &b.scene, *random_bases, *seed, tol, &mut report)?;
            Ok(Output::Report(report))
        }
        Command::VerifyTheorem1 {
            scenes,
            h_from,
            h_file,
        } => {
            let inputs = scenes
                .iter()
                .map(|p| load(p))
                .collect::<Result<Vec<_>, _>>()?;
            let h_input = match (h_from, h_file) {
                (BasisSource::File, Some(p)) => Some(load(p)?),
                (BasisSource::File, None) => {
                    return Err(CliError::Input("--h-from file requires --h-file".into()))
                }
                (BasisSource::Canonical, Some(_)) => {
                    return Err(CliError::Input("--h-file requires --h-from file".into()))
                }
                (BasisSource::Canonical, None) => None,
            };
            let refs: Vec<&Scene> = inputs.iter().map(|i| &i.scene).collect();
            let tol = resolve_tol(cli.tol, env_tol, &refs)?;
            let mut bytes: Vec<Vec<u8>> = inputs.iter().map(|i| i.bytes.clone()).collect();
            if let Some(h) = &h_input {
                bytes.push(h.bytes.clone());
            }
            let mut report = Report::new(echo(cli), &bytes);
            cmd_verify_theorem1(&refs, h_input.as_ref().map(|i| &i.scene), tol, &mut report)?;
            Ok(Output::Report(report))
        }
        Command::DiskSum { scene1, scene2 } => {
            let a = load(scene1)?;
            let b = load(scene2)?;
            Ok(Output::Text(cmd_disk_sum(&a.scene, &b.scene)?))
        }
    }
}

/// Homology bases for every degree of a complex: scene bases where given,
/// canonical bases elsewhere.
fn bases_from_scene(scene: &Scene, canonical: &[CMatrix]) -> Result<Vec<CMatrix>, CliError> {
    if let Some(&p) = scene.h_bases.keys().find(|&&p| p >= canonical.len()) {
        return Err(CliError::Input(format!(
            "homology basis given in degree {p}, the complex has top degree {}",
            canonical.len() - 1
        )));
    }
    Ok(canonical
        .iter()
        .enumerate()
        .map(|(p, c)| scene.h_bases.get(&p).cloned().unwrap_or_else(|| c.clone()))
        .collect())
}

pub fn cmd_torsion(
    scene: &Scene,
    mode: BasisSource,
    tol: f64,
    report: &mut Report,
) -> Result<(), CliError> {
    let basis = orthonormal_sln_basis(scene.representation.n());
    let tc = twist(&scene.complex, &scene.representation, &basis)?;
    let hd = homology(tc.chain(), tol)?;
    let canonical = hd.canonical_bases();
    let bases = match mode {
        BasisSource::Canonical => canonical,
        BasisSource::File => {
            for (p, _) in hd.bettis().iter().enumerate().filter(|(_, &b)| b > 0) {
                if !scene.h_bases.contains_key(&p) {
                    return Err(CliError::Input(format!(
                        "--h-basis-mode file: no homology basis for degree {p}"
                    )));
                }
            }
            bases_from_scene(scene, &canonical)?
        }
    };
    let t = torsion_with_bases(tc.chain(), &hd, &bases)?;
    report.push("tol", Value::Float(tol));
    report.push(
        "target",
        Value::Str(format!(
            "{}({})",
            scene.representation.target(),
            scene.representation.n()
        )),
    );
    report.push("cells", Value::Ints(scene.complex.cells().to_vec()));
    report.push("betti", Value::Ints(hd.bettis()));
    report.push("h_basis_mode", Value::Str(mode_name(mode).into()));
    report.push("torsion", Value::complex(t.value));
    Ok(())
}

pub fn cmd_verify_mv(
    a: &Scene,
    b: &Scene,
    trials: usize,
    seed: u64,
    tol: f64,
    report: &mut Report,
) -> Result<(), CliError> {
    if trials == 0 {
        return Err(CliError::Input("--random-bases must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = verify_mv(
        &a.complex,
        &b.complex,
        &a.representation,
        &b.representation,
        trials,
        tol,
        &mut rng,
    )?;
    report.push("tol", Value::Float(tol));
    report.push("seed", Value::Int(seed));
    report.push("random_bases", Value::Int(trials as u64));
    report.push("rank_phi1", Value::Int(r.rank_phi1 as u64));
    report.push(
        "trials",
        Value::List(
            r.trials
                .iter()
                .map(|t| {
                    Value::Group(vec![
                        ("lhs".into(), Value::complex(t.lhs)),
                        ("rhs".into(), Value::complex(t.rhs)),
                        ("corrective".into(), Value::complex(t.corrective)),
                        ("relative_error".into(), Value::Float(t.relative_error)),
                    ])
                })
                .collect(),
        ),
    );
    report.push(
        "max_signed_relative_error",
        Value::Float(r.max_signed_relative_error),
    );
    report.push(
        "identity",
        Value::verdict(r.pass, r.max_relative_error, VERIFY_TOL),
    );
    Ok(())
}

pub fn cmd_verify_theorem1(
    scenes: &[&Scene],
    h_scene: Option<&Scene>,
    tol: f64,
    report: &mut Report,
) -> Result<(), CliError> {
    let factors: Vec<_> = scenes.iter().map(|s| s.complex.clone()).collect();
    let reps: Vec<_> = scenes.iter().map(|s| s.representation.clone()).collect();
    let h_total = match h_scene {
        None => None,
        Some(h) => {
            let mut total = factors[0].clone();
            let mut rep = reps[0].clone();
            for k in 1..factors.len() {
                let ds = disk_sum(&total, &factors[k]).map_err(|e| e.at_step(k))?;
                rep = free_product_rep(&rep, &reps[k], &ds).map_err(|e| e.at_step(k))?;
                total = ds.total;
            }
            if !h.complex.same_structure(&total) {
                return Err(CliError::Input(
                    "--h-file does not describe the glued complex".into(),
                ));
            }
            let basis = orthonormal_sln_basis(rep.n());
            let tc = twist(&total, &rep, &basis)?;
            let hd = homology(tc.chain(), tol)?;
            Some(bases_from_scene(h, &hd.canonical_bases())?)
        }
    };
    let r = verify_theorem1(&factors, &reps, h_total, None, tol)?;
    report.push("tol", Value::Float(tol));
    report.push("factors", Value::Int(factors.len() as u64));
    report.push(
        "factor_torsions",
        Value::List(
            r.factor_torsions
                .iter()
                .map(|&z| Value::complex(z))
                .collect(),
        ),
    );
    let mut steps: Vec<_> = r.steps.clone();
    steps.sort_by_key(|s| s.step);
    report.push(
        "steps",
        Value::List(
            steps
                .iter()
                .map(|s| {
                    Value::Group(vec![
                        ("step".into(), Value::Int(s.step as u64)),
                        ("name".into(), Value::Str(s.name.clone())),
                        ("total".into(), Value::complex(s.total)),
                        ("left".into(), Value::complex(s.left)),
                        ("right".into(), Value::complex(s.right)),
                        ("disk".into(), Value::complex(s.disk)),
                        (
                            "det_transport".into(),
                            Value::complex(s.transport.det_a_product()),
                        ),
                        (
                            "corrective".into(),
                            Value::verdict(
                                s.corrective_error <= VERIFY_TOL,
                                s.corrective_error,
                                VERIFY_TOL,
                            ),
                        ),
                        ("relative_error".into(), Value::Float(s.relative_error)),
                    ])
                })
                .collect(),
        ),
    );
    report.push("total", Value::complex(r.total));
    report.push("product", Value::complex(r.product));
    report.push(
        "signed_relative_error",
        Value::Float(r.signed_relative_error),
    );
    report.push(
        "multiplicativity",
        Value::verdict(r.pass, r.relative_error, VERIFY_TOL),
    );
    Ok(())
}

pub fn cmd_disk_sum(a: &Scene, b: &Scene) -> Result<String, CliError> {
    let ds = disk_sum(&a.complex, &b.complex)?;
    let rep = free_product_rep(&a.representation, &b.representation, &ds)?;
    let mut scene = Scene::new(ds.total, rep).map_err(|e| CliError::Input(e.to_string()))?;
    scene.tol = a.tol.or(b.tol);
    Ok(print_scene(&scene))
}

#[cfg(test)]
mod tests {
    use std::path::PathBuf;

    use super::*;

    fn scene(name: &str) -> String {
        let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
        p.push("../../scenes");
        p.push(name);
        p.to_string_lossy().into_owned()
    }

    fn run(args: &[&str]) -> Outcome {
        let mut all = vec!["torsionworks".to_string()];
        all.extend(args.iter().map(|s| s.to_string()));
        run_with_env(all, None)
    }

    fn field(stdout: &str, key: &str) -> String {
        stdout
            .lines()
            .find_map(|l| l.strip_prefix(&format!("{key} = ")))
            .unwrap_or_else(|| panic!("no {key} in\n{stdout}"))
            .to_string()
    }

    fn float(stdout: &str, key: &str) -> f64 {
        field(stdout, key).parse().unwrap()
    }

    #[test]
    fn disk_torsion_is_one() {
        let out = run(&["torsion", &scene("disk.toml")]);
        assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
        assert_eq!(field(&out.stdout, "betti"), "[3]");
        assert!((float(&out.stdout, "torsion.modulus") - 1.0).abs() < 1e-12);
        assert!(out.stderr.starts_with("elapsed:"));
    }

    #[test]
    fn circle_torsion_modulus() {
        let out = run(&["torsion", &scene("circle_2.toml")]);
        assert_eq!(out.code, EXIT_OK);
        assert!((float(&out.stdout, "torsion.modulus") - 2.25).abs() < 1e-9);
    }

    #[test]
    fn unreadable_path_fails_with_message() {
        let out = run(&["torsion", "/nonexistent/scene.toml"]);
        assert_eq!(out.code, EXIT_FAILURE);
        assert!(out.stderr.contains("cannot read"));
        assert!(out.stdout.is_empty());
    }

    #[test]
    fn verify_mv_point_point() {
        let out = run(&[
            "verify-mv",
            &scene("point.toml"),
            &scene("point.toml"),
            "--random-bases",
            "5",
        ]);
        assert_eq!(out.code, EXIT_OK);
        assert_eq!(field(&out.stdout, "identity.verdict"), "pass");
        assert!(float(&out.stdout, "identity.residual") <= 1e-9);
        assert_eq!(field(&out.stdout, "seed"), "0");
    }

    #[test]
    fn verify_mv_circles() {
        let out = run(&[
            "verify-mv",
            &scene("circle_2.toml"),
            &scene("circle_3.toml"),
        ]);
        assert_eq!(out.code, EXIT_OK);
        assert_eq!(field(&out.stdout, "random_bases"), "10");
        assert!(float(&out.stdout, "identity.residual") <= 1e-6);
    }

    #[test]
    fn verify_mv_target_mismatch() {
        let out = run(&[
            "verify-mv",
            &scene("circle_2.toml"),
            &scene("circle_psl_3.toml"),
        ]);
        assert_eq!(out.code, EXIT_FAILURE);
        assert!(out.stderr.contains("targets differ"));
    }

    #[test]
    fn verify_theorem1_points() {
        let out = run(&[
            "verify-theorem1",
            &scene("point.toml"),
            &scene("point.toml"),
        ]);
        assert_eq!(out.code, EXIT_OK);
        assert!((float(&out.stdout, "total.modulus") - 1.0).abs() < 1e-12);
        assert!((float(&out.stdout, "product.modulus") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn verify_theorem1_three_circles() {
        let out = run(&[
            "verify-theorem1",
            &scene("circle_2.toml"),
            &scene("circle_3.toml"),
            &scene("circle_5.toml"),
        ]);
        assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
        assert_eq!(field(&out.stdout, "multiplicativity.verdict"), "pass");
        assert!(float(&out.stdout, "multiplicativity.residual") <= 1e-6);
        assert_eq!(field(&out.stdout, "steps.1.corrective.verdict"), "pass");
    }

    #[test]
    fn verify_theorem1_needs_two_scenes() {
        let out = run(&["verify-theorem1", &scene("circle_2.toml")]);
        assert_eq!(out.code, EXIT_FAILURE);
        assert!(out.stderr.contains("Usage"));
    }

    #[test]
    fn verify_theorem1_with_basis_file() {
        // the disk sum of two circles, with a degree-0 basis taken from the first Lie direction
        let dir = std::env::temp_dir().join(format!("tw-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let sum = run(&["disk-sum", &scene("circle_2.toml"), &scene("circle_3.toml")]);
        assert_eq!(sum.code, EXIT_OK);
        let total = dir.join("total.toml");
        std::fs::write(&total, &sum.stdout).unwrap();
        let canonical = run(&[
            "verify-theorem1",
            &scene("circle_2.toml"),
            &scene("circle_3.toml"),
            "--h-from",
            "file",
            "--h-file",
            total.to_str().unwrap(),
        ]);
        assert_eq!(canonical.code, EXIT_OK, "{}", canonical.stderr);
        assert_eq!(field(&canonical.stdout, "multiplicativity.verdict"), "pass");
        let missing = run(&[
            "verify-theorem1",
            &scene("circle_2.toml"),
            &scene("circle_3.toml"),
            "--h-from",
            "file",
        ]);
        assert_eq!(missing.code, EXIT_FAILURE);
    }

    #[test]
    fn disk_sum_prints_a_parsable_scene() {
        let out = run(&["disk-sum", &scene("circle_2.toml"), &scene("wedge_2.toml")]);
        assert_eq!(out.code, EXIT_OK);
        let s = parse_scene(&out.stdout).unwrap();
        assert_eq!(s.complex.cells(), &[1, 3]);
        assert_eq!(s.representation.generator_count(), 3);
    }

    #[test]
    fn reports_are_deterministic() {
        let args = [
            "verify-mv",
            &scene("circle_2.toml"),
            &scene("wedge_2.toml"),
            "--seed",
            "7",
            "--random-bases",
            "3",
        ];
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.code, EXIT_OK);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(field(&a.stdout, "seed"), "7");
        let c = run(&[
            "verify-mv",
            &scene("circle_2.toml"),
            &scene("wedge_2.toml"),
            "--seed",
            "8",
            "--random-bases",
            "3",
        ]);
        assert_ne!(a.stdout, c.stdout);
    }

    #[test]
    fn json_has_the_same_keys_in_order() {
        let text = run(&["torsion", &scene("torus.toml")]);
        let json = run(&["--json", "torsion", &scene("torus.toml")]);
        let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
        assert_eq!(v["betti"], serde_json::json!([1, 2, 1]));
        assert!(v["torsion"]["modulus"].is_f64());
        let m: f64 = json
            .stdout
            .split("\"modulus\": ")
            .nth(1)
            .unwrap()
            .split(|c: char| c != '.' && c != '-' && c != 'e' && !c.is_ascii_digit())
            .next()
            .unwrap()
            .parse()
            .unwrap();
        assert_eq!(m, float(&text.stdout, "torsion.modulus"));
        let keys: Vec<_> = text
            .stdout
            .lines()
            .map(|l| l.split(['.', ' ']).next().unwrap())
            .collect();
        let first = keys.iter().position(|k| *k == "betti").unwrap();
        assert!(json.stdout.find("\"betti\"").unwrap() > json.stdout.find("\"cells\"").unwrap());
        assert_eq!(keys[first - 1], "cells");
    }

    #[test]
    fn tolerance_precedence() {
        let circle = scene("circle_2.toml");
        let with = |args: &[&str], env: Option<&str>| {
            let mut all = vec!["torsionworks"];
            all.extend_from_slice(args);
            run_with_env(all, env)
        };
        let out = with(&["torsion", &circle], None);
        assert_eq!(field(&out.stdout, "tol"), "1e-8");
        let out = with(&["torsion", &circle], Some("1e-9"));
        assert_eq!(field(&out.stdout, "tol"), "1e-9");
        let out = with(&["--tol", "1e-10", "torsion", &circle], Some("1e-9"));
        assert_eq!(field(&out.stdout, "tol"), "1e-10");
        let out = with(&["torsion", &circle], Some("abc"));
        assert_eq!(out.code, EXIT_FAILURE);
    }

    #[test]
    fn rank_ambiguity_maps_to_exit_two() {
        let e = CliError::Glue(GlueError::from(LinalgError::RankAmbiguity {
            threshold: 1e-8,
            spectrum: vec![1.0, 1e-8],
        }));
        assert_eq!(e.exit_code(), EXIT_RANK_AMBIGUITY);
        let nested = CliError::Glue(
            GlueError::from(LinalgError::RankAmbiguity {
                threshold: 1e-8,
                spectrum: vec![],
            })
            .at_step(2),
        );
        assert_eq!(nested.exit_code(), EXIT_RANK_AMBIGUITY);
        assert_eq!(CliError::Input("x".into()).exit_code(), EXIT_FAILURE);
    }
}
