use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use elg_core::data_set::{DataSet, DataSetJson, Descriptor, Family};
use elg_core::elgebra::{
    check_parallelisation, coordinate_bracket_identity, duality_pair, verify_elgebra, Elgebra, ElgebraJson, Twist,
};
use elg_core::error::Error;
use elg_core::exc::verify_algebra;
use elg_core::exterior::Form;
use elg_core::lie::LieAlg;
use elg_core::subspace::{
    is_coisotropic, is_colagrangian, is_isotropic, is_lagrangian, normalize_lagrangian, normalize_pair, Subspace,
    SubspaceJson,
};
use elg_core::suite::{run_all, run_criterion, SuiteOptions};

#[derive(Parser)]
#[command(name = "elg", version, about = "Exact checks for admissible data sets, elgebras and parallelisations")]
struct Cli {
    /// Commands that produce an artifact write it here; the others write
    /// their JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the JSON report here (any command).
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Restrict size ranges to n <= 4.
    #[arg(long, global = true)]
    quick: bool,
    /// Seed for randomized trials.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build or verify admissible data sets.
    #[command(subcommand)]
    Dataset(DatasetCmd),
    /// Verify the exceptional algebras.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Classify subspaces of E or E*.
    #[command(subcommand)]
    Subspace(SubspaceCmd),
    /// Build or verify elgebras.
    #[command(subcommand)]
    Elgebra(ElgebraCmd),
    /// Certify a Leibniz parallelisation.
    #[command(subcommand)]
    Parallelisation(ParallelisationCmd),
    /// Certify a dual pair of parallelisations.
    #[command(subcommand)]
    Duality(DualityCmd),
    /// Run the acceptance battery.
    Suite {
        /// Run a single criterion (1..=9).
        #[arg(long)]
        only: Option<usize>,
    },
}

#[derive(Args)]
struct DescriptorArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
}

#[derive(Subcommand)]
enum DatasetCmd {
    Build(DescriptorArgs),
    Verify { file: PathBuf },
}

#[derive(Subcommand)]
enum AlgebraCmd {
    Verify {
        /// A single n or a range such as 4..6.
        #[arg(long, default_value = "3..6")]
        n: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Isotropic,
    Coisotropic,
    Lagrangian,
    Colagrangian,
}

#[derive(Subcommand)]
enum SubspaceCmd {
    Test {
        file: PathBuf,
        #[arg(long, value_enum)]
        check: Check,
    },
    /// Lagrangian normal form; with --with, normalize a co-Lagrangian V
    /// together with a complementary Lagrangian W.
    Normalize {
        file: PathBuf,
        #[arg(long)]
        with: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ElgebraCmd {
    /// Group elgebra of a Lie algebra k (exceptional data set, n = dim k);
    /// with --family the bracket of k is used on E directly.
    FromLie {
        file: PathBuf,
        #[arg(long = "F1")]
        f1: Option<PathBuf>,
        #[arg(long = "F4")]
        f4: Option<PathBuf>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        n: Option<usize>,
    },
    Verify {
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum ParallelisationCmd {
    Check { elgebra: PathBuf, subspace: PathBuf },
}

#[derive(Subcommand)]
enum DualityCmd {
    Check { elgebra: PathBuf, first: PathBuf, second: PathBuf },
}

/// Failure classes: a check that ran and failed, or unusable input.
enum Fail {
    Check(String),
    Input(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Jacobi { .. }
            | Error::NotAdmissible(_)
            | Error::CalibrationNotUnique(_)
            | Error::SymmetricPart(_)
            | Error::NotNull(_)
            | Error::NotIsotropic(_)
            | Error::NotLagrangian(_)
            | Error::Hypothesis(_)
            | Error::Internal(_) => Fail::Check(e.to_string()),
            _ => Fail::Input(e.to_string()),
        }
    }
}

#[derive(Serialize)]
struct CheckLine {
    name: String,
    passed: bool,
    #[serde(skip_serializing_if = "Value::is_null")]
    detail: Value,
}

#[derive(Serialize, Default)]
struct Report {
    command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dataset: Option<Value>,
    passed: bool,
    checks: Vec<CheckLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

impl Report {
    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Serialize) {
        self.checks.push(CheckLine {
            name: name.into(),
            passed,
            detail: serde_json::to_value(detail).unwrap_or(Value::Null),
        });
    }

    fn dataset(&mut self, ds: &DataSet) {
        self.dataset = Some(serde_json::to_value(fingerprint(ds)).unwrap_or(Value::Null));
    }
}

fn fingerprint(ds: &DataSet) -> Value {
    let s = ds.summary();
    json!({"family": s.family, "n": s.n, "p": s.p, "q": s.q, "dimE": s.dim_e, "dimN": s.dim_n, "embed_scale": s.embed_scale})
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Fail> {
    let text = std::fs::read_to_string(path).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Fail> {
    std::fs::write(path, text).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn parse_range(s: &str) -> Result<(usize, usize), Fail> {
    let bad = || Fail::Input(format!("cannot parse n range {s:?}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
            Ok((a, b))
        }
        None => {
            let a = s.trim().parse().map_err(|_| bad())?;
            Ok((a, a))
        }
    }
}

fn descriptor(family: &str, n: Option<usize>, p: Option<usize>, q: Option<usize>) -> Result<Descriptor, Fail> {
    let fam: Family = family.parse()?;
    let need = |x: Option<usize>, what: &str| x.ok_or_else(|| Fail::Input(format!("--{what} is required for family {fam}")));
    Ok(match fam {
        Family::Gl => Descriptor::gl(need(n, "n")?),
        Family::Exceptional => Descriptor::exceptional(need(n, "n")?),
        Family::SlWedge2 => Descriptor::slwedge2(need(n, "n")?),
        Family::Opq => match (p, q) {
            (Some(p), Some(q)) => Descriptor::opq(p, q),
            _ => Descriptor::onn(need(n, "n")?),
        },
    })
}

fn load_subspace(path: &Path, ds: Option<&DataSet>) -> Result<(Arc<DataSet>, Subspace), Fail> {
    let j: SubspaceJson = read_json(path)?;
    let ds = match ds {
        Some(ds) => Arc::new(ds.clone()),
        None => Arc::new(DataSet::build(j.dataset)?),
    };
    let v = Subspace::from_json(&j, &ds)?;
    Ok((ds, v))
}

fn load_elgebra(path: &Path) -> Result<Elgebra, Fail> {
    let j: ElgebraJson = read_json(path)?;
    Ok(Elgebra::from_json(&j, None)?)
}

struct Ctx<'a> {
    cli: &'a Cli,
    /// Artifact written to `--out` (or stdout) for producing commands.
    artifact: Option<String>,
    /// Human-readable lines for stdout.
    lines: Vec<String>,
}

fn run(ctx: &mut Ctx, rep: &mut Report) -> Result<(), Fail> {
    let cli = ctx.cli;
    match &cli.cmd {
        Cmd::Dataset(DatasetCmd::Build(a)) => {
            let ds = DataSet::build(descriptor(&a.family, a.n, a.p, a.q)?)?;
            rep.dataset(&ds);
            rep.check("build", true, Value::Null);
            ctx.artifact = Some(pretty(&ds.to_json()));
        }
        Cmd::Dataset(DatasetCmd::Verify { file }) => {
            let j: DataSetJson = read_json(file)?;
            let ds = DataSet::from_json(&j)?;
            rep.dataset(&ds);
            let cert = ds.check_admissible();
            ctx.lines.push(match cert.witness {
                Some((k, j)) => format!("admissibility: FAIL, π(E[{k},{j}]) ∉ span(g)"),
                None => format!("admissibility: {}", if cert.passed { "pass" } else { "FAIL" }),
            });
            rep.check(
                "admissible",
                cert.passed,
                json!({"witness_unit": cert.witness, "g_independent": cert.g_independent, "g_closed": cert.g_closed}),
            );
            if ds.dim_n() > 0 {
                match ds.calibrate() {
                    Ok(c) => {
                        let ok = &c == ds.embed_scale();
                        ctx.lines.push(format!("embed_scale: stored {}, calibrated {c}", ds.embed_scale()));
                        rep.check("embed_scale", ok, json!({"stored": ds.embed_scale(), "calibrated": c}));
                    }
                    Err(e) => rep.check("embed_scale", false, e.to_string()),
                }
            }
            let eq = ds.check_equivariance();
            rep.check("equivariance", eq.is_none(), eq);
        }
        Cmd::Algebra(AlgebraCmd::Verify { n }) => {
            let (lo, mut hi) = parse_range(n)?;
            if cli.quick {
                hi = hi.min(4);
            }
            for n in lo..=hi {
                let r = verify_algebra(n)?;
                ctx.lines.push(format!(
                    "n={n}: dimension {}, Jacobi {}, representation {}",
                    r.dimension,
                    if r.jacobi.is_none() { "pass" } else { "FAIL" },
                    if r.representation.is_none() { "pass" } else { "FAIL" }
                ));
                rep.check(format!("algebra n={n}"), r.passed(), &r);
            }
        }
        Cmd::Subspace(SubspaceCmd::Test { file, check }) => {
            let (ds, v) = load_subspace(file, None)?;
            rep.dataset(&ds);
            let (name, ok) = match check {
                Check::Isotropic => ("isotropic", is_isotropic(&ds, &v)?),
                Check::Coisotropic => ("coisotropic", is_coisotropic(&ds, &v)?),
                Check::Lagrangian => ("lagrangian", is_lagrangian(&ds, &v)?),
                Check::Colagrangian => ("colagrangian", is_colagrangian(&ds, &v)?),
            };
            ctx.lines.push(format!("{name}: {}", if ok { "yes" } else { "no" }));
            rep.check(name, ok, json!({"dim": v.dim(), "codim": v.codim()}));
        }
        Cmd::Subspace(SubspaceCmd::Normalize { file, with }) => {
            let (ds, v) = load_subspace(file, None)?;
            rep.dataset(&ds);
            match with {
                None => {
                    let nf = normalize_lagrangian(&ds, &v)?;
                    ctx.lines.push(format!("orbit: {}", serde_json::to_value(nf.label).unwrap()));
                    rep.check("normal form", true, json!({"label": nf.label, "word_length": nf.word.len()}));
                    ctx.artifact = Some(pretty(&nf));
                }
                Some(w) => {
                    let (_, w) = load_subspace(w, Some(&ds))?;
                    let word = normalize_pair(&ds, &v, &w)?;
                    rep.check("pair normal form", true, json!({"word_length": word.len()}));
                    ctx.artifact = Some(pretty(&word));
                }
            }
        }
        Cmd::Elgebra(ElgebraCmd::FromLie { file, f1, f4, family, n }) => {
            let k: LieAlg = read_json(file)?;
            let e = match family {
                Some(fam) => {
                    if f1.is_some() || f4.is_some() {
                        return Err(Fail::Input("twists need the exceptional data set; drop --family".into()));
                    }
                    let ds = Arc::new(DataSet::build(descriptor(fam, *n, None, None)?)?);
                    Elgebra::from_lie(ds, &k)?
                }
                None => {
                    let d = k.dim();
                    let f1 = match f1 {
                        Some(p) => read_json::<Form>(p)?,
                        None => Form::zero(d, 1),
                    };
                    let f4 = match f4 {
                        Some(p) => read_json::<Form>(p)?,
                        None => Form::zero(d, 4),
                    };
                    let ds = Arc::new(DataSet::build(Descriptor::exceptional(d))?);
                    Elgebra::from_lie_twisted(ds, &k, &Twist::new(f1, f4)?)?
                }
            };
            rep.dataset(e.dataset());
            rep.check("constructed", true, json!({"rank_D": e.d_matrix().rank()}));
            ctx.artifact = Some(pretty(&e.to_json()));
        }
        Cmd::Elgebra(ElgebraCmd::Verify { file }) => {
            let e = load_elgebra(file)?;
            rep.dataset(e.dataset());
            let r = verify_elgebra(&e);
            for (name, c) in [
                ("leibniz", &r.leibniz),
                ("symmetric_part", &r.symmetric_part),
                ("ad_in_g", &r.ad_in_g),
                ("d_left_central", &r.d_left_central),
                ("d_equivariant", &r.d_equivariant),
            ] {
                ctx.lines.push(format!(
                    "{name}: {}{}",
                    if c.passed { "pass" } else { "FAIL" },
                    c.witness.as_ref().map(|w| format!(" at {w:?}")).unwrap_or_default()
                ));
                rep.check(name, c.passed, c);
            }
            let cbi = coordinate_bracket_identity(&e)?;
            rep.check("coordinate_bracket_identity", cbi, Value::Null);
        }
        Cmd::Parallelisation(ParallelisationCmd::Check { elgebra, subspace }) => {
            let e = load_elgebra(elgebra)?;
            rep.dataset(e.dataset());
            let (_, v) = load_subspace(subspace, Some(e.dataset()))?;
            let cert = check_parallelisation(&e, &v)?;
            ctx.lines.push(format!(
                "parallelisation: {} (dim g_E = {}, dim g_V = {})",
                if cert.passed { "pass" } else { "FAIL" },
                cert.dim_g_e,
                cert.dim_g_v
            ));
            rep.check("parallelisation", cert.passed, &cert);
        }
        Cmd::Duality(DualityCmd::Check { elgebra, first, second }) => {
            let e = load_elgebra(elgebra)?;
            rep.dataset(e.dataset());
            let (_, v1) = load_subspace(first, Some(e.dataset()))?;
            let (_, v2) = load_subspace(second, Some(e.dataset()))?;
            let cert = duality_pair(&e, &v1, &v2)?;
            ctx.lines.push(format!("duality pair: {}", if cert.passed { "pass" } else { "FAIL" }));
            rep.check("duality", cert.passed, &cert);
        }
        Cmd::Suite { only } => {
            let opts = SuiteOptions { quick: cli.quick, seed: cli.seed };
            let results = match only {
                Some(i) if (1..=9).contains(i) => vec![run_criterion(*i, &opts)],
                Some(i) => return Err(Fail::Input(format!("criterion {i} is not in 1..=9"))),
                None => run_all(&opts),
            };
            for r in results {
                let o = r.outcome;
                ctx.lines.push(format!("criterion {} [{}]: {}", o.id, o.title, if o.passed { "pass" } else { "FAIL" }));
                rep.check(format!("criterion {}: {}", o.id, o.title), o.passed, &o.details);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut rep = Report { command: std::env::args().skip(1).collect(), ..Default::default() };
    let mut ctx = Ctx { cli: &cli, artifact: None, lines: Vec::new() };
    let mut code = match run(&mut ctx, &mut rep) {
        Ok(()) => {
            rep.passed = rep.checks.iter().all(|c| c.passed);
            if rep.passed {
                0
            } else {
                1
            }
        }
        Err(Fail::Check(m)) => {
            rep.error = Some(m);
            1
        }
        Err(Fail::Input(m)) => {
            rep.error = Some(m);
            2
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    let full = json!({"report": &rep, "timing": {"seconds": elapsed}});

    let mut writes: Vec<(&Path, String)> = Vec::new();
    match (&ctx.artifact, &cli.out) {
        (Some(a), Some(p)) => writes.push((p, a.clone())),
        (Some(a), None) if code == 0 => print!("{a}"),
        (None, Some(p)) => writes.push((p, pretty(&full))),
        _ => {}
    }
    if let Some(p) = &cli.report {
        writes.push((p, pretty(&full)));
    }
    for (path, text) in writes {
        if let Err(Fail::Input(m) | Fail::Check(m)) = write_file(path, &text) {
            eprintln!("error: {m}");
            code = 2;
        }
    }
    let to_stderr = ctx.artifact.is_some() && cli.out.is_none();
    for l in &ctx.lines {
        if to_stderr {
            eprintln!("{l}");
        } else {
            println!("{l}");
        }
    }
    if let Some(e) = &rep.error {
        eprintln!("error: {e}");
    }
    if ctx.artifact.is_none() || cli.out.is_some() {
        let msg = match code {
            0 => "pass",
            1 => "FAIL",
            _ => "input error",
        };
        if to_stderr {
            eprintln!("{msg}");
        } else {
            println!("{msg}");
        }
    }
    ExitCode::from(code)
}
