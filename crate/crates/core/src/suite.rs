//! The acceptance battery: nine exact checks shared by the CLI and the
//! integration tests.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::data_set::{DataSet, Descriptor, Family};
use crate::elgebra::{
    check_parallelisation, check_twist_integrability, duality_pair, d_properties, predicted_jacobiator,
    verify_elgebra, Elgebra, Twist,
};
use crate::error::Result;
use crate::exc::{verify_algebra, EVec};
use crate::exterior::{Blade, Form};
use crate::lie::LieAlg;
use crate::linalg::Matrix;
use crate::rat::Rat;
use crate::subspace::{
    canonical_lagrangian, colagrangian_image, gl_apply, is_coisotropic, is_colagrangian, normalize_lagrangian,
    random_word, standard_colagrangian, Ambient, OrbitLabel, Subspace,
};

#[derive(Clone, Copy, Debug)]
#[derive(Default)]
pub struct SuiteOptions {
    /// Restrict every size range to `n ≤ 4`.
    pub quick: bool,
    pub seed: u64,
}


#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub title: String,
    pub passed: bool,
    pub details: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct TimedOutcome {
    pub outcome: CriterionOutcome,
    pub elapsed: Duration,
}

pub const TITLES: [&str; 9] = [
    "dimension table",
    "algebra verification",
    "admissibility",
    "two-orbit Lagrangian classification",
    "co-Lagrangian criterion",
    "twist integrability iff Leibniz",
    "S4 example",
    "U-duality torus example",
    "consequences for D",
];

struct Log {
    passed: bool,
    details: Vec<String>,
}

impl Log {
    fn new() -> Self {
        Log { passed: true, details: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.details.push(what);
        } else {
            self.passed = false;
            self.details.push(format!("FAIL {what}"));
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.details.push(what.into());
    }

    fn error(&mut self, what: &str, e: crate::error::Error) {
        self.passed = false;
        self.details.push(format!("FAIL {what}: {e}"));
    }
}

fn max_n(opts: &SuiteOptions) -> usize {
    if opts.quick {
        4
    } else {
        6
    }
}

fn exc(n: usize) -> Result<Arc<DataSet>> {
    Ok(Arc::new(DataSet::build(Descriptor::exceptional(n))?))
}

fn dimension_table(opts: &SuiteOptions) -> Log {
    let mut log = Log::new();
    let want = [(3, 6, 3), (4, 10, 5), (5, 16, 10), (6, 27, 27)];
    for &(n, de, dn) in want.iter().filter(|w| w.0 <= max_n(opts)) {
        match DataSet::build(Descriptor::exceptional(n)) {
            Ok(ds) => log.check(
                (ds.dim_e(), ds.dim_n()) == (de, dn),
                format!("n={n}: (dim E, dim N) = ({}, {}), expected ({de}, {dn})", ds.dim_e(), ds.dim_n()),
            ),
            Err(e) => log.error(&format!("n={n}"), e),
        }
    }
    log
}

fn algebra_verification(opts: &SuiteOptions) -> Log {
    let mut log = Log::new();
    let want = [(3, 12), (4, 25), (5, 46), (6, 79)];
    for &(n, d) in want.iter().filter(|w| w.0 <= max_n(opts)) {
        match verify_algebra(n) {
            Ok(r) => {
                log.check(r.dimension == d, format!("n={n}: dimension {} (expected {d})", r.dimension));
                log.check(r.jacobi.is_none(), format!("n={n}: Jacobi {}", r.jacobi.as_deref().unwrap_or("holds")));
                log.check(
                    r.representation.is_none(),
                    format!("n={n}: representation {}", r.representation.as_deref().unwrap_or("holds")),
                );
                log.check(r.passed(), format!("n={n}: full report"));
            }
            Err(e) => log.error(&format!("n={n}"), e),
        }
    }
    log
}

fn eta_antisymmetric(p: &Matrix, eta: &[Rat]) -> bool {
    let d = eta.len();
    (0..d).all(|i| (0..d).all(|j| (&eta[i] * &p[(i, j)]) + (&p[(j, i)] * &eta[j]) == Rat::zero()))
}

fn admissibility(opts: &SuiteOptions) -> Log {
    let mut log = Log::new();
    let top = max_n(opts);
    let mut descs = Vec::new();
    descs.extend((1..=top).map(Descriptor::gl));
    descs.extend((1..=top).map(Descriptor::onn));
    descs.extend((3..=top).map(Descriptor::exceptional));
    descs.extend((2..=top).map(Descriptor::slwedge2));
    let results: Vec<(Descriptor, Result<(bool, Rat, Rat, bool, Option<(usize, usize)>, bool)>)> = descs
        .par_iter()
        .map(|&desc| {
            let r = (|| {
                let ds = DataSet::build(desc)?;
                let cert = ds.check_admissible();
                let c = ds.calibrate()?;
                let mut eta_ok = true;
                let mut eta_witness = None;
                if let Some(eta) = ds.eta() {
                    let d = ds.dim_e();
                    'units: for k in 0..d {
                        for j in 0..d {
                            if !eta_antisymmetric(&ds.pi(&Matrix::unit(d, k, j))?, &eta) {
                                eta_ok = false;
                                eta_witness = Some((k + 1, j + 1));
                                break 'units;
                            }
                        }
                    }
                }
                Ok((cert.passed, cert.embed_scale, c, eta_ok, eta_witness, ds.dim_n() == 0))
            })();
            (desc, r)
        })
        .collect();
    for (desc, r) in results {
        let name = format!("{}{}", desc.family, desc_size(&desc));
        match r {
            Ok((passed, stored, c, eta_ok, witness, n_zero)) => {
                log.check(passed, format!("{name}: π(End E) ⊂ g"));
                if n_zero && desc.family != Family::Gl {
                    log.check(c == stored, format!("{name}: N = 0, embed_scale is vacuous (set to {c})"));
                } else if desc.family != Family::Gl {
                    log.check(c == stored, format!("{name}: unique embed_scale {c}"));
                }
                if desc.family == Family::Opq {
                    let w = witness.map(|(k, j)| format!(" (unit E[{k},{j}])")).unwrap_or_default();
                    log.check(eta_ok, format!("{name}: π(A) η-antisymmetric on all units{w}"));
                }
            }
            Err(e) => log.error(&name, e),
        }
    }
    log
}

fn desc_size(d: &Descriptor) -> String {
    match (d.p, d.q) {
        (Some(p), Some(q)) => format!("({p},{q})"),
        _ => format!("({})", d.n),
    }
}

fn lagrangian_classification(opts: &SuiteOptions, trials: usize) -> Log {
    let mut log = Log::new();
    for n in 3..=max_n(opts) {
        let ds = match exc(n) {
            Ok(ds) => ds,
            Err(e) => {
                log.error(&format!("n={n}"), e);
                continue;
            }
        };
        for label in [OrbitLabel::DimN, OrbitLabel::DimNMinus1] {
            let canon = canonical_lagrangian(n, label);
            let failures: Vec<String> = (0..trials)
                .into_par_iter()
                .filter_map(|t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ ((n as u64) << 40) ^ ((label as u64) << 32) ^ t as u64);
                    let len = rng.gen_range(3..=8);
                    let word = random_word(n, len, &mut rng);
                    let run = || -> Result<Option<String>> {
                        let w = word.apply_subspace(&canon)?;
                        let nf = normalize_lagrangian(&ds, &w)?;
                        if nf.label != label {
                            return Ok(Some(format!("trial {t}: label {:?}", nf.label)));
                        }
                        // independent check of the certificate
                        let moved = nf.word.apply_subspace(&w)?;
                        let framed = canon.map(|v| Ok(gl_apply(&nf.frame, &EVec::from_coords(n, v))?.to_coords()))?;
                        if moved != framed {
                            return Ok(Some(format!("trial {t}: word · W ≠ frame · canonical")));
                        }
                        Ok(None)
                    };
                    match run() {
                        Ok(r) => r,
                        Err(e) => Some(format!("trial {t}: {e}")),
                    }
                })
                .collect();
            log.check(
                failures.is_empty(),
                format!(
                    "n={n} {:?}: {}/{trials} trials recover the label{}",
                    label,
                    trials - failures.len(),
                    failures.first().map(|f| format!(", first failure {f}")).unwrap_or_default()
                ),
            );
        }
    }
    log
}

fn colagrangian_criterion(opts: &SuiteOptions) -> Log {
    let mut log = Log::new();
    for n in 3..=max_n(opts) {
        let run = || -> Result<Vec<(bool, String)>> {
            let ds = exc(n)?;
            let v = standard_colagrangian(n);
            let mut out = vec![
                (colagrangian_image(&ds, &v)? == v, "standard co-Lagrangian: (V°⊗N)_E = V".to_string()),
                (is_colagrangian(&ds, &v)?, "standard co-Lagrangian certified".to_string()),
            ];
            // V plus a vector of T, plus a generic vector, plus all of T
            let d = ds.dim_e();
            let mut larger: Vec<Subspace> = (0..n).map(|i| v.sum(&Subspace::coordinate(Ambient::E, d, [i]))).collect();
            let generic: Vec<Rat> = (0..d).map(|i| Rat::int(i as i64 + 1)).collect();
            larger.push(v.sum(&Subspace::new(Ambient::E, d, &[generic])?));
            larger.push(v.sum(&Subspace::coordinate(Ambient::E, d, 0..n)));
            let mut all_ok = true;
            for w in &larger {
                let img = colagrangian_image(&ds, w)?;
                all_ok &= is_coisotropic(&ds, w)? && w.dim() > v.dim() && img != *w && !is_colagrangian(&ds, w)?;
            }
            out.push((all_ok, format!("{} strictly larger coisotropic subspaces have (V°⊗N)_E ≠ V", larger.len())));
            Ok(out)
        };
        match run() {
            Ok(checks) => {
                for (ok, what) in checks {
                    log.check(ok, format!("n={n}: {what}"));
                }
            }
            Err(e) => log.error(&format!("n={n}"), e),
        }
    }
    log
}

/// Closed 1-forms of `k`, as a basis of `ker δ` on `Λ¹`.
fn closed_one_forms(k: &LieAlg) -> Result<Vec<Vec<Rat>>> {
    let n = k.dim();
    let cols: Vec<Vec<Rat>> =
        (0..n).map(|i| Ok(k.ce_differential(&Form::basis(n, &[i]))?.to_coords())).collect::<Result<_>>()?;
    let m = Matrix::from_fn(cols[0].len(), n, |r, c| cols[c][r].clone());
    Ok(m.nullspace())
}

fn small(rng: &mut ChaCha8Rng) -> Rat {
    Rat::new(rng.gen_range(-3..=3), rng.gen_range(1..=2))
}

/// A random `(𝔨, F₁, F₄)` with `dim 𝔨 = 4`; about half of the twists are
/// chosen integrable.
pub fn random_twisted(rng: &mut ChaCha8Rng, kind: usize) -> Result<(String, LieAlg, Twist)> {
    let (name, k) = match kind % 3 {
        0 => ("abelian".to_string(), LieAlg::abelian(4)),
        1 => ("heisenberg+R".to_string(), LieAlg::heisenberg().plus_abelian(1)),
        _ => {
            let m = Matrix::from_fn(3, 3, |_, _| Rat::int(rng.gen_range(-2..=2)));
            ("solvable".to_string(), LieAlg::semidirect(&m))
        }
    };
    let f1 = if rng.gen_bool(0.5) {
        let closed = closed_one_forms(&k)?;
        let mut c = vec![Rat::zero(); 4];
        for v in &closed {
            let s = small(rng);
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += &s * vi;
            }
        }
        Form::from_vector(&c)
    } else {
        Form::from_vector(&(0..4).map(|_| small(rng)).collect::<Vec<_>>())
    };
    let f4 = Form::basis(4, &[0, 1, 2, 3]).scale(&small(rng));
    Ok((name, k.clone(), Twist::new(f1, f4)?))
}

/// Criterion 6; returns the Leibniz-passing elgebras for criterion 9.
fn twist_integrability(opts: &SuiteOptions, trials: usize) -> (Log, Vec<(String, Elgebra)>, usize) {
    let mut log = Log::new();
    let ds = match exc(4) {
        Ok(ds) => ds,
        Err(e) => {
            log.error("exceptional n=4", e);
            return (log, Vec::new(), 0);
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x6a09e667);
    let mut cases = Vec::new();
    for t in 0..trials {
        match random_twisted(&mut rng, t) {
            Ok(c) => cases.push(c),
            Err(e) => log.error(&format!("case {t}"), e),
        }
    }
    let results: Vec<Result<(bool, bool, Option<String>, Elgebra)>> = cases
        .par_iter()
        .map(|(_, k, tw)| {
            let integrable = check_twist_integrability(k, tw)?;
            let e = Elgebra::from_lie_twisted(ds.clone(), k, tw)?;
            let rep = verify_elgebra(&e);
            let mut mismatch = None;
            if let Some(w) = &rep.leibniz.witness {
                let (a, b, c) = (w[0] - 1, w[1] - 1, w[2] - 1);
                let is_xy_s2 = a < 4 && b < 4 && (4..10).contains(&c);
                if !is_xy_s2 {
                    mismatch = Some(format!("witness {w:?} is not of the form (X, Y, σ₂)"));
                } else {
                    let de = e.dim();
                    let u = |i: usize| {
                        let mut v = vec![Rat::zero(); de];
                        v[i] = Rat::one();
                        v
                    };
                    let got = EVec::from_coords(4, &e.jacobiator(&u(a), &u(b), &u(c)));
                    let s2 = EVec::from_coords(4, &u(c)).s2;
                    let want = predicted_jacobiator(k, tw, &u(a)[..4], &u(b)[..4], &s2)?;
                    if got != want || Some(got.to_coords()) != rep.leibniz.residual.clone() {
                        mismatch = Some(format!("witness {w:?}: Jacobiator differs from σ₂∧ι_Yι_X(δF₄+F₁∧F₄+δF₁)"));
                    }
                }
            }
            Ok((integrable, rep.leibniz.passed, mismatch, e))
        })
        .collect();
    let mut agree = 0;
    let mut integrable_count = 0;
    let mut formula_ok = 0;
    let mut failures = 0;
    let mut passing = Vec::new();
    let mut first_bad = None;
    for ((name, _, _), r) in cases.iter().zip(results) {
        match r {
            Ok((integrable, leibniz, mismatch, e)) => {
                integrable_count += integrable as usize;
                if integrable == leibniz {
                    agree += 1;
                } else if first_bad.is_none() {
                    first_bad = Some(format!("{name}: integrable={integrable}, Leibniz={leibniz}"));
                }
                if !leibniz {
                    failures += 1;
                    match mismatch {
                        None => formula_ok += 1,
                        Some(m) => {
                            if first_bad.is_none() {
                                first_bad = Some(format!("{name}: {m}"));
                            }
                        }
                    }
                } else {
                    passing.push((name.clone(), e));
                }
            }
            Err(e) => log.error(name, e),
        }
    }
    let n = cases.len();
    log.check(n >= 50, format!("{n} randomized cases ({integrable_count} integrable)"));
    log.check(agree == n, format!("{agree}/{n}: Leibniz holds iff the twist is integrable"));
    log.check(formula_ok == failures, format!("{formula_ok}/{failures} failing witnesses match the obstruction formula"));
    if let Some(b) = first_bad {
        log.note(format!("first discrepancy: {b}"));
    }
    let non_elgebras = n - passing.len();
    (log, passing, non_elgebras)
}

fn so5_example() -> (Log, Option<Elgebra>) {
    let mut log = Log::new();
    let run = || -> Result<(Elgebra, bool, bool, bool, usize, usize)> {
        let ds = Arc::new(DataSet::build(Descriptor::slwedge2(4))?);
        let e = Elgebra::from_lie(ds, &LieAlg::so(5))?;
        let rep = verify_elgebra(&e);
        let b2 = Blade::all(5, 2);
        let v = Subspace::coordinate(Ambient::E, 10, (0..10).filter(|&i| !b2[i].contains(4)));
        let cert = check_parallelisation(&e, &v)?;
        let d_zero = e.d_matrix().is_zero();
        Ok((e, rep.passed(), cert.passed, d_zero, cert.dim_g_e, cert.dim_g_v))
    };
    match run() {
        Ok((e, verified, par, d_zero, ge, gv)) => {
            log.check(d_zero, "D = 0");
            log.check(verified, "so(5) passes verify_elgebra under SLwedge2 n=4");
            log.check(par, format!("V = Λ²R⁴ is a parallelisation (dim g_E = {ge}, dim g_V = {gv})"));
            (log, Some(e))
        }
        Err(e) => {
            log.error("so(5)", e);
            (log, None)
        }
    }
}

fn torus_example(opts: &SuiteOptions) -> (Log, Option<Elgebra>) {
    let mut log = Log::new();
    let run = || -> Result<(Elgebra, crate::elgebra::DualityCertificate)> {
        let ds = exc(4)?;
        let e = Elgebra::abelian(ds.clone());
        let v1 = standard_colagrangian(4);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xbb67ae85);
        let mut v2 = v1.clone();
        while v2 == v1 {
            v2 = random_word(4, 4, &mut rng).theta().apply_subspace(&v1)?;
        }
        let cert = duality_pair(&e, &v1, &v2)?;
        Ok((e, cert))
    };
    match run() {
        Ok((e, cert)) => {
            log.check(cert.first.passed && cert.first.codimension == 4, "V₁ = Λ²T* ⊕ Λ⁵T*: codim-4 co-Lagrangian subalgebra");
            log.check(cert.second.passed && cert.second.codimension == 4, "V₂ = g·V₁: codim-4 co-Lagrangian subalgebra");
            log.check(cert.distinct, "V₁ ≠ V₂");
            log.check(cert.passed, "duality pair certificate");
            log.note(format!("g_V1 ∩ g_V2 = 0: {}", cert.trivial_intersection));
            (log, Some(e))
        }
        Err(err) => {
            log.error("torus", err);
            (log, None)
        }
    }
}

fn d_consequences(elgebras: &[(String, Elgebra)], skipped: usize) -> Log {
    let mut log = Log::new();
    let bad: Vec<String> = elgebras
        .par_iter()
        .filter_map(|(name, e)| {
            let (b, ee) = d_properties(e);
            (!(b.passed && ee.passed)).then(|| format!("{name}: (b) {} (e) {}", b.passed, ee.passed))
        })
        .collect();
    log.check(
        bad.is_empty(),
        format!("(b) [Dn,u] = 0 and (e) [u,Dn] = D[u,n] on {}/{} elgebras", elgebras.len() - bad.len(), elgebras.len()),
    );
    if let Some(b) = bad.first() {
        log.note(format!("first failure: {b}"));
    }
    log.note(format!("{skipped} non-integrable brackets from criterion 6 are not elgebras and are excluded"));
    log
}

pub const LAGRANGIAN_TRIALS: usize = 200;
pub const TWIST_TRIALS: usize = 60;

fn finish(id: usize, log: Log, start: Instant) -> TimedOutcome {
    TimedOutcome {
        outcome: CriterionOutcome { id, title: TITLES[id - 1].to_string(), passed: log.passed, details: log.details },
        elapsed: start.elapsed(),
    }
}

/// Runs a single criterion (1..=9). Criterion 9 rebuilds the elgebras of
/// criteria 6–8.
pub fn run_criterion(id: usize, opts: &SuiteOptions) -> TimedOutcome {
    let start = Instant::now();
    let log = match id {
        1 => dimension_table(opts),
        2 => algebra_verification(opts),
        3 => admissibility(opts),
        4 => lagrangian_classification(opts, LAGRANGIAN_TRIALS),
        5 => colagrangian_criterion(opts),
        6 => twist_integrability(opts, TWIST_TRIALS).0,
        7 => so5_example().0,
        8 => torus_example(opts).0,
        9 => {
            let (_, mut es, skipped) = twist_integrability(opts, TWIST_TRIALS);
            es.extend(so5_example().1.map(|e| ("so(5)".to_string(), e)));
            es.extend(torus_example(opts).1.map(|e| ("torus".to_string(), e)));
            // restart the clock: only the consequence checks are timed
            let start = Instant::now();
            return finish(9, d_consequences(&es, skipped), start);
        }
        _ => {
            let mut l = Log::new();
            l.check(false, format!("unknown criterion {id}"));
            l
        }
    };
    finish(id, log, start)
}

pub fn run_all(opts: &SuiteOptions) -> Vec<TimedOutcome> {
    let start = Instant::now();
    let mut out: Vec<TimedOutcome> = (1..=5).map(|i| run_criterion(i, opts)).collect();
    let t6 = Instant::now();
    let (log6, mut es, skipped) = twist_integrability(opts, TWIST_TRIALS);
    out.push(finish(6, log6, t6));
    let t7 = Instant::now();
    let (log7, e7) = so5_example();
    out.push(finish(7, log7, t7));
    let t8 = Instant::now();
    let (log8, e8) = torus_example(opts);
    out.push(finish(8, log8, t8));
    es.extend(e7.map(|e| ("so(5)".to_string(), e)));
    es.extend(e8.map(|e| ("torus".to_string(), e)));
    let t9 = Instant::now();
    out.push(finish(9, d_consequences(&es, skipped), t9));
    let _ = start;
    out
}
