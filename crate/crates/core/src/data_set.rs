//! Admissible group data sets: a Lie algebra `g ⊂ End(E)`, the symmetric
//! map `S: S²E → N`, its dual `S*: S²E* → N*`, and the embedding
//! `N → S²E` whose normalisation is fixed by admissibility.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exc::{act_matrix, ExcElem, EVec};
use crate::exterior::{binomial, jmap, Blade, CoVectorSixForm, Form, Poly};
use crate::linalg::{is_zero_vec, Matrix, SparseVec, SpanBasis};
use crate::rat::Rat;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "gl")]
    Gl,
    #[serde(rename = "opq")]
    Opq,
    #[serde(rename = "exc")]
    Exceptional,
    #[serde(rename = "slwedge2")]
    SlWedge2,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Gl => "gl",
            Family::Opq => "opq",
            Family::Exceptional => "exc",
            Family::SlWedge2 => "slwedge2",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gl" => Ok(Family::Gl),
            "opq" | "onn" | "o" => Ok(Family::Opq),
            "exc" | "exceptional" => Ok(Family::Exceptional),
            "slwedge2" | "sl" => Ok(Family::SlWedge2),
            other => Err(Error::invalid(format!("unknown family {other:?}"))),
        }
    }
}

/// Identifies a data set; everything else is rebuilt from it.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub struct Descriptor {
    pub family: Family,
    /// GL: `dim E`; Opq: `p + q`; Exceptional: `dim T`; SlWedge2: `dim W − 1`.
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
}

impl Descriptor {
    pub fn gl(n: usize) -> Self {
        Descriptor { family: Family::Gl, n, p: None, q: None }
    }

    pub fn opq(p: usize, q: usize) -> Self {
        Descriptor { family: Family::Opq, n: p + q, p: Some(p), q: Some(q) }
    }

    pub fn onn(n: usize) -> Self {
        Self::opq(n, n)
    }

    pub fn exceptional(n: usize) -> Self {
        Descriptor { family: Family::Exceptional, n, p: None, q: None }
    }

    pub fn slwedge2(n: usize) -> Self {
        Descriptor { family: Family::SlWedge2, n, p: None, q: None }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Unsupported(msg));
        match self.family {
            Family::Gl if !(1..=12).contains(&self.n) => bad(format!("GL needs 1 <= n <= 12, got {}", self.n)),
            Family::Opq => match (self.p, self.q) {
                (Some(p), Some(q)) if p >= 1 && q >= 1 && p + q == self.n && self.n <= 16 => Ok(()),
                _ => bad(format!("Opq needs p, q >= 1 with p + q = n <= 16, got {:?}", self)),
            },
            Family::Exceptional if !(3..=6).contains(&self.n) => {
                bad(format!("exceptional data sets exist for n in 3..=6, got {}", self.n))
            }
            Family::SlWedge2 if !(2..=7).contains(&self.n) => bad(format!("SLwedge2 needs 2 <= n <= 7, got {}", self.n)),
            _ => Ok(()),
        }
    }
}

/// `(i_1 … i_k)` blades as 1-based strings, used for basis labels.
fn blade_label(prefix: &str, b: Blade) -> String {
    format!("{prefix}{}", b.indices().iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(""))
}

/// Elements of `N = T* ⊕ Λ⁴T* ⊕ (T* ⊗ Λ⁶T*)` for the exceptional family.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NVec {
    pub n1: Form,
    pub n4: Form,
    pub n7: CoVectorSixForm,
}

impl NVec {
    pub fn zero(n: usize) -> Self {
        NVec { n1: Form::zero(n, 1), n4: Form::zero(n, 4), n7: CoVectorSixForm::zero(n) }
    }

    pub fn dim_for(n: usize) -> usize {
        n + binomial(n, 4) + if n >= 6 { n * binomial(n, 6) } else { 0 }
    }

    pub fn to_coords(&self) -> Vec<Rat> {
        let n = self.n1.dim();
        let mut v = self.n1.to_coords();
        v.extend(self.n4.to_coords());
        if n >= 6 {
            for comp in &self.n7.components {
                v.extend(comp.to_coords());
            }
        }
        v
    }

    pub fn from_coords(n: usize, v: &[Rat]) -> Self {
        assert_eq!(v.len(), Self::dim_for(n), "N coordinate length");
        let b4 = binomial(n, 4);
        let mut out = NVec {
            n1: Form::from_coords(n, 1, &v[..n]),
            n4: Form::from_coords(n, 4, &v[n..n + b4]),
            n7: CoVectorSixForm::zero(n),
        };
        if n >= 6 {
            let b6 = binomial(n, 6);
            for i in 0..n {
                let off = n + b4 + i * b6;
                out.n7.components[i] = Form::from_coords(n, 6, &v[off..off + b6]);
            }
        }
        out
    }
}

/// `S(u, v)` for the exceptional family: the polarisation of
/// `u ⊗ u ↦ 2ι_Xσ₂ + (2ι_Xσ₅ − σ₂∧σ₂) + 2jσ₂∧σ₅`.
pub fn exc_sym(u: &EVec, v: &EVec) -> NVec {
    let n1 = u.s2.interior(&v.x).add(&v.s2.interior(&u.x));
    let n4 = u.s5.interior(&v.x).add(&v.s5.interior(&u.x)).sub(&u.s2.wedge(&v.s2));
    let mut n7 = jmap(&u.s2, &v.s5).expect("degrees fixed");
    let other = jmap(&v.s2, &u.s5).expect("degrees fixed");
    for (a, b) in n7.components.iter_mut().zip(other.components) {
        a.add_assign_ext(&b);
    }
    NVec { n1, n4, n7 }
}

/// Bilinear table `S(e_i, e_j)` as sparse vectors.
type SymTable = Vec<Vec<SparseVec>>;

fn table_from_fn(d: usize, f: impl Fn(usize, usize) -> Vec<Rat> + Sync) -> SymTable {
    (0..d).into_par_iter().map(|i| (0..d).map(|j| SparseVec::from_dense(&f(i, j))).collect()).collect()
}

fn unit(d: usize, i: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); d];
    v[i] = Rat::one();
    v
}

/// The exceptional symmetric table for any `n >= 2` (`n = 2` is used
/// internally by the Lagrangian recursion).
pub fn exc_sym_table(n: usize) -> Vec<Vec<Vec<Rat>>> {
    let d = EVec::dim_for(n);
    let basis: Vec<EVec> = (0..d).map(|i| EVec::from_coords(n, &unit(d, i))).collect();
    (0..d).map(|i| (0..d).map(|j| exc_sym(&basis[i], &basis[j]).to_coords()).collect()).collect()
}

fn slwedge_sym(n: usize) -> SymTable {
    let w = n + 1;
    let b2 = Blade::all(w, 2);
    let b4 = Blade::all(w, 4);
    let d = b2.len();
    table_from_fn(d, |i, j| {
        let p = Poly::from_blade(w, b2[i], Rat::one()).wedge(&Poly::from_blade(w, b2[j], Rat::one()));
        b4.iter().map(|b| p.coeff(*b)).collect()
    })
}

fn slwedge_g(n: usize) -> Vec<Matrix> {
    let w = n + 1;
    let b2 = Blade::all(w, 2);
    let d = b2.len();
    let mut out = Vec::new();
    for a in 0..w {
        for b in 0..w {
            let gen = Matrix::unit(w, a, b);
            let m = Matrix::from_fn(d, d, |i, j| Poly::from_blade(w, b2[j], Rat::one()).gl_act(&gen).coeff(b2[i]));
            out.push(m);
        }
    }
    out
}

fn eta(p: usize, q: usize) -> Vec<Rat> {
    (0..p + q).map(|i| if i < p { Rat::one() } else { Rat::int(-1) }).collect()
}

/// Certificate of admissibility: `π(A)` in `g`-coordinates for every matrix
/// unit `A = E_{kj}` (row `k`, column `j`), stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibilityCertificate {
    pub passed: bool,
    pub embed_scale: Rat,
    /// `(k, j, coordinates)` with 1-based matrix-unit indices.
    pub coordinates: Vec<(usize, usize, Vec<(usize, Rat)>)>,
    /// First matrix unit whose projection leaves `g` (1-based), if any.
    pub witness: Option<(usize, usize)>,
    pub g_independent: bool,
    pub g_closed: bool,
}

#[derive(Clone, Debug)]
pub struct DataSet {
    desc: Descriptor,
    dim_e: usize,
    dim_n: usize,
    embed_scale: Rat,
    g_basis: Vec<Matrix>,
    g_span: SpanBasis,
    sym: SymTable,
    sym_dual: SymTable,
    /// `s(f_m)` for the basis `f_m` of `N`: the coefficient-one section of
    /// `S` whose image is the invariant complement of `ker S`.
    section: Vec<Matrix>,
    /// `R[k·d + l] = s(S(e_k, e_l))`.
    composition: Vec<Matrix>,
}

impl DataSet {
    /// Builds the data set and calibrates the embedding.
    pub fn build(desc: Descriptor) -> Result<DataSet> {
        let mut ds = Self::uncalibrated(desc, None)?;
        ds.embed_scale = ds.calibrate()?;
        Ok(ds)
    }

    /// Rebuilds the symmetric maps from the descriptor but uses the given
    /// scale and `g` basis verbatim (for verifying stored data sets).
    pub fn from_parts(desc: Descriptor, embed_scale: Rat, g_basis: Vec<Matrix>) -> Result<DataSet> {
        let mut ds = Self::uncalibrated(desc, Some(g_basis))?;
        ds.embed_scale = embed_scale;
        Ok(ds)
    }

    fn uncalibrated(desc: Descriptor, g_override: Option<Vec<Matrix>>) -> Result<DataSet> {
        desc.validate()?;
        let n = desc.n;
        let (dim_e, dim_n, sym, g_basis) = match desc.family {
            Family::Gl => {
                let g = (0..n).flat_map(|i| (0..n).map(move |j| Matrix::unit(n, i, j))).collect();
                (n, 0, vec![vec![SparseVec::default(); n]; n], g)
            }
            Family::Opq => {
                let e = eta(desc.p.unwrap(), desc.q.unwrap());
                let sym = table_from_fn(n, |i, j| vec![if i == j { e[i].clone() } else { Rat::zero() }]);
                let mut g = Vec::new();
                for a in 0..n {
                    for b in a + 1..n {
                        // η⁻¹(E_ab − E_ba)
                        let mut m = Matrix::zeros(n, n);
                        m[(a, b)] = e[a].clone();
                        m[(b, a)] = -&e[b];
                        g.push(m);
                    }
                }
                (n, 1, sym, g)
            }
            Family::Exceptional => {
                let table = exc_sym_table(n);
                let d = table.len();
                let sym = table.iter().map(|row| row.iter().map(|v| SparseVec::from_dense(v)).collect()).collect();
                let g = ExcElem::basis(n).par_iter().map(act_matrix).collect();
                (d, NVec::dim_for(n), sym, g)
            }
            Family::SlWedge2 => {
                let sym = slwedge_sym(n);
                (binomial(n + 1, 2), binomial(n + 1, 4), sym, slwedge_g(n))
            }
        };
        let g_basis = g_override.unwrap_or(g_basis);
        for m in &g_basis {
            if m.rows() != dim_e || m.cols() != dim_e {
                return Err(Error::DataSetMismatch(format!("g generator of size {}x{} in a {dim_e}-dimensional E", m.rows(), m.cols())));
            }
        }
        // In every family the dual map has the same coordinate expression:
        // S* is obtained by exchanging T and T* (exceptional), or is the
        // wedge product on Λ²W* (SLwedge2), or η⁻¹ = η (Opq).
        let sym_dual = sym.clone();
        let g_span = SpanBasis::from_vectors(dim_e * dim_e, g_basis.iter().map(|m| m.as_slice()));
        let mut ds = DataSet {
            desc,
            dim_e,
            dim_n,
            embed_scale: Rat::one(),
            g_basis,
            g_span,
            sym,
            sym_dual,
            section: Vec::new(),
            composition: Vec::new(),
        };
        ds.section = ds.compute_section()?;
        ds.composition = (0..dim_e * dim_e)
            .into_par_iter()
            .map(|kl| ds.section_of(&ds.sym[kl / dim_e][kl % dim_e].to_dense(dim_n)))
            .collect();
        Ok(ds)
    }

    /// Exceptional data for any `n >= 2`, without `g` or calibration. Only
    /// the symmetric maps are meaningful.
    pub fn exceptional_maps_only(n: usize) -> Result<DataSet> {
        if !(2..=6).contains(&n) {
            return Err(Error::Unsupported(format!("exceptional maps need n in 2..=6, got {n}")));
        }
        let table = exc_sym_table(n);
        let d = table.len();
        let sym: SymTable = table.iter().map(|row| row.iter().map(|v| SparseVec::from_dense(v)).collect()).collect();
        Ok(DataSet {
            desc: Descriptor::exceptional(n),
            dim_e: d,
            dim_n: NVec::dim_for(n),
            embed_scale: Rat::one(),
            g_basis: Vec::new(),
            g_span: SpanBasis::new(d * d),
            sym_dual: sym.clone(),
            sym,
            section: Vec::new(),
            composition: Vec::new(),
        })
    }

    fn compute_section(&self) -> Result<Vec<Matrix>> {
        let (d, m) = (self.dim_e, self.dim_n);
        if m == 0 {
            return Ok(Vec::new());
        }
        // T(f_a)_{ij} = S*(e^i, e^j)_a
        let t: Vec<Matrix> =
            (0..m).map(|a| Matrix::from_fn(d, d, |i, j| self.sym_dual[i][j].get(a))).collect();
        let st = Matrix::from_fn(m, m, |b, a| {
            let mut s = Rat::zero();
            for i in 0..d {
                for j in 0..d {
                    let x = &t[a][(i, j)];
                    if !x.is_zero() {
                        s += x * &self.sym[i][j].get(b);
                    }
                }
            }
            s
        });
        let inv = st.inverse().ok_or_else(|| Error::Internal("S∘S*ᵀ is not invertible".into()))?;
        Ok((0..m)
            .map(|a| {
                let mut acc = Matrix::zeros(d, d);
                for (b, tb) in t.iter().enumerate() {
                    let c = &inv[(b, a)];
                    if !c.is_zero() {
                        acc = &acc + &tb.scale(c);
                    }
                }
                acc
            })
            .collect())
    }

    fn section_of(&self, m: &[Rat]) -> Matrix {
        let mut acc = Matrix::zeros(self.dim_e, self.dim_e);
        for (a, c) in m.iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &self.section[a].scale(c);
            }
        }
        acc
    }

    pub fn descriptor(&self) -> Descriptor {
        self.desc
    }

    pub fn family(&self) -> Family {
        self.desc.family
    }

    pub fn n(&self) -> usize {
        self.desc.n
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn embed_scale(&self) -> &Rat {
        &self.embed_scale
    }

    pub fn g_basis(&self) -> &[Matrix] {
        &self.g_basis
    }

    pub fn g_span(&self) -> &SpanBasis {
        &self.g_span
    }

    /// The metric `η` of the Opq family as a diagonal.
    pub fn eta(&self) -> Option<Vec<Rat>> {
        match self.desc.family {
            Family::Opq => Some(eta(self.desc.p.unwrap(), self.desc.q.unwrap())),
            _ => None,
        }
    }

    /// Labels of the basis of `E` (1-based).
    pub fn e_labels(&self) -> Vec<String> {
        let n = self.desc.n;
        match self.desc.family {
            Family::Gl | Family::Opq => (1..=n).map(|i| format!("e{i}")).collect(),
            Family::Exceptional => {
                let mut v: Vec<String> = (1..=n).map(|i| format!("e_{i}")).collect();
                v.extend(Blade::all(n, 2).into_iter().map(|b| blade_label("e^", b)));
                v.extend(Blade::all(n, 5).into_iter().map(|b| blade_label("e^", b)));
                v
            }
            Family::SlWedge2 => Blade::all(n + 1, 2).into_iter().map(|b| blade_label("w", b)).collect(),
        }
    }

    fn check_len(&self, v: &[Rat], len: usize, what: &str) -> Result<()> {
        if v.len() == len {
            Ok(())
        } else {
            Err(Error::DataSetMismatch(format!("{what} has length {}, expected {len}", v.len())))
        }
    }

    fn bilinear(&self, table: &SymTable, u: &[Rat], v: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dim_n];
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if vj.is_zero() {
                    continue;
                }
                let c = ui * vj;
                for (k, x) in table[i][j].iter() {
                    out[*k] += &c * x;
                }
            }
        }
        out
    }

    /// `(u ⊗ v)_N`.
    pub fn sym_to_n(&self, u: &[Rat], v: &[Rat]) -> Result<Vec<Rat>> {
        self.check_len(u, self.dim_e, "E vector")?;
        self.check_len(v, self.dim_e, "E vector")?;
        Ok(self.bilinear(&self.sym, u, v))
    }

    /// `(ξ ⊗ η)_{N*}` with coefficient one.
    pub fn sym_to_nstar(&self, xi: &[Rat], eta: &[Rat]) -> Result<Vec<Rat>> {
        self.check_len(xi, self.dim_e, "E* vector")?;
        self.check_len(eta, self.dim_e, "E* vector")?;
        Ok(self.bilinear(&self.sym_dual, xi, eta))
    }

    /// `S(Q) = Σ Q_{ij} S(e_i, e_j)` for a (not necessarily symmetric)
    /// tensor `Q ∈ E ⊗ E`.
    pub fn sym_of_tensor(&self, q: &Matrix) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dim_n];
        for i in 0..self.dim_e {
            for j in 0..self.dim_e {
                let c = &q[(i, j)];
                if c.is_zero() {
                    continue;
                }
                for (k, x) in self.sym[i][j].iter() {
                    out[*k] += c * x;
                }
            }
        }
        out
    }

    /// `embed_scale · s(m)` as a symmetric `dimE × dimE` matrix.
    pub fn n_to_sym(&self, m: &[Rat]) -> Result<Matrix> {
        self.check_len(m, self.dim_n, "N vector")?;
        if self.dim_n == 0 {
            return Ok(Matrix::zeros(self.dim_e, self.dim_e));
        }
        Ok(self.section_of(m).scale(&self.embed_scale))
    }

    /// `(ξ ⊗ m)_E`: contraction of `ξ` with the first slot of `N_to_sym(m)`.
    pub fn xi_n_to_e(&self, xi: &[Rat], m: &[Rat]) -> Result<Vec<Rat>> {
        self.check_len(xi, self.dim_e, "E* vector")?;
        let q = self.n_to_sym(m)?;
        Ok((0..self.dim_e).map(|j| (0..self.dim_e).map(|i| &xi[i] * &q[(i, j)]).sum()).collect())
    }

    /// Action of an endomorphism on `N`, pushed through the embedding:
    /// `M·m = S(M s(m) + s(m) Mᵀ)`.
    pub fn act_n(&self, m_op: &Matrix, m: &[Rat]) -> Result<Vec<Rat>> {
        self.check_len(m, self.dim_n, "N vector")?;
        if self.dim_n == 0 {
            return Ok(Vec::new());
        }
        let q = self.section_of(m);
        let moved = &(m_op * &q) + &(&q * &m_op.transpose());
        Ok(self.sym_of_tensor(&moved))
    }

    /// Matrix of `act_n(M, ·)` on `N`.
    pub fn act_n_matrix(&self, m_op: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.dim_n, self.dim_n);
        for a in 0..self.dim_n {
            let img = self.act_n(m_op, &unit(self.dim_n, a)).expect("lengths agree");
            for (b, x) in img.into_iter().enumerate() {
                out[(b, a)] = x;
            }
        }
        out
    }

    /// `π′` with coefficient-one embedding:
    /// `π′₁(A)^i_l = Σ_{j,k} P^{ij}_{kl} A^k_j` with `P = s ∘ S`.
    pub fn pi_prime_unit(&self, a: &Matrix) -> Result<Matrix> {
        let d = self.dim_e;
        if a.rows() != d || a.cols() != d {
            return Err(Error::Dimension { expected: d, found: a.rows() });
        }
        let mut out = Matrix::zeros(d, d);
        if self.dim_n == 0 {
            return Ok(out);
        }
        for k in 0..d {
            let row = a.row(k);
            if is_zero_vec(row) {
                continue;
            }
            for l in 0..d {
                let r = &self.composition[k * d + l];
                for i in 0..d {
                    let s: Rat = (0..d).filter(|&j| !row[j].is_zero()).map(|j| &r[(i, j)] * &row[j]).sum();
                    if !s.is_zero() {
                        out[(i, l)] += s;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pi_prime(&self, a: &Matrix) -> Result<Matrix> {
        Ok(self.pi_prime_unit(a)?.scale(&self.embed_scale))
    }

    pub fn pi(&self, a: &Matrix) -> Result<Matrix> {
        Ok(a - &self.pi_prime(a)?)
    }

    /// Solves for the unique `c` with `A − c·π′₁(A) ∈ g` for every matrix
    /// unit. Families with `N = 0` return 1 by convention.
    pub fn calibrate(&self) -> Result<Rat> {
        let d = self.dim_e;
        if self.dim_n == 0 {
            return Ok(Rat::one());
        }
        let units: Vec<(usize, usize)> = (0..d).flat_map(|k| (0..d).map(move |j| (k, j))).collect();
        let residuals: Vec<(Vec<Rat>, Vec<Rat>)> = units
            .par_iter()
            .map(|&(k, j)| {
                let a = Matrix::unit(d, k, j);
                let p = self.pi_prime_unit(&a).expect("square");
                (self.g_span.residual(a.as_slice()), self.g_span.residual(p.as_slice()))
            })
            .collect();
        // r = c q for every unit
        let mut c: Option<Rat> = None;
        for (r, q) in &residuals {
            if let Some(pos) = q.iter().position(|x| !x.is_zero()) {
                c = Some(&r[pos] / &q[pos]);
                break;
            }
        }
        let Some(c) = c else {
            return if residuals.iter().all(|(r, _)| is_zero_vec(r)) {
                Err(Error::CalibrationNotUnique("π′ maps every matrix unit into g; any scale works".into()))
            } else {
                Err(Error::NotAdmissible("π′ vanishes modulo g but End(E) ⊄ g".into()))
            };
        };
        for ((k, j), (r, q)) in units.iter().zip(&residuals) {
            let ok = r.iter().zip(q).all(|(x, y)| x == &(&c * y));
            if !ok {
                return Err(Error::NotAdmissible(format!("matrix unit E[{},{}] admits no common scale", k + 1, j + 1)));
            }
        }
        Ok(c)
    }

    /// Expresses `π(A)` in `g`-coordinates for every matrix unit, using the
    /// stored scale and generators; also checks that the generators are
    /// independent and closed under commutators.
    pub fn check_admissible(&self) -> AdmissibilityCertificate {
        let d = self.dim_e;
        let g_independent = self.g_span.rank() == self.g_basis.len();
        let g_closed = self.check_g_closed().is_none();
        let units: Vec<(usize, usize)> = (0..d).flat_map(|k| (0..d).map(move |j| (k, j))).collect();
        let coords: Vec<Option<Vec<Rat>>> = units
            .par_iter()
            .map(|&(k, j)| {
                let pa = self.pi(&Matrix::unit(d, k, j)).expect("square");
                self.g_span.coordinates(pa.as_slice())
            })
            .collect();
        let mut coordinates = Vec::new();
        let mut witness = None;
        for (&(k, j), c) in units.iter().zip(coords) {
            match c {
                Some(c) => coordinates.push((k + 1, j + 1, SparseVec::from_dense(&c).0.into_iter().map(|(i, x)| (i + 1, x)).collect())),
                None => {
                    if witness.is_none() {
                        witness = Some((k + 1, j + 1));
                    }
                }
            }
        }
        AdmissibilityCertificate {
            passed: witness.is_none() && g_independent && g_closed,
            embed_scale: self.embed_scale.clone(),
            coordinates,
            witness,
            g_independent,
            g_closed,
        }
    }

    /// First pair of generators whose commutator leaves `span(g)`.
    pub fn check_g_closed(&self) -> Option<(usize, usize)> {
        let k = self.g_basis.len();
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
        pairs
            .par_iter()
            .find_first(|&&(i, j)| !self.g_span.contains(self.g_basis[i].commutator(&self.g_basis[j]).as_slice()))
            .copied()
    }

    /// Checks `S(x·u, v) + S(u, x·v) = x·S(u, v)` for every generator and
    /// basis pair, and the dual statement for `S*` under the contragredient
    /// action. Returns the first failure.
    pub fn check_equivariance(&self) -> Option<String> {
        let d = self.dim_e;
        self.g_basis.par_iter().enumerate().find_map_first(|(gi, x)| {
            let xn = self.act_n_matrix(x);
            let xt = x.transpose();
            for i in 0..d {
                for j in i..d {
                    let (ei, ej) = (unit(d, i), unit(d, j));
                    let lhs: Vec<Rat> = {
                        let a = self.bilinear(&self.sym, &x.column(i), &ej);
                        let b = self.bilinear(&self.sym, &ei, &x.column(j));
                        a.iter().zip(&b).map(|(p, q)| p + q).collect()
                    };
                    let rhs = xn.mul_vec(&self.sym[i][j].to_dense(self.dim_n));
                    if lhs != rhs {
                        return Some(format!("S not equivariant for generator {gi} on basis pair ({}, {})", i + 1, j + 1));
                    }
                    // dual side: x acts on E* by −xᵀ; S* must intertwine
                    // with the dual action on N*, which is −(x_N)ᵀ
                    let a = self.bilinear(&self.sym_dual, &xt.column(i), &ej);
                    let b = self.bilinear(&self.sym_dual, &ei, &xt.column(j));
                    let lhs: Vec<Rat> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
                    let rhs = xn.transpose().mul_vec(&self.sym_dual[i][j].to_dense(self.dim_n));
                    if lhs != rhs {
                        return Some(format!("S* not equivariant for generator {gi} on basis pair ({}, {})", i + 1, j + 1));
                    }
                }
            }
            None
        })
    }

    /// `π ∘ π − π` and `π′ ∘ π′ − π′` on every matrix unit: returns the first
    /// unit where either is nonzero.
    pub fn projector_defect(&self) -> Option<(usize, usize)> {
        let d = self.dim_e;
        let units: Vec<(usize, usize)> = (0..d).flat_map(|k| (0..d).map(move |j| (k, j))).collect();
        units
            .par_iter()
            .find_first(|&&(k, j)| {
                let a = Matrix::unit(d, k, j);
                let p = self.pi(&a).unwrap();
                let pp = self.pi_prime(&a).unwrap();
                self.pi(&p).unwrap() != p || self.pi_prime(&pp).unwrap() != pp
            })
            .map(|&(k, j)| (k + 1, j + 1))
    }

    /// A short fingerprint of the data set used in reports.
    pub fn summary(&self) -> DataSetJson {
        DataSetJson {
            family: self.desc.family,
            n: self.desc.n,
            p: self.desc.p,
            q: self.desc.q,
            dim_e: self.dim_e,
            dim_n: self.dim_n,
            embed_scale: self.embed_scale.clone(),
            g_basis: Vec::new(),
        }
    }

    pub fn to_json(&self) -> DataSetJson {
        DataSetJson { g_basis: self.g_basis.clone(), ..self.summary() }
    }

    pub fn from_json(j: &DataSetJson) -> Result<DataSet> {
        let desc = Descriptor { family: j.family, n: j.n, p: j.p, q: j.q };
        let ds = DataSet::from_parts(desc, j.embed_scale.clone(), j.g_basis.clone())?;
        if ds.dim_e != j.dim_e || ds.dim_n != j.dim_n {
            return Err(Error::DataSetMismatch(format!(
                "stored dimensions ({}, {}) disagree with ({}, {})",
                j.dim_e, j.dim_n, ds.dim_e, ds.dim_n
            )));
        }
        Ok(ds)
    }
}

/// On-disk form of a data set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataSetJson {
    pub family: Family,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(rename = "dimE")]
    pub dim_e: usize,
    #[serde(rename = "dimN")]
    pub dim_n: usize,
    pub embed_scale: Rat,
    #[serde(default)]
    pub g_basis: Vec<Matrix>,
}
