//! Subspaces of `E` and `E*`: isotropy and coisotropy, (co-)Lagrangian
//! tests, and the normal forms of null vectors, Lagrangian subspaces and
//! co-Lagrangian/Lagrangian pairs in the exceptional family.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data_set::{exc_sym, DataSet, Descriptor, Family};
use crate::error::{Error, Result};
use crate::exc::{exp_nilpotent, theta, EVec, ExcElem};
use crate::exterior::{binomial, Blade, Form, Poly};
use crate::linalg::{is_zero_vec, Matrix};
use crate::rat::Rat;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub enum Ambient {
    #[serde(rename = "E")]
    E,
    #[serde(rename = "Edual")]
    EDual,
}

impl Ambient {
    pub fn dual(self) -> Ambient {
        match self {
            Ambient::E => Ambient::EDual,
            Ambient::EDual => Ambient::E,
        }
    }
}

/// A subspace stored by its reduced row-echelon basis, so equal subspaces
/// compare equal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    ambient: Ambient,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(ambient: Ambient, dim: usize, rows: &[Vec<Rat>]) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::Dimension { expected: dim, found: r.len() });
        }
        Ok(Self::span(ambient, dim, rows))
    }

    fn span(ambient: Ambient, dim: usize, rows: &[Vec<Rat>]) -> Self {
        if rows.is_empty() {
            return Subspace { ambient, basis: Matrix::zeros(0, dim), pivots: Vec::new() };
        }
        let r = Matrix::from_rows(rows.to_vec()).rref();
        Subspace { ambient, basis: r.matrix, pivots: r.pivots }
    }

    pub fn zero(ambient: Ambient, dim: usize) -> Self {
        Self::span(ambient, dim, &[])
    }

    pub fn full(ambient: Ambient, dim: usize) -> Self {
        Self::span(ambient, dim, &Matrix::identity(dim).to_rows())
    }

    /// Span of coordinate vectors `e_i` for the given indices.
    pub fn coordinate(ambient: Ambient, dim: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let rows: Vec<Vec<Rat>> = idx.into_iter().map(|i| unit(dim, i)).collect();
        Self::span(ambient, dim, &rows)
    }

    pub fn from_evecs(vs: &[EVec], n: usize) -> Self {
        let rows: Vec<Vec<Rat>> = vs.iter().map(EVec::to_coords).collect();
        Self::span(Ambient::E, EVec::dim_for(n), &rows)
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim() - self.dim()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        self.basis.to_rows()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn to_evecs(&self, n: usize) -> Vec<EVec> {
        self.rows().iter().map(|r| EVec::from_coords(n, r)).collect()
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.ambient_dim());
        let mut res = v.to_vec();
        for (k, &p) in self.pivots.iter().enumerate() {
            let f = res[p].clone();
            if f.is_zero() {
                continue;
            }
            for (j, x) in self.basis.row(k).iter().enumerate() {
                if !x.is_zero() {
                    res[j] -= &f * x;
                }
            }
        }
        is_zero_vec(&res)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.to_rows().iter().all(|r| self.contains(r))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut rows = self.rows();
        rows.extend(other.rows());
        Self::span(self.ambient, self.ambient_dim(), &rows)
    }

    pub fn intersection_dim(&self, other: &Subspace) -> usize {
        self.dim() + other.dim() - self.sum(other).dim()
    }

    /// `V° ⊂ W*`, the kernel of the evaluation pairing, in dual coordinates.
    pub fn annihilator(&self) -> Subspace {
        let rows = self.basis.nullspace();
        Self::span(self.ambient.dual(), self.ambient_dim(), &rows)
    }

    /// Image under a linear map given on coordinate vectors.
    pub fn map(&self, f: impl Fn(&[Rat]) -> Result<Vec<Rat>>) -> Result<Subspace> {
        let rows = self.rows().iter().map(|r| f(r)).collect::<Result<Vec<_>>>()?;
        Subspace::new(self.ambient, self.ambient_dim(), &rows)
    }

    /// Same coordinates, other side.
    pub fn reinterpret(&self, ambient: Ambient) -> Subspace {
        Subspace { ambient, ..self.clone() }
    }

    pub fn to_json(&self, ds: &DataSet) -> SubspaceJson {
        SubspaceJson { ambient: self.ambient, dataset: ds.descriptor(), basis: self.rows() }
    }

    pub fn from_json(j: &SubspaceJson, ds: &DataSet) -> Result<Subspace> {
        if j.dataset != ds.descriptor() {
            return Err(Error::DataSetMismatch(format!("subspace belongs to {:?}, not {:?}", j.dataset, ds.descriptor())));
        }
        Subspace::new(j.ambient, ds.dim_e(), &j.basis)
    }
}

/// On-disk form of a subspace. The basis is re-reduced on load.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub ambient: Ambient,
    pub dataset: Descriptor,
    pub basis: Vec<Vec<Rat>>,
}

fn unit(d: usize, i: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); d];
    v[i] = Rat::one();
    v
}

fn require_e(ds: &DataSet, v: &Subspace) -> Result<()> {
    if v.ambient() != Ambient::E {
        return Err(Error::invalid("expected a subspace of E"));
    }
    if v.ambient_dim() != ds.dim_e() {
        return Err(Error::DataSetMismatch(format!("subspace lives in dimension {}, E has {}", v.ambient_dim(), ds.dim_e())));
    }
    Ok(())
}

fn require_exceptional(ds: &DataSet) -> Result<usize> {
    match ds.family() {
        Family::Exceptional => Ok(ds.n()),
        f => Err(Error::Unsupported(format!("this operation needs the exceptional family, got {f}"))),
    }
}

// ---------------------------------------------------------------------------
// Standard subspaces of the exceptional E = T ⊕ Λ²T* ⊕ Λ⁵T*

/// `T ⊂ E`.
pub fn tangent(n: usize) -> Subspace {
    Subspace::coordinate(Ambient::E, EVec::dim_for(n), 0..n)
}

/// `Λ²T* ⊕ Λ⁵T* ⊂ E`, the kernel of the anchor.
pub fn standard_colagrangian(n: usize) -> Subspace {
    let d = EVec::dim_for(n);
    Subspace::coordinate(Ambient::E, d, n..d)
}

/// Orbit of a Lagrangian subspace of the exceptional `E`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub enum OrbitLabel {
    #[serde(rename = "dim_n")]
    DimN,
    #[serde(rename = "dim_n_minus_1")]
    DimNMinus1,
}

impl OrbitLabel {
    pub fn dim(self, n: usize) -> usize {
        match self {
            OrbitLabel::DimN => n,
            OrbitLabel::DimNMinus1 => n - 1,
        }
    }
}

/// `T` for `DimN`; `span(e_1, …, e_{n−2}, e^{n−1}∧e^n)` for `DimNMinus1`.
pub fn canonical_lagrangian(n: usize, label: OrbitLabel) -> Subspace {
    match label {
        OrbitLabel::DimN => tangent(n),
        OrbitLabel::DimNMinus1 => {
            let mut vs: Vec<EVec> = (0..n - 2).map(|i| EVec::from_vector(&unit(n, i))).collect();
            let mut top = EVec::zero(n);
            top.s2 = Form::basis(n, &[n - 2, n - 1]);
            vs.push(top);
            Subspace::from_evecs(&vs, n)
        }
    }
}

/// Action of `P ∈ GL(T)` on `E`: vectors by `P`, forms by `P^{−T}`.
pub fn gl_apply(p: &Matrix, u: &EVec) -> Result<EVec> {
    let n = u.n();
    let inv = p.inverse().ok_or_else(|| Error::invalid("frame matrix is singular"))?;
    let vimg: Vec<Poly> = (0..n).map(|i| Poly::from_vector(&p.column(i))).collect();
    let fimg: Vec<Form> = (0..n).map(|i| Form::from_vector(inv.row(i))).collect();
    Ok(EVec { x: u.x.push_forward(n, &vimg), s2: u.s2.push_forward(n, &fimg), s5: u.s5.push_forward(n, &fimg) })
}

// ---------------------------------------------------------------------------
// Predicates

pub fn is_isotropic(ds: &DataSet, v: &Subspace) -> Result<bool> {
    require_e(ds, v)?;
    let rows = v.rows();
    for i in 0..rows.len() {
        for j in i..rows.len() {
            if !is_zero_vec(&ds.sym_to_n(&rows[i], &rows[j])?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `(V° ⊗ V°)_{N*} = 0`.
pub fn is_coisotropic_by_definition(ds: &DataSet, v: &Subspace) -> Result<bool> {
    require_e(ds, v)?;
    let rows = v.annihilator().rows();
    for i in 0..rows.len() {
        for j in i..rows.len() {
            if !is_zero_vec(&ds.sym_to_nstar(&rows[i], &rows[j])?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `(V° ⊗ N)_E`, spanned by `(ξ ⊗ m)_E` over bases of `V°` and `N`.
pub fn colagrangian_image(ds: &DataSet, v: &Subspace) -> Result<Subspace> {
    require_e(ds, v)?;
    let d = ds.dim_e();
    let xis = v.annihilator().rows();
    let mut rows = Vec::new();
    for m in 0..ds.dim_n() {
        let q = ds.n_to_sym(&unit(ds.dim_n(), m))?;
        for xi in &xis {
            rows.push((0..d).map(|j| (0..d).filter(|&i| !xi[i].is_zero()).map(|i| &xi[i] * &q[(i, j)]).sum()).collect());
        }
    }
    Ok(Subspace::span(Ambient::E, d, &rows))
}

/// `(V° ⊗ N)_E ⊂ V`.
pub fn is_coisotropic_by_lemma(ds: &DataSet, v: &Subspace) -> Result<bool> {
    Ok(v.contains_subspace(&colagrangian_image(ds, v)?))
}

/// Coisotropy by definition, cross-checked against the inclusion form.
pub fn is_coisotropic(ds: &DataSet, v: &Subspace) -> Result<bool> {
    let a = is_coisotropic_by_definition(ds, v)?;
    let b = is_coisotropic_by_lemma(ds, v)?;
    if a != b {
        return Err(Error::Internal(format!("coisotropy by definition ({a}) and by inclusion ({b}) disagree")));
    }
    Ok(a)
}

/// The two kinds of co-Lagrangian subspaces of `Λ²W`: `Λ²U` for a
/// hyperplane `U` and `(Λ²Ξ)°` for a 3-dimensional `Ξ ⊂ W*`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum SlWedgeColagrangian {
    #[serde(rename = "hyperplane")]
    Hyperplane,
    #[serde(rename = "three_plane")]
    ThreePlane,
}

/// Dimension of `{i-th basis 1-vector combination c : Σ c_i op(i, g) = 0 ∀g}`.
fn common_kernel_dim<T>(w: usize, gens: &[T], op: impl Fn(usize, &T) -> Vec<Rat>) -> usize {
    if gens.is_empty() {
        return w;
    }
    let cols: Vec<Vec<Rat>> = (0..w).map(|i| gens.iter().flat_map(|g| op(i, g)).collect()).collect();
    let m = Matrix::from_fn(cols[0].len(), w, |r, c| cols[c][r].clone());
    w - m.rank()
}

/// Classifies a co-Lagrangian subspace of the SLwedge2 family, or `None`.
pub fn slwedge2_colagrangian_type(ds: &DataSet, v: &Subspace) -> Result<Option<SlWedgeColagrangian>> {
    require_e(ds, v)?;
    if ds.family() != Family::SlWedge2 {
        return Err(Error::Unsupported("SLwedge2 classification on another family".into()));
    }
    let n = ds.n();
    let w = n + 1;
    if ds.dim_n() == 0 {
        return Ok(None);
    }
    let polys: Vec<Poly> = v.rows().iter().map(|r| Poly::from_coords(w, 2, r)).collect();
    let k1 = common_kernel_dim(w, &polys, |i, p| p.interior(&Form::basis(w, &[i])).to_coords());
    if k1 == 1 && v.dim() == binomial(n, 2) {
        return Ok(Some(SlWedgeColagrangian::Hyperplane));
    }
    let forms: Vec<Form> = v.annihilator().rows().iter().map(|r| Form::from_coords(w, 2, r)).collect();
    let k2 = common_kernel_dim(w, &forms, |i, f| f.interior(&Poly::basis(w, &[i])).to_coords());
    if forms.len() == 3 && k2 == w - 3 {
        return Ok(Some(SlWedgeColagrangian::ThreePlane));
    }
    Ok(None)
}

/// Minimal coisotropic.
pub fn is_colagrangian(ds: &DataSet, v: &Subspace) -> Result<bool> {
    require_e(ds, v)?;
    if ds.dim_n() == 0 {
        return Ok(v.dim() == 0);
    }
    match ds.family() {
        Family::Exceptional => Ok(colagrangian_image(ds, v)? == *v),
        Family::SlWedge2 => Ok(slwedge2_colagrangian_type(ds, v)?.is_some()),
        Family::Opq => {
            let d = ds.descriptor();
            Ok(is_coisotropic(ds, v)? && v.dim() == d.p.unwrap().max(d.q.unwrap()))
        }
        Family::Gl => Ok(v.dim() == 0),
    }
}

/// Maximal isotropic.
pub fn is_lagrangian(ds: &DataSet, v: &Subspace) -> Result<bool> {
    require_e(ds, v)?;
    if ds.dim_n() == 0 {
        return Ok(v.dim() == ds.dim_e());
    }
    if !is_isotropic(ds, v)? {
        return Ok(false);
    }
    match ds.family() {
        Family::Exceptional => match normalize_lagrangian(ds, v) {
            Ok(_) => Ok(true),
            Err(Error::NotLagrangian(_)) => Ok(false),
            Err(e) => Err(e),
        },
        Family::Opq => {
            let d = ds.descriptor();
            Ok(v.dim() == d.p.unwrap().min(d.q.unwrap()))
        }
        Family::SlWedge2 => {
            let n = ds.n();
            let w = n + 1;
            let polys: Vec<Poly> = v.rows().iter().map(|r| Poly::from_coords(w, 2, r)).collect();
            if v.dim() == n {
                let k = common_kernel_dim(w, &polys, |i, p| Poly::basis(w, &[i]).wedge(p).to_coords());
                if k >= 1 {
                    return Ok(true);
                }
            }
            if v.dim() == 3 {
                let k = common_kernel_dim(w, &polys, |i, p| p.interior(&Form::basis(w, &[i])).to_coords());
                if k + 3 >= w {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Family::Gl => Ok(v.dim() == ds.dim_e()),
    }
}

// ---------------------------------------------------------------------------
// Group words

/// A product of exponentials of nilpotent generators; `steps[0]` acts first.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GroupWord {
    pub n: usize,
    pub steps: Vec<ExcElem>,
}

impl GroupWord {
    pub fn new(n: usize) -> Self {
        GroupWord { n, steps: Vec::new() }
    }

    /// Appends a generator; zero generators are dropped.
    pub fn push(&mut self, g: ExcElem) -> Result<()> {
        if g.n != self.n {
            return Err(Error::Dimension { expected: self.n, found: g.n });
        }
        if g.is_zero() {
            return Ok(());
        }
        if g.piece().is_none() {
            return Err(Error::invalid("group word entries must lie in a single nilpotent piece"));
        }
        self.steps.push(g);
        Ok(())
    }

    pub fn extend(&mut self, other: &GroupWord) -> Result<()> {
        for g in &other.steps {
            self.push(g.clone())?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn check(&self) -> Result<()> {
        let mut w = GroupWord::new(self.n);
        for g in &self.steps {
            g.check()?;
            w.push(g.clone())?;
        }
        Ok(())
    }

    pub fn apply(&self, u: &EVec) -> Result<EVec> {
        let mut out = u.clone();
        for g in &self.steps {
            out = exp_nilpotent(g, &out)?;
        }
        Ok(out)
    }

    pub fn apply_coords(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        Ok(self.apply(&EVec::from_coords(self.n, v))?.to_coords())
    }

    /// Image of a subspace of `E`, or of `E*` under the contragredient action.
    pub fn apply_subspace(&self, v: &Subspace) -> Result<Subspace> {
        if v.ambient_dim() != EVec::dim_for(self.n) {
            return Err(Error::Dimension { expected: EVec::dim_for(self.n), found: v.ambient_dim() });
        }
        match v.ambient() {
            Ambient::E => v.map(|r| self.apply_coords(r)),
            Ambient::EDual => v.map(|r| self.theta().apply_coords(r)),
        }
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord { n: self.n, steps: self.steps.iter().rev().map(ExcElem::neg).collect() }
    }

    /// The word acting on `E*` in dual coordinates, written as a word on `E`.
    pub fn theta(&self) -> GroupWord {
        GroupWord { n: self.n, steps: self.steps.iter().map(theta).collect() }
    }
}

fn random_coeff<R: Rng>(rng: &mut R) -> Rat {
    let mut num = rng.gen_range(-3i64..=2);
    if num >= 0 {
        num += 1;
    }
    Rat::new(num, rng.gen_range(1i64..=2))
}

fn random_element<S: crate::exterior::Slot, R: Rng>(n: usize, k: usize, rng: &mut R) -> crate::exterior::Ext<S> {
    let blades = Blade::all(n, k);
    let mut out = crate::exterior::Ext::zero(n, k);
    for _ in 0..rng.gen_range(1..=2) {
        out.add_term(blades[rng.gen_range(0..blades.len())], random_coeff(rng));
    }
    if out.is_zero() {
        out.add_term(blades[0], Rat::one());
    }
    out
}

/// A random nonzero generator in one of the nilpotent pieces available at
/// this `n` (`a₃`, `w₃`, and for `n = 6` also `a₆`, `w₆`).
pub fn random_generator<R: Rng>(n: usize, rng: &mut R) -> ExcElem {
    let pieces = if n >= 6 { 4 } else { 2 };
    match rng.gen_range(0..pieces) {
        0 => ExcElem::from_a3(random_element(n, 3, rng)),
        1 => ExcElem::from_w3(random_element(n, 3, rng)),
        2 => ExcElem::from_a6(random_element(n, 6, rng)),
        _ => ExcElem::from_w6(random_element(n, 6, rng)),
    }
}

pub fn random_word<R: Rng>(n: usize, len: usize, rng: &mut R) -> GroupWord {
    let mut w = GroupWord::new(n);
    for _ in 0..len {
        w.push(random_generator(n, rng)).expect("generators are pure");
    }
    w
}

// ---------------------------------------------------------------------------
// Null vectors

pub fn is_null(u: &EVec) -> bool {
    pair_null(u, u)
}

fn pair_null(u: &EVec, v: &EVec) -> bool {
    let s = exc_sym(u, v);
    s.n1.is_zero() && s.n4.is_zero() && s.n7.is_zero()
}

fn in_tangent(u: &EVec) -> bool {
    u.s2.is_zero() && u.s5.is_zero()
}

/// One round of the null-vector reduction: the generators to apply next.
fn null_step(u: &EVec) -> Result<Vec<ExcElem>> {
    let n = u.n();
    let xc = u.x.to_coords();
    if let Some(i) = xc.iter().position(|c| !c.is_zero()) {
        let xi = Form::basis(n, &[i]).scale(&xc[i].recip().unwrap());
        let a3 = ExcElem::from_a3(u.s2.wedge(&xi).neg());
        let after = exp_nilpotent(&a3, u)?;
        if !after.s2.is_zero() {
            return Err(Error::Internal("the 3-form step left a 2-form part".into()));
        }
        let a6 = ExcElem::from_a6(after.s5.wedge(&xi));
        return Ok(vec![a3, a6]);
    }
    if !u.s2.is_zero() {
        if !u.s2.wedge(&u.s2).is_zero() {
            return Err(Error::NotNull("2-form part is not decomposable".into()));
        }
        let (b, c) = u.s2.terms().next().unwrap();
        let o = Poly::from_blade(n, b, c.recip().unwrap());
        let m = Matrix::from_fn(n, n, |k, j| u.s2.interior(&Poly::basis(n, &[j])).coeff(Blade::single(k)));
        let y = m.nullspace().into_iter().next().ok_or_else(|| Error::Internal("2-form has trivial kernel".into()))?;
        return Ok(vec![ExcElem::from_w3(o.wedge(&Poly::from_vector(&y)))]);
    }
    let b = Blade::all(n, 3)
        .into_iter()
        .find(|b| !u.s5.interior(&Poly::from_blade(n, *b, Rat::one())).is_zero())
        .ok_or_else(|| Error::Internal("no trivector contracts the 5-form".into()))?;
    Ok(vec![ExcElem::from_w3(Poly::from_blade(n, b, Rat::one()))])
}

/// Moves a nonzero null vector into `T` with nilpotent steps. Returns the
/// word and the resulting vector.
pub fn normalize_null(u: &EVec) -> Result<(GroupWord, EVec)> {
    let n = u.n();
    if u.is_zero() {
        return Err(Error::invalid("cannot normalise the zero vector"));
    }
    if !is_null(u) {
        return Err(Error::NotNull("(u ⊗ u)_N ≠ 0".into()));
    }
    let mut word = GroupWord::new(n);
    let mut cur = u.clone();
    // at most: 5-form → 2-form → vector → T
    for _ in 0..4 {
        if in_tangent(&cur) {
            return Ok((word, cur));
        }
        for g in null_step(&cur)? {
            cur = exp_nilpotent(&g, &cur)?;
            word.push(g)?;
        }
    }
    Err(Error::Internal("null vector did not reach T".into()))
}

// ---------------------------------------------------------------------------
// Lagrangian normal form

/// An embedding of `E(m)` into `E(n)` through dual frames `u_a ∈ T`,
/// `f^a ∈ T*` with `⟨f^a, u_b⟩ = δ`.
#[derive(Clone, Debug)]
struct Frame {
    n: usize,
    us: Vec<Poly>,
    fs: Vec<Form>,
}

impl Frame {
    fn standard(n: usize) -> Self {
        Frame { n, us: (0..n).map(|i| Poly::basis(n, &[i])).collect(), fs: (0..n).map(|i| Form::basis(n, &[i])).collect() }
    }

    fn m(&self) -> usize {
        self.us.len()
    }

    fn pull_form(&self, s: &Form, k: usize) -> Form {
        let m = self.m();
        let coords: Vec<Rat> = Blade::all(m, k)
            .into_iter()
            .map(|b| s.pairing(&Poly::from_blade(m, b, Rat::one()).push_forward(self.n, &self.us)).expect("degrees agree"))
            .collect();
        Form::from_coords(m, k, &coords)
    }

    fn pull(&self, u: &EVec) -> EVec {
        let x: Vec<Rat> = self.fs.iter().map(|f| f.pairing(&u.x).expect("degree one")).collect();
        EVec { x: Poly::from_vector(&x), s2: self.pull_form(&u.s2, 2), s5: self.pull_form(&u.s5, 5) }
    }

    fn push(&self, u: &EVec) -> EVec {
        EVec {
            x: u.x.push_forward(self.n, &self.us),
            s2: u.s2.push_forward(self.n, &self.fs),
            s5: u.s5.push_forward(self.n, &self.fs),
        }
    }

    fn push_gen(&self, g: &ExcElem) -> ExcElem {
        let mut out = ExcElem::zero(self.n);
        out.a3 = g.a3.push_forward(self.n, &self.fs);
        out.a6 = g.a6.push_forward(self.n, &self.fs);
        out.w3 = g.w3.push_forward(self.n, &self.us);
        out.w6 = g.w6.push_forward(self.n, &self.us);
        out
    }

    /// Drops `u_i` and projects the coframe onto the annihilator of `X`.
    fn restrict(&self, i: usize, x: &[Rat]) -> Frame {
        let mut us = Vec::new();
        let mut fs = Vec::new();
        for a in 0..self.m() {
            if a == i {
                continue;
            }
            us.push(self.us[a].clone());
            fs.push(self.fs[a].sub(&self.fs[i].scale(&(&x[a] / &x[i]))));
        }
        Frame { n: self.n, us, fs }
    }
}

/// Result of the Lagrangian normalisation: `word · W = frame · canonical`,
/// with `frame ∈ GL(T)` acting as in [`gl_apply`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LagrangianNormalForm {
    pub label: OrbitLabel,
    pub word: GroupWord,
    pub frame: Matrix,
    #[serde(skip)]
    pub normalized: Subspace,
}

/// Lagrangian normal form for a subspace of the exceptional `E`.
pub fn normalize_lagrangian(ds: &DataSet, w: &Subspace) -> Result<LagrangianNormalForm> {
    let n = require_exceptional(ds)?;
    require_e(ds, w)?;
    normalize_lagrangian_vectors(n, &w.to_evecs(n))
}

/// Lagrangian normal form for the span of `gens` in `E(n)`, any `n >= 2`.
pub fn normalize_lagrangian_vectors(n: usize, gens: &[EVec]) -> Result<LagrangianNormalForm> {
    if n < 2 {
        return Err(Error::Unsupported(format!("Lagrangian normal form needs n >= 2, got {n}")));
    }
    if let Some(g) = gens.iter().find(|g| g.n() != n) {
        return Err(Error::Dimension { expected: n, found: g.n() });
    }
    let w = Subspace::from_evecs(gens, n);
    let vs = w.to_evecs(n);
    for i in 0..vs.len() {
        for j in i..vs.len() {
            if !pair_null(&vs[i], &vs[j]) {
                return Err(Error::NotIsotropic(format!("basis vectors {} and {} pair nontrivially", i + 1, j + 1)));
            }
        }
    }
    let not_lagrangian = || Error::NotLagrangian(format!("isotropic subspace of dimension {} extends to a larger one", w.dim()));

    let mut word = GroupWord::new(n);
    let mut frame = Frame::standard(n);
    let mut fixed: Vec<Vec<Rat>> = Vec::new();
    let mut cur = vs;
    while frame.m() > 2 {
        let m = frame.m();
        if cur.is_empty() {
            return Err(not_lagrangian());
        }
        let pulled: Vec<EVec> = cur.iter().map(|u| frame.pull(u)).collect();
        let rows = Subspace::from_evecs(&pulled, m).to_evecs(m);
        let (local, x) = normalize_null(&rows[0])?;
        let mut omega = frame.push(&rows[0]);
        let mut rest: Vec<EVec> = rows[1..].iter().map(|r| frame.push(r)).collect();
        for g in &local.steps {
            let g = frame.push_gen(g);
            omega = exp_nilpotent(&g, &omega)?;
            rest = rest.iter().map(|u| exp_nilpotent(&g, u)).collect::<Result<_>>()?;
            word.push(g)?;
        }
        let x_n = frame.push(&x);
        if omega != x_n {
            return Err(Error::Internal("pushed null-vector word disagrees with the local one".into()));
        }
        let xc = x.x.to_coords();
        let i = xc.iter().position(|c| !c.is_zero()).expect("normalised vector is nonzero");
        let next_frame = frame.restrict(i, &xc);
        let mut next = Vec::with_capacity(rest.len());
        for u in rest {
            let lam = &frame.pull(&u).x.coeff(Blade::single(i)) / &xc[i];
            let v = u.add(&x_n.scale(&-lam));
            if next_frame.push(&next_frame.pull(&v)) != v {
                return Err(Error::Internal("generator does not lie in the complement after the shift".into()));
            }
            next.push(v);
        }
        fixed.push(x_n.x.to_coords());
        frame = next_frame;
        cur = next;
    }

    let pulled: Vec<EVec> = cur.iter().map(|u| frame.pull(u)).collect();
    let base = Subspace::from_evecs(&pulled, 2);
    let label = if base == tangent(2) {
        OrbitLabel::DimN
    } else if base == standard_colagrangian(2) {
        OrbitLabel::DimNMinus1
    } else {
        return Err(not_lagrangian());
    };
    let mut cols = fixed;
    cols.extend(frame.us.iter().map(Poly::to_coords));
    let p = Matrix::from_fn(n, n, |r, c| cols[c][r].clone());
    let normalized = canonical_lagrangian(n, label)
        .map(|r| Ok(gl_apply(&p, &EVec::from_coords(n, r))?.to_coords()))?;
    if word.apply_subspace(&w)? != normalized {
        return Err(Error::Internal("Lagrangian word does not reach the normal form".into()));
    }
    Ok(LagrangianNormalForm { label, word, frame: p, normalized })
}

// ---------------------------------------------------------------------------
// Pairs

/// A word taking a complementary pair (co-Lagrangian `V` of codimension
/// `n`, Lagrangian `W`) to `(Λ²T* ⊕ Λ⁵T*, T)`.
pub fn normalize_pair(ds: &DataSet, v: &Subspace, w: &Subspace) -> Result<GroupWord> {
    let n = require_exceptional(ds)?;
    require_e(ds, v)?;
    require_e(ds, w)?;
    let d = ds.dim_e();
    if v.codim() != n {
        return Err(Error::Hypothesis(format!("V has codimension {}, expected {n}", v.codim())));
    }
    if !is_colagrangian(ds, v)? {
        return Err(Error::Hypothesis("V is not co-Lagrangian".into()));
    }
    if w.dim() != n || !is_isotropic(ds, w)? {
        return Err(Error::Hypothesis(format!("W must be an isotropic subspace of dimension {n}")));
    }
    if v.sum(w).dim() != d {
        return Err(Error::Hypothesis("V and W are not complementary".into()));
    }

    // V° is Lagrangian in E*; in dual coordinates it is a Lagrangian of E
    let vo = v.annihilator().reinterpret(Ambient::E);
    let nf = normalize_lagrangian_vectors(n, &vo.to_evecs(n))
        .map_err(|e| Error::Hypothesis(format!("annihilator of V is not Lagrangian: {e}")))?;
    if nf.label != OrbitLabel::DimN {
        return Err(Error::Hypothesis("annihilator of V is in the wrong orbit".into()));
    }
    let mut word = nf.word.theta();
    if word.apply_subspace(v)? != standard_colagrangian(n) {
        return Err(Error::Internal("dual normalisation did not reach Λ²T* ⊕ Λ⁵T*".into()));
    }

    // W is now a graph X ↦ X + B₂(X) + B₅(X) over T
    let w1 = word.apply_subspace(w)?;
    if w1.pivots() != (0..n).collect::<Vec<_>>().as_slice() {
        return Err(Error::Hypothesis("W is not complementary to the normalised V".into()));
    }
    let mut rows = w1.to_evecs(n);
    let mut a3 = Form::zero(n, 3);
    for (i, r) in rows.iter().enumerate() {
        a3.add_assign_ext(&Form::basis(n, &[i]).wedge(&r.s2));
    }
    let step3 = ExcElem::from_a3(a3.scale(&Rat::new(-1, 3)));
    rows = rows.iter().map(|u| exp_nilpotent(&step3, u)).collect::<Result<_>>()?;
    let mut a6 = Form::zero(n, 6);
    for (i, r) in rows.iter().enumerate() {
        a6.add_assign_ext(&Form::basis(n, &[i]).wedge(&r.s5));
    }
    let step6 = ExcElem::from_a6(a6.scale(&Rat::new(-1, 6)));
    word.push(step3)?;
    word.push(step6)?;

    if word.apply_subspace(w)? != tangent(n) || word.apply_subspace(v)? != standard_colagrangian(n) {
        return Err(Error::Internal("pair word does not reach (Λ²T* ⊕ Λ⁵T*, T)".into()));
    }
    Ok(word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_set::Descriptor;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn exc(n: usize) -> DataSet {
        DataSet::build(Descriptor::exceptional(n)).unwrap()
    }

    fn r(n: i64) -> Rat {
        Rat::int(n)
    }

    #[test]
    fn annihilator_examples() {
        let ds = DataSet::build(Descriptor::onn(2)).unwrap();
        let e = Subspace::full(Ambient::E, 4);
        assert_eq!(e.annihilator().dim(), 0);
        let v = Subspace::coordinate(Ambient::E, 4, [0]);
        assert_eq!(v.annihilator().dim(), 3);
        assert_eq!(v.annihilator().ambient(), Ambient::EDual);
        let w = Subspace::new(Ambient::E, 4, &[vec![r(1), r(2), r(0), r(-1)], vec![r(0), r(1), r(1), r(3)]]).unwrap();
        assert_eq!(w.annihilator().annihilator(), w);
        assert!(is_isotropic(&ds, &Subspace::zero(Ambient::E, 4)).unwrap());
    }

    #[test]
    fn rref_is_canonical() {
        let a = Subspace::new(Ambient::E, 3, &[vec![r(1), r(1), r(0)], vec![r(0), r(1), r(1)]]).unwrap();
        let b = Subspace::new(Ambient::E, 3, &[vec![r(1), r(2), r(1)], vec![r(2), r(1), r(-1)]]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn standard_exceptional_subspaces() {
        for n in 3..=5 {
            let ds = exc(n);
            assert!(is_isotropic(&ds, &tangent(n)).unwrap());
            let v = standard_colagrangian(n);
            assert!(is_coisotropic(&ds, &v).unwrap());
            assert!(is_colagrangian(&ds, &v).unwrap());
            assert_eq!(v.codim(), n);
            assert!(!is_colagrangian(&ds, &Subspace::full(Ambient::E, ds.dim_e())).unwrap());
            // strictly larger coisotropic subspace
            let bigger = v.sum(&Subspace::coordinate(Ambient::E, ds.dim_e(), [0]));
            assert!(is_coisotropic(&ds, &bigger).unwrap());
            assert!(!is_colagrangian(&ds, &bigger).unwrap());
        }
    }

    #[test]
    fn gl_every_subspace_is_coisotropic() {
        let ds = DataSet::build(Descriptor::gl(3)).unwrap();
        let v = Subspace::new(Ambient::E, 3, &[vec![r(1), r(-2), r(5)]]).unwrap();
        assert!(is_coisotropic(&ds, &v).unwrap());
        assert!(!is_colagrangian(&ds, &v).unwrap());
        assert!(is_colagrangian(&ds, &Subspace::zero(Ambient::E, 3)).unwrap());
    }

    #[test]
    fn coisotropy_definition_matches_inclusion_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sets =
            [Descriptor::exceptional(4), Descriptor::onn(3), Descriptor::opq(2, 3), Descriptor::slwedge2(4)];
        for desc in sets {
            let ds = DataSet::build(desc).unwrap();
            let d = ds.dim_e();
            for trial in 0..30 {
                // sparse random spans hit both outcomes
                let k = rng.gen_range(0..=d);
                let rows: Vec<Vec<Rat>> = (0..k)
                    .map(|_| {
                        let mut v = vec![Rat::zero(); d];
                        let i = rng.gen_range(0..d);
                        v[i] = Rat::one();
                        if trial % 3 == 0 {
                            v[rng.gen_range(0..d)] += random_coeff(&mut rng);
                        }
                        v
                    })
                    .collect();
                let v = Subspace::new(Ambient::E, d, &rows).unwrap();
                assert_eq!(
                    is_coisotropic_by_definition(&ds, &v).unwrap(),
                    is_coisotropic_by_lemma(&ds, &v).unwrap(),
                    "{desc:?} {v:?}"
                );
            }
        }
    }

    #[test]
    fn slwedge2_colagrangian_types() {
        let ds = DataSet::build(Descriptor::slwedge2(4)).unwrap();
        let w = 5;
        let b2 = Blade::all(w, 2);
        let hyper: Vec<usize> = (0..b2.len()).filter(|&i| !b2[i].contains(4)).collect();
        let v = Subspace::coordinate(Ambient::E, 10, hyper);
        assert_eq!(slwedge2_colagrangian_type(&ds, &v).unwrap(), Some(SlWedgeColagrangian::Hyperplane));
        assert!(is_colagrangian(&ds, &v).unwrap());
        assert!(is_coisotropic(&ds, &v).unwrap());
        assert_eq!(v.codim(), 4);
        // (Λ²Ξ)° for Ξ = span(e^1, e^2, e^3)
        let three: Vec<usize> = (0..b2.len()).filter(|&i| !b2[i].is_subset_of(Blade(0b111))).collect();
        let v2 = Subspace::coordinate(Ambient::E, 10, three);
        assert_eq!(slwedge2_colagrangian_type(&ds, &v2).unwrap(), Some(SlWedgeColagrangian::ThreePlane));
        assert!(is_coisotropic(&ds, &v2).unwrap());
        assert_eq!(v2.codim(), 3);
        assert!(!is_colagrangian(&ds, &Subspace::full(Ambient::E, 10)).unwrap());
    }

    #[test]
    fn slwedge2_lagrangians() {
        let ds = DataSet::build(Descriptor::slwedge2(4)).unwrap();
        let b2 = Blade::all(5, 2);
        let star: Vec<usize> = (0..b2.len()).filter(|&i| b2[i].contains(0)).collect();
        assert!(is_lagrangian(&ds, &Subspace::coordinate(Ambient::E, 10, star)).unwrap());
        let plane: Vec<usize> = (0..b2.len()).filter(|&i| b2[i].is_subset_of(Blade(0b111))).collect();
        assert!(is_lagrangian(&ds, &Subspace::coordinate(Ambient::E, 10, plane)).unwrap());
        assert!(!is_lagrangian(&ds, &Subspace::coordinate(Ambient::E, 10, [0, 1])).unwrap());
    }

    #[test]
    fn opq_predicates() {
        let ds = DataSet::build(Descriptor::onn(2)).unwrap();
        let null = Subspace::new(Ambient::E, 4, &[vec![r(1), r(0), r(1), r(0)], vec![r(0), r(1), r(0), r(1)]]).unwrap();
        assert!(is_lagrangian(&ds, &null).unwrap());
        assert!(is_colagrangian(&ds, &null).unwrap());
        let bad = Subspace::coordinate(Ambient::E, 4, [0, 1]);
        assert!(!is_isotropic(&ds, &bad).unwrap());
        assert!(!is_lagrangian(&ds, &bad).unwrap());
    }

    #[test]
    fn null_vector_examples() {
        let n = 4;
        let x = EVec::from_vector(&[r(0), r(2), r(0), r(1)]);
        let (w, out) = normalize_null(&x).unwrap();
        assert!(w.is_empty());
        assert_eq!(out, x);

        // X + σ₂ with ι_X σ₂ = 0
        let mut u = EVec::from_vector(&[r(1), r(0), r(0), r(0)]);
        u.s2 = Form::basis(n, &[1, 2]).scale(&r(3));
        let (w, out) = normalize_null(&u).unwrap();
        assert_eq!(w.steps[0].piece(), Some(crate::exc::Piece::A3));
        assert!(in_tangent(&out));
        assert_eq!(w.apply(&u).unwrap(), out);

        let mut s = EVec::zero(n);
        s.s2 = Form::basis(n, &[0, 1]);
        let (w, out) = normalize_null(&s).unwrap();
        assert_eq!(w.steps[0].piece(), Some(crate::exc::Piece::W3));
        assert!(in_tangent(&out) && !out.is_zero());
        assert_eq!(w.apply(&s).unwrap(), out);

        let mut bad = EVec::from_vector(&[r(1), r(0), r(0), r(0)]);
        bad.s2 = Form::basis(n, &[0, 1]);
        assert!(matches!(normalize_null(&bad), Err(Error::NotNull(_))));
        assert!(normalize_null(&EVec::zero(n)).is_err());
    }

    #[test]
    fn five_form_null_vector() {
        let n = 6;
        let mut s = EVec::zero(n);
        s.s5 = Form::basis(n, &[0, 1, 2, 3, 4]);
        let (w, out) = normalize_null(&s).unwrap();
        assert!(in_tangent(&out) && !out.is_zero());
        assert_eq!(w.apply(&s).unwrap(), out);
    }

    #[test]
    fn random_null_vectors_reach_tangent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 3..=6 {
            for _ in 0..40 {
                let g = random_word(n, 4, &mut rng);
                let x: Vec<Rat> = (0..n).map(|_| Rat::int(rng.gen_range(-2..=2))).collect();
                let mut seed = EVec::from_vector(&x);
                if seed.is_zero() {
                    seed = EVec::from_vector(&unit(n, 0));
                }
                let u = g.apply(&seed).unwrap();
                assert!(is_null(&u));
                let (w, out) = normalize_null(&u).unwrap();
                assert!(in_tangent(&out));
                assert_eq!(w.apply(&u).unwrap(), out);
            }
        }
    }

    #[test]
    fn word_inverse_and_theta() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_word(6, 6, &mut rng);
        let u = EVec::from_coords(6, &(0..27).map(|i| Rat::int(i as i64 % 5 - 2)).collect::<Vec<_>>());
        assert_eq!(g.inverse().apply(&g.apply(&u).unwrap()).unwrap(), u);
        // contragredient: ⟨θ(g)ξ, g u⟩ = ⟨ξ, u⟩
        let xi: Vec<Rat> = (0..27).map(|i| Rat::int((i as i64 * 7) % 3 - 1)).collect();
        let lhs = crate::linalg::dot(&g.theta().apply_coords(&xi).unwrap(), &g.apply_coords(&u.to_coords()).unwrap());
        assert_eq!(lhs, crate::linalg::dot(&xi, &u.to_coords()));
    }

    #[test]
    fn lagrangian_canonical_forms() {
        for n in 3..=6 {
            let ds = exc(n);
            let nf = normalize_lagrangian(&ds, &tangent(n)).unwrap();
            assert_eq!(nf.label, OrbitLabel::DimN);
            assert!(nf.word.is_empty());
            let c = canonical_lagrangian(n, OrbitLabel::DimNMinus1);
            assert_eq!(c.dim(), n - 1);
            let nf = normalize_lagrangian(&ds, &c).unwrap();
            assert_eq!(nf.label, OrbitLabel::DimNMinus1);
            assert!(is_lagrangian(&ds, &c).unwrap());
        }
    }

    #[test]
    fn two_dimensional_base_case() {
        let mut s = EVec::zero(2);
        s.s2 = Form::basis(2, &[0, 1]);
        assert_eq!(normalize_lagrangian_vectors(2, &[s]).unwrap().label, OrbitLabel::DimNMinus1);
        let t: Vec<EVec> = (0..2).map(|i| EVec::from_vector(&unit(2, i))).collect();
        assert_eq!(normalize_lagrangian_vectors(2, &t).unwrap().label, OrbitLabel::DimN);
        assert!(matches!(normalize_lagrangian_vectors(2, &t[..1]), Err(Error::NotLagrangian(_))));
    }

    #[test]
    fn non_maximal_and_non_isotropic() {
        let n = 4;
        let ds = exc(n);
        let d = ds.dim_e();
        let partial = Subspace::coordinate(Ambient::E, d, [0, 1]);
        assert!(matches!(normalize_lagrangian(&ds, &partial), Err(Error::NotLagrangian(_))));
        assert!(!is_lagrangian(&ds, &partial).unwrap());
        // e_1 together with e^1∧e^2 pairs nontrivially
        let bad = Subspace::coordinate(Ambient::E, d, [0, n]);
        assert!(matches!(normalize_lagrangian(&ds, &bad), Err(Error::NotIsotropic(_))));
        // a dim n−2 piece of the second orbit
        let c = canonical_lagrangian(n, OrbitLabel::DimNMinus1);
        let sub = Subspace::new(Ambient::E, d, &c.rows()[1..]).unwrap();
        assert!(matches!(normalize_lagrangian(&ds, &sub), Err(Error::NotLagrangian(_))));
    }

    #[test]
    fn lagrangian_orbit_label_is_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut trials = 0;
        for n in 3..=6 {
            let ds = exc(n);
            for label in [OrbitLabel::DimN, OrbitLabel::DimNMinus1] {
                let c = canonical_lagrangian(n, label);
                for _ in 0..125 {
                    let len = rng.gen_range(1..=6);
                    let g = random_word(n, len, &mut rng);
                    let w = g.apply_subspace(&c).unwrap();
                    let nf = normalize_lagrangian(&ds, &w).unwrap();
                    assert_eq!(nf.label, label);
                    assert_eq!(w.dim(), label.dim(n));
                    assert_eq!(nf.word.apply_subspace(&w).unwrap(), nf.normalized);
                    assert_eq!(g.inverse().apply_subspace(&w).unwrap(), c);
                    trials += 1;
                }
            }
        }
        assert_eq!(trials, 1000);
    }

    #[test]
    fn pair_examples() {
        let n = 4;
        let ds = exc(n);
        let v = standard_colagrangian(n);
        assert!(normalize_pair(&ds, &v, &tangent(n)).unwrap().is_empty());

        let a3 = ExcElem::from_a3(Form::basis(n, &[0, 1, 2]).scale(&r(2)));
        let mut g = GroupWord::new(n);
        g.push(a3.clone()).unwrap();
        let w = g.apply_subspace(&tangent(n)).unwrap();
        assert_eq!(g.apply_subspace(&v).unwrap(), v);
        let word = normalize_pair(&ds, &v, &w).unwrap();
        assert_eq!(word.steps, vec![a3.neg()]);

        assert!(matches!(normalize_pair(&ds, &v, &v), Err(Error::Hypothesis(_))));
        assert!(matches!(normalize_pair(&ds, &tangent(n), &tangent(n)), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn random_pairs_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in 3..=6 {
            let ds = exc(n);
            for _ in 0..8 {
                let g = random_word(n, 5, &mut rng);
                let v = g.apply_subspace(&standard_colagrangian(n)).unwrap();
                let w = g.apply_subspace(&tangent(n)).unwrap();
                let h = normalize_pair(&ds, &v, &w).unwrap();
                assert_eq!(h.apply_subspace(&v).unwrap(), standard_colagrangian(n));
                assert_eq!(h.apply_subspace(&w).unwrap(), tangent(n));
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let ds = exc(3);
        let v = standard_colagrangian(3);
        let s = serde_json::to_string(&v.to_json(&ds)).unwrap();
        let back: SubspaceJson = serde_json::from_str(&s).unwrap();
        assert_eq!(Subspace::from_json(&back, &ds).unwrap(), v);
        assert!(s.contains("\"ambient\":\"E\""));
        let other = exc(4);
        assert!(Subspace::from_json(&back, &other).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_word(6, 4, &mut rng);
        let back: GroupWord = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        back.check().unwrap();
    }
}
