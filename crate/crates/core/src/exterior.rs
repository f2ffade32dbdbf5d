//! Sparse exterior algebra over the rationals.
//!
//! [`Form`]s live in `ΛᵏT*` and [`Poly`]s (polyvectors) in `ΛᵏT`. Basis
//! elements are [`Blade`]s: strictly increasing index sets stored as bit
//! masks. Contractions follow the left convention
//! `ι_{e_I}(e^I ∧ β) = β` (the contracting element eats the leading slots),
//! so `ι_{x∧y} = ι_y ∘ ι_x` and the full contraction of equal degrees is the
//! pairing `⟨e^I, e_J⟩ = δ_{IJ}`.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rat::Rat;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 32;

/// A sorted multi-index, stored as a bit mask (bit `i` = index `i`, 0-based).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Blade(pub u32);

impl Blade {
    pub const EMPTY: Blade = Blade(0);

    pub fn from_indices(idx: &[usize]) -> Option<Blade> {
        let mut m = 0u32;
        for &i in idx {
            if i >= MAX_DIM || m & (1 << i) != 0 {
                return None;
            }
            m |= 1 << i;
        }
        Some(Blade(m))
    }

    pub fn single(i: usize) -> Blade {
        Blade(1 << i)
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn is_subset_of(self, other: Blade) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn indices(self) -> Vec<usize> {
        (0..MAX_DIM).filter(|&i| self.contains(i)).collect()
    }

    pub fn max_index(self) -> Option<usize> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros() as usize)
    }

    /// Sign of `e^A ∧ e^B` relative to `e^{A∪B}`, or `None` if they overlap.
    pub fn wedge_sign(a: Blade, b: Blade) -> Option<i64> {
        if a.0 & b.0 != 0 {
            return None;
        }
        // count pairs (i in a, j in b) with i > j
        let mut swaps = 0u32;
        let mut rest = b.0;
        while rest != 0 {
            let j = rest.trailing_zeros();
            rest &= rest - 1;
            swaps += (a.0 >> j).count_ones();
        }
        Some(if swaps.is_multiple_of(2) { 1 } else { -1 })
    }

    /// All blades of degree `k` in dimension `n`, in lexicographic order of
    /// their index lists.
    pub fn all(n: usize, k: usize) -> Vec<Blade> {
        fn rec(start: usize, n: usize, k: usize, cur: u32, out: &mut Vec<Blade>) {
            if k == 0 {
                out.push(Blade(cur));
                return;
            }
            for i in start..n {
                if n - i < k {
                    break;
                }
                rec(i + 1, n, k - 1, cur | (1 << i), out);
            }
        }
        let mut out = Vec::new();
        if k <= n {
            rec(0, n, k, 0, &mut out);
        }
        out
    }
}

impl fmt::Debug for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices().iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "[{}]", idx.join(","))
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Marker for which side of the duality an exterior element lives on.
pub trait Slot: Clone + Copy + PartialEq + Eq + fmt::Debug + Default + Send + Sync + 'static {
    type Dual: Slot<Dual = Self>;
    const LOWER: bool;
}

/// Covariant slot: elements of `ΛᵏT*`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Lower;
/// Contravariant slot: elements of `ΛᵏT`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Upper;

impl Slot for Lower {
    type Dual = Upper;
    const LOWER: bool = true;
}

impl Slot for Upper {
    type Dual = Lower;
    const LOWER: bool = false;
}

/// A homogeneous element of the exterior algebra of an `n`-dimensional space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ext<S: Slot> {
    dim: usize,
    deg: usize,
    terms: BTreeMap<Blade, Rat>,
    _slot: PhantomData<S>,
}

pub type Form = Ext<Lower>;
pub type Poly = Ext<Upper>;

impl<S: Slot> Ext<S> {
    pub fn zero(dim: usize, deg: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        Ext { dim, deg, terms: BTreeMap::new(), _slot: PhantomData }
    }

    /// The basis element `e^I` (or `e_I`) for a 0-based, not necessarily
    /// sorted index list; the sign of the sorting permutation is applied.
    pub fn basis(dim: usize, idx: &[usize]) -> Self {
        let mut out = Self::zero(dim, idx.len());
        let mut acc = (Blade::EMPTY, 1i64);
        for &i in idx {
            assert!(i < dim, "index {i} out of range for dimension {dim}");
            match Blade::wedge_sign(acc.0, Blade::single(i)) {
                Some(s) => acc = (Blade(acc.0 .0 | (1 << i)), acc.1 * s),
                None => return out,
            }
        }
        out.terms.insert(acc.0, Rat::int(acc.1));
        out
    }

    pub fn from_blade(dim: usize, b: Blade, c: Rat) -> Self {
        let mut out = Self::zero(dim, b.degree());
        out.add_term(b, c);
        out
    }

    /// Builds from `(indices, coefficient)` pairs with 0-based indices.
    pub fn from_terms(dim: usize, deg: usize, terms: impl IntoIterator<Item = (Vec<usize>, Rat)>) -> Result<Self> {
        let mut out = Self::zero(dim, deg);
        for (idx, c) in terms {
            if idx.len() != deg {
                return Err(Error::Degree { expected: deg, found: idx.len() });
            }
            if idx.iter().any(|&i| i >= dim) {
                return Err(Error::invalid(format!("index out of range in {idx:?} for dimension {dim}")));
            }
            let t = Self::basis(dim, &idx).scale(&c);
            out.add_assign_ext(&t);
        }
        Ok(out)
    }

    /// A 1-element from a coordinate vector.
    pub fn from_vector(v: &[Rat]) -> Self {
        let mut out = Self::zero(v.len(), 1);
        for (i, x) in v.iter().enumerate() {
            out.add_term(Blade::single(i), x.clone());
        }
        out
    }

    pub fn scalar(dim: usize, c: Rat) -> Self {
        Self::from_blade(dim, Blade::EMPTY, c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &Rat)> {
        self.terms.iter().map(|(b, c)| (*b, c))
    }

    pub fn nnz(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, b: Blade) -> Rat {
        self.terms.get(&b).cloned().unwrap_or_default()
    }

    /// Coefficients in the lexicographic basis of the degree-k space.
    pub fn to_coords(&self) -> Vec<Rat> {
        Blade::all(self.dim, self.deg).into_iter().map(|b| self.coeff(b)).collect()
    }

    pub fn from_coords(dim: usize, deg: usize, coords: &[Rat]) -> Self {
        let blades = Blade::all(dim, deg);
        assert_eq!(blades.len(), coords.len(), "coordinate length mismatch");
        let mut out = Self::zero(dim, deg);
        for (b, c) in blades.into_iter().zip(coords) {
            out.add_term(b, c.clone());
        }
        out
    }

    pub fn add_term(&mut self, b: Blade, c: Rat) {
        debug_assert_eq!(b.degree(), self.deg);
        debug_assert!(b.max_index().is_none_or(|m| m < self.dim));
        if c.is_zero() {
            return;
        }
        match self.terms.entry(b) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "exterior elements of different ambient dimension");
        assert_eq!(self.deg, other.deg, "exterior elements of different degree");
    }

    pub fn add_assign_ext(&mut self, other: &Self) {
        self.check_compatible(other);
        for (b, c) in &other.terms {
            self.add_term(*b, c.clone());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_ext(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Rat::int(-1)))
    }

    pub fn neg(&self) -> Self {
        self.scale(&Rat::int(-1))
    }

    pub fn scale(&self, s: &Rat) -> Self {
        if s.is_zero() {
            return Self::zero(self.dim, self.deg);
        }
        Ext {
            dim: self.dim,
            deg: self.deg,
            terms: self.terms.iter().map(|(b, c)| (*b, c * s)).collect(),
            _slot: PhantomData,
        }
    }

    /// Graded-commutative product; degrees beyond the dimension give zero.
    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "wedge of elements of different ambient dimension");
        let mut out = Self::zero(self.dim, self.deg + other.deg);
        if self.deg + other.deg > self.dim {
            return out;
        }
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if let Some(s) = Blade::wedge_sign(*a, *b) {
                    out.add_term(Blade(a.0 | b.0), (x * y) * Rat::int(s));
                }
            }
        }
        out
    }

    /// Left contraction of a lower-or-equal degree dual element:
    /// `ι_by self`, with `ι_{e_I}(e^I ∧ β) = β`.
    pub fn interior(&self, by: &Ext<S::Dual>) -> Self {
        assert_eq!(self.dim, by.dim, "contraction of elements of different ambient dimension");
        assert!(by.deg <= self.deg, "contracting degree {} into degree {}", by.deg, self.deg);
        let mut out = Self::zero(self.dim, self.deg - by.deg);
        for (i, x) in &by.terms {
            for (j, y) in &self.terms {
                if !i.is_subset_of(*j) {
                    continue;
                }
                let rest = Blade(j.0 & !i.0);
                let s = Blade::wedge_sign(*i, rest).unwrap();
                out.add_term(rest, (x * y) * Rat::int(s));
            }
        }
        out
    }

    /// Contraction from the trailing slots: `⟨β, ι_by self⟩ = ⟨β ∧ by, self⟩`.
    /// This is the contraction used when a form is fed into a polyvector
    /// (or vice versa) inside the exceptional algebra; it satisfies
    /// `ι_{x∧y} = ι_x ∘ ι_y`.
    pub fn contract_trailing(&self, by: &Ext<S::Dual>) -> Self {
        let k = by.deg;
        let m = self.deg;
        let out = self.interior(by);
        if (k * (m - k)) % 2 == 1 {
            out.neg()
        } else {
            out
        }
    }

    /// `⟨self, other⟩` with `⟨e^I, e_J⟩ = δ_{IJ}`.
    pub fn pairing(&self, other: &Ext<S::Dual>) -> Result<Rat> {
        if self.deg != other.deg {
            return Err(Error::Degree { expected: self.deg, found: other.deg });
        }
        Ok(self.terms.iter().map(|(b, x)| x * &other.coeff(*b)).sum())
    }

    /// Natural action of a matrix `A ∈ gl(T)` as a derivation: on `T` by
    /// `e_j ↦ Σ_i A_{ij} e_i`, on `T*` by the negative transpose.
    pub fn gl_act(&self, a: &Matrix) -> Self {
        assert_eq!(a.rows(), self.dim);
        assert_eq!(a.cols(), self.dim);
        let mut out = Self::zero(self.dim, self.deg);
        for (b, c) in &self.terms {
            for k in b.indices() {
                let rest = Blade(b.0 & !(1 << k));
                // e_b = s · e_k ∧ e_rest
                let s = Blade::wedge_sign(Blade::single(k), rest).unwrap();
                for j in 0..self.dim {
                    let coeff = if S::LOWER { -&a[(k, j)] } else { a[(j, k)].clone() };
                    if coeff.is_zero() {
                        continue;
                    }
                    if let Some(s2) = Blade::wedge_sign(Blade::single(j), rest) {
                        out.add_term(Blade(rest.0 | (1 << j)), c * &coeff * Rat::int(s * s2));
                    }
                }
            }
        }
        out
    }

    /// Reinterprets the coefficients on the dual side (`e^I ↦ e_I`).
    pub fn mirror(&self) -> Ext<S::Dual> {
        Ext { dim: self.dim, deg: self.deg, terms: self.terms.clone(), _slot: PhantomData }
    }

    /// Pushes the element through a linear map on the underlying 1-space:
    /// each basis 1-element `i` is replaced by `images[i]`.
    pub fn push_forward(&self, target_dim: usize, images: &[Ext<S>]) -> Ext<S> {
        assert_eq!(images.len(), self.dim);
        let mut out = Ext::zero(target_dim, self.deg);
        for (b, c) in &self.terms {
            let mut acc = Ext::scalar(target_dim, c.clone());
            for i in b.indices() {
                acc = acc.wedge(&images[i]);
            }
            out.add_assign_ext(&acc);
        }
        out
    }
}

impl<S: Slot> fmt::Debug for Ext<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, sym) = if S::LOWER { ("Form", "e^") } else { ("Poly", "e_") };
        if self.terms.is_empty() {
            return write!(f, "{name}(dim={}, deg={}; 0)", self.dim, self.deg);
        }
        let parts: Vec<String> = self.terms.iter().map(|(b, c)| format!("{c}·{sym}{b:?}")).collect();
        write!(f, "{name}(dim={}, deg={}; {})", self.dim, self.deg, parts.join(" + "))
    }
}

/// JSON shape `{"dim": n, "deg": k, "terms": [[[i1,...,ik], "p/q"], ...]}`
/// with 1-based indices.
#[derive(Serialize, Deserialize)]
struct ExtJson {
    dim: usize,
    deg: usize,
    terms: Vec<(Vec<usize>, Rat)>,
}

impl<S: Slot> Serialize for Ext<S> {
    fn serialize<Se: serde::Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        ExtJson {
            dim: self.dim,
            deg: self.deg,
            terms: self.terms.iter().map(|(b, c)| (b.indices().iter().map(|i| i + 1).collect(), c.clone())).collect(),
        }
        .serialize(s)
    }
}

impl<'de, S: Slot> Deserialize<'de> for Ext<S> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ExtJson::deserialize(d)?;
        if raw.dim == 0 || raw.dim > MAX_DIM {
            return Err(serde::de::Error::custom(format!("invalid dim/deg {}/{}", raw.dim, raw.deg)));
        }
        let mut terms = Vec::new();
        for (idx, c) in raw.terms {
            if idx.iter().any(|&i| i == 0 || i > raw.dim) {
                return Err(serde::de::Error::custom(format!("index out of range in {idx:?}")));
            }
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(serde::de::Error::custom(format!("multi-index {idx:?} is not strictly increasing")));
            }
            terms.push((idx.iter().map(|i| i - 1).collect(), c));
        }
        Ext::from_terms(raw.dim, raw.deg, terms).map_err(serde::de::Error::custom)
    }
}

/// `α ⋆ w ∈ gl(T)`: the matrix with `(α⋆w)_{ji} = ⟨ι_{e_i} α, ι_{e^j} w⟩`,
/// i.e. `⟨ξ, (α⋆w) X⟩ = ⟨ι_X α, ι_ξ w⟩`.
pub fn star(a: &Form, w: &Poly) -> Result<Matrix> {
    if a.degree() != w.degree() {
        return Err(Error::Degree { expected: a.degree(), found: w.degree() });
    }
    if a.dim() != w.dim() {
        return Err(Error::Dimension { expected: a.dim(), found: w.dim() });
    }
    let n = a.dim();
    if a.degree() == 0 {
        return Ok(Matrix::zeros(n, n));
    }
    let contracted_a: Vec<Form> = (0..n).map(|i| a.interior(&Poly::basis(n, &[i]))).collect();
    let contracted_w: Vec<Poly> = (0..n).map(|j| w.interior(&Form::basis(n, &[j]))).collect();
    let mut m = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            m[(j, i)] = contracted_a[i].pairing(&contracted_w[j])?;
        }
    }
    Ok(m)
}

/// An element of `T* ⊗ Λ⁶T*`, stored as the 6-form-valued components on
/// the basis `e^i ⊗ ·`. Only non-trivial for `n ≥ 6`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoVectorSixForm {
    pub components: Vec<Form>,
}

impl CoVectorSixForm {
    pub fn zero(n: usize) -> Self {
        CoVectorSixForm { components: (0..n).map(|_| Form::zero(n, 6.min(n))).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Form::is_zero)
    }

    /// Evaluates on a vector `Y`.
    pub fn eval(&self, y: &[Rat]) -> Form {
        let n = self.components.len();
        let mut out = Form::zero(n, 6.min(n));
        for (c, comp) in y.iter().zip(&self.components) {
            if !c.is_zero() {
                out.add_assign_ext(&comp.scale(c));
            }
        }
        out
    }
}

/// `(j σ₂ ∧ σ₅)(Y) = (ι_Y σ₂) ∧ σ₅`, an element of `T* ⊗ Λ⁶T*`.
pub fn jmap(s2: &Form, s5: &Form) -> Result<CoVectorSixForm> {
    if s2.degree() != 2 {
        return Err(Error::Degree { expected: 2, found: s2.degree() });
    }
    if s5.degree() != 5 {
        return Err(Error::Degree { expected: 5, found: s5.degree() });
    }
    if s2.dim() != s5.dim() {
        return Err(Error::Dimension { expected: s2.dim(), found: s5.dim() });
    }
    let n = s2.dim();
    Ok(CoVectorSixForm {
        components: (0..n).map(|i| s2.interior(&Poly::basis(n, &[i])).wedge(s5)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(n: usize, idx: &[usize]) -> Form {
        Form::basis(n, &idx.iter().map(|i| i - 1).collect::<Vec<_>>())
    }

    fn p(n: usize, idx: &[usize]) -> Poly {
        Poly::basis(n, &idx.iter().map(|i| i - 1).collect::<Vec<_>>())
    }

    /// Sign of the permutation sorting `idx` (0 if repeated), by counting
    /// inversions over the expanded index list.
    fn perm_sign(idx: &[usize]) -> i64 {
        let mut inv = 0;
        for i in 0..idx.len() {
            for j in i + 1..idx.len() {
                if idx[i] == idx[j] {
                    return 0;
                }
                if idx[i] > idx[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 { 1 } else { -1 }
    }

    #[test]
    fn basis_wedge() {
        assert_eq!(f(3, &[1]).wedge(&f(3, &[2])), f(3, &[1, 2]));
        let lhs = f(3, &[2, 1]).wedge(&f(3, &[3]));
        assert_eq!(perm_sign(&[2, 1, 3]), -1);
        assert_eq!(lhs, f(3, &[1, 2, 3]).scale(&Rat::int(-1)));
        let a = f(4, &[1]).add(&f(4, &[3]).scale(&Rat::new(2, 3)));
        assert!(a.wedge(&a).is_zero());
    }

    #[test]
    fn wedge_sign_matches_permutation_oracle() {
        let n = 6;
        for a in (0..=3).flat_map(|k| Blade::all(n, k)) {
            for b in (0..=3).flat_map(|k| Blade::all(n, k)) {
                let mut expanded = a.indices();
                expanded.extend(b.indices());
                let expected = perm_sign(&expanded);
                let got = Blade::wedge_sign(a, b).unwrap_or(0);
                assert_eq!(got, expected, "{a:?} ∧ {b:?}");
            }
        }
    }

    #[test]
    fn interior_examples() {
        assert_eq!(f(2, &[1, 2]).interior(&p(2, &[1])), f(2, &[2]));
        assert_eq!(f(2, &[1, 2]).interior(&p(2, &[2])), f(2, &[1]).neg());
        let direct = f(3, &[1, 2, 3]).interior(&p(3, &[1, 2]));
        assert_eq!(direct, f(3, &[3]));
        // ι_{e1∧e2} agrees with contracting e1 first, then e2
        let stepwise = f(3, &[1, 2, 3]).interior(&p(3, &[1])).interior(&p(3, &[2]));
        assert_eq!(direct, stepwise);
    }

    #[test]
    fn trailing_contraction_matches_pairing_definition() {
        let n = 6;
        for m in 1..=n {
            for k in 0..=m {
                for w in Blade::all(n, m).into_iter().step_by(3) {
                    for a in Blade::all(n, k).into_iter().step_by(2) {
                        let wp = Poly::from_blade(n, w, Rat::one());
                        let af = Form::from_blade(n, a, Rat::one());
                        let got = wp.contract_trailing(&af);
                        for b in Blade::all(n, m - k) {
                            let beta = Form::from_blade(n, b, Rat::one());
                            let expected = beta.wedge(&af).pairing(&wp).unwrap();
                            assert_eq!(got.coeff(b), expected);
                        }
                    }
                }
            }
        }
        let x = f(3, &[1]);
        let y = f(3, &[2]);
        let w = p(3, &[1, 2, 3]);
        assert_eq!(w.contract_trailing(&x.wedge(&y)), w.contract_trailing(&y).contract_trailing(&x));
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(f(3, &[1, 2]).pairing(&p(3, &[1, 2])).unwrap(), Rat::one());
        assert_eq!(f(3, &[1, 2]).pairing(&p(3, &[1, 3])).unwrap(), Rat::zero());
        assert!(f(3, &[1, 2]).pairing(&p(3, &[1])).is_err());
    }

    #[test]
    fn pairing_is_full_contraction() {
        let n = 5;
        for k in 0..=n {
            for a in Blade::all(n, k) {
                for b in Blade::all(n, k) {
                    let fa = Form::from_blade(n, a, Rat::one());
                    let pb = Poly::from_blade(n, b, Rat::one());
                    let full = fa.interior(&pb);
                    assert_eq!(full.degree(), 0);
                    assert_eq!(full.coeff(Blade::EMPTY), fa.pairing(&pb).unwrap());
                }
            }
        }
    }

    #[test]
    fn star_examples() {
        let n = 4;
        let m = star(&f(n, &[1, 2]), &p(n, &[1, 2])).unwrap();
        // brute force: entry (j,i) = <ι_{e_i} α, ι_{e^j} w>
        let mut expected = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let a = f(n, &[1, 2]).interior(&Poly::basis(n, &[i]));
                let w = p(n, &[1, 2]).interior(&Form::basis(n, &[j]));
                expected[(j, i)] = a.pairing(&w).unwrap();
            }
        }
        assert_eq!(m, expected);
        assert_eq!(m, Matrix::diagonal(&[Rat::one(), Rat::one(), Rat::zero(), Rat::zero()]));
        assert!(star(&Form::zero(n, 2), &p(n, &[1, 2])).unwrap().is_zero());
        assert!(star(&f(n, &[1]), &p(n, &[1, 2])).is_err());
    }

    #[test]
    fn jmap_examples() {
        let n = 6;
        let j = jmap(&f(n, &[1, 2]), &f(n, &[2, 3, 4, 5, 6])).unwrap();
        // evaluate on each basis vector Y
        for y in 0..n {
            let expected = f(n, &[1, 2]).interior(&Poly::basis(n, &[y])).wedge(&f(n, &[2, 3, 4, 5, 6]));
            assert_eq!(j.components[y], expected);
        }
        assert_eq!(j.components[0], Form::zero(n, 6));
        assert_eq!(j.components[1], f(n, &[1, 2, 3, 4, 5, 6]).neg());
        let small = jmap(&f(5, &[1, 2]), &f(5, &[1, 2, 3, 4, 5])).unwrap();
        assert!(small.is_zero());
        assert!(jmap(&Form::zero(6, 2), &f(6, &[2, 3, 4, 5, 6])).unwrap().is_zero());
    }

    #[test]
    fn gl_action_of_identity_is_degree_weight() {
        let n = 4;
        let id = Matrix::identity(n);
        let a = f(n, &[1, 3, 4]);
        assert_eq!(a.gl_act(&id), a.scale(&Rat::int(-3)));
        let w = p(n, &[2, 4]);
        assert_eq!(w.gl_act(&id), w.scale(&Rat::int(2)));
    }

    #[test]
    fn json_round_trip_uses_one_based_indices() {
        let a = f(4, &[1, 3]).scale(&Rat::new(-2, 3));
        let j = serde_json::to_string(&a).unwrap();
        assert_eq!(j, r#"{"dim":4,"deg":2,"terms":[[[1,3],"-2/3"]]}"#);
        let back: Form = serde_json::from_str(&j).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Form>(r#"{"dim":4,"deg":2,"terms":[[[3,1],"1"]]}"#).is_err());
    }

    fn arb_form(n: usize, k: usize) -> impl Strategy<Value = Form> {
        let blades = Blade::all(n, k);
        proptest::collection::vec(-3i64..=3, blades.len())
            .prop_map(move |cs| Form::from_coords(n, k, &cs.into_iter().map(Rat::int).collect::<Vec<_>>()))
    }

    proptest! {
        #[test]
        fn wedge_associative_and_graded(ka in 0usize..3, kb in 0usize..3, kc in 0usize..2, seed in any::<u64>()) {
            let n = 5;
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            let mut rnd = |k: usize| {
                use rand::Rng;
                let cs: Vec<Rat> = Blade::all(n, k).iter().map(|_| Rat::int(rng.gen_range(-2..=2))).collect();
                Form::from_coords(n, k, &cs)
            };
            let (a, b, c) = (rnd(ka), rnd(kb), rnd(kc));
            prop_assert_eq!(a.wedge(&b).wedge(&c), a.wedge(&b.wedge(&c)));
            let sign = if (ka * kb) % 2 == 0 { Rat::one() } else { Rat::int(-1) };
            prop_assert_eq!(a.wedge(&b), b.wedge(&a).scale(&sign));
        }

        #[test]
        fn interior_is_graded_derivation(a in arb_form(5, 2), b in arb_form(5, 2), x in 0usize..5) {
            let ex = Poly::basis(5, &[x]);
            let lhs = a.wedge(&b).interior(&ex);
            let rhs = a.interior(&ex).wedge(&b).add(&a.wedge(&b.interior(&ex)));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn star_trace_is_degree_times_pairing(a in arb_form(4, 2), seed in any::<u64>()) {
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            use rand::Rng;
            let cs: Vec<Rat> = Blade::all(4, 2).iter().map(|_| Rat::int(rng.gen_range(-3..=3))).collect();
            let w = Poly::from_coords(4, 2, &cs);
            let m = star(&a, &w).unwrap();
            prop_assert_eq!(m.trace(), a.pairing(&w).unwrap() * Rat::int(2));
        }
    }
}
