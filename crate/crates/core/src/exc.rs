//! The Lie algebra `e_{n(n)} ⊕ ℝ = ℝ ⊕ gl(T) ⊕ Λ³T* ⊕ Λ⁶T* ⊕ Λ³T ⊕ Λ⁶T`
//! and its representation on `E = T ⊕ Λ²T* ⊕ Λ⁵T*`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{binomial, star, Blade, Form, Poly};
use crate::linalg::{Matrix, SparseVec};
use crate::rat::Rat;

/// An element `c + A + a₃ + a₆ + w₃ + w₆`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ExcElem {
    pub n: usize,
    pub c: Rat,
    #[serde(rename = "A")]
    pub a: Matrix,
    pub a3: Form,
    pub a6: Form,
    pub w3: Poly,
    pub w6: Poly,
}

/// Which nilpotent graded piece a generator lives in.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Piece {
    A3,
    A6,
    W3,
    W6,
}

pub fn algebra_dim(n: usize) -> usize {
    1 + n * n + 2 * binomial(n, 3) + 2 * binomial(n, 6)
}

impl ExcElem {
    pub fn zero(n: usize) -> Self {
        ExcElem {
            n,
            c: Rat::zero(),
            a: Matrix::zeros(n, n),
            a3: Form::zero(n, 3),
            a6: Form::zero(n, 6),
            w3: Poly::zero(n, 3),
            w6: Poly::zero(n, 6),
        }
    }

    pub fn central(n: usize, c: Rat) -> Self {
        ExcElem { c, ..Self::zero(n) }
    }

    pub fn gl(a: Matrix) -> Self {
        let n = a.rows();
        ExcElem { a, ..Self::zero(n) }
    }

    pub fn from_a3(a3: Form) -> Self {
        ExcElem { a3: a3.clone(), ..Self::zero(a3.dim()) }
    }

    pub fn from_a6(a6: Form) -> Self {
        ExcElem { a6: a6.clone(), ..Self::zero(a6.dim()) }
    }

    pub fn from_w3(w3: Poly) -> Self {
        ExcElem { w3: w3.clone(), ..Self::zero(w3.dim()) }
    }

    pub fn from_w6(w6: Poly) -> Self {
        ExcElem { w6: w6.clone(), ..Self::zero(w6.dim()) }
    }

    pub fn check(&self) -> Result<()> {
        let n = self.n;
        let ok = self.a.rows() == n
            && self.a.cols() == n
            && [self.a3.dim(), self.a6.dim(), self.w3.dim(), self.w6.dim()].iter().all(|&d| d == n)
            && self.a3.degree() == 3
            && self.a6.degree() == 6
            && self.w3.degree() == 3
            && self.w6.degree() == 6;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("malformed algebra element for n = {n}")))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero()
            && self.a.is_zero()
            && self.a3.is_zero()
            && self.a6.is_zero()
            && self.w3.is_zero()
            && self.w6.is_zero()
    }

    /// The unique nilpotent piece this element lives in, if it is purely
    /// graded and nonzero.
    pub fn piece(&self) -> Option<Piece> {
        if !self.c.is_zero() || !self.a.is_zero() {
            return None;
        }
        let nz = [
            (!self.a3.is_zero(), Piece::A3),
            (!self.a6.is_zero(), Piece::A6),
            (!self.w3.is_zero(), Piece::W3),
            (!self.w6.is_zero(), Piece::W6),
        ];
        let mut found = nz.iter().filter(|(b, _)| *b).map(|(_, p)| *p);
        match (found.next(), found.next()) {
            (Some(p), None) => Some(p),
            _ => None,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        ExcElem {
            n: self.n,
            c: &self.c + &o.c,
            a: &self.a + &o.a,
            a3: self.a3.add(&o.a3),
            a6: self.a6.add(&o.a6),
            w3: self.w3.add(&o.w3),
            w6: self.w6.add(&o.w6),
        }
    }

    pub fn scale(&self, s: &Rat) -> Self {
        ExcElem {
            n: self.n,
            c: &self.c * s,
            a: self.a.scale(s),
            a3: self.a3.scale(s),
            a6: self.a6.scale(s),
            w3: self.w3.scale(s),
            w6: self.w6.scale(s),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&Rat::int(-1))
    }

    /// Coordinates in the order `c, A (row-major), a₃, a₆, w₃, w₆`.
    pub fn to_coords(&self) -> Vec<Rat> {
        let mut v = vec![self.c.clone()];
        v.extend(self.a.as_slice().iter().cloned());
        v.extend(self.a3.to_coords());
        v.extend(self.a6.to_coords());
        v.extend(self.w3.to_coords());
        v.extend(self.w6.to_coords());
        v
    }

    pub fn from_coords(n: usize, v: &[Rat]) -> Self {
        assert_eq!(v.len(), algebra_dim(n));
        let (b3, b6) = (binomial(n, 3), binomial(n, 6));
        let mut off = 1 + n * n;
        let mut take = |len: usize| {
            let s = &v[off..off + len];
            off += len;
            s
        };
        let a3 = Form::from_coords(n, 3, take(b3));
        let a6 = Form::from_coords(n, 6, take(b6));
        let w3 = Poly::from_coords(n, 3, take(b3));
        let w6 = Poly::from_coords(n, 6, take(b6));
        ExcElem { n, c: v[0].clone(), a: Matrix::from_flat(n, n, v[1..1 + n * n].to_vec()), a3, a6, w3, w6 }
    }

    pub fn basis(n: usize) -> Vec<ExcElem> {
        let d = algebra_dim(n);
        (0..d)
            .map(|i| {
                let mut v = vec![Rat::zero(); d];
                v[i] = Rat::one();
                ExcElem::from_coords(n, &v)
            })
            .collect()
    }

    /// Human-readable name of basis element `i` (1-based multi-indices).
    pub fn basis_label(n: usize, i: usize) -> String {
        let one_based = |b: Blade| b.indices().iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join("");
        if i == 0 {
            return "c".into();
        }
        let mut i = i - 1;
        if i < n * n {
            return format!("A[{},{}]", i / n + 1, i % n + 1);
        }
        i -= n * n;
        for (name, k) in [("a3", 3), ("a6", 6), ("w3", 3), ("w6", 6)] {
            let blades = Blade::all(n, k);
            if i < blades.len() {
                return format!("{name}[{}]", one_based(blades[i]));
            }
            i -= blades.len();
        }
        format!("#{i}")
    }
}

/// The bracket of `e_{n(n)} ⊕ ℝ`.
pub fn exc_bracket(x: &ExcElem, y: &ExcElem) -> Result<ExcElem> {
    if x.n != y.n {
        return Err(Error::Dimension { expected: x.n, found: y.n });
    }
    let n = x.n;
    let mut out = ExcElem::zero(n);
    // gl(T) part and its action on the graded pieces
    out.a = x.a.commutator(&y.a);
    out.a3 = y.a3.gl_act(&x.a).sub(&x.a3.gl_act(&y.a));
    out.a6 = y.a6.gl_act(&x.a).sub(&x.a6.gl_act(&y.a));
    out.w3 = y.w3.gl_act(&x.a).sub(&x.w3.gl_act(&y.a));
    out.w6 = y.w6.gl_act(&x.a).sub(&x.w6.gl_act(&y.a));
    // [a3, a3'] = −a3 ∧ a3', [w3, w3'] = −w3 ∧ w3'
    out.a6 = out.a6.sub(&x.a3.wedge(&y.a3));
    out.w6 = out.w6.sub(&x.w3.wedge(&y.w3));
    // [a6, w3] = ι_{w3} a6
    out.a3 = out.a3.add(&x.a6.interior(&y.w3)).sub(&y.a6.interior(&x.w3));
    // [a3, w6] = ι_{w6} a3, contracting a3 into the trailing slots of w6
    out.w3 = out.w3.add(&y.w6.contract_trailing(&x.a3)).sub(&x.w6.contract_trailing(&y.a3));
    // [w3, a3] and [w6, a6]
    let third = Rat::new(1, 3);
    let two_thirds = Rat::new(2, 3);
    for (w, a, sign) in [(&x.w3, &y.a3, Rat::one()), (&y.w3, &x.a3, Rat::int(-1))] {
        let p = a.pairing(w)?;
        let m = star(a, w)?;
        let gl = &m - &Matrix::identity(n).scale(&(&p * &third));
        out.a = &out.a + &gl.scale(&sign);
        out.c += &sign * &p * &third;
    }
    for (w, a, sign) in [(&x.w6, &y.a6, Rat::one()), (&y.w6, &x.a6, Rat::int(-1))] {
        let p = a.pairing(w)?;
        let m = star(a, w)?;
        let gl = &m - &Matrix::identity(n).scale(&(&p * &two_thirds));
        out.a = &out.a - &gl.scale(&sign);
        out.c -= &sign * &p * &two_thirds;
    }
    Ok(out)
}

/// An element `X + σ₂ + σ₅` of `E = T ⊕ Λ²T* ⊕ Λ⁵T*` (with `n = 2`
/// allowed: then `σ₅ = 0`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EVec {
    pub x: Poly,
    pub s2: Form,
    pub s5: Form,
}

impl EVec {
    pub fn zero(n: usize) -> Self {
        EVec { x: Poly::zero(n, 1), s2: Form::zero(n, 2), s5: Form::zero(n, 5) }
    }

    pub fn n(&self) -> usize {
        self.x.dim()
    }

    pub fn dim_for(n: usize) -> usize {
        n + binomial(n, 2) + binomial(n, 5)
    }

    pub fn from_vector(x: &[Rat]) -> Self {
        EVec { x: Poly::from_vector(x), ..Self::zero(x.len()) }
    }

    pub fn to_coords(&self) -> Vec<Rat> {
        let mut v = self.x.to_coords();
        v.extend(self.s2.to_coords());
        v.extend(self.s5.to_coords());
        v
    }

    pub fn from_coords(n: usize, v: &[Rat]) -> Self {
        let b2 = binomial(n, 2);
        assert_eq!(v.len(), Self::dim_for(n), "E coordinate length");
        EVec {
            x: Poly::from_coords(n, 1, &v[..n]),
            s2: Form::from_coords(n, 2, &v[n..n + b2]),
            s5: Form::from_coords(n, 5, &v[n + b2..]),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        EVec { x: self.x.add(&o.x), s2: self.s2.add(&o.s2), s5: self.s5.add(&o.s5) }
    }

    pub fn scale(&self, s: &Rat) -> Self {
        EVec { x: self.x.scale(s), s2: self.s2.scale(s), s5: self.s5.scale(s) }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.s2.is_zero() && self.s5.is_zero()
    }

    pub fn vector_coords(&self) -> Vec<Rat> {
        self.x.to_coords()
    }
}

/// Action of the algebra on `E`.
pub fn act_e(x: &ExcElem, u: &EVec) -> Result<EVec> {
    if x.n != u.n() {
        return Err(Error::Dimension { expected: x.n, found: u.n() });
    }
    let mut out = u.scale(&x.c);
    out.x = out.x.add(&u.x.gl_act(&x.a));
    out.s2 = out.s2.add(&u.s2.gl_act(&x.a));
    out.s5 = out.s5.add(&u.s5.gl_act(&x.a));
    // w3·u = ι_{w3}(σ2 + σ5)
    out.x = out.x.add(&x.w3.contract_trailing(&u.s2));
    out.s2 = out.s2.add(&u.s5.interior(&x.w3));
    // w6·u = −ι_{w6}σ5
    out.x = out.x.sub(&x.w6.contract_trailing(&u.s5));
    // a3·u = ι_X a3 + a3 ∧ σ2
    out.s2 = out.s2.add(&x.a3.interior(&u.x));
    out.s5 = out.s5.add(&x.a3.wedge(&u.s2));
    // a6·u = ι_X a6
    out.s5 = out.s5.add(&x.a6.interior(&u.x));
    Ok(out)
}

/// Matrix of `act_e(x, ·)` in the coordinates of `E`.
pub fn act_matrix(x: &ExcElem) -> Matrix {
    let n = x.n;
    let d = EVec::dim_for(n);
    let mut m = Matrix::zeros(d, d);
    for j in 0..d {
        let mut e = vec![Rat::zero(); d];
        e[j] = Rat::one();
        let img = act_e(x, &EVec::from_coords(n, &e)).expect("dimensions agree").to_coords();
        for (i, v) in img.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    m
}

/// Sets the central component to `tr(A)/(9−n)`.
pub fn embed_e_n(x: &ExcElem) -> Result<ExcElem> {
    if !(3..=6).contains(&x.n) {
        return Err(Error::Unsupported(format!("embedding needs n in 3..=6, got {}", x.n)));
    }
    let mut y = x.clone();
    y.c = x.a.trace() * Rat::new(1, 9 - x.n as i64);
    Ok(y)
}

/// `e^{gen}·u` for a generator living in a single nilpotent piece.
pub fn exp_nilpotent(gen: &ExcElem, u: &EVec) -> Result<EVec> {
    if gen.is_zero() {
        return Ok(u.clone());
    }
    if gen.piece().is_none() {
        return Err(Error::invalid("exponential needs a generator in exactly one of a3, a6, w3, w6"));
    }
    let mut out = u.clone();
    let mut term = u.clone();
    for k in 1..=4 {
        term = act_e(gen, &term)?.scale(&Rat::new(1, k));
        if term.is_zero() {
            return Ok(out);
        }
        out = out.add(&term);
    }
    Err(Error::Internal("nilpotent action did not terminate".into()))
}

/// The involution exchanging `T` and `T*`: `c ↦ −c`, `A ↦ −Aᵀ`,
/// `a₃ ↔ −w₃`, `a₆ ↔ w₆`. It satisfies `act(θx) = −act(x)ᵀ`, so it
/// transports the action on `E` to the contragredient action on `E*` in
/// identical coordinates.
pub fn theta(x: &ExcElem) -> ExcElem {
    let m1 = Rat::int(-1);
    ExcElem {
        n: x.n,
        c: -&x.c,
        a: x.a.transpose().scale(&m1),
        a3: x.w3.mirror().scale(&m1),
        a6: x.w6.mirror(),
        w3: x.a3.mirror().scale(&m1),
        w6: x.a6.mirror(),
    }
}

/// Sparse structure constants of the basis: `table[i][j] = [b_i, b_j]`.
pub fn structure_constants(n: usize) -> Vec<Vec<SparseVec>> {
    let basis = ExcElem::basis(n);
    basis
        .par_iter()
        .map(|x| basis.iter().map(|y| SparseVec::from_dense(&exc_bracket(x, y).expect("same n").to_coords())).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlgebraReport {
    pub n: usize,
    pub dimension: usize,
    pub expected_dimension: usize,
    pub antisymmetry: Option<String>,
    pub jacobi: Option<String>,
    pub representation: Option<String>,
    pub faithful: bool,
    pub embedding_closed: Option<String>,
}

impl AlgebraReport {
    pub fn passed(&self) -> bool {
        self.dimension == self.expected_dimension
            && self.antisymmetry.is_none()
            && self.jacobi.is_none()
            && self.representation.is_none()
            && self.faithful
            && self.embedding_closed.is_none()
    }
}

/// Checks Jacobi, antisymmetry, the representation property and
/// faithfulness on a full basis; equivariance of the symmetric map lives
/// with the data sets.
pub fn verify_algebra(n: usize) -> Result<AlgebraReport> {
    if !(3..=6).contains(&n) {
        return Err(Error::Unsupported(format!("algebra verification needs n in 3..=6, got {n}")));
    }
    let d = algebra_dim(n);
    let basis = ExcElem::basis(n);
    let table = structure_constants(n);
    let label = |i: usize| ExcElem::basis_label(n, i);

    let mut antisymmetry = None;
    'outer: for i in 0..d {
        for j in i..d {
            let s: Vec<Rat> = (0..d).map(|k| table[i][j].get(k) + table[j][i].get(k)).collect();
            if s.iter().any(|x| !x.is_zero()) {
                antisymmetry = Some(format!("[{}, {}] + [{}, {}] ≠ 0", label(i), label(j), label(j), label(i)));
                break 'outer;
            }
        }
    }

    let triples: Vec<(usize, usize, usize)> =
        (0..d).flat_map(|i| (i + 1..d).flat_map(move |j| (j + 1..d).map(move |k| (i, j, k)))).collect();
    let jacobi = triples
        .par_iter()
        .find_first(|&&(i, j, k)| {
            let mut acc = vec![Rat::zero(); d];
            for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                // [b_a, [b_b, b_c]]
                for (m, v) in table[b][c].iter() {
                    for (l, w) in table[a][*m].iter() {
                        acc[*l] += v * w;
                    }
                }
            }
            acc.iter().any(|x| !x.is_zero())
        })
        .map(|&(i, j, k)| format!("Jacobi fails on ({}, {}, {})", label(i), label(j), label(k)));

    let mats: Vec<Matrix> = basis.par_iter().map(act_matrix).collect();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let representation = pairs
        .par_iter()
        .find_first(|&&(i, j)| {
            let mut lhs = Matrix::zeros(mats[0].rows(), mats[0].cols());
            for (k, v) in table[i][j].iter() {
                lhs = &lhs + &mats[*k].scale(v);
            }
            lhs != mats[i].commutator(&mats[j])
        })
        .map(|&(i, j)| format!("act([{}, {}]) ≠ [act, act]", label(i), label(j)));

    // faithfulness: the flattened action matrices are independent
    let flat = Matrix::from_rows(mats.iter().map(|m| m.as_slice().to_vec()).collect());
    let faithful = flat.rank() == d;

    let embedded: Vec<ExcElem> = basis.iter().skip(1).map(embed_e_n).collect::<Result<_>>()?;
    let mut embedding_closed = None;
    'emb: for (i, x) in embedded.iter().enumerate() {
        for y in embedded.iter().skip(i + 1) {
            let z = exc_bracket(x, y)?;
            if embed_e_n(&z)? != z {
                embedding_closed = Some(format!("bracket of embedded {} and another element leaves e_n", label(i + 1)));
                break 'emb;
            }
        }
    }

    Ok(AlgebraReport {
        n,
        dimension: d,
        expected_dimension: 1 + n * n + 2 * binomial(n, 3) + 2 * binomial(n, 6),
        antisymmetry,
        jacobi,
        representation,
        faithful,
        embedding_closed,
    })
}
