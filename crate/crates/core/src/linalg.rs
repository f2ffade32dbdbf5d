//! Dense exact linear algebra over [`Rat`]: row reduction, kernels, solves
//! and an incremental span basis for membership tests.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::rat::Rat;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    /// The matrix unit with a single 1 at `(i, j)`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = Rat::one();
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rat::int(x)).collect()).collect())
    }

    pub fn diagonal(d: &[Rat]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Rat] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Entries in row-major order.
    pub fn as_slice(&self) -> &[Rat] {
        &self.data
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<Rat>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, s: &Rat) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn trace(&self) -> Rat {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).sum()
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols, "matrix-vector size mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        &(self * other) - &(other * self)
    }

    /// `exp` of a nilpotent matrix as a finite series; `None` if not nilpotent.
    pub fn exp_nilpotent(&self) -> Option<Matrix> {
        assert!(self.is_square());
        let mut result = Matrix::identity(self.rows);
        let mut term = Matrix::identity(self.rows);
        for k in 1..=self.rows + 1 {
            term = (&term * self).scale(&Rat::new(1, k as i64));
            if term.is_zero() {
                return Some(result);
            }
            result = &result + &term;
        }
        None
    }

    pub fn rref(&self) -> Rref {
        Rref::of(self)
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of `{x : A x = 0}` as column vectors, one per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rat>> {
        let r = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !r.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rat::zero(); self.cols];
                v[f] = Rat::one();
                for (row, &p) in r.pivots.iter().enumerate() {
                    v[p] = -&r.matrix[(row, f)];
                }
                v
            })
            .collect()
    }

    /// A particular solution of `A x = b` (free variables set to zero).
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let r = aug.rref();
        if r.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (row, &p) in r.pivots.iter().enumerate() {
            x[p] = r.matrix[(row, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rat::one();
        }
        let r = aug.rref();
        if r.pivots.len() < n || r.pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| r.matrix[(i, n + j)].clone()))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product size mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(&Rat::int(-1))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<Rat>> = Vec::deserialize(d)?;
        let c = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != c) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(Matrix::from_rows(rows))
    }
}

/// Reduced row-echelon form with pivot columns; zero rows are dropped.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn of(m: &Matrix) -> Rref {
        let mut a = m.clone();
        let (rows, cols) = (a.rows, a.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..cols {
                    a.data.swap(p * cols + j, r * cols + j);
                }
            }
            let inv = a[(r, c)].recip().unwrap();
            for j in c..cols {
                if !a[(r, j)].is_zero() {
                    a[(r, j)] = &a[(r, j)] * &inv;
                }
            }
            let pivot_row: Vec<(usize, Rat)> =
                (c..cols).filter(|&j| !a[(r, j)].is_zero()).map(|j| (j, a[(r, j)].clone())).collect();
            for i in 0..rows {
                if i == r || a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].clone();
                for (j, v) in &pivot_row {
                    a[(i, *j)] = &a[(i, *j)] - &(&f * v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        a.rows = r;
        a.data.truncate(r * cols);
        Rref { matrix: a, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Sparse vector as sorted `(index, value)` pairs with no zero values.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec(pub Vec<(usize, Rat)>);

impl SparseVec {
    pub fn from_dense(v: &[Rat]) -> Self {
        SparseVec(v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect())
    }

    pub fn to_dense(&self, len: usize) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); len];
        for (i, x) in &self.0 {
            v[*i] = x.clone();
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Rat)> {
        self.0.iter()
    }

    pub fn get(&self, i: usize) -> Rat {
        self.0.binary_search_by_key(&i, |(j, _)| *j).map(|k| self.0[k].1.clone()).unwrap_or_default()
    }
}

/// Accumulates `Σ coeff · vec` into a dense buffer.
pub fn axpy(acc: &mut [Rat], coeff: &Rat, v: &[Rat]) {
    if coeff.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += coeff * x;
        }
    }
}

pub fn is_zero_vec(v: &[Rat]) -> bool {
    v.iter().all(Rat::is_zero)
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// An echelon basis of a span that remembers how each echelon row is built
/// from the original generators, so members can be expressed in generator
/// coordinates.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    dim: usize,
    generators: usize,
    /// Echelon rows: (pivot column, sparse row normalised to 1 at the pivot,
    /// combination of generators producing it).
    rows: Vec<(usize, SparseVec, Vec<Rat>)>,
    /// Generators found to be dependent on earlier ones.
    dependent: Vec<usize>,
}

impl SpanBasis {
    pub fn new(dim: usize) -> Self {
        SpanBasis { dim, generators: 0, rows: Vec::new(), dependent: Vec::new() }
    }

    pub fn from_vectors<'a>(dim: usize, vs: impl IntoIterator<Item = &'a [Rat]>) -> Self {
        let mut b = Self::new(dim);
        for v in vs {
            b.push(v);
        }
        b
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    /// Indices of generators that were linearly dependent on earlier ones.
    pub fn dependent_generators(&self) -> &[usize] {
        &self.dependent
    }

    /// Reduces `v` against the current rows; returns the residual and the
    /// generator combination that was subtracted.
    fn reduce(&self, v: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
        assert_eq!(v.len(), self.dim, "vector length does not match span ambient dimension");
        let mut res = v.to_vec();
        let mut combo = vec![Rat::zero(); self.generators];
        for (p, row, how) in &self.rows {
            let f = res[*p].clone();
            if f.is_zero() {
                continue;
            }
            for (j, x) in row.iter() {
                res[*j] -= &f * x;
            }
            for (k, h) in how.iter().enumerate() {
                if !h.is_zero() {
                    combo[k] += &f * h;
                }
            }
        }
        (res, combo)
    }

    /// Adds a generator; returns true if it enlarged the span.
    pub fn push(&mut self, v: &[Rat]) -> bool {
        let (res, combo) = self.reduce(v);
        let idx = self.generators;
        self.generators += 1;
        for (_, _, how) in &mut self.rows {
            how.push(Rat::zero());
        }
        let Some(p) = res.iter().position(|x| !x.is_zero()) else {
            self.dependent.push(idx);
            return false;
        };
        let inv = res[p].recip().unwrap();
        let row = SparseVec::from_dense(&res.iter().map(|x| x * &inv).collect::<Vec<_>>());
        // new row = inv * (v - combo·gens)
        let mut how: Vec<Rat> = combo.iter().map(|c| -(c * &inv)).collect();
        how.push(inv.clone());
        // keep fully reduced: eliminate the new pivot from existing rows
        for (_, r, h) in &mut self.rows {
            let f = r.get(p);
            if f.is_zero() {
                continue;
            }
            let mut dense = r.to_dense(self.dim);
            for (j, x) in row.iter() {
                dense[*j] -= &f * x;
            }
            *r = SparseVec::from_dense(&dense);
            for (k, x) in how.iter().enumerate() {
                if !x.is_zero() {
                    h[k] -= &f * x;
                }
            }
        }
        self.rows.push((p, row, how));
        true
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        is_zero_vec(&self.reduce(v).0)
    }

    /// Residual of `v` modulo the span (zero iff `v` is a member).
    pub fn residual(&self, v: &[Rat]) -> Vec<Rat> {
        self.reduce(v).0
    }

    /// Coordinates of `v` in terms of the pushed generators, if it is a member.
    /// Dependent generators get coefficient zero.
    pub fn coordinates(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        let (res, combo) = self.reduce(v);
        is_zero_vec(&res).then_some(combo)
    }

    /// The echelon rows as dense vectors, sorted by pivot.
    pub fn echelon_rows(&self) -> Vec<Vec<Rat>> {
        let mut rows: Vec<_> = self.rows.iter().map(|(p, r, _)| (*p, r.to_dense(self.dim))).collect();
        rows.sort_by_key(|(p, _)| *p);
        rows.into_iter().map(|(_, r)| r).collect()
    }

    pub fn pivots(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.rows.iter().map(|(p, _, _)| *p).collect();
        p.sort_unstable();
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::int(n)
    }

    #[test]
    fn rref_and_rank() {
        let m = Matrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let rr = m.rref();
        assert_eq!(rr.pivots, vec![0, 1]);
        assert_eq!(rr.matrix, Matrix::from_rows(vec![vec![r(1), r(0), r(1)], vec![r(0), r(1), r(1)]]));
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let m = Matrix::from_i64(&[&[1, 2, 3, 4], &[0, 1, 1, 0]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(is_zero_vec(&m.mul_vec(&v)));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_i64(&[&[2, 1], &[7, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Matrix::identity(2));
        assert!(Matrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = Matrix::from_i64(&[&[1, 1], &[1, -1]]);
        assert_eq!(m.solve(&[r(3), r(1)]).unwrap(), vec![r(2), r(1)]);
        let s = Matrix::from_i64(&[&[1, 1], &[2, 2]]);
        assert!(s.solve(&[r(1), r(3)]).is_none());
    }

    #[test]
    fn exp_of_nilpotent() {
        let n = Matrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let e = n.exp_nilpotent().unwrap();
        assert_eq!(e, Matrix::from_rows(vec![
            vec![r(1), r(1), Rat::new(1, 2)],
            vec![r(0), r(1), r(1)],
            vec![r(0), r(0), r(1)],
        ]));
        assert!(Matrix::identity(2).exp_nilpotent().is_none());
    }

    #[test]
    fn span_basis_coordinates() {
        let gens = [vec![r(1), r(1), r(0)], vec![r(0), r(1), r(1)], vec![r(1), r(2), r(1)]];
        let b = SpanBasis::from_vectors(3, gens.iter().map(|v| v.as_slice()));
        assert_eq!(b.rank(), 2);
        assert_eq!(b.dependent_generators(), &[2]);
        let target = vec![r(2), r(5), r(3)];
        let c = b.coordinates(&target).unwrap();
        let mut rebuilt = vec![Rat::zero(); 3];
        for (k, g) in gens.iter().enumerate() {
            axpy(&mut rebuilt, &c[k], g);
        }
        assert_eq!(rebuilt, target);
        assert!(!b.contains(&[r(1), r(0), r(0)]));
    }
}
