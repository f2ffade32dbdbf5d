//! Finite-dimensional Lie algebras given by structure constants, and the
//! Chevalley–Eilenberg differential on `Λ•𝔨*` with trivial coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{Blade, Form};
use crate::linalg::Matrix;
use crate::rat::Rat;

/// Structure constants `[e_i, e_j] = Σ_k f^k_{ij} e_k`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LieAlg {
    dim: usize,
    /// `f[i][j][k] = f^k_{ij}`
    f: Vec<Vec<Vec<Rat>>>,
}

impl LieAlg {
    /// Builds from `(i, j, k, f^k_{ij})` with 0-based indices and `i < j`;
    /// the antisymmetric partner is filled in. Rejects Jacobi violations.
    pub fn new(dim: usize, entries: impl IntoIterator<Item = (usize, usize, usize, Rat)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("Lie algebra of dimension 0"));
        }
        let mut f = vec![vec![vec![Rat::zero(); dim]; dim]; dim];
        for (i, j, k, c) in entries {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::invalid(format!("structure constant index ({i},{j},{k}) out of range")));
            }
            if i >= j {
                return Err(Error::invalid(format!("structure constants must be listed with i < j, got ({i},{j})")));
            }
            f[i][j][k] += c.clone();
            f[j][i][k] -= c;
        }
        let alg = LieAlg { dim, f };
        alg.check_jacobi()?;
        Ok(alg)
    }

    pub fn abelian(dim: usize) -> Self {
        LieAlg { dim, f: vec![vec![vec![Rat::zero(); dim]; dim]; dim] }
    }

    /// Builds from a full bracket table `[e_i, e_j]` (vectors), checking
    /// antisymmetry and Jacobi.
    pub fn from_table(dim: usize, table: &[Vec<Vec<Rat>>]) -> Result<Self> {
        let mut entries = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                let sum: Vec<Rat> = (0..dim).map(|k| &table[i][j][k] + &table[j][i][k]).collect();
                if sum.iter().any(|x| !x.is_zero()) {
                    return Err(Error::invalid(format!("bracket not antisymmetric on ({i},{j})")));
                }
                if i < j {
                    for k in 0..dim {
                        if !table[i][j][k].is_zero() {
                            entries.push((i, j, k, table[i][j][k].clone()));
                        }
                    }
                }
            }
        }
        LieAlg::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rat {
        &self.f[i][j][k]
    }

    pub fn is_abelian(&self) -> bool {
        self.f.iter().flatten().flatten().all(Rat::is_zero)
    }

    /// Entries `(i, j, k, f^k_{ij})` with `i < j`, 0-based.
    pub fn entries(&self) -> Vec<(usize, usize, usize, Rat)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for k in 0..self.dim {
                    if !self.f[i][j][k].is_zero() {
                        out.push((i, j, k, self.f[i][j][k].clone()));
                    }
                }
            }
        }
        out
    }

    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                for (k, o) in out.iter_mut().enumerate() {
                    if !self.f[i][j][k].is_zero() {
                        *o += &c * &self.f[i][j][k];
                    }
                }
            }
        }
        out
    }

    fn check_jacobi(&self) -> Result<()> {
        let n = self.dim;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in 0..n {
                        let mut s = Rat::zero();
                        for m in 0..n {
                            s += &self.f[i][j][m] * &self.f[m][k][l];
                            s += &self.f[j][k][m] * &self.f[m][i][l];
                            s += &self.f[k][i][m] * &self.f[m][j][l];
                        }
                        if !s.is_zero() {
                            return Err(Error::Jacobi { i, j, k });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Matrix of `ad_X` on `𝔨`: `(ad_X)_{kj} = Σ_i X^i f^k_{ij}`.
    pub fn ad_matrix(&self, x: &[Rat]) -> Matrix {
        let n = self.dim;
        Matrix::from_fn(n, n, |k, j| (0..n).map(|i| &x[i] * &self.f[i][j][k]).sum())
    }

    /// `ad_X` on forms: `(ad_X α)(Y, ...) = −α([X,Y], ...) − ...`.
    pub fn ad_form(&self, x: &[Rat], a: &Form) -> Form {
        a.gl_act(&self.ad_matrix(x))
    }

    /// `δe^k = −Σ_{i<j} f^k_{ij} e^i ∧ e^j`.
    fn d_basis(&self, k: usize) -> Form {
        let mut out = Form::zero(self.dim, 2);
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let c = &self.f[i][j][k];
                if !c.is_zero() {
                    out.add_term(Blade(1 << i | 1 << j), -c);
                }
            }
        }
        out
    }

    /// The Chevalley–Eilenberg differential, `δα(x, y) = −α([x, y])` on
    /// 1-forms, extended as a graded derivation.
    pub fn ce_differential(&self, a: &Form) -> Result<Form> {
        if a.dim() != self.dim {
            return Err(Error::Dimension { expected: self.dim, found: a.dim() });
        }
        let n = self.dim;
        let mut out = Form::zero(n, a.degree() + 1);
        if a.degree() + 1 > n {
            return Ok(out);
        }
        let d: Vec<Form> = (0..n).map(|k| self.d_basis(k)).collect();
        for (b, c) in a.terms() {
            let idx = b.indices();
            for (r, &k) in idx.iter().enumerate() {
                if d[k].is_zero() {
                    continue;
                }
                let mut term = Form::scalar(n, c.clone());
                for (s, &m) in idx.iter().enumerate() {
                    term = if s == r { term.wedge(&d[k]) } else { term.wedge(&Form::basis(n, &[m])) };
                }
                if r % 2 == 1 {
                    term = term.neg();
                }
                out.add_assign_ext(&term);
            }
        }
        Ok(out)
    }

    pub fn heisenberg() -> Self {
        LieAlg::new(3, [(0, 1, 2, Rat::one())]).expect("Heisenberg algebra is a Lie algebra")
    }

    /// `so(m)` on the basis `e_i∧e_j ↔ E_ij − E_ji` (`i < j`, lexicographic),
    /// with the matrix commutator.
    pub fn so(m: usize) -> Self {
        let blades = Blade::all(m, 2);
        let mat = |b: Blade| {
            let idx = b.indices();
            let mut a = Matrix::zeros(m, m);
            a[(idx[0], idx[1])] = Rat::one();
            a[(idx[1], idx[0])] = Rat::int(-1);
            a
        };
        let mut entries = Vec::new();
        for (i, &bi) in blades.iter().enumerate() {
            for (j, &bj) in blades.iter().enumerate().skip(i + 1) {
                let c = mat(bi).commutator(&mat(bj));
                for (k, bk) in blades.iter().enumerate() {
                    let idx = bk.indices();
                    let x = c[(idx[0], idx[1])].clone();
                    if !x.is_zero() {
                        entries.push((i, j, k, x));
                    }
                }
            }
        }
        LieAlg::new(blades.len(), entries).expect("so(m) is a Lie algebra")
    }

    /// `ℝ ⋉_M ℝ^{d}`: `[e_0, e_j] = Σ_k M_{kj} e_k` for `j, k ≥ 1`, where
    /// `M` is `d × d` and indexed from the second basis vector.
    pub fn semidirect(m: &Matrix) -> Self {
        let d = m.rows();
        let mut entries = Vec::new();
        for j in 0..d {
            for k in 0..d {
                if !m[(k, j)].is_zero() {
                    entries.push((0, j + 1, k + 1, m[(k, j)].clone()));
                }
            }
        }
        LieAlg::new(d + 1, entries).expect("a semidirect product with an abelian ideal is a Lie algebra")
    }

    /// Direct sum with an abelian summand of dimension `extra`.
    pub fn plus_abelian(&self, extra: usize) -> Self {
        let n = self.dim + extra;
        let mut f = vec![vec![vec![Rat::zero(); n]; n]; n];
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    f[i][j][k] = self.f[i][j][k].clone();
                }
            }
        }
        LieAlg { dim: n, f }
    }
}

#[derive(Serialize, Deserialize)]
struct LieJson {
    dim: usize,
    f: Vec<(usize, usize, usize, Rat)>,
}

impl Serialize for LieAlg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LieJson { dim: self.dim, f: self.entries().into_iter().map(|(i, j, k, c)| (i + 1, j + 1, k + 1, c)).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LieAlg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = LieJson::deserialize(d)?;
        let mut entries = Vec::new();
        for (i, j, k, c) in raw.f {
            if i == 0 || j == 0 || k == 0 {
                return Err(serde::de::Error::custom("structure constant indices are 1-based"));
            }
            entries.push((i - 1, j - 1, k - 1, c));
        }
        LieAlg::new(raw.dim, entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::Poly;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_form(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Form {
        let cs: Vec<Rat> = Blade::all(n, k).iter().map(|_| Rat::int(rng.gen_range(-3..=3))).collect();
        Form::from_coords(n, k, &cs)
    }

    /// Solvable algebras `ℝ ⋉_M ℝ^{n-1}`: `[e_0, e_j] = Σ_k M_{kj} e_k`.
    fn semidirect(rng: &mut ChaCha8Rng, n: usize) -> LieAlg {
        LieAlg::semidirect(&Matrix::from_fn(n - 1, n - 1, |_, _| Rat::int(rng.gen_range(-2..=2))))
    }

    #[test]
    fn so_structure() {
        let so3 = LieAlg::so(3);
        // e12, e13, e23 with [e12, e13] = −e23 for E_ij − E_ji
        assert_eq!(so3.bracket(&[Rat::one(), Rat::zero(), Rat::zero()], &[Rat::zero(), Rat::one(), Rat::zero()]), vec![Rat::zero(), Rat::zero(), Rat::int(-1)]);
        assert_eq!(LieAlg::so(5).dim(), 10);
        assert!(!LieAlg::so(4).is_abelian());
    }

    #[test]
    fn heisenberg_differential() {
        let h = LieAlg::heisenberg();
        let d = h.ce_differential(&Form::basis(3, &[2])).unwrap();
        assert_eq!(d, Form::basis(3, &[0, 1]).neg());
        // oracle: δα(x,y) = −α([x,y]) evaluated on basis pairs
        for a in 0..3 {
            let alpha = Form::basis(3, &[a]);
            let da = h.ce_differential(&alpha).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let mut ei = vec![Rat::zero(); 3];
                    ei[i] = Rat::one();
                    let mut ej = vec![Rat::zero(); 3];
                    ej[j] = Rat::one();
                    let br = h.bracket(&ei, &ej);
                    let expected = -&br[a];
                    let got = da.interior(&Poly::basis(3, &[i])).interior(&Poly::basis(3, &[j]));
                    assert_eq!(got.coeff(Blade::EMPTY), expected);
                }
            }
        }
    }

    #[test]
    fn abelian_differential_vanishes() {
        let k = LieAlg::abelian(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for deg in 0..=4 {
            assert!(k.ce_differential(&random_form(&mut rng, 4, deg)).unwrap().is_zero());
        }
    }

    #[test]
    fn differential_squares_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..20 {
            let n = 3 + trial % 4;
            let k = semidirect(&mut rng, n);
            for deg in 0..n {
                let a = random_form(&mut rng, n, deg);
                let da = k.ce_differential(&a).unwrap();
                assert!(k.ce_differential(&da).unwrap().is_zero(), "δ² ≠ 0 at n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn cartan_formula_holds() {
        // ad_X = ι_X δ + δ ι_X
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = semidirect(&mut rng, 4).plus_abelian(1);
        for deg in 1..=3 {
            let a = random_form(&mut rng, 5, deg);
            let x: Vec<Rat> = (0..5).map(|_| Rat::int(rng.gen_range(-2..=2))).collect();
            let xp = Poly::from_vector(&x);
            let lhs = k.ad_form(&x, &a);
            let rhs = k.ce_differential(&a).unwrap().interior(&xp).add(&k.ce_differential(&a.interior(&xp)).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn rejects_jacobi_violation() {
        // [e1,e2]=e3, [e2,e3]=e1, [e1,e3]=e1 is not a Lie algebra
        let bad = LieAlg::new(
            3,
            [(0, 1, 2, Rat::one()), (1, 2, 0, Rat::one()), (0, 2, 0, Rat::one())],
        );
        assert!(matches!(bad, Err(Error::Jacobi { .. })));
        let so3 = LieAlg::new(3, [(0, 1, 2, Rat::one()), (1, 2, 0, Rat::one()), (0, 2, 1, Rat::int(-1))]);
        assert!(so3.is_ok());
    }

    #[test]
    fn json_round_trip() {
        let h = LieAlg::heisenberg();
        let j = serde_json::to_string(&h).unwrap();
        assert_eq!(j, r#"{"dim":3,"f":[[1,2,3,"1"]]}"#);
        assert_eq!(serde_json::from_str::<LieAlg>(&j).unwrap(), h);
    }
}
