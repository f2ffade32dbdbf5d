//! Python bindings. Rationals cross the boundary as `"p/q"` strings and
//! structured results as JSON text.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use elg_core::data_set::{DataSet, Descriptor, Family};
use elg_core::elgebra::{self, ElgebraJson, Twist};
use elg_core::error::Error;
use elg_core::exc;
use elg_core::exterior::Form;
use elg_core::lie::LieAlg;
use elg_core::rat::Rat;
use elg_core::subspace::{self, SubspaceJson};
use elg_core::suite::{run_all, SuiteOptions};

fn err(e: Error) -> PyErr {
    match e {
        Error::Invalid(_) | Error::Json(_) | Error::Dimension { .. } | Error::Degree { .. } | Error::DataSetMismatch(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_json(v: &impl serde::Serialize) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn from_json<T: serde::de::DeserializeOwned>(s: &str) -> PyResult<T> {
    serde_json::from_str(s).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn rats(v: &[String]) -> PyResult<Vec<Rat>> {
    v.iter().map(|s| s.parse::<Rat>().map_err(|e| PyValueError::new_err(e.to_string()))).collect()
}

fn strs(v: &[Rat]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

#[pyclass(name = "DataSet", module = "elg", frozen)]
#[derive(Clone)]
struct PyDataSet {
    inner: Arc<DataSet>,
}

#[pymethods]
impl PyDataSet {
    /// `family` is one of gl, opq, exc, slwedge2; opq takes `p`, `q` or
    /// `n` (meaning O(n, n)).
    #[new]
    #[pyo3(signature = (family, n=None, p=None, q=None))]
    fn new(family: &str, n: Option<usize>, p: Option<usize>, q: Option<usize>) -> PyResult<Self> {
        let fam: Family = family.parse().map_err(err)?;
        let need = |x: Option<usize>| x.ok_or_else(|| PyValueError::new_err(format!("family {fam} needs n")));
        let desc = match fam {
            Family::Gl => Descriptor::gl(need(n)?),
            Family::Exceptional => Descriptor::exceptional(need(n)?),
            Family::SlWedge2 => Descriptor::slwedge2(need(n)?),
            Family::Opq => match (p, q) {
                (Some(p), Some(q)) => Descriptor::opq(p, q),
                _ => Descriptor::onn(need(n)?),
            },
        };
        Ok(PyDataSet { inner: Arc::new(DataSet::build(desc).map_err(err)?) })
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(PyDataSet { inner: Arc::new(DataSet::from_json(&from_json(s)?).map_err(err)?) })
    }

    fn to_json(&self) -> String {
        to_json(&self.inner.to_json())
    }

    #[getter]
    fn dim_e(&self) -> usize {
        self.inner.dim_e()
    }

    #[getter]
    fn dim_n(&self) -> usize {
        self.inner.dim_n()
    }

    #[getter]
    fn embed_scale(&self) -> String {
        self.inner.embed_scale().to_string()
    }

    #[getter]
    fn g_dim(&self) -> usize {
        self.inner.g_basis().len()
    }

    /// `S(u, v)` in coordinates of `N`.
    fn sym(&self, u: Vec<String>, v: Vec<String>) -> PyResult<Vec<String>> {
        Ok(strs(&self.inner.sym_to_n(&rats(&u)?, &rats(&v)?).map_err(err)?))
    }

    /// Admissibility certificate as JSON.
    fn check_admissible(&self) -> String {
        to_json(&self.inner.check_admissible())
    }

    fn calibrate(&self) -> PyResult<String> {
        Ok(self.inner.calibrate().map_err(err)?.to_string())
    }

    fn __repr__(&self) -> String {
        let d = self.inner.descriptor();
        format!("DataSet({}, n={}, dimE={}, dimN={})", d.family, d.n, self.inner.dim_e(), self.inner.dim_n())
    }
}

/// Report of Jacobi, representation and dimension checks, as JSON.
#[pyfunction]
fn verify_algebra(n: usize) -> PyResult<String> {
    Ok(to_json(&exc::verify_algebra(n).map_err(err)?))
}

#[pyfunction]
fn algebra_dim(n: usize) -> usize {
    exc::algebra_dim(n)
}

#[pyclass(name = "Subspace", module = "elg", frozen)]
#[derive(Clone)]
struct PySubspace {
    ds: Arc<DataSet>,
    inner: subspace::Subspace,
}

#[pymethods]
impl PySubspace {
    /// `ambient` is "E" or "Edual"; rows are lists of rationals.
    #[new]
    #[pyo3(signature = (dataset, rows, ambient="E"))]
    fn new(dataset: &PyDataSet, rows: Vec<Vec<String>>, ambient: &str) -> PyResult<Self> {
        let amb = from_json(&format!("{ambient:?}"))?;
        let rows = rows.iter().map(|r| rats(r)).collect::<PyResult<Vec<_>>>()?;
        let inner = subspace::Subspace::new(amb, dataset.inner.dim_e(), &rows).map_err(err)?;
        Ok(PySubspace { ds: dataset.inner.clone(), inner })
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        let j: SubspaceJson = from_json(s)?;
        let ds = Arc::new(DataSet::build(j.dataset).map_err(err)?);
        let inner = subspace::Subspace::from_json(&j, &ds).map_err(err)?;
        Ok(PySubspace { ds, inner })
    }

    /// The kernel of the anchor of the exceptional data set.
    #[staticmethod]
    fn standard_colagrangian(dataset: &PyDataSet) -> Self {
        PySubspace { ds: dataset.inner.clone(), inner: subspace::standard_colagrangian(dataset.inner.n()) }
    }

    fn to_json(&self) -> String {
        to_json(&self.inner.to_json(&self.ds))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn codim(&self) -> usize {
        self.inner.codim()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.inner.rows().iter().map(|r| strs(r)).collect()
    }

    fn is_isotropic(&self) -> PyResult<bool> {
        subspace::is_isotropic(&self.ds, &self.inner).map_err(err)
    }

    fn is_coisotropic(&self) -> PyResult<bool> {
        subspace::is_coisotropic(&self.ds, &self.inner).map_err(err)
    }

    fn is_lagrangian(&self) -> PyResult<bool> {
        subspace::is_lagrangian(&self.ds, &self.inner).map_err(err)
    }

    fn is_colagrangian(&self) -> PyResult<bool> {
        subspace::is_colagrangian(&self.ds, &self.inner).map_err(err)
    }

    /// Lagrangian normal form as JSON (label, word, frame).
    fn normalize_lagrangian(&self) -> PyResult<String> {
        Ok(to_json(&subspace::normalize_lagrangian(&self.ds, &self.inner).map_err(err)?))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

#[pyclass(name = "LieAlgebra", module = "elg", frozen)]
#[derive(Clone)]
struct PyLie {
    inner: LieAlg,
}

#[pymethods]
impl PyLie {
    /// `{"dim": d, "f": [[i, j, k, "c"], ...]}` with 1-based indices.
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(PyLie { inner: from_json(s)? })
    }

    #[staticmethod]
    fn abelian(dim: usize) -> Self {
        PyLie { inner: LieAlg::abelian(dim) }
    }

    /// Heisenberg algebra plus `extra` abelian directions.
    #[staticmethod]
    #[pyo3(signature = (extra=0))]
    fn heisenberg(extra: usize) -> Self {
        PyLie { inner: LieAlg::heisenberg().plus_abelian(extra) }
    }

    #[staticmethod]
    fn so(m: usize) -> Self {
        PyLie { inner: LieAlg::so(m) }
    }

    fn to_json(&self) -> String {
        to_json(&self.inner)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Whether `(F₁, F₄)` (given as JSON forms) satisfies the integrability
    /// conditions.
    #[pyo3(signature = (f1=None, f4=None))]
    fn twist_integrable(&self, f1: Option<&str>, f4: Option<&str>) -> PyResult<bool> {
        let t = twist(self.inner.dim(), f1, f4)?;
        elgebra::check_twist_integrability(&self.inner, &t).map_err(err)
    }
}

fn twist(d: usize, f1: Option<&str>, f4: Option<&str>) -> PyResult<Twist> {
    let f1 = match f1 {
        Some(s) => from_json::<Form>(s)?,
        None => Form::zero(d, 1),
    };
    let f4 = match f4 {
        Some(s) => from_json::<Form>(s)?,
        None => Form::zero(d, 4),
    };
    Twist::new(f1, f4).map_err(err)
}

#[pyclass(name = "Elgebra", module = "elg", frozen)]
struct PyElgebra {
    inner: elgebra::Elgebra,
}

#[pymethods]
impl PyElgebra {
    /// Group elgebra of `lie` twisted by optional JSON forms `f1`, `f4`.
    #[staticmethod]
    #[pyo3(signature = (lie, f1=None, f4=None))]
    fn from_lie_twisted(lie: &PyLie, f1: Option<&str>, f4: Option<&str>) -> PyResult<Self> {
        let n = lie.inner.dim();
        let ds = Arc::new(DataSet::build(Descriptor::exceptional(n)).map_err(err)?);
        let t = twist(n, f1, f4)?;
        Ok(PyElgebra { inner: elgebra::Elgebra::from_lie_twisted(ds, &lie.inner, &t).map_err(err)? })
    }

    /// A Lie algebra on `E` itself (same basis).
    #[staticmethod]
    fn from_lie(dataset: &PyDataSet, lie: &PyLie) -> PyResult<Self> {
        Ok(PyElgebra { inner: elgebra::Elgebra::from_lie(dataset.inner.clone(), &lie.inner).map_err(err)? })
    }

    #[staticmethod]
    fn abelian(dataset: &PyDataSet) -> Self {
        PyElgebra { inner: elgebra::Elgebra::abelian(dataset.inner.clone()) }
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        let j: ElgebraJson = from_json(s)?;
        Ok(PyElgebra { inner: elgebra::Elgebra::from_json(&j, None).map_err(err)? })
    }

    fn to_json(&self) -> String {
        to_json(&self.inner.to_json())
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn dataset(&self) -> PyDataSet {
        PyDataSet { inner: self.inner.dataset_arc() }
    }

    fn bracket(&self, u: Vec<String>, v: Vec<String>) -> PyResult<Vec<String>> {
        let (u, v) = (rats(&u)?, rats(&v)?);
        if u.len() != self.inner.dim() || v.len() != self.inner.dim() {
            return Err(PyValueError::new_err(format!("vectors must have length {}", self.inner.dim())));
        }
        Ok(strs(&self.inner.bracket(&u, &v)))
    }

    /// Rank of `D: N → E`.
    fn rank_d(&self) -> usize {
        self.inner.d_matrix().rank()
    }

    /// Verification report as JSON.
    fn verify(&self) -> String {
        to_json(&elgebra::verify_elgebra(&self.inner))
    }

    fn is_subalgebra(&self, v: &PySubspace) -> PyResult<bool> {
        elgebra::is_subalgebra(&self.inner, &v.inner).map_err(err)
    }

    fn check_parallelisation(&self, v: &PySubspace) -> PyResult<String> {
        Ok(to_json(&elgebra::check_parallelisation(&self.inner, &v.inner).map_err(err)?))
    }

    fn duality_pair(&self, v1: &PySubspace, v2: &PySubspace) -> PyResult<String> {
        Ok(to_json(&elgebra::duality_pair(&self.inner, &v1.inner, &v2.inner).map_err(err)?))
    }
}

/// Runs the acceptance battery; returns `(id, title, passed)` triples.
#[pyfunction]
#[pyo3(signature = (quick=true, seed=0))]
fn run_suite(py: Python<'_>, quick: bool, seed: u64) -> Vec<(usize, String, bool)> {
    let out = py.allow_threads(|| run_all(&SuiteOptions { quick, seed }));
    out.into_iter().map(|r| (r.outcome.id, r.outcome.title, r.outcome.passed)).collect()
}

#[pymodule]
fn elg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataSet>()?;
    m.add_class::<PySubspace>()?;
    m.add_class::<PyLie>()?;
    m.add_class::<PyElgebra>()?;
    m.add_function(wrap_pyfunction!(verify_algebra, m)?)?;
    m.add_function(wrap_pyfunction!(algebra_dim, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
