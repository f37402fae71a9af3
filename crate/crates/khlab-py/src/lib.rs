use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use khlab::algebra::Ring;
use khlab::concordance::{self, Alpha};
use khlab::diagram::movie::MovieScript;
use khlab::diagram::OrientedDiagram;
use khlab::homology::Coeffs;
use khlab::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::Internal(_) | Error::Inconsistent | Error::Burnside(_) | Error::NotChainMap(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn ring(theory: &str) -> PyResult<Ring> {
    match theory {
        "even" => Ok(Ring::Even),
        "odd" => Ok(Ring::Odd),
        "unified" => Ok(Ring::Unified),
        "mod2" => Ok(Ring::Mod2),
        _ => Err(PyValueError::new_err(format!("unknown theory '{theory}'"))),
    }
}

fn coeffs(c: &str) -> PyResult<Coeffs> {
    match c {
        "Z" => Ok(Coeffs::Z),
        "F2" => Ok(Coeffs::F2),
        "Q" => Ok(Coeffs::Q),
        _ => Err(PyValueError::new_err(format!("unknown coefficients '{c}'"))),
    }
}

/// An oriented link diagram given by a PD code or a built-in name.
#[pyclass(name = "Diagram", frozen, from_py_object)]
#[derive(Clone)]
struct PyDiagram(OrientedDiagram);

#[pymethods]
impl PyDiagram {
    #[new]
    fn new(pd: &str) -> PyResult<Self> {
        match khlab::corpus::named(pd) {
            Some(d) => Ok(PyDiagram(d)),
            None => OrientedDiagram::parse(pd).map(PyDiagram).map_err(err),
        }
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn components(&self) -> usize {
        self.0.components()
    }

    #[getter]
    fn writhe(&self) -> i64 {
        self.0.writhe()
    }

    #[getter]
    fn basepoint(&self) -> Option<u32> {
        self.0.basepoint()
    }

    fn mirror(&self) -> Self {
        PyDiagram(self.0.mirror())
    }

    #[pyo3(signature = (bp=None))]
    fn with_basepoint(&self, bp: Option<u32>) -> PyResult<Self> {
        self.0.with_basepoint(bp).map(PyDiagram).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Diagram('{}')", self.0)
    }
}

/// A bigraded Khovanov chain complex.
#[pyclass(name = "Complex", frozen)]
struct PyComplex(khlab::complexes::Complex);

#[pymethods]
impl PyComplex {
    #[new]
    #[pyo3(signature = (diagram, theory="odd", reduced=false))]
    fn new(diagram: &PyDiagram, theory: &str, reduced: bool) -> PyResult<Self> {
        let r = ring(theory)?;
        let c = if reduced { khlab::complexes::build_reduced(&diagram.0, r) } else { khlab::complexes::build_complex(&diagram.0, r) };
        c.map(PyComplex).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn is_chain_complex(&self) -> bool {
        self.0.is_chain_complex()
    }

    fn euler(&self) -> String {
        self.0.euler().to_string()
    }

    /// `[(i, j, rank, torsion)]` sorted by bigrading.
    #[pyo3(signature = (coeff="Z"))]
    fn homology(&self, coeff: &str) -> PyResult<Vec<(i64, i64, usize, Vec<u64>)>> {
        let r = khlab::homology::report(&self.0, coeffs(coeff)?);
        Ok(r.bigradings.into_iter().map(|b| (b.i, b.j, b.rank, b.torsion)).collect())
    }
}

#[pyfunction]
#[pyo3(signature = (diagram, theory="odd", coeff="Z", reduced=false))]
fn homology(diagram: &PyDiagram, theory: &str, coeff: &str, reduced: bool) -> PyResult<Vec<(i64, i64, usize, Vec<u64>)>> {
    PyComplex::new(diagram, theory, reduced)?.homology(coeff)
}

/// Unnormalized Jones polynomial from the Kauffman bracket.
#[pyfunction]
fn jones(diagram: &PyDiagram) -> String {
    khlab::jones::unnormalized_jones(&diagram.0).to_string()
}

#[pyfunction]
fn s_invariant(diagram: &PyDiagram) -> PyResult<i64> {
    concordance::s_invariant(&diagram.0).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (diagram, alpha="even"))]
fn alpha_invariants<'py>(py: Python<'py>, diagram: &PyDiagram, alpha: &str) -> PyResult<Bound<'py, PyDict>> {
    let a = match alpha {
        "even" => Alpha::BocksteinEven,
        "odd" => Alpha::BocksteinOdd,
        _ => return Err(PyValueError::new_err(format!("unknown alpha '{alpha}'"))),
    };
    let r = concordance::alpha_invariants(&diagram.0, a).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("r_plus", r.r_plus)?;
    d.set_item("s_plus", r.s_plus)?;
    d.set_item("r_minus", r.r_minus)?;
    d.set_item("s_minus", r.s_minus)?;
    Ok(d)
}

#[pyfunction]
fn burnside_verify<'py>(py: Python<'py>, diagram: &PyDiagram) -> PyResult<Bound<'py, PyDict>> {
    let r = khlab::burnside::verify(&diagram.0).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("squares", r.squares)?;
    d.set_item("ladybugs", r.ladybugs)?;
    d.set_item("hexagons", r.hexagons)?;
    d.set_item("passed", r.passed())?;
    Ok(d)
}

/// Chain map of a movie script: `(is_chain_map, (di, dj))`.
#[pyfunction]
#[pyo3(signature = (start, script, theory="odd"))]
fn movie_map(start: &PyDiagram, script: &str, theory: &str) -> PyResult<(bool, (i64, i64))> {
    let s = MovieScript::parse(script).map_err(err)?;
    let w = khlab::moves::movie_map(&start.0, &s, ring(theory)?).map_err(err)?;
    Ok((w.is_chain_map, (w.shift.i, w.shift.j)))
}

/// Run one invariant suite; returns the failure messages.
#[pyfunction]
#[pyo3(signature = (suite, diagrams, seed=0))]
fn verify(suite: &str, diagrams: Vec<PyDiagram>, seed: u64) -> PyResult<Vec<String>> {
    let ds: Vec<OrientedDiagram> = diagrams.into_iter().map(|d| d.0).collect();
    Ok(khlab::verify::run_suite(suite, &ds, seed).map_err(err)?.failures)
}

#[pymodule]
fn _khlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDiagram>()?;
    m.add_class::<PyComplex>()?;
    m.add_function(wrap_pyfunction!(homology, m)?)?;
    m.add_function(wrap_pyfunction!(jones, m)?)?;
    m.add_function(wrap_pyfunction!(s_invariant, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_invariants, m)?)?;
    m.add_function(wrap_pyfunction!(burnside_verify, m)?)?;
    m.add_function(wrap_pyfunction!(movie_map, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("SUITES", khlab::verify::SUITES.to_vec())?;
    Ok(())
}
