//! Python bindings: `import qpt`.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use qpt_core::exchange::{self, Context, Direction, Explore};
use qpt_core::path_algebra::{self, Finiteness};
use qpt_core::polygon::{exconvrep_sequence, polygon_quiver};
use qpt_core::silting::{initial_silting, silting_mutate};
use qpt_core::{io, qp, VertexSubset};

create_exception!(qpt, QptError, PyException);

fn err(e: qpt_core::Error) -> PyErr {
    QptError::new_err(e.to_string())
}

/// A quiver with potential.
#[pyclass(name = "QP", module = "qpt", frozen)]
struct PyQp {
    inner: qpt_core::Qp,
}

#[pymethods]
impl PyQp {
    /// Parses the JSON file format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyQp {
            inner: io::parse_qp(text).map_err(err)?,
        })
    }

    #[staticmethod]
    fn linear_a(n: usize) -> Self {
        PyQp {
            inner: qpt_core::Qp::linear_a(n),
        }
    }

    fn to_json(&self) -> String {
        io::serialize_qp(&self.inner)
    }

    #[getter]
    fn vertices(&self) -> Vec<String> {
        self.inner.vertices().to_vec()
    }

    /// `(id, src, tgt)` per arrow.
    #[getter]
    fn arrows(&self) -> Vec<(String, String, String)> {
        self.inner
            .quiver
            .arrows
            .iter()
            .map(|a| (a.id.clone(), a.src.clone(), a.tgt.clone()))
            .collect()
    }

    /// `(coefficient, cycle)` per potential term.
    #[getter]
    fn potential(&self) -> Vec<(String, Vec<String>)> {
        self.inner
            .potential
            .terms()
            .map(|(c, x)| (x.to_string(), c.clone()))
            .collect()
    }

    fn mutate(&self, k: &str) -> PyResult<Self> {
        Ok(PyQp {
            inner: qp::mutate(&self.inner, k).map_err(err)?,
        })
    }

    fn restrict(&self, subset: Vec<String>) -> PyResult<Self> {
        let sub = VertexSubset::new(subset);
        sub.check(&self.inner).map_err(err)?;
        Ok(PyQp {
            inner: qp::restrict(&self.inner, &sub),
        })
    }

    /// Relabeled copy that is equal for isomorphic QPs.
    fn canonical(&self) -> Self {
        PyQp {
            inner: qp::canonical_form(&self.inner).0,
        }
    }

    fn ext1_matrix(&self) -> Vec<Vec<i64>> {
        qp::ext1_matrix(&self.inner)
    }

    /// Graded dimensions and a verdict string such as `Finite(6)`.
    #[pyo3(signature = (max_degree=None))]
    fn jacobian_dims(&self, max_degree: Option<usize>) -> PyResult<(Vec<usize>, String)> {
        let bound = max_degree.unwrap_or_else(path_algebra::max_degree_from_env);
        let d = path_algebra::jacobian_dims(&self.inner, bound).map_err(err)?;
        let verdict = match d.verdict {
            Finiteness::Finite(t) => format!("Finite({t})"),
            Finiteness::InfiniteDetected => "InfiniteDetected".to_string(),
            Finiteness::Unknown(b) => format!("Unknown({b})"),
        };
        Ok((d.dims, verdict))
    }

    #[pyo3(signature = (subset, max_degree=None))]
    fn eje(&self, subset: Vec<String>, max_degree: Option<usize>) -> PyResult<Self> {
        let bound = max_degree.unwrap_or_else(path_algebra::max_degree_from_env);
        let e = path_algebra::eje_quiver(&self.inner, &VertexSubset::new(subset), bound).map_err(err)?;
        Ok(PyQp { inner: e.to_qp() })
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "QP({} vertices, {} arrows, {} terms)",
            self.inner.n(),
            self.inner.quiver.arrows.len(),
            self.inner.potential.len()
        )
    }
}

/// Exchange graph of hearts reached from the standard heart.
#[pyclass(name = "ExchangeGraph", module = "qpt", frozen)]
struct PyExchangeGraph {
    base: qpt_core::Qp,
    graph: exchange::ExchangeGraph,
}

#[pymethods]
impl PyExchangeGraph {
    #[new]
    #[pyo3(signature = (qp, depth, direction="both"))]
    fn new(qp: &PyQp, depth: usize, direction: &str) -> PyResult<Self> {
        let dir = match direction {
            "both" => Explore::Both,
            "forward" => Explore::Forward,
            d => return Err(QptError::new_err(format!("unknown direction `{d}`"))),
        };
        let ctx = Context::new(&qp.inner).map_err(err)?;
        Ok(PyExchangeGraph {
            base: qp.inner.clone(),
            graph: exchange::explore(&ctx, depth, dir),
        })
    }

    fn __len__(&self) -> usize {
        self.graph.len()
    }

    #[getter]
    fn keys(&self) -> Vec<String> {
        self.graph.hearts.iter().map(|h| h.key.clone()).collect()
    }

    /// `(src, tgt, label)` per tilt.
    #[getter]
    fn edges(&self) -> Vec<(usize, usize, String)> {
        self.graph
            .edges
            .iter()
            .map(|e| (e.src, e.tgt, e.label.label()))
            .collect()
    }

    fn find(&self, key: &str) -> Option<usize> {
        self.graph.find(key)
    }

    /// Heart quiver at a vertex, evolved by mutation along the tilts.
    fn quiver(&self, v: usize) -> PyResult<PyQp> {
        let h = self
            .graph
            .hearts
            .get(v)
            .ok_or_else(|| QptError::new_err(format!("no heart {v}")))?;
        Ok(PyQp { inner: h.qp.clone() })
    }

    fn is_regular(&self) -> bool {
        exchange::regularity_report(&self.graph).is_regular(self.base.n())
    }

    fn to_json(&self) -> String {
        io::exchange_graph_value(&self.graph).to_string()
    }

    fn to_dot(&self) -> String {
        io::exchange_graph_dot(&self.graph)
    }

    /// Quotient graph for the subcategory on `subset`, as JSON.
    fn quotient_json(&self, subset: Vec<String>) -> PyResult<String> {
        let sub = exchange::subset_indices(&self.base, &VertexSubset::new(subset)).map_err(err)?;
        let q = exchange::quotient_graph(&self.graph, &sub);
        Ok(io::quotient_graph_value(&self.graph, &q).to_string())
    }
}

/// g-matrix and pairing with the c-matrix after a word of mutations
/// `(vertex index, forward)`.
#[pyfunction]
fn silting_word(qp: &PyQp, word: Vec<(usize, bool)>) -> PyResult<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    let ctx = Context::new(&qp.inner).map_err(err)?;
    let mut s = initial_silting(&ctx);
    for (k, fwd) in word {
        let dir = if fwd { Direction::Forward } else { Direction::Backward };
        s = silting_mutate(&ctx, &s, k, dir).map_err(err)?;
    }
    let p = s.pairing();
    Ok((s.g, p))
}

/// Flip sequence of a polygon spec: `(flips, first_phase, final quiver)`.
#[pyfunction]
fn polygon_flips(spec: &str) -> PyResult<(Vec<(usize, usize)>, usize, PyQp)> {
    let (pp, t) = io::parse_polygon(spec).map_err(err)?;
    let seq = exconvrep_sequence(&pp, &t).map_err(err)?;
    let q = polygon_quiver(&pp, &seq.result).map_err(err)?;
    Ok((seq.flips, seq.first_phase, PyQp { inner: q }))
}

#[pymodule]
fn qpt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyQp>()?;
    m.add_class::<PyExchangeGraph>()?;
    m.add_function(wrap_pyfunction!(silting_word, m)?)?;
    m.add_function(wrap_pyfunction!(polygon_flips, m)?)?;
    m.add("QptError", m.py().get_type::<QptError>())?;
    Ok(())
}
