//! Python module `steinberg`: Betti numbers, Hecke polynomials and the
//! Manin-symbol oracle.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use steinberg_core::hecke::{hecke_cosets, hecke_in_basis, verify_eigen_chain};
use steinberg_core::homology::build_complex;
use steinberg_core::linalg::{Coeff, Field};
use steinberg_core::oracle;
use steinberg_core::voronoi::CellComplexTable;
use steinberg_core::Error;

create_exception!(steinberg, PreconditionError, PyException);
create_exception!(steinberg, UndeterminedError, PyException);
create_exception!(steinberg, InvariantError, PyException);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(m) | Error::Unsupported(m) | Error::Io(m) => PyValueError::new_err(m),
        Error::Precondition(m) => PreconditionError::new_err(m),
        Error::Undetermined(m) => UndeterminedError::new_err(m),
        Error::Invariant(m) => InvariantError::new_err(m),
    }
}

fn field(s: &str) -> PyResult<Field> {
    s.parse().map_err(to_py)
}

/// Number of cell orbits in each dimension.
#[pyfunction]
fn cell_orbit_counts(n: usize) -> PyResult<BTreeMap<usize, usize>> {
    Ok(CellComplexTable::cached(n).map_err(to_py)?.orbit_counts())
}

#[pyfunction]
#[pyo3(signature = (n, level, field_spec = "Q"))]
fn betti_numbers(n: usize, level: u64, field_spec: &str) -> PyResult<Vec<usize>> {
    build_complex(n, level, field(field_spec)?).and_then(|c| c.betti_numbers()).map_err(to_py)
}

/// `(matrix, char_poly, eigenvalues)` of `T(ell, k)` on `H_degree`, with
/// entries rendered as decimal strings.
#[pyfunction]
#[pyo3(signature = (n, level, ell, k = 1, degree = 0, field_spec = "Q", budget = 256))]
#[allow(clippy::type_complexity)]
fn hecke(
    n: usize,
    level: u64,
    ell: u64,
    k: usize,
    degree: usize,
    field_spec: &str,
    budget: usize,
) -> PyResult<(Vec<Vec<String>>, String, Vec<(String, usize)>)> {
    let f = field(field_spec)?;
    let run = || {
        let c = build_complex(n, level, f)?;
        let op = hecke_cosets(n, ell, k)?;
        hecke_in_basis(&c, &op, &c.homology(degree)?, budget)
    };
    let r = run().map_err(to_py)?;
    let matrix = r.matrix.iter().map(|row| row.iter().map(|x| f.render(x)).collect()).collect();
    let eig = r.eigenvalues.iter().map(|(x, m)| (f.render(x), *m)).collect();
    Ok((matrix, r.char_poly.render(), eig))
}

#[pyfunction]
fn manin_dim(level: u64) -> PyResult<usize> {
    oracle::manin_dim(level).map_err(to_py)
}

#[pyfunction]
fn manin_charpoly(level: u64, ell: u64) -> PyResult<String> {
    Ok(oracle::manin_hecke(level, ell).map_err(to_py)?.1.render())
}

/// Certifies `T(ell,1) x = a x` for generator `cycle` of `H_1` (n = 2) and
/// returns the certificate sizes.
#[pyfunction]
#[pyo3(signature = (level, ell, a, cycle = 0, field_spec = "Q", budget = 256))]
fn nofake(level: u64, ell: u64, a: i64, cycle: usize, field_spec: &str, budget: usize) -> PyResult<BTreeMap<String, usize>> {
    let f = field(field_spec)?;
    let run = || {
        let c = build_complex(2, level, f)?;
        let h = c.homology(1)?;
        let x = h.cycles.get(cycle).cloned().ok_or_else(|| Error::InvalidInput(format!("no generator {cycle}")))?;
        verify_eigen_chain(&c, &x, &hecke_cosets(2, ell, 1)?, &Coeff::from_integer(a.into()), budget)
    };
    let w = run().map_err(to_py)?;
    if !w.check().map_err(to_py)? {
        return Err(InvariantError::new_err("certificate fails its identity"));
    }
    Ok(BTreeMap::from([
        ("theta_terms".to_string(), w.theta_x.len()),
        ("image_terms".to_string(), w.image.len()),
        ("y_terms".to_string(), w.y.len()),
        ("u_terms".to_string(), w.u.len()),
    ]))
}

#[pymodule]
fn steinberg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(cell_orbit_counts, m)?)?;
    m.add_function(wrap_pyfunction!(betti_numbers, m)?)?;
    m.add_function(wrap_pyfunction!(hecke, m)?)?;
    m.add_function(wrap_pyfunction!(manin_dim, m)?)?;
    m.add_function(wrap_pyfunction!(manin_charpoly, m)?)?;
    m.add_function(wrap_pyfunction!(nofake, m)?)?;
    let py = m.py();
    m.add("PreconditionError", py.get_type::<PreconditionError>())?;
    m.add("UndeterminedError", py.get_type::<UndeterminedError>())?;
    m.add("InvariantError", py.get_type::<InvariantError>())?;
    Ok(())
}
