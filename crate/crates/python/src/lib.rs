//! Python bindings for `polarpunct`.
//!
//! Build with `maturin develop -m crates/python/Cargo.toml --features extension-module`
//! or copy the compiled library next to `python/smoke_test.py` as `polarpunct.so`.
//! Bit vectors come back as `bytes`, one bit per byte.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use polarpunct::codec::{self, CrcPoly, MessageFrame, ScDecoder, SclDecoder};
use polarpunct::construct::{Construction, PolarCodeSpec, ReliabilityProfile, PW_BETA};
use polarpunct::puncture::{analyze_pattern, qup_pattern, wqp_pattern, PuncturePattern};
use polarpunct::sim::{run_sweep, to_csv, SimConfig};
use polarpunct::{bitops, degrade};

fn py_err(e: polarpunct::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_construction(text: &str) -> PyResult<Construction> {
    let (kind, arg) = match text.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (text, None),
    };
    let arg = arg
        .map(|a| a.trim().parse::<f64>())
        .transpose()
        .map_err(|e| PyValueError::new_err(format!("construction `{text}`: {e}")))?;
    match (kind.trim(), arg) {
        ("bec", Some(erasure)) => Ok(Construction::Bec { erasure }),
        ("ga", Some(design_esn0_db)) => Ok(Construction::Ga { design_esn0_db }),
        ("pw", beta) => Ok(Construction::Pw {
            beta: beta.unwrap_or(PW_BETA),
        }),
        _ => Err(PyValueError::new_err(format!(
            "construction `{text}`: expected bec:<eps>, ga:<design Es/N0 dB> or pw[:beta]"
        ))),
    }
}

fn parse_crc(crc: Option<u32>) -> PyResult<Option<CrcPoly>> {
    match crc {
        None | Some(0) => Ok(None),
        Some(8) => Ok(Some(CrcPoly::Crc8)),
        Some(16) => Ok(Some(CrcPoly::Crc16)),
        Some(w) => Err(PyValueError::new_err(format!("no CRC of width {w}"))),
    }
}

/// A polar code: reliability profile plus information set.
#[pyclass(name = "PolarCode", frozen)]
struct PyPolarCode {
    profile: ReliabilityProfile,
    spec: PolarCodeSpec,
}

#[pymethods]
impl PyPolarCode {
    /// `construction` is `bec:<eps>`, `ga:<design Es/N0 dB>` or `pw[:beta]`;
    /// `crc` is 0, 8 or 16.
    #[new]
    #[pyo3(signature = (n, k, construction, crc=None))]
    fn new(n: u32, k: usize, construction: &str, crc: Option<u32>) -> PyResult<Self> {
        let profile = parse_construction(construction)?.build(n).map_err(py_err)?;
        let spec = PolarCodeSpec::from_profile(&profile, k, parse_crc(crc)?).map_err(py_err)?;
        Ok(Self { profile, spec })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.spec.n
    }

    #[getter]
    fn k(&self) -> usize {
        self.spec.k
    }

    #[getter]
    fn block_len(&self) -> usize {
        self.spec.block_len
    }

    #[getter]
    fn info_set(&self) -> Vec<u32> {
        self.spec.info_set.clone()
    }

    #[getter]
    fn frozen_set(&self) -> Vec<u32> {
        self.spec.frozen_set.clone()
    }

    #[getter]
    fn metric(&self) -> Vec<f64> {
        self.profile.metric.clone()
    }

    #[getter]
    fn error_prob(&self) -> Option<Vec<f64>> {
        self.profile.error_prob.clone()
    }

    /// Indices from most to least reliable.
    fn descending_order(&self) -> Vec<u32> {
        self.profile.descending_order()
    }

    /// Codeword for `k` message bits, CRC appended when configured.
    fn encode(&self, info: Vec<u8>) -> PyResult<Vec<u8>> {
        Ok(MessageFrame::build(&info, &self.spec)
            .map_err(py_err)?
            .codeword())
    }

    /// Message bits from length-`N` channel LLRs.
    #[pyo3(signature = (llrs, list_size=1))]
    fn decode(&self, llrs: Vec<f64>, list_size: usize) -> PyResult<Vec<u8>> {
        if llrs.len() != self.spec.block_len {
            return Err(PyValueError::new_err(format!(
                "expected {} LLRs, got {}",
                self.spec.block_len,
                llrs.len()
            )));
        }
        let u = match list_size {
            0 => return Err(PyValueError::new_err("list_size must be positive")),
            1 => ScDecoder::new(&self.spec).decode(&llrs),
            l => SclDecoder::new(&self.spec, l).decode(&llrs),
        };
        Ok(codec::extract_info(&u, &self.spec))
    }

    fn __repr__(&self) -> String {
        format!(
            "PolarCode(N={}, K={}, crc_bits={}, method={})",
            self.spec.block_len, self.spec.k, self.spec.crc_bits, self.profile.method
        )
    }
}

/// A puncturing pattern.
#[pyclass(name = "PuncturePattern", frozen)]
struct PyPattern {
    inner: PuncturePattern,
}

#[pymethods]
impl PyPattern {
    #[staticmethod]
    fn qup(n: u32, q: usize) -> PyResult<Self> {
        Ok(Self {
            inner: qup_pattern(n, q).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn wqp(code: &PyPolarCode, q: usize) -> PyResult<Self> {
        Ok(Self {
            inner: wqp_pattern(&code.spec, &code.profile, q).map_err(py_err)?,
        })
    }

    /// Pattern from the coded positions the transmitter drops.
    #[staticmethod]
    fn custom(n: u32, coded: Vec<u32>) -> PyResult<Self> {
        Ok(Self {
            inner: PuncturePattern::custom(n, coded).map_err(py_err)?,
        })
    }

    #[getter]
    fn q(&self) -> usize {
        self.inner.q
    }

    #[getter]
    fn source_set(&self) -> Vec<u32> {
        self.inner.source_set.clone()
    }

    #[getter]
    fn coded_set(&self) -> Vec<u32> {
        self.inner.coded_set.clone()
    }

    #[getter]
    fn destination_set(&self) -> Vec<u32> {
        self.inner.destination_set.clone()
    }

    /// `(source, destination)` pairs in ascending source order.
    fn pairs(&self) -> Vec<(u32, u32)> {
        self.inner
            .propagation
            .pairs
            .iter()
            .map(|p| (p.source, p.destination))
            .collect()
    }

    /// Union bound, quality loss and punctured information channels as a dict.
    fn analyze<'py>(&self, py: Python<'py>, code: &PyPolarCode) -> PyResult<Bound<'py, PyAny>> {
        let report = analyze_pattern(&self.inner, &code.spec, &code.profile).map_err(py_err)?;
        json_to_py(py, &report)
    }

    fn __repr__(&self) -> String {
        format!(
            "PuncturePattern({:?}, n={}, Q={})",
            self.inner.scheme, self.inner.n, self.inner.q
        )
    }
}

#[pyfunction]
fn bit_reverse(value: u32, width: u32) -> PyResult<u32> {
    bitops::bit_reverse(value, width).map_err(py_err)
}

#[pyfunction]
fn covers(i: u32, j: u32) -> bool {
    bitops::covers_raw(i, j)
}

/// Degradation map of `indices` as `(source, destination)` pairs.
#[pyfunction]
fn propagate(n: u32, indices: Vec<u32>) -> PyResult<Vec<(u32, u32)>> {
    let d0 = degrade::LevelSet::initial(indices, n).map_err(py_err)?;
    let map = degrade::propagate(&d0).map_err(py_err)?;
    Ok(map
        .pairs
        .iter()
        .map(|p| (p.source, p.destination))
        .collect())
}

/// Polar transform of `u` (length a power of two).
#[pyfunction]
fn encode(u: Vec<u8>) -> PyResult<Vec<u8>> {
    codec::encode(&u).map_err(py_err)
}

/// `bits` followed by their CRC of width 8 or 16.
#[pyfunction]
fn crc_append(bits: Vec<u8>, width: u32) -> PyResult<Vec<u8>> {
    let poly =
        parse_crc(Some(width))?.ok_or_else(|| PyValueError::new_err("width must be 8 or 16"))?;
    codec::crc_append(&bits, poly).map_err(py_err)
}

#[pyfunction]
fn crc_check(bits: Vec<u8>, width: u32) -> PyResult<bool> {
    let poly =
        parse_crc(Some(width))?.ok_or_else(|| PyValueError::new_err("width must be 8 or 16"))?;
    Ok(codec::crc_check(&bits, poly))
}

/// Run the sweep described by a TOML config; returns the result as a dict.
#[pyfunction]
fn simulate<'py>(py: Python<'py>, config_toml: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = SimConfig::from_toml_str(config_toml).map_err(py_err)?;
    let result = py.detach(|| run_sweep(&cfg)).map_err(py_err)?;
    json_to_py(py, &result)
}

/// Same as `simulate`, returned as CSV text.
#[pyfunction]
fn simulate_csv(py: Python<'_>, config_toml: &str) -> PyResult<String> {
    let cfg = SimConfig::from_toml_str(config_toml).map_err(py_err)?;
    let result = py.detach(|| run_sweep(&cfg)).map_err(py_err)?;
    Ok(to_csv(&result))
}

#[pymodule]
#[pyo3(name = "polarpunct")]
fn polarpunct_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolarCode>()?;
    m.add_class::<PyPattern>()?;
    m.add_function(wrap_pyfunction!(bit_reverse, m)?)?;
    m.add_function(wrap_pyfunction!(covers, m)?)?;
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(crc_append, m)?)?;
    m.add_function(wrap_pyfunction!(crc_check, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_csv, m)?)?;
    Ok(())
}
