//! JSON system files and sampled-spectrum CSV.
//!
//! State-space files: `{"a": [[..]], "b": [[..]], "c": [[..]], "d": [[..]]}`
//! (row-major; empty `a`/`b`/`c` allowed for constant systems). Scalar
//! spectra: `{"num": [c_-d .. c_d], "den": [..]}`. Sampled spectra: CSV with
//! a header, then one row per grid point: `theta`, followed by the real and
//! imaginary parts of the matrix entries in row-major order.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::rational::{
    FrequencyGrid, LaurentPolynomial, SampledSpectrum, ScalarRationalSpectrum, StateSpace,
};
use crate::spectrum::Spectrum;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemJson {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub d: Vec<Vec<f64>>,
}

fn rows_to_matrix(rows: &[Vec<f64>], nrows: usize, ncols: usize, name: &str) -> Result<DMatrix<f64>> {
    if rows.len() != nrows {
        return Err(Error::Dimension(format!(
            "{name} has {} rows, expected {nrows}",
            rows.len()
        )));
    }
    let mut m = DMatrix::zeros(nrows, ncols);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != ncols {
            return Err(Error::Dimension(format!(
                "{name} row {i} has {} entries, expected {ncols}",
                r.len()
            )));
        }
        for (j, &x) in r.iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    Ok(m)
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

impl SystemJson {
    pub fn to_state_space(&self) -> Result<StateSpace> {
        let p = self.d.len();
        let m = self.d.first().map_or(0, |r| r.len());
        if p == 0 || m == 0 {
            return Err(Error::Dimension("d must be a nonempty matrix".into()));
        }
        let n = self.a.len();
        StateSpace::new(
            rows_to_matrix(&self.a, n, n, "a")?,
            rows_to_matrix(&self.b, n, m, "b")?,
            rows_to_matrix(&self.c, p, n, "c")?,
            rows_to_matrix(&self.d, p, m, "d")?,
        )
    }

    pub fn from_state_space(g: &StateSpace) -> Self {
        let mut c = matrix_to_rows(g.c());
        if g.order() == 0 {
            c.iter_mut().for_each(|r| r.clear());
        }
        Self {
            a: matrix_to_rows(g.a()),
            b: matrix_to_rows(g.b()),
            c,
            d: matrix_to_rows(g.d()),
        }
    }
}

pub fn state_space_to_json(g: &StateSpace) -> Value {
    serde_json::to_value(SystemJson::from_state_space(g)).expect("plain data serializes")
}

pub fn parse_state_space(text: &str) -> Result<StateSpace> {
    let sys: SystemJson = serde_json::from_str(text)?;
    sys.to_state_space()
}

/// Parses a rational spectrum: a state-space factor (`a`,`b`,`c`,`d`) or a
/// scalar Laurent ratio (`num`,`den`). Extra keys are ignored.
pub fn parse_spectrum_json(text: &str) -> Result<Spectrum> {
    let v: Value = serde_json::from_str(text)?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::InvalidInput("spectrum JSON must be an object".into()))?;
    if obj.contains_key("a") {
        let sys: SystemJson = serde_json::from_value(v)?;
        Ok(Spectrum::Factor(sys.to_state_space()?))
    } else if obj.contains_key("num") && obj.contains_key("den") {
        let num: Vec<f64> = serde_json::from_value(obj["num"].clone())?;
        let den: Vec<f64> = serde_json::from_value(obj["den"].clone())?;
        Ok(Spectrum::Scalar(ScalarRationalSpectrum::new(
            LaurentPolynomial::new(num)?,
            LaurentPolynomial::new(den)?,
        )?))
    } else {
        Err(Error::InvalidInput(
            "expected a state-space object (a, b, c, d) or a scalar spectrum (num, den)".into(),
        ))
    }
}

pub fn scalar_spectrum_to_json(s: &ScalarRationalSpectrum) -> Value {
    serde_json::json!({ "num": s.num.coeffs(), "den": s.den.coeffs() })
}

pub fn sampled_to_csv(s: &SampledSpectrum) -> String {
    let p = s.dim();
    let mut out = String::from("theta");
    for i in 0..p {
        for j in 0..p {
            let _ = write!(out, ",re_{i}_{j},im_{i}_{j}");
        }
    }
    out.push('\n');
    for (k, v) in s.values().iter().enumerate() {
        let _ = write!(out, "{:.17e}", s.grid().theta(k));
        for i in 0..p {
            for j in 0..p {
                let _ = write!(out, ",{:.17e},{:.17e}", v[(i, j)].re, v[(i, j)].im);
            }
        }
        out.push('\n');
    }
    out
}

pub fn sampled_from_csv(text: &str) -> Result<SampledSpectrum> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty CSV".into()))?;
    let cols = header.split(',').count();
    let entries = (cols.saturating_sub(1)) / 2;
    let p = (entries as f64).sqrt().round() as usize;
    if cols < 3 || (cols - 1) % 2 != 0 || p * p != entries {
        return Err(Error::InvalidInput(format!(
            "CSV header has {cols} columns; expected 1 + 2 p^2"
        )));
    }
    let mut thetas = Vec::new();
    let mut values = Vec::new();
    for (row, line) in lines.enumerate() {
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidInput(format!("CSV row {row}: {e}")))?;
        if fields.len() != cols {
            return Err(Error::InvalidInput(format!(
                "CSV row {row} has {} columns, header has {cols}",
                fields.len()
            )));
        }
        thetas.push(fields[0]);
        values.push(CMatrix::from_fn(p, p, |i, j| {
            let k = 1 + 2 * (i * p + j);
            Complex64::new(fields[k], fields[k + 1])
        }));
    }
    let grid = FrequencyGrid::new(values.len())?;
    for (k, &t) in thetas.iter().enumerate() {
        if (t - grid.theta(k)).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "CSV row {k}: theta {t} is not on the uniform grid of {} points",
                values.len()
            )));
        }
    }
    SampledSpectrum::new(grid, values)
}

/// Reads a spectrum file: `.csv` as sampled, anything else as JSON.
pub fn read_spectrum(path: &Path) -> Result<Spectrum> {
    let text = std::fs::read_to_string(path)?;
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    {
        Ok(Spectrum::Sampled(sampled_from_csv(&text)?))
    } else {
        parse_spectrum_json(&text)
    }
}
