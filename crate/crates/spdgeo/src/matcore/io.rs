//! Matrix file format.
//!
//! JSON object `{"n": int, "complex": bool, "data": [[re, im], ...]}` with the
//! data row-major of length n^2. Real matrices carry `"complex": false` and
//! must have all imaginary parts exactly zero. Writers emit 17-significant-
//! digit decimals so a read-back reproduces the doubles bitwise.

use std::path::Path;

use num_complex::Complex;
use serde_json::Value;

use crate::cmatrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::matcore::{HermitianMatrix, SpdMatrix};

/// Formats a double with 17 significant digits (lossless round-trip).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes a Hermitian matrix to the matrix JSON format.
pub fn matrix_to_json(m: &HermitianMatrix<f64>) -> String {
    let n = m.dim();
    let complex = (0..n).any(|i| (0..n).any(|j| m.entry(i, j).im != 0.0));
    let mut out = String::with_capacity(64 + 48 * n * n);
    out.push_str(&format!("{{\"n\": {n}, \"complex\": {complex}, \"data\": ["));
    let mut first = true;
    for i in 0..n {
        for j in 0..n {
            if !first {
                out.push_str(", ");
            }
            first = false;
            let z = m.entry(i, j);
            out.push_str(&format!("[{}, {}]", fmt_f64(z.re), fmt_f64(z.im)));
        }
    }
    out.push_str("]}");
    out
}

pub fn write_matrix(path: impl AsRef<Path>, m: &HermitianMatrix<f64>) -> Result<()> {
    std::fs::write(path, matrix_to_json(m) + "\n")?;
    Ok(())
}

/// Parses the matrix JSON format into a Hermitian matrix.
pub fn matrix_from_json(text: &str) -> Result<HermitianMatrix<f64>> {
    let v: Value = serde_json::from_str(text)?;
    matrix_from_value(&v)
}

pub fn matrix_from_value(v: &Value) -> Result<HermitianMatrix<f64>> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("matrix file must be a JSON object".into()))?;
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing integer field `n`".into()))? as usize;
    if n < 1 {
        return Err(Error::Parse("field `n` must be >= 1".into()));
    }
    let complex = obj
        .get("complex")
        .and_then(Value::as_bool)
        .ok_or_else(|| Error::Parse("missing boolean field `complex`".into()))?;
    let data = obj
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing array field `data`".into()))?;
    if data.len() != n * n {
        return Err(Error::Parse(format!(
            "field `data` must have n^2 = {} entries, got {}",
            n * n,
            data.len()
        )));
    }
    let mut mat = ComplexMatrix::zeros(n);
    for (idx, entry) in data.iter().enumerate() {
        let pair = entry
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| Error::Parse(format!("data[{idx}] must be a [re, im] pair")))?;
        let re = pair[0]
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("data[{idx}][0] must be a number")))?;
        let im = pair[1]
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("data[{idx}][1] must be a number")))?;
        if !complex && im != 0.0 {
            return Err(Error::Parse(format!(
                "matrix declared real but data[{idx}] has im = {im}"
            )));
        }
        mat[(idx / n, idx % n)] = Complex::new(re, im);
    }
    HermitianMatrix::new(mat)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<HermitianMatrix<f64>> {
    let text = std::fs::read_to_string(path)?;
    matrix_from_json(&text)
}

/// Reads and certifies an SPD matrix (fails fast on indefinite input).
pub fn read_spd(path: impl AsRef<Path>) -> Result<SpdMatrix<f64>> {
    SpdMatrix::new(read_matrix(path)?)
}

/// Witness helper: matrix as a `serde_json::Value` in the file format.
pub fn matrix_to_value(m: &HermitianMatrix<f64>) -> Value {
    serde_json::from_str(&matrix_to_json(m)).expect("writer emits valid JSON")
}
