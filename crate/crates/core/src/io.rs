//! Self-describing binary container for ensembles and dense matrices.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! bytes 0..8      magic "GPRBIN01"
//! bytes 8..16     u64 header length H
//! bytes 16..16+H  UTF-8 JSON header
//! remainder       f64 payload
//! ```
//!
//! Ensemble header: `{"kind":"ensemble","model","n","m","seed","num_masks","has_signal"}`.
//! Payload: the `m×n` rows `a_k^*` as interleaved `(re, im)` pairs in row-major
//! order, then the `m` magnitudes, then `n` interleaved entries of `x` when
//! `has_signal` is true.
//!
//! Matrix header: `{"kind":"matrix","rows","cols","complex"}`. Payload: entries
//! in row-major order, interleaved `(re, im)` when `complex` is true.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{MeasurementEnsemble, MeasurementModel};
use crate::signal::ComplexSignal;

pub const MAGIC: &[u8; 8] = b"GPRBIN01";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Header {
    Ensemble {
        model: MeasurementModel,
        n: usize,
        m: usize,
        seed: u64,
        num_masks: Option<usize>,
        has_signal: bool,
    },
    Matrix {
        rows: usize,
        cols: usize,
        complex: bool,
    },
}

/// A dense matrix read from a container.
#[derive(Debug, Clone, PartialEq)]
pub enum StoredMatrix {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

fn frame(header: &Header, payload: &[f64]) -> Vec<u8> {
    let json = serde_json::to_vec(header).expect("header serializes");
    let mut out = Vec::with_capacity(16 + json.len() + 8 * payload.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u64).to_le_bytes());
    out.extend_from_slice(&json);
    for v in payload {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn unframe(bytes: &[u8]) -> Result<(Header, Vec<f64>)> {
    if bytes.len() < 16 || &bytes[..8] != MAGIC {
        return Err(Error::Format("missing GPRBIN01 magic".into()));
    }
    let hlen = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let body = &bytes[16..];
    if hlen > body.len() {
        return Err(Error::Format("header length exceeds file size".into()));
    }
    let header: Header = serde_json::from_slice(&body[..hlen])
        .map_err(|e| Error::Format(format!("bad header: {e}")))?;
    let payload = &body[hlen..];
    if payload.len() % 8 != 0 {
        return Err(Error::Format("payload is not a whole number of f64 values".into()));
    }
    let values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((header, values))
}

fn push_complex(out: &mut Vec<f64>, values: impl IntoIterator<Item = Complex64>) {
    for c in values {
        out.push(c.re);
        out.push(c.im);
    }
}

fn read_complex(values: &[f64]) -> Vec<Complex64> {
    values.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

pub fn encode_ensemble(ensemble: &MeasurementEnsemble, x: Option<&ComplexSignal>) -> Vec<u8> {
    let (n, m) = (ensemble.n(), ensemble.m());
    let header = Header::Ensemble {
        model: ensemble.model(),
        n,
        m,
        seed: ensemble.seed(),
        num_masks: ensemble.num_masks(),
        has_signal: x.is_some(),
    };
    let mut payload = Vec::with_capacity(2 * m * n + m + 2 * n);
    push_complex(&mut payload, ensemble.rows().iter().copied());
    payload.extend_from_slice(ensemble.magnitudes());
    if let Some(x) = x {
        push_complex(&mut payload, x.iter().copied());
    }
    frame(&header, &payload)
}

pub fn decode_ensemble(bytes: &[u8]) -> Result<(MeasurementEnsemble, Option<ComplexSignal>)> {
    let (header, values) = unframe(bytes)?;
    let Header::Ensemble { model, n, m, seed, num_masks, has_signal } = header else {
        return Err(Error::Format("container does not hold an ensemble".into()));
    };
    let expected = 2 * m * n + m + if has_signal { 2 * n } else { 0 };
    if values.len() != expected {
        return Err(Error::Format(format!(
            "ensemble payload has {} values, header implies {expected}",
            values.len()
        )));
    }
    let rows = read_complex(&values[..2 * m * n]);
    let magnitudes = values[2 * m * n..2 * m * n + m].to_vec();
    let ensemble = MeasurementEnsemble::from_parts(model, n, rows, magnitudes, seed, num_masks)?;
    let x = if has_signal {
        Some(ComplexSignal::from_vec(read_complex(&values[2 * m * n + m..]))?)
    } else {
        None
    };
    Ok((ensemble, x))
}

pub fn write_ensemble(
    path: impl AsRef<Path>,
    ensemble: &MeasurementEnsemble,
    x: Option<&ComplexSignal>,
) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_ensemble(ensemble, x)).map_err(|e| Error::io(path, e))
}

pub fn read_ensemble(path: impl AsRef<Path>) -> Result<(MeasurementEnsemble, Option<ComplexSignal>)> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_ensemble(&bytes)
}

pub fn encode_real_matrix(a: &DMatrix<f64>) -> Vec<u8> {
    let header = Header::Matrix { rows: a.nrows(), cols: a.ncols(), complex: false };
    let payload: Vec<f64> = a.transpose().iter().copied().collect();
    frame(&header, &payload)
}

pub fn encode_complex_matrix(a: &DMatrix<Complex64>) -> Vec<u8> {
    let header = Header::Matrix { rows: a.nrows(), cols: a.ncols(), complex: true };
    let mut payload = Vec::with_capacity(2 * a.len());
    push_complex(&mut payload, a.transpose().iter().copied());
    frame(&header, &payload)
}

pub fn decode_matrix(bytes: &[u8]) -> Result<StoredMatrix> {
    let (header, values) = unframe(bytes)?;
    let Header::Matrix { rows, cols, complex } = header else {
        return Err(Error::Format("container does not hold a matrix".into()));
    };
    let width = if complex { 2 } else { 1 };
    if values.len() != width * rows * cols {
        return Err(Error::Format("matrix payload size does not match header".into()));
    }
    Ok(if complex {
        StoredMatrix::Complex(DMatrix::from_row_slice(rows, cols, &read_complex(&values)))
    } else {
        StoredMatrix::Real(DMatrix::from_row_slice(rows, cols, &values))
    })
}

pub fn write_matrix(path: impl AsRef<Path>, bytes: Vec<u8>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<StoredMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_matrix(&bytes)
}

/// Complex vector as a one-column complex matrix container.
pub fn encode_vector(v: &DVector<Complex64>) -> Vec<u8> {
    encode_complex_matrix(&DMatrix::from_column_slice(v.len(), 1, v.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{gen_gaussian_ensemble, gen_masked_dct_ensemble};

    #[test]
    fn ensemble_round_trip_is_exact() {
        let x = ComplexSignal::gaussian(5, 2, 0).unwrap();
        let ens = gen_gaussian_ensemble(5, 17, &x, 4).unwrap();
        let bytes = encode_ensemble(&ens, Some(&x));
        let (back, xb) = decode_ensemble(&bytes).unwrap();
        assert_eq!(back, ens);
        assert_eq!(xb.unwrap(), x);
        assert_eq!(bytes, encode_ensemble(&back, Some(&x)));
    }

    #[test]
    fn masked_ensemble_round_trip_without_signal() {
        let x = ComplexSignal::from_real(&[1.0, 2.0, -1.0]).unwrap();
        let ens = gen_masked_dct_ensemble(3, 2, &x, 9).unwrap();
        let (back, xb) = decode_ensemble(&encode_ensemble(&ens, None)).unwrap();
        assert_eq!(back, ens);
        assert!(xb.is_none());
    }

    #[test]
    fn matrix_round_trip_is_row_major() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let bytes = encode_real_matrix(&a);
        let tail: Vec<f64> = bytes[bytes.len() - 48..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        assert_eq!(tail, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(decode_matrix(&bytes).unwrap(), StoredMatrix::Real(a));
        let c = DMatrix::from_fn(2, 2, |i, j| Complex64::new(i as f64, j as f64));
        assert_eq!(decode_matrix(&encode_complex_matrix(&c)).unwrap(), StoredMatrix::Complex(c));
    }

    #[test]
    fn corrupted_input_is_a_format_error() {
        assert!(matches!(decode_ensemble(b"nope"), Err(Error::Format(_))));
        let x = ComplexSignal::from_real(&[1.0]).unwrap();
        let ens = gen_gaussian_ensemble(1, 2, &x, 0).unwrap();
        let mut bytes = encode_ensemble(&ens, None);
        bytes.truncate(bytes.len() - 8);
        assert!(matches!(decode_ensemble(&bytes), Err(Error::Format(_))));
        assert!(matches!(decode_matrix(&encode_ensemble(&ens, None)), Err(Error::Format(_))));
    }
}
