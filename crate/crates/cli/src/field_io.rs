//! Binary field files.
//!
//! Layout (little-endian): the magic `EPFIELD1`, `u32` dimension, `f64`
//! period, `u64` points per axis, `u32` component count, then the samples of
//! each component in row-major order as `f64`.

use std::path::Path;

use ep_core::{PeriodicGrid, ScalarField, VectorField};
use thiserror::Error;

pub const MAGIC: &[u8; 8] = b"EPFIELD1";
const HEADER_LEN: usize = 8 + 4 + 8 + 8 + 4;

#[derive(Debug, Error)]
pub enum FieldIoError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a field file (bad magic)")]
    BadMagic,
    #[error("invalid header: {0}")]
    InvalidHeader(String),
    #[error("expected {expected} bytes, found {found}")]
    Length { expected: usize, found: usize },
    #[error(transparent)]
    Core(#[from] ep_core::Error),
}

pub fn encode(u: &VectorField) -> Vec<u8> {
    let g = u.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * g.len() * u.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    out.extend_from_slice(&g.period().to_le_bytes());
    out.extend_from_slice(&(g.points_per_axis() as u64).to_le_bytes());
    out.extend_from_slice(&(u.len() as u32).to_le_bytes());
    for c in u.components() {
        for v in c.samples() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<VectorField, FieldIoError> {
    if bytes.len() < HEADER_LEN {
        return Err(FieldIoError::Length { expected: HEADER_LEN, found: bytes.len() });
    }
    if &bytes[..8] != MAGIC {
        return Err(FieldIoError::BadMagic);
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let dim = u32_at(8) as usize;
    let period = f64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let n = u64::from_le_bytes(bytes[20..28].try_into().unwrap());
    let components = u32_at(28) as usize;
    if !(1..=3).contains(&dim) {
        return Err(FieldIoError::InvalidHeader(format!("dimension {dim} not in 1..=3")));
    }
    if n < 2 || !n.is_power_of_two() {
        return Err(FieldIoError::InvalidHeader(format!("{n} points per axis is not a power of two")));
    }
    if !(period.is_finite() && period > 0.0) {
        return Err(FieldIoError::InvalidHeader(format!("period {period} is not positive")));
    }
    if components == 0 {
        return Err(FieldIoError::InvalidHeader("no components".into()));
    }
    let len = (n as usize)
        .checked_pow(dim as u32)
        .ok_or_else(|| FieldIoError::InvalidHeader("grid too large".into()))?;
    let expected = HEADER_LEN + 8 * len * components;
    if bytes.len() != expected {
        return Err(FieldIoError::Length { expected, found: bytes.len() });
    }
    let grid = PeriodicGrid::new(dim, n as usize, period)?;
    let body = &bytes[HEADER_LEN..];
    let comps = (0..components)
        .map(|c| {
            let samples = body[8 * len * c..8 * len * (c + 1)]
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
                .collect();
            ScalarField::from_samples(&grid, samples)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VectorField::new(comps)?)
}

pub fn read_field(path: &Path) -> Result<VectorField, FieldIoError> {
    decode(&std::fs::read(path)?)
}

pub fn write_field(path: &Path, u: &VectorField) -> std::io::Result<()> {
    crate::output::write_atomic(path, &encode(u))
}
