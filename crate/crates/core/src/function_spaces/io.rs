//! `NSFLD1` field files.
//!
//! An ASCII header line `NSFLD1 <nx> <ny> <nz> <ncomp>\n` followed by
//! `ncomp * nx * ny * nz` little-endian IEEE-754 binary64 values, x fastest
//! within a component and components one after another.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::field::{ScalarField, VectorField};
use super::grid::Grid;
use crate::error::{Error, Result};

const MAGIC: &str = "NSFLD1";
const MAX_HEADER: usize = 128;

/// Decoded contents of an `NSFLD1` file.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldFile {
    pub dims: [usize; 3],
    pub components: Vec<Vec<f64>>,
}

impl FieldFile {
    pub fn encode(&self) -> Vec<u8> {
        let [nx, ny, nz] = self.dims;
        let mut out = format!("{MAGIC} {nx} {ny} {nz} {}\n", self.components.len()).into_bytes();
        out.reserve(8 * nx * ny * nz * self.components.len());
        for comp in &self.components {
            for v in comp {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let newline = bytes
            .iter()
            .take(MAX_HEADER)
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::Format("missing header line".into()))?;
        let header = std::str::from_utf8(&bytes[..newline])
            .map_err(|_| Error::Format("header is not ASCII".into()))?;
        let mut parts = header.split(' ');
        if parts.next() != Some(MAGIC) {
            return Err(Error::Format(format!("bad magic in header {header:?}")));
        }
        let nums: Vec<usize> = parts
            .map(|p| {
                p.parse::<usize>()
                    .map_err(|_| Error::Format(format!("bad header field {p:?}")))
            })
            .collect::<Result<_>>()?;
        let [nx, ny, nz, ncomp] = nums[..] else {
            return Err(Error::Format(format!(
                "header needs 4 integers, got {}",
                nums.len()
            )));
        };
        if nx == 0 || ny == 0 || nz == 0 || ncomp == 0 {
            return Err(Error::Format("zero dimension in header".into()));
        }
        let per = nx
            .checked_mul(ny)
            .and_then(|v| v.checked_mul(nz))
            .ok_or_else(|| Error::Format("dimensions overflow".into()))?;
        let expected = per
            .checked_mul(ncomp)
            .and_then(|v| v.checked_mul(8))
            .ok_or_else(|| Error::Format("dimensions overflow".into()))?;
        let body = &bytes[newline + 1..];
        if body.len() != expected {
            return Err(Error::Format(format!(
                "expected {expected} payload bytes, found {}",
                body.len()
            )));
        }
        let components = body
            .chunks_exact(8 * per)
            .map(|chunk| {
                chunk
                    .chunks_exact(8)
                    .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
                    .collect()
            })
            .collect();
        Ok(FieldFile {
            dims: [nx, ny, nz],
            components,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::decode(&bytes)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let io = |source| Error::Io {
            path: path.to_owned(),
            source,
        };
        let mut f = fs::File::create(path).map_err(io)?;
        f.write_all(&self.encode()).map_err(io)
    }

    /// Grid of a cubic node field; errors for non-cubic or non-nested sizes.
    pub fn grid(&self) -> Result<Grid> {
        let [nx, ny, nz] = self.dims;
        if nx != ny || ny != nz {
            return Err(Error::Format(format!(
                "field is {nx}x{ny}x{nz}, expected a cubic node lattice"
            )));
        }
        Grid::new(nx)
    }

    pub fn into_scalars(self) -> Result<Vec<ScalarField>> {
        let grid = self.grid()?;
        self.components
            .into_iter()
            .map(|c| ScalarField::new(grid, c))
            .collect()
    }

    pub fn into_vector(self) -> Result<VectorField> {
        if self.components.len() != 3 {
            return Err(Error::Format(format!(
                "expected 3 components, found {}",
                self.components.len()
            )));
        }
        let [a, b, c]: [ScalarField; 3] = self.into_scalars()?.try_into().unwrap();
        VectorField::new([a, b, c])
    }
}

impl From<&ScalarField> for FieldFile {
    fn from(u: &ScalarField) -> Self {
        let n = u.grid().n();
        FieldFile {
            dims: [n, n, n],
            components: vec![u.values().to_vec()],
        }
    }
}

impl From<&VectorField> for FieldFile {
    fn from(v: &VectorField) -> Self {
        let n = v.grid().n();
        FieldFile {
            dims: [n, n, n],
            components: v.components().iter().map(|c| c.values().to_vec()).collect(),
        }
    }
}

pub fn write_scalar(path: &Path, u: &ScalarField) -> Result<()> {
    FieldFile::from(u).write(path)
}

pub fn write_vector(path: &Path, v: &VectorField) -> Result<()> {
    FieldFile::from(v).write(path)
}
