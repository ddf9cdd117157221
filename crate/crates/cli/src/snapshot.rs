//! `FKPS` binary field snapshots.
//!
//! Layout, all little-endian: magic `FKPS`, `u32` version (1), `u32` nx,
//! `u32` ny, then `f64` Lx, Ly, t, alpha, sigma, c (64 header bytes), then
//! `nx * ny` `f64` samples with x varying fastest. `Lx` and `Ly` are the
//! half-widths of the periodic box `[-Lx, Lx) x [-Ly, Ly)`.

use std::path::Path;

use fkp_core::spectral::{RealField1D, RealField2D};
use fkp_core::FkpParams;

use crate::error::{io_err, CliError, Result};

pub const MAGIC: &[u8; 4] = b"FKPS";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub nx: u32,
    pub ny: u32,
    pub lx: f64,
    pub ly: f64,
    pub t: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub c: f64,
    pub samples: Vec<f64>,
}

impl Snapshot {
    pub fn from_field(field: &RealField2D<f64>, params: &FkpParams<f64>, t: f64) -> Result<Self> {
        let grid = field.grid();
        Self::checked(Self {
            nx: dim(grid.nx())?,
            ny: dim(grid.ny())?,
            lx: grid.x.half_width(),
            ly: grid.y.half_width(),
            t,
            alpha: params.alpha,
            sigma: params.sigma_value(),
            c: params.c,
            samples: field.samples().to_vec(),
        })
    }

    /// One-row snapshot of a profile; `Ly` is recorded as 0.
    pub fn from_profile(profile: &RealField1D<f64>, params: &FkpParams<f64>) -> Result<Self> {
        let grid = profile.grid();
        Self::checked(Self {
            nx: dim(grid.len())?,
            ny: 1,
            lx: grid.half_width(),
            ly: 0.0,
            t: 0.0,
            alpha: params.alpha,
            sigma: params.sigma_value(),
            c: params.c,
            samples: profile.samples().to_vec(),
        })
    }

    fn checked(snap: Self) -> Result<Self> {
        if snap.samples.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Snapshot("non-finite sample".into()));
        }
        Ok(snap)
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.samples[iy * self.nx as usize + ix]
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.samples.len());
        out.extend_from_slice(MAGIC);
        for v in [VERSION, self.nx, self.ny] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in [self.lx, self.ly, self.t, self.alpha, self.sigma, self.c] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in &self.samples {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(CliError::Snapshot(format!("{} bytes is shorter than the header", bytes.len())));
        }
        if &bytes[..4] != MAGIC {
            return Err(CliError::Snapshot("bad magic".into()));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[4 * i..4 * i + 4].try_into().unwrap());
        let float = |off: usize| f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
        let version = word(1);
        if version != VERSION {
            return Err(CliError::Snapshot(format!("unsupported version {version}")));
        }
        let (nx, ny) = (word(2), word(3));
        let count = nx as usize * ny as usize;
        let expected = HEADER_LEN + 8 * count;
        if bytes.len() != expected {
            return Err(CliError::Snapshot(format!("payload length {} does not match {nx}x{ny}", bytes.len() - HEADER_LEN)));
        }
        let header: Vec<f64> = (0..6).map(|i| float(16 + 8 * i)).collect();
        let samples = (0..count).map(|i| float(HEADER_LEN + 8 * i)).collect();
        Ok(Self {
            nx,
            ny,
            lx: header[0],
            ly: header[1],
            t: header[2],
            alpha: header[3],
            sigma: header[4],
            c: header[5],
            samples,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(io_err(path))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path).map_err(io_err(path))?)
    }
}

fn dim(n: usize) -> Result<u32> {
    u32::try_from(n).map_err(|_| CliError::Snapshot(format!("dimension {n} exceeds u32")))
}
