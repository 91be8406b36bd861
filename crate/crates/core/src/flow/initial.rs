use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::model::{FlowState, Model};
use crate::error::{Error, Result};
use crate::spectral::{curl_2d, random_scalar, Field, Grid, RandomSpec};

/// Initial condition for a 2D run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum Initial {
    /// `ω = −2A cos x₁ cos x₂`, the vorticity of `A(cos x₁ sin x₂, −sin x₁ cos x₂)`.
    /// For SQG the same profile is used as θ.
    TaylorGreen2d { amplitude: f64 },
    /// Band-limited random scalar with power-law spectrum.
    RandomSmooth(RandomSpec),
    /// `A sin(m x₁)`.
    SqgSingleMode { mode: u32, amplitude: f64 },
    /// Raw grid file holding either the prognostic scalar or a 2D velocity.
    File { path: PathBuf },
}

impl Initial {
    pub fn field(&self, grid: &Grid) -> Result<Field> {
        if grid.dim() != 2 {
            return Err(Error::Shape("initial conditions are 2D".into()));
        }
        match self {
            Initial::TaylorGreen2d { amplitude } => Ok(Field::scalar_from_fn(*grid, |x| {
                -2.0 * amplitude * x[0].cos() * x[1].cos()
            })),
            Initial::RandomSmooth(spec) => random_scalar(grid, spec),
            Initial::SqgSingleMode { mode, amplitude } => {
                let m = *mode as f64;
                if *mode == 0 || *mode as i64 > grid.dealias_cutoff() {
                    return Err(Error::param(format!(
                        "mode must lie in 1..={}, got {mode}",
                        grid.dealias_cutoff()
                    )));
                }
                Ok(Field::scalar_from_fn(*grid, |x| amplitude * (m * x[0]).sin()))
            }
            Initial::File { path } => {
                let f = read_raw_field(path)?;
                if f.grid() != grid {
                    return Err(Error::Shape(format!(
                        "{} holds a {}D n={} grid, expected {}D n={}",
                        path.display(),
                        f.grid().dim(),
                        f.grid().n(),
                        grid.dim(),
                        grid.n()
                    )));
                }
                match f.components() {
                    1 => Ok(f),
                    2 => curl_2d(&f),
                    c => Err(Error::Shape(format!(
                        "{} holds {c} components, expected 1 or 2",
                        path.display()
                    ))),
                }
            }
        }
    }

    /// Initial state at `t = 0`; an identically zero field is rejected.
    pub fn state(&self, model: Model, grid: &Grid, nu: f64) -> Result<FlowState> {
        let f = self.field(grid)?;
        if f.max_abs() == 0.0 {
            return Err(Error::param("initial field is identically zero"));
        }
        FlowState::new(model, f, nu, 0.0)
    }
}

/// Writes `dim, n, components` as little-endian u64 followed by the samples as
/// little-endian f64, component-major in row-major grid order.
pub fn write_raw_field(path: &Path, f: &Field) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    for h in [f.grid().dim(), f.grid().n(), f.components()] {
        w.write_all(&(h as u64).to_le_bytes()).map_err(io)?;
    }
    for v in f.values() {
        w.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_raw_field(path: &Path) -> Result<Field> {
    let io = |e| Error::io(path, e);
    let mut r = BufReader::new(File::open(path).map_err(io)?);
    let mut word = [0u8; 8];
    let mut header = [0usize; 3];
    for h in &mut header {
        r.read_exact(&mut word).map_err(io)?;
        *h = usize::try_from(u64::from_le_bytes(word))
            .map_err(|_| Error::Shape("raw header value overflows".into()))?;
    }
    let [dim, n, components] = header;
    let grid = Grid::new(dim, n)?;
    let count = components
        .checked_mul(grid.len())
        .ok_or_else(|| Error::Shape("raw header describes too many values".into()))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(io)?;
    if bytes.len() != count * 8 {
        return Err(Error::Shape(format!(
            "{}: header promises {count} values but the payload holds {} bytes",
            path.display(),
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Field::new(grid, components, values)
}
