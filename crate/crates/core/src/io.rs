//! Binary field dumps.
//!
//! Layout, all little-endian: the 8-byte magic `DPFILM01`, a `u32` rank (2 or
//! 3), one `u32` size per axis `(nx, ny[, nz])`, one `f64` spacing per axis
//! `(dx, dy[, dz])`, then the `f64` samples row-major with `x` fastest and `z`
//! outermost. Origin, mask and boundary are not stored; a field read back is
//! centered on the origin with every node active.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Boundary, Field2D, Field3D, Grid2D};

pub const MAGIC: &[u8; 8] = b"DPFILM01";

/// Sample count above which a header is treated as corrupt.
const MAX_SAMPLES: usize = 1 << 31;

#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    Plane(Field2D),
    Stack(Field3D),
}

impl FieldData {
    pub fn grid(&self) -> Grid2D {
        match self {
            FieldData::Plane(f) => f.grid,
            FieldData::Stack(s) => s.grid,
        }
    }
}

fn header<W: Write>(w: &mut W, dims: &[usize], spacings: &[f64]) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(dims.len() as u32).to_le_bytes())?;
    for &d in dims {
        let d = u32::try_from(d).map_err(|_| Error::Format(format!("axis size {d} exceeds u32")))?;
        w.write_all(&d.to_le_bytes())?;
    }
    for &s in spacings {
        w.write_all(&s.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_field2d<W: Write>(w: &mut W, field: &Field2D) -> Result<()> {
    let g = field.grid;
    header(w, &[g.nx, g.ny], &[g.dx, g.dy])?;
    for v in &field.values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_field3d<W: Write>(w: &mut W, stack: &Field3D) -> Result<()> {
    let g = stack.grid;
    header(w, &[g.nx, g.ny, stack.nz()], &[g.dx, g.dy, stack.layer_thickness()])?;
    for layer in &stack.layers {
        for v in layer {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_field<R: Read>(r: &mut R) -> Result<FieldData> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic, not a field dump".into()));
    }
    let rank = read_u32(r)? as usize;
    if rank != 2 && rank != 3 {
        return Err(Error::Format(format!("rank {rank}, expected 2 or 3")));
    }
    let dims = (0..rank).map(|_| read_u32(r).map(|d| d as usize)).collect::<Result<Vec<_>>>()?;
    let spacings = (0..rank).map(|_| read_f64(r)).collect::<Result<Vec<_>>>()?;
    let count = dims.iter().try_fold(1usize, |a, &d| a.checked_mul(d)).filter(|&n| n > 0 && n <= MAX_SAMPLES);
    let Some(count) = count else {
        return Err(Error::Format(format!("bad sizes {dims:?}")));
    };
    if spacings.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::Format(format!("bad spacings {spacings:?}")));
    }
    let mut bytes = vec![0u8; count * 8];
    r.read_exact(&mut bytes)?;
    let samples: Vec<f64> = bytes.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
    let (nx, ny) = (dims[0], dims[1]);
    let origin = [-0.5 * (nx as f64 - 1.0) * spacings[0], -0.5 * (ny as f64 - 1.0) * spacings[1]];
    let grid = Grid2D::new(nx, ny, spacings[0], spacings[1], origin)?;
    let mask = vec![true; grid.len()];
    if rank == 2 {
        return Ok(FieldData::Plane(Field2D { grid, values: samples, mask, boundary: Boundary::Open }));
    }
    let nz = dims[2];
    let layers: Vec<Vec<f64>> = samples.chunks_exact(grid.len()).map(|c| c.to_vec()).collect();
    Ok(FieldData::Stack(Field3D::from_layers(grid, mask, spacings[2] * nz as f64, layers)?))
}

pub fn save_field2d(path: &Path, field: &Field2D) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_field2d(&mut w, field)?;
    w.flush()?;
    Ok(())
}

pub fn save_field3d(path: &Path, stack: &Field3D) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_field3d(&mut w, stack)?;
    w.flush()?;
    Ok(())
}

pub fn load_field(path: &Path) -> Result<FieldData> {
    read_field(&mut BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_bytes() {
        let g = Grid2D::new(3, 2, 0.5, 0.25, [-0.5, -0.125]).unwrap();
        let f = Field2D::zeros(g, vec![true; 6]);
        let mut buf = Vec::new();
        write_field2d(&mut buf, &f).unwrap();
        assert_eq!(&buf[..8], b"DPFILM01");
        assert_eq!(&buf[8..12], &[2, 0, 0, 0]);
        assert_eq!(&buf[12..20], &[3, 0, 0, 0, 2, 0, 0, 0]);
        assert_eq!(&buf[20..28], &0.5f64.to_le_bytes());
        assert_eq!(buf.len(), 36 + 6 * 8);
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(read_field(&mut &b"DPFILM02\x02\0\0\0"[..]), Err(Error::Format(_))));
        let mut buf = Vec::new();
        header(&mut buf, &[2, 2, 2, 2], &[1.0; 4]).unwrap();
        assert!(matches!(read_field(&mut &buf[..]), Err(Error::Format(_))));
    }
}
