//! GF01 (single grid function) and STF1 (space-time field) binary formats.
//!
//! All integers and floats are little-endian. GF01 is
//! `"GF01" u64:n f64:length f64:x0 u8:side` followed by `n` `(re, im)` pairs.
//! STF1 is `"STF1" u64:frames u64:n f64:length f64:x0` followed by per-frame
//! `f64:t` and `n` physical `(re, im)` pairs.

use num_complex::Complex64;
use std::fs;
use std::path::Path;

use super::field::SpaceTimeField;
use super::function::{GridFunction, Side};
use super::grid::Grid;
use crate::error::{Error, Result};

pub const GF_MAGIC: &[u8; 4] = b"GF01";
pub const STF_MAGIC: &[u8; 4] = b"STF1";
pub const GF_HEADER_LEN: usize = 4 + 8 + 8 + 8 + 1;
pub const STF_HEADER_LEN: usize = 4 + 8 + 8 + 8 + 8;

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::UnexpectedEof(format!(
                "needed {n} bytes for {what} at offset {}, {} left",
                self.pos,
                self.buf.len() - self.pos
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        let v = f64::from_le_bytes(self.take(8, what)?.try_into().unwrap());
        if !v.is_finite() {
            return Err(Error::Format(format!("non-finite {what}")));
        }
        Ok(v)
    }

    fn pairs(&mut self, n: usize) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let re = self.f64("sample")?;
            let im = self.f64("sample")?;
            out.push(Complex64::new(re, im));
        }
        Ok(out)
    }

    fn magic(&mut self, m: &[u8; 4]) -> Result<()> {
        let got = self.take(4, "magic")?;
        if got != m {
            return Err(Error::Format(format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(got),
                String::from_utf8_lossy(m)
            )));
        }
        Ok(())
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::Format(format!("{} trailing bytes", self.buf.len() - self.pos)));
        }
        Ok(())
    }
}

fn grid_header(r: &mut Reader, n: u64) -> Result<Grid> {
    let length = r.f64("length")?;
    let x0 = r.f64("x0")?;
    let n = usize::try_from(n).map_err(|_| Error::Format("node count overflows usize".into()))?;
    Grid::new(n, length, x0).map_err(|e| Error::Format(e.to_string()))
}

fn check_finite(values: &[Complex64]) -> Result<()> {
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Format("refusing to write non-finite values".into()));
    }
    Ok(())
}

fn push_pairs(out: &mut Vec<u8>, values: &[Complex64]) {
    for v in values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
}

pub fn encode_grid_function(f: &GridFunction) -> Result<Vec<u8>> {
    check_finite(f.values())?;
    let g = f.grid();
    let mut out = Vec::with_capacity(GF_HEADER_LEN + 16 * g.n());
    out.extend_from_slice(GF_MAGIC);
    out.extend_from_slice(&(g.n() as u64).to_le_bytes());
    out.extend_from_slice(&g.length().to_le_bytes());
    out.extend_from_slice(&g.x0().to_le_bytes());
    out.push(match f.side() {
        Side::Physical => 0,
        Side::Fourier => 1,
    });
    push_pairs(&mut out, f.values());
    Ok(out)
}

pub fn decode_grid_function(buf: &[u8]) -> Result<GridFunction> {
    let mut r = Reader { buf, pos: 0 };
    r.magic(GF_MAGIC)?;
    let n = r.u64("n")?;
    let grid = grid_header(&mut r, n)?;
    let side = match r.take(1, "side")?[0] {
        0 => Side::Physical,
        1 => Side::Fourier,
        s => return Err(Error::Format(format!("unknown side tag {s}"))),
    };
    let values = r.pairs(grid.n())?;
    r.finish()?;
    GridFunction::new(grid, values, side)
}

pub fn encode_field(f: &SpaceTimeField) -> Result<Vec<u8>> {
    let g = f.grid();
    let mut out = Vec::with_capacity(STF_HEADER_LEN + f.len() * (8 + 16 * g.n()));
    out.extend_from_slice(STF_MAGIC);
    out.extend_from_slice(&(f.len() as u64).to_le_bytes());
    out.extend_from_slice(&(g.n() as u64).to_le_bytes());
    out.extend_from_slice(&g.length().to_le_bytes());
    out.extend_from_slice(&g.x0().to_le_bytes());
    for (t, frame) in f.times().iter().zip(f.frames()) {
        check_finite(frame.values())?;
        out.extend_from_slice(&t.to_le_bytes());
        push_pairs(&mut out, frame.values());
    }
    Ok(out)
}

pub fn decode_field(buf: &[u8]) -> Result<SpaceTimeField> {
    let mut r = Reader { buf, pos: 0 };
    r.magic(STF_MAGIC)?;
    let m = r.u64("frame count")?;
    let n = r.u64("n")?;
    let grid = grid_header(&mut r, n)?;
    let mut times = Vec::new();
    let mut frames = Vec::new();
    for _ in 0..m {
        times.push(r.f64("time")?);
        frames.push(GridFunction::new(grid, r.pairs(grid.n())?, Side::Physical)?);
    }
    r.finish()?;
    SpaceTimeField::new(grid, times, frames).map_err(|e| Error::Format(e.to_string()))
}

pub fn write_grid_function(f: &GridFunction, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_grid_function(f)?)?;
    Ok(())
}

pub fn read_grid_function(path: impl AsRef<Path>) -> Result<GridFunction> {
    decode_grid_function(&fs::read(path)?)
}

pub fn write_field(f: &SpaceTimeField, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_field(f)?)?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<SpaceTimeField> {
    decode_field(&fs::read(path)?)
}
