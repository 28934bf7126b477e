//! Little-endian framed readers/writers shared by the on-disk formats.
//!
//! Every numeric field is fixed-width little-endian; matrices are
//! contiguous f64 blocks in row-major order. Short reads surface as
//! format errors rather than I/O panics.

use crate::error::{Error, Result};
use std::io::{Read, Write};

pub fn write_u32<W: Write>(w: &mut W, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

pub fn write_f64<W: Write>(w: &mut W, v: f64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

pub fn write_f64_slice<W: Write>(w: &mut W, vs: &[f64]) -> Result<()> {
    for &v in vs {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_exact<R: Read, const K: usize>(r: &mut R, what: &str) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated while reading {what}: {e}")))?;
    Ok(buf)
}

pub fn read_u32<R: Read>(r: &mut R, what: &str) -> Result<u32> {
    Ok(u32::from_le_bytes(read_exact::<R, 4>(r, what)?))
}

pub fn read_f64<R: Read>(r: &mut R, what: &str) -> Result<f64> {
    Ok(f64::from_le_bytes(read_exact::<R, 8>(r, what)?))
}

pub fn read_f64_vec<R: Read>(r: &mut R, len: usize, what: &str) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(read_f64(r, what)?);
    }
    Ok(out)
}

pub fn expect_magic<R: Read>(r: &mut R, magic: &[u8; 8], what: &str) -> Result<()> {
    let got = read_exact::<R, 8>(r, what)?;
    if &got != magic {
        return Err(Error::Format(format!(
            "{what}: bad magic bytes {got:02x?}, expected {magic:02x?}"
        )));
    }
    Ok(())
}
