//! Binary snapshot of a [`FockVector`].
//!
//! Layout, all little-endian: magic `b"BGFOCK01"`, `u64` particle count,
//! `u64` mode count, `f64` box length, 8-byte ordering tag `b"DESCLEX\0"`
//! (descending lexicographic occupation order), `u64` dimension, then one
//! `(re, im)` pair of `f64` per amplitude in basis order.

use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

use super::basis::FockBasis;
use super::modes::ModeBasis;
use super::state::FockVector;

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"BGFOCK01";
pub const ORDERING_TAG: &[u8; 8] = b"DESCLEX\0";

pub fn write_snapshot<W: Write>(v: &FockVector, mut out: W) -> Result<()> {
    let b = v.basis();
    out.write_all(SNAPSHOT_MAGIC)?;
    out.write_all(&(b.particles() as u64).to_le_bytes())?;
    out.write_all(&(b.mode_count() as u64).to_le_bytes())?;
    out.write_all(&b.modes().grid().length().to_le_bytes())?;
    out.write_all(ORDERING_TAG)?;
    out.write_all(&(v.dim() as u64).to_le_bytes())?;
    for a in v.amplitudes() {
        out.write_all(&a.re.to_le_bytes())?;
        out.write_all(&a.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Reads a snapshot written for the given mode window. The header must
/// agree with `modes` (count and box length).
pub fn read_snapshot<R: Read>(mut input: R, modes: &ModeBasis) -> Result<FockVector> {
    let mut tag = [0u8; 8];
    input.read_exact(&mut tag)?;
    if &tag != SNAPSHOT_MAGIC {
        return Err(Error::Format("not a Fock snapshot".into()));
    }
    let n = read_u64(&mut input)? as usize;
    let k = read_u64(&mut input)? as usize;
    let length = read_f64(&mut input)?;
    input.read_exact(&mut tag)?;
    if &tag != ORDERING_TAG {
        return Err(Error::Format(format!("unknown ordering tag {tag:?}")));
    }
    if k != modes.len() || length != modes.grid().length() {
        return Err(Error::Format(format!(
            "snapshot window (K = {k}, L = {length}) does not match (K = {}, L = {})",
            modes.len(),
            modes.grid().length()
        )));
    }
    let basis = Arc::new(FockBasis::new(n, modes)?);
    let dim = read_u64(&mut input)? as usize;
    if dim != basis.dim() {
        return Err(Error::Format(format!("dimension {dim} does not match basis dimension {}", basis.dim())));
    }
    let amps = (0..dim)
        .map(|_| Ok(C64::new(read_f64(&mut input)?, read_f64(&mut input)?)))
        .collect::<Result<Vec<_>>>()?;
    FockVector::new(basis, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;

    #[test]
    fn roundtrip_and_header() {
        let m = ModeBasis::new(&TorusGrid::new(2.5, 16).unwrap(), 4).unwrap();
        let b = Arc::new(FockBasis::new(3, &m).unwrap());
        let amps = (0..b.dim()).map(|i| C64::new(i as f64, -0.5 * i as f64)).collect();
        let v = FockVector::new(b, amps).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&v, &mut buf).unwrap();
        assert_eq!(buf.len(), 48 + 16 * 20);
        assert_eq!(&buf[..8], SNAPSHOT_MAGIC);
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 3);
        assert_eq!(f64::from_le_bytes(buf[24..32].try_into().unwrap()), 2.5);
        let back = read_snapshot(&buf[..], &m).unwrap();
        assert_eq!(back, v);

        let other = ModeBasis::new(&TorusGrid::new(2.5, 16).unwrap(), 6).unwrap();
        assert!(read_snapshot(&buf[..], &other).is_err());
        buf[0] = b'X';
        assert!(read_snapshot(&buf[..], &m).is_err());
    }
}
