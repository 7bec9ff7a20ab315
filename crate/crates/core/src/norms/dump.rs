use super::{GramMatrix, NormError};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::io::{Read, Write};

pub const GRAM_MAGIC: &[u8; 4] = b"SLGM";

fn io(e: std::io::Error) -> NormError {
    NormError::Io(e.to_string())
}

/// `SLGM`, `u32` dimension, `u64` reserved, then row-major `re, im` pairs,
/// all little-endian.
pub fn write_gram_binary<W: Write>(m: &DMatrix<Complex64>, mut w: W) -> Result<(), NormError> {
    let n = m.nrows();
    let mut buf = Vec::with_capacity(16 + 16 * n * n);
    buf.extend_from_slice(GRAM_MAGIC);
    buf.extend_from_slice(&(n as u32).to_le_bytes());
    buf.extend_from_slice(&0u64.to_le_bytes());
    for i in 0..n {
        for j in 0..n {
            buf.extend_from_slice(&m[(i, j)].re.to_le_bytes());
            buf.extend_from_slice(&m[(i, j)].im.to_le_bytes());
        }
    }
    w.write_all(&buf).map_err(io)
}

pub fn read_gram_binary<R: Read>(mut r: R) -> Result<DMatrix<Complex64>, NormError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(io)?;
    if bytes.len() < 16 || &bytes[..4] != GRAM_MAGIC {
        return Err(NormError::BadDump("missing header".into()));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    if bytes.len() != 16 + 16 * n * n {
        return Err(NormError::BadDump(format!("expected {} bytes, got {}", 16 + 16 * n * n, bytes.len())));
    }
    let f = |off: usize| f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let off = 16 + 16 * (i * n + j);
        Complex64::new(f(off), f(off + 8))
    }))
}

/// One line per entry: `row,col,row_label,col_label,re,im`.
pub fn write_gram_csv<W: Write>(g: &GramMatrix, mut w: W) -> Result<(), NormError> {
    writeln!(w, "row,col,row_label,col_label,re,im").map_err(io)?;
    for i in 0..g.dim() {
        for j in 0..g.dim() {
            let z = g.m[(i, j)];
            writeln!(w, "{i},{j},{},{},{:e},{:e}", g.labels[i], g.labels[j], z.re, z.im).map_err(io)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{gram_multiplicative, FamilySpec};
    use crate::rationals::{enumerate_pairs, Window};

    #[test]
    fn binary_round_trip() {
        let g = gram_multiplicative(&FamilySpec::new(7.0, 3, 2.0), &enumerate_pairs(20.0, Window::Dyadic, 1));
        let mut buf = Vec::new();
        write_gram_binary(&g.m, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"SLGM");
        assert_eq!(buf.len(), 16 + 16 * g.dim() * g.dim());
        assert_eq!(read_gram_binary(buf.as_slice()).unwrap(), g.m);
        assert!(read_gram_binary(&buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn csv_has_every_entry() {
        let g = gram_multiplicative(&FamilySpec::new(3.0, 1, 1.0), &enumerate_pairs(4.0, Window::Dyadic, 1));
        let mut buf = Vec::new();
        write_gram_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + g.dim() * g.dim());
        assert!(text.lines().nth(1).unwrap().starts_with("0,0,1/3,1/3,"));
    }
}
