//! Binary matrix dump.
//!
//! Layout, all little-endian:
//!
//! | bytes | content                                      |
//! |-------|----------------------------------------------|
//! | 8     | magic `HBEMMAT1`                             |
//! | 4     | operator tag (`u32`, see [`OperatorTag::code`]) |
//! | 8     | `n` (`u64`)                                  |
//! | 8     | `k` (`f64`, NaN when absent)                 |
//! | 8     | mesh hash (`u64`)                            |
//! | 16·n² | entries row by row, real then imaginary part |

use std::io::{self, Read, Write};

use num_complex::Complex64;

use super::{GalerkinMatrix, OperatorTag};
use crate::linalg::DenseComplexMatrix;

pub const MATRIX_MAGIC: &[u8; 8] = b"HBEMMAT1";

pub fn write_matrix<W: Write>(mut w: W, m: &GalerkinMatrix) -> io::Result<()> {
    w.write_all(MATRIX_MAGIC)?;
    w.write_all(&m.op.code().to_le_bytes())?;
    w.write_all(&(m.n() as u64).to_le_bytes())?;
    w.write_all(&m.k.unwrap_or(f64::NAN).to_le_bytes())?;
    w.write_all(&m.mesh_id.to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * m.n());
    for row in m.data.as_slice().chunks(m.n().max(1)) {
        buf.clear();
        for z in row {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> io::Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

pub fn read_matrix<R: Read>(mut r: R) -> io::Result<GalerkinMatrix> {
    let magic: [u8; 8] = read_array(&mut r)?;
    if &magic != MATRIX_MAGIC {
        return Err(invalid("not a matrix dump (bad magic)"));
    }
    let code = u32::from_le_bytes(read_array(&mut r)?);
    let op = OperatorTag::from_code(code)
        .ok_or_else(|| invalid(format!("unknown operator tag {code}")))?;
    let n = u64::from_le_bytes(read_array(&mut r)?);
    let n = usize::try_from(n).map_err(|_| invalid("matrix size overflows usize"))?;
    let k = f64::from_le_bytes(read_array(&mut r)?);
    let mesh_id = u64::from_le_bytes(read_array(&mut r)?);
    let len = n
        .checked_mul(n)
        .ok_or_else(|| invalid("matrix size overflows usize"))?;
    let mut data = Vec::with_capacity(len.min(1 << 20));
    let mut r = io::BufReader::new(r);
    for _ in 0..len {
        let re = f64::from_le_bytes(read_array(&mut r)?);
        let im = f64::from_le_bytes(read_array(&mut r)?);
        data.push(Complex64::new(re, im));
    }
    let data = DenseComplexMatrix::from_vec(n, data).map_err(|e| invalid(e.to_string()))?;
    Ok(GalerkinMatrix {
        data,
        op,
        k: if k.is_nan() { None } else { Some(k) },
        mesh_id,
    })
}
