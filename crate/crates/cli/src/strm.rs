//! The STRM tensor container.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "STRM"
//!      4     4  version, u32 = 1
//!      8     4  ndims, u32 = 3
//!     12    12  I1, I2, I3, u32 each
//!     24     4  count M, u32
//!     28     -  M·I1·I2·I3 f64 values
//! ```
//!
//! Integers and floats are little-endian. Each tensor is stored in the
//! tube-contiguous order of [`Tensor3`], tensors back to back.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use sturm_core::{Dims, Tensor3};

use crate::error::{IoError, Result};
use crate::write_atomic;

pub const MAGIC: [u8; 4] = *b"STRM";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 28;

/// Parsed and validated header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TensorFileHeader {
    pub dims: Dims,
    pub count: u32,
}

impl TensorFileHeader {
    pub fn new(dims: Dims, count: usize) -> Result<Self> {
        let too_big = |what: &str| IoError::Argument(format!("{what} does not fit in 32 bits"));
        for n in [dims.i1, dims.i2, dims.i3] {
            u32::try_from(n).map_err(|_| too_big("a dimension"))?;
        }
        let count = u32::try_from(count).map_err(|_| too_big("the tensor count"))?;
        Ok(TensorFileHeader { dims, count })
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..4].copy_from_slice(&MAGIC);
        let words = [
            VERSION,
            3,
            self.dims.i1 as u32,
            self.dims.i2 as u32,
            self.dims.i3 as u32,
            self.count,
        ];
        for (chunk, w) in out[4..].chunks_exact_mut(4).zip(words) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        out
    }

    /// Validates every field. `path` only labels the error.
    pub fn parse(bytes: &[u8], path: &Path) -> Result<Self> {
        let fail = |offset: u64, message: String| IoError::Format {
            path: path.to_path_buf(),
            offset,
            message,
        };
        if bytes.len() < HEADER_LEN {
            return Err(fail(
                bytes.len() as u64,
                format!("header needs {HEADER_LEN} bytes, file has {}", bytes.len()),
            ));
        }
        if bytes[..4] != MAGIC {
            return Err(fail(0, format!("bad magic {:?}, expected \"STRM\"", &bytes[..4])));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
        if word(4) != VERSION {
            return Err(fail(4, format!("unsupported version {}, expected {VERSION}", word(4))));
        }
        if word(8) != 3 {
            return Err(fail(8, format!("ndims is {}, expected 3", word(8))));
        }
        for (k, off) in [12usize, 16, 20].into_iter().enumerate() {
            if word(off) == 0 {
                return Err(fail(off as u64, format!("dimension I{} is zero", k + 1)));
            }
        }
        let dims = Dims::new(word(12) as usize, word(16) as usize, word(20) as usize)?;
        Ok(TensorFileHeader { dims, count: word(24) })
    }

    /// Total file length implied by the header, `None` on overflow.
    pub fn file_len(&self) -> Option<u64> {
        let per = (self.dims.i1 as u64)
            .checked_mul(self.dims.i2 as u64)?
            .checked_mul(self.dims.i3 as u64)?;
        per.checked_mul(self.count as u64)?
            .checked_mul(8)?
            .checked_add(HEADER_LEN as u64)
    }
}

/// Serializes tensors of identical shape `dims`.
pub fn encode(dims: Dims, tensors: &[Tensor3]) -> Result<Vec<u8>> {
    let header = TensorFileHeader::new(dims, tensors.len())?;
    let mut out = Vec::with_capacity(HEADER_LEN + tensors.len() * dims.len() * 8);
    out.extend_from_slice(&header.to_bytes());
    for t in tensors {
        if t.dims() != dims {
            return Err(sturm_core::Error::DimensionMismatch {
                left: dims,
                right: t.dims(),
            }
            .into());
        }
        for v in t.as_slice() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

fn decode_payload(header: TensorFileHeader, payload: &[u8], path: &Path) -> Result<Vec<Tensor3>> {
    let per = header.dims.len();
    let mut out = Vec::with_capacity(header.count as usize);
    for (m, chunk) in payload.chunks_exact(per * 8).enumerate() {
        let values: Vec<f64> = chunk
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
            .collect();
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(IoError::Format {
                path: path.to_path_buf(),
                offset: (HEADER_LEN + (m * per + i) * 8) as u64,
                message: format!("non-finite value {}", values[i]),
            });
        }
        out.push(Tensor3::from_vec(header.dims, values)?);
    }
    Ok(out)
}

fn length_error(path: &Path, header: TensorFileHeader, actual: u64) -> IoError {
    match header.file_len() {
        Some(expected) => IoError::Format {
            path: path.to_path_buf(),
            offset: expected,
            message: format!(
                "header ({} x {}) implies {expected} bytes, file has {actual}",
                header.count, header.dims
            ),
        },
        None => IoError::Format {
            path: path.to_path_buf(),
            offset: 12,
            message: "header sizes overflow a 64-bit length".into(),
        },
    }
}

/// Parses a complete in-memory file.
pub fn decode(bytes: &[u8], path: &Path) -> Result<(Dims, Vec<Tensor3>)> {
    let header = TensorFileHeader::parse(bytes, path)?;
    if header.file_len() != Some(bytes.len() as u64) {
        return Err(length_error(path, header, bytes.len() as u64));
    }
    Ok((header.dims, decode_payload(header, &bytes[HEADER_LEN..], path)?))
}

/// Reads a file, checking the header against the file size before the
/// payload buffer is allocated.
pub fn read_tensors(path: &Path) -> Result<(Dims, Vec<Tensor3>)> {
    let mut file = File::open(path).map_err(|e| IoError::io(path, e))?;
    let actual = file.metadata().map_err(|e| IoError::io(path, e))?.len();
    let mut head = Vec::with_capacity(HEADER_LEN);
    (&mut file)
        .take(HEADER_LEN as u64)
        .read_to_end(&mut head)
        .map_err(|e| IoError::io(path, e))?;
    let header = TensorFileHeader::parse(&head, path)?;
    if header.file_len() != Some(actual) {
        return Err(length_error(path, header, actual));
    }
    let mut payload = vec![0u8; (actual as usize) - HEADER_LEN];
    file.read_exact(&mut payload).map_err(|e| IoError::io(path, e))?;
    Ok((header.dims, decode_payload(header, &payload, path)?))
}

/// Atomically writes tensors of shape `dims`.
pub fn write_tensors(path: &Path, dims: Dims, tensors: &[Tensor3]) -> Result<()> {
    write_atomic(path, &encode(dims, tensors)?)
}

/// Reads a file that must hold exactly one tensor.
pub fn read_single(path: &Path) -> Result<Tensor3> {
    let (_, mut tensors) = read_tensors(path)?;
    if tensors.len() != 1 {
        return Err(IoError::Format {
            path: path.to_path_buf(),
            offset: 24,
            message: format!("expected one tensor, header count is {}", tensors.len()),
        });
    }
    Ok(tensors.pop().expect("one tensor"))
}
