//! Binary waveform files.
//!
//! Layout, all little-endian: a 32-byte header
//!
//! ```text
//! 0   magic  b"CVWF"
//! 4   u16    version (1)
//! 6   u16    kind (0 real, 1 complex)
//! 8   f64    sample rate, Hz
//! 16  u64    length in samples
//! 24  f64    center-frequency hint, Hz
//! ```
//!
//! followed by `length` f64 values (real) or `length` interleaved I/Q pairs.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::{Complex64, Error, Result, Samples, Waveform};

const MAGIC: &[u8; 4] = b"CVWF";
const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 32;

pub fn write_waveform_to(w: &Waveform, out: &mut impl Write) -> Result<()> {
    let mut header = [0u8; HEADER_LEN];
    header[0..4].copy_from_slice(MAGIC);
    header[4..6].copy_from_slice(&VERSION.to_le_bytes());
    header[6..8].copy_from_slice(&u16::from(w.is_complex()).to_le_bytes());
    header[8..16].copy_from_slice(&w.sample_rate().to_le_bytes());
    header[16..24].copy_from_slice(&(w.len() as u64).to_le_bytes());
    header[24..32].copy_from_slice(&w.center_frequency_hint.to_le_bytes());
    out.write_all(&header)?;
    match w.samples() {
        Samples::Real(v) => {
            for x in v {
                out.write_all(&x.to_le_bytes())?;
            }
        }
        Samples::Complex(v) => {
            for z in v {
                out.write_all(&z.re.to_le_bytes())?;
                out.write_all(&z.im.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

pub fn read_waveform_from(input: &mut impl Read) -> Result<Waveform> {
    let mut header = [0u8; HEADER_LEN];
    input.read_exact(&mut header)?;
    if &header[0..4] != MAGIC {
        return Err(Error::Format("bad magic, not a waveform file".into()));
    }
    let u16_at = |i: usize| u16::from_le_bytes([header[i], header[i + 1]]);
    let f64_at = |i: usize| f64::from_le_bytes(header[i..i + 8].try_into().expect("8 bytes"));
    let version = u16_at(4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let kind = u16_at(6);
    let rate = f64_at(8);
    let len = u64::from_le_bytes(header[16..24].try_into().expect("8 bytes")) as usize;
    let center = f64_at(24);
    let per_sample = match kind {
        0 => 1,
        1 => 2,
        k => return Err(Error::Format(format!("unknown sample kind {k}"))),
    };
    let mut values = Vec::with_capacity(len * per_sample);
    let mut buf = [0u8; 8];
    for _ in 0..len * per_sample {
        input
            .read_exact(&mut buf)
            .map_err(|_| Error::Format(format!("file ends before {len} samples")))?;
        values.push(f64::from_le_bytes(buf));
    }
    let samples = if kind == 0 {
        Samples::Real(values)
    } else {
        Samples::Complex(values.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect())
    };
    Ok(Waveform::new(samples, rate)?.with_center(center))
}

pub fn write_waveform(path: impl AsRef<Path>, w: &Waveform) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_waveform_to(w, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn read_waveform(path: impl AsRef<Path>) -> Result<Waveform> {
    read_waveform_from(&mut BufReader::new(File::open(path)?))
}
