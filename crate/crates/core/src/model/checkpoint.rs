//! Binary parameter container.
//!
//! ```text
//! magic "TGADCKPT" | version u32 | fusion u8 | layers u8 | slots u32
//! per slot: name_len u32 | name | rows u64 | cols u64 | rows*cols f64
//! ```
//! All integers and floats little-endian, matrices row-major.

use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;

use super::{Fusion, ModelParams, SLOT_NAMES};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"TGADCKPT";
const VERSION: u32 = 1;

pub fn write_checkpoint<W: Write>(params: &ModelParams, mut w: W) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[params.fusion.code(), params.layers as u8])?;
    let slots = params.slots();
    w.write_all(&(slots.len() as u32).to_le_bytes())?;
    for (name, m) in SLOT_NAMES.iter().zip(slots) {
        w.write_all(&(name.len() as u32).to_le_bytes())?;
        w.write_all(name.as_bytes())?;
        w.write_all(&(m.nrows() as u64).to_le_bytes())?;
        w.write_all(&(m.ncols() as u64).to_le_bytes())?;
        for v in m.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()
}

fn take<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)
        .map_err(|e| Error::Checkpoint(format!("truncated: {e}")))?;
    Ok(b)
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<ModelParams> {
    if &take::<8>(&mut r)? != MAGIC {
        return Err(Error::Checkpoint("bad magic bytes".into()));
    }
    let version = u32::from_le_bytes(take(&mut r)?);
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let [fcode, layers] = take::<2>(&mut r)?;
    let fusion = Fusion::from_code(fcode)
        .ok_or_else(|| Error::Checkpoint(format!("unknown fusion code {fcode}")))?;
    let count = u32::from_le_bytes(take(&mut r)?) as usize;
    if count != SLOT_NAMES.len() {
        return Err(Error::Checkpoint(format!("expected {} slots, found {count}", SLOT_NAMES.len())));
    }
    let mut mats = Vec::with_capacity(count);
    for expected in SLOT_NAMES {
        let len = u32::from_le_bytes(take(&mut r)?) as usize;
        if len > 64 {
            return Err(Error::Checkpoint("slot name too long".into()));
        }
        let mut name = vec![0u8; len];
        r.read_exact(&mut name)
            .map_err(|e| Error::Checkpoint(format!("truncated: {e}")))?;
        if name != expected.as_bytes() {
            return Err(Error::Checkpoint(format!(
                "expected slot {expected}, found {}",
                String::from_utf8_lossy(&name)
            )));
        }
        let rows = u64::from_le_bytes(take(&mut r)?) as usize;
        let cols = u64::from_le_bytes(take(&mut r)?) as usize;
        let total = rows
            .checked_mul(cols)
            .filter(|&t| t <= 1 << 32)
            .ok_or_else(|| Error::Checkpoint(format!("slot {expected} too large")))?;
        let mut data = Vec::with_capacity(total);
        for _ in 0..total {
            data.push(f64::from_le_bytes(take(&mut r)?));
        }
        mats.push(Array2::from_shape_vec((rows, cols), data).expect("sized"));
    }
    let mut it = mats.into_iter();
    let mut next = || it.next().expect("counted");
    let params = ModelParams {
        fusion,
        layers: layers as usize,
        w_x: next(),
        w_z: next(),
        w_x2: next(),
        w_z2: next(),
        w_g: next(),
        b_g: next(),
        w_fuse: next(),
        w_dec: next(),
        query: next(),
        tau: next(),
    };
    if !params.is_finite() {
        return Err(Error::Checkpoint("non-finite parameter".into()));
    }
    Ok(params)
}

pub fn save_checkpoint(params: &ModelParams, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_checkpoint(params, std::io::BufWriter::new(f)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<ModelParams> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_checkpoint(std::io::BufReader::new(f))
}
