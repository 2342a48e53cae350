use std::io::{Read, Write};

use crate::codec::range::BitString;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 5] = b"AEPC1";

/// 64-bit FNV-1a.
pub fn fnv1a64(data: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in data {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// `AEPC1`, model hash (u64 LE), payload bit count (u64 LE), payload.
pub fn write_container<W: Write>(mut w: W, model_hash: u64, payload: &BitString) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&model_hash.to_le_bytes())?;
    w.write_all(&payload.len_bits().to_le_bytes())?;
    w.write_all(payload.bytes())?;
    Ok(())
}

/// Reads a container and checks it was written for `model_hash`.
pub fn read_container<R: Read>(mut r: R, model_hash: u64) -> Result<BitString> {
    let mut head = [0u8; 21];
    r.read_exact(&mut head).map_err(|_| Error::Container("header too short".into()))?;
    if &head[..5] != MAGIC {
        return Err(Error::Container("bad magic".into()));
    }
    let hash = u64::from_le_bytes(head[5..13].try_into().unwrap());
    if hash != model_hash {
        return Err(Error::ModelMismatch(format!("container hash {hash:016x}, model hash {model_hash:016x}")));
    }
    let bits = u64::from_le_bytes(head[13..21].try_into().unwrap());
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    BitString::new(bits, bytes)
}
