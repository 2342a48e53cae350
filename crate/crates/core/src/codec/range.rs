//! A 64-bit range coder with 32-bit frequency quanta.
//!
//! The encoder follows the classic carry-propagating design (a cached byte
//! plus a run of pending `0xFF` bytes), widened to a 64-bit range. Instead of
//! flushing a fixed number of bytes, [`Encoder::finish`] picks the shortest
//! bit string whose dyadic interval fits inside the final coding interval, so
//! the output length tracks `−log₂ P` to within a couple of bits.

use crate::error::{Error, Result};

/// Probabilities are integers out of `2^32`.
pub const TOTAL_BITS: u32 = 32;
pub const TOTAL: u64 = 1 << TOTAL_BITS;
const TOP: u64 = 1 << 56;

/// A bit string of exactly `bits` bits, packed most significant bit first;
/// unused low bits of the last byte are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitString {
    bits: u64,
    bytes: Vec<u8>,
}

impl BitString {
    pub fn new(bits: u64, bytes: Vec<u8>) -> Result<Self> {
        let need = bits.div_ceil(8) as usize;
        if bytes.len() < need {
            return Err(Error::TruncatedStream);
        }
        if bytes.len() > need {
            return Err(Error::Container(format!("{} bytes for {bits} bits", bytes.len())));
        }
        let spare = (need as u64 * 8 - bits) as u32;
        if spare > 0 && bytes[need - 1] & ((1u8 << spare) - 1) != 0 {
            return Err(Error::Container("nonzero padding bits".into()));
        }
        Ok(Self { bits, bytes })
    }

    pub fn len_bits(&self) -> u64 {
        self.bits
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }
}

/// Cumulative frequency table for one coding context. Symbols with zero
/// frequency cannot be coded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreqTable {
    cum: Vec<u64>,
}

impl FreqTable {
    /// `freqs` must sum to exactly `2^32`.
    pub fn new(freqs: &[u64]) -> Result<Self> {
        let mut cum = Vec::with_capacity(freqs.len() + 1);
        cum.push(0);
        let mut acc = 0u64;
        for &f in freqs {
            acc += f;
            cum.push(acc);
        }
        if acc != TOTAL {
            return Err(Error::invalid(format!("frequencies sum to {acc}, not 2^32")));
        }
        Ok(Self { cum })
    }

    pub fn len(&self) -> usize {
        self.cum.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn freq(&self, s: usize) -> u64 {
        self.cum[s + 1] - self.cum[s]
    }

    /// The only symbol with nonzero frequency, if there is exactly one.
    pub fn certain(&self) -> Option<usize> {
        (0..self.len()).find(|&s| self.freq(s) == TOTAL)
    }

    fn find(&self, value: u64) -> usize {
        // largest s with cum[s] ≤ value
        self.cum.partition_point(|&c| c <= value) - 1
    }
}

pub struct Encoder {
    low: u128,
    range: u64,
    cache: u8,
    cache_size: u64,
    out: Vec<u8>,
}

impl Default for Encoder {
    fn default() -> Self {
        Self::new()
    }
}

impl Encoder {
    pub fn new() -> Self {
        Self { low: 0, range: u64::MAX, cache: 0, cache_size: 1, out: Vec::new() }
    }

    fn shift_low(&mut self) {
        if self.low < 0xFF00_0000_0000_0000 || self.low >= 1u128 << 64 {
            let carry = (self.low >> 64) as u8;
            let mut byte = self.cache;
            loop {
                self.out.push(byte.wrapping_add(carry));
                byte = 0xFF;
                self.cache_size -= 1;
                if self.cache_size == 0 {
                    break;
                }
            }
            self.cache = ((self.low >> 56) & 0xFF) as u8;
        }
        self.cache_size += 1;
        self.low = (self.low & 0x00FF_FFFF_FFFF_FFFF) << 8;
    }

    /// Codes symbol `s` of `table`. Symbols that are certain cost nothing and
    /// are skipped; the decoder skips them the same way.
    pub fn encode(&mut self, table: &FreqTable, s: usize) -> Result<()> {
        let f = table.freq(s);
        if f == 0 {
            return Err(Error::ModelMismatch(format!("symbol {s} has zero probability")));
        }
        if f == TOTAL {
            return Ok(());
        }
        let r = self.range >> TOTAL_BITS;
        self.low += (table.cum[s] * r) as u128;
        self.range = f * r;
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
        Ok(())
    }

    /// Ends the stream with the shortest suffix that pins down the interval.
    pub fn finish(mut self) -> BitString {
        // the interval is [P·2^64 + low, … + range) at a scale of
        // 8·(pending bytes after the leading zero byte) + 64 bits
        let lead_bytes = self.out.len() as u64 + self.cache_size - 1;
        let low = self.low;
        let high = low + self.range as u128;
        let mut chosen = None;
        for m in (0..=64u32).rev() {
            let unit = 1u128 << m;
            let v = low.div_ceil(unit) * unit;
            if v + unit <= high {
                chosen = Some((m, v));
                break;
            }
        }
        let (m, v) = chosen.expect("range is at least 2^56, so some dyadic interval fits");
        self.low = v;
        for _ in 0..9 {
            self.shift_low();
        }
        let bits = 8 * lead_bytes + 64 - m as u64;
        let mut bytes = self.out.split_off(1);
        bytes.truncate(bits.div_ceil(8) as usize);
        BitString { bits, bytes }
    }
}

pub struct Decoder<'a> {
    bytes: &'a [u8],
    pos: usize,
    code: u64,
    range: u64,
}

impl<'a> Decoder<'a> {
    pub fn new(bits: &'a BitString) -> Self {
        let mut d = Self { bytes: &bits.bytes, pos: 0, code: 0, range: u64::MAX };
        for _ in 0..8 {
            d.code = (d.code << 8) | d.next_byte() as u64;
        }
        d
    }

    fn next_byte(&mut self) -> u8 {
        let b = self.bytes.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        b
    }

    pub fn decode(&mut self, table: &FreqTable) -> Result<usize> {
        if let Some(s) = table.certain() {
            return Ok(s);
        }
        let r = self.range >> TOTAL_BITS;
        let value = self.code / r;
        if value >= TOTAL {
            return Err(Error::TruncatedStream);
        }
        let s = table.find(value);
        if table.freq(s) == 0 {
            return Err(Error::TruncatedStream);
        }
        self.code -= table.cum[s] * r;
        self.range = table.freq(s) * r;
        while self.range < TOP {
            // a valid stream never needs more than 8 bytes past its end
            if self.pos >= self.bytes.len() + 8 {
                return Err(Error::TruncatedStream);
            }
            self.code = (self.code << 8) | self.next_byte() as u64;
            self.range <<= 8;
        }
        Ok(s)
    }

    /// Checks that the bit string was long enough for everything decoded.
    pub fn finish(&self, bits: &BitString) -> Result<()> {
        let consumed_lead = (self.pos as u64).saturating_sub(8);
        if bits.len_bits() < 8 * consumed_lead {
            return Err(Error::TruncatedStream);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn table(freqs: &[u64]) -> FreqTable {
        FreqTable::new(freqs).unwrap()
    }

    #[test]
    fn empty_stream_is_one_bit() {
        let b = Encoder::new().finish();
        assert_eq!(b.len_bits(), 1);
        assert_eq!(b.bytes(), &[0]);
    }

    #[test]
    fn fair_bits_cost_one_bit_each() {
        let t = table(&[TOTAL / 2, TOTAL / 2]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for n in [1usize, 7, 64, 1000] {
            let syms: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
            let mut enc = Encoder::new();
            for &s in &syms {
                enc.encode(&t, s).unwrap();
            }
            let bits = enc.finish();
            assert!(bits.len_bits() >= n as u64 && bits.len_bits() <= n as u64 + 2, "{n}: {}", bits.len_bits());
            let mut dec = Decoder::new(&bits);
            let back: Vec<usize> = (0..n).map(|_| dec.decode(&t).unwrap()).collect();
            dec.finish(&bits).unwrap();
            assert_eq!(back, syms);
        }
    }

    #[test]
    fn skewed_round_trip_and_carries() {
        // highly skewed tables force long 0xFF runs and carries
        let t = table(&[1, TOTAL - 2, 1]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let n = rng.random_range(1..300);
            let syms: Vec<usize> = (0..n)
                .map(|_| if rng.random_bool(0.05) { [0, 2][rng.random_range(0..2)] } else { 1 })
                .collect();
            let mut enc = Encoder::new();
            for &s in &syms {
                enc.encode(&t, s).unwrap();
            }
            let bits = enc.finish();
            let mut dec = Decoder::new(&bits);
            let back: Vec<usize> = (0..n).map(|_| dec.decode(&t).unwrap()).collect();
            assert_eq!(back, syms);
        }
    }

    #[test]
    fn zero_frequency_rejected() {
        let t = table(&[TOTAL, 0]);
        assert!(matches!(Encoder::new().encode(&t, 1), Err(Error::ModelMismatch(_))));
        assert!(FreqTable::new(&[1, 2]).is_err());
    }

    #[test]
    fn bit_string_validation() {
        assert!(BitString::new(9, vec![0]).is_err());
        assert!(BitString::new(9, vec![0, 0x80]).is_ok());
        assert!(BitString::new(9, vec![0, 0x40]).is_err());
        assert!(BitString::new(8, vec![0, 0]).is_err());
    }
}
