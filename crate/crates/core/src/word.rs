//! Bit-packed binary words indexed by the points of F2^m.
//!
//! Index `i` stands for the point `z = (z_1, ..., z_m)` whose binary expansion
//! is `z_1 z_2 ... z_m` with `z_1` the most significant bit, so increasing
//! indices enumerate F2^m in lexicographic order. Bit `i` lives in limb
//! `i / 64` at bit position `i % 64`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

const LIMB_BITS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    len: usize,
    limbs: Vec<u64>,
}

fn limb_count(len: usize) -> usize {
    len.div_ceil(LIMB_BITS)
}

impl Word {
    /// All-zeros word of length `len`, which must be a power of two.
    pub fn zeros(len: usize) -> Word {
        assert!(len.is_power_of_two(), "word length {len} is not a power of two");
        Word {
            len,
            limbs: vec![0; limb_count(len)],
        }
    }

    pub fn ones(len: usize) -> Word {
        let mut w = Word::zeros(len);
        w.limbs.iter_mut().for_each(|l| *l = !0);
        w.clear_tail();
        w
    }

    /// Builds a word from a slice of bits; fails unless the length is a power of two.
    pub fn from_bits(bits: &[bool]) -> Result<Word> {
        if !bits.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(bits.len()));
        }
        let mut w = Word::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                w.set(i, true);
            }
        }
        Ok(w)
    }

    /// Builds a word of length `len` with ones at the given indices.
    pub fn from_ones(len: usize, ones: impl IntoIterator<Item = usize>) -> Word {
        let mut w = Word::zeros(len);
        for i in ones {
            w.flip(i);
        }
        w
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of variables `m` such that `len = 2^m`.
    #[inline]
    pub fn num_vars(&self) -> u32 {
        self.len.trailing_zeros()
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.limbs[i / LIMB_BITS] >> (i % LIMB_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % LIMB_BITS);
        if value {
            self.limbs[i / LIMB_BITS] |= mask;
        } else {
            self.limbs[i / LIMB_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.limbs[i / LIMB_BITS] ^= 1u64 << (i % LIMB_BITS);
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    /// Indices of the set bits, in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.limbs.iter().enumerate().flat_map(|(li, &limb)| {
            let mut rest = limb;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(li * LIMB_BITS + tz)
            })
        })
    }

    pub fn weight(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    /// Hamming distance; both words must have the same length.
    pub fn distance(&self, other: &Word) -> usize {
        assert_eq!(self.len, other.len, "distance between words of unequal length");
        self.limbs
            .iter()
            .zip(&other.limbs)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn xor_assign(&mut self, other: &Word) {
        assert_eq!(self.len, other.len, "xor of words of unequal length");
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Word) -> Word {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn complement(&self) -> Word {
        let mut out = self.clone();
        out.limbs.iter_mut().for_each(|l| *l = !*l);
        out.clear_tail();
        out
    }

    pub(crate) fn limbs_mut(&mut self) -> &mut [u64] {
        &mut self.limbs
    }

    fn clear_tail(&mut self) {
        let used = self.len % LIMB_BITS;
        if used != 0 {
            if let Some(last) = self.limbs.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
    }

    /// The `0`/`1` string, index 0 first.
    pub fn to_ascii(&self) -> String {
        self.bits().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Hex string: each digit covers four consecutive indices with the lowest
    /// index as the digit's most significant bit. Words shorter than four bits
    /// are zero-padded on the right.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4);
        (0..digits)
            .map(|d| {
                let nibble = (0..4).fold(0u32, |acc, j| {
                    let i = 4 * d + j;
                    (acc << 1) | u32::from(i < self.len && self.bit(i))
                });
                char::from_digit(nibble, 16).unwrap()
            })
            .collect()
    }

    /// Parses a `0`/`1` string.
    pub fn parse_ascii(s: &str) -> Result<Word> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::MalformedWord(format!(
                    "unexpected character {other:?} in binary word"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        if bits.is_empty() {
            return Err(Error::MalformedWord("empty word".into()));
        }
        Word::from_bits(&bits)
    }

    /// Parses a hex string (without prefix); the word has `4 * digits` bits.
    pub fn parse_hex(s: &str) -> Result<Word> {
        if s.is_empty() {
            return Err(Error::MalformedWord("empty hex word".into()));
        }
        let mut bits = Vec::with_capacity(4 * s.len());
        for c in s.chars() {
            let nibble = c.to_digit(16).ok_or_else(|| {
                Error::MalformedWord(format!("unexpected character {c:?} in hex word"))
            })?;
            bits.extend((0..4).rev().map(|j| (nibble >> j) & 1 == 1));
        }
        Word::from_bits(&bits)
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts a `0`/`1` string, or a hex string prefixed with `0x`.
    fn from_str(s: &str) -> Result<Word> {
        let s = s.trim();
        match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
            Some(hex) => Word::parse_hex(hex),
            None => Word::parse_ascii(s),
        }
    }
}

/// Orders words of equal length as binary integers whose most significant
/// bit is index 0. Words of different length order by length first.
impl Ord for Word {
    fn cmp(&self, other: &Word) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            for (a, b) in self.limbs.iter().zip(&other.limbs) {
                let diff = a ^ b;
                if diff != 0 {
                    let first = diff & diff.wrapping_neg();
                    return if a & first == 0 {
                        Ordering::Less
                    } else {
                        Ordering::Greater
                    };
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Word) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ascii())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self.to_ascii())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_ascii())
    }
}
