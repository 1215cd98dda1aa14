//! Maximum-likelihood decoding of first-order RM codes with the fast
//! Hadamard transform, plus an exhaustive ML oracle for small codes.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rm::{self, CodeParams};
use crate::word::Word;

/// Largest code dimension [`brute_force_ml`] will enumerate.
pub const MAX_BRUTE_FORCE_DIMENSION: usize = 24;

/// A word in the ±1 domain, `a± = (-1)^a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmWord {
    values: Vec<i8>,
}

impl PmWord {
    pub fn new(values: Vec<i8>) -> Result<PmWord> {
        if !values.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(values.len()));
        }
        if let Some(v) = values.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::MalformedWord(format!("{v} is not a sign")));
        }
        Ok(PmWord { values })
    }

    pub fn from_word(w: &Word) -> PmWord {
        PmWord {
            values: w.bits().map(|b| if b { -1 } else { 1 }).collect(),
        }
    }

    pub fn to_word(&self) -> Word {
        Word::from_ones(
            self.values.len(),
            self.values
                .iter()
                .enumerate()
                .filter(|(_, &v)| v < 0)
                .map(|(i, _)| i),
        )
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Unnormalized in-place Walsh-Hadamard butterfly:
/// `v[s] <- sum_x v[x] (-1)^(popcount(x & s))`.
pub fn hadamard_in_place(v: &mut [i32]) {
    assert!(v.len().is_power_of_two(), "length must be a power of two");
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// All correlations `sum_x y(x) (-1)^(x·s)`, indexed by `s`.
pub fn hadamard_spectrum(y: &PmWord) -> Vec<i32> {
    let mut v: Vec<i32> = y.values.iter().map(|&x| i32::from(x)).collect();
    hadamard_in_place(&mut v);
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// The first-order codeword `sigma · chi_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FirstOrderEstimate {
    pub s: u32,
    pub sigma: Sign,
}

/// Decision plus the number of `(s, sigma)` pairs attaining the maximum
/// correlation; more than one means the tie-break rule chose the estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FirstOrderDecision {
    pub estimate: FirstOrderEstimate,
    pub maximizers: usize,
}

impl FirstOrderDecision {
    pub fn is_tie(&self) -> bool {
        self.maximizers > 1
    }
}

/// ML decoding of RM(m', 1): the `(s, sigma)` maximizing `sigma · spectrum[s]`.
///
/// Ties go to a positive correlation, then to the smallest `s`.
pub fn ml_decode_first_order(y: &Word) -> Result<FirstOrderEstimate> {
    Ok(ml_decode_first_order_counted(y)?.estimate)
}

pub fn ml_decode_first_order_counted(y: &Word) -> Result<FirstOrderDecision> {
    if y.len() < 2 {
        return Err(Error::LengthMismatch {
            expected: 2,
            actual: y.len(),
        });
    }
    let spectrum = hadamard_spectrum(&PmWord::from_word(y));
    let best = spectrum.iter().map(|v| v.abs()).max().unwrap_or(0);
    let mut chosen: Option<FirstOrderEstimate> = None;
    let mut maximizers = 0;
    // positive maximizers first, then negative, each scanned by increasing s
    for sigma in [Sign::Plus, Sign::Minus] {
        for (s, &v) in spectrum.iter().enumerate() {
            if v * sigma.value() == best {
                maximizers += 1;
                chosen.get_or_insert(FirstOrderEstimate { s: s as u32, sigma });
            }
        }
    }
    Ok(FirstOrderDecision {
        estimate: chosen.expect("spectrum has a maximizer"),
        maximizers,
    })
}

/// The word of `sigma · chi_s` on F2^m'.
pub fn estimate_to_word(e: FirstOrderEstimate, m: u32) -> Word {
    let n = 1usize << m;
    let negate = e.sigma == Sign::Minus;
    Word::from_ones(
        n,
        (0..n).filter(|&x| ((x as u32 & e.s).count_ones() % 2 == 1) != negate),
    )
}

/// Exhaustive nearest-codeword search; ties go to the smallest codeword under
/// [`Word`]'s ordering.
pub fn brute_force_ml(y: &Word, params: CodeParams) -> Result<Word> {
    if y.len() != params.len() {
        return Err(Error::LengthMismatch {
            expected: params.len(),
            actual: y.len(),
        });
    }
    let dimension = params.dimension();
    if dimension > MAX_BRUTE_FORCE_DIMENSION {
        return Err(Error::DimensionTooLarge {
            dimension,
            limit: MAX_BRUTE_FORCE_DIMENSION,
        });
    }
    let rows = rm::generator_rows(params);
    // Gray-code walk: step i toggles the row at the lowest set bit of i.
    let mut codeword = Word::zeros(params.len());
    let mut best = codeword.clone();
    let mut best_dist = y.distance(&codeword);
    for i in 1u64..1 << dimension {
        codeword.xor_assign(&rows[i.trailing_zeros() as usize]);
        let dist = y.distance(&codeword);
        if dist < best_dist || (dist == best_dist && codeword < best) {
            best_dist = dist;
            best.clone_from(&codeword);
        }
    }
    Ok(best)
}
