//! Reed-Muller codes RM(m, r): evaluation vectors of m-variate GF(2)
//! polynomials of degree at most r.
//!
//! A monomial `x_{j1} x_{j2} ...` is represented by the point of F2^m whose
//! coordinates `z_{j1}, z_{j2}, ...` are one, i.e. a bit mask where variable
//! `x_j` is bit `m - j` of the point index. With this encoding the monomial
//! evaluates to one at `z` iff `z & mask == mask`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2;
use crate::word::Word;

/// Largest supported number of variables.
pub const MAX_M: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CodeParams {
    m: u32,
    r: u32,
}

impl CodeParams {
    pub fn new(m: u32, r: u32) -> Result<CodeParams> {
        if m == 0 || m > MAX_M {
            return Err(Error::InvalidParams {
                m,
                r,
                reason: "m must lie in 1..=20",
            });
        }
        if r > m {
            return Err(Error::InvalidParams {
                m,
                r,
                reason: "order r must not exceed m",
            });
        }
        Ok(CodeParams { m, r })
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn r(&self) -> u32 {
        self.r
    }

    /// Blocklength N = 2^m.
    #[inline]
    pub fn len(&self) -> usize {
        1 << self.m
    }

    pub fn dimension(&self) -> usize {
        dimension(*self)
    }

    pub fn min_distance(&self) -> usize {
        min_distance(*self)
    }
}

impl std::fmt::Display for CodeParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RM({},{})", self.m, self.r)
    }
}

fn binomial(n: u32, k: u32) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) as usize / (i + 1) as usize)
}

/// Sum of C(m, i) for i = 0..=r.
pub fn dimension(params: CodeParams) -> usize {
    (0..=params.r).map(|i| binomial(params.m, i)).sum()
}

/// 2^(m - r).
pub fn min_distance(params: CodeParams) -> usize {
    1 << (params.m - params.r)
}

/// Monomial masks in message order: by degree, then lexicographically on the
/// sorted variable subset.
pub fn monomials(params: CodeParams) -> Vec<u32> {
    let m = params.m;
    let mut out = Vec::with_capacity(params.dimension());
    for degree in 0..=params.r {
        let mut vars: Vec<u32> = (1..=degree).collect();
        loop {
            out.push(vars.iter().fold(0u32, |mask, &j| mask | (1 << (m - j))));
            // advance to the next combination of `degree` variables from 1..=m
            let Some(pos) = (0..vars.len()).rev().find(|&i| vars[i] < m - (vars.len() - 1 - i) as u32)
            else {
                break;
            };
            vars[pos] += 1;
            for i in pos + 1..vars.len() {
                vars[i] = vars[i - 1] + 1;
            }
        }
    }
    out
}

/// One generator row per monomial, in message order.
pub fn generator_rows(params: CodeParams) -> Vec<Word> {
    let n = params.len();
    monomials(params)
        .into_iter()
        .map(|mask| Word::from_ones(n, (0..n).filter(|&z| z as u32 & mask == mask)))
        .collect()
}

/// In-place binary Moebius transform. Maps algebraic normal form coefficients
/// to evaluations and back (it is an involution over GF(2)).
pub(crate) fn moebius_in_place(w: &mut Word) {
    const LOW_HALVES: [u64; 6] = [
        0x5555_5555_5555_5555,
        0x3333_3333_3333_3333,
        0x0f0f_0f0f_0f0f_0f0f,
        0x00ff_00ff_00ff_00ff,
        0x0000_ffff_0000_ffff,
        0x0000_0000_ffff_ffff,
    ];
    let m = w.num_vars() as usize;
    let limbs = w.limbs_mut();
    for b in 0..m.min(6) {
        let shift = 1 << b;
        for limb in limbs.iter_mut() {
            *limb ^= (*limb & LOW_HALVES[b]) << shift;
        }
    }
    for b in 6..m {
        let stride = 1 << (b - 6);
        for j in 0..limbs.len() {
            if j & stride != 0 {
                limbs[j] ^= limbs[j ^ stride];
            }
        }
    }
}

/// Encodes a message (one coefficient per monomial, message order).
pub fn encode(msg: &[bool], params: CodeParams) -> Result<Word> {
    let monos = monomials(params);
    if msg.len() != monos.len() {
        return Err(Error::LengthMismatch {
            expected: monos.len(),
            actual: msg.len(),
        });
    }
    let mut anf = Word::zeros(params.len());
    for (&bit, &mask) in msg.iter().zip(&monos) {
        if bit {
            anf.set(mask as usize, true);
        }
    }
    moebius_in_place(&mut anf);
    Ok(anf)
}

/// Recovers the message of a codeword; `None` if the word is not in the code.
pub fn message_of(word: &Word, params: CodeParams) -> Result<Option<Vec<bool>>> {
    check_len(word, params)?;
    let mut anf = word.clone();
    moebius_in_place(&mut anf);
    if anf.iter_ones().any(|z| z.count_ones() > params.r) {
        return Ok(None);
    }
    Ok(Some(
        monomials(params)
            .into_iter()
            .map(|mask| anf.bit(mask as usize))
            .collect(),
    ))
}

/// Codeword membership: the word's algebraic normal form has degree at most r.
pub fn is_codeword(word: &Word, params: CodeParams) -> Result<bool> {
    check_len(word, params)?;
    let mut anf = word.clone();
    moebius_in_place(&mut anf);
    let low_degree = anf.iter_ones().all(|z| z.count_ones() <= params.r);
    Ok(low_degree)
}

/// Codeword membership by Gaussian elimination against the generator rows.
/// Cost grows with dimension times length; meant for small codes.
pub fn is_codeword_by_elimination(word: &Word, params: CodeParams) -> Result<bool> {
    check_len(word, params)?;
    Ok(gf2::in_row_space(&generator_rows(params), word))
}

fn check_len(word: &Word, params: CodeParams) -> Result<()> {
    if word.len() != params.len() {
        return Err(Error::LengthMismatch {
            expected: params.len(),
            actual: word.len(),
        });
    }
    Ok(())
}
