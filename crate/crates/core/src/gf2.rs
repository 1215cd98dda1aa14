//! Gaussian elimination over GF(2) on bit-packed rows.

use crate::word::Word;

/// Incrementally maintained echelon basis of a row space.
///
/// Each stored row is reduced against all rows inserted before it, so a
/// single forward pass reduces any candidate vector.
#[derive(Debug, Clone, Default)]
pub struct EchelonBasis {
    rows: Vec<(usize, Word)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &Word) -> Word {
        let mut v = v.clone();
        for (pivot, row) in &self.rows {
            if v.bit(*pivot) {
                v.xor_assign(row);
            }
        }
        v
    }

    /// Adds `v` to the basis. Returns false if it was already in the span.
    pub fn insert(&mut self, v: &Word) -> bool {
        let reduced = self.reduce(v);
        let first = reduced.iter_ones().next();
        match first {
            Some(pivot) => {
                self.rows.push((pivot, reduced));
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: &Word) -> bool {
        self.reduce(v).is_zero()
    }
}

/// GF(2) rank of a set of equal-length rows.
pub fn rank(rows: &[Word]) -> usize {
    let mut basis = EchelonBasis::new();
    for row in rows {
        basis.insert(row);
    }
    basis.rank()
}

/// Whether `v` lies in the row space spanned by `rows`.
pub fn in_row_space(rows: &[Word], v: &Word) -> bool {
    let mut basis = EchelonBasis::new();
    for row in rows {
        basis.insert(row);
    }
    basis.contains(v)
}
