//! Linear subspaces of F2^m, their coset indexing and word projections.
//!
//! Points of F2^m are `u32` values under the same convention as [`Word`]
//! indices: coordinate `z_1` is the most significant of the `m` bits.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::word::Word;

/// Number of k-dimensional subspaces of F2^m, computed exactly.
pub fn gaussian_binomial(m: u32, k: u32) -> Result<BigUint> {
    if k > m {
        return Err(Error::InvalidSubspaceDim { m, k });
    }
    // [m choose j]_2 = [m choose j-1]_2 * (2^(m-j+1) - 1) / (2^j - 1); every
    // partial product is itself a Gaussian binomial, so each division is exact.
    let mut acc = BigUint::one();
    for j in 1..=k {
        let num = (BigUint::one() << (m - j + 1)) - 1u32;
        let den = (BigUint::one() << j) - 1u32;
        acc = acc * num / den;
    }
    Ok(acc)
}

/// A subspace of F2^m held by its reduced row echelon basis.
///
/// A basis vector's pivot is its most significant set bit. Rows are stored
/// in decreasing order, and every pivot bit is clear in all other rows, so
/// the basis is unique per subspace.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_m: u32,
    basis: Vec<u32>,
    elements: Vec<u32>,
}

impl Subspace {
    /// Span of the given generators. Zero or dependent generators are allowed.
    pub fn span(ambient_m: u32, generators: &[u32]) -> Result<Subspace> {
        if ambient_m == 0 || ambient_m > 31 {
            return Err(Error::InvalidSubspaceDim { m: ambient_m, k: 0 });
        }
        let limit = 1u32 << ambient_m;
        let mut basis: Vec<u32> = Vec::new();
        for &g in generators {
            if g >= limit {
                return Err(Error::MalformedWord(format!(
                    "vector {g:#x} outside F2^{ambient_m}"
                )));
            }
            let mut v = g;
            for &b in &basis {
                let pivot = 1 << (31 - b.leading_zeros());
                if v & pivot != 0 {
                    v ^= b;
                }
            }
            if v == 0 {
                continue;
            }
            let pivot = 1 << (31 - v.leading_zeros());
            for b in basis.iter_mut() {
                if *b & pivot != 0 {
                    *b ^= v;
                }
            }
            basis.push(v);
        }
        basis.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Subspace::from_canonical_basis(ambient_m, basis))
    }

    fn from_canonical_basis(ambient_m: u32, basis: Vec<u32>) -> Subspace {
        let elements = span_table(&basis);
        Subspace {
            ambient_m,
            basis,
            elements,
        }
    }

    pub fn ambient_m(&self) -> u32 {
        self.ambient_m
    }

    pub fn dim(&self) -> u32 {
        self.basis.len() as u32
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    /// All 2^k members; entry `a` is the combination of basis rows selected by
    /// the bits of `a`, with row 0 as the most significant bit.
    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn contains(&self, v: u32) -> bool {
        let mut v = v;
        for &b in &self.basis {
            let pivot = 1 << (31 - b.leading_zeros());
            if v & pivot != 0 {
                v ^= b;
            }
        }
        v == 0
    }
}

impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ambient_m
            .cmp(&other.ambient_m)
            .then_with(|| self.basis.cmp(&other.basis))
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// XOR-span of `vectors`: entry `a` combines the vectors selected by the bits
/// of `a`, `vectors[0]` being the most significant selector bit.
fn span_table(vectors: &[u32]) -> Vec<u32> {
    let n = vectors.len();
    let mut table = vec![0u32; 1 << n];
    for a in 1..table.len() {
        let low = a.trailing_zeros() as usize;
        table[a] = table[a & (a - 1)] ^ vectors[n - 1 - low];
    }
    table
}

/// All k-dimensional subspaces of F2^m, sorted by canonical basis.
///
/// Walks echelon profiles: for each choice of k pivot positions, every
/// assignment of the free (non-pivot, below-pivot) entries yields a distinct
/// reduced basis.
pub fn enumerate_subspaces(m: u32, k: u32) -> Result<Vec<Subspace>> {
    if k == 0 || k > m || m > 31 {
        return Err(Error::InvalidSubspaceDim { m, k });
    }
    let mut out = Vec::new();
    let mut pivots: Vec<u32> = Vec::with_capacity(k as usize);
    choose_pivots(m, k, m, &mut pivots, &mut out);
    out.sort_unstable();
    Ok(out)
}

fn choose_pivots(m: u32, k: u32, below: u32, pivots: &mut Vec<u32>, out: &mut Vec<Subspace>) {
    if pivots.len() == k as usize {
        let pivot_mask = pivots.iter().fold(0u32, |acc, &p| acc | 1 << p);
        let free: Vec<Vec<u32>> = pivots
            .iter()
            .map(|&p| (0..p).filter(|&b| pivot_mask >> b & 1 == 0).collect())
            .collect();
        let mut rows: Vec<u32> = pivots.iter().map(|&p| 1 << p).collect();
        fill_free_entries(m, 0, &free, pivots, &mut rows, out);
        return;
    }
    let remaining = k - pivots.len() as u32;
    // pivot positions strictly decreasing, leaving room for the remaining rows
    for p in (remaining - 1..below).rev() {
        pivots.push(p);
        choose_pivots(m, k, p, pivots, out);
        pivots.pop();
    }
}

fn fill_free_entries(
    m: u32,
    row: usize,
    free: &[Vec<u32>],
    pivots: &[u32],
    rows: &mut Vec<u32>,
    out: &mut Vec<Subspace>,
) {
    if row == rows.len() {
        out.push(Subspace::from_canonical_basis(m, rows.clone()));
        return;
    }
    let positions = &free[row];
    for assignment in 0u32..1 << positions.len() {
        let entries = positions
            .iter()
            .enumerate()
            .filter(|(i, _)| assignment >> i & 1 == 1)
            .fold(0u32, |acc, (_, &b)| acc | 1 << b);
        rows[row] = (1 << pivots[row]) | entries;
        fill_free_entries(m, row + 1, free, pivots, rows, out);
    }
}

/// Fixed linear bijection between the cosets of a subspace and F2^(m-k).
#[derive(Debug, Clone)]
pub struct CosetIndexMap {
    subspace: Subspace,
    complement_basis: Vec<u32>,
    index_of: Vec<u32>,
    representatives: Vec<u32>,
}

impl CosetIndexMap {
    /// Completes the subspace basis greedily with standard basis vectors
    /// e_1, ..., e_m, keeping each one that is independent of the span so
    /// far. A point's coset index is its coefficient vector on the complement
    /// basis, the first complement vector giving the most significant bit.
    pub fn new(subspace: &Subspace) -> CosetIndexMap {
        let m = subspace.ambient_m;
        let mut span = subspace.clone();
        let mut complement_basis = Vec::with_capacity((m - subspace.dim()) as usize);
        for j in 1..=m {
            let e = 1u32 << (m - j);
            if !span.contains(e) {
                complement_basis.push(e);
                let mut gens = span.basis.clone();
                gens.push(e);
                span = Subspace::span(m, &gens).expect("vectors lie in F2^m");
            }
        }
        let representatives = span_table(&complement_basis);
        let mut index_of = vec![0u32; 1 << m];
        for (t, &rep) in representatives.iter().enumerate() {
            for &b in &subspace.elements {
                index_of[(rep ^ b) as usize] = t as u32;
            }
        }
        CosetIndexMap {
            subspace: subspace.clone(),
            complement_basis,
            index_of,
            representatives,
        }
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn complement_basis(&self) -> &[u32] {
        &self.complement_basis
    }

    /// Dimension m - k of the quotient space.
    pub fn quotient_m(&self) -> u32 {
        self.subspace.ambient_m - self.subspace.dim()
    }

    #[inline]
    pub fn index_of(&self, z: u32) -> u32 {
        self.index_of[z as usize]
    }

    /// The coset member with zero subspace component.
    #[inline]
    pub fn representative(&self, t: u32) -> u32 {
        self.representatives[t as usize]
    }

    /// All points of coset `t`.
    pub fn coset(&self, t: u32) -> impl Iterator<Item = u32> + '_ {
        let rep = self.representatives[t as usize];
        self.subspace.elements.iter().map(move |&b| rep ^ b)
    }
}

/// Convenience wrapper around [`CosetIndexMap::new`].
pub fn coset_index_map(subspace: &Subspace) -> CosetIndexMap {
    CosetIndexMap::new(subspace)
}

/// XOR of `y` over each coset, indexed by coset index.
pub fn project(y: &Word, map: &CosetIndexMap) -> Result<Word> {
    let expected = 1usize << map.subspace.ambient_m;
    if y.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: y.len(),
        });
    }
    let mut out = Word::zeros(1 << map.quotient_m());
    for z in y.iter_ones() {
        out.flip(map.index_of[z] as usize);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rm::{self, CodeParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gb(m: u32, k: u32) -> u64 {
        gaussian_binomial(m, k).unwrap().try_into().unwrap()
    }

    /// Counts subspaces by collecting the distinct spans of every k-tuple of vectors.
    fn count_by_brute_force(m: u32, k: u32) -> usize {
        let n = 1u32 << m;
        let mut seen = std::collections::BTreeSet::new();
        let mut tuple = vec![0u32; k as usize];
        fn rec(
            i: usize,
            n: u32,
            m: u32,
            k: u32,
            tuple: &mut Vec<u32>,
            seen: &mut std::collections::BTreeSet<Vec<u32>>,
        ) {
            if i == tuple.len() {
                let s = Subspace::span(m, tuple).unwrap();
                if s.dim() == k {
                    let mut els = s.elements().to_vec();
                    els.sort_unstable();
                    seen.insert(els);
                }
                return;
            }
            for v in 1..n {
                tuple[i] = v;
                rec(i + 1, n, m, k, tuple, seen);
            }
        }
        rec(0, n, m, k, &mut tuple, &mut seen);
        seen.len()
    }

    #[test]
    fn gaussian_binomial_examples() {
        assert_eq!(gb(3, 1), 7);
        assert_eq!(gb(4, 2), 35);
        assert_eq!(gb(5, 5), 1);
        assert_eq!(gb(5, 0), 1);
        assert_eq!(gaussian_binomial(2, 3), Err(Error::InvalidSubspaceDim { m: 2, k: 3 }));
    }

    #[test]
    fn gaussian_binomial_matches_product_formula() {
        // direct product of all numerators over all denominators
        for m in 0..=20u32 {
            for k in 0..=m {
                let mut num = BigUint::one();
                let mut den = BigUint::one();
                for i in 0..k {
                    num *= (BigUint::one() << m) - (BigUint::one() << i);
                    den *= (BigUint::one() << k) - (BigUint::one() << i);
                }
                assert_eq!(gaussian_binomial(m, k).unwrap(), num / den, "m={m} k={k}");
            }
        }
    }

    #[test]
    fn brute_force_count_agrees() {
        assert_eq!(count_by_brute_force(4, 2), 35);
        assert_eq!(count_by_brute_force(3, 2), 7);
    }

    #[test]
    fn enumeration_examples() {
        let s = enumerate_subspaces(2, 1).unwrap();
        let bases: Vec<&[u32]> = s.iter().map(|s| s.basis()).collect();
        assert_eq!(bases, vec![&[0b01][..], &[0b10][..], &[0b11][..]]);
        assert_eq!(enumerate_subspaces(3, 1).unwrap().len(), 7);
        let full = enumerate_subspaces(4, 4).unwrap();
        assert_eq!(full.len(), 1);
        assert_eq!(full[0].elements().len(), 16);
        assert!(enumerate_subspaces(3, 0).is_err());
    }

    #[test]
    fn enumeration_counts_are_exact_and_distinct() {
        for m in 1..=6 {
            for k in 1..=m {
                let subspaces = enumerate_subspaces(m, k).unwrap();
                assert_eq!(subspaces.len() as u64, gb(m, k), "m={m} k={k}");
                for pair in subspaces.windows(2) {
                    assert!(pair[0] < pair[1]);
                }
                for s in &subspaces {
                    assert_eq!(Subspace::span(m, s.basis()).unwrap(), *s);
                    let mut els = s.elements().to_vec();
                    els.sort_unstable();
                    els.dedup();
                    assert_eq!(els.len(), 1 << k);
                    assert_eq!(els[0], 0);
                }
            }
        }
    }

    #[test]
    fn canonical_form_is_unique() {
        let a = Subspace::span(3, &[0b110, 0b011]).unwrap();
        let b = Subspace::span(3, &[0b101, 0b110, 0b011]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.basis(), &[0b101, 0b011]);
    }

    #[test]
    fn coset_map_examples() {
        let s = Subspace::span(2, &[0b01]).unwrap();
        let map = coset_index_map(&s);
        assert_eq!(map.complement_basis(), &[0b10]);
        let idx: Vec<u32> = (0..4).map(|z| map.index_of(z)).collect();
        assert_eq!(idx, vec![0, 0, 1, 1]);

        let s = Subspace::span(2, &[0b10]).unwrap();
        let map = coset_index_map(&s);
        assert_eq!(map.complement_basis(), &[0b01]);
        let idx: Vec<u32> = (0..4).map(|z| map.index_of(z)).collect();
        assert_eq!(idx, vec![0, 1, 0, 1]);

        let s = enumerate_subspaces(3, 3).unwrap().remove(0);
        let map = coset_index_map(&s);
        assert_eq!(map.quotient_m(), 0);
        assert!((0..8).all(|z| map.index_of(z) == 0));
    }

    #[test]
    fn coset_partition() {
        for m in 1..=5 {
            for k in 1..=m {
                for s in enumerate_subspaces(m, k).unwrap() {
                    let map = coset_index_map(&s);
                    let mut counts = vec![0usize; 1 << (m - k)];
                    for z in 0..1u32 << m {
                        counts[map.index_of(z) as usize] += 1;
                        assert!(map.coset(map.index_of(z)).any(|x| x == z));
                    }
                    assert!(counts.iter().all(|&c| c == 1 << k));
                    for a in 0..1u32 << m {
                        for b in 0..1u32 << m {
                            assert_eq!(map.index_of(a) == map.index_of(b), s.contains(a ^ b));
                        }
                    }
                    // the quotient map is linear
                    for a in 0..1u32 << m {
                        for b in [1u32, 3, 5].iter().map(|x| x % (1 << m)) {
                            assert_eq!(map.index_of(a ^ b), map.index_of(a) ^ map.index_of(b));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn projection_examples() {
        let s = Subspace::span(2, &[0b01]).unwrap();
        let map = coset_index_map(&s);
        let y: Word = "0111".parse().unwrap();
        assert_eq!(project(&y, &map).unwrap(), "10".parse().unwrap());
        assert_eq!(project(&Word::zeros(4), &map).unwrap(), Word::zeros(2));
        assert!(project(&Word::zeros(8), &map).is_err());
    }

    #[test]
    fn projection_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for s in enumerate_subspaces(6, 2).unwrap().iter().step_by(17) {
            let map = coset_index_map(s);
            for _ in 0..20 {
                let a = Word::from_ones(64, (0..64).filter(|_| rng.random()));
                let b = Word::from_ones(64, (0..64).filter(|_| rng.random()));
                let lhs = project(&a.xor(&b), &map).unwrap();
                let rhs = project(&a, &map).unwrap().xor(&project(&b, &map).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn projections_of_codewords_stay_in_the_code() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for m in 3..=6u32 {
            for r in 1..=m {
                for k in 1..=r.min(2) {
                    let params = CodeParams::new(m, r).unwrap();
                    let target = CodeParams::new(m - k, r - k);
                    let Ok(target) = target else { continue };
                    let maps: Vec<_> = enumerate_subspaces(m, k)
                        .unwrap()
                        .iter()
                        .map(coset_index_map)
                        .collect();
                    for _ in 0..10 {
                        let msg: Vec<bool> =
                            (0..params.dimension()).map(|_| rng.random()).collect();
                        let c = rm::encode(&msg, params).unwrap();
                        for map in &maps {
                            let pc = project(&c, map).unwrap();
                            assert!(rm::is_codeword(&pc, target).unwrap());
                        }
                    }
                }
            }
        }
    }
}
