//! Cut signatures of capacity vectors.
//!
//! For a star with capacity vector c over terminals in a fixed order, the
//! weak signature records, for every terminal subset S, whether cutting S
//! off is at most as expensive as cutting off its complement:
//! `c(S) <= c(K \ S)`. The strong signature records the three-way comparison
//! `c(A)` vs `c(B)` for every pair of disjoint subsets. Two stars with equal
//! signatures behave interchangeably for cuts (weak) or simultaneous flows
//! (strong), which is what the contraction sparsifiers exploit.
//!
//! Subsets are bitmasks over terminal positions, enumerated in plain binary
//! counter order, so equal signatures are bit-for-bit equal structures.

use std::cmp::Ordering;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Capacities of one star in terminal order.
pub type CapacityVector = Vec<Rational>;

pub fn validate_capacity_vector(c: &[Rational]) -> Result<()> {
    if let Some(bad) = c.iter().find(|x| x.is_negative()) {
        return Err(Error::InvalidDemand(format!(
            "negative capacity coordinate {bad}"
        )));
    }
    Ok(())
}

/// Sum of `c` over every subset mask; `sums[m]` is the total of coordinates
/// selected by `m`.
pub(crate) fn subset_sums(c: &[Rational]) -> Vec<Rational> {
    let k = c.len();
    let mut sums = vec![Rational::zero(); 1 << k];
    for m in 1..(1usize << k) {
        let low = m.trailing_zeros() as usize;
        sums[m] = &sums[m & (m - 1)] + &c[low];
    }
    sums
}

/// Weak signature: one bit per subset mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CutSignature {
    k: usize,
    bits: Vec<u64>,
}

impl CutSignature {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn contains(&self, mask: usize) -> bool {
        self.bits[mask / 64] >> (mask % 64) & 1 == 1
    }

    /// Every subset this signature deems cheap is also cheap in `self`.
    /// This is the one-directional agreement a decomposition term must
    /// satisfy towards its source vector.
    pub fn superset_of(&self, other: &CutSignature) -> bool {
        self.k == other.k
            && self
                .bits
                .iter()
                .zip(&other.bits)
                .all(|(a, b)| a & b == *b)
    }

    pub fn agrees(&self, other: &CutSignature) -> bool {
        self == other
    }

    pub fn to_hex(&self) -> String {
        let nbits = 1usize << self.k;
        let mut out = String::new();
        let mut nibble = 0u8;
        for m in 0..nbits {
            if self.contains(m) {
                nibble |= 1 << (m % 4);
            }
            if m % 4 == 3 || m + 1 == nbits {
                out.push(char::from_digit(nibble as u32, 16).unwrap());
                nibble = 0;
            }
        }
        out
    }
}

pub fn cut_signature(c: &[Rational]) -> Result<CutSignature> {
    validate_capacity_vector(c)?;
    let k = c.len();
    let sums = subset_sums(c);
    let total = sums[(1 << k) - 1].clone();
    let mut bits = vec![0u64; ((1usize << k) + 63) / 64];
    for m in 0..(1usize << k) {
        // c(S) <= c(K \ S) without forming the complement sum
        if &sums[m] + &sums[m] <= total {
            bits[m / 64] |= 1 << (m % 64);
        }
    }
    Ok(CutSignature { k, bits })
}

/// Canonical enumeration of the strong domain: the trivial pair (0, 0)
/// first, then every disjoint pair `a < b` in lexicographic (a, b) order.
pub fn strong_pairs(k: usize) -> Vec<(usize, usize)> {
    let mut out = vec![(0, 0)];
    for a in 0..(1usize << k) {
        for b in (a + 1)..(1usize << k) {
            if a & b == 0 {
                out.push((a, b));
            }
        }
    }
    out
}

/// Strong signature: a three-way sign per canonical disjoint pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrongSignature {
    k: usize,
    signs: Vec<i8>,
}

impl StrongSignature {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Sign of `c(a) - c(b)` for the pair at canonical position `idx`.
    pub fn sign_at(&self, idx: usize) -> i8 {
        self.signs[idx]
    }

    pub fn agrees(&self, other: &StrongSignature) -> bool {
        self == other
    }

    /// Whether a vector with signature `ray` satisfies every inequality the
    /// signature of the source vector induces: strict comparisons may relax
    /// to equality but never flip.
    pub fn admits(&self, ray: &StrongSignature) -> bool {
        self.k == ray.k
            && self
                .signs
                .iter()
                .zip(&ray.signs)
                .all(|(&c, &r)| c == 0 && r == 0 || c != 0 && (r == c || r == 0))
    }

    pub fn to_hex(&self) -> String {
        // two bits per sign: 0 '=', 1 '<', 2 '>'
        let code = |s: i8| match s.cmp(&0) {
            Ordering::Equal => 0u8,
            Ordering::Less => 1,
            Ordering::Greater => 2,
        };
        let mut out = String::new();
        let mut nibble = 0u8;
        for (i, &s) in self.signs.iter().enumerate() {
            nibble |= code(s) << (2 * (i % 2));
            if i % 2 == 1 || i + 1 == self.signs.len() {
                out.push(char::from_digit(nibble as u32, 16).unwrap());
                nibble = 0;
            }
        }
        out
    }
}

pub fn strong_signature(c: &[Rational]) -> Result<StrongSignature> {
    validate_capacity_vector(c)?;
    let k = c.len();
    let sums = subset_sums(c);
    let signs = strong_pairs(k)
        .into_iter()
        .map(|(a, b)| match sums[a].cmp(&sums[b]) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        })
        .collect();
    Ok(StrongSignature { k, signs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn vecr(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn weak_signature_of_the_k2_example() {
        // c = (1,2): exactly the empty set and {t1} are cheap sides
        let sig = cut_signature(&vecr(&[1, 2])).unwrap();
        assert!(sig.contains(0b00));
        assert!(sig.contains(0b01));
        assert!(!sig.contains(0b10));
        assert!(!sig.contains(0b11));
    }

    #[test]
    fn weak_signature_marks_ties_on_both_sides() {
        let sig = cut_signature(&vecr(&[2, 1, 1])).unwrap();
        // {t1} against {t2,t3} is a tie: both masks carry the bit
        assert!(sig.contains(0b001));
        assert!(sig.contains(0b110));
        // the empty side is always cheap
        assert!(sig.contains(0));
        // one of S, complement always holds
        for m in 0..8 {
            assert!(sig.contains(m) || sig.contains(7 ^ m));
        }
    }

    #[test]
    fn scaling_does_not_change_signatures() {
        let c = [rat(1, 3), rat(5, 7), rat(2, 1)];
        let scaled: Vec<Rational> = c.iter().map(|x| x * rat(9, 2)).collect();
        assert_eq!(
            cut_signature(&c).unwrap(),
            cut_signature(&scaled).unwrap()
        );
        assert_eq!(
            strong_signature(&c).unwrap(),
            strong_signature(&scaled).unwrap()
        );
    }

    #[test]
    fn the_worked_pair_is_weak_equal_strong_unequal() {
        let a = vecr(&[1, 2, 2]);
        let b = vecr(&[2, 3, 4]);
        assert!(cut_signature(&a)
            .unwrap()
            .agrees(&cut_signature(&b).unwrap()));
        let sa = strong_signature(&a).unwrap();
        let sb = strong_signature(&b).unwrap();
        assert!(!sa.agrees(&sb));
        // the disagreement shows up at ({t2}, {t3})
        let pairs = strong_pairs(3);
        let idx = pairs.iter().position(|&p| p == (0b010, 0b100)).unwrap();
        assert_eq!(sa.sign_at(idx), 0);
        assert_eq!(sb.sign_at(idx), -1);
    }

    #[test]
    fn strong_equality_implies_weak_equality() {
        // complements are disjoint pairs, so the weak data embeds
        let samples: &[&[i64]] = &[
            &[1, 2, 4],
            &[2, 4, 8],
            &[0, 1, 1],
            &[3, 3, 3],
            &[5, 0, 2],
        ];
        for a in samples {
            for b in samples {
                let sa = strong_signature(&vecr(a)).unwrap();
                let sb = strong_signature(&vecr(b)).unwrap();
                if sa.agrees(&sb) {
                    assert!(cut_signature(&vecr(a))
                        .unwrap()
                        .agrees(&cut_signature(&vecr(b)).unwrap()));
                }
            }
        }
    }

    #[test]
    fn admits_allows_relaxation_to_equality_only() {
        let c = strong_signature(&vecr(&[1, 2])).unwrap();
        let flat = strong_signature(&vecr(&[1, 1])).unwrap();
        let rev = strong_signature(&vecr(&[2, 1])).unwrap();
        assert!(c.admits(&c));
        assert!(c.admits(&flat));
        assert!(!c.admits(&rev));
        assert!(!flat.admits(&c));
    }

    #[test]
    fn hex_encodings_are_stable() {
        let sig = cut_signature(&vecr(&[1, 2])).unwrap();
        // bits 0011 reversed into nibble order: mask 0 and 1 set
        assert_eq!(sig.to_hex(), "3");
        let s = strong_signature(&vecr(&[1, 2])).unwrap();
        assert_eq!(s.to_hex().len(), (strong_pairs(2).len() + 1) / 2);
        assert!(!cut_signature(&vecr(&[2, 1])).unwrap().to_hex().eq("3"));
    }

    #[test]
    fn negative_coordinates_are_rejected() {
        assert!(cut_signature(&[rat(-1, 1)]).is_err());
        assert!(strong_signature(&[rat(1, 1), rat(-1, 2)]).is_err());
    }
}
