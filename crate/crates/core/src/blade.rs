//! Canonical basis blades `e_{i1} ∧ … ∧ e_{ip}` with `i1 < … < ip`.
//!
//! A blade is stored as a bit pattern over the basis vectors (bit `i` set means
//! `e_{i+1}` is a factor). The canonical ordering of a degree-`p` basis is
//! increasing bit-pattern value, i.e. colexicographic order of the index sets,
//! which lets [`Blade::rank`] be computed arithmetically.

use std::fmt;

/// Largest supported ambient dimension for blade bit patterns.
pub const MAX_DIM: usize = 32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Blade(u32);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    pub fn from_bits(bits: u32) -> Self {
        Blade(bits)
    }

    /// The basis vector `e_{i+1}` (zero-based index `i`).
    pub fn vector(i: usize) -> Self {
        debug_assert!(i < MAX_DIM);
        Blade(1 << i)
    }

    /// Blade from distinct zero-based indices, returning the sign needed to
    /// sort them into increasing order, or `None` if an index repeats.
    pub fn from_indices(indices: &[usize]) -> Option<(i8, Blade)> {
        let mut bits = 0u32;
        let mut sign = 1i8;
        for &i in indices {
            let bit = 1u32 << i;
            if bits & bit != 0 {
                return None;
            }
            if (bits >> i).count_ones() % 2 == 1 {
                sign = -sign;
            }
            bits |= bit;
        }
        Some((sign, Blade(bits)))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    /// Zero-based indices in increasing order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// `e_i ∧ self`, as a sign and blade.
    pub fn wedge_vector(self, i: usize) -> Option<(i8, Blade)> {
        if self.contains(i) {
            return None;
        }
        let below = (self.0 & ((1u32 << i) - 1)).count_ones();
        Some((parity_sign(below), Blade(self.0 | (1 << i))))
    }

    /// `e_i ⌟ self`, as a sign and blade.
    pub fn contract_vector(self, i: usize) -> Option<(i8, Blade)> {
        if !self.contains(i) {
            return None;
        }
        let below = (self.0 & ((1u32 << i) - 1)).count_ones();
        Some((parity_sign(below), Blade(self.0 & !(1 << i))))
    }

    /// `self ∧ other`.
    pub fn wedge(self, other: Blade) -> Option<(i8, Blade)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // count pairs (a in self, b in other) with a > b
        let swaps: u32 = other.indices().map(|b| (self.0 >> b).count_ones()).sum();
        Some((parity_sign(swaps), Blade(self.0 | other.0)))
    }

    /// Position of this blade in the canonical basis of its degree.
    pub fn rank(self) -> usize {
        self.indices().enumerate().map(|(t, pos)| binomial(pos, t + 1)).sum()
    }

    /// The degree-`p` blade at position `rank` in the canonical basis; inverse
    /// of [`rank`](Self::rank).
    pub fn unrank(mut rank: usize, p: usize) -> Blade {
        let mut bits = 0u32;
        for t in (1..=p).rev() {
            let mut c = t - 1;
            while binomial(c + 1, t) <= rank {
                c += 1;
            }
            rank -= binomial(c, t);
            bits |= 1 << c;
        }
        Blade(bits)
    }
}

fn parity_sign(count: u32) -> i8 {
    if count.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl fmt::Debug for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        write!(f, "e")?;
        let idx: Vec<String> = self.indices().map(|i| (i + 1).to_string()).collect();
        write!(f, "{}", idx.join("."))
    }
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Dimension of `Λ^p(ℝ^n)`; zero for degrees outside `[0, n]`.
pub fn form_dim(n: usize, p: i32) -> usize {
    if p < 0 || p as usize > n {
        0
    } else {
        binomial(n, p as usize)
    }
}

/// All degree-`p` blades of `ℝ^n` in canonical order.
pub fn basis(n: usize, p: usize) -> Vec<Blade> {
    assert!(n <= MAX_DIM);
    if p > n {
        return Vec::new();
    }
    if p == 0 {
        return vec![Blade::SCALAR];
    }
    let mut out = Vec::with_capacity(binomial(n, p));
    let limit: u64 = 1u64 << n;
    let mut v: u64 = (1u64 << p) - 1;
    while v < limit {
        out.push(Blade(v as u32));
        // Gosper's hack: next bit pattern with the same popcount
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_matches_enumeration() {
        for n in 0..=10 {
            for p in 0..=n {
                let b = basis(n, p);
                assert_eq!(b.len(), binomial(n, p));
                for (i, blade) in b.iter().enumerate() {
                    assert_eq!(blade.rank(), i);
                    assert_eq!(Blade::unrank(i, p), *blade);
                    assert_eq!(blade.degree(), p);
                }
            }
        }
    }

    #[test]
    fn sorting_sign() {
        // e2 ∧ e1 ∧ e3 = −e1 ∧ e2 ∧ e3
        let (s, b) = Blade::from_indices(&[1, 0, 2]).unwrap();
        assert_eq!(s, -1);
        assert_eq!(b, Blade::from_bits(0b111));
        assert!(Blade::from_indices(&[0, 0]).is_none());
    }

    #[test]
    fn vector_ops() {
        let e13 = Blade::from_bits(0b101);
        assert_eq!(e13.wedge_vector(1), Some((-1, Blade::from_bits(0b111))));
        assert_eq!(Blade::from_bits(0b111).contract_vector(1), Some((-1, e13)));
        assert_eq!(e13.contract_vector(1), None);
        assert_eq!(e13.to_string(), "e1.3");
    }
}
