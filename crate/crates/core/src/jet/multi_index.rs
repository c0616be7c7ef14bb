use std::fmt;

const BITS: u32 = 5;
const MASK: u64 = (1 << BITS) - 1;

/// Exponent vector packed into a single word, five bits per variable.
///
/// Addition of two indices is a plain integer add as long as every
/// exponent of the sum stays at or below [`MultiIndex::MAX_EXPONENT`],
/// which holds whenever the total degree does.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(u64);

impl MultiIndex {
    pub const MAX_VARS: usize = 12;
    pub const MAX_EXPONENT: u32 = 31;

    pub const fn zero() -> Self {
        MultiIndex(0)
    }

    /// Panics if there are more than [`Self::MAX_VARS`] entries or an
    /// entry exceeds [`Self::MAX_EXPONENT`].
    pub fn from_exponents(exps: &[u32]) -> Self {
        assert!(exps.len() <= Self::MAX_VARS, "too many variables");
        let mut bits = 0u64;
        for (i, &e) in exps.iter().enumerate() {
            assert!(e <= Self::MAX_EXPONENT, "exponent {e} too large");
            bits |= (e as u64) << (BITS * i as u32);
        }
        MultiIndex(bits)
    }

    pub fn unit(var: usize) -> Self {
        MultiIndex(1 << (BITS * var as u32))
    }

    #[inline]
    pub fn get(self, var: usize) -> u32 {
        ((self.0 >> (BITS * var as u32)) & MASK) as u32
    }

    pub fn with(self, var: usize, exp: u32) -> Self {
        debug_assert!(exp <= Self::MAX_EXPONENT);
        let shift = BITS * var as u32;
        MultiIndex((self.0 & !(MASK << shift)) | ((exp as u64) << shift))
    }

    #[inline]
    pub fn degree(self) -> u32 {
        let mut bits = self.0;
        let mut d = 0;
        while bits != 0 {
            d += (bits & MASK) as u32;
            bits >>= BITS;
        }
        d
    }

    #[inline]
    pub fn add(self, other: Self) -> Self {
        MultiIndex(self.0 + other.0)
    }

    /// Removes one power of `var`, `None` when that exponent is already zero.
    pub fn lower(self, var: usize) -> Option<Self> {
        (self.get(var) > 0).then(|| MultiIndex(self.0 - (1 << (BITS * var as u32))))
    }

    pub fn exponents(self, num_vars: usize) -> Vec<u32> {
        (0..num_vars).map(|v| self.get(v)).collect()
    }

    /// Keeps only the exponents of variables in `range`, shifted down to start at 0.
    pub fn slice(self, start: usize, len: usize) -> Self {
        let shifted = self.0 >> (BITS * start as u32);
        let keep = if len >= Self::MAX_VARS {
            u64::MAX
        } else {
            (1u64 << (BITS * len as u32)) - 1
        };
        MultiIndex(shifted & keep)
    }

    /// Moves exponents up by `offset` variable slots.
    pub fn shift(self, offset: usize) -> Self {
        MultiIndex(self.0 << (BITS * offset as u32))
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut last = 0;
        for v in 0..Self::MAX_VARS {
            if self.get(v) > 0 {
                last = v + 1;
            }
        }
        write!(f, "{:?}", self.exponents(last))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_roundtrip_and_degree() {
        let m = MultiIndex::from_exponents(&[3, 0, 7, 1]);
        assert_eq!(m.exponents(4), vec![3, 0, 7, 1]);
        assert_eq!(m.degree(), 11);
        assert_eq!(m.lower(1), None);
        assert_eq!(m.lower(2).unwrap().get(2), 6);
        assert_eq!(m.with(1, 4).exponents(4), vec![3, 4, 7, 1]);
    }

    #[test]
    fn add_is_exponentwise() {
        let a = MultiIndex::from_exponents(&[1, 2, 0]);
        let b = MultiIndex::from_exponents(&[4, 0, 9]);
        assert_eq!(a.add(b).exponents(3), vec![5, 2, 9]);
    }

    #[test]
    fn slice_and_shift() {
        let m = MultiIndex::from_exponents(&[1, 2, 3, 4, 5, 6]);
        assert_eq!(m.slice(2, 2).exponents(2), vec![3, 4]);
        assert_eq!(m.slice(0, 2).shift(4).exponents(6), vec![0, 0, 0, 0, 1, 2]);
    }
}
