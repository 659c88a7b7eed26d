use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Maximum number of items a bitstring can address.
pub const MAX_BITS: usize = 64;

/// A packing `x ∈ {0,1}^n`.
///
/// Item 0 is the most significant bit of [`Bitstring::value`], so the numeric
/// order of values coincides with the lexicographic order of the printed
/// strings (`"000" < "001" < ... < "100"`). The full state engine uses the same
/// convention for basis-state indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring {
    len: usize,
    value: u64,
}

impl Bitstring {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_BITS, "bitstring length {len} exceeds {MAX_BITS}");
        Self { len, value: 0 }
    }

    pub fn ones(len: usize) -> Self {
        Self::from_value(len, low_mask(len))
    }

    /// Builds a bitstring from its packed value (item 0 = most significant).
    ///
    /// Panics if `value` has bits set above `len`.
    pub fn from_value(len: usize, value: u64) -> Self {
        assert!(len <= MAX_BITS, "bitstring length {len} exceeds {MAX_BITS}");
        assert!(value & !low_mask(len) == 0, "value {value:#x} wider than {len} bits");
        Self { len, value }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut out = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            out.set(i, b);
        }
        out
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    /// Mask selecting item `i` inside a packed value of width `len`.
    #[inline]
    pub fn item_mask(len: usize, i: usize) -> u64 {
        1u64 << (len - 1 - i)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.value & Self::item_mask(self.len, i) != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, on: bool) {
        assert!(i < self.len);
        let mask = Self::item_mask(self.len, i);
        if on {
            self.value |= mask;
        } else {
            self.value &= !mask;
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.value.count_ones()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of the selected items, ascending.
    pub fn selected(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    /// True if every item of `other` is also selected here.
    pub fn is_superset_of(&self, other: &Bitstring) -> bool {
        self.len == other.len && other.value & !self.value == 0
    }
}

#[inline]
fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitstring({self})")
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > MAX_BITS {
            return Err(Error::invalid(format!("bitstring longer than {MAX_BITS}")));
        }
        let mut out = Self::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => out.set(i, true),
                other => return Err(Error::invalid(format!("invalid bit {other:?} in {s:?}"))),
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn item_zero_is_most_significant() {
        let x: Bitstring = "100".parse().unwrap();
        assert_eq!(x.value(), 4);
        assert!(x.get(0));
        assert_eq!(x.to_string(), "100");
        assert_eq!(x.selected(), vec![0]);
    }

    #[test]
    fn numeric_order_matches_string_order() {
        let mut xs: Vec<Bitstring> = ["100", "011", "000", "010", "001"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        xs.sort();
        let printed: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
        assert_eq!(printed, ["000", "001", "010", "011", "100"]);
    }

    #[test]
    fn rejects_garbage() {
        assert!("10x".parse::<Bitstring>().is_err());
    }

    #[test]
    fn superset() {
        let a: Bitstring = "110".parse().unwrap();
        let b: Bitstring = "100".parse().unwrap();
        assert!(a.is_superset_of(&b));
        assert!(!b.is_superset_of(&a));
        assert_eq!(Bitstring::ones(64).count_ones(), 64);
    }
}
