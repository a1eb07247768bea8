//! Arithmetic on the finite quotient `G_l = Z_p / p^l Z_p`.
//!
//! States are labelled by the integers `0..p^l`, read as base-`p` digit
//! strings `I = I_0 + I_1 p + ... + I_{l-1} p^{l-1}`. The p-adic norm of a
//! difference is `p^-v` where `v` is the position of the lowest digit in
//! which the two labels differ; equal labels fall in the zero-norm class.
//! All matrices elsewhere in the crate index rows and columns by this
//! ascending-integer state order.

use crate::error::{Error, Result};

/// Largest admissible group size; keeps every dense matrix dimension and
/// digit loop inside machine words.
pub const MAX_GROUP_SIZE: u64 = 1 << 20;

/// The pair `(p, l)` defining the quotient group `G_l`, with `p^l` states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupSpec {
    p: u32,
    level: u32,
    size: u64,
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl GroupSpec {
    /// Checks primality of `p` (trial division) and the size guard
    /// `p^l <= 2^20` before accepting the pair.
    pub fn new(p: u32, level: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if level < 1 {
            return Err(Error::LevelOutOfRange {
                p,
                level,
                max: MAX_GROUP_SIZE,
            });
        }
        let mut size = 1u64;
        for _ in 0..level {
            size = size.saturating_mul(p as u64);
            if size > MAX_GROUP_SIZE {
                return Err(Error::LevelOutOfRange {
                    p,
                    level,
                    max: MAX_GROUP_SIZE,
                });
            }
        }
        Ok(Self { p, level, size })
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Number of states, `p^l`.
    pub fn size(&self) -> usize {
        self.size as usize
    }

    /// Bounds-checked state constructor.
    pub fn state(&self, value: u64) -> Result<StateIndex> {
        if value >= self.size {
            return Err(Error::IndexOutOfRange {
                index: value,
                size: self.size,
            });
        }
        Ok(StateIndex(value))
    }

    /// All states in ascending integer order. This order is the row/column
    /// contract for every matrix in the crate.
    pub fn states(&self) -> impl Iterator<Item = StateIndex> {
        (0..self.size).map(StateIndex)
    }

    /// Valuation of `a - b` in `G_l`: the lowest base-`p` digit position in
    /// which the labels differ, or the zero class when `a = b`.
    pub fn valuation_of_difference(&self, a: StateIndex, b: StateIndex) -> PadicValuation {
        debug_assert!(a.0 < self.size && b.0 < self.size);
        let diff = (self.size + a.0 - b.0) % self.size;
        self.valuation_of(diff)
    }

    /// Valuation of a raw residue in `[0, p^l)`.
    pub fn valuation_of(&self, mut residue: u64) -> PadicValuation {
        if residue == 0 {
            return PadicValuation::ZeroClass;
        }
        let p = self.p as u64;
        let mut v = 0u32;
        while residue.is_multiple_of(p) {
            residue /= p;
            v += 1;
        }
        PadicValuation::Finite(v)
    }

    /// `|a - b|_p` as a float; `0.0` for equal states.
    pub fn norm_of_difference(&self, a: StateIndex, b: StateIndex) -> f64 {
        self.valuation_of_difference(a, b).norm(self.p)
    }

    /// Base-`p` digits of a state, least significant first, length `l`.
    pub fn digits(&self, s: StateIndex) -> Vec<u8> {
        let p = self.p as u64;
        let mut value = s.0;
        (0..self.level)
            .map(|_| {
                let d = (value % p) as u8;
                value /= p;
                d
            })
            .collect()
    }

    /// Reassembles a state from digits produced by [`GroupSpec::digits`].
    pub fn from_digits(&self, digits: &[u8]) -> Result<StateIndex> {
        if digits.len() != self.level as usize {
            return Err(Error::IndexOutOfRange {
                index: u64::MAX,
                size: self.size,
            });
        }
        let p = self.p as u64;
        let mut value = 0u64;
        for &d in digits.iter().rev() {
            if d as u64 >= p {
                return Err(Error::IndexOutOfRange {
                    index: d as u64,
                    size: self.size,
                });
            }
            value = value * p + d as u64;
        }
        self.state(value)
    }

    /// Number of states at exact norm `p^-m`, i.e. the sphere count
    /// `(p-1) p^{l-m-1}` for `m` in `0..l`.
    pub fn sphere_count(&self, m: u32) -> u64 {
        assert!(m < self.level);
        (self.p as u64 - 1) * (self.p as u64).pow(self.level - m - 1)
    }
}

/// A state label in `[0, p^l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateIndex(u64);

impl StateIndex {
    pub fn value(self) -> u64 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Valuation of a difference of states: `Finite(v)` means norm `p^-v` with
/// `v` in `0..l`; `ZeroClass` marks `v >= l`, i.e. equal states in `G_l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadicValuation {
    Finite(u32),
    ZeroClass,
}

impl PadicValuation {
    pub fn is_zero_class(self) -> bool {
        matches!(self, PadicValuation::ZeroClass)
    }

    /// Finite exponent, if any.
    pub fn exponent(self) -> Option<u32> {
        match self {
            PadicValuation::Finite(v) => Some(v),
            PadicValuation::ZeroClass => None,
        }
    }

    /// `p^-v`, with the zero class mapped to `0.0`.
    pub fn norm(self, p: u32) -> f64 {
        match self {
            PadicValuation::Finite(v) => (p as f64).powi(-(v as i32)),
            PadicValuation::ZeroClass => 0.0,
        }
    }
}
