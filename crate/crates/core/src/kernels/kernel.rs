//! Antisymmetric coefficient tensors over a finite mode set.
//!
//! A degree-l kernel stores one coefficient per strictly increasing l-tuple of
//! modes, encoded as a bitmask; evaluation at arbitrary ordered tuples carries
//! the sign of the sorting permutation.

use crate::error::RgError;
use num_complex::Complex64;
use std::collections::BTreeMap;

pub type Mask = u16;

/// Sign picked up by moving generator `z` to the front of the ascending tuple
/// encoded by `mask` (z must be a bit of mask): (-1)^(number of lower bits).
#[inline]
pub fn sign_front(mask: Mask, z: usize) -> f64 {
    let below = (mask & ((1u16 << z) - 1)).count_ones();
    if below % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign of the permutation sorting the concatenation (a-ascending,
/// b-ascending) into one ascending tuple; masks must be disjoint.
#[inline]
pub fn interleave_sign(a: Mask, b: Mask) -> f64 {
    debug_assert_eq!(a & b, 0);
    let mut crossings = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        // elements of a above j must jump over this b-element
        crossings += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    if crossings % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A finite antisymmetric kernel of fixed even degree.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteKernel {
    pub n_modes: usize,
    pub degree: usize,
    /// Coefficients on strictly increasing tuples, keyed by bitmask.
    coeffs: BTreeMap<Mask, Complex64>,
}

impl FiniteKernel {
    pub fn zero(n_modes: usize, degree: usize) -> Self {
        assert!(n_modes <= 16);
        Self { n_modes, degree, coeffs: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Mask, Complex64)> + '_ {
        self.coeffs.iter().map(|(&m, &c)| (m, c))
    }

    pub fn get_mask(&self, mask: Mask) -> Complex64 {
        self.coeffs.get(&mask).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn add_mask(&mut self, mask: Mask, v: Complex64) {
        debug_assert_eq!(mask.count_ones() as usize, self.degree);
        if v == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.coeffs.entry(mask).or_insert(Complex64::new(0.0, 0.0));
        *entry += v;
        if entry.norm_sqr() == 0.0 {
            self.coeffs.remove(&mask);
        }
    }

    /// Store `value` as the coefficient of the (possibly unsorted) tuple;
    /// the stored sorted coefficient receives `sign(sort) * value`.
    pub fn set_tuple(&mut self, tuple: &[usize], value: Complex64) -> Result<(), RgError> {
        if tuple.len() != self.degree {
            return Err(RgError::Domain(format!(
                "tuple length {} does not match degree {}",
                tuple.len(),
                self.degree
            )));
        }
        let (mask, sign) = match tuple_mask(tuple) {
            Some(ms) => ms,
            None => {
                return Err(RgError::Domain("tuple has repeated modes".into()));
            }
        };
        if tuple.iter().any(|&z| z >= self.n_modes) {
            return Err(RgError::Domain("mode index out of range".into()));
        }
        self.coeffs.insert(mask, value * sign);
        if self.coeffs.get(&mask).map(|c| c.norm_sqr() == 0.0).unwrap_or(false) {
            self.coeffs.remove(&mask);
        }
        Ok(())
    }

    /// Evaluate at an ordered tuple: zero on repeats, otherwise the stored
    /// coefficient times the sign of the sorting permutation.
    pub fn eval_tuple(&self, tuple: &[usize]) -> Complex64 {
        match tuple_mask(tuple) {
            None => Complex64::new(0.0, 0.0),
            Some((mask, sign)) => self.get_mask(mask) * sign,
        }
    }

    pub fn scale(&mut self, s: Complex64) {
        if s == Complex64::new(0.0, 0.0) {
            self.coeffs.clear();
        }
        for v in self.coeffs.values_mut() {
            *v *= s;
        }
    }

    pub fn axpy(&mut self, a: Complex64, other: &Self) {
        debug_assert_eq!(self.degree, other.degree);
        for (m, c) in other.iter() {
            self.add_mask(m, a * c);
        }
    }

    /// Maximum coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Bitmask plus sorting sign of an ordered tuple of distinct modes, or None
/// if the tuple repeats a mode.
pub fn tuple_mask(tuple: &[usize]) -> Option<(Mask, f64)> {
    let mut mask: Mask = 0;
    let mut sign = 1.0;
    for &z in tuple {
        let bit = 1u16 << z;
        if mask & bit != 0 {
            return None;
        }
        // moving z past the already-placed elements above it
        let above = (mask >> (z + 1)).count_ones();
        if above % 2 == 1 {
            sign = -sign;
        }
        mask |= bit;
    }
    Some((mask, sign))
}

/// Iterate all masks over `n` modes with exactly `deg` bits set, ascending.
pub fn masks_of_degree(n: usize, deg: usize) -> Vec<Mask> {
    let mut out = Vec::new();
    if deg > n {
        return out;
    }
    let full: u32 = 1u32 << n;
    for m in 0..full {
        if m.count_ones() as usize == deg {
            out.push(m as Mask);
        }
    }
    out
}

/// List the set bits of a mask in ascending order.
pub fn mask_modes(mask: Mask) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let z = m.trailing_zeros() as usize;
        out.push(z);
        m &= m - 1;
    }
    out
}
