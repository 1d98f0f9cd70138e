//! Interactions: even-degree sequences of finite kernels over one mode set.

use super::kernel::FiniteKernel;
use crate::error::RgError;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Default truncation degree.
pub const M_DEFAULT: usize = 8;

/// A truncated interaction: kernels for degrees 2, 4, ..., up to `m_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interaction {
    pub n_modes: usize,
    pub m_max: usize,
    parts: BTreeMap<usize, FiniteKernel>,
}

impl Interaction {
    pub fn zero(n_modes: usize, m_max: usize) -> Self {
        assert!(m_max % 2 == 0 && m_max >= 2);
        Self { n_modes, m_max, parts: BTreeMap::new() }
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.parts.keys().copied()
    }

    pub fn part(&self, degree: usize) -> Option<&FiniteKernel> {
        self.parts.get(&degree)
    }

    pub fn part_mut(&mut self, degree: usize) -> &mut FiniteKernel {
        let n = self.n_modes;
        self.parts
            .entry(degree)
            .or_insert_with(|| FiniteKernel::zero(n, degree))
    }

    pub fn set_part(&mut self, kernel: FiniteKernel) -> Result<(), RgError> {
        if kernel.degree % 2 != 0 || kernel.degree < 2 {
            return Err(RgError::Domain(format!(
                "degree {} must be a positive even integer",
                kernel.degree
            )));
        }
        if kernel.degree > self.m_max {
            return Err(RgError::Domain(format!(
                "degree {} exceeds the truncation {}",
                kernel.degree, self.m_max
            )));
        }
        if kernel.n_modes != self.n_modes {
            return Err(RgError::Domain("mode count mismatch".into()));
        }
        if kernel.is_zero() {
            self.parts.remove(&kernel.degree);
        } else {
            self.parts.insert(kernel.degree, kernel);
        }
        Ok(())
    }

    pub fn prune(&mut self) {
        self.parts.retain(|_, k| !k.is_zero());
    }

    pub fn is_zero(&self) -> bool {
        self.parts.values().all(|k| k.is_zero())
    }

    pub fn scale(&mut self, s: Complex64) {
        for k in self.parts.values_mut() {
            k.scale(s);
        }
        self.prune();
    }

    pub fn axpy(&mut self, a: Complex64, other: &Self) {
        for (&deg, k) in &other.parts {
            if deg <= self.m_max {
                self.part_mut(deg).axpy(a, k);
            }
        }
        self.prune();
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other);
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale(Complex64::new(s, 0.0));
        out
    }

    /// Largest coefficient difference against another interaction.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        let degs: std::collections::BTreeSet<usize> =
            self.degrees().chain(other.degrees()).collect();
        for deg in degs {
            let zero = FiniteKernel::zero(self.n_modes, deg);
            let a = self.part(deg).unwrap_or(&zero);
            let b = other.part(deg).unwrap_or(&zero);
            let masks: std::collections::BTreeSet<u16> =
                a.iter().map(|(m, _)| m).chain(b.iter().map(|(m, _)| m)).collect();
            for m in masks {
                worst = worst.max((a.get_mask(m) - b.get_mask(m)).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.parts.values().map(|k| k.max_abs()).fold(0.0, f64::max)
    }

    /// Keep only degrees selected by the predicate.
    pub fn project_degrees<F: Fn(usize) -> bool>(&self, keep: F) -> Self {
        let mut out = Self::zero(self.n_modes, self.m_max);
        for (&deg, k) in &self.parts {
            if keep(deg) {
                out.parts.insert(deg, k.clone());
            }
        }
        out
    }
}
