//! Reference evaluator on the full exterior algebra of the mode set.
//!
//! Elements carry one complex coefficient per subset of modes. The flow
//! operators are realized literally through Grassmann derivatives and wedge
//! products, with no combinatorial shortcuts; the production operators in
//! `ops` are tested against this module.
//!
//! The correspondence with coefficient tensors is
//! `element(V_l) = l! * prod(weights) * V(sorted tuple)` on each monomial,
//! matching the continuum pairing where every position integral carries the
//! quadrature weight of its site.

use super::interaction::Interaction;
use super::kernel::{interleave_sign, mask_modes, sign_front, FiniteKernel, Mask};
use super::mode_set::{ModeSet, PairMatrix};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// An inhomogeneous element of the exterior algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub n_modes: usize,
    pub coeffs: BTreeMap<Mask, Complex64>,
}

impl Element {
    pub fn zero(n_modes: usize) -> Self {
        Self { n_modes, coeffs: BTreeMap::new() }
    }

    pub fn add_mask(&mut self, mask: Mask, v: Complex64) {
        if v == Complex64::new(0.0, 0.0) {
            return;
        }
        let e = self.coeffs.entry(mask).or_insert(Complex64::new(0.0, 0.0));
        *e += v;
        if e.norm_sqr() == 0.0 {
            self.coeffs.remove(&mask);
        }
    }

    /// Import an interaction with the weighted-tensor normalization.
    pub fn from_interaction(v: &Interaction, ms: &ModeSet) -> Self {
        let mut out = Self::zero(v.n_modes);
        for deg in v.degrees().collect::<Vec<_>>() {
            let factorial: f64 = (1..=deg).map(|i| i as f64).product();
            for (mask, c) in v.part(deg).unwrap().iter() {
                let wprod: f64 = mask_modes(mask).iter().map(|&z| ms.weight(z)).product();
                out.add_mask(mask, c * factorial * wprod);
            }
        }
        out
    }

    /// Export back to coefficient tensors, dropping degrees above `m_max` and
    /// the scalar part.
    pub fn to_interaction(&self, ms: &ModeSet, m_max: usize) -> Interaction {
        let mut out = Interaction::zero(self.n_modes, m_max);
        for (&mask, &c) in &self.coeffs {
            let deg = mask.count_ones() as usize;
            if deg == 0 || deg > m_max {
                continue;
            }
            let factorial: f64 = (1..=deg).map(|i| i as f64).product();
            let wprod: f64 = mask_modes(mask).iter().map(|&z| ms.weight(z)).product();
            out.part_mut(deg).add_mask(mask, c / (factorial * wprod));
        }
        out.prune();
        out
    }

    /// Left Grassmann derivative with respect to generator `z`.
    pub fn derivative(&self, z: usize) -> Self {
        let bit = 1u16 << z;
        let mut out = Self::zero(self.n_modes);
        for (&mask, &c) in &self.coeffs {
            if mask & bit != 0 {
                out.add_mask(mask & !bit, c * sign_front(mask, z));
            }
        }
        out
    }

    /// Wedge product.
    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n_modes);
        for (&a, &ca) in &self.coeffs {
            for (&b, &cb) in &other.coeffs {
                if a & b == 0 {
                    out.add_mask(a | b, ca * cb * interleave_sign(a, b));
                }
            }
        }
        out
    }

    /// The contraction Laplacian `sum_{z,z'} K(z,z') d_z d_z'`; the site
    /// weights cancel between the kernel pairing and the functional
    /// derivatives, so only raw kernel values appear.
    pub fn laplacian(&self, k: &PairMatrix) -> Self {
        let n = self.n_modes;
        let mut out = Self::zero(n);
        for (&mask, &c) in &self.coeffs {
            let modes = mask_modes(mask);
            for &z2 in &modes {
                // apply d_{z2} first, then d_{z1}
                let s2 = sign_front(mask, z2);
                let rest = mask & !(1u16 << z2);
                for &z1 in &modes {
                    if z1 == z2 {
                        continue;
                    }
                    let v = k.get(z1, z2);
                    if v == 0.0 {
                        continue;
                    }
                    let s1 = sign_front(rest, z1);
                    out.add_mask(rest & !(1u16 << z1), c * v * s1 * s2);
                }
            }
        }
        out
    }

    /// Drop the scalar (degree-zero) component.
    pub fn drop_scalar(mut self) -> Self {
        self.coeffs.remove(&0);
        self
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let masks: std::collections::BTreeSet<Mask> =
            self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        masks
            .into_iter()
            .map(|m| {
                (self.coeffs.get(&m).copied().unwrap_or_default()
                    - other.coeffs.get(&m).copied().unwrap_or_default())
                .norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `(1 - P0) (1/2) <d, G d>` on the exterior algebra.
pub fn op_a_reference(v: &Interaction, ms: &ModeSet, g: &PairMatrix) -> Interaction {
    let e = Element::from_interaction(v, ms);
    let mut lap = e.laplacian(g);
    for c in lap.coeffs.values_mut() {
        *c *= 0.5;
    }
    lap.drop_scalar().to_interaction(ms, v.m_max)
}

/// `(1 - P0) <dV, G dW>` on the exterior algebra: the cross contraction of
/// two interactions through one kernel line.
pub fn op_q_reference(
    v: &Interaction,
    w: &Interaction,
    ms: &ModeSet,
    g: &PairMatrix,
    m_max: usize,
) -> Interaction {
    let ev = Element::from_interaction(v, ms);
    let ew = Element::from_interaction(w, ms);
    let n = ms.n_modes();
    let mut acc = Element::zero(n);
    for z1 in 0..n {
        let dv = ev.derivative(z1);
        if dv.coeffs.is_empty() {
            continue;
        }
        for z2 in 0..n {
            let gv = g.get(z1, z2);
            if gv == 0.0 {
                continue;
            }
            let dw = ew.derivative(z2);
            if dw.coeffs.is_empty() {
                continue;
            }
            let prod = dv.wedge(&dw);
            for (&mask, &c) in &prod.coeffs {
                acc.add_mask(mask, c * gv);
            }
        }
    }
    acc.drop_scalar().to_interaction(ms, m_max)
}

/// `exp(-(sign/2) <d, P d>)` on the exterior algebra: Wick ordering (sign
/// = +1) and its inverse (sign = -1); the series terminates on finite
/// elements.
pub fn wick_reference(v: &Interaction, ms: &ModeSet, p: &PairMatrix, sign: f64) -> Interaction {
    let mut term = Element::from_interaction(v, ms);
    let mut acc = term.clone();
    let mut m = 1.0;
    loop {
        term = term.laplacian(p);
        if term.coeffs.is_empty() {
            break;
        }
        let factor = -0.5 * sign / m;
        for c in term.coeffs.values_mut() {
            *c *= factor;
        }
        for (&mask, &c) in &term.coeffs {
            acc.add_mask(mask, c);
        }
        m += 1.0;
    }
    acc.drop_scalar().to_interaction(ms, v.m_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_is_odd_leibniz() {
        // d_z (x ^ y) = (d_z x) ^ y + (-1)^(deg x) x ^ (d_z y) on monomials
        let mut x = Element::zero(6);
        x.add_mask(0b000110, Complex64::new(2.0, 0.0)); // psi1 psi2
        let mut y = Element::zero(6);
        y.add_mask(0b101000, Complex64::new(-1.5, 0.0)); // psi3 psi5
        let lhs = x.wedge(&y).derivative(3);
        let mut rhs = x.derivative(3).wedge(&y);
        let xy = x.wedge(&y.derivative(3));
        for (&m, &c) in &xy.coeffs {
            rhs.add_mask(m, c); // deg x even: sign +1
        }
        assert!(lhs.max_abs_diff(&rhs) < 1e-15);
    }

    #[test]
    fn wedge_anticommutes_on_odd_monomials() {
        let mut x = Element::zero(4);
        x.add_mask(0b0001, Complex64::new(1.0, 0.0));
        let mut y = Element::zero(4);
        y.add_mask(0b0010, Complex64::new(1.0, 0.0));
        let xy = x.wedge(&y);
        let yx = y.wedge(&x);
        let m = 0b0011;
        assert_eq!(xy.coeffs[&m], -yx.coeffs[&m]);
    }
}
