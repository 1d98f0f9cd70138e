//! Exact partial derivatives of radial functions.
//!
//! Functions of the form `sum_k c_k z^alpha phi^(k)(|z|^2)` are closed under
//! partial differentiation; this module implements that ring so derivative
//! envelopes of the heat-kernel propagator can be evaluated without finite
//! differences.

/// A term `coef * z^powers * phi^(order)(|z|^2)`.
#[derive(Debug, Clone, Copy)]
struct Term {
    coef: f64,
    powers: [u8; 3],
    order: u8,
}

/// A finite sum of radial-polynomial terms in up to three variables.
#[derive(Debug, Clone)]
pub struct RadialExpr {
    d: usize,
    terms: Vec<Term>,
}

impl RadialExpr {
    /// The bare profile `phi(|z|^2)` in `d` variables.
    pub fn profile(d: usize) -> Self {
        Self { d, terms: vec![Term { coef: 1.0, powers: [0; 3], order: 0 }] }
    }

    /// Partial derivative in direction `dir` (0-based).
    pub fn differentiate(&self, dir: usize) -> Self {
        assert!(dir < self.d);
        let mut terms = Vec::with_capacity(self.terms.len() * 2);
        for t in &self.terms {
            if t.powers[dir] > 0 {
                let mut p = t.powers;
                p[dir] -= 1;
                terms.push(Term { coef: t.coef * t.powers[dir] as f64, powers: p, order: t.order });
            }
            let mut p = t.powers;
            p[dir] += 1;
            terms.push(Term { coef: 2.0 * t.coef, powers: p, order: t.order + 1 });
        }
        let mut out = Self { d: self.d, terms };
        out.collect();
        out
    }

    /// Derivative for a full multi-index.
    pub fn differentiate_multi(&self, mi: &[u8; 3]) -> Self {
        let mut e = self.clone();
        for (dir, &n) in mi.iter().enumerate() {
            for _ in 0..n {
                e = e.differentiate(dir);
            }
        }
        e
    }

    fn collect(&mut self) {
        self.terms.sort_by_key(|t| (t.powers, t.order));
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match merged.last_mut() {
                Some(last) if last.powers == t.powers && last.order == t.order => {
                    last.coef += t.coef;
                }
                _ => merged.push(*t),
            }
        }
        merged.retain(|t| t.coef != 0.0);
        self.terms = merged;
    }

    /// Evaluate at `z`, given the profile derivatives `phi^(k)(|z|^2)` for
    /// `k = 0..=max_order` supplied by `phi_derivs`.
    pub fn eval(&self, z: &[f64], phi_derivs: &dyn Fn(u8, f64) -> f64) -> f64 {
        let u: f64 = z.iter().map(|v| v * v).sum();
        let mut acc = 0.0;
        for t in &self.terms {
            let mut mono = t.coef;
            for (dir, &p) in t.powers.iter().enumerate().take(self.d) {
                for _ in 0..p {
                    mono *= z[dir];
                }
            }
            if mono != 0.0 {
                acc += mono * phi_derivs(t.order, u);
            }
        }
        acc
    }

    pub fn max_order(&self) -> u8 {
        self.terms.iter().map(|t| t.order).max().unwrap_or(0)
    }
}

/// Enumerate multi-indices in `d` variables of total degree exactly `deg`.
pub fn multi_indices(d: usize, deg: u8) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for i in 0..=deg {
        for j in 0..=(deg - i) {
            let k = deg - i - j;
            let mi = [i, j, k];
            if (d < 3 && k > 0) || (d < 2 && j > 0) {
                continue;
            }
            out.push(mi);
        }
    }
    out
}

/// Multi-indices of total degree at most `deg`.
pub fn multi_indices_up_to(d: usize, deg: u8) -> Vec<[u8; 3]> {
    (0..=deg).flat_map(|k| multi_indices(d, k)).collect()
}
