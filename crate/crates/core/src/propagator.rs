//! Cutoff propagator families: the heat-kernel family with closed-form
//! position evaluation, and a compactly-supported (in momentum) family built
//! from a tabulated Gevrey bump, together with UV-integrated kernels, decay
//! profiles, and derivative envelopes.

use crate::error::RgError;
use crate::params::ModelParams;
use crate::quad::{self, QuadResult};
use crate::radial::{multi_indices_up_to, RadialExpr};
use statrs::function::gamma::{gamma, gamma_ur};

/// Highest derivative order per argument tracked by the norms (R = 2 here).
pub const DERIV_ORDER: u8 = 2;

/// Number of interpolation nodes for the bump profile table.
const CHI_TABLE_NODES: usize = 4096;

/// An even bump profile: 1 on [0, 1/2], 0 on [1, inf), smooth in between,
/// tabulated with cubic interpolation on the transition region.
#[derive(Debug, Clone)]
pub struct ChiProfile {
    chi: Vec<f64>,
    dchi: Vec<f64>,
}

fn smooth_h(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

fn smooth_h_deriv(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp() / (s * s)
    }
}

impl ChiProfile {
    /// The standard mollified step built from `exp(-1/s)` factors.
    pub fn standard() -> Self {
        let n = CHI_TABLE_NODES;
        let mut chi = Vec::with_capacity(n);
        let mut dchi = Vec::with_capacity(n);
        for i in 0..n {
            let t = 0.5 + 0.5 * i as f64 / (n - 1) as f64;
            chi.push(Self::chi_analytic(t));
            dchi.push(Self::dchi_analytic(t));
        }
        Self { chi, dchi }
    }

    fn chi_analytic(t: f64) -> f64 {
        let t = t.abs();
        if t <= 0.5 {
            1.0
        } else if t >= 1.0 {
            0.0
        } else {
            let s = 2.0 * (1.0 - t);
            let h = smooth_h(s);
            let g = smooth_h(1.0 - s);
            h / (h + g)
        }
    }

    fn dchi_analytic(t: f64) -> f64 {
        let t = t.abs();
        if !(0.5..1.0).contains(&t) {
            return 0.0;
        }
        let s = 2.0 * (1.0 - t);
        let h = smooth_h(s);
        let g = smooth_h(1.0 - s);
        let hp = smooth_h_deriv(s);
        let gp = smooth_h_deriv(1.0 - s);
        let sp = (hp * g + h * gp) / ((h + g) * (h + g));
        -2.0 * sp
    }

    fn interp(table: &[f64], t: f64) -> f64 {
        // Catmull-Rom on the uniform transition grid.
        let n = table.len();
        let u = (t - 0.5) / 0.5 * (n - 1) as f64;
        let i = (u.floor() as usize).clamp(0, n - 2);
        let x = u - i as f64;
        let pm1 = table[i.saturating_sub(1)];
        let p0 = table[i];
        let p1 = table[i + 1];
        let p2 = table[(i + 2).min(n - 1)];
        let a = 2.0 * p0;
        let b = p1 - pm1;
        let c = 2.0 * pm1 - 5.0 * p0 + 4.0 * p1 - p2;
        let d = -pm1 + 3.0 * p0 - 3.0 * p1 + p2;
        0.5 * (a + b * x + c * x * x + d * x * x * x)
    }

    pub fn chi(&self, t: f64) -> f64 {
        let t = t.abs();
        if t <= 0.5 {
            1.0
        } else if t >= 1.0 {
            0.0
        } else {
            Self::interp(&self.chi, t)
        }
    }

    pub fn dchi(&self, t: f64) -> f64 {
        let t = t.abs();
        if !(0.5..1.0).contains(&t) {
            0.0
        } else {
            Self::interp(&self.dchi, t)
        }
    }

    /// `chi_tilde(u) = -u chi'(u)`; nonnegative, supported on [1/2, 1].
    pub fn chi_tilde(&self, u: f64) -> f64 {
        -u * self.dchi(u)
    }
}

/// Cutoff family selector.
#[derive(Debug, Clone)]
pub enum CutoffFamily {
    HeatKernel,
    GevreyChi(ChiProfile),
}

/// Decay profile `eta` entering the weighted norms: increasing and subadditive.
#[derive(Debug, Clone, Copy)]
pub enum DecayProfile {
    /// `eta(x) = x` (heat-kernel family).
    Linear,
    /// `eta(x) = coef * x^power` with `power` in (0, 1]; subadditive since the
    /// power is concave.
    Stretched { coef: f64, power: f64 },
    /// `eta = 0` (used for monotonicity comparisons).
    Zero,
}

impl DecayProfile {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            DecayProfile::Linear => x,
            DecayProfile::Stretched { coef, power } => coef * x.powf(*power),
            DecayProfile::Zero => 0.0,
        }
    }
}

/// A scale-indexed propagator family `g_Lambda` for fixed model parameters.
#[derive(Debug, Clone)]
pub struct CutoffKernel {
    family: CutoffFamily,
    params: ModelParams,
    eta: DecayProfile,
    /// Fitted constants (pre, rate) of the pointwise decay bound.
    decay_constants: (f64, f64),
    /// Precomputed derivative expressions keyed by multi-index (heat kernel).
    deriv_exprs: Vec<([u8; 3], RadialExpr)>,
}

impl CutoffKernel {
    pub fn heat_kernel(params: ModelParams) -> Self {
        let d = params.d() as f64;
        // |u - 2d| e^{-u/20} is maximized at u = 0 or u = 20 + 2d.
        let c0 = 1.0 / (2f64.powi(params.d() as i32 + 1)
            * std::f64::consts::PI.powf(d / 2.0)
            * gamma(1.0 + d / 4.0 + params.eps() / 2.0));
        let pre = c0 * (2.0 * d).max(20.0 * (-1.0 - d / 10.0).exp());
        let base = RadialExpr::profile(params.d());
        let deriv_exprs = multi_indices_up_to(params.d(), 2 * DERIV_ORDER)
            .into_iter()
            .map(|mi| (mi, base.differentiate_multi(&mi)))
            .collect();
        Self {
            family: CutoffFamily::HeatKernel,
            params,
            eta: DecayProfile::Linear,
            decay_constants: (pre, 0.2),
            deriv_exprs,
        }
    }

    pub fn gevrey(params: ModelParams) -> Self {
        let profile = ChiProfile::standard();
        let mut k = Self {
            family: CutoffFamily::GevreyChi(profile),
            params,
            eta: DecayProfile::Zero, // placeholder until fitted
            decay_constants: (0.0, 0.0),
            deriv_exprs: Vec::new(),
        };
        let (pre, rate) = k.fit_stretched_decay();
        k.decay_constants = (pre, rate);
        // eta at half the fitted rate keeps |G|_+ finite.
        k.eta = DecayProfile::Stretched { coef: 0.5 * rate, power: 0.5 };
        k
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            CutoffFamily::HeatKernel => "hk",
            CutoffFamily::GevreyChi(_) => "chi",
        }
    }

    pub fn eta_profile(&self) -> DecayProfile {
        self.eta
    }

    /// Fitted constants (prefactor, rate) of the decay envelope
    /// `|g_Lambda(x)| <= pre * Lambda^{2 psi - 1} * exp(-rate * (Lambda |x|)^q)`
    /// with `q = 2` for the heat kernel and `q = 1/2` for the bump family.
    pub fn decay_constants(&self) -> (f64, f64) {
        self.decay_constants
    }

    fn gamma_factor(&self) -> f64 {
        gamma(1.0 + self.params.d() as f64 / 4.0 + self.params.eps() / 2.0)
    }

    /// Scale exponent of the family: `g_Lambda(x) = Lambda^{2 psi - 1} g(Lambda x)`
    /// with `2 psi - 1 = -1 + d/2 - eps`.
    pub fn scale_exponent(&self) -> f64 {
        2.0 * self.params.psi_dim() - 1.0
    }

    fn fit_stretched_decay(&self) -> (f64, f64) {
        // Fit |g(x)| <= pre * exp(-rate sqrt(|x|)) on a radial sample by a
        // least-squares line through the log of the upper envelope.
        let mut pts = Vec::new();
        for i in 1..=30 {
            let r = 0.5 * i as f64;
            let v = self.eval_g_radial(1.0, r).abs();
            if v > 1e-280 {
                pts.push((r.sqrt(), v.ln()));
            }
        }
        let peak = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        // Slope from the tail half of the samples.
        let tail: Vec<_> = pts.iter().skip(pts.len() / 2).collect();
        let n = tail.len() as f64;
        let sx: f64 = tail.iter().map(|p| p.0).sum();
        let sy: f64 = tail.iter().map(|p| p.1).sum();
        let sxx: f64 = tail.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = tail.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let rate = (-slope).max(0.1);
        // Prefactor: smallest value making the bound hold on the sample.
        let pre = pts
            .iter()
            .map(|&(sq, lv)| lv + rate * sq)
            .fold(peak, f64::max)
            .exp();
        (pre, rate)
    }

    /// Position-space evaluation `g_Lambda(x)`.
    pub fn eval_g(&self, lambda: f64, x: &[f64]) -> Result<f64, RgError> {
        if !(lambda > 0.0) {
            return Err(RgError::Domain(format!("lambda = {lambda} must be positive")));
        }
        let r = norm(x);
        Ok(self.eval_g_radial(lambda, r))
    }

    /// Radial form of `eval_g` (the families are rotation invariant).
    pub fn eval_g_radial(&self, lambda: f64, r: f64) -> f64 {
        let d = self.params.d() as f64;
        match &self.family {
            CutoffFamily::HeatKernel => {
                let u = lambda * lambda * r * r;
                lambda.powf(-1.0 + d / 2.0 - self.params.eps()) * (u - 2.0 * d)
                    * (-u / 4.0).exp()
                    / (2f64.powi(self.params.d() as i32 + 1)
                        * std::f64::consts::PI.powf(d / 2.0)
                        * self.gamma_factor())
            }
            CutoffFamily::GevreyChi(_) => {
                // radial inverse Fourier transform over the compact support
                self.inverse_ft_radial(|k| self.ghat(lambda, k), lambda, r)
            }
        }
    }

    /// Momentum-space density of `g_Lambda` at radial momentum `k`.
    ///
    /// The toolkit fixes its sign so that the position-space closed form above
    /// is exactly the inverse Fourier transform of this density.
    pub fn ghat(&self, lambda: f64, k: f64) -> f64 {
        let d = self.params.d() as f64;
        let eps = self.params.eps();
        match &self.family {
            CutoffFamily::HeatKernel => {
                let u = k / lambda;
                -2.0 * lambda.powf(-1.0 - d / 2.0 - eps) * u * u * (-u * u).exp()
                    / self.gamma_factor()
            }
            CutoffFamily::GevreyChi(profile) => {
                if k <= 0.0 {
                    return 0.0;
                }
                -profile.chi_tilde(k / lambda) / (lambda * k.powf(d / 2.0 + eps))
            }
        }
    }

    /// Momentum-space density of the UV-integrated kernel `p = int_0^1 g_Lambda dLambda`.
    pub fn phat(&self, k: f64) -> f64 {
        let d = self.params.d() as f64;
        let eps = self.params.eps();
        let a = d / 4.0 + eps / 2.0;
        match &self.family {
            CutoffFamily::HeatKernel => {
                if k <= 0.0 {
                    return 0.0;
                }
                -gamma_ur(1.0 + a, k * k) * k.powf(-2.0 * a)
            }
            CutoffFamily::GevreyChi(profile) => {
                if k <= 0.0 {
                    return 0.0;
                }
                -profile.chi(k) / k.powf(d / 2.0 + eps)
            }
        }
    }

    fn inverse_ft_radial<F: Fn(f64) -> f64>(&self, fhat: F, lambda: f64, r: f64) -> f64 {
        // supports are contained in [lambda/2, lambda] for the bump family
        let (lo, hi) = (0.5 * lambda, lambda);
        let tol = 1e-13 * lambda.powf(self.scale_exponent()).abs().max(1e-13);
        let d = self.params.d();
        let val = match d {
            1 => quad::integrate(|k| fhat(k) * (k * r).cos(), lo, hi, tol)
                .map(|q| q.value / std::f64::consts::PI),
            2 => quad::integrate(|k| fhat(k) * k * quad::bessel_j0(k * r), lo, hi, tol)
                .map(|q| q.value / (2.0 * std::f64::consts::PI)),
            3 => quad::integrate(|k| fhat(k) * k * k * sinc(k * r), lo, hi, tol)
                .map(|q| q.value / (2.0 * std::f64::consts::PI * std::f64::consts::PI)),
            _ => unreachable!(),
        };
        val.expect("compact radial integral converges")
    }

    /// UV-integrated kernel `p(x) = int_0^1 g_Lambda(x) dLambda` by adaptive
    /// quadrature with the requested absolute tolerance.
    pub fn eval_p(&self, x: &[f64], abs_tol: f64) -> Result<QuadResult, RgError> {
        let r = norm(x);
        self.eval_p_radial(r, abs_tol)
    }

    pub fn eval_p_radial(&self, r: f64, abs_tol: f64) -> Result<QuadResult, RgError> {
        quad::integrate(|lam| self.eval_g_radial(lam, r), 0.0, 1.0, abs_tol)
    }

    /// Partial derivative of `g_Lambda` for a multi-index (total order <= 4).
    pub fn deriv_g(&self, lambda: f64, x: &[f64], mi: &[u8; 3]) -> f64 {
        let order: u8 = mi.iter().sum();
        match &self.family {
            CutoffFamily::HeatKernel => {
                let cached = self.deriv_exprs.iter().find(|(m, _)| m == mi).map(|(_, e)| e);
                let fresh;
                let expr = match cached {
                    Some(e) => e,
                    None => {
                        fresh = RadialExpr::profile(self.params.d()).differentiate_multi(mi);
                        &fresh
                    }
                };
                let d = self.params.d() as f64;
                let c0 = 1.0
                    / (2f64.powi(self.params.d() as i32 + 1)
                        * std::f64::consts::PI.powf(d / 2.0)
                        * self.gamma_factor());
                let z: Vec<f64> = x.iter().map(|&v| lambda * v).collect();
                let phi = heat_profile_derivs(self.params.d());
                lambda.powf(self.scale_exponent() + order as f64)
                    * c0
                    * expr.eval(&z, &|k, u| phi(k, u))
            }
            CutoffFamily::GevreyChi(_) => self.fd_deriv(lambda, x, mi, 1e-5),
        }
    }

    fn fd_deriv(&self, lambda: f64, x: &[f64], mi: &[u8; 3], h: f64) -> f64 {
        if let Some(dir) = mi.iter().position(|&m| m > 0) {
            let mut lower = *mi;
            lower[dir] -= 1;
            let mut xp = x.to_vec();
            xp[dir] += h;
            let mut xm = x.to_vec();
            xm[dir] -= h;
            (self.fd_deriv(lambda, &xp, &lower, h) - self.fd_deriv(lambda, &xm, &lower, h))
                / (2.0 * h)
        } else {
            self.eval_g_radial(lambda, norm(x))
        }
    }

    /// Derivative envelope: max over multi-indices that split into two factors
    /// of degree <= R each, of `|d^mi g_Lambda|` at `x`.
    pub fn deriv_envelope(&self, lambda: f64, x: &[f64]) -> f64 {
        let mut best: f64 = 0.0;
        for mi in multi_indices_up_to(self.params.d(), 2 * DERIV_ORDER) {
            best = best.max(self.deriv_g(lambda, x, &mi).abs());
        }
        best
    }

    /// Upper estimate of the weighted norm
    /// `sup_y int e^{eta(|x-y|)} max_deriv |d^m d^n G_Lambda(x,y)| dx`
    /// by radial quadrature with an angular maximum.
    pub fn plus_norm_estimate(&self, lambda: f64, spec: &RadialGrid) -> Result<f64, RgError> {
        self.plus_norm_with_eta(lambda, spec, &self.eta.clone())
    }

    /// As `plus_norm_estimate` with an explicit decay profile.
    pub fn plus_norm_with_eta(
        &self,
        lambda: f64,
        spec: &RadialGrid,
        eta: &DecayProfile,
    ) -> Result<f64, RgError> {
        if !(lambda > 0.0) {
            return Err(RgError::Domain("lambda must be positive".into()));
        }
        let d = self.params.d();
        let dirs = directions(d, spec.n_dirs);
        let envelope = |r: f64| -> f64 {
            dirs.iter()
                .map(|u| {
                    let x: Vec<f64> = u.iter().map(|&c| c * r).collect();
                    self.deriv_envelope(lambda, &x)
                })
                .fold(0.0f64, f64::max)
        };
        // Detect eta outgrowing the kernel decay.
        let probe = |r: f64| (eta.eval(r)).exp() * envelope(r);
        let tail0 = probe(spec.r_max * 0.5);
        let tail1 = probe(spec.r_max);
        if tail1 > tail0 && tail1 > 1e-6 {
            return Err(RgError::Domain(
                "integrand grows at the radial cutoff: eta outruns the kernel decay".into(),
            ));
        }
        let area = quad::sphere_area(d);
        let integrand = |r: f64| area * r.powi(d as i32 - 1) * probe(r);
        let q = quad::integrate(integrand, 0.0, spec.r_max, spec.tol)?;
        Ok(q.value)
    }

    /// Verifies the pointwise decay bound on a sample; returns the fitted
    /// prefactor (max over samples of the bound ratio).
    pub fn fit_decay_prefactor(&self, samples: &[(f64, f64)]) -> f64 {
        let (_, rate) = self.decay_constants;
        let q = match self.family {
            CutoffFamily::HeatKernel => 2.0,
            CutoffFamily::GevreyChi(_) => 0.5,
        };
        samples
            .iter()
            .map(|&(lambda, r)| {
                self.eval_g_radial(lambda, r).abs()
                    / (lambda.powf(self.scale_exponent()) * (-rate * (lambda * r).powf(q)).exp())
            })
            .fold(0.0f64, f64::max)
    }
}

/// Radial quadrature specification for norm estimates.
#[derive(Debug, Clone, Copy)]
pub struct RadialGrid {
    pub r_max: f64,
    pub tol: f64,
    pub n_dirs: usize,
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self { r_max: 40.0, tol: 1e-9, n_dirs: 32 }
    }
}

/// Derivative table for the heat-kernel radial profile
/// `phi(u) = (u - 2d) e^{-u/4}`: `phi^(k)(u) = (a_k + b_k (u - 2d)) e^{-u/4}`.
fn heat_profile_derivs(d: usize) -> impl Fn(u8, f64) -> f64 {
    let two_d = 2.0 * d as f64;
    move |order: u8, u: f64| {
        let mut a = 0.0;
        let mut b = 1.0;
        for _ in 0..order {
            let an = b - a / 4.0;
            let bn = -b / 4.0;
            a = an;
            b = bn;
        }
        (a + b * (u - two_d)) * (-u / 4.0).exp()
    }
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// A reasonably uniform set of unit directions for angular maxima.
pub fn directions(d: usize, n: usize) -> Vec<Vec<f64>> {
    match d {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..n.max(4))
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n.max(4) as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            // Fibonacci sphere
            let n = n.max(6);
            let golden = (1.0 + 5f64.sqrt()) / 2.0;
            (0..n)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = 2.0 * std::f64::consts::PI * i as f64 / golden;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
        _ => panic!("unsupported dimension"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hk(d: usize, eps: f64) -> CutoffKernel {
        CutoffKernel::heat_kernel(ModelParams::new(d, 2, eps).unwrap())
    }

    #[test]
    fn closed_form_at_origin() {
        // d=3, eps=0, Lambda=1, x=0 -> -6/(16 pi^{3/2} Gamma(7/4)), via the
        // high-precision gamma in statrs as the oracle.
        let k = hk(3, 0.0);
        let expect = -6.0 / (16.0 * std::f64::consts::PI.powf(1.5) * gamma(1.75));
        let got = k.eval_g(1.0, &[0.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(got, expect, max_relative = 1e-14);
        assert!((expect + 0.0733).abs() < 1e-3, "sanity: about -0.0733, got {expect}");
    }

    #[test]
    fn zero_at_square_radius_2d() {
        // zero of the polynomial prefactor at |x|^2 = 2d, up to the rounding
        // of sqrt(2d)^2
        for d in 1..=3 {
            let k = hk(d, 0.05);
            let r = (2.0 * d as f64).sqrt();
            let mut x = vec![0.0; d];
            x[0] = r;
            assert!(k.eval_g(1.0, &x).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn scaling_identity() {
        // g_Lambda(x) = Lambda^{-1 + d/2 - eps} g(Lambda x) at sampled points
        for d in 1..=3 {
            for family in [0, 1] {
                let params = ModelParams::new(d, 2, 0.04).unwrap();
                let k = if family == 0 {
                    CutoffKernel::heat_kernel(params)
                } else {
                    CutoffKernel::gevrey(params)
                };
                for lam in [0.25, 0.5, 1.0, 2.0, 4.0] {
                    for r in [0.0, 0.3, 1.0, 2.5] {
                        if family == 1 && r == 0.0 {
                            // fine, radial code handles r = 0 too
                        }
                        let lhs = k.eval_g_radial(lam, r);
                        let rhs = lam.powf(k.scale_exponent()) * k.eval_g_radial(1.0, lam * r);
                        assert!(
                            (lhs - rhs).abs() <= 1e-12 * lhs.abs() + 1e-15,
                            "family {family} d={d} lam={lam} r={r}: {lhs} vs {rhs}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn p_consistency_with_gauss_nodes() {
        // eval_p vs a fixed 32-node Gauss-Legendre quadrature of eval_g; the
        // substitution Lambda = v^2 removes the endpoint power of the scale
        // prefactor so the Gauss rule converges to machine precision.
        let k = hk(3, 0.0);
        for r in [0.0, 0.5, 1.3, 3.0] {
            let p = k.eval_p_radial(r, 1e-12).unwrap().value;
            let q = quad::gauss_legendre_integrate(
                |v| 2.0 * v * k.eval_g_radial(v * v, r),
                0.0,
                1.0,
                32,
            );
            assert!((p - q).abs() <= 1e-9, "r={r}: {p} vs {q}");
        }
    }

    #[test]
    fn p_closed_form_at_origin() {
        // p(0) = int_0^1 Lambda^{1/2} dLambda g(0) = (2/3) g(0) for d=3, eps=0
        let k = hk(3, 0.0);
        let p0 = k.eval_p_radial(0.0, 1e-12).unwrap().value;
        let g0 = k.eval_g_radial(1.0, 0.0);
        assert_relative_eq!(p0, 2.0 / 3.0 * g0, max_relative = 1e-10);
    }

    #[test]
    fn g_decays_superexponentially_and_p_power_law() {
        let k = hk(3, 0.0);
        // each fixed-scale kernel is Gaussian-small far out
        assert!(k.eval_g_radial(1.0, 20.0).abs() < 1e-12);
        // the UV-integrated kernel instead has the fractional power tail
        // p(x) ~ -C |x|^{-2 psi}; check the exponent by doubling the radius
        let p1 = k.eval_p_radial(20.0, 1e-15).unwrap().value;
        let p2 = k.eval_p_radial(40.0, 1e-15).unwrap().value;
        let measured = (p1 / p2).ln() / 2f64.ln();
        assert!((measured - 1.5).abs() < 1e-3, "tail exponent {measured}");
    }

    #[test]
    fn p_momentum_route_matches() {
        // p(x) equals the radial inverse transform of phat
        let k = hk(3, 0.02);
        for r in [0.4, 1.0, 2.0] {
            let pos = k.eval_p_radial(r, 1e-12).unwrap().value;
            let tol = 1e-12;
            let q = quad::integrate(
                |kk| k.phat(kk) * kk * kk * sinc(kk * r),
                0.0,
                12.0,
                tol,
            )
            .unwrap()
            .value
                / (2.0 * std::f64::consts::PI * std::f64::consts::PI);
            assert_relative_eq!(pos, q, max_relative = 1e-7);
        }
    }

    #[test]
    fn ghat_integrates_to_phat() {
        let k = hk(2, 0.1);
        for kk in [0.3, 1.0, 2.2] {
            let direct = quad::integrate(|lam| k.ghat(lam, kk), 0.0, 1.0, 1e-13).unwrap().value;
            assert_relative_eq!(direct, k.phat(kk), max_relative = 1e-9);
        }
    }

    #[test]
    fn gevrey_compact_support() {
        let params = ModelParams::new(3, 2, 0.05).unwrap();
        let k = CutoffKernel::gevrey(params);
        for lam in [0.5, 1.0, 2.0] {
            assert_eq!(k.ghat(lam, 0.49 * lam), 0.0);
            assert_eq!(k.ghat(lam, 1.01 * lam), 0.0);
            assert!(k.ghat(lam, 0.75 * lam).abs() > 0.0);
        }
    }

    #[test]
    fn heat_kernel_derivatives_match_finite_differences() {
        let k = hk(3, 0.03);
        let x = [0.4, -0.2, 0.9];
        for mi in [[1u8, 0, 0], [0, 2, 0], [1, 1, 0], [2, 0, 2]] {
            let order: u8 = mi.iter().sum();
            // balance truncation against rounding per derivative order
            let h = match order {
                1 => 1e-5,
                2 => 1e-4,
                3 => 1e-3,
                _ => 4e-3,
            };
            let exact = k.deriv_g(1.3, &x, &mi);
            let fd = k.fd_deriv(1.3, &x, &mi, h);
            assert_relative_eq!(exact, fd, max_relative = 5e-4, epsilon = 1e-5);
        }
    }

    #[test]
    fn plus_norm_finite_and_monotone_in_eta() {
        let k = hk(3, 0.0);
        let spec = RadialGrid { r_max: 30.0, tol: 1e-7, n_dirs: 16 };
        let with_eta = k.plus_norm_with_eta(1.0, &spec, &DecayProfile::Linear).unwrap();
        let without = k.plus_norm_with_eta(1.0, &spec, &DecayProfile::Zero).unwrap();
        assert!(with_eta.is_finite() && with_eta > 0.0);
        assert!(without < with_eta);
    }

    #[test]
    fn plus_norm_divergence_detected() {
        let k = hk(3, 0.0);
        let spec = RadialGrid { r_max: 40.0, tol: 1e-7, n_dirs: 8 };
        // quadratic eta outruns exp(-r^2/4) decay? eta = r^2 grows like the
        // Gaussian shrinks only if coef >= 1/4; use a clearly divergent one.
        let bad = DecayProfile::Stretched { coef: 1.0, power: 1.0 };
        // power 1 with coef 1 is fine for Gaussian decay; build a true
        // divergence with a huge coefficient on the stretched profile instead.
        assert!(k.plus_norm_with_eta(1.0, &spec, &bad).is_ok());
        let chi = CutoffKernel::gevrey(ModelParams::new(1, 2, 0.0).unwrap());
        // linear eta beats any stretched-exponential decay
        assert!(chi
            .plus_norm_with_eta(1.0, &RadialGrid { r_max: 400.0, tol: 1e-5, n_dirs: 2 }, &DecayProfile::Linear)
            .is_err());
    }

    #[test]
    fn plus_norm_scaling_identity_order_zero() {
        // For the pure |g| envelope the change of variables gives
        // int e^{eta(z)} |g_L(z)| dz = L^{2psi-1-d} int e^{eta(y/L)} |g(y)| dy.
        let k = hk(3, 0.0);
        let lam = 2.0;
        let area = quad::sphere_area(3);
        let lhs = quad::integrate(
            |r| area * r * r * (r).exp() * k.eval_g_radial(lam, r).abs(),
            0.0,
            30.0,
            1e-9,
        )
        .unwrap()
        .value;
        let rhs = lam.powf(k.scale_exponent() - 3.0)
            * quad::integrate(
                |r| area * r * r * (r / lam).exp() * k.eval_g_radial(1.0, r).abs(),
                0.0,
                60.0,
                1e-9,
            )
            .unwrap()
            .value;
        assert_relative_eq!(lhs, rhs, max_relative = 1e-6);
    }

    #[test]
    fn decay_bound_with_fitted_prefactor() {
        // single fitted C over a 10^3-point sample; bound must hold with the
        // analytically derived prefactor too
        let k = hk(3, 0.0);
        let mut samples = Vec::new();
        for i in 0..10 {
            for j in 0..100 {
                let lam = 0.25 * 1.5f64.powi(i);
                let r = 0.06 * j as f64;
                samples.push((lam, r));
            }
        }
        let fitted = k.fit_decay_prefactor(&samples);
        let (analytic, _) = k.decay_constants();
        assert!(fitted <= analytic * (1.0 + 1e-12), "fitted {fitted} vs analytic {analytic}");
        for &(lam, r) in &samples {
            let bound = fitted * lam.powf(k.scale_exponent()) * (-lam * lam * r * r / 5.0).exp();
            assert!(k.eval_g_radial(lam, r).abs() <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn gevrey_decay_fit() {
        let k = CutoffKernel::gevrey(ModelParams::new(2, 2, 0.0).unwrap());
        let (pre, rate) = k.decay_constants();
        assert!(pre > 0.0 && rate > 0.0);
        // spot check the stretched-exponential envelope
        for r in [1.0, 4.0, 9.0, 16.0] {
            let v = k.eval_g_radial(1.0, r).abs();
            assert!(v <= pre * (-rate * r.sqrt()).exp() * (1.0 + 1e-9), "r={r}");
        }
    }
}
