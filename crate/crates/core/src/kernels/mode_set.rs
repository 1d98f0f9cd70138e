//! Finite mode sets: quadrature sites in R^d times an internal index range.
//!
//! A mode is a (site, internal) pair, indexed as `site * n_comp + internal`.
//! All continuum pairings become weighted sums over modes; the site weights
//! play the role of the volume element.

use crate::error::RgError;
use crate::params::omega;
use crate::propagator::CutoffKernel;

/// Upper limit on the number of modes (masks are stored in u16).
pub const MAX_MODES: usize = 16;

#[derive(Debug, Clone)]
pub struct Site {
    pub pos: Vec<f64>,
    pub weight: f64,
}

/// A finite set of modes with quadrature weights.
#[derive(Debug, Clone)]
pub struct ModeSet {
    pub d: usize,
    pub n_comp: usize,
    pub sites: Vec<Site>,
    /// Geometric scale factor when the site family is closed under dilation.
    pub scale_factor: Option<f64>,
}

impl ModeSet {
    pub fn new(d: usize, n_comp: usize, sites: Vec<Site>) -> Result<Self, RgError> {
        if n_comp == 0 || n_comp % 2 != 0 {
            return Err(RgError::Domain("internal components must be even".into()));
        }
        if sites.is_empty() {
            return Err(RgError::Domain("at least one site required".into()));
        }
        if sites.len() * n_comp > MAX_MODES {
            return Err(RgError::Size(format!(
                "{} modes exceed the limit {MAX_MODES}",
                sites.len() * n_comp
            )));
        }
        if sites.iter().any(|s| s.weight <= 0.0 || s.pos.len() != d) {
            return Err(RgError::Domain("weights must be positive, positions of dimension d".into()));
        }
        for i in 0..sites.len() {
            for j in (i + 1)..sites.len() {
                let dist2: f64 = sites[i]
                    .pos
                    .iter()
                    .zip(&sites[j].pos)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if dist2 == 0.0 {
                    return Err(RgError::Domain("sites must be distinct".into()));
                }
            }
        }
        Ok(Self { d, n_comp, sites, scale_factor: None })
    }

    /// Evenly spaced sites on a line segment with unit total weight.
    pub fn uniform_line(d: usize, n_sites: usize, spacing: f64, n_comp: usize) -> Result<Self, RgError> {
        let sites = (0..n_sites)
            .map(|i| {
                let mut pos = vec![0.0; d];
                pos[0] = spacing * (i as f64 - 0.5 * (n_sites as f64 - 1.0));
                Site { pos, weight: spacing }
            })
            .collect();
        Self::new(d, n_comp, sites)
    }

    /// A geometric radial family: `n_rays` directions times `n_shells` radii
    /// `r0 * factor^j`, with weights proportional to `r^d` so that the set is
    /// exactly closed under dilation by `factor` up to boundary truncation.
    pub fn geometric(
        d: usize,
        n_rays: usize,
        n_shells: usize,
        r0: f64,
        factor: f64,
        n_comp: usize,
    ) -> Result<Self, RgError> {
        if factor <= 1.0 {
            return Err(RgError::Domain("scale factor must exceed 1".into()));
        }
        let dirs = crate::propagator::directions(d, n_rays);
        let mut sites = Vec::new();
        for dir in dirs.iter().take(if d == 1 { 2 } else { n_rays }) {
            for j in 0..n_shells {
                let r = r0 * factor.powi(j as i32);
                let pos: Vec<f64> = dir.iter().map(|&c| c * r).collect();
                // log-radial volume element: r^d * log(factor) / n_rays
                let weight = r.powi(d as i32) * factor.ln() / dirs.len() as f64;
                sites.push(Site { pos, weight });
            }
        }
        let mut ms = Self::new(d, n_comp, sites)?;
        ms.scale_factor = Some(factor);
        Ok(ms)
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn n_modes(&self) -> usize {
        self.sites.len() * self.n_comp
    }

    pub fn site_of(&self, mode: usize) -> usize {
        mode / self.n_comp
    }

    pub fn internal_of(&self, mode: usize) -> usize {
        mode % self.n_comp
    }

    pub fn weight(&self, mode: usize) -> f64 {
        self.sites[self.site_of(mode)].weight
    }

    pub fn pos(&self, mode: usize) -> &[f64] {
        &self.sites[self.site_of(mode)].pos
    }

    /// Site index whose position is nearest the origin (readout site for the
    /// local couplings).
    pub fn site_nearest_origin(&self) -> usize {
        let mut best = 0;
        let mut best_r = f64::INFINITY;
        for (i, s) in self.sites.iter().enumerate() {
            let r: f64 = s.pos.iter().map(|v| v * v).sum();
            if r < best_r {
                best_r = r;
                best = i;
            }
        }
        best
    }

    /// Map every site to the site at `factor * pos`, or None where the image
    /// leaves the set (boundary truncation).
    pub fn site_shift(&self, factor: f64) -> Vec<Option<usize>> {
        let tol = 1e-9;
        self.sites
            .iter()
            .map(|s| {
                let target: Vec<f64> = s.pos.iter().map(|v| v * factor).collect();
                let scale: f64 = target.iter().map(|v| v.abs()).sum::<f64>().max(1e-300);
                self.sites.iter().position(|t| {
                    t.pos
                        .iter()
                        .zip(&target)
                        .map(|(a, b)| (a - b).abs())
                        .sum::<f64>()
                        < tol * scale
                })
            })
            .collect()
    }

    /// True when every site of the set maps into the set under `factor` and
    /// back under `1/factor` (interior sites of a larger family would).
    pub fn is_scale_closed_interior(&self, factor: f64, site: usize) -> bool {
        let up = self.site_shift(factor);
        let down = self.site_shift(1.0 / factor);
        up[site].is_some() && down[site].is_some()
    }

    /// Sampled pair matrix of the scale-`lambda` propagator over modes:
    /// `G[z][z'] = omega(a, a') g_lambda(x_s - x_s')`.
    pub fn g_pair(&self, kernel: &CutoffKernel, lambda: f64) -> PairMatrix {
        self.pair_from(|r| kernel.eval_g_radial(lambda, r))
    }

    /// Sampled pair matrix of the UV-integrated propagator up to `lambda`.
    pub fn p_pair(&self, kernel: &CutoffKernel, lambda: f64) -> PairMatrix {
        self.pair_from(|r| {
            if lambda <= 0.0 {
                0.0
            } else {
                crate::quad::integrate(|l| kernel.eval_g_radial(l, r), 0.0, lambda, 1e-12)
                    .map(|q| q.value)
                    .unwrap_or(0.0)
            }
        })
    }

    fn pair_from<F: Fn(f64) -> f64>(&self, radial: F) -> PairMatrix {
        let ns = self.sites.len();
        let mut site_vals = vec![0.0; ns * ns];
        for i in 0..ns {
            for j in i..ns {
                let r: f64 = self.sites[i]
                    .pos
                    .iter()
                    .zip(&self.sites[j].pos)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                let v = radial(r);
                site_vals[i * ns + j] = v;
                site_vals[j * ns + i] = v;
            }
        }
        let m = self.n_modes();
        let mut vals = vec![0.0; m * m];
        for z1 in 0..m {
            for z2 in 0..m {
                let om = omega(self.internal_of(z1), self.internal_of(z2));
                if om != 0.0 {
                    vals[z1 * m + z2] =
                        om * site_vals[self.site_of(z1) * ns + self.site_of(z2)];
                }
            }
        }
        PairMatrix { n: m, vals }
    }
}

/// Dense antisymmetric pair matrix over modes (a sampled propagator).
#[derive(Debug, Clone)]
pub struct PairMatrix {
    n: usize,
    vals: Vec<f64>,
}

impl PairMatrix {
    pub fn zero(n: usize) -> Self {
        Self { n, vals: vec![0.0; n * n] }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut vals = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                vals[i * n + j] = v;
                vals[j * n + i] = -v;
            }
        }
        Self { n, vals }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.vals[i * self.n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.vals.iter().all(|&v| v == 0.0)
    }
}
