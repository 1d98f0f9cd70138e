//! Pfaffians of antisymmetric matrices: a Parlett-Reid-style elimination with
//! pivoting and sign tracking, a signed perfect-matching sum kept as a
//! reference oracle, Pfaffian lifts of pair kernels, and Gram-Hadamard bound
//! verification.

use crate::error::RgError;
use num_complex::Complex64;
use rand::Rng;

/// Dense antisymmetric matrix; the strict upper triangle is authoritative and
/// the lower triangle is kept mirrored so entries read `a[(i,j)] = -a[(j,i)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntisymMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl AntisymMatrix {
    pub fn zero(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    /// Build from the strict upper triangle, row-major: (0,1), (0,2), ...,
    /// (0,n-1), (1,2), ...
    pub fn from_upper(n: usize, upper: &[Complex64]) -> Result<Self, RgError> {
        if upper.len() != n * (n - 1) / 2 {
            return Err(RgError::Domain(format!(
                "expected {} upper entries for n = {n}, got {}",
                n * (n - 1) / 2,
                upper.len()
            )));
        }
        let mut m = Self::zero(n);
        let mut it = upper.iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = *it.next().expect("length checked");
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn from_upper_real(n: usize, upper: &[f64]) -> Result<Self, RgError> {
        let c: Vec<Complex64> = upper.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::from_upper(n, &c)
    }

    /// Fill from an entry generator; antisymmetry is imposed structurally
    /// (only pairs i < j are queried).
    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(n: usize, mut f: F) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Set entry (i, j), i < j, and its mirrored negative.
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(i < j, "set addresses the strict upper triangle");
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = -v;
    }

    /// Swap rows and columns i and j simultaneously (conjugation by a
    /// transposition), which flips the sign of the Pfaffian.
    pub fn swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.n {
            self.data.swap(i * self.n + k, j * self.n + k);
        }
        for k in 0..self.n {
            self.data.swap(k * self.n + i, k * self.n + j);
        }
    }

    /// Determinant by LU with partial pivoting (for Pf^2 = det checks).
    pub fn det(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let (mut piv, mut best) = (k, a[k * n + k].norm());
            for i in (k + 1)..n {
                let v = a[i * n + k].norm();
                if v > best {
                    piv = i;
                    best = v;
                }
            }
            if best == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in (k + 1)..n {
                let factor = a[i * n + k] / pivot;
                for j in k..n {
                    let upd = factor * a[k * n + j];
                    a[i * n + j] -= upd;
                }
            }
        }
        det
    }
}

/// Pfaffian by skew-symmetric elimination with partial pivoting; O(n^3).
///
/// Successive Gauss transforms reduce the matrix to skew tridiagonal form
/// while the product of the (k, k+1) pivots, with the sign of the row/column
/// interchanges, accumulates the Pfaffian.
pub fn pfaffian(a: &AntisymMatrix) -> Result<Complex64, RgError> {
    let n = a.n();
    if n % 2 != 0 {
        return Err(RgError::Domain(format!("Pfaffian requires even dimension, got {n}")));
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut m = a.clone();
    let mut pf = Complex64::new(1.0, 0.0);
    for k in (0..n - 1).step_by(2) {
        // pivot: bring the largest |m[k, j]|, j > k, into position (k, k+1)
        let (mut piv, mut best) = (k + 1, m.get(k, k + 1).norm());
        for j in (k + 2)..n {
            let v = m.get(k, j).norm();
            if v > best {
                piv = j;
                best = v;
            }
        }
        if best == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if piv != k + 1 {
            m.swap(piv, k + 1);
            pf = -pf;
        }
        let pivot = m.get(k, k + 1);
        pf *= pivot;
        if k + 2 < n {
            // Gauss transform E = I - sum mu_i e_i e_{k+1}^T zeroes row k
            // beyond the pivot; E A E^T keeps the Pfaffian (det E = 1) and
            // updates the trailing block as below.
            let mu: Vec<Complex64> = (k + 2..n).map(|i| m.get(k, i) / pivot).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for j in (i + 1)..n {
                    let jj = j - (k + 2);
                    let upd = mu[ii] * m.get(k + 1, j) - mu[jj] * m.get(k + 1, i);
                    let v = m.get(i, j) - upd;
                    m.set(i, j, v);
                }
            }
        }
    }
    Ok(pf)
}

/// Pfaffian as the signed sum over perfect matchings; exponential cost, kept
/// as the reference oracle for `pfaffian`.
pub fn pfaffian_bruteforce(a: &AntisymMatrix) -> Result<Complex64, RgError> {
    let n = a.n();
    if n % 2 != 0 {
        return Err(RgError::Domain(format!("Pfaffian requires even dimension, got {n}")));
    }
    if n > 12 {
        return Err(RgError::Size(format!(
            "perfect-matching sum limited to n <= 12, got {n}"
        )));
    }
    let idx: Vec<usize> = (0..n).collect();
    Ok(matching_sum(a, &idx))
}

fn matching_sum(a: &AntisymMatrix, idx: &[usize]) -> Complex64 {
    if idx.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    let first = idx[0];
    let mut acc = Complex64::new(0.0, 0.0);
    for t in 1..idx.len() {
        let partner = idx[t];
        let mut rest: Vec<usize> = Vec::with_capacity(idx.len() - 2);
        rest.extend_from_slice(&idx[1..t]);
        rest.extend_from_slice(&idx[t + 1..]);
        let sign = if t % 2 == 1 { 1.0 } else { -1.0 };
        acc += sign * a.get(first, partner) * matching_sum(a, &rest);
    }
    acc
}

/// A pair kernel over labelled points: antisymmetric under the simultaneous
/// swap of its two (position, index) arguments.
pub trait PairKernel {
    fn eval(&self, x: &[f64], a: usize, y: &[f64], b: usize) -> Complex64;
}

impl<F> PairKernel for F
where
    F: Fn(&[f64], usize, &[f64], usize) -> Complex64,
{
    fn eval(&self, x: &[f64], a: usize, y: &[f64], b: usize) -> Complex64 {
        self(x, a, y, b)
    }
}

/// A labelled point: position plus internal index.
#[derive(Debug, Clone)]
pub struct LabelledPoint {
    pub x: Vec<f64>,
    pub a: usize,
}

/// Build the antisymmetric matrix `M[i][j] = P(z_i, z_j)` over an even list of
/// points and return it with its Pfaffian.
pub fn ppf_matrix<P: PairKernel>(
    kernel: &P,
    points: &[LabelledPoint],
) -> Result<(AntisymMatrix, Complex64), RgError> {
    if points.len() % 2 != 0 {
        return Err(RgError::Domain(format!(
            "Pfaffian lift needs an even number of points, got {}",
            points.len()
        )));
    }
    let m = AntisymMatrix::from_fn(points.len(), |i, j| {
        kernel.eval(&points[i].x, points[i].a, &points[j].x, points[j].a)
    });
    let pf = pfaffian(&m)?;
    Ok((m, pf))
}

/// Report from the Gram-Hadamard verification harness.
#[derive(Debug, Clone)]
pub struct GramHadamardReport {
    pub trials: usize,
    pub dim: usize,
    pub max_ratio: f64,
    pub worst_trial: usize,
    pub pass: bool,
    /// Same harness for difference kernels with the doubled constant.
    pub diff_max_ratio: f64,
    pub diff_pass: bool,
}

/// Verifies `|Pf M| <= K^(dim/2)` on random Gram-generated antisymmetric
/// matrices built as `M[i][j] = v_i^T J v_j` with a symplectic form `J` and
/// vectors of squared norm at most `K`, and the difference variant with
/// constant 2K.
pub fn gram_hadamard_check<R: Rng>(
    rng: &mut R,
    dim: usize,
    trials: usize,
    k_const: f64,
    slack: f64,
) -> Result<GramHadamardReport, RgError> {
    if dim % 2 != 0 {
        return Err(RgError::Domain(format!("even dimension required, got {dim}")));
    }
    let half = dim / 2;
    let mut max_ratio: f64 = 0.0;
    let mut worst_trial = 0;
    let mut diff_max_ratio: f64 = 0.0;
    // ambient dimension for the Gram vectors (even, at least dim)
    let vdim = dim.max(4);
    for trial in 0..trials {
        let vs = random_ball_vectors(rng, dim, vdim, k_const.sqrt());
        let m = gram_matrix(&vs);
        let pf = pfaffian(&m)?;
        let ratio = pf.norm() / k_const.powi(half as i32);
        if ratio > max_ratio {
            max_ratio = ratio;
            worst_trial = trial;
        }
        // difference of two kernels with constant K each: bound with 2K
        let ws = random_ball_vectors(rng, dim, vdim, k_const.sqrt());
        let m2 = gram_matrix(&ws);
        let diff = AntisymMatrix::from_fn(dim, |i, j| m.get(i, j) - m2.get(i, j));
        let pf_diff = pfaffian(&diff)?;
        let ratio_diff = pf_diff.norm() / (2.0 * k_const).powi(half as i32);
        diff_max_ratio = diff_max_ratio.max(ratio_diff);
    }
    Ok(GramHadamardReport {
        trials,
        dim,
        max_ratio,
        worst_trial,
        pass: max_ratio <= 1.0 + slack,
        diff_max_ratio,
        diff_pass: diff_max_ratio <= 1.0 + slack,
    })
}

fn random_ball_vectors<R: Rng>(
    rng: &mut R,
    count: usize,
    vdim: usize,
    radius: f64,
) -> Vec<Vec<Complex64>> {
    (0..count)
        .map(|_| {
            let mut v: Vec<Complex64> = (0..vdim)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let scale = radius * rng.gen_range(0.2..1.0f64) / norm.max(1e-300);
            for c in &mut v {
                *c *= scale;
            }
            v
        })
        .collect()
}

/// `M[i][j] = v_i^T J v_j` with `J` the block-diagonal symplectic form; this
/// is antisymmetric for any vectors and is a Gram form with constant
/// `max |v|^2` (J preserves norms).
fn gram_matrix(vs: &[Vec<Complex64>]) -> AntisymMatrix {
    let vdim = vs[0].len();
    AntisymMatrix::from_fn(vs.len(), |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..vdim - 1).step_by(2) {
            acc += vs[i][k] * vs[j][k + 1] - vs[i][k + 1] * vs[j][k];
        }
        acc
    })
}
