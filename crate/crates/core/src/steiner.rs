//! Steiner (tree) diameter of small point sets: exact evaluation by full
//! topology enumeration with Steiner-point optimization, a minimum spanning
//! tree upper bound, and the property suite used by the weighted norms.

use crate::error::RgError;
use rand::Rng;

/// Largest point count accepted in exact mode.
pub const EXACT_MAX_POINTS: usize = 5;
/// Largest point count accepted overall.
pub const MAX_POINTS: usize = 8;

/// Evaluation mode for the Steiner diameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteinerMode {
    /// Full Steiner topology enumeration with optimized branch points.
    Exact,
    /// Euclidean minimum spanning tree length (always an upper bound).
    MstUpper,
}

/// A set of points in R^d, d <= 3.
#[derive(Debug, Clone)]
pub struct PointSet {
    pub points: Vec<Vec<f64>>,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self, RgError> {
        if points.len() < 2 || points.len() > MAX_POINTS {
            return Err(RgError::Domain(format!(
                "point count {} outside 2..={MAX_POINTS}",
                points.len()
            )));
        }
        let d = points[0].len();
        if d == 0 || d > 3 {
            return Err(RgError::Domain(format!("dimension {d} outside 1..=3")));
        }
        if points.iter().any(|p| p.len() != d || p.iter().any(|v| !v.is_finite())) {
            return Err(RgError::Domain("points must share a dimension and be finite".into()));
        }
        Ok(Self { points })
    }

    fn dim(&self) -> usize {
        self.points[0].len()
    }
}

/// Result of a Steiner diameter evaluation.
#[derive(Debug, Clone)]
pub struct SteinerResult {
    pub length: f64,
    pub mode: SteinerMode,
    /// Index of the optimal topology in insertion order (exact mode).
    pub topology_id: Option<usize>,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Minimum spanning tree length of the complete Euclidean graph (Prim).
pub fn mst_length(points: &[Vec<f64>]) -> f64 {
    let n = points.len();
    if n < 2 {
        return 0.0;
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    in_tree[0] = true;
    for j in 1..n {
        best[j] = dist(&points[0], &points[j]);
    }
    let mut total = 0.0;
    for _ in 1..n {
        let (mut pick, mut pick_d) = (usize::MAX, f64::INFINITY);
        for j in 0..n {
            if !in_tree[j] && best[j] < pick_d {
                pick = j;
                pick_d = best[j];
            }
        }
        total += pick_d;
        in_tree[pick] = true;
        for j in 0..n {
            if !in_tree[j] {
                best[j] = best[j].min(dist(&points[pick], &points[j]));
            }
        }
    }
    total
}

/// A full Steiner topology on k terminals: k - 2 branch points of degree 3,
/// terminals of degree 1. Vertices 0..k are terminals, k.. are branch points.
#[derive(Debug, Clone)]
pub struct Topology {
    pub terminals: usize,
    pub edges: Vec<(usize, usize)>,
}

/// All full Steiner topologies for `k` terminals by recursive edge insertion
/// (counts 1, 3, 15 for k = 3, 4, 5).
pub fn full_topologies(k: usize) -> Vec<Topology> {
    assert!((2..=EXACT_MAX_POINTS).contains(&k));
    // Build for 2 terminals, then insert terminals 2..k one at a time. Branch
    // points are appended after all k terminals, so vertex ids of branch
    // points shift as terminals are added; we build directly for the final k.
    let mut tops = vec![Topology { terminals: k, edges: vec![(0, 1)] }];
    for t in 2..k {
        let mut next = Vec::new();
        let s = k + (t - 2); // id of the new branch point
        for top in &tops {
            for (ei, &(u, v)) in top.edges.iter().enumerate() {
                let mut edges = top.edges.clone();
                edges.remove(ei);
                edges.push((u, s));
                edges.push((v, s));
                edges.push((t, s));
                next.push(Topology { terminals: k, edges });
            }
        }
        tops = next;
    }
    tops
}

fn topology_length(top: &Topology, pts: &[Vec<f64>], branch: &[Vec<f64>]) -> f64 {
    let k = top.terminals;
    let get = |v: usize| -> &[f64] {
        if v < k {
            &pts[v]
        } else {
            &branch[v - k]
        }
    };
    top.edges.iter().map(|&(u, v)| dist(get(u), get(v))).sum()
}

/// Optimize the branch points of one topology by damped fixed-point
/// iteration: each branch point is repeatedly re-solved as the smoothed
/// geometric median of its three neighbours, with the smoothing driven to
/// zero. The objective is convex, so this converges to the topology optimum.
fn optimize_topology(top: &Topology, pts: &[Vec<f64>], geom_tol: f64) -> f64 {
    let k = top.terminals;
    let n_branch = k.saturating_sub(2);
    let d = pts[0].len();
    if n_branch == 0 {
        return topology_length(top, pts, &[]);
    }
    // neighbours of each branch point
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n_branch];
    for &(u, v) in &top.edges {
        if u >= k {
            nbrs[u - k].push(v);
        }
        if v >= k {
            nbrs[v - k].push(u);
        }
    }
    // start at the centroid of the terminal set
    let centroid: Vec<f64> = (0..d)
        .map(|i| pts.iter().map(|p| p[i]).sum::<f64>() / pts.len() as f64)
        .collect();
    let mut branch: Vec<Vec<f64>> = (0..n_branch).map(|_| centroid.clone()).collect();
    let scale = pts
        .iter()
        .map(|p| dist(p, &centroid))
        .fold(0.0f64, f64::max)
        .max(1e-12);
    for mu_factor in [1e-2, 1e-4, 1e-6, 1e-9, 1e-12, 1e-15] {
        let mu = scale * mu_factor;
        let inner_tol = (scale * geom_tol).max(mu * 1e-3);
        for _ in 0..600 {
            let mut max_move: f64 = 0.0;
            for b in 0..n_branch {
                let mut num = vec![0.0; d];
                let mut den = 0.0;
                for &nb in &nbrs[b] {
                    let q: &[f64] = if nb < k { &pts[nb] } else { &branch[nb - k] };
                    let rho = (dist(q, &branch[b]).powi(2) + mu * mu).sqrt();
                    for i in 0..d {
                        num[i] += q[i] / rho;
                    }
                    den += 1.0 / rho;
                }
                let mut moved: f64 = 0.0;
                for i in 0..d {
                    let newv = num[i] / den;
                    moved += (newv - branch[b][i]).powi(2);
                    branch[b][i] = newv;
                }
                max_move = max_move.max(moved.sqrt());
            }
            if max_move < inner_tol {
                break;
            }
        }
    }
    topology_length(top, pts, &branch)
}

/// Steiner diameter of a point set.
///
/// Exact mode enumerates all full Steiner topologies (degenerate trees arise
/// as branch points merging with terminals during optimization) and returns
/// the minimum; `MstUpper` returns the spanning-tree length, which bounds the
/// exact value from above.
pub fn steiner_diameter(ps: &PointSet, mode: SteinerMode) -> Result<SteinerResult, RgError> {
    let pts = &ps.points;
    match mode {
        SteinerMode::MstUpper => Ok(SteinerResult {
            length: mst_length(pts),
            mode,
            topology_id: None,
        }),
        SteinerMode::Exact => {
            let k = pts.len();
            if k > EXACT_MAX_POINTS {
                return Err(RgError::Size(format!(
                    "exact mode limited to {EXACT_MAX_POINTS} points, got {k}"
                )));
            }
            if k == 2 {
                return Ok(SteinerResult {
                    length: dist(&pts[0], &pts[1]),
                    mode,
                    topology_id: Some(0),
                });
            }
            let mut best = f64::INFINITY;
            let mut best_id = 0;
            for (id, top) in full_topologies(k).iter().enumerate() {
                let len = optimize_topology(top, pts, 1e-11);
                if len < best {
                    best = len;
                    best_id = id;
                }
            }
            Ok(SteinerResult { length: best, mode, topology_id: Some(best_id) })
        }
    }
}

/// Convenience wrapper used by the weighted norms: Steiner diameter of raw
/// positions in upper-bound mode (a conservative weight).
pub fn tree_diameter_upper(points: &[Vec<f64>]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    mst_length(points)
}

/// Report of the monotonicity/subadditivity property suite.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub trials: usize,
    pub monotonicity_violations: usize,
    pub subadditivity_violations: usize,
    pub worst_monotonicity_gap: f64,
    pub worst_subadditivity_gap: f64,
    pub pass: bool,
}

/// Checks, on random configurations in exact mode:
/// pair distance for two points, `T(x) <= T(x, y)`, and
/// `T(x, y, z) <= T(x, y) + T(y, z)` on concatenated tuples.
pub fn steiner_property_suite<R: Rng>(
    rng: &mut R,
    d: usize,
    trials: usize,
    slack: f64,
) -> Result<PropertyReport, RgError> {
    let mut mono_viol = 0;
    let mut sub_viol = 0;
    let mut worst_mono: f64 = 0.0;
    let mut worst_sub: f64 = 0.0;
    let rand_pt = |rng: &mut R| -> Vec<f64> { (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let exact = |pts: &[Vec<f64>]| -> Result<f64, RgError> {
        Ok(steiner_diameter(&PointSet::new(pts.to_vec())?, SteinerMode::Exact)?.length)
    };
    for _ in 0..trials {
        // monotonicity: drop points from a tuple of size 3..=5
        let total = rng.gen_range(3..=EXACT_MAX_POINTS);
        let pts: Vec<Vec<f64>> = (0..total).map(|_| rand_pt(rng)).collect();
        let keep = rng.gen_range(2..total);
        let t_small = exact(&pts[..keep])?;
        let t_full = exact(&pts)?;
        let gap = t_small - t_full;
        if gap > slack {
            mono_viol += 1;
        }
        worst_mono = worst_mono.max(gap);

        // subadditivity with a shared middle tuple (total count <= 5)
        let nx = rng.gen_range(1..=2usize);
        let ny = rng.gen_range(1..=(5 - nx - 2).max(1).min(2));
        let nz = rng.gen_range(1..=(5 - nx - ny).min(2));
        let xs: Vec<Vec<f64>> = (0..nx).map(|_| rand_pt(rng)).collect();
        let ys: Vec<Vec<f64>> = (0..ny).map(|_| rand_pt(rng)).collect();
        let zs: Vec<Vec<f64>> = (0..nz).map(|_| rand_pt(rng)).collect();
        let mut xyz = xs.clone();
        xyz.extend(ys.iter().cloned());
        xyz.extend(zs.iter().cloned());
        let mut xy = xs.clone();
        xy.extend(ys.iter().cloned());
        let mut yz = ys.clone();
        yz.extend(zs.iter().cloned());
        let lhs = exact(&xyz)?;
        let rhs = exact(&xy)? + exact(&yz)?;
        let gap = lhs - rhs;
        if gap > slack {
            sub_viol += 1;
        }
        worst_sub = worst_sub.max(gap);
    }
    Ok(PropertyReport {
        trials,
        monotonicity_violations: mono_viol,
        subadditivity_violations: sub_viol,
        worst_monotonicity_gap: worst_mono,
        worst_subadditivity_gap: worst_sub,
        pass: mono_viol == 0 && sub_viol == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn exact(pts: &[Vec<f64>]) -> f64 {
        steiner_diameter(&PointSet::new(pts.to_vec()).unwrap(), SteinerMode::Exact)
            .unwrap()
            .length
    }

    #[test]
    fn topology_counts() {
        assert_eq!(full_topologies(3).len(), 1);
        assert_eq!(full_topologies(4).len(), 3);
        assert_eq!(full_topologies(5).len(), 15);
    }

    #[test]
    fn two_points_distance() {
        let pts = vec![vec![0.0, 0.0], vec![3.0, 4.0]];
        assert_relative_eq!(exact(&pts), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn equilateral_triangle_fermat() {
        // unit side, optimal tree through the 120-degree point: sqrt(3)
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.5, 3f64.sqrt() / 2.0],
        ];
        assert_relative_eq!(exact(&pts), 3f64.sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn unit_square_two_branch_points() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ];
        assert_relative_eq!(exact(&pts), 1.0 + 3f64.sqrt(), epsilon = 1e-8);
    }

    #[test]
    fn wide_triangle_degenerates_to_mst() {
        // obtuse enough that the branch point sits on the middle terminal
        let pts = vec![vec![-1.0, 0.0], vec![0.0, 0.05], vec![1.0, 0.0]];
        let e = exact(&pts);
        let m = mst_length(&pts);
        assert_relative_eq!(e, m, epsilon = 1e-8);
    }

    #[test]
    fn coincident_points_zero() {
        let pts = vec![vec![0.3, 0.3], vec![0.3, 0.3], vec![0.3, 0.3]];
        assert!(exact(&pts) < 1e-12);
    }

    #[test]
    fn exact_mode_size_guard() {
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, 0.0]).collect();
        let ps = PointSet::new(pts).unwrap();
        assert!(steiner_diameter(&ps, SteinerMode::Exact).is_err());
        assert!(steiner_diameter(&ps, SteinerMode::MstUpper).is_ok());
    }

    #[test]
    fn mst_upper_bounds_exact_with_steiner_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..120 {
            let n = rng.gen_range(2..=5usize);
            let pts: Vec<Vec<f64>> =
                (0..n).map(|_| (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let e = exact(&pts);
            let m = mst_length(&pts);
            assert!(m >= e - 1e-9, "mst {m} < exact {e}");
            if e > 1e-9 {
                // planar Steiner ratio bound
                assert!(m / e <= 2.0 / 3f64.sqrt() + 1e-7, "ratio {}", m / e);
            }
        }
    }

    #[test]
    fn rigid_motion_and_scaling_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..25 {
            let n = rng.gen_range(3..=4usize);
            let pts: Vec<Vec<f64>> =
                (0..n).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let base = exact(&pts);
            // rotation about z by a random angle plus a translation
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let (c, s) = (th.cos(), th.sin());
            let shift: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let moved: Vec<Vec<f64>> = pts
                .iter()
                .map(|p| {
                    vec![
                        c * p[0] - s * p[1] + shift[0],
                        s * p[0] + c * p[1] + shift[1],
                        p[2] + shift[2],
                    ]
                })
                .collect();
            assert!((exact(&moved) - base).abs() < 1e-9);
            let lam: f64 = rng.gen_range(0.2..3.0);
            let scaled: Vec<Vec<f64>> =
                pts.iter().map(|p| p.iter().map(|v| v * lam).collect()).collect();
            assert!((exact(&scaled) - lam * base).abs() < 1e-9 * (1.0 + lam * base));
        }
    }

    #[test]
    fn duplicate_point_leaves_length_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let pts: Vec<Vec<f64>> =
                (0..3).map(|_| (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let mut dup = pts.clone();
            dup.push(pts[1].clone());
            assert!((exact(&pts) - exact(&dup)).abs() < 1e-8);
        }
    }

    #[test]
    fn shared_point_gluing_subadditivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..30 {
            let x: Vec<Vec<f64>> =
                (0..2).map(|_| (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let y: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let z: Vec<Vec<f64>> =
                (0..2).map(|_| (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let mut xyz = x.clone();
            xyz.push(y.clone());
            xyz.extend(z.iter().cloned());
            let mut xy = x.clone();
            xy.push(y.clone());
            let mut yz = vec![y.clone()];
            yz.extend(z.iter().cloned());
            assert!(exact(&xyz) <= exact(&xy) + exact(&yz) + 1e-7);
        }
    }

    #[test]
    fn property_suite_clean() {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        let report = steiner_property_suite(&mut rng, 2, 60, 1e-7).unwrap();
        assert!(report.pass, "{report:?}");
    }
}
