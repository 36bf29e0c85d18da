//! Redundancy and regularity of a family of constraint sets, and the step-size
//! and contraction-rate formulas that follow from them.
//!
//! A family of normal sets is *k-redundant* when every subfamily of at least
//! `n - k` sets has the same intersection as the whole family. The regularity
//! constant `mu` bounds how much farther a point is from the intersection of a
//! subfamily than from its worst individual member.
//!
//! Both checks are driven by probe points `x_star + r u` over a set of
//! directions `u` and radii `r`. For a fixed probe, the worst subfamily of
//! size `s` is always the `s` sets nearest to the probe, so the minimum over
//! all `C(h, s)` subsets reduces to an order statistic and no enumeration is
//! needed. [`RedundancyMethod::Enumerate`] keeps the literal subset-by-subset
//! check for cross-validation on small families.

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::RegularityError;
use crate::geometry::ConvexSet;
use crate::vector::{dist, norm};

/// Largest `C(h, n - k)` the enumerating redundancy check will walk.
pub const ENUMERATION_LIMIT: u128 = 5_000_000;

/// Multiplier applied to a sampled `mu` estimate before it is used to pick a step size.
pub const MU_SAFETY_FACTOR: f64 = 0.99;

/// Tolerance for `x_star` lying in each set.
const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

/// Where probe points come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Sampler {
    pub seed: u64,
    /// Random unit directions added on top of the deterministic sweep.
    pub random_directions: usize,
    /// Distances from `x_star` at which every direction is probed.
    pub radii: Vec<f64>,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler {
            seed: 0,
            random_directions: 10_000,
            radii: vec![0.01, 1.0, 100.0],
        }
    }
}

/// A subfamily (indices into the set list) and a point that witnesses a claim about it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub subset: Vec<usize>,
    pub point: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RedundancyVerdict {
    pub redundant: bool,
    /// When not redundant: a subfamily of size `n - k` whose intersection holds `point != x_star`.
    pub witness: Option<Witness>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum RedundancyMethod {
    /// Order-statistic reduction; cost independent of `C(h, n - k)`.
    #[default]
    Counting,
    /// Walk every subset of size `n - k`, refusing beyond [`ENUMERATION_LIMIT`].
    Enumerate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuEstimate {
    pub mu: f64,
    /// The subfamily and probe point attaining the minimum ratio.
    pub witness: Witness,
}

/// Unit probe directions for dimension `m`.
///
/// The deterministic part is a full sweep in low dimension (`±1`; a 1° grid
/// on the circle; an icosphere) plus every face normal and, in the plane, the
/// boundary direction of every face. Random Gaussian directions follow.
pub fn probe_directions(m: usize, sets: &[ConvexSet], sampler: &Sampler) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    match m {
        0 => return dirs,
        1 => return vec![vec![1.0], vec![-1.0]],
        2 => dirs.extend((0..360).map(|deg| unit_at_degrees(deg as f64))),
        3 => dirs.extend(icosphere(2)),
        _ => {}
    }
    for i in 0..m {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; m];
            e[i] = sign;
            dirs.push(e);
        }
    }
    for face in sets.iter().flat_map(|s| s.faces()) {
        let len = norm(&face.normal);
        let u: Vec<f64> = face.normal.iter().map(|v| v / len).collect();
        if m == 2 {
            dirs.push(vec![-u[1], u[0]]);
            dirs.push(vec![u[1], -u[0]]);
        }
        dirs.push(u.iter().map(|v| -v).collect());
        dirs.push(u);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let mut added = 0;
    while added < sampler.random_directions {
        let g: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
        let len = norm(&g);
        if len > 1e-12 {
            dirs.push(g.iter().map(|v| v / len).collect());
            added += 1;
        }
    }
    dirs
}

fn unit_at_degrees(deg: f64) -> Vec<f64> {
    let (s, c) = deg.to_radians().sin_cos();
    vec![c, s]
}

/// Vertices of a subdivided icosahedron projected to the unit sphere.
fn icosphere(levels: usize) -> Vec<Vec<f64>> {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let normalize = |v: [f64; 3]| {
        let l = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / l, v[1] / l, v[2] / l]
    };
    verts.iter_mut().for_each(|v| *v = normalize(*v));
    for _ in 0..levels {
        let mut midpoints = std::collections::HashMap::new();
        let mut next_faces = Vec::with_capacity(faces.len() * 4);
        let mut mid = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push(normalize([
                    (p[0] + q[0]) / 2.0,
                    (p[1] + q[1]) / 2.0,
                    (p[2] + q[2]) / 2.0,
                ]));
                verts.len() - 1
            })
        };
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next_faces.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next_faces;
    }
    verts.into_iter().map(|v| v.to_vec()).collect()
}

fn probe_points(x_star: &[f64], dirs: &[Vec<f64>], radii: &[f64]) -> Vec<Vec<f64>> {
    radii
        .iter()
        .flat_map(|&r| {
            dirs.iter()
                .map(move |u| x_star.iter().zip(u).map(|(c, ui)| c + r * ui).collect::<Vec<f64>>())
        })
        .filter(|p| p.as_slice() != x_star)
        .collect()
}

fn validate_family(sets: &[ConvexSet], x_star: &[f64]) -> Result<(), RegularityError> {
    for (index, set) in sets.iter().enumerate() {
        if !set.contains(x_star, MEMBERSHIP_TOLERANCE)? {
            return Err(RegularityError::NotContained { index });
        }
    }
    Ok(())
}

fn containment_tolerance(point: &[f64], x_star: &[f64]) -> f64 {
    1e-12 * dist(point, x_star).max(1.0)
}

/// Decides whether every subfamily of at least `n - k` of `sets` intersects
/// exactly in `{x_star}`.
///
/// The caller asserts the full intersection is `{x_star}`; a probe point found
/// in every set is reported as [`RegularityError::NonSingleton`].
pub fn check_k_redundancy(
    sets: &[ConvexSet],
    n: usize,
    k: usize,
    x_star: &[f64],
    sampler: &Sampler,
) -> Result<RedundancyVerdict, RegularityError> {
    check_k_redundancy_with(sets, n, k, x_star, sampler, RedundancyMethod::Counting)
}

pub fn check_k_redundancy_with(
    sets: &[ConvexSet],
    n: usize,
    k: usize,
    x_star: &[f64],
    sampler: &Sampler,
    method: RedundancyMethod,
) -> Result<RedundancyVerdict, RegularityError> {
    if k > n {
        return Err(RegularityError::InvalidParameters(format!("k = {k} exceeds n = {n}")));
    }
    validate_family(sets, x_star)?;
    let h = sets.len();
    let size = n - k;
    let m = x_star.len();

    let dirs = probe_directions(m, sets, sampler);
    let points = probe_points(x_star, &dirs, &sampler.radii);
    let membership: Vec<Vec<bool>> = points
        .iter()
        .map(|p| {
            let tol = containment_tolerance(p, x_star);
            sets.iter().map(|s| s.contains(p, tol)).collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;

    if let Some((p, _)) = points.iter().zip(&membership).find(|(_, row)| row.iter().all(|&b| b)) {
        if h > 0 {
            return Err(RegularityError::NonSingleton { point: p.clone() });
        }
    }
    if size > h {
        // no subfamily is large enough to qualify
        return Ok(RedundancyVerdict {
            redundant: true,
            witness: None,
        });
    }
    if size == 0 {
        let mut point = x_star.to_vec();
        if let Some(first) = point.first_mut() {
            *first += 1.0;
        }
        return Ok(RedundancyVerdict {
            redundant: false,
            witness: Some(Witness { subset: vec![], point }),
        });
    }

    let witness = match method {
        RedundancyMethod::Counting => points.iter().zip(&membership).find_map(|(p, row)| {
            let inside: Vec<usize> = row.iter().positions(|&b| b).collect();
            (inside.len() >= size).then(|| Witness {
                subset: inside[..size].to_vec(),
                point: p.clone(),
            })
        }),
        RedundancyMethod::Enumerate => {
            let subsets = binomial(h, size);
            if subsets > ENUMERATION_LIMIT {
                return Err(RegularityError::BudgetExceeded {
                    subsets,
                    limit: ENUMERATION_LIMIT,
                });
            }
            (0..h).combinations(size).find_map(|subset| {
                points
                    .iter()
                    .zip(&membership)
                    .find(|(_, row)| subset.iter().all(|&i| row[i]))
                    .map(|(p, _)| Witness {
                        subset: subset.clone(),
                        point: p.clone(),
                    })
            })
        }
    };
    Ok(RedundancyVerdict {
        redundant: witness.is_none(),
        witness,
    })
}

/// `C(n, r)`, saturating.
pub fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Sampled estimate of the regularity constant for subfamilies of size `n - k`.
///
/// For every probe `x` the ratio `max_{i in S} dist(x, X_i) / |x - x_star|` is
/// minimized over subfamilies `S` by taking the `n - k` nearest sets. The
/// result is the minimum over probes, so it can only overestimate the true
/// constant. In the plane the best grid angle is refined to 0.01°.
pub fn estimate_mu(
    sets: &[ConvexSet],
    n: usize,
    k: usize,
    x_star: &[f64],
    sampler: &Sampler,
) -> Result<MuEstimate, RegularityError> {
    if k > n {
        return Err(RegularityError::InvalidParameters(format!("k = {k} exceeds n = {n}")));
    }
    let h = sets.len();
    let size = n - k;
    if size == 0 || size > h {
        return Err(RegularityError::InvalidParameters(format!(
            "subfamily size n - k = {size} must lie in 1..={h}"
        )));
    }
    validate_family(sets, x_star)?;
    let m = x_star.len();
    let dirs = probe_directions(m, sets, sampler);
    let points = probe_points(x_star, &dirs, &sampler.radii);

    let mut best: Option<(f64, Vec<f64>)> = None;
    for p in points {
        consider_probe(&mut best, sets, size, x_star, p)?;
    }
    if m == 2 {
        if let Some((_, p)) = best.clone() {
            let offset: Vec<f64> = p.iter().zip(x_star).map(|(a, b)| a - b).collect();
            let r = norm(&offset);
            let center = offset[1].atan2(offset[0]).to_degrees();
            for step in -100..=100 {
                let u = unit_at_degrees(center + step as f64 * 0.01);
                consider_probe(
                    &mut best,
                    sets,
                    size,
                    x_star,
                    vec![x_star[0] + r * u[0], x_star[1] + r * u[1]],
                )?;
            }
        }
    }

    let (mu, point) = best.ok_or(RegularityError::NoValidSamples)?;
    let subset = nearest_sets(sets, size, &point)?;
    if mu <= 0.0 {
        return Err(RegularityError::NotRedundant { subset, point });
    }
    Ok(MuEstimate {
        mu,
        witness: Witness { subset, point },
    })
}

fn consider_probe(
    best: &mut Option<(f64, Vec<f64>)>,
    sets: &[ConvexSet],
    size: usize,
    x_star: &[f64],
    p: Vec<f64>,
) -> Result<(), RegularityError> {
    let ratio = subset_ratio(sets, size, x_star, &p)?;
    if best.as_ref().is_none_or(|(b, _)| ratio < *b) {
        *best = Some((ratio, p));
    }
    Ok(())
}

/// Minimum over subfamilies of size `size` of `max_{i in S} dist(p, X_i) / |p - x_star|`.
fn subset_ratio(sets: &[ConvexSet], size: usize, x_star: &[f64], p: &[f64]) -> Result<f64, RegularityError> {
    let mut d: Vec<f64> = sets.iter().map(|s| s.distance(p)).collect::<Result<_, _>>()?;
    let (_, kth, _) = d.select_nth_unstable_by(size - 1, |a, b| a.total_cmp(b));
    Ok(*kth / dist(p, x_star))
}

fn nearest_sets(sets: &[ConvexSet], size: usize, p: &[f64]) -> Result<Vec<usize>, RegularityError> {
    let d: Vec<f64> = sets.iter().map(|s| s.distance(p)).collect::<Result<_, _>>()?;
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    order.truncate(size);
    order.sort_unstable();
    Ok(order)
}

/// `4f/mu^2 + 2f - 1`; the redundancy level must exceed this.
pub fn k_threshold(mu: f64, f: usize) -> f64 {
    let f = f as f64;
    4.0 * f / (mu * mu) + 2.0 * f - 1.0
}

/// `mu^2 k - 2f mu^2 - 4f + mu^2`, the linear coefficient of the contraction factor.
pub fn descent_margin(mu: f64, k: usize, f: usize) -> f64 {
    let mu2 = mu * mu;
    let (k, f) = (k as f64, f as f64);
    mu2 * k - 2.0 * f * mu2 - 4.0 * f + mu2
}

/// Largest admissible step, `(mu^2 k - 2f mu^2 - 4f + mu^2) / (4 h^3)`.
///
/// A non-positive value means the parameters admit no step size.
pub fn alpha_upper_bound(mu: f64, k: usize, f: usize, h: usize) -> f64 {
    debug_assert!(mu > 0.0 && mu <= 1.0 && h >= 1);
    let h = h as f64;
    descent_margin(mu, k, f) / (4.0 * h * h * h)
}

/// `1 - (mu^2 k - 4f - 2f mu^2 + mu^2) alpha + 4 h^3 alpha^2`, unchecked.
pub fn contraction_factor(alpha: f64, mu: f64, k: usize, f: usize, h: usize) -> f64 {
    let h = h as f64;
    1.0 - descent_margin(mu, k, f) * alpha + 4.0 * h * h * h * alpha * alpha
}

/// Contraction factor for a step strictly below [`alpha_upper_bound`].
pub fn rho_bound(alpha: f64, mu: f64, k: usize, f: usize, h: usize) -> Result<f64, RegularityError> {
    let rho = contraction_factor(alpha, mu, k, f, h);
    if alpha > 0.0 && rho > 0.0 && rho < 1.0 {
        Ok(rho)
    } else {
        Err(RegularityError::RhoInfeasible { rho })
    }
}

/// Summary of the redundancy and regularity hypotheses for a configured family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub k: usize,
    pub f: usize,
    pub h: usize,
    pub redundant: bool,
    /// Raw sampled estimate, when `mu` was estimated rather than given.
    pub mu_estimate: Option<f64>,
    /// The value every formula below was evaluated with.
    pub mu: f64,
    pub alpha_bound: f64,
    /// Whether `k > 4f/mu^2 + 2f - 1`.
    pub feasible: bool,
    pub witness: Option<Witness>,
}

impl RegularityReport {
    pub fn new(k: usize, f: usize, h: usize, mu: f64, verdict: RedundancyVerdict, mu_estimate: Option<f64>) -> Self {
        RegularityReport {
            k,
            f,
            h,
            redundant: verdict.redundant,
            mu_estimate,
            mu,
            alpha_bound: alpha_upper_bound(mu, k, f, h),
            feasible: k as f64 > k_threshold(mu, f),
            witness: verdict.witness,
        }
    }

    pub fn rho(&self, alpha: f64) -> f64 {
        contraction_factor(alpha, self.mu, self.k, self.f, self.h)
    }
}
