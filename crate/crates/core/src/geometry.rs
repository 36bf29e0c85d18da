//! Closed convex constraint sets with Euclidean projection and distance.
//!
//! Halfspaces, boxes, balls, singletons and the full space project in closed
//! form. A polyhedron (finite intersection of halfspaces) is projected with
//! Dykstra's alternating projections, which converges to the true Euclidean
//! projection onto the intersection rather than just some feasible point.

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::vector::{axpy, dist, dot, norm_sq};

/// Stopping tolerance for iterative projection, on the change between sweeps.
pub const PROJECTION_TOLERANCE: f64 = 1e-10;

/// Sweep cap for Dykstra's iteration before the polyhedron is declared infeasible.
pub const MAX_DYKSTRA_SWEEPS: usize = 10_000;

/// `{x | normal·x <= offset}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self, GeometryError> {
        let h = Halfspace { normal, offset };
        h.validate()?;
        Ok(h)
    }

    fn validate(&self) -> Result<(), GeometryError> {
        if self.normal.is_empty() {
            return Err(GeometryError::InvalidSet("halfspace normal is empty".into()));
        }
        if !self.normal.iter().all(|v| v.is_finite()) || !self.offset.is_finite() {
            return Err(GeometryError::InvalidSet("halfspace has non-finite parameters".into()));
        }
        if norm_sq(&self.normal) <= 0.0 {
            return Err(GeometryError::InvalidSet("halfspace normal must be nonzero".into()));
        }
        Ok(())
    }

    /// `normal·x - offset`; positive means violated.
    #[inline]
    pub fn excess(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }

    fn project_into(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
        let excess = self.excess(x);
        if excess > 0.0 {
            axpy(out, -excess / norm_sq(&self.normal), &self.normal);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConvexSet {
    Halfspace(Halfspace),
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Polyhedron { faces: Vec<Halfspace> },
    Singleton { point: Vec<f64> },
    FullSpace,
}

impl ConvexSet {
    pub fn halfspace(normal: Vec<f64>, offset: f64) -> Result<Self, GeometryError> {
        Halfspace::new(normal, offset).map(ConvexSet::Halfspace)
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, GeometryError> {
        let s = ConvexSet::Box { lower, upper };
        s.validate()?;
        Ok(s)
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self, GeometryError> {
        let s = ConvexSet::Ball { center, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn polyhedron(faces: Vec<Halfspace>) -> Result<Self, GeometryError> {
        let s = ConvexSet::Polyhedron { faces };
        s.validate()?;
        Ok(s)
    }

    pub fn singleton(point: Vec<f64>) -> Result<Self, GeometryError> {
        let s = ConvexSet::Singleton { point };
        s.validate()?;
        Ok(s)
    }

    /// Checks the structural invariants. Deserialized sets must pass through this.
    pub fn validate(&self) -> Result<(), GeometryError> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            ConvexSet::Halfspace(h) => h.validate(),
            ConvexSet::Box { lower, upper } => {
                if lower.is_empty() || lower.len() != upper.len() {
                    return Err(GeometryError::InvalidSet(
                        "box bounds must be nonempty and of equal length".into(),
                    ));
                }
                if !finite(lower) || !finite(upper) {
                    return Err(GeometryError::InvalidSet("box bounds must be finite".into()));
                }
                if lower.iter().zip(upper).any(|(l, u)| l > u) {
                    return Err(GeometryError::InvalidSet("box requires lower <= upper".into()));
                }
                Ok(())
            }
            ConvexSet::Ball { center, radius } => {
                if center.is_empty() || !finite(center) {
                    return Err(GeometryError::InvalidSet(
                        "ball center must be finite and nonempty".into(),
                    ));
                }
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(GeometryError::InvalidSet("ball radius must be finite and >= 0".into()));
                }
                Ok(())
            }
            ConvexSet::Polyhedron { faces } => {
                let first = faces
                    .first()
                    .ok_or_else(|| GeometryError::InvalidSet("polyhedron needs at least one face".into()))?;
                for face in faces {
                    face.validate()?;
                    if face.normal.len() != first.normal.len() {
                        return Err(GeometryError::InvalidSet(
                            "polyhedron faces have differing dimensions".into(),
                        ));
                    }
                }
                Ok(())
            }
            ConvexSet::Singleton { point } => {
                if point.is_empty() || !finite(point) {
                    return Err(GeometryError::InvalidSet(
                        "singleton point must be finite and nonempty".into(),
                    ));
                }
                Ok(())
            }
            ConvexSet::FullSpace => Ok(()),
        }
    }

    /// Ambient dimension; `None` for the full space, which accepts any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            ConvexSet::Halfspace(h) => Some(h.normal.len()),
            ConvexSet::Box { lower, .. } => Some(lower.len()),
            ConvexSet::Ball { center, .. } => Some(center.len()),
            ConvexSet::Polyhedron { faces } => faces.first().map(|f| f.normal.len()),
            ConvexSet::Singleton { point } => Some(point.len()),
            ConvexSet::FullSpace => None,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), GeometryError> {
        match self.dim() {
            Some(d) if d != x.len() => Err(GeometryError::DimensionMismatch {
                expected: d,
                found: x.len(),
            }),
            _ => Ok(()),
        }
    }

    /// Euclidean projection `argmin_{y in set} |x - y|`.
    ///
    /// A point already inside a closed-form set is returned unchanged, bit for bit.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, GeometryError> {
        self.check_dim(x)?;
        let mut out = x.to_vec();
        match self {
            ConvexSet::Halfspace(h) => h.project_into(x, &mut out),
            ConvexSet::Box { lower, upper } => {
                for ((o, l), u) in out.iter_mut().zip(lower).zip(upper) {
                    *o = o.clamp(*l, *u);
                }
            }
            ConvexSet::Ball { center, radius } => {
                let d = dist(x, center);
                if d > *radius {
                    let scale = radius / d;
                    for ((o, xi), ci) in out.iter_mut().zip(x).zip(center) {
                        *o = ci + scale * (xi - ci);
                    }
                }
            }
            ConvexSet::Polyhedron { faces } => return dykstra(faces, x),
            ConvexSet::Singleton { point } => out.copy_from_slice(point),
            ConvexSet::FullSpace => {}
        }
        Ok(out)
    }

    /// `|x - project(x)|`
    pub fn distance(&self, x: &[f64]) -> Result<f64, GeometryError> {
        let p = self.project(x)?;
        Ok(dist(x, &p))
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool, GeometryError> {
        debug_assert!(tol >= 0.0);
        Ok(self.distance(x)? <= tol)
    }

    /// Halfspaces that make up this set, if it is polyhedral.
    pub fn faces(&self) -> &[Halfspace] {
        match self {
            ConvexSet::Halfspace(h) => std::slice::from_ref(h),
            ConvexSet::Polyhedron { faces } => faces,
            _ => &[],
        }
    }
}

/// Dykstra's alternating projections onto `∩ faces`.
///
/// Each face carries a correction increment; the sweep stops once both the
/// iterate and every increment move by at most `PROJECTION_TOLERANCE`.
fn dykstra(faces: &[Halfspace], x0: &[f64]) -> Result<Vec<f64>, GeometryError> {
    if faces.iter().all(|f| f.excess(x0) <= 0.0) {
        return Ok(x0.to_vec());
    }
    let m = x0.len();
    let mut x = x0.to_vec();
    let mut increments = vec![vec![0.0; m]; faces.len()];
    let mut shifted = vec![0.0; m];
    let mut next = vec![0.0; m];
    let tol_sq = PROJECTION_TOLERANCE * PROJECTION_TOLERANCE;

    for _ in 0..MAX_DYKSTRA_SWEEPS {
        let start = x.clone();
        let mut increment_change = 0.0;
        for (face, p) in faces.iter().zip(increments.iter_mut()) {
            for ((s, xi), pi) in shifted.iter_mut().zip(&x).zip(p.iter()) {
                *s = xi + pi;
            }
            face.project_into(&shifted, &mut next);
            for ((pi, s), n) in p.iter_mut().zip(&shifted).zip(&next) {
                let updated = s - n;
                increment_change += (updated - *pi) * (updated - *pi);
                *pi = updated;
            }
            std::mem::swap(&mut x, &mut next);
        }
        let moved = crate::vector::dist_sq(&x, &start);
        if moved <= tol_sq && increment_change <= tol_sq {
            return Ok(x);
        }
    }
    Err(GeometryError::NotConverged {
        sweeps: MAX_DYKSTRA_SWEEPS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs(a: &[f64], b: f64) -> Halfspace {
        Halfspace::new(a.to_vec(), b).unwrap()
    }

    #[test]
    fn halfspace_projection_closed_form() {
        let s = ConvexSet::halfspace(vec![1.0, 0.0], 0.0).unwrap();
        assert_eq!(s.project(&[2.0, 3.0]).unwrap(), vec![0.0, 3.0]);
        assert_eq!(s.project(&[-1.0, 5.0]).unwrap(), vec![-1.0, 5.0]);
    }

    #[test]
    fn singleton_projection() {
        let s = ConvexSet::singleton(vec![0.0, 0.0]).unwrap();
        assert_eq!(s.project(&[7.0, -3.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn polyhedron_corner_projection() {
        // x1 <= 1, x2 <= 1, x1 + x2 >= 1
        let s = ConvexSet::polyhedron(vec![
            hs(&[1.0, 0.0], 1.0),
            hs(&[0.0, 1.0], 1.0),
            hs(&[-1.0, -1.0], -1.0),
        ])
        .unwrap();
        let p = s.project(&[2.0, 2.0]).unwrap();
        assert!(dist(&p, &[1.0, 1.0]) < 1e-12, "{p:?}");
    }

    #[test]
    fn distances() {
        let h = ConvexSet::halfspace(vec![0.0, 1.0], 0.0).unwrap();
        assert_eq!(h.distance(&[5.0, 2.0]).unwrap(), 2.0);
        assert_eq!(h.distance(&[5.0, -2.0]).unwrap(), 0.0);

        let b = ConvexSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!((b.distance(&[3.0, 4.0]).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(b.distance(&[0.3, 0.4]).unwrap(), 0.0);

        let bx = ConvexSet::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(bx.distance(&[0.5, 0.5]).unwrap(), 0.0);
        assert_eq!(ConvexSet::FullSpace.distance(&[1e9]).unwrap(), 0.0);
    }

    #[test]
    fn containment_with_tolerance() {
        let bx = ConvexSet::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(bx.contains(&[0.5, 0.5], 0.0).unwrap());

        let h = ConvexSet::halfspace(vec![1.0, 0.0], 0.0).unwrap();
        assert!(h.contains(&[1e-12, 0.0], 1e-9).unwrap());
        assert!(!h.contains(&[0.1, 0.0], 1e-9).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let h = ConvexSet::halfspace(vec![1.0, 0.0], 0.0).unwrap();
        assert_eq!(
            h.project(&[1.0]),
            Err(GeometryError::DimensionMismatch { expected: 2, found: 1 })
        );
        assert!(h.contains(&[1.0, 2.0, 3.0], 0.0).is_err());
    }

    #[test]
    fn invalid_sets_rejected() {
        assert!(ConvexSet::halfspace(vec![0.0, 0.0], 1.0).is_err());
        assert!(ConvexSet::boxed(vec![1.0], vec![0.0]).is_err());
        assert!(ConvexSet::ball(vec![0.0], -1.0).is_err());
        assert!(ConvexSet::polyhedron(vec![]).is_err());
        assert!(ConvexSet::polyhedron(vec![hs(&[1.0], 0.0), hs(&[1.0, 0.0], 0.0)]).is_err());
    }

    #[test]
    fn infeasible_polyhedron_does_not_converge() {
        // x <= -1 and x >= 1
        let s = ConvexSet::polyhedron(vec![hs(&[1.0], -1.0), hs(&[-1.0], -1.0)]).unwrap();
        assert_eq!(
            s.project(&[0.0]),
            Err(GeometryError::NotConverged {
                sweeps: MAX_DYKSTRA_SWEEPS
            })
        );
    }

    #[test]
    fn serde_shape() {
        let sets = vec![
            ConvexSet::halfspace(vec![-1.0], 0.0).unwrap(),
            ConvexSet::FullSpace,
            ConvexSet::polyhedron(vec![hs(&[1.0, 0.0], 1.0)]).unwrap(),
        ];
        #[derive(Serialize, Deserialize, PartialEq, Debug)]
        struct Doc {
            sets: Vec<ConvexSet>,
        }
        let text = toml::to_string(&Doc { sets: sets.clone() }).unwrap();
        assert!(text.contains("type = \"halfspace\""), "{text}");
        let back: Doc = toml::from_str(&text).unwrap();
        assert_eq!(back.sets, sets);
    }
}
