//! Planar primitives shared by every other module: parameter angles, points,
//! segments, segment/curve intersection, winding numbers, and nearest-point
//! queries against a sampled loop.
//!
//! All geometric comparisons use one absolute tolerance derived from the
//! curve's bounding box: `GEOM_TOL_FACTOR * bbox_diagonal`. Tangential touches
//! count as intersections, and ties are resolved deterministically so repeated
//! runs produce identical output.

use crate::curves::SampledLoop;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Collinearity/tangency tolerance as a fraction of the curve bbox diagonal.
pub const GEOM_TOL_FACTOR: f64 = 1e-12;

/// Fraction of the bbox diagonal a winding query point must keep clear of the
/// polyline.
pub const WINDING_GUARD_FACTOR: f64 = 1e-12;

/// Largest acceptable distance between a winding turn-angle sum and the
/// nearest integer multiple of `2*pi`, in revolutions.
pub const WINDING_RESIDUAL_LIMIT: f64 = 0.25;

/// An angle on the parameter circle, kept normalized to `[0, 2*pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamAngle(f64);

impl ParamAngle {
    /// Wraps any finite radian value into `[0, 2*pi)`.
    pub fn new(radians: f64) -> Result<Self> {
        if !radians.is_finite() {
            return Err(Error::invalid(format!(
                "parameter angle must be finite, got {radians}"
            )));
        }
        Ok(ParamAngle(normalize_angle(radians)))
    }

    /// The normalized radian value in `[0, 2*pi)`.
    pub fn rad(self) -> f64 {
        self.0
    }
}

/// Wraps a finite radian value into `[0, 2*pi)`. Idempotent.
pub fn normalize_angle(radians: f64) -> f64 {
    let mut t = radians.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2*pi for tiny negative inputs.
    if t >= TAU {
        t = 0.0;
    }
    t
}

/// Angular distance `d(a, b) = min(|a-b|, 2*pi - |a-b|)`, a metric with values
/// in `[0, pi]`. Exact zero for equal normalized inputs.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let (a, b) = (normalize_angle(a), normalize_angle(b));
    let diff = (a - b).abs();
    diff.min(TAU - diff)
}

/// A point of the image plane. Coordinates are always finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::invalid(format!(
                "point coordinates must be finite, got ({x}, {y})"
            )));
        }
        Ok(PlanarPoint { x, y })
    }

    /// Infallible constructor for coordinates known to be finite.
    pub(crate) fn raw(x: f64, y: f64) -> Self {
        PlanarPoint { x, y }
    }

    pub fn dist(self, other: PlanarPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist2(self, other: PlanarPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub(crate) fn add(self, dx: f64, dy: f64) -> Self {
        PlanarPoint::raw(self.x + dx, self.y + dy)
    }

    pub(crate) fn lerp(self, other: PlanarPoint, t: f64) -> Self {
        PlanarPoint::raw(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

/// A closed segment between two planar points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub p: PlanarPoint,
    pub q: PlanarPoint,
}

impl Segment {
    pub fn new(p: PlanarPoint, q: PlanarPoint) -> Self {
        Segment { p, q }
    }

    pub fn length(self) -> f64 {
        self.p.dist(self.q)
    }

    /// A segment shorter than `tol` carries no usable direction.
    pub fn is_degenerate(self, tol: f64) -> bool {
        self.length() <= tol
    }

    pub fn midpoint(self) -> PlanarPoint {
        self.p.lerp(self.q, 0.5)
    }
}

/// Axis-aligned bounding box of a point set.
#[derive(Debug, Clone, Copy)]
pub struct Bbox {
    pub min: PlanarPoint,
    pub max: PlanarPoint,
}

impl Bbox {
    pub fn of_points(points: &[PlanarPoint]) -> Bbox {
        let mut min = PlanarPoint::raw(f64::INFINITY, f64::INFINITY);
        let mut max = PlanarPoint::raw(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        Bbox { min, max }
    }

    pub fn diagonal(&self) -> f64 {
        self.min.dist(self.max)
    }

    pub fn center(&self) -> PlanarPoint {
        self.min.lerp(self.max, 0.5)
    }
}

/// Nearest points of a loop from a query point: the common distance, the
/// merged representative points, and their bearings (direction from the query
/// point, in `[0, 2*pi)`, same order as `points`).
#[derive(Debug, Clone)]
pub struct NearestSet {
    pub distance: f64,
    pub points: Vec<PlanarPoint>,
    pub bearings: Vec<f64>,
}

pub(crate) fn cross(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    ax * by - ay * bx
}

/// Closest point of segment `a..b` to `z`, as (parameter in [0,1], point).
pub(crate) fn project_to_segment(z: PlanarPoint, a: PlanarPoint, b: PlanarPoint) -> (f64, PlanarPoint) {
    let ux = b.x - a.x;
    let uy = b.y - a.y;
    let len2 = ux * ux + uy * uy;
    if len2 == 0.0 {
        return (0.0, a);
    }
    let t = (((z.x - a.x) * ux + (z.y - a.y) * uy) / len2).clamp(0.0, 1.0);
    (t, a.lerp(b, t))
}

/// Distance from `z` to the polyline of `curve` (all edges incl. the seam).
pub(crate) fn distance_to_loop(z: PlanarPoint, curve: &SampledLoop) -> f64 {
    let mut best = f64::INFINITY;
    for (a, b) in curve.edges() {
        let (_, cp) = project_to_segment(z, a, b);
        best = best.min(z.dist(cp));
    }
    best
}

/// Intersection points between `s` and the loop polyline.
///
/// Transversal and tangential touches both count. Hits within `exclusion`
/// (Euclidean) of either endpoint of `s` are dropped, duplicate hits where
/// adjacent edges share a vertex are merged, and collinear overlaps contribute
/// their two overlap endpoints. The result is sorted along `s` from `s.p`.
pub fn segment_curve_hits(
    s: Segment,
    curve: &SampledLoop,
    exclusion: f64,
) -> Result<Vec<PlanarPoint>> {
    let tol = curve.geom_tol();
    if s.is_degenerate(tol) {
        return Err(Error::geometry(format!(
            "degenerate segment of length {:.3e} (tolerance {:.3e})",
            s.length(),
            tol
        )));
    }
    let mut hits: Vec<(f64, PlanarPoint)> = Vec::new();
    let rx = s.q.x - s.p.x;
    let ry = s.q.y - s.p.y;
    let rlen = s.length();
    for (a, b) in curve.edges() {
        edge_hits(s, rx, ry, rlen, a, b, tol, &mut hits);
    }
    hits.sort_by(|u, v| u.0.total_cmp(&v.0));
    let mut out: Vec<PlanarPoint> = Vec::new();
    for (_, pt) in hits {
        // Strict comparison: a zero exclusion keeps exact endpoint touches.
        if pt.dist(s.p) < exclusion || pt.dist(s.q) < exclusion {
            continue;
        }
        if let Some(last) = out.last() {
            if last.dist(pt) <= tol.max(1e-9 * rlen) {
                continue;
            }
        }
        out.push(pt);
    }
    Ok(out)
}

/// True iff `s` meets the polyline anywhere outside the endpoint exclusions.
/// Same predicate as `segment_curve_hits(..).is_empty()` but with early exit.
pub(crate) fn segment_hits_curve(s: Segment, curve: &SampledLoop, exclusion: f64) -> bool {
    let tol = curve.geom_tol();
    let rx = s.q.x - s.p.x;
    let ry = s.q.y - s.p.y;
    let rlen = s.length();
    let mut hits: Vec<(f64, PlanarPoint)> = Vec::with_capacity(2);
    for (a, b) in curve.edges() {
        hits.clear();
        edge_hits(s, rx, ry, rlen, a, b, tol, &mut hits);
        for (_, pt) in &hits {
            if pt.dist(s.p) >= exclusion && pt.dist(s.q) >= exclusion {
                return true;
            }
        }
    }
    false
}

/// Collects hits of one polyline edge against `s` as (parameter along s, point).
#[allow(clippy::too_many_arguments)]
fn edge_hits(
    s: Segment,
    rx: f64,
    ry: f64,
    rlen: f64,
    a: PlanarPoint,
    b: PlanarPoint,
    tol: f64,
    hits: &mut Vec<(f64, PlanarPoint)>,
) {
    let ex = b.x - a.x;
    let ey = b.y - a.y;
    let elen = (ex * ex + ey * ey).sqrt();
    let denom = cross(rx, ry, ex, ey);
    let acx = a.x - s.p.x;
    let acy = a.y - s.p.y;
    // Parameter-space slack so touches at vertices survive rounding.
    let t_tol = if rlen > 0.0 { tol / rlen } else { 0.0 };
    let u_tol = if elen > 0.0 { tol / elen } else { 0.0 };
    if denom.abs() > tol * (rlen + elen) {
        let t = cross(acx, acy, ex, ey) / denom;
        let u = cross(acx, acy, rx, ry) / denom;
        if t >= -t_tol && t <= 1.0 + t_tol && u >= -u_tol && u <= 1.0 + u_tol {
            let tc = t.clamp(0.0, 1.0);
            hits.push((tc, s.p.lerp(s.q, tc)));
        }
        return;
    }
    // Near-parallel: only collinear edges can still touch.
    let perp = cross(rx, ry, acx, acy).abs() / rlen;
    if perp > tol || elen == 0.0 {
        return;
    }
    // Collinear overlap: report the overlap interval's endpoints.
    let proj = |p: PlanarPoint| ((p.x - s.p.x) * rx + (p.y - s.p.y) * ry) / (rlen * rlen);
    let (ta, tb) = (proj(a), proj(b));
    let (lo, hi) = (ta.min(tb), ta.max(tb));
    let lo_c = lo.max(0.0);
    let hi_c = hi.min(1.0);
    if lo_c <= hi_c + t_tol {
        for t in [lo_c, hi_c] {
            let tc = t.clamp(0.0, 1.0);
            hits.push((tc, s.p.lerp(s.q, tc)));
        }
    }
}

/// Winding number of the loop around `z` by summed signed turn angles.
///
/// Errors when `z` is within the guard distance of the polyline ("point on
/// curve") or when the angle sum is farther than [`WINDING_RESIDUAL_LIMIT`]
/// revolutions from an integer ("ill-conditioned winding").
pub fn winding_number(curve: &SampledLoop, z: PlanarPoint) -> Result<i32> {
    let guard = WINDING_GUARD_FACTOR * curve.bbox().diagonal();
    if distance_to_loop(z, curve) <= guard {
        return Err(Error::geometry(
            "winding number undefined: point on curve".to_string(),
        ));
    }
    let mut total = 0.0;
    for (a, b) in curve.edges() {
        let ax = a.x - z.x;
        let ay = a.y - z.y;
        let bx = b.x - z.x;
        let by = b.y - z.y;
        total += cross(ax, ay, bx, by).atan2(ax * bx + ay * by);
    }
    let revs = total / TAU;
    let rounded = revs.round();
    if (revs - rounded).abs() >= WINDING_RESIDUAL_LIMIT {
        return Err(Error::geometry(format!(
            "ill-conditioned winding sum: residual {:.3} revolutions",
            (revs - rounded).abs()
        )));
    }
    Ok(rounded as i32)
}

/// Nearest points of the loop from `z`, one representative per contact.
///
/// A contact is a weak local minimum of the per-edge closest-point distance
/// profile along the loop (ties within a relative `1e-9` count as equal, so
/// flat stretches like arcs seen from their center form plateaus). Minima
/// farther than `distance * (1 + slack)` are dropped; the survivors, ordered
/// closest first, are deduplicated so kept points stay more than
/// `distance * slack` apart — an isolated tangency yields a single point,
/// while a degenerate contact continuum (circle seen from its center) yields
/// representatives all along it. Bearings are directions from `z` to each
/// kept point.
pub fn nearest_on_curve(z: PlanarPoint, curve: &SampledLoop, slack: f64) -> Result<NearestSet> {
    if !(slack.is_finite() && slack >= 0.0) {
        return Err(Error::invalid(format!("slack must be >= 0, got {slack}")));
    }
    let mut profile: Vec<(f64, PlanarPoint)> = Vec::new();
    let mut best = f64::INFINITY;
    for (a, b) in curve.edges() {
        let (_, cp) = project_to_segment(z, a, b);
        let d = z.dist(cp);
        best = best.min(d);
        profile.push((d, cp));
    }
    let n = profile.len();
    let admit = best * (1.0 + slack);
    let merge = best * slack;
    let tie = 1e-9 * (1.0 + best);
    let mut candidates: Vec<(f64, PlanarPoint)> = (0..n)
        .filter(|&i| {
            let d = profile[i].0;
            d <= admit
                && d <= profile[(i + n - 1) % n].0 + tie
                && d <= profile[(i + 1) % n].0 + tie
        })
        .map(|i| profile[i])
        .collect();
    candidates.sort_by(|u, v| u.0.total_cmp(&v.0).then(u.1.x.total_cmp(&v.1.x)).then(u.1.y.total_cmp(&v.1.y)));
    let mut points: Vec<PlanarPoint> = Vec::new();
    for (_, cp) in candidates {
        if points.iter().all(|kept| kept.dist(cp) > merge) {
            points.push(cp);
        }
    }
    let bearings = points
        .iter()
        .map(|p| normalize_angle((p.y - z.y).atan2(p.x - z.x)))
        .collect();
    Ok(NearestSet {
        distance: best,
        points,
        bearings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::make_loop;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn circle_loop(n: usize, k: f64) -> SampledLoop {
        let pts = (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                PlanarPoint::raw((k * t).cos(), (k * t).sin())
            })
            .collect::<Vec<_>>();
        let params = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        make_loop(params, pts, None).unwrap()
    }

    fn square_loop() -> SampledLoop {
        // The square [-1,1]^2 walked counterclockwise from (1,-1), four
        // samples per side so corners land exactly on samples.
        let corners = [
            PlanarPoint::raw(1.0, -1.0),
            PlanarPoint::raw(1.0, 1.0),
            PlanarPoint::raw(-1.0, 1.0),
            PlanarPoint::raw(-1.0, -1.0),
        ];
        let per_side = 4;
        let n = 4 * per_side;
        let mut pts = Vec::with_capacity(n);
        for side in 0..4 {
            let (a, b) = (corners[side], corners[(side + 1) % 4]);
            for j in 0..per_side {
                pts.push(a.lerp(b, j as f64 / per_side as f64));
            }
        }
        let params = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        make_loop(params, pts, None).unwrap()
    }

    #[test]
    fn param_angle_normalizes_and_rejects() {
        assert_eq!(ParamAngle::new(0.0).unwrap().rad(), 0.0);
        assert!((ParamAngle::new(TAU + 1.0).unwrap().rad() - 1.0).abs() < 1e-12);
        assert!((ParamAngle::new(-1.0).unwrap().rad() - (TAU - 1.0)).abs() < 1e-12);
        // Idempotent: normalizing a normalized value changes nothing.
        for t in [0.0, 1.0, 3.0, 6.28, -1e-20] {
            let once = normalize_angle(t);
            assert_eq!(once, normalize_angle(once));
            assert!((0.0..TAU).contains(&once), "normalize({t}) = {once}");
        }
        assert!(ParamAngle::new(f64::NAN).is_err());
        assert!(ParamAngle::new(f64::INFINITY).is_err());
        assert!(PlanarPoint::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn angular_distance_is_a_metric_on_seeded_samples() {
        // Range, symmetry, identity, and the triangle inequality on random
        // triples; quarter-turn and antipodal checks pin the scale.
        assert_eq!(angular_distance(1.25, 1.25), 0.0);
        assert!((angular_distance(0.0, PI) - PI).abs() < 1e-15);
        assert!((angular_distance(0.1, 0.1 + PI / 2.0) - PI / 2.0).abs() < 1e-12);
        assert!((angular_distance(6.2, 0.1) - (0.1 + TAU - 6.2)).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let a = rng.random_range(-10.0..10.0);
            let b = rng.random_range(-10.0..10.0);
            let c = rng.random_range(-10.0..10.0);
            let dab = angular_distance(a, b);
            let dba = angular_distance(b, a);
            assert!((dab - dba).abs() < 1e-12);
            assert!((0.0..=PI + 1e-12).contains(&dab));
            assert!(angular_distance(a, c) <= dab + angular_distance(b, c) + 1e-9);
        }
    }

    #[test]
    fn segment_hits_square_match_side_crossing_oracle() {
        // Oracle: intersect the probe with each axis-aligned side directly.
        let sq = square_loop();
        let s = Segment::new(PlanarPoint::raw(-2.0, 0.25), PlanarPoint::raw(2.0, 0.25));
        // y = 0.25 crosses x = -1 and x = 1 sides.
        let hits = segment_curve_hits(s, &sq, 0.0).unwrap();
        assert_eq!(hits.len(), 2);
        assert!(hits[0].dist(PlanarPoint::raw(-1.0, 0.25)) < 1e-12);
        assert!(hits[1].dist(PlanarPoint::raw(1.0, 0.25)) < 1e-12);

        // Fully inside: no hits.
        let inside = Segment::new(PlanarPoint::raw(-0.5, 0.2), PlanarPoint::raw(0.5, -0.3));
        assert!(segment_curve_hits(inside, &sq, 0.0).unwrap().is_empty());
        assert!(!segment_hits_curve(inside, &sq, 0.0));

        // Tangential touch at the corner (1,1): exactly one merged hit.
        let graze = Segment::new(PlanarPoint::raw(0.0, 2.0), PlanarPoint::raw(2.0, 0.0));
        let hits = segment_curve_hits(graze, &sq, 0.0).unwrap();
        assert_eq!(hits.len(), 1);
        assert!(hits[0].dist(PlanarPoint::raw(1.0, 1.0)) < 1e-9);

        // Collinear overlap with the x = 1 side: every reported hit lies on
        // the overlap interval, whose ends come first and last. Interior
        // polyline vertices of the side may be reported as well.
        let along = Segment::new(PlanarPoint::raw(1.0, -2.0), PlanarPoint::raw(1.0, 0.5));
        let hits = segment_curve_hits(along, &sq, 0.0).unwrap();
        assert!(hits.len() >= 2);
        assert!(hits.first().unwrap().dist(PlanarPoint::raw(1.0, -1.0)) < 1e-12);
        assert!(hits.last().unwrap().dist(PlanarPoint::raw(1.0, 0.5)) < 1e-12);
        for h in &hits {
            assert!((h.x - 1.0).abs() < 1e-12 && (-1.0..=0.5).contains(&h.y));
        }
    }

    #[test]
    fn diameter_hits_vanish_under_endpoint_exclusion() {
        let c = circle_loop(256, 1.0);
        let s = Segment::new(PlanarPoint::raw(1.0, 0.0), PlanarPoint::raw(-1.0, 0.0));
        let hits = segment_curve_hits(s, &c, 0.01).unwrap();
        assert!(hits.is_empty(), "unexpected hits: {hits:?}");
        // Without the exclusion the endpoint touches are reported.
        assert!(!segment_curve_hits(s, &c, 0.0).unwrap().is_empty());
    }

    #[test]
    fn degenerate_segment_is_rejected() {
        let c = circle_loop(64, 1.0);
        let p = PlanarPoint::raw(0.3, 0.3);
        let err = segment_curve_hits(Segment::new(p, p), &c, 0.0).unwrap_err();
        assert!(err.to_string().contains("degenerate segment"));
    }

    #[test]
    fn winding_matches_angle_summation_oracle() {
        // Oracle: direct angle summation over dense analytic samples of the
        // triple-wound circle, independent of the loop machinery.
        let mut oracle = 0.0f64;
        let m = 8192;
        for i in 0..m {
            let t0 = TAU * i as f64 / m as f64;
            let t1 = TAU * (i + 1) as f64 / m as f64;
            let (a, b) = ((3.0 * t0).sin_cos(), (3.0 * t1).sin_cos());
            // sin_cos returns (sin, cos); position is (cos, sin).
            let (ax, ay) = (a.1, a.0);
            let (bx, by) = (b.1, b.0);
            oracle += (ax * by - ay * bx).atan2(ax * bx + ay * by);
        }
        assert!((oracle / TAU - 3.0).abs() < 1e-9);

        let c3 = circle_loop(256, 3.0);
        assert_eq!(winding_number(&c3, PlanarPoint::raw(0.0, 0.0)).unwrap(), 3);
        assert_eq!(winding_number(&c3, PlanarPoint::raw(3.0, 0.0)).unwrap(), 0);

        let c1 = circle_loop(256, 1.0);
        assert_eq!(winding_number(&c1, PlanarPoint::raw(0.1, -0.2)).unwrap(), 1);
        let rev = circle_loop(256, -1.0);
        assert_eq!(winding_number(&rev, PlanarPoint::raw(0.0, 0.0)).unwrap(), -1);
    }

    #[test]
    fn winding_is_translation_invariant_and_guards_curve_points() {
        let n = 128;
        let (dx, dy) = (2.75, -1.5);
        let pts = (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                PlanarPoint::raw(t.cos() + dx, t.sin() + dy)
            })
            .collect::<Vec<_>>();
        let params = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let shifted = make_loop(params, pts, None).unwrap();
        assert_eq!(
            winding_number(&shifted, PlanarPoint::raw(dx, dy)).unwrap(),
            1
        );
        let on_curve = PlanarPoint::raw(1.0 + dx, dy);
        let err = winding_number(&shifted, on_curve).unwrap_err();
        assert!(err.to_string().contains("point on curve"));
    }

    #[test]
    fn nearest_from_circle_center_covers_all_bearings() {
        let c = circle_loop(1024, 1.0);
        let ns = nearest_on_curve(PlanarPoint::raw(0.0, 0.0), &c, 0.01).unwrap();
        assert!((ns.distance - 1.0).abs() < 1e-4);
        assert!(ns.points.len() > 50, "got {}", ns.points.len());
        let mut bearings = ns.bearings.clone();
        bearings.sort_by(f64::total_cmp);
        let mut max_gap = TAU - (bearings.last().unwrap() - bearings[0]);
        for w in bearings.windows(2) {
            max_gap = max_gap.max(w[1] - w[0]);
        }
        assert!(max_gap < 0.1, "bearing gap {max_gap}");
        for b in &ns.bearings {
            assert!((0.0..TAU).contains(b));
        }
    }

    #[test]
    fn nearest_from_offset_point_is_a_single_cluster() {
        let c = circle_loop(1024, 1.0);
        let h = TAU / 1024.0;
        let ns = nearest_on_curve(PlanarPoint::raw(0.5, 0.0), &c, 0.02).unwrap();
        assert!((ns.distance - 0.5).abs() < 1e-3);
        assert_eq!(ns.points.len(), 1, "points: {:?}", ns.points);
        // The discrete foot can sit up to about a sample spacing from (1, 0).
        assert!(ns.points[0].dist(PlanarPoint::raw(1.0, 0.0)) < h);
        assert!(ns.bearings[0] < 0.01 || ns.bearings[0] > TAU - 0.01);
    }

    #[test]
    fn nearest_from_square_center_matches_projection_oracle() {
        // Oracle: per-edge projection of the origin onto each side gives the
        // four side midpoints at distance exactly 1.
        let sq = square_loop();
        let z = PlanarPoint::raw(0.0, 0.0);
        let mut oracle_best = f64::INFINITY;
        for (a, b) in sq.edges() {
            let (_, cp) = project_to_segment(z, a, b);
            oracle_best = oracle_best.min(z.dist(cp));
        }
        assert!((oracle_best - 1.0).abs() < 1e-12);
        let ns = nearest_on_curve(z, &sq, 0.02).unwrap();
        assert!((ns.distance - 1.0).abs() < 1e-12);
        assert_eq!(ns.points.len(), 4, "points: {:?}", ns.points);
        for target in [
            PlanarPoint::raw(1.0, 0.0),
            PlanarPoint::raw(0.0, 1.0),
            PlanarPoint::raw(-1.0, 0.0),
            PlanarPoint::raw(0.0, -1.0),
        ] {
            assert!(ns.points.iter().any(|p| p.dist(target) < 1e-9));
        }
    }

    #[test]
    fn nearest_grows_with_slack_on_seeded_queries() {
        // Monotonicity in slack, up to the coarser merge radius: every point
        // found with the smaller slack is represented within the larger
        // slack's merge distance.
        let c = circle_loop(512, 1.0);
        let sq = square_loop();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for curve in [&c, &sq] {
            for _ in 0..50 {
                let z = PlanarPoint::raw(rng.random_range(-0.9..0.9), rng.random_range(-0.9..0.9));
                let small = nearest_on_curve(z, curve, 0.01).unwrap();
                let large = nearest_on_curve(z, curve, 0.04).unwrap();
                assert!(large.points.len() >= 1);
                let cover = large.distance * 0.04 + 1e-12;
                for p in &small.points {
                    assert!(
                        large.points.iter().any(|q| q.dist(*p) <= cover),
                        "point {p:?} lost at larger slack"
                    );
                }
            }
        }
    }
}
