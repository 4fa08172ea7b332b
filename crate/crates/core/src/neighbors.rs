//! Pairwise classification of parameter pairs into the four neighbor types:
//! plain (equal image points), spherical (an empty disk through both),
//! visual (a clear segment between both), and topological (both on the
//! boundary of one complement component). The types form a chain: each level
//! implies the next.

use crate::complement::ComponentMap;
use crate::curves::SampledLoop;
use crate::geometry::{normalize_angle, segment_hits_curve, PlanarPoint, Segment};
use crate::{Error, Result};
use serde::Serialize;

/// Thresholds controlling the discretized predicates.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    /// Image points closer than this are considered equal.
    pub eps_img: f64,
    /// Obstacles within this radius of either endpoint are ignored.
    pub excl: f64,
    /// Extra obstacle samples per polyline edge for the disk test.
    pub densify: usize,
}

impl Tolerances {
    pub fn new(eps_img: f64, excl: f64, densify: usize) -> Result<Self> {
        if !(eps_img.is_finite() && eps_img > 0.0) {
            return Err(Error::invalid(format!("eps_img must be > 0, got {eps_img}")));
        }
        if !(excl.is_finite() && excl >= eps_img) {
            return Err(Error::invalid(format!(
                "excl must be >= eps_img ({eps_img}), got {excl}"
            )));
        }
        if densify < 1 {
            return Err(Error::invalid("densify must be >= 1".to_string()));
        }
        Ok(Tolerances {
            eps_img,
            excl,
            densify,
        })
    }

    /// Defaults scaled to the loop: one and a half discretization cells of
    /// slack for image equality and endpoint exclusion, four extra obstacle
    /// points per edge.
    pub fn for_loop(curve: &SampledLoop) -> Self {
        let h = curve.max_edge();
        Tolerances {
            eps_img: 1.5 * h,
            excl: 1.5 * h,
            densify: 4,
        }
    }

    /// The same tolerances for a uniformly scaled copy of the image.
    pub fn scaled(&self, s: f64) -> Self {
        Tolerances {
            eps_img: self.eps_img * s,
            excl: self.excl * s,
            densify: self.densify,
        }
    }

    /// Slack for disk-interior tests, in squared-distance units. Obstacles may
    /// intrude this much because polyline edges cut inside the smooth curve
    /// they sample (a sagitta of up to an edge length squared).
    /// Squared-distance slack for the empty-disk test (the squared image-
    /// equality threshold), tolerated as intrusion depth in squared units.
    pub fn disk_slack(&self) -> f64 {
        self.eps_img * self.eps_img
    }
}

/// The four neighbor types, strongest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NeighborKind {
    Plain,
    Spherical,
    Visual,
    Topological,
}

impl NeighborKind {
    pub const ALL: [NeighborKind; 4] = [
        NeighborKind::Plain,
        NeighborKind::Spherical,
        NeighborKind::Visual,
        NeighborKind::Topological,
    ];

    pub fn label(self) -> &'static str {
        match self {
            NeighborKind::Plain => "plain",
            NeighborKind::Spherical => "sph",
            NeighborKind::Visual => "vis",
            NeighborKind::Topological => "top",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(NeighborKind::Plain),
            "sph" | "spherical" => Ok(NeighborKind::Spherical),
            "vis" | "visual" => Ok(NeighborKind::Visual),
            "top" | "topological" => Ok(NeighborKind::Topological),
            other => Err(Error::invalid(format!("unknown neighbor kind '{other}'"))),
        }
    }
}

impl Serialize for NeighborKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> serde::Deserialize<'de> for NeighborKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        NeighborKind::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Classification of one parameter pair, with witnesses where available.
#[derive(Debug, Clone, Serialize)]
pub struct NeighborVerdict {
    pub plain: bool,
    pub spherical: bool,
    pub visual: bool,
    pub topological: bool,
    /// Witness empty disk (center, radius) for a spherical pair.
    pub disk: Option<(PlanarPoint, f64)>,
    /// Witness clear segment for a visual pair.
    pub clear_segment: Option<Segment>,
    /// Witness shared component id for a topological pair.
    pub shared_component: Option<i32>,
    pub notes: Vec<String>,
}

impl NeighborVerdict {
    pub fn has(&self, kind: NeighborKind) -> bool {
        match kind {
            NeighborKind::Plain => self.plain,
            NeighborKind::Spherical => self.spherical,
            NeighborKind::Visual => self.visual,
            NeighborKind::Topological => self.topological,
        }
    }
}

/// Obstacle points for the disk test: every curve sample plus `densify`
/// interpolated points per edge. Built once and shared across many pairs.
pub struct ObstacleSet {
    pts: Vec<PlanarPoint>,
}

impl ObstacleSet {
    pub fn build(curve: &SampledLoop, densify: usize) -> Self {
        let n = curve.len();
        let mut pts = Vec::with_capacity(n * (densify + 1));
        for i in 0..n {
            let a = curve.points()[i];
            let b = curve.points()[(i + 1) % n];
            for j in 0..=densify {
                pts.push(a.lerp(b, j as f64 / (densify + 1) as f64));
            }
        }
        ObstacleSet { pts }
    }

    /// Feasible interval of disk centers on the bisector of (p, q), or `None`.
    /// See `spherical_gap` for the contract.
    pub fn gap(
        &self,
        p: PlanarPoint,
        q: PlanarPoint,
        excl: f64,
        slack: f64,
    ) -> Option<(f64, f64)> {
        let m = p.lerp(q, 0.5);
        let (cx, cy) = (q.x - p.x, q.y - p.y);
        let len = cx.hypot(cy);
        let (ux, uy) = (-cy / len, cx / len);
        let r0sq = {
            let (dx, dy) = (p.x - m.x, p.y - m.y);
            dx * dx + dy * dy
        };
        let mut t_lo = f64::NEG_INFINITY;
        let mut t_hi = f64::INFINITY;
        for &x in &self.pts {
            if x.dist(p) <= excl || x.dist(q) <= excl {
                continue;
            }
            let (dx, dy) = (x.x - m.x, x.y - m.y);
            // |x - c(t)|^2 - |p - c(t)|^2 = a - b t  (affine in t).
            let a = dx * dx + dy * dy - r0sq;
            let b = 2.0 * (ux * dx + uy * dy);
            // The obstacle violates where a - b t < -slack.
            if b > 0.0 {
                t_hi = t_hi.min((a + slack) / b);
            } else if b < 0.0 {
                t_lo = t_lo.max((a + slack) / b);
            } else if a < -slack {
                return None; // inside every disk through p and q
            }
            if t_lo > t_hi {
                return None;
            }
        }
        Some((t_lo, t_hi))
    }

    /// Direct emptiness test of the disk through (p, q) centered at bisector
    /// offset `t`.
    fn disk_is_empty(&self, p: PlanarPoint, q: PlanarPoint, t: f64, excl: f64, slack: f64) -> bool {
        let m = p.lerp(q, 0.5);
        let (cx, cy) = (q.x - p.x, q.y - p.y);
        let len = cx.hypot(cy);
        let (ux, uy) = (-cy / len, cx / len);
        let c = PlanarPoint::raw(m.x + t * ux, m.y + t * uy);
        let rsq = {
            let (dx, dy) = (p.x - c.x, p.y - c.y);
            dx * dx + dy * dy
        };
        for &x in &self.pts {
            if x.dist(p) <= excl || x.dist(q) <= excl {
                continue;
            }
            let (dx, dy) = (x.x - c.x, x.y - c.y);
            if dx * dx + dy * dy < rsq - slack {
                return false;
            }
        }
        true
    }
}

/// Feasible interval of empty-disk centers for the pair (a, b).
///
/// Centers are parametrized as `c(t) = m + t*u` with `m` the image midpoint
/// and `u` the unit perpendicular of the image chord. Each obstacle forbids a
/// half-line of `t`; the returned closed interval (ends may be infinite) is
/// what survives. `None` means no disk through the two image points has an
/// obstacle-free interior. Obstacles within `tol.excl` of either image point
/// are ignored, and intrusions up to the squared image-equality threshold are
/// tolerated (polyline edges cut inside the curve they discretize).
pub fn spherical_gap(
    curve: &SampledLoop,
    a: f64,
    b: f64,
    tol: &Tolerances,
) -> Result<Option<(f64, f64)>> {
    let p = curve.eval(a);
    let q = curve.eval(b);
    if p.dist(q) <= tol.eps_img {
        return Err(Error::invalid(
            "plain pair, gap undefined (image points coincide)".to_string(),
        ));
    }
    let obs = ObstacleSet::build(curve, tol.densify);
    Ok(obs.gap(p, q, tol.excl, tol.disk_slack()))
}

/// True iff the pair is plain or the open segment between the image points
/// misses the curve (contacts within `tol.excl` of the endpoints excepted).
pub fn is_visual(curve: &SampledLoop, a: f64, b: f64, tol: &Tolerances) -> Result<bool> {
    let p = curve.eval(a);
    let q = curve.eval(b);
    if p.dist(q) <= tol.eps_img {
        return Ok(true);
    }
    Ok(!segment_hits_curve(Segment::new(p, q), curve, tol.excl))
}

/// Brute-force check of the empty-disk condition: samples `centers` points on
/// the bisector with offsets |t| <= radius_cap and tests each disk directly.
pub fn spherical_oracle(
    curve: &SampledLoop,
    a: f64,
    b: f64,
    tol: &Tolerances,
    centers: usize,
    radius_cap: f64,
) -> Result<bool> {
    if centers == 0 || !(radius_cap.is_finite() && radius_cap > 0.0) {
        return Err(Error::invalid(
            "oracle needs centers >= 1 and radius_cap > 0".to_string(),
        ));
    }
    let p = curve.eval(a);
    let q = curve.eval(b);
    if p.dist(q) <= tol.eps_img {
        return Ok(true);
    }
    let obs = ObstacleSet::build(curve, tol.densify);
    let slack = tol.disk_slack();
    for k in 0..centers {
        let t = radius_cap * (2.0 * (k as f64 + 0.5) / centers as f64 - 1.0);
        if obs.disk_is_empty(p, q, t, tol.excl, slack) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Full classification of the pair (a, b) into the four neighbor types.
///
/// Plain means the image points are within `eps_img`; a plain pair short-
/// circuits all four types. The chain plain => spherical => visual =>
/// topological is enforced in the verdict. Without a component map the
/// topological test cannot run; the verdict carries a note and falls back to
/// the visual answer.
pub fn classify_pair(
    curve: &SampledLoop,
    a: f64,
    b: f64,
    tol: &Tolerances,
    cmap: Option<&ComponentMap>,
) -> Result<NeighborVerdict> {
    let obs = ObstacleSet::build(curve, tol.densify);
    classify_with(curve, &obs, a, b, tol, cmap)
}

/// Classification sharing a prebuilt obstacle set (the hot path for grids
/// and bulk sweeps; `classify_pair` is the build-and-call convenience).
pub fn classify_with(
    curve: &SampledLoop,
    obs: &ObstacleSet,
    a: f64,
    b: f64,
    tol: &Tolerances,
    cmap: Option<&ComponentMap>,
) -> Result<NeighborVerdict> {
    let na = normalize_angle(a);
    let nb = normalize_angle(b);
    if na == nb {
        return Err(Error::invalid("identical parameters".to_string()));
    }
    // Canonical order makes the computation symmetric field by field.
    let (lo, hi) = if na <= nb { (na, nb) } else { (nb, na) };
    let p = curve.eval(lo);
    let q = curve.eval(hi);
    let diag = curve.bbox().diagonal();

    let plain = p.dist(q) <= tol.eps_img;
    let mut notes = Vec::new();

    // Spherical: plain short-circuits; otherwise the bisector interval.
    let mut disk = None;
    let spherical = if plain {
        disk = Some((p, 0.0));
        true
    } else {
        match obs.gap(p, q, tol.excl, tol.disk_slack()) {
            Some((t_lo, t_hi)) => {
                let t = match (t_lo.is_finite(), t_hi.is_finite()) {
                    (true, true) => 0.5 * (t_lo + t_hi),
                    (true, false) => t_lo + diag,
                    (false, true) => t_hi - diag,
                    (false, false) => 0.0,
                };
                let m = p.lerp(q, 0.5);
                let (cx, cy) = (q.x - p.x, q.y - p.y);
                let len = cx.hypot(cy);
                let c = PlanarPoint::raw(m.x - t * cy / len, m.y + t * cx / len);
                disk = Some((c, c.dist(p)));
                true
            }
            None => false,
        }
    };

    // Visual: plain short-circuits; otherwise the open segment must be clear.
    let visual_raw = if plain {
        true
    } else {
        !segment_hits_curve(Segment::new(p, q), curve, tol.excl)
    };
    let visual = spherical || visual_raw;
    let clear_segment = if visual {
        Some(Segment::new(p, q))
    } else {
        None
    };

    // Topological: both image points on the boundary of one component.
    let mut shared_component = None;
    let top_raw = match cmap {
        Some(cm) => {
            let radius = cm.probe_radius();
            let ids_a = cm.ids_near(p, radius);
            let ids_b = cm.ids_near(q, radius);
            shared_component = ids_a.iter().copied().find(|id| ids_b.contains(id));
            shared_component.is_some()
        }
        None => {
            notes.push("component map absent".to_string());
            false
        }
    };
    let topological = visual || top_raw;

    Ok(NeighborVerdict {
        plain,
        spherical,
        visual,
        topological,
        disk,
        clear_segment,
        shared_component,
        notes,
    })
}
