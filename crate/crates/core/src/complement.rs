//! Raster analysis of the image complement: connected components with winding
//! indices, inscribed disks with multiple separated tangencies ("good disks"),
//! chords between tangency points, ruled chord sequences, chord-side
//! positivity, and the winding-increment relation across a point of the curve.

use crate::curves::SampledLoop;
use crate::geometry::{
    cross, distance_to_loop, project_to_segment, winding_number, PlanarPoint, Segment,
};
use crate::{Error, Result};
use serde::Serialize;
use std::collections::{HashMap, HashSet, VecDeque};
use std::f64::consts::TAU;
use std::path::Path;

/// Default window margin around the curve bbox, as a fraction of its extent.
pub const DEFAULT_MARGIN: f64 = 0.2;
/// Default raster side.
pub const DEFAULT_RASTER: usize = 256;
/// Minimum bearing separation between tangency points of one good disk.
pub const DEFAULT_THETA_MIN: f64 = std::f64::consts::PI / 6.0;
/// Default near-tie slack for tangency detection.
pub const DEFAULT_SLACK: f64 = 0.02;
/// Candidate centers examined per component when hunting good disks.
pub const DEFAULT_CANDIDATES: usize = 256;
/// Split fragments smaller than this many cells are raster dust, not parts.
const DUST_CELLS: usize = 4;
/// Boundary-proximity radius in cell diagonals (probe and endpoint checks).
pub const BOUNDARY_CELL_DIAGONALS: f64 = 2.5;

/// Raster component map of the complement of a curve's image.
///
/// Cells within one cell diagonal of the polyline form the band (id 0); the
/// remaining cells are 4-connected components with ids from 1, labelled in
/// row-major discovery order. Each component carries the winding index of the
/// curve around its deepest cell.
#[derive(Debug, Clone)]
pub struct ComponentMap {
    r: usize,
    origin: PlanarPoint,
    cell: f64,
    ids: Vec<i32>,
    depth: Vec<u32>,
    index_of: Vec<i32>,
    cells_of: Vec<usize>,
    unbounded: i32,
}

/// Builds the component map on an `r x r` raster over the curve bbox expanded
/// by `margin` (fraction of the larger bbox extent) on every side.
pub fn build_component_map(curve: &SampledLoop, r: usize, margin: f64) -> Result<ComponentMap> {
    if !(32..=8192).contains(&r) {
        return Err(Error::invalid(format!(
            "raster resolution {r} outside supported range 32..=8192"
        )));
    }
    if !(margin.is_finite() && margin > 0.0) {
        return Err(Error::invalid(format!("margin must be > 0, got {margin}")));
    }
    let bbox = curve.bbox();
    let extent = (bbox.max.x - bbox.min.x).max(bbox.max.y - bbox.min.y);
    if extent <= 0.0 {
        return Err(Error::geometry("curve image has zero extent".to_string()));
    }
    let side = extent * (1.0 + 2.0 * margin);
    let center = bbox.center();
    let origin = PlanarPoint::raw(center.x - side / 2.0, center.y - side / 2.0);
    let cell = side / r as f64;
    let band_radius = cell * std::f64::consts::SQRT_2;

    // Mark the curve band: cell centers within one cell diagonal of an edge.
    let mut ids = vec![-1i32; r * r];
    let cell_center = |ix: usize, iy: usize| {
        PlanarPoint::raw(
            origin.x + (ix as f64 + 0.5) * cell,
            origin.y + (iy as f64 + 0.5) * cell,
        )
    };
    for (a, b) in curve.edges() {
        let lo_x = ((a.x.min(b.x) - band_radius - origin.x) / cell).floor().max(0.0) as usize;
        let hi_x = (((a.x.max(b.x) + band_radius - origin.x) / cell).ceil() as usize).min(r - 1);
        let lo_y = ((a.y.min(b.y) - band_radius - origin.y) / cell).floor().max(0.0) as usize;
        let hi_y = (((a.y.max(b.y) + band_radius - origin.y) / cell).ceil() as usize).min(r - 1);
        for iy in lo_y..=hi_y {
            for ix in lo_x..=hi_x {
                let k = iy * r + ix;
                if ids[k] == 0 {
                    continue;
                }
                let (_, cp) = project_to_segment(cell_center(ix, iy), a, b);
                if cp.dist(cell_center(ix, iy)) <= band_radius {
                    ids[k] = 0;
                }
            }
        }
    }

    // Label 4-connected components of the free cells.
    let mut next_id = 1i32;
    let mut queue = VecDeque::new();
    for start in 0..r * r {
        if ids[start] != -1 {
            continue;
        }
        let id = next_id;
        next_id += 1;
        ids[start] = id;
        queue.push_back(start);
        while let Some(k) = queue.pop_front() {
            let (ix, iy) = (k % r, k / r);
            let mut push = |nk: usize| {
                if ids[nk] == -1 {
                    ids[nk] = id;
                    queue.push_back(nk);
                }
            };
            if ix > 0 {
                push(k - 1);
            }
            if ix + 1 < r {
                push(k + 1);
            }
            if iy > 0 {
                push(k - r);
            }
            if iy + 1 < r {
                push(k + r);
            }
        }
    }
    let id_count = next_id as usize;

    // Depth transform: BFS distance (in cells) from the band.
    let mut depth = vec![u32::MAX; r * r];
    let mut queue = VecDeque::new();
    for k in 0..r * r {
        if ids[k] == 0 {
            depth[k] = 0;
            queue.push_back(k);
        }
    }
    if queue.is_empty() {
        return Err(Error::geometry(
            "curve band missed the raster entirely".to_string(),
        ));
    }
    while let Some(k) = queue.pop_front() {
        let (ix, iy) = (k % r, k / r);
        let d = depth[k] + 1;
        let mut push = |nk: usize| {
            if depth[nk] == u32::MAX {
                depth[nk] = d;
                queue.push_back(nk);
            }
        };
        if ix > 0 {
            push(k - 1);
        }
        if ix + 1 < r {
            push(k + 1);
        }
        if iy > 0 {
            push(k - r);
        }
        if iy + 1 < r {
            push(k + r);
        }
    }

    // Deepest cell per component, cell counts, winding indices.
    let mut deepest: Vec<(u32, usize)> = vec![(0, usize::MAX); id_count];
    let mut cells_of = vec![0usize; id_count];
    for k in 0..r * r {
        let id = ids[k] as usize;
        cells_of[id] += 1;
        if id != 0 {
            let d = depth[k];
            if deepest[id].1 == usize::MAX || d > deepest[id].0 {
                deepest[id] = (d, k);
            }
        }
    }
    let mut index_of = vec![0i32; id_count];
    for id in 1..id_count {
        let k = deepest[id].1;
        let p = cell_center(k % r, k / r);
        index_of[id] = winding_number(curve, p)?;
    }

    let unbounded = ids[0];
    if unbounded == 0 {
        return Err(Error::geometry(
            "margin too small: curve band reaches the raster corner".to_string(),
        ));
    }
    if index_of[unbounded as usize] != 0 {
        return Err(Error::geometry(format!(
            "unbounded component has nonzero winding index {}",
            index_of[unbounded as usize]
        )));
    }

    Ok(ComponentMap {
        r,
        origin,
        cell,
        ids,
        depth,
        index_of,
        cells_of,
        unbounded,
    })
}

impl ComponentMap {
    pub fn raster_size(&self) -> usize {
        self.r
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    /// Ids of all components, ascending (excludes the band id 0).
    pub fn component_ids(&self) -> Vec<i32> {
        (1..self.index_of.len() as i32).collect()
    }

    pub fn unbounded_id(&self) -> i32 {
        self.unbounded
    }

    /// Winding index of the curve around the component's deepest cell.
    pub fn index_of(&self, id: i32) -> Option<i32> {
        if id >= 1 && (id as usize) < self.index_of.len() {
            Some(self.index_of[id as usize])
        } else {
            None
        }
    }

    pub fn cell_count(&self, id: i32) -> usize {
        self.cells_of.get(id as usize).copied().unwrap_or(0)
    }

    pub(crate) fn cell_center(&self, ix: usize, iy: usize) -> PlanarPoint {
        PlanarPoint::raw(
            self.origin.x + (ix as f64 + 0.5) * self.cell,
            self.origin.y + (iy as f64 + 0.5) * self.cell,
        )
    }

    fn cell_of_point(&self, p: PlanarPoint) -> Option<usize> {
        let fx = (p.x - self.origin.x) / self.cell;
        let fy = (p.y - self.origin.y) / self.cell;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (ix, iy) = (fx as usize, fy as usize);
        if ix >= self.r || iy >= self.r {
            return None;
        }
        Some(iy * self.r + ix)
    }

    /// Component id under a point; `None` outside the raster or on the band.
    pub fn id_at(&self, p: PlanarPoint) -> Option<i32> {
        let k = self.cell_of_point(p)?;
        if self.ids[k] == 0 {
            None
        } else {
            Some(self.ids[k])
        }
    }

    /// Sorted ids of components having a cell center within `radius` of `p`.
    pub fn ids_near(&self, p: PlanarPoint, radius: f64) -> Vec<i32> {
        let mut out = Vec::new();
        let span = (radius / self.cell).ceil() as isize + 1;
        let fx = ((p.x - self.origin.x) / self.cell) as isize;
        let fy = ((p.y - self.origin.y) / self.cell) as isize;
        for dy in -span..=span {
            for dx in -span..=span {
                let (ix, iy) = (fx + dx, fy + dy);
                if ix < 0 || iy < 0 || ix >= self.r as isize || iy >= self.r as isize {
                    continue;
                }
                let k = iy as usize * self.r + ix as usize;
                let id = self.ids[k];
                if id > 0
                    && self.cell_center(ix as usize, iy as usize).dist(p) <= radius
                    && !out.contains(&id)
                {
                    out.push(id);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Default probe radius for boundary-proximity queries.
    pub fn probe_radius(&self) -> f64 {
        BOUNDARY_CELL_DIAGONALS * self.cell * std::f64::consts::SQRT_2
    }

    /// Linear cell indices of one component.
    pub fn cells_of(&self, id: i32) -> Vec<usize> {
        (0..self.r * self.r)
            .filter(|&k| self.ids[k] == id)
            .collect()
    }

    /// Writes the id raster as a binary PGM (P5), ids reduced modulo 251.
    pub fn export_pgm(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(self.r * self.r + 32);
        buf.extend_from_slice(format!("P5\n{} {}\n255\n", self.r, self.r).as_bytes());
        for iy in (0..self.r).rev() {
            for ix in 0..self.r {
                buf.push((self.ids[iy * self.r + ix] % 251) as u8);
            }
        }
        std::fs::write(path, buf)?;
        Ok(())
    }
}

/// Bounded component with the largest winding index; ties resolved by larger
/// cell count, then smaller id.
pub fn max_index_component(cmap: &ComponentMap) -> Result<i32> {
    let mut best: Option<i32> = None;
    for id in cmap.component_ids() {
        if id == cmap.unbounded_id() {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => {
                let (bi, bc) = (cmap.index_of(b).unwrap(), cmap.cell_count(b));
                let (ci, cc) = (cmap.index_of(id).unwrap(), cmap.cell_count(id));
                ci > bi || (ci == bi && (cc > bc || (cc == bc && id < b)))
            }
        };
        if better {
            best = Some(id);
        }
    }
    best.ok_or_else(|| Error::construction("no bounded complement components".to_string()))
}

/// An inscribed disk touching the curve at two or more well-separated points.
#[derive(Debug, Clone, Serialize)]
pub struct GoodDisk {
    pub center: PlanarPoint,
    pub radius: f64,
    pub tangents: Vec<PlanarPoint>,
    pub bearings: Vec<f64>,
    pub component: i32,
}

/// Nudges a candidate disk center onto the locus of two-sided contact.
///
/// A raster cell center rarely sits exactly equidistant from two boundary
/// strands, so its nearest-point set often shows a single tangency even when a
/// two-tangency center lies a fraction of a cell away. Each pass walks
/// directly away from the lone contact (where clearance grows) and watches the
/// bearing of the nearest contact; once that bearing has swung by `theta_min`,
/// the crossing of the equidistant locus lies inside the step and bisection
/// pins it down along the walk line. The line generally misses the exact
/// equidistant point sideways (contact bearings are quantized to polyline
/// feet), so the passes repeat from the landing point with a fresh bearing;
/// the sideways miss shrinks geometrically. Each walk leg is capped at two
/// cells, so candidates with one-sided clearance throughout are dropped
/// rather than migrated.
fn settle_two_sided(
    curve: &SampledLoop,
    start: PlanarPoint,
    cell: f64,
    theta_min: f64,
    slack: f64,
) -> Result<Option<(PlanarPoint, crate::geometry::NearestSet)>> {
    let separated = |ns: &crate::geometry::NearestSet| -> bool {
        for i in 0..ns.bearings.len() {
            for j in i + 1..ns.bearings.len() {
                let d = (ns.bearings[i] - ns.bearings[j]).abs();
                if d.min(TAU - d) >= theta_min {
                    return true;
                }
            }
        }
        false
    };
    let circ = |a: f64, b: f64| {
        let d = (a - b).abs();
        d.min(TAU - d)
    };
    let tol = 1e-12 * (1.0 + curve.bbox().diagonal());
    let mut p = start;
    for _ in 0..12 {
        let ns0 = crate::geometry::nearest_on_curve(p, curve, slack)?;
        if separated(&ns0) {
            return Ok(Some((p, ns0)));
        }
        let beta0 = ns0.bearings[0];
        let u = (-beta0.cos(), -beta0.sin());
        let at = |t: f64| PlanarPoint::raw(p.x + t * u.0, p.y + t * u.1);
        let mut lo = 0.0f64;
        let mut t = 0.25 * cell;
        let mut hi = None;
        while t <= 2.0 * cell {
            let ns = crate::geometry::nearest_on_curve(at(t), curve, slack)?;
            if separated(&ns) {
                return Ok(Some((at(t), ns)));
            }
            if circ(ns.bearings[0], beta0) >= theta_min {
                hi = Some(t);
                break;
            }
            lo = t;
            t *= 2.0;
        }
        let Some(mut hi) = hi else {
            return Ok(None); // one-sided clearance throughout the cap
        };
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let ns = crate::geometry::nearest_on_curve(at(mid), curve, slack)?;
            if separated(&ns) {
                return Ok(Some((at(mid), ns)));
            }
            if circ(ns.bearings[0], beta0) >= theta_min {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        p = at(0.5 * (lo + hi));
    }
    let ns = crate::geometry::nearest_on_curve(p, curve, slack)?;
    Ok(if separated(&ns) { Some((p, ns)) } else { None })
}

/// Scans up to `candidates` deepest cells of component `comp`, settles each
/// onto a nearby two-sided contact point, and keeps those whose nearest-point
/// set contains at least two tangencies with pairwise bearing separation
/// `theta_min` or more. Disks closer than one cell to an already kept disk
/// are dropped.
pub fn find_good_disks(
    cmap: &ComponentMap,
    curve: &SampledLoop,
    comp: i32,
    candidates: usize,
    theta_min: f64,
    slack: f64,
) -> Result<Vec<GoodDisk>> {
    if cmap.index_of(comp).is_none() {
        return Err(Error::invalid(format!("unknown component id {comp}")));
    }
    let mut cells = cmap.cells_of(comp);
    if cells.is_empty() {
        return Err(Error::invalid(format!("component {comp} has no cells")));
    }
    cells.sort_by(|&a, &b| cmap.depth[b].cmp(&cmap.depth[a]).then(a.cmp(&b)));
    cells.truncate(candidates);

    let mut disks: Vec<GoodDisk> = Vec::new();
    for k in cells {
        let seed = cmap.cell_center(k % cmap.r, k / cmap.r);
        if disks.iter().any(|d| d.center.dist(seed) < cmap.cell) {
            continue;
        }
        let Some((center, ns)) = settle_two_sided(curve, seed, cmap.cell, theta_min, slack)?
        else {
            continue;
        };
        if disks.iter().any(|d| d.center.dist(center) < cmap.cell) {
            continue;
        }
        // Greedy selection of bearing-separated tangencies, closest first
        // (the nearest set is already ordered by distance).
        let mut keep_pts: Vec<PlanarPoint> = Vec::new();
        let mut keep_brs: Vec<f64> = Vec::new();
        for (p, &b) in ns.points.iter().zip(&ns.bearings) {
            let separated = keep_brs.iter().all(|&kb| {
                let d = (kb - b).abs();
                d.min(TAU - d) >= theta_min
            });
            if separated {
                keep_pts.push(*p);
                keep_brs.push(b);
            }
        }
        if keep_pts.len() >= 2 {
            disks.push(GoodDisk {
                center,
                radius: ns.distance,
                tangents: keep_pts,
                bearings: keep_brs,
                component: comp,
            });
        }
    }
    Ok(disks)
}

/// A chord of a good disk between two of its tangency points.
#[derive(Debug, Clone, Serialize)]
pub struct GoodChord {
    pub endpoints: (PlanarPoint, PlanarPoint),
    pub disk_center: PlanarPoint,
    pub disk_radius: f64,
    pub component: i32,
    /// Curve parameters mapping onto each endpoint; the tangency parameter
    /// (whose image is the endpoint exactly) comes first.
    pub preimages: (Vec<f64>, Vec<f64>),
    /// Circular bearing separation of the two tangency directions.
    pub separation: f64,
}

impl GoodChord {
    pub fn segment(&self) -> Segment {
        Segment::new(self.endpoints.0, self.endpoints.1)
    }

    pub fn midpoint(&self) -> PlanarPoint {
        self.segment().midpoint()
    }
}

/// Index of the polyline edge nearest to `target`, with the projection foot
/// parameters: (edge index, fraction along the edge, distance).
fn nearest_edge(curve: &SampledLoop, target: PlanarPoint) -> (usize, f64, f64) {
    let n = curve.len();
    let mut best = (0usize, 0.0f64, f64::INFINITY);
    for i in 0..n {
        let a = curve.points()[i];
        let b = curve.points()[(i + 1) % n];
        let (t, cp) = project_to_segment(target, a, b);
        let d = cp.dist(target);
        if d < best.2 {
            best = (i, t, d);
        }
    }
    best
}

/// Curve parameter of the point at fraction `t` along edge `i` (seam-aware).
fn edge_param(curve: &SampledLoop, i: usize, t: f64) -> f64 {
    let n = curve.len();
    let t0 = curve.params()[i];
    let t1 = if i + 1 == n {
        curve.params()[0] + TAU
    } else {
        curve.params()[i + 1]
    };
    let p = t0 + t * (t1 - t0);
    if p >= TAU {
        p - TAU
    } else {
        p
    }
}

/// A refined bitangent disk: center equidistant from two polyline edges with
/// perpendicular feet interior to both, and no other part of the curve closer.
struct Bitangent {
    center: PlanarPoint,
    radius: f64,
    feet: (PlanarPoint, PlanarPoint),
    params: (f64, f64),
    separation: f64,
}

/// Snaps an approximate two-tangency configuration (center `c0`, tangency
/// estimates `f1`, `f2`) onto an exact bitangent disk of the polyline: the
/// center moves to the bisector of the two touched edge lines, the feet become
/// exact perpendicular projections, and the disk is accepted only if nothing
/// else on the curve comes closer than its radius. This makes the chord's
/// endpoint pair admit an exactly empty disk instead of one perturbed by
/// raster cell offsets.
///
/// Projecting onto the bisector fixes only one direction; when the two edges
/// are nearly antiparallel (near-diameter pairs), the center can still carry a
/// sideways offset that lets a third stretch of curve intrude. Distances to
/// edge lines are affine along the bisector, so a few pivot steps slide the
/// center by the minimal amount that clears the worst intruder.
fn refine_bitangent(
    curve: &SampledLoop,
    c0: PlanarPoint,
    f1: PlanarPoint,
    f2: PlanarPoint,
    max_shift: f64,
) -> Option<Bitangent> {
    let (e1, _, d1) = nearest_edge(curve, f1);
    let (e2, _, d2) = nearest_edge(curve, f2);
    let scale = curve.bbox().diagonal();
    if e1 == e2 || d1 > 1e-6 * scale || d2 > 1e-6 * scale {
        return None;
    }
    let n = curve.len();
    let edge = |i: usize| (curve.points()[i], curve.points()[(i + 1) % n]);
    let (a1, b1) = edge(e1);
    let (a2, b2) = edge(e2);
    let unit_normal_toward = |a: PlanarPoint, b: PlanarPoint, target: PlanarPoint| {
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let len = dx.hypot(dy);
        let mut nrm = (-dy / len, dx / len);
        if nrm.0 * (target.x - a.x) + nrm.1 * (target.y - a.y) < 0.0 {
            nrm = (-nrm.0, -nrm.1);
        }
        nrm
    };
    let n1 = unit_normal_toward(a1, b1, c0);
    let n2 = unit_normal_toward(a2, b2, c0);
    let g = (n1.0 - n2.0, n1.1 - n2.1);
    let g2 = g.0 * g.0 + g.1 * g.1;
    if g2 < 1e-6 {
        return None; // near-parallel normals: no stable bisector nearby
    }
    // Project c0 onto { x : dist(x, line1) = dist(x, line2) }.
    let rhs = (n1.0 * a1.x + n1.1 * a1.y) - (n2.0 * a2.x + n2.1 * a2.y);
    let err = (g.0 * c0.x + g.1 * c0.y) - rhs;
    let mut center = PlanarPoint::raw(c0.x - err * g.0 / g2, c0.y - err * g.1 / g2);
    let radius_at = |c: PlanarPoint| n1.0 * (c.x - a1.x) + n1.1 * (c.y - a1.y);
    let mut radius = radius_at(center);
    if !(radius.is_finite() && radius > 0.0) {
        return None;
    }
    // Minimal slide along the bisector direction until nothing intrudes.
    let gl = g2.sqrt();
    let v = (-g.1 / gl, g.0 / gl);
    let r_slope = n1.0 * v.0 + n1.1 * v.1;
    let tol_empty = 1e-12 * scale;
    for _ in 0..8 {
        let (ew, tw, dw) = nearest_edge(curve, center);
        if dw >= radius - tol_empty {
            break;
        }
        let (aw, bw) = edge(ew);
        let _ = tw;
        let nw = unit_normal_toward(aw, bw, center);
        // dist(center + s*v, worst line) grows by s*(nw . v); radius by s*r_slope.
        let denom = r_slope - (nw.0 * v.0 + nw.1 * v.1);
        if denom.abs() < 1e-9 {
            return None;
        }
        let s = (dw - radius) / denom;
        center = PlanarPoint::raw(center.x + s * v.0, center.y + s * v.1);
        radius = radius_at(center);
        if !(radius.is_finite() && radius > 0.0) {
            return None;
        }
    }
    if center.dist(c0) > max_shift {
        return None;
    }
    // Perpendicular feet, required to land strictly inside their edges.
    let foot = |a: PlanarPoint, b: PlanarPoint, nrm: (f64, f64)| {
        let f = PlanarPoint::raw(center.x - radius * nrm.0, center.y - radius * nrm.1);
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let len2 = dx * dx + dy * dy;
        let t = ((f.x - a.x) * dx + (f.y - a.y) * dy) / len2;
        (f, t)
    };
    let (f1r, t1) = foot(a1, b1, n1);
    let (f2r, t2) = foot(a2, b2, n2);
    let inner = 1e-6;
    if !(inner..=1.0 - inner).contains(&t1) || !(inner..=1.0 - inner).contains(&t2) {
        return None;
    }
    // Global emptiness: nothing else strictly inside the disk.
    if distance_to_loop(center, curve) < radius - tol_empty {
        return None;
    }
    let br = |f: PlanarPoint| (f.y - center.y).atan2(f.x - center.x);
    let d = (br(f1r) - br(f2r)).abs();
    Some(Bitangent {
        center,
        radius,
        feet: (f1r, f2r),
        params: (edge_param(curve, e1, t1), edge_param(curve, e2, t2)),
        separation: d.min(TAU - d),
    })
}

/// Curve parameters whose image lies within `excl` of `target`: consecutive
/// sample runs are clustered, each contributing its best projection parameter.
fn preimage_params(curve: &SampledLoop, target: PlanarPoint, excl: f64) -> Vec<f64> {
    let n = curve.len();
    let near: Vec<bool> = curve
        .points()
        .iter()
        .map(|p| p.dist(target) <= excl)
        .collect();
    if near.iter().all(|&b| !b) {
        return Vec::new();
    }
    let cluster_param = |members: &[usize]| -> f64 {
        // Project onto the edges incident to the cluster's samples.
        let mut best = (f64::INFINITY, curve.params()[members[0]]);
        for &m in members {
            for e in [(m + n - 1) % n, m] {
                let a = curve.points()[e];
                let b = curve.points()[(e + 1) % n];
                let (t, cp) = project_to_segment(target, a, b);
                let d = cp.dist(target);
                if d < best.0 {
                    best = (d, edge_param(curve, e, t));
                }
            }
        }
        best.1
    };
    if near.iter().all(|&b| b) {
        let all: Vec<usize> = (0..n).collect();
        return vec![cluster_param(&all)];
    }
    let mut out = Vec::new();
    let mut start = 0;
    while near[start] {
        start += 1;
    }
    let mut i = start;
    loop {
        let next = (i + 1) % n;
        if near[next] {
            let mut members = vec![next];
            let mut j = next;
            while near[(j + 1) % n] {
                j = (j + 1) % n;
                members.push(j);
            }
            out.push(cluster_param(&members));
            i = *members.last().unwrap();
        }
        i = (i + 1) % n;
        if i == start {
            break;
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Preimage list for a chord endpoint: the exact tangency parameter first,
/// then projection parameters of any other curve strands passing within
/// `excl` of the endpoint.
fn endpoint_preimages(
    curve: &SampledLoop,
    endpoint: PlanarPoint,
    tangency_param: f64,
    excl: f64,
) -> Vec<f64> {
    let mut out = vec![tangency_param];
    for t in preimage_params(curve, endpoint, excl) {
        let d = (t - tangency_param).abs();
        if d.min(TAU - d) < 4.0 * excl {
            continue; // parameter-local to the tangency strand itself
        }
        out.push(t);
    }
    out
}

fn chord_from_bitangent(curve: &SampledLoop, bt: &Bitangent, comp: i32) -> GoodChord {
    let excl = 1.5 * curve.max_edge();
    GoodChord {
        endpoints: (bt.feet.0, bt.feet.1),
        disk_center: bt.center,
        disk_radius: bt.radius,
        component: comp,
        preimages: (
            endpoint_preimages(curve, bt.feet.0, bt.params.0, excl),
            endpoint_preimages(curve, bt.feet.1, bt.params.1, excl),
        ),
        separation: bt.separation,
    }
}

/// Builds chords from each disk's widest-separated tangency pairs (up to three
/// per disk), refining each pair onto an exact bitangent disk of the polyline.
/// Pairs that cannot be refined (feet near vertices, or a third strand closer
/// than the refined radius) are dropped.
pub fn good_chords(disks: &[GoodDisk], curve: &SampledLoop) -> Vec<GoodChord> {
    let mut out = Vec::new();
    for disk in disks {
        let m = disk.tangents.len();
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let d = (disk.bearings[i] - disk.bearings[j]).abs();
                pairs.push((d.min(TAU - d), i, j));
            }
        }
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut kept = 0;
        for &(_, i, j) in pairs.iter() {
            if kept == 3 {
                break;
            }
            let max_shift = 4.0 * disk.radius.max(curve.max_edge());
            if let Some(bt) = refine_bitangent(
                curve,
                disk.center,
                disk.tangents[i],
                disk.tangents[j],
                max_shift,
            ) {
                if bt.separation >= DEFAULT_THETA_MIN {
                    out.push(chord_from_bitangent(curve, &bt, disk.component));
                    kept += 1;
                }
            }
        }
        if kept == 0 && m >= 2 {
            log::warn!(
                "disk at ({:.3},{:.3}) produced no refinable chord",
                disk.center.x,
                disk.center.y
            );
        }
    }
    out
}

/// Flood labels of `comp`'s cells with those near the chord blocked out.
/// Returns (labels, number of parts with at least `DUST_CELLS` cells).
fn split_by_chord(cmap: &ComponentMap, comp: i32, chord: Segment) -> (HashMap<usize, u32>, usize) {
    let r = cmap.r;
    let block_radius = cmap.cell * std::f64::consts::SQRT_2;
    let mut labels: HashMap<usize, u32> = HashMap::new();
    let cells = cmap.cells_of(comp);
    let blocked = |k: usize| {
        let c = cmap.cell_center(k % r, k / r);
        let (_, cp) = project_to_segment(c, chord.p, chord.q);
        cp.dist(c) <= block_radius
    };
    let mut label = 0u32;
    let mut real_parts = 0usize;
    for &start in &cells {
        if labels.contains_key(&start) || blocked(start) {
            continue;
        }
        label += 1;
        let mut size = 0usize;
        let mut queue = VecDeque::new();
        labels.insert(start, label);
        queue.push_back(start);
        while let Some(k) = queue.pop_front() {
            size += 1;
            let (ix, iy) = (k % r, k / r);
            let mut push = |nk: usize| {
                if cmap.ids[nk] == comp && !labels.contains_key(&nk) && !blocked(nk) {
                    labels.insert(nk, label);
                    queue.push_back(nk);
                }
            };
            if ix > 0 {
                push(k - 1);
            }
            if ix + 1 < r {
                push(k + 1);
            }
            if iy > 0 {
                push(k - r);
            }
            if iy + 1 < r {
                push(k + r);
            }
        }
        if size >= DUST_CELLS {
            real_parts += 1;
        }
    }
    (labels, real_parts)
}

fn label_at(cmap: &ComponentMap, labels: &HashMap<usize, u32>, p: PlanarPoint) -> Option<u32> {
    let k = cmap.cell_of_point(p)?;
    labels.get(&k).copied()
}

/// Checks the ruled property: every interior chord splits the component into
/// exactly two parts (ignoring raster dust), with the previous chord's
/// midpoint in one part and the next chord's midpoint in the other.
pub fn verify_ruled(chords: &[GoodChord], cmap: &ComponentMap) -> Result<bool> {
    if chords.len() < 3 {
        return Err(Error::invalid(format!(
            "ruled verification needs at least 3 chords, got {}",
            chords.len()
        )));
    }
    let comp = chords[0].component;
    if chords.iter().any(|c| c.component != comp) {
        return Err(Error::invalid(
            "chords belong to different components".to_string(),
        ));
    }
    // Endpoints must sit on the component's boundary (within a couple of
    // cells of a component cell; they are on the curve band itself).
    for c in chords {
        for p in [c.endpoints.0, c.endpoints.1] {
            if !cmap.ids_near(p, cmap.probe_radius()).contains(&comp) {
                return Err(Error::invalid(format!(
                    "chord endpoint ({:.4},{:.4}) not on component {comp} boundary",
                    p.x, p.y
                )));
            }
        }
    }
    for k in 1..chords.len() - 1 {
        let (labels, parts) = split_by_chord(cmap, comp, chords[k].segment());
        if parts != 2 {
            return Ok(false);
        }
        let before = label_at(cmap, &labels, chords[k - 1].midpoint());
        let after = label_at(cmap, &labels, chords[k + 1].midpoint());
        match (before, after) {
            (Some(a), Some(b)) if a != b => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

fn segments_cross(a: Segment, b: Segment, tol: f64) -> bool {
    // Proper or touching intersection via orientation signs with tolerance.
    let d1 = cross(a.q.x - a.p.x, a.q.y - a.p.y, b.p.x - a.p.x, b.p.y - a.p.y);
    let d2 = cross(a.q.x - a.p.x, a.q.y - a.p.y, b.q.x - a.p.x, b.q.y - a.p.y);
    let d3 = cross(b.q.x - b.p.x, b.q.y - b.p.y, a.p.x - b.p.x, a.p.y - b.p.y);
    let d4 = cross(b.q.x - b.p.x, b.q.y - b.p.y, a.q.x - b.p.x, a.q.y - b.p.y);
    let opp = |x: f64, y: f64| (x > tol && y < -tol) || (x < -tol && y > tol);
    if opp(d1, d2) && opp(d3, d4) {
        return true;
    }
    // Near-collinear or touching cases: fall back to distance checks.
    let close = |p: PlanarPoint, s: Segment| {
        let (_, cp) = project_to_segment(p, s.p, s.q);
        cp.dist(p) <= tol
    };
    close(b.p, a) || close(b.q, a) || close(a.p, b) || close(a.q, b)
}

/// Greedily assembles up to `len` pairwise non-crossing good chords of `comp`,
/// swept along the component's principal axis, such that each chord separates
/// its predecessor's midpoint from its successor's (the ruled property).
pub fn build_ruled_sequence(
    cmap: &ComponentMap,
    curve: &SampledLoop,
    comp: i32,
    len: usize,
) -> Result<Vec<GoodChord>> {
    if len < 3 {
        return Err(Error::invalid(format!(
            "ruled sequence length must be >= 3, got {len}"
        )));
    }
    let disks = find_good_disks(
        cmap,
        curve,
        comp,
        DEFAULT_CANDIDATES,
        DEFAULT_THETA_MIN,
        DEFAULT_SLACK,
    )?;
    if disks.is_empty() {
        return Err(Error::construction(format!(
            "no good disks found in component {comp}"
        )));
    }
    // Every refinable tangency pair of every disk is a candidate chord,
    // deduplicated by the pair of polyline edges carrying the feet.
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut candidates: Vec<GoodChord> = Vec::new();
    for disk in &disks {
        let m = disk.tangents.len();
        for i in 0..m {
            for j in i + 1..m {
                let max_shift = 4.0 * disk.radius.max(curve.max_edge());
                let Some(bt) = refine_bitangent(
                    curve,
                    disk.center,
                    disk.tangents[i],
                    disk.tangents[j],
                    max_shift,
                ) else {
                    continue;
                };
                if bt.separation < DEFAULT_THETA_MIN {
                    continue;
                }
                let (ea, _, _) = nearest_edge(curve, bt.feet.0);
                let (eb, _, _) = nearest_edge(curve, bt.feet.1);
                let key = (ea.min(eb), ea.max(eb));
                if !seen.insert(key) {
                    continue;
                }
                candidates.push(chord_from_bitangent(curve, &bt, comp));
            }
        }
    }
    if candidates.is_empty() {
        return Err(Error::construction(format!(
            "no refinable chords found in component {comp}"
        )));
    }

    // Robustness filter: every cross pairing of the two endpoints' preimage
    // parameters must itself admit an empty disk through its image points.
    // A tangency that also catches a nearby strand (so one endpoint has a
    // preimage whose pairing with the far side is blocked) is discarded.
    let ntol = crate::neighbors::Tolerances::for_loop(curve);
    let obs = crate::neighbors::ObstacleSet::build(curve, ntol.densify);
    candidates.retain(|c| {
        c.preimages.0.iter().all(|&a| {
            c.preimages.1.iter().all(|&b| {
                let p = curve.eval(a);
                let q = curve.eval(b);
                p.dist(q) > ntol.eps_img
                    && obs.gap(p, q, ntol.excl, ntol.disk_slack()).is_some()
            })
        })
    });
    if candidates.is_empty() {
        return Err(Error::construction(format!(
            "no chords in component {comp} whose preimage pairs all admit empty disks"
        )));
    }

    // Principal axes of the component's cells.
    let cells = cmap.cells_of(comp);
    let centers: Vec<PlanarPoint> = cells
        .iter()
        .map(|&k| cmap.cell_center(k % cmap.r, k / cmap.r))
        .collect();
    let nc = centers.len() as f64;
    let (mx, my) = centers
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    let (mx, my) = (mx / nc, my / nc);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in &centers {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
        syy += (p.y - my) * (p.y - my);
    }
    let axes = principal_axes(sxx, sxy, syy);

    let tol = cmap.cell * 0.25;
    let mut best: Vec<GoodChord> = Vec::new();
    for axis in axes {
        let mut order: Vec<usize> = (0..candidates.len()).collect();
        let proj = |c: &GoodChord| {
            let m = c.midpoint();
            m.x * axis.0 + m.y * axis.1
        };
        order.sort_by(|&a, &b| {
            proj(&candidates[a])
                .total_cmp(&proj(&candidates[b]))
                .then(a.cmp(&b))
        });
        // Greedy sweep. `cache` holds the split of the last accepted chord
        // and the label of its predecessor's midpoint within that split.
        let mut seq: Vec<usize> = Vec::new();
        let mut cache: Option<(HashMap<usize, u32>, u32)> = None;
        for &ci in &order {
            if seq.len() >= len {
                break;
            }
            let cand = &candidates[ci];
            if seq
                .iter()
                .any(|&s| segments_cross(candidates[s].segment(), cand.segment(), tol))
            {
                continue;
            }
            if let Some((labels, prev_label)) = &cache {
                // The candidate must land on the far side of the last chord.
                match label_at(cmap, labels, cand.midpoint()) {
                    Some(l) if l != *prev_label => {}
                    _ => continue,
                }
            }
            if let Some(&last) = seq.last() {
                // Accepting `cand` makes it the new last chord: its own split
                // must be clean and must label the current last's midpoint.
                let (labels, parts) = split_by_chord(cmap, comp, cand.segment());
                if parts != 2 {
                    continue;
                }
                let Some(last_label) = label_at(cmap, &labels, candidates[last].midpoint()) else {
                    continue;
                };
                cache = Some((labels, last_label));
            }
            seq.push(ci);
        }
        if seq.len() > best.len() {
            best = seq.iter().map(|&i| candidates[i].clone()).collect();
        }
        if best.len() >= len {
            break;
        }
    }
    if best.len() < 3 {
        return Err(Error::construction(format!(
            "ruled sequence too short: only {} chords found in component {comp}",
            best.len()
        )));
    }
    Ok(best)
}

/// Unit eigenvectors of the 2x2 covariance [[sxx,sxy],[sxy,syy]], major first.
fn principal_axes(sxx: f64, sxy: f64, syy: f64) -> [(f64, f64); 2] {
    let tr = sxx + syy;
    let det = sxx * syy - sxy * sxy;
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    let l1 = tr / 2.0 + disc;
    let v1 = if sxy.abs() > 1e-18 {
        let v = (l1 - syy, sxy);
        let n = (v.0 * v.0 + v.1 * v.1).sqrt();
        (v.0 / n, v.1 / n)
    } else if sxx >= syy {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    };
    [v1, (-v1.1, v1.0)]
}

/// Side flags of chord preimages: for each parameter mapping to a chord
/// endpoint, whether the chord leaves the endpoint on the left of the
/// oriented curve (`positive = true`).
#[derive(Debug, Clone, Serialize)]
pub struct PositivityReport {
    pub entries: Vec<PositivityEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityEntry {
    pub param: f64,
    pub endpoint: usize,
    pub positive: bool,
}

impl PositivityReport {
    /// Winding increment contributed by a preimage: -1 when positive, else +1.
    pub fn delta(entry: &PositivityEntry) -> i32 {
        if entry.positive {
            -1
        } else {
            1
        }
    }
}

/// Tangent direction of the polyline at parameter `t` (outgoing direction).
fn tangent_at(curve: &SampledLoop, t: f64) -> (f64, f64) {
    let dt = 1e-5;
    let a = curve.eval(t);
    let b = curve.eval(t + dt);
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let n = dx.hypot(dy);
    if n == 0.0 {
        (1.0, 0.0)
    } else {
        (dx / n, dy / n)
    }
}

/// Classifies each chord endpoint preimage by the side the chord leaves on.
pub fn positivity(curve: &SampledLoop, chord: &GoodChord) -> Result<PositivityReport> {
    let mut entries = Vec::new();
    let dirs = [
        (chord.endpoints.0, chord.endpoints.1),
        (chord.endpoints.1, chord.endpoints.0),
    ];
    for (endpoint, (from, to)) in dirs.iter().enumerate() {
        let d = (to.x - from.x, to.y - from.y);
        let dn = d.0.hypot(d.1);
        if dn == 0.0 {
            return Err(Error::invalid("chord has coincident endpoints".to_string()));
        }
        let pres = if endpoint == 0 {
            &chord.preimages.0
        } else {
            &chord.preimages.1
        };
        for &t in pres {
            let tan = tangent_at(curve, t);
            let positive = cross(tan.0, tan.1, d.0 / dn, d.1 / dn) > 0.0;
            entries.push(PositivityEntry {
                param: t,
                endpoint,
                positive,
            });
        }
    }
    Ok(PositivityReport { entries })
}

/// Result of probing the winding-increment relation at a curve point.
#[derive(Debug, Clone, Serialize)]
pub struct WindRelationReport {
    pub probes_evaluated: usize,
    pub arcs: usize,
    pub max_discrepancy: i32,
}

/// Verifies that across a point `xi` of the image, winding numbers on the two
/// sides differ by the sum of the per-strand increments: `wind(q) = wind(p) +
/// sum of delta_i` with `delta_i = -1` for strands leaving `p`'s side on the
/// left. All strands through the `eps`-disk at `xi` must pass through `xi`
/// itself, else the disk is too coarse and an error is returned.
pub fn check_wind_relation(
    curve: &SampledLoop,
    xi: PlanarPoint,
    eps: f64,
    probes: usize,
) -> Result<WindRelationReport> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::invalid(format!("eps must be > 0, got {eps}")));
    }
    if probes == 0 {
        return Err(Error::invalid("probes must be >= 1".to_string()));
    }
    let tau_near = 1e-7 * eps + curve.geom_tol();
    let n = curve.len();
    // Edge-level distances from xi.
    let edge_dist: Vec<f64> = (0..n)
        .map(|i| {
            let a = curve.points()[i];
            let b = curve.points()[(i + 1) % n];
            let (_, cp) = project_to_segment(xi, a, b);
            cp.dist(xi)
        })
        .collect();
    let inside: Vec<bool> = edge_dist.iter().map(|&d| d < eps).collect();
    if inside.iter().all(|&b| b) {
        return Err(Error::invalid(
            "eps too large: the whole curve lies in the probe disk".to_string(),
        ));
    }
    if inside.iter().all(|&b| !b) {
        return Err(Error::invalid(
            "xi is not on the curve: no edge meets the probe disk".to_string(),
        ));
    }
    // Cyclic clusters of consecutive inside edges.
    let mut start = 0;
    while inside[start] {
        start += 1;
    }
    let mut tangents: Vec<(f64, f64)> = Vec::new();
    let mut i = start;
    loop {
        let next = (i + 1) % n;
        if inside[next] {
            let mut members = vec![next];
            let mut j = next;
            while inside[(j + 1) % n] {
                j = (j + 1) % n;
                members.push(j);
            }
            // The cluster must pass through xi itself.
            let (best_edge, best_d) = members
                .iter()
                .map(|&m| (m, edge_dist[m]))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            if best_d > tau_near {
                return Err(Error::invalid(format!(
                    "eps too large: an arc passes within {best_d:.3e} of xi without touching it"
                )));
            }
            let a = curve.points()[best_edge];
            let b = curve.points()[(best_edge + 1) % n];
            let (dx, dy) = (b.x - a.x, b.y - a.y);
            let norm = dx.hypot(dy);
            tangents.push((dx / norm, dy / norm));
            i = *members.last().unwrap();
        }
        i = (i + 1) % n;
        if i == start {
            break;
        }
    }
    let rho = eps / 2.0;
    let mut max_disc = 0i32;
    let mut used = 0usize;
    for j in 0..probes {
        let theta = TAU * (j as f64 + 0.37) / probes as f64;
        let nhat = (theta.cos(), theta.sin());
        // Skip probes nearly parallel to a strand: sides become unreliable.
        if tangents
            .iter()
            .any(|t| cross(t.0, t.1, nhat.0, nhat.1).abs() < 0.2)
        {
            continue;
        }
        let p = xi.add(rho * nhat.0, rho * nhat.1);
        let q = xi.add(-rho * nhat.0, -rho * nhat.1);
        let guard = 10.0 * curve.geom_tol();
        if distance_to_loop(p, curve) <= guard || distance_to_loop(q, curve) <= guard {
            continue;
        }
        let (wp, wq) = match (winding_number(curve, p), winding_number(curve, q)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        let mut sum = 0i32;
        for t in &tangents {
            // q is on the far side of every strand through xi; delta is -1
            // when the strand leaves p's side on the left.
            let positive = cross(t.0, t.1, nhat.0, nhat.1) > 0.0;
            sum += if positive { -1 } else { 1 };
        }
        used += 1;
        max_disc = max_disc.max((wq - wp - sum).abs());
    }
    if used == 0 {
        return Err(Error::construction(
            "no usable probes around xi (all skipped)".to_string(),
        ));
    }
    Ok(WindRelationReport {
        probes_evaluated: used,
        arcs: tangents.len(),
        max_discrepancy: max_disc,
    })
}
