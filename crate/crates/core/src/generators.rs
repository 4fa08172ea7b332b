//! Built-in curve families used by the spectrum tooling and the test suite.
//!
//! Every generator returns a [`SampledLoop`] whose samples are allocated
//! proportionally to image arclength: families that traverse long image paths
//! over short parameter windows (hug arcs, detour rings, shield walls) stay
//! geometrically resolved without inflating the sample budget elsewhere.
//! Metadata on each loop records the family name and its parameters.

use crate::curves::{make_loop, SampledLoop};
use crate::geometry::PlanarPoint;
use crate::{Error, Result};
use serde_json::json;
use std::f64::consts::{PI, TAU};

/// Unit vector at angle `theta`.
fn dir(theta: f64) -> PlanarPoint {
    PlanarPoint::raw(theta.cos(), theta.sin())
}

/// A constant-speed path over `[0, 1]`, used as one building block of a loop.
enum Path {
    /// Circular arc: `center + r * dir(a0 + u * sweep)`. Negative sweep runs
    /// clockwise; `|sweep|` may exceed a full turn (multiply-wound circles).
    Arc {
        cx: f64,
        cy: f64,
        r: f64,
        a0: f64,
        sweep: f64,
    },
    /// Straight segment from `a` to `b`.
    Seg { a: PlanarPoint, b: PlanarPoint },
    /// Dense polyline re-parametrized by arclength.
    Poly {
        pts: Vec<PlanarPoint>,
        cum: Vec<f64>,
    },
}

impl Path {
    fn poly(pts: Vec<PlanarPoint>) -> Result<Path> {
        if pts.len() < 2 {
            return Err(Error::invalid("polyline path needs at least two points"));
        }
        let mut cum = Vec::with_capacity(pts.len());
        let mut s = 0.0;
        cum.push(0.0);
        for w in pts.windows(2) {
            s += w[0].dist(w[1]);
            cum.push(s);
        }
        if s <= 0.0 {
            return Err(Error::invalid("polyline path has zero length"));
        }
        Ok(Path::Poly { pts, cum })
    }

    fn len(&self) -> f64 {
        match self {
            Path::Arc { r, sweep, .. } => r * sweep.abs(),
            Path::Seg { a, b } => a.dist(*b),
            Path::Poly { cum, .. } => *cum.last().expect("nonempty cum table"),
        }
    }

    /// Point at arclength fraction `u` in `[0, 1]`.
    fn at(&self, u: f64) -> PlanarPoint {
        match self {
            Path::Arc { cx, cy, r, a0, sweep } => {
                let ang = a0 + u * sweep;
                PlanarPoint::raw(cx + r * ang.cos(), cy + r * ang.sin())
            }
            Path::Seg { a, b } => a.lerp(*b, u),
            Path::Poly { pts, cum } => {
                let total = *cum.last().expect("nonempty cum table");
                let s = (u * total).clamp(0.0, total);
                // First index with cum[idx] >= s; segment (idx-1, idx).
                let idx = cum.partition_point(|&c| c < s).max(1).min(pts.len() - 1);
                let seg = cum[idx] - cum[idx - 1];
                let frac = if seg > 0.0 { (s - cum[idx - 1]) / seg } else { 0.0 };
                pts[idx - 1].lerp(pts[idx], frac)
            }
        }
    }
}

/// Cuts `[f0, f1]` (arclength fractions) out of a dense polyline as a new path.
fn poly_slice(pts: &[PlanarPoint], f0: f64, f1: f64) -> Result<Path> {
    assert!(0.0 <= f0 && f0 < f1 && f1 <= 1.0, "bad slice fractions");
    let full = Path::poly(pts.to_vec())?;
    let total = full.len();
    let (s0, s1) = (f0 * total, f1 * total);
    let mut out: Vec<PlanarPoint> = Vec::new();
    let push = |p: PlanarPoint, out: &mut Vec<PlanarPoint>| {
        if out.last().map_or(true, |q| q.dist(p) > 1e-12) {
            out.push(p);
        }
    };
    if let Path::Poly { pts, cum } = &full {
        push(full.at(f0), &mut out);
        for i in 0..pts.len() {
            if cum[i] > s0 && cum[i] < s1 {
                push(pts[i], &mut out);
            }
        }
        push(full.at(f1), &mut out);
    }
    Path::poly(out)
}

/// Splits `n` samples across pieces proportionally to their arclength, with a
/// floor of `min_per` samples per piece.
fn allocate(n: usize, lens: &[f64], min_per: usize) -> Result<Vec<usize>> {
    let total: f64 = lens.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::geometry("degenerate piece lengths"));
    }
    if n < lens.len() * min_per {
        return Err(Error::invalid(format!(
            "sample budget {n} too small: {} pieces need at least {min_per} samples each",
            lens.len()
        )));
    }
    let quotas: Vec<f64> = lens.iter().map(|l| n as f64 * l / total).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..lens.len()).collect();
    order.sort_by(|&i, &j| {
        let (ri, rj) = (quotas[i] - quotas[i].floor(), quotas[j] - quotas[j].floor());
        rj.partial_cmp(&ri).expect("finite remainders")
    });
    let mut assigned: usize = counts.iter().sum();
    for &i in order.iter().cycle() {
        if assigned == n {
            break;
        }
        counts[i] += 1;
        assigned += 1;
    }
    // Enforce the floor, compensating from the currently largest piece.
    loop {
        let Some(short) = counts.iter().position(|&c| c < min_per) else {
            break;
        };
        let largest = (0..counts.len())
            .max_by_key(|&i| counts[i])
            .expect("nonempty counts");
        if counts[largest] <= min_per {
            return Err(Error::invalid(
                "sample budget cannot satisfy the per-piece floor",
            ));
        }
        counts[largest] -= 1;
        counts[short] += 1;
    }
    Ok(counts)
}

/// Assembles contiguous `(t0, t1, path)` pieces covering `[0, 2*pi)` into a
/// sampled loop. Each piece is sampled at constant speed on its own window.
fn assemble(
    n: usize,
    pieces: &[(f64, f64, Path)],
    min_per: usize,
    meta: serde_json::Value,
) -> Result<SampledLoop> {
    debug_assert!(!pieces.is_empty());
    debug_assert!(pieces[0].0.abs() < 1e-9);
    debug_assert!((pieces.last().expect("nonempty").1 - TAU).abs() < 1e-9);
    for w in pieces.windows(2) {
        debug_assert!((w[0].1 - w[1].0).abs() < 1e-9, "pieces must be contiguous");
    }
    let lens: Vec<f64> = pieces.iter().map(|(_, _, p)| p.len()).collect();
    let counts = allocate(n, &lens, min_per)?;
    let mut params = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    for ((t0, t1, path), &ni) in pieces.iter().zip(&counts) {
        for j in 0..ni {
            let frac = j as f64 / ni as f64;
            let t = t0 + (t1 - t0) * frac;
            if t < TAU {
                params.push(t);
                points.push(path.at(frac));
            }
        }
    }
    make_loop(params, points, Some(meta))
}

// ---------------------------------------------------------------------------
// circle
// ---------------------------------------------------------------------------

/// The unit circle traversed `k` times: `t -> (cos(k t + phase), sin(k t + phase))`.
///
/// `k` may be negative (clockwise traversal) but not zero. Requires
/// `n >= 8 * |k|` so each wind keeps at least eight samples.
pub fn gen_circle(n: usize, k: i64, phase: f64) -> Result<SampledLoop> {
    if k == 0 {
        return Err(Error::invalid("winding count k must be nonzero"));
    }
    if !phase.is_finite() {
        return Err(Error::invalid("phase must be finite"));
    }
    let min_n = 8usize.saturating_mul(k.unsigned_abs() as usize);
    if n < min_n {
        return Err(Error::invalid(format!(
            "n = {n} too small for |k| = {}: need at least {min_n}",
            k.unsigned_abs()
        )));
    }
    let pieces = vec![(
        0.0,
        TAU,
        Path::Arc {
            cx: 0.0,
            cy: 0.0,
            r: 1.0,
            a0: phase,
            sweep: k as f64 * TAU,
        },
    )];
    assemble(
        n,
        &pieces,
        8,
        json!({"family": "circle", "n": n, "k": k, "phase": phase}),
    )
}

// ---------------------------------------------------------------------------
// example1: three-lobe clover with inner hug arcs
// ---------------------------------------------------------------------------

/// Radius of the circle through the three lobe junctions.
const JUNCTION_RADIUS: f64 = 1.0;
/// Distance from the origin to each lobe's arc center, along its outward ray.
const LOBE_PULL: f64 = 0.65;
/// Fraction of a hug arc over which its depth ramps from zero to full.
const HUG_RAMP: f64 = 0.06;
/// Dense sampling resolution for hug-arc construction polylines.
const HUG_DENSE: usize = 4097;
/// Fraction of a hug window's parameters spent in each slow end stretch.
const HUG_SLOW_PARAM: f64 = 0.45;
/// Image speed (arclength per unit parameter) of those slow stretches, kept
/// near the lobes' own speed so grid samples near the junction crossings are
/// as finely spaced on the hugs as on the lobes.
const HUG_SLOW_SPEED: f64 = 1.6;

/// Junction `k` of the clover, at angle `90 + 120 k` degrees on the junction
/// circle. Lobe `k` runs from junction `k` to junction `k + 1`.
fn junction(k: usize) -> PlanarPoint {
    let ang = 90f64.to_radians() + TAU * (k % 3) as f64 / 3.0;
    PlanarPoint::raw(JUNCTION_RADIUS * ang.cos(), JUNCTION_RADIUS * ang.sin())
}

/// Arc geometry of lobe `k`: `(center, radius, start_bearing, ccw_sweep)`.
///
/// The center sits `LOBE_PULL` from the origin along the lobe's outward ray
/// (opposite junction `k + 2`), so the arc bulges away from the origin and
/// meets the neighboring lobes transversally at the junctions.
fn lobe_geometry(k: usize) -> (PlanarPoint, f64, f64, f64) {
    let out = 150f64.to_radians() + TAU * (k % 3) as f64 / 3.0;
    let center = PlanarPoint::raw(LOBE_PULL * out.cos(), LOBE_PULL * out.sin());
    let start = junction(k);
    let radius = start.dist(center);
    let b0 = (start.y - center.y).atan2(start.x - center.x);
    // The outward ray bisects the arc, so the sweep is twice the ccw bearing
    // advance from the start junction to that ray.
    let half = (out - b0).rem_euclid(TAU);
    (center, radius, b0, 2.0 * half)
}

/// Point at arc fraction `w` along lobe `k`.
fn lobe_point(k: usize, w: f64) -> PlanarPoint {
    let (c, r, b0, sweep) = lobe_geometry(k);
    let b = b0 + sweep * w;
    PlanarPoint::raw(c.x + r * b.cos(), c.y + r * b.sin())
}

/// Depth profile of a hug arc: zero at both junctions, `full` over the
/// middle, with sine-eased ramps over the `HUG_RAMP` end fractions. The ease
/// keeps the profile slope continuous where a ramp meets the flat middle;
/// a slope kink there would dent the sliver between lobe and hug and punch a
/// hole into the distance family carried by its boundary pairs.
fn hug_depth(w: f64, full: f64) -> f64 {
    let ramp = |u: f64| {
        if u >= HUG_RAMP {
            1.0
        } else {
            (0.5 * PI * u / HUG_RAMP).sin()
        }
    };
    full * ramp(w).min(ramp(1.0 - w))
}

/// Dense polyline of the hug arc of lobe `k`: the same arc pulled toward its
/// center by `hug_depth`, meeting the lobe exactly at both junctions.
fn hug_dense(k: usize, closeness: f64) -> Vec<PlanarPoint> {
    let (c, r, b0, sweep) = lobe_geometry(k);
    (0..HUG_DENSE)
        .map(|i| {
            let w = i as f64 / (HUG_DENSE - 1) as f64;
            let rr = r - hug_depth(w, closeness);
            let b = b0 + sweep * w;
            PlanarPoint::raw(c.x + rr * b.cos(), c.y + rr * b.sin())
        })
        .collect()
}

/// A three-lobe clover that alternates short inner hug arcs with wide lobe
/// arcs half a parameter-turn apart.
///
/// Three circular lobes bulge outward between three junction points and cross
/// each other transversally there. The domain splits into three hug windows
/// `[2 pi j / 3, 2 pi j / 3 + eps]` and three lobe windows filling the gaps;
/// each hug window draws the lobe half a parameter-turn away again, pulled
/// toward its arc center by `closeness` with a taper to zero at both ends, so
/// junction images coincide exactly. Each lobe and its hug bound a sliver of
/// width `closeness`, and the three hugs bound a central region. For small
/// `closeness`, visual neighbor distances concentrate in `(0, eps]` and
/// `[2 pi / 3 - eps, pi]`.
///
/// Each hug window starts and ends with a slow stretch: its first and last
/// `HUG_SLOW_PARAM` parameter fractions advance along the hug at only
/// `HUG_SLOW_SPEED`, with the fast remainder of the hug arc traversed in the
/// middle. Near the junctions both crossing strands therefore carry finely
/// spaced samples, which keeps the wedge-shaped regions between hug ends
/// populated with matched boundary pairs.
///
/// Requires `n >= 256`, `eps` in `(0, pi/3)`, `closeness` in `(0, 0.4)`.
pub fn gen_example1(n: usize, eps: f64, closeness: f64) -> Result<SampledLoop> {
    if n < 256 {
        return Err(Error::invalid(format!("n = {n} too small: need at least 256")));
    }
    if !(eps.is_finite() && eps > 0.0 && eps < PI / 3.0) {
        return Err(Error::invalid(format!(
            "eps must lie strictly inside (0, pi/3), got {eps}"
        )));
    }
    if !(closeness.is_finite() && closeness > 0.0 && closeness < 0.4) {
        return Err(Error::invalid(format!(
            "closeness must lie strictly inside (0, 0.4), got {closeness}"
        )));
    }
    let third = TAU / 3.0;
    // Window picks that close the junction chain J0 -> J1 -> J2 -> J0: hug
    // window j copies the lobe drawn by lobe window j + 1 (half a turn away).
    let hug_pick = [0usize, 2, 1];
    let lobe_pick = [1usize, 0, 2];
    let mut pieces: Vec<(f64, f64, Path)> = Vec::new();
    for j in 0..3 {
        let base = third * j as f64;
        let hug_pts = hug_dense(hug_pick[j], closeness);
        let hug_len: f64 = hug_pts.windows(2).map(|w| w[0].dist(w[1])).sum();
        let slow_arc = (HUG_SLOW_SPEED * HUG_SLOW_PARAM * eps).min(0.3 * hug_len);
        let f = slow_arc / hug_len;
        let p = HUG_SLOW_PARAM * eps;
        pieces.push((base, base + p, poly_slice(&hug_pts, 0.0, f)?));
        pieces.push((base + p, base + eps - p, poly_slice(&hug_pts, f, 1.0 - f)?));
        pieces.push((base + eps - p, base + eps, poly_slice(&hug_pts, 1.0 - f, 1.0)?));
        let (c, r, b0, sweep) = lobe_geometry(lobe_pick[j]);
        pieces.push((
            base + eps,
            base + third,
            Path::Arc { cx: c.x, cy: c.y, r, a0: b0, sweep },
        ));
    }
    assemble(
        n,
        &pieces,
        16,
        json!({"family": "example1", "n": n, "eps": eps, "closeness": closeness}),
    )
}

// ---------------------------------------------------------------------------
// torusknot: polygon core with low-hug / cruise / descent detour strands
// ---------------------------------------------------------------------------

/// Circumradius of the inner polygon whose sides carry the short windows.
const KNOT_CORE_RADIUS: f64 = 0.5;
/// Base radius of the detour strands; strand `j` cruises at
/// `KNOT_OUTER_RADIUS * (1 + j / (3 q))`.
const KNOT_OUTER_RADIUS: f64 = 0.8;
/// Height of the low hug stretch above the polygon's circumradius.
const KNOT_HUG_HEIGHT: f64 = 0.05;
/// Fraction of a hug stretch over which its height ramps from zero to full.
const KNOT_HUG_RAMP: f64 = 0.15;
/// Angular width of the rise wall, as a fraction of a vertex step.
const KNOT_RISE_SLANT: f64 = 1.0 / 12.0;
/// Fraction of a detour's second vertex step spent cruising (after the rise
/// wall); the rest is the gradual descent back to the polygon.
const KNOT_CRUISE_FRAC: f64 = 0.4;
/// Radial lift of a cruise at mid-span. The cruise bows outward between the
/// rise wall and the descent, so the pocket underneath admits empty disks
/// pinned on wall/descent pairs; a flat cruise would graze every such disk.
const KNOT_CRUISE_LIFT: f64 = 0.3;
/// Dense resolution of hug and descent construction polylines.
const KNOT_DENSE: usize = 512;
/// Hug stretches end on a parameter multiple of `2 pi / KNOT_SNAP_DENOM`
/// (measured from the window start), so the touchdown vertex lands exactly
/// on power-of-two analysis grids whenever the window start does.
const KNOT_SNAP_DENOM: f64 = 512.0;

/// Default total parameter measure of the polygon-side windows: `(pi/4) / q^3`.
pub fn default_red_total(q: usize) -> f64 {
    (PI / 4.0) / (q * q * q) as f64
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Cruise radius of detour strand `j`: staggered per strand so detours stay
/// pairwise disjoint away from the polygon vertices.
fn knot_radius(j: usize, q: usize) -> f64 {
    KNOT_OUTER_RADIUS * (1.0 + j as f64 / (3 * q) as f64)
}

/// Trapezoid profile on `[0, 1]`: zero at both ends, one over the middle,
/// ramping linearly over the `ramp` end fractions.
fn trapezoid(u: f64, ramp: f64) -> f64 {
    (u / ramp).min((1.0 - u) / ramp).min(1.0).max(0.0)
}

/// A closed braid-like loop around a regular `q`-gon: `q` short windows map
/// onto the polygon sides (visited in steps of three), and each of the `q`
/// long windows between them carries a detour strand that advances two more
/// vertex steps. A strand hugs the next side from just above (height
/// `KNOT_HUG_HEIGHT`, tapering to zero so it touches the far vertex), rises
/// along a steep wall, cruises on an arc at its own staggered radius, and
/// descends gradually across the following side back down to the polygon.
///
/// Every vertex step of the circle is thus covered by exactly one side, one
/// hug, and one cruise-plus-descent strand; strands touch each other and the
/// sides only at the polygon vertices. The descent spans most of a vertex
/// step while the rise wall is nearly radial, so the slopes that different
/// strands present near a shared vertex never cross. `red_total` is the
/// combined parameter measure of the `q` side windows.
///
/// Requires `q >= 4` with `gcd(3, q) = 1`, `n >= 48 * q`, and
/// `0 < red_total < pi` so side windows stay shorter than the spacing.
pub fn gen_torusknot(n: usize, q: usize, red_total: f64) -> Result<SampledLoop> {
    if q < 4 {
        return Err(Error::invalid(format!("q = {q} too small: need q >= 4")));
    }
    if gcd(3, q) != 1 {
        return Err(Error::invalid(format!(
            "q = {q} must be coprime to 3 for the step-3 side order to close"
        )));
    }
    if n < 48 * q {
        return Err(Error::invalid(format!(
            "n = {n} too small for q = {q}: need at least {}",
            48 * q
        )));
    }
    if !(red_total.is_finite() && red_total > 0.0 && red_total < PI) {
        return Err(Error::invalid(format!(
            "red_total must lie in (0, pi), got {red_total}"
        )));
    }
    let w = red_total / q as f64;
    let step = TAU / q as f64;
    let sigma = step * KNOT_RISE_SLANT;
    // Unwrapped vertex angle: monotone in the index so polylines sweep ccw.
    let angle = |i: usize| step * i as f64;
    let vertex = |i: usize| {
        let a = angle(i);
        PlanarPoint::raw(KNOT_CORE_RADIUS * a.cos(), KNOT_CORE_RADIUS * a.sin())
    };
    let polar = |r: f64, a: f64| PlanarPoint::raw(r * a.cos(), r * a.sin());
    let mut pieces: Vec<(f64, f64, Path)> = Vec::new();
    for j in 0..q {
        let base = step * j as f64;
        // Side window: straight polygon side, exact.
        pieces.push((
            base,
            base + w,
            Path::Seg {
                a: vertex(3 * j),
                b: vertex(3 * j + 1),
            },
        ));
        let r_j = knot_radius(j, q);
        let a1 = angle(3 * j + 1);
        let a2 = a1 + step;
        let a3 = a2 + step;
        // Low hug above the next side, touching both of its vertices.
        let hug_pts: Vec<PlanarPoint> = (0..=KNOT_DENSE)
            .map(|i| {
                let u = i as f64 / KNOT_DENSE as f64;
                let r = KNOT_CORE_RADIUS + KNOT_HUG_HEIGHT * trapezoid(u, KNOT_HUG_RAMP);
                polar(r, a1 + u * step)
            })
            .collect();
        let hug = Path::poly(hug_pts)?;
        // Steep rise wall, cruise arc, and gradual descent back down.
        let rise = Path::Seg {
            a: vertex(3 * j + 2),
            b: polar(r_j, a2 + sigma),
        };
        let cruise_end = a2 + KNOT_CRUISE_FRAC * step;
        let cruise = Path::Arc {
            cx: 0.0,
            cy: 0.0,
            r: r_j,
            a0: a2 + sigma,
            sweep: cruise_end - (a2 + sigma),
        };
        let desc_pts: Vec<PlanarPoint> = (0..=KNOT_DENSE)
            .map(|i| {
                let u = i as f64 / KNOT_DENSE as f64;
                let r = r_j + (KNOT_CORE_RADIUS - r_j) * u;
                polar(r, cruise_end + u * (a3 - cruise_end))
            })
            .collect();
        let desc = Path::poly(desc_pts)?;
        // Parameter boundaries: proportional to arclength, with the hug end
        // snapped onto the analysis-grid lattice when that keeps it sane.
        let (l_hug, l_rise, l_cruise, l_desc) =
            (hug.len(), rise.len(), cruise.len(), desc.len());
        let rem = step - w;
        let off_raw = w + rem * l_hug / (l_hug + l_rise + l_cruise + l_desc);
        let snap = TAU / KNOT_SNAP_DENOM;
        let off_snapped = (off_raw / snap).round() * snap;
        let off = if off_snapped > w + 0.3 * rem && off_snapped < w + 0.7 * rem {
            off_snapped
        } else {
            off_raw
        };
        let t_hug_end = base + off;
        let rem2 = base + step - t_hug_end;
        let l_rcd = l_rise + l_cruise + l_desc;
        let t_rise_end = t_hug_end + rem2 * l_rise / l_rcd;
        let t_cruise_end = t_rise_end + rem2 * l_cruise / l_rcd;
        pieces.push((base + w, t_hug_end, hug));
        pieces.push((t_hug_end, t_rise_end, rise));
        pieces.push((t_rise_end, t_cruise_end, cruise));
        pieces.push((t_cruise_end, base + step, desc));
    }
    assemble(
        n,
        &pieces,
        8,
        json!({"family": "torusknot", "n": n, "q": q, "red_total": red_total}),
    )
}

// ---------------------------------------------------------------------------
// shielded: identity circle with annular shield sectors
// ---------------------------------------------------------------------------

/// Annulus half-width of a shield (walls span `1 - WALL` to `1 + WALL`).
const SHIELD_WALL: f64 = 0.3;
/// Corridor half-width kept free around the identity circle.
const SHIELD_GAP: f64 = 0.1;
/// Radial headroom for the two return rails beyond the walls.
const SHIELD_RAIL: f64 = 0.05;
/// Angular offset separating a wall, its dive, and the sector boundary.
const SHIELD_SHIFT: f64 = 0.01;

/// A loop that equals the identity embedding of the unit circle outside `k`
/// short windows, each of which sweeps a dense annular shield over its whole
/// sector: a radial wall at the sector entry, square-wave combs above and
/// below the corridor, return rails, and a dive back across the corridor.
///
/// The `k` inner return rails all lie on the circle of radius
/// `1 - SHIELD_WALL - SHIELD_RAIL`, leaving an empty central disk that touches
/// every rail. Window centers sit at `eps + 2*pi*l/k`; outside the windows the
/// map is the identity. `fill_res` sets the comb tooth count per sector.
///
/// Requires `k >= 2`, `0 < eps < pi / k^2`, `fill_res >= 4`, `n >= 128 * k`.
pub fn gen_shielded(n: usize, k: usize, eps: f64, fill_res: usize) -> Result<SampledLoop> {
    if k < 2 {
        return Err(Error::invalid(format!("k = {k} too small: need k >= 2")));
    }
    if !(eps.is_finite() && eps > 0.0 && eps < PI / (k * k) as f64) {
        return Err(Error::invalid(format!(
            "eps must lie strictly inside (0, pi/k^2) = (0, {}), got {eps}",
            PI / (k * k) as f64
        )));
    }
    if fill_res < 4 {
        return Err(Error::invalid(format!(
            "fill_res = {fill_res} too small: need at least 4"
        )));
    }
    if n < 128 * k {
        return Err(Error::invalid(format!(
            "n = {n} too small for k = {k}: need at least {}",
            128 * k
        )));
    }
    let half_sector = PI / k as f64;
    if half_sector - eps <= 3.0 * SHIELD_SHIFT {
        return Err(Error::invalid(
            "window reaches the sector boundary: decrease eps or k",
        ));
    }
    let under = 1.0 - SHIELD_WALL - SHIELD_RAIL / 2.0;
    let rail = 1.0 - SHIELD_WALL - SHIELD_RAIL;
    let top = 1.0 + SHIELD_WALL + SHIELD_RAIL;
    let ang_step = (half_sector / 400.0).min(0.004);

    // Polyline walk helpers: arcs are densified, radial moves are short segs.
    fn push(out: &mut Vec<PlanarPoint>, p: PlanarPoint) {
        if out.last().map_or(true, |q| q.dist(p) > 1e-12) {
            out.push(p);
        }
    }
    let arc_to = |out: &mut Vec<PlanarPoint>, r: f64, th0: f64, th1: f64| {
        let steps = ((th1 - th0).abs() / ang_step).ceil().max(1.0) as usize;
        for s in 1..=steps {
            let th = th0 + (th1 - th0) * s as f64 / steps as f64;
            push(out, PlanarPoint::raw(r * th.cos(), r * th.sin()));
        }
    };
    let radial_to = |out: &mut Vec<PlanarPoint>, th: f64, r: f64| {
        push(out, PlanarPoint::raw(r * th.cos(), r * th.sin()));
    };
    let comb = |out: &mut Vec<PlanarPoint>, th0: f64, th1: f64, r_hi: f64, r_lo: f64| {
        let tooth = (th1 - th0) / fill_res as f64;
        for i in 0..fill_res {
            let a = th0 + tooth * i as f64;
            arc_to(out, r_hi, a, a + tooth / 2.0);
            radial_to(out, a + tooth / 2.0, r_lo);
            arc_to(out, r_lo, a + tooth / 2.0, a + tooth);
            radial_to(out, a + tooth, r_hi);
        }
    };

    let build_shield = |xi: f64| -> Result<Path> {
        let (m_lo, m_hi) = (xi - half_sector, xi + half_sector);
        let mut pts: Vec<PlanarPoint> = Vec::new();
        push(&mut pts, dir(xi - eps)); // leave the identity circle
        radial_to(&mut pts, xi - eps, under); // descend under the corridor
        arc_to(&mut pts, under, xi - eps, m_lo + SHIELD_SHIFT); // travel to entry
        radial_to(&mut pts, m_lo + SHIELD_SHIFT, 1.0 + SHIELD_WALL); // entry wall
        comb(
            &mut pts,
            m_lo + SHIELD_SHIFT,
            m_hi - SHIELD_SHIFT,
            1.0 + SHIELD_WALL,
            1.0 + SHIELD_GAP,
        ); // outer comb
        radial_to(&mut pts, m_hi - SHIELD_SHIFT, top);
        arc_to(&mut pts, top, m_hi - SHIELD_SHIFT, m_lo + 2.0 * SHIELD_SHIFT); // outer rail
        radial_to(&mut pts, m_lo + 2.0 * SHIELD_SHIFT, 1.0 - SHIELD_GAP); // dive
        comb(
            &mut pts,
            m_lo + 2.0 * SHIELD_SHIFT,
            m_hi - SHIELD_SHIFT,
            1.0 - SHIELD_GAP,
            1.0 - SHIELD_WALL,
        ); // inner comb
        radial_to(&mut pts, m_hi - SHIELD_SHIFT, rail);
        arc_to(&mut pts, rail, m_hi - SHIELD_SHIFT, xi + eps); // inner rail
        radial_to(&mut pts, xi + eps, 1.0); // rejoin the identity circle
        Path::poly(pts)
    };

    let mut pieces: Vec<(f64, f64, Path)> = Vec::new();
    for l in 0..k {
        let xi = eps + TAU * l as f64 / k as f64;
        pieces.push((xi - eps, xi + eps, build_shield(xi)?));
        let next_start = if l + 1 < k {
            eps + TAU * (l + 1) as f64 / k as f64 - eps
        } else {
            TAU
        };
        pieces.push((
            xi + eps,
            next_start,
            Path::Arc {
                cx: 0.0,
                cy: 0.0,
                r: 1.0,
                a0: xi + eps,
                sweep: next_start - (xi + eps),
            },
        ));
    }
    assemble(
        n,
        &pieces,
        16,
        json!({"family": "shielded", "n": n, "k": k, "eps": eps, "fill_res": fill_res}),
    )
}

// ---------------------------------------------------------------------------
// folded: unit circle with one angular fold
// ---------------------------------------------------------------------------

/// The unit circle traversed with one backtrack: the image angle climbs to
/// `pi`, retreats by `fold_depth`, then climbs on to `2*pi`, all at constant
/// speed. Every image angle in `(pi - fold_depth, pi)` has three preimages, so
/// the loop carries image-coincident parameter pairs at arbitrarily small
/// separations. Requires `n >= 64` and `fold_depth` in `(0, 1)`.
pub fn gen_folded(n: usize, fold_depth: f64) -> Result<SampledLoop> {
    if n < 64 {
        return Err(Error::invalid(format!("n = {n} too small: need at least 64")));
    }
    if !(fold_depth.is_finite() && fold_depth > 0.0 && fold_depth < 1.0) {
        return Err(Error::invalid(format!(
            "fold_depth must lie strictly inside (0, 1), got {fold_depth}"
        )));
    }
    let speed = (TAU + 2.0 * fold_depth) / TAU;
    let t1 = PI / speed;
    let t2 = t1 + fold_depth / speed;
    let arc = |a0: f64, sweep: f64| Path::Arc {
        cx: 0.0,
        cy: 0.0,
        r: 1.0,
        a0,
        sweep,
    };
    let pieces = vec![
        (0.0, t1, arc(0.0, PI)),
        (t1, t2, arc(PI, -fold_depth)),
        (t2, TAU, arc(PI - fold_depth, PI + fold_depth)),
    ];
    assemble(
        n,
        &pieces,
        8,
        json!({"family": "folded", "n": n, "fold_depth": fold_depth}),
    )
}

// ---------------------------------------------------------------------------
// auxiliary test curves
// ---------------------------------------------------------------------------

/// Axis-aligned ellipse `t -> (a cos t, b sin t)` sampled uniformly in parameter.
pub fn aux_ellipse(n: usize, a: f64, b: f64) -> Result<SampledLoop> {
    if n < 16 {
        return Err(Error::invalid(format!("n = {n} too small: need at least 16")));
    }
    if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
        return Err(Error::invalid("ellipse semi-axes must be positive"));
    }
    let params: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
    let points = params
        .iter()
        .map(|&t| PlanarPoint::raw(a * t.cos(), b * t.sin()))
        .collect();
    make_loop(
        params,
        points,
        Some(json!({"family": "ellipse", "n": n, "a": a, "b": b})),
    )
}

/// Axis-aligned square with corners `(+-1, +-1)`, `n_per_side` samples per
/// side with corners landing exactly on samples.
pub fn aux_square(n_per_side: usize) -> Result<SampledLoop> {
    if n_per_side < 4 {
        return Err(Error::invalid(format!(
            "n_per_side = {n_per_side} too small: need at least 4"
        )));
    }
    let corners = [
        PlanarPoint::raw(1.0, -1.0),
        PlanarPoint::raw(1.0, 1.0),
        PlanarPoint::raw(-1.0, 1.0),
        PlanarPoint::raw(-1.0, -1.0),
    ];
    let n = 4 * n_per_side;
    let mut params = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    for side in 0..4 {
        let (a, b) = (corners[side], corners[(side + 1) % 4]);
        for j in 0..n_per_side {
            params.push(TAU * (side * n_per_side + j) as f64 / n as f64);
            points.push(a.lerp(b, j as f64 / n_per_side as f64));
        }
    }
    make_loop(
        params,
        points,
        Some(json!({"family": "square", "n_per_side": n_per_side})),
    )
}

/// Figure-eight `t -> (0.7 sin 2t, 1.1 sin t)`: one self-crossing at the
/// origin, lobes of opposite orientation.
pub fn aux_figure_eight(n: usize) -> Result<SampledLoop> {
    if n < 16 {
        return Err(Error::invalid(format!("n = {n} too small: need at least 16")));
    }
    let params: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
    let points = params
        .iter()
        .map(|&t| PlanarPoint::raw(0.7 * (2.0 * t).sin(), 1.1 * t.sin()))
        .collect();
    make_loop(params, points, Some(json!({"family": "figure_eight", "n": n})))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::angular_distance;
    use crate::neighbors::{classify_pair, Tolerances};

    #[test]
    fn circle_matches_closed_form_and_validates() {
        let c = gen_circle(64, 1, 0.3).expect("valid circle");
        for (&t, &p) in c.params().iter().zip(c.points()) {
            let want = dir(t + 0.3);
            assert!(p.dist(want) < 1e-12, "sample off closed form at t = {t}");
        }
        let c2 = gen_circle(128, -2, 0.0).expect("clockwise double wind");
        assert_eq!(c2.len(), 128);
        assert!(gen_circle(64, 0, 0.0).is_err(), "k = 0 must be rejected");
        assert!(gen_circle(15, 2, 0.0).is_err(), "n < 8|k| must be rejected");
    }

    #[test]
    fn double_wound_circle_has_plain_antipodes() {
        let c = gen_circle(512, 2, 0.0).expect("double wind");
        let tol = Tolerances::for_loop(&c);
        let v = classify_pair(&c, 1.0, 1.0 + PI, &tol, None).expect("classify");
        assert!(v.plain, "f(t) = f(t + pi) for the doubly wound circle");
        assert!(v.spherical && v.visual && v.topological, "chain from plain");
    }

    #[test]
    fn example1_junctions_coincide() {
        let eps = 20f64.to_radians();
        let c = gen_example1(2048, eps, 0.05).expect("valid loop");
        // The first hug window ends at junction 1, where the third hug window
        // (a copy of lobe 1's hug) starts: both parameters map to the point.
        let p = c.eval(eps);
        let q = c.eval(2.0 * TAU / 3.0);
        let diag = c.bbox().diagonal();
        assert!(
            p.dist(q) <= 1e-9 * diag,
            "junction images should coincide, got separation {}",
            p.dist(q)
        );
        // A hug midpoint faces the midpoint of its source lobe exactly half a
        // turn away, separated radially by the full hug depth.
        let a = eps * 0.5;
        let d = c.eval(a).dist(c.eval(a + PI));
        assert!(
            (d - 0.05).abs() < 0.3 * 0.05,
            "hug depth off: expected about 0.05, got {d}"
        );
    }

    #[test]
    fn example1_image_tightens_with_closeness() {
        let lobes: Vec<Vec<PlanarPoint>> = (0..3)
            .map(|k| (0..=2048).map(|i| lobe_point(k, i as f64 / 2048.0)).collect())
            .collect();
        let dist_to_lobes = |p: PlanarPoint| -> f64 {
            lobes
                .iter()
                .flat_map(|ps| ps.windows(2))
                .map(|w| crate::geometry::project_to_segment(p, w[0], w[1]).1.dist(p))
                .fold(f64::INFINITY, f64::min)
        };
        let mut last = f64::INFINITY;
        for &closeness in &[0.1, 0.05, 0.02] {
            let c = gen_example1(1024, 0.35, closeness).expect("valid loop");
            let h = c
                .points()
                .iter()
                .map(|&p| dist_to_lobes(p))
                .fold(0.0, f64::max);
            assert!(
                h <= closeness + 0.01,
                "image strays {h} from the lobe union at closeness {closeness}"
            );
            assert!(h <= last + 1e-9, "image distance must not grow as closeness shrinks");
            last = h;
        }
    }

    #[test]
    fn torusknot_sides_lie_on_polygon() {
        let q = 5;
        let c = gen_torusknot(1024, q, default_red_total(q)).expect("valid knot");
        let w = default_red_total(q) / q as f64;
        let step = TAU / q as f64;
        let vertex = |i: usize| {
            let ang = TAU * (i % q) as f64 / q as f64;
            PlanarPoint::raw(0.5 * ang.cos(), 0.5 * ang.sin())
        };
        let mut side_samples = 0usize;
        for (&t, &p) in c.params().iter().zip(c.points()) {
            let j = (t / step).floor() as usize;
            if j < q && t - step * j as f64 <= w {
                let (_, on) =
                    crate::geometry::project_to_segment(p, vertex(3 * j), vertex(3 * j + 1));
                assert!(on.dist(p) < 1e-9, "side sample off the polygon side");
                side_samples += 1;
            }
        }
        assert!(side_samples >= 8 * q, "side windows under-sampled");
        // Default side measure shrinks like 1/q^3.
        let ratio = default_red_total(8) / default_red_total(4);
        assert!((ratio - 0.125).abs() < 1e-12);
        assert!(gen_torusknot(1024, 6, 0.01).is_err(), "q divisible by 3 rejected");
        assert!(gen_torusknot(1024, 3, 0.01).is_err(), "q < 4 rejected");
    }

    #[test]
    fn shielded_identity_zones_and_shared_rail_circle() {
        let (k, eps) = (3usize, 0.3);
        let c = gen_shielded(2048, k, eps, 6).expect("valid shielded loop");
        let rail = 1.0 - SHIELD_WALL - SHIELD_RAIL;
        let top = 1.0 + SHIELD_WALL + SHIELD_RAIL;
        let mut rail_hits = vec![0usize; k];
        let mut identity_samples = 0usize;
        for (&t, &p) in c.params().iter().zip(c.points()) {
            let r = p.x.hypot(p.y);
            // Chord interpolation along dense arcs undershoots by the sagitta
            // (about 4e-7 at the construction's angular step), never more.
            assert!(
                r > rail - 1e-6 && r < top + 1e-6,
                "sample outside the shield annulus: r = {r}"
            );
            let in_window = (0..k).any(|l| {
                angular_distance(t, eps + TAU * l as f64 / k as f64) <= eps + 1e-12
            });
            if !in_window {
                // Identity zone: samples sit exactly on the unit circle at
                // their own parameter angle.
                assert!(p.dist(dir(t)) < 1e-9, "identity zone distorted at t = {t}");
                identity_samples += 1;
            }
            for l in 0..k {
                let xi = eps + TAU * l as f64 / k as f64;
                if angular_distance(t, xi) <= eps && (r - rail).abs() < 1e-6 {
                    rail_hits[l] += 1;
                }
            }
        }
        assert!(identity_samples >= 60, "identity zones under-sampled");
        for (l, &hits) in rail_hits.iter().enumerate() {
            assert!(hits >= 5, "shield {l} has too few inner-rail samples: {hits}");
        }
        assert!(gen_shielded(2048, 3, 0.4, 6).is_err(), "eps >= pi/k^2 rejected");
    }

    #[test]
    fn folded_has_plain_pairs_at_tiny_distance() {
        let n = 1024usize;
        let depth = 0.3;
        let c = gen_folded(n, depth).expect("valid folded loop");
        let speed = (TAU + 2.0 * depth) / TAU;
        let t1 = PI / speed; // parameter of the fold crest
        let delta = TAU / n as f64;
        let tol = Tolerances::for_loop(&c);
        let v = classify_pair(&c, t1 - delta, t1 + delta, &tol, None).expect("classify");
        assert!(v.plain, "mirror pair across the fold crest must be plain");
        assert!(2.0 * delta < 4.0 * TAU / n as f64, "witness distance is tiny");
    }

    #[test]
    fn generators_validate_sample_budgets() {
        assert!(gen_example1(100, 0.35, 0.05).is_err());
        assert!(gen_shielded(100, 3, 0.3, 6).is_err());
        assert!(gen_torusknot(32, 4, 0.01).is_err());
        assert!(gen_folded(32, 0.3).is_err());
        assert!(aux_square(2).is_err());
    }
}

