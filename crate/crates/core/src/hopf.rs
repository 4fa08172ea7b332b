//! Coincidence solvers: roots of `g(x + delta) = g(x)` on the circle, and
//! direction maps, mapping degrees, and coincidence families for maps of the
//! flat torus `R^2 / Z^2`.
//!
//! On the circle (the 1-dimensional case) a continuous function attains equal
//! values at the ends of some arc of every prescribed length `delta`; the
//! solver locates those parameter pairs by sign changes of the difference
//! function. On the torus the same phenomenon is probed through the
//! direction map `u -> (f(gamma_u(s + delta)) - f(gamma_u(s))) / |...|` along
//! straight geodesics `gamma_u(t) = p + t u`, its winding degree, and a
//! damped-Newton search for the family of coincidence pairs
//! `f(p + delta u) = f(p)`. The flat metric keeps geodesics straight, and the
//! number of geodesics of a given length joining two points is a finite
//! lattice count, which [`delta_conjugacy_probe`] certifies.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::par::{map_indexed, Parallelism};
use crate::{Error, Result};

/// Minimum samples for a sampled circle function.
pub const MIN_CIRCLE_SAMPLES: usize = 8;
/// Difference-vector norms at or below this report a coincidence.
pub const DEFAULT_V_MIN: f64 = 1e-10;
/// Newton iteration cap for coincidence refinement.
const NEWTON_ITERS: usize = 50;
/// Newton damping factor (the system is underdetermined; damping keeps the
/// iterates from oscillating across the solution curve).
const NEWTON_DAMPING: f64 = 0.5;
/// Deduplication distance in `(p, u)` space for coincidence families.
const DEDUPE_DIST: f64 = 1e-3;

fn wrap01(x: f64) -> f64 {
    let v = x.rem_euclid(1.0);
    if v >= 1.0 {
        0.0
    } else {
        v
    }
}

/// Distance of `x` to the nearest integer (the circle metric of `R/Z`).
fn wrap_half(x: f64) -> f64 {
    (x - x.round()).abs()
}

// ---------------------------------------------------------------------------
// circle case
// ---------------------------------------------------------------------------

/// Real-valued function on the circle given by samples, linearly interpolated
/// with wraparound.
#[derive(Debug, Clone)]
pub struct CircleFunction {
    params: Vec<f64>,
    values: Vec<f64>,
}

impl CircleFunction {
    /// Builds a sampled circle function. Requires at least
    /// [`MIN_CIRCLE_SAMPLES`] samples with finite, distinct parameters in
    /// `[0, 2*pi)`; samples may arrive unsorted.
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < MIN_CIRCLE_SAMPLES {
            return Err(Error::invalid(format!(
                "too few circle samples: {} < {MIN_CIRCLE_SAMPLES}",
                samples.len()
            )));
        }
        let mut samples = samples;
        for &(t, v) in &samples {
            if !t.is_finite() || !(0.0..TAU).contains(&t) {
                return Err(Error::invalid(format!(
                    "circle parameters must lie in [0, 2*pi), got {t}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::invalid(format!("non-finite sample value {v}")));
            }
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in samples.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::invalid(format!(
                    "duplicate circle parameter {}",
                    w[0].0
                )));
            }
        }
        Ok(CircleFunction {
            params: samples.iter().map(|s| s.0).collect(),
            values: samples.iter().map(|s| s.1).collect(),
        })
    }

    /// Uniformly spaced samples `values[i]` at `2*pi*i / len`.
    pub fn from_uniform(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        let samples = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| (TAU * i as f64 / n as f64, v))
            .collect();
        CircleFunction::new(samples)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires MIN_CIRCLE_SAMPLES samples
    }

    /// Linear interpolation at any angle, wrapping around `2*pi`.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.rem_euclid(TAU);
        let n = self.params.len();
        // Index of the last sample parameter <= t.
        let i = match self.params.partition_point(|&p| p <= t) {
            0 => n - 1, // t below params[0]: the wrap segment covers it
            k => k - 1,
        };
        let j = (i + 1) % n;
        let (t0, t1) = (self.params[i], self.params[j]);
        let span = (t1 - t0).rem_euclid(TAU);
        let frac = if span == 0.0 {
            0.0
        } else {
            (t - t0).rem_euclid(TAU) / span
        };
        self.values[i] + frac * (self.values[j] - self.values[i])
    }
}

/// Result of the circle solver: either every parameter works (constant
/// difference) or a finite sorted list of roots.
#[derive(Debug, Clone, PartialEq)]
pub enum CircleRoots {
    /// `g(x + delta) = g(x)` holds identically (g is constant on the grid).
    All,
    /// Sorted roots in `[0, 2*pi)`.
    Roots(Vec<f64>),
}

/// Finds the parameters `x` with `g(x + delta) = g(x)`.
///
/// The difference `h(x) = g(x + delta) - g(x)` is scanned on `n` uniform grid
/// points; each sign change is refined by bisection to an interval of width
/// `1e-12`. Exact grid zeros are kept as roots. If `h` vanishes on the whole
/// grid the marker [`CircleRoots::All`] is returned. For continuous `g` the
/// sum of `h` over the circle is zero, so `h` is identically zero or changes
/// sign at least twice — the scan can only miss roots where `h` touches zero
/// without crossing, or pairs closer than the grid step.
pub fn hopf_pairs_circle(g: impl Fn(f64) -> f64, n: usize, delta: f64) -> Result<CircleRoots> {
    if n < MIN_CIRCLE_SAMPLES {
        return Err(Error::invalid(format!(
            "grid size {n} < {MIN_CIRCLE_SAMPLES}"
        )));
    }
    if !(delta.is_finite() && delta > 0.0 && delta < TAU) {
        return Err(Error::invalid(format!(
            "delta must lie in (0, 2*pi), got {delta}"
        )));
    }
    let h = |x: f64| g((x + delta).rem_euclid(TAU)) - g(x.rem_euclid(TAU));
    let step = TAU / n as f64;
    let xs: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
    let hs: Vec<f64> = xs.iter().map(|&x| h(x)).collect();

    let scale = xs.iter().map(|&x| g(x).abs()).fold(0.0f64, f64::max);
    if hs.iter().all(|&v| v.abs() <= 1e-12 * (1.0 + scale)) {
        return Ok(CircleRoots::All);
    }

    let mut roots: Vec<f64> = Vec::new();
    for i in 0..n {
        let (x0, h0) = (xs[i], hs[i]);
        let (x1, h1) = (xs[i] + step, hs[(i + 1) % n]);
        if h0 == 0.0 {
            roots.push(x0);
            continue;
        }
        if h1 == 0.0 || h0.signum() == h1.signum() {
            continue;
        }
        let (mut lo, mut hi) = (x0, x1);
        let mut hlo = h0;
        let mut root = None;
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            let hm = h(mid);
            if hm == 0.0 {
                root = Some(mid);
                break;
            }
            if hm.signum() == hlo.signum() {
                lo = mid;
                hlo = hm;
            } else {
                hi = mid;
            }
        }
        roots.push(root.unwrap_or(0.5 * (lo + hi)).rem_euclid(TAU));
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|b, a| (*b - *a).abs() < 1e-9);
    // The wrap can produce a root at both ends of [0, 2*pi).
    if roots.len() >= 2 && (TAU - roots[roots.len() - 1]) + roots[0] < 1e-9 {
        roots.pop();
    }
    Ok(CircleRoots::Roots(roots))
}

// ---------------------------------------------------------------------------
// flat-torus case
// ---------------------------------------------------------------------------

/// One trigonometric term `amp * sin(2*pi*(kx*x + ky*y) + phase)`. Integer
/// frequencies make the term well-defined on the torus.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrigTerm {
    pub amp: f64,
    pub kx: i32,
    pub ky: i32,
    pub phase: f64,
}

/// Map of the flat torus into the plane, each output coordinate a finite
/// trigonometric polynomial. Smooth, exactly periodic, and cheap to
/// differentiate.
#[derive(Debug, Clone)]
pub struct TorusMap {
    coords: [Vec<TrigTerm>; 2],
}

impl TorusMap {
    pub fn new(coords: [Vec<TrigTerm>; 2]) -> Result<Self> {
        for term in coords.iter().flatten() {
            if !term.amp.is_finite() || !term.phase.is_finite() {
                return Err(Error::invalid(
                    "trigonometric terms need finite amplitude and phase".to_string(),
                ));
            }
        }
        Ok(TorusMap { coords })
    }

    pub fn terms(&self) -> &[Vec<TrigTerm>; 2] {
        &self.coords
    }

    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        let one = |terms: &[TrigTerm]| {
            terms
                .iter()
                .map(|t| t.amp * (TAU * (t.kx as f64 * x + t.ky as f64 * y) + t.phase).sin())
                .sum()
        };
        (one(&self.coords[0]), one(&self.coords[1]))
    }

    /// Jacobian rows per output coordinate: `[[df1/dx, df1/dy], [df2/dx, df2/dy]]`.
    pub fn grad(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let one = |terms: &[TrigTerm]| {
            let mut gx = 0.0;
            let mut gy = 0.0;
            for t in terms {
                let c = t.amp * TAU * (TAU * (t.kx as f64 * x + t.ky as f64 * y) + t.phase).cos();
                gx += t.kx as f64 * c;
                gy += t.ky as f64 * c;
            }
            [gx, gy]
        };
        [one(&self.coords[0]), one(&self.coords[1])]
    }
}

/// The normalized difference vector along the geodesic `gamma_u(t) = p + t*u`:
/// `v = (f(gamma(s + delta)) - f(gamma(s))) / |...|`.
///
/// A difference norm at or below `v_min` ([`DEFAULT_V_MIN`]) means the two
/// geodesic points are a coincidence pair; that is reported as an error
/// carrying both points — a find, not a failure.
pub fn direction_map(
    f: &TorusMap,
    p: (f64, f64),
    s: f64,
    delta: f64,
    u: (f64, f64),
) -> Result<(f64, f64)> {
    let ul = (u.0 * u.0 + u.1 * u.1).sqrt();
    if !(ul.is_finite() && ul > 1e-14) {
        return Err(Error::invalid(format!("degenerate direction {u:?}")));
    }
    let u = (u.0 / ul, u.1 / ul);
    let a = (p.0 + s * u.0, p.1 + s * u.1);
    let b = (p.0 + (s + delta) * u.0, p.1 + (s + delta) * u.1);
    let fa = f.eval(a.0, a.1);
    let fb = f.eval(b.0, b.1);
    let v = (fb.0 - fa.0, fb.1 - fa.1);
    let norm = (v.0 * v.0 + v.1 * v.1).sqrt();
    if norm <= DEFAULT_V_MIN {
        return Err(Error::construction(format!(
            "coincidence encountered: f({:.12}, {:.12}) = f({:.12}, {:.12})",
            wrap01(a.0),
            wrap01(a.1),
            wrap01(b.0),
            wrap01(b.1)
        )));
    }
    Ok((v.0 / norm, v.1 / norm))
}

/// Winding degree of the direction map over the circle of directions.
///
/// `v(u)` is sampled at `m` uniform directions; the summed wrapped turning
/// angle divided by `2*pi` must land within 0.25 of an integer, which is
/// returned. A coincidence on the sample circle makes the degree undefined
/// and is reported with the found pair.
pub fn direction_map_degree(
    f: &TorusMap,
    p: (f64, f64),
    s: f64,
    delta: f64,
    m: usize,
) -> Result<i64> {
    if m < 8 {
        return Err(Error::invalid(format!("direction samples {m} < 8")));
    }
    let vs: Vec<(f64, f64)> = (0..m)
        .map(|k| {
            let th = TAU * k as f64 / m as f64;
            direction_map(f, p, s, delta, (th.cos(), th.sin()))
                .map_err(|e| Error::construction(format!("degree undefined, {e}")))
        })
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    for k in 0..m {
        let a = vs[k];
        let b = vs[(k + 1) % m];
        total += (a.0 * b.1 - a.1 * b.0).atan2(a.0 * b.0 + a.1 * b.1);
    }
    let turns = total / TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() >= 0.25 {
        return Err(Error::construction(format!(
            "degree residual {:.3} too large: increase direction samples",
            (turns - rounded).abs()
        )));
    }
    Ok(rounded as i64)
}

/// A solved coincidence: `f(p + delta*u) = f(p)` within the solver tolerance,
/// the two points joined by a straight geodesic of length exactly `delta`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoincidencePair {
    /// Base point in torus coordinates `[0, 1)^2`.
    pub p: [f64; 2],
    /// Unit direction of the joining geodesic.
    pub u: [f64; 2],
    /// Geodesic length.
    pub delta: f64,
    /// `|f(p + delta*u) - f(p)|` after refinement.
    pub residual: f64,
}

impl CoincidencePair {
    /// The far endpoint `p + delta*u`, reduced to `[0, 1)^2`.
    pub fn endpoint(&self) -> [f64; 2] {
        [
            wrap01(self.p[0] + self.delta * self.u[0]),
            wrap01(self.p[1] + self.delta * self.u[1]),
        ]
    }

    /// Distance to another pair in `(p, u)` space: torus metric on `p`,
    /// Euclidean on `u`.
    pub fn dist(&self, other: &CoincidencePair) -> f64 {
        let dx = wrap_half(self.p[0] - other.p[0]);
        let dy = wrap_half(self.p[1] - other.p[1]);
        let du = (self.u[0] - other.u[0], self.u[1] - other.u[1]);
        (dx * dx + dy * dy + du.0 * du.0 + du.1 * du.1).sqrt()
    }
}

/// Finds coincidence pairs `f(p + delta*u) = f(p)` on the flat torus.
///
/// A coarse grid over `(p, u)` (`coarse^2` base points times `2*coarse`
/// directions) seeds damped Newton iteration on the underdetermined
/// 2-equation/3-unknown system; converged seeds (residual at most
/// `refine_tol`) are deduplicated at distance `1e-3` in `(p, u)` space and at
/// most `cap` survivors are returned, sorted by `(p, u)`. Seeds refine
/// independently under `mode`; the dedup pass is deterministic, so the result
/// does not depend on the worker count. The solution set of a generic smooth
/// map is a one-parameter family of pairs, so many distinct, non-isolated
/// pairs are expected; an empty result at a fine grid is a solver red flag,
/// not a certified absence.
pub fn find_coincidence_family(
    f: &TorusMap,
    delta: f64,
    coarse: usize,
    refine_tol: f64,
    cap: usize,
    mode: Parallelism,
) -> Result<Vec<CoincidencePair>> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::invalid(format!("delta must be positive, got {delta}")));
    }
    if !(4..=512).contains(&coarse) {
        return Err(Error::invalid(format!("coarse grid {coarse} outside 4..=512")));
    }
    if !(refine_tol.is_finite() && refine_tol > 0.0) {
        return Err(Error::invalid(format!(
            "refine_tol must be positive, got {refine_tol}"
        )));
    }
    if cap == 0 {
        return Err(Error::invalid("cap must be at least 1".to_string()));
    }

    let dirs = 2 * coarse;
    let total = coarse * coarse * dirs;
    let refined: Vec<Option<(f64, f64, f64, f64)>> = map_indexed(total, mode, |idx| {
        let k = idx % dirs;
        let j = (idx / dirs) % coarse;
        let i = idx / (dirs * coarse);
        let seed = (
            i as f64 / coarse as f64,
            j as f64 / coarse as f64,
            TAU * k as f64 / dirs as f64,
        );
        refine_seed(f, delta, refine_tol, seed)
    });

    let mut candidates: Vec<(f64, f64, f64, f64)> = refined.into_iter().flatten().collect();
    candidates.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.total_cmp(&b.2))
    });

    let mut kept: Vec<CoincidencePair> = Vec::new();
    for (x, y, th, residual) in candidates {
        let pair = CoincidencePair {
            p: [x, y],
            u: [th.cos(), th.sin()],
            delta,
            residual,
        };
        if kept.iter().any(|k| k.dist(&pair) < DEDUPE_DIST) {
            continue;
        }
        kept.push(pair);
        if kept.len() == cap {
            break;
        }
    }
    Ok(kept)
}

/// Damped Newton on `F(x, y, th) = f(p + delta*u(th)) - f(p)`, taking the
/// least-norm step `J^T (J J^T)^{-1} F` of the underdetermined system.
fn refine_seed(
    f: &TorusMap,
    delta: f64,
    tol: f64,
    seed: (f64, f64, f64),
) -> Option<(f64, f64, f64, f64)> {
    let (mut x, mut y, mut th) = seed;
    for _ in 0..NEWTON_ITERS {
        let u = (th.cos(), th.sin());
        let q = (x + delta * u.0, y + delta * u.1);
        let fp = f.eval(x, y);
        let fq = f.eval(q.0, q.1);
        let big_f = (fq.0 - fp.0, fq.1 - fp.1);
        let res = (big_f.0 * big_f.0 + big_f.1 * big_f.1).sqrt();
        if res <= tol {
            return Some((wrap01(x), wrap01(y), th.rem_euclid(TAU), res));
        }
        let jq = f.grad(q.0, q.1);
        let jp = f.grad(x, y);
        let uprime = (-th.sin(), th.cos());
        // Rows of the 2x3 Jacobian: d/dx, d/dy, d/dth.
        let r0 = [
            jq[0][0] - jp[0][0],
            jq[0][1] - jp[0][1],
            delta * (jq[0][0] * uprime.0 + jq[0][1] * uprime.1),
        ];
        let r1 = [
            jq[1][0] - jp[1][0],
            jq[1][1] - jp[1][1],
            delta * (jq[1][0] * uprime.0 + jq[1][1] * uprime.1),
        ];
        let a = r0[0] * r0[0] + r0[1] * r0[1] + r0[2] * r0[2];
        let b = r0[0] * r1[0] + r0[1] * r1[1] + r0[2] * r1[2];
        let c = r1[0] * r1[0] + r1[1] * r1[1] + r1[2] * r1[2];
        let det = a * c - b * b;
        if !(det.abs() > 1e-14 * (a.max(c) + 1e-30)) {
            return None;
        }
        let w = (
            (c * big_f.0 - b * big_f.1) / det,
            (a * big_f.1 - b * big_f.0) / det,
        );
        x -= NEWTON_DAMPING * (r0[0] * w.0 + r1[0] * w.1);
        y -= NEWTON_DAMPING * (r0[1] * w.0 + r1[1] * w.1);
        th -= NEWTON_DAMPING * (r0[2] * w.0 + r1[2] * w.1);
    }
    let u = (th.cos(), th.sin());
    let fp = f.eval(x, y);
    let fq = f.eval(x + delta * u.0, y + delta * u.1);
    let res = ((fq.0 - fp.0).powi(2) + (fq.1 - fp.1).powi(2)).sqrt();
    (res <= tol).then(|| (wrap01(x), wrap01(y), th.rem_euclid(TAU), res))
}

/// Number of straight geodesics of length `delta` joining `a` to `b` on the
/// flat torus, counted with orientation (each a-to-b displacement and, when
/// the points differ, each b-to-a displacement).
///
/// A geodesic from `a` to `b` is a lattice translate: its displacement is
/// `(b - a) + v` for some `v` in `Z^2`, so the count enumerates lattice
/// vectors with `|(b - a) + v| = delta` (squared comparison, relative
/// tolerance `1e-9`). The count is always finite — no two points of the flat
/// torus are joined by infinitely many geodesics of one length.
pub fn delta_conjugacy_probe(a: (f64, f64), b: (f64, f64), delta: f64) -> Result<usize> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::invalid(format!("delta must be positive, got {delta}")));
    }
    let d = (b.0 - a.0, b.1 - a.1);
    let count_for = |d: (f64, f64)| {
        let reach = delta + d.0.abs().max(d.1.abs()) + 1.0;
        let lo = -(reach.ceil() as i64);
        let hi = reach.ceil() as i64;
        let mut count = 0usize;
        for vx in lo..=hi {
            for vy in lo..=hi {
                let ex = d.0 + vx as f64;
                let ey = d.1 + vy as f64;
                if ((ex * ex + ey * ey) - delta * delta).abs() <= 1e-9 * (1.0 + delta * delta) {
                    count += 1;
                }
            }
        }
        count
    };
    let same_point = wrap01(d.0) == 0.0 && wrap01(d.1) == 0.0;
    let forward = count_for(d);
    Ok(if same_point {
        forward
    } else {
        forward + count_for((-d.0, -d.1))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine_grid() -> TorusMap {
        TorusMap::new([
            vec![TrigTerm {
                amp: 1.0,
                kx: 1,
                ky: 0,
                phase: 0.0,
            }],
            vec![TrigTerm {
                amp: 1.0,
                kx: 0,
                ky: 1,
                phase: 0.0,
            }],
        ])
        .unwrap()
    }

    fn circular_close(a: f64, b: f64, tol: f64) -> bool {
        let d = (a - b).rem_euclid(TAU);
        d < tol || TAU - d < tol
    }

    #[test]
    fn cosine_roots_land_on_the_analytic_pair() {
        for delta in [0.5, 1.0, 2.0] {
            let CircleRoots::Roots(roots) = hopf_pairs_circle(f64::cos, 512, delta).unwrap()
            else {
                panic!("cos is not constant");
            };
            assert_eq!(roots.len(), 2, "delta {delta}: {roots:?}");
            let expect = [(-delta / 2.0).rem_euclid(TAU), PI - delta / 2.0];
            for e in expect {
                assert!(
                    roots.iter().any(|&r| circular_close(r, e, 1e-9)),
                    "missing root {e} for delta {delta}: {roots:?}"
                );
            }
        }
    }

    #[test]
    fn sine_at_half_turn_vanishes_at_zero_and_pi() {
        let CircleRoots::Roots(roots) = hopf_pairs_circle(f64::sin, 512, PI).unwrap() else {
            panic!("sin is not constant");
        };
        assert_eq!(roots.len(), 2, "{roots:?}");
        assert!(roots.iter().any(|&r| circular_close(r, 0.0, 1e-9)));
        assert!(roots.iter().any(|&r| circular_close(r, PI, 1e-9)));
    }

    #[test]
    fn constant_functions_report_every_parameter() {
        assert_eq!(
            hopf_pairs_circle(|_| 3.25, 64, 1.0).unwrap(),
            CircleRoots::All
        );
    }

    #[test]
    fn sampled_functions_interpolate_and_solve() {
        let n = 1024;
        let values: Vec<f64> = (0..n).map(|i| (TAU * i as f64 / n as f64).cos()).collect();
        let g = CircleFunction::from_uniform(values).unwrap();
        assert!((g.eval(1.3) - (1.3f64).cos()).abs() < 1e-4);
        assert!((g.eval(-0.2) - g.eval(TAU - 0.2)).abs() < 1e-12, "wraparound");
        let CircleRoots::Roots(roots) = hopf_pairs_circle(|x| g.eval(x), 512, 1.0).unwrap()
        else {
            panic!("not constant");
        };
        assert_eq!(roots.len(), 2);
        // Piecewise-linear interpolation shifts the roots by O(h^2).
        for e in [(-0.5f64).rem_euclid(TAU), PI - 0.5] {
            assert!(roots.iter().any(|&r| circular_close(r, e, 1e-4)), "{roots:?}");
        }
    }

    #[test]
    fn direction_map_is_antipodal_at_the_midpoint_shift() {
        let f = sine_grid();
        let p = (0.13, 0.41);
        let delta = 0.3;
        for k in 0..64 {
            let th = TAU * k as f64 / 64.0;
            let u = (th.cos(), th.sin());
            let v1 = direction_map(&f, p, -delta / 2.0, delta, u).unwrap();
            let v2 = direction_map(&f, p, -delta / 2.0, delta, (-u.0, -u.1)).unwrap();
            let err = ((v1.0 + v2.0).powi(2) + (v1.1 + v2.1).powi(2)).sqrt();
            assert!(err < 1e-10, "direction {k}: |v(-u) + v(u)| = {err}");
        }
    }

    #[test]
    fn direction_map_approaches_the_derivative_as_delta_shrinks() {
        let f = sine_grid();
        let p = (0.37, 0.18);
        let s = 0.11;
        let u = (0.6, 0.8);
        let v = direction_map(&f, p, s, 1e-6, u).unwrap();
        let g = f.grad(p.0 + s * u.0, p.1 + s * u.1);
        let d = (
            g[0][0] * u.0 + g[0][1] * u.1,
            g[1][0] * u.0 + g[1][1] * u.1,
        );
        let dl = (d.0 * d.0 + d.1 * d.1).sqrt();
        assert!(dl > 1e-6);
        let err = ((v.0 - d.0 / dl).powi(2) + (v.1 - d.1 / dl).powi(2)).sqrt();
        assert!(err < 1e-4, "direction vs derivative: {err}");
    }

    #[test]
    fn constant_maps_are_all_coincidence() {
        let f = TorusMap::new([vec![], vec![]]).unwrap();
        let err = direction_map(&f, (0.2, 0.7), 0.0, 0.4, (1.0, 0.0)).unwrap_err();
        assert!(err.to_string().contains("coincidence encountered"));
    }

    #[test]
    fn degree_is_odd_at_the_midpoint_shift_and_zero_at_a_maximizer() {
        let f = sine_grid();
        let delta = 0.3;
        for p in [(0.13, 0.41), (0.62, 0.29), (0.85, 0.77)] {
            let d = direction_map_degree(&f, p, -delta / 2.0, delta, 256).unwrap();
            assert!(d % 2 != 0, "degree {d} at {p:?} should be odd");
        }
        // Grid maximizer of the second output coordinate (sin 2*pi*y): first
        // hit scanning a 64x64 grid row-major is (0, 1/4).
        let g = 64;
        let mut best = (0, 0);
        let mut best_v = f64::NEG_INFINITY;
        for i in 0..g {
            for j in 0..g {
                let v = f.eval(i as f64 / g as f64, j as f64 / g as f64).1;
                if v > best_v {
                    best_v = v;
                    best = (i, j);
                }
            }
        }
        let p = (best.0 as f64 / g as f64, best.1 as f64 / g as f64);
        assert_eq!(p, (0.0, 0.25));
        let d = direction_map_degree(&f, p, 0.0, delta, 256).unwrap();
        assert_eq!(d, 0, "difference vectors stay in a half-plane");
    }

    #[test]
    fn degree_is_constant_between_coincidences() {
        let f = TorusMap::new([
            vec![TrigTerm {
                amp: 0.1,
                kx: 1,
                ky: 0,
                phase: 0.0,
            }],
            vec![TrigTerm {
                amp: 0.1,
                kx: 0,
                ky: 1,
                phase: 0.0,
            }],
        ])
        .unwrap();
        let delta = 0.3;
        let p = (0.13, 0.41);
        // Coincidences of this map happen where w = s + delta/2 hits +-0.12
        // or +-0.16 (mod 0.5, from the axis directions) or |w| >= 0.2 (both
        // cosine factors vanishing); w in (-0.12, 0.12) keeps clear, so s
        // sweeps a coincidence-free interval around -delta/2.
        let degrees: Vec<i64> = [-0.22, -0.18, -0.15, -0.12, -0.08]
            .iter()
            .map(|&s| direction_map_degree(&f, p, s, delta, 256).unwrap())
            .collect();
        assert!(
            degrees.windows(2).all(|w| w[0] == w[1]),
            "degree jumped without a coincidence: {degrees:?}"
        );
    }

    #[test]
    fn coincidence_family_solves_the_sine_grid() {
        let f = sine_grid();
        let pairs =
            find_coincidence_family(&f, 0.5, 12, 1e-9, 4000, Parallelism::Sequential).unwrap();
        assert!(pairs.len() >= 50, "only {} pairs", pairs.len());
        for pair in &pairs {
            assert!(pair.residual <= 1e-9);
            let ul = (pair.u[0].powi(2) + pair.u[1].powi(2)).sqrt();
            assert!((ul - 1.0).abs() < 1e-12);
            let e = pair.endpoint();
            let fa = f.eval(pair.p[0], pair.p[1]);
            let fb = f.eval(e[0], e[1]);
            let res = ((fb.0 - fa.0).powi(2) + (fb.1 - fa.1).powi(2)).sqrt();
            assert!(res <= 1e-6, "endpoint residual {res}");
        }
        // The vertical-direction branch keeps x where it started and pins y
        // to a zero of sin(2*pi*y): pairs near x = 1/4, u = (0, 1) exist.
        assert!(
            pairs.iter().any(|pr| {
                wrap_half(pr.p[0] - 0.25) < 0.05 && (pr.u[0].abs() < 0.05) && pr.u[1] > 0.9
            }),
            "no pair near x = 1/4 with u = (0, 1)"
        );
    }

    #[test]
    fn constant_maps_converge_everywhere_and_respect_the_cap() {
        let f = TorusMap::new([vec![], vec![]]).unwrap();
        let pairs =
            find_coincidence_family(&f, 0.3, 8, 1e-9, 25, Parallelism::Sequential).unwrap();
        assert_eq!(pairs.len(), 25);
        assert!(pairs.iter().all(|p| p.residual == 0.0));
    }

    #[test]
    fn parallel_and_sequential_families_match() {
        let f = sine_grid();
        let a = find_coincidence_family(&f, 0.5, 8, 1e-9, 200, Parallelism::Sequential).unwrap();
        let b = find_coincidence_family(&f, 0.5, 8, 1e-9, 200, Parallelism::Parallel).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.p, y.p);
            assert_eq!(x.u, y.u);
        }
    }

    #[test]
    fn geodesic_counts_are_finite_and_match_the_lattice() {
        assert_eq!(delta_conjugacy_probe((0.4, 0.9), (0.4, 0.9), 1.0).unwrap(), 4);
        assert_eq!(delta_conjugacy_probe((0.4, 0.9), (0.4, 0.9), 0.3).unwrap(), 0);
        let c = delta_conjugacy_probe((0.1, 0.5), (0.4, 0.5), 0.3).unwrap();
        assert_eq!(c, 2, "one displacement each way");
        // Half-diagonal points: all four displacements (+-1/2, +-1/2) have
        // length sqrt(2)/2, each counted in both orientations.
        let c = delta_conjugacy_probe((0.0, 0.0), (0.5, 0.5), 2f64.sqrt() / 2.0).unwrap();
        assert_eq!(c, 8);
        assert!(delta_conjugacy_probe((0.0, 0.0), (0.5, 0.5), -1.0).is_err());
    }
}
