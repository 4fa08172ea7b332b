//! Sampled closed curves: strictly increasing parameter angles in `[0, 2*pi)`
//! paired with image points, evaluated by linear interpolation with seam
//! wraparound, plus a versioned JSON file format.

use crate::geometry::{Bbox, PlanarPoint, GEOM_TOL_FACTOR};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::path::Path;

/// Minimum number of samples a loop must carry.
pub const MIN_SAMPLES: usize = 8;

/// Largest admissible image edge as a fraction of the bbox diagonal; longer
/// edges indicate wild under-sampling and are rejected.
pub const MAX_STEP_FACTOR: f64 = 0.25;

/// A piecewise-linear closed curve `S^1 -> R^2`.
///
/// `params` are strictly increasing angles in `[0, 2*pi)`; the seam segment
/// joins the last sample back to the first. Construct via [`make_loop`].
#[derive(Debug, Clone)]
pub struct SampledLoop {
    params: Vec<f64>,
    points: Vec<PlanarPoint>,
    meta: Option<serde_json::Value>,
    bbox: Bbox,
    max_edge: f64,
}

/// Validates samples and builds a [`SampledLoop`].
pub fn make_loop(
    params: Vec<f64>,
    points: Vec<PlanarPoint>,
    meta: Option<serde_json::Value>,
) -> Result<SampledLoop> {
    if params.len() != points.len() {
        return Err(Error::invalid(format!(
            "parameter/point count mismatch: {} vs {}",
            params.len(),
            points.len()
        )));
    }
    if params.len() < MIN_SAMPLES {
        return Err(Error::invalid(format!(
            "too few samples: {} < {MIN_SAMPLES}",
            params.len()
        )));
    }
    for &t in &params {
        if !t.is_finite() || !(0.0..TAU).contains(&t) {
            return Err(Error::invalid(format!(
                "parameters must lie in [0, 2*pi), got {t}"
            )));
        }
    }
    for w in params.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::invalid(format!(
                "parameters not strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
    }
    for p in &points {
        PlanarPoint::new(p.x, p.y)?;
    }
    let bbox = Bbox::of_points(&points);
    let diag = bbox.diagonal();
    let mut max_edge = 0.0f64;
    let n = points.len();
    for i in 0..n {
        max_edge = max_edge.max(points[i].dist(points[(i + 1) % n]));
    }
    if diag > 0.0 && max_edge > MAX_STEP_FACTOR * diag {
        return Err(Error::invalid(format!(
            "under-sampled curve: image edge {max_edge:.4} exceeds {MAX_STEP_FACTOR} * bbox diagonal {diag:.4}"
        )));
    }
    Ok(SampledLoop {
        params,
        points,
        meta,
        bbox,
        max_edge,
    })
}

impl SampledLoop {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires MIN_SAMPLES points
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[PlanarPoint] {
        &self.points
    }

    pub fn meta(&self) -> Option<&serde_json::Value> {
        self.meta.as_ref()
    }

    pub fn bbox(&self) -> &Bbox {
        &self.bbox
    }

    /// Longest image edge (the sampling pitch `h` tolerances derive from).
    pub fn max_edge(&self) -> f64 {
        self.max_edge
    }

    /// Absolute collinearity/tangency tolerance for this curve.
    pub fn geom_tol(&self) -> f64 {
        GEOM_TOL_FACTOR * self.bbox.diagonal()
    }

    /// All polyline edges, seam included, in sample order.
    pub fn edges(&self) -> impl Iterator<Item = (PlanarPoint, PlanarPoint)> + '_ {
        let n = self.points.len();
        (0..n).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    /// Piecewise-linear evaluation with seam wraparound. Evaluation at a
    /// stored parameter returns the stored point bit-exactly.
    pub fn eval(&self, t: f64) -> PlanarPoint {
        let t = crate::geometry::normalize_angle(t);
        let n = self.params.len();
        if t < self.params[0] {
            // Seam segment, approached from the low side.
            return self.seam_eval(t + TAU);
        }
        // Largest i with params[i] <= t.
        let i = match self.params.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(i) => return self.points[i],
            Err(ins) => ins - 1,
        };
        if i == n - 1 {
            return self.seam_eval(t);
        }
        let (t0, t1) = (self.params[i], self.params[i + 1]);
        let frac = (t - t0) / (t1 - t0);
        self.points[i].lerp(self.points[i + 1], frac)
    }

    /// Interpolates on the seam edge for `t` in `[params[n-1], params[0]+2*pi]`.
    fn seam_eval(&self, t: f64) -> PlanarPoint {
        let n = self.params.len();
        let t0 = self.params[n - 1];
        let t1 = self.params[0] + TAU;
        if t <= t0 {
            return self.points[n - 1];
        }
        let frac = (t - t0) / (t1 - t0);
        if frac >= 1.0 {
            return self.points[0];
        }
        self.points[n - 1].lerp(self.points[0], frac)
    }

    /// Re-samples onto the uniform grid `t_i = 2*pi*i/n`. Idempotent when the
    /// loop already uses exactly that grid.
    pub fn resample(&self, n: usize) -> Result<SampledLoop> {
        let params: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let points = params.iter().map(|&t| self.eval(t)).collect();
        make_loop(params, points, self.meta.clone())
    }
}

/// On-disk form: `{"version":1,"closed":true,"samples":[[t,x,y],...],"meta":{}}`.
#[derive(Debug, Serialize, Deserialize)]
struct CurveFile {
    version: u32,
    closed: bool,
    samples: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
}

/// Serializes a loop to the versioned JSON format (lossless f64 round-trip).
pub fn to_json(curve: &SampledLoop) -> Result<String> {
    let samples = curve
        .params
        .iter()
        .zip(&curve.points)
        .map(|(&t, p)| [t, p.x, p.y])
        .collect();
    let file = CurveFile {
        version: 1,
        closed: true,
        samples,
        meta: curve.meta.clone(),
    };
    Ok(serde_json::to_string(&file)?)
}

/// Parses the versioned JSON format and validates the loop.
pub fn from_json(text: &str) -> Result<SampledLoop> {
    let file: CurveFile = serde_json::from_str(text)?;
    if file.version != 1 {
        return Err(Error::invalid(format!(
            "unsupported curve file version {}",
            file.version
        )));
    }
    if !file.closed {
        return Err(Error::invalid(
            "curve file must describe a closed curve".to_string(),
        ));
    }
    let mut params = Vec::with_capacity(file.samples.len());
    let mut points = Vec::with_capacity(file.samples.len());
    for [t, x, y] in file.samples {
        params.push(t);
        points.push(PlanarPoint::new(x, y)?);
    }
    make_loop(params, points, file.meta)
}

pub fn save_curve(curve: &SampledLoop, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(curve)?)?;
    Ok(())
}

pub fn load_curve(path: &Path) -> Result<SampledLoop> {
    from_json(&std::fs::read_to_string(path)?)
}
