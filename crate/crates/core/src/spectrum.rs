//! Grid classification over the parameter torus and distance spectra.
//!
//! The parameter square `[0, 2pi)^2` is sampled on an `N x N` grid
//! (`params[i] = 2*pi*i / N`). Every off-diagonal cell is classified once and
//! stores the **strongest** neighbor type holding for its pair, so a single
//! pass serves all four spectra. The angular distance of a grid pair depends
//! only on the circular offset `k = min(|i-j|, N-|i-j|)` — that is what gives
//! the picture its diagonal-band structure — so the spectrum of a kind is
//! read off per offset: an offset is *realized* when its diagonal contains at
//! least one cell of the kind (or stronger). Realized offsets are merged into
//! closed intervals, bridging holes up to the gap `g = 8*pi / N`.
//!
//! Rows of the grid are classified independently (in parallel when requested)
//! and reduced in row-major order, so parallel and sequential runs produce
//! identical grids bit for bit.

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complement::{build_component_map, ComponentMap, DEFAULT_MARGIN};
use crate::curves::SampledLoop;
use crate::geometry::{segment_hits_curve, PlanarPoint, Segment};
use crate::neighbors::{NeighborKind, ObstacleSet, Tolerances};
use crate::par::{map_indexed, Parallelism};
use crate::{Error, Result};

/// Smallest accepted classification grid.
pub const MIN_GRID: usize = 64;
/// Smallest component-map resolution accepted for topological spectra.
pub const MIN_TOP_RES: usize = 256;

/// Strongest neighbor type holding for one grid cell.
///
/// The chain plain => spherical => visual => topological means a cell coded
/// `Spherical` is also a visual and topological pair; [`CellCode::has`]
/// answers membership per kind under that convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum CellCode {
    /// The excluded diagonal `i == j`.
    Diagonal,
    /// No neighbor relation holds.
    None,
    Plain,
    Spherical,
    Visual,
    Topological,
}

impl CellCode {
    /// Whether the cell's pair is a `kind`-neighbor.
    pub fn has(self, kind: NeighborKind) -> bool {
        let rank = match self {
            CellCode::Diagonal | CellCode::None => return false,
            CellCode::Plain => 0,
            CellCode::Spherical => 1,
            CellCode::Visual => 2,
            CellCode::Topological => 3,
        };
        let want = match kind {
            NeighborKind::Plain => 0,
            NeighborKind::Spherical => 1,
            NeighborKind::Visual => 2,
            NeighborKind::Topological => 3,
        };
        rank <= want
    }
}

/// Classified `N x N` parameter grid: symmetric, diagonal excluded.
#[derive(Debug, Clone)]
pub struct TorusGrid {
    n: usize,
    params: Vec<f64>,
    /// Row-major cell codes, `n * n` entries.
    cells: Vec<CellCode>,
    top_valid: bool,
}

impl TorusGrid {
    /// Grid size `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Grid parameters `2*pi*i / N`.
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Code of the cell in row `i` (first parameter), column `j` (second).
    pub fn cell(&self, i: usize, j: usize) -> CellCode {
        self.cells[i * self.n + j]
    }

    /// Whether topological cells were actually computed. Grids built without
    /// a component map leave the topological column at the visual fallback.
    pub fn top_valid(&self) -> bool {
        self.top_valid
    }

    /// Circular offset of the pair `(i, j)`, in `0..=N/2`.
    pub fn offset(&self, i: usize, j: usize) -> usize {
        let d = i.abs_diff(j);
        d.min(self.n - d)
    }

    /// Angular distance realized by the pair `(i, j)`: offset times step.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.offset(i, j) as f64 * TAU / self.n as f64
    }
}

/// Classifies every off-diagonal pair of the `n`-point parameter grid.
///
/// One obstacle set is shared across all pairs, and each image point's
/// nearby-component candidates are looked up once, so the per-pair work is
/// the bisector gap scan plus (for non-spherical pairs) one segment sweep.
/// Pass a component map to enable the topological column; without one the
/// topological test cannot run, cells beyond visual are coded `None`, and
/// [`TorusGrid::top_valid`] is false.
pub fn classify_grid(
    curve: &SampledLoop,
    n: usize,
    tol: &Tolerances,
    cmap: Option<&ComponentMap>,
    mode: Parallelism,
) -> Result<TorusGrid> {
    if n < MIN_GRID {
        return Err(Error::invalid(format!("grid size {n} < {MIN_GRID}")));
    }
    let params: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
    let pts: Vec<PlanarPoint> = params.iter().map(|&t| curve.eval(t)).collect();
    let obs = ObstacleSet::build(curve, tol.densify);
    let slack = tol.disk_slack();
    let ids: Option<Vec<Vec<i32>>> = cmap.map(|cm| {
        let radius = cm.probe_radius();
        pts.iter().map(|&p| cm.ids_near(p, radius)).collect()
    });

    // Row i holds the codes for columns i+1..n; the lower triangle is the
    // mirror image, so each pair is classified exactly once.
    let rows: Vec<Vec<CellCode>> = map_indexed(n, mode, |i| {
        (i + 1..n)
            .map(|j| {
                let p = pts[i];
                let q = pts[j];
                if p.dist(q) <= tol.eps_img {
                    return CellCode::Plain;
                }
                if obs.gap(p, q, tol.excl, slack).is_some() {
                    return CellCode::Spherical;
                }
                if !segment_hits_curve(Segment::new(p, q), curve, tol.excl) {
                    return CellCode::Visual;
                }
                if let Some(ids) = &ids {
                    if ids[i].iter().any(|id| ids[j].contains(id)) {
                        return CellCode::Topological;
                    }
                }
                CellCode::None
            })
            .collect()
    });

    let mut cells = vec![CellCode::Diagonal; n * n];
    for (i, row) in rows.iter().enumerate() {
        for (k, &code) in row.iter().enumerate() {
            let j = i + 1 + k;
            cells[i * n + j] = code;
            cells[j * n + i] = code;
        }
    }
    Ok(TorusGrid {
        n,
        params,
        cells,
        top_valid: cmap.is_some(),
    })
}

/// Realized-pair counts per distance bin: `counts[k]` unordered grid pairs
/// realize the distance `k * width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSummary {
    /// Bin width, the grid step `2*pi / N`.
    pub width: f64,
    /// One entry per offset `0..=N/2`; index 0 (the diagonal) stays 0.
    pub counts: Vec<u64>,
}

/// The set of angular distances realized by `kind`-neighbor pairs of one
/// grid, as a union of closed intervals in `[0, pi]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistanceSpectrum {
    pub kind: NeighborKind,
    /// Grid size the spectrum was sampled on.
    pub grid: usize,
    /// Gap threshold that merged sampled distances into intervals.
    pub gap: f64,
    /// Disjoint closed intervals `[lo, hi]`, sorted ascending. Isolated
    /// distances appear as degenerate intervals.
    pub intervals: Vec<(f64, f64)>,
    /// Total length of the intervals.
    pub measure: f64,
    pub bins: BinSummary,
}

impl DistanceSpectrum {
    /// Whether `d` lies in some interval, within `pad`.
    pub fn covers(&self, d: f64, pad: f64) -> bool {
        self.intervals
            .iter()
            .any(|&(lo, hi)| d >= lo - pad && d <= hi + pad)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DistanceSpectrum = serde_json::from_str(text)?;
        if !(spec.gap > 0.0) || spec.grid < MIN_GRID {
            return Err(Error::invalid("malformed spectrum file".to_string()));
        }
        Ok(spec)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Extracts the `kind` spectrum from a classified grid.
///
/// An offset is realized when any cell at that offset holds the kind;
/// realized offsets merge into one closed interval while consecutive ones are
/// at most `8*pi / N` apart (holes of up to three offsets are bridged).
/// Every realized distance therefore lies in some interval. Requesting the
/// topological kind from a grid built without a component map is refused
/// rather than silently served from the visual fallback.
pub fn spectrum_of(grid: &TorusGrid, kind: NeighborKind) -> Result<DistanceSpectrum> {
    if kind == NeighborKind::Topological && !grid.top_valid {
        return Err(Error::invalid(
            "topological spectrum requested from a grid built without a component map".to_string(),
        ));
    }
    let n = grid.n;
    let step = TAU / n as f64;
    let mut counts = vec![0u64; n / 2 + 1];
    for i in 0..n {
        for j in i + 1..n {
            if grid.cell(i, j).has(kind) {
                counts[grid.offset(i, j)] += 1;
            }
        }
    }

    // gap = 8*pi/N = 4 * step, so offsets merge exactly when k2 - k1 <= 4;
    // the comparison is integral and immune to rounding.
    let gap = 8.0 * PI / n as f64;
    const HOLE: usize = 4;
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut run: Option<(usize, usize)> = None;
    for (k, &c) in counts.iter().enumerate().skip(1) {
        if c == 0 {
            continue;
        }
        run = match run {
            Some((a, b)) if k - b <= HOLE => Some((a, k)),
            Some((a, b)) => {
                intervals.push((a as f64 * step, b as f64 * step));
                Some((k, k))
            }
            None => Some((k, k)),
        };
    }
    if let Some((a, b)) = run {
        intervals.push((a as f64 * step, b as f64 * step));
    }
    let measure = intervals.iter().map(|(lo, hi)| hi - lo).sum();

    Ok(DistanceSpectrum {
        kind,
        grid: n,
        gap,
        intervals,
        measure,
        bins: BinSummary {
            width: step,
            counts,
        },
    })
}

/// One-call pipeline: classify the grid, then extract the `kind` spectrum.
///
/// `r` is the component-map resolution and is consulted only for the
/// topological kind (where `r >= 256` is required); other kinds skip the map
/// entirely. Returns the spectrum together with the grid so further kinds
/// can be read off without re-classifying.
pub fn compute_spectrum(
    curve: &SampledLoop,
    kind: NeighborKind,
    n: usize,
    tol: &Tolerances,
    r: usize,
    mode: Parallelism,
) -> Result<(DistanceSpectrum, TorusGrid)> {
    let cmap = if kind == NeighborKind::Topological {
        if r < MIN_TOP_RES {
            return Err(Error::invalid(format!(
                "component-map resolution {r} < {MIN_TOP_RES} for a topological spectrum"
            )));
        }
        Some(build_component_map(curve, r, DEFAULT_MARGIN)?)
    } else {
        None
    };
    let grid = classify_grid(curve, n, tol, cmap.as_ref(), mode)?;
    let spec = spectrum_of(&grid, kind)?;
    Ok((spec, grid))
}

/// Number of distinct bins of width `bin` hit by the spectrum's realized
/// distances.
pub fn distinct_distances(spec: &DistanceSpectrum, bin: f64) -> Result<usize> {
    if !(bin > 0.0) || !bin.is_finite() {
        return Err(Error::invalid(format!(
            "bin width must be positive and finite, got {bin}"
        )));
    }
    let mut seen = BTreeSet::new();
    for (k, &c) in spec.bins.counts.iter().enumerate() {
        if c > 0 {
            seen.insert((k as f64 * spec.bins.width / bin).floor() as i64);
        }
    }
    Ok(seen.len())
}

/// Writes the grid as a binary PPM image: row `i` is the first parameter,
/// column `j` the second; `kind`-neighbor pairs are red `(255, 0, 0)`, all
/// other off-diagonal cells green `(0, 160, 0)`, the excluded diagonal white.
/// The output is byte-for-byte determined by the grid.
pub fn export_torus_ppm(grid: &TorusGrid, kind: NeighborKind, path: &Path) -> Result<()> {
    if kind == NeighborKind::Topological && !grid.top_valid {
        return Err(Error::invalid(
            "topological picture requested from a grid built without a component map".to_string(),
        ));
    }
    let n = grid.n;
    let mut buf = Vec::with_capacity(16 + 3 * n * n);
    write!(&mut buf, "P6\n{n} {n}\n255\n")?;
    for i in 0..n {
        for j in 0..n {
            let px: [u8; 3] = match grid.cell(i, j) {
                CellCode::Diagonal => [255, 255, 255],
                c if c.has(kind) => [255, 0, 0],
                _ => [0, 160, 0],
            };
            buf.extend_from_slice(&px);
        }
    }
    std::fs::write(path, &buf)?;
    Ok(())
}

/// Counts the red diagonal bands of the `kind` picture.
///
/// Diagonal `s` (the cells `(i, (i+s) mod N)`, `s = 1..N-1`) is red when any
/// of its cells holds the kind. Consecutive red diagonals form one band,
/// bridging up to `hole` missing diagonals, and the scan wraps through the
/// excluded main diagonal so the band straddling it is counted once. Bands
/// mirrored across the main diagonal are counted separately, matching what
/// the picture shows.
pub fn red_band_count(grid: &TorusGrid, kind: NeighborKind, hole: usize) -> Result<usize> {
    if kind == NeighborKind::Topological && !grid.top_valid {
        return Err(Error::invalid(
            "topological bands requested from a grid built without a component map".to_string(),
        ));
    }
    let n = grid.n;
    let red: Vec<bool> = (1..n)
        .map(|s| (0..n).any(|i| grid.cell(i, (i + s) % n).has(kind)))
        .collect();
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for (idx, &r) in red.iter().enumerate() {
        let s = idx + 1;
        if !r {
            continue;
        }
        match runs.last_mut() {
            Some((_, b)) if s - *b <= hole + 1 => *b = s,
            _ => runs.push((s, s)),
        }
    }
    if runs.len() >= 2 {
        let (first_start, _) = runs[0];
        let (_, last_end) = *runs.last().unwrap();
        // Wrap through s = 0: the main diagonal has zero width, so it counts
        // as one missing diagonal like any other hole.
        if first_start + n - last_end <= hole + 1 {
            runs.pop();
        }
    }
    Ok(runs.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_circle, gen_folded};
    use crate::neighbors::classify_pair;

    fn vis_grid(curve: &SampledLoop, n: usize) -> TorusGrid {
        let tol = Tolerances::for_loop(curve);
        classify_grid(curve, n, &tol, None, Parallelism::Sequential).unwrap()
    }

    #[test]
    fn circle_visual_spectrum_is_one_interval_up_to_pi() {
        let c = gen_circle(512, 1, 0.0).unwrap();
        let grid = vis_grid(&c, 128);
        let spec = spectrum_of(&grid, NeighborKind::Visual).unwrap();
        let step = TAU / 128.0;
        assert_eq!(spec.intervals.len(), 1, "intervals: {:?}", spec.intervals);
        assert!((spec.intervals[0].0 - step).abs() < 1e-12);
        assert!((spec.intervals[0].1 - PI).abs() < 1e-12);
        assert!((spec.measure - (PI - step)).abs() < 1e-12);
        // Offsets 1..=63 each have 128 unordered pairs; the antipodal offset
        // 64 has 64. All of them separate at bin width 0.01.
        assert_eq!(spec.bins.counts[0], 0);
        assert_eq!(spec.bins.counts[1], 128);
        assert_eq!(spec.bins.counts[64], 64);
        assert_eq!(distinct_distances(&spec, 0.01).unwrap(), 64);
    }

    #[test]
    fn plain_spectrum_is_empty_on_a_coarse_grid_and_kinds_are_monotone() {
        // Grid step 2*pi/128 is about 0.049 while eps_img is 1.5 edges of a
        // 512-gon, about 0.018: no grid pair is plain.
        let c = gen_circle(512, 1, 0.0).unwrap();
        let grid = vis_grid(&c, 128);
        let plain = spectrum_of(&grid, NeighborKind::Plain).unwrap();
        assert!(plain.intervals.is_empty());
        assert_eq!(plain.measure, 0.0);
        assert_eq!(distinct_distances(&plain, 0.01).unwrap(), 0);

        let sph = spectrum_of(&grid, NeighborKind::Spherical).unwrap();
        let vis = spectrum_of(&grid, NeighborKind::Visual).unwrap();
        assert!(plain.measure <= sph.measure && sph.measure <= vis.measure);
    }

    #[test]
    fn folded_spectra_are_monotone_and_refine_consistently() {
        let c = gen_folded(512, 0.3).unwrap();
        let tol = Tolerances::for_loop(&c);
        let coarse = classify_grid(&c, 64, &tol, None, Parallelism::Sequential).unwrap();
        let fine = classify_grid(&c, 128, &tol, None, Parallelism::Sequential).unwrap();
        for grid in [&coarse, &fine] {
            let plain = spectrum_of(grid, NeighborKind::Plain).unwrap();
            let sph = spectrum_of(grid, NeighborKind::Spherical).unwrap();
            let vis = spectrum_of(grid, NeighborKind::Visual).unwrap();
            assert!(plain.measure <= sph.measure && sph.measure <= vis.measure);
            // The fold makes image angles near pi coincide for parameters up
            // to about 0.55 apart, so the plain spectrum reaches well beyond
            // anything the coarse grid could see along the diagonal.
            let far = plain
                .bins
                .counts
                .iter()
                .enumerate()
                .rev()
                .find(|(_, &c)| c > 0)
                .map(|(k, _)| k)
                .unwrap_or(0);
            let reach = far as f64 * TAU / grid.n() as f64;
            assert!(reach >= 0.3, "fold contact too close: distance {reach}");
        }
        // Refinement: each coarse interval stays inside the fine union
        // expanded by the coarse gap.
        let sc = spectrum_of(&coarse, NeighborKind::Visual).unwrap();
        let sf = spectrum_of(&fine, NeighborKind::Visual).unwrap();
        for &(lo, hi) in &sc.intervals {
            for x in [lo, 0.5 * (lo + hi), hi] {
                assert!(sf.covers(x, sc.gap), "{x} escaped on refinement");
            }
        }
    }

    #[test]
    fn parameter_shift_leaves_the_intervals_in_place() {
        let base = gen_folded(512, 0.3).unwrap();
        let shift = 0.37;
        let mut pairs: Vec<(f64, PlanarPoint)> = base
            .params()
            .iter()
            .zip(base.points())
            .map(|(&t, &p)| {
                let mut v = t + shift;
                if v >= TAU {
                    v -= TAU;
                }
                (v, p)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let shifted = crate::curves::make_loop(
            pairs.iter().map(|&(t, _)| t).collect(),
            pairs.iter().map(|&(_, p)| p).collect(),
            None,
        )
        .unwrap();

        let a = spectrum_of(&vis_grid(&base, 64), NeighborKind::Visual).unwrap();
        let b = spectrum_of(&vis_grid(&shifted, 64), NeighborKind::Visual).unwrap();
        let pad = TAU / 64.0 + 1e-9;
        for (x, y) in [(&a, &b), (&b, &a)] {
            for &(lo, hi) in &x.intervals {
                assert!(y.covers(lo, pad) && y.covers(hi, pad));
            }
        }
    }

    #[test]
    fn cell_codes_agree_with_the_pair_classifier() {
        let c = gen_folded(512, 0.3).unwrap();
        let tol = Tolerances::for_loop(&c);
        let cmap = build_component_map(&c, 256, DEFAULT_MARGIN).unwrap();
        let grid = classify_grid(&c, 64, &tol, Some(&cmap), Parallelism::Sequential).unwrap();
        assert!(grid.top_valid());
        for i in (0..64).step_by(7) {
            for j in ((i + 1)..64).step_by(5) {
                let v =
                    classify_pair(&c, grid.params()[i], grid.params()[j], &tol, Some(&cmap))
                        .unwrap();
                for kind in NeighborKind::ALL {
                    assert_eq!(
                        grid.cell(i, j).has(kind),
                        v.has(kind),
                        "disagreement at ({i}, {j}) for {}",
                        kind.label()
                    );
                }
            }
        }
    }

    #[test]
    fn parallel_and_sequential_grids_match() {
        let c = gen_folded(512, 0.3).unwrap();
        let tol = Tolerances::for_loop(&c);
        let seq = classify_grid(&c, 64, &tol, None, Parallelism::Sequential).unwrap();
        let par = classify_grid(&c, 64, &tol, None, Parallelism::Parallel).unwrap();
        for i in 0..64 {
            for j in 0..64 {
                assert_eq!(seq.cell(i, j), par.cell(i, j));
            }
        }
    }

    #[test]
    fn topological_spectra_require_a_component_map() {
        let c = gen_circle(512, 1, 0.0).unwrap();
        let tol = Tolerances::for_loop(&c);
        let grid = classify_grid(&c, 64, &tol, None, Parallelism::Sequential).unwrap();
        assert!(!grid.top_valid());
        assert!(spectrum_of(&grid, NeighborKind::Topological).is_err());
        assert!(export_torus_ppm(&grid, NeighborKind::Topological, Path::new("/dev/null")).is_err());
        assert!(
            compute_spectrum(&c, NeighborKind::Topological, 64, &tol, 128, Parallelism::Sequential)
                .is_err(),
            "resolution below the topological minimum must be rejected"
        );
        let (top, grid) =
            compute_spectrum(&c, NeighborKind::Topological, 64, &tol, 256, Parallelism::Sequential)
                .unwrap();
        assert!(grid.top_valid());
        let vis = spectrum_of(&grid, NeighborKind::Visual).unwrap();
        assert!(top.measure >= vis.measure - 1e-12);
    }

    #[test]
    fn ppm_export_is_sized_and_deterministic() {
        let c = gen_circle(512, 1, 0.0).unwrap();
        let grid = vis_grid(&c, 64);
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.ppm");
        let p2 = dir.path().join("b.ppm");
        export_torus_ppm(&grid, NeighborKind::Visual, &p1).unwrap();
        export_torus_ppm(&grid, NeighborKind::Visual, &p2).unwrap();
        let b1 = std::fs::read(&p1).unwrap();
        let b2 = std::fs::read(&p2).unwrap();
        assert_eq!(b1, b2);
        let header = b"P6\n64 64\n255\n";
        assert_eq!(&b1[..header.len()], header);
        assert_eq!(b1.len(), header.len() + 3 * 64 * 64);
        // Pixel (0, 0) is the white diagonal; (0, 1) is a red visual pair.
        assert_eq!(&b1[header.len()..header.len() + 3], &[255, 255, 255]);
        assert_eq!(&b1[header.len() + 3..header.len() + 6], &[255, 0, 0]);
    }

    #[test]
    fn band_counting_handles_runs_holes_and_wrap() {
        let c = gen_circle(512, 1, 0.0).unwrap();
        let grid = vis_grid(&c, 64);
        // Every diagonal of the circle picture is red: one band.
        assert_eq!(red_band_count(&grid, NeighborKind::Visual, 0).unwrap(), 1);
        // And no plain pairs at this grid spacing: zero bands.
        assert_eq!(red_band_count(&grid, NeighborKind::Plain, 0).unwrap(), 0);

        let n = 64;
        let mut cells = vec![CellCode::Diagonal; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    cells[i * n + j] = CellCode::None;
                }
            }
        }
        let mut paint = |s: usize| {
            let (i, j) = (0usize, s % n);
            cells[i * n + j] = CellCode::Visual;
            cells[j * n + i] = CellCode::Visual;
        };
        // Diagonals 5..7 and 20..21 — the symmetric partners 43..44 and
        // 57..59 turn red automatically.
        for s in [5, 6, 7, 20, 21] {
            paint(s);
        }
        let grid = TorusGrid {
            n,
            params: (0..n).map(|i| TAU * i as f64 / n as f64).collect(),
            cells,
            top_valid: false,
        };
        assert_eq!(red_band_count(&grid, NeighborKind::Visual, 0).unwrap(), 4);
        // Between 57..59 and 5..7 lie nine missing diagonals (60..63, the
        // main diagonal, 1..4), so the wrap merge starts at hole = 9.
        assert_eq!(red_band_count(&grid, NeighborKind::Visual, 4).unwrap(), 4);
        assert_eq!(red_band_count(&grid, NeighborKind::Visual, 9).unwrap(), 3);
    }

    #[test]
    fn spectra_round_trip_through_json() {
        let c = gen_circle(512, 1, 0.0).unwrap();
        let grid = vis_grid(&c, 64);
        let spec = spectrum_of(&grid, NeighborKind::Visual).unwrap();
        let text = spec.to_json().unwrap();
        assert!(text.contains("\"kind\":\"vis\""), "json: {text}");
        assert!(text.contains("\"grid\":64"));
        let back = DistanceSpectrum::from_json(&text).unwrap();
        assert_eq!(back.kind, spec.kind);
        assert_eq!(back.grid, spec.grid);
        assert_eq!(back.intervals, spec.intervals);
        assert_eq!(back.bins, spec.bins);
        assert_eq!(back.measure.to_bits(), spec.measure.to_bits());
    }

    #[test]
    fn rejects_undersized_grids_and_bad_bins() {
        let c = gen_circle(512, 1, 0.0).unwrap();
        let tol = Tolerances::for_loop(&c);
        assert!(classify_grid(&c, 63, &tol, None, Parallelism::Sequential).is_err());
        let spec = spectrum_of(&vis_grid(&c, 64), NeighborKind::Visual).unwrap();
        assert!(distinct_distances(&spec, 0.0).is_err());
        assert!(distinct_distances(&spec, f64::NAN).is_err());
    }
}
