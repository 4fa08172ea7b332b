//! Neighbor-distance spectra of sampled closed planar curves.
//!
//! A closed curve is a piecewise-linear loop `f : S^1 -> R^2` given by samples.
//! Two parameters `a != b` can be related in four progressively weaker ways:
//!
//! * **plain** — their image points coincide (within an image tolerance);
//! * **spherical** — some closed disk has both image points on its boundary and
//!   no curve point in its interior;
//! * **visual** — the open segment between the image points misses the curve;
//! * **topological** — some path joins the image points meeting the curve only
//!   at its endpoints (both points lie on the boundary of a common complement
//!   component).
//!
//! Each relation implies the next, so the sets of realized angular distances
//! (subsets of `[0, pi]`) are nested. This crate classifies all pairs on a
//! parameter grid, extracts those distance sets as interval unions, rasterizes
//! the classification as a colored square ("torus picture"), analyzes the
//! complement of the image (winding indices, inscribed disks with multiple
//! tangencies, chords, ruled chord sequences), and solves the circle/torus
//! coincidence equations `f(x + delta) = f(x)` numerically.
//!
//! Modules, bottom-up: [`geometry`] (points, segments, winding, nearest
//! points), [`curves`] (sampled loops and their JSON files), [`neighbors`]
//! (pair classification), [`complement`] (raster component maps and chord
//! machinery), [`generators`] (example curve families), [`spectrum`] (grid
//! classification and distance spectra), [`hopf`] (coincidence solvers).
//!
//! With the default `parallel` feature the grid classification and the seed
//! refinement fan out via rayon; results are reduced in row-major order so
//! output is identical to the sequential fallback bit for bit.

pub mod complement;
pub mod curves;
pub mod generators;
pub mod geometry;
pub mod hopf;
pub mod neighbors;
mod par;
pub mod spectrum;

pub use curves::SampledLoop;
pub use hopf::{
    delta_conjugacy_probe, direction_map, direction_map_degree, find_coincidence_family,
    hopf_pairs_circle, CircleFunction, CircleRoots, CoincidencePair, TorusMap, TrigTerm,
};
pub use geometry::{NearestSet, ParamAngle, PlanarPoint, Segment};
pub use neighbors::{classify_with, NeighborKind, NeighborVerdict, ObstacleSet, Tolerances};
pub use par::{set_worker_cap, Parallelism};
pub use spectrum::{
    classify_grid, compute_spectrum, distinct_distances, export_torus_ppm, red_band_count,
    spectrum_of, CellCode, DistanceSpectrum, TorusGrid,
};

/// Crate-wide error type. Variants carry the violated rule in the message.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Rejected input values (bad sample counts, out-of-range parameters, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A geometric operation hit a configuration it refuses to answer for
    /// (point on the curve, ill-conditioned winding sum, degenerate segment).
    #[error("geometry: {0}")]
    Geometry(String),
    /// A construction could not be completed (no good disks, sequence too
    /// short, unresolvable preimage clusters, coincidence encountered, ...).
    #[error("construction: {0}")]
    Construction(String),
    /// File I/O or serialization problems.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    /// Malformed JSON content.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
    pub(crate) fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }
    pub(crate) fn construction(msg: impl Into<String>) -> Self {
        Error::Construction(msg.into())
    }
}
