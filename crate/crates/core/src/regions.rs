//! Two-sender rate regions as convex polygons.
//!
//! Regions are stored as counter-clockwise vertex lists starting at the
//! lexicographically smallest vertex, with duplicate and collinear vertices
//! removed, so two regions are equal exactly when their vertex lists match.
//! Points and segments are valid (degenerate) regions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::{self, KrausChannel};
use crate::hilbert::{DensityOperator, PureState};
use crate::infoq::{self, Ensemble, InfoError, MacInfoTriple};
use crate::sampling::{haar_pure_state, stream, uniform_simplex};

/// Vertex deduplication and containment tolerance, in bits/use.
pub const GEOM_TOL: f64 = 1e-9;
/// Margin a vertex must exceed for [`strict_subset`].
pub const STRICT_MARGIN: f64 = 1e-6;
/// Side of the bounding box halfspace intersection starts from.
pub const BOX_LIMIT: f64 = 64.0;

pub type RatePoint = [f64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("region is empty")]
    Empty,
    #[error("region is unbounded in the nonnegative quadrant")]
    Unbounded,
    #[error("halfspace has zero normal")]
    ZeroNormal,
    #[error("vertex {0:?} lies outside the nonnegative quadrant")]
    Negative(RatePoint),
    #[error("unknown region name {0:?}")]
    UnknownRegion(String),
    #[error("invalid sampling configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Info(#[from] InfoError),
}

pub type Result<T> = std::result::Result<T, RegionError>;

/// Constraint `a R_A + b R_B <= c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Halfspace {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if a == 0.0 && b == 0.0 {
            return Err(RegionError::ZeroNormal);
        }
        Ok(Self { a, b, c })
    }

    fn slack(&self, p: RatePoint) -> f64 {
        self.c - self.a * p[0] - self.b * p[1]
    }
}

/// Convex polygon of achievable `(R_A, R_B)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRegion2D {
    vertices: Vec<RatePoint>,
}

impl RateRegion2D {
    /// Canonical region spanned by `points` (their convex hull).
    pub fn from_points(points: &[RatePoint]) -> Result<Self> {
        convex_hull(points)
    }

    pub fn origin() -> Self {
        Self { vertices: vec![[0.0, 0.0]] }
    }

    pub fn vertices(&self) -> &[RatePoint] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        let twice: f64 = (0..v.len()).map(|i| cross_origin(v[i], v[(i + 1) % v.len()])).sum();
        twice / 2.0
    }

    /// Euclidean distance from `pt` to the region (zero inside).
    pub fn distance_to(&self, pt: RatePoint) -> f64 {
        let v = &self.vertices;
        match v.len() {
            1 => dist(pt, v[0]),
            2 => segment_distance(pt, v[0], v[1]),
            n => {
                let inside = (0..n).all(|i| cross(v[i], v[(i + 1) % n], pt) >= 0.0);
                if inside {
                    0.0
                } else {
                    (0..n).map(|i| segment_distance(pt, v[i], v[(i + 1) % n])).fold(f64::INFINITY, f64::min)
                }
            }
        }
    }

    /// Largest distance from a vertex of `self` to `other`.
    pub fn directed_distance(&self, other: &RateRegion2D) -> f64 {
        self.vertices.iter().map(|&v| other.distance_to(v)).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> RateRegion2D {
        let pts: Vec<RatePoint> = self.vertices.iter().map(|v| [v[0] * factor, v[1] * factor]).collect();
        convex_hull(&pts).expect("nonempty")
    }

    /// True if the two regions have the same vertices within `tol`.
    pub fn approx_eq(&self, other: &RateRegion2D, tol: f64) -> bool {
        self.vertices.len() == other.vertices.len()
            && self.vertices.iter().zip(&other.vertices).all(|(a, b)| dist(*a, *b) <= tol)
    }
}

fn cross_origin(a: RatePoint, b: RatePoint) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// `(a - o) x (b - o)`.
fn cross(o: RatePoint, a: RatePoint, b: RatePoint) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn dist(a: RatePoint, b: RatePoint) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn segment_distance(p: RatePoint, a: RatePoint, b: RatePoint) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0);
    dist(p, [a[0] + t * dx, a[1] + t * dy])
}

/// Canonical convex hull (monotone chain). Coordinates in `(-GEOM_TOL, 0)` are
/// snapped to zero; anything more negative is rejected.
pub fn convex_hull(points: &[RatePoint]) -> Result<RateRegion2D> {
    if points.is_empty() {
        return Err(RegionError::Empty);
    }
    let mut pts = Vec::with_capacity(points.len());
    for &p in points {
        if p[0] < -GEOM_TOL || p[1] < -GEOM_TOL || !p[0].is_finite() || !p[1].is_finite() {
            return Err(RegionError::Negative(p));
        }
        pts.push([p[0].max(0.0), p[1].max(0.0)]);
    }
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut unique: Vec<RatePoint> = Vec::with_capacity(pts.len());
    for p in pts {
        if !unique.iter().any(|&q| dist(p, q) <= GEOM_TOL) {
            unique.push(p);
        }
    }
    unique.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    if unique.len() <= 2 {
        return Ok(RateRegion2D { vertices: unique });
    }
    let eps = 1e-12;
    let mut lower: Vec<RatePoint> = Vec::new();
    for &p in &unique {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<RatePoint> = Vec::new();
    for &p in unique.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    Ok(RateRegion2D { vertices: lower })
}

/// Intersection of `hs` with the nonnegative quadrant, clipped out of the box
/// `[0, 64]^2` one halfspace at a time.
pub fn region_from_halfspaces(hs: &[Halfspace]) -> Result<RateRegion2D> {
    let mut poly: Vec<RatePoint> = vec![[0.0, 0.0], [BOX_LIMIT, 0.0], [BOX_LIMIT, BOX_LIMIT], [0.0, BOX_LIMIT]];
    for h in hs {
        if h.a == 0.0 && h.b == 0.0 {
            return Err(RegionError::ZeroNormal);
        }
        poly = clip(&poly, h);
        if poly.is_empty() {
            return Err(RegionError::Empty);
        }
    }
    if poly.iter().any(|p| p[0] >= BOX_LIMIT - GEOM_TOL || p[1] >= BOX_LIMIT - GEOM_TOL) {
        return Err(RegionError::Unbounded);
    }
    convex_hull(&poly)
}

fn clip(poly: &[RatePoint], h: &Halfspace) -> Vec<RatePoint> {
    let inside = |p: RatePoint| h.slack(p) >= -1e-12;
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let cur = poly[i];
        let next = poly[(i + 1) % n];
        let (ci, ni) = (inside(cur), inside(next));
        if ci {
            out.push(cur);
        }
        if ci != ni {
            let (sc, sn) = (h.slack(cur), h.slack(next));
            let t = sc / (sc - sn);
            out.push([cur[0] + t * (next[0] - cur[0]), cur[1] + t * (next[1] - cur[1])]);
        }
    }
    out
}

/// Rotates vertices to start at the bottom-most (then left-most) one.
fn from_bottom(v: &[RatePoint]) -> Vec<RatePoint> {
    let start =
        (0..v.len()).min_by(|&i, &j| v[i][1].total_cmp(&v[j][1]).then(v[i][0].total_cmp(&v[j][0]))).expect("nonempty");
    v[start..].iter().chain(v[..start].iter()).copied().collect()
}

/// `{u + v : u in p, v in q}` by merging edge vectors in angular order.
pub fn minkowski_sum(p: &RateRegion2D, q: &RateRegion2D) -> RateRegion2D {
    let a = from_bottom(&p.vertices);
    let b = from_bottom(&q.vertices);
    let (n, m) = (a.len(), b.len());
    let at = |v: &[RatePoint], k: usize| v[k % v.len()];
    let edge = |v: &[RatePoint], k: usize| {
        let (s, e) = (at(v, k), at(v, k + 1));
        [e[0] - s[0], e[1] - s[1]]
    };
    let mut sum = Vec::with_capacity(n + m);
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        let (u, w) = (at(&a, i), at(&b, j));
        sum.push([u[0] + w[0], u[1] + w[1]]);
        let turn = if i == n {
            -1.0
        } else if j == m {
            1.0
        } else {
            cross_origin(edge(&a, i), edge(&b, j))
        };
        if turn >= 0.0 && i < n {
            i += 1;
        }
        if turn <= 0.0 && j < m {
            j += 1;
        }
    }
    convex_hull(&sum).expect("sum of nonnegative regions")
}

/// Every vertex of `p` lies in `q` (within [`GEOM_TOL`]).
pub fn subset(p: &RateRegion2D, q: &RateRegion2D) -> bool {
    p.directed_distance(q) <= GEOM_TOL
}

/// `p` is inside `q` and some vertex of `q` is at least [`STRICT_MARGIN`]
/// outside `p`.
pub fn strict_subset(p: &RateRegion2D, q: &RateRegion2D) -> bool {
    subset(p, q) && q.directed_distance(p) >= STRICT_MARGIN
}

pub fn contains(r: &RateRegion2D, pt: RatePoint) -> bool {
    r.distance_to(pt) <= GEOM_TOL
}

pub fn hausdorff_distance(p: &RateRegion2D, q: &RateRegion2D) -> f64 {
    p.directed_distance(q).max(q.directed_distance(p))
}

// ---------------------------------------------------------------------------
// Regions from quantum channels
// ---------------------------------------------------------------------------

/// The pentagon `R_A <= I(A:C|B), R_B <= I(B:C|A), R_A + R_B <= I(AB:C)`.
pub fn pentagon_from_triple(t: &MacInfoTriple) -> Result<RateRegion2D> {
    let bound = |x: f64| x.max(0.0);
    region_from_halfspaces(&[
        Halfspace::new(1.0, 0.0, bound(t.i_a_c_given_b))?,
        Halfspace::new(0.0, 1.0, bound(t.i_b_c_given_a))?,
        Halfspace::new(1.0, 1.0, bound(t.i_ab_c))?,
    ])
}

pub fn pentagon_from_ensembles(ch: &KrausChannel, alice: &Ensemble, bob: &Ensemble) -> Result<RateRegion2D> {
    pentagon_from_triple(&infoq::mac_mutual_informations(ch, alice, bob)?)
}

/// Controls [`achievable_region`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    /// Random ensemble pairs on top of the deterministic basis candidates.
    pub samples: usize,
    pub seed: u64,
    /// Largest random ensemble size per sender.
    pub max_states: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self { samples: 32, seed: 0, max_states: 4 }
    }
}

fn sender_dims(ch: &KrausChannel, who: usize) -> Vec<usize> {
    ch.senders().iter().zip(ch.in_dims()).filter(|(s, _)| **s == who).map(|(_, d)| *d).collect()
}

/// Point mass on `|0>`, uniform over the first two basis states and uniform
/// over the whole computational basis.
fn basis_candidates(dims: &[usize]) -> Vec<Ensemble> {
    let d: usize = dims.iter().product();
    let mut out = vec![Ensemble::single(DensityOperator::basis(dims.to_vec(), 0))];
    if d >= 2 {
        out.push(Ensemble::uniform_basis(dims, 2).expect("valid"));
    }
    if d > 2 {
        out.push(Ensemble::uniform_basis(dims, d).expect("valid"));
    }
    out
}

/// Inner bound on the one-shot region: convex hull (time sharing) of the
/// pentagons of the basis candidates and of `cfg.samples` random pure-state
/// ensemble pairs. Sample `k` uses stream `k` of the seed, so more samples
/// never shrink the region.
pub fn achievable_region(ch: &KrausChannel, cfg: &SamplingConfig) -> Result<RateRegion2D> {
    if cfg.max_states == 0 {
        return Err(RegionError::InvalidConfig("max_states must be positive".into()));
    }
    let (da, db) = (sender_dims(ch, 0), sender_dims(ch, 1));
    if da.is_empty() || db.is_empty() || ch.senders().iter().any(|&s| s > 1) {
        return Err(RegionError::InvalidConfig("channel is not a two-sender channel".into()));
    }
    let mut points: Vec<RatePoint> = vec![[0.0, 0.0]];
    let mut add = |alice: &Ensemble, bob: &Ensemble| -> Result<()> {
        points.extend_from_slice(pentagon_from_ensembles(ch, alice, bob)?.vertices());
        Ok(())
    };
    for alice in basis_candidates(&da) {
        for bob in basis_candidates(&db) {
            add(&alice, &bob)?;
        }
    }
    for k in 0..cfg.samples {
        let mut rng = stream(cfg.seed, k as u64);
        let mut draw = |dims: &[usize]| {
            let n =
                1 + (crate::sampling::uniform(0.0, cfg.max_states as f64, &mut rng) as usize).min(cfg.max_states - 1);
            let states: Vec<PureState> = (0..n).map(|_| haar_pure_state(dims, &mut rng)).collect();
            Ensemble::from_pure(uniform_simplex(n, &mut rng), &states).expect("valid")
        };
        let alice = draw(&da);
        let bob = draw(&db);
        add(&alice, &bob)?;
    }
    convex_hull(&points)
}

// ---------------------------------------------------------------------------
// Analytic regions
// ---------------------------------------------------------------------------

/// Regions known in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnownRegion {
    /// `R_A + R_B <= 1` for the fully depolarized coupling channel.
    Phi1,
    /// Unit square for two ideal qubits.
    PsiId,
    /// `R_A + R_B <= 3, R_B <= 2` for the product of the two.
    Phi1XPsiId,
    /// Minkowski sum of the first two.
    MinkowskiPhi1PsiId,
}

impl KnownRegion {
    pub const ALL: [KnownRegion; 4] =
        [KnownRegion::PsiId, KnownRegion::Phi1, KnownRegion::MinkowskiPhi1PsiId, KnownRegion::Phi1XPsiId];

    pub fn name(self) -> &'static str {
        match self {
            KnownRegion::Phi1 => "phi1",
            KnownRegion::PsiId => "psi_id",
            KnownRegion::Phi1XPsiId => "phi1_x_psi_id",
            KnownRegion::MinkowskiPhi1PsiId => "minkowski_phi1_psi_id",
        }
    }

    pub fn region(self) -> RateRegion2D {
        let hs = |list: &[(f64, f64, f64)]| {
            let hs: Vec<Halfspace> = list.iter().map(|&(a, b, c)| Halfspace { a, b, c }).collect();
            region_from_halfspaces(&hs).expect("bounded")
        };
        match self {
            KnownRegion::Phi1 => hs(&[(1.0, 1.0, 1.0)]),
            KnownRegion::PsiId => hs(&[(1.0, 0.0, 1.0), (0.0, 1.0, 1.0)]),
            KnownRegion::Phi1XPsiId => hs(&[(1.0, 1.0, 3.0), (0.0, 1.0, 2.0)]),
            KnownRegion::MinkowskiPhi1PsiId => minkowski_sum(&KnownRegion::Phi1.region(), &KnownRegion::PsiId.region()),
        }
    }
}

impl fmt::Display for KnownRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KnownRegion {
    type Err = RegionError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|r| r.name() == s).ok_or_else(|| RegionError::UnknownRegion(s.to_string()))
    }
}

pub fn known_region(name: &str) -> Result<RateRegion2D> {
    Ok(name.parse::<KnownRegion>()?.region())
}

/// The quantum channel whose one-shot region a [`KnownRegion`] describes,
/// when there is one.
pub fn known_region_channel(region: KnownRegion) -> Option<KrausChannel> {
    match region {
        KnownRegion::Phi1 => channels::phi_p(1.0).ok(),
        KnownRegion::PsiId => Some(channels::psi_id()),
        KnownRegion::Phi1XPsiId => Some(channels::tensor_channels(&channels::phi_p(1.0).ok()?, &channels::psi_id())),
        KnownRegion::MinkowskiPhi1PsiId => None,
    }
}

/// Serialized form: `{"name", "vertices": [[R_A, R_B], ...], "units": "bits/use"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedRegion {
    pub name: String,
    pub vertices: Vec<RatePoint>,
    pub units: String,
}

impl NamedRegion {
    pub fn new(name: impl Into<String>, region: &RateRegion2D) -> Self {
        Self { name: name.into(), vertices: region.vertices().to_vec(), units: "bits/use".into() }
    }

    pub fn region(&self) -> Result<RateRegion2D> {
        convex_hull(&self.vertices)
    }
}
