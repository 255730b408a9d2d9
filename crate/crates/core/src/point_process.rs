//! Planar Poisson point configurations.
//!
//! A [`PointConfig`] is one realization of a homogeneous Poisson process
//! restricted to a rectangle. Points are kept in *canonical order*: ascending
//! `x`, ties in `x` broken by descending `y`. Under that order a strictly
//! increasing subsequence of `y` values is exactly a chain that increases
//! strictly in both coordinates, which is what the chain algorithms rely on.
//!
//! All rectangle membership tests are open (strict inequalities).

use std::cmp::Ordering;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(LabError::invalid(format!(
                "point coordinates must be finite, got ({x}, {y})"
            )));
        }
        Ok(Point { x, y })
    }

    /// Strict coordinatewise order `self ≺ other`.
    #[inline]
    pub fn precedes(&self, other: &Point) -> bool {
        self.x < other.x && self.y < other.y
    }

    /// Perpendicular distance to the diagonal `x = y`.
    #[inline]
    pub fn diagonal_distance(&self) -> f64 {
        (self.y - self.x).abs() / std::f64::consts::SQRT_2
    }
}

/// Canonical order: `x` ascending, ties by `y` descending.
#[inline]
pub fn canonical_cmp(a: &Point, b: &Point) -> Ordering {
    a.x.total_cmp(&b.x).then_with(|| b.y.total_cmp(&a.y))
}

/// Axis-aligned rectangle with `lo ≺ hi`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub lo: Point,
    pub hi: Point,
}

impl Rect {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        let finite = [lo.x, lo.y, hi.x, hi.y].iter().all(|v| v.is_finite());
        if !finite {
            return Err(LabError::invalid("rectangle bounds must be finite"));
        }
        if !lo.precedes(&hi) {
            return Err(LabError::invalid(format!(
                "rectangle corners must satisfy lo < hi componentwise, got ({}, {}) and ({}, {})",
                lo.x, lo.y, hi.x, hi.y
            )));
        }
        Ok(Rect { lo, hi })
    }

    pub fn from_coords(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Rect::new(Point::new(x0, y0)?, Point::new(x1, y1)?)
    }

    /// The square `[0, side]²`.
    pub fn square(side: f64) -> Result<Self> {
        Rect::from_coords(0.0, 0.0, side, side)
    }

    pub fn width(&self) -> f64 {
        self.hi.x - self.lo.x
    }

    pub fn height(&self) -> f64 {
        self.hi.y - self.lo.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Open membership: `lo ≺ p ≺ hi`.
    #[inline]
    pub fn contains_open(&self, p: &Point) -> bool {
        self.lo.precedes(p) && p.precedes(&self.hi)
    }

    #[inline]
    pub fn contains_closed(&self, p: &Point) -> bool {
        p.x >= self.lo.x && p.x <= self.hi.x && p.y >= self.lo.y && p.y <= self.hi.y
    }
}

/// One realization of the point process on `region`, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    points: Vec<Point>,
    region: Rect,
    seed: u64,
    intensity: f64,
}

impl PointConfig {
    /// Builds a configuration from arbitrary points.
    ///
    /// Points are sorted into canonical order. Every point must lie in the
    /// closed region and no two points may coincide.
    pub fn from_points(
        mut points: Vec<Point>,
        region: Rect,
        seed: u64,
        intensity: f64,
    ) -> Result<Self> {
        if !(intensity.is_finite() && intensity > 0.0) {
            return Err(LabError::invalid(format!(
                "intensity must be a positive finite real, got {intensity}"
            )));
        }
        for p in &points {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(LabError::invalid("point coordinates must be finite"));
            }
            if !region.contains_closed(p) {
                return Err(LabError::invalid(format!(
                    "point ({}, {}) lies outside the region",
                    p.x, p.y
                )));
            }
        }
        points.sort_unstable_by(canonical_cmp);
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(LabError::invalid(format!(
                "duplicate point ({}, {})",
                w[0].x, w[0].y
            )));
        }
        Ok(PointConfig {
            points,
            region,
            seed,
            intensity,
        })
    }

    /// Convenience constructor for hand-written test configurations.
    pub fn from_coords(coords: &[(f64, f64)], region: Rect) -> Result<Self> {
        let points = coords
            .iter()
            .map(|&(x, y)| Point::new(x, y))
            .collect::<Result<Vec<_>>>()?;
        PointConfig::from_points(points, region, 0, 1.0)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn region(&self) -> &Rect {
        &self.region
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index range of points with `lo < x < hi`.
    pub(crate) fn x_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let start = self.points.partition_point(|p| p.x <= lo);
        let end = self.points.partition_point(|p| p.x < hi);
        start..end.max(start)
    }

    /// Points strictly inside `query`, in canonical order.
    pub fn points_in<'a>(&'a self, query: &'a Rect) -> impl Iterator<Item = &'a Point> + 'a {
        let range = self.x_range(query.lo.x, query.hi.x);
        self.points[range]
            .iter()
            .filter(move |p| p.y > query.lo.y && p.y < query.hi.y)
    }

    /// Number of points strictly inside `query`.
    pub fn count_in(&self, query: &Rect) -> usize {
        self.points_in(query).count()
    }

    /// Writes `x,y` rows with a header.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "y"])?;
        for p in &self.points {
            w.write_record([p.x.to_string(), p.y.to_string()])?;
        }
        w.flush().map_err(|e| LabError::io("<csv writer>", e))?;
        Ok(())
    }
}

/// Samples a homogeneous Poisson configuration on `region`.
///
/// The count is drawn from `Poisson(intensity · area)` and the coordinates are
/// i.i.d. uniform, then sorted canonically. The output is a pure function of
/// `(region, intensity, seed)`.
pub fn sample_poisson(region: Rect, intensity: f64, seed: u64) -> Result<PointConfig> {
    let region = Rect::new(region.lo, region.hi)?;
    if !(intensity.is_finite() && intensity > 0.0) {
        return Err(LabError::invalid(format!(
            "intensity must be a positive finite real, got {intensity}"
        )));
    }
    let mean = intensity * region.area();
    if !mean.is_finite() {
        return Err(LabError::invalid("expected point count overflows"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = Poisson::new(mean)
        .map_err(|e| LabError::invalid(format!("poisson mean {mean}: {e}")))?
        .sample(&mut rng) as usize;

    let (x0, y0) = (region.lo.x, region.lo.y);
    let (w, h) = (region.width(), region.height());
    let mut points: Vec<Point> = (0..count)
        .map(|_| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            Point {
                x: x0 + u * w,
                y: y0 + v * h,
            }
        })
        .collect();
    points.sort_unstable_by(canonical_cmp);
    // Exact coincidences (probability ~2^-104 per pair) are dropped.
    points.dedup();
    Ok(PointConfig {
        points,
        region,
        seed,
        intensity,
    })
}

/// Number of points of `config` strictly inside `query`.
pub fn count_in(config: &PointConfig, query: &Rect) -> usize {
    config.count_in(query)
}

/// The diagonal cylinder `C(γ, N)`: `0 ≤ x + y ≤ 2N` and `|y − x| ≤ √2 N^γ`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CylinderSpec {
    gamma: f64,
    n: f64,
}

impl CylinderSpec {
    pub fn new(gamma: f64, n: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(LabError::invalid(format!(
                "gamma must lie in (0, 1), got {gamma}"
            )));
        }
        if !(n.is_finite() && n > 0.0) {
            return Err(LabError::invalid(format!(
                "N must be positive and finite, got {n}"
            )));
        }
        Ok(CylinderSpec { gamma, n })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    /// Bound on `|y − x|`, i.e. `√2 N^γ`.
    pub fn offset_bound(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.n.powf(self.gamma)
    }

    /// Perpendicular half-width `N^γ`.
    pub fn half_width(&self) -> f64 {
        self.n.powf(self.gamma)
    }

    #[inline]
    pub fn contains(&self, p: &Point) -> bool {
        let s = p.x + p.y;
        s >= 0.0 && s <= 2.0 * self.n && (p.y - p.x).abs() <= self.offset_bound()
    }
}

/// Cylinder membership `p ∈ C(γ, N)`.
pub fn contains(cyl: &CylinderSpec, p: &Point) -> bool {
    cyl.contains(p)
}

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based seed derivation.
///
/// `seed = splitmix64(splitmix64(master ⊕ splitmix64(stream)) + index)`, so a
/// trial's seed depends only on `(master, stream, index)` and never on the
/// order in which trials are executed.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let base = splitmix64(master ^ splitmix64(stream));
    splitmix64(base.wrapping_add(index))
}
