//! Longest up/right chains and maximal-point analysis.
//!
//! `d(w, w′)` is the largest number of points on a chain
//! `w ≺ ζ₁ ≺ … ≺ ζ_M ≺ w′`. With points in canonical order this is the
//! longest strictly increasing subsequence of their `y` values, computed by
//! patience sorting in `O(M log M)`.
//!
//! [`analyze_chains`] additionally records for every admissible point the
//! longest chain ending there (`f`) and starting there (`g`). A point lies on
//! some maximal chain iff `f + g − 1 = d`.

use std::io::Write;

use crate::error::{LabError, Result};
use crate::point_process::{CylinderSpec, Point, PointConfig, Rect};

/// Patience sorting over a key sequence; returns the rank (length of the
/// longest strictly increasing run ending at each element).
fn patience_ranks(keys: impl Iterator<Item = f64>, ranks: &mut Vec<u32>) -> usize {
    let mut tails: Vec<f64> = Vec::new();
    for key in keys {
        let pos = tails.partition_point(|&t| t < key);
        if pos == tails.len() {
            tails.push(key);
        } else {
            tails[pos] = key;
        }
        ranks.push(pos as u32 + 1);
    }
    tails.len()
}

/// Length of the longest strictly increasing subsequence of `keys`.
fn patience_length(keys: impl Iterator<Item = f64>) -> usize {
    let mut tails: Vec<f64> = Vec::new();
    for key in keys {
        let pos = tails.partition_point(|&t| t < key);
        if pos == tails.len() {
            tails.push(key);
        } else {
            tails[pos] = key;
        }
    }
    tails.len()
}

fn check_corners(w: &Point, w_prime: &Point) -> Result<Rect> {
    Rect::new(*w, *w_prime).map_err(|_| {
        LabError::invalid(format!(
            "chain endpoints must satisfy w < w' componentwise, got ({}, {}) and ({}, {})",
            w.x, w.y, w_prime.x, w_prime.y
        ))
    })
}

/// `d(w, w′; ω)`: longest chain through points strictly inside `(w, w′)`.
pub fn longest_chain(config: &PointConfig, w: Point, w_prime: Point) -> Result<usize> {
    let rect = check_corners(&w, &w_prime)?;
    Ok(patience_length(config.points_in(&rect).map(|p| p.y)))
}

/// `d^K(w, w′; ω)`: longest chain using only points inside the cylinder `K`.
pub fn longest_chain_restricted(
    config: &PointConfig,
    cylinder: &CylinderSpec,
    w: Point,
    w_prime: Point,
) -> Result<usize> {
    let rect = check_corners(&w, &w_prime)?;
    if !cylinder.contains(&w) || !cylinder.contains(&w_prime) {
        return Err(LabError::invalid(
            "chain endpoints must lie inside the cylinder",
        ));
    }
    Ok(patience_length(
        config
            .points_in(&rect)
            .filter(|p| cylinder.contains(p))
            .map(|p| p.y),
    ))
}

/// Forward/backward chain ranks for every point strictly inside `(w, w′)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainAnalysis {
    /// Length of a maximal chain.
    pub d: usize,
    /// Indices into the configuration of the admissible points, ascending.
    pub indices: Vec<usize>,
    /// Longest chain from `w` ending at each admissible point (inclusive).
    pub forward: Vec<u32>,
    /// Longest chain starting at each admissible point and ending below `w′`.
    pub backward: Vec<u32>,
    /// Whether each admissible point lies on at least one maximal chain.
    pub maximal: Vec<bool>,
    pub w: Point,
    pub w_prime: Point,
    fingerprint: u64,
}

fn fingerprint(config: &PointConfig) -> u64 {
    const K: u64 = 0x517C_C1B7_2722_0A95;
    config.points().iter().fold(config.len() as u64, |h, p| {
        let h = (h.rotate_left(5) ^ p.x.to_bits()).wrapping_mul(K);
        (h.rotate_left(5) ^ p.y.to_bits()).wrapping_mul(K)
    })
}

impl ChainAnalysis {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn num_maximal(&self) -> usize {
        self.maximal.iter().filter(|&&m| m).count()
    }

    /// Whether this analysis was computed from `config`.
    pub fn matches(&self, config: &PointConfig) -> bool {
        self.fingerprint == fingerprint(config)
            && self.indices.last().is_none_or(|&i| i < config.len())
    }

    /// Iterator over the maximal points of `config`.
    pub fn maximal_points<'a>(
        &'a self,
        config: &'a PointConfig,
    ) -> impl Iterator<Item = &'a Point> + 'a {
        self.indices
            .iter()
            .zip(&self.maximal)
            .filter(|(_, &m)| m)
            .map(move |(&i, _)| &config.points()[i])
    }

    /// Writes `x,y,f,g,maximal` rows with a header.
    pub fn write_csv<W: Write>(&self, config: &PointConfig, writer: W) -> Result<()> {
        if !self.matches(config) {
            return Err(LabError::invalid(
                "analysis was not computed from this configuration",
            ));
        }
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "y", "f", "g", "maximal"])?;
        for (k, &i) in self.indices.iter().enumerate() {
            let p = config.points()[i];
            w.write_record([
                p.x.to_string(),
                p.y.to_string(),
                self.forward[k].to_string(),
                self.backward[k].to_string(),
                self.maximal[k].to_string(),
            ])?;
        }
        w.flush().map_err(|e| LabError::io("<csv writer>", e))?;
        Ok(())
    }
}

/// Forward and backward passes over the admissible points of `(w, w′)`.
///
/// The backward pass runs the same patience sort on the configuration
/// reflected through the rectangle's center. Reflection is realized by
/// reversing the canonical order and negating `y`, which keeps the
/// comparison exact.
pub fn analyze_chains(config: &PointConfig, w: Point, w_prime: Point) -> Result<ChainAnalysis> {
    let rect = check_corners(&w, &w_prime)?;
    let range = config.x_range(rect.lo.x, rect.hi.x);
    let pts = config.points();
    let indices: Vec<usize> = range
        .filter(|&i| pts[i].y > rect.lo.y && pts[i].y < rect.hi.y)
        .collect();

    let mut forward = Vec::with_capacity(indices.len());
    let d = patience_ranks(indices.iter().map(|&i| pts[i].y), &mut forward);

    let mut backward = Vec::with_capacity(indices.len());
    let d_back = patience_ranks(indices.iter().rev().map(|&i| -pts[i].y), &mut backward);
    backward.reverse();
    debug_assert_eq!(d, d_back);

    let target = d as u32 + 1;
    let maximal = forward
        .iter()
        .zip(&backward)
        .map(|(&f, &g)| f + g == target)
        .collect();

    Ok(ChainAnalysis {
        d,
        indices,
        forward,
        backward,
        maximal,
        w,
        w_prime,
        fingerprint: fingerprint(config),
    })
}

/// Spread of the maximal-point set around the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TransversalSummary {
    /// Largest `|y − x| / √2` over maximal points (0 if there are none).
    pub max_deviation: f64,
    pub num_maximal_points: usize,
    /// Largest `|y − x|` over maximal points, kept for exact cylinder tests.
    pub max_offset: f64,
}

impl TransversalSummary {
    /// Whether every maximal point lies in `cylinder`, given that the points
    /// come from the open square `(0, N)²` where `0 ≤ x + y ≤ 2N` holds.
    pub fn within(&self, cylinder: &CylinderSpec) -> bool {
        self.max_offset <= cylinder.offset_bound()
    }
}

pub fn transversal_summary(
    analysis: &ChainAnalysis,
    config: &PointConfig,
) -> Result<TransversalSummary> {
    if !analysis.matches(config) {
        return Err(LabError::invalid(
            "analysis was not computed from this configuration",
        ));
    }
    let mut max_offset = 0.0_f64;
    let mut count = 0;
    for p in analysis.maximal_points(config) {
        max_offset = max_offset.max((p.y - p.x).abs());
        count += 1;
    }
    Ok(TransversalSummary {
        max_deviation: max_offset / std::f64::consts::SQRT_2,
        num_maximal_points: count,
        max_offset,
    })
}

/// Side length `N` of a configuration on `[0, N]²`.
pub(crate) fn square_side(config: &PointConfig) -> Result<f64> {
    let r = config.region();
    if r.lo.x != 0.0 || r.lo.y != 0.0 || r.hi.x != r.hi.y {
        return Err(LabError::invalid(
            "cylinder event requires a configuration on [0, N]^2",
        ));
    }
    Ok(r.hi.x)
}

/// Event `A_N^γ`: every maximal chain from `0` to `(N, N)` stays in `C(γ, N)`.
///
/// A chain counts as contained when all of its points are. Points of the
/// open square always satisfy `0 < x + y < 2N`, so only the offset bound is
/// tested.
pub fn event_a(config: &PointConfig, gamma: f64) -> Result<bool> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(LabError::invalid(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    let n = square_side(config)?;
    let cylinder = CylinderSpec::new(gamma, n)?;
    let origin = Point { x: 0.0, y: 0.0 };
    let analysis = analyze_chains(config, origin, Point { x: n, y: n })?;
    let contained = analysis
        .maximal_points(config)
        .all(|p| cylinder.contains(p));
    Ok(contained)
}

/// Largest point count over a family of cells (open rectangles).
pub fn max_cell_count(config: &PointConfig, cells: &[Rect]) -> usize {
    cells.iter().map(|c| config.count_in(c)).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y).unwrap()
    }

    fn cfg(coords: &[(f64, f64)], side: f64) -> PointConfig {
        PointConfig::from_coords(coords, Rect::square(side).unwrap()).unwrap()
    }

    #[test]
    fn longest_chain_hand_examples() {
        let empty = cfg(&[], 4.0);
        assert_eq!(
            longest_chain(&empty, pt(0.0, 0.0), pt(4.0, 4.0)).unwrap(),
            0
        );

        let diag = cfg(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)], 4.0);
        assert_eq!(longest_chain(&diag, pt(0.0, 0.0), pt(4.0, 4.0)).unwrap(), 3);

        let anti = cfg(&[(1.0, 2.0), (2.0, 1.0)], 4.0);
        assert_eq!(longest_chain(&anti, pt(0.0, 0.0), pt(4.0, 4.0)).unwrap(), 1);
    }

    #[test]
    fn ties_never_chain() {
        let same_x = cfg(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)], 4.0);
        assert_eq!(
            longest_chain(&same_x, pt(0.0, 0.0), pt(4.0, 4.0)).unwrap(),
            1
        );
        let same_y = cfg(&[(1.0, 1.0), (2.0, 1.0), (3.0, 1.0)], 4.0);
        assert_eq!(
            longest_chain(&same_y, pt(0.0, 0.0), pt(4.0, 4.0)).unwrap(),
            1
        );
        let a = analyze_chains(&same_x, pt(0.0, 0.0), pt(4.0, 4.0)).unwrap();
        assert_eq!(a.d, 1);
        assert!(a.maximal.iter().all(|&m| m));
    }

    #[test]
    fn endpoints_must_be_ordered() {
        let c = cfg(&[(1.0, 1.0)], 4.0);
        assert!(longest_chain(&c, pt(1.0, 0.0), pt(1.0, 4.0)).is_err());
        assert!(analyze_chains(&c, pt(4.0, 4.0), pt(0.0, 0.0)).is_err());
    }

    #[test]
    fn points_on_rectangle_boundary_are_excluded() {
        let c = cfg(&[(0.0, 1.0), (1.0, 1.5), (2.0, 4.0)], 4.0);
        assert_eq!(longest_chain(&c, pt(0.0, 0.0), pt(4.0, 4.0)).unwrap(), 1);
    }

    #[test]
    fn restricted_examples() {
        let c = cfg(&[(1.0, 1.2), (2.0, 2.1), (3.0, 3.5)], 4.0);
        let wide = CylinderSpec::new(0.99, 4.0).unwrap();
        let (w, wp) = (pt(0.0, 0.0), pt(4.0, 4.0));
        assert_eq!(
            longest_chain_restricted(&c, &wide, w, wp).unwrap(),
            longest_chain(&c, w, wp).unwrap()
        );
        let off = cfg(&[(1.0, 3.0), (3.0, 1.0)], 4.0);
        let narrow = CylinderSpec::new(0.1, 4.0).unwrap();
        assert_eq!(longest_chain_restricted(&off, &narrow, w, wp).unwrap(), 0);

        let outside = pt(5.0, 5.0);
        assert!(longest_chain_restricted(&c, &narrow, w, outside).is_err());
    }

    #[test]
    fn analyze_single_point() {
        let c = cfg(&[(1.0, 2.0)], 3.0);
        let a = analyze_chains(&c, pt(0.0, 0.0), pt(3.0, 3.0)).unwrap();
        assert_eq!(
            (a.d, a.forward[0], a.backward[0], a.maximal[0]),
            (1, 1, 1, true)
        );
    }

    #[test]
    fn analyze_hand_example() {
        // (1.5, 0.5) ≺ (2, 2), so it starts a chain of length 2 and is maximal.
        let c = cfg(&[(1.0, 1.0), (2.0, 2.0), (1.5, 0.5)], 3.0);
        let a = analyze_chains(&c, pt(0.0, 0.0), pt(3.0, 3.0)).unwrap();
        assert_eq!(a.d, 2);
        // canonical order: (1,1), (1.5,0.5), (2,2)
        assert_eq!(a.forward, vec![1, 1, 2]);
        assert_eq!(a.backward, vec![2, 2, 1]);
        assert_eq!(a.maximal, vec![true, true, true]);

        // (2.5, 0.5) has nothing below-left or above-right of it.
        let c = cfg(&[(1.0, 1.0), (2.0, 2.0), (2.5, 0.5)], 3.0);
        let a = analyze_chains(&c, pt(0.0, 0.0), pt(3.0, 3.0)).unwrap();
        assert_eq!(a.d, 2);
        assert_eq!(a.forward, vec![1, 2, 1]);
        assert_eq!(a.backward, vec![2, 1, 1]);
        assert_eq!(a.maximal, vec![true, true, false]);
    }

    #[test]
    fn transversal_examples() {
        let diag = cfg(&[(1.0, 1.0), (2.0, 2.0)], 3.0);
        let a = analyze_chains(&diag, pt(0.0, 0.0), pt(3.0, 3.0)).unwrap();
        let s = transversal_summary(&a, &diag).unwrap();
        assert_eq!(s.max_deviation, 0.0);
        assert_eq!(s.num_maximal_points, 2);

        let single = cfg(&[(0.5, 2.5)], 3.0);
        let a = analyze_chains(&single, pt(0.0, 0.0), pt(3.0, 3.0)).unwrap();
        let s = transversal_summary(&a, &single).unwrap();
        assert!((s.max_deviation - 2.0 / 2f64.sqrt()).abs() < 1e-15);

        assert!(transversal_summary(&a, &diag).is_err());

        let none = cfg(&[], 3.0);
        let a = analyze_chains(&none, pt(0.0, 0.0), pt(3.0, 3.0)).unwrap();
        let s = transversal_summary(&a, &none).unwrap();
        assert_eq!((s.max_deviation, s.num_maximal_points), (0.0, 0));
    }

    #[test]
    fn event_a_examples() {
        // Unique maximal chain through (0.1N, 0.9N) with N = 100.
        let c = cfg(&[(5.0, 50.0), (10.0, 90.0), (95.0, 95.0)], 100.0);
        assert_eq!(
            longest_chain(&c, pt(0.0, 0.0), pt(100.0, 100.0)).unwrap(),
            3
        );
        assert!(!event_a(&c, 0.5).unwrap());

        // For small N with γ close to 1 the cylinder covers the square:
        // √2·2^0.99 > 2 = max |y − x|.
        let small = cfg(&[(0.1, 1.9), (1.9, 0.1)], 2.0);
        assert!(event_a(&small, 0.99).unwrap());

        assert!(event_a(&small, 0.0).is_err());
        assert!(event_a(&small, 1.0).is_err());

        let not_square =
            PointConfig::from_coords(&[], Rect::from_coords(0.0, 0.0, 1.0, 2.0).unwrap()).unwrap();
        assert!(event_a(&not_square, 0.5).is_err());
    }

    #[test]
    fn event_a_longitudinal_bound_is_automatic() {
        // Any point of the open square (0, N)² satisfies 0 < x + y < 2N, so
        // the offset bound alone decides membership.
        let n = 50.0;
        let cyl = CylinderSpec::new(0.6, n).unwrap();
        let c = crate::point_process::sample_poisson(Rect::square(n).unwrap(), 1.0, 3).unwrap();
        for p in c.points() {
            assert!(p.x + p.y >= 0.0 && p.x + p.y <= 2.0 * n);
            assert_eq!(cyl.contains(p), (p.y - p.x).abs() <= cyl.offset_bound());
        }
    }

    #[test]
    fn max_cell_count_examples() {
        let cells = [
            Rect::from_coords(0.0, 0.0, 1.0, 1.0).unwrap(),
            Rect::from_coords(1.0, 0.0, 2.0, 1.0).unwrap(),
        ];
        assert_eq!(max_cell_count(&cfg(&[], 2.0), &cells), 0);
        assert_eq!(max_cell_count(&cfg(&[(1.5, 0.5)], 2.0), &cells), 1);
        assert_eq!(max_cell_count(&cfg(&[(1.5, 0.5)], 2.0), &[]), 0);
    }

    #[test]
    fn csv_export() {
        let c = cfg(&[(1.0, 1.0), (1.5, 0.5)], 2.0);
        let a = analyze_chains(&c, pt(0.0, 0.0), pt(2.0, 2.0)).unwrap();
        let mut buf = Vec::new();
        a.write_csv(&c, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "x,y,f,g,maximal\n1,1,1,1,true\n1.5,0.5,1,1,true\n"
        );
    }
}
