//! Deterministic geometric inequalities and the cell-count tail check.
//!
//! The two area inequalities are evaluated on the grids they are stated for.
//! Each returns the worst gap `lhs − rhs`, which must be `≤ 0`. Grids with
//! more than [`MAX_GRID_EVALUATIONS`] points are subsampled evenly; the
//! endpoints are always included.

use rayon::prelude::*;

use crate::chains::max_cell_count;
use crate::error::{LabError, Result};
use crate::point_process::{derive_seed, sample_poisson, Rect};

use super::estimators::wilson_interval;

pub const MAX_GRID_EVALUATIONS: usize = 100_000;
pub const CELL_TAIL_CONSTANT: f64 = 10.0;
pub const CELL_TAIL_DEPTHS: std::ops::RangeInclusive<usize> = 18..=30;

/// Up to `MAX_GRID_EVALUATIONS` evenly spaced indices in `first..=last`,
/// always including both ends.
pub fn subsample_indices(first: u64, last: u64) -> Vec<u64> {
    let count = last - first + 1;
    if count <= MAX_GRID_EVALUATIONS as u64 {
        return (first..=last).collect();
    }
    let m = MAX_GRID_EVALUATIONS as u64 - 1;
    let mut idx: Vec<u64> = (0..=m)
        .map(|k| first + ((k as u128 * (count - 1) as u128) / m as u128) as u64)
        .collect();
    idx.dedup();
    idx
}

fn check_positive_n(n: f64) -> Result<()> {
    if !(n.is_finite() && n > 1.0) {
        return Err(LabError::invalid(format!(
            "N must be finite and > 1, got {n}"
        )));
    }
    Ok(())
}

/// Worst gap of `√a(m_N, z_j) − √a(0, z_j) ≤ 10 N^{2γ−b}` over
/// `z_j = (N^b, N^b + r_j)/√2`, `r_j ∈ [4N^γ, 8N^γ]`, `j = 0..=K`,
/// `K = ⌊8N^{2γ}⌋ + 1`, where
/// `a(m_N, z_j) = (N^b + 3N^γ)(N^b − 3N^γ + r_j)/2` and
/// `a(0, z_j) = (N^{2b} + r_j N^b)/2`.
pub fn check_lemma_2_3(n: f64, gamma: f64, b: f64) -> Result<f64> {
    check_positive_n(n)?;
    if !(gamma > 0.0 && gamma < b && b < 1.0) {
        return Err(LabError::invalid(format!(
            "need 0 < gamma < b < 1, got gamma = {gamma}, b = {b}"
        )));
    }
    let (nb, ng) = (n.powf(b), n.powf(gamma));
    if nb - 4.0 * ng <= 0.0 {
        return Err(LabError::invalid(format!(
            "N too small: N^b − 4N^γ = {} ≤ 0",
            nb - 4.0 * ng
        )));
    }
    let k = (8.0 * n.powf(2.0 * gamma)).floor() as u64 + 1;
    let bound = 10.0 * n.powf(2.0 * gamma - b);
    let gap = subsample_indices(0, k)
        .into_par_iter()
        .map(|j| {
            let r = 4.0 * ng + 4.0 * ng * j as f64 / k as f64;
            let shifted = (nb + 3.0 * ng) * (nb - 3.0 * ng + r) / 2.0;
            let origin = (nb * nb + r * nb) / 2.0;
            // √A − √B = (A − B)/(√A + √B), avoiding cancellation.
            (shifted - origin) / (shifted.sqrt() + origin.sqrt()) - bound
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(gap)
}

/// `f(x, y) = √(x² + xy) + √((1−x)² − (1−x)y)`.
pub fn lemma_3_2_profile(x: f64, y: f64) -> f64 {
    (x * x + x * y).sqrt() + ((1.0 - x) * (1.0 - x) - (1.0 - x) * y).sqrt()
}

/// Worst gap of `√a(0,z) + √a(z,w_N) − √a(0,w_N) ≤ −N^{2γ−1}` over the
/// upper-side grid `a(0, z_j) = jM/K (jM/K + √2N^γ)`,
/// `a(z_j, w_N) = (N − jM/K)(N − jM/K − √2N^γ)`, `M = N − √2N^γ`,
/// `K = ⌊2√2 N^{1+γ}⌋ + 1`, `j = 0..=K`, plus the analytic maximizer
/// `x = (1 − y)/2` of `f` with `y = √2 N^{γ−1}`.
///
/// The left side equals `N (f(x, y) − 1)`; at the maximizer
/// `f − 1 = √(1 − y²) − 1 ≤ −y²/2`, which gives the bound.
pub fn check_lemma_3_2(n: f64, gamma: f64) -> Result<f64> {
    check_positive_n(n)?;
    if !(gamma > 2.0 / 3.0 && gamma < 1.0) {
        return Err(LabError::invalid(format!(
            "gamma must lie in (2/3, 1), got {gamma}"
        )));
    }
    let width = std::f64::consts::SQRT_2 * n.powf(gamma);
    let y = width / n;
    if y >= 1.0 {
        return Err(LabError::invalid(format!(
            "N too small: √2 N^(γ−1) = {y} ≥ 1"
        )));
    }
    let m = n - width;
    let k = (2.0 * std::f64::consts::SQRT_2 * n.powf(1.0 + gamma)).floor() as u64 + 1;
    let rhs = -n.powf(2.0 * gamma - 1.0);
    let gap_at = |s: f64| {
        let origin = s * (s + width);
        let terminal = (n - s) * (n - s - width);
        origin.max(0.0).sqrt() + terminal.max(0.0).sqrt() - n - rhs
    };
    let grid = subsample_indices(0, k)
        .into_par_iter()
        .map(|j| gap_at(j as f64 * m / k as f64))
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let x_star = (1.0 - y) / 2.0;
    Ok(grid.max(gap_at(x_star * n)))
}

/// Per-depth outcome of the cell-count tail check.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TailRow {
    pub depth: usize,
    pub hits: usize,
    pub p_hat: f64,
    /// Upper end of the Wilson 95% interval.
    pub upper: f64,
    /// `C · K · e^{−d/2}`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CellTailReport {
    pub cells: usize,
    pub cell_area: f64,
    pub trials: usize,
    pub rows: Vec<TailRow>,
    pub passed: bool,
}

/// Largest cell count per trial for `cells` equal cells of total area
/// `total_area`, laid out as a strip of unit height.
pub fn cell_count_maxima(
    total_area: f64,
    cells: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if cells == 0 || !(total_area.is_finite() && total_area > 0.0) {
        return Err(LabError::invalid(
            "need at least one cell and positive area",
        ));
    }
    let width = total_area / cells as f64;
    let rects = (0..cells)
        .map(|i| Rect::from_coords(i as f64 * width, 0.0, (i + 1) as f64 * width, 1.0))
        .collect::<Result<Vec<_>>>()?;
    let region = Rect::from_coords(0.0, 0.0, total_area, 1.0)?;
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let config = sample_poisson(region, 1.0, derive_seed(seed, 0, t))?;
            Ok(max_cell_count(&config, &rects))
        })
        .collect()
}

/// Monte Carlo check of `P[max cell count ≥ d] ≤ C K e^{−d/2}` for
/// `d ∈ 18..=30`, with `K = ⌊8N^{2γ}⌋ + 1` cells of total area `8N^{2γ}`.
pub fn cell_tail_report(n: f64, gamma: f64, trials: usize, seed: u64) -> Result<CellTailReport> {
    check_positive_n(n)?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(LabError::invalid(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    if trials < 1000 {
        return Err(LabError::invalid(format!(
            "need at least 1000 trials, got {trials}"
        )));
    }
    let total_area = 8.0 * n.powf(2.0 * gamma);
    let k = total_area.floor() as usize + 1;
    let maxima = cell_count_maxima(total_area, k, trials, seed)?;
    let rows: Vec<TailRow> = CELL_TAIL_DEPTHS
        .map(|depth| {
            let hits = maxima.iter().filter(|&&m| m >= depth).count();
            TailRow {
                depth,
                hits,
                p_hat: hits as f64 / trials as f64,
                upper: wilson_interval(hits, trials).1,
                bound: CELL_TAIL_CONSTANT * k as f64 * (-(depth as f64) / 2.0).exp(),
            }
        })
        .collect();
    let passed = rows.iter().all(|r| r.upper <= r.bound);
    Ok(CellTailReport {
        cells: k,
        cell_area: total_area / k as f64,
        trials,
        rows,
        passed,
    })
}

pub fn check_cell_tail(n: f64, gamma: f64, trials: usize, seed: u64) -> Result<bool> {
    Ok(cell_tail_report(n, gamma, trials, seed)?.passed)
}
