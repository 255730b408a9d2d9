use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::tracy_widom::{scaled_statistic, tw_cdf, tw_quantile, TwSolution};

use super::campaign::TrialRecord;

pub const MIN_TRIALS_PER_N: usize = 50;
pub const MIN_DISTINCT_N: usize = 3;
pub const MIN_TW_TRIALS: usize = 500;

/// Least-squares fit of `ln(statistic)` against `ln N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// Infinite when the fit is degenerate or has two points; JSON stores
    /// that as `null`.
    #[serde(deserialize_with = "stderr_from_json")]
    pub slope_stderr: f64,
    pub r_squared: f64,
    /// `(ln N, ln statistic)` pairs.
    pub points: Vec<(f64, f64)>,
    /// Set when the statistic vanished at some `N` and no fit was possible.
    pub degenerate: bool,
}

fn stderr_from_json<'de, D: serde::Deserializer<'de>>(de: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(de)?.unwrap_or(f64::INFINITY))
}

impl ScalingFit {
    fn degenerate() -> Self {
        ScalingFit {
            slope: 0.0,
            intercept: 0.0,
            slope_stderr: f64::INFINITY,
            r_squared: 0.0,
            points: Vec::new(),
            degenerate: true,
        }
    }
}

/// Ordinary least squares on `(x, y)` pairs.
pub fn fit_log_log(points: Vec<(f64, f64)>) -> Result<ScalingFit> {
    if points.len() < 2 {
        return Err(LabError::invalid("a fit needs at least two points"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(LabError::invalid("abscissae must not all coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let slope_stderr = if points.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    let r_squared = if syy > 0.0 {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(ScalingFit {
        slope,
        intercept,
        slope_stderr,
        r_squared,
        points,
        degenerate: false,
    })
}

/// Linear-interpolation quantile of sorted data (Hyndman–Fan type 7).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Records grouped by `N`, ascending.
fn group_by_n(records: &[TrialRecord]) -> Vec<(f64, Vec<&TrialRecord>)> {
    let mut groups: Vec<(f64, Vec<&TrialRecord>)> = Vec::new();
    let mut sorted: Vec<&TrialRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.n.total_cmp(&b.n));
    for r in sorted {
        match groups.last_mut() {
            Some((n, v)) if *n == r.n => v.push(r),
            _ => groups.push((r.n, vec![r])),
        }
    }
    groups
}

fn fit_statistic(
    records: &[TrialRecord],
    statistic: impl Fn(&[f64]) -> f64,
    value: impl Fn(&TrialRecord) -> f64,
) -> Result<ScalingFit> {
    let groups = group_by_n(records);
    if groups.len() < MIN_DISTINCT_N {
        return Err(LabError::invalid(format!(
            "need at least {MIN_DISTINCT_N} distinct N values, got {}",
            groups.len()
        )));
    }
    if let Some((n, g)) = groups.iter().find(|(_, g)| g.len() < MIN_TRIALS_PER_N) {
        return Err(LabError::invalid(format!(
            "need at least {MIN_TRIALS_PER_N} trials per N, got {} at N = {n}",
            g.len()
        )));
    }
    let mut points = Vec::with_capacity(groups.len());
    for (n, group) in &groups {
        let mut values: Vec<f64> = group.iter().map(|r| value(r)).collect();
        values.sort_by(f64::total_cmp);
        let s = statistic(&values);
        if s.is_nan() || s <= 0.0 {
            return Ok(ScalingFit::degenerate());
        }
        points.push((n.ln(), s.ln()));
    }
    fit_log_log(points)
}

/// χ estimate: slope of `ln IQR(d)` against `ln N`.
pub fn estimate_chi(records: &[TrialRecord]) -> Result<ScalingFit> {
    fit_statistic(
        records,
        |v| quantile(v, 0.75) - quantile(v, 0.25),
        |r| r.d as f64,
    )
}

/// ξ estimate: slope of `ln median(max deviation)` against `ln N`.
pub fn estimate_xi(records: &[TrialRecord]) -> Result<ScalingFit> {
    fit_statistic(records, |v| quantile(v, 0.5), |r| r.max_deviation)
}

/// Binomial proportion with a Wilson score 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub p: f64,
    pub lo: f64,
    pub hi: f64,
    pub successes: usize,
    pub trials: usize,
}

/// Wilson score interval at `z = 1.96`.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// Empirical `P[A_N^γ]` over the records at `N`.
pub fn probability_a(records: &[TrialRecord], gamma: f64, n: f64) -> Result<ProbabilityEstimate> {
    let mut trials = 0;
    let mut successes = 0;
    for r in records.iter().filter(|r| r.n == n) {
        let a = r
            .event(gamma)
            .ok_or_else(|| LabError::invalid(format!("records do not contain gamma = {gamma}")))?;
        trials += 1;
        successes += a as usize;
    }
    if trials == 0 {
        return Err(LabError::invalid(format!("no records at N = {n}")));
    }
    let (lo, hi) = wilson_interval(successes, trials);
    Ok(ProbabilityEstimate {
        p: successes as f64 / trials as f64,
        lo,
        hi,
        successes,
        trials,
    })
}

/// Kolmogorov–Smirnov distance between the empirical law of chain lengths
/// and `F` on the lattice of attainable values.
///
/// Since `P[d ≤ n] = φ_n(λ) ≈ F(t(n, λ))`, the comparison is made at the
/// scaled coordinates `t(n, λ)` of every integer `n` from one below the
/// smallest observation to the largest.
pub fn ks_lattice(lengths: &[u64], lambda: f64, sol: &TwSolution) -> f64 {
    let mut sorted = lengths.to_vec();
    sorted.sort_unstable();
    let total = sorted.len() as f64;
    let (first, last) = (sorted[0], sorted[sorted.len() - 1]);
    let mut ks = 0.0_f64;
    let mut idx = 0;
    for n in first.saturating_sub(1)..=last {
        while idx < sorted.len() && sorted[idx] <= n {
            idx += 1;
        }
        let empirical = idx as f64 / total;
        ks = ks.max((empirical - tw_cdf(sol, scaled_statistic(n, lambda))).abs());
    }
    ks
}

/// KS distance of the scaled lengths at `N` (unit intensity, `λ = N²`).
pub fn tw_comparison(records: &[TrialRecord], sol: &TwSolution, n: f64) -> Result<f64> {
    let lengths: Vec<u64> = records.iter().filter(|r| r.n == n).map(|r| r.d).collect();
    if lengths.len() < MIN_TW_TRIALS {
        return Err(LabError::invalid(format!(
            "need at least {MIN_TW_TRIALS} trials at N = {n}, got {}",
            lengths.len()
        )));
    }
    Ok(ks_lattice(&lengths, n * n, sol))
}

/// Smallest `n` with `t(n, λ) ≥ t`; `t(·, λ)` is increasing in `n`.
pub fn lattice_ceiling(t: f64, lambda: f64) -> u64 {
    let mut hi = 1u64;
    while scaled_statistic(hi, lambda) < t {
        hi *= 2;
    }
    let mut lo = 0u64;
    if scaled_statistic(lo, lambda) >= t {
        return 0;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if scaled_statistic(mid, lambda) >= t {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Chain lengths whose law is exactly `P[d ≤ n] = F(t(n, λ))`: draw
/// `T ~ F` by inversion and map it to [`lattice_ceiling`]. The KS distance
/// of such a sample measures sampling noise alone.
pub fn self_sampled_lengths(sol: &TwSolution, lambda: f64, count: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let p: f64 = rng.random();
            lattice_ceiling(tw_quantile(sol, p), lambda)
        })
        .collect()
}
