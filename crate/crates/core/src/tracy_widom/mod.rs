//! Tracy–Widom GUE distribution.
//!
//! `F(t) = exp(−q(t))` with `q(t) = ∫_t^∞ (x − t) u(x)² dx` and `u` the
//! Hastings–McLeod solution of Painlevé II. The solution is computed on a
//! grid (see [`painleve`]), `q` is tabulated by fourth-order cumulative
//! quadrature plus a closed-form Airy tail beyond `x_right`, and values
//! between table nodes come from monotone cubic interpolation of `q`.
//!
//! Working with `q` rather than `F` keeps the table strictly monotone where
//! `F` rounds to 1.0 in double precision (`t ≳ 8`).

pub mod airy;
pub mod painleve;

use std::io::Write;

use crate::error::{LabError, Result};

pub use airy::{airy, airy_pair, airy_prime};
pub use painleve::{left_asymptotic, solve_profile, HmProfile};

pub const DEFAULT_X_LEFT: f64 = -10.0;
pub const DEFAULT_X_RIGHT: f64 = 10.0;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_TABLE_STEP: f64 = 0.005;
/// Maximum number of grid halvings beyond the table step.
const MAX_REFINEMENTS: u32 = 4;

/// `∫_X^∞ Ai(x)² dx` and `∫_X^∞ x Ai(x)² dx` in closed form.
///
/// Antiderivatives: `x Ai² − Ai′²` and `(x² Ai² − x Ai′² + Ai Ai′)/3`.
pub fn airy_square_tail(x: f64) -> (f64, f64) {
    let (a, ap) = airy_pair(x);
    let zeroth = ap * ap - x * a * a;
    let first = -(x * x * a * a - x * ap * ap + a * ap) / 3.0;
    (zeroth, first)
}

/// `q(t)` for `t ≥ x_right`, using `u ≈ Ai`. The neglected part is
/// `O(Ai(t)⁴)`, below `1e-36` for `t ≥ 10`.
pub fn airy_tail_q(t: f64) -> f64 {
    let (zeroth, first) = airy_square_tail(t);
    (first - t * zeroth).max(0.0)
}

/// Cumulative integrals from each node to the right end, fourth order.
///
/// Interval `[x_i, x_{i+1}]` uses the cubic through four neighbouring nodes:
/// `h/24 (−f_{i−1} + 13 f_i + 13 f_{i+1} − f_{i+2})`, one-sided at the ends.
fn cumulative_from_right(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len() - 1;
    let mut out = vec![0.0; n + 1];
    for i in (0..n).rev() {
        let piece = if i == 0 {
            9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]
        } else if i == n - 1 {
            f[n - 3] - 5.0 * f[n - 2] + 19.0 * f[n - 1] + 9.0 * f[n]
        } else {
            -f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]
        };
        out[i] = out[i + 1] + h / 24.0 * piece;
    }
    out
}

/// `q(x_i)` at every grid node of a profile.
pub fn log_cdf_on_grid(profile: &HmProfile) -> Vec<f64> {
    let xs = profile.grid();
    let sq: Vec<f64> = profile.u.iter().map(|u| u * u).collect();
    let xsq: Vec<f64> = sq.iter().zip(&xs).map(|(s, x)| s * x).collect();
    let zeroth = cumulative_from_right(&sq, profile.step);
    let first = cumulative_from_right(&xsq, profile.step);
    let (tail0, tail1) = airy_square_tail(profile.x_right);
    xs.iter()
        .enumerate()
        .map(|(i, &t)| ((first[i] + tail1) - t * (zeroth[i] + tail0)).max(0.0))
        .collect()
}

/// Numerical Hastings–McLeod solution with the tabulated `F(t)`.
#[derive(Debug, Clone)]
pub struct TwSolution {
    pub x_left: f64,
    pub x_right: f64,
    pub tol: f64,
    /// ODE grid abscissae.
    pub grid: Vec<f64>,
    /// `u(x)` on [`grid`](Self::grid).
    pub u_values: Vec<f64>,
    /// Table abscissae (uniform, step ≈ 0.005).
    pub table_t: Vec<f64>,
    /// `q(t) = −ln F(t)` on the table.
    pub table_q: Vec<f64>,
    /// Largest `|F_h − F_{h/2}|` over the table between the last two grids.
    pub err_estimate: f64,
    /// Largest Numerov residual of the accepted grid solution.
    pub residual_max: f64,
    pub ode_step: f64,
    slopes: Vec<f64>,
}

impl TwSolution {
    pub fn table_step(&self) -> f64 {
        (self.x_right - self.x_left) / (self.table_t.len() - 1) as f64
    }

    /// `(t, F(t))` pairs.
    pub fn f_table(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.table_t
            .iter()
            .zip(&self.table_q)
            .map(|(&t, &q)| (t, (-q).exp()))
    }

    /// `u` at `x_right`.
    pub fn u_right(&self) -> f64 {
        *self.u_values.last().expect("grid is non-empty")
    }

    /// `u(0)` by cubic interpolation on the ODE grid.
    pub fn u_at(&self, x: f64) -> f64 {
        let h = self.ode_step;
        let n = self.grid.len() - 1;
        let s = ((x - self.x_left) / h).clamp(0.0, n as f64);
        let i = (s.floor() as usize).clamp(1, n - 2);
        let f = s - i as f64;
        let p = &self.u_values[i - 1..=i + 2];
        // Lagrange cubic on nodes -1, 0, 1, 2.
        -f * (f - 1.0) * (f - 2.0) / 6.0 * p[0] + (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0 * p[1]
            - (f + 1.0) * f * (f - 2.0) / 2.0 * p[2]
            + (f + 1.0) * f * (f - 1.0) / 6.0 * p[3]
    }

    /// `q(t) = −ln F(t)`.
    pub fn log_cdf_complement(&self, t: f64) -> f64 {
        if t.is_nan() {
            return f64::NAN;
        }
        if t >= self.x_right {
            return airy_tail_q(t);
        }
        if t <= self.x_left {
            return f64::INFINITY;
        }
        pchip_eval(&self.table_t, &self.table_q, &self.slopes, t)
    }

    /// Survival function `1 − F(t)`, accurate in the right tail.
    pub fn survival(&self, t: f64) -> f64 {
        -(-self.log_cdf_complement(t)).exp_m1()
    }

    /// Writes the `(t, F)` table as CSV preceded by `#` parameter lines.
    pub fn write_table_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        let io = |e| LabError::io("<tw table>", e);
        writeln!(writer, "# x_left={}", self.x_left).map_err(io)?;
        writeln!(writer, "# x_right={}", self.x_right).map_err(io)?;
        writeln!(writer, "# ode_step={}", self.ode_step).map_err(io)?;
        writeln!(writer, "# table_step={}", self.table_step()).map_err(io)?;
        writeln!(writer, "# tol={:e}", self.tol).map_err(io)?;
        writeln!(writer, "# err_estimate={:e}", self.err_estimate).map_err(io)?;
        writeln!(writer, "# residual_max={:e}", self.residual_max).map_err(io)?;
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "F", "log_F"])?;
        for (&t, &q) in self.table_t.iter().zip(&self.table_q) {
            w.write_record([
                format!("{t:.6}"),
                format!("{:.17e}", (-q).exp()),
                format!("{:.17e}", -q),
            ])?;
        }
        w.flush().map_err(io)?;
        Ok(())
    }
}

/// Fritsch–Carlson slopes for a uniformly spaced monotone table.
fn pchip_slopes(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let secants: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
    let mut d = vec![0.0; n];
    d[0] = secants[0];
    d[n - 1] = secants[n - 2];
    for i in 1..n - 1 {
        let (a, b) = (secants[i - 1], secants[i]);
        d[i] = if a * b <= 0.0 {
            0.0
        } else {
            2.0 * a * b / (a + b)
        };
    }
    d
}

fn pchip_eval(xs: &[f64], y: &[f64], d: &[f64], x: f64) -> f64 {
    let h = xs[1] - xs[0];
    let n = xs.len() - 1;
    let i = (((x - xs[0]) / h).floor().max(0.0) as usize).min(n - 1);
    let s = (x - xs[i]) / h;
    let (s2, s3) = (s * s, s * s * s);
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1]
}

/// Samples `q` from a profile at every `stride`-th node.
fn table_from_profile(profile: &HmProfile, stride: usize) -> (Vec<f64>, Vec<f64>) {
    let q = log_cdf_on_grid(profile);
    let t: Vec<f64> = (0..q.len()).step_by(stride).map(|i| profile.x(i)).collect();
    let q: Vec<f64> = q.into_iter().step_by(stride).collect();
    (t, q)
}

/// Largest `|F_a − F_b|` between two tables on the same abscissae.
pub fn table_discrepancy(qa: &[f64], qb: &[f64]) -> f64 {
    qa.iter()
        .zip(qb)
        .fold(0.0_f64, |m, (a, b)| m.max(((-a).exp() - (-b).exp()).abs()))
}

/// Number of table intervals for a domain: the step is the largest value
/// not exceeding [`DEFAULT_TABLE_STEP`] that divides the domain evenly.
pub fn table_intervals(x_left: f64, x_right: f64) -> usize {
    ((x_right - x_left) / DEFAULT_TABLE_STEP - 1e-9).ceil() as usize
}

/// Solves for the Hastings–McLeod solution and tabulates `F`.
///
/// The ODE grid starts at the table step and is halved until two successive
/// grids give tables that differ by less than `tol`. The coarser grid of
/// that pair is returned. Its error estimate is the Richardson bound
/// `16/15 · discrepancy` for a fourth-order scheme.
///
/// The Numerov residual of a converged profile has a rounding floor of
/// roughly `ulp(u) / h²`, so it grows fourfold with each halving.
pub fn solve_hastings_mcleod(x_left: f64, x_right: f64, tol: f64) -> Result<TwSolution> {
    if !(x_left.is_finite() && x_right.is_finite() && x_left < -5.0 && x_right > 5.0) {
        return Err(LabError::invalid(format!(
            "domain must satisfy x_left < -5 < 5 < x_right, got [{x_left}, {x_right}]"
        )));
    }
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(LabError::invalid(format!(
            "tol must lie in (0, 1e-6], got {tol}"
        )));
    }
    let base = table_intervals(x_left, x_right);
    let mut coarse = solve_profile(x_left, x_right, base, None)?;
    let (table_t, mut coarse_q) = table_from_profile(&coarse, 1);
    let mut last_err = f64::INFINITY;
    for level in 1..=MAX_REFINEMENTS {
        let stride = 1usize << level;
        let fine = solve_profile(x_left, x_right, base * stride, Some(&coarse))?;
        let (_, fine_q) = table_from_profile(&fine, stride);
        last_err = table_discrepancy(&coarse_q, &fine_q);
        if last_err < tol {
            if coarse.residual_max >= tol {
                return Err(LabError::SolverFailure {
                    message: format!(
                        "grid converged but Numerov residual {:.3e} is not below tol {tol:e}",
                        coarse.residual_max
                    ),
                    iterations: coarse.newton_iterations,
                    last_update: last_err,
                });
            }
            let slopes = pchip_slopes(&coarse_q, table_t[1] - table_t[0]);
            return Ok(TwSolution {
                x_left,
                x_right,
                tol,
                grid: coarse.grid(),
                u_values: coarse.u,
                table_t,
                table_q: coarse_q,
                err_estimate: last_err * 16.0 / 15.0,
                residual_max: coarse.residual_max,
                ode_step: coarse.step,
                slopes,
            });
        }
        coarse = fine;
        coarse_q = fine_q;
    }
    Err(LabError::SolverFailure {
        message: format!(
            "F table did not settle below tol {tol:e} after {MAX_REFINEMENTS} grid halvings"
        ),
        iterations: MAX_REFINEMENTS as usize,
        last_update: last_err,
    })
}

/// Solution on the default domain `[−10, 10]` with tolerance `1e-10`.
pub fn default_solution() -> Result<TwSolution> {
    solve_hastings_mcleod(DEFAULT_X_LEFT, DEFAULT_X_RIGHT, DEFAULT_TOL)
}

/// `F(t)`. Below `x_left` returns 0 (`F(−10) < 1e-30`); above `x_right` the
/// Airy tail is used, which keeps `1 − F` accurate.
pub fn tw_cdf(sol: &TwSolution, t: f64) -> f64 {
    (-sol.log_cdf_complement(t)).exp()
}

/// Inverse of `F` by bisection; `p` is clamped into the tabulated range.
pub fn tw_quantile(sol: &TwSolution, p: f64) -> f64 {
    let (mut lo, mut hi) = (sol.x_left, sol.x_right);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if tw_cdf(sol, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Chain-length threshold `n` and rectangle area `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingInput {
    pub n: u64,
    pub lambda: f64,
}

impl ScalingInput {
    pub fn new(n: u64, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(LabError::invalid(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(ScalingInput { n, lambda })
    }
}

/// `t = 2^{1/3} (n+1)^{−1/3} (n + 1 − 2√λ)`.
pub fn scaling_map(input: ScalingInput) -> f64 {
    let m = input.n as f64 + 1.0;
    2f64.cbrt() * (m - 2.0 * input.lambda.sqrt()) / m.cbrt()
}

/// Scaled coordinate of an observed chain length `d` at area `λ`.
pub fn scaled_statistic(d: u64, lambda: f64) -> f64 {
    scaling_map(ScalingInput { n: d, lambda })
}

/// Least-squares slope and intercept of `y` on `x`.
pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fitted exponent `p` in `−ln F(t) ≈ c |t|^p` over `[lo, hi] ⊂ (−∞, 0)`.
pub fn left_tail_exponent(sol: &TwSolution, lo: f64, hi: f64) -> f64 {
    let (xs, ys): (Vec<f64>, Vec<f64>) = sol
        .table_t
        .iter()
        .zip(&sol.table_q)
        .filter(|(&t, _)| t >= lo && t <= hi)
        .map(|(&t, &q)| (t.abs().ln(), q.ln()))
        .unzip();
    linear_fit(&xs, &ys).0
}

/// Fit of `ln(1 − F(t)) ≈ ln c₁ − c₂ t^{3/2}` over `[lo, hi] ⊂ (0, ∞)`.
///
/// Returns `(c₁, c₂)` where `c₁` is enlarged by the largest positive
/// residual so the bound holds at every table node in the window.
pub fn right_tail_bound(sol: &TwSolution, lo: f64, hi: f64) -> (f64, f64) {
    let (xs, ys): (Vec<f64>, Vec<f64>) = sol
        .table_t
        .iter()
        .filter(|&&t| t >= lo && t <= hi)
        .map(|&t| (t.powf(1.5), sol.survival(t).ln()))
        .unzip();
    let (slope, intercept) = linear_fit(&xs, &ys);
    let worst = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (intercept + slope * x))
        .fold(0.0_f64, f64::max);
    ((intercept + worst).exp(), -slope)
}
