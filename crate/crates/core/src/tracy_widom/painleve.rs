//! Hastings–McLeod solution of Painlevé II, `u″ = 2u³ + xu`.
//!
//! The solution is a separatrix, so marching from Airy data at the right end
//! is unstable. Instead the equation is discretized on a uniform grid with
//! the fourth-order Numerov scheme
//!
//! ```text
//! u[i-1] − 2u[i] + u[i+1] = h²/12 · (g[i-1] + 10 g[i] + g[i+1]),  g = 2u³ + xu
//! ```
//!
//! and the resulting tridiagonal nonlinear system is solved by damped Newton
//! iteration. Boundary values are `u(x_right) = Ai(x_right)` and the left
//! asymptotic `u(x) ≈ √(−x/2)(1 + 1/(8x³) − 73/(128x⁶) + 10657/(1024x⁹))`.
//! Perturbations of the left value decay like `exp(−∫√(2|x|))` into the
//! interior, so the truncated series only seeds the boundary.

use crate::error::{LabError, Result};

use super::airy::airy;

const MAX_NEWTON: usize = 60;

/// Left asymptotic expansion of the Hastings–McLeod solution (`x < 0`).
pub fn left_asymptotic(x: f64) -> f64 {
    let x3 = x * x * x;
    (-x / 2.0).sqrt()
        * (1.0 + 1.0 / (8.0 * x3) - 73.0 / (128.0 * x3 * x3) + 10657.0 / (1024.0 * x3 * x3 * x3))
}

/// Grid solution of the boundary-value problem.
#[derive(Debug, Clone)]
pub struct HmProfile {
    pub x_left: f64,
    pub x_right: f64,
    pub step: f64,
    pub u: Vec<f64>,
    pub newton_iterations: usize,
    /// Largest Numerov residual over interior nodes, in units of `u″`.
    pub residual_max: f64,
}

impl HmProfile {
    pub fn intervals(&self) -> usize {
        self.u.len() - 1
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_left + i as f64 * self.step
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.u.len()).map(|i| self.x(i)).collect()
    }

    /// Value at a grid abscissa by linear interpolation.
    pub fn interpolate(&self, x: f64) -> f64 {
        let s = ((x - self.x_left) / self.step).clamp(0.0, self.intervals() as f64);
        let i = (s.floor() as usize).min(self.intervals() - 1);
        let frac = s - i as f64;
        self.u[i] * (1.0 - frac) + self.u[i + 1] * frac
    }
}

#[inline]
fn g(x: f64, u: f64) -> f64 {
    2.0 * u * u * u + x * u
}

#[inline]
fn dg(x: f64, u: f64) -> f64 {
    6.0 * u * u + x
}

/// Numerov residuals `r[i]` (scaled by `h²`) at interior nodes `1..n`.
fn residuals(x_left: f64, h: f64, u: &[f64], out: &mut [f64]) {
    let c = h * h / 12.0;
    let n = u.len() - 1;
    let mut g_prev = g(x_left, u[0]);
    let mut g_cur = g(x_left + h, u[1]);
    for i in 1..n {
        let g_next = g(x_left + (i + 1) as f64 * h, u[i + 1]);
        // Difference of differences: both inner subtractions are exact for
        // neighbouring values, so the second difference keeps full precision.
        let second = (u[i + 1] - u[i]) - (u[i] - u[i - 1]);
        out[i] = second - c * (g_prev + 10.0 * g_cur + g_next);
        g_prev = g_cur;
        g_cur = g_next;
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Thomas algorithm for `lower[i] δ[i-1] + diag[i] δ[i] + upper[i] δ[i+1] = rhs[i]`.
fn solve_tridiagonal(lower: &[f64], diag: &mut [f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    for i in 1..n {
        let w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
}

fn initial_guess(x: f64) -> f64 {
    if x >= 0.0 {
        airy(x)
    } else {
        (-x / 2.0 + super::airy::AI0 * super::airy::AI0).sqrt()
    }
}

/// Solves the boundary-value problem on `intervals` uniform steps.
///
/// `guess`, when given, is interpolated onto the new grid as the Newton
/// starting point.
pub fn solve_profile(
    x_left: f64,
    x_right: f64,
    intervals: usize,
    guess: Option<&HmProfile>,
) -> Result<HmProfile> {
    if !(x_left < 0.0 && x_right > 0.0) || intervals < 4 {
        return Err(LabError::invalid(format!(
            "need x_left < 0 < x_right and at least 4 intervals, got [{x_left}, {x_right}] with {intervals}"
        )));
    }
    let n = intervals;
    let h = (x_right - x_left) / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| x_left + i as f64 * h).collect();
    let mut u: Vec<f64> = match guess {
        Some(p) => xs.iter().map(|&x| p.interpolate(x)).collect(),
        None => xs.iter().map(|&x| initial_guess(x)).collect(),
    };
    u[0] = left_asymptotic(x_left);
    u[n] = airy(x_right);

    let c = h * h / 12.0;
    let m = n - 1;
    let mut r = vec![0.0; n + 1];
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    let mut trial = u.clone();
    let mut trial_r = vec![0.0; n + 1];

    residuals(x_left, h, &u, &mut r);
    let mut r_norm = max_abs(&r[1..n]);
    let mut last_update = f64::INFINITY;
    let mut prev_update;
    let u_scale = max_abs(&u);

    for iter in 1..=MAX_NEWTON {
        for k in 0..m {
            let i = k + 1;
            diag[k] = -2.0 - 10.0 * c * dg(xs[i], u[i]);
            lower[k] = 1.0 - c * dg(xs[i - 1], u[i - 1]);
            upper[k] = 1.0 - c * dg(xs[i + 1], u[i + 1]);
            rhs[k] = -r[i];
        }
        solve_tridiagonal(&lower, &mut diag, &upper, &mut rhs);
        let delta = &rhs;
        prev_update = last_update;
        last_update = max_abs(delta);

        let mut lambda = 1.0;
        loop {
            trial.copy_from_slice(&u);
            for k in 0..m {
                trial[k + 1] += lambda * delta[k];
            }
            residuals(x_left, h, &trial, &mut trial_r);
            let t_norm = max_abs(&trial_r[1..n]);
            if t_norm <= r_norm || lambda < 1e-4 || last_update * lambda < 1e-15 * u_scale {
                std::mem::swap(&mut u, &mut trial);
                std::mem::swap(&mut r, &mut trial_r);
                r_norm = t_norm;
                break;
            }
            lambda *= 0.5;
        }

        // Updates bottom out at the rounding floor of the residual times the
        // inverse Jacobian norm (~1/h²); stop there.
        let stalled = last_update < 1e-9 * u_scale && last_update > 0.25 * prev_update;
        if lambda == 1.0 && (last_update <= 1e-14 * u_scale || stalled) {
            if u.iter().any(|&v| v.is_nan() || v <= 0.0) {
                return Err(LabError::SolverFailure {
                    message: "Newton converged to a solution that is not positive".into(),
                    iterations: iter,
                    last_update,
                });
            }
            return Ok(HmProfile {
                x_left,
                x_right,
                step: h,
                u,
                newton_iterations: iter,
                residual_max: r_norm / (h * h),
            });
        }
    }
    Err(LabError::SolverFailure {
        message: format!(
            "Newton iteration did not converge on {n} intervals (residual {:.3e})",
            r_norm / (h * h)
        ),
        iterations: MAX_NEWTON,
        last_update,
    })
}
