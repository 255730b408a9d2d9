//! Airy function `Ai` and its derivative.
//!
//! Evaluation regimes:
//!
//! | range            | method                                                 |
//! |------------------|--------------------------------------------------------|
//! | `x ≥ 8`          | exponentially decaying asymptotic series               |
//! | `1.5 < x < 8`    | Taylor continuation leftwards from the value at `x = 8` |
//! | `-3 ≤ x ≤ 1.5`   | Maclaurin series                                       |
//! | `-8 < x < -3`    | Taylor continuation from the Maclaurin value at `x = 0` |
//! | `x ≤ -8`         | oscillatory asymptotic series                          |
//!
//! The asymptotic series are truncated at their smallest term; at `|x| = 8`
//! that term is about `e^{-2ζ} ≈ 1e-13` with `ζ = (2/3)|x|^{3/2}`. Taylor
//! continuation is only ever run in the direction where `Ai` is not the
//! recessive solution, so rounding errors are not amplified.

use std::f64::consts::PI;

/// `Ai(0) = 3^{-2/3} / Γ(2/3)`.
pub const AI0: f64 = 0.355_028_053_887_817_2;
/// `-Ai′(0) = 3^{-1/3} / Γ(1/3)`.
pub const NEG_AIP0: f64 = 0.258_819_403_792_806_8;

pub const ASYMPTOTIC_THRESHOLD: f64 = 8.0;
const MACLAURIN_POS: f64 = 1.5;
const MACLAURIN_NEG: f64 = -3.0;
const TAYLOR_STEP: f64 = 0.25;

/// `Ai(x)`.
pub fn airy(x: f64) -> f64 {
    airy_pair(x).0
}

/// `Ai′(x)`.
pub fn airy_prime(x: f64) -> f64 {
    airy_pair(x).1
}

/// `(Ai(x), Ai′(x))`.
pub fn airy_pair(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if x >= ASYMPTOTIC_THRESHOLD {
        asymptotic_positive(x)
    } else if x > MACLAURIN_POS {
        let (a, ap) = asymptotic_positive(ASYMPTOTIC_THRESHOLD);
        taylor_continue(ASYMPTOTIC_THRESHOLD, a, ap, x)
    } else if x >= MACLAURIN_NEG {
        maclaurin(x)
    } else if x > -ASYMPTOTIC_THRESHOLD {
        taylor_continue(0.0, AI0, -NEG_AIP0, x)
    } else {
        asymptotic_negative(-x)
    }
}

/// Maclaurin series `Ai = c₁ f − c₂ g` with
/// `f = Σ 3^k (1/3)_k x^{3k}/(3k)!` and `g = Σ 3^k (2/3)_k x^{3k+1}/(3k+1)!`.
pub fn maclaurin(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    let (mut f, mut fp) = (1.0, 0.0);
    let (mut g, mut gp) = (x, 1.0);
    let (mut tf, mut tfp) = (1.0, 0.0);
    let (mut tg, mut tgp) = (x, 1.0);
    for k in 1..200 {
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tfp = if k == 1 {
            x * x / 2.0
        } else {
            tfp * x3 / (3.0 * (kf - 1.0) * (3.0 * kf - 1.0))
        };
        tg *= x3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        tgp *= x3 / ((3.0 * kf - 2.0) * (3.0 * kf));
        f += tf;
        fp += tfp;
        g += tg;
        gp += tgp;
        let scale = f.abs() + g.abs() + fp.abs() + gp.abs();
        if tf.abs() + tfp.abs() + tg.abs() + tgp.abs() <= 1e-18 * scale {
            break;
        }
    }
    (AI0 * f - NEG_AIP0 * g, AI0 * fp - NEG_AIP0 * gp)
}

/// Coefficients `u_k` of the Airy asymptotic expansions.
fn u_coeff(k: usize) -> f64 {
    (1..=k).fold(1.0, |u, j| {
        let j = j as f64;
        u * (6.0 * j - 5.0) * (6.0 * j - 3.0) * (6.0 * j - 1.0) / ((2.0 * j - 1.0) * 216.0 * j)
    })
}

/// Coefficients `v_k = −(6k+1)/(6k−1) u_k` (with `v_0 = 1`).
fn v_coeff(k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        let kf = k as f64;
        -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u_coeff(k)
    }
}

/// Terms `c_k / ζ^k` of an asymptotic series, truncated at the smallest term.
fn asymptotic_terms(zeta: f64, coeff: fn(usize) -> f64) -> Vec<f64> {
    let mut terms = vec![coeff(0)];
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let t = coeff(k) / zeta.powi(k as i32);
        if t.abs() >= prev {
            break;
        }
        prev = t.abs();
        terms.push(t);
        if t.abs() < 1e-17 {
            break;
        }
    }
    terms
}

/// `x ≥ 8`: `Ai(x) ~ e^{−ζ}/(2√π x^{1/4}) Σ (−1)^k u_k ζ^{−k}`.
fn asymptotic_positive(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let alt = |terms: Vec<f64>| {
        terms
            .iter()
            .enumerate()
            .rev()
            .map(|(k, t)| if k % 2 == 0 { *t } else { -*t })
            .sum::<f64>()
    };
    let su = alt(asymptotic_terms(zeta, u_coeff));
    let sv = alt(asymptotic_terms(zeta, v_coeff));
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = x.powf(0.25);
    (e / q * su, -e * q * sv)
}

/// `x = −z ≤ −8`, with `θ = ζ − π/4`:
/// `Ai(−z) ~ (cos θ P_u + sin θ Q_u)/(√π z^{1/4})`,
/// `Ai′(−z) ~ z^{1/4}(sin θ P_v − cos θ Q_v)/√π`,
/// where `P = Σ (−1)^k c_{2k} ζ^{−2k}` and `Q = Σ (−1)^k c_{2k+1} ζ^{−2k−1}`.
fn asymptotic_negative(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let split = |terms: Vec<f64>| {
        let (mut p, mut q) = (0.0, 0.0);
        for (k, t) in terms.iter().enumerate().rev() {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 0 {
                p += sign * t;
            } else {
                q += sign * t;
            }
        }
        (p, q)
    };
    let (pu, qu) = split(asymptotic_terms(zeta, u_coeff));
    let (pv, qv) = split(asymptotic_terms(zeta, v_coeff));
    let (s, c) = (zeta - PI / 4.0).sin_cos();
    let q = z.powf(0.25);
    let rp = PI.sqrt();
    ((c * pu + s * qu) / (rp * q), q * (s * pv - c * qv) / rp)
}

/// Integrates `y″ = x y` from `(x0, y, y′)` to `x` with local Taylor series.
///
/// At a center `c` the coefficients obey
/// `a_{k+2} = (c a_k + a_{k−1}) / ((k+1)(k+2))`.
fn taylor_continue(x0: f64, mut y: f64, mut yp: f64, x: f64) -> (f64, f64) {
    let span = x - x0;
    let steps = (span.abs() / TAYLOR_STEP).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let mut c = x0;
    for _ in 0..steps {
        // a[k] coefficients of y(c + s) = Σ a_k s^k, evaluated at s = h.
        let (mut a_km1, mut a_k, mut a_kp1) = (0.0, y, yp);
        let mut val = y + yp * h;
        let mut der = yp;
        let mut hp = h;
        let mut small_run = 0;
        for k in 0..200 {
            let kf = k as f64;
            let a_kp2 = (c * a_k + a_km1) / ((kf + 1.0) * (kf + 2.0));
            let term_d = (kf + 2.0) * a_kp2 * hp;
            hp *= h;
            let term_v = a_kp2 * hp;
            val += term_v;
            der += term_d;
            a_km1 = a_k;
            a_k = a_kp1;
            a_kp1 = a_kp2;
            // Single coefficients can vanish (e.g. at c = 0), so require a run.
            let small = term_v.abs() <= 1e-18 * val.abs() && term_d.abs() <= 1e-18 * der.abs();
            small_run = if small { small_run + 1 } else { 0 };
            if small_run >= 3 {
                break;
            }
        }
        y = val;
        yp = der;
        c += h;
    }
    (y, yp)
}
