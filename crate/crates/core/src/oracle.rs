//! Brute-force reference values for every closed-form integral.
//!
//! Nothing here calls into [`crate::kernel`]'s closed forms or Laguerre
//! rules. Two routes are used for the time-dependent integral
//!
//! ```text
//! I(t) = int_0^inf f(w) exp(-i(w-w0)t) / (w - w0 - i eps)^2 dw + c.c.
//! ```
//!
//! * **real axis**: direct quadrature at finite `eps` for every rung of a
//!   ladder, followed by polynomial extrapolation to `eps = 0`. Near the
//!   double pole the part `g0 + g1 x` of the numerator is integrated in
//!   closed form and only the `O(x^2)` remainder is left to the quadrature.
//! * **rotated contour**: the half line is swung onto the negative
//!   imaginary axis (`z = -iy`) and the pole of the Lorentzian that is
//!   crossed on the way is picked up by a numerical contour integral on a
//!   small circle.
//!
//! The panels use an adaptive 16-point Gauss–Legendre rule with a bisection
//! error estimate, distinct from the Gauss–Kronrod rule on the evaluation path.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{markov_term, EvolutionParams};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Regularisation ladder, strictly decreasing, in units of `delta`.
    pub epsilon_ladder: Vec<f64>,
    /// Absolute quadrature tolerance in units of `1/delta^2`.
    pub abs_tol: f64,
    /// Agreement required between the two oracle routes.
    pub rel_tol: f64,
    /// Upper bound on adaptive panels per integral.
    pub max_panels: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            epsilon_ladder: vec![1e-2, 1e-3, 1e-4],
            abs_tol: 1e-13,
            rel_tol: 1e-5,
            max_panels: 400_000,
        }
    }
}

impl OracleConfig {
    fn validate(&self) -> Result<()> {
        let l = &self.epsilon_ladder;
        if l.is_empty() || l.iter().any(|&e| !(e > 0.0 && e < 0.5)) || l.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::domain(
                "epsilon ladder must be strictly decreasing and well below 1",
            ));
        }
        Ok(())
    }
}

/// Both routes for one time point.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeIntegralReport {
    pub t: f64,
    /// Real-axis value extrapolated to `eps = 0`.
    pub value: f64,
    /// Rotated-contour value.
    pub rotated: f64,
    /// `(eps, I_eps)` for every rung of the ladder.
    pub ladder: Vec<(f64, f64)>,
}

// ---------------------------------------------------------------------------
// Adaptive Gauss–Legendre

struct Legendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn legendre16() -> &'static Legendre {
    static RULE: OnceLock<Legendre> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = 16;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        Legendre { nodes, weights }
    })
}

fn gl16<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Complex64 {
    let rule = legendre16();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = Complex64::new(0.0, 0.0);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        s += f(c + h * x) * w;
    }
    s * h
}

struct Piece {
    a: f64,
    b: f64,
    left: Complex64,
    right: Complex64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn assess<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64, coarse: Complex64) -> Piece {
    let m = 0.5 * (a + b);
    let left = gl16(f, a, m);
    let right = gl16(f, m, b);
    Piece {
        a,
        b,
        left,
        right,
        err: (coarse - left - right).norm(),
    }
}

fn adaptive<F: FnMut(f64) -> Complex64>(
    mut f: F,
    breaks: &[f64],
    abs_tol: f64,
    max_panels: usize,
) -> Result<Complex64> {
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let coarse = gl16(&mut f, w[0], w[1]);
        let p = assess(&mut f, w[0], w[1], coarse);
        total += p.left + p.right;
        err += p.err;
        heap.push(p);
    }
    while err > abs_tol {
        if heap.len() >= max_panels {
            return Err(Error::NoConvergence {
                routine: "oracle Gauss-Legendre",
                nodes: heap.len(),
                residual: err,
            });
        }
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let l = assess(&mut f, p.a, m, p.left);
        let r = assess(&mut f, m, p.b, p.right);
        total += l.left + l.right + r.left + r.right - p.left - p.right;
        err += l.err + r.err - p.err;
        heap.push(l);
        heap.push(r);
    }
    Ok(total)
}

/// Panel boundaries on `[lo, hi]` (offsets from the line centre). Panels are
/// at most half an oscillation long and grow geometrically away from the centre.
fn far_breaks(lo: f64, hi: f64, t: f64, delta: f64) -> Vec<f64> {
    let half_period = if t > 0.0 { PI / t } else { f64::INFINITY };
    let mut out = vec![lo];
    let mut x = lo;
    while x < hi {
        let len = half_period.min((0.25 * delta).max(0.25 * x.abs()));
        x = (x + len).min(hi);
        out.push(x);
    }
    out
}

// ---------------------------------------------------------------------------
// Real-axis route

fn lorentz(x: f64, delta: f64) -> f64 {
    delta / PI / (delta * delta + x * x)
}

/// `exp(-iu) - 1 + iu` without cancellation for small `u`.
fn expm1_linear(u: f64) -> Complex64 {
    let half = (0.5 * u).sin();
    let re = -2.0 * half * half;
    let im = if u.abs() < 0.1 {
        let u2 = u * u;
        u * u2 * (1.0 / 6.0 - u2 * (1.0 / 120.0 - u2 * (1.0 / 5040.0 - u2 * (1.0 / 362_880.0 - u2 / 39_916_800.0))))
    } else {
        u - u.sin()
    };
    Complex64::new(re, im)
}

/// `int_0^inf f(w) exp(-i(w-w0)t) / (w-w0-i eps)^2 dw` at fixed `eps`.
fn real_axis_once(t: f64, omega0: f64, delta: f64, eps: f64, cfg: &OracleConfig) -> Result<Complex64> {
    let f0 = 1.0 / (PI * delta);
    let tol = cfg.abs_tol / (delta * delta);
    let window = delta.min(0.5 * omega0);
    let inv_sq = |x: f64| {
        let z = Complex64::new(x, -eps);
        (z * z).inv()
    };
    let phase = |x: f64| Complex64::from_polar(1.0, -x * t);

    // Closed-form part of the window: f0 * int dx/(x-ie)^2 + (-i t f0) * int x dx/(x-ie)^2.
    let j0 = Complex64::from(-2.0 * window / (window * window + eps * eps));
    let j1 = Complex64::new(window, -eps).ln() - Complex64::new(-window, -eps).ln() + Complex64::i() * eps * j0;
    let analytic = j0 * f0 + Complex64::new(0.0, -t * f0) * j1;

    // O(x^2) remainder inside the window.
    let mut wb = vec![0.0];
    let mut s = eps;
    while s < window {
        wb.push(s);
        s *= 4.0;
    }
    wb.push(window);
    let mut window_breaks: Vec<f64> = wb.iter().rev().map(|x| -x).collect();
    window_breaks.extend(wb.iter().skip(1));
    let remainder = |x: f64| {
        let df = -f0 * x * x / (delta * delta + x * x);
        (phase(x) * df + expm1_linear(x * t) * f0) * inv_sq(x)
    };
    let inner = adaptive(remainder, &window_breaks, 0.25 * tol, cfg.max_panels)?;

    // Far regions.
    let full = |x: f64| phase(x) * lorentz(x, delta) * inv_sq(x);
    let left = adaptive(
        full,
        &far_breaks(-omega0, -window, t, delta),
        0.25 * tol,
        cfg.max_panels,
    )?;

    let truncate = delta * (1.0 / (3.0 * PI * cfg.abs_tol)).cbrt();
    let oscillatory_tail = t * truncate > 4000.0;
    let upper = if oscillatory_tail {
        (300.0 * delta).max(400.0 / t)
    } else {
        truncate
    };
    let right = adaptive(full, &far_breaks(window, upper, t, delta), 0.25 * tol, cfg.max_panels)?;

    let tail = if oscillatory_tail {
        // Two terms of integration by parts: e^{-iXt} [h/(it) + h'/(it)^2].
        let x = upper;
        let f = lorentz(x, delta);
        let df = -2.0 * x * f / (delta * delta + x * x);
        let z = Complex64::new(x, -eps);
        let h = f / (z * z);
        let dh = df / (z * z) - 2.0 * f / (z * z * z);
        let it = Complex64::new(0.0, t);
        phase(x) * (h / it + dh / (it * it))
    } else {
        Complex64::new(0.0, 0.0)
    };

    Ok(analytic + inner + left + right + tail)
}

/// Value at zero of the interpolating polynomial through `(x_i, y_i)`.
fn extrapolate_to_zero(points: &[(f64, f64)]) -> f64 {
    let mut p: Vec<f64> = points.iter().map(|q| q.1).collect();
    let x: Vec<f64> = points.iter().map(|q| q.0).collect();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (x[i], x[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

fn real_axis_ladder(t: f64, omega0: f64, delta: f64, cfg: &OracleConfig) -> Result<(f64, Vec<(f64, f64)>)> {
    cfg.validate()?;
    let ladder: Vec<(f64, f64)> = cfg
        .epsilon_ladder
        .iter()
        .map(|&k| {
            let eps = k * delta;
            real_axis_once(t, omega0, delta, eps, cfg).map(|v| (eps, 2.0 * v.re))
        })
        .collect::<Result<_>>()?;
    Ok((extrapolate_to_zero(&ladder), ladder))
}

// ---------------------------------------------------------------------------
// Rotated-contour route

fn rotated_contour(t: f64, omega0: f64, delta: f64, cfg: &OracleConfig) -> Result<f64> {
    let lorentz_c = |z: Complex64| {
        let d = z - omega0;
        (d * d + delta * delta).inv() * (delta / PI)
    };
    let big_f = |z: Complex64| {
        let d = z - omega0;
        lorentz_c(z) / (d * d)
    };
    let g = |z: Complex64| (Complex64::new(0.0, -t) * (z - omega0)).exp() * big_f(z);

    // Along z = -iy: dz = -i dy.
    let along = |y: f64| g(Complex64::new(0.0, -y)) * Complex64::new(0.0, -1.0);
    let scale = if t > 0.0 { omega0.min(1.0 / t) } else { omega0 };
    let mut breaks = vec![0.0];
    let mut y = scale / 64.0;
    while y < omega0 {
        breaks.push(y);
        y *= 2.0;
    }
    breaks.push(omega0);
    // Magnitude of the answer is ~ delta / omega0^3.
    let tol = cfg.abs_tol / (delta * delta) * 1e-3;
    let head = adaptive(along, &breaks, tol, cfg.max_panels)?;
    let tail_mapped = |u: f64| {
        if u <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let y = omega0 / u;
        along(y) * (omega0 / (u * u))
    };
    let tail = adaptive(tail_mapped, &[0.0, 0.25, 0.5, 1.0], tol, cfg.max_panels)?;

    // -2 pi i Res at the Lorentzian pole w0 - i delta, by trapezoid on a circle.
    let centre = Complex64::new(omega0, -delta);
    let radius = if t > 0.0 {
        (0.5 * delta).min(1.0 / t)
    } else {
        0.5 * delta
    };
    let n = 64;
    let mut res = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let e = Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64);
        res += g(centre + e) * e;
    }
    res /= n as f64;
    let enclosed = Complex64::new(0.0, -2.0 * PI) * res;

    Ok(2.0 * (head + tail + enclosed).re)
}

// ---------------------------------------------------------------------------
// Public oracle operations

/// Both routes at `t >= 0`; fails if they disagree beyond `rel_tol`.
pub fn time_integral_report(t: f64, omega0: f64, delta: f64, cfg: &OracleConfig) -> Result<TimeIntegralReport> {
    if !(t >= 0.0 && omega0 > 0.0 && delta > 0.0) {
        return Err(Error::domain(format!(
            "oracle needs t >= 0 and positive omega0, delta (t = {t})"
        )));
    }
    let (value, ladder) = real_axis_ladder(t, omega0, delta, cfg)?;
    let rotated = rotated_contour(t, omega0, delta, cfg)?;
    if (value - rotated).abs() > cfg.rel_tol * value.abs().max(rotated.abs()) {
        return Err(Error::RouteMismatch {
            t,
            real_axis: value,
            rotated,
        });
    }
    Ok(TimeIntegralReport {
        t,
        value,
        rotated,
        ladder,
    })
}

pub fn time_integral(t: f64, omega0: f64, delta: f64, cfg: &OracleConfig) -> Result<f64> {
    time_integral_report(t, omega0, delta, cfg).map(|r| r.value)
}

/// `int_0^inf f / (w - w0 - i eps)^2 dw + c.c.` by the real-axis ladder.
pub fn constant_integral(omega0: f64, delta: f64, cfg: &OracleConfig) -> Result<f64> {
    if !(omega0 > 0.0 && delta > 0.0) {
        return Err(Error::domain("omega0 and delta must be positive"));
    }
    real_axis_ladder(0.0, omega0, delta, cfg).map(|r| r.0)
}

/// `A` and `B` by adaptive quadrature of `exp(-xi) a^4 / ([a^2 + b(a+i xi)^2](a+i xi)^2)`
/// on `[0, 37]`, evaluated in complex arithmetic.
pub fn kernel_reference(a: f64, b: f64, cfg: &OracleConfig) -> Result<(f64, f64)> {
    if !(a > 0.0 && b >= 0.0) {
        return Err(Error::domain(format!(
            "kernel reference needs a > 0, b >= 0 (a = {a}, b = {b})"
        )));
    }
    let xi_max = 37.0; // exp(-37) < 1e-16
    let integrand = |xi: f64| {
        let w = Complex64::new(1.0, xi / a);
        let first = Complex64::from(1.0) + w * w * b;
        (first * w * w).inv() * (-xi).exp()
    };
    let mut breaks = vec![0.0];
    let mut x = a.min(1.0) / 16.0;
    while x < xi_max {
        breaks.push(x);
        x *= 2.0;
    }
    breaks.push(xi_max);
    let scale = 1.0 / (1.0 + b);
    let v = adaptive(integrand, &breaks, 1e-14 * scale, cfg.max_panels)?;
    Ok((v.re, v.im))
}

/// `<-1|rho(t)|-1>` assembled from the oracle integrals, without the closed forms.
pub fn rho_reference(t: f64, p: &EvolutionParams, cfg: &OracleConfig) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be non-negative, got {t}")));
    }
    let markov = markov_term(t, p.gamma_minus1);
    if p.kappa == 0.0 {
        return Ok(markov);
    }
    let half_k2 = 0.5 * p.kappa * p.kappa;
    let constant = constant_integral(p.omega0, p.delta, cfg)?;
    let memory = time_integral(t, p.omega0, p.delta, cfg)?;
    Ok(markov * (1.0 - half_k2 * constant) + half_k2 * memory)
}
