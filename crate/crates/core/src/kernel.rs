//! Closed-form survival element `<-1|rho(t)|-1>`.
//!
//! ```text
//! rho(t) = exp(-2 g t) [1 + k^2 (2 d + pi w + 2 w atan(w/d)) / (2 pi d^2 w)]
//!        + k^2 / (d pi w^2 t) (A(t) sin(w t) + B(t) cos(w t))
//!        - exp(-d t) k^2 / d^2
//! ```
//!
//! with `g = gamma_-1`, `k = gamma_N H_1`, `w = omega0 = Delta E_23` and
//! `d = delta`. The memory kernels are
//! `A, B = int_0^inf exp(-xi) N_{A,B}(xi) / D(xi) d xi` with `a = w t` and
//! `b = (w / d)^2`. They are evaluated in the scaled variable `s = xi / a`,
//! where numerator and denominator are divided by `a^8`.

use std::f64::consts::PI;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lineshape::{decay_rate, LineshapeParams};
use crate::quadrature::{integrate_breaks, laguerre_ladder, Tolerance, LAGUERRE_LADDER};
use crate::spin_model::SpectrumReport;

/// Below this `a = omega0 t` the rational factor varies on a scale finer
/// than the leading Laguerre nodes and adaptive panels are used directly.
const LAGUERRE_MIN_A: f64 = 4.0;
/// Upper limit of the adaptive fallback; `exp(-50)` is below double precision.
const FALLBACK_XI_MAX: f64 = 50.0;
/// Agreement required between successive Laguerre estimates.
const KERNEL_REL_TOL: f64 = 1e-8;
/// Times below `T_MIN_SCALE / omega0` are bridged linearly to the `t = 0` value.
pub const T_MIN_SCALE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    /// Decay rate gamma_-1, 1/s.
    pub gamma_minus1: f64,
    /// Coupling `kappa = gamma_N H_1`, rad/s.
    pub kappa: f64,
    /// Transition frequency `Delta E_23`, rad/s.
    pub omega0: f64,
    /// Line half-width, rad/s.
    pub delta: f64,
}

impl EvolutionParams {
    pub fn new(gamma_minus1: f64, kappa: f64, omega0: f64, delta: f64) -> Result<Self> {
        for (name, v) in [("gamma_minus1", gamma_minus1), ("kappa", kappa)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::domain(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        for (name, v) in [("omega0", omega0), ("delta", delta)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        let c = second_order_constant(omega0, delta);
        if !(c < 0.0) {
            return Err(Error::domain(format!(
                "second-order constant must be negative, got {c}"
            )));
        }
        Ok(EvolutionParams {
            gamma_minus1,
            kappa,
            omega0,
            delta,
        })
    }

    /// Resonant driving of the `E3 -> E2` transition.
    pub fn from_spectrum(s: &SpectrumReport, h_1: f64, delta: f64) -> Result<Self> {
        let line = LineshapeParams::new(s.de23, delta)?;
        let gamma = decay_rate(s.gamma_n, h_1, &line);
        EvolutionParams::new(gamma, s.gamma_n * h_1, s.de23, delta)
    }

    pub fn t_min(&self) -> f64 {
        T_MIN_SCALE / self.omega0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMethod {
    /// Gauss–Laguerre converged with this many nodes.
    Laguerre(usize),
    /// Adaptive Gauss–Kronrod on `[0, 50]`.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEvaluation {
    pub t: f64,
    pub a_val: f64,
    pub b_val: f64,
    /// Minimum of `D(xi) / a^8` over the quadrature nodes.
    pub d_min: f64,
    pub method: KernelMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValues {
    pub a: f64,
    pub b: f64,
    pub eval: KernelEvaluation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionSeries {
    pub times: Vec<f64>,
    pub rho_complete: Vec<f64>,
    pub rho_markov: Vec<f64>,
}

pub fn markov_term(t: f64, gamma_minus1: f64) -> f64 {
    (-2.0 * gamma_minus1 * t).exp()
}

/// `int_0^inf f / (omega - omega0 - i eps)^2 d omega + c.c.` in the limit `eps -> 0`.
pub fn second_order_constant(omega0: f64, delta: f64) -> f64 {
    -(2.0 * delta + PI * omega0 + 2.0 * omega0 * (omega0 / delta).atan()) / (PI * delta * delta * omega0)
}

/// Scaled denominator `D / a^8` as a polynomial in `s = xi / a`.
fn scaled_denominator(s: f64, b: f64) -> f64 {
    let s2 = s * s;
    let c0 = (1.0 + b) * (1.0 + b);
    let c2 = 2.0 + b * (2.0 + 4.0 * b);
    let c4 = 1.0 + b * (-2.0 + 6.0 * b);
    let c6 = b * (-2.0 + 4.0 * b);
    let c8 = b * b;
    (((c8 * s2 + c6) * s2 + c4) * s2 + c2) * s2 + c0
}

/// Rational factors `(R_A, R_B)` at `xi` together with `D(xi) / a^8`.
pub fn kernel_integrands(xi: f64, a: f64, b: f64) -> (f64, f64, f64) {
    let s = xi / a;
    let s2 = s * s;
    let d = scaled_denominator(s, b);
    let num_a = (1.0 + b) - (1.0 + 6.0 * b) * s2 + b * s2 * s2;
    let num_b = -(2.0 + 4.0 * b) * s + 4.0 * b * s * s2;
    (num_a / d, num_b / d, d)
}

/// Memory kernels `A(t)`, `B(t)`.
pub fn kernel_ab(t: f64, omega0: f64, delta: f64) -> Result<KernelValues> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("kernel time must be positive, got {t}")));
    }
    let a = omega0 * t;
    let b = (omega0 / delta).powi(2);
    kernel_ab_scaled(t, a, b)
}

fn kernel_ab_scaled(t: f64, a: f64, b: f64) -> Result<KernelValues> {
    let mut d_min = f64::INFINITY;
    let finish = |ka: f64, kb: f64, d_min: f64, method| {
        if !(d_min > 0.0) {
            return Err(Error::DenominatorNotPositive { d_min, a, b });
        }
        Ok(KernelValues {
            a: ka,
            b: kb,
            eval: KernelEvaluation {
                t,
                a_val: a,
                b_val: b,
                d_min,
                method,
            },
        })
    };

    if a >= LAGUERRE_MIN_A {
        let mut previous: Option<(f64, f64)> = None;
        for (rule, &n) in laguerre_ladder().iter().zip(LAGUERRE_LADDER.iter()) {
            let (mut sa, mut sb) = (0.0, 0.0);
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                if w == 0.0 {
                    continue;
                }
                let (ra, rb, d) = kernel_integrands(x, a, b);
                d_min = d_min.min(d);
                sa += w * ra;
                sb += w * rb;
            }
            if let Some((pa, pb)) = previous {
                let change = (sa - pa).abs() + (sb - pb).abs();
                if change <= KERNEL_REL_TOL * (sa.abs() + sb.abs()) {
                    return finish(sa, sb, d_min, KernelMethod::Laguerre(n));
                }
            }
            previous = Some((sa, sb));
        }
    }

    // Fallback: the rational factor has poles at distance ~a from the real axis.
    let mut breaks = vec![0.0];
    let mut x = a.min(1.0) * 0.25;
    while x < FALLBACK_XI_MAX {
        breaks.push(x);
        x *= 2.0;
    }
    breaks.push(FALLBACK_XI_MAX);
    let tol = Tolerance::new(1e-15, 1e-11);
    let mut integrand_d_min = f64::INFINITY;
    let ka = integrate_breaks(
        |xi: f64| {
            let (ra, _, d) = kernel_integrands(xi, a, b);
            integrand_d_min = integrand_d_min.min(d);
            (-xi).exp() * ra
        },
        &breaks,
        tol,
    )?;
    let kb = integrate_breaks(
        |xi: f64| {
            let (_, rb, _) = kernel_integrands(xi, a, b);
            (-xi).exp() * rb
        },
        &breaks,
        Tolerance::new(1e-15 + 1e-11 * ka.value.abs(), 1e-11),
    )?;
    finish(ka.value, kb.value, integrand_d_min.min(d_min), KernelMethod::Adaptive)
}

/// Closed form of `int_0^inf f(omega) exp(-i(omega-omega0)t) / (omega-omega0-i eps)^2 d omega + c.c.`
/// for `t > 0`.
pub fn memory_integral(t: f64, omega0: f64, delta: f64) -> Result<f64> {
    let k = kernel_ab(t, omega0, delta)?;
    let (sin_a, cos_a) = (omega0 * t).sin_cos();
    Ok(2.0 / (delta * PI * omega0 * omega0 * t) * (k.a * sin_a + k.b * cos_a)
        - 2.0 * (-delta * t).exp() / (delta * delta))
}

fn rho_closed_form(t: f64, p: &EvolutionParams) -> Result<f64> {
    let k2 = p.kappa * p.kappa;
    let bracket = 1.0 - 0.5 * k2 * second_order_constant(p.omega0, p.delta);
    Ok(markov_term(t, p.gamma_minus1) * bracket + 0.5 * k2 * memory_integral(t, p.omega0, p.delta)?)
}

/// `<-1|rho(t)|-1>` for `t >= 0`.
pub fn rho_element(t: f64, p: &EvolutionParams) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("time must be finite and non-negative, got {t}")));
    }
    if p.kappa == 0.0 {
        return Ok(markov_term(t, p.gamma_minus1));
    }
    let t_min = p.t_min();
    if t < t_min {
        // Linear bridge between the exact initial value and the closed form at t_min.
        let edge = rho_closed_form(t_min, p)?;
        return Ok(1.0 + (edge - 1.0) * (t / t_min));
    }
    rho_closed_form(t, p)
}

pub fn evolve_series(grid: &[f64], p: &EvolutionParams) -> Result<EvolutionSeries> {
    if grid.is_empty() {
        return Err(Error::domain("time grid is empty"));
    }
    if grid[0] < 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain(
            "time grid must start at t >= 0 and be strictly increasing",
        ));
    }
    let eval = |&t: &f64| rho_element(t, p).map_err(|e| Error::AtTime { t, source: Box::new(e) });
    #[cfg(feature = "parallel")]
    let rho_complete: Vec<f64> = grid.par_iter().map(eval).collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let rho_complete: Vec<f64> = grid.iter().map(eval).collect::<Result<_>>()?;
    let rho_markov = grid.iter().map(|&t| markov_term(t, p.gamma_minus1)).collect();
    Ok(EvolutionSeries {
        times: grid.to_vec(),
        rho_complete,
        rho_markov,
    })
}

/// Uniform grid of `n` points on `[t_start, t_end]`.
pub fn linear_grid(t_start: f64, t_end: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let step = (t_end - t_start) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { t_end } else { t_start + step * i as f64 })
        .collect()
}
