//! Lorentzian distribution of the driving field and the rates derived from it.
//!
//! The squared coupling profile `g^2(omega)` is identified with the
//! Lorentzian `f(omega)` everywhere.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_breaks, integrate_to_infinity, Tolerance};
use crate::spin_model::SpectrumReport;

/// Effective spin of the triplet manifold taking part in the transition.
pub const TRIPLET_SPIN: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineshapeParams {
    /// Line centre, rad/s.
    pub omega0: f64,
    /// Half-width `delta = Delta / 2`, rad/s.
    pub delta: f64,
}

impl LineshapeParams {
    pub fn new(omega0: f64, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::domain(format!(
                "line half-width delta must be positive, got {delta}"
            )));
        }
        if !omega0.is_finite() {
            return Err(Error::domain(format!("line centre must be finite, got {omega0}")));
        }
        Ok(LineshapeParams { omega0, delta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    /// Decay rate of the `|-1>` state, 1/s.
    pub gamma_minus1: f64,
    /// Transition rate `W(-1 -> 0)` at resonance, 1/s.
    pub w_rate: f64,
    /// Renormalized energy of `|-1>`, rad/s.
    pub e3_renormalized: f64,
}

/// `f(omega) = (delta / pi) / (delta^2 + (omega - omega0)^2)`.
pub fn lorentzian(omega: f64, p: &LineshapeParams) -> f64 {
    let x = omega - p.omega0;
    p.delta / PI / (p.delta * p.delta + x * x)
}

/// Probability mass of the full-line Lorentzian on `(-inf, 0)`.
///
/// This is the amount by which `int_0^inf f` falls short of one.
pub fn negative_frequency_mass(p: &LineshapeParams) -> f64 {
    0.5 - (p.omega0 / p.delta).atan() / PI
}

/// `gamma_-1 = (pi / 2) gamma_N^2 H_1^2 g^2(omega0)` with the line centred on the transition.
pub fn decay_rate(gamma_n: f64, h_1: f64, p: &LineshapeParams) -> f64 {
    let kappa = gamma_n * h_1;
    0.5 * PI * kappa * kappa * lorentzian(p.omega0, p)
}

/// Transition rate `W(m -> m+1) = (pi/2) gamma_N^2 H_1^2 (I+m+1)(I-m) f` for the triplet, `I = 1`.
pub fn rate_w(gamma_n: f64, h_1: f64, f_value: f64, m: i32) -> Result<f64> {
    if !(-1..=0).contains(&m) {
        return Err(Error::domain(format!("spin projection m must be -1 or 0, got {m}")));
    }
    let m = f64::from(m);
    let kappa = gamma_n * h_1;
    Ok(0.5 * PI * kappa * kappa * (TRIPLET_SPIN + m + 1.0) * (TRIPLET_SPIN - m) * f_value)
}

/// Principal value of `int f(omega) / (omega - pole) d omega` over the whole line.
///
/// The integrand is folded about the pole, `[f(pole+u) - f(pole-u)] / u`,
/// which is regular at `u = 0` with limit `2 f'(pole)`.
pub fn principal_value(p: &LineshapeParams, pole: f64) -> Result<f64> {
    let c = pole - p.omega0;
    let fold_limit = -4.0 * p.delta * c / (PI * (p.delta * p.delta + c * c).powi(2));
    let small = 1e-6 * p.delta;
    let folded = |u: f64| {
        if u < small {
            fold_limit
        } else {
            (lorentzian(pole + u, p) - lorentzian(pole - u, p)) / u
        }
    };
    // Absolute scale of the answer is 1/delta.
    let tol = Tolerance::new(1e-15 / p.delta, 1e-13);
    let knee = c.abs() + p.delta;
    let near = integrate_breaks(folded, &[0.0, 0.5 * knee, knee, 2.0 * knee], tol)?;
    let far = integrate_to_infinity(folded, 2.0 * knee, knee, tol)?;
    Ok(near.value + far.value)
}

/// `E3_bar = E3 - (gamma_N^2 H_1^2 / 2) PV int g^2(omega) / (E2 + omega - E3) d omega`.
pub fn renormalized_energy(e2: f64, e3: f64, gamma_n: f64, h_1: f64, p: &LineshapeParams) -> Result<f64> {
    let kappa = gamma_n * h_1;
    if kappa == 0.0 {
        return Ok(e3);
    }
    let pv = principal_value(p, e3 - e2)?;
    Ok(e3 - 0.5 * kappa * kappa * pv)
}

/// Rates for the `E3 -> E2` channel with the line centred on `Delta E_23`.
pub fn rates(s: &SpectrumReport, h_1: f64, delta: f64) -> Result<RateReport> {
    let p = LineshapeParams::new(s.de23, delta)?;
    let gamma_minus1 = decay_rate(s.gamma_n, h_1, &p);
    let w_rate = rate_w(s.gamma_n, h_1, lorentzian(p.omega0, &p), -1)?;
    let e3_renormalized = renormalized_energy(s.e2, s.e3, s.gamma_n, h_1, &p)?;
    Ok(RateReport {
        gamma_minus1,
        w_rate,
        e3_renormalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use approx::assert_relative_eq;

    #[test]
    fn lorentzian_peak_and_half_maximum() {
        let p = LineshapeParams::new(3.0e8, 2.0e6).unwrap();
        assert_relative_eq!(lorentzian(p.omega0, &p), 1.0 / (PI * p.delta), max_relative = 1e-15);
        assert_relative_eq!(
            lorentzian(p.omega0 + p.delta, &p),
            0.5 / (PI * p.delta),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            lorentzian(p.omega0 - p.delta, &p),
            0.5 / (PI * p.delta),
            max_relative = 1e-15
        );
    }

    #[test]
    fn negative_mass_matches_quadrature() {
        let p = LineshapeParams::new(5.0, 1.0).unwrap();
        let tol = Tolerance::new(1e-15, 1e-13);
        let neg = integrate_to_infinity(|u: f64| lorentzian(-u, &p), 0.0, 1.0, tol).unwrap();
        assert_relative_eq!(neg.value, negative_frequency_mass(&p), max_relative = 1e-11);
        // small for the figure regime
        let fig = LineshapeParams::new(1.79e8, 1e6).unwrap();
        assert!(negative_frequency_mass(&fig) < 2e-3);
    }

    #[test]
    fn decay_rate_values() {
        let p = LineshapeParams::new(1.79e8, 1e6).unwrap();
        assert_eq!(decay_rate(2.675e4, 0.0, &p), 0.0);
        // (2.675e4 * 37)^2 / (2e6)
        assert_relative_eq!(decay_rate(2.675e4, 37.0, &p), 4.898e5, max_relative = 1e-3);
    }

    #[test]
    fn transition_rate_coefficients() {
        // (I+m+1)(I-m) = 2 for m = -1 and for m = 0 when I = 1.
        assert_relative_eq!(rate_w(1.0, 1.0, 1.0, -1).unwrap(), PI);
        assert_relative_eq!(rate_w(1.0, 1.0, 1.0, 0).unwrap(), PI);
        assert_eq!(rate_w(3.0, 4.0, 0.0, -1).unwrap(), 0.0);
        assert!(matches!(rate_w(1.0, 1.0, 1.0, 1), Err(Error::Domain(_))));
        assert!(rate_w(1.0, 1.0, 1.0, -2).is_err());
    }

    #[test]
    fn resonance_rate_is_twice_decay_rate() {
        let p = LineshapeParams::new(1.0e8, 1.0e6).unwrap();
        let gamma = decay_rate(2.675e4, 37.0, &p);
        let w = rate_w(2.675e4, 37.0, 1.0 / (PI * p.delta), -1).unwrap();
        assert_relative_eq!(w, 2.0 * gamma, max_relative = 1e-12);
    }

    #[test]
    fn principal_value_of_centred_line_vanishes() {
        let p = LineshapeParams::new(1.79e8, 1e6).unwrap();
        let e2 = -5.0e7;
        let e3 = e2 + p.omega0;
        let kappa: f64 = 2.675e4 * 37.0;
        let e3_bar = renormalized_energy(e2, e3, 2.675e4, 37.0, &p).unwrap();
        assert!((e3_bar - e3).abs() <= e3.abs() * 1e-8 + 1e-3 * kappa * kappa / p.delta);
        assert_eq!(renormalized_energy(e2, e3, 2.675e4, 0.0, &p).unwrap(), e3);
    }

    #[test]
    fn principal_value_of_shifted_line() {
        // Independent oracle: direct two-sided excision with plain quadrature at
        // several radii. The Hilbert transform of a Lorentzian centred at c gives
        // (c - pole) / ((c - pole)^2 + delta^2) = 1 / (2 delta) for c = pole + delta.
        let p = LineshapeParams::new(1.0, 1.0).unwrap();
        let pole = 0.0;
        let tol = Tolerance::new(1e-14, 1e-13);
        let two_sided = |eta: f64| {
            let left = integrate(|w: f64| lorentzian(w, &p) / (w - pole), -200.0, pole - eta, tol)
                .unwrap()
                .value;
            let right = integrate(|w: f64| lorentzian(w, &p) / (w - pole), pole + eta, 200.0, tol)
                .unwrap()
                .value;
            let tails = integrate_to_infinity(
                |u: f64| (lorentzian(200.0 + u, &p) / (200.0 + u)) - lorentzian(-200.0 - u, &p) / (200.0 + u),
                0.0,
                1.0,
                tol,
            )
            .unwrap()
            .value;
            left + right + tails
        };
        // Excision error is first order in the radius.
        let sweep = [1e-4, 1e-5, 1e-6].map(two_sided);
        let d1 = (sweep[0] - sweep[1]).abs();
        let d2 = (sweep[1] - sweep[2]).abs();
        assert!(d2 < 0.2 * d1, "sweep not converging: {sweep:?}");
        assert_relative_eq!(sweep[2], 0.5, max_relative = 1e-5);

        let pv = principal_value(&p, pole).unwrap();
        assert_relative_eq!(pv, sweep[2], max_relative = 1e-5);
        assert_relative_eq!(pv, 0.5, max_relative = 1e-10);

        let e3_bar = renormalized_energy(-1.0, 0.0, 1.0, 1.0, &LineshapeParams::new(1.0 + 1.0, 1.0).unwrap()).unwrap();
        // pole at e3 - e2 = 1, centre at 2: PV = 1/(2 delta), shift = -kappa^2 / (4 delta)
        assert_relative_eq!(e3_bar, -0.25, max_relative = 1e-9);
    }
}
