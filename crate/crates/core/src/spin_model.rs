//! Two identical spin-1/2 nuclei in a static field `H_z` with dipolar
//! coupling and a rotating transverse field `H_1`.
//!
//! Matrices are written in the basis `(phi_1, phi_2, phi_3, phi_4)`:
//! the triplet `|aa>`, `(|ab> + |ba>)/sqrt 2`, `|bb>` followed by the singlet
//! `(|ab> - |ba>)/sqrt 2`. Units are Gaussian CGS with energies expressed as
//! angular frequencies (rad/s), so every dipolar energy carries a factor
//! `gamma_N^2 hbar / r^3`.

use std::f64::consts::SQRT_2;

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nuclear magneton, erg/G.
pub const NUCLEAR_MAGNETON: f64 = 5.050_783_7e-24;
/// Reduced Planck constant, erg s.
pub const HBAR: f64 = 1.054_571_8e-27;

#[derive(Debug, Clone, PartialEq)]
pub struct Nucleus {
    pub name: String,
    /// Magnetic moment in nuclear magnetons.
    pub mu: f64,
    /// Spin of a single nucleus; always 1/2 here.
    pub spin: f64,
}

impl Nucleus {
    pub fn new(name: impl Into<String>, mu: f64) -> Result<Self> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::domain(format!(
                "magnetic moment must be finite and non-negative, got {mu}"
            )));
        }
        Ok(Nucleus {
            name: name.into(),
            mu,
            spin: 0.5,
        })
    }

    pub fn proton() -> Self {
        Nucleus {
            name: "H1".into(),
            mu: 2.7927,
            spin: 0.5,
        }
    }

    pub fn carbon13() -> Self {
        Nucleus {
            name: "C13".into(),
            mu: 0.702381,
            spin: 0.5,
        }
    }

    /// Looks up `H1` / `C13` (case-insensitive, with or without parentheses).
    pub fn preset(name: &str) -> Option<Self> {
        let key: String = name
            .chars()
            .filter(|c| !matches!(c, '(' | ')' | '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_uppercase();
        match key.as_str() {
            "H1" | "1H" | "PROTON" => Some(Nucleus::proton()),
            "C13" | "13C" => Some(Nucleus::carbon13()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinGeometry {
    /// Internuclear distance, cm.
    pub r: f64,
    /// Polar angle of the internuclear vector, rad.
    pub theta: f64,
    /// Azimuthal angle, rad.
    pub phi: f64,
}

impl SpinGeometry {
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self> {
        let g = SpinGeometry { r, theta, phi };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r.is_finite() && self.r > 0.0) {
            return Err(Error::domain(format!(
                "internuclear distance r must be positive, got {}",
                self.r
            )));
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.theta) {
            return Err(Error::domain(format!("theta must lie in [0, pi], got {}", self.theta)));
        }
        if !(0.0..std::f64::consts::TAU).contains(&self.phi) {
            return Err(Error::domain(format!("phi must lie in [0, 2 pi), got {}", self.phi)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConfig {
    /// Static field along z, G (numerically equal to Oe in vacuum).
    pub h_z: f64,
    /// Amplitude of the rotating field, G.
    pub h_1: f64,
}

impl FieldConfig {
    pub fn new(h_z: f64, h_1: f64) -> Result<Self> {
        if !(h_z.is_finite() && h_z > 0.0) {
            return Err(Error::domain(format!("h_z must be positive, got {h_z}")));
        }
        if !(h_1.is_finite() && h_1 >= 0.0) {
            return Err(Error::domain(format!("h_1 must be non-negative, got {h_1}")));
        }
        Ok(FieldConfig { h_z, h_1 })
    }
}

/// Angular factors of the dipolar interaction, cm^-3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricFactors {
    pub y0: f64,
    pub y1: Complex64,
    pub y2: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumReport {
    /// Gyromagnetic ratio, rad s^-1 G^-1.
    pub gamma_n: f64,
    /// `gamma_N^2 hbar / r^3`, rad/s.
    pub dip: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
    pub de12: f64,
    pub de23: f64,
}

/// `gamma_N = mu mu_N / (I hbar)`.
pub fn gyromagnetic_ratio(nucleus: &Nucleus) -> f64 {
    nucleus.mu * NUCLEAR_MAGNETON / (nucleus.spin * HBAR)
}

pub fn geometric_factors(g: &SpinGeometry) -> Result<GeometricFactors> {
    if !(g.r.is_finite() && g.r > 0.0) {
        return Err(Error::domain(format!(
            "internuclear distance r must be positive, got {}",
            g.r
        )));
    }
    let inv_r3 = g.r.powi(-3);
    let (sin_t, cos_t) = g.theta.sin_cos();
    Ok(GeometricFactors {
        y0: inv_r3 * (1.0 - 3.0 * cos_t * cos_t),
        y1: Complex64::from_polar(inv_r3 * sin_t * cos_t, -g.phi),
        y2: Complex64::from_polar(inv_r3 * sin_t * sin_t, -2.0 * g.phi),
    })
}

pub fn zeeman_matrix(gamma_n: f64, h_z: f64) -> Matrix4<f64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 0.0, -1.0, 0.0)) * (-gamma_n * h_z)
}

/// Full dipolar matrix including the off-diagonal `Y_1`, `Y_2` couplings.
pub fn dipolar_matrix(gamma_n: f64, g: &SpinGeometry) -> Result<Matrix4<Complex64>> {
    let y = geometric_factors(g)?;
    let scale = 0.25 * gamma_n * gamma_n * HBAR;
    let y0 = Complex64::from(y.y0);
    let s1 = 3.0 * SQRT_2;
    let zero = Complex64::from(0.0);
    #[rustfmt::skip]
    let m = Matrix4::new(
        y0,                   -y.y1 * s1,          -y.y2 * 3.0,  zero,
        -y.y1.conj() * s1,    y0 * -2.0,           y.y1 * s1,    zero,
        -y.y2.conj() * 3.0,   y.y1.conj() * s1,    y0,           zero,
        zero,                 zero,                zero,         zero,
    );
    Ok(m * Complex64::from(scale))
}

/// Interaction with the field rotating at `omega` in the xy plane, at time `t`.
pub fn rf_matrix(gamma_n: f64, h_1: f64, omega: f64, t: f64) -> Matrix4<Complex64> {
    let up = Complex64::from_polar(1.0, omega * t);
    let down = up.conj();
    let zero = Complex64::from(0.0);
    #[rustfmt::skip]
    let m = Matrix4::new(
        zero, up,   zero, zero,
        down, zero, up,   zero,
        zero, down, zero, zero,
        zero, zero, zero, zero,
    );
    m * Complex64::from(-gamma_n * h_1 / SQRT_2)
}

/// Level scheme in the diagonal (secular) approximation of the dipolar term.
pub fn spectrum(nucleus: &Nucleus, g: &SpinGeometry, f: &FieldConfig) -> Result<SpectrumReport> {
    g.validate()?;
    let gamma = gyromagnetic_ratio(nucleus);
    let y = geometric_factors(g)?;
    let dip = gamma * gamma * HBAR * g.r.powi(-3);
    let shift = gamma * gamma * HBAR * y.y0;
    let zeeman = gamma * f.h_z;
    let cos_t = g.theta.cos();
    let angular = 3.0 * cos_t * cos_t - 1.0;
    let dipolar_field = 0.75 * gamma * HBAR * g.r.powi(-3) * angular;
    Ok(SpectrumReport {
        gamma_n: gamma,
        dip,
        e1: -zeeman + 0.25 * shift,
        e2: -0.5 * shift,
        e3: zeeman + 0.25 * shift,
        e4: 0.0,
        de12: gamma * (f.h_z + dipolar_field),
        de23: gamma * (f.h_z - dipolar_field),
    })
}

/// `arccos(1/sqrt 3)`: the dipolar shift of both transitions vanishes.
pub fn magic_angle() -> f64 {
    (1.0 / 3f64.sqrt()).acos()
}
