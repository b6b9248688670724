//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three operations are exported: the evolution curves for a parameter set,
//! the level scheme, and a sweep of the two transition energies over the
//! polar angle. Each binding is a thin wrapper over a plain Rust function so
//! the numerics can be tested natively.

use wasm_bindgen::prelude::*;

use spin_kinetics::figures::{derive, FigurePreset, NucleusChoice, RunConfig, TimeEnd};
use spin_kinetics::kernel::{evolve_series, linear_grid};
use spin_kinetics::spin_model::{spectrum, FieldConfig, Nucleus, SpinGeometry};

/// Largest grid the page may request.
pub const MAX_POINTS: usize = 4000;

fn nucleus(name: &str) -> Result<Nucleus, String> {
    Nucleus::preset(name).ok_or_else(|| format!("unknown nucleus {name:?}"))
}

/// Configuration from the page's form. `t_end <= 0` selects the preset-style
/// automatic window: `5/(2 gamma_-1)` when `long_window`, else `10/delta`.
#[allow(clippy::too_many_arguments)]
pub fn config(
    nucleus_name: &str,
    h_z: f64,
    h_1: f64,
    delta: f64,
    theta_deg: f64,
    r: f64,
    t_end: f64,
    long_window: bool,
    n_points: usize,
) -> RunConfig {
    RunConfig {
        preset: None,
        nucleus: NucleusChoice::Preset(nucleus_name.to_string()),
        h_z,
        h_1,
        delta,
        theta: theta_deg,
        phi: 0.0,
        r,
        t_start: 0.0,
        t_end: match (t_end > 0.0, long_window) {
            (true, _) => TimeEnd::Seconds(t_end),
            (false, true) => TimeEnd::Decay,
            (false, false) => TimeEnd::Memory,
        },
        n_points,
        output: None,
        emit_plot: false,
    }
}

/// `[t0, complete0, markov0, t1, complete1, markov1, ...]`.
pub fn curves(cfg: &RunConfig) -> Result<Vec<f64>, String> {
    if !(2..=MAX_POINTS).contains(&cfg.n_points) {
        return Err(format!("n_points must lie in 2..={MAX_POINTS}"));
    }
    let d = derive(cfg).map_err(|e| e.to_string())?;
    let grid = linear_grid(0.0, d.t_end, cfg.n_points);
    let s = evolve_series(&grid, &d.params).map_err(|e| e.to_string())?;
    Ok((0..grid.len())
        .flat_map(|i| [s.times[i], s.rho_complete[i], s.rho_markov[i]])
        .collect())
}

/// `[gamma_N, E1, E2, E3, E4, dE12, dE23, gamma_-1]`.
pub fn levels(cfg: &RunConfig) -> Result<Vec<f64>, String> {
    let d = derive(cfg).map_err(|e| e.to_string())?;
    let s = d.spectrum;
    Ok(vec![
        s.gamma_n,
        s.e1,
        s.e2,
        s.e3,
        s.e4,
        s.de12,
        s.de23,
        d.params.gamma_minus1,
    ])
}

/// `[theta_deg, dE12, dE23]` triples for `n` angles on `[0, 180]`.
pub fn sweep(nucleus_name: &str, h_z: f64, r: f64, n: usize) -> Result<Vec<f64>, String> {
    if !(2..=MAX_POINTS).contains(&n) {
        return Err(format!("sweep size must lie in 2..={MAX_POINTS}"));
    }
    let nuc = nucleus(nucleus_name)?;
    let fields = FieldConfig::new(h_z, 0.0).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * n);
    for i in 0..n {
        let deg = 180.0 * i as f64 / (n - 1) as f64;
        let g = SpinGeometry::new(r, deg.to_radians(), 0.0).map_err(|e| e.to_string())?;
        let s = spectrum(&nuc, &g, &fields).map_err(|e| e.to_string())?;
        out.extend([deg, s.de12, s.de23]);
    }
    Ok(out)
}

/// `[is_carbon, h_z, h_1, delta, theta_deg, r, long_window]` for a figure preset.
pub fn preset(id: &str) -> Result<Vec<f64>, String> {
    let p: FigurePreset = id.parse().map_err(|e: spin_kinetics::Error| e.to_string())?;
    let c = p.config();
    let is_carbon = matches!(&c.nucleus, NucleusChoice::Preset(n) if n == "C13");
    Ok(vec![
        f64::from(u8::from(is_carbon)),
        c.h_z,
        c.h_1,
        c.delta,
        c.theta,
        c.r,
        f64::from(u8::from(c.t_end == TimeEnd::Decay)),
    ])
}

fn js(e: String) -> JsValue {
    JsValue::from_str(&e)
}

#[wasm_bindgen(js_name = evolutionCurves)]
#[allow(clippy::too_many_arguments)]
pub fn evolution_curves(
    nucleus_name: &str,
    h_z: f64,
    h_1: f64,
    delta: f64,
    theta_deg: f64,
    r: f64,
    t_end: f64,
    long_window: bool,
    n_points: usize,
) -> Result<Vec<f64>, JsValue> {
    curves(&config(
        nucleus_name,
        h_z,
        h_1,
        delta,
        theta_deg,
        r,
        t_end,
        long_window,
        n_points,
    ))
    .map_err(js)
}

#[wasm_bindgen(js_name = energyLevels)]
pub fn energy_levels(
    nucleus_name: &str,
    h_z: f64,
    h_1: f64,
    delta: f64,
    theta_deg: f64,
    r: f64,
) -> Result<Vec<f64>, JsValue> {
    levels(&config(nucleus_name, h_z, h_1, delta, theta_deg, r, 1.0, false, 2)).map_err(js)
}

#[wasm_bindgen(js_name = angleSweep)]
pub fn angle_sweep(nucleus_name: &str, h_z: f64, r: f64, n: usize) -> Result<Vec<f64>, JsValue> {
    sweep(nucleus_name, h_z, r, n).map_err(js)
}

#[wasm_bindgen(js_name = presetValues)]
pub fn preset_values(id: &str) -> Result<Vec<f64>, JsValue> {
    preset(id).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig(id: &str) -> RunConfig {
        let v = preset(id).unwrap();
        let name = if v[0] == 1.0 { "C13" } else { "H1" };
        config(name, v[1], v[2], v[3], v[4], v[5], 0.0, v[6] == 1.0, 50)
    }

    #[test]
    fn curves_match_the_library() {
        let cfg = fig("fig2");
        let flat = curves(&cfg).unwrap();
        assert_eq!(flat.len(), 150);
        assert_eq!(&flat[..3], &[0.0, 1.0, 1.0]);
        let lib = spin_kinetics::figures::run(&RunConfig {
            n_points: 50,
            ..FigurePreset::Fig2.config()
        })
        .unwrap();
        assert_eq!(flat[3 * 49 + 1], lib.series.rho_complete[49]);
        assert_eq!(flat[3 * 49 + 2], lib.series.rho_markov[49]);
    }

    #[test]
    fn levels_are_consistent() {
        let v = levels(&fig("fig1a")).unwrap();
        assert_eq!(v[4], 0.0);
        assert!((v[1] + v[2] + v[3]).abs() <= 1e-6 * v[3].abs());
        assert!((v[7] - 2.236e5).abs() < 1e3);
    }

    #[test]
    fn sweep_crosses_at_magic_angle() {
        let s = sweep("H1", 1e4, 2e-9, 181).unwrap();
        let diff = |i: usize| s[3 * i + 1] - s[3 * i + 2];
        assert!(diff(0) > 0.0 && diff(90) < 0.0);
        let crossing = (0..180).find(|&i| diff(i) * diff(i + 1) <= 0.0).unwrap();
        assert_eq!(crossing, 54);
    }

    #[test]
    fn bad_input_is_reported() {
        assert!(preset("fig7").is_err());
        assert!(sweep("Xe", 1e4, 2e-9, 10).is_err());
        assert!(curves(&config("H1", 1e4, 1.0, 1e6, 30.0, 2e-9, 0.0, false, 1)).is_err());
        assert!(curves(&config("H1", -1.0, 1.0, 1e6, 30.0, 2e-9, 0.0, false, 10)).is_err());
    }
}
