//! Run configuration, figure presets and the CSV / report / plot-script writers
//! behind the command line tool.
//!
//! A configuration is a flat set of `key=value` pairs. Layers are applied in
//! order: preset, config file, command line overrides. The same text format
//! is produced by [`emit_config`], so a resolved configuration round-trips.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernel::{evolve_series, linear_grid, EvolutionParams, EvolutionSeries};
use crate::lineshape::{rates, RateReport};
use crate::spin_model::{spectrum, FieldConfig, Nucleus, SpectrumReport, SpinGeometry};

pub const CSV_HEADER: &str = "t_seconds,rho_complete,rho_markov";
pub const DEFAULT_POINTS: usize = 500;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Every key a configuration may contain.
pub const KEYS: [&str; 13] = [
    "preset",
    "nucleus",
    "h_z",
    "h_1",
    "delta",
    "theta",
    "phi",
    "r",
    "t_start",
    "t_end",
    "n_points",
    "output",
    "emit_plot",
];

#[derive(Debug, Clone, PartialEq)]
pub enum NucleusChoice {
    /// `H1` or `C13`.
    Preset(String),
    /// Explicit magnetic moment in nuclear magnetons.
    Moment(f64),
}

impl NucleusChoice {
    pub fn resolve(&self) -> Result<Nucleus> {
        match self {
            NucleusChoice::Preset(name) => {
                Nucleus::preset(name).ok_or_else(|| Error::usage(format!("nucleus: unknown preset {name:?}")))
            }
            NucleusChoice::Moment(mu) => Nucleus::new(format!("mu={mu}"), *mu),
        }
    }
}

impl fmt::Display for NucleusChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NucleusChoice::Preset(name) => f.write_str(name),
            NucleusChoice::Moment(mu) => write!(f, "{mu}"),
        }
    }
}

/// End of the time window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeEnd {
    Seconds(f64),
    /// `5 / (2 gamma_-1)`: five Markovian lifetimes of the survival element.
    Decay,
    /// `10 / delta`: the short-time window where memory effects live.
    Memory,
}

impl fmt::Display for TimeEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeEnd::Seconds(t) => write!(f, "{t}"),
            TimeEnd::Decay => f.write_str("auto_decay"),
            TimeEnd::Memory => f.write_str("auto_memory"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<FigurePreset>,
    pub nucleus: NucleusChoice,
    /// Static field, Oe.
    pub h_z: f64,
    /// Rotating field amplitude, Oe.
    pub h_1: f64,
    /// Line half-width, 1/s.
    pub delta: f64,
    /// Polar angle, degrees.
    pub theta: f64,
    /// Azimuthal angle, degrees.
    pub phi: f64,
    /// Internuclear distance, cm.
    pub r: f64,
    pub t_start: f64,
    pub t_end: TimeEnd,
    pub n_points: usize,
    pub output: Option<PathBuf>,
    pub emit_plot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FigurePreset {
    Fig1a,
    Fig1b,
    Fig2,
    Fig3a,
    Fig3b,
    Fig4,
}

impl FigurePreset {
    pub const ALL: [FigurePreset; 6] = [
        FigurePreset::Fig1a,
        FigurePreset::Fig1b,
        FigurePreset::Fig2,
        FigurePreset::Fig3a,
        FigurePreset::Fig3b,
        FigurePreset::Fig4,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FigurePreset::Fig1a => "fig1a",
            FigurePreset::Fig1b => "fig1b",
            FigurePreset::Fig2 => "fig2",
            FigurePreset::Fig3a => "fig3a",
            FigurePreset::Fig3b => "fig3b",
            FigurePreset::Fig4 => "fig4",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            FigurePreset::Fig1a => "H1, H_1 = 25 Oe, decay window",
            FigurePreset::Fig1b => "H1, H_1 = 37 Oe, decay window",
            FigurePreset::Fig2 => "H1, H_1 = 1 Oe, short-time window",
            FigurePreset::Fig3a => "C13, H_1 = 100 Oe, decay window",
            FigurePreset::Fig3b => "C13, H_1 = 150 Oe, decay window",
            FigurePreset::Fig4 => "C13, H_1 = 1 Oe, short-time window",
        }
    }

    pub fn config(self) -> RunConfig {
        let (nucleus, h_1, t_end) = match self {
            FigurePreset::Fig1a => ("H1", 25.0, TimeEnd::Decay),
            FigurePreset::Fig1b => ("H1", 37.0, TimeEnd::Decay),
            FigurePreset::Fig2 => ("H1", 1.0, TimeEnd::Memory),
            FigurePreset::Fig3a => ("C13", 100.0, TimeEnd::Decay),
            FigurePreset::Fig3b => ("C13", 150.0, TimeEnd::Decay),
            FigurePreset::Fig4 => ("C13", 1.0, TimeEnd::Memory),
        };
        RunConfig {
            preset: Some(self),
            nucleus: NucleusChoice::Preset(nucleus.into()),
            h_z: 1e4,
            h_1,
            delta: 1e6,
            theta: 30.0,
            phi: 0.0,
            r: 2e-9,
            t_start: 0.0,
            t_end,
            n_points: DEFAULT_POINTS,
            output: None,
            emit_plot: false,
        }
    }
}

impl FromStr for FigurePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigurePreset::ALL
            .into_iter()
            .find(|p| p.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let ids: Vec<_> = FigurePreset::ALL.iter().map(|p| p.id()).collect();
                Error::usage(format!("preset: unknown id {s:?} (expected one of {})", ids.join(", ")))
            })
    }
}

impl fmt::Display for FigurePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Parses `key=value` lines. Blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::usage(format!("line {}: expected key=value, got {raw:?}", lineno + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Splits a command line override of the form `key=value`.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::usage(format!("--set expects key=value, got {s:?}")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn check_key(key: &str) -> Result<()> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(Error::usage(format!(
            "unknown key {key:?} (known keys: {})",
            KEYS.join(", ")
        )))
    }
}

fn number(map: &BTreeMap<String, String>, key: &str) -> Result<f64> {
    let raw = map
        .get(key)
        .ok_or_else(|| Error::usage(format!("{key}: missing required key")))?;
    let v: f64 = raw
        .parse()
        .map_err(|_| Error::usage(format!("{key}: not a number: {raw:?}")))?;
    if !v.is_finite() {
        return Err(Error::usage(format!("{key}: must be finite, got {raw:?}")));
    }
    Ok(v)
}

fn number_or(map: &BTreeMap<String, String>, key: &str, default: f64) -> Result<f64> {
    if map.contains_key(key) {
        number(map, key)
    } else {
        Ok(default)
    }
}

fn flag(map: &BTreeMap<String, String>, key: &str) -> Result<bool> {
    match map.get(key).map(|s| s.to_ascii_lowercase()) {
        None => Ok(false),
        Some(v) => match v.as_str() {
            "true" | "yes" | "1" | "on" => Ok(true),
            "false" | "no" | "0" | "off" => Ok(false),
            _ => Err(Error::usage(format!("{key}: expected true or false, got {v:?}"))),
        },
    }
}

/// Builds a validated configuration from layered key/value sources.
///
/// `preset` is the explicit `--preset`; otherwise a `preset` key in the file
/// or overrides selects the base layer.
pub fn parse_config(
    preset: Option<FigurePreset>,
    file: Option<&str>,
    overrides: &[(String, String)],
) -> Result<RunConfig> {
    let file_pairs = match file {
        Some(text) => parse_key_values(text)?,
        None => Vec::new(),
    };
    let mut seen = BTreeMap::new();
    for (k, v) in &file_pairs {
        check_key(k)?;
        if seen.insert(k.clone(), v.clone()).is_some() {
            return Err(Error::usage(format!("{k}: given more than once in the config file")));
        }
    }
    for (k, _) in overrides {
        check_key(k)?;
    }

    let named = overrides
        .iter()
        .rev()
        .find(|(k, _)| k == "preset")
        .or_else(|| file_pairs.iter().find(|(k, _)| k == "preset"))
        .map(|(_, v)| v.parse::<FigurePreset>())
        .transpose()?;
    let base = preset.or(named);

    let mut map: BTreeMap<String, String> = match base {
        Some(p) => config_pairs(&p.config()).into_iter().collect(),
        None => BTreeMap::new(),
    };
    for (k, v) in file_pairs.into_iter().chain(overrides.iter().cloned()) {
        map.insert(k, v);
    }
    if let Some(p) = base {
        map.insert("preset".into(), p.id().into());
    }
    from_map(&map)
}

fn from_map(map: &BTreeMap<String, String>) -> Result<RunConfig> {
    let preset = map.get("preset").map(|s| s.parse()).transpose()?;
    let nucleus_raw = map
        .get("nucleus")
        .ok_or_else(|| Error::usage("nucleus: missing required key"))?;
    let nucleus = match nucleus_raw.parse::<f64>() {
        Ok(mu) if mu.is_finite() && mu > 0.0 => NucleusChoice::Moment(mu),
        Ok(_) => {
            return Err(Error::usage(format!(
                "nucleus: magnetic moment must be positive, got {nucleus_raw}"
            )))
        }
        Err(_) => {
            if Nucleus::preset(nucleus_raw).is_none() {
                return Err(Error::usage(format!(
                    "nucleus: expected H1, C13 or a magnetic moment, got {nucleus_raw:?}"
                )));
            }
            NucleusChoice::Preset(nucleus_raw.clone())
        }
    };

    let positive = |key: &str| -> Result<f64> {
        let v = number(map, key)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::usage(format!("{key}: must be positive, got {v}")))
        }
    };
    let h_z = positive("h_z")?;
    let delta = positive("delta")?;
    let r = positive("r")?;
    let h_1 = number(map, "h_1")?;
    if h_1 < 0.0 {
        return Err(Error::usage(format!("h_1: must be non-negative, got {h_1}")));
    }
    let theta = number(map, "theta")?;
    if !(0.0..=180.0).contains(&theta) {
        return Err(Error::usage(format!(
            "theta: must lie in [0, 180] degrees, got {theta}"
        )));
    }
    let phi = number_or(map, "phi", 0.0)?;
    if !(0.0..360.0).contains(&phi) {
        return Err(Error::usage(format!("phi: must lie in [0, 360) degrees, got {phi}")));
    }
    let t_start = number_or(map, "t_start", 0.0)?;
    if t_start < 0.0 {
        return Err(Error::usage(format!("t_start: must be non-negative, got {t_start}")));
    }
    let t_end = match map.get("t_end").map(String::as_str) {
        None => return Err(Error::usage("t_end: missing required key")),
        Some("auto_decay") => TimeEnd::Decay,
        Some("auto_memory") => TimeEnd::Memory,
        Some(_) => {
            let t = number(map, "t_end")?;
            if !(t > t_start) {
                return Err(Error::usage(format!("t_end: must exceed t_start = {t_start}, got {t}")));
            }
            TimeEnd::Seconds(t)
        }
    };
    let n_points = match map.get("n_points") {
        None => DEFAULT_POINTS,
        Some(raw) => raw
            .parse::<usize>()
            .map_err(|_| Error::usage(format!("n_points: expected an integer, got {raw:?}")))?,
    };
    if n_points < 2 {
        return Err(Error::usage(format!("n_points: must be at least 2, got {n_points}")));
    }
    let output = map.get("output").filter(|s| !s.is_empty()).map(PathBuf::from);
    let emit_plot = flag(map, "emit_plot")?;

    Ok(RunConfig {
        preset,
        nucleus,
        h_z,
        h_1,
        delta,
        theta,
        phi,
        r,
        t_start,
        t_end,
        n_points,
        output,
        emit_plot,
    })
}

/// Physical keys, in a fixed order, formatted for exact round-tripping.
fn physical_pairs(cfg: &RunConfig) -> Vec<(String, String)> {
    vec![
        ("nucleus".into(), cfg.nucleus.to_string()),
        ("h_z".into(), cfg.h_z.to_string()),
        ("h_1".into(), cfg.h_1.to_string()),
        ("delta".into(), cfg.delta.to_string()),
        ("theta".into(), cfg.theta.to_string()),
        ("phi".into(), cfg.phi.to_string()),
        ("r".into(), format!("{:e}", cfg.r)),
        ("t_start".into(), cfg.t_start.to_string()),
        ("t_end".into(), cfg.t_end.to_string()),
        ("n_points".into(), cfg.n_points.to_string()),
    ]
}

fn config_pairs(cfg: &RunConfig) -> Vec<(String, String)> {
    let mut pairs = Vec::new();
    if let Some(p) = cfg.preset {
        pairs.push(("preset".into(), p.id().into()));
    }
    pairs.extend(physical_pairs(cfg));
    if let Some(out) = &cfg.output {
        pairs.push(("output".into(), out.display().to_string()));
    }
    pairs.push(("emit_plot".into(), cfg.emit_plot.to_string()));
    pairs
}

/// Config file text that [`parse_config`] maps back to `cfg`.
pub fn emit_config(cfg: &RunConfig) -> String {
    config_pairs(cfg)
        .into_iter()
        .map(|(k, v)| format!("{k}={v}\n"))
        .collect()
}

/// Quantities derived from a configuration before any time stepping.
#[derive(Debug, Clone, PartialEq)]
pub struct Derived {
    pub nucleus: Nucleus,
    pub spectrum: SpectrumReport,
    pub rates: RateReport,
    pub params: EvolutionParams,
    /// Resolved end of the window, s.
    pub t_end: f64,
}

pub fn derive(cfg: &RunConfig) -> Result<Derived> {
    let nucleus = cfg.nucleus.resolve()?;
    let geometry = SpinGeometry::new(cfg.r, cfg.theta.to_radians(), cfg.phi.to_radians())?;
    let fields = FieldConfig::new(cfg.h_z, cfg.h_1)?;
    // Inputs are valid from here on; anything that fails is numerical.
    let numeric = |e: Error| match e {
        Error::Domain(m) => Error::Numeric(m),
        other => other,
    };
    let spectrum = spectrum(&nucleus, &geometry, &fields).map_err(numeric)?;
    if !(spectrum.de23 > 0.0) {
        return Err(Error::Numeric(format!(
            "transition energy Delta E_23 = {:e} must be positive; raise h_z or r",
            spectrum.de23
        )));
    }
    let rates = rates(&spectrum, cfg.h_1, cfg.delta).map_err(numeric)?;
    let params = EvolutionParams::from_spectrum(&spectrum, cfg.h_1, cfg.delta).map_err(numeric)?;
    let t_end = match cfg.t_end {
        TimeEnd::Seconds(t) => t,
        TimeEnd::Memory => 10.0 / cfg.delta,
        TimeEnd::Decay => {
            if params.gamma_minus1 == 0.0 {
                return Err(Error::usage("t_end: auto_decay needs h_1 > 0; give t_end in seconds"));
            }
            5.0 / (2.0 * params.gamma_minus1)
        }
    };
    if !(t_end > cfg.t_start) {
        return Err(Error::usage(format!(
            "t_end: resolved to {t_end:e} s, not after t_start = {:e}",
            cfg.t_start
        )));
    }
    Ok(Derived {
        nucleus,
        spectrum,
        rates,
        params,
        t_end,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub derived: Derived,
    pub series: EvolutionSeries,
}

pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let derived = derive(cfg)?;
    let grid = linear_grid(cfg.t_start, derived.t_end, cfg.n_points);
    let series = evolve_series(&grid, &derived.params)?;
    Ok(RunOutput { derived, series })
}

/// Seventeen significant digits.
fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV document: `#` metadata, header, one row per grid point.
///
/// `timestamp` is written as a comment line when present; leave it out for
/// byte-reproducible output.
pub fn render_csv(cfg: &RunConfig, out: &RunOutput, timestamp: Option<&str>) -> String {
    let d = &out.derived;
    let mut s = String::new();
    let _ = writeln!(s, "# spin-kinetics {VERSION}");
    if let Some(ts) = timestamp {
        let _ = writeln!(s, "# generated={ts}");
    }
    if let Some(p) = cfg.preset {
        let _ = writeln!(s, "# preset={}", p.id());
    }
    for (k, v) in physical_pairs(cfg) {
        let _ = writeln!(s, "# {k}={v}");
    }
    let _ = writeln!(s, "# mu={}", d.nucleus.mu);
    let _ = writeln!(s, "# gamma_n={}", sci(d.spectrum.gamma_n));
    let _ = writeln!(s, "# delta_e23={}", sci(d.spectrum.de23));
    let _ = writeln!(s, "# gamma_minus1={}", sci(d.params.gamma_minus1));
    let _ = writeln!(s, "# t_end_resolved={}", sci(d.t_end));
    s.push_str(CSV_HEADER);
    s.push('\n');
    let ser = &out.series;
    for i in 0..ser.times.len() {
        let _ = writeln!(
            s,
            "{},{},{}",
            sci(ser.times[i]),
            sci(ser.rho_complete[i]),
            sci(ser.rho_markov[i])
        );
    }
    s
}

/// Level scheme and rates in fixed columns.
pub fn report_spectrum(cfg: &RunConfig) -> Result<String> {
    let d = derive(cfg)?;
    let sp = &d.spectrum;
    let rows: [(&str, f64, &str); 11] = [
        ("gamma_N", sp.gamma_n, "rad/(s G)"),
        ("E1", sp.e1, "rad/s"),
        ("E2", sp.e2, "rad/s"),
        ("E3", sp.e3, "rad/s"),
        ("E4", sp.e4, "rad/s"),
        ("dE12", sp.de12, "rad/s"),
        ("dE23", sp.de23, "rad/s"),
        ("gamma_-1", d.rates.gamma_minus1, "1/s"),
        ("E3_renorm", d.rates.e3_renormalized, "rad/s"),
        ("omega0/delta", sp.de23 / cfg.delta, ""),
        ("1/delta", 1.0 / cfg.delta, "s"),
    ];
    let mut s = String::new();
    let _ = writeln!(s, "{:<14}{:>26}  unit", "quantity", "value");
    for (name, v, unit) in rows {
        let _ = writeln!(s, "{name:<14}{:>26}  {unit}", sci(v));
    }
    Ok(s)
}

/// Gnuplot script drawing both columns of `csv_path`.
pub fn plot_script(cfg: &RunConfig, csv_path: &str) -> String {
    let title = match cfg.preset {
        Some(p) => format!("{} ({})", p.id(), p.description()),
        None => format!("{}, H_1 = {} Oe", cfg.nucleus, cfg.h_1),
    };
    let image = match csv_path.strip_suffix(".csv") {
        Some(stem) => format!("{stem}.png"),
        None => format!("{csv_path}.png"),
    };
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script generated by spin-kinetics {VERSION}");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set datafile commentschars '#'");
    let _ = writeln!(s, "set terminal pngcairo size 900,600");
    let _ = writeln!(s, "set output '{image}'");
    let _ = writeln!(s, "set title '{title}'");
    let _ = writeln!(s, "set xlabel 't (s)'");
    let _ = writeln!(s, "set ylabel '<-1|rho(t)|-1>'");
    let _ = writeln!(s, "set key top right");
    let _ = writeln!(
        s,
        "plot '{csv_path}' every ::1 using 1:2 with lines lw 2 dt 1 title 'complete', \\"
    );
    let _ = writeln!(
        s,
        "     '{csv_path}' every ::1 using 1:3 with lines lw 2 dt 2 title 'exponential'"
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pairs(items: &[(&str, &str)]) -> Vec<(String, String)> {
        items.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn presets_hold_legend_values() {
        let expect = [
            ("fig1a", "H1", 25.0),
            ("fig1b", "H1", 37.0),
            ("fig2", "H1", 1.0),
            ("fig3a", "C13", 100.0),
            ("fig3b", "C13", 150.0),
            ("fig4", "C13", 1.0),
        ];
        for (id, nucleus, h_1) in expect {
            let cfg = id.parse::<FigurePreset>().unwrap().config();
            assert_eq!(cfg.nucleus, NucleusChoice::Preset(nucleus.into()));
            assert_eq!(cfg.h_1, h_1);
            assert_eq!(cfg.h_z, 1e4);
            assert_eq!(cfg.delta, 1e6);
            assert_eq!(cfg.theta, 30.0);
            assert_eq!(cfg.r, 2e-9);
            assert_eq!(cfg.n_points, 500);
        }
    }

    #[test]
    fn preset_windows() {
        assert_eq!(FigurePreset::Fig2.config().t_end, TimeEnd::Memory);
        assert_eq!(FigurePreset::Fig3b.config().t_end, TimeEnd::Decay);
        let d = derive(&FigurePreset::Fig4.config()).unwrap();
        assert_relative_eq!(d.t_end, 1e-5, max_relative = 1e-15);
        let d = derive(&FigurePreset::Fig1a.config()).unwrap();
        assert_relative_eq!(d.t_end, 5.0 / (2.0 * d.params.gamma_minus1), max_relative = 1e-15);
    }

    #[test]
    fn fig1a_decay_rate() {
        let d = derive(&FigurePreset::Fig1a.config()).unwrap();
        // (2.675e4 * 25)^2 / (2e6)
        assert_relative_eq!(d.rates.gamma_minus1, 2.2e5, max_relative = 0.02);
    }

    #[test]
    fn overrides_and_files_layer() {
        let cfg = parse_config(Some(FigurePreset::Fig1a), None, &pairs(&[("h_1", "37")])).unwrap();
        assert_eq!(cfg.h_1, 37.0);
        let file = "# comment\npreset = fig2\n\nn_points = 11  # trailing\n";
        let cfg = parse_config(None, Some(file), &[]).unwrap();
        assert_eq!(cfg.preset, Some(FigurePreset::Fig2));
        assert_eq!(cfg.h_1, 1.0);
        assert_eq!(cfg.n_points, 11);
        let cfg = parse_config(None, Some(file), &pairs(&[("n_points", "7")])).unwrap();
        assert_eq!(cfg.n_points, 7);
        let cfg = parse_config(Some(FigurePreset::Fig4), Some(file), &[]).unwrap();
        assert_eq!(cfg.preset, Some(FigurePreset::Fig4));
        assert_eq!(cfg.nucleus, NucleusChoice::Preset("C13".into()));
    }

    #[test]
    fn usage_errors_name_the_key() {
        let err = |r: Result<RunConfig>| match r {
            Err(Error::Usage(m)) => m,
            other => panic!("expected usage error, got {other:?}"),
        };
        let fig = Some(FigurePreset::Fig1a);
        assert!(err(parse_config(fig, None, &pairs(&[("n_points", "1")]))).starts_with("n_points"));
        assert!(err(parse_config(fig, None, &pairs(&[("h_z", "abc")]))).starts_with("h_z"));
        assert!(err(parse_config(fig, None, &pairs(&[("h_z", "-1")]))).starts_with("h_z"));
        assert!(err(parse_config(fig, None, &pairs(&[("colour", "red")]))).contains("colour"));
        assert!(err(parse_config(fig, None, &pairs(&[("theta", "200")]))).starts_with("theta"));
        assert!(err(parse_config(fig, None, &pairs(&[("nucleus", "Xe")]))).starts_with("nucleus"));
        assert!(err(parse_config(fig, None, &pairs(&[("t_end", "0")]))).starts_with("t_end"));
        assert!(err(parse_config(None, Some("nucleus=H1\n"), &[])).starts_with("h_z"));
        assert!(err(parse_config(None, Some("h_z=1\nh_z=2\n"), &[])).starts_with("h_z"));
        assert!(err(parse_config(None, Some("just text\n"), &[])).contains("line 1"));
        assert!(err(parse_config(None, None, &pairs(&[("preset", "fig9")]))).starts_with("preset"));
    }

    #[test]
    fn emitted_config_round_trips() {
        for p in FigurePreset::ALL {
            let cfg = p.config();
            assert_eq!(parse_config(None, Some(&emit_config(&cfg)), &[]).unwrap(), cfg);
        }
        let odd = parse_config(
            None,
            Some("nucleus=1.2345678901234567\nh_z=12345.678\nh_1=0.1\ndelta=3e5\ntheta=54.7356\nphi=12.5\nr=1.7e-8\nt_start=1e-9\nt_end=3.3e-6\nn_points=3\noutput=out dir/a.csv\nemit_plot=yes\n"),
            &[],
        )
        .unwrap();
        assert_eq!(parse_config(None, Some(&emit_config(&odd)), &[]).unwrap(), odd);
    }

    #[test]
    fn degenerate_coupling_gives_flat_columns() {
        let cfg = parse_config(
            Some(FigurePreset::Fig2),
            None,
            &pairs(&[("h_1", "0"), ("n_points", "5")]),
        )
        .unwrap();
        let out = run(&cfg).unwrap();
        assert!(out.series.rho_complete.iter().all(|&v| v == 1.0));
        assert!(out.series.rho_markov.iter().all(|&v| v == 1.0));
        let decay = parse_config(Some(FigurePreset::Fig1a), None, &pairs(&[("h_1", "0")])).unwrap();
        assert!(matches!(run(&decay), Err(Error::Usage(_))));
    }

    #[test]
    fn csv_layout() {
        let cfg = parse_config(Some(FigurePreset::Fig2), None, &pairs(&[("n_points", "4")])).unwrap();
        let out = run(&cfg).unwrap();
        let text = render_csv(&cfg, &out, None);
        assert!(!text.contains('\r'));
        assert!(!text.contains("generated="));
        let lines: Vec<&str> = text.lines().collect();
        let h = lines.iter().position(|l| *l == CSV_HEADER).unwrap();
        assert!(lines[..h].iter().all(|l| l.starts_with('#')));
        assert_eq!(lines.len() - h - 1, 4);
        let first: Vec<f64> = lines[h + 1].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first, vec![0.0, 1.0, 1.0]);
        let digits = lines[h + 2]
            .split(',')
            .next()
            .unwrap()
            .split('e')
            .next()
            .unwrap()
            .replace(['.', '-'], "");
        assert_eq!(digits.len(), 17);
        assert!(render_csv(&cfg, &out, Some("1700000000")).contains("# generated=1700000000\n"));
    }

    #[test]
    fn spectrum_report_columns() {
        let text = report_spectrum(&FigurePreset::Fig1a.config()).unwrap();
        let e4 = text.lines().find(|l| l.starts_with("E4 ")).unwrap();
        assert!(e4.contains("0.0000000000000000e0"));
        for line in text.lines().skip(1) {
            assert!(line[14..40].trim().parse::<f64>().is_ok(), "{line}");
        }

        let magic = parse_config(
            Some(FigurePreset::Fig1a),
            None,
            &pairs(&[("theta", &crate::spin_model::magic_angle().to_degrees().to_string())]),
        )
        .unwrap();
        let text = report_spectrum(&magic).unwrap();
        let value = |name: &str| -> f64 {
            let line = text.lines().find(|l| l.starts_with(name)).unwrap();
            line[14..40].trim().parse().unwrap()
        };
        assert_relative_eq!(value("dE12 "), value("dE23 "), max_relative = 1e-12);
    }

    #[test]
    fn plot_script_reads_csv() {
        let s = plot_script(&FigurePreset::Fig3a.config(), "run/fig3a.csv");
        assert!(s.contains("set output 'run/fig3a.png'"));
        assert!(s.contains("'run/fig3a.csv' every ::1 using 1:2"));
        assert!(s.contains("using 1:3"));
    }
}
