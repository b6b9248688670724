use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;

use spin_kinetics::figures::{self, FigurePreset, RunConfig};
use spin_kinetics::Error;

/// Survival element <-1|rho(t)|-1> of a driven dipolar spin pair.
///
/// Writes a CSV with the complete and the purely exponential evolution.
#[derive(Debug, Parser)]
#[command(name = "spin-kinetics", version)]
struct Cli {
    /// Figure preset: fig1a, fig1b, fig2, fig3a, fig3b or fig4.
    #[arg(long, value_name = "ID")]
    preset: Option<String>,

    /// Flat key=value configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output CSV path; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Override a configuration key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Omit the timestamp so repeated runs are byte-identical.
    #[arg(long)]
    reproducible: bool,

    /// Print the level scheme and rates instead of running the evolution.
    #[arg(long)]
    spectrum: bool,

    /// Print the resolved configuration as key=value text and exit.
    #[arg(long)]
    print_config: bool,

    /// List the figure presets and exit.
    #[arg(long)]
    list_presets: bool,
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn resolve(cli: &Cli) -> Result<RunConfig, Failure> {
    let preset = cli.preset.as_deref().map(str::parse::<FigurePreset>).transpose()?;
    let file = match &cli.config {
        Some(path) => Some(fs::read_to_string(path).map_err(|e| io_failure(path, e))?),
        None => None,
    };
    if preset.is_none() && file.is_none() && cli.set.is_empty() {
        return Err(Failure::Usage("give --preset, --config or --set (see --help)".into()));
    }
    let overrides = cli
        .set
        .iter()
        .map(|s| figures::parse_override(s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut cfg = figures::parse_config(preset, file.as_deref(), &overrides)?;
    if let Some(out) = &cli.out {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

fn timestamp() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("{secs} (unix seconds)")
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    if cli.list_presets {
        for p in FigurePreset::ALL {
            println!("{:<7}{}", p.id(), p.description());
        }
        return Ok(());
    }
    let cfg = resolve(cli)?;
    if cli.print_config {
        print!("{}", figures::emit_config(&cfg));
        return Ok(());
    }
    if cli.spectrum {
        print!("{}", figures::report_spectrum(&cfg)?);
        return Ok(());
    }
    if cfg.emit_plot && cfg.output.is_none() {
        return Err(Failure::Usage(
            "emit_plot: needs an output path (--out or output=)".into(),
        ));
    }

    let out = figures::run(&cfg).map_err(|e| match Failure::from(e) {
        Failure::Numeric(m) => Failure::Numeric(format!("{m}\nconfiguration:\n{}", figures::emit_config(&cfg))),
        other => other,
    })?;
    let ts = (!cli.reproducible).then(timestamp);
    let csv = figures::render_csv(&cfg, &out, ts.as_deref());

    match &cfg.output {
        Some(path) => {
            fs::write(path, csv).map_err(|e| io_failure(path, e))?;
            if cfg.emit_plot {
                let script_path = path.with_extension("gp");
                let script = figures::plot_script(&cfg, &path.display().to_string());
                fs::write(&script_path, script).map_err(|e| io_failure(&script_path, e))?;
                eprintln!("wrote {} and {}", path.display(), script_path.display());
            }
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(csv.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Usage(format!("stdout: {e}")))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("spin-kinetics: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("spin-kinetics: numeric failure: {m}");
            ExitCode::from(2)
        }
    }
}
