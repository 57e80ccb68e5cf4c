mod commands;
mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use heat_trace::Error;

use config::{ConfigError, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "heat-trace", version, about = "Heat traces, regularity and resonances of compactly supported potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Heat trace per t from the requested methods.
    Trace,
    /// Small-t expansion fit of the heat trace.
    Expand,
    /// Regularity classification.
    Classify,
    /// Resonances in a rectangle of the lower half plane (1D).
    Resonances,
    /// Birman–Krein identity per t (1D).
    BkVerify,
    /// Gagliardo–Nirenberg–Moser ratio table.
    GnmCheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Trace => "trace",
            Command::Expand => "expand",
            Command::Classify => "classify",
            Command::Resonances => "resonances",
            Command::BkVerify => "bk-verify",
            Command::GnmCheck => "gnm-check",
        }
    }

    /// Settings that differ from the global defaults for this command.
    fn defaults(self) -> &'static [(&'static str, &'static str)] {
        match self {
            // The classifier slopes are read where the O(t) drift of smooth fields is negligible.
            Command::Classify => &[("t-min", "1e-4"), ("t-max", "1e-2")],
            Command::Expand => &[("t-points", "40")],
            _ => &[],
        }
    }
}

/// Flags override values read from `--config`. Values are validated together after merging.
#[derive(Args, Debug, Default)]
struct Flags {
    /// `kind:key=value,...` (well, bump, delta_approx), `zero`, or `file:PATH`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    potential: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    dim: Option<String>,
    /// Box half-width L.
    #[arg(long = "box", global = true, allow_hyphen_values = true)]
    box_half_width: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid_n: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    t_min: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    t_max: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    t_points: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    kmax: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    samples: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    seed: Option<String>,
    /// `re0,re1,im0,im1`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    region: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    tol: Option<String>,
    /// Highest Sobolev order tested by `classify`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    m_max: Option<String>,
    /// Highest power fitted by `expand`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    p_max: Option<String>,
    /// `oracle`, `series` or both, comma separated.
    #[arg(long, global = true)]
    methods: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// File of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl Flags {
    fn overrides(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("potential", &self.potential),
            ("dim", &self.dim),
            ("box", &self.box_half_width),
            ("grid-n", &self.grid_n),
            ("t-min", &self.t_min),
            ("t-max", &self.t_max),
            ("t-points", &self.t_points),
            ("kmax", &self.kmax),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("region", &self.region),
            ("tol", &self.tol),
            ("m-max", &self.m_max),
            ("p-max", &self.p_max),
            ("methods", &self.methods),
        ];
        let mut map: BTreeMap<String, String> =
            pairs.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))).collect();
        if let Some(out) = &self.out {
            map.insert("out".into(), out.display().to_string());
        }
        map
    }
}

/// Exit code for a library error: 1 for anything the configuration could fix, 2 for numerical failure.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergence(_) | Error::Eigensolver(_) | Error::IllConditioned(_) | Error::Aliasing { .. } => 2,
        _ => 1,
    }
}

fn run(command: Command, cfg: &RunConfig) -> Result<String, Error> {
    let v = cfg.load_potential().map_err(|e| Error::InvalidParameter(e.0))?;
    let body = match command {
        Command::Trace => commands::trace(cfg, &v)?,
        Command::Expand => commands::expand(cfg, &v)?,
        Command::Classify => commands::classify(cfg, &v)?,
        Command::Resonances => commands::resonances(cfg, &v)?,
        Command::BkVerify => commands::bk_verify(cfg, &v)?,
        Command::GnmCheck => commands::gnm(cfg, &v)?,
    };
    Ok(cfg.header(command.name()) + &body)
}

fn config_failure(e: ConfigError) -> ExitCode {
    eprintln!("heat-trace: configuration error: {e}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                e.exit();
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let cfg = match RunConfig::build_with(cli.command.defaults(), cli.flags.config.as_deref(), cli.flags.overrides()) {
        Ok(c) => c,
        Err(e) => return config_failure(e),
    };
    match run(cli.command, &cfg) {
        Ok(text) => {
            let written = match &cfg.out {
                Some(path) => std::fs::write(path, text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("heat-trace: cannot write output: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("heat-trace {}: {e}", cli.command.name());
            if code == 2 {
                let diag = cfg.out.as_ref().map(|p| p.with_extension("diag")).unwrap_or_else(|| PathBuf::from("heat-trace.diag"));
                let text = format!("{}# error: {e}\n", cfg.header(cli.command.name()));
                if let Err(w) = std::fs::write(&diag, text) {
                    eprintln!("heat-trace: cannot write diagnostics to {}: {w}", diag.display());
                } else {
                    eprintln!("diagnostics written to {}", diag.display());
                }
            }
            ExitCode::from(code)
        }
    }
}
