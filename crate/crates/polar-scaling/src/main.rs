//! Thin command-line front end over the `polar_scaling` library.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use polar_scaling::pipeline::{
    cmd_classic, cmd_envelope, cmd_mono_only, cmd_mu, cmd_verify, DiagMode, PipelineConfig,
    RunOutcome,
};
use polar_scaling::power::Scheme;

#[derive(Parser)]
#[command(
    name = "polar-scaling",
    about = "Upper bounds on the scaling exponent of polar codes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Mesh resolution (the cube has (n+1)^3 nodes).
    #[arg(long)]
    n: Option<usize>,
    /// 1-D grid size (the grid has ell+1 nodes).
    #[arg(long)]
    ell: Option<usize>,
    /// Node placement: uniform or chebyshev.
    #[arg(long)]
    nodes: Option<Scheme>,
    /// Diagonal bound: classic, closed-form, envelope, rigorous-envelope.
    #[arg(long, value_parser = parse_diag)]
    diag: Option<DiagMode>,
    /// Convexifier per-pass tolerance.
    #[arg(long)]
    tol_env: Option<f64>,
    /// Power-iteration sup-norm tolerance.
    #[arg(long)]
    tol_iter: Option<f64>,
    /// Power-iteration cap.
    #[arg(long)]
    max_iter: Option<usize>,
    /// RNG seed for the verification suites.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Mesh cache directory (the POLAR_SCALING_CACHE environment variable
    /// takes precedence when set).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Write the report here instead of stdout; the eigenfunction values go
    /// to the same path with an extra .phi.csv suffix.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: json or csv.
    #[arg(long, default_value = "json")]
    format: Format,
    /// Size preset: desk (n=100, ell=10^4) or paper (n=200, ell=10^6).
    /// Explicit flags override the preset.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_diag(s: &str) -> Result<DiagMode, String> {
    match s {
        "classic" => Ok(DiagMode::Classic),
        "closed-form" => Ok(DiagMode::ClosedForm),
        "envelope" => Ok(DiagMode::Envelope),
        "rigorous-envelope" => Ok(DiagMode::RigorousEnvelope),
        other => Err(format!("unknown diagonal mode '{other}'")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classic single-function bound (mu ~ 4.695).
    Classic(Common),
    /// Two-state bound with the non-rigorous convex envelope diagonal.
    Envelope(Common),
    /// Two-state bound with the diagonal chosen by --diag
    /// (rigorous envelope by default; mu ~ 4.621 at paper sizes).
    Mu(Common),
    /// Two-state bound with the certified monotone-shift array only
    /// (mu ~ 4.664 at paper sizes).
    MonoOnly(Common),
    /// Randomized self-checks of the algebra, bounds, and meshes.
    Verify(Common),
}

impl Common {
    fn config(&self) -> Result<PipelineConfig, polar_scaling::Error> {
        let mut cfg = match &self.preset {
            Some(p) => PipelineConfig::preset(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(ell) = self.ell {
            cfg.ell = ell;
        }
        if let Some(s) = self.nodes {
            cfg.scheme = s;
        }
        if let Some(d) = self.diag {
            cfg.diag = d;
        }
        if let Some(t) = self.tol_env {
            cfg.tol_envelope = t;
        }
        if let Some(t) = self.tol_iter {
            cfg.tol_iter = t;
        }
        if let Some(m) = self.max_iter {
            cfg.max_iter = m;
        }
        if let Some(d) = &self.cache_dir {
            cfg.cache_dir = d.clone();
        }
        if let Ok(env_dir) = std::env::var("POLAR_SCALING_CACHE") {
            if !env_dir.is_empty() {
                cfg.cache_dir = PathBuf::from(env_dir);
            }
        }
        Ok(cfg)
    }

    fn emit(&self, payload: &str) -> Result<(), polar_scaling::Error> {
        match &self.out {
            Some(path) => {
                std::fs::write(path, payload)?;
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(payload.as_bytes())?;
                if !payload.ends_with('\n') {
                    stdout.write_all(b"\n")?;
                }
            }
        }
        Ok(())
    }

    fn emit_run(&self, out: &RunOutcome) -> Result<(), polar_scaling::Error> {
        let payload = match self.format {
            Format::Json => serde_json::to_string_pretty(&out.report)?,
            Format::Csv => out.report.to_csv(),
        };
        self.emit(&payload)?;
        if let Some(path) = &self.out {
            let mut phi = String::from(match &out.phi_p {
                Some(_) => "node,phi_s,phi_p\n",
                None => "node,h\n",
            });
            for (i, &x) in out.phi_s.nodes().iter().enumerate() {
                match &out.phi_p {
                    Some(p) => phi.push_str(&format!(
                        "{x:.17e},{:.17e},{:.17e}\n",
                        out.phi_s.values()[i],
                        p.values()[i]
                    )),
                    None => phi.push_str(&format!("{x:.17e},{:.17e}\n", out.phi_s.values()[i])),
                }
            }
            let mut phi_path = path.as_os_str().to_owned();
            phi_path.push(".phi.csv");
            std::fs::write(phi_path, phi)?;
        }
        Ok(())
    }
}

fn run() -> Result<bool, polar_scaling::Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Classic(c) => {
            c.emit_run(&cmd_classic(&c.config()?)?)?;
        }
        Command::Envelope(c) => {
            c.emit_run(&cmd_envelope(&c.config()?)?)?;
        }
        Command::Mu(c) => {
            c.emit_run(&cmd_mu(&c.config()?)?)?;
        }
        Command::MonoOnly(c) => {
            c.emit_run(&cmd_mono_only(&c.config()?)?)?;
        }
        Command::Verify(c) => {
            let cfg = c.config()?;
            let verify_n = cfg.n.min(20);
            let report = cmd_verify(&cfg, c.seed, verify_n)?;
            let payload = serde_json::to_string_pretty(&report)?;
            c.emit(&payload)?;
            for s in &report.suites {
                eprintln!(
                    "{}: {}/{} checks passed{}",
                    s.name,
                    s.checks - s.failures,
                    s.checks,
                    if s.passed() { "" } else { " [FAIL]" }
                );
            }
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
