use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spinepr_cli::output::{render_mc_csv, render_trajectory_csv};
use spinepr_cli::sweep::{monte_carlo_point, point_params};
use spinepr_cli::{
    causal_separation, parse_config, render_sweep_csv, run_sweep, ConfigError, McConfig,
    SweepConfig,
};
use spinepr_core::dynamics::max_stable_step;
use spinepr_core::{classify_steady, coherent_initial, integrate, optimal_gain};

#[derive(Parser)]
#[command(
    name = "spinepr",
    version,
    about = "Steady-state EPR and entanglement analysis of two atomic ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file (`key = value` lines); defaults apply when omitted
    #[arg(long, short)]
    config: Option<PathBuf>,

    /// Output path, `-` for stdout; overrides `output` in the config
    #[arg(long, short)]
    output: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep Z for each dephasing rate and write the witness table
    Sweep(Common),
    /// Print the steady state and witnesses at the configured point
    Steady(Common),
    /// Integrate the moment equations from a coherent state
    Dynamics(Common),
    /// Estimate witnesses from simulated local readouts
    Montecarlo(Common),
    /// Minimum ensemble separation for space-like separated measurements
    Causality {
        /// Measurement duration in milliseconds
        #[arg(long = "delta-t-ms", allow_negative_numbers = true)]
        delta_t_ms: f64,
    },
}

enum CliError {
    Config(String),
    Failure(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<spinepr_core::Error> for CliError {
    fn from(e: spinepr_core::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("I/O error: {e}"))
    }
}

fn load(common: &Common) -> Result<SweepConfig, CliError> {
    let text = match &common.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text)?;
    if let Some(out) = &common.output {
        if out.is_empty() {
            return Err(CliError::Config("--output must not be empty".into()));
        }
        cfg.output = out.clone();
    }
    Ok(cfg)
}

fn write_output(cfg: &SweepConfig, text: &str) -> Result<(), CliError> {
    if cfg.writes_stdout() {
        std::io::stdout().lock().write_all(text.as_bytes())?;
    } else {
        std::fs::write(Path::new(&cfg.output), text)?;
    }
    Ok(())
}

fn sweep(cfg: &SweepConfig) -> Result<(), CliError> {
    if cfg.mc.is_some() && cfg.writes_stdout() {
        return Err(CliError::Config(
            "Monte-Carlo sweeps write a companion file and need a file output".into(),
        ));
    }
    let table = run_sweep(cfg);
    write_output(cfg, &render_sweep_csv(&table.rows))?;
    if !table.mc.is_empty() {
        std::fs::write(format!("{}.mc.csv", cfg.output), render_mc_csv(&table.mc))?;
    }
    for m in &table.minima {
        eprintln!(
            "gamma_d_add={}: min E_epr_inf={:.6} at Z={:.6}; min xi_inf={:.6} at Z={:.6}",
            m.gamma_d_add, m.e_epr_min, m.z_at_e_epr_min, m.xi_min, m.z_at_xi_min
        );
    }
    let failed = table.rows.iter().filter(|r| !r.status.is_ok()).count();
    if failed > 0 {
        eprintln!(
            "{failed} of {} points failed; see the status column",
            table.rows.len()
        );
    }
    Ok(())
}

fn steady(cfg: &SweepConfig) -> Result<(), CliError> {
    let p = point_params(cfg, cfg.z, cfg.gamma_d_add())?;
    let (s, r) = classify_steady(&p)?;
    let g = optimal_gain(&p)?;
    let lines = [
        ("Z", cfg.z),
        ("mu", p.squeeze().mu()),
        ("nu", p.squeeze().nu()),
        ("gamma_d_add", cfg.gamma_d_add()),
        ("gamma_tilde", p.rates().gamma_tilde()),
        ("p2", s.p2),
        ("mean_x", s.mean_x_a),
        ("v_z", s.v_az),
        ("v_y", s.v_ay),
        ("c_zz", s.c_zz),
        ("c_yy", s.c_yy),
        ("g_y", g.g_y),
        ("g_z", g.g_z),
        ("var_inf_z", r.var_inf_z),
        ("var_inf_y", r.var_inf_y),
        ("xi_inf", r.delta_ent),
        ("xi_g_inf", r.delta_g_ent),
        ("E_epr_ab", r.e_epr_ab),
        ("E_epr_ba", r.e_epr_ba),
    ];
    let mut text = String::new();
    for (k, v) in lines {
        text.push_str(&format!("{k} = {}\n", spinepr_cli::format_number(v)));
    }
    for (k, v) in [
        ("entangled", r.flags.entangled),
        ("epr_ab", r.flags.epr_ab),
        ("epr_ba", r.flags.epr_ba),
        ("epr_via_sum", r.flags.epr_via_sum),
    ] {
        text.push_str(&format!("{k} = {v}\n"));
    }
    write_output(cfg, &text)
}

fn dynamics(cfg: &SweepConfig) -> Result<(), CliError> {
    let p = point_params(cfg, cfg.z, cfg.gamma_d_add())?;
    let (s, _) = classify_steady(&p)?;
    let t_end = cfg.t_end.unwrap_or(20.0 / p.relaxation_rate(s.p2));
    let h = cfg.h.unwrap_or_else(|| max_stable_step(&p));
    let traj = integrate(&coherent_initial(cfg.n_atoms)?, &p, t_end, h)?;
    write_output(cfg, &render_trajectory_csv(&traj))
}

fn montecarlo(cfg: &SweepConfig) -> Result<(), CliError> {
    let mc = cfg.mc.unwrap_or(McConfig {
        m: 100_000,
        seed: 0,
        alpha: f64::INFINITY,
        n_p: cfg.n_atoms,
        r_light: 0.0,
    });
    let row = monte_carlo_point(cfg, &mc, cfg.z, cfg.gamma_d_add(), mc.seed);
    if let Err(msg) = &row.estimate {
        return Err(CliError::Failure(msg.clone()));
    }
    let p = point_params(cfg, cfg.z, cfg.gamma_d_add())?;
    let (_, truth) = classify_steady(&p)?;
    eprintln!(
        "analytic: g_z={:.6} E_epr_ab={:.6} xi_inf={:.6}",
        truth.gains.g_z, truth.e_epr_ab, truth.delta_ent
    );
    write_output(cfg, &render_mc_csv(std::slice::from_ref(&row)))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep(c) => sweep(&load(&c)?),
        Command::Steady(c) => steady(&load(&c)?),
        Command::Dynamics(c) => dynamics(&load(&c)?),
        Command::Montecarlo(c) => montecarlo(&load(&c)?),
        Command::Causality { delta_t_ms } => {
            let meters = causal_separation(delta_t_ms * 1e-3)
                .map_err(|e| CliError::Config(e.to_string()))?;
            println!("{}", spinepr_cli::format_number(meters));
            Ok(())
        }
    }
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
