//! Command-line driver: evaluate schedules, run the optimizers, sweep
//! gamma x N grids to CSV/SVG, reproduce the first-order solution table, and
//! solve the maximin problem.
//!
//! Exit codes: 0 success, 2 invalid input, 3 I/O failure, 4 optimizer
//! non-convergence (best-effort result still printed).

mod csvio;
mod svg;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use lz_zeno::adiabatic::{
    classify_theorem2, maximin_evaluate, maximin_grid_search, maximin_solve, Theorem2Family,
};
use lz_zeno::antiadiabatic::{compare_row, table1};
use lz_zeno::dp_exact::{build_tables, optimize_from_table, GridSpec};
use lz_zeno::lz_core::{Coupling, EvolutionTable};
use lz_zeno::methods::{evolution_table_for, optimize, optimize_with_table, MethodChoice};
use lz_zeno::objective::{
    delta_phi_from_propagator, transition_probability, upper_bound, MeasurementSchedule,
    Method, OptimizationResult,
};

#[derive(Parser)]
#[command(
    name = "lz-zeno",
    version,
    about = "Measurement-assisted Landau-Zener transition optimizer",
    after_help = "Defaults: --method auto (antiadiabatic for gamma <= 0.5, adiabatic DE above), \
                  --seed 20240613, DP grid [-50, 50] step 0.01. A config file holds key=value \
                  lines (gamma, n, method, seed, grid-min, grid-max, grid-step); explicit flags \
                  always win."
)]
struct Cli {
    /// Plain-text key=value config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct GridArgs {
    /// DP grid lower edge (default -50).
    #[arg(long)]
    grid_min: Option<f64>,
    /// DP grid upper edge (default 50).
    #[arg(long)]
    grid_max: Option<f64>,
    /// DP grid step (default 0.01).
    #[arg(long)]
    grid_step: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact transition probability for a measurement schedule.
    Evaluate {
        #[arg(long)]
        gamma: Option<f64>,
        /// Comma-separated measurement instants (rescaled time); empty for none.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        times: Vec<f64>,
    },
    /// Optimal instants for a fixed number of measurements.
    Optimize {
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        /// auto | dp | antiadiabatic | adiabatic
        #[arg(long)]
        method: Option<String>,
        /// RNG seed for the stochastic stages.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Optimize every (gamma, n) cell and write CSV (plus optional SVG).
    Sweep {
        /// Comma-separated gamma values.
        #[arg(long, value_delimiter = ',', required = true)]
        gammas: Vec<f64>,
        /// Comma-separated measurement counts.
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<usize>,
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// CSV output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// SVG line-plot output path.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// First-order solution table with deviations from the published values.
    Table1 {
        #[arg(long, default_value_t = 15)]
        n_max: usize,
        /// Also write the table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Variable-observable upper bound (1 + cos^{n+1}(dphi/(n+1)))/2.
    Bound {
        #[arg(long)]
        n: usize,
        /// Bloch angle in radians (default pi).
        #[arg(long)]
        delta_phi: Option<f64>,
        /// Derive the angle from the propagator at this coupling instead.
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Worst-case (maximin) solution under uncontrolled oscillation phases.
    Maximin {
        #[arg(long)]
        n: usize,
        /// Run the brute-force angle-grid check (n <= 4).
        #[arg(long)]
        verify: bool,
    },
}

enum CliError {
    Invalid(String),
    Io(String),
}

impl From<lz_zeno::LzError> for CliError {
    fn from(e: lz_zeno::LzError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

fn main() {
    let cli = Cli::parse();
    let config = match load_config(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => exit_with(e),
    };
    match run(cli.command, &config) {
        Ok(code) => std::process::exit(code),
        Err(e) => exit_with(e),
    }
}

fn exit_with(e: CliError) -> ! {
    match e {
        CliError::Invalid(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        CliError::Io(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(3);
        }
    }
}

type Config = HashMap<String, String>;

fn load_config(path: Option<&Path>) -> Result<Config, CliError> {
    let mut map = HashMap::new();
    let Some(path) = path else { return Ok(map) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Invalid(format!("config line without '=': {line}")));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn config_value<T: std::str::FromStr>(
    cli_value: Option<T>,
    config: &Config,
    key: &str,
) -> Result<Option<T>, CliError> {
    if cli_value.is_some() {
        return Ok(cli_value);
    }
    match config.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|_| CliError::Invalid(format!("config {key}='{raw}' is not valid"))),
    }
}

const DEFAULT_SEED: u64 = 20240613;

fn resolve_grid(grid: &GridArgs, config: &Config) -> Result<GridSpec, CliError> {
    let default = GridSpec::default_range();
    let t_min = config_value(grid.grid_min, config, "grid-min")?.unwrap_or(default.t_min);
    let t_max = config_value(grid.grid_max, config, "grid-max")?.unwrap_or(default.t_max);
    let step = config_value(grid.grid_step, config, "grid-step")?.unwrap_or(default.step);
    Ok(GridSpec::new(t_min, t_max, step)?)
}

fn require_gamma(gamma: Option<f64>, config: &Config) -> Result<Coupling, CliError> {
    let gamma = config_value(gamma, config, "gamma")?
        .ok_or_else(|| CliError::Invalid("--gamma is required".into()))?;
    Ok(Coupling::new(gamma)?)
}

fn resolve_method(method: Option<String>, config: &Config) -> Result<MethodChoice, CliError> {
    let name = config_value(method, config, "method")?.unwrap_or_else(|| "auto".to_string());
    Ok(name.parse::<MethodChoice>()?)
}

fn run(command: Command, config: &Config) -> Result<i32, CliError> {
    match command {
        Command::Evaluate { gamma, times } => cmd_evaluate(gamma, times, config),
        Command::Optimize { gamma, n, method, seed, grid } => {
            cmd_optimize(gamma, n, method, seed, grid, config)
        }
        Command::Sweep { gammas, ns, method, seed, out, svg, grid } => {
            cmd_sweep(gammas, ns, method, seed, out, svg, grid, config)
        }
        Command::Table1 { n_max, out } => cmd_table1(n_max, out),
        Command::Bound { n, delta_phi, gamma } => cmd_bound(n, delta_phi, gamma),
        Command::Maximin { n, verify } => cmd_maximin(n, verify),
    }
}

fn cmd_evaluate(gamma: Option<f64>, mut times: Vec<f64>, config: &Config) -> Result<i32, CliError> {
    let coupling = require_gamma(gamma, config)?;
    if times.windows(2).any(|w| w[0] > w[1]) {
        eprintln!("warning: instants were not sorted; sorting them");
        times.sort_by(|a, b| {
            a.partial_cmp(b).ok_or(CliError::Invalid("NaN instant".into())).unwrap_or(std::cmp::Ordering::Equal)
        });
    }
    let schedule = MeasurementSchedule::new(coupling, times)?;
    let p = transition_probability(&schedule)?;
    println!("{p:.6}");
    Ok(0)
}

fn format_schedule(instants: &[f64]) -> String {
    if instants.is_empty() {
        "(none)".to_string()
    } else {
        instants.iter().map(|t| format!("{t:.6}")).collect::<Vec<_>>().join(";")
    }
}

fn print_result(res: &OptimizationResult) {
    println!("method: {}", res.method);
    println!("gamma: {}", res.schedule.coupling().gamma());
    println!("n: {}", res.schedule.len());
    println!("schedule: {}", format_schedule(res.schedule.instants()));
    println!("probability: {:.6}", res.probability);
    println!("bound: {:.6}", res.bound);
    for w in &res.diagnostics.warnings {
        eprintln!("warning: {w}");
    }
}

fn cmd_optimize(
    gamma: Option<f64>,
    n: Option<usize>,
    method: Option<String>,
    seed: Option<u64>,
    grid: GridArgs,
    config: &Config,
) -> Result<i32, CliError> {
    let coupling = require_gamma(gamma, config)?;
    let n = config_value(n, config, "n")?
        .ok_or_else(|| CliError::Invalid("--n is required".into()))?;
    if n > lz_zeno::objective::DEFAULT_MAX_MEASUREMENTS {
        return Err(CliError::Invalid(format!(
            "n = {n} exceeds the maximum {}",
            lz_zeno::objective::DEFAULT_MAX_MEASUREMENTS
        )));
    }
    let method = resolve_method(method, config)?;
    let seed = config_value(seed, config, "seed")?.unwrap_or(DEFAULT_SEED);
    let grid = resolve_grid(&grid, config)?;
    let res = optimize(&coupling, n, method, seed, &grid)?;
    print_result(&res);
    Ok(if res.diagnostics.converged { 0 } else { 4 })
}

/// Per-gamma reusable optimizer state for sweeps.
struct GammaContext {
    dp_table: Option<lz_zeno::dp_exact::ValueTable>,
    evo_table: Option<EvolutionTable>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    gammas: Vec<f64>,
    ns: Vec<usize>,
    method: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    svg_path: Option<PathBuf>,
    grid: GridArgs,
    config: &Config,
) -> Result<i32, CliError> {
    if gammas.is_empty() || ns.is_empty() {
        return Err(CliError::Invalid("sweep needs nonempty --gammas and --ns".into()));
    }
    let method = resolve_method(method, config)?;
    let seed = config_value(seed, config, "seed")?.unwrap_or(DEFAULT_SEED);
    let grid = resolve_grid(&grid, config)?;
    let max_n = *ns.iter().max().expect("nonempty");

    let contexts: Mutex<HashMap<u64, std::sync::Arc<GammaContext>>> = Mutex::new(HashMap::new());
    let context_for = |coupling: &Coupling| -> Result<std::sync::Arc<GammaContext>, lz_zeno::LzError> {
        let key = coupling.gamma().to_bits();
        if let Some(ctx) = contexts.lock().unwrap().get(&key) {
            return Ok(ctx.clone());
        }
        let resolved = method.resolve(coupling.gamma());
        let needs_dp = matches!(resolved, Method::Dp) && max_n >= 1;
        let ctx = std::sync::Arc::new(GammaContext {
            dp_table: if needs_dp {
                Some(build_tables(coupling, max_n, &grid)?)
            } else {
                None
            },
            evo_table: if !needs_dp && coupling.gamma() > 0.0 {
                Some(evolution_table_for(coupling, max_n)?)
            } else {
                None
            },
        });
        contexts.lock().unwrap().insert(key, ctx.clone());
        Ok(ctx)
    };

    let cells: Vec<(usize, f64, usize)> = gammas
        .iter()
        .enumerate()
        .flat_map(|(gi, &g)| ns.iter().map(move |&n| (gi, g, n)))
        .collect();

    let results: Vec<Result<csvio::SweepRow, lz_zeno::LzError>> = cells
        .par_iter()
        .map(|&(_, g, n)| {
            let start = Instant::now();
            let coupling = Coupling::new(g)?;
            let cell_seed = seed ^ (g.to_bits().rotate_left(17)) ^ (n as u64).wrapping_mul(0x9E37);
            let res = if n == 0 {
                optimize(&coupling, 0, method, cell_seed, &grid)?
            } else {
                let ctx = context_for(&coupling)?;
                if let Some(dp) = &ctx.dp_table {
                    optimize_from_table(dp, n)?
                } else if let Some(evo) = &ctx.evo_table {
                    optimize_with_table(evo, n, method, cell_seed, &grid)?
                } else {
                    optimize(&coupling, n, method, cell_seed, &grid)?
                }
            };
            Ok(csvio::SweepRow::new(
                g,
                n,
                res.method.to_string(),
                res.probability,
                res.bound,
                res.schedule.instants(),
                start.elapsed().as_millis() as u64,
            ))
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        rows.push(r.map_err(CliError::from)?);
    }

    let csv = csvio::emit(&rows);
    match &out {
        Some(path) => std::fs::write(path, &csv)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }

    if let Some(path) = &svg_path {
        let plot = render_sweep_plot(&gammas, &ns, &rows);
        std::fs::write(path, plot)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(0)
}

/// Probability vs n (one curve per gamma) when several n are swept,
/// otherwise probability vs gamma (one curve per n).
fn render_sweep_plot(gammas: &[f64], ns: &[usize], rows: &[csvio::SweepRow]) -> String {
    let value = |g: f64, n: usize| -> Option<(f64, f64)> {
        rows.iter()
            .find(|r| r.gamma == g && r.n == n)
            .map(|r| (n as f64, r.probability))
    };
    if ns.len() > 1 {
        let series: Vec<svg::Series> = gammas
            .iter()
            .map(|&g| svg::Series {
                label: format!("gamma={g}"),
                points: ns.iter().filter_map(|&n| value(g, n)).collect(),
            })
            .collect();
        svg::line_plot("max transition probability", "n", "P", &series)
    } else {
        let n = ns[0];
        let series = vec![svg::Series {
            label: format!("n={n}"),
            points: rows.iter().map(|r| (r.gamma, r.probability)).collect(),
        }];
        svg::line_plot("max transition probability", "gamma", "P", &series)
    }
}

fn cmd_table1(n_max: usize, out: Option<PathBuf>) -> Result<i32, CliError> {
    let rows = table1(n_max)?;
    let mut csv = String::from("n,f,instants,f_deviation,instant_deviation,asymmetric\n");
    println!(
        "{:>2}  {:>6}  {:>8}  {:>8}  {:>5}  instants",
        "N", "f", "dev_f", "dev_t", "asym"
    );
    for row in &rows {
        let cmp = compare_row(row);
        let asymmetric = !row.is_symmetric(0.02);
        let (df, dt) = cmp
            .map(|c| (c.f_deviation, c.max_instant_deviation))
            .unwrap_or((f64::NAN, f64::NAN));
        println!(
            "{:>2}  {:>6.3}  {:>8.4}  {:>8.4}  {:>5}  {}",
            row.n,
            row.f_value,
            df,
            dt,
            asymmetric,
            format_schedule(&row.instants)
        );
        csv.push_str(&format!(
            "{},{:.3},{},{:.4},{:.4},{}\n",
            row.n,
            row.f_value,
            format_schedule(&row.instants),
            df,
            dt,
            asymmetric
        ));
    }
    if let Some(path) = out {
        std::fs::write(&path, csv)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(0)
}

fn cmd_bound(n: usize, delta_phi: Option<f64>, gamma: Option<f64>) -> Result<i32, CliError> {
    let angle = match (delta_phi, gamma) {
        (Some(_), Some(_)) => {
            return Err(CliError::Invalid("give either --delta-phi or --gamma, not both".into()))
        }
        (Some(a), None) => a,
        (None, Some(g)) => delta_phi_from_propagator(&Coupling::new(g)?)?,
        (None, None) => std::f64::consts::PI,
    };
    let b = upper_bound(n, angle)?;
    println!("delta_phi: {angle:.6}");
    println!("bound: {b:.6}");
    Ok(0)
}

fn cmd_maximin(n: usize, verify: bool) -> Result<i32, CliError> {
    let (value, canonical) = maximin_solve(n)?;
    println!("value: {value:.6}");
    println!(
        "canonical angles: {}",
        canonical
            .alphas()
            .iter()
            .map(|a| format!("{a:.6}"))
            .collect::<Vec<_>>()
            .join(";")
    );
    println!("schedule: a single measurement at t = 0 (angle pi/2); further measurements idle");
    debug_assert_eq!(maximin_evaluate(&canonical).unwrap(), 0.5);
    debug_assert_ne!(classify_theorem2(&canonical, 1e-9), Theorem2Family::NotOptimal);
    if verify {
        if n <= 4 {
            let check = maximin_grid_search(n, 12)?;
            println!(
                "verify: {} grid schedules, max value {:.9}, families attain 0.5: {}",
                check.schedules_checked, check.max_value, check.families_attain_optimum
            );
            if check.max_value > 0.5 + 1e-9 || !check.families_attain_optimum {
                return Err(CliError::Invalid("grid check failed".into()));
            }
            println!("verify: no grid point exceeds 0.5");
            if !check.unclassified_optima.is_empty() {
                println!(
                    "verify: {} optimal schedules outside the three families \
                     (an adjacent pi/2-separated axis pair pins the value at 0.5 \
                     with the remaining angles free)",
                    check.unclassified_optima.len()
                );
            }
        } else {
            println!("verify: skipped (exhaustive check supports n <= 4)");
        }
    }
    Ok(0)
}
