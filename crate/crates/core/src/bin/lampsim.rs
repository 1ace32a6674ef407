//! Command-line front end: run ensembles, compare scenarios, sensitivity
//! analysis, archetype generation and re-plotting from CSV exports.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lampsim::agents::{
    archetypes_to_csv, generate_archetypes, DEFAULT_ARCHETYPE_COUNT, DEFAULT_ARCHETYPE_SEED,
};
use lampsim::config::FileConfig;
use lampsim::engine::{run_ensemble, RunResult, SimulationConfig};
use lampsim::error::{Error, Result};
use lampsim::export::{
    adoption_svg, behavior_svg, comparison_svg, read_ensemble_csv, write_ensemble_csv, write_svg,
    ConfigEcho, EnsembleSummary,
};
use lampsim::metrics::{sensitivity_report, tipping_point, EnsembleStats};
use lampsim::scenarios::{resolve, Scenario};

#[derive(Parser)]
#[command(name = "lampsim", version, about = "Monte Carlo simulator of EU household lighting adoption")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonOpts {
    /// Monte Carlo runs per scenario
    #[arg(long)]
    runs: Option<u32>,
    /// Agents per run
    #[arg(long)]
    agents: Option<u32>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Recorded months including the initial snapshot (max 240)
    #[arg(long)]
    months: Option<u32>,
    /// Output directory (default: $LAMPSIM_OUT_DIR or ./out)
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parallel run execution (0 = all cores). Output is identical for any
    /// value.
    #[arg(long)]
    jobs: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario ensemble and export CSV, JSON summary and SVG plots
    Run {
        /// Built-in scenario id or path to a scenario JSON file
        #[arg(long)]
        scenario: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run several scenarios and rank them by final mean adoption
    Compare {
        /// Comma-separated scenario ids or file paths (at least two)
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        scenarios: Vec<String>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Rank-correlate the run factors against final adoption
    Sensitivity {
        #[arg(long)]
        scenario: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Write a synthetic archetype CSV
    GenArchetypes {
        #[arg(long, default_value_t = DEFAULT_ARCHETYPE_COUNT)]
        count: u32,
        #[arg(long, default_value_t = DEFAULT_ARCHETYPE_SEED)]
        seed: u64,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate SVG plots from a CSV export
    Plot {
        /// CSV file produced by `run` or `compare`
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Effective {
    config: SimulationConfig,
    out_dir: PathBuf,
    jobs: u32,
    file_scenario: Option<Scenario>,
}

fn effective_config(common: &CommonOpts) -> Result<Effective> {
    let file = match common.config.as_deref() {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let mut config = SimulationConfig::default();
    file.apply_to(&mut config)?;
    // Flags override file values.
    if let Some(v) = common.agents {
        config.n_agents = v;
    }
    if let Some(v) = common.runs {
        config.runs = v;
    }
    if let Some(v) = common.seed {
        config.master_seed = v;
    }
    if let Some(v) = common.months {
        config.months = v;
    }
    let out_dir = common
        .out
        .clone()
        .or(file.out_dir.clone())
        .or_else(|| std::env::var_os("LAMPSIM_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let jobs = common.jobs.or(file.jobs).unwrap_or(0);
    config.validate()?;
    Ok(Effective { config, out_dir, jobs, file_scenario: file.scenario })
}

fn configure_jobs(jobs: u32) {
    if jobs > 0 {
        // Ignore failure: the global pool can only be sized once.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs as usize).build_global();
    }
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn echo_for(scenario: &Scenario, eff: &Effective) -> ConfigEcho {
    ConfigEcho {
        scenario: scenario.clone(),
        agents: eff.config.n_agents,
        runs: eff.config.runs,
        months: eff.config.months,
        master_seed: eff.config.master_seed,
        jobs: eff.jobs,
        thresholds: eff.config.thresholds,
        satisfaction: eff.config.satisfaction,
        dynamics: eff.config.dynamics,
    }
}

/// Export the full output set for one finished ensemble.
fn run_and_export(
    scenario: &Scenario,
    eff: &Effective,
    results: &[RunResult],
) -> Result<EnsembleStats> {
    let stats = EnsembleStats::from_runs(&scenario.id, results)?;
    let dir = &eff.out_dir;
    write_ensemble_csv(&dir.join(format!("{}.csv", scenario.id)), &scenario.id, results)?;
    let tipping: Vec<Option<u32>> = results
        .iter()
        .map(|r| tipping_point(&eff.config.catalog, scenario, &r.factors, eff.config.months))
        .collect();
    let summary = EnsembleSummary::new(&stats, echo_for(scenario, eff), tipping);
    summary.write(&dir.join(format!("{}_summary.json", scenario.id)))?;
    write_svg(&dir.join(format!("{}_adoption.svg", scenario.id)), &adoption_svg(&stats))?;
    write_svg(&dir.join(format!("{}_behaviors.svg", scenario.id)), &behavior_svg(&stats))?;
    Ok(stats)
}

fn resolve_scenario(arg: &str, eff: &Effective) -> Result<Scenario> {
    // A scenario embedded in the config file applies when the flag names it.
    if let Some(s) = &eff.file_scenario {
        if s.id == arg {
            return Ok(s.clone());
        }
    }
    resolve(arg)
}

fn cmd_run(scenario_arg: &str, common: &CommonOpts) -> Result<()> {
    let eff = effective_config(common)?;
    configure_jobs(eff.jobs);
    let scenario = resolve_scenario(scenario_arg, &eff)?;
    ensure_out_dir(&eff.out_dir)?;
    let results = run_ensemble(&scenario, &eff.config)?;
    let stats = run_and_export(&scenario, &eff, &results)?;
    println!(
        "{}: {} runs x {} agents, final mean adoption {:.4} (std {:.4})",
        scenario.id,
        eff.config.runs,
        eff.config.n_agents,
        stats.final_mean(),
        stats.final_std()
    );
    println!("outputs in {}", eff.out_dir.display());
    Ok(())
}

fn cmd_compare(scenario_args: &[String], common: &CommonOpts) -> Result<()> {
    if scenario_args.len() < 2 {
        return Err(Error::Config("compare needs at least two scenarios".into()));
    }
    for (i, a) in scenario_args.iter().enumerate() {
        if scenario_args[..i].contains(a) {
            return Err(Error::Config(format!("duplicate scenario `{a}`")));
        }
    }
    let eff = effective_config(common)?;
    configure_jobs(eff.jobs);
    let scenarios: Vec<Scenario> =
        scenario_args.iter().map(|a| resolve_scenario(a, &eff)).collect::<Result<_>>()?;
    ensure_out_dir(&eff.out_dir)?;

    let mut all_stats = Vec::new();
    for scenario in &scenarios {
        let results = run_ensemble(scenario, &eff.config)?;
        all_stats.push(run_and_export(scenario, &eff, &results)?);
    }
    // Efficacy ranking at the final month, most effective first.
    all_stats.sort_by(|a, b| b.final_mean().partial_cmp(&a.final_mean()).unwrap());
    let ranking: Vec<serde_json::Value> = all_stats
        .iter()
        .map(|s| {
            serde_json::json!({
                "scenario": s.scenario,
                "final_mean": s.final_mean(),
                "final_std": s.final_std(),
            })
        })
        .collect();
    let ranking_path = eff.out_dir.join("ranking.json");
    let mut text = serde_json::to_string_pretty(&serde_json::json!({ "ranking": ranking }))
        .expect("ranking serializes");
    text.push('\n');
    std::fs::write(&ranking_path, text).map_err(|e| Error::io(&ranking_path, e))?;
    write_svg(&eff.out_dir.join("compare_adoption.svg"), &comparison_svg(&all_stats))?;

    println!("efficacy ranking at the final month:");
    for (k, s) in all_stats.iter().enumerate() {
        println!(
            "  {}. {:<16} {:.4} (std {:.4})",
            k + 1,
            s.scenario,
            s.final_mean(),
            s.final_std()
        );
    }
    Ok(())
}

fn cmd_sensitivity(scenario_arg: &str, common: &CommonOpts) -> Result<()> {
    let eff = effective_config(common)?;
    configure_jobs(eff.jobs);
    let scenario = resolve_scenario(scenario_arg, &eff)?;
    ensure_out_dir(&eff.out_dir)?;
    let results = run_ensemble(&scenario, &eff.config)?;
    let report = sensitivity_report(&scenario.id, &results)?;
    let path = eff.out_dir.join(format!("{}_sensitivity.json", scenario.id));
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    let fmt = |v: Option<f64>| v.map_or("undefined".to_string(), |c| format!("{c:+.3}"));
    println!("rank correlation with final adoption ({} runs, {}):", report.runs, scenario.id);
    println!("  led price factor           {}", fmt(report.led_price));
    println!("  incandescent price factor  {}", fmt(report.incandescent_price));
    println!("  led innovation factor      {}", fmt(report.led_innovation));
    println!("  pricing-factor product     {}", fmt(report.pricing_product));
    Ok(())
}

fn cmd_gen_archetypes(count: u32, seed: u64, out: &Path) -> Result<()> {
    if count < 1 {
        return Err(Error::Config("count must be >= 1".into()));
    }
    let archetypes = generate_archetypes(count, seed);
    std::fs::write(out, archetypes_to_csv(&archetypes)).map_err(|e| Error::io(out, e))?;
    println!("wrote {count} archetypes to {}", out.display());
    Ok(())
}

fn cmd_plot(input: &Path, out: Option<&Path>) -> Result<()> {
    let ensembles = read_ensemble_csv(input)?;
    let out_dir = out
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os("LAMPSIM_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    ensure_out_dir(&out_dir)?;
    let mut all_stats = Vec::new();
    for e in &ensembles {
        let stats = e.stats()?;
        write_svg(&out_dir.join(format!("{}_adoption.svg", e.scenario)), &adoption_svg(&stats))?;
        write_svg(&out_dir.join(format!("{}_behaviors.svg", e.scenario)), &behavior_svg(&stats))?;
        all_stats.push(stats);
    }
    if all_stats.len() > 1 {
        all_stats.sort_by(|a, b| b.final_mean().partial_cmp(&a.final_mean()).unwrap());
        write_svg(&out_dir.join("compare_adoption.svg"), &comparison_svg(&all_stats))?;
    }
    println!("plots written to {}", out_dir.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Run { scenario, common } => cmd_run(scenario, common),
        Command::Compare { scenarios, common } => cmd_compare(scenarios, common),
        Command::Sensitivity { scenario, common } => cmd_sensitivity(scenario, common),
        Command::GenArchetypes { count, seed, out } => cmd_gen_archetypes(*count, *seed, out),
        Command::Plot { input, out } => cmd_plot(input, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
