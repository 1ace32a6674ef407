//! C ABI for the lighting-adoption simulator.
//!
//! Handles are opaque pointers owned by the caller and released with the
//! matching `_free` function. Every fallible call returns a `LampsimStatus`;
//! on failure `lampsim_last_error_message` returns a thread-local,
//! NUL-terminated description valid until the next failing call on the
//! same thread.
//!
//! Pointer arguments must be valid or NULL; NULL is reported as
//! `NullArgument` rather than dereferenced, so the entry points are
//! declared safe in the C convention.
#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use lampsim::config::FileConfig;
use lampsim::engine::{run_ensemble, RunResult, SimulationConfig};
use lampsim::error::Error;
use lampsim::export::{adoption_svg, behavior_svg, ensemble_csv, ConfigEcho, EnsembleSummary};
use lampsim::metrics::{tipping_point, EnsembleStats};
use lampsim::scenarios::{self, Scenario};

/// Result codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LampsimStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// An argument was out of range or otherwise unusable.
    InvalidArgument = 2,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 3,
    /// Configuration or scenario rejected (schema, unknown id, ranges).
    Config = 4,
    /// The simulation itself failed.
    Runtime = 5,
    /// Writing an output file failed.
    Io = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(err: &Error) -> LampsimStatus {
    set_error(&err.to_string());
    match err {
        Error::Io { .. } => LampsimStatus::Io,
        e if e.is_usage() => LampsimStatus::Config,
        _ => LampsimStatus::Runtime,
    }
}

/// Message for the most recent failure on this thread. Never NULL; empty
/// before the first failure. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn lampsim_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Version of the underlying simulator crate, as a static string.
#[no_mangle]
pub extern "C" fn lampsim_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Opaque simulation configuration (agents, runs, seed, engine constants).
pub struct LampsimConfig {
    inner: SimulationConfig,
}

/// Opaque finished ensemble: per-run series plus aggregate statistics.
pub struct LampsimEnsemble {
    scenario: Scenario,
    config: SimulationConfig,
    results: Vec<RunResult>,
    stats: EnsembleStats,
}

unsafe fn str_arg<'a>(ptr: *const c_char) -> Result<&'a str, LampsimStatus> {
    if ptr.is_null() {
        set_error("string argument is NULL");
        return Err(LampsimStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        LampsimStatus::InvalidUtf8
    })
}

macro_rules! deref_or_return {
    ($ptr:expr) => {
        match unsafe { $ptr.as_ref() } {
            Some(r) => r,
            None => {
                set_error("handle is NULL");
                return LampsimStatus::NullArgument;
            }
        }
    };
}

macro_rules! deref_mut_or_return {
    ($ptr:expr) => {
        match unsafe { $ptr.as_mut() } {
            Some(r) => r,
            None => {
                set_error("handle is NULL");
                return LampsimStatus::NullArgument;
            }
        }
    };
}

/// Create a configuration with the shipped defaults (1000 agents, 50 runs,
/// 240 months, seed 42). Free with `lampsim_config_free`.
#[no_mangle]
pub extern "C" fn lampsim_config_new() -> *mut LampsimConfig {
    Box::into_raw(Box::new(LampsimConfig { inner: SimulationConfig::default() }))
}

#[no_mangle]
pub extern "C" fn lampsim_config_free(config: *mut LampsimConfig) {
    if !config.is_null() {
        drop(unsafe { Box::from_raw(config) });
    }
}

#[no_mangle]
pub extern "C" fn lampsim_config_set_agents(
    config: *mut LampsimConfig,
    agents: u32,
) -> LampsimStatus {
    let config = deref_mut_or_return!(config);
    config.inner.n_agents = agents;
    LampsimStatus::Ok
}

#[no_mangle]
pub extern "C" fn lampsim_config_set_runs(config: *mut LampsimConfig, runs: u32) -> LampsimStatus {
    let config = deref_mut_or_return!(config);
    config.inner.runs = runs;
    LampsimStatus::Ok
}

#[no_mangle]
pub extern "C" fn lampsim_config_set_months(
    config: *mut LampsimConfig,
    months: u32,
) -> LampsimStatus {
    let config = deref_mut_or_return!(config);
    config.inner.months = months;
    LampsimStatus::Ok
}

#[no_mangle]
pub extern "C" fn lampsim_config_set_seed(config: *mut LampsimConfig, seed: u64) -> LampsimStatus {
    let config = deref_mut_or_return!(config);
    config.inner.master_seed = seed;
    LampsimStatus::Ok
}

/// Merge a JSON configuration document (the same schema as the CLI
/// `--config` file) into the handle.
#[no_mangle]
pub extern "C" fn lampsim_config_load_json(
    config: *mut LampsimConfig,
    json: *const c_char,
) -> LampsimStatus {
    let config = deref_mut_or_return!(config);
    let text = match unsafe { str_arg(json) } {
        Ok(t) => t,
        Err(status) => return status,
    };
    let file = match FileConfig::parse(text) {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    if let Err(e) = file.apply_to(&mut config.inner) {
        return fail(&e);
    }
    LampsimStatus::Ok
}

fn run_into_handle(
    scenario: Scenario,
    config: &SimulationConfig,
    out: *mut *mut LampsimEnsemble,
) -> LampsimStatus {
    if out.is_null() {
        set_error("output handle pointer is NULL");
        return LampsimStatus::NullArgument;
    }
    let results = match run_ensemble(&scenario, config) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let stats = match EnsembleStats::from_runs(&scenario.id, &results) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let handle = Box::new(LampsimEnsemble { scenario, config: config.clone(), results, stats });
    unsafe { *out = Box::into_raw(handle) };
    LampsimStatus::Ok
}

/// Run an ensemble of a built-in scenario
/// (`no_regulation | soft_ban | hard_ban | info_campaign | soft_ban_info`).
#[no_mangle]
pub extern "C" fn lampsim_run_builtin(
    config: *const LampsimConfig,
    scenario_id: *const c_char,
    out: *mut *mut LampsimEnsemble,
) -> LampsimStatus {
    let config = deref_or_return!(config);
    let id = match unsafe { str_arg(scenario_id) } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let scenario = match id.parse::<scenarios::ScenarioId>() {
        Ok(id) => scenarios::builtin(id),
        Err(e) => return fail(&e),
    };
    run_into_handle(scenario, &config.inner, out)
}

/// Run an ensemble of a scenario given as a JSON document (the scenario
/// file schema).
#[no_mangle]
pub extern "C" fn lampsim_run_scenario_json(
    config: *const LampsimConfig,
    scenario_json: *const c_char,
    out: *mut *mut LampsimEnsemble,
) -> LampsimStatus {
    let config = deref_or_return!(config);
    let text = match unsafe { str_arg(scenario_json) } {
        Ok(t) => t,
        Err(status) => return status,
    };
    let scenario = match scenarios::parse_scenario_str(text) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    run_into_handle(scenario, &config.inner, out)
}

#[no_mangle]
pub extern "C" fn lampsim_ensemble_free(ensemble: *mut LampsimEnsemble) {
    if !ensemble.is_null() {
        drop(unsafe { Box::from_raw(ensemble) });
    }
}

/// Number of runs in the ensemble (0 for a NULL handle).
#[no_mangle]
pub extern "C" fn lampsim_ensemble_runs(ensemble: *const LampsimEnsemble) -> u32 {
    unsafe { ensemble.as_ref() }.map_or(0, |e| e.results.len() as u32)
}

/// Number of recorded months per run (0 for a NULL handle).
#[no_mangle]
pub extern "C" fn lampsim_ensemble_months(ensemble: *const LampsimEnsemble) -> u32 {
    unsafe { ensemble.as_ref() }.map_or(0, |e| e.stats.months)
}

unsafe fn copy_series(series: &[f64], out: *mut f64, len: usize) -> LampsimStatus {
    if out.is_null() {
        set_error("output buffer is NULL");
        return LampsimStatus::NullArgument;
    }
    if len < series.len() {
        set_error("output buffer is too small");
        return LampsimStatus::InvalidArgument;
    }
    ptr::copy_nonoverlapping(series.as_ptr(), out, series.len());
    LampsimStatus::Ok
}

/// Copy the per-month ensemble mean adoption share into `out`
/// (`len >= lampsim_ensemble_months`).
#[no_mangle]
pub extern "C" fn lampsim_ensemble_adoption_mean(
    ensemble: *const LampsimEnsemble,
    out: *mut f64,
    len: usize,
) -> LampsimStatus {
    let ensemble = deref_or_return!(ensemble);
    unsafe { copy_series(&ensemble.stats.adoption_mean, out, len) }
}

/// Copy the per-month adoption standard deviation across runs into `out`.
#[no_mangle]
pub extern "C" fn lampsim_ensemble_adoption_std(
    ensemble: *const LampsimEnsemble,
    out: *mut f64,
    len: usize,
) -> LampsimStatus {
    let ensemble = deref_or_return!(ensemble);
    unsafe { copy_series(&ensemble.stats.adoption_std, out, len) }
}

/// Copy one run's adoption series into `out`.
#[no_mangle]
pub extern "C" fn lampsim_ensemble_run_adoption(
    ensemble: *const LampsimEnsemble,
    run_index: u32,
    out: *mut f64,
    len: usize,
) -> LampsimStatus {
    let ensemble = deref_or_return!(ensemble);
    let Some(run) = ensemble.results.get(run_index as usize) else {
        set_error("run index out of range");
        return LampsimStatus::InvalidArgument;
    };
    unsafe { copy_series(&run.adoption, out, len) }
}

/// Ensemble mean adoption at the final recorded month.
#[no_mangle]
pub extern "C" fn lampsim_ensemble_final_mean(
    ensemble: *const LampsimEnsemble,
    out: *mut f64,
) -> LampsimStatus {
    let ensemble = deref_or_return!(ensemble);
    if out.is_null() {
        set_error("output pointer is NULL");
        return LampsimStatus::NullArgument;
    }
    unsafe { *out = ensemble.stats.final_mean() };
    LampsimStatus::Ok
}

/// The three run-level random factors of one run.
#[no_mangle]
pub extern "C" fn lampsim_ensemble_factors(
    ensemble: *const LampsimEnsemble,
    run_index: u32,
    led_price: *mut f64,
    incandescent_price: *mut f64,
    led_innovation: *mut f64,
) -> LampsimStatus {
    let ensemble = deref_or_return!(ensemble);
    let Some(run) = ensemble.results.get(run_index as usize) else {
        set_error("run index out of range");
        return LampsimStatus::InvalidArgument;
    };
    if led_price.is_null() || incandescent_price.is_null() || led_innovation.is_null() {
        set_error("output pointer is NULL");
        return LampsimStatus::NullArgument;
    }
    unsafe {
        *led_price = run.factors.led_price_factor;
        *incandescent_price = run.factors.incandescent_price_factor;
        *led_innovation = run.factors.led_innovation_factor;
    }
    LampsimStatus::Ok
}

fn write_text(path: &str, text: &str) -> LampsimStatus {
    match std::fs::write(Path::new(path), text) {
        Ok(()) => LampsimStatus::Ok,
        Err(e) => fail(&Error::io(path, e)),
    }
}

/// Write the ensemble as long-format CSV
/// (`scenario,run,month,adoption,rep,imi,del,soc`).
#[no_mangle]
pub extern "C" fn lampsim_ensemble_write_csv(
    ensemble: *const LampsimEnsemble,
    path: *const c_char,
) -> LampsimStatus {
    let ensemble = deref_or_return!(ensemble);
    let path = match unsafe { str_arg(path) } {
        Ok(p) => p,
        Err(status) => return status,
    };
    write_text(path, &ensemble_csv(&ensemble.scenario.id, &ensemble.results))
}

/// Write the JSON summary (means, stds, factors, tipping months, and the
/// effective configuration).
#[no_mangle]
pub extern "C" fn lampsim_ensemble_write_summary_json(
    ensemble: *const LampsimEnsemble,
    path: *const c_char,
) -> LampsimStatus {
    let ensemble = deref_or_return!(ensemble);
    let path = match unsafe { str_arg(path) } {
        Ok(p) => p,
        Err(status) => return status,
    };
    let echo = ConfigEcho {
        scenario: ensemble.scenario.clone(),
        agents: ensemble.config.n_agents,
        runs: ensemble.config.runs,
        months: ensemble.config.months,
        master_seed: ensemble.config.master_seed,
        jobs: 0,
        thresholds: ensemble.config.thresholds,
        satisfaction: ensemble.config.satisfaction,
        dynamics: ensemble.config.dynamics,
    };
    let tipping: Vec<Option<u32>> = ensemble
        .results
        .iter()
        .map(|r| {
            tipping_point(
                &ensemble.config.catalog,
                &ensemble.scenario,
                &r.factors,
                ensemble.config.months,
            )
        })
        .collect();
    let summary = EnsembleSummary::new(&ensemble.stats, echo, tipping);
    write_text(path, &summary.to_json())
}

/// Write the mean-adoption SVG plot with a +-1 std band.
#[no_mangle]
pub extern "C" fn lampsim_ensemble_write_adoption_svg(
    ensemble: *const LampsimEnsemble,
    path: *const c_char,
) -> LampsimStatus {
    let ensemble = deref_or_return!(ensemble);
    let path = match unsafe { str_arg(path) } {
        Ok(p) => p,
        Err(status) => return status,
    };
    write_text(path, &adoption_svg(&ensemble.stats))
}

/// Write the behavior-share SVG plot (four strategy lines).
#[no_mangle]
pub extern "C" fn lampsim_ensemble_write_behaviors_svg(
    ensemble: *const LampsimEnsemble,
    path: *const c_char,
) -> LampsimStatus {
    let ensemble = deref_or_return!(ensemble);
    let path = match unsafe { str_arg(path) } {
        Ok(p) => p,
        Err(status) => return status,
    };
    write_text(path, &behavior_svg(&ensemble.stats))
}
