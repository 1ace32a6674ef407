//! Exercises the C ABI exactly as a foreign caller would: through raw
//! pointers and status codes.

use std::ffi::{CStr, CString};
use std::ptr;

use lampsim_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(lampsim_last_error_message()) }.to_string_lossy().into_owned()
}

fn small_config() -> *mut LampsimConfig {
    let config = lampsim_config_new();
    assert!(!config.is_null());
    assert_eq!(lampsim_config_set_agents(config, 40), LampsimStatus::Ok);
    assert_eq!(lampsim_config_set_runs(config, 3), LampsimStatus::Ok);
    assert_eq!(lampsim_config_set_months(config, 36), LampsimStatus::Ok);
    assert_eq!(lampsim_config_set_seed(config, 42), LampsimStatus::Ok);
    config
}

#[test]
fn run_builtin_and_read_series() {
    let config = small_config();
    let scenario = CString::new("hard_ban").unwrap();
    let mut handle: *mut LampsimEnsemble = ptr::null_mut();
    let status = lampsim_run_builtin(config, scenario.as_ptr(), &mut handle);
    assert_eq!(status, LampsimStatus::Ok, "{}", last_error());
    assert!(!handle.is_null());

    assert_eq!(lampsim_ensemble_runs(handle), 3);
    let months = lampsim_ensemble_months(handle) as usize;
    assert_eq!(months, 36);

    let mut mean = vec![0.0f64; months];
    assert_eq!(
        lampsim_ensemble_adoption_mean(handle, mean.as_mut_ptr(), mean.len()),
        LampsimStatus::Ok
    );
    assert!(mean.iter().all(|v| (0.0..=1.0).contains(v)));

    let mut std = vec![0.0f64; months];
    assert_eq!(
        lampsim_ensemble_adoption_std(handle, std.as_mut_ptr(), std.len()),
        LampsimStatus::Ok
    );
    assert!(std.iter().all(|v| *v >= 0.0));

    let mut run0 = vec![0.0f64; months];
    assert_eq!(
        lampsim_ensemble_run_adoption(handle, 0, run0.as_mut_ptr(), run0.len()),
        LampsimStatus::Ok
    );

    let mut final_mean = 0.0;
    assert_eq!(lampsim_ensemble_final_mean(handle, &mut final_mean), LampsimStatus::Ok);
    assert!((0.0..=1.0).contains(&final_mean));

    let (mut led, mut inc, mut innov) = (0.0, 0.0, 0.0);
    assert_eq!(
        lampsim_ensemble_factors(handle, 2, &mut led, &mut inc, &mut innov),
        LampsimStatus::Ok
    );
    for f in [led, inc, innov] {
        assert!((0.5..=2.0).contains(&f));
    }

    lampsim_ensemble_free(handle);
    lampsim_config_free(config);
}

#[test]
fn determinism_across_handles() {
    let series = |seed: u64| -> Vec<f64> {
        let config = small_config();
        lampsim_config_set_seed(config, seed);
        let scenario = CString::new("soft_ban").unwrap();
        let mut handle: *mut LampsimEnsemble = ptr::null_mut();
        assert_eq!(
            lampsim_run_builtin(config, scenario.as_ptr(), &mut handle),
            LampsimStatus::Ok
        );
        let months = lampsim_ensemble_months(handle) as usize;
        let mut mean = vec![0.0f64; months];
        lampsim_ensemble_adoption_mean(handle, mean.as_mut_ptr(), mean.len());
        lampsim_ensemble_free(handle);
        lampsim_config_free(config);
        mean
    };
    assert_eq!(series(7), series(7));
    assert_ne!(series(7), series(8));
}

#[test]
fn unknown_scenario_reports_config_error() {
    let config = small_config();
    let scenario = CString::new("no_such").unwrap();
    let mut handle: *mut LampsimEnsemble = ptr::null_mut();
    let status = lampsim_run_builtin(config, scenario.as_ptr(), &mut handle);
    assert_eq!(status, LampsimStatus::Config);
    assert!(handle.is_null());
    let message = last_error();
    assert!(message.contains("no_such"), "{message}");
    assert!(message.contains("hard_ban"), "should list valid ids: {message}");
    lampsim_config_free(config);
}

#[test]
fn null_arguments_are_rejected() {
    let mut handle: *mut LampsimEnsemble = ptr::null_mut();
    let scenario = CString::new("hard_ban").unwrap();
    assert_eq!(
        lampsim_run_builtin(ptr::null(), scenario.as_ptr(), &mut handle),
        LampsimStatus::NullArgument
    );
    let config = small_config();
    assert_eq!(
        lampsim_run_builtin(config, ptr::null(), &mut handle),
        LampsimStatus::NullArgument
    );
    assert_eq!(
        lampsim_run_builtin(config, scenario.as_ptr(), ptr::null_mut()),
        LampsimStatus::NullArgument
    );
    // Undersized output buffer.
    let mut out: *mut LampsimEnsemble = ptr::null_mut();
    assert_eq!(lampsim_run_builtin(config, scenario.as_ptr(), &mut out), LampsimStatus::Ok);
    let mut too_small = vec![0.0f64; 2];
    assert_eq!(
        lampsim_ensemble_adoption_mean(out, too_small.as_mut_ptr(), too_small.len()),
        LampsimStatus::InvalidArgument
    );
    lampsim_ensemble_free(out);
    lampsim_config_free(config);
}

#[test]
fn scenario_json_and_config_json() {
    let config = small_config();
    let cfg_json = CString::new(r#"{"runs": 2, "dynamics": {"social_sample_size": 4}}"#).unwrap();
    assert_eq!(lampsim_config_load_json(config, cfg_json.as_ptr()), LampsimStatus::Ok);

    let bad = CString::new(r#"{"surprise": true}"#).unwrap();
    assert_eq!(lampsim_config_load_json(config, bad.as_ptr()), LampsimStatus::Config);

    let scenario_json = CString::new(
        r#"{"id": "led_subsidy", "price": [{"type": "led", "from": 2010, "to": 2014, "rate": -0.05}]}"#,
    )
    .unwrap();
    let mut handle: *mut LampsimEnsemble = ptr::null_mut();
    let status = lampsim_run_scenario_json(config, scenario_json.as_ptr(), &mut handle);
    assert_eq!(status, LampsimStatus::Ok, "{}", last_error());
    assert_eq!(lampsim_ensemble_runs(handle), 2);
    lampsim_ensemble_free(handle);
    lampsim_config_free(config);
}

#[test]
fn exports_write_files() {
    let dir = std::env::temp_dir().join(format!("lampsim_capi_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config = small_config();
    let scenario = CString::new("soft_ban").unwrap();
    let mut handle: *mut LampsimEnsemble = ptr::null_mut();
    assert_eq!(lampsim_run_builtin(config, scenario.as_ptr(), &mut handle), LampsimStatus::Ok);

    let csv_path = CString::new(dir.join("out.csv").to_str().unwrap()).unwrap();
    assert_eq!(lampsim_ensemble_write_csv(handle, csv_path.as_ptr()), LampsimStatus::Ok);
    let json_path = CString::new(dir.join("summary.json").to_str().unwrap()).unwrap();
    assert_eq!(
        lampsim_ensemble_write_summary_json(handle, json_path.as_ptr()),
        LampsimStatus::Ok
    );
    let svg_path = CString::new(dir.join("adoption.svg").to_str().unwrap()).unwrap();
    assert_eq!(
        lampsim_ensemble_write_adoption_svg(handle, svg_path.as_ptr()),
        LampsimStatus::Ok
    );

    let csv = std::fs::read_to_string(dir.join("out.csv")).unwrap();
    assert!(csv.starts_with("scenario,run,month,adoption,rep,imi,del,soc\n"));
    assert_eq!(csv.lines().count(), 1 + 3 * 36);
    let json = std::fs::read_to_string(dir.join("summary.json")).unwrap();
    assert!(json.contains("\"scenario\": \"soft_ban\""));
    let svg = std::fs::read_to_string(dir.join("adoption.svg")).unwrap();
    assert!(svg.starts_with("<svg"));

    lampsim_ensemble_free(handle);
    lampsim_config_free(config);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn generated_header_exists_and_names_the_api() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/lampsim.h");
    let text = std::fs::read_to_string(header).expect("cbindgen header");
    for symbol in [
        "lampsim_config_new",
        "lampsim_run_builtin",
        "lampsim_ensemble_adoption_mean",
        "lampsim_last_error_message",
        "LampsimStatus",
    ] {
        assert!(text.contains(symbol), "{symbol} missing from header");
    }
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(lampsim_version()) };
    assert!(!v.to_str().unwrap().is_empty());
}
