//! Acceptance suite: full-scale checks of the headline results, one test
//! per criterion, each printing a PASS/FAIL line.
//!
//! The five scenario ensembles run once at the shipped defaults
//! (1000 agents x 50 runs x 240 months, master seed 42) and are shared
//! across criteria. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines.

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lampsim::agents::{
    default_archetypes, draw_lifetime, instantiate_population, satisfaction, Agent,
    PropertyWeights, SatisfactionParams, SocialContext,
};
use lampsim::behavior::{select_strategy, BehaviorThresholds, Strategy};
use lampsim::engine::{
    run_ensemble, run_simulation_with_inspector, RunResult, SimulationConfig,
};
use lampsim::export::ensemble_csv;
use lampsim::market::{
    effective_efficiency, effective_price, Catalog, LampType, MarketState, RunFactors,
};
use lampsim::metrics::{spearman, EnsembleStats};
use lampsim::scenarios::{builtin, ScenarioId};

const BAN_MONTH: usize = 108; // January 2015
const SATURATION_DEADLINE: usize = BAN_MONTH + 24;

struct SharedEnsembles {
    results: HashMap<&'static str, Vec<RunResult>>,
    stats: HashMap<&'static str, EnsembleStats>,
}

fn ensembles() -> &'static SharedEnsembles {
    static SHARED: OnceLock<SharedEnsembles> = OnceLock::new();
    SHARED.get_or_init(|| {
        let config = SimulationConfig::default();
        let mut results = HashMap::new();
        let mut stats = HashMap::new();
        for id in ScenarioId::ALL {
            let scenario = builtin(id);
            let runs = run_ensemble(&scenario, &config).expect("ensemble runs");
            let s = EnsembleStats::from_runs(id.as_str(), &runs).expect("stats");
            results.insert(id.as_str(), runs);
            stats.insert(id.as_str(), s);
        }
        SharedEnsembles { results, stats }
    })
}

fn final_mean(scenario: &str) -> f64 {
    ensembles().stats[scenario].final_mean()
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {:<28} {} ({})",
        criterion,
        if pass { "PASS" } else { "FAIL" },
        detail
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_01_scenario_ordering() {
    let hard = final_mean("hard_ban");
    let combo = final_mean("soft_ban_info");
    let soft = final_mean("soft_ban");
    let info = final_mean("info_campaign");
    let none = final_mean("no_regulation");
    let pass = hard == 1.0 && hard > combo && combo >= soft && soft > info && info > none;
    report(
        "1 (scenario ordering)",
        pass,
        &format!(
            "hard {hard:.4} > combo {combo:.4} >= soft {soft:.4} > info {info:.4} > none {none:.4}"
        ),
    );
}

#[test]
fn criterion_02_hard_ban_saturation() {
    let stats = &ensembles().stats["hard_ban"];
    let runs = &ensembles().results["hard_ban"];
    let all_saturate =
        runs.iter().all(|r| r.adoption[..=SATURATION_DEADLINE].contains(&1.0));
    let latest: usize = runs
        .iter()
        .map(|r| r.adoption.iter().position(|&a| a == 1.0).unwrap_or(usize::MAX))
        .max()
        .unwrap();
    // Dispersion around the saturation point: std below 0.02 from the first
    // month the ensemble mean reaches 0.99.
    let sat_month = stats.adoption_mean.iter().position(|&m| m >= 0.99).unwrap_or(usize::MAX);
    let low_std = sat_month != usize::MAX
        && stats.adoption_std[sat_month..].iter().all(|&s| s < 0.02);
    report(
        "2 (hard-ban saturation)",
        all_saturate && low_std,
        &format!(
            "every run at 1.0 by month {latest} (deadline {SATURATION_DEADLINE}); std < 0.02 from month {sat_month}"
        ),
    );
}

#[test]
fn criterion_03_no_regulation_stagnation() {
    let none = final_mean("no_regulation");
    report(
        "3 (no-regulation stagnation)",
        none < 0.50 + 0.05,
        &format!("mean adoption Dec 2025 = {none:.4} (< 0.55; target < 0.50)"),
    );
}

#[test]
fn criterion_04_soft_ban_level() {
    let soft = final_mean("soft_ban");
    report(
        "4 (soft-ban level)",
        (0.65..=0.85).contains(&soft),
        &format!("mean adoption Dec 2025 = {soft:.4} (0.75 +- 0.10)"),
    );
}

#[test]
fn criterion_05_information_campaign_lift() {
    let lift = final_mean("info_campaign") - final_mean("no_regulation");
    report(
        "5 (information-campaign lift)",
        lift >= 0.10,
        &format!("lift over no_regulation = {lift:.4} (>= 0.10, paired master seed)"),
    );
}

#[test]
fn criterion_06_combination_subadditivity() {
    let gap = final_mean("soft_ban_info") - final_mean("soft_ban");
    let lift = final_mean("info_campaign") - final_mean("no_regulation");
    let pass = (0.0..=0.10).contains(&gap) && gap < lift;
    report(
        "6 (combination sub-additivity)",
        pass,
        &format!("combo - soft = {gap:.4} in [0, 0.10] and < info lift {lift:.4}"),
    );
}

#[test]
fn criterion_07_behavior_dynamics() {
    let hard = &ensembles().stats["hard_ban"];
    let del: Vec<f64> = hard.strategy_share_mean.iter().map(|m| m[Strategy::Deliberation.index()]).collect();
    let trailing = del[BAN_MONTH - 12..BAN_MONTH].iter().sum::<f64>() / 12.0;
    let spike = del[BAN_MONTH] >= 2.0 * trailing;

    let social: Vec<f64> = hard
        .strategy_share_mean
        .iter()
        .map(|m| m[Strategy::Imitation.index()] + m[Strategy::SocialComparison.index()])
        .collect();
    let pre = social[BAN_MONTH - 12..BAN_MONTH].iter().sum::<f64>() / 12.0;
    let post = social[BAN_MONTH + 1..=SATURATION_DEADLINE].iter().sum::<f64>() / 24.0;
    let elevated = post > pre;

    let none = &ensembles().stats["no_regulation"];
    let months = none.strategy_share_mean.len() as f64;
    let mean_share = |s: Strategy| {
        none.strategy_share_mean.iter().map(|m| m[s.index()]).sum::<f64>() / months
    };
    let rep = mean_share(Strategy::Repetition);
    let modal = [Strategy::Imitation, Strategy::Deliberation, Strategy::SocialComparison]
        .into_iter()
        .all(|s| rep > mean_share(s));

    report(
        "7 (behavior dynamics)",
        spike && elevated && modal,
        &format!(
            "deliberation {:.3} >= 2x trailing {:.3}; imitation+social post {post:.3} > pre {pre:.3}; repetition modal ({rep:.3})",
            del[BAN_MONTH], trailing
        ),
    );
}

#[test]
fn criterion_08_formula_oracles() {
    // Independent closed forms, written out from the stated schedules.
    let catalog = Catalog::default();
    let soft = builtin(ScenarioId::SoftBan);
    let hard = builtin(ScenarioId::HardBan);
    let none = builtin(ScenarioId::NoRegulation);
    let grid = [0.5, 1.0, 2.0];
    let mut worst: f64 = 0.0;
    let mut cases = 0u32;
    for model in &catalog.models {
        for year in 2006..=2025 {
            for &m_led in &grid {
                for &m_inc in &grid {
                    for &m_innov in &grid {
                        let factors = RunFactors {
                            led_price_factor: m_led,
                            incandescent_price_factor: m_inc,
                            led_innovation_factor: m_innov,
                        };
                        let led_decline = |price: f64| {
                            let k = (year - 2006).clamp(0, 13);
                            price * (1.0 - 0.10 * m_led).powi(k)
                        };
                        // No regulation: only the built-in LED decline.
                        let oracle_none = if model.lamp_type == LampType::Led {
                            led_decline(model.base_price)
                        } else {
                            model.base_price
                        };
                        // Soft ban: +10% per January 2013..=2018 for incandescent.
                        let oracle_soft = match model.lamp_type {
                            LampType::Incandescent => {
                                let j = (year - 2012).clamp(0, 6);
                                model.base_price * (1.0 + 0.10 * m_inc).powi(j)
                            }
                            LampType::Led => led_decline(model.base_price),
                            LampType::Cfl => model.base_price,
                        };
                        // Hard ban: +20% per January 2012..=2014.
                        let oracle_hard = match model.lamp_type {
                            LampType::Incandescent => {
                                let j = (year - 2011).clamp(0, 3);
                                model.base_price * (1.0 + 0.20 * m_inc).powi(j)
                            }
                            LampType::Led => led_decline(model.base_price),
                            LampType::Cfl => model.base_price,
                        };
                        let oracle_eff = if model.lamp_type == LampType::Led {
                            let k = (year - 2006).clamp(0, 14);
                            (model.base_efficiency * (1.0 + 0.05 * m_innov).powi(k)).min(0.99)
                        } else {
                            model.base_efficiency
                        };
                        for (scenario, oracle) in
                            [(&none, oracle_none), (&soft, oracle_soft), (&hard, oracle_hard)]
                        {
                            let got = effective_price(model, year, scenario, &factors);
                            worst = worst.max((got - oracle).abs() / oracle.abs().max(1e-300));
                        }
                        let got_eff = effective_efficiency(model, year, &factors);
                        worst = worst.max((got_eff - oracle_eff).abs() / oracle_eff.abs());
                        cases += 4;
                    }
                }
            }
        }
    }
    let prices_ok = worst <= 1e-9;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 100_000;
    let draws: Vec<f64> = (0..n).map(|_| draw_lifetime(125.0, &mut rng)).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let std = (draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let lifetime_ok = (mean - 125.0).abs() < 1.0 && (std - 25.0).abs() < 1.0;

    report(
        "8 (formula oracles)",
        prices_ok && lifetime_ok,
        &format!(
            "{cases} closed-form cases, worst rel err {worst:.2e} <= 1e-9; lifetime mean {mean:.2}, std {std:.2}"
        ),
    );
}

#[test]
fn criterion_09_determinism() {
    let scenario = builtin(ScenarioId::SoftBan);
    let config = SimulationConfig { n_agents: 300, runs: 10, ..SimulationConfig::default() };
    let serial_pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let wide_pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let csv_a = ensemble_csv(
        &scenario.id,
        &serial_pool.install(|| run_ensemble(&scenario, &config).unwrap()),
    );
    let csv_b = ensemble_csv(
        &scenario.id,
        &serial_pool.install(|| run_ensemble(&scenario, &config).unwrap()),
    );
    let csv_jobs = ensemble_csv(
        &scenario.id,
        &wide_pool.install(|| run_ensemble(&scenario, &config).unwrap()),
    );
    let pass = csv_a == csv_b && csv_a == csv_jobs;
    report(
        "9 (determinism)",
        pass,
        &format!(
            "rerun identical: {}; jobs-count invariant: {} ({} bytes)",
            csv_a == csv_b,
            csv_a == csv_jobs,
            csv_a.len()
        ),
    );
}

#[test]
fn criterion_10_sensitivity() {
    let runs = &ensembles().results["soft_ban"];
    let outcome: Vec<f64> = runs.iter().map(|r| *r.adoption.last().unwrap()).collect();
    let led: Vec<f64> = runs.iter().map(|r| r.factors.led_price_factor).collect();
    let inc: Vec<f64> = runs.iter().map(|r| r.factors.incandescent_price_factor).collect();
    let innov: Vec<f64> = runs.iter().map(|r| r.factors.led_innovation_factor).collect();
    let rho_led = spearman(&led, &outcome);
    let rho_inc = spearman(&inc, &outcome);
    let rho_innov = spearman(&innov, &outcome);
    let pass = match (rho_led, rho_inc, rho_innov) {
        (Some(l), Some(i), Some(n)) => l.abs() > n.abs() && i.abs() > n.abs(),
        (Some(_), Some(_), None) => true,
        _ => false,
    };
    report(
        "10 (pricing-factor dominance)",
        pass,
        &format!(
            "|rho| led {:.3}, incandescent {:.3} both > innovation {:.3}",
            rho_led.unwrap_or(f64::NAN).abs(),
            rho_inc.unwrap_or(f64::NAN).abs(),
            rho_innov.map_or(0.0, f64::abs)
        ),
    );
}

#[test]
fn criterion_11_property_suite() {
    let mut violations = 0u64;

    // Inventory conservation over a full audited hard-ban run.
    let config = SimulationConfig { n_agents: 200, ..SimulationConfig::default() };
    run_simulation_with_inspector(&builtin(ScenarioId::HardBan), &config, 0, |view| {
        for agent in &view.population.agents {
            if agent.inventory.len() != agent.preferences.lamps_needed as usize {
                violations += 1;
            }
        }
    })
    .unwrap();

    // Exhaustive strategy quadrant scan at 0.01 resolution.
    let thresholds = BehaviorThresholds::default();
    let mut seen = [false; 4];
    for i in 0..=100u32 {
        for j in 0..=100u32 {
            let sat = f64::from(i) / 100.0;
            let cert = f64::from(j) / 100.0;
            let strategy = select_strategy(sat, cert, &thresholds);
            seen[strategy.index()] = true;
            let expected = match (
                sat >= thresholds.satisfaction_threshold,
                cert >= thresholds.certainty_threshold,
            ) {
                (true, true) => Strategy::Repetition,
                (true, false) => Strategy::Imitation,
                (false, true) => Strategy::Deliberation,
                (false, false) => Strategy::SocialComparison,
            };
            if strategy != expected {
                violations += 1;
            }
        }
    }
    if seen != [true; 4] {
        violations += 1;
    }

    // Randomized cases: satisfaction range, argmax invariance under global
    // weight rescaling, and jitter containment.
    let catalog = Catalog::default();
    let archetypes = default_archetypes();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let params = SatisfactionParams::default();
    let scenario = builtin(ScenarioId::SoftBan);
    for case in 0..10_000u32 {
        let factors = RunFactors {
            led_price_factor: rng.gen_range(0.5..=2.0),
            incandescent_price_factor: rng.gen_range(0.5..=2.0),
            led_innovation_factor: rng.gen_range(0.5..=2.0),
        };
        let month = rng.gen_range(0..240);
        let state = MarketState::compute(&catalog, &scenario, &factors, month);
        let agent = random_agent(&archetypes, &catalog, &state, &mut rng);
        let modal: Vec<LampType> =
            (0..3).map(|_| LampType::ALL[rng.gen_range(0..3)]).collect();
        let ctx = SocialContext::from_modal_types(&modal);

        let model = rng.gen_range(0..catalog.len());
        let s = satisfaction(&agent, model, &state, &catalog, &ctx, &params).unwrap();
        if !(0.0..=1.0).contains(&s) {
            violations += 1;
        }

        if case % 10 == 0 {
            let scale = rng.gen_range(0.1..=10.0);
            let scaled = SatisfactionParams {
                weights: PropertyWeights {
                    price: params.weights.price * scale,
                    efficiency: params.weights.efficiency * scale,
                    colour: params.weights.colour * scale,
                    ramp_up: params.weights.ramp_up * scale,
                    lifetime: params.weights.lifetime * scale,
                },
                ..params
            };
            let argmax = |p: &SatisfactionParams| -> usize {
                let mut best = (0usize, f64::NEG_INFINITY);
                for id in 0..catalog.len() {
                    let v = satisfaction(&agent, id, &state, &catalog, &ctx, p).unwrap();
                    if v > best.1 {
                        best = (id, v);
                    }
                }
                best.0
            };
            if argmax(&params) != argmax(&scaled) {
                violations += 1;
            }
        }
    }

    // Jitter containment over 1e5 instantiated agents' fields.
    let state0 = MarketState::compute(&catalog, &scenario, &RunFactors::NEUTRAL, 0);
    let mut inst = ChaCha8Rng::seed_from_u64(5);
    let mut life = ChaCha8Rng::seed_from_u64(6);
    let pop = instantiate_population(
        &archetypes,
        10_000,
        &mut inst,
        &mut life,
        &catalog,
        &state0,
        &params,
    )
    .unwrap();
    let mut fields_checked = 0u64;
    for agent in &pop.agents {
        let source = &archetypes[agent.archetype_index];
        let pairs = [
            (agent.preferences.functional_tolerance, source.functional_tolerance),
            (agent.preferences.colour_tolerance, source.colour_tolerance),
            (agent.preferences.financial_energy_focus, source.financial_energy_focus),
            (agent.preferences.environmental_energy_focus, source.environmental_energy_focus),
            (agent.preferences.social_mindedness, source.social_mindedness),
            (agent.preferences.social_agreeability, source.social_agreeability),
            (
                agent.preferences.baseline_satisfaction_incandescent,
                source.baseline_satisfaction_incandescent,
            ),
            (agent.preferences.baseline_satisfaction_cfl, source.baseline_satisfaction_cfl),
            (agent.preferences.baseline_satisfaction_led, source.baseline_satisfaction_led),
            (agent.preferences.reserved_11th, source.reserved_11th),
        ];
        for (jittered, v) in pairs {
            fields_checked += 1;
            if v > 0.0 {
                if !(jittered > 0.95 * v && jittered < 1.05 * v) {
                    violations += 1;
                }
            } else if jittered != 0.0 {
                violations += 1;
            }
        }
    }

    report(
        "11 (property suite)",
        violations == 0,
        &format!("0 violations required, found {violations} ({fields_checked} jittered fields)"),
    );
}

fn random_agent(
    archetypes: &[lampsim::agents::Archetype],
    catalog: &Catalog,
    state: &MarketState,
    rng: &mut ChaCha8Rng,
) -> Agent {
    let mut inst = ChaCha8Rng::seed_from_u64(rng.gen());
    let mut life = ChaCha8Rng::seed_from_u64(rng.gen());
    let mut pop = instantiate_population(
        archetypes,
        1,
        &mut inst,
        &mut life,
        catalog,
        state,
        &SatisfactionParams::default(),
    )
    .expect("soft-ban market always has available models");
    let mut agent = pop.agents.pop().unwrap();
    agent.certainty = rng.gen_range(0.0..=1.0);
    agent.experience =
        [rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0)];
    agent
}
