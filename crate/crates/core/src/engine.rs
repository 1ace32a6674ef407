//! Monthly discrete-time scheduler and Monte Carlo ensemble execution.
//!
//! A run is a pure function of `(master_seed, scenario, config, run_index)`.
//! Month 0 records the freshly instantiated population; every later month
//! updates the market, applies due scenario interventions, settles the
//! previous month's experience/certainty updates, ages every lamp by one
//! month and lets agents replace whatever broke, in a freshly shuffled
//! order. Social behaviors read the previous month's inventories.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{
    default_archetypes, draw_lifetime, instantiate_population, inventory_satisfaction,
    satisfaction, update_after_replacement, Agent, Archetype, DynamicsParams, LampInstance,
    Population, SatisfactionParams, SocialContext,
};
use crate::behavior::{
    deliberation, imitation, repetition, select_similar_peer, select_strategy, social_comparison,
    BehaviorThresholds, PurchaseDecision, Strategy,
};
use crate::error::{Error, Result};
use crate::market::{january_of, Catalog, LampType, MarketState, RunFactors, HORIZON_MONTHS};
use crate::metrics::adoption_share;
use crate::rng::{run_seed, RunStreams};
use crate::scenarios::{apply_preference_intervention, Scenario};

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub n_agents: u32,
    /// Number of recorded months including the initial snapshot (<= 240).
    pub months: u32,
    pub runs: u32,
    pub master_seed: u64,
    pub thresholds: BehaviorThresholds,
    pub satisfaction: SatisfactionParams,
    pub dynamics: DynamicsParams,
    pub catalog: Catalog,
    pub archetypes: Vec<Archetype>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            n_agents: 1000,
            months: HORIZON_MONTHS,
            runs: 50,
            master_seed: 42,
            thresholds: BehaviorThresholds::default(),
            satisfaction: SatisfactionParams::default(),
            dynamics: DynamicsParams::default(),
            catalog: Catalog::default(),
            archetypes: default_archetypes(),
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_agents < 2 {
            return Err(Error::Config("n_agents must be >= 2".into()));
        }
        if self.runs < 1 {
            return Err(Error::Config("runs must be >= 1".into()));
        }
        if self.months < 1 || self.months > HORIZON_MONTHS {
            return Err(Error::Config(format!("months must be in 1..={HORIZON_MONTHS}")));
        }
        if self.catalog.is_empty() {
            return Err(Error::Config("catalog must not be empty".into()));
        }
        if self.archetypes.is_empty() {
            return Err(Error::Config("archetype set must not be empty".into()));
        }
        for a in &self.archetypes {
            a.validate()?;
        }
        let t = &self.thresholds;
        if !(0.0..=1.0).contains(&t.satisfaction_threshold)
            || !(0.0..=1.0).contains(&t.certainty_threshold)
        {
            return Err(Error::Config("strategy thresholds must be in [0, 1]".into()));
        }
        if t.loosening_factor <= 1.0 {
            return Err(Error::Config("loosening_factor must be > 1".into()));
        }
        if t.initial_similarity_threshold < 0.0 {
            return Err(Error::Config("initial_similarity_threshold must be >= 0".into()));
        }
        let w = &self.satisfaction.weights;
        let weights = [w.price, w.efficiency, w.colour, w.ramp_up, w.lifetime];
        if weights.iter().any(|&x| x < 0.0 || !x.is_finite()) || weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::Config("property weights must be >= 0 with a positive sum".into()));
        }
        for (name, v) in [
            ("experience_blend", self.satisfaction.experience_blend),
            ("social_scale", self.satisfaction.social_scale),
            ("experience_rate", self.dynamics.experience_rate),
            ("certainty_rate", self.dynamics.certainty_rate),
            ("unavailable_certainty_penalty", self.dynamics.unavailable_certainty_penalty),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must be in [0, 1]")));
            }
        }
        if self.satisfaction.social_sample_size < 1 {
            return Err(Error::Config("social_sample_size must be >= 1".into()));
        }
        Ok(())
    }
}

/// Time series produced by a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub run_index: u32,
    pub run_seed: u64,
    pub factors: RunFactors,
    /// Non-incandescent share of all owned lamps, one entry per month.
    pub adoption: Vec<f64>,
    /// Replacement events per executed strategy, one entry per month,
    /// indexed by `Strategy::index()`.
    pub strategy_counts: Vec<[u32; 4]>,
    /// Purchases per lamp type, one entry per month, indexed by
    /// `LampType::index()`.
    pub purchases_by_type: Vec<[u32; 3]>,
}

impl RunResult {
    /// Normalized strategy shares for one month; months without events
    /// yield the all-zero sentinel.
    pub fn strategy_shares(&self, month: usize) -> [f64; 4] {
        crate::metrics::strategy_shares(&self.strategy_counts[month])
    }
}

/// One replacement event, visible to inspectors.
#[derive(Debug, Clone, Copy)]
pub struct ReplacementEvent {
    pub agent: u32,
    pub executed: Strategy,
    pub model_id: usize,
    pub repetition_target_unavailable: bool,
}

/// Month-end view handed to an inspector: the settled population, the
/// market and the replacement events of that month.
pub struct MonthView<'a> {
    pub month: u32,
    pub population: &'a Population,
    pub state: &'a MarketState,
    pub events: &'a [ReplacementEvent],
}

struct AgentSnapshot {
    distinct_models: Vec<usize>,
    modal_type: LampType,
}

fn snapshot_population(population: &Population, catalog: &Catalog) -> Vec<AgentSnapshot> {
    population
        .agents
        .iter()
        .map(|agent| {
            let mut distinct: Vec<usize> = Vec::with_capacity(4);
            for lamp in &agent.inventory {
                if !distinct.contains(&lamp.model_id) {
                    distinct.push(lamp.model_id);
                }
            }
            distinct.sort_unstable();
            AgentSnapshot { distinct_models: distinct, modal_type: agent.modal_type(catalog) }
        })
        .collect()
}

/// Draw `k` peers (with replacement, never the agent itself) and collect
/// their modal lamp types.
fn sample_social_context(
    snapshot: &[AgentSnapshot],
    self_index: usize,
    k: u32,
    rng: &mut impl Rng,
) -> SocialContext {
    let n = snapshot.len();
    if n < 2 {
        return SocialContext::empty();
    }
    let mut modal_types = Vec::with_capacity(k as usize);
    for _ in 0..k {
        let j = loop {
            let j = rng.gen_range(0..n);
            if j != self_index {
                break j;
            }
        };
        modal_types.push(snapshot[j].modal_type);
    }
    SocialContext::from_modal_types(&modal_types)
}

struct PendingUpdate {
    agent: usize,
    model_id: usize,
    expected: f64,
    repetition_target_unavailable: bool,
}

/// Execute one run. Identical inputs produce a bit-identical result.
pub fn run_simulation(
    scenario: &Scenario,
    config: &SimulationConfig,
    run_index: u32,
) -> Result<RunResult> {
    run_simulation_with_inspector(scenario, config, run_index, |_| {})
}

/// `run_simulation` with a month-end hook, used by audits and tests.
pub fn run_simulation_with_inspector(
    scenario: &Scenario,
    config: &SimulationConfig,
    run_index: u32,
    mut inspect: impl FnMut(MonthView<'_>),
) -> Result<RunResult> {
    config.validate()?;
    scenario.validate()?;
    let catalog = &config.catalog;
    let params = &config.satisfaction;
    let dynamics = &config.dynamics;
    let thresholds = &config.thresholds;

    let seed = run_seed(config.master_seed, &scenario.id, run_index);
    let mut streams = RunStreams::new(seed);
    let factors = RunFactors::sample(&mut streams.factors);

    let state0 = MarketState::compute(catalog, scenario, &factors, 0);
    let mut population = instantiate_population(
        &config.archetypes,
        config.n_agents,
        &mut streams.instantiation,
        &mut streams.lifetimes,
        catalog,
        &state0,
        params,
    )?;

    let months = config.months as usize;
    let mut adoption = Vec::with_capacity(months);
    let mut strategy_counts = Vec::with_capacity(months);
    let mut purchases_by_type = Vec::with_capacity(months);

    // Month 0 is the instantiation snapshot: no market activity yet.
    adoption.push(adoption_share(&population.agents, catalog)?);
    strategy_counts.push([0u32; 4]);
    purchases_by_type.push([0u32; 3]);
    let mut events: Vec<ReplacementEvent> = Vec::new();
    inspect(MonthView { month: 0, population: &population, state: &state0, events: &events });

    let mut snapshot = snapshot_population(&population, catalog);
    let mut pending: Vec<PendingUpdate> = Vec::new();
    let mut order: Vec<usize> = (0..population.agents.len()).collect();

    for month in 1..config.months {
        let state = MarketState::compute(catalog, scenario, &factors, month);

        for iv in &scenario.preference_interventions {
            if january_of(iv.year) == month {
                apply_preference_intervention(
                    population.agents.iter_mut().map(|a| &mut a.preferences),
                    iv,
                );
            }
        }

        // Settle last month's purchases: realized satisfaction under this
        // month's market feeds the experience and certainty updates.
        for update in pending.drain(..) {
            let social = sample_social_context(
                &snapshot,
                update.agent,
                params.social_sample_size,
                &mut streams.peers,
            );
            let agent = &population.agents[update.agent];
            let realized = satisfaction(agent, update.model_id, &state, catalog, &social, params)?;
            let lamp_type = catalog.models[update.model_id].lamp_type;
            update_after_replacement(
                &mut population.agents[update.agent],
                lamp_type,
                realized,
                update.expected,
                update.repetition_target_unavailable,
                dynamics,
            );
        }

        for agent in &mut population.agents {
            for lamp in &mut agent.inventory {
                lamp.remaining_lifetime -= 1.0;
            }
        }

        order.shuffle(&mut streams.shuffles);
        events.clear();
        let mut month_strategies = [0u32; 4];
        let mut month_purchases = [0u32; 3];

        for &i in &order {
            let broken: Vec<usize> = population.agents[i]
                .inventory
                .iter()
                .enumerate()
                .filter_map(|(pos, lamp)| (lamp.remaining_lifetime <= 0.0).then_some(pos))
                .collect();
            for pos in broken {
                let broken_model = population.agents[i].inventory[pos].model_id;
                let social = sample_social_context(
                    &snapshot,
                    i,
                    params.social_sample_size,
                    &mut streams.peers,
                );
                let (decision, expected) = {
                    let agent = &population.agents[i];
                    let current =
                        inventory_satisfaction(agent, &state, catalog, &social, params)?;
                    let selected = select_strategy(current, agent.certainty, thresholds);
                    let decision = execute_behavior(
                        selected,
                        agent,
                        i,
                        broken_model,
                        &population,
                        &snapshot,
                        &state,
                        catalog,
                        &social,
                        params,
                        thresholds,
                        &mut streams,
                    )?;
                    let expected =
                        satisfaction(agent, decision.model_id, &state, catalog, &social, params)?;
                    (decision, expected)
                };

                let lifetime =
                    draw_lifetime_for(catalog, decision.model_id, &mut streams.lifetimes);
                let agent = &mut population.agents[i];
                agent.inventory[pos] =
                    LampInstance { model_id: decision.model_id, remaining_lifetime: lifetime };
                agent.last_strategy = Some(decision.executed);

                month_strategies[decision.executed.index()] += 1;
                month_purchases[catalog.models[decision.model_id].lamp_type.index()] += 1;
                events.push(ReplacementEvent {
                    agent: i as u32,
                    executed: decision.executed,
                    model_id: decision.model_id,
                    repetition_target_unavailable: decision.repetition_target_unavailable,
                });
                pending.push(PendingUpdate {
                    agent: i,
                    model_id: decision.model_id,
                    expected,
                    repetition_target_unavailable: decision.repetition_target_unavailable,
                });
            }
        }

        // Inventory conservation: every breakage was matched by a purchase.
        for agent in &population.agents {
            debug_assert_eq!(agent.inventory.len(), agent.preferences.lamps_needed as usize);
            debug_assert!(agent.inventory.iter().all(|l| l.remaining_lifetime > 0.0));
        }

        adoption.push(adoption_share(&population.agents, catalog)?);
        strategy_counts.push(month_strategies);
        purchases_by_type.push(month_purchases);
        inspect(MonthView { month, population: &population, state: &state, events: &events });

        snapshot = snapshot_population(&population, catalog);
    }

    Ok(RunResult { run_index, run_seed: seed, factors, adoption, strategy_counts, purchases_by_type })
}

fn draw_lifetime_for(catalog: &Catalog, model_id: usize, rng: &mut impl Rng) -> f64 {
    draw_lifetime(catalog.models[model_id].mean_lifetime_months, rng)
}

#[allow(clippy::too_many_arguments)]
fn execute_behavior(
    selected: Strategy,
    agent: &Agent,
    agent_index: usize,
    broken_model: usize,
    population: &Population,
    snapshot: &[AgentSnapshot],
    state: &MarketState,
    catalog: &Catalog,
    social: &SocialContext,
    params: &SatisfactionParams,
    thresholds: &BehaviorThresholds,
    streams: &mut RunStreams,
) -> Result<PurchaseDecision> {
    let deliberate = || -> Result<PurchaseDecision> {
        let model_id = deliberation(agent, state, catalog, social, params)?;
        Ok(PurchaseDecision {
            model_id,
            executed: Strategy::Deliberation,
            repetition_target_unavailable: false,
        })
    };
    match selected {
        Strategy::Repetition => repetition(agent, broken_model, state, catalog, social, params),
        Strategy::Deliberation => deliberate(),
        Strategy::Imitation => {
            match select_similar_peer(agent_index, population, &mut streams.peers, thresholds) {
                Ok(peer) => {
                    imitation(&snapshot[peer].distinct_models, state, &mut streams.behavior)
                }
                Err(Error::NoPeer) => deliberate(),
                Err(other) => Err(other),
            }
        }
        Strategy::SocialComparison => {
            match select_similar_peer(agent_index, population, &mut streams.peers, thresholds) {
                Ok(peer) => social_comparison(
                    agent,
                    broken_model,
                    &snapshot[peer].distinct_models,
                    state,
                    catalog,
                    social,
                    params,
                ),
                Err(Error::NoPeer) => deliberate(),
                Err(other) => Err(other),
            }
        }
    }
}

/// Run the whole ensemble. Results come back ordered by run index no matter
/// how execution is scheduled; failures carry the run index.
pub fn run_ensemble(scenario: &Scenario, config: &SimulationConfig) -> Result<Vec<RunResult>> {
    config.validate()?;
    scenario.validate()?;
    (0..config.runs)
        .into_par_iter()
        .map(|run_index| {
            run_simulation(scenario, config, run_index)
                .map_err(|e| Error::Run { run_index, source: Box::new(e) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{self, ScenarioId};

    fn small_config() -> SimulationConfig {
        SimulationConfig { n_agents: 60, runs: 4, months: 120, ..SimulationConfig::default() }
    }

    #[test]
    fn identical_inputs_give_identical_results() {
        let scenario = scenarios::builtin(ScenarioId::SoftBan);
        let config = small_config();
        let a = run_simulation(&scenario, &config, 3).unwrap();
        let b = run_simulation(&scenario, &config, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_horizon_records_initial_share_only() {
        let scenario = scenarios::builtin(ScenarioId::NoRegulation);
        let config = SimulationConfig { months: 1, n_agents: 20, ..SimulationConfig::default() };
        let r = run_simulation(&scenario, &config, 0).unwrap();
        assert_eq!(r.adoption.len(), 1);
        assert_eq!(r.strategy_counts, vec![[0; 4]]);
    }

    #[test]
    fn ensemble_is_ordered_with_distinct_factors() {
        let scenario = scenarios::builtin(ScenarioId::NoRegulation);
        let config = small_config();
        let results = run_ensemble(&scenario, &config).unwrap();
        assert_eq!(results.len(), 4);
        for (k, r) in results.iter().enumerate() {
            assert_eq!(r.run_index, k as u32);
            assert_eq!(r.adoption.len(), 120);
        }
        let mut factor_triples: Vec<_> = results
            .iter()
            .map(|r| {
                (
                    r.factors.led_price_factor.to_bits(),
                    r.factors.incandescent_price_factor.to_bits(),
                    r.factors.led_innovation_factor.to_bits(),
                )
            })
            .collect();
        factor_triples.dedup();
        assert_eq!(factor_triples.len(), 4, "factor triples must differ across runs");
    }

    #[test]
    fn single_run_ensemble() {
        let scenario = scenarios::builtin(ScenarioId::NoRegulation);
        let config = SimulationConfig { runs: 1, ..small_config() };
        assert_eq!(run_ensemble(&scenario, &config).unwrap().len(), 1);
    }

    #[test]
    fn parallel_and_serial_execution_agree() {
        let scenario = scenarios::builtin(ScenarioId::HardBan);
        let config = small_config();
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_ensemble(&scenario, &config).unwrap());
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_ensemble(&scenario, &config).unwrap());
        assert_eq!(serial, parallel);
    }

    #[test]
    fn inventories_conserved_every_month() {
        let scenario = scenarios::builtin(ScenarioId::HardBan);
        let config = small_config();
        run_simulation_with_inspector(&scenario, &config, 0, |view| {
            for agent in &view.population.agents {
                assert_eq!(agent.inventory.len(), agent.preferences.lamps_needed as usize);
            }
        })
        .unwrap();
    }

    #[test]
    fn no_incandescent_purchases_after_hard_ban() {
        let scenario = scenarios::builtin(ScenarioId::HardBan);
        let config = SimulationConfig { months: 240, ..small_config() };
        let catalog = config.catalog.clone();
        let ban_month = january_of(2015);
        run_simulation_with_inspector(&scenario, &config, 1, |view| {
            if view.month >= ban_month {
                for ev in view.events {
                    assert_ne!(
                        catalog.models[ev.model_id].lamp_type,
                        LampType::Incandescent,
                        "incandescent bought at month {}",
                        view.month
                    );
                }
            }
        })
        .unwrap();
    }

    #[test]
    fn preference_interventions_fire_exactly_in_january() {
        let scenario = scenarios::builtin(ScenarioId::InfoCampaign);
        let config = SimulationConfig { n_agents: 50, months: 80, ..SimulationConfig::default() };
        let fire = january_of(2012);
        let mut before: Option<Vec<(f64, f64)>> = None;
        run_simulation_with_inspector(&scenario, &config, 0, |view| {
            let foci: Vec<(f64, f64)> = view
                .population
                .agents
                .iter()
                .map(|a| {
                    (a.preferences.financial_energy_focus, a.preferences.environmental_energy_focus)
                })
                .collect();
            match (&before, view.month) {
                (None, _) => before = Some(foci),
                (Some(b), m) if m < fire => assert_eq!(b, &foci, "changed early at month {m}"),
                (Some(b), _) => {
                    for ((f0, e0), (f1, e1)) in b.iter().zip(&foci) {
                        assert!((f1 - (f0 * 1.5).min(1.0)).abs() < 1e-12);
                        assert!((e1 - (e0 * 1.5).min(1.0)).abs() < 1e-12);
                    }
                }
            }
        })
        .unwrap();
    }

    #[test]
    fn strategy_counts_match_events() {
        let scenario = scenarios::builtin(ScenarioId::NoRegulation);
        let config = small_config();
        let mut per_month: Vec<[u32; 4]> = Vec::new();
        let result = run_simulation_with_inspector(&scenario, &config, 0, |view| {
            let mut counts = [0u32; 4];
            for ev in view.events {
                counts[ev.executed.index()] += 1;
            }
            per_month.push(counts);
        })
        .unwrap();
        assert_eq!(result.strategy_counts, per_month);
    }
}
