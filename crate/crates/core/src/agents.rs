//! Agent population: archetype-based instantiation, the satisfaction
//! function, peer distance, and the experience/certainty dynamics.
//!
//! Each agent is stamped from one of 87 empirical archetypes with ±5%
//! uniform jitter per field. The source study's raw archetypes are not
//! published, so the default set comes from a seeded generator with
//! documented distributions; a CSV import path accepts real data.

use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::behavior::Strategy;
use crate::error::{Error, Result};
use crate::market::{available_models, Catalog, LampType, MarketState};
use crate::scenarios::PreferenceField;

/// Maximum catalog base price; normalizes the price property score.
pub const PRICE_SCORE_NORM: f64 = 30.00;
/// Ramp-up times are scored against this ceiling (seconds).
pub const RAMP_UP_CAP_SECONDS: f64 = 120.0;
/// Lifetimes are scored against the longest catalog lifetime (months).
pub const LIFETIME_CAP_MONTHS: f64 = 208.0;

/// Seed of the default archetype set shipped with the simulator.
pub const DEFAULT_ARCHETYPE_SEED: u64 = 87;
/// Size of the default archetype set.
pub const DEFAULT_ARCHETYPE_COUNT: u32 = 87;

const ARCHETYPE_CSV_HEADER: &str =
    "lamps,func_tol,colour_tol,fin_focus,env_focus,soc_mind,soc_agree,base_inc,base_cfl,base_led,reserved";

/// An 11-dimensional consumer preference vector, the template agents are
/// stamped from.
#[derive(Debug, Clone, PartialEq)]
pub struct Archetype {
    pub lamps_needed: f64,
    pub functional_tolerance: f64,
    pub colour_tolerance: f64,
    pub financial_energy_focus: f64,
    pub environmental_energy_focus: f64,
    pub social_mindedness: f64,
    pub social_agreeability: f64,
    pub baseline_satisfaction_incandescent: f64,
    pub baseline_satisfaction_cfl: f64,
    pub baseline_satisfaction_led: f64,
    pub reserved_11th: f64,
}

impl Archetype {
    fn fractional_fields(&self) -> [f64; 10] {
        [
            self.functional_tolerance,
            self.colour_tolerance,
            self.financial_energy_focus,
            self.environmental_energy_focus,
            self.social_mindedness,
            self.social_agreeability,
            self.baseline_satisfaction_incandescent,
            self.baseline_satisfaction_cfl,
            self.baseline_satisfaction_led,
            self.reserved_11th,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if self.lamps_needed < 1.0 || !self.lamps_needed.is_finite() {
            return Err(Error::Config(format!("archetype lamps {} must be >= 1", self.lamps_needed)));
        }
        for (i, v) in self.fractional_fields().into_iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!(
                    "archetype field {} value {v} outside [0, 1]",
                    ARCHETYPE_CSV_HEADER.split(',').nth(i + 1).unwrap_or("?")
                )));
            }
        }
        Ok(())
    }
}

/// An agent's own preference vector: its archetype with ±5% jitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentPreferences {
    pub lamps_needed: u32,
    pub functional_tolerance: f64,
    pub colour_tolerance: f64,
    pub financial_energy_focus: f64,
    pub environmental_energy_focus: f64,
    pub social_mindedness: f64,
    pub social_agreeability: f64,
    pub baseline_satisfaction_incandescent: f64,
    pub baseline_satisfaction_cfl: f64,
    pub baseline_satisfaction_led: f64,
    pub reserved_11th: f64,
}

impl AgentPreferences {
    pub fn baseline(&self, lamp_type: LampType) -> f64 {
        match lamp_type {
            LampType::Incandescent => self.baseline_satisfaction_incandescent,
            LampType::Cfl => self.baseline_satisfaction_cfl,
            LampType::Led => self.baseline_satisfaction_led,
        }
    }

    pub fn field_mut(&mut self, field: PreferenceField) -> &mut f64 {
        match field {
            PreferenceField::FunctionalTolerance => &mut self.functional_tolerance,
            PreferenceField::ColourTolerance => &mut self.colour_tolerance,
            PreferenceField::FinancialEnergyFocus => &mut self.financial_energy_focus,
            PreferenceField::EnvironmentalEnergyFocus => &mut self.environmental_energy_focus,
            PreferenceField::SocialMindedness => &mut self.social_mindedness,
            PreferenceField::SocialAgreeability => &mut self.social_agreeability,
            PreferenceField::BaselineSatisfactionIncandescent => {
                &mut self.baseline_satisfaction_incandescent
            }
            PreferenceField::BaselineSatisfactionCfl => &mut self.baseline_satisfaction_cfl,
            PreferenceField::BaselineSatisfactionLed => &mut self.baseline_satisfaction_led,
            PreferenceField::Reserved11th => &mut self.reserved_11th,
        }
    }

    fn fractional_fields(&self) -> [f64; 10] {
        [
            self.functional_tolerance,
            self.colour_tolerance,
            self.financial_energy_focus,
            self.environmental_energy_focus,
            self.social_mindedness,
            self.social_agreeability,
            self.baseline_satisfaction_incandescent,
            self.baseline_satisfaction_cfl,
            self.baseline_satisfaction_led,
            self.reserved_11th,
        ]
    }

    #[cfg(test)]
    pub fn test_default() -> Self {
        AgentPreferences {
            lamps_needed: 25,
            functional_tolerance: 0.5,
            colour_tolerance: 0.5,
            financial_energy_focus: 0.5,
            environmental_energy_focus: 0.5,
            social_mindedness: 0.5,
            social_agreeability: 0.5,
            baseline_satisfaction_incandescent: 0.8,
            baseline_satisfaction_cfl: 0.45,
            baseline_satisfaction_led: 0.25,
            reserved_11th: 0.5,
        }
    }
}

/// One owned lamp. `remaining_lifetime` is real-valued months; the lamp is
/// broken once it reaches zero or below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LampInstance {
    pub model_id: usize,
    pub remaining_lifetime: f64,
}

#[derive(Debug, Clone)]
pub struct Agent {
    pub id: u32,
    pub archetype_index: usize,
    pub preferences: AgentPreferences,
    pub inventory: Vec<LampInstance>,
    /// Accumulated experience per lamp type, indexed by `LampType::index()`.
    pub experience: [f64; 3],
    pub certainty: f64,
    pub last_strategy: Option<Strategy>,
}

impl Agent {
    /// Most-owned lamp type; ties resolve to the lower type index.
    pub fn modal_type(&self, catalog: &Catalog) -> LampType {
        let mut counts = [0u32; 3];
        for lamp in &self.inventory {
            counts[catalog.models[lamp.model_id].lamp_type.index()] += 1;
        }
        let best = counts.iter().enumerate().max_by_key(|&(i, &c)| (c, std::cmp::Reverse(i)));
        LampType::ALL[best.map(|(i, _)| i).unwrap_or(0)]
    }
}

/// The instantiated agent set plus cached population-level quantities.
#[derive(Debug, Clone)]
pub struct Population {
    pub agents: Vec<Agent>,
    /// Maximum jittered `lamps_needed`; normalizes the peer distance.
    pub max_lamps_needed: f64,
}

/// Global relative importance of the five lamp properties before
/// agent-specific modulation. Calibration constants; the source study's
/// values are unpublished.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertyWeights {
    pub price: f64,
    pub efficiency: f64,
    pub colour: f64,
    pub ramp_up: f64,
    pub lifetime: f64,
}

impl Default for PropertyWeights {
    fn default() -> Self {
        PropertyWeights { price: 0.35, efficiency: 0.20, colour: 0.20, ramp_up: 0.15, lifetime: 0.10 }
    }
}

/// Parameters of the satisfaction function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatisfactionParams {
    pub weights: PropertyWeights,
    /// Weight of accumulated experience against the property score (beta).
    pub experience_blend: f64,
    /// Social term weight is `social_scale * social_mindedness` (sigma).
    pub social_scale: f64,
    /// Peers sampled per decision for the social term.
    pub social_sample_size: u32,
    /// Whether lifetime counts as the fifth property.
    pub include_lifetime: bool,
}

impl Default for SatisfactionParams {
    fn default() -> Self {
        SatisfactionParams {
            weights: PropertyWeights::default(),
            experience_blend: 0.1,
            social_scale: 0.45,
            social_sample_size: 3,
            include_lifetime: true,
        }
    }
}

/// Experience and certainty update rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsParams {
    /// Experience EMA rate (eta).
    pub experience_rate: f64,
    /// Certainty EMA rate (gamma).
    pub certainty_rate: f64,
    /// Certainty multiplier when the repetition target was unavailable.
    pub unavailable_certainty_penalty: f64,
}

impl Default for DynamicsParams {
    fn default() -> Self {
        DynamicsParams {
            experience_rate: 0.2,
            certainty_rate: 0.2,
            unavailable_certainty_penalty: 0.8,
        }
    }
}

/// Modal lamp types of a sampled set of peers, feeding the social term of
/// the satisfaction function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SocialContext {
    type_counts: [u32; 3],
    size: u32,
}

impl SocialContext {
    pub fn empty() -> Self {
        SocialContext::default()
    }

    pub fn from_modal_types(types: &[LampType]) -> Self {
        let mut ctx = SocialContext::default();
        for &t in types {
            ctx.type_counts[t.index()] += 1;
            ctx.size += 1;
        }
        ctx
    }

    /// Fraction of the sample whose modal owned type is `lamp_type`.
    /// An empty sample scores zero.
    pub fn score(&self, lamp_type: LampType) -> f64 {
        if self.size == 0 {
            0.0
        } else {
            f64::from(self.type_counts[lamp_type.index()]) / f64::from(self.size)
        }
    }
}

/// Property scores of one model under the given market state, each in
/// [0, 1]: price (cheaper is better), efficiency, colour fidelity, ramp-up
/// speed, lifetime.
pub fn property_scores(catalog: &Catalog, state: &MarketState, model_id: usize) -> Result<[f64; 5]> {
    let model = catalog.model(model_id)?;
    Ok([
        (1.0 - state.prices[model_id] / PRICE_SCORE_NORM).clamp(0.0, 1.0),
        state.efficiencies[model_id].clamp(0.0, 1.0),
        1.0 - model.colour_discrepancy,
        1.0 - model.ramp_up_seconds.min(RAMP_UP_CAP_SECONDS) / RAMP_UP_CAP_SECONDS,
        model.mean_lifetime_months.min(LIFETIME_CAP_MONTHS) / LIFETIME_CAP_MONTHS,
    ])
}

/// Agent-modulated property weights: price weight grows with financial
/// focus, efficiency weight with both energy foci, colour and ramp-up
/// weights shrink with the matching tolerances.
pub fn agent_weights(prefs: &AgentPreferences, params: &SatisfactionParams) -> [f64; 5] {
    let w = &params.weights;
    [
        w.price * (1.0 + prefs.financial_energy_focus),
        w.efficiency * (prefs.financial_energy_focus + prefs.environmental_energy_focus),
        w.colour * (1.0 - prefs.colour_tolerance),
        w.ramp_up * (1.0 - prefs.functional_tolerance),
        if params.include_lifetime { w.lifetime } else { 0.0 },
    ]
}

/// Weighted property score; a degenerate all-zero weight vector scores a
/// neutral 0.5.
pub fn personal_score(scores: &[f64; 5], weights: &[f64; 5]) -> f64 {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return 0.5;
    }
    let dot: f64 = scores.iter().zip(weights).map(|(s, w)| s * w).sum();
    dot / total
}

/// The full satisfaction an agent expects from a lamp model: personal
/// property score blended with accumulated experience for that lamp type,
/// then mixed with the social term.
pub fn satisfaction(
    agent: &Agent,
    model_id: usize,
    state: &MarketState,
    catalog: &Catalog,
    social: &SocialContext,
    params: &SatisfactionParams,
) -> Result<f64> {
    let scores = property_scores(catalog, state, model_id)?;
    let weights = agent_weights(&agent.preferences, params);
    let lamp_type = catalog.models[model_id].lamp_type;
    Ok(blend_satisfaction(
        personal_score(&scores, &weights),
        agent.experience[lamp_type.index()],
        social.score(lamp_type),
        &agent.preferences,
        params,
    ))
}

/// Blend a personal score with experience and the social term.
pub fn blend_satisfaction(
    personal: f64,
    experience: f64,
    social_score: f64,
    prefs: &AgentPreferences,
    params: &SatisfactionParams,
) -> f64 {
    let beta = params.experience_blend;
    let blended = beta * experience + (1.0 - beta) * personal;
    let sigma = (params.social_scale * prefs.social_mindedness).clamp(0.0, 1.0);
    ((1.0 - sigma) * blended + sigma * social_score).clamp(0.0, 1.0)
}

/// Mean satisfaction over the agent's current inventory, the quantity that
/// drives strategy selection.
pub fn inventory_satisfaction(
    agent: &Agent,
    state: &MarketState,
    catalog: &Catalog,
    social: &SocialContext,
    params: &SatisfactionParams,
) -> Result<f64> {
    if agent.inventory.is_empty() {
        return Ok(0.0);
    }
    // Group by model: inventories hold few distinct models.
    let mut distinct: Vec<(usize, u32)> = Vec::with_capacity(4);
    for lamp in &agent.inventory {
        match distinct.iter_mut().find(|(id, _)| *id == lamp.model_id) {
            Some((_, n)) => *n += 1,
            None => distinct.push((lamp.model_id, 1)),
        }
    }
    let mut total = 0.0;
    for &(model_id, n) in &distinct {
        total += f64::from(n) * satisfaction(agent, model_id, state, catalog, social, params)?;
    }
    Ok(total / agent.inventory.len() as f64)
}

/// L1 distance between two preference vectors over all 11 dimensions, with
/// `lamps_needed` normalized by the population maximum.
pub fn peer_distance(a: &AgentPreferences, b: &AgentPreferences, max_lamps_needed: f64) -> f64 {
    let lamps_term = if max_lamps_needed > 0.0 {
        (f64::from(a.lamps_needed) - f64::from(b.lamps_needed)).abs() / max_lamps_needed
    } else {
        0.0
    };
    let fields_a = a.fractional_fields();
    let fields_b = b.fractional_fields();
    lamps_term
        + fields_a
            .iter()
            .zip(&fields_b)
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>()
}

/// Post-purchase bookkeeping: experience of the purchased type moves toward
/// the realized satisfaction, certainty toward how well the outcome matched
/// the expectation. If the agent's repetition target was unavailable that
/// month, certainty takes a multiplicative penalty first.
pub fn update_after_replacement(
    agent: &mut Agent,
    chosen_type: LampType,
    realized_satisfaction: f64,
    expected_satisfaction: f64,
    repetition_target_unavailable: bool,
    dynamics: &DynamicsParams,
) {
    debug_assert!((0.0..=1.0).contains(&realized_satisfaction));
    debug_assert!((0.0..=1.0).contains(&expected_satisfaction));
    let eta = dynamics.experience_rate;
    let exp = &mut agent.experience[chosen_type.index()];
    *exp = ((1.0 - eta) * *exp + eta * realized_satisfaction).clamp(0.0, 1.0);

    let mut certainty = agent.certainty;
    if repetition_target_unavailable {
        certainty *= dynamics.unavailable_certainty_penalty;
    }
    let gamma = dynamics.certainty_rate;
    let accuracy = 1.0 - (realized_satisfaction - expected_satisfaction).abs();
    agent.certainty = ((1.0 - gamma) * certainty + gamma * accuracy).clamp(0.0, 1.0);
}

/// Draw a lamp lifetime from N(mean, mean/5), truncated below at half a
/// month.
pub fn draw_lifetime(mean_months: f64, rng: &mut impl Rng) -> f64 {
    let normal = Normal::new(mean_months, mean_months / 5.0).expect("valid lifetime distribution");
    for _ in 0..100 {
        let draw = normal.sample(rng);
        if draw >= 0.5 {
            return draw;
        }
    }
    0.5
}

/// Jitter one archetype field: uniform in (0.95 v, 1.05 v), clamped to
/// [lo, hi]. A zero field stays zero.
fn jitter(v: f64, lo: f64, hi: f64, rng: &mut impl Rng) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    let (a, b) = (0.95 * v, 1.05 * v);
    // Keep strictly inside the open interval.
    let mut out = rng.gen_range(a..b);
    while out <= a || out >= b {
        out = rng.gen_range(a..b);
    }
    out.clamp(lo, hi)
}

fn jitter_preferences(archetype: &Archetype, rng: &mut impl Rng) -> AgentPreferences {
    let lamps = jitter(archetype.lamps_needed, 1.0, f64::MAX, rng).round().max(1.0);
    AgentPreferences {
        lamps_needed: lamps as u32,
        functional_tolerance: jitter(archetype.functional_tolerance, 0.0, 1.0, rng),
        colour_tolerance: jitter(archetype.colour_tolerance, 0.0, 1.0, rng),
        financial_energy_focus: jitter(archetype.financial_energy_focus, 0.0, 1.0, rng),
        environmental_energy_focus: jitter(archetype.environmental_energy_focus, 0.0, 1.0, rng),
        social_mindedness: jitter(archetype.social_mindedness, 0.0, 1.0, rng),
        social_agreeability: jitter(archetype.social_agreeability, 0.0, 1.0, rng),
        baseline_satisfaction_incandescent: jitter(
            archetype.baseline_satisfaction_incandescent,
            0.0,
            1.0,
            rng,
        ),
        baseline_satisfaction_cfl: jitter(archetype.baseline_satisfaction_cfl, 0.0, 1.0, rng),
        baseline_satisfaction_led: jitter(archetype.baseline_satisfaction_led, 0.0, 1.0, rng),
        reserved_11th: jitter(archetype.reserved_11th, 0.0, 1.0, rng),
    }
}

/// Build the starting population. Each agent copies a uniformly chosen
/// archetype with per-field jitter; its initial lamps are drawn among the
/// types on sale at month 0 with probability proportional to the agent's
/// baseline satisfaction per type, taking the most satisfying model within
/// the chosen type. Initial lamps carry a uniformly random elapsed age so
/// the population does not start with a synchronized breakage wave.
pub fn instantiate_population(
    archetypes: &[Archetype],
    n: u32,
    instantiation_rng: &mut impl Rng,
    lifetimes_rng: &mut impl Rng,
    catalog: &Catalog,
    month0_state: &MarketState,
    params: &SatisfactionParams,
) -> Result<Population> {
    if archetypes.is_empty() {
        return Err(Error::Config("archetype set must not be empty".into()));
    }
    if n == 0 {
        return Err(Error::Config("population size must be >= 1".into()));
    }
    let open_ids = available_models(month0_state);
    if open_ids.is_empty() {
        return Err(Error::EmptyMarket { month: 0 });
    }
    // Best model per available type, chosen per agent further below.
    let mut type_models: [Vec<usize>; 3] = [vec![], vec![], vec![]];
    for &id in &open_ids {
        type_models[catalog.models[id].lamp_type.index()].push(id);
    }
    let open_types: Vec<LampType> = LampType::ALL
        .into_iter()
        .filter(|t| !type_models[t.index()].is_empty())
        .collect();

    let mut agents = Vec::with_capacity(n as usize);
    let mut max_lamps = 0.0f64;
    for id in 0..n {
        let archetype_index = instantiation_rng.gen_range(0..archetypes.len());
        let preferences = jitter_preferences(&archetypes[archetype_index], instantiation_rng);
        max_lamps = max_lamps.max(f64::from(preferences.lamps_needed));

        let experience = [
            preferences.baseline_satisfaction_incandescent,
            preferences.baseline_satisfaction_cfl,
            preferences.baseline_satisfaction_led,
        ];
        let weights = agent_weights(&preferences, params);
        // Most satisfying model within each type for this agent (no social
        // term exists yet at instantiation).
        let best_in_type: Vec<usize> = open_types
            .iter()
            .map(|t| {
                *type_models[t.index()]
                    .iter()
                    .min_by(|&&a, &&b| {
                        let score = |id: usize| {
                            let s = property_scores(catalog, month0_state, id).expect("open model");
                            let beta = params.experience_blend;
                            beta * experience[t.index()] + (1.0 - beta) * personal_score(&s, &weights)
                        };
                        score(b)
                            .partial_cmp(&score(a))
                            .unwrap()
                            .then_with(|| {
                                month0_state.prices[a].partial_cmp(&month0_state.prices[b]).unwrap()
                            })
                            .then_with(|| a.cmp(&b))
                    })
                    .expect("type has models")
            })
            .collect();

        let type_weights: Vec<f64> = open_types.iter().map(|&t| preferences.baseline(t)).collect();
        let weight_sum: f64 = type_weights.iter().sum();

        let mut inventory = Vec::with_capacity(preferences.lamps_needed as usize);
        for _ in 0..preferences.lamps_needed {
            let slot = if weight_sum > 0.0 {
                let mut pick = instantiation_rng.gen_range(0.0..weight_sum);
                let mut chosen = open_types.len() - 1;
                for (k, w) in type_weights.iter().enumerate() {
                    if pick < *w {
                        chosen = k;
                        break;
                    }
                    pick -= w;
                }
                chosen
            } else {
                instantiation_rng.gen_range(0..open_types.len())
            };
            let model_id = best_in_type[slot];
            let full = draw_lifetime(catalog.models[model_id].mean_lifetime_months, lifetimes_rng);
            let age_fraction: f64 = lifetimes_rng.gen_range(0.0..1.0);
            inventory.push(LampInstance { model_id, remaining_lifetime: full * age_fraction });
        }

        let mut agent = Agent {
            id,
            archetype_index,
            preferences,
            inventory,
            experience,
            certainty: 0.0,
            last_strategy: None,
        };
        let modal = agent.modal_type(catalog);
        agent.certainty = (0.5 + 0.5 * agent.preferences.baseline(modal)).clamp(0.0, 1.0);
        agents.push(agent);
    }
    Ok(Population { agents, max_lamps_needed: max_lamps })
}

/// Generate a synthetic archetype set with the documented distributions:
/// lamps uniform integer in [10, 40], tolerances/foci/social fields uniform
/// in [0, 1], baseline satisfactions uniform in [0.6, 1.0] (incandescent),
/// [0.2, 0.7] (CFL) and [0.0, 0.5] (LED).
pub fn generate_archetypes(count: u32, seed: u64) -> Vec<Archetype> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Archetype {
            lamps_needed: f64::from(rng.gen_range(10..=40u32)),
            functional_tolerance: rng.gen_range(0.0..=1.0),
            colour_tolerance: rng.gen_range(0.0..=1.0),
            financial_energy_focus: rng.gen_range(0.0..=1.0),
            environmental_energy_focus: rng.gen_range(0.0..=1.0),
            social_mindedness: rng.gen_range(0.0..=1.0),
            social_agreeability: rng.gen_range(0.0..=1.0),
            baseline_satisfaction_incandescent: rng.gen_range(0.6..=1.0),
            baseline_satisfaction_cfl: rng.gen_range(0.2..=0.7),
            baseline_satisfaction_led: rng.gen_range(0.0..=0.5),
            reserved_11th: rng.gen_range(0.0..=1.0),
        })
        .collect()
}

pub fn default_archetypes() -> Vec<Archetype> {
    generate_archetypes(DEFAULT_ARCHETYPE_COUNT, DEFAULT_ARCHETYPE_SEED)
}

pub fn archetypes_to_csv(archetypes: &[Archetype]) -> String {
    let mut out = String::from(ARCHETYPE_CSV_HEADER);
    out.push('\n');
    for a in archetypes {
        let fields = a.fractional_fields();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            a.lamps_needed,
            fields[0],
            fields[1],
            fields[2],
            fields[3],
            fields[4],
            fields[5],
            fields[6],
            fields[7],
            fields[8],
            fields[9],
        ));
    }
    out
}

pub fn archetypes_from_csv_str(text: &str) -> Result<Vec<Archetype>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == ARCHETYPE_CSV_HEADER => {}
        other => {
            return Err(Error::Config(format!(
                "archetype header must be `{ARCHETYPE_CSV_HEADER}`, got `{}`",
                other.unwrap_or("")
            )))
        }
    }
    let mut archetypes = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(Error::Config(format!(
                "archetype line {}: expected 11 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let mut values = [0.0f64; 11];
        for (k, f) in fields.iter().enumerate() {
            values[k] = f.trim().parse::<f64>().map_err(|_| {
                Error::Config(format!("archetype line {}: bad number `{f}`", lineno + 2))
            })?;
        }
        let archetype = Archetype {
            lamps_needed: values[0],
            functional_tolerance: values[1],
            colour_tolerance: values[2],
            financial_energy_focus: values[3],
            environmental_energy_focus: values[4],
            social_mindedness: values[5],
            social_agreeability: values[6],
            baseline_satisfaction_incandescent: values[7],
            baseline_satisfaction_cfl: values[8],
            baseline_satisfaction_led: values[9],
            reserved_11th: values[10],
        };
        archetype
            .validate()
            .map_err(|e| Error::Config(format!("archetype line {}: {e}", lineno + 2)))?;
        archetypes.push(archetype);
    }
    if archetypes.is_empty() {
        return Err(Error::Config("archetype file contains no rows".into()));
    }
    Ok(archetypes)
}

pub fn archetypes_from_csv_file(path: &Path) -> Result<Vec<Archetype>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    archetypes_from_csv_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}
