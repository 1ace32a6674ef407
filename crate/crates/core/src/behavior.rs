//! The 2x2 strategy grid and the four replacement behaviors.
//!
//! Agents pick a strategy from their degree of satisfaction and certainty:
//! satisfied and certain agents repeat their last purchase, satisfied but
//! uncertain agents imitate a similar peer, dissatisfied but certain agents
//! deliberate over the whole market, and dissatisfied uncertain agents
//! compare themselves against a peer and copy only improvements.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agents::{satisfaction, Agent, Population, SatisfactionParams, SocialContext};
use crate::error::{Error, Result};
use crate::market::{available_models, Catalog, MarketState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Repetition,
    Imitation,
    Deliberation,
    SocialComparison,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Repetition,
        Strategy::Imitation,
        Strategy::Deliberation,
        Strategy::SocialComparison,
    ];

    pub fn index(self) -> usize {
        match self {
            Strategy::Repetition => 0,
            Strategy::Imitation => 1,
            Strategy::Deliberation => 2,
            Strategy::SocialComparison => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Repetition => "repetition",
            Strategy::Imitation => "imitation",
            Strategy::Deliberation => "deliberation",
            Strategy::SocialComparison => "social_comparison",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BehaviorThresholds {
    pub satisfaction_threshold: f64,
    pub certainty_threshold: f64,
    /// Starting peer-similarity threshold for the loosening loop.
    pub initial_similarity_threshold: f64,
    /// Multiplier applied to the similarity threshold on each rejection.
    pub loosening_factor: f64,
    /// After this many rejected draws the next peer is accepted outright.
    pub max_peer_attempts: u32,
}

impl Default for BehaviorThresholds {
    fn default() -> Self {
        BehaviorThresholds {
            satisfaction_threshold: 0.765,
            certainty_threshold: 0.9,
            initial_similarity_threshold: 1.0,
            loosening_factor: 1.5,
            max_peer_attempts: 10,
        }
    }
}

/// Quadrant selection. Values on the threshold count as high.
pub fn select_strategy(satisfaction: f64, certainty: f64, t: &BehaviorThresholds) -> Strategy {
    let satisfied = satisfaction >= t.satisfaction_threshold;
    let certain = certainty >= t.certainty_threshold;
    match (satisfied, certain) {
        (true, true) => Strategy::Repetition,
        (true, false) => Strategy::Imitation,
        (false, true) => Strategy::Deliberation,
        (false, false) => Strategy::SocialComparison,
    }
}

/// Outcome of one replacement decision. `executed` is the behavior that
/// actually produced the choice after any forced fallback, which is what
/// the behavior-frequency metrics count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurchaseDecision {
    pub model_id: usize,
    pub executed: Strategy,
    /// The agent wanted to repeat but its model was off the market.
    pub repetition_target_unavailable: bool,
}

/// Pick the available model with the highest satisfaction; ties break to
/// the lowest effective price, then the lowest id.
fn best_by_satisfaction(
    agent: &Agent,
    candidates: impl Iterator<Item = usize>,
    state: &MarketState,
    catalog: &Catalog,
    social: &SocialContext,
    params: &SatisfactionParams,
) -> Result<Option<(usize, f64)>> {
    let mut best: Option<(usize, f64)> = None;
    for id in candidates {
        let score = satisfaction(agent, id, state, catalog, social, params)?;
        best = match best {
            None => Some((id, score)),
            Some((bid, bscore)) => {
                let better = score > bscore
                    || (score == bscore && state.prices[id] < state.prices[bid])
                    || (score == bscore && state.prices[id] == state.prices[bid] && id < bid);
                if better {
                    Some((id, score))
                } else {
                    Some((bid, bscore))
                }
            }
        };
    }
    Ok(best)
}

/// Consider every available lamp and take the most satisfying one.
pub fn deliberation(
    agent: &Agent,
    state: &MarketState,
    catalog: &Catalog,
    social: &SocialContext,
    params: &SatisfactionParams,
) -> Result<usize> {
    let ids = available_models(state);
    match best_by_satisfaction(agent, ids.into_iter(), state, catalog, social, params)? {
        Some((id, _)) => Ok(id),
        None => Err(Error::EmptyMarket { month: state.month }),
    }
}

/// Replace a broken bulb with the same model; if it is off the market,
/// deliberate instead and flag the miss for the certainty update.
pub fn repetition(
    agent: &Agent,
    broken_model: usize,
    state: &MarketState,
    catalog: &Catalog,
    social: &SocialContext,
    params: &SatisfactionParams,
) -> Result<PurchaseDecision> {
    if state.is_model_available(broken_model) {
        return Ok(PurchaseDecision {
            model_id: broken_model,
            executed: Strategy::Repetition,
            repetition_target_unavailable: false,
        });
    }
    let model_id = deliberation(agent, state, catalog, social, params)?;
    Ok(PurchaseDecision {
        model_id,
        executed: Strategy::Deliberation,
        repetition_target_unavailable: true,
    })
}

/// Draw random peers until one is similar enough. The similarity threshold
/// starts at `initial_similarity_threshold`, scaled up for agreeable
/// agents, and loosens multiplicatively on every rejection; after
/// `max_peer_attempts` rejections the next draw is accepted outright.
pub fn select_similar_peer(
    agent_index: usize,
    population: &Population,
    rng: &mut impl Rng,
    t: &BehaviorThresholds,
) -> Result<usize> {
    let n = population.agents.len();
    if n < 2 {
        return Err(Error::NoPeer);
    }
    let me = &population.agents[agent_index].preferences;
    let scale = 1.0 + me.social_agreeability;
    let mut threshold = t.initial_similarity_threshold;
    let draw_other = |rng: &mut dyn rand::RngCore| loop {
        let j = rng.gen_range(0..n);
        if j != agent_index {
            return j;
        }
    };
    for _ in 0..t.max_peer_attempts {
        let j = draw_other(rng);
        let d = crate::agents::peer_distance(
            me,
            &population.agents[j].preferences,
            population.max_lamps_needed,
        );
        if d <= threshold * scale {
            return Ok(j);
        }
        threshold *= t.loosening_factor;
    }
    Ok(draw_other(rng))
}

/// Copy a random bulb from the peer's inventory that is still on sale; if
/// the peer owns nothing buyable, fall back to a uniformly random available
/// catalog model.
pub fn imitation(
    peer_models: &[usize],
    state: &MarketState,
    rng: &mut impl Rng,
) -> Result<PurchaseDecision> {
    let buyable: Vec<usize> =
        peer_models.iter().copied().filter(|&id| state.is_model_available(id)).collect();
    let pool = if buyable.is_empty() { available_models(state) } else { buyable };
    if pool.is_empty() {
        return Err(Error::EmptyMarket { month: state.month });
    }
    let model_id = pool[rng.gen_range(0..pool.len())];
    Ok(PurchaseDecision {
        model_id,
        executed: Strategy::Imitation,
        repetition_target_unavailable: false,
    })
}

/// Examine the peer's inventory and copy its best lamp only when that beats
/// repeating the broken model; with nothing buyable from the peer, fall
/// back to deliberation.
pub fn social_comparison(
    agent: &Agent,
    broken_model: usize,
    peer_models: &[usize],
    state: &MarketState,
    catalog: &Catalog,
    social: &SocialContext,
    params: &SatisfactionParams,
) -> Result<PurchaseDecision> {
    let buyable = peer_models.iter().copied().filter(|&id| state.is_model_available(id));
    let best = best_by_satisfaction(agent, buyable, state, catalog, social, params)?;
    let Some((peer_best, peer_score)) = best else {
        let model_id = deliberation(agent, state, catalog, social, params)?;
        return Ok(PurchaseDecision {
            model_id,
            executed: Strategy::Deliberation,
            repetition_target_unavailable: false,
        });
    };
    let model_id = if state.is_model_available(broken_model) {
        let keep_score = satisfaction(agent, broken_model, state, catalog, social, params)?;
        if peer_score < keep_score {
            broken_model
        } else {
            peer_best
        }
    } else {
        peer_best
    };
    Ok(PurchaseDecision {
        model_id,
        executed: Strategy::SocialComparison,
        repetition_target_unavailable: false,
    })
}
