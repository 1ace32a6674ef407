//! Aggregation over runs: adoption and behavior-share series, ensemble
//! mean/std, rank-correlation sensitivity and tipping-point detection.

use serde::{Deserialize, Serialize};

use crate::agents::Agent;
use crate::engine::RunResult;
use crate::error::{Error, Result};
use crate::market::{available_models, Catalog, LampType, MarketState, RunFactors};
use crate::scenarios::Scenario;

/// Share of non-incandescent lamps across all inventories.
pub fn adoption_share(agents: &[Agent], catalog: &Catalog) -> Result<f64> {
    let mut total = 0u64;
    let mut non_incandescent = 0u64;
    for agent in agents {
        for lamp in &agent.inventory {
            total += 1;
            if catalog.models[lamp.model_id].lamp_type != LampType::Incandescent {
                non_incandescent += 1;
            }
        }
    }
    if total == 0 {
        return Err(Error::Config("adoption share of an empty population is undefined".into()));
    }
    Ok(non_incandescent as f64 / total as f64)
}

/// Normalize one month's strategy counts into shares. Months without any
/// replacement event yield the all-zero sentinel.
pub fn strategy_shares(counts: &[u32; 4]) -> [f64; 4] {
    let total: u32 = counts.iter().sum();
    if total == 0 {
        return [0.0; 4];
    }
    let t = f64::from(total);
    [
        f64::from(counts[0]) / t,
        f64::from(counts[1]) / t,
        f64::from(counts[2]) / t,
        f64::from(counts[3]) / t,
    ]
}

/// Per-month ensemble statistics over a set of runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub scenario: String,
    pub runs: u32,
    pub months: u32,
    pub adoption_mean: Vec<f64>,
    /// Sample standard deviation across runs (zero for a single run).
    pub adoption_std: Vec<f64>,
    /// Mean strategy shares across runs, indexed by `Strategy::index()`.
    pub strategy_share_mean: Vec<[f64; 4]>,
    /// Adoption at the final recorded month, per run.
    pub final_adoption: Vec<f64>,
    /// Run factors, per run; absent when rebuilt from a CSV export.
    pub factors: Option<Vec<RunFactors>>,
}

impl EnsembleStats {
    pub fn from_runs(scenario: &str, results: &[RunResult]) -> Result<Self> {
        let adoption: Vec<&[f64]> = results.iter().map(|r| r.adoption.as_slice()).collect();
        let shares: Vec<Vec<[f64; 4]>> = results
            .iter()
            .map(|r| (0..r.adoption.len()).map(|m| r.strategy_shares(m)).collect())
            .collect();
        let mut stats = Self::from_series(scenario, &adoption, &shares)?;
        stats.factors = Some(results.iter().map(|r| r.factors).collect());
        Ok(stats)
    }

    /// Build stats from raw per-run series (the CSV re-import path).
    pub fn from_series(
        scenario: &str,
        adoption: &[&[f64]],
        shares: &[Vec<[f64; 4]>],
    ) -> Result<Self> {
        if adoption.is_empty() {
            return Err(Error::Config("ensemble must contain at least one run".into()));
        }
        let months = adoption[0].len();
        if months == 0 || adoption.iter().any(|a| a.len() != months) {
            return Err(Error::Config("all runs must share a non-empty month grid".into()));
        }
        if shares.len() != adoption.len() || shares.iter().any(|s| s.len() != months) {
            return Err(Error::Config("strategy series must match the adoption grid".into()));
        }
        let n = adoption.len();
        let mut adoption_mean = Vec::with_capacity(months);
        let mut adoption_std = Vec::with_capacity(months);
        let mut strategy_share_mean = vec![[0.0f64; 4]; months];
        for m in 0..months {
            // Welford's streaming moments over runs.
            let mut mean = 0.0;
            let mut m2 = 0.0;
            for (k, run) in adoption.iter().enumerate() {
                let x = run[m];
                let delta = x - mean;
                mean += delta / (k as f64 + 1.0);
                m2 += delta * (x - mean);
            }
            let std = if n > 1 { (m2 / (n as f64 - 1.0)).sqrt() } else { 0.0 };
            adoption_mean.push(mean);
            adoption_std.push(std);
            for run in shares {
                for s in 0..4 {
                    strategy_share_mean[m][s] += run[m][s] / n as f64;
                }
            }
        }
        let final_adoption = adoption.iter().map(|a| *a.last().unwrap()).collect();
        Ok(EnsembleStats {
            scenario: scenario.to_string(),
            runs: n as u32,
            months: months as u32,
            adoption_mean,
            adoption_std,
            strategy_share_mean,
            final_adoption,
            factors: None,
        })
    }

    pub fn final_mean(&self) -> f64 {
        *self.adoption_mean.last().expect("non-empty series")
    }

    pub fn final_std(&self) -> f64 {
        *self.adoption_std.last().expect("non-empty series")
    }
}

/// Spearman rank correlation. Ties get average ranks; degenerate variance
/// on either side yields `None` (undefined, not zero).
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return None;
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let mean = (n as f64 + 1.0) / 2.0;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for i in 0..n {
        let dx = rx[i] - mean;
        let dy = ry[i] - mean;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x <= 0.0 || var_y <= 0.0 {
        return None;
    }
    Some(cov / (var_x.sqrt() * var_y.sqrt()))
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // 1-based average rank over the tie group [i, j].
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Rank correlation of each run factor (and the pricing-factor product)
/// against final adoption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub scenario: String,
    pub runs: u32,
    pub led_price: Option<f64>,
    pub incandescent_price: Option<f64>,
    pub led_innovation: Option<f64>,
    /// Interaction term: product of the two pricing factors.
    pub pricing_product: Option<f64>,
}

pub fn sensitivity_report(scenario: &str, results: &[RunResult]) -> Result<SensitivityReport> {
    if results.len() < 10 {
        return Err(Error::Config(format!(
            "sensitivity analysis needs >= 10 runs, got {}",
            results.len()
        )));
    }
    let outcome: Vec<f64> = results.iter().map(|r| *r.adoption.last().unwrap()).collect();
    let led: Vec<f64> = results.iter().map(|r| r.factors.led_price_factor).collect();
    let inc: Vec<f64> = results.iter().map(|r| r.factors.incandescent_price_factor).collect();
    let innov: Vec<f64> = results.iter().map(|r| r.factors.led_innovation_factor).collect();
    let product: Vec<f64> = led.iter().zip(&inc).map(|(a, b)| a * b).collect();
    Ok(SensitivityReport {
        scenario: scenario.to_string(),
        runs: results.len() as u32,
        led_price: spearman(&led, &outcome),
        incandescent_price: spearman(&inc, &outcome),
        led_innovation: spearman(&innov, &outcome),
        pricing_product: spearman(&product, &outcome),
    })
}

/// First month in which the cheapest available lamp is strictly cheaper
/// than every available incandescent (trivially true once no incandescent
/// is on sale). `None` when incandescent stays cheapest over the horizon.
pub fn tipping_point(
    catalog: &Catalog,
    scenario: &Scenario,
    factors: &RunFactors,
    months: u32,
) -> Option<u32> {
    for month in 0..months {
        let state = MarketState::compute(catalog, scenario, factors, month);
        let ids = available_models(&state);
        let min_of = |want_incandescent: bool| {
            ids.iter()
                .filter(|&&id| {
                    (catalog.models[id].lamp_type == LampType::Incandescent) == want_incandescent
                })
                .map(|&id| state.prices[id])
                .fold(f64::INFINITY, f64::min)
        };
        let min_inc = min_of(true);
        let min_other = min_of(false);
        if min_other < min_inc {
            return Some(month);
        }
    }
    None
}
