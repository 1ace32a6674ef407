//! Lamp catalog and time-evolving market conditions.
//!
//! The catalog holds the lamp models on offer; effective prices,
//! efficiencies and availability evolve over the simulated horizon under a
//! policy scenario and the run-level random factors. LED lamps get cheaper
//! and more efficient every year in every scenario; incandescent lamps are
//! only affected by scenario interventions.

use std::fmt;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenarios::Scenario;

/// First simulated year (month 0 = January 2006).
pub const START_YEAR: i32 = 2006;
/// Last simulated year (month 239 = December 2025).
pub const END_YEAR: i32 = 2025;
/// Length of the full horizon in months.
pub const HORIZON_MONTHS: u32 = 240;

/// Annual LED price decline rate before the run factor is applied.
pub const LED_PRICE_RATE: f64 = 0.10;
/// LED price decrements apply in January 2007..=2019, reaching the 2020 level.
pub const LED_PRICE_STEPS: i32 = 13;
/// Annual LED efficiency growth rate before the run factor is applied.
pub const LED_EFFICIENCY_RATE: f64 = 0.05;
/// LED efficiency grows in January 2007..=2020.
pub const LED_EFFICIENCY_STEPS: i32 = 14;
/// Efficiency ceiling for LED improvement.
pub const LED_EFFICIENCY_CAP: f64 = 0.99;

pub fn year_of_month(month: u32) -> i32 {
    START_YEAR + (month / 12) as i32
}

/// Month index of January of `year` (panics outside the horizon).
pub fn january_of(year: i32) -> u32 {
    assert!((START_YEAR..=END_YEAR).contains(&year), "year {year} outside horizon");
    ((year - START_YEAR) * 12) as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LampType {
    Incandescent,
    Cfl,
    Led,
}

impl LampType {
    pub const ALL: [LampType; 3] = [LampType::Incandescent, LampType::Cfl, LampType::Led];

    pub fn index(self) -> usize {
        match self {
            LampType::Incandescent => 0,
            LampType::Cfl => 1,
            LampType::Led => 2,
        }
    }

    fn parse_csv(s: &str) -> Result<Self> {
        match s {
            "Incandescent" => Ok(LampType::Incandescent),
            "CFL" => Ok(LampType::Cfl),
            "LED" => Ok(LampType::Led),
            other => Err(Error::Config(format!("unknown lamp type `{other}`"))),
        }
    }

    fn csv_name(self) -> &'static str {
        match self {
            LampType::Incandescent => "Incandescent",
            LampType::Cfl => "CFL",
            LampType::Led => "LED",
        }
    }
}

impl fmt::Display for LampType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.csv_name())
    }
}

/// One catalog entry. Percentages from the source table are stored as
/// fractions of 1; lifetimes are calendar months at the assumed 6 h/day use.
#[derive(Debug, Clone, PartialEq)]
pub struct LampModel {
    pub id: usize,
    pub lamp_type: LampType,
    pub base_price: f64,
    pub base_efficiency: f64,
    pub colour_discrepancy: f64,
    pub ramp_up_seconds: f64,
    pub mean_lifetime_months: f64,
    pub initially_available: bool,
}

static EMBEDDED_CATALOG: &str = include_str!("../data/catalog.csv");
const CSV_HEADER: &str = "type,price_eur,efficiency_pct,colour_pct,rampup_s,lifetime_months,available";

/// The set of lamp models on the market.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    pub models: Vec<LampModel>,
}

impl Default for Catalog {
    fn default() -> Self {
        Catalog::from_csv_str(EMBEDDED_CATALOG).expect("embedded catalog is valid")
    }
}

impl Catalog {
    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn model(&self, id: usize) -> Result<&LampModel> {
        self.models.get(id).ok_or(Error::UnknownModel(id))
    }

    pub fn from_csv_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim_end() == CSV_HEADER => {}
            other => {
                return Err(Error::Config(format!(
                    "catalog header must be `{CSV_HEADER}`, got `{}`",
                    other.unwrap_or("")
                )))
            }
        }
        let mut models = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 7 {
                return Err(Error::Config(format!(
                    "catalog line {}: expected 7 fields, got {}",
                    lineno + 2,
                    fields.len()
                )));
            }
            let num = |s: &str, what: &str| -> Result<f64> {
                s.trim().parse::<f64>().map_err(|_| {
                    Error::Config(format!("catalog line {}: bad {what} `{s}`", lineno + 2))
                })
            };
            let available = match fields[6].trim() {
                "Y" => true,
                "N" => false,
                other => {
                    return Err(Error::Config(format!(
                        "catalog line {}: available must be Y or N, got `{other}`",
                        lineno + 2
                    )))
                }
            };
            let model = LampModel {
                id: models.len(),
                lamp_type: LampType::parse_csv(fields[0].trim())?,
                base_price: num(fields[1], "price")?,
                base_efficiency: num(fields[2], "efficiency")? / 100.0,
                colour_discrepancy: num(fields[3], "colour")? / 100.0,
                ramp_up_seconds: num(fields[4], "ramp-up")?,
                mean_lifetime_months: num(fields[5], "lifetime")?,
                initially_available: available,
            };
            if model.base_price <= 0.0 {
                return Err(Error::Config(format!("catalog line {}: price must be > 0", lineno + 2)));
            }
            if !(0.0..=1.0).contains(&model.base_efficiency) || model.base_efficiency == 0.0 {
                return Err(Error::Config(format!(
                    "catalog line {}: efficiency must be in (0, 100]",
                    lineno + 2
                )));
            }
            if !(0.0..=1.0).contains(&model.colour_discrepancy) {
                return Err(Error::Config(format!(
                    "catalog line {}: colour must be in [0, 100]",
                    lineno + 2
                )));
            }
            if model.ramp_up_seconds < 0.0 || model.mean_lifetime_months <= 0.0 {
                return Err(Error::Config(format!(
                    "catalog line {}: ramp-up must be >= 0 and lifetime > 0",
                    lineno + 2
                )));
            }
            models.push(model);
        }
        Ok(Catalog { models })
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for m in &self.models {
            out.push_str(&format!(
                "{},{:.2},{},{},{},{},{}\n",
                m.lamp_type.csv_name(),
                m.base_price,
                fmt_whole(m.base_efficiency * 100.0),
                fmt_whole(m.colour_discrepancy * 100.0),
                fmt_whole(m.ramp_up_seconds),
                fmt_whole(m.mean_lifetime_months),
                if m.initially_available { "Y" } else { "N" },
            ));
        }
        out
    }
}

/// Integers print without a decimal point so the default catalog render
/// stays byte-identical to the source table.
fn fmt_whole(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v}")
    }
}

/// The three run-level multipliers, each drawn once per run from U[0.5, 2].
/// They scale annual rates: LED price decline, incandescent price increase,
/// and LED efficiency growth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunFactors {
    pub led_price_factor: f64,
    pub incandescent_price_factor: f64,
    pub led_innovation_factor: f64,
}

impl RunFactors {
    pub const NEUTRAL: RunFactors = RunFactors {
        led_price_factor: 1.0,
        incandescent_price_factor: 1.0,
        led_innovation_factor: 1.0,
    };

    pub fn sample(rng: &mut impl Rng) -> Self {
        RunFactors {
            led_price_factor: rng.gen_range(0.5..=2.0),
            incandescent_price_factor: rng.gen_range(0.5..=2.0),
            led_innovation_factor: rng.gen_range(0.5..=2.0),
        }
    }

    /// Which factor scales a scenario price intervention on `lamp_type`.
    /// No factor governs CFL pricing, so it stays at 1.
    pub fn price_factor_for(&self, lamp_type: LampType) -> f64 {
        match lamp_type {
            LampType::Incandescent => self.incandescent_price_factor,
            LampType::Led => self.led_price_factor,
            LampType::Cfl => 1.0,
        }
    }
}

/// Effective purchase price of a model in `year` under a scenario.
///
/// LED prices decline by `LED_PRICE_RATE * led_price_factor` each January
/// 2007..=2019 in every scenario. Scenario price interventions compound on
/// top, one increment per January inside their window.
pub fn effective_price(
    model: &LampModel,
    year: i32,
    scenario: &Scenario,
    factors: &RunFactors,
) -> f64 {
    let mut price = model.base_price;
    if model.lamp_type == LampType::Led {
        let steps = (year - START_YEAR).clamp(0, LED_PRICE_STEPS);
        price *= (1.0 - LED_PRICE_RATE * factors.led_price_factor).powi(steps);
    }
    for iv in &scenario.price_interventions {
        if iv.lamp_type == model.lamp_type {
            let window = iv.end_year - iv.start_year + 1;
            let steps = (year - iv.start_year + 1).clamp(0, window);
            price *= (1.0 + iv.annual_rate * factors.price_factor_for(iv.lamp_type)).powi(steps);
        }
    }
    price
}

/// Effective efficiency of a model in `year`. Only LED efficiency evolves:
/// it grows by `LED_EFFICIENCY_RATE * led_innovation_factor` per year from
/// 2007 to 2020, capped at 99%.
pub fn effective_efficiency(model: &LampModel, year: i32, factors: &RunFactors) -> f64 {
    if model.lamp_type != LampType::Led {
        return model.base_efficiency;
    }
    let steps = (year - START_YEAR).clamp(0, LED_EFFICIENCY_STEPS);
    let grown = model.base_efficiency
        * (1.0 + LED_EFFICIENCY_RATE * factors.led_innovation_factor).powi(steps);
    grown.min(LED_EFFICIENCY_CAP)
}

/// Year-level availability. LED models are on sale from 2006 onward; other
/// models follow their catalog flag until a scenario ban removes them (from
/// January of the ban year, permanently).
pub fn is_available(model: &LampModel, year: i32, scenario: &Scenario) -> bool {
    let banned = scenario
        .availability_interventions
        .iter()
        .any(|iv| iv.lamp_type == model.lamp_type && year >= iv.ban_year);
    if banned {
        return false;
    }
    model.lamp_type == LampType::Led || model.initially_available
}

/// Market conditions for one month: effective price, efficiency and
/// availability per model. Immutable once computed; recomputing for the
/// same inputs yields identical values.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketState {
    pub month: u32,
    pub prices: Vec<f64>,
    pub efficiencies: Vec<f64>,
    pub availability: Vec<bool>,
}

impl MarketState {
    /// Compute the state for `month` (0 = January 2006). At month 0 the
    /// catalog's own availability column applies, so LED models marked `N`
    /// are not yet on sale when initial inventories are drawn; from month 1
    /// the year-level rule takes over.
    pub fn compute(
        catalog: &Catalog,
        scenario: &Scenario,
        factors: &RunFactors,
        month: u32,
    ) -> Self {
        let year = year_of_month(month);
        let mut prices = Vec::with_capacity(catalog.len());
        let mut efficiencies = Vec::with_capacity(catalog.len());
        let mut availability = Vec::with_capacity(catalog.len());
        for model in &catalog.models {
            prices.push(effective_price(model, year, scenario, factors));
            efficiencies.push(effective_efficiency(model, year, factors));
            let avail = is_available(model, year, scenario)
                && (month > 0 || model.initially_available);
            availability.push(avail);
        }
        MarketState { month, prices, efficiencies, availability }
    }

    pub fn is_model_available(&self, id: usize) -> bool {
        self.availability.get(id).copied().unwrap_or(false)
    }
}

/// Ids of the models available in `state`, in ascending id order.
pub fn available_models(state: &MarketState) -> Vec<usize> {
    state
        .availability
        .iter()
        .enumerate()
        .filter_map(|(id, &a)| a.then_some(id))
        .collect()
}
