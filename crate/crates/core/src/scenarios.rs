//! Policy scenarios: declarative schedules of price, availability and
//! preference interventions, plus the five built-in policies.
//!
//! Scenario files are JSON:
//! `{ "id": str, "price": [{"type","from","to","rate"}], "ban":
//! [{"type","year"}], "preference": [{"fields","year","multiplier"}] }`.
//! Unknown keys are rejected. Canonical serialization is pretty-printed
//! JSON with all four keys present.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::agents::AgentPreferences;
use crate::error::{Error, Result};
use crate::market::{LampType, END_YEAR, START_YEAR};

/// The five built-in policy scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    NoRegulation,
    SoftBan,
    HardBan,
    InfoCampaign,
    SoftBanInfo,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 5] = [
        ScenarioId::NoRegulation,
        ScenarioId::SoftBan,
        ScenarioId::HardBan,
        ScenarioId::InfoCampaign,
        ScenarioId::SoftBanInfo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioId::NoRegulation => "no_regulation",
            ScenarioId::SoftBan => "soft_ban",
            ScenarioId::HardBan => "hard_ban",
            ScenarioId::InfoCampaign => "info_campaign",
            ScenarioId::SoftBanInfo => "soft_ban_info",
        }
    }

    pub fn valid_ids() -> Vec<String> {
        Self::ALL.iter().map(|id| id.as_str().to_string()).collect()
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownScenario { id: s.to_string(), valid: ScenarioId::valid_ids() })
    }
}

/// Agent preference fields a scenario may multiply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreferenceField {
    FunctionalTolerance,
    ColourTolerance,
    FinancialEnergyFocus,
    EnvironmentalEnergyFocus,
    SocialMindedness,
    SocialAgreeability,
    BaselineSatisfactionIncandescent,
    BaselineSatisfactionCfl,
    BaselineSatisfactionLed,
    Reserved11th,
}

/// Compounding annual price change for one lamp type, one increment per
/// January of `from..=to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceIntervention {
    #[serde(rename = "type")]
    pub lamp_type: LampType,
    #[serde(rename = "from")]
    pub start_year: i32,
    #[serde(rename = "to")]
    pub end_year: i32,
    #[serde(rename = "rate")]
    pub annual_rate: f64,
}

/// Permanent removal of a lamp type from January of `year`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AvailabilityIntervention {
    #[serde(rename = "type")]
    pub lamp_type: LampType,
    #[serde(rename = "year")]
    pub ban_year: i32,
}

/// One-off multiplication of agent preference fields in January of `year`,
/// clamped to the field's legal range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceIntervention {
    pub fields: Vec<PreferenceField>,
    pub year: i32,
    pub multiplier: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    #[serde(default, rename = "price")]
    pub price_interventions: Vec<PriceIntervention>,
    #[serde(default, rename = "ban")]
    pub availability_interventions: Vec<AvailabilityIntervention>,
    #[serde(default, rename = "preference")]
    pub preference_interventions: Vec<PreferenceIntervention>,
}

impl Scenario {
    pub fn empty(id: impl Into<String>) -> Self {
        Scenario {
            id: id.into(),
            price_interventions: vec![],
            availability_interventions: vec![],
            preference_interventions: vec![],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::Config("scenario id must not be empty".into()));
        }
        let year_ok = |y: i32| (START_YEAR..=END_YEAR).contains(&y);
        for iv in &self.price_interventions {
            if !year_ok(iv.start_year) || !year_ok(iv.end_year) || iv.start_year > iv.end_year {
                return Err(Error::Config(format!(
                    "price intervention window {}..{} must lie within {}..{}",
                    iv.start_year, iv.end_year, START_YEAR, END_YEAR
                )));
            }
            if !iv.annual_rate.is_finite() || iv.annual_rate <= -1.0 {
                return Err(Error::Config(format!(
                    "price intervention rate {} must be finite and > -1",
                    iv.annual_rate
                )));
            }
        }
        for iv in &self.availability_interventions {
            if !year_ok(iv.ban_year) {
                return Err(Error::Config(format!(
                    "ban year {} outside {}..{}",
                    iv.ban_year, START_YEAR, END_YEAR
                )));
            }
        }
        for iv in &self.preference_interventions {
            if !year_ok(iv.year) {
                return Err(Error::Config(format!(
                    "preference intervention year {} outside {}..{}",
                    iv.year, START_YEAR, END_YEAR
                )));
            }
            if !iv.multiplier.is_finite() || iv.multiplier < 0.0 {
                return Err(Error::Config(format!(
                    "preference multiplier {} must be finite and >= 0",
                    iv.multiplier
                )));
            }
            if iv.fields.is_empty() {
                return Err(Error::Config("preference intervention lists no fields".into()));
            }
        }
        Ok(())
    }

    /// Canonical JSON rendering: pretty-printed with all keys present.
    pub fn to_canonical_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("scenario serializes");
        text.push('\n');
        text
    }
}

/// The canonical definition of a built-in scenario.
pub fn builtin(id: ScenarioId) -> Scenario {
    let soft_ban_price = PriceIntervention {
        lamp_type: LampType::Incandescent,
        start_year: 2013,
        end_year: 2018,
        annual_rate: 0.10,
    };
    let hard_ban_price = PriceIntervention {
        lamp_type: LampType::Incandescent,
        start_year: 2012,
        end_year: 2014,
        annual_rate: 0.20,
    };
    let campaign = PreferenceIntervention {
        fields: vec![PreferenceField::FinancialEnergyFocus, PreferenceField::EnvironmentalEnergyFocus],
        year: 2012,
        multiplier: 1.5,
    };
    let mut scenario = Scenario::empty(id.as_str());
    match id {
        ScenarioId::NoRegulation => {}
        ScenarioId::SoftBan => {
            scenario.price_interventions.push(soft_ban_price);
        }
        ScenarioId::HardBan => {
            scenario.price_interventions.push(hard_ban_price);
            scenario.availability_interventions.push(AvailabilityIntervention {
                lamp_type: LampType::Incandescent,
                ban_year: 2015,
            });
        }
        ScenarioId::InfoCampaign => {
            scenario.preference_interventions.push(campaign);
        }
        ScenarioId::SoftBanInfo => {
            scenario.price_interventions.push(soft_ban_price);
            scenario.preference_interventions.push(campaign);
        }
    }
    scenario
}

/// Resolve a CLI scenario argument: a built-in id, or a path to a scenario
/// JSON file when the argument names an existing file.
pub fn resolve(arg: &str) -> Result<Scenario> {
    if let Ok(id) = ScenarioId::from_str(arg) {
        return Ok(builtin(id));
    }
    let path = Path::new(arg);
    if path.exists() {
        return parse_scenario_file(path);
    }
    Err(Error::UnknownScenario { id: arg.to_string(), valid: ScenarioId::valid_ids() })
}

pub fn parse_scenario_file(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenario_str(&text).map_err(|e| match e {
        Error::ScenarioSchema { message, .. } => {
            Error::ScenarioSchema { path: path.display().to_string(), message }
        }
        other => other,
    })
}

pub fn parse_scenario_str(text: &str) -> Result<Scenario> {
    let scenario: Scenario = serde_json::from_str(text).map_err(|e| Error::ScenarioSchema {
        path: "<inline>".to_string(),
        message: format!("line {}, column {}: {}", e.line(), e.column(), e),
    })?;
    scenario.validate().map_err(|e| Error::ScenarioSchema {
        path: "<inline>".to_string(),
        message: e.to_string(),
    })?;
    Ok(scenario)
}

/// Apply one preference intervention to every agent's preferences:
/// `field <- min(1, field * multiplier)`.
pub fn apply_preference_intervention<'a>(
    population: impl IntoIterator<Item = &'a mut AgentPreferences>,
    intervention: &PreferenceIntervention,
) {
    for prefs in population {
        for &field in &intervention.fields {
            let v = prefs.field_mut(field);
            *v = (*v * intervention.multiplier).min(1.0);
        }
    }
}
