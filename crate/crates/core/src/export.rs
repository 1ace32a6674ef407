//! Result export: long-format CSV (the canonical output), a JSON summary
//! with the effective configuration echoed for provenance, and
//! self-contained SVG line plots.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agents::{DynamicsParams, SatisfactionParams};
use crate::behavior::BehaviorThresholds;
use crate::engine::RunResult;
use crate::error::{Error, Result};
use crate::market::{RunFactors, START_YEAR};
use crate::metrics::EnsembleStats;
use crate::scenarios::Scenario;

pub const CSV_HEADER: &str = "scenario,run,month,adoption,rep,imi,del,soc";

/// Render an ensemble as long-format CSV. Floats use the shortest
/// round-trippable representation, so re-importing is lossless.
pub fn ensemble_csv(scenario: &str, results: &[RunResult]) -> String {
    let mut out = String::with_capacity(results.len() * results.first().map_or(0, |r| r.adoption.len()) * 40);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for run in results {
        for (month, &adoption) in run.adoption.iter().enumerate() {
            let s = run.strategy_shares(month);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                scenario, run.run_index, month, adoption, s[0], s[1], s[2], s[3]
            );
        }
    }
    out
}

pub fn write_ensemble_csv(path: &Path, scenario: &str, results: &[RunResult]) -> Result<()> {
    std::fs::write(path, ensemble_csv(scenario, results)).map_err(|e| Error::io(path, e))
}

/// Per-scenario series rebuilt from a CSV export.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvEnsemble {
    pub scenario: String,
    pub adoption: Vec<Vec<f64>>,
    pub shares: Vec<Vec<[f64; 4]>>,
}

impl CsvEnsemble {
    pub fn stats(&self) -> Result<EnsembleStats> {
        let adoption: Vec<&[f64]> = self.adoption.iter().map(|a| a.as_slice()).collect();
        EnsembleStats::from_series(&self.scenario, &adoption, &self.shares)
    }
}

pub fn parse_ensemble_csv(text: &str) -> Result<Vec<CsvEnsemble>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == CSV_HEADER => {}
        other => {
            return Err(Error::Config(format!(
                "csv header must be `{CSV_HEADER}`, got `{}`",
                other.unwrap_or("")
            )))
        }
    }
    let mut ensembles: Vec<CsvEnsemble> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::Config(format!(
                "csv line {}: expected 8 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("csv line {}: bad number `{s}`", lineno + 2)))
        };
        let scenario = fields[0];
        let run = num(fields[1])? as usize;
        let month = num(fields[2])? as usize;
        let ensemble = match ensembles.iter_mut().find(|e| e.scenario == scenario) {
            Some(e) => e,
            None => {
                ensembles.push(CsvEnsemble {
                    scenario: scenario.to_string(),
                    adoption: vec![],
                    shares: vec![],
                });
                ensembles.last_mut().unwrap()
            }
        };
        while ensemble.adoption.len() <= run {
            ensemble.adoption.push(vec![]);
            ensemble.shares.push(vec![]);
        }
        if ensemble.adoption[run].len() != month {
            return Err(Error::Config(format!(
                "csv line {}: months of run {run} out of order",
                lineno + 2
            )));
        }
        ensemble.adoption[run].push(num(fields[3])?);
        ensemble.shares[run].push([num(fields[4])?, num(fields[5])?, num(fields[6])?, num(fields[7])?]);
    }
    if ensembles.is_empty() {
        return Err(Error::Config("csv contains no data rows".into()));
    }
    Ok(ensembles)
}

pub fn read_ensemble_csv(path: &Path) -> Result<Vec<CsvEnsemble>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ensemble_csv(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// The effective configuration echoed into every summary for provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEcho {
    pub scenario: Scenario,
    pub agents: u32,
    pub runs: u32,
    pub months: u32,
    pub master_seed: u64,
    pub jobs: u32,
    pub thresholds: BehaviorThresholds,
    pub satisfaction: SatisfactionParams,
    pub dynamics: DynamicsParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSummary {
    pub scenario: String,
    pub config: ConfigEcho,
    pub factors: Vec<RunFactors>,
    pub final_adoption: Vec<f64>,
    pub final_mean: f64,
    pub final_std: f64,
    pub tipping_month: Vec<Option<u32>>,
    pub adoption_mean: Vec<f64>,
    pub adoption_std: Vec<f64>,
    pub strategy_share_mean: Vec<[f64; 4]>,
}

impl EnsembleSummary {
    pub fn new(stats: &EnsembleStats, config: ConfigEcho, tipping_month: Vec<Option<u32>>) -> Self {
        EnsembleSummary {
            scenario: stats.scenario.clone(),
            config,
            factors: stats.factors.clone().unwrap_or_default(),
            final_adoption: stats.final_adoption.clone(),
            final_mean: stats.final_mean(),
            final_std: stats.final_std(),
            tipping_month,
            adoption_mean: stats.adoption_mean.clone(),
            adoption_std: stats.adoption_std.clone(),
            strategy_share_mean: stats.strategy_share_mean.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("summary serializes");
        text.push('\n');
        text
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("summary schema: {e}")))
    }
}

// ---------------------------------------------------------------------------
// SVG plotting
// ---------------------------------------------------------------------------

const SVG_WIDTH: f64 = 880.0;
const SVG_HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 200.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 56.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// One plotted line: a mean series and an optional +-1 std band.
pub struct Series<'a> {
    pub label: String,
    pub mean: &'a [f64],
    pub band: Option<&'a [f64]>,
}

fn x_pos(month: usize, months: usize) -> f64 {
    let span = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let denom = (months.max(2) - 1) as f64;
    MARGIN_LEFT + month as f64 / denom * span
}

fn y_pos(value: f64) -> f64 {
    let span = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    MARGIN_TOP + (1.0 - value.clamp(0.0, 1.0)) * span
}

/// Render a share-over-time line chart with year ticks on the x axis and
/// the unit interval on the y axis.
pub fn line_chart_svg(title: &str, y_label: &str, series: &[Series<'_>]) -> String {
    let months = series.iter().map(|s| s.mean.len()).max().unwrap_or(2);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="26" font-family="sans-serif" font-size="17" font-weight="bold">{}</text>"#,
        MARGIN_LEFT,
        xml_escape(title)
    );

    // Axes and grid.
    let x0 = MARGIN_LEFT;
    let x1 = SVG_WIDTH - MARGIN_RIGHT;
    let y0 = y_pos(0.0);
    let y1 = y_pos(1.0);
    for k in 0..=4 {
        let v = k as f64 * 0.25;
        let y = y_pos(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{x0:.1}" y1="{y:.1}" x2="{x1:.1}" y2="{y:.1}" stroke="#dddddd" stroke-width="1"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="end">{v:.2}</text>"#,
            x0 - 8.0,
            y + 4.0
        );
    }
    let mut year = START_YEAR;
    let mut month = 0usize;
    while month < months {
        let x = x_pos(month, months);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{y0:.1}" x2="{x:.1}" y2="{:.1}" stroke="#eeeeee" stroke-width="1"/>"##,
            y0 + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{year}</text>"#,
            y0 + 20.0
        );
        year += 4;
        month += 48;
    }
    let _ = writeln!(
        svg,
        r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x1:.1}" y2="{y0:.1}" stroke="black" stroke-width="1.5"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x0:.1}" y2="{y1:.1}" stroke="black" stroke-width="1.5"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.1}" font-family="sans-serif" font-size="13" transform="rotate(-90 20 {:.1})" text-anchor="middle">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        xml_escape(y_label)
    );

    // Bands first so lines draw on top.
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if let Some(band) = s.band {
            let mut points = String::new();
            for (m, (&mean, &std)) in s.mean.iter().zip(band).enumerate() {
                let _ = write!(points, "{:.2},{:.2} ", x_pos(m, months), y_pos(mean + std));
            }
            for (m, (&mean, &std)) in s.mean.iter().zip(band).enumerate().rev() {
                let _ = write!(points, "{:.2},{:.2} ", x_pos(m, months), y_pos(mean - std));
            }
            let _ = writeln!(
                svg,
                r#"<polygon points="{}" fill="{color}" fill-opacity="0.18" stroke="none"/>"#,
                points.trim_end()
            );
        }
    }
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut points = String::new();
        for (m, &mean) in s.mean.iter().enumerate() {
            let _ = write!(points, "{:.2},{:.2} ", x_pos(m, months), y_pos(mean));
        }
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            points.trim_end()
        );
        let ly = MARGIN_TOP + 16.0 + k as f64 * 22.0;
        let lx = SVG_WIDTH - MARGIN_RIGHT + 14.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="3"/>"#,
            lx + 26.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13">{}</text>"#,
            lx + 32.0,
            ly + 4.0,
            xml_escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Adoption chart for one ensemble: mean with a +-1 std band.
pub fn adoption_svg(stats: &EnsembleStats) -> String {
    let series = [Series {
        label: stats.scenario.clone(),
        mean: &stats.adoption_mean,
        band: Some(&stats.adoption_std),
    }];
    line_chart_svg(
        &format!("Non-incandescent share, {} ({} runs)", stats.scenario, stats.runs),
        "share of non-incandescent lamps",
        &series,
    )
}

/// Behavior-frequency chart for one ensemble: the four strategy shares.
pub fn behavior_svg(stats: &EnsembleStats) -> String {
    let columns: Vec<Vec<f64>> = (0..4)
        .map(|s| stats.strategy_share_mean.iter().map(|m| m[s]).collect())
        .collect();
    let labels = ["repetition", "imitation", "deliberation", "social comparison"];
    let series: Vec<Series<'_>> = columns
        .iter()
        .zip(labels)
        .map(|(mean, label)| Series { label: label.to_string(), mean, band: None })
        .collect();
    line_chart_svg(
        &format!("Behavior shares, {} ({} runs)", stats.scenario, stats.runs),
        "share of replacement events",
        &series,
    )
}

/// Combined mean-adoption chart across scenarios, ordered as given.
pub fn comparison_svg(all: &[EnsembleStats]) -> String {
    let series: Vec<Series<'_>> = all
        .iter()
        .map(|s| Series {
            label: format!("{} ({:.3})", s.scenario, s.final_mean()),
            mean: &s.adoption_mean,
            band: None,
        })
        .collect();
    line_chart_svg(
        "Mean non-incandescent share by scenario",
        "share of non-incandescent lamps",
        &series,
    )
}

pub fn write_svg(path: &Path, svg: &str) -> Result<()> {
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
