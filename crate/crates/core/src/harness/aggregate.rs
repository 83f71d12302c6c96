use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::run::RunRecord;

/// Across-run statistics of one agent at one logged episode.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub agent: String,
    pub episode: u64,
    pub runs: usize,
    pub mean_regret: f64,
    /// Standard error of the mean; zero for a single run.
    pub se_regret: f64,
    pub mean_bound: Option<f64>,
    pub se_bound: Option<f64>,
    pub mean_tau: Option<f64>,
}

/// Final cumulative regret of one agent relative to the best agent.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalRow {
    pub agent: String,
    pub episode: u64,
    pub mean_regret: f64,
    pub se_regret: f64,
    /// `mean_regret / min_agents mean_regret`; `None` when the minimum is not positive.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    /// Ordered by agent (first appearance), then episode.
    pub rows: Vec<SummaryRow>,
    pub finals: Vec<FinalRow>,
}

impl Summary {
    pub fn agent_rows<'a>(&'a self, agent: &'a str) -> impl Iterator<Item = &'a SummaryRow> + 'a {
        self.rows.iter().filter(move |r| r.agent == agent)
    }

    pub fn final_row(&self, agent: &str) -> Option<&FinalRow> {
        self.finals.iter().find(|r| r.agent == agent)
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean and standard error of cumulative regret (and bound) per agent per episode.
pub fn aggregate(records: &[RunRecord]) -> Result<Summary> {
    let mut order: Vec<&str> = Vec::new();
    let mut by_agent: BTreeMap<&str, BTreeMap<u64, Vec<&super::run::LogRow>>> = BTreeMap::new();
    for rec in records {
        if !order.contains(&rec.agent.as_str()) {
            order.push(&rec.agent);
        }
        let slot = by_agent.entry(&rec.agent).or_default();
        for row in &rec.rows {
            slot.entry(row.episode).or_default().push(row);
        }
    }
    let mut summary = Summary::default();
    for agent in &order {
        let episodes = &by_agent[agent];
        for (&episode, rows) in episodes {
            let regrets: Vec<f64> = rows.iter().map(|r| r.cum_regret).collect();
            let (mean_regret, se_regret) = mean_se(&regrets);
            let bounds: Vec<f64> = rows.iter().filter_map(|r| r.cum_bound).collect();
            let (mean_bound, se_bound) = if bounds.is_empty() {
                (None, None)
            } else if bounds.len() != rows.len() {
                return Err(Error::Config(format!(
                    "agent '{agent}' has a bound in only some runs at episode {episode}"
                )));
            } else {
                let (m, s) = mean_se(&bounds);
                (Some(m), Some(s))
            };
            let taus: Vec<f64> = rows.iter().filter_map(|r| r.tau).collect();
            let mean_tau = (!taus.is_empty()).then(|| taus.iter().sum::<f64>() / taus.len() as f64);
            summary.rows.push(SummaryRow {
                agent: agent.to_string(),
                episode,
                runs: rows.len(),
                mean_regret,
                se_regret,
                mean_bound,
                se_bound,
                mean_tau,
            });
        }
    }
    for agent in &order {
        if let Some(last) = summary.rows.iter().rev().find(|r| r.agent == *agent) {
            summary.finals.push(FinalRow {
                agent: last.agent.clone(),
                episode: last.episode,
                mean_regret: last.mean_regret,
                se_regret: last.se_regret,
                ratio: None,
            });
        }
    }
    let best = summary
        .finals
        .iter()
        .map(|r| r.mean_regret)
        .fold(f64::INFINITY, f64::min);
    if best > 0.0 && best.is_finite() {
        for row in &mut summary.finals {
            row.ratio = Some(row.mean_regret / best);
        }
    }
    Ok(summary)
}

/// Plain-text table of final regrets, as a multiple of the lowest.
pub fn format_summary(summary: &Summary) -> String {
    let mut out = String::new();
    let width = summary
        .finals
        .iter()
        .map(|r| r.agent.len())
        .max()
        .unwrap_or(5)
        .max(5);
    let _ = writeln!(
        out,
        "expected (pseudo-)regret against the true environment, mean ± SE over runs"
    );
    let _ = writeln!(
        out,
        "{:<width$}  {:>9}  {:>14}  {:>12}  {:>8}",
        "agent", "episode", "cum_regret", "se", "ratio"
    );
    for row in &summary.finals {
        let ratio = row.ratio.map_or_else(|| "-".to_string(), |r| format!("{r:.3}"));
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>14.4}  {:>12.4}  {:>8}",
            row.agent, row.episode, row.mean_regret, row.se_regret, ratio
        );
    }
    out
}
