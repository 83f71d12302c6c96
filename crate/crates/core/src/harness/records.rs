use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::aggregate::Summary;
use super::run::{LogRow, RunRecord};

pub const CSV_HEADER: [&str; 7] = ["agent", "run", "episode", "cum_regret", "cum_bound", "tau", "wall_ms"];
pub const RECORDS_FILE: &str = "records.csv";
pub const SUMMARY_FILE: &str = "summary.csv";

// `{}` on f64 prints the shortest decimal that parses back to the same bits.
fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes records in the given order, one line per logged episode.
pub fn write_records_to<W: Write>(writer: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for rec in records {
        for row in &rec.rows {
            w.write_record([
                rec.agent.clone(),
                rec.run.to_string(),
                row.episode.to_string(),
                row.cum_regret.to_string(),
                cell(row.cum_bound),
                cell(row.tau),
                cell(row.wall_ms),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<()> {
    write_records_to(File::create(path)?, records)
}

fn parse_opt(field: &str, what: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|_| Error::Config(format!("bad {what} value '{field}'")))
}

/// Parses a records CSV, grouping consecutive lines of the same `(agent, run)`.
pub fn read_records_from<R: Read>(reader: R) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    if r.headers()?.iter().ne(CSV_HEADER) {
        return Err(Error::Config(format!("unexpected CSV header, expected {}", CSV_HEADER.join(","))));
    }
    let mut out: Vec<RunRecord> = Vec::new();
    for line in r.records() {
        let line = line?;
        let agent = &line[0];
        let run: usize = line[1]
            .parse()
            .map_err(|_| Error::Config(format!("bad run index '{}'", &line[1])))?;
        let row = LogRow {
            episode: line[2]
                .parse()
                .map_err(|_| Error::Config(format!("bad episode '{}'", &line[2])))?,
            cum_regret: parse_opt(&line[3], "cum_regret")?
                .ok_or_else(|| Error::Config("missing cum_regret".into()))?,
            cum_bound: parse_opt(&line[4], "cum_bound")?,
            tau: parse_opt(&line[5], "tau")?,
            wall_ms: parse_opt(&line[6], "wall_ms")?,
        };
        match out.last_mut() {
            Some(rec) if rec.agent == agent && rec.run == run => rec.rows.push(row),
            _ => out.push(RunRecord {
                agent: agent.to_string(),
                run,
                rows: vec![row],
            }),
        }
    }
    Ok(out)
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    read_records_from(File::open(path)?)
}

/// Per-episode summary with a final-regret ratio column on each agent's last row.
pub fn write_summary_to<W: Write>(writer: W, summary: &Summary) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "agent",
        "episode",
        "runs",
        "mean_regret",
        "se_regret",
        "mean_bound",
        "se_bound",
        "mean_tau",
        "final_ratio",
    ])?;
    for row in &summary.rows {
        let ratio = summary
            .final_row(&row.agent)
            .filter(|f| f.episode == row.episode)
            .and_then(|f| f.ratio);
        w.write_record([
            row.agent.clone(),
            row.episode.to_string(),
            row.runs.to_string(),
            row.mean_regret.to_string(),
            row.se_regret.to_string(),
            cell(row.mean_bound),
            cell(row.se_bound),
            cell(row.mean_tau),
            cell(ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary(path: &Path, summary: &Summary) -> Result<()> {
    write_summary_to(File::create(path)?, summary)
}
