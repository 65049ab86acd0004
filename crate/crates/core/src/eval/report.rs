//! Metric reports and their CSV form: `condition,hr,ndcg,ias,n_users`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub hr_at_k: f64,
    pub ndcg_at_k: f64,
    pub ias: f64,
    pub k: usize,
    pub n_users: usize,
}

impl MetricsReport {
    pub fn is_valid(&self) -> bool {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        unit(self.hr_at_k) && unit(self.ndcg_at_k) && unit(self.ias) && self.n_users > 0
    }

    /// Single-row CSV; the condition column carries the cutoff `k`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(out, &[(self.k as f64, *self)])
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let rows = read_rows(input, None)?;
        match rows.as_slice() {
            [(_, report)] => Ok(*report),
            _ => Err(Error::UnsupportedFile(format!(
                "expected one metrics row, found {}",
                rows.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Prefix length or disturbance level.
    pub condition: f64,
    pub report: MetricsReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub k: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn new(k: usize, rows: Vec<SweepRow>) -> Result<Self> {
        if rows.windows(2).any(|w| w[0].condition >= w[1].condition) {
            return Err(Error::InvalidConfig(
                "sweep conditions must be strictly increasing".into(),
            ));
        }
        Ok(Self { k, rows })
    }

    pub fn conditions(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.condition).collect()
    }

    pub fn hit_rates(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.report.hr_at_k).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let rows: Vec<(f64, MetricsReport)> =
            self.rows.iter().map(|r| (r.condition, r.report)).collect();
        write_rows(out, &rows)
    }

    /// The cutoff is not a CSV column, so the reader supplies it.
    pub fn read_csv<R: Read>(input: R, k: usize) -> Result<Self> {
        let rows = read_rows(input, Some(k))?
            .into_iter()
            .map(|(condition, report)| SweepRow { condition, report })
            .collect();
        Self::new(k, rows)
    }
}

const HEADER: [&str; 5] = ["condition", "hr", "ndcg", "ias", "n_users"];

fn write_rows<W: Write>(out: W, rows: &[(f64, MetricsReport)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for (condition, r) in rows {
        w.write_record([
            condition.to_string(),
            r.hr_at_k.to_string(),
            r.ndcg_at_k.to_string(),
            r.ias.to_string(),
            r.n_users.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<R: Read>(input: R, k: Option<usize>) -> Result<Vec<(f64, MetricsReport)>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(HEADER) {
        return Err(Error::UnsupportedFile(
            "unexpected metrics CSV header".into(),
        ));
    }
    let num = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::UnsupportedFile(format!("bad number {s:?} in metrics CSV")))
    };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let condition = num(&rec[0])?;
        let n_users = rec[4]
            .parse()
            .map_err(|_| Error::UnsupportedFile(format!("bad count {:?}", &rec[4])))?;
        let report = MetricsReport {
            hr_at_k: num(&rec[1])?,
            ndcg_at_k: num(&rec[2])?,
            ias: num(&rec[3])?,
            k: k.unwrap_or(condition as usize),
            n_users,
        };
        rows.push((condition, report));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(hr: f64) -> MetricsReport {
        MetricsReport {
            hr_at_k: hr,
            ndcg_at_k: hr / 3.0,
            ias: 0.1 + hr / 7.0,
            k: 10,
            n_users: 123,
        }
    }

    #[test]
    fn metrics_round_trip() {
        let r = report(0.123456789012345);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("condition,hr,ndcg,ias,n_users\n10,"));
        assert_eq!(MetricsReport::read_csv(buf.as_slice()).unwrap(), r);
    }

    #[test]
    fn sweep_round_trip_and_ordering() {
        let rows = [0.0, 0.2, 0.5, 1.0]
            .iter()
            .map(|&c| SweepRow {
                condition: c,
                report: report(0.4 - c / 10.0),
            })
            .collect::<Vec<_>>();
        let s = SweepResult::new(10, rows.clone()).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(SweepResult::read_csv(buf.as_slice(), 10).unwrap(), s);

        let mut bad = rows;
        bad.swap(0, 1);
        assert!(SweepResult::new(10, bad).is_err());
    }
}
