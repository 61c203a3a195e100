//! One CSV row per measured run.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{BenchError, BenchResult};

/// A self-describing result row. Columns that do not apply to an experiment
/// are left empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub scenario: String,
    pub d: usize,
    pub n: usize,
    pub seed: u64,
    pub backend: String,
    pub planner: String,
    pub m: Option<usize>,
    pub c_tilde: Option<f64>,
    pub r: f64,
    #[serde(serialize_with = "time")]
    pub build_time_s: f64,
    #[serde(serialize_with = "time")]
    pub nn_time_s: f64,
    #[serde(serialize_with = "time")]
    pub cd_time_s: f64,
    #[serde(serialize_with = "time")]
    pub total_time_s: f64,
    #[serde(serialize_with = "opt_time")]
    pub cumulative_time_s: Option<f64>,
    pub recall: Option<f64>,
    pub pairs: Option<u64>,
    pub truth_pairs: Option<u64>,
    pub edges: Option<u64>,
    pub cd_calls: Option<u64>,
    pub path_cost: Option<f64>,
    pub best_cost: Option<f64>,
    pub normalized_cost: Option<f64>,
    pub success: Option<bool>,
}

fn time<S: Serializer>(t: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{t:.6}"))
}

fn opt_time<S: Serializer>(t: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match t {
        Some(t) => time(t, s),
        None => s.serialize_none(),
    }
}

/// Rounds to the microsecond grid the CSV is written on.
pub fn round_time(t: f64) -> f64 {
    (t * 1e6).round() / 1e6
}

impl ResultRow {
    pub fn new(experiment: &str, d: usize, n: usize, seed: u64, backend: &str) -> Self {
        ResultRow {
            experiment: experiment.into(),
            scenario: String::new(),
            d,
            n,
            seed,
            backend: backend.into(),
            planner: String::new(),
            m: None,
            c_tilde: None,
            r: 0.0,
            build_time_s: 0.0,
            nn_time_s: 0.0,
            cd_time_s: 0.0,
            total_time_s: 0.0,
            cumulative_time_s: None,
            recall: None,
            pairs: None,
            truth_pairs: None,
            edges: None,
            cd_calls: None,
            path_cost: None,
            best_cost: None,
            normalized_cost: None,
            success: None,
        }
    }

    /// Snaps every time column to microseconds so a written row reads back identically.
    pub fn rounded(mut self) -> Self {
        for t in [&mut self.build_time_s, &mut self.nn_time_s, &mut self.cd_time_s, &mut self.total_time_s] {
            *t = round_time(*t);
        }
        self.cumulative_time_s = self.cumulative_time_s.map(round_time);
        self
    }

    fn sort_key(&self) -> (&str, usize, usize, &str, u64) {
        (&self.experiment, self.d, self.n, &self.backend, self.seed)
    }
}

/// Stable sort by `(experiment, d, n, backend, seed)`.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

pub fn write_rows<W: Write>(out: W, rows: &[ResultRow]) -> BenchResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row.clone().rounded()).map_err(|e| BenchError::Runtime(e.to_string()))?;
    }
    w.flush().map_err(|e| BenchError::Runtime(e.to_string()))
}

pub fn write_rows_to(path: Option<&Path>, rows: &[ResultRow]) -> BenchResult<()> {
    match path {
        Some(p) => {
            let f = std::fs::File::create(p)
                .map_err(|e| BenchError::Runtime(format!("cannot create {}: {e}", p.display())))?;
            write_rows(std::io::BufWriter::new(f), rows)
        }
        None => write_rows(std::io::stdout().lock(), rows),
    }
}

pub fn read_rows<R: Read>(input: R) -> BenchResult<Vec<ResultRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<Result<Vec<ResultRow>, _>>()
        .map_err(|e| BenchError::Runtime(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn times_are_written_with_six_decimals() {
        let mut row = ResultRow::new("nn-compare", 3, 100, 7, "brute");
        row.total_time_s = 0.1234567891;
        row.nn_time_s = 2.0;
        let mut buf = Vec::new();
        write_rows(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains(",2.000000,"), "{text}");
        assert!(text.contains(",0.123457,"), "{text}");
    }

    #[test]
    fn infinite_cost_round_trips() {
        let mut row = ResultRow::new("converge", 2, 10, 0, "brute");
        row.path_cost = Some(f64::INFINITY);
        row.success = Some(false);
        let mut buf = Vec::new();
        write_rows(&mut buf, std::slice::from_ref(&row)).unwrap();
        assert_eq!(read_rows(buf.as_slice()).unwrap(), vec![row]);
    }

    #[test]
    fn sorting_is_by_key_and_stable() {
        let mut rows = vec![
            ResultRow::new("b", 3, 10, 0, "x"),
            ResultRow::new("a", 6, 10, 1, "x"),
            ResultRow::new("a", 3, 20, 0, "x"),
            ResultRow::new("a", 3, 10, 1, "y"),
            ResultRow::new("a", 3, 10, 0, "y"),
        ];
        rows[4].planner = "first".into();
        rows.push(ResultRow::new("a", 3, 10, 0, "y"));
        sort_rows(&mut rows);
        let keys: Vec<_> = rows.iter().map(|r| (r.experiment.as_str(), r.d, r.n, r.backend.as_str(), r.seed)).collect();
        assert_eq!(
            keys,
            vec![
                ("a", 3, 10, "y", 0),
                ("a", 3, 10, "y", 0),
                ("a", 3, 10, "y", 1),
                ("a", 3, 20, "x", 0),
                ("a", 6, 10, "x", 1),
                ("b", 3, 10, "x", 0)
            ]
        );
        assert_eq!(rows[0].planner, "first");
    }
}
