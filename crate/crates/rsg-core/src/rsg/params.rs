//! Shipped `(m, c_tilde)` table and lookup.
//!
//! Rows are `d,n,m,c_tilde`; `#` lines are comments. Lookup rounds `n` up to
//! the next tabulated row of the same dimension. Untabulated dimensions and
//! sizes beyond the last row have no entry; callers fall back to tuning.

use std::io::Read;

use serde::{Deserialize, Serialize};

use super::RsgParams;
use crate::error::{Error, Result};

pub const SHIPPED_TABLE_CSV: &str = include_str!("../../data/rsg_params_v1.csv");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub c_tilde: f64,
}

/// Grid count and cell-size factor, without a radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub m: usize,
    pub c_tilde: f64,
}

impl GridParams {
    pub fn with_radius(self, r: f64) -> Result<RsgParams> {
        RsgParams::new(r, self.c_tilde, self.m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamTable {
    rows: Vec<TableRow>,
}

impl ParamTable {
    pub fn shipped() -> &'static ParamTable {
        static TABLE: std::sync::OnceLock<ParamTable> = std::sync::OnceLock::new();
        TABLE.get_or_init(|| ParamTable::from_reader(SHIPPED_TABLE_CSV.as_bytes()).expect("shipped table parses"))
    }

    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let mut rows = Vec::new();
        for (line, rec) in rdr.deserialize::<TableRow>().enumerate() {
            let row = rec.map_err(|e| Error::Parse(format!("parameter table row {}: {e}", line + 1)))?;
            if row.m == 0 || row.c_tilde.is_nan() || row.c_tilde <= 1.0 {
                return Err(Error::Parse(format!("parameter table row {}: invalid m or c_tilde", line + 1)));
            }
            rows.push(row);
        }
        rows.sort_by_key(|r| (r.d, r.n));
        Ok(ParamTable { rows })
    }

    pub fn from_rows(mut rows: Vec<TableRow>) -> Self {
        rows.sort_by_key(|r| (r.d, r.n));
        ParamTable { rows }
    }

    pub fn rows(&self) -> &[TableRow] {
        &self.rows
    }

    pub fn lookup(&self, n: usize, d: usize) -> Result<GridParams> {
        self.rows
            .iter()
            .find(|r| r.d == d && r.n >= n)
            .map(|r| GridParams { m: r.m, c_tilde: r.c_tilde })
            .ok_or(Error::NoTableEntry { n, d })
    }

    pub fn to_csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            wtr.serialize(r).expect("in-memory write");
        }
        String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// Looks `(n, d)` up in the shipped table.
pub fn lookup_params(n: usize, d: usize) -> Result<GridParams> {
    ParamTable::shipped().lookup(n, d)
}
