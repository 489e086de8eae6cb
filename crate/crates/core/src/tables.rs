//! Dimension tables: computed values next to the published rows, one cell per weight.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::miner::{dim_tilde, SpanFamily, Vectorizer};
use crate::words::word_quotient;

/// Versioned reference rows, one entry per table, `expected[k − 1]` for weight `k`.
pub const REFERENCE_TABLES: &str = include_str!("../data/reference_tables.json");

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReferenceTable {
    pub name: String,
    pub label: String,
    /// `computed` rows are recomputed; `reference` rows are echoed as metadata.
    pub kind: String,
    pub expected: Vec<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReferenceData {
    pub version: u32,
    pub tables: Vec<ReferenceTable>,
}

pub fn reference_data() -> Result<ReferenceData> {
    Ok(serde_json::from_str(REFERENCE_TABLES)?)
}

/// Largest weight computed per table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableBounds {
    pub o: u32,
    pub word: u32,
    pub q: u32,
    pub o2: u32,
}

impl Default for TableBounds {
    fn default() -> Self {
        TableBounds { o: 7, word: 9, q: 5, o2: 6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Match,
    Mismatch,
    /// Beyond the configured bound.
    NotComputed,
    /// Reference metadata, never computed.
    Reference,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Cell {
    pub k: u32,
    pub expected: u64,
    pub computed: Option<u64>,
    pub status: CellStatus,
    /// Certified rank and stabilized prime set (always true for the word quotient when exact).
    pub certified: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableResult {
    pub name: String,
    pub label: String,
    pub cells: Vec<Cell>,
}

impl TableResult {
    pub fn all_match(&self) -> bool {
        self.cells.iter().all(|c| !matches!(c.status, CellStatus::Mismatch))
    }

    /// `k,expected,computed,status,certified` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,expected,computed,status,certified\n");
        for c in &self.cells {
            let status = match c.status {
                CellStatus::Match => "match",
                CellStatus::Mismatch => "mismatch",
                CellStatus::NotComputed => "not_computed",
                CellStatus::Reference => "reference",
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.k,
                c.expected,
                c.computed.map(|v| v.to_string()).unwrap_or_default(),
                status,
                c.certified.map(|v| v.to_string()).unwrap_or_default()
            ));
        }
        out
    }
}

fn compute_cell(name: &str, k: u32, vz: &Vectorizer) -> Result<(u64, bool)> {
    let family = match name {
        "dim_word_quotient" => {
            let q = word_quotient(k)?;
            return Ok((q.dim as u64, q.exact));
        }
        "dim_O" => SpanFamily::O,
        "dim_Q" => SpanFamily::Q,
        "dim_O2" => SpanFamily::O2,
        other => return Err(Error::OutOfRange(format!("no computation for table {other}"))),
    };
    let r = dim_tilde(family, k, None, vz)?;
    Ok((r.dim_tilde as u64, r.exact && r.stabilized))
}

fn bound_for(name: &str, b: &TableBounds) -> u32 {
    match name {
        "dim_O" => b.o,
        "dim_word_quotient" => b.word,
        "dim_Q" => b.q,
        "dim_O2" => b.o2,
        _ => 0,
    }
}

/// One table; a cell only matches when its value is certified.
pub fn compute_table(t: &ReferenceTable, bounds: &TableBounds, vz: &Vectorizer) -> Result<TableResult> {
    let bound = bound_for(&t.name, bounds);
    let mut cells = Vec::new();
    for (i, &expected) in t.expected.iter().enumerate() {
        let k = i as u32 + 1;
        let cell = if t.kind == "reference" {
            Cell { k, expected, computed: None, status: CellStatus::Reference, certified: None }
        } else if k > bound {
            Cell { k, expected, computed: None, status: CellStatus::NotComputed, certified: None }
        } else {
            let (v, certified) = compute_cell(&t.name, k, vz)?;
            let status = if v == expected && certified { CellStatus::Match } else { CellStatus::Mismatch };
            Cell { k, expected, computed: Some(v), status, certified: Some(certified) }
        };
        cells.push(cell);
    }
    Ok(TableResult { name: t.name.clone(), label: t.label.clone(), cells })
}

pub fn compute_tables(bounds: &TableBounds, vz: &Vectorizer) -> Result<Vec<TableResult>> {
    reference_data()?.tables.iter().map(|t| compute_table(t, bounds, vz)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_rows_load() {
        let d = reference_data().unwrap();
        assert_eq!(d.version, 1);
        let names: Vec<&str> = d.tables.iter().map(|t| t.name.as_str()).collect();
        assert_eq!(names, ["dim_O", "dim_A", "dim_word_quotient", "dim_Q", "dim_O2", "dim_A2"]);
        let a = &d.tables[1];
        assert_eq!(a.expected, [0, 0, 1, 0, 1, 1, 1, 2, 2, 3, 4, 5]);
    }

    #[test]
    fn small_bounds() {
        let b = TableBounds { o: 4, word: 5, q: 2, o2: 2 };
        let res = compute_tables(&b, &Vectorizer::default()).unwrap();
        assert!(res.iter().all(TableResult::all_match));
        let o = &res[0];
        assert_eq!(o.cells.iter().filter(|c| c.status == CellStatus::Match).count(), 4);
        assert!(o.to_csv().starts_with("k,expected,computed,status,certified\n1,0,0,match,true\n"));
        assert!(res[1].cells.iter().all(|c| c.status == CellStatus::Reference));
    }
}
