//! The ten appendix tables: regeneration from first principles, embedded
//! transcriptions of the printed values, cell-by-cell diffing, and
//! rendering to CSV, Markdown and JSON.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{
    dusart_rhs, euler_lhs, mertens_product, print_tolerance, round_half_away, threshold_d, EulerVariant,
    Status,
};
use crate::error::{Error, Result};
use crate::phi::rough_set;
use crate::primes::PrimeTable;
use crate::verify::{case2_scan, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TableId {
    T1,
    T2a,
    T2b,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
    T9,
    T10,
}

impl TableId {
    pub const ALL: [TableId; 11] = [
        TableId::T1,
        TableId::T2a,
        TableId::T2b,
        TableId::T3,
        TableId::T4,
        TableId::T5,
        TableId::T6,
        TableId::T7,
        TableId::T8,
        TableId::T9,
        TableId::T10,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TableId::T1 => "1",
            TableId::T2a => "2a",
            TableId::T2b => "2b",
            TableId::T3 => "3",
            TableId::T4 => "4",
            TableId::T5 => "5",
            TableId::T6 => "6",
            TableId::T7 => "7",
            TableId::T8 => "8",
            TableId::T9 => "9",
            TableId::T10 => "10",
        }
    }

    /// Selector syntax: `1`..`10`, `2a`, `2b` (`2` means both halves), `all`.
    pub fn parse_selector(s: &str) -> Result<Vec<TableId>> {
        match s.trim() {
            "all" => Ok(TableId::ALL.to_vec()),
            "2" => Ok(vec![TableId::T2a, TableId::T2b]),
            other => Ok(vec![other.parse()?]),
        }
    }

    /// Columns forming the row key.
    fn key_len(self) -> usize {
        if self == TableId::T1 {
            2
        } else {
            1
        }
    }

    /// The printed Table 4 skips some primes of its range at column breaks;
    /// computed rows for those primes are reported, not counted as mismatches.
    pub fn fixture_is_sparse(self) -> bool {
        self == TableId::T4
    }

    pub fn columns(self) -> Vec<Column> {
        use ColumnKind::*;
        let col = |name: &str, kind| Column {
            name: name.to_string(),
            kind,
        };
        match self {
            TableId::T1 => vec![col("p", Int), col("n", Half), col("phi", Int), col("members", Set)],
            TableId::T2a | TableId::T2b => {
                let zs = if self == TableId::T2a { 7..=18 } else { 19..=28 };
                let mut cols = vec![col("p", Int)];
                cols.extend(zs.map(|z| col(&format!("z{z}"), Int)));
                cols
            }
            TableId::T3 | TableId::T4 => vec![col("p", Int), col("f", Real { precision: 2 })],
            TableId::T5 | TableId::T6 | TableId::T7 | TableId::T8 => vec![
                col("p", Int),
                col("f", Real { precision: 3 }),
                col("g", Real { precision: 3 }),
            ],
            TableId::T9 | TableId::T10 => vec![col("n", Int), col("phi", Int), col("b", Int)],
        }
    }

    fn caption(self) -> &'static str {
        match self {
            TableId::T1 => "rough sets X_n^p for 11 <= p <= 23 and n = 2p, 5p/2, 3p",
            TableId::T2a => "Phi(floor(pz/2), p) for 7 <= z <= 18, 11 <= p <= 89",
            TableId::T2b => "Phi(floor(pz/2), p) for 19 <= z <= 28, 11 <= p <= 89",
            TableId::T3 | TableId::T4 => "f(p) at alpha = d, two decimals",
            TableId::T5 | TableId::T6 | TableId::T7 | TableId::T8 => {
                "f(p) = prod_{q<p}(1-1/q) and g(p) = (1-0.2/ln^2 p)/(e^gamma ln p) - 0.0058, three decimals"
            }
            TableId::T9 => "Phi(n,11) and b = floor(2n/11)+1",
            TableId::T10 => "Phi(n,13) and b = floor(2n/13)+1",
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|id| id.as_str() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown table {s:?}; expected 1, 2a, 2b, 3..10")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Int,
    /// A multiple of 1/2, such as 27.5.
    Half,
    Real { precision: u8 },
    /// Pipe-separated integers.
    Set,
}

impl ColumnKind {
    fn name(self) -> &'static str {
        match self {
            ColumnKind::Int => "int",
            ColumnKind::Half => "half",
            ColumnKind::Real { .. } => "real",
            ColumnKind::Set => "set",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    /// Twice the value.
    Half(u64),
    Real(f64),
    Set(Vec<u64>),
    Empty,
}

impl Cell {
    fn render(&self, kind: ColumnKind) -> String {
        match (self, kind) {
            (Cell::Int(v), _) => v.to_string(),
            (Cell::Half(h), _) if h % 2 == 0 => (h / 2).to_string(),
            (Cell::Half(h), _) => format!("{}.5", h / 2),
            (Cell::Real(v), ColumnKind::Real { precision }) => {
                format!("{:.*}", precision as usize, round_half_away(*v, precision))
            }
            (Cell::Real(v), _) => v.to_string(),
            (Cell::Set(members), _) => join(members, "|"),
            (Cell::Empty, _) => String::new(),
        }
    }

    fn parse(text: &str, kind: ColumnKind) -> Result<Cell> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Cell::Empty);
        }
        let bad = || Error::Parse(format!("{text:?} is not a valid {} cell", kind.name()));
        Ok(match kind {
            ColumnKind::Int => Cell::Int(text.parse().map_err(|_| bad())?),
            ColumnKind::Half => match text.split_once('.') {
                None => Cell::Half(2 * text.parse::<u64>().map_err(|_| bad())?),
                Some((whole, "5")) => Cell::Half(2 * whole.parse::<u64>().map_err(|_| bad())? + 1),
                Some((whole, "0")) => Cell::Half(2 * whole.parse::<u64>().map_err(|_| bad())?),
                Some(_) => return Err(bad()),
            },
            ColumnKind::Real { .. } => Cell::Real(text.parse().map_err(|_| bad())?),
            ColumnKind::Set => Cell::Set(
                text.split('|')
                    .map(|m| m.trim().parse().map_err(|_| bad()))
                    .collect::<Result<_>>()?,
            ),
        })
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Half(h) if h % 2 == 0 => json!(h / 2),
            Cell::Half(h) => json!(*h as f64 / 2.0),
            Cell::Real(v) => json!(v),
            Cell::Set(m) => json!(m),
            Cell::Empty => Value::Null,
        }
    }

    fn from_json(v: &Value, kind: ColumnKind) -> Result<Cell> {
        let bad = || Error::Parse(format!("{v} is not a valid {} cell", kind.name()));
        if v.is_null() {
            return Ok(Cell::Empty);
        }
        Ok(match kind {
            ColumnKind::Int => Cell::Int(v.as_u64().ok_or_else(bad)?),
            ColumnKind::Half => {
                let twice = v.as_f64().ok_or_else(bad)? * 2.0;
                if twice < 0.0 || twice.fract() != 0.0 {
                    return Err(bad());
                }
                Cell::Half(twice as u64)
            }
            ColumnKind::Real { .. } => Cell::Real(v.as_f64().ok_or_else(bad)?),
            ColumnKind::Set => Cell::Set(
                v.as_array()
                    .ok_or_else(bad)?
                    .iter()
                    .map(|m| m.as_u64().ok_or_else(bad))
                    .collect::<Result<_>>()?,
            ),
        })
    }
}

fn join(items: &[u64], sep: &str) -> String {
    items.iter().map(u64::to_string).collect::<Vec<_>>().join(sep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Computed,
    Fixture,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableArtifact {
    pub id: TableId,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub source: Source,
}

impl TableArtifact {
    fn key(&self, row: &[Cell]) -> String {
        row.iter()
            .zip(&self.columns)
            .take(self.id.key_len())
            .map(|(c, col)| format!("{}={}", col.name, c.render(col.kind)))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellMismatch {
    pub row: String,
    pub column: String,
    pub computed: String,
    pub fixture: String,
}

// ---------------------------------------------------------------------------
// Generation

fn require_limit(table: &PrimeTable, needed: u64) -> Result<()> {
    if table.limit() < needed {
        return Err(Error::ResourceLimit {
            what: "prime table limit",
            needed,
            budget: table.limit(),
        });
    }
    Ok(())
}

fn primes_between(table: &PrimeTable, lo: u64, hi: u64) -> Vec<u64> {
    table.iter().skip_while(|&p| p < lo).take_while(|&p| p <= hi).collect()
}

/// Prime range printed in each Euler-constant and Mertens-product table.
fn prime_range(id: TableId) -> (u64, u64) {
    match id {
        TableId::T3 => (19, 1399),
        TableId::T4 => (1409, 2971),
        TableId::T5 => (19, 769),
        TableId::T6 => (773, 1697),
        TableId::T7 => (1699, 2707),
        TableId::T8 => (2711, 2971),
        _ => unreachable!("not a prime-indexed table"),
    }
}

pub fn generate_table(id: TableId, table: &PrimeTable) -> Result<TableArtifact> {
    let rows = match id {
        TableId::T1 => {
            require_limit(table, 69)?;
            let mut rows = Vec::new();
            for p in primes_between(table, 11, 23) {
                for twice_n in [4 * p, 5 * p, 6 * p] {
                    let set = rough_set(twice_n / 2, p, table)?;
                    rows.push(vec![
                        Cell::Int(p),
                        Cell::Half(twice_n),
                        Cell::Int(set.count()),
                        Cell::Set(set.members),
                    ]);
                }
            }
            rows
        }
        TableId::T2a | TableId::T2b => {
            require_limit(table, 89 * 28 / 2)?;
            let zs = if id == TableId::T2a { 7..=18u64 } else { 19..=28 };
            let mut rows = Vec::new();
            for p in primes_between(table, 11, 89) {
                let scan = case2_scan(p, table)?;
                if let Some(&(z, _)) = scan.last().filter(|(z, _)| *z > 28) {
                    return Err(Error::invalid(format!("scan for p = {p} runs to z = {z}, past the table")));
                }
                let mut row = vec![Cell::Int(p)];
                row.extend(zs.clone().map(|z| {
                    scan.iter()
                        .find(|(sz, _)| *sz == z)
                        .map_or(Cell::Empty, |&(_, phi)| Cell::Int(phi))
                }));
                rows.push(row);
            }
            rows
        }
        TableId::T3 | TableId::T4 => {
            let (lo, hi) = prime_range(id);
            require_limit(table, hi)?;
            primes_between(table, lo, hi)
                .into_iter()
                .map(|p| {
                    let f = euler_lhs(p, threshold_d(p)?, EulerVariant::SmallP)?;
                    Ok(vec![Cell::Int(p), Cell::Real(f)])
                })
                .collect::<Result<_>>()?
        }
        TableId::T5 | TableId::T6 | TableId::T7 | TableId::T8 => {
            let (lo, hi) = prime_range(id);
            require_limit(table, hi)?;
            primes_between(table, lo, hi)
                .into_iter()
                .map(|p| {
                    let f = mertens_product(p, table)?;
                    let g = dusart_rhs(p as f64, true)?;
                    Ok(vec![Cell::Int(p), Cell::Real(f), Cell::Real(g)])
                })
                .collect::<Result<_>>()?
        }
        TableId::T9 | TableId::T10 => {
            let (p, lo, hi) = if id == TableId::T9 { (11, 70, 121) } else { (13, 190, 223) };
            let set = rough_set(hi, p, table)?;
            (lo..=hi)
                .map(|n| {
                    let phi = set.members.partition_point(|&m| m <= n) as u64;
                    vec![Cell::Int(n), Cell::Int(phi), Cell::Int(2 * n / p + 1)]
                })
                .collect()
        }
    };
    Ok(TableArtifact {
        id,
        columns: id.columns(),
        rows,
        source: Source::Computed,
    })
}

// ---------------------------------------------------------------------------
// Fixtures

fn fixture_text(id: TableId) -> &'static str {
    match id {
        TableId::T1 => include_str!("../fixtures/table1.csv"),
        TableId::T2a => include_str!("../fixtures/table2a.csv"),
        TableId::T2b => include_str!("../fixtures/table2b.csv"),
        TableId::T3 => include_str!("../fixtures/table3.csv"),
        TableId::T4 => include_str!("../fixtures/table4.csv"),
        TableId::T5 => include_str!("../fixtures/table5.csv"),
        TableId::T6 => include_str!("../fixtures/table6.csv"),
        TableId::T7 => include_str!("../fixtures/table7.csv"),
        TableId::T8 => include_str!("../fixtures/table8.csv"),
        TableId::T9 => include_str!("../fixtures/table9.csv"),
        TableId::T10 => include_str!("../fixtures/table10.csv"),
    }
}

/// The printed values, as transcribed into the embedded CSV files.
pub fn fixture(id: TableId) -> Result<TableArtifact> {
    parse_csv(id, fixture_text(id), Source::Fixture)
}

/// Parses CSV produced by [`render_table`] or a fixture file. Lines starting
/// with `#` are ignored; the header must match the schema of `id`.
pub fn parse_csv(id: TableId, text: &str, source: Source) -> Result<TableArtifact> {
    let columns = id.columns();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse(format!("table {id}: missing header")))?;
    let expected: Vec<&str> = columns.iter().map(|c| c.name.as_str()).collect();
    let got: Vec<&str> = header.split(',').map(str::trim).collect();
    if got != expected {
        return Err(Error::Schema(format!(
            "table {id}: header {got:?} does not match schema {expected:?}"
        )));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(Error::Parse(format!(
                "table {id} row {}: {} fields, expected {}",
                i + 1,
                fields.len(),
                columns.len()
            )));
        }
        rows.push(
            fields
                .iter()
                .zip(&columns)
                .map(|(f, c)| Cell::parse(f, c.kind))
                .collect::<Result<_>>()?,
        );
    }
    Ok(TableArtifact {
        id,
        columns,
        rows,
        source,
    })
}

// ---------------------------------------------------------------------------
// Diffing

fn cells_agree(computed: &Cell, fixture: &Cell, kind: ColumnKind) -> bool {
    match (computed, fixture, kind) {
        (Cell::Real(a), Cell::Real(b), ColumnKind::Real { precision }) => {
            (a - b).abs() <= print_tolerance(precision)
        }
        (a, b, _) => a == b,
    }
}

/// Compares two artifacts cell by cell. Rows are matched on their key
/// columns; integer, set and empty cells must agree exactly, real cells
/// within the print tolerance of their column.
pub fn diff_tables(computed: &TableArtifact, fixture: &TableArtifact) -> Result<VerificationReport> {
    let start = Instant::now();
    if computed.id != fixture.id {
        return Err(Error::Schema(format!(
            "cannot diff table {} against table {}",
            computed.id, fixture.id
        )));
    }
    if computed.columns != fixture.columns {
        return Err(Error::Schema(format!("table {}: column schemas differ", computed.id)));
    }
    let id = computed.id;
    let mut report = VerificationReport::new(format!("table-{id}"));
    let mut unmatched: Vec<Option<&Vec<Cell>>> = computed.rows.iter().map(Some).collect();
    let computed_keys: Vec<String> = computed.rows.iter().map(|r| computed.key(r)).collect();
    let mut rounding_differences = 0u64;

    for frow in &fixture.rows {
        let key = fixture.key(frow);
        let Some(idx) = computed_keys
            .iter()
            .enumerate()
            .position(|(i, k)| *k == key && unmatched[i].is_some())
        else {
            report.mismatches.push(CellMismatch {
                row: key,
                column: "*".into(),
                computed: "<missing>".into(),
                fixture: "<row>".into(),
            });
            continue;
        };
        let crow = unmatched[idx].take().expect("unmatched row");
        for ((c, f), col) in crow.iter().zip(frow).zip(&fixture.columns) {
            report.checked += 1;
            if !cells_agree(c, f, col.kind) {
                report.mismatches.push(CellMismatch {
                    row: key.clone(),
                    column: col.name.clone(),
                    computed: c.render(col.kind),
                    fixture: f.render(col.kind),
                });
            } else if c.render(col.kind) != f.render(col.kind) {
                rounding_differences += 1;
            }
        }
    }

    let extra: Vec<String> = unmatched
        .iter()
        .flatten()
        .map(|row| computed.key(row))
        .collect();
    if !extra.is_empty() {
        if id.fixture_is_sparse() {
            report.notes.push(format!(
                "{} computed rows are not printed in the table: {}",
                extra.len(),
                extra.join("; ")
            ));
        } else {
            for key in extra {
                report.mismatches.push(CellMismatch {
                    row: key,
                    column: "*".into(),
                    computed: "<row>".into(),
                    fixture: "<missing>".into(),
                });
            }
        }
    }
    if rounding_differences > 0 {
        report.notes.push(format!(
            "{rounding_differences} real cells agree within tolerance but round differently in the last digit"
        ));
    }
    report.finish(start);
    Ok(report)
}

/// Regenerates `id` and diffs it against its fixture.
pub fn check_table(id: TableId, table: &PrimeTable) -> Result<VerificationReport> {
    diff_tables(&generate_table(id, table)?, &fixture(id)?)
}

// ---------------------------------------------------------------------------
// Rendering

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
    Json,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            "json" => Ok(TableFormat::Json),
            other => Err(Error::invalid(format!("unknown table format {other:?}"))),
        }
    }
}

pub fn render_table(artifact: &TableArtifact, format: TableFormat) -> String {
    let cols = &artifact.columns;
    let render_row = |row: &[Cell]| -> Vec<String> { row.iter().zip(cols).map(|(c, col)| c.render(col.kind)).collect() };
    match format {
        TableFormat::Csv => {
            let mut out = cols.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(",");
            out.push('\n');
            for row in &artifact.rows {
                out.push_str(&render_row(row).join(","));
                out.push('\n');
            }
            out
        }
        TableFormat::Markdown => {
            let mut out = format!("Table {}: {}\n\n", artifact.id, artifact.id.caption());
            let names: Vec<&str> = cols.iter().map(|c| c.name.as_str()).collect();
            out.push_str(&format!("| {} |\n", names.join(" | ")));
            out.push_str(&format!("|{}\n", "---|".repeat(cols.len())));
            for row in &artifact.rows {
                let cells: Vec<String> = render_row(row).into_iter().map(|c| c.replace('|', ", ")).collect();
                out.push_str(&format!("| {} |\n", cells.join(" | ")));
            }
            out
        }
        TableFormat::Json => {
            let columns: Vec<Value> = cols
                .iter()
                .map(|c| match c.kind {
                    ColumnKind::Real { precision } => {
                        json!({ "name": c.name, "kind": "real", "precision": precision })
                    }
                    kind => json!({ "name": c.name, "kind": kind.name() }),
                })
                .collect();
            let rows: Vec<Value> = artifact
                .rows
                .iter()
                .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
                .collect();
            let doc = json!({
                "id": artifact.id.as_str(),
                "source": artifact.source,
                "columns": columns,
                "rows": rows,
            });
            let mut out = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
            out.push('\n');
            out
        }
    }
}

/// Parses the JSON form of [`render_table`]; cells are decoded by the schema
/// of the table id, which must match the embedded column list.
pub fn parse_json(text: &str) -> Result<TableArtifact> {
    let doc: Value = serde_json::from_str(text)?;
    let id: TableId = doc["id"]
        .as_str()
        .ok_or_else(|| Error::Parse("missing table id".into()))?
        .parse()?;
    let source: Source = serde_json::from_value(doc["source"].clone())?;
    let columns = id.columns();
    let names: Vec<&str> = doc["columns"]
        .as_array()
        .ok_or_else(|| Error::Parse("missing columns".into()))?
        .iter()
        .map(|c| c["name"].as_str().unwrap_or(""))
        .collect();
    if names != columns.iter().map(|c| c.name.as_str()).collect::<Vec<_>>() {
        return Err(Error::Schema(format!("table {id}: columns {names:?} do not match schema")));
    }
    let rows = doc["rows"]
        .as_array()
        .ok_or_else(|| Error::Parse("missing rows".into()))?
        .iter()
        .map(|r| {
            let cells = r.as_array().ok_or_else(|| Error::Parse("row is not an array".into()))?;
            if cells.len() != columns.len() {
                return Err(Error::Parse(format!("row has {} cells, expected {}", cells.len(), columns.len())));
            }
            cells.iter().zip(&columns).map(|(v, c)| Cell::from_json(v, c.kind)).collect()
        })
        .collect::<Result<_>>()?;
    Ok(TableArtifact {
        id,
        columns,
        rows,
        source,
    })
}

/// Worst status across a set of table checks.
pub fn overall_status(reports: &[VerificationReport]) -> Status {
    reports.iter().fold(Status::Pass, |s, r| s.worst(r.status))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> PrimeTable {
        PrimeTable::new(10_000).unwrap()
    }

    #[test]
    fn selectors() {
        assert_eq!(TableId::parse_selector("2").unwrap(), vec![TableId::T2a, TableId::T2b]);
        assert_eq!(TableId::parse_selector("all").unwrap().len(), 11);
        assert_eq!("10".parse::<TableId>().unwrap(), TableId::T10);
        assert!("11".parse::<TableId>().is_err());
        assert!(TableId::parse_selector("0").is_err());
    }

    #[test]
    fn half_cells() {
        assert_eq!(Cell::parse("27.5", ColumnKind::Half).unwrap(), Cell::Half(55));
        assert_eq!(Cell::parse("22", ColumnKind::Half).unwrap(), Cell::Half(44));
        assert!(Cell::parse("22.25", ColumnKind::Half).is_err());
        assert_eq!(Cell::Half(55).render(ColumnKind::Half), "27.5");
    }

    #[test]
    fn table1_rows() {
        let t = generate_table(TableId::T1, &table()).unwrap();
        assert_eq!(t.rows.len(), 15);
        let csv = render_table(&t, TableFormat::Csv);
        assert!(csv.starts_with("p,n,phi,members\n11,22,5,1|11|13|17|19\n"));
        let row = t.rows.iter().find(|r| r[0] == Cell::Int(19) && r[1] == Cell::Half(95)).unwrap();
        assert_eq!(row[2], Cell::Int(9));
        assert_eq!(row[3], Cell::Set(vec![1, 19, 23, 29, 31, 37, 41, 43, 47]));
    }

    #[test]
    fn table3_and_5_anchors() {
        let t = table();
        let t3 = generate_table(TableId::T3, &t).unwrap();
        let csv = render_table(&t3, TableFormat::Csv);
        assert!(csv.starts_with("p,f\n19,2.06\n23,3.42\n"), "{csv}");
        let t5 = generate_table(TableId::T5, &t).unwrap();
        assert!(render_table(&t5, TableFormat::Csv).starts_with("p,f,g\n19,0.181,0.180\n"));
        assert_eq!(generate_table(TableId::T9, &t).unwrap().rows.len(), 52);
    }

    #[test]
    fn self_diff_and_injected_fault() {
        let f = fixture(TableId::T5).unwrap();
        assert_eq!(diff_tables(&f, &f).unwrap().status, Status::Pass);
        let mut bad = f.clone();
        bad.rows[3][2] = Cell::Real(0.5);
        let r = diff_tables(&bad, &f).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.mismatches.len(), 1);
        assert_eq!(r.mismatches[0].column, "g");
        assert_eq!(r.mismatches[0].row, "p=31");
    }

    #[test]
    fn schema_mismatch_is_structural() {
        let a = fixture(TableId::T9).unwrap();
        let b = fixture(TableId::T10).unwrap();
        assert!(matches!(diff_tables(&a, &b), Err(Error::Schema(_))));
        let mut c = a.clone();
        c.columns[1].name = "Phi".into();
        assert!(matches!(diff_tables(&c, &a), Err(Error::Schema(_))));
        assert!(matches!(
            parse_csv(TableId::T9, "n,phi\n1,2\n", Source::Fixture),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn empty_artifact_renders_header_only() {
        let a = TableArtifact {
            id: TableId::T9,
            columns: TableId::T9.columns(),
            rows: vec![],
            source: Source::Computed,
        };
        assert_eq!(render_table(&a, TableFormat::Csv), "n,phi,b\n");
    }

    #[test]
    fn sparse_table_notes_extra_rows() {
        let r = check_table(TableId::T4, &table()).unwrap();
        assert_eq!(r.status, Status::Pass, "{:?}", r.mismatches);
        assert!(r.notes.iter().any(|n| n.starts_with("28 computed rows")), "{:?}", r.notes);
    }
}
