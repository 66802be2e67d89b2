//! Typed in-memory relational store: CSV loading and execution of the SQL
//! subset with bag semantics.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::query::{Aggregate, ColumnRef, SqlQuery};
use crate::schema::{ColumnRole, ColumnSpec, SchemaManifest, TableSpec, SYNTHETIC_KEY};
use crate::value::{compare_values, satisfies, CellValue, DataType, TypeClash};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoadError {
    #[error("missing table file `{0}`")]
    MissingTableFile(String),
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("table `{table}`: header {found:?} does not match columns {expected:?}")]
    HeaderMismatch { table: String, expected: Vec<String>, found: Vec<String> },
    #[error("table `{table}` row {row} column `{column}`: {message}")]
    TypeCoercion { table: String, row: usize, column: String, message: String },
    #[error("table `{table}`: {message}")]
    Integrity { table: String, message: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExecError {
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("join condition `{0}` is not a foreign key / primary key pair of the schema")]
    InvalidJoin(String),
    #[error("unsupported query: {0}")]
    Unsupported(String),
}

impl From<TypeClash> for ExecError {
    fn from(c: TypeClash) -> Self {
        ExecError::TypeMismatch(format!("cannot compare {} with {}", c.left, c.right))
    }
}

pub type Row = Vec<CellValue>;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Effective schema; keyless tables carry their synthetic `row_id` as the
    /// last column.
    pub spec: TableSpec,
    pub rows: Vec<Row>,
}

/// Query output: labelled columns and a multiset of rows.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResultSet {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl ResultSet {
    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    /// Single-line JSON-ish rendering used in diagnostics.
    pub fn render(&self) -> String {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| format!("({})", r.iter().map(CellValue::to_literal).collect::<Vec<_>>().join(", ")))
            .collect();
        format!("[{}] {}", self.columns.join(", "), rows.join(" "))
    }
}

/// Immutable typed database.
#[derive(Debug, Clone, PartialEq)]
pub struct Database {
    tables: Vec<Table>,
    by_name: HashMap<String, usize>,
}

fn effective_spec(spec: &TableSpec) -> TableSpec {
    let mut spec = spec.clone();
    if spec.has_synthetic_key() {
        spec.columns.push(ColumnSpec { name: SYNTHETIC_KEY.into(), role: ColumnRole::Property, datatype: DataType::Integer });
    }
    spec
}

/// Loads `<dir>/<table>.csv` for every manifest table and checks keys and
/// referential integrity.
pub fn load_database(manifest: &SchemaManifest, dir: impl AsRef<Path>) -> Result<Database, LoadError> {
    let dir = dir.as_ref();
    let mut tables = Vec::with_capacity(manifest.tables.len());
    for spec in &manifest.tables {
        let path = dir.join(format!("{}.csv", spec.name));
        if !path.is_file() {
            return Err(LoadError::MissingTableFile(path.display().to_string()));
        }
        let io = |e: csv::Error| LoadError::Io { path: path.display().to_string(), message: e.to_string() };
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(&path).map_err(io)?;
        let header: Vec<String> = reader.headers().map_err(io)?.iter().map(|h| h.trim().to_lowercase()).collect();
        let expected: Vec<String> = spec.columns.iter().map(|c| c.name.clone()).collect();
        let mut order = Vec::with_capacity(expected.len());
        for name in &expected {
            match header.iter().position(|h| h == name) {
                Some(i) => order.push(i),
                None => return Err(LoadError::HeaderMismatch { table: spec.name.clone(), expected, found: header }),
            }
        }
        if header.len() != expected.len() {
            return Err(LoadError::HeaderMismatch { table: spec.name.clone(), expected, found: header });
        }
        let mut rows = Vec::new();
        for (r, record) in reader.records().enumerate() {
            let record = record.map_err(io)?;
            let mut row = Vec::with_capacity(spec.columns.len() + 1);
            for (c, &src) in spec.columns.iter().zip(&order) {
                let raw = record.get(src).unwrap_or("");
                let value = CellValue::coerce(raw, c.datatype).map_err(|message| LoadError::TypeCoercion {
                    table: spec.name.clone(),
                    row: r + 1,
                    column: c.name.clone(),
                    message,
                })?;
                row.push(value);
            }
            if spec.has_synthetic_key() {
                row.push(CellValue::Integer(r as i64));
            }
            rows.push(row);
        }
        tables.push(Table { spec: effective_spec(spec), rows });
    }
    Database::new(tables)
}

impl Database {
    /// Builds a database from in-memory tables whose specs already include
    /// any synthetic key column, then checks integrity.
    pub fn new(tables: Vec<Table>) -> Result<Self, LoadError> {
        let by_name = tables.iter().enumerate().map(|(i, t)| (t.spec.name.clone(), i)).collect();
        let db = Database { tables, by_name };
        db.check_integrity()?;
        Ok(db)
    }

    /// Builds a database from rows aligned with manifest columns, appending
    /// synthetic `row_id`s to keyless tables.
    pub fn from_rows(manifest: &SchemaManifest, mut rows: BTreeMap<String, Vec<Row>>) -> Result<Self, LoadError> {
        let mut tables = Vec::new();
        for spec in &manifest.tables {
            let mut table_rows = rows.remove(&spec.name).unwrap_or_default();
            for (i, row) in table_rows.iter_mut().enumerate() {
                if row.len() != spec.columns.len() {
                    return Err(LoadError::Integrity {
                        table: spec.name.clone(),
                        message: format!("row {i} has {} cells, expected {}", row.len(), spec.columns.len()),
                    });
                }
                if spec.has_synthetic_key() {
                    row.push(CellValue::Integer(i as i64));
                }
            }
            tables.push(Table { spec: effective_spec(spec), rows: table_rows });
        }
        Database::new(tables)
    }

    fn check_integrity(&self) -> Result<(), LoadError> {
        let mut keys: HashMap<&str, std::collections::HashSet<&CellValue>> = HashMap::new();
        for t in &self.tables {
            let ki = t.spec.column_index(t.spec.key_column()).expect("key column present");
            let set = keys.entry(&t.spec.name).or_default();
            for (r, row) in t.rows.iter().enumerate() {
                let k = &row[ki];
                if k.is_null() {
                    return Err(LoadError::Integrity {
                        table: t.spec.name.clone(),
                        message: format!("row {} has a null primary key", r + 1),
                    });
                }
                if !set.insert(k) {
                    return Err(LoadError::Integrity {
                        table: t.spec.name.clone(),
                        message: format!("duplicate primary key {}", k.to_literal()),
                    });
                }
            }
        }
        for t in &self.tables {
            for (ci, c) in t.spec.columns.iter().enumerate() {
                let Some(parent) = c.references() else { continue };
                let parent_keys = keys.get(parent).ok_or_else(|| LoadError::Integrity {
                    table: t.spec.name.clone(),
                    message: format!("`{}` references missing table `{parent}`", c.name),
                })?;
                for (r, row) in t.rows.iter().enumerate() {
                    let v = &row[ci];
                    if !v.is_null() && !parent_keys.contains(v) {
                        return Err(LoadError::Integrity {
                            table: t.spec.name.clone(),
                            message: format!(
                                "row {} column `{}` = {} has no matching `{parent}` key",
                                r + 1,
                                c.name,
                                v.to_literal()
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.by_name.get(name).map(|&i| &self.tables[i])
    }

    /// Deterministic textual dump of every table, in manifest order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for t in &self.tables {
            let _ = writeln!(out, "# {}", t.spec.name);
            let _ = writeln!(out, "{}", t.spec.columns.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join("\t"));
            for row in &t.rows {
                let _ = writeln!(out, "{}", row.iter().map(CellValue::to_literal).collect::<Vec<_>>().join("\t"));
            }
        }
        out
    }

    fn resolve(&self, chain: &[&str], c: &ColumnRef) -> Result<(usize, usize), ExecError> {
        let pos = chain.iter().position(|t| *t == c.table).ok_or_else(|| ExecError::UnknownTable(c.table.clone()))?;
        let table = self.table(&c.table).ok_or_else(|| ExecError::UnknownTable(c.table.clone()))?;
        let col = table.spec.column_index(&c.column).ok_or_else(|| ExecError::UnknownColumn(c.to_string()))?;
        Ok((pos, col))
    }
}

/// Runs a SQL query. Inner joins multiply matching rows, WHERE is a
/// conjunction, aggregates skip nulls; `count` of nothing is 0 while
/// `max`/`min`/`avg` of nothing is a single null.
pub fn execute_sql(db: &Database, q: &SqlQuery) -> Result<ResultSet, ExecError> {
    q.validate().map_err(|e| ExecError::Unsupported(e.to_string()))?;
    let chain = q.tables();
    let tables: Vec<&Table> = chain
        .iter()
        .map(|t| db.table(t).ok_or_else(|| ExecError::UnknownTable(t.to_string())))
        .collect::<Result<_, _>>()?;

    // Join plan: (position of the earlier table, its column, new table's column).
    let mut plan = Vec::with_capacity(q.joins.len());
    for (ji, j) in q.joins.iter().enumerate() {
        let (new_ref, old_ref) = if j.left.table == j.table { (&j.left, &j.right) } else { (&j.right, &j.left) };
        let (_, new_col) = db.resolve(&chain, new_ref)?;
        let (old_pos, old_col) = db.resolve(&chain[..=ji], old_ref)?;
        let new_spec = &tables[ji + 1].spec;
        let old_spec = &tables[old_pos].spec;
        let fk_pk = |child: &TableSpec, fk: &ColumnRef, parent: &TableSpec, pk: &ColumnRef| {
            child.column(&fk.column).and_then(ColumnSpec::references) == Some(parent.name.as_str())
                && parent.primary_key.as_deref() == Some(pk.column.as_str())
        };
        if !(fk_pk(new_spec, new_ref, old_spec, old_ref) || fk_pk(old_spec, old_ref, new_spec, new_ref)) {
            return Err(ExecError::InvalidJoin(format!("{} = {}", j.left, j.right)));
        }
        plan.push((old_pos, old_col, new_col));
    }

    let mut conditions = Vec::with_capacity(q.conditions.len());
    for c in &q.conditions {
        let (pos, col) = db.resolve(&chain, &c.column)?;
        let declared = tables[pos].spec.columns[col].datatype;
        let numeric = |d: DataType| d != DataType::Text;
        if let Some(vt) = c.value.datatype() {
            if numeric(vt) != numeric(declared) {
                return Err(ExecError::TypeMismatch(format!(
                    "`{}` is {declared} but is compared with {}",
                    c.column,
                    c.value.to_literal()
                )));
            }
        }
        conditions.push((pos, col, c.op, &c.value));
    }
    let projection: Vec<(usize, usize)> =
        q.select.iter().map(|s| db.resolve(&chain, &s.column)).collect::<Result<_, _>>()?;

    // Each tuple holds one row index per chain table.
    let mut tuples: Vec<Vec<usize>> = (0..tables[0].rows.len()).map(|r| vec![r]).collect();
    for (ji, &(old_pos, old_col, new_col)) in plan.iter().enumerate() {
        let new_table = tables[ji + 1];
        let mut index: HashMap<&CellValue, Vec<usize>> = HashMap::new();
        for (r, row) in new_table.rows.iter().enumerate() {
            if !row[new_col].is_null() {
                index.entry(&row[new_col]).or_default().push(r);
            }
        }
        let mut next = Vec::new();
        for t in &tuples {
            let key = &tables[old_pos].rows[t[old_pos]][old_col];
            if let Some(matches) = index.get(key) {
                for &r in matches {
                    let mut nt = t.clone();
                    nt.push(r);
                    next.push(nt);
                }
            }
        }
        tuples = next;
    }
    let cell = |t: &[usize], pos: usize, col: usize| -> &CellValue { &tables[pos].rows[t[pos]][col] };
    let mut kept = Vec::with_capacity(tuples.len());
    for t in tuples {
        let mut ok = true;
        for &(pos, col, op, value) in &conditions {
            if !satisfies(cell(&t, pos, col), op, value)? {
                ok = false;
                break;
            }
        }
        if ok {
            kept.push(t);
        }
    }

    let columns = q.select.iter().map(|s| s.label()).collect();
    if !q.is_aggregate() {
        let rows = kept.iter().map(|t| projection.iter().map(|&(p, c)| cell(t, p, c).clone()).collect()).collect();
        return Ok(ResultSet { columns, rows });
    }
    let mut row = Vec::with_capacity(q.select.len());
    for (item, &(p, c)) in q.select.iter().zip(&projection) {
        let values: Vec<&CellValue> = kept.iter().map(|t| cell(t, p, c)).collect();
        row.push(aggregate(item.agg.expect("aggregate query"), values)?);
    }
    Ok(ResultSet { columns, rows: vec![row] })
}

/// Aggregates over non-null values. Shared by both executors so that the
/// numeric conventions stay identical.
pub fn aggregate<'a>(agg: Aggregate, values: impl IntoIterator<Item = &'a CellValue>) -> Result<CellValue, ExecError> {
    let values: Vec<&CellValue> = values.into_iter().filter(|v| !v.is_null()).collect();
    match agg {
        Aggregate::Count => Ok(CellValue::Integer(values.len() as i64)),
        Aggregate::Max | Aggregate::Min => {
            let mut best: Option<&CellValue> = None;
            for v in values {
                best = match best {
                    None => Some(v),
                    Some(b) => {
                        let ord = compare_values(v, b)?.unwrap_or(std::cmp::Ordering::Equal);
                        let better = if agg == Aggregate::Max { ord.is_gt() } else { ord.is_lt() };
                        Some(if better { v } else { b })
                    }
                };
            }
            Ok(best.cloned().unwrap_or(CellValue::Null))
        }
        Aggregate::Avg => {
            if values.is_empty() {
                return Ok(CellValue::Null);
            }
            let mut sum = 0.0;
            for v in &values {
                sum += v.as_f64().ok_or_else(|| ExecError::TypeMismatch("avg over text".into()))?;
            }
            Ok(CellValue::Float(sum / values.len() as f64))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_sql;
    use crate::schema::{ColumnSpec, TableSpec};

    fn manifest() -> SchemaManifest {
        SchemaManifest::new(vec![
            TableSpec::new(
                "patients",
                vec![
                    ColumnSpec::primary_key("subject_id", DataType::Integer),
                    ColumnSpec::property("gender", DataType::Text),
                    ColumnSpec::property("age", DataType::Integer),
                ],
            ),
            TableSpec::new(
                "admissions",
                vec![
                    ColumnSpec::primary_key("hadm_id", DataType::Integer),
                    ColumnSpec::foreign_key("subject_id", "patients", DataType::Integer),
                    ColumnSpec::property("days", DataType::Float),
                ],
            ),
        ])
        .unwrap()
    }

    fn db() -> Database {
        let t = CellValue::text;
        let i = CellValue::Integer;
        let f = CellValue::Float;
        Database::from_rows(
            &manifest(),
            BTreeMap::from([
                (
                    "patients".to_string(),
                    vec![vec![i(1), t("f"), i(30)], vec![i(2), t("m"), CellValue::Null], vec![i(3), t("f"), i(50)]],
                ),
                (
                    "admissions".to_string(),
                    vec![vec![i(10), i(1), f(2.0)], vec![i(11), i(1), f(3.0)], vec![i(12), i(2), f(1.0)]],
                ),
            ]),
        )
        .unwrap()
    }

    fn run(sql: &str) -> Result<ResultSet, ExecError> {
        execute_sql(&db(), &parse_sql(sql).unwrap())
    }

    #[test]
    fn join_multiplies_rows() {
        let r = run("select count ( patients.age ) from patients inner join admissions on patients.subject_id = admissions.subject_id").unwrap();
        // patient 2's admission has a null age
        assert_eq!(r.rows, vec![vec![CellValue::Integer(2)]]);
        let r = run("select avg ( admissions.days ) from patients inner join admissions on patients.subject_id = admissions.subject_id where patients.gender = \"f\"").unwrap();
        assert_eq!(r.rows, vec![vec![CellValue::Float(2.5)]]);
    }

    #[test]
    fn empty_aggregates() {
        let r = run("select count ( patients.age ) , max ( patients.age ) from patients where patients.age > 100").unwrap();
        assert_eq!(r.rows, vec![vec![CellValue::Integer(0), CellValue::Null]]);
        let r = run("select patients.age from patients where patients.age > 100").unwrap();
        assert!(r.rows.is_empty());
    }

    #[test]
    fn avg_of_integers_is_float() {
        let r = run("select avg ( patients.age ) from patients").unwrap();
        assert_eq!(r.rows, vec![vec![CellValue::Float(40.0)]]);
    }

    #[test]
    fn errors() {
        assert_eq!(run("select x.a from x"), Err(ExecError::UnknownTable("x".into())));
        assert!(matches!(run("select patients.nope from patients"), Err(ExecError::UnknownColumn(_))));
        assert!(matches!(run("select patients.age from patients where patients.gender < 3"), Err(ExecError::TypeMismatch(_))));
        assert!(matches!(
            run("select patients.age from patients inner join admissions on patients.age = admissions.hadm_id"),
            Err(ExecError::InvalidJoin(_))
        ));
    }

    #[test]
    fn integrity_violations() {
        let rows = BTreeMap::from([
            ("patients".to_string(), vec![vec![CellValue::Integer(1), CellValue::text("f"), CellValue::Integer(3)]]),
            ("admissions".to_string(), vec![vec![CellValue::Integer(5), CellValue::Integer(999), CellValue::Float(1.0)]]),
        ]);
        assert!(matches!(Database::from_rows(&manifest(), rows), Err(LoadError::Integrity { .. })));
        let dup = BTreeMap::from([(
            "patients".to_string(),
            vec![
                vec![CellValue::Integer(1), CellValue::Null, CellValue::Null],
                vec![CellValue::Integer(1), CellValue::Null, CellValue::Null],
            ],
        )]);
        assert!(matches!(Database::from_rows(&manifest(), dup), Err(LoadError::Integrity { .. })));
    }
}
