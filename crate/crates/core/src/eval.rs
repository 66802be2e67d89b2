//! Accuracy metrics, the SQL/SPARQL equivalence verifier and corpus
//! statistics.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufRead;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kg::{execute_sparql, KnowledgeGraph};
use crate::query::{
    canonical_tokens, parse_sparql, parse_sql, serialize_sparql, structural_tokens, Lang, SparqlQuery, SqlQuery,
    TokenStream, Tokenization,
};
use crate::relational::{execute_sql, Database, ResultSet};
use crate::schema::SchemaGraph;
use crate::transpile::sql_to_sparql;
use crate::value::CellValue;

const REL_TOL: f64 = 1e-9;
const ABS_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{path} line {line}: {message}")]
    FileFormat { path: String, line: usize, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("gold query of pair {index} does not execute: {message}")]
    GoldFailed { index: usize, message: String },
}

/// Cell equality used when comparing answers: text compares trimmed and
/// case-insensitively, numbers within a relative (or, near zero, absolute)
/// tolerance of 1e-9.
pub fn cells_match(a: &CellValue, b: &CellValue) -> bool {
    match (a, b) {
        (CellValue::Null, CellValue::Null) => true,
        (CellValue::Text(x), CellValue::Text(y)) => x.trim().to_lowercase() == y.trim().to_lowercase(),
        (CellValue::Integer(x), CellValue::Integer(y)) => x == y,
        (x, y) if x.is_numeric() && y.is_numeric() => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            let diff = (x - y).abs();
            diff <= ABS_TOL || diff <= REL_TOL * x.abs().max(y.abs())
        }
        _ => false,
    }
}

fn sort_key(row: &[CellValue]) -> Vec<(u8, f64, String)> {
    row.iter()
        .map(|c| match c {
            CellValue::Null => (0, 0.0, String::new()),
            CellValue::Integer(_) | CellValue::Float(_) => (1, c.as_f64().unwrap(), String::new()),
            CellValue::Text(s) => (2, 0.0, s.trim().to_lowercase()),
        })
        .collect()
}

fn rows_match(a: &[CellValue], b: &[CellValue]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| cells_match(x, y))
}

/// Unordered multiset comparison of two result sets of the same arity.
/// Column labels are ignored.
pub fn results_match(a: &ResultSet, b: &ResultSet) -> bool {
    if a.arity() != b.arity() || a.rows.len() != b.rows.len() {
        return false;
    }
    fn order(rs: &ResultSet) -> Vec<&Vec<CellValue>> {
        type Keyed<'a> = (Vec<(u8, f64, String)>, &'a Vec<CellValue>);
        let mut rows: Vec<Keyed> = rs.rows.iter().map(|r| (sort_key(r), r)).collect();
        rows.sort_by(|x, y| {
            x.0.iter()
                .zip(&y.0)
                .map(|(p, q)| p.0.cmp(&q.0).then(p.1.total_cmp(&q.1)).then_with(|| p.2.cmp(&q.2)))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        rows.into_iter().map(|(_, r)| r).collect()
    }
    let (x, y) = (order(a), order(b));
    if x.iter().zip(&y).all(|(p, q)| rows_match(p, q)) {
        return true;
    }
    // Values within tolerance can sort differently; fall back to matching.
    let mut used = vec![false; y.len()];
    'rows: for p in &x {
        for (j, q) in y.iter().enumerate() {
            if !used[j] && rows_match(p, q) {
                used[j] = true;
                continue 'rows;
            }
        }
        return false;
    }
    true
}

/// Outcome of one metric on one pair; `note` explains a failure that came
/// from an error rather than a mismatch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Outcome {
    fn pass(ok: bool) -> Self {
        Outcome { ok, note: None }
    }

    fn error(note: String) -> Self {
        Outcome { ok: false, note: Some(note) }
    }
}

/// Logic-form accuracy: identical canonical token streams.
pub fn acc_lf(gold: &str, pred: &str, lang: Lang, mode: Tokenization) -> Outcome {
    let g = match canonical_tokens(gold, lang, mode) {
        Ok(t) => t,
        Err(e) => return Outcome::error(format!("gold: {e}")),
    };
    match canonical_tokens(pred, lang, mode) {
        Ok(p) => Outcome::pass(p == g),
        Err(e) => Outcome::error(format!("pred: {e}")),
    }
}

/// Structural accuracy: identical streams once condition values are masked
/// and conjuncts are put in canonical order.
pub fn acc_st(gold: &str, pred: &str, lang: Lang, mode: Tokenization) -> Outcome {
    let g = match structural_tokens(gold, lang, mode) {
        Ok(t) => t,
        Err(e) => return Outcome::error(format!("gold: {e}")),
    };
    match structural_tokens(pred, lang, mode) {
        Ok(p) => Outcome::pass(p == g),
        Err(e) => Outcome::error(format!("pred: {e}")),
    }
}

/// The store a query language executes against.
#[derive(Clone, Copy)]
pub enum Store<'a> {
    Sql(&'a Database),
    Sparql(&'a KnowledgeGraph),
}

impl Store<'_> {
    pub fn lang(&self) -> Lang {
        match self {
            Store::Sql(_) => Lang::Sql,
            Store::Sparql(_) => Lang::Sparql,
        }
    }

    pub fn run(&self, text: &str) -> Result<ResultSet, String> {
        match self {
            Store::Sql(db) => {
                let q = parse_sql(text).map_err(|e| e.to_string())?;
                execute_sql(db, &q).map_err(|e| e.to_string())
            }
            Store::Sparql(kg) => {
                let q = parse_sparql(text).map_err(|e| e.to_string())?;
                execute_sparql(kg, &q).map_err(|e| e.to_string())
            }
        }
    }
}

/// Execution accuracy. A gold query that fails to execute is an error of
/// the run, not of the prediction.
pub fn acc_ex(gold: &str, pred: &str, store: Store<'_>) -> Result<Outcome, String> {
    let g = store.run(gold)?;
    Ok(match store.run(pred) {
        Ok(p) => Outcome::pass(results_match(&g, &p)),
        Err(e) => Outcome::error(format!("pred: {e}")),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionPair {
    pub gold: String,
    pub pred: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairResult {
    pub lf: bool,
    pub ex: bool,
    pub st: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub index: usize,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    pub acc_lf: f64,
    pub acc_ex: f64,
    pub acc_st: f64,
    pub pairs: Vec<PairResult>,
    pub failures: Vec<Failure>,
}

fn mean(flags: impl Iterator<Item = bool>, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        flags.filter(|&b| b).count() as f64 / n as f64
    }
}

/// Scores every pair against `store`, in parallel, keeping input order.
pub fn evaluate_predictions(pairs: &[PredictionPair], store: Store<'_>, mode: Tokenization) -> Result<EvalReport, EvalError> {
    let lang = store.lang();
    let scored: Vec<Result<(PairResult, Vec<String>), EvalError>> = pairs
        .par_iter()
        .enumerate()
        .map(|(index, p)| {
            let lf = acc_lf(&p.gold, &p.pred, lang, mode);
            let st = acc_st(&p.gold, &p.pred, lang, mode);
            let ex = acc_ex(&p.gold, &p.pred, store).map_err(|message| EvalError::GoldFailed { index, message })?;
            let mut notes: Vec<String> = [&lf, &ex, &st].iter().filter_map(|o| o.note.clone()).collect();
            notes.dedup();
            Ok((PairResult { lf: lf.ok, ex: ex.ok, st: st.ok }, notes))
        })
        .collect();
    let mut results = Vec::with_capacity(pairs.len());
    let mut failures = Vec::new();
    for (index, r) in scored.into_iter().enumerate() {
        let (pair, notes) = r?;
        if !notes.is_empty() {
            failures.push(Failure { index, note: notes.join("; ") });
        }
        results.push(pair);
    }
    let n = results.len();
    Ok(EvalReport {
        n,
        acc_lf: mean(results.iter().map(|p| p.lf), n),
        acc_ex: mean(results.iter().map(|p| p.ex), n),
        acc_st: mean(results.iter().map(|p| p.st), n),
        pairs: results,
        failures,
    })
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, EvalError> {
    let shown = path.display().to_string();
    let file = fs::File::open(path).map_err(|e| EvalError::Io { path: shown.clone(), message: e.to_string() })?;
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| EvalError::Io { path: shown.clone(), message: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|e| EvalError::FileFormat {
            path: shown.clone(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(item);
    }
    Ok(out)
}

pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<PredictionPair>, EvalError> {
    read_jsonl(path.as_ref())
}

/// One dataset line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct DatasetRecord {
    pub nlq_template: String,
    #[serde(default)]
    pub nlq_natural: Option<String>,
    pub sql: String,
    #[serde(default)]
    pub sparql: Option<String>,
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Vec<DatasetRecord>, EvalError> {
    read_jsonl(path.as_ref())
}

pub fn write_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("serializable"));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub index: usize,
    pub sql: String,
    pub sparql: Option<String>,
    pub sql_result: Option<String>,
    pub sparql_result: Option<String>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub n: usize,
    pub matched: usize,
    pub match_rate: f64,
    pub mismatches: Vec<Mismatch>,
}

fn compare_pair(index: usize, sql: &SqlQuery, sparql: Result<SparqlQuery, String>, db: &Database, kg: &KnowledgeGraph) -> Option<Mismatch> {
    let sql_text = sql.to_string();
    let mut m = Mismatch { index, sql: sql_text, sparql: None, sql_result: None, sparql_result: None, note: String::new() };
    let sparql = match sparql {
        Ok(s) => s,
        Err(e) => {
            m.note = format!("translation failed: {e}");
            return Some(m);
        }
    };
    m.sparql = Some(serialize_sparql(&sparql).to_line());
    let a = execute_sql(db, sql);
    let b = execute_sparql(kg, &sparql);
    m.sql_result = a.as_ref().ok().map(ResultSet::render);
    m.sparql_result = b.as_ref().ok().map(ResultSet::render);
    match (a, b) {
        (Ok(a), Ok(b)) if results_match(&a, &b) => None,
        (Ok(_), Ok(_)) => {
            m.note = "result sets differ".into();
            Some(m)
        }
        (Err(e), _) => {
            m.note = format!("sql execution failed: {e}");
            Some(m)
        }
        (_, Err(e)) => {
            m.note = format!("sparql execution failed: {e}");
            Some(m)
        }
    }
}

fn report(n: usize, mismatches: Vec<Mismatch>) -> EquivalenceReport {
    let matched = n - mismatches.len();
    EquivalenceReport { n, matched, match_rate: if n == 0 { 1.0 } else { matched as f64 / n as f64 }, mismatches }
}

/// Runs every SQL query and its translation and compares the answers.
pub fn verify_equivalence(corpus: &[SqlQuery], db: &Database, kg: &KnowledgeGraph, g: &SchemaGraph) -> EquivalenceReport {
    let mismatches: Vec<Mismatch> = corpus
        .par_iter()
        .enumerate()
        .filter_map(|(i, q)| compare_pair(i, q, sql_to_sparql(q, g).map_err(|e| e.to_string()), db, kg))
        .collect();
    report(corpus.len(), mismatches)
}

/// Like [`verify_equivalence`] for already-paired queries.
pub fn verify_pairs(pairs: &[(SqlQuery, SparqlQuery)], db: &Database, kg: &KnowledgeGraph) -> EquivalenceReport {
    let mismatches: Vec<Mismatch> = pairs
        .par_iter()
        .enumerate()
        .filter_map(|(i, (q, s))| compare_pair(i, q, Ok(s.clone()), db, kg))
        .collect();
    report(pairs.len(), mismatches)
}

/// Number of adjacent `inner join` token pairs.
pub fn count_joins(t: &TokenStream) -> usize {
    t.tokens().windows(2).filter(|w| w[0] == "inner" && w[1] == "join").count()
}

pub const HIST_BIN: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryRecord {
    pub index: usize,
    pub sql_len: usize,
    pub sparql_len: Option<usize>,
    pub nlq_len: usize,
    pub n_joins: usize,
    pub n_hops: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JoinBucket {
    pub n_joins: usize,
    pub count: usize,
    pub mean_sql_len: f64,
    pub mean_sparql_len: f64,
    pub mean_hops: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub n: usize,
    pub tokenization: Tokenization,
    pub mean_sql_len: f64,
    pub mean_sparql_len: f64,
    pub mean_nlq_len: f64,
    /// `(bin start, count)` with bins of width [`HIST_BIN`].
    pub sql_hist: Vec<(usize, usize)>,
    pub sparql_hist: Vec<(usize, usize)>,
    pub nlq_hist: Vec<(usize, usize)>,
    pub buckets: Vec<JoinBucket>,
    #[serde(skip)]
    pub records: Vec<QueryRecord>,
}

fn histogram(values: impl Iterator<Item = usize>) -> Vec<(usize, usize)> {
    let mut bins: BTreeMap<usize, usize> = BTreeMap::new();
    for v in values {
        *bins.entry(v / HIST_BIN * HIST_BIN).or_default() += 1;
    }
    let Some(&last) = bins.keys().next_back() else { return Vec::new() };
    (0..=last).step_by(HIST_BIN).map(|b| (b, bins.get(&b).copied().unwrap_or(0))).collect()
}

fn avg(values: &[usize]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<usize>() as f64 / values.len() as f64
    }
}

/// Length statistics of a dataset. `accuracy`, when given, must be aligned
/// with the dataset and adds per-join-bucket accuracies.
pub fn corpus_stats(
    records: &[DatasetRecord],
    accuracy: Option<&[PairResult]>,
    mode: Tokenization,
) -> Result<CorpusStats, EvalError> {
    if let Some(acc) = accuracy {
        if acc.len() != records.len() {
            return Err(EvalError::FileFormat {
                path: "report".into(),
                line: 0,
                message: format!("report has {} pairs but the dataset has {} queries", acc.len(), records.len()),
            });
        }
    }
    let bad = |i: usize, e: String| EvalError::FileFormat { path: "dataset".into(), line: i + 1, message: e };
    let mut per_query = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        let sql = canonical_tokens(&r.sql, Lang::Sql, mode).map_err(|e| bad(i, e.to_string()))?;
        let (sparql_len, n_hops) = match &r.sparql {
            Some(s) => {
                let q = parse_sparql(s).map_err(|e| bad(i, e.to_string()))?;
                (Some(serialize_sparql(&q).len()), Some(q.patterns.len()))
            }
            None => (None, None),
        };
        let nlq = r.nlq_natural.as_deref().unwrap_or(&r.nlq_template);
        per_query.push(QueryRecord {
            index: i,
            sql_len: sql.len(),
            sparql_len,
            nlq_len: nlq.split_whitespace().count(),
            n_joins: count_joins(&sql),
            n_hops,
        });
    }
    let sql_lens: Vec<usize> = per_query.iter().map(|r| r.sql_len).collect();
    let sparql_lens: Vec<usize> = per_query.iter().filter_map(|r| r.sparql_len).collect();
    let nlq_lens: Vec<usize> = per_query.iter().map(|r| r.nlq_len).collect();
    let mut grouped: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for r in &per_query {
        grouped.entry(r.n_joins).or_default().push(r.index);
    }
    let buckets = grouped
        .into_iter()
        .map(|(k, idx)| {
            let sql: Vec<usize> = idx.iter().map(|&i| per_query[i].sql_len).collect();
            let sparql: Vec<usize> = idx.iter().filter_map(|&i| per_query[i].sparql_len).collect();
            let hops: Vec<usize> = idx.iter().filter_map(|&i| per_query[i].n_hops).collect();
            let accuracy = accuracy.map(|acc| {
                let n = idx.len();
                [
                    mean(idx.iter().map(|&i| acc[i].lf), n),
                    mean(idx.iter().map(|&i| acc[i].ex), n),
                    mean(idx.iter().map(|&i| acc[i].st), n),
                ]
            });
            JoinBucket {
                n_joins: k,
                count: idx.len(),
                mean_sql_len: avg(&sql),
                mean_sparql_len: avg(&sparql),
                mean_hops: avg(&hops),
                accuracy,
            }
        })
        .collect();
    Ok(CorpusStats {
        n: records.len(),
        tokenization: mode,
        mean_sql_len: avg(&sql_lens),
        mean_sparql_len: avg(&sparql_lens),
        mean_nlq_len: avg(&nlq_lens),
        sql_hist: histogram(sql_lens.iter().copied()),
        sparql_hist: histogram(sparql_lens.iter().copied()),
        nlq_hist: histogram(nlq_lens.iter().copied()),
        buckets,
        records: per_query,
    })
}

impl CorpusStats {
    /// Writes `queries.csv`, `summary.json`, `hist_{sql,sparql,nlq}.dat` and
    /// `joins.dat` into `dir`.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> std::io::Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("queries.csv"))?;
        w.write_record(["index", "sql_len", "sparql_len", "nlq_len", "n_joins", "n_hops"])?;
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.records {
            w.write_record([
                r.index.to_string(),
                r.sql_len.to_string(),
                opt(r.sparql_len),
                r.nlq_len.to_string(),
                r.n_joins.to_string(),
                opt(r.n_hops),
            ])?;
        }
        w.flush()?;
        fs::write(dir.join("summary.json"), serde_json::to_string_pretty(self).expect("serializable") + "\n")?;
        for (name, hist) in [("sql", &self.sql_hist), ("sparql", &self.sparql_hist), ("nlq", &self.nlq_hist)] {
            let mut s = format!("# bin_start count (bin width {HIST_BIN})\n");
            for (b, c) in hist.iter() {
                s.push_str(&format!("{b} {c}\n"));
            }
            fs::write(dir.join(format!("hist_{name}.dat")), s)?;
        }
        let mut s = String::from("# n_joins count mean_sql_len mean_sparql_len mean_hops acc_lf acc_ex acc_st\n");
        for b in &self.buckets {
            let acc = b.accuracy.map(|a| format!(" {} {} {}", a[0], a[1], a[2])).unwrap_or_default();
            s.push_str(&format!(
                "{} {} {:.4} {:.4} {:.4}{}\n",
                b.n_joins, b.count, b.mean_sql_len, b.mean_sparql_len, b.mean_hops, acc
            ));
        }
        fs::write(dir.join("joins.dat"), s)
    }
}
