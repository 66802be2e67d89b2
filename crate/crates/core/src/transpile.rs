//! SQL to SPARQL translation over the schema relation graph, query
//! renormalization between schemas, and seeded template instantiation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::query::{
    parse_sql, ColumnRef, Condition, Join, Projection, QueryError, SelectItem, SparqlQuery, SqlQuery, Term,
    TriplePattern, VarFilter,
};
use crate::relational::Database;
use crate::schema::{NodeId, SchemaError, SchemaGraph, SchemaManifest, SchemaNode};
use crate::value::{CellValue, CompareOp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranspileError {
    #[error("no path from {from} to {to}")]
    NoPath { from: String, to: String },
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("column `{0}` has no entry in the column mapping")]
    UnmappedColumn(String),
    #[error("column `{0}` has no values to sample")]
    EmptyColumn(String),
    #[error("bad template: {0}")]
    Template(String),
    #[error(transparent)]
    Query(#[from] QueryError),
}

impl From<SchemaError> for TranspileError {
    fn from(e: SchemaError) -> Self {
        match e {
            SchemaError::NoPath { from, to } => TranspileError::NoPath { from, to },
            other => TranspileError::Template(other.to_string()),
        }
    }
}

fn column_node(g: &SchemaGraph, c: &ColumnRef) -> Result<NodeId, TranspileError> {
    let spec = g.manifest().table(&c.table).ok_or_else(|| TranspileError::UnknownTable(c.table.clone()))?;
    if spec.column(&c.column).is_none() && !spec.is_key(&c.column) {
        return Err(TranspileError::UnknownColumn(c.to_string()));
    }
    g.column_node(&c.table, &c.column).ok_or_else(|| TranspileError::UnknownColumn(c.to_string()))
}

/// Picks the node among `targets` from which every other target is
/// reachable. Reports the first unreachable target of the topmost candidate
/// when there is none.
fn pick_root(g: &SchemaGraph, targets: &[NodeId]) -> Result<NodeId, TranspileError> {
    let order = g.topological_order().expect("schema graphs are acyclic");
    let rank: HashMap<NodeId, usize> = order.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut candidates: Vec<NodeId> = targets.to_vec();
    candidates.sort_by_key(|n| rank[n]);
    candidates.dedup();
    for &c in &candidates {
        let dist = g.distances_from(c);
        if targets.iter().all(|t| dist[t.0].is_some()) {
            return Ok(c);
        }
    }
    let top = candidates[0];
    let dist = g.distances_from(top);
    let missing = targets.iter().find(|t| dist[t.0].is_none()).expect("some target is unreachable");
    Err(TranspileError::NoPath { from: g.node(top).to_string(), to: g.node(*missing).to_string() })
}

/// Allocates `?name`, `?name2`, `?name3`, ... without collisions.
#[derive(Default)]
struct VarNames(HashSet<String>);

impl VarNames {
    fn fresh(&mut self, base: &str) -> String {
        let mut name = base.to_string();
        let mut i = 2;
        while self.0.contains(&name) {
            name = format!("{base}{i}");
            i += 1;
        }
        self.0.insert(name.clone());
        name
    }
}

/// Translates a SQL query into SPARQL over the knowledge graph compiled from
/// the same schema.
///
/// Every FROM/JOIN table contributes its entity class and every referenced
/// column its value node; the pattern set is the union of the shortest
/// relation paths from the topmost of those nodes. A single equality on a
/// non-projected property is written inline as a literal object; every other
/// condition becomes a filter.
pub fn sql_to_sparql(q: &SqlQuery, g: &SchemaGraph) -> Result<SparqlQuery, TranspileError> {
    q.validate()?;
    let mut targets = Vec::new();
    for t in q.tables() {
        targets.push(g.entity_node(t).ok_or_else(|| TranspileError::UnknownTable(t.to_string()))?);
    }
    let mut select_nodes = Vec::with_capacity(q.select.len());
    for s in &q.select {
        let n = column_node(g, &s.column)?;
        select_nodes.push(n);
        targets.push(n);
    }
    let mut condition_nodes = Vec::with_capacity(q.conditions.len());
    for c in &q.conditions {
        let n = column_node(g, &c.column)?;
        condition_nodes.push(n);
        targets.push(n);
    }
    for j in &q.joins {
        column_node(g, &j.left)?;
        column_node(g, &j.right)?;
    }
    let root = pick_root(g, &targets)?;

    // Tree of path edges, keyed by child node.
    let mut parent_of: BTreeMap<NodeId, (NodeId, String)> = BTreeMap::new();
    for &t in &targets {
        let path = g.shortest_relation_path(root, t)?;
        let mut at = root;
        for hop in path.hops {
            parent_of.entry(hop.to).or_insert_with(|| (at, hop.relation.clone()));
            at = hop.to;
        }
    }
    let mut children: BTreeMap<NodeId, Vec<(String, NodeId)>> = BTreeMap::new();
    for (child, (parent, rel)) in &parent_of {
        children.entry(*parent).or_default().push((rel.clone(), *child));
    }
    for list in children.values_mut() {
        list.sort();
    }
    // Patterns follow a preorder walk, siblings ordered by relation label.
    let mut preorder = Vec::new();
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        preorder.push(n);
        if let Some(list) = children.get(&n) {
            stack.extend(list.iter().rev().map(|(_, c)| *c));
        }
    }
    let edges: Vec<(NodeId, String, NodeId)> = preorder
        .iter()
        .skip(1)
        .map(|n| {
            let (p, rel) = &parent_of[n];
            (*p, rel.clone(), *n)
        })
        .collect();
    if edges.is_empty() {
        return Err(QueryError::Unsupported(format!(
            "`{q}` reads only key columns of a single table and has no triple pattern"
        ))
        .into());
    }

    let mut names = VarNames::default();
    let mut var_of: HashMap<NodeId, String> = HashMap::new();
    for &n in &preorder {
        let base = match g.node(n) {
            SchemaNode::Entity { label, .. } => label.as_str(),
            SchemaNode::Literal { column, .. } => column.as_str(),
        };
        var_of.insert(n, names.fresh(base));
    }

    let projected: HashSet<NodeId> = select_nodes.iter().copied().collect();
    let mut per_node: HashMap<NodeId, usize> = HashMap::new();
    for n in &condition_nodes {
        *per_node.entry(*n).or_default() += 1;
    }
    let mut inline: HashMap<NodeId, CellValue> = HashMap::new();
    let mut filters = Vec::new();
    for (c, &n) in q.conditions.iter().zip(&condition_nodes) {
        let substitutable =
            c.op == CompareOp::Eq && g.node(n).is_literal() && !projected.contains(&n) && per_node[&n] == 1;
        if substitutable {
            inline.insert(n, c.value.clone());
        } else {
            filters.push(VarFilter { var: var_of[&n].clone(), op: c.op, value: c.value.clone() });
        }
    }

    let patterns = edges
        .into_iter()
        .map(|(p, rel, n)| TriplePattern {
            subject: var_of[&p].clone(),
            predicate: rel,
            object: match inline.get(&n) {
                Some(v) => Term::Literal(v.clone()),
                None => Term::Var(var_of[&n].clone()),
            },
        })
        .collect();
    let projection = q
        .select
        .iter()
        .zip(&select_nodes)
        .map(|(s, n)| match s.agg {
            Some(agg) => Projection::Aggregate { agg, var: var_of[n].clone(), alias: names.fresh("agg") },
            None => Projection::Var(var_of[n].clone()),
        })
        .collect();
    let out = SparqlQuery { projection, patterns, filters };
    out.validate()?;
    Ok(out)
}

/// Source column to target column, serialized as `{"table.column": "table.column"}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ColumnMapping {
    pub entries: BTreeMap<ColumnRef, ColumnRef>,
}

fn split_ref(s: &str) -> Result<ColumnRef, TranspileError> {
    let (t, c) = s
        .trim()
        .split_once('.')
        .ok_or_else(|| TranspileError::Template(format!("`{s}` is not of the form table.column")))?;
    Ok(ColumnRef::new(&t.trim().to_lowercase(), &c.trim().to_lowercase()))
}

impl ColumnMapping {
    pub fn identity(manifest: &SchemaManifest) -> Self {
        let mut entries = BTreeMap::new();
        for t in &manifest.tables {
            for name in t.columns.iter().map(|c| c.name.as_str()).chain(t.has_synthetic_key().then_some("row_id")) {
                let r = ColumnRef::new(&t.name, name);
                entries.insert(r.clone(), r);
            }
        }
        ColumnMapping { entries }
    }

    pub fn from_json_str(text: &str) -> Result<Self, TranspileError> {
        let raw: BTreeMap<String, String> =
            serde_json::from_str(text).map_err(|e| TranspileError::Template(format!("column mapping: {e}")))?;
        let mut entries = BTreeMap::new();
        for (k, v) in raw {
            entries.insert(split_ref(&k)?, split_ref(&v)?);
        }
        Ok(ColumnMapping { entries })
    }

    pub fn to_json_string(&self) -> String {
        let raw: BTreeMap<String, String> = self.entries.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        serde_json::to_string_pretty(&raw).expect("string map serializes")
    }

    pub fn get(&self, c: &ColumnRef) -> Result<&ColumnRef, TranspileError> {
        self.entries.get(c).ok_or_else(|| TranspileError::UnmappedColumn(c.to_string()))
    }
}

/// Rewrites a query over `source` into the schema of `target`. Columns are
/// mapped one to one; the FROM/JOIN chain is rebuilt as the union of the
/// shortest foreign-key paths from the topmost involved target table, with
/// joins written `parent.key = child.fk`. The key column of every source
/// table in the chain is mapped too, so the row grain of the result is kept.
pub fn renormalize_sql(
    q: &SqlQuery,
    m: &ColumnMapping,
    source: &SchemaManifest,
    target: &SchemaGraph,
) -> Result<SqlQuery, TranspileError> {
    q.validate()?;
    let mapped = |c: &ColumnRef| m.get(c).cloned();
    let select: Vec<SelectItem> =
        q.select.iter().map(|s| Ok(SelectItem { agg: s.agg, column: mapped(&s.column)? })).collect::<Result<_, TranspileError>>()?;
    let conditions: Vec<Condition> = q
        .conditions
        .iter()
        .map(|c| Ok(Condition { column: mapped(&c.column)?, op: c.op, value: c.value.clone() }))
        .collect::<Result<_, TranspileError>>()?;

    let mut involved: BTreeSet<String> = BTreeSet::new();
    for c in select.iter().map(|s| &s.column).chain(conditions.iter().map(|c| &c.column)) {
        involved.insert(c.table.clone());
    }
    for j in &q.joins {
        involved.insert(mapped(&j.left)?.table);
        involved.insert(mapped(&j.right)?.table);
    }
    for t in q.tables() {
        let spec = source.table(t).ok_or_else(|| TranspileError::UnknownTable(t.to_string()))?;
        involved.insert(mapped(&ColumnRef::new(t, spec.key_column()))?.table);
    }

    let tm = target.manifest();
    let mut nodes = Vec::new();
    for t in &involved {
        if tm.table(t).is_none() {
            return Err(TranspileError::UnknownTable(t.clone()));
        }
        nodes.push(target.entity_node(t).ok_or_else(|| TranspileError::UnknownTable(t.clone()))?);
    }
    let root = pick_root(target, &nodes)?;
    let root_table = target.node(root).table().to_string();

    let mut parent_of: BTreeMap<String, String> = BTreeMap::new();
    for &n in &nodes {
        let mut at = root_table.clone();
        for hop in target.shortest_relation_path(root, n)?.hops {
            let child = target.node(hop.to).table().to_string();
            parent_of.entry(child.clone()).or_insert_with(|| at.clone());
            at = child;
        }
    }
    let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (child, parent) in &parent_of {
        children.entry(parent.as_str()).or_default().push(child.as_str());
    }
    let mut joins = Vec::new();
    let mut stack = vec![root_table.as_str()];
    while let Some(t) = stack.pop() {
        if let Some(list) = children.get(t) {
            for c in list.iter().rev() {
                stack.push(c);
            }
        }
        if t != root_table {
            let parent = &parent_of[t];
            let pspec = tm.table(parent).expect("target table");
            let cspec = tm.table(t).expect("target table");
            let (fk, _) = cspec.foreign_keys().find(|(_, p)| *p == parent.as_str()).expect("edge comes from a foreign key");
            joins.push(Join {
                table: t.to_string(),
                left: ColumnRef::new(parent, pspec.key_column()),
                right: ColumnRef::new(t, &fk.name),
            });
        }
    }
    let out = SqlQuery { select, from: root_table, joins, conditions };
    out.validate()?;
    Ok(out)
}

/// A question/query template whose condition values are `|slot|` markers.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryTemplate {
    pub nlq: String,
    pub sql: SqlQuery,
    /// Condition index to slot name.
    pub slot_positions: Vec<(usize, String)>,
    pub slot_columns: BTreeMap<String, ColumnRef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawTemplate {
    nlq: String,
    sql: String,
    #[serde(default)]
    slots: BTreeMap<String, String>,
}

impl QueryTemplate {
    pub fn new(nlq: &str, sql: &str, slots: &BTreeMap<String, String>) -> Result<Self, TranspileError> {
        let mut text = sql.to_string();
        for name in slots.keys() {
            let marker = format!("|{name}|");
            if !text.contains(&marker) {
                return Err(TranspileError::Template(format!("slot `{name}` does not appear in `{sql}`")));
            }
            if !nlq.contains(&marker) {
                return Err(TranspileError::Template(format!("slot `{name}` does not appear in `{nlq}`")));
            }
            text = text.replace(&marker, &format!("\"{marker}\""));
        }
        let parsed = parse_sql(&text)?;
        let mut slot_positions = Vec::new();
        for (i, c) in parsed.conditions.iter().enumerate() {
            if let CellValue::Text(s) = &c.value {
                if let Some(name) = s.strip_prefix('|').and_then(|s| s.strip_suffix('|')) {
                    if !slots.contains_key(name) {
                        return Err(TranspileError::Template(format!("slot `{name}` has no column in `{sql}`")));
                    }
                    slot_positions.push((i, name.to_string()));
                }
            }
        }
        let mut slot_columns = BTreeMap::new();
        for (name, col) in slots {
            slot_columns.insert(name.clone(), split_ref(col)?);
        }
        let used: BTreeSet<&str> = slot_positions.iter().map(|(_, n)| n.as_str()).collect();
        if let Some(name) = slots.keys().find(|n| !used.contains(n.as_str())) {
            return Err(TranspileError::Template(format!("slot `{name}` is not a condition value in `{sql}`")));
        }
        Ok(QueryTemplate { nlq: nlq.to_string(), sql: parsed, slot_positions, slot_columns })
    }
}

/// Parses a JSON array of `{"nlq", "sql", "slots"}` objects.
pub fn parse_templates(text: &str) -> Result<Vec<QueryTemplate>, TranspileError> {
    let raw: Vec<RawTemplate> = serde_json::from_str(text).map_err(|e| TranspileError::Template(e.to_string()))?;
    raw.iter().map(|r| QueryTemplate::new(&r.nlq, &r.sql, &r.slots)).collect()
}

pub fn load_templates(path: impl AsRef<Path>) -> Result<Vec<QueryTemplate>, TranspileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| TranspileError::Template(format!("cannot read {}: {e}", path.display())))?;
    parse_templates(&text)
}

/// One sampled question/query pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPair {
    pub nlq: String,
    pub sql: SqlQuery,
}

/// Instantiates `n` pairs, cycling through the templates in order and
/// drawing each slot value uniformly from the distinct non-null values of
/// its column.
pub fn sample_query_corpus(
    templates: &[QueryTemplate],
    db: &Database,
    n: usize,
    seed: u64,
) -> Result<Vec<SampledPair>, TranspileError> {
    if templates.is_empty() {
        return if n == 0 { Ok(Vec::new()) } else { Err(TranspileError::Template("no templates".into())) };
    }
    let mut pools: HashMap<ColumnRef, Vec<CellValue>> = HashMap::new();
    for t in templates {
        for col in t.slot_columns.values() {
            if pools.contains_key(col) {
                continue;
            }
            let table = db.table(&col.table).ok_or_else(|| TranspileError::UnknownTable(col.table.clone()))?;
            let ci = table.spec.column_index(&col.column).ok_or_else(|| TranspileError::UnknownColumn(col.to_string()))?;
            let values: BTreeSet<&CellValue> = table.rows.iter().map(|r| &r[ci]).filter(|v| !v.is_null()).collect();
            if values.is_empty() {
                return Err(TranspileError::EmptyColumn(col.to_string()));
            }
            pools.insert(col.clone(), values.into_iter().cloned().collect());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let t = &templates[i % templates.len()];
        let mut chosen: BTreeMap<&str, CellValue> = BTreeMap::new();
        for (name, col) in &t.slot_columns {
            let pool = &pools[col];
            chosen.insert(name, pool[rng.gen_range(0..pool.len())].clone());
        }
        let mut sql = t.sql.clone();
        for (ci, name) in &t.slot_positions {
            sql.conditions[*ci].value = chosen[name.as_str()].clone();
        }
        let mut nlq = t.nlq.clone();
        for (name, v) in &chosen {
            nlq = nlq.replace(&format!("|{name}|"), &v.to_plain());
        }
        out.push(SampledPair { nlq, sql });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::{parse_sparql, serialize_sparql};
    use crate::schema::{build_schema_graph, ColumnSpec, TableSpec};
    use crate::value::DataType;

    fn small_schema() -> SchemaManifest {
        SchemaManifest::new(vec![
            TableSpec::new(
                "patients",
                vec![
                    ColumnSpec::primary_key("subject_id", DataType::Integer),
                    ColumnSpec::property("age", DataType::Integer),
                    ColumnSpec::property("dob", DataType::Integer),
                    ColumnSpec::property("gender", DataType::Text),
                ],
            ),
            TableSpec::new(
                "admissions",
                vec![
                    ColumnSpec::primary_key("hadm_id", DataType::Integer),
                    ColumnSpec::foreign_key("subject_id", "patients", DataType::Integer),
                    ColumnSpec::property("insurance", DataType::Text),
                ],
            ),
            TableSpec::new(
                "prescriptions",
                vec![
                    ColumnSpec::foreign_key("hadm_id", "admissions", DataType::Integer),
                    ColumnSpec::property("drug", DataType::Text),
                    ColumnSpec::property("timestep", DataType::Integer),
                ],
            ),
        ])
        .unwrap()
    }

    fn to_sparql(sql: &str) -> String {
        let g = build_schema_graph(&small_schema()).unwrap();
        serialize_sparql(&sql_to_sparql(&parse_sql(sql).unwrap(), &g).unwrap()).to_line()
    }

    #[test]
    fn intro_query_becomes_four_patterns() {
        let s = to_sparql(
            "select count ( prescriptions.timestep ) from patients inner join admissions on patients.subject_id = admissions.subject_id \
             inner join prescriptions on admissions.hadm_id = prescriptions.hadm_id where prescriptions.drug = \"antihypertensive\"",
        );
        let want = parse_sparql(
            "select ( count ( ?timestep ) as ?agg ) where { ?subject_id </admissions> ?hadm_id . \
             ?hadm_id </prescriptions> ?prescriptions_row_id . ?prescriptions_row_id </drug> \"antihypertensive\" . \
             ?prescriptions_row_id </timestep> ?timestep . }",
        )
        .unwrap();
        assert_eq!(s, serialize_sparql(&want).to_line());
    }

    #[test]
    fn inequality_becomes_filter() {
        let s = to_sparql("select max ( patients.age ) from patients where patients.dob > 2020");
        assert_eq!(
            s,
            "select ( max ( ?age ) as ?agg ) where { ?subject_id </age> ?age . ?subject_id </dob> ?dob . filter ( ?dob > 2020 ) }"
        );
    }

    #[test]
    fn projected_equality_keeps_variable() {
        let s = to_sparql("select patients.gender from patients where patients.gender = \"f\"");
        assert_eq!(s, "select ?gender where { ?subject_id </gender> ?gender . filter ( ?gender = \"f\" ) }");
    }

    #[test]
    fn key_conditions_filter_the_entity() {
        let s = to_sparql("select admissions.insurance from admissions where admissions.subject_id = 3");
        assert_eq!(
            s,
            "select ?insurance where { ?subject_id </admissions> ?hadm_id . ?hadm_id </insurance> ?insurance . \
             filter ( ?subject_id = 3 ) }"
        );
    }

    #[test]
    fn key_only_query_is_unsupported() {
        let g = build_schema_graph(&small_schema()).unwrap();
        let q = parse_sql("select patients.subject_id from patients").unwrap();
        assert!(matches!(sql_to_sparql(&q, &g), Err(TranspileError::Query(QueryError::Unsupported(_)))));
    }

    #[test]
    fn identity_renormalization() {
        let m = small_schema();
        let g = build_schema_graph(&m).unwrap();
        let q = parse_sql(
            "select count ( prescriptions.timestep ) from patients inner join admissions on patients.subject_id = admissions.subject_id \
             inner join prescriptions on admissions.hadm_id = prescriptions.hadm_id where patients.gender = \"f\"",
        )
        .unwrap();
        assert_eq!(renormalize_sql(&q, &ColumnMapping::identity(&m), &m, &g).unwrap(), q);
    }

    #[test]
    fn unmapped_column() {
        let m = small_schema();
        let g = build_schema_graph(&m).unwrap();
        let q = parse_sql("select patients.age from patients").unwrap();
        let mut map = ColumnMapping::identity(&m);
        map.entries.remove(&ColumnRef::new("patients", "age"));
        assert_eq!(renormalize_sql(&q, &map, &m, &g), Err(TranspileError::UnmappedColumn("patients.age".into())));
    }

    #[test]
    fn mapping_json_round_trip() {
        let m = ColumnMapping::identity(&small_schema());
        assert_eq!(ColumnMapping::from_json_str(&m.to_json_string()).unwrap(), m);
    }

    #[test]
    fn template_slots() {
        let slots = BTreeMap::from([("g".to_string(), "patients.gender".to_string())]);
        let t = QueryTemplate::new("how many |g| patients", "select count ( patients.age ) from patients where patients.gender = |g|", &slots)
            .unwrap();
        assert_eq!(t.slot_positions, vec![(0, "g".to_string())]);
        assert!(QueryTemplate::new("no slot here", "select count ( patients.age ) from patients where patients.gender = |g|", &slots)
            .is_err());
    }
}
