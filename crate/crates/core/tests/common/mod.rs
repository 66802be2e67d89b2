#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::path::Path;

use ehrq_core::query::{
    Aggregate, ColumnRef, Condition, Join, Projection, SelectItem, SparqlQuery, SqlQuery, Term, TriplePattern,
    VarFilter,
};
use ehrq_core::relational::{Database, ResultSet};
use ehrq_core::schema::{ColumnRole, SchemaManifest, SchemaNode};
use ehrq_core::value::{CellValue, CompareOp, DataType};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

// ---------------------------------------------------------------------------
// AST generators

const TABLES: &[&str] = &["patients", "admissions", "lab", "t_1", "dx", "rx"];
const COLUMNS: &[&str] = &["age", "gender", "hadm_id", "subject_id", "drug", "value_num", "c_2", "dob"];
const OPS: &[CompareOp] = &[CompareOp::Eq, CompareOp::Lt, CompareOp::Gt, CompareOp::Le, CompareOp::Ge];
const AGGS: &[Aggregate] = &[Aggregate::Count, Aggregate::Max, Aggregate::Min, Aggregate::Avg];

pub fn value_strategy() -> impl Strategy<Value = CellValue> {
    prop_oneof![
        any::<i64>().prop_map(CellValue::Integer),
        (-1.0e12f64..1.0e12).prop_map(CellValue::Float),
        "[a-z0-9 ,.'\"%/()<>=?-]{0,16}".prop_map(CellValue::text),
    ]
}

fn column_in(tables: &[String], t: usize, c: usize) -> ColumnRef {
    ColumnRef::new(&tables[t % tables.len()], COLUMNS[c % COLUMNS.len()])
}

pub fn sql_strategy() -> impl Strategy<Value = SqlQuery> {
    let shape = (
        0usize..=5,
        proptest::sample::subsequence(TABLES.to_vec(), TABLES.len()),
        any::<bool>(),
    );
    shape.prop_flat_map(|(k, mut order, aggregate)| {
        order.truncate(k + 1);
        let tables: Vec<String> = order.iter().map(|s| s.to_string()).collect();
        let joins = proptest::collection::vec((any::<usize>(), 0usize..8, 0usize..8, any::<bool>()), k);
        let select = proptest::collection::vec((0usize..4, any::<usize>(), 0usize..8), 1..=3);
        let conds = proptest::collection::vec((any::<usize>(), 0usize..8, 0usize..5, value_strategy()), 0..=3);
        (Just(tables), joins, select, conds, Just(aggregate)).prop_map(|(tables, joins, select, conds, aggregate)| {
            let joins = joins
                .into_iter()
                .enumerate()
                .map(|(i, (earlier, c1, c2, swap))| {
                    let new = &tables[i + 1];
                    let old = ColumnRef::new(&tables[earlier % (i + 1)], COLUMNS[c1]);
                    let fresh = ColumnRef::new(new, COLUMNS[c2]);
                    let (left, right) = if swap { (fresh, old) } else { (old, fresh) };
                    Join { table: new.clone(), left, right }
                })
                .collect();
            SqlQuery {
                select: select
                    .into_iter()
                    .map(|(a, t, c)| SelectItem { agg: aggregate.then_some(AGGS[a]), column: column_in(&tables, t, c) })
                    .collect(),
                from: tables[0].clone(),
                joins,
                conditions: conds
                    .into_iter()
                    .map(|(t, c, op, value)| Condition { column: column_in(&tables, t, c), op: OPS[op], value })
                    .collect(),
            }
        })
    })
}

const PREDICATES: &[&str] = &["admissions", "name", "gender", "drug", "value_num", "prescriptions", "p_1"];

pub fn sparql_strategy() -> impl Strategy<Value = SparqlQuery> {
    let patterns = proptest::collection::vec((any::<usize>(), 0usize..7, proptest::option::of(value_strategy())), 1..=8);
    (patterns, any::<bool>(), proptest::collection::vec((any::<usize>(), 0usize..4), 1..=3), proptest::collection::vec((any::<usize>(), 0usize..5, value_strategy()), 0..=3))
        .prop_map(|(pats, aggregate, proj, filters)| {
            // Subjects are always already-bound variables, so the pattern
            // graph is connected by construction.
            let mut vars = vec!["v0".to_string()];
            let mut patterns = Vec::new();
            for (subject, p, literal) in pats {
                let subject = vars[subject % vars.len()].clone();
                let object = match literal {
                    Some(v) => Term::Literal(v),
                    None => {
                        let v = format!("v{}", vars.len());
                        vars.push(v.clone());
                        Term::Var(v)
                    }
                };
                patterns.push(TriplePattern { subject, predicate: PREDICATES[p].to_string(), object });
            }
            let mut bound: Vec<String> = Vec::new();
            for p in &patterns {
                for v in std::iter::once(p.subject.as_str()).chain(p.object.as_var()) {
                    if !bound.iter().any(|b| b == v) {
                        bound.push(v.to_string());
                    }
                }
            }
            let projection = proj
                .into_iter()
                .enumerate()
                .map(|(i, (v, a))| {
                    let var = bound[v % bound.len()].clone();
                    if aggregate {
                        Projection::Aggregate { agg: AGGS[a], var, alias: format!("agg{i}") }
                    } else {
                        Projection::Var(var)
                    }
                })
                .collect();
            let filters = filters
                .into_iter()
                .map(|(v, op, value)| VarFilter { var: bound[v % bound.len()].clone(), op: OPS[op], value })
                .collect();
            SparqlQuery { projection, patterns, filters }
        })
}

// ---------------------------------------------------------------------------
// Shortest-path oracle

/// Random DAG: edges only go from lower to higher index, and only from
/// entity nodes. Relation labels come from a tiny pool so ties are common.
pub fn random_dag(rng: &mut impl Rng) -> (Vec<SchemaNode>, Vec<(usize, usize, String)>) {
    let n = rng.gen_range(1..=12);
    let nodes: Vec<SchemaNode> = (0..n)
        .map(|i| {
            if rng.gen_bool(0.6) {
                SchemaNode::Entity { table: format!("t{i}"), key_column: "k".into(), label: format!("k{i}") }
            } else {
                SchemaNode::Literal { table: format!("t{i}"), column: format!("c{i}") }
            }
        })
        .collect();
    let mut edges = Vec::new();
    for (a, node) in nodes.iter().enumerate() {
        if node.is_literal() {
            continue;
        }
        for b in a + 1..n {
            if rng.gen_bool(0.3) {
                edges.push((a, b, ["a", "b", "c"][rng.gen_range(0..3)].to_string()));
            }
        }
    }
    (nodes, edges)
}

pub fn bfs_distance(n: usize, edges: &[(usize, usize, String)], from: usize, to: usize) -> Option<usize> {
    let mut dist = vec![usize::MAX; n];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        for (a, b, _) in edges {
            if *a == x && dist[*b] == usize::MAX {
                dist[*b] = dist[x] + 1;
                queue.push_back(*b);
            }
        }
    }
    (dist[to] != usize::MAX).then_some(dist[to])
}

/// Smallest label sequence over every path of exactly `len` edges.
pub fn smallest_labels(edges: &[(usize, usize, String)], from: usize, to: usize, len: usize) -> Option<Vec<String>> {
    if len == 0 {
        return (from == to).then(Vec::new);
    }
    let mut best: Option<Vec<String>> = None;
    for (a, b, l) in edges {
        if *a != from {
            continue;
        }
        if let Some(mut rest) = smallest_labels(edges, *b, to, len - 1) {
            rest.insert(0, l.clone());
            if best.as_ref().is_none_or(|cur| rest < *cur) {
                best = Some(rest);
            }
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Brute-force SQL oracle

fn cmp(a: &CellValue, b: &CellValue) -> Option<Ordering> {
    match (a, b) {
        (CellValue::Integer(x), CellValue::Integer(y)) => Some(x.cmp(y)),
        (CellValue::Text(x), CellValue::Text(y)) => Some(x.cmp(y)),
        (CellValue::Integer(_) | CellValue::Float(_), CellValue::Integer(_) | CellValue::Float(_)) => {
            let f = |v: &CellValue| match v {
                CellValue::Integer(i) => *i as f64,
                CellValue::Float(x) => *x,
                _ => unreachable!(),
            };
            f(a).partial_cmp(&f(b))
        }
        _ => None,
    }
}

fn holds(op: CompareOp, o: Ordering) -> bool {
    match op {
        CompareOp::Eq => o == Ordering::Equal,
        CompareOp::Lt => o == Ordering::Less,
        CompareOp::Gt => o == Ordering::Greater,
        CompareOp::Le => o != Ordering::Greater,
        CompareOp::Ge => o != Ordering::Less,
    }
}

/// Nested-loop evaluation over the cartesian product of the chain tables,
/// checking join and WHERE conditions row combination by row combination.
pub fn brute_force_sql(db: &Database, q: &SqlQuery) -> ResultSet {
    let chain = q.tables();
    let tables: Vec<_> = chain.iter().map(|t| db.table(t).unwrap()).collect();
    let at = |c: &ColumnRef| {
        let p = chain.iter().position(|t| *t == c.table).unwrap();
        (p, tables[p].spec.column_index(&c.column).unwrap())
    };
    let mut combos: Vec<Vec<usize>> = vec![vec![]];
    for level in 0..tables.len() {
        let mut next = Vec::new();
        for combo in &combos {
            for r in 0..tables[level].rows.len() {
                let mut c = combo.clone();
                c.push(r);
                let ok = q.joins.iter().all(|j| {
                    let (lp, lc) = at(&j.left);
                    let (rp, rc) = at(&j.right);
                    if lp > level || rp > level {
                        return true;
                    }
                    let (a, b) = (&tables[lp].rows[c[lp]][lc], &tables[rp].rows[c[rp]][rc]);
                    cmp(a, b) == Some(Ordering::Equal)
                });
                if ok {
                    next.push(c);
                }
            }
        }
        combos = next;
    }
    let cell = |c: &[usize], r: &ColumnRef| {
        let (p, i) = at(r);
        tables[p].rows[c[p]][i].clone()
    };
    combos.retain(|c| q.conditions.iter().all(|k| cmp(&cell(c, &k.column), &k.value).is_some_and(|o| holds(k.op, o))));
    let columns = q.select.iter().map(SelectItem::label).collect();
    if q.select.iter().all(|s| s.agg.is_none()) {
        let rows = combos.iter().map(|c| q.select.iter().map(|s| cell(c, &s.column)).collect()).collect();
        return ResultSet { columns, rows };
    }
    let row = q
        .select
        .iter()
        .map(|s| {
            let vals: Vec<CellValue> = combos.iter().map(|c| cell(c, &s.column)).filter(|v| !v.is_null()).collect();
            match s.agg.unwrap() {
                Aggregate::Count => CellValue::Integer(vals.len() as i64),
                Aggregate::Avg if vals.is_empty() => CellValue::Null,
                Aggregate::Avg => {
                    let sum: f64 = vals.iter().map(|v| v.as_f64().unwrap()).sum();
                    CellValue::Float(sum / vals.len() as f64)
                }
                agg => {
                    let want = if agg == Aggregate::Max { Ordering::Greater } else { Ordering::Less };
                    let mut best: Option<CellValue> = None;
                    for v in vals {
                        if best.as_ref().is_none_or(|b| cmp(&v, b) == Some(want)) {
                            best = Some(v);
                        }
                    }
                    best.unwrap_or(CellValue::Null)
                }
            }
        })
        .collect();
    ResultSet { columns, rows: vec![row] }
}

/// Random well-typed query over `manifest`: a connected join tree along
/// foreign keys, one or two select items and up to two conditions whose
/// values are drawn from the data.
pub fn random_sql(rng: &mut impl Rng, manifest: &SchemaManifest, db: &Database) -> SqlQuery {
    let names: Vec<&str> = manifest.tables.iter().map(|t| t.name.as_str()).collect();
    let root = *names.choose(rng).unwrap();
    let mut chain = vec![root.to_string()];
    let mut joins = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        let mut options = Vec::new();
        for t in &manifest.tables {
            for (c, parent) in t.foreign_keys() {
                let pk = manifest.table(parent).unwrap().primary_key.clone().unwrap();
                let has_child = chain.contains(&t.name);
                let has_parent = chain.iter().any(|x| x == parent);
                if has_child != has_parent {
                    let new = if has_child { parent.to_string() } else { t.name.clone() };
                    options.push((new, ColumnRef::new(parent, &pk), ColumnRef::new(&t.name, &c.name)));
                }
            }
        }
        let Some((new, p, c)) = options.choose(rng).cloned() else { break };
        let (left, right) = if rng.gen_bool(0.5) { (p, c) } else { (c, p) };
        chain.push(new.clone());
        joins.push(Join { table: new, left, right });
    }
    let columns: Vec<(ColumnRef, DataType)> = chain
        .iter()
        .flat_map(|t| {
            let spec = &db.table(t).unwrap().spec;
            spec.columns.iter().map(move |c| (ColumnRef::new(t, &c.name), c.datatype)).collect::<Vec<_>>()
        })
        .collect();
    let aggregate = rng.gen_bool(0.6);
    let select = (0..rng.gen_range(1..=2))
        .map(|_| {
            let (column, dt) = columns.choose(rng).unwrap().clone();
            let agg = aggregate.then(|| {
                let pool: &[Aggregate] = if dt == DataType::Text { &AGGS[..3] } else { AGGS };
                *pool.choose(rng).unwrap()
            });
            SelectItem { agg, column }
        })
        .collect();
    let conditions = (0..rng.gen_range(0..=2))
        .map(|_| {
            let (column, dt) = columns.choose(rng).unwrap().clone();
            let table = db.table(&column.table).unwrap();
            let ci = table.spec.column_index(&column.column).unwrap();
            let mut value = table.rows.choose(rng).map(|r| r[ci].clone()).unwrap_or(CellValue::Null);
            if value.is_null() {
                value = match dt {
                    DataType::Text => CellValue::text("zzz"),
                    DataType::Integer => CellValue::Integer(1),
                    DataType::Float => CellValue::Float(1.5),
                };
            }
            Condition { column, op: *OPS.choose(rng).unwrap(), value }
        })
        .collect();
    SqlQuery { select, from: root.to_string(), joins, conditions }
}

// ---------------------------------------------------------------------------
// Knowledge-graph oracles

/// Non-empty property cells plus non-empty foreign-key cells, read straight
/// from the CSV files.
pub fn csv_cell_count(manifest: &SchemaManifest, dir: &Path) -> usize {
    let mut total = 0;
    for t in &manifest.tables {
        let mut r = csv::Reader::from_path(dir.join(format!("{}.csv", t.name))).unwrap();
        let header: Vec<String> = r.headers().unwrap().iter().map(str::to_string).collect();
        let counted: HashSet<usize> = header
            .iter()
            .enumerate()
            .filter(|(_, h)| {
                t.columns.iter().any(|c| {
                    &c.name == *h && matches!(c.role, ColumnRole::Property | ColumnRole::ForeignKey { .. })
                })
            })
            .map(|(i, _)| i)
            .collect();
        for rec in r.records() {
            let rec = rec.unwrap();
            total += rec.iter().enumerate().filter(|(i, v)| counted.contains(i) && !v.trim().is_empty()).count();
        }
    }
    total
}

/// Longest root-to-leaf path (in edges) over the triples, by dynamic
/// programming along a topological order.
pub fn longest_path(triples: &[(String, String, bool)]) -> usize {
    // (subject, object, object_is_entity)
    let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut literal_leaf: HashSet<&str> = HashSet::new();
    let mut indeg: HashMap<&str, usize> = HashMap::new();
    for (s, o, entity) in triples {
        indeg.entry(s).or_insert(0);
        if *entity {
            children.entry(s).or_default().push(o);
            *indeg.entry(o).or_insert(0) += 1;
        } else {
            literal_leaf.insert(s);
        }
    }
    let roots: Vec<&str> = indeg.iter().filter(|(_, d)| **d == 0).map(|(k, _)| *k).collect();
    let mut order = Vec::new();
    let mut queue: VecDeque<&str> = roots.iter().copied().collect();
    let mut deg = indeg.clone();
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for c in children.get(x).into_iter().flatten() {
            let d = deg.get_mut(c).unwrap();
            *d -= 1;
            if *d == 0 {
                queue.push_back(c);
            }
        }
    }
    let mut height: HashMap<&str, usize> = HashMap::new();
    for x in order.iter().rev() {
        let mut h = usize::from(literal_leaf.contains(x));
        for c in children.get(x).into_iter().flatten() {
            h = h.max(1 + height[c]);
        }
        height.insert(x, h);
    }
    roots.iter().map(|r| height[r]).max().unwrap_or(0)
}
