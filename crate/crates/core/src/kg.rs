//! Knowledge-graph compilation of a [`Database`] and a basic-graph-pattern
//! executor for the SPARQL subset.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::query::{Projection, QueryError, SparqlQuery, Term};
use crate::relational::{aggregate, Database, ResultSet, Row};
use crate::schema::SchemaManifest;
use crate::value::{satisfies, CellValue, CompareOp, TypeClash};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KgError {
    #[error("unknown predicate `</{0}>`")]
    UnknownPredicate(String),
    #[error("projected or filtered variable `?{0}` is not bound by any pattern")]
    UnboundProjectionVariable(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("invalid query: {0}")]
    Invalid(String),
}

impl From<TypeClash> for KgError {
    fn from(c: TypeClash) -> Self {
        KgError::TypeMismatch(format!("cannot compare {} with {}", c.left, c.right))
    }
}

/// `/<key_column>/<value>`, lowercase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityId(String);

impl EntityId {
    pub fn new(label: &str, key: &CellValue) -> Self {
        EntityId(format!("/{}/{}", label, key.to_plain()).to_lowercase())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Object {
    Entity(EntityId),
    Literal(CellValue),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: EntityId,
    /// `/<name>`.
    pub predicate: String,
    pub object: Object,
}

impl Triple {
    /// One TSV line: `subject<TAB>predicate<TAB>object`, literals quoted.
    pub fn to_tsv(&self) -> String {
        let object = match &self.object {
            Object::Entity(e) => e.to_string(),
            Object::Literal(v) => format!("\"{}\"", v.to_plain().replace('"', "\"\"")),
        };
        format!("{}\t{}\t{}", self.subject, self.predicate, object)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    Entity(u32),
    Literal(CellValue),
}

/// Immutable triple set with subject and predicate indexes.
#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    triples: Vec<Triple>,
    /// Entity id and the key value it was minted from.
    entities: Vec<(EntityId, CellValue)>,
    predicates: HashMap<String, u32>,
    by_subject: HashMap<(u32, u32), Vec<Node>>,
    by_predicate: Vec<Vec<(u32, Node)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct KgMetrics {
    pub triple_count: usize,
    pub max_depth: usize,
}

/// Compiles every row into an entity, every non-null property cell into a
/// literal triple and every non-null foreign key into a parent→child triple
/// labelled with the child table's name.
pub fn build_kg(db: &Database, manifest: &SchemaManifest) -> KnowledgeGraph {
    let mut set = BTreeSet::new();
    let mut vocabulary = BTreeSet::new();
    for spec in &manifest.tables {
        let label = spec.entity_label();
        for c in spec.properties() {
            vocabulary.insert(c.name.clone());
        }
        let parents: Vec<(usize, String)> = spec
            .foreign_keys()
            .filter_map(|(c, parent)| {
                let parent_label = manifest.table(parent)?.entity_label();
                Some((spec.column_index(&c.name)?, parent_label))
            })
            .collect();
        if !parents.is_empty() {
            vocabulary.insert(spec.name.clone());
        }
        let Some(table) = db.table(&spec.name) else { continue };
        let key_index = table.spec.column_index(spec.key_column()).expect("key column");
        let props: Vec<(usize, String)> = spec
            .properties()
            .filter_map(|c| Some((table.spec.column_index(&c.name)?, format!("/{}", c.name))))
            .collect();
        for row in &table.rows {
            let me = EntityId::new(&label, &row[key_index]);
            for (i, pred) in &props {
                if !row[*i].is_null() {
                    set.insert(Triple { subject: me.clone(), predicate: pred.clone(), object: Object::Literal(row[*i].clone()) });
                }
            }
            for (i, parent_label) in &parents {
                if !row[*i].is_null() {
                    set.insert(Triple {
                        subject: EntityId::new(parent_label, &row[*i]),
                        predicate: format!("/{}", spec.name),
                        object: Object::Entity(me.clone()),
                    });
                }
            }
        }
    }

    // Key values for entity projection.
    let mut keys: HashMap<EntityId, CellValue> = HashMap::new();
    for spec in &manifest.tables {
        let label = spec.entity_label();
        if let Some(table) = db.table(&spec.name) {
            let ki = table.spec.column_index(spec.key_column()).expect("key column");
            for row in &table.rows {
                keys.insert(EntityId::new(&label, &row[ki]), row[ki].clone());
            }
        }
    }
    KnowledgeGraph::index(set.into_iter().collect(), vocabulary, &keys)
}

impl KnowledgeGraph {
    fn index(triples: Vec<Triple>, vocabulary: BTreeSet<String>, keys: &HashMap<EntityId, CellValue>) -> Self {
        let mut kg = KnowledgeGraph {
            triples: Vec::new(),
            entities: Vec::new(),
            predicates: HashMap::new(),
            by_subject: HashMap::new(),
            by_predicate: Vec::new(),
        };
        for v in vocabulary {
            kg.predicate_id(&v);
        }
        let mut entity_ids: HashMap<EntityId, u32> = HashMap::new();
        let mut intern = |kg: &mut KnowledgeGraph, e: &EntityId| -> u32 {
            *entity_ids.entry(e.clone()).or_insert_with(|| {
                let key = keys.get(e).cloned().unwrap_or_else(|| CellValue::Text(e.to_string()));
                kg.entities.push((e.clone(), key));
                (kg.entities.len() - 1) as u32
            })
        };
        for t in &triples {
            let s = intern(&mut kg, &t.subject);
            let p = kg.predicate_id(t.predicate.trim_start_matches('/'));
            let o = match &t.object {
                Object::Entity(e) => Node::Entity(intern(&mut kg, e)),
                Object::Literal(v) => Node::Literal(v.clone()),
            };
            kg.by_subject.entry((s, p)).or_default().push(o.clone());
            kg.by_predicate[p as usize].push((s, o));
        }
        kg.triples = triples;
        kg
    }

    fn predicate_id(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.predicates.get(name) {
            return id;
        }
        let id = self.by_predicate.len() as u32;
        self.predicates.insert(name.to_string(), id);
        self.by_predicate.push(Vec::new());
        id
    }

    /// Triples in sorted order.
    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Whether `name` (without brackets or slash) is a relation of the schema.
    pub fn knows_predicate(&self, name: &str) -> bool {
        self.predicates.contains_key(name)
    }

    /// Tab-separated dump, one triple per line, sorted.
    pub fn dump_tsv(&self) -> String {
        let mut out = String::new();
        for t in &self.triples {
            let _ = writeln!(out, "{}", t.to_tsv());
        }
        out
    }

    fn value_of(&self, n: &Node) -> CellValue {
        match n {
            Node::Entity(e) => self.entities[*e as usize].1.clone(),
            Node::Literal(v) => v.clone(),
        }
    }
}

/// Triple count and the number of edges on the longest directed path from a
/// root entity to a literal or leaf entity.
pub fn kg_metrics(kg: &KnowledgeGraph) -> KgMetrics {
    let n = kg.entities.len();
    let mut children: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut has_literal = vec![false; n];
    let mut has_parent = vec![false; n];
    for ((s, _), objects) in &kg.by_subject {
        for o in objects {
            match o {
                Node::Entity(c) => {
                    children[*s as usize].push(*c);
                    has_parent[*c as usize] = true;
                }
                Node::Literal(_) => has_literal[*s as usize] = true,
            }
        }
    }
    // Iterative post-order so deep graphs cannot overflow the stack.
    let mut depth: Vec<Option<usize>> = vec![None; n];
    for start in 0..n {
        if depth[start].is_some() {
            continue;
        }
        let mut stack = vec![(start, false)];
        while let Some((v, expanded)) = stack.pop() {
            if depth[v].is_some() {
                continue;
            }
            if expanded {
                let mut d = usize::from(has_literal[v]);
                for &c in &children[v] {
                    d = d.max(1 + depth[c as usize].expect("child finished"));
                }
                depth[v] = Some(d);
            } else {
                stack.push((v, true));
                for &c in &children[v] {
                    if depth[c as usize].is_none() {
                        stack.push((c as usize, false));
                    }
                }
            }
        }
    }
    let max_depth = (0..n).filter(|&v| !has_parent[v]).filter_map(|v| depth[v]).max().unwrap_or(0);
    KgMetrics { triple_count: kg.len(), max_depth }
}

struct Plan {
    /// Pattern steps in execution order: (subject slot, predicate id, object).
    steps: Vec<(usize, u32, PlanObject)>,
    /// Filters to check right after each step.
    filters_after: Vec<Vec<(usize, CompareOp, CellValue)>>,
    slots: usize,
}

enum PlanObject {
    Var(usize),
    Const(CellValue),
}

fn plan(kg: &KnowledgeGraph, q: &SparqlQuery, slot: &HashMap<&str, usize>) -> Result<Plan, KgError> {
    let mut remaining: Vec<usize> = (0..q.patterns.len()).collect();
    let mut bound = vec![false; slot.len()];
    let mut steps = Vec::new();
    let mut filters_after = Vec::new();
    let mut pending: Vec<usize> = (0..q.filters.len()).collect();
    while !remaining.is_empty() {
        let pick = remaining
            .iter()
            .position(|&i| bound[slot[q.patterns[i].subject.as_str()]])
            .or_else(|| {
                remaining.iter().position(|&i| matches!(&q.patterns[i].object, Term::Var(v) if bound[slot[v.as_str()]]))
            })
            .unwrap_or(0);
        let p = &q.patterns[remaining.remove(pick)];
        let pred = *kg.predicates.get(&p.predicate).ok_or_else(|| KgError::UnknownPredicate(p.predicate.clone()))?;
        let s = slot[p.subject.as_str()];
        bound[s] = true;
        let object = match &p.object {
            Term::Var(v) => {
                bound[slot[v.as_str()]] = true;
                PlanObject::Var(slot[v.as_str()])
            }
            Term::Literal(c) => PlanObject::Const(c.clone()),
        };
        steps.push((s, pred, object));
        let (ready, rest): (Vec<usize>, Vec<usize>) =
            pending.into_iter().partition(|&f| bound[slot[q.filters[f].var.as_str()]]);
        pending = rest;
        filters_after.push(
            ready
                .into_iter()
                .map(|f| (slot[q.filters[f].var.as_str()], q.filters[f].op, q.filters[f].value.clone()))
                .collect(),
        );
    }
    Ok(Plan { steps, filters_after, slots: slot.len() })
}

struct Search<'a> {
    kg: &'a KnowledgeGraph,
    plan: &'a Plan,
    binding: Vec<Option<Node>>,
    out: Vec<Vec<Node>>,
    projected: &'a [usize],
}

impl Search<'_> {
    fn run(&mut self, step: usize) -> Result<(), KgError> {
        if step == self.plan.steps.len() {
            let row = self.projected.iter().map(|&s| self.binding[s].clone().expect("projected slot bound")).collect();
            self.out.push(row);
            return Ok(());
        }
        let (s, p, ref object) = self.plan.steps[step];
        let candidates: Vec<(u32, Node)> = match &self.binding[s] {
            Some(Node::Entity(e)) => match self.kg.by_subject.get(&(*e, p)) {
                Some(objs) => objs.iter().map(|o| (*e, o.clone())).collect(),
                None => return Ok(()),
            },
            Some(Node::Literal(_)) => return Ok(()),
            None => self.kg.by_predicate[p as usize].clone(),
        };
        for (subj, obj) in candidates {
            let mut newly = Vec::new();
            if self.binding[s].is_none() {
                self.binding[s] = Some(Node::Entity(subj));
                newly.push(s);
            }
            let ok = match object {
                PlanObject::Const(c) => match &obj {
                    Node::Literal(v) => satisfies(v, CompareOp::Eq, c)?,
                    Node::Entity(_) => false,
                },
                PlanObject::Var(o) => match &self.binding[*o] {
                    Some(existing) => *existing == obj,
                    None => {
                        self.binding[*o] = Some(obj.clone());
                        newly.push(*o);
                        true
                    }
                },
            };
            let mut pass = ok;
            if pass {
                for (slot, op, value) in &self.plan.filters_after[step] {
                    let v = self.kg.value_of(self.binding[*slot].as_ref().expect("filter slot bound"));
                    if !satisfies(&v, *op, value)? {
                        pass = false;
                        break;
                    }
                }
            }
            if pass {
                self.run(step + 1)?;
            }
            for v in newly {
                self.binding[v] = None;
            }
        }
        Ok(())
    }
}

/// Bag-semantics BGP matching. Entity-valued projections yield the entity's
/// key value, so results line up with the relational executor.
pub fn execute_sparql(kg: &KnowledgeGraph, q: &SparqlQuery) -> Result<ResultSet, KgError> {
    q.validate().map_err(|e| match e {
        QueryError::UnboundProjectionVariable(v) => KgError::UnboundProjectionVariable(v),
        other => KgError::Invalid(other.to_string()),
    })?;
    let mut slot: HashMap<&str, usize> = HashMap::new();
    for p in &q.patterns {
        for v in std::iter::once(p.subject.as_str()).chain(p.object.as_var()) {
            let n = slot.len();
            slot.entry(v).or_insert(n);
        }
    }
    let plan = plan(kg, q, &slot)?;
    let projected: Vec<usize> = q.projection.iter().map(|p| slot[p.var()]).collect();
    let mut search = Search { kg, plan: &plan, binding: vec![None; plan.slots], out: Vec::new(), projected: &projected };
    search.run(0)?;
    let solutions = search.out;
    let columns = q.projection.iter().map(Projection::label).collect();
    if !q.is_aggregate() {
        let rows = solutions.iter().map(|r| r.iter().map(|n| kg.value_of(n)).collect()).collect();
        return Ok(ResultSet { columns, rows });
    }
    let mut row: Row = Vec::with_capacity(q.projection.len());
    for (i, p) in q.projection.iter().enumerate() {
        let Projection::Aggregate { agg, .. } = p else { unreachable!("validated") };
        let values: Vec<CellValue> = solutions.iter().map(|r| kg.value_of(&r[i])).collect();
        row.push(aggregate(*agg, &values).map_err(|e| KgError::TypeMismatch(e.to_string()))?);
    }
    Ok(ResultSet { columns, rows: vec![row] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_sparql;
    use crate::schema::{ColumnSpec, TableSpec};
    use crate::value::DataType;
    use std::collections::BTreeMap;

    fn manifest() -> SchemaManifest {
        SchemaManifest::new(vec![
            TableSpec::new(
                "patients",
                vec![
                    ColumnSpec::primary_key("subject_id", DataType::Integer),
                    ColumnSpec::property("name", DataType::Text),
                    ColumnSpec::property("gender", DataType::Text),
                ],
            ),
            TableSpec::new(
                "admissions",
                vec![
                    ColumnSpec::primary_key("hadm_id", DataType::Integer),
                    ColumnSpec::foreign_key("subject_id", "patients", DataType::Integer),
                ],
            ),
            TableSpec::new(
                "prescriptions",
                vec![
                    ColumnSpec::foreign_key("hadm_id", "admissions", DataType::Integer),
                    ColumnSpec::property("drug", DataType::Text),
                ],
            ),
        ])
        .unwrap()
    }

    fn kg() -> KnowledgeGraph {
        let i = CellValue::Integer;
        let t = CellValue::text;
        let db = Database::from_rows(
            &manifest(),
            BTreeMap::from([
                ("patients".into(), vec![vec![i(12), t("John"), t("m")], vec![i(13), t("Ann"), t("f")]]),
                ("admissions".into(), vec![vec![i(231), i(12)], vec![i(232), i(13)]]),
                ("prescriptions".into(), vec![vec![i(231), t("aspirin")], vec![i(231), t("aspirin")], vec![i(232), CellValue::Null]]),
            ]),
        )
        .unwrap();
        build_kg(&db, &manifest())
    }

    fn has(kg: &KnowledgeGraph, s: &str, p: &str, o: Object) -> bool {
        kg.triples().iter().any(|t| t.subject.as_str() == s && t.predicate == p && t.object == o)
    }

    #[test]
    fn small_schema_triples() {
        let kg = kg();
        assert!(has(&kg, "/subject_id/12", "/name", Object::Literal(CellValue::text("john"))));
        assert!(has(&kg, "/subject_id/12", "/admissions", Object::Entity(EntityId("/hadm_id/231".into()))));
        assert!(has(&kg, "/hadm_id/231", "/prescriptions", Object::Entity(EntityId("/prescriptions_row_id/1".into()))));
        // 4 names/genders + 2 admission links + 3 prescription links + 2 drugs
        assert_eq!(kg.len(), 11);
        assert_eq!(kg_metrics(&kg), KgMetrics { triple_count: 11, max_depth: 3 });
    }

    #[test]
    fn duplicate_rows_stay_distinct() {
        let q = parse_sparql(
            "select ( count ( ?drug ) as ?agg ) where { ?subject_id </admissions> ?hadm_id . \
             ?hadm_id </prescriptions> ?rx . ?rx </drug> ?drug . ?subject_id </name> \"john\" . }",
        )
        .unwrap();
        let r = execute_sparql(&kg(), &q).unwrap();
        assert_eq!(r.rows, vec![vec![CellValue::Integer(2)]]);
    }

    #[test]
    fn entity_projection_yields_key() {
        let q = parse_sparql("select ?s where { ?s </gender> \"f\" . }").unwrap();
        let r = execute_sparql(&kg(), &q).unwrap();
        assert_eq!(r.rows, vec![vec![CellValue::Integer(13)]]);
        let q = parse_sparql("select ?s where { ?s </admissions> ?h . filter ( ?s >= 13 ) }").unwrap();
        assert_eq!(execute_sparql(&kg(), &q).unwrap().rows, vec![vec![CellValue::Integer(13)]]);
    }

    #[test]
    fn unknown_predicate_and_type_clash() {
        let q = parse_sparql("select ?x where { ?s </nope> ?x . }").unwrap();
        assert_eq!(execute_sparql(&kg(), &q), Err(KgError::UnknownPredicate("nope".into())));
        let q = parse_sparql("select ?g where { ?s </gender> ?g . filter ( ?g > 3 ) }").unwrap();
        assert!(matches!(execute_sparql(&kg(), &q), Err(KgError::TypeMismatch(_))));
    }

    #[test]
    fn empty_graph() {
        let db = Database::from_rows(&manifest(), BTreeMap::new()).unwrap();
        let kg = build_kg(&db, &manifest());
        assert_eq!(kg_metrics(&kg), KgMetrics { triple_count: 0, max_depth: 0 });
        // A schema predicate with no triples is not an error.
        let q = parse_sparql("select ( max ( ?d ) as ?agg ) where { ?r </drug> ?d . }").unwrap();
        assert_eq!(execute_sparql(&kg, &q).unwrap().rows, vec![vec![CellValue::Null]]);
    }

    #[test]
    fn tsv_quotes_literals() {
        let kg = kg();
        let dump = kg.dump_tsv();
        assert!(dump.contains("/subject_id/12\t/name\t\"john\"\n"));
        assert!(dump.contains("/subject_id/12\t/admissions\t/hadm_id/231\n"));
    }
}
