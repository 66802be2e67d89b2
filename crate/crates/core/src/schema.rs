//! Schema manifests, the relation graph derived from them, and shortest
//! relation paths over that graph.
//!
//! Every table contributes one entity class (its key) and one literal class
//! per property column. Property columns become `entity -> literal` edges
//! labelled with the column name; a foreign key contributes a
//! `parent entity -> child entity` edge labelled with the child table name.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::value::DataType;

/// Key column name given to tables that declare no primary key.
pub const SYNTHETIC_KEY: &str = "row_id";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemaError {
    #[error("cannot read manifest `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("malformed manifest: {0}")]
    Parse(String),
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("duplicate table `{0}`")]
    DuplicateTable(String),
    #[error("table `{table}`: duplicate column `{column}`")]
    DuplicateColumn { table: String, column: String },
    #[error("table `{table}`: {message}")]
    InvalidKey { table: String, message: String },
    #[error("table `{table}` column `{column}` references unknown table `{references}`")]
    DanglingReference { table: String, column: String, references: String },
    #[error("table `{table}` column `{column}` references `{references}`, which has no primary key")]
    ReferenceWithoutKey { table: String, column: String, references: String },
    #[error("table `{table}` column `{column}`: {message}")]
    InvalidForeignKey { table: String, column: String, message: String },
    #[error("foreign keys form a cycle through tables {0:?}")]
    Cycle(Vec<String>),
    #[error("relation `{label}` is ambiguous: it is used by {first} and {second}")]
    AmbiguousRelation { label: String, first: String, second: String },
    #[error("entity label `{label}` is shared by tables `{first}` and `{second}`")]
    AmbiguousEntity { label: String, first: String, second: String },
    #[error("graph is not acyclic or a literal class has outgoing edges")]
    MalformedGraph,
    #[error("no path from {from} to {to}")]
    NoPath { from: String, to: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ColumnRole {
    PrimaryKey,
    ForeignKey { references: String },
    Property,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSpec {
    pub name: String,
    pub role: ColumnRole,
    pub datatype: DataType,
}

impl ColumnSpec {
    pub fn property(name: &str, datatype: DataType) -> Self {
        ColumnSpec { name: name.to_string(), role: ColumnRole::Property, datatype }
    }

    pub fn primary_key(name: &str, datatype: DataType) -> Self {
        ColumnSpec { name: name.to_string(), role: ColumnRole::PrimaryKey, datatype }
    }

    pub fn foreign_key(name: &str, references: &str, datatype: DataType) -> Self {
        ColumnSpec {
            name: name.to_string(),
            role: ColumnRole::ForeignKey { references: references.to_string() },
            datatype,
        }
    }

    pub fn references(&self) -> Option<&str> {
        match &self.role {
            ColumnRole::ForeignKey { references } => Some(references),
            _ => None,
        }
    }

    pub fn is_property(&self) -> bool {
        self.role == ColumnRole::Property
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableSpec {
    pub name: String,
    pub columns: Vec<ColumnSpec>,
    pub primary_key: Option<String>,
}

impl TableSpec {
    pub fn new(name: &str, columns: Vec<ColumnSpec>) -> Self {
        let primary_key = columns
            .iter()
            .find(|c| c.role == ColumnRole::PrimaryKey)
            .map(|c| c.name.clone());
        TableSpec { name: name.to_string(), columns, primary_key }
    }

    pub fn column(&self, name: &str) -> Option<&ColumnSpec> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn has_synthetic_key(&self) -> bool {
        self.primary_key.is_none()
    }

    /// Column holding the row identity: the declared primary key, or the
    /// synthetic `row_id`.
    pub fn key_column(&self) -> &str {
        self.primary_key.as_deref().unwrap_or(SYNTHETIC_KEY)
    }

    /// Prefix of this table's entity ids. Synthetic keys are qualified with
    /// the table name so that several keyless tables never share ids.
    pub fn entity_label(&self) -> String {
        match &self.primary_key {
            Some(pk) => pk.clone(),
            None => format!("{}_{}", self.name, SYNTHETIC_KEY),
        }
    }

    pub fn properties(&self) -> impl Iterator<Item = &ColumnSpec> {
        self.columns.iter().filter(|c| c.is_property())
    }

    pub fn foreign_keys(&self) -> impl Iterator<Item = (&ColumnSpec, &str)> {
        self.columns.iter().filter_map(|c| c.references().map(|r| (c, r)))
    }

    /// True when `column` names the key, including the synthetic one.
    pub fn is_key(&self, column: &str) -> bool {
        column == self.key_column()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SchemaManifest {
    pub tables: Vec<TableSpec>,
}

#[derive(Serialize, Deserialize)]
struct RawManifest {
    tables: Vec<RawTable>,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    name: String,
    #[serde(default)]
    primary_key: Option<String>,
    columns: Vec<RawColumn>,
}

#[derive(Serialize, Deserialize)]
struct RawColumn {
    name: String,
    role: RawRole,
    #[serde(default)]
    references: Option<String>,
    datatype: DataType,
}

#[derive(Serialize, Deserialize, PartialEq, Eq, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum RawRole {
    PrimaryKey,
    ForeignKey,
    Property,
}

pub fn is_valid_identifier(s: &str) -> bool {
    !s.is_empty()
        && !s.chars().any(|c| c.is_whitespace() || matches!(c, '.' | '"' | '/'))
        && s.chars().all(|c| !c.is_uppercase())
}

fn ident(s: &str) -> Result<String, SchemaError> {
    let s = s.trim().to_lowercase();
    if is_valid_identifier(&s) {
        Ok(s)
    } else {
        Err(SchemaError::InvalidIdentifier(s))
    }
}

/// Reads and validates a manifest file.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<SchemaManifest, SchemaError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| SchemaError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    SchemaManifest::from_json_str(&text)
}

impl SchemaManifest {
    pub fn new(tables: Vec<TableSpec>) -> Result<Self, SchemaError> {
        let manifest = SchemaManifest { tables };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn from_json_str(text: &str) -> Result<Self, SchemaError> {
        let raw: RawManifest =
            serde_json::from_str(text).map_err(|e| SchemaError::Parse(e.to_string()))?;
        let mut tables = Vec::with_capacity(raw.tables.len());
        for rt in raw.tables {
            let name = ident(&rt.name)?;
            let mut columns = Vec::with_capacity(rt.columns.len());
            for rc in rt.columns {
                let col_name = ident(&rc.name)?;
                let role = match (rc.role, rc.references) {
                    (RawRole::ForeignKey, Some(r)) => ColumnRole::ForeignKey { references: ident(&r)? },
                    (RawRole::ForeignKey, None) => {
                        return Err(SchemaError::InvalidForeignKey {
                            table: name,
                            column: col_name,
                            message: "foreign key without `references`".into(),
                        })
                    }
                    (_, Some(r)) => {
                        return Err(SchemaError::InvalidForeignKey {
                            table: name,
                            column: col_name,
                            message: format!("`references: {r}` on a non-foreign-key column"),
                        })
                    }
                    (RawRole::PrimaryKey, None) => ColumnRole::PrimaryKey,
                    (RawRole::Property, None) => ColumnRole::Property,
                };
                columns.push(ColumnSpec { name: col_name, role, datatype: rc.datatype });
            }
            let primary_key = rt.primary_key.as_deref().map(ident).transpose()?;
            let declared = columns.iter().find(|c| c.role == ColumnRole::PrimaryKey).map(|c| c.name.clone());
            let primary_key = match (primary_key, declared) {
                (Some(pk), Some(col)) if pk == col => Some(pk),
                (None, Some(col)) => Some(col),
                (None, None) => None,
                (Some(pk), _) => {
                    return Err(SchemaError::InvalidKey {
                        table: name,
                        message: format!("primary_key `{pk}` is not a column with role primary_key"),
                    })
                }
            };
            tables.push(TableSpec { name, columns, primary_key });
        }
        SchemaManifest::new(tables)
    }

    pub fn to_json_string(&self) -> String {
        let raw = RawManifest {
            tables: self
                .tables
                .iter()
                .map(|t| RawTable {
                    name: t.name.clone(),
                    primary_key: t.primary_key.clone(),
                    columns: t
                        .columns
                        .iter()
                        .map(|c| RawColumn {
                            name: c.name.clone(),
                            role: match c.role {
                                ColumnRole::PrimaryKey => RawRole::PrimaryKey,
                                ColumnRole::ForeignKey { .. } => RawRole::ForeignKey,
                                ColumnRole::Property => RawRole::Property,
                            },
                            references: c.references().map(str::to_string),
                            datatype: c.datatype,
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("manifest serializes")
    }

    pub fn table(&self, name: &str) -> Option<&TableSpec> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn table_index(&self, name: &str) -> Option<usize> {
        self.tables.iter().position(|t| t.name == name)
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        let mut seen = HashSet::new();
        for t in &self.tables {
            if !is_valid_identifier(&t.name) {
                return Err(SchemaError::InvalidIdentifier(t.name.clone()));
            }
            if !seen.insert(t.name.as_str()) {
                return Err(SchemaError::DuplicateTable(t.name.clone()));
            }
            let mut cols = HashSet::new();
            for c in &t.columns {
                if !is_valid_identifier(&c.name) {
                    return Err(SchemaError::InvalidIdentifier(c.name.clone()));
                }
                if !cols.insert(c.name.as_str()) {
                    return Err(SchemaError::DuplicateColumn { table: t.name.clone(), column: c.name.clone() });
                }
            }
            let pks: Vec<_> = t.columns.iter().filter(|c| c.role == ColumnRole::PrimaryKey).collect();
            if pks.len() > 1 {
                return Err(SchemaError::InvalidKey {
                    table: t.name.clone(),
                    message: "more than one primary key column".into(),
                });
            }
            match (&t.primary_key, pks.first()) {
                (Some(pk), Some(c)) if *pk == c.name => {}
                (None, None) => {
                    if t.column(SYNTHETIC_KEY).is_some() {
                        return Err(SchemaError::InvalidKey {
                            table: t.name.clone(),
                            message: format!("keyless table may not declare a `{SYNTHETIC_KEY}` column"),
                        });
                    }
                }
                _ => {
                    return Err(SchemaError::InvalidKey {
                        table: t.name.clone(),
                        message: "primary_key field does not match the primary_key column".into(),
                    })
                }
            }
        }
        for t in &self.tables {
            let mut parents = HashSet::new();
            for (c, r) in t.foreign_keys() {
                let parent = self.table(r).ok_or_else(|| SchemaError::DanglingReference {
                    table: t.name.clone(),
                    column: c.name.clone(),
                    references: r.to_string(),
                })?;
                let pk = parent.primary_key.as_deref().ok_or_else(|| SchemaError::ReferenceWithoutKey {
                    table: t.name.clone(),
                    column: c.name.clone(),
                    references: r.to_string(),
                })?;
                let pk_type = parent.column(pk).map(|p| p.datatype);
                if pk_type != Some(c.datatype) {
                    return Err(SchemaError::InvalidForeignKey {
                        table: t.name.clone(),
                        column: c.name.clone(),
                        message: format!("datatype {} differs from `{r}.{pk}`", c.datatype),
                    });
                }
                if !parents.insert(r) {
                    return Err(SchemaError::InvalidForeignKey {
                        table: t.name.clone(),
                        column: c.name.clone(),
                        message: format!("second foreign key to `{r}`"),
                    });
                }
            }
        }
        self.check_acyclic()
    }

    fn check_acyclic(&self) -> Result<(), SchemaError> {
        let n = self.tables.len();
        let mut indegree = vec![0usize; n];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (ci, t) in self.tables.iter().enumerate() {
            for (_, r) in t.foreign_keys() {
                let pi = self.table_index(r).expect("validated reference");
                children[pi].push(ci);
                indegree[ci] += 1;
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut visited = 0;
        while let Some(i) = queue.pop_front() {
            visited += 1;
            for &c in &children[i] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        if visited == n {
            Ok(())
        } else {
            let tables = (0..n).filter(|&i| indegree[i] > 0).map(|i| self.tables[i].name.clone()).collect();
            Err(SchemaError::Cycle(tables))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SchemaNode {
    /// Row entities of `table`, identified by `key_column`; `label` prefixes
    /// the entity ids.
    Entity { table: String, key_column: String, label: String },
    Literal { table: String, column: String },
}

impl SchemaNode {
    pub fn table(&self) -> &str {
        match self {
            SchemaNode::Entity { table, .. } | SchemaNode::Literal { table, .. } => table,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, SchemaNode::Literal { .. })
    }
}

impl fmt::Display for SchemaNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaNode::Entity { table, key_column, .. } => write!(f, "entity({table}.{key_column})"),
            SchemaNode::Literal { table, column } => write!(f, "literal({table}.{column})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SchemaEdge {
    pub from: NodeId,
    pub to: NodeId,
    pub relation: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hop {
    pub relation: String,
    pub to: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RelationPath {
    pub hops: Vec<Hop>,
}

impl RelationPath {
    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    pub fn relations(&self) -> Vec<&str> {
        self.hops.iter().map(|h| h.relation.as_str()).collect()
    }
}

/// The relation graph over entity and literal classes. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaGraph {
    nodes: Vec<SchemaNode>,
    edges: Vec<SchemaEdge>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
    manifest: SchemaManifest,
}

/// Derives the relation graph of a validated manifest.
pub fn build_schema_graph(manifest: &SchemaManifest) -> Result<SchemaGraph, SchemaError> {
    let mut nodes = Vec::new();
    let mut entity_of = HashMap::new();
    let mut labels: HashMap<String, &str> = HashMap::new();
    for t in &manifest.tables {
        let label = t.entity_label();
        if let Some(other) = labels.insert(label.clone(), &t.name) {
            return Err(SchemaError::AmbiguousEntity { label, first: other.to_string(), second: t.name.clone() });
        }
        entity_of.insert(t.name.as_str(), NodeId(nodes.len()));
        nodes.push(SchemaNode::Entity { table: t.name.clone(), key_column: t.key_column().to_string(), label });
        for c in t.properties() {
            nodes.push(SchemaNode::Literal { table: t.name.clone(), column: c.name.clone() });
        }
    }
    let mut edges = Vec::new();
    let mut node_cursor = 0;
    for t in &manifest.tables {
        let entity = NodeId(node_cursor);
        for (i, c) in t.properties().enumerate() {
            edges.push(SchemaEdge { from: entity, to: NodeId(node_cursor + 1 + i), relation: c.name.clone() });
        }
        node_cursor += 1 + t.properties().count();
        for (_, parent) in t.foreign_keys() {
            let from = *entity_of.get(parent).ok_or_else(|| SchemaError::DanglingReference {
                table: t.name.clone(),
                column: String::new(),
                references: parent.to_string(),
            })?;
            edges.push(SchemaEdge { from, to: entity, relation: t.name.clone() });
        }
    }
    let mut owner: HashMap<&str, &SchemaEdge> = HashMap::new();
    for e in &edges {
        if let Some(prev) = owner.insert(&e.relation, e) {
            return Err(SchemaError::AmbiguousRelation {
                label: e.relation.clone(),
                first: format!("{} -> {}", nodes[prev.from.0], nodes[prev.to.0]),
                second: format!("{} -> {}", nodes[e.from.0], nodes[e.to.0]),
            });
        }
    }
    let mut graph = SchemaGraph::from_parts(nodes, edges)?;
    graph.manifest = manifest.clone();
    Ok(graph)
}

impl SchemaGraph {
    /// Builds a graph from explicit parts, checking that it is acyclic and
    /// that literal classes have no outgoing edges. The result carries an
    /// empty manifest.
    pub fn from_parts(nodes: Vec<SchemaNode>, edges: Vec<SchemaEdge>) -> Result<Self, SchemaError> {
        let n = nodes.len();
        let mut outgoing = vec![Vec::new(); n];
        let mut incoming = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            if e.from.0 >= n || e.to.0 >= n || nodes[e.from.0].is_literal() {
                return Err(SchemaError::MalformedGraph);
            }
            outgoing[e.from.0].push(i);
            incoming[e.to.0].push(i);
        }
        let graph = SchemaGraph { nodes, edges, outgoing, incoming, manifest: SchemaManifest::default() };
        if graph.topological_order().is_none() {
            return Err(SchemaError::MalformedGraph);
        }
        Ok(graph)
    }

    pub fn nodes(&self) -> &[SchemaNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[SchemaEdge] {
        &self.edges
    }

    pub fn node(&self, id: NodeId) -> &SchemaNode {
        &self.nodes[id.0]
    }

    pub fn manifest(&self) -> &SchemaManifest {
        &self.manifest
    }

    pub fn outgoing(&self, id: NodeId) -> impl Iterator<Item = &SchemaEdge> {
        self.outgoing[id.0].iter().map(move |&i| &self.edges[i])
    }

    pub fn incoming(&self, id: NodeId) -> impl Iterator<Item = &SchemaEdge> {
        self.incoming[id.0].iter().map(move |&i| &self.edges[i])
    }

    pub fn entity_node(&self, table: &str) -> Option<NodeId> {
        self.nodes
            .iter()
            .position(|n| matches!(n, SchemaNode::Entity { table: t, .. } if t == table))
            .map(NodeId)
    }

    pub fn literal_node(&self, table: &str, column: &str) -> Option<NodeId> {
        self.nodes
            .iter()
            .position(|n| matches!(n, SchemaNode::Literal { table: t, column: c } if t == table && c == column))
            .map(NodeId)
    }

    /// Node carrying the values of `table.column`: the literal class of a
    /// property, the table's own entity for its key, or the referenced
    /// parent's entity for a foreign key.
    pub fn column_node(&self, table: &str, column: &str) -> Option<NodeId> {
        let spec = self.manifest.table(table)?;
        if spec.is_key(column) {
            return self.entity_node(table);
        }
        match &spec.column(column)?.role {
            ColumnRole::Property => self.literal_node(table, column),
            ColumnRole::ForeignKey { references } => self.entity_node(references),
            ColumnRole::PrimaryKey => self.entity_node(table),
        }
    }

    /// Kahn order over all nodes; `None` if the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<NodeId>> {
        let mut indegree: Vec<usize> = self.incoming.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..self.nodes.len()).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(i) = queue.pop_front() {
            order.push(NodeId(i));
            for &e in &self.outgoing[i] {
                let to = self.edges[e].to.0;
                indegree[to] -= 1;
                if indegree[to] == 0 {
                    queue.push_back(to);
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }

    /// Hop distance from `from` to every node, following edges forward.
    pub fn distances_from(&self, from: NodeId) -> Vec<Option<usize>> {
        bfs(self.nodes.len(), from.0, |i| self.outgoing[i].iter().map(|&e| self.edges[e].to.0))
    }

    /// Minimum-hop forward path from `from` to `to`. Among equally short
    /// paths the one with the lexicographically smallest relation labels,
    /// compared hop by hop, wins.
    pub fn shortest_relation_path(&self, from: NodeId, to: NodeId) -> Result<RelationPath, SchemaError> {
        // Distances to the target over reversed edges, then a layered walk:
        // every node of the current frontier is extended along its
        // distance-decreasing edges, and only the edges with the smallest
        // label survive into the next frontier.
        let to_target = bfs(self.nodes.len(), to.0, |i| self.incoming[i].iter().map(|&e| self.edges[e].from.0));
        let Some(mut remaining) = to_target[from.0] else {
            return Err(SchemaError::NoPath { from: self.nodes[from.0].to_string(), to: self.nodes[to.0].to_string() });
        };
        let mut frontier = vec![from.0];
        // Per layer: node -> edge that first reached it.
        let mut layers: Vec<BTreeMap<usize, usize>> = Vec::with_capacity(remaining);
        while remaining > 0 {
            let candidates: Vec<usize> = frontier
                .iter()
                .flat_map(|&n| self.outgoing[n].iter().copied())
                .filter(|&e| to_target[self.edges[e].to.0] == Some(remaining - 1))
                .collect();
            let best = candidates
                .iter()
                .map(|&e| &self.edges[e].relation)
                .min()
                .expect("a distance-decreasing edge exists on every shortest path");
            let mut layer = BTreeMap::new();
            for &e in &candidates {
                if &self.edges[e].relation == best {
                    layer.entry(self.edges[e].to.0).or_insert(e);
                }
            }
            frontier = layer.keys().copied().collect();
            layers.push(layer);
            remaining -= 1;
        }
        let mut hops = Vec::with_capacity(layers.len());
        let mut at = to.0;
        for layer in layers.iter().rev() {
            let e = &self.edges[layer[&at]];
            hops.push(Hop { relation: e.relation.clone(), to: e.to });
            at = e.from.0;
        }
        hops.reverse();
        Ok(RelationPath { hops })
    }

    /// Child tables of every table, following foreign keys (parent -> children).
    pub fn table_children(&self) -> BTreeMap<String, Vec<String>> {
        let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for t in &self.manifest.tables {
            out.entry(t.name.clone()).or_default();
            for (_, p) in t.foreign_keys() {
                out.entry(p.to_string()).or_default().push(t.name.clone());
            }
        }
        out
    }
}

fn bfs<I>(n: usize, start: usize, next: impl Fn(usize) -> I) -> Vec<Option<usize>>
where
    I: Iterator<Item = usize>,
{
    let mut dist = vec![None; n];
    dist[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        let d = dist[i].unwrap();
        for j in next(i) {
            if dist[j].is_none() {
                dist[j] = Some(d + 1);
                queue.push_back(j);
            }
        }
    }
    dist
}
