//! The SPARQL subset:
//!
//! ```text
//! select (?v+ | ( <agg> ( ?v ) as ?a )+) where { (?s </rel> <obj> .)* (filter ( ?v <op> <val> ))* }
//! ```
//!
//! Relations are written as single bracketed tokens (`</name>`), which keeps
//! every serialized query whitespace-tokenizable.

use std::collections::{HashMap, HashSet};
use std::fmt;

use super::lexer::{lex, Tok};
use super::sql::Aggregate;
use super::{unsupported_keyword, QueryError, TokenStream};
use crate::value::{CellValue, CompareOp};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Literal(CellValue),
}

impl Term {
    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Literal(_) => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Term::Var(v) => format!("?{v}"),
            Term::Literal(c) => c.to_literal(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: String,
    /// Relation name without brackets or slash.
    pub predicate: String,
    pub object: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Projection {
    Var(String),
    Aggregate { agg: Aggregate, var: String, alias: String },
}

impl Projection {
    pub fn var(&self) -> &str {
        match self {
            Projection::Var(v) | Projection::Aggregate { var: v, .. } => v,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Projection::Var(v) => format!("?{v}"),
            Projection::Aggregate { alias, .. } => format!("?{alias}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarFilter {
    pub var: String,
    pub op: CompareOp,
    pub value: CellValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparqlQuery {
    pub projection: Vec<Projection>,
    pub patterns: Vec<TriplePattern>,
    pub filters: Vec<VarFilter>,
}

impl SparqlQuery {
    pub fn is_aggregate(&self) -> bool {
        self.projection.iter().any(|p| matches!(p, Projection::Aggregate { .. }))
    }

    fn pattern_vars(&self) -> HashSet<&str> {
        let mut vars = HashSet::new();
        for p in &self.patterns {
            vars.insert(p.subject.as_str());
            if let Term::Var(v) = &p.object {
                vars.insert(v.as_str());
            }
        }
        vars
    }

    /// Projected and filtered variables must be bound by a pattern, aggregate
    /// and plain projections may not be mixed, and the patterns must form a
    /// single connected component over their variables.
    pub fn validate(&self) -> Result<(), QueryError> {
        let err = |message: String| QueryError::SparqlSyntax { position: 0, message };
        if self.projection.is_empty() {
            return Err(err("empty projection".into()));
        }
        let aggs = self.projection.iter().filter(|p| matches!(p, Projection::Aggregate { .. })).count();
        if aggs != 0 && aggs != self.projection.len() {
            return Err(QueryError::Unsupported("mixing aggregate and plain projections".into()));
        }
        let vars = self.pattern_vars();
        for v in self.projection.iter().map(Projection::var).chain(self.filters.iter().map(|f| f.var.as_str())) {
            if !vars.contains(v) {
                return Err(QueryError::UnboundProjectionVariable(v.to_string()));
            }
        }
        let mut aliases = HashSet::new();
        for p in &self.projection {
            if let Projection::Aggregate { alias, .. } = p {
                if vars.contains(alias.as_str()) || !aliases.insert(alias.as_str()) {
                    return Err(err(format!("aggregate alias `?{alias}` clashes with another variable")));
                }
            }
        }
        for f in &self.filters {
            if f.value.is_null() {
                return Err(err(format!("filter on `?{}` has no value", f.var)));
            }
        }
        if !self.is_connected() {
            return Err(err("triple patterns do not form a connected graph".into()));
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        if self.patterns.len() <= 1 {
            return true;
        }
        let mut index: HashMap<&str, usize> = HashMap::new();
        for v in self.pattern_vars() {
            let n = index.len();
            index.insert(v, n);
        }
        let mut parent: Vec<usize> = (0..index.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for p in &self.patterns {
            if let Term::Var(o) = &p.object {
                let (a, b) = (find(&mut parent, index[p.subject.as_str()]), find(&mut parent, index[o.as_str()]));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, index[self.patterns[0].subject.as_str()]);
        self.patterns.iter().all(|p| find(&mut parent, index[p.subject.as_str()]) == root)
    }
}

impl fmt::Display for SparqlQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_sparql(self).to_line())
    }
}

fn syntax(position: usize, message: String) -> QueryError {
    QueryError::SparqlSyntax { position, message }
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn fail<T>(&self, at: usize, what: &str, found: Option<&Tok>) -> Result<T, QueryError> {
        let found = found.map(|t| format!("`{}`", t.render())).unwrap_or_else(|| "end of query".into());
        Err(syntax(at, format!("expected {what}, found {found}")))
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), QueryError> {
        let t = self.next();
        if t.as_ref() == Some(want) {
            Ok(())
        } else {
            self.fail(self.pos - 1, what, t.as_ref())
        }
    }

    fn var(&mut self) -> Result<String, QueryError> {
        match self.next() {
            Some(Tok::Var(v)) => Ok(v),
            t => self.fail(self.pos - 1, "a variable", t.as_ref()),
        }
    }

    fn literal(&mut self) -> Result<CellValue, QueryError> {
        match self.next() {
            Some(Tok::Str(s)) => Ok(CellValue::text(s)),
            Some(Tok::Number(n)) => {
                let v = if n.contains('.') {
                    n.parse::<f64>().ok().filter(|x| x.is_finite()).map(CellValue::Float)
                } else {
                    n.parse::<i64>().ok().map(CellValue::Integer)
                };
                v.ok_or_else(|| syntax(self.pos - 1, format!("bad number `{n}`")))
            }
            t => self.fail(self.pos - 1, "a literal", t.as_ref()),
        }
    }

    fn projection(&mut self) -> Result<Vec<Projection>, QueryError> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Var(_)) => out.push(Projection::Var(self.var()?)),
                Some(Tok::Punct('(')) => {
                    self.pos += 1;
                    let agg = match self.next() {
                        Some(Tok::Word(w)) => match Aggregate::from_keyword(&w) {
                            Some(a) => a,
                            None => return self.fail(self.pos - 1, "an aggregate", Some(&Tok::Word(w))),
                        },
                        t => return self.fail(self.pos - 1, "an aggregate", t.as_ref()),
                    };
                    self.expect(&Tok::Punct('('), "`(`")?;
                    if matches!(self.peek(), Some(Tok::Word(w)) if w == "distinct") {
                        return Err(QueryError::Unsupported("DISTINCT".into()));
                    }
                    let var = self.var()?;
                    self.expect(&Tok::Punct(')'), "`)`")?;
                    self.expect(&Tok::Word("as".into()), "`as`")?;
                    let alias = self.var()?;
                    self.expect(&Tok::Punct(')'), "`)`")?;
                    out.push(Projection::Aggregate { agg, var, alias });
                }
                Some(Tok::Word(w)) if w == "distinct" => return Err(QueryError::Unsupported("DISTINCT".into())),
                Some(Tok::Punct('*')) => return Err(QueryError::Unsupported("`select *`".into())),
                _ => break,
            }
        }
        if out.is_empty() {
            return self.fail(self.pos, "a projection", self.peek());
        }
        Ok(out)
    }

    fn query(&mut self) -> Result<SparqlQuery, QueryError> {
        self.expect(&Tok::Word("select".into()), "`select`")?;
        let projection = self.projection()?;
        self.expect(&Tok::Word("where".into()), "`where`")?;
        self.expect(&Tok::Punct('{'), "`{`")?;
        let mut patterns = Vec::new();
        let mut filters = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Punct('}')) => {
                    self.pos += 1;
                    break;
                }
                Some(Tok::Var(_)) => {
                    let subject = self.var()?;
                    let predicate = match self.next() {
                        Some(Tok::Iri(i)) => i,
                        t => return self.fail(self.pos - 1, "a relation like `</name>`", t.as_ref()),
                    };
                    let object = match self.peek() {
                        Some(Tok::Var(_)) => Term::Var(self.var()?),
                        _ => Term::Literal(self.literal()?),
                    };
                    patterns.push(TriplePattern { subject, predicate, object });
                    match self.peek() {
                        Some(Tok::Punct('.')) => self.pos += 1,
                        Some(Tok::Punct('}')) => {}
                        Some(Tok::Word(w)) if w == "filter" => {}
                        t => return self.fail(self.pos, "`.`", t),
                    }
                }
                Some(Tok::Word(w)) if w == "filter" => {
                    self.pos += 1;
                    self.expect(&Tok::Punct('('), "`(`")?;
                    let var = self.var()?;
                    let op = match self.next() {
                        Some(Tok::Op("!=")) => return Err(QueryError::Unsupported("`!=` filters".into())),
                        Some(Tok::Op(o)) => CompareOp::from_symbol(o).expect("lexer emits known operators"),
                        t => return self.fail(self.pos - 1, "a comparison operator", t.as_ref()),
                    };
                    let value = self.literal()?;
                    self.expect(&Tok::Punct(')'), "`)`")?;
                    filters.push(VarFilter { var, op, value });
                    if matches!(self.peek(), Some(Tok::Punct('.'))) {
                        self.pos += 1;
                    }
                }
                Some(Tok::Word(w)) if unsupported_keyword(w) => return Err(QueryError::Unsupported(w.to_uppercase())),
                t => return self.fail(self.pos, "a triple pattern, filter or `}`", t),
            }
        }
        if let Some(t) = self.peek() {
            if let Tok::Word(w) = t {
                if unsupported_keyword(w) {
                    return Err(QueryError::Unsupported(w.to_uppercase()));
                }
            }
            return self.fail(self.pos, "end of query", Some(t));
        }
        let q = SparqlQuery { projection, patterns, filters };
        q.validate()?;
        Ok(q)
    }
}

pub fn parse_sparql(text: &str) -> Result<SparqlQuery, QueryError> {
    let toks = lex(text, syntax)?;
    Parser { toks, pos: 0 }.query()
}

pub(crate) fn pattern_tokens(p: &TriplePattern) -> [String; 4] {
    [format!("?{}", p.subject), format!("</{}>", p.predicate), p.object.render(), ".".into()]
}

pub(crate) fn filter_tokens(f: &VarFilter) -> [String; 6] {
    ["filter".into(), "(".into(), format!("?{}", f.var), f.op.symbol().into(), f.value.to_literal(), ")".into()]
}

/// Canonical stream: patterns first, then filters. Every pattern contributes
/// exactly four tokens (subject, predicate, object, `.`).
pub fn serialize_sparql(q: &SparqlQuery) -> TokenStream {
    let mut out: Vec<String> = vec!["select".into()];
    for p in &q.projection {
        match p {
            Projection::Var(v) => out.push(format!("?{v}")),
            Projection::Aggregate { agg, var, alias } => out.extend([
                "(".into(),
                agg.keyword().into(),
                "(".into(),
                format!("?{var}"),
                ")".into(),
                "as".into(),
                format!("?{alias}"),
                ")".into(),
            ]),
        }
    }
    out.push("where".into());
    out.push("{".into());
    for p in &q.patterns {
        out.extend(pattern_tokens(p));
    }
    for f in &q.filters {
        out.extend(filter_tokens(f));
    }
    out.push("}".into());
    TokenStream::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const RX_COUNT: &str = "select ( count ( ?timestep ) as ?agg ) where { ?subject_id </admissions> ?hadm_id. \
        ?hadm_id </prescriptions> ?rx. ?rx </drug> \"antihypertensive\". ?rx </timestep> ?timestep. }";

    #[test]
    fn count_query_shape() {
        let q = parse_sparql(RX_COUNT).unwrap();
        assert_eq!(q.patterns.len(), 4);
        assert!(matches!(q.projection[0], Projection::Aggregate { agg: Aggregate::Count, .. }));
        assert_eq!(q.patterns[2].object, Term::Literal(CellValue::text("antihypertensive")));
    }

    #[test]
    fn simple_round_trip() {
        let q = parse_sparql("select ?name where { ?s </name> ?name. }").unwrap();
        let line = serialize_sparql(&q).to_line();
        assert_eq!(line, "select ?name where { ?s </name> ?name . }");
        assert_eq!(parse_sparql(&line).unwrap(), q);
    }

    #[test]
    fn each_pattern_is_four_tokens() {
        let one = parse_sparql("select ?a where { ?s </a> ?a . }").unwrap();
        let two = parse_sparql("select ?a where { ?s </a> ?a . ?s </b> \"x\" . }").unwrap();
        assert_eq!(serialize_sparql(&two).len() - serialize_sparql(&one).len(), 4);
    }

    #[test]
    fn filters_parse_and_serialize_last() {
        let q = parse_sparql("select ?s where { filter ( ?dob > 2020 ) ?s </dob> ?dob }").unwrap();
        assert_eq!(serialize_sparql(&q).to_line(), "select ?s where { ?s </dob> ?dob . filter ( ?dob > 2020 ) }");
    }

    #[test]
    fn unbound_and_disconnected() {
        assert_eq!(
            parse_sparql("select ?x where { ?s </a> ?a . }"),
            Err(QueryError::UnboundProjectionVariable("x".into()))
        );
        assert!(matches!(
            parse_sparql("select ?a where { ?s </a> ?a . ?t </b> ?b . }"),
            Err(QueryError::SparqlSyntax { .. })
        ));
        assert!(parse_sparql("select ?a where { ?s </a> ?a . optional").is_err());
        assert!(matches!(parse_sparql("select ?a where ?s"), Err(QueryError::SparqlSyntax { position: 3, .. })));
    }
}
