//! The SQL subset:
//!
//! ```text
//! select <items> from <t> (inner join <t> on <c> = <c>)* (where <cond> (and <cond>)*)?
//! ```
//!
//! Column references may be written `table.column` or `table . column`; a
//! bare `column` is resolved to the FROM table when the query has no joins.

use std::collections::HashSet;
use std::fmt;

use super::lexer::{lex, Tok};
use super::{is_reserved, unsupported_keyword, QueryError, TokenStream, Tokenization};
use crate::value::{CellValue, CompareOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Aggregate {
    Count,
    Max,
    Min,
    Avg,
}

impl Aggregate {
    pub fn keyword(self) -> &'static str {
        match self {
            Aggregate::Count => "count",
            Aggregate::Max => "max",
            Aggregate::Min => "min",
            Aggregate::Avg => "avg",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Some(match word {
            "count" => Aggregate::Count,
            "max" => Aggregate::Max,
            "min" => Aggregate::Min,
            "avg" => Aggregate::Avg,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColumnRef {
    pub table: String,
    pub column: String,
}

impl ColumnRef {
    pub fn new(table: &str, column: &str) -> Self {
        ColumnRef { table: table.to_string(), column: column.to_string() }
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.table, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SelectItem {
    pub agg: Option<Aggregate>,
    pub column: ColumnRef,
}

impl SelectItem {
    /// Output label used in result sets, e.g. `max(patients.age)`.
    pub fn label(&self) -> String {
        match self.agg {
            Some(a) => format!("{}({})", a.keyword(), self.column),
            None => self.column.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Join {
    pub table: String,
    pub left: ColumnRef,
    pub right: ColumnRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Condition {
    pub column: ColumnRef,
    pub op: CompareOp,
    pub value: CellValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SqlQuery {
    pub select: Vec<SelectItem>,
    pub from: String,
    pub joins: Vec<Join>,
    pub conditions: Vec<Condition>,
}

impl SqlQuery {
    /// FROM table followed by joined tables, in chain order.
    pub fn tables(&self) -> Vec<&str> {
        std::iter::once(self.from.as_str()).chain(self.joins.iter().map(|j| j.table.as_str())).collect()
    }

    /// Every column reference in the query, in textual order.
    pub fn column_refs(&self) -> Vec<&ColumnRef> {
        let mut out: Vec<&ColumnRef> = self.select.iter().map(|s| &s.column).collect();
        for j in &self.joins {
            out.push(&j.left);
            out.push(&j.right);
        }
        out.extend(self.conditions.iter().map(|c| &c.column));
        out
    }

    pub fn is_aggregate(&self) -> bool {
        self.select.iter().any(|s| s.agg.is_some())
    }

    /// Checks the structural invariants the parser guarantees: a connected
    /// join chain, no repeated tables, every reference inside the chain, and
    /// no mixing of aggregate and plain select items.
    pub fn validate(&self) -> Result<(), QueryError> {
        let err = |message: String| QueryError::SqlSyntax { position: 0, message };
        if self.select.is_empty() {
            return Err(err("empty select list".into()));
        }
        let aggs = self.select.iter().filter(|s| s.agg.is_some()).count();
        if aggs != 0 && aggs != self.select.len() {
            return Err(QueryError::Unsupported("mixing aggregate and plain select items without group by".into()));
        }
        let mut seen: HashSet<&str> = HashSet::from([self.from.as_str()]);
        for j in &self.joins {
            if seen.contains(j.table.as_str()) {
                return Err(err(format!("table `{}` joined twice", j.table)));
            }
            let l_new = j.left.table == j.table;
            let r_new = j.right.table == j.table;
            let other = match (l_new, r_new) {
                (true, false) => &j.right,
                (false, true) => &j.left,
                _ => return Err(err(format!("join on `{}` must link it to an earlier table", j.table))),
            };
            if !seen.contains(other.table.as_str()) {
                return Err(err(format!("join condition references `{}` before it is joined", other.table)));
            }
            seen.insert(&j.table);
        }
        for c in self.select.iter().map(|s| &s.column).chain(self.conditions.iter().map(|c| &c.column)) {
            if !seen.contains(c.table.as_str()) {
                return Err(err(format!("`{c}` references a table outside the from/join chain")));
            }
        }
        for c in &self.conditions {
            if c.value.is_null() {
                return Err(err(format!("condition on `{}` has no value", c.column)));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SqlQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_sql(self, Tokenization::Split).to_line())
    }
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

fn syntax(position: usize, message: String) -> QueryError {
    QueryError::SqlSyntax { position, message }
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

    fn error(&self, message: impl Into<String>) -> QueryError {
        syntax(self.pos, message.into())
    }

    fn expect_word(&mut self, w: &str) -> Result<(), QueryError> {
        match self.next() {
            Some(t) if t.is_word(w) => Ok(()),
            Some(t) => Err(syntax(self.pos - 1, format!("expected `{w}`, found `{}`", t.render()))),
            None => Err(syntax(self.pos - 1, format!("expected `{w}`, found end of query"))),
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), QueryError> {
        match self.next() {
            Some(Tok::Punct(x)) if x == c => Ok(()),
            Some(t) => Err(syntax(self.pos - 1, format!("expected `{c}`, found `{}`", t.render()))),
            None => Err(syntax(self.pos - 1, format!("expected `{c}`, found end of query"))),
        }
    }

    fn ident(&mut self) -> Result<String, QueryError> {
        match self.next() {
            Some(Tok::Word(w)) if unsupported_keyword(&w) => Err(QueryError::Unsupported(w.to_uppercase())),
            Some(Tok::Word(w)) if !is_reserved(&w) => Ok(w),
            Some(t) => Err(syntax(self.pos - 1, format!("expected identifier, found `{}`", t.render()))),
            None => Err(syntax(self.pos - 1, "expected identifier, found end of query".into())),
        }
    }

    /// `table.column`, or a bare `column` (table left empty for later
    /// resolution).
    fn column_ref(&mut self) -> Result<ColumnRef, QueryError> {
        let first = self.ident()?;
        if matches!(self.peek(), Some(Tok::Punct('.'))) {
            self.pos += 1;
            let column = self.ident()?;
            Ok(ColumnRef { table: first, column })
        } else {
            Ok(ColumnRef { table: String::new(), column: first })
        }
    }

    fn select_item(&mut self) -> Result<SelectItem, QueryError> {
        if let Some(Tok::Word(w)) = self.peek() {
            if let Some(agg) = Aggregate::from_keyword(w) {
                if matches!(self.toks.get(self.pos + 1), Some(Tok::Punct('('))) {
                    self.pos += 2;
                    if matches!(self.peek(), Some(Tok::Punct('*'))) {
                        return Err(QueryError::Unsupported("`*` arguments".into()));
                    }
                    let column = self.column_ref()?;
                    self.expect_punct(')')?;
                    return Ok(SelectItem { agg: Some(agg), column });
                }
            }
        }
        if matches!(self.peek(), Some(Tok::Punct('*'))) {
            return Err(QueryError::Unsupported("`select *`".into()));
        }
        Ok(SelectItem { agg: None, column: self.column_ref()? })
    }

    fn value(&mut self) -> Result<CellValue, QueryError> {
        match self.next() {
            Some(Tok::Str(s)) => Ok(CellValue::text(s)),
            Some(Tok::Number(n)) => parse_number(&n).ok_or_else(|| syntax(self.pos - 1, format!("bad number `{n}`"))),
            // Unquoted single-word values, as in `drug = antihypertensive`.
            Some(Tok::Word(w)) if !is_reserved(&w) && !matches!(self.peek(), Some(Tok::Punct('.'))) => {
                Ok(CellValue::text(w))
            }
            Some(t) => Err(syntax(self.pos - 1, format!("expected a value, found `{}`", t.render()))),
            None => Err(syntax(self.pos - 1, "expected a value, found end of query".into())),
        }
    }

    fn comparison(&mut self) -> Result<CompareOp, QueryError> {
        match self.next() {
            Some(Tok::Op("!=")) => Err(QueryError::Unsupported("`!=` comparisons".into())),
            Some(Tok::Op(o)) => CompareOp::from_symbol(o).ok_or_else(|| syntax(self.pos - 1, format!("bad operator `{o}`"))),
            Some(Tok::Word(w)) if unsupported_keyword(&w) => Err(QueryError::Unsupported(w.to_uppercase())),
            Some(t) => Err(syntax(self.pos - 1, format!("expected comparison operator, found `{}`", t.render()))),
            None => Err(syntax(self.pos - 1, "expected comparison operator".into())),
        }
    }

    fn query(&mut self) -> Result<SqlQuery, QueryError> {
        self.expect_word("select")?;
        if matches!(self.peek(), Some(Tok::Word(w)) if w == "distinct") {
            return Err(QueryError::Unsupported("DISTINCT".into()));
        }
        let mut select = vec![self.select_item()?];
        while matches!(self.peek(), Some(Tok::Punct(','))) {
            self.pos += 1;
            select.push(self.select_item()?);
        }
        self.expect_word("from")?;
        let from = self.ident()?;
        let mut joins = Vec::new();
        loop {
            match self.peek() {
                Some(t) if t.is_word("inner") => {
                    self.pos += 1;
                    self.expect_word("join")?;
                    let table = self.ident()?;
                    self.expect_word("on")?;
                    let left = self.column_ref()?;
                    match self.next() {
                        Some(Tok::Op("=")) => {}
                        _ => return Err(syntax(self.pos - 1, "join condition must be an equality".into())),
                    }
                    let right = self.column_ref()?;
                    if left.table.is_empty() || right.table.is_empty() {
                        return Err(self.error("join columns must be qualified"));
                    }
                    joins.push(Join { table, left, right });
                }
                Some(t) if t.is_word("join") => return Err(self.error("expected `inner join`")),
                Some(Tok::Word(w)) if unsupported_keyword(w) => return Err(QueryError::Unsupported(w.to_uppercase())),
                _ => break,
            }
        }
        let mut conditions = Vec::new();
        if matches!(self.peek(), Some(t) if t.is_word("where")) {
            self.pos += 1;
            loop {
                let column = self.column_ref()?;
                let op = self.comparison()?;
                let value = self.value()?;
                conditions.push(Condition { column, op, value });
                match self.peek() {
                    Some(t) if t.is_word("and") => self.pos += 1,
                    _ => break,
                }
            }
        }
        match self.peek() {
            None => {}
            Some(Tok::Word(w)) if unsupported_keyword(w) => return Err(QueryError::Unsupported(w.to_uppercase())),
            Some(t) => return Err(self.error(format!("unexpected `{}`", t.render()))),
        }
        let mut q = SqlQuery { select, from, joins, conditions };
        resolve_bare_columns(&mut q)?;
        q.validate()?;
        Ok(q)
    }
}

fn parse_number(n: &str) -> Option<CellValue> {
    if n.contains('.') {
        n.parse::<f64>().ok().filter(|x| x.is_finite()).map(CellValue::Float)
    } else {
        n.parse::<i64>().ok().map(CellValue::Integer)
    }
}

fn resolve_bare_columns(q: &mut SqlQuery) -> Result<(), QueryError> {
    let from = q.from.clone();
    let has_joins = !q.joins.is_empty();
    let cols = q.select.iter_mut().map(|s| &mut s.column).chain(q.conditions.iter_mut().map(|c| &mut c.column));
    for c in cols {
        if c.table.is_empty() {
            if has_joins {
                return Err(syntax(0, format!("unqualified column `{}` in a query with joins", c.column)));
            }
            c.table = from.clone();
        }
    }
    Ok(())
}

/// Parses the SQL subset. All identifiers and text values are lowercased.
pub fn parse_sql(text: &str) -> Result<SqlQuery, QueryError> {
    let toks = lex(text, syntax)?;
    Parser { toks, pos: 0 }.query()
}

fn push_column(out: &mut Vec<String>, c: &ColumnRef, mode: Tokenization) {
    match mode {
        Tokenization::Fused => out.push(format!("{}.{}", c.table, c.column)),
        Tokenization::Split => {
            out.push(c.table.clone());
            out.push(".".into());
            out.push(c.column.clone());
        }
    }
}

/// Tokens of one WHERE conjunct.
pub(crate) fn condition_tokens(c: &Condition, mode: Tokenization) -> Vec<String> {
    let mut out = Vec::new();
    push_column(&mut out, &c.column, mode);
    out.push(c.op.symbol().into());
    out.push(c.value.to_literal());
    out
}

/// Canonical token stream: lowercase, every parenthesis and operator its own
/// token, text values as double-quoted single tokens.
pub fn serialize_sql(q: &SqlQuery, mode: Tokenization) -> TokenStream {
    let mut out: Vec<String> = vec!["select".into()];
    for (i, item) in q.select.iter().enumerate() {
        if i > 0 {
            out.push(",".into());
        }
        match item.agg {
            Some(a) => {
                out.push(a.keyword().into());
                out.push("(".into());
                push_column(&mut out, &item.column, mode);
                out.push(")".into());
            }
            None => push_column(&mut out, &item.column, mode),
        }
    }
    out.push("from".into());
    out.push(q.from.clone());
    for j in &q.joins {
        out.push("inner".into());
        out.push("join".into());
        out.push(j.table.clone());
        out.push("on".into());
        push_column(&mut out, &j.left, mode);
        out.push("=".into());
        push_column(&mut out, &j.right, mode);
    }
    for (i, c) in q.conditions.iter().enumerate() {
        out.push(if i == 0 { "where" } else { "and" }.into());
        out.extend(condition_tokens(c, mode));
    }
    TokenStream::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const INTRO: &str = "select count ( prescriptions.timestep ) from patients inner join admissions on \
        patients.subject_id = admissions.subject_id inner join prescriptions on admissions.hadm_id = \
        prescriptions.hadm_id where prescriptions.drug = antihypertensive";

    #[test]
    fn intro_query_shape() {
        let q = parse_sql(INTRO).unwrap();
        assert_eq!(q.joins.len(), 2);
        assert_eq!(q.conditions.len(), 1);
        assert_eq!(q.select[0].agg, Some(Aggregate::Count));
        assert_eq!(q.conditions[0].value, CellValue::text("antihypertensive"));
    }

    #[test]
    fn no_joins_no_conditions() {
        let q = parse_sql("select max ( patients.age ) from patients").unwrap();
        assert!(q.joins.is_empty() && q.conditions.is_empty());
        let s = serialize_sql(&q, Tokenization::Split);
        assert!(!s.tokens().contains(&"where".to_string()));
    }

    #[test]
    fn metric_gold_split_tokens() {
        let q = parse_sql("select max(age) from patients where Gender = \"F\" and DoB > 2020").unwrap();
        let toks = serialize_sql(&q, Tokenization::Split);
        let expected = [
            "select", "max", "(", "patients", ".", "age", ")", "from", "patients", "where", "patients", ".", "gender",
            "=", "\"f\"", "and", "patients", ".", "dob", ">", "2020",
        ];
        assert_eq!(toks.tokens(), expected);
    }

    #[test]
    fn one_join_costs_eleven_tokens() {
        let base = parse_sql("select count ( t1.c ) from t1").unwrap();
        let joined = parse_sql("select count ( t1.c ) from t1 inner join t2 on t1.c = t2.c").unwrap();
        let a = serialize_sql(&base, Tokenization::Split);
        let b = serialize_sql(&joined, Tokenization::Split);
        assert_eq!(b.len() - a.len(), 11);
        assert_eq!(&b.tokens()[a.len()..], &["inner", "join", "t2", "on", "t1", ".", "c", "=", "t2", ".", "c"]);
    }

    #[test]
    fn fused_and_split_parse_alike() {
        let a = parse_sql("select patients.name from patients").unwrap();
        let b = parse_sql("select patients . name from patients").unwrap();
        assert_eq!(a, b);
        assert_eq!(serialize_sql(&a, Tokenization::Fused).tokens(), ["select", "patients.name", "from", "patients"]);
    }

    #[test]
    fn unsupported_features() {
        for q in [
            "select distinct patients.name from patients",
            "select patients.name from patients where patients.a = 1 or patients.b = 2",
            "select patients.name from patients where patients.name like \"a%\"",
            "select count ( patients.name ) from patients group by patients.gender",
            "select patients.name from patients left join admissions on patients.subject_id = admissions.subject_id",
        ] {
            assert!(matches!(parse_sql(q), Err(QueryError::Unsupported(_))), "{q}");
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_sql("select from patients") {
            Err(QueryError::SqlSyntax { position, .. }) => assert_eq!(position, 1),
            other => panic!("{other:?}"),
        }
        assert!(parse_sql("").is_err());
        assert!(parse_sql("select a.b from a inner join c on a.x = d.y").is_err());
        assert!(parse_sql("select count ( a.b ) , a.c from a").is_err());
    }
}
