//! ASTs, parsers and canonical serializers for the SQL and SPARQL subsets,
//! plus condition-value masking.

mod lexer;
pub mod mask;
pub mod sparql;
pub mod sql;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mask::{mask_condition_values, structural_tokens};
pub use sparql::{parse_sparql, serialize_sparql, Projection, SparqlQuery, Term, TriplePattern, VarFilter};
pub use sql::{parse_sql, serialize_sql, Aggregate, ColumnRef, Condition, Join, SelectItem, SqlQuery};

/// Token that replaces condition values under masking.
pub const COND_VAL: &str = "<cond_val>";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("SQL syntax error at token {position}: {message}")]
    SqlSyntax { position: usize, message: String },
    #[error("SPARQL syntax error at token {position}: {message}")]
    SparqlSyntax { position: usize, message: String },
    #[error("unsupported feature: {0}")]
    Unsupported(String),
    #[error("projected or filtered variable `?{0}` is not bound by any pattern")]
    UnboundProjectionVariable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    #[default]
    Sql,
    Sparql,
}

impl FromStr for Lang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sql" => Ok(Lang::Sql),
            "sparql" => Ok(Lang::Sparql),
            other => Err(format!("unknown language `{other}` (expected sql or sparql)")),
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lang::Sql => "sql",
            Lang::Sparql => "sparql",
        })
    }
}

/// How SQL column references are tokenized: `table.column` as one token, or
/// `table`, `.`, `column` as three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Tokenization {
    Fused,
    #[default]
    Split,
}

impl FromStr for Tokenization {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fused" => Ok(Tokenization::Fused),
            "split" => Ok(Tokenization::Split),
            other => Err(format!("unknown tokenization `{other}` (expected fused or split)")),
        }
    }
}

/// An ordered list of lowercase tokens. Quoted literals are single tokens and
/// may contain spaces; no other token does.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TokenStream(Vec<String>);

impl TokenStream {
    pub fn new(tokens: Vec<String>) -> Self {
        TokenStream(tokens)
    }

    /// Splits query text into tokens, keeping quoted literals whole. The
    /// result is not canonicalized beyond token boundaries and case.
    pub fn lex(text: &str) -> Result<Self, QueryError> {
        let toks = lexer::lex(text, |position, message| QueryError::SqlSyntax { position, message })?;
        Ok(TokenStream(toks.iter().map(lexer::Tok::render).collect()))
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Single space-joined line, the exchange format of dataset files.
    pub fn to_line(&self) -> String {
        self.0.join(" ")
    }
}

impl fmt::Display for TokenStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

/// Canonical token stream of a query text in the given language.
pub fn canonical_tokens(text: &str, lang: Lang, mode: Tokenization) -> Result<TokenStream, QueryError> {
    match lang {
        Lang::Sql => Ok(serialize_sql(&parse_sql(text)?, mode)),
        Lang::Sparql => Ok(serialize_sparql(&parse_sparql(text)?)),
    }
}

pub(crate) fn is_reserved(word: &str) -> bool {
    matches!(
        word,
        "select" | "from" | "inner" | "join" | "on" | "where" | "and" | "as" | "filter"
    ) || unsupported_keyword(word)
}

pub(crate) fn unsupported_keyword(word: &str) -> bool {
    matches!(
        word,
        "distinct"
            | "or"
            | "like"
            | "group"
            | "order"
            | "limit"
            | "having"
            | "left"
            | "right"
            | "outer"
            | "full"
            | "cross"
            | "union"
            | "not"
            | "in"
            | "between"
            | "optional"
    )
}
