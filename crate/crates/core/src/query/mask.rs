//! Condition-value masking for structural comparison.

use super::sparql::{filter_tokens, pattern_tokens};
use super::sql::condition_tokens;
use super::{parse_sparql, parse_sql, serialize_sparql, serialize_sql, Lang, QueryError, TokenStream, Tokenization, COND_VAL};
use crate::query::Term;

const OPERATORS: [&str; 5] = ["=", "<", ">", "<=", ">="];

fn check_parses(t: &TokenStream, lang: Lang) -> Result<(), QueryError> {
    let line = t
        .tokens()
        .iter()
        .map(|tok| if tok == COND_VAL { "0" } else { tok.as_str() })
        .collect::<Vec<_>>()
        .join(" ");
    match lang {
        Lang::Sql => parse_sql(&line).map(|_| ()),
        Lang::Sparql => parse_sparql(&line).map(|_| ()),
    }
}

/// Replaces every condition value with [`COND_VAL`]. In SQL these are the
/// right-hand sides of WHERE comparisons (join conditions are kept); in
/// SPARQL the literal objects of patterns and the right-hand sides of
/// filters. Token count never changes.
pub fn mask_condition_values(t: &TokenStream, lang: Lang) -> Result<TokenStream, QueryError> {
    check_parses(t, lang)?;
    let toks = t.tokens();
    let mut out = toks.to_vec();
    match lang {
        Lang::Sql => {
            let Some(start) = toks.iter().position(|x| x == "where") else {
                return Ok(TokenStream::new(out));
            };
            for i in start + 1..toks.len() {
                if OPERATORS.contains(&toks[i - 1].as_str()) {
                    out[i] = COND_VAL.to_string();
                }
            }
        }
        Lang::Sparql => {
            let Some(open) = toks.iter().position(|x| x == "{") else {
                return Ok(TokenStream::new(out));
            };
            let mut i = open + 1;
            while i < toks.len() && toks[i] != "}" {
                if toks[i] == "filter" {
                    // filter ( ?v op VALUE )
                    out[i + 4] = COND_VAL.to_string();
                    i += 6;
                } else if toks[i].starts_with('?') {
                    if !toks[i + 2].starts_with('?') {
                        out[i + 2] = COND_VAL.to_string();
                    }
                    i += 3;
                } else {
                    // pattern terminator
                    i += 1;
                }
            }
        }
    }
    Ok(TokenStream::new(out))
}

/// Masked canonical stream with WHERE conjuncts (SQL) or patterns and
/// filters (SPARQL) put in a canonical order, so that queries differing only
/// in condition order or condition values compare equal.
pub fn structural_tokens(text: &str, lang: Lang, mode: Tokenization) -> Result<TokenStream, QueryError> {
    let canonical = match lang {
        Lang::Sql => {
            let mut q = parse_sql(text)?;
            q.conditions.sort_by_cached_key(|c| {
                let mut k = condition_tokens(c, mode);
                *k.last_mut().unwrap() = COND_VAL.into();
                k
            });
            serialize_sql(&q, mode)
        }
        Lang::Sparql => {
            let mut q = parse_sparql(text)?;
            q.patterns.sort_by_cached_key(|p| {
                let mut k = pattern_tokens(p);
                if matches!(p.object, Term::Literal(_)) {
                    k[2] = COND_VAL.into();
                }
                k
            });
            q.filters.sort_by_cached_key(|f| {
                let mut k = filter_tokens(f);
                k[4] = COND_VAL.into();
                k
            });
            serialize_sparql(&q)
        }
    };
    mask_condition_values(&canonical, lang)
}
