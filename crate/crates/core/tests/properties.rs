mod common;

use ehrq_core::eval::acc_st;
use ehrq_core::query::{parse_sparql, parse_sql, serialize_sparql, serialize_sql, Lang, Tokenization};
use proptest::prelude::*;

proptest! {
    #[test]
    fn sql_round_trips(q in common::sql_strategy()) {
        for mode in [Tokenization::Fused, Tokenization::Split] {
            let text = serialize_sql(&q, mode).to_line();
            prop_assert_eq!(parse_sql(&text).unwrap(), q.clone());
        }
    }

    #[test]
    fn sparql_round_trips(q in common::sparql_strategy()) {
        let text = serialize_sparql(&q).to_line();
        prop_assert_eq!(parse_sparql(&text).unwrap(), q);
    }

    #[test]
    fn structure_ignores_condition_values(q in common::sql_strategy(), v in common::value_strategy()) {
        let mut other = q.clone();
        for c in &mut other.conditions {
            c.value = v.clone();
        }
        let (a, b) = (q.to_string(), other.to_string());
        prop_assert!(acc_st(&a, &b, Lang::Sql, Tokenization::Split).ok);
    }

    #[test]
    fn sparql_structure_ignores_filter_values(q in common::sparql_strategy(), v in common::value_strategy()) {
        let mut other = q.clone();
        for f in &mut other.filters {
            f.value = v.clone();
        }
        let (a, b) = (serialize_sparql(&q).to_line(), serialize_sparql(&other).to_line());
        prop_assert!(acc_st(&a, &b, Lang::Sparql, Tokenization::Split).ok);
    }
}
