//! Typed cell values shared by the relational store, the knowledge graph and
//! the query ASTs.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

/// Declared column datatype.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataType {
    Text,
    Integer,
    Float,
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DataType::Text => "text",
            DataType::Integer => "integer",
            DataType::Float => "float",
        })
    }
}

/// A single typed value.
///
/// Equality, ordering and hashing are *structural*: `Integer(3)` and
/// `Float(3.0)` are different values, and floats compare by their bit-level
/// total order. Query semantics (numeric promotion, null handling) live in
/// [`compare_values`].
#[derive(Debug, Clone)]
pub enum CellValue {
    Null,
    Text(String),
    Integer(i64),
    Float(f64),
}

impl CellValue {
    /// Builds a text value in canonical form (lowercased, trimmed).
    pub fn text(s: impl AsRef<str>) -> Self {
        CellValue::Text(s.as_ref().trim().to_lowercase())
    }

    pub fn is_null(&self) -> bool {
        matches!(self, CellValue::Null)
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, CellValue::Integer(_) | CellValue::Float(_))
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            CellValue::Integer(i) => Some(*i as f64),
            CellValue::Float(x) => Some(*x),
            _ => None,
        }
    }

    pub fn datatype(&self) -> Option<DataType> {
        match self {
            CellValue::Null => None,
            CellValue::Text(_) => Some(DataType::Text),
            CellValue::Integer(_) => Some(DataType::Integer),
            CellValue::Float(_) => Some(DataType::Float),
        }
    }

    /// Parses a raw CSV field according to a declared datatype. Empty fields
    /// become `Null`.
    pub fn coerce(raw: &str, datatype: DataType) -> Result<Self, String> {
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            return Ok(CellValue::Null);
        }
        match datatype {
            DataType::Text => Ok(CellValue::text(trimmed)),
            DataType::Integer => trimmed
                .parse::<i64>()
                .map(CellValue::Integer)
                .map_err(|e| format!("`{trimmed}` is not an integer: {e}")),
            DataType::Float => match trimmed.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(CellValue::Float(x)),
                Ok(_) => Err(format!("`{trimmed}` is not a finite float")),
                Err(e) => Err(format!("`{trimmed}` is not a float: {e}")),
            },
        }
    }

    /// Canonical query-literal spelling: quoted text, integers as-is, floats
    /// always carrying a decimal point so they re-parse as floats.
    pub fn to_literal(&self) -> String {
        match self {
            CellValue::Null => "null".to_string(),
            CellValue::Text(s) => format!("\"{}\"", s.replace('"', "\"\"")),
            CellValue::Integer(i) => i.to_string(),
            CellValue::Float(x) => format_float(*x),
        }
    }

    /// Unquoted rendering, used for entity ids, CSV output and NLQ slots.
    pub fn to_plain(&self) -> String {
        match self {
            CellValue::Null => String::new(),
            CellValue::Text(s) => s.clone(),
            CellValue::Integer(i) => i.to_string(),
            CellValue::Float(x) => format_float(*x),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            CellValue::Null => 0,
            CellValue::Integer(_) => 1,
            CellValue::Float(_) => 2,
            CellValue::Text(_) => 3,
        }
    }
}

pub(crate) fn format_float(x: f64) -> String {
    let s = x.to_string();
    if s.contains(['.', 'e', 'E']) || !x.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

impl fmt::Display for CellValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

impl PartialEq for CellValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for CellValue {}

impl PartialOrd for CellValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CellValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (CellValue::Null, CellValue::Null) => Ordering::Equal,
            (CellValue::Integer(a), CellValue::Integer(b)) => a.cmp(b),
            (CellValue::Float(a), CellValue::Float(b)) => a.total_cmp(b),
            (CellValue::Text(a), CellValue::Text(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Hash for CellValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            CellValue::Null => {}
            CellValue::Text(s) => s.hash(state),
            CellValue::Integer(i) => i.hash(state),
            CellValue::Float(x) => x.to_bits().hash(state),
        }
    }
}

/// Comparison operators of the supported query subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CompareOp {
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Lt => "<",
            CompareOp::Gt => ">",
            CompareOp::Le => "<=",
            CompareOp::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "=" => CompareOp::Eq,
            "<" => CompareOp::Lt,
            ">" => CompareOp::Gt,
            "<=" => CompareOp::Le,
            ">=" => CompareOp::Ge,
            _ => return None,
        })
    }

    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            CompareOp::Eq => ord == Ordering::Equal,
            CompareOp::Lt => ord == Ordering::Less,
            CompareOp::Gt => ord == Ordering::Greater,
            CompareOp::Le => ord != Ordering::Greater,
            CompareOp::Ge => ord != Ordering::Less,
        }
    }
}

impl fmt::Display for CompareOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Raised when a comparison mixes text with numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeClash {
    pub left: DataType,
    pub right: DataType,
}

/// Query-semantics comparison. `Ok(None)` when either side is `Null`;
/// integers and floats compare numerically; text compares lexicographically.
pub fn compare_values(a: &CellValue, b: &CellValue) -> Result<Option<Ordering>, TypeClash> {
    use CellValue::*;
    match (a, b) {
        (Null, _) | (_, Null) => Ok(None),
        (Text(x), Text(y)) => Ok(Some(x.cmp(y))),
        (Integer(x), Integer(y)) => Ok(Some(x.cmp(y))),
        (Integer(_) | Float(_), Integer(_) | Float(_)) => {
            let (x, y) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            Ok(x.partial_cmp(&y))
        }
        _ => Err(TypeClash {
            left: a.datatype().unwrap(),
            right: b.datatype().unwrap(),
        }),
    }
}

/// Evaluates `a op b` under query semantics; `Null` on either side is false.
pub fn satisfies(a: &CellValue, op: CompareOp, b: &CellValue) -> Result<bool, TypeClash> {
    Ok(compare_values(a, b)?.is_some_and(|ord| op.holds(ord)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coerce_by_datatype() {
        assert_eq!(CellValue::coerce("  Sodium Chloride ", DataType::Text).unwrap(), CellValue::text("sodium chloride"));
        assert_eq!(CellValue::coerce("42", DataType::Integer).unwrap(), CellValue::Integer(42));
        assert_eq!(CellValue::coerce("4.5", DataType::Float).unwrap(), CellValue::Float(4.5));
        assert_eq!(CellValue::coerce("", DataType::Integer).unwrap(), CellValue::Null);
        assert!(CellValue::coerce("4.5", DataType::Integer).is_err());
        assert!(CellValue::coerce("inf", DataType::Float).is_err());
    }

    #[test]
    fn float_literal_keeps_decimal_point() {
        assert_eq!(CellValue::Float(3.0).to_literal(), "3.0");
        assert_eq!(CellValue::Float(-0.25).to_literal(), "-0.25");
        assert_eq!(CellValue::text("a \"b\"").to_literal(), "\"a \"\"b\"\"\"");
    }

    #[test]
    fn numeric_promotion_and_clash() {
        assert!(satisfies(&CellValue::Integer(3), CompareOp::Eq, &CellValue::Float(3.0)).unwrap());
        assert!(satisfies(&CellValue::text("b"), CompareOp::Gt, &CellValue::text("a")).unwrap());
        assert!(!satisfies(&CellValue::Null, CompareOp::Eq, &CellValue::Null).unwrap());
        assert!(satisfies(&CellValue::text("1"), CompareOp::Lt, &CellValue::Integer(2)).is_err());
    }
}
