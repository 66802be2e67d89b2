//! A single lexer for both query dialects. SQL never produces `Var`, `Iri`
//! or braces; the parsers reject whatever does not belong to their grammar.

use super::QueryError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    /// Bare word, lowercased.
    Word(String),
    /// Quoted string body with `""` escapes resolved. Case is preserved.
    Str(String),
    Number(String),
    /// `?name`, stored without the question mark.
    Var(String),
    /// `</name>`, stored without brackets or the leading slash.
    Iri(String),
    /// The masking placeholder `<cond_val>`.
    Placeholder,
    Op(&'static str),
    Punct(char),
}

impl Tok {
    /// Canonical spelling of the token as it appears in a token stream.
    pub fn render(&self) -> String {
        match self {
            Tok::Word(w) => w.clone(),
            Tok::Str(s) => format!("\"{}\"", s.trim().to_lowercase().replace('"', "\"\"")),
            Tok::Number(n) => n.clone(),
            Tok::Var(v) => format!("?{v}"),
            Tok::Iri(i) => format!("</{i}>"),
            Tok::Placeholder => super::COND_VAL.to_string(),
            Tok::Op(o) => o.to_string(),
            Tok::Punct(c) => c.to_string(),
        }
    }

    pub fn is_word(&self, w: &str) -> bool {
        matches!(self, Tok::Word(x) if x == w)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

pub fn lex(text: &str, error: fn(usize, String) -> QueryError) -> Result<Vec<Tok>, QueryError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let pos = out.len();
        match c {
            '"' | '\'' => {
                let quote = c;
                let mut body = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(error(pos, "unterminated string literal".into())),
                        Some(&ch) if ch == quote => {
                            if chars.get(i + 1) == Some(&quote) {
                                body.push(quote);
                                i += 2;
                            } else {
                                i += 1;
                                break;
                            }
                        }
                        Some(&ch) => {
                            body.push(ch);
                            i += 1;
                        }
                    }
                }
                out.push(Tok::Str(body));
            }
            '?' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                if j == start {
                    return Err(error(pos, "`?` without a variable name".into()));
                }
                out.push(Tok::Var(chars[start..j].iter().collect::<String>().to_lowercase()));
                i = j;
            }
            '<' => {
                if chars.get(i + 1) == Some(&'/') {
                    let start = i + 2;
                    let end = (start..chars.len())
                        .find(|&j| chars[j] == '>')
                        .ok_or_else(|| error(pos, "unterminated relation".into()))?;
                    let name: String = chars[start..end].iter().collect();
                    if name.is_empty() || name.chars().any(char::is_whitespace) {
                        return Err(error(pos, format!("malformed relation `</{name}>`")));
                    }
                    out.push(Tok::Iri(name.to_lowercase()));
                    i = end + 1;
                } else if chars[i..].iter().take(10).collect::<String>().eq_ignore_ascii_case(super::COND_VAL) {
                    out.push(Tok::Placeholder);
                    i += 10;
                } else if chars.get(i + 1) == Some(&'=') {
                    out.push(Tok::Op("<="));
                    i += 2;
                } else if chars.get(i + 1) == Some(&'>') {
                    out.push(Tok::Op("!="));
                    i += 2;
                } else {
                    out.push(Tok::Op("<"));
                    i += 1;
                }
            }
            '>' => {
                if chars.get(i + 1) == Some(&'=') {
                    out.push(Tok::Op(">="));
                    i += 2;
                } else {
                    out.push(Tok::Op(">"));
                    i += 1;
                }
            }
            '=' => {
                out.push(Tok::Op("="));
                i += 1;
            }
            '!' if chars.get(i + 1) == Some(&'=') => {
                out.push(Tok::Op("!="));
                i += 2;
            }
            '(' | ')' | ',' | '{' | '}' | '*' => {
                out.push(Tok::Punct(c));
                i += 1;
            }
            '.' => {
                out.push(Tok::Punct('.'));
                i += 1;
            }
            c if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if chars.get(i).is_some_and(|&d| is_ident_char(d)) {
                    return Err(error(pos, "malformed number".into()));
                }
                out.push(Tok::Number(chars[start..i].iter().collect()));
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                out.push(Tok::Word(chars[start..i].iter().collect::<String>().to_lowercase()));
            }
            other => return Err(error(pos, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sql_err(position: usize, message: String) -> QueryError {
        QueryError::SqlSyntax { position, message }
    }

    #[test]
    fn splits_fused_columns_and_terminators() {
        let toks = lex("patients.age >= 2.5 ?x.", sql_err).unwrap();
        assert_eq!(
            toks,
            vec![
                Tok::Word("patients".into()),
                Tok::Punct('.'),
                Tok::Word("age".into()),
                Tok::Op(">="),
                Tok::Number("2.5".into()),
                Tok::Var("x".into()),
                Tok::Punct('.'),
            ]
        );
    }

    #[test]
    fn strings_keep_spaces_and_escapes() {
        let toks = lex(r#""Sodium ""X"" chloride" '5% dextrose'"#, sql_err).unwrap();
        assert_eq!(toks, vec![Tok::Str("Sodium \"X\" chloride".into()), Tok::Str("5% dextrose".into())]);
        assert!(lex("\"open", sql_err).is_err());
    }

    #[test]
    fn iris_and_placeholders() {
        let toks = lex("?s </Gender> <cond_val> < 3", sql_err).unwrap();
        assert_eq!(
            toks,
            vec![Tok::Var("s".into()), Tok::Iri("gender".into()), Tok::Placeholder, Tok::Op("<"), Tok::Number("3".into())]
        );
    }
}
