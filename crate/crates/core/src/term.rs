//! Structured values in functional notation: `f(1,g("x"),[a,b],_)`.
//!
//! This notation is what `prolog_term` prints, what the command line reads
//! and writes, and what travels over the active-module wire.
//!
//! Atoms matching `[a-z][A-Za-z0-9_]*` print bare, any other atom is
//! single-quoted. Strings are double-quoted. Both quote styles use the
//! escapes `\\ \n \t \r`, the quote character itself, and `\xHH\` for the
//! remaining control characters. Identifiers starting with `_` or an
//! uppercase letter read back as placeholders. Non-finite floats print as
//! the atoms `nan`, `inf`, `-inf` and do not survive a round trip.

use std::fmt::{self, Write as _};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Atom(String),
    Str(String),
    List(Vec<Value>),
    Compound(String, Vec<Value>),
    Placeholder,
}

impl Value {
    pub fn atom(s: impl Into<String>) -> Self {
        Value::Atom(s.into())
    }

    pub fn str(s: impl Into<String>) -> Self {
        Value::Str(s.into())
    }

    pub fn compound(name: impl Into<String>, args: Vec<Value>) -> Self {
        Value::Compound(name.into(), args)
    }

    /// Text of an atom, string or number.
    pub fn as_text(&self) -> Option<String> {
        match self {
            Value::Atom(s) | Value::Str(s) => Some(s.clone()),
            Value::Int(i) => Some(i.to_string()),
            Value::Float(_) => Some(to_text(self)),
            _ => None,
        }
    }

    pub fn to_text(&self) -> String {
        to_text(self)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_text(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("term syntax error at offset {offset}: {message}")]
pub struct TermSyntaxError {
    pub offset: usize,
    pub message: String,
}

/// Renders `v` in canonical functional notation.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, &mut out);
    out
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Value::Float(x) => {
            if x.is_nan() {
                out.push_str("nan");
            } else if x.is_infinite() {
                out.push_str(if *x > 0.0 { "inf" } else { "-inf" });
            } else {
                let _ = write!(out, "{x:?}");
            }
        }
        Value::Atom(a) => write_atom(a, out),
        Value::Str(s) => write_quoted(s, '"', out),
        Value::List(items) => {
            out.push('[');
            write_args(items, out);
            out.push(']');
        }
        Value::Compound(name, args) => {
            write_atom(name, out);
            out.push('(');
            write_args(args, out);
            out.push(')');
        }
        Value::Placeholder => out.push('_'),
    }
}

fn write_args(items: &[Value], out: &mut String) {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_value(item, out);
    }
}

fn is_bare_atom(a: &str) -> bool {
    let mut chars = a.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn write_atom(a: &str, out: &mut String) {
    if is_bare_atom(a) {
        out.push_str(a);
    } else {
        write_quoted(a, '\'', out);
    }
}

fn write_quoted(s: &str, quote: char, out: &mut String) {
    out.push(quote);
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c == quote => {
                out.push('\\');
                out.push(c);
            }
            c if (c as u32) < 0x20 || c as u32 == 0x7f => {
                let _ = write!(out, "\\x{:02X}\\", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push(quote);
}

/// Parses exactly one term (surrounding whitespace allowed).
pub fn parse_term(text: &str) -> Result<Value, TermSyntaxError> {
    let mut p = Parser { src: text, pos: 0 };
    p.skip_ws();
    let v = p.value()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("trailing input after term"));
    }
    Ok(v)
}

/// Parses a whitespace-separated sequence of terms. A `.` after a term is
/// accepted as a terminator.
pub fn parse_terms(text: &str) -> Result<Vec<Value>, TermSyntaxError> {
    let mut p = Parser { src: text, pos: 0 };
    let mut out = Vec::new();
    loop {
        p.skip_ws();
        if p.pos == text.len() {
            return Ok(out);
        }
        out.push(p.value()?);
        p.skip_ws();
        if p.peek() == Some('.') {
            p.pos += 1;
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> TermSyntaxError {
        TermSyntaxError {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn expect(&mut self, c: char) -> Result<(), TermSyntaxError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn value(&mut self) -> Result<Value, TermSyntaxError> {
        let c = self.peek().ok_or_else(|| self.error("unexpected end of input"))?;
        match c {
            '[' => {
                self.bump();
                Ok(Value::List(self.args(']')?))
            }
            '"' => Ok(Value::Str(self.quoted('"')?)),
            '\'' => {
                let name = self.quoted('\'')?;
                self.after_atom(name)
            }
            '-' if self.src[self.pos + 1..].starts_with(|c: char| c.is_ascii_digit()) => {
                self.number()
            }
            '-' if self.src[self.pos..].starts_with("-inf") => {
                self.pos += 4;
                Ok(Value::Float(f64::NEG_INFINITY))
            }
            c if c.is_ascii_digit() => self.number(),
            c if c == '_' || c.is_ascii_uppercase() => {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.bump();
                }
                Ok(Value::Placeholder)
            }
            c if c.is_ascii_lowercase() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.bump();
                }
                let name = self.src[start..self.pos].to_string();
                match name.as_str() {
                    "nan" if self.peek() != Some('(') => Ok(Value::Float(f64::NAN)),
                    "inf" if self.peek() != Some('(') => Ok(Value::Float(f64::INFINITY)),
                    _ => self.after_atom(name),
                }
            }
            _ => Err(self.error(&format!("unexpected character '{c}'"))),
        }
    }

    fn after_atom(&mut self, name: String) -> Result<Value, TermSyntaxError> {
        if self.peek() == Some('(') {
            self.bump();
            Ok(Value::Compound(name, self.args(')')?))
        } else {
            Ok(Value::Atom(name))
        }
    }

    fn args(&mut self, close: char) -> Result<Vec<Value>, TermSyntaxError> {
        let mut items = Vec::new();
        self.skip_ws();
        if self.peek() == Some(close) {
            self.bump();
            return Ok(items);
        }
        loop {
            self.skip_ws();
            items.push(self.value()?);
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.bump();
                }
                Some(c) if c == close => {
                    self.bump();
                    return Ok(items);
                }
                _ => return self.expect(close).map(|_| items),
            }
        }
    }

    fn number(&mut self) -> Result<Value, TermSyntaxError> {
        let start = self.pos;
        if self.peek() == Some('-') {
            self.bump();
        }
        let digits = |p: &mut Self| {
            let s = p.pos;
            while matches!(p.peek(), Some(c) if c.is_ascii_digit()) {
                p.bump();
            }
            p.pos > s
        };
        digits(self);
        let mut float = false;
        if self.peek() == Some('.')
            && self.src[self.pos + 1..].starts_with(|c: char| c.is_ascii_digit())
        {
            self.bump();
            digits(self);
            float = true;
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.bump();
            if matches!(self.peek(), Some('+' | '-')) {
                self.bump();
            }
            if digits(self) {
                float = true;
            } else {
                self.pos = save;
            }
        }
        let lexeme = &self.src[start..self.pos];
        if float {
            lexeme
                .parse()
                .map(Value::Float)
                .map_err(|_| self.error("bad float"))
        } else {
            lexeme
                .parse()
                .map(Value::Int)
                .map_err(|_| self.error("integer out of range"))
        }
    }

    fn quoted(&mut self, quote: char) -> Result<String, TermSyntaxError> {
        self.bump();
        let mut out = String::new();
        loop {
            let c = self.bump().ok_or_else(|| self.error("unterminated quoted text"))?;
            match c {
                '\\' => {
                    let e = self.bump().ok_or_else(|| self.error("dangling escape"))?;
                    match e {
                        'n' => out.push('\n'),
                        't' => out.push('\t'),
                        'r' => out.push('\r'),
                        '\\' | '\'' | '"' => out.push(e),
                        'x' => {
                            let start = self.pos;
                            while matches!(self.peek(), Some(c) if c.is_ascii_hexdigit()) {
                                self.bump();
                            }
                            let code = u32::from_str_radix(&self.src[start..self.pos], 16)
                                .ok()
                                .and_then(char::from_u32)
                                .ok_or_else(|| self.error("bad \\x escape"))?;
                            if self.bump() != Some('\\') {
                                return Err(self.error("unterminated \\x escape"));
                            }
                            out.push(code);
                        }
                        _ => return Err(self.error(&format!("unknown escape '\\{e}'"))),
                    }
                }
                c if c == quote => return Ok(out),
                c => out.push(c),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prints_functional_notation() {
        let v = Value::compound(
            "f",
            vec![Value::Int(1), Value::compound("g", vec![Value::Int(2)])],
        );
        assert_eq!(to_text(&v), "f(1,g(2))");
        assert_eq!(to_text(&Value::Placeholder), "_");
        assert_eq!(to_text(&Value::atom("foo")), "foo");
    }

    #[test]
    fn quotes_when_needed() {
        assert_eq!(to_text(&Value::atom("Foo bar")), "'Foo bar'");
        assert_eq!(to_text(&Value::atom("$")), "'$'");
        assert_eq!(to_text(&Value::str("a\"b\n")), "\"a\\\"b\\n\"");
        assert_eq!(to_text(&Value::str("\u{1}")), "\"\\x01\\\"");
        assert_eq!(to_text(&Value::List(vec![])), "[]");
    }

    #[test]
    fn parses_terms() {
        assert_eq!(
            parse_term(" response(\"daniel\", X) ").unwrap(),
            Value::compound("response", vec![Value::str("daniel"), Value::Placeholder])
        );
        assert_eq!(parse_term("-12").unwrap(), Value::Int(-12));
        assert_eq!(parse_term("2.5e3").unwrap(), Value::Float(2500.0));
        assert_eq!(parse_term("'it''s'").is_err(), true);
        assert_eq!(parse_term("'it\\'s'").unwrap(), Value::atom("it's"));
        assert_eq!(
            parse_terms("a. [1,2] \"x\"").unwrap(),
            vec![
                Value::atom("a"),
                Value::List(vec![Value::Int(1), Value::Int(2)]),
                Value::str("x")
            ]
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_term("f(").is_err());
        assert!(parse_term("f(a b)").is_err());
        assert!(parse_term("\"open").is_err());
        assert!(parse_term("a b").is_err());
        assert!(parse_term("").is_err());
        assert!(parse_term("99999999999999999999").is_err());
    }

    fn arb_value() -> impl Strategy<Value = Value> {
        let leaf = prop_oneof![
            any::<i64>().prop_map(Value::Int),
            (-1e12f64..1e12).prop_map(Value::Float),
            "[a-z][a-z0-9_]{0,6}".prop_map(Value::Atom),
            any::<String>().prop_map(Value::Atom),
            any::<String>().prop_map(Value::Str),
            Just(Value::Placeholder),
        ];
        leaf.prop_recursive(4, 32, 4, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 0..4).prop_map(Value::List),
                (any::<String>(), prop::collection::vec(inner, 0..4))
                    .prop_map(|(n, a)| Value::Compound(n, a)),
            ]
        })
    }

    proptest! {
        #[test]
        fn text_round_trip(v in arb_value()) {
            prop_assert_eq!(parse_term(&to_text(&v)).unwrap(), v);
        }
    }
}
