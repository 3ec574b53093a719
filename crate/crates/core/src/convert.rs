//! Conversion between documents and functional-notation values.
//!
//! Normalized documents map to values built from `'$'(Name, Atts)`,
//! `env(Name, Atts, Body)`, `comment(Text)`, `declare(Text)` and strings.
//! Attributes are atoms (flags) or `'='(Name, Value)`. In the other
//! direction any value is accepted: strings and ordinary atoms become text,
//! the special atoms (`start`, `--`, `$`, ...) and every compound become
//! structures for the expander, lists become sequences, and `_` becomes a
//! fresh unbound slot.

use crate::markup::{Attr, Markup, Slot};
use crate::sugar::{Sugar, SugarArg, ATOM_STRUCTURES};
use crate::term::Value;

pub fn markup_from_value(v: &Value) -> Markup {
    match v {
        Value::Str(s) => Markup::Text(s.clone()),
        Value::Atom(a) if ATOM_STRUCTURES.contains(&a.as_str()) => {
            Markup::Sugar(Sugar::new(a.clone(), vec![]))
        }
        Value::Atom(a) => Markup::Text(a.clone()),
        Value::Int(_) | Value::Float(_) => Markup::Text(v.to_text()),
        Value::List(items) => Markup::Seq(items.iter().map(markup_from_value).collect()),
        Value::Compound(name, args) => Markup::Sugar(Sugar::new(
            name.clone(),
            args.iter().cloned().map(SugarArg::Value).collect(),
        )),
        Value::Placeholder => Markup::Slot(Slot::new()),
    }
}

pub fn markup_to_value(m: &Markup) -> Value {
    match m {
        Markup::Text(s) => Value::Str(s.clone()),
        Markup::Element { name, attrs } => Value::compound(
            "$",
            vec![Value::atom(name.clone()), attrs_to_value(attrs)],
        ),
        Markup::Env { name, attrs, body } => Value::compound(
            "env",
            vec![
                Value::atom(name.clone()),
                attrs_to_value(attrs),
                Value::List(body.iter().map(markup_to_value).collect()),
            ],
        ),
        Markup::Comment(c) => Value::compound("comment", vec![Value::str(c.clone())]),
        Markup::Declaration(d) => Value::compound("declare", vec![Value::str(d.clone())]),
        Markup::Raw(r) => Value::compound("raw", vec![Value::str(r.clone())]),
        Markup::Seq(items) => Value::List(items.iter().map(markup_to_value).collect()),
        Markup::Slot(s) => match s.binding() {
            Some(b) => markup_to_value(b),
            None => Value::Placeholder,
        },
        Markup::Sugar(s) if s.args.is_empty() => Value::atom(s.name.clone()),
        Markup::Sugar(s) => Value::compound(
            s.name.clone(),
            s.args.iter().map(arg_to_value).collect(),
        ),
    }
}

fn arg_to_value(a: &SugarArg) -> Value {
    match a {
        SugarArg::Markup(m) => markup_to_value(m),
        SugarArg::Text(t) => Value::atom(t.clone()),
        SugarArg::Int(i) => Value::Int(*i),
        SugarArg::Attrs(attrs) => attrs_to_value(attrs),
        SugarArg::Items(items) => Value::List(items.iter().map(markup_to_value).collect()),
        SugarArg::Value(v) => v.clone(),
    }
}

pub fn attr_to_value(a: &Attr) -> Value {
    match a {
        Attr::Flag(n) => Value::atom(n.clone()),
        Attr::Pair(n, v) => Value::compound("=", vec![Value::atom(n.clone()), Value::str(v.clone())]),
    }
}

fn attrs_to_value(attrs: &[Attr]) -> Value {
    Value::List(attrs.iter().map(attr_to_value).collect())
}

/// Reads an attribute list: atoms are flags, `name=value` pairs accept any
/// atomic value.
pub fn attrs_from_value(v: &Value) -> Option<Vec<Attr>> {
    let Value::List(items) = v else { return None };
    items
        .iter()
        .map(|item| match item {
            Value::Atom(n) | Value::Str(n) => Some(Attr::Flag(n.clone())),
            Value::Compound(eq, kv) if eq == "=" && kv.len() == 2 => {
                Some(Attr::Pair(kv[0].as_text()?, kv[1].as_text()?))
            }
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markup::normalize;
    use crate::sugar::Expander;
    use crate::term::parse_term;

    fn eval(text: &str) -> Vec<Markup> {
        let m = markup_from_value(&parse_term(text).unwrap());
        normalize(&Expander::new().expand(&m).unwrap()).unwrap()
    }

    #[test]
    fn functional_notation_terms() {
        assert_eq!(
            eval("'$'(img,['='(src,'images/map.gif'),'='(alt,\"A map\"),ismap])"),
            vec![Markup::element(
                "img",
                vec![
                    Attr::pair("src", "images/map.gif"),
                    Attr::pair("alt", "A map"),
                    Attr::flag("ismap")
                ]
            )]
        );
        assert_eq!(
            eval("address('clip@dia.fi.upm.es')"),
            vec![Markup::env("address", vec![], vec![Markup::text("clip@dia.fi.upm.es")])]
        );
        assert_eq!(
            eval("['Telephone number of ',b(daniel),': ','336-7448']"),
            vec![
                Markup::text("Telephone number of "),
                Markup::env("b", vec![], vec![Markup::text("daniel")]),
                Markup::text(": "),
                Markup::text("336-7448"),
            ]
        );
        assert_eq!(
            eval("input(text,['='(name,person_name),'='(size,20)])"),
            vec![Markup::element(
                "input",
                vec![
                    Attr::pair("type", "text"),
                    Attr::pair("name", "person_name"),
                    Attr::pair("size", "20")
                ]
            )]
        );
        assert_eq!(eval("'--'"), vec![Markup::element("hr", vec![])]);
    }

    #[test]
    fn placeholder_is_unbound() {
        let m = markup_from_value(&Value::Placeholder);
        assert!(normalize(&m).is_err());
    }

    #[test]
    fn normalized_documents_survive_the_trip() {
        let doc = vec![
            Markup::text("hi"),
            Markup::element("br", vec![Attr::flag("clear")]),
            Markup::env(
                "a",
                vec![Attr::pair("href", "x")],
                vec![Markup::comment(" c "), Markup::declaration("DOCTYPE html")],
            ),
        ];
        for node in &doc {
            let back = markup_from_value(&markup_to_value(node));
            assert_eq!(normalize(&Expander::new().expand(&back).unwrap()).unwrap(), vec![node.clone()]);
        }
    }
}
