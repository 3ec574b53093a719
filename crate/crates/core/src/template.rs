//! HTML templates with `<V>name</V>` slots.
//!
//! Parsing a template yields the document terms and a dictionary mapping
//! each slot name to its shared slot. Only explicitly closed `<V>` tags
//! whose body is a single non-blank text become slots; the name is the
//! trimmed text. An unclosed `<V>` is kept as an ordinary `v` environment.
//! Slots are recognized in body position only, never inside attribute
//! values.

use std::path::Path;

use thiserror::Error;

use crate::codec::{self, CodecError, Dialect};
use crate::markup::{Markup, MarkupError, TemplateDict};

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("unknown template slot {0:?}")]
    UnknownName(String),
    #[error("template slot {0:?} is already bound")]
    AlreadyBound(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub fn parse_template(text: &str) -> (Vec<Markup>, TemplateDict) {
    let mut dict = TemplateDict::new();
    let terms = codec::parse_template_impl(text, Dialect::Html, &mut dict)
        .expect("HTML mode parsing is total");
    (terms, dict)
}

/// Binds each named slot. Every name is checked before any slot is bound,
/// so an error leaves the dictionary unchanged.
pub fn fill(dict: &TemplateDict, bindings: &[(&str, Markup)]) -> Result<(), TemplateError> {
    for (i, (name, _)) in bindings.iter().enumerate() {
        if bindings[..i].iter().any(|(n, _)| n == name) {
            return Err(TemplateError::AlreadyBound(name.to_string()));
        }
        let slot = dict
            .get(name)
            .ok_or_else(|| TemplateError::UnknownName(name.to_string()))?;
        if slot.is_bound() {
            return Err(TemplateError::AlreadyBound(name.to_string()));
        }
    }
    for (name, value) in bindings {
        let slot = dict.get(name).expect("checked above");
        slot.bind(value.clone()).map_err(|e| match e {
            MarkupError::AlreadyBound(_) => TemplateError::AlreadyBound(name.to_string()),
            other => TemplateError::Codec(other.into()),
        })?;
    }
    Ok(())
}

/// Reads a file as ISO-8859-1 text.
pub fn file_to_string(path: impl AsRef<Path>) -> Result<String, TemplateError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| TemplateError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(codec::decode_latin1(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{parse, render};
    use crate::markup::Attr;

    #[test]
    fn single_slot() {
        let (terms, dict) = parse_template("<p><V>response</V></p>");
        assert_eq!(dict.names().collect::<Vec<_>>(), vec!["response"]);
        fill(&dict, &[("response", Markup::text("hi"))]).unwrap();
        assert_eq!(
            render(&Markup::Seq(terms), Dialect::Html).unwrap(),
            "<p>hi</p>"
        );
    }

    #[test]
    fn repeated_names_share_a_slot() {
        let (terms, dict) = parse_template("<v> x </v>-<V>x</V>-<V>y</V>");
        assert_eq!(dict.names().collect::<Vec<_>>(), vec!["x", "y"]);
        let positions: Vec<_> = terms
            .iter()
            .filter_map(|t| match t {
                Markup::Slot(s) => Some(s.id()),
                _ => None,
            })
            .collect();
        assert_eq!(positions.len(), 3);
        assert_eq!(positions[0], positions[1]);
        assert_ne!(positions[0], positions[2]);
        fill(&dict, &[("x", "A".into()), ("y", "B".into())]).unwrap();
        assert_eq!(render(&Markup::Seq(terms), Dialect::Html).unwrap(), "A-A-B");
    }

    #[test]
    fn slot_free_templates_equal_parse() {
        let text = "<h1 class=t>T</h1><!-- c --><br>";
        let (terms, dict) = parse_template(text);
        assert!(dict.is_empty());
        assert_eq!(terms, parse(text, Dialect::Html).unwrap());
    }

    #[test]
    fn unclosed_and_non_text_v_stay_environments() {
        let (terms, dict) = parse_template("<V>name");
        assert!(dict.is_empty());
        assert_eq!(terms, vec![Markup::env("v", vec![], vec!["name".into()])]);

        let (terms, dict) = parse_template("<V><b>n</b></V><V> </V>");
        assert!(dict.is_empty());
        assert_eq!(terms.len(), 2);
    }

    #[test]
    fn attribute_values_are_not_slots() {
        let (terms, dict) = parse_template("<a href=\"<V>x</V>\">y</a>");
        assert!(dict.is_empty());
        assert_eq!(
            terms,
            vec![Markup::env("a", vec![Attr::pair("href", "<V>x</V>")], vec!["y".into()])]
        );
    }

    #[test]
    fn fill_errors() {
        let (_, dict) = parse_template("<V>a</V>");
        fill(&dict, &[]).unwrap();
        assert!(matches!(
            fill(&dict, &[("xyz", "1".into())]),
            Err(TemplateError::UnknownName(n)) if n == "xyz"
        ));
        fill(&dict, &[("a", "1".into())]).unwrap();
        assert!(matches!(
            fill(&dict, &[("a", "2".into())]),
            Err(TemplateError::AlreadyBound(_))
        ));
    }
}
