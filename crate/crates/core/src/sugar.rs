//! Document and form structures layered over the core term model.
//!
//! A [`Sugar`] node is a named constructor with arguments, for example
//! `heading(2, "Title")` or `input(text, [name=person_name])`. The
//! [`Expander`] rewrites these into core [`Markup`] using a built-in table
//! plus user-registered [`ExpansionRule`]s. User rules shadow built-ins of
//! the same head; the last registration of a head wins.
//!
//! Within a list, `start`/`end` and `start_form`/`end_form` pairs are
//! grouped into `html` and `form` environments around the items between
//! them. An unpaired marker renders as a bare open or close tag.
//!
//! Compound structures with no rule fall back to the general forms:
//! `name(Text)` is an environment and `name(Atts, Text)` an environment
//! with attributes.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock};

use parking_lot::RwLock;
use thiserror::Error;

use crate::codec;
use crate::convert;
use crate::markup::{Attr, Markup, MarkupError};
use crate::term::{self, Value};

/// Maximum nesting of rule applications before expansion gives up.
pub const MAX_EXPANSION_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("expansion depth {0} exceeded")]
    DepthExceeded(usize),
    #[error("malformed {constructor}: {reason}")]
    Malformed { constructor: String, reason: String },
    #[error("{0}/{1} is a core constructor and cannot be redefined")]
    ReservedHead(String, usize),
    #[error(transparent)]
    Markup(#[from] MarkupError),
}

/// Argument of a structure.
#[derive(Debug, Clone, PartialEq)]
pub enum SugarArg {
    Markup(Markup),
    Text(String),
    Int(i64),
    Attrs(Vec<Attr>),
    Items(Vec<Markup>),
    Value(Value),
}

impl From<&str> for SugarArg {
    fn from(s: &str) -> Self {
        SugarArg::Text(s.to_string())
    }
}

impl From<String> for SugarArg {
    fn from(s: String) -> Self {
        SugarArg::Text(s)
    }
}

impl From<i64> for SugarArg {
    fn from(i: i64) -> Self {
        SugarArg::Int(i)
    }
}

impl From<Markup> for SugarArg {
    fn from(m: Markup) -> Self {
        SugarArg::Markup(m)
    }
}

impl From<Vec<Attr>> for SugarArg {
    fn from(a: Vec<Attr>) -> Self {
        SugarArg::Attrs(a)
    }
}

impl From<Vec<Markup>> for SugarArg {
    fn from(items: Vec<Markup>) -> Self {
        SugarArg::Items(items)
    }
}

impl From<Value> for SugarArg {
    fn from(v: Value) -> Self {
        SugarArg::Value(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sugar {
    pub name: String,
    pub args: Vec<SugarArg>,
}

impl Sugar {
    pub fn new(name: impl Into<String>, args: Vec<SugarArg>) -> Self {
        Sugar {
            name: name.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    fn malformed(&self, reason: impl Into<String>) -> ExpandError {
        ExpandError::Malformed {
            constructor: format!("{}/{}", self.name, self.arity()),
            reason: reason.into(),
        }
    }

    fn arg(&self, i: usize) -> Result<&SugarArg, ExpandError> {
        self.args
            .get(i)
            .ok_or_else(|| self.malformed(format!("missing argument {}", i + 1)))
    }

    /// Argument `i` as plain text (address, name, token).
    pub fn text_arg(&self, i: usize) -> Result<String, ExpandError> {
        let r = match self.arg(i)? {
            SugarArg::Text(s) => Some(s.clone()),
            SugarArg::Int(n) => Some(n.to_string()),
            SugarArg::Markup(Markup::Text(s)) => Some(s.clone()),
            SugarArg::Value(v) => v.as_text(),
            _ => None,
        };
        r.ok_or_else(|| self.malformed(format!("argument {} must be text", i + 1)))
    }

    pub fn int_arg(&self, i: usize) -> Result<i64, ExpandError> {
        let r = match self.arg(i)? {
            SugarArg::Int(n) | SugarArg::Value(Value::Int(n)) => Some(*n),
            SugarArg::Text(s) | SugarArg::Markup(Markup::Text(s)) => s.trim().parse().ok(),
            SugarArg::Value(Value::Atom(s) | Value::Str(s)) => s.trim().parse().ok(),
            _ => None,
        };
        r.ok_or_else(|| self.malformed(format!("argument {} must be an integer", i + 1)))
    }

    /// Argument `i` as a document fragment.
    pub fn markup_arg(&self, i: usize) -> Result<Markup, ExpandError> {
        Ok(match self.arg(i)? {
            SugarArg::Markup(m) => m.clone(),
            SugarArg::Text(s) => Markup::Text(s.clone()),
            SugarArg::Int(n) => Markup::Text(n.to_string()),
            SugarArg::Attrs(_) => return Err(self.malformed("attribute list where text expected")),
            SugarArg::Items(items) => Markup::Seq(items.clone()),
            SugarArg::Value(v) => convert::markup_from_value(v),
        })
    }

    pub fn attrs_arg(&self, i: usize) -> Result<Vec<Attr>, ExpandError> {
        match self.arg(i)? {
            SugarArg::Attrs(a) => Ok(a.clone()),
            SugarArg::Items(items) if items.is_empty() => Ok(Vec::new()),
            SugarArg::Markup(Markup::Seq(items)) if items.is_empty() => Ok(Vec::new()),
            SugarArg::Value(v) => convert::attrs_from_value(v).ok_or_else(|| {
                self.malformed(format!("argument {} must be an attribute list", i + 1))
            }),
            _ => Err(self.malformed(format!("argument {} must be an attribute list", i + 1))),
        }
    }

    pub fn items_arg(&self, i: usize) -> Result<Vec<Markup>, ExpandError> {
        Ok(match self.arg(i)? {
            SugarArg::Items(items) => items.clone(),
            SugarArg::Markup(Markup::Seq(items)) => items.clone(),
            SugarArg::Value(Value::List(vs)) => vs.iter().map(convert::markup_from_value).collect(),
            other => vec![match other {
                SugarArg::Markup(m) => m.clone(),
                _ => self.markup_arg(i)?,
            }],
        })
    }

    pub fn value_arg(&self, i: usize) -> Result<Value, ExpandError> {
        Ok(match self.arg(i)? {
            SugarArg::Value(v) => v.clone(),
            SugarArg::Int(n) => Value::Int(*n),
            SugarArg::Text(s) => Value::Atom(s.clone()),
            SugarArg::Markup(m) => convert::markup_to_value(m),
            SugarArg::Attrs(a) => Value::List(a.iter().map(convert::attr_to_value).collect()),
            SugarArg::Items(items) => {
                Value::List(items.iter().map(convert::markup_to_value).collect())
            }
        })
    }
}

/// User rewrite function. May return further structures; they are expanded
/// in turn.
pub type RuleFn = dyn Fn(&Sugar) -> Result<Markup, ExpandError> + Send + Sync;

#[derive(Clone)]
pub struct ExpansionRule {
    pub name: String,
    pub arity: usize,
    pub rewrite: Arc<RuleFn>,
}

impl ExpansionRule {
    pub fn new<F>(name: impl Into<String>, arity: usize, rewrite: F) -> Self
    where
        F: Fn(&Sugar) -> Result<Markup, ExpandError> + Send + Sync + 'static,
    {
        ExpansionRule {
            name: name.into(),
            arity,
            rewrite: Arc::new(rewrite),
        }
    }
}

impl std::fmt::Debug for ExpansionRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ExpansionRule({}/{})", self.name, self.arity)
    }
}

/// Asset locations used by `pr` and `nice_itemize/1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionConfig {
    pub bullet_image: String,
    pub logo_image: String,
    pub logo_link: String,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        ExpansionConfig {
            bullet_image: "images/bullet.gif".into(),
            logo_image: "images/termweb.gif".into(),
            logo_link: "https://docs.rs/termweb".into(),
        }
    }
}

/// Heads whose built-in meaning is a core node; users cannot redefine them.
const RESERVED: &[(&str, usize)] = &[
    ("$", 2),
    ("env", 3),
    ("comment", 1),
    ("declare", 1),
    ("raw", 1),
];

/// Zero-arity structures recognized when converting bare atoms.
pub(crate) const ATOM_STRUCTURES: &[&str] = &[
    "start", "end", "--", "\\\\", "$", "nl", "cgi_reply", "pr", "start_form", "end_form",
];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Marker {
    Html,
    Form,
}

pub struct Expander {
    rules: RwLock<HashMap<(String, usize), Arc<RuleFn>>>,
    config: ExpansionConfig,
}

impl Default for Expander {
    fn default() -> Self {
        Self::new()
    }
}

static GLOBAL: LazyLock<Expander> = LazyLock::new(Expander::new);

/// Process-wide expander used by [`crate::codec::render`].
pub fn global() -> &'static Expander {
    &GLOBAL
}

/// Registers `rule` with the process-wide expander.
pub fn register_expansion(rule: ExpansionRule) -> Result<(), ExpandError> {
    GLOBAL.register(rule)
}

/// Expands `t` with the process-wide expander.
pub fn expand(t: &Markup) -> Result<Markup, ExpandError> {
    GLOBAL.expand(t)
}

impl Expander {
    pub fn new() -> Self {
        Self::with_config(ExpansionConfig::default())
    }

    pub fn with_config(config: ExpansionConfig) -> Self {
        Expander {
            rules: RwLock::new(HashMap::new()),
            config,
        }
    }

    pub fn config(&self) -> &ExpansionConfig {
        &self.config
    }

    pub fn register(&self, rule: ExpansionRule) -> Result<(), ExpandError> {
        if RESERVED.contains(&(rule.name.as_str(), rule.arity)) {
            return Err(ExpandError::ReservedHead(rule.name, rule.arity));
        }
        self.rules
            .write()
            .insert((rule.name, rule.arity), rule.rewrite);
        Ok(())
    }

    fn user_rule(&self, name: &str, arity: usize) -> Option<Arc<RuleFn>> {
        self.rules.read().get(&(name.to_string(), arity)).cloned()
    }

    /// Rewrites every structure in `t` into core markup. Bound slots are
    /// replaced by their expanded bindings; unbound slots are left in place.
    pub fn expand(&self, t: &Markup) -> Result<Markup, ExpandError> {
        self.expand_node(t, 0)
    }

    /// Expands a list of terms, grouping paired markers.
    pub fn expand_all(&self, items: &[Markup]) -> Result<Vec<Markup>, ExpandError> {
        self.expand_list(items, 0)
    }

    fn expand_node(&self, t: &Markup, depth: usize) -> Result<Markup, ExpandError> {
        match t {
            Markup::Env { name, attrs, body } => Ok(Markup::Env {
                name: name.clone(),
                attrs: attrs.clone(),
                body: self.expand_list(body, depth)?,
            }),
            Markup::Seq(items) => Ok(Markup::Seq(self.expand_list(items, depth)?)),
            Markup::Slot(s) => match s.binding() {
                Some(b) => self.expand_node(b, depth),
                None => Ok(t.clone()),
            },
            Markup::Sugar(s) => {
                if depth >= MAX_EXPANSION_DEPTH {
                    return Err(ExpandError::DepthExceeded(MAX_EXPANSION_DEPTH));
                }
                let rewritten = match self.user_rule(&s.name, s.arity()) {
                    Some(rule) => rule(s)?,
                    None => self.builtin(s)?,
                };
                self.expand_node(&rewritten, depth + 1)
            }
            other => Ok(other.clone()),
        }
    }

    fn expand_list(&self, items: &[Markup], depth: usize) -> Result<Vec<Markup>, ExpandError> {
        let mut flat = Vec::with_capacity(items.len());
        flatten_list(items, &mut flat);
        let grouped = self.group_markers(flat)?;
        grouped.iter().map(|t| self.expand_node(t, depth)).collect()
    }

    fn marker(&self, t: &Markup) -> Option<(Marker, bool)> {
        let Markup::Sugar(s) = t else { return None };
        let found = match (s.name.as_str(), s.arity()) {
            ("start", 0) => (Marker::Html, true),
            ("end", 0) => (Marker::Html, false),
            ("start_form", 0..=2) => (Marker::Form, true),
            ("end_form", 0) => (Marker::Form, false),
            _ => return None,
        };
        if self.user_rule(&s.name, s.arity()).is_some() {
            return None;
        }
        Some(found)
    }

    fn group_markers(&self, items: Vec<Markup>) -> Result<Vec<Markup>, ExpandError> {
        let mut iter = items.into_iter().peekable();
        let mut out = Vec::new();
        self.group_until(&mut iter, &mut Vec::new(), &mut out)?;
        Ok(out)
    }

    /// Collects items into `out` until the closer of `open.last()` appears
    /// (consumed, returns true) or a closer of an outer marker appears
    /// (left in place, returns false) or input ends (returns false).
    fn group_until(
        &self,
        iter: &mut std::iter::Peekable<std::vec::IntoIter<Markup>>,
        open: &mut Vec<Marker>,
        out: &mut Vec<Markup>,
    ) -> Result<bool, ExpandError> {
        while let Some(next) = iter.peek() {
            match self.marker(next) {
                Some((kind, false)) => {
                    if open.last() == Some(&kind) {
                        iter.next();
                        return Ok(true);
                    }
                    if open.contains(&kind) {
                        return Ok(false);
                    }
                    iter.next();
                    out.push(Markup::Raw(match kind {
                        Marker::Html => "</html>".into(),
                        Marker::Form => "</form>".into(),
                    }));
                }
                Some((kind, true)) => {
                    let Some(Markup::Sugar(opener)) = iter.next() else {
                        unreachable!()
                    };
                    let (name, attrs) = match kind {
                        Marker::Html => ("html", Vec::new()),
                        Marker::Form => ("form", form_attrs(&opener)?),
                    };
                    open.push(kind);
                    let mut children = Vec::new();
                    let closed = self.group_until(iter, open, &mut children)?;
                    open.pop();
                    if closed {
                        out.push(Markup::Env {
                            name: name.into(),
                            attrs,
                            body: children,
                        });
                    } else {
                        out.push(Markup::Raw(codec::open_tag(name, &attrs)));
                        out.extend(children);
                    }
                }
                None => out.push(iter.next().unwrap()),
            }
        }
        Ok(false)
    }

    fn builtin(&self, s: &Sugar) -> Result<Markup, ExpandError> {
        let m = match (s.name.as_str(), s.arity()) {
            ("$", 2) => Markup::Element {
                name: s.text_arg(0)?,
                attrs: s.attrs_arg(1)?,
            },
            ("env", 3) => Markup::Env {
                name: s.text_arg(0)?,
                attrs: s.attrs_arg(1)?,
                body: s.items_arg(2)?,
            },
            ("comment", 1) => Markup::Comment(s.text_arg(0)?),
            ("declare", 1) => Markup::Declaration(s.text_arg(0)?),
            ("raw", 1) => Markup::Raw(s.text_arg(0)?),
            ("start", 0) => Markup::Raw("<html>".into()),
            ("end", 0) => Markup::Raw("</html>".into()),
            ("--", 0) => Markup::element("hr", vec![]),
            ("\\\\", 0) => Markup::element("br", vec![]),
            ("$", 0) => Markup::element("p", vec![]),
            ("nl", 0) => Markup::text("\n"),
            ("cgi_reply", 0) => Markup::text("Content-type: text/html\n\n"),
            ("pr", 0) => Markup::env(
                "a",
                vec![Attr::pair("href", &self.config.logo_link)],
                vec![Markup::element(
                    "img",
                    vec![
                        Attr::pair("src", &self.config.logo_image),
                        Attr::pair("alt", "termweb"),
                    ],
                )],
            ),
            ("begin", 1) => Markup::Raw(codec::open_tag(&s.text_arg(0)?, &[])),
            ("begin", 2) => Markup::Raw(codec::open_tag(&s.text_arg(0)?, &s.attrs_arg(1)?)),
            ("end", 1) => Markup::Raw(format!("</{}>", s.text_arg(0)?)),
            ("image", 1) => Markup::element("img", vec![Attr::pair("src", s.text_arg(0)?)]),
            ("image", 2) => {
                let mut attrs = vec![Attr::pair("src", s.text_arg(0)?)];
                attrs.extend(s.attrs_arg(1)?);
                Markup::element("img", attrs)
            }
            ("ref", 2) => Markup::env(
                "a",
                vec![Attr::pair("href", s.text_arg(0)?)],
                vec![s.markup_arg(1)?],
            ),
            ("label", 2) => Markup::env(
                "a",
                vec![Attr::pair("name", s.text_arg(0)?)],
                vec![s.markup_arg(1)?],
            ),
            ("heading", 2) => {
                let level = s.int_arg(0)?;
                if !(1..=6).contains(&level) {
                    return Err(s.malformed(format!("heading level {level} outside 1..6")));
                }
                Markup::env(&format!("h{level}"), vec![], vec![s.markup_arg(1)?])
            }
            ("itemize", 1) => list_env("ul", s.items_arg(0)?),
            ("enumerate", 1) => list_env("ol", s.items_arg(0)?),
            ("description", 1) => {
                let mut body = Vec::new();
                for def in s.items_arg(0)? {
                    let mut parts = match def {
                        Markup::Seq(parts) => parts,
                        other => vec![other],
                    };
                    let Some(definition) = parts.pop() else {
                        return Err(s.malformed("empty definition"));
                    };
                    for term in parts {
                        body.push(Markup::env("dt", vec![], vec![term]));
                    }
                    body.push(Markup::env("dd", vec![], vec![definition]));
                }
                Markup::env("dl", vec![], body)
            }
            ("nice_itemize", 1) => nice_list(&self.config.bullet_image, s.items_arg(0)?),
            ("nice_itemize", 2) => nice_list(&s.text_arg(0)?, s.items_arg(1)?),
            ("preformatted", 1) => {
                let mut body = Vec::new();
                for (i, line) in s.items_arg(0)?.into_iter().enumerate() {
                    if i > 0 {
                        body.push(Markup::text("\n"));
                    }
                    body.push(line);
                }
                Markup::env("pre", vec![], body)
            }
            ("verbatim", 1) => {
                let inner = self.expand(&s.markup_arg(0)?)?;
                let source = match &inner {
                    Markup::Text(t) => t.clone(),
                    other => codec::serialize(&crate::markup::normalize(other)?, codec::Dialect::Html),
                };
                Markup::Raw(escape_all(&source))
            }
            ("prolog_term", 1) => Markup::Text(prolog_term_text(&s.value_arg(0)?)),
            ("entity", 1) => Markup::Raw(format!("&{};", s.text_arg(0)?)),
            ("start_form", 0..=2) => Markup::Raw(codec::open_tag("form", &form_attrs(s)?)),
            ("end_form", 0) => Markup::Raw("</form>".into()),
            ("$", 1) | ("selected", 1) => s.markup_arg(0)?,
            ("checkbox", 2) => {
                let mut attrs = vec![
                    Attr::pair("type", "checkbox"),
                    Attr::pair("name", s.text_arg(0)?),
                ];
                if s.text_arg(1)? == "on" {
                    attrs.push(Attr::flag("checked"));
                }
                Markup::element("input", attrs)
            }
            ("radio", 3) => {
                let value = s.text_arg(1)?;
                let mut attrs = vec![
                    Attr::pair("type", "radio"),
                    Attr::pair("name", s.text_arg(0)?),
                    Attr::pair("value", value.clone()),
                ];
                if s.text_arg(2)? == value {
                    attrs.push(Attr::flag("checked"));
                }
                Markup::element("input", attrs)
            }
            ("input", 2) => {
                let mut attrs = vec![Attr::pair("type", s.text_arg(0)?)];
                attrs.extend(s.attrs_arg(1)?);
                Markup::element("input", attrs)
            }
            ("textinput", 3) => {
                let mut attrs = vec![Attr::pair("name", s.text_arg(0)?)];
                attrs.extend(s.attrs_arg(1)?);
                Markup::env("textarea", attrs, vec![s.markup_arg(2)?])
            }
            ("option", 3) => {
                let chosen = s.text_arg(1)?;
                let options = s.items_arg(2)?;
                let texts: Vec<String> = options.iter().map(plain_text).collect();
                let selected = texts.iter().position(|t| *t == chosen).unwrap_or(0);
                let body = options
                    .into_iter()
                    .enumerate()
                    .map(|(i, o)| option_env(o, i == selected))
                    .collect();
                Markup::env("select", vec![Attr::pair("name", s.text_arg(0)?)], body)
            }
            ("menu", 3) => {
                let mut attrs = vec![Attr::pair("name", s.text_arg(0)?)];
                attrs.extend(s.attrs_arg(1)?);
                let body = s
                    .items_arg(2)?
                    .into_iter()
                    .map(|item| match selected_item(&item) {
                        Some(inner) => Ok(option_env(inner?, true)),
                        None => Ok(option_env(item, false)),
                    })
                    .collect::<Result<_, ExpandError>>()?;
                Markup::env("select", attrs, body)
            }
            (name, 1) => Markup::Env {
                name: name.to_string(),
                attrs: Vec::new(),
                body: s.items_arg(0)?,
            },
            (name, 2) => Markup::Env {
                name: name.to_string(),
                attrs: s.attrs_arg(0)?,
                body: s.items_arg(1)?,
            },
            _ => return Err(s.malformed("no expansion rule")),
        };
        Ok(m)
    }
}

fn flatten_list(items: &[Markup], out: &mut Vec<Markup>) {
    for item in items {
        match item {
            Markup::Seq(inner) => flatten_list(inner, out),
            Markup::Slot(s) => match s.binding() {
                Some(b) => flatten_list(std::slice::from_ref(b), out),
                None => out.push(item.clone()),
            },
            other => out.push(other.clone()),
        }
    }
}

fn form_attrs(s: &Sugar) -> Result<Vec<Attr>, ExpandError> {
    Ok(match s.arity() {
        0 => vec![Attr::pair("method", "POST")],
        1 => vec![
            Attr::pair("method", "POST"),
            Attr::pair("action", s.text_arg(0)?),
        ],
        _ => {
            let mut attrs = vec![Attr::pair("action", s.text_arg(0)?)];
            attrs.extend(s.attrs_arg(1)?);
            attrs
        }
    })
}

fn list_env(name: &str, items: Vec<Markup>) -> Markup {
    Markup::env(
        name,
        vec![],
        items
            .into_iter()
            .map(|i| Markup::env("li", vec![], vec![i]))
            .collect(),
    )
}

fn nice_list(bullet: &str, items: Vec<Markup>) -> Markup {
    Markup::env(
        "dl",
        vec![],
        items
            .into_iter()
            .map(|i| {
                Markup::env(
                    "dd",
                    vec![],
                    vec![
                        Markup::element(
                            "img",
                            vec![
                                Attr::pair("src", bullet),
                                Attr::pair("align", "bottom"),
                                Attr::pair("alt", "*"),
                            ],
                        ),
                        i,
                    ],
                )
            })
            .collect(),
    )
}

fn option_env(item: Markup, selected: bool) -> Markup {
    let attrs = if selected {
        vec![Attr::flag("selected")]
    } else {
        vec![]
    };
    Markup::env("option", attrs, vec![item])
}

/// `$item` or `selected(item)` inside a menu.
fn selected_item(item: &Markup) -> Option<Result<Markup, ExpandError>> {
    match item {
        Markup::Sugar(s) if s.arity() == 1 && (s.name == "$" || s.name == "selected") => {
            Some(s.markup_arg(0))
        }
        _ => None,
    }
}

fn plain_text(m: &Markup) -> String {
    match m {
        Markup::Text(t) => t.clone(),
        Markup::Sugar(s) if s.args.is_empty() => s.name.clone(),
        other => convert::markup_to_value(other)
            .as_text()
            .unwrap_or_default(),
    }
}

/// Escapes `<`, `>`, `&` and `"`.
pub fn escape_all(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '&' => out.push_str("&amp;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

/// Functional-notation text of a value; placeholders print as `_`.
pub fn prolog_term_text(v: &Value) -> String {
    term::to_text(v)
}

// Constructors for the built-in structures.

fn s0(name: &str) -> Markup {
    Markup::Sugar(Sugar::new(name, vec![]))
}

pub fn start() -> Markup {
    s0("start")
}

pub fn end() -> Markup {
    s0("end")
}

/// `--`: horizontal rule.
pub fn rule() -> Markup {
    s0("--")
}

/// `\\`: line break.
pub fn linebreak() -> Markup {
    s0("\\\\")
}

/// `$`: paragraph break.
pub fn par() -> Markup {
    s0("$")
}

pub fn nl() -> Markup {
    s0("nl")
}

pub fn cgi_reply() -> Markup {
    s0("cgi_reply")
}

pub fn pr() -> Markup {
    s0("pr")
}

pub fn begin(name: &str, attrs: Vec<Attr>) -> Markup {
    Markup::Sugar(Sugar::new("begin", vec![name.into(), attrs.into()]))
}

pub fn end_env(name: &str) -> Markup {
    Markup::Sugar(Sugar::new("end", vec![name.into()]))
}

pub fn image(addr: &str) -> Markup {
    Markup::Sugar(Sugar::new("image", vec![addr.into()]))
}

pub fn image_with(addr: &str, attrs: Vec<Attr>) -> Markup {
    Markup::Sugar(Sugar::new("image", vec![addr.into(), attrs.into()]))
}

pub fn reference(addr: &str, text: impl Into<Markup>) -> Markup {
    Markup::Sugar(Sugar::new("ref", vec![addr.into(), text.into().into()]))
}

pub fn label(label: &str, text: impl Into<Markup>) -> Markup {
    Markup::Sugar(Sugar::new("label", vec![label.into(), text.into().into()]))
}

pub fn heading(level: i64, text: impl Into<Markup>) -> Markup {
    Markup::Sugar(Sugar::new("heading", vec![level.into(), text.into().into()]))
}

pub fn itemize(items: Vec<Markup>) -> Markup {
    Markup::Sugar(Sugar::new("itemize", vec![items.into()]))
}

pub fn enumerate(items: Vec<Markup>) -> Markup {
    Markup::Sugar(Sugar::new("enumerate", vec![items.into()]))
}

/// Each definition is a sequence whose last element is the definition and
/// whose other elements are the defined terms.
pub fn description(defs: Vec<Markup>) -> Markup {
    Markup::Sugar(Sugar::new("description", vec![defs.into()]))
}

pub fn nice_itemize(bullet: &str, items: Vec<Markup>) -> Markup {
    Markup::Sugar(Sugar::new("nice_itemize", vec![bullet.into(), items.into()]))
}

pub fn preformatted(lines: Vec<Markup>) -> Markup {
    Markup::Sugar(Sugar::new("preformatted", vec![lines.into()]))
}

pub fn verbatim(text: impl Into<Markup>) -> Markup {
    Markup::Sugar(Sugar::new("verbatim", vec![text.into().into()]))
}

pub fn prolog_term(v: Value) -> Markup {
    Markup::Sugar(Sugar::new("prolog_term", vec![v.into()]))
}

pub fn entity(name: &str) -> Markup {
    Markup::Sugar(Sugar::new("entity", vec![name.into()]))
}

/// Form whose handler is the program producing it.
pub fn start_form() -> Markup {
    s0("start_form")
}

pub fn start_form_to(addr: &str) -> Markup {
    Markup::Sugar(Sugar::new("start_form", vec![addr.into()]))
}

pub fn start_form_with(addr: &str, attrs: Vec<Attr>) -> Markup {
    Markup::Sugar(Sugar::new("start_form", vec![addr.into(), attrs.into()]))
}

pub fn end_form() -> Markup {
    s0("end_form")
}

pub fn checkbox(name: &str, on: bool) -> Markup {
    let state = if on { "on" } else { "off" };
    Markup::Sugar(Sugar::new("checkbox", vec![name.into(), state.into()]))
}

pub fn radio(name: &str, value: &str, selected: &str) -> Markup {
    Markup::Sugar(Sugar::new(
        "radio",
        vec![name.into(), value.into(), selected.into()],
    ))
}

pub fn input(kind: &str, attrs: Vec<Attr>) -> Markup {
    Markup::Sugar(Sugar::new("input", vec![kind.into(), attrs.into()]))
}

pub fn textinput(name: &str, attrs: Vec<Attr>, text: impl Into<Markup>) -> Markup {
    Markup::Sugar(Sugar::new(
        "textinput",
        vec![name.into(), attrs.into(), text.into().into()],
    ))
}

pub fn option(name: &str, value: &str, options: Vec<Markup>) -> Markup {
    Markup::Sugar(Sugar::new(
        "option",
        vec![name.into(), value.into(), options.into()],
    ))
}

pub fn menu(name: &str, attrs: Vec<Attr>, items: Vec<Markup>) -> Markup {
    Markup::Sugar(Sugar::new("menu", vec![name.into(), attrs.into(), items.into()]))
}

/// Marks a menu item as initially selected.
pub fn selected(item: impl Into<Markup>) -> Markup {
    Markup::Sugar(Sugar::new("$", vec![item.into().into()]))
}
