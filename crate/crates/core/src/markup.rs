//! Term model for HTML/XML documents.
//!
//! A document is a tree of [`Markup`] nodes. Elements have no body
//! (`<img ...>`), environments do (`<a ...>...</a>`). [`Slot`]s are
//! write-once cells that stand in for content that is only known later,
//! which is how templates and back-patched documents are built.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::sugar::Sugar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarkupError {
    #[error("slot {0} is already bound")]
    AlreadyBound(SlotId),
    #[error("slot {0} is unbound")]
    UnboundSlot(SlotId),
    #[error("structure {name}/{arity} has not been expanded")]
    Unexpanded { name: String, arity: usize },
}

/// A single attribute: either a bare flag (`ismap`) or `name="value"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Attr {
    Flag(String),
    Pair(String, String),
}

impl Attr {
    pub fn flag(name: impl Into<String>) -> Self {
        Attr::Flag(name.into())
    }

    pub fn pair(name: impl Into<String>, value: impl Into<String>) -> Self {
        Attr::Pair(name.into(), value.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Attr::Flag(n) | Attr::Pair(n, _) => n,
        }
    }

    /// Value of a pair, or `None` for a flag.
    pub fn value(&self) -> Option<&str> {
        match self {
            Attr::Flag(_) => None,
            Attr::Pair(_, v) => Some(v),
        }
    }
}

/// Looks up the first attribute called `name`.
pub fn attr_value<'a>(attrs: &'a [Attr], name: &str) -> Option<&'a str> {
    attrs.iter().find(|a| a.name() == name).and_then(Attr::value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlotId(u64);

impl fmt::Display for SlotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_S{}", self.0)
    }
}

static NEXT_SLOT: AtomicU64 = AtomicU64::new(1);

#[derive(Debug)]
struct SlotCell {
    id: SlotId,
    binding: OnceLock<Markup>,
}

/// Write-once bindable cell. Clones share the cell, so binding any clone
/// makes the value visible at every position holding the slot.
#[derive(Debug, Clone)]
pub struct Slot(Arc<SlotCell>);

impl Slot {
    pub fn new() -> Self {
        let id = SlotId(NEXT_SLOT.fetch_add(1, Ordering::Relaxed));
        Slot(Arc::new(SlotCell {
            id,
            binding: OnceLock::new(),
        }))
    }

    pub fn id(&self) -> SlotId {
        self.0.id
    }

    /// Binds the slot. Concurrent binders race; exactly one wins.
    pub fn bind(&self, value: Markup) -> Result<(), MarkupError> {
        self.0
            .binding
            .set(value)
            .map_err(|_| MarkupError::AlreadyBound(self.id()))
    }

    pub fn binding(&self) -> Option<&Markup> {
        self.0.binding.get()
    }

    pub fn is_bound(&self) -> bool {
        self.binding().is_some()
    }
}

impl Default for Slot {
    fn default() -> Self {
        Self::new()
    }
}

/// Slots compare by identity, never by binding.
impl PartialEq for Slot {
    fn eq(&self, other: &Self) -> bool {
        self.id() == other.id()
    }
}

impl Eq for Slot {}

pub fn new_slot() -> Slot {
    Slot::new()
}

pub fn bind_slot(slot: &Slot, value: Markup) -> Result<(), MarkupError> {
    slot.bind(value)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Markup {
    Text(String),
    Element {
        name: String,
        attrs: Vec<Attr>,
    },
    Env {
        name: String,
        attrs: Vec<Attr>,
        body: Vec<Markup>,
    },
    Comment(String),
    Declaration(String),
    Slot(Slot),
    Seq(Vec<Markup>),
    /// Pre-rendered markup emitted verbatim. Produced by a few structures
    /// (`begin`/`end`, entities, verbatim text); never produced by parsing.
    Raw(String),
    /// A not yet expanded structure; see [`crate::sugar`].
    Sugar(Sugar),
}

impl Markup {
    pub fn text(s: impl Into<String>) -> Self {
        Markup::Text(s.into())
    }

    /// `name$attrs`. The name is lowercased.
    pub fn element(name: &str, attrs: Vec<Attr>) -> Self {
        Markup::Element {
            name: name.to_ascii_lowercase(),
            attrs,
        }
    }

    /// `env(name, attrs, body)`. The name is lowercased.
    pub fn env(name: &str, attrs: Vec<Attr>, body: Vec<Markup>) -> Self {
        Markup::Env {
            name: name.to_ascii_lowercase(),
            attrs,
            body,
        }
    }

    pub fn comment(s: impl Into<String>) -> Self {
        Markup::Comment(s.into())
    }

    pub fn declaration(s: impl Into<String>) -> Self {
        Markup::Declaration(s.into())
    }

    pub fn seq(items: Vec<Markup>) -> Self {
        Markup::Seq(items)
    }

    pub fn slot(s: &Slot) -> Self {
        Markup::Slot(s.clone())
    }

    /// True for the node kinds allowed in normalized output.
    pub fn is_core(&self) -> bool {
        matches!(
            self,
            Markup::Text(_)
                | Markup::Element { .. }
                | Markup::Env { .. }
                | Markup::Comment(_)
                | Markup::Declaration(_)
                | Markup::Raw(_)
        )
    }
}

impl From<&str> for Markup {
    fn from(s: &str) -> Self {
        Markup::Text(s.to_string())
    }
}

impl From<String> for Markup {
    fn from(s: String) -> Self {
        Markup::Text(s)
    }
}

impl From<Vec<Markup>> for Markup {
    fn from(items: Vec<Markup>) -> Self {
        Markup::Seq(items)
    }
}

impl From<Sugar> for Markup {
    fn from(s: Sugar) -> Self {
        Markup::Sugar(s)
    }
}

/// Reduces `t` to a flat list of core nodes: sequences are spliced, bound
/// slots are replaced by their normalized binding, and environment bodies
/// are normalized recursively. Document order is kept.
pub fn normalize(t: &Markup) -> Result<Vec<Markup>, MarkupError> {
    let mut out = Vec::new();
    normalize_into(t, &mut out)?;
    Ok(out)
}

/// [`normalize`] over a list of terms.
pub fn normalize_all(items: &[Markup]) -> Result<Vec<Markup>, MarkupError> {
    let mut out = Vec::new();
    for t in items {
        normalize_into(t, &mut out)?;
    }
    Ok(out)
}

fn normalize_into(t: &Markup, out: &mut Vec<Markup>) -> Result<(), MarkupError> {
    match t {
        Markup::Seq(items) => {
            for item in items {
                normalize_into(item, out)?;
            }
        }
        Markup::Slot(s) => match s.binding() {
            Some(b) => normalize_into(b, out)?,
            None => return Err(MarkupError::UnboundSlot(s.id())),
        },
        Markup::Env { name, attrs, body } => out.push(Markup::Env {
            name: name.clone(),
            attrs: attrs.clone(),
            body: normalize_all(body)?,
        }),
        Markup::Sugar(s) => {
            return Err(MarkupError::Unexpanded {
                name: s.name.clone(),
                arity: s.args.len(),
            })
        }
        other => out.push(other.clone()),
    }
    Ok(())
}

/// Structural equality. Sequences are flattened and bound slots are seen
/// through; unbound slots compare by identity.
pub fn term_equal(a: &Markup, b: &Markup) -> bool {
    let mut fa = Vec::new();
    let mut fb = Vec::new();
    flatten_into(a, &mut fa);
    flatten_into(b, &mut fb);
    fa == fb
}

fn flatten_into(t: &Markup, out: &mut Vec<Markup>) {
    match t {
        Markup::Seq(items) => items.iter().for_each(|i| flatten_into(i, out)),
        Markup::Slot(s) => match s.binding() {
            Some(b) => flatten_into(b, out),
            None => out.push(t.clone()),
        },
        Markup::Env { name, attrs, body } => {
            let mut flat = Vec::new();
            body.iter().for_each(|i| flatten_into(i, &mut flat));
            out.push(Markup::Env {
                name: name.clone(),
                attrs: attrs.clone(),
                body: flat,
            });
        }
        other => out.push(other.clone()),
    }
}

/// Name-to-slot dictionary produced by template parsing. Names keep their
/// first-occurrence order and a repeated name maps to a single slot.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TemplateDict {
    entries: Vec<(String, Slot)>,
}

impl TemplateDict {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the slot for `name`, creating it on first use.
    pub fn slot_for(&mut self, name: &str) -> Slot {
        if let Some(s) = self.get(name) {
            return s.clone();
        }
        let s = Slot::new();
        self.entries.push((name.to_string(), s.clone()));
        s
    }

    pub fn get(&self, name: &str) -> Option<&Slot> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn entries(&self) -> &[(String, Slot)] {
        &self.entries
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
