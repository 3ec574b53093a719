//! Markup text <-> term conversion.
//!
//! Rendering expands structures, normalizes, then serializes. Parsing
//! produces normalized term lists. HTML mode is lenient: an unmatched end
//! tag is dropped and an unclosed environment is closed at the end of the
//! enclosing scope. No implicit closing of siblings is inferred, so
//! `<p>a<p>b` nests the second paragraph inside the first. XML mode keeps
//! name case and rejects mismatched or unclosed tags.
//!
//! Text escapes `<`, `>` and `&`; attribute values escape `&` and `"`.
//! Parsing decodes `&lt; &gt; &amp; &quot;` and numeric references; any
//! other `&name;` is kept literally. Whitespace is preserved verbatim.
//!
//! The byte interfaces treat data as ISO-8859-1: every byte is one
//! character and characters above U+00FF are written as numeric
//! references.

use std::io::Write;

use thiserror::Error;

use crate::markup::{normalize, Attr, Markup, MarkupError, TemplateDict};
use crate::sugar::{self, ExpandError, Expander};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dialect {
    #[default]
    Html,
    Xml,
}

#[derive(Debug, Error)]
pub enum CodecError {
    #[error(transparent)]
    Expand(#[from] ExpandError),
    #[error(transparent)]
    Markup(#[from] MarkupError),
    #[error("XML syntax error at offset {offset}: {message}")]
    XmlSyntax { offset: usize, message: String },
    #[error("write failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Elements that never take a body in HTML mode.
pub const VOID_ELEMENTS: &[&str] = &[
    "img", "br", "hr", "input", "meta", "link", "base", "area", "param",
];

pub fn is_void(name: &str) -> bool {
    VOID_ELEMENTS.contains(&name)
}

/// Renders a term (or a [`Markup::Seq`] of terms) to text using the
/// process-wide expander.
pub fn render(t: &Markup, dialect: Dialect) -> Result<String, CodecError> {
    render_with(sugar::global(), t, dialect)
}

pub fn render_all(items: &[Markup], dialect: Dialect) -> Result<String, CodecError> {
    let mut out = String::new();
    for t in items {
        out.push_str(&render(t, dialect)?);
    }
    Ok(out)
}

pub fn render_with(expander: &Expander, t: &Markup, dialect: Dialect) -> Result<String, CodecError> {
    let nodes = normalize(&expander.expand(t)?)?;
    Ok(serialize(&nodes, dialect))
}

/// Renders to ISO-8859-1 bytes.
pub fn render_bytes(t: &Markup, dialect: Dialect) -> Result<Vec<u8>, CodecError> {
    Ok(encode_latin1(&render(t, dialect)?))
}

/// Writes the rendering of `t` to `sink` node by node. The bytes written
/// equal [`render_bytes`].
pub fn render_to_stream(t: &Markup, dialect: Dialect, sink: &mut dyn Write) -> Result<(), CodecError> {
    let nodes = normalize(&sugar::global().expand(t)?)?;
    let mut buf = String::new();
    for node in &nodes {
        buf.clear();
        write_node(node, dialect, &mut buf);
        sink.write_all(&encode_latin1(&buf))?;
    }
    Ok(())
}

/// Serializes already-normalized nodes.
pub fn serialize(nodes: &[Markup], dialect: Dialect) -> String {
    let mut out = String::new();
    for n in nodes {
        write_node(n, dialect, &mut out);
    }
    out
}

/// `<name attrs>` in HTML form.
pub fn open_tag(name: &str, attrs: &[Attr]) -> String {
    let mut out = String::new();
    out.push('<');
    out.push_str(name);
    write_attrs(attrs, Dialect::Html, &mut out);
    out.push('>');
    out
}

fn write_node(n: &Markup, dialect: Dialect, out: &mut String) {
    match n {
        Markup::Text(t) => escape_text(t, out),
        Markup::Element { name, attrs } => {
            out.push('<');
            out.push_str(name);
            write_attrs(attrs, dialect, out);
            out.push_str(match dialect {
                Dialect::Html => ">",
                Dialect::Xml => "/>",
            });
        }
        Markup::Env { name, attrs, body } => {
            out.push('<');
            out.push_str(name);
            write_attrs(attrs, dialect, out);
            out.push('>');
            for b in body {
                write_node(b, dialect, out);
            }
            out.push_str("</");
            out.push_str(name);
            out.push('>');
        }
        Markup::Comment(c) => {
            out.push_str("<!-- ");
            out.push_str(c);
            out.push_str(" -->");
        }
        Markup::Declaration(d) => {
            // `<?...?>` processing instructions are kept as declarations
            // whose text starts with '?'.
            out.push_str(if d.starts_with('?') { "<" } else { "<!" });
            out.push_str(d);
            out.push('>');
        }
        Markup::Raw(r) => out.push_str(r),
        Markup::Seq(items) => items.iter().for_each(|i| write_node(i, dialect, out)),
        Markup::Slot(s) => {
            if let Some(b) = s.binding() {
                write_node(b, dialect, out);
            }
        }
        Markup::Sugar(_) => {}
    }
}

fn write_attrs(attrs: &[Attr], dialect: Dialect, out: &mut String) {
    for a in attrs {
        out.push(' ');
        match a {
            Attr::Flag(n) => {
                out.push_str(n);
                if dialect == Dialect::Xml {
                    out.push_str("=\"");
                    escape_attr(n, out);
                    out.push('"');
                }
            }
            Attr::Pair(n, v) => {
                out.push_str(n);
                out.push_str("=\"");
                escape_attr(v, out);
                out.push('"');
            }
        }
    }
}

fn escape_text(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '&' => out.push_str("&amp;"),
            c => out.push(c),
        }
    }
}

fn escape_attr(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
}

pub fn decode_latin1(bytes: &[u8]) -> String {
    bytes.iter().map(|&b| b as char).collect()
}

pub fn encode_latin1(s: &str) -> Vec<u8> {
    let mut out = Vec::with_capacity(s.len());
    for c in s.chars() {
        let code = c as u32;
        if code <= 0xFF {
            out.push(code as u8);
        } else {
            out.extend_from_slice(format!("&#{code};").as_bytes());
        }
    }
    out
}

/// Parses markup text into a normalized term list.
pub fn parse(text: &str, dialect: Dialect) -> Result<Vec<Markup>, CodecError> {
    parse_impl(text, dialect, None)
}

/// Parses ISO-8859-1 bytes.
pub fn parse_bytes(bytes: &[u8], dialect: Dialect) -> Result<Vec<Markup>, CodecError> {
    parse(&decode_latin1(bytes), dialect)
}

/// Parse with template slot extraction: every explicitly closed `<V>name</V>`
/// becomes the dictionary's slot for `name`.
pub(crate) fn parse_template_impl(
    text: &str,
    dialect: Dialect,
    dict: &mut TemplateDict,
) -> Result<Vec<Markup>, CodecError> {
    parse_impl(text, dialect, Some(dict))
}

struct Frame {
    name: String,
    attrs: Vec<Attr>,
    body: Vec<Markup>,
}

struct Builder<'d> {
    dialect: Dialect,
    stack: Vec<Frame>,
    root: Vec<Markup>,
    dict: Option<&'d mut TemplateDict>,
}

impl Builder<'_> {
    fn target(&mut self) -> &mut Vec<Markup> {
        match self.stack.last_mut() {
            Some(f) => &mut f.body,
            None => &mut self.root,
        }
    }

    fn push(&mut self, node: Markup) {
        let target = self.target();
        if let Markup::Text(t) = &node {
            if t.is_empty() {
                return;
            }
            if let Some(Markup::Text(prev)) = target.last_mut() {
                prev.push_str(t);
                return;
            }
        }
        target.push(node);
    }

    fn push_text(&mut self, s: &str) {
        if !s.is_empty() {
            self.push(Markup::Text(s.to_string()));
        }
    }

    fn close_top(&mut self, explicit: bool) {
        let f = self.stack.pop().expect("open frame");
        let node = match &mut self.dict {
            Some(dict) if explicit && f.name.eq_ignore_ascii_case("v") => match f.body.as_slice() {
                [Markup::Text(t)] if !t.trim().is_empty() => Markup::Slot(dict.slot_for(t.trim())),
                _ => env_of(f),
            },
            _ => env_of(f),
        };
        self.push(node);
    }

    fn names_match(&self, a: &str, b: &str) -> bool {
        match self.dialect {
            Dialect::Html => a.eq_ignore_ascii_case(b),
            Dialect::Xml => a == b,
        }
    }

    fn end_tag(&mut self, name: &str, offset: usize) -> Result<(), CodecError> {
        match self.dialect {
            Dialect::Html => {
                if let Some(i) = self.stack.iter().rposition(|f| self.names_match(&f.name, name)) {
                    while self.stack.len() > i + 1 {
                        self.close_top(false);
                    }
                    self.close_top(true);
                }
                Ok(())
            }
            Dialect::Xml => match self.stack.last() {
                Some(f) if f.name == name => {
                    self.close_top(true);
                    Ok(())
                }
                Some(f) => Err(CodecError::XmlSyntax {
                    offset,
                    message: format!("</{name}> does not close <{}>", f.name),
                }),
                None => Err(CodecError::XmlSyntax {
                    offset,
                    message: format!("</{name}> has no open element"),
                }),
            },
        }
    }

    fn finish(mut self, len: usize) -> Result<Vec<Markup>, CodecError> {
        if self.dialect == Dialect::Xml {
            if let Some(f) = self.stack.last() {
                return Err(CodecError::XmlSyntax {
                    offset: len,
                    message: format!("<{}> is never closed", f.name),
                });
            }
        }
        while !self.stack.is_empty() {
            self.close_top(false);
        }
        Ok(self.root)
    }
}

fn env_of(f: Frame) -> Markup {
    Markup::Env {
        name: f.name,
        attrs: f.attrs,
        body: f.body,
    }
}

fn is_name_char(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b':' | b'.')
}

fn find_from(text: &str, from: usize, pat: &str) -> Option<usize> {
    text[from..].find(pat).map(|i| i + from)
}

fn parse_impl(
    text: &str,
    dialect: Dialect,
    dict: Option<&mut TemplateDict>,
) -> Result<Vec<Markup>, CodecError> {
    let bytes = text.as_bytes();
    let len = bytes.len();
    let mut b = Builder {
        dialect,
        stack: Vec::new(),
        root: Vec::new(),
        dict,
    };
    let fold = |s: &str| match dialect {
        Dialect::Html => s.to_ascii_lowercase(),
        Dialect::Xml => s.to_string(),
    };
    let mut pos = 0;
    while pos < len {
        let lt = find_from(text, pos, "<").unwrap_or(len);
        if lt > pos {
            b.push_text(&decode_entities(&text[pos..lt]));
        }
        pos = lt;
        if pos >= len {
            break;
        }
        let rest = &text[pos..];
        let next = bytes.get(pos + 1).copied();
        if rest.starts_with("<!--") {
            let (content, end) = match find_from(text, pos + 4, "-->") {
                Some(e) => (&text[pos + 4..e], e + 3),
                None => (&text[pos + 4..], len),
            };
            let content = content.strip_prefix(' ').unwrap_or(content);
            let content = content.strip_suffix(' ').unwrap_or(content);
            b.push(Markup::Comment(content.to_string()));
            pos = end;
        } else if next == Some(b'!') || next == Some(b'?') {
            let start = if next == Some(b'!') { pos + 2 } else { pos + 1 };
            let (content, end) = match find_from(text, start, ">") {
                Some(e) => (&text[start..e], e + 1),
                None => (&text[start..], len),
            };
            b.push(Markup::Declaration(content.to_string()));
            pos = end;
        } else if next == Some(b'/') && bytes.get(pos + 2).is_some_and(u8::is_ascii_alphabetic) {
            let name_start = pos + 2;
            let mut i = name_start;
            while i < len && is_name_char(bytes[i]) {
                i += 1;
            }
            let name = fold(&text[name_start..i]);
            let end = find_from(text, i, ">").map_or(len, |e| e + 1);
            b.end_tag(&name, pos)?;
            pos = end;
        } else if next.is_some_and(|c| c.is_ascii_alphabetic()) {
            let (tag, end) = parse_start_tag(text, pos + 1, dialect);
            pos = end;
            let name = fold(&tag.name);
            let element = match dialect {
                Dialect::Html => is_void(&name),
                Dialect::Xml => tag.self_closing,
            };
            if element {
                b.push(Markup::Element {
                    name,
                    attrs: tag.attrs,
                });
            } else if tag.self_closing {
                b.push(Markup::Env {
                    name,
                    attrs: tag.attrs,
                    body: Vec::new(),
                });
            } else {
                b.stack.push(Frame {
                    name,
                    attrs: tag.attrs,
                    body: Vec::new(),
                });
            }
        } else {
            b.push_text("<");
            pos += 1;
        }
    }
    b.finish(len)
}

struct StartTag {
    name: String,
    attrs: Vec<Attr>,
    self_closing: bool,
}

/// Parses from just after `<`. Returns the tag and the offset after `>`
/// (or end of input).
fn parse_start_tag(text: &str, mut i: usize, dialect: Dialect) -> (StartTag, usize) {
    let bytes = text.as_bytes();
    let len = bytes.len();
    let start = i;
    while i < len && is_name_char(bytes[i]) {
        i += 1;
    }
    let mut tag = StartTag {
        name: text[start..i].to_string(),
        attrs: Vec::new(),
        self_closing: false,
    };
    loop {
        while i < len && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i >= len {
            return (tag, len);
        }
        match bytes[i] {
            b'>' => return (tag, i + 1),
            b'/' if bytes.get(i + 1) == Some(&b'>') => {
                tag.self_closing = true;
                return (tag, i + 2);
            }
            b'/' | b'"' | b'\'' | b'<' | b'=' => {
                i += 1;
                continue;
            }
            _ => {}
        }
        let name_start = i;
        while i < len
            && !bytes[i].is_ascii_whitespace()
            && !matches!(bytes[i], b'=' | b'>' | b'/' | b'"' | b'\'' | b'<')
        {
            i += 1;
        }
        let raw_name = &text[name_start..i];
        let name = match dialect {
            Dialect::Html => raw_name.to_ascii_lowercase(),
            Dialect::Xml => raw_name.to_string(),
        };
        let mut j = i;
        while j < len && bytes[j].is_ascii_whitespace() {
            j += 1;
        }
        if j < len && bytes[j] == b'=' {
            j += 1;
            while j < len && bytes[j].is_ascii_whitespace() {
                j += 1;
            }
            let (value, end) = match bytes.get(j) {
                Some(&q @ (b'"' | b'\'')) => {
                    let close = find_from(text, j + 1, if q == b'"' { "\"" } else { "'" });
                    match close {
                        Some(c) => (&text[j + 1..c], c + 1),
                        None => (&text[j + 1..], len),
                    }
                }
                _ => {
                    let mut k = j;
                    while k < len && !bytes[k].is_ascii_whitespace() && bytes[k] != b'>' {
                        k += 1;
                    }
                    (&text[j..k], k)
                }
            };
            tag.attrs.push(Attr::Pair(name, decode_entities(value)));
            i = end;
        } else {
            tag.attrs.push(Attr::Flag(name));
        }
    }
}

/// Decodes the four core named entities and numeric references.
pub fn decode_entities(s: &str) -> String {
    if !s.contains('&') {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        match decode_one(rest) {
            Some((c, used)) => {
                out.push(c);
                rest = &rest[used..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn decode_one(s: &str) -> Option<(char, usize)> {
    let semi = s.bytes().take(12).position(|b| b == b';')?;
    let body = &s[1..semi];
    let c = match body {
        "lt" => '<',
        "gt" => '>',
        "amp" => '&',
        "quot" => '"',
        _ => {
            let num = body.strip_prefix('#')?;
            let code = match num.strip_prefix(['x', 'X']) {
                Some(hex) if !hex.is_empty() && hex.bytes().all(|b| b.is_ascii_hexdigit()) => {
                    u32::from_str_radix(hex, 16).ok()?
                }
                Some(_) => return None,
                None if !num.is_empty() && num.bytes().all(|b| b.is_ascii_digit()) => {
                    num.parse().ok()?
                }
                None => return None,
            };
            char::from_u32(code)?
        }
    };
    Some((c, semi + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sugar::{image, heading};

    fn html(s: &str) -> Vec<Markup> {
        parse(s, Dialect::Html).unwrap()
    }

    #[test]
    fn renders_elements_and_environments() {
        let img = Markup::element(
            "img",
            vec![
                Attr::pair("src", "images/map.gif"),
                Attr::pair("alt", "A map"),
                Attr::flag("ismap"),
            ],
        );
        assert_eq!(
            render(&img, Dialect::Html).unwrap(),
            r#"<img src="images/map.gif" alt="A map" ismap>"#
        );
        assert_eq!(
            render(&img, Dialect::Xml).unwrap(),
            r#"<img src="images/map.gif" alt="A map" ismap="ismap"/>"#
        );
        let addr = Markup::env("address", vec![], vec!["clip@dia.fi.upm.es".into()]);
        assert_eq!(
            render(&addr, Dialect::Html).unwrap(),
            "<address>clip@dia.fi.upm.es</address>"
        );
    }

    #[test]
    fn escaping() {
        let t = Markup::env(
            "p",
            vec![Attr::pair("title", "a\"b&c<d")],
            vec!["1 < 2 & 3 > \"x\"".into()],
        );
        let s = render(&t, Dialect::Html).unwrap();
        assert_eq!(s, "<p title=\"a&quot;b&amp;c<d\">1 &lt; 2 &amp; 3 &gt; \"x\"</p>");
        assert_eq!(html(&s), vec![t]);
    }

    #[test]
    fn stream_matches_render() {
        let doc = Markup::seq(vec![image("phone.gif"), heading(2, "Telephone database")]);
        let mut sink = Vec::new();
        render_to_stream(&doc, Dialect::Html, &mut sink).unwrap();
        assert_eq!(sink, render(&doc, Dialect::Html).unwrap().into_bytes());

        let mut empty = Vec::new();
        render_to_stream(&Markup::seq(vec![]), Dialect::Html, &mut empty).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn render_is_a_homomorphism_over_lists() {
        let a = heading(1, "x");
        let b = Markup::text("y&");
        assert_eq!(
            render(&Markup::seq(vec![a.clone(), b.clone()]), Dialect::Html).unwrap(),
            render(&a, Dialect::Html).unwrap() + &render(&b, Dialect::Html).unwrap()
        );
    }

    #[test]
    fn unbound_slot_is_an_error() {
        let s = crate::markup::new_slot();
        assert!(matches!(
            render(&Markup::slot(&s), Dialect::Html),
            Err(CodecError::Markup(MarkupError::UnboundSlot(_)))
        ));
    }

    #[test]
    fn parses_basic_documents() {
        assert_eq!(html(""), vec![]);
        assert_eq!(
            html(r#"<img src="phone.gif">"#),
            vec![Markup::element("img", vec![Attr::pair("src", "phone.gif")])]
        );
        assert_eq!(
            html("<H2>Telephone database</H2>"),
            vec![Markup::env("h2", vec![], vec!["Telephone database".into()])]
        );
        assert_eq!(
            html("<!-- hi --><!DOCTYPE html><?xml v?>"),
            vec![
                Markup::comment("hi"),
                Markup::declaration("DOCTYPE html"),
                Markup::declaration("?xml v?")
            ]
        );
    }

    #[test]
    fn attribute_forms() {
        assert_eq!(
            html("<input TYPE=text name='n' size = \"20\" checked/>"),
            vec![Markup::element(
                "input",
                vec![
                    Attr::pair("type", "text"),
                    Attr::pair("name", "n"),
                    Attr::pair("size", "20"),
                    Attr::flag("checked")
                ]
            )]
        );
        assert_eq!(
            html("<a href=\"x?a=1&amp;b=2\">"),
            vec![Markup::env("a", vec![Attr::pair("href", "x?a=1&b=2")], vec![])]
        );
    }

    #[test]
    fn entities() {
        assert_eq!(decode_entities("&lt;&#65;&#x42;&amp;&nbsp;&zz"), "<AB&&nbsp;&zz");
        assert_eq!(decode_entities("&#xD800;"), "&#xD800;");
        assert_eq!(decode_entities("&ab\u{e9}\u{e9}\u{e9}\u{e9}\u{e9};"), "&ab\u{e9}\u{e9}\u{e9}\u{e9}\u{e9};");
        assert_eq!(html("a&amp;b"), vec![Markup::text("a&b")]);
    }

    #[test]
    fn recovery() {
        // unmatched end tag dropped, surrounding text merged
        assert_eq!(html("a</x>b"), vec![Markup::text("ab")]);
        // unclosed inner closed with its parent
        assert_eq!(
            html("<div><b>x</div>y"),
            vec![
                Markup::env("div", vec![], vec![Markup::env("b", vec![], vec!["x".into()])]),
                "y".into()
            ]
        );
        // no sibling inference: paragraphs nest
        assert_eq!(
            html("<p>a<p>b"),
            vec![Markup::env(
                "p",
                vec![],
                vec!["a".into(), Markup::env("p", vec![], vec!["b".into()])]
            )]
        );
        // stray angle brackets are text
        assert_eq!(html("1 < 2 <> </ 3"), vec![Markup::text("1 < 2 <> </ 3")]);
        // truncated tags and comments
        assert_eq!(html("<!-- open"), vec![Markup::comment("open")]);
        assert_eq!(
            html("<a href=\"x"),
            vec![Markup::env("a", vec![Attr::pair("href", "x")], vec![])]
        );
    }

    #[test]
    fn xml_mode() {
        let doc = parse("<Note id='1'><To>A</To><br/></Note>", Dialect::Xml).unwrap();
        assert_eq!(
            doc,
            vec![Markup::Env {
                name: "Note".into(),
                attrs: vec![Attr::pair("id", "1")],
                body: vec![
                    Markup::Env {
                        name: "To".into(),
                        attrs: vec![],
                        body: vec!["A".into()]
                    },
                    Markup::Element {
                        name: "br".into(),
                        attrs: vec![]
                    }
                ]
            }]
        );
        assert_eq!(
            serialize(&doc, Dialect::Xml),
            "<Note id=\"1\"><To>A</To><br/></Note>"
        );
        assert!(matches!(
            parse("<a><b></a>", Dialect::Xml),
            Err(CodecError::XmlSyntax { offset: 6, .. })
        ));
        assert!(parse("<a>", Dialect::Xml).is_err());
        assert!(parse("</a>", Dialect::Xml).is_err());
    }

    #[test]
    fn latin1_bytes() {
        let bytes = b"<p>caf\xe9</p>";
        let doc = parse_bytes(bytes, Dialect::Html).unwrap();
        assert_eq!(doc, vec![Markup::env("p", vec![], vec!["caf\u{e9}".into()])]);
        assert_eq!(render_bytes(&Markup::Seq(doc), Dialect::Html).unwrap(), bytes.to_vec());
        assert_eq!(encode_latin1("\u{263a}"), b"&#9786;".to_vec());
    }
}
