#![allow(dead_code)]

use std::path::PathBuf;

use proptest::prelude::*;
use termweb::codec::is_void;
use termweb::markup::{Attr, Markup};

pub const VOID: [&str; 9] = ["img", "br", "hr", "input", "meta", "link", "base", "area", "param"];

pub fn corpus() -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "html"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

pub fn corpus_file(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(name);
    std::fs::read_to_string(path).unwrap()
}

/// Merges adjacent texts and drops empty ones, as the parser does.
pub fn merge_texts(items: Vec<Markup>) -> Vec<Markup> {
    let mut out: Vec<Markup> = Vec::new();
    for item in items {
        match (item, out.last_mut()) {
            (Markup::Text(t), _) if t.is_empty() => {}
            (Markup::Text(t), Some(Markup::Text(prev))) => prev.push_str(&t),
            (item, _) => out.push(item),
        }
    }
    out
}

fn text() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9 &<>\"'=/!?;#\n\t\u{e9}\u{20ac}-]{1,12}"
}

fn env_name() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9]{0,4}".prop_filter("void names are elements; v marks slots", |n| !is_void(n) && n != "v")
}

fn attrs() -> impl Strategy<Value = Vec<Attr>> {
    proptest::collection::btree_map("[a-z][a-z0-9-]{0,5}", proptest::option::of("[a-zA-Z0-9 &<>\"'=/;#\u{e9}-]{0,10}"), 0..=4)
        .prop_map(|m| {
            m.into_iter()
                .map(|(n, v)| match v {
                    Some(v) => Attr::Pair(n, v),
                    None => Attr::Flag(n),
                })
                .collect::<Vec<_>>()
        })
        .prop_shuffle()
}

/// A normalized node tree with at most `depth` levels of environments.
pub fn node(depth: u32, declarations: bool) -> BoxedStrategy<Markup> {
    let element = (proptest::sample::select(&VOID[..]), attrs()).prop_map(|(n, a)| Markup::element(n, a));
    let comment = "[a-zA-Z0-9 .,]{0,10}".prop_map(Markup::Comment);
    let leaf = if declarations {
        let decl = "[A-Za-z][A-Za-z0-9 \"/.-]{0,12}".prop_map(Markup::Declaration);
        prop_oneof![3 => text().prop_map(Markup::Text), 2 => element, 1 => comment, 1 => decl].boxed()
    } else {
        prop_oneof![3 => text().prop_map(Markup::Text), 2 => element, 1 => comment].boxed()
    };
    leaf.prop_recursive(depth.saturating_sub(1), 96, 6, |inner| {
        (env_name(), attrs(), proptest::collection::vec(inner, 0..6))
            .prop_map(|(n, a, b)| Markup::env(&n, a, merge_texts(b)))
    })
    .boxed()
}

pub fn document(depth: u32, declarations: bool) -> impl Strategy<Value = Vec<Markup>> {
    proptest::collection::vec(node(depth, declarations), 0..8).prop_map(merge_texts)
}

pub fn depth_of(items: &[Markup]) -> usize {
    items
        .iter()
        .map(|m| match m {
            Markup::Env { body, .. } => 1 + depth_of(body),
            _ => 1,
        })
        .max()
        .unwrap_or(0)
}

/// The form-producing goal, in functional notation.
pub const FORM_GOAL: &str = r"[start, title('Telephone database'), heading(2,'Telephone database'), '$',
 start_form('http://www.clip.dia.fi.upm.es/cgi-bin/phone_db.pl'),
 'Click here, enter name of clip member, and press Return:', '\\\\',
 input(text,['='(name,person_name),'='(size,20)]), end_form, end]";

pub fn eval(text: &str) -> Markup {
    termweb::convert::markup_from_value(&termweb::term::parse_term(text).unwrap())
}

/// Trims texts and drops blank ones, for whitespace-insensitive comparison.
pub fn squeeze(items: &[Markup]) -> Vec<Markup> {
    items
        .iter()
        .filter_map(|m| match m {
            Markup::Text(t) if t.trim().is_empty() => None,
            Markup::Text(t) => Some(Markup::Text(t.split_whitespace().collect::<Vec<_>>().join(" "))),
            Markup::Env { name, attrs, body } => Some(Markup::Env {
                name: name.clone(),
                attrs: attrs.clone(),
                body: squeeze(body),
            }),
            other => Some(other.clone()),
        })
        .collect()
}

pub fn post(content_type: &str, body: &[u8]) -> termweb::forms::CgiEnv {
    termweb::forms::CgiEnv {
        request_method: Some("POST".into()),
        content_type: Some(content_type.into()),
        content_length: Some(body.len().to_string()),
        ..Default::default()
    }
}

/// A two-part body written out by hand: one text field, one file.
pub const MULTIPART_BOUNDARY: &str = "----formdata7d4a6";
pub const MULTIPART_BODY: &str = "------formdata7d4a6\r\n\
Content-Disposition: form-data; name=\"person_name\"\r\n\
\r\n\
daniel\r\n\
------formdata7d4a6\r\n\
Content-Disposition: form-data; name=\"notes\"; filename=\"notes.txt\"\r\n\
Content-Type: text/plain\r\n\
\r\n\
first line\r\nsecond line\r\n\r\n\
------formdata7d4a6--\r\n";

pub fn form_dict_strategy() -> impl Strategy<Value = termweb::forms::FormDict> {
    use termweb::forms::{FormDict, FormValue};
    proptest::collection::vec(
        ("[a-z_][a-z0-9_ &=+%\u{e9}]{0,8}", "[a-zA-Z0-9 &=+%./?#\u{e9}\u{20ac}-]{0,10}"),
        0..8,
    )
    .prop_map(|pairs| {
        pairs
            .into_iter()
            .map(|(k, v)| (k, FormValue::classify(&v)))
            .collect::<FormDict>()
    })
}

/// Canonical URLs: lowercase host, no dot segments, no fragment.
pub fn url_info_strategy() -> impl Strategy<Value = termweb::url::UrlInfo> {
    let label = "[a-z]([a-z0-9-]{0,6}[a-z0-9])?";
    let host = proptest::collection::vec(label, 1..4).prop_map(|l| l.join("."));
    let segment = "[A-Za-z0-9_~%+,;=-]{1,8}(\\.[a-z]{1,4})?";
    let path = (proptest::collection::vec(segment, 0..5), any::<bool>()).prop_map(|(segs, dir)| {
        let mut p = format!("/{}", segs.join("/"));
        if dir && !segs.is_empty() {
            p.push('/');
        }
        p
    });
    let query = proptest::option::of("[a-z0-9=&%+]{0,10}").prop_map(|q| q.map(|q| format!("?{q}")).unwrap_or_default());
    (host, 1..=u16::MAX, path, query).prop_map(|(h, port, p, q)| termweb::url::UrlInfo::new(h, port, p + &q))
}

pub const SLOT_NAMES: [&str; 3] = ["response", "title", "footer"];

/// A `<V>name</V>` slot marker as a tree node.
pub fn hole(name: &str) -> Markup {
    Markup::env("v", vec![], vec![Markup::text(name)])
}

/// A document with slot markers among its nodes.
pub fn template_tree() -> impl Strategy<Value = Vec<Markup>> {
    let leaf = prop_oneof![
        3 => node(1, false),
        2 => proptest::sample::select(&SLOT_NAMES[..]).prop_map(hole),
    ];
    let tree = leaf.prop_recursive(4, 64, 5, |inner| {
        (env_name(), attrs(), proptest::collection::vec(inner, 0..5))
            .prop_map(|(n, a, b)| Markup::env(&n, a, merge_texts(b)))
    });
    proptest::collection::vec(tree, 1..6).prop_map(merge_texts)
}

pub fn slot_bindings() -> impl Strategy<Value = Vec<(String, Vec<Markup>)>> {
    proptest::collection::vec(document(3, false), SLOT_NAMES.len())
        .prop_map(|docs| SLOT_NAMES.iter().map(|n| n.to_string()).zip(docs).collect())
}

/// The tree with every slot marker replaced by its binding.
pub fn splice(items: &[Markup], bindings: &[(String, Vec<Markup>)]) -> Vec<Markup> {
    let mut out = Vec::new();
    for m in items {
        match m {
            Markup::Env { name, body, .. } if name == "v" => {
                let Some(Markup::Text(slot)) = body.first() else { unreachable!() };
                let (_, b) = bindings.iter().find(|(n, _)| n == slot).unwrap();
                out.extend(b.iter().cloned());
            }
            Markup::Env { name, attrs, body } => out.push(Markup::Env {
                name: name.clone(),
                attrs: attrs.clone(),
                body: splice(body, bindings),
            }),
            other => out.push(other.clone()),
        }
    }
    out
}

/// Fills the template text of `tree` and checks that rendering it equals,
/// after reparsing, the spliced document.
pub fn check_splice(tree: &[Markup], bindings: &[(String, Vec<Markup>)]) -> Result<(), String> {
    use termweb::codec::{parse, render_all, Dialect};
    let text = render_all(tree, Dialect::Html).map_err(|e| e.to_string())?;
    let (terms, dict) = termweb::template::parse_template(&text);
    let used: Vec<(&str, Markup)> = bindings
        .iter()
        .filter(|(n, _)| dict.get(n).is_some())
        .map(|(n, b)| (n.as_str(), Markup::Seq(b.clone())))
        .collect();
    termweb::template::fill(&dict, &used).map_err(|e| e.to_string())?;
    let filled = render_all(&terms, Dialect::Html).map_err(|e| e.to_string())?;
    let spliced = render_all(&splice(tree, bindings), Dialect::Html).map_err(|e| e.to_string())?;
    let a = parse(&filled, Dialect::Html).map_err(|e| e.to_string())?;
    let b = parse(&spliced, Dialect::Html).map_err(|e| e.to_string())?;
    if a == b {
        Ok(())
    } else {
        Err(format!("template {text:?}\nfilled  {filled:?}\nspliced {spliced:?}"))
    }
}

pub fn value_strategy() -> impl Strategy<Value = termweb::term::Value> {
    use termweb::term::Value;
    let leaf = prop_oneof![
        any::<i64>().prop_map(Value::Int),
        (-1.0e9..1.0e9f64).prop_map(Value::Float),
        "[a-z][A-Za-z0-9_]{0,5}".prop_map(Value::Atom),
        "[ -~\u{e9}\u{263a}\n\t]{0,8}".prop_map(Value::Atom),
        "[ -~\u{e9}\u{263a}\n\t\u{1}]{0,8}".prop_map(Value::Str),
        Just(Value::Placeholder),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 0..4).prop_map(Value::List),
            ("[a-z][a-z_]{0,4}", proptest::collection::vec(inner, 1..4)).prop_map(|(f, a)| Value::Compound(f, a)),
        ]
    })
}

/// Pure operations whose outcomes depend only on their arguments.
pub fn echo_registry() -> termweb::actmod::Registry<()> {
    use termweb::actmod::{CallOutcome, Registry};
    use termweb::term::Value;
    let mut r = Registry::new(());
    for arity in 1..=3 {
        r = r.query("echo", arity, |_, args| CallOutcome::Success(args.to_vec()));
    }
    r.query("swap", 2, |_, a| CallOutcome::Success(vec![a[1].clone(), a[0].clone()]))
        .query("len", 2, |_, a| match &a[0] {
            Value::List(items) => CallOutcome::Success(vec![a[0].clone(), Value::Int(items.len() as i64)]),
            _ => CallOutcome::Failure,
        })
        .query("fail", 1, |_, _| CallOutcome::Failure)
        .query("err", 1, |_, a| CallOutcome::RemoteError(a[0].to_text()))
        .query("short", 2, |_, a| CallOutcome::Success(vec![a[0].clone()]))
        .query("boom", 0, |_, _| panic!("handler failure"))
}

pub fn goal_strategy() -> impl Strategy<Value = termweb::actmod::GoalCall> {
    const OPS: [&str; 8] = ["echo", "swap", "len", "fail", "err", "short", "boom", "missing"];
    (proptest::sample::select(&OPS[..]), proptest::collection::vec(value_strategy(), 0..4))
        .prop_map(|(op, args)| termweb::actmod::GoalCall::new(op, args))
}

/// A page with five links: two good, one missing, one stalling, one not http.
pub fn link_site() -> termweb_fixture::Fixture {
    use termweb_fixture::{Fixture, Route};
    let page = r#"<html><body><h1>Links</h1>
<ul>
<li><a href="good.html">good</a></li>
<li><a href="/missing.html">missing</a></li>
<li><p><a href="slow.html">slow</a></p></li>
<li><a href="ftp://ftp.example.org/pub/file">ftp</a></li>
<li><a href="sub/../other.html#top">other</a></li>
</ul><a name="end">end</a></body></html>"#;
    Fixture::start([
        ("/site/index.html", Route::html(page)),
        ("/site/good.html", Route::html("good")),
        ("/site/slow.html", Route::stalled()),
        ("/site/other.html", Route::html("other")),
    ])
}
