//! Finds the links of one page that fail when followed.
//!
//! Links are the `href` of every `a` environment, searched depth-first
//! through other environments but not inside the anchors themselves.
//! References that do not resolve to an http URL are skipped. Each link is
//! probed with a HEAD request; probes run on a bounded pool of threads and
//! results are reported in document order.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use thiserror::Error;

use crate::codec::{parse_bytes, Dialect};
use crate::http::{content_of, content_type_of, fetch, status_of, HttpError, RequestOption, StatusClass};
use crate::markup::{attr_value, Markup};
use crate::url::{url_info, url_info_relative, UrlError, UrlInfo};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadLink {
    /// The reference as written in the page.
    pub link: String,
    /// The server's reason phrase, `Timeout`, or the transport error.
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct LinkCheckConfig {
    pub probe_timeout_secs: u64,
    pub workers: usize,
}

impl Default for LinkCheckConfig {
    fn default() -> Self {
        LinkCheckConfig {
            probe_timeout_secs: 20,
            workers: 8,
        }
    }
}

#[derive(Debug, Error)]
pub enum LinkCheckError {
    #[error(transparent)]
    Url(#[from] UrlError),
    #[error(transparent)]
    Fetch(#[from] HttpError),
    #[error("{url}: {code} {phrase}")]
    Status { url: String, code: u16, phrase: String },
    #[error("{0} is not an HTML document")]
    NotHtml(String),
}

pub fn check_links(url: &str) -> Result<Vec<BadLink>, LinkCheckError> {
    check_links_with(url, &LinkCheckConfig::default())
}

pub fn check_links_with(url: &str, config: &LinkCheckConfig) -> Result<Vec<BadLink>, LinkCheckError> {
    let base = url_info(url)?;
    let response = fetch(&base, &[])?;
    if let Some((class, code, phrase)) = status_of(&response) {
        if class != StatusClass::Success {
            return Err(LinkCheckError::Status {
                url: base.to_string(),
                code,
                phrase: phrase.to_string(),
            });
        }
    }
    if content_type_of(&response) != Some(("text", "html")) {
        return Err(LinkCheckError::NotHtml(base.to_string()));
    }
    let terms = parse_bytes(content_of(&response).unwrap_or_default(), Dialect::Html)
        .expect("HTML mode parsing is total");
    Ok(check_page_links(&terms, &base, config))
}

/// The `href` of every anchor, in document order.
pub fn collect_links(terms: &[Markup]) -> Vec<String> {
    fn walk(terms: &[Markup], out: &mut Vec<String>) {
        for t in terms {
            match t {
                Markup::Env { name, attrs, body } => match attr_value(attrs, "href") {
                    Some(href) if name == "a" => out.push(href.to_string()),
                    _ => walk(body, out),
                },
                Markup::Seq(items) => walk(items, out),
                Markup::Slot(s) => walk(s.binding().map(std::slice::from_ref).unwrap_or_default(), out),
                _ => {}
            }
        }
    }
    let mut out = Vec::new();
    walk(terms, &mut out);
    out
}

pub fn check_page_links(terms: &[Markup], base: &UrlInfo, config: &LinkCheckConfig) -> Vec<BadLink> {
    let targets: Vec<(String, UrlInfo)> = collect_links(terms)
        .into_iter()
        .filter_map(|link| {
            let url = url_info_relative(&link, base).ok()?;
            Some((link, url))
        })
        .collect();
    let results: Mutex<Vec<Option<BadLink>>> = Mutex::new(vec![None; targets.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..config.workers.max(1).min(targets.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some((link, url)) = targets.get(i) else { break };
                if let Some(reason) = probe(url, config.probe_timeout_secs) {
                    results.lock().unwrap()[i] = Some(BadLink {
                        link: link.clone(),
                        reason,
                    });
                }
            });
        }
    });
    results.into_inner().unwrap().into_iter().flatten().collect()
}

/// `None` when the link is good, otherwise the reason it is bad.
fn probe(url: &UrlInfo, timeout_secs: u64) -> Option<String> {
    match fetch(url, &[RequestOption::Head, RequestOption::Timeout(timeout_secs)]) {
        Ok(response) => match status_of(&response) {
            Some((StatusClass::Success, _, _)) => None,
            Some((_, _, phrase)) => Some(phrase.to_string()),
            None => Some("no status".into()),
        },
        Err(HttpError::Timeout) => Some("Timeout".into()),
        Err(e) => Some(e.to_string()),
    }
}
