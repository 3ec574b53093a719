//! HTTP URLs: parsing, printing and resolution of relative references.
//!
//! The document keeps the query and drops the fragment. Dot segments are
//! removed on parse and on resolution; `..` above the root stays at the
//! root. Host names are lowercased.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UrlError {
    #[error("not an http URL: {0}")]
    NotHttp(String),
    #[error("malformed URL {url:?}: {reason}")]
    Malformed { url: String, reason: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UrlInfo {
    pub host: String,
    pub port: u16,
    pub document: String,
}

impl UrlInfo {
    pub fn new(host: impl Into<String>, port: u16, document: impl Into<String>) -> Self {
        UrlInfo {
            host: host.into(),
            port,
            document: document.into(),
        }
    }
}

impl fmt::Display for UrlInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.port == 80 {
            write!(f, "http://{}{}", self.host, self.document)
        } else {
            write!(f, "http://{}:{}{}", self.host, self.port, self.document)
        }
    }
}

pub fn url_text(info: &UrlInfo) -> String {
    info.to_string()
}

/// Length of a leading `scheme:` if present.
fn scheme_len(s: &str) -> Option<usize> {
    let colon = s.find(':')?;
    let scheme = &s[..colon];
    let mut chars = scheme.chars();
    let first = chars.next()?;
    (first.is_ascii_alphabetic()
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')))
    .then_some(colon)
}

pub fn url_info(url: &str) -> Result<UrlInfo, UrlError> {
    let url = url.trim();
    let malformed = |reason| UrlError::Malformed {
        url: url.to_string(),
        reason,
    };
    let colon = scheme_len(url).ok_or_else(|| malformed("no scheme"))?;
    if !url[..colon].eq_ignore_ascii_case("http") {
        return Err(UrlError::NotHttp(url.to_string()));
    }
    let rest = url[colon + 1..]
        .strip_prefix("//")
        .ok_or_else(|| malformed("missing //"))?;
    let auth_end = rest.find(['/', '?', '#']).unwrap_or(rest.len());
    let authority = &rest[..auth_end];
    if authority.contains('@') {
        return Err(malformed("user information is not supported"));
    }
    let (host, port) = match authority.rsplit_once(':') {
        Some((h, "")) => (h, 80),
        Some((h, p)) => {
            let port = Some(p)
                .filter(|p| p.bytes().all(|b| b.is_ascii_digit()))
                .and_then(|p| p.parse::<u16>().ok())
                .filter(|&p| p > 0)
                .ok_or_else(|| malformed("bad port"))?;
            (h, port)
        }
        None => (authority, 80),
    };
    if host.is_empty() {
        return Err(malformed("empty host"));
    }
    if host.contains(['[', ']', ' ']) {
        return Err(malformed("bad host"));
    }
    let (path, query) = split_document(&rest[auth_end..]);
    let path = if path.is_empty() { "/" } else { path };
    Ok(UrlInfo::new(
        host.to_ascii_lowercase(),
        port,
        format!("{}{}", remove_dot_segments(path), query),
    ))
}

/// Splits `path?query#fragment` into the path and the `?query` suffix.
fn split_document(s: &str) -> (&str, &str) {
    let s = s.split('#').next().unwrap_or("");
    match s.find('?') {
        Some(q) => (&s[..q], &s[q..]),
        None => (s, ""),
    }
}

/// Resolves `path` (which starts with `/`) to one without `.` or `..`
/// segments.
pub fn remove_dot_segments(path: &str) -> String {
    let segs: Vec<&str> = path.split('/').skip(1).collect();
    let mut out: Vec<&str> = Vec::with_capacity(segs.len());
    for (i, s) in segs.iter().enumerate() {
        let last = i + 1 == segs.len();
        match *s {
            "." => {}
            ".." => {
                out.pop();
            }
            s => {
                out.push(s);
                continue;
            }
        }
        if last {
            out.push("");
        }
    }
    format!("/{}", out.join("/"))
}

/// Resolves a reference found in the page at `base`.
pub fn url_info_relative(reference: &str, base: &UrlInfo) -> Result<UrlInfo, UrlError> {
    let r = reference.trim();
    if scheme_len(r).is_some() {
        return url_info(r);
    }
    if r.starts_with("//") {
        return url_info(&format!("http:{r}"));
    }
    let (path, query) = split_document(r);
    let (base_path, base_query) = split_document(&base.document);
    let document = if path.is_empty() {
        if query.is_empty() {
            format!("{base_path}{base_query}")
        } else {
            format!("{base_path}{query}")
        }
    } else if path.starts_with('/') {
        format!("{}{query}", remove_dot_segments(path))
    } else {
        let dir = &base_path[..base_path.rfind('/').map_or(0, |i| i + 1)];
        let dir = if dir.is_empty() { "/" } else { dir };
        format!("{}{query}", remove_dot_segments(&format!("{dir}{path}")))
    };
    Ok(UrlInfo::new(base.host.clone(), base.port, document))
}
