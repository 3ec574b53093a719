//! HTTP/1.0 document fetching.
//!
//! One connection per fetch, closed by the server after the response.
//! Redirects are returned as `Location` and never followed. Responses are
//! a list of [`ResponseParam`]: the status first, then one entry per header
//! line in arrival order, then the body unless the request was `Head`.
//! Header values the client cannot interpret are kept as `GenericField`.

mod date;

use std::io::{ErrorKind, Read, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::url::UrlInfo;

pub use date::{format_http_date, parse_http_date, HttpDate, Month, Weekday};

pub const DEFAULT_USER_AGENT: &str = "termweb/1.0";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);
pub const DEFAULT_MAX_SIZE: usize = 16 * 1024 * 1024;

#[derive(Debug, Error)]
pub enum HttpError {
    #[error("timed out")]
    Timeout,
    #[error("cannot connect: {0}")]
    ConnectFailed(String),
    #[error("protocol error: {0}")]
    ProtocolError(String),
    #[error("response larger than {0} bytes")]
    OverLimit(usize),
    #[error("bad date: {0}")]
    BadDate(String),
    #[error("bad request option: {0}")]
    InvalidOption(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RequestOption {
    Head,
    /// Whole-request deadline in seconds.
    Timeout(u64),
    IfModifiedSince(HttpDate),
    UserAgent(String),
    Authorization { scheme: String, params: String },
    /// Any other field. `from` is sent as `From`, `x_trace_id` as
    /// `X-Trace-Id`.
    Field { name: String, value: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatusClass {
    Informational,
    Success,
    Redirection,
    RequestError,
    ServerError,
    ExtensionCode,
}

impl StatusClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StatusClass::Informational => "informational",
            StatusClass::Success => "success",
            StatusClass::Redirection => "redirection",
            StatusClass::RequestError => "request_error",
            StatusClass::ServerError => "server_error",
            StatusClass::ExtensionCode => "extension_code",
        }
    }
}

pub fn status_class(code: u16) -> StatusClass {
    match code {
        100..=199 => StatusClass::Informational,
        200..=299 => StatusClass::Success,
        300..=399 => StatusClass::Redirection,
        400..=499 => StatusClass::RequestError,
        500..=599 => StatusClass::ServerError,
        _ => StatusClass::ExtensionCode,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResponseParam {
    Content(Vec<u8>),
    Status { class: StatusClass, code: u16, phrase: String },
    Pragma(String),
    MessageDate(HttpDate),
    Location(String),
    HttpServer(String),
    Allow(Vec<String>),
    LastModified(HttpDate),
    Expires(HttpDate),
    /// Type and subtype are lowercased, as are parameter names.
    ContentType { kind: String, subtype: String, params: Vec<(String, String)> },
    ContentEncoding(String),
    ContentLength(u64),
    /// One challenge per header line, unparsed.
    Authenticate(Vec<String>),
    GenericField { name: String, value: String },
}

impl ResponseParam {
    /// Header name and value as they would appear on the wire. `None` for
    /// status and content.
    pub fn field(&self) -> Option<(String, String)> {
        let date = |d: &HttpDate| format_http_date(d);
        let (n, v) = match self {
            ResponseParam::Content(_) | ResponseParam::Status { .. } => return None,
            ResponseParam::Pragma(p) => ("Pragma", p.clone()),
            ResponseParam::MessageDate(d) => ("Date", date(d)),
            ResponseParam::Location(l) => ("Location", l.clone()),
            ResponseParam::HttpServer(s) => ("Server", s.clone()),
            ResponseParam::Allow(m) => ("Allow", m.join(", ")),
            ResponseParam::LastModified(d) => ("Last-Modified", date(d)),
            ResponseParam::Expires(d) => ("Expires", date(d)),
            ResponseParam::ContentType { kind, subtype, params } => {
                let mut v = format!("{kind}/{subtype}");
                for (k, val) in params {
                    v.push_str(&format!("; {k}={val}"));
                }
                ("Content-Type", v)
            }
            ResponseParam::ContentEncoding(e) => ("Content-Encoding", e.clone()),
            ResponseParam::ContentLength(l) => ("Content-Length", l.to_string()),
            ResponseParam::Authenticate(c) => ("WWW-Authenticate", c.join(", ")),
            ResponseParam::GenericField { name, value } => return Some((name.clone(), value.clone())),
        };
        Some((n.to_string(), v))
    }
}

pub fn status_of(params: &[ResponseParam]) -> Option<(StatusClass, u16, &str)> {
    params.iter().find_map(|p| match p {
        ResponseParam::Status { class, code, phrase } => Some((*class, *code, phrase.as_str())),
        _ => None,
    })
}

pub fn content_of(params: &[ResponseParam]) -> Option<&[u8]> {
    params.iter().find_map(|p| match p {
        ResponseParam::Content(c) => Some(c.as_slice()),
        _ => None,
    })
}

pub fn content_type_of(params: &[ResponseParam]) -> Option<(&str, &str)> {
    params.iter().find_map(|p| match p {
        ResponseParam::ContentType { kind, subtype, .. } => Some((kind.as_str(), subtype.as_str())),
        _ => None,
    })
}

#[derive(Debug, Clone)]
pub struct FetchConfig {
    pub max_size: usize,
}

impl Default for FetchConfig {
    fn default() -> Self {
        FetchConfig {
            max_size: DEFAULT_MAX_SIZE,
        }
    }
}

pub fn fetch(url: &UrlInfo, options: &[RequestOption]) -> Result<Vec<ResponseParam>, HttpError> {
    fetch_with(url, options, &FetchConfig::default())
}

/// `from` → `From`, `x_trace_id` → `X-Trace-Id`.
pub fn field_name(name: &str) -> String {
    name.split(['_', '-'])
        .map(|part| {
            let mut c = part.chars();
            match c.next() {
                Some(f) => f.to_ascii_uppercase().to_string() + &c.as_str().to_ascii_lowercase(),
                None => String::new(),
            }
        })
        .collect::<Vec<_>>()
        .join("-")
}

fn valid_token(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

fn no_newline(field: &str, v: &str) -> Result<(), HttpError> {
    if v.contains(['\r', '\n']) {
        Err(HttpError::InvalidOption(format!("{field} value contains a line break")))
    } else {
        Ok(())
    }
}

/// Builds the request head.
pub fn request_text(url: &UrlInfo, options: &[RequestOption]) -> Result<String, HttpError> {
    let head = options.contains(&RequestOption::Head);
    let mut out = format!(
        "{} {} HTTP/1.0\r\n",
        if head { "HEAD" } else { "GET" },
        url.document
    );
    if url.port == 80 {
        out.push_str(&format!("Host: {}\r\n", url.host));
    } else {
        out.push_str(&format!("Host: {}:{}\r\n", url.host, url.port));
    }
    let agent = options.iter().rev().find_map(|o| match o {
        RequestOption::UserAgent(a) => Some(a.as_str()),
        _ => None,
    });
    let agent = agent.unwrap_or(DEFAULT_USER_AGENT);
    no_newline("User-Agent", agent)?;
    out.push_str(&format!("User-Agent: {agent}\r\n"));
    for o in options {
        match o {
            RequestOption::Head | RequestOption::Timeout(_) | RequestOption::UserAgent(_) => {}
            RequestOption::IfModifiedSince(d) => {
                out.push_str(&format!("If-Modified-Since: {}\r\n", format_http_date(d)));
            }
            RequestOption::Authorization { scheme, params } => {
                no_newline("Authorization", scheme)?;
                no_newline("Authorization", params)?;
                out.push_str(&format!("Authorization: {scheme} {params}\r\n"));
            }
            RequestOption::Field { name, value } => {
                if !valid_token(name) {
                    return Err(HttpError::InvalidOption(format!("bad field name {name:?}")));
                }
                no_newline(name, value)?;
                out.push_str(&format!("{}: {value}\r\n", field_name(name)));
            }
        }
    }
    out.push_str("\r\n");
    Ok(out)
}

fn timeout_of(options: &[RequestOption]) -> Result<Duration, HttpError> {
    let mut timeouts = options.iter().filter_map(|o| match o {
        RequestOption::Timeout(t) => Some(*t),
        _ => None,
    });
    let t = match (timeouts.next(), timeouts.next()) {
        (None, _) => return Ok(DEFAULT_TIMEOUT),
        (Some(_), Some(_)) => return Err(HttpError::InvalidOption("more than one timeout".into())),
        (Some(t), None) => t,
    };
    if t == 0 {
        return Err(HttpError::InvalidOption("timeout must be positive".into()));
    }
    Ok(Duration::from_secs(t))
}

fn is_timeout(e: &std::io::Error) -> bool {
    matches!(e.kind(), ErrorKind::TimedOut | ErrorKind::WouldBlock)
}

fn remaining(deadline: Instant) -> Result<Duration, HttpError> {
    let left = deadline.saturating_duration_since(Instant::now());
    if left.is_zero() {
        Err(HttpError::Timeout)
    } else {
        Ok(left)
    }
}

fn connect(url: &UrlInfo, deadline: Instant) -> Result<TcpStream, HttpError> {
    let addrs = (url.host.as_str(), url.port)
        .to_socket_addrs()
        .map_err(|e| HttpError::ConnectFailed(format!("{}: {e}", url.host)))?;
    let mut last = HttpError::ConnectFailed(format!("{}: no address", url.host));
    for addr in addrs {
        match TcpStream::connect_timeout(&addr, remaining(deadline)?) {
            Ok(s) => return Ok(s),
            Err(e) if is_timeout(&e) => last = HttpError::Timeout,
            Err(e) => last = HttpError::ConnectFailed(format!("{addr}: {e}")),
        }
    }
    Err(last)
}

fn find_head_end(buf: &[u8]) -> Option<(usize, usize)> {
    if let Some(i) = buf.windows(4).position(|w| w == b"\r\n\r\n") {
        return Some((i, i + 4));
    }
    buf.windows(2).position(|w| w == b"\n\n").map(|i| (i, i + 2))
}

pub fn fetch_with(
    url: &UrlInfo,
    options: &[RequestOption],
    config: &FetchConfig,
) -> Result<Vec<ResponseParam>, HttpError> {
    let deadline = Instant::now() + timeout_of(options)?;
    let request = request_text(url, options)?;
    let head_only = options.contains(&RequestOption::Head);
    let mut stream = connect(url, deadline)?;
    stream
        .set_write_timeout(Some(remaining(deadline)?))
        .map_err(|e| HttpError::ConnectFailed(e.to_string()))?;
    stream.write_all(request.as_bytes()).map_err(|e| {
        if is_timeout(&e) {
            HttpError::Timeout
        } else {
            HttpError::ConnectFailed(e.to_string())
        }
    })?;

    let mut buf = Vec::new();
    let mut chunk = [0u8; 16 * 1024];
    let mut head_end = None;
    loop {
        if head_end.is_none() {
            head_end = find_head_end(&buf);
        }
        if let Some((_, body_start)) = head_end {
            if head_only {
                break;
            }
            if buf.len() - body_start > config.max_size {
                return Err(HttpError::OverLimit(config.max_size));
            }
        } else if buf.len() > config.max_size {
            return Err(HttpError::OverLimit(config.max_size));
        }
        stream
            .set_read_timeout(Some(remaining(deadline)?))
            .map_err(|e| HttpError::ProtocolError(e.to_string()))?;
        match stream.read(&mut chunk) {
            Ok(0) => break,
            Ok(n) => buf.extend_from_slice(&chunk[..n]),
            Err(e) if e.kind() == ErrorKind::Interrupted => {}
            Err(e) if is_timeout(&e) => return Err(HttpError::Timeout),
            Err(e) => return Err(HttpError::ProtocolError(e.to_string())),
        }
    }
    let (head_len, body_start) = head_end
        .or_else(|| find_head_end(&buf))
        .ok_or_else(|| HttpError::ProtocolError("response ended inside the header".into()))?;
    let head: String = buf[..head_len].iter().map(|&b| b as char).collect();
    let mut params = parse_head(&head)?;
    if !head_only {
        let (_, code, _) = status_of(&params).expect("parse_head yields a status");
        let mut body = buf.split_off(body_start);
        let bodiless = (100..200).contains(&code) || code == 204 || code == 304;
        let declared = params.iter().find_map(|p| match p {
            ResponseParam::ContentLength(l) => Some(*l),
            _ => None,
        });
        if bodiless {
            body.clear();
        } else if let Some(len) = declared {
            if (body.len() as u64) < len {
                return Err(HttpError::ProtocolError(format!(
                    "body truncated: {} of {len} bytes",
                    body.len()
                )));
            }
            body.truncate(len as usize);
        }
        params.push(ResponseParam::Content(body));
    }
    Ok(params)
}

/// Parses a status line and header fields.
pub fn parse_head(head: &str) -> Result<Vec<ResponseParam>, HttpError> {
    let mut lines = head.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l));
    let status_line = lines.next().unwrap_or("");
    let bad_status = || HttpError::ProtocolError(format!("bad status line {status_line:?}"));
    let rest = status_line.strip_prefix("HTTP/").ok_or_else(bad_status)?;
    let mut parts = rest.splitn(3, ' ');
    let _version = parts.next().filter(|v| !v.is_empty()).ok_or_else(bad_status)?;
    let code: u16 = parts
        .next()
        .filter(|c| c.len() == 3 && c.bytes().all(|b| b.is_ascii_digit()))
        .and_then(|c| c.parse().ok())
        .ok_or_else(bad_status)?;
    let phrase = parts.next().unwrap_or("").trim().to_string();
    let mut params = vec![ResponseParam::Status {
        class: status_class(code),
        code,
        phrase,
    }];

    let mut fields: Vec<(String, String)> = Vec::new();
    for line in lines {
        if line.starts_with([' ', '\t']) {
            if let Some((_, v)) = fields.last_mut() {
                v.push(' ');
                v.push_str(line.trim());
            }
            continue;
        }
        if let Some((k, v)) = line.split_once(':') {
            fields.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    for (name, value) in fields {
        params.push(header_param(&name, value));
    }
    Ok(params)
}

fn header_param(name: &str, value: String) -> ResponseParam {
    let generic = |value: String| ResponseParam::GenericField {
        name: name.to_string(),
        value,
    };
    let date = |value: String, f: fn(HttpDate) -> ResponseParam| match parse_http_date(&value) {
        Ok(d) => f(d),
        Err(_) => generic(value),
    };
    match name.to_ascii_lowercase().as_str() {
        "pragma" => ResponseParam::Pragma(value),
        "date" => date(value, ResponseParam::MessageDate),
        "location" => ResponseParam::Location(value),
        "server" => ResponseParam::HttpServer(value),
        "allow" => ResponseParam::Allow(
            value
                .split(',')
                .map(str::trim)
                .filter(|m| !m.is_empty())
                .map(str::to_string)
                .collect(),
        ),
        "last-modified" => date(value, ResponseParam::LastModified),
        "expires" => date(value, ResponseParam::Expires),
        "content-type" => parse_content_type(&value).unwrap_or_else(|| generic(value)),
        "content-encoding" => ResponseParam::ContentEncoding(value),
        "content-length" => match value.parse() {
            Ok(l) => ResponseParam::ContentLength(l),
            Err(_) => generic(value),
        },
        "www-authenticate" => ResponseParam::Authenticate(vec![value]),
        _ => generic(value),
    }
}

fn parse_content_type(v: &str) -> Option<ResponseParam> {
    let mut parts = v.split(';');
    let (kind, subtype) = parts.next()?.trim().split_once('/')?;
    let (kind, subtype) = (kind.trim(), subtype.trim());
    if kind.is_empty() || subtype.is_empty() {
        return None;
    }
    let params = parts
        .filter_map(|p| {
            let (k, v) = p.split_once('=')?;
            Some((k.trim().to_ascii_lowercase(), v.trim().trim_matches('"').to_string()))
        })
        .collect();
    Some(ResponseParam::ContentType {
        kind: kind.to_ascii_lowercase(),
        subtype: subtype.to_ascii_lowercase(),
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_classes() {
        assert_eq!(status_class(200), StatusClass::Success);
        assert_eq!(status_class(404), StatusClass::RequestError);
        assert_eq!(status_class(600), StatusClass::ExtensionCode);
        assert_eq!(status_class(99), StatusClass::ExtensionCode);
        for code in 0..=999u16 {
            let want = match code / 100 {
                1 => "informational",
                2 => "success",
                3 => "redirection",
                4 => "request_error",
                5 => "server_error",
                _ => "extension_code",
            };
            assert_eq!(status_class(code).as_str(), want);
        }
    }

    #[test]
    fn request_head() {
        let url = UrlInfo::new("www.foo.com", 80, "/doc.html");
        let d = HttpDate::new(Weekday::Wednesday, 6, Month::October, 1999, "00:00:00").unwrap();
        let text = request_text(
            &url,
            &[
                RequestOption::Head,
                RequestOption::IfModifiedSince(d),
                RequestOption::Authorization {
                    scheme: "Basic".into(),
                    params: "dXNlcjpwdw==".into(),
                },
                RequestOption::Field {
                    name: "from".into(),
                    value: "user@machine".into(),
                },
                RequestOption::Field {
                    name: "x_trace_id".into(),
                    value: "7".into(),
                },
            ],
        )
        .unwrap();
        assert_eq!(
            text,
            "HEAD /doc.html HTTP/1.0\r\nHost: www.foo.com\r\nUser-Agent: termweb/1.0\r\n\
If-Modified-Since: Wed, 06 Oct 1999 00:00:00 GMT\r\nAuthorization: Basic dXNlcjpwdw==\r\n\
From: user@machine\r\nX-Trace-Id: 7\r\n\r\n"
        );
        let custom = request_text(
            &UrlInfo::new("h", 8080, "/"),
            &[RequestOption::UserAgent("probe/2".into())],
        )
        .unwrap();
        assert_eq!(custom, "GET / HTTP/1.0\r\nHost: h:8080\r\nUser-Agent: probe/2\r\n\r\n");
    }

    #[test]
    fn bad_options() {
        let url = UrlInfo::new("h", 80, "/");
        for opts in [
            vec![RequestOption::Timeout(1), RequestOption::Timeout(2)],
            vec![RequestOption::Timeout(0)],
            vec![RequestOption::Field {
                name: "a b".into(),
                value: "x".into(),
            }],
            vec![RequestOption::UserAgent("x\r\nEvil: 1".into())],
        ] {
            assert!(matches!(fetch(&url, &opts), Err(HttpError::InvalidOption(_))), "{opts:?}");
        }
    }

    #[test]
    fn response_head() {
        let params = parse_head(
            "HTTP/1.0 200 OK\r\nDate: Sun, 06 Nov 1994 08:49:37 GMT\r\nServer: x\r\n\
Allow: GET, HEAD\r\nPragma: no-cache\r\nContent-Type: Text/HTML; Charset=\"latin1\"\r\n\
Expires: never\r\nWWW-Authenticate: Basic realm=\"r\"\r\nX-Extra: a\r\n  b\r\nContent-Length: 12",
        )
        .unwrap();
        assert_eq!(
            params[0],
            ResponseParam::Status {
                class: StatusClass::Success,
                code: 200,
                phrase: "OK".into()
            }
        );
        assert!(matches!(params[1], ResponseParam::MessageDate(_)));
        assert_eq!(params[2], ResponseParam::HttpServer("x".into()));
        assert_eq!(params[3], ResponseParam::Allow(vec!["GET".into(), "HEAD".into()]));
        assert_eq!(params[4], ResponseParam::Pragma("no-cache".into()));
        assert_eq!(
            params[5],
            ResponseParam::ContentType {
                kind: "text".into(),
                subtype: "html".into(),
                params: vec![("charset".into(), "latin1".into())]
            }
        );
        assert_eq!(
            params[6],
            ResponseParam::GenericField {
                name: "Expires".into(),
                value: "never".into()
            }
        );
        assert_eq!(params[7], ResponseParam::Authenticate(vec!["Basic realm=\"r\"".into()]));
        assert_eq!(
            params[8],
            ResponseParam::GenericField {
                name: "X-Extra".into(),
                value: "a b".into()
            }
        );
        assert_eq!(params[9], ResponseParam::ContentLength(12));
        for bad in ["", "HTTP/1.0", "HTTP/1.0 2000 OK", "ICY 200 OK", "HTTP/ 200 OK"] {
            assert!(matches!(parse_head(bad), Err(HttpError::ProtocolError(_))), "{bad}");
        }
    }

    #[test]
    fn field_names() {
        assert_eq!(field_name("from"), "From");
        assert_eq!(field_name("accept_language"), "Accept-Language");
        assert_eq!(field_name("X-FOO"), "X-Foo");
    }
}
