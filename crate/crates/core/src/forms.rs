//! CGI form input.
//!
//! Raw values are typed as follows: a value containing a line break is a
//! list of lines, the empty string is [`FormValue::Empty`], a numeral
//! (`[+-]?digits(.digits)?`) is a number, anything else is a token. A
//! missing attribute also reads as `Empty`, so "submitted empty" and "not
//! submitted" are indistinguishable.
//!
//! Decoded bytes are taken as UTF-8 when valid and as ISO-8859-1 otherwise.

use std::fmt;
use std::io::Read;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormError {
    #[error("malformed form input at offset {offset}: {message}")]
    MalformedInput { offset: usize, message: String },
    #[error("missing CGI variable {0}")]
    MissingEnv(&'static str),
    #[error("unknown request method {0:?}")]
    UnknownMethod(String),
    #[error("value of {0:?} cannot be put in a URL")]
    Unencodable(String),
    #[error("reading form input: {0}")]
    Io(#[from] std::io::Error),
}

fn malformed(offset: usize, message: impl Into<String>) -> FormError {
    FormError::MalformedInput {
        offset,
        message: message.into(),
    }
}

/// A decimal numeral, kept as submitted so that `007` and `7` stay apart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Numeral(String);

impl Numeral {
    pub fn parse(s: &str) -> Option<Self> {
        let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
        let (int, frac) = match digits.split_once('.') {
            Some((i, f)) => (i, Some(f)),
            None => (digits, None),
        };
        let all_digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
        (all_digits(int) && frac.is_none_or(all_digits)).then(|| Numeral(s.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn value(&self) -> f64 {
        self.0.parse().expect("validated numeral")
    }
}

impl fmt::Display for Numeral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormValue {
    Empty,
    Number(Numeral),
    Token(String),
    Lines(Vec<String>),
}

impl FormValue {
    pub fn classify(raw: &str) -> Self {
        if raw.contains(['\n', '\r']) {
            let norm = raw.replace("\r\n", "\n").replace('\r', "\n");
            let body = norm.strip_suffix('\n').unwrap_or(&norm);
            FormValue::Lines(body.split('\n').map(str::to_string).collect())
        } else if raw.is_empty() {
            FormValue::Empty
        } else if let Some(n) = Numeral::parse(raw) {
            FormValue::Number(n)
        } else {
            FormValue::Token(raw.to_string())
        }
    }

    pub fn token(s: impl Into<String>) -> Self {
        FormValue::Token(s.into())
    }

    /// Text of the value; lines are joined with `\n`.
    pub fn as_text(&self) -> String {
        match self {
            FormValue::Empty => String::new(),
            FormValue::Number(n) => n.0.clone(),
            FormValue::Token(t) => t.clone(),
            FormValue::Lines(l) => l.join("\n"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FormDict {
    pub pairs: Vec<(String, FormValue)>,
}

impl FormDict {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, value: FormValue) {
        self.pairs.push((name.into(), value));
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &FormValue)> {
        self.pairs.iter().map(|(k, v)| (k.as_str(), v))
    }
}

impl<K: Into<String>> FromIterator<(K, FormValue)> for FormDict {
    fn from_iter<I: IntoIterator<Item = (K, FormValue)>>(iter: I) -> Self {
        FormDict {
            pairs: iter.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }
}

/// The CGI/1.1 request variables. Absent variables are `None`.
#[derive(Debug, Clone, Default)]
pub struct CgiEnv {
    pub request_method: Option<String>,
    pub query_string: Option<String>,
    pub content_type: Option<String>,
    pub content_length: Option<String>,
    pub script_name: Option<String>,
    pub server_name: Option<String>,
    pub server_port: Option<String>,
}

impl CgiEnv {
    pub fn from_process_env() -> Self {
        let var = |k| std::env::var(k).ok();
        CgiEnv {
            request_method: var("REQUEST_METHOD"),
            query_string: var("QUERY_STRING"),
            content_type: var("CONTENT_TYPE"),
            content_length: var("CONTENT_LENGTH"),
            script_name: var("SCRIPT_NAME"),
            server_name: var("SERVER_NAME"),
            server_port: var("SERVER_PORT"),
        }
    }

    pub fn get(query: &str) -> Self {
        CgiEnv {
            request_method: Some("GET".into()),
            query_string: Some(query.into()),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Get,
    Post,
}

pub fn form_request_method(env: &CgiEnv) -> Result<Method, FormError> {
    match env.request_method.as_deref() {
        None => Err(FormError::MissingEnv("REQUEST_METHOD")),
        Some(m) if m.eq_ignore_ascii_case("GET") => Ok(Method::Get),
        Some(m) if m.eq_ignore_ascii_case("POST") => Ok(Method::Post),
        Some(m) => Err(FormError::UnknownMethod(m.to_string())),
    }
}

/// Decodes the request's form input. A POST body is read from `body`:
/// exactly `CONTENT_LENGTH` bytes when given, otherwise to end of input.
/// A POST without a content type is read as urlencoded; other content
/// types, and methods other than GET and POST, yield an empty dictionary.
pub fn get_form_input(env: &CgiEnv, body: &mut dyn Read) -> Result<FormDict, FormError> {
    match form_request_method(env) {
        Ok(Method::Get) => decode_urlencoded(env.query_string.as_deref().unwrap_or("").as_bytes()),
        Ok(Method::Post) => {
            let ctype = env.content_type.as_deref().unwrap_or("application/x-www-form-urlencoded");
            let media = ctype.split(';').next().unwrap_or("").trim().to_ascii_lowercase();
            match media.as_str() {
                "application/x-www-form-urlencoded" => decode_urlencoded(&read_body(env, body)?),
                "multipart/form-data" => {
                    let boundary = boundary_of(ctype)
                        .ok_or_else(|| malformed(0, "multipart content type without boundary"))?;
                    decode_multipart(&read_body(env, body)?, &boundary)
                }
                _ => Ok(FormDict::new()),
            }
        }
        Err(_) => Ok(FormDict::new()),
    }
}

fn read_body(env: &CgiEnv, body: &mut dyn Read) -> Result<Vec<u8>, FormError> {
    match env.content_length.as_deref().map(str::trim) {
        Some(len) => {
            let n: usize = len
                .parse()
                .map_err(|_| malformed(0, format!("bad CONTENT_LENGTH {len:?}")))?;
            let mut buf = Vec::with_capacity(n.min(1 << 20));
            body.take(n as u64).read_to_end(&mut buf)?;
            if buf.len() < n {
                return Err(malformed(
                    buf.len(),
                    format!("body ended after {} of {n} bytes", buf.len()),
                ));
            }
            Ok(buf)
        }
        None => {
            let mut buf = Vec::new();
            body.read_to_end(&mut buf)?;
            Ok(buf)
        }
    }
}

fn bytes_to_string(bytes: Vec<u8>) -> String {
    match String::from_utf8(bytes) {
        Ok(s) => s,
        Err(e) => e.into_bytes().iter().map(|&b| b as char).collect(),
    }
}

fn percent_decode(raw: &[u8], base: usize) -> Result<String, FormError> {
    let mut out = Vec::with_capacity(raw.len());
    let mut i = 0;
    while i < raw.len() {
        match raw[i] {
            b'+' => out.push(b' '),
            b'%' => {
                let hex = raw
                    .get(i + 1..i + 3)
                    .filter(|h| h.iter().all(u8::is_ascii_hexdigit))
                    .and_then(|h| std::str::from_utf8(h).ok())
                    .and_then(|h| u8::from_str_radix(h, 16).ok())
                    .ok_or_else(|| malformed(base + i, "bad percent escape"))?;
                out.push(hex);
                i += 2;
            }
            b => out.push(b),
        }
        i += 1;
    }
    Ok(bytes_to_string(out))
}

/// Decodes `application/x-www-form-urlencoded` data.
pub fn decode_urlencoded(data: &[u8]) -> Result<FormDict, FormError> {
    let mut dict = FormDict::new();
    let mut offset = 0;
    for seg in data.split(|&b| b == b'&') {
        if !seg.is_empty() {
            let (name, value) = match seg.iter().position(|&b| b == b'=') {
                Some(eq) => (&seg[..eq], &seg[eq + 1..]),
                None => (seg, &seg[seg.len()..]),
            };
            let value_base = offset + name.len() + 1;
            dict.push(
                percent_decode(name, offset)?,
                FormValue::classify(&percent_decode(value, value_base)?),
            );
        }
        offset += seg.len() + 1;
    }
    Ok(dict)
}

fn header_param(header: &str, key: &str) -> Option<String> {
    header.split(';').skip(1).find_map(|p| {
        let (k, v) = p.split_once('=')?;
        k.trim()
            .eq_ignore_ascii_case(key)
            .then(|| v.trim().trim_matches('"').to_string())
    })
}

fn boundary_of(content_type: &str) -> Option<String> {
    header_param(content_type, "boundary").filter(|b| !b.is_empty())
}

fn find(hay: &[u8], needle: &[u8], from: usize) -> Option<usize> {
    if from > hay.len() {
        return None;
    }
    hay[from..]
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|p| p + from)
}

/// Decodes a `multipart/form-data` body. A part with a filename adds a
/// second entry `<name>_filename`.
pub fn decode_multipart(data: &[u8], boundary: &str) -> Result<FormDict, FormError> {
    let delim = format!("--{boundary}");
    let mut dict = FormDict::new();
    let mut pos = find(data, delim.as_bytes(), 0)
        .ok_or_else(|| malformed(0, "multipart boundary not found"))?
        + delim.len();
    loop {
        if data[pos..].starts_with(b"--") {
            return Ok(dict);
        }
        pos = skip_eol(data, pos);
        let (headers_end, body_start) = match find(data, b"\r\n\r\n", pos) {
            Some(e) => (e, e + 4),
            None => match find(data, b"\n\n", pos) {
                Some(e) => (e, e + 2),
                None => return Err(malformed(pos, "multipart part without header end")),
            },
        };
        let headers = bytes_to_string(data[pos..headers_end].to_vec());
        let next_delim = format!("\n{delim}");
        let end = find(data, next_delim.as_bytes(), body_start)
            .ok_or_else(|| malformed(body_start, "multipart part not terminated"))?;
        let content_end = if end > body_start && data[end - 1] == b'\r' { end - 1 } else { end };
        let disposition = headers
            .lines()
            .find_map(|l| {
                let (k, v) = l.split_once(':')?;
                k.trim().eq_ignore_ascii_case("content-disposition").then_some(v)
            })
            .ok_or_else(|| malformed(pos, "multipart part without content-disposition"))?;
        let name = header_param(disposition, "name")
            .ok_or_else(|| malformed(pos, "multipart part without a name"))?;
        let value = bytes_to_string(data[body_start..content_end].to_vec());
        dict.push(name.clone(), FormValue::classify(&value));
        if let Some(filename) = header_param(disposition, "filename") {
            dict.push(format!("{name}_filename"), FormValue::classify(&filename));
        }
        pos = end + next_delim.len();
    }
}

fn skip_eol(data: &[u8], pos: usize) -> usize {
    if data[pos..].starts_with(b"\r\n") {
        pos + 2
    } else if data[pos..].starts_with(b"\n") {
        pos + 1
    } else {
        pos
    }
}

/// First value for `attribute`; `Empty` when absent.
pub fn get_form_value(dict: &FormDict, attribute: &str) -> FormValue {
    dict.iter()
        .find(|(k, _)| *k == attribute)
        .map_or(FormValue::Empty, |(_, v)| v.clone())
}

fn is_blank(s: &str) -> bool {
    s.chars().all(|c| matches!(c, ' ' | '\t' | '\r' | '\n'))
}

pub fn form_empty_value(v: &FormValue) -> bool {
    match v {
        FormValue::Empty => true,
        FormValue::Number(_) => false,
        FormValue::Token(t) => is_blank(t),
        FormValue::Lines(lines) => lines.iter().all(|l| is_blank(l)),
    }
}

pub fn form_default(val: &FormValue, default: &FormValue) -> FormValue {
    if form_empty_value(val) {
        default.clone()
    } else {
        val.clone()
    }
}

/// The address of the running CGI program. Port 80, or no port, is
/// omitted.
pub fn my_url(env: &CgiEnv) -> Result<String, FormError> {
    let host = env.server_name.as_deref().ok_or(FormError::MissingEnv("SERVER_NAME"))?;
    let script = env.script_name.as_deref().ok_or(FormError::MissingEnv("SCRIPT_NAME"))?;
    match env.server_port.as_deref().map(str::trim) {
        None | Some("80") | Some("") => Ok(format!("http://{host}{script}")),
        Some(port) => Ok(format!("http://{host}:{port}{script}")),
    }
}

fn encode_component(s: &str, out: &mut String) {
    for b in s.bytes() {
        match b {
            b' ' => out.push('+'),
            b if b.is_ascii_alphanumeric() || matches!(b, b'*' | b'-' | b'.' | b'_') => {
                out.push(b as char)
            }
            b => out.push_str(&format!("%{b:02X}")),
        }
    }
}

/// Encodes a dictionary as a URL query, the inverse of GET decoding.
pub fn url_query(dict: &FormDict) -> Result<String, FormError> {
    let mut out = String::new();
    for (i, (name, value)) in dict.iter().enumerate() {
        let text = match value {
            FormValue::Lines(_) => return Err(FormError::Unencodable(name.to_string())),
            FormValue::Token(t) if t.contains(['\n', '\r']) => {
                return Err(FormError::Unencodable(name.to_string()))
            }
            v => v.as_text(),
        };
        if i > 0 {
            out.push('&');
        }
        encode_component(name, &mut out);
        out.push('=');
        encode_component(&text, &mut out);
    }
    Ok(out)
}
