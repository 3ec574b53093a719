//! Scriptable HTTP/1.0 server for tests.
//!
//! Each connection gets one response and is closed. Unknown paths answer
//! 404. A stalled route reads the request and then never answers.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use chrono::{DateTime, Utc};

#[derive(Debug, Clone)]
pub struct Route {
    pub status: u16,
    pub phrase: String,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
    pub last_modified: Option<DateTime<Utc>>,
    pub stall: bool,
    pub omit_length: bool,
    /// Content-Length to announce instead of the real body length.
    pub declared_length: Option<usize>,
}

impl Route {
    pub fn ok(content_type: &str, body: impl Into<Vec<u8>>) -> Self {
        Route {
            status: 200,
            phrase: "OK".into(),
            headers: vec![("Content-Type".into(), content_type.into())],
            body: body.into(),
            last_modified: None,
            stall: false,
            omit_length: false,
            declared_length: None,
        }
    }

    pub fn html(body: &str) -> Self {
        Self::ok("text/html", body)
    }

    pub fn status(code: u16, phrase: &str) -> Self {
        Route {
            status: code,
            phrase: phrase.into(),
            body: format!("{code} {phrase}\n").into_bytes(),
            ..Self::ok("text/plain", "")
        }
    }

    pub fn stalled() -> Self {
        Route {
            stall: true,
            ..Self::ok("text/plain", "")
        }
    }

    pub fn header(mut self, name: &str, value: &str) -> Self {
        self.headers.push((name.into(), value.into()));
        self
    }

    pub fn last_modified(mut self, at: DateTime<Utc>) -> Self {
        self.last_modified = Some(at);
        self
    }

    pub fn without_content_length(mut self) -> Self {
        self.omit_length = true;
        self
    }

    pub fn declared_length(mut self, len: usize) -> Self {
        self.declared_length = Some(len);
        self
    }
}

pub fn http_date(at: DateTime<Utc>) -> String {
    at.format("%a, %d %b %Y %H:%M:%S GMT").to_string()
}

#[derive(Default)]
struct Shared {
    routes: Mutex<HashMap<String, Route>>,
    requests: Mutex<Vec<String>>,
    stop: AtomicBool,
}

pub struct Fixture {
    addr: SocketAddr,
    shared: Arc<Shared>,
    acceptor: Option<JoinHandle<()>>,
}

impl Fixture {
    pub fn start<I, S>(routes: I) -> Self
    where
        I: IntoIterator<Item = (S, Route)>,
        S: Into<String>,
    {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind fixture");
        listener.set_nonblocking(true).expect("nonblocking listener");
        let addr = listener.local_addr().expect("fixture address");
        let shared = Arc::new(Shared::default());
        shared
            .routes
            .lock()
            .unwrap()
            .extend(routes.into_iter().map(|(p, r)| (p.into(), r)));
        let s = shared.clone();
        let acceptor = thread::spawn(move || {
            while !s.stop.load(Ordering::SeqCst) {
                match listener.accept() {
                    Ok((stream, _)) => {
                        let s = s.clone();
                        thread::spawn(move || serve(stream, &s));
                    }
                    Err(_) => thread::sleep(Duration::from_millis(5)),
                }
            }
        });
        Fixture {
            addr,
            shared,
            acceptor: Some(acceptor),
        }
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self, path: &str) -> String {
        format!("http://{}{}", self.addr, path)
    }

    pub fn set_route(&self, path: &str, route: Route) {
        self.shared.routes.lock().unwrap().insert(path.into(), route);
    }

    /// Request heads received so far, in arrival order.
    pub fn requests(&self) -> Vec<String> {
        self.shared.requests.lock().unwrap().clone()
    }

    pub fn request_lines(&self) -> Vec<String> {
        self.requests()
            .iter()
            .map(|r| r.lines().next().unwrap_or("").to_string())
            .collect()
    }
}

impl Drop for Fixture {
    fn drop(&mut self) {
        self.shared.stop.store(true, Ordering::SeqCst);
        if let Some(h) = self.acceptor.take() {
            let _ = h.join();
        }
    }
}

fn serve(stream: TcpStream, shared: &Shared) {
    let _ = stream.set_nonblocking(false);
    let _ = stream.set_read_timeout(Some(Duration::from_secs(5)));
    let mut reader = BufReader::new(&stream);
    let mut head = String::new();
    loop {
        let mut line = String::new();
        match reader.read_line(&mut line) {
            Ok(0) | Err(_) => break,
            Ok(_) => {
                let blank = line.trim_end().is_empty();
                head.push_str(&line);
                if blank {
                    break;
                }
            }
        }
    }
    shared.requests.lock().unwrap().push(head.clone());
    let mut first = head.lines().next().unwrap_or("").split_whitespace();
    let method = first.next().unwrap_or("").to_string();
    let path = first.next().unwrap_or("").to_string();
    let route = shared.routes.lock().unwrap().get(&path).cloned();
    let route = route.unwrap_or_else(|| Route::status(404, "Not Found"));
    if route.stall {
        while !shared.stop.load(Ordering::SeqCst) {
            thread::sleep(Duration::from_millis(20));
        }
        return;
    }
    let not_modified = route.last_modified.is_some_and(|lm| {
        head.lines()
            .filter_map(|l| l.split_once(':'))
            .find(|(k, _)| k.trim().eq_ignore_ascii_case("if-modified-since"))
            .and_then(|(_, v)| DateTime::parse_from_rfc2822(v.trim()).ok())
            .is_some_and(|ims| lm <= ims.with_timezone(&Utc))
    });
    let mut out = Vec::new();
    let (status, phrase) = if not_modified {
        (304, "Not Modified")
    } else {
        (route.status, route.phrase.as_str())
    };
    out.extend_from_slice(format!("HTTP/1.0 {status} {phrase}\r\n").as_bytes());
    out.extend_from_slice(format!("Date: {}\r\n", http_date(Utc::now())).as_bytes());
    out.extend_from_slice(b"Server: termweb-fixture/1.0\r\n");
    if let Some(lm) = route.last_modified {
        out.extend_from_slice(format!("Last-Modified: {}\r\n", http_date(lm)).as_bytes());
    }
    let send_body = !not_modified && method != "HEAD";
    if !route.omit_length && !not_modified {
        let len = route.declared_length.unwrap_or(route.body.len());
        out.extend_from_slice(format!("Content-Length: {len}\r\n").as_bytes());
    }
    for (k, v) in &route.headers {
        out.extend_from_slice(format!("{k}: {v}\r\n").as_bytes());
    }
    out.extend_from_slice(b"\r\n");
    if send_body {
        out.extend_from_slice(&route.body);
    }
    let mut stream = &stream;
    let _ = stream.write_all(&out);
    let _ = stream.flush();
}
