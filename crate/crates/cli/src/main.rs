use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use termweb::actmod::{
    call_remote, run_name_server, serve_with, ActiveModule, CallOutcome, FileDirectory, FixedAddress, GoalCall,
    Locator, ModuleAddress, NameServer, NoPublish, Publisher, ServerConfig, DEFAULT_CALL_TIMEOUT,
};
use termweb::codec::{self, Dialect};
use termweb::convert::{markup_from_value, markup_to_value};
use termweb::forms::CgiEnv;
use termweb::http::{self, parse_http_date, RequestOption, ResponseParam, StatusClass};
use termweb::linkcheck::{check_links_with, LinkCheckConfig};
use termweb::markup::Markup;
use termweb::phone::{self, PhoneBackend};
use termweb::template::{file_to_string, fill, parse_template};
use termweb::term::{parse_term, parse_terms, Value};
use termweb::url::url_info;

#[derive(Parser)]
#[command(name = "termweb", version, about = "Markup terms, CGI forms, HTTP and active modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fetch a document over HTTP/1.0
    Fetch(FetchArgs),
    /// Report the links of a page that fail when followed
    CheckLinks {
        url: String,
        /// Seconds to wait for each probe
        #[arg(long, default_value_t = 20)]
        timeout: u64,
        #[arg(long, default_value_t = 8)]
        workers: usize,
    },
    /// Print the terms of an HTML or XML file, one per line
    Parse {
        /// Input file, or - for standard input
        file: PathBuf,
        #[arg(long)]
        xml: bool,
    },
    /// Render a file of terms as markup
    Render {
        /// Input file, or - for standard input
        file: PathBuf,
        #[arg(long)]
        xml: bool,
    },
    /// Fill the slots of an HTML template and render it
    Template {
        #[arg(long)]
        template: PathBuf,
        /// NAME=TERM: bind slot NAME to a term given in text notation
        #[arg(long = "bind", value_name = "NAME=TERM")]
        bind: Vec<String>,
        /// NAME=FILE: bind slot NAME to the terms in FILE
        #[arg(long = "bind-file", value_name = "NAME=FILE")]
        bind_file: Vec<String>,
    },
    /// The telephone database CGI program
    PhoneDbCgi {
        /// file:DIR, nameserver:HOST:PORT or HOST:PORT; in-process when absent
        #[arg(long)]
        backend: Option<String>,
    },
    /// Active module server, client and name server
    Actmod {
        #[command(subcommand)]
        command: ActmodCommand,
    },
}

#[derive(Args)]
struct FetchArgs {
    url: String,
    #[arg(long)]
    head: bool,
    #[arg(long)]
    timeout: Option<u64>,
    /// An HTTP date, e.g. "Wed, 06 Oct 1999 00:00:00 GMT"
    #[arg(long)]
    if_modified_since: Option<String>,
    #[arg(long)]
    user_agent: Option<String>,
    /// Write the body here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ActmodCommand {
    /// Serve the phone_db module until killed
    Serve {
        #[arg(long, default_value = phone::MODULE)]
        module: String,
        /// file:DIR, nameserver:HOST:PORT or none
        #[arg(long)]
        publish: String,
        #[arg(long, default_value = "127.0.0.1:0")]
        bind: String,
    },
    /// Call an operation; arguments are terms in text notation
    Call {
        #[arg(long)]
        module: String,
        /// file:DIR, nameserver:HOST:PORT or HOST:PORT
        #[arg(long)]
        locate: String,
        #[arg(long)]
        timeout: Option<u64>,
        op: String,
        args: Vec<String>,
    },
    /// Run a name server at a fixed port
    Nameserver {
        #[arg(long)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

/// A failure with its exit status.
struct Failure(u8, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(2, e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            let line = msg.replace(['\n', '\r'], " ");
            eprintln!("termweb: {line}");
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Fetch(args) => fetch(args),
        Command::CheckLinks { url, timeout, workers } => {
            let config = LinkCheckConfig {
                probe_timeout_secs: timeout,
                workers,
            };
            let bad = check_links_with(&url, &config)?;
            let mut out = io::stdout().lock();
            for b in &bad {
                writeln!(out, "badlink {} {}", b.link, b.reason)?;
            }
            Ok(if bad.is_empty() { 0 } else { 1 })
        }
        Command::Parse { file, xml } => {
            let terms = codec::parse_bytes(&read_input(&file)?, dialect(xml))
                .map_err(|e| Failure(2, format!("{}: {e}", file.display())))?;
            let mut out = io::stdout().lock();
            for t in &terms {
                writeln!(out, "{}", markup_to_value(t))?;
            }
            Ok(0)
        }
        Command::Render { file, xml } => {
            let text = String::from_utf8(read_input(&file)?)
                .map_err(|_| Failure(2, format!("{}: not UTF-8", file.display())))?;
            let terms = parse_terms(&text).map_err(|e| Failure(2, format!("{}: {e}", file.display())))?;
            let doc = Markup::Seq(terms.iter().map(markup_from_value).collect());
            codec::render_to_stream(&doc, dialect(xml), &mut io::stdout().lock())?;
            Ok(0)
        }
        Command::Template { template, bind, bind_file } => {
            let (terms, dict) = parse_template(&file_to_string(&template)?);
            let mut bindings = Vec::new();
            for b in &bind {
                let (name, text) = split_binding(b)?;
                let v = parse_term(text).map_err(|e| Failure(2, format!("--bind {name}: {e}")))?;
                bindings.push((name, markup_from_value(&v)));
            }
            for b in &bind_file {
                let (name, path) = split_binding(b)?;
                let text = fs::read_to_string(path).map_err(|e| Failure(2, format!("{path}: {e}")))?;
                let vs = parse_terms(&text).map_err(|e| Failure(2, format!("{path}: {e}")))?;
                bindings.push((name, Markup::Seq(vs.iter().map(markup_from_value).collect())));
            }
            fill(&dict, &bindings)?;
            codec::render_to_stream(&Markup::Seq(terms), Dialect::Html, &mut io::stdout().lock())?;
            Ok(0)
        }
        Command::PhoneDbCgi { backend } => {
            let backend: Box<dyn PhoneBackend> = match backend {
                None => Box::new(phone::phone_registry()),
                Some(spec) => Box::new(ActiveModule::import(
                    phone::MODULE,
                    &[("response", 2)],
                    locator(&spec)?,
                )),
            };
            let page = phone::run_cgi(&CgiEnv::from_process_env(), &mut io::stdin().lock(), backend.as_ref())?;
            io::stdout().lock().write_all(&codec::encode_latin1(&page))?;
            Ok(0)
        }
        Command::Actmod { command } => actmod(command),
    }
}

fn dialect(xml: bool) -> Dialect {
    if xml {
        Dialect::Xml
    } else {
        Dialect::Html
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        fs::read(path).map_err(|e| Failure(2, format!("{}: {e}", path.display())))
    }
}

fn split_binding(b: &str) -> Result<(&str, &str), Failure> {
    b.split_once('=')
        .filter(|(n, _)| !n.is_empty())
        .ok_or_else(|| Failure(2, format!("binding {b:?} is not NAME=VALUE")))
}

fn fetch(args: FetchArgs) -> Outcome {
    let url = url_info(&args.url)?;
    let mut options = Vec::new();
    if args.head {
        options.push(RequestOption::Head);
    }
    if let Some(t) = args.timeout {
        options.push(RequestOption::Timeout(t));
    }
    if let Some(d) = &args.if_modified_since {
        options.push(RequestOption::IfModifiedSince(parse_http_date(d)?));
    }
    if let Some(a) = args.user_agent {
        options.push(RequestOption::UserAgent(a));
    }
    let response = http::fetch(&url, &options)?;
    let mut success = false;
    let mut meta = Vec::new();
    let mut body = None;
    for p in &response {
        match p {
            ResponseParam::Status { class, code, phrase } => {
                success = *class == StatusClass::Success;
                meta.push(format!("status: {} {code} {phrase}", class.as_str()));
            }
            ResponseParam::Content(c) => body = Some(c),
            p => {
                if let Some((name, value)) = p.field() {
                    meta.push(format!("{name}: {value}"));
                }
            }
        }
    }
    if args.head {
        let mut out = io::stdout().lock();
        for line in &meta {
            writeln!(out, "{line}")?;
        }
    } else {
        let mut err = io::stderr().lock();
        for line in &meta {
            writeln!(err, "{line}")?;
        }
        let body = body.map(Vec::as_slice).unwrap_or_default();
        match &args.out {
            Some(path) => fs::write(path, body).map_err(|e| Failure(2, format!("{}: {e}", path.display())))?,
            None => io::stdout().lock().write_all(body)?,
        }
    }
    Ok(if success { 0 } else { 1 })
}

fn parse_host_port(s: &str) -> Result<ModuleAddress, Failure> {
    let bad = || Failure(2, format!("{s:?} is not HOST:PORT"));
    let (host, port) = s.rsplit_once(':').ok_or_else(bad)?;
    let port: u16 = port.parse().ok().filter(|&p| p > 0).ok_or_else(bad)?;
    if host.is_empty() {
        return Err(bad());
    }
    Ok(ModuleAddress::new(host, port))
}

fn locator(spec: &str) -> Result<Arc<dyn Locator>, Failure> {
    if let Some(dir) = spec.strip_prefix("file:") {
        Ok(Arc::new(FileDirectory::new(dir)))
    } else if let Some(addr) = spec.strip_prefix("nameserver:") {
        Ok(Arc::new(NameServer::new(parse_host_port(addr)?)))
    } else {
        Ok(Arc::new(FixedAddress(parse_host_port(spec)?)))
    }
}

fn publisher(spec: &str) -> Result<Box<dyn Publisher>, Failure> {
    if let Some(dir) = spec.strip_prefix("file:") {
        Ok(Box::new(FileDirectory::new(dir)))
    } else if let Some(addr) = spec.strip_prefix("nameserver:") {
        Ok(Box::new(NameServer::new(parse_host_port(addr)?)))
    } else if spec == "none" {
        Ok(Box::new(NoPublish))
    } else {
        Err(Failure(2, format!("unknown publish strategy {spec:?}")))
    }
}

fn actmod(command: ActmodCommand) -> Outcome {
    match command {
        ActmodCommand::Serve { module, publish, bind } => {
            if module != phone::MODULE {
                return Err(Failure(2, format!("unknown module {module:?}; this server provides {}", phone::MODULE)));
            }
            let config = ServerConfig {
                bind,
                ..ServerConfig::default()
            };
            let handle = serve_with(&module, Arc::new(phone::phone_registry()), publisher(&publish)?.as_ref(), &config)?;
            eprintln!("serving {module} at {}", handle.addr());
            handle.wait();
            Ok(0)
        }
        ActmodCommand::Call { module, locate, timeout, op, args } => {
            let args = args
                .iter()
                .map(|a| parse_term(a).map_err(|e| Failure(2, format!("argument {a:?}: {e}"))))
                .collect::<Result<Vec<Value>, _>>()?;
            let addr = locator(&locate)?.locate(&module)?;
            let timeout = timeout.map_or(DEFAULT_CALL_TIMEOUT, std::time::Duration::from_secs);
            let outcome = call_remote(&addr, &GoalCall::new(op, args), timeout)?;
            println!("{}", outcome.to_value());
            match outcome {
                CallOutcome::Success(_) => Ok(0),
                CallOutcome::Failure => Ok(1),
                CallOutcome::RemoteError(e) => Err(Failure(2, format!("remote error: {e}"))),
            }
        }
        ActmodCommand::Nameserver { port, host } => {
            let handle = run_name_server(&format!("{host}:{port}"))?;
            eprintln!("name server at {}", handle.addr());
            handle.wait();
            Ok(0)
        }
    }
}
