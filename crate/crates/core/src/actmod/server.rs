use std::io::{BufReader, BufWriter};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use super::wire::{read_frame, write_frame, WireError};
use super::{ActmodError, CallOutcome, Dispatch, GoalCall, ModuleAddress, Publisher};

#[derive(Debug, Clone)]
pub struct ServerConfig {
    /// Listening address; port 0 picks an ephemeral port.
    pub bind: String,
    /// Host name to publish. Defaults to the bound IP address.
    pub advertise_host: Option<String>,
    /// An idle connection is closed after this long.
    pub idle_timeout: Duration,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            bind: "127.0.0.1:0".into(),
            advertise_host: None,
            idle_timeout: Duration::from_secs(30),
        }
    }
}

pub struct ServerHandle {
    addr: ModuleAddress,
    local: SocketAddr,
    stop: Arc<AtomicBool>,
    acceptor: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> &ModuleAddress {
        &self.addr
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.local
    }

    /// Stops accepting connections. Connections already open finish their
    /// current call and close at their next idle timeout.
    pub fn shutdown(mut self) {
        self.stop_acceptor();
    }

    /// Blocks until the server is shut down from another thread.
    pub fn wait(mut self) {
        if let Some(h) = self.acceptor.take() {
            let _ = h.join();
        }
    }

    pub fn stopper(&self) -> impl Fn() + Send + Sync + 'static {
        let stop = self.stop.clone();
        move || stop.store(true, Ordering::SeqCst)
    }

    fn stop_acceptor(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        if let Some(h) = self.acceptor.take() {
            let _ = h.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop_acceptor();
    }
}

pub fn serve(
    module: &str,
    registry: Arc<dyn Dispatch>,
    publisher: &dyn Publisher,
) -> Result<ServerHandle, ActmodError> {
    serve_with(module, registry, publisher, &ServerConfig::default())
}

/// Binds, publishes the address under `module`, and serves connections on
/// background threads until the handle is shut down or dropped.
pub fn serve_with(
    module: &str,
    registry: Arc<dyn Dispatch>,
    publisher: &dyn Publisher,
    config: &ServerConfig,
) -> Result<ServerHandle, ActmodError> {
    if registry.operations().is_empty() {
        return Err(ActmodError::EmptyRegistry);
    }
    let bind_err = |e: std::io::Error| ActmodError::BindFailed(format!("{}: {e}", config.bind));
    let listener = TcpListener::bind(&config.bind).map_err(bind_err)?;
    listener.set_nonblocking(true).map_err(bind_err)?;
    let local = listener.local_addr().map_err(bind_err)?;
    let host = config.advertise_host.clone().unwrap_or_else(|| {
        if local.ip().is_unspecified() {
            "127.0.0.1".to_string()
        } else {
            local.ip().to_string()
        }
    });
    let addr = ModuleAddress::new(host, local.port());
    publisher.publish(module, &addr)?;

    let stop = Arc::new(AtomicBool::new(false));
    let stop_flag = stop.clone();
    let idle = config.idle_timeout;
    let acceptor = thread::spawn(move || {
        while !stop_flag.load(Ordering::SeqCst) {
            match listener.accept() {
                Ok((stream, _)) => {
                    let registry = registry.clone();
                    thread::spawn(move || serve_connection(stream, registry.as_ref(), idle));
                }
                Err(_) => thread::sleep(Duration::from_millis(5)),
            }
        }
    });
    Ok(ServerHandle {
        addr,
        local,
        stop,
        acceptor: Some(acceptor),
    })
}

fn serve_connection(stream: TcpStream, registry: &dyn Dispatch, idle: Duration) {
    if stream.set_nonblocking(false).is_err() || stream.set_read_timeout(Some(idle)).is_err() {
        return;
    }
    let _ = stream.set_nodelay(true);
    let mut reader = BufReader::new(&stream);
    let mut writer = BufWriter::new(&stream);
    loop {
        let outcome = match read_frame(&mut reader) {
            Ok(None) => return,
            Ok(Some(v)) => match GoalCall::from_value(&v) {
                Some(goal) => registry.dispatch(&goal),
                None => CallOutcome::RemoteError(format!("not a goal: {v}")),
            },
            Err(WireError::Io(_)) => return,
            Err(e) => {
                let reply = CallOutcome::RemoteError(format!("bad request: {e}"));
                let _ = write_frame(&mut writer, &reply.to_value());
                if e.is_recoverable() {
                    continue;
                }
                return;
            }
        };
        if write_frame(&mut writer, &outcome.to_value()).is_err() {
            return;
        }
    }
}
