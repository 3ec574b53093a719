use std::io::{BufReader, ErrorKind};
use std::net::{TcpStream, ToSocketAddrs};
use std::sync::Arc;
use std::time::Duration;

use super::wire::{read_frame, write_frame, WireError};
use super::{ActmodError, CallOutcome, GoalCall, Locator, ModuleAddress};
use crate::term::Value;

pub const DEFAULT_CALL_TIMEOUT: Duration = Duration::from_secs(30);

/// A client connection that can carry several calls in sequence.
pub struct Connection {
    addr: ModuleAddress,
    reader: BufReader<TcpStream>,
    stream: TcpStream,
}

fn io_error(addr: &ModuleAddress, e: std::io::Error) -> ActmodError {
    match e.kind() {
        ErrorKind::TimedOut | ErrorKind::WouldBlock => ActmodError::Timeout,
        _ => ActmodError::ConnectFailed {
            addr: addr.clone(),
            reason: e.to_string(),
        },
    }
}

impl Connection {
    /// Connects, waiting at most `timeout`; every later read and write is
    /// bounded by the same timeout.
    pub fn open(addr: &ModuleAddress, timeout: Duration) -> Result<Self, ActmodError> {
        let sockets = (addr.host.as_str(), addr.port)
            .to_socket_addrs()
            .map_err(|e| io_error(addr, e))?;
        let mut last = ActmodError::ConnectFailed {
            addr: addr.clone(),
            reason: "no address".into(),
        };
        for sa in sockets {
            match TcpStream::connect_timeout(&sa, timeout) {
                Ok(stream) => {
                    stream.set_read_timeout(Some(timeout)).map_err(|e| io_error(addr, e))?;
                    stream.set_write_timeout(Some(timeout)).map_err(|e| io_error(addr, e))?;
                    let _ = stream.set_nodelay(true);
                    let reader = BufReader::new(stream.try_clone().map_err(|e| io_error(addr, e))?);
                    return Ok(Connection {
                        addr: addr.clone(),
                        reader,
                        stream,
                    });
                }
                Err(e) => last = io_error(addr, e),
            }
        }
        Err(last)
    }

    pub fn call(&mut self, goal: &GoalCall) -> Result<CallOutcome, ActmodError> {
        let addr = &self.addr;
        let wire = |e: WireError| match e {
            WireError::Io(io) => io_error(addr, io),
            other => ActmodError::Wire(other),
        };
        write_frame(&mut self.stream, &goal.to_value()).map_err(wire)?;
        let reply = read_frame(&mut self.reader)
            .map_err(wire)?
            .ok_or(ActmodError::Wire(WireError::Truncated))?;
        CallOutcome::from_value(&reply)
            .ok_or_else(|| ActmodError::Wire(WireError::Unexpected(reply.to_text())))
    }
}

/// Makes one call on a fresh connection.
pub fn call_remote(addr: &ModuleAddress, goal: &GoalCall, timeout: Duration) -> Result<CallOutcome, ActmodError> {
    Connection::open(addr, timeout)?.call(goal)
}

/// Client-side import of some operations of an active module. The
/// module's address is located afresh on every call, so a restarted server
/// is found at its new address.
pub struct ActiveModule {
    module: String,
    ops: Vec<(String, usize)>,
    locator: Arc<dyn Locator>,
    timeout: Duration,
}

impl ActiveModule {
    pub fn import(module: &str, ops: &[(&str, usize)], locator: Arc<dyn Locator>) -> Self {
        ActiveModule {
            module: module.to_string(),
            ops: ops.iter().map(|(n, a)| (n.to_string(), *a)).collect(),
            locator,
            timeout: DEFAULT_CALL_TIMEOUT,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn module(&self) -> &str {
        &self.module
    }

    pub fn call(&self, op: &str, args: Vec<Value>) -> Result<CallOutcome, ActmodError> {
        let goal = GoalCall::new(op, args);
        if !self.ops.iter().any(|(n, a)| n == op && *a == goal.arity()) {
            return Err(ActmodError::NotImported {
                module: self.module.clone(),
                op: goal.to_string(),
            });
        }
        let addr = self.locator.locate(&self.module)?;
        call_remote(&addr, &goal, self.timeout)
    }
}
