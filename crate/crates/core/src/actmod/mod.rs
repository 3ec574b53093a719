//! Active modules: long-lived servers exporting named operations.
//!
//! A server owns a [`Registry`] of operations and announces its address
//! through a [`Publisher`]. Clients find the address through a matching
//! [`Locator`] and call operations remotely with [`call_remote`] or through
//! an [`ActiveModule`] import.
//!
//! Each call yields exactly one outcome: success with the call's arguments
//! as computed by the handler, failure, or a remote error.

mod client;
mod discovery;
mod nameserver;
mod registry;
mod server;
pub mod wire;

use std::fmt;

use thiserror::Error;

use crate::term::Value;

pub use client::{call_remote, ActiveModule, Connection, DEFAULT_CALL_TIMEOUT};
pub use discovery::{
    addr_text, parse_addr_text, FileDirectory, FixedAddress, Locator, NoPublish, Publisher, WebDirectory,
};
pub use nameserver::{name_server_registry, run_name_server, NameServer};
pub use registry::{Dispatch, Registry};
pub use server::{serve, serve_with, ServerConfig, ServerHandle};
pub use wire::WireError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModuleAddress {
    pub host: String,
    pub port: u16,
}

impl ModuleAddress {
    pub fn new(host: impl Into<String>, port: u16) -> Self {
        ModuleAddress {
            host: host.into(),
            port,
        }
    }

    /// `addr(Host, Port)`
    pub fn to_value(&self) -> Value {
        Value::compound("addr", vec![Value::str(self.host.clone()), Value::Int(self.port.into())])
    }

    pub fn from_value(v: &Value) -> Option<Self> {
        match v {
            Value::Compound(f, args) if f == "addr" && args.len() == 2 => {
                let host = args[0].as_text().filter(|h| !h.is_empty())?;
                let Value::Int(port) = args[1] else { return None };
                let port = u16::try_from(port).ok().filter(|&p| p > 0)?;
                Some(ModuleAddress { host, port })
            }
            _ => None,
        }
    }
}

impl fmt::Display for ModuleAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.host, self.port)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoalCall {
    pub op: String,
    pub args: Vec<Value>,
}

impl GoalCall {
    pub fn new(op: impl Into<String>, args: Vec<Value>) -> Self {
        GoalCall { op: op.into(), args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// An atom for arity 0, a compound otherwise.
    pub fn to_value(&self) -> Value {
        if self.args.is_empty() {
            Value::atom(self.op.clone())
        } else {
            Value::compound(self.op.clone(), self.args.clone())
        }
    }

    pub fn from_value(v: &Value) -> Option<Self> {
        match v {
            Value::Atom(a) => Some(GoalCall::new(a.clone(), vec![])),
            Value::Compound(f, args) => Some(GoalCall::new(f.clone(), args.clone())),
            _ => None,
        }
    }
}

impl fmt::Display for GoalCall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.op, self.args.len())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CallOutcome {
    Success(Vec<Value>),
    Failure,
    RemoteError(String),
}

impl CallOutcome {
    /// `success([..])`, `failure` or `error("..")`.
    pub fn to_value(&self) -> Value {
        match self {
            CallOutcome::Success(args) => Value::compound("success", vec![Value::List(args.clone())]),
            CallOutcome::Failure => Value::atom("failure"),
            CallOutcome::RemoteError(m) => Value::compound("error", vec![Value::str(m.clone())]),
        }
    }

    pub fn from_value(v: &Value) -> Option<Self> {
        match v {
            Value::Atom(a) if a == "failure" => Some(CallOutcome::Failure),
            Value::Compound(f, args) if args.len() == 1 => match (f.as_str(), &args[0]) {
                ("success", Value::List(items)) => Some(CallOutcome::Success(items.clone())),
                ("error", Value::Str(m)) => Some(CallOutcome::RemoteError(m.clone())),
                _ => None,
            },
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ActmodError {
    #[error("cannot bind server socket: {0}")]
    BindFailed(String),
    #[error("cannot publish address: {0}")]
    PublishFailed(String),
    #[error("cannot locate module {module}: {reason}")]
    LocateFailed { module: String, reason: String },
    #[error("cannot connect to {addr}: {reason}")]
    ConnectFailed { addr: ModuleAddress, reason: String },
    #[error("remote call timed out")]
    Timeout,
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("{op} is not imported from {module}")]
    NotImported { module: String, op: String },
    #[error("registry exports no operations")]
    EmptyRegistry,
}

impl ActmodError {
    pub(crate) fn locate(module: &str, reason: impl Into<String>) -> Self {
        ActmodError::LocateFailed {
            module: module.to_string(),
            reason: reason.into(),
        }
    }
}
