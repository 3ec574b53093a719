//! A name server is itself an active module at a fixed address, exporting
//! `register(Module, addr(Host, Port))` and `lookup(Module, Addr)`. A
//! lookup of an unregistered module fails.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Duration;

use super::{
    call_remote, serve_with, ActmodError, CallOutcome, GoalCall, Locator, ModuleAddress, NoPublish, Publisher,
    Registry, ServerConfig, ServerHandle, DEFAULT_CALL_TIMEOUT,
};
use crate::term::Value;

pub fn name_server_registry() -> Registry<HashMap<String, ModuleAddress>> {
    Registry::new(HashMap::new())
        .update("register", 2, |table, args| {
            match (args[0].as_text(), ModuleAddress::from_value(&args[1])) {
                (Some(m), Some(addr)) => {
                    table.insert(m, addr);
                    CallOutcome::Success(args.to_vec())
                }
                _ => CallOutcome::RemoteError("register expects a module name and addr(Host, Port)".into()),
            }
        })
        .query("lookup", 2, |table, args| {
            let Some(m) = args[0].as_text() else {
                return CallOutcome::RemoteError("lookup expects a module name".into());
            };
            match table.get(&m) {
                Some(addr) => CallOutcome::Success(vec![args[0].clone(), addr.to_value()]),
                None => CallOutcome::Failure,
            }
        })
}

/// Serves a fresh name server registry at `bind` (for example
/// `0.0.0.0:7000`).
pub fn run_name_server(bind: &str) -> Result<ServerHandle, ActmodError> {
    let config = ServerConfig {
        bind: bind.to_string(),
        ..ServerConfig::default()
    };
    serve_with("name_server", Arc::new(name_server_registry()), &NoPublish, &config)
}

/// Client side of a name server, usable as publisher and locator.
#[derive(Debug, Clone)]
pub struct NameServer {
    addr: ModuleAddress,
    timeout: Duration,
}

impl NameServer {
    pub fn new(addr: ModuleAddress) -> Self {
        NameServer {
            addr,
            timeout: DEFAULT_CALL_TIMEOUT,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }
}

impl Publisher for NameServer {
    fn publish(&self, module: &str, addr: &ModuleAddress) -> Result<(), ActmodError> {
        let goal = GoalCall::new("register", vec![Value::str(module), addr.to_value()]);
        match call_remote(&self.addr, &goal, self.timeout) {
            Ok(CallOutcome::Success(_)) => Ok(()),
            Ok(other) => Err(ActmodError::PublishFailed(format!("name server answered {}", other.to_value()))),
            Err(e) => Err(ActmodError::PublishFailed(e.to_string())),
        }
    }
}

impl Locator for NameServer {
    fn locate(&self, module: &str) -> Result<ModuleAddress, ActmodError> {
        let goal = GoalCall::new("lookup", vec![Value::str(module), Value::Placeholder]);
        match call_remote(&self.addr, &goal, self.timeout) {
            Ok(CallOutcome::Success(out)) => ModuleAddress::from_value(&out[1])
                .ok_or_else(|| ActmodError::locate(module, format!("bad answer {}", out[1]))),
            Ok(CallOutcome::Failure) => Err(ActmodError::locate(module, "not registered")),
            Ok(CallOutcome::RemoteError(e)) => Err(ActmodError::locate(module, e)),
            Err(e) => Err(ActmodError::locate(module, e.to_string())),
        }
    }
}
