use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use parking_lot::RwLock;

use super::{CallOutcome, GoalCall};
use crate::term::Value;

type QueryFn<S> = Box<dyn Fn(&S, &[Value]) -> CallOutcome + Send + Sync>;
type UpdateFn<S> = Box<dyn Fn(&mut S, &[Value]) -> CallOutcome + Send + Sync>;

enum Handler<S> {
    Query(QueryFn<S>),
    Update(UpdateFn<S>),
}

/// Operations over shared state `S`. Query handlers run concurrently
/// under a read lock; update handlers run one at a time under the write
/// lock.
pub struct Registry<S> {
    state: RwLock<S>,
    ops: BTreeMap<(String, usize), Handler<S>>,
}

/// A registry with its state type erased, as served over the network.
pub trait Dispatch: Send + Sync {
    fn dispatch(&self, goal: &GoalCall) -> CallOutcome;
    fn operations(&self) -> Vec<(String, usize)>;
}

impl<S: Send + Sync> Registry<S> {
    pub fn new(state: S) -> Self {
        Registry {
            state: RwLock::new(state),
            ops: BTreeMap::new(),
        }
    }

    pub fn query<F>(mut self, name: &str, arity: usize, f: F) -> Self
    where
        F: Fn(&S, &[Value]) -> CallOutcome + Send + Sync + 'static,
    {
        self.ops.insert((name.to_string(), arity), Handler::Query(Box::new(f)));
        self
    }

    pub fn update<F>(mut self, name: &str, arity: usize, f: F) -> Self
    where
        F: Fn(&mut S, &[Value]) -> CallOutcome + Send + Sync + 'static,
    {
        self.ops.insert((name.to_string(), arity), Handler::Update(Box::new(f)));
        self
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn read<R>(&self, f: impl FnOnce(&S) -> R) -> R {
        f(&self.state.read())
    }

    /// Runs the handler for `goal`. A panicking handler, or one that
    /// answers with the wrong number of values, yields a remote error.
    pub fn call(&self, goal: &GoalCall) -> CallOutcome {
        let Some(handler) = self.ops.get(&(goal.op.clone(), goal.arity())) else {
            return CallOutcome::RemoteError(format!("unknown operation {goal}"));
        };
        let run = || match handler {
            Handler::Query(f) => f(&self.state.read(), &goal.args),
            Handler::Update(f) => f(&mut self.state.write(), &goal.args),
        };
        match catch_unwind(AssertUnwindSafe(run)) {
            Ok(CallOutcome::Success(out)) if out.len() != goal.arity() => CallOutcome::RemoteError(
                format!("{goal} answered with {} values", out.len()),
            ),
            Ok(outcome) => outcome,
            Err(_) => CallOutcome::RemoteError(format!("{goal} raised an exception")),
        }
    }
}

impl<S: Send + Sync> Dispatch for Registry<S> {
    fn dispatch(&self, goal: &GoalCall) -> CallOutcome {
        self.call(goal)
    }

    fn operations(&self) -> Vec<(String, usize)> {
        self.ops.keys().cloned().collect()
    }
}
