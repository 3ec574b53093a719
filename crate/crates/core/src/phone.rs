//! The telephone database demo: a registry usable in process or as an
//! active module, and the CGI program that queries it.

use std::io::Read;

use thiserror::Error;

use crate::actmod::{ActiveModule, ActmodError, CallOutcome, GoalCall, Registry};
use crate::codec::{render, CodecError, Dialect};
use crate::convert::markup_from_value;
use crate::forms::{form_empty_value, get_form_input, get_form_value, CgiEnv, FormError, FormValue};
use crate::markup::Markup;
use crate::term::Value;

pub const MODULE: &str = "phone_db";

#[derive(Debug, Clone)]
pub struct PhoneDb {
    entries: Vec<(String, String)>,
}

impl Default for PhoneDb {
    fn default() -> Self {
        PhoneDb {
            entries: [("daniel", "336-7448"), ("manuel", "336-7435"), ("sacha", "543-5316")]
                .iter()
                .map(|(n, p)| (n.to_string(), p.to_string()))
                .collect(),
        }
    }
}

impl PhoneDb {
    /// The first number recorded for `name`.
    pub fn lookup(&self, name: &str) -> Option<&str> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, p)| p.as_str())
    }

    pub fn add(&mut self, name: &str, phone: &str) {
        self.entries.push((name.to_string(), phone.to_string()));
    }

    /// The response term for a query. Names and numbers are strings so
    /// that no user input is read as a markup structure.
    pub fn response(&self, name: &str) -> Value {
        if form_empty_value(&FormValue::classify(name)) {
            return Value::atom("You have to provide a name.");
        }
        let b = Value::compound("b", vec![Value::str(name)]);
        match self.lookup(name) {
            Some(phone) => Value::List(vec![
                Value::atom("Telephone number of "),
                b,
                Value::atom(": "),
                Value::str(phone),
            ]),
            None => Value::List(vec![
                Value::atom("No telephone number available for "),
                b,
                Value::atom("."),
            ]),
        }
    }
}

/// Exports `response/2` and `add_phone/2`.
pub fn phone_registry() -> Registry<PhoneDb> {
    Registry::new(PhoneDb::default())
        .query("response", 2, |db, args| match args[0].as_text() {
            Some(name) => CallOutcome::Success(vec![args[0].clone(), db.response(&name)]),
            None => CallOutcome::RemoteError("response expects a name".into()),
        })
        .update("add_phone", 2, |db, args| match (args[0].as_text(), args[1].as_text()) {
            (Some(name), Some(phone)) => {
                db.add(&name, &phone);
                CallOutcome::Success(args.to_vec())
            }
            _ => CallOutcome::RemoteError("add_phone expects a name and a number".into()),
        })
}

#[derive(Debug, Error)]
pub enum PhoneError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Actmod(#[from] ActmodError),
    #[error("phone database: {0}")]
    Backend(String),
    #[error(transparent)]
    Render(#[from] CodecError),
}

/// Where the CGI program gets its answers.
pub trait PhoneBackend {
    fn response(&self, name: &str) -> Result<Value, PhoneError>;
}

fn response_of(outcome: CallOutcome) -> Result<Value, PhoneError> {
    match outcome {
        CallOutcome::Success(mut out) => Ok(out.swap_remove(1)),
        CallOutcome::Failure => Err(PhoneError::Backend("response/2 failed".into())),
        CallOutcome::RemoteError(e) => Err(PhoneError::Backend(e)),
    }
}

fn response_goal(name: &str) -> GoalCall {
    GoalCall::new("response", vec![Value::str(name), Value::Placeholder])
}

impl PhoneBackend for Registry<PhoneDb> {
    fn response(&self, name: &str) -> Result<Value, PhoneError> {
        response_of(self.call(&response_goal(name)))
    }
}

impl PhoneBackend for ActiveModule {
    fn response(&self, name: &str) -> Result<Value, PhoneError> {
        let goal = response_goal(name);
        response_of(self.call(&goal.op, goal.args)?)
    }
}

/// The reply page around `response`.
pub fn page(response: Value) -> Value {
    let a = Value::atom;
    let c = Value::compound;
    Value::List(vec![
        a("cgi_reply"),
        a("start"),
        c("title", vec![a("Telephone database")]),
        c("image", vec![a("phone.gif")]),
        c("heading", vec![Value::Int(2), a("Telephone database")]),
        a("--"),
        response,
        a("start_form"),
        a("Click here, enter name of clip member, and press Return:"),
        a("\\\\"),
        c(
            "input",
            vec![
                a("text"),
                Value::List(vec![
                    c("=", vec![a("name"), a("person_name")]),
                    c("=", vec![a("size"), Value::Int(20)]),
                ]),
            ],
        ),
        a("end_form"),
        a("end"),
    ])
}

/// Runs one CGI request. A blank `person_name` gets the bare form without
/// consulting the backend; otherwise the backend's response is followed by
/// a paragraph break.
pub fn run_cgi(env: &CgiEnv, body: &mut dyn Read, backend: &dyn PhoneBackend) -> Result<String, PhoneError> {
    let input = get_form_input(env, body)?;
    let name = get_form_value(&input, "person_name");
    let response = if form_empty_value(&name) {
        Value::List(vec![])
    } else {
        Value::List(vec![backend.response(&name.as_text())?, Value::atom("$")])
    };
    let doc: Markup = markup_from_value(&page(response));
    Ok(render(&doc, Dialect::Html)?)
}
