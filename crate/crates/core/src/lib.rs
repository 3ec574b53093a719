//! Web programming with markup terms.

pub mod actmod;
pub mod codec;
pub mod convert;
pub mod forms;
pub mod http;
pub mod linkcheck;
pub mod markup;
pub mod phone;
pub mod sugar;
pub mod template;
pub mod term;
pub mod url;

pub use codec::{parse, render, Dialect};
pub use markup::{Attr, Markup};
