//! Address publishing and locating.
//!
//! The file strategies store `<module>.addr` holding one line `host port`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{ActmodError, ModuleAddress};
use crate::http::{content_of, fetch, status_of, StatusClass};
use crate::url::{url_info_relative, UrlInfo};

pub trait Publisher: Send + Sync {
    fn publish(&self, module: &str, addr: &ModuleAddress) -> Result<(), ActmodError>;
}

pub trait Locator: Send + Sync {
    fn locate(&self, module: &str) -> Result<ModuleAddress, ActmodError>;
}

/// Publishes nowhere; for servers with a fixed, well-known address.
pub struct NoPublish;

impl Publisher for NoPublish {
    fn publish(&self, _: &str, _: &ModuleAddress) -> Result<(), ActmodError> {
        Ok(())
    }
}

/// Locates every module at one known address.
#[derive(Debug, Clone)]
pub struct FixedAddress(pub ModuleAddress);

impl Locator for FixedAddress {
    fn locate(&self, _: &str) -> Result<ModuleAddress, ActmodError> {
        Ok(self.0.clone())
    }
}

pub fn addr_text(addr: &ModuleAddress) -> String {
    format!("{} {}\n", addr.host, addr.port)
}

pub fn parse_addr_text(text: &str) -> Option<ModuleAddress> {
    let mut parts = text.split_whitespace();
    let host = parts.next()?;
    let port = parts.next()?.parse().ok().filter(|&p: &u16| p > 0)?;
    parts.next().is_none().then(|| ModuleAddress::new(host, port))
}

fn check_module_name(module: &str) -> Result<(), String> {
    if module.is_empty() || module.contains(['/', '\\']) || module.starts_with('.') {
        Err(format!("bad module name {module:?}"))
    } else {
        Ok(())
    }
}

/// A directory shared by servers and clients.
#[derive(Debug, Clone)]
pub struct FileDirectory {
    dir: PathBuf,
}

impl FileDirectory {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FileDirectory { dir: dir.into() }
    }

    pub fn addr_path(&self, module: &str) -> PathBuf {
        self.dir.join(format!("{module}.addr"))
    }
}

/// Writes via a temporary file and a rename, so readers never see a
/// partial file.
fn write_atomically(dir: &Path, module: &str, contents: &str) -> Result<(), ActmodError> {
    check_module_name(module).map_err(ActmodError::PublishFailed)?;
    let fail = |e: std::io::Error| ActmodError::PublishFailed(format!("{}: {e}", dir.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.persist(dir.join(format!("{module}.addr")))
        .map_err(|e| fail(e.error))?;
    Ok(())
}

impl Publisher for FileDirectory {
    fn publish(&self, module: &str, addr: &ModuleAddress) -> Result<(), ActmodError> {
        write_atomically(&self.dir, module, &addr_text(addr))
    }
}

impl Locator for FileDirectory {
    fn locate(&self, module: &str) -> Result<ModuleAddress, ActmodError> {
        check_module_name(module).map_err(|r| ActmodError::locate(module, r))?;
        let path = self.addr_path(module);
        let text = fs::read_to_string(&path)
            .map_err(|e| ActmodError::locate(module, format!("{}: {e}", path.display())))?;
        parse_addr_text(&text)
            .ok_or_else(|| ActmodError::locate(module, format!("{} is malformed", path.display())))
    }
}

/// Publishes into a directory that a web server exposes at `base`;
/// locates by fetching `<base><module>.addr` over HTTP.
#[derive(Debug, Clone)]
pub struct WebDirectory {
    dir: PathBuf,
    base: UrlInfo,
}

impl WebDirectory {
    pub fn new(dir: impl Into<PathBuf>, base: UrlInfo) -> Self {
        WebDirectory { dir: dir.into(), base }
    }
}

impl Publisher for WebDirectory {
    fn publish(&self, module: &str, addr: &ModuleAddress) -> Result<(), ActmodError> {
        write_atomically(&self.dir, module, &addr_text(addr))
    }
}

impl Locator for WebDirectory {
    fn locate(&self, module: &str) -> Result<ModuleAddress, ActmodError> {
        check_module_name(module).map_err(|r| ActmodError::locate(module, r))?;
        let fail = |r: String| ActmodError::locate(module, r);
        let url = url_info_relative(&format!("{module}.addr"), &self.base).map_err(|e| fail(e.to_string()))?;
        let response = fetch(&url, &[]).map_err(|e| fail(format!("{url}: {e}")))?;
        match status_of(&response) {
            Some((StatusClass::Success, _, _)) => {}
            Some((_, code, phrase)) => return Err(fail(format!("{url}: {code} {phrase}"))),
            None => return Err(fail(format!("{url}: no status"))),
        }
        let body = content_of(&response).unwrap_or_default();
        std::str::from_utf8(body)
            .ok()
            .and_then(parse_addr_text)
            .ok_or_else(|| fail(format!("{url} is malformed")))
    }
}
