use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{IngestError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LinkKind {
    /// `t.me/s/<identifier>`: readable without joining.
    Public(String),
    /// `t.me/+<hash>`: invitation to a private group.
    PrivateInvite(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TelegramLink {
    pub kind: LinkKind,
    pub raw: String,
}

impl TelegramLink {
    /// Canonical https URL for this link.
    pub fn render(&self) -> String {
        self.kind.to_string()
    }
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkKind::Public(id) => write!(f, "https://t.me/s/{id}"),
            LinkKind::PrivateInvite(hash) => write!(f, "https://t.me/+{hash}"),
        }
    }
}

fn valid_identifier(id: &str) -> bool {
    let mut chars = id.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn valid_hash(hash: &str) -> bool {
    !hash.is_empty() && hash.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Classify a t.me URL. Scheme (`http`/`https`/none) and a `www.` prefix
/// are ignored; query strings, fragments and one trailing slash are dropped.
pub fn classify_link(url: &str) -> Result<TelegramLink> {
    let fail = || IngestError::NotTelegram(url.to_owned());
    let trimmed = url.trim();
    let rest = match trimmed.split_once("://") {
        Some((scheme, rest)) if scheme.eq_ignore_ascii_case("http") || scheme.eq_ignore_ascii_case("https") => rest,
        Some(_) => return Err(fail()),
        None => trimmed,
    };
    let rest = rest.split(['?', '#']).next().unwrap_or_default();
    let (host, path) = rest.split_once('/').ok_or_else(fail)?;
    let host = host.to_ascii_lowercase();
    if host.strip_prefix("www.").unwrap_or(&host) != "t.me" {
        return Err(fail());
    }
    let path = path.strip_suffix('/').unwrap_or(path);
    let kind = if let Some(id) = path.strip_prefix("s/") {
        if !valid_identifier(id) {
            return Err(fail());
        }
        LinkKind::Public(id.to_owned())
    } else if let Some(hash) = path.strip_prefix('+') {
        if !valid_hash(hash) {
            return Err(fail());
        }
        LinkKind::PrivateInvite(hash.to_owned())
    } else {
        return Err(fail());
    };
    Ok(TelegramLink {
        kind,
        raw: url.to_owned(),
    })
}
