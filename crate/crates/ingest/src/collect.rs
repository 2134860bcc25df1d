use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::{
    build_dorks, classify_link, extract_messages, paced_schedule, IngestError, LinkKind, PacingPolicy, Result,
    Selectors, TelegramLink, TelegramMessage,
};

/// Retrieves a page body by URL.
pub trait Fetcher {
    fn fetch(&mut self, url: &str) -> Result<String>;
}

/// Returns result URLs for a search query.
pub trait SearchEngine {
    fn search(&mut self, query: &str) -> Result<Vec<String>>;
}

pub trait Clock {
    fn sleep(&mut self, delay: Duration);
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn sleep(&mut self, delay: Duration) {
        std::thread::sleep(delay);
    }
}

/// Records requested sleeps without waiting.
#[derive(Debug, Default)]
pub struct ManualClock {
    pub slept: Vec<Duration>,
}

impl Clock for ManualClock {
    fn sleep(&mut self, delay: Duration) {
        self.slept.push(delay);
    }
}

/// Serves pages from memory or from files in a directory. A URL maps to
/// the file named by its last path segment plus `.html`.
#[derive(Debug, Default)]
pub struct FixtureFetcher {
    pages: BTreeMap<String, String>,
    dir: Option<PathBuf>,
    pub requests: Vec<String>,
}

impl FixtureFetcher {
    pub fn new(pages: BTreeMap<String, String>) -> Self {
        Self {
            pages,
            ..Self::default()
        }
    }

    pub fn from_dir(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: Some(dir.into()),
            ..Self::default()
        }
    }
}

impl Fetcher for FixtureFetcher {
    fn fetch(&mut self, url: &str) -> Result<String> {
        self.requests.push(url.to_owned());
        if let Some(page) = self.pages.get(url) {
            return Ok(page.clone());
        }
        let name = url.trim_end_matches('/').rsplit('/').next().unwrap_or_default();
        match &self.dir {
            Some(dir) if !name.is_empty() => {
                let path = dir.join(format!("{name}.html"));
                std::fs::read_to_string(&path).map_err(|_| IngestError::MissingFixture(url.to_owned()))
            }
            _ => Err(IngestError::MissingFixture(url.to_owned())),
        }
    }
}

#[derive(Debug, Default)]
pub struct FixtureSearch {
    pub results: BTreeMap<String, Vec<String>>,
}

impl SearchEngine for FixtureSearch {
    fn search(&mut self, query: &str) -> Result<Vec<String>> {
        Ok(self.results.get(query).cloned().unwrap_or_default())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FetcherKind {
    #[default]
    Fixture,
    Live,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FetcherConfig {
    pub fetcher: FetcherKind,
    pub fixture_dir: Option<PathBuf>,
}

/// Build the configured fetcher. Live access is not compiled in.
pub fn open_fetcher(cfg: &FetcherConfig) -> Result<FixtureFetcher> {
    match cfg.fetcher {
        FetcherKind::Live => Err(IngestError::LiveDisabled),
        FetcherKind::Fixture => Ok(match &cfg.fixture_dir {
            Some(dir) => FixtureFetcher::from_dir(dir),
            None => FixtureFetcher::default(),
        }),
    }
}

/// Append-only JSONL store keyed by `(resource, message_id)`.
pub struct MessageStore {
    file: File,
    seen: HashSet<(String, String)>,
}

impl MessageStore {
    /// Open or create `path`, rebuilding the id index from its contents.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut seen = HashSet::new();
        if path.exists() {
            for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let m: TelegramMessage =
                    serde_json::from_str(&line).map_err(|source| IngestError::Store { line: i + 1, source })?;
                seen.insert((m.resource, m.message_id));
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self { file, seen })
    }

    pub fn contains(&self, resource: &str, message_id: &str) -> bool {
        self.seen.contains(&(resource.to_owned(), message_id.to_owned()))
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }

    /// Append `msg` unless its key is already stored; returns whether it was written.
    pub fn append(&mut self, msg: &TelegramMessage) -> Result<bool> {
        let key = (msg.resource.clone(), msg.message_id.clone());
        if self.seen.contains(&key) {
            return Ok(false);
        }
        let mut line = serde_json::to_string(msg)?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.seen.insert(key);
        Ok(true)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CollectReport {
    pub queries: Vec<String>,
    pub public: Vec<String>,
    pub private_invites: Vec<String>,
    pub rejected_urls: Vec<String>,
    pub stored: usize,
    pub duplicates: usize,
    pub diagnostics: Vec<String>,
}

/// Search each term, classify result links, fetch public previews one at a
/// time with a paced delay before every fetch after the first, and store
/// new messages. Private invites are listed but never followed.
#[allow(clippy::too_many_arguments)]
pub fn collect(
    terms: &[String],
    engine: &mut dyn SearchEngine,
    fetcher: &mut dyn Fetcher,
    clock: &mut dyn Clock,
    policy: &PacingPolicy,
    selectors: &Selectors,
    store: &mut MessageStore,
) -> Result<CollectReport> {
    let mut report = CollectReport::default();
    let mut links: Vec<TelegramLink> = Vec::new();
    for term in terms {
        for query in build_dorks(term)? {
            for url in engine.search(&query)? {
                match classify_link(&url) {
                    Ok(link) if !links.iter().any(|l| l.kind == link.kind) => links.push(link),
                    Ok(_) => {}
                    Err(_) => report.rejected_urls.push(url),
                }
            }
            report.queries.push(query);
        }
    }
    let public: Vec<&TelegramLink> = links.iter().filter(|l| matches!(l.kind, LinkKind::Public(_))).collect();
    report.private_invites = links
        .iter()
        .filter(|l| matches!(l.kind, LinkKind::PrivateInvite(_)))
        .map(TelegramLink::render)
        .collect();
    let delays = paced_schedule(public.len().saturating_sub(1), policy);
    for (i, link) in public.into_iter().enumerate() {
        if i > 0 {
            clock.sleep(delays[i - 1]);
        }
        let url = link.render();
        let page = match fetcher.fetch(&url) {
            Ok(p) => p,
            Err(e) => {
                report.diagnostics.push(format!("{url}: {e}"));
                continue;
            }
        };
        let extraction = extract_messages(&page, selectors);
        report
            .diagnostics
            .extend(extraction.diagnostics.into_iter().map(|d| format!("{url}: {d}")));
        for msg in &extraction.messages {
            if store.append(msg)? {
                report.stored += 1;
            } else {
                report.duplicates += 1;
            }
        }
        report.public.push(url);
    }
    Ok(report)
}
