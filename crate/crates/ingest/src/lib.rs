//! Telegram OSINT collection helpers: dork queries, t.me link classification,
//! public preview page parsing, request pacing and a deduplicating message
//! store. All network access goes through the [`Fetcher`] and
//! [`SearchEngine`] traits; only fixture-backed implementations ship here.

mod collect;
mod dork;
mod html;
mod link;
mod pacing;
mod telegram;

pub use collect::{
    collect, open_fetcher, Clock, CollectReport, Fetcher, FetcherConfig, FetcherKind, FixtureFetcher, FixtureSearch,
    ManualClock, MessageStore, SearchEngine, SystemClock,
};
pub use dork::build_dorks;
pub use html::{Element, ElementTree};
pub use link::{classify_link, LinkKind, TelegramLink};
pub use pacing::{paced_schedule, PacingPolicy};
pub use telegram::{extract_messages, Extraction, MediaKind, Selectors, TelegramMessage};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("search term is empty")]
    EmptyTerm,
    #[error("not a telegram resource: {0}")]
    NotTelegram(String),
    #[error("invalid pacing policy: min {min} max {max}")]
    InvalidPacing { min: f64, max: f64 },
    #[error("live network access is disabled in this build")]
    LiveDisabled,
    #[error("no fixture for {0}")]
    MissingFixture(String),
    #[error("store line {line}: {source}")]
    Store {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = IngestError> = std::result::Result<T, E>;
