use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};

use crate::html::{Element, ElementTree};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MediaKind {
    #[default]
    None,
    Photo,
    Audio,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelegramMessage {
    pub resource: String,
    pub message_id: String,
    pub author: Option<String>,
    pub timestamp: Option<DateTime<FixedOffset>>,
    pub text: String,
    pub media_kind: MediaKind,
}

/// Class names and attributes that locate message parts in a preview page.
/// Defaults follow the current t.me/s markup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Selectors {
    pub message_class: String,
    /// Attribute holding `<resource>/<message id>`.
    pub post_attr: String,
    pub text_class: String,
    pub author_class: String,
    pub time_tag: String,
    pub time_attr: String,
    pub photo_classes: Vec<String>,
    pub audio_classes: Vec<String>,
    pub other_media_classes: Vec<String>,
}

impl Default for Selectors {
    fn default() -> Self {
        let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        Self {
            message_class: "tgme_widget_message".into(),
            post_attr: "data-post".into(),
            text_class: "tgme_widget_message_text".into(),
            author_class: "tgme_widget_message_owner_name".into(),
            time_tag: "time".into(),
            time_attr: "datetime".into(),
            photo_classes: v(&["tgme_widget_message_photo_wrap", "tgme_widget_message_photo"]),
            audio_classes: v(&["tgme_widget_message_voice", "tgme_widget_message_audio"]),
            other_media_classes: v(&[
                "tgme_widget_message_video_player",
                "tgme_widget_message_document_wrap",
                "tgme_widget_message_sticker_wrap",
                "tgme_widget_message_roundvideo_player",
            ]),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Extraction {
    pub messages: Vec<TelegramMessage>,
    pub diagnostics: Vec<String>,
}

fn has_any(e: &Element, classes: &[String]) -> bool {
    classes.iter().any(|c| e.has_class(c))
}

/// Messages of a t.me/s preview page in page order. Malformed markup is
/// parsed best-effort; blocks without a usable post id are skipped with a
/// diagnostic.
pub fn extract_messages(html: &str, sel: &Selectors) -> Extraction {
    let tree = ElementTree::parse(html);
    let mut out = Extraction::default();
    let blocks = tree.find_outermost(tree.root(), |e| e.has_class(&sel.message_class));
    for (i, block) in blocks.into_iter().enumerate() {
        let el = tree.get(block);
        let Some((resource, message_id)) = el.attr(&sel.post_attr).and_then(|p| p.rsplit_once('/')) else {
            out.diagnostics
                .push(format!("message block {i}: missing or malformed {}", sel.post_attr));
            continue;
        };
        if resource.is_empty() || message_id.is_empty() {
            out.diagnostics
                .push(format!("message block {i}: malformed {}", sel.post_attr));
            continue;
        }
        let text = tree
            .find(block, |e| e.has_class(&sel.text_class))
            .map(|n| tree.text(n))
            .unwrap_or_default();
        let author = tree
            .find(block, |e| e.has_class(&sel.author_class))
            .map(|n| tree.text(n))
            .filter(|a| !a.is_empty());
        let timestamp = tree
            .find(block, |e| e.name == sel.time_tag && e.attr(&sel.time_attr).is_some())
            .and_then(|n| {
                let raw = tree.get(n).attr(&sel.time_attr).unwrap_or_default();
                DateTime::parse_from_rfc3339(raw)
                    .map_err(|e| {
                        out.diagnostics
                            .push(format!("message {message_id}: bad timestamp {raw:?}: {e}"))
                    })
                    .ok()
            });
        let media = tree.descendants(block);
        let media_kind = if media.iter().any(|&n| has_any(tree.get(n), &sel.photo_classes)) {
            MediaKind::Photo
        } else if media.iter().any(|&n| has_any(tree.get(n), &sel.audio_classes)) {
            MediaKind::Audio
        } else if media.iter().any(|&n| has_any(tree.get(n), &sel.other_media_classes)) {
            MediaKind::Other
        } else {
            MediaKind::None
        };
        out.messages.push(TelegramMessage {
            resource: resource.to_owned(),
            message_id: message_id.to_owned(),
            author,
            timestamp,
            text,
            media_kind,
        });
    }
    if out.messages.is_empty() {
        out.diagnostics
            .push(format!("no elements with class {:?} found", sel.message_class));
    }
    out
}
