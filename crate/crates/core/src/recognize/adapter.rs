//! Line protocol for span predictions produced outside this process.
//!
//! The adapter first writes the handshake `{"protocol":"ner-adapter/1"}`.
//! Each request `{"id","text"}` is answered by exactly one response line
//! `{"id","entities":[...]}`, in request order. A static prediction file uses
//! the same framing: a handshake line followed by response lines.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use serde::{Deserialize, Serialize};

use super::{RecognizeError, Result};
use crate::corpus::{CharIndex, Document, EntitySpan, LabelMap};

pub const PROTOCOL: &str = "ner-adapter/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Handshake {
    pub protocol: String,
}

impl Handshake {
    pub fn current() -> Self {
        Self {
            protocol: PROTOCOL.to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdapterRequest {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterEntity {
    pub label: String,
    pub start: usize,
    pub end: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterResponse {
    pub id: String,
    #[serde(default)]
    pub entities: Vec<AdapterEntity>,
}

/// Where an adapter's predictions come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdapterSource {
    /// Program and arguments of a subprocess speaking the protocol.
    Command(Vec<String>),
    /// Static prediction file.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdapterDecl {
    pub name: String,
    pub source: AdapterSource,
    #[serde(default)]
    pub label_map: LabelMap,
}

/// Anything that answers protocol requests.
pub trait PredictionSource {
    fn predict(&mut self, request: &AdapterRequest) -> Result<AdapterResponse>;
}

fn protocol_error(adapter: &str, reason: impl Into<String>) -> RecognizeError {
    RecognizeError::Protocol {
        adapter: adapter.to_owned(),
        reason: reason.into(),
    }
}

fn check_handshake(adapter: &str, line: Option<&str>) -> Result<()> {
    let line = line.ok_or_else(|| protocol_error(adapter, "no handshake line"))?;
    match serde_json::from_str::<Handshake>(line.trim()) {
        Ok(h) if h.protocol == PROTOCOL => Ok(()),
        Ok(h) => Err(protocol_error(
            adapter,
            format!("unsupported protocol {:?}", h.protocol),
        )),
        Err(e) => Err(protocol_error(adapter, format!("bad handshake {line:?}: {e}"))),
    }
}

/// A child process that speaks the protocol over stdin/stdout.
pub struct SubprocessAdapter {
    name: String,
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: BufReader<ChildStdout>,
}

impl SubprocessAdapter {
    pub fn spawn(name: &str, argv: &[String]) -> Result<Self> {
        let (program, args) = argv
            .split_first()
            .ok_or_else(|| protocol_error(name, "empty command"))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| protocol_error(name, format!("cannot launch {program:?}: {e}")))?;
        let stdin = child.stdin.take();
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        let mut adapter = Self {
            name: name.to_owned(),
            child,
            stdin,
            stdout,
        };
        let first = adapter.read_line()?;
        check_handshake(name, first.as_deref())?;
        Ok(adapter)
    }

    fn read_line(&mut self) -> Result<Option<String>> {
        let mut line = String::new();
        let n = self
            .stdout
            .read_line(&mut line)
            .map_err(|e| protocol_error(&self.name, e.to_string()))?;
        Ok((n > 0).then_some(line))
    }
}

impl PredictionSource for SubprocessAdapter {
    fn predict(&mut self, request: &AdapterRequest) -> Result<AdapterResponse> {
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| protocol_error(&self.name, "stdin closed"))?;
        let line = serde_json::to_string(request).expect("request serializes");
        writeln!(stdin, "{line}")
            .and_then(|_| stdin.flush())
            .map_err(|e| protocol_error(&self.name, format!("write failed: {e}")))?;
        let reply = self
            .read_line()?
            .ok_or_else(|| protocol_error(&self.name, "adapter closed its output"))?;
        serde_json::from_str(reply.trim())
            .map_err(|e| protocol_error(&self.name, format!("bad response {:?}: {e}", reply.trim())))
    }
}

impl Drop for SubprocessAdapter {
    fn drop(&mut self) {
        // Closing stdin tells the adapter to exit.
        self.stdin.take();
        let _ = self.child.wait();
    }
}

/// Predictions replayed from a file, looked up by document id.
#[derive(Debug, Clone)]
pub struct FileAdapter {
    name: String,
    responses: HashMap<String, AdapterResponse>,
}

impl FileAdapter {
    pub fn open(name: &str, path: &Path) -> Result<Self> {
        let file =
            File::open(path).map_err(|e| protocol_error(name, format!("cannot open {}: {e}", path.display())))?;
        Self::from_reader(name, BufReader::new(file))
    }

    pub fn from_reader(name: &str, reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines().filter(|l| !matches!(l, Ok(s) if s.trim().is_empty()));
        let first = lines
            .next()
            .transpose()
            .map_err(|e| protocol_error(name, e.to_string()))?;
        check_handshake(name, first.as_deref())?;
        let mut responses = HashMap::new();
        for line in lines {
            let line = line.map_err(|e| protocol_error(name, e.to_string()))?;
            let response: AdapterResponse = serde_json::from_str(line.trim())
                .map_err(|e| protocol_error(name, format!("bad response {:?}: {e}", line.trim())))?;
            if responses.contains_key(&response.id) {
                return Err(protocol_error(name, format!("duplicate id {:?}", response.id)));
            }
            responses.insert(response.id.clone(), response);
        }
        Ok(Self {
            name: name.to_owned(),
            responses,
        })
    }
}

impl PredictionSource for FileAdapter {
    fn predict(&mut self, request: &AdapterRequest) -> Result<AdapterResponse> {
        self.responses
            .get(&request.id)
            .cloned()
            .ok_or_else(|| protocol_error(&self.name, format!("no prediction for {:?}", request.id)))
    }
}

/// A named prediction source plus the label map applied to its output.
pub struct ExternalAdapter {
    name: String,
    label_map: LabelMap,
    source: Box<dyn PredictionSource + Send>,
}

impl ExternalAdapter {
    pub fn new(name: impl Into<String>, label_map: LabelMap, source: Box<dyn PredictionSource + Send>) -> Self {
        Self {
            name: name.into(),
            label_map,
            source,
        }
    }

    pub fn open(decl: &AdapterDecl) -> Result<Self> {
        let source: Box<dyn PredictionSource + Send> = match &decl.source {
            AdapterSource::Command(argv) => Box::new(SubprocessAdapter::spawn(&decl.name, argv)?),
            AdapterSource::File(path) => Box::new(FileAdapter::open(&decl.name, path)?),
        };
        Ok(Self::new(decl.name.clone(), decl.label_map.clone(), source))
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// Ask the adapter for spans on `doc` and validate them against its text.
pub fn recognize_external(doc: &Document, adapter: &mut ExternalAdapter) -> Result<Vec<EntitySpan>> {
    let request = AdapterRequest {
        id: doc.id.clone(),
        text: doc.text.clone(),
    };
    let response = adapter.source.predict(&request)?;
    let fail = |record: String, reason: String| RecognizeError::Adapter {
        adapter: adapter.name.clone(),
        doc_id: doc.id.clone(),
        record,
        reason,
    };
    if response.id != doc.id {
        return Err(fail(
            format!("id {:?}", response.id),
            "response id does not match request".into(),
        ));
    }
    let index = CharIndex::new(&doc.text);
    let mut spans = Vec::with_capacity(response.entities.len());
    for entity in response.entities {
        let record = serde_json::to_string(&entity).expect("entity serializes");
        let label = adapter
            .label_map
            .get(&entity.label)
            .ok_or_else(|| fail(record.clone(), format!("unmapped label {:?}", entity.label)))?;
        if entity.start >= entity.end || entity.end > index.char_len() {
            return Err(fail(
                record,
                format!("offsets out of range for text of {} code points", index.char_len()),
            ));
        }
        let actual = index.slice(&doc.text, entity.start, entity.end).expect("range checked");
        if let Some(text) = &entity.text {
            if text != actual {
                return Err(fail(record, format!("surface mismatch: text has {actual:?}")));
            }
        }
        let span = EntitySpan {
            label: label.to_owned(),
            start: entity.start,
            end: entity.end,
            surface: actual.to_owned(),
            score: entity.score.unwrap_or(1.0),
            source: adapter.name.clone(),
        };
        span.validate_indexed(&doc.text, &index)
            .map_err(|e| fail(record, e.to_string()))?;
        spans.push(span);
    }
    spans.sort_by(crate::corpus::span_order);
    Ok(spans)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Scripted(Vec<AdapterEntity>);

    impl PredictionSource for Scripted {
        fn predict(&mut self, request: &AdapterRequest) -> Result<AdapterResponse> {
            Ok(AdapterResponse {
                id: request.id.clone(),
                entities: self.0.clone(),
            })
        }
    }

    fn adapter(entities: &str) -> ExternalAdapter {
        let map = LabelMap::new([("PER".to_string(), "NAME".to_string())].into()).unwrap();
        let entities: Vec<AdapterEntity> = serde_json::from_str(entities).unwrap();
        ExternalAdapter::new("model", map, Box::new(Scripted(entities)))
    }

    #[test]
    fn echoes_normalized_spans() {
        let mut a = adapter(r#"[{"label":"PER","start":0,"end":4,"text":"John","score":0.99}]"#);
        let spans = recognize_external(&Document::new("d1", "John left"), &mut a).unwrap();
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0].label, "NAME");
        assert_eq!(spans[0].surface, "John");
        assert_eq!(spans[0].score, 0.99);
        assert_eq!(spans[0].source, "model");
    }

    #[test]
    fn empty_predictions() {
        let mut a = adapter("[]");
        assert!(recognize_external(&Document::new("d1", "John left"), &mut a)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn out_of_range_and_mismatch_are_reported() {
        let mut a = adapter(r#"[{"label":"PER","start":5,"end":40}]"#);
        let err = recognize_external(&Document::new("d1", "John left"), &mut a).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("d1") && msg.contains("\"end\":40"), "{msg}");

        let mut a = adapter(r#"[{"label":"PER","start":0,"end":4,"text":"Jane"}]"#);
        assert!(recognize_external(&Document::new("d1", "John left"), &mut a).is_err());

        let mut a = adapter(r#"[{"label":"ORG","start":0,"end":4}]"#);
        assert!(recognize_external(&Document::new("d1", "John left"), &mut a).is_err());

        let mut a = adapter(r#"[{"label":"PER","start":0,"end":4,"score":3.0}]"#);
        assert!(recognize_external(&Document::new("d1", "John left"), &mut a).is_err());
    }

    #[test]
    fn file_adapter_replays_by_id() {
        let file = concat!(
            r#"{"protocol":"ner-adapter/1"}"#,
            "\n",
            r#"{"id":"b","entities":[{"label":"NAME","start":0,"end":3}]}"#,
            "\n",
            r#"{"id":"a","entities":[]}"#,
            "\n"
        );
        let source = FileAdapter::from_reader("f", file.as_bytes()).unwrap();
        let mut a = ExternalAdapter::new("f", LabelMap::default(), Box::new(source));
        let spans = recognize_external(&Document::new("b", "Ana"), &mut a).unwrap();
        assert_eq!(spans[0].surface, "Ana");
        assert!(recognize_external(&Document::new("zz", "x"), &mut a).is_err());
    }

    #[test]
    fn file_adapter_requires_handshake() {
        let bad = r#"{"id":"a","entities":[]}"#;
        assert!(FileAdapter::from_reader("f", bad.as_bytes()).is_err());
        let wrong = r#"{"protocol":"ner-adapter/9"}"#;
        assert!(FileAdapter::from_reader("f", wrong.as_bytes()).is_err());
    }

    #[test]
    fn source_declaration_json() {
        let decl: AdapterDecl = serde_json::from_str(
            r#"{"name":"bert","source":{"command":["python3","serve.py"]},"label_map":{"table":{"PER":"NAME"}}}"#,
        )
        .unwrap();
        assert_eq!(
            decl.source,
            AdapterSource::Command(vec!["python3".into(), "serve.py".into()])
        );
    }
}
