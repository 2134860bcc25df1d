//! Reference adapter for the `ner-adapter/1` line protocol.
//!
//! With `--gold FILE` it answers every request with the entities recorded
//! for that document id in a standoff JSONL file; otherwise it runs the
//! built-in patterns. Useful for testing pipelines and as a template for
//! wrapping real models.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use veilkit_core::corpus::{read_standoff, EntitySpan, OffsetUnit};
use veilkit_core::recognize::{
    default_patterns, recognize_patterns, AdapterEntity, AdapterRequest, AdapterResponse, CompiledPattern, Handshake,
    Pattern,
};
use veilkit_core::Document;

#[derive(Parser)]
#[command(
    name = "veilkit-adapter",
    version,
    about = "Span predictor speaking ner-adapter/1 on stdin/stdout"
)]
struct Args {
    /// Replay entities from this standoff JSONL file.
    #[arg(long)]
    gold: Option<PathBuf>,
}

enum Mode {
    Gold(HashMap<String, (String, Vec<EntitySpan>)>),
    Patterns(Vec<CompiledPattern>),
}

impl Mode {
    fn answer(&self, req: &AdapterRequest) -> Result<Vec<EntitySpan>, String> {
        match self {
            Mode::Gold(docs) => match docs.get(&req.id) {
                Some((text, _)) if *text != req.text => Err(format!("text of {:?} differs from the gold file", req.id)),
                Some((_, spans)) => Ok(spans.clone()),
                None => Ok(Vec::new()),
            },
            Mode::Patterns(patterns) => Ok(recognize_patterns(&Document::new(&req.id, &req.text), patterns)),
        }
    }
}

fn entity(span: EntitySpan) -> AdapterEntity {
    AdapterEntity {
        label: span.label,
        start: span.start,
        end: span.end,
        text: Some(span.surface),
        score: Some(span.score),
    }
}

fn serve(mode: &Mode) -> Result<(), String> {
    let stdin = io::stdin().lock();
    let mut stdout = io::stdout().lock();
    let send = |out: &mut io::StdoutLock, line: String| {
        writeln!(out, "{line}")
            .and_then(|_| out.flush())
            .map_err(|e| e.to_string())
    };
    send(
        &mut stdout,
        serde_json::to_string(&Handshake::current()).expect("handshake serializes"),
    )?;
    for line in stdin.lines() {
        let line = line.map_err(|e| e.to_string())?;
        if line.trim().is_empty() {
            continue;
        }
        let req: AdapterRequest = serde_json::from_str(&line).map_err(|e| format!("bad request: {e}"))?;
        let entities = mode.answer(&req)?.into_iter().map(entity).collect();
        let response = AdapterResponse { id: req.id, entities };
        send(
            &mut stdout,
            serde_json::to_string(&response).expect("response serializes"),
        )?;
    }
    Ok(())
}

fn load(args: &Args) -> Result<Mode, String> {
    match &args.gold {
        Some(path) => {
            let file = std::fs::File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let docs = read_standoff(io::BufReader::new(file), OffsetUnit::CodePoint).map_err(|e| e.to_string())?;
            Ok(Mode::Gold(
                docs.into_iter().map(|d| (d.doc.id, (d.doc.text, d.spans))).collect(),
            ))
        }
        None => default_patterns()
            .iter()
            .map(Pattern::compile)
            .collect::<Result<_, _>>()
            .map(Mode::Patterns)
            .map_err(|e| e.to_string()),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match load(&args).and_then(|mode| serve(&mode)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": { "kind": "data", "stage": "adapter", "message": e } })
            );
            ExitCode::FAILURE
        }
    }
}
