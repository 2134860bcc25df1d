//! Minimal element tree built from the html5ever tokenizer.
//!
//! Only what message extraction needs: nesting, attributes and text. Void
//! elements never take children; a stray end tag closes the nearest open
//! element of the same name or is ignored.

use html5ever::tendril::StrTendril;
use html5ever::tokenizer::states::RawKind;
use html5ever::tokenizer::{BufferQueue, TagKind, Token, TokenSink, TokenSinkResult, Tokenizer, TokenizerOpts};

const VOID: [&str; 14] = [
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source", "track", "wbr",
];

const RAW_TEXT: [&str; 2] = ["script", "style"];

#[derive(Debug, Clone, PartialEq)]
pub enum Child {
    Element(usize),
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Child>,
}

impl Element {
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    pub fn has_class(&self, class: &str) -> bool {
        self.attr("class")
            .is_some_and(|c| c.split_ascii_whitespace().any(|c| c == class))
    }
}

/// Arena of elements; index 0 is a synthetic root.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementTree {
    nodes: Vec<Element>,
}

struct Builder {
    nodes: Vec<Element>,
    stack: Vec<usize>,
}

impl Builder {
    fn top(&mut self) -> &mut Element {
        let i = *self.stack.last().expect("root never popped");
        &mut self.nodes[i]
    }

    fn push_text(&mut self, s: &str) {
        match self.top().children.last_mut() {
            Some(Child::Text(t)) => t.push_str(s),
            _ => self.top().children.push(Child::Text(s.to_owned())),
        }
    }
}

impl TokenSink for Builder {
    type Handle = ();

    fn process_token(&mut self, token: Token, _line: u64) -> TokenSinkResult<()> {
        match token {
            Token::TagToken(tag) => {
                let name = tag.name.to_string();
                match tag.kind {
                    TagKind::StartTag => {
                        let id = self.nodes.len();
                        self.nodes.push(Element {
                            name: name.clone(),
                            attrs: tag
                                .attrs
                                .iter()
                                .map(|a| (a.name.local.to_string(), a.value.to_string()))
                                .collect(),
                            children: Vec::new(),
                        });
                        self.top().children.push(Child::Element(id));
                        if !tag.self_closing && !VOID.contains(&name.as_str()) {
                            self.stack.push(id);
                            match name.as_str() {
                                "script" => return TokenSinkResult::RawData(RawKind::ScriptData),
                                "style" => return TokenSinkResult::RawData(RawKind::Rawtext),
                                "title" | "textarea" => return TokenSinkResult::RawData(RawKind::Rcdata),
                                _ => {}
                            }
                        }
                    }
                    TagKind::EndTag => {
                        if let Some(pos) = self.stack.iter().rposition(|&i| i != 0 && self.nodes[i].name == name) {
                            self.stack.truncate(pos);
                        }
                    }
                }
            }
            Token::CharacterTokens(text) => self.push_text(&text),
            _ => {}
        }
        TokenSinkResult::Continue
    }
}

impl ElementTree {
    /// Parse `html`. Never fails; malformed markup yields a best-effort tree.
    pub fn parse(html: &str) -> Self {
        let root = Element {
            name: String::new(),
            attrs: Vec::new(),
            children: Vec::new(),
        };
        let builder = Builder {
            nodes: vec![root],
            stack: vec![0],
        };
        let mut tokenizer = Tokenizer::new(builder, TokenizerOpts::default());
        let mut input = BufferQueue::default();
        input.push_back(StrTendril::from(html));
        let _ = tokenizer.feed(&mut input);
        tokenizer.end();
        Self {
            nodes: tokenizer.sink.nodes,
        }
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn get(&self, id: usize) -> &Element {
        &self.nodes[id]
    }

    /// Elements below `id` in document order, pre-order.
    pub fn descendants(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut todo: Vec<usize> = self.child_elements(id).rev().collect();
        while let Some(n) = todo.pop() {
            out.push(n);
            todo.extend(self.child_elements(n).rev());
        }
        out
    }

    fn child_elements(&self, id: usize) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.nodes[id].children.iter().filter_map(|c| match c {
            Child::Element(e) => Some(*e),
            Child::Text(_) => None,
        })
    }

    /// First descendant (pre-order) matching `pred`.
    pub fn find(&self, id: usize, pred: impl Fn(&Element) -> bool) -> Option<usize> {
        self.descendants(id).into_iter().find(|&n| pred(&self.nodes[n]))
    }

    /// Outermost elements below `id` matching `pred`; matches nested inside
    /// a match are skipped.
    pub fn find_outermost(&self, id: usize, pred: impl Fn(&Element) -> bool) -> Vec<usize> {
        let mut out = Vec::new();
        let mut todo: Vec<usize> = self.child_elements(id).rev().collect();
        while let Some(n) = todo.pop() {
            if pred(&self.nodes[n]) {
                out.push(n);
            } else {
                todo.extend(self.child_elements(n).rev());
            }
        }
        out
    }

    /// Text content with `<br>` read as a space and whitespace collapsed.
    pub fn text(&self, id: usize) -> String {
        let mut raw = String::new();
        self.collect_text(id, &mut raw);
        raw.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    fn collect_text(&self, id: usize, out: &mut String) {
        for child in &self.nodes[id].children {
            match child {
                Child::Text(t) => out.push_str(t),
                Child::Element(e) => {
                    let name = self.nodes[*e].name.as_str();
                    if name == "br" {
                        out.push(' ');
                    } else if !RAW_TEXT.contains(&name) {
                        self.collect_text(*e, out);
                    }
                }
            }
        }
    }
}
