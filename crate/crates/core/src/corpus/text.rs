//! Code-point addressing over UTF-8 strings.

/// Number of Unicode scalar values in `s`.
pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Slice `s` by code-point offsets `[start, end)`.
pub fn char_slice(s: &str, start: usize, end: usize) -> Option<&str> {
    if start > end {
        return None;
    }
    let index = CharIndex::new(s);
    index.slice(s, start, end)
}

/// Precomputed code-point to byte offset table for one string.
///
/// Entry `i` is the byte offset of code point `i`; the final entry is the
/// byte length, so the table has `char_len + 1` entries.
#[derive(Debug, Clone)]
pub struct CharIndex {
    bytes: Vec<usize>,
}

impl CharIndex {
    pub fn new(s: &str) -> Self {
        let mut bytes: Vec<usize> = s.char_indices().map(|(b, _)| b).collect();
        bytes.push(s.len());
        Self { bytes }
    }

    pub fn char_len(&self) -> usize {
        self.bytes.len() - 1
    }

    pub fn byte_of(&self, cp: usize) -> Option<usize> {
        self.bytes.get(cp).copied()
    }

    /// Code-point index of a byte offset; `None` when the byte offset is not
    /// on a character boundary.
    pub fn char_of(&self, byte: usize) -> Option<usize> {
        self.bytes.binary_search(&byte).ok()
    }

    pub fn slice<'a>(&self, s: &'a str, start: usize, end: usize) -> Option<&'a str> {
        if start > end {
            return None;
        }
        Some(&s[self.byte_of(start)?..self.byte_of(end)?])
    }
}
