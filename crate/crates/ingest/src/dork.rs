use crate::{IngestError, Result};

/// Search queries for public previews and private invites mentioning `term`.
pub fn build_dorks(term: &str) -> Result<Vec<String>> {
    if term.trim().is_empty() {
        return Err(IngestError::EmptyTerm);
    }
    Ok(vec![
        format!("site:t.me/s \"{term}\""),
        format!("site:t.me/+ \"{term}\""),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_queries_per_term() {
        assert_eq!(
            build_dorks("Carding").unwrap(),
            ["site:t.me/s \"Carding\"", "site:t.me/+ \"Carding\""]
        );
        assert_eq!(build_dorks("Ransomware").unwrap()[1], "site:t.me/+ \"Ransomware\"");
    }

    #[test]
    fn blank_term_is_rejected() {
        assert!(matches!(build_dorks("  "), Err(IngestError::EmptyTerm)));
        assert!(build_dorks("").is_err());
    }
}
