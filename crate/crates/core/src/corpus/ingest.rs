use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RawComment;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Fail on the first bad record.
    #[default]
    Strict,
    /// Skip bad records and report them.
    Lenient,
}

/// Result of reading a JSON Lines corpus.
#[derive(Debug, Default)]
pub struct Ingested {
    pub comments: Vec<RawComment>,
    /// Record-level errors that were skipped in lenient mode.
    pub errors: Vec<Error>,
}

#[derive(Deserialize)]
struct Record {
    author: Option<String>,
    community: Option<String>,
    body: Option<String>,
    created_at: Option<i64>,
}

fn parse_line(line: &str, lineno: usize) -> Result<RawComment> {
    let rec: Record = serde_json::from_str(line).map_err(|e| Error::Record {
        line: lineno,
        message: format!("malformed record: {e}"),
    })?;
    let missing = |field: &str| Error::Record {
        line: lineno,
        message: format!("missing required field `{field}`"),
    };
    let author_id = rec.author.filter(|s| !s.is_empty()).ok_or_else(|| missing("author"))?;
    let community_id = rec
        .community
        .filter(|s| !s.is_empty())
        .ok_or_else(|| missing("community"))?;
    let body = rec.body.ok_or_else(|| missing("body"))?;
    Ok(RawComment {
        author_id,
        community_id,
        body,
        created_at: rec.created_at,
    })
}

/// Read line-delimited comment records. Blank lines are ignored; line numbers
/// in errors are 1-based.
pub fn ingest_jsonl<R: BufRead>(reader: R, mode: Strictness) -> Result<Ingested> {
    let mut out = Ingested::default();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::Record {
            line: lineno,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(&line, lineno) {
            Ok(c) => out.comments.push(c),
            Err(e) if mode == Strictness::Lenient => out.errors.push(e),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct OutRecord<'a> {
    author: &'a str,
    community: &'a str,
    body: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    created_at: Option<i64>,
}

/// Write comments in the format read by [`ingest_jsonl`].
pub fn write_jsonl<W: Write>(mut w: W, comments: &[RawComment]) -> Result<()> {
    for c in comments {
        let rec = OutRecord {
            author: &c.author_id,
            community: &c.community_id,
            body: &c.body,
            created_at: c.created_at,
        };
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n").map_err(|e| Error::io("<jsonl>", e))?;
    }
    Ok(())
}

pub fn ingest_path(path: &Path, mode: Strictness) -> Result<Ingested> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    ingest_jsonl(std::io::BufReader::new(f), mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn written_records_read_back() {
        let comments = vec![
            RawComment {
                author_id: "u1".into(),
                community_id: "a".into(),
                body: "hi \"there\"".into(),
                created_at: Some(3),
            },
            RawComment {
                author_id: "u2".into(),
                community_id: "b".into(),
                body: String::new(),
                created_at: None,
            },
        ];
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &comments).unwrap();
        assert_eq!(
            ingest_jsonl(buf.as_slice(), Strictness::Strict).unwrap().comments,
            comments
        );
    }

    #[test]
    fn maps_fields_directly() {
        let src = r#"{"author":"u1","community":"lost","body":"hi"}"#;
        let got = ingest_jsonl(src.as_bytes(), Strictness::Strict).unwrap();
        assert_eq!(
            got.comments,
            vec![RawComment {
                author_id: "u1".into(),
                community_id: "lost".into(),
                body: "hi".into(),
                created_at: None,
            }]
        );
    }

    #[test]
    fn empty_stream() {
        let got = ingest_jsonl(&b""[..], Strictness::Strict).unwrap();
        assert!(got.comments.is_empty());
        assert!(got.errors.is_empty());
    }

    #[test]
    fn lenient_skips_bad_lines() {
        let src = "{\"author\":\"a\",\"community\":\"c\",\"body\":\"x\",\"created_at\":5}\nnot json\n";
        let got = ingest_jsonl(src.as_bytes(), Strictness::Lenient).unwrap();
        assert_eq!(got.comments.len(), 1);
        assert_eq!(got.comments[0].created_at, Some(5));
        assert_eq!(got.errors.len(), 1);
        assert!(matches!(got.errors[0], Error::Record { line: 2, .. }));
    }

    #[test]
    fn strict_reports_line_number() {
        let src = "{\"author\":\"a\",\"community\":\"c\",\"body\":\"x\"}\n\n{\"author\":\"a\",\"body\":\"x\"}\n";
        let err = ingest_jsonl(src.as_bytes(), Strictness::Strict).unwrap_err();
        match err {
            Error::Record { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("community"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_author_is_rejected() {
        let src = r#"{"author":"","community":"c","body":"x"}"#;
        assert!(ingest_jsonl(src.as_bytes(), Strictness::Strict).is_err());
    }

    #[test]
    fn input_order_is_preserved() {
        let src = (0..20)
            .map(|i| format!("{{\"author\":\"u{i}\",\"community\":\"c\",\"body\":\"\"}}"))
            .collect::<Vec<_>>()
            .join("\n");
        let got = ingest_jsonl(src.as_bytes(), Strictness::Strict).unwrap();
        let authors: Vec<_> = got.comments.iter().map(|c| c.author_id.clone()).collect();
        let want: Vec<_> = (0..20).map(|i| format!("u{i}")).collect();
        assert_eq!(authors, want);
    }
}
