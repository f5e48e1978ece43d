//! A pragmatic subset of Reddit-flavoured markdown removal.
//!
//! Layout modifiers (emphasis, strike-through, superscript, headers, lists,
//! tables, links) are unwrapped to their text. Embedding modifiers (fenced,
//! indented and inline code, block quotes) are deleted with their content.
//! Anything else passes through untouched.

use std::sync::LazyLock;

use regex::Regex;

static HEADER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^#{1,6}(?:\s+|$)").unwrap());
static LIST_MARKER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(?:[*+-]|\d{1,9}[.)])\s+").unwrap());
static RULE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(?:(?:\*[ \t]*){3,}|(?:-[ \t]*){3,}|(?:_[ \t]*){3,}|=+[ \t]*)$").unwrap());
static TABLE_SEPARATOR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\|?[ \t]*:?-+:?[ \t]*(?:\|[ \t]*:?-+:?[ \t]*)*\|?$").unwrap());
static LINK: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"!?\[([^\]]*)\]\(\s*<?([^)\s>]*)>?(?:\s+"[^"]*")?\s*\)"#).unwrap());
static SPOILER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r">!(.*?)!<").unwrap());
static SUPERSCRIPT_GROUP: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\^\(([^)]*)\)").unwrap());
static SUPERSCRIPT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\^+(\S)").unwrap());

fn fence_open(trimmed: &str) -> Option<(char, usize)> {
    let first = trimmed.chars().next()?;
    if first != '`' && first != '~' {
        return None;
    }
    let n = trimmed.chars().take_while(|&c| c == first).count();
    (n >= 3).then_some((first, n))
}

fn is_fence_close(trimmed: &str, fence: (char, usize)) -> bool {
    let n = trimmed.chars().take_while(|&c| c == fence.0).count();
    n >= fence.1 && trimmed[n * fence.0.len_utf8()..].trim().is_empty()
}

fn indent_width(line: &str) -> usize {
    let mut w = 0;
    for c in line.chars() {
        match c {
            ' ' => w += 1,
            '\t' => w += 4,
            _ => break,
        }
    }
    w
}

/// Remove markdown from `text`, line by line.
pub fn strip_markdown(text: &str) -> String {
    let mut out: Vec<String> = Vec::new();
    let mut fence: Option<(char, usize)> = None;
    let mut in_indented = false;
    let mut prev_blank = true;

    for line in text.lines() {
        let trimmed = line.trim_start();
        if let Some(f) = fence {
            if is_fence_close(trimmed, f) {
                fence = None;
                prev_blank = true;
            }
            continue;
        }
        if let Some(f) = fence_open(trimmed) {
            fence = Some(f);
            continue;
        }
        let blank = trimmed.is_empty();
        if !blank && indent_width(line) >= 4 && (prev_blank || in_indented) {
            in_indented = true;
            prev_blank = false;
            continue;
        }
        if !blank {
            in_indented = false;
        }
        prev_blank = blank;
        if blank {
            out.push(String::new());
            continue;
        }
        if trimmed.starts_with('>') && !trimmed.starts_with(">!") {
            continue;
        }
        let trimmed = trimmed.trim_end();
        if RULE.is_match(trimmed) || (trimmed.contains('|') && TABLE_SEPARATOR.is_match(trimmed)) {
            continue;
        }
        let mut content = trimmed;
        if let Some(m) = HEADER.find(content) {
            content = content[m.end()..].trim_end_matches('#').trim_end();
        }
        while let Some(m) = LIST_MARKER.find(content) {
            content = &content[m.end()..];
        }
        out.push(strip_inline(content).replace('|', " "));
    }
    let mut s = out.join("\n");
    if text.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn strip_inline(line: &str) -> String {
    let s = strip_code_spans(line);
    let s = LINK.replace_all(&s, "$1 $2");
    let s = SPOILER.replace_all(&s, "$1");
    let s = SUPERSCRIPT_GROUP.replace_all(&s, "$1");
    let s = SUPERSCRIPT.replace_all(&s, "$1");
    let s = strip_emphasis(&s, '*', true, None);
    let s = strip_emphasis(&s, '_', false, None);
    strip_emphasis(&s, '~', true, Some(2))
}

/// Delete `code` spans, delimited by equal-length backtick runs. An unmatched
/// run is kept literally.
fn strip_code_spans(line: &str) -> String {
    let chars: Vec<char> = line.chars().collect();
    let mut out = String::with_capacity(line.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i] != '`' {
            out.push(chars[i]);
            i += 1;
            continue;
        }
        let run = run_len(&chars, i, '`');
        let mut j = i + run;
        let mut close = None;
        while j < chars.len() {
            if chars[j] == '`' {
                let r = run_len(&chars, j, '`');
                if r == run {
                    close = Some(j + r);
                    break;
                }
                j += r;
            } else {
                j += 1;
            }
        }
        match close {
            Some(end) => {
                out.push(' ');
                i = end;
            }
            None => {
                out.extend(std::iter::repeat_n('`', run));
                i += run;
            }
        }
    }
    out
}

fn run_len(chars: &[char], start: usize, c: char) -> usize {
    chars[start..].iter().take_while(|&&x| x == c).count()
}

/// Unwrap spans enclosed in matching runs of `delim`. With `intraword`
/// false the delimiters must sit on word boundaries, which keeps
/// `snake_case_words` intact.
fn strip_emphasis(s: &str, delim: char, intraword: bool, exact: Option<usize>) -> String {
    if !s.contains(delim) {
        return s.to_owned();
    }
    let chars: Vec<char> = s.chars().collect();
    let n = chars.len();
    let boundary_before = |i: usize| intraword || i == 0 || !chars[i - 1].is_alphanumeric();
    let boundary_after = |end: usize| intraword || end >= n || !chars[end].is_alphanumeric();
    let run_ok = |l: usize| exact.map_or(l <= 3, |e| l == e);

    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    while i < n {
        let c = chars[i];
        if c == '\\' && i + 1 < n && chars[i + 1] == delim {
            out.push('\\');
            out.push(delim);
            i += 2;
            continue;
        }
        if c != delim {
            out.push(c);
            i += 1;
            continue;
        }
        let l = run_len(&chars, i, delim);
        let opens = run_ok(l) && i + l < n && !chars[i + l].is_whitespace() && boundary_before(i);
        if opens {
            let mut j = i + l;
            let mut close = None;
            while j < n {
                if chars[j] == '\\' {
                    j += 2;
                    continue;
                }
                if chars[j] == delim {
                    let r = run_len(&chars, j, delim);
                    if r == l && !chars[j - 1].is_whitespace() && boundary_after(j + r) {
                        close = Some(j);
                        break;
                    }
                    j += r;
                } else {
                    j += 1;
                }
            }
            if let Some(j) = close {
                let inner: String = chars[i + l..j].iter().collect();
                out.push_str(&strip_emphasis(&inner, delim, intraword, exact));
                i = j + l;
                continue;
            }
        }
        out.extend(std::iter::repeat_n(delim, l));
        i += l;
    }
    out
}
