//! Reduction of a supported wikitext subset to plain paragraphs.
//!
//! Supported: headings, internal and external links, nested templates,
//! `<ref>` and a few other content-bearing tags, comments, tables, file and
//! category links, bold/italic quotes. Everything is stripped, nothing is
//! expanded.

use super::normalize::normalize_text;
use super::{Article, RawPage, Section};

/// Link namespaces whose targets are dropped together with their caption.
const DROPPED_LINK_PREFIXES: &[&str] = &[
    "file",
    "image",
    "media",
    "category", // en
    "datei",
    "bild",
    "kategorie", // de
    "fichier",
    "catégorie",
    "image", // fr
    "soubor",
    "obrázek",
    "kategorie", // cs
];

/// Tags removed together with their content.
const DROPPED_TAGS: &[&str] = &[
    "ref",
    "references",
    "gallery",
    "math",
    "timeline",
    "imagemap",
    "score",
    "chem",
    "graph",
];

const MAGIC_WORDS: &[&str] = &["__TOC__", "__NOTOC__", "__FORCETOC__", "__NOEDITSECTION__"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    Redirect,
    NonMainNamespace,
    EmptyLead,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Extracted {
    Article(Article),
    Skipped(SkipReason),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub outcome: Extracted,
    /// Recovered markup errors (unbalanced braces, unclosed tags, ...).
    pub warnings: usize,
}

impl Extraction {
    pub fn article(self) -> Option<Article> {
        match self.outcome {
            Extracted::Article(a) => Some(a),
            Extracted::Skipped(_) => None,
        }
    }
}

/// Turns a raw page into an [`Article`] with a lead and sectioned body.
///
/// Lead = every paragraph before the first heading.
pub fn extract_article(page: &RawPage) -> Extraction {
    if page.redirect || is_redirect_markup(&page.markup) {
        return skipped(SkipReason::Redirect);
    }
    if page.namespace != 0 {
        return skipped(SkipReason::NonMainNamespace);
    }

    let mut warnings = 0;
    let text = strip_markup(&page.markup, &mut warnings);
    let (lead, sections) = split_blocks(&text);

    if lead.is_empty() {
        return Extraction {
            outcome: Extracted::Skipped(SkipReason::EmptyLead),
            warnings,
        };
    }
    Extraction {
        outcome: Extracted::Article(Article {
            language: page.language.clone(),
            title: normalize_text(&page.title),
            lead,
            sections,
        }),
        warnings,
    }
}

fn skipped(reason: SkipReason) -> Extraction {
    Extraction {
        outcome: Extracted::Skipped(reason),
        warnings: 0,
    }
}

fn is_redirect_markup(markup: &str) -> bool {
    let head = markup.trim_start();
    head.get(..9).is_some_and(|h| h.eq_ignore_ascii_case("#redirect"))
}

/// Strips every supported construct, leaving line structure intact.
pub fn strip_markup(markup: &str, warnings: &mut usize) -> String {
    let s = strip_comments(markup, warnings);
    let s = strip_tags(&s, warnings);
    let s = strip_templates(&s, warnings);
    let s = strip_tables(&s, warnings);
    let s = strip_links(&s, warnings);
    let s = strip_external_links(&s);
    strip_emphasis(&s)
}

fn line_end(s: &str, from: usize) -> usize {
    s[from..].find('\n').map_or(s.len(), |p| from + p)
}

/// Index just past the bracket closing the one opened at `start`, honoring
/// nesting. `None` if it never closes.
fn find_close(s: &str, start: usize, open: &str, close: &str) -> Option<usize> {
    let b = s.as_bytes();
    let (ob, cb) = (open.as_bytes(), close.as_bytes());
    let mut depth = 0usize;
    let mut j = start;
    while j < b.len() {
        if b[j..].starts_with(ob) {
            depth += 1;
            j += ob.len();
        } else if b[j..].starts_with(cb) {
            depth -= 1;
            j += cb.len();
            if depth == 0 {
                return Some(j);
            }
        } else {
            j += 1;
        }
    }
    None
}

fn strip_comments(s: &str, warnings: &mut usize) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(p) = rest.find("<!--") {
        out.push_str(&rest[..p]);
        match rest[p + 4..].find("-->") {
            Some(q) => rest = &rest[p + 4 + q + 3..],
            None => {
                *warnings += 1;
                let end = line_end(rest, p);
                rest = &rest[end..];
            }
        }
    }
    out.push_str(rest);
    out
}

struct Tag<'a> {
    name: String,
    closing: bool,
    self_closing: bool,
    raw: &'a str,
}

fn parse_tag(s: &str) -> Option<Tag<'_>> {
    let b = s.as_bytes();
    let mut i = 1;
    let closing = b.get(i) == Some(&b'/');
    if closing {
        i += 1;
    }
    let name_start = i;
    while i < b.len() && b[i].is_ascii_alphanumeric() {
        i += 1;
    }
    if i == name_start || !b[name_start].is_ascii_alphabetic() {
        return None;
    }
    if !matches!(b.get(i), Some(b'>' | b'/' | b' ' | b'\t' | b'\n')) {
        return None;
    }
    let name = s[name_start..i].to_ascii_lowercase();
    let gt = s[i..].find(['>', '<']).map(|p| i + p)?;
    if b[gt] != b'>' {
        return None;
    }
    Some(Tag {
        name,
        closing,
        self_closing: b[gt - 1] == b'/',
        raw: &s[..=gt],
    })
}

fn strip_tags(s: &str, warnings: &mut usize) -> String {
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    let mut copy_from = 0;
    while let Some(p) = s[i..].find('<') {
        let at = i + p;
        let Some(tag) = parse_tag(&s[at..]) else {
            i = at + 1;
            continue;
        };
        out.push_str(&s[copy_from..at]);
        let after = at + tag.raw.len();
        let next = if DROPPED_TAGS.contains(&tag.name.as_str()) && !tag.closing && !tag.self_closing {
            match find_closing_tag(s, after, &tag.name) {
                Some(end) => end,
                None => {
                    *warnings += 1;
                    line_end(s, at)
                }
            }
        } else {
            after
        };
        i = next;
        copy_from = next;
    }
    out.push_str(&s[copy_from..]);
    out
}

fn find_closing_tag(s: &str, from: usize, name: &str) -> Option<usize> {
    let needle = format!("</{name}");
    let hay = s[from..].to_ascii_lowercase();
    let p = hay.find(&needle)?;
    let gt = hay[p..].find('>')?;
    Some(from + p + gt + 1)
}

fn strip_templates(s: &str, warnings: &mut usize) -> String {
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    let mut copy_from = 0;
    while let Some(p) = s[i..].find("{{") {
        let at = i + p;
        out.push_str(&s[copy_from..at]);
        i = match find_close(s, at, "{{", "}}") {
            Some(end) => end,
            None => {
                *warnings += 1;
                line_end(s, at)
            }
        };
        copy_from = i;
    }
    out.push_str(&s[copy_from..]);
    out
}

fn strip_tables(s: &str, warnings: &mut usize) -> String {
    let lines: Vec<&str> = s.split('\n').collect();
    let mut keep = Vec::with_capacity(lines.len());
    let mut i = 0;
    while i < lines.len() {
        if !lines[i].trim_start().starts_with("{|") {
            keep.push(lines[i]);
            i += 1;
            continue;
        }
        let mut depth = 0usize;
        let mut j = i;
        let mut closed = false;
        while j < lines.len() {
            let t = lines[j].trim_start();
            if t.starts_with("{|") {
                depth += 1;
            } else if t.starts_with("|}") {
                depth -= 1;
                if depth == 0 {
                    closed = true;
                    break;
                }
            }
            j += 1;
        }
        if closed {
            i = j + 1;
        } else {
            // unclosed: drop the rest of the block
            *warnings += 1;
            let mut k = i;
            while k < lines.len() && !lines[k].trim().is_empty() {
                k += 1;
            }
            i = k;
        }
    }
    keep.join("\n")
}

fn is_dropped_link_target(target: &str) -> bool {
    let Some((prefix, _)) = target.split_once(':') else {
        return false;
    };
    let prefix = prefix.trim().to_lowercase();
    if DROPPED_LINK_PREFIXES.contains(&prefix.as_str()) {
        return true;
    }
    // interlanguage links such as [[fr:Huile d'olive]] or [[zh-yue:...]]
    let mut parts = prefix.split('-');
    let head = parts.next().unwrap_or("");
    (2..=3).contains(&head.len())
        && head.bytes().all(|b| b.is_ascii_lowercase())
        && parts.all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_lowercase()))
}

fn link_text(inner: &str, warnings: &mut usize) -> String {
    let (target, label) = match inner.split_once('|') {
        Some((t, l)) => (t, Some(l)),
        None => (inner, None),
    };
    let target = target.trim();
    if let Some(visible) = target.strip_prefix(':') {
        return strip_links(label.unwrap_or(visible), warnings);
    }
    if is_dropped_link_target(target) {
        return String::new();
    }
    match label {
        Some(l) => strip_links(l, warnings),
        None => target.to_string(),
    }
}

fn strip_links(s: &str, warnings: &mut usize) -> String {
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    let mut copy_from = 0;
    while let Some(p) = s[i..].find("[[") {
        let at = i + p;
        out.push_str(&s[copy_from..at]);
        i = match find_close(s, at, "[[", "]]") {
            Some(end) => {
                out.push_str(&link_text(&s[at + 2..end - 2], warnings));
                end
            }
            None => {
                *warnings += 1;
                line_end(s, at)
            }
        };
        copy_from = i;
    }
    out.push_str(&s[copy_from..]);
    out
}

fn strip_external_links(s: &str) -> String {
    const SCHEMES: &[&str] = &["http://", "https://", "ftp://", "//"];
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    let mut copy_from = 0;
    while let Some(p) = s[i..].find('[') {
        let at = i + p;
        let body = &s[at + 1..];
        if !SCHEMES.iter().any(|sc| body.starts_with(sc)) {
            i = at + 1;
            continue;
        }
        let line = &body[..body.find('\n').unwrap_or(body.len())];
        let Some(close) = line.find(']') else {
            i = at + 1;
            continue;
        };
        out.push_str(&s[copy_from..at]);
        if let Some((_, label)) = line[..close].split_once(' ') {
            out.push_str(label);
        }
        i = at + 1 + close + 1;
        copy_from = i;
    }
    out.push_str(&s[copy_from..]);
    out
}

fn strip_emphasis(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '\'' && chars.peek() == Some(&'\'') {
            while chars.peek() == Some(&'\'') {
                chars.next();
            }
            continue;
        }
        out.push(c);
    }
    out
}

fn heading(line: &str) -> Option<(u8, &str)> {
    let t = line.trim();
    if !t.starts_with('=') || !t.ends_with('=') || t.len() < 3 {
        return None;
    }
    let lead = t.bytes().take_while(|&b| b == b'=').count();
    let trail = t.bytes().rev().take_while(|&b| b == b'=').count();
    if lead + trail >= t.len() {
        return None;
    }
    let level = lead.min(trail);
    let text = &t[level..t.len() - level];
    let text = text.trim_matches('=').trim();
    Some((level.clamp(2, 6) as u8, text))
}

fn list_body(line: &str) -> &str {
    line.trim_start_matches(['*', '#', ':', ';']).trim_start()
}

/// Removes any markup tokens the stripping passes could not attribute.
fn sanitize(paragraph: &str) -> String {
    let mut s = paragraph.to_string();
    loop {
        let next = s
            .replace("{{", "")
            .replace("}}", "")
            .replace("[[", "")
            .replace("]]", "");
        if next == s {
            break;
        }
        s = next;
    }
    let s = normalize_text(&s);
    let trimmed = if s.starts_with("==") {
        s.trim_start_matches(|c: char| c == '=' || c.is_whitespace())
    } else {
        s.as_str()
    };
    normalize_text(trimmed)
}

fn split_blocks(text: &str) -> (Vec<String>, Vec<Section>) {
    let mut lead = Vec::new();
    let mut sections: Vec<Section> = Vec::new();
    let mut block: Vec<&str> = Vec::new();

    fn flush(block: &mut Vec<&str>, lead: &mut Vec<String>, sections: &mut [Section]) {
        if block.is_empty() {
            return;
        }
        let para = sanitize(&block.join(" "));
        block.clear();
        if para.is_empty() {
            return;
        }
        match sections.last_mut() {
            Some(sec) => sec.paragraphs.push(para),
            None => lead.push(para),
        }
    }

    for raw in text.split('\n') {
        let mut line = raw;
        for magic in MAGIC_WORDS {
            if line.contains(magic) {
                line = "";
            }
        }
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with("----") {
            flush(&mut block, &mut lead, &mut sections);
            continue;
        }
        if let Some((level, title)) = heading(trimmed) {
            flush(&mut block, &mut lead, &mut sections);
            let title = sanitize(title);
            if !title.is_empty() {
                sections.push(Section {
                    heading: title,
                    level,
                    paragraphs: Vec::new(),
                });
            }
            continue;
        }
        block.push(list_body(line));
    }
    flush(&mut block, &mut lead, &mut sections);
    (lead, sections)
}
