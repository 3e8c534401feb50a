use std::collections::{HashMap, VecDeque};
use std::io::BufRead;
use std::str::FromStr;

use super::{canonical_title, AlignError, LangLink};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkFormat {
    /// `src_title \t src_lang \t tgt_lang \t tgt_title`
    Tsv,
    /// MediaWiki `langlinks` table dump: `INSERT INTO ... VALUES (ll_from,'ll_lang','ll_title'),...;`
    SqlInsert,
}

impl FromStr for LinkFormat {
    type Err = AlignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(LinkFormat::Tsv),
            "sql-insert" | "sql" => Ok(LinkFormat::SqlInsert),
            other => Err(AlignError::UnknownFormat(other.to_string())),
        }
    }
}

/// What an SQL dump leaves implicit: the wiki it came from and the titles
/// behind `ll_from` page ids.
#[derive(Debug, Clone, Default)]
pub struct SqlContext {
    pub src_lang: String,
    pub page_titles: HashMap<u64, String>,
}

pub struct LangLinkReader<R> {
    input: R,
    format: LinkFormat,
    sql: Option<SqlContext>,
    pending: VecDeque<LangLink>,
    line: Vec<u8>,
    malformed: usize,
    done: bool,
}

/// Streams interlanguage links; malformed rows are counted and skipped.
pub fn load_langlinks<R: BufRead>(
    input: R,
    format: LinkFormat,
    sql: Option<SqlContext>,
) -> Result<LangLinkReader<R>, AlignError> {
    if format == LinkFormat::SqlInsert && sql.is_none() {
        return Err(AlignError::MissingSqlContext);
    }
    Ok(LangLinkReader {
        input,
        format,
        sql,
        pending: VecDeque::new(),
        line: Vec::new(),
        malformed: 0,
        done: false,
    })
}

impl<R: BufRead> LangLinkReader<R> {
    /// Rows skipped so far because they could not be parsed or resolved.
    pub fn malformed(&self) -> usize {
        self.malformed
    }

    fn parse_tsv(&mut self, line: &str) {
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            return;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let link = match fields.as_slice() {
            [st, sl, tl, tt] => make_link(st, sl, tt, tl),
            _ => None,
        };
        match link {
            Some(l) => self.pending.push_back(l),
            None => self.malformed += 1,
        }
    }

    fn parse_sql(&mut self, line: &[u8]) {
        let Some(ctx) = self.sql.as_ref() else {
            return;
        };
        let trimmed = trim_ascii_start(line);
        if !trimmed.starts_with(b"INSERT INTO") {
            return;
        }
        let Some(values_at) = find(trimmed, b"VALUES") else {
            self.malformed += 1;
            return;
        };
        let (rows, bad) = parse_tuples(&trimmed[values_at + 6..]);
        self.malformed += bad;
        for row in rows {
            let link = match row.as_slice() {
                [SqlValue::Int(from), SqlValue::Str(lang), SqlValue::Str(title)] => ctx
                    .page_titles
                    .get(from)
                    .and_then(|src| make_link(src, &ctx.src_lang, title, lang)),
                _ => None,
            };
            match link {
                Some(l) => self.pending.push_back(l),
                None => self.malformed += 1,
            }
        }
    }
}

fn make_link(src_title: &str, src_lang: &str, tgt_title: &str, tgt_lang: &str) -> Option<LangLink> {
    let (src_lang, tgt_lang) = (src_lang.trim(), tgt_lang.trim());
    let src_title = canonical_title(src_title);
    let tgt_title = canonical_title(tgt_title);
    if src_title.is_empty()
        || tgt_title.is_empty()
        || src_lang.is_empty()
        || tgt_lang.is_empty()
        || src_lang == tgt_lang
    {
        return None;
    }
    Some(LangLink {
        src_title,
        src_lang: src_lang.to_string(),
        tgt_title,
        tgt_lang: tgt_lang.to_string(),
    })
}

impl<R: BufRead> Iterator for LangLinkReader<R> {
    type Item = Result<LangLink, AlignError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(link) = self.pending.pop_front() {
                return Some(Ok(link));
            }
            if self.done {
                return None;
            }
            self.line.clear();
            match self.input.read_until(b'\n', &mut self.line) {
                Ok(0) => self.done = true,
                Ok(_) => {
                    let line = std::mem::take(&mut self.line);
                    match self.format {
                        LinkFormat::Tsv => match std::str::from_utf8(&line) {
                            Ok(s) => self.parse_tsv(s),
                            Err(_) => self.malformed += 1,
                        },
                        LinkFormat::SqlInsert => self.parse_sql(&line),
                    }
                    self.line = line;
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(e.into()));
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum SqlValue {
    Int(u64),
    Str(String),
    Other,
}

fn trim_ascii_start(b: &[u8]) -> &[u8] {
    let n = b.iter().take_while(|c| c.is_ascii_whitespace()).count();
    &b[n..]
}

fn find(hay: &[u8], needle: &[u8]) -> Option<usize> {
    hay.windows(needle.len()).position(|w| w == needle)
}

/// Parses `(v, v, ...),(...);` returning well-formed rows and a count of
/// rows that could not be read.
fn parse_tuples(s: &[u8]) -> (Vec<Vec<SqlValue>>, usize) {
    let mut rows = Vec::new();
    let mut bad = 0;
    let mut i = 0;
    while i < s.len() {
        match s[i] {
            b'(' => match parse_row(s, i + 1) {
                Some((row, next)) => {
                    rows.push(row);
                    i = next;
                }
                None => {
                    bad += 1;
                    // resynchronize on the next tuple start
                    match s[i + 1..].windows(2).position(|w| w == b"),") {
                        Some(p) => i = i + 1 + p + 2,
                        None => break,
                    }
                }
            },
            b';' => break,
            _ => i += 1,
        }
    }
    (rows, bad)
}

fn parse_row(s: &[u8], mut i: usize) -> Option<(Vec<SqlValue>, usize)> {
    let mut row = Vec::new();
    loop {
        while i < s.len() && s[i] == b' ' {
            i += 1;
        }
        let c = *s.get(i)?;
        if c == b'\'' {
            let mut buf = Vec::new();
            i += 1;
            loop {
                let c = *s.get(i)?;
                match c {
                    b'\\' => {
                        let e = *s.get(i + 1)?;
                        buf.push(match e {
                            b'n' => b'\n',
                            b'r' => b'\r',
                            b't' => b'\t',
                            b'0' => 0,
                            b'Z' => 0x1a,
                            other => other,
                        });
                        i += 2;
                    }
                    b'\'' if s.get(i + 1) == Some(&b'\'') => {
                        buf.push(b'\'');
                        i += 2;
                    }
                    b'\'' => {
                        i += 1;
                        break;
                    }
                    _ => {
                        buf.push(c);
                        i += 1;
                    }
                }
            }
            row.push(SqlValue::Str(String::from_utf8(buf).ok()?));
        } else {
            let start = i;
            while i < s.len() && s[i] != b',' && s[i] != b')' {
                i += 1;
            }
            let raw = std::str::from_utf8(&s[start..i]).ok()?.trim();
            row.push(match raw.parse::<u64>() {
                Ok(n) => SqlValue::Int(n),
                Err(_) if raw.eq_ignore_ascii_case("NULL") => SqlValue::Other,
                Err(_) => return None,
            });
        }
        while i < s.len() && s[i] == b' ' {
            i += 1;
        }
        match *s.get(i)? {
            b',' => i += 1,
            b')' => return Some((row, i + 1)),
            _ => return None,
        }
    }
}
