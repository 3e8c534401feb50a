//! Streaming reader for MediaWiki `pages-articles` XML exports.
//!
//! Only the fields needed downstream are kept: title, namespace, page id,
//! redirect flag and the wikitext of the last revision. Memory use is bounded
//! by the largest single page, not by the dump.

use std::io::BufRead;

use quick_xml::events::Event;
use quick_xml::Reader;
use thiserror::Error;

use super::RawPage;

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("malformed XML at byte {offset}: {message}")]
    Malformed { offset: u64, message: String },
    #[error("dump truncated at byte {offset} (inside <{element}>)")]
    Truncated { offset: u64, element: String },
    #[error("page ending at byte {offset} has no title")]
    MissingTitle { offset: u64 },
    #[error("invalid namespace {value:?} at byte {offset}")]
    BadNamespace { offset: u64, value: String },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Field {
    Title,
    Ns,
    PageId,
    Text,
}

#[derive(Default)]
struct PageBuilder {
    title: Option<String>,
    namespace: Option<String>,
    id: Option<String>,
    markup: String,
    redirect: bool,
}

/// Iterator over the pages of a dump, in document order.
///
/// After the first error the iterator is fused and yields `None`.
pub struct DumpReader<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    language: String,
    root_open: bool,
    page: Option<PageBuilder>,
    in_revision: bool,
    capture: Option<(Field, String)>,
    finished: bool,
}

/// Streams `<page>` elements out of a MediaWiki XML export.
///
/// Decompression, if any, is the caller's job.
pub fn parse_dump<R: BufRead>(input: R, language: &str) -> DumpReader<R> {
    let mut reader = Reader::from_reader(input);
    reader.config_mut().check_end_names = true;
    DumpReader {
        reader,
        buf: Vec::with_capacity(8 * 1024),
        language: language.to_string(),
        root_open: false,
        page: None,
        in_revision: false,
        capture: None,
        finished: false,
    }
}

impl<R: BufRead> DumpReader<R> {
    fn offset(&self) -> u64 {
        self.reader.buffer_position()
    }

    fn malformed(&self, message: impl Into<String>) -> DumpError {
        DumpError::Malformed {
            offset: self.reader.error_position(),
            message: message.into(),
        }
    }

    fn field_for(&self, name: &[u8]) -> Option<Field> {
        self.page.as_ref()?;
        match (name, self.in_revision) {
            (b"title", false) => Some(Field::Title),
            (b"ns", false) => Some(Field::Ns),
            (b"id", false) => Some(Field::PageId),
            (b"text", true) => Some(Field::Text),
            _ => None,
        }
    }

    fn finish_page(&mut self) -> Result<RawPage, DumpError> {
        let offset = self.offset();
        let page = self.page.take().unwrap_or_default();
        let title = page
            .title
            .map(|t| t.trim().to_string())
            .filter(|t| !t.is_empty())
            .ok_or(DumpError::MissingTitle { offset })?;
        let namespace = match page.namespace {
            None => 0,
            Some(ns) => ns.trim().parse().map_err(|_| DumpError::BadNamespace {
                offset,
                value: ns.clone(),
            })?,
        };
        Ok(RawPage {
            title,
            language: self.language.clone(),
            markup: page.markup,
            namespace,
            id: page.id.and_then(|id| id.trim().parse().ok()),
            redirect: page.redirect,
        })
    }

    fn store(&mut self, field: Field, value: String) {
        if let Some(page) = self.page.as_mut() {
            match field {
                Field::Title => page.title = Some(value),
                Field::Ns => page.namespace = Some(value),
                Field::PageId => page.id = Some(value),
                // later revisions win
                Field::Text => page.markup = value,
            }
        }
    }

    fn step(&mut self) -> Result<Option<RawPage>, DumpError> {
        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(ev) => ev.into_owned(),
                Err(e) => {
                    if self.root_open && is_eof_error(&e) {
                        return Err(self.truncated());
                    }
                    return Err(self.malformed(e.to_string()));
                }
            };
            match event {
                Event::Start(e) => {
                    let name = e.name().as_ref().to_vec();
                    match name.as_slice() {
                        b"mediawiki" => self.root_open = true,
                        b"page" if self.root_open => {
                            self.page = Some(PageBuilder::default());
                            self.in_revision = false;
                        }
                        b"revision" if self.page.is_some() => self.in_revision = true,
                        _ => {
                            if let Some(field) = self.field_for(&name) {
                                self.capture = Some((field, String::new()));
                            }
                        }
                    }
                }
                Event::Empty(e) => {
                    if e.name().as_ref() == b"redirect" {
                        if let Some(page) = self.page.as_mut() {
                            page.redirect = true;
                        }
                    } else if let Some(field) = self.field_for(e.name().as_ref()) {
                        self.store(field, String::new());
                    }
                }
                Event::Text(t) => {
                    if let Some((_, acc)) = self.capture.as_mut() {
                        let text = t.unescape().map_err(|e| DumpError::Malformed {
                            offset: self.reader.buffer_position(),
                            message: e.to_string(),
                        })?;
                        acc.push_str(&text);
                    }
                }
                Event::CData(t) => {
                    if let Some((_, acc)) = self.capture.as_mut() {
                        acc.push_str(&String::from_utf8_lossy(&t));
                    }
                }
                Event::End(e) => match e.name().as_ref() {
                    b"page" if self.page.is_some() => {
                        self.capture = None;
                        return self.finish_page().map(Some);
                    }
                    b"revision" => self.in_revision = false,
                    b"mediawiki" => self.root_open = false,
                    name => {
                        if let Some((field, value)) = self.capture.take() {
                            if self.field_for(name) == Some(field) {
                                self.store(field, value);
                            } else {
                                self.capture = Some((field, value));
                            }
                        }
                    }
                },
                Event::Eof => {
                    if self.root_open {
                        return Err(self.truncated());
                    }
                    return Ok(None);
                }
                _ => {}
            }
        }
    }

    fn truncated(&self) -> DumpError {
        DumpError::Truncated {
            offset: self.offset(),
            element: if self.page.is_some() { "page" } else { "mediawiki" }.to_string(),
        }
    }
}

fn is_eof_error(e: &quick_xml::Error) -> bool {
    matches!(e, quick_xml::Error::Syntax(_))
        || matches!(
            e,
            quick_xml::Error::IllFormed(quick_xml::errors::IllFormedError::MissingEndTag(_))
        )
}

impl<R: BufRead> Iterator for DumpReader<R> {
    type Item = Result<RawPage, DumpError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        match self.step() {
            Ok(Some(page)) => Some(Ok(page)),
            Ok(None) => {
                self.finished = true;
                None
            }
            Err(e) => {
                self.finished = true;
                Some(Err(e))
            }
        }
    }
}
