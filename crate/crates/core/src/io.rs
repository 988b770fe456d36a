//! Line-oriented helpers for the tab-separated resource files.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

pub(crate) fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// A non-blank line with its 1-based line number.
pub(crate) struct Line<'a> {
    pub number: usize,
    pub text: &'a str,
}

impl<'a> Line<'a> {
    pub fn is_comment(&self) -> bool {
        self.text.starts_with('#')
    }

    pub fn fields(&self) -> Vec<&'a str> {
        self.text.split('\t').collect()
    }
}

pub(crate) fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| Line {
            number: i + 1,
            text: l.trim_end_matches('\r'),
        })
        .filter(|l| !l.text.trim().is_empty())
}

/// Non-blank, non-comment lines split on tabs, checked for an exact field count.
pub(crate) fn records<'a>(
    text: &'a str,
    source: &'a str,
    expected: usize,
) -> impl Iterator<Item = Result<(usize, Vec<&'a str>)>> + 'a {
    lines(text).filter(|l| !l.is_comment()).map(move |l| {
        let fields = l.fields();
        if fields.len() != expected {
            return Err(parse_error(
                source,
                l.number,
                format!("expected {expected} tab-separated fields, found {}", fields.len()),
            ));
        }
        Ok((l.number, fields))
    })
}

pub(crate) fn parse_error(source: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: source.to_string(),
        line,
        message: message.into(),
    }
}

pub(crate) fn parse_field<T: FromStr>(source: &str, line: usize, raw: &str, what: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| parse_error(source, line, format!("cannot parse {what} from {raw:?}")))
}

pub(crate) fn source_name(path: &Path) -> String {
    path.display().to_string()
}
