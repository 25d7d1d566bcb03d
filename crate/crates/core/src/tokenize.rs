//! Line tokenization and line-oriented file reading.

use std::borrow::Cow;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitRule {
    /// Split on maximal runs of Unicode whitespace.
    #[default]
    Whitespace,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct TokenizerConfig {
    pub lowercase: bool,
    /// Trim non-alphanumeric characters from both ends of every token and drop
    /// tokens that end up empty. Word-internal punctuation ("l'homme") is kept.
    pub strip_punctuation: bool,
    pub split_rule: SplitRule,
}

/// Calls `f` with every token of `line`, borrowing from the line when no
/// normalization changes the text.
pub fn for_each_token<'a, F>(line: &'a str, config: &TokenizerConfig, mut f: F)
where
    F: FnMut(Cow<'a, str>),
{
    let pieces = match config.split_rule {
        SplitRule::Whitespace => line.split_whitespace(),
    };
    for piece in pieces {
        let piece = if config.strip_punctuation {
            piece.trim_matches(|c: char| !c.is_alphanumeric())
        } else {
            piece
        };
        if piece.is_empty() {
            continue;
        }
        if config.lowercase && piece.chars().any(|c| c.is_uppercase()) {
            f(Cow::Owned(piece.to_lowercase()));
        } else {
            f(Cow::Borrowed(piece));
        }
    }
}

pub fn tokenize(line: &str, config: &TokenizerConfig) -> Vec<String> {
    let mut out = Vec::new();
    for_each_token(line, config, |t| out.push(t.into_owned()));
    out
}

fn trim_line_ending(buf: &mut Vec<u8>) {
    if buf.last() == Some(&b'\n') {
        buf.pop();
    }
    if buf.last() == Some(&b'\r') {
        buf.pop();
    }
}

/// Reads a UTF-8 text file line by line, reporting decoding failures with
/// their 1-based line number. LF and CRLF endings are both accepted and a
/// leading byte-order mark is skipped.
pub struct LineReader<R> {
    inner: R,
    path: PathBuf,
    buf: Vec<u8>,
    line_no: usize,
}

impl LineReader<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::new(BufReader::with_capacity(1 << 16, file), path))
    }
}

impl<R: BufRead> LineReader<R> {
    pub fn new(inner: R, path: impl Into<PathBuf>) -> Self {
        LineReader {
            inner,
            path: path.into(),
            buf: Vec::with_capacity(256),
            line_no: 0,
        }
    }

    /// Returns the next line (without its terminator) and its line number.
    pub fn next_line(&mut self) -> Result<Option<(usize, &str)>> {
        self.buf.clear();
        let n = self
            .inner
            .read_until(b'\n', &mut self.buf)
            .map_err(|e| Error::io(&self.path, e))?;
        if n == 0 {
            return Ok(None);
        }
        self.line_no += 1;
        trim_line_ending(&mut self.buf);
        let mut bytes = &self.buf[..];
        if self.line_no == 1 {
            bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
        }
        match std::str::from_utf8(bytes) {
            Ok(s) => Ok(Some((self.line_no, s))),
            Err(_) => Err(Error::Decode {
                path: self.path.clone(),
                line: self.line_no,
            }),
        }
    }
}

/// Reads a file's lines from last to first without holding the file in
/// memory. Line numbers match those produced by [`LineReader`], which makes
/// this the second half of a two-pass streaming analysis.
pub struct ReverseLineReader {
    file: File,
    path: PathBuf,
    /// Bytes of the file not yet read, i.e. the file prefix `[0, pos)`.
    pos: u64,
    /// Unconsumed tail of the prefix read so far (a partial line).
    pending: Vec<u8>,
    line: Vec<u8>,
    line_no: usize,
    chunk: usize,
}

impl ReverseLineReader {
    pub fn open(path: impl AsRef<Path>, total_lines: usize) -> Result<Self> {
        let path = path.as_ref();
        let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
        let len = file
            .seek(SeekFrom::End(0))
            .map_err(|e| Error::io(path, e))?;
        let mut reader = ReverseLineReader {
            file,
            path: path.to_path_buf(),
            pos: len,
            pending: Vec::new(),
            line: Vec::new(),
            line_no: total_lines + 1,
            chunk: 1 << 16,
        };
        // A final terminator does not start another line.
        if len > 0 {
            let mut last = [0u8; 1];
            reader.read_at(len - 1, &mut last)?;
            if last[0] == b'\n' {
                reader.pos = len - 1;
                if len >= 2 {
                    reader.read_at(len - 2, &mut last)?;
                    if last[0] == b'\r' {
                        reader.pos = len - 2;
                    }
                }
            }
        }
        Ok(reader)
    }

    fn read_at(&mut self, offset: u64, buf: &mut [u8]) -> Result<()> {
        self.file
            .seek(SeekFrom::Start(offset))
            .map_err(|e| Error::io(&self.path, e))?;
        self.file
            .read_exact(buf)
            .map_err(|e| Error::io(&self.path, e))
    }

    /// Returns the previous line and its 1-based line number.
    pub fn prev_line(&mut self) -> Result<Option<(usize, &str)>> {
        if self.line_no <= 1 && self.pos == 0 && self.pending.is_empty() {
            return Ok(None);
        }
        loop {
            if let Some(nl) = self.pending.iter().rposition(|&b| b == b'\n') {
                self.line.clear();
                self.line.extend_from_slice(&self.pending[nl + 1..]);
                self.pending.truncate(nl);
                break;
            }
            if self.pos == 0 {
                self.line = std::mem::take(&mut self.pending);
                if self.line_no <= 1 {
                    return Ok(None);
                }
                break;
            }
            let take = (self.chunk as u64).min(self.pos);
            let start = self.pos - take;
            let mut block = vec![0u8; take as usize];
            self.read_at(start, &mut block)?;
            block.extend_from_slice(&self.pending);
            self.pending = block;
            self.pos = start;
        }
        self.line_no -= 1;
        if self.line.last() == Some(&b'\r') {
            self.line.pop();
        }
        let mut bytes = &self.line[..];
        if self.line_no == 1 {
            bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
        }
        match std::str::from_utf8(bytes) {
            Ok(s) => Ok(Some((self.line_no, s))),
            Err(_) => Err(Error::Decode {
                path: self.path.clone(),
                line: self.line_no,
            }),
        }
    }
}
