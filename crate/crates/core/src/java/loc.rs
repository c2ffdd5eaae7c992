use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq)]
enum State {
    Code,
    LineComment,
    BlockComment,
    Str,
    Chr,
}

/// Counts lines that contain at least one character that is neither
/// whitespace nor part of a comment. String and character literals are code,
/// so `//` or `/*` inside them do not open comments. A string literal is
/// terminated at end of line if its closing quote is missing, which keeps one
/// bad literal from hiding the rest of the file.
pub fn count_effective_lines_str(text: &str) -> u64 {
    let mut state = State::Code;
    let mut escaped = false;
    let mut line_has_code = false;
    let mut count = 0u64;
    let mut chars = text.chars().peekable();

    while let Some(c) = chars.next() {
        if c == '\n' {
            if line_has_code {
                count += 1;
            }
            line_has_code = false;
            escaped = false;
            // Block comments span lines; everything else resets.
            if state != State::BlockComment {
                state = State::Code;
            }
            continue;
        }
        match state {
            State::Code => match c {
                '/' if chars.peek() == Some(&'/') => {
                    chars.next();
                    state = State::LineComment;
                }
                '/' if chars.peek() == Some(&'*') => {
                    chars.next();
                    state = State::BlockComment;
                }
                '"' => {
                    line_has_code = true;
                    state = State::Str;
                }
                '\'' => {
                    line_has_code = true;
                    state = State::Chr;
                }
                _ => {
                    if !c.is_whitespace() {
                        line_has_code = true;
                    }
                }
            },
            State::LineComment => {}
            State::BlockComment => {
                if c == '*' && chars.peek() == Some(&'/') {
                    chars.next();
                    state = State::Code;
                }
            }
            State::Str => {
                if escaped {
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == '"' {
                    state = State::Code;
                }
            }
            State::Chr => {
                if escaped {
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == '\'' {
                    state = State::Code;
                }
            }
        }
    }
    if line_has_code {
        count += 1;
    }
    count
}

/// File-level wrapper. Invalid UTF-8 byte sequences are replaced rather than
/// treated as an error; a stray byte in one file should not sink a module.
pub fn count_effective_lines(path: &Path) -> Result<u64> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(count_effective_lines_str(&String::from_utf8_lossy(&bytes)))
}
