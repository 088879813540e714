//! Minimal Java tokenizer.
//!
//! Only what statement segmentation needs: identifiers, literals, comments
//! and punctuation, each tagged with its byte span and starting line.

use super::SegmentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TokenKind {
    Ident,
    Number,
    Str,
    Char,
    Punct,
    LineComment,
    BlockComment,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub end_line: usize,
}

impl Token {
    pub fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.start..self.end]
    }

    pub fn is_comment(&self) -> bool {
        matches!(self.kind, TokenKind::LineComment | TokenKind::BlockComment)
    }

    pub fn is_punct(&self, src: &str, p: &str) -> bool {
        self.kind == TokenKind::Punct && self.text(src) == p
    }

    pub fn is_word(&self, src: &str, w: &str) -> bool {
        self.kind == TokenKind::Ident && self.text(src) == w
    }
}

const THREE_CHAR_OPS: &[&str] = &["...", "<<="];
const TWO_CHAR_OPS: &[&str] = &[
    "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=", "&=",
    "|=", "^=", "<<",
];

pub(crate) const RESERVED: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
    "true",
    "false",
    "null",
];

pub(crate) fn is_reserved(word: &str) -> bool {
    RESERVED.contains(&word)
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, SegmentError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;
    let mut line = 1;

    while pos < src.len() {
        let c = src[pos..].chars().next().unwrap_or('\0');
        if c == '\n' {
            line += 1;
            pos += 1;
            continue;
        }
        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }

        let start = pos;
        let start_line = line;
        let kind;

        if src[pos..].starts_with("//") {
            pos = src[pos..].find('\n').map_or(src.len(), |off| pos + off);
            kind = TokenKind::LineComment;
        } else if src[pos..].starts_with("/*") {
            let close = src[pos + 2..].find("*/").ok_or(SegmentError::Unbalanced {
                line: start_line,
                what: "unterminated block comment",
            })?;
            let end = pos + 2 + close + 2;
            line += src[pos..end].matches('\n').count();
            pos = end;
            kind = TokenKind::BlockComment;
        } else if src[pos..].starts_with("\"\"\"") {
            let close = src[pos + 3..]
                .find("\"\"\"")
                .ok_or(SegmentError::Unbalanced {
                    line: start_line,
                    what: "unterminated text block",
                })?;
            let end = pos + 3 + close + 3;
            line += src[pos..end].matches('\n').count();
            pos = end;
            kind = TokenKind::Str;
        } else if c == '"' || c == '\'' {
            pos = scan_quoted(bytes, pos, c as u8).ok_or(SegmentError::Unbalanced {
                line: start_line,
                what: if c == '"' {
                    "unterminated string literal"
                } else {
                    "unterminated character literal"
                },
            })?;
            kind = if c == '"' {
                TokenKind::Str
            } else {
                TokenKind::Char
            };
        } else if is_ident_start(c) {
            pos += src[pos..]
                .char_indices()
                .find(|&(_, ch)| !is_ident_continue(ch))
                .map_or(src.len() - pos, |(off, _)| off);
            kind = TokenKind::Ident;
        } else if c.is_ascii_digit()
            || (c == '.' && bytes.get(pos + 1).is_some_and(u8::is_ascii_digit))
        {
            pos = scan_number(bytes, pos);
            kind = TokenKind::Number;
        } else {
            let rest = &src[pos..];
            let len = THREE_CHAR_OPS
                .iter()
                .chain(TWO_CHAR_OPS)
                .find(|op| rest.starts_with(*op))
                .map_or(c.len_utf8(), |op| op.len());
            pos += len;
            kind = TokenKind::Punct;
        }

        tokens.push(Token {
            kind,
            start,
            end: pos,
            line: start_line,
            end_line: line,
        });
    }
    Ok(tokens)
}

/// Returns the byte offset just past the closing quote. Literals may not span lines.
fn scan_quoted(bytes: &[u8], start: usize, quote: u8) -> Option<usize> {
    let mut i = start + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'\n' => return None,
            b if b == quote => return Some(i + 1),
            _ => i += 1,
        }
    }
    None
}

fn scan_number(bytes: &[u8], start: usize) -> usize {
    let mut i = start;
    while i < bytes.len() {
        let b = bytes[i];
        let exponent_sign = (b == b'+' || b == b'-')
            && i > start
            && matches!(bytes[i - 1], b'e' | b'E' | b'p' | b'P')
            && !bytes[start..i].starts_with(b"0x")
            && !bytes[start..i].starts_with(b"0X");
        if b.is_ascii_alphanumeric() || b == b'.' || b == b'_' || exponent_sign {
            i += 1;
        } else {
            break;
        }
    }
    i
}

/// Checks that `()`, `[]` and `{}` nest properly.
pub(crate) fn check_balance(src: &str, tokens: &[Token]) -> Result<(), SegmentError> {
    let mut stack: Vec<(u8, usize)> = Vec::new();
    for tok in tokens.iter().filter(|t| t.kind == TokenKind::Punct) {
        let b = src.as_bytes()[tok.start];
        match b {
            b'(' | b'[' | b'{' => stack.push((b, tok.line)),
            b')' | b']' | b'}' => {
                let want = match b {
                    b')' => b'(',
                    b']' => b'[',
                    _ => b'{',
                };
                match stack.pop() {
                    Some((open, _)) if open == want => {}
                    _ => {
                        return Err(SegmentError::Unbalanced {
                            line: tok.line,
                            what: "unmatched closing delimiter",
                        })
                    }
                }
            }
            _ => {}
        }
    }
    match stack.first() {
        Some(&(_, line)) => Err(SegmentError::Unbalanced {
            line,
            what: "delimiter never closed",
        }),
        None => Ok(()),
    }
}
