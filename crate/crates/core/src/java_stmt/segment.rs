use serde::{Deserialize, Serialize};

use super::lexer::{self, Token, TokenKind};
use super::SegmentError;

/// Syntactic shape of a segmented statement, used to pick its category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatementForm {
    /// The method's own signature, up to and including its opening brace.
    Signature,
    /// `if (..)`, `else`, `for (..)`, `try`, `catch (..)` and friends.
    ControlHeader,
    /// `case X:` or `default:`.
    CaseLabel,
    /// A `;`-terminated statement, or the tail of one after a nested block.
    Simple,
    /// A statement cut short by a nested block: lambda bodies, anonymous or local classes.
    BlockOpener,
}

/// A statement boundary found by [`segment`], not yet categorized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawStatement {
    pub index: usize,
    pub text: String,
    pub line_start: usize,
    pub line_end: usize,
    pub depth: usize,
    pub form: StatementForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BraceKind {
    Block {
        mid_statement: bool,
        saved_paren: usize,
    },
    Initializer,
}

const PAREN_HEADERS: &[&str] = &["if", "for", "while", "switch", "catch", "synchronized"];

struct Segmenter<'a> {
    src: &'a str,
    toks: Vec<Token>,
    frames: Vec<BraceKind>,
    paren: usize,
    out: Vec<RawStatement>,
}

/// Splits one Java method into statements in source order.
///
/// Comments and brace-only fragments never become statements. Semicolons inside
/// parentheses, literals and comments are not terminators.
pub fn segment(source: &str) -> Result<Vec<RawStatement>, SegmentError> {
    let all = lexer::tokenize(source)?;
    lexer::check_balance(source, &all)?;
    let toks: Vec<Token> = all.into_iter().filter(|t| !t.is_comment()).collect();

    let mut seg = Segmenter {
        src: source,
        toks,
        frames: Vec::new(),
        paren: 0,
        out: Vec::new(),
    };
    seg.run();
    if seg.out.is_empty() {
        return Err(SegmentError::EmptySource);
    }
    Ok(seg.out)
}

impl<'a> Segmenter<'a> {
    fn punct(&self, i: usize, p: &str) -> bool {
        self.toks.get(i).is_some_and(|t| t.is_punct(self.src, p))
    }

    fn word(&self, i: usize, w: &str) -> bool {
        self.toks.get(i).is_some_and(|t| t.is_word(self.src, w))
    }

    fn block_depth(&self) -> usize {
        self.frames
            .iter()
            .filter(|f| matches!(f, BraceKind::Block { .. }))
            .count()
    }

    /// Index of the `)` matching the `(` at `open`.
    fn matching_paren(&self, open: usize) -> usize {
        let mut depth = 0usize;
        for i in open..self.toks.len() {
            if self.punct(i, "(") {
                depth += 1;
            } else if self.punct(i, ")") {
                depth -= 1;
                if depth == 0 {
                    return i;
                }
            }
        }
        self.toks.len() - 1
    }

    fn emit(&mut self, first: usize, last: usize, form: StatementForm, depth: usize) {
        let has_content = self.toks[first..=last]
            .iter()
            .any(|t| t.kind != TokenKind::Punct);
        if !has_content {
            return;
        }
        let (a, b) = (self.toks[first], self.toks[last]);
        self.out.push(RawStatement {
            index: self.out.len(),
            text: self.src[a.start..b.end].to_string(),
            line_start: a.line,
            line_end: b.end_line,
            depth,
            form,
        });
    }

    fn open_block(&mut self, mid_statement: bool) {
        self.frames.push(BraceKind::Block {
            mid_statement,
            saved_paren: self.paren,
        });
        self.paren = 0;
    }

    /// Pops the frame closed by a `}`. Returns true when an interrupted statement resumes.
    fn close_brace(&mut self) -> bool {
        match self.frames.pop() {
            Some(BraceKind::Block {
                mid_statement,
                saved_paren,
            }) => {
                self.paren = saved_paren;
                mid_statement
            }
            _ => false,
        }
    }

    fn run(&mut self) {
        let mut i = 0;
        // start token, form and depth of the statement being accumulated
        let mut open: Option<(usize, StatementForm, usize)> = None;

        while i < self.toks.len() {
            let Some((start, form, depth)) = open else {
                if self.punct(i, "}") {
                    if self.close_brace() {
                        open = Some((i + 1, StatementForm::Simple, self.block_depth()));
                    }
                    i += 1;
                } else if self.punct(i, "{") {
                    self.open_block(false);
                    i += 1;
                } else if self.punct(i, ";") {
                    i += 1;
                } else {
                    match self.try_header(i) {
                        Some(next) => i = next,
                        None => {
                            open = Some((i, StatementForm::Simple, self.block_depth()));
                        }
                    }
                }
                continue;
            };

            let tok = self.toks[i];
            let text = tok.text(self.src);
            if tok.kind == TokenKind::Punct {
                match text {
                    "(" | "[" => self.paren += 1,
                    ")" | "]" => self.paren = self.paren.saturating_sub(1),
                    ";" if self.paren == 0 => {
                        if start <= i {
                            self.emit(start, i, form, depth);
                        }
                        open = None;
                    }
                    "{" => {
                        if self.is_initializer(i) {
                            self.frames.push(BraceKind::Initializer);
                        } else {
                            let form = if self.out.is_empty() && self.frames.is_empty() {
                                StatementForm::Signature
                            } else {
                                StatementForm::BlockOpener
                            };
                            self.emit(start, i, form, depth);
                            self.open_block(form == StatementForm::BlockOpener);
                            open = None;
                        }
                    }
                    "}" => {
                        if matches!(self.frames.last(), Some(BraceKind::Initializer)) {
                            self.frames.pop();
                        } else {
                            // unterminated statement closed by its block
                            if start < i {
                                self.emit(start, i - 1, form, depth);
                            }
                            open = None;
                            if self.close_brace() {
                                open = Some((i + 1, StatementForm::Simple, self.block_depth()));
                            }
                        }
                    }
                    _ => {}
                }
            }
            i += 1;
        }

        if let Some((start, form, depth)) = open {
            if start < self.toks.len() {
                self.emit(start, self.toks.len() - 1, form, depth);
            }
        }
    }

    fn is_initializer(&self, i: usize) -> bool {
        let Some(prev) = i.checked_sub(1).map(|p| self.toks[p].text(self.src)) else {
            return false;
        };
        match prev {
            "=" | "]" => true,
            "{" | "," => matches!(self.frames.last(), Some(BraceKind::Initializer)),
            _ => false,
        }
    }

    /// Recognizes a control header or case label starting at `i`, emitting it and
    /// returning the index of the next unconsumed token.
    fn try_header(&mut self, i: usize) -> Option<usize> {
        let depth = self.block_depth();
        let tok = self.toks[i];
        if tok.kind != TokenKind::Ident {
            return None;
        }
        let word = tok.text(self.src);

        // `label: for (...)`
        if !lexer::is_reserved(word) && self.punct(i + 1, ":") {
            return self.header_at(i, i + 2, depth);
        }
        if word == "case"
            || (word == "default" && (self.punct(i + 1, ":") || self.punct(i + 1, "->")))
        {
            let mut paren = 0usize;
            for j in i + 1..self.toks.len() {
                let t = self.toks[j].text(self.src);
                match t {
                    "(" | "[" => paren += 1,
                    ")" | "]" => paren = paren.saturating_sub(1),
                    ":" | "->" if paren == 0 => {
                        self.emit(i, j, StatementForm::CaseLabel, depth);
                        return Some(j + 1);
                    }
                    ";" | "{" | "}" => return None,
                    _ => {}
                }
            }
            return None;
        }
        self.header_at(i, i, depth)
    }

    /// `start` is where the statement text begins; `kw` is the header keyword.
    fn header_at(&mut self, start: usize, kw: usize, depth: usize) -> Option<usize> {
        let word = self.toks.get(kw)?.text(self.src);
        let end = if PAREN_HEADERS.contains(&word) || (word == "try" && self.punct(kw + 1, "(")) {
            if !self.punct(kw + 1, "(") {
                return None;
            }
            self.matching_paren(kw + 1)
        } else if word == "else" {
            if self.word(kw + 1, "if") && self.punct(kw + 2, "(") {
                self.matching_paren(kw + 2)
            } else {
                kw
            }
        } else if matches!(word, "try" | "do" | "finally") {
            kw
        } else {
            return None;
        };

        if self.punct(end + 1, "{") {
            self.emit(start, end + 1, StatementForm::ControlHeader, depth);
            self.open_block(false);
            Some(end + 2)
        } else if self.punct(end + 1, ";") && word == "while" {
            // do { .. } while (cond);
            self.emit(start, end + 1, StatementForm::ControlHeader, depth);
            Some(end + 2)
        } else {
            self.emit(start, end, StatementForm::ControlHeader, depth);
            Some(end + 1)
        }
    }
}
