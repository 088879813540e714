use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::lexer::{self, Token, TokenKind};
use super::segment::StatementForm;

/// AST-style statement category, modelled on srcML node names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatementCategory {
    FuncCall,
    ExprStmt,
    DeclStmt,
    FunctionSig,
    IfStmt,
    Else,
    Return,
    For,
    While,
    Do,
    Switch,
    Case,
    Try,
    Catch,
    Finally,
    Throw,
    Break,
    Continue,
    Synchronized,
    Other,
}

impl StatementCategory {
    pub const ALL: [StatementCategory; 20] = [
        Self::FuncCall,
        Self::ExprStmt,
        Self::DeclStmt,
        Self::FunctionSig,
        Self::IfStmt,
        Self::Else,
        Self::Return,
        Self::For,
        Self::While,
        Self::Do,
        Self::Switch,
        Self::Case,
        Self::Try,
        Self::Catch,
        Self::Finally,
        Self::Throw,
        Self::Break,
        Self::Continue,
        Self::Synchronized,
        Self::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::FuncCall => "func_call",
            Self::ExprStmt => "expr_stmt",
            Self::DeclStmt => "decl_stmt",
            Self::FunctionSig => "function_sig",
            Self::IfStmt => "if_stmt",
            Self::Else => "else",
            Self::Return => "return",
            Self::For => "for",
            Self::While => "while",
            Self::Do => "do",
            Self::Switch => "switch",
            Self::Case => "case",
            Self::Try => "try",
            Self::Catch => "catch",
            Self::Finally => "finally",
            Self::Throw => "throw",
            Self::Break => "break",
            Self::Continue => "continue",
            Self::Synchronized => "synchronized",
            Self::Other => "other",
        }
    }

    /// Categories that can occur under the given precedence mode.
    pub fn universe(mode: FuncCallPrecedence) -> impl Iterator<Item = StatementCategory> {
        Self::ALL
            .into_iter()
            .filter(move |c| mode == FuncCallPrecedence::On || *c != Self::FuncCall)
    }
}

impl fmt::Display for StatementCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StatementCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown statement category `{s}`"))
    }
}

/// Whether statements containing an invocation are reported as `func_call`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FuncCallPrecedence {
    On,
    Off,
}

impl FromStr for FuncCallPrecedence {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "on" => Ok(Self::On),
            "off" => Ok(Self::Off),
            _ => Err(format!("expected `on` or `off`, got `{s}`")),
        }
    }
}

impl fmt::Display for FuncCallPrecedence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::On => "on",
            Self::Off => "off",
        })
    }
}

const MODIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "native",
    "synchronized",
    "default",
    "strictfp",
    "transient",
    "volatile",
];
const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
];

/// Assigns a category to one segmented statement.
///
/// Control headers keep their keyword category even when they contain calls.
/// Only expression and declaration statements give way to `func_call`.
pub fn categorize(
    text: &str,
    form: StatementForm,
    precedence: FuncCallPrecedence,
) -> StatementCategory {
    let Ok(all) = lexer::tokenize(text) else {
        return StatementCategory::Other;
    };
    let toks: Vec<Token> = all.into_iter().filter(|t| !t.is_comment()).collect();
    let view = Tokens {
        src: text,
        toks: &toks,
    };
    let body = view.skip_label(0);

    match form {
        StatementForm::Signature => StatementCategory::FunctionSig,
        StatementForm::CaseLabel => StatementCategory::Case,
        StatementForm::ControlHeader => view.header_category(body),
        StatementForm::Simple | StatementForm::BlockOpener => {
            view.simple_category(body, form, precedence)
        }
    }
}

struct Tokens<'a> {
    src: &'a str,
    toks: &'a [Token],
}

impl Tokens<'_> {
    fn text(&self, i: usize) -> Option<&str> {
        self.toks.get(i).map(|t| t.text(self.src))
    }

    fn is(&self, i: usize, s: &str) -> bool {
        self.text(i) == Some(s)
    }

    fn is_ident(&self, i: usize) -> bool {
        self.toks.get(i).is_some_and(|t| t.kind == TokenKind::Ident)
    }

    fn skip_label(&self, i: usize) -> usize {
        match self.text(i) {
            Some(w) if self.is_ident(i) && !lexer::is_reserved(w) && self.is(i + 1, ":") => i + 2,
            _ => i,
        }
    }

    fn header_category(&self, i: usize) -> StatementCategory {
        match self.text(i).unwrap_or("") {
            "if" => StatementCategory::IfStmt,
            "else" if self.is(i + 1, "if") => StatementCategory::IfStmt,
            "else" => StatementCategory::Else,
            "for" => StatementCategory::For,
            "while" => StatementCategory::While,
            "do" => StatementCategory::Do,
            "switch" => StatementCategory::Switch,
            "try" => StatementCategory::Try,
            "catch" => StatementCategory::Catch,
            "finally" => StatementCategory::Finally,
            "synchronized" => StatementCategory::Synchronized,
            _ => StatementCategory::Other,
        }
    }

    fn simple_category(
        &self,
        i: usize,
        form: StatementForm,
        precedence: FuncCallPrecedence,
    ) -> StatementCategory {
        match self.text(i) {
            Some("return") => return StatementCategory::Return,
            Some("throw") => return StatementCategory::Throw,
            Some("break") => return StatementCategory::Break,
            Some("continue") => return StatementCategory::Continue,
            Some("assert" | "yield" | "class" | "interface" | "enum") if self.is_ident(i) => {
                return StatementCategory::Other
            }
            _ => {}
        }
        if form == StatementForm::BlockOpener && self.is_method_decl(i) {
            return StatementCategory::FunctionSig;
        }
        let call = self.has_call(i);
        if call && precedence == FuncCallPrecedence::On {
            StatementCategory::FuncCall
        } else if self.is_declaration(i) {
            StatementCategory::DeclStmt
        } else if form == StatementForm::Simple || call {
            StatementCategory::ExprStmt
        } else {
            StatementCategory::Other
        }
    }

    /// An identifier directly followed by `(`, or `new Type<..>(`.
    fn has_call(&self, from: usize) -> bool {
        (from..self.toks.len()).any(|i| {
            let Some(w) = self.text(i) else { return false };
            if !self.is_ident(i) {
                return false;
            }
            if w == "new" {
                return self
                    .skip_type(i + 1)
                    .is_some_and(|after| self.is(after, "("));
            }
            let callable = !lexer::is_reserved(w) || w == "this" || w == "super";
            let annotation = i > 0 && self.is(i - 1, "@");
            callable && !annotation && self.is(i + 1, "(")
        })
    }

    /// Skips a balanced `<...>` group starting at `i`, if present.
    fn skip_angles(&self, i: usize) -> Option<usize> {
        if !self.is(i, "<") {
            return Some(i);
        }
        let mut depth = 0i32;
        for j in i..self.toks.len() {
            match self.text(j)? {
                "<" => depth += 1,
                ">" => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(j + 1);
                    }
                }
                ";" | "{" | "}" | "=" | "(" | ")" => return None,
                _ => {}
            }
        }
        None
    }

    /// Skips a type reference (`int`, `a.b.C<D>[]`), returning the index after it.
    fn skip_type(&self, i: usize) -> Option<usize> {
        let first = self.text(i)?;
        if !self.is_ident(i) {
            return None;
        }
        let mut j = i + 1;
        if !PRIMITIVES.contains(&first) {
            if lexer::is_reserved(first) {
                return None;
            }
            while self.is(j, ".") && self.is_ident(j + 1) {
                j += 2;
            }
            j = self.skip_angles(j)?;
            while self.is(j, ".") && self.is_ident(j + 1) {
                j = self.skip_angles(j + 2)?;
            }
        }
        while self.is(j, "[") && self.is(j + 1, "]") {
            j += 2;
        }
        Some(j)
    }

    /// Skips `@Ann`, `@a.b.Ann(..)` and the given modifier keywords.
    fn skip_prefix(&self, mut i: usize, modifiers: &[&str]) -> usize {
        loop {
            if self.is(i, "@") && self.is_ident(i + 1) && !self.is(i + 1, "interface") {
                i += 2;
                while self.is(i, ".") && self.is_ident(i + 1) {
                    i += 2;
                }
                if self.is(i, "(") {
                    i = self.skip_parens(i);
                }
            } else if self.text(i).is_some_and(|w| modifiers.contains(&w)) {
                i += 1;
            } else {
                return i;
            }
        }
    }

    fn skip_parens(&self, open: usize) -> usize {
        let mut depth = 0usize;
        for j in open..self.toks.len() {
            match self.text(j) {
                Some("(") => depth += 1,
                Some(")") => {
                    depth -= 1;
                    if depth == 0 {
                        return j + 1;
                    }
                }
                _ => {}
            }
        }
        self.toks.len()
    }

    fn is_declaration(&self, i: usize) -> bool {
        let i = self.skip_prefix(i, &["final"]);
        let Some(j) = self.skip_type(i) else {
            return false;
        };
        let name_ok = self
            .text(j)
            .is_some_and(|w| self.is_ident(j) && !lexer::is_reserved(w));
        name_ok
            && match self.text(j + 1) {
                None => true,
                Some(next) => matches!(next, "=" | ";" | "," | "["),
            }
    }

    fn is_method_decl(&self, i: usize) -> bool {
        let mut i = self.skip_prefix(i, MODIFIERS);
        if self.is(i, "<") {
            match self.skip_angles(i) {
                Some(j) => i = j,
                None => return false,
            }
        }
        let Some(j) = self.skip_type(i) else {
            return false;
        };
        let name_ok = self
            .text(j)
            .is_some_and(|w| self.is_ident(j) && !lexer::is_reserved(w));
        if !name_ok || !self.is(j + 1, "(") {
            return false;
        }
        let mut k = self.skip_parens(j + 1);
        if self.is(k, "throws") {
            while k < self.toks.len() && !self.is(k, "{") {
                k += 1;
            }
        }
        self.is(k, "{") && k + 1 == self.toks.len()
    }
}
