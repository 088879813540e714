//! Hand-labelled method corpus and the independent checks run against it.

use prisel_core::java_stmt::StatementCategory;

pub struct ExpectedStatement {
    pub on: StatementCategory,
    pub off: StatementCategory,
    pub text: String,
}

pub struct LabeledMethod {
    pub id: String,
    pub source: String,
    pub expected: Vec<ExpectedStatement>,
}

const FIXTURE: &str = include_str!("../fixtures/labeled_methods.txt");

pub fn load_labeled_methods() -> Vec<LabeledMethod> {
    let mut out = Vec::new();
    let mut lines = FIXTURE.lines().filter(|l| !l.starts_with('#')).peekable();
    while let Some(header) = lines.next() {
        let id = header
            .strip_prefix("=== ")
            .expect("method header")
            .to_string();
        let mut source = Vec::new();
        for line in lines.by_ref() {
            if line == "---" {
                break;
            }
            source.push(line);
        }
        let mut expected = Vec::new();
        while let Some(line) = lines.peek() {
            if line.starts_with("=== ") {
                break;
            }
            let line = lines.next().unwrap();
            let (cats, text) = line.split_once(" | ").expect("label line");
            let mut cats = cats.split_whitespace();
            expected.push(ExpectedStatement {
                on: cats.next().unwrap().parse().unwrap(),
                off: cats.next().unwrap().parse().unwrap(),
                text: text.to_string(),
            });
        }
        out.push(LabeledMethod {
            id,
            source: source.join("\n"),
            expected,
        });
    }
    out
}

/// Character-level statement counter written independently of the segmenter.
///
/// A statement ends at `;` outside parentheses, at a block-opening `{`, or at a
/// control header; a boundary only counts when some word character was seen
/// since the previous one.
pub fn oracle_statement_count(src: &str) -> usize {
    let chars: Vec<char> = src.chars().collect();
    let n = chars.len();
    let mut i = 0;
    let mut count = 0;
    let mut content = false;
    let mut paren = 0i32;
    let mut init_depth = 0;
    let mut saved_parens: Vec<i32> = Vec::new();
    let mut last_sig = ' ';

    let skip_ws = |mut j: usize| {
        while j < n && chars[j].is_whitespace() {
            j += 1;
        }
        j
    };
    let read_word = |j: usize| {
        let mut k = j;
        while k < n && (chars[k].is_alphanumeric() || chars[k] == '_' || chars[k] == '$') {
            k += 1;
        }
        (chars[j..k].iter().collect::<String>(), k)
    };
    let skip_parens = |j: usize| {
        let mut depth = 0;
        let mut k = j;
        while k < n {
            match chars[k] {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        return k + 1;
                    }
                }
                '"' | '\'' => {
                    let q = chars[k];
                    k += 1;
                    while chars[k] != q {
                        if chars[k] == '\\' {
                            k += 1;
                        }
                        k += 1;
                    }
                }
                _ => {}
            }
            k += 1;
        }
        n
    };

    while i < n {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '/' && i + 1 < n && chars[i + 1] == '/' {
            while i < n && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && i + 1 < n && chars[i + 1] == '*' {
            i += 2;
            while !(chars[i] == '*' && chars[i + 1] == '/') {
                i += 1;
            }
            i += 2;
            continue;
        }
        if c == '"' || c == '\'' {
            i += 1;
            while chars[i] != c {
                if chars[i] == '\\' {
                    i += 1;
                }
                i += 1;
            }
            i += 1;
            content = true;
            last_sig = c;
            continue;
        }
        if c.is_alphabetic() || c == '_' || c == '$' || c.is_ascii_digit() {
            let (word, end) = read_word(i);
            if !content && paren == 0 {
                let after = skip_ws(end);
                let next = chars.get(after).copied();
                let header_with_parens = ["if", "for", "while", "switch", "catch", "synchronized"]
                    .contains(&word.as_str())
                    || (word == "try" && next == Some('('));
                let bare_header = ["do", "finally", "try"].contains(&word.as_str());
                if header_with_parens && next == Some('(') {
                    let j = skip_ws(skip_parens(after));
                    count += 1;
                    let closes = chars.get(j) == Some(&'{')
                        || (word == "while" && chars.get(j) == Some(&';'));
                    if chars.get(j) == Some(&'{') {
                        saved_parens.push(paren);
                    }
                    i = if closes { j + 1 } else { j };
                    last_sig = '{';
                    continue;
                }
                if word == "else" {
                    let (next_word, next_end) = read_word(after);
                    let mut j = if next_word == "if" {
                        skip_ws(skip_parens(skip_ws(next_end)))
                    } else {
                        after
                    };
                    count += 1;
                    if chars.get(j) == Some(&'{') {
                        saved_parens.push(paren);
                        j += 1;
                    }
                    i = j;
                    last_sig = '{';
                    continue;
                }
                if bare_header {
                    count += 1;
                    if next == Some('{') {
                        saved_parens.push(paren);
                    }
                    i = if next == Some('{') { after + 1 } else { after };
                    last_sig = '{';
                    continue;
                }
                if word == "case" || (word == "default" && matches!(next, Some(':') | Some('-'))) {
                    let mut j = end;
                    while !(chars[j] == ':' || (chars[j] == '-' && chars[j + 1] == '>')) {
                        j += 1;
                    }
                    count += 1;
                    i = if chars[j] == ':' { j + 1 } else { j + 2 };
                    continue;
                }
                if next == Some(':') && chars.get(after + 1) != Some(&':') {
                    // statement label
                    i = after + 1;
                    continue;
                }
            }
            content = true;
            last_sig = 'a';
            i = end;
            continue;
        }
        match c {
            '(' | '[' => paren += 1,
            ')' | ']' => paren -= 1,
            ';' if paren == 0 => {
                if content {
                    count += 1;
                }
                content = false;
            }
            '{' => {
                let initializer = matches!(last_sig, '=' | ']')
                    || (init_depth > 0 && matches!(last_sig, '{' | ','));
                if initializer {
                    init_depth += 1;
                } else {
                    if content {
                        count += 1;
                    }
                    content = false;
                    saved_parens.push(paren);
                    paren = 0;
                }
            }
            '}' => {
                if init_depth > 0 {
                    init_depth -= 1;
                } else {
                    if content {
                        count += 1;
                    }
                    content = false;
                    paren = saved_parens.pop().unwrap_or(0);
                }
            }
            _ => {}
        }
        last_sig = c;
        i += 1;
    }
    if content {
        count += 1;
    }
    count
}

/// Removes each statement text from `src` in order, then strips comments and
/// whitespace from what is left.
pub fn uncovered_residue(src: &str, texts: &[&str]) -> String {
    let mut rest = String::new();
    let mut cursor = 0;
    for t in texts {
        let at = src[cursor..].find(t).expect("statement text in source") + cursor;
        rest.push_str(&src[cursor..at]);
        rest.push(' ');
        cursor = at + t.len();
    }
    rest.push_str(&src[cursor..]);

    let mut out = String::new();
    let mut chars = rest.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '/' && chars.peek() == Some(&'/') {
            for d in chars.by_ref() {
                if d == '\n' {
                    break;
                }
            }
        } else if c == '/' && chars.peek() == Some(&'*') {
            chars.next();
            let mut prev = ' ';
            for d in chars.by_ref() {
                if prev == '*' && d == '/' {
                    break;
                }
                prev = d;
            }
        } else if !c.is_whitespace() {
            out.push(c);
        }
    }
    out
}
