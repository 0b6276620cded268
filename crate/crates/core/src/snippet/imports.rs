//! Import-statement recognizer for Python source.
//!
//! This is not a Python parser. It splits source into statements (tracking
//! strings, comments, brackets, `\` continuations and `;`), peels compound
//! statement headers such as `try:` or `if x:` off one-line bodies, and parses
//! whatever `import` / `from ... import` statements remain.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportOrigin {
    PlainImport,
    FromImport,
}

/// A dotted resource name as the snippet imports it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImportedResource {
    pub name: String,
    pub origin: ImportOrigin,
}

impl ImportedResource {
    pub fn first_segment(&self) -> &str {
        self.name.split('.').next().unwrap_or(&self.name)
    }
}

const COMPOUND_KEYWORDS: &[&str] = &[
    "if", "elif", "else", "try", "except", "finally", "for", "while", "with", "def", "class",
    "async",
];

/// Splits source into statements with string literals replaced by `""`.
fn statements(source: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut depth: usize = 0;
    let mut chars = source.chars().peekable();

    fn flush(current: &mut String, out: &mut Vec<String>) {
        if !current.trim().is_empty() {
            out.push(std::mem::take(current));
        } else {
            current.clear();
        }
    }

    while let Some(c) = chars.next() {
        match c {
            '#' => {
                while chars.peek().is_some_and(|&n| n != '\n') {
                    chars.next();
                }
            }
            '\\' if chars.peek() == Some(&'\n') => {
                chars.next();
                current.push(' ');
            }
            '\\' if chars.peek() == Some(&'\r') => {
                chars.next();
                if chars.peek() == Some(&'\n') {
                    chars.next();
                }
                current.push(' ');
            }
            '\'' | '"' => {
                let quote = c;
                let triple = {
                    let mut probe = chars.clone();
                    probe.next() == Some(quote) && probe.next() == Some(quote)
                };
                if triple {
                    chars.next();
                    chars.next();
                }
                let mut run = 0;
                while let Some(s) = chars.next() {
                    if s == '\\' {
                        chars.next();
                        run = 0;
                        continue;
                    }
                    if s == '\n' && !triple {
                        // unterminated literal; resume at the line break
                        if depth == 0 {
                            flush(&mut current, &mut out);
                        }
                        break;
                    }
                    if s == quote {
                        run += 1;
                        if !triple || run == 3 {
                            break;
                        }
                    } else {
                        run = 0;
                    }
                }
                current.push_str("\"\"");
            }
            '(' | '[' | '{' => {
                depth += 1;
                current.push(c);
            }
            ')' | ']' | '}' => {
                depth = depth.saturating_sub(1);
                current.push(c);
            }
            '\n' if depth == 0 => flush(&mut current, &mut out),
            '\n' | '\r' => current.push(' '),
            ';' if depth == 0 => flush(&mut current, &mut out),
            _ => current.push(c),
        }
    }
    flush(&mut current, &mut out);
    out
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_char(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

fn leading_word(s: &str) -> &str {
    let end = s.find(|c: char| !is_ident_char(c)).unwrap_or(s.len());
    &s[..end]
}

/// Body following the first top-level `:` of a compound statement header.
fn compound_body(stmt: &str) -> Option<&str> {
    let mut depth = 0usize;
    for (i, c) in stmt.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth = depth.saturating_sub(1),
            ':' if depth == 0 => return Some(&stmt[i + 1..]),
            _ => {}
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Dot,
    Comma,
    LParen,
    RParen,
    Star,
    Other,
}

fn lex(s: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if is_ident_start(c) {
            let mut ident = String::new();
            while let Some(&n) = chars.peek().filter(|&&n| is_ident_char(n)) {
                ident.push(n);
                chars.next();
            }
            tokens.push(Token::Ident(ident));
        } else {
            chars.next();
            tokens.push(match c {
                '.' => Token::Dot,
                ',' => Token::Comma,
                '(' => Token::LParen,
                ')' => Token::RParen,
                '*' => Token::Star,
                _ => Token::Other,
            });
        }
    }
    tokens
}

struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn eat(&mut self, token: &Token) -> bool {
        if self.peek() == Some(token) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        match self.peek() {
            Some(Token::Ident(i)) if i == word => {
                self.pos += 1;
                true
            }
            _ => false,
        }
    }

    fn ident(&mut self) -> Option<&'a str> {
        match self.peek() {
            Some(Token::Ident(i)) => {
                self.pos += 1;
                Some(i)
            }
            _ => None,
        }
    }

    fn dotted(&mut self) -> Option<String> {
        let mut name = self.ident()?.to_string();
        while self.peek() == Some(&Token::Dot) {
            self.pos += 1;
            name.push('.');
            name.push_str(self.ident()?);
        }
        Some(name)
    }

    fn skip_alias(&mut self) -> Option<()> {
        if self.keyword("as") {
            self.ident()?;
        }
        Some(())
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }
}

/// `import a.b as c, d`
fn parse_import(cur: &mut Cursor<'_>, out: &mut Vec<ImportedResource>) -> Option<()> {
    loop {
        let name = cur.dotted()?;
        cur.skip_alias()?;
        out.push(ImportedResource {
            name,
            origin: ImportOrigin::PlainImport,
        });
        if !cur.eat(&Token::Comma) {
            break;
        }
    }
    cur.at_end().then_some(())
}

/// `from m import x, y`, `from m import (x as y,)`, `from m import *`
fn parse_from(cur: &mut Cursor<'_>, out: &mut Vec<ImportedResource>) -> Option<()> {
    let mut relative = false;
    while cur.eat(&Token::Dot) {
        relative = true;
    }
    let module = if matches!(cur.peek(), Some(Token::Ident(i)) if i != "import") {
        Some(cur.dotted()?)
    } else {
        None
    };
    if !cur.keyword("import") {
        return None;
    }
    let module = match (relative, module) {
        (false, Some(m)) => m,
        _ => return Some(()),
    };
    if cur.eat(&Token::Star) {
        out.push(ImportedResource {
            name: module,
            origin: ImportOrigin::FromImport,
        });
        return cur.at_end().then_some(());
    }
    let parens = cur.eat(&Token::LParen);
    let mut names = Vec::new();
    while let Some(Token::Ident(_)) = cur.peek() {
        let name = cur.ident()?;
        cur.skip_alias()?;
        names.push(name);
        if !cur.eat(&Token::Comma) {
            break;
        }
    }
    if parens && !cur.eat(&Token::RParen) {
        return None;
    }
    if names.is_empty() || !cur.at_end() {
        return None;
    }
    out.extend(names.into_iter().map(|n| ImportedResource {
        name: format!("{module}.{n}"),
        origin: ImportOrigin::FromImport,
    }));
    Some(())
}

fn collect_statement(stmt: &str, out: &mut Vec<ImportedResource>) {
    let mut stmt = stmt.trim();
    loop {
        let word = leading_word(stmt);
        if !COMPOUND_KEYWORDS.contains(&word) {
            break;
        }
        match compound_body(stmt) {
            Some(body) if !body.trim().is_empty() => stmt = body.trim(),
            _ => return,
        }
    }
    let tokens = lex(stmt);
    let mut cur = Cursor {
        tokens: &tokens,
        pos: 0,
    };
    let mut found = Vec::new();
    let parsed = match cur.bump() {
        Some(Token::Ident(k)) if k == "import" => parse_import(&mut cur, &mut found),
        Some(Token::Ident(k)) if k == "from" => parse_from(&mut cur, &mut found),
        _ => None,
    };
    if parsed.is_some() {
        out.extend(found);
    }
}

/// Every resource a snippet imports, first occurrence first.
///
/// `import a.b, c` gives `a.b` and `c`; `from m import x, y` gives `m.x` and
/// `m.y`; `from m import *` gives `m`. Relative imports give nothing. Imports
/// nested in functions, conditionals or `try` blocks count.
pub fn extract_imports(source: &str) -> Vec<ImportedResource> {
    let mut all = Vec::new();
    for stmt in statements(source) {
        collect_statement(&stmt, &mut all);
    }
    let mut out: Vec<ImportedResource> = Vec::with_capacity(all.len());
    for r in all {
        if !out.iter().any(|o| o.name == r.name) {
            out.push(r);
        }
    }
    out
}
