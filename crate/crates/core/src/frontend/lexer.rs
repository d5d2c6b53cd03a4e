//! Tokenizer for the supported Java subset.

use crate::model::CommentKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Keyword,
    /// Numeric, char, string and text-block literals.
    Literal,
    StringLiteral,
    Op,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub line: u32,
    pub offset: usize,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        matches!(self.kind, TokenKind::Op | TokenKind::Punct | TokenKind::Keyword) && self.text == text
    }

    pub fn is_ident(&self) -> bool {
        self.kind == TokenKind::Ident
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawComment {
    pub kind: CommentKind,
    pub text: String,
    pub line: u32,
    pub end_line: u32,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub line: u32,
    pub message: String,
}

pub const KEYWORDS: &[&str] = &[
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

pub const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
];

// Longest first so maximal munch works by prefix test.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=",
    "/=", "%=", "&=", "|=", "^=", "<<", ">>", "+", "-", "*", "/", "%", "=", "<", ">", "!", "~", "?", ":", "&", "|",
    "^",
];

const PUNCT: &[char] = &['(', ')', '{', '}', '[', ']', ';', ',', '.', '@'];

pub struct Lexed {
    pub tokens: Vec<Token>,
    pub comments: Vec<RawComment>,
}

pub fn tokenize(src: &str) -> Result<Lexed, LexError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut comments = Vec::new();
    let mut i = 0;
    let mut line: u32 = 1;

    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            let end = src[i..].find('\n').map_or(bytes.len(), |n| i + n);
            comments.push(RawComment {
                kind: CommentKind::Line,
                text: src[i + 2..end].to_string(),
                line,
                end_line: line,
                offset: i,
            });
            i = end;
            continue;
        }
        if src[i..].starts_with("/*") {
            let Some(close) = src[i + 2..].find("*/") else {
                return Err(LexError {
                    line,
                    message: "unterminated block comment".into(),
                });
            };
            let end = i + 2 + close + 2;
            let body = &src[i + 2..end - 2];
            let is_doc = body.starts_with('*') && body != "*";
            let start_line = line;
            line += body.matches('\n').count() as u32;
            comments.push(RawComment {
                kind: if is_doc { CommentKind::Doc } else { CommentKind::Block },
                text: body.to_string(),
                line: start_line,
                end_line: line,
                offset: i,
            });
            i = end;
            continue;
        }
        let start = i;
        let start_line = line;
        if c == b'"' {
            if src[i..].starts_with("\"\"\"") {
                let Some(close) = src[i + 3..].find("\"\"\"") else {
                    return Err(LexError {
                        line,
                        message: "unterminated text block".into(),
                    });
                };
                let end = i + 3 + close + 3;
                line += src[i..end].matches('\n').count() as u32;
                tokens.push(Token {
                    kind: TokenKind::StringLiteral,
                    text: src[start..end].to_string(),
                    line: start_line,
                    offset: start,
                });
                i = end;
                continue;
            }
            i = scan_quoted(bytes, i, b'"').ok_or_else(|| LexError {
                line,
                message: "unterminated string literal".into(),
            })?;
            tokens.push(Token {
                kind: TokenKind::StringLiteral,
                text: src[start..i].to_string(),
                line,
                offset: start,
            });
            continue;
        }
        if c == b'\'' {
            i = scan_quoted(bytes, i, b'\'').ok_or_else(|| LexError {
                line,
                message: "unterminated character literal".into(),
            })?;
            tokens.push(Token {
                kind: TokenKind::Literal,
                text: src[start..i].to_string(),
                line,
                offset: start,
            });
            continue;
        }
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            i = scan_number(bytes, i);
            tokens.push(Token {
                kind: TokenKind::Literal,
                text: src[start..i].to_string(),
                line,
                offset: start,
            });
            continue;
        }
        let ch = src[i..].chars().next().unwrap_or('\0');
        if ch == '_' || ch == '$' || ch.is_alphabetic() {
            let end = src[i..]
                .char_indices()
                .find(|&(_, ch)| !(ch == '_' || ch == '$' || ch.is_alphanumeric()))
                .map_or(src.len(), |(n, _)| i + n);
            let text = &src[i..end];
            let kind = if KEYWORDS.contains(&text) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            };
            tokens.push(Token {
                kind,
                text: text.to_string(),
                line,
                offset: start,
            });
            i = end;
            continue;
        }
        if PUNCT.contains(&ch) && !src[i..].starts_with("...") {
            tokens.push(Token {
                kind: TokenKind::Punct,
                text: ch.to_string(),
                line,
                offset: start,
            });
            i += 1;
            continue;
        }
        if let Some(op) = OPERATORS.iter().find(|op| src[i..].starts_with(**op)) {
            tokens.push(Token {
                kind: TokenKind::Op,
                text: op.to_string(),
                line,
                offset: start,
            });
            i += op.len();
            continue;
        }
        return Err(LexError {
            line,
            message: format!("unexpected character `{ch}`"),
        });
    }
    Ok(Lexed { tokens, comments })
}

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
    let hex = bytes[i] == b'0' && matches!(bytes.get(i + 1), Some(b'x' | b'X'));
    if hex {
        i += 2;
    }
    while i < bytes.len() {
        let b = bytes[i];
        let exponent = !hex && matches!(b, b'e' | b'E');
        if b.is_ascii_alphanumeric() || b == b'_' {
            i += 1;
            if exponent && matches!(bytes.get(i), Some(b'+' | b'-')) {
                i += 1;
            }
        } else if b == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit) {
            i += 1;
        } else if b == b'.' && !bytes.get(i + 1).is_some_and(|n| n.is_ascii_alphabetic() || *n == b'.') {
            // `1.` is a valid double literal
            i += 1;
        } else {
            break;
        }
    }
    i
}
