#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    Char,
    Str,
    Op,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based source line of the first character.
    pub line: u32,
    /// Whitespace or a comment separates this token from the previous one.
    pub spaced: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub line: u32,
    pub message: String,
}

// longest first
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=",
    "*=", "/=", "%=", "&=", "|=", "^=", "<<", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@",
    "=", "<", ">", "!", "~", "?", ":", "+", "-", "*", "/", "&", "|", "^", "%",
];

/// Splits source text into tokens, dropping whitespace and comments.
///
/// `>` is always a single token so nested generic closers need no special
/// casing; the parser glues adjacent `>` back into shift operators.
pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut spaced = false;
    let err = |line, message: &str| LexError { line, message: message.to_owned() };

    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            line += 1;
            spaced = true;
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            spaced = true;
            i += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            spaced = true;
            continue;
        }
        if src[i..].starts_with("/*") {
            let Some(end) = src[i + 2..].find("*/") else {
                return Err(err(line, "unterminated block comment"));
            };
            line += src[i..i + 2 + end].matches('\n').count() as u32;
            i += end + 4;
            spaced = true;
            continue;
        }

        let start = i;
        let kind = if c == b'"' || c == b'\'' {
            i += 1;
            loop {
                match bytes.get(i) {
                    None | Some(b'\n') => return Err(err(line, "unterminated literal")),
                    Some(b'\\') => i += 2,
                    Some(&q) if q == c => {
                        i += 1;
                        break;
                    }
                    Some(_) => i += 1,
                }
            }
            if c == b'"' { TokenKind::Str } else { TokenKind::Char }
        } else if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < bytes.len() {
                let d = bytes[i];
                let exp_sign = (d == b'+' || d == b'-')
                    && matches!(bytes[i - 1], b'e' | b'E')
                    && !src[start..i].starts_with("0x");
                if d.is_ascii_alphanumeric() || d == b'_' || d == b'.' || exp_sign {
                    i += 1;
                } else {
                    break;
                }
            }
            TokenKind::Number
        } else if c == b'_' || c == b'$' || c.is_ascii_alphabetic() || c >= 0x80 {
            let rest = &src[i..];
            let len = rest
                .char_indices()
                .find(|&(_, ch)| !(ch == '_' || ch == '$' || ch.is_alphanumeric()))
                .map_or(rest.len(), |(n, _)| n);
            if len == 0 {
                return Err(err(line, "unexpected character"));
            }
            i += len;
            TokenKind::Ident
        } else {
            let Some(op) = OPERATORS.iter().find(|op| src[i..].starts_with(**op)) else {
                return Err(err(line, "unexpected character"));
            };
            i += op.len();
            TokenKind::Op
        };
        tokens.push(Token { kind, text: src[start..i].to_owned(), line, spaced });
        spaced = false;
    }
    Ok(tokens)
}
