use crate::error::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    /// Identifier or keyword; keywords are matched case-insensitively.
    Word(String),
    /// Unsigned integer literal text.
    Int(String),
    /// Unsigned decimal literal text (contains a `.`).
    Decimal(String),
    Str(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Star,
    Plus,
    Minus,
    Slash,
    Concat,
    Eq,
    NotEq,
    Lt,
    Gt,
    LtEq,
    GtEq,
    Semi,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Int(s) | Tok::Decimal(s) => format!("number {s}"),
            Tok::Str(s) => format!("string '{s}'"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Star => "`*`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Concat => "`||`".into(),
            Tok::Eq => "`=`".into(),
            Tok::NotEq => "`!=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::LtEq => "`<=`".into(),
            Tok::GtEq => "`>=`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Eof => "end of input".into(),
        }
    }

    pub fn is_word(&self, kw: &str) -> bool {
        matches!(self, Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub offset: usize,
}

const RESERVED: &[&str] = &[
    "SELECT", "FROM", "WHERE", "GROUP", "BY", "HAVING", "ORDER", "ASC", "DESC", "DISTINCT", "ALL",
    "UNION", "INTERSECT", "EXCEPT", "JOIN", "CROSS", "NATURAL", "INNER", "LEFT", "RIGHT", "FULL",
    "OUTER", "ON", "AND", "OR", "XOR", "NOT", "IS", "TRUE", "FALSE", "UNKNOWN", "NULL", "BETWEEN",
    "IN", "EXISTS", "CASE", "WHEN", "THEN", "ELSE", "END", "CAST", "AS", "MAX", "MIN", "SUM",
    "COUNT", "AVG",
];

/// Words that cannot be used as table or column names.
pub fn is_reserved(word: &str) -> bool {
    RESERVED.iter().any(|r| r.eq_ignore_ascii_case(word))
        || crate::ast::Func::from_name(word).is_some()
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |offset: usize, expected: &str| SyntaxError {
        offset,
        expected: vec![expected.to_string()],
        found: text[offset..].chars().next().map_or("end of input".into(), |c| format!("`{c}`")),
    };
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            Tok::Word(text[start..i].to_string())
        } else if c.is_ascii_digit() || (c == b'.' && b.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            if i < b.len() && b[i] == b'.' {
                i += 1;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                Tok::Decimal(text[start..i].to_string())
            } else {
                Tok::Int(text[start..i].to_string())
            }
        } else if c == b'\'' {
            let mut s = String::new();
            i += 1;
            let mut seg = i;
            loop {
                match b.get(i) {
                    None => return Err(err(start, "closing quote")),
                    Some(b'\'') if b.get(i + 1) == Some(&b'\'') => {
                        s.push_str(&text[seg..=i]);
                        i += 2;
                        seg = i;
                    }
                    Some(b'\'') => {
                        s.push_str(&text[seg..i]);
                        i += 1;
                        break;
                    }
                    Some(_) => i += 1,
                }
            }
            Tok::Str(s)
        } else {
            let two = b.get(i + 1).copied();
            let (t, len) = match (c, two) {
                (b'|', Some(b'|')) => (Tok::Concat, 2),
                (b'!', Some(b'=')) => (Tok::NotEq, 2),
                (b'<', Some(b'>')) => (Tok::NotEq, 2),
                (b'<', Some(b'=')) => (Tok::LtEq, 2),
                (b'>', Some(b'=')) => (Tok::GtEq, 2),
                (b'(', _) => (Tok::LParen, 1),
                (b')', _) => (Tok::RParen, 1),
                (b',', _) => (Tok::Comma, 1),
                (b'.', _) => (Tok::Dot, 1),
                (b'*', _) => (Tok::Star, 1),
                (b'+', _) => (Tok::Plus, 1),
                (b'-', _) => (Tok::Minus, 1),
                (b'/', _) => (Tok::Slash, 1),
                (b'=', _) => (Tok::Eq, 1),
                (b'<', _) => (Tok::Lt, 1),
                (b'>', _) => (Tok::Gt, 1),
                (b';', _) => (Tok::Semi, 1),
                _ => return Err(err(start, "token")),
            };
            i += len;
            t
        };
        out.push(Token { tok, offset: start });
    }
    out.push(Token {
        tok: Tok::Eof,
        offset: text.len(),
    });
    Ok(out)
}
