use std::fmt;

use super::{Diagnostic, Position};

#[derive(Clone, Debug, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Int(u64),
    Float(f64),
    /// `A+`
    Create,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Equals,
    /// `|…)` including the delimiters.
    Ket(String),
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "`{s}`"),
            TokenKind::Int(n) => write!(f, "`{n}`"),
            TokenKind::Float(x) => write!(f, "`{x}`"),
            TokenKind::Create => f.write_str("`A+`"),
            TokenKind::Arrow => f.write_str("`->`"),
            TokenKind::Plus => f.write_str("`+`"),
            TokenKind::Minus => f.write_str("`-`"),
            TokenKind::Star => f.write_str("`*`"),
            TokenKind::Slash => f.write_str("`/`"),
            TokenKind::Caret => f.write_str("`^`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::LBrace => f.write_str("`{`"),
            TokenKind::RBrace => f.write_str("`}`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::Equals => f.write_str("`=`"),
            TokenKind::Ket(s) => write!(f, "`{s}`"),
            TokenKind::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Position,
    /// First token on its line.
    pub line_start: bool,
}

pub fn tokenize(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut last_line = 0usize;

    while i < chars.len() {
        let ch = chars[i];
        if ch == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if ch == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let pos = Position { line, column: col };
        let start = i;
        let kind = if ch.is_ascii_alphabetic() || ch == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if word == "A" && chars.get(i) == Some(&'+') {
                i += 1;
                TokenKind::Create
            } else {
                TokenKind::Ident(word)
            }
        } else if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())) {
            let mut is_float = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if chars.get(i) == Some(&'.') {
                is_float = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if matches!(chars.get(i), Some('e') | Some('E')) {
                let mut j = i + 1;
                if matches!(chars.get(j), Some('+') | Some('-')) {
                    j += 1;
                }
                if chars.get(j).is_some_and(|c| c.is_ascii_digit()) {
                    is_float = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let literal: String = chars[start..i].iter().collect();
            if is_float {
                match literal.parse() {
                    Ok(x) => TokenKind::Float(x),
                    Err(_) => {
                        diagnostics.push(Diagnostic::error(pos, format!("malformed number `{literal}`")));
                        TokenKind::Float(0.0)
                    }
                }
            } else {
                match literal.parse() {
                    Ok(n) => TokenKind::Int(n),
                    Err(_) => {
                        diagnostics.push(Diagnostic::error(pos, format!("integer `{literal}` is too large")));
                        TokenKind::Int(u64::MAX)
                    }
                }
            }
        } else if ch == '|' {
            while i < chars.len() && chars[i] != ')' && chars[i] != '\n' {
                i += 1;
            }
            if chars.get(i) == Some(&')') {
                i += 1;
                TokenKind::Ket(chars[start..i].iter().collect())
            } else {
                diagnostics.push(Diagnostic::error(pos, "unterminated ket literal"));
                col += i - start;
                continue;
            }
        } else {
            i += 1;
            match ch {
                '-' if chars.get(i) == Some(&'>') => {
                    i += 1;
                    TokenKind::Arrow
                }
                '+' => TokenKind::Plus,
                '-' => TokenKind::Minus,
                '*' => TokenKind::Star,
                '/' => TokenKind::Slash,
                '^' => TokenKind::Caret,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                '{' => TokenKind::LBrace,
                '}' => TokenKind::RBrace,
                ',' => TokenKind::Comma,
                '=' => TokenKind::Equals,
                other => {
                    diagnostics.push(Diagnostic::error(pos, format!("unexpected character `{other}`")));
                    col += 1;
                    continue;
                }
            }
        };
        col += i - start;
        tokens.push(Token {
            kind,
            pos,
            line_start: line != last_line,
        });
        last_line = line;
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        pos: Position { line, column: col },
        line_start: true,
    });
    (tokens, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        let (tokens, diags) = tokenize(text);
        assert!(diags.is_empty(), "{diags:?}");
        tokens.into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn creation_and_arrow() {
        use TokenKind::*;
        assert_eq!(
            kinds("A+0->A+1 A+2"),
            vec![Create, Int(0), Arrow, Create, Int(1), Create, Int(2), Eof]
        );
        assert_eq!(kinds("Ab+1"), vec![Ident("Ab".into()), Plus, Int(1), Eof]);
        assert_eq!(kinds("A + 1"), vec![Ident("A".into()), Plus, Int(1), Eof]);
    }

    #[test]
    fn numbers() {
        use TokenKind::*;
        assert_eq!(
            kinds("3 0.6 1e-20 2.5E3 .5 1e"),
            vec![Int(3), Float(0.6), Float(1e-20), Float(2500.0), Float(0.5), Int(1), Ident("e".into()), Eof]
        );
    }

    #[test]
    fn comments_kets_positions() {
        let (tokens, diags) = tokenize("init |101) # comment\n  detect");
        assert!(diags.is_empty());
        assert_eq!(tokens[1].kind, TokenKind::Ket("|101)".into()));
        assert_eq!(tokens[2].pos, Position { line: 2, column: 3 });
        assert!(tokens[2].line_start);
        assert!(!tokens[1].line_start);
    }

    #[test]
    fn bad_characters_are_reported() {
        let (tokens, diags) = tokenize("param x = 1 $ 2");
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].pos, Position { line: 1, column: 13 });
        assert_eq!(tokens.len(), 6);
    }
}
