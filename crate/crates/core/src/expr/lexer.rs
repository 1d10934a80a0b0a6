use super::parser::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    Identifier,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Byte offset of the first character.
    pub position: usize,
}

/// Splits `source` into tokens; whitespace is skipped.
pub fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let kind = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => TokenKind::Plus,
            b'-' => TokenKind::Minus,
            b'*' => TokenKind::Star,
            b'/' => TokenKind::Slash,
            b'^' => TokenKind::Caret,
            b'(' => TokenKind::LParen,
            b')' => TokenKind::RParen,
            b',' => TokenKind::Comma,
            b'0'..=b'9' | b'.' => {
                i = scan_number(bytes, start)?;
                tokens.push(Token {
                    kind: TokenKind::Number,
                    text: source[start..i].to_string(),
                    position: start,
                });
                continue;
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Identifier,
                    text: source[start..i].to_string(),
                    position: start,
                });
                continue;
            }
            _ => {
                let c = source[start..].chars().next().unwrap_or('\u{fffd}');
                return Err(ParseError::new(ParseErrorKind::BadCharacter(c), start));
            }
        };
        i += 1;
        tokens.push(Token {
            kind,
            text: source[start..i].to_string(),
            position: start,
        });
    }
    Ok(tokens)
}

/// `digits ['.' digits] [('e'|'E') ['+'|'-'] digits]`, with at least one
/// mantissa digit. Returns the end offset.
fn scan_number(bytes: &[u8], start: usize) -> Result<usize, ParseError> {
    let malformed = |end: usize| {
        let text = String::from_utf8_lossy(&bytes[start..end]).into_owned();
        ParseError::new(ParseErrorKind::MalformedNumber(text), start)
    };
    let digits = |mut i: usize| {
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        i
    };
    let mut i = digits(start);
    let mut mantissa = i - start;
    if i < bytes.len() && bytes[i] == b'.' {
        let after = digits(i + 1);
        mantissa += after - (i + 1);
        i = after;
    }
    if mantissa == 0 {
        return Err(malformed(i));
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        let end = digits(j);
        if end == j {
            // `2e` alone is left for the parser: a number followed by the constant e
            if j == i + 1 {
                return Ok(i);
            }
            return Err(malformed(end));
        }
        i = end;
    }
    Ok(i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<TokenKind> {
        tokenize(s).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn operators_and_positions() {
        use TokenKind::*;
        assert_eq!(
            kinds("x1 + 2.5*(y)^-3 , /"),
            vec![
                Identifier, Plus, Number, Star, LParen, Identifier, RParen, Caret, Minus, Number,
                Comma, Slash
            ]
        );
        let toks = tokenize("  sin( x12 )").unwrap();
        let pos: Vec<usize> = toks.iter().map(|t| t.position).collect();
        assert_eq!(pos, vec![2, 5, 7, 11]);
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn numbers() {
        for s in ["1", "1.", ".5", "1.25e3", "1E-2", "7e+10", "0.000"] {
            let t = tokenize(s).unwrap();
            assert_eq!(t.len(), 1, "{s}");
            assert_eq!(t[0].text, s);
        }
        let t = tokenize("2e").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[1].text, "e");
    }

    #[test]
    fn lexical_errors() {
        let e = tokenize("1 $ 2").unwrap_err();
        assert_eq!(e.position, 2);
        assert_eq!(e.kind, ParseErrorKind::BadCharacter('$'));
        let e = tokenize("x1 + 1e+").unwrap_err();
        assert_eq!(e.position, 5);
        assert!(matches!(e.kind, ParseErrorKind::MalformedNumber(_)));
        let e = tokenize("3*.").unwrap_err();
        assert_eq!(e.position, 2);
        let e = tokenize("1+é").unwrap_err();
        assert_eq!(e.position, 2);
        assert_eq!(e.kind, ParseErrorKind::BadCharacter('é'));
    }
}
