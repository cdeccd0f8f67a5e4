use crate::rational::{parse_rational, Rational, RationalError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Num(Rational),
    Ident(String),
    LParen,
    RParen,
    Bang,
    Amp,
    Bar,
    Arrow,
    Plus,
    Minus,
    Ge,
    Le,
    Gt,
    Lt,
    Eq,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Num(r) => format!("number `{r}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug)]
pub(crate) struct LexError {
    pub offset: usize,
    pub message: String,
}

/// Tokens paired with their character offsets; always ends with `Eof`.
pub(crate) fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, LexError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '!' => Tok::Bang,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '+' => Tok::Plus,
            '=' => Tok::Eq,
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Arrow
            }
            '-' => Tok::Minus,
            '>' if chars.get(i + 1) == Some(&'=') => {
                i += 1;
                Tok::Ge
            }
            '>' => Tok::Gt,
            '<' if chars.get(i + 1) == Some(&'=') => {
                i += 1;
                Tok::Le
            }
            '<' => Tok::Lt,
            d if d.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j < chars.len() && chars[j] == '/' {
                    j += 1;
                    if j >= chars.len() || !chars[j].is_ascii_digit() {
                        return Err(LexError {
                            offset: j,
                            message: "expected denominator digits after `/`".into(),
                        });
                    }
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                if j < chars.len() && chars[j] == '.' {
                    return Err(LexError {
                        offset: j,
                        message: "decimal numbers are not accepted; write `p/q`".into(),
                    });
                }
                let lit: String = chars[i..j].iter().collect();
                i = j - 1;
                match parse_rational(&lit) {
                    Ok(r) => Tok::Num(r),
                    Err(RationalError::ZeroDenominator(_)) => {
                        return Err(LexError {
                            offset: start,
                            message: format!("rational `{lit}` has a zero denominator"),
                        })
                    }
                    Err(e) => {
                        return Err(LexError {
                            offset: start,
                            message: e.to_string(),
                        })
                    }
                }
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                i = j - 1;
                Tok::Ident(word)
            }
            other => {
                return Err(LexError {
                    offset: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::Eof, chars.len()));
    Ok(out)
}
