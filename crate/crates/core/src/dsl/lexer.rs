use super::DslError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Unsigned integer, decimal or fraction, as written.
    Number(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Eq,
    Bar,
    Amp,
    Tilde,
    Question,
    Minus,
    Plus,
    /// `=>`
    Presumes,
    /// `->`
    Implies,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Question => "`?`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Presumes => "`=>`".into(),
            Tok::Implies => "`->`".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub fn lex(text: &str) -> Result<Vec<Token>, DslError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let push = |out: &mut Vec<Token>, tok| {
                out.push(Token {
                    tok,
                    line: ln + 1,
                    column,
                })
            };
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                let digits = |i: &mut usize| {
                    while *i < chars.len() && chars[*i].is_ascii_digit() {
                        *i += 1;
                    }
                };
                digits(&mut i);
                if i + 1 < chars.len()
                    && (chars[i] == '.' || chars[i] == '/')
                    && chars[i + 1].is_ascii_digit()
                {
                    i += 1;
                    digits(&mut i);
                }
                push(&mut out, Tok::Number(chars[start..i].iter().collect()));
                continue;
            }
            let next = chars.get(i + 1).copied();
            let (tok, width) = match (c, next) {
                ('=', Some('>')) => (Tok::Presumes, 2),
                ('-', Some('>')) => (Tok::Implies, 2),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                (',', _) => (Tok::Comma, 1),
                ('.', _) => (Tok::Dot, 1),
                (':', _) => (Tok::Colon, 1),
                ('=', _) => (Tok::Eq, 1),
                ('|', _) => (Tok::Bar, 1),
                ('&', _) => (Tok::Amp, 1),
                ('~', _) => (Tok::Tilde, 1),
                ('?', _) => (Tok::Question, 1),
                ('-', _) => (Tok::Minus, 1),
                ('+', _) => (Tok::Plus, 1),
                _ => {
                    return Err(DslError::new(
                        ln + 1,
                        column,
                        format!("unexpected character `{c}`"),
                    ))
                }
            };
            push(&mut out, tok);
            i += width;
        }
    }
    Ok(out)
}
