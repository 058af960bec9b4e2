//! Recursive-descent parser for the concrete formula syntax.
//!
//! Precedence, loosest first: `->` (right-assoc), `|`, `&`, `U`/`R`
//! (right-assoc), then the unary operators `! G F X W`. `W` is the weak
//! next. Propositions are identifiers such as `behind_ij` or `lane_end_k`;
//! the single letters `G F X U R W` and the words `true`/`false` are
//! reserved.

use thiserror::Error;

use super::formula::Formula;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    #[error("unknown operator `{found}` at offset {offset}")]
    UnknownOperator { offset: usize, found: char },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Next,
    WeakNext,
    Until,
    Release,
    Globally,
    Finally,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("`{name}`"),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Next => "`X`".into(),
            Tok::WeakNext => "`W`".into(),
            Tok::Until => "`U`".into(),
            Tok::Release => "`R`".into(),
            Tok::Globally => "`G`".into(),
            Tok::Finally => "`F`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => pos += 1,
            '(' => {
                toks.push((pos, Tok::LParen));
                pos += 1;
            }
            ')' => {
                toks.push((pos, Tok::RParen));
                pos += 1;
            }
            '!' => {
                toks.push((pos, Tok::Not));
                pos += 1;
            }
            '&' => {
                toks.push((pos, Tok::And));
                pos += 1;
            }
            '|' => {
                toks.push((pos, Tok::Or));
                pos += 1;
            }
            '-' => {
                if bytes.get(pos + 1) == Some(&b'>') {
                    toks.push((pos, Tok::Implies));
                    pos += 2;
                } else {
                    return Err(ParseError::UnknownOperator { offset: pos, found: '-' });
                }
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = pos;
                while pos < bytes.len()
                    && ((bytes[pos] as char).is_ascii_alphanumeric() || bytes[pos] == b'_')
                {
                    pos += 1;
                }
                let word = &text[start..pos];
                let tok = match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "G" => Tok::Globally,
                    "F" => Tok::Finally,
                    "X" => Tok::Next,
                    "W" => Tok::WeakNext,
                    "U" => Tok::Until,
                    "R" => Tok::Release,
                    _ => Tok::Ident(word.to_string()),
                };
                toks.push((start, tok));
            }
            other => return Err(ParseError::UnknownOperator { offset: pos, found: other }),
        }
    }
    toks.push((text.len(), Tok::Eof));
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            found: self.peek().describe(),
            expected,
        }
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.and()?;
        if *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.or()?;
            return Ok(lhs.or(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.until()?;
        if *self.peek() == Tok::And {
            self.bump();
            let rhs = self.and()?;
            return Ok(lhs.and(rhs));
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        match self.peek() {
            Tok::Until => {
                self.bump();
                let rhs = self.until()?;
                Ok(lhs.until(rhs))
            }
            Tok::Release => {
                self.bump();
                let rhs = self.until()?;
                Ok(lhs.release(rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::Globally => {
                self.bump();
                Ok(self.unary()?.globally())
            }
            Tok::Finally => {
                self.bump();
                Ok(self.unary()?.finally())
            }
            Tok::Next => {
                self.bump();
                Ok(self.unary()?.next())
            }
            Tok::WeakNext => {
                self.bump();
                Ok(self.unary()?.weak_next())
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::Atom(name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.implies()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(vec!["`)`"]));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error(vec!["formula"])),
        }
    }
}

/// Parse a formula from its concrete syntax.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, pos: 0 };
    let formula = parser.implies()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error(vec!["end of input", "operator"]));
    }
    Ok(formula)
}
