//! Recursive-descent parser for the formula grammar.
//!
//! Precedence, loosest first: `=>` (right-assoc), `|`, `xor`, `&`, `!`.

use super::{ExprError, FeatureExpr};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Xor,
    Implies,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '!' => Tok::Not,
            '&' => Tok::And,
            '|' => Tok::Or,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '=' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Implies
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i + 1 < bytes.len()
                    && ((bytes[i + 1] as char).is_ascii_alphanumeric() || bytes[i + 1] == b'_')
                {
                    i += 1;
                }
                match &src[start..=i] {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "xor" => Tok::Xor,
                    w => Tok::Ident(w.to_string()),
                }
            }
            other => {
                return Err(ExprError::Parse {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.len)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T, ExprError> {
        Err(ExprError::Parse {
            pos: self.offset(),
            msg: msg.to_string(),
        })
    }

    fn implication(&mut self) -> Result<FeatureExpr, ExprError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implication()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<FeatureExpr, ExprError> {
        let mut e = self.exclusive()?;
        while self.eat(&Tok::Or) {
            e = e | self.exclusive()?;
        }
        Ok(e)
    }

    fn exclusive(&mut self) -> Result<FeatureExpr, ExprError> {
        let mut e = self.conjunction()?;
        while self.eat(&Tok::Xor) {
            e = e ^ self.conjunction()?;
        }
        Ok(e)
    }

    fn conjunction(&mut self) -> Result<FeatureExpr, ExprError> {
        let mut e = self.unary()?;
        while self.eat(&Tok::And) {
            e = e & self.unary()?;
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<FeatureExpr, ExprError> {
        if self.eat(&Tok::Not) {
            return Ok(!self.unary()?);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<FeatureExpr, ExprError> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.err("unexpected end of formula"),
        };
        self.pos += 1;
        match tok {
            Tok::True => Ok(FeatureExpr::True),
            Tok::False => Ok(FeatureExpr::False),
            Tok::Ident(name) => Ok(FeatureExpr::Var(name)),
            Tok::LParen => {
                let e = self.implication()?;
                if !self.eat(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            _ => {
                self.pos -= 1;
                self.err("expected an operand")
            }
        }
    }
}

pub(super) fn parse(src: &str) -> Result<FeatureExpr, ExprError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        len: src.len(),
    };
    let e = p.implication()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}
