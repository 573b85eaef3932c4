//! Class expressions: `[-] term (± term)*` where a term is `name` or
//! `coef*name` and `coef` is an integer or `p/q` fraction. Names are basis
//! labels or named classes of the target model (`R'` included, hence the
//! apostrophe in identifiers).

use super::{LatticeClass, LatticeError, LatticeModel, Result};
use crate::rational::Rat;
use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Plus,
    Minus,
    Star,
    Slash,
    Int(BigInt),
    Ident(String),
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '+' => {
                chars.next();
                out.push(Token::Plus);
            }
            '-' => {
                chars.next();
                out.push(Token::Minus);
            }
            '*' => {
                chars.next();
                out.push(Token::Star);
            }
            '/' => {
                chars.next();
                out.push(Token::Slash);
            }
            '0'..='9' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Int(s.parse().expect("digits only")));
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Ident(s));
            }
            other => {
                return Err(LatticeError::ExprSyntax {
                    detail: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'m> {
    model: &'m LatticeModel,
    tokens: Vec<Token>,
    pos: usize,
}

impl<'m> Parser<'m> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    /// `coef` after an initial integer has been consumed: optional `/ int`.
    fn finish_coef(&mut self, num: BigInt) -> Result<Rat> {
        if self.peek() == Some(&Token::Slash) {
            self.next();
            match self.next() {
                Some(Token::Int(den)) => {
                    if den.is_zero() {
                        Err(LatticeError::ExprSyntax {
                            detail: "zero denominator".into(),
                        })
                    } else {
                        Ok(Rat::new(num, den))
                    }
                }
                _ => Err(LatticeError::ExprSyntax {
                    detail: "expected an integer after `/`".into(),
                }),
            }
        } else {
            Ok(Rat::from_integer(num))
        }
    }

    /// One term: `ident` or `coef * ident`. Returns (coefficient, name).
    fn term(&mut self) -> Result<(Rat, String)> {
        match self.next() {
            Some(Token::Ident(name)) => Ok((Rat::from_integer(BigInt::from(1)), name)),
            Some(Token::Int(num)) => {
                let coef = self.finish_coef(num)?;
                match self.next() {
                    Some(Token::Star) => {}
                    _ => {
                        return Err(LatticeError::ExprSyntax {
                            detail: "a number must multiply a class name, as in `3*E`".into(),
                        })
                    }
                }
                match self.next() {
                    Some(Token::Ident(name)) => Ok((coef, name)),
                    _ => Err(LatticeError::ExprSyntax {
                        detail: "expected a class name after `*`".into(),
                    }),
                }
            }
            other => Err(LatticeError::ExprSyntax {
                detail: match other {
                    None => "expected a term, found end of input".into(),
                    Some(t) => format!("expected a term, found `{t:?}`"),
                },
            }),
        }
    }

    fn expr(&mut self) -> Result<LatticeClass> {
        let mut terms: Vec<(Rat, String)> = Vec::new();
        let mut sign = match self.peek() {
            Some(Token::Minus) => {
                self.next();
                -1
            }
            Some(Token::Plus) => {
                self.next();
                1
            }
            _ => 1,
        };
        loop {
            let (coef, name) = self.term()?;
            terms.push((coef * Rat::from_integer(BigInt::from(sign)), name));
            match self.next() {
                None => break,
                Some(Token::Plus) => sign = 1,
                Some(Token::Minus) => sign = -1,
                Some(t) => {
                    return Err(LatticeError::ExprSyntax {
                        detail: format!("expected `+` or `-` between terms, found `{t:?}`"),
                    })
                }
            }
        }
        let borrowed: Vec<(&str, Rat)> = terms
            .iter()
            .map(|(c, n)| (n.as_str(), c.clone()))
            .collect();
        self.model.linear_combination(&borrowed)
    }
}

pub fn parse(model: &LatticeModel, input: &str) -> Result<LatticeClass> {
    let tokens = tokenize(input)?;
    if tokens.is_empty() {
        return Err(LatticeError::ExprSyntax {
            detail: "empty expression".into(),
        });
    }
    let mut p = Parser {
        model,
        tokens,
        pos: 0,
    };
    p.expr()
}
