//! Recursive-descent parser for the analytic part `h`.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)*
//! atom   := number | number 'i' | 'i' | 'z' | 'exp' '(' expr ')' | '(' expr ')'
//! ```
//!
//! Exponents must be nonnegative integer literals, optionally wrapped in
//! parentheses.

use super::Expr;
use crate::error::{Error, Result};
use crate::Complex;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num {
        value: f64,
        imaginary: bool,
        text: String,
    },
    I,
    Z,
    Exp,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '/' => out.push((start, Tok::Slash)),
            '^' => out.push((start, Tok::Caret)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            '0'..='9' | '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // scientific suffix, e.g. 1e-3; `e` alone would start `exp`
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let literal = &text[start..i];
                let value: f64 = literal
                    .parse()
                    .map_err(|_| syntax(start, format!("malformed number `{literal}`")))?;
                let imaginary =
                    i < bytes.len() && bytes[i] == b'i' && !continues_ident(bytes, i + 1);
                if imaginary {
                    i += 1;
                }
                out.push((
                    start,
                    Tok::Num {
                        value,
                        imaginary,
                        text: text[start..i].to_string(),
                    },
                ));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "z" => Tok::Z,
                    "i" => Tok::I,
                    "exp" => Tok::Exp,
                    _ => return Err(syntax(start, format!("unknown identifier `{word}`"))),
                };
                out.push((start, tok));
                continue;
            }
            other => return Err(syntax(start, format!("unexpected character `{other}`"))),
        }
        i += 1;
    }
    Ok(out)
}

fn continues_ident(bytes: &[u8], at: usize) -> bool {
    at < bytes.len() && bytes[at].is_ascii_alphanumeric()
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let at = self.offset();
        match self.bump() {
            Some(t) if t == tok => Ok(()),
            Some(_) => Err(syntax(at, format!("expected {what}"))),
            None => Err(syntax(at, format!("expected {what}, found end of input"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.atom()?;
        while self.peek() == Some(&Tok::Caret) {
            self.bump();
            let exponent = self.exponent()?;
            base = Expr::Pow(Box::new(base), exponent);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32> {
        let at = self.offset();
        let parenthesized = self.peek() == Some(&Tok::LParen);
        if parenthesized {
            self.bump();
        }
        let bad = |found: String| Error::BadExponent {
            position: at,
            found,
        };
        let value = match self.bump() {
            Some(Tok::Num {
                value,
                imaginary: false,
                text,
            }) => {
                if value.fract() != 0.0 || value > u32::MAX as f64 || text.contains(['e', 'E']) {
                    return Err(bad(text));
                }
                value as u32
            }
            Some(Tok::Num { text, .. }) => return Err(bad(text)),
            Some(Tok::Minus) => {
                let rest = match self.bump() {
                    Some(Tok::Num { text, .. }) => text,
                    _ => String::new(),
                };
                return Err(bad(format!("-{rest}")));
            }
            Some(Tok::Z) => return Err(bad("z".into())),
            Some(Tok::I) => return Err(bad("i".into())),
            Some(_) => return Err(syntax(at, "expected integer exponent")),
            None => return Err(syntax(at, "expected integer exponent, found end of input")),
        };
        if parenthesized {
            self.expect(Tok::RParen, "`)` closing the exponent")?;
        }
        Ok(value)
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num {
                value, imaginary, ..
            }) => Ok(Expr::Const(if imaginary {
                Complex::new(0.0, value)
            } else {
                Complex::new(value, 0.0)
            })),
            Some(Tok::I) => Ok(Expr::Const(Complex::new(0.0, 1.0))),
            Some(Tok::Z) => Ok(Expr::Var),
            Some(Tok::Exp) => {
                self.expect(Tok::LParen, "`(` after exp")?;
                let arg = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Exp(Box::new(arg)))
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(_) => Err(syntax(at, "expected a number, `z`, `i`, `exp(` or `(`")),
            None => Err(syntax(at, "unexpected end of input")),
        }
    }
}

pub(crate) fn parse_expr(text: &str) -> Result<Expr> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(syntax(0, "empty expression"));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(syntax(p.offset(), "unexpected trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_of_unary_minus_and_power() {
        let e = parse_expr("-z^2").unwrap();
        assert_eq!(e, Expr::Neg(Box::new(Expr::Pow(Box::new(Expr::Var), 2))));
    }

    #[test]
    fn complex_literals() {
        assert_eq!(
            parse_expr("2.5i").unwrap(),
            Expr::Const(Complex::new(0.0, 2.5))
        );
        assert_eq!(
            parse_expr("1+2i").unwrap(),
            Expr::Add(
                Box::new(Expr::Const(Complex::new(1.0, 0.0))),
                Box::new(Expr::Const(Complex::new(0.0, 2.0)))
            )
        );
        assert_eq!(
            parse_expr("1e-3").unwrap(),
            Expr::Const(Complex::new(1e-3, 0.0))
        );
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_expr("z + * 2") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 4),
            other => panic!("unexpected {other:?}"),
        }
        match parse_expr("(z+1") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_expr("sin(z)"),
            Err(Error::Syntax { position: 0, .. })
        ));
        assert!(matches!(parse_expr(""), Err(Error::Syntax { .. })));
        assert!(matches!(
            parse_expr("z z"),
            Err(Error::Syntax { position: 2, .. })
        ));
    }

    #[test]
    fn exponent_must_be_nonnegative_integer() {
        assert!(matches!(
            parse_expr("z^-1"),
            Err(Error::BadExponent { position: 2, .. })
        ));
        assert!(matches!(
            parse_expr("z^1.5"),
            Err(Error::BadExponent { .. })
        ));
        assert!(matches!(parse_expr("z^z"), Err(Error::BadExponent { .. })));
        assert!(matches!(parse_expr("z^2i"), Err(Error::BadExponent { .. })));
        assert_eq!(
            parse_expr("z^(3)").unwrap(),
            Expr::Pow(Box::new(Expr::Var), 3)
        );
    }
}
