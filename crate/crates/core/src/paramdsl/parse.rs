//! Recursive-descent parser for parameter-function expressions.
//!
//! Grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?
//! exponent:= ['-'] integer | '(' ['-'] integer ')'
//! primary := number | variable | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | ln | sqrt
//! ```

use thiserror::Error;

use super::expr::{Expr, Func};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected {}, found {found}", expected.join(" or "))]
    Unexpected {
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("exponent must be an integer literal, found {0}")]
    NonIntegerExponent(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
}

/// Syntax error with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    /// The expected-token set, empty for non-syntax errors.
    pub fn expected(&self) -> &[&'static str] {
        match &self.kind {
            ParseErrorKind::Unexpected { expected, .. } => expected,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(_, s) => format!("number `{s}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((start, Tok::Plus)),
            b'-' => out.push((start, Tok::Minus)),
            b'*' => out.push((start, Tok::Star)),
            b'/' => out.push((start, Tok::Slash)),
            b'^' => out.push((start, Tok::Caret)),
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let save = i;
                    i += 1;
                    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                        i += 1;
                    }
                    if i < bytes.len() && bytes[i].is_ascii_digit() {
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    } else {
                        i = save;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    kind: ParseErrorKind::Unexpected {
                        expected: vec!["number"],
                        found: format!("`{text}`"),
                    },
                })?;
                out.push((start, Tok::Num(v, text.to_string())));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::Unexpected {
                        expected: vec!["operand", "operator"],
                        found: format!("`{ch}`"),
                    },
                });
            }
        }
        i += 1;
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    var: &'a str,
}

const OPERAND: &[&str] = &["operand"];

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind: ParseErrorKind::Unexpected {
                expected: expected.to_vec(),
                found: self.peek().describe(),
            },
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exp = self.exponent()?;
        Ok(Expr::Pow(Box::new(base), exp))
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let paren = *self.peek() == Tok::LParen;
        if paren {
            self.bump();
        }
        let neg = *self.peek() == Tok::Minus;
        if neg {
            self.bump();
        }
        let at = self.offset();
        let n = match self.bump() {
            Tok::Num(v, text) => {
                if v.fract() != 0.0 || text.contains(['.', 'e', 'E']) || v > i32::MAX as f64 {
                    return Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::NonIntegerExponent(text),
                    });
                }
                v as i32
            }
            _ => {
                self.pos -= 1;
                return Err(self.unexpected(&["integer exponent"]));
            }
        };
        if paren {
            if *self.peek() != Tok::RParen {
                return Err(self.unexpected(&["`)`"]));
            }
            self.bump();
        }
        Ok(if neg { -n } else { n })
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(v, _) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected(&["`)`", "operator"]));
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if name == self.var {
                    return Ok(Expr::Var);
                }
                let func = match name.as_str() {
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    "ln" => Func::Ln,
                    "sqrt" => Func::Sqrt,
                    _ => {
                        return Err(ParseError {
                            offset: at,
                            kind: ParseErrorKind::UnknownIdentifier(name),
                        })
                    }
                };
                if *self.peek() != Tok::LParen {
                    return Err(self.unexpected(&["`(`"]));
                }
                self.bump();
                let arg = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected(&["`)`", "operator"]));
                }
                self.bump();
                Ok(Expr::Func(func, Box::new(arg)))
            }
            _ => Err(self.unexpected(OPERAND)),
        }
    }
}

/// Parses `src` with `var` as the single free variable.
pub fn parse_expr(src: &str, var: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, var };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected(&["operator", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dangling_operator_reports_offset() {
        let e = parse_expr("t +", "t").unwrap_err();
        assert_eq!(e.offset, 3);
        assert_eq!(e.expected(), &["operand"]);
    }

    #[test]
    fn exponent_rules() {
        assert_eq!(
            parse_expr("t^-2", "t").unwrap(),
            Expr::Pow(Box::new(Expr::Var), -2)
        );
        assert_eq!(
            parse_expr("t^(-2)", "t").unwrap(),
            Expr::Pow(Box::new(Expr::Var), -2)
        );
        let e = parse_expr("t^0.5", "t").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonIntegerExponent("0.5".into()));
        assert_eq!(e.offset, 2);
        assert!(parse_expr("t^t", "t").is_err());
    }

    #[test]
    fn unknown_identifier() {
        let e = parse_expr("2*x", "t").unwrap_err();
        assert_eq!(e.offset, 2);
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("x".into()));
        assert!(parse_expr("mu + 1", "mu").is_ok());
        assert!(parse_expr("eta", "t").is_err());
    }

    #[test]
    fn trailing_garbage() {
        let e = parse_expr("t t", "t").unwrap_err();
        assert_eq!(e.offset, 2);
        let e = parse_expr("(t", "t").unwrap_err();
        assert_eq!(e.offset, 2);
        let e = parse_expr("t $ 1", "t").unwrap_err();
        assert_eq!(e.offset, 2);
    }

    #[test]
    fn precedence() {
        // -t^2 is -(t^2); 1-2-3 is left associative
        assert_eq!(
            parse_expr("-t^2", "t").unwrap(),
            Expr::Neg(Box::new(Expr::Pow(Box::new(Expr::Var), 2)))
        );
        let e = parse_expr("1-2-3", "t").unwrap();
        assert_eq!(e.eval(0.0).unwrap(), -4.0);
        let e = parse_expr("2*3^2/6", "t").unwrap();
        assert_eq!(e.eval(0.0).unwrap(), 3.0);
        let e = parse_expr("1.5e2 + 1E-1", "t").unwrap();
        assert_eq!(e.eval(0.0).unwrap(), 150.1);
    }
}
