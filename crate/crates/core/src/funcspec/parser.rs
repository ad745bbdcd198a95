//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' INTEGER)?
//! primary := NUMBER | NUMBER 'i' | 'pi' | VARIABLE
//!          | FUNC '(' expr ')'
//!          | 'piecewise' '(' VARIABLE ('<=' | '>=') expr ',' expr ',' expr ')'
//!          | '(' expr ')'
//! ```
//!
//! Variables are `x`, `theta`, `theta1`, `theta2`, `s`, `edge`; functions are
//! `sin`, `cos`, `exp`, `sqrt` (principal branch) and `abs`. The bound of a
//! `piecewise` condition must not contain variables.

use super::expr::{BinOp, CmpOp, Expr, Func, VARIABLES};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64, String),
    Imag(f64),
    Ident(String),
    Op(char),
    Le,
    Ge,
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(_, s) => format!("number `{s}`"),
        Tok::Imag(y) => format!("`{y}i`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::Le => "`<=`".into(),
        Tok::Ge => "`>=`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    let syntax = |line, column, message: String| Error::Syntax { line, column, message };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, column);
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v: f64 = s.parse().map_err(|_| syntax(tl, tc, format!("malformed number `{s}`")))?;
            if !v.is_finite() {
                return Err(syntax(tl, tc, format!("number `{s}` is out of range")));
            }
            if i < chars.len() && chars[i] == 'i' && !chars.get(i + 1).is_some_and(|d| d.is_alphanumeric() || *d == '_')
            {
                i += 1;
                Tok::Imag(v)
            } else {
                Tok::Num(v, s)
            }
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            i += 1;
            match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '<' | '>' if chars.get(i) == Some(&'=') => {
                    i += 1;
                    if c == '<' {
                        Tok::Le
                    } else {
                        Tok::Ge
                    }
                }
                _ => return Err(syntax(tl, tc, format!("unexpected character `{c}`"))),
            }
        };
        column += i - start;
        out.push(Token { tok, line: tl, column: tc });
    }
    out.push(Token { tok: Tok::End, line, column });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(t: &Token, message: String) -> Error {
        Error::Syntax { line: t.line, column: t.column, message }
    }

    fn expect(&mut self, want: Tok) -> Result<Token> {
        let t = self.next();
        if t.tok == want {
            Ok(t)
        } else {
            Err(Self::error_at(&t, format!("expected {}, found {}", describe(&want), describe(&t.tok))))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek().tok == Tok::Op('-') {
            self.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.peek().tok != Tok::Op('^') {
            return Ok(base);
        }
        self.next();
        let t = self.next();
        match &t.tok {
            Tok::Num(v, s) if v.fract() == 0.0 && !s.contains(['.', 'e', 'E']) && *v <= u32::MAX as f64 => {
                Ok(Expr::Pow(Box::new(base), *v as u32))
            }
            other => Err(Self::error_at(
                &t,
                format!("exponent must be a non-negative integer literal, found {}", describe(other)),
            )),
        }
    }

    fn arguments(&mut self, name: &str) -> Result<Vec<Expr>> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.expr()?];
        while self.peek().tok == Tok::Comma {
            self.next();
            args.push(self.expr()?);
        }
        let t = self.next();
        match t.tok {
            Tok::RParen => Ok(args),
            _ => Err(Self::error_at(&t, format!("expected `)` or `,` in call to `{name}`, found {}", describe(&t.tok)))),
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let t = self.next();
        match &t.tok {
            Tok::Num(v, _) => Ok(Expr::Real(*v)),
            Tok::Imag(y) => Ok(Expr::Imag(*y)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) if name == "pi" => Ok(Expr::Pi),
            Tok::Ident(name) if VARIABLES.contains(&name.as_str()) => Ok(Expr::Var(name.clone())),
            Tok::Ident(name) if name == "piecewise" => self.piecewise(),
            Tok::Ident(name) => match Func::from_name(name) {
                Some(func) => {
                    let mut args = self.arguments(name)?;
                    if args.len() != 1 {
                        return Err(Error::Arity { name: name.clone(), expected: 1, got: args.len() });
                    }
                    Ok(Expr::Call(func, Box::new(args.remove(0))))
                }
                None => Err(Error::UnknownIdentifier { name: name.clone(), line: t.line, column: t.column }),
            },
            other => Err(Self::error_at(&t, format!("expected an operand, found {}", describe(other)))),
        }
    }

    fn piecewise(&mut self) -> Result<Expr> {
        self.expect(Tok::LParen)?;
        let vt = self.next();
        let var = match &vt.tok {
            Tok::Ident(v) if VARIABLES.contains(&v.as_str()) => v.clone(),
            Tok::Ident(v) => {
                return Err(Error::UnknownIdentifier { name: v.clone(), line: vt.line, column: vt.column })
            }
            other => {
                return Err(Self::error_at(&vt, format!("piecewise condition must start with a variable, found {}", describe(other))))
            }
        };
        let ot = self.next();
        let op = match ot.tok {
            Tok::Le => CmpOp::Le,
            Tok::Ge => CmpOp::Ge,
            ref other => return Err(Self::error_at(&ot, format!("expected `<=` or `>=`, found {}", describe(other)))),
        };
        let bound_tok = self.peek().clone();
        let bound = self.expr()?;
        if !bound.variables().is_empty() {
            return Err(Self::error_at(&bound_tok, "piecewise bound must be a constant".into()));
        }
        let mut rest = Vec::new();
        while self.peek().tok == Tok::Comma {
            self.next();
            rest.push(self.expr()?);
        }
        let close = self.next();
        if close.tok != Tok::RParen {
            return Err(Self::error_at(&close, format!("expected `)` after piecewise arguments, found {}", describe(&close.tok))));
        }
        if rest.len() != 2 {
            return Err(Error::Arity { name: "piecewise".into(), expected: 3, got: rest.len() + 1 });
        }
        let otherwise = rest.pop().unwrap();
        let then = rest.pop().unwrap();
        Ok(Expr::Piecewise { var, op, bound: Box::new(bound), then: Box::new(then), otherwise: Box::new(otherwise) })
    }
}

pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { tokens: lex(text)?, pos: 0 };
    let e = p.expr()?;
    let t = p.next();
    if t.tok != Tok::End {
        return Err(Parser::error_at(&t, format!("unexpected {}", describe(&t.tok))));
    }
    Ok(e)
}
