//! Recursive-descent parser for piece expressions and piecewise profiles.
//!
//! ```text
//! profile := item (';' item)* ';'?
//! item    := (cond ':')? expr
//! cond    := 'x' ('<'|'<=') num | 'x' ('>'|'>=') num | num ('<'|'<=') 'x' ('<'|'<=') num
//! expr    := term (('+'|'-') term)*
//! term    := unary (('*'|'/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := num | 'x' | func '(' expr ')' | '(' expr ')'
//! ```

use crate::error::{Error, Result, TextPos};
use crate::expr::ExprNode;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(&'static str),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: TextPos,
}

fn syntax(pos: TextPos, msg: impl Into<String>) -> Error {
    Error::Syntax { pos, msg: msg.into() }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = TextPos { line, column: col };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v: f64 = s.parse().map_err(|_| syntax(pos, format!("malformed number '{s}'")))?;
            Tok::Num(v)
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let sym = match two.as_str() {
                "<=" => Some("<="),
                ">=" => Some(">="),
                _ => None,
            };
            if let Some(s) = sym {
                i += 2;
                Tok::Sym(s)
            } else {
                i += 1;
                Tok::Sym(match c {
                    '+' => "+",
                    '-' => "-",
                    '*' => "*",
                    '/' => "/",
                    '^' => "^",
                    '(' => "(",
                    ')' => ")",
                    ';' => ";",
                    ':' => ":",
                    '<' => "<",
                    '>' => ">",
                    other => return Err(syntax(pos, format!("unexpected character '{other}'"))),
                })
            }
        };
        col += i - start;
        out.push(Token { tok, pos });
    }
    out.push(Token { tok: Tok::End, pos: TextPos { line, column: col } });
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Token],
    i: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn pos(&self) -> TextPos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> &Tok {
        let t = &self.toks[self.i].tok;
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(t) if *t == s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected '{s}', found {}", describe(self.peek()))))
        }
    }

    fn expr(&mut self) -> Result<ExprNode> {
        let mut lhs = self.term()?;
        loop {
            if self.eat("+") {
                lhs = ExprNode::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat("-") {
                lhs = ExprNode::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<ExprNode> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat("*") {
                lhs = ExprNode::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat("/") {
                lhs = ExprNode::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<ExprNode> {
        if self.eat("-") {
            return Ok(match self.unary()? {
                ExprNode::Constant(c) => ExprNode::Constant(-c),
                other => ExprNode::Negate(Box::new(other)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprNode> {
        let base = self.primary()?;
        if !matches!(self.peek(), Tok::Sym("^")) {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let exponent = self.unary()?;
        if !exponent.is_constant() {
            return Err(syntax(pos, "exponent must be a constant"));
        }
        let e = exponent.eval(0.0);
        if !e.is_finite() {
            return Err(syntax(pos, "exponent is not finite"));
        }
        Ok(ExprNode::Pow(Box::new(base), e))
    }

    fn primary(&mut self) -> Result<ExprNode> {
        let pos = self.pos();
        match self.bump().clone() {
            Tok::Num(v) => Ok(ExprNode::Constant(v)),
            Tok::Ident(name) => {
                if name == "x" {
                    return Ok(ExprNode::Variable);
                }
                let wrap: fn(Box<ExprNode>) -> ExprNode = match name.as_str() {
                    "exp" => ExprNode::Exp,
                    "ln" => ExprNode::Ln,
                    "sin" => ExprNode::Sin,
                    "cos" => ExprNode::Cos,
                    _ => return Err(syntax(pos, format!("unknown identifier '{name}'"))),
                };
                self.expect("(")?;
                let arg = self.expr()?;
                self.expect(")")?;
                Ok(wrap(Box::new(arg)))
            }
            Tok::Sym("(") => {
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            other => Err(syntax(pos, format!("expected an operand, found {}", describe(&other)))),
        }
    }

    fn signed_number(&mut self) -> Result<f64> {
        let neg = self.eat("-");
        let pos = self.pos();
        match self.bump() {
            Tok::Num(v) => Ok(if neg { -v } else { *v }),
            other => Err(syntax(pos, format!("expected a number, found {}", describe(other)))),
        }
    }

    fn less(&mut self) -> bool {
        self.eat("<") || self.eat("<=")
    }

    fn is_x(&self) -> bool {
        matches!(self.peek(), Tok::Ident(n) if n == "x")
    }

    fn condition(&mut self) -> Result<(f64, f64)> {
        let pos = self.pos();
        if self.is_x() {
            self.bump();
            if self.less() {
                return Ok((f64::NEG_INFINITY, self.signed_number()?));
            }
            if self.eat(">") || self.eat(">=") {
                return Ok((self.signed_number()?, f64::INFINITY));
            }
            return Err(syntax(self.pos(), "expected a comparison after 'x'"));
        }
        let lo = self.signed_number()?;
        if !self.less() {
            return Err(syntax(self.pos(), "expected '<' or '<='"));
        }
        if !self.is_x() {
            return Err(syntax(self.pos(), "expected 'x'"));
        }
        self.bump();
        if !self.less() {
            return Err(syntax(self.pos(), "expected '<' or '<='"));
        }
        let hi = self.signed_number()?;
        if !(lo < hi) {
            return Err(syntax(pos, format!("empty interval [{lo}, {hi})")));
        }
        Ok((lo, hi))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Sym(s) => format!("'{s}'"),
        Tok::End => "end of input".into(),
    }
}

/// Parses a single piece expression.
pub fn parse_expr(text: &str) -> Result<ExprNode> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks: &toks, i: 0 };
    let e = p.expr()?;
    if p.peek() != &Tok::End {
        return Err(syntax(p.pos(), format!("unexpected {}", describe(p.peek()))));
    }
    Ok(e)
}

/// A parsed item: the interval it covers (bounds may be infinite), the
/// expression, and where the item starts in the text.
#[derive(Debug, Clone)]
pub(crate) struct RawPiece {
    pub lo: f64,
    pub hi: f64,
    pub expr: ExprNode,
    pub pos: TextPos,
}

pub(crate) fn parse_pieces(text: &str) -> Result<Vec<RawPiece>> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks: &toks, i: 0 };
    let mut out = Vec::new();
    loop {
        if p.peek() == &Tok::End {
            break;
        }
        let pos = p.pos();
        let has_cond = toks[p.i..]
            .iter()
            .take_while(|t| !matches!(t.tok, Tok::Sym(";") | Tok::End))
            .any(|t| t.tok == Tok::Sym(":"));
        let (lo, hi) = if has_cond {
            let c = p.condition()?;
            p.expect(":")?;
            c
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        };
        let expr = p.expr()?;
        out.push(RawPiece { lo, hi, expr, pos });
        if !p.eat(";") {
            if p.peek() != &Tok::End {
                return Err(syntax(p.pos(), format!("expected ';', found {}", describe(p.peek()))));
            }
            break;
        }
    }
    if out.is_empty() {
        return Err(syntax(p.pos(), "profile has no pieces"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let e = parse_expr("-x^2 + 3*x - 4/2").unwrap();
        assert_eq!(e.eval(2.0), -4.0 + 6.0 - 2.0);
        let e = parse_expr("2^3^2").unwrap();
        assert_eq!(e.eval(0.0), 512.0);
        let e = parse_expr("x^-1 + 1e-1*x").unwrap();
        assert!((e.eval(2.0) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn error_positions() {
        match parse_expr("x +\n  * 2") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, TextPos { line: 2, column: 3 }),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr("sqrt(x)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("x^x"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("(x + 1"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("x $ 1"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn pieces() {
        let p = parse_pieces("x < -1: 0; -1 <= x < 1: 1.5 - x; x >= 1: 3;").unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!((p[1].lo, p[1].hi), (-1.0, 1.0));
        assert_eq!(p[0].lo, f64::NEG_INFINITY);
        let single = parse_pieces("exp(-x^2)").unwrap();
        assert_eq!(single.len(), 1);
        assert!(single[0].lo.is_infinite() && single[0].hi.is_infinite());
        assert!(matches!(parse_pieces("x < 0 1"), Err(Error::Syntax { .. })));
    }
}
