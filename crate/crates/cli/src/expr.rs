//! Witt vector expressions: literals `[a0, a1, ...]`, `+`, `-`, `*`,
//! parentheses and the maps `F`, `T`, `V`.

use deltaiso::witt::WittVector;
use deltaiso::{Error, Result, Zp};

const MAX_DEPTH: usize = 64;
const MAX_INPUT: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Literal(Vec<i64>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Frobenius(Box<Expr>),
    Truncate(Box<Expr>),
    Verschiebung(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Sym(char),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '0'..='9' => {
                let start = i;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = cs[start..i].iter().collect();
                let v = text.parse::<i64>().map_err(|_| Error::Parse(format!("integer {text} out of range")))?;
                out.push((start, Tok::Int(v)));
            }
            '[' | ']' | '(' | ')' | ',' | '+' | '-' | '*' => {
                out.push((i, Tok::Sym(c)));
                i += 1;
            }
            'F' | 'T' | 'V' => {
                out.push((i, Tok::Op(c)));
                i += 1;
            }
            _ => return Err(Error::Parse(format!("unexpected character {c:?} at {i}"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn where_(&self) -> String {
        self.toks.get(self.pos).map_or("end of input".into(), |t| format!("position {}", t.0))
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!("expected {c:?} at {}", self.where_())))
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(Error::Parse(format!("expression nested deeper than {MAX_DEPTH}")));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Sym('+')) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Sym('-')) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(&Tok::Sym('*')) {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        self.enter()?;
        let e = match self.peek().cloned() {
            Some(Tok::Sym('-')) => {
                self.pos += 1;
                Expr::Neg(Box::new(self.factor()?))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                e
            }
            Some(Tok::Sym('[')) => {
                self.pos += 1;
                Expr::Literal(self.literal()?)
            }
            Some(Tok::Op(op)) => {
                self.pos += 1;
                self.expect('(')?;
                let e = Box::new(self.expr()?);
                self.expect(')')?;
                match op {
                    'F' => Expr::Frobenius(e),
                    'T' => Expr::Truncate(e),
                    _ => Expr::Verschiebung(e),
                }
            }
            _ => return Err(Error::Parse(format!("expected a Witt vector at {}", self.where_()))),
        };
        self.depth -= 1;
        Ok(e)
    }

    fn literal(&mut self) -> Result<Vec<i64>> {
        let mut xs = Vec::new();
        loop {
            let neg = if self.peek() == Some(&Tok::Sym('-')) {
                self.pos += 1;
                true
            } else {
                false
            };
            match self.peek() {
                Some(&Tok::Int(v)) => {
                    self.pos += 1;
                    xs.push(if neg { -v } else { v });
                }
                _ => return Err(Error::Parse(format!("expected an integer at {}", self.where_()))),
            }
            match self.peek() {
                Some(Tok::Sym(',')) => self.pos += 1,
                Some(Tok::Sym(']')) => {
                    self.pos += 1;
                    return Ok(xs);
                }
                _ => return Err(Error::Parse(format!("expected ',' or ']' at {}", self.where_()))),
            }
        }
    }
}

pub fn parse(s: &str) -> Result<Expr> {
    if s.len() > MAX_INPUT {
        return Err(Error::Parse(format!("expression longer than {MAX_INPUT} bytes")));
    }
    let mut ps = Parser { toks: lex(s)?, pos: 0, depth: 0 };
    let e = ps.expr()?;
    if ps.pos != ps.toks.len() {
        return Err(Error::Parse(format!("trailing input at {}", ps.where_())));
    }
    Ok(e)
}

/// Evaluates in `W(Z/p^N)` through the structure polynomials.
pub fn eval(e: &Expr, p: u64, prec: u32) -> Result<WittVector<Zp>> {
    let bin = |a: &Expr, b: &Expr| -> Result<_> { Ok((eval(a, p, prec)?, eval(b, p, prec)?)) };
    match e {
        Expr::Literal(xs) => {
            if xs.len() > deltaiso::witt::MAX_LEVEL + 1 {
                return Err(Error::InvalidContext(format!(
                    "Witt vectors have at most {} components",
                    deltaiso::witt::MAX_LEVEL + 1
                )));
            }
            WittVector::from_ints_mod(p, prec, xs)
        }
        Expr::Add(a, b) => {
            let (x, y) = bin(a, b)?;
            x.add(&y, p)
        }
        Expr::Sub(a, b) => {
            let (x, y) = bin(a, b)?;
            x.add(&y.neg(p)?, p)
        }
        Expr::Mul(a, b) => {
            let (x, y) = bin(a, b)?;
            x.mul(&y, p)
        }
        Expr::Neg(a) => eval(a, p, prec)?.neg(p),
        Expr::Frobenius(a) => eval(a, p, prec)?.frobenius(p),
        Expr::Truncate(a) => eval(a, p, prec)?.truncate(),
        Expr::Verschiebung(a) => eval(a, p, prec)?.verschiebung(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(s: &str) -> String {
        eval(&parse(s).unwrap(), 5, 8).unwrap().to_string()
    }

    #[test]
    fn reference_expressions() {
        assert_eq!(run("[1,0] + [1,0]"), "[2, -6]");
        assert_eq!(run("T([1,2,3])"), "[1, 2]");
        assert_eq!(run("F([2,-6])"), "[2]");
        assert_eq!(run("V([3])"), "[0, 3]");
        assert_eq!(run("[2,1] - [2,1]"), "[0, 0]");
        assert_eq!(run("-[1] * ([2] + [3])"), "[-5]");
    }

    #[test]
    fn precedence() {
        assert_eq!(parse("[1]+[2]*[3]").unwrap(), parse("[1]+([2]*[3])").unwrap());
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "[1,", "[1]]", "G([1])", "[1] +", "[99999999999999999999]", "F [1]"] {
            assert!(matches!(parse(s), Err(Error::Parse(_))), "{s:?}");
        }
        assert!(parse(&"(".repeat(200)).is_err());
        let e = parse("[1,2] + [1]").unwrap();
        assert_eq!(eval(&e, 5, 8), Err(Error::LengthMismatch));
        assert!(eval(&parse("F([1])").unwrap(), 5, 8).is_err());
    }
}
