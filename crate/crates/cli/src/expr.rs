//! A small expression language for divisor classes.
//!
//! Grammar:
//!
//! ```text
//! expr        := ['-'] term { ('+' | '-') term }
//! term        := [rational '*'] factor
//! factor      := constructor | pullback | '(' expr ')'
//! constructor := 'bn' '(' int ')'            -- Brill-Noether class on (g, 0)
//!              | 'w' '(' int ')'             -- pointed Weierstrass class on (g, 1)
//!              | 'w2'                        -- the genus-2 class, lambda eliminated
//!              | 'theta' '(' int ',' int ',' int ',' markset ')'
//!              | 'epsilon' '(' int ',' int ')'
//! pullback    := ('pi<j>' | 'fprime' | 'gprime' | 'bubble<i>_<j>') '*' '(' expr ')'
//! markset     := '{' [int {',' int}] '}'
//! rational    := int ['/' int]
//! ```
//!
//! `pi<j>*` inserts a new mark at position `j`; `fprime*` lands in the
//! genus-0 boundary model (the formal theta image is expanded into boundary
//! classes); `gprime*` lands on the pointed genus-2 space with lambda
//! eliminated, so its images compare directly against `w2`; `bubble<i>_<j>*`
//! merges marks `i` and `j` of its argument's space onto a rational bubble.

use modpic_core::classes::{
    bn_class, epsilon_class, theta_class, w2_reduced, weierstrass_class,
};
use modpic_core::maps::{
    bubble_pullback, elliptic_tails_pullback, forgetful_pullback, genus2_tail_pullback,
};
use modpic_core::class::DivisorClass;
use modpic_core::rational::{rat, ratio};
use modpic_core::{Error, MarkSet, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Int(i64),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
}

fn tokenize(input: &str) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                chars.next();
            }
            '+' => {
                chars.next();
                toks.push(Tok::Plus);
            }
            '-' => {
                chars.next();
                toks.push(Tok::Minus);
            }
            '*' => {
                chars.next();
                toks.push(Tok::Star);
            }
            '/' => {
                chars.next();
                toks.push(Tok::Slash);
            }
            '(' => {
                chars.next();
                toks.push(Tok::LParen);
            }
            ')' => {
                chars.next();
                toks.push(Tok::RParen);
            }
            '{' => {
                chars.next();
                toks.push(Tok::LBrace);
            }
            '}' => {
                chars.next();
                toks.push(Tok::RBrace);
            }
            ',' => {
                chars.next();
                toks.push(Tok::Comma);
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let value = digits
                    .parse::<i64>()
                    .map_err(|_| Error::ParseError(format!("number {digits} is out of range")))?;
                toks.push(Tok::Int(value));
            }
            'a'..='z' | 'A'..='Z' => {
                let mut name = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        name.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(Tok::Name(name));
            }
            other => {
                return Err(Error::ParseError(format!(
                    "unexpected character '{other}' in class expression"
                )));
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        match self.next() {
            Some(t) if t == tok => Ok(()),
            other => Err(Error::ParseError(format!(
                "expected {what}, found {other:?}"
            ))),
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<i64> {
        match self.next() {
            Some(Tok::Int(v)) => Ok(v),
            other => Err(Error::ParseError(format!(
                "expected {what}, found {other:?}"
            ))),
        }
    }

    fn expect_u32(&mut self, what: &str) -> Result<u32> {
        let v = self.expect_int(what)?;
        u32::try_from(v).map_err(|_| Error::ParseError(format!("{what} must be nonnegative")))
    }

    fn parse_expr(&mut self) -> Result<DivisorClass> {
        let mut negate_first = false;
        if self.peek() == Some(&Tok::Minus) {
            self.next();
            negate_first = true;
        }
        let mut acc = self.parse_term()?;
        if negate_first {
            acc = acc.scale(&rat(-1));
        }
        loop {
            let negate = match self.peek() {
                Some(Tok::Plus) => false,
                Some(Tok::Minus) => true,
                _ => break,
            };
            self.next();
            let mut term = self.parse_term()?;
            if negate {
                term = term.scale(&rat(-1));
            }
            if term.space() != acc.space() {
                return Err(Error::SpaceMismatch(format!(
                    "cannot combine classes on {} and {}",
                    acc.space(),
                    term.space()
                )));
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<DivisorClass> {
        if let Some(Tok::Int(_)) = self.peek() {
            let numer = self.expect_int("numerator")?;
            let coeff = if self.peek() == Some(&Tok::Slash) {
                self.next();
                let denom = self.expect_int("denominator")?;
                if denom == 0 {
                    return Err(Error::ParseError("zero denominator".into()));
                }
                ratio(numer, denom)
            } else {
                rat(numer)
            };
            self.expect(Tok::Star, "'*' between a coefficient and a class")?;
            let factor = self.parse_factor()?;
            return Ok(factor.scale(&coeff));
        }
        self.parse_factor()
    }

    fn parse_factor(&mut self) -> Result<DivisorClass> {
        match self.next() {
            Some(Tok::LParen) => {
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(Tok::Name(name)) => self.parse_call(&name),
            other => Err(Error::ParseError(format!(
                "expected a class, found {other:?}"
            ))),
        }
    }

    fn parse_call(&mut self, name: &str) -> Result<DivisorClass> {
        match name {
            "w2" => Ok(w2_reduced()),
            "bn" => {
                self.expect(Tok::LParen, "'(' after bn")?;
                let g = self.expect_u32("genus")?;
                self.expect(Tok::RParen, "')'")?;
                bn_class(g)
            }
            "w" => {
                self.expect(Tok::LParen, "'(' after w")?;
                let g = self.expect_u32("genus")?;
                self.expect(Tok::RParen, "')'")?;
                weierstrass_class(g)
            }
            "epsilon" => {
                self.expect(Tok::LParen, "'(' after epsilon")?;
                let m = self.expect_u32("mark count")?;
                self.expect(Tok::Comma, "','")?;
                let i = self.expect_u32("index")?;
                self.expect(Tok::RParen, "')'")?;
                epsilon_class(m, i)
            }
            "theta" => {
                self.expect(Tok::LParen, "'(' after theta")?;
                let g = self.expect_u32("genus")?;
                self.expect(Tok::Comma, "','")?;
                let n = self.expect_u32("mark count")?;
                self.expect(Tok::Comma, "','")?;
                let i = self.expect_u32("index")?;
                self.expect(Tok::Comma, "','")?;
                let s = self.parse_markset()?;
                self.expect(Tok::RParen, "')'")?;
                theta_class(g, n, i, s)
            }
            "fprime" => {
                let arg = self.parse_pullback_argument("fprime")?;
                let space = arg.space();
                elliptic_tails_pullback(space.g)?.apply(&arg)?.materialize()
            }
            "gprime" => {
                let arg = self.parse_pullback_argument("gprime")?;
                let space = arg.space();
                genus2_tail_pullback(space.g, space.n)?.apply(&arg)
            }
            _ if name.starts_with("pi") => {
                let j: u32 = name[2..].parse().map_err(|_| {
                    Error::ParseError(format!("unknown constructor '{name}' (try pi<j>)"))
                })?;
                let arg = self.parse_pullback_argument(name)?;
                let space = arg.space();
                forgetful_pullback(space.g, space.n + 1, j)?.apply(&arg)
            }
            _ if name.starts_with("bubble") => {
                let rest = &name[6..];
                let (i, j) = rest
                    .split_once('_')
                    .and_then(|(a, b)| Some((a.parse::<u32>().ok()?, b.parse::<u32>().ok()?)))
                    .ok_or_else(|| {
                        Error::ParseError(format!(
                            "unknown constructor '{name}' (try bubble<i>_<j>)"
                        ))
                    })?;
                let arg = self.parse_pullback_argument(name)?;
                let space = arg.space();
                if space.n == 0 {
                    return Err(Error::SpaceMismatch(
                        "bubble pullback needs a space with marks".into(),
                    ));
                }
                bubble_pullback(space.g, space.n - 1, i, j)?.apply(&arg)
            }
            other => Err(Error::ParseError(format!("unknown constructor '{other}'"))),
        }
    }

    fn parse_pullback_argument(&mut self, name: &str) -> Result<DivisorClass> {
        self.expect(Tok::Star, &format!("'*' after {name}"))?;
        self.expect(Tok::LParen, "'('")?;
        let arg = self.parse_expr()?;
        self.expect(Tok::RParen, "')'")?;
        Ok(arg)
    }

    fn parse_markset(&mut self) -> Result<MarkSet> {
        self.expect(Tok::LBrace, "'{'")?;
        let mut marks = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::RBrace) => {
                    self.next();
                    break;
                }
                Some(Tok::Int(_)) => {
                    marks.push(self.expect_u32("mark")?);
                    if self.peek() == Some(&Tok::Comma) {
                        self.next();
                    }
                }
                other => {
                    return Err(Error::ParseError(format!(
                        "expected a mark or '}}', found {other:?}"
                    )));
                }
            }
        }
        MarkSet::from_marks(marks)
    }
}

/// Evaluates a class expression to a divisor class.
pub fn evaluate(input: &str) -> Result<DivisorClass> {
    let toks = tokenize(input)?;
    if toks.is_empty() {
        return Err(Error::ParseError("empty class expression".into()));
    }
    let mut parser = Parser { toks, pos: 0 };
    let class = parser.parse_expr()?;
    if parser.pos != parser.toks.len() {
        return Err(Error::ParseError(format!(
            "trailing tokens after a complete expression: {:?}",
            &parser.toks[parser.pos..]
        )));
    }
    Ok(class)
}
