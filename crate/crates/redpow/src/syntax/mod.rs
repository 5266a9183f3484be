//! Syntax of arithmetic terms and Diophantine formulas: parsing,
//! canonical polynomial forms, token-count lengths, and bounded
//! enumeration of canonical formulas.
//!
//! The term grammar is `0`, `1`, variables `x<digits>`, binary `+` and `*`,
//! and parentheses. A Diophantine formula is a block of leading existential
//! quantifiers over an equation between two terms. In the serialized form
//! the bound variables are exactly `x0..x{b-1}` (in binder order) and free
//! variables use indices `>= b`; free index `b + j` is the j-th free slot.

mod budget;
mod enumerate;
mod formula;
mod poly;

pub use budget::{compute_g, BudgetError, FormulaBudget};
pub use enumerate::{
    count_h, count_h_token_strings, enumerate_canonical, enumerate_formulas, CanonForm, EnumConfig,
    EnumError, DEFAULT_ENUM_LIMIT,
};
pub use formula::{eval_formula_nat, DioFormula};
pub use poly::{Monomial, PolyForm};

use serde::{Deserialize, Serialize};
use std::fmt;

/// A term of the arithmetic language: constants 0 and 1, variables, sums
/// and products.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Zero,
    One,
    Var(usize),
    Plus(Box<Term>, Box<Term>),
    Times(Box<Term>, Box<Term>),
}

impl Term {
    pub fn plus(a: Term, b: Term) -> Term {
        Term::Plus(Box::new(a), Box::new(b))
    }

    pub fn times(a: Term, b: Term) -> Term {
        Term::Times(Box::new(a), Box::new(b))
    }

    /// Collects the variable indices occurring in the term.
    pub fn vars(&self) -> std::collections::BTreeSet<usize> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut std::collections::BTreeSet<usize>) {
        match self {
            Term::Zero | Term::One => {}
            Term::Var(i) => {
                out.insert(*i);
            }
            Term::Plus(a, b) | Term::Times(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Serializes into tokens. The parser is left-associative, so a right
    /// child repeating its parent's operator is parenthesized, as is any
    /// sum under a product; canonical sum-of-products trees are
    /// left-associated and never need parentheses.
    pub(crate) fn push_tokens(&self, out: &mut Vec<Token>, ctx: TokenCtx) {
        let parens = match self {
            Term::Zero | Term::One | Term::Var(_) => false,
            Term::Plus(..) => ctx != TokenCtx::Top && ctx != TokenCtx::SumLeft,
            Term::Times(..) => ctx == TokenCtx::ProductRight,
        };
        if parens {
            out.push(Token::LParen);
        }
        match self {
            Term::Zero => out.push(Token::Zero),
            Term::One => out.push(Token::One),
            Term::Var(i) => out.push(Token::Var(*i)),
            Term::Plus(a, b) => {
                a.push_tokens(out, TokenCtx::SumLeft);
                out.push(Token::Plus);
                b.push_tokens(out, TokenCtx::SumRight);
            }
            Term::Times(a, b) => {
                a.push_tokens(out, TokenCtx::ProductLeft);
                out.push(Token::Star);
                b.push_tokens(out, TokenCtx::ProductRight);
            }
        }
        if parens {
            out.push(Token::RParen);
        }
    }

    pub fn tokens(&self) -> Vec<Token> {
        let mut out = Vec::new();
        self.push_tokens(&mut out, TokenCtx::Top);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TokenCtx {
    Top,
    SumLeft,
    SumRight,
    ProductLeft,
    ProductRight,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in self.tokens() {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// One lexical token of the formula language. Lengths are token counts,
/// with every variable occurrence a single token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Token {
    Exists,
    LParen,
    RParen,
    Plus,
    Star,
    Eq,
    Zero,
    One,
    Var(usize),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Exists => write!(f, "E"),
            Token::LParen => write!(f, "("),
            Token::RParen => write!(f, ")"),
            Token::Plus => write!(f, "+"),
            Token::Star => write!(f, "*"),
            Token::Eq => write!(f, "="),
            Token::Zero => write!(f, "0"),
            Token::One => write!(f, "1"),
            Token::Var(i) => write!(f, "x{i}"),
        }
    }
}

/// Parse failure, with the byte offset of the offending input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: unexpected character '{ch}'")]
    UnexpectedChar { offset: usize, ch: char },
    #[error("syntax error at offset {offset}: expected {expected}")]
    Unexpected {
        offset: usize,
        expected: &'static str,
    },
    #[error("syntax error at offset {offset}: input ends, expected {expected}")]
    UnexpectedEnd {
        offset: usize,
        expected: &'static str,
    },
    #[error("syntax error at offset {offset}: binder must introduce x{expected_index}")]
    BadBinder {
        offset: usize,
        expected_index: usize,
    },
    #[error("syntax error at offset {offset}: trailing input")]
    TrailingInput { offset: usize },
    #[error("syntax error at offset {offset}: variable index too large")]
    IndexOverflow { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::UnexpectedChar { offset, .. }
            | ParseError::Unexpected { offset, .. }
            | ParseError::UnexpectedEnd { offset, .. }
            | ParseError::BadBinder { offset, .. }
            | ParseError::TrailingInput { offset }
            | ParseError::IndexOverflow { offset } => *offset,
        }
    }
}

/// Tokenizer. Whitespace separates tokens and is otherwise ignored.
/// `E` and `∃` both denote the existential quantifier; the canonical
/// serializer emits `E`.
pub fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(offset, ch)) = chars.peek() {
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '0' => {
                chars.next();
                out.push((Token::Zero, offset));
            }
            '1' => {
                chars.next();
                out.push((Token::One, offset));
            }
            '+' => {
                chars.next();
                out.push((Token::Plus, offset));
            }
            '*' => {
                chars.next();
                out.push((Token::Star, offset));
            }
            '=' => {
                chars.next();
                out.push((Token::Eq, offset));
            }
            '(' => {
                chars.next();
                out.push((Token::LParen, offset));
            }
            ')' => {
                chars.next();
                out.push((Token::RParen, offset));
            }
            'E' | '∃' => {
                chars.next();
                out.push((Token::Exists, offset));
            }
            'x' => {
                chars.next();
                let mut digits = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                if digits.is_empty() {
                    return Err(ParseError::Unexpected {
                        offset: offset + 1,
                        expected: "variable index digits",
                    });
                }
                let idx: usize = digits
                    .parse()
                    .map_err(|_| ParseError::IndexOverflow { offset })?;
                out.push((Token::Var(idx), offset));
            }
            _ => return Err(ParseError::UnexpectedChar { offset, ch }),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end_offset: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        let tokens = tokenize(text)?;
        Ok(Parser {
            tokens,
            pos: 0,
            end_offset: text.len(),
        })
    }

    fn from_tokens(tokens: &[Token]) -> Self {
        let end = tokens.len();
        Parser {
            tokens: tokens.iter().enumerate().map(|(i, &t)| (t, i)).collect(),
            pos: 0,
            end_offset: end,
        }
    }

    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.pos).map(|&(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|&(_, o)| o)
            .unwrap_or(self.end_offset)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Token, expected: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(_) => Err(ParseError::Unexpected {
                offset: self.offset(),
                expected,
            }),
            None => Err(ParseError::UnexpectedEnd {
                offset: self.end_offset,
                expected,
            }),
        }
    }

    fn parse_sum(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.parse_product()?;
        while self.peek() == Some(Token::Plus) {
            self.bump();
            let rhs = self.parse_product()?;
            acc = Term::plus(acc, rhs);
        }
        Ok(acc)
    }

    fn parse_product(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.parse_factor()?;
        while self.peek() == Some(Token::Star) {
            self.bump();
            let rhs = self.parse_factor()?;
            acc = Term::times(acc, rhs);
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Token::Zero) => {
                self.bump();
                Ok(Term::Zero)
            }
            Some(Token::One) => {
                self.bump();
                Ok(Term::One)
            }
            Some(Token::Var(i)) => {
                self.bump();
                Ok(Term::Var(i))
            }
            Some(Token::LParen) => {
                self.bump();
                let inner = self.parse_sum()?;
                self.expect(Token::RParen, "closing parenthesis")?;
                Ok(inner)
            }
            Some(_) => Err(ParseError::Unexpected {
                offset: self.offset(),
                expected: "term",
            }),
            None => Err(ParseError::UnexpectedEnd {
                offset: self.end_offset,
                expected: "term",
            }),
        }
    }

    fn parse_equation(&mut self) -> Result<(Term, Term), ParseError> {
        let lhs = self.parse_sum()?;
        self.expect(Token::Eq, "'='")?;
        let rhs = self.parse_sum()?;
        Ok((lhs, rhs))
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(ParseError::TrailingInput {
                offset: self.offset(),
            })
        }
    }
}

/// Parses a term. Round-trips with `Term`'s `Display`.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.parse_sum()?;
    p.finish()?;
    Ok(t)
}

/// Parses a Diophantine formula: a (possibly empty) block of binders
/// `Ex0 Ex1 ...` followed by an equation. With binders present the
/// equation must be enclosed in exactly one pair of parentheses. Binders
/// must introduce `x0, x1, ...` in order.
pub fn parse_formula(text: &str) -> Result<DioFormula, ParseError> {
    let p = Parser::new(text)?;
    parse_formula_with(p)
}

/// Parses a formula from an already-tokenized sequence; offsets in errors
/// are token positions. Used by the token-string enumeration route.
pub(crate) fn parse_formula_tokens(tokens: &[Token]) -> Result<DioFormula, ParseError> {
    parse_formula_with(Parser::from_tokens(tokens))
}

fn parse_formula_with(mut p: Parser) -> Result<DioFormula, ParseError> {
    let mut bound = 0usize;
    while p.peek() == Some(Token::Exists) {
        p.bump();
        let offset = p.offset();
        match p.bump() {
            Some(Token::Var(i)) if i == bound => bound += 1,
            _ => {
                return Err(ParseError::BadBinder {
                    offset,
                    expected_index: bound,
                })
            }
        }
    }
    let (lhs, rhs) = if bound > 0 {
        p.expect(Token::LParen, "'('")?;
        let eq = p.parse_equation()?;
        p.expect(Token::RParen, "')'")?;
        eq
    } else {
        p.parse_equation()?
    };
    p.finish()?;
    Ok(DioFormula::new(bound, lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sum_of_vars() {
        let t = parse_term("x0+x1").unwrap();
        assert_eq!(t, Term::plus(Term::Var(0), Term::Var(1)));
    }

    #[test]
    fn parses_parenthesized_square_plus_one() {
        let t = parse_term("(x0*x0)+1").unwrap();
        assert_eq!(
            t,
            Term::plus(Term::times(Term::Var(0), Term::Var(0)), Term::One)
        );
    }

    #[test]
    fn reports_error_offset() {
        let err = parse_term("x0++").unwrap_err();
        assert_eq!(err.offset(), 3);
    }

    #[test]
    fn precedence_binds_products_tighter() {
        let t = parse_term("x0+x1*x2").unwrap();
        assert_eq!(
            t,
            Term::plus(Term::Var(0), Term::times(Term::Var(1), Term::Var(2)))
        );
    }

    #[test]
    fn binders_must_be_in_order() {
        assert!(parse_formula("Ex0(x0=0)").is_ok());
        assert!(parse_formula("Ex1(x1=0)").is_err());
        assert!(parse_formula("Ex0Ex1(x0=x1)").is_ok());
    }

    #[test]
    fn unicode_exists_accepted() {
        let a = parse_formula("∃x0(x0=x1)").unwrap();
        let b = parse_formula("Ex0(x0=x1)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn display_roundtrip_needs_parens_for_sum_under_product() {
        let t = Term::times(Term::plus(Term::Var(0), Term::One), Term::Var(1));
        let s = t.to_string();
        assert_eq!(s, "(x0+1)*x1");
        assert_eq!(parse_term(&s).unwrap(), t);
    }
}
