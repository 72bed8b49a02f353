//! Text syntax for initial states.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := [sign] [complex '*'] atom
//! atom    := 'fock(' int ')' | 'coh(' complex ')'
//!          | 'sq(' complex ',' complex ')' | '(' expr ')'
//! complex := [sign] number ['i']  |  [sign] number ('+' | '-') number 'i'
//! ```
//!
//! Whitespace is ignored. The imaginary unit needs a coefficient (`1i`, not
//! `i`). Weights multiply the kets before the final normalisation, so
//! `coh(1) + coh(-1)` is the even cat state.

use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::states::{coherent_ket, make_coherent, make_squeezed_coherent, QuantumState};

pub const MAX_INPUT_LEN: usize = 4096;
/// Deepest parenthesis nesting accepted.
pub const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum StateExpr {
    Fock(usize),
    Coh(Complex64),
    Sq(Complex64, Complex64),
    Scale(Complex64, Box<StateExpr>),
    Sum(Vec<StateExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" | "))]
    Syntax { offset: usize, expected: Vec<&'static str>, found: String },
    #[error("semantic error at byte {offset}: {message}")]
    Semantic { offset: usize, message: String },
    #[error("input of {len} bytes exceeds the {MAX_INPUT_LEN}-byte limit")]
    TooLong { len: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::Semantic { offset, .. } => *offset,
            ParseError::TooLong { .. } => MAX_INPUT_LEN,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "syntax-error",
            ParseError::Semantic { .. } => "semantic-error",
            ParseError::TooLong { .. } => "input-too-long",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok<'a> {
    Ident(&'a str),
    /// Unsigned decimal literal; `imag` if it carried an `i` suffix.
    Num { text: &'a str, imag: bool },
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Num { text, imag: false } => format!("number `{text}`"),
            Tok::Num { text, imag: true } => format!("number `{text}i`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> std::result::Result<Vec<(Tok<'_>, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                let end = scan_number(bytes, i);
                if end == i {
                    return Err(ParseError::Syntax { offset: i, expected: vec!["number"], found: "`.`".into() });
                }
                let text = &src[i..end];
                i = end;
                let imag = bytes.get(i) == Some(&b'i') && !bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphanumeric());
                if imag {
                    i += 1;
                }
                out.push((Tok::Num { text, imag }, start));
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(&src[start..i]), start));
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: i,
                    expected: vec!["token"],
                    found: format!("character {ch:?}"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

/// End of a decimal literal `d+[.d*]|.d+` with optional exponent, starting at `i`.
fn scan_number(b: &[u8], mut i: usize) -> usize {
    let start = i;
    let digits = |b: &[u8], mut i: usize| {
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        i
    };
    i = digits(b, i);
    let int_len = i - start;
    if i < b.len() && b[i] == b'.' {
        let j = digits(b, i + 1);
        if int_len == 0 && j == i + 1 {
            return start;
        }
        i = j;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        let k = digits(b, j);
        if k > j {
            i = k;
        }
    }
    i
}

struct Parser<'a> {
    toks: Vec<(Tok<'a>, usize)>,
    pos: usize,
    depth: usize,
}

type PResult<T> = std::result::Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> Tok<'a> {
        self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> Tok<'a> {
        self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok<'a> {
        let t = self.peek();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&'static str]) -> PResult<T> {
        Err(ParseError::Syntax { offset: self.offset(), expected: expected.to_vec(), found: self.peek().describe() })
    }

    fn expect(&mut self, tok: Tok<'static>, name: &'static str) -> PResult<()> {
        if self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(&[name])
        }
    }

    fn number(&self, text: &str, offset: usize) -> PResult<f64> {
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(ParseError::Semantic { offset, message: format!("number `{text}` is out of range") }),
        }
    }

    fn expr(&mut self) -> PResult<StateExpr> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    terms.push(negate(t));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { StateExpr::Sum(terms) })
    }

    fn term(&mut self) -> PResult<StateExpr> {
        let starts_number = matches!(
            (self.peek(), self.peek_at(1)),
            (Tok::Num { .. }, _) | (Tok::Plus | Tok::Minus, Tok::Num { .. })
        );
        if starts_number {
            let coeff = self.complex()?;
            self.expect(Tok::Star, "`*`")?;
            let atom = self.atom()?;
            return Ok(StateExpr::Scale(coeff, Box::new(atom)));
        }
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(StateExpr::Scale(Complex64::new(-1.0, 0.0), Box::new(self.atom()?)))
            }
            Tok::Plus => {
                self.bump();
                self.atom()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> PResult<StateExpr> {
        match self.peek() {
            Tok::Ident("fock") => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let n = self.fock_index()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(StateExpr::Fock(n))
            }
            Tok::Ident("coh") => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let a = self.complex()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(StateExpr::Coh(a))
            }
            Tok::Ident("sq") => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let a = self.complex()?;
                self.expect(Tok::Comma, "`,`")?;
                let z = self.complex()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(StateExpr::Sq(a, z))
            }
            Tok::LParen => {
                if self.depth == MAX_DEPTH {
                    return Err(ParseError::Semantic {
                        offset: self.offset(),
                        message: format!("parentheses nested deeper than {MAX_DEPTH}"),
                    });
                }
                self.bump();
                self.depth += 1;
                let e = self.expr()?;
                self.depth -= 1;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => self.fail(&["`fock(`", "`coh(`", "`sq(`", "`(`"]),
        }
    }

    fn fock_index(&mut self) -> PResult<usize> {
        let offset = self.offset();
        let negative = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        match self.peek() {
            Tok::Num { text, imag: false } if text.bytes().all(|b| b.is_ascii_digit()) => {
                self.bump();
                if negative {
                    return Err(ParseError::Semantic {
                        offset,
                        message: format!("Fock index must be non-negative, got -{text}"),
                    });
                }
                text.parse::<usize>().map_err(|_| ParseError::Semantic {
                    offset,
                    message: format!("Fock index `{text}` is too large"),
                })
            }
            _ => self.fail(&["integer"]),
        }
    }

    fn signed(&mut self) -> f64 {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                -1.0
            }
            Tok::Plus => {
                self.bump();
                1.0
            }
            _ => 1.0,
        }
    }

    fn complex(&mut self) -> PResult<Complex64> {
        let sign = self.signed();
        let offset = self.offset();
        let (text, imag) = match self.peek() {
            Tok::Num { text, imag } => (text, imag),
            _ => return self.fail(&["number"]),
        };
        self.bump();
        let v = sign * self.number(text, offset)?;
        if imag {
            return Ok(Complex64::new(0.0, v));
        }
        // real part followed by `±<number>i`
        if let (Tok::Plus | Tok::Minus, Tok::Num { imag: true, .. }) = (self.peek(), self.peek_at(1)) {
            let s = if self.bump() == Tok::Minus { -1.0 } else { 1.0 };
            let offset = self.offset();
            if let Tok::Num { text, .. } = self.bump() {
                return Ok(Complex64::new(v, s * self.number(text, offset)?));
            }
        }
        Ok(Complex64::new(v, 0.0))
    }
}

fn negate(e: StateExpr) -> StateExpr {
    match e {
        StateExpr::Scale(c, inner) => StateExpr::Scale(-c, inner),
        other => StateExpr::Scale(Complex64::new(-1.0, 0.0), Box::new(other)),
    }
}

/// Parses a state expression.
pub fn parse_state_expr(text: &str) -> std::result::Result<StateExpr, ParseError> {
    if text.len() > MAX_INPUT_LEN {
        return Err(ParseError::TooLong { len: text.len() });
    }
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, depth: 0 };
    let e = p.expr()?;
    if p.peek() != Tok::Eof {
        return p.fail(&["`+`", "`-`", "end of input"]);
    }
    Ok(e)
}

struct Num(f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Debug gives the shortest representation that parses back exactly.
        write!(f, "{:?}", self.0)
    }
}

struct ComplexLit(Complex64);

impl fmt::Display for ComplexLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Complex64 { re, im } = self.0;
        if im == 0.0 {
            write!(f, "{}", Num(re))
        } else if re == 0.0 {
            write!(f, "{}i", Num(im))
        } else if im < 0.0 {
            write!(f, "{}-{}i", Num(re), Num(-im))
        } else {
            write!(f, "{}+{}i", Num(re), Num(im))
        }
    }
}

impl fmt::Display for StateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateExpr::Fock(n) => write!(f, "fock({n})"),
            StateExpr::Coh(a) => write!(f, "coh({})", ComplexLit(*a)),
            StateExpr::Sq(a, z) => write!(f, "sq({}, {})", ComplexLit(*a), ComplexLit(*z)),
            StateExpr::Scale(c, inner) => match **inner {
                StateExpr::Fock(_) | StateExpr::Coh(_) | StateExpr::Sq(..) => {
                    write!(f, "{}*{inner}", ComplexLit(*c))
                }
                _ => write!(f, "{}*({inner})", ComplexLit(*c)),
            },
            StateExpr::Sum(terms) => {
                for (k, t) in terms.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" + ")?;
                    }
                    match t {
                        StateExpr::Sum(_) => write!(f, "({t})")?,
                        _ => write!(f, "{t}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl std::str::FromStr for StateExpr {
    type Err = ParseError;
    fn from_str(s: &str) -> std::result::Result<Self, ParseError> {
        parse_state_expr(s)
    }
}

/// Evaluates an expression into a normalised state in an `cutoff`-level basis.
pub fn eval_state_expr(expr: &StateExpr, cutoff: usize) -> Result<QuantumState> {
    if cutoff < 2 {
        return Err(Error::InvalidArgument(format!("cutoff must be at least 2, got {cutoff}")));
    }
    let (ket, scale) = eval_ket(expr, cutoff)?;
    if !(ket.norm() > 1e-12 * scale) {
        return Err(Error::DegenerateSuperposition);
    }
    QuantumState::from_ket(ket)
}

/// Unnormalised ket plus the sum of the magnitudes that went into it, used to
/// decide when a cancellation is exact up to rounding.
fn eval_ket(expr: &StateExpr, cutoff: usize) -> Result<(DVector<Complex64>, f64)> {
    Ok(match expr {
        StateExpr::Fock(n) => {
            if *n >= cutoff {
                return Err(Error::CutoffTooSmall { cutoff, detail: format!("Fock index {n} needs {} levels", n + 1) });
            }
            let mut v = DVector::zeros(cutoff);
            v[*n] = Complex64::new(1.0, 0.0);
            (v, 1.0)
        }
        StateExpr::Coh(a) => {
            make_coherent(*a, cutoff)?;
            let v = coherent_ket(*a, cutoff);
            let n = v.norm();
            (v.unscale(n), 1.0)
        }
        StateExpr::Sq(a, z) => {
            let s = make_squeezed_coherent(*a, *z, cutoff)?;
            (s.ket().expect("constructor keeps the ket").clone(), 1.0)
        }
        StateExpr::Scale(c, inner) => {
            let (v, s) = eval_ket(inner, cutoff)?;
            (v * *c, s * c.norm())
        }
        StateExpr::Sum(terms) => {
            let mut acc = DVector::zeros(cutoff);
            let mut scale = 0.0;
            for t in terms {
                let (v, s) = eval_ket(t, cutoff)?;
                acc += v;
                scale += s;
            }
            (acc, scale)
        }
    })
}

/// Parses and evaluates in one step.
pub fn state_from_str(text: &str, cutoff: usize) -> Result<QuantumState> {
    eval_state_expr(&parse_state_expr(text)?, cutoff)
}
