//! Text form of open-loop transfer functions.
//!
//! Accepted input is an ASCII rational expression in a single variable, `s`
//! (continuous) or `z` (discrete), for example
//! `-1.164e-4*(s-10)*(s+0.0625)/(s^2*(s+10))`. Products, quotients and
//! integer powers may be nested freely; sums are limited to polynomial
//! operands. Whitespace is ignored.

use std::fmt::Write as _;

use num_complex::Complex;
use thiserror::Error;

use crate::polynomial::{conjugate_groups, Poly, RootGroup, CONJUGATE_TOL};
use crate::scalar::Scalar;
use crate::transfer_function::{Domain, LoopTf, TfError, ORIGIN_TOL};

const MAX_EXPONENT: u32 = 64;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    SyntaxError(String),
    #[error("mixed variables: expression already uses '{0}'")]
    MixedVariables(char),
    #[error("no variable: use 's' (continuous) or 'z' (discrete)")]
    MissingVariable,
    #[error("zero at the origin")]
    OriginZero,
    #[error("improper transfer function: numerator degree {zeros} exceeds denominator degree {poles}")]
    ImproperTf { zeros: usize, poles: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid transfer function: {0}")]
    Invalid(String),
}

impl ParseErrorKind {
    /// Stable machine-readable name.
    pub fn name(&self) -> &'static str {
        match self {
            ParseErrorKind::SyntaxError(_) => "SyntaxError",
            ParseErrorKind::MixedVariables(_) => "MixedVariables",
            ParseErrorKind::MissingVariable => "MissingVariable",
            ParseErrorKind::OriginZero => "OriginZero",
            ParseErrorKind::ImproperTf { .. } => "ImproperTF",
            ParseErrorKind::DivisionByZero => "DivisionByZero",
            ParseErrorKind::Invalid(_) => "InvalidTransferFunction",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num(f64),
    Var(char),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn syntax(position: usize, msg: impl Into<String>) -> ParseError {
    ParseError { position, kind: ParseErrorKind::SyntaxError(msg.into()) }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let tok = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b's' | b'z' => Tok::Var(b as char),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
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
                let lit = &text[start..i];
                let value: f64 = lit
                    .parse()
                    .map_err(|_| syntax(start, format!("malformed number '{lit}'")))?;
                if !value.is_finite() {
                    return Err(syntax(start, format!("number '{lit}' is out of range")));
                }
                out.push((Tok::Num(value), start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(i, format!("unexpected character '{ch}'")));
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// `num/den` while parsing.
struct Rational<T> {
    num: Poly<T>,
    den: Poly<T>,
}

impl<T: Scalar> Rational<T> {
    fn poly(p: Poly<T>) -> Self {
        Rational { num: p, den: Poly::one() }
    }

    fn is_polynomial(&self) -> bool {
        self.den.degree() == 0
    }

    /// Polynomial value of a rational with constant denominator.
    fn as_poly(&self) -> Poly<T> {
        self.num.scale(T::one() / self.den.coeff(0))
    }
}

struct Parser<'a, T> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    var: Option<char>,
    _text: &'a str,
    _marker: std::marker::PhantomData<T>,
}

impl<'a, T: Scalar> Parser<'a, T> {
    fn peek(&self) -> Tok {
        self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at];
        if t.0 != Tok::End {
            self.at += 1;
        }
        t
    }

    fn sum(&mut self) -> Result<Rational<T>, ParseError> {
        let mut negate = false;
        match self.peek() {
            Tok::Minus => {
                self.bump();
                negate = true;
            }
            Tok::Plus => {
                self.bump();
            }
            _ => {}
        }
        let mut acc = self.product()?;
        if negate {
            acc.num = -&acc.num;
        }
        while matches!(self.peek(), Tok::Plus | Tok::Minus) {
            let (op, at) = self.bump();
            let rhs = self.product()?;
            if !acc.is_polynomial() || !rhs.is_polynomial() {
                return Err(syntax(at, "sums are only supported between polynomial terms"));
            }
            let (a, b) = (acc.as_poly(), rhs.as_poly());
            acc = Rational::poly(if op == Tok::Plus { &a + &b } else { &a - &b });
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Rational<T>, ParseError> {
        let mut acc = self.power()?;
        while matches!(self.peek(), Tok::Star | Tok::Slash) {
            let (op, at) = self.bump();
            let rhs = self.power()?;
            if op == Tok::Star {
                acc = Rational { num: &acc.num * &rhs.num, den: &acc.den * &rhs.den };
            } else {
                if rhs.num.is_zero() {
                    return Err(ParseError { position: at, kind: ParseErrorKind::DivisionByZero });
                }
                acc = Rational { num: &acc.num * &rhs.den, den: &acc.den * &rhs.num };
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Rational<T>, ParseError> {
        let base = self.atom()?;
        if self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let (tok, at) = self.bump();
        let exp = match tok {
            Tok::Num(v) if v.fract() == 0.0 && v >= 0.0 && v <= MAX_EXPONENT as f64 => v as u32,
            Tok::Num(_) => {
                return Err(syntax(at, format!("exponent must be an integer in 0..={MAX_EXPONENT}")))
            }
            _ => return Err(syntax(at, "expected an integer exponent after '^'")),
        };
        let mut num = Poly::one();
        let mut den = Poly::one();
        for _ in 0..exp {
            num = &num * &base.num;
            den = &den * &base.den;
        }
        Ok(Rational { num, den })
    }

    fn atom(&mut self) -> Result<Rational<T>, ParseError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Rational::poly(Poly::constant(T::lit(v)))),
            Tok::Var(v) => {
                match self.var {
                    None => self.var = Some(v),
                    Some(seen) if seen != v => {
                        return Err(ParseError { position: at, kind: ParseErrorKind::MixedVariables(seen) })
                    }
                    _ => {}
                }
                Ok(Rational::poly(Poly::monomial(1)))
            }
            Tok::LParen => {
                let inner = self.sum()?;
                let (close, at) = self.bump();
                if close != Tok::RParen {
                    return Err(syntax(at, "expected ')'"));
                }
                Ok(inner)
            }
            Tok::End => Err(syntax(at, "unexpected end of input")),
            other => Err(syntax(at, format!("unexpected token {}", describe(other)))),
        }
    }
}

fn describe(t: Tok) -> &'static str {
    match t {
        Tok::Num(_) => "number",
        Tok::Var(_) => "variable",
        Tok::Plus => "'+'",
        Tok::Minus => "'-'",
        Tok::Star => "'*'",
        Tok::Slash => "'/'",
        Tok::Caret => "'^'",
        Tok::LParen => "'('",
        Tok::RParen => "')'",
        Tok::End => "end of input",
    }
}

fn invalid(e: impl std::fmt::Display) -> ParseError {
    ParseError { position: 0, kind: ParseErrorKind::Invalid(e.to_string()) }
}

/// Parses text into a factored open loop; see the module docs for the grammar.
pub fn parse_tf<T: Scalar>(text: &str) -> Result<LoopTf<T>, ParseError> {
    let mut parser: Parser<'_, T> = Parser {
        toks: tokenize(text)?,
        at: 0,
        var: None,
        _text: text,
        _marker: std::marker::PhantomData,
    };
    let rat = parser.sum()?;
    if parser.peek() != Tok::End {
        return Err(syntax(parser.pos(), format!("unexpected {}", describe(parser.peek()))));
    }
    let domain = match parser.var {
        Some('s') => Domain::Continuous,
        Some(_) => Domain::Discrete,
        None => return Err(ParseError { position: 0, kind: ParseErrorKind::MissingVariable }),
    };
    build_loop(domain, &rat.num, &rat.den)
}

fn build_loop<T: Scalar>(domain: Domain, num: &Poly<T>, den: &Poly<T>) -> Result<LoopTf<T>, ParseError> {
    if num.degree() > den.degree() {
        return Err(ParseError {
            position: 0,
            kind: ParseErrorKind::ImproperTf { zeros: num.degree(), poles: den.degree() },
        });
    }
    let origin = T::lit(ORIGIN_TOL);
    let origin_zero = || ParseError { position: 0, kind: ParseErrorKind::OriginZero };
    let zeros = if num.degree() == 0 {
        vec![]
    } else {
        if num.coeff(0) == T::zero() {
            return Err(origin_zero());
        }
        let zs = num.roots().map_err(invalid)?.roots;
        if zs.iter().any(|z| z.norm() < origin) {
            return Err(origin_zero());
        }
        zs
    };
    let gain = if num.is_zero() { T::zero() } else { num.leading() / den.leading() };

    let (poles, integrators) = if den.degree() == 0 {
        (vec![], 0)
    } else {
        let ps = den.roots().map_err(invalid)?.roots;
        match domain {
            Domain::Continuous => {
                let (at_origin, finite): (Vec<_>, Vec<_>) = ps.into_iter().partition(|p| p.norm() < origin);
                (finite, at_origin.len())
            }
            Domain::Discrete => (ps, 0),
        }
    };
    LoopTf::new(domain, gain, zeros, poles, integrators).map_err(|e| match e {
        TfError::OriginZero { .. } => origin_zero(),
        TfError::ImproperTf { zeros, poles } => {
            ParseError { position: 0, kind: ParseErrorKind::ImproperTf { zeros, poles } }
        }
        other => invalid(other),
    })
}

fn linear_or_quadratic<T: Scalar>(var: char, group: &RootGroup<T>) -> String {
    match *group {
        RootGroup::Real(r) => {
            if r < T::zero() {
                format!("({var}+{})", -r)
            } else {
                format!("({var}-{r})")
            }
        }
        RootGroup::Pair(r) => {
            let b = -(r.re + r.re);
            let c = r.norm_sqr();
            let mut s = format!("({var}^2");
            if b > T::zero() {
                let _ = write!(s, "+{b}*{var}");
            } else if b < T::zero() {
                let _ = write!(s, "-{}*{var}", -b);
            }
            let _ = write!(s, "+{c})");
            s
        }
    }
}

fn group_key<T: Scalar>(g: &RootGroup<T>) -> (T, T) {
    match *g {
        RootGroup::Real(r) => (r, T::zero()),
        RootGroup::Pair(r) => (r.re, r.im),
    }
}

fn sorted_groups<T: Scalar>(roots: &[Complex<T>]) -> Vec<RootGroup<T>> {
    let mut groups = conjugate_groups(roots, T::lit(CONJUGATE_TOL)).expect("loop roots are conjugate-closed");
    groups.sort_by(|a, b| {
        let (ka, kb) = (group_key(a), group_key(b));
        kb.0.partial_cmp(&ka.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(kb.1.partial_cmp(&ka.1).unwrap_or(std::cmp::Ordering::Equal))
    });
    groups
}

/// Canonical text of a loop; [`parse_tf`] maps it back to an equal loop.
pub fn format_tf<T: Scalar>(l: &LoopTf<T>) -> String {
    let var = l.domain().variable();
    let zero_factors: Vec<String> = sorted_groups(l.zeros())
        .iter()
        .map(|g| linear_or_quadratic(var, g))
        .collect();

    let mut origin_poles = l.integrator_count();
    let mut other_poles = Vec::new();
    for p in l.finite_poles() {
        if p.re == T::zero() && p.im == T::zero() {
            origin_poles += 1;
        } else {
            other_poles.push(*p);
        }
    }
    let mut pole_factors = Vec::new();
    match origin_poles {
        0 => {}
        1 => pole_factors.push(var.to_string()),
        k => pole_factors.push(format!("{var}^{k}")),
    }
    pole_factors.extend(sorted_groups(&other_poles).iter().map(|g| linear_or_quadratic(var, g)));

    let gain = l.gain();
    let mut out = if zero_factors.is_empty() {
        format!("{gain}")
    } else if gain == T::one() {
        zero_factors.join("*")
    } else if gain == -T::one() {
        format!("-{}", zero_factors.join("*"))
    } else {
        format!("{gain}*{}", zero_factors.join("*"))
    };
    match pole_factors.len() {
        0 => {}
        1 => {
            let _ = write!(out, "/{}", pole_factors[0]);
        }
        _ => {
            let _ = write!(out, "/({})", pole_factors.join("*"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn close(a: &[Complex<f64>], b: &[Complex<f64>], tol: f64) -> bool {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        let key = |x: &Complex<f64>, y: &Complex<f64>| {
            x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap())
        };
        a.sort_by(key);
        b.sort_by(key);
        a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).norm() <= tol * (1.0 + y.norm()))
    }

    #[test]
    fn parses_l2() {
        let l: LoopTf<f64> = parse_tf("-5.77*(s-10)*(s+1)/(s*(s+10)*(s+1))").unwrap();
        assert_eq!(l.domain(), Domain::Continuous);
        assert!((l.gain() + 5.77).abs() < 1e-15);
        assert!(close(l.zeros(), &[c(10.0, 0.0), c(-1.0, 0.0)], 1e-12));
        assert!(close(l.finite_poles(), &[c(-10.0, 0.0), c(-1.0, 0.0)], 1e-12));
        assert_eq!(l.integrator_count(), 1);
    }

    #[test]
    fn parses_l4_and_integrator() {
        let l: LoopTf<f64> = parse_tf("2*(z+2)/(z+0.5)").unwrap();
        assert_eq!(l.domain(), Domain::Discrete);
        assert_eq!(l.gain(), 2.0);
        assert_eq!(l.zeros(), &[c(-2.0, 0.0)]);
        assert_eq!(l.finite_poles(), &[c(-0.5, 0.0)]);

        let l: LoopTf<f64> = parse_tf("1/s").unwrap();
        assert_eq!(l.gain(), 1.0);
        assert!(l.zeros().is_empty() && l.finite_poles().is_empty());
        assert_eq!(l.integrator_count(), 1);
    }

    #[test]
    fn parses_l1_and_l3() {
        let l: LoopTf<f64> = parse_tf("-1.164e-4*(s-10)*(s+0.0625)/(s^2*(s+10))").unwrap();
        assert_eq!(l.integrator_count(), 2);
        assert!((l.gain() + 1.164e-4).abs() < 1e-18);
        assert!(close(l.zeros(), &[c(10.0, 0.0), c(-0.0625, 0.0)], 1e-13));

        let l: LoopTf<f64> = parse_tf("-2.0348*(s-1)/(s^2+3*s+2)").unwrap();
        assert_eq!(l.integrator_count(), 0);
        assert!(close(l.finite_poles(), &[c(-1.0, 0.0), c(-2.0, 0.0)], 1e-13));
    }

    #[test]
    fn denominator_leading_coefficient_moves_into_gain() {
        let l: LoopTf<f64> = parse_tf("6*(s+1)/(2*s^2+4*s)").unwrap();
        assert_eq!(l.gain(), 3.0);
        assert_eq!(l.integrator_count(), 1);
        assert!(close(l.finite_poles(), &[c(-2.0, 0.0)], 1e-14));
    }

    #[test]
    fn whitespace_and_spacing_are_ignored() {
        let a: LoopTf<f64> = parse_tf(" 2 * ( z + 2 ) / ( z + 0.5 ) ").unwrap();
        let b: LoopTf<f64> = parse_tf("2*(z+2)/(z+0.5)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_are_positioned() {
        let e = parse_tf::<f64>("abc").unwrap_err();
        assert_eq!(e.position, 0);
        assert_eq!(e.kind.name(), "SyntaxError");

        let e = parse_tf::<f64>("(s+1)/(z+2)").unwrap_err();
        assert_eq!(e.position, 7);
        assert_eq!(e.kind, ParseErrorKind::MixedVariables('s'));

        let e = parse_tf::<f64>("(s+1").unwrap_err();
        assert_eq!(e.position, 4);

        let e = parse_tf::<f64>("2*(s+1)/").unwrap_err();
        assert_eq!(e.position, 8);

        let e = parse_tf::<f64>("1/(s+1)+1/s").unwrap_err();
        assert_eq!(e.position, 7);

        let e = parse_tf::<f64>("s*(s+1)/(s+2)^2").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::OriginZero);
        let e = parse_tf::<f64>("(z-1)/z^0").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ImproperTf { zeros: 1, poles: 0 }));
        let e = parse_tf::<f64>("(s+1)^2/(s+3)").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ImproperTf { zeros: 2, poles: 1 }));
        let e = parse_tf::<f64>("3/4").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingVariable);
        let e = parse_tf::<f64>("1/(s-s)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DivisionByZero);
        let e = parse_tf::<f64>("s^1.5").unwrap_err();
        assert_eq!(e.position, 2);
    }

    #[test]
    fn format_examples() {
        let l = LoopTf::new(Domain::Continuous, 1.0, vec![], vec![], 1).unwrap();
        assert_eq!(format_tf(&l), "1/s");
        let l: LoopTf<f64> = parse_tf("2*(z+2)/(z+0.5)").unwrap();
        assert_eq!(format_tf(&l), "2*(z+2)/(z+0.5)");
        let l = LoopTf::new(
            Domain::Continuous,
            -1.164e-4,
            vec![c(-0.0625, 0.0), c(10.0, 0.0)],
            vec![c(-10.0, 0.0)],
            2,
        )
        .unwrap();
        assert_eq!(format_tf(&l), "-0.0001164*(s-10)*(s+0.0625)/(s^2*(s+10))");
        let l = LoopTf::new(Domain::Discrete, 1.0, vec![c(1.0, 2.0), c(1.0, -2.0)], vec![c(0.0, 0.0); 3], 0).unwrap();
        assert_eq!(format_tf(&l), "(z^2-2*z+5)/z^3");
    }

    #[test]
    fn round_trip_l2() {
        let text = "-5.77*(s-10)*(s+1)/(s*(s+10)*(s+1))";
        let l: LoopTf<f64> = parse_tf(text).unwrap();
        let again: LoopTf<f64> = parse_tf(&format_tf(&l)).unwrap();
        assert!((l.gain() - again.gain()).abs() < 1e-12);
        assert!(close(l.zeros(), again.zeros(), 1e-12));
        assert!(close(l.finite_poles(), again.finite_poles(), 1e-12));
        assert_eq!(l.integrator_count(), again.integrator_count());
    }
}
