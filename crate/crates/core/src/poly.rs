//! Sparse multivariate polynomials over the rationals.
//!
//! Text grammar (whitespace ignored):
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := power ('*' power)*
//! power  := atom ['^' int]
//! atom   := int ['/' int] | var | '(' expr ')'
//! ```
//!
//! so `3/2*x0^2*x1 - x2 + 1` parses as expected.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{fmt_rat, Rat};
use crate::error::{Error, Result};

pub type Exponents = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Exponents, Rat>,
}

impl MultiPoly {
    pub fn zero(vars: Vec<String>) -> Self {
        MultiPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    /// Variables named `x0 .. x{n-1}`.
    pub fn standard_vars(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    pub fn constant(vars: Vec<String>, c: Rat) -> Self {
        let mut p = Self::zero(vars);
        let e = vec![0; p.nvars()];
        p.add_term(e, c);
        p
    }

    pub fn var(vars: Vec<String>, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        let mut p = Self::zero(vars);
        p.add_term(e, Rat::one());
        p
    }

    /// Linear form `sum coeffs[i] * x_i`.
    pub fn linear(vars: Vec<String>, coeffs: &[Rat]) -> Self {
        assert_eq!(vars.len(), coeffs.len());
        let mut p = Self::zero(vars);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; coeffs.len()];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn from_terms(vars: Vec<String>, terms: impl IntoIterator<Item = (Exponents, Rat)>) -> Result<Self> {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            if e.len() != p.nvars() {
                return Err(Error::DimensionMismatch {
                    expected: p.nvars(),
                    got: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn add_term(&mut self, e: Exponents, c: Rat) {
        debug_assert_eq!(e.len(), self.nvars());
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn coefficient(&self, e: &[u32]) -> Rat {
        self.terms.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    /// Coefficients of a homogeneous linear form, one per variable.
    pub fn linear_coefficients(&self) -> Option<Vec<Rat>> {
        if self.is_zero() || self.degree() != Some(1) || !self.is_homogeneous() {
            return None;
        }
        Some(
            (0..self.nvars())
                .map(|i| {
                    let mut e = vec![0; self.nvars()];
                    e[i] = 1;
                    self.coefficient(&e)
                })
                .collect(),
        )
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.nvars(),
                got: n,
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[Rat]) -> Result<Rat> {
        self.check_dim(x.len())?;
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(xi.clone(), k as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_int(&self, x: &[BigInt]) -> Result<Rat> {
        let xs: Vec<Rat> = x.iter().cloned().map(Rat::from_integer).collect();
        self.eval(&xs)
    }

    /// Checked machine-integer evaluation for integer-coefficient polynomials.
    /// `None` on overflow or non-integer coefficients.
    pub fn eval_i128(&self, x: &[i64]) -> Option<i128> {
        if x.len() != self.nvars() {
            return None;
        }
        let mut acc: i128 = 0;
        for (e, c) in &self.terms {
            if !c.is_integer() {
                return None;
            }
            let mut t = c.numer().to_i128()?;
            for (&xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = t.checked_mul(xi as i128)?;
                }
            }
            acc = acc.checked_add(t)?;
        }
        Some(acc)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut p = Self::zero(self.vars.clone());
        for (e, v) in &self.terms {
            p.add_term(e.clone(), v * c);
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.vars.clone(), Rat::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn parse(text: &str, nvars: usize) -> Result<Self> {
        Self::parse_with_vars(text, Self::standard_vars(nvars))
    }

    pub fn parse_with_vars(text: &str, vars: Vec<String>) -> Result<Self> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
            vars: &vars,
        };
        let poly = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Parse(format!(
                "unexpected `{}` at offset {} in `{text}`",
                p.src[p.pos] as char, p.pos
            )));
        }
        Ok(poly)
    }

    /// Smallest variable count `k` such that `text` only uses `x0..x{k-1}`.
    pub fn infer_nvars(text: &str) -> usize {
        let b = text.as_bytes();
        let mut max = None;
        let mut i = 0;
        while i < b.len() {
            if b[i] == b'x' && (i == 0 || !b[i - 1].is_ascii_alphanumeric()) {
                let s = i + 1;
                let mut j = s;
                while j < b.len() && b[j].is_ascii_digit() {
                    j += 1;
                }
                if j > s {
                    if let Ok(k) = text[s..j].parse::<usize>() {
                        max = Some(max.map_or(k, |m: usize| m.max(k)));
                    }
                }
                i = j;
            } else {
                i += 1;
            }
        }
        max.map_or(0, |m| m + 1)
    }

    fn same_ring(&self, other: &Self) {
        assert_eq!(self.vars, other.vars, "polynomials over different variable lists");
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest total degree first, then reverse-lex on exponents.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], k)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", fmt_rat(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rat(&mag), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.same_ring(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rat::one())
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.same_ring(rhs);
        let mut out = MultiPoly::zero(self.vars.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!(
            "{what} at offset {} in `{}`",
            self.pos,
            String::from_utf8_lossy(self.src)
        ))
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut sign = 1;
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                sign = -1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        let first = self.term()?;
        let mut acc = if sign < 0 { -&first } else { first };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let k = self.integer()?;
            let k = k
                .to_u32()
                .ok_or_else(|| self.err("exponent must be a small nonnegative integer"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        let s = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if s == self.pos {
            return Err(self.err("expected integer"));
        }
        let digits = std::str::from_utf8(&self.src[s..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("ascii digits"))
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let mut den = BigInt::one();
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    den = self.integer()?;
                    if den.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                }
                Ok(MultiPoly::constant(self.vars.to_vec(), Rat::new(num, den)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let s = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[s..self.pos]).expect("ascii");
                let i = self
                    .vars
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable `{name}`")))?;
                Ok(MultiPoly::var(self.vars.to_vec(), i))
            }
            _ => Err(self.err("expected term")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn eval_examples() {
        let f = MultiPoly::parse("x0 + x1", 2).unwrap();
        assert_eq!(f.eval(&[int(1), int(2)]).unwrap(), int(3));
        let f = MultiPoly::parse("x0^2*x1", 2).unwrap();
        assert_eq!(f.eval(&[int(2), rat(1, 2)]).unwrap(), int(2));
        let vars = vec!["x1".to_string(), "x2".to_string()];
        let f = MultiPoly::parse_with_vars("1 - x1 - x2", vars).unwrap();
        assert_eq!(f.eval(&[int(1), int(1)]).unwrap(), int(-1));
    }

    #[test]
    fn eval_dimension_mismatch() {
        let f = MultiPoly::parse("x0 + x1", 2).unwrap();
        assert!(matches!(
            f.eval(&[int(1)]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn parser_handles_rationals_and_parens() {
        let f = MultiPoly::parse("3/2*x0^2*x1 - (x0 - x1)^2 + 1/3", 2).unwrap();
        let x = [int(2), int(3)];
        assert_eq!(f.eval(&x).unwrap(), rat(3, 2) * int(12) - int(1) + rat(1, 3));
        assert_eq!(f.degree(), Some(3));
        assert!(!f.is_homogeneous());
        assert!(MultiPoly::parse("x0 +", 1).is_err());
        assert!(MultiPoly::parse("y", 1).is_err());
        assert!(MultiPoly::parse("1/0*x0", 1).is_err());
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let f = MultiPoly::parse("x0 + x1 - x0", 2).unwrap();
        assert_eq!(f.num_terms(), 1);
        let z = MultiPoly::parse("x0 - x0", 1).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.to_string(), "0");
    }

    #[test]
    fn linear_coefficient_extraction() {
        let f = MultiPoly::parse("x0 + 2*x1 - 3*x2", 3).unwrap();
        assert_eq!(f.linear_coefficients().unwrap(), vec![int(1), int(2), int(-3)]);
        assert!(MultiPoly::parse("x0 + 1", 3).unwrap().linear_coefficients().is_none());
    }

    #[test]
    fn infer_vars() {
        assert_eq!(MultiPoly::infer_nvars("x0 + x3^2"), 4);
        assert_eq!(MultiPoly::infer_nvars("7"), 0);
    }

    #[test]
    fn i128_fast_path_matches() {
        let f = MultiPoly::parse("x0^3 - 7*x0*x1 + 2", 2).unwrap();
        assert_eq!(f.eval_i128(&[5, -3]), Some(125 + 105 + 2));
        let g = MultiPoly::parse("x0^9", 1).unwrap();
        assert_eq!(g.eval_i128(&[i64::MAX]), None);
        let h = MultiPoly::parse("1/2*x0", 1).unwrap();
        assert_eq!(h.eval_i128(&[2]), None);
    }

    fn arb_poly() -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec(
            (prop::collection::vec(0u32..3, 3), -5i64..=5, 1i64..=4),
            0..5,
        )
        .prop_map(|terms| {
            MultiPoly::from_terms(
                MultiPoly::standard_vars(3),
                terms.into_iter().map(|(e, n, d)| (e, rat(n, d))),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn eval_is_a_ring_homomorphism(f in arb_poly(), g in arb_poly(),
                                       x in prop::collection::vec((-6i64..=6, 1i64..=3), 3)) {
            let x: Vec<Rat> = x.into_iter().map(|(n, d)| rat(n, d)).collect();
            let fx = f.eval(&x).unwrap();
            let gx = g.eval(&x).unwrap();
            prop_assert_eq!((&f * &g).eval(&x).unwrap(), &fx * &gx);
            prop_assert_eq!((&f + &g).eval(&x).unwrap(), &fx + &gx);
        }

        #[test]
        fn display_round_trips(f in arb_poly()) {
            let back = MultiPoly::parse(&f.to_string(), 3).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
