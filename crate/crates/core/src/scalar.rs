//! Exact scalars: arbitrary-precision rationals and finite sums `Σ c·e^q`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("malformed rational literal `{0}`")]
    MalformedRational(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("malformed exponential scalar `{0}`")]
    MalformedExp(String),
}

/// An exact rational number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn signum(&self) -> i32 {
        if self.0.is_zero() {
            0
        } else if self.0.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut out = Rational::one();
        for _ in 0..exp {
            out = &out * self;
        }
        out
    }

    /// `2^-n`.
    pub fn half_pow(n: u32) -> Self {
        Rational(BigRational::new(BigInt::one(), BigInt::from(2u8).pow(n)))
    }

    pub fn factorial(n: u32) -> Self {
        let mut acc = BigInt::one();
        for i in 2..=n {
            acc *= i;
        }
        Rational(BigRational::from_integer(acc))
    }

    /// Bernoulli number `B_n` with `B_1 = +1/2`.
    pub fn bernoulli(n: u32) -> Self {
        let mut b: Vec<Rational> = Vec::with_capacity(n as usize + 1);
        for m in 0..=n {
            let mut acc = Rational::one();
            for (j, bj) in b.iter().enumerate() {
                let t = &Rational::binomial(m, j as u32) * bj;
                acc = &acc - &(&t / &Rational::from_integer((m - j as u32 + 1) as i64));
            }
            b.push(acc);
        }
        b.swap_remove(n as usize)
    }

    pub fn binomial(n: u32, k: u32) -> Self {
        if k > n {
            return Rational::zero();
        }
        &(&Rational::factorial(n) / &Rational::factorial(k)) / &Rational::factorial(n - k)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str, whole: &str) -> Result<BigInt, ScalarError> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ScalarError::MalformedRational(whole.to_string()));
    }
    s.parse::<BigInt>()
        .map_err(|_| ScalarError::MalformedRational(whole.to_string()))
}

impl FromStr for Rational {
    type Err = ScalarError;

    /// Accepts `p` or `p/q` with decimal integers.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t.split_once('/') {
            None => Ok(Rational(BigRational::from_integer(parse_int(t, s)?))),
            Some((p, q)) => {
                let p = parse_int(p.trim(), s)?;
                let q = q.trim();
                if q.starts_with(['-', '+']) {
                    return Err(ScalarError::MalformedRational(s.to_string()));
                }
                let q = parse_int(q, s)?;
                if q.is_zero() {
                    return Err(ScalarError::ZeroDenominator(s.to_string()));
                }
                Ok(Rational(BigRational::new(p, q)))
            }
        }
    }
}

macro_rules! rational_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(&self.0 $op &rhs.0)
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0 $op &rhs.0)
            }
        }
    };
}

rational_binop!(Add, add, +);
rational_binop!(Sub, sub, -);
rational_binop!(Mul, mul, *);
rational_binop!(Div, div, /);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// A finite formal sum `Σ c_i·e^{q_i}` with rational `c_i` and `q_i`.
///
/// Terms are kept sorted by exponent with no zero coefficients, so two
/// values are equal exactly when their term lists are equal. Distinct
/// exponentials are linearly independent over the rationals, hence formal
/// equality is real equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExpScalar {
    terms: Vec<(Rational, Rational)>,
}

impl ExpScalar {
    pub fn zero() -> Self {
        ExpScalar { terms: Vec::new() }
    }

    pub fn one() -> Self {
        ExpScalar::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        ExpScalar::term(c, Rational::zero())
    }

    /// `e^q`.
    pub fn exp(q: Rational) -> Self {
        ExpScalar::term(Rational::one(), q)
    }

    /// `c·e^q`.
    pub fn term(c: Rational, q: Rational) -> Self {
        if c.is_zero() {
            ExpScalar::zero()
        } else {
            ExpScalar { terms: vec![(q, c)] }
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Rational, Rational)>>(terms: I) -> Self {
        let mut out = ExpScalar::zero();
        for (c, q) in terms {
            out.add_term(c, q);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_zero() && self.terms[0].1.is_one()
    }

    /// `(coefficient, exponent)` pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.terms.iter().map(|(q, c)| (c, q))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a plain rational when no nonzero exponent occurs.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(q, c)] if q.is_zero() => Some(c.clone()),
            _ => None,
        }
    }

    /// Sign of a single-term value.
    pub fn monomial_sign(&self) -> Option<i32> {
        match self.terms.as_slice() {
            [(_, c)] => Some(c.signum()),
            _ => None,
        }
    }

    pub fn add_term(&mut self, c: Rational, q: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.binary_search_by(|(e, _)| e.cmp(&q)) {
            Ok(i) => {
                self.terms[i].1 += &c;
                if self.terms[i].1.is_zero() {
                    self.terms.remove(i);
                }
            }
            Err(i) => self.terms.insert(i, (q, c)),
        }
    }

    pub fn add_assign_ref(&mut self, rhs: &ExpScalar) {
        if self.terms.is_empty() {
            self.terms = rhs.terms.clone();
            return;
        }
        for (q, c) in &rhs.terms {
            self.add_term(c.clone(), q.clone());
        }
    }

    pub fn add_scaled(&mut self, rhs: &ExpScalar, k: &Rational) {
        if k.is_zero() {
            return;
        }
        for (q, c) in &rhs.terms {
            self.add_term(c * k, q.clone());
        }
    }

    pub fn scale(&self, k: &Rational) -> ExpScalar {
        if k.is_zero() {
            return ExpScalar::zero();
        }
        ExpScalar {
            terms: self.terms.iter().map(|(q, c)| (q.clone(), c * k)).collect(),
        }
    }

    /// Multiplication by `e^q`.
    pub fn shift(&self, q: &Rational) -> ExpScalar {
        if q.is_zero() {
            return self.clone();
        }
        ExpScalar {
            terms: self.terms.iter().map(|(e, c)| (e + q, c.clone())).collect(),
        }
    }

    /// Multiplication by `k·e^q`.
    pub fn scale_shift(&self, k: &Rational, q: &Rational) -> ExpScalar {
        if k.is_zero() {
            return ExpScalar::zero();
        }
        ExpScalar {
            terms: self.terms.iter().map(|(e, c)| (e + q, c * k)).collect(),
        }
    }

    pub fn negate(&self) -> ExpScalar {
        ExpScalar {
            terms: self.terms.iter().map(|(q, c)| (q.clone(), -c)).collect(),
        }
    }

    pub fn mul_ref(&self, rhs: &ExpScalar) -> ExpScalar {
        if self.is_zero() || rhs.is_zero() {
            return ExpScalar::zero();
        }
        if rhs.terms.len() == 1 {
            let (q, c) = &rhs.terms[0];
            return self.scale_shift(c, q);
        }
        if self.terms.len() == 1 {
            let (q, c) = &self.terms[0];
            return rhs.scale_shift(c, q);
        }
        let mut out = ExpScalar::zero();
        for (q1, c1) in &self.terms {
            for (q2, c2) in &rhs.terms {
                out.add_term(c1 * c2, q1 + q2);
            }
        }
        out
    }

    pub fn parse(s: &str) -> Result<ExpScalar, ScalarError> {
        parse_exp_scalar(s)
    }
}

impl fmt::Display for ExpScalar {
    /// Renders `c1*exp(q1) + c2*exp(q2)` in ascending exponent order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (q, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if q.is_zero() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "exp({q})")?;
            } else {
                write!(f, "{mag}*exp({q})")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExpScalar {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_exp_scalar(s)
    }
}

/// Splits `s` at top-level `+`/`-` signs (outside parentheses), keeping the sign.
/// A sign right after `(`, `*`, `/`, `^` or `,` belongs to a literal.
pub(crate) fn split_signed_terms(s: &str) -> Vec<(bool, String)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut negative = false;
    let mut prev: Option<char> = None;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        let binds_left = matches!(prev, Some('(' | '*' | '/' | '^' | ','));
        if (ch == '+' || ch == '-') && depth == 0 && !binds_left {
            if cur.trim().is_empty() {
                if ch == '-' {
                    negative = !negative;
                }
            } else {
                out.push((negative, cur.trim().to_string()));
                cur.clear();
                negative = ch == '-';
            }
            prev = Some(ch);
            continue;
        }
        if !ch.is_whitespace() {
            prev = Some(ch);
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push((negative, cur.trim().to_string()));
    }
    out
}

fn parse_exp_factor(s: &str) -> Option<Rational> {
    let inner = s.strip_prefix("exp(")?.strip_suffix(')')?;
    inner.parse().ok()
}

fn parse_exp_scalar(s: &str) -> Result<ExpScalar, ScalarError> {
    let err = || ScalarError::MalformedExp(s.to_string());
    let trimmed = s.trim();
    if trimmed.is_empty() {
        return Err(err());
    }
    if trimmed == "0" {
        return Ok(ExpScalar::zero());
    }
    let mut out = ExpScalar::zero();
    for (neg, term) in split_signed_terms(trimmed) {
        let (c, q) = match term.split_once('*') {
            Some((c, e)) => (
                c.trim().parse::<Rational>().map_err(|_| err())?,
                parse_exp_factor(e.trim()).ok_or_else(err)?,
            ),
            None => match parse_exp_factor(&term) {
                Some(q) => (Rational::one(), q),
                None => (term.parse::<Rational>().map_err(|_| err())?, Rational::zero()),
            },
        };
        out.add_term(if neg { -c } else { c }, q);
    }
    Ok(out)
}

impl Add for ExpScalar {
    type Output = ExpScalar;
    fn add(mut self, rhs: ExpScalar) -> ExpScalar {
        self.add_assign_ref(&rhs);
        self
    }
}

impl Add<&ExpScalar> for &ExpScalar {
    type Output = ExpScalar;
    fn add(self, rhs: &ExpScalar) -> ExpScalar {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub<&ExpScalar> for &ExpScalar {
    type Output = ExpScalar;
    fn sub(self, rhs: &ExpScalar) -> ExpScalar {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::from_integer(-1));
        out
    }
}

impl Sub for ExpScalar {
    type Output = ExpScalar;
    fn sub(self, rhs: ExpScalar) -> ExpScalar {
        &self - &rhs
    }
}

impl Mul<&ExpScalar> for &ExpScalar {
    type Output = ExpScalar;
    fn mul(self, rhs: &ExpScalar) -> ExpScalar {
        self.mul_ref(rhs)
    }
}

impl Mul for ExpScalar {
    type Output = ExpScalar;
    fn mul(self, rhs: ExpScalar) -> ExpScalar {
        self.mul_ref(&rhs)
    }
}

impl Neg for ExpScalar {
    type Output = ExpScalar;
    fn neg(self) -> ExpScalar {
        self.negate()
    }
}

impl AddAssign<&ExpScalar> for ExpScalar {
    fn add_assign(&mut self, rhs: &ExpScalar) {
        self.add_assign_ref(rhs);
    }
}

impl PartialOrd for ExpScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExpScalar {
    /// Structural order on term lists; used only for canonical sorting.
    fn cmp(&self, other: &Self) -> Ordering {
        self.terms.cmp(&other.terms)
    }
}
