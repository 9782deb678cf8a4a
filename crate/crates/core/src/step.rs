//! The algebra of step forms on the real line.
//!
//! Degree-0 generators are the constant `1` and powers `ϑ_x^n` of the step
//! function that is `1` to the right of `x`; degree-1 generators are
//! `ϑ_x^{n-1}δ_x`. Points are identified by a totally ordered key, so two
//! intersection points with the same x-coordinate give the same `ϑ`.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

use crate::scalar::{split_signed_terms, ExpScalar, Rational};

/// Key of a point on the real line; ordering must match the x-order.
pub trait PointKey: Ord + Clone + Hash + fmt::Debug + Send + Sync {}
impl<T: Ord + Clone + Hash + fmt::Debug + Send + Sync> PointKey for T {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("malformed step form `{0}`")]
    Malformed(String),
    #[error("power must be at least 1 in `{0}`")]
    ZeroPower(String),
}

/// `unit·1 + Σ θ[(x,n)]·ϑ_x^n + Σ δ[(x,n)]·ϑ_x^{n-1}δ_x`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StepElement<K: PointKey> {
    unit: ExpScalar,
    theta: BTreeMap<(K, u32), ExpScalar>,
    delta: BTreeMap<(K, u32), ExpScalar>,
}

impl<K: PointKey> Default for StepElement<K> {
    fn default() -> Self {
        Self::zero()
    }
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, ExpScalar>, key: K, c: &ExpScalar) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Occupied(mut e) => {
            e.get_mut().add_assign_ref(c);
            if e.get().is_zero() {
                e.remove();
            }
        }
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c.clone());
        }
    }
}

impl<K: PointKey> StepElement<K> {
    pub fn zero() -> Self {
        StepElement {
            unit: ExpScalar::zero(),
            theta: BTreeMap::new(),
            delta: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::unit_times(ExpScalar::one())
    }

    pub fn unit_times(c: ExpScalar) -> Self {
        let mut out = Self::zero();
        out.unit = c;
        out
    }

    /// `ϑ_x^n`.
    pub fn theta(x: K, n: u32) -> Self {
        Self::theta_times(x, n, ExpScalar::one())
    }

    pub fn theta_times(x: K, n: u32, c: ExpScalar) -> Self {
        assert!(n >= 1);
        let mut out = Self::zero();
        accumulate(&mut out.theta, (x, n), &c);
        out
    }

    /// `ϑ_x^{n-1}δ_x`.
    pub fn delta(x: K, n: u32) -> Self {
        Self::delta_times(x, n, ExpScalar::one())
    }

    pub fn delta_times(x: K, n: u32, c: ExpScalar) -> Self {
        assert!(n >= 1);
        let mut out = Self::zero();
        accumulate(&mut out.delta, (x, n), &c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero() && self.theta.is_empty() && self.delta.is_empty()
    }

    pub fn unit_coeff(&self) -> &ExpScalar {
        &self.unit
    }

    pub fn theta_terms(&self) -> impl Iterator<Item = (&K, u32, &ExpScalar)> {
        self.theta.iter().map(|((x, n), c)| (x, *n, c))
    }

    pub fn delta_terms(&self) -> impl Iterator<Item = (&K, u32, &ExpScalar)> {
        self.delta.iter().map(|((x, n), c)| (x, *n, c))
    }

    pub fn theta_coeff(&self, x: &K, n: u32) -> ExpScalar {
        self.theta.get(&(x.clone(), n)).cloned().unwrap_or_default()
    }

    pub fn delta_coeff(&self, x: &K, n: u32) -> ExpScalar {
        self.delta.get(&(x.clone(), n)).cloned().unwrap_or_default()
    }

    pub fn has_degree0(&self) -> bool {
        !self.unit.is_zero() || !self.theta.is_empty()
    }

    pub fn has_degree1(&self) -> bool {
        !self.delta.is_empty()
    }

    /// `Some(d)` when the element is nonzero and homogeneous of degree `d`.
    pub fn degree(&self) -> Option<u8> {
        match (self.has_degree0(), self.has_degree1()) {
            (true, false) => Some(0),
            (false, true) => Some(1),
            _ => None,
        }
    }

    pub fn degree0_part(&self) -> Self {
        StepElement {
            unit: self.unit.clone(),
            theta: self.theta.clone(),
            delta: BTreeMap::new(),
        }
    }

    pub fn degree1_part(&self) -> Self {
        StepElement {
            unit: ExpScalar::zero(),
            theta: BTreeMap::new(),
            delta: self.delta.clone(),
        }
    }

    pub fn add_unit(&mut self, c: &ExpScalar) {
        self.unit.add_assign_ref(c);
    }

    pub fn add_theta(&mut self, x: K, n: u32, c: &ExpScalar) {
        accumulate(&mut self.theta, (x, n), c);
    }

    pub fn add_delta(&mut self, x: K, n: u32, c: &ExpScalar) {
        accumulate(&mut self.delta, (x, n), c);
    }

    pub fn add_assign(&mut self, rhs: &Self) {
        self.unit.add_assign_ref(&rhs.unit);
        for (k, c) in &rhs.theta {
            accumulate(&mut self.theta, k.clone(), c);
        }
        for (k, c) in &rhs.delta {
            accumulate(&mut self.delta, k.clone(), c);
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&ExpScalar::constant(Rational::from_integer(-1)))
    }

    pub fn scale(&self, c: &ExpScalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        out.unit = self.unit.mul_ref(c);
        for (k, v) in &self.theta {
            accumulate(&mut out.theta, k.clone(), &v.mul_ref(c));
        }
        for (k, v) in &self.delta {
            accumulate(&mut out.delta, k.clone(), &v.mul_ref(c));
        }
        out
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        self.scale(&ExpScalar::constant(c.clone()))
    }

    /// Multiplies the degree-1 term at each point `x` by `factor(x)`.
    pub fn map_delta_coeffs(&self, mut factor: impl FnMut(&K) -> ExpScalar) -> Self {
        let mut out = self.degree0_part();
        for ((x, n), c) in &self.delta {
            accumulate(&mut out.delta, (x.clone(), *n), &c.mul_ref(&factor(x)));
        }
        out
    }

    /// `α_0 + Σ_{x < at} α_{x,n}`: the value of the degree-0 part strictly
    /// to the left of `at`, just right of every smaller point.
    fn value_left_of(&self, at: &K) -> ExpScalar {
        let mut v = self.unit.clone();
        for ((x, _), c) in &self.theta {
            if x < at {
                v.add_assign_ref(c);
            } else {
                break;
            }
        }
        v
    }

    /// Product of the degree-0 part of `self` with the degree-1 generator
    /// `c·ϑ_w^{m-1}δ_w`, accumulated into `out` after multiplication by `k`.
    fn mul_deg0_into_delta(&self, w: &K, m: u32, c: &ExpScalar, k: &ExpScalar, out: &mut Self) {
        let coeff = c.mul_ref(k);
        let left = self.value_left_of(w);
        accumulate(&mut out.delta, (w.clone(), m), &left.mul_ref(&coeff));
        for ((x, n), a) in self.theta.range((w.clone(), 0)..=(w.clone(), u32::MAX)) {
            debug_assert!(x == w);
            accumulate(&mut out.delta, (w.clone(), m + n), &a.mul_ref(&coeff));
        }
    }

    /// Multiplies the degree-0 part of `self` into each degree-1 term of
    /// `rhs`, scaling the result at `w` by `weight(w)`.
    pub fn mul_into_delta_weighted(&self, rhs: &Self, mut weight: impl FnMut(&K) -> ExpScalar, out: &mut Self) {
        if !self.has_degree0() {
            return;
        }
        for ((w, m), c) in &rhs.delta {
            let k = weight(w);
            self.mul_deg0_into_delta(w, *m, c, &k, out);
        }
    }

    /// Product of the degree-0 parts.
    pub fn mul_degree0(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        out.unit = self.unit.mul_ref(&rhs.unit);
        if !self.unit.is_zero() {
            for (k, c) in &rhs.theta {
                accumulate(&mut out.theta, k.clone(), &c.mul_ref(&self.unit));
            }
        }
        if !rhs.unit.is_zero() {
            for (k, c) in &self.theta {
                accumulate(&mut out.theta, k.clone(), &c.mul_ref(&rhs.unit));
            }
        }
        for ((x, n), a) in &self.theta {
            for ((y, m), b) in &rhs.theta {
                let ab = a.mul_ref(b);
                match x.cmp(y) {
                    std::cmp::Ordering::Less => accumulate(&mut out.theta, (y.clone(), *m), &ab),
                    std::cmp::Ordering::Equal => accumulate(&mut out.theta, (x.clone(), n + m), &ab),
                    std::cmp::Ordering::Greater => accumulate(&mut out.theta, (x.clone(), *n), &ab),
                }
            }
        }
        out
    }

    /// The product in the step algebra (degree-0 elements are central and
    /// `δ·δ = 0`).
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = self.mul_degree0(rhs);
        let one = ExpScalar::one();
        self.mul_into_delta_weighted(rhs, |_| one.clone(), &mut out);
        rhs.mul_into_delta_weighted(self, |_| one.clone(), &mut out);
        out
    }

    /// `d(ϑ_x^n) = n·ϑ_x^{n-1}δ_x`.
    pub fn d(&self) -> Self {
        let mut out = Self::zero();
        for ((x, n), c) in &self.theta {
            accumulate(
                &mut out.delta,
                (x.clone(), *n),
                &c.scale(&Rational::from_integer(*n as i64)),
            );
        }
        out
    }

    /// Membership in the constrained subalgebra: degree-0 parts vanish at
    /// both ends of the line.
    pub fn in_constrained(&self) -> bool {
        if !self.unit.is_zero() {
            return false;
        }
        let mut total = ExpScalar::zero();
        for c in self.theta.values() {
            total.add_assign_ref(c);
        }
        total.is_zero()
    }

    /// Cohomology class of a degree-1 element: `Σ c_{x,n}/n`.
    pub fn h1_class(&self) -> ExpScalar {
        let mut out = ExpScalar::zero();
        for ((_, n), c) in &self.delta {
            out.add_scaled(c, &Rational::new(1, *n as i64));
        }
        out
    }

    /// Maps every key through an order-preserving `f`.
    pub fn map_keys<L: PointKey>(&self, mut f: impl FnMut(&K) -> L) -> StepElement<L> {
        let mut out = StepElement::zero();
        out.unit = self.unit.clone();
        for ((x, n), c) in &self.theta {
            accumulate(&mut out.theta, (f(x), *n), c);
        }
        for ((x, n), c) in &self.delta {
            accumulate(&mut out.delta, (f(x), *n), c);
        }
        out
    }

    /// Points that occur in the element.
    pub fn support(&self) -> Vec<K> {
        let mut pts: Vec<K> = self
            .theta
            .keys()
            .chain(self.delta.keys())
            .map(|(x, _)| x.clone())
            .collect();
        pts.sort();
        pts.dedup();
        pts
    }

    /// Renders the element with `label` naming each point. Terms are in
    /// canonical order: constant, then `ϑ` terms, then `δ` terms, each in
    /// ascending `(x, n)`.
    pub fn render(&self, mut label: impl FnMut(&K) -> String, suffix: &str) -> String {
        let mut parts: Vec<(ExpScalar, String)> = Vec::new();
        if !self.unit.is_zero() {
            parts.push((self.unit.clone(), format!("one{suffix}")));
        }
        for ((x, n), c) in &self.theta {
            parts.push((c.clone(), format!("{}{suffix}", theta_literal(&label(x), *n))));
        }
        for ((x, n), c) in &self.delta {
            parts.push((c.clone(), format!("{}{suffix}", delta_literal(&label(x), *n))));
        }
        render_linear_combination(&parts)
    }
}

pub(crate) fn theta_literal(x: &str, n: u32) -> String {
    if n == 1 {
        format!("th({x})")
    } else {
        format!("th({x})^{n}")
    }
}

pub(crate) fn delta_literal(x: &str, n: u32) -> String {
    match n {
        1 => format!("dl({x})"),
        2 => format!("th({x})*dl({x})"),
        _ => format!("th({x})^{}*dl({x})", n - 1),
    }
}

/// Joins `c·basis` terms with signs; `c` is parenthesised when it has more
/// than one term.
pub(crate) fn render_linear_combination(parts: &[(ExpScalar, String)]) -> String {
    if parts.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (c, basis)) in parts.iter().enumerate() {
        let negative = c.monomial_sign() == Some(-1);
        let mag = if negative { c.negate() } else { c.clone() };
        if i == 0 {
            if negative {
                out.push('-');
            }
        } else if negative {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        if mag.is_one() {
            out.push_str(basis);
        } else if mag.len() == 1 {
            out.push_str(&format!("{mag}*{basis}"));
        } else {
            out.push_str(&format!("({mag})*{basis}"));
        }
    }
    out
}

impl<K: PointKey + fmt::Display> fmt::Display for StepElement<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(|k| k.to_string(), ""))
    }
}

impl<K: PointKey> fmt::Debug for StepElement<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(|k| format!("{k:?}"), ""))
    }
}

/// One monomial of the text grammar: `one`, `th(x)^n`, `dl(x)` or
/// `th(x)^k*dl(x)`, with the point argument left unparsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Monomial {
    One,
    Theta(String, u32),
    Delta(String, u32),
}

fn parse_theta_factor(s: &str) -> Option<(String, u32)> {
    let rest = s.strip_prefix("th(")?;
    let close = rest.find(')')?;
    let arg = rest[..close].trim().to_string();
    let tail = rest[close + 1..].trim();
    if tail.is_empty() {
        return Some((arg, 1));
    }
    let n: u32 = tail.strip_prefix('^')?.trim().parse().ok()?;
    Some((arg, n))
}

fn parse_delta_factor(s: &str) -> Option<String> {
    let rest = s.strip_prefix("dl(")?;
    let inner = rest.strip_suffix(')')?;
    Some(inner.trim().to_string())
}

/// Parses a monomial such as `th(1/2)^2*dl(1/2)`. Returns `None` if the
/// text is not a monomial.
pub(crate) fn parse_monomial(s: &str) -> Result<Option<Monomial>, StepError> {
    let s = s.trim();
    if s == "one" {
        return Ok(Some(Monomial::One));
    }
    if let Some(x) = parse_delta_factor(s) {
        return Ok(Some(Monomial::Delta(x, 1)));
    }
    if let Some((left, right)) = s.rsplit_once('*') {
        if let (Some((x, k)), Some(y)) = (parse_theta_factor(left.trim()), parse_delta_factor(right.trim())) {
            if x != y {
                return Err(StepError::Malformed(s.to_string()));
            }
            return Ok(Some(Monomial::Delta(x, k + 1)));
        }
    }
    if let Some((x, n)) = parse_theta_factor(s) {
        if n == 0 {
            return Err(StepError::ZeroPower(s.to_string()));
        }
        return Ok(Some(Monomial::Theta(x, n)));
    }
    Ok(None)
}

/// Splits a term `coeff*monomial` into its scalar and monomial text.
pub(crate) fn split_coefficient(term: &str) -> Result<(ExpScalar, Monomial, String), StepError> {
    let term = term.trim();
    let err = || StepError::Malformed(term.to_string());
    // Try successively shorter monomial suffixes after a top-level `*`.
    let mut depth = 0i32;
    let mut stars = Vec::new();
    for (i, ch) in term.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => stars.push(i),
            _ => {}
        }
    }
    let bare = |s: &str| -> Result<Option<(Monomial, String)>, StepError> {
        let (mono, suffix) = match s.split_once('@') {
            Some((m, sfx)) => (m, sfx.trim().to_string()),
            None => (s, String::new()),
        };
        Ok(parse_monomial(mono)?.map(|m| (m, suffix)))
    };
    if let Some((m, sfx)) = bare(term)? {
        return Ok((ExpScalar::one(), m, sfx));
    }
    for &i in &stars {
        let (coeff, mono) = (&term[..i], &term[i + 1..]);
        if let Some((m, sfx)) = bare(mono)? {
            let coeff = coeff.trim();
            let coeff = coeff
                .strip_prefix('(')
                .and_then(|c| c.strip_suffix(')'))
                .unwrap_or(coeff);
            let c = ExpScalar::parse(coeff).map_err(|_| err())?;
            return Ok((c, m, sfx));
        }
    }
    Err(err())
}

impl std::str::FromStr for StepElement<Rational> {
    type Err = StepError;

    /// Parses sums of `[coeff*]monomial` with rational point arguments,
    /// e.g. `2*th(1/2)^3 - exp(-1)*dl(0)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut out = Self::zero();
        let terms = split_signed_terms(s);
        if terms.is_empty() {
            return Err(StepError::Malformed(s.to_string()));
        }
        for (neg, term) in terms {
            let (mut c, mono, suffix) = split_coefficient(&term)?;
            if !suffix.is_empty() {
                return Err(StepError::Malformed(term));
            }
            if neg {
                c = c.negate();
            }
            let key = |x: &str| x.parse::<Rational>().map_err(|_| StepError::Malformed(term.clone()));
            match mono {
                Monomial::One => out.add_unit(&c),
                Monomial::Theta(x, n) => out.add_theta(key(&x)?, n, &c),
                Monomial::Delta(x, n) => out.add_delta(key(&x)?, n, &c),
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn sf(s: &str) -> StepElement<Rational> {
        s.parse().unwrap()
    }

    #[test]
    fn products_follow_the_step_rules() {
        assert_eq!(sf("th(1)^2").mul(&sf("th(3)")), sf("th(3)"));
        assert_eq!(sf("th(3)").mul(&sf("th(1)^2")), sf("th(3)"));
        assert_eq!(sf("th(1)^2").mul(&sf("th(1)^3")), sf("th(1)^5"));
        assert_eq!(sf("th(1)").mul(&sf("dl(3)")), sf("dl(3)"));
        assert_eq!(sf("dl(1)").mul(&sf("th(3)")), sf("0"));
        assert_eq!(sf("th(2)^2").mul(&sf("th(2)*dl(2)")), sf("th(2)^3*dl(2)"));
        assert_eq!(sf("dl(1)").mul(&sf("dl(1)")), sf("0"));
        assert_eq!(sf("one").mul(&sf("dl(1)")), sf("dl(1)"));
    }

    #[test]
    fn d_lowers_the_power() {
        assert_eq!(sf("th(0)^3").d(), sf("3*th(0)^2*dl(0)"));
        assert_eq!(sf("one").d(), sf("0"));
        assert_eq!(sf("dl(0)").d(), sf("0"));
    }

    #[test]
    fn d_is_a_derivation() {
        let a = sf("th(0)^2 - 3*th(1)");
        let b = sf("th(1)^2 + 1/2*th(-1)");
        let lhs = a.mul(&b).d();
        let rhs = a.d().mul(&b).add(&a.mul(&b.d()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn constrained_subalgebra_membership() {
        assert!(sf("th(0) - th(1)^2").in_constrained());
        assert!(!sf("th(0)").in_constrained());
        assert!(!sf("one - th(0)").in_constrained());
        assert!(sf("dl(0)").in_constrained());
    }

    #[test]
    fn h1_class_divides_by_power() {
        assert_eq!(sf("3*th(0)^2*dl(0)").h1_class(), ExpScalar::one());
        assert_eq!(sf("dl(0) + 2*th(1)*dl(1)").h1_class(), ExpScalar::constant(q("2")));
    }

    #[test]
    fn text_round_trip_is_canonical() {
        let text = "one - 1/2*th(0) + th(1)^2 + exp(-1)*dl(-1) - 2*th(3)^2*dl(3)";
        let v = sf(text);
        assert_eq!(v.to_string(), text);
        assert_eq!(sf("th(1)^2 + th(0)").to_string(), "th(0) + th(1)^2");
        assert!("th(0)^0".parse::<StepElement<Rational>>().is_err());
        assert!("th(0)*dl(1)".parse::<StepElement<Rational>>().is_err());
        assert!("blah".parse::<StepElement<Rational>>().is_err());
    }

    #[test]
    fn multi_term_coefficients_are_parenthesised() {
        let c = ExpScalar::from_terms([(q("1"), q("-1")), (q("2"), q("0"))]);
        let v = StepElement::theta_times(q("0"), 1, c);
        assert_eq!(v.to_string(), "(exp(-1) + 2)*th(0)");
        assert_eq!(sf(&v.to_string()), v);
    }
}
