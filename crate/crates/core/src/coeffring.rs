//! Exact scalar arithmetic: Laurent polynomials with rational coefficients.
//!
//! A [`Coefficient`] is keyed by coordinate *names*, so the same value can be
//! read on any chart that contains those coordinates. Whether negative powers
//! are admissible is a property of the chart and is checked there.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num::{BigInt, One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar, always reduced with a positive denominator.
pub type Rational = num::BigRational;

/// Coordinate name.
pub type Var = Arc<str>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("coordinate `{0}` is not assigned a value")]
    Unassigned(String),
    #[error("coordinate `{0}` is evaluated at zero but appears with a negative power")]
    ZeroDivision(String),
    #[error("`{0}` is not a unit of the Laurent ring")]
    NotInvertible(String),
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Product of coordinate powers; sorted by name, no zero exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(Var, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str, exp: i32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(Var::from(name), exp)])
        }
    }

    pub fn from_powers<I: IntoIterator<Item = (Var, i32)>>(powers: I) -> Self {
        let mut acc: BTreeMap<Var, i32> = BTreeMap::new();
        for (v, e) in powers {
            *acc.entry(v).or_insert(0) += e;
        }
        Monomial(acc.into_iter().filter(|(_, e)| *e != 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn powers(&self) -> &[(Var, i32)] {
        &self.0
    }

    pub fn exponent(&self, name: &str) -> i32 {
        self.0
            .iter()
            .find(|(v, _)| &**v == name)
            .map_or(0, |(_, e)| *e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|(v, e)| (v.clone(), -e)).collect())
    }

    pub fn has_negative_power(&self) -> bool {
        self.0.iter().any(|(_, e)| *e < 0)
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().map(|(_, e)| *e as i64).sum()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse Laurent polynomial over the rationals. No zero coefficient is stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Coefficient {
    terms: BTreeMap<Monomial, Rational>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::default()
    }

    pub fn one() -> Self {
        Coefficient::constant(Rational::one())
    }

    pub fn constant(r: Rational) -> Self {
        Coefficient::term(r, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Coefficient::constant(rat(n))
    }

    pub fn var(name: &str) -> Self {
        Coefficient::term(Rational::one(), Monomial::var(name, 1))
    }

    pub fn var_pow(name: &str, exp: i32) -> Self {
        Coefficient::term(Rational::one(), Monomial::var(name, exp))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Coefficient { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Self {
        let mut out = Coefficient::zero();
        for (m, c) in it {
            out.add_term(m, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rational value when the polynomial has no variable part.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Single term `c * m`, if the polynomial is a monomial.
    pub fn as_term(&self) -> Option<(&Rational, &Monomial)> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some((c, m))
        } else {
            None
        }
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.terms.keys().any(|m| m.exponent(name) != 0)
    }

    pub fn has_negative_power(&self) -> bool {
        self.terms.keys().any(Monomial::has_negative_power)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &Coefficient) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// `self += k * other` without intermediate allocation of `k * other`.
    pub fn add_scaled(&mut self, other: &Coefficient, k: &Coefficient) {
        for (m1, c1) in &other.terms {
            for (m2, c2) in &k.terms {
                self.add_term(m1.mul(m2), c1 * c2);
            }
        }
    }

    pub fn scale(&self, r: &Rational) -> Coefficient {
        if r.is_zero() {
            return Coefficient::zero();
        }
        Coefficient {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * r)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Coefficient {
        self.scale(&rat(n))
    }

    pub fn pow(&self, exp: u32) -> Coefficient {
        let mut acc = Coefficient::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse of a single-term polynomial; `unit_var` says which coordinates
    /// may carry negative powers.
    pub fn inverse_unit(&self, unit_var: impl Fn(&str) -> bool) -> Result<Coefficient, CoeffError> {
        let Some((c, m)) = self.as_term() else {
            return Err(CoeffError::NotInvertible(self.to_string()));
        };
        if !m.0.iter().all(|(v, _)| unit_var(v)) {
            return Err(CoeffError::NotInvertible(self.to_string()));
        }
        Ok(Coefficient::term(c.recip(), m.inverse()))
    }

    /// True when the polynomial is invertible in the Laurent ring.
    pub fn is_unit(&self, unit_var: impl Fn(&str) -> bool) -> bool {
        self.as_term()
            .is_some_and(|(_, m)| m.0.iter().all(|(v, _)| unit_var(v)))
    }

    pub fn partial(&self, name: &str) -> Coefficient {
        let mut out = Coefficient::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(name);
            if e == 0 {
                continue;
            }
            let dm = m.mul(&Monomial::var(name, -1));
            out.add_term(dm, c * rat(e as i64));
        }
        out
    }

    pub fn evaluate(&self, point: &BTreeMap<String, Rational>) -> Result<Rational, CoeffError> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in &m.0 {
                let x = point
                    .get(&**v)
                    .ok_or_else(|| CoeffError::Unassigned(v.to_string()))?;
                if x.is_zero() {
                    if *e < 0 {
                        return Err(CoeffError::ZeroDivision(v.to_string()));
                    }
                    t = Rational::zero();
                    break;
                }
                t *= num::pow::Pow::pow(x, *e);
            }
            total += t;
        }
        Ok(total)
    }

    /// Substitutes every mentioned coordinate that has an image; negative
    /// powers require the image to be a unit under `unit_var`.
    pub fn substitute(
        &self,
        images: &BTreeMap<Var, Coefficient>,
        unit_var: &dyn Fn(&str) -> bool,
    ) -> Result<Coefficient, CoeffError> {
        let mut out = Coefficient::zero();
        for (m, c) in &self.terms {
            let mut t = Coefficient::constant(c.clone());
            for (v, e) in &m.0 {
                let factor = match images.get(v) {
                    None => Coefficient::var_pow(v, *e),
                    Some(img) if *e >= 0 => img.pow(*e as u32),
                    Some(img) => img.inverse_unit(unit_var)?.pow((-*e) as u32),
                };
                t = &t * &factor;
            }
            out.add_assign_ref(&t);
        }
        Ok(out)
    }

    pub fn max_total_degree(&self) -> i64 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }
}

impl From<Rational> for Coefficient {
    fn from(r: Rational) -> Self {
        Coefficient::constant(r)
    }
}

impl From<i64> for Coefficient {
    fn from(n: i64) -> Self {
        Coefficient::int(n)
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        let mut out = Coefficient::zero();
        out.add_scaled(self, rhs);
        out
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Coefficient {
            type Output = Coefficient;
            fn $f(self, rhs: Coefficient) -> Coefficient {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        -&self
    }
}

/// Canonical text: `3/2*s0*y^2 - 1*z^-1`. Every non-constant term carries its
/// rational factor explicitly.
impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write!(f, "{}", c.abs())?;
            if !m.is_one() {
                write!(f, "*{m}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Coefficient {
    type Err = CoeffError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TextParser { src: s.as_bytes(), pos: 0 }.parse()
    }
}

/// Parser for the textual form: signed sums of `*`-products of rationals and
/// `name^int` powers.
struct TextParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl TextParser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, CoeffError> {
        Err(CoeffError::Parse { col: self.pos + 1, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Coefficient, CoeffError> {
        let mut total = Coefficient::zero();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                None if !first => break,
                None => return self.err("empty input"),
                Some(b'+') if !first => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                Some(_) if first => 1,
                Some(_) => return self.err("expected `+` or `-`"),
            };
            first = false;
            let t = self.product()?;
            total.add_assign_ref(&t.scale_int(sign));
        }
        Ok(total)
    }

    fn product(&mut self) -> Result<Coefficient, CoeffError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn digits(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| {
            std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .unwrap()
        })
    }

    fn factor(&mut self) -> Result<Coefficient, CoeffError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.digits().unwrap();
                let d = if self.src.get(self.pos) == Some(&b'/') {
                    self.pos += 1;
                    match self.digits() {
                        Some(d) if !d.is_zero() => d,
                        _ => return self.err("expected nonzero denominator"),
                    }
                } else {
                    BigInt::one()
                };
                Ok(Coefficient::constant(Rational::new(n, d)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                let mut exp = 1i32;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let neg = if self.peek() == Some(b'-') {
                        self.pos += 1;
                        true
                    } else {
                        false
                    };
                    self.skip_ws();
                    let Some(e) = self.digits() else {
                        return self.err("expected integer exponent");
                    };
                    let e: i32 = match e.try_into() {
                        Ok(e) => e,
                        Err(_) => return self.err("exponent out of range"),
                    };
                    exp = if neg { -e } else { e };
                }
                Ok(Coefficient::var_pow(&name, exp))
            }
            _ => self.err("expected number or coordinate name"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const VARS: [&str; 4] = ["s0", "y", "z", "p"];

    fn small_monomial() -> impl Strategy<Value = Monomial> {
        proptest::collection::vec((0usize..VARS.len(), -1i32..3), 0..3).prop_map(|ps| {
            Monomial::from_powers(ps.into_iter().map(|(v, e)| {
                // only z may carry a negative power
                let e = if VARS[v] == "z" { e } else { e.abs() };
                (Var::from(VARS[v]), e)
            }))
        })
    }

    fn small_coeff() -> impl Strategy<Value = Coefficient> {
        proptest::collection::vec((small_monomial(), -5i64..6, 1i64..4), 0..4).prop_map(|ts| {
            Coefficient::from_terms(ts.into_iter().map(|(m, n, d)| (m, ratio(n, d))))
        })
    }

    fn point() -> impl Strategy<Value = BTreeMap<String, Rational>> {
        (-4i64..5, -4i64..5, 1i64..5, -4i64..5).prop_map(|(a, b, z, c)| {
            [("s0", rat(a)), ("y", rat(b)), ("z", ratio(z, 2)), ("p", rat(c))]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect()
        })
    }

    #[test]
    fn localization_identity() {
        let z = Coefficient::var("z");
        let zi = Coefficient::var_pow("z", -1);
        assert_eq!(&z * &zi, Coefficient::one());
    }

    #[test]
    fn laurent_power_rule() {
        let zi = Coefficient::var_pow("z", -1);
        assert_eq!(zi.partial("z"), -&Coefficient::var_pow("z", -2));
        let sp = &Coefficient::var("s0") * &Coefficient::var("p");
        assert_eq!(sp.partial("s0"), Coefficient::var("p"));
        assert!(Coefficient::var("y").pow(2).partial("p").is_zero());
    }

    #[test]
    fn evaluation_examples() {
        let pt: BTreeMap<String, Rational> =
            [("z".to_string(), rat(2)), ("y".to_string(), rat(3)), ("p".to_string(), rat(1))]
                .into_iter()
                .collect();
        let zy = &Coefficient::var("z") * &Coefficient::var("y");
        assert_eq!(zy.evaluate(&pt).unwrap(), rat(6));
        assert_eq!(Coefficient::var_pow("z", -1).evaluate(&pt).unwrap(), ratio(1, 2));
        let mut pt2 = pt.clone();
        pt2.insert("y".into(), rat(2));
        let h = &Coefficient::var("p") + &Coefficient::var("y").pow(2);
        assert_eq!(h.evaluate(&pt2).unwrap(), rat(5));
        pt2.insert("z".into(), rat(0));
        assert_eq!(
            Coefficient::var_pow("z", -1).evaluate(&pt2),
            Err(CoeffError::ZeroDivision("z".into()))
        );
    }

    #[test]
    fn canonical_text_form() {
        let c: Coefficient = "3/2*s0*y^2 - 1*z^-1".parse().unwrap();
        assert_eq!(c.to_string(), "3/2*s0*y^2 - 1*z^-1");
        let d: Coefficient = "y^2*s0*3/2 - z^-1".parse().unwrap();
        assert_eq!(c, d);
        assert_eq!(Coefficient::zero().to_string(), "0");
        assert!("3/0".parse::<Coefficient>().is_err());
        assert!("s0 s1".parse::<Coefficient>().is_err());
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small_coeff(), b in small_coeff(), c in small_coeff()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a + &(-&a)).is_zero());
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn leibniz_rule(a in small_coeff(), b in small_coeff(), v in 0usize..4) {
            let x = VARS[v];
            let lhs = (&a * &b).partial(x);
            let rhs = &(&a.partial(x) * &b) + &(&a * &b.partial(x));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn mixed_partials_commute(a in small_coeff(), u in 0usize..4, v in 0usize..4) {
            prop_assert_eq!(a.partial(VARS[u]).partial(VARS[v]), a.partial(VARS[v]).partial(VARS[u]));
        }

        #[test]
        fn evaluation_is_a_homomorphism(a in small_coeff(), b in small_coeff(), pt in point()) {
            let ab = (&a * &b).evaluate(&pt).unwrap();
            prop_assert_eq!(ab, a.evaluate(&pt).unwrap() * b.evaluate(&pt).unwrap());
            let s = (&a + &b).evaluate(&pt).unwrap();
            prop_assert_eq!(s, a.evaluate(&pt).unwrap() + b.evaluate(&pt).unwrap());
        }

        #[test]
        fn text_round_trip(a in small_coeff()) {
            prop_assert_eq!(a.to_string().parse::<Coefficient>().unwrap(), a);
        }
    }
}
