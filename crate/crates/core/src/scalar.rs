//! Exact coefficient arithmetic.
//!
//! Two scalar rings cover every identity the toolkit verifies: [`Rational`]
//! and [`LaurentScalar`], a multivariate Laurent polynomial ring over the
//! rationals with one variable per prime. The latter houses the "generic"
//! deformation parameter, whose prime values are algebraically independent
//! by construction. The categorical modules are written against the
//! [`Scalar`] trait so the same composition code runs over either ring.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// What the generic composition code needs from a coefficient ring.
///
/// Every implementor is a commutative unital ring in which the rationals
/// embed, so dividing by a group order is always legal.
pub trait Scalar: Clone + fmt::Debug + fmt::Display + PartialEq + Eq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Multiplicative inverse; errors on non-units.
    fn invert(&self) -> Result<Self>;
    fn from_rational(q: &Rational) -> Self;

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn from_integer(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n))
    }
    /// 1/n for a positive integer n, the averaging weight.
    fn inverse_integer(n: usize) -> Self {
        Self::from_rational(&Rational::new(1, n as i64))
    }
    fn to_json(&self) -> serde_json::Value;
}

// ---------------------------------------------------------------------------
// Rational
// ---------------------------------------------------------------------------

/// An exact rational number, always reduced, denominator positive.
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

    pub fn from_big(r: BigRational) -> Self {
        Rational(r)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Integer power, with negative exponents requiring a nonzero base.
    pub fn pow(&self, exp: i32) -> Result<Self> {
        if exp < 0 && self.0.is_zero() {
            return Err(Error::NonUnit("0".into()));
        }
        Ok(Rational(self.0.pow(exp)))
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational(BigRational::zero())
    }
    fn one() -> Self {
        Rational(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        Rational(&self.0 + &rhs.0)
    }
    fn neg(&self) -> Self {
        Rational(-&self.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Rational(&self.0 * &rhs.0)
    }
    fn invert(&self) -> Result<Self> {
        if self.0.is_zero() {
            return Err(Error::NonUnit(self.to_string()));
        }
        Ok(Rational(self.0.recip()))
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
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

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_int = |t: &str| {
            t.trim().parse::<BigInt>().map_err(|_| Error::Invalid {
                what: "rational",
                detail: format!("cannot parse `{s}`"),
            })
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let denom = parse_int(d)?;
                if denom.is_zero() {
                    return Err(Error::Invalid {
                        what: "rational",
                        detail: "zero denominator".into(),
                    });
                }
                Ok(Rational(BigRational::new(parse_int(n)?, denom)))
            }
            None => Ok(Rational(BigRational::from_integer(parse_int(s)?))),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// LaurentScalar
// ---------------------------------------------------------------------------

/// Exponent vector of a Laurent monomial: prime -> nonzero exponent.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(BTreeMap<u32, i32>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn var(prime: u32, exp: i32) -> Self {
        let mut m = BTreeMap::new();
        if exp != 0 {
            m.insert(prime, exp);
        }
        Monomial(m)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = self.0.clone();
        for (&p, &e) in &rhs.0 {
            let entry = out.entry(p).or_insert(0);
            *entry += e;
            if *entry == 0 {
                out.remove(&p);
            }
        }
        Monomial(out)
    }

    pub fn inverse(&self) -> Self {
        Monomial(self.0.iter().map(|(&p, &e)| (p, -e)).collect())
    }

    pub fn exponents(&self) -> &BTreeMap<u32, i32> {
        &self.0
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (p, e) in &self.0 {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "x{p}")?;
            } else {
                write!(f, "x{p}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A multivariate Laurent polynomial over the rationals, one variable per
/// prime. Stored sparsely; no zero coefficients, no zero exponents.
///
/// The units are exactly the nonzero single-term elements.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LaurentScalar {
    terms: BTreeMap<Monomial, Rational>,
}

impl LaurentScalar {
    pub fn term(coeff: Rational, mono: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(mono, coeff);
        }
        LaurentScalar { terms }
    }

    /// The variable attached to a prime.
    pub fn var(prime: u32) -> Self {
        Self::term(Rational::one(), Monomial::var(prime, 1))
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1
    }

    /// The constant value, if the element has no variables.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            return Some(Rational::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.exponents().is_empty() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn variables(&self) -> Vec<u32> {
        let mut vars: Vec<u32> = self
            .terms
            .keys()
            .flat_map(|m| m.exponents().keys().copied())
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Ring homomorphism to the rationals sending the variable of prime `p`
    /// to `assignment[p]`. Every variable must be assigned a nonzero value.
    pub fn specialize(&self, assignment: &BTreeMap<u32, Rational>) -> Result<Rational> {
        for (p, v) in assignment {
            if v.is_zero() {
                return Err(Error::Invalid {
                    what: "specialization",
                    detail: format!("variable x{p} assigned zero"),
                });
            }
        }
        let mut total = Rational::zero();
        for (mono, coeff) in &self.terms {
            let mut value = coeff.clone();
            for (p, e) in mono.exponents() {
                let base = assignment.get(p).ok_or(Error::MissingVariable(*p))?;
                value = value.mul(&base.pow(*e)?);
            }
            total = total.add(&value);
        }
        Ok(total)
    }
}

impl Scalar for LaurentScalar {
    fn zero() -> Self {
        LaurentScalar::default()
    }

    fn one() -> Self {
        Self::term(Rational::one(), Monomial::unit())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, rhs: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            match terms.get_mut(m) {
                Some(acc) => {
                    *acc = acc.add(c);
                    if acc.is_zero() {
                        terms.remove(m);
                    }
                }
                None => {
                    terms.insert(m.clone(), c.clone());
                }
            }
        }
        LaurentScalar { terms }
    }

    fn neg(&self) -> Self {
        LaurentScalar {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        let mut out = LaurentScalar::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                let c = ca.mul(cb);
                match out.terms.get_mut(&m) {
                    Some(acc) => {
                        *acc = acc.add(&c);
                        if acc.is_zero() {
                            out.terms.remove(&m);
                        }
                    }
                    None => {
                        if !c.is_zero() {
                            out.terms.insert(m, c);
                        }
                    }
                }
            }
        }
        out
    }

    fn invert(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NonUnit(self.to_string()));
        }
        let (mono, coeff) = self.terms.iter().next().unwrap();
        Ok(Self::term(coeff.invert()?, mono.inverse()))
    }

    fn from_rational(q: &Rational) -> Self {
        Self::term(q.clone(), Monomial::unit())
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| {
                    let exps: serde_json::Map<String, serde_json::Value> = m
                        .exponents()
                        .iter()
                        .map(|(p, e)| (p.to_string(), serde_json::json!(e)))
                        .collect();
                    serde_json::json!({ "coeff": c.to_string(), "exps": exps })
                })
                .collect(),
        )
    }
}

impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mono, coeff) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if mono.exponents().is_empty() {
                write!(f, "{coeff}")?;
            } else if coeff == &Rational::one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{coeff}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for LaurentScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Term {
            coeff: Rational,
            #[serde(default)]
            exps: BTreeMap<String, i32>,
        }
        let raw = Vec::<Term>::deserialize(deserializer)?;
        let mut out = LaurentScalar::zero();
        for term in raw {
            let mut mono = Monomial::unit();
            for (p, e) in term.exps {
                let prime: u32 = p.parse().map_err(D::Error::custom)?;
                mono = mono.mul(&Monomial::var(prime, e));
            }
            out = out.add(&LaurentScalar::term(term.coeff, mono));
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// The deformation parameter
// ---------------------------------------------------------------------------

/// A multiplicative map from positive integers to units, determined by its
/// values on primes.
///
/// - `Identity`: every prime goes to itself, recovering the classical,
///   undeformed composition.
/// - `One`: every prime goes to 1.
/// - `Generic`: the prime `q` goes to the fresh variable `x_q`, so the prime
///   values are algebraically independent.
/// - `Explicit`: user-supplied unit values per prime.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EllMap {
    Identity,
    One,
    Generic,
    Explicit(BTreeMap<u32, LaurentScalar>),
}

impl EllMap {
    /// Builds the explicit variant, insisting every value is a unit.
    pub fn explicit(values: BTreeMap<u32, LaurentScalar>) -> Result<Self> {
        for (p, v) in &values {
            if !v.is_unit() {
                return Err(Error::Invalid {
                    what: "ell map",
                    detail: format!("value for prime {p} is not a unit: {v}"),
                });
            }
        }
        Ok(EllMap::Explicit(values))
    }

    fn prime_value(&self, p: u32) -> Result<LaurentScalar> {
        match self {
            EllMap::Identity => Ok(LaurentScalar::from_integer(p as i64)),
            EllMap::One => Ok(LaurentScalar::one()),
            EllMap::Generic => Ok(LaurentScalar::var(p)),
            EllMap::Explicit(values) => {
                values.get(&p).cloned().ok_or(Error::MissingVariable(p))
            }
        }
    }

    /// Evaluates at a positive integer through its prime factorization.
    pub fn eval(&self, n: u64) -> Result<LaurentScalar> {
        if n == 0 {
            return Err(Error::ZeroOutsideMonoid);
        }
        let mut out = LaurentScalar::one();
        for (p, a) in factorize(n) {
            let base = self.prime_value(p as u32)?;
            for _ in 0..a {
                out = out.mul(&base);
            }
        }
        Ok(out)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            EllMap::Identity => "identity",
            EllMap::One => "one",
            EllMap::Generic => "generic",
            EllMap::Explicit(_) => "explicit",
        }
    }
}

impl FromStr for EllMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(EllMap::Identity),
            "one" => Ok(EllMap::One),
            "generic" => Ok(EllMap::Generic),
            other => Err(Error::Invalid {
                what: "ell map",
                detail: format!("unknown kind `{other}` (expected identity, one or generic)"),
            }),
        }
    }
}

impl Serialize for EllMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut doc = serde_json::Map::new();
        doc.insert("kind".into(), serde_json::json!(self.kind()));
        if let EllMap::Explicit(values) = self {
            let vals: serde_json::Map<String, serde_json::Value> = values
                .iter()
                .map(|(p, v)| (p.to_string(), v.to_json()))
                .collect();
            doc.insert("values".into(), serde_json::Value::Object(vals));
        }
        serde_json::Value::Object(doc).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EllMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Doc {
            kind: String,
            #[serde(default)]
            values: BTreeMap<String, LaurentScalar>,
        }
        let doc = Doc::deserialize(deserializer)?;
        match doc.kind.as_str() {
            "explicit" => {
                let mut values = BTreeMap::new();
                for (p, v) in doc.values {
                    values.insert(p.parse::<u32>().map_err(D::Error::custom)?, v);
                }
                EllMap::explicit(values).map_err(D::Error::custom)
            }
            kind => kind.parse().map_err(D::Error::custom),
        }
    }
}

/// Prime factorization by trial division; fine at the scales we run.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut a = 0;
            while n % p == 0 {
                n /= p;
                a += 1;
            }
            out.push((p, a));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// The identity assignment `x_q -> q`, covering the given variables.
pub fn identity_assignment(vars: &[u32]) -> BTreeMap<u32, Rational> {
    vars.iter()
        .map(|&p| (p, Rational::from_integer(p as i64)))
        .collect()
}

/// The collapse-to-one assignment `x_q -> 1`.
pub fn one_assignment(vars: &[u32]) -> BTreeMap<u32, Rational> {
    vars.iter().map(|&p| (p, Rational::one())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ls(n: i64) -> LaurentScalar {
        LaurentScalar::from_integer(n)
    }

    #[test]
    fn rational_string_round_trip() {
        let q: Rational = "-6/4".parse().unwrap();
        assert_eq!(q, Rational::new(-3, 2));
        assert_eq!(q.to_string(), "-3/2");
        assert_eq!("5".parse::<Rational>().unwrap(), Rational::from_integer(5));
        assert!("1/0".parse::<Rational>().is_err());
    }

    #[test]
    fn ell_eval_identity_and_generic() {
        assert_eq!(EllMap::Identity.eval(1).unwrap(), ls(1));
        assert_eq!(EllMap::Identity.eval(12).unwrap(), ls(12));
        assert_eq!(EllMap::One.eval(12).unwrap(), ls(1));
        let expected = LaurentScalar::term(
            Rational::one(),
            Monomial::var(2, 2).mul(&Monomial::var(3, 1)),
        );
        assert_eq!(EllMap::Generic.eval(12).unwrap(), expected);
        assert!(EllMap::Generic.eval(0).is_err());
    }

    #[test]
    fn ell_eval_is_multiplicative() {
        for ell in [EllMap::Identity, EllMap::One, EllMap::Generic] {
            for m in 1..=100u64 {
                for n in 1..=100u64 {
                    if m * n <= 100 {
                        assert_eq!(
                            ell.eval(m * n).unwrap(),
                            ell.eval(m).unwrap().mul(&ell.eval(n).unwrap()),
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn generic_specializes_back_to_identity() {
        for n in 1..=100u64 {
            let s = EllMap::Generic.eval(n).unwrap();
            let assign = identity_assignment(&s.variables());
            assert_eq!(s.specialize(&assign).unwrap(), Rational::from_integer(n as i64));
        }
    }

    #[test]
    fn specialize_examples() {
        let s = EllMap::Generic.eval(12).unwrap();
        let assign = identity_assignment(&[2, 3]);
        assert_eq!(s.specialize(&assign).unwrap(), Rational::from_integer(12));

        let one_plus_x2 = LaurentScalar::one().add(&LaurentScalar::var(2));
        let mut assign = BTreeMap::new();
        assign.insert(2, Rational::one());
        assert_eq!(
            one_plus_x2.specialize(&assign).unwrap(),
            Rational::from_integer(2)
        );

        let x2_inv = LaurentScalar::var(2).invert().unwrap();
        let assign = identity_assignment(&[2]);
        assert_eq!(x2_inv.specialize(&assign).unwrap(), Rational::new(1, 2));

        assert!(matches!(
            LaurentScalar::var(5).specialize(&BTreeMap::new()),
            Err(Error::MissingVariable(5))
        ));
    }

    #[test]
    fn inversion_is_exactly_for_monomials() {
        assert_eq!(ls(1).invert().unwrap(), ls(1));
        let m = LaurentScalar::term(Rational::from_integer(3), Monomial::var(2, 1));
        let inv = m.invert().unwrap();
        assert_eq!(
            inv,
            LaurentScalar::term(Rational::new(1, 3), Monomial::var(2, -1))
        );
        assert_eq!(m.mul(&inv), ls(1));

        let non_unit = ls(1).add(&LaurentScalar::var(2));
        assert!(non_unit.is_unit() == false);
        assert!(non_unit.invert().is_err());
        assert!(LaurentScalar::zero().invert().is_err());
    }

    #[test]
    fn explicit_ell_requires_units() {
        let mut values = BTreeMap::new();
        values.insert(2, ls(1).add(&LaurentScalar::var(3)));
        assert!(EllMap::explicit(values).is_err());

        let mut values = BTreeMap::new();
        values.insert(2, LaurentScalar::var(7));
        let ell = EllMap::explicit(values).unwrap();
        assert_eq!(ell.eval(4).unwrap(), LaurentScalar::var(7).mul(&LaurentScalar::var(7)));
        assert!(matches!(ell.eval(6), Err(Error::MissingVariable(3))));
    }

    #[test]
    fn laurent_serde_round_trip() {
        let s = LaurentScalar::term(Rational::new(-7, 3), Monomial::var(2, -2))
            .add(&LaurentScalar::var(5));
        let text = serde_json::to_string(&s).unwrap();
        let back: LaurentScalar = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn ell_map_serde_round_trip() {
        for ell in [EllMap::Identity, EllMap::One, EllMap::Generic] {
            let text = serde_json::to_string(&ell).unwrap();
            assert_eq!(serde_json::from_str::<EllMap>(&text).unwrap(), ell);
        }
        let mut values = BTreeMap::new();
        values.insert(2, LaurentScalar::var(2));
        let ell = EllMap::explicit(values).unwrap();
        let text = serde_json::to_string(&ell).unwrap();
        assert_eq!(serde_json::from_str::<EllMap>(&text).unwrap(), ell);
    }

    #[test]
    fn factorize_small() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(97), vec![(97, 1)]);
    }
}
