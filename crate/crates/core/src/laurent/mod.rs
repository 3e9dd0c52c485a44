//! Exact multivariate Laurent polynomials over the rationals.
//!
//! Exponents are stored doubled so that half-integer powers such as
//! `t1^(1/2)` or `kappa^(1/2)` are ordinary monomials. The variable order is
//! `t1, t2, t3, q0, ..., q_{r-1}` for a session of order `r`; other modules
//! may append formal variables after the q's.

mod crational;

pub use crational::{CPoly, CRational};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of equivariant variables `t1, t2, t3` leading every exponent vector.
pub const T_VARS: usize = 3;

/// Parse `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Usage(format!("cannot parse rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::DivisionByZero(s.to_string()));
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Render a rational as `"p/q"`, or `"p"` when integral.
pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Doubled exponents of a monomial: entry `i` is twice the power of variable `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct ExponentVector(Vec<i32>);

impl ExponentVector {
    pub fn trivial(arity: usize) -> Self {
        ExponentVector(vec![0; arity])
    }

    pub fn from_doubled(doubled: Vec<i32>) -> Self {
        ExponentVector(doubled)
    }

    /// Build from integer exponents (each entry is doubled internally).
    pub fn from_integer(exponents: &[i32]) -> Self {
        ExponentVector(exponents.iter().map(|e| 2 * e).collect())
    }

    /// `t1^a t2^b t3^c` in a session with `r` q-variables.
    pub fn t(r: usize, a: i32, b: i32, c: i32) -> Self {
        let mut v = vec![0; T_VARS + r];
        v[0] = 2 * a;
        v[1] = 2 * b;
        v[2] = 2 * c;
        ExponentVector(v)
    }

    /// `kappa^(k/2) = (t1 t2 t3)^(k/2)`, i.e. `c^k`.
    pub fn kappa_half(r: usize, k: i32) -> Self {
        let mut v = vec![0; T_VARS + r];
        v[..T_VARS].iter_mut().for_each(|e| *e = k);
        ExponentVector(v)
    }

    /// The q-monomial `q^alpha` (integer exponents) with trivial t-part.
    pub fn q(alpha: &[i32]) -> Self {
        let mut v = vec![0; T_VARS];
        v.extend(alpha.iter().map(|a| 2 * a));
        ExponentVector(v)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn doubled(&self) -> &[i32] {
        &self.0
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.arity(), other.arity());
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn div(&self, other: &Self) -> Self {
        debug_assert_eq!(self.arity(), other.arity());
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn inverse(&self) -> Self {
        ExponentVector(self.0.iter().map(|e| -e).collect())
    }

    pub fn scale(&self, n: i32) -> Self {
        ExponentVector(self.0.iter().map(|e| e * n).collect())
    }

    /// Square root; fails when some doubled exponent is odd.
    pub fn sqrt(&self) -> Result<Self> {
        if self.0.iter().any(|e| e % 2 != 0) {
            return Err(Error::HalfLattice(self.to_string()));
        }
        Ok(ExponentVector(self.0.iter().map(|e| e / 2).collect()))
    }

    /// The first three entries (t-part) as doubled exponents.
    pub fn t_part(&self) -> [i32; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }

    /// The entries after the t-part, as doubled exponents.
    pub fn q_part(&self) -> &[i32] {
        &self.0[T_VARS.min(self.0.len())..]
    }

    fn promoted(&self, arity: usize) -> Self {
        if self.0.len() == arity {
            self.clone()
        } else {
            debug_assert!(self.0.is_empty());
            ExponentVector::trivial(arity)
        }
    }
}

fn variable_name(i: usize) -> String {
    if i < T_VARS {
        format!("t{}", i + 1)
    } else {
        format!("q{}", i - T_VARS)
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            let name = variable_name(i);
            match (e % 2 == 0, e / 2) {
                (true, 1) => write!(f, "{name}")?,
                (true, p) => write!(f, "{name}^{p}")?,
                (false, _) => write!(f, "{name}^({e}/2)")?,
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// A point of the square-root cover of the torus: values `s_i = t_i^(1/2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoint {
    s: [BigRational; 3],
}

impl RationalPoint {
    pub fn new(s1: BigRational, s2: BigRational, s3: BigRational) -> Result<Self> {
        if s1.is_zero() || s2.is_zero() || s3.is_zero() {
            return Err(Error::Usage("point coordinates must be nonzero".into()));
        }
        Ok(RationalPoint { s: [s1, s2, s3] })
    }

    pub fn from_ints(p: [(i64, i64); 3]) -> Result<Self> {
        let [a, b, c] = p.map(|(n, d)| BigRational::new(n.into(), d.into()));
        Self::new(a, b, c)
    }

    pub fn parse(coords: &[String]) -> Result<Self> {
        if coords.len() != 3 {
            return Err(Error::Usage("a point needs exactly three coordinates".into()));
        }
        Self::new(
            parse_rational(&coords[0])?,
            parse_rational(&coords[1])?,
            parse_rational(&coords[2])?,
        )
    }

    pub fn s(&self) -> &[BigRational; 3] {
        &self.s
    }

    /// `c = kappa^(1/2) = s1 s2 s3`.
    pub fn c(&self) -> BigRational {
        &self.s[0] * &self.s[1] * &self.s[2]
    }

    /// The point `s -> s^n`, at which an Adams-transformed expression is evaluated.
    pub fn power(&self, n: u32) -> Self {
        RationalPoint {
            s: self.s.clone().map(|x| Pow::pow(x, n)),
        }
    }

    /// Value of the t-part of a monomial.
    pub fn monomial_value(&self, m: &ExponentVector) -> BigRational {
        let [a, b, c] = m.t_part();
        Pow::pow(&self.s[0], a) * Pow::pow(&self.s[1], b) * Pow::pow(&self.s[2], c)
    }

    /// Value of `[m] = m^(1/2) - m^(-1/2)` for a t-monomial `m`.
    pub fn bracket_value(&self, m: &ExponentVector) -> Result<BigRational> {
        let half = m.sqrt()?;
        let v = self.monomial_value(&half);
        Ok(&v - v.recip())
    }

    pub fn to_strings(&self) -> [String; 3] {
        self.s.clone().map(|x| format_rational(&x))
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.to_strings();
        write!(f, "({a}, {b}, {c})")
    }
}

/// Finite map from exponent vectors to nonzero rational coefficients.
///
/// A polynomial of arity 0 is a scalar and combines with any other arity.
#[derive(Clone, Debug, Default)]
pub struct LaurentPoly {
    arity: usize,
    terms: BTreeMap<ExponentVector, BigRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        Self::scalar(BigRational::one())
    }

    pub fn scalar(c: BigRational) -> Self {
        Self::monomial(ExponentVector::trivial(0), c)
    }

    pub fn monomial(m: ExponentVector, c: BigRational) -> Self {
        let mut p = LaurentPoly {
            arity: m.arity(),
            terms: BTreeMap::new(),
        };
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn unit_monomial(m: ExponentVector) -> Self {
        Self::monomial(m, BigRational::one())
    }

    pub fn from_terms(
        arity: usize,
        terms: impl IntoIterator<Item = (ExponentVector, BigRational)>,
    ) -> Result<Self> {
        let mut p = LaurentPoly {
            arity,
            terms: BTreeMap::new(),
        };
        for (m, c) in terms {
            if m.arity() != arity {
                return Err(Error::ArityMismatch(arity, m.arity()));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic order of exponents.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &BigRational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (ExponentVector, BigRational)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, m: &ExponentVector) -> BigRational {
        if self.arity == 0 && m.is_trivial() {
            return self.terms.values().next().cloned().unwrap_or_else(BigRational::zero);
        }
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms
            .iter()
            .find(|(m, _)| m.is_trivial())
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    /// The single term, if this is a monomial.
    pub fn as_monomial(&self) -> Option<(&ExponentVector, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub(crate) fn add_term(&mut self, m: ExponentVector, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let m = m.promoted(self.arity);
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn common_arity(&self, other: &Self) -> Result<usize> {
        match (self.arity, other.arity) {
            (a, b) if a == b => Ok(a),
            (0, b) => Ok(b),
            (a, 0) => Ok(a),
            (a, b) => Err(Error::ArityMismatch(a, b)),
        }
    }

    fn promote(&self, arity: usize) -> Self {
        if self.arity == arity {
            return self.clone();
        }
        LaurentPoly {
            arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.promoted(arity), c.clone()))
                .collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let arity = self.common_arity(other)?;
        let mut out = self.promote(arity);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let arity = self.common_arity(other)?;
        let mut out = LaurentPoly {
            arity,
            terms: BTreeMap::new(),
        };
        for (m1, c1) in &self.terms {
            let m1 = m1.promoted(arity);
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(&m2.promoted(arity)), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return LaurentPoly {
                arity: self.arity,
                terms: BTreeMap::new(),
            };
        }
        LaurentPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    /// Multiply by a monomial.
    pub fn shift(&self, m: &ExponentVector) -> Self {
        let arity = if self.arity == 0 { m.arity() } else { self.arity };
        LaurentPoly {
            arity,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.promoted(arity).mul(&m.promoted(arity)), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(LaurentPoly::one(), |acc, _| &acc * self)
    }

    /// Adams operation: every exponent multiplied by `n`.
    pub fn adams(&self, n: u32) -> Self {
        assert!(n >= 1, "Adams operations are indexed by n >= 1");
        LaurentPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.scale(n as i32), c.clone()))
                .collect(),
        }
    }

    /// Invert every variable.
    pub fn dual(&self) -> Self {
        LaurentPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.inverse(), c.clone()))
                .collect(),
        }
    }

    /// `[m] = m^(1/2) - m^(-1/2)`.
    pub fn bracket(m: &ExponentVector) -> Result<Self> {
        if m.is_trivial() {
            return Err(Error::ZeroWeight);
        }
        let half = m.sqrt()?;
        let mut p = LaurentPoly::unit_monomial(half.clone());
        p.add_term(half.inverse(), -BigRational::one());
        Ok(p)
    }

    /// Keep only the terms whose exponent satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&ExponentVector) -> bool) -> Self {
        LaurentPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Exact value at `pt`; `q_values[j]` is the value of `q_j`.
    pub fn evaluate(&self, pt: &RationalPoint, q_values: Option<&[BigRational]>) -> Result<BigRational> {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            if m.arity() == 0 {
                total += c;
                continue;
            }
            let mut v = pt.monomial_value(m) * c;
            for (j, &e) in m.q_part().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if e % 2 != 0 {
                    return Err(Error::HalfLattice(m.to_string()));
                }
                let qs = q_values.ok_or_else(|| Error::MissingQValues(m.to_string()))?;
                let q = qs
                    .get(j)
                    .ok_or_else(|| Error::Usage(format!("missing value for q{j}")))?;
                v *= Pow::pow(q, e / 2);
            }
            total += v;
        }
        Ok(total)
    }

    /// Largest absolute value among the coefficients' numerators and denominators.
    pub fn height(&self) -> BigInt {
        self.terms
            .values()
            .flat_map(|c| [c.numer().abs(), c.denom().abs()])
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

/// Arity-0 scalars compare equal to the same constant in any arity.
impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        if self.arity == other.arity || self.arity == 0 || other.arity == 0 {
            let arity = self.arity.max(other.arity);
            return self.promote(arity).terms == other.promote(arity).terms;
        }
        false
    }
}

impl Eq for LaurentPoly {}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_trivial() {
                write!(f, "{}", format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", format_rational(&abs))?;
            }
        }
        Ok(())
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("Laurent polynomial arity mismatch")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_sub(rhs).expect("Laurent polynomial arity mismatch")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("Laurent polynomial arity mismatch")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&-BigRational::one())
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

/// JSON form: `{"doubled": true, "terms": [[[e...], "num", "den"], ...]}`.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct LaurentPolyJson {
    pub doubled: bool,
    pub terms: Vec<(Vec<i32>, String, String)>,
}

impl From<&LaurentPoly> for LaurentPolyJson {
    fn from(p: &LaurentPoly) -> Self {
        LaurentPolyJson {
            doubled: true,
            terms: p
                .terms
                .iter()
                .map(|(m, c)| (m.0.clone(), c.numer().to_string(), c.denom().to_string()))
                .collect(),
        }
    }
}

impl TryFrom<LaurentPolyJson> for LaurentPoly {
    type Error = Error;
    fn try_from(j: LaurentPolyJson) -> Result<Self> {
        if !j.doubled {
            return Err(Error::Usage("expected doubled exponents".into()));
        }
        let arity = j.terms.first().map(|t| t.0.len()).unwrap_or(0);
        let terms = j
            .terms
            .into_iter()
            .map(|(e, n, d)| Ok((ExponentVector(e), parse_rational(&format!("{n}/{d}"))?)))
            .collect::<Result<Vec<_>>>()?;
        LaurentPoly::from_terms(arity, terms)
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LaurentPolyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = LaurentPolyJson::deserialize(d)?;
        LaurentPoly::try_from(j).map_err(serde::de::Error::custom)
    }
}
