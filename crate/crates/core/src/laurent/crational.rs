//! Rational functions in the single variable `c = kappa^(1/2)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{format_rational, parse_rational};
use crate::error::{Error, Result};

/// Laurent polynomial in `c` with rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default, Hash)]
pub struct CPoly(BTreeMap<i64, BigRational>);

impl CPoly {
    pub fn zero() -> Self {
        CPoly(BTreeMap::new())
    }

    pub fn one() -> Self {
        Self::monomial(0, BigRational::one())
    }

    pub fn monomial(e: i64, coeff: BigRational) -> Self {
        let mut p = CPoly::zero();
        p.add_term(e, coeff);
        p
    }

    /// `c^e`.
    pub fn c_pow(e: i64) -> Self {
        Self::monomial(e, BigRational::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, BigRational)>) -> Self {
        let mut p = CPoly::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &BigRational)> {
        self.0.iter()
    }

    pub fn coeff(&self, e: i64) -> BigRational {
        self.0.get(&e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.0.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.0.keys().next_back().copied()
    }

    fn add_term(&mut self, e: i64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(e).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&e);
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        if s.is_zero() {
            return CPoly::zero();
        }
        CPoly(self.0.iter().map(|(e, c)| (*e, c * s)).collect())
    }

    pub fn shift(&self, k: i64) -> Self {
        CPoly(self.0.iter().map(|(e, c)| (e + k, c.clone())).collect())
    }

    /// Substitute `c -> c^n`.
    pub fn adams(&self, n: u32) -> Self {
        CPoly(self.0.iter().map(|(e, c)| (e * n as i64, c.clone())).collect())
    }

    pub fn evaluate(&self, c: &BigRational) -> BigRational {
        self.0
            .iter()
            .map(|(e, k)| k * Pow::pow(c, *e))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Greatest common divisor in `Q[c, 1/c]`, monic with lowest exponent 0.
    pub fn gcd(&self, other: &CPoly) -> CPoly {
        let norm = |p: &CPoly| match p.min_exp() {
            Some(lo) => p.shift(-lo),
            None => CPoly::zero(),
        };
        let (mut a, mut b) = (norm(self), norm(other));
        while !b.is_zero() {
            let r = a.poly_rem(&b);
            a = b;
            b = norm(&r);
        }
        match a.max_exp() {
            Some(hi) => {
                let inv = a.coeff(hi).recip();
                a.scale(&inv)
            }
            None => CPoly::one(),
        }
    }

    /// Remainder of ordinary polynomial division; both sides have lowest exponent >= 0.
    fn poly_rem(&self, d: &CPoly) -> CPoly {
        let dhi = d.max_exp().expect("nonzero divisor");
        let lead = d.coeff(dhi);
        let mut rem = self.clone();
        while let Some(top) = rem.max_exp() {
            if top < dhi {
                break;
            }
            let f = rem.coeff(top) / &lead;
            rem = &rem - &d.shift(top - dhi).scale(&f);
        }
        rem
    }

    /// Exact quotient `self / d` when `d` divides `self` in the Laurent ring.
    pub fn exact_div(&self, d: &CPoly) -> Option<CPoly> {
        let (dlo, dhi) = (d.min_exp()?, d.max_exp()?);
        if self.is_zero() {
            return Some(CPoly::zero());
        }
        let lead = d.coeff(dhi);
        let mut rem = self.clone();
        let mut quot = CPoly::zero();
        let lo = self.min_exp().unwrap();
        // long division from the top; the remainder must vanish before its degree
        // drops below lo + (dhi - dlo)
        while let Some(top) = rem.max_exp() {
            if top - (dhi - dlo) < lo {
                return None;
            }
            let k = top - dhi;
            let f = rem.coeff(top) / &lead;
            quot.add_term(k, f.clone());
            rem = &rem - &d.shift(k).scale(&f);
        }
        Some(quot)
    }
}

impl Add for &CPoly {
    type Output = CPoly;
    fn add(self, rhs: &CPoly) -> CPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.0 {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &CPoly {
    type Output = CPoly;
    fn sub(self, rhs: &CPoly) -> CPoly {
        self + &(-rhs)
    }
}

impl Neg for &CPoly {
    type Output = CPoly;
    fn neg(self) -> CPoly {
        CPoly(self.0.iter().map(|(e, c)| (*e, -c)).collect())
    }
}

impl Mul for &CPoly {
    type Output = CPoly;
    fn mul(self, rhs: &CPoly) -> CPoly {
        let mut out = CPoly::zero();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &rhs.0 {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.0.iter().enumerate() {
            let abs = c.abs();
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            match (*e, abs.is_one()) {
                (0, _) => write!(f, "{}", format_rational(&abs))?,
                (1, true) => f.write_str("c")?,
                (e, true) => write!(f, "c^{e}")?,
                (1, false) => write!(f, "{}*c", format_rational(&abs))?,
                (e, false) => write!(f, "{}*c^{e}", format_rational(&abs))?,
            }
        }
        Ok(())
    }
}

/// Quotient of two `CPoly`s.
///
/// The denominator is kept monic with lowest exponent 0; when it divides the
/// numerator exactly the quotient is stored with denominator 1. There is no
/// general GCD, so equality is decided by cross-multiplication.
#[derive(Clone, Debug)]
pub struct CRational {
    num: CPoly,
    den: CPoly,
}

impl CRational {
    pub fn new(num: CPoly, den: CPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero("zero denominator in Q(c)".into()));
        }
        let mut r = CRational { num, den };
        r.normalize();
        Ok(r)
    }

    pub fn from_poly(p: CPoly) -> Self {
        CRational {
            num: p,
            den: CPoly::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(CPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(CPoly::one())
    }

    pub fn c_pow(e: i64) -> Self {
        Self::from_poly(CPoly::c_pow(e))
    }

    pub fn num(&self) -> &CPoly {
        &self.num
    }

    pub fn den(&self) -> &CPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The numerator, when the denominator is 1.
    pub fn as_poly(&self) -> Option<&CPoly> {
        (self.den == CPoly::one()).then_some(&self.num)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = CPoly::one();
            return;
        }
        let lo = self.den.min_exp().expect("nonzero denominator");
        let lead = self.den.coeff(self.den.max_exp().unwrap());
        let inv = lead.recip();
        self.den = self.den.shift(-lo).scale(&inv);
        self.num = self.num.shift(-lo).scale(&inv);
        if self.den != CPoly::one() {
            if let Some(q) = self.num.exact_div(&self.den) {
                self.num = q;
                self.den = CPoly::one();
                return;
            }
            let g = self.num.gcd(&self.den);
            if g != CPoly::one() {
                self.num = self.num.exact_div(&g).expect("gcd divides");
                self.den = self.den.exact_div(&g).expect("gcd divides");
                let lead = self.den.coeff(self.den.max_exp().unwrap());
                let inv = lead.recip();
                self.den = self.den.scale(&inv);
                self.num = self.num.scale(&inv);
            }
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut r = CRational {
            num: self.num.scale(s),
            den: self.den.clone(),
        };
        r.normalize();
        r
    }

    pub fn recip(&self) -> Result<Self> {
        CRational::new(self.den.clone(), self.num.clone())
    }

    /// Substitute `c -> c^n`.
    pub fn adams(&self, n: u32) -> Self {
        let mut r = CRational {
            num: self.num.adams(n),
            den: self.den.adams(n),
        };
        r.normalize();
        r
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        Ok((0..e.unsigned_abs()).fold(CRational::one(), |acc, _| &acc * &base))
    }

    pub fn evaluate(&self, c: &BigRational) -> Result<BigRational> {
        let d = self.den.evaluate(c);
        if d.is_zero() {
            return Err(Error::DivisionByZero(format!("denominator {} at c = {}", self.den, c)));
        }
        Ok(self.num.evaluate(c) / d)
    }
}

impl PartialEq for CRational {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for CRational {}

impl Add for &CRational {
    type Output = CRational;
    fn add(self, rhs: &CRational) -> CRational {
        let mut r = if self.den == rhs.den {
            CRational {
                num: &self.num + &rhs.num,
                den: self.den.clone(),
            }
        } else {
            CRational {
                num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
                den: &self.den * &rhs.den,
            }
        };
        r.normalize();
        r
    }
}

impl Sub for &CRational {
    type Output = CRational;
    fn sub(self, rhs: &CRational) -> CRational {
        self + &(-rhs)
    }
}

impl Neg for &CRational {
    type Output = CRational;
    fn neg(self) -> CRational {
        CRational {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &CRational {
    type Output = CRational;
    fn mul(self, rhs: &CRational) -> CRational {
        let mut r = CRational {
            num: &self.num * &rhs.num,
            den: &self.den * &rhs.den,
        };
        r.normalize();
        r
    }
}

impl fmt::Display for CRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == CPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// JSON form: `{"num": [[exp, "coef"], ...], "den": [...]}`.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CRationalJson {
    pub num: Vec<(i64, String)>,
    pub den: Vec<(i64, String)>,
}

fn cpoly_json(p: &CPoly) -> Vec<(i64, String)> {
    p.terms().map(|(e, c)| (*e, format_rational(c))).collect()
}

fn cpoly_from_json(t: &[(i64, String)]) -> Result<CPoly> {
    t.iter()
        .map(|(e, c)| Ok((*e, parse_rational(c)?)))
        .collect::<Result<Vec<_>>>()
        .map(CPoly::from_terms)
}

impl Serialize for CRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CRationalJson {
            num: cpoly_json(&self.num),
            den: cpoly_json(&self.den),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CRationalJson::deserialize(d)?;
        let num = cpoly_from_json(&j.num).map_err(serde::de::Error::custom)?;
        let den = cpoly_from_json(&j.den).map_err(serde::de::Error::custom)?;
        CRational::new(num, den).map_err(serde::de::Error::custom)
    }
}
