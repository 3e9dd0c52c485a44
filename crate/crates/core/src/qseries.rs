//! Truncated formal series in `q0, ..., q_{r-1}` over a pluggable coefficient
//! ring, and the brute-force localization series `Z` summed over colored
//! plane partitions.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::laurent::{format_rational, CRational, LaurentPoly, RationalPoint};
use crate::partitions::{color_vector, enumerate_up_to, index, ColorVector, IndexSemigroup, PlanePartition};
use crate::vertex::{ahat_eval, ahat_limit, weights, WeightMultiset};

/// Commutative ring of series coefficients; must contain the rationals.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    /// Ring tag used in JSON output.
    const RING: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, s: &BigRational) -> Self;
    fn to_json(&self) -> Value;

    fn from_rational(s: &BigRational) -> Self {
        Self::one().scale(s)
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl Coefficient for BigRational {
    const RING: &'static str = "rational";

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, s: &BigRational) -> Self {
        self * s
    }
    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }
}

impl Coefficient for CRational {
    const RING: &'static str = "c-rational";

    fn zero() -> Self {
        CRational::zero()
    }
    fn one() -> Self {
        CRational::one()
    }
    fn is_zero(&self) -> bool {
        CRational::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, s: &BigRational) -> Self {
        CRational::scale(self, s)
    }
    fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }
}

impl Coefficient for LaurentPoly {
    const RING: &'static str = "laurent";

    fn zero() -> Self {
        LaurentPoly::zero()
    }
    fn one() -> Self {
        LaurentPoly::one()
    }
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, s: &BigRational) -> Self {
        LaurentPoly::scale(self, s)
    }
    fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }
}

/// Series truncated at total degree `order`; keys may transiently carry
/// negative components.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries<C> {
    r: usize,
    order: usize,
    coeffs: BTreeMap<ColorVector, C>,
}

impl<C: Coefficient> QSeries<C> {
    pub fn zero(r: usize, order: usize) -> Self {
        QSeries {
            r,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(r: usize, order: usize) -> Self {
        let mut s = Self::zero(r, order);
        s.add_to(ColorVector::zero(r), C::one());
        s
    }

    pub fn monomial(r: usize, order: usize, alpha: ColorVector, c: C) -> Self {
        let mut s = Self::zero(r, order);
        s.add_to(alpha, c);
        s
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, alpha: &ColorVector) -> C {
        self.coeffs.get(alpha).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&ColorVector, &C)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&ColorVector::zero(self.r))
    }

    /// Add `c q^alpha`, dropping it when beyond the truncation order.
    pub fn add_to(&mut self, alpha: ColorVector, c: C) {
        assert_eq!(alpha.r(), self.r, "color vector length");
        if c.is_zero() || alpha.total() > self.order as i64 {
            return;
        }
        match self.coeffs.entry(alpha) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().add(&c);
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.r != other.r || self.order != other.order {
            return Err(Error::Usage(format!(
                "series shapes differ: (r={}, N={}) vs (r={}, N={})",
                self.r, self.order, other.r, other.order
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, c) in &other.coeffs {
            out.add_to(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.r, self.order);
        for (a, x) in &self.coeffs {
            for (b, y) in &other.coeffs {
                let k = a.add(b);
                if k.total() <= self.order as i64 {
                    out.add_to(k, x.mul(y));
                }
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn map(&self, f: impl Fn(&C) -> C) -> Self {
        let mut out = Self::zero(self.r, self.order);
        for (a, c) in &self.coeffs {
            out.add_to(a.clone(), f(c));
        }
        out
    }

    pub fn map_ring<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> QSeries<D> {
        let mut out = QSeries::zero(self.r, self.order);
        for (a, c) in &self.coeffs {
            out.add_to(a.clone(), f(c));
        }
        out
    }

    /// Drop every coefficient of total degree above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let mut out = Self::zero(self.r, order);
        for (a, c) in &self.coeffs {
            out.add_to(a.clone(), c.clone());
        }
        out
    }

    /// Substitute `q^alpha -> q^(n alpha)`.
    pub fn dilate(&self, n: u32) -> Self {
        let mut out = Self::zero(self.r, self.order);
        for (a, c) in &self.coeffs {
            out.add_to(ColorVector(a.0.iter().map(|x| x * n as i64).collect()), c.clone());
        }
        out
    }

    /// Substitute `q0 -> -q0`.
    pub fn flip_q0(&self) -> Self {
        let mut out = Self::zero(self.r, self.order);
        for (a, c) in &self.coeffs {
            let c = if a.0[0] % 2 != 0 { c.neg() } else { c.clone() };
            out.add_to(a.clone(), c);
        }
        out
    }

    /// Zero out coefficients off the index set.
    pub fn restrict(&self, i: &IndexSemigroup) -> Result<Self> {
        if i.r() != self.r || self.order > i.bound() {
            return Err(Error::Usage(format!(
                "index set (r={}, bound={}) cannot restrict a series of (r={}, N={})",
                i.r(),
                i.bound(),
                self.r,
                self.order
            )));
        }
        let mut out = Self::zero(self.r, self.order);
        for (a, c) in &self.coeffs {
            if !a.is_zero() && a.is_nonnegative() && i.contains(a)? {
                out.add_to(a.clone(), c.clone());
            } else if a.is_zero() {
                out.add_to(a.clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// Keys with a negative component.
    pub fn negative_keys(&self) -> Vec<ColorVector> {
        self.coeffs.keys().filter(|a| !a.is_nonnegative()).cloned().collect()
    }

    /// Homogeneous components by total degree `0..=order`; fails on keys of degree < 0.
    fn graded(&self) -> Option<Vec<Vec<(ColorVector, C)>>> {
        let mut parts = vec![Vec::new(); self.order + 1];
        for (a, c) in &self.coeffs {
            let d = a.total();
            if d < 0 || (d == 0 && !a.is_zero()) {
                return None;
            }
            parts[d as usize].push((a.clone(), c.clone()));
        }
        Some(parts)
    }

    fn mul_parts(x: &[(ColorVector, C)], y: &[(ColorVector, C)], out: &mut Vec<(ColorVector, C)>) {
        for (a, p) in x {
            for (b, q) in y {
                out.push((a.add(b), p.mul(q)));
            }
        }
    }

    fn from_parts(r: usize, order: usize, parts: Vec<Vec<(ColorVector, C)>>) -> Self {
        let mut out = Self::zero(r, order);
        for (a, c) in parts.into_iter().flatten() {
            out.add_to(a, c);
        }
        out
    }

    fn collapse(r: usize, order: usize, raw: Vec<(ColorVector, C)>) -> Vec<(ColorVector, C)> {
        Self::from_parts(r, order, vec![raw]).coeffs.into_iter().collect()
    }

    /// `exp(f)` for `f` without constant term, via `E_d = (1/d) sum_j j f_j E_{d-j}`.
    pub fn exp(&self) -> Result<Self> {
        let parts = self.graded().ok_or(Error::ExpDomain)?;
        if !parts[0].is_empty() {
            return Err(Error::ExpDomain);
        }
        let mut e: Vec<Vec<(ColorVector, C)>> = vec![vec![(ColorVector::zero(self.r), C::one())]];
        for d in 1..=self.order {
            let mut raw = Vec::new();
            for j in 1..=d {
                let weighted: Vec<_> = parts[j]
                    .iter()
                    .map(|(a, c)| (a.clone(), c.scale(&BigRational::from_integer(j.into()))))
                    .collect();
                Self::mul_parts(&weighted, &e[d - j], &mut raw);
            }
            let inv = BigRational::new(1.into(), d.into());
            let raw = raw.into_iter().map(|(a, c)| (a, c.scale(&inv))).collect();
            e.push(Self::collapse(self.r, self.order, raw));
        }
        Ok(Self::from_parts(self.r, self.order, e))
    }

    /// `log(f)` for `f` with constant term 1, via `L_d = g_d - (1/d) sum_j j L_j g_{d-j}`.
    pub fn log(&self) -> Result<Self> {
        let mut parts = self.graded().ok_or(Error::LogDomain)?;
        let c0 = std::mem::take(&mut parts[0]);
        if c0.len() != 1 || c0[0].1 != C::one() {
            return Err(Error::LogDomain);
        }
        let mut l: Vec<Vec<(ColorVector, C)>> = vec![Vec::new()];
        for d in 1..=self.order {
            let mut raw = Vec::new();
            for j in 1..d {
                let weighted: Vec<_> = l[j]
                    .iter()
                    .map(|(a, c)| (a.clone(), c.scale(&BigRational::from_integer(j.into()))))
                    .collect();
                Self::mul_parts(&weighted, &parts[d - j], &mut raw);
            }
            let minv = BigRational::new((-1).into(), d.into());
            let mut raw: Vec<_> = raw.into_iter().map(|(a, c)| (a, c.scale(&minv))).collect();
            raw.extend(parts[d].iter().cloned());
            l.push(Self::collapse(self.r, self.order, raw));
        }
        Ok(Self::from_parts(self.r, self.order, l))
    }

    /// JSON document `{"r", "N", "mode", "ring", "coefficients": [{"alpha", "value"}]}`.
    pub fn to_json(&self, mode: &str) -> Value {
        let coefficients: Vec<Value> = self
            .coeffs
            .iter()
            .map(|(a, c)| json!({"alpha": a.0, "value": c.to_json()}))
            .collect();
        json!({
            "r": self.r,
            "N": self.order,
            "mode": mode,
            "ring": C::RING,
            "coefficients": coefficients,
        })
    }
}

impl<C: Coefficient> fmt::Display for QSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{:?}: {}", a.0, c)?;
        }
        Ok(())
    }
}

/// Evaluation mode for the brute-force series.
#[derive(Clone, Debug)]
pub enum Mode {
    Point(RationalPoint),
    Limit,
}

/// Per-partition data needed by every evaluation of `Z`, computed once.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub partition: PlanePartition,
    pub alpha: ColorVector,
    pub index: i64,
    pub weights: WeightMultiset,
}

impl FixedPoint {
    fn sign(&self) -> BigRational {
        if self.alpha.b() % 2 == 0 {
            <BigRational as One>::one()
        } else {
            -<BigRational as One>::one()
        }
    }
}

/// All colored fixed points with at most `order` boxes, in canonical order.
#[derive(Clone, Debug)]
pub struct FixedPointTable {
    r: usize,
    order: usize,
    points: Vec<FixedPoint>,
    semigroup: IndexSemigroup,
}

impl FixedPointTable {
    pub fn new(r: usize, order: usize) -> Result<Self> {
        Self::from_levels(r, &enumerate_up_to(order))
    }

    pub fn from_levels(r: usize, levels: &[Vec<PlanePartition>]) -> Result<Self> {
        if r == 0 {
            return Err(Error::Usage("r must be at least 1".into()));
        }
        let all: Vec<&PlanePartition> = levels.iter().flatten().collect();
        let points = all
            .par_iter()
            .map(|p| {
                Ok(FixedPoint {
                    partition: (*p).clone(),
                    alpha: color_vector(p, r),
                    index: index(p, r),
                    weights: weights(p, r)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FixedPointTable {
            r,
            order: levels.len().saturating_sub(1),
            points,
            semigroup: IndexSemigroup::from_levels(r, levels),
        })
    }

    /// Rebuild from stored fixed points; they must cover every partition with at most `order` boxes.
    pub fn from_points(r: usize, order: usize, points: Vec<FixedPoint>) -> Result<Self> {
        if r == 0 {
            return Err(Error::Usage("r must be at least 1".into()));
        }
        if let Some(f) = points.iter().find(|f| f.partition.len() > order || f.alpha.r() != r) {
            return Err(Error::Usage(format!("stored fixed point {} does not fit r = {r}, N = {order}", f.partition)));
        }
        let semigroup = IndexSemigroup::from_colors(r, order, points.iter().map(|f| f.alpha.clone()))?;
        Ok(FixedPointTable {
            r,
            order,
            points,
            semigroup,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn points(&self) -> &[FixedPoint] {
        &self.points
    }

    pub fn semigroup(&self) -> &IndexSemigroup {
        &self.semigroup
    }

    fn accumulate<C: Coefficient>(&self, order: usize, terms: Vec<(ColorVector, C)>) -> QSeries<C> {
        let mut z = QSeries::zero(self.r, order);
        for (a, c) in terms {
            z.add_to(a, c);
        }
        z
    }

    fn within(&self, order: usize) -> Result<impl ParallelIterator<Item = &FixedPoint>> {
        if order > self.order {
            return Err(Error::Usage(format!(
                "table holds partitions up to {} boxes, {} requested",
                self.order, order
            )));
        }
        Ok(self.points.par_iter().filter(move |f| f.partition.len() <= order))
    }

    /// `Z_alpha = sum_{color(pi) = alpha} (-1)^{alpha_0} a(pi)` at `pt`.
    pub fn z_point(&self, pt: &RationalPoint, order: usize) -> Result<QSeries<BigRational>> {
        let terms = self
            .within(order)?
            .map(|f| Ok((f.alpha.clone(), f.sign() * ahat_eval(&f.weights, pt)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.accumulate(order, terms))
    }

    /// Limit-mode series with coefficients `sum (-1)^{alpha_0} lim a(pi)` in `Q(c)`.
    pub fn z_limit(&self, order: usize) -> Result<QSeries<CRational>> {
        let terms = self
            .within(order)?
            .map(|f| Ok((f.alpha.clone(), ahat_limit(&f.weights)?.scale(&f.sign()))))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.accumulate(order, terms))
    }

    /// `sum (-1)^{alpha_0} (-c)^{index(pi)} q^alpha`, straight from the index.
    pub fn z_index(&self, order: usize) -> Result<QSeries<CRational>> {
        let minus_c = CRational::c_pow(1).scale(&-<BigRational as One>::one());
        let terms = self
            .within(order)?
            .map(|f| Ok((f.alpha.clone(), minus_c.pow(f.index)?.scale(&f.sign()))))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.accumulate(order, terms))
    }

    /// Signed count `sum (-1)^{alpha_0} q^alpha`.
    pub fn z_numerical(&self, order: usize) -> Result<QSeries<BigRational>> {
        let terms = self
            .within(order)?
            .map(|f| (f.alpha.clone(), f.sign()))
            .collect::<Vec<_>>();
        Ok(self.accumulate(order, terms))
    }
}

/// Brute-force `Z` in point mode.
pub fn z_enumerated_point(r: usize, order: usize, pt: &RationalPoint) -> Result<QSeries<BigRational>> {
    FixedPointTable::new(r, order)?.z_point(pt, order)
}

/// Brute-force `Z` in limit mode.
pub fn z_enumerated_limit(r: usize, order: usize) -> Result<QSeries<CRational>> {
    FixedPointTable::new(r, order)?.z_limit(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::{CPoly, ExponentVector};
    use crate::partitions::PlanePartition;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn cv(v: &[i64]) -> ColorVector {
        ColorVector(v.to_vec())
    }

    fn series(r: usize, order: usize, terms: &[(&[i64], BigRational)]) -> QSeries<BigRational> {
        let mut s = QSeries::zero(r, order);
        for (a, c) in terms {
            s.add_to(cv(a), c.clone());
        }
        s
    }

    #[test]
    fn exp_log_basics() {
        let one_plus = series(1, 8, &[(&[0], rat(1, 1)), (&[1], rat(1, 1))]);
        assert_eq!(one_plus.log().unwrap().exp().unwrap(), one_plus);

        let a = series(1, 2, &[(&[0], rat(1, 1)), (&[1], rat(1, 1))]);
        let b = series(1, 2, &[(&[0], rat(1, 1)), (&[1], rat(-1, 1))]);
        assert_eq!(
            a.try_mul(&b).unwrap(),
            series(1, 2, &[(&[0], rat(1, 1)), (&[2], rat(-1, 1))])
        );

        let x = series(1, 3, &[(&[1], rat(1, 1))]);
        assert_eq!(
            x.exp().unwrap(),
            series(
                1,
                3,
                &[(&[0], rat(1, 1)), (&[1], rat(1, 1)), (&[2], rat(1, 2)), (&[3], rat(1, 6))]
            )
        );
    }

    #[test]
    fn domain_errors() {
        let with_const = series(1, 3, &[(&[0], rat(2, 1))]);
        assert_eq!(with_const.exp(), Err(Error::ExpDomain));
        assert_eq!(with_const.log(), Err(Error::LogDomain));
        let neg = series(2, 3, &[(&[1, -1], rat(1, 1))]);
        assert_eq!(neg.exp(), Err(Error::ExpDomain));
    }

    #[test]
    fn restriction() {
        let i = IndexSemigroup::new(2, 4);
        let s = series(2, 4, &[(&[0, 0], rat(1, 1)), (&[0, 1], rat(1, 1))]);
        let restricted = s.restrict(&i).unwrap();
        assert_eq!(restricted, QSeries::one(2, 4));
        assert_eq!(restricted.restrict(&i).unwrap(), restricted);
        assert!(QSeries::<BigRational>::one(2, 6).restrict(&i).is_err());
    }

    #[test]
    fn enumerated_series_shape() {
        let pt = RationalPoint::from_ints([(2, 1), (3, 1), (5, 1)]).unwrap();
        let table = FixedPointTable::new(2, 5).unwrap();
        let z = table.z_point(&pt, 5).unwrap();
        assert_eq!(z.constant_term(), rat(1, 1));
        assert_eq!(z.restrict(table.semigroup()).unwrap(), z);
        // single box: -[t1 t2]/[t3] = -175/144
        assert_eq!(z.coeff(&cv(&[1, 0])), rat(-175, 144));
    }

    #[test]
    fn limit_mode_r1_q2() {
        let z = z_enumerated_limit(1, 2).unwrap();
        let c = |k: i64, n: i64| CPoly::monomial(k, BigRational::from_integer(n.into()));
        assert_eq!(z.coeff(&cv(&[1])), CRational::from_poly(c(1, 1)));
        assert_eq!(z.coeff(&cv(&[2])), CRational::from_poly(&c(0, 1) + &c(2, 2)));
    }

    #[test]
    fn limit_mode_matches_index_form() {
        for r in 1..=3 {
            let t = FixedPointTable::new(r, 6).unwrap();
            assert_eq!(t.z_limit(6).unwrap(), t.z_index(6).unwrap());
        }
    }

    #[test]
    fn laurent_coefficients() {
        let m = LaurentPoly::unit_monomial(ExponentVector::t(0, 1, 0, 0));
        let s = QSeries::monomial(1, 3, cv(&[1]), m.clone());
        let e = s.exp().unwrap();
        assert_eq!(e.coeff(&cv(&[2])), m.pow(2).scale(&rat(1, 2)));
        let _ = PlanePartition::empty();
    }

    fn arb_series() -> impl Strategy<Value = QSeries<BigRational>> {
        prop::collection::vec(((0i64..3, 0i64..3), -4i64..=4, 1i64..=3), 0..6).prop_map(|terms| {
            let mut s = QSeries::zero(2, 4);
            for ((a, b), n, d) in terms {
                if a + b > 0 {
                    s.add_to(cv(&[a, b]), rat(n, d));
                }
            }
            s
        })
    }

    proptest! {
        #[test]
        fn exp_log_inverse(f in arb_series()) {
            let e = f.exp().unwrap();
            prop_assert_eq!(e.log().unwrap(), f.clone());
            let g = QSeries::one(2, 4).try_add(&f).unwrap();
            prop_assert_eq!(g.log().unwrap().exp().unwrap(), g);
        }

        #[test]
        fn multiplication_laws(f in arb_series(), g in arb_series(), h in arb_series()) {
            prop_assert_eq!(f.try_mul(&g).unwrap(), g.try_mul(&f).unwrap());
            prop_assert_eq!(
                f.try_mul(&g).unwrap().try_mul(&h).unwrap(),
                f.try_mul(&g.try_mul(&h).unwrap()).unwrap()
            );
            prop_assert_eq!(
                f.try_add(&g).unwrap().exp().unwrap(),
                f.exp().unwrap().try_mul(&g.exp().unwrap()).unwrap()
            );
        }
    }
}
